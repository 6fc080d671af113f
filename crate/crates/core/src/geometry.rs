//! Bounded domains, point sampling and line of sight.
//!
//! All domains are centered so that their symmetry is cheap to exploit:
//! disks, annuli, balls and shells are centered at the origin, and the square
//! occupies `[0, L] x [0, L]`. Planar points carry `z = 0`.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};
use std::ops::{Add, Mul, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Segments passing this close to an obstacle's rim still count as visible.
pub const GRAZING_TOLERANCE: f64 = 1e-12;

/// Relative slack for membership tests on sampled points.
const MEMBERSHIP_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid {name}: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("obstacle {index} is not strictly inside the square")]
    ObstacleOutside { index: usize },
    #[error("obstacles {first} and {second} overlap")]
    ObstaclesOverlap { first: usize, second: usize },
    #[error("obstacles {first} and {second} are closer than {min_gap} (gap {gap})")]
    PairSeparation {
        first: usize,
        second: usize,
        gap: f64,
        min_gap: f64,
    },
    #[error("obstacle {index} is closer than {min_gap} to the square boundary (gap {gap})")]
    BoundarySeparation { index: usize, gap: f64, min_gap: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub z: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0, z: 0.0 };

    pub fn planar(x: f64, y: f64) -> Self {
        Point { x, y, z: 0.0 }
    }

    pub fn spatial(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    fn lex_le(self, other: Point) -> bool {
        (self.x, self.y, self.z) <= (other.x, other.y, other.z)
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, o: Point) -> Point {
        Point::spatial(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, o: Point) -> Point {
        Point::spatial(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        Point::spatial(self.x * s, self.y * s, self.z * s)
    }
}

/// Distance from `p` to the closed segment `ab`.
pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    (a + ab * t).distance(p)
}

/// A circular hole inside the square domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Obstacle {
    pub fn new(cx: f64, cy: f64, radius: f64) -> Self {
        Obstacle { center: [cx, cy], radius }
    }

    pub fn center_point(&self) -> Point {
        Point::planar(self.center[0], self.center[1])
    }
}

/// A bounded region of the plane or of space.
///
/// Construct through the checked constructors or by deserializing; both run
/// [`Domain::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRepr", into = "DomainRepr")]
pub enum Domain {
    Disk { outer: f64 },
    Annulus { inner: f64, outer: f64 },
    Sphere { outer: f64 },
    SphericalShell { inner: f64, outer: f64 },
    SquareWithObstacles { side: f64, obstacles: Vec<Obstacle> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum DomainRepr {
    Disk {
        #[serde(rename = "R")]
        outer: f64,
    },
    Annulus {
        r: f64,
        #[serde(rename = "R")]
        outer: f64,
    },
    Sphere {
        #[serde(rename = "R")]
        outer: f64,
    },
    SphericalShell {
        r: f64,
        #[serde(rename = "R")]
        outer: f64,
    },
    #[serde(alias = "square")]
    SquareWithObstacles {
        #[serde(rename = "L")]
        side: f64,
        #[serde(default)]
        obstacles: Vec<Obstacle>,
    },
}

impl TryFrom<DomainRepr> for Domain {
    type Error = GeometryError;

    fn try_from(repr: DomainRepr) -> Result<Self, Self::Error> {
        let domain = match repr {
            DomainRepr::Disk { outer } => Domain::Disk { outer },
            DomainRepr::Annulus { r, outer } => Domain::Annulus { inner: r, outer },
            DomainRepr::Sphere { outer } => Domain::Sphere { outer },
            DomainRepr::SphericalShell { r, outer } => Domain::SphericalShell { inner: r, outer },
            DomainRepr::SquareWithObstacles { side, obstacles } => {
                Domain::SquareWithObstacles { side, obstacles }
            }
        };
        domain.validate()?;
        Ok(domain)
    }
}

impl From<Domain> for DomainRepr {
    fn from(d: Domain) -> Self {
        match d {
            Domain::Disk { outer } => DomainRepr::Disk { outer },
            Domain::Annulus { inner, outer } => DomainRepr::Annulus { r: inner, outer },
            Domain::Sphere { outer } => DomainRepr::Sphere { outer },
            Domain::SphericalShell { inner, outer } => DomainRepr::SphericalShell { r: inner, outer },
            Domain::SquareWithObstacles { side, obstacles } => {
                DomainRepr::SquareWithObstacles { side, obstacles }
            }
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), GeometryError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(GeometryError::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

fn check_radii(inner: f64, outer: f64) -> Result<(), GeometryError> {
    positive("R", outer)?;
    if !(inner.is_finite() && inner >= 0.0 && inner < outer) {
        return Err(GeometryError::InvalidParameter {
            name: "r",
            value: inner,
            reason: "must satisfy 0 <= r < R",
        });
    }
    Ok(())
}

impl Domain {
    pub fn disk(outer: f64) -> Result<Self, GeometryError> {
        let d = Domain::Disk { outer };
        d.validate()?;
        Ok(d)
    }

    pub fn annulus(inner: f64, outer: f64) -> Result<Self, GeometryError> {
        let d = Domain::Annulus { inner, outer };
        d.validate()?;
        Ok(d)
    }

    pub fn sphere(outer: f64) -> Result<Self, GeometryError> {
        let d = Domain::Sphere { outer };
        d.validate()?;
        Ok(d)
    }

    pub fn spherical_shell(inner: f64, outer: f64) -> Result<Self, GeometryError> {
        let d = Domain::SphericalShell { inner, outer };
        d.validate()?;
        Ok(d)
    }

    pub fn square(side: f64, obstacles: Vec<Obstacle>) -> Result<Self, GeometryError> {
        let d = Domain::SquareWithObstacles { side, obstacles };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        match *self {
            Domain::Disk { outer } | Domain::Sphere { outer } => positive("R", outer),
            Domain::Annulus { inner, outer } | Domain::SphericalShell { inner, outer } => {
                check_radii(inner, outer)
            }
            Domain::SquareWithObstacles {
                side,
                ref obstacles,
            } => {
                positive("L", side)?;
                for (i, o) in obstacles.iter().enumerate() {
                    positive("obstacle radius", o.radius)?;
                    let [cx, cy] = o.center;
                    let inside = cx - o.radius > 0.0
                        && cx + o.radius < side
                        && cy - o.radius > 0.0
                        && cy + o.radius < side;
                    if !inside {
                        return Err(GeometryError::ObstacleOutside { index: i });
                    }
                }
                for (i, a) in obstacles.iter().enumerate() {
                    for (j, b) in obstacles.iter().enumerate().skip(i + 1) {
                        if a.center_point().distance(b.center_point()) <= a.radius + b.radius {
                            return Err(GeometryError::ObstaclesOverlap { first: i, second: j });
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Checks that every obstacle keeps at least `min_gap` from every other
    /// obstacle and from the square boundary.
    pub fn check_separation(&self, min_gap: f64) -> Result<(), GeometryError> {
        let Domain::SquareWithObstacles { side, obstacles } = self else {
            return Ok(());
        };
        for (i, o) in obstacles.iter().enumerate() {
            let [cx, cy] = o.center;
            let gap = (cx.min(side - cx)).min(cy.min(side - cy)) - o.radius;
            if gap < min_gap {
                return Err(GeometryError::BoundarySeparation { index: i, gap, min_gap });
            }
        }
        for (i, a) in obstacles.iter().enumerate() {
            for (j, b) in obstacles.iter().enumerate().skip(i + 1) {
                let gap = a.center_point().distance(b.center_point()) - a.radius - b.radius;
                if gap < min_gap {
                    return Err(GeometryError::PairSeparation {
                        first: i,
                        second: j,
                        gap,
                        min_gap,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        match self {
            Domain::Sphere { .. } | Domain::SphericalShell { .. } => 3,
            _ => 2,
        }
    }

    /// Inner radius for the concentric domains; zero for disks and balls.
    pub fn inner_radius(&self) -> Option<f64> {
        match *self {
            Domain::Disk { .. } | Domain::Sphere { .. } => Some(0.0),
            Domain::Annulus { inner, .. } | Domain::SphericalShell { inner, .. } => Some(inner),
            Domain::SquareWithObstacles { .. } => None,
        }
    }

    /// Outer radius for the concentric domains.
    pub fn outer_radius(&self) -> Option<f64> {
        match *self {
            Domain::Disk { outer }
            | Domain::Sphere { outer }
            | Domain::Annulus { outer, .. }
            | Domain::SphericalShell { outer, .. } => Some(outer),
            Domain::SquareWithObstacles { .. } => None,
        }
    }

    /// Every obstacle as `(center, radius)`; the concentric domains expose
    /// their hole (if any) centered at the origin.
    pub fn holes(&self) -> Vec<(Point, f64)> {
        match self {
            Domain::Annulus { inner, .. } | Domain::SphericalShell { inner, .. } if *inner > 0.0 => {
                vec![(Point::ORIGIN, *inner)]
            }
            Domain::SquareWithObstacles { obstacles, .. } => obstacles
                .iter()
                .map(|o| (o.center_point(), o.radius))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Lebesgue measure of the free space.
    pub fn volume(&self) -> f64 {
        match *self {
            Domain::Disk { outer } => PI * outer * outer,
            Domain::Annulus { inner, outer } => PI * (outer * outer - inner * inner),
            Domain::Sphere { outer } => 4.0 / 3.0 * PI * outer.powi(3),
            Domain::SphericalShell { inner, outer } => 4.0 / 3.0 * PI * (outer.powi(3) - inner.powi(3)),
            Domain::SquareWithObstacles {
                side,
                ref obstacles,
            } => side * side - obstacles.iter().map(|o| PI * o.radius * o.radius).sum::<f64>(),
        }
    }

    fn length_scale(&self) -> f64 {
        match *self {
            Domain::Disk { outer }
            | Domain::Sphere { outer }
            | Domain::Annulus { outer, .. }
            | Domain::SphericalShell { outer, .. } => outer,
            Domain::SquareWithObstacles { side, .. } => side,
        }
    }

    /// Whether `p` lies in the free space (inside the outer boundary and
    /// outside every open obstacle), up to a tiny relative slack.
    pub fn contains(&self, p: Point) -> bool {
        let slack = MEMBERSHIP_SLACK * self.length_scale();
        match *self {
            Domain::Disk { outer } => p.z == 0.0 && p.norm() <= outer + slack,
            Domain::Sphere { outer } => p.norm() <= outer + slack,
            Domain::Annulus { inner, outer } => {
                let s = p.norm();
                p.z == 0.0 && s <= outer + slack && s >= inner - slack
            }
            Domain::SphericalShell { inner, outer } => {
                let s = p.norm();
                s <= outer + slack && s >= inner - slack
            }
            Domain::SquareWithObstacles {
                side,
                ref obstacles,
            } => {
                p.z == 0.0
                    && p.x >= -slack
                    && p.x <= side + slack
                    && p.y >= -slack
                    && p.y <= side + slack
                    && obstacles
                        .iter()
                        .all(|o| p.distance(o.center_point()) >= o.radius - slack)
            }
        }
    }

    /// Line-of-sight indicator: true iff the closed segment `ab` avoids the
    /// interior of every obstacle. Grazing segments count as visible.
    pub fn visible(&self, a: Point, b: Point) -> bool {
        // canonical order so that the result is exactly symmetric
        let (a, b) = if a.lex_le(b) { (a, b) } else { (b, a) };
        match self {
            Domain::Disk { .. } | Domain::Sphere { .. } => true,
            Domain::Annulus { inner, .. } | Domain::SphericalShell { inner, .. } => {
                segment_distance(Point::ORIGIN, a, b) >= inner - GRAZING_TOLERANCE
            }
            Domain::SquareWithObstacles { obstacles, .. } => obstacles.iter().all(|o| {
                segment_distance(o.center_point(), a, b) >= o.radius - GRAZING_TOLERANCE
            }),
        }
    }

    /// Distance from `p` to the nearest obstacle surface. Disks and balls use
    /// the distance to the center; a square without holes gives infinity.
    pub fn distance_to_obstacle(&self, p: Point) -> f64 {
        match *self {
            Domain::Disk { .. } | Domain::Sphere { .. } => p.norm(),
            Domain::Annulus { inner, .. } | Domain::SphericalShell { inner, .. } => {
                (p.norm() - inner).max(0.0)
            }
            Domain::SquareWithObstacles { ref obstacles, .. } => obstacles
                .iter()
                .map(|o| (p.distance(o.center_point()) - o.radius).max(0.0))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// One point uniform on the free space.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match *self {
            Domain::Disk { outer } => sample_planar_ring(0.0, outer, rng),
            Domain::Annulus { inner, outer } => sample_planar_ring(inner, outer, rng),
            Domain::Sphere { outer } => sample_spherical_shell(0.0, outer, rng),
            Domain::SphericalShell { inner, outer } => sample_spherical_shell(inner, outer, rng),
            Domain::SquareWithObstacles {
                side,
                ref obstacles,
            } => loop {
                let p = Point::planar(side * rng.gen::<f64>(), side * rng.gen::<f64>());
                if obstacles
                    .iter()
                    .all(|o| p.distance(o.center_point()) >= o.radius)
                {
                    break p;
                }
            },
        }
    }

    /// Short comma-free label used in tables.
    pub fn label(&self) -> String {
        match self {
            Domain::Disk { outer } => format!("disk:R={outer}"),
            Domain::Annulus { inner, outer } => format!("annulus:r={inner}:R={outer}"),
            Domain::Sphere { outer } => format!("sphere:R={outer}"),
            Domain::SphericalShell { inner, outer } => format!("shell:r={inner}:R={outer}"),
            Domain::SquareWithObstacles { side, obstacles } => {
                format!("square:L={side}:n={}", obstacles.len())
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

// Inverse-CDF radius, uniform angle: exact and rejection free.
fn sample_planar_ring<R: Rng + ?Sized>(inner: f64, outer: f64, rng: &mut R) -> Point {
    let u: f64 = rng.gen();
    let s = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
    let theta = 2.0 * PI * rng.gen::<f64>();
    Point::planar(s * theta.cos(), s * theta.sin())
}

fn sample_spherical_shell<R: Rng + ?Sized>(inner: f64, outer: f64, rng: &mut R) -> Point {
    let u: f64 = rng.gen();
    let s = (inner.powi(3) + u * (outer.powi(3) - inner.powi(3))).cbrt();
    let cos_t = 2.0 * rng.gen::<f64>() - 1.0;
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let phi = 2.0 * PI * rng.gen::<f64>();
    Point::spatial(s * sin_t * phi.cos(), s * sin_t * phi.sin(), s * cos_t)
}

/// How a node set was generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Binomial { count: usize },
    Poisson { intensity: f64 },
    Fixed,
}

/// A sampled point configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    pub dimension: usize,
    pub positions: Vec<Point>,
    pub seed: u64,
    pub provenance: Provenance,
}

impl NodeSet {
    /// Hand-placed nodes, e.g. for enumeration oracles.
    pub fn fixed(dimension: usize, positions: Vec<Point>) -> Self {
        NodeSet {
            dimension,
            positions,
            seed: 0,
            provenance: Provenance::Fixed,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// CSV with header `x,y` (planar) or `x,y,z`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        if self.dimension == 3 {
            writeln!(out, "x,y,z")?;
            for p in &self.positions {
                writeln!(out, "{},{},{}", p.x, p.y, p.z)?;
            }
        } else {
            writeln!(out, "x,y")?;
            for p in &self.positions {
                writeln!(out, "{},{}", p.x, p.y)?;
            }
        }
        Ok(())
    }
}

/// Exactly `count` i.i.d. uniform points; deterministic in `seed`.
pub fn sample_binomial(domain: &Domain, count: usize, seed: u64) -> NodeSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = (0..count).map(|_| domain.sample_point(&mut rng)).collect();
    NodeSet {
        dimension: domain.dimension(),
        positions,
        seed,
        provenance: Provenance::Binomial { count },
    }
}

/// Poisson point process of the given intensity; deterministic in `seed`.
///
/// # Panics
/// If `intensity` is negative or not finite.
pub fn sample_poisson(domain: &Domain, intensity: f64, seed: u64) -> NodeSet {
    assert!(
        intensity.is_finite() && intensity >= 0.0,
        "intensity must be finite and non-negative"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = intensity * domain.volume();
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("positive finite mean").sample(&mut rng) as usize
    } else {
        0
    };
    let positions = (0..count).map(|_| domain.sample_point(&mut rng)).collect();
    NodeSet {
        dimension: domain.dimension(),
        positions,
        seed,
        provenance: Provenance::Poisson { intensity },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_hole_square() -> Domain {
        Domain::square(100.0, vec![Obstacle::new(30.0, 30.0, 6.0), Obstacle::new(70.0, 60.0, 6.0)]).unwrap()
    }

    #[test]
    fn volumes() {
        assert!((Domain::annulus(1.0, 2.0).unwrap().volume() - 3.0 * PI).abs() < 1e-12);
        assert!((Domain::spherical_shell(1.0, 2.0).unwrap().volume() - 28.0 / 3.0 * PI).abs() < 1e-12);
        assert!((two_hole_square().volume() - (10_000.0 - 72.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Domain::annulus(2.0, 1.0).is_err());
        assert!(Domain::annulus(-0.1, 1.0).is_err());
        assert!(Domain::disk(0.0).is_err());
        assert!(Domain::square(10.0, vec![Obstacle::new(1.0, 5.0, 2.0)]).is_err());
        assert_eq!(
            Domain::square(10.0, vec![Obstacle::new(4.0, 5.0, 1.0), Obstacle::new(5.5, 5.0, 1.0)]),
            Err(GeometryError::ObstaclesOverlap { first: 0, second: 1 })
        );
    }

    #[test]
    fn separation_check_names_the_pair() {
        let d = Domain::square(50.0, vec![Obstacle::new(10.0, 10.0, 1.0), Obstacle::new(13.0, 10.0, 1.0)]).unwrap();
        match d.check_separation(2.0) {
            Err(GeometryError::PairSeparation { first: 0, second: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let edge = Domain::square(50.0, vec![Obstacle::new(2.5, 25.0, 1.0)]).unwrap();
        assert!(matches!(
            edge.check_separation(2.0),
            Err(GeometryError::BoundarySeparation { index: 0, .. })
        ));
        assert!(two_hole_square().check_separation(2.0).is_ok());
    }

    #[test]
    fn zero_count_is_empty() {
        assert!(sample_binomial(&Domain::disk(1.0).unwrap(), 0, 5).is_empty());
        assert!(sample_poisson(&Domain::disk(1.0).unwrap(), 0.0, 5).is_empty());
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = Domain::annulus(1.0, 2.0).unwrap();
        assert_eq!(sample_binomial(&d, 1000, 7), sample_binomial(&d, 1000, 7));
        assert_eq!(sample_poisson(&d, 1.0, 11), sample_poisson(&d, 1.0, 11));
        assert_ne!(sample_binomial(&d, 10, 7).positions, sample_binomial(&d, 10, 8).positions);
    }

    #[test]
    fn annulus_radial_mean() {
        // E[s] = ∫ s · 2πs ds / 3π over [1, 2] = 14/9
        // Var[s] = E[s²] - E[s]² = (15/6) - (14/9)² = 0.080247
        let d = Domain::annulus(1.0, 2.0).unwrap();
        let n = 100_000;
        let nodes = sample_binomial(&d, n, 3);
        let mean = nodes.positions.iter().map(|p| p.norm()).sum::<f64>() / n as f64;
        let sd = (2.5f64 - (14.0f64 / 9.0).powi(2)).sqrt() / (n as f64).sqrt();
        assert!((mean - 14.0 / 9.0).abs() < 3.0 * sd, "mean {mean}");
    }

    #[test]
    fn degenerate_annulus_matches_disk() {
        let a = Domain::annulus(0.0, 3.0).unwrap();
        let d = Domain::disk(3.0).unwrap();
        assert_eq!(sample_binomial(&a, 500, 9).positions, sample_binomial(&d, 500, 9).positions);
        let nodes = sample_binomial(&a, 200, 1);
        for p in &nodes.positions {
            for q in &nodes.positions {
                assert!(a.visible(*p, *q));
            }
        }
    }

    #[test]
    fn visibility_examples() {
        let d = Domain::disk(5.0).unwrap();
        assert!(d.visible(Point::planar(-4.0, 0.0), Point::planar(4.0, 0.0)));
        let a = Domain::annulus(1.0, 4.0).unwrap();
        assert!(!a.visible(Point::planar(2.0, 0.0), Point::planar(-2.0, 0.0)));
        assert!(a.visible(Point::planar(2.0, 0.0), Point::planar(0.0, 2.0)));
        // tangent segment grazes the hole
        assert!(a.visible(Point::planar(-2.0, 1.0), Point::planar(2.0, 1.0)));
        let s = Domain::spherical_shell(1.0, 4.0).unwrap();
        assert!(!s.visible(Point::spatial(0.0, 0.0, 2.0), Point::spatial(0.0, 0.0, -2.0)));
    }

    #[test]
    fn distance_to_obstacle_examples() {
        let a = Domain::annulus(1.0, 4.0).unwrap();
        assert!((a.distance_to_obstacle(Point::planar(2.0, 0.0)) - 1.0).abs() < 1e-15);
        let s = Domain::spherical_shell(1.0, 3.0).unwrap();
        assert!((s.distance_to_obstacle(Point::spatial(0.0, 0.0, 2.5)) - 1.5).abs() < 1e-15);
        let q = Domain::square(100.0, vec![Obstacle::new(50.0, 50.0, 6.0)]).unwrap();
        assert!((q.distance_to_obstacle(Point::planar(60.0, 50.0)) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejection_closure_at_scale() {
        let domains = [
            Domain::disk(2.0).unwrap(),
            Domain::annulus(1.0, 2.0).unwrap(),
            Domain::sphere(2.0).unwrap(),
            Domain::spherical_shell(1.0, 2.0).unwrap(),
            two_hole_square(),
        ];
        for d in &domains {
            let nodes = sample_binomial(d, 1_000_000, 17);
            assert_eq!(nodes.len(), 1_000_000);
            assert!(nodes.positions.iter().all(|p| d.contains(*p)), "{d}");
        }
    }

    #[test]
    fn poisson_count_mean_and_variance() {
        // count ~ Poisson(20π); both mean and variance are 20π
        let d = Domain::disk(2.0).unwrap();
        let reps = 10_000;
        let counts: Vec<f64> = (0..reps)
            .map(|s| sample_poisson(&d, 5.0, s as u64).len() as f64)
            .collect();
        let lambda = 20.0 * PI;
        let mean = counts.iter().sum::<f64>() / reps as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        assert!((mean - lambda).abs() < 3.0 * (lambda / reps as f64).sqrt(), "mean {mean}");
        // Var of the sample variance for Poisson: (λ + 2λ²)/n
        let var_sd = ((lambda + 2.0 * lambda * lambda) / reps as f64).sqrt();
        assert!((var - lambda).abs() < 3.0 * var_sd, "var {var}");
    }

    #[test]
    fn json_round_trip_and_shape() {
        let a: Domain = serde_json::from_str(r#"{"kind": "annulus", "r": 1.0, "R": 4.0}"#).unwrap();
        assert_eq!(a, Domain::annulus(1.0, 4.0).unwrap());
        let text = serde_json::to_string(&two_hole_square()).unwrap();
        assert_eq!(serde_json::from_str::<Domain>(&text).unwrap(), two_hole_square());
        assert!(serde_json::from_str::<Domain>(r#"{"kind": "annulus", "r": 5.0, "R": 4.0}"#).is_err());
        assert!(serde_json::from_str::<Domain>(r#"{"kind": "disk", "R": 4.0, "x": 1}"#).is_err());
    }

    #[test]
    fn nodeset_csv_header() {
        let mut buf = Vec::new();
        NodeSet::fixed(2, vec![Point::planar(1.0, 2.5)]).write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,y\n1,2.5\n");
        let mut buf = Vec::new();
        NodeSet::fixed(3, vec![Point::spatial(1.0, 2.0, 3.0)]).write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("x,y,z\n"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn visibility_is_symmetric_and_reflexive(seed in any::<u64>()) {
                let domains = [Domain::annulus(1.0, 4.0).unwrap(), two_hole_square(), Domain::spherical_shell(1.0, 3.0).unwrap()];
                for d in &domains {
                    let nodes = sample_binomial(d, 20, seed);
                    for p in &nodes.positions {
                        prop_assert!(d.visible(*p, *p));
                        for q in &nodes.positions {
                            prop_assert_eq!(d.visible(*p, *q), d.visible(*q, *p));
                        }
                    }
                }
            }
        }
    }
}
