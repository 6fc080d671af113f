//! Closed-form connectivity predictors for `η = 2`.
//!
//! Each `P_fc` is `1 − Σ terms`, where every term approximates the expected
//! number of isolated nodes contributed by one geometric feature (bulk,
//! outer boundary, obstacle boundary, corners). Totals are returned raw and
//! can be negative at low density.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelError, ChannelModel};
use crate::geometry::{Domain, GeometryError};

/// Automatic regime selection cut, as a multiple of `r₀`.
pub const REGIME_FACTOR: f64 = 5.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("invalid {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("{regime} regime needs r {relation} r0 = {r0}, got r = {r}")]
    RegimeMismatch {
        regime: Regime,
        relation: &'static str,
        r: f64,
        r0: f64,
    },
    #[error("obstacle radius {r} is between r0/{factor} and {factor}·r0 (r0 = {r0}); choose a regime explicitly", factor = REGIME_FACTOR)]
    RegimeRequired { r: f64, r0: f64 },
    #[error("separation requirement violated: {0}")]
    SeparationViolation(GeometryError),
    #[error("obstacle {index} has radius {r}, not below r0 = {r0}")]
    ObstacleTooLarge { index: usize, r: f64, r0: f64 },
    #[error("no sign change of the mass difference on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SmallObstacle,
    LargeObstacle,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::SmallObstacle => "small-obstacle",
            Regime::LargeObstacle => "large-obstacle",
        })
    }
}

impl Regime {
    /// Resolve the regime for an obstacle of radius `r`. Without an explicit
    /// choice, radii below `r₀/5` are small and above `5r₀` large; radii in
    /// between must be given a regime and carry a validity warning.
    pub fn resolve(requested: Option<Regime>, r: f64, r0: f64) -> Result<(Regime, Option<String>), AnalyticError> {
        let in_gap = r >= r0 / REGIME_FACTOR && r <= REGIME_FACTOR * r0;
        let regime = match requested {
            Some(Regime::SmallObstacle) if r >= r0 => {
                return Err(AnalyticError::RegimeMismatch {
                    regime: Regime::SmallObstacle,
                    relation: "<",
                    r,
                    r0,
                })
            }
            Some(Regime::LargeObstacle) if r <= r0 => {
                return Err(AnalyticError::RegimeMismatch {
                    regime: Regime::LargeObstacle,
                    relation: ">",
                    r,
                    r0,
                })
            }
            Some(regime) => regime,
            None if in_gap => return Err(AnalyticError::RegimeRequired { r, r0 }),
            None if r < r0 => Regime::SmallObstacle,
            None => Regime::LargeObstacle,
        };
        let warning = in_gap.then(|| {
            format!("obstacle radius {r} is within a factor {REGIME_FACTOR} of r0 = {r0}; {regime} asymptotics are outside their validity range")
        });
        Ok((regime, warning))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Bulk,
    OuterBoundary,
    Obstacle,
    Corners,
    /// Outer and obstacle perimeters merged, as in the large-domain limit.
    CombinedBoundary,
}

impl Term {
    pub fn name(&self) -> &'static str {
        match self {
            Term::Bulk => "bulk",
            Term::OuterBoundary => "outer_boundary",
            Term::Obstacle => "obstacle",
            Term::Corners => "corners",
            Term::CombinedBoundary => "combined_boundary",
        }
    }
}

/// A predicted `P_fc` and the magnitudes subtracted from 1 to obtain it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfcBreakdown {
    pub total: f64,
    pub terms: BTreeMap<Term, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl PfcBreakdown {
    pub fn from_terms(terms: impl IntoIterator<Item = (Term, f64)>) -> Self {
        let terms: BTreeMap<Term, f64> = terms.into_iter().collect();
        let total = 1.0 - terms.values().sum::<f64>();
        PfcBreakdown {
            total,
            terms,
            warnings: Vec::new(),
        }
    }

    pub fn term(&self, term: Term) -> Option<f64> {
        self.terms.get(&term).copied()
    }

    fn with_warning(mut self, warning: Option<String>) -> Self {
        self.warnings.extend(warning);
        self
    }
}

/// Write `rho,total,bulk,outer_boundary,obstacle,corners`, leaving absent
/// terms empty. A combined boundary term is reported in the
/// `outer_boundary` column.
pub fn write_breakdown_csv<W: Write>(rows: &[(f64, PfcBreakdown)], mut out: W) -> io::Result<()> {
    writeln!(out, "rho,total,bulk,outer_boundary,obstacle,corners")?;
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for (rho, b) in rows {
        let boundary = b.term(Term::OuterBoundary).or(b.term(Term::CombinedBoundary));
        writeln!(
            out,
            "{rho},{},{},{},{},{}",
            b.total,
            cell(b.term(Term::Bulk)),
            cell(boundary),
            cell(b.term(Term::Obstacle)),
            cell(b.term(Term::Corners)),
        )?;
    }
    Ok(())
}

fn positive(name: &'static str, value: f64) -> Result<(), AnalyticError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(AnalyticError::InvalidParameter { name, value })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<(), AnalyticError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(AnalyticError::InvalidParameter { name, value })
    }
}

fn r0_of(beta: f64) -> f64 {
    1.0 / beta.sqrt()
}

/// Bulk mass in three dimensions, `(π/β)^{3/2}`.
fn bulk3(beta: f64) -> f64 {
    (PI / beta).powf(1.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassForm {
    Closed,
    Series,
}

/// Mass at distance `ε` from the center of a disk of radius `R`, expanded
/// about the boundary: `π/(2β) − √π/(4βR√β) + (R − ε)√(π/β)`.
pub fn mass_disk_boundary(epsilon: f64, outer: f64, beta: f64) -> f64 {
    PI / (2.0 * beta) - PI.sqrt() / (4.0 * beta * outer * beta.sqrt()) + (outer - epsilon) * (PI / beta).sqrt()
}

/// Mass at distance `ε` from a small circular obstacle of radius `r`.
pub fn mass_annulus_small(epsilon: f64, r: f64, beta: f64, form: MassForm) -> Result<f64, AnalyticError> {
    positive("r", r)?;
    positive("beta", beta)?;
    non_negative("epsilon", epsilon)?;
    Ok(match form {
        MassForm::Closed => {
            PI / beta + (r * r - 1.0 / beta) * (r / (r + epsilon)).asin() + r * (2.0 * r * epsilon + epsilon * epsilon).sqrt()
                - PI * r * r / 2.0
        }
        MassForm::Series => {
            PI / (2.0 * beta)
                + 2f64.sqrt() / (beta * r.sqrt()) * epsilon.sqrt()
                + (8.0 * beta * r * r - 5.0) / (6.0 * beta * 2f64.sqrt() * r.powf(1.5)) * epsilon.powf(1.5)
        }
    })
}

/// Mass at distance `ε` from a large circular obstacle:
/// `π/(2β) + √π/(4βr√β) + ε√(π/β)`.
pub fn mass_annulus_large(epsilon: f64, r: f64, beta: f64) -> f64 {
    PI / (2.0 * beta) + PI.sqrt() / (4.0 * beta * r * beta.sqrt()) + epsilon * (PI / beta).sqrt()
}

/// Geometry of the shadowed cone behind a small spherical obstacle, seen
/// from distance `ε`: base radius `λ`, height `h`, half apex angle `θ_c`
/// and the fraction `ω` of the full solid angle it subtends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeGeometry {
    pub lambda: f64,
    pub height: f64,
    pub theta_c: f64,
    pub omega: f64,
}

pub fn shell_cone_geometry(epsilon: f64, r: f64) -> ConeGeometry {
    let d = r + epsilon;
    let chord2 = 2.0 * r * epsilon + epsilon * epsilon;
    let q = r / d;
    ConeGeometry {
        lambda: q * chord2.sqrt(),
        height: chord2 / d,
        theta_c: q.asin(),
        omega: 0.5 * (1.0 - (1.0 - q * q).max(0.0).sqrt()),
    }
}

/// Mass at distance `ε` from a small spherical obstacle of radius `r`.
///
/// The series keeps the sign that follows from expanding the closed form:
/// `C/2 + C√ε/√(2r) − 3C ε^{3/2}/(4√2 r^{3/2})` with `C = (π/β)^{3/2}`.
pub fn mass_shell_small(epsilon: f64, r: f64, beta: f64, form: MassForm) -> Result<f64, AnalyticError> {
    positive("r", r)?;
    positive("beta", beta)?;
    non_negative("epsilon", epsilon)?;
    let c = bulk3(beta);
    Ok(match form {
        MassForm::Closed => {
            let cone = shell_cone_geometry(epsilon, r);
            epsilon * epsilon * PI * r * r / (3.0 * (epsilon + r)) + c * (1.0 - cone.omega)
        }
        MassForm::Series => {
            c / 2.0 + c / (2.0 * r).sqrt() * epsilon.sqrt()
                - 3.0 * c / (4.0 * 2f64.sqrt() * r.powf(1.5)) * epsilon.powf(1.5)
        }
    })
}

/// Mass at distance `ε` from a large spherical obstacle:
/// `(π/β)^{3/2}/2 + π/(2β²r) + πε/β`.
pub fn mass_shell_large(epsilon: f64, r: f64, beta: f64) -> f64 {
    bulk3(beta) / 2.0 + PI / (2.0 * beta * beta * r) + PI * epsilon / beta
}

/// Distance at which `boundary_mass` meets `bulk_mass`, by bisection on
/// `bracket` until the interval is narrower than 1e-10.
pub fn crossover_epsilon<F: Fn(f64) -> f64>(bulk_mass: f64, boundary_mass: F, bracket: (f64, f64)) -> Result<f64, AnalyticError> {
    let (mut lo, mut hi) = bracket;
    let g = |e: f64| boundary_mass(e) - bulk_mass;
    let (mut glo, ghi) = (g(lo), g(hi));
    if !(glo.is_finite() && ghi.is_finite()) || glo == 0.0 && ghi == 0.0 || glo.signum() == ghi.signum() && glo != 0.0 && ghi != 0.0 {
        return Err(AnalyticError::NoSignChange { lo, hi });
    }
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `L⁺` for a disk: radius at which the boundary expansion reaches the bulk
/// mass `π/β`.
pub fn disk_crossover(outer: f64, beta: f64) -> Result<f64, AnalyticError> {
    crossover_epsilon(PI / beta, |e| mass_disk_boundary(e, outer, beta), (0.0, outer))
}

/// `L⁻` for a circular (`dim = 2`) or spherical (`dim = 3`) obstacle: the
/// distance at which the near-obstacle mass reaches the bulk mass. Small
/// obstacles use the closed cone form, since for `r ≪ r₀` the truncated
/// series turns over below the bulk value.
pub fn obstacle_crossover(r: f64, beta: f64, regime: Regime, dim: usize) -> Result<f64, AnalyticError> {
    positive("r", r)?;
    positive("beta", beta)?;
    let upper = 100.0 * r0_of(beta);
    match (dim, regime) {
        (2, Regime::SmallObstacle) => crossover_epsilon(
            PI / beta,
            |e| mass_annulus_small(e, r, beta, MassForm::Closed).unwrap_or(f64::NAN),
            (0.0, upper),
        ),
        (2, Regime::LargeObstacle) => crossover_epsilon(PI / beta, |e| mass_annulus_large(e, r, beta), (0.0, upper)),
        (3, Regime::SmallObstacle) => crossover_epsilon(
            bulk3(beta),
            |e| mass_shell_small(e, r, beta, MassForm::Closed).unwrap_or(f64::NAN),
            (0.0, upper),
        ),
        (3, Regime::LargeObstacle) => crossover_epsilon(bulk3(beta), |e| mass_shell_large(e, r, beta), (0.0, upper)),
        _ => Err(AnalyticError::Unsupported(format!("dimension {dim}"))),
    }
}

fn disk_terms(outer: f64, beta: f64, rho: f64) -> [(Term, f64); 2] {
    let bulk = PI * outer * outer * rho * (-rho * PI / beta).exp();
    let exponent = rho / beta * (PI / 2.0 - PI.sqrt() / (4.0 * outer * beta.sqrt()));
    let boundary = 2.0 * PI * outer * (beta / PI).sqrt() * (-exponent).exp();
    [(Term::Bulk, bulk), (Term::OuterBoundary, boundary)]
}

/// Disk of radius `R`, with the curvature-corrected boundary term.
pub fn pfc_disk(outer: f64, beta: f64, rho: f64) -> Result<PfcBreakdown, AnalyticError> {
    positive("R", outer)?;
    positive("beta", beta)?;
    positive("rho", rho)?;
    Ok(PfcBreakdown::from_terms(disk_terms(outer, beta, rho)))
}

/// Isolation term of one small circular obstacle, `πr²(2β²/ρ)e^{−ρπ/(2β)}`.
pub fn small_obstacle_term(r: f64, beta: f64, rho: f64) -> f64 {
    PI * r * r * (2.0 * beta * beta / rho) * (-rho * PI / (2.0 * beta)).exp()
}

/// Isolation term of one large circular obstacle, a convex perimeter with
/// the opposite curvature correction to the outer wall.
pub fn large_obstacle_term(r: f64, beta: f64, rho: f64) -> f64 {
    let exponent = rho / beta * (PI / 2.0 + PI.sqrt() / (4.0 * r * beta.sqrt()));
    2.0 * PI * r * (beta / PI).sqrt() * (-exponent).exp()
}

/// Annulus with inner radius `r` and outer radius `R`. The bulk term keeps
/// the full disk area `πR²` in both regimes.
pub fn pfc_annulus(r: f64, outer: f64, beta: f64, rho: f64, regime: Option<Regime>) -> Result<PfcBreakdown, AnalyticError> {
    non_negative("r", r)?;
    positive("R", outer)?;
    positive("beta", beta)?;
    positive("rho", rho)?;
    if r >= outer {
        return Err(AnalyticError::InvalidParameter { name: "r", value: r });
    }
    let (regime, warning) = if r == 0.0 && regime != Some(Regime::LargeObstacle) {
        (Regime::SmallObstacle, None)
    } else {
        Regime::resolve(regime, r, r0_of(beta))?
    };
    let obstacle = match regime {
        Regime::SmallObstacle => small_obstacle_term(r, beta, rho),
        Regime::LargeObstacle => large_obstacle_term(r, beta, rho),
    };
    let [bulk, boundary] = disk_terms(outer, beta, rho);
    Ok(PfcBreakdown::from_terms([bulk, boundary, (Term::Obstacle, obstacle)]).with_warning(warning))
}

/// Annulus when both radii are far larger than `r₀`: curvature corrections
/// dropped and both perimeters merged into one boundary term.
pub fn pfc_annulus_large_domain(r: f64, outer: f64, beta: f64, rho: f64) -> Result<PfcBreakdown, AnalyticError> {
    non_negative("r", r)?;
    positive("R", outer)?;
    positive("beta", beta)?;
    positive("rho", rho)?;
    let boundary = 2.0 * PI * (outer + r) * (beta / PI).sqrt() * (-rho * PI / (2.0 * beta)).exp();
    let bulk = PI * (outer * outer - r * r) * rho * (-rho * PI / beta).exp();
    Ok(PfcBreakdown::from_terms([(Term::Bulk, bulk), (Term::CombinedBoundary, boundary)]))
}

fn square_terms(side: f64, hole_area: f64, beta: f64, rho: f64) -> [(Term, f64); 3] {
    [
        (Term::Bulk, (side * side - hole_area) * rho * (-PI * rho / beta).exp()),
        (Term::OuterBoundary, 4.0 * side * (beta / PI).sqrt() * (-PI * rho / (2.0 * beta)).exp()),
        (Term::Corners, 16.0 * beta / (rho * PI) * (-PI * rho / (4.0 * beta)).exp()),
    ]
}

/// Obstacle-free square of side `L`.
pub fn pfc_square(side: f64, beta: f64, rho: f64) -> Result<PfcBreakdown, AnalyticError> {
    positive("L", side)?;
    positive("beta", beta)?;
    positive("rho", rho)?;
    Ok(PfcBreakdown::from_terms(square_terms(side, 0.0, beta, rho)))
}

/// Square with small circular obstacles. With `centers`, obstacles must be
/// at least `2r₀` apart from each other and from the walls.
pub fn pfc_square_obstacles(
    side: f64,
    radii: &[f64],
    beta: f64,
    rho: f64,
    centers: Option<&[[f64; 2]]>,
) -> Result<PfcBreakdown, AnalyticError> {
    positive("L", side)?;
    positive("beta", beta)?;
    positive("rho", rho)?;
    let r0 = r0_of(beta);
    for (index, &r) in radii.iter().enumerate() {
        positive("r", r)?;
        if r >= r0 {
            return Err(AnalyticError::ObstacleTooLarge { index, r, r0 });
        }
    }
    if let Some(centers) = centers {
        if centers.len() != radii.len() {
            return Err(AnalyticError::Unsupported(format!(
                "{} centers given for {} radii",
                centers.len(),
                radii.len()
            )));
        }
        let obstacles = centers
            .iter()
            .zip(radii)
            .map(|(c, &r)| crate::geometry::Obstacle::new(c[0], c[1], r))
            .collect();
        Domain::square(side, obstacles)
            .and_then(|d| d.check_separation(2.0 * r0))
            .map_err(AnalyticError::SeparationViolation)?;
    }
    let hole_area: f64 = radii.iter().map(|r| PI * r * r).sum();
    let obstacle: f64 = radii.iter().map(|&r| small_obstacle_term(r, beta, rho)).sum();
    let mut terms = square_terms(side, hole_area, beta, rho).to_vec();
    if !radii.is_empty() {
        terms.push((Term::Obstacle, obstacle));
    }
    Ok(PfcBreakdown::from_terms(terms))
}

/// Per-obstacle isolation term with the form chosen by comparing `r` with
/// `r₀`: small-obstacle form for `r ≤ r₀`, perimeter form above.
pub fn obstacle_term_by_size(r: f64, beta: f64, rho: f64) -> f64 {
    if r <= r0_of(beta) {
        small_obstacle_term(r, beta, rho)
    } else {
        large_obstacle_term(r, beta, rho)
    }
}

/// Square of side `L` with `n` equal obstacles of radius `r`, either size.
pub fn pfc_square_many(side: f64, n: usize, r: f64, beta: f64, rho: f64) -> Result<PfcBreakdown, AnalyticError> {
    positive("L", side)?;
    positive("r", r)?;
    positive("beta", beta)?;
    positive("rho", rho)?;
    let hole_area = n as f64 * PI * r * r;
    if hole_area >= side * side {
        return Err(AnalyticError::InvalidParameter { name: "n", value: n as f64 });
    }
    let mut terms = square_terms(side, hole_area, beta, rho).to_vec();
    if n > 0 {
        terms.push((Term::Obstacle, n as f64 * obstacle_term_by_size(r, beta, rho)));
    }
    Ok(PfcBreakdown::from_terms(terms))
}

/// Total obstacle isolation over the sum of the obstacle-free square's
/// bulk, boundary and corner terms. Obstacle dominance means a ratio above 1.
pub fn obstacle_dominance_ratio(side: f64, n: usize, r: f64, beta: f64, rho: f64) -> Result<f64, AnalyticError> {
    positive("L", side)?;
    positive("r", r)?;
    positive("beta", beta)?;
    positive("rho", rho)?;
    let denominator: f64 = square_terms(side, 0.0, beta, rho).iter().map(|(_, v)| v).sum();
    Ok(n as f64 * obstacle_term_by_size(r, beta, rho) / denominator)
}

/// Spherical shell with inner radius `r` (`r = 0` is the solid ball) and
/// outer radius `R`. Both obstacle branches use the exponents as printed
/// for this geometry: the large branch carries `1/(R√β)` in its exponent.
pub fn pfc_shell(r: f64, outer: f64, beta: f64, rho: f64, regime: Option<Regime>) -> Result<PfcBreakdown, AnalyticError> {
    non_negative("r", r)?;
    positive("R", outer)?;
    positive("beta", beta)?;
    positive("rho", rho)?;
    if r >= outer {
        return Err(AnalyticError::InvalidParameter { name: "r", value: r });
    }
    let c = bulk3(beta);
    let bulk = 4.0 * PI / 3.0 * (outer.powi(3) - r.powi(3)) * rho * (-rho * c).exp();
    let curved = c / 2.0 - PI / (2.0 * beta * beta.sqrt()) / (outer * beta.sqrt());
    let outer_term = 4.0 * PI * outer * outer * (beta / PI) * (-rho * curved).exp();
    let mut terms = vec![(Term::Bulk, bulk), (Term::OuterBoundary, outer_term)];
    let warning = if r == 0.0 && regime != Some(Regime::LargeObstacle) {
        if regime == Some(Regime::SmallObstacle) {
            terms.push((Term::Obstacle, 0.0));
        }
        None
    } else {
        let (regime, warning) = Regime::resolve(regime, r, r0_of(beta))?;
        let obstacle = match regime {
            Regime::SmallObstacle => {
                4.0 / 3.0 * PI * r.powi(3) * (12.0 * beta.powi(3) / (rho * PI.powi(3))) * (-rho * c / 2.0).exp()
            }
            Regime::LargeObstacle => 4.0 * PI * r * r * (beta / PI) * (-rho * curved).exp(),
        };
        terms.push((Term::Obstacle, obstacle));
        warning
    };
    Ok(PfcBreakdown::from_terms(terms).with_warning(warning))
}

/// Dispatch on the domain shape. Square obstacles use the small-obstacle
/// form and must satisfy the `2r₀` separation rule.
pub fn predict(domain: &Domain, channel: &ChannelModel, rho: f64, regime: Option<Regime>) -> Result<PfcBreakdown, AnalyticError> {
    channel.require_eta_two()?;
    let beta = channel.beta();
    match domain {
        Domain::Disk { outer } => pfc_disk(*outer, beta, rho),
        Domain::Annulus { inner, outer } => pfc_annulus(*inner, *outer, beta, rho, regime),
        Domain::Sphere { outer } => pfc_shell(0.0, *outer, beta, rho, None),
        Domain::SphericalShell { inner, outer } => pfc_shell(*inner, *outer, beta, rho, regime),
        Domain::SquareWithObstacles { side, obstacles } if obstacles.is_empty() => pfc_square(*side, beta, rho),
        Domain::SquareWithObstacles { side, obstacles } => {
            let radii: Vec<f64> = obstacles.iter().map(|o| o.radius).collect();
            let centers: Vec<[f64; 2]> = obstacles.iter().map(|o| o.center).collect();
            pfc_square_obstacles(*side, &radii, beta, rho, Some(&centers))
        }
    }
}
