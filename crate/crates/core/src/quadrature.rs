//! Numerical oracle for the connectivity mass
//! `M(x) = ∫_V χ(x, y) H(|x − y|) dy` and the isolated-node integrals built
//! on it.
//!
//! The visible part of the domain is star-shaped around `x`, so in polar
//! (spherical) coordinates centered at `x` the radial integral runs from 0 to
//! the first boundary hit along each ray and has a closed form for `η = 2`.
//! Only the angular integral is done numerically, with panel breaks at the
//! obstacle tangent directions and at the square's corners.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{self, Write};

use statrs::function::erf::erf;
use thiserror::Error;

use crate::channel::ChannelModel;
use crate::geometry::{Domain, Point};

pub const DEFAULT_MASS_TOL: f64 = 1e-8;
pub const DEFAULT_OUTER_TOL: f64 = 1e-6;

/// Panel budget for a single adaptive integral.
const MAX_PANELS: usize = 4000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("no convergence within the panel budget: estimate {estimate}, error bound {error_bound}")]
    NotConverged { estimate: f64, error_bound: f64 },
    #[error("tolerance {0} outside (0, 1e-2]")]
    InvalidTolerance(f64),
    #[error("point ({}, {}, {}) is not in the free space", .0.x, .0.y, .0.z)]
    OutsideDomain(Point),
    #[error("intensity must be finite and non-negative, got {0}")]
    InvalidIntensity(f64),
    #[error("{0}")]
    Unsupported(&'static str),
}

// 21-point Gauss–Kronrod rule on [-1, 1] (QUADPACK qk21). Odd indices are
// the embedded 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_045_465,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for k in 0..10 {
        let dx = half * XGK[k];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Result of an adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive Gauss–Kronrod integration over consecutive panels
/// `breaks[k]..breaks[k+1]`. The panel with the largest error estimate is
/// bisected until the summed estimate meets `max(abs_tol, rel_tol·|I|)`.
/// The final sum runs left to right, so results are bit-stable.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Integral, QuadratureError> {
    let mut heap: BinaryHeap<Panel> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gauss_kronrod(&f, w[0], w[1]))
        .collect();
    let mut frozen: Vec<Panel> = Vec::new();
    loop {
        let (value, error) = heap
            .iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target || heap.is_empty() {
            let mut panels: Vec<Panel> = heap.into_vec();
            panels.extend(frozen);
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value = panels.iter().map(|p| p.value).sum();
            let error = panels.iter().map(|p| p.error).sum();
            return Ok(Integral { value, error });
        }
        if heap.len() + frozen.len() >= MAX_PANELS {
            return Err(QuadratureError::NotConverged {
                estimate: value,
                error_bound: error,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot split further in floating point
            frozen.push(worst);
            continue;
        }
        heap.push(gauss_kronrod(&f, worst.a, mid));
        heap.push(gauss_kronrod(&f, mid, worst.b));
    }
}

/// Like [`integrate`], but each panel is traversed through the smoothstep map
/// `x = a + (b − a)(3u² − 2u³)`, whose vanishing end derivatives tame the
/// square-root behaviour that tangency and chord endpoints produce.
pub fn integrate_smoothed<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Integral, QuadratureError> {
    let panels: Vec<(f64, f64)> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1]))
        .collect();
    if panels.is_empty() {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    let g = |t: f64| {
        let k = (t.floor() as usize).min(panels.len() - 1);
        let u = t - k as f64;
        let (a, b) = panels[k];
        let w = b - a;
        let x = a + w * u * u * (3.0 - 2.0 * u);
        let jac = 6.0 * w * u * (1.0 - u);
        if jac == 0.0 {
            0.0
        } else {
            f(x) * jac
        }
    };
    let unit_breaks: Vec<f64> = (0..=panels.len()).map(|k| k as f64).collect();
    integrate(g, &unit_breaks, rel_tol, abs_tol)
}

fn sorted_breaks(mut pts: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    pts.retain(|p| p.is_finite() && *p > lo && *p < hi);
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    let span = hi - lo;
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * span);
    pts
}

/// `∫_0^t s^(d-1) H(s) ds`, the radial part of the mass along one ray.
struct RadialKernel {
    beta: f64,
    eta: f64,
    dim: usize,
    cutoff: f64,
}

impl RadialKernel {
    fn new(channel: &ChannelModel, dim: usize) -> Self {
        RadialKernel {
            beta: channel.beta(),
            eta: channel.eta(),
            dim,
            // H(cutoff) = e^-100; equals 10 r0 when η = 2
            cutoff: channel.r0() * 100f64.powf(1.0 / channel.eta()),
        }
    }

    fn cumulative(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let b = self.beta;
        if self.eta == 2.0 {
            let bt2 = b * t * t;
            if self.dim == 2 {
                -(-bt2).exp_m1() / (2.0 * b)
            } else if bt2 < 1e-2 {
                // t³/3 − βt⁵/5 + β²t⁷/14 − β³t⁹/54
                t.powi(3) * (1.0 / 3.0 - bt2 / 5.0 + bt2 * bt2 / 14.0 - bt2.powi(3) / 54.0)
            } else {
                PI.sqrt() / (4.0 * b * b.sqrt()) * erf(b.sqrt() * t) - t * (-bt2).exp() / (2.0 * b)
            }
        } else {
            let upper = t.min(self.cutoff);
            let d = self.dim as i32;
            let eta = self.eta;
            let f = |s: f64| s.powi(d - 1) * (-b * s.powf(eta)).exp();
            integrate(f, &[0.0, upper], 1e-13, 1e-300)
                .map(|i| i.value)
                .unwrap_or_else(|e| match e {
                    QuadratureError::NotConverged { estimate, .. } => estimate,
                    _ => f64::NAN,
                })
        }
    }
}

/// Exit distance from a point at radius `s` of a ball/disk of radius `outer`
/// along a ray at angle `theta` from the inward radial direction.
fn exit_distance(s: f64, theta: f64, outer: f64) -> f64 {
    let (sin_t, cos_t) = theta.sin_cos();
    let disc = (outer * outer - s * s * sin_t * sin_t).max(0.0).sqrt();
    if cos_t >= 0.0 {
        s * cos_t + disc
    } else {
        (outer * outer - s * s).max(0.0) / (disc - s * cos_t)
    }
}

/// Distance at which a ray leaving a point at distance `d` from a hole of
/// radius `a`, at angle `psi` off the line to its center, hits the hole.
fn hole_hit_distance(d: f64, psi: f64, a: f64) -> f64 {
    let (sin_p, cos_p) = psi.sin_cos();
    if cos_p <= 0.0 {
        return f64::INFINITY;
    }
    let disc = a * a - d * d * sin_p * sin_p;
    if disc < 0.0 {
        return f64::INFINITY;
    }
    (d * d - a * a).max(0.0) / (d * cos_p + disc.sqrt())
}

fn check_tol(tol: f64) -> Result<(), QuadratureError> {
    if tol > 0.0 && tol <= 1e-2 {
        Ok(())
    } else {
        Err(QuadratureError::InvalidTolerance(tol))
    }
}

/// Connectivity mass at `x` to relative accuracy `tol`.
pub fn connectivity_mass(
    domain: &Domain,
    channel: &ChannelModel,
    x: Point,
    tol: f64,
) -> Result<f64, QuadratureError> {
    check_tol(tol)?;
    if !domain.contains(x) {
        return Err(QuadratureError::OutsideDomain(x));
    }
    match *domain {
        Domain::Disk { outer }
        | Domain::Annulus { outer, .. }
        | Domain::Sphere { outer }
        | Domain::SphericalShell { outer, .. } => {
            let inner = domain.inner_radius().unwrap_or(0.0);
            concentric_mass(domain.dimension(), inner, outer, channel, x.norm(), tol)
        }
        Domain::SquareWithObstacles { .. } => square_mass(domain, channel, x, tol),
    }
}

/// Mass at distance `s` from the common center of a concentric domain.
/// Rotational symmetry about the axis through the center leaves a single
/// polar angle, measured from the direction pointing at the center.
fn concentric_mass(
    dim: usize,
    inner: f64,
    outer: f64,
    channel: &ChannelModel,
    s: f64,
    tol: f64,
) -> Result<f64, QuadratureError> {
    let kernel = RadialKernel::new(channel, dim);
    let s = s.clamp(inner, outer);
    let tangent = if inner > 0.0 && s > 0.0 {
        if s <= inner {
            FRAC_PI_2
        } else {
            (inner / s).asin()
        }
    } else {
        f64::NAN
    };
    let reach = |theta: f64| {
        let t = exit_distance(s, theta, outer);
        if inner > 0.0 && theta < tangent {
            t.min(hole_hit_distance(s, theta, inner))
        } else {
            t
        }
    };
    let breaks = sorted_breaks(vec![tangent], 0.0, PI);
    let integral = if dim == 2 {
        integrate_smoothed(|th| 2.0 * kernel.cumulative(reach(th)), &breaks, tol, 1e-300)?
    } else {
        integrate_smoothed(
            |th| 2.0 * PI * th.sin() * kernel.cumulative(reach(th)),
            &breaks,
            tol,
            1e-300,
        )?
    };
    Ok(integral.value)
}

fn wrap_angle(a: f64) -> f64 {
    a.rem_euclid(2.0 * PI)
}

fn square_mass(domain: &Domain, channel: &ChannelModel, x: Point, tol: f64) -> Result<f64, QuadratureError> {
    let Domain::SquareWithObstacles { side, .. } = *domain else {
        unreachable!("square_mass called on a concentric domain");
    };
    let kernel = RadialKernel::new(channel, 2);
    let (px, py) = (x.x.clamp(0.0, side), x.y.clamp(0.0, side));

    struct Hole {
        dist: f64,
        dir: f64,
        radius: f64,
        half_width: f64,
    }
    let holes: Vec<Hole> = domain
        .holes()
        .into_iter()
        .map(|(c, a)| {
            let dx = c.x - px;
            let dy = c.y - py;
            let dist = dx.hypot(dy).max(a);
            Hole {
                dist,
                dir: dy.atan2(dx),
                radius: a,
                half_width: (a / dist).min(1.0).asin(),
            }
        })
        .collect();

    let mut breaks = Vec::new();
    for (cx, cy) in [(side, side), (0.0, side), (0.0, 0.0), (side, 0.0)] {
        breaks.push(wrap_angle((cy - py).atan2(cx - px)));
    }
    for h in &holes {
        breaks.push(wrap_angle(h.dir - h.half_width));
        breaks.push(wrap_angle(h.dir + h.half_width));
    }
    let breaks = sorted_breaks(breaks, 0.0, 2.0 * PI);

    let reach = |theta: f64| {
        let (sin_t, cos_t) = theta.sin_cos();
        let mut t = f64::INFINITY;
        if cos_t > 0.0 {
            t = t.min((side - px) / cos_t);
        } else if cos_t < 0.0 {
            t = t.min(-px / cos_t);
        }
        if sin_t > 0.0 {
            t = t.min((side - py) / sin_t);
        } else if sin_t < 0.0 {
            t = t.min(-py / sin_t);
        }
        for h in &holes {
            let psi = (theta - h.dir + PI).rem_euclid(2.0 * PI) - PI;
            if psi.abs() < h.half_width {
                t = t.min(hole_hit_distance(h.dist, psi, h.radius));
            }
        }
        t
    };
    let integral = integrate_smoothed(|th| kernel.cumulative(reach(th)), &breaks, tol, 1e-300)?;
    Ok(integral.value)
}

/// Connectivity mass far from every boundary: `π/β` in the plane and
/// `(π/β)^(3/2)` in space (for `η = 2`).
pub fn bulk_mass(channel: &ChannelModel, dim: usize) -> f64 {
    let kernel = RadialKernel::new(channel, dim);
    let full_angle = if dim == 2 { 2.0 * PI } else { 4.0 * PI };
    full_angle * kernel.cumulative(f64::INFINITY.min(1e6 * channel.r0()))
}

/// Mass evaluated along a line of points at increasing distance from an
/// obstacle.
#[derive(Debug, Clone, PartialEq)]
pub struct MassProfile {
    pub domain: Domain,
    pub channel: ChannelModel,
    pub tolerance: f64,
    pub rows: Vec<(f64, f64)>,
}

impl MassProfile {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "epsilon,mass")?;
        for (eps, m) in &self.rows {
            writeln!(out, "{eps},{m}")?;
        }
        Ok(())
    }
}

/// The point at distance `epsilon` from the obstacle surface used by
/// profiles: along +x from the hole of a concentric domain (from the center
/// for disks and balls), and along +x from the first hole of a square.
pub fn probe_point(domain: &Domain, epsilon: f64) -> Result<Point, QuadratureError> {
    let p = match domain {
        Domain::SquareWithObstacles { obstacles, .. } => {
            let o = obstacles
                .first()
                .ok_or(QuadratureError::Unsupported("square without obstacles has no obstacle profile"))?;
            Point::planar(o.center[0] + o.radius + epsilon, o.center[1])
        }
        _ => Point::planar(domain.inner_radius().unwrap_or(0.0) + epsilon, 0.0),
    };
    if domain.contains(p) {
        Ok(p)
    } else {
        Err(QuadratureError::OutsideDomain(p))
    }
}

pub fn mass_profile(
    domain: &Domain,
    channel: &ChannelModel,
    epsilons: &[f64],
    tol: f64,
) -> Result<MassProfile, QuadratureError> {
    let rows = epsilons
        .iter()
        .map(|&eps| {
            let p = probe_point(domain, eps)?;
            Ok((eps, connectivity_mass(domain, channel, p, tol)?))
        })
        .collect::<Result<Vec<_>, QuadratureError>>()?;
    Ok(MassProfile {
        domain: domain.clone(),
        channel: *channel,
        tolerance: tol,
        rows,
    })
}

/// Breakpoints clustered at distances from a boundary where `e^{-ρM}`
/// changes fastest.
fn boundary_offsets(r0: f64) -> [f64; 8] {
    [1e-3, 1e-2, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0].map(|k| k * r0)
}

/// Expected number of isolated nodes, `ρ ∫_V exp(−ρ M(x)) dx`.
pub fn expected_isolated(
    domain: &Domain,
    channel: &ChannelModel,
    intensity: f64,
    tol: f64,
) -> Result<f64, QuadratureError> {
    check_tol(tol)?;
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(QuadratureError::InvalidIntensity(intensity));
    }
    if intensity == 0.0 {
        return Ok(0.0);
    }
    let mass_tol = (tol * 1e-3).clamp(1e-12, 1e-9);
    let r0 = channel.r0();
    match *domain {
        Domain::SquareWithObstacles { .. } => square_isolated(domain, channel, intensity, tol, mass_tol),
        _ => {
            let dim = domain.dimension();
            let inner = domain.inner_radius().unwrap_or(0.0);
            let outer = domain.outer_radius().expect("concentric domain");
            let mut pts = Vec::new();
            for off in boundary_offsets(r0) {
                pts.push(outer - off);
                if inner > 0.0 {
                    pts.push(inner + off);
                }
            }
            let breaks = sorted_breaks(pts, inner, outer);
            let failure = std::cell::Cell::new(None);
            let integrand = |s: f64| {
                let m = match concentric_mass(dim, inner, outer, channel, s, mass_tol) {
                    Ok(m) => m,
                    Err(e) => {
                        failure.set(Some(e));
                        return 0.0;
                    }
                };
                let shell = if dim == 2 { 2.0 * PI * s } else { 4.0 * PI * s * s };
                intensity * (-intensity * m).exp() * shell
            };
            let result = integrate(integrand, &breaks, tol, 1e-300)?;
            if let Some(e) = failure.take() {
                return Err(e);
            }
            Ok(result.value)
        }
    }
}

fn square_isolated(
    domain: &Domain,
    channel: &ChannelModel,
    intensity: f64,
    tol: f64,
    mass_tol: f64,
) -> Result<f64, QuadratureError> {
    let Domain::SquareWithObstacles { side, ref obstacles } = *domain else {
        unreachable!();
    };
    let offsets = boundary_offsets(channel.r0());
    let mut xs = Vec::new();
    for &off in &offsets {
        xs.push(off);
        xs.push(side - off);
    }
    for o in obstacles {
        let (cx, a) = (o.center[0], o.radius);
        xs.extend([cx - a, cx + a, cx]);
        for &off in &offsets {
            xs.push(cx - a - off);
            xs.push(cx + a + off);
        }
    }
    let x_breaks = sorted_breaks(xs, 0.0, side);
    let failure = std::cell::Cell::new(None);
    let record = |e: QuadratureError| {
        failure.set(Some(e));
        0.0
    };

    // ∫ over the free part of the vertical line at abscissa x
    let column = |x: f64| -> f64 {
        let mut cuts: Vec<(f64, f64)> = obstacles
            .iter()
            .filter_map(|o| {
                let dx = x - o.center[0];
                let h2 = o.radius * o.radius - dx * dx;
                (h2 > 0.0).then(|| (o.center[1] - h2.sqrt(), o.center[1] + h2.sqrt()))
            })
            .collect();
        cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut segments = Vec::new();
        let mut start = 0.0;
        for (lo, hi) in cuts {
            if lo > start {
                segments.push((start, lo));
            }
            start = start.max(hi);
        }
        if start < side {
            segments.push((start, side));
        }
        let integrand = |y: f64| {
            match connectivity_mass(domain, channel, Point::planar(x, y), mass_tol) {
                Ok(m) => intensity * (-intensity * m).exp(),
                Err(e) => record(e),
            }
        };
        let mut total = 0.0;
        for (lo, hi) in segments {
            let mut pts = Vec::new();
            for &off in &offsets {
                pts.push(lo + off);
                pts.push(hi - off);
            }
            let breaks = sorted_breaks(pts, lo, hi);
            match integrate_smoothed(integrand, &breaks, tol * 0.1, 1e-300) {
                Ok(i) => total += i.value,
                Err(e) => {
                    record(e);
                }
            }
        }
        total
    };
    let result = integrate_smoothed(column, &x_breaks, tol, 1e-300)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(result.value)
}

/// `1 − expected_isolated`; may be negative at low density.
pub fn pfc_numeric(
    domain: &Domain,
    channel: &ChannelModel,
    intensity: f64,
    tol: f64,
) -> Result<f64, QuadratureError> {
    Ok(1.0 - expected_isolated(domain, channel, intensity, tol)?)
}
