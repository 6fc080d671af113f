//! Ensemble estimates over independently seeded realizations.
//!
//! Trial `t` of a run with master seed `s` uses `derive_seed(s, t)`, split
//! again into a node seed and an edge seed, so results depend only on the
//! seed and the trial count, never on how trials are scheduled.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{self, Regime};
use crate::channel::ChannelModel;
use crate::geometry::{sample_binomial, sample_poisson, Domain, NodeSet, Point};
use crate::graph::{connectivity_outcome, edge_present, link_probability, Outcome};
use crate::quadrature;
use crate::rng::derive_seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonteCarloError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("intensity must be finite and non-negative, got {0}")]
    InvalidIntensity(f64),
    #[error("fixed node set has dimension {got}, domain has {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("probe ({}, {}, {}) is not in the free space", .0.x, .0.y, .0.z)]
    ProbeOutside(Point),
}

/// How nodes are placed in each trial.
#[derive(Debug, Clone, PartialEq)]
pub enum Placement {
    Poisson { intensity: f64 },
    Binomial { count: usize },
    /// The same positions every trial; only the edges are random.
    Fixed(NodeSet),
}

impl Placement {
    fn validate(&self, domain: &Domain) -> Result<(), MonteCarloError> {
        match self {
            Placement::Poisson { intensity } if !(intensity.is_finite() && *intensity >= 0.0) => {
                Err(MonteCarloError::InvalidIntensity(*intensity))
            }
            Placement::Fixed(nodes) if nodes.dimension != domain.dimension() => Err(MonteCarloError::DimensionMismatch {
                got: nodes.dimension,
                expected: domain.dimension(),
            }),
            _ => Ok(()),
        }
    }

    fn nodes(&self, domain: &Domain, seed: u64) -> NodeSet {
        match self {
            Placement::Poisson { intensity } => sample_poisson(domain, *intensity, seed),
            Placement::Binomial { count } => sample_binomial(domain, *count, seed),
            Placement::Fixed(nodes) => nodes.clone(),
        }
    }

    /// Node intensity implied by the placement.
    pub fn intensity(&self, domain: &Domain) -> f64 {
        match self {
            Placement::Poisson { intensity } => *intensity,
            Placement::Binomial { count } => *count as f64 / domain.volume(),
            Placement::Fixed(nodes) => nodes.len() as f64 / domain.volume(),
        }
    }

    /// The `rho_or_N` value reported in sweep tables.
    pub fn parameter(&self) -> f64 {
        match self {
            Placement::Poisson { intensity } => *intensity,
            Placement::Binomial { count } => *count as f64,
            Placement::Fixed(nodes) => nodes.len() as f64,
        }
    }
}

/// A binomial proportion estimated from independent trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEstimate {
    pub trials: u64,
    pub successes: u64,
    pub point_estimate: f64,
    pub std_error: f64,
    pub seed: u64,
}

impl EnsembleEstimate {
    pub fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        let p = successes as f64 / trials as f64;
        EnsembleEstimate {
            trials,
            successes,
            point_estimate: p,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
            seed,
        }
    }

    /// `point_estimate ± z·std_error`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        (self.point_estimate - z * self.std_error, self.point_estimate + z * self.std_error)
    }

    pub fn within(&self, value: f64, z: f64) -> bool {
        let (lo, hi) = self.interval(z);
        lo <= value && value <= hi
    }

    /// Two-sided check against a hypothesized probability `p0`, using the
    /// larger of the empirical and the null standard error so that a
    /// degenerate estimate (0 or 1) is still judged against the spread `p0`
    /// itself implies.
    pub fn consistent_with(&self, p0: f64, z: f64) -> bool {
        let p0c = p0.clamp(0.0, 1.0);
        let null = (p0c * (1.0 - p0c) / self.trials as f64).sqrt();
        (self.point_estimate - p0).abs() <= z * self.std_error.max(null)
    }
}

/// Sample mean of a real-valued per-trial statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub trials: u64,
    pub sum: f64,
    pub sum_sq: f64,
    pub mean: f64,
    pub std_error: f64,
    pub seed: u64,
}

impl MeanEstimate {
    pub fn from_samples(samples: impl IntoIterator<Item = f64>, seed: u64) -> Self {
        let (mut n, mut sum, mut sum_sq) = (0u64, 0.0, 0.0);
        for x in samples {
            n += 1;
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = if n > 1 {
            ((sum_sq - n as f64 * mean * mean) / (n - 1) as f64).max(0.0)
        } else {
            0.0
        };
        MeanEstimate {
            trials: n,
            sum,
            sum_sq,
            mean,
            std_error: (var / n as f64).sqrt(),
            seed,
        }
    }

    pub fn within(&self, value: f64, z: f64) -> bool {
        (self.mean - value).abs() <= z * self.std_error
    }
}

/// Connectivity and isolation evaluated on the same graphs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedEstimate {
    pub connected: EnsembleEstimate,
    pub no_isolated: EnsembleEstimate,
    pub mean_isolated: MeanEstimate,
    /// Trials that were connected yet had an isolated node; always 0 when
    /// more than one node is present.
    pub containment_violations: u64,
}

fn run_trials(
    domain: &Domain,
    channel: &ChannelModel,
    placement: &Placement,
    trials: u64,
    seed: u64,
) -> Result<Vec<(Outcome, usize)>, MonteCarloError> {
    if trials == 0 {
        return Err(MonteCarloError::NoTrials);
    }
    placement.validate(domain)?;
    Ok((0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = derive_seed(seed, t);
            let nodes = placement.nodes(domain, derive_seed(trial_seed, 0));
            (
                connectivity_outcome(&nodes, domain, channel, derive_seed(trial_seed, 1)),
                nodes.len(),
            )
        })
        .collect())
}

/// One pass producing `P_fc`, `P(no isolated)` and the mean isolated count.
pub fn estimate_paired(
    domain: &Domain,
    channel: &ChannelModel,
    placement: &Placement,
    trials: u64,
    seed: u64,
) -> Result<PairedEstimate, MonteCarloError> {
    let outcomes = run_trials(domain, channel, placement, trials, seed)?;
    let connected = outcomes.iter().filter(|(o, _)| o.connected).count() as u64;
    let no_isolated = outcomes.iter().filter(|(o, _)| o.no_isolated()).count() as u64;
    let violations = outcomes
        .iter()
        .filter(|(o, n)| *n > 1 && o.connected && !o.no_isolated())
        .count() as u64;
    Ok(PairedEstimate {
        connected: EnsembleEstimate::from_counts(connected, trials, seed),
        no_isolated: EnsembleEstimate::from_counts(no_isolated, trials, seed),
        mean_isolated: MeanEstimate::from_samples(outcomes.iter().map(|(o, _)| o.isolated as f64), seed),
        containment_violations: violations,
    })
}

/// Fraction of trials whose graph is connected.
pub fn estimate_pfc(
    domain: &Domain,
    channel: &ChannelModel,
    placement: &Placement,
    trials: u64,
    seed: u64,
) -> Result<EnsembleEstimate, MonteCarloError> {
    let outcomes = run_trials(domain, channel, placement, trials, seed)?;
    let successes = outcomes.iter().filter(|(o, _)| o.connected).count() as u64;
    Ok(EnsembleEstimate::from_counts(successes, trials, seed))
}

/// Fraction of trials without an isolated node.
pub fn estimate_no_isolated(
    domain: &Domain,
    channel: &ChannelModel,
    placement: &Placement,
    trials: u64,
    seed: u64,
) -> Result<EnsembleEstimate, MonteCarloError> {
    let outcomes = run_trials(domain, channel, placement, trials, seed)?;
    let successes = outcomes.iter().filter(|(o, _)| o.no_isolated()).count() as u64;
    Ok(EnsembleEstimate::from_counts(successes, trials, seed))
}

/// Degree counts of a probe node added to Poisson configurations;
/// `counts[k]` is the number of trials with degree `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeHistogram {
    pub counts: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
}

impl DegreeHistogram {
    pub fn mean(&self) -> f64 {
        self.summary().mean
    }

    pub fn variance(&self) -> f64 {
        let s = self.summary();
        s.std_error * s.std_error * s.trials as f64
    }

    /// Mean degree with its standard error.
    pub fn summary(&self) -> MeanEstimate {
        let samples = self
            .counts
            .iter()
            .enumerate()
            .flat_map(|(k, &c)| std::iter::repeat_n(k as f64, c as usize));
        MeanEstimate::from_samples(samples, self.seed)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "degree,count")?;
        for (k, c) in self.counts.iter().enumerate() {
            writeln!(out, "{k},{c}")?;
        }
        Ok(())
    }
}

pub fn degree_histogram(
    domain: &Domain,
    channel: &ChannelModel,
    intensity: f64,
    probe: Point,
    trials: u64,
    seed: u64,
) -> Result<DegreeHistogram, MonteCarloError> {
    if trials == 0 {
        return Err(MonteCarloError::NoTrials);
    }
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(MonteCarloError::InvalidIntensity(intensity));
    }
    if !domain.contains(probe) {
        return Err(MonteCarloError::ProbeOutside(probe));
    }
    let degrees: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = derive_seed(seed, t);
            let nodes = sample_poisson(domain, intensity, derive_seed(trial_seed, 0));
            let edge_seed = derive_seed(trial_seed, 1);
            let probe_index = nodes.len();
            nodes
                .positions
                .iter()
                .enumerate()
                .filter(|&(j, &p)| edge_present(edge_seed, j, probe_index, link_probability(domain, channel, probe, p)))
                .count()
        })
        .collect();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; max + 1];
    for d in degrees {
        counts[d] += 1;
    }
    Ok(DegreeHistogram { counts, trials, seed })
}

/// Cartesian product of domains × channels × placements, each cell run
/// with seed `derive_seed(seed, cell_index)` in that nesting order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub domains: Vec<Domain>,
    pub channels: Vec<ChannelModel>,
    pub placements: Vec<Placement>,
    pub trials: u64,
    pub seed: u64,
    pub regime: Option<Regime>,
    /// Outer-integral tolerance for the quadrature column; `None` skips it.
    pub quadrature_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub domain: Domain,
    pub channel: ChannelModel,
    pub rho_or_n: f64,
    pub trials: u64,
    pub seed: u64,
    pub estimate: Option<PairedEstimate>,
    pub pfc_analytic: Option<f64>,
    pub pfc_quadrature: Option<f64>,
    pub flags: Vec<String>,
    /// Set when the simulation or the quadrature of this cell failed.
    pub failed: bool,
}

pub fn sweep(plan: &SweepPlan) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    let mut index = 0u64;
    for domain in &plan.domains {
        for channel in &plan.channels {
            for placement in &plan.placements {
                rows.push(sweep_cell(plan, domain, channel, placement, derive_seed(plan.seed, index)));
                index += 1;
            }
        }
    }
    rows
}

fn sweep_cell(plan: &SweepPlan, domain: &Domain, channel: &ChannelModel, placement: &Placement, seed: u64) -> SweepRow {
    let mut flags = Vec::new();
    let mut failed = false;
    match placement {
        Placement::Poisson { .. } => {}
        Placement::Binomial { .. } => flags.push("binomial".to_string()),
        Placement::Fixed(_) => flags.push("fixed".to_string()),
    }
    let estimate = match estimate_paired(domain, channel, placement, plan.trials, seed) {
        Ok(e) => Some(e),
        Err(e) => {
            failed = true;
            flags.push(format!("mc_failed: {e}"));
            None
        }
    };
    let rho = placement.intensity(domain);
    let pfc_analytic = if matches!(placement, Placement::Fixed(_)) || rho <= 0.0 {
        None
    } else {
        match analytic::predict(domain, channel, rho, plan.regime) {
            Ok(b) => {
                if !b.warnings.is_empty() {
                    flags.push("regime_warning".to_string());
                }
                Some(b.total)
            }
            Err(e) => {
                flags.push(format!("no_analytic: {e}"));
                None
            }
        }
    };
    let pfc_quadrature = match plan.quadrature_tol {
        Some(tol) if rho > 0.0 && !matches!(placement, Placement::Fixed(_)) => {
            match quadrature::pfc_numeric(domain, channel, rho, tol) {
                Ok(v) => Some(v),
                Err(e) => {
                    failed = true;
                    flags.push(format!("quadrature_failed: {e}"));
                    None
                }
            }
        }
        _ => None,
    };
    if pfc_analytic.is_some_and(|p| p < 0.0) {
        flags.push("analytic_negative".to_string());
    }
    SweepRow {
        domain: domain.clone(),
        channel: *channel,
        rho_or_n: placement.parameter(),
        trials: plan.trials,
        seed,
        estimate,
        pfc_analytic,
        pfc_quadrature,
        flags,
        failed,
    }
}

/// CSV `domain,beta,rho_or_N,trials,pfc_mc,pfc_stderr,pnoiso_mc,pfc_analytic,pfc_quadrature,flags`.
/// Flags are joined with `;` and stripped of commas.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "domain,beta,rho_or_N,trials,pfc_mc,pfc_stderr,pnoiso_mc,pfc_analytic,pfc_quadrature,flags"
    )?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        let flags = r.flags.join(";").replace(',', " ");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.domain.label(),
            r.channel.beta(),
            r.rho_or_n,
            r.trials,
            opt(r.estimate.map(|e| e.connected.point_estimate)),
            opt(r.estimate.map(|e| e.connected.std_error)),
            opt(r.estimate.map(|e| e.no_isolated.point_estimate)),
            opt(r.pfc_analytic),
            opt(r.pfc_quadrature),
            flags,
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::exact_connection_prob;

    fn unit() -> ChannelModel {
        ChannelModel::free_space(1.0).unwrap()
    }

    #[test]
    fn consistency_uses_null_spread_for_degenerate_estimates() {
        let e = EnsembleEstimate::from_counts(1000, 1000, 0);
        assert!(!e.within(0.9999, 3.0));
        assert!(e.consistent_with(0.9999, 3.0));
        assert!(!e.consistent_with(0.99, 3.0));
        let e = EnsembleEstimate::from_counts(500, 1000, 0);
        assert!(e.consistent_with(0.5 + 2.9 * e.std_error, 3.0));
        assert!(!e.consistent_with(0.6, 3.0));
    }

    #[test]
    fn complete_graph_when_channel_is_flat() {
        let c = ChannelModel::free_space(1e-300).unwrap();
        let d = Domain::disk(1.0).unwrap();
        let p = estimate_paired(&d, &c, &Placement::Binomial { count: 7 }, 50, 1).unwrap();
        assert_eq!(p.connected.point_estimate, 1.0);
        assert_eq!(p.no_isolated.point_estimate, 1.0);
        assert_eq!(p.connected.std_error, 0.0);
    }

    #[test]
    fn empty_placement_counts_as_connected() {
        let d = Domain::disk(1.0).unwrap();
        let e = estimate_pfc(&d, &unit(), &Placement::Poisson { intensity: 0.0 }, 10, 0).unwrap();
        assert_eq!(e.successes, 10);
        let e = estimate_no_isolated(&d, &unit(), &Placement::Binomial { count: 0 }, 10, 0).unwrap();
        assert_eq!(e.successes, 10);
    }

    #[test]
    fn rejects_bad_input() {
        let d = Domain::disk(1.0).unwrap();
        assert_eq!(
            estimate_pfc(&d, &unit(), &Placement::Binomial { count: 3 }, 0, 0),
            Err(MonteCarloError::NoTrials)
        );
        assert!(estimate_pfc(&d, &unit(), &Placement::Poisson { intensity: -1.0 }, 5, 0).is_err());
        let nodes = NodeSet::fixed(3, vec![Point::ORIGIN]);
        assert!(matches!(
            estimate_pfc(&d, &unit(), &Placement::Fixed(nodes), 5, 0),
            Err(MonteCarloError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn matches_enumeration_for_triangle() {
        let c = unit();
        let h = 3f64.sqrt() / 2.0;
        let nodes = NodeSet::fixed(2, vec![Point::planar(0.0, 0.0), Point::planar(1.0, 0.0), Point::planar(0.5, h)]);
        let d = Domain::disk(3.0).unwrap();
        let exact = exact_connection_prob(&nodes, &d, &c).unwrap();
        let e = estimate_pfc(&d, &c, &Placement::Fixed(nodes), 100_000, 42).unwrap();
        assert!(e.within(exact, 3.0), "{e:?} vs {exact}");
    }

    #[test]
    fn paired_containment() {
        let d = Domain::annulus(1.0, 4.0).unwrap();
        let p = estimate_paired(&d, &unit(), &Placement::Poisson { intensity: 1.5 }, 400, 9).unwrap();
        assert_eq!(p.containment_violations, 0);
        assert!(p.no_isolated.successes >= p.connected.successes);
        assert!(p.connected.successes > 0 && p.connected.successes < 400);
    }

    #[test]
    fn reproducible() {
        let d = Domain::spherical_shell(1.0, 3.0).unwrap();
        let pl = Placement::Poisson { intensity: 2.0 };
        let a = estimate_paired(&d, &unit(), &pl, 64, 77).unwrap();
        let b = estimate_paired(&d, &unit(), &pl, 64, 77).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c = pool.install(|| estimate_paired(&d, &unit(), &pl, 64, 77).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn coverage_of_three_sigma_interval() {
        // two nodes at distance r0: p = e^{-1}
        let p = (-1.0f64).exp();
        let nodes = NodeSet::fixed(2, vec![Point::planar(0.0, 0.0), Point::planar(1.0, 0.0)]);
        let d = Domain::disk(2.0).unwrap();
        let placement = Placement::Fixed(nodes);
        let covered = (0..100)
            .filter(|&m| estimate_pfc(&d, &unit(), &placement, 2000, derive_seed(1234, m)).unwrap().within(p, 3.0))
            .count();
        assert!(covered >= 99, "{covered}");
    }

    #[test]
    fn degree_histogram_examples() {
        let d = Domain::disk(20.0).unwrap();
        let h = degree_histogram(&d, &unit(), 0.0, Point::ORIGIN, 50, 3).unwrap();
        assert_eq!(h.counts, vec![50]);
        let h = degree_histogram(&d, &unit(), 3.0, Point::ORIGIN, 4000, 5).unwrap();
        let s = h.summary();
        assert!(s.within(3.0 * std::f64::consts::PI, 3.0), "{s:?}");
        // Poisson degree: variance equals mean
        assert!((h.variance() / h.mean() - 1.0).abs() < 0.1);
        assert!(degree_histogram(&d, &unit(), 3.0, Point::planar(30.0, 0.0), 5, 3).is_err());
    }

    #[test]
    fn sweep_composition() {
        let plan = SweepPlan {
            domains: vec![],
            channels: vec![unit()],
            placements: vec![Placement::Poisson { intensity: 2.0 }],
            trials: 10,
            seed: 1,
            regime: None,
            quadrature_tol: None,
        };
        assert!(sweep(&plan).is_empty());
        let d = Domain::annulus(2.0, 6.0).unwrap();
        let plan = SweepPlan {
            domains: vec![d.clone()],
            regime: Some(Regime::LargeObstacle),
            quadrature_tol: Some(1e-6),
            ..plan
        };
        let rows = sweep(&plan);
        assert_eq!(rows.len(), 1);
        let direct = estimate_pfc(&d, &unit(), &plan.placements[0], 10, derive_seed(1, 0)).unwrap();
        assert_eq!(rows[0].estimate.unwrap().connected, direct);
        assert!(rows[0].pfc_analytic.is_some() && rows[0].pfc_quadrature.is_some());
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().starts_with("annulus:r=2:R=6,1,2,10,"));
    }

    #[test]
    fn sweep_flags_without_aborting() {
        let plan = SweepPlan {
            domains: vec![Domain::disk(3.0).unwrap()],
            channels: vec![ChannelModel::new(1.0, 3.0).unwrap(), unit()],
            placements: vec![Placement::Poisson { intensity: -1.0 }, Placement::Poisson { intensity: 2.0 }],
            trials: 5,
            seed: 2,
            regime: None,
            quadrature_tol: None,
        };
        let rows = sweep(&plan);
        assert_eq!(rows.len(), 4);
        assert!(rows[0].failed);
        assert!(rows[1].flags.iter().any(|f| f.starts_with("no_analytic")));
        assert!(!rows[3].failed && rows[3].pfc_analytic.is_some());
    }
}
