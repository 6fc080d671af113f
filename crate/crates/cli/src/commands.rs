//! Validation and execution of each command. `prepare` checks every
//! precondition (and evaluates the cheap closed forms) so that nothing is
//! computed or written for an invalid configuration.

use rayon::prelude::*;
use softgeo::analytic::{self, AnalyticError, PfcBreakdown};
use softgeo::geometry::NodeSet;
use softgeo::montecarlo::{self, Placement, SweepPlan};
use softgeo::quadrature::{self, DEFAULT_MASS_TOL, DEFAULT_OUTER_TOL};
use softgeo::{ChannelModel, Domain, Point};

use crate::config::{Config, MassModel, OracleConfig, OracleTable, PhaseConfig, PlacementSpec, PredictConfig, SimulateConfig};
use crate::output::{cell, clamp01, csv_writer, finish};
use crate::{CliError, Overrides, Report};

/// Probability below which a phase-diagram cell is greyed out.
pub const CONFIDENCE_THRESHOLD: f64 = 0.8;

pub enum Job {
    Predict { rows: Vec<(f64, PfcBreakdown)>, clamp: bool },
    Simulate { plan: SweepPlan, clamp: bool },
    Phase { rows: Vec<PhaseRow>, clamp: bool },
    MassProfile { domain: Domain, channel: ChannelModel, tol: f64, rows: Vec<(f64, Point, f64)> },
    PfcTable { domain: Domain, channel: ChannelModel, tol: f64, rows: Vec<(f64, f64)>, clamp: bool },
}

pub struct PhaseRow {
    n: usize,
    rho: f64,
    ratio: f64,
    pfc: f64,
}

pub fn prepare(cfg: &Config, overrides: &Overrides) -> Result<Job, CliError> {
    let clamp = overrides.clamp;
    match cfg {
        Config::Predict(c) => prepare_predict(c, clamp),
        Config::Simulate(c) => prepare_simulate(c, overrides),
        Config::PhaseDiagram(c) => prepare_phase(c, clamp),
        Config::Oracle(c) => prepare_oracle(c, clamp),
    }
}

/// Field path for an analytic failure at grid position `index` of `grid`.
fn analytic_path(e: &AnalyticError, grid: &str, index: usize) -> String {
    match e {
        AnalyticError::Channel(_) => "channel".into(),
        AnalyticError::InvalidParameter { name: "rho", .. } => format!("{grid}[{index}]"),
        AnalyticError::RegimeMismatch { .. } | AnalyticError::RegimeRequired { .. } => "regime".into(),
        AnalyticError::SeparationViolation(_) | AnalyticError::ObstacleTooLarge { .. } => "domain.obstacles".into(),
        _ => "domain".into(),
    }
}

fn prepare_predict(c: &PredictConfig, clamp: bool) -> Result<Job, CliError> {
    let rhos = c.rho.positive("rho")?;
    let beta = c.channel.beta();
    let inner_outer = match c.domain {
        Domain::Annulus { inner, outer } => Some((inner, outer)),
        _ => None,
    };
    let rows = rhos
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            let result = match (c.large_domain, inner_outer) {
                (true, Some((inner, outer))) => c
                    .channel
                    .require_eta_two()
                    .map_err(AnalyticError::from)
                    .and_then(|_| analytic::pfc_annulus_large_domain(inner, outer, beta, rho)),
                (true, None) => return Err(CliError::invalid("large_domain", "only an annulus has a large-domain form")),
                (false, _) => analytic::predict(&c.domain, &c.channel, rho, c.regime),
            };
            result
                .map(|b| (rho, b))
                .map_err(|e| CliError::invalid(&analytic_path(&e, "rho", i), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut warnings: Vec<&String> = rows.iter().flat_map(|(_, b)| &b.warnings).collect();
    warnings.dedup();
    for w in warnings {
        eprintln!("softgeo: warning: {w}");
    }
    Ok(Job::Predict { rows, clamp })
}

fn placements(placement: &PlacementSpec, domains: &[Domain]) -> Result<Vec<Placement>, CliError> {
    match placement {
        PlacementSpec::Poisson { intensity } => {
            let values = intensity.values("placement.intensity")?;
            for (i, v) in values.iter().enumerate() {
                if *v < 0.0 {
                    return Err(CliError::invalid(&format!("placement.intensity[{i}]"), "must be non-negative"));
                }
            }
            Ok(values.into_iter().map(|intensity| Placement::Poisson { intensity }).collect())
        }
        PlacementSpec::Binomial { count } => Ok(count
            .counts("placement.count")?
            .into_iter()
            .map(|count| Placement::Binomial { count })
            .collect()),
        PlacementSpec::Fixed { positions } => {
            let dim = domains[0].dimension();
            if domains.iter().any(|d| d.dimension() != dim) {
                return Err(CliError::invalid("domains", "fixed positions need domains of one dimension"));
            }
            for (i, p) in positions.iter().enumerate() {
                if dim == 2 && p.z != 0.0 {
                    return Err(CliError::invalid(&format!("placement.positions[{i}].z"), "must be 0 in two dimensions"));
                }
                if let Some(j) = domains.iter().position(|d| !d.contains(*p)) {
                    return Err(CliError::invalid(
                        &format!("placement.positions[{i}]"),
                        format!("outside the free space of domains[{j}]"),
                    ));
                }
            }
            Ok(vec![Placement::Fixed(NodeSet::fixed(dim, positions.clone()))])
        }
    }
}

fn prepare_simulate(c: &SimulateConfig, overrides: &Overrides) -> Result<Job, CliError> {
    if c.domains.is_empty() {
        return Err(CliError::invalid("domains", "at least one domain is required"));
    }
    if c.channels.is_empty() {
        return Err(CliError::invalid("channels", "at least one channel is required"));
    }
    if c.trials == 0 {
        return Err(CliError::invalid("trials", "must be at least 1"));
    }
    if let Some(tol) = c.quadrature_tol {
        if !(tol > 0.0 && tol <= 1e-2) {
            return Err(CliError::invalid("quadrature_tol", format!("{tol} outside (0, 1e-2]")));
        }
    }
    let placements = placements(&c.placement, &c.domains)?;
    // An explicit regime that contradicts an obstacle is a configuration
    // error. Other analytic gaps (auto regime between the cuts, obstacles
    // closer than 2r0) only leave the analytic column empty with a flag.
    if c.regime.is_some() && !matches!(c.placement, PlacementSpec::Fixed { .. }) {
        for (i, domain) in c.domains.iter().enumerate() {
            for (j, channel) in c.channels.iter().enumerate() {
                if channel.require_eta_two().is_err() {
                    continue;
                }
                if let Err(e @ AnalyticError::RegimeMismatch { .. }) = analytic::predict(domain, channel, 1.0, c.regime) {
                    return Err(CliError::invalid(&format!("regime (domains[{i}], channels[{j}])"), e));
                }
            }
        }
    }
    let plan = SweepPlan {
        domains: c.domains.clone(),
        channels: c.channels.clone(),
        placements,
        trials: c.trials,
        seed: overrides.seed(c.seed),
        regime: c.regime,
        quadrature_tol: c.quadrature_tol,
    };
    Ok(Job::Simulate { plan, clamp: overrides.clamp })
}

fn prepare_phase(c: &PhaseConfig, clamp: bool) -> Result<Job, CliError> {
    for (name, v) in [("side", c.side), ("radius", c.radius), ("beta", c.beta)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::invalid(name, format!("{v} must be positive")));
        }
    }
    let ns = c.n.counts("n")?;
    let rhos = c.rho.positive("rho")?;
    let mut rows = Vec::with_capacity(ns.len() * rhos.len());
    for (i, &n) in ns.iter().enumerate() {
        for &rho in &rhos {
            let path = format!("n[{i}]");
            let err = |e: AnalyticError| CliError::invalid(&path, e);
            let pfc = analytic::pfc_square_many(c.side, n, c.radius, c.beta, rho).map_err(err)?.total;
            let ratio = analytic::obstacle_dominance_ratio(c.side, n, c.radius, c.beta, rho).map_err(err)?;
            rows.push(PhaseRow { n, rho, ratio, pfc });
        }
    }
    Ok(Job::Phase { rows, clamp })
}

/// Closed-form mass for `model` at distance `eps`, after checking that the
/// model describes `domain`.
fn series_mass(domain: &Domain, model: MassModel, form: analytic::MassForm, beta: f64, eps: f64) -> Result<f64, String> {
    let mismatch = || Err(format!("model {model:?} does not describe {}", domain.label()));
    match (model, domain) {
        (MassModel::DiskBoundary, Domain::Disk { outer }) => Ok(analytic::mass_disk_boundary(eps, *outer, beta)),
        (MassModel::AnnulusSmall, Domain::Annulus { inner, .. }) => {
            analytic::mass_annulus_small(eps, *inner, beta, form).map_err(|e| e.to_string())
        }
        (MassModel::AnnulusLarge, Domain::Annulus { inner, .. }) => Ok(analytic::mass_annulus_large(eps, *inner, beta)),
        (MassModel::ShellSmall, Domain::SphericalShell { inner, .. }) => {
            analytic::mass_shell_small(eps, *inner, beta, form).map_err(|e| e.to_string())
        }
        (MassModel::ShellLarge, Domain::SphericalShell { inner, .. }) => Ok(analytic::mass_shell_large(eps, *inner, beta)),
        _ => mismatch(),
    }
}

fn prepare_oracle(c: &OracleConfig, clamp: bool) -> Result<Job, CliError> {
    c.channel
        .require_eta_two()
        .map_err(|e| CliError::invalid("channel.eta", e))?;
    let beta = c.channel.beta();
    match &c.table {
        OracleTable::MassProfile { epsilon, model, form } => {
            let tol = c.tolerance.unwrap_or(DEFAULT_MASS_TOL);
            if !(tol > 0.0 && tol <= 1e-2) {
                return Err(CliError::invalid("tolerance", format!("{tol} outside (0, 1e-2]")));
            }
            let eps = epsilon.values("table.epsilon")?;
            let rows = eps
                .iter()
                .enumerate()
                .map(|(i, &e)| {
                    let path = format!("table.epsilon[{i}]");
                    let probe = quadrature::probe_point(&c.domain, e).map_err(|err| CliError::invalid(&path, err))?;
                    let series = series_mass(&c.domain, *model, *form, beta, e).map_err(|err| {
                        let path = if err.starts_with("model") { "table.model" } else { path.as_str() };
                        CliError::invalid(path, err)
                    })?;
                    Ok((e, probe, series))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Job::MassProfile { domain: c.domain.clone(), channel: c.channel, tol, rows })
        }
        OracleTable::Pfc { rho, regime } => {
            let tol = c.tolerance.unwrap_or(DEFAULT_OUTER_TOL);
            if !(tol > 0.0 && tol <= 1e-2) {
                return Err(CliError::invalid("tolerance", format!("{tol} outside (0, 1e-2]")));
            }
            let rhos = rho.positive("table.rho")?;
            let rows = rhos
                .iter()
                .enumerate()
                .map(|(i, &r)| {
                    analytic::predict(&c.domain, &c.channel, r, *regime)
                        .map(|b| (r, b.total))
                        .map_err(|e| {
                            let path = match analytic_path(&e, "table.rho", i).as_str() {
                                "regime" => "table.regime".to_string(),
                                p => p.to_string(),
                            };
                            CliError::invalid(&path, e)
                        })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Job::PfcTable { domain: c.domain.clone(), channel: c.channel, tol, rows, clamp })
        }
    }
}

impl Job {
    pub fn execute(&self) -> Result<Report, CliError> {
        match self {
            Job::Predict { rows, clamp } => {
                let rows: Vec<(f64, PfcBreakdown)> = rows
                    .iter()
                    .map(|(rho, b)| {
                        let mut b = b.clone();
                        b.total = clamp01(b.total, *clamp);
                        (*rho, b)
                    })
                    .collect();
                let mut csv = Vec::new();
                analytic::write_breakdown_csv(&rows, &mut csv).map_err(|e| CliError::Io(e.to_string()))?;
                Ok(Report { csv, partial_failure: false })
            }
            Job::Simulate { plan, clamp } => {
                let mut rows = montecarlo::sweep(plan);
                for r in &mut rows {
                    r.pfc_analytic = r.pfc_analytic.map(|p| clamp01(p, *clamp));
                    r.pfc_quadrature = r.pfc_quadrature.map(|p| clamp01(p, *clamp));
                }
                let mut csv = Vec::new();
                montecarlo::write_sweep_csv(&rows, &mut csv).map_err(|e| CliError::Io(e.to_string()))?;
                Ok(Report { csv, partial_failure: rows.iter().any(|r| r.failed) })
            }
            Job::Phase { rows, clamp } => {
                let mut w = csv_writer();
                let io = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(["n", "rho", "ratio", "pfc", "below_threshold"]).map_err(io)?;
                for r in rows {
                    let pfc = clamp01(r.pfc, *clamp);
                    w.write_record([
                        r.n.to_string(),
                        r.rho.to_string(),
                        r.ratio.to_string(),
                        pfc.to_string(),
                        (r.pfc < CONFIDENCE_THRESHOLD).to_string(),
                    ])
                    .map_err(io)?;
                }
                Ok(Report { csv: finish(w)?, partial_failure: false })
            }
            Job::MassProfile { domain, channel, tol, rows } => {
                let masses: Vec<Option<f64>> = rows
                    .par_iter()
                    .map(|(_, p, _)| quadrature::connectivity_mass(domain, channel, *p, *tol).ok())
                    .collect();
                let mut w = csv_writer();
                let io = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(["epsilon", "mass_quadrature", "mass_series", "rel_err"]).map_err(io)?;
                for ((eps, _, series), quad) in rows.iter().zip(&masses) {
                    let rel = quad.map(|q| (series / q - 1.0).abs());
                    w.write_record([eps.to_string(), cell(*quad), series.to_string(), cell(rel)]).map_err(io)?;
                }
                Ok(Report { csv: finish(w)?, partial_failure: masses.iter().any(Option::is_none) })
            }
            Job::PfcTable { domain, channel, tol, rows, clamp } => {
                let numeric: Vec<Option<f64>> = rows
                    .par_iter()
                    .map(|(rho, _)| quadrature::pfc_numeric(domain, channel, *rho, *tol).ok())
                    .collect();
                let mut w = csv_writer();
                let io = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(["rho", "pfc_numeric", "pfc_analytic", "abs_err"]).map_err(io)?;
                for ((rho, closed), num) in rows.iter().zip(&numeric) {
                    let err = num.map(|n| (n - closed).abs());
                    w.write_record([
                        rho.to_string(),
                        cell(num.map(|n| clamp01(n, *clamp))),
                        clamp01(*closed, *clamp).to_string(),
                        cell(err),
                    ])
                    .map_err(io)?;
                }
                Ok(Report { csv: finish(w)?, partial_failure: numeric.iter().any(Option::is_none) })
            }
        }
    }
}
