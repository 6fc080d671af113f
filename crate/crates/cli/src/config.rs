//! JSON experiment configuration.

use std::path::PathBuf;

use serde::Deserialize;
use softgeo::analytic::{MassForm, Regime};
use softgeo::{ChannelModel, Domain, Point};

use crate::CliError;

/// Upper bound on the number of points a single grid may expand to.
const MAX_GRID_POINTS: usize = 1_000_000;

/// Either an explicit list or an inclusive arithmetic range.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range(RangeSpec),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn values(&self, path: &str) -> Result<Vec<f64>, CliError> {
        let values = match self {
            Grid::List(v) => v.clone(),
            Grid::Range(RangeSpec { start, stop, step }) => {
                if !(step.is_finite() && *step > 0.0 && start.is_finite() && stop.is_finite() && stop >= start) {
                    return Err(CliError::invalid(path, "range needs finite start <= stop and step > 0"));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if count > MAX_GRID_POINTS {
                    return Err(CliError::invalid(path, format!("range expands to {count} points")));
                }
                (0..count).map(|k| start + k as f64 * step).collect()
            }
        };
        if values.is_empty() {
            return Err(CliError::invalid(path, "grid is empty"));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(CliError::invalid(&format!("{path}[{i}]"), "value is not finite"));
            }
        }
        Ok(values)
    }

    pub fn positive(&self, path: &str) -> Result<Vec<f64>, CliError> {
        let values = self.values(path)?;
        for (i, v) in values.iter().enumerate() {
            if *v <= 0.0 {
                return Err(CliError::invalid(&format!("{path}[{i}]"), format!("{v} must be positive")));
            }
        }
        Ok(values)
    }

    pub fn counts(&self, path: &str) -> Result<Vec<usize>, CliError> {
        let values = self.values(path)?;
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let rounded = v.round();
                if v < 0.0 || (v - rounded).abs() > 1e-9 {
                    Err(CliError::invalid(&format!("{path}[{i}]"), format!("{v} is not a non-negative integer")))
                } else {
                    Ok(rounded as usize)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Config {
    Predict(PredictConfig),
    Simulate(SimulateConfig),
    PhaseDiagram(PhaseConfig),
    Oracle(OracleConfig),
}

impl Config {
    pub fn output(&self) -> Option<&PathBuf> {
        match self {
            Config::Predict(c) => c.output.as_ref(),
            Config::Simulate(c) => c.output.as_ref(),
            Config::PhaseDiagram(c) => c.output.as_ref(),
            Config::Oracle(c) => c.output.as_ref(),
        }
    }

    pub fn clamp(&self) -> bool {
        match self {
            Config::Predict(c) => c.clamp,
            Config::Simulate(c) => c.clamp,
            Config::PhaseDiagram(c) => c.clamp,
            Config::Oracle(c) => c.clamp,
        }
    }
}

/// Closed-form `P_fc` over a density grid.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictConfig {
    pub domain: Domain,
    pub channel: ChannelModel,
    pub rho: Grid,
    #[serde(default)]
    pub regime: Option<Regime>,
    /// Use the merged-perimeter form for an annulus with both radii ≫ r0.
    #[serde(default)]
    pub large_domain: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub clamp: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlacementSpec {
    Poisson { intensity: Grid },
    Binomial { count: Grid },
    Fixed { positions: Vec<Point> },
}

/// Monte Carlo sweep over domains × channels × placements.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub domains: Vec<Domain>,
    pub channels: Vec<ChannelModel>,
    pub placement: PlacementSpec,
    pub trials: u64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub regime: Option<Regime>,
    /// Outer tolerance for the quadrature column; omitted means no column.
    #[serde(default)]
    pub quadrature_tol: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub clamp: bool,
}

/// Obstacle dominance over an (n, ρ) grid in a square with equal holes.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseConfig {
    pub side: f64,
    pub radius: f64,
    pub beta: f64,
    pub n: Grid,
    pub rho: Grid,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub clamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassModel {
    DiskBoundary,
    AnnulusSmall,
    AnnulusLarge,
    ShellSmall,
    ShellLarge,
}

fn default_form() -> MassForm {
    MassForm::Closed
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleTable {
    /// Quadrature mass against a closed form along a ray away from the
    /// obstacle (from the center for a disk).
    MassProfile {
        epsilon: Grid,
        model: MassModel,
        #[serde(default = "default_form")]
        form: MassForm,
    },
    /// Quadrature `P_fc` against the closed form over densities.
    Pfc {
        rho: Grid,
        #[serde(default)]
        regime: Option<Regime>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub domain: Domain,
    pub channel: ChannelModel,
    pub table: OracleTable,
    /// Relative tolerance of the quadrature (mass for profiles, outer
    /// integral for `P_fc` tables).
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub clamp: bool,
}

fn typed<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Validation(format!("{path}: {}", e.into_inner()))
    })
}

/// Parse a configuration, reporting the path of the offending field. The
/// `command` field is read first so that field paths survive dispatch.
pub fn parse(text: &str) -> Result<Config, CliError> {
    let mut value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("malformed JSON: {e}")))?;
    let object = value
        .as_object_mut()
        .ok_or_else(|| CliError::invalid(".", "configuration must be a JSON object"))?;
    let command = match object.remove("command") {
        Some(serde_json::Value::String(s)) => s,
        Some(_) => return Err(CliError::invalid("command", "must be a string")),
        None => return Err(CliError::invalid("command", "missing")),
    };
    match command.as_str() {
        "predict" => typed(value).map(Config::Predict),
        "simulate" => typed(value).map(Config::Simulate),
        "phase_diagram" => typed(value).map(Config::PhaseDiagram),
        "oracle" => typed(value).map(Config::Oracle),
        other => Err(CliError::invalid(
            "command",
            format!("unknown command {other:?}; expected predict, simulate, phase_diagram or oracle"),
        )),
    }
}
