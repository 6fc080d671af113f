//! Rayleigh-fading connection function `H(r) = exp(-β r^η)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid {name}: {value} (must be positive and finite)")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("closed-form predictors need path-loss exponent 2, got {0}")]
    EtaNotTwo(f64),
}

fn default_eta() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRepr", into = "ChannelRepr")]
pub struct ChannelModel {
    beta: f64,
    eta: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelRepr {
    beta: f64,
    #[serde(default = "default_eta")]
    eta: f64,
}

impl TryFrom<ChannelRepr> for ChannelModel {
    type Error = ChannelError;
    fn try_from(r: ChannelRepr) -> Result<Self, ChannelError> {
        ChannelModel::new(r.beta, r.eta)
    }
}

impl From<ChannelModel> for ChannelRepr {
    fn from(c: ChannelModel) -> Self {
        ChannelRepr { beta: c.beta, eta: c.eta }
    }
}

impl ChannelModel {
    pub fn new(beta: f64, eta: f64) -> Result<Self, ChannelError> {
        for (name, value) in [("beta", beta), ("eta", eta)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ChannelError::InvalidParameter { name, value });
            }
        }
        Ok(ChannelModel { beta, eta })
    }

    /// Free-space propagation, `η = 2`.
    pub fn free_space(beta: f64) -> Result<Self, ChannelError> {
        Self::new(beta, 2.0)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Connection length scale `β^(-1/η)`.
    pub fn r0(&self) -> f64 {
        self.beta.powf(-1.0 / self.eta)
    }

    #[inline]
    pub fn connect_prob(&self, separation: f64) -> f64 {
        if self.eta == 2.0 {
            (-self.beta * separation * separation).exp()
        } else {
            (-self.beta * separation.powf(self.eta)).exp()
        }
    }

    pub fn require_eta_two(&self) -> Result<(), ChannelError> {
        if self.eta == 2.0 {
            Ok(())
        } else {
            Err(ChannelError::EtaNotTwo(self.eta))
        }
    }

    /// Separation beyond which `H` falls below `floor`.
    pub fn range_for(&self, floor: f64) -> f64 {
        (-floor.ln() / self.beta).powf(1.0 / self.eta)
    }
}

/// `β = N₀ (2^Υ − 1) / c` from noise power, rate threshold and the
/// power–distance constant.
pub fn beta_from_link_budget(noise: f64, rate_threshold: f64, power_constant: f64) -> f64 {
    // 2^Υ − 1 without cancellation for small Υ
    noise * (rate_threshold * std::f64::consts::LN_2).exp_m1() / power_constant
}
