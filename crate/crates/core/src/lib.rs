//! Soft random geometric graphs over obstructed domains.
//!
//! Nodes are scattered over a bounded region (disk, annulus, ball, spherical
//! shell, or a square with circular holes) and every pair links independently
//! with probability `χ(x, y) · exp(-β r^η)`, where `χ` is the line-of-sight
//! indicator. The crate provides:
//!
//! * [`geometry`]: domains, uniform/Poisson sampling and visibility,
//! * [`channel`]: the Rayleigh-fading connection function,
//! * [`graph`]: graph realization, connectivity and exact small-N enumeration,
//! * [`quadrature`]: the numerical connectivity-mass oracle,
//! * [`analytic`]: closed-form mass series and full-connectivity predictors,
//! * [`montecarlo`]: reproducible parallel ensemble estimates.

pub mod analytic;
pub mod channel;
pub mod geometry;
pub mod graph;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;

pub use analytic::{PfcBreakdown, Regime, Term};
pub use channel::ChannelModel;
pub use geometry::{Domain, NodeSet, Obstacle, Point, Provenance};
pub use graph::GraphSample;
pub use montecarlo::{EnsembleEstimate, Placement};
