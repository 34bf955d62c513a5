//! Aggregated flexibility (feasible operation region) of low-voltage feeders
//! at the MV interconnection.
//!
//! Two identification routes share one grid model and power-flow solver:
//!
//! * [`sampling`]: uniform and two-stage Dirichlet random sampling, with
//!   the region taken as the convex hull of feasible interchange points;
//! * [`revol`]: an evolutionary strategy that maximizes `α·P + β·Q` in eight
//!   compass directions under grid constraints.
//!
//! Regions are compared with the polygon Jaccard index ([`geometry`]), which
//! also drives the randomized hyperparameter search in [`tuning`].

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod experiment;
pub mod feeder;
pub mod geometry;
pub mod inverter;
pub mod plot;
pub mod powerflow;
pub mod rng;
pub mod revol;
pub mod sampling;
pub mod tuning;

pub use error::{Error, Result};
pub use exec::Execution;
pub use experiment::{run_comparison, ExperimentConfig, ExperimentReport, Method};
pub use feeder::{build_feeder, FeederModel, FeederSpec};
pub use geometry::{convex_hull, intersect, jaccard, ForPolygon};
pub use powerflow::{Injection, InterchangeResult, Label, PowerFlow};
