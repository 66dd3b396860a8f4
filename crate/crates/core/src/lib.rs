//! Critical-density lower bounds for the two-dimensional hard disk model.
//!
//! The crate optimizes a continuous path-coupling metric `d(λ)` for the
//! single-disk global-move dynamics on the unit torus. The metric is stored
//! as a piecewise-constant function on `L` equal cells of `[0, 4r]`; the
//! one-step contraction inequality becomes a lower-triangular linear system
//! whose feasibility is decided per density and bisected to the largest
//! feasible density. A Monte Carlo simulator of the coupled chains checks the
//! resulting metric empirically.
//!
//! All lengths handed to the bound machinery are in units of the disk radius
//! `r`; with `n r² = ρ / π` the disk count drops out of the constraints.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root pin the `f64` instantiation used by the command line tool.

pub mod contraction;
pub mod coupling;
pub mod dynamics;
mod error;
pub mod format;
pub mod geometry;
pub mod lp;
pub mod metric;
pub mod quadrature;
mod scalar;

pub use contraction::{
    BoundResult, BoundSearch, ConstraintSystem, IntegralVariant, SavingsKernel, SlackReport,
};
pub use coupling::{CoupledPair, ContractionEstimate, CouplingExperiment, OutcomeKind, StepOutcome};
pub use dynamics::{ChainStats, Configuration};
pub use error::{Error, Result};
pub use geometry::{LocalChart, TorusPoint};
pub use metric::{AxiomReport, DisagreementPair, PiecewiseMetric};
pub use scalar::Real;

pub type TorusPointF64 = TorusPoint<f64>;
pub type ConfigurationF64 = Configuration<f64>;
pub type PiecewiseMetricF64 = PiecewiseMetric<f64>;
pub type ConstraintSystemF64 = ConstraintSystem<f64>;
pub type BoundResultF64 = BoundResult<f64>;
pub type CoupledPairF64 = CoupledPair<f64>;

pub type PiecewiseMetricF32 = PiecewiseMetric<f32>;
pub type ConstraintSystemF32 = ConstraintSystem<f32>;

/// Largest contraction slack `n·ε` used when none is given.
pub const DEFAULT_EPSILON_HAT: f64 = 1e-6;
