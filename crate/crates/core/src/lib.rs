//! Simulation and parameter-tuning toolkit for conditional dynamics of a
//! three-level atom coupled to a lossy cavity and a classical drive.
//!
//! The crate models the no-jump branch of the dissipative dynamics in the
//! single-excitation basis `{|1,0>, |0,1>, |2,0>}`, provides exact lossless
//! and first-order damped closed forms, a spectral propagator and a shaped
//! pulse integrator, and the fine-tuning searches that pick discrete
//! detunings and operation times maximizing pi and pi/2 operation
//! fidelities.

// Negated comparisons (`!(x > 0.0)`) are used on purpose: they reject NaN
// along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod damped_analytic;
pub mod error;
pub mod exact;
pub mod model;
pub mod propagator;
pub mod tuning;

pub use error::{Error, Result};
pub use model::{
    epsilon_sign, ConditionalState, ModeIndex, OperationKind, PulseShape, SystemParams,
    TuningOutcome,
};
