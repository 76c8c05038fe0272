//! Error type shared by all modules.

use thiserror::Error;

use crate::model::OperationKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coupling strength g must be positive (got {0})")]
    NonPositiveG(f64),

    #[error("damping rates must be nonnegative (kappa={kappa}, gamma={gamma})")]
    NegativeRate { kappa: f64, gamma: f64 },

    #[error("invalid mode (k={k}, l={l}): require k >= 1 and 1 <= l <= 2k")]
    InvalidMode { k: u32, l: u32 },

    #[error("this solution is only valid without damping (kappa={kappa}, gamma={gamma})")]
    DampingPresent { kappa: f64, gamma: f64 },

    #[error("operation design requires symmetric coupling omega = g (omega={omega}, g={g})")]
    AsymmetricCoupling { omega: f64, g: f64 },

    #[error("epsilon must be +1 or -1 (got {0})")]
    InvalidEpsilon(i32),

    #[error("mode (k={k}, l={l}) does not implement a pi or pi/2 operation")]
    NotAnOperation { k: u32, l: u32 },

    #[error("mode (k={k}, l={l}) is not a {expected} operation")]
    KindMismatch {
        k: u32,
        l: u32,
        expected: OperationKind,
    },

    #[error("perturbative solution far outside its validity range (eta={eta}, xi={xi})")]
    PerturbationInvalid { eta: f64, xi: f64 },

    #[error("overdamped regime: kappa={kappa} >= slow frequency {omega_less} (in 2g units)")]
    Overdamped { kappa: f64, omega_less: f64 },

    #[error("state norm is zero: the conditional state has fully decayed")]
    ZeroNorm,

    #[error("pulse time {t} outside [0, {t_p}]")]
    PulseTimeOutOfRange { t: f64, t_p: f64 },

    #[error("invalid pulse shape: {0}")]
    InvalidPulse(String),

    #[error("integrator step size underflow at t={0}")]
    StepSizeUnderflow(f64),

    #[error("no local fidelity maximum found in the search window")]
    NoLocalMaximum,

    #[error("search budget exhausted after {0} evaluations")]
    BudgetExhausted(u64),

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
