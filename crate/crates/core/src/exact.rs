//! Closed-form lossless solutions: dressed states, exact amplitudes, the
//! discrete detuning grid, operation times, target states and periodicity
//! quantities.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{epsilon_sign, ConditionalState, ModeIndex, OperationKind, SystemParams};

/// Generalized Rabi frequency divided by `2g`, for the symmetric coupling
/// `omega = g` and an empty cavity. `x` is the detuning in `2g` units.
pub(crate) fn theta_of(x: f64) -> f64 {
    (x * x + 2.0).sqrt()
}

/// Slow beat frequency `(Theta - |x|)/2` in `2g` units.
pub(crate) fn omega_less_of(x: f64) -> f64 {
    0.5 * (theta_of(x) - x.abs())
}

/// Dressed eigensystem of the lossless atom-cavity block with `n` photons,
/// over the basis `{|1,n>, |0,n+1>, |2,n>}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedSet {
    /// Eigenfrequencies `(w0, w+, w-)` in the units of the input parameters.
    pub energies: (f64, f64, f64),
    /// Generalized Rabi frequency `w+ - w-`.
    pub rabi: f64,
    /// Eigenvectors as rows, ordered `(psi0, psi-, psi+)`.
    pub states: [[Complex64; 3]; 3],
    /// `(sin theta, cos theta, sin phi, cos phi)` mixing angles.
    pub angles: (f64, f64, f64, f64),
}

/// Diagonalize the lossless Hamiltonian block with `n` cavity photons.
pub fn dressed(params: &SystemParams, n: u32) -> Result<DressedSet> {
    params.require_lossless()?;
    if !(params.g > 0.0) {
        return Err(Error::NonPositiveG(params.g));
    }
    let g_eff = params.g * ((n as f64) + 1.0).sqrt();
    let rabi =
        (params.delta * params.delta + 4.0 * g_eff * g_eff + 4.0 * params.omega * params.omega)
            .sqrt();
    let w_plus = 0.5 * (params.delta + rabi);
    let w_minus = 0.5 * (params.delta - rabi);

    let hyp = g_eff.hypot(params.omega);
    let sin_t = g_eff / hyp;
    let cos_t = params.omega / hyp;
    let sin_p = ((rabi + params.delta) / (2.0 * rabi)).sqrt();
    let cos_p = ((rabi - params.delta) / (2.0 * rabi)).sqrt();

    let re = |x: f64| Complex64::new(x, 0.0);
    let states = [
        [re(-sin_t), re(cos_t), Complex64::ZERO],
        [re(-sin_p * cos_t), re(-sin_p * sin_t), re(cos_p)],
        [re(cos_p * cos_t), re(cos_p * sin_t), re(sin_p)],
    ];

    Ok(DressedSet {
        energies: (0.0, w_plus, w_minus),
        rabi,
        states,
        angles: (sin_t, cos_t, sin_p, cos_p),
    })
}

/// Exact lossless evolution of the initial state `|1,0>` for a time `t`
/// (in the same units as the parameters). Valid for any coupling ratio.
pub fn evolve_lossless(params: &SystemParams, t: f64) -> Result<ConditionalState> {
    params.require_lossless()?;
    if !(params.g > 0.0) {
        return Err(Error::NonPositiveG(params.g));
    }
    let rabi = (params.delta * params.delta
        + 4.0 * params.g * params.g
        + 4.0 * params.omega * params.omega)
        .sqrt();
    let hyp = params.g.hypot(params.omega);
    let sin_t = params.g / hyp;
    let cos_t = params.omega / hyp;

    // Half-angle form of the beat functions keeps the intermediate-state
    // amplitude hitting its zeros to machine precision at large times.
    let phase = Complex64::new(0.0, -0.5 * params.delta * t).exp();
    let half = 0.5 * rabi * t;
    let f_plus = phase * half.cos();
    let f_minus = phase * Complex64::new(0.0, -half.sin());

    let drift = f_plus - (params.delta / rabi) * f_minus;
    let a = sin_t * sin_t + cos_t * cos_t * drift;
    let b = sin_t * cos_t * (drift - 1.0);
    let c = (2.0 * params.omega / rabi) * f_minus;

    Ok(ConditionalState::new(a, b, c, true))
}

/// Magnitude of the grid detuning `|Delta_{k,l}|` in units of `2g`.
pub fn detuning_grid(mode: ModeIndex) -> f64 {
    let q = 2.0 * f64::from(mode.k()) / f64::from(mode.l());
    let qm1 = q - 1.0;
    (2.0 * qm1 * qm1 / (2.0 * qm1 + 1.0)).sqrt()
}

/// Synchronization data of one grid mode, all in `2g` units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub mode: ModeIndex,
    /// `|Delta_{k,l}|` in `2g` units.
    pub detuning_abs: f64,
    /// Generalized Rabi frequency over `2g`.
    pub theta: f64,
    /// Ideal lossless operation time `t_{k,l}`.
    pub op_time: f64,
    /// Slow beat frequency.
    pub slow: f64,
    /// Fast beat frequency.
    pub fast: f64,
    /// Slow oscillation period `T`.
    pub period_slow: f64,
    /// Intermediate-state population period `T'`.
    pub period_fast: f64,
}

/// Synchronization data for a grid mode (symmetric coupling, empty cavity).
pub fn grid_point(mode: ModeIndex) -> GridPoint {
    let x = detuning_grid(mode);
    let theta = theta_of(x);
    let op_time = 2.0 * std::f64::consts::PI * f64::from(mode.k()) / theta;
    let slow = 0.5 * (theta - x);
    let fast = theta - slow;
    GridPoint {
        mode,
        detuning_abs: x,
        theta,
        op_time,
        slow,
        fast,
        period_slow: 4.0 * op_time / f64::from(mode.l()),
        period_fast: op_time / f64::from(mode.k()),
    }
}

/// Ideal final state of a grid-mode operation started from `|1,0>`.
///
/// `eps` is the detuning sign (+1 or -1); the result depends on it only for
/// odd `l`.
pub fn target_state(mode: ModeIndex, eps: i32) -> Result<ConditionalState> {
    if eps != 1 && eps != -1 {
        return Err(Error::InvalidEpsilon(eps));
    }
    // (i*eps)^l cycles with period 4.
    let ie_l = match mode.l() % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, f64::from(eps)),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -f64::from(eps)),
    };
    let a = 0.5 * (1.0 + ie_l);
    let b = -0.5 * (1.0 - ie_l);
    Ok(ConditionalState::new(a, b, Complex64::ZERO, true))
}

/// Which basic operation the mode implements, if any.
///
/// Modes with `l` divisible by four return the initial state and are
/// classified as neither operation.
pub fn classify(mode: ModeIndex) -> Option<OperationKind> {
    let l = mode.l();
    if l % 2 == 1 {
        Some(OperationKind::PiHalf)
    } else if (l / 2) % 2 == 1 {
        Some(OperationKind::Pi)
    } else {
        None
    }
}

/// Target state with the sign convention taken from a signed detuning.
pub fn target_state_for(mode: ModeIndex, delta: f64) -> ConditionalState {
    target_state(mode, epsilon_sign(delta)).expect("epsilon_sign returns +1 or -1")
}
