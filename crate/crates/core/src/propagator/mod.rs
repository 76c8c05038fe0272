//! Numerical conditional evolution: spectral propagation of the non-Hermitian
//! effective Hamiltonian for constant drive, and adaptive integration of the
//! amplitude equations for shaped pulses.

mod eig;
mod ode;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::{detuning_grid, GridPoint};
use crate::model::{ConditionalState, ModeIndex, PulseShape, SystemParams};

pub use eig::Eigen3;

/// Effective non-Hermitian Hamiltonian over `{|1,0>, |0,1>, |2,0>}` in
/// internal units (`2g = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveHamiltonian {
    pub matrix: [[Complex64; 3]; 3],
}

/// Build the conditional-evolution Hamiltonian from system parameters.
pub fn hamiltonian(params: &SystemParams) -> EffectiveHamiltonian {
    let two_g = params.two_g();
    let omega = params.omega / two_g;
    let g = 0.5;
    let kappa = params.kappa / two_g;
    let delta = params.delta / two_g;
    let gamma = params.gamma / two_g;
    let re = |x: f64| Complex64::new(x, 0.0);
    EffectiveHamiltonian {
        matrix: [
            [Complex64::ZERO, Complex64::ZERO, re(omega)],
            [Complex64::ZERO, Complex64::new(0.0, -kappa), re(g)],
            [re(omega), re(g), Complex64::new(delta, -gamma)],
        ],
    }
}

/// Cached propagator for a constant-drive Hamiltonian.
///
/// Uses the spectral factorization when available and falls back to a dense
/// series exponential for (near-)defective matrices.
pub struct Propagator {
    h: [[Complex64; 3]; 3],
    eig: Option<Eigen3>,
}

impl Propagator {
    pub fn new(h: &EffectiveHamiltonian) -> Self {
        Self {
            h: h.matrix,
            eig: eig::decompose(&h.matrix),
        }
    }

    /// Whether the series fallback is in use instead of the spectral route.
    pub fn used_fallback(&self) -> bool {
        self.eig.is_none()
    }

    /// State after conditional evolution for a time `tau` in `2g` units.
    pub fn state_at(&self, tau: f64, initial: &ConditionalState) -> ConditionalState {
        let psi0 = initial.as_array();
        let psi = match &self.eig {
            Some(e) => e.propagate(tau, &psi0),
            None => {
                let mut m = self.h;
                for row in m.iter_mut() {
                    for z in row.iter_mut() {
                        *z *= Complex64::new(0.0, -tau);
                    }
                }
                eig::apply(&eig::expm(&m), &psi0)
            }
        };
        ConditionalState::from_array(psi, false)
    }
}

/// One-shot conditional evolution under the constant-drive Hamiltonian for a
/// time `t` in the unit system of the parameters. The result is unnormalized.
pub fn evolve_numeric(
    params: &SystemParams,
    t: f64,
    initial: &ConditionalState,
) -> Result<ConditionalState> {
    if !(params.g > 0.0) {
        return Err(Error::NonPositiveG(params.g));
    }
    let prop = Propagator::new(&hamiltonian(params));
    Ok(prop.state_at(t * params.two_g(), initial))
}

/// Drive envelope value; `t` must lie inside the pulse window.
pub fn pulse_value(shape: &PulseShape, t: f64, t_p: f64) -> Result<f64> {
    if !(t_p > 0.0) {
        return Err(Error::InvalidPulse(format!("nonpositive duration {t_p}")));
    }
    if !(0.0..=t_p).contains(&t) {
        return Err(Error::PulseTimeOutOfRange { t, t_p });
    }
    Ok(envelope(shape, t, t_p))
}

/// Envelope without range checks; zero outside the pulse window.
fn envelope(shape: &PulseShape, t: f64, t_p: f64) -> f64 {
    if !(0.0..=t_p).contains(&t) {
        return 0.0;
    }
    match *shape {
        PulseShape::Rectangular => 1.0,
        PulseShape::SineSquare => {
            let s = (std::f64::consts::PI * t / t_p).sin();
            2.0 * s * s
        }
        PulseShape::Trapezium {
            rise_frac,
            fall_frac,
        } => {
            let s = shape.area_scale();
            let t_r = rise_frac * t_p;
            let t_f = fall_frac * t_p;
            if t < t_r {
                s * t / t_r
            } else if t <= t_p - t_f {
                s
            } else {
                s * (t_p - t) / t_f
            }
        }
    }
}

/// Mean of the squared envelope over the pulse duration, in closed form.
pub fn pulse_mean_square(shape: &PulseShape) -> f64 {
    match *shape {
        PulseShape::Rectangular => 1.0,
        PulseShape::SineSquare => 1.5,
        PulseShape::Trapezium { .. } => {
            let s = shape.area_scale();
            s * (4.0 - s) / 3.0
        }
    }
}

/// Integral of the envelope from the pulse start to `t` (same units as `t`).
pub(crate) fn phase_integral(shape: &PulseShape, t: f64, t_p: f64) -> f64 {
    match *shape {
        PulseShape::Rectangular => t,
        PulseShape::SineSquare => {
            t - (t_p / std::f64::consts::TAU) * (std::f64::consts::TAU * t / t_p).sin()
        }
        PulseShape::Trapezium {
            rise_frac,
            fall_frac,
        } => {
            let s = shape.area_scale();
            let t_r = rise_frac * t_p;
            let t_f = fall_frac * t_p;
            if t < t_r {
                s * t * t / (2.0 * t_r)
            } else if t <= t_p - t_f {
                s * (t - 0.5 * t_r)
            } else {
                let tail = t_p - t;
                s * (t_p - t_f - 0.5 * t_r) + s * (t_f * t_f - tail * tail) / (2.0 * t_f)
            }
        }
    }
}

/// Synchronization data recomputed with the pulse's average-frequency
/// replacement of the Rabi frequency.
///
/// For non-rectangular shapes the fast period comes from the effective
/// frequency directly, so the rectangular identity `T' = op_time / k` no
/// longer holds.
pub fn pulse_grid_point(mode: ModeIndex, shape: &PulseShape) -> GridPoint {
    let x = detuning_grid(mode);
    let theta_eff = (x * x + 2.0 * pulse_mean_square(shape)).sqrt();
    let slow = 0.5 * (theta_eff - x);
    let fast = theta_eff - slow;
    let op_time = f64::from(mode.l()) * std::f64::consts::PI / (2.0 * slow);
    GridPoint {
        mode,
        detuning_abs: x,
        theta: theta_eff,
        op_time,
        slow,
        fast,
        period_slow: 4.0 * op_time / f64::from(mode.l()),
        period_fast: std::f64::consts::TAU / theta_eff,
    }
}

/// Conditional trajectory sampled on an ascending time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Sample times in the unit system of the parameters.
    pub times: Vec<f64>,
    /// Raw (unnormalized) conditional states.
    pub states: Vec<ConditionalState>,
    /// State norms at each sample.
    pub norms: Vec<f64>,
}

/// Integrate the shaped-pulse amplitude equations from `|1,0>` (or a given
/// initial state), sampling at `grid` times.
///
/// The drive replaces both couplings with `g F(t)`, so the symmetric
/// restriction `omega = g` applies. `t_p` and the grid are in the unit
/// system of the parameters; the envelope vanishes beyond `t_p`.
pub fn evolve_pulsed(
    params: &SystemParams,
    shape: &PulseShape,
    t_p: f64,
    grid: &[f64],
    initial: Option<ConditionalState>,
) -> Result<Trajectory> {
    params.require_symmetric_coupling()?;
    if !(t_p > 0.0) {
        return Err(Error::InvalidPulse(format!("nonpositive duration {t_p}")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidConfig(
            "trajectory grid must be ascending and nonnegative".into(),
        ));
    }

    let two_g = params.two_g();
    let tau_p = t_p * two_g;
    let kappa = params.kappa / two_g;
    let gamma = params.gamma / two_g;
    let delta = params.delta / two_g;

    let shape_owned = *shape;
    let rhs = move |tau: f64, y: &ode::State| -> ode::State {
        let f = envelope(&shape_owned, tau, tau_p);
        let half_f = Complex64::new(0.0, -0.5 * f);
        let a = y[0];
        let b = y[1];
        let c = y[2];
        [
            half_f * c,
            -kappa * b + half_f * c,
            half_f * (a + b) - Complex64::new(gamma, delta) * c,
        ]
    };

    // Integration checkpoints: sample times plus envelope corners.
    let mut stops: Vec<f64> = grid.iter().map(|&t| t * two_g).collect();
    if let PulseShape::Trapezium {
        rise_frac,
        fall_frac,
    } = shape
    {
        stops.push(rise_frac * tau_p);
        stops.push(tau_p - fall_frac * tau_p);
    }
    stops.push(tau_p);
    stops.sort_by(f64::total_cmp);
    stops.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let sample_taus: Vec<f64> = grid.iter().map(|&t| t * two_g).collect();
    let mut state = initial
        .unwrap_or_else(ConditionalState::ground_start)
        .as_array();
    let mut tau = 0.0;
    let mut out_states = Vec::with_capacity(grid.len());

    let mut record = |y: &ode::State| {
        out_states.push(ConditionalState::from_array(*y, false));
    };
    let mut next_sample = 0usize;
    if sample_taus.first().is_some_and(|&s| s <= 1e-15) {
        record(&state);
        next_sample = 1;
    }
    for &stop in stops.iter().filter(|&&s| s > 1e-15) {
        state = ode::integrate_segment(&rhs, tau, stop, state)?;
        tau = stop;
        while next_sample < sample_taus.len() && (sample_taus[next_sample] - tau).abs() < 1e-12 {
            record(&state);
            next_sample += 1;
        }
    }

    let states = out_states;
    let norms = states.iter().map(ConditionalState::norm).collect();
    Ok(Trajectory {
        times: grid.to_vec(),
        states,
        norms,
    })
}

/// Closed-form resonant, undamped solution of the shaped-pulse equations;
/// times in `2g` units. Valid only for zero detuning and no damping, where
/// the state depends on the pulse area alone.
pub fn resonant_oracle(shape: &PulseShape, t: f64, t_p: f64) -> Result<ConditionalState> {
    if !(t_p > 0.0) {
        return Err(Error::InvalidPulse(format!("nonpositive duration {t_p}")));
    }
    if !(0.0..=t_p).contains(&t) {
        return Err(Error::PulseTimeOutOfRange { t, t_p });
    }
    let phase = phase_integral(shape, t, t_p) / 2.0f64.sqrt();
    let f_plus = Complex64::new(phase.cos(), 0.0);
    let f_minus = Complex64::new(0.0, -phase.sin());
    Ok(ConditionalState::new(
        0.5 * (1.0 + f_plus),
        0.5 * (-1.0 + f_plus),
        f_minus / 2.0f64.sqrt(),
        true,
    ))
}
