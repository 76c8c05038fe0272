//! First-order perturbative damped solutions and the two
//! adiabatic-elimination solution families, with their operation-time and
//! detuning-correction formulas.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::{classify, detuning_grid, grid_point, omega_less_of, theta_of};
use crate::model::{epsilon_sign, ConditionalState, ModeIndex, OperationKind, SystemParams};

/// Flag threshold for the perturbative smallness parameters.
pub const VALIDITY_THRESHOLD: f64 = 0.2;

/// First-order damping rates of the three dressed states, in the unit
/// system of the input parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingRates {
    pub kappa_0: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

/// Dimensionless combinations controlling the damped solutions.
///
/// `eta` is the general smallness parameter `kappa_bar * Theta^2`; the
/// adiabatic-elimination family uses [`eta_adiabatic`](Self::eta_adiabatic)
/// instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Generalized Rabi frequency over `2g`.
    pub theta: f64,
    /// Signed ratio detuning / Rabi frequency; always within [-1, 1].
    pub d: f64,
    pub kappa_bar: f64,
    pub gamma_bar: f64,
    /// Cavity-damping smallness parameter.
    pub eta: f64,
    /// Spontaneous-emission smallness parameter.
    pub xi: f64,
    pub rates: DampingRates,
    /// False when `eta` is too large for first-order accuracy.
    pub eta_valid: bool,
    /// False when `xi` is too large for first-order accuracy.
    pub xi_valid: bool,
}

impl DerivedScales {
    /// Smallness parameter of the adiabatic-elimination solutions,
    /// `kappa * |delta| / (4 g^2)`.
    pub fn eta_adiabatic(&self) -> f64 {
        // kappa_bar * Theta * |d| * Theta = kappa |delta| in 2g units.
        self.kappa_bar * self.theta * self.theta * self.d.abs()
    }
}

/// Complex dressed energies including the first-order damping corrections,
/// in the unit system of the input parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEnergies {
    pub w0: Complex64,
    pub wp: Complex64,
    pub wm: Complex64,
}

/// Derived scales for symmetric coupling `omega = g`.
pub fn scales(params: &SystemParams) -> Result<DerivedScales> {
    params.require_symmetric_coupling()?;
    let two_g = params.two_g();
    let x = params.delta / two_g;
    let theta = theta_of(x);
    let d = x / theta;
    let kappa_bar = params.kappa / (theta * two_g);
    let gamma_bar = params.gamma / (theta * two_g);
    let eta = kappa_bar * theta * theta;
    let xi = gamma_bar / (theta * theta);
    let rates = DampingRates {
        kappa_0: 0.5 * params.kappa,
        kappa_plus: 0.25 * params.kappa * (1.0 - d),
        kappa_minus: 0.25 * params.kappa * (1.0 + d),
        gamma_plus: 0.5 * params.gamma * (1.0 + d),
        gamma_minus: 0.5 * params.gamma * (1.0 - d),
    };
    Ok(DerivedScales {
        theta,
        d,
        kappa_bar,
        gamma_bar,
        eta,
        xi,
        rates,
        eta_valid: eta < VALIDITY_THRESHOLD,
        xi_valid: xi < VALIDITY_THRESHOLD,
    })
}

/// Dressed energies with their first-order imaginary damping shifts.
pub fn complex_energies(params: &SystemParams) -> Result<ComplexEnergies> {
    let s = scales(params)?;
    let rabi = s.theta * params.two_g();
    let wp_re = 0.5 * (params.delta + rabi);
    let wm_re = 0.5 * (params.delta - rabi);
    Ok(ComplexEnergies {
        w0: Complex64::new(0.0, -s.rates.kappa_0),
        wp: Complex64::new(wp_re, -(s.rates.kappa_plus + s.rates.gamma_plus)),
        wm: Complex64::new(wm_re, -(s.rates.kappa_minus + s.rates.gamma_minus)),
    })
}

/// First-order damped amplitudes of the conditional state started from
/// `|1,0>`, unnormalized. Reduces exactly to the lossless solution when both
/// damping rates vanish.
pub fn evolve_perturbative(params: &SystemParams, t: f64) -> Result<ConditionalState> {
    let s = scales(params)?;
    if s.eta >= 1.0 || s.xi >= 1.0 {
        return Err(Error::PerturbationInvalid {
            eta: s.eta,
            xi: s.xi,
        });
    }
    let two_g = params.two_g();
    let tau = t * two_g;
    let x = params.delta / two_g;
    let theta = s.theta;
    let d = s.d;
    let eta = s.eta;
    let xi = s.xi;

    // Complex beat functions with damping-shifted frequencies (2g units).
    let kp = 0.25 * (params.kappa / two_g) * (1.0 - d) + 0.5 * (params.gamma / two_g) * (1.0 + d);
    let km = 0.25 * (params.kappa / two_g) * (1.0 + d) + 0.5 * (params.gamma / two_g) * (1.0 - d);
    let wp = Complex64::new(0.5 * (x + theta), -kp);
    let wm = Complex64::new(0.5 * (x - theta), -km);
    let ep = (-Complex64::I * wp * tau).exp();
    let em = (-Complex64::I * wm * tau).exp();
    let f_plus = 0.5 * (ep + em);
    let f_minus = 0.5 * (ep - em);
    let e0 = (-0.5 * (params.kappa / two_g) * tau).exp();

    let i = Complex64::I;
    let a = 0.5
        * ((1.0 + i * 2.0 * eta * d) * e0 + (1.0 - i * 2.0 * eta * d) * f_plus
            - (Complex64::new(d, 0.0) - i * xi - i * eta * (1.0 + d * d)) * f_minus);
    let b = 0.5 * (-Complex64::from(e0) + f_plus - Complex64::new(d, -xi) * f_minus);
    let c = (1.0 / theta)
        * (-i * (0.5 * eta) * e0
            + i * (0.25 * eta) * (1.0 + d * d) * f_plus
            + (Complex64::new(1.0, 0.0) - i * (0.5 * eta - s.gamma_bar) * d) * f_minus);

    Ok(ConditionalState::new(a, b, c, params.is_lossless()))
}

/// Adiabatic-elimination solution linear in the cavity decay rate; the
/// intermediate amplitude is dropped and spontaneous emission is ignored.
pub fn evolve_adiabatic_linear(params: &SystemParams, t: f64) -> Result<ConditionalState> {
    params.require_symmetric_coupling()?;
    let two_g = params.two_g();
    let tau = t * two_g;
    let x = params.delta / two_g;
    let kappa = params.kappa / two_g;
    let eps = f64::from(epsilon_sign(params.delta));
    let w_less = omega_less_of(x);
    let eta = kappa * x.abs();

    let half = 0.5 * w_less * tau;
    let envelope = (-0.5 * kappa * tau).exp();
    let rot = Complex64::new(0.0, 0.5 * eps * w_less * tau).exp();
    let a = envelope * rot * (half.cos() + 2.0 * eta * half.sin());
    let b = envelope * rot * Complex64::new(0.0, eps) * half.sin();
    Ok(ConditionalState::new(a, b, Complex64::ZERO, false))
}

/// Adiabatic-elimination solution exact in the cavity decay rate, valid for
/// `kappa` below the slow frequency.
pub fn evolve_adiabatic_full(params: &SystemParams, t: f64) -> Result<ConditionalState> {
    params.require_symmetric_coupling()?;
    let two_g = params.two_g();
    let tau = t * two_g;
    let x = params.delta / two_g;
    let kappa = params.kappa / two_g;
    let eps = f64::from(epsilon_sign(params.delta));
    let w_less = omega_less_of(x);
    if kappa >= w_less {
        return Err(Error::Overdamped {
            kappa,
            omega_less: w_less,
        });
    }
    let w_k = (w_less * w_less - kappa * kappa).sqrt();
    let half = 0.5 * w_k * tau;
    let pref = (-0.5 * kappa * tau).exp() * Complex64::new(0.0, 0.5 * eps * w_less * tau).exp();
    let a = pref * (half.cos() + (kappa / w_k) * half.sin());
    let b = pref * Complex64::new(0.0, eps) * (w_less / w_k) * half.sin();
    Ok(ConditionalState::new(a, b, Complex64::ZERO, false))
}

/// Operation-time stretch factor of the linear adiabatic solution.
pub(crate) fn op_time_ratio_linear(kind: OperationKind, l: u32, eta: f64) -> f64 {
    let l = f64::from(l);
    match kind {
        OperationKind::Pi => {
            1.0 + (2.0 / l) * (1.0 - (2.0 / std::f64::consts::PI) * (1.0 / (2.0 * eta)).atan())
        }
        OperationKind::PiHalf => {
            1.0 - (1.0 / l)
                * (1.0 - (4.0 / std::f64::consts::PI) * (1.0 / (1.0 - 2.0 * eta)).atan())
        }
    }
}

/// Operation-time stretch factor of the full adiabatic solution;
/// `q = kappa / omega_<` must be below one.
pub(crate) fn op_time_ratio_full(kind: OperationKind, l: u32, q: f64) -> f64 {
    let l = f64::from(l);
    let r = (1.0 - q * q).sqrt();
    match kind {
        OperationKind::Pi => {
            (1.0 / r) * (1.0 + (2.0 / l) * (1.0 - (2.0 / std::f64::consts::PI) * (r / q).atan()))
        }
        OperationKind::PiHalf => {
            (1.0 / r)
                * (1.0 - (1.0 / l) * (1.0 - (4.0 / std::f64::consts::PI) * (r / (1.0 - q)).atan()))
        }
    }
}

fn require_kind(mode: ModeIndex, kind: OperationKind) -> Result<()> {
    match classify(mode) {
        Some(k) if k == kind => Ok(()),
        Some(_) | None => Err(Error::KindMismatch {
            k: mode.k(),
            l: mode.l(),
            expected: kind,
        }),
    }
}

/// Damping-shifted operation time from the linear adiabatic solution, in
/// the unit system of the parameters.
///
/// The stretch factor uses the general smallness parameter
/// `kappa_bar * Theta^2`; this is what reproduces the quoted damped
/// operation-time fidelities.
pub fn op_time_linear(mode: ModeIndex, kind: OperationKind, params: &SystemParams) -> Result<f64> {
    require_kind(mode, kind)?;
    params.require_symmetric_coupling()?;
    let two_g = params.two_g();
    let gp = grid_point(mode);
    let eta = (params.kappa / two_g) * gp.theta;
    Ok(gp.op_time * op_time_ratio_linear(kind, mode.l(), eta) / two_g)
}

/// Damping-shifted operation time from the full adiabatic solution, in the
/// unit system of the parameters.
pub fn op_times_full(mode: ModeIndex, kind: OperationKind, params: &SystemParams) -> Result<f64> {
    require_kind(mode, kind)?;
    params.require_symmetric_coupling()?;
    let two_g = params.two_g();
    let gp = grid_point(mode);
    let kappa = params.kappa / two_g;
    if kappa >= gp.slow {
        return Err(Error::Overdamped {
            kappa,
            omega_less: gp.slow,
        });
    }
    Ok(gp.op_time * op_time_ratio_full(kind, mode.l(), kappa / gp.slow) / two_g)
}

/// Exact value of `sin^2(l pi / 4)` for integer `l`.
fn quarter_sin_sq(l: u32) -> f64 {
    match l % 4 {
        0 => 0.0,
        2 => 1.0,
        _ => 0.5,
    }
}

/// Detuning correction that moves the nearest fast-oscillation minimum onto
/// the damping-shifted operation time. Returns `|Delta_{k,l}(kappa)|` in
/// `2g` units.
pub fn adjusted_detuning(mode: ModeIndex, params: &SystemParams) -> f64 {
    let x = detuning_grid(mode);
    let eta = (params.kappa / params.two_g()) * theta_of(x);
    x * (1.0
        - (4.0 * eta / (f64::from(mode.l()) * std::f64::consts::PI)) * quarter_sin_sq(mode.l()))
}
