//! Domain types and unit conventions shared by every other module.
//!
//! All closed-form and numeric routines work in dimensionless units where
//! `2g = 1`: frequencies are divided by `2g` and times multiplied by `2g`.
//! [`SystemParams`] can hold either physical rates or already-scaled ones;
//! every routine normalizes by the stored `g` on entry, so results are
//! covariant under a rescaling of the whole parameter set.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when deciding whether `omega == g`.
const COUPLING_EQ_TOL: f64 = 1e-12;

/// Physical rates of the driven atom-cavity system, all in the same
/// angular-frequency unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Cavity coupling strength g > 0.
    pub g: f64,
    /// Classical Rabi coupling of the driven transition.
    pub omega: f64,
    /// Signed detuning of both fields from their transitions.
    pub delta: f64,
    /// Cavity field decay rate (>= 0).
    pub kappa: f64,
    /// Spontaneous emission rate from the intermediate level (>= 0).
    pub gamma: f64,
}

impl SystemParams {
    pub fn new(g: f64, omega: f64, delta: f64, kappa: f64, gamma: f64) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::NonPositiveG(g));
        }
        if kappa < 0.0 || gamma < 0.0 {
            return Err(Error::NegativeRate { kappa, gamma });
        }
        Ok(Self {
            g,
            omega,
            delta,
            kappa,
            gamma,
        })
    }

    /// Parameters already in internal units (`2g = 1`, so `g = 1/2`) with the
    /// symmetric coupling `omega = g` required by all operation-design
    /// routines. `delta`, `kappa` and `gamma` are given in units of `2g`.
    pub fn internal(delta: f64, kappa: f64, gamma: f64) -> Result<Self> {
        Self::new(0.5, 0.5, delta, kappa, gamma)
    }

    /// Rescale every rate by `1/(2g)` so that internally `2g = 1`.
    pub fn to_internal(&self) -> Result<Self> {
        if !(self.g > 0.0) {
            return Err(Error::NonPositiveG(self.g));
        }
        let s = 1.0 / (2.0 * self.g);
        Ok(Self {
            g: 0.5,
            omega: self.omega * s,
            delta: self.delta * s,
            kappa: self.kappa * s,
            gamma: self.gamma * s,
        })
    }

    /// Undo [`to_internal`](Self::to_internal), restoring the coupling
    /// strength `g` in the desired unit.
    pub fn from_internal(internal: &Self, g: f64) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::NonPositiveG(g));
        }
        let s = 2.0 * g;
        Ok(Self {
            g,
            omega: internal.omega * s,
            delta: internal.delta * s,
            kappa: internal.kappa * s,
            gamma: internal.gamma * s,
        })
    }

    /// `2g`, the frequency scale of the internal unit system.
    pub fn two_g(&self) -> f64 {
        2.0 * self.g
    }

    pub fn is_lossless(&self) -> bool {
        self.kappa == 0.0 && self.gamma == 0.0
    }

    /// Whether the symmetric-coupling restriction `omega = g` holds.
    pub fn has_symmetric_coupling(&self) -> bool {
        (self.omega - self.g).abs() <= COUPLING_EQ_TOL * self.g.abs().max(self.omega.abs())
    }

    pub(crate) fn require_lossless(&self) -> Result<()> {
        if self.is_lossless() {
            Ok(())
        } else {
            Err(Error::DampingPresent {
                kappa: self.kappa,
                gamma: self.gamma,
            })
        }
    }

    pub(crate) fn require_symmetric_coupling(&self) -> Result<()> {
        if self.has_symmetric_coupling() {
            Ok(())
        } else {
            Err(Error::AsymmetricCoupling {
                omega: self.omega,
                g: self.g,
            })
        }
    }
}

/// Sign convention for the detuning: +1 for `delta >= 0`, -1 otherwise.
pub fn epsilon_sign(delta: f64) -> i32 {
    if delta >= 0.0 {
        1
    } else {
        -1
    }
}

/// Point `(k, l)` of the discrete detuning/operation-time grid.
///
/// `k` counts full oscillations of the intermediate-state population during
/// the operation and `l` counts slow-oscillation quarter periods; the two are
/// compatible only for `1 <= l <= 2k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    k: u32,
    l: u32,
}

impl ModeIndex {
    pub fn new(k: u32, l: u32) -> Result<Self> {
        if k < 1 || l < 1 || l > 2 * k {
            return Err(Error::InvalidMode { k, l });
        }
        Ok(Self { k, l })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }
}

impl std::fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.k, self.l)
    }
}

/// Which basic quantum operation a grid mode implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperationKind {
    /// Full population transfer `|10> -> -|01>`.
    Pi,
    /// Equal-weight superposition of `|10>` and `|01>`.
    PiHalf,
}

impl std::fmt::Display for OperationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OperationKind::Pi => write!(f, "pi"),
            OperationKind::PiHalf => write!(f, "pi/2"),
        }
    }
}

/// Conditional (no-jump) state over the basis `{|1,0>, |0,1>, |2,0>}`.
///
/// Damped evolution produces unnormalized states; `normalized` records
/// whether the amplitudes have been rescaled to unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalState {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub normalized: bool,
}

impl ConditionalState {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, normalized: bool) -> Self {
        Self {
            a,
            b,
            c,
            normalized,
        }
    }

    /// The initial state of every operation considered here.
    pub fn ground_start() -> Self {
        Self::new(
            Complex64::new(1.0, 0.0),
            Complex64::ZERO,
            Complex64::ZERO,
            true,
        )
    }

    pub fn from_array(v: [Complex64; 3], normalized: bool) -> Self {
        Self::new(v[0], v[1], v[2], normalized)
    }

    pub fn as_array(&self) -> [Complex64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn norm_sq(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Populations `(|a|^2, |b|^2, |c|^2)` of the raw amplitudes.
    pub fn populations(&self) -> (f64, f64, f64) {
        (self.a.norm_sqr(), self.b.norm_sqr(), self.c.norm_sqr())
    }
}

/// Drive envelope, normalized so that its area over the pulse duration
/// equals the duration itself (unit mean amplitude).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PulseShape {
    Rectangular,
    /// Linear rise over `rise_frac * t_p`, flat top, linear fall over
    /// `fall_frac * t_p`.
    Trapezium {
        rise_frac: f64,
        fall_frac: f64,
    },
    SineSquare,
}

impl PulseShape {
    pub fn trapezium(rise_frac: f64, fall_frac: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rise_frac) || !(0.0..1.0).contains(&fall_frac) {
            return Err(Error::InvalidPulse(format!(
                "rise/fall fractions must lie in [0, 1) (got {rise_frac}, {fall_frac})"
            )));
        }
        // Disjoint ramp segments; also keeps the area scaling factor finite.
        if rise_frac + fall_frac > 1.0 {
            return Err(Error::InvalidPulse(format!(
                "rise_frac + fall_frac must not exceed 1 (got {})",
                rise_frac + fall_frac
            )));
        }
        Ok(Self::Trapezium {
            rise_frac,
            fall_frac,
        })
    }

    /// Plateau height of the trapezium; 1 for the other shapes.
    pub fn area_scale(&self) -> f64 {
        match self {
            PulseShape::Trapezium {
                rise_frac,
                fall_frac,
            } => 1.0 / (1.0 - 0.5 * (rise_frac + fall_frac)),
            _ => 1.0,
        }
    }
}

impl std::fmt::Display for PulseShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PulseShape::Rectangular => write!(f, "rectangular"),
            PulseShape::Trapezium {
                rise_frac,
                fall_frac,
            } => write!(f, "trapezium({rise_frac}, {fall_frac})"),
            PulseShape::SineSquare => write!(f, "sine-square"),
        }
    }
}

/// Result of a fine-tuning search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningOutcome {
    /// Optimized operation time, in the unit system of the input parameters.
    pub time: f64,
    /// Detuning in effect at the optimum (same units as the input detuning).
    pub detuning: f64,
    /// Conditional fidelity against the ideal target state.
    pub fidelity: f64,
    /// Norm of the unnormalized conditional state at the optimum.
    pub norm: f64,
    /// Number of objective evaluations spent.
    pub iterations: u64,
}
