//! Conditional normalization, fidelity scoring, and the fine-tuning
//! procedures: best operation time, numerically adjusted detuning, and
//! pulse-duration scaling.

use crate::damped_analytic::{
    adjusted_detuning, evolve_perturbative, op_time_ratio_full, op_time_ratio_linear,
};
use crate::error::{Error, Result};
use crate::exact::{classify, grid_point, omega_less_of, target_state, theta_of};
use crate::model::{
    epsilon_sign, ConditionalState, ModeIndex, OperationKind, PulseShape, SystemParams,
    TuningOutcome,
};
use crate::propagator::{evolve_pulsed, hamiltonian, Propagator};

/// Above this ratio of cavity decay to slow frequency the analytic
/// operation-time estimate switches from the linear to the full
/// adiabatic form.
const FULL_ADIABATIC_THRESHOLD: f64 = 0.25;

/// Deterministic search-budget knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Half-width of the candidate window, in fast periods.
    pub window_periods: u32,
    /// Time tolerance for extremum refinement, in `2g` units.
    pub refine_tol: f64,
    /// Relative half-width of the detuning bracket around the seed.
    pub detuning_span: f64,
    /// Hard cap on objective evaluations.
    pub max_evals: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            window_periods: 5,
            refine_tol: 1e-9,
            detuning_span: 0.10,
            max_evals: 20_000,
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if self.window_periods == 0 || !(self.refine_tol > 0.0) || !(self.detuning_span > 0.0) {
            return Err(Error::InvalidConfig(
                "window_periods, refine_tol and detuning_span must be positive".into(),
            ));
        }
        if self.max_evals < 50 {
            return Err(Error::InvalidConfig("max_evals must be at least 50".into()));
        }
        Ok(())
    }
}

/// Which solution family evaluates the conditional state during a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// First-order damped closed form.
    Analytic,
    /// Spectral propagation of the effective Hamiltonian.
    Numeric,
}

/// Rescale to unit norm, preserving phases.
pub fn normalize(state: &ConditionalState) -> Result<ConditionalState> {
    let n = state.norm();
    if n <= f64::MIN_POSITIVE.sqrt() {
        return Err(Error::ZeroNorm);
    }
    Ok(ConditionalState::new(
        state.a / n,
        state.b / n,
        state.c / n,
        true,
    ))
}

/// Squared overlap of the normalized state with the normalized target;
/// invariant under global phases of either argument.
pub fn fidelity(state: &ConditionalState, target: &ConditionalState) -> Result<f64> {
    let ns = state.norm();
    let nt = target.norm();
    if ns <= f64::MIN_POSITIVE.sqrt() || nt <= f64::MIN_POSITIVE.sqrt() {
        return Err(Error::ZeroNorm);
    }
    let overlap = target.a.conj() * state.a + target.b.conj() * state.b + target.c.conj() * state.c;
    Ok((overlap / (ns * nt)).norm_sqr())
}

/// Golden-section maximization of `f` on `[lo, hi]` down to interval `tol`.
fn golden_max<F>(
    f: &mut F,
    lo: f64,
    hi: f64,
    tol: f64,
    evals: &mut u64,
    budget: u64,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let spend = |f: &mut F, x: f64, evals: &mut u64| -> Result<f64> {
        *evals += 1;
        if *evals > budget {
            return Err(Error::BudgetExhausted(*evals));
        }
        f(x)
    };
    let mut f1 = spend(f, x1, evals)?;
    let mut f2 = spend(f, x2, evals)?;
    while b - a > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = spend(f, x1, evals)?;
        } else if f2 > f1 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = spend(f, x2, evals)?;
        } else {
            // Flat to machine precision: shrink symmetrically so the
            // bracket stays centered on the plateau.
            a = x1;
            b = x2;
            x1 = b - INV_PHI * (b - a);
            x2 = a + INV_PHI * (b - a);
            f1 = spend(f, x1, evals)?;
            f2 = spend(f, x2, evals)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = spend(f, x, evals)?;
    if fx >= f1 && fx >= f2 {
        Ok((x, fx))
    } else if f1 >= f2 {
        Ok((x1, f1))
    } else {
        Ok((x2, f2))
    }
}

/// State evaluator over internal-unit times for one fixed detuning.
enum Evaluator {
    Analytic(SystemParams),
    Numeric(Box<Propagator>),
}

impl Evaluator {
    fn new(internal: &SystemParams, engine: Engine) -> Self {
        match engine {
            Engine::Analytic => Evaluator::Analytic(*internal),
            Engine::Numeric => {
                Evaluator::Numeric(Box::new(Propagator::new(&hamiltonian(internal))))
            }
        }
    }

    fn state_at(&self, tau: f64) -> Result<ConditionalState> {
        match self {
            Evaluator::Analytic(p) => evolve_perturbative(p, tau),
            Evaluator::Numeric(prop) => Ok(prop.state_at(tau, &ConditionalState::ground_start())),
        }
    }
}

/// Analytic damping-shifted operation time (in `2g` units) for an arbitrary
/// detuning, switching between the linear and the full adiabatic form.
fn analytic_op_time(kind: OperationKind, l: u32, x_abs: f64, kappa: f64) -> Result<f64> {
    let w_less = omega_less_of(x_abs);
    let t_ref = f64::from(l) * std::f64::consts::PI / (2.0 * w_less);
    let q = kappa / w_less;
    let ratio = if q <= FULL_ADIABATIC_THRESHOLD {
        op_time_ratio_linear(kind, l, kappa * theta_of(x_abs))
    } else if q < 1.0 {
        op_time_ratio_full(kind, l, q)
    } else {
        // Overdamped: the linear form still yields a finite estimate.
        op_time_ratio_linear(kind, l, kappa * theta_of(x_abs))
    };
    Ok(t_ref * ratio)
}

/// Find the fidelity-optimal operation time nearest the analytic estimate.
///
/// Candidate times are the fast-oscillation minima around the estimate;
/// each is refined by a scalar search within a quarter fast period, and the
/// refined optimum closest to the estimate wins (earlier time on ties).
pub fn fine_tuning_time(
    params: &SystemParams,
    mode: ModeIndex,
    cfg: &SearchConfig,
    engine: Engine,
) -> Result<TuningOutcome> {
    cfg.validate()?;
    params.require_symmetric_coupling()?;
    let kind = classify(mode).ok_or(Error::NotAnOperation {
        k: mode.k(),
        l: mode.l(),
    })?;

    let internal = params.to_internal()?;
    let x = internal.delta;
    let target = target_state(mode, epsilon_sign(x))?;
    let theta = theta_of(x);
    let period_fast = std::f64::consts::TAU / theta;
    let t_est = analytic_op_time(kind, mode.l(), x.abs(), internal.kappa)?;

    let eval = Evaluator::new(&internal, engine);
    let mut evals: u64 = 0;
    let mut objective = |tau: f64| -> Result<f64> {
        let st = eval.state_at(tau)?;
        fidelity(&st, &target)
    };

    let j_est = (theta * t_est / std::f64::consts::TAU).round() as i64;
    let w = i64::from(cfg.window_periods);
    let mut best: Option<(f64, f64, f64)> = None; // (t, fidelity, |t - t_est|)
    let mut f_lo = f64::INFINITY;
    let mut f_hi = f64::NEG_INFINITY;
    for j in (j_est - w)..=(j_est + w) {
        if j < 1 {
            continue;
        }
        let tooth = std::f64::consts::TAU * (j as f64) / theta;
        let (t_j, f_j) = golden_max(
            &mut objective,
            tooth - 0.25 * period_fast,
            tooth + 0.25 * period_fast,
            cfg.refine_tol / 4.0,
            &mut evals,
            cfg.max_evals,
        )?;
        f_lo = f_lo.min(f_j);
        f_hi = f_hi.max(f_j);
        let dist = (t_j - t_est).abs();
        let better = match &best {
            None => true,
            Some((t_b, _, d_b)) => {
                dist < d_b - cfg.refine_tol || (dist <= d_b + cfg.refine_tol && t_j < *t_b)
            }
        };
        if better {
            best = Some((t_j, f_j, dist));
        }
    }
    let (t_refined, f_refined, _) = best.ok_or(Error::NoLocalMaximum)?;
    if !internal.is_lossless() && f_hi - f_lo < 1e-12 {
        return Err(Error::NoLocalMaximum);
    }

    // The fidelity is flat to machine precision over ~1e-8 around the
    // optimum, which caps what interval bisection can certify. A parabolic
    // vertex fit through well-separated probes recovers the remaining
    // digits.
    let (t_star, f_star) = {
        let h = 1e-5;
        let ym = objective(t_refined - h)?;
        let yp = objective(t_refined + h)?;
        evals += 2;
        let denom = yp + ym - 2.0 * f_refined;
        let shift = 0.5 * h * (ym - yp) / denom;
        if denom < -16.0 * f64::EPSILON * f_refined.abs() && shift.abs() <= h {
            let t_new = t_refined + shift;
            (t_new, objective(t_new)?)
        } else {
            (t_refined, f_refined)
        }
    };

    let st = eval.state_at(t_star)?;
    Ok(TuningOutcome {
        time: t_star / params.two_g(),
        detuning: params.delta,
        fidelity: f_star,
        norm: st.norm(),
        iterations: evals,
    })
}

/// Operation time used while tuning the detuning: the analytic stretch is
/// frozen at the mode's grid value in the linear regime and recomputed
/// self-consistently in the strongly damped regime.
fn tuning_op_time(
    kind: OperationKind,
    mode: ModeIndex,
    kappa: f64,
    frozen_ratio: Option<f64>,
    x_abs: f64,
) -> Result<f64> {
    let w_less = omega_less_of(x_abs);
    let t_ref = f64::from(mode.l()) * std::f64::consts::PI / (2.0 * w_less);
    match frozen_ratio {
        Some(r) => Ok(t_ref * r),
        None => {
            let q = kappa / w_less;
            if q >= 1.0 {
                return Err(Error::Overdamped {
                    kappa,
                    omega_less: w_less,
                });
            }
            Ok(t_ref * op_time_ratio_full(kind, mode.l(), q))
        }
    }
}

/// Jointly adjust the detuning and its analytic operation time to maximize
/// conditional fidelity, starting from the damping-corrected detuning seed.
///
/// The objective holds the analytic operation time law fixed while the
/// detuning slides the fast-oscillation comb; the local maximum nearest the
/// seed is refined and returned. Always uses the numeric engine.
pub fn optimize_detuning(
    params: &SystemParams,
    mode: ModeIndex,
    cfg: &SearchConfig,
) -> Result<TuningOutcome> {
    cfg.validate()?;
    params.require_symmetric_coupling()?;
    let kind = classify(mode).ok_or(Error::NotAnOperation {
        k: mode.k(),
        l: mode.l(),
    })?;

    let internal = params.to_internal()?;
    let kappa = internal.kappa;
    let sign = epsilon_sign(params.delta);
    let target = target_state(mode, sign)?;
    let seed = adjusted_detuning(mode, params);

    let gp = grid_point(mode);
    let frozen_ratio = if kappa / gp.slow <= FULL_ADIABATIC_THRESHOLD {
        Some(op_time_ratio_linear(kind, mode.l(), kappa * gp.theta))
    } else {
        None
    };

    let mut evals: u64 = 0;
    let objective = |x_abs: f64| -> Result<(f64, f64, ConditionalState)> {
        let t_op = tuning_op_time(kind, mode, kappa, frozen_ratio, x_abs)?;
        let mut p = internal;
        p.delta = f64::from(sign) * x_abs;
        let prop = Propagator::new(&hamiltonian(&p));
        let st = prop.state_at(t_op, &ConditionalState::ground_start());
        Ok((fidelity(&st, &target)?, t_op, st))
    };

    // Deterministic scan of the seed bracket, then golden refinement of the
    // local maximum nearest the seed.
    let lo = seed * (1.0 - cfg.detuning_span);
    let hi = seed * (1.0 + cfg.detuning_span);
    let n: usize = 601;
    if cfg.max_evals < (n as u64) + 100 {
        return Err(Error::BudgetExhausted(cfg.max_evals));
    }
    let step = (hi - lo) / ((n - 1) as f64);
    let mut fs = Vec::with_capacity(n);
    for i in 0..n {
        evals += 1;
        let (f, _, _) = objective(lo + step * (i as f64))?;
        fs.push(f);
    }
    let seed_fidelity = objective(seed)?.0;
    evals += 1;

    let mut best_i: Option<usize> = None;
    for i in 1..n - 1 {
        if fs[i] >= fs[i - 1] && fs[i] >= fs[i + 1] {
            let xi = lo + step * (i as f64);
            let better = match best_i {
                None => true,
                Some(b) => {
                    let xb = lo + step * (b as f64);
                    (xi - seed).abs() < (xb - seed).abs()
                }
            };
            if better {
                best_i = Some(i);
            }
        }
    }
    // Fall back to the best scanned value when the bracket is monotone.
    let pivot = best_i.unwrap_or_else(|| {
        fs.iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap()
    });

    let mut scalar = |x: f64| -> Result<f64> { objective(x).map(|(f, _, _)| f) };
    let ref_lo = lo + step * (pivot.saturating_sub(1) as f64);
    let ref_hi = lo + step * ((pivot + 1).min(n - 1) as f64);
    let (x_star, mut f_star) = golden_max(
        &mut scalar,
        ref_lo,
        ref_hi,
        1e-9 * seed.max(1e-6),
        &mut evals,
        cfg.max_evals,
    )?;

    // The optimizer must never fall below its own seed evaluation.
    let x_star = if f_star < seed_fidelity {
        f_star = seed_fidelity;
        seed
    } else {
        x_star
    };

    let (f_check, t_op, st) = objective(x_star)?;
    evals += 1;
    debug_assert!((f_check - f_star).abs() < 1e-9);
    Ok(TuningOutcome {
        time: t_op / params.two_g(),
        detuning: f64::from(sign) * x_star * params.two_g(),
        fidelity: f_star,
        norm: st.norm(),
        iterations: evals,
    })
}

/// Maximize pulse fidelity over the duration scale factor in `[0.8, 1.5]`
/// around the average-frequency seed duration.
pub fn optimize_pulse_duration(
    params: &SystemParams,
    mode: ModeIndex,
    shape: &PulseShape,
    cfg: &SearchConfig,
) -> Result<TuningOutcome> {
    cfg.validate()?;
    params.require_symmetric_coupling()?;
    if classify(mode).is_none() {
        return Err(Error::NotAnOperation {
            k: mode.k(),
            l: mode.l(),
        });
    }

    let internal = params.to_internal()?;
    let target = target_state(mode, epsilon_sign(internal.delta))?;
    let seed_tp = crate::propagator::pulse_grid_point(mode, shape).op_time;

    let mut evals: u64 = 0;
    let mut objective = |scale: f64| -> Result<f64> {
        let t_p = scale * seed_tp;
        let traj = evolve_pulsed(&internal, shape, t_p, &[t_p], None)?;
        fidelity(&traj.states[0], &target)
    };

    const LO: f64 = 0.8;
    const HI: f64 = 1.5;
    let n: usize = 71;
    if cfg.max_evals < (n as u64) + 60 {
        return Err(Error::BudgetExhausted(cfg.max_evals));
    }
    let step = (HI - LO) / ((n - 1) as f64);
    let mut fs = Vec::with_capacity(n);
    for i in 0..n {
        evals += 1;
        fs.push(objective(LO + step * (i as f64))?);
    }
    let best = fs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let ref_lo = LO + step * (best.saturating_sub(1) as f64);
    let ref_hi = LO + step * ((best + 1).min(n - 1) as f64);
    let (scale_star, f_star) = golden_max(
        &mut objective,
        ref_lo,
        ref_hi,
        1e-7,
        &mut evals,
        cfg.max_evals,
    )?;

    let t_p = scale_star * seed_tp;
    let traj = evolve_pulsed(&internal, shape, t_p, &[t_p], None)?;
    Ok(TuningOutcome {
        time: t_p / params.two_g(),
        detuning: params.delta,
        fidelity: f_star,
        norm: traj.states[0].norm(),
        iterations: evals,
    })
}

/// Duration seed (in the parameter units) that [`optimize_pulse_duration`]
/// scales; exposed so callers can report the scale factor.
pub fn pulse_seed_duration(params: &SystemParams, mode: ModeIndex, shape: &PulseShape) -> f64 {
    crate::propagator::pulse_grid_point(mode, shape).op_time / params.two_g()
}
