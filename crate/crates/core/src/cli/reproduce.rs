//! Recomputation of published table and figure values with per-value
//! pass/fail reporting.

use serde::Serialize;

use super::{fmt_f64, write_output, CommonArgs, FormatArg};
use crate::damped_analytic::{
    adjusted_detuning, evolve_perturbative, op_time_linear, op_time_ratio_full,
};
use crate::error::{Error, Result};
use crate::exact::{detuning_grid, grid_point, omega_less_of, target_state};
use crate::model::{ConditionalState, ModeIndex, OperationKind, PulseShape, SystemParams};
use crate::propagator::{evolve_pulsed, hamiltonian, pulse_grid_point, Propagator};
use crate::tuning::{
    fidelity, fine_tuning_time, optimize_detuning, optimize_pulse_duration, Engine, SearchConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum CheckKind {
    /// |computed - reference| <= tolerance.
    Abs,
    /// computed >= reference - tolerance.
    Ge,
    /// computed <= reference + tolerance.
    Le,
}

#[derive(Serialize)]
struct Check {
    name: String,
    computed: f64,
    reference: f64,
    tolerance: f64,
    kind: CheckKind,
    pass: bool,
}

fn check(
    name: impl Into<String>,
    computed: f64,
    reference: f64,
    tolerance: f64,
    kind: CheckKind,
) -> Check {
    let pass = match kind {
        CheckKind::Abs => (computed - reference).abs() <= tolerance,
        CheckKind::Ge => computed >= reference - tolerance,
        CheckKind::Le => computed <= reference + tolerance,
    };
    Check {
        name: name.into(),
        computed,
        reference,
        tolerance,
        kind,
        pass,
    }
}

fn internal(delta: f64, kappa: f64, gamma: f64) -> SystemParams {
    SystemParams::internal(delta, kappa, gamma).expect("valid internal parameters")
}

fn pert_fidelity(p: &SystemParams, t: f64, target: &ConditionalState) -> Result<f64> {
    fidelity(&evolve_perturbative(p, t)?, target)
}

fn numeric_fidelity(p: &SystemParams, t: f64, target: &ConditionalState) -> Result<f64> {
    let prop = Propagator::new(&hamiltonian(p));
    fidelity(&prop.state_at(t, &ConditionalState::ground_start()), target)
}

fn pulse_fidelity(
    p: &SystemParams,
    shape: &PulseShape,
    t_p: f64,
    target: &ConditionalState,
) -> Result<f64> {
    let traj = evolve_pulsed(p, shape, t_p, &[t_p], None)?;
    fidelity(&traj.states[0], target)
}

/// Normalized-amplitude modulus rows of one damped-operation table.
fn amplitude_checks(
    checks: &mut Vec<Check>,
    label: &str,
    p: &SystemParams,
    t: f64,
    quoted: [(f64, f64); 3],
) -> Result<()> {
    let st = evolve_perturbative(p, t)?;
    let n = st.norm();
    let computed = [st.a.norm() / n, st.b.norm() / n, st.c.norm() / n];
    for (idx, name) in ["a", "b", "c"].iter().enumerate() {
        let (re, im) = quoted[idx];
        checks.push(check(
            format!("{label} |{name}|"),
            computed[idx],
            re.hypot(im),
            2e-3,
            CheckKind::Abs,
        ));
    }
    Ok(())
}

/// Damped pi operation at (31,2), cavity decay 0.01: fidelities and
/// normalized amplitudes at the ideal, analytic and fine-tuned times.
fn table1() -> Result<Vec<Check>> {
    let mode = ModeIndex::new(31, 2)?;
    let gp = grid_point(mode);
    let p = internal(gp.detuning_abs, 0.01, 0.0);
    let tgt = target_state(mode, 1)?;
    let mut checks = Vec::new();

    let t_pi = op_time_linear(mode, OperationKind::Pi, &p)?;
    let t_f = gp.op_time + 2.0 * gp.period_fast;

    checks.push(check(
        "fidelity at t_kl",
        pert_fidelity(&p, gp.op_time, &tgt)?,
        0.9880,
        5e-4,
        CheckKind::Abs,
    ));
    checks.push(check(
        "fidelity at t_pi(kappa)",
        pert_fidelity(&p, t_pi, &tgt)?,
        0.9877,
        5e-4,
        CheckKind::Abs,
    ));
    checks.push(check(
        "fidelity at t_f = t_kl + 2T'",
        pert_fidelity(&p, t_f, &tgt)?,
        0.9995,
        5e-4,
        CheckKind::Abs,
    ));

    amplitude_checks(
        &mut checks,
        "t_kl",
        &p,
        gp.op_time,
        [(-0.0029, 0.1078), (-0.9940, 0.0000), (-0.0162, -0.0098)],
    )?;
    amplitude_checks(
        &mut checks,
        "t_pi(kappa)",
        &p,
        t_pi,
        [(0.0022, 0.0066), (-0.9887, -0.1012), (0.0372, 0.1043)],
    )?;
    amplitude_checks(
        &mut checks,
        "t_f",
        &p,
        t_f,
        [(-0.0037, 0.0064), (-0.9946, -0.1015), (-0.0162, -0.0133)],
    )?;

    let tuned = fine_tuning_time(&p, mode, &SearchConfig::default(), Engine::Analytic)?;
    checks.push(check(
        "fine-tuned offset in fast periods",
        (tuned.time - gp.op_time) / gp.period_fast,
        2.0,
        0.25,
        CheckKind::Abs,
    ));
    checks.push(check(
        "fine-tuned fidelity",
        tuned.fidelity,
        0.9995,
        5e-4,
        CheckKind::Abs,
    ));
    Ok(checks)
}

/// Damped pi/2 operation at (31,1), cavity decay 0.01.
fn table2() -> Result<Vec<Check>> {
    let mode = ModeIndex::new(31, 1)?;
    let gp = grid_point(mode);
    let p = internal(gp.detuning_abs, 0.01, 0.0);
    let tgt = target_state(mode, 1)?;
    let mut checks = Vec::new();

    let t_pi2 = op_time_linear(mode, OperationKind::PiHalf, &p)?;
    let t_f = gp.op_time + 3.0 * gp.period_fast;

    checks.push(check(
        "fidelity at t_kl",
        pert_fidelity(&p, gp.op_time, &tgt)?,
        0.9948,
        5e-4,
        CheckKind::Abs,
    ));
    checks.push(check(
        "fidelity at t_pi/2(kappa)",
        pert_fidelity(&p, t_pi2, &tgt)?,
        0.9858,
        5e-4,
        CheckKind::Abs,
    ));
    checks.push(check(
        "fidelity at t_f = t_kl + 3T'",
        pert_fidelity(&p, t_f, &tgt)?,
        0.9999,
        5e-4,
        CheckKind::Abs,
    ));

    amplitude_checks(
        &mut checks,
        "t_kl",
        &p,
        gp.op_time,
        [(0.5342, 0.5351), (-0.4623, 0.4632), (-0.0045, 0.0029)],
    )?;
    amplitude_checks(
        &mut checks,
        "t_pi/2(kappa)",
        &p,
        t_pi2,
        [(0.4584, 0.5339), (-0.5371, 0.4497), (0.0589, -0.1034)],
    )?;
    amplitude_checks(
        &mut checks,
        "t_f",
        &p,
        t_f,
        [(0.4632, 0.5407), (-0.5323, 0.4579), (-0.0058, 0.0029)],
    )?;

    let tuned = fine_tuning_time(&p, mode, &SearchConfig::default(), Engine::Analytic)?;
    checks.push(check(
        "fine-tuned offset in fast periods",
        (tuned.time - gp.op_time) / gp.period_fast,
        3.0,
        0.25,
        CheckKind::Abs,
    ));
    checks.push(check(
        "fine-tuned fidelity",
        tuned.fidelity,
        0.9999,
        5e-4,
        CheckKind::Abs,
    ));
    Ok(checks)
}

/// Grid detuning of the damped pi example, also in MHz for g/2pi = 16 MHz.
fn fig2() -> Result<Vec<Check>> {
    let x = detuning_grid(ModeIndex::new(31, 2)?);
    Ok(vec![
        check("detuning (2g units)", x, 5.4321, 1e-4, CheckKind::Abs),
        check(
            "detuning (MHz at g/2pi = 16 MHz)",
            x * 32.0,
            173.83,
            0.01,
            CheckKind::Abs,
        ),
    ])
}

/// Detuning correction and its numerical refinement for (31,2) at cavity
/// decay 0.01.
fn fig3() -> Result<Vec<Check>> {
    let mode = ModeIndex::new(31, 2)?;
    let p = internal(detuning_grid(mode), 0.01, 0.0);
    let adj = adjusted_detuning(mode, &p);
    let mut checks = vec![
        check(
            "corrected detuning (2g units)",
            adj,
            5.2380,
            1e-3,
            CheckKind::Abs,
        ),
        check(
            "corrected detuning (MHz at g/2pi = 16 MHz)",
            adj * 32.0,
            167.62,
            0.05,
            CheckKind::Abs,
        ),
    ];

    let tuned = optimize_detuning(&p, mode, &SearchConfig::default())?;
    checks.push(check(
        "numerically tuned detuning",
        tuned.detuning,
        5.2409,
        5e-3,
        CheckKind::Abs,
    ));
    checks.push(check(
        "numerically tuned detuning (MHz)",
        tuned.detuning * 32.0,
        167.71,
        0.2,
        CheckKind::Abs,
    ));
    checks.push(check(
        "numerically tuned fidelity",
        tuned.fidelity,
        0.9997,
        5e-4,
        CheckKind::Abs,
    ));

    // Fidelity after the corrected detuning plus time fine-tuning; the
    // published value refers to a nearby marked time, so the tolerance is
    // wider here.
    let p_adj = internal(adj, 0.01, 0.0);
    let ft = fine_tuning_time(&p_adj, mode, &SearchConfig::default(), Engine::Numeric)?;
    checks.push(check(
        "fine-tuned fidelity at corrected detuning",
        ft.fidelity,
        0.9992,
        1e-3,
        CheckKind::Abs,
    ));
    Ok(checks)
}

/// Small-detuning operations at kappa = 0.0015, without and with
/// spontaneous emission.
fn fig4() -> Result<Vec<Check>> {
    let cfg = SearchConfig::default();
    let mut checks = Vec::new();

    for (k, l) in [(1u32, 2u32), (1, 1)] {
        let mode = ModeIndex::new(k, l)?;
        let p = internal(detuning_grid(mode), 0.0015, 0.0);
        let tuned = fine_tuning_time(&p, mode, &cfg, Engine::Numeric)?;
        checks.push(check(
            format!("infidelity ({k},{l}) kappa-only"),
            1.0 - tuned.fidelity,
            1e-5,
            0.0,
            CheckKind::Le,
        ));
    }

    let mode42 = ModeIndex::new(4, 2)?;
    let p42 = internal(detuning_grid(mode42), 0.0015, 0.0);
    let tuned42 = fine_tuning_time(&p42, mode42, &cfg, Engine::Numeric)?;
    checks.push(check(
        "fidelity (4,2) kappa-only",
        tuned42.fidelity,
        0.99997,
        2e-5,
        CheckKind::Abs,
    ));

    for ((k, l), reference) in [((1u32, 2u32), 0.9989), ((1, 1), 0.9993)] {
        let mode = ModeIndex::new(k, l)?;
        let gp = grid_point(mode);
        let p = internal(gp.detuning_abs, 0.0015, 0.03);
        let tgt = target_state(mode, 1)?;
        checks.push(check(
            format!("fidelity ({k},{l}) with spontaneous emission"),
            pert_fidelity(&p, gp.op_time, &tgt)?,
            reference,
            5e-4,
            CheckKind::Abs,
        ));
    }
    Ok(checks)
}

/// Strongly damped pi operation: numerically tuned detuning and the
/// fidelity at the full-adiabatic operation time.
fn fig5() -> Result<Vec<Check>> {
    let mode = ModeIndex::new(31, 2)?;
    let p = internal(detuning_grid(mode), 0.05, 0.0);
    let tuned = optimize_detuning(&p, mode, &SearchConfig::default())?;
    let mut checks = vec![
        check(
            "numerically tuned detuning",
            tuned.detuning,
            4.4491,
            1e-2,
            CheckKind::Abs,
        ),
        check(
            "fidelity at tuned detuning",
            tuned.fidelity,
            0.9660,
            1e-3,
            CheckKind::Abs,
        ),
    ];

    // Direct evaluation at the published detuning and its operation time.
    let x = 4.4491;
    let w_less = omega_less_of(x);
    let t28 =
        std::f64::consts::PI / w_less * op_time_ratio_full(OperationKind::Pi, 2, 0.05 / w_less);
    let pd = internal(x, 0.05, 0.0);
    checks.push(check(
        "fidelity at published detuning and time",
        numeric_fidelity(&pd, t28, &target_state(mode, 1)?)?,
        0.9660,
        1e-3,
        CheckKind::Abs,
    ));
    Ok(checks)
}

/// Same strongly damped operation with spontaneous emission included.
fn fig6() -> Result<Vec<Check>> {
    let mode = ModeIndex::new(31, 2)?;
    let p = internal(detuning_grid(mode), 0.05, 0.03);
    let tuned = optimize_detuning(&p, mode, &SearchConfig::default())?;
    let mut checks = vec![check(
        "fidelity with spontaneous emission",
        tuned.fidelity,
        0.9994,
        5e-4,
        CheckKind::Abs,
    )];

    let x = 4.4491;
    let w_less = omega_less_of(x);
    let t28 =
        std::f64::consts::PI / w_less * op_time_ratio_full(OperationKind::Pi, 2, 0.05 / w_less);
    let pd = internal(x, 0.05, 0.03);
    checks.push(check(
        "fidelity at published detuning and time",
        numeric_fidelity(&pd, t28, &target_state(mode, 1)?)?,
        0.9994,
        5e-4,
        CheckKind::Abs,
    ));
    Ok(checks)
}

/// Shaped pulses at the small-detuning mode (3,2), undamped.
fn fig7() -> Result<Vec<Check>> {
    let mode = ModeIndex::new(3, 2)?;
    let trap = PulseShape::trapezium(0.1, 0.1)?;
    let sine = PulseShape::SineSquare;
    let p = internal(detuning_grid(mode), 0.0, 0.0);
    let tgt = target_state(mode, 1)?;
    let mut checks = Vec::new();

    let tp_trap = pulse_grid_point(mode, &trap).op_time;
    let tp_sine = pulse_grid_point(mode, &sine).op_time;
    checks.push(check(
        "trapezium fidelity at seed duration",
        pulse_fidelity(&p, &trap, tp_trap, &tgt)?,
        0.8176,
        2e-3,
        CheckKind::Abs,
    ));
    checks.push(check(
        "sine-square fidelity at seed duration",
        pulse_fidelity(&p, &sine, tp_sine, &tgt)?,
        0.9529,
        2e-3,
        CheckKind::Abs,
    ));
    checks.push(check(
        "trapezium fidelity at 1.103 x seed",
        pulse_fidelity(&p, &trap, 1.103 * tp_trap, &tgt)?,
        0.9681,
        2e-3,
        CheckKind::Abs,
    ));
    checks.push(check(
        "sine-square fidelity at 1.087 x seed",
        pulse_fidelity(&p, &sine, 1.087 * tp_sine, &tgt)?,
        0.99999,
        1e-6,
        CheckKind::Ge,
    ));

    let cfg = SearchConfig::default();
    let best_trap = optimize_pulse_duration(&p, mode, &trap, &cfg)?;
    checks.push(check(
        "trapezium optimal duration scale",
        best_trap.time / tp_trap,
        1.103,
        5e-3,
        CheckKind::Abs,
    ));
    checks.push(check(
        "trapezium optimal fidelity",
        best_trap.fidelity,
        0.9681,
        2e-3,
        CheckKind::Abs,
    ));
    let best_sine = optimize_pulse_duration(&p, mode, &sine, &cfg)?;
    checks.push(check(
        "sine-square optimal duration scale",
        best_sine.time / tp_sine,
        1.087,
        5e-3,
        CheckKind::Abs,
    ));
    checks.push(check(
        "sine-square optimal fidelity",
        best_sine.fidelity,
        0.99999,
        1e-6,
        CheckKind::Ge,
    ));
    Ok(checks)
}

/// Shaped pulses at the large-detuning mode (31,2), undamped and damped.
fn fig8() -> Result<Vec<Check>> {
    let mode = ModeIndex::new(31, 2)?;
    let trap = PulseShape::trapezium(0.1, 0.1)?;
    let sine = PulseShape::SineSquare;
    let p0 = internal(detuning_grid(mode), 0.0, 0.0);
    let tgt = target_state(mode, 1)?;
    let mut checks = Vec::new();

    let tp_trap = pulse_grid_point(mode, &trap).op_time;
    let tp_sine = pulse_grid_point(mode, &sine).op_time;
    checks.push(check(
        "trapezium fidelity at seed duration",
        pulse_fidelity(&p0, &trap, tp_trap, &tgt)?,
        0.99994,
        2e-4,
        CheckKind::Abs,
    ));
    checks.push(check(
        "sine-square fidelity at seed duration",
        pulse_fidelity(&p0, &sine, tp_sine, &tgt)?,
        0.99899,
        2e-4,
        CheckKind::Abs,
    ));
    checks.push(check(
        "sine-square fidelity at 1.02 x seed",
        pulse_fidelity(&p0, &sine, 1.02 * tp_sine, &tgt)?,
        0.99999,
        1e-6,
        CheckKind::Ge,
    ));

    let pd = internal(detuning_grid(mode), 0.05, 0.03);
    checks.push(check(
        "damped sine-square fidelity at 1.154 x seed",
        pulse_fidelity(&pd, &sine, 1.154 * tp_sine, &tgt)?,
        0.99999,
        1e-6,
        CheckKind::Ge,
    ));

    let cfg = SearchConfig::default();
    let best_damped = optimize_pulse_duration(&pd, mode, &sine, &cfg)?;
    checks.push(check(
        "damped sine-square optimal duration scale",
        best_damped.time / tp_sine,
        1.154,
        5e-3,
        CheckKind::Abs,
    ));
    checks.push(check(
        "damped sine-square optimal fidelity",
        best_damped.fidelity,
        0.99999,
        1e-6,
        CheckKind::Ge,
    ));
    let best_trap = optimize_pulse_duration(&p0, mode, &trap, &cfg)?;
    checks.push(check(
        "trapezium optimal duration scale (seed is optimal)",
        best_trap.time / tp_trap,
        1.0,
        1e-2,
        CheckKind::Abs,
    ));
    Ok(checks)
}

pub(super) fn cmd_reproduce(target: &str, common: &CommonArgs) -> Result<i32> {
    let checks = match target {
        "table1" => table1()?,
        "table2" => table2()?,
        "fig2" => fig2()?,
        "fig3" => fig3()?,
        "fig4" => fig4()?,
        "fig5" => fig5()?,
        "fig6" => fig6()?,
        "fig7" => fig7()?,
        "fig8" => fig8()?,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown reproduce target '{other}'"
            )))
        }
    };

    let mut all_pass = true;
    let mut table = String::new();
    for c in &checks {
        all_pass &= c.pass;
        let cmp = match c.kind {
            CheckKind::Abs => "~",
            CheckKind::Ge => ">=",
            CheckKind::Le => "<=",
        };
        table.push_str(&format!(
            "{} {target} :: {}: computed={:.6} {cmp} reference={:.6} (tol {:.1e})\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.computed,
            c.reference,
            c.tolerance,
        ));
    }
    print!("{table}");

    if common.out.is_some() {
        let payload = match common.format() {
            FormatArg::Json => {
                serde_json::to_string_pretty(&checks).expect("checks serialize") + "\n"
            }
            FormatArg::Csv => {
                let mut s = String::from("name,computed,reference,tolerance,kind,pass\n");
                for c in &checks {
                    s.push_str(&format!(
                        "{},{},{},{},{:?},{}\n",
                        c.name.replace(',', ";"),
                        fmt_f64(c.computed),
                        fmt_f64(c.reference),
                        fmt_f64(c.tolerance),
                        c.kind,
                        c.pass
                    ));
                }
                s
            }
        };
        write_output(&common.out, &payload)?;
    }

    Ok(if all_pass { 0 } else { 3 })
}
