//! Acceptance suite: every published value and structural property this
//! toolkit must reproduce, one test per criterion with a printed
//! pass/fail line.

use raman_tuner::damped_analytic::{
    adjusted_detuning, evolve_adiabatic_full, evolve_adiabatic_linear, evolve_perturbative,
    op_time_linear,
};
use raman_tuner::exact::{classify, detuning_grid, evolve_lossless, grid_point, target_state};
use raman_tuner::model::{ConditionalState, ModeIndex, OperationKind, PulseShape, SystemParams};
use raman_tuner::propagator::{
    evolve_numeric, evolve_pulsed, hamiltonian, pulse_grid_point, resonant_oracle, Propagator,
};
use raman_tuner::tuning::{
    fidelity, fine_tuning_time, optimize_detuning, optimize_pulse_duration, Engine, SearchConfig,
};

struct Criterion {
    id: u32,
    label: &'static str,
    failures: Vec<String>,
    checks: u32,
}

impl Criterion {
    fn new(id: u32, label: &'static str) -> Self {
        Self {
            id,
            label,
            failures: Vec::new(),
            checks: 0,
        }
    }

    fn record(&mut self, ok: bool, detail: String) {
        self.checks += 1;
        if !ok {
            self.failures.push(detail);
        }
    }

    fn check_abs(&mut self, name: &str, computed: f64, expect: f64, tol: f64) {
        self.record(
            (computed - expect).abs() <= tol,
            format!("{name}: computed {computed} vs {expect} (tol {tol})"),
        );
    }

    fn check_ge(&mut self, name: &str, computed: f64, bound: f64) {
        self.record(
            computed >= bound,
            format!("{name}: computed {computed} < bound {bound}"),
        );
    }

    fn check_le(&mut self, name: &str, computed: f64, bound: f64) {
        self.record(
            computed <= bound,
            format!("{name}: computed {computed} > bound {bound}"),
        );
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!(
                "acceptance {:>2} PASS ({} checks): {}",
                self.id, self.checks, self.label
            );
        } else {
            println!(
                "acceptance {:>2} FAIL ({}/{} checks failed): {}",
                self.id,
                self.failures.len(),
                self.checks,
                self.label
            );
            for f in &self.failures {
                println!("    {f}");
            }
            panic!("acceptance criterion {} failed", self.id);
        }
    }
}

fn internal(delta: f64, kappa: f64, gamma: f64) -> SystemParams {
    SystemParams::internal(delta, kappa, gamma).unwrap()
}

fn mode(k: u32, l: u32) -> ModeIndex {
    ModeIndex::new(k, l).unwrap()
}

#[test]
fn criterion_01_detuning_grid() {
    let mut c = Criterion::new(1, "discrete detuning grid values");
    for (k, l, expect) in [
        (1, 1, 0.8165),
        (1, 2, 0.0),
        (3, 2, 1.2649),
        (4, 2, 1.6036),
        (31, 2, 5.4321),
        (31, 1, 7.7784),
    ] {
        c.check_abs(
            &format!("|Delta({k},{l})|"),
            detuning_grid(mode(k, l)),
            expect,
            1e-4,
        );
    }
    c.finish();
}

#[test]
fn criterion_02_lossless_perfection() {
    let mut c = Criterion::new(2, "lossless operations are perfect on the grid");
    for k in 1..=8u32 {
        for l in 1..=(2 * k) {
            let m = mode(k, l);
            if classify(m).is_none() {
                continue;
            }
            let gp = grid_point(m);
            let p = internal(gp.detuning_abs, 0.0, 0.0);
            let st = evolve_lossless(&p, gp.op_time).unwrap();
            let tgt = target_state(m, 1).unwrap();
            c.check_ge(
                &format!("fidelity ({k},{l})"),
                fidelity(&st, &tgt).unwrap(),
                1.0 - 1e-10,
            );
            c.check_le(&format!("|c| ({k},{l})"), st.c.norm(), 1e-10);
        }
    }
    c.finish();
}

fn table_checks(
    c: &mut Criterion,
    m: ModeIndex,
    kind: OperationKind,
    fidelities: [f64; 3],
    rows: [[(f64, f64); 3]; 3],
    tf_offset: f64,
) {
    let gp = grid_point(m);
    let p = internal(gp.detuning_abs, 0.01, 0.0);
    let tgt = target_state(m, 1).unwrap();
    let t_an = op_time_linear(m, kind, &p).unwrap();
    let t_f = gp.op_time + tf_offset * gp.period_fast;
    let times = [gp.op_time, t_an, t_f];
    let labels = ["t_kl", "t_op(kappa)", "t_f"];

    for i in 0..3 {
        let st = evolve_perturbative(&p, times[i]).unwrap();
        c.check_abs(
            &format!("fidelity at {}", labels[i]),
            fidelity(&st, &tgt).unwrap(),
            fidelities[i],
            5e-4,
        );
        let n = st.norm();
        let amps = [st.a, st.b, st.c];
        for (j, name) in ["a", "b", "c"].iter().enumerate() {
            let (re, im) = rows[i][j];
            c.check_abs(
                &format!("|{name}| at {}", labels[i]),
                amps[j].norm() / n,
                re.hypot(im),
                2e-3,
            );
        }
    }

    let tuned = fine_tuning_time(&p, m, &SearchConfig::default(), Engine::Analytic).unwrap();
    c.check_abs(
        "fine-tuned offset (fast periods)",
        (tuned.time - gp.op_time) / gp.period_fast,
        tf_offset,
        0.25,
    );
    c.check_abs("fine-tuned fidelity", tuned.fidelity, fidelities[2], 5e-4);
}

#[test]
fn criterion_03_damped_pi_table() {
    let mut c = Criterion::new(3, "damped pi operation table at (31,2), kappa 0.01");
    table_checks(
        &mut c,
        mode(31, 2),
        OperationKind::Pi,
        [0.9880, 0.9877, 0.9995],
        [
            [(-0.0029, 0.1078), (-0.9940, 0.0000), (-0.0162, -0.0098)],
            [(0.0022, 0.0066), (-0.9887, -0.1012), (0.0372, 0.1043)],
            [(-0.0037, 0.0064), (-0.9946, -0.1015), (-0.0162, -0.0133)],
        ],
        2.0,
    );
    c.finish();
}

#[test]
fn criterion_04_damped_pi_half_table() {
    let mut c = Criterion::new(4, "damped pi/2 operation table at (31,1), kappa 0.01");
    table_checks(
        &mut c,
        mode(31, 1),
        OperationKind::PiHalf,
        [0.9948, 0.9858, 0.9999],
        [
            [(0.5342, 0.5351), (-0.4623, 0.4632), (-0.0045, 0.0029)],
            [(0.4584, 0.5339), (-0.5371, 0.4497), (0.0589, -0.1034)],
            [(0.4632, 0.5407), (-0.5323, 0.4579), (-0.0058, 0.0029)],
        ],
        3.0,
    );
    c.finish();
}

#[test]
fn criterion_05_adjusted_detuning() {
    let mut c = Criterion::new(5, "damping-corrected detuning value");
    let m = mode(31, 2);
    let p = internal(detuning_grid(m), 0.01, 0.0);
    c.check_abs("corrected detuning", adjusted_detuning(m, &p), 5.2380, 1e-3);
    c.finish();
}

#[test]
fn criterion_06_numerical_detuning_tuning() {
    let mut c = Criterion::new(6, "numerically tuned detunings and fidelities");
    let m = mode(31, 2);
    let cfg = SearchConfig::default();

    let weak = optimize_detuning(&internal(detuning_grid(m), 0.01, 0.0), m, &cfg).unwrap();
    c.check_abs("detuning (kappa 0.01)", weak.detuning, 5.2409, 5e-3);
    c.check_abs("fidelity (kappa 0.01)", weak.fidelity, 0.9997, 5e-4);

    let strong = optimize_detuning(&internal(detuning_grid(m), 0.05, 0.0), m, &cfg).unwrap();
    c.check_abs("detuning (kappa 0.05)", strong.detuning, 4.4491, 1e-2);
    c.check_abs("fidelity (kappa 0.05)", strong.fidelity, 0.9660, 1e-3);

    let with_gamma = optimize_detuning(&internal(detuning_grid(m), 0.05, 0.03), m, &cfg).unwrap();
    c.check_abs(
        "fidelity (kappa 0.05, gamma 0.03)",
        with_gamma.fidelity,
        0.9994,
        5e-4,
    );
    // Spontaneous emission stabilizes the strongly damped operation.
    c.check_ge(
        "stabilization ordering",
        with_gamma.fidelity - strong.fidelity,
        0.0,
    );
    c.finish();
}

#[test]
fn criterion_07_small_detunings() {
    let mut c = Criterion::new(7, "small-detuning operations at kappa 0.0015");
    let cfg = SearchConfig::default();

    for (k, l) in [(1u32, 2u32), (1, 1)] {
        let m = mode(k, l);
        let p = internal(detuning_grid(m), 0.0015, 0.0);
        let tuned = fine_tuning_time(&p, m, &cfg, Engine::Numeric).unwrap();
        c.check_le(&format!("infidelity ({k},{l})"), 1.0 - tuned.fidelity, 1e-5);
    }

    let m42 = mode(4, 2);
    let p42 = internal(detuning_grid(m42), 0.0015, 0.0);
    let tuned42 = fine_tuning_time(&p42, m42, &cfg, Engine::Numeric).unwrap();
    c.check_abs("fidelity (4,2)", tuned42.fidelity, 0.99997, 2e-5);

    for ((k, l), expect) in [((1u32, 2u32), 0.9989), ((1, 1), 0.9993)] {
        let m = mode(k, l);
        let gp = grid_point(m);
        let p = internal(gp.detuning_abs, 0.0015, 0.03);
        let st = evolve_perturbative(&p, gp.op_time).unwrap();
        let tgt = target_state(m, 1).unwrap();
        c.check_abs(
            &format!("fidelity ({k},{l}) with gamma 0.03"),
            fidelity(&st, &tgt).unwrap(),
            expect,
            5e-4,
        );
    }
    c.finish();
}

fn pulse_fidelity_at(p: &SystemParams, shape: &PulseShape, t_p: f64, m: ModeIndex) -> f64 {
    let traj = evolve_pulsed(p, shape, t_p, &[t_p], None).unwrap();
    fidelity(&traj.states[0], &target_state(m, 1).unwrap()).unwrap()
}

#[test]
fn criterion_08_pulses_undamped() {
    let mut c = Criterion::new(8, "shaped pulses without damping");
    let trap = PulseShape::trapezium(0.1, 0.1).unwrap();
    let sine = PulseShape::SineSquare;

    let m32 = mode(3, 2);
    let p32 = internal(detuning_grid(m32), 0.0, 0.0);
    let tp_trap = pulse_grid_point(m32, &trap).op_time;
    let tp_sine = pulse_grid_point(m32, &sine).op_time;
    c.check_abs(
        "(3,2) trapezium seed",
        pulse_fidelity_at(&p32, &trap, tp_trap, m32),
        0.8176,
        2e-3,
    );
    c.check_abs(
        "(3,2) sine-square seed",
        pulse_fidelity_at(&p32, &sine, tp_sine, m32),
        0.9529,
        2e-3,
    );
    c.check_abs(
        "(3,2) trapezium x1.103",
        pulse_fidelity_at(&p32, &trap, 1.103 * tp_trap, m32),
        0.9681,
        2e-3,
    );
    c.check_ge(
        "(3,2) sine-square x1.087",
        pulse_fidelity_at(&p32, &sine, 1.087 * tp_sine, m32),
        0.99999,
    );

    let m312 = mode(31, 2);
    let p312 = internal(detuning_grid(m312), 0.0, 0.0);
    let tp_trap312 = pulse_grid_point(m312, &trap).op_time;
    let tp_sine312 = pulse_grid_point(m312, &sine).op_time;
    c.check_abs(
        "(31,2) trapezium seed",
        pulse_fidelity_at(&p312, &trap, tp_trap312, m312),
        0.99994,
        2e-4,
    );
    c.check_abs(
        "(31,2) sine-square seed",
        pulse_fidelity_at(&p312, &sine, tp_sine312, m312),
        0.99899,
        2e-4,
    );
    c.check_ge(
        "(31,2) sine-square x1.02",
        pulse_fidelity_at(&p312, &sine, 1.02 * tp_sine312, m312),
        0.99999,
    );
    c.finish();
}

#[test]
fn criterion_09_pulses_damped() {
    let mut c = Criterion::new(9, "shaped pulse with damping");
    let sine = PulseShape::SineSquare;
    let m = mode(31, 2);
    let p = internal(detuning_grid(m), 0.05, 0.03);
    let tp = pulse_grid_point(m, &sine).op_time;
    c.check_ge(
        "(31,2) damped sine-square x1.154",
        pulse_fidelity_at(&p, &sine, 1.154 * tp, m),
        0.99999 - 1e-6,
    );
    // The duration optimizer lands on the published scale.
    let best = optimize_pulse_duration(&p, m, &sine, &SearchConfig::default()).unwrap();
    c.check_abs("optimal duration scale", best.time / tp, 1.154, 5e-3);
    c.check_ge("optimal fidelity", best.fidelity, 0.99999 - 1e-6);
    c.finish();
}

/// Deterministic pseudo-random stream for property-style checks.
struct Lcg(u64);

impl Lcg {
    fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64) / ((1u64 << 53) as f64)
    }
}

#[test]
fn criterion_10_oracle_equivalence() {
    let mut c = Criterion::new(10, "cross-engine oracle equivalence and norm behavior");
    let init = ConditionalState::ground_start();

    // Spectral propagation against the closed lossless form.
    let mut rng = Lcg(0x5eed_1234);
    let mut worst: f64 = 0.0;
    for _ in 0..300 {
        let delta = 10.0 * rng.next_f64();
        let t = 50.0 * rng.next_f64();
        let p = internal(delta, 0.0, 0.0);
        let num = evolve_numeric(&p, t, &init).unwrap();
        let cf = evolve_lossless(&p, t).unwrap();
        worst = worst
            .max((num.a - cf.a).norm())
            .max((num.b - cf.b).norm())
            .max((num.c - cf.c).norm());
    }
    c.check_le("numeric vs lossless", worst, 1e-10);

    // First-order damped amplitudes against the spectral propagator. The
    // truncation error grows secularly with k (phase error accumulates over
    // k fast periods), so the k = 31 modes sit above the generic bound;
    // their measured truncation level is pinned separately.
    let pert_gap = |k: u32, l: u32, gamma: f64| -> f64 {
        let m = mode(k, l);
        let gp = grid_point(m);
        let p = internal(gp.detuning_abs, 0.01, gamma);
        let prop = Propagator::new(&hamiltonian(&p));
        let mut worst: f64 = 0.0;
        for i in 0..=200 {
            let t = gp.op_time * (i as f64) / 200.0;
            let pert = evolve_perturbative(&p, t).unwrap();
            let num = prop.state_at(t, &init);
            worst = worst
                .max((pert.a - num.a).norm())
                .max((pert.b - num.b).norm())
                .max((pert.c - num.c).norm());
        }
        worst
    };
    for gamma in [0.0, 0.01] {
        for (k, l) in [(1u32, 2u32), (1, 1), (4, 2), (8, 2), (8, 1), (16, 2)] {
            c.check_le(
                &format!("perturbative vs numeric ({k},{l}) gamma {gamma}"),
                pert_gap(k, l, gamma),
                5e-3,
            );
        }
        for (k, l) in [(31u32, 2u32), (31, 1)] {
            c.check_le(
                &format!("perturbative vs numeric ({k},{l}) gamma {gamma}, secular"),
                pert_gap(k, l, gamma),
                1e-2,
            );
        }
    }

    // On resonance the final state depends on the pulse area only.
    let t_p = 2.0f64.sqrt() * std::f64::consts::PI * 1.3;
    let p_res = internal(0.0, 0.0, 0.0);
    let shapes = [
        PulseShape::Rectangular,
        PulseShape::trapezium(0.1, 0.1).unwrap(),
        PulseShape::SineSquare,
    ];
    let finals: Vec<ConditionalState> = shapes
        .iter()
        .map(|s| evolve_pulsed(&p_res, s, t_p, &[t_p], None).unwrap().states[0])
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..finals.len() {
        for j in (i + 1)..finals.len() {
            worst = worst
                .max((finals[i].a - finals[j].a).norm())
                .max((finals[i].b - finals[j].b).norm())
                .max((finals[i].c - finals[j].c).norm());
        }
        let oracle = resonant_oracle(&shapes[i], t_p, t_p).unwrap();
        worst = worst.max((finals[i].a - oracle.a).norm());
    }
    c.check_le("resonant pulse-area invariance", worst, 1e-8);

    // Norm monotone non-increasing under damping, per engine.
    let m = mode(31, 2);
    let gp = grid_point(m);
    let p = internal(gp.detuning_abs, 0.02, 0.01);

    let prop = Propagator::new(&hamiltonian(&p));
    let mut max_rise: f64 = 0.0;
    let mut prev = f64::INFINITY;
    for i in 0..2000 {
        let t = gp.op_time * (i as f64) / 1999.0;
        let n = prop.state_at(t, &init).norm();
        max_rise = max_rise.max(n - prev);
        prev = n;
    }
    c.check_le("numeric norm rise", max_rise, 1e-10);

    let grid: Vec<f64> = (0..400).map(|i| gp.op_time * (i as f64) / 399.0).collect();
    let traj = evolve_pulsed(&p, &PulseShape::SineSquare, gp.op_time, &grid, None).unwrap();
    let mut max_rise: f64 = 0.0;
    for w in traj.norms.windows(2) {
        max_rise = max_rise.max(w[1] - w[0]);
    }
    c.check_le("pulsed norm rise", max_rise, 1e-9);

    // First-order analytic amplitudes ripple at the squared smallness
    // parameters; see the damped-analytic module tests for the bound.
    let scales = raman_tuner::damped_analytic::scales(&p).unwrap();
    let slack = 1e-9
        + (scales.eta * scales.eta + scales.xi * scales.xi) * scales.theta * gp.op_time / 1999.0;
    let mut max_rise: f64 = 0.0;
    let mut prev = f64::INFINITY;
    for i in 0..2000 {
        let t = gp.op_time * (i as f64) / 1999.0;
        let n = evolve_perturbative(&p, t).unwrap().norm();
        max_rise = max_rise.max(n - prev - slack);
        prev = n;
    }
    c.check_le(
        "perturbative norm rise beyond truncation slack",
        max_rise,
        0.0,
    );

    // The full adiabatic solution solves the reduced damped system exactly,
    // so its norm is strictly non-increasing; the linearized one ripples at
    // the square of the decay-to-slow-frequency ratio.
    let pa = internal(gp.detuning_abs, 0.02, 0.0);
    let dt = gp.op_time / 1999.0;
    let mut prev = f64::INFINITY;
    let mut max_rise: f64 = 0.0;
    for i in 0..2000 {
        let n = evolve_adiabatic_full(&pa, dt * (i as f64)).unwrap().norm();
        max_rise = max_rise.max(n - prev);
        prev = n;
    }
    c.check_le("full adiabatic norm rise", max_rise, 1e-10);

    let q = pa.kappa / gp.slow;
    let lin_slack = pa.kappa * q * q * dt;
    let mut prev = f64::INFINITY;
    let mut max_rise: f64 = 0.0;
    for i in 0..2000 {
        let n = evolve_adiabatic_linear(&pa, dt * (i as f64))
            .unwrap()
            .norm();
        max_rise = max_rise.max(n - prev - lin_slack);
        prev = n;
    }
    c.check_le(
        "linear adiabatic norm rise beyond truncation slack",
        max_rise,
        0.0,
    );

    c.finish();
}
