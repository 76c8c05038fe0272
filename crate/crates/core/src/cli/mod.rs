//! Command-line reproduction harness and data emitter.
//!
//! Subcommands map the published tables, figures and tuning procedures to
//! machine-readable CSV/JSON output. All emitted numbers are in `2g` units
//! unless `--physical --g-mhz <value>` converts them to MHz and
//! microseconds.

mod reproduce;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{classify, detuning_grid, evolve_lossless, grid_point, omega_less_of};
use crate::model::{ConditionalState, ModeIndex, PulseShape, SystemParams, TuningOutcome};
use crate::propagator::{evolve_pulsed, hamiltonian, pulse_grid_point, Propagator};
use crate::tuning::{
    fidelity, fine_tuning_time, normalize, optimize_detuning, optimize_pulse_duration,
    pulse_seed_duration, Engine, SearchConfig,
};
use crate::{damped_analytic, exact};

#[derive(Parser, Debug)]
#[command(
    name = "raman-tuner",
    version,
    about = "Conditional dynamics and fine tuning of cavity Raman operations",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the discrete detuning / operation-time grid.
    Grid(GridArgs),
    /// Emit a conditional-evolution trajectory.
    Evolve(CommonArgs),
    /// Recompute published quantities and report pass/fail per value.
    Reproduce(ReproduceArgs),
    /// Run a fine-tuning procedure and emit its outcome with seed values.
    Tune(TuneArgs),
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// Largest k to tabulate.
    #[arg(long = "k-max", default_value_t = 5)]
    k_max: u32,
    /// Largest l to tabulate (clamped to 2k per row).
    #[arg(long = "l-max", default_value_t = 4)]
    l_max: u32,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
struct ReproduceArgs {
    /// One of: table1 table2 fig2 fig3 fig4 fig5 fig6 fig7 fig8.
    target: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
struct TuneArgs {
    /// One of: time detuning pulse.
    kind: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum EngineArg {
    Lossless,
    Perturbative,
    AdiabaticLinear,
    AdiabaticFull,
    Numeric,
    Pulsed,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ShapeArg {
    Rectangular,
    Trapezium,
    SineSquare,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Default)]
struct CommonArgs {
    /// Flat key = value file mirroring the long flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    l: Option<u32>,
    /// Cavity decay rate (2g units, or MHz with --physical).
    #[arg(long)]
    kappa: Option<f64>,
    /// Spontaneous emission rate (2g units, or MHz with --physical).
    #[arg(long)]
    gamma: Option<f64>,
    /// Signed detuning override (2g units, or MHz with --physical);
    /// defaults to the positive grid detuning of the mode.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    #[arg(long, value_enum)]
    shape: Option<ShapeArg>,
    /// Trapezium rise fraction.
    #[arg(long)]
    rise: Option<f64>,
    /// Trapezium fall fraction.
    #[arg(long)]
    fall: Option<f64>,
    /// Pulse-duration scale factor applied to the seed duration.
    #[arg(long = "tp-scale")]
    tp_scale: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Interpret rate inputs as MHz and emit MHz / microseconds.
    #[arg(long, default_value_t = false)]
    physical: bool,
    /// Coupling strength g / 2pi in MHz (required with --physical).
    #[arg(long = "g-mhz")]
    g_mhz: Option<f64>,
    /// Number of trajectory samples.
    #[arg(long)]
    resolution: Option<usize>,
}

impl CommonArgs {
    fn apply_config(&mut self) -> Result<()> {
        let Some(path) = &self.config else {
            return Ok(());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(' '))
                .ok_or_else(|| {
                    Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1))
                })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| Error::InvalidConfig(format!("line {}: {what}", lineno + 1));
            macro_rules! fill {
                ($field:ident, $ty:ty) => {
                    if self.$field.is_none() {
                        self.$field = Some(value.parse::<$ty>().map_err(|_| bad("invalid value"))?);
                    }
                };
            }
            match key {
                "k" => fill!(k, u32),
                "l" => fill!(l, u32),
                "kappa" => fill!(kappa, f64),
                "gamma" => fill!(gamma, f64),
                "delta" => fill!(delta, f64),
                "rise" => fill!(rise, f64),
                "fall" => fill!(fall, f64),
                "tp-scale" => fill!(tp_scale, f64),
                "g-mhz" => fill!(g_mhz, f64),
                "resolution" => fill!(resolution, usize),
                "out" => {
                    if self.out.is_none() {
                        self.out = Some(PathBuf::from(value));
                    }
                }
                "physical" => {
                    if !self.physical {
                        self.physical = value.parse::<bool>().map_err(|_| bad("invalid bool"))?;
                    }
                }
                "engine" => {
                    if self.engine.is_none() {
                        self.engine = Some(
                            EngineArg::from_str(value, true).map_err(|_| bad("unknown engine"))?,
                        );
                    }
                }
                "shape" => {
                    if self.shape.is_none() {
                        self.shape = Some(
                            ShapeArg::from_str(value, true).map_err(|_| bad("unknown shape"))?,
                        );
                    }
                }
                "format" => {
                    if self.format.is_none() {
                        self.format = Some(
                            FormatArg::from_str(value, true).map_err(|_| bad("unknown format"))?,
                        );
                    }
                }
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(())
    }

    fn units(&self) -> Result<Units> {
        if self.physical {
            let g = self
                .g_mhz
                .ok_or_else(|| Error::InvalidConfig("--physical requires --g-mhz".into()))?;
            if !(g > 0.0) {
                return Err(Error::NonPositiveG(g));
            }
            Ok(Units::Physical { g_mhz: g })
        } else {
            Ok(Units::TwoG)
        }
    }

    fn mode(&self) -> Result<ModeIndex> {
        let k = self
            .k
            .ok_or_else(|| Error::InvalidConfig("--k is required".into()))?;
        let l = self
            .l
            .ok_or_else(|| Error::InvalidConfig("--l is required".into()))?;
        ModeIndex::new(k, l)
    }

    fn shape(&self) -> Result<PulseShape> {
        match self.shape.unwrap_or(ShapeArg::Rectangular) {
            ShapeArg::Rectangular => Ok(PulseShape::Rectangular),
            ShapeArg::SineSquare => Ok(PulseShape::SineSquare),
            ShapeArg::Trapezium => {
                PulseShape::trapezium(self.rise.unwrap_or(0.1), self.fall.unwrap_or(0.1))
            }
        }
    }

    /// Internal-unit parameters; the detuning defaults to the mode's grid
    /// value with positive sign.
    fn params(&self, mode: Option<ModeIndex>) -> Result<SystemParams> {
        let units = self.units()?;
        let delta = match (self.delta, mode) {
            (Some(d), _) => units.freq_in(d),
            (None, Some(m)) => detuning_grid(m),
            (None, None) => 0.0,
        };
        SystemParams::internal(
            delta,
            units.freq_in(self.kappa.unwrap_or(0.0)),
            units.freq_in(self.gamma.unwrap_or(0.0)),
        )
    }

    fn format(&self) -> FormatArg {
        self.format.unwrap_or(FormatArg::Csv)
    }
}

/// Unit system on the command-line wire.
#[derive(Debug, Clone, Copy)]
enum Units {
    /// Frequencies in units of 2g, times in 1/(2g).
    TwoG,
    /// Frequencies in MHz (ordinary, not angular), times in microseconds.
    Physical { g_mhz: f64 },
}

impl Units {
    fn freq_in(&self, v: f64) -> f64 {
        match self {
            Units::TwoG => v,
            Units::Physical { g_mhz } => v / (2.0 * g_mhz),
        }
    }

    fn freq_out(&self, x: f64) -> f64 {
        match self {
            Units::TwoG => x,
            Units::Physical { g_mhz } => x * 2.0 * g_mhz,
        }
    }

    fn time_out(&self, tau: f64) -> f64 {
        match self {
            Units::TwoG => tau,
            Units::Physical { g_mhz } => tau / (2.0 * std::f64::consts::PI * 2.0 * g_mhz),
        }
    }
}

/// Seventeen significant digits: lossless f64 round-trip on the wire.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_output(out: &Option<PathBuf>, payload: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(payload.as_bytes())
                .map_err(|e| Error::InvalidConfig(format!("stdout: {e}")))
        }
    }
}

#[derive(Serialize)]
struct GridRow {
    k: u32,
    l: u32,
    detuning_abs: f64,
    theta: f64,
    op_time: f64,
    period_slow: f64,
    period_fast: f64,
    kind: String,
}

fn cmd_grid(args: &GridArgs) -> Result<()> {
    if args.k_max < 1 || args.l_max < 1 {
        return Err(Error::InvalidConfig("k-max and l-max must be >= 1".into()));
    }
    let units = args.common.units()?;
    let mut rows = Vec::new();
    for k in 1..=args.k_max {
        for l in 1..=args.l_max.min(2 * k) {
            let mode = ModeIndex::new(k, l)?;
            let gp = grid_point(mode);
            let kind = match classify(mode) {
                Some(op) => op.to_string(),
                None => "none".into(),
            };
            rows.push(GridRow {
                k,
                l,
                detuning_abs: units.freq_out(gp.detuning_abs),
                theta: units.freq_out(gp.theta),
                op_time: units.time_out(gp.op_time),
                period_slow: units.time_out(gp.period_slow),
                period_fast: units.time_out(gp.period_fast),
                kind,
            });
        }
    }
    let payload = match args.common.format() {
        FormatArg::Json => serde_json::to_string_pretty(&rows).expect("grid rows serialize") + "\n",
        FormatArg::Csv => {
            let mut s =
                String::from("k,l,detuning_abs,theta,op_time,period_slow,period_fast,kind\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.k,
                    r.l,
                    fmt_f64(r.detuning_abs),
                    fmt_f64(r.theta),
                    fmt_f64(r.op_time),
                    fmt_f64(r.period_slow),
                    fmt_f64(r.period_fast),
                    r.kind
                ));
            }
            s
        }
    };
    write_output(&args.common.out, &payload)
}

#[derive(Serialize)]
struct TrajectoryRow {
    t: f64,
    re_a: f64,
    im_a: f64,
    re_b: f64,
    im_b: f64,
    re_c: f64,
    im_c: f64,
    pop_a: f64,
    pop_b: f64,
    pop_c: f64,
    norm: f64,
    fidelity: f64,
}

fn trajectory_row(
    t_out: f64,
    raw: &ConditionalState,
    target: &ConditionalState,
) -> Result<TrajectoryRow> {
    let n = raw.norm();
    let st = normalize(raw)?;
    let (pa, pb, pc) = st.populations();
    Ok(TrajectoryRow {
        t: t_out,
        re_a: st.a.re,
        im_a: st.a.im,
        re_b: st.b.re,
        im_b: st.b.im,
        re_c: st.c.re,
        im_c: st.c.im,
        pop_a: pa,
        pop_b: pb,
        pop_c: pc,
        norm: n,
        fidelity: fidelity(raw, target)?,
    })
}

fn emit_trajectory(common: &CommonArgs, rows: &[TrajectoryRow]) -> Result<()> {
    let payload = match common.format() {
        FormatArg::Json => serde_json::to_string_pretty(rows).expect("rows serialize") + "\n",
        FormatArg::Csv => {
            let mut s =
                String::from("t,re_a,im_a,re_b,im_b,re_c,im_c,pop_a,pop_b,pop_c,norm,fidelity\n");
            for r in rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    fmt_f64(r.t),
                    fmt_f64(r.re_a),
                    fmt_f64(r.im_a),
                    fmt_f64(r.re_b),
                    fmt_f64(r.im_b),
                    fmt_f64(r.re_c),
                    fmt_f64(r.im_c),
                    fmt_f64(r.pop_a),
                    fmt_f64(r.pop_b),
                    fmt_f64(r.pop_c),
                    fmt_f64(r.norm),
                    fmt_f64(r.fidelity)
                ));
            }
            s
        }
    };
    write_output(&common.out, &payload)
}

fn cmd_evolve(common: &CommonArgs) -> Result<()> {
    let mode = common.mode()?;
    let units = common.units()?;
    let params = common.params(Some(mode))?;
    let engine = common.engine.unwrap_or(EngineArg::Numeric);
    let resolution = common.resolution.unwrap_or(1000);
    if resolution < 2 {
        return Err(Error::InvalidConfig("resolution must be >= 2".into()));
    }
    let target = exact::target_state_for(mode, params.delta);

    // Span one operation: the slow-route time for the in-effect detuning,
    // or the (possibly rescaled) pulse duration.
    let shape = common.shape()?;
    let t_end = match engine {
        EngineArg::Pulsed => {
            pulse_grid_point(mode, &shape).op_time * common.tp_scale.unwrap_or(1.0)
        }
        _ => f64::from(mode.l()) * std::f64::consts::PI / (2.0 * omega_less_of(params.delta.abs())),
    };
    let times: Vec<f64> = (0..resolution)
        .map(|i| t_end * (i as f64) / ((resolution - 1) as f64))
        .collect();

    let mut rows = Vec::with_capacity(times.len());
    match engine {
        EngineArg::Pulsed => {
            let traj = evolve_pulsed(&params, &shape, t_end, &times, None)?;
            for (t, st) in traj.times.iter().zip(&traj.states) {
                rows.push(trajectory_row(units.time_out(*t), st, &target)?);
            }
        }
        EngineArg::Numeric => {
            let prop = Propagator::new(&hamiltonian(&params));
            for &t in &times {
                let st = prop.state_at(t, &ConditionalState::ground_start());
                rows.push(trajectory_row(units.time_out(t), &st, &target)?);
            }
        }
        EngineArg::Lossless => {
            for &t in &times {
                let st = evolve_lossless(&params, t)?;
                rows.push(trajectory_row(units.time_out(t), &st, &target)?);
            }
        }
        EngineArg::Perturbative => {
            for &t in &times {
                let st = damped_analytic::evolve_perturbative(&params, t)?;
                rows.push(trajectory_row(units.time_out(t), &st, &target)?);
            }
        }
        EngineArg::AdiabaticLinear => {
            for &t in &times {
                let st = damped_analytic::evolve_adiabatic_linear(&params, t)?;
                rows.push(trajectory_row(units.time_out(t), &st, &target)?);
            }
        }
        EngineArg::AdiabaticFull => {
            for &t in &times {
                let st = damped_analytic::evolve_adiabatic_full(&params, t)?;
                rows.push(trajectory_row(units.time_out(t), &st, &target)?);
            }
        }
    }
    emit_trajectory(common, &rows)
}

#[derive(Serialize)]
struct TuneSeeds {
    detuning_grid: f64,
    detuning_adjusted: f64,
    op_time_grid: f64,
    op_time_linear: Option<f64>,
    op_time_full: Option<f64>,
    period_fast: f64,
    pulse_seed_duration: Option<f64>,
}

#[derive(Serialize)]
struct TuneRecord {
    procedure: String,
    outcome: TuningOutcome,
    scale: Option<f64>,
    seeds: TuneSeeds,
}

fn cmd_tune(args: &TuneArgs) -> Result<()> {
    let common = &args.common;
    let mode = common.mode()?;
    let units = common.units()?;
    let params = common.params(Some(mode))?;
    let cfg = SearchConfig::default();
    let gp = grid_point(mode);
    let kind = classify(mode);

    let op_time_linear = kind
        .and_then(|k| damped_analytic::op_time_linear(mode, k, &params).ok())
        .map(|t| units.time_out(t));
    let op_time_full = kind
        .and_then(|k| damped_analytic::op_times_full(mode, k, &params).ok())
        .map(|t| units.time_out(t));

    let mut seeds = TuneSeeds {
        detuning_grid: units.freq_out(detuning_grid(mode)),
        detuning_adjusted: units.freq_out(damped_analytic::adjusted_detuning(mode, &params)),
        op_time_grid: units.time_out(gp.op_time),
        op_time_linear,
        op_time_full,
        period_fast: units.time_out(gp.period_fast),
        pulse_seed_duration: None,
    };

    let (procedure, outcome, scale) = match args.kind.as_str() {
        "time" => {
            let engine = match common.engine {
                Some(EngineArg::Perturbative) => Engine::Analytic,
                Some(EngineArg::Numeric) | None => Engine::Numeric,
                Some(other) => {
                    return Err(Error::InvalidConfig(format!(
                        "engine {other:?} is not valid for time tuning"
                    )))
                }
            };
            let out = fine_tuning_time(&params, mode, &cfg, engine)?;
            ("time".to_string(), out, None)
        }
        "detuning" => {
            let out = optimize_detuning(&params, mode, &cfg)?;
            ("detuning".to_string(), out, None)
        }
        "pulse" => {
            let shape = common.shape()?;
            let seed = pulse_seed_duration(&params, mode, &shape);
            seeds.pulse_seed_duration = Some(units.time_out(seed));
            let out = optimize_pulse_duration(&params, mode, &shape, &cfg)?;
            let scale = out.time / seed;
            ("pulse".to_string(), out, Some(scale))
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown tune kind '{other}' (expected time, detuning or pulse)"
            )))
        }
    };

    let outcome = TuningOutcome {
        time: units.time_out(outcome.time),
        detuning: units.freq_out(outcome.detuning),
        ..outcome
    };
    let record = TuneRecord {
        procedure,
        outcome,
        scale,
        seeds,
    };
    let payload = serde_json::to_string_pretty(&record).expect("record serializes") + "\n";
    write_output(&common.out, &payload)
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NonPositiveG(_)
        | Error::NegativeRate { .. }
        | Error::InvalidMode { .. }
        | Error::DampingPresent { .. }
        | Error::AsymmetricCoupling { .. }
        | Error::InvalidEpsilon(_)
        | Error::NotAnOperation { .. }
        | Error::KindMismatch { .. }
        | Error::InvalidPulse(_)
        | Error::PulseTimeOutOfRange { .. }
        | Error::InvalidConfig(_) => 1,
        Error::PerturbationInvalid { .. }
        | Error::Overdamped { .. }
        | Error::ZeroNorm
        | Error::StepSizeUnderflow(_)
        | Error::NoLocalMaximum
        | Error::BudgetExhausted(_) => 2,
    }
}

/// Parse arguments from the process environment and run; returns the exit
/// code (0 success / all-pass, 1 usage, 2 numeric failure, 3 reproduction
/// tolerance failure).
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    run_command(cli)
}

fn run_command(cli: Cli) -> i32 {
    let result: Result<i32> = match cli.command {
        Command::Grid(mut args) => {
            if let Err(e) = args.common.apply_config() {
                return report_error(&e);
            }
            cmd_grid(&args).map(|()| 0)
        }
        Command::Evolve(mut common) => {
            if let Err(e) = common.apply_config() {
                return report_error(&e);
            }
            cmd_evolve(&common).map(|()| 0)
        }
        Command::Reproduce(mut args) => {
            if let Err(e) = args.common.apply_config() {
                return report_error(&e);
            }
            reproduce::cmd_reproduce(&args.target, &args.common)
        }
        Command::Tune(mut args) => {
            if let Err(e) = args.common.apply_config() {
                return report_error(&e);
            }
            cmd_tune(&args).map(|()| 0)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &Error) -> i32 {
    eprintln!("error: {e}");
    exit_code_for(e)
}
