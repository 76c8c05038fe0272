//! Python bindings for the main types and operations of the toolkit.
//!
//! States are Python lists of three complex amplitudes over the basis
//! `{|1,0>, |0,1>, |2,0>}`; frequencies and times follow the unit system of
//! the `SystemParams` they accompany (use `SystemParams.internal` for
//! 2g units).

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use raman_tuner::model::{ConditionalState, ModeIndex, PulseShape, SystemParams, TuningOutcome};
use raman_tuner::tuning::{Engine, SearchConfig};
use raman_tuner::{damped_analytic, exact, propagator, tuning};

fn to_py_err(e: raman_tuner::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mode(k: u32, l: u32) -> PyResult<ModeIndex> {
    ModeIndex::new(k, l).map_err(to_py_err)
}

fn state_from(amps: [Complex64; 3]) -> Vec<Complex64> {
    amps.to_vec()
}

fn state_arg(amps: Vec<Complex64>) -> PyResult<ConditionalState> {
    if amps.len() != 3 {
        return Err(PyValueError::new_err("state must have three amplitudes"));
    }
    Ok(ConditionalState::new(amps[0], amps[1], amps[2], false))
}

fn shape_arg(name: &str, rise: f64, fall: f64) -> PyResult<PulseShape> {
    match name {
        "rectangular" => Ok(PulseShape::Rectangular),
        "sine-square" => Ok(PulseShape::SineSquare),
        "trapezium" => PulseShape::trapezium(rise, fall).map_err(to_py_err),
        other => Err(PyValueError::new_err(format!(
            "unknown pulse shape '{other}' (expected rectangular, trapezium or sine-square)"
        ))),
    }
}

/// System rates in one consistent angular-frequency unit.
#[pyclass(name = "SystemParams", frozen)]
struct PySystemParams {
    inner: SystemParams,
}

#[pymethods]
impl PySystemParams {
    #[new]
    fn new(g: f64, omega: f64, delta: f64, kappa: f64, gamma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: SystemParams::new(g, omega, delta, kappa, gamma).map_err(to_py_err)?,
        })
    }

    /// Parameters in internal units (2g = 1) with symmetric coupling.
    #[staticmethod]
    fn internal(delta: f64, kappa: f64, gamma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: SystemParams::internal(delta, kappa, gamma).map_err(to_py_err)?,
        })
    }

    /// Rescale all rates so that 2g = 1.
    fn to_internal(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.to_internal().map_err(to_py_err)?,
        })
    }

    #[getter]
    fn g(&self) -> f64 {
        self.inner.g
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "SystemParams(g={}, omega={}, delta={}, kappa={}, gamma={})",
            p.g, p.omega, p.delta, p.kappa, p.gamma
        )
    }
}

/// Result of a fine-tuning search.
#[pyclass(name = "TuningOutcome", frozen, get_all)]
struct PyTuningOutcome {
    time: f64,
    detuning: f64,
    fidelity: f64,
    norm: f64,
    iterations: u64,
}

impl From<TuningOutcome> for PyTuningOutcome {
    fn from(o: TuningOutcome) -> Self {
        Self {
            time: o.time,
            detuning: o.detuning,
            fidelity: o.fidelity,
            norm: o.norm,
            iterations: o.iterations,
        }
    }
}

#[pymethods]
impl PyTuningOutcome {
    fn __repr__(&self) -> String {
        format!(
            "TuningOutcome(time={}, detuning={}, fidelity={}, norm={}, iterations={})",
            self.time, self.detuning, self.fidelity, self.norm, self.iterations
        )
    }
}

/// Synchronization data of one grid mode, in 2g units.
#[pyclass(name = "GridPoint", frozen, get_all)]
struct PyGridPoint {
    k: u32,
    l: u32,
    detuning_abs: f64,
    theta: f64,
    op_time: f64,
    slow: f64,
    fast: f64,
    period_slow: f64,
    period_fast: f64,
}

impl From<exact::GridPoint> for PyGridPoint {
    fn from(gp: exact::GridPoint) -> Self {
        Self {
            k: gp.mode.k(),
            l: gp.mode.l(),
            detuning_abs: gp.detuning_abs,
            theta: gp.theta,
            op_time: gp.op_time,
            slow: gp.slow,
            fast: gp.fast,
            period_slow: gp.period_slow,
            period_fast: gp.period_fast,
        }
    }
}

#[pymethods]
impl PyGridPoint {
    fn __repr__(&self) -> String {
        format!(
            "GridPoint(k={}, l={}, detuning_abs={}, op_time={})",
            self.k, self.l, self.detuning_abs, self.op_time
        )
    }
}

/// Magnitude of the grid detuning for mode (k, l), in 2g units.
#[pyfunction]
fn detuning_grid(k: u32, l: u32) -> PyResult<f64> {
    Ok(exact::detuning_grid(mode(k, l)?))
}

/// Full synchronization data of mode (k, l).
#[pyfunction]
fn grid_point(k: u32, l: u32) -> PyResult<PyGridPoint> {
    Ok(exact::grid_point(mode(k, l)?).into())
}

/// Grid data with the pulse-shape average-frequency replacement.
#[pyfunction]
#[pyo3(signature = (k, l, shape, rise=0.1, fall=0.1))]
fn pulse_grid_point(k: u32, l: u32, shape: &str, rise: f64, fall: f64) -> PyResult<PyGridPoint> {
    let s = shape_arg(shape, rise, fall)?;
    Ok(propagator::pulse_grid_point(mode(k, l)?, &s).into())
}

/// "pi", "pi/2" or None for modes that return the initial state.
#[pyfunction]
fn classify(k: u32, l: u32) -> PyResult<Option<String>> {
    Ok(exact::classify(mode(k, l)?).map(|op| op.to_string()))
}

/// Ideal final state of the operation at mode (k, l) for a detuning sign.
#[pyfunction]
#[pyo3(signature = (k, l, eps=1))]
fn target_state(k: u32, l: u32, eps: i32) -> PyResult<Vec<Complex64>> {
    let st = exact::target_state(mode(k, l)?, eps).map_err(to_py_err)?;
    Ok(state_from(st.as_array()))
}

/// Exact lossless amplitudes of |1,0> evolved for time t.
#[pyfunction]
fn evolve_lossless(params: &PySystemParams, t: f64) -> PyResult<Vec<Complex64>> {
    let st = exact::evolve_lossless(&params.inner, t).map_err(to_py_err)?;
    Ok(state_from(st.as_array()))
}

/// First-order damped amplitudes (unnormalized).
#[pyfunction]
fn evolve_perturbative(params: &PySystemParams, t: f64) -> PyResult<Vec<Complex64>> {
    let st = damped_analytic::evolve_perturbative(&params.inner, t).map_err(to_py_err)?;
    Ok(state_from(st.as_array()))
}

/// Spectral propagation of the effective Hamiltonian (unnormalized).
#[pyfunction]
#[pyo3(signature = (params, t, initial=None))]
fn evolve_numeric(
    params: &PySystemParams,
    t: f64,
    initial: Option<Vec<Complex64>>,
) -> PyResult<Vec<Complex64>> {
    let init = match initial {
        Some(v) => state_arg(v)?,
        None => ConditionalState::ground_start(),
    };
    let st = propagator::evolve_numeric(&params.inner, t, &init).map_err(to_py_err)?;
    Ok(state_from(st.as_array()))
}

/// Final state after a shaped pulse of duration t_p (unnormalized).
#[pyfunction]
#[pyo3(signature = (params, shape, t_p, rise=0.1, fall=0.1))]
fn evolve_pulsed(
    params: &PySystemParams,
    shape: &str,
    t_p: f64,
    rise: f64,
    fall: f64,
) -> PyResult<Vec<Complex64>> {
    let s = shape_arg(shape, rise, fall)?;
    let traj =
        propagator::evolve_pulsed(&params.inner, &s, t_p, &[t_p], None).map_err(to_py_err)?;
    Ok(state_from(traj.states[0].as_array()))
}

/// Squared overlap of the normalized state with the normalized target.
#[pyfunction]
fn fidelity(state: Vec<Complex64>, target: Vec<Complex64>) -> PyResult<f64> {
    tuning::fidelity(&state_arg(state)?, &state_arg(target)?).map_err(to_py_err)
}

/// Damping-corrected detuning seed for mode (k, l), in 2g units.
#[pyfunction]
fn adjusted_detuning(params: &PySystemParams, k: u32, l: u32) -> PyResult<f64> {
    Ok(damped_analytic::adjusted_detuning(
        mode(k, l)?,
        &params.inner,
    ))
}

/// Fidelity-optimal operation time nearest the analytic estimate.
#[pyfunction]
#[pyo3(signature = (params, k, l, engine="numeric"))]
fn fine_tuning_time(
    params: &PySystemParams,
    k: u32,
    l: u32,
    engine: &str,
) -> PyResult<PyTuningOutcome> {
    let eng = match engine {
        "numeric" => Engine::Numeric,
        "analytic" => Engine::Analytic,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown engine '{other}' (expected numeric or analytic)"
            )))
        }
    };
    tuning::fine_tuning_time(&params.inner, mode(k, l)?, &SearchConfig::default(), eng)
        .map(Into::into)
        .map_err(to_py_err)
}

/// Jointly tune detuning and operation time around the corrected seed.
#[pyfunction]
fn optimize_detuning(params: &PySystemParams, k: u32, l: u32) -> PyResult<PyTuningOutcome> {
    tuning::optimize_detuning(&params.inner, mode(k, l)?, &SearchConfig::default())
        .map(Into::into)
        .map_err(to_py_err)
}

/// Maximize pulse fidelity over the duration scale factor.
#[pyfunction]
#[pyo3(signature = (params, k, l, shape, rise=0.1, fall=0.1))]
fn optimize_pulse_duration(
    params: &PySystemParams,
    k: u32,
    l: u32,
    shape: &str,
    rise: f64,
    fall: f64,
) -> PyResult<PyTuningOutcome> {
    let s = shape_arg(shape, rise, fall)?;
    tuning::optimize_pulse_duration(&params.inner, mode(k, l)?, &s, &SearchConfig::default())
        .map(Into::into)
        .map_err(to_py_err)
}

#[pymodule]
fn raman_tuner_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemParams>()?;
    m.add_class::<PyTuningOutcome>()?;
    m.add_class::<PyGridPoint>()?;
    m.add_function(wrap_pyfunction!(detuning_grid, m)?)?;
    m.add_function(wrap_pyfunction!(grid_point, m)?)?;
    m.add_function(wrap_pyfunction!(pulse_grid_point, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(target_state, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_lossless, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_perturbative, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_pulsed, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(adjusted_detuning, m)?)?;
    m.add_function(wrap_pyfunction!(fine_tuning_time, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_detuning, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_pulse_duration, m)?)?;
    Ok(())
}
