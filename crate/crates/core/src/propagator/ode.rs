//! Adaptive Dormand-Prince 5(4) integrator for the three complex state
//! amplitudes.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type State = [Complex64; 3];

pub const RTOL: f64 = 1e-10;
pub const ATOL: f64 = 1e-12;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

fn axpy(out: &mut State, coef: f64, k: &State) {
    for i in 0..3 {
        out[i] += coef * k[i];
    }
}

/// Integrate `y' = f(t, y)` from `t0` to `t1` with adaptive step control.
///
/// The right-hand side is assumed smooth inside the interval; callers split
/// at envelope corners.
pub fn integrate_segment<F>(f: &F, t0: f64, t1: f64, y0: State) -> Result<State>
where
    F: Fn(f64, &State) -> State,
{
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(y0);
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = (span * 0.05).clamp(1e-8, 0.1);
    let mut k1 = f(t, &y);

    while t < t1 {
        if h > t1 - t {
            h = t1 - t;
        }
        let mut y2 = y;
        axpy(&mut y2, h * A21, &k1);
        let k2 = f(t + C2 * h, &y2);

        let mut y3 = y;
        axpy(&mut y3, h * A31, &k1);
        axpy(&mut y3, h * A32, &k2);
        let k3 = f(t + C3 * h, &y3);

        let mut y4 = y;
        axpy(&mut y4, h * A41, &k1);
        axpy(&mut y4, h * A42, &k2);
        axpy(&mut y4, h * A43, &k3);
        let k4 = f(t + C4 * h, &y4);

        let mut y5 = y;
        axpy(&mut y5, h * A51, &k1);
        axpy(&mut y5, h * A52, &k2);
        axpy(&mut y5, h * A53, &k3);
        axpy(&mut y5, h * A54, &k4);
        let k5 = f(t + C5 * h, &y5);

        let mut y6 = y;
        axpy(&mut y6, h * A61, &k1);
        axpy(&mut y6, h * A62, &k2);
        axpy(&mut y6, h * A63, &k3);
        axpy(&mut y6, h * A64, &k4);
        axpy(&mut y6, h * A65, &k5);
        let k6 = f(t + h, &y6);

        let mut ynew = y;
        axpy(&mut ynew, h * B1, &k1);
        axpy(&mut ynew, h * B3, &k3);
        axpy(&mut ynew, h * B4, &k4);
        axpy(&mut ynew, h * B5, &k5);
        axpy(&mut ynew, h * B6, &k6);
        let k7 = f(t + h, &ynew);

        let mut err_vec = [Complex64::ZERO; 3];
        axpy(&mut err_vec, h * E1, &k1);
        axpy(&mut err_vec, h * E3, &k3);
        axpy(&mut err_vec, h * E4, &k4);
        axpy(&mut err_vec, h * E5, &k5);
        axpy(&mut err_vec, h * E6, &k6);
        axpy(&mut err_vec, h * E7, &k7);

        let mut err_sq = 0.0;
        for i in 0..3 {
            let scale = ATOL + RTOL * y[i].norm().max(ynew[i].norm());
            let r = err_vec[i].norm() / scale;
            err_sq += r * r;
        }
        let err = (err_sq / 3.0).sqrt();

        if err <= 1.0 {
            t += h;
            y = ynew;
            k1 = k7; // first-same-as-last
        }

        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow(t));
        }
    }
    Ok(y)
}
