//! Eigendecomposition of a general (non-normal) complex 3x3 matrix via the
//! closed-form characteristic cubic, Newton-polished and residual-checked.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

pub type Mat3 = [[Complex64; 3]; 3];
pub type Vec3 = [Complex64; 3];

/// Spectral factorization `M = V diag(values) V^-1`.
#[derive(Debug, Clone)]
pub struct Eigen3 {
    pub values: [Complex64; 3],
    /// Eigenvectors as columns: `vectors[j]` belongs to `values[j]`.
    pub vectors: [Vec3; 3],
    inv: Mat3,
}

pub fn frobenius(m: &Mat3) -> f64 {
    m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    let mut out = [Complex64::ZERO; 3];
    for (i, row) in m.iter().enumerate() {
        out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

/// Roots of `x^3 + c2 x^2 + c1 x + c0` over the complex numbers.
fn cubic_roots(c2: Complex64, c1: Complex64, c0: Complex64) -> [Complex64; 3] {
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;

    if p.norm() < 1e-300 && q.norm() < 1e-300 {
        return [-shift; 3];
    }

    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    // Pick the branch that avoids cancellation in -q/2 +- disc.
    let base = if (-q / 2.0 + disc).norm() >= (-q / 2.0 - disc).norm() {
        -q / 2.0 + disc
    } else {
        -q / 2.0 - disc
    };
    let u = base.cbrt();
    let v = if u.norm() > 0.0 {
        -p / (3.0 * u)
    } else {
        Complex64::ZERO
    };

    let w = Complex64::new(-0.5, 0.75f64.sqrt());
    let wc = w.conj();
    [
        u + v - shift,
        w * u + wc * v - shift,
        wc * u + w * v - shift,
    ]
}

/// Decompose `m`; returns `None` when the matrix is too close to defective
/// for a reliable spectral factorization.
pub fn decompose(m: &Mat3) -> Option<Eigen3> {
    let scale = frobenius(m).max(1e-300);

    // Characteristic polynomial lambda^3 - tr lambda^2 + s lambda - det.
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = det3(m);

    let mut values = cubic_roots(-tr, minors, -det);

    // Newton polish on the characteristic polynomial.
    for lam in values.iter_mut() {
        for _ in 0..3 {
            let f = ((*lam - tr) * *lam + minors) * *lam - det;
            let df = (3.0 * *lam - 2.0 * tr) * *lam + minors;
            if df.norm() < 1e-14 * scale * scale {
                break;
            }
            *lam -= f / df;
        }
    }

    let mut vectors = [[Complex64::ZERO; 3]; 3];
    for (j, &lam) in values.iter().enumerate() {
        vectors[j] = null_vector(m, lam)?;
        // Residual check against the input matrix.
        let hv = mat_vec(m, &vectors[j]);
        let res: f64 = (0..3)
            .map(|i| (hv[i] - lam * vectors[j][i]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if res > 1e-12 * scale {
            return None;
        }
    }

    // Columns into a matrix and invert through the adjugate.
    let vmat: Mat3 = [
        [vectors[0][0], vectors[1][0], vectors[2][0]],
        [vectors[0][1], vectors[1][1], vectors[2][1]],
        [vectors[0][2], vectors[1][2], vectors[2][2]],
    ];
    let inv = invert(&vmat)?;

    // Guard against ill-conditioned eigenbases.
    let mut max_err: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let prod: Complex64 = (0..3).map(|k| vmat[i][k] * inv[k][j]).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            max_err = max_err.max((prod - expect).norm());
        }
    }
    if max_err > 1e-10 {
        return None;
    }

    Some(Eigen3 {
        values,
        vectors,
        inv,
    })
}

fn det3(m: &Mat3) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn invert(m: &Mat3) -> Option<Mat3> {
    let det = det3(m);
    if det.norm() < 1e-14 * frobenius(m).powi(3).max(1e-300) {
        return None;
    }
    let adj =
        |r1: usize, c1: usize, r2: usize, c2: usize| m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1];
    let cof = [
        [adj(1, 1, 2, 2), -adj(0, 1, 2, 2), adj(0, 1, 1, 2)],
        [-adj(1, 0, 2, 2), adj(0, 0, 2, 2), -adj(0, 0, 1, 2)],
        [adj(1, 0, 2, 1), -adj(0, 0, 2, 1), adj(0, 0, 1, 1)],
    ];
    let mut out = [[Complex64::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = cof[i][j] / det;
        }
    }
    Some(out)
}

/// Unit vector in the null space of `m - lambda I`, found from the largest
/// unconjugated cross product of two rows.
fn null_vector(m: &Mat3, lam: Complex64) -> Option<Vec3> {
    let mut a = *m;
    for i in 0..3 {
        a[i][i] -= lam;
    }
    let cross = |r1: &Vec3, r2: &Vec3| -> Vec3 {
        [
            r1[1] * r2[2] - r1[2] * r2[1],
            r1[2] * r2[0] - r1[0] * r2[2],
            r1[0] * r2[1] - r1[1] * r2[0],
        ]
    };
    let mut best: Option<(f64, Vec3)> = None;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let v = cross(&a[i], &a[j]);
        let n = (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt();
        if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
            best = Some((n, v));
        }
    }
    let (n, v) = best?;
    if n < 1e-14 * frobenius(&a).powi(2).max(1e-300) {
        return None;
    }
    Some([v[0] / n, v[1] / n, v[2] / n])
}

impl Eigen3 {
    /// Apply `exp(-i M t)` to `psi` through the spectral factorization.
    pub fn propagate(&self, t: f64, psi: &Vec3) -> Vec3 {
        let y = mat_vec(&self.inv, psi);
        let mut z = [Complex64::ZERO; 3];
        for j in 0..3 {
            z[j] = (-Complex64::I * self.values[j] * t).exp() * y[j];
        }
        let mut out = [Complex64::ZERO; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i] += self.vectors[j][i] * z[j];
            }
        }
        out
    }
}

/// Dense `exp(M)` by scaling and squaring of the Taylor series; used as a
/// fallback when the spectral route is rejected.
pub fn expm(m: &Mat3) -> Mat3 {
    let norm = frobenius(m);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(s as i32);
    let mut a = *m;
    for row in a.iter_mut() {
        for z in row.iter_mut() {
            *z *= scale;
        }
    }

    let mut result = identity();
    let mut term = identity();
    for n in 1..=40 {
        term = mat_mul(&term, &a);
        for row in term.iter_mut() {
            for z in row.iter_mut() {
                *z /= n as f64;
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                result[i][j] += term[i][j];
            }
        }
        if frobenius(&term) < 1e-20 * frobenius(&result) {
            break;
        }
    }
    for _ in 0..s {
        result = mat_mul(&result, &result);
    }
    result
}

fn identity() -> Mat3 {
    let mut m = [[Complex64::ZERO; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[Complex64::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for (k, bk) in b.iter().enumerate() {
                out[i][j] += a[i][k] * bk[j];
            }
        }
    }
    out
}

pub fn apply(m: &Mat3, v: &Vec3) -> Vec3 {
    mat_vec(m, v)
}
