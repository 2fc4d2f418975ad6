//! Symmetric eigen-decomposition for the small matrices used here.
//!
//! 3×3 matrices go through the trigonometric closed form with eigenvectors
//! from row cross products. Spectra whose eigenvalues are too close for that
//! route to give orthonormal vectors fall back to cyclic Jacobi, which also
//! serves the 4×4 normal-equation matrices of the polynomial fit.

use crate::color::RgbPoint;
use std::f64::consts::PI;

pub type Mat3 = [[f64; 3]; 3];

/// Relative eigenvalue gap below which the closed form is not trusted.
const MIN_RELATIVE_GAP: f64 = 1e-5;
/// Residual `‖Av − λv‖ / ‖A‖` accepted from the closed form.
const MAX_RELATIVE_RESIDUAL: f64 = 1e-11;

/// Eigenvalues (descending) and matching unit eigenvectors of a symmetric 3×3 matrix.
///
/// Eigenvectors are normalized to the sign convention used throughout: the
/// component of largest magnitude is nonnegative (first index wins ties).
pub fn symmetric_eigen3(a: &Mat3) -> ([f64; 3], [RgbPoint; 3]) {
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        let e = [
            RgbPoint::new(1.0, 0.0, 0.0),
            RgbPoint::new(0.0, 1.0, 0.0),
            RgbPoint::new(0.0, 0.0, 1.0),
        ];
        return ([0.0; 3], e);
    }
    let (values, vectors) = closed_form(a, scale).unwrap_or_else(|| jacobi3(a));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let vals = order.map(|i| values[i]);
    let vecs = order.map(|i| canonical_sign(vectors[i]));
    (vals, vecs)
}

/// Flips `v` so that its largest-magnitude component is nonnegative.
pub fn canonical_sign(v: RgbPoint) -> RgbPoint {
    let c = v.to_array();
    let mut k = 0;
    for i in 1..3 {
        if c[i].abs() > c[k].abs() {
            k = i;
        }
    }
    if c[k] < 0.0 {
        -v
    } else {
        v
    }
}

fn mat_vec(a: &Mat3, v: RgbPoint) -> RgbPoint {
    let r = |row: &[f64; 3]| row[0] * v.r + row[1] * v.g + row[2] * v.b;
    RgbPoint::new(r(&a[0]), r(&a[1]), r(&a[2]))
}

fn closed_form(a: &Mat3, scale: f64) -> Option<([f64; 3], [RgbPoint; 3])> {
    let mut b = *a;
    for row in b.iter_mut() {
        for v in row.iter_mut() {
            *v /= scale;
        }
    }
    let p1 = b[0][1].powi(2) + b[0][2].powi(2) + b[1][2].powi(2);
    let q = (b[0][0] + b[1][1] + b[2][2]) / 3.0;
    let p2 = (b[0][0] - q).powi(2) + (b[1][1] - q).powi(2) + (b[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p < 1e-12 {
        return None;
    }
    let mut c = b;
    for (i, row) in c.iter_mut().enumerate() {
        row[i] -= q;
        for v in row.iter_mut() {
            *v /= p;
        }
    }
    let det = c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1])
        - c[0][1] * (c[1][0] * c[2][2] - c[1][2] * c[2][0])
        + c[0][2] * (c[1][0] * c[2][1] - c[1][1] * c[2][0]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    if (e1 - e2).min(e2 - e3) < MIN_RELATIVE_GAP * p {
        return None;
    }

    let null_vector = |lambda: f64| -> Option<RgbPoint> {
        let row = |i: usize| RgbPoint::new(b[i][0], b[i][1], b[i][2]) - unit(i) * lambda;
        let (r0, r1, r2) = (row(0), row(1), row(2));
        let candidates = [r0.cross(r1), r1.cross(r2), r2.cross(r0)];
        candidates
            .into_iter()
            .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))
            .and_then(RgbPoint::normalized)
    };
    let v1 = null_vector(e1)?;
    let v2 = null_vector(e2)?;
    let v2 = (v2 - v1 * v1.dot(v2)).normalized()?;
    let v3 = v1.cross(v2);
    let vectors = [v1, v2, v3];

    let mut values = [0.0; 3];
    for (k, v) in vectors.iter().enumerate() {
        let av = mat_vec(a, *v);
        values[k] = v.dot(av);
        if (av - *v * values[k]).norm() > MAX_RELATIVE_RESIDUAL * scale {
            return None;
        }
    }
    Some((values, vectors))
}

fn unit(i: usize) -> RgbPoint {
    match i {
        0 => RgbPoint::new(1.0, 0.0, 0.0),
        1 => RgbPoint::new(0.0, 1.0, 0.0),
        _ => RgbPoint::new(0.0, 0.0, 1.0),
    }
}

fn jacobi3(a: &Mat3) -> ([f64; 3], [RgbPoint; 3]) {
    let (values, v) = jacobi(*a);
    let col = |k: usize| RgbPoint::new(v[0][k], v[1][k], v[2][k]);
    (values, [col(0), col(1), col(2)])
}

/// Cyclic Jacobi rotation for a symmetric `N×N` matrix.
///
/// Returns the eigenvalues (unsorted) and the eigenvectors as the columns of
/// the second matrix.
pub fn jacobi<const N: usize>(mut a: [[f64; N]; N]) -> ([f64; N], [[f64; N]; N]) {
    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let total: f64 = a.iter().flatten().map(|x| x * x).sum();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..N {
            for q in (p + 1)..N {
                off += a[p][q] * a[p][q];
            }
        }
        if off <= total * f64::EPSILON * f64::EPSILON * 1e-4 || off == 0.0 {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut values = [0.0; N];
    for (i, val) in values.iter_mut().enumerate() {
        *val = a[i][i];
    }
    (values, v)
}
