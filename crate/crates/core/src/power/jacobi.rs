//! Cyclic Jacobi rotations for small dense symmetric matrices.

use super::{PowerError, SpectralSystem};
use nalgebra::{DMatrix, DVector};

pub const MAX_DIMENSION: usize = 64;
/// Off-diagonal Frobenius mass, relative to the whole matrix, at which the
/// sweep stops.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;
pub const MIN_GAP: f64 = 1e-8;
const MAX_SWEEPS: usize = 100;

fn off_diagonal(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Rotation zeroing `a[(p, q)]`, applied to both `a` and the accumulated
/// eigenvector matrix `v`.
fn rotate(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.nrows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Eigen-decomposition of a symmetric matrix, sorted by descending
/// eigenvalue, each eigenvector scaled so its largest-magnitude component
/// is positive.
pub fn jacobi_eigensolve(matrix: &DMatrix<f64>) -> Result<SpectralSystem, PowerError> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(PowerError::NotSquare {
            rows: n,
            cols: matrix.ncols(),
        });
    }
    if !(2..=MAX_DIMENSION).contains(&n) {
        return Err(PowerError::Dimension(n));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(PowerError::NonFinite);
    }
    let scale = matrix.norm().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..i {
            if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 * scale {
                return Err(PowerError::NotSymmetric { row: i, col: j });
            }
        }
    }

    let mut a = matrix.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let mut sweeps = 0;
    while off_diagonal(&a) >= OFF_DIAGONAL_TOL * scale {
        if sweeps == MAX_SWEEPS {
            return Err(PowerError::NoConvergence);
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut pairs: Vec<(f64, DVector<f64>)> = (0..n)
        .map(|i| {
            let mut col = v.column(i).into_owned();
            let lead = col.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if lead < 0.0 {
                col = -col;
            }
            (a[(i, i)], col)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    SpectralSystem::from_parts(matrix.clone(), eigenvalues, eigenvectors)
}
