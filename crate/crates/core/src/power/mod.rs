//! Power iteration `x ← Ax/‖Ax‖₂` on symmetric matrices and the metric
//! under which it contracts.
//!
//! For a dominant eigenpair `(λ₁, v₁)` the eigen-metric
//! `d(x, y) = ‖x/⟨x,v₁⟩ − y/⟨y,v₁⟩‖₂` satisfies
//! `d(f(x), f(y)) ≤ (λ₂/λ₁)·d(x, y)`: the residual lies in `v₁⊥`, where a
//! symmetric `A` scales by at most `λ₂`. No `ℓp` norm works, see
//! [`lp_counterexample`].
//!
//! Only symmetric matrices are accepted. Systems also need `λ₁ > 0` and
//! `λ₂ ≥ |λₙ|` so that `λ₂/λ₁` really bounds `A` on `v₁⊥`.

mod format;
mod jacobi;

pub use format::{parse_matrix, parse_vector, print_matrix, MatrixFormatError};
pub use jacobi::{jacobi_eigensolve, MAX_DIMENSION, MIN_GAP, OFF_DIAGONAL_TOL};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::fmt::Write as _;

pub const RESIDUAL_TOL: f64 = 1e-10;
pub const UNIT_TOL: f64 = 1e-12;
/// Smallest `|⟨x, v₁⟩|` for which the eigen-metric is defined.
pub const MIN_OVERLAP: f64 = 1e-10;
pub const RATE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PowerError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension {0} unsupported (need 2..=64)")]
    Dimension(usize),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("Jacobi sweeps did not converge")]
    NoConvergence,
    #[error("eigenvalue gap {gap:e} too small for a contraction rate (need >= 1e-8)")]
    GapTooSmall { gap: f64 },
    #[error("lambda1 = {lambda1} is not dominant: need lambda1 > 0 and lambda2 >= |lambda_n| = {abs_min}")]
    NotDominant { lambda1: f64, abs_min: f64 },
    #[error("eigenpair {index} has residual {residual:e}")]
    Residual { index: usize, residual: f64 },
    #[error("eigenvectors {i} and {j} are not orthonormal (inner product {value:e})")]
    NotOrthonormal { i: usize, j: usize, value: f64 },
    #[error("vector has length {got}, system has dimension {expected}")]
    Length { got: usize, expected: usize },
    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),
    #[error("Ax = 0: start vector lies in the kernel")]
    ZeroImage,
    #[error("metric undefined: overlap with v1 is {0:e}, vector is (nearly) perpendicular to the principal eigenvector")]
    Overlap(f64),
    #[error("eps must be positive, got {0}")]
    Eps(f64),
}

/// A symmetric matrix with validated, descending eigenpairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSystem {
    matrix: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<DVector<f64>>,
}

impl SpectralSystem {
    /// Checks residuals, orthonormality, ordering, gap and dominance.
    pub fn from_parts(
        matrix: DMatrix<f64>,
        eigenvalues: Vec<f64>,
        eigenvectors: Vec<DVector<f64>>,
    ) -> Result<Self, PowerError> {
        let n = matrix.nrows();
        if n != matrix.ncols() {
            return Err(PowerError::NotSquare {
                rows: n,
                cols: matrix.ncols(),
            });
        }
        if n < 2 || eigenvalues.len() != n || eigenvectors.len() != n {
            return Err(PowerError::Dimension(n));
        }
        let scale = matrix.norm().max(1.0);
        for (i, (l, v)) in eigenvalues.iter().zip(&eigenvectors).enumerate() {
            if v.len() != n {
                return Err(PowerError::Length {
                    got: v.len(),
                    expected: n,
                });
            }
            let residual = (&matrix * v - v * *l).norm();
            if residual > RESIDUAL_TOL * scale {
                return Err(PowerError::Residual { index: i, residual });
            }
        }
        for i in 0..n {
            for j in 0..=i {
                let value = eigenvectors[i].dot(&eigenvectors[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                if (value - target).abs() > RESIDUAL_TOL {
                    return Err(PowerError::NotOrthonormal { i, j, value });
                }
            }
        }
        let gap = eigenvalues[0] - eigenvalues[1];
        if !(gap >= MIN_GAP) || eigenvalues.windows(2).any(|w| w[0] < w[1]) {
            return Err(PowerError::GapTooSmall { gap });
        }
        let abs_min = eigenvalues[n - 1].abs();
        if eigenvalues[0] <= 0.0 || eigenvalues[1] < abs_min {
            return Err(PowerError::NotDominant {
                lambda1: eigenvalues[0],
                abs_min,
            });
        }
        Ok(SpectralSystem {
            matrix,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn new(matrix: DMatrix<f64>) -> Result<Self, PowerError> {
        jacobi_eigensolve(&matrix)
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self, PowerError> {
        jacobi_eigensolve(&DMatrix::from_diagonal(&DVector::from_row_slice(entries)))
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[DVector<f64>] {
        &self.eigenvectors
    }

    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn v1(&self) -> &DVector<f64> {
        &self.eigenvectors[0]
    }

    /// Contraction rate `λ₂/λ₁`.
    pub fn rate(&self) -> f64 {
        self.eigenvalues[1] / self.eigenvalues[0]
    }

    fn check_len(&self, x: &DVector<f64>) -> Result<(), PowerError> {
        if x.len() == self.dimension() {
            Ok(())
        } else {
            Err(PowerError::Length {
                got: x.len(),
                expected: self.dimension(),
            })
        }
    }

    fn overlap(&self, x: &DVector<f64>) -> Result<f64, PowerError> {
        self.check_len(x)?;
        let o = x.dot(self.v1());
        if o.abs() < MIN_OVERLAP {
            Err(PowerError::Overlap(o))
        } else {
            Ok(o)
        }
    }
}

/// One step `Ax/‖Ax‖₂`, sign-aligned so `⟨out, v₁⟩ ≥ 0`.
pub fn power_step(sys: &SpectralSystem, x: &DVector<f64>) -> Result<DVector<f64>, PowerError> {
    sys.check_len(x)?;
    let norm = x.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(PowerError::NotUnit(norm));
    }
    let ax = sys.matrix() * x;
    let n = ax.norm();
    if n == 0.0 {
        return Err(PowerError::ZeroImage);
    }
    let out = ax / n;
    Ok(if out.dot(sys.v1()) < 0.0 { -out } else { out })
}

/// `d(x, y)` with the two normalized vectors kept for audit.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenMetricValue {
    pub value: f64,
    pub normalized_x: DVector<f64>,
    pub normalized_y: DVector<f64>,
    /// `x/⟨x,v₁⟩ − y/⟨y,v₁⟩`; `value` is its ℓ2 norm.
    pub residual: DVector<f64>,
}

pub fn eigen_metric(sys: &SpectralSystem, x: &DVector<f64>, y: &DVector<f64>) -> Result<EigenMetricValue, PowerError> {
    let nx = x / sys.overlap(x)?;
    let ny = y / sys.overlap(y)?;
    let residual = &nx - &ny;
    Ok(EigenMetricValue {
        value: residual.norm(),
        normalized_x: nx,
        normalized_y: ny,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub index: usize,
    pub before: f64,
    pub after: f64,
    /// `None` when `d(x, y) = 0` (vacuous).
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionCertificate {
    pub rate: f64,
    pub pairs_checked: usize,
    pub max_ratio: Option<f64>,
    pub records: Vec<PairRecord>,
    /// Indices with `d(f(x), f(y)) > rate·d(x, y) + 1e-9`.
    pub violations: Vec<usize>,
}

impl ContractionCertificate {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("pair,d_before,d_after,ratio\n");
        for r in &self.records {
            let ratio = r.ratio.map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{}", r.index, r.before, r.after, ratio).expect("writing to a String");
        }
        out
    }
}

/// Replays `d(f(x), f(y)) ≤ (λ₂/λ₁)·d(x, y)` on every pair.
pub fn certify_contraction_rate(
    sys: &SpectralSystem,
    pairs: &[(DVector<f64>, DVector<f64>)],
) -> Result<ContractionCertificate, PowerError> {
    let rate = sys.rate();
    let records = pairs
        .par_iter()
        .enumerate()
        .map(|(index, (x, y))| {
            let before = eigen_metric(sys, x, y)?.value;
            let after = eigen_metric(sys, &power_step(sys, x)?, &power_step(sys, y)?)?.value;
            let ratio = (before > 0.0).then(|| after / before);
            Ok(PairRecord {
                index,
                before,
                after,
                ratio,
            })
        })
        .collect::<Result<Vec<_>, PowerError>>()?;
    let violations = records
        .iter()
        .filter(|r| r.after > rate * r.before + RATE_SLACK)
        .map(|r| r.index)
        .collect();
    let max_ratio = records.iter().filter_map(|r| r.ratio).reduce(f64::max);
    Ok(ContractionCertificate {
        rate,
        pairs_checked: records.len(),
        max_ratio,
        records,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpNorm {
    One,
    Two,
    Inf,
}

impl LpNorm {
    pub fn parse(text: &str) -> Option<LpNorm> {
        match text.trim().to_ascii_lowercase().as_str() {
            "1" | "l1" => Some(LpNorm::One),
            "2" | "l2" => Some(LpNorm::Two),
            "inf" | "linf" | "infinity" => Some(LpNorm::Inf),
            _ => None,
        }
    }

    pub fn norm(self, v: &DVector<f64>) -> f64 {
        match self {
            LpNorm::One => v.lp_norm(1),
            LpNorm::Two => v.norm(),
            LpNorm::Inf => v.amax(),
        }
    }
}

impl std::fmt::Display for LpNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LpNorm::One => "l1",
            LpNorm::Two => "l2",
            LpNorm::Inf => "linf",
        })
    }
}

/// An expanding pair for power iteration on `diag(2, 1)` under an ℓp norm.
#[derive(Debug, Clone, PartialEq)]
pub struct LpCounterexample {
    pub norm: LpNorm,
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub fx: DVector<f64>,
    pub fy: DVector<f64>,
    /// `‖x − y‖_p`
    pub before: f64,
    /// `‖f(x) − f(y)‖_p`
    pub after: f64,
}

impl LpCounterexample {
    pub fn ratio(&self) -> f64 {
        self.after / self.before
    }

    pub fn expands(&self) -> bool {
        self.after > self.before
    }
}

pub fn counterexample_system() -> SpectralSystem {
    SpectralSystem::diagonal(&[2.0, 1.0]).expect("diag(2, 1) is a valid system")
}

fn lp_pair(sys: &SpectralSystem, norm: LpNorm, x: DVector<f64>, y: DVector<f64>) -> LpCounterexample {
    let fx = power_step(sys, &x).expect("unit vector in the positive quadrant");
    let fy = power_step(sys, &y).expect("unit vector in the positive quadrant");
    LpCounterexample {
        norm,
        before: norm.norm(&(&x - &y)),
        after: norm.norm(&(&fx - &fy)),
        x,
        y,
        fx,
        fy,
    }
}

/// `x = (1, 2)/√5`, `y = (1, 3)/√10`.
pub fn classic_pair() -> (DVector<f64>, DVector<f64>) {
    let s5 = 5f64.sqrt();
    let s10 = 10f64.sqrt();
    (
        DVector::from_vec(vec![1.0 / s5, 2.0 / s5]),
        DVector::from_vec(vec![1.0 / s10, 3.0 / s10]),
    )
}

/// For ℓ2 the classic pair; for ℓ1 and ℓ∞ the first expanding pair among
/// `(a, 1 − a)/‖·‖₂`, `a ∈ {1/100, .., 1}`, in lexicographic order.
pub fn lp_counterexample(norm: LpNorm) -> Option<LpCounterexample> {
    let sys = counterexample_system();
    if norm == LpNorm::Two {
        let (x, y) = classic_pair();
        return Some(lp_pair(&sys, norm, x, y));
    }
    let grid: Vec<DVector<f64>> = (1..=100)
        .map(|k| {
            let a = k as f64 / 100.0;
            DVector::from_vec(vec![a, 1.0 - a]).normalize()
        })
        .collect();
    (0..grid.len())
        .flat_map(|i| (i + 1..grid.len()).map(move |j| (i, j)))
        .map(|(i, j)| lp_pair(&sys, norm, grid[i].clone(), grid[j].clone()))
        .find(LpCounterexample::expands)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundStep {
    pub t: usize,
    pub x: DVector<f64>,
    /// `d(x_t, v₁)`
    pub d: f64,
    pub overlap: f64,
    /// `‖x_t − v₁‖₂`
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationBound {
    pub eps: f64,
    pub d0: f64,
    /// `log(d₀/ε)/log(λ₁/λ₂)`, `None` when `d₀ = 0`.
    pub predicted: Option<f64>,
    pub steps: usize,
    pub trace: Vec<BoundStep>,
}

impl IterationBound {
    pub fn last(&self) -> &BoundStep {
        self.trace.last().expect("trace holds x0")
    }

    /// `d(x_t, v₁) ≤ ε` at the predicted step, within 1e-12.
    pub fn metric_reached(&self) -> bool {
        self.last().d <= self.eps + 1e-12
    }

    /// `⟨x_t, v₁⟩ ≥ (1 + d²)^(−1/2)` at every step.
    pub fn conversion_holds(&self) -> bool {
        self.trace
            .iter()
            .all(|s| s.overlap >= (1.0 + s.d * s.d).powf(-0.5) - 1e-12)
    }

    /// `‖x_t − v₁‖₂ ≤ ε` at the predicted step.
    pub fn l2_reached(&self) -> bool {
        self.last().l2 <= self.eps + 1e-12
    }

    pub fn satisfied(&self) -> bool {
        self.metric_reached() && self.conversion_holds() && self.l2_reached()
    }

    pub fn to_csv(&self) -> String {
        let n = self.trace.first().map_or(0, |s| s.x.len());
        let mut out = String::from("step");
        for i in 1..=n {
            write!(out, ",x{i}").expect("writing to a String");
        }
        out.push_str(",d_to_v1,l2_to_v1\n");
        for s in &self.trace {
            write!(out, "{}", s.t).expect("writing to a String");
            for v in s.x.iter() {
                write!(out, ",{v}").expect("writing to a String");
            }
            writeln!(out, ",{},{}", s.d, s.l2).expect("writing to a String");
        }
        out
    }
}

/// Predicts `⌈log(d₀/ε)/log(λ₁/λ₂)⌉` steps (0 once `d₀ ≤ ε`) and runs them.
/// `x₀` is sign-aligned with `v₁` first; the eigen-metric ignores sign.
pub fn iteration_bound(sys: &SpectralSystem, x0: &DVector<f64>, eps: f64) -> Result<IterationBound, PowerError> {
    if !(eps > 0.0) {
        return Err(PowerError::Eps(eps));
    }
    let overlap = sys.overlap(x0)?;
    let mut x = if overlap < 0.0 { -x0 } else { x0.clone() };
    let d0 = eigen_metric(sys, &x, sys.v1())?.value;
    let predicted = (d0 > 0.0).then(|| (d0 / eps).ln() / (1.0 / sys.rate()).ln());
    let steps = predicted.map_or(0, |t| (t - 1e-9).ceil().max(0.0) as usize);
    let record = |t: usize, x: &DVector<f64>| -> Result<BoundStep, PowerError> {
        Ok(BoundStep {
            t,
            d: eigen_metric(sys, x, sys.v1())?.value,
            overlap: x.dot(sys.v1()),
            l2: (x - sys.v1()).norm(),
            x: x.clone(),
        })
    };
    let mut trace = vec![record(0, &x)?];
    for t in 1..=steps {
        x = power_step(sys, &x)?;
        trace.push(record(t, &x)?);
    }
    Ok(IterationBound {
        eps,
        d0,
        predicted,
        steps,
        trace,
    })
}
