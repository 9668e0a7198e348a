//! Fidelity matrices of the alignment protocol and their leading
//! eigenpairs.
//!
//! The average transmission fidelity of an N-spin signal state with
//! coefficient vector A is the quadratic form A' M A, where M is a
//! symmetric tridiagonal matrix indexed by the total-spin classes in
//! descending order. The optimal protocol is the leading eigenpair of M.
//! The eigensolver is a Sturm-sequence bisection followed by inverse
//! iteration; it never forms a dense matrix, so sweeps over thousands of
//! spin counts stay cheap.

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::representation::classes_for;
use serde::Serialize;
use std::f64::consts::PI;

/// Symmetric tridiagonal matrix stored as its two bands, rows tagged with
/// the total-spin class they represent. Entries are non-negative, labels
/// strictly descending.
#[derive(Debug, Clone)]
pub struct TridiagonalSymmetric {
    diag: Vec<f64>,
    off: Vec<f64>,
    row_labels: Vec<HalfInt>,
}

impl TridiagonalSymmetric {
    /// The off band must be one shorter than the diagonal; one label per
    /// row.
    pub fn new(diag: Vec<f64>, off: Vec<f64>, row_labels: Vec<HalfInt>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::CoefficientCountMismatch {
                expected: 1,
                got: 0,
            });
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::CoefficientCountMismatch {
                expected: diag.len() - 1,
                got: off.len(),
            });
        }
        if row_labels.len() != diag.len() {
            return Err(Error::CoefficientCountMismatch {
                expected: diag.len(),
                got: row_labels.len(),
            });
        }
        for (index, value) in diag.iter().chain(off.iter()).copied().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeCoefficient { index, value });
            }
        }
        for (index, pair) in row_labels.windows(2).enumerate() {
            if pair[1] >= pair[0] {
                return Err(Error::ClassOrderViolation { index: index + 1 });
            }
        }
        Ok(Self {
            diag,
            off,
            row_labels,
        })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off
    }

    /// Total-spin class of each row, descending.
    pub fn row_labels(&self) -> &[HalfInt] {
        &self.row_labels
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.size());
        let n = self.size();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * v[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.size();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off[i];
                m[(i + 1, i)] = self.off[i];
            }
        }
        m
    }

    /// Number of eigenvalues strictly below x, by counting negative pivots
    /// of the LDL factorization of T - x I. A vanishing pivot is nudged;
    /// that can only shift the count at an exact tie, which bisection
    /// tolerates.
    pub fn sturm_count(&self, x: f64) -> usize {
        let guard = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut d = self.diag[0] - x;
        if d.abs() < guard {
            d = -guard;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in 1..self.size() {
            d = (self.diag[i] - x) - self.off[i - 1] * self.off[i - 1] / d;
            if d.abs() < guard {
                d = -guard;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin bounds on the whole spectrum.
    fn gershgorin(&self) -> (f64, f64) {
        let n = self.size();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Solve (T - shift I) x = b in place by elimination with a tiny-pivot
    /// guard; near-singular shifts amplify the matching eigendirection,
    /// which is exactly what inverse iteration wants.
    fn shifted_solve(&self, shift: f64, b: &mut [f64]) {
        let n = self.size();
        let guard = f64::MIN_POSITIVE.sqrt();
        let mut main: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
        for i in 0..n - 1 {
            if main[i].abs() < guard {
                main[i] = guard;
            }
            let factor = self.off[i] / main[i];
            main[i + 1] -= factor * self.off[i];
            b[i + 1] -= factor * b[i];
        }
        if main[n - 1].abs() < guard {
            main[n - 1] = guard;
        }
        b[n - 1] /= main[n - 1];
        for i in (0..n - 1).rev() {
            b[i] = (b[i] - self.off[i] * b[i + 1]) / main[i];
        }
    }

    /// Largest eigenvalue and its unit eigenvector. Bisection on the Sturm
    /// count pins the eigenvalue to machine precision; a few rounds of
    /// inverse iteration recover the eigenvector; the residual is checked
    /// against tol before returning.
    pub fn leading_eigenpair(&self, tol: f64) -> Result<(f64, Vec<f64>)> {
        let n = self.size();
        let (glo, ghi) = self.gershgorin();
        let margin = 1e-8 * (1.0 + ghi.abs());
        let mut lo = glo - margin;
        let mut hi = ghi + margin;
        for _ in 0..200 {
            let width = hi - lo;
            if width <= f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.sturm_count(mid) >= n {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);

        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut best_residual = f64::INFINITY;
        for _ in 0..5 {
            self.shifted_solve(lambda, &mut v);
            let s = norm(&v);
            v.iter_mut().for_each(|x| *x /= s);
            let tv = self.matvec(&v);
            best_residual = tv
                .iter()
                .zip(&v)
                .map(|(t, x)| (t - lambda * x).abs())
                .fold(0.0, f64::max);
            if best_residual <= tol * (1.0 + lambda.abs()) {
                break;
            }
        }
        if best_residual > tol * (1.0 + lambda.abs()) {
            return Err(Error::EigensolverNoConvergence {
                residual: best_residual,
                tol,
            });
        }
        // Deterministic sign: the largest-magnitude component is positive.
        // For the nonnegative fidelity matrices this makes the whole
        // Perron vector positive.
        let lead = v
            .iter()
            .cloned()
            .fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        Ok((lambda, v))
    }
}

/// Fidelity matrix M for N spins, indexed by total-spin classes in
/// descending order. Rows: the stretched class J = N/2 couples to itself
/// with weight J/(J+1) and to the next class with 1/sqrt(2J+1); interior
/// classes saturate their multiplicity budget and contribute unit weights;
/// the last class contributes 1 when j_min = 1/2 and 0 when j_min = 0.
pub fn fidelity_matrix(n_spins: u32) -> Result<TridiagonalSymmetric> {
    if n_spins < 2 {
        return Err(Error::SpinCountTooSmall { n_spins, min: 2 });
    }
    let k = n_spins as usize / 2 + 1;
    let nf = f64::from(n_spins);
    let mut diag = vec![1.0; k];
    diag[0] = nf / (nf + 2.0);
    diag[k - 1] = f64::from(n_spins % 2);
    let mut off = vec![1.0; k - 1];
    off[0] = 1.0 / (nf + 1.0).sqrt();
    TridiagonalSymmetric::new(diag, off, classes_for(n_spins)?)
}

/// M with its stretched row and column removed. Its leading eigenvalue has
/// the closed form sigma(N) and sandwiches the full spectrum.
pub fn truncated_matrix(n_spins: u32) -> Result<TridiagonalSymmetric> {
    if n_spins < 4 {
        return Err(Error::SpinCountTooSmall { n_spins, min: 4 });
    }
    let k = n_spins as usize / 2;
    let mut diag = vec![1.0; k];
    diag[k - 1] = f64::from(n_spins % 2);
    let off = vec![1.0; k - 1];
    let labels = classes_for(n_spins)?[1..].to_vec();
    TridiagonalSymmetric::new(diag, off, labels)
}

/// Closed form for the leading eigenvalue of the truncated matrix:
/// sigma(N) = 1 + 2 cos(2 pi / (N + 1)).
pub fn sigma_closed_form(n_spins: u32) -> Result<f64> {
    if n_spins < 1 {
        return Err(Error::SpinCountTooSmall { n_spins, min: 1 });
    }
    Ok(1.0 + 2.0 * (2.0 * PI / (f64::from(n_spins) + 1.0)).cos())
}

/// Large-N limit of the average alignment error: 8 pi^2 / N^2.
pub fn asymptotic_error(n_spins: u32) -> Result<f64> {
    if n_spins < 1 {
        return Err(Error::SpinCountTooSmall { n_spins, min: 1 });
    }
    Ok(8.0 * PI * PI / f64::from(n_spins).powi(2))
}

/// Optimal signal-state weights for N spins. `coefficients[i]` is the
/// amplitude on `classes[i]`; the vector has unit norm and every entry is
/// strictly positive.
#[derive(Debug, Clone, Serialize)]
pub struct OptimalProtocol {
    pub n_spins: u32,
    pub lambda: f64,
    pub coefficients: Vec<f64>,
    pub classes: Vec<HalfInt>,
}

impl OptimalProtocol {
    /// Average transmission error 6 - 2 lambda.
    pub fn average_error(&self) -> f64 {
        6.0 - 2.0 * self.lambda
    }
}

/// Maximize the average fidelity over signal states: the leading eigenpair
/// of the fidelity matrix.
pub fn optimal_protocol(n_spins: u32) -> Result<OptimalProtocol> {
    let m = fidelity_matrix(n_spins)?;
    let (lambda, coefficients) = m.leading_eigenpair(1e-12)?;
    let classes = m.row_labels().to_vec();
    Ok(OptimalProtocol {
        n_spins,
        lambda,
        coefficients,
        classes,
    })
}
