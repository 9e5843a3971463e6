//! Dense complex linear algebra used by the small-lattice oracles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// All eigenvalues of a square complex matrix, via the Schur form.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let schur = m.clone().schur();
    schur
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::NumericalFailure("Schur decomposition did not converge".into()))
}

/// Largest distance in an optimal-by-greedy pairing of two equally long
/// multisets of complex numbers.
pub fn multiset_distance(expected: &[Complex64], actual: &[Complex64]) -> Result<f64> {
    if expected.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            expected: expected.len(),
            found: actual.len(),
        });
    }
    let mut used = vec![false; actual.len()];
    let mut worst: f64 = 0.0;
    for e in expected {
        let (j, d) = actual
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, a)| (j, (a - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("lengths checked");
        used[j] = true;
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Distance from `z` to the nearest element of `set`.
pub fn nearest_distance(z: Complex64, set: &[Complex64]) -> f64 {
    set.iter()
        .map(|a| (a - z).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Unit eigenvector for an eigenvalue close to `mu`, by inverse iteration.
pub fn eigenvector_near(m: &DMatrix<Complex64>, mu: Complex64) -> Result<DVector<Complex64>> {
    let dim = m.nrows();
    // shifting slightly off the eigenvalue keeps the factorization regular
    let shift = mu + Complex64::new(1e-10, 1e-10);
    let lu = (m - DMatrix::<Complex64>::identity(dim, dim) * shift).lu();
    let mut v = DVector::from_fn(dim, |i, _| Complex64::new(1.0 + (i % 7) as f64 * 0.1, 0.3));
    v /= Complex64::new(v.norm(), 0.0);
    for _ in 0..6 {
        let w = lu
            .solve(&v)
            .ok_or_else(|| Error::NumericalFailure("singular shifted matrix".into()))?;
        let nrm = w.norm();
        if !nrm.is_finite() || nrm == 0.0 {
            return Err(Error::NumericalFailure("inverse iteration diverged".into()));
        }
        v = w / Complex64::new(nrm, 0.0);
    }
    Ok(v)
}

/// `‖M − I‖_max` for `M = U†U`.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let dim = u.nrows();
    (u.adjoint() * u - DMatrix::<Complex64>::identity(dim, dim)).camax()
}
