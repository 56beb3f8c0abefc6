//! Dense complex helpers shared by the projector and measurement code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative eigenvalue threshold used for rank decisions.
pub const RANK_THRESHOLD: f64 = 1e-8;

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `tr(A B)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    assert_eq!(a.ncols(), b.nrows());
    assert_eq!(a.nrows(), b.ncols());
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    frobenius(&(m - m.adjoint()))
}

pub fn idempotence_residual(m: &CMatrix) -> f64 {
    frobenius(&(m * m - m))
}

/// Max over entries of `|U U† - 1|`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let prod = m * m.adjoint();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

/// Rounds `x` to the nearest integer, failing if the residue exceeds `tol`.
pub fn snap_integer(x: f64, tol: f64, what: &str) -> Result<i64> {
    let r = x.round();
    if (x - r).abs() > tol {
        return Err(Error::Numerical(format!(
            "{what} = {x} is not within {tol:e} of an integer"
        )));
    }
    Ok(r as i64)
}

/// Kronecker product of a nonempty list of matrices, left factor most significant.
pub fn kron_all(mats: &[&CMatrix]) -> CMatrix {
    let mut it = mats.iter();
    let first = it.next().expect("kron_all needs at least one factor");
    it.fold((*first).clone(), |acc, m| acc.kronecker(m))
}

/// Spectrum of a Hermitian positive semidefinite operator with a rank decision.
#[derive(Clone, Debug)]
pub struct RankedSpectrum {
    pub rank: usize,
    pub threshold: f64,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl RankedSpectrum {
    /// Orthogonal projector onto the span of eigenvectors above threshold.
    pub fn range_projector(&self) -> CMatrix {
        let n = self.eigenvectors.nrows();
        let keep: Vec<usize> = (0..self.eigenvalues.len())
            .filter(|&i| self.eigenvalues[i].abs() > self.threshold)
            .collect();
        let mut basis = CMatrix::zeros(n, keep.len());
        for (c, &i) in keep.iter().enumerate() {
            basis.set_column(c, &self.eigenvectors.column(i));
        }
        &basis * basis.adjoint()
    }
}

/// Rank of a Hermitian matrix by eigenvalue thresholding.
///
/// Eigenvalues with `|λ| > rel · λ_max` count toward the rank. An eigenvalue
/// within a factor of ten of the threshold makes the decision ambiguous and
/// is reported as a numerical failure, together with the offending spectrum.
pub fn hermitian_rank(m: &CMatrix, rel: f64) -> Result<RankedSpectrum> {
    let eig = SymmetricEigen::new(m.clone());
    rank_from_eigen(eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors, rel)
}

/// Same decision as [`hermitian_rank`] against an externally fixed scale.
pub fn hermitian_rank_with_scale(m: &CMatrix, rel: f64, scale: f64) -> Result<usize> {
    let eig = SymmetricEigen::new(m.clone());
    let threshold = rel * scale;
    classify(eig.eigenvalues.as_slice(), threshold)
}

fn rank_from_eigen(eigenvalues: Vec<f64>, eigenvectors: CMatrix, rel: f64) -> Result<RankedSpectrum> {
    let lmax = eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let threshold = rel * lmax;
    let rank = if lmax == 0.0 {
        0
    } else {
        classify(&eigenvalues, threshold)?
    };
    Ok(RankedSpectrum {
        rank,
        threshold,
        eigenvalues,
        eigenvectors,
    })
}

fn classify(eigenvalues: &[f64], threshold: f64) -> Result<usize> {
    let ambiguous: Vec<f64> = eigenvalues
        .iter()
        .copied()
        .filter(|l| l.abs() > threshold / 10.0 && l.abs() < threshold * 10.0)
        .collect();
    if !ambiguous.is_empty() && threshold > 0.0 {
        let mut spectrum: Vec<f64> = eigenvalues.to_vec();
        spectrum.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        return Err(Error::Numerical(format!(
            "ambiguous rank: eigenvalues {ambiguous:?} lie within a factor of 10 of threshold {threshold:e}; spectrum (by magnitude) = {spectrum:?}"
        )));
    }
    Ok(eigenvalues.iter().filter(|l| l.abs() > threshold).count())
}

/// Unit vector with independent standard complex Gaussian amplitudes.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let mut v = CVector::from_fn(dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let n = v.norm();
    v.unscale_mut(n);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_diagonal_projector() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, ZERO, ONE, ZERO]));
        let s = hermitian_rank(&m, RANK_THRESHOLD).unwrap();
        assert_eq!(s.rank, 2);
        assert!(frobenius(&(s.range_projector() - &m)) < 1e-12);
    }

    #[test]
    fn ambiguous_spectrum_is_rejected() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            ONE,
            Complex64::new(1e-8, 0.0),
        ]));
        assert!(matches!(hermitian_rank(&m, RANK_THRESHOLD), Err(Error::Numerical(_))));
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let s = hermitian_rank(&CMatrix::zeros(3, 3), RANK_THRESHOLD).unwrap();
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_integer(3.0000000001, 1e-6, "x").unwrap(), 3);
        assert!(snap_integer(2.5, 1e-6, "x").is_err());
    }
}
