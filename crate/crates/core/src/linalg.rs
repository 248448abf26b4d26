//! Thin helpers over nalgebra for the dense complex matrices used throughout.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const EIG_MAX_ITER: usize = 100_000;

/// Eigen-decomposition of a Hermitian matrix; only the lower triangle is read.
pub fn hermitian_eigen(m: &CMatrix) -> Result<SymmetricEigen<Complex64, nalgebra::Dyn>> {
    let dim = m.nrows();
    m.clone()
        .try_symmetric_eigen(f64::EPSILON, EIG_MAX_ITER)
        .ok_or(Error::EigensolverFailure { dim })
}

/// Eigenvalues of a Hermitian matrix, sorted ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let mut ev: Vec<f64> = hermitian_eigen(m)?.eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Largest |a_i - b_i| between two equally long sorted lists.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

/// Largest |m_ij - conj(m_ji)|.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Kronecker product of two column vectors, `(a ⊗ b)[r*n + s] = a[r] b[s]`.
pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let nb = b.len();
    CVector::from_fn(a.len() * nb, |i, _| a[i / nb] * b[i % nb])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_pauli_x() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_eigenvalues() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let i = Complex64::i();
        let two = Complex64::new(2.0, 0.0);
        let m = CMatrix::from_row_slice(2, 2, &[two, i, -i, two]);
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_reconstructs_rank_deficient_complex_matrix() {
        // rank 2 in dimension 6, the shape of the operators used in this crate
        let a = CVector::from_fn(6, |i, _| Complex64::from_polar(0.3 + 0.1 * i as f64, 0.7 * i as f64));
        let b = CVector::from_fn(6, |i, _| Complex64::from_polar(1.0 - 0.1 * i as f64, -1.3 * i as f64));
        let m = &a * a.adjoint() + &b * b.adjoint() * Complex64::new(0.5, 0.0);
        let eig = hermitian_eigen(&m).unwrap();
        let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|v| Complex64::new(v, 0.0)));
        let recon = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
        assert!((recon - &m).norm() < 1e-13 * m.norm());
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!(ev[..4].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn kron_ordering() {
        let a = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]);
        let b = CVector::from_vec(vec![Complex64::new(3.0, 0.0), Complex64::new(5.0, 0.0)]);
        let k: Vec<f64> = kron_vec(&a, &b).iter().map(|z| z.re).collect();
        assert_eq!(k, vec![3.0, 5.0, 6.0, 10.0]);
    }
}
