//! Dense density operators for the class and the spectral PPT oracle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix, CVector};
use crate::types::{ClassParams, Tolerances};

/// An `n² × n²` operator on `H ⊗ H`; basis `|a⟩⊗|b⟩` sits at `(a-1)·n + (b-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    n: usize,
    mat: CMatrix,
}

impl DensityOperator {
    pub fn from_matrix(n: usize, mat: CMatrix) -> Result<Self> {
        if n < 2 || mat.nrows() != n * n || mat.ncols() != n * n {
            return Err(Error::BadShape(format!(
                "expected {0}x{0} matrix for n = {n}, got {1}x{2}",
                n * n,
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(DensityOperator { n, mat })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Entry `⟨a b| M |c d⟩` with 1-based local indices.
    pub fn entry(&self, a: usize, b: usize, c: usize, d: usize) -> Complex64 {
        let n = self.n;
        self.mat[((a - 1) * n + (b - 1), (c - 1) * n + (d - 1))]
    }
}

/// The unnormalized eigenvector `|X_l⟩ = Σ_j x_l^j |j⟩⊗|j+l-1⟩`.
pub fn term_vector(params: &ClassParams, l: i64) -> CVector {
    let n = params.n();
    let mut v = CVector::zeros(n * n);
    for j in 1..=n as i64 {
        let b = (j + l - 2).rem_euclid(n as i64) as usize;
        v[(j as usize - 1) * n + b] = params.x(l, j);
    }
    v
}

/// `ρ = Σ_l |X_l⟩⟨X_l|`.
pub fn build_rho(params: &ClassParams) -> DensityOperator {
    let n = params.n();
    let mut mat = CMatrix::zeros(n * n, n * n);
    for l in 1..=n as i64 {
        let v = term_vector(params, l);
        mat += &v * v.adjoint();
    }
    DensityOperator { n, mat }
}

/// Transpose on the first tensor factor: `((a,b),(c,d)) ↦ ((c,b),(a,d))`.
pub fn partial_transpose(rho: &DensityOperator) -> DensityOperator {
    DensityOperator {
        n: rho.n,
        mat: partial_transpose_matrix(&rho.mat, rho.n).expect("shape checked at construction"),
    }
}

/// [`partial_transpose`] on a bare matrix of side `n²`.
pub fn partial_transpose_matrix(mat: &CMatrix, n: usize) -> Result<CMatrix> {
    let dim = n * n;
    if mat.nrows() != dim || mat.ncols() != dim {
        return Err(Error::BadShape(format!(
            "partial transpose needs {dim}x{dim}, got {}x{}",
            mat.nrows(),
            mat.ncols()
        )));
    }
    Ok(CMatrix::from_fn(dim, dim, |row, col| {
        let (a, b) = (row / n, row % n);
        let (c, d) = (col / n, col % n);
        mat[(c * n + b, a * n + d)]
    }))
}

/// Full spectrum of `ρ^{T₁}` and the resulting PPT verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub min_eigenvalue: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub is_ppt: bool,
}

/// Eigensolve `ρ^{T₁}` directly; independent of the structural test.
pub fn spectral_ppt(params: &ClassParams, tol: &Tolerances) -> Result<SpectralReport> {
    let pt = partial_transpose(&build_rho(params));
    let eigenvalues = hermitian_eigenvalues(pt.matrix())?;
    let min_eigenvalue = eigenvalues[0];
    Ok(SpectralReport {
        min_eigenvalue,
        is_ppt: min_eigenvalue >= -tol.psd_tol,
        eigenvalues,
    })
}
