//! Structural PPT test.
//!
//! The quadratic form `⟨Y|ρ^{T₁}|Y⟩` splits into `n` independent Hermitian
//! blocks `A_m` with entries `A_m[j][k] = x_l^j · conj(x_l^k)`, `l = m - j - k`
//! (mod n). The state is PPT exactly when every `A_m` is rank one, i.e. all
//! 2×2 minors vanish. For PPT states the phases of the ratios in
//! `x_m^j x_m^k e^{iθ} = x_{m+(k-j)}^j x_{m-(k-j)}^k` depend only on `k - j`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, max_abs_diff, CMatrix};
use crate::state::{build_rho, partial_transpose};
use crate::types::{cyc, ClassParams, CyclicIndex, Tolerances};

/// One block `A_m` of the partially transposed quadratic form.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureMatrix {
    pub m: CyclicIndex,
    pub a: CMatrix,
}

pub fn assemble_a(params: &ClassParams, m: CyclicIndex) -> StructureMatrix {
    let n = params.n();
    let mi = m.value() as i64;
    let a = CMatrix::from_fn(n, n, |j0, k0| {
        let (j, k) = (j0 as i64 + 1, k0 as i64 + 1);
        let l = mi - j - k;
        params.x(l, j) * params.x(l, k).conj()
    });
    StructureMatrix { m, a }
}

pub fn assemble_all(params: &ClassParams) -> Vec<StructureMatrix> {
    let n = params.n();
    (1..=n as i64).map(|m| assemble_a(params, cyc(m, n))).collect()
}

/// Location of a 2×2 minor: block `m`, rows `(j, k)`, columns `(p, q)`, all 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinorWitness {
    pub m: usize,
    pub j: usize,
    pub k: usize,
    pub p: usize,
    pub q: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuralReport {
    pub is_ppt: bool,
    pub max_minor_residual: f64,
    /// Largest violated minor; `None` when every minor is within tolerance.
    pub worst_witness: Option<MinorWitness>,
    /// Smallest eigenvalue of each `A_m`, a redundant check on the verdict.
    pub per_m_min_eig: Vec<f64>,
}

/// Relative residual of the minor rows `(j,k)`, columns `(p,q)` (0-based).
#[inline]
fn minor_residual(a: &CMatrix, j: usize, k: usize, p: usize, q: usize) -> f64 {
    let lhs = a[(j, p)] * a[(k, q)];
    let rhs = a[(j, q)] * a[(k, p)];
    let scale = lhs.norm().max(rhs.norm());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).norm() / scale
    }
}

/// Largest relative 2×2 minor residual of one matrix, with its location.
fn worst_minor(a: &CMatrix) -> (f64, (usize, usize, usize, usize)) {
    let n = a.nrows();
    let mut worst = (0.0, (0, 1, 0, 1));
    for j in 0..n {
        for k in j + 1..n {
            for p in 0..n {
                for q in p + 1..n {
                    let r = minor_residual(a, j, k, p, q);
                    if r > worst.0 {
                        worst = (r, (j, k, p, q));
                    }
                }
            }
        }
    }
    worst
}

/// Largest relative 2×2 minor residual of any square matrix.
pub fn max_relative_minor(a: &CMatrix) -> f64 {
    worst_minor(a).0
}

/// Evaluate every 2×2 minor of every `A_m`.
pub fn check_minor_relations(params: &ClassParams, tol: &Tolerances) -> Result<StructuralReport> {
    let mut max_minor_residual = 0.0;
    let mut worst_at = None;
    let mut per_m_min_eig = Vec::with_capacity(params.n());
    for block in assemble_all(params) {
        let (r, (j, k, p, q)) = worst_minor(&block.a);
        if r > max_minor_residual {
            max_minor_residual = r;
            worst_at = Some(MinorWitness {
                m: block.m.value(),
                j: j + 1,
                k: k + 1,
                p: p + 1,
                q: q + 1,
            });
        }
        per_m_min_eig.push(hermitian_eigenvalues(&block.a)?[0]);
    }
    let is_ppt = max_minor_residual <= tol.residual_tol;
    Ok(StructuralReport {
        is_ppt,
        max_minor_residual,
        worst_witness: if is_ppt { None } else { worst_at },
        per_m_min_eig,
    })
}

/// Largest relative defect of the three-index identity
/// `A[i][j]·A[j][k]·A[k][i] = A[i][i]·A[j][j]·A[k][k]` over all blocks.
///
/// Diagnostic only: it follows from the 2×2 minors vanishing.
pub fn triple_product_residual(params: &ClassParams) -> f64 {
    let n = params.n();
    let mut worst = 0.0f64;
    for block in assemble_all(params) {
        let a = &block.a;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let cycle = a[(i, j)] * a[(j, k)] * a[(k, i)];
                    let diag = a[(i, i)] * a[(j, j)] * a[(k, k)];
                    let scale = cycle.norm().max(diag.norm());
                    if scale > 0.0 {
                        worst = worst.max((cycle - diag).norm() / scale);
                    }
                }
            }
        }
    }
    worst
}

/// Reduce an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

/// Phase data of a PPT instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaData {
    /// `theta[m-1] = θ_m`, principal values in `(-π, π]`.
    pub theta: Vec<f64>,
    /// Largest angular spread of `θ_m` across base indices `j`.
    pub consistency_residual: f64,
    /// `k` with `Σ θ_m ≈ 2πk`.
    pub sum_defect_k: i64,
}

impl ThetaData {
    pub fn n(&self) -> usize {
        self.theta.len()
    }

    /// `θ_m`, cyclically indexed.
    pub fn theta(&self, m: i64) -> f64 {
        self.theta[cyc(m, self.n()).zero_based()]
    }

    /// Distance of `Σ θ_m` from the nearest multiple of 2π.
    pub fn sum_residual(&self) -> f64 {
        let s: f64 = self.theta.iter().sum();
        (s - 2.0 * PI * self.sum_defect_k as f64).abs()
    }
}

/// `arg(x_{m+s}^j x_{m-s}^{j+s} / (x_m^j x_m^{j+s}))`, the phase `θ_m^{j,j+s}`.
pub fn direct_theta(params: &ClassParams, m: i64, s: i64, j: i64) -> f64 {
    let num = params.x(m + s, j) * params.x(m - s, j + s);
    let den = params.x(m, j) * params.x(m, j + s);
    (num / den).arg()
}

/// Extract `θ_1 … θ_n`; requires the structural test to pass.
pub fn extract_theta(params: &ClassParams, tol: &Tolerances) -> Result<ThetaData> {
    let report = check_minor_relations(params, tol)?;
    if !report.is_ppt {
        return Err(Error::NotPpt {
            residual: report.max_minor_residual,
        });
    }
    extract_theta_unchecked(params, tol)
}

/// [`extract_theta`] without re-running the minor check.
pub(crate) fn extract_theta_unchecked(params: &ClassParams, tol: &Tolerances) -> Result<ThetaData> {
    let n = params.n() as i64;
    let mut theta = Vec::with_capacity(n as usize);
    let mut consistency_residual = 0.0f64;
    for m in 1..=n {
        let base = direct_theta(params, m, 1, 1);
        let mut spread = 0.0f64;
        for j in 2..=n {
            spread = spread.max(wrap_angle(direct_theta(params, m, 1, j) - base).abs());
        }
        if spread > tol.residual_tol {
            return Err(Error::InconsistentTheta {
                m: m as usize,
                deviation: spread,
            });
        }
        consistency_residual = consistency_residual.max(spread);
        theta.push(base);
    }
    let sum: f64 = theta.iter().sum();
    Ok(ThetaData {
        sum_defect_k: (sum / (2.0 * PI)).round() as i64,
        theta,
        consistency_residual,
    })
}

/// `θ_m^s = Σ_{|t|<s} (s - |t|) θ_{m+t}`, reduced to `(-π, π]`.
pub fn derive_theta_s(theta: &ThetaData, s: usize, m: CyclicIndex) -> Result<f64> {
    let max = theta.n() / 2;
    if s == 0 || s > max {
        return Err(Error::BadS { s, max });
    }
    if s == 1 {
        return Ok(theta.theta(m.value() as i64));
    }
    let s = s as i64;
    let m = m.value() as i64;
    let total: f64 = (-(s - 1)..s)
        .map(|t| (s - t.abs()) as f64 * theta.theta(m + t))
        .sum();
    Ok(wrap_angle(total))
}

/// Largest gap between the sorted spectrum of `ρ^{T₁}` and the sorted union
/// of the spectra of `A_1 … A_n`.
pub fn block_spectrum_gap(params: &ClassParams) -> Result<f64> {
    let pt = partial_transpose(&build_rho(params));
    let full = hermitian_eigenvalues(pt.matrix())?;
    let mut union = Vec::with_capacity(full.len());
    for block in assemble_all(params) {
        union.extend(hermitian_eigenvalues(&block.a)?);
    }
    union.sort_by(f64::total_cmp);
    Ok(max_abs_diff(&full, &union))
}

/// True when the spectrum of `ρ^{T₁}` is the union of the `A_m` spectra.
pub fn verify_block_decomposition(params: &ClassParams, tol: &Tolerances) -> Result<bool> {
    Ok(block_spectrum_gap(params)? <= tol.residual_tol)
}
