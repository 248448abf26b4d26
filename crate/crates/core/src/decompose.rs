//! Explicit separable decomposition of PPT instances.
//!
//! Mixing the spectral terms with `u_{kl} = e^{i((k-1)(l-1)·2π/n + δ_k)} / √n`
//! leaves `ρ` unchanged for any phases `δ`. When `δ` solves the cyclic
//! second-difference system `2δ_i - δ_{i+1} - δ_{i-1} ≡ θ_i (mod 2π)`, every
//! mixed vector `|Z_l⟩` has a rank-one coefficient matrix `B_l` and is
//! therefore a product vector.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{hermitian_eigen, kron_vec, CMatrix, CVector};
use crate::state::{build_rho, term_vector};
use crate::structure::{extract_theta, wrap_angle, ThetaData};
use crate::types::{ClassParams, Tolerances};

/// Phases `δ_1 … δ_n` of the mixing unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSolution {
    pub delta: Vec<f64>,
    /// Value pinned at `δ_1`; shifting it shifts every `δ_k` equally.
    pub free_constant: f64,
    /// Integer lift: the real system solved is `L δ = θ + 2π κ`.
    pub kappa: Vec<i64>,
}

/// Largest `|wrap(2δ_i - δ_{i+1} - δ_{i-1} - θ_i)|`.
pub fn congruence_residual(delta: &[f64], theta: &ThetaData) -> f64 {
    let n = delta.len();
    (0..n)
        .map(|i| {
            let second = 2.0 * delta[i] - delta[(i + 1) % n] - delta[(i + n - 1) % n];
            wrap_angle(second - theta.theta[i]).abs()
        })
        .fold(0.0, f64::max)
}

/// Solve the cyclic second-difference congruence with `δ_1 = free_constant`.
pub fn solve_delta(theta: &ThetaData, free_constant: f64, tol: &Tolerances) -> Result<DeltaSolution> {
    let n = theta.n();
    if n < 2 {
        return Err(Error::BadShape(format!("need n >= 2 angles, got {n}")));
    }
    let sum: f64 = theta.theta.iter().sum();
    let k = (sum / (2.0 * PI)).round();
    let defect = (sum - 2.0 * PI * k).abs();
    if defect > tol.residual_tol {
        return Err(Error::SumDefect { sum, defect });
    }
    let mut kappa = vec![0i64; n];
    kappa[0] = -(k as i64);
    let rhs: Vec<f64> = theta
        .theta
        .iter()
        .zip(&kappa)
        .map(|(t, &kk)| t + 2.0 * PI * kk as f64)
        .collect();

    // rows/columns 2..n of the cyclic Laplacian circ(2, -1, 0, …, 0, -1);
    // the column of δ_1 moves to the right-hand side
    let laplacian = |i: usize, j: usize| -> f64 {
        let mut v = if i == j { 2.0 } else { 0.0 };
        if (i + 1) % n == j {
            v -= 1.0;
        }
        if (j + 1) % n == i {
            v -= 1.0;
        }
        v
    };
    let m = n - 1;
    let reduced = DMatrix::from_fn(m, m, |r, c| laplacian(r + 1, c + 1));
    let b = nalgebra::DVector::from_fn(m, |r, _| rhs[r + 1] - laplacian(r + 1, 0) * free_constant);
    let tail = reduced
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::BadShape("reduced cyclic Laplacian is singular".into()))?;

    let mut delta = Vec::with_capacity(n);
    delta.push(free_constant);
    delta.extend(tail.iter().copied());

    let residual = congruence_residual(&delta, theta);
    if residual > tol.residual_tol {
        return Err(Error::SumDefect { sum, defect: residual });
    }
    Ok(DeltaSolution {
        delta,
        free_constant,
        kappa,
    })
}

/// `u_{kl} = e^{i((k-1)(l-1)·2π/n + δ_k)} / √n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingUnitary {
    pub u: CMatrix,
}

impl MixingUnitary {
    pub fn from_phases(delta: &[f64]) -> Self {
        let n = delta.len();
        let omega = 2.0 * PI / n as f64;
        let scale = (n as f64).sqrt().recip();
        let u = CMatrix::from_fn(n, n, |k, l| {
            // reduce (k-1)(l-1) mod n before scaling to keep the angle small
            let power = ((k * l) % n) as f64;
            Complex64::from_polar(scale, power * omega + delta[k])
        });
        MixingUnitary { u }
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    /// `‖U†U - I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.n();
        (self.u.adjoint() * &self.u - CMatrix::identity(n, n)).norm()
    }
}

pub fn build_unitary(delta: &DeltaSolution) -> MixingUnitary {
    MixingUnitary::from_phases(&delta.delta)
}

/// `B_l[r][s] = u_{s-r+1, l} · x_{s-r+1}^r`, checked against `Σ_k u_{kl} |X_k⟩`.
pub fn compute_b(params: &ClassParams, unitary: &MixingUnitary, tol: &Tolerances) -> Result<Vec<CMatrix>> {
    let n = params.n();
    if unitary.n() != n {
        return Err(Error::BadShape(format!(
            "unitary is {0}x{0}, instance has n = {n}",
            unitary.n()
        )));
    }
    let terms: Vec<CVector> = (1..=n as i64).map(|k| term_vector(params, k)).collect();
    let mut out = Vec::with_capacity(n);
    for l in 0..n {
        let b = CMatrix::from_fn(n, n, |r, s| {
            let k = (s + n - r) % n;
            unitary.u[(k, l)] * params.x(k as i64 + 1, r as i64 + 1)
        });
        let mut direct = CVector::zeros(n * n);
        for (k, x) in terms.iter().enumerate() {
            direct.axpy(unitary.u[(k, l)], x, Complex64::new(1.0, 0.0));
        }
        let flat = CVector::from_iterator(n * n, b.transpose().iter().copied());
        let residual = (&flat - &direct).norm();
        let scale = direct.norm().max(f64::MIN_POSITIVE);
        if residual > tol.residual_tol * scale {
            return Err(Error::MixIdentityViolated { l: l + 1, residual });
        }
        out.push(b);
    }
    Ok(out)
}

/// Best rank-one approximation `B ≈ φ ψᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOne {
    /// Left factor, carrying the singular value.
    pub phi: CVector,
    pub psi: CVector,
    /// `‖B - φψᵀ‖_F / ‖B‖_F`.
    pub residual: f64,
}

/// Rank-one factor from the dominant singular triple.
///
/// The left singular vector is the top eigenvector of `B B†`; the right one
/// follows as `B† u / σ`. nalgebra's complex SVD loses accuracy on
/// rank-deficient input, so it is not used here.
pub fn factor_rank1(b: &CMatrix) -> Result<RankOne> {
    let gram = b * b.adjoint();
    let eig = hermitian_eigen(&gram)?;
    let top = eig.eigenvalues.argmax().0;
    let u: CVector = eig.eigenvectors.column(top).into_owned();
    // σ v = B† u, so φ ψᵀ = σ u · conj(v)ᵀ = u (B† u)†
    let sigma_v: CVector = b.adjoint() * &u;
    let sigma = sigma_v.norm();
    let phi = &u * Complex64::new(sigma, 0.0);
    let psi: CVector = if sigma > 0.0 {
        sigma_v.map(|z| z.conj() / sigma)
    } else {
        CVector::zeros(b.ncols())
    };
    Ok(RankOne {
        residual: rank1_residual(b, &phi, &psi),
        phi,
        psi,
    })
}

/// Entrywise rank-one factor `φ_r = B[r][1]`, `ψ_s = B[1][s] / B[1][1]`.
///
/// Exact for exactly rank-one input with a nonzero corner entry; used only
/// as a cross-check on [`factor_rank1`].
pub fn factor_rank1_entrywise(b: &CMatrix) -> RankOne {
    let corner = b[(0, 0)];
    let phi: CVector = b.column(0).into_owned();
    let psi: CVector = b.row(0).transpose() / corner;
    RankOne {
        residual: rank1_residual(b, &phi, &psi),
        phi,
        psi,
    }
}

fn rank1_residual(b: &CMatrix, phi: &CVector, psi: &CVector) -> f64 {
    let norm = b.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (b - phi * psi.transpose()).norm() / norm
}

/// One product term `p · |a⟩⟨a| ⊗ |b⟩⟨b|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub p: f64,
    pub a: CVector,
    pub b: CVector,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionResiduals {
    /// `‖Σ_l p_l (a_l a_l†)⊗(b_l b_l†) - ρ‖_F`.
    pub reconstruction: f64,
    /// Largest relative rank-one residual over the `B_l`.
    pub max_rank1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDecomposition {
    pub n: usize,
    pub terms: Vec<ProductTerm>,
    pub residuals: DecompositionResiduals,
    pub free_constant: f64,
}

/// Run the full pipeline: θ → δ → U → B_l → rank-one factors → verification.
pub fn decompose(params: &ClassParams, free_constant: f64, tol: &Tolerances) -> Result<SeparableDecomposition> {
    let theta = extract_theta(params, tol)?;
    let delta = solve_delta(&theta, free_constant, tol)?;
    let unitary = build_unitary(&delta);
    let bs = compute_b(params, &unitary, tol)?;

    let mut terms = Vec::with_capacity(bs.len());
    let mut max_rank1 = 0.0f64;
    for (l, b) in bs.iter().enumerate() {
        let f = factor_rank1(b)?;
        if f.residual > tol.residual_tol {
            return Err(Error::RankOneFailure {
                l: l + 1,
                residual: f.residual,
            });
        }
        max_rank1 = max_rank1.max(f.residual);
        terms.push(ProductTerm {
            p: b.norm_squared(),
            a: f.phi.normalize(),
            b: f.psi.normalize(),
        });
    }

    let mut decomp = SeparableDecomposition {
        n: params.n(),
        terms,
        residuals: DecompositionResiduals {
            reconstruction: f64::NAN,
            max_rank1,
        },
        free_constant,
    };
    let report = verify_decomposition(&decomp, params, tol);
    decomp.residuals.reconstruction = report.reconstruction;
    if !report.pass {
        return Err(Error::VerificationFailed(report.summary()));
    }
    Ok(decomp)
}

/// Outcome of checking a decomposition against its instance.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub reconstruction: f64,
    /// `Σ p_l - 1`.
    pub trace_defect: f64,
    /// Largest `|‖a_l‖ - 1|` or `|‖b_l‖ - 1|`.
    pub max_norm_defect: f64,
    pub min_weight: f64,
    pub term_count: usize,
    pub pass: bool,
}

impl VerificationReport {
    pub fn summary(&self) -> String {
        format!(
            "reconstruction {:e}, trace defect {:e}, norm defect {:e}, min weight {:e}, {} terms",
            self.reconstruction, self.trace_defect, self.max_norm_defect, self.min_weight, self.term_count
        )
    }
}

/// Rebuild `ρ` from the terms and, separately, from the instance; compare.
pub fn verify_decomposition(
    decomp: &SeparableDecomposition,
    params: &ClassParams,
    tol: &Tolerances,
) -> VerificationReport {
    let n = params.n();
    let dim = n * n;
    let rho = build_rho(params);
    let mut sum = CMatrix::zeros(dim, dim);
    let mut shape_ok = decomp.n == n && decomp.terms.len() == n;
    let mut max_norm_defect = 0.0f64;
    for t in &decomp.terms {
        if t.a.len() != n || t.b.len() != n {
            shape_ok = false;
            continue;
        }
        max_norm_defect = max_norm_defect
            .max((t.a.norm() - 1.0).abs())
            .max((t.b.norm() - 1.0).abs());
        let v = kron_vec(&t.a, &t.b);
        sum += (&v * v.adjoint()) * Complex64::new(t.p, 0.0);
    }
    let reconstruction = if shape_ok {
        (sum - rho.matrix()).norm()
    } else {
        f64::INFINITY
    };
    let trace_defect = decomp.terms.iter().map(|t| t.p).sum::<f64>() - 1.0;
    let min_weight = decomp.terms.iter().map(|t| t.p).fold(f64::INFINITY, f64::min);
    let pass = shape_ok
        && reconstruction <= tol.residual_tol
        && trace_defect.abs() <= tol.residual_tol
        && max_norm_defect <= tol.residual_tol
        && min_weight > 0.0;
    VerificationReport {
        reconstruction,
        trace_defect,
        max_norm_defect,
        min_weight,
        term_count: decomp.terms.len(),
        pass,
    }
}

/// One verified decomposition per gauge constant.
pub fn enumerate_gauge(
    params: &ClassParams,
    constants: &[f64],
    tol: &Tolerances,
    exec: Execution,
) -> Result<Vec<SeparableDecomposition>> {
    exec.map(constants, |&c| decompose(params, c, tol))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_ppt, gen_random, gen_uniform};
    use crate::state::spectral_ppt;
    use crate::structure::max_relative_minor;

    const FRAC_1_2SQRT2: f64 = 0.353_553_390_593_273_8;

    fn zero_theta(n: usize) -> ThetaData {
        ThetaData {
            theta: vec![0.0; n],
            consistency_residual: 0.0,
            sum_defect_k: 0,
        }
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_theta_gives_constant_delta() {
        let tol = Tolerances::default();
        let d = solve_delta(&zero_theta(5), 0.0, &tol).unwrap();
        assert!(d.delta.iter().all(|v| v.abs() < 1e-15));
        let d = solve_delta(&zero_theta(5), 0.7, &tol).unwrap();
        assert!(d.delta.iter().all(|v| (v - 0.7).abs() < 1e-14));
    }

    #[test]
    fn sum_defect_rejected() {
        let t = ThetaData {
            theta: vec![0.5, 0.1, 0.0],
            consistency_residual: 0.0,
            sum_defect_k: 0,
        };
        assert!(matches!(
            solve_delta(&t, 0.0, &Tolerances::default()),
            Err(Error::SumDefect { .. })
        ));
    }

    #[test]
    fn wrapped_theta_is_lifted() {
        // sums to 2π: needs κ_1 = -1
        let t = ThetaData {
            theta: vec![3.0, 3.0, 2.0 * PI - 6.0],
            consistency_residual: 0.0,
            sum_defect_k: 1,
        };
        let d = solve_delta(&t, 0.0, &Tolerances::default()).unwrap();
        assert_eq!(d.kappa, vec![-1, 0, 0]);
        assert!(congruence_residual(&d.delta, &t) < 1e-12);
    }

    #[test]
    fn solved_delta_satisfies_congruence_on_generated() {
        let tol = Tolerances::default();
        for n in 2..=12 {
            for seed in 0..5 {
                let t = extract_theta(&gen_ppt(n, seed), &tol).unwrap();
                let d = solve_delta(&t, 0.3, &tol).unwrap();
                assert!(congruence_residual(&d.delta, &t) <= 1e-9);
                assert_eq!(d.delta[0], 0.3);
            }
        }
    }

    #[test]
    fn fourier_unitary_n2() {
        let u = MixingUnitary::from_phases(&[0.0, 0.0]).u;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [h, h, h, -h];
        for (i, w) in want.iter().enumerate() {
            assert!((u[(i / 2, i % 2)] - c(*w)).norm() < 1e-15);
        }
    }

    #[test]
    fn unitary_for_any_phases() {
        for n in 2..=9 {
            assert!(MixingUnitary::from_phases(&vec![0.0; n]).unitarity_defect() < 1e-13);
            let phases: Vec<f64> = (0..n).map(|k| 0.37 * k as f64 - 1.0).collect();
            let u = MixingUnitary::from_phases(&phases);
            assert!(u.unitarity_defect() < 1e-13);
            // diag(e^{iδ}) · DFT / √n
            let dft = MixingUnitary::from_phases(&vec![0.0; n]).u;
            for k in 0..n {
                for l in 0..n {
                    let want = dft[(k, l)] * Complex64::from_polar(1.0, phases[k]);
                    assert!((u.u[(k, l)] - want).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn uniform_n2_b_matrices() {
        let p = gen_uniform(2);
        let u = MixingUnitary::from_phases(&[0.0, 0.0]);
        let bs = compute_b(&p, &u, &Tolerances::default()).unwrap();
        let s = FRAC_1_2SQRT2;
        let want1 = [s, s, s, s];
        let want2 = [s, -s, -s, s];
        for i in 0..4 {
            assert!((bs[0][(i / 2, i % 2)] - c(want1[i])).norm() < 1e-15);
            assert!((bs[1][(i / 2, i % 2)] - c(want2[i])).norm() < 1e-15);
        }
    }

    #[test]
    fn mixing_preserves_rho_for_any_phases() {
        let tol = Tolerances::default();
        for n in 2..=6 {
            let p = gen_random(n, n as u64);
            let phases: Vec<f64> = (0..n).map(|k| (k * k) as f64 * 0.9).collect();
            let bs = compute_b(&p, &MixingUnitary::from_phases(&phases), &tol).unwrap();
            let mut sum = CMatrix::zeros(n * n, n * n);
            for b in &bs {
                let v = CVector::from_iterator(n * n, b.transpose().iter().copied());
                sum += &v * v.adjoint();
            }
            assert!((sum - build_rho(&p).matrix()).norm() < 1e-12);
        }
    }

    #[test]
    fn solved_b_matrices_have_vanishing_minors() {
        let tol = Tolerances::default();
        for n in 2..=8 {
            for seed in 0..5 {
                let p = gen_ppt(n, seed);
                let d = solve_delta(&extract_theta(&p, &tol).unwrap(), 0.0, &tol).unwrap();
                for b in compute_b(&p, &build_unitary(&d), &tol).unwrap() {
                    assert!(max_relative_minor(&b) <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn rank1_examples() {
        let s = FRAC_1_2SQRT2;
        let ones = CMatrix::from_element(2, 2, c(s));
        let f = factor_rank1(&ones).unwrap();
        assert!(f.residual < 1e-15);
        assert!((f.phi[0] / f.phi[1] - c(1.0)).norm() < 1e-14);
        assert!((f.psi[0] / f.psi[1] - c(1.0)).norm() < 1e-14);

        let f = factor_rank1(&CMatrix::identity(2, 2)).unwrap();
        assert!((f.residual - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn rank1_svd_agrees_with_entrywise() {
        let tol = Tolerances::default();
        let p = gen_ppt(5, 8);
        let d = solve_delta(&extract_theta(&p, &tol).unwrap(), 0.0, &tol).unwrap();
        for b in compute_b(&p, &build_unitary(&d), &tol).unwrap() {
            let svd = factor_rank1(&b).unwrap();
            let entry = factor_rank1_entrywise(&b);
            assert!(svd.residual < 1e-12 && entry.residual < 1e-12);
            let outer_svd = &svd.phi * svd.psi.transpose();
            let outer_entry = &entry.phi * entry.psi.transpose();
            assert!((outer_svd - outer_entry).norm() < 1e-12 * b.norm());
        }
    }

    #[test]
    fn uniform_n2_decomposition_closed_form() {
        let d = decompose(&gen_uniform(2), 0.0, &Tolerances::default()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CVector::from_vec(vec![c(h), c(h)]);
        let minus = CVector::from_vec(vec![c(h), c(-h)]);
        for (t, want) in d.terms.iter().zip([&plus, &minus]) {
            assert!((t.p - 0.5).abs() < 1e-15);
            assert!((t.a.dotc(want).norm() - 1.0).abs() < 1e-14);
            assert!((t.b.dotc(want).norm() - 1.0).abs() < 1e-14);
        }
        assert!(d.residuals.reconstruction < 1e-15);
    }

    #[test]
    fn decompose_generated_instances() {
        let tol = Tolerances::default();
        for n in 2..=12 {
            for seed in 0..3 {
                let p = gen_ppt(n, seed);
                let d = decompose(&p, 0.0, &tol).unwrap();
                assert_eq!(d.terms.len(), n);
                let total: f64 = d.terms.iter().map(|t| t.p).sum();
                assert!((total - 1.0).abs() <= 1e-9);
                assert!(d.residuals.reconstruction <= 1e-9);
                assert!(d.residuals.max_rank1 <= 1e-9);
                assert!(spectral_ppt(&p, &tol).unwrap().is_ppt);
            }
        }
    }

    #[test]
    fn decompose_rejects_npt() {
        let a = c(0.45f64.sqrt());
        let b = c(0.05f64.sqrt());
        let w2 = ClassParams::validate(&[vec![a, a], vec![b, b]], &Tolerances::default()).unwrap();
        assert!(matches!(
            decompose(&w2, 0.0, &Tolerances::default()),
            Err(Error::NotPpt { .. })
        ));
    }

    #[test]
    fn tampered_decompositions_fail_verification() {
        let tol = Tolerances::default();
        let p = gen_ppt(3, 4);
        let good = decompose(&p, 0.0, &tol).unwrap();
        assert!(verify_decomposition(&good, &p, &tol).pass);

        let mut heavy = good.clone();
        heavy.terms[0].p += 0.01;
        let r = verify_decomposition(&heavy, &p, &tol);
        assert!(!r.pass);
        assert!((r.trace_defect - 0.01).abs() < 1e-9);

        let mut stretched = good.clone();
        stretched.terms[1].a *= c(1.1);
        let r = verify_decomposition(&stretched, &p, &tol);
        assert!(!r.pass);
        assert!((r.max_norm_defect - 0.1).abs() < 1e-9);

        let mut short = good;
        short.terms.pop();
        assert!(!verify_decomposition(&short, &p, &tol).pass);
    }

    #[test]
    fn gauge_enumeration() {
        let tol = Tolerances::default();
        let ds = enumerate_gauge(&gen_uniform(2), &[0.0, PI / 7.0], &tol, Execution::Sequential).unwrap();
        assert_eq!(ds.len(), 2);
        assert!(ds.iter().all(|d| d.residuals.reconstruction < 1e-12));

        let p = gen_ppt(3, 9);
        let same = enumerate_gauge(&p, &[1.5, 1.5], &tol, Execution::Parallel).unwrap();
        assert_eq!(same[0], same[1]);
        let three = enumerate_gauge(&p, &[0.0, 1.0, 2.0], &tol, Execution::Parallel).unwrap();
        assert!(three.iter().all(|d| verify_decomposition(d, &p, &tol).pass));
    }

    #[test]
    fn gauge_choice_leaves_residual_invariant() {
        let tol = Tolerances::default();
        let p = gen_ppt(6, 21);
        for cst in [-2.0, 0.0, 0.5, 3.0] {
            let d = decompose(&p, cst, &tol).unwrap();
            assert!(d.residuals.reconstruction <= 1e-9);
        }
    }
}
