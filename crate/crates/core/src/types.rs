//! Shared domain types: cyclic indices, tolerance policy and the validated
//! coefficient table that defines a state in the class.
//!
//! Every subscript and superscript is a 1-based residue in `{1, …, n}`.
//! Accessors take arbitrary signed integers and reduce them through [`cyc`],
//! so formulas such as `x_{m-(j-k)}^j` can be written without manual wrapping.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A 1-based residue class representative modulo `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CyclicIndex {
    value: usize,
    n: usize,
}

impl CyclicIndex {
    pub fn value(self) -> usize {
        self.value
    }

    pub fn n(self) -> usize {
        self.n
    }

    /// Zero-based position, for indexing storage.
    pub fn zero_based(self) -> usize {
        self.value - 1
    }
}

/// Reduce any integer to its representative in `{1, …, n}`.
///
/// # Panics
///
/// Panics if `n < 2`.
pub fn cyc(i: i64, n: usize) -> CyclicIndex {
    assert!(n >= 2, "cyclic modulus must be at least 2, got {n}");
    let value = (i - 1).rem_euclid(n as i64) as usize + 1;
    CyclicIndex { value, n }
}

/// Numerical tolerance policy shared by every check in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Entries with magnitude at or below this are treated as zero.
    pub zero_threshold: f64,
    /// Relative tolerance for identities (minor relations, reconstructions).
    pub residual_tol: f64,
    /// Absolute slack on a minimum eigenvalue before it counts as negative.
    pub psd_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero_threshold: 1e-12,
            residual_tol: 1e-9,
            psd_tol: 1e-10,
        }
    }
}

impl Tolerances {
    /// Default policy with `residual_tol` replaced.
    pub fn with_residual_tol(residual_tol: f64) -> Result<Self> {
        let tol = Tolerances {
            residual_tol,
            ..Tolerances::default()
        };
        tol.check()?;
        Ok(tol)
    }

    pub fn check(&self) -> Result<()> {
        let all_positive = [self.zero_threshold, self.residual_tol, self.psd_tol]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0);
        if !all_positive {
            return Err(Error::BadTolerances(format!(
                "all tolerances must be finite and positive: {self:?}"
            )));
        }
        if self.residual_tol <= self.zero_threshold {
            return Err(Error::BadTolerances(format!(
                "residual_tol {} must exceed zero_threshold {}",
                self.residual_tol, self.zero_threshold
            )));
        }
        Ok(())
    }
}

/// Validated coefficient table `x_l^j` of a state in the class.
///
/// Row `l` is the spectral-term index and column `j` the component index.
/// The derived views `lambda[l] = Σ_j |x_l^j|²` and `v_l^j = x_l^j / √λ_l`
/// are computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassParams {
    n: usize,
    x: Vec<Complex64>,
    lambda: Vec<f64>,
    label: Option<String>,
}

impl ClassParams {
    /// Validate a raw `n × n` table against the class assumptions.
    pub fn validate(table: &[Vec<Complex64>], tol: &Tolerances) -> Result<Self> {
        let n = table.len();
        if n < 2 {
            return Err(Error::BadShape(format!("need n >= 2, got {n} rows")));
        }
        if let Some((row, len)) = table
            .iter()
            .enumerate()
            .find_map(|(i, r)| (r.len() != n).then_some((i, r.len())))
        {
            return Err(Error::BadShape(format!(
                "row {} has {len} entries, expected {n}",
                row + 1
            )));
        }
        let mut x = Vec::with_capacity(n * n);
        for (l, row) in table.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite(format!("x_{}^{} = {z}", l + 1, j + 1)));
                }
                let magnitude = z.norm();
                if magnitude <= tol.zero_threshold {
                    return Err(Error::ZeroEntry {
                        l: l + 1,
                        j: j + 1,
                        magnitude,
                    });
                }
                x.push(*z);
            }
        }
        let lambda: Vec<f64> = x.chunks(n).map(|r| r.iter().map(|z| z.norm_sqr()).sum()).collect();
        let total: f64 = lambda.iter().sum();
        if (total - 1.0).abs() > tol.residual_tol {
            return Err(Error::BadTrace { total });
        }
        if let Some((l, &lam)) = lambda.iter().enumerate().find(|(_, &lam)| !(lam > 0.0 && lam < 1.0)) {
            return Err(Error::BadLambda { l: l + 1, lambda: lam });
        }
        Ok(ClassParams {
            n,
            x,
            lambda,
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// `x_l^j` with both indices reduced cyclically.
    #[inline]
    pub fn x(&self, l: i64, j: i64) -> Complex64 {
        let n = self.n as i64;
        let l0 = (l - 1).rem_euclid(n) as usize;
        let j0 = (j - 1).rem_euclid(n) as usize;
        self.x[l0 * self.n + j0]
    }

    /// `λ_l`, cyclically indexed.
    pub fn lambda(&self, l: i64) -> f64 {
        self.lambda[cyc(l, self.n).zero_based()]
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    /// `v_l^j = x_l^j / √λ_l`.
    pub fn v(&self, l: i64, j: i64) -> Complex64 {
        self.x(l, j) / self.lambda(l).sqrt()
    }

    /// The table as nested rows, `rows()[l-1][j-1] = x_l^j`.
    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.x.chunks(self.n).map(<[Complex64]>::to_vec).collect()
    }

    /// Row-major storage, `as_slice()[(l-1)*n + (j-1)] = x_l^j`.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.x
    }
}

/// Scale a raw table by the positive constant that makes `Σ |x_l^j|² = 1`.
///
/// Validation never rescales on its own; callers opt in here.
pub fn renormalize(table: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let total: f64 = table.iter().flatten().map(|z| z.norm_sqr()).sum();
    let scale = total.sqrt().recip();
    table
        .iter()
        .map(|row| row.iter().map(|z| z * scale).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn real_table(rows: &[&[f64]]) -> Vec<Vec<Complex64>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            .collect()
    }

    #[test]
    fn cyc_examples() {
        assert_eq!(cyc(5, 5).value(), 5);
        assert_eq!(cyc(-1, 2).value(), 1);
        assert_eq!(cyc(7, 5).value(), 2);
        assert_eq!(cyc(0, 3).value(), 3);
        assert_eq!(cyc(-7, 3).value(), 2);
    }

    #[test]
    #[should_panic]
    fn cyc_rejects_small_modulus() {
        cyc(1, 1);
    }

    #[test]
    fn uniform_n2_accepted() {
        let p = ClassParams::validate(&real_table(&[&[0.5, 0.5], &[0.5, 0.5]]), &Tolerances::default()).unwrap();
        assert_relative_eq!(p.lambda(1), 0.5, epsilon = 1e-15);
        assert_relative_eq!(p.lambda(2), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn w2_lambdas() {
        let a = 0.45f64.sqrt();
        let b = 0.05f64.sqrt();
        let p = ClassParams::validate(&real_table(&[&[a, a], &[b, b]]), &Tolerances::default()).unwrap();
        assert_relative_eq!(p.lambda(1), 0.9, epsilon = 1e-15);
        assert_relative_eq!(p.lambda(2), 0.1, epsilon = 1e-15);
        assert_relative_eq!(p.v(1, 2).re, 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn zero_entry_rejected() {
        let t = real_table(&[&[0.0, 0.5f64.sqrt()], &[0.5, 0.5]]);
        assert!(matches!(
            ClassParams::validate(&t, &Tolerances::default()),
            Err(Error::ZeroEntry { l: 1, j: 1, .. })
        ));
    }

    #[test]
    fn bad_trace_rejected() {
        let t = real_table(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(
            ClassParams::validate(&t, &Tolerances::default()),
            Err(Error::BadTrace { .. })
        ));
    }

    #[test]
    fn bad_shape_rejected() {
        let tol = Tolerances::default();
        assert!(matches!(
            ClassParams::validate(&real_table(&[&[1.0]]), &tol),
            Err(Error::BadShape(_))
        ));
        assert!(matches!(
            ClassParams::validate(&real_table(&[&[0.5, 0.5], &[0.5]]), &tol),
            Err(Error::BadShape(_))
        ));
    }

    #[test]
    fn lambda_one_rejected() {
        // row 1 sums to 1.0 in floating point; row 2 is tiny but above the zero threshold
        let t = real_table(&[&[0.6, 0.8], &[1.0001e-12, 1.0001e-12]]);
        let err = ClassParams::validate(&t, &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::BadLambda { l: 1, .. }), "{err:?}");
    }

    #[test]
    fn non_finite_rejected() {
        let t = vec![
            vec![Complex64::new(f64::NAN, 0.0), Complex64::new(0.5, 0.0)],
            vec![Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)],
        ];
        assert!(matches!(
            ClassParams::validate(&t, &Tolerances::default()),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn tolerance_policy_checked() {
        assert!(Tolerances::default().check().is_ok());
        assert!(Tolerances::with_residual_tol(1e-13).is_err());
        assert!(Tolerances::with_residual_tol(-1.0).is_err());
        assert!(Tolerances::with_residual_tol(1e-6).is_ok());
    }

    #[test]
    fn renormalize_fixes_trace() {
        let t = renormalize(&real_table(&[&[1.0, 2.0], &[3.0, 4.0]]));
        assert!(ClassParams::validate(&t, &Tolerances::default()).is_ok());
    }

    proptest! {
        #[test]
        fn cyc_is_additive_and_periodic(a in -1000i64..1000, b in -1000i64..1000, n in 2usize..20) {
            let lhs = cyc(a + b, n);
            let rhs = cyc(cyc(a, n).value() as i64 + cyc(b, n).value() as i64, n);
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(cyc(a + n as i64, n), cyc(a, n));
            let once = cyc(a, n);
            prop_assert_eq!(cyc(once.value() as i64, n), once);
        }

        #[test]
        fn lambda_and_v_reproduce_x(
            raw in proptest::collection::vec((0.2f64..1.0, -std::f64::consts::PI..std::f64::consts::PI), 9)
        ) {
            let table: Vec<Vec<Complex64>> = raw
                .chunks(3)
                .map(|r| r.iter().map(|&(m, a)| Complex64::from_polar(m, a)).collect())
                .collect();
            let p = ClassParams::validate(&renormalize(&table), &Tolerances::default()).unwrap();
            let s: f64 = p.lambdas().iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
            for l in 1..=3 {
                for j in 1..=3 {
                    let back = p.v(l, j) * p.lambda(l).sqrt();
                    prop_assert!((back - p.x(l, j)).norm() < 1e-12);
                }
            }
        }
    }
}
