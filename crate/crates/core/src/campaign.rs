//! Fuzz campaign: structural vs. spectral agreement and pipeline soundness
//! over batches of generated instances.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::decompose::decompose;
use crate::error::Result;
use crate::exec::Execution;
use crate::generate::{GenSpec, Kind};
use crate::state::spectral_ppt;
use crate::structure::check_minor_relations;
use crate::types::Tolerances;

/// Structural residuals inside this open interval are borderline.
pub const RESIDUAL_BAND: (f64, f64) = (1e-11, 1e-7);
/// Negative minimum eigenvalues above `-EIG_BAND` (but below `-psd_tol`) are borderline.
pub const EIG_BAND: f64 = 1e-7;

/// Perturbation sizes cycled through by seed for `Kind::Perturbed`.
pub const EPSILON_LADDER: [f64; 7] = [1e-12, 1e-9, 1e-6, 1e-3, 0.1, 0.5, PI];

/// Generator spec for one campaign case; perturbed cases pick epsilon from the ladder.
pub fn case_spec(n: usize, kind: Kind, seed: u64) -> GenSpec {
    let spec = GenSpec::new(n, kind, seed);
    match kind {
        Kind::Perturbed => spec.with_epsilon(EPSILON_LADDER[(seed % EPSILON_LADDER.len() as u64) as usize]),
        _ => spec,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub spec: GenSpec,
    pub structural_ppt: bool,
    pub max_minor_residual: f64,
    pub spectral_ppt: bool,
    pub min_eigenvalue: f64,
    pub borderline: bool,
    /// Set when the structural test passed and the decomposition was attempted.
    pub decomposed: Option<bool>,
    pub failure: Option<String>,
}

impl CaseOutcome {
    pub fn agrees(&self) -> bool {
        self.structural_ppt == self.spectral_ppt
    }
}

/// True when either verdict sits too close to its threshold to be compared.
pub fn in_tolerance_band(max_minor_residual: f64, min_eigenvalue: f64, tol: &Tolerances) -> bool {
    let residual_band = max_minor_residual > RESIDUAL_BAND.0 && max_minor_residual < RESIDUAL_BAND.1;
    let eig_band = min_eigenvalue > -EIG_BAND && min_eigenvalue < -tol.psd_tol;
    residual_band || eig_band
}

/// Run both PPT tests on one instance and, if structurally PPT, decompose it.
pub fn evaluate_case(spec: &GenSpec, tol: &Tolerances) -> Result<CaseOutcome> {
    let params = spec.generate()?;
    let structural = check_minor_relations(&params, tol)?;
    let spectral = spectral_ppt(&params, tol)?;
    let borderline = in_tolerance_band(structural.max_minor_residual, spectral.min_eigenvalue, tol);

    let mut failure = None;
    if !borderline && structural.is_ppt != spectral.is_ppt {
        failure = Some(format!(
            "verdicts disagree: structural {} (residual {:e}), spectral {} (min eigenvalue {:e})",
            structural.is_ppt, structural.max_minor_residual, spectral.is_ppt, spectral.min_eigenvalue
        ));
    }
    if spec.kind == Kind::Ppt && !structural.is_ppt {
        failure.get_or_insert(format!(
            "generated PPT instance failed the structural test (residual {:e})",
            structural.max_minor_residual
        ));
    }
    let decomposed = structural.is_ppt.then(|| match decompose(&params, 0.0, tol) {
        Ok(_) => {
            if !spectral.is_ppt && !borderline {
                failure.get_or_insert(format!(
                    "decomposed but spectral oracle reports min eigenvalue {:e}",
                    spectral.min_eigenvalue
                ));
            }
            true
        }
        Err(e) => {
            if !borderline {
                failure.get_or_insert(format!("decomposition failed: {e}"));
            }
            false
        }
    });

    Ok(CaseOutcome {
        spec: spec.clone(),
        structural_ppt: structural.is_ppt,
        max_minor_residual: structural.max_minor_residual,
        spectral_ppt: spectral.is_ppt,
        min_eigenvalue: spectral.min_eigenvalue,
        borderline,
        decomposed,
        failure,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub seeds: Vec<u64>,
    pub kinds: Vec<Kind>,
}

impl FuzzConfig {
    pub fn specs(&self) -> Vec<GenSpec> {
        let mut out = Vec::new();
        for n in self.n_min..=self.n_max {
            for &kind in &self.kinds {
                for &seed in &self.seeds {
                    out.push(case_spec(n, kind, seed));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzFailure {
    pub spec: GenSpec,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FuzzReport {
    pub total: usize,
    /// Non-borderline cases where both verdicts match.
    pub agreements: usize,
    pub borderline: usize,
    pub structural_ppt: usize,
    pub spectral_ppt: usize,
    pub decomposed: usize,
    /// Random-kind instances that passed the structural test.
    pub random_structural_ppt: usize,
    pub failures: Vec<FuzzFailure>,
}

impl FuzzReport {
    pub fn from_outcomes(outcomes: &[std::result::Result<CaseOutcome, FuzzFailure>]) -> Self {
        let mut r = FuzzReport {
            total: outcomes.len(),
            ..FuzzReport::default()
        };
        for o in outcomes {
            let o = match o {
                Ok(o) => o,
                Err(f) => {
                    r.failures.push(f.clone());
                    continue;
                }
            };
            if o.borderline {
                r.borderline += 1;
            } else if o.agrees() {
                r.agreements += 1;
            }
            r.structural_ppt += o.structural_ppt as usize;
            r.spectral_ppt += o.spectral_ppt as usize;
            r.decomposed += (o.decomposed == Some(true)) as usize;
            r.random_structural_ppt += (o.spec.kind == Kind::Random && o.structural_ppt) as usize;
            if let Some(reason) = &o.failure {
                r.failures.push(FuzzFailure {
                    spec: o.spec.clone(),
                    reason: reason.clone(),
                });
            }
        }
        r
    }
}

pub fn run_cases(specs: &[GenSpec], tol: &Tolerances, exec: Execution) -> Vec<std::result::Result<CaseOutcome, FuzzFailure>> {
    exec.map(specs, |spec| {
        evaluate_case(spec, tol).map_err(|e| FuzzFailure {
            spec: spec.clone(),
            reason: e.to_string(),
        })
    })
}

pub fn fuzz(config: &FuzzConfig, tol: &Tolerances, exec: Execution) -> FuzzReport {
    FuzzReport::from_outcomes(&run_cases(&config.specs(), tol, exec))
}
