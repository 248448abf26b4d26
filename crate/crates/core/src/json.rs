//! JSON wire formats.
//!
//! Complex numbers are `{"re": f64, "im": f64}` objects. Field order of every
//! emitted object is fixed by the struct declarations below, and floats use
//! serde_json's shortest round-trip representation.

use serde::{Deserialize, Serialize};

use crate::decompose::{DecompositionResiduals, ProductTerm, SeparableDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::structure::{StructuralReport, ThetaData};
use crate::types::{ClassParams, Tolerances};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(z: Complex64) -> Self {
        JsonComplex { re: z.re, im: z.im }
    }
}

impl JsonComplex {
    fn to_complex(self, what: &str) -> Result<Complex64> {
        if self.re.is_finite() && self.im.is_finite() {
            Ok(Complex64::new(self.re, self.im))
        } else {
            Err(Error::NonFinite(format!("{what}: {{re: {}, im: {}}}", self.re, self.im)))
        }
    }
}

fn vector_to_json(v: &CVector) -> Vec<JsonComplex> {
    v.iter().copied().map(JsonComplex::from).collect()
}

fn vector_from_json(v: &[JsonComplex], what: &str) -> Result<CVector> {
    let parsed = v
        .iter()
        .map(|z| z.to_complex(what))
        .collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_vec(parsed))
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("{what} = {v}")))
    }
}

/// `{"n": int, "x": [[{re, im} × n] × n], "label"?: string}`, `x[l-1][j-1] = x_l^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    pub x: Vec<Vec<JsonComplex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl InstanceJson {
    pub fn from_params(params: &ClassParams) -> Self {
        InstanceJson {
            n: params.n(),
            x: params
                .rows()
                .into_iter()
                .map(|r| r.into_iter().map(JsonComplex::from).collect())
                .collect(),
            label: params.label().map(str::to_owned),
        }
    }

    pub fn to_params(&self, tol: &Tolerances) -> Result<ClassParams> {
        if self.x.len() != self.n {
            return Err(Error::BadShape(format!(
                "\"n\" is {} but \"x\" has {} rows",
                self.n,
                self.x.len()
            )));
        }
        let table = self
            .x
            .iter()
            .enumerate()
            .map(|(l, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, z)| z.to_complex(&format!("x_{}^{}", l + 1, j + 1)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let params = ClassParams::validate(&table, tol)?;
        Ok(match &self.label {
            Some(l) => params.with_label(l.clone()),
            None => params,
        })
    }
}

pub fn instance_to_string(params: &ClassParams) -> String {
    serde_json::to_string_pretty(&InstanceJson::from_params(params)).expect("instance serializes")
}

pub fn instance_from_str(s: &str, tol: &Tolerances) -> Result<ClassParams> {
    serde_json::from_str::<InstanceJson>(s)?.to_params(tol)
}

/// `{"is_ppt", "max_minor_residual", "witness", "theta", "sum_defect_k"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralReportJson {
    pub is_ppt: bool,
    pub max_minor_residual: f64,
    /// `[m, j, k, p, q]`.
    pub witness: Option<[usize; 5]>,
    pub theta: Option<Vec<f64>>,
    pub sum_defect_k: Option<i64>,
}

impl StructuralReportJson {
    pub fn new(report: &StructuralReport, theta: Option<&ThetaData>) -> Self {
        StructuralReportJson {
            is_ppt: report.is_ppt,
            max_minor_residual: report.max_minor_residual,
            witness: report.worst_witness.map(|w| [w.m, w.j, w.k, w.p, w.q]),
            theta: theta.map(|t| t.theta.clone()),
            sum_defect_k: theta.map(|t| t.sum_defect_k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub p: f64,
    pub a: Vec<JsonComplex>,
    pub b: Vec<JsonComplex>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualsJson {
    pub reconstruction: f64,
    pub max_rank1: f64,
}

/// `{"n", "terms": [{"p", "a", "b"}], "residuals": {...}, "free_constant"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
    pub residuals: ResidualsJson,
    pub free_constant: f64,
}

impl DecompositionJson {
    pub fn from_decomposition(d: &SeparableDecomposition) -> Self {
        DecompositionJson {
            n: d.n,
            terms: d
                .terms
                .iter()
                .map(|t| TermJson {
                    p: t.p,
                    a: vector_to_json(&t.a),
                    b: vector_to_json(&t.b),
                })
                .collect(),
            residuals: ResidualsJson {
                reconstruction: d.residuals.reconstruction,
                max_rank1: d.residuals.max_rank1,
            },
            free_constant: d.free_constant,
        }
    }

    pub fn to_decomposition(&self) -> Result<SeparableDecomposition> {
        let terms = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                Ok(ProductTerm {
                    p: finite(t.p, &format!("terms[{i}].p"))?,
                    a: vector_from_json(&t.a, &format!("terms[{i}].a"))?,
                    b: vector_from_json(&t.b, &format!("terms[{i}].b"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SeparableDecomposition {
            n: self.n,
            terms,
            residuals: DecompositionResiduals {
                reconstruction: self.residuals.reconstruction,
                max_rank1: self.residuals.max_rank1,
            },
            free_constant: finite(self.free_constant, "free_constant")?,
        })
    }
}

pub fn decomposition_to_string(d: &SeparableDecomposition) -> String {
    serde_json::to_string_pretty(&DecompositionJson::from_decomposition(d)).expect("decomposition serializes")
}

pub fn decomposition_from_str(s: &str) -> Result<SeparableDecomposition> {
    serde_json::from_str::<DecompositionJson>(s)?.to_decomposition()
}

/// Debug dump `{"n", "mat": [row-major {re, im}]}`; not a stable format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub n: usize,
    pub mat: Vec<JsonComplex>,
}

impl MatrixDump {
    pub fn new(n: usize, m: &CMatrix) -> Self {
        MatrixDump {
            n,
            mat: m.transpose().iter().copied().map(JsonComplex::from).collect(),
        }
    }
}
