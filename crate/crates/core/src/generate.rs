//! Seeded instance generators.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`),
//! with a separate stream per generator kind, so a `(kind, n, seed)` triple
//! always yields the same bits. Magnitudes are drawn uniformly from
//! `[0.2, 1]` and phases uniformly from `[-π, π)` before normalization.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{renormalize, ClassParams, Tolerances};

const MAG_LO: f64 = 0.2;
const MAG_HI: f64 = 1.0;
const MAX_DRAWS: usize = 16;

const STREAM_PPT: u64 = 1;
const STREAM_PERTURB: u64 = 2;
const STREAM_RANDOM: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Uniform,
    Ppt,
    Perturbed,
    Random,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::Uniform, Kind::Ppt, Kind::Perturbed, Kind::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Uniform => "uniform",
            Kind::Ppt => "ppt",
            Kind::Perturbed => "perturbed",
            Kind::Random => "random",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::BadShape(format!("unknown instance kind {s:?}")))
    }
}

/// Full description of a generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub kind: Kind,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl GenSpec {
    pub fn new(n: usize, kind: Kind, seed: u64) -> Self {
        GenSpec {
            n,
            kind,
            seed,
            epsilon: None,
            label: None,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn generate(&self) -> Result<ClassParams> {
        if self.n < 2 {
            return Err(Error::BadShape(format!("need n >= 2, got {}", self.n)));
        }
        let params = match self.kind {
            Kind::Uniform => gen_uniform(self.n),
            Kind::Ppt => gen_ppt(self.n, self.seed),
            Kind::Random => gen_random(self.n, self.seed),
            Kind::Perturbed => {
                let eps = self.epsilon.ok_or_else(|| {
                    Error::BadShape("kind \"perturbed\" requires epsilon".into())
                })?;
                if !eps.is_finite() || eps < 0.0 {
                    return Err(Error::BadShape(format!("epsilon must be >= 0, got {eps}")));
                }
                gen_perturbed(self.n, self.seed, eps)
            }
        };
        Ok(match &self.label {
            Some(l) => params.with_label(l.clone()),
            None => params,
        })
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw(rng: &mut ChaCha8Rng) -> Complex64 {
    let mag = rng.random_range(MAG_LO..=MAG_HI);
    let phase = rng.random_range(-PI..PI);
    Complex64::from_polar(mag, phase)
}

fn finish(table: Vec<Vec<Complex64>>) -> Option<ClassParams> {
    ClassParams::validate(&renormalize(&table), &Tolerances::default()).ok()
}

/// `x_l^j = 1/n` for every entry.
pub fn gen_uniform(n: usize) -> ClassParams {
    let x = Complex64::new(1.0 / n as f64, 0.0);
    ClassParams::validate(&vec![vec![x; n]; n], &Tolerances::default())
        .expect("uniform table is always in the class")
}

/// Build `x_l^j ∝ e^{-iδ_l} φ_j ψ_{j+l-1}` from explicit factors.
///
/// With these `δ` the mixing step turns every `B_l` into an outer product of
/// `φ` and `ψ`, so the result is separable (hence PPT) by construction.
pub fn ppt_from_factors(phi: &[Complex64], psi: &[Complex64], delta: &[f64]) -> Result<ClassParams> {
    let n = phi.len();
    if n < 2 || psi.len() != n || delta.len() != n {
        return Err(Error::BadShape(format!(
            "factor lengths {} / {} / {} must agree and be >= 2",
            n,
            psi.len(),
            delta.len()
        )));
    }
    let table: Vec<Vec<Complex64>> = (0..n)
        .map(|l| {
            let phase = Complex64::from_polar(1.0, -delta[l]);
            (0..n).map(|j| phase * phi[j] * psi[(j + l) % n]).collect()
        })
        .collect();
    ClassParams::validate(&renormalize(&table), &Tolerances::default())
}

/// A random member of the PPT family.
pub fn gen_ppt(n: usize, seed: u64) -> ClassParams {
    let mut rng = rng_for(seed, STREAM_PPT);
    for _ in 0..MAX_DRAWS {
        let phi: Vec<Complex64> = (0..n).map(|_| draw(&mut rng)).collect();
        let psi: Vec<Complex64> = (0..n).map(|_| draw(&mut rng)).collect();
        let delta: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
        if let Ok(p) = ppt_from_factors(&phi, &psi, &delta) {
            return p;
        }
    }
    panic!("gen_ppt: {MAX_DRAWS} consecutive degenerate draws for n = {n}, seed = {seed}")
}

/// How a single entry is disturbed by [`perturb`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kick {
    /// Multiply by `e^{iε}`; magnitudes unchanged.
    Phase(f64),
    /// Multiply by `1 + ε`.
    Magnitude(f64),
}

/// Kick entry `x_l^j` (1-based) and renormalize.
pub fn perturb(params: &ClassParams, l: usize, j: usize, kick: Kick) -> Result<ClassParams> {
    let mut table = params.rows();
    let z = &mut table[l - 1][j - 1];
    *z *= match kick {
        Kick::Phase(eps) => Complex64::from_polar(1.0, eps),
        Kick::Magnitude(eps) => Complex64::new(1.0 + eps, 0.0),
    };
    ClassParams::validate(&renormalize(&table), &Tolerances::default())
}

/// [`gen_ppt`] with one seeded entry kicked by `epsilon`.
///
/// The entry and the kick type are drawn from the seed. `epsilon = 0`
/// returns the unperturbed instance bit for bit.
pub fn gen_perturbed(n: usize, seed: u64, epsilon: f64) -> ClassParams {
    let base = gen_ppt(n, seed);
    if epsilon == 0.0 {
        return base;
    }
    let mut rng = rng_for(seed, STREAM_PERTURB);
    let l = rng.random_range(1..=n);
    let j = rng.random_range(1..=n);
    let kick = if rng.random_bool(0.5) {
        Kick::Phase(epsilon)
    } else {
        Kick::Magnitude(epsilon)
    };
    perturb(&base, l, j, kick).expect("kicked ppt instance stays in the class")
}

/// Independent entries with no PPT bias.
pub fn gen_random(n: usize, seed: u64) -> ClassParams {
    let mut rng = rng_for(seed, STREAM_RANDOM);
    for _ in 0..MAX_DRAWS {
        let table: Vec<Vec<Complex64>> = (0..n)
            .map(|_| (0..n).map(|_| draw(&mut rng)).collect())
            .collect();
        if let Some(p) = finish(table) {
            return p;
        }
    }
    panic!("gen_random: {MAX_DRAWS} consecutive degenerate draws for n = {n}, seed = {seed}")
}
