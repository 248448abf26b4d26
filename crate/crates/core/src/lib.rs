//! # sepdec
//!
//! PPT test and explicit separable decompositions for a class of `n ⊗ n`
//! bipartite mixed states
//!
//! ```text
//! ρ = Σ_l |X_l⟩⟨X_l|,   |X_l⟩ = Σ_j x_l^j |j⟩ ⊗ |j + l - 1 (mod n)⟩,   x_l^j ≠ 0.
//! ```
//!
//! For this class PPT is equivalent to separability. The crate
//!
//! - builds `ρ` and `ρ^{T₁}` densely and eigensolves `ρ^{T₁}` as an oracle ([`state`]),
//! - decides PPT from the `n` structure blocks `A_m` without touching `ρ^{T₁}` ([`structure`]),
//! - for PPT instances, solves for the mixing phases and emits `n` product
//!   terms that reproduce `ρ`, together with an independent verifier ([`decompose`]),
//! - generates canonical, PPT, perturbed and random instances from a seed ([`generate`]),
//! - runs batch campaigns comparing the two PPT tests ([`campaign`]).
//!
//! Indices in the public API are 1-based residues mod `n`, matching the
//! usual notation `x_l^j`; see [`types::cyc`].

#![forbid(unsafe_code)]

pub mod campaign;
pub mod decompose;
pub mod error;
pub mod exec;
pub mod generate;
pub mod json;
pub mod linalg;
pub mod state;
pub mod structure;
pub mod types;

pub use decompose::{decompose, enumerate_gauge, verify_decomposition, SeparableDecomposition};
pub use error::{Error, Result};
pub use exec::Execution;
pub use generate::{gen_perturbed, gen_ppt, gen_random, gen_uniform, GenSpec, Kind};
pub use state::{build_rho, partial_transpose, spectral_ppt, DensityOperator, SpectralReport};
pub use structure::{check_minor_relations, extract_theta, StructuralReport, ThetaData};
pub use types::{cyc, ClassParams, CyclicIndex, Tolerances};
