//! Extended logarithms of automorphisms of truncated free tensor algebras
//! `T/T_k` and free nilpotent Lie algebras.
//!
//! Given a filtered automorphism `Φ` whose degree-one part `A` is exponential
//! solvable, [`logarithm::ln_aut`] finds the derivation `D` with `exp(D) = Φ`
//! and `d_1 = ln A` (principal branch). Around it sit the tensor and Lie
//! algebra arithmetic, spectral tools for `A`, Magnus expansions and the total
//! Johnson map, and BCH cross-checks.
//!
//! Everything is generic over [`Scalar`]; the aliases below fix the two
//! backends used in practice.

pub mod derivation;
pub mod error;
pub mod free_lie;
pub mod graded_aut;
pub mod graded_tensor;
pub mod json;
pub mod linalg;
pub mod logarithm;
pub mod magnus;
pub mod sample;
pub mod scalar;
pub mod spectral;
pub mod tolerance;

pub use derivation::GradedDerivation;
pub use error::{Error, Result};
pub use free_lie::LiePoly;
pub use graded_aut::GradedAut;
pub use graded_tensor::{TruncatedTensor, Word};
pub use json::Wire;
pub use magnus::{FreeGroupEndo, FreeGroupWord, MagnusExpansion};
pub use scalar::{Backend, Rational, Scalar, C64};

pub type ExactTensor = TruncatedTensor<Rational>;
pub type ComplexTensor = TruncatedTensor<C64>;
pub type ExactLiePoly = LiePoly<Rational>;
pub type ComplexLiePoly = LiePoly<C64>;
pub type ExactAut = GradedAut<Rational>;
pub type ComplexAut = GradedAut<C64>;
pub type ExactDerivation = GradedDerivation<Rational>;
pub type ComplexDerivation = GradedDerivation<C64>;
pub type ExactExpansion = MagnusExpansion<Rational>;
pub type ComplexExpansion = MagnusExpansion<C64>;
