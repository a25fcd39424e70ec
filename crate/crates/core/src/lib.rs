//! Finitely presented PROs generated by cups and caps, their rewriting
//! theory, and an exact semantics in finite-dimensional vector spaces.
//!
//! Morphisms are [`Term`]s built from cups `eta(m,n)` and caps `eps(m,n)`.
//! Equality is decided up to rewriting with bounded search; the answer is
//! either a verified path or `Unknown`.

pub mod cli;
pub mod duality;
pub mod functor;
pub mod interchange;
pub mod matrix;
pub mod rewrite;
pub mod scalar;
pub mod search;
pub mod suite;
pub mod syntax;
pub mod term;

pub use duality::{snake_term, transpose, untranspose};
pub use functor::{FunctorError, FunctorSpec, IsoVerdict, Obstruction};
pub use interchange::canonical;
pub use matrix::Mat;
pub use rewrite::{apply, match_rules, RewriteStep, RuleId, RuleInstance};
pub use scalar::{Fp, Scalar};
pub use search::{enum_hom, equal, explore, Equality, ExploreReport, SearchCaps};
pub use syntax::{parse_expr, ParseError};
pub use term::{GenKind, Generator, Mode, Obj, Slice, Term, TermError};

pub type Rational = num_rational::BigRational;
pub type RationalMat = Mat<Rational>;
pub type RationalSpec = FunctorSpec<Rational>;
pub type PrimeField = Fp<1_000_003>;
pub type PrimeMat = Mat<PrimeField>;
pub type PrimeSpec = FunctorSpec<PrimeField>;
