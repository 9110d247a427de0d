//! Matsuo algebras of 3-transposition groups: exact construction, derivation
//! algebras, near-solid lines of Fischer spaces, and automorphisms of
//! `M(3^n:W)`.
//!
//! All arithmetic is exact, over `Q`, `F_p` or a quadratic extension.

pub mod algebra;
pub mod autos;
pub mod deriv;
pub mod field;
pub mod fischer;
pub mod linalg;
pub mod matsuo;
pub mod transpo;

pub use algebra::{Algebra, AlgebraElement, LinearEndo};
pub use field::{Field, FieldElement};
pub use fischer::FischerSpace;
pub use matsuo::MatsuoAlgebra;
pub use transpo::{RootSystem, TranspoGroup};

/// Any error raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] field::FieldError),
    #[error(transparent)]
    Parse(#[from] field::ParseError),
    #[error(transparent)]
    Transpo(#[from] transpo::TranspoError),
    #[error(transparent)]
    Fischer(#[from] fischer::FischerError),
    #[error(transparent)]
    Algebra(#[from] algebra::AlgebraError),
    #[error(transparent)]
    Matsuo(#[from] matsuo::MatsuoError),
    #[error(transparent)]
    Deriv(#[from] deriv::DerivError),
    #[error(transparent)]
    Autos(#[from] autos::AutosError),
}
