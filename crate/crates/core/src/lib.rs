//! Exact homotopy theory of enriched diagrams over chain complexes of
//! finitely generated abelian groups.
//!
//! The base category is bounded complexes of finitely presented abelian
//! groups ([`chainz`]). On top of it sit finite dg-categories ([`dgcat`]),
//! diagrams with coends and Kan extensions ([`diagram`]), latching objects
//! and the inductive replacement over direct shapes ([`reedy`]) and the bar
//! construction ([`bar`]).

pub mod bar;
pub mod chainz;
pub mod corpus;
pub mod dgcat;
pub mod diagram;
pub mod reedy;
pub mod zmat;

/// Arbitrary-precision integer used throughout.
pub type Int = num_bigint::BigInt;
/// Exact integer matrix.
pub type IntMatrix = zmat::Matrix<Int>;
/// Smith normal form over [`Int`].
pub type IntSnf = zmat::Snf<Int>;

pub use bar::{bar_replacement, BarComplex, BarError, BarReplacement};
pub use chainz::{ChainComplex, ChainError, ChainMap, Elem, FpGroup, GroupInvariants, Homology, TensorProduct};
pub use dgcat::{CatError, DgCategory, DgFunctor, MonotoneKind, OrdinaryCategory};
pub use diagram::{CellPresentation, Cube, Diagram, DiagramError, Transformation};
pub use reedy::{ReedyError, ReedyStructure};

/// Shorthand for an [`Int`] from a machine integer.
pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Vector of [`Int`] from machine integers.
pub fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}
