//! Exact-arithmetic engine for quantum Airy structures.
//!
//! A quantum Airy structure is a family of differential operators, one per
//! index, each of the shape "first derivative minus quadratic
//! Hamiltonian", whose span closes under commutators.  Such a family
//! annihilates a unique formal partition function, and the coefficients of
//! its logarithm — symmetric tensors indexed by a genus and a tuple of
//! labels — are computed by a closed recursion on the Euler characteristic.
//!
//! This crate computes those coefficients exactly (arbitrary-precision
//! rationals, or elements of an explicit number field), validates candidate
//! structures against the defining compatibility identities, transforms
//! structures into one another (gauge moves, rescalings, translations),
//! evaluates closed forms where they exist, and ships a zoo of built-in
//! families used throughout the test suite.
//!
//! Layer map:
//!
//! * kernel — [`scalar`], [`nf`], [`series`], [`tensor`], [`linalg`]
//! * data model — [`structure`] (JSON interchange included)
//! * consistency — [`relations`], [`weyl`]
//! * computation — [`recursion`], [`transform`], [`closed_form`]
//! * catalogue — [`zoo`]
//! * applications — [`cohomology`], [`young`]

pub mod error;
pub mod linalg;
pub mod nf;
pub mod recursion;
pub mod relations;
pub mod scalar;
pub mod series;
pub mod structure;
pub mod tensor;
pub mod transform;
pub mod weyl;

pub use error::{AiryError, Result};
pub use nf::{NfElem, NumberField};
pub use scalar::{Field, Rat, Ring};
pub use series::TSeries;
pub use structure::{AiryStructure, AnyStructure, FieldSpec, Grading};
pub use tensor::{SparseTensor, Symmetry};
