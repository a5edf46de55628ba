//! Exact arithmetic in the perfect closure `F_p(I)` of a rational function
//! field over `Z_p`, with a separability toolkit and finite-field tower.

pub mod error;
pub mod fqtower;
pub mod multipoly;
pub mod perfclosure;
pub mod primefield;
pub mod ratfunc;
pub mod septools;

pub use error::{Error, Result};
pub use fqtower::{FqElem, FqEmbedding, FqField, PerfectnessReport};
pub use multipoly::{Monomial, MultiPoly};
pub use perfclosure::{LevelForm, PerfElem, PerfectClosure};
pub use primefield::{PrimeField, PrimeFieldElem};
pub use ratfunc::RatFunc;
pub use septools::{Mode, SepDecomposition, SqfDecomposition, UniPoly};
