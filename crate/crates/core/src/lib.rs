//! Exact computer algebra for polynomial automorphisms and their quantization.

pub mod approx;
pub mod cli;
pub mod endo;
pub mod error;
pub mod field;
pub mod free;
pub mod linalg;
pub mod moyal;
pub mod parse;
pub mod poly;
pub mod ring;
pub mod sample;
pub mod torus;
pub mod weyl;
pub mod yagzhev;

pub use error::{Error, Result};
pub use field::{Coefficient, Field};
pub use poly::{Height, Monomial, PolyMatrix, Polynomial, VarNames};
