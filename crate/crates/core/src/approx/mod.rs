//! Tame approximation of automorphisms by lowest-degree defect killing, its
//! symplectic variant, and lifting of symplectic tame words to the Weyl algebra.

mod anick;
mod lift;
mod symplectic;

pub use anick::{
    anick_approximate, anick_approximate_with_cap, anick_step, decompose_linear, layer_word,
    normalize_linear, peel_tame, AnickApproximation, EXACT_RESIDUAL_DEGREE_CAP, PEEL_STEP_CAP,
};
pub use lift::{lift_factor, lift_tame, lift_tame_with_cap, LIFT_DEGREE_CAP};
pub use symplectic::{
    generating_polynomial, symplectic_approximate, GeneratingPolynomial, symplectic_approximate_with_cap,
    waring_decompose, SymplecticApproximation, SYMPLECTIC_EXACT_DEGREE_CAP, SymplecticFactor, SymplecticWord,
};

use crate::endo::PolyEndo;
use crate::poly::Height;

/// One degree of an approximation run.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxStep {
    pub degree: u32,
    pub factors: usize,
    pub residual_height: Height,
}

/// Residual `ψ^{-1} ∘ φ` after approximation. Large residuals are carried only
/// through the degrees that decide the target height.
#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    Exact(PolyEndo),
    Truncated { through: u32, residual: PolyEndo },
}

impl Residual {
    pub fn endo(&self) -> &PolyEndo {
        match self {
            Residual::Exact(e) => e,
            Residual::Truncated { residual, .. } => residual,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Residual::Exact(_))
    }
}
