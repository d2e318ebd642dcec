//! Ring interfaces shared by the commutative, free, matrix and Weyl algebras.

use crate::error::Result;
use crate::field::{Coefficient, Field};
use crate::poly::{PolyMatrix, Polynomial, VarNames};

/// An associative unital algebra over the ground field.
pub trait Algebra: Clone + PartialEq + std::fmt::Debug {
    fn field(&self) -> Field;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn try_add(&self, other: &Self) -> Result<Self>;
    fn try_sub(&self, other: &Self) -> Result<Self>;
    fn try_mul(&self, other: &Self) -> Result<Self>;
    fn scale(&self, c: &Coefficient) -> Self;
}

/// A graded algebra freely generated by `x_1..x_n`, so endomorphisms are
/// given by generator images.
pub trait FreeGenerated: Algebra {
    fn generator(i: usize, n: usize, field: Field) -> Self;
    fn ngens(&self) -> usize;
    fn substitute(&self, images: &[Self]) -> Result<Self>;
    fn homogeneous_component(&self, d: u32) -> Self;
    fn degree(&self) -> Option<u32>;
    fn to_string_with(&self, names: &VarNames) -> String;
    /// Terms as coefficients times ordered products of generators.
    fn word_terms(&self) -> Vec<(Coefficient, Vec<usize>)>;
}

impl Algebra for Polynomial {
    fn field(&self) -> Field {
        Polynomial::field(self)
    }

    fn zero_like(&self) -> Self {
        Polynomial::zero(self.nvars(), Polynomial::field(self))
    }

    fn one_like(&self) -> Self {
        Polynomial::one(self.nvars(), Polynomial::field(self))
    }

    fn is_zero(&self) -> bool {
        Polynomial::is_zero(self)
    }

    fn try_add(&self, other: &Self) -> Result<Self> {
        self.checked_add(other)
    }

    fn try_sub(&self, other: &Self) -> Result<Self> {
        self.checked_sub(other)
    }

    fn try_mul(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)
    }

    fn scale(&self, c: &Coefficient) -> Self {
        Polynomial::scale(self, c)
    }
}

impl FreeGenerated for Polynomial {
    fn generator(i: usize, n: usize, field: Field) -> Self {
        Polynomial::var(i, n, field)
    }

    fn ngens(&self) -> usize {
        self.nvars()
    }

    fn substitute(&self, images: &[Self]) -> Result<Self> {
        Polynomial::substitute(self, images)
    }

    fn homogeneous_component(&self, d: u32) -> Self {
        Polynomial::homogeneous_component(self, d)
    }

    fn degree(&self) -> Option<u32> {
        Polynomial::degree(self)
    }

    fn to_string_with(&self, names: &VarNames) -> String {
        Polynomial::to_string_with(self, names)
    }

    fn word_terms(&self) -> Vec<(Coefficient, Vec<usize>)> {
        self.terms()
            .map(|(m, c)| {
                let letters = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
                    .collect();
                (c.clone(), letters)
            })
            .collect()
    }
}

impl Algebra for PolyMatrix {
    fn field(&self) -> Field {
        PolyMatrix::field(self)
    }

    fn zero_like(&self) -> Self {
        PolyMatrix::zero(self.rows(), self.cols(), self.nvars(), PolyMatrix::field(self))
    }

    fn one_like(&self) -> Self {
        PolyMatrix::identity(self.rows(), self.nvars(), PolyMatrix::field(self))
    }

    fn is_zero(&self) -> bool {
        PolyMatrix::is_zero(self)
    }

    fn try_add(&self, other: &Self) -> Result<Self> {
        self.add(other)
    }

    fn try_sub(&self, other: &Self) -> Result<Self> {
        self.sub(other)
    }

    fn try_mul(&self, other: &Self) -> Result<Self> {
        self.mul(other)
    }

    fn scale(&self, c: &Coefficient) -> Self {
        PolyMatrix::scale(self, c)
    }
}
