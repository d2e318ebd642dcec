//! Sparse multivariate polynomials with exact coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose order is graded
//! lexicographic by variable index. Zero coefficients are never stored, so
//! structural equality is mathematical equality.

mod matrix;
mod text;

pub use matrix::PolyMatrix;
pub use text::{parse_polynomial, parse_polynomial_at};

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Coefficient, Field};

/// Exponent vector, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Height of a polynomial or endomorphism: the least degree of a nonzero
/// homogeneous component. The zero polynomial has infinite height.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Height {
    Finite(u32),
    Infinite,
}

impl Height {
    pub fn is_at_least(&self, k: u32) -> bool {
        match self {
            Height::Finite(h) => *h >= k,
            Height::Infinite => true,
        }
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(h) => write!(f, "{h}"),
            Height::Infinite => write!(f, "inf"),
        }
    }
}

/// A multivariate polynomial over `Q` or `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    field: Field,
    terms: BTreeMap<Monomial, Coefficient>,
}

impl Polynomial {
    pub fn zero(nvars: usize, field: Field) -> Self {
        Polynomial {
            nvars,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize, field: Field) -> Self {
        Self::constant(field.one(), nvars)
    }

    pub fn constant(c: Coefficient, nvars: usize) -> Self {
        let mut p = Self::zero(nvars, c.field());
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    /// The variable `x_{i+1}` (indices are zero-based).
    pub fn var(i: usize, nvars: usize, field: Field) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        Self::term(field.one(), Monomial::var(i, nvars))
    }

    pub fn term(c: Coefficient, m: Monomial) -> Self {
        let nvars = m.nvars();
        let mut p = Self::zero(nvars, c.field());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(
        nvars: usize,
        field: Field,
        terms: impl IntoIterator<Item = (Monomial, Coefficient)>,
    ) -> Self {
        let mut p = Self::zero(nvars, field);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_one() && c.is_one())
                .unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coefficient {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> Coefficient {
        self.coefficient(&Monomial::one(self.nvars))
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Coefficient> {
        match self.terms.len() {
            0 => Some(self.field.zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Coefficient)> {
        self.terms.iter().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn height(&self) -> Height {
        match self.terms.keys().next() {
            Some(m) => Height::Finite(m.degree()),
            None => Height::Infinite,
        }
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.exponent(i)).max().unwrap_or(0)
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(i) > 0)
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    out.insert(i);
                }
            }
        }
        out
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(c.field(), self.field);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn compatible(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::dim(format!(
                "variable counts differ: {} vs {}",
                self.nvars, other.nvars
            )));
        }
        if self.field != other.field {
            return Err(Error::dim(format!(
                "fields differ: {} vs {}",
                self.field, other.field
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.compatible(other)?;
        Ok(self.mul_bounded(other, None))
    }

    /// Product with every term of degree above `max_degree` dropped.
    pub fn mul_truncated(&self, other: &Polynomial, max_degree: u32) -> Polynomial {
        self.compatible(other).expect("incompatible operands");
        self.mul_bounded(other, Some(max_degree))
    }

    fn mul_bounded(&self, other: &Polynomial, max_degree: Option<u32>) -> Polynomial {
        let mut acc: BTreeMap<Monomial, Coefficient> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if let Some(md) = max_degree {
                if da > md {
                    break;
                }
            }
            for (mb, cb) in &other.terms {
                if let Some(md) = max_degree {
                    if da + mb.degree() > md {
                        break;
                    }
                }
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.entry(m) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() += &c;
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Polynomial {
            nvars: self.nvars,
            field: self.field,
            terms: acc,
        }
    }

    pub fn scale(&self, c: &Coefficient) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars, self.field);
        }
        Polynomial {
            nvars: self.nvars,
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn scale_i64(&self, c: i64) -> Polynomial {
        self.scale(&self.field.from_i64(c))
    }

    /// Multiplies by a monomial.
    pub fn shift(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            field: self.field,
            terms: self.terms.iter().map(|(a, c)| (a.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars, self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn pow_truncated(&self, e: u32, max_degree: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars, self.field);
        for _ in 0..e {
            acc = acc.mul_truncated(self, max_degree);
        }
        acc
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Result<Polynomial> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.nvars,
            });
        }
        let mut out = Polynomial::zero(self.nvars, self.field);
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            let mut ex = m.exponents().to_vec();
            ex[i] -= 1;
            out.add_term(Monomial(ex), c * &self.field.from_i64(e as i64));
        }
        Ok(out)
    }

    /// Sum of the terms of total degree exactly `d`.
    pub fn homogeneous_component(&self, d: u32) -> Polynomial {
        self.filter_terms(|m| m.degree() == d)
    }

    /// Terms of degree at most `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Polynomial {
        self.filter_terms(|m| m.degree() <= max_degree)
    }

    pub fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            field: self.field,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Degrees of the nonzero homogeneous components, ascending.
    pub fn degrees(&self) -> BTreeSet<u32> {
        self.terms.keys().map(Monomial::degree).collect()
    }

    /// Ring homomorphism sending variable `i` to `images[i]`.
    ///
    /// The images may live in a ring with a different variable count.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        self.substitute_impl(images, None)
    }

    /// As [`substitute`](Self::substitute), discarding terms above `max_degree`.
    pub fn substitute_truncated(&self, images: &[Polynomial], max_degree: u32) -> Result<Polynomial> {
        self.substitute_impl(images, Some(max_degree))
    }

    fn substitute_impl(&self, images: &[Polynomial], max_degree: Option<u32>) -> Result<Polynomial> {
        if images.len() != self.nvars {
            return Err(Error::dim(format!(
                "substitution needs {} images, got {}",
                self.nvars,
                images.len()
            )));
        }
        let (target_n, target_field) = match images.first() {
            Some(img) => (img.nvars, img.field),
            None => (0, self.field),
        };
        for img in images {
            if img.nvars != target_n || img.field != target_field {
                return Err(Error::dim("substitution images disagree on ring"));
            }
        }
        if target_field != self.field {
            return Err(Error::dim("substitution images live over another field"));
        }
        let mul = |a: &Polynomial, b: &Polynomial| match max_degree {
            Some(d) => a.mul_truncated(b, d),
            None => a * b,
        };
        // powers[i][e] = images[i]^e, filled on demand
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|_| vec![Polynomial::one(target_n, target_field)])
            .collect();
        let mut out = Polynomial::zero(target_n, target_field);
        for (m, c) in &self.terms {
            let mut prod = Polynomial::constant(c.clone(), target_n);
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = mul(powers[i].last().unwrap(), &images[i]);
                    powers[i].push(next);
                }
                prod = mul(&prod, &powers[i][e as usize]);
                if prod.is_zero() {
                    break;
                }
            }
            for (pm, pc) in prod.terms {
                out.add_term(pm, pc);
            }
        }
        Ok(out)
    }

    /// Evaluates at a point of the ground field.
    pub fn evaluate(&self, point: &[Coefficient]) -> Result<Coefficient> {
        if point.len() != self.nvars {
            return Err(Error::dim("evaluation point has wrong length"));
        }
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = &t * &point[i].pow(e);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Re-embeds into a ring with `nvars` variables; the first `self.nvars()`
    /// variables keep their index.
    pub fn extend_vars(&self, nvars: usize) -> Polynomial {
        assert!(nvars >= self.nvars);
        self.remap_vars(nvars, |i| i)
    }

    /// Re-embeds, sending variable `i` to variable `map(i)` of a ring with `nvars` variables.
    pub fn remap_vars(&self, nvars: usize, map: impl Fn(usize) -> usize) -> Polynomial {
        let mut out = Polynomial::zero(nvars, self.field);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &k) in m.exponents().iter().enumerate() {
                if k > 0 {
                    e[map(i)] += k;
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` if the division is not exact.
    pub fn exact_div(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let (lm, lc) = divisor.leading_term()?;
        let lc_inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.nvars, self.field);
        while let Some((rm, rc)) = rem.leading_term() {
            if !lm.divides(rm) {
                return None;
            }
            let qm = lm.quotient_of(rm);
            let qc = rc * &lc_inv;
            let step = divisor.shift(&qm).scale(&qc);
            rem = &rem - &step;
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    pub fn map_coefficients(&self, field: Field, f: impl Fn(&Coefficient) -> Coefficient) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars, field);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Reduces a rational polynomial into `F_p`.
    pub fn reduce_mod(&self, field: Field) -> Result<Polynomial> {
        let mut out = Polynomial::zero(self.nvars, field);
        for (m, c) in &self.terms {
            let q = c
                .as_rational()
                .ok_or_else(|| Error::InvalidInput("polynomial is not rational".into()))?;
            out.add_term(m.clone(), field.from_rational(q)?);
        }
        Ok(out)
    }

    /// Prints with the given variable names.
    pub fn display_with<'a>(&'a self, names: &'a VarNames) -> DisplayPoly<'a> {
        DisplayPoly { poly: self, names }
    }

    pub fn to_string_with(&self, names: &VarNames) -> String {
        self.display_with(names).to_string()
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("incompatible polynomials")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("incompatible polynomials")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("incompatible polynomials")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-self.field.one())
    }
}

/// Variable names used for printing and parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarNames(Vec<String>);

impl VarNames {
    /// `x1 .. xn`.
    pub fn standard(n: usize) -> Self {
        VarNames((1..=n).map(|i| format!("x{i}")).collect())
    }

    /// `x1 .. xn, p1 .. pn` for phase-space polynomials.
    pub fn symplectic(n: usize) -> Self {
        VarNames(
            (1..=n)
                .map(|i| format!("x{i}"))
                .chain((1..=n).map(|i| format!("p{i}")))
                .collect(),
        )
    }

    pub fn custom(names: Vec<String>) -> Self {
        VarNames(names)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

pub struct DisplayPoly<'a> {
    poly: &'a Polynomial,
    names: &'a VarNames,
}

impl fmt::Display for DisplayPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.poly;
        if p.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in p.terms.iter().rev() {
            let factors: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let name = self.names.name(i);
                    if e == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            write_term(f, c, &factors.join("*"), first)?;
            first = false;
        }
        Ok(())
    }
}

/// Writes `± c*body` with canonical sign placement.
pub(crate) fn write_term(
    f: &mut fmt::Formatter<'_>,
    c: &Coefficient,
    body: &str,
    first: bool,
) -> fmt::Result {
    let neg = c.is_negative();
    let abs = if neg { -c } else { c.clone() };
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    if body.is_empty() {
        write!(f, "{abs}")
    } else if abs.is_one() {
        write!(f, "{body}")
    } else {
        write!(f, "{abs}*{body}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = VarNames::standard(self.nvars);
        write!(f, "{}", self.display_with(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    fn x(i: usize, n: usize) -> Polynomial {
        Polynomial::var(i, n, q())
    }

    #[test]
    fn difference_of_squares() {
        let (a, b) = (x(0, 2), x(1, 2));
        let prod = &(&a + &b) * &(&a - &b);
        assert_eq!(prod, &(&a * &a) - &(&b * &b));
        assert_eq!(prod.to_string(), "x1^2 - x2^2");
    }

    #[test]
    fn rational_coefficients_multiply() {
        let a = x(0, 1).scale(&Coefficient::rational(1, 2));
        let b = x(0, 1).scale(&Coefficient::rational(2, 3));
        assert_eq!((&a * &b).to_string(), "1/3*x1^2");
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        assert!(x(0, 1).checked_add(&x(0, 2)).is_err());
        let fp = Polynomial::var(0, 1, Field::Prime(5));
        assert!(x(0, 1).checked_mul(&fp).is_err());
    }

    #[test]
    fn partials() {
        let f = &(&x(0, 2) * &x(0, 2)) * &x(1, 2);
        assert_eq!(f.partial(0).unwrap(), (&x(0, 2) * &x(1, 2)).scale_i64(2));
        assert!(Polynomial::one(2, q()).partial(0).unwrap().is_zero());
        assert!(f.partial(2).is_err());
        let fp = Field::Prime(5);
        let x5 = Polynomial::var(0, 1, fp).pow(5);
        assert!(x5.partial(0).unwrap().is_zero());
    }

    #[test]
    fn height_and_components() {
        let f = &x(0, 1) + &x(0, 1).pow(3);
        assert_eq!(f.homogeneous_component(3), x(0, 1).pow(3));
        assert_eq!(Polynomial::zero(2, q()).height(), Height::Infinite);
        let g = &(&x(0, 2).pow(2) * &x(1, 2)) + &x(0, 2).pow(5);
        assert_eq!(g.height(), Height::Finite(3));
        assert_eq!(g.degree(), Some(5));
    }

    #[test]
    fn substitution_into_larger_ring() {
        let f = x(0, 1).pow(2);
        let img = &x(0, 2) + &x(1, 2);
        let out = f.substitute(&[img]).unwrap();
        assert_eq!(out.to_string(), "x1^2 + 2*x1*x2 + x2^2");
        assert!(f.substitute(&[]).is_err());
    }

    #[test]
    fn exact_division() {
        let a = &x(0, 2) + &x(1, 2);
        let b = &x(0, 2) - &x(1, 2).scale_i64(3);
        let prod = &a * &b;
        assert_eq!(prod.exact_div(&a).unwrap(), b);
        assert!(x(0, 2).exact_div(&x(1, 2)).is_none());
    }
}
