//! Noncommutative polynomials, generic matrices and the standard identity.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Coefficient, Field};
use crate::parse::{evaluate, parse_expr_at, pow_by_squaring, Evaluator};
use crate::poly::{write_term, PolyMatrix, Polynomial, VarNames};
use crate::ring::{Algebra, FreeGenerated};

/// Default bound on the degree accepted by [`al_verify`].
pub const AL_DEGREE_CAP: usize = 8;

/// A word in the generators; the empty word is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

/// Length first, then lexicographic.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of the free associative algebra on `ngens` generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreePoly {
    ngens: usize,
    field: Field,
    terms: BTreeMap<Word, Coefficient>,
}

impl FreePoly {
    pub fn zero(ngens: usize, field: Field) -> Self {
        FreePoly {
            ngens,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ngens: usize, field: Field) -> Self {
        Self::term(field.one(), Word::empty(), ngens)
    }

    pub fn constant(c: Coefficient, ngens: usize) -> Self {
        Self::term(c, Word::empty(), ngens)
    }

    pub fn generator(i: usize, ngens: usize, field: Field) -> Self {
        assert!(i < ngens, "generator {i} out of range for {ngens}");
        Self::term(field.one(), Word(vec![i]), ngens)
    }

    pub fn term(c: Coefficient, w: Word, ngens: usize) -> Self {
        let mut p = Self::zero(ngens, c.field());
        p.add_term(w, c);
        p
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing word order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> Coefficient {
        self.terms.get(w).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|w| w.len() as u32)
    }

    pub fn add_term(&mut self, w: Word, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        debug_assert!(w.0.iter().all(|&i| i < self.ngens));
        match self.terms.entry(w) {
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

    fn compatible(&self, other: &FreePoly) -> Result<()> {
        if self.ngens != other.ngens {
            return Err(Error::dim(format!(
                "generator counts differ: {} vs {}",
                self.ngens, other.ngens
            )));
        }
        if self.field != other.field {
            return Err(Error::dim("free polynomials over different fields"));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &FreePoly) -> Result<FreePoly> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &FreePoly) -> Result<FreePoly> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c);
        }
        Ok(out)
    }

    /// Concatenation product.
    pub fn checked_mul(&self, other: &FreePoly) -> Result<FreePoly> {
        self.compatible(other)?;
        let mut out = FreePoly::zero(self.ngens, self.field);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                out.add_term(wa.concat(wb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> FreePoly {
        let mut out = FreePoly::zero(self.ngens, self.field);
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    pub fn commutator(&self, other: &FreePoly) -> Result<FreePoly> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    pub fn homogeneous_component(&self, d: u32) -> FreePoly {
        FreePoly {
            ngens: self.ngens,
            field: self.field,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() as u32 == d)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Unital homomorphism sending generator `i` to `images[i]`.
    pub fn substitute(&self, images: &[FreePoly]) -> Result<FreePoly> {
        if images.len() != self.ngens {
            return Err(Error::dim(format!(
                "substitution needs {} images, got {}",
                self.ngens,
                images.len()
            )));
        }
        let (tn, tf) = images
            .first()
            .map(|p| (p.ngens, p.field))
            .unwrap_or((0, self.field));
        if images.iter().any(|p| p.ngens != tn || p.field != tf) || tf != self.field {
            return Err(Error::dim("substitution images disagree on ring"));
        }
        let mut out = FreePoly::zero(tn, tf);
        for (w, c) in &self.terms {
            let mut prod = FreePoly::constant(c.clone(), tn);
            for &i in &w.0 {
                prod = prod.checked_mul(&images[i])?;
                if prod.is_zero() {
                    break;
                }
            }
            for (pw, pc) in prod.terms {
                out.add_term(pw, pc);
            }
        }
        Ok(out)
    }

    /// Abelianization: the image in the commutative polynomial ring.
    pub fn abelianize(&self) -> Polynomial {
        let images: Vec<Polynomial> = (0..self.ngens)
            .map(|i| Polynomial::var(i, self.ngens, self.field))
            .collect();
        let mut out = Polynomial::zero(self.ngens, self.field);
        for (w, c) in &self.terms {
            let mut t = Polynomial::constant(c.clone(), self.ngens);
            for &i in &w.0 {
                t = &t * &images[i];
            }
            out = &out + &t;
        }
        out
    }

    pub fn to_string_with(&self, names: &VarNames) -> String {
        DisplayFree { poly: self, names }.to_string()
    }
}

struct DisplayFree<'a> {
    poly: &'a FreePoly,
    names: &'a VarNames,
}

impl fmt::Display for DisplayFree<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in self.poly.terms.iter().rev() {
            let mut factors = Vec::new();
            let mut k = 0;
            while k < w.0.len() {
                let g = w.0[k];
                let mut run = 1;
                while k + run < w.0.len() && w.0[k + run] == g {
                    run += 1;
                }
                let name = self.names.name(g);
                factors.push(if run == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{run}")
                });
                k += run;
            }
            write_term(f, c, &factors.join("*"), first)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Display for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with(&VarNames::standard(self.ngens)))
    }
}

impl Algebra for FreePoly {
    fn field(&self) -> Field {
        self.field
    }

    fn zero_like(&self) -> Self {
        FreePoly::zero(self.ngens, self.field)
    }

    fn one_like(&self) -> Self {
        FreePoly::one(self.ngens, self.field)
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
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
        FreePoly::scale(self, c)
    }
}

impl FreeGenerated for FreePoly {
    fn generator(i: usize, n: usize, field: Field) -> Self {
        FreePoly::generator(i, n, field)
    }

    fn ngens(&self) -> usize {
        self.ngens
    }

    fn substitute(&self, images: &[Self]) -> Result<Self> {
        FreePoly::substitute(self, images)
    }

    fn homogeneous_component(&self, d: u32) -> Self {
        FreePoly::homogeneous_component(self, d)
    }

    fn degree(&self) -> Option<u32> {
        FreePoly::degree(self)
    }

    fn to_string_with(&self, names: &VarNames) -> String {
        FreePoly::to_string_with(self, names)
    }

    fn word_terms(&self) -> Vec<(Coefficient, Vec<usize>)> {
        self.terms().map(|(w, c)| (c.clone(), w.letters().to_vec())).collect()
    }
}

struct FreeEval<'a> {
    names: &'a VarNames,
    field: Field,
}

impl Evaluator for FreeEval<'_> {
    type Value = FreePoly;

    fn number(&self, n: &BigInt) -> Result<FreePoly> {
        Ok(FreePoly::constant(self.field.from_bigint(n), self.names.len()))
    }

    fn variable(&self, name: &str) -> Option<FreePoly> {
        self.names
            .index_of(name)
            .map(|i| FreePoly::generator(i, self.names.len(), self.field))
    }

    fn add(&self, a: &FreePoly, b: &FreePoly) -> Result<FreePoly> {
        a.checked_add(b)
    }

    fn sub(&self, a: &FreePoly, b: &FreePoly) -> Result<FreePoly> {
        a.checked_sub(b)
    }

    fn mul(&self, a: &FreePoly, b: &FreePoly) -> Result<FreePoly> {
        a.checked_mul(b)
    }

    fn neg(&self, a: &FreePoly) -> Result<FreePoly> {
        Ok(a.scale(&-self.field.one()))
    }

    fn div(&self, a: &FreePoly, b: &FreePoly) -> std::result::Result<FreePoly, String> {
        let c = match b.terms.len() {
            0 => return Err("division by zero".into()),
            1 => {
                let (w, c) = b.terms.iter().next().unwrap();
                if !w.is_empty() {
                    return Err("division is only allowed by constants".into());
                }
                c.clone()
            }
            _ => return Err("division is only allowed by constants".into()),
        };
        Ok(a.scale(&c.inv().expect("nonzero")))
    }

    fn pow(&self, a: &FreePoly, e: i64) -> std::result::Result<FreePoly, String> {
        if e < 0 {
            return Err("negative exponents are not allowed here".into());
        }
        pow_by_squaring(self, FreePoly::one(self.names.len(), self.field), a, e as u64)
            .map_err(|e| e.to_string())
    }
}

/// Parses a noncommutative polynomial; juxtaposition and `*` keep their order.
pub fn parse_free(text: &str, names: &VarNames, field: Field) -> Result<FreePoly> {
    parse_free_at(text, names, field, 1)
}

pub fn parse_free_at(text: &str, names: &VarNames, field: Field, line: usize) -> Result<FreePoly> {
    let expr = parse_expr_at(text, line)?;
    evaluate(&expr, &FreeEval { names, field })
}

/// `S_r(a_1..a_r) = Σ_σ sgn(σ) a_σ(1)⋯a_σ(r)`.
///
/// Evaluated by expansion along the first factor over subsets, which shares
/// the common suffix products between permutations.
pub fn standard_polynomial<T>(args: &[T]) -> Result<T>
where
    T: Algebra + Send + Sync,
{
    let r = args.len();
    let Some(first) = args.first() else {
        return Err(Error::InvalidInput("standard polynomial needs at least one argument".into()));
    };
    if r > 24 {
        return Err(Error::Resource(format!("standard polynomial of degree {r}")));
    }
    let full = (1usize << r) - 1;
    let mut table: Vec<Option<T>> = vec![None; full + 1];
    table[0] = Some(first.one_like());
    for size in 1..=r {
        let masks: Vec<usize> = (1..=full).filter(|m| m.count_ones() as usize == size).collect();
        let level: Vec<(usize, T)> = masks
            .par_iter()
            .map(|&mask| {
                let mut acc = first.zero_like();
                let mut pos = 0;
                for i in 0..r {
                    if mask & (1 << i) == 0 {
                        continue;
                    }
                    let rest = table[mask & !(1 << i)].as_ref().expect("smaller subsets first");
                    let t = args[i].try_mul(rest)?;
                    acc = if pos % 2 == 0 { acc.try_add(&t)? } else { acc.try_sub(&t)? };
                    pos += 1;
                }
                Ok((mask, acc))
            })
            .collect::<Result<_>>()?;
        for (mask, v) in level {
            table[mask] = Some(v);
        }
        // Subsets two levels down are no longer needed.
        if size >= 2 {
            for m in 1..=full {
                if m.count_ones() as usize == size - 2 && m != 0 {
                    table[m] = None;
                }
            }
        }
    }
    Ok(table[full].take().expect("full set computed"))
}

/// Entry variables `x^{(ν)}_{ij}` for `s` generic `n × n` matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenericMatrixContext {
    order: usize,
    gens: usize,
    field: Field,
}

impl GenericMatrixContext {
    pub fn new(order: usize, gens: usize, field: Field) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("matrix order must be at least 1".into()));
        }
        Ok(GenericMatrixContext { order, gens, field })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn nvars(&self) -> usize {
        self.gens * self.order * self.order
    }

    pub fn var_index(&self, nu: usize, i: usize, j: usize) -> usize {
        nu * self.order * self.order + i * self.order + j
    }

    /// Names `a{ν}_{i}{j}` with one-based indices.
    pub fn var_names(&self) -> VarNames {
        let n = self.order;
        VarNames::custom(
            (0..self.nvars())
                .map(|k| {
                    let (nu, rem) = (k / (n * n), k % (n * n));
                    format!("a{}_{}{}", nu + 1, rem / n + 1, rem % n + 1)
                })
                .collect(),
        )
    }

    pub fn generic_matrix(&self, nu: usize) -> PolyMatrix {
        let n = self.order;
        let nv = self.nvars();
        let mut m = PolyMatrix::zero(n, n, nv, self.field);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, Polynomial::var(self.var_index(nu, i, j), nv, self.field));
            }
        }
        m
    }
}

/// Image of `f` under the canonical map to generic matrices.
pub fn generic_reduce(f: &FreePoly, ctx: &GenericMatrixContext) -> Result<PolyMatrix> {
    if f.ngens() > ctx.gens {
        return Err(Error::dim(format!(
            "{} generators but only {} generic matrices",
            f.ngens(),
            ctx.gens
        )));
    }
    if f.field() != ctx.field {
        return Err(Error::dim("field mismatch with generic matrix context"));
    }
    let mats: Vec<PolyMatrix> = (0..ctx.gens).map(|nu| ctx.generic_matrix(nu)).collect();
    let (n, nv) = (ctx.order, ctx.nvars());
    let mut out = PolyMatrix::zero(n, n, nv, ctx.field);
    for (w, c) in f.terms() {
        let mut prod = PolyMatrix::identity(n, nv, ctx.field);
        for &g in w.letters() {
            prod = prod.mul(&mats[g])?;
        }
        out = out.add(&prod.scale(c))?;
    }
    Ok(out)
}

/// Whether `S_r` vanishes identically on `n × n` generic matrices.
pub fn al_verify(n: usize, r: usize) -> Result<bool> {
    al_verify_with_cap(n, r, AL_DEGREE_CAP)
}

pub fn al_verify_with_cap(n: usize, r: usize, cap: usize) -> Result<bool> {
    if r > cap {
        return Err(Error::Resource(format!(
            "degree {r} exceeds the enumeration cap {cap}"
        )));
    }
    if r == 0 {
        return Ok(false);
    }
    let ctx = GenericMatrixContext::new(n, r, Field::Rational)?;
    let mats: Vec<PolyMatrix> = (0..r).map(|nu| ctx.generic_matrix(nu)).collect();
    Ok(standard_polynomial(&mats)?.is_zero())
}

/// The matrix unit `e_{ij}` (zero-based) as a constant matrix.
pub fn matrix_unit(n: usize, i: usize, j: usize, field: Field) -> PolyMatrix {
    let mut m = PolyMatrix::zero(n, n, 0, field);
    m.set(i, j, Polynomial::one(0, field));
    m
}
