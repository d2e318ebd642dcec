//! The h-augmented Weyl algebra in normal order.
//!
//! Elements are combinations of `x^a d^b h^c` with every `x` to the left of
//! every `d`. The only relation needed for rewriting is `d_i x_j = x_j d_i +
//! δ_ij h` with `h` central.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::endo::PolyEndo;
use crate::error::{Error, Result};
use crate::field::{Coefficient, Field};
use crate::parse::{evaluate, parse_expr_at, pow_by_squaring, Evaluator};
use crate::poly::{write_term, Monomial, Polynomial, VarNames};
use crate::ring::Algebra;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylMonomial {
    x: Vec<u32>,
    d: Vec<u32>,
    h: u32,
}

impl WeylMonomial {
    pub fn new(x: Vec<u32>, d: Vec<u32>, h: u32) -> Self {
        assert_eq!(x.len(), d.len());
        WeylMonomial { x, d, h }
    }

    pub fn one(n: usize) -> Self {
        WeylMonomial {
            x: vec![0; n],
            d: vec![0; n],
            h: 0,
        }
    }

    pub fn x_exponents(&self) -> &[u32] {
        &self.x
    }

    pub fn d_exponents(&self) -> &[u32] {
        &self.d
    }

    pub fn h_exponent(&self) -> u32 {
        self.h
    }

    /// Grading with `Deg x_i = Deg d_i = 1` and `Deg h = 2`.
    pub fn weight(&self) -> u32 {
        self.x.iter().sum::<u32>() + self.d.iter().sum::<u32>() + 2 * self.h
    }
}

impl Ord for WeylMonomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.x.cmp(&other.x))
            .then_with(|| self.d.cmp(&other.d))
            .then_with(|| self.h.cmp(&other.h))
    }
}

impl PartialOrd for WeylMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// `C(β, j)·C(α, j)·j!`, the coefficient of `x^{α−j} d^{β−j} h^j` in `d^β x^α`.
fn reorder_coefficient(beta: u32, alpha: u32, j: u32) -> BigInt {
    let mut num = BigInt::from(1);
    for t in 0..j {
        num *= BigInt::from(beta - t) * BigInt::from(alpha - t);
    }
    let mut fact = BigInt::from(1);
    for t in 1..=j {
        fact *= BigInt::from(t);
    }
    num / fact
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    n: usize,
    field: Field,
    terms: BTreeMap<WeylMonomial, Coefficient>,
}

impl WeylElement {
    pub fn zero(n: usize, field: Field) -> Self {
        WeylElement {
            n,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize, field: Field) -> Self {
        Self::term(field.one(), WeylMonomial::one(n))
    }

    pub fn constant(c: Coefficient, n: usize) -> Self {
        Self::term(c, WeylMonomial::one(n))
    }

    pub fn term(c: Coefficient, m: WeylMonomial) -> Self {
        let mut e = Self::zero(m.x.len(), c.field());
        e.add_term(m, c);
        e
    }

    pub fn x(i: usize, n: usize, field: Field) -> Self {
        let mut m = WeylMonomial::one(n);
        m.x[i] = 1;
        Self::term(field.one(), m)
    }

    pub fn d(i: usize, n: usize, field: Field) -> Self {
        let mut m = WeylMonomial::one(n);
        m.d[i] = 1;
        Self::term(field.one(), m)
    }

    pub fn h(n: usize, field: Field) -> Self {
        let mut m = WeylMonomial::one(n);
        m.h = 1;
        Self::term(field.one(), m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&WeylMonomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &WeylMonomial) -> Coefficient {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add_term(&mut self, m: WeylMonomial, c: Coefficient) {
        if c.is_zero() {
            return;
        }
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

    /// Weights of the terms present, under `Deg h = 2`.
    pub fn weights(&self) -> std::collections::BTreeSet<u32> {
        self.terms.keys().map(WeylMonomial::weight).collect()
    }

    fn compatible(&self, other: &WeylElement) -> Result<()> {
        if self.n != other.n || self.field != other.field {
            return Err(Error::dim(format!(
                "Weyl elements in different algebras ({} vs {} generator pairs)",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &WeylElement) -> Result<WeylElement> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &WeylElement) -> Result<WeylElement> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> WeylElement {
        let mut out = WeylElement::zero(self.n, self.field);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    /// Product in normal form.
    pub fn checked_mul(&self, other: &WeylElement) -> Result<WeylElement> {
        self.compatible(other)?;
        let mut out = WeylElement::zero(self.n, self.field);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                self.push_monomial_product(ma, mb, &c, &mut out);
            }
        }
        Ok(out)
    }

    fn push_monomial_product(
        &self,
        a: &WeylMonomial,
        b: &WeylMonomial,
        c: &Coefficient,
        out: &mut WeylElement,
    ) {
        let n = self.n;
        // Per index, the admissible contraction counts j_i and their weights.
        let choices: Vec<Vec<(u32, Coefficient)>> = (0..n)
            .map(|i| {
                let (beta, alpha) = (a.d[i], b.x[i]);
                (0..=beta.min(alpha))
                    .map(|j| (j, self.field.from_bigint(&reorder_coefficient(beta, alpha, j))))
                    .filter(|(_, w)| !w.is_zero())
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; n];
        loop {
            let mut coeff = c.clone();
            let mut m = WeylMonomial {
                x: vec![0; n],
                d: vec![0; n],
                h: a.h + b.h,
            };
            for i in 0..n {
                let (j, w) = &choices[i][idx[i]];
                coeff *= w;
                m.x[i] = a.x[i] + b.x[i] - j;
                m.d[i] = a.d[i] + b.d[i] - j;
                m.h += j;
            }
            out.add_term(m, coeff);
            let mut k = 0;
            loop {
                if k == n {
                    return;
                }
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    pub fn pow(&self, e: u32) -> WeylElement {
        let mut acc = WeylElement::one(self.n, self.field);
        for _ in 0..e {
            acc = acc.checked_mul(self).expect("same algebra");
        }
        acc
    }

    pub fn commutator(&self, other: &WeylElement) -> Result<WeylElement> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    /// Reads a commutative polynomial in `x_1..x_n, p_1..p_n` as the normally
    /// ordered element with `p_i ↦ d_i`.
    pub fn from_normal_polynomial(p: &Polynomial) -> Result<WeylElement> {
        if p.nvars() % 2 != 0 {
            return Err(Error::dim("phase-space polynomial needs an even variable count"));
        }
        let n = p.nvars() / 2;
        let mut out = WeylElement::zero(n, p.field());
        for (m, c) in p.terms() {
            let e = m.exponents();
            out.add_term(WeylMonomial::new(e[..n].to_vec(), e[n..].to_vec(), 0), c.clone());
        }
        Ok(out)
    }

    /// Sets `h = 0` and reads the result as a polynomial in `x_1..x_n, p_1..p_n`.
    pub fn classical(&self) -> Polynomial {
        let nv = 2 * self.n;
        let mut out = Polynomial::zero(nv, self.field);
        for (m, c) in &self.terms {
            if m.h > 0 {
                continue;
            }
            let mut e = m.x.clone();
            e.extend_from_slice(&m.d);
            out.add_term(Monomial::new(e), c.clone());
        }
        out
    }

    /// Substitutes `h = 1`, giving an element of the plain Weyl algebra
    /// represented with `h`-exponent zero.
    pub fn specialize_h_one(&self) -> WeylElement {
        let mut out = WeylElement::zero(self.n, self.field);
        for (m, c) in &self.terms {
            let mut m = m.clone();
            m.h = 0;
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn names(n: usize) -> VarNames {
        VarNames::custom(
            (1..=n)
                .map(|i| format!("x{i}"))
                .chain((1..=n).map(|i| format!("d{i}")))
                .chain(std::iter::once("h".to_string()))
                .collect(),
        )
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = WeylElement::names(self.n);
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let exps = m.x.iter().chain(&m.d).chain(std::iter::once(&m.h));
            let body: Vec<String> = exps
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        names.name(i).to_string()
                    } else {
                        format!("{}^{e}", names.name(i))
                    }
                })
                .collect();
            write_term(f, c, &body.join("*"), first)?;
            first = false;
        }
        Ok(())
    }
}

impl Algebra for WeylElement {
    fn field(&self) -> Field {
        self.field
    }

    fn zero_like(&self) -> Self {
        WeylElement::zero(self.n, self.field)
    }

    fn one_like(&self) -> Self {
        WeylElement::one(self.n, self.field)
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
        WeylElement::scale(self, c)
    }
}

struct WeylEval {
    n: usize,
    field: Field,
    names: VarNames,
}

impl Evaluator for WeylEval {
    type Value = WeylElement;

    fn number(&self, v: &BigInt) -> Result<WeylElement> {
        Ok(WeylElement::constant(self.field.from_bigint(v), self.n))
    }

    fn variable(&self, name: &str) -> Option<WeylElement> {
        let i = self.names.index_of(name)?;
        Some(if i < self.n {
            WeylElement::x(i, self.n, self.field)
        } else if i < 2 * self.n {
            WeylElement::d(i - self.n, self.n, self.field)
        } else {
            WeylElement::h(self.n, self.field)
        })
    }

    fn add(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        a.checked_add(b)
    }

    fn sub(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        a.checked_sub(b)
    }

    fn mul(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        a.checked_mul(b)
    }

    fn neg(&self, a: &WeylElement) -> Result<WeylElement> {
        Ok(a.scale(&-self.field.one()))
    }

    fn div(&self, a: &WeylElement, b: &WeylElement) -> std::result::Result<WeylElement, String> {
        let one = WeylMonomial::one(self.n);
        if b.terms.len() != 1 || !b.terms.contains_key(&one) {
            return Err("division is only allowed by nonzero constants".into());
        }
        Ok(a.scale(&b.coefficient(&one).inv().expect("nonzero")))
    }

    fn pow(&self, a: &WeylElement, e: i64) -> std::result::Result<WeylElement, String> {
        if e < 0 {
            return Err("negative exponents are not allowed here".into());
        }
        pow_by_squaring(self, WeylElement::one(self.n, self.field), a, e as u64)
            .map_err(|e| e.to_string())
    }
}

/// Parses a Weyl expression in `x1..xn`, `d1..dn`, `h`; products keep their order.
pub fn parse_weyl(text: &str, n: usize, field: Field) -> Result<WeylElement> {
    parse_weyl_at(text, n, field, 1)
}

pub fn parse_weyl_at(text: &str, n: usize, field: Field, line: usize) -> Result<WeylElement> {
    let expr = parse_expr_at(text, line)?;
    evaluate(
        &expr,
        &WeylEval {
            n,
            field,
            names: WeylElement::names(n),
        },
    )
}

/// An endomorphism given by the images of `x_1..x_n, d_1..d_n`; `h` is sent
/// to `h_scale · h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylEndo {
    n: usize,
    images: Vec<WeylElement>,
    h_scale: Coefficient,
}

impl WeylEndo {
    pub fn identity(n: usize, field: Field) -> Self {
        let images = (0..n)
            .map(|i| WeylElement::x(i, n, field))
            .chain((0..n).map(|i| WeylElement::d(i, n, field)))
            .collect();
        WeylEndo {
            n,
            images,
            h_scale: field.one(),
        }
    }

    pub fn new(images: Vec<WeylElement>, h_scale: Coefficient) -> Result<Self> {
        if images.len() % 2 != 0 {
            return Err(Error::dim("need images for every x_i and d_i"));
        }
        if h_scale.is_zero() {
            return Err(Error::InvalidInput("h must be sent to a nonzero multiple of h".into()));
        }
        let n = images.len() / 2;
        for img in &images {
            if img.n != n || img.field != h_scale.field() {
                return Err(Error::dim(format!(
                    "image lives in a different algebra than W_{n}"
                )));
            }
        }
        Ok(WeylEndo { n, images, h_scale })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[WeylElement] {
        &self.images
    }

    pub fn h_scale(&self) -> &Coefficient {
        &self.h_scale
    }

    pub fn field(&self) -> Field {
        self.h_scale.field()
    }

    /// Image of `f`, expanded term by term in normal order.
    pub fn apply(&self, f: &WeylElement) -> Result<WeylElement> {
        if f.n != self.n || f.field != self.field() {
            return Err(Error::dim("element and endomorphism live in different algebras"));
        }
        let (n, field) = (self.n, self.field());
        let mut cache: Vec<Vec<WeylElement>> = vec![vec![WeylElement::one(n, field)]; 2 * n];
        let mut power = |k: usize, e: u32| -> WeylElement {
            while cache[k].len() <= e as usize {
                let next = cache[k].last().unwrap().checked_mul(&self.images[k]).unwrap();
                cache[k].push(next);
            }
            cache[k][e as usize].clone()
        };
        let mut out = WeylElement::zero(n, field);
        for (m, c) in &f.terms {
            let mut mono = WeylMonomial::one(n);
            mono.h = m.h;
            let mut t = WeylElement::term(&self.h_scale.pow(m.h) * c, mono);
            for i in 0..n {
                if m.x[i] > 0 {
                    t = t.checked_mul(&power(i, m.x[i]))?;
                }
            }
            for i in 0..n {
                if m.d[i] > 0 {
                    t = t.checked_mul(&power(n + i, m.d[i]))?;
                }
            }
            out = out.checked_add(&t)?;
        }
        Ok(out)
    }

    /// `(self ∘ other)(f) = self(other(f))`.
    pub fn compose(&self, other: &WeylEndo) -> Result<WeylEndo> {
        if self.n != other.n {
            return Err(Error::dim("Weyl endomorphisms of different rank"));
        }
        let images = other
            .images
            .iter()
            .map(|g| self.apply(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(WeylEndo {
            n: self.n,
            images,
            h_scale: &self.h_scale * &other.h_scale,
        })
    }

    /// Verifies every defining relation on the images; reports the first
    /// violated pair.
    pub fn check_relations(&self) -> Result<()> {
        let (n, field) = (self.n, self.field());
        let names = WeylElement::names(n);
        let h = WeylElement::h(n, field).scale(&self.h_scale);
        let zero = WeylElement::zero(n, field);
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                let got = self.images[b].commutator(&self.images[a])?;
                // [d_i, x_j] = δ_ij h; every other pair commutes.
                let expected = if b == a + n { h.clone() } else { zero.clone() };
                if got != expected {
                    return Err(Error::Relation {
                        left: names.name(b).to_string(),
                        right: names.name(a).to_string(),
                        got: got.to_string(),
                        expected: expected.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_endomorphism(&self) -> bool {
        self.check_relations().is_ok()
    }

    /// The `h = 0` quotient as a map of `x_1..x_n, p_1..p_n`.
    pub fn classical_limit(&self) -> Result<PolyEndo> {
        if !self.h_scale.is_one() {
            return Err(Error::Unsupported(format!(
                "endomorphism rescales h by {}",
                self.h_scale
            )));
        }
        PolyEndo::new(self.images.iter().map(WeylElement::classical).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> WeylElement {
        parse_weyl(s, 1, Field::Rational).unwrap()
    }

    fn w2(s: &str) -> WeylElement {
        parse_weyl(s, 2, Field::Rational).unwrap()
    }

    #[test]
    fn defining_relation() {
        assert_eq!(w("d1*x1"), w("x1*d1 + h"));
        assert_eq!(w("d1^2*x1"), w("x1*d1^2 + 2*h*d1"));
        assert_eq!(w("x1*d1").to_string(), "x1*d1");
    }

    #[test]
    fn commutators() {
        assert_eq!(w2("d1").commutator(&w2("x1")).unwrap(), w2("h"));
        assert!(w2("x1").commutator(&w2("x2")).unwrap().is_zero());
        assert_eq!(w2("d1").commutator(&w2("x1^2")).unwrap(), w2("2*h*x1"));
        assert!(w2("d2").commutator(&w2("x1")).unwrap().is_zero());
    }

    #[test]
    fn printing_is_normal_ordered() {
        assert_eq!(w("d1*x1").to_string(), "x1*d1 + h");
    }

    #[test]
    fn endomorphism_checks() {
        let f = Field::Rational;
        let good = WeylEndo::new(vec![w("x1 + d1^2"), w("d1")], f.one()).unwrap();
        assert!(good.is_endomorphism());
        let bad = WeylEndo::new(vec![w("2*x1"), w("d1")], f.one()).unwrap();
        match bad.check_relations() {
            Err(Error::Relation { got, expected, .. }) => {
                assert_eq!(got, "2*h");
                assert_eq!(expected, "h");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(WeylEndo::identity(2, f).is_endomorphism());
        // h ↦ 2h makes x ↦ 2x admissible
        let dil = WeylEndo::new(vec![w("2*x1"), w("d1")], f.from_i64(2)).unwrap();
        assert!(dil.is_endomorphism());
        assert!(matches!(dil.classical_limit(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn apply_respects_normal_order() {
        let f = Field::Rational;
        let phi = WeylEndo::new(vec![w("x1 + d1^2"), w("d1")], f.one()).unwrap();
        // d x = x d + h, so its image is d(x + d^2) = (x + d^2) d + h
        let img = phi.apply(&w("d1*x1")).unwrap();
        assert_eq!(img, w("x1*d1 + d1^3 + h"));
    }

    #[test]
    fn classical_limit_reads_off_images() {
        let f = Field::Rational;
        let phi = WeylEndo::new(vec![w("x1 + d1^2"), w("d1")], f.one()).unwrap();
        let lim = phi.classical_limit().unwrap();
        assert_eq!(lim.images()[0].to_string_with(&VarNames::symplectic(1)), "p1^2 + x1");
        assert_eq!(
            WeylEndo::identity(1, f).classical_limit().unwrap(),
            PolyEndo::identity(2, f)
        );
    }

    #[test]
    fn h_one_recovers_plain_weyl_relation() {
        let lhs = w("d1*x1").specialize_h_one();
        assert_eq!(lhs, w("x1*d1 + 1"));
    }

    fn small_weyl() -> impl Strategy<Value = WeylElement> {
        proptest::collection::vec(((0u32..3, 0u32..3, 0u32..2), -3i64..4), 0..4).prop_map(|ts| {
            let mut e = WeylElement::zero(1, Field::Rational);
            for ((a, b, c), k) in ts {
                e.add_term(WeylMonomial::new(vec![a], vec![b], c), Field::Rational.from_i64(k));
            }
            e
        })
    }

    proptest! {
        #[test]
        fn product_is_associative(a in small_weyl(), b in small_weyl(), c in small_weyl()) {
            let l = a.checked_mul(&b).unwrap().checked_mul(&c).unwrap();
            let r = a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn h_is_central(a in small_weyl()) {
            prop_assert!(WeylElement::h(1, Field::Rational).commutator(&a).unwrap().is_zero());
        }

        #[test]
        fn grading_is_multiplicative(a in small_weyl(), b in small_weyl()) {
            let (wa, wb) = (a.weights(), b.weights());
            if wa.len() == 1 && wb.len() == 1 {
                let p = a.checked_mul(&b).unwrap();
                let expected = wa.iter().next().unwrap() + wb.iter().next().unwrap();
                prop_assert!(p.weights().iter().all(|&d| d == expected));
            }
        }

        #[test]
        fn print_parse_round_trip(a in small_weyl()) {
            prop_assert_eq!(parse_weyl(&a.to_string(), 1, Field::Rational).unwrap(), a);
        }
    }
}
