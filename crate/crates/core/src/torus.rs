//! Torus actions `σ(t)` on free or polynomial algebras with Laurent polynomial
//! dependence on `t_1..t_k`, the action axioms, and linearization of effective
//! actions by their weight-zero component.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::{Coefficient, Field};
use crate::linalg::Matrix;
use crate::parse::{evaluate, parse_expr_at, Evaluator};
use crate::poly::VarNames;
use crate::ring::FreeGenerated;

/// Largest `|exponent|` of a parameter that is carried.
pub const LAURENT_WINDOW: i32 = 64;

/// `Σ_e t^e A_e` with `e ∈ ℤ^k` and `A_e` in a freely generated algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPoly<A> {
    nparams: usize,
    ngens: usize,
    field: Field,
    terms: BTreeMap<Vec<i32>, A>,
}

fn check_window(e: &[i32]) -> Result<()> {
    if e.iter().any(|x| x.abs() > LAURENT_WINDOW) {
        return Err(Error::Resource(format!(
            "parameter exponent {e:?} is outside the window ±{LAURENT_WINDOW}"
        )));
    }
    Ok(())
}

impl<A: FreeGenerated> ParamPoly<A> {
    pub fn zero(nparams: usize, ngens: usize, field: Field) -> Self {
        ParamPoly {
            nparams,
            ngens,
            field,
            terms: BTreeMap::new(),
        }
    }

    /// `t^e · a`.
    pub fn monomial(exponent: Vec<i32>, a: A) -> Result<Self> {
        check_window(&exponent)?;
        let mut p = ParamPoly::zero(exponent.len(), a.ngens(), a.field());
        p.add_term(exponent, a)?;
        Ok(p)
    }

    /// `a` with no parameter dependence.
    pub fn constant(nparams: usize, a: A) -> Self {
        ParamPoly::monomial(vec![0; nparams], a).expect("zero exponent is in the window")
    }

    fn one(nparams: usize, ngens: usize, field: Field) -> Self {
        Self::constant(nparams, A::generator(0, ngens, field).one_like())
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &A)> {
        self.terms.iter()
    }

    /// The coefficient of `t^e`.
    pub fn coefficient(&self, exponent: &[i32]) -> A {
        self.terms
            .get(exponent)
            .cloned()
            .unwrap_or_else(|| A::generator(0, self.ngens, self.field).zero_like())
    }

    pub fn add_term(&mut self, exponent: Vec<i32>, a: A) -> Result<()> {
        check_window(&exponent)?;
        if exponent.len() != self.nparams {
            return Err(Error::dim(format!(
                "{} parameters expected, got {}",
                self.nparams,
                exponent.len()
            )));
        }
        let sum = match self.terms.remove(&exponent) {
            Some(old) => old.try_add(&a)?,
            None => a,
        };
        if !sum.is_zero() {
            self.terms.insert(exponent, sum);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (e, a) in &other.terms {
            out.add_term(e.clone(), a.clone())?;
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let mut out = ParamPoly::zero(self.nparams, self.ngens, self.field);
        for (e, a) in &self.terms {
            for (f, b) in &other.terms {
                let ef = e.iter().zip(f).map(|(x, y)| x + y).collect();
                out.add_term(ef, a.try_mul(b)?)?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        let mut out = ParamPoly::zero(self.nparams, self.ngens, self.field);
        for (e, a) in &self.terms {
            let s = a.scale(c);
            if !s.is_zero() {
                out.terms.insert(e.clone(), s);
            }
        }
        out
    }

    /// Renames parameter exponents, e.g. to place them in a larger torus.
    pub fn reparametrize(&self, nparams: usize, map: impl Fn(&[i32]) -> Vec<i32>) -> Result<Self> {
        let mut out = ParamPoly::zero(nparams, self.ngens, self.field);
        for (e, a) in &self.terms {
            out.add_term(map(e), a.clone())?;
        }
        Ok(out)
    }

    /// Value at `t = 1`.
    pub fn at_one(&self) -> A {
        let mut acc = A::generator(0, self.ngens, self.field).zero_like();
        for a in self.terms.values() {
            acc = acc.try_add(a).expect("same ring");
        }
        acc
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.values().filter_map(A::degree).max()
    }

    pub fn to_string_with(&self, names: &VarNames, params: &VarNames) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, a)| {
                let t: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(j, &x)| match x {
                        1 => params.name(j).to_string(),
                        _ => format!("{}^({x})", params.name(j)),
                    })
                    .collect();
                let body = a.to_string_with(names);
                if t.is_empty() {
                    format!("({body})")
                } else {
                    format!("{}*({body})", t.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Evaluates `Σ c · x_{w_1} ⋯ x_{w_r}` at parametric images.
fn substitute_param<A: FreeGenerated>(a: &A, images: &[ParamPoly<A>], nparams: usize) -> Result<ParamPoly<A>> {
    let ngens = images.first().map(|p| p.ngens).unwrap_or(a.ngens());
    let field = a.field();
    let mut out = ParamPoly::zero(nparams, ngens, field);
    for (c, letters) in a.word_terms() {
        let mut acc = ParamPoly::one(nparams, ngens, field);
        for &l in &letters {
            acc = acc.try_mul(&images[l])?;
        }
        out = out.try_add(&acc.scale(&c))?;
    }
    Ok(out)
}

/// An endomorphism whose images depend on the parameters `t_1..t_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricEndo<A> {
    nparams: usize,
    images: Vec<ParamPoly<A>>,
}

impl<A: FreeGenerated> ParametricEndo<A> {
    pub fn new(nparams: usize, images: Vec<ParamPoly<A>>) -> Result<Self> {
        let n = images.len();
        for (i, p) in images.iter().enumerate() {
            if p.nparams != nparams || p.ngens != n {
                return Err(Error::dim(format!(
                    "image {} has {} parameters and {} generators",
                    i + 1,
                    p.nparams,
                    p.ngens
                )));
            }
        }
        Ok(ParametricEndo { nparams, images })
    }

    /// `t`-independent endomorphism with the given images.
    pub fn constant(nparams: usize, images: &[A]) -> Result<Self> {
        Self::new(nparams, images.iter().map(|a| ParamPoly::constant(nparams, a.clone())).collect())
    }

    /// `x_i ↦ t^{m_i} x_i` with `m_i = characters[i]`.
    pub fn diagonal(characters: &[Vec<i32>], field: Field) -> Result<Self> {
        let n = characters.len();
        let k = characters.first().map(Vec::len).unwrap_or(0);
        let images = characters
            .iter()
            .enumerate()
            .map(|(i, m)| ParamPoly::monomial(m.clone(), A::generator(i, n, field)))
            .collect::<Result<_>>()?;
        Self::new(k, images)
    }

    pub fn ngens(&self) -> usize {
        self.images.len()
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    pub fn images(&self) -> &[ParamPoly<A>] {
        &self.images
    }

    pub fn field(&self) -> Field {
        self.images.first().map(|p| p.field).unwrap_or(Field::Rational)
    }

    /// `(self ∘ other)` with images `other_i(self)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.ngens() != self.ngens() || other.nparams != self.nparams {
            return Err(Error::dim("composing actions on different algebras or tori"));
        }
        let images = other
            .images
            .iter()
            .map(|q| {
                let mut acc = ParamPoly::zero(self.nparams, self.ngens(), self.field());
                for (e, a) in &q.terms {
                    let shift = ParamPoly::monomial(e.clone(), A::generator(0, self.ngens(), self.field()).one_like())?;
                    acc = acc.try_add(&shift.try_mul(&substitute_param(a, &self.images, self.nparams)?)?)?;
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        Self::new(self.nparams, images)
    }

    pub fn reparametrize(&self, nparams: usize, map: impl Fn(&[i32]) -> Vec<i32> + Copy) -> Result<Self> {
        let images = self
            .images
            .iter()
            .map(|p| p.reparametrize(nparams, map))
            .collect::<Result<_>>()?;
        Self::new(nparams, images)
    }

    pub fn at_one(&self) -> Vec<A> {
        self.images.iter().map(ParamPoly::at_one).collect()
    }

    pub fn degree(&self) -> u32 {
        self.images.iter().filter_map(ParamPoly::degree).max().unwrap_or(0)
    }

    pub fn to_strings(&self, names: &VarNames, params: &VarNames) -> Vec<String> {
        self.images.iter().map(|p| p.to_string_with(names, params)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActionCheck {
    Holds,
    /// `σ(1)` moves generator `image`.
    NotIdentityAtOne { image: usize },
    /// `σ(s)σ(t)` and `σ(st)` differ in image `image` at `s^{s_exponent} t^{t_exponent}`.
    NotMultiplicative {
        image: usize,
        s_exponent: Vec<i32>,
        t_exponent: Vec<i32>,
    },
}

impl ActionCheck {
    pub fn holds(&self) -> bool {
        *self == ActionCheck::Holds
    }
}

/// Checks `σ(1) = id` and `σ(s)σ(t) = σ(st)` with independent parameter tuples.
pub fn verify_action<A: FreeGenerated>(sigma: &ParametricEndo<A>) -> Result<ActionCheck> {
    let n = sigma.ngens();
    let field = sigma.field();
    let k = sigma.nparams;
    let s = sigma.reparametrize(2 * k, |e| e.iter().copied().chain(std::iter::repeat_n(0, e.len())).collect())?;
    let t = sigma.reparametrize(2 * k, |e| std::iter::repeat_n(0, e.len()).chain(e.iter().copied()).collect())?;
    let st = sigma.reparametrize(2 * k, |e| e.iter().chain(e.iter()).copied().collect())?;
    let lhs = s.compose(&t)?;
    for i in 0..n {
        let diff = lhs.images[i].try_add(&st.images[i].scale(&-field.one()))?;
        let first = diff.terms().next().map(|(e, _)| e.clone());
        if let Some(e) = first {
            return Ok(ActionCheck::NotMultiplicative {
                image: i,
                s_exponent: e[..k].to_vec(),
                t_exponent: e[k..].to_vec(),
            });
        }
    }
    for (i, a) in sigma.at_one().iter().enumerate() {
        if *a != A::generator(i, n, field) {
            return Ok(ActionCheck::NotIdentityAtOne { image: i });
        }
    }
    Ok(ActionCheck::Holds)
}

/// Result of linearizing `σ`: `β ∘ τ(t) = σ(t) ∘ β` with `τ` diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct Linearization<A> {
    pub beta: Vec<A>,
    pub tau: ParametricEndo<A>,
    /// `k × n`; column `i` is the character of `x_i`.
    pub power_matrix: Vec<Vec<i32>>,
}

/// Column `i` of the power matrix: the character `m_i` with linear part `t^{m_i} x_i`.
fn diagonal_character<A: FreeGenerated>(sigma: &ParametricEndo<A>, i: usize) -> Result<Vec<i32>> {
    let n = sigma.ngens();
    let x = A::generator(i, n, sigma.field());
    let linear: Vec<(&Vec<i32>, A)> = sigma.images[i]
        .terms()
        .map(|(e, a)| (e, a.homogeneous_component(1)))
        .filter(|(_, a)| !a.is_zero())
        .collect();
    match linear.as_slice() {
        [(e, a)] if *a == x => Ok((*e).clone()),
        _ => Err(Error::InvalidInput(format!(
            "the linear part of image {} is not a monomial t^m x_{}",
            i + 1,
            i + 1
        ))),
    }
}

/// Singular means rank below `k`: some one-parameter subgroup acts trivially on the linear part.
fn power_matrix_is_singular(columns: &[Vec<i32>], k: usize) -> bool {
    let n = columns.len();
    if k > n {
        return true;
    }
    let f = Field::Rational;
    let rows = (0..k)
        .map(|r| columns.iter().map(|c| f.from_i64(c[r] as i64)).collect())
        .collect();
    Matrix::from_rows(f, rows)
        .map(|m| m.rank() < k)
        .unwrap_or(true)
}

/// `β_i` is the `t^{m_i}` coefficient of `σ_i`, the weight-zero component of
/// `τ(t^{-1})` followed by `σ(t)`.
pub fn torus_linearize<A: FreeGenerated>(sigma: &ParametricEndo<A>) -> Result<Linearization<A>> {
    let check = verify_action(sigma)?;
    if !check.holds() {
        return Err(Error::InvalidInput(format!("not a torus action: {check:?}")));
    }
    let n = sigma.ngens();
    let k = sigma.nparams;
    let columns = (0..n)
        .map(|i| diagonal_character(sigma, i))
        .collect::<Result<Vec<_>>>()?;
    if power_matrix_is_singular(&columns, k) {
        return Err(Error::NotEffective(format!(
            "the power matrix {columns:?} (columns are characters) is singular"
        )));
    }
    let beta: Vec<A> = (0..n).map(|i| sigma.images[i].coefficient(&columns[i])).collect();
    let tau = ParametricEndo::diagonal(&columns, sigma.field())?;
    let b = ParametricEndo::constant(k, &beta)?;
    if b.compose(&tau)? != sigma.compose(&b)? {
        return Err(Error::Invariant("the weight-zero component does not conjugate σ to τ".into()));
    }
    let power_matrix = (0..k).map(|r| columns.iter().map(|c| c[r]).collect()).collect();
    Ok(Linearization { beta, tau, power_matrix })
}

struct LaurentEval<'a, A> {
    names: &'a VarNames,
    params: &'a VarNames,
    field: Field,
    _marker: std::marker::PhantomData<A>,
}

impl<A: FreeGenerated> LaurentEval<'_, A> {
    fn one(&self) -> ParamPoly<A> {
        ParamPoly::one(self.params.len(), self.names.len(), self.field)
    }

    /// `c t^e` with `c` a scalar, if the value has that shape.
    fn as_scalar_monomial(&self, a: &ParamPoly<A>) -> Option<(Vec<i32>, Coefficient)> {
        let mut it = a.terms();
        let (e, x) = it.next()?;
        if it.next().is_some() {
            return None;
        }
        match x.word_terms().as_slice() {
            [(c, letters)] if letters.is_empty() => Some((e.clone(), c.clone())),
            _ => None,
        }
    }
}

impl<A: FreeGenerated> Evaluator for LaurentEval<'_, A> {
    type Value = ParamPoly<A>;

    fn number(&self, n: &BigInt) -> Result<ParamPoly<A>> {
        Ok(self.one().scale(&self.field.from_bigint(n)))
    }

    fn variable(&self, name: &str) -> Option<ParamPoly<A>> {
        let (n, k) = (self.names.len(), self.params.len());
        if let Some(i) = self.names.index_of(name) {
            return Some(ParamPoly::constant(k, A::generator(i, n, self.field)));
        }
        self.params.index_of(name).map(|j| {
            let mut e = vec![0; k];
            e[j] = 1;
            ParamPoly::monomial(e, A::generator(0, n, self.field).one_like()).expect("in window")
        })
    }

    fn add(&self, a: &ParamPoly<A>, b: &ParamPoly<A>) -> Result<ParamPoly<A>> {
        a.try_add(b)
    }

    fn sub(&self, a: &ParamPoly<A>, b: &ParamPoly<A>) -> Result<ParamPoly<A>> {
        a.try_add(&b.scale(&-self.field.one()))
    }

    fn mul(&self, a: &ParamPoly<A>, b: &ParamPoly<A>) -> Result<ParamPoly<A>> {
        a.try_mul(b)
    }

    fn neg(&self, a: &ParamPoly<A>) -> Result<ParamPoly<A>> {
        Ok(a.scale(&-self.field.one()))
    }

    fn div(&self, a: &ParamPoly<A>, b: &ParamPoly<A>) -> std::result::Result<ParamPoly<A>, String> {
        let inv = self.pow(b, -1)?;
        a.try_mul(&inv).map_err(|e| e.to_string())
    }

    fn pow(&self, a: &ParamPoly<A>, e: i64) -> std::result::Result<ParamPoly<A>, String> {
        let mut base = a.clone();
        if e < 0 {
            let (exp, c) = self
                .as_scalar_monomial(a)
                .ok_or("only scalar Laurent monomials can be inverted")?;
            let inv = c.inv().ok_or("division by zero")?;
            base = ParamPoly::monomial(
                exp.iter().map(|x| -x).collect(),
                A::generator(0, self.names.len(), self.field).one_like().scale(&inv),
            )
            .map_err(|e| e.to_string())?;
        }
        let mut acc = self.one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.try_mul(&base).map_err(|e| e.to_string())?;
        }
        Ok(acc)
    }
}

/// Parses an image such as `t1^-2*x1 + (t1 - t1^2)*x2^3`; the parameters
/// commute with everything.
pub fn parse_param_poly_at<A: FreeGenerated>(
    text: &str,
    names: &VarNames,
    params: &VarNames,
    field: Field,
    line: usize,
) -> Result<ParamPoly<A>> {
    let expr = parse_expr_at(text, line)?;
    evaluate(
        &expr,
        &LaurentEval {
            names,
            params,
            field,
            _marker: std::marker::PhantomData,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endo::PolyEndo;
    use crate::free::{parse_free, FreePoly};
    use crate::poly::{parse_polynomial, Polynomial};
    use proptest::prelude::*;

    fn q() -> Field {
        Field::Rational
    }

    fn endo<A: FreeGenerated>(images: &[&str], n: usize, k: usize) -> ParametricEndo<A> {
        let names = VarNames::standard(n);
        let params = VarNames::custom((1..=k).map(|j| format!("t{j}")).collect());
        let imgs = images
            .iter()
            .map(|s| parse_param_poly_at::<A>(s, &names, &params, q(), 1).unwrap())
            .collect();
        ParametricEndo::new(k, imgs).unwrap()
    }

    #[test]
    fn action_examples() {
        let diag = endo::<Polynomial>(&["t1*x1", "t1^-2*x2"], 2, 1);
        assert!(verify_action(&diag).unwrap().holds());
        let bad = endo::<Polynomial>(&["t1*x1 + t1^2*x1^2"], 1, 1);
        assert_eq!(
            verify_action(&bad).unwrap(),
            ActionCheck::NotMultiplicative {
                image: 0,
                s_exponent: vec![2],
                t_exponent: vec![1]
            }
        );
        let moved = endo::<Polynomial>(&["0"], 1, 1);
        assert_eq!(verify_action(&moved).unwrap(), ActionCheck::NotIdentityAtOne { image: 0 });
    }

    #[test]
    fn linearize_plane_example() {
        let sigma = endo::<Polynomial>(&["t1*x1", "t1^2*x2 + (t1^2 - t1^3)*x1^3"], 2, 1);
        assert!(verify_action(&sigma).unwrap().holds());
        let lin = torus_linearize(&sigma).unwrap();
        let names = VarNames::standard(2);
        let p = |s: &str| parse_polynomial(s, &names, q()).unwrap();
        assert_eq!(lin.beta, vec![p("x1"), p("x2 + x1^3")]);
        assert_eq!(lin.power_matrix, vec![vec![1, 2]]);
        assert_eq!(lin.tau, endo::<Polynomial>(&["t1*x1", "t1^2*x2"], 2, 1));
        assert!(matches!(
            torus_linearize(&endo::<Polynomial>(&["x1", "x2"], 2, 1)),
            Err(Error::NotEffective(_))
        ));
    }

    #[test]
    fn linear_actions_need_no_conjugation() {
        let sigma = endo::<Polynomial>(&["t1*x1", "t2*x2"], 2, 2);
        let lin = torus_linearize(&sigma).unwrap();
        assert_eq!(lin.beta, PolyEndo::identity(2, q()).images());
        let singular = endo::<Polynomial>(&["t1*t2*x1", "t1^2*t2^2*x2"], 2, 2);
        assert!(matches!(torus_linearize(&singular), Err(Error::NotEffective(_))));
    }

    #[test]
    fn free_algebra_conjugation() {
        let names = VarNames::standard(3);
        let f = |s: &str| parse_free(s, &names, q()).unwrap();
        let beta0 = [f("x1"), f("x2"), f("x3 + x1*x2*x1 - x2*x1^2")];
        let beta0_inv = [f("x1"), f("x2"), f("x3 - x1*x2*x1 + x2*x1^2")];
        let tau = ParametricEndo::<FreePoly>::diagonal(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], q()).unwrap();
        let b = ParametricEndo::constant(3, &beta0).unwrap();
        let bi = ParametricEndo::constant(3, &beta0_inv).unwrap();
        let sigma = b.compose(&tau).unwrap().compose(&bi).unwrap();
        assert!(verify_action(&sigma).unwrap().holds());
        let lin = torus_linearize(&sigma).unwrap();
        assert_eq!(lin.beta, beta0.to_vec());
        assert!(lin.beta[2] != lin.beta[2].abelianize_free());
    }

    trait Abelianized {
        fn abelianize_free(&self) -> FreePoly;
    }

    impl Abelianized for FreePoly {
        /// Sorts every word, which changes the element iff the order of letters matters.
        fn abelianize_free(&self) -> FreePoly {
            let mut out = FreePoly::zero(self.ngens(), self.field());
            for (w, c) in self.terms() {
                let mut l = w.letters().to_vec();
                l.sort();
                out.add_term(crate::free::Word::new(l), c.clone());
            }
            out
        }
    }

    #[test]
    fn laurent_window_is_enforced() {
        let names = VarNames::standard(1);
        let params = VarNames::custom(vec!["t1".into()]);
        let r = parse_param_poly_at::<Polynomial>("t1^65*x1", &names, &params, q(), 1);
        assert!(r.unwrap_err().to_string().contains("window"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn weight_zero_is_idempotent(c in -3i64..4, d in -3i64..4) {
            let names = VarNames::standard(2);
            let p = |s: &str| parse_polynomial(s, &names, q()).unwrap();
            let beta = vec![p("x1"), &p("x2") + &p(&format!("{c}*x1^2 + {d}*x1^3"))];
            let b = ParametricEndo::constant(1, &beta).unwrap();
            // A t-independent map is its own weight-zero part.
            for (i, img) in b.images().iter().enumerate() {
                prop_assert_eq!(&img.coefficient(&[0]), &beta[i]);
            }
            let sigma = endo::<Polynomial>(&["t1*x1", &format!("t1^2*x2 + (t1^2 - t1^3)*x1^3 + {c}*(t1^2 - t1^4)*x1^4")], 2, 1);
            let lin = torus_linearize(&sigma).unwrap();
            prop_assert!(lin.beta.iter().filter_map(Polynomial::degree).max().unwrap() <= sigma.degree());
        }
    }
}
