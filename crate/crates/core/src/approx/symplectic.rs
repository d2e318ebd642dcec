use crate::endo::{is_symplectomorphism, symplectic_rank, symplectic_violation, PolyEndo};
use crate::error::{Error, Result};
use crate::field::{Coefficient, Field};
use crate::linalg::Matrix;
use crate::poly::{Height, Monomial, Polynomial, VarNames};

use super::{ApproxStep, Residual};

/// Residual degree above which symplectic residuals are truncated. Waring
/// steps emit many factors, so this is lower than for the plain procedure.
pub const SYMPLECTIC_EXACT_DEGREE_CAP: u32 = 16;

/// Largest coefficient magnitude tried for Waring forms.
const WARING_COEFFICIENT_CAP: i64 = 6;

/// Tame symplectic factors on `x_1..x_n, p_1..p_n`.
#[derive(Clone, Debug, PartialEq)]
pub enum SymplecticFactor {
    /// `x_i ↦ x_i + ∂G/∂p_i` with `G` depending on `p` only.
    XShear(Polynomial),
    /// `p_i ↦ p_i − ∂G/∂x_i` with `G` depending on `x` only.
    PShear(Polynomial),
    /// `y ↦ A y` on `y = (x, p)` with `A` symplectic.
    Linear(Matrix),
    /// Time-one flow of `c ℓ^{k+1}` for a linear form `ℓ` (coefficients on `x` then `p`).
    FormShear {
        form: Vec<Coefficient>,
        coefficient: Coefficient,
        degree: u32,
    },
}

impl SymplecticFactor {
    pub fn nvars(&self) -> usize {
        match self {
            SymplecticFactor::XShear(g) | SymplecticFactor::PShear(g) => g.nvars(),
            SymplecticFactor::Linear(a) => a.rows(),
            SymplecticFactor::FormShear { form, .. } => form.len(),
        }
    }

    pub fn field(&self) -> Field {
        match self {
            SymplecticFactor::XShear(g) | SymplecticFactor::PShear(g) => g.field(),
            SymplecticFactor::Linear(a) => a.field(),
            SymplecticFactor::FormShear { coefficient, .. } => coefficient.field(),
        }
    }

    pub fn to_endo(&self) -> Result<PolyEndo> {
        let nv = self.nvars();
        let n = symplectic_rank(nv)?;
        let field = self.field();
        let mut images: Vec<Polynomial> = (0..nv).map(|i| Polynomial::var(i, nv, field)).collect();
        match self {
            SymplecticFactor::XShear(g) => {
                if (0..n).any(|i| g.depends_on(i)) {
                    return Err(Error::InvalidInput("x-shear generator depends on x".into()));
                }
                for i in 0..n {
                    images[i] = &images[i] + &g.partial(n + i)?;
                }
            }
            SymplecticFactor::PShear(g) => {
                if (n..nv).any(|i| g.depends_on(i)) {
                    return Err(Error::InvalidInput("p-shear generator depends on p".into()));
                }
                for i in 0..n {
                    images[n + i] = &images[n + i] - &g.partial(i)?;
                }
            }
            SymplecticFactor::Linear(a) => {
                let e = PolyEndo::from_linear(a)?;
                if !is_symplectomorphism(&e)? {
                    return Err(Error::NotSymplectic {
                        degree: 1,
                        residual: e.to_string_with(&VarNames::symplectic(n)),
                    });
                }
                return Ok(e);
            }
            SymplecticFactor::FormShear {
                form,
                coefficient,
                degree,
            } => {
                let ell = linear_form(form, field);
                let l = ell
                    .pow(*degree)
                    .scale(&(coefficient * &field.from_i64(*degree as i64 + 1)));
                for i in 0..n {
                    images[i] = &images[i] + &l.scale(&form[n + i]);
                    images[n + i] = &images[n + i] - &l.scale(&form[i]);
                }
            }
        }
        PolyEndo::new(images)
    }

    pub fn inverse(&self) -> Result<SymplecticFactor> {
        Ok(match self {
            SymplecticFactor::XShear(g) => SymplecticFactor::XShear(-g),
            SymplecticFactor::PShear(g) => SymplecticFactor::PShear(-g),
            SymplecticFactor::Linear(a) => {
                SymplecticFactor::Linear(a.inverse().ok_or(Error::NotLocallyInvertible)?)
            }
            SymplecticFactor::FormShear {
                form,
                coefficient,
                degree,
            } => SymplecticFactor::FormShear {
                form: form.clone(),
                coefficient: -coefficient,
                degree: *degree,
            },
        })
    }

    /// Recognizes a single symplectic factor from its map.
    pub fn classify(e: &PolyEndo) -> Result<SymplecticFactor> {
        let nv = e.nvars();
        let n = symplectic_rank(nv)?;
        let field = e.field();
        let cannot = |why: &str| Error::CannotLift(format!("{why}: {}", e.to_string_with(&VarNames::symplectic(n))));
        if e.degree() <= 1 {
            let f = SymplecticFactor::Linear(e.linear_matrix());
            return match f.to_endo() {
                Ok(_) => Ok(f),
                Err(_) => Err(cannot("linear map is not symplectic")),
            };
        }
        let defect: Vec<Polynomial> = (0..nv)
            .map(|i| e.image(i) - &Polynomial::var(i, nv, field))
            .collect();
        let (f, g) = defect.split_at(n);
        if g.iter().all(Polynomial::is_zero) && f.iter().all(|fi| (0..n).all(|j| !fi.depends_on(j))) {
            let gen = integrate(f, |i| n + i, nv, field)?;
            let cand = SymplecticFactor::XShear(gen);
            if cand.to_endo().ok().as_ref() == Some(e) {
                return Ok(cand);
            }
            return Err(cannot("x-shear is not a gradient"));
        }
        if f.iter().all(Polynomial::is_zero) && g.iter().all(|gi| (n..nv).all(|j| !gi.depends_on(j))) {
            let neg: Vec<Polynomial> = g.iter().map(|p| -p).collect();
            let gen = integrate(&neg, |i| i, nv, field)?;
            let cand = SymplecticFactor::PShear(gen);
            if cand.to_endo().ok().as_ref() == Some(e) {
                return Ok(cand);
            }
            return Err(cannot("p-shear is not a gradient"));
        }
        let degree = e.degree();
        let k = degree;
        if defect.iter().all(|p| p.is_zero() || p.is_homogeneous()) && e.linear_matrix().is_identity() {
            if let Some((form, c)) = generating_polynomial(f, g, k)
                .ok()
                .and_then(|h| single_form_power(&h.polynomial))
            {
                let cand = SymplecticFactor::FormShear {
                    form,
                    coefficient: c,
                    degree: k,
                };
                if cand.to_endo().ok().as_ref() == Some(e) {
                    return Ok(cand);
                }
            }
        }
        Err(cannot("not a shear, a linear map, or a form shear"))
    }
}

fn linear_form(form: &[Coefficient], field: Field) -> Polynomial {
    let nv = form.len();
    let mut ell = Polynomial::zero(nv, field);
    for (i, c) in form.iter().enumerate() {
        ell.add_term(Monomial::var(i, nv), c.clone());
    }
    ell
}

/// `(ℓ, c)` with `h = c ℓ^d`, normalized so the first nonzero entry of `ℓ` is 1.
fn single_form_power(h: &Polynomial) -> Option<(Vec<Coefficient>, Coefficient)> {
    let nv = h.nvars();
    let field = h.field();
    let d = h.degree()?;
    let pure = |m: usize, e: u32| {
        let mut v = vec![0; nv];
        v[m] = e;
        Monomial::new(v)
    };
    let m = (0..nv).find(|&m| !h.coefficient(&pure(m, d)).is_zero())?;
    let c = h.coefficient(&pure(m, d));
    let denom = (&c * &field.from_i64(d as i64)).inv()?;
    let form: Vec<Coefficient> = (0..nv)
        .map(|j| {
            if j == m {
                field.one()
            } else {
                let mut v = pure(m, d - 1).exponents().to_vec();
                v[j] += 1;
                &h.coefficient(&Monomial::new(v)) * &denom
            }
        })
        .collect();
    (linear_form(&form, field).pow(d).scale(&c) == *h).then_some((form, c))
}

/// `G` with `∂G/∂y_{var(i)} = f_i`, built degree by degree from Euler's identity.
fn integrate(
    f: &[Polynomial],
    var: impl Fn(usize) -> usize,
    nv: usize,
    field: Field,
) -> Result<Polynomial> {
    let mut acc = Polynomial::zero(nv, field);
    for (i, fi) in f.iter().enumerate() {
        acc = &acc + &(&Polynomial::var(var(i), nv, field) * fi);
    }
    let mut g = Polynomial::zero(nv, field);
    for d in acc.degrees() {
        let inv = field
            .from_i64(d as i64)
            .inv()
            .ok_or_else(|| Error::Unsupported(format!("cannot integrate degree {d} in {field}")))?;
        g = &g + &acc.homogeneous_component(d).scale(&inv);
    }
    Ok(g)
}

/// Generating polynomial of a degree-`k` symplectic defect `(f, g)`: the
/// degree-`k+1` form `F` with `∂F/∂p_i = f_i` and `∂F/∂x_i = −g_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingPolynomial {
    pub degree: u32,
    pub f: Vec<Polynomial>,
    pub g: Vec<Polynomial>,
    pub polynomial: Polynomial,
}

impl GeneratingPolynomial {
    /// Rechecks both gradient identities by differentiation.
    pub fn verify(&self) -> Result<bool> {
        let n = self.f.len();
        for i in 0..n {
            if self.polynomial.partial(n + i)? != self.f[i]
                || self.polynomial.partial(i)? != -&self.g[i]
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Builds `F = (Σ p_i f_i − Σ x_i g_i)/(k+1)` and verifies it by differentiation;
/// failure means the defect is not closed.
pub fn generating_polynomial(
    f: &[Polynomial],
    g: &[Polynomial],
    k: u32,
) -> Result<GeneratingPolynomial> {
    let n = f.len();
    if g.len() != n {
        return Err(Error::dim("defect halves differ in length"));
    }
    let Some(first) = f.first() else {
        return Err(Error::dim("empty defect"));
    };
    let nv = 2 * n;
    let field = first.field();
    let mut acc = Polynomial::zero(nv, field);
    for i in 0..n {
        acc = &acc + &(&Polynomial::var(n + i, nv, field) * &f[i]);
        acc = &acc - &(&Polynomial::var(i, nv, field) * &g[i]);
    }
    let inv = field
        .from_i64(k as i64 + 1)
        .inv()
        .ok_or_else(|| Error::Unsupported(format!("degree {} vanishes in {field}", k + 1)))?;
    let out = GeneratingPolynomial {
        degree: k,
        f: f.to_vec(),
        g: g.to_vec(),
        polynomial: acc.scale(&inv),
    };
    if !out.verify()? {
        let names = VarNames::symplectic(n);
        let shown: Vec<String> = f.iter().chain(g).map(|p| p.to_string_with(&names)).collect();
        return Err(Error::NotSymplectic {
            degree: k,
            residual: shown.join(", "),
        });
    }
    Ok(out)
}

/// Integer linear forms in order of growing coefficient size and support.
fn candidate_forms(support: &[usize], nv: usize, bound: i64) -> Vec<Vec<i64>> {
    let s = support.len();
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![-bound; s];
    loop {
        let max = cur.iter().map(|c| c.abs()).max().unwrap_or(0);
        let first_positive = cur.iter().find(|c| **c != 0).is_some_and(|c| *c > 0);
        if max == bound && first_positive {
            let mut v = vec![0; nv];
            for (k, &var) in support.iter().enumerate() {
                v[var] = cur[k];
            }
            out.push(v);
        }
        let mut k = s;
        loop {
            if k == 0 {
                let key = |v: &Vec<i64>| {
                    let nz: Vec<usize> = (0..nv).filter(|&i| v[i] != 0).collect();
                    let vals: Vec<i64> = v
                        .iter()
                        .filter(|c| **c != 0)
                        .map(|c| if *c > 0 { 2 * c } else { -2 * c + 1 })
                        .collect();
                    (nz.len(), nz, vals)
                };
                out.sort_by_key(key);
                return out;
            }
            k -= 1;
            if cur[k] < bound {
                cur[k] += 1;
                break;
            }
            cur[k] = -bound;
        }
    }
}

/// Writes a homogeneous `F` as `Σ c_j ℓ_j^d` with integer forms `ℓ_j`.
pub fn waring_decompose(big_f: &Polynomial) -> Result<Vec<(Vec<Coefficient>, Coefficient)>> {
    let nv = big_f.nvars();
    let field = big_f.field();
    if big_f.is_zero() {
        return Ok(Vec::new());
    }
    if !big_f.is_homogeneous() {
        return Err(Error::InvalidInput("Waring decomposition needs a form".into()));
    }
    let d = big_f.degree().expect("nonzero");
    let support: Vec<usize> = big_f.variables().into_iter().collect();
    // Echelon basis of the chosen powers, reduced in insertion order.
    let mut basis: Vec<(Monomial, Polynomial)> = Vec::new();
    let mut chosen: Vec<(Vec<i64>, Polynomial)> = Vec::new();
    let reduce = |p: &Polynomial, basis: &[(Monomial, Polynomial)]| {
        let mut r = p.clone();
        for (pivot, b) in basis {
            let c = r.coefficient(pivot);
            if !c.is_zero() {
                r = &r - &b.scale(&c);
            }
        }
        r
    };
    let mut remainder = big_f.clone();
    'outer: for bound in 1..=WARING_COEFFICIENT_CAP {
        for v in candidate_forms(&support, nv, bound) {
            let form: Vec<Coefficient> = v.iter().map(|&c| field.from_i64(c)).collect();
            let power = linear_form(&form, field).pow(d);
            let r = reduce(&power, &basis);
            let Some((m, c)) = r.leading_term() else {
                continue;
            };
            let m = m.clone();
            let normalized = r.scale(&c.inv().expect("nonzero"));
            basis.push((m, normalized));
            chosen.push((v, power));
            remainder = reduce(big_f, &basis);
            if remainder.is_zero() {
                break 'outer;
            }
        }
    }
    if !remainder.is_zero() {
        return Err(Error::Resource(format!(
            "no Waring decomposition with coefficients up to {WARING_COEFFICIENT_CAP} in {field}"
        )));
    }
    let mut monomials: Vec<Monomial> = Vec::new();
    for (_, p) in &chosen {
        for (m, _) in p.terms() {
            monomials.push(m.clone());
        }
    }
    for (m, _) in big_f.terms() {
        monomials.push(m.clone());
    }
    monomials.sort();
    monomials.dedup();
    let mut a = Matrix::zero(monomials.len(), chosen.len(), field);
    for (col, (_, p)) in chosen.iter().enumerate() {
        for (row, m) in monomials.iter().enumerate() {
            a.set(row, col, p.coefficient(m));
        }
    }
    let b: Vec<Coefficient> = monomials.iter().map(|m| big_f.coefficient(m)).collect();
    let x = a
        .solve(&b)
        .ok_or_else(|| Error::Invariant("Waring span check disagrees with solve".into()))?;
    Ok(chosen
        .into_iter()
        .zip(x)
        .filter(|(_, c)| !c.is_zero())
        .map(|((v, _), c)| (v.iter().map(|&e| field.from_i64(e)).collect(), c))
        .collect())
}

/// A product `s_1 ∘ … ∘ s_m` of symplectic factors.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticWord {
    nvars: usize,
    field: Field,
    factors: Vec<SymplecticFactor>,
}

impl SymplecticWord {
    pub fn empty(nvars: usize, field: Field) -> Self {
        SymplecticWord {
            nvars,
            field,
            factors: Vec::new(),
        }
    }

    pub fn new(nvars: usize, field: Field, factors: Vec<SymplecticFactor>) -> Result<Self> {
        symplectic_rank(nvars)?;
        for f in &factors {
            if f.nvars() != nvars || f.field() != field {
                return Err(Error::dim("factor lives in a different ring"));
            }
        }
        Ok(SymplecticWord {
            nvars,
            field,
            factors,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn factors(&self) -> &[SymplecticFactor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn push(&mut self, f: SymplecticFactor) {
        assert_eq!(f.nvars(), self.nvars);
        self.factors.push(f);
    }

    pub fn inverse(&self) -> Result<SymplecticWord> {
        Ok(SymplecticWord {
            nvars: self.nvars,
            field: self.field,
            factors: self
                .factors
                .iter()
                .rev()
                .map(SymplecticFactor::inverse)
                .collect::<Result<_>>()?,
        })
    }

    pub fn eval(&self) -> Result<PolyEndo> {
        let mut acc = PolyEndo::identity(self.nvars, self.field);
        for f in &self.factors {
            acc = acc.compose(&f.to_endo()?)?;
        }
        Ok(acc)
    }

    /// Evaluation modulo terms above `max_degree`.
    pub fn eval_truncated(&self, max_degree: u32) -> Result<PolyEndo> {
        let mut acc = PolyEndo::identity(self.nvars, self.field);
        for f in &self.factors {
            acc = acc.compose_truncated(&f.to_endo()?, max_degree)?;
        }
        Ok(acc)
    }
}

/// Result of [`symplectic_approximate`]; every step records the generating polynomial.
#[derive(Clone, Debug)]
pub struct SymplecticApproximation {
    pub word: SymplecticWord,
    pub residual: Residual,
    pub steps: Vec<ApproxStep>,
    pub generators: Vec<GeneratingPolynomial>,
}

struct Tracker {
    word: SymplecticWord,
    residual: PolyEndo,
    truncated_through: Option<u32>,
    exact_degree_cap: u32,
    target_height: u32,
}

impl Tracker {
    fn apply(&mut self, s: SymplecticFactor) -> Result<()> {
        let endo = s.to_endo()?;
        self.residual = match self.truncated_through {
            Some(k) => endo.compose_truncated(&self.residual, k)?,
            // Switch before composing: the exact product could be huge.
            None if endo.degree() * self.residual.degree() > self.exact_degree_cap => {
                let k = self.target_height.saturating_sub(1).max(1);
                self.truncated_through = Some(k);
                endo.compose_truncated(&self.residual, k)?
            }
            None => endo.compose(&self.residual)?,
        };
        self.word.push(s.inverse()?);
        Ok(())
    }
}

/// Tame symplectic word `ψ` with `Ht(ψ^{-1} ∘ σ − id) ≥ K`, for `σ` on `x_1..x_n, p_1..p_n`.
pub fn symplectic_approximate(sigma: &PolyEndo, k_target: u32) -> Result<SymplecticApproximation> {
    symplectic_approximate_with_cap(sigma, k_target, SYMPLECTIC_EXACT_DEGREE_CAP)
}

pub fn symplectic_approximate_with_cap(
    sigma: &PolyEndo,
    k_target: u32,
    exact_degree_cap: u32,
) -> Result<SymplecticApproximation> {
    let nv = sigma.nvars();
    let n = symplectic_rank(nv)?;
    let field = sigma.field();
    if let Some((a, b, got)) = symplectic_violation(sigma)? {
        let names = VarNames::symplectic(n);
        return Err(Error::NotSymplectic {
            degree: 0,
            residual: format!(
                "{{{}, {}}} = {}",
                names.name(a),
                names.name(b),
                got.to_string_with(&names)
            ),
        });
    }
    let a = sigma.linear_matrix();
    let mut word = SymplecticWord::empty(nv, field);
    let mut residual = sigma.clone();
    if !a.is_identity() {
        let lin = SymplecticFactor::Linear(a.clone());
        lin.to_endo()?;
        let a_inv = a.inverse().ok_or(Error::NotLocallyInvertible)?;
        residual = PolyEndo::from_linear(&a_inv)?.compose(sigma)?;
        word.push(lin);
    }
    let mut t = Tracker {
        word,
        residual,
        truncated_through: None,
        exact_degree_cap,
        target_height: k_target,
    };
    let mut steps = Vec::new();
    let mut generators = Vec::new();
    for k in 2..k_target {
        if t.residual.height() == Height::Infinite {
            break;
        }
        let defect = t.residual.component(k);
        if defect.iter().any(|p| !p.is_zero()) {
            let (f, g) = defect.split_at(n);
            let big_f = generating_polynomial(f, g, k)?;
            let kill = -&big_f.polynomial;
            generators.push(big_f);
            let pure_p = kill.filter_terms(|m| (0..n).all(|i| m.exponent(i) == 0));
            let pure_x = kill.filter_terms(|m| (n..nv).all(|i| m.exponent(i) == 0));
            let mixed = &(&kill - &pure_p) - &pure_x;
            let mut factors = Vec::new();
            if !pure_p.is_zero() {
                factors.push(SymplecticFactor::XShear(pure_p));
            }
            if !pure_x.is_zero() {
                factors.push(SymplecticFactor::PShear(pure_x));
            }
            for (form, c) in waring_decompose(&mixed)? {
                factors.push(SymplecticFactor::FormShear {
                    form,
                    coefficient: c,
                    degree: k,
                });
            }
            let emitted = factors.len();
            for s in factors {
                t.apply(s)?;
            }
            if !t.residual.height().is_at_least(k + 1) {
                return Err(Error::Invariant(format!(
                    "degree-{k} symplectic step did not raise the height"
                )));
            }
            steps.push(ApproxStep {
                degree: k,
                factors: emitted,
                residual_height: t.residual.height(),
            });
        }
    }
    let residual = match t.truncated_through {
        None => Residual::Exact(t.residual),
        Some(k) => Residual::Truncated {
            through: k,
            residual: t.residual,
        },
    };
    Ok(SymplecticApproximation {
        word: t.word,
        residual,
        steps,
        generators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use proptest::prelude::*;

    fn q() -> Field {
        Field::Rational
    }

    fn sp(n: usize, s: &str) -> Polynomial {
        parse_polynomial(s, &VarNames::symplectic(n), q()).unwrap()
    }

    #[test]
    fn generating_polynomial_of_quadratic_defect() {
        let f = sp(1, "2*x1*p1");
        let g = sp(1, "-p1^2");
        let big_f = generating_polynomial(&[f], &[g], 2).unwrap();
        assert_eq!(big_f.polynomial, sp(1, "x1*p1^2"));
        assert!(big_f.verify().unwrap());
        let cube = generating_polynomial(&[sp(1, "p1^2")], &[sp(1, "0")], 2).unwrap();
        assert_eq!(cube.polynomial, sp(1, "1/3*p1^3"));
        assert!(matches!(
            generating_polynomial(&[sp(1, "x1*p1")], &[sp(1, "x1*p1")], 2),
            Err(Error::NotSymplectic { degree: 2, .. })
        ));
    }

    #[test]
    fn waring_reconstructs_forms() {
        for s in ["x1*p1", "x1^2*p1 + 3*x1*p1^2", "x1*x2*p1*p2 - x2^4", "7*x1^3"] {
            let big_f = sp(2, s);
            let terms = waring_decompose(&big_f).unwrap();
            let mut back = Polynomial::zero(4, q());
            let d = big_f.degree().unwrap();
            for (form, c) in &terms {
                back = &back + &linear_form(form, q()).pow(d).scale(c);
            }
            assert_eq!(back, big_f, "{s}");
        }
        assert_eq!(waring_decompose(&sp(1, "x1^2")).unwrap().len(), 1);
    }

    #[test]
    fn candidate_order_starts_with_axes() {
        let c = candidate_forms(&[0, 1], 2, 1);
        assert_eq!(c, vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1]]);
    }

    #[test]
    fn factors_are_symplectic_and_invert() {
        let f = q();
        let factors = vec![
            SymplecticFactor::XShear(sp(2, "p1^2*p2 + p2^3")),
            SymplecticFactor::PShear(sp(2, "x1*x2^2")),
            SymplecticFactor::FormShear {
                form: vec![f.from_i64(1), f.from_i64(-1), f.from_i64(2), f.from_i64(1)],
                coefficient: Coefficient::rational(3, 2),
                degree: 2,
            },
            SymplecticFactor::Linear(
                Matrix::from_rows(
                    f,
                    vec![
                        vec![f.from_i64(1), f.from_i64(0), f.from_i64(1), f.from_i64(0)],
                        vec![f.from_i64(0), f.from_i64(1), f.from_i64(0), f.from_i64(0)],
                        vec![f.from_i64(0), f.from_i64(0), f.from_i64(1), f.from_i64(0)],
                        vec![f.from_i64(0), f.from_i64(0), f.from_i64(0), f.from_i64(1)],
                    ],
                )
                .unwrap(),
            ),
        ];
        for s in &factors {
            let e = s.to_endo().unwrap();
            assert!(is_symplectomorphism(&e).unwrap(), "{s:?}");
            assert!(e.compose(&s.inverse().unwrap().to_endo().unwrap()).unwrap().is_identity());
            assert_eq!(SymplecticFactor::classify(&e).unwrap().to_endo().unwrap(), e);
        }
        assert!(SymplecticFactor::XShear(sp(1, "x1*p1^2")).to_endo().is_err());
    }

    #[test]
    fn classify_rejects_non_factors() {
        let e = PolyEndo::new(vec![sp(1, "x1 + p1^2"), sp(1, "p1 + x1^2")]).unwrap();
        assert!(matches!(SymplecticFactor::classify(&e), Err(Error::CannotLift(_))));
    }

    fn shear_word(n: usize, gens: &[(bool, String)]) -> SymplecticWord {
        let factors = gens
            .iter()
            .map(|(xs, g)| {
                if *xs {
                    SymplecticFactor::XShear(sp(n, g))
                } else {
                    SymplecticFactor::PShear(sp(n, g))
                }
            })
            .collect();
        SymplecticWord::new(2 * n, q(), factors).unwrap()
    }

    #[test]
    fn approximation_of_henon_like_map() {
        let w = shear_word(1, &[(true, "p1^3".into()), (false, "x1^3".into())]);
        let sigma = w.eval().unwrap();
        let r = symplectic_approximate(&sigma, 6).unwrap();
        let check = r.word.inverse().unwrap().eval_truncated(5).unwrap();
        assert!(check.compose_truncated(&sigma, 5).unwrap().is_identity());
        for s in r.word.factors() {
            assert!(is_symplectomorphism(&s.to_endo().unwrap()).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn approximation_raises_height(
            n in 1usize..3,
            gens in proptest::collection::vec((any::<bool>(), 2u32..4, -2i64..3), 1..4),
        ) {
            let names: Vec<String> = gens
                .iter()
                .enumerate()
                .map(|(i, (xs, d, c))| {
                    let v = if *xs { "p" } else { "x" };
                    let a = 1 + i % n;
                    let b = 1 + (i + 1) % n;
                    format!("{c}*{v}{a}^{d} + {v}{a}*{v}{b}")
                })
                .collect();
            let kinds: Vec<(bool, String)> =
                gens.iter().map(|g| g.0).zip(names).collect();
            let sigma = shear_word(n, &kinds).eval().unwrap();
            let r = symplectic_approximate(&sigma, 5).unwrap();
            prop_assert!(r.residual.endo().height().is_at_least(5));
            let back = r.word.inverse().unwrap().eval_truncated(4).unwrap();
            prop_assert!(back.compose_truncated(&sigma, 4).unwrap().is_identity());
        }
    }
}
