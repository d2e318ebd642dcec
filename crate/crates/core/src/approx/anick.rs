use crate::endo::{ElementaryAuto, PolyEndo, TameWord};
use crate::error::{Error, Result};
use crate::field::{Coefficient, Field};
use crate::linalg::Matrix;
use crate::poly::{Height, Monomial, Polynomial};

use super::{ApproxStep, Residual};

/// Elementary factors whose composite is the linear map with matrix `a`.
pub fn decompose_linear(a: &Matrix) -> Result<TameWord> {
    let n = a.rows();
    let field = a.field();
    if a.cols() != n {
        return Err(Error::dim("linear map needs a square matrix"));
    }
    let mut m = a.clone();
    // Row operations R with R_r ⋯ R_1 A = I; each touches one row.
    let mut ops: Vec<ElementaryAuto> = Vec::new();
    let mut apply = |m: &mut Matrix, target: usize, row: Vec<Coefficient>| -> Result<()> {
        let mut shift = Polynomial::zero(n, field);
        for (j, c) in row.iter().enumerate() {
            if j != target {
                shift.add_term(Monomial::var(j, n), c.clone());
            }
        }
        let op = ElementaryAuto::new(target, row[target].clone(), shift)?;
        let new_row: Vec<Coefficient> = (0..n)
            .map(|col| {
                let mut acc = field.zero();
                for (j, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        acc += &(c * m.get(j, col));
                    }
                }
                acc
            })
            .collect();
        for (col, v) in new_row.into_iter().enumerate() {
            m.set(target, col, v);
        }
        ops.push(op);
        Ok(())
    };
    let unit = |k: usize| -> Vec<Coefficient> {
        (0..n).map(|j| if j == k { field.one() } else { field.zero() }).collect()
    };
    for c in 0..n {
        if m.get(c, c).is_zero() {
            let p = (c + 1..n)
                .find(|&i| !m.get(i, c).is_zero())
                .ok_or(Error::NotLocallyInvertible)?;
            let mut row = unit(c);
            row[p] = field.one();
            apply(&mut m, c, row)?;
        }
        if !m.get(c, c).is_one() {
            let mut row = unit(c);
            row[c] = m.get(c, c).inv().expect("nonzero pivot");
            apply(&mut m, c, row)?;
        }
        for i in 0..n {
            if i != c && !m.get(i, c).is_zero() {
                let mut row = unit(i);
                row[c] = -m.get(i, c);
                apply(&mut m, i, row)?;
            }
        }
    }
    debug_assert!(m.is_identity());
    let factors = ops.iter().rev().map(ElementaryAuto::inverse).collect();
    TameWord::new(n, field, factors)
}

/// Elementary factors for the map `x ↦ x − h(x)·v`, which is an automorphism
/// when `h` is constant along `v`.
pub fn layer_word(h: &Polynomial, v: &[Coefficient]) -> Result<TameWord> {
    let n = h.nvars();
    let field = h.field();
    let t = v
        .iter()
        .position(|c| !c.is_zero())
        .ok_or_else(|| Error::InvalidInput("layer direction is zero".into()))?;
    let mut along = Polynomial::zero(n, field);
    for (m, c) in v.iter().enumerate() {
        if !c.is_zero() {
            along = &along + &h.partial(m)?.scale(c);
        }
    }
    if !along.is_zero() {
        return Err(Error::InvalidInput("layer height varies along its direction".into()));
    }
    let mut images: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(i, n, field)).collect();
    for (m, c) in v.iter().enumerate() {
        if !c.is_zero() {
            images[m] = &images[m] - &h.scale(c);
        }
    }
    let target = PolyEndo::new(images)?;
    if v.iter().enumerate().all(|(m, c)| m == t || c.is_zero()) {
        let shift = (-h).scale(&v[t]);
        return TameWord::new(n, field, vec![ElementaryAuto::shear(t, shift)?]);
    }
    // P sends e_t to v and fixes the other axes; M = P^{-1} straightens the layer.
    let mut p = Matrix::identity(n, field);
    for (m, c) in v.iter().enumerate() {
        p.set(m, t, c.clone());
    }
    let m = p.inverse().expect("v_t is nonzero");
    let m_endo = PolyEndo::from_linear(&m)?;
    let p_endo = PolyEndo::from_linear(&p)?;
    let straight = p_endo.compose(&target)?.compose(&m_endo)?;
    let (k, e) = single_elementary(&straight)?;
    debug_assert_eq!(k, t);
    let mut word = decompose_linear(&m)?;
    word.push(e);
    word.extend(decompose_linear(&p)?);
    debug_assert_eq!(word.eval(), target);
    Ok(word)
}

/// Reads an endomorphism that moves a single variable as an elementary factor.
fn single_elementary(e: &PolyEndo) -> Result<(usize, ElementaryAuto)> {
    let n = e.nvars();
    let field = e.field();
    let moved: Vec<usize> = (0..n)
        .filter(|&i| *e.image(i) != Polynomial::var(i, n, field))
        .collect();
    match moved.as_slice() {
        [] => Ok((0, ElementaryAuto::shear(0, Polynomial::zero(n, field))?)),
        [k] => {
            let img = e.image(*k);
            let xk = Monomial::var(*k, n);
            let a = img.coefficient(&xk);
            let shift = img.filter_terms(|m| *m != xk);
            Ok((*k, ElementaryAuto::new(*k, a, shift)?))
        }
        _ => Err(Error::Invariant("conjugated layer moved several variables".into())),
    }
}

/// Coefficients `c_μ` with `B = Σ_μ c_μ (x_i + μ x_j)^e` for `μ = 1..e+1`.
fn binary_basis_coefficients(b: &[Coefficient], field: Field) -> Result<Vec<Coefficient>> {
    // b[a] is the coefficient of x_i^{e−a} x_j^a.
    let e = b.len() - 1;
    let mut m = Matrix::zero(e + 1, e + 1, field);
    for a in 0..=e {
        let binom = binomial(e as u32, a as u32);
        for (col, mu) in (1..=e as i64 + 1).enumerate() {
            m.set(a, col, &field.from_i64(binom) * &field.from_i64(mu).pow(a as u32));
        }
    }
    m.solve(b)
        .ok_or_else(|| Error::Invariant("binary power basis is singular in this field".into()))
}

pub(crate) fn binomial(n: u32, k: u32) -> i64 {
    let mut acc: i64 = 1;
    for t in 0..k as i64 {
        acc = acc * (n as i64 - t) / (t + 1);
    }
    acc
}

/// `μ` with `B = c (x_i + μ x_j)^e`, when such a single power exists.
fn single_power(b: &[Coefficient], field: Field) -> Option<(Coefficient, Coefficient)> {
    let e = b.len() - 1;
    if e == 0 || b[0].is_zero() {
        return None;
    }
    let c = b[0].clone();
    let mu = &b[1] * &(&c * &field.from_i64(e as i64)).inv()?;
    if mu.is_zero() {
        return None;
    }
    for (a, ba) in b.iter().enumerate() {
        let expect = &(&c * &field.from_i64(binomial(e as u32, a as u32))) * &mu.pow(a as u32);
        if expect != *ba {
            return None;
        }
    }
    Some((c, mu))
}

/// Splits a defect into a constant direction times a scalar polynomial.
fn as_layer(defect: &[Polynomial]) -> Option<(Polynomial, Vec<Coefficient>)> {
    let i = defect.iter().position(|p| !p.is_zero())?;
    let h = defect[i].clone();
    let (lm, lc) = h.leading_term()?;
    let lc_inv = lc.inv()?;
    let mut v = Vec::with_capacity(defect.len());
    for f in defect {
        let r = &f.coefficient(lm) * &lc_inv;
        if h.scale(&r) != *f {
            return None;
        }
        v.push(r);
    }
    let mut along = Polynomial::zero(h.nvars(), h.field());
    for (m, c) in v.iter().enumerate() {
        if !c.is_zero() {
            along = &along + &h.partial(m).ok()?.scale(c);
        }
    }
    along.is_zero().then_some((h, v))
}

/// Running state of an approximation: `φ = eval(word) ∘ residual`.
pub(crate) struct Tracker {
    pub word: TameWord,
    pub residual: PolyEndo,
    pub truncated_through: Option<u32>,
    pub exact_degree_cap: u32,
    pub target_height: u32,
}

impl Tracker {
    /// Replaces the residual by `e ∘ residual` and appends `e^{-1}` to the word.
    pub fn apply(&mut self, e: &ElementaryAuto) -> Result<()> {
        let endo = e.to_endo();
        let next = match self.truncated_through {
            Some(k) => endo.compose_truncated(&self.residual, k)?,
            // Switch before composing: the exact product could be huge.
            None if endo.degree() * self.residual.degree() > self.exact_degree_cap => {
                let k = self.target_height.saturating_sub(1).max(1);
                self.truncated_through = Some(k);
                endo.compose_truncated(&self.residual, k)?
            }
            None => endo.compose(&self.residual)?,
        };
        self.residual = next;
        self.word.push(e.inverse());
        Ok(())
    }

    /// Applies the automorphism `w_1 ∘ … ∘ w_m`.
    pub fn apply_word(&mut self, w: &TameWord) -> Result<usize> {
        for e in w.factors().iter().rev() {
            self.apply(e)?;
        }
        Ok(w.len())
    }

    pub fn report(&self) -> Residual {
        match self.truncated_through {
            None => Residual::Exact(self.residual.clone()),
            Some(k) => Residual::Truncated {
                through: k,
                residual: self.residual.clone(),
            },
        }
    }
}

/// Splits `φ = L ∘ φ'` with `L` linear (as a tame word) and `φ' ≡ id` modulo degree two.
pub fn normalize_linear(phi: &PolyEndo) -> Result<(TameWord, PolyEndo)> {
    let det = phi.jacobian_det()?;
    if !det.is_one() {
        return Err(Error::InvalidInput(format!(
            "Jacobian determinant is {det}, not 1"
        )));
    }
    let a = phi.linear_matrix();
    if a.is_identity() {
        return Ok((TameWord::empty(phi.nvars(), phi.field()), phi.clone()));
    }
    let word = decompose_linear(&a)?;
    let a_inv = a.inverse().ok_or(Error::NotLocallyInvertible)?;
    let rest = PolyEndo::from_linear(&a_inv)?.compose(phi)?;
    Ok((word, rest))
}

/// Kills the degree-`k` defect of `phi` (which must have `Ht(φ − id) ≥ k`).
/// Returns the factors `σ` and `σ ∘ φ`.
pub fn anick_step(phi: &PolyEndo, k: u32) -> Result<(TameWord, PolyEndo)> {
    let mut t = Tracker {
        word: TameWord::empty(phi.nvars(), phi.field()),
        residual: phi.clone(),
        truncated_through: None,
        exact_degree_cap: u32::MAX,
        target_height: k + 1,
    };
    step(&mut t, k)?;
    // The tracker stores σ^{-1} factors; σ is the inverse word.
    Ok((t.word.inverse(), t.residual))
}

pub(crate) fn step(t: &mut Tracker, k: u32) -> Result<usize> {
    let n = t.residual.nvars();
    let field = t.residual.field();
    if !t.residual.height().is_at_least(k) {
        return Err(Error::InvalidInput(format!("height is below {k}")));
    }
    let mut emitted = 0;
    let defect = t.residual.component(k);
    if defect.iter().all(Polynomial::is_zero) {
        return Ok(0);
    }
    if let Some((h, v)) = as_layer(&defect) {
        emitted += t.apply_word(&layer_word(&h, &v)?)?;
    } else {
        let j = n - 1;
        for i in 0..n {
            let f = t.residual.image(i).homogeneous_component(k);
            if f.is_zero() {
                continue;
            }
            if i == j {
                if f.depends_on(i) {
                    return Err(Error::Invariant(format!(
                        "degree-{k} defect of x{} depends on x{}; Jacobian is not 1",
                        i + 1,
                        i + 1
                    )));
                }
                emitted += t.apply_word(&TameWord::new(n, field, vec![ElementaryAuto::shear(i, -&f)?])?)?;
                continue;
            }
            let mut free = Polynomial::zero(n, field);
            for (u, binary) in group_binary(&f, i, j) {
                let e = binary.len() - 1;
                if binary[..e].iter().all(Coefficient::is_zero) {
                    // Free of x_i.
                    let mut m = u.exponents().to_vec();
                    m[j] += e as u32;
                    free.add_term(Monomial::new(m), binary[e].clone());
                    continue;
                }
                let upoly = Polynomial::term(field.one(), u.clone());
                let terms: Vec<(Coefficient, Coefficient)> = match single_power(&binary, field) {
                    Some((c, mu)) => vec![(c, mu)],
                    None => binary_basis_coefficients(&binary, field)?
                        .into_iter()
                        .zip((1..=e as i64 + 1).map(|m| field.from_i64(m)))
                        .filter(|(c, _)| !c.is_zero())
                        .collect(),
                };
                for (c, mu) in terms {
                    let ell = &Polynomial::var(i, n, field) + &Polynomial::var(j, n, field).scale(&mu);
                    let h = &upoly.scale(&c) * &ell.pow(e as u32);
                    let mut v = vec![field.zero(); n];
                    v[i] = field.one();
                    v[j] = -mu.inv().expect("nonzero");
                    emitted += t.apply_word(&layer_word(&h, &v)?)?;
                }
            }
            if !free.is_zero() {
                emitted += t.apply_word(&TameWord::new(n, field, vec![ElementaryAuto::shear(i, -&free)?])?)?;
            }
        }
    }
    if !t.residual.height().is_at_least(k + 1) {
        return Err(Error::Invariant(format!(
            "degree-{k} step did not raise the height"
        )));
    }
    Ok(emitted)
}

/// Groups the terms of `f` by their part outside `{x_i, x_j}`; each group is a
/// binary form listed by the coefficients of `x_i^{e−a} x_j^a`.
fn group_binary(f: &Polynomial, i: usize, j: usize) -> Vec<(Monomial, Vec<Coefficient>)> {
    let field = f.field();
    let mut groups: std::collections::BTreeMap<Monomial, Vec<Coefficient>> = Default::default();
    for (m, c) in f.terms() {
        let mut u = m.exponents().to_vec();
        let (ai, aj) = (u[i], u[j]);
        u[i] = 0;
        u[j] = 0;
        let e = (ai + aj) as usize;
        let entry = groups
            .entry(Monomial::new(u))
            .or_insert_with(|| vec![field.zero(); e + 1]);
        entry[aj as usize] = c.clone();
    }
    groups.into_iter().collect()
}

/// Result of [`anick_approximate`].
#[derive(Clone, Debug)]
pub struct AnickApproximation {
    pub word: TameWord,
    pub residual: Residual,
    pub steps: Vec<ApproxStep>,
    /// Set when an exact factorization by degree reduction was found first.
    pub peeled: bool,
}

/// Default degree above which residuals are carried modulo the target height.
pub const EXACT_RESIDUAL_DEGREE_CAP: u32 = 64;

/// Tame word `ψ` with `Ht(ψ^{-1} ∘ φ − id) ≥ K`.
pub fn anick_approximate(phi: &PolyEndo, k_target: u32) -> Result<AnickApproximation> {
    anick_approximate_with_cap(phi, k_target, EXACT_RESIDUAL_DEGREE_CAP)
}

pub fn anick_approximate_with_cap(
    phi: &PolyEndo,
    k_target: u32,
    exact_degree_cap: u32,
) -> Result<AnickApproximation> {
    let (word, rest) = normalize_linear(phi)?;
    if let Some(exact) = peel_tame(phi, PEEL_STEP_CAP) {
        return Ok(AnickApproximation {
            word: exact,
            residual: Residual::Exact(PolyEndo::identity(phi.nvars(), phi.field())),
            steps: Vec::new(),
            peeled: true,
        });
    }
    let mut t = Tracker {
        word,
        residual: rest,
        truncated_through: None,
        exact_degree_cap,
        target_height: k_target,
    };
    let mut steps = Vec::new();
    for k in 2..k_target {
        if t.residual.height() == Height::Infinite {
            break;
        }
        let emitted = step(&mut t, k)?;
        if emitted > 0 {
            steps.push(ApproxStep {
                degree: k,
                factors: emitted,
                residual_height: t.residual.height(),
            });
        }
    }
    Ok(AnickApproximation {
        word: t.word.clone(),
        residual: t.report(),
        steps,
        peeled: false,
    })
}

/// Bound on elementary reductions tried by [`peel_tame`].
pub const PEEL_STEP_CAP: usize = 64;

/// Exact tame factorization by greedy degree reduction: repeatedly writes
/// `φ = φ' ∘ e` with `e` elementary and `deg φ'_t < deg φ_t`, until `φ'` is
/// linear. `None` when no reduction applies; the map may still be tame.
pub fn peel_tame(phi: &PolyEndo, max_steps: usize) -> Option<TameWord> {
    let n = phi.nvars();
    let mut images: Vec<Polynomial> = phi.images().to_vec();
    let mut peeled: Vec<ElementaryAuto> = Vec::new();
    while images.iter().any(|f| f.degree().unwrap_or(0) > 1) {
        if peeled.len() >= max_steps {
            return None;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(images[i].degree().unwrap_or(0)));
        let found = order
            .into_iter()
            .filter(|&t| images[t].degree().unwrap_or(0) > 1)
            .find_map(|t| reduce_against(&images, t).map(|(s, r)| (t, s, r)));
        match found {
            Some((t, shift, reduced)) => {
                images[t] = reduced;
                peeled.push(ElementaryAuto::shear(t, shift).ok()?);
            }
            // Echelonizing equal-degree tops exposes new leading monomials.
            None if interreduce_tops(&mut images, &mut peeled) => {}
            None => return None,
        }
    }
    let rest = PolyEndo::new(images).ok()?;
    let mut word = decompose_linear(&rest.linear_matrix()).ok()?;
    for e in peeled.into_iter().rev() {
        word.push(e);
    }
    debug_assert_eq!(word.eval(), *phi);
    Some(word)
}

/// Interreduces images of equal degree so their top forms have distinct
/// leading monomials, using elementary steps `x_t ↦ x_t + c x_j`.
/// Returns whether anything changed.
fn interreduce_tops(images: &mut [Polynomial], peeled: &mut Vec<ElementaryAuto>) -> bool {
    let n = images.len();
    let mut changed = false;
    for _ in 0..4 * n * n {
        let mut step = None;
        'search: for j in 0..n {
            let Some(d) = images[j].degree() else { continue };
            let top_j = images[j].homogeneous_component(d);
            let Some((lm, lc)) = top_j.leading_term() else { continue };
            for t in (0..n).filter(|&t| t != j && images[t].degree() == Some(d)) {
                let top_t = images[t].homogeneous_component(d);
                let c = top_t.coefficient(lm);
                let same_lead = top_t.leading_term().is_some_and(|(m, _)| m == lm);
                if !c.is_zero() && (!same_lead || j < t) {
                    step = Some((t, j, &c * &lc.inv().expect("nonzero")));
                    break 'search;
                }
            }
        }
        let Some((t, j, c)) = step else {
            return changed;
        };
        images[t] = &images[t] - &images[j].scale(&c);
        let mut shift = Polynomial::zero(n, images[t].field());
        shift.add_term(Monomial::var(j, n), c);
        match ElementaryAuto::shear(t, shift) {
            Ok(e) => peeled.push(e),
            Err(_) => return changed,
        }
        changed = true;
    }
    changed
}

/// Bound on the products tried when cancelling a top form.
const REDUCTION_PRODUCT_CAP: usize = 512;

/// `s` free of `x_t` with `deg(f_t − s(f)) < deg f_t`: the top form of `f_t`
/// is solved for as a combination of top forms of products of other images.
fn reduce_against(images: &[Polynomial], t: usize) -> Option<(Polynomial, Polynomial)> {
    let n = images.len();
    let field = images[t].field();
    let d = images[t].degree()?;
    let degs: Vec<u32> = (0..n)
        .map(|j| if j == t { 0 } else { images[j].degree().unwrap_or(0) })
        .collect();
    let mut exps: Vec<Vec<u32>> = Vec::new();
    fn go(j: usize, left: u32, degs: &[u32], acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if out.len() > REDUCTION_PRODUCT_CAP {
            return;
        }
        if j == degs.len() {
            if left == 0 {
                out.push(acc.clone());
            }
            return;
        }
        if degs[j] == 0 {
            return go(j + 1, left, degs, acc, out);
        }
        for a in 0..=left / degs[j] {
            acc[j] = a;
            go(j + 1, left - a * degs[j], degs, acc, out);
        }
        acc[j] = 0;
    }
    go(0, d, &degs, &mut vec![0; n], &mut exps);
    if exps.is_empty() || exps.len() > REDUCTION_PRODUCT_CAP {
        return None;
    }
    let tops: Vec<Polynomial> = (0..n)
        .map(|j| images[j].homogeneous_component(degs[j]))
        .collect();
    let product = |a: &[u32], parts: &[Polynomial]| {
        let mut p = Polynomial::one(n, field);
        for (j, &aj) in a.iter().enumerate() {
            if aj > 0 {
                p = &p * &parts[j].pow(aj);
            }
        }
        p
    };
    let columns: Vec<Polynomial> = exps.iter().map(|a| product(a, &tops)).collect();
    let target = images[t].homogeneous_component(d);
    let mut monomials: Vec<Monomial> = columns
        .iter()
        .chain(std::iter::once(&target))
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()).collect::<Vec<_>>())
        .collect();
    monomials.sort();
    monomials.dedup();
    let mut m = Matrix::zero(monomials.len(), columns.len(), field);
    for (col, p) in columns.iter().enumerate() {
        for (row, mono) in monomials.iter().enumerate() {
            m.set(row, col, p.coefficient(mono));
        }
    }
    let b: Vec<Coefficient> = monomials.iter().map(|mono| target.coefficient(mono)).collect();
    let c = m.solve(&b)?;
    let mut f = images[t].clone();
    let mut shift = Polynomial::zero(n, field);
    for (a, c) in exps.iter().zip(c) {
        if !c.is_zero() {
            f = &f - &product(a, images).scale(&c);
            shift.add_term(Monomial::new(a.clone()), c);
        }
    }
    debug_assert!(f.degree().is_none_or(|e| e < d));
    Some((shift, f))
}
