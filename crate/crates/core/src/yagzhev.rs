//! Maps `x ↦ x + H(x)` with `H` of height at least 2, their polarization to
//! symmetric ternary algebras, the Engel (Jacobian nilpotency) and weak
//! nilpotence checks, and the reduction of such maps to cubic homogeneous ones.

use crate::endo::{gabber_bound, InverseSeries, PolyEndo};
use crate::error::{Error, Result};
use crate::field::{Coefficient, Field};
use crate::poly::{Monomial, PolyMatrix, Polynomial, VarNames};

/// `x_i ↦ x_i + H_i(x)` where every term of `H` has degree at least 2.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralMap {
    nonlinear: Vec<Polynomial>,
    names: VarNames,
    field: Field,
}

impl GeneralMap {
    pub fn new(nonlinear: Vec<Polynomial>, field: Field) -> Result<Self> {
        let names = VarNames::standard(nonlinear.len());
        Self::with_names(nonlinear, names, field)
    }

    pub fn with_names(nonlinear: Vec<Polynomial>, names: VarNames, field: Field) -> Result<Self> {
        let n = nonlinear.len();
        if names.len() != n {
            return Err(Error::dim(format!("{n} forms but {} variable names", names.len())));
        }
        for (i, h) in nonlinear.iter().enumerate() {
            if h.nvars() != n || h.field() != field {
                return Err(Error::dim(format!("form {} lives in a different ring", i + 1)));
            }
            if h.terms().any(|(m, _)| m.degree() < 2) {
                return Err(Error::InvalidInput(format!(
                    "form {} has terms of degree below 2",
                    i + 1
                )));
            }
        }
        Ok(GeneralMap { nonlinear, names, field })
    }

    /// Reads `x + H` off an endomorphism whose linear part is the identity.
    pub fn from_endo(phi: &PolyEndo) -> Result<Self> {
        if !phi.linear_matrix().is_identity() {
            return Err(Error::InvalidInput("the linear part must be the identity".into()));
        }
        let nonlinear = phi
            .images()
            .iter()
            .map(|p| p.filter_terms(|m| m.degree() >= 2))
            .collect();
        Self::new(nonlinear, phi.field())
    }

    pub fn to_endo(&self) -> PolyEndo {
        let n = self.nvars();
        let images = (0..n)
            .map(|i| &Polynomial::var(i, n, self.field) + &self.nonlinear[i])
            .collect();
        PolyEndo::new(images).expect("images have no constant term")
    }

    pub fn nvars(&self) -> usize {
        self.nonlinear.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn names(&self) -> &VarNames {
        &self.names
    }

    pub fn nonlinear(&self) -> &[Polynomial] {
        &self.nonlinear
    }

    /// `Ψ_ℓ`, the degree-`ℓ` part of `H`.
    pub fn form(&self, degree: u32) -> Vec<Polynomial> {
        self.nonlinear
            .iter()
            .map(|h| h.homogeneous_component(degree))
            .collect()
    }

    pub fn degree(&self) -> u32 {
        self.nonlinear.iter().filter_map(Polynomial::degree).max().unwrap_or(1)
    }

    pub fn is_cubic_homogeneous(&self) -> bool {
        self.nonlinear.iter().all(|h| h.terms().all(|(m, _)| m.degree() == 3))
    }

    pub fn jacobian_of_nonlinear(&self) -> Result<PolyMatrix> {
        let n = self.nvars();
        let rows = self
            .nonlinear
            .iter()
            .map(|h| (0..n).map(|j| h.partial(j)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if n == 0 {
            return Ok(PolyMatrix::zero(0, 0, 0, self.field));
        }
        PolyMatrix::from_rows(rows)
    }
}

/// `x ↦ x + Ψ_3(x)` with every `Ψ_{3,i}` a cubic form.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicMap(GeneralMap);

impl CubicMap {
    pub fn new(map: GeneralMap) -> Result<Self> {
        if !map.is_cubic_homogeneous() {
            return Err(Error::InvalidInput("the nonlinear part is not a cubic form".into()));
        }
        Ok(CubicMap(map))
    }

    pub fn map(&self) -> &GeneralMap {
        &self.0
    }

    pub fn into_map(self) -> GeneralMap {
        self.0
    }
}

/// Symmetric trilinear product with `Ψ_3(e_i, e_j, e_k) = Σ_m c_{ijk}^m e_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct TernaryAlgebra {
    n: usize,
    field: Field,
    constants: Vec<Coefficient>,
}

impl TernaryAlgebra {
    fn index(&self, i: usize, j: usize, k: usize, m: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + m
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn constant(&self, i: usize, j: usize, k: usize, m: usize) -> &Coefficient {
        &self.constants[self.index(i, j, k, m)]
    }

    pub fn is_zero(&self) -> bool {
        self.constants.iter().all(Coefficient::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    (0..n).all(|m| {
                        let c = self.constant(i, j, k, m);
                        c == self.constant(j, i, k, m) && c == self.constant(i, k, j, m)
                    })
                })
            })
        })
    }

    /// `Ψ_3(u, v, w)` for vectors of polynomials in a common ring.
    pub fn product(&self, u: &[Polynomial], v: &[Polynomial], w: &[Polynomial]) -> Result<Vec<Polynomial>> {
        let n = self.n;
        if u.len() != n || v.len() != n || w.len() != n {
            return Err(Error::dim(format!("the algebra has dimension {n}")));
        }
        let Some(first) = u.first() else {
            return Ok(Vec::new());
        };
        let mut out = vec![Polynomial::zero(first.nvars(), self.field); n];
        for i in 0..n {
            for j in 0..n {
                let uv = &u[i] * &v[j];
                if uv.is_zero() {
                    continue;
                }
                for k in 0..n {
                    if w[k].is_zero() {
                        continue;
                    }
                    let uvw = &uv * &w[k];
                    for (m, o) in out.iter_mut().enumerate() {
                        let c = self.constant(i, j, k, m);
                        if !c.is_zero() {
                            *o = &*o + &uvw.scale(c);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `Ψ_3(x, x, x)`; equals the cubic forms divided by `3!`.
    pub fn diagonal(&self) -> Vec<Polynomial> {
        let xs: Vec<Polynomial> = (0..self.n).map(|i| Polynomial::var(i, self.n, self.field)).collect();
        self.product(&xs, &xs, &xs).expect("dimensions agree")
    }
}

fn factorial(k: u32) -> i64 {
    (1..=k as i64).product()
}

/// Full polarization normalized by `Ψ_3(x, x, x) · 3! = Ψ_{3}(x)`: the term
/// `a x^α` contributes `a α! / (3! 3!)` to every `c_{ijk}` with `{i,j,k} = α`.
pub fn polarize(map: &CubicMap) -> Result<TernaryAlgebra> {
    let g = map.map();
    let field = g.field();
    if matches!(field.characteristic(), 2 | 3) {
        return Err(Error::Unsupported(format!("polarization needs 3! invertible, not in {field}")));
    }
    let n = g.nvars();
    let mut alg = TernaryAlgebra {
        n,
        field,
        constants: vec![field.zero(); n * n * n * n],
    };
    let denom = field.from_i64(36).inv().expect("36 is a unit");
    for (m, h) in g.nonlinear().iter().enumerate() {
        for (mono, a) in h.terms() {
            let alpha_fact: i64 = mono.exponents().iter().map(|&e| factorial(e)).product();
            let c = &(a * &field.from_i64(alpha_fact)) * &denom;
            let idx: Vec<usize> = mono
                .exponents()
                .iter()
                .enumerate()
                .flat_map(|(v, &e)| std::iter::repeat_n(v, e as usize))
                .collect();
            for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
                let at = alg.index(idx[i], idx[j], idx[k], m);
                // Repeated indices would revisit the same slot; write instead of accumulating.
                alg.constants[at] = c.clone();
            }
        }
    }
    Ok(alg)
}

/// Whether the Jacobian matrix of `H` is nilpotent, decided by
/// `det(λI − J(H)) = λ^n`.
pub fn engel_check(map: &GeneralMap) -> Result<bool> {
    let n = map.nvars();
    if n == 0 {
        return Ok(true);
    }
    let j = map.jacobian_of_nonlinear()?;
    if j.is_zero() {
        return Ok(true);
    }
    let chi = j.characteristic_polynomial()?;
    Ok(chi == Polynomial::var(n, n + 1, map.field()).pow(n as u32))
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeakNilpotence {
    /// Every inverse-series component of degree `order` or more vanishes;
    /// `inverse` is the exact polynomial inverse.
    Yagzhev { order: u32, inverse: PolyEndo },
    /// The inverse-series component of degree `degree` is nonzero although any
    /// polynomial inverse has degree at most `bound`.
    Fails { degree: u32, bound: u64 },
    /// Neither happened through `qmax`.
    Inconclusive { qmax: u32, last_nonzero: u32 },
}

impl WeakNilpotence {
    pub fn is_yagzhev(&self) -> bool {
        matches!(self, WeakNilpotence::Yagzhev { .. })
    }

    pub fn is_fails(&self) -> bool {
        matches!(self, WeakNilpotence::Fails { .. })
    }
}

/// Runs the formal inverse series through degree `qmax`. A vanishing tail is
/// confirmed by composing the partial sum with the map; a nonzero component
/// above `deg^{n-1}` proves that no polynomial inverse exists.
pub fn weak_nilpotence_check(map: &GeneralMap, qmax: u32) -> Result<WeakNilpotence> {
    if qmax < 2 {
        return Err(Error::InvalidInput("qmax must be at least 2".into()));
    }
    let phi = map.to_endo();
    let bound = gabber_bound(phi.degree(), phi.nvars());
    let mut series = InverseSeries::new(&phi)?;
    let mut last_nonzero = 1;
    let mut tried_at = None;
    while series.computed_through() < qmax {
        let q = series.next_component()?;
        if !series.component_is_zero(q) {
            last_nonzero = q;
            if q as u64 > bound {
                return Ok(WeakNilpotence::Fails { degree: q, bound });
            }
        } else if tried_at != Some(last_nonzero) {
            tried_at = Some(last_nonzero);
            if let Some(inverse) = series.try_exact(&phi)? {
                return Ok(WeakNilpotence::Yagzhev {
                    order: last_nonzero + 1,
                    inverse,
                });
            }
        }
    }
    Ok(WeakNilpotence::Inconclusive { qmax, last_nonzero })
}

/// First name of the form `{base}{k}`, `k ≥ start`, not already in use.
fn fresh_name(names: &[String], base: &str, start: &mut usize) -> String {
    loop {
        let candidate = format!("{base}{start}");
        *start += 1;
        if !names.contains(&candidate) {
            return candidate;
        }
    }
}

/// Splits every monomial of degree at least 4. For `x_i ↦ x_i + c A B` with
/// `deg A, deg B ≥ 2` the map becomes `x_i ↦ x_i − y z − c y A − z B`,
/// `y ↦ y + B`, `z ↦ z + c A` on two fresh variables; this is `x_i ↦ x_i + cAB`,
/// `y ↦ y + B`, `z ↦ z + cA` followed by `x_i ↦ x_i − y z`, so invertibility and
/// the Jacobian determinant are unchanged.
pub fn degree_reduce(map: &GeneralMap) -> GeneralMap {
    let field = map.field();
    let mut forms = map.nonlinear().to_vec();
    let mut names: Vec<String> = (0..map.nvars()).map(|i| map.names().name(i).to_string()).collect();
    let mut counter = 1;
    loop {
        let Some((i, mono, c)) = forms.iter().enumerate().find_map(|(i, h)| {
            h.terms()
                .rev()
                .find(|(m, _)| m.degree() >= 4)
                .map(|(m, c)| (i, m.clone(), c.clone()))
        }) else {
            break;
        };
        let n = forms.len();
        let nv = n + 2;
        let split = mono.degree() / 2;
        let mut a = vec![0u32; nv];
        let mut b = vec![0u32; nv];
        let mut taken = 0;
        for (v, &e) in mono.exponents().iter().enumerate() {
            for _ in 0..e {
                if taken < split {
                    a[v] += 1;
                } else {
                    b[v] += 1;
                }
                taken += 1;
            }
        }
        let ca = Polynomial::term(c.clone(), Monomial::new(a));
        let bb = Polynomial::term(field.one(), Monomial::new(b));
        let y = Polynomial::var(n, nv, field);
        let z = Polynomial::var(n + 1, nv, field);
        let mut next: Vec<Polynomial> = forms.iter().map(|h| h.extend_vars(nv)).collect();
        let mut fi = next[i].clone();
        let mut padded = mono.exponents().to_vec();
        padded.resize(nv, 0);
        fi.add_term(Monomial::new(padded), -c.clone());
        fi = &fi - &(&y * &z);
        fi = &fi - &(&y * &ca);
        fi = &fi - &(&z * &bb);
        next[i] = fi;
        next.push(bb);
        next.push(ca);
        forms = next;
        while names.contains(&format!("y{counter}")) || names.contains(&format!("z{counter}")) {
            counter += 1;
        }
        names.push(format!("y{counter}"));
        names.push(format!("z{counter}"));
        counter += 1;
    }
    GeneralMap::with_names(forms, VarNames::custom(names), field).expect("forms keep height 2")
}

/// Cubic homogeneous map on `x, v, T` (`2n + 1` variables):
/// `x ↦ x + T² v + T Ψ_2(x)`, `v ↦ v − Ψ_3(x)`, `T ↦ T`.
pub fn blowup(map: &GeneralMap) -> Result<CubicMap> {
    if map.degree() > 3 {
        return Err(Error::InvalidInput(
            "blowup needs parts of degree 2 and 3 only; run degree_reduce first".into(),
        ));
    }
    let field = map.field();
    let n = map.nvars();
    let nv = 2 * n + 1;
    let t = Polynomial::var(2 * n, nv, field);
    let t2 = &t * &t;
    let psi2 = map.form(2);
    let psi3 = map.form(3);
    let mut forms = Vec::with_capacity(nv);
    for i in 0..n {
        let v = Polynomial::var(n + i, nv, field);
        forms.push(&(&t2 * &v) + &(&t * &psi2[i].extend_vars(nv)));
    }
    for p in &psi3 {
        forms.push(-&p.extend_vars(nv));
    }
    forms.push(Polynomial::zero(nv, field));
    let mut names: Vec<String> = (0..n).map(|i| map.names().name(i).to_string()).collect();
    let mut counter = 1;
    for _ in 0..n {
        let v = fresh_name(&names, "v", &mut counter);
        names.push(v);
    }
    let mut tc = 1;
    names.push(if names.iter().any(|s| s == "T") {
        fresh_name(&names, "T", &mut tc)
    } else {
        "T".to_string()
    });
    CubicMap::new(GeneralMap::with_names(forms, VarNames::custom(names), field)?)
}
