//! Polynomial endomorphisms given by generator images.
//!
//! Composition convention: `(φ∘ψ)(x_i) = φ(ψ(x_i))`, so the images of the
//! composite are `ψ_i(φ_1, …, φ_n)`. Read as maps of points, `φ∘ψ` applies
//! `φ` first.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Coefficient, Field};
use crate::linalg::Matrix;
use crate::poly::{Height, Monomial, PolyMatrix, Polynomial, VarNames};

/// Default cap on the Gabber degree bound accepted by [`PolyEndo::is_automorphism`].
pub const GABBER_DEGREE_CAP: u64 = 1024;

/// An origin-preserving endomorphism of `K[x_1..x_n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyEndo {
    images: Vec<Polynomial>,
    field: Field,
}

impl PolyEndo {
    pub fn identity(n: usize, field: Field) -> Self {
        PolyEndo {
            images: (0..n).map(|i| Polynomial::var(i, n, field)).collect(),
            field,
        }
    }

    /// Rejects images with a nonzero constant term.
    pub fn new(images: Vec<Polynomial>) -> Result<Self> {
        let field = Self::check_ring(&images)?;
        for (i, img) in images.iter().enumerate() {
            if !img.constant_term().is_zero() {
                return Err(Error::InvalidInput(format!(
                    "image {} has constant term {}; maps must fix the origin",
                    i + 1,
                    img.constant_term()
                )));
            }
        }
        Ok(PolyEndo { images, field })
    }

    fn check_ring(images: &[Polynomial]) -> Result<Field> {
        let n = images.len();
        let field = images.first().map(|p| p.field()).unwrap_or(Field::Rational);
        for img in images {
            if img.nvars() != n {
                return Err(Error::dim(format!(
                    "{n} images but an image has {} variables",
                    img.nvars()
                )));
            }
            if img.field() != field {
                return Err(Error::dim("images over different fields"));
            }
        }
        Ok(field)
    }

    /// The map `x ↦ A x`, where row `i` of `A` holds the coefficients of image `i`.
    pub fn from_linear(a: &Matrix) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::dim("linear map needs a square matrix"));
        }
        let n = a.rows();
        let images = (0..n)
            .map(|i| {
                let mut p = Polynomial::zero(n, a.field());
                for j in 0..n {
                    p.add_term(Monomial::var(j, n), a.get(i, j).clone());
                }
                p
            })
            .collect();
        Ok(PolyEndo {
            images,
            field: a.field(),
        })
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Polynomial {
        &self.images[i]
    }

    pub fn into_images(self) -> Vec<Polynomial> {
        self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, p)| *p == Polynomial::var(i, self.nvars(), self.field))
    }

    /// Maximum degree of the images; zero for the zero map.
    pub fn degree(&self) -> u32 {
        self.images.iter().filter_map(Polynomial::degree).max().unwrap_or(0)
    }

    /// `Ht(φ − id)`.
    pub fn height(&self) -> Height {
        self.difference_height(&PolyEndo::identity(self.nvars(), self.field))
            .expect("same ring")
    }

    /// `Ht(φ − ψ)`, the least degree in which the two maps differ.
    pub fn difference_height(&self, other: &PolyEndo) -> Result<Height> {
        self.same_ring(other)?;
        Ok(self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| (a - b).height())
            .min()
            .unwrap_or(Height::Infinite))
    }

    fn same_ring(&self, other: &PolyEndo) -> Result<()> {
        if self.nvars() != other.nvars() {
            return Err(Error::dim(format!(
                "endomorphisms of {} and {} variables",
                self.nvars(),
                other.nvars()
            )));
        }
        if self.field != other.field {
            return Err(Error::dim("endomorphisms over different fields"));
        }
        Ok(())
    }

    /// `(self ∘ other)(x_i) = self(other(x_i))`.
    pub fn compose(&self, other: &PolyEndo) -> Result<PolyEndo> {
        self.same_ring(other)?;
        let images = other
            .images
            .iter()
            .map(|g| g.substitute(&self.images))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyEndo {
            images,
            field: self.field,
        })
    }

    /// [`compose`](Self::compose) with every term above `max_degree` dropped.
    pub fn compose_truncated(&self, other: &PolyEndo, max_degree: u32) -> Result<PolyEndo> {
        self.same_ring(other)?;
        let images = other
            .images
            .iter()
            .map(|g| g.substitute_truncated(&self.images, max_degree))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyEndo {
            images,
            field: self.field,
        })
    }

    pub fn truncate(&self, max_degree: u32) -> PolyEndo {
        PolyEndo {
            images: self.images.iter().map(|p| p.truncate(max_degree)).collect(),
            field: self.field,
        }
    }

    /// Degree-`d` components of the images.
    pub fn component(&self, d: u32) -> Vec<Polynomial> {
        self.images.iter().map(|p| p.homogeneous_component(d)).collect()
    }

    pub fn jacobian(&self) -> Result<PolyMatrix> {
        let n = self.nvars();
        let rows = self
            .images
            .iter()
            .map(|p| (0..n).map(|j| p.partial(j)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if n == 0 {
            return Ok(PolyMatrix::zero(0, 0, 0, self.field));
        }
        PolyMatrix::from_rows(rows)
    }

    pub fn jacobian_det(&self) -> Result<Polynomial> {
        self.jacobian()?.determinant()
    }

    /// The matrix of the linear part; row `i` belongs to image `i`.
    pub fn linear_matrix(&self) -> Matrix {
        let n = self.nvars();
        let mut a = Matrix::zero(n, n, self.field);
        for (i, p) in self.images.iter().enumerate() {
            for j in 0..n {
                a.set(i, j, p.coefficient(&Monomial::var(j, n)));
            }
        }
        a
    }

    pub fn linear_part(&self) -> PolyEndo {
        PolyEndo::from_linear(&self.linear_matrix()).expect("square")
    }

    /// Truncated inverse `G` with `compose(φ, G) ≡ compose(G, φ) ≡ id`
    /// modulo terms of degree above `n_max`.
    pub fn formal_inverse(&self, n_max: u32) -> Result<PolyEndo> {
        let mut it = InverseSeries::new(self)?;
        while it.computed_through() < n_max {
            it.next_component()?;
        }
        Ok(it.inverse())
    }

    pub fn is_automorphism(&self) -> Result<AutomorphismVerdict> {
        self.is_automorphism_with_cap(GABBER_DEGREE_CAP)
    }

    /// Decides invertibility using the bound `deg φ^{-1} ≤ (deg φ)^{n-1}`.
    pub fn is_automorphism_with_cap(&self, cap: u64) -> Result<AutomorphismVerdict> {
        let n = self.nvars();
        if self.linear_matrix().inverse().is_none() {
            return Ok(AutomorphismVerdict::No(NonInvertibility::SingularLinearPart));
        }
        let det = self.jacobian_det()?;
        if det.as_constant().map(|c| c.is_zero()).unwrap_or(true) {
            return Ok(AutomorphismVerdict::No(NonInvertibility::NonConstantJacobian(det)));
        }
        let bound = gabber_bound(self.degree(), n);
        if bound > cap {
            return Err(Error::Resource(format!(
                "inverse degree bound {bound} exceeds cap {cap}"
            )));
        }
        let bound = bound as u32;
        let mut it = InverseSeries::new(self)?;
        let mut last_checked: Option<u32> = None;
        while it.computed_through() < bound + 1 {
            let d = it.next_component()?;
            let top = it.inverse().degree();
            if d > bound {
                if it.component_is_zero(d) {
                    break;
                }
                return Ok(AutomorphismVerdict::No(NonInvertibility::InverseExceedsBound {
                    degree: d,
                    bound,
                }));
            }
            // Candidate found when the series has stalled; the exact check is rigorous.
            if d > top && it.component_is_zero(d) && last_checked != Some(top) {
                last_checked = Some(top);
                if let Some(inv) = it.try_exact(self)? {
                    return Ok(AutomorphismVerdict::Yes(inv));
                }
            }
        }
        match it.try_exact(self)? {
            Some(inv) => Ok(AutomorphismVerdict::Yes(inv)),
            None => Ok(AutomorphismVerdict::No(NonInvertibility::CompositionFails)),
        }
    }

    pub fn to_string_with(&self, names: &VarNames) -> String {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, p)| format!("{} -> {}", names.name(i), p.to_string_with(names)))
            .collect();
        parts.join(", ")
    }
}

impl fmt::Display for PolyEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with(&VarNames::standard(self.nvars())))
    }
}

/// `d^{n-1}`, saturating.
pub fn gabber_bound(degree: u32, n: usize) -> u64 {
    let d = degree.max(1) as u64;
    let mut b: u64 = 1;
    for _ in 1..n {
        b = b.saturating_mul(d);
    }
    b
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AutomorphismVerdict {
    Yes(PolyEndo),
    No(NonInvertibility),
}

impl AutomorphismVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, AutomorphismVerdict::Yes(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonInvertibility {
    SingularLinearPart,
    NonConstantJacobian(Polynomial),
    /// The formal inverse has a nonzero component above the degree bound.
    InverseExceedsBound { degree: u32, bound: u32 },
    CompositionFails,
}

impl fmt::Display for NonInvertibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonInvertibility::SingularLinearPart => write!(f, "linear part is singular"),
            NonInvertibility::NonConstantJacobian(d) => {
                write!(f, "Jacobian determinant {d} is not a nonzero constant")
            }
            NonInvertibility::InverseExceedsBound { degree, bound } => write!(
                f,
                "formal inverse has a nonzero component in degree {degree} above the bound {bound}"
            ),
            NonInvertibility::CompositionFails => {
                write!(f, "truncated inverse does not compose to the identity")
            }
        }
    }
}

/// Degree-by-degree solution of `φ(G(y)) = y`.
///
/// With `φ = A x + H(x)` and `Ht(H) ≥ 2`, the components are
/// `G_1 = A^{-1} y` and `G_d = −A^{-1} [H(G_{<d})]_d`.
pub struct InverseSeries {
    a_inv: Matrix,
    nonlinear: Vec<Polynomial>,
    components: Vec<Vec<Polynomial>>,
    field: Field,
}

impl InverseSeries {
    pub fn new(phi: &PolyEndo) -> Result<Self> {
        let a_inv = phi
            .linear_matrix()
            .inverse()
            .ok_or(Error::NotLocallyInvertible)?;
        let n = phi.nvars();
        let nonlinear = phi
            .images
            .iter()
            .map(|p| p.filter_terms(|m| m.degree() >= 2))
            .collect();
        let g1 = (0..n)
            .map(|i| {
                let mut p = Polynomial::zero(n, phi.field);
                for j in 0..n {
                    p.add_term(Monomial::var(j, n), a_inv.get(i, j).clone());
                }
                p
            })
            .collect();
        Ok(InverseSeries {
            a_inv,
            nonlinear,
            components: vec![vec![Polynomial::zero(n, phi.field); n], g1],
            field: phi.field,
        })
    }

    /// Highest degree computed so far.
    pub fn computed_through(&self) -> u32 {
        (self.components.len() - 1) as u32
    }

    pub fn component(&self, d: u32) -> &[Polynomial] {
        &self.components[d as usize]
    }

    pub fn component_is_zero(&self, d: u32) -> bool {
        self.components[d as usize].iter().all(Polynomial::is_zero)
    }

    fn partial_sum(&self) -> Vec<Polynomial> {
        let n = self.nonlinear.len();
        (0..n)
            .map(|i| {
                let mut acc = Polynomial::zero(n, self.field);
                for comp in &self.components {
                    acc = &acc + &comp[i];
                }
                acc
            })
            .collect()
    }

    /// Computes the next component and returns its degree.
    pub fn next_component(&mut self) -> Result<u32> {
        let d = self.computed_through() + 1;
        let n = self.nonlinear.len();
        let g = self.partial_sum();
        let h: Vec<Polynomial> = self
            .nonlinear
            .iter()
            .map(|p| {
                p.substitute_truncated(&g, d)
                    .map(|q| q.homogeneous_component(d))
            })
            .collect::<Result<_>>()?;
        let comp = (0..n)
            .map(|i| {
                let mut acc = Polynomial::zero(n, self.field);
                for (j, hj) in h.iter().enumerate() {
                    let c = self.a_inv.get(i, j);
                    if !c.is_zero() && !hj.is_zero() {
                        acc = &acc - &hj.scale(c);
                    }
                }
                acc
            })
            .collect();
        self.components.push(comp);
        Ok(d)
    }

    pub fn inverse(&self) -> PolyEndo {
        PolyEndo {
            images: self.partial_sum(),
            field: self.field,
        }
    }

    /// The current partial sum, if it is an exact two-sided inverse.
    pub fn try_exact(&self, phi: &PolyEndo) -> Result<Option<PolyEndo>> {
        let g = self.inverse();
        if phi.compose(&g)?.is_identity() && g.compose(phi)?.is_identity() {
            Ok(Some(g))
        } else {
            Ok(None)
        }
    }
}

/// `d(φ, ψ) = exp(−Ht(φ − ψ))`; zero when the maps agree.
pub fn distance(phi: &PolyEndo, psi: &PolyEndo) -> Result<f64> {
    Ok(match phi.difference_height(psi)? {
        Height::Finite(h) => (-(h as f64)).exp(),
        Height::Infinite => 0.0,
    })
}

/// Elementary automorphism `x_k ↦ a·x_k + f`, with `f` free of `x_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementaryAuto {
    target: usize,
    scale: Coefficient,
    shift: Polynomial,
}

impl ElementaryAuto {
    pub fn new(target: usize, scale: Coefficient, shift: Polynomial) -> Result<Self> {
        if target >= shift.nvars() {
            return Err(Error::IndexOutOfRange {
                index: target,
                len: shift.nvars(),
            });
        }
        if scale.is_zero() {
            return Err(Error::InvalidInput("elementary factor with zero scale".into()));
        }
        if shift.depends_on(target) {
            return Err(Error::InvalidInput(format!(
                "shift of x{} depends on x{}",
                target + 1,
                target + 1
            )));
        }
        if !shift.constant_term().is_zero() {
            return Err(Error::InvalidInput("shift has a constant term".into()));
        }
        Ok(ElementaryAuto {
            target,
            scale,
            shift,
        })
    }

    /// `x_k ↦ x_k + f`.
    pub fn shear(target: usize, shift: Polynomial) -> Result<Self> {
        let one = shift.field().one();
        Self::new(target, one, shift)
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn scale(&self) -> &Coefficient {
        &self.scale
    }

    pub fn shift(&self) -> &Polynomial {
        &self.shift
    }

    pub fn nvars(&self) -> usize {
        self.shift.nvars()
    }

    pub fn to_endo(&self) -> PolyEndo {
        let (n, field) = (self.nvars(), self.shift.field());
        let mut images: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(i, n, field)).collect();
        images[self.target] = &images[self.target].scale(&self.scale) + &self.shift;
        PolyEndo { images, field }
    }

    /// `x_k ↦ a^{-1}(x_k − f)`.
    pub fn inverse(&self) -> ElementaryAuto {
        let inv = self.scale.inv().expect("nonzero scale");
        ElementaryAuto {
            target: self.target,
            scale: inv.clone(),
            shift: (-&self.shift).scale(&inv),
        }
    }
}

/// A word in elementary automorphisms, evaluated as `e_1 ∘ e_2 ∘ … ∘ e_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TameWord {
    nvars: usize,
    field: Field,
    factors: Vec<ElementaryAuto>,
}

impl TameWord {
    pub fn empty(nvars: usize, field: Field) -> Self {
        TameWord {
            nvars,
            field,
            factors: Vec::new(),
        }
    }

    pub fn new(nvars: usize, field: Field, factors: Vec<ElementaryAuto>) -> Result<Self> {
        for f in &factors {
            if f.nvars() != nvars || f.shift.field() != field {
                return Err(Error::dim("factor lives in a different ring"));
            }
        }
        Ok(TameWord {
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

    pub fn factors(&self) -> &[ElementaryAuto] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn push(&mut self, f: ElementaryAuto) {
        assert_eq!(f.nvars(), self.nvars);
        self.factors.push(f);
    }

    pub fn extend(&mut self, other: TameWord) {
        assert_eq!(other.nvars, self.nvars);
        self.factors.extend(other.factors);
    }

    pub fn concat(&self, other: &TameWord) -> TameWord {
        let mut out = self.clone();
        out.extend(other.clone());
        out
    }

    pub fn inverse(&self) -> TameWord {
        TameWord {
            nvars: self.nvars,
            field: self.field,
            factors: self.factors.iter().rev().map(ElementaryAuto::inverse).collect(),
        }
    }

    pub fn eval(&self) -> PolyEndo {
        eval_tame_word(self)
    }

    /// Evaluation modulo terms above `max_degree`.
    pub fn eval_truncated(&self, max_degree: u32) -> PolyEndo {
        let mut acc = PolyEndo::identity(self.nvars, self.field);
        for f in &self.factors {
            acc = acc
                .compose_truncated(&f.to_endo(), max_degree)
                .expect("same ring");
        }
        acc
    }
}

/// `e_1 ∘ … ∘ e_m`.
pub fn eval_tame_word(w: &TameWord) -> PolyEndo {
    let mut acc = PolyEndo::identity(w.nvars, w.field);
    for f in &w.factors {
        acc = acc.compose(&f.to_endo()).expect("same ring");
    }
    acc
}

/// Number of canonical pairs for a phase-space ring, or an error for odd counts.
pub fn symplectic_rank(nvars: usize) -> Result<usize> {
    if nvars % 2 != 0 {
        return Err(Error::dim(format!(
            "phase space needs an even variable count, got {nvars}"
        )));
    }
    Ok(nvars / 2)
}

/// `{f, g} = Σ_i ∂f/∂p_i ∂g/∂x_i − ∂f/∂x_i ∂g/∂p_i` on `x_1..x_n, p_1..p_n`.
pub fn poisson_bracket(f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    let n = symplectic_rank(f.nvars())?;
    if g.nvars() != f.nvars() || g.field() != f.field() {
        return Err(Error::dim("bracket operands live in different rings"));
    }
    let mut acc = Polynomial::zero(f.nvars(), f.field());
    for i in 0..n {
        let (x, p) = (i, n + i);
        acc = &acc + &(&f.partial(p)? * &g.partial(x)?);
        acc = &acc - &(&f.partial(x)? * &g.partial(p)?);
    }
    Ok(acc)
}

/// First generator pair whose bracket differs from the canonical table.
pub fn symplectic_violation(sigma: &PolyEndo) -> Result<Option<(usize, usize, Polynomial)>> {
    let nv = sigma.nvars();
    let n = symplectic_rank(nv)?;
    let field = sigma.field();
    for a in 0..nv {
        for b in a + 1..nv {
            let got = poisson_bracket(sigma.image(a), sigma.image(b))?;
            // {x_i, p_i} = −1 in this convention; all other pairs vanish.
            let expected = if b == a + n && a < n {
                Polynomial::constant(-field.one(), nv)
            } else {
                Polynomial::zero(nv, field)
            };
            if got != expected {
                return Ok(Some((a, b, got)));
            }
        }
    }
    Ok(None)
}

pub fn is_symplectomorphism(sigma: &PolyEndo) -> Result<bool> {
    Ok(symplectic_violation(sigma)?.is_none())
}
