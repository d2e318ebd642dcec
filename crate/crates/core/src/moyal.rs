//! Truncated star products for constant bidifferential pairings, star
//! commutators, the induced Poisson bracket, and gauge transformations.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::poly::{Monomial, Polynomial, VarNames};

/// Constant pairing `α` on `m` variables. It need not be antisymmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonPairing {
    alpha: Matrix,
}

impl PoissonPairing {
    pub fn new(alpha: Matrix) -> Result<Self> {
        if alpha.rows() != alpha.cols() {
            return Err(Error::dim("pairing matrix must be square"));
        }
        Ok(PoissonPairing { alpha })
    }

    /// `α^{12} = 1`, every other entry zero.
    pub fn one_sided_plane(field: Field) -> Self {
        let mut a = Matrix::zero(2, 2, field);
        a.set(0, 1, field.one());
        PoissonPairing { alpha: a }
    }

    /// `α^{12} = 1 = −α^{21}`.
    pub fn antisymmetric_plane(field: Field) -> Self {
        let mut a = Self::one_sided_plane(field).alpha;
        a.set(1, 0, -field.one());
        PoissonPairing { alpha: a }
    }

    pub fn nvars(&self) -> usize {
        self.alpha.rows()
    }

    pub fn field(&self) -> Field {
        self.alpha.field()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.alpha
    }
}

/// Truncated series `Σ_{n ≤ order} c_n ħ^n` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct StarSeries {
    coefficients: Vec<Polynomial>,
}

impl StarSeries {
    pub fn new(coefficients: Vec<Polynomial>) -> Result<Self> {
        let Some(first) = coefficients.first() else {
            return Err(Error::InvalidInput("a series needs at least one coefficient".into()));
        };
        let (n, field) = (first.nvars(), first.field());
        if coefficients.iter().any(|c| c.nvars() != n || c.field() != field) {
            return Err(Error::dim("series coefficients live in different rings"));
        }
        Ok(StarSeries { coefficients })
    }

    /// Highest power of `ħ` that is known.
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficient(&self, n: usize) -> &Polynomial {
        &self.coefficients[n]
    }

    pub fn coefficients(&self) -> &[Polynomial] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(Polynomial::is_zero)
    }

    pub fn checked_sub(&self, other: &StarSeries) -> Result<StarSeries> {
        let k = self.order().min(other.order());
        let coefficients = (0..=k)
            .map(|n| self.coefficients[n].checked_sub(&other.coefficients[n]))
            .collect::<Result<_>>()?;
        Ok(StarSeries { coefficients })
    }

    /// Divides by `ħ`; the constant coefficient must vanish.
    pub fn divide_by_hbar(&self) -> Result<StarSeries> {
        if !self.coefficients[0].is_zero() {
            return Err(Error::InvalidInput(
                "cannot divide by ħ: the ħ^0 coefficient is nonzero".into(),
            ));
        }
        if self.coefficients.len() < 2 {
            return Err(Error::InvalidInput("dividing by ħ needs order at least 1".into()));
        }
        Ok(StarSeries {
            coefficients: self.coefficients[1..].to_vec(),
        })
    }

    pub fn to_strings(&self, names: &VarNames) -> Vec<String> {
        self.coefficients.iter().map(|c| c.to_string_with(names)).collect()
    }
}

/// `f(x) g(y)` as a polynomial in `2m` variables.
fn tensor(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let m = f.nvars();
    let fx = f.extend_vars(2 * m);
    let gy = g.remap_vars(2 * m, |i| m + i);
    &fx * &gy
}

/// Sets `y = x` in a polynomial on `2m` variables.
fn diagonal(h: &Polynomial, m: usize) -> Polynomial {
    h.remap_vars(m, |i| i % m)
}

/// The bidifferential terms `B_n(f, g) = (1/n!) P^n (f(x)g(y))|_{y=x}` for
/// `n = 0..=order`, with `P = Σ α^{ij} ∂_{x_i} ∂_{y_j}`.
pub fn bidifferential_terms(
    f: &Polynomial,
    g: &Polynomial,
    alpha: &PoissonPairing,
    order: usize,
) -> Result<Vec<Polynomial>> {
    let m = alpha.nvars();
    if f.nvars() != m || g.nvars() != m {
        return Err(Error::dim(format!(
            "pairing has {m} variables but the arguments have {} and {}",
            f.nvars(),
            g.nvars()
        )));
    }
    let field = alpha.field();
    let mut h = tensor(f, g);
    let mut out = vec![diagonal(&h, m)];
    for n in 1..=order {
        if h.is_zero() {
            out.push(Polynomial::zero(m, field));
            continue;
        }
        let mut next = Polynomial::zero(2 * m, field);
        for i in 0..m {
            let di = h.partial(i)?;
            if di.is_zero() {
                continue;
            }
            for j in 0..m {
                let a = alpha.matrix().get(i, j);
                if !a.is_zero() {
                    next = &next + &di.partial(m + j)?.scale(a);
                }
            }
        }
        let inv = field
            .from_i64(n as i64)
            .inv()
            .ok_or_else(|| Error::Unsupported(format!("1/{n}! does not exist in {field}")))?;
        h = next.scale(&inv);
        out.push(diagonal(&h, m));
    }
    Ok(out)
}

/// `f ⋆ g` through `ħ^order`.
pub fn moyal_product(
    f: &Polynomial,
    g: &Polynomial,
    alpha: &PoissonPairing,
    order: usize,
) -> Result<StarSeries> {
    StarSeries::new(bidifferential_terms(f, g, alpha, order)?)
}

/// `f ⋆ g − g ⋆ f`, divided by `ħ` when `divide` is set.
pub fn star_commutator(
    f: &Polynomial,
    g: &Polynomial,
    alpha: &PoissonPairing,
    order: usize,
    divide: bool,
) -> Result<StarSeries> {
    let c = moyal_product(f, g, alpha, order)?.checked_sub(&moyal_product(g, f, alpha, order)?)?;
    if divide {
        c.divide_by_hbar()
    } else {
        Ok(c)
    }
}

/// `{f, g} = B_1(f, g) − B_1(g, f) = Σ (α^{ij} − α^{ji}) ∂_i f ∂_j g`.
#[derive(Clone, Debug)]
pub struct StarBracket {
    product: StarProduct,
}

impl StarBracket {
    pub fn eval(&self, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
        let fg = self.product.product(f, g, 1)?;
        let gf = self.product.product(g, f, 1)?;
        fg.coefficient(1).checked_sub(gf.coefficient(1))
    }
}

pub fn bracket_from_star(alpha: &PoissonPairing) -> StarBracket {
    StarBracket {
        product: StarProduct::Moyal(alpha.clone()),
    }
}

/// `D(ħ) = 1 + Σ_{m≥1} D_m ħ^m` with constant-coefficient operators. Each
/// `D_m` is a symbol: the polynomial in `ξ_1..ξ_k` standing for `∂_1..∂_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauge {
    symbols: Vec<Polynomial>,
}

impl Gauge {
    /// `symbols[m-1]` is the symbol of `D_m`.
    pub fn new(symbols: Vec<Polynomial>) -> Result<Self> {
        if let Some(first) = symbols.first() {
            let (n, field) = (first.nvars(), first.field());
            if symbols.iter().any(|s| s.nvars() != n || s.field() != field) {
                return Err(Error::dim("gauge symbols live in different rings"));
            }
        }
        Ok(Gauge { symbols })
    }

    pub fn identity() -> Self {
        Gauge { symbols: Vec::new() }
    }

    /// Symbol of `D_m`, with `D_0 = 1`.
    fn symbol(&self, m: usize, nvars: usize, field: Field) -> Polynomial {
        match m {
            0 => Polynomial::one(nvars, field),
            _ => self
                .symbols
                .get(m - 1)
                .cloned()
                .unwrap_or_else(|| Polynomial::zero(nvars, field)),
        }
    }

    /// Symbols of `D^{-1}` through `ħ^order`; constant coefficients commute.
    fn inverse_symbols(&self, order: usize, nvars: usize, field: Field) -> Vec<Polynomial> {
        let mut inv = vec![Polynomial::one(nvars, field)];
        for n in 1..=order {
            let mut acc = Polynomial::zero(nvars, field);
            for m in 1..=n {
                acc = &acc - &(&self.symbol(m, nvars, field) * &inv[n - m]);
            }
            inv.push(acc);
        }
        inv
    }

    /// Whether every `D_m` kills constants, which makes `1` a unit of the gauged product.
    pub fn preserves_unit(&self) -> bool {
        self.symbols.iter().all(|s| s.constant_term().is_zero())
    }
}

/// Applies the operator with the given symbol.
pub fn apply_symbol(symbol: &Polynomial, f: &Polynomial) -> Result<Polynomial> {
    if symbol.nvars() != f.nvars() {
        return Err(Error::dim("operator and argument have different variable counts"));
    }
    let mut out = Polynomial::zero(f.nvars(), f.field());
    for (m, c) in symbol.terms() {
        let mut d = f.clone();
        for (i, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                d = d.partial(i)?;
            }
        }
        out = &out + &d.scale(c);
    }
    Ok(out)
}

/// Applies a series of operators to a series of polynomials, truncated at `order`.
fn apply_series(ops: &[Polynomial], series: &[Polynomial], order: usize) -> Result<Vec<Polynomial>> {
    let (n, field) = (series[0].nvars(), series[0].field());
    let mut out = vec![Polynomial::zero(n, field); order + 1];
    for (a, op) in ops.iter().enumerate().take(order + 1) {
        for (b, s) in series.iter().enumerate().take(order + 1 - a) {
            out[a + b] = &out[a + b] + &apply_symbol(op, s)?;
        }
    }
    Ok(out)
}

/// `f ⋆' g = D(D^{-1} f ⋆ D^{-1} g)` through `ħ^order`.
pub fn gauge_transform(
    gauge: &Gauge,
    f: &Polynomial,
    g: &Polynomial,
    alpha: &PoissonPairing,
    order: usize,
) -> Result<StarSeries> {
    let (m, field) = (alpha.nvars(), alpha.field());
    let inv = gauge.inverse_symbols(order, m, field);
    let fs = apply_series(&inv, std::slice::from_ref(f), order)?;
    let gs = apply_series(&inv, std::slice::from_ref(g), order)?;
    let mut prod = vec![Polynomial::zero(m, field); order + 1];
    for (a, fa) in fs.iter().enumerate() {
        for (b, gb) in gs.iter().enumerate().take(order + 1 - a) {
            if fa.is_zero() || gb.is_zero() {
                continue;
            }
            let terms = bidifferential_terms(fa, gb, alpha, order - a - b)?;
            for (k, t) in terms.into_iter().enumerate() {
                prod[a + b + k] = &prod[a + b + k] + &t;
            }
        }
    }
    let ops: Vec<Polynomial> = (0..=order).map(|k| gauge.symbol(k, m, field)).collect();
    StarSeries::new(apply_series(&ops, &prod, order)?)
}

/// A star product that can be evaluated to any order.
#[derive(Clone, Debug)]
pub enum StarProduct {
    Moyal(PoissonPairing),
    Gauged { pairing: PoissonPairing, gauge: Gauge },
}

impl StarProduct {
    pub fn product(&self, f: &Polynomial, g: &Polynomial, order: usize) -> Result<StarSeries> {
        match self {
            StarProduct::Moyal(a) => moyal_product(f, g, a, order),
            StarProduct::Gauged { pairing, gauge } => gauge_transform(gauge, f, g, pairing, order),
        }
    }

    pub fn bracket(&self) -> StarBracket {
        StarBracket {
            product: self.clone(),
        }
    }
}

/// `ħ`-coefficient table of a product of two monomials, for comparison with
/// normally ordered Weyl products.
pub fn monomial_table(
    a: &Monomial,
    b: &Monomial,
    alpha: &PoissonPairing,
    order: usize,
) -> Result<Vec<Polynomial>> {
    let field = alpha.field();
    let f = Polynomial::term(field.one(), a.clone());
    let g = Polynomial::term(field.one(), b.clone());
    bidifferential_terms(&f, &g, alpha, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::weyl::{WeylElement, WeylMonomial};
    use proptest::prelude::*;

    fn q() -> Field {
        Field::Rational
    }

    fn p(m: usize, s: &str) -> Polynomial {
        parse_polynomial(s, &VarNames::standard(m), q()).unwrap()
    }

    #[test]
    fn plane_examples() {
        let one = PoissonPairing::one_sided_plane(q());
        let anti = PoissonPairing::antisymmetric_plane(q());
        let (x1, x2) = (p(2, "x1"), p(2, "x2"));
        let s = moyal_product(&x1, &x2, &one, 3).unwrap();
        assert_eq!(s.coefficient(0), &p(2, "x1*x2"));
        assert_eq!(s.coefficient(1), &p(2, "1"));
        assert!(s.coefficients()[2..].iter().all(Polynomial::is_zero));
        let s = moyal_product(&x2, &x1, &anti, 2).unwrap();
        assert_eq!(s.coefficient(1), &p(2, "-1"));
        let c = star_commutator(&x1, &x2, &one, 2, true).unwrap();
        assert_eq!(c.coefficient(0), &p(2, "1"));
        let c = star_commutator(&x1, &x2, &anti, 2, true).unwrap();
        assert_eq!(c.coefficient(0), &p(2, "2"));
        assert!(star_commutator(&x1, &x1, &anti, 2, false).unwrap().is_zero());
        assert!(moyal_product(&x1, &x1, &one, 2).unwrap().divide_by_hbar().is_err());
        assert_eq!(bracket_from_star(&one).eval(&x1, &x2).unwrap(), p(2, "1"));
        assert_eq!(bracket_from_star(&anti).eval(&x1, &x2).unwrap(), p(2, "2"));
    }

    #[test]
    fn unit_is_preserved() {
        let one = PoissonPairing::one_sided_plane(q());
        let f = p(2, "x1^3*x2 - x2^2");
        let s = moyal_product(&f, &p(2, "1"), &one, 4).unwrap();
        assert_eq!(s.coefficient(0), &f);
        assert!(s.coefficients()[1..].iter().all(Polynomial::is_zero));
    }

    #[test]
    fn gauge_examples() {
        let one = PoissonPairing::one_sided_plane(q());
        let f = p(2, "x1^2*x2 + x2^3");
        let g = p(2, "x1*x2^2 - x1^3");
        assert_eq!(
            gauge_transform(&Gauge::identity(), &f, &g, &one, 3).unwrap(),
            moyal_product(&f, &g, &one, 3).unwrap()
        );
        let gauge = Gauge::new(vec![p(2, "x1*x2")]).unwrap();
        let gauged = StarProduct::Gauged {
            pairing: one.clone(),
            gauge: gauge.clone(),
        };
        let plain = StarProduct::Moyal(one.clone());
        assert_eq!(
            gauged.bracket().eval(&f, &g).unwrap(),
            plain.bracket().eval(&f, &g).unwrap()
        );
        assert!(gauge.preserves_unit());
        let s = gauged.product(&f, &p(2, "1"), 3).unwrap();
        assert_eq!(s.coefficient(0), &f);
        assert!(s.coefficients()[1..].iter().all(Polynomial::is_zero));
        // A zeroth-order term in D_1 moves the unit.
        let shifted = Gauge::new(vec![p(2, "1 + x1")]).unwrap();
        assert!(!shifted.preserves_unit());
    }

    #[test]
    fn weyl_correspondence_on_monomials() {
        // x1 pairs with d and x2 with x; ħ with h.
        let one = PoissonPairing::one_sided_plane(q());
        for a in 0..=3u32 {
            for b in 0..=3 - a {
                for c in 0..=3u32 {
                    for e in 0..=3 - c {
                        let left = Monomial::new(vec![a, b]);
                        let right = Monomial::new(vec![c, e]);
                        let table = monomial_table(&left, &right, &one, 6).unwrap();
                        let wl = WeylElement::term(q().one(), WeylMonomial::new(vec![b], vec![a], 0));
                        let wr = WeylElement::term(q().one(), WeylMonomial::new(vec![e], vec![c], 0));
                        let prod = wl.checked_mul(&wr).unwrap();
                        for (n, coeff) in table.iter().enumerate() {
                            let mut expect = Polynomial::zero(2, q());
                            for (m, v) in prod.terms() {
                                if m.h_exponent() as usize == n {
                                    expect.add_term(
                                        Monomial::new(vec![m.d_exponents()[0], m.x_exponents()[0]]),
                                        v.clone(),
                                    );
                                }
                            }
                            assert_eq!(*coeff, expect, "{left:?} {right:?} order {n}");
                        }
                    }
                }
            }
        }
    }

    fn small_poly(m: usize) -> impl Strategy<Value = Polynomial> {
        proptest::collection::vec((proptest::collection::vec(0u32..3, m), -3i64..4), 0..4).prop_map(
            move |terms| {
                let mut out = Polynomial::zero(m, Field::Rational);
                for (e, c) in terms {
                    out.add_term(Monomial::new(e), Field::Rational.from_i64(c));
                }
                out
            },
        )
    }

    fn pairing(m: usize) -> impl Strategy<Value = PoissonPairing> {
        proptest::collection::vec(-2i64..3, m * m).prop_map(move |v| {
            let f = Field::Rational;
            let rows = v.chunks(m).map(|r| r.iter().map(|&c| f.from_i64(c)).collect()).collect();
            PoissonPairing::new(Matrix::from_rows(f, rows).unwrap()).unwrap()
        })
    }

    fn series_product(
        a: &StarSeries,
        b: &StarSeries,
        alpha: &PoissonPairing,
        order: usize,
    ) -> Vec<Polynomial> {
        let m = alpha.nvars();
        let mut out = vec![Polynomial::zero(m, q()); order + 1];
        for (i, ai) in a.coefficients().iter().enumerate() {
            for (j, bj) in b.coefficients().iter().enumerate() {
                if i + j > order {
                    continue;
                }
                for (k, t) in bidifferential_terms(ai, bj, alpha, order - i - j)
                    .unwrap()
                    .into_iter()
                    .enumerate()
                {
                    out[i + j + k] = &out[i + j + k] + &t;
                }
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn associative_to_order(
            alpha in pairing(2),
            f in small_poly(2),
            g in small_poly(2),
            h in small_poly(2),
            k in 0usize..5,
        ) {
            let fg = moyal_product(&f, &g, &alpha, k).unwrap();
            let gh = moyal_product(&g, &h, &alpha, k).unwrap();
            let hs = StarSeries::new(vec![h.clone()]).unwrap();
            let fs = StarSeries::new(vec![f.clone()]).unwrap();
            prop_assert_eq!(
                series_product(&fg, &hs, &alpha, k),
                series_product(&fs, &gh, &alpha, k)
            );
        }

        #[test]
        fn bracket_is_poisson(
            alpha in pairing(3),
            f in small_poly(3),
            g in small_poly(3),
            h in small_poly(3),
        ) {
            let br = bracket_from_star(&alpha);
            let b = |u: &Polynomial, v: &Polynomial| br.eval(u, v).unwrap();
            let jacobi = &(&b(&f, &b(&g, &h)) + &b(&g, &b(&h, &f))) + &b(&h, &b(&f, &g));
            prop_assert!(jacobi.is_zero());
            let leibniz = &b(&(&f * &g), &h) - &(&(&f * &b(&g, &h)) + &(&b(&f, &h) * &g));
            prop_assert!(leibniz.is_zero());
            prop_assert!(b(&f, &f).is_zero());
        }

        #[test]
        fn gauge_keeps_the_bracket(
            alpha in pairing(2),
            d1 in small_poly(2),
            f in small_poly(2),
            g in small_poly(2),
        ) {
            let gauged = StarProduct::Gauged { pairing: alpha.clone(), gauge: Gauge::new(vec![d1]).unwrap() };
            prop_assert_eq!(
                gauged.bracket().eval(&f, &g).unwrap(),
                bracket_from_star(&alpha).eval(&f, &g).unwrap()
            );
        }
    }
}
