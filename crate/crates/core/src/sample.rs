//! Seeded random maps for experiments and tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::approx::{SymplecticFactor, SymplecticWord};
use crate::endo::{ElementaryAuto, TameWord};
use crate::field::Field;
use crate::poly::{Monomial, Polynomial};
use crate::yagzhev::GeneralMap;

/// Random polynomial in the variables `vars` with degrees `1..=max_degree`,
/// at most `terms` terms and coefficients in `-3..=3`.
pub fn random_polynomial<R: Rng>(
    rng: &mut R,
    nvars: usize,
    vars: &[usize],
    max_degree: u32,
    terms: usize,
    field: Field,
) -> Polynomial {
    let mut p = Polynomial::zero(nvars, field);
    if vars.is_empty() {
        return p;
    }
    for _ in 0..terms {
        let d = rng.gen_range(1..=max_degree);
        let mut e = vec![0u32; nvars];
        for _ in 0..d {
            e[vars[rng.gen_range(0..vars.len())]] += 1;
        }
        let c = rng.gen_range(-3i64..=3);
        p.add_term(Monomial::new(e), field.from_i64(c));
    }
    p
}

/// Shear `x_t ↦ x_t + f(others)` with `f` of degree at most `max_degree`.
pub fn random_shear<R: Rng>(rng: &mut R, n: usize, max_degree: u32, field: Field) -> ElementaryAuto {
    let t = rng.gen_range(0..n);
    let others: Vec<usize> = (0..n).filter(|&i| i != t).collect();
    let terms = rng.gen_range(1..=3);
    let shift = random_polynomial(rng, n, &others, max_degree, terms, field);
    ElementaryAuto::shear(t, shift).expect("shift avoids its target")
}

/// Word of `1..=max_len` random shears.
pub fn random_tame_word<R: Rng>(
    rng: &mut R,
    n: usize,
    max_degree: u32,
    max_len: usize,
    field: Field,
) -> TameWord {
    let len = rng.gen_range(1..=max_len);
    let factors = (0..len).map(|_| random_shear(rng, n, max_degree, field)).collect();
    TameWord::new(n, field, factors).expect("factors share the ring")
}

/// Word of `1..=max_len` alternating x- and p-shears on `2n` variables, with
/// generators of degree `2..=max_degree + 1`.
pub fn random_symplectic_word<R: Rng>(
    rng: &mut R,
    n: usize,
    max_degree: u32,
    max_len: usize,
    field: Field,
) -> SymplecticWord {
    let nv = 2 * n;
    let len = rng.gen_range(1..=max_len);
    let mut on_x = rng.gen_bool(0.5);
    let mut factors = Vec::with_capacity(len);
    for _ in 0..len {
        let vars: Vec<usize> = if on_x { (n..nv).collect() } else { (0..n).collect() };
        let mut g = Polynomial::zero(nv, field);
        while g.degree().is_none_or(|d| d < 2) {
            g = random_polynomial(rng, nv, &vars, max_degree + 1, 2, field)
                .filter_terms(|m| m.degree() >= 2);
        }
        factors.push(if on_x {
            SymplecticFactor::XShear(g)
        } else {
            SymplecticFactor::PShear(g)
        });
        on_x = !on_x;
    }
    SymplecticWord::new(nv, field, factors).expect("factors share the ring")
}

/// Map `x + H` on `n` variables with `H` of degrees `2..=max_degree`. Half the
/// samples are triangular in a random variable order, hence automorphisms;
/// the rest have dense random `H`.
pub fn random_general_map<R: Rng>(rng: &mut R, n: usize, max_degree: u32, field: Field) -> GeneralMap {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let triangular = rng.gen_bool(0.5);
    let forms = (0..n)
        .map(|i| {
            let vars: Vec<usize> = if triangular {
                let pos = order.iter().position(|&v| v == i).expect("order is a permutation");
                order[pos + 1..].to_vec()
            } else {
                (0..n).collect()
            };
            let terms = rng.gen_range(0..=3);
            random_polynomial(rng, n, &vars, max_degree, terms, field).filter_terms(|m| m.degree() >= 2)
        })
        .collect();
    GeneralMap::new(forms, field).expect("forms share the ring")
}
