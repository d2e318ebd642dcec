use crate::error::{Error, Result};
use crate::weyl::{WeylElement, WeylEndo};

use super::{SymplecticFactor, SymplecticWord};

/// The Weyl automorphism whose classical limit is the factor.
pub fn lift_factor(s: &SymplecticFactor) -> Result<WeylEndo> {
    let nv = s.nvars();
    let n = nv / 2;
    let field = s.field();
    // Reject malformed factors before lifting them.
    s.to_endo()
        .map_err(|e| Error::CannotLift(e.to_string()))?;
    let gens: Vec<WeylElement> = (0..n)
        .map(|i| WeylElement::x(i, n, field))
        .chain((0..n).map(|i| WeylElement::d(i, n, field)))
        .collect();
    let mut images = gens.clone();
    match s {
        SymplecticFactor::XShear(g) => {
            // Only d's appear, so normal ordering is harmless.
            for i in 0..n {
                let shift = WeylElement::from_normal_polynomial(&g.partial(n + i)?)?;
                images[i] = images[i].checked_add(&shift)?;
            }
        }
        SymplecticFactor::PShear(g) => {
            for i in 0..n {
                let shift = WeylElement::from_normal_polynomial(&g.partial(i)?)?;
                images[n + i] = images[n + i].checked_sub(&shift)?;
            }
        }
        SymplecticFactor::Linear(a) => {
            for (i, img) in images.iter_mut().enumerate() {
                let mut acc = WeylElement::zero(n, field);
                for (j, gen) in gens.iter().enumerate() {
                    let c = a.get(i, j);
                    if !c.is_zero() {
                        acc = acc.checked_add(&gen.scale(c))?;
                    }
                }
                *img = acc;
            }
        }
        SymplecticFactor::FormShear {
            form,
            coefficient,
            degree,
        } => {
            let mut ell = WeylElement::zero(n, field);
            for (gen, c) in gens.iter().zip(form) {
                ell = ell.checked_add(&gen.scale(c))?;
            }
            // ℓ commutes with itself, so its powers need no ordering choice.
            let l = ell
                .pow(*degree)
                .scale(&(coefficient * &field.from_i64(*degree as i64 + 1)));
            for i in 0..n {
                images[i] = images[i].checked_add(&l.scale(&form[n + i]))?;
                images[n + i] = images[n + i].checked_sub(&l.scale(&form[i]))?;
            }
        }
    }
    let lifted = WeylEndo::new(images, field.one())?;
    lifted
        .check_relations()
        .map_err(|e| Error::CannotLift(e.to_string()))?;
    Ok(lifted)
}

/// Largest product of factor degrees [`lift_tame`] will compose.
pub const LIFT_DEGREE_CAP: u64 = 1024;

/// Lifts `s_1 ∘ … ∘ s_m` factor by factor.
pub fn lift_tame(word: &SymplecticWord) -> Result<WeylEndo> {
    lift_tame_with_cap(word, LIFT_DEGREE_CAP)
}

pub fn lift_tame_with_cap(word: &SymplecticWord, cap: u64) -> Result<WeylEndo> {
    let mut bound = 1u64;
    for s in word.factors() {
        bound = bound.saturating_mul(s.to_endo()?.degree().max(1) as u64);
        if bound > cap {
            return Err(Error::Resource(format!(
                "lifted word may reach degree {bound}, above the cap {cap}"
            )));
        }
    }
    let n = word.nvars() / 2;
    let mut acc = WeylEndo::identity(n, word.field());
    for s in word.factors() {
        acc = acc.compose(&lift_factor(s)?)?;
    }
    Ok(acc)
}
