//! Lifting a tame symplectic word to the Weyl algebra and taking the classical limit.

use polyquant::approx::lift_tame;
use polyquant::sample::random_symplectic_word;
use polyquant::weyl::{parse_weyl, WeylElement};
use polyquant::{Field, Result, VarNames};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let f = Field::Rational;
    let a = parse_weyl("d1*x1", 1, f)?;
    let b = parse_weyl("x1*d1", 1, f)?;
    println!("[d1, x1] = {}", a.checked_sub(&b)?);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let word = random_symplectic_word(&mut rng, 1, 2, 3, f);
    let lifted = lift_tame(&word)?;
    let names = WeylElement::names(1);
    for (i, image) in lifted.images().iter().enumerate() {
        println!("{} -> {image}", names.name(i));
    }
    lifted.check_relations()?;
    let classical = lifted.classical_limit()?;
    println!("classical limit: {}", classical.to_string_with(&VarNames::symplectic(1)));
    println!("matches the word: {}", classical == word.eval()?);
    Ok(())
}
