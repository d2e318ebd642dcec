//! Tame approximation of a random tame map and of Nagata's automorphism.

use polyquant::approx::anick_approximate;
use polyquant::endo::PolyEndo;
use polyquant::poly::parse_polynomial;
use polyquant::sample::random_tame_word;
use polyquant::{Field, Result, VarNames};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let names = VarNames::standard(3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let phi = random_tame_word(&mut rng, 3, 2, 3, Field::Rational).eval();
    let a = anick_approximate(&phi, 6)?;
    println!("random tame map of degree {}: {} factors, exact {}", phi.degree(), a.word.len(), a.residual.is_exact());

    let nagata = PolyEndo::new(
        ["x1 - 2*x2*(x1*x3 + x2^2) - x3*(x1*x3 + x2^2)^2", "x2 + x3*(x1*x3 + x2^2)", "x3"]
            .iter()
            .map(|s| parse_polynomial(s, &names, Field::Rational))
            .collect::<Result<_>>()?,
    )?;
    let a = anick_approximate(&nagata, 6)?;
    for step in &a.steps {
        println!("degree {}: {} factors, residual height {}", step.degree, step.factors, step.residual_height);
    }
    Ok(())
}
