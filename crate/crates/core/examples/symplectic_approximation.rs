//! Approximating a symplectomorphism by symplectic shears, with the
//! generating polynomial of every killed defect.

use polyquant::approx::symplectic_approximate;
use polyquant::endo::is_symplectomorphism;
use polyquant::sample::random_symplectic_word;
use polyquant::{Field, Result, VarNames};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let names = VarNames::symplectic(2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sigma = random_symplectic_word(&mut rng, 2, 2, 3, Field::Rational).eval()?;
    println!("sigma: {}", sigma.to_string_with(&names));
    println!("symplectic: {}", is_symplectomorphism(&sigma)?);
    let a = symplectic_approximate(&sigma, 6)?;
    println!("{} factors, exact residual {}", a.word.len(), a.residual.is_exact());
    for gp in &a.generators {
        println!("degree {} defect, F = {}", gp.degree, gp.polynomial.to_string_with(&names));
    }
    Ok(())
}
