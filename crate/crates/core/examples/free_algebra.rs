//! Arithmetic in the free associative algebra.

use polyquant::free::parse_free;
use polyquant::{Field, Result, VarNames};

fn main() -> Result<()> {
    let names = VarNames::custom(vec!["x".into(), "y".into()]);
    let a = parse_free("x*y + 2*y", &names, Field::Rational)?;
    let b = parse_free("y*x - x", &names, Field::Rational)?;
    println!("a*b = {}", a.checked_mul(&b)?.to_string_with(&names));
    println!("[a, b] = {}", a.commutator(&b)?.to_string_with(&names));
    println!("abelianized [a, b] = {}", a.commutator(&b)?.abelianize().to_string_with(&names));
    Ok(())
}
