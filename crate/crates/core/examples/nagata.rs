//! Nagata's automorphism: Jacobian, exact inverse and the distance to identity.

use polyquant::endo::{distance, AutomorphismVerdict, PolyEndo};
use polyquant::poly::parse_polynomial;
use polyquant::{Field, Result, VarNames};

fn main() -> Result<()> {
    let names = VarNames::standard(3);
    let images = ["x1 - 2*x2*(x1*x3 + x2^2) - x3*(x1*x3 + x2^2)^2", "x2 + x3*(x1*x3 + x2^2)", "x3"];
    let phi = PolyEndo::new(
        images
            .iter()
            .map(|s| parse_polynomial(s, &names, Field::Rational))
            .collect::<Result<_>>()?,
    )?;
    println!("phi: {}", phi.to_string_with(&names));
    println!("det J = {}", phi.jacobian_det()?.to_string_with(&names));
    match phi.is_automorphism()? {
        AutomorphismVerdict::Yes(inv) => {
            println!("inverse (degree {}): {}", inv.degree(), inv.to_string_with(&names));
            println!("phi o inv = id: {}", phi.compose(&inv)?.is_identity());
        }
        AutomorphismVerdict::No(why) => println!("not invertible: {why}"),
    }
    let id = PolyEndo::identity(3, Field::Rational);
    println!("d(phi, id) = {:.6}", distance(&phi, &id)?);
    Ok(())
}
