//! Over F_5 the map x -> x - x^5 has unit Jacobian but is not invertible.

use polyquant::endo::{AutomorphismVerdict, PolyEndo};
use polyquant::poly::parse_polynomial;
use polyquant::{Field, Result, VarNames};

fn main() -> Result<()> {
    let f5 = Field::prime(5)?;
    let names = VarNames::standard(1);
    let phi = PolyEndo::new(vec![parse_polynomial("x1 - x1^5", &names, f5)?])?;
    println!("det J = {}", phi.jacobian_det()?.to_string_with(&names));
    match phi.is_automorphism()? {
        AutomorphismVerdict::Yes(inv) => println!("inverse: {}", inv.to_string_with(&names)),
        AutomorphismVerdict::No(why) => println!("irreversible: {why}"),
    }
    Ok(())
}
