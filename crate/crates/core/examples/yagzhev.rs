//! Engel and weak nilpotence checks, and the reduction of x -> x + x^5 over F_5
//! to a cubic homogeneous map.

use polyquant::poly::parse_polynomial;
use polyquant::yagzhev::{blowup, degree_reduce, engel_check, weak_nilpotence_check, GeneralMap, WeakNilpotence};
use polyquant::{Field, Result, VarNames};

fn main() -> Result<()> {
    let q = Field::Rational;
    let names = VarNames::standard(2);
    let map = GeneralMap::new(
        vec![parse_polynomial("x2^3", &names, q)?, parse_polynomial("0", &names, q)?],
        q,
    )?;
    println!("engel: {}", engel_check(&map)?);
    match weak_nilpotence_check(&map, 10)? {
        WeakNilpotence::Yagzhev { order, inverse } => {
            println!("weakly nilpotent of order {order}; inverse {}", inverse.to_string_with(&names))
        }
        other => println!("{other:?}"),
    }

    let f5 = Field::prime(5)?;
    let one = VarNames::standard(1);
    let quintic = GeneralMap::new(vec![parse_polynomial("x1^5", &one, f5)?], f5)?;
    let reduced = degree_reduce(&quintic);
    println!("reduced to {} variables: {}", reduced.nvars(), reduced.to_endo().to_string_with(reduced.names()));
    let cubic = blowup(&reduced)?;
    println!("blowup: {} variables, cubic homogeneous {}", cubic.map().nvars(), cubic.map().is_cubic_homogeneous());
    println!("engel: {}", engel_check(cubic.map())?);
    Ok(())
}
