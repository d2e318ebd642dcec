//! The standard identity on generic matrices, and a witness that S_3 fails on 2x2.

use polyquant::free::{al_verify, matrix_unit, standard_polynomial};
use polyquant::{Field, Result, VarNames};

fn main() -> Result<()> {
    for (n, r) in [(2, 3), (2, 4), (3, 6)] {
        println!("S_{r} on {n}x{n}: {}", al_verify(n, r)?);
    }
    let e = |i, j| matrix_unit(2, i, j, Field::Rational);
    let s3 = standard_polynomial(&[e(0, 0), e(0, 1), e(1, 1)])?;
    println!("S_3(e11, e12, e22) = {}", s3.to_string_with(&VarNames::standard(0)));
    Ok(())
}
