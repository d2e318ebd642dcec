//! Linearizing a torus action conjugated by a triangular map.

use polyquant::torus::{torus_linearize, verify_action, ParametricEndo};
use polyquant::poly::parse_polynomial;
use polyquant::{Field, Polynomial, Result, VarNames};

fn main() -> Result<()> {
    let q = Field::Rational;
    let names = VarNames::standard(2);
    let params = VarNames::custom(vec!["t1".into(), "t2".into()]);
    let p = |s: &str| parse_polynomial(s, &names, q);
    let b = ParametricEndo::constant(2, &[p("x1 + x2^2")?, p("x2")?])?;
    let bi = ParametricEndo::constant(2, &[p("x1 - x2^2")?, p("x2")?])?;
    let tau = ParametricEndo::<Polynomial>::diagonal(&[vec![1, 1], vec![0, -1]], q)?;
    let sigma = b.compose(&tau)?.compose(&bi)?;
    println!("sigma: {}", sigma.to_strings(&names, &params).join(", "));
    println!("action: {:?}", verify_action(&sigma)?);
    let lin = torus_linearize(&sigma)?;
    let beta: Vec<String> = lin.beta.iter().map(|b| b.to_string_with(&names)).collect();
    println!("beta: {}", beta.join(", "));
    println!("tau: {}", lin.tau.to_strings(&names, &params).join(", "));
    println!("power matrix: {:?}", lin.power_matrix);
    Ok(())
}
