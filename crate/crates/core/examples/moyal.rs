//! Truncated star products for the one-sided and antisymmetric plane pairings.

use polyquant::moyal::{bracket_from_star, gauge_transform, moyal_product, Gauge, PoissonPairing};
use polyquant::poly::parse_polynomial;
use polyquant::{Field, Result, VarNames};

fn main() -> Result<()> {
    let f = Field::Rational;
    let names = VarNames::standard(2);
    let p = |s: &str| parse_polynomial(s, &names, f);
    let (a, b) = (p("x1^2*x2")?, p("x1*x2^2")?);
    for (label, alpha) in [
        ("one-sided", PoissonPairing::one_sided_plane(f)),
        ("antisymmetric", PoissonPairing::antisymmetric_plane(f)),
    ] {
        let s = moyal_product(&a, &b, &alpha, 4)?;
        println!("{label}: {}", s.to_strings(&names).join(" | "));
        println!("  bracket: {}", bracket_from_star(&alpha).eval(&a, &b)?.to_string_with(&names));
    }
    let alpha = PoissonPairing::antisymmetric_plane(f);
    let gauge = Gauge::new(vec![p("x1*x2")?])?;
    let s = gauge_transform(&gauge, &a, &b, &alpha, 3)?;
    println!("gauged: {}", s.to_strings(&names).join(" | "));
    Ok(())
}
