use num_bigint::BigInt;

use crate::error::Result;
use crate::field::Field;
use crate::parse::{evaluate, parse_expr_at, pow_by_squaring, Evaluator};
use crate::poly::{Polynomial, VarNames};

struct PolyEval<'a> {
    names: &'a VarNames,
    field: Field,
}

impl Evaluator for PolyEval<'_> {
    type Value = Polynomial;

    fn number(&self, n: &BigInt) -> Result<Polynomial> {
        Ok(Polynomial::constant(self.field.from_bigint(n), self.names.len()))
    }

    fn variable(&self, name: &str) -> Option<Polynomial> {
        self.names
            .index_of(name)
            .map(|i| Polynomial::var(i, self.names.len(), self.field))
    }

    fn add(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        a.checked_add(b)
    }

    fn sub(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        a.checked_sub(b)
    }

    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        a.checked_mul(b)
    }

    fn neg(&self, a: &Polynomial) -> Result<Polynomial> {
        Ok(-a)
    }

    fn div(&self, a: &Polynomial, b: &Polynomial) -> std::result::Result<Polynomial, String> {
        let c = b
            .as_constant()
            .ok_or_else(|| "division is only allowed by constants".to_string())?;
        let inv = c.inv().ok_or_else(|| "division by zero".to_string())?;
        Ok(a.scale(&inv))
    }

    fn pow(&self, a: &Polynomial, e: i64) -> std::result::Result<Polynomial, String> {
        if e < 0 {
            return Err("negative exponents are not allowed here".into());
        }
        pow_by_squaring(self, Polynomial::one(self.names.len(), self.field), a, e as u64)
            .map_err(|e| e.to_string())
    }
}

/// Parses a polynomial in the named variables.
pub fn parse_polynomial(text: &str, names: &VarNames, field: Field) -> Result<Polynomial> {
    parse_polynomial_at(text, names, field, 1)
}

pub fn parse_polynomial_at(
    text: &str,
    names: &VarNames,
    field: Field,
    line: usize,
) -> Result<Polynomial> {
    let expr = parse_expr_at(text, line)?;
    evaluate(&expr, &PolyEval { names, field })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use proptest::prelude::*;

    #[test]
    fn parses_rationals_and_powers() {
        let names = VarNames::standard(2);
        let p = parse_polynomial("1/2*x1^2 - (x1 - x2)*3 + 2x2", &names, Field::Rational).unwrap();
        assert_eq!(p.to_string(), "1/2*x1^2 - 3*x1 + 5*x2");
    }

    #[test]
    fn unknown_variable_reports_column() {
        let names = VarNames::standard(1);
        match parse_polynomial("x1 + x2", &names, Field::Rational) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn symplectic_aliases() {
        let names = VarNames::symplectic(1);
        let p = parse_polynomial("p1*x1 + p1^2", &names, Field::Rational).unwrap();
        assert_eq!(p.to_string_with(&names), "x1*p1 + p1^2");
    }

    #[test]
    fn modular_field_reduces_input() {
        let names = VarNames::standard(1);
        let p = parse_polynomial("x1 - x1^5", &names, Field::Prime(5)).unwrap();
        assert_eq!(p.to_string(), "4*x1^5 + x1");
    }

    fn small_poly() -> impl Strategy<Value = Polynomial> {
        proptest::collection::vec(((0u32..4, 0u32..4, 0u32..3), -5i64..6, 1i64..4), 0..6).prop_map(
            |terms| {
                let mut p = Polynomial::zero(3, Field::Rational);
                for ((a, b, c), num, den) in terms {
                    p.add_term(
                        crate::poly::Monomial::new(vec![a, b, c]),
                        crate::field::Coefficient::rational(num, den),
                    );
                }
                p
            },
        )
    }

    proptest! {
        #[test]
        fn print_then_parse_round_trips(p in small_poly()) {
            let names = VarNames::standard(3);
            let back = parse_polynomial(&p.to_string_with(&names), &names, Field::Rational).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
