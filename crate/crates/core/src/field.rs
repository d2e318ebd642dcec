//! Ground fields and exact coefficients.
//!
//! Every computation runs over either the rationals or a prime field `F_p`.
//! The field is carried by each polynomial value rather than held globally, so
//! values from different fields never mix silently.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The ground field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    /// Residues modulo a prime.
    Prime(u64),
}

impl Field {
    /// Builds `F_p`, rejecting non-primes.
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> Coefficient {
        match self {
            Field::Rational => Coefficient::Rational(BigRational::zero()),
            Field::Prime(p) => Coefficient::Modular { value: 0, modulus: *p },
        }
    }

    pub fn one(&self) -> Coefficient {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Coefficient {
        match self {
            Field::Rational => Coefficient::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Coefficient::Modular {
                value: v.rem_euclid(*p as i64) as u64,
                modulus: *p,
            },
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Coefficient {
        match self {
            Field::Rational => Coefficient::Rational(BigRational::from_integer(v.clone())),
            Field::Prime(p) => {
                let r = v.mod_floor(&BigInt::from(*p));
                Coefficient::Modular {
                    value: r.to_u64().expect("residue fits"),
                    modulus: *p,
                }
            }
        }
    }

    /// The image of `num/den`; fails when `den` vanishes in the field.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Coefficient> {
        let d = self.from_bigint(den);
        let inv = d
            .inv()
            .ok_or_else(|| Error::InvalidInput(format!("denominator {den} vanishes in {self}")))?;
        Ok(&self.from_bigint(num) * &inv)
    }

    /// Converts a rational into this field.
    pub fn from_rational(&self, q: &BigRational) -> Result<Coefficient> {
        match self {
            Field::Rational => Ok(Coefficient::Rational(q.clone())),
            Field::Prime(_) => self.from_ratio(q.numer(), q.denom()),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element: a reduced rational, or a residue in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coefficient {
    Rational(BigRational),
    Modular { value: u64, modulus: u64 },
}

impl Coefficient {
    pub fn field(&self) -> Field {
        match self {
            Coefficient::Rational(_) => Field::Rational,
            Coefficient::Modular { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn rational(num: i64, den: i64) -> Coefficient {
        Coefficient::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Rational(q) => q.is_zero(),
            Coefficient::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coefficient::Rational(q) => q.is_one(),
            Coefficient::Modular { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Coefficient> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Coefficient::Rational(q) => Coefficient::Rational(q.recip()),
            Coefficient::Modular { value, modulus } => Coefficient::Modular {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        })
    }

    pub fn pow(&self, e: u32) -> Coefficient {
        let mut acc = self.field().one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// True when the printed form needs a leading minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            Coefficient::Rational(q) => q.is_negative(),
            Coefficient::Modular { .. } => false,
        }
    }

    /// The rational value, when this is a rational coefficient.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coefficient::Rational(q) => Some(q),
            Coefficient::Modular { .. } => None,
        }
    }

    fn check(&self, other: &Coefficient) {
        debug_assert_eq!(self.field(), other.field(), "coefficient field mismatch");
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    b = acc as u64;
    b
}

impl<'a> Add<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        self.check(rhs);
        match (self, rhs) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => Coefficient::Rational(a + b),
            (
                Coefficient::Modular { value: a, modulus },
                Coefficient::Modular { value: b, .. },
            ) => Coefficient::Modular {
                value: ((*a as u128 + *b as u128) % *modulus as u128) as u64,
                modulus: *modulus,
            },
            _ => panic!("coefficient field mismatch"),
        }
    }
}

impl<'a> Sub<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        self.check(rhs);
        match (self, rhs) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => Coefficient::Rational(a * b),
            (
                Coefficient::Modular { value: a, modulus },
                Coefficient::Modular { value: b, .. },
            ) => Coefficient::Modular {
                value: ((*a as u128 * *b as u128) % *modulus as u128) as u64,
                modulus: *modulus,
            },
            _ => panic!("coefficient field mismatch"),
        }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        match self {
            Coefficient::Rational(a) => Coefficient::Rational(-a),
            Coefficient::Modular { value, modulus } => Coefficient::Modular {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -&self
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, rhs: &Coefficient) {
        match (self, rhs) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => *a += b,
            (Coefficient::Modular { value, modulus }, Coefficient::Modular { value: b, .. }) => {
                *value = ((*value as u128 + *b as u128) % *modulus as u128) as u64
            }
            _ => panic!("coefficient field mismatch"),
        }
    }
}

impl SubAssign<&Coefficient> for Coefficient {
    fn sub_assign(&mut self, rhs: &Coefficient) {
        *self += &(-rhs);
    }
}

impl MulAssign<&Coefficient> for Coefficient {
    fn mul_assign(&mut self, rhs: &Coefficient) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Coefficient::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Total order used only for deterministic tie-breaking.
impl PartialOrd for Coefficient {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coefficient {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => a.cmp(b),
            (Coefficient::Modular { value: a, .. }, Coefficient::Modular { value: b, .. }) => {
                a.cmp(b)
            }
            (Coefficient::Rational(_), _) => Ordering::Less,
            _ => Ordering::Greater,
        }
    }
}
