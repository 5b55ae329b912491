//! Coefficient fields for Puiseux series: the rationals or a prime field.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rat, parse_rat, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    /// Integers modulo a prime.
    Prime(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Q(Rat),
    Fp { value: u64, modulus: u64 },
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Field {
    /// `Prime(p)` after checking primality.
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::InvalidParameter(format!("{p} is not prime")))
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Rational => None,
            Field::Prime(p) => Some(*p),
        }
    }

    pub fn zero(&self) -> FieldElem {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> FieldElem {
        self.from_rat(&Rat::from_integer(BigInt::from(v)))
            .expect("integers embed in every field")
    }

    /// Image of a rational; fails in `F_p` when `p` divides the denominator.
    pub fn from_rat(&self, v: &Rat) -> Result<FieldElem> {
        match *self {
            Field::Rational => Ok(FieldElem::Q(v.clone())),
            Field::Prime(p) => {
                let m = BigInt::from(p);
                let num = v.numer().mod_floor(&m).to_u64().unwrap();
                let den = v.denom().mod_floor(&m).to_u64().unwrap();
                if den == 0 {
                    return Err(Error::Parse(format!(
                        "{} has no image modulo {p}",
                        format_rat(v)
                    )));
                }
                let a = FieldElem::Fp { value: num, modulus: p };
                let b = FieldElem::Fp { value: den, modulus: p };
                Ok(a.mul(&b.inv()))
            }
        }
    }

    /// Non-zero elements in a fixed order: `1, -1, 2, -2, ...` over the
    /// rationals and `1, 2, ..., p-1` modulo `p`.
    pub fn nonzero_elements(&self) -> Box<dyn Iterator<Item = FieldElem>> {
        match *self {
            Field::Rational => Box::new(
                (1i64..).flat_map(|k| [k, -k]).map(|k| FieldElem::Q(Rat::from_integer(k.into()))),
            ),
            Field::Prime(p) => Box::new((1..p).map(move |v| FieldElem::Fp { value: v, modulus: p })),
        }
    }

    /// Parses a coefficient: `"p/q"` or `"k mod p"`.
    pub fn parse_elem(&self, text: &str) -> Result<FieldElem> {
        let text = text.trim();
        if let Some((k, p)) = text.split_once("mod") {
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("invalid modulus in {text:?}")))?;
            if *self != Field::Prime(p) {
                return Err(Error::Parse(format!(
                    "coefficient {text:?} does not belong to field {self}"
                )));
            }
            return self.from_rat(&parse_rat(k)?);
        }
        self.from_rat(&parse_rat(text)?)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text.trim() {
            "Q" => Ok(Field::Rational),
            other => match other.strip_prefix("Fp:") {
                Some(p) => Field::prime(
                    p.parse()
                        .map_err(|_| Error::Parse(format!("invalid field {other:?}")))?,
                ),
                None => Err(Error::Parse(format!("invalid field {other:?}"))),
            },
        }
    }
}

impl FieldElem {
    pub fn field(&self) -> Field {
        match self {
            FieldElem::Q(_) => Field::Rational,
            FieldElem::Fp { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Q(v) => v.is_zero(),
            FieldElem::Fp { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Q(v) => v.is_one(),
            FieldElem::Fp { value, .. } => *value == 1,
        }
    }

    fn mismatch(&self, other: &FieldElem) -> ! {
        panic!(
            "field mismatch: {} and {}",
            self.field(),
            other.field()
        )
    }

    pub fn add(&self, other: &FieldElem) -> FieldElem {
        match (self, other) {
            (FieldElem::Q(a), FieldElem::Q(b)) => FieldElem::Q(a + b),
            (FieldElem::Fp { value: a, modulus: p }, FieldElem::Fp { value: b, modulus: q })
                if p == q =>
            {
                FieldElem::Fp { value: (a + b) % p, modulus: *p }
            }
            _ => self.mismatch(other),
        }
    }

    pub fn neg(&self) -> FieldElem {
        match self {
            FieldElem::Q(a) => FieldElem::Q(-a),
            FieldElem::Fp { value, modulus } => FieldElem::Fp {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }

    pub fn sub(&self, other: &FieldElem) -> FieldElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElem) -> FieldElem {
        match (self, other) {
            (FieldElem::Q(a), FieldElem::Q(b)) => FieldElem::Q(a * b),
            (FieldElem::Fp { value: a, modulus: p }, FieldElem::Fp { value: b, modulus: q })
                if p == q =>
            {
                let v = (*a as u128 * *b as u128 % *p as u128) as u64;
                FieldElem::Fp { value: v, modulus: *p }
            }
            _ => self.mismatch(other),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> FieldElem {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            FieldElem::Q(a) => FieldElem::Q(a.recip()),
            FieldElem::Fp { value, modulus } => {
                let (g, x, _) = extended_gcd(*value as i128, *modulus as i128);
                debug_assert_eq!(g, 1);
                FieldElem::Fp {
                    value: x.rem_euclid(*modulus as i128) as u64,
                    modulus: *modulus,
                }
            }
        }
    }

    pub fn div(&self, other: &FieldElem) -> FieldElem {
        self.mul(&other.inv())
    }
}

fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = extended_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Q(v) => {
                if v.is_integer() {
                    write!(f, "{}", v.numer())
                } else {
                    write!(f, "{}/{}", v.numer(), v.denom())
                }
            }
            FieldElem::Fp { value, modulus } => write!(f, "{value} mod {modulus}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn prime_field_arithmetic() {
        let f5 = Field::prime(5).unwrap();
        let two = f5.from_i64(2);
        let three = f5.from_i64(3);
        assert!(two.mul(&three).is_one());
        assert!(two.add(&three).is_zero());
        assert_eq!(two.inv(), three);
        assert_eq!(f5.from_i64(-1), f5.from_i64(4));
        assert_eq!(f5.from_rat(&rat(1, 2)).unwrap(), three);
        assert!(f5.from_rat(&rat(1, 5)).is_err());
    }

    #[test]
    fn parse_and_display() {
        let f3: Field = "Fp:3".parse().unwrap();
        assert_eq!(f3, Field::Prime(3));
        assert!("Fp:4".parse::<Field>().is_err());
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Rational);
        assert_eq!(f3.parse_elem("5 mod 3").unwrap(), f3.from_i64(2));
        assert!(f3.parse_elem("1 mod 5").is_err());
        assert_eq!(Field::Rational.parse_elem("-3/6").unwrap().to_string(), "-1/2");
        assert_eq!(f3.from_i64(2).to_string(), "2 mod 3");
    }

    #[test]
    fn nonzero_enumeration() {
        let q: Vec<_> = Field::Rational.nonzero_elements().take(4).map(|e| e.to_string()).collect();
        assert_eq!(q, vec!["1", "-1", "2", "-2"]);
        assert_eq!(Field::Prime(3).nonzero_elements().count(), 2);
    }
}
