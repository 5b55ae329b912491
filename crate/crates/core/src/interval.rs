//! Rational interval enclosures with outward rounding.
//!
//! Transcendental functions are evaluated by series with explicit remainder
//! bounds, so `lo <= true value <= hi` holds exactly. Endpoints are rounded
//! outward to dyadic rationals to keep their size bounded.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::rational::{ceil, floor, format_rat, int, rat, to_f64, Rat};

/// Working precision in bits for enclosures produced by this module.
pub const DEFAULT_BITS: u32 = 96;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Rat,
    hi: Rat,
}

fn pow2(bits: u32) -> Rat {
    Rat::from_integer(BigInt::one() << bits as usize)
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(v: Rat) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn int(v: i64) -> Self {
        Self::point(int(v))
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn contains(&self, v: &Rat) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / int(2)))
    }

    /// Endpoints rounded outward to multiples of `2^-bits`.
    pub fn round_out(&self, bits: u32) -> Self {
        let s = pow2(bits);
        Interval {
            lo: Rat::from_integer(floor(&(&self.lo * &s))) / &s,
            hi: Rat::from_integer(ceil(&(&self.hi * &s))) / &s,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        Interval {
            lo: c.iter().min().unwrap().clone(),
            hi: c.iter().max().unwrap().clone(),
        }
    }

    /// Panics if `o` contains zero.
    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn recip(&self) -> Self {
        assert!(
            self.lo.is_positive() || self.hi.is_negative(),
            "reciprocal of an interval containing zero"
        );
        Interval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        }
    }

    pub fn square(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = std::cmp::max(-&self.lo, self.hi.clone());
            Interval {
                lo: Rat::zero(),
                hi: &m * &m,
            }
        } else {
            let (a, b) = (&self.lo * &self.lo, &self.hi * &self.hi);
            Interval {
                lo: std::cmp::min(a.clone(), b.clone()),
                hi: std::cmp::max(a, b),
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        self.mul(&Interval::point(c.clone()))
    }

    /// Panics on negative input.
    pub fn sqrt(&self) -> Self {
        Interval {
            lo: sqrt_enclosure(&self.lo, DEFAULT_BITS).lo,
            hi: sqrt_enclosure(&self.hi, DEFAULT_BITS).hi,
        }
    }

    /// Panics unless strictly positive.
    pub fn ln(&self) -> Self {
        Interval {
            lo: ln_enclosure(&self.lo, DEFAULT_BITS).lo,
            hi: ln_enclosure(&self.hi, DEFAULT_BITS).hi,
        }
    }

    pub fn exp(&self) -> Self {
        Interval {
            lo: exp_enclosure(&self.lo, DEFAULT_BITS).lo,
            hi: exp_enclosure(&self.hi, DEFAULT_BITS).hi,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", to_f64(&self.lo), to_f64(&self.hi))
    }
}

/// Serialized as `[lo, hi]` exact rational strings.
impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&format_rat(&self.lo))?;
        seq.serialize_element(&format_rat(&self.hi))?;
        seq.end()
    }
}

/// Enclosure of `sqrt(x)` for `x >= 0`; exact when `x` is a square of a
/// rational with denominator dividing `2^bits`.
pub fn sqrt_enclosure(x: &Rat, bits: u32) -> Interval {
    assert!(!x.is_negative(), "square root of a negative number");
    let (p, q) = (x.numer(), x.denom());
    let scaled: BigInt = (p * q) << (2 * bits as usize);
    let s = scaled.sqrt();
    let denom = q << bits as usize;
    let lo = Rat::new(s.clone(), denom.clone());
    if &s * &s == scaled {
        Interval::point(lo)
    } else {
        Interval::new(lo, Rat::new(s + 1, denom))
    }
}

// 2 * atanh(z) for 0 <= z <= 1/3, as an enclosure with absolute error below 2^-bits.
fn two_atanh(z: &Rat, bits: u32) -> Interval {
    debug_assert!(!z.is_negative() && *z <= rat(1, 3));
    let eps = pow2(bits + 4).recip();
    let z2 = z * z;
    let mut power = z.clone();
    let mut sum = Rat::zero();
    let mut k: i64 = 0;
    loop {
        sum += &power / int(2 * k + 1);
        power *= &z2;
        k += 1;
        // Remaining terms are at most z^(2k+1) / ((2k+1)(1 - z^2)).
        let tail = &power / (int(2 * k + 1) * (int(1) - &z2));
        if tail < eps {
            let lo = &sum * int(2);
            return Interval::new(lo.clone(), lo + tail * int(2)).round_out(bits + 2);
        }
    }
}

/// Enclosure of `ln(x)` for `x > 0`.
pub fn ln_enclosure(x: &Rat, bits: u32) -> Interval {
    assert!(x.is_positive(), "logarithm of a non-positive number");
    // x = 2^m * y with y in [1/2, 2).
    let m = x.numer().bits() as i64 - x.denom().bits() as i64;
    let y = if m >= 0 {
        x / Rat::from_integer(BigInt::one() << m as usize)
    } else {
        x * Rat::from_integer(BigInt::one() << (-m) as usize)
    };
    let work = bits + 8 + (64 - (m.unsigned_abs().leading_zeros()));
    let ln2 = two_atanh(&rat(1, 3), work);
    let z = (&y - int(1)) / (&y + int(1));
    let ln_y = if z.is_negative() {
        two_atanh(&-z, work).neg()
    } else {
        two_atanh(&z, work)
    };
    ln2.scale(&int(m)).add(&ln_y).round_out(bits)
}

/// Enclosure of `exp(x)`.
pub fn exp_enclosure(x: &Rat, bits: u32) -> Interval {
    if x.is_negative() {
        return exp_enclosure(&-x, bits + 8).recip().round_out(bits);
    }
    // Halve until y = x / 2^m <= 1/2, sum the Taylor series, square m times.
    let mut m: u32 = 0;
    let mut y = x.clone();
    while y > rat(1, 2) {
        y /= int(2);
        m += 1;
    }
    let work = bits + 2 * m + 16;
    let eps = pow2(work).recip();
    let mut term = Rat::one();
    let mut sum = Rat::zero();
    let mut k: i64 = 0;
    loop {
        sum += &term;
        k += 1;
        term = term * &y / int(k);
        // Remaining terms sum to at most 2 * term when y <= 1/2.
        if &term * int(2) < eps {
            break;
        }
    }
    let mut e = Interval::new(sum.clone(), sum + term * int(2)).round_out(work);
    for _ in 0..m {
        e = e.square().round_out(work);
    }
    e.round_out(bits)
}
