//! Exact complex scalars with rational real and imaginary parts.
//!
//! Every coefficient in this crate is a `GaussianRational`: a pair of
//! arbitrary-precision rationals interpreted as `re + im*i`. Arithmetic is
//! exact; nothing in the crate ever rounds.
//!
//! Canonical text form (used verbatim in all JSON payloads):
//!
//! ```text
//! INT := -?[0-9]+
//! RAT := INT ("/" INT)?
//! GR  := RAT | RAT ("+"|"-") RAT "i" | RAT "i"
//! ```
//!
//! No whitespace anywhere. `3`, `-1/2`, `3+1/2i`, `2-3i`, `5i` are all valid.
//! Emission is canonical: reduced fractions, positive denominators, the
//! imaginary part printed only when nonzero, and the real part dropped only
//! when it is zero and the imaginary part is not.

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// Exact element of Q(i).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// `num/den` as a real scalar. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    /// `re_num/re_den + (im_num/im_den) i`.
    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        assert!(re_den != 0 && im_den != 0, "zero denominator");
        Self::new(
            BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
            BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
        )
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `re^2 + im^2`, the square of the absolute value.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    /// Parse the canonical grammar. Rejects whitespace and trailing input.
    pub fn parse(s: &str) -> Result<Self, String> {
        let bytes = s.as_bytes();
        let mut pos = 0usize;
        let first = parse_rat(bytes, &mut pos).map_err(|e| format!("{e} in {s:?}"))?;
        if pos == bytes.len() {
            return Ok(Self::new(first, BigRational::zero()));
        }
        match bytes[pos] {
            b'i' => {
                pos += 1;
                if pos != bytes.len() {
                    return Err(format!("trailing input after 'i' in {s:?}"));
                }
                Ok(Self::new(BigRational::zero(), first))
            }
            sep @ (b'+' | b'-') => {
                pos += 1;
                let second = parse_rat(bytes, &mut pos).map_err(|e| format!("{e} in {s:?}"))?;
                if pos >= bytes.len() || bytes[pos] != b'i' {
                    return Err(format!("expected 'i' after imaginary part in {s:?}"));
                }
                pos += 1;
                if pos != bytes.len() {
                    return Err(format!("trailing input after 'i' in {s:?}"));
                }
                let im = if sep == b'-' { -second } else { second };
                Ok(Self::new(first, im))
            }
            c => Err(format!("unexpected byte {:?} in {s:?}", c as char)),
        }
    }
}

/// RAT := INT ("/" INT)?; the denominator sign is normalized away.
fn parse_rat(bytes: &[u8], pos: &mut usize) -> Result<BigRational, String> {
    let numer = parse_int(bytes, pos)?;
    if *pos < bytes.len() && bytes[*pos] == b'/' {
        *pos += 1;
        let denom = parse_int(bytes, pos)?;
        if denom.is_zero() {
            return Err("zero denominator".to_string());
        }
        Ok(BigRational::new(numer, denom))
    } else {
        Ok(BigRational::from_integer(numer))
    }
}

fn parse_int(bytes: &[u8], pos: &mut usize) -> Result<BigInt, String> {
    let start = *pos;
    if *pos < bytes.len() && bytes[*pos] == b'-' {
        *pos += 1;
    }
    let digits_start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == digits_start {
        return Err("expected digits".to_string());
    }
    let text = std::str::from_utf8(&bytes[start..*pos]).expect("ascii slice");
    BigInt::from_str(text).map_err(|e| e.to_string())
}

fn fmt_rat(r: &BigRational) -> String {
    // `BigRational` Display already prints `n` or `n/d` with d > 0.
    r.to_string()
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{}i", fmt_rat(&self.im));
        }
        if self.im.is_negative() {
            write!(f, "{}-{}i", fmt_rat(&self.re), fmt_rat(&-self.im.clone()))
        } else {
            write!(f, "{}+{}i", fmt_rat(&self.re), fmt_rat(&self.im))
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        GaussianRational::parse(&s).map_err(de::Error::custom)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $trait for &GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| GaussianRational::new(&a.re + &b.re, &a.im + &b.im));
binop!(Sub, sub, |a, b| GaussianRational::new(&a.re - &b.re, &a.im - &b.im));
binop!(Mul, mul, |a, b| GaussianRational::new(
    &a.re * &b.re - &a.im * &b.im,
    &a.re * &b.im + &a.im * &b.re
));
binop!(Div, div, |a, b| {
    let inv = b.inv().expect("division by zero");
    a * &inv
});

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(s: &str) -> GaussianRational {
        GaussianRational::parse(s).unwrap()
    }

    #[test]
    fn parses_every_grammar_form() {
        assert_eq!(gr("3"), GaussianRational::from_int(3));
        assert_eq!(gr("-1/2"), GaussianRational::from_ratio(-1, 2));
        assert_eq!(gr("3+1/2i"), GaussianRational::from_parts(3, 1, 1, 2));
        assert_eq!(gr("2-3i"), GaussianRational::from_parts(2, 1, -3, 1));
        assert_eq!(gr("5i"), GaussianRational::from_parts(0, 1, 5, 1));
        assert_eq!(gr("-2/3i"), GaussianRational::from_parts(0, 1, -2, 3));
        // Negative denominators normalize.
        assert_eq!(gr("1/-2"), GaussianRational::from_ratio(-1, 2));
        // The separator sign composes with an explicitly signed imaginary part.
        assert_eq!(gr("1+-3i"), GaussianRational::from_parts(1, 1, -3, 1));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", " 1", "1 ", "1/", "i", "1+", "1+i", "1/0", "1.5", "1+2", "--1"] {
            assert!(GaussianRational::parse(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn display_is_canonical() {
        for (input, want) in [
            ("3", "3"),
            ("-1/2", "-1/2"),
            ("3+1/2i", "3+1/2i"),
            ("2-3i", "2-3i"),
            ("5i", "5i"),
            ("0", "0"),
            ("2/4", "1/2"),
            ("1/-2", "-1/2"),
            ("0+1i", "1i"),
            ("1+-3i", "1-3i"),
        ] {
            assert_eq!(gr(input).to_string(), want);
        }
    }

    #[test]
    fn field_arithmetic() {
        let a = gr("1/2+3i");
        let b = gr("-2+1/3i");
        assert_eq!(&a + &b, gr("-3/2+10/3i"));
        assert_eq!(&a - &b, gr("5/2+8/3i"));
        assert_eq!(&a * &b, gr("-2-35/6i"));
        let inv = b.inv().unwrap();
        assert_eq!(&b * &inv, GaussianRational::one());
        assert!(GaussianRational::zero().inv().is_none());
        assert_eq!(gr("2i") * gr("2i"), gr("-4"));
    }

    #[test]
    fn conjugation_is_an_involution_and_ring_map() {
        let a = gr("1/2+3i");
        let b = gr("-2+1/3i");
        assert_eq!(a.conj().conj(), a);
        assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
    }
}
