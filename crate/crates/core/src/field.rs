//! Scalar backends: arbitrary-precision rationals, prime fields GF(p) and
//! IEEE doubles.
//!
//! Every [`Scalar`] carries its [`Field`]. Exact kinds keep a canonical
//! representation (reduced fraction with positive denominator, residue in
//! `[0, p)`), so structural equality is value equality. The float backend
//! exists for timing runs of the engine only; verification refuses it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest accepted modulus. Primality is checked by trial division.
pub const MAX_MODULUS: u64 = u32::MAX as u64;

/// A prime modulus, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidModulus(p, "modulus must be at least 2"));
        }
        if p > MAX_MODULUS {
            return Err(Error::InvalidModulus(p, "modulus exceeds 2^32 - 1"));
        }
        if !is_prime(p) {
            return Err(Error::InvalidModulus(p, "modulus is not prime"));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Field descriptor. Textual form: `rational`, `gf(p)`, `float64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    Prime(Prime),
    Float64,
}

impl Field {
    pub fn gf(p: u64) -> Result<Self> {
        Prime::new(p).map(Field::Prime)
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, Field::Float64)
    }

    pub fn modulus(self) -> Option<u64> {
        match self {
            Field::Prime(p) => Some(p.get()),
            _ => None,
        }
    }

    /// Fails with [`Error::FloatDescriptor`] for the float backend.
    pub fn require_exact(self) -> Result<()> {
        if self.is_exact() {
            Ok(())
        } else {
            Err(Error::FloatDescriptor)
        }
    }

    /// All elements of a prime field in residue order.
    pub fn elements(self) -> Result<impl Iterator<Item = Scalar>> {
        let p = self.modulus().ok_or(Error::NotPrimeField(self))?;
        Ok((0..p).map(move |r| Scalar {
            field: self,
            repr: Repr::Residue(r),
        }))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("rational"),
            Field::Prime(p) => write!(f, "gf({})", p.get()),
            Field::Float64 => f.write_str("float64"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Field::Rational),
            "float64" => Ok(Field::Float64),
            _ => {
                let inner = s
                    .strip_prefix("gf(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                    .ok_or_else(|| Error::UnknownField(s.to_string()))?;
                let p = inner
                    .parse::<u64>()
                    .map_err(|_| Error::UnknownField(s.to_string()))?;
                Field::gf(p)
            }
        }
    }
}

// Rationals that fit in i64 stay inline; `Big` only holds values that do not,
// so each rational has exactly one representation.
#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Small(i64, i64),
    Big(Box<BigRational>),
    Residue(u64),
    Float(f64),
}

/// An element of a [`Field`].
///
/// Arithmetic operators panic when the operands belong to different fields;
/// the `checked_*` methods return [`Error::DescriptorMismatch`] instead.
/// Containers in this crate enforce a single field per value, so internal
/// arithmetic goes through the operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Scalar {
    field: Field,
    repr: Repr,
}

impl Scalar {
    pub fn zero(field: Field) -> Self {
        Self::from_i64(field, 0)
    }

    pub fn one(field: Field) -> Self {
        Self::from_i64(field, 1)
    }

    pub fn from_i64(field: Field, v: i64) -> Self {
        let repr = match field {
            Field::Rational => Repr::Small(v, 1),
            Field::Prime(p) => Repr::Residue(v.rem_euclid(p.get() as i64) as u64),
            Field::Float64 => Repr::Float(v as f64),
        };
        Scalar { field, repr }
    }

    /// `num / den` in `field`.
    pub fn from_ratio(field: Field, num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        match field {
            Field::Rational => Ok(Scalar {
                field,
                repr: small_ratio(num as i128, den as i128),
            }),
            _ => {
                let d = Self::from_i64(field, den);
                Self::from_i64(field, num).checked_div(&d)
            }
        }
    }

    pub fn from_rational(q: BigRational) -> Self {
        Scalar {
            field: Field::Rational,
            repr: big_ratio(q),
        }
    }

    pub fn from_f64(v: f64) -> Self {
        Scalar {
            field: Field::Float64,
            repr: Repr::Float(v),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Small(n, _) => *n == 0,
            Repr::Big(_) => false,
            Repr::Residue(r) => *r == 0,
            Repr::Float(x) => *x == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Small(n, d) => *n == 1 && *d == 1,
            Repr::Big(_) => false,
            Repr::Residue(r) => *r == 1,
            Repr::Float(x) => *x == 1.0,
        }
    }

    /// True for `-1`.
    pub fn is_minus_one(&self) -> bool {
        match &self.repr {
            Repr::Small(n, d) => *n == -1 && *d == 1,
            Repr::Big(_) => false,
            Repr::Residue(r) => Some(*r + 1) == self.field.modulus(),
            Repr::Float(x) => *x == -1.0,
        }
    }

    pub fn residue(&self) -> Option<u64> {
        match self.repr {
            Repr::Residue(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match &self.repr {
            Repr::Small(n, d) => Some(BigRational::new_raw(BigInt::from(*n), BigInt::from(*d))),
            Repr::Big(q) => Some((**q).clone()),
            _ => None,
        }
    }

    /// Numeric value as a double; residues map to their representative in `[0, p)`.
    pub fn to_f64(&self) -> f64 {
        match &self.repr {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(q) => {
                let n = q.numer().to_f64().unwrap_or(f64::NAN);
                let d = q.denom().to_f64().unwrap_or(f64::NAN);
                n / d
            }
            Repr::Residue(r) => *r as f64,
            Repr::Float(x) => *x,
        }
    }

    fn same_field(&self, other: &Scalar) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch(self.field, other.field))
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(&other.inv()?))
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let repr = match &self.repr {
            Repr::Small(n, d) => small_ratio(*d as i128, *n as i128),
            Repr::Big(q) => big_ratio(q.recip()),
            Repr::Residue(r) => Repr::Residue(inv_mod(*r, self.field.modulus().unwrap())),
            Repr::Float(x) => Repr::Float(1.0 / x),
        };
        Ok(Scalar {
            field: self.field,
            repr,
        })
    }

    /// Integer power (negative exponents invert).
    pub fn pow(&self, e: i64) -> Result<Scalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Scalar::one(self.field);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Ok(acc)
    }

    fn add_unchecked(&self, other: &Scalar) -> Scalar {
        let repr = match (&self.repr, &other.repr) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    small_ratio(*a as i128 + *c as i128, 1)
                } else {
                    small_ratio(*a as i128 * *d as i128 + *c as i128 * *b as i128, *b as i128 * *d as i128)
                }
            }
            (a, b) if a.is_rational() => big_ratio(a.to_big() + b.to_big()),
            (Repr::Residue(a), Repr::Residue(b)) => {
                let p = self.field.modulus().unwrap();
                Repr::Residue((a + b) % p)
            }
            (Repr::Float(a), Repr::Float(b)) => Repr::Float(a + b),
            _ => unreachable!("representation does not match field"),
        };
        Scalar {
            field: self.field,
            repr,
        }
    }

    fn sub_unchecked(&self, other: &Scalar) -> Scalar {
        let repr = match (&self.repr, &other.repr) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    small_ratio(*a as i128 - *c as i128, 1)
                } else {
                    small_ratio(*a as i128 * *d as i128 - *c as i128 * *b as i128, *b as i128 * *d as i128)
                }
            }
            (a, b) if a.is_rational() => big_ratio(a.to_big() - b.to_big()),
            (Repr::Residue(a), Repr::Residue(b)) => {
                let p = self.field.modulus().unwrap();
                Repr::Residue((a + p - b) % p)
            }
            (Repr::Float(a), Repr::Float(b)) => Repr::Float(a - b),
            _ => unreachable!("representation does not match field"),
        };
        Scalar {
            field: self.field,
            repr,
        }
    }

    fn mul_unchecked(&self, other: &Scalar) -> Scalar {
        let repr = match (&self.repr, &other.repr) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                small_ratio(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            (a, b) if a.is_rational() => big_ratio(a.to_big() * b.to_big()),
            (Repr::Residue(a), Repr::Residue(b)) => {
                let p = self.field.modulus().unwrap();
                Repr::Residue(a * b % p)
            }
            (Repr::Float(a), Repr::Float(b)) => Repr::Float(a * b),
            _ => unreachable!("representation does not match field"),
        };
        Scalar {
            field: self.field,
            repr,
        }
    }

    /// Parses the canonical textual form used in decomposition and matrix
    /// files. Rationals must be reduced with a positive denominator
    /// (`"3"` or `"3/1"`, `"-1/2"`); residues are plain decimals in `[0, p)`.
    pub fn parse(field: Field, text: &str) -> Result<Scalar> {
        let bad = |reason: &'static str| Error::BadScalar {
            text: text.to_string(),
            field,
            reason,
        };
        match field {
            Field::Rational => {
                let (num, den) = match text.split_once('/') {
                    Some((n, d)) => (n, Some(d)),
                    None => (text, None),
                };
                let num = parse_int(num).ok_or_else(|| bad("not an integer or fraction"))?;
                let q = match den {
                    None => BigRational::from_integer(num),
                    Some(d) => {
                        if d.starts_with(['-', '+']) {
                            return Err(bad("denominator must be positive"));
                        }
                        let den = parse_int(d).ok_or_else(|| bad("bad denominator"))?;
                        if den.is_zero() {
                            return Err(bad("zero denominator"));
                        }
                        if !num.gcd(&den).is_one() {
                            return Err(bad("fraction is not reduced"));
                        }
                        BigRational::new_raw(num, den)
                    }
                };
                Ok(Scalar::from_rational(q))
            }
            Field::Prime(p) => {
                if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad("residue must be a decimal integer"));
                }
                let r: u64 = text.parse().map_err(|_| bad("residue out of range"))?;
                if r >= p.get() {
                    return Err(bad("residue out of range"));
                }
                Ok(Scalar {
                    field,
                    repr: Repr::Residue(r),
                })
            }
            Field::Float64 => text
                .parse::<f64>()
                .map(Scalar::from_f64)
                .map_err(|_| bad("not a floating-point number")),
        }
    }
}

impl Repr {
    fn is_rational(&self) -> bool {
        matches!(self, Repr::Small(..) | Repr::Big(_))
    }

    fn to_big(&self) -> BigRational {
        match self {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(q) => (**q).clone(),
            _ => unreachable!("not a rational"),
        }
    }
}

/// Canonical repr of `n / d`, `d != 0`.
fn small_ratio(n: i128, d: i128) -> Repr {
    let g = n.gcd(&d);
    let (mut n, mut d) = (n / g, d / g);
    if d < 0 {
        (n, d) = (-n, -d);
    }
    match (i64::try_from(n), i64::try_from(d)) {
        (Ok(n), Ok(d)) => Repr::Small(n, d),
        _ => Repr::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
    }
}

/// Canonical repr of an already reduced big rational.
fn big_ratio(q: BigRational) -> Repr {
    match (q.numer().to_i64(), q.denom().to_i64()) {
        (Some(n), Some(d)) => Repr::Small(n, d),
        _ => Repr::Big(Box::new(q)),
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(p as i128) as u64
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Repr::Residue(r) => write!(f, "{r}"),
            Repr::Float(x) => write!(f, "{x}"),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                assert_eq!(self.field, rhs.field, "scalar field mismatch");
                self.$imp(rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, add_unchecked);
binop!(Sub, sub, sub_unchecked);
binop!(Mul, mul, mul_unchecked);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        let repr = match &self.repr {
            Repr::Small(n, d) => small_ratio(-(*n as i128), *d as i128),
            Repr::Big(q) => big_ratio(-(**q).clone()),
            Repr::Residue(r) => {
                let p = self.field.modulus().unwrap();
                Repr::Residue((p - r) % p)
            }
            Repr::Float(x) => Repr::Float(-x),
        };
        Scalar {
            field: self.field,
            repr,
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Rational helper used by tests and the CLI: `p/q` with small integers.
pub fn rational(num: i64, den: i64) -> Scalar {
    Scalar::from_ratio(Field::Rational, num, den).expect("nonzero denominator")
}

/// True when `q` is negative; handy for pretty-printing.
pub fn is_negative(s: &Scalar) -> bool {
    match &s.repr {
        Repr::Small(n, _) => *n < 0,
        Repr::Big(q) => q.is_negative(),
        Repr::Float(x) => *x < 0.0,
        Repr::Residue(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Field {
        Field::gf(p).unwrap()
    }

    #[test]
    fn rational_sum() {
        assert_eq!(rational(1, 2) + rational(1, 3), rational(5, 6));
    }

    #[test]
    fn rationals_overflowing_i64_stay_exact() {
        let big = Scalar::from_i64(Field::Rational, i64::MAX);
        let sq = &big * &big;
        assert_eq!(sq.to_string(), "85070591730234615847396907784232501249");
        let back = &sq * &big.inv().unwrap();
        assert_eq!(back, big);
        assert_eq!(Scalar::parse(Field::Rational, &sq.to_string()).unwrap(), sq);
        let min = Scalar::from_i64(Field::Rational, i64::MIN);
        assert_eq!((-&min).to_string(), "9223372036854775808");
        assert_eq!(-(-&min), min);
        assert!((&sq - &sq).is_zero());
        assert_eq!(rational(-4, -6), rational(2, 3));
    }

    #[test]
    fn prime_field_examples() {
        let f7 = gf(7);
        let six = Scalar::from_i64(f7, 6);
        assert_eq!(&six * &six, Scalar::one(f7));
        let f3 = gf(3);
        assert!((Scalar::from_i64(f3, 2) + Scalar::one(f3)).is_zero());
    }

    #[test]
    fn inverses() {
        assert_eq!(rational(2, 3).inv().unwrap(), rational(3, 2));
        assert_eq!(Scalar::from_i64(gf(7), 3).inv().unwrap(), Scalar::from_i64(gf(7), 5));
        assert_eq!(Scalar::one(gf(2)).inv().unwrap(), Scalar::one(gf(2)));
        assert_eq!(Scalar::zero(gf(5)).inv(), Err(Error::DivisionByZero));
        assert_eq!(Scalar::zero(Field::Rational).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn exhaustive_inverses_small_primes() {
        for p in (2..=101).filter(|&p| is_prime(p)) {
            let f = gf(p);
            for a in f.elements().unwrap().skip(1) {
                assert!((&a * &a.inv().unwrap()).is_one(), "p={p} a={a}");
            }
        }
    }

    #[test]
    fn mismatch_is_reported() {
        let a = Scalar::one(gf(5));
        let b = Scalar::one(gf(7));
        assert_eq!(a.checked_add(&b), Err(Error::DescriptorMismatch(gf(5), gf(7))));
        assert!(a.checked_mul(&Scalar::one(Field::Rational)).is_err());
    }

    #[test]
    fn modulus_validation() {
        assert!(Field::gf(0).is_err());
        assert!(Field::gf(1).is_err());
        assert!(Field::gf(9).is_err());
        assert!(Field::gf(2).is_ok());
        assert!(Field::gf(101).is_ok());
    }

    #[test]
    fn descriptor_text() {
        for s in ["rational", "gf(7)", "float64", "gf(2)"] {
            assert_eq!(s.parse::<Field>().unwrap().to_string(), s);
        }
        for s in ["gf()", "gf(4)", "GF(7)", "gf(-7)", "real", "gf(7"] {
            assert!(s.parse::<Field>().is_err(), "{s}");
        }
    }

    #[test]
    fn scalar_text() {
        let q = Field::Rational;
        assert_eq!(Scalar::parse(q, "-1/2").unwrap(), rational(-1, 2));
        assert_eq!(Scalar::parse(q, "3").unwrap(), rational(3, 1));
        assert_eq!(Scalar::parse(q, "3/1").unwrap(), rational(3, 1));
        assert_eq!(rational(-4, 6).to_string(), "-2/3");
        assert_eq!(rational(6, 3).to_string(), "2");
        for bad in ["2/4", "1/-2", "1/0", "", "x", "1.5", "0/5", "+1", "1/+2"] {
            assert!(Scalar::parse(q, bad).is_err(), "{bad}");
        }
        let f7 = gf(7);
        assert_eq!(Scalar::parse(f7, "6").unwrap(), Scalar::from_i64(f7, 6));
        for bad in ["7", "-1", "", "1/2"] {
            assert!(Scalar::parse(f7, bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn ratio_in_prime_field() {
        let f7 = gf(7);
        let half = Scalar::from_ratio(f7, 1, 2).unwrap();
        assert_eq!(half, Scalar::from_i64(f7, 4));
        assert!(Scalar::from_ratio(f7, 1, 7).is_err());
    }

    #[test]
    fn minus_one_detection() {
        assert!(Scalar::from_i64(gf(5), -1).is_minus_one());
        assert!(rational(-1, 1).is_minus_one());
        assert!(!rational(1, 1).is_minus_one());
        assert!(Scalar::one(gf(2)).is_minus_one());
    }
}
