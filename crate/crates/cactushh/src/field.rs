//! Exact scalar arithmetic: the rationals and prime fields.
//!
//! Every computation in this crate is exact; there is no floating point
//! anywhere. A [`Field`] is a small context value (the rationals carry no
//! state, a prime field carries its modulus) whose element type does the
//! actual arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arithmetic context for an exact field.
pub trait Field: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + Eq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// Parse an exact scalar written as `p`, `-p` or `p/q`.
    fn parse(&self, s: &str) -> Result<Self::Elem, ScalarParseError>;
    fn render(&self, a: &Self::Elem) -> String;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }
    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
    /// `a / b`, assuming `b` is invertible.
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b).expect("division by zero"))
    }
    /// Name used in reports, e.g. `Q` or `F7`.
    fn name(&self) -> String;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarParseError(pub String);

impl fmt::Display for ScalarParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed scalar: {}", self.0)
    }
}

impl std::error::Error for ScalarParseError {}

/// The field of rational numbers with arbitrary-precision arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn parse(&self, s: &str) -> Result<BigRational, ScalarParseError> {
        let (num, den) = split_fraction(s)?;
        let den: BigInt = den.parse().map_err(|_| ScalarParseError(s.into()))?;
        let num: BigInt = num.parse().map_err(|_| ScalarParseError(s.into()))?;
        if den.is_zero() {
            return Err(ScalarParseError(s.into()));
        }
        Ok(BigRational::new(num, den))
    }
    fn render(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn name(&self) -> String {
        "Q".into()
    }
}

fn split_fraction(s: &str) -> Result<(&str, &str), ScalarParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ScalarParseError(s.into()));
    }
    match s.split_once('/') {
        Some((n, d)) => Ok((n.trim(), d.trim())),
        None => Ok((s, "1")),
    }
}

/// The prime field `F_p` for a runtime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Construct `F_p`, rejecting composite or degenerate moduli.
    pub fn new(p: u64) -> Result<Self, NotPrime> {
        if is_prime(p) {
            Ok(PrimeField { p })
        } else {
            Err(NotPrime(p))
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn reduce_bigint(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let mut r = n % &p;
        if r.is_negative() {
            r += &p;
        }
        let digits = r.to_u64_digits().1;
        digits.first().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotPrime(pub u64);

impl fmt::Display for NotPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} is not prime", self.0)
    }
}

impl std::error::Error for NotPrime {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        // moduli are small enough that u128 products never overflow
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // extended Euclid
        let (mut r0, mut r1) = (self.p as i128, *a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        let mut t = t0 % self.p as i128;
        if t < 0 {
            t += self.p as i128;
        }
        Some(t as u64)
    }
    fn from_i64(&self, n: i64) -> u64 {
        let r = n.rem_euclid(self.p as i64);
        r as u64
    }
    fn parse(&self, s: &str) -> Result<u64, ScalarParseError> {
        let (num, den) = split_fraction(s)?;
        let num: BigInt = num.parse().map_err(|_| ScalarParseError(s.into()))?;
        let den: BigInt = den.parse().map_err(|_| ScalarParseError(s.into()))?;
        let num = self.reduce_bigint(&num);
        let den = self.reduce_bigint(&den);
        let den_inv = self
            .inv(&den)
            .ok_or_else(|| ScalarParseError(format!("{s} has denominator divisible by {}", self.p)))?;
        Ok(self.mul(&num, &den_inv))
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
    fn name(&self) -> String {
        format!("F{}", self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing_roundtrips() {
        let q = Rationals;
        for s in ["0", "5", "-3", "2/3", "-7/4"] {
            let v = q.parse(s).unwrap();
            assert_eq!(q.render(&v), s);
        }
        assert!(q.parse("1/0").is_err());
        assert!(q.parse("").is_err());
        assert_eq!(q.parse(" 4/6 ").unwrap(), q.parse("2/3").unwrap());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f7.inv(&3).unwrap(), 5); // 3*5 = 15 = 1 mod 7
        assert_eq!(f7.parse("1/2").unwrap(), 4); // inverse of 2 mod 7
        assert_eq!(f7.parse("-1").unwrap(), 6);
        assert!(f7.parse("1/7").is_err());
        assert!(PrimeField::new(6).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(2).is_ok());
    }

    #[test]
    fn primality_check() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
    }
}
