//! Exact field scalars: arbitrary-precision rationals or residues modulo a prime.
//!
//! A formula lives in exactly one [`Field`]. Arithmetic between scalars of
//! different fields is a programming error and panics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// 2^61 - 1, the default prime for modular arithmetic and identity testing.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// The field a formula's edge weights live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    /// Only the rationals carry an order, which the syntactic monotonicity
    /// check needs.
    pub fn is_ordered(self) -> bool {
        matches!(self, Field::Rational)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::Rational);
        }
        let p = s
            .strip_prefix("Fp:")
            .ok_or_else(|| format!("unknown field `{s}` (expected `Q` or `Fp:<prime>`)"))?;
        let p: u64 = p.parse().map_err(|_| format!("invalid prime `{p}`"))?;
        if !(2..(1 << 63)).contains(&p) || !is_prime(p) {
            return Err(format!("{p} is not a prime below 2^63"));
        }
        Ok(Field::Prime(p))
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime; `None` for zero.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

/// Reduce an arbitrary integer into `[0, p)`.
pub fn bigint_mod(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

/// An element of a [`Field`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rational(BigRational),
    Mod { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn zero(field: Field) -> Self {
        Scalar::from_i64(0, field)
    }

    pub fn one(field: Field) -> Self {
        Scalar::from_i64(1, field)
    }

    pub fn from_i64(n: i64, field: Field) -> Self {
        match field {
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Mod {
                value: bigint_mod(&BigInt::from(n), p),
                modulus: p,
            },
        }
    }

    /// Map a rational into `field`. Fails when the denominator vanishes mod p.
    pub fn from_rational(r: &BigRational, field: Field) -> Option<Self> {
        match field {
            Field::Rational => Some(Scalar::Rational(r.clone())),
            Field::Prime(p) => {
                let num = bigint_mod(r.numer(), p);
                let den = inv_mod(bigint_mod(r.denom(), p), p)?;
                Some(Scalar::Mod {
                    value: mul_mod(num, den, p),
                    modulus: p,
                })
            }
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Mod { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Mod { value, .. } => *value == 1,
        }
    }

    /// `Some(sign > 0)` over the rationals, `None` over a prime field.
    pub fn is_positive(&self) -> Option<bool> {
        match self {
            Scalar::Rational(r) => Some(r.is_positive()),
            Scalar::Mod { .. } => None,
        }
    }

    pub fn inverse(&self) -> Option<Scalar> {
        match self {
            Scalar::Rational(r) if r.is_zero() => None,
            Scalar::Rational(r) => Some(Scalar::Rational(r.recip())),
            Scalar::Mod { value, modulus } => inv_mod(*value, *modulus).map(|v| Scalar::Mod {
                value: v,
                modulus: *modulus,
            }),
        }
    }

    /// Residue of this scalar modulo `p`, used by identity testing.
    pub fn residue(&self, p: u64) -> Option<u64> {
        match self {
            Scalar::Rational(r) => {
                let num = bigint_mod(r.numer(), p);
                let den = inv_mod(bigint_mod(r.denom(), p), p)?;
                Some(mul_mod(num, den, p))
            }
            Scalar::Mod { value, modulus } if *modulus == p => Some(*value),
            Scalar::Mod { .. } => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Mod { .. } => None,
        }
    }

    fn check_same(&self, other: &Scalar) {
        assert_eq!(
            self.field(),
            other.field(),
            "scalar arithmetic across different fields"
        );
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;

    fn add(self, rhs: &Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Mod { value: a, modulus }, Scalar::Mod { value: b, .. }) => Scalar::Mod {
                value: add_mod(*a, *b, *modulus),
                modulus: *modulus,
            },
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Mod { value: a, modulus }, Scalar::Mod { value: b, .. }) => Scalar::Mod {
                value: mul_mod(*a, *b, *modulus),
                modulus: *modulus,
            },
            _ => unreachable!(),
        }
    }
}

/// Parse `p`, `-p` or `p/q` into a rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() || den.is_negative() {
        return None;
    }
    Some(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mersenne_is_prime() {
        assert!(is_prime(MERSENNE_61));
        assert!(!is_prime(MERSENNE_61 - 2));
        assert!(is_prime(101));
        assert!(!is_prime(1));
    }

    #[test]
    fn rational_display_lowest_terms() {
        let r = parse_rational("4/6").unwrap();
        assert_eq!(Scalar::Rational(r).to_string(), "2/3");
        let r = parse_rational("-8/4").unwrap();
        assert_eq!(Scalar::Rational(r).to_string(), "-2");
    }

    #[test]
    fn modular_inverse_and_rational_residue() {
        let f = Field::Prime(101);
        let half = Scalar::from_rational(&parse_rational("1/2").unwrap(), f).unwrap();
        let two = Scalar::from_i64(2, f);
        assert!((&half * &two).is_one());
        assert_eq!(Scalar::from_i64(-1, f), Scalar::Mod { value: 100, modulus: 101 });
        // denominator divisible by p has no image
        assert!(Scalar::from_rational(&parse_rational("1/101").unwrap(), f).is_none());
    }

    #[test]
    fn field_parsing() {
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Rational);
        assert_eq!(
            "Fp:2305843009213693951".parse::<Field>().unwrap(),
            Field::Prime(MERSENNE_61)
        );
        assert!("Fp:100".parse::<Field>().is_err());
        assert!("R".parse::<Field>().is_err());
    }

    #[test]
    #[should_panic(expected = "different fields")]
    fn mixing_fields_panics() {
        let _ = &Scalar::one(Field::Rational) + &Scalar::one(Field::Prime(7));
    }
}
