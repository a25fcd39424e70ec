//! Exact scalar fields for the matrix semantics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An exact field. No floating point type implements this.
pub trait Scalar:
    Clone
    + PartialEq
    + Eq
    + std::hash::Hash
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_i64(value: i64) -> Self;

    /// `None` when the denominator vanishes in the field.
    fn from_ratio(num: i64, den: i64) -> Option<Self> {
        Self::from_i64(den)
            .checked_inv()
            .map(|inv| Self::from_i64(num) * inv)
    }

    /// Multiplicative inverse; `None` for zero.
    fn checked_inv(&self) -> Option<Self>;

    /// Short name used in reports.
    fn field_name() -> String;
}

impl Scalar for BigRational {
    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn from_ratio(num: i64, den: i64) -> Option<Self> {
        (den != 0).then(|| BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn checked_inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn field_name() -> String {
        "Q".to_string()
    }
}

/// Integers modulo the prime `P`. `P` must be prime and below 2^63.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(value: u64) -> Self {
        Fp(value % P)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {P})", self.0)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Fp(((self.0 as u128 + rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(((self.0 as u128 * rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        if self.0 == 0 {
            self
        } else {
            Fp(P - self.0)
        }
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp(1 % P)
    }
}

impl<const P: u64> Scalar for Fp<P> {
    fn from_i64(value: i64) -> Self {
        Fp(value.rem_euclid(P as i64) as u64)
    }

    fn checked_inv(&self) -> Option<Self> {
        (self.0 != 0).then(|| self.pow(P - 2))
    }

    fn field_name() -> String {
        format!("F_{P}")
    }
}

/// Primes available at runtime through [`Field`].
pub const SUPPORTED_PRIMES: [u64; 3] = [1_000_003, 998_244_353, 2_147_483_647];

/// Runtime choice of scalar field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    #[default]
    Rationals,
    PrimeField(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("unsupported prime {0}; available: 1000003, 998244353, 2147483647")]
    UnsupportedPrime(u64),
    #[error("unknown field {0:?}; expected q or p:PRIME")]
    Unknown(String),
}

/// Code generic over the scalar type, run through [`Field::visit`].
pub trait ScalarVisitor {
    type Output;
    fn visit<S: Scalar>(self) -> Self::Output;
}

impl Field {
    pub fn validate(self) -> Result<(), FieldError> {
        match self {
            Field::PrimeField(p) if !SUPPORTED_PRIMES.contains(&p) => {
                Err(FieldError::UnsupportedPrime(p))
            }
            _ => Ok(()),
        }
    }

    pub fn visit<V: ScalarVisitor>(self, visitor: V) -> Result<V::Output, FieldError> {
        Ok(match self {
            Field::Rationals => visitor.visit::<BigRational>(),
            Field::PrimeField(1_000_003) => visitor.visit::<Fp<1_000_003>>(),
            Field::PrimeField(998_244_353) => visitor.visit::<Fp<998_244_353>>(),
            Field::PrimeField(2_147_483_647) => visitor.visit::<Fp<2_147_483_647>>(),
            Field::PrimeField(p) => return Err(FieldError::UnsupportedPrime(p)),
        })
    }
}

impl FromStr for Field {
    type Err = FieldError;

    /// `q` or `p:PRIME`.
    fn from_str(s: &str) -> Result<Self, FieldError> {
        let field = match s.trim() {
            "q" | "Q" => Field::Rationals,
            other => match other.strip_prefix("p:").map(str::parse::<u64>) {
                Some(Ok(p)) => Field::PrimeField(p),
                _ => return Err(FieldError::Unknown(s.to_string())),
            },
        };
        field.validate()?;
        Ok(field)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => f.write_str("q"),
            Field::PrimeField(p) => write!(f, "p:{p}"),
        }
    }
}
