//! Exact coefficient rings: `F2`, arbitrary-precision integers, rationals.
//!
//! All scalar arithmetic in the crate is exact; there is no floating point
//! anywhere. Integers are arbitrary precision because Smith normal form on
//! cube matrices produces large intermediate entries.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// The three supported coefficient rings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingKind {
    F2,
    Integers,
    Rationals,
}

impl fmt::Display for RingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingKind::F2 => write!(f, "F2"),
            RingKind::Integers => write!(f, "Z"),
            RingKind::Rationals => write!(f, "Q"),
        }
    }
}

impl FromStr for RingKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "f2" | "gf2" | "z2" | "z/2" => Ok(RingKind::F2),
            "z" | "int" | "integers" => Ok(RingKind::Integers),
            "q" | "rat" | "rationals" => Ok(RingKind::Rationals),
            other => Err(format!("unknown ring {other:?}, expected one of: f2, z, q")),
        }
    }
}

/// An exact scalar. Values are immutable and freely shared between workers.
pub trait Coeff: Clone + PartialEq + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn kind() -> RingKind;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn is_unit(&self) -> bool;
    /// Multiplicative inverse; `None` signals inversion of a non-unit,
    /// which is a caller bug.
    fn inv(&self) -> Option<Self>;
    fn from_int(n: i64) -> Self;
    /// Parse the textual scalar form. Inverse of `Display`.
    fn parse(text: &str) -> Result<Self, String>;
}

/// Marker for rings where every nonzero element is invertible.
pub trait FieldCoeff: Coeff {}

/// The field with two elements, written `0` / `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2(pub bool);

impl fmt::Display for F2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.0 { "1" } else { "0" })
    }
}

impl Coeff for F2 {
    fn kind() -> RingKind {
        RingKind::F2
    }

    fn zero() -> Self {
        F2(false)
    }

    fn one() -> Self {
        F2(true)
    }

    fn is_zero(&self) -> bool {
        !self.0
    }

    fn add(&self, rhs: &Self) -> Self {
        F2(self.0 ^ rhs.0)
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }

    fn neg(&self) -> Self {
        *self
    }

    fn mul(&self, rhs: &Self) -> Self {
        F2(self.0 & rhs.0)
    }

    fn is_unit(&self) -> bool {
        self.0
    }

    fn inv(&self) -> Option<Self> {
        self.0.then_some(*self)
    }

    fn from_int(n: i64) -> Self {
        F2(n.rem_euclid(2) == 1)
    }

    fn parse(text: &str) -> Result<Self, String> {
        match text.trim() {
            "0" => Ok(F2(false)),
            "1" => Ok(F2(true)),
            other => Err(format!("expected 0 or 1 in F2, got {other:?}")),
        }
    }
}

impl FieldCoeff for F2 {}

impl Coeff for BigInt {
    fn kind() -> RingKind {
        RingKind::Integers
    }

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn is_unit(&self) -> bool {
        self.magnitude() == &One::one()
    }

    fn inv(&self) -> Option<Self> {
        self.is_unit().then(|| self.clone())
    }

    fn from_int(n: i64) -> Self {
        BigInt::from(n)
    }

    fn parse(text: &str) -> Result<Self, String> {
        BigInt::from_str(text.trim()).map_err(|e| format!("bad integer {text:?}: {e}"))
    }
}

impl Coeff for BigRational {
    fn kind() -> RingKind {
        RingKind::Rationals
    }

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn is_unit(&self) -> bool {
        !Zero::is_zero(self)
    }

    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((p, q)) => (p, q),
            None => (text, "1"),
        };
        let p = BigInt::from_str(num.trim()).map_err(|e| format!("bad rational {text:?}: {e}"))?;
        let q = BigInt::from_str(den.trim()).map_err(|e| format!("bad rational {text:?}: {e}"))?;
        if Zero::is_zero(&q) {
            return Err(format!("bad rational {text:?}: zero denominator"));
        }
        Ok(BigRational::new(p, q))
    }
}

impl FieldCoeff for BigRational {}

/// The deformation parameter. Any ring element is admissible, including 0 and 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lambda<C: Coeff>(pub C);

impl<C: Coeff> Lambda<C> {
    pub fn zero() -> Self {
        Lambda(C::zero())
    }

    pub fn one() -> Self {
        Lambda(C::one())
    }

    pub fn from_int(n: i64) -> Self {
        Lambda(C::from_int(n))
    }

    pub fn value(&self) -> &C {
        &self.0
    }
}

/// Parse a scalar of the given kind into its textual canonical form,
/// reporting the canonical rendering. Used by the CLI to validate `--lambda`.
pub fn canonicalize_scalar(kind: RingKind, text: &str) -> Result<String, String> {
    match kind {
        RingKind::F2 => F2::parse(text).map(|c| c.to_string()),
        RingKind::Integers => <BigInt as Coeff>::parse(text).map(|c| c.to_string()),
        RingKind::Rationals => <BigRational as Coeff>::parse(text).map(|c| c.to_string()),
    }
}
