//! Arithmetic over prime fields GF(p).
//!
//! [`FieldElem`] carries its modulus so that mixing elements of different
//! fields is caught at runtime. Hot loops (plane construction) use
//! [`Field`], which holds the modulus once and works on raw residues.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("no primes below 2 (asked for n = {0})")]
    TooSmall(u64),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A prime modulus, validated by trial division.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(value: u32) -> Result<Self, GfError> {
        if is_prime(value as u64) {
            Ok(Prime(value))
        } else {
            Err(GfError::NotPrime(value as u64))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for Prime {
    type Error = GfError;
    fn try_from(value: u32) -> Result<Self, Self::Error> {
        Prime::new(value)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Smallest prime `p >= n`.
pub fn smallest_prime_at_least(n: u64) -> Result<Prime, GfError> {
    if n < 2 {
        return Err(GfError::TooSmall(n));
    }
    let mut candidate = n;
    while !is_prime(candidate) {
        candidate += 1;
    }
    u32::try_from(candidate)
        .map_err(|_| GfError::NotPrime(candidate))
        .and_then(Prime::new)
}

/// An element of GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem {
    residue: u32,
    modulus: Prime,
}

// Fallible on mismatched moduli, so these stay inherent methods.
#[allow(clippy::should_implement_trait)]
impl FieldElem {
    /// Reduces `value` modulo `modulus`.
    pub fn new(value: i64, modulus: Prime) -> Self {
        let m = modulus.get() as i64;
        FieldElem {
            residue: value.rem_euclid(m) as u32,
            modulus,
        }
    }

    pub fn zero(modulus: Prime) -> Self {
        FieldElem {
            residue: 0,
            modulus,
        }
    }

    pub fn one(modulus: Prime) -> Self {
        FieldElem {
            residue: 1 % modulus.get(),
            modulus,
        }
    }

    pub fn residue(self) -> u32 {
        self.residue
    }

    pub fn modulus(self) -> Prime {
        self.modulus
    }

    fn check(self, other: FieldElem) -> Result<Field, GfError> {
        if self.modulus != other.modulus {
            return Err(GfError::ModulusMismatch(
                self.modulus.get(),
                other.modulus.get(),
            ));
        }
        Ok(Field::new(self.modulus))
    }

    pub fn add(self, other: FieldElem) -> Result<FieldElem, GfError> {
        let f = self.check(other)?;
        Ok(f.elem(f.add(self.residue, other.residue)))
    }

    pub fn sub(self, other: FieldElem) -> Result<FieldElem, GfError> {
        let f = self.check(other)?;
        Ok(f.elem(f.sub(self.residue, other.residue)))
    }

    pub fn mul(self, other: FieldElem) -> Result<FieldElem, GfError> {
        let f = self.check(other)?;
        Ok(f.elem(f.mul(self.residue, other.residue)))
    }

    pub fn neg(self) -> FieldElem {
        let f = Field::new(self.modulus);
        f.elem(f.neg(self.residue))
    }

    pub fn inv(self) -> Result<FieldElem, GfError> {
        let f = Field::new(self.modulus);
        Ok(f.elem(f.inv(self.residue)?))
    }

    pub fn div(self, other: FieldElem) -> Result<FieldElem, GfError> {
        self.check(other)?;
        self.mul(other.inv()?)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.residue, self.modulus)
    }
}

/// Field context: modulus stored once, operations on raw residues in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    p: u32,
}

impl Field {
    pub fn new(p: Prime) -> Self {
        Field { p: p.get() }
    }

    pub fn order(self) -> u32 {
        self.p
    }

    pub fn prime(self) -> Prime {
        Prime(self.p)
    }

    pub fn elem(self, residue: u32) -> FieldElem {
        debug_assert!(residue < self.p);
        FieldElem {
            residue,
            modulus: Prime(self.p),
        }
    }

    #[inline]
    pub fn reduce(self, value: i64) -> u32 {
        value.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self, a: u32) -> Result<u32, GfError> {
        if a.is_multiple_of(self.p) {
            return Err(GfError::DivisionByZero(self.p));
        }
        Ok(self.pow(a, self.p as u64 - 2))
    }

    pub fn div(self, a: u32, b: u32) -> Result<u32, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}
