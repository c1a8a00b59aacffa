//! Coefficient domains: Z, Q and F_p.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Either `p = 0` in the ring (F_p) or every prime is a non-zero-divisor (Z, Q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ring {
    Integers,
    Rationals,
    PrimeField(u64),
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

impl Ring {
    pub fn prime_field(p: u64) -> Result<Ring> {
        if is_prime(p) && p < (1 << 31) {
            Ok(Ring::PrimeField(p))
        } else {
            Err(Error::Ring(format!("F_{p}: {p} is not a (small) prime")))
        }
    }

    /// `Z`, `Q`, `F3`, `F_3` (case-insensitive).
    pub fn parse(s: &str) -> Result<Ring> {
        let t = s.trim().to_ascii_uppercase();
        match t.as_str() {
            "Z" => Ok(Ring::Integers),
            "Q" => Ok(Ring::Rationals),
            _ => {
                let digits = t.strip_prefix('F').map(|r| r.trim_start_matches('_'));
                match digits.and_then(|d| d.parse::<u64>().ok()) {
                    Some(p) => Ring::prime_field(p),
                    None => Err(Error::Ring(format!("cannot parse ring {s:?}"))),
                }
            }
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Ring::PrimeField(p) => p,
            _ => 0,
        }
    }

    pub fn is_field(self) -> bool {
        !matches!(self, Ring::Integers)
    }

    /// Is the prime `p` zero in this ring?
    pub fn kills(self, p: u64) -> bool {
        self == Ring::PrimeField(p)
    }

    /// Is `p` a unit?
    pub fn inverts(self, p: u64) -> bool {
        match self {
            Ring::Integers => false,
            Ring::Rationals => true,
            Ring::PrimeField(q) => p % q != 0,
        }
    }

    pub fn erases_signs(self) -> bool {
        self == Ring::PrimeField(2)
    }

    /// Canonical representative of an integer.
    pub fn reduce(self, x: i64) -> i64 {
        match self {
            Ring::PrimeField(p) => x.rem_euclid(p as i64),
            _ => x,
        }
    }

    pub fn reduce128(self, x: i128) -> i128 {
        match self {
            Ring::PrimeField(p) => x.rem_euclid(p as i128),
            _ => x,
        }
    }

    /// Units of the ring that are integers, for "equal up to a unit" checks.
    pub fn integer_units(self) -> Vec<i64> {
        match self {
            Ring::Integers => vec![1, -1],
            Ring::PrimeField(p) => (1..p as i64).collect(),
            // Q: a rational comparison is done separately.
            Ring::Rationals => vec![1, -1],
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Rationals => write!(f, "Q"),
            Ring::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

pub(crate) fn inv_mod(a: i128, p: i128) -> i128 {
    // Fermat is fine for word-sized primes but extended Euclid avoids the power loop.
    let (mut r0, mut r1) = (a.rem_euclid(p), p);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1, "{a} not invertible mod {p}");
    s0.rem_euclid(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rings() {
        assert_eq!(Ring::parse("Z").unwrap(), Ring::Integers);
        assert_eq!(Ring::parse("q").unwrap(), Ring::Rationals);
        assert_eq!(Ring::parse("F3").unwrap(), Ring::PrimeField(3));
        assert_eq!(Ring::parse("F_5").unwrap(), Ring::PrimeField(5));
        assert!(Ring::parse("F4").is_err());
        assert!(Ring::parse("R").is_err());
    }

    #[test]
    fn inverses() {
        for p in [2i128, 3, 5, 7, 101] {
            for a in 1..p {
                assert_eq!((a * inv_mod(a, p)) % p, 1);
            }
        }
    }
}
