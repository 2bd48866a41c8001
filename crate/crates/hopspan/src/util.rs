//! Seed derivation, exact fractions, and fingerprints.

use crate::error::{Error, Result};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fmt;

/// splitmix64 mixing step.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for sub-stage `index` of a pipeline. Index 0 keeps the base seed so
/// that a single-stage pipeline is bit-identical to its building block.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    if index == 0 {
        base
    } else {
        splitmix64(base ^ splitmix64(index))
    }
}

/// Seed for an independent child stream (recursion nodes, repetitions,
/// experiment runs). Always mixes, so parents and children never share a
/// stream.
pub fn child_seed(base: u64, salt: u64) -> u64 {
    splitmix64(base.wrapping_add(splitmix64(salt.wrapping_add(1))))
}

/// Exact nonnegative fraction. Used wherever rational parameters or
/// granularities must round-trip through files without drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frac {
    pub num: u64,
    pub den: u64,
}

impl Frac {
    pub fn new(num: u64, den: u64) -> Frac {
        assert!(den != 0, "fraction with zero denominator");
        let g = gcd(num.max(1), den);
        Frac {
            num: num / g,
            den: den / g,
        }
    }

    pub fn integer(n: u64) -> Frac {
        Frac { num: n, den: 1 }
    }

    pub fn ratio(self) -> Ratio<u128> {
        Ratio::new(self.num as u128, self.den as u128)
    }

    pub fn from_ratio(r: Ratio<u128>) -> Result<Frac> {
        let (n, d) = (*r.numer(), *r.denom());
        if n > u64::MAX as u128 || d > u64::MAX as u128 {
            return Err(Error::Overflow("fraction"));
        }
        Ok(Frac::new(n as u64, d as u64))
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Parse "3", "3/4" or "0.75".
    pub fn parse(s: &str) -> Result<Frac> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid fraction: {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let num: u64 = a.trim().parse().map_err(|_| bad())?;
            let den: u64 = b.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Ok(Frac::new(num, den))
        } else if let Some((a, b)) = s.split_once('.') {
            let int: u64 = if a.is_empty() {
                0
            } else {
                a.parse().map_err(|_| bad())?
            };
            if b.is_empty() || b.len() > 18 || !b.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let frac: u64 = b.parse().map_err(|_| bad())?;
            let den = 10u64
                .checked_pow(b.len() as u32)
                .ok_or(Error::Overflow("fraction denominator"))?;
            let num = int
                .checked_mul(den)
                .and_then(|x| x.checked_add(frac))
                .ok_or(Error::Overflow("fraction numerator"))?;
            Ok(Frac::new(num, den))
        } else {
            let num: u64 = s.parse().map_err(|_| bad())?;
            Ok(Frac::integer(num))
        }
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

pub fn lcm(a: u64, b: u64) -> Result<u64> {
    (a / gcd(a, b))
        .checked_mul(b)
        .ok_or(Error::Overflow("lcm"))
}

/// FNV-1a over a word stream; identifies a graph in serialized artifacts.
pub fn fnv1a64(words: impl IntoIterator<Item = u64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in words {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}
