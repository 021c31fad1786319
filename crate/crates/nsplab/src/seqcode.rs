//! Cantor-pairing codes for finite sequences of naturals.
//!
//! `code(⟨⟩) = 0` and `code(x⃗·z) = cantor(code(x⃗), z) + 1`, where
//! `cantor(a, b) = (a+b)(a+b+1)/2 + b`. Every natural codes exactly one
//! sequence.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn cantor(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    (&s * (&s + 1u32)) / 2u32 + b
}

pub fn uncantor(n: &BigUint) -> (BigUint, BigUint) {
    let w: BigUint = ((n * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let b = n - &t;
    let a = &w - &b;
    (a, b)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, serde::Serialize)]
pub struct SeqCode(BigUint);

impl SeqCode {
    pub fn empty() -> SeqCode {
        SeqCode(BigUint::zero())
    }

    pub fn from_code(code: BigUint) -> SeqCode {
        SeqCode(code)
    }

    pub fn from_slice(xs: &[BigUint]) -> SeqCode {
        xs.iter().fold(SeqCode::empty(), |s, x| s.add(x))
    }

    pub fn from_u64s(xs: &[u64]) -> SeqCode {
        xs.iter().fold(SeqCode::empty(), |s, &x| s.add(&BigUint::from(x)))
    }

    pub fn code(&self) -> &BigUint {
        &self.0
    }

    pub fn into_code(self) -> BigUint {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, z: &BigUint) -> SeqCode {
        SeqCode(cantor(&self.0, z) + 1u32)
    }

    pub fn add_u64(&self, z: u64) -> SeqCode {
        self.add(&BigUint::from(z))
    }

    /// Splits off the last entry.
    pub fn unsnoc(&self) -> Option<(SeqCode, BigUint)> {
        if self.0.is_zero() {
            return None;
        }
        let (a, b) = uncantor(&(&self.0 - 1u32));
        Some((SeqCode(a), b))
    }

    pub fn decode(&self) -> Vec<BigUint> {
        let mut out = Vec::new();
        let mut s = self.clone();
        while let Some((rest, z)) = s.unsnoc() {
            out.push(z);
            s = rest;
        }
        out.reverse();
        out
    }

    pub fn len(&self) -> usize {
        let mut n = 0;
        let mut s = self.clone();
        while let Some((rest, _)) = s.unsnoc() {
            n += 1;
            s = rest;
        }
        n
    }

    pub fn index(&self, i: usize) -> Option<BigUint> {
        self.decode().into_iter().nth(i)
    }

    /// `[x⃗ j^ω](i)`.
    pub fn basic(&self, j: &BigUint, i: &BigUint) -> BigUint {
        let xs = self.decode();
        match i.to_usize() {
            Some(i) if i < xs.len() => xs[i].clone(),
            _ => j.clone(),
        }
    }

    /// Proper and improper prefixes, shortest first.
    pub fn prefixes(&self) -> Vec<SeqCode> {
        let xs = self.decode();
        (0..=xs.len()).map(|k| SeqCode::from_slice(&xs[..k])).collect()
    }

    pub fn concat(&self, tail: &[BigUint]) -> SeqCode {
        tail.iter().fold(self.clone(), |s, z| s.add(z))
    }
}

/// The odd part of a positive number: `n = 2^t · θ(n)`.
pub fn odd_part(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    let t = n.trailing_zeros().unwrap_or(0);
    n >> t
}

impl fmt::Display for SeqCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xs: Vec<String> = self.decode().iter().map(|x| x.to_string()).collect();
        write!(f, "<{}>", xs.join(","))
    }
}

impl fmt::Debug for SeqCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}#{}", self.0)
    }
}

impl FromStr for SeqCode {
    type Err = Error;

    /// Accepts `<1,2,3>`, `1,2,3`, `<>` or the empty string.
    fn from_str(s: &str) -> Result<SeqCode> {
        let inner = s.trim().trim_start_matches('<').trim_end_matches('>').trim();
        if inner.is_empty() {
            return Ok(SeqCode::empty());
        }
        let xs = inner
            .split(',')
            .map(|p| p.trim().parse::<BigUint>().map_err(|_| Error::Usage(format!("bad sequence '{s}'"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(SeqCode::from_slice(&xs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn fixed_values() {
        assert_eq!(SeqCode::empty().add_u64(0).code(), &b(1));
        assert_eq!(SeqCode::from_u64s(&[1]).code(), &b(3));
        assert_eq!(SeqCode::from_u64s(&[5]).basic(&b(9), &b(0)), b(5));
        assert_eq!(SeqCode::from_u64s(&[5]).basic(&b(9), &b(1)), b(9));
        assert_eq!(SeqCode::from_u64s(&[5]).basic(&b(9), &b(7)), b(9));
        assert_eq!(SeqCode::empty().len(), 0);
    }

    #[test]
    fn odd_parts() {
        assert_eq!(odd_part(&b(12)), b(3));
        assert_eq!(odd_part(&b(7)), b(7));
        assert_eq!(odd_part(&b(1)), b(1));
    }

    #[test]
    fn parse_display() {
        let s: SeqCode = "<2,0,7>".parse().unwrap();
        assert_eq!(s.to_string(), "<2,0,7>");
        assert_eq!("".parse::<SeqCode>().unwrap(), SeqCode::empty());
    }
}
