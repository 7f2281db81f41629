//! Integral weights in the basis of fundamental weights.

use std::fmt;
use std::ops::{Add, Deref, Neg, Sub};

use arrayvec::ArrayVec;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest total rank a weight can carry.
pub const MAX_RANK: usize = 16;

/// Coefficients on the fundamental weights, stored inline.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(ArrayVec<i32, MAX_RANK>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        assert!(rank <= MAX_RANK, "rank {rank} exceeds {MAX_RANK}");
        let mut v = ArrayVec::new();
        for _ in 0..rank {
            v.push(0);
        }
        Weight(v)
    }

    pub fn from_slice(coeffs: &[i32]) -> Result<Self> {
        if coeffs.len() > MAX_RANK {
            return Err(Error::WeightLength { got: coeffs.len(), expected: MAX_RANK });
        }
        Ok(Weight(coeffs.iter().copied().collect()))
    }

    /// The fundamental weight with a single 1 at `node` (0-based).
    pub fn fundamental(rank: usize, node: usize) -> Self {
        let mut w = Weight::zero(rank);
        w.0[node] = 1;
        w
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn as_mut_slice(&mut self) -> &mut [i32] {
        self.0.as_mut_slice()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scaled(&self, k: i32) -> Self {
        Weight(self.0.iter().map(|&c| c * k).collect())
    }

    /// `self + k * other`, in place.
    pub fn add_scaled(&mut self, other: &Weight, k: i32) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += k * b;
        }
    }

    /// Parses a comma-separated list such as `0,1,-2`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(s);
        if s.trim().is_empty() {
            return Ok(Weight::default());
        }
        let mut v = ArrayVec::new();
        for part in s.split(',') {
            let c: i32 = part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad weight coefficient {:?}", part.trim())))?;
            v.try_push(c)
                .map_err(|_| Error::Parse(format!("weight longer than {MAX_RANK}")))?;
        }
        Ok(Weight(v))
    }
}

impl Deref for Weight {
    type Target = [i32];
    fn deref(&self) -> &[i32] {
        &self.0
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        debug_assert_eq!(self.rank(), rhs.rank());
        Weight(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        debug_assert_eq!(self.rank(), rhs.rank());
        Weight(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i32>::deserialize(d)?;
        Weight::from_slice(&v).map_err(serde::de::Error::custom)
    }
}

/// Renders a weight as a sum of fundamental weights, e.g. `L1+2L3`.
pub fn fundamental_notation(w: &Weight) -> String {
    let mut out = String::new();
    for (i, &c) in w.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if c < 0 {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        if c.abs() != 1 {
            out.push_str(&c.abs().to_string());
        }
        out.push('L');
        out.push_str(&(i + 1).to_string());
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let w = Weight::parse("0, 1,-2").unwrap();
        assert_eq!(&*w, &[0, 1, -2]);
        assert_eq!(Weight::parse(&w.to_string()).unwrap(), w);
        assert!(Weight::parse("1,x").is_err());
        assert_eq!(Weight::parse("").unwrap().rank(), 0);
    }

    #[test]
    fn notation() {
        let w = Weight::from_slice(&[1, 0, -2, 3]).unwrap();
        assert_eq!(fundamental_notation(&w), "L1-2L3+3L4");
        assert_eq!(fundamental_notation(&Weight::zero(3)), "0");
    }
}
