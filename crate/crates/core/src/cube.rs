//! Points of the Boolean cube `{-1,+1}^n`, bit-packed.
//!
//! Encoding: bit `j` set means coordinate `j` is `-1`. XOR of packed words is
//! therefore the componentwise product of the `±1` vectors.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CubePoint {
    n: usize,
    words: Vec<u64>,
}

impl CubePoint {
    /// The all-`+1` point.
    pub fn ones(n: usize) -> Self {
        CubePoint {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    /// Builds a point from a packed mask (`n <= 64`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64, "from_mask needs n <= 64");
        let mut p = CubePoint::ones(n);
        if n > 0 {
            let keep = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            p.words[0] = mask & keep;
        }
        p
    }

    /// Builds a point from `±1` signs. Any negative value maps to `-1`.
    pub fn from_signs(signs: &[i8]) -> Self {
        let mut p = CubePoint::ones(signs.len());
        for (j, &s) in signs.iter().enumerate() {
            if s < 0 {
                p.set_minus(j, true);
            }
        }
        p
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn is_minus(&self, j: usize) -> bool {
        debug_assert!(j < self.n);
        (self.words[j >> 6] >> (j & 63)) & 1 == 1
    }

    /// Coordinate `j` as `+1` or `-1`.
    #[inline]
    pub fn get(&self, j: usize) -> i8 {
        if self.is_minus(j) {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn set_minus(&mut self, j: usize, minus: bool) {
        let bit = 1u64 << (j & 63);
        if minus {
            self.words[j >> 6] |= bit;
        } else {
            self.words[j >> 6] &= !bit;
        }
    }

    /// Componentwise product with `other`.
    pub fn xor_assign(&mut self, other: &CubePoint) {
        assert_eq!(self.n, other.n, "xor of points with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Packed mask for `n <= 64`.
    pub fn mask(&self) -> u64 {
        assert!(self.n <= 64, "mask needs n <= 64");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn signs(&self) -> impl Iterator<Item = i8> + '_ {
        (0..self.n).map(|j| self.get(j))
    }

    /// Product of coordinates indexed by `subset`.
    pub fn parity(&self, subset: &[usize]) -> i8 {
        let odd = subset.iter().filter(|&&j| self.is_minus(j)).count() % 2 == 1;
        if odd {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for CubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n {
            f.write_str(if self.is_minus(j) { "-" } else { "+" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for CubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CubePoint({self})")
    }
}

impl Serialize for CubePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CubePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let mut p = CubePoint::ones(text.len());
        for (j, c) in text.chars().enumerate() {
            match c {
                '+' => {}
                '-' => p.set_minus(j, true),
                other => {
                    return Err(serde::de::Error::custom(format!(
                        "unexpected character {other:?} in cube point"
                    )))
                }
            }
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_is_componentwise_product() {
        let a = CubePoint::from_signs(&[1, -1, -1, 1]);
        let b = CubePoint::from_signs(&[-1, -1, 1, 1]);
        let mut c = a.clone();
        c.xor_assign(&b);
        let expect: Vec<i8> = a.signs().zip(b.signs()).map(|(x, y)| x * y).collect();
        assert_eq!(c.signs().collect::<Vec<_>>(), expect);
    }

    #[test]
    fn wide_points_pack_across_words() {
        let mut p = CubePoint::ones(130);
        p.set_minus(0, true);
        p.set_minus(64, true);
        p.set_minus(129, true);
        assert_eq!(p.words().len(), 3);
        assert_eq!(p.signs().filter(|&s| s < 0).count(), 3);
        assert_eq!(p.parity(&[0, 64]), 1);
        assert_eq!(p.parity(&[0, 1, 129]), 1);
        assert_eq!(p.parity(&[129]), -1);
    }

    #[test]
    fn serde_uses_sign_strings() {
        let p = CubePoint::from_signs(&[1, -1, 1]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "\"+-+\"");
        let back: CubePoint = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}
