use super::gf::{degree_for, Field};
use super::seed::SeedStream;
use crate::cube::CubePoint;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A `k`-wise uniform `±1` string of length `n` built from a random
/// polynomial of degree `< k` over `GF(2^s)`.
///
/// Output `j` is the least-significant bit of `p(j)` (field element with
/// binary encoding `j`), with bit 0 mapped to `+1`. `k = 0` gives the zero
/// polynomial, i.e. the constant all-`+1` string with an empty seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KWiseSpec {
    pub n: usize,
    pub k: usize,
    pub s: u32,
}

impl KWiseSpec {
    /// Uses the smallest degree with `2^s >= n`.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        Self::with_degree(n, k, degree_for(n)?)
    }

    pub fn with_degree(n: usize, k: usize, s: u32) -> Result<Self> {
        Field::new(s)?;
        if n == 0 || (n as u64) > (1u64 << s) {
            return Err(Error::InvalidParameter(format!(
                "k-wise string of length {n} needs 2^s >= n (s = {s})"
            )));
        }
        Ok(KWiseSpec { n, k, s })
    }

    pub fn seed_bits(&self) -> usize {
        self.k * self.s as usize
    }

    pub fn field(&self) -> Field {
        Field::new(self.s).expect("validated degree")
    }
}

/// One draw: the polynomial read from the seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KWiseString {
    spec: KWiseSpec,
    coeffs: Vec<u32>,
}

impl KWiseString {
    /// Reads `k` coefficients `c_0, ..., c_{k-1}` of `s` bits each.
    pub fn draw(spec: KWiseSpec, seed: &mut SeedStream) -> Result<Self> {
        if seed.remaining() < spec.seed_bits() {
            return Err(Error::SeedUnderflow {
                needed: spec.seed_bits(),
                available: seed.remaining(),
            });
        }
        let coeffs = (0..spec.k)
            .map(|_| seed.read_uint(spec.s).map(|v| v as u32))
            .collect::<Result<Vec<_>>>()?;
        Ok(KWiseString { spec, coeffs })
    }

    /// Same draw as `draw` on `SeedStream::from_index(index, seed_bits)`.
    pub fn from_index(spec: KWiseSpec, index: u64) -> Self {
        let s = spec.s;
        let mask = (1u64 << s) - 1;
        let coeffs = (0..spec.k)
            .map(|i| ((index >> ((spec.k - 1 - i) as u32 * s)) & mask) as u32)
            .collect();
        KWiseString { spec, coeffs }
    }

    /// True when coordinate `j` is `-1`.
    #[inline]
    pub fn is_minus(&self, j: usize) -> bool {
        self.spec.field().eval_poly(&self.coeffs, j as u32) & 1 == 1
    }

    pub fn to_point(&self) -> CubePoint {
        let mut p = CubePoint::ones(self.spec.n);
        let field = self.spec.field();
        for j in 0..self.spec.n {
            if field.eval_poly(&self.coeffs, j as u32) & 1 == 1 {
                p.set_minus(j, true);
            }
        }
        p
    }

    /// Packed output for `n <= 64`.
    pub fn mask(&self) -> u64 {
        assert!(self.spec.n <= 64);
        let field = self.spec.field();
        (0..self.spec.n).fold(0u64, |acc, j| {
            acc | (((field.eval_poly(&self.coeffs, j as u32) & 1) as u64) << j)
        })
    }
}

/// Draws the string and materializes all `n` coordinates.
pub fn kwise_bits(spec: KWiseSpec, seed: &mut SeedStream) -> Result<CubePoint> {
    Ok(KWiseString::draw(spec, seed)?.to_point())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_points(spec: KWiseSpec) -> Vec<CubePoint> {
        let bits = spec.seed_bits();
        (0..1u128 << bits)
            .map(|t| kwise_bits(spec, &mut SeedStream::from_index(t, bits)).unwrap())
            .collect()
    }

    fn parity_sum(points: &[CubePoint], subset: &[usize]) -> i64 {
        points.iter().map(|p| p.parity(subset) as i64).sum()
    }

    #[test]
    fn order_one_is_constant_and_balanced() {
        let spec = KWiseSpec::new(6, 1).unwrap();
        let pts = all_points(spec);
        let mut minus = 0;
        for p in &pts {
            let first = p.get(0);
            assert!(p.signs().all(|s| s == first));
            if first < 0 {
                minus += 1;
            }
        }
        assert_eq!(minus * 2, pts.len());
    }

    #[test]
    fn pairwise_exact_with_biased_full_parity() {
        let spec = KWiseSpec::with_degree(4, 2, 2).unwrap();
        let pts = all_points(spec);
        assert_eq!(pts.len(), 16);
        for i in 0..4 {
            assert_eq!(parity_sum(&pts, &[i]), 0);
            for j in i + 1..4 {
                assert_eq!(parity_sum(&pts, &[i, j]), 0);
            }
        }
        // Regression values from full enumeration. Every output bit is a
        // GF(2)-linear form in the seed and the constant term enters each
        // one, so odd parities vanish. The parity of all four outputs is
        // identically +1 because the four linear parts sum to zero.
        for t in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
            assert_eq!(parity_sum(&pts, &t), 0);
        }
        assert_eq!(parity_sum(&pts, &[0, 1, 2, 3]), 16);
    }

    #[test]
    fn zero_order_is_all_plus() {
        let spec = KWiseSpec::new(5, 0).unwrap();
        let p = kwise_bits(spec, &mut SeedStream::from_bits(vec![])).unwrap();
        assert_eq!(p, CubePoint::ones(5));
    }

    #[test]
    fn underflow_is_reported() {
        let spec = KWiseSpec::new(8, 3).unwrap();
        let mut seed = SeedStream::from_index(0, 8);
        assert!(matches!(kwise_bits(spec, &mut seed), Err(Error::SeedUnderflow { .. })));
    }

    #[test]
    fn index_draw_matches_stream_draw() {
        let spec = KWiseSpec::new(11, 3).unwrap();
        for t in [0u64, 1, 77, 4095, 1234] {
            let a = KWiseString::from_index(spec, t);
            let b = KWiseString::draw(spec, &mut SeedStream::from_index(t as u128, 12)).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.mask(), b.to_point().mask());
        }
    }

    #[test]
    fn rejects_short_fields() {
        assert!(KWiseSpec::with_degree(5, 2, 2).is_err());
    }
}
