use super::gf::{degree_for, Field};
use super::seed::SeedStream;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// An `r`-wise uniform hash `[n] -> [L]` from a random polynomial of degree
/// `< r` over `GF(2^s)`; the bucket is the top `log2 L` bits of `p(j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashSpec {
    pub n: usize,
    #[serde(rename = "L")]
    pub buckets: usize,
    pub r: usize,
    pub s: u32,
}

impl HashSpec {
    /// Uses the smallest degree with `2^s >= max(n, L)`.
    pub fn new(n: usize, buckets: usize, r: usize) -> Result<Self> {
        Self::with_degree(n, buckets, r, degree_for(n.max(buckets))?)
    }

    pub fn with_degree(n: usize, buckets: usize, r: usize, s: u32) -> Result<Self> {
        if buckets == 0 || !buckets.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(buckets));
        }
        Field::new(s)?;
        let size = n.max(buckets) as u64;
        if n == 0 || size > (1u64 << s) {
            return Err(Error::InvalidParameter(format!(
                "hash over [{n}] into {buckets} buckets needs 2^s >= {size} (s = {s})"
            )));
        }
        Ok(HashSpec { n, buckets, r, s })
    }

    pub fn seed_bits(&self) -> usize {
        self.r * self.s as usize
    }

    pub fn bucket_bits(&self) -> u32 {
        self.buckets.trailing_zeros()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashFunction {
    spec: HashSpec,
    field: Field,
    coeffs: Vec<u32>,
}

impl HashFunction {
    pub fn draw(spec: HashSpec, seed: &mut SeedStream) -> Result<Self> {
        if seed.remaining() < spec.seed_bits() {
            return Err(Error::SeedUnderflow {
                needed: spec.seed_bits(),
                available: seed.remaining(),
            });
        }
        let coeffs = (0..spec.r)
            .map(|_| seed.read_uint(spec.s).map(|v| v as u32))
            .collect::<Result<Vec<_>>>()?;
        Ok(HashFunction {
            spec,
            field: Field::new(spec.s)?,
            coeffs,
        })
    }

    /// Same draw as `draw` on `SeedStream::from_index(index, seed_bits)`.
    pub fn from_index(spec: HashSpec, index: u64) -> Self {
        let s = spec.s;
        let mask = (1u64 << s) - 1;
        let coeffs = (0..spec.r)
            .map(|i| ((index >> ((spec.r - 1 - i) as u32 * s)) & mask) as u32)
            .collect();
        HashFunction {
            spec,
            field: Field::new(s).expect("validated degree"),
            coeffs,
        }
    }

    #[inline]
    pub fn eval(&self, j: usize) -> usize {
        let v = self.field.eval_poly(&self.coeffs, j as u32) as u64;
        (v >> (self.spec.s - self.spec.bucket_bits())) as usize
    }

    /// Buckets of `0..n`.
    pub fn table(&self) -> Vec<usize> {
        (0..self.spec.n).map(|j| self.eval(j)).collect()
    }
}

/// Bucket of item `j` under the hash read from the front of `seed`. The
/// stream itself is left untouched.
pub fn hash_eval(spec: HashSpec, seed: &SeedStream, j: usize) -> Result<usize> {
    if j >= spec.n {
        return Err(Error::InvalidParameter(format!("item {j} outside [0, {})", spec.n)));
    }
    let mut local = seed.clone();
    Ok(HashFunction::draw(spec, &mut local)?.eval(j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_hit_each_bucket_pair_once() {
        let spec = HashSpec::with_degree(2, 2, 2, 1).unwrap();
        let mut seen = [[0; 2]; 2];
        for t in 0..4u128 {
            let seed = SeedStream::from_index(t, 2);
            let a = hash_eval(spec, &seed, 0).unwrap();
            let b = hash_eval(spec, &seed, 1).unwrap();
            seen[a][b] += 1;
        }
        assert_eq!(seen, [[1, 1], [1, 1]]);
    }

    #[test]
    fn order_one_puts_everything_in_one_bucket() {
        let spec = HashSpec::new(10, 4, 1).unwrap();
        for t in 0..(1u64 << spec.seed_bits()) {
            let table = HashFunction::from_index(spec, t).table();
            assert!(table.iter().all(|&b| b == table[0]));
        }
    }

    #[test]
    fn evaluation_is_deterministic_and_in_range() {
        let spec = HashSpec::new(12, 8, 3).unwrap();
        let seed = SeedStream::from_index(0x5a5a5, spec.seed_bits());
        for j in 0..12 {
            let a = hash_eval(spec, &seed, j).unwrap();
            assert_eq!(a, hash_eval(spec, &seed, j).unwrap());
            assert!(a < 8);
        }
        assert_eq!(seed.consumed(), 0);
    }

    #[test]
    fn three_wise_joint_distribution_is_uniform() {
        let spec = HashSpec::new(4, 4, 3).unwrap();
        let mut counts = vec![0usize; 64];
        for t in 0..(1u64 << spec.seed_bits()) {
            let h = HashFunction::from_index(spec, t);
            counts[h.eval(0) * 16 + h.eval(1) * 4 + h.eval(3)] += 1;
        }
        assert!(counts.iter().all(|&c| c == counts[0]));
    }

    #[test]
    fn non_power_of_two_is_rejected() {
        assert_eq!(HashSpec::new(8, 3, 2), Err(Error::NotPowerOfTwo(3)));
        assert!(HashSpec::with_degree(8, 16, 2, 3).is_err());
    }

    #[test]
    fn single_bucket_is_always_zero() {
        let spec = HashSpec::new(5, 1, 2).unwrap();
        let h = HashFunction::from_index(spec, 13);
        assert!(h.table().iter().all(|&b| b == 0));
    }
}
