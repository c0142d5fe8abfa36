//! Seed-space enumeration for the full generator, organised by segment.
//!
//! For a fixed hash seed the output is the XOR of one contribution per
//! segment, each depending only on that segment's bits: bucket and CNF
//! strings restricted to their bucket, and the global string on all
//! coordinates. Every segment's outputs are tabulated once. All-seeds
//! enumeration then walks the product of the tables with one XOR per
//! step. The factored path goes through Walsh–Hadamard transforms
//! instead. A XOR of independent parts has a product spectrum, so sums
//! over all `2^r` seeds are computed exactly from per-segment spectra.

use crate::algebra::{HashFunction, HashSpec, KWiseSpec, KWiseString};
use crate::error::{Error, Result};
use crate::generators::layout::{bucket_spec, global_spec, hash_spec};
use crate::generators::{seed_layout, CnfFoolerSpec, GeneratorParams};
use rayon::prelude::*;

/// Widest segment that is tabulated.
const TABLE_BITS: usize = 24;

/// Largest `n` accepted by the transform-based paths.
pub const FACTORED_CAP: usize = 20;

#[derive(Clone, Debug)]
struct SegTable {
    bits: usize,
    masks: Vec<u64>,
}

impl SegTable {
    fn new(spec: KWiseSpec) -> Result<Self> {
        let bits = spec.seed_bits();
        if bits > TABLE_BITS {
            return Err(Error::InvalidParameter(format!(
                "segment of {bits} bits is too wide to tabulate (limit {TABLE_BITS})"
            )));
        }
        let masks = (0..1u64 << bits)
            .into_par_iter()
            .map(|x| KWiseString::from_index(spec, x).mask())
            .collect();
        Ok(SegTable { bits, masks })
    }

    /// `Σ_x (-1)^{|S ∩ T[x]|}` for every `S`, as a table indexed by `S`.
    fn spectrum(&self, n: usize) -> Vec<i64> {
        let mut h = vec![0i64; 1 << n];
        for &t in &self.masks {
            h[t as usize] += 1;
        }
        wht(&mut h);
        h
    }
}

/// In-place unnormalised Walsh–Hadamard transform.
pub fn wht<T>(v: &mut [T])
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let len = v.len();
    assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// The full generator's seed space in product form.
#[derive(Clone, Debug)]
pub struct SeedTables {
    n: usize,
    buckets: usize,
    hash: HashSpec,
    hash_bits: usize,
    bucket: SegTable,
    cnf: SegTable,
    global: SegTable,
    total: usize,
}

impl SeedTables {
    pub fn new(p: &GeneratorParams, cnf: &CnfFoolerSpec) -> Result<Self> {
        if p.n > 64 {
            return Err(Error::InvalidParameter("table enumeration needs n <= 64".into()));
        }
        let layout = seed_layout(p, cnf)?;
        let hash = hash_spec(p)?;
        let t = SeedTables {
            n: p.n,
            buckets: p.buckets,
            hash,
            hash_bits: hash.seed_bits(),
            bucket: SegTable::new(bucket_spec(p)?)?,
            cnf: SegTable::new(cnf.kwise()?)?,
            global: SegTable::new(global_spec(p)?)?,
            total: layout.total,
        };
        let sum = t.hash_bits + t.buckets * (t.bucket.bits + t.cnf.bits) + t.global.bits;
        debug_assert_eq!(sum, t.total);
        if t.hash_bits > 40 {
            return Err(Error::InvalidParameter("hash segment too wide to enumerate".into()));
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed_bits(&self) -> usize {
        self.total
    }

    /// Coordinate sets `{j : h(j) = l}` for hash seed `hv`.
    fn bucket_masks(&self, hv: u64) -> Vec<u64> {
        let h = HashFunction::from_index(self.hash, hv);
        let mut masks = vec![0u64; self.buckets];
        for (j, b) in h.table().into_iter().enumerate() {
            masks[b] |= 1 << j;
        }
        masks
    }

    /// Levels after the hash, in layout order, as (table, restriction).
    fn levels<'a>(&'a self, masks: &[u64]) -> Vec<(&'a [u64], u64)> {
        let mut levels = Vec::with_capacity(2 * self.buckets + 1);
        for &b in masks {
            levels.push((&self.bucket.masks[..], b));
        }
        for &b in masks {
            levels.push((&self.cnf.masks[..], b));
        }
        let all = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        levels.push((&self.global.masks[..], all));
        levels
    }

    /// Folds `visit` over the outputs of all `2^r` seeds, each visited
    /// once. Reduction must be exact for the result to be schedule-free.
    pub fn for_each_output<T, I, V, M>(&self, init: I, visit: V, merge: M) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        V: Fn(&mut T, u64) + Sync + Send,
        M: Fn(T, T) -> T + Sync + Send,
    {
        let first = 1u64 << self.bucket.bits;
        let tasks = (1u64 << self.hash_bits) * first;
        (0..tasks)
            .into_par_iter()
            .fold(&init, |mut acc, task| {
                let hv = task / first;
                let x0 = task % first;
                let masks = self.bucket_masks(hv);
                let levels = self.levels(&masks);
                let (t0, r0) = levels[0];
                dfs(&levels[1..], t0[x0 as usize] & r0, &mut acc, &visit);
                acc
            })
            .reduce(&init, &merge)
    }

    /// Number of seeds whose output satisfies `pred`.
    pub fn count<P>(&self, pred: P) -> u64
    where
        P: Fn(u64) -> bool + Sync + Send,
    {
        self.for_each_output(
            || 0u64,
            |c, z| {
                if pred(z) {
                    *c += 1;
                }
            },
            |a, b| a + b,
        )
    }

    /// Multiplicity of every output mask (`n <= 24`).
    pub fn histogram(&self) -> Result<Vec<u64>> {
        if self.n > 24 {
            return Err(Error::EnumerationCap { n: self.n, cap: 24 });
        }
        let size = 1usize << self.n;
        Ok(self.for_each_output(
            || vec![0u64; size],
            |h, z| h[z as usize] += 1,
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        ))
    }

    fn check_factored(&self, extra_bits: usize) -> Result<()> {
        if self.n > FACTORED_CAP {
            return Err(Error::EnumerationCap {
                n: self.n,
                cap: FACTORED_CAP,
            });
        }
        if self.total + extra_bits > 125 {
            return Err(Error::InvalidParameter(format!(
                "{} seed bits are too many for exact 128-bit accumulation",
                self.total
            )));
        }
        Ok(())
    }

    /// `Σ_seeds (-1)^{|S ∩ z(seed)|}` for every subset mask `S`, summed over
    /// hash seeds by exact integer arithmetic.
    pub fn parity_spectrum(&self) -> Result<Vec<i128>> {
        self.check_factored(0)?;
        let size = 1usize << self.n;
        let sb = self.bucket.spectrum(self.n);
        let sc = self.cnf.spectrum(self.n);
        let sg = self.global.spectrum(self.n);
        Ok((0..1u64 << self.hash_bits)
            .into_par_iter()
            .fold(
                || vec![0i128; size],
                |mut acc, hv| {
                    let masks = self.bucket_masks(hv);
                    for (s, slot) in acc.iter_mut().enumerate() {
                        *slot += product_at(s as u64, &masks, &sb, &sc, &sg);
                    }
                    acc
                },
            )
            .reduce(
                || vec![0i128; size],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            ))
    }

    /// `Σ_seeds (-1)^{|S ∩ z(seed)|}` for the given subsets only.
    pub fn parity_sums(&self, subsets: &[u64]) -> Result<Vec<i128>> {
        self.check_factored(0)?;
        let sb = self.bucket.spectrum(self.n);
        let sc = self.cnf.spectrum(self.n);
        let sg = self.global.spectrum(self.n);
        let per_hash: Vec<Vec<i128>> = (0..1u64 << self.hash_bits)
            .into_par_iter()
            .map(|hv| {
                let masks = self.bucket_masks(hv);
                subsets.iter().map(|&s| product_at(s, &masks, &sb, &sc, &sg)).collect()
            })
            .collect();
        Ok((0..subsets.len())
            .map(|i| per_hash.iter().map(|v| v[i]).sum())
            .collect())
    }

    /// Number of seeds whose output lies in `set` (a `2^n`-bit table),
    /// computed through the spectrum: `2^-n Σ_S f̂(S) Ĝ(S)`.
    pub fn factored_count(&self, set: &[u64]) -> Result<u128> {
        self.check_factored(2 * self.n)?;
        let size = 1usize << self.n;
        let mut f: Vec<i128> = (0..size).map(|x| ((set[x >> 6] >> (x & 63)) & 1) as i128).collect();
        wht(&mut f);
        let g = self.parity_spectrum()?;
        let total: i128 = f.iter().zip(&g).map(|(a, b)| a * b).sum();
        debug_assert_eq!(total % size as i128, 0);
        Ok((total >> self.n) as u128)
    }
}

#[inline]
fn product_at(s: u64, masks: &[u64], sb: &[i64], sc: &[i64], sg: &[i64]) -> i128 {
    let mut p = sg[s as usize] as i128;
    for &b in masks {
        if p == 0 {
            break;
        }
        let r = (s & b) as usize;
        p *= sb[r] as i128 * sc[r] as i128;
    }
    p
}

fn dfs<T, V>(levels: &[(&[u64], u64)], acc_mask: u64, acc: &mut T, visit: &V)
where
    V: Fn(&mut T, u64),
{
    match levels {
        [] => visit(acc, acc_mask),
        [(table, r)] => {
            for &t in table.iter() {
                visit(acc, acc_mask ^ (t & r));
            }
        }
        [(table, r), rest @ ..] => {
            for &t in table.iter() {
                dfs(rest, acc_mask ^ (t & r), acc, visit);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{Constants, Generator, LabSettings};

    fn params(n: usize, s: LabSettings) -> GeneratorParams {
        GeneratorParams::lab(n, 2, 0.25, 0.5, s, Constants::default()).unwrap()
    }

    fn tiny() -> GeneratorParams {
        params(
            4,
            LabSettings {
                buckets: 2,
                r_hash: 2,
                r_bucket: 1,
                r_cnf: 1,
                k: 1,
            },
        )
    }

    // Direct loop over seed indices through the reference generator.
    fn reference_histogram(p: &GeneratorParams) -> Vec<u64> {
        let cnf = CnfFoolerSpec::from_params(p);
        let g = Generator::full(p, &cnf).unwrap();
        let mut h = vec![0u64; 1 << p.n];
        for t in 0..1u128 << g.seed_bits() {
            h[g.generate_index(t).mask() as usize] += 1;
        }
        h
    }

    #[test]
    fn histogram_matches_direct_seed_loop() {
        let p = tiny();
        let cnf = CnfFoolerSpec::from_params(&p);
        let t = SeedTables::new(&p, &cnf).unwrap();
        assert_eq!(t.seed_bits(), 16);
        assert_eq!(t.histogram().unwrap(), reference_histogram(&p));
    }

    #[test]
    fn zero_width_cnf_segments() {
        let p = params(
            5,
            LabSettings {
                buckets: 2,
                r_hash: 1,
                r_bucket: 2,
                r_cnf: 0,
                k: 1,
            },
        );
        let cnf = CnfFoolerSpec::from_params(&p);
        let t = SeedTables::new(&p, &cnf).unwrap();
        assert_eq!(t.histogram().unwrap(), reference_histogram(&p));
    }

    #[test]
    fn spectrum_matches_histogram() {
        let p = tiny();
        let cnf = CnfFoolerSpec::from_params(&p);
        let t = SeedTables::new(&p, &cnf).unwrap();
        let h = reference_histogram(&p);
        let g = t.parity_spectrum().unwrap();
        for s in 0..16u64 {
            let direct: i128 = (0..16u64)
                .map(|x| {
                    if (s & x).count_ones() % 2 == 0 {
                        h[x as usize] as i128
                    } else {
                        -(h[x as usize] as i128)
                    }
                })
                .sum();
            assert_eq!(g[s as usize], direct, "S = {s:04b}");
        }
        assert_eq!(g[0], 1 << 16);
        assert_eq!(t.parity_sums(&[0b0101, 0b1111]).unwrap(), vec![g[5], g[15]]);
    }

    #[test]
    fn factored_count_matches_enumeration() {
        let p = tiny();
        let cnf = CnfFoolerSpec::from_params(&p);
        let t = SeedTables::new(&p, &cnf).unwrap();
        let h = reference_histogram(&p);
        for set in [0b1010_0110_0001_1111u64, 0, 0xffff, 0x8001] {
            let want: u64 = (0..16).filter(|x| (set >> x) & 1 == 1).map(|x| h[x]).sum();
            assert_eq!(t.factored_count(&[set]).unwrap(), want as u128);
            assert_eq!(t.count(|z| (set >> z) & 1 == 1), want);
        }
    }

    #[test]
    fn wht_involution() {
        let mut v: Vec<i64> = (0..32).map(|i| (i * 7 % 5) as i64 - 2).collect();
        let orig = v.clone();
        wht(&mut v);
        wht(&mut v);
        assert!(v.iter().zip(&orig).all(|(a, b)| *a == 32 * b));
    }
}
