use super::cnf::CnfFoolerSpec;
use super::layout::{bucket_spec, global_spec, hash_spec, mz_layout, seed_layout, SeedLayout};
use super::params::GeneratorParams;
use crate::algebra::{HashFunction, HashSpec, KWiseSpec, KWiseString, SeedStream};
use crate::cube::CubePoint;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Variant {
    Mz,
    Full,
    WithoutGlobal,
}

/// A generator with its specs and layout resolved once, for repeated
/// evaluation over many seeds.
#[derive(Clone, Debug)]
pub struct Generator {
    n: usize,
    buckets: usize,
    hash: HashSpec,
    bucket: KWiseSpec,
    cnf: Option<KWiseSpec>,
    global: Option<KWiseSpec>,
    layout: SeedLayout,
    variant: Variant,
}

struct Draw {
    hash: HashFunction,
    buckets: Vec<KWiseString>,
    cnf: Vec<KWiseString>,
    global: Option<KWiseString>,
}

impl Generator {
    /// The Meka–Zuckerman generator.
    pub fn mz(p: &GeneratorParams) -> Result<Self> {
        Self::build(p, None, Variant::Mz)
    }

    /// The full generator `z = y̆ ⊕ y*`.
    pub fn full(p: &GeneratorParams, cnf: &CnfFoolerSpec) -> Result<Self> {
        Self::build(p, Some(cnf), Variant::Full)
    }

    /// Diagnostic variant returning `y̆`; it reads the full layout but skips
    /// the global XOR.
    pub fn without_global(p: &GeneratorParams, cnf: &CnfFoolerSpec) -> Result<Self> {
        Self::build(p, Some(cnf), Variant::WithoutGlobal)
    }

    fn build(p: &GeneratorParams, cnf: Option<&CnfFoolerSpec>, variant: Variant) -> Result<Self> {
        if let Some(c) = cnf {
            if c.n != p.n {
                return Err(Error::DimensionMismatch {
                    expected: p.n,
                    actual: c.n,
                });
            }
        }
        let layout = match cnf {
            Some(c) => seed_layout(p, c)?,
            None => mz_layout(p)?,
        };
        Ok(Generator {
            n: p.n,
            buckets: p.buckets,
            hash: hash_spec(p)?,
            bucket: bucket_spec(p)?,
            cnf: cnf.map(|c| c.kwise()).transpose()?,
            global: if cnf.is_some() { Some(global_spec(p)?) } else { None },
            layout,
            variant,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed_bits(&self) -> usize {
        self.layout.total
    }

    pub fn layout(&self) -> &SeedLayout {
        &self.layout
    }

    fn draw_stream(&self, seed: &SeedStream) -> Result<Draw> {
        if seed.remaining() != self.layout.total {
            return Err(Error::SeedLengthMismatch {
                expected: self.layout.total,
                actual: seed.remaining(),
            });
        }
        let mut s = seed.clone();
        let start = s.consumed();
        let hash = HashFunction::draw(self.hash, &mut s)?;
        let buckets = (0..self.buckets)
            .map(|_| KWiseString::draw(self.bucket, &mut s))
            .collect::<Result<Vec<_>>>()?;
        let mut cnf = Vec::new();
        let mut global = None;
        if let (Some(c), Some(g)) = (self.cnf, self.global) {
            cnf = (0..self.buckets)
                .map(|_| KWiseString::draw(c, &mut s))
                .collect::<Result<Vec<_>>>()?;
            global = Some(KWiseString::draw(g, &mut s)?);
        }
        debug_assert_eq!(s.consumed() - start, self.layout.total);
        debug_assert_eq!(s.remaining(), 0);
        Ok(Draw {
            hash,
            buckets,
            cnf,
            global,
        })
    }

    /// Seed index `t` read as a `seed_bits`-bit big-endian string. Needs
    /// `seed_bits <= 128` and every segment `<= 64` bits.
    fn draw_index(&self, t: u128) -> Draw {
        let total = self.layout.total;
        let field = |i: usize| -> u64 {
            let seg = &self.layout.segments[i];
            if seg.bits == 0 {
                return 0;
            }
            let shift = total - seg.offset - seg.bits;
            ((t >> shift) & ((1u128 << seg.bits) - 1)) as u64
        };
        let hash = HashFunction::from_index(self.hash, field(0));
        let buckets = (0..self.buckets)
            .map(|l| KWiseString::from_index(self.bucket, field(1 + l)))
            .collect();
        let mut cnf = Vec::new();
        let mut global = None;
        if let (Some(c), Some(g)) = (self.cnf, self.global) {
            cnf = (0..self.buckets)
                .map(|l| KWiseString::from_index(c, field(1 + self.buckets + l)))
                .collect();
            global = Some(KWiseString::from_index(g, field(1 + 2 * self.buckets)));
        }
        Draw {
            hash,
            buckets,
            cnf,
            global,
        }
    }

    fn combine(&self, d: &Draw) -> CubePoint {
        let mut z = CubePoint::ones(self.n);
        for j in 0..self.n {
            let b = d.hash.eval(j);
            let mut minus = d.buckets[b].is_minus(j);
            if let Some(c) = d.cnf.get(b) {
                minus ^= c.is_minus(j);
            }
            if self.variant == Variant::Full {
                if let Some(g) = &d.global {
                    minus ^= g.is_minus(j);
                }
            }
            z.set_minus(j, minus);
        }
        z
    }

    /// Output on a seed holding exactly `seed_bits` unread bits.
    pub fn generate(&self, seed: &SeedStream) -> Result<CubePoint> {
        Ok(self.combine(&self.draw_stream(seed)?))
    }

    /// True when `generate_index` is available.
    pub fn indexable(&self) -> bool {
        self.layout.total <= 128 && self.layout.segments.iter().all(|s| s.bits <= 64)
    }

    /// Output on seed number `t`; same as `generate(SeedStream::from_index(t,
    /// seed_bits))`.
    pub fn generate_index(&self, t: u128) -> CubePoint {
        if self.indexable() {
            self.combine(&self.draw_index(t))
        } else {
            self.generate(&SeedStream::from_index(t, self.layout.total))
                .expect("index seed has the layout length")
        }
    }
}

pub fn mz_generate(p: &GeneratorParams, seed: &SeedStream) -> Result<CubePoint> {
    Generator::mz(p)?.generate(seed)
}

pub fn our_generate(p: &GeneratorParams, seed: &SeedStream, cnf: &CnfFoolerSpec) -> Result<CubePoint> {
    Generator::full(p, cnf)?.generate(seed)
}

/// `y̆` alone: the full generator without the final global XOR.
pub fn our_generate_without_global(p: &GeneratorParams, seed: &SeedStream, cnf: &CnfFoolerSpec) -> Result<CubePoint> {
    Generator::without_global(p, cnf)?.generate(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::params::{Constants, LabSettings};

    fn lab(n: usize, l: usize, rh: usize, rb: usize, rc: usize, k: usize) -> GeneratorParams {
        let s = LabSettings {
            buckets: l,
            r_hash: rh,
            r_bucket: rb,
            r_cnf: rc,
            k,
        };
        GeneratorParams::lab(n, 2, 0.1, 0.5, s, Constants::default()).unwrap()
    }

    fn all_outputs(g: &Generator) -> Vec<CubePoint> {
        (0..1u128 << g.seed_bits()).map(|t| g.generate_index(t)).collect()
    }

    fn parity_sum(pts: &[CubePoint], subset: &[usize]) -> i64 {
        pts.iter().map(|p| p.parity(subset) as i64).sum()
    }

    #[test]
    fn single_bucket_mz_is_the_bucket_string() {
        let p = lab(6, 1, 1, 3, 0, 1);
        let g = Generator::mz(&p).unwrap();
        let spec = KWiseSpec::new(6, 3).unwrap();
        for t in 0..1u128 << g.seed_bits() {
            let mut seed = SeedStream::from_index(t, g.seed_bits());
            let z = mz_generate(&p, &seed).unwrap();
            seed.read_uint(3).unwrap();
            let y = crate::algebra::kwise_bits(spec, &mut seed).unwrap();
            assert_eq!(z, y);
        }
    }

    #[test]
    fn mz_coordinates_are_unbiased() {
        let p = lab(4, 2, 2, 2, 0, 1);
        let pts = all_outputs(&Generator::mz(&p).unwrap());
        for j in 0..4 {
            assert_eq!(parity_sum(&pts, &[j]), 0);
        }
    }

    #[test]
    fn full_output_is_pairwise_uniform() {
        let p = lab(4, 2, 2, 2, 2, 1);
        let g = Generator::full(&p, &CnfFoolerSpec::from_params(&p)).unwrap();
        assert_eq!(g.seed_bits(), 24);
        let pts = all_outputs(&g);
        for i in 0..4 {
            assert_eq!(parity_sum(&pts, &[i]), 0);
            for j in i + 1..4 {
                assert_eq!(parity_sum(&pts, &[i, j]), 0);
            }
        }
    }

    #[test]
    fn all_zero_seed_gives_all_plus() {
        let p = lab(5, 2, 2, 2, 2, 2);
        let cnf = CnfFoolerSpec::from_params(&p);
        let bits = Generator::full(&p, &cnf).unwrap().seed_bits();
        let z = our_generate(&p, &SeedStream::from_index(0, bits), &cnf).unwrap();
        assert_eq!(z, CubePoint::ones(5));
    }

    #[test]
    fn index_path_matches_stream_path() {
        let p = lab(7, 2, 2, 2, 1, 1);
        let cnf = CnfFoolerSpec::from_params(&p);
        for g in [
            Generator::mz(&p).unwrap(),
            Generator::full(&p, &cnf).unwrap(),
            Generator::without_global(&p, &cnf).unwrap(),
        ] {
            for t in [0u128, 1, 99, (1 << g.seed_bits()) - 1, 12345 % (1 << g.seed_bits())] {
                let seed = SeedStream::from_index(t, g.seed_bits());
                assert_eq!(g.generate_index(t), g.generate(&seed).unwrap());
            }
        }
    }

    #[test]
    fn without_global_differs_by_the_global_string() {
        let p = lab(6, 2, 2, 2, 1, 1);
        let cnf = CnfFoolerSpec::from_params(&p);
        let bits = Generator::full(&p, &cnf).unwrap().seed_bits();
        let g_bits = 2 * 3;
        for t in [5u128, 77, 1000, 4095] {
            let seed = SeedStream::from_index(t, bits);
            let mut z = our_generate(&p, &seed, &cnf).unwrap();
            let y = our_generate_without_global(&p, &seed, &cnf).unwrap();
            let mut tail = SeedStream::from_index(t & ((1 << g_bits) - 1), g_bits);
            let star = crate::algebra::kwise_bits(KWiseSpec::new(6, 2).unwrap(), &mut tail).unwrap();
            z.xor_assign(&star);
            assert_eq!(z, y);
        }
    }

    #[test]
    fn wrong_seed_length_is_an_error() {
        let p = lab(4, 2, 2, 2, 2, 1);
        let cnf = CnfFoolerSpec::from_params(&p);
        let short = SeedStream::from_index(0, 23);
        let long = SeedStream::from_index(0, 25);
        assert!(matches!(
            our_generate(&p, &short, &cnf),
            Err(Error::SeedLengthMismatch { .. })
        ));
        assert!(matches!(
            our_generate(&p, &long, &cnf),
            Err(Error::SeedLengthMismatch { .. })
        ));
        assert!(matches!(mz_generate(&p, &long), Err(Error::SeedLengthMismatch { .. })));
    }

    #[test]
    fn deterministic() {
        let p = lab(9, 4, 2, 2, 1, 2);
        let cnf = CnfFoolerSpec::from_params(&p);
        let bits = Generator::full(&p, &cnf).unwrap().seed_bits();
        let seed = SeedStream::from_index(0xdead_beef_cafe, bits);
        assert_eq!(
            our_generate(&p, &seed, &cnf).unwrap(),
            our_generate(&p, &seed, &cnf).unwrap()
        );
    }
}
