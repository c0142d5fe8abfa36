use super::cnf::CnfFoolerSpec;
use super::params::GeneratorParams;
use crate::algebra::{degree_for, HashSpec, KWiseSpec};
use crate::error::Result;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "bucket")]
pub enum SegmentKind {
    Hash,
    Bucket(usize),
    Cnf(usize),
    Global,
}

/// A contiguous run of seed bits feeding one primitive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub offset: usize,
    pub bits: usize,
    /// Field degree of the primitive.
    pub s: u32,
    /// Independence order (number of coefficients).
    pub order: usize,
}

/// Segments in consumption order:
/// `hash | bucket_1..bucket_L | cnf_1..cnf_L | global`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedLayout {
    pub segments: Vec<Segment>,
    pub total: usize,
}

impl SeedLayout {
    fn push(&mut self, kind: SegmentKind, s: u32, order: usize) {
        let bits = s as usize * order;
        self.segments.push(Segment {
            kind,
            offset: self.total,
            bits,
            s,
            order,
        });
        self.total += bits;
    }

    pub fn segment(&self, kind: SegmentKind) -> Option<&Segment> {
        self.segments.iter().find(|s| s.kind == kind)
    }
}

pub(crate) fn hash_spec(p: &GeneratorParams) -> Result<HashSpec> {
    HashSpec::new(p.n, p.buckets, p.r_hash)
}

pub(crate) fn bucket_spec(p: &GeneratorParams) -> Result<KWiseSpec> {
    KWiseSpec::new(p.n, p.r_bucket)
}

pub(crate) fn global_spec(p: &GeneratorParams) -> Result<KWiseSpec> {
    KWiseSpec::new(p.n, 2 * p.k)
}

fn mz_part(p: &GeneratorParams) -> Result<SeedLayout> {
    p.validate()?;
    let mut layout = SeedLayout {
        segments: Vec::new(),
        total: 0,
    };
    let h = hash_spec(p)?;
    layout.push(SegmentKind::Hash, h.s, h.r);
    let s = degree_for(p.n)?;
    for l in 0..p.buckets {
        layout.push(SegmentKind::Bucket(l), s, p.r_bucket);
    }
    Ok(layout)
}

/// Layout of the Meka–Zuckerman generator: hash and bucket segments only.
pub fn mz_layout(p: &GeneratorParams) -> Result<SeedLayout> {
    mz_part(p)
}

/// Full layout with an explicit CNF fooler.
pub fn seed_layout(p: &GeneratorParams, cnf: &CnfFoolerSpec) -> Result<SeedLayout> {
    let mut layout = mz_part(p)?;
    let c = cnf.kwise()?;
    for l in 0..p.buckets {
        layout.push(SegmentKind::Cnf(l), c.s, c.k);
    }
    let g = global_spec(p)?;
    layout.push(SegmentKind::Global, g.s, g.k);
    Ok(layout)
}

/// Seed length and layout of the full generator with the default fooler.
pub fn seed_length(p: &GeneratorParams) -> Result<(usize, SeedLayout)> {
    let layout = seed_layout(p, &CnfFoolerSpec::from_params(p))?;
    Ok((layout.total, layout))
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

    #[test]
    fn small_layout_sums_to_24() {
        let (bits, layout) = seed_length(&lab(4, 2, 2, 2, 2, 1)).unwrap();
        assert_eq!(bits, 2 * 2 + 2 * 2 * 2 + 2 * 2 * 2 + 2 * 2);
        assert_eq!(bits, 24);
        assert_eq!(layout.segments.len(), 1 + 2 + 2 + 1);
        assert_eq!(layout.segments.iter().map(|s| s.bits).sum::<usize>(), bits);
        let mut offset = 0;
        for seg in &layout.segments {
            assert_eq!(seg.offset, offset);
            offset += seg.bits;
        }
    }

    #[test]
    fn minimum_global_segment_is_two_field_elements() {
        let p = lab(8, 1, 1, 1, 0, 1);
        let (_, layout) = seed_length(&p).unwrap();
        assert_eq!(layout.segment(SegmentKind::Global).unwrap().bits, 2 * 3);
    }

    #[test]
    fn dropping_cnf_segments_removes_l_r_s_bits() {
        let with = lab(4, 2, 2, 2, 2, 1);
        let without = GeneratorParams {
            r_cnf: 0,
            ..with.clone()
        };
        let a = seed_length(&with).unwrap().0;
        let b = seed_length(&without).unwrap().0;
        assert_eq!(a - b, 2 * 2 * 2);
    }

    #[test]
    fn larger_lab_params() {
        assert_eq!(seed_length(&lab(8, 2, 2, 2, 2, 2)).unwrap().0, 42);
        assert_eq!(mz_layout(&lab(8, 2, 2, 2, 2, 2)).unwrap().total, 18);
    }
}
