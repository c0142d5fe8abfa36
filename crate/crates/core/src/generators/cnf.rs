use super::params::GeneratorParams;
use crate::algebra::{kwise_bits, KWiseSpec, SeedStream};
use crate::cube::CubePoint;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CnfFoolerKind {
    /// `r_cnf`-wise uniform strings.
    BoundedIndependence,
    /// Slot for a dedicated small-width CNF generator; not implemented.
    External,
}

/// The per-bucket CNF fooler. Each of the `L` buckets draws its own full
/// `n`-bit string from a disjoint seed segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CnfFoolerSpec {
    pub kind: CnfFoolerKind,
    pub n: usize,
    pub width: usize,
    pub delta_cnf: f64,
    pub r_cnf: usize,
}

impl CnfFoolerSpec {
    pub fn from_params(p: &GeneratorParams) -> Self {
        CnfFoolerSpec {
            kind: CnfFoolerKind::BoundedIndependence,
            n: p.n,
            width: p.w,
            delta_cnf: p.delta_cnf,
            r_cnf: p.r_cnf,
        }
    }

    pub fn kwise(&self) -> Result<KWiseSpec> {
        match self.kind {
            CnfFoolerKind::BoundedIndependence => KWiseSpec::new(self.n, self.r_cnf),
            CnfFoolerKind::External => Err(Error::UnsupportedFooler),
        }
    }

    pub fn seed_bits(&self) -> Result<usize> {
        Ok(self.kwise()?.seed_bits())
    }
}

pub fn cnf_fooler_draw(spec: &CnfFoolerSpec, seed: &mut SeedStream) -> Result<CubePoint> {
    kwise_bits(spec.kwise()?, seed)
}
