use super::seeds::{SeedTables, FACTORED_CAP};
use crate::enumerate::{bitmap_get, count_where, membership_bitmap, DEFAULT_CUBE_CAP};
use crate::error::{Error, Result};
use crate::generators::{CnfFoolerSpec, Generator, GeneratorParams};
use crate::polytope::Polytope;
use crate::scalar::Scalar;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Largest seed length enumerated in all-seeds mode.
pub const SEED_BUDGET: usize = 26;

/// How the generator side of an experiment is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedMode {
    /// Every seed, up to [`SEED_BUDGET`] bits.
    AllSeeds,
    /// Counter seeds `0, 1, ..., N-1`.
    Strided(u64),
    /// Every seed implicitly, via per-segment spectra.
    Factored,
}

impl fmt::Display for SeedMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedMode::AllSeeds => f.write_str("all-seeds"),
            SeedMode::Strided(n) => write!(f, "strided:{n}"),
            SeedMode::Factored => f.write_str("factored"),
        }
    }
}

impl FromStr for SeedMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-seeds" | "all_seeds" => Ok(SeedMode::AllSeeds),
            "factored" => Ok(SeedMode::Factored),
            _ => {
                let n = s
                    .strip_prefix("strided:")
                    .and_then(|v| v.parse::<u64>().ok())
                    .filter(|&v| v > 0)
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "unknown mode {s:?} (expected all-seeds, strided:N or factored)"
                        ))
                    })?;
                Ok(SeedMode::Strided(n))
            }
        }
    }
}

/// A probability together with the integer count it came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub hits: u128,
    pub trials: u128,
    pub probability: f64,
}

impl Estimate {
    pub fn new(hits: u128, trials: u128) -> Self {
        Estimate {
            hits,
            trials,
            probability: hits as f64 / trials as f64,
        }
    }
}

/// `Pr_u[A u <= b]` by counting all `2^n` points.
pub fn exact_orthant_prob<S: Scalar>(p: &Polytope<S>, cap: usize) -> Result<Estimate> {
    let hits = count_where(p, cap, |v| v.inside())?;
    Ok(Estimate::new(hits as u128, 1u128 << p.n()))
}

/// Generator-side acceptance probability of the full generator with a
/// bounded-independence CNF fooler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorEstimate {
    pub mode: SeedMode,
    pub seed_bits: usize,
    /// Number of seeds the estimate covers.
    pub seeds_used: u128,
    pub estimate: Estimate,
}

pub fn generator_orthant_prob<S: Scalar>(
    p: &Polytope<S>,
    params: &GeneratorParams,
    mode: SeedMode,
    cap: usize,
) -> Result<GeneratorEstimate> {
    if p.n() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            actual: p.n(),
        });
    }
    let cnf = CnfFoolerSpec::from_params(params);
    let gen = Generator::full(params, &cnf)?;
    let bits = gen.seed_bits();
    let (hits, used) = match mode {
        SeedMode::AllSeeds => {
            if bits > SEED_BUDGET {
                return Err(Error::SeedBudget {
                    bits,
                    budget: SEED_BUDGET,
                });
            }
            let tables = SeedTables::new(params, &cnf)?;
            let hits = if p.n() <= cap.min(DEFAULT_CUBE_CAP) {
                let set = membership_bitmap(p, cap)?;
                tables.count(|z| bitmap_get(&set, z))
            } else {
                tables.count(|z| p.contains_mask(z))
            };
            (hits as u128, 1u128 << bits)
        }
        SeedMode::Strided(count) => {
            if bits < 128 && count as u128 > 1u128 << bits {
                return Err(Error::InvalidParameter(format!(
                    "strided:{count} exceeds the {bits}-bit seed space"
                )));
            }
            (strided_hits(p, &gen, count)?, count as u128)
        }
        SeedMode::Factored => {
            let n = p.n();
            if n > cap.min(FACTORED_CAP) {
                return Err(Error::EnumerationCap {
                    n,
                    cap: cap.min(FACTORED_CAP),
                });
            }
            let tables = SeedTables::new(params, &cnf)?;
            let set = membership_bitmap(p, cap)?;
            (tables.factored_count(&set)?, 1u128 << bits)
        }
    };
    Ok(GeneratorEstimate {
        mode,
        seed_bits: bits,
        seeds_used: used,
        estimate: Estimate::new(hits, used),
    })
}

fn strided_hits<S: Scalar>(p: &Polytope<S>, gen: &Generator, count: u64) -> Result<u128> {
    let narrow = p.n() <= 64;
    let chunk = 1u64 << 12;
    let hits: u64 = (0..count.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut h = 0u64;
            for t in c * chunk..((c + 1) * chunk).min(count) {
                let z = gen.generate_index(t as u128);
                let inside = if narrow {
                    p.contains_mask(z.mask())
                } else {
                    p.membership(&z).expect("generator output has length n")
                };
                h += inside as u64;
            }
            h
        })
        .sum();
    Ok(hits as u128)
}

/// One row of an experiment log. Discrepancy and the bound flag are
/// computed from the stored probabilities on demand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabReport {
    pub experiment: String,
    pub instance: String,
    pub exact: Estimate,
    pub generator: GeneratorEstimate,
    /// Target bound on the discrepancy, when one applies.
    pub bound: Option<f64>,
    pub runtime_secs: f64,
}

/// Flat view of a [`LabReport`] for JSON and CSV output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabRecord {
    pub experiment: String,
    pub instance: String,
    pub exact_probability: f64,
    pub generator_probability: f64,
    pub discrepancy: f64,
    pub bound: Option<f64>,
    pub bound_satisfied: Option<bool>,
    pub runtime_secs: f64,
    pub seed_bits: usize,
    /// Seeds covered, as a decimal string (may exceed 64 bits).
    pub seeds_used: String,
    pub exact_hits: String,
    pub generator_hits: String,
    pub mode: String,
}

impl LabReport {
    pub fn discrepancy(&self) -> f64 {
        (self.exact.probability - self.generator.estimate.probability).abs()
    }

    pub fn bound_satisfied(&self) -> Option<bool> {
        self.bound.map(|b| self.discrepancy() <= b)
    }

    pub fn record(&self) -> LabRecord {
        LabRecord {
            experiment: self.experiment.clone(),
            instance: self.instance.clone(),
            exact_probability: self.exact.probability,
            generator_probability: self.generator.estimate.probability,
            discrepancy: self.discrepancy(),
            bound: self.bound,
            bound_satisfied: self.bound_satisfied(),
            runtime_secs: self.runtime_secs,
            seed_bits: self.generator.seed_bits,
            seeds_used: self.generator.seeds_used.to_string(),
            exact_hits: self.exact.hits.to_string(),
            generator_hits: self.generator.estimate.hits.to_string(),
            mode: self.generator.mode.to_string(),
        }
    }
}

/// `|Pr_u[A u ∈ O_b] - Pr_z[A z ∈ O_b]|`, with `params.delta` as the bound.
pub fn discrepancy<S: Scalar>(
    experiment: &str,
    p: &Polytope<S>,
    params: &GeneratorParams,
    mode: SeedMode,
    cap: usize,
) -> Result<LabReport> {
    let start = std::time::Instant::now();
    let exact = exact_orthant_prob(p, cap)?;
    let generator = generator_orthant_prob(p, params, mode, cap)?;
    Ok(LabReport {
        experiment: experiment.to_string(),
        instance: format!("m={} n={}", p.m(), p.n()),
        exact,
        generator,
        bound: Some(params.delta),
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}
