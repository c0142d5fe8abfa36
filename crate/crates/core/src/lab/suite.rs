//! The fixed regression suite of small random instances.

use super::prob::{discrepancy, LabReport, SeedMode};
use super::soft::{mollifier_discrepancy, MollifierReport};
use crate::error::Result;
use crate::generators::{Constants, GeneratorParams, LabSettings};
use crate::mollifier::MollifierSpec;
use crate::polytope::Polytope;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const SUITE_SIZE: usize = 20;
pub const SUITE_SEED: u64 = 0x5eed_0001;
pub const SUITE_DELTA: f64 = 0.1;
pub const SUITE_EPS: f64 = 0.5;

/// Lab settings of the suite, 24 seed bits for every `n <= 14`.
pub fn suite_settings(n: usize) -> LabSettings {
    if n <= 8 {
        LabSettings {
            buckets: 2,
            r_hash: 2,
            r_bucket: 2,
            r_cnf: 0,
            k: 1,
        }
    } else {
        LabSettings {
            buckets: 1,
            r_hash: 1,
            r_bucket: 2,
            r_cnf: 1,
            k: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteInstance {
    pub id: String,
    pub poly: Polytope<f64>,
    pub params: GeneratorParams,
}

/// Twenty instances with `4 <= n <= 14`, `1 <= m <= 6`, small nonzero
/// integer weights and integer thresholds near the centre.
pub fn suite_instances() -> Result<Vec<SuiteInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    (0..SUITE_SIZE)
        .map(|i| {
            let n = rng.random_range(4..=14usize);
            let m = rng.random_range(1..=6usize);
            let a: Vec<Vec<f64>> = (0..m)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let v = rng.random_range(1..=3) as f64;
                            if rng.random::<bool>() {
                                v
                            } else {
                                -v
                            }
                        })
                        .collect()
                })
                .collect();
            let spread = (n as i64) / 2;
            let b: Vec<f64> = (0..m).map(|_| rng.random_range(-spread..=spread) as f64).collect();
            let poly = Polytope::new(a, b)?;
            let params = GeneratorParams::lab(n, m, SUITE_DELTA, SUITE_EPS, suite_settings(n), Constants::default())?;
            Ok(SuiteInstance {
                id: format!("suite-{i:02}"),
                poly,
                params,
            })
        })
        .collect()
}

/// Discrepancy of every suite instance under all-seeds enumeration.
pub fn run_discrepancy_suite() -> Result<Vec<LabReport>> {
    suite_instances()?
        .iter()
        .map(|s| {
            let mut r = discrepancy(&s.id, &s.poly, &s.params, SeedMode::AllSeeds, 24)?;
            r.instance = describe(&s.poly);
            Ok(r)
        })
        .collect()
}

/// Mollifier at the suite thresholds with the parameter `λ`.
pub fn run_mollifier_suite() -> Result<Vec<(String, MollifierReport)>> {
    suite_instances()?
        .iter()
        .map(|s| {
            let spec = MollifierSpec::new(s.poly.thresholds().to_vec(), s.params.lambda)?;
            Ok((s.id.clone(), mollifier_discrepancy(&s.poly, &s.params, &spec)?))
        })
        .collect()
}

pub fn describe(p: &Polytope<f64>) -> String {
    format!("m={} n={} b={:?}", p.m(), p.n(), p.thresholds())
}

/// Stored regression values for one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Golden {
    pub id: String,
    pub exact_hits: u64,
    pub generator_hits: u64,
    pub seed_bits: usize,
    pub mollifier_uniform: f64,
    pub mollifier_generated: f64,
}

pub fn compute_goldens() -> Result<Vec<Golden>> {
    let reports = run_discrepancy_suite()?;
    let moll = run_mollifier_suite()?;
    Ok(reports
        .iter()
        .zip(moll)
        .map(|(r, (_, m))| Golden {
            id: r.experiment.clone(),
            exact_hits: r.exact.hits as u64,
            generator_hits: r.generator.estimate.hits as u64,
            seed_bits: r.generator.seed_bits,
            mollifier_uniform: m.uniform,
            mollifier_generated: m.generated,
        })
        .collect())
}
