//! Mollified expectations, the soft-to-hard comparison and the fidelity
//! of standardization, all by full enumeration.

use super::seeds::SeedTables;
use crate::algebra::{KWiseSpec, KWiseString};
use crate::enumerate::{bitmap_get, check_cap, gray, membership_bitmap};
use crate::error::{Error, Result};
use crate::generators::{CnfFoolerSpec, GeneratorParams};
use crate::mollifier::{approximators, ApproximatorPair, MollifierSpec};
use crate::polytope::{classify_image, dot_mask, BoundaryClass, Polytope, StandardizedPolytope};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `A x` for every cube point `x`, indexed by mask.
fn all_images(p: &Polytope<f64>) -> Vec<Vec<f64>> {
    (0..1u64 << p.n())
        .into_par_iter()
        .map(|x| p.rows().iter().map(|r| dot_mask(r, x)).collect())
        .collect()
}

fn seed_histogram(p: &Polytope<f64>, params: &GeneratorParams) -> Result<(Vec<u64>, usize)> {
    if p.n() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            actual: p.n(),
        });
    }
    let cnf = CnfFoolerSpec::from_params(params);
    let tables = SeedTables::new(params, &cnf)?;
    if tables.seed_bits() > super::SEED_BUDGET {
        return Err(Error::SeedBudget {
            bits: tables.seed_bits(),
            budget: super::SEED_BUDGET,
        });
    }
    Ok((tables.histogram()?, tables.seed_bits()))
}

/// Uniform and generator expectations of `f` over precomputed images,
/// summed in mask order.
fn expectations(values: &[f64], hist: &[u64], bits: usize) -> (f64, f64) {
    let uniform = values.iter().sum::<f64>() / values.len() as f64;
    let generated = values.iter().zip(hist).map(|(v, &h)| v * h as f64).sum::<f64>() / (1u64 << bits) as f64;
    (uniform, generated)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierReport {
    pub lambda: f64,
    pub uniform: f64,
    pub generated: f64,
    pub difference: f64,
    pub seed_bits: usize,
}

/// `|E_u[Õ(A u)] - E_z[Õ(A z)]|` for the full generator.
pub fn mollifier_discrepancy(
    p: &Polytope<f64>,
    params: &GeneratorParams,
    spec: &MollifierSpec,
) -> Result<MollifierReport> {
    check_cap(p.n(), super::seeds::FACTORED_CAP)?;
    let (hist, bits) = seed_histogram(p, params)?;
    let images = all_images(p);
    let values = images.iter().map(|v| spec.value(v)).collect::<Result<Vec<_>>>()?;
    let (uniform, generated) = expectations(&values, &hist, bits);
    Ok(MollifierReport {
        lambda: spec.lambda,
        uniform,
        generated,
        difference: (uniform - generated).abs(),
        seed_bits: bits,
    })
}

/// Every term of `|Pr_u - Pr_z| <= γ + 2δ' + Pr_u[A u ∈ Ɔ±Λ O_b]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoftToHardReport {
    pub pair: ApproximatorPair,
    pub pr_uniform: f64,
    pub pr_generated: f64,
    /// Largest mollifier discrepancy over the two approximators.
    pub gamma: f64,
    /// Largest approximation error outside the strips, over all cube images.
    pub slack: f64,
    pub boundary_mass: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub sandwich_violations: usize,
}

/// Checks the soft-to-hard inequality with measured terms, using the
/// approximators for `params.lambda`, `params.delta` and `params.c_beta`.
pub fn soft_to_hard(p: &Polytope<f64>, params: &GeneratorParams) -> Result<SoftToHardReport> {
    check_cap(p.n(), super::seeds::FACTORED_CAP)?;
    let (hist, bits) = seed_histogram(p, params)?;
    let b = p.thresholds();
    let pair = approximators(b, params.lambda, p.m(), params.delta, params.c_beta)?;
    let images = all_images(p);
    let inner = pair.inner();
    let outer = pair.outer();
    let mut hard = Vec::with_capacity(images.len());
    let mut vin = Vec::with_capacity(images.len());
    let mut vout = Vec::with_capacity(images.len());
    let mut slack = 0.0f64;
    let mut strip = 0u64;
    let mut violations = 0usize;
    for v in &images {
        let class = classify_image(v, b, pair.width);
        let inside = matches!(class, BoundaryClass::DeepInside | BoundaryClass::InnerBoundary);
        let h = if inside { 1.0 } else { 0.0 };
        let (i, o) = (inner.value(v)?, outer.value(v)?);
        if class != BoundaryClass::InnerBoundary {
            slack = slack.max((i - h).abs());
            violations += ((i - h).abs() > params.delta) as usize;
        }
        if class != BoundaryClass::OuterBoundary {
            slack = slack.max((o - h).abs());
            violations += ((o - h).abs() > params.delta) as usize;
        }
        if matches!(class, BoundaryClass::InnerBoundary | BoundaryClass::OuterBoundary) {
            strip += 1;
        }
        hard.push(h);
        vin.push(i);
        vout.push(o);
    }
    let (pu, pz) = expectations(&hard, &hist, bits);
    let (iu, iz) = expectations(&vin, &hist, bits);
    let (ou, oz) = expectations(&vout, &hist, bits);
    let gamma = (iu - iz).abs().max((ou - oz).abs());
    let boundary_mass = strip as f64 / images.len() as f64;
    let lhs = (pu - pz).abs();
    let rhs = gamma + 2.0 * slack + boundary_mass;
    Ok(SoftToHardReport {
        pair,
        pr_uniform: pu,
        pr_generated: pz,
        gamma,
        slack,
        boundary_mass,
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
        sandwich_violations: violations,
    })
}

/// Distribution used to measure standardization disagreement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Every seed of a `k`-wise uniform family.
    KWise(usize),
    /// The whole cube; used when `k >= n`.
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub family: Family,
    pub disagree: u64,
    pub total: u64,
    pub fraction: f64,
}

/// `Pr_y[1[A y <= b] != 1[A' y <= b']]` under a `k`-wise uniform `y`,
/// enumerated over all seeds (or the whole cube once `k >= n`).
pub fn standardization_disagreement(p: &Polytope<f64>, sp: &StandardizedPolytope, k: usize) -> Result<Disagreement> {
    let n = p.n();
    if sp.poly.n() != n || sp.poly.m() != p.m() {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: sp.poly.n(),
        });
    }
    let differs = |x: u64| p.contains_mask(x) != sp.poly.contains_mask(x);
    if k >= n {
        check_cap(n, crate::enumerate::DEFAULT_CUBE_CAP)?;
        let total = 1u64 << n;
        let disagree = (0..total).into_par_iter().filter(|&x| differs(x)).count() as u64;
        return Ok(Disagreement {
            family: Family::Uniform,
            disagree,
            total,
            fraction: disagree as f64 / total as f64,
        });
    }
    let spec = KWiseSpec::new(n, k)?;
    let bits = spec.seed_bits();
    if bits > super::SEED_BUDGET {
        return Err(Error::SeedBudget {
            bits,
            budget: super::SEED_BUDGET,
        });
    }
    let total = 1u64 << bits;
    let diff: Vec<u64> = membership_bitmap(p, crate::enumerate::DEFAULT_CUBE_CAP)?
        .iter()
        .zip(membership_bitmap(&sp.poly, crate::enumerate::DEFAULT_CUBE_CAP)?)
        .map(|(a, b)| a ^ b)
        .collect();
    // Each output bit is a GF(2)-linear form in the seed, so the string of
    // seed `t` is the XOR of the strings of its set bits.
    let basis: Vec<u64> = (0..bits)
        .map(|i| KWiseString::from_index(spec, 1 << i).mask())
        .collect();
    let image = |t: u64| {
        (0..bits)
            .filter(|&i| (t >> i) & 1 == 1)
            .fold(0, |acc, i| acc ^ basis[i])
    };
    let chunk = 1u64 << bits.min(14);
    let disagree = (0..total / chunk)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let mut x = image(gray(start));
            let mut hits = bitmap_get(&diff, x) as u64;
            for t in start + 1..start + chunk {
                x ^= basis[(gray(t) ^ gray(t - 1)).trailing_zeros() as usize];
                hits += bitmap_get(&diff, x) as u64;
            }
            hits
        })
        .sum();
    Ok(Disagreement {
        family: Family::KWise(k),
        disagree,
        total,
        fraction: disagree as f64 / total as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{Constants, LabSettings};
    use crate::polytope::standardize;

    fn params(n: usize) -> GeneratorParams {
        GeneratorParams::lab(
            n,
            2,
            0.25,
            0.5,
            LabSettings {
                buckets: 2,
                r_hash: 1,
                r_bucket: 1,
                r_cnf: 1,
                k: 1,
            },
            Constants::default(),
        )
        .unwrap()
    }

    #[test]
    fn flat_mollifier_limit() {
        let p = Polytope::new(vec![vec![1.0, -2.0, 1.0, 1.0, 0.5], vec![1.0; 5]], vec![0.5, 1.0]).unwrap();
        let scale = 10.0 * (6.0 + 1.0);
        let spec = MollifierSpec::new(p.thresholds().to_vec(), 1000.0 * scale).unwrap();
        let r = mollifier_discrepancy(&p, &params(5), &spec).unwrap();
        assert!(r.difference < 1e-6, "{r:?}");
        assert!((r.uniform - 0.25).abs() < 1e-3);
    }

    #[test]
    fn far_thresholds_give_one() {
        let p = Polytope::all_ones(2, 5, 50.0);
        let spec = MollifierSpec::new(vec![50.0, 50.0], 0.5).unwrap();
        let r = mollifier_discrepancy(&p, &params(5), &spec).unwrap();
        assert!(r.uniform > 1.0 - 1e-12 && r.generated > 1.0 - 1e-12);
    }

    #[test]
    fn soft_to_hard_inequality_small() {
        let p = Polytope::new(
            vec![vec![1.0, 1.0, -1.0, 1.0, 1.0], vec![2.0, -1.0, 1.0, 1.0, -1.0]],
            vec![1.0, 0.0],
        )
        .unwrap();
        let r = soft_to_hard(&p, &params(5)).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.sandwich_violations, 0);
        assert!(r.slack <= 0.25);
    }

    #[test]
    fn passthrough_has_no_disagreement() {
        let p = Polytope::new(vec![vec![3.0, 1.0, 1.0, 0.5]], vec![0.7]).unwrap();
        let sp = standardize(&p, 3, 0.5).unwrap();
        let d = standardization_disagreement(&p, &sp, 6).unwrap();
        assert_eq!(d.family, Family::Uniform);
        assert_eq!(d.disagree, 0);
    }

    #[test]
    fn kwise_family_enumeration() {
        let p = Polytope::new(vec![vec![5.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]], vec![0.5]).unwrap();
        let sp = standardize(&p, 1, 0.6).unwrap();
        let d = standardization_disagreement(&p, &sp, 2).unwrap();
        assert_eq!(d.family, Family::KWise(2));
        assert_eq!(d.total, 1 << 6);
        let direct = (0..1u64 << 6)
            .filter(|&t| {
                let x = KWiseString::from_index(KWiseSpec::new(8, 2).unwrap(), t).mask();
                p.contains_mask(x) != sp.poly.contains_mask(x)
            })
            .count() as u64;
        assert_eq!(d.disagree, direct);
    }

    #[test]
    fn gray_walk_matches_direct_draws() {
        let p = Polytope::new(
            vec![vec![1.5, -0.5, 0.3, 2.0, 0.7, -1.1, 0.2, 0.9, 1.3, -0.4]],
            vec![0.3],
        )
        .unwrap();
        let sp = standardize(&p, 3, 0.01).unwrap();
        let spec = KWiseSpec::new(10, 6).unwrap();
        let d = standardization_disagreement(&p, &sp, 6).unwrap();
        let direct = (0..1u64 << spec.seed_bits())
            .filter(|&t| {
                let x = KWiseString::from_index(spec, t).mask();
                p.contains_mask(x) != sp.poly.contains_mask(x)
            })
            .count() as u64;
        assert_eq!(d.disagree, direct);
        assert!(direct > 0);
    }
}
