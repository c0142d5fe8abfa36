//! Boundary mass of polytopes under the uniform distribution on the cube.

use crate::enumerate::count_where;
use crate::error::{Error, Result};
use crate::polytope::Polytope;
use crate::scalar::{ExactScalar, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// `5√2 · √(ln m) / √n`.
pub fn lo_bound(n: usize, m: usize) -> f64 {
    5.0 * std::f64::consts::SQRT_2 * (m as f64).ln().sqrt() / (n as f64).sqrt()
}

/// Measured boundary mass with the bound it is held against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub n: usize,
    pub m: usize,
    pub width: f64,
    pub count: u64,
    pub total: u64,
    pub fraction: f64,
    pub bound: Option<f64>,
    pub satisfied: Option<bool>,
    /// Why the bound comparison was skipped, if it was.
    pub note: Option<String>,
}

fn hypotheses<S: Scalar>(p: &Polytope<S>) -> Option<String> {
    if p.m() < 2 {
        return Some(format!("bound needs m >= 2, got m = {}", p.m()));
    }
    let one = S::one();
    if p.rows().iter().flatten().any(|&a| a.abs() < one) {
        return Some("bound needs |A_ij| >= 1 for every entry".into());
    }
    None
}

fn report(n: usize, m: usize, width: f64, count: u64, bound: Option<f64>, note: Option<String>) -> BoundaryReport {
    let total = 1u64 << n;
    let fraction = count as f64 / total as f64;
    BoundaryReport {
        n,
        m,
        width,
        count,
        total,
        fraction,
        bound,
        satisfied: bound.map(|b| fraction <= b),
        note,
    }
}

/// Fraction of points with `A u <= b` and `A_i u > b_i - width` for some `i`.
///
/// The bound `5√2·√(ln m)/√n` is compared only when `m >= 2` and every
/// weight has magnitude at least 1. Widths other than 2 are reported
/// against the same expression for reference only.
pub fn lo_boundary_fraction<S: Scalar>(p: &Polytope<S>, width: S, cap: usize) -> Result<BoundaryReport> {
    if !(width > S::zero()) {
        return Err(Error::InvalidParameter("boundary width must be positive".into()));
    }
    let b: Vec<S> = p.thresholds().to_vec();
    let inner: Vec<S> = b.iter().map(|&t| t - width).collect();
    let count = count_where(p, cap, |v| v.inside() && (0..b.len()).any(|i| !v.le(i, inner[i])))?;
    let note = hypotheses(p);
    let bound = if note.is_none() {
        Some(lo_bound(p.n(), p.m()))
    } else {
        None
    };
    Ok(report(p.n(), p.m(), width.to_f64(), count, bound, note))
}

/// The width → 0 limit: points with `A u <= b` and `A_i u = b_i` for some
/// `i`. Only exact scalars qualify.
pub fn lo_surface_fraction<S: ExactScalar>(p: &Polytope<S>, cap: usize) -> Result<BoundaryReport> {
    let b: Vec<S> = p.thresholds().to_vec();
    let count = count_where(p, cap, |v| v.inside() && (0..b.len()).any(|i| v.approx_dot(i) == b[i]))?;
    let note = hypotheses(p);
    let bound = if note.is_none() {
        Some(lo_bound(p.n(), p.m()))
    } else {
        None
    };
    Ok(report(p.n(), p.m(), 0.0, count, bound, note))
}

/// `Σ_{j<k} C(n, j)`.
pub fn binomial_prefix(n: usize, k: usize) -> u128 {
    let mut c = 1u128;
    let mut sum = 0u128;
    for j in 0..k.min(n + 1) {
        sum += c;
        c = c * (n - j) as u128 / (j + 1) as u128;
    }
    sum
}

/// Largest `k` with `C(n, <k) / 2^n <= 1 - 1/m`.
pub fn lower_bound_k(n: usize, m: usize) -> usize {
    let full = 1u128 << n;
    let mut k = 0;
    while k < n + 1 && binomial_prefix(n, k + 1) * m as u128 <= (m as u128 - 1) * full {
        k += 1;
    }
    k
}

/// Result of the randomized lower-bound construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundResult {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub rng_seed: u64,
    /// The agreement threshold `k`; each row reads `σ·u <= 2k - n`.
    pub k: usize,
    /// Best surface fraction among the random `±1` trials.
    pub random_best: f64,
    pub random_best_trial: Option<usize>,
    /// True when `m < 10` and the all-ones instance with `b = 0` is returned.
    pub fallback_used: bool,
    pub matrix: Vec<Vec<i64>>,
    pub b: Vec<i64>,
    pub surface_count: u64,
    pub fraction: f64,
    /// `fraction / (√(ln m)/√n)`.
    pub ratio: f64,
}

/// Maximum surface fraction over `trials` random `±1` matrices with
/// thresholds `2k - n`, plus the one-facet instance when `m < 10`.
pub fn lo_lowerbound_search(n: usize, m: usize, trials: usize, rng_seed: u64, cap: usize) -> Result<LowerBoundResult> {
    if m < 2 || n < 1 {
        return Err(Error::InvalidParameter("search needs m >= 2 and n >= 1".into()));
    }
    crate::enumerate::check_cap(n, cap)?;
    let k = lower_bound_k(n, m);
    let t = 2 * k as i64 - n as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut best: Option<(u64, usize, Vec<Vec<i64>>)> = None;
    for trial in 0..trials {
        let a: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
            .collect();
        let p = Polytope::new(a.clone(), vec![t; m])?;
        let count = lo_surface_fraction(&p, cap)?.count;
        if best.as_ref().is_none_or(|(c, _, _)| count > *c) {
            best = Some((count, trial, a));
        }
    }
    let scale = (m as f64).ln().sqrt() / (n as f64).sqrt();
    let total = (1u64 << n) as f64;
    let random_best = best.as_ref().map_or(0.0, |(c, _, _)| *c as f64 / total);
    let random_best_trial = best.as_ref().map(|(_, t, _)| *t);
    let fallback_used = m < 10;
    let (matrix, b, count) = if fallback_used {
        let a = vec![vec![1i64; n]; m];
        let p = Polytope::new(a.clone(), vec![0; m])?;
        let c = lo_surface_fraction(&p, cap)?.count;
        (a, vec![0; m], c)
    } else {
        let (c, _, a) = best.unwrap_or((0, 0, vec![vec![1; n]; m]));
        (a, vec![t; m], c)
    };
    let fraction = count as f64 / total;
    Ok(LowerBoundResult {
        n,
        m,
        trials,
        rng_seed,
        k,
        random_best,
        random_best_trial,
        fallback_used,
        matrix,
        b,
        surface_count: count,
        fraction,
        ratio: fraction / scale,
    })
}

/// Per row, the fraction of entries with `|A_ij| >= width/2`.
pub fn semi_thin_fraction<S: Scalar>(p: &Polytope<S>, width: S) -> Vec<f64> {
    let half = width.to_f64() / 2.0;
    p.rows()
        .iter()
        .map(|r| r.iter().filter(|a| a.to_f64().abs() >= half).count() as f64 / r.len() as f64)
        .collect()
}

/// Boundary mass at width `2λ` against `5√(2 ln m)/(α√n)` with `α` the
/// smallest per-row semi-thin fraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiThinReport {
    pub alpha: Vec<f64>,
    pub alpha_min: f64,
    pub boundary: BoundaryReport,
    pub bound: Option<f64>,
    pub satisfied: Option<bool>,
}

pub fn semi_thin_check(p: &Polytope<f64>, width: f64, cap: usize) -> Result<SemiThinReport> {
    let alpha = semi_thin_fraction(p, width);
    let alpha_min = alpha.iter().copied().fold(1.0, f64::min);
    let boundary = lo_boundary_fraction(p, width, cap)?;
    let bound = (p.m() >= 2 && alpha_min > 0.0)
        .then(|| 5.0 * (2.0 * (p.m() as f64).ln()).sqrt() / (alpha_min * (p.n() as f64).sqrt()));
    Ok(SemiThinReport {
        satisfied: bound.map(|b| boundary.fraction <= b),
        alpha,
        alpha_min,
        boundary,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> u64 {
        (1..=k).fold(1, |acc, j| acc * (n - k + j) / j)
    }

    #[test]
    fn two_all_ones_rows() {
        let p = Polytope::all_ones(2, 4, 0.0);
        let r = lo_boundary_fraction(&p, 2.0, 24).unwrap();
        assert_eq!(r.fraction, 0.375);
        let b = r.bound.unwrap();
        assert!((b - 2.944).abs() < 1e-3);
        assert_eq!(r.satisfied, Some(true));
    }

    #[test]
    fn surface_limit_and_central_binomial() {
        let p = Polytope::all_ones(1, 10, 0i64);
        let r = lo_surface_fraction(&p, 24).unwrap();
        assert_eq!(r.count, binom(10, 5));
        assert!(r.bound.is_none() && r.note.is_some());
        let narrow = lo_boundary_fraction(&Polytope::all_ones(1, 10, 0.0), 1e-9, 24).unwrap();
        assert_eq!(narrow.count, r.count);
    }

    #[test]
    fn small_weights_skip_the_bound() {
        let p = Polytope::new(vec![vec![1.0, 0.5], vec![1.0, 1.0]], vec![0.0, 0.0]).unwrap();
        let r = lo_boundary_fraction(&p, 2.0, 24).unwrap();
        assert!(r.bound.is_none());
        assert!(r.note.unwrap().contains("|A_ij|"));
    }

    #[test]
    fn k_rule_at_ten() {
        // Prefix sums of C(10, j): 1, 11, 56, 176, 386, 638, 848 out of 1024.
        assert_eq!(binomial_prefix(10, 6), 638);
        assert_eq!(binomial_prefix(10, 7), 848);
        assert_eq!(lower_bound_k(10, 4), 6);
        for n in [8, 12, 16] {
            for m in 2..20 {
                let k = lower_bound_k(n, m);
                let full = 1u128 << n;
                assert!(binomial_prefix(n, k) * m as u128 <= (m as u128 - 1) * full);
                assert!(binomial_prefix(n, k + 1) * m as u128 > (m as u128 - 1) * full);
            }
        }
    }

    #[test]
    fn small_m_falls_back_to_one_facet() {
        let r = lo_lowerbound_search(12, 4, 5, 1, 24).unwrap();
        assert!(r.fallback_used);
        assert_eq!(r.b, vec![0; 4]);
        assert_eq!(r.surface_count, binom(12, 6));
        let again = lo_lowerbound_search(12, 4, 5, 1, 24).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn random_search_for_larger_m() {
        let r = lo_lowerbound_search(12, 12, 20, 3, 24).unwrap();
        assert!(!r.fallback_used);
        assert_eq!(r.fraction, r.random_best);
        assert!(r.fraction > 0.0);
    }

    #[test]
    fn semi_thin_examples() {
        let p = Polytope::new(vec![vec![1.0; 4], vec![1.0, 0.1, 0.1, 0.1]], vec![0.0, 0.0]).unwrap();
        assert_eq!(semi_thin_fraction(&p, 2.0), vec![1.0, 0.25]);
        let r = semi_thin_check(&p, 2.0, 24).unwrap();
        assert_eq!(r.alpha_min, 0.25);
        assert_eq!(r.satisfied, Some(true));
    }
}
