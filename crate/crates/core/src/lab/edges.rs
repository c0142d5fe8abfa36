//! Edge-boundary counts on the cube: caps of staged intersections, the
//! boundary/interior/exterior edge split, and average sensitivity.
//!
//! An edge in direction `j` joins `a` (with `u_j = -1`) and `c` (with
//! `u_j = +1`). Under an orientation `σ` its tail is `a` when `σ_j = -1`
//! and `c` when `σ_j = +1`, so that a unate set `H` with orientation `σ`
//! is never entered along an edge.

use crate::enumerate::{bitmap_get, check_cap, membership_bitmap};
use crate::error::{Error, Result};
use crate::polytope::Polytope;
use crate::scalar::Scalar;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest dimension for edge enumeration.
pub const EDGE_CAP: usize = 20;

/// Slack for floating comparisons against closed-form bounds.
const BOUND_TOLERANCE: f64 = 1e-12;

fn edge_fold<T, I, V, M>(n: usize, init: I, visit: V, merge: M) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    V: Fn(&mut T, u64, u64, usize) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    let total = 1u64 << n;
    let chunk = (1u64 << 12).min(total);
    (0..total / chunk)
        .into_par_iter()
        .fold(&init, |mut acc, c| {
            for a in c * chunk..(c + 1) * chunk {
                let mut bits = a;
                while bits != 0 {
                    let j = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    visit(&mut acc, a, a ^ (1 << j), j);
                }
            }
            acc
        })
        .reduce(&init, &merge)
}

fn add<const K: usize>(mut a: [u64; K], b: [u64; K]) -> [u64; K] {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// `U(p) = 2p√(2 ln(1/p))`, with `U(0) = 0`.
pub fn kane_u(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        2.0 * p * (2.0 * (1.0 / p).ln()).sqrt()
    }
}

/// `2√(2 ln m)/√n`.
pub fn kane_bound(n: usize, m: usize) -> f64 {
    2.0 * (2.0 * (m as f64).ln()).sqrt() / (n as f64).sqrt()
}

/// Boundary-edge counts of the cap `C_i = (H_1 ∩ ... ∩ H_{i-1}) \ H_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapCounts {
    /// 1-based stage.
    pub index: usize,
    pub bc: u64,
    pub ec: u64,
    pub ce: u64,
    /// Cap-to-body edges; zero for every unate `H_i`.
    pub cb: u64,
    pub cap_size: u64,
    pub volume: f64,
    /// `E(C)` as an edge count.
    pub boundary_edges: u64,
    /// `BC + EC - CE` as an edge count.
    pub directed: i64,
    /// Directed boundary as a fraction of all edges.
    pub directed_fraction: f64,
    /// `U(vol C)/√n`.
    pub cap_bound: f64,
    pub cap_bound_holds: bool,
    /// `E(G ∩ H) - E(G)`, in edges.
    pub boundary_change: i64,
    /// True when `E(G ∩ H) - E(G) = BC - EC - CE` exactly.
    pub change_identity_holds: bool,
}

/// Edge fractions around the width-`w` boundary `∂F = F \ F°`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuFractions {
    pub width: f64,
    pub nu_bi: f64,
    pub nu_be: f64,
    /// Edges inside `∂F` whose endpoints leave the interior at different stages.
    pub nu_bb_prime: f64,
    /// Edges inside `∂F` whose endpoints share a stage (zero for thin strips).
    pub nu_bb_same: f64,
    pub boundary_volume: f64,
    /// `Σ_i EC(H_1 ∩ ... ∩ H_{i-1}, H_i)` over interior caps.
    pub ec_sum: f64,
    pub bb_prime_below_ec_sum: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCensus {
    pub n: usize,
    pub total_edges: u64,
    pub caps: Vec<CapCounts>,
    pub nu: Option<NuFractions>,
}

impl EdgeCensus {
    pub fn cb_total(&self) -> u64 {
        self.caps.iter().map(|c| c.cb).sum()
    }

    /// Every per-cap identity and bound held.
    pub fn all_hold(&self) -> bool {
        self.caps.iter().all(|c| {
            c.cb == 0 && c.change_identity_holds && c.cap_bound_holds && c.bc + c.ec + c.ce == c.boundary_edges
        }) && self.nu.as_ref().is_none_or(|v| v.bb_prime_below_ec_sum)
    }
}

/// Orientation of a set given as a `2^n`-bit table, or `NonUnate(index)`.
pub fn infer_orientation(n: usize, set: &[u64], index: usize) -> Result<Vec<i8>> {
    // Bit 0 of the state: some edge leaves the set towards u_j = +1.
    // Bit 1: some edge leaves it towards u_j = -1.
    let seen = edge_fold(
        n,
        || vec![0u8; n],
        |s, a, c, j| {
            let (ia, ic) = (bitmap_get(set, a), bitmap_get(set, c));
            if ia && !ic {
                s[j] |= 1;
            } else if ic && !ia {
                s[j] |= 2;
            }
        },
        |mut x, y| {
            for (p, q) in x.iter_mut().zip(y) {
                *p |= q;
            }
            x
        },
    );
    seen.into_iter()
        .map(|s| match s {
            3 => Err(Error::NonUnate(index)),
            1 => Ok(-1),
            _ => Ok(1),
        })
        .collect()
}

fn check_orientation(n: usize, set: &[u64], sigma: &[i8], index: usize) -> Result<()> {
    if sigma.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: sigma.len(),
        });
    }
    let bad = edge_fold(
        n,
        || false,
        |bad, a, c, j| {
            let (tail, head) = if sigma[j] < 0 { (a, c) } else { (c, a) };
            if !bitmap_get(set, tail) && bitmap_get(set, head) {
                *bad = true;
            }
        },
        |x, y| x || y,
    );
    if bad {
        return Err(Error::BadOrientation(index));
    }
    Ok(())
}

fn boundary_count(n: usize, set: &[u64]) -> u64 {
    edge_fold(
        n,
        || 0u64,
        |c, a, b, _| {
            if bitmap_get(set, a) != bitmap_get(set, b) {
                *c += 1;
            }
        },
        |x, y| x + y,
    )
}

fn and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn popcount(set: &[u64]) -> u64 {
    set.iter().map(|w| w.count_ones() as u64).sum()
}

fn full_set(n: usize) -> Vec<u64> {
    let bits = 1u64 << n;
    let mut v = vec![u64::MAX; bits.div_ceil(64) as usize];
    if bits < 64 {
        v[0] = (1u64 << bits) - 1;
    }
    v
}

/// Staged cap census for unate sets given as `2^n`-bit tables. Missing
/// orientations are inferred from the tables.
pub fn cap_edge_census_sets(n: usize, sets: &[Vec<u64>], orientations: &[Option<Vec<i8>>]) -> Result<EdgeCensus> {
    check_cap(n, EDGE_CAP)?;
    if orientations.len() != sets.len() {
        return Err(Error::DimensionMismatch {
            expected: sets.len(),
            actual: orientations.len(),
        });
    }
    let mut sigmas = Vec::with_capacity(sets.len());
    for (i, (set, o)) in sets.iter().zip(orientations).enumerate() {
        let sigma = match o {
            Some(s) => {
                check_orientation(n, set, s, i)?;
                s.clone()
            }
            None => infer_orientation(n, set, i)?,
        };
        sigmas.push(sigma);
    }
    let total_edges = (n as u64) << (n - 1).min(63);
    let sqrt_n = (n as f64).sqrt();
    let cube = 1u64 << n;
    let mut g = full_set(n);
    let mut g_boundary = 0u64;
    let mut caps = Vec::with_capacity(sets.len());
    for (i, h) in sets.iter().enumerate() {
        let sigma = &sigmas[i];
        let body = and(&g, h);
        let [bc, ec, ce, cb, cap_edges] = edge_fold(
            n,
            || [0u64; 5],
            |s, a, c, j| {
                let (tail, head) = if sigma[j] < 0 { (a, c) } else { (c, a) };
                let tg = bitmap_get(&g, tail);
                let hg = bitmap_get(&g, head);
                let tb = tg && bitmap_get(&body, tail);
                let hb = hg && bitmap_get(&body, head);
                let tc = tg && !tb;
                let hc = hg && !hb;
                if tb && hc {
                    s[0] += 1;
                } else if !tg && hc {
                    s[1] += 1;
                } else if tc && !hg {
                    s[2] += 1;
                } else if tc && hb {
                    s[3] += 1;
                }
                if tc != hc {
                    s[4] += 1;
                }
            },
            add,
        );
        let cap_size = popcount(&g) - popcount(&body);
        let volume = cap_size as f64 / cube as f64;
        let directed = bc as i64 + ec as i64 - ce as i64;
        let directed_fraction = directed as f64 / total_edges as f64;
        let cap_bound = kane_u(volume) / sqrt_n;
        let body_boundary = boundary_count(n, &body);
        let change = body_boundary as i64 - g_boundary as i64;
        caps.push(CapCounts {
            index: i + 1,
            bc,
            ec,
            ce,
            cb,
            cap_size,
            volume,
            boundary_edges: cap_edges,
            directed,
            directed_fraction,
            cap_bound,
            cap_bound_holds: directed_fraction <= cap_bound + BOUND_TOLERANCE,
            boundary_change: change,
            change_identity_holds: change == bc as i64 - ec as i64 - ce as i64,
        });
        g = body;
        g_boundary = body_boundary;
    }
    Ok(EdgeCensus {
        n,
        total_edges,
        caps,
        nu: None,
    })
}

fn row_sets<S: Scalar>(p: &Polytope<S>, shift: S) -> Result<Vec<Vec<u64>>> {
    (0..p.m())
        .map(|i| {
            let h = Polytope::new(vec![p.row(i).to_vec()], vec![p.thresholds()[i] - shift])?;
            membership_bitmap(&h, EDGE_CAP)
        })
        .collect()
}

/// `σ_j = -sign(A_ij)`, with `+1` for zero weights.
pub fn halfspace_orientation<S: Scalar>(row: &[S]) -> Vec<i8> {
    row.iter().map(|&a| if a > S::zero() { -1 } else { 1 }).collect()
}

/// Cap census of the rows of `p`, taken in order. Orientations default to
/// the weight signs.
pub fn cap_edge_census<S: Scalar>(p: &Polytope<S>, orientations: Option<&[Vec<i8>]>) -> Result<EdgeCensus> {
    check_cap(p.n(), EDGE_CAP)?;
    let sets = row_sets(p, S::zero())?;
    let o: Vec<Option<Vec<i8>>> = match orientations {
        Some(o) => o.iter().cloned().map(Some).collect(),
        None => p.rows().iter().map(|r| Some(halfspace_orientation(r))).collect(),
    };
    cap_edge_census_sets(p.n(), &sets, &o)
}

/// Caps of the interiors `H_i = {A_i u <= b_i - width}` together with the
/// split of edges touching `∂F`.
pub fn boundary_edge_census<S: Scalar>(p: &Polytope<S>, width: S) -> Result<EdgeCensus> {
    let n = p.n();
    check_cap(n, EDGE_CAP)?;
    let interior = row_sets(p, width)?;
    let closed = row_sets(p, S::zero())?;
    let o: Vec<Option<Vec<i8>>> = p.rows().iter().map(|r| Some(halfspace_orientation(r))).collect();
    let mut census = cap_edge_census_sets(n, &interior, &o)?;
    let f = closed.iter().skip(1).fold(closed[0].clone(), |acc, s| and(&acc, s));
    let fo = interior.iter().skip(1).fold(interior[0].clone(), |acc, s| and(&acc, s));
    let stage = |x: u64| interior.iter().position(|s| !bitmap_get(s, x));
    let [bi, be, bbp, bbs] = edge_fold(
        n,
        || [0u64; 4],
        |s, a, c, _| {
            let a_in_f = bitmap_get(&f, a);
            let c_in_f = bitmap_get(&f, c);
            let a_bd = a_in_f && !bitmap_get(&fo, a);
            let c_bd = c_in_f && !bitmap_get(&fo, c);
            match (a_bd, c_bd) {
                (true, true) => {
                    if stage(a) != stage(c) {
                        s[2] += 1;
                    } else {
                        s[3] += 1;
                    }
                }
                (true, false) | (false, true) => {
                    let other_in_f = if a_bd { c_in_f } else { a_in_f };
                    if other_in_f {
                        s[0] += 1;
                    } else {
                        s[1] += 1;
                    }
                }
                _ => {}
            }
        },
        add,
    );
    let total = census.total_edges as f64;
    let boundary_points = popcount(&f) - popcount(&fo);
    let ec_sum = census.caps.iter().map(|c| c.ec).sum::<u64>();
    census.nu = Some(NuFractions {
        width: width.to_f64(),
        nu_bi: bi as f64 / total,
        nu_be: be as f64 / total,
        nu_bb_prime: bbp as f64 / total,
        nu_bb_same: bbs as f64 / total,
        boundary_volume: boundary_points as f64 / (1u64 << n) as f64,
        ec_sum: ec_sum as f64 / total,
        bb_prime_below_ec_sum: bbp <= ec_sum,
    });
    Ok(census)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub n: usize,
    pub m: usize,
    pub boundary_edges: u64,
    pub total_edges: u64,
    /// `E(F)`; the average sensitivity is `n` times this.
    pub fraction: f64,
    pub bound: Option<f64>,
    pub satisfied: Option<bool>,
}

/// Fraction of cube edges with exactly one endpoint in `{A u <= b}`.
pub fn average_sensitivity<S: Scalar>(p: &Polytope<S>) -> Result<SensitivityReport> {
    let n = p.n();
    check_cap(n, EDGE_CAP)?;
    let f = membership_bitmap(p, EDGE_CAP)?;
    let boundary_edges = boundary_count(n, &f);
    let total_edges = (n as u64) << (n - 1);
    let fraction = boundary_edges as f64 / total_edges as f64;
    let bound = (p.m() >= 2).then(|| kane_bound(n, p.m()));
    Ok(SensitivityReport {
        n,
        m: p.m(),
        boundary_edges,
        total_edges,
        fraction,
        bound,
        satisfied: bound.map(|b| fraction <= b + BOUND_TOLERANCE),
    })
}
