//! Exhaustive walks over `{-1,+1}^n` in Gray-code order.
//!
//! Point `t` of a walk is the mask `t ^ (t >> 1)`; step `t -> t+1` flips a
//! single coordinate, so every row's dot product is updated with one
//! addition. Floating-point rows keep a guard band around each queried
//! threshold: when the running value is within the guard, the decision is
//! recomputed with the naive left-to-right sum used by
//! [`Polytope::contains_mask`], so decisions are bit-identical to direct
//! evaluation. Rows with exact arithmetic (integer scalars or coarse dyadic
//! `f64` data) use a zero guard.
//!
//! The cube is split into contiguous chunks of walk positions that are
//! processed in parallel and merged by the caller's reduction, which should
//! be exact (integer counts) so the result does not depend on the split.

use crate::error::{Error, Result};
use crate::polytope::{dot_mask, Polytope};
use crate::scalar::{is_coarse_dyadic, Scalar};
use rayon::prelude::*;

/// Largest dimension accepted by default.
pub const DEFAULT_CUBE_CAP: usize = 24;

/// Steps between full recomputations of floating-point dot products.
const RESYNC: u64 = 256;

/// Walk positions per parallel chunk (at least).
const MIN_CHUNK: u64 = 1 << 14;

#[inline]
pub fn gray(t: u64) -> u64 {
    t ^ (t >> 1)
}

/// Refuses dimensions above `cap`.
pub fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap || n > 40 {
        return Err(Error::EnumerationCap { n, cap: cap.min(40) });
    }
    Ok(())
}

/// The current point of a walk and its row images.
pub struct PointView<'a, S> {
    poly: &'a Polytope<S>,
    guard: &'a [f64],
    mask: u64,
    dots: &'a [S],
}

impl<'a, S: Scalar> PointView<'a, S> {
    /// Packed point: bit `j` set means `u_j = -1`.
    #[inline]
    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Running value of `A_i · u`. Within rounding of the exact value.
    #[inline]
    pub fn approx_dot(&self, i: usize) -> S {
        self.dots[i]
    }

    /// `A_i · u` by direct summation.
    pub fn exact_dot(&self, i: usize) -> S {
        dot_mask(self.poly.row(i), self.mask)
    }

    /// Decision `A_i · u <= theta`, identical to direct summation.
    #[inline]
    pub fn le(&self, i: usize, theta: S) -> bool {
        let d = self.dots[i];
        let g = self.guard[i];
        if g > 0.0 && (d.to_f64() - theta.to_f64()).abs() <= g {
            return dot_mask(self.poly.row(i), self.mask) <= theta;
        }
        d <= theta
    }

    /// Decision `A_i · u < theta`.
    #[inline]
    pub fn lt(&self, i: usize, theta: S) -> bool {
        let d = self.dots[i];
        let g = self.guard[i];
        if g > 0.0 && (d.to_f64() - theta.to_f64()).abs() <= g {
            return dot_mask(self.poly.row(i), self.mask) < theta;
        }
        d < theta
    }

    /// `A u <= b`.
    #[inline]
    pub fn inside(&self) -> bool {
        let b = self.poly.thresholds();
        (0..b.len()).all(|i| self.le(i, b[i]))
    }

    /// `A u <= b + shift·1`.
    pub fn inside_shifted(&self, shift: S) -> bool {
        let b = self.poly.thresholds();
        (0..b.len()).all(|i| self.le(i, b[i] + shift))
    }
}

fn row_guard<S: Scalar>(row: &[S], n: usize) -> f64 {
    if S::ROUNDING == 0.0 {
        return 0.0;
    }
    let l1: f64 = row.iter().map(|x| x.to_f64().abs()).sum();
    let dyadic = S::ROUNDING <= f64::EPSILON
        && row.iter().all(|x| is_coarse_dyadic(x.to_f64()))
        && l1 * 1024.0 < (1u64 << 52) as f64;
    if dyadic {
        return 0.0;
    }
    (RESYNC as f64 + 2.0 * n as f64 + 2.0) * S::ROUNDING * l1 * 1.0625 + f64::MIN_POSITIVE
}

/// Walks every point of the cube of `poly`, folding each into a per-chunk
/// accumulator and reducing the chunks with `merge`.
pub fn walk<S, T, I, V, M>(poly: &Polytope<S>, cap: usize, init: I, visit: V, merge: M) -> Result<T>
where
    S: Scalar,
    T: Send,
    I: Fn() -> T + Sync + Send,
    V: Fn(&mut T, &PointView<'_, S>) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    let n = poly.n();
    check_cap(n, cap)?;
    let total = 1u64 << n;
    let guards: Vec<f64> = poly.rows().iter().map(|r| row_guard(r, n)).collect();
    let threads = rayon::current_num_threads().max(1) as u64;
    let chunk = (total / (threads * 8)).max(MIN_CHUNK).min(total);
    let chunks: Vec<(u64, u64)> = (0..total.div_ceil(chunk))
        .map(|c| (c * chunk, ((c + 1) * chunk).min(total)))
        .collect();
    let result = chunks
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = init();
            walk_range(poly, &guards, lo, hi, &mut acc, &visit);
            acc
        })
        .reduce_with(&merge)
        .expect("at least one chunk");
    Ok(result)
}

fn walk_range<S, T, V>(poly: &Polytope<S>, guards: &[f64], lo: u64, hi: u64, acc: &mut T, visit: &V)
where
    S: Scalar,
    V: Fn(&mut T, &PointView<'_, S>),
{
    let m = poly.m();
    let exact = guards.iter().all(|&g| g == 0.0);
    let mut mask = gray(lo);
    let mut dots: Vec<S> = (0..m).map(|i| dot_mask(poly.row(i), mask)).collect();
    let mut since = 0u64;
    let mut t = lo;
    loop {
        visit(
            acc,
            &PointView {
                poly,
                guard: guards,
                mask,
                dots: &dots,
            },
        );
        t += 1;
        if t >= hi {
            break;
        }
        let j = t.trailing_zeros() as usize;
        let was_minus = (mask >> j) & 1 == 1;
        mask ^= 1u64 << j;
        since += 1;
        if !exact && since >= RESYNC {
            for (i, d) in dots.iter_mut().enumerate() {
                *d = dot_mask(poly.row(i), mask);
            }
            since = 0;
            continue;
        }
        for (i, d) in dots.iter_mut().enumerate() {
            let a = poly.row(i)[j];
            let twice = a + a;
            *d = if was_minus { *d + twice } else { *d - twice };
        }
    }
}

/// Number of cube points satisfying `pred`, by exact integer reduction.
pub fn count_where<S, P>(poly: &Polytope<S>, cap: usize, pred: P) -> Result<u64>
where
    S: Scalar,
    P: Fn(&PointView<'_, S>) -> bool + Sync + Send,
{
    walk(
        poly,
        cap,
        || 0u64,
        |c, p| {
            if pred(p) {
                *c += 1;
            }
        },
        |a, b| a + b,
    )
}

/// Packed membership table: bit `mask` is set iff the point lies in the
/// polytope. `2^n` bits.
pub fn membership_bitmap<S: Scalar>(poly: &Polytope<S>, cap: usize) -> Result<Vec<u64>> {
    let n = poly.n();
    check_cap(n, cap)?;
    let words = ((1u64 << n).div_ceil(64)) as usize;
    let parts: Vec<(usize, u64)> = walk(
        poly,
        cap,
        Vec::new,
        |v: &mut Vec<(usize, u64)>, p| {
            if p.inside() {
                let mask = p.mask();
                v.push(((mask >> 6) as usize, 1u64 << (mask & 63)));
            }
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    )?;
    let mut bits = vec![0u64; words];
    for (w, bit) in parts {
        bits[w] |= bit;
    }
    Ok(bits)
}

#[inline]
pub fn bitmap_get(bits: &[u64], mask: u64) -> bool {
    (bits[(mask >> 6) as usize] >> (mask & 63)) & 1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn xorshift(state: &mut u64) -> u64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        *state
    }

    #[test]
    fn gray_walk_visits_every_point_once() {
        let p = Polytope::all_ones(1, 10, 0i64);
        let seen = walk(
            &p,
            24,
            || vec![0u8; 1 << 10],
            |v, pt| v[pt.mask() as usize] += 1,
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
        .unwrap();
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn float_decisions_match_direct_evaluation() {
        let mut s = 0x1234_5678_9abc_def1u64;
        for _ in 0..6 {
            let n = 15;
            let a: Vec<Vec<f64>> = (0..3)
                .map(|_| {
                    (0..n)
                        .map(|_| (xorshift(&mut s) % 20000) as f64 / 7919.0 - 1.26)
                        .collect()
                })
                .collect();
            let b: Vec<f64> = (0..3).map(|_| (xorshift(&mut s) % 100) as f64 / 37.0 - 1.3).collect();
            let p = Polytope::new(a, b).unwrap();
            let walked = count_where(&p, 24, |pt| pt.inside()).unwrap();
            let direct = (0..1u64 << n).filter(|&x| p.contains_mask(x)).count() as u64;
            assert_eq!(walked, direct);
        }
    }

    #[test]
    fn ties_at_the_threshold_are_exact() {
        // 0.1 is not dyadic, so incremental sums drift; thresholds placed on
        // achievable sums force the guard path.
        let p = Polytope::new(vec![vec![0.1; 16], vec![0.3; 16]], vec![0.0, 0.6]).unwrap();
        let walked = membership_bitmap(&p, 24).unwrap();
        for x in 0..1u64 << 16 {
            assert_eq!(bitmap_get(&walked, x), p.contains_mask(x), "mask {x}");
        }
    }

    #[test]
    fn exact_scalars_agree() {
        let a = vec![vec![
            Rational64::new(1, 3),
            Rational64::new(-2, 7),
            Rational64::new(5, 6),
            Rational64::from_integer(1),
        ]];
        let p = Polytope::new(a, vec![Rational64::new(1, 5)]).unwrap();
        let walked = count_where(&p, 24, |pt| pt.inside()).unwrap();
        let direct = (0..16).filter(|&x| p.contains_mask(x)).count() as u64;
        assert_eq!(walked, direct);
    }

    #[test]
    fn cap_is_enforced() {
        let p = Polytope::all_ones(1, 30, 0i64);
        assert!(matches!(
            count_where(&p, 24, |_| true),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn counts_are_independent_of_the_split() {
        let p = Polytope::new(vec![vec![1.5, -0.25, 0.75, 2.0, -1.0, 0.5]], vec![0.3]).unwrap();
        let a = count_where(&p, 24, |pt| pt.inside()).unwrap();
        let mut b = 0;
        let guards = vec![row_guard(p.row(0), 6)];
        for (lo, hi) in [(0u64, 5u64), (5, 33), (33, 64)] {
            walk_range(&p, &guards, lo, hi, &mut b, &|c: &mut u64, pt: &PointView<'_, f64>| {
                if pt.inside() {
                    *c += 1
                }
            });
        }
        assert_eq!(a, b);
    }
}
