use super::Polytope;
use crate::error::Result;
use crate::scalar::Halvable;

/// Rewrites `A01 x <= b01` over `{0,1}^n` for `u ∈ {-1,+1}^n` using
/// `x = (1 + u)/2`: `A' = A01/2`, `b' = b01 - (A01 · 1)/2`.
///
/// Coordinate `x_j = 0` corresponds to `u_j = -1`.
pub fn zero_one_transform<S: Halvable>(a01: &[Vec<S>], b01: &[S]) -> Result<Polytope<S>> {
    let a: Vec<Vec<S>> = a01.iter().map(|r| r.iter().map(|&x| x.half()).collect()).collect();
    let b: Vec<S> = a01
        .iter()
        .zip(b01)
        .map(|(r, &t)| t - r.iter().fold(S::zero(), |acc, &x| acc + x).half())
        .collect();
    Polytope::new(a, b)
}

/// Packed `{0,1}` point for the packed `±1` mask: `x_j = 1` iff `u_j = +1`.
pub fn zero_one_point(n: usize, mask: u64) -> u64 {
    !mask & if n == 64 { u64::MAX } else { (1u64 << n) - 1 }
}
