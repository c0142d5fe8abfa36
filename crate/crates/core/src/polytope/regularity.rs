use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

fn norm2(w: &[f64]) -> f64 {
    w.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `max_j |w_j| <= τ ‖w‖₂`.
pub fn is_tau_regular(w: &[f64], tau: f64) -> Result<bool> {
    let norm = norm2(w);
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let max = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(max <= tau * norm)
}

/// Indices sorted by `|w_j|` descending, ties by index ascending.
pub fn magnitude_order(w: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&i, &j| w[j].abs().total_cmp(&w[i].abs()).then(i.cmp(&j)));
    order
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalIndex {
    /// 1-based position in `order` at which the suffix becomes τ-regular,
    /// `None` when no suffix is.
    pub index: Option<usize>,
    pub order: Vec<usize>,
}

/// Least `ℓ` such that `(w_{i_ℓ}, ..., w_{i_n})` is τ-regular under the
/// magnitude order. Zero suffixes never count as regular.
pub fn critical_index(w: &[f64], tau: f64) -> Result<CriticalIndex> {
    if norm2(w) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let order = magnitude_order(w);
    let n = w.len();
    let mut suffix_sq = vec![0.0f64; n + 1];
    for pos in (0..n).rev() {
        let x = w[order[pos]];
        suffix_sq[pos] = suffix_sq[pos + 1] + x * x;
    }
    let index = (0..n)
        .find(|&pos| {
            let norm = suffix_sq[pos].sqrt();
            norm > 0.0 && w[order[pos]].abs() <= tau * norm
        })
        .map(|pos| pos + 1);
    Ok(CriticalIndex { index, order })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regularity_examples() {
        assert!(is_tau_regular(&[1.0; 4], 0.5).unwrap());
        assert!(!is_tau_regular(&[1.0; 4], 0.49).unwrap());
        assert!(!is_tau_regular(&[4.0, 2.0, 1.0, 1.0, 1.0, 1.0], 0.5).unwrap());
        assert_eq!(is_tau_regular(&[0.0, 0.0], 0.5), Err(Error::ZeroVector));
    }

    #[test]
    fn critical_index_examples() {
        assert_eq!(critical_index(&[1.0; 4], 0.5).unwrap().index, Some(1));
        let c = critical_index(&[1.0, 2.0, 1.0, 4.0, 1.0, 1.0], 0.5).unwrap();
        assert_eq!(c.index, Some(3));
        assert_eq!(&c.order[..2], &[3, 1]);
        let geometric: Vec<f64> = (0..12).rev().map(|e| (1u64 << e) as f64).collect();
        assert_eq!(critical_index(&geometric, 0.3).unwrap().index, None);
    }

    #[test]
    fn index_one_iff_regular() {
        let cases: [&[f64]; 4] = [&[1.0, -1.0, 0.5], &[3.0, 0.1], &[0.2; 9], &[5.0, -4.0, 3.0, 0.0]];
        for w in cases {
            for tau in [0.1, 0.35, 0.6, 0.9] {
                let one = critical_index(w, tau).unwrap().index == Some(1);
                assert_eq!(one, is_tau_regular(w, tau).unwrap());
            }
        }
    }

    #[test]
    fn ties_pick_lower_index() {
        assert_eq!(magnitude_order(&[1.0, -1.0, 2.0]), vec![2, 0, 1]);
    }
}
