//! Rewriting every row as Head plus a τ-regular Tail of unit 2-norm.
//!
//! A row whose τ-critical index `ℓ` is at most `k` is already
//! (k,τ)-regular: its Head is the first `ℓ - 1` coordinates in magnitude
//! order, so the Tail is exactly the regular suffix, and it is only
//! rescaled. Any other row keeps its `k` largest coordinates, the rest
//! are replaced by a common small `η > 0` and the row is rescaled so that
//! the tail has norm 1. Before perturbing, the threshold is moved up to the
//! midpoint between `θ` and the next achievable head value above it, so the
//! perturbation cannot flip a point whose head value sits exactly at `θ`.

use super::regularity::{critical_index, is_tau_regular, magnitude_order};
use super::Polytope;
use crate::enumerate::count_where;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest dimension at which perturbations are verified by enumeration.
pub const VERIFY_CAP: usize = 24;
/// Largest head for which the threshold shift is computed.
const SHIFT_CAP: usize = 24;
const MAX_HALVINGS: u32 = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowDecomposition {
    pub head: Vec<usize>,
    pub tail: Vec<usize>,
    pub tail_norm: f64,
    /// 1-based τ-critical index of the input row, `None` for infinity.
    pub critical_index: Option<usize>,
    /// Whether the output tail is τ-regular.
    pub tail_regular: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "tag")]
pub enum Provenance {
    Rescaled {
        scale: f64,
    },
    TruncatedPerturbed {
        eta: f64,
        scale: f64,
        threshold_shifted: bool,
        verified: bool,
        halvings: u32,
    },
    /// `k > n/2`: the row is passed through unchanged.
    Passthrough,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StandardizedPolytope {
    pub poly: Polytope<f64>,
    pub rows: Vec<RowDecomposition>,
    pub provenance: Vec<Provenance>,
    pub k: usize,
    pub tau: f64,
    pub trivial_regime: bool,
    pub warnings: Vec<String>,
}

fn naive_dot(row: &[f64], idx: &[usize], mask: u64) -> f64 {
    let mut acc = 0.0;
    for (bit, &j) in idx.iter().enumerate() {
        if (mask >> bit) & 1 == 1 {
            acc -= row[j];
        } else {
            acc += row[j];
        }
    }
    acc
}

/// Smallest head value strictly above `theta`, if the head is small enough
/// to enumerate. `Some(None)` means no head value exceeds `theta`.
fn next_head_value(row: &[f64], head: &[usize], theta: f64) -> Option<Option<f64>> {
    if head.len() > SHIFT_CAP {
        return None;
    }
    let mut sorted = head.to_vec();
    sorted.sort_unstable();
    let mut best: Option<f64> = None;
    for mask in 0..1u64 << sorted.len() {
        let v = naive_dot(row, &sorted, mask);
        if v > theta && best.is_none_or(|b| v < b) {
            best = Some(v);
        }
    }
    Some(best)
}

struct Truncated {
    row: Vec<f64>,
    b: f64,
    provenance: Provenance,
    warning: Option<String>,
}

fn truncate_row(row: &[f64], theta: f64, head: &[usize], tail: &[usize]) -> Result<Truncated> {
    let n = row.len();
    let t = tail.len() as f64;
    let l1: f64 = row.iter().map(|x| x.abs()).sum();
    let mut shifted = false;
    let mut theta_new = theta;
    match next_head_value(row, head, theta) {
        Some(Some(next)) => {
            theta_new = theta + (next - theta) / 2.0;
            shifted = true;
        }
        Some(None) => {
            theta_new = theta + l1 + 1.0;
            shifted = true;
        }
        None => {}
    }
    let mut head_row = vec![0.0; n];
    for &j in head {
        head_row[j] = row[j];
    }
    let target = Polytope::new(vec![head_row.clone()], vec![theta])?;
    let mut eta = (-40f64).exp2() * (theta.abs() + l1 + 1.0) / t;
    let mut halvings = 0;
    loop {
        let scale = 1.0 / (eta * t.sqrt());
        let mut out = vec![0.0; n];
        for &j in head {
            out[j] = row[j] * scale;
        }
        for &j in tail {
            out[j] = eta * scale;
        }
        let b = theta_new * scale;
        if n > VERIFY_CAP {
            return Ok(Truncated {
                row: out,
                b,
                provenance: Provenance::TruncatedPerturbed {
                    eta,
                    scale,
                    threshold_shifted: shifted,
                    verified: false,
                    halvings,
                },
                warning: Some(format!(
                    "perturbation accepted without verification at n = {n} > {VERIFY_CAP}"
                )),
            });
        }
        let both = Polytope::new(vec![target.row(0).to_vec(), out.clone()], vec![theta, b])?;
        let disagree = count_where(&both, VERIFY_CAP, |p| p.le(0, theta) != p.le(1, b))?;
        if disagree == 0 {
            return Ok(Truncated {
                row: out,
                b,
                provenance: Provenance::TruncatedPerturbed {
                    eta,
                    scale,
                    threshold_shifted: shifted,
                    verified: true,
                    halvings,
                },
                warning: None,
            });
        }
        if halvings == MAX_HALVINGS {
            return Err(Error::InvalidParameter(format!(
                "perturbation changed the row function after {MAX_HALVINGS} halvings"
            )));
        }
        eta /= 2.0;
        halvings += 1;
    }
}

/// Standardizes every row of `p` with head budget `k` and regularity `tau`.
pub fn standardize(p: &Polytope<f64>, k: usize, tau: f64) -> Result<StandardizedPolytope> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter("tau must be positive".into()));
    }
    let n = p.n();
    if 2 * k > n {
        let rows = p
            .rows()
            .iter()
            .map(|row| {
                let ci = critical_index(row, tau).ok().and_then(|c| c.index);
                RowDecomposition {
                    head: Vec::new(),
                    tail: (0..n).collect(),
                    tail_norm: row.iter().map(|x| x * x).sum::<f64>().sqrt(),
                    critical_index: ci,
                    tail_regular: is_tau_regular(row, tau).unwrap_or(false),
                }
            })
            .collect();
        return Ok(StandardizedPolytope {
            poly: p.clone(),
            rows,
            provenance: vec![Provenance::Passthrough; p.m()],
            k,
            tau,
            trivial_regime: true,
            warnings: vec![format!("k = {k} exceeds n/2 = {}; rows passed through", n as f64 / 2.0)],
        });
    }
    let mut a = Vec::with_capacity(p.m());
    let mut b = Vec::with_capacity(p.m());
    let mut rows = Vec::with_capacity(p.m());
    let mut provenance = Vec::with_capacity(p.m());
    let mut warnings = Vec::new();
    for (i, row) in p.rows().iter().enumerate() {
        let theta = p.thresholds()[i];
        let ci = match critical_index(row, tau) {
            Ok(c) => c,
            Err(Error::ZeroVector) => crate::polytope::CriticalIndex {
                index: None,
                order: magnitude_order(row),
            },
            Err(e) => return Err(e),
        };
        let regular_at = ci.index.filter(|&l| l <= k);
        let (head, out_row, out_b, prov) = if let Some(l) = regular_at {
            let head: Vec<usize> = ci.order[..l - 1].to_vec();
            let tail_sq: f64 = ci.order[l - 1..].iter().map(|&j| row[j] * row[j]).sum();
            let scale = 1.0 / tail_sq.sqrt();
            let out: Vec<f64> = row.iter().map(|x| x * scale).collect();
            (head, out, theta * scale, Provenance::Rescaled { scale })
        } else {
            let head: Vec<usize> = ci.order[..k].to_vec();
            let tail: Vec<usize> = ci.order[k..].to_vec();
            let t = truncate_row(row, theta, &head, &tail)?;
            if let Some(w) = t.warning {
                warnings.push(format!("row {i}: {w}"));
            }
            (head, t.row, t.b, t.provenance)
        };
        let mut head_sorted = head.clone();
        head_sorted.sort_unstable();
        let tail: Vec<usize> = (0..n).filter(|j| !head_sorted.contains(j)).collect();
        let tail_vec: Vec<f64> = tail.iter().map(|&j| out_row[j]).collect();
        let tail_norm = tail_vec.iter().map(|x| x * x).sum::<f64>().sqrt();
        let tail_regular = is_tau_regular(&tail_vec, tau).unwrap_or(false);
        if !tail_regular {
            warnings.push(format!("row {i}: tail is not {tau}-regular"));
        }
        rows.push(RowDecomposition {
            head: head_sorted,
            tail,
            tail_norm,
            critical_index: ci.index,
            tail_regular,
        });
        provenance.push(prov);
        a.push(out_row);
        b.push(out_b);
    }
    Ok(StandardizedPolytope {
        poly: Polytope::new(a, b)?,
        rows,
        provenance,
        k,
        tau,
        trivial_regime: false,
        warnings,
    })
}

/// `H` keeps head entries and `T` tail entries; `H + T = A'` entrywise.
pub fn head_tail_matrices(sp: &StandardizedPolytope) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = sp.poly.n();
    let mut h = Vec::with_capacity(sp.poly.m());
    let mut t = Vec::with_capacity(sp.poly.m());
    for (row, dec) in sp.poly.rows().iter().zip(&sp.rows) {
        let mut hr = vec![0.0; n];
        let mut tr = row.clone();
        for &j in &dec.head {
            hr[j] = row[j];
            tr[j] = 0.0;
        }
        h.push(hr);
        t.push(tr);
    }
    (h, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_row_is_rescaled() {
        let p = Polytope::new(vec![vec![1.0; 4]], vec![0.0]).unwrap();
        let sp = standardize(&p, 2, 0.6).unwrap();
        assert_eq!(sp.poly.row(0), &[0.5; 4]);
        assert_eq!(sp.poly.thresholds(), &[0.0]);
        assert!(sp.rows[0].head.is_empty());
        assert_eq!(sp.provenance[0], Provenance::Rescaled { scale: 0.5 });
    }

    #[test]
    fn dominant_coordinate_decides_after_truncation() {
        let mut row = vec![1.0; 10];
        row[0] = 100.0;
        let p = Polytope::new(vec![row], vec![0.0]).unwrap();
        let sp = standardize(&p, 1, 0.4).unwrap();
        assert_eq!(sp.rows[0].head, vec![0]);
        assert!(matches!(
            sp.provenance[0],
            Provenance::TruncatedPerturbed { verified: true, .. }
        ));
        assert!((sp.rows[0].tail_norm - 1.0).abs() < 1e-12);
        for mask in 0..1u64 << 10 {
            assert_eq!(sp.poly.contains_mask(mask), mask & 1 == 1, "mask {mask}");
        }
    }

    #[test]
    fn tie_picks_lower_index() {
        let mut row = vec![0.0; 6];
        row[2] = 5.0;
        row[4] = 5.0;
        row[5] = 0.1;
        let p = Polytope::new(vec![row], vec![0.0]).unwrap();
        let sp = standardize(&p, 1, 0.3).unwrap();
        assert_eq!(sp.rows[0].head, vec![2]);
        let q = Polytope::new(vec![vec![1.0, 1.0, 0.0, 0.0]], vec![0.0]).unwrap();
        assert_eq!(standardize(&q, 1, 0.1).unwrap().rows[0].head, vec![0]);
    }

    #[test]
    fn head_value_on_threshold_is_preserved() {
        // Head (3, 2) takes the value 1 = θ; without the shift the tail
        // perturbation would push those points out.
        let p = Polytope::new(vec![vec![3.0, -2.0, 0.0, 0.0, 0.0, 0.0]], vec![1.0]).unwrap();
        let sp = standardize(&p, 2, 0.2).unwrap();
        match &sp.provenance[0] {
            Provenance::TruncatedPerturbed {
                threshold_shifted,
                verified,
                ..
            } => {
                assert!(*threshold_shifted && *verified);
            }
            other => panic!("unexpected {other:?}"),
        }
        for mask in 0..64u64 {
            assert_eq!(sp.poly.contains_mask(mask), p.contains_mask(mask));
        }
    }

    #[test]
    fn large_k_is_a_flagged_passthrough() {
        let p = Polytope::new(vec![vec![1.0, 2.0, 3.0]], vec![0.5]).unwrap();
        let sp = standardize(&p, 2, 0.5).unwrap();
        assert!(sp.trivial_regime);
        assert_eq!(sp.poly, p);
        assert_eq!(sp.provenance, vec![Provenance::Passthrough]);
    }

    #[test]
    fn head_plus_tail_reconstructs() {
        let p = Polytope::new(
            vec![
                vec![8.0, 0.5, -0.25, 0.3, 0.1, 0.2, -0.1, 0.05],
                vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
                vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            ],
            vec![0.7, 0.0, 1.0],
        )
        .unwrap();
        let sp = standardize(&p, 2, 0.45).unwrap();
        let (h, t) = head_tail_matrices(&sp);
        for i in 0..3 {
            for j in 0..8 {
                assert_eq!((h[i][j] + t[i][j]).to_bits(), sp.poly.row(i)[j].to_bits());
            }
            let norm = t[i].iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() <= 1e-12, "row {i} tail norm {norm}");
        }
        // The all-zero row with b = 1 is constant true and must stay so.
        let zero_row = Polytope::new(vec![sp.poly.row(2).to_vec()], vec![sp.poly.thresholds()[2]]).unwrap();
        assert!((0..256).all(|x| zero_row.contains_mask(x)));
    }
}
