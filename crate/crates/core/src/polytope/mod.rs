//! Intersections of halfspaces over `{-1,+1}^n`, their boundary strips,
//! regularity structure and the standardization transform.

pub mod io;
pub mod regularity;
pub mod standardize;
pub mod transform;

pub use io::{load_polytope, parse_polytope, Domain, PolytopeDoc};
pub use regularity::{critical_index, is_tau_regular, CriticalIndex};
pub use standardize::{head_tail_matrices, standardize, Provenance, RowDecomposition, StandardizedPolytope};
pub use transform::zero_one_transform;

use crate::cube::CubePoint;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// `{u : A u <= b}` with `A` an `m x n` weight matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polytope<S> {
    #[serde(rename = "A")]
    a: Vec<Vec<S>>,
    b: Vec<S>,
}

/// Position of a point relative to `O_b` and the strip of width `Λ` around
/// its surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryClass {
    DeepInside,
    InnerBoundary,
    OuterBoundary,
    Outside,
}

/// Naive left-to-right `Σ ±a_j` with bit `j` of `mask` selecting `-1`.
/// Every exact decision in the crate goes through this summation order.
#[inline]
pub(crate) fn dot_mask<S: Scalar>(row: &[S], mask: u64) -> S {
    let mut acc = S::zero();
    for (j, &a) in row.iter().enumerate() {
        if (mask >> j) & 1 == 1 {
            acc = acc - a;
        } else {
            acc = acc + a;
        }
    }
    acc
}

impl<S: Scalar> Polytope<S> {
    pub fn new(a: Vec<Vec<S>>, b: Vec<S>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidParameter("polytope needs at least one row".into()));
        }
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                actual: b.len(),
            });
        }
        let n = a[0].len();
        if n == 0 {
            return Err(Error::InvalidParameter("polytope needs at least one column".into()));
        }
        for row in &a {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
        }
        if a.iter().flatten().chain(&b).any(|x| !x.is_finite_value()) {
            return Err(Error::NonFinite);
        }
        Ok(Polytope { a, b })
    }

    /// `m` rows of `n` ones with the given threshold.
    pub fn all_ones(m: usize, n: usize, b: S) -> Self {
        Polytope::new(vec![vec![S::one(); n]; m], vec![b; m]).expect("valid shape")
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn n(&self) -> usize {
        self.a[0].len()
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.a
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.a[i]
    }

    pub fn thresholds(&self) -> &[S] {
        &self.b
    }

    pub fn with_thresholds(&self, b: Vec<S>) -> Result<Self> {
        Polytope::new(self.a.clone(), b)
    }

    /// `‖A_i‖₁`.
    pub fn row_l1(&self, i: usize) -> S {
        self.a[i].iter().fold(S::zero(), |acc, &x| acc + x.abs())
    }

    pub fn to_f64(&self) -> Polytope<f64> {
        Polytope {
            a: self.a.iter().map(|r| r.iter().map(|x| x.to_f64()).collect()).collect(),
            b: self.b.iter().map(|x| x.to_f64()).collect(),
        }
    }

    fn check_dim(&self, u: &CubePoint) -> Result<()> {
        if u.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: u.len(),
            });
        }
        Ok(())
    }

    /// `A_i · u`, summed left to right.
    pub fn row_dot(&self, i: usize, u: &CubePoint) -> S {
        let mut acc = S::zero();
        for (j, &a) in self.a[i].iter().enumerate() {
            if u.is_minus(j) {
                acc = acc - a;
            } else {
                acc = acc + a;
            }
        }
        acc
    }

    pub fn image(&self, u: &CubePoint) -> Result<Vec<S>> {
        self.check_dim(u)?;
        Ok((0..self.m()).map(|i| self.row_dot(i, u)).collect())
    }

    /// Point given as a packed mask (`n <= 64`).
    pub fn contains_mask(&self, mask: u64) -> bool {
        self.a.iter().zip(&self.b).all(|(row, &b)| dot_mask(row, mask) <= b)
    }

    pub fn membership(&self, u: &CubePoint) -> Result<bool> {
        self.check_dim(u)?;
        Ok((0..self.m()).all(|i| self.row_dot(i, u) <= self.b[i]))
    }

    pub fn classify(&self, width: S, u: &CubePoint) -> Result<BoundaryClass> {
        if !(width > S::zero()) {
            return Err(Error::InvalidParameter("boundary width must be positive".into()));
        }
        let v = self.image(u)?;
        Ok(classify_image(&v, &self.b, width))
    }
}

/// Class of an image point `v = A u` for thresholds `b` and width `Λ`.
pub fn classify_image<S: Scalar>(v: &[S], b: &[S], width: S) -> BoundaryClass {
    let inside = v.iter().zip(b).all(|(&x, &t)| x <= t);
    if inside {
        if v.iter().zip(b).all(|(&x, &t)| x <= t - width) {
            BoundaryClass::DeepInside
        } else {
            BoundaryClass::InnerBoundary
        }
    } else if v.iter().zip(b).all(|(&x, &t)| x <= t + width) {
        BoundaryClass::OuterBoundary
    } else {
        BoundaryClass::Outside
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn membership_examples() {
        let p = Polytope::new(vec![vec![1.0, 1.0]], vec![0.0]).unwrap();
        assert!(p.membership(&CubePoint::from_signs(&[-1, 1])).unwrap());
        let q = Polytope::new(vec![vec![1.0, 1.0], vec![1.0, -1.0]], vec![0.0, 0.0]).unwrap();
        assert!(!q.membership(&CubePoint::from_signs(&[1, 1])).unwrap());
        assert!(matches!(
            q.membership(&CubePoint::ones(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn membership_matches_naive_loop() {
        let a = vec![
            vec![0.3, -1.2, 2.5, 0.7],
            vec![-0.4, 0.9, 0.1, -2.2],
            vec![1.1, 1.3, -0.6, 0.2],
        ];
        let b = vec![0.5, -0.1, 1.0];
        let p = Polytope::new(a.clone(), b.clone()).unwrap();
        for mask in 0..16u64 {
            let x: Vec<f64> = (0..4).map(|j| if mask >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let naive = (0..3).all(|i| {
                let mut s = 0.0;
                for j in 0..4 {
                    s += a[i][j] * x[j];
                }
                s <= b[i]
            });
            assert_eq!(p.membership(&CubePoint::from_mask(4, mask)).unwrap(), naive);
            assert_eq!(p.contains_mask(mask), naive);
        }
    }

    #[test]
    fn classify_examples() {
        let p = Polytope::new(vec![vec![1i64; 4]], vec![0]).unwrap();
        let sum0 = CubePoint::from_signs(&[1, 1, -1, -1]);
        let sum_m4 = CubePoint::from_signs(&[-1, -1, -1, -1]);
        let sum2 = CubePoint::from_signs(&[1, 1, 1, -1]);
        assert_eq!(p.classify(2, &sum0).unwrap(), BoundaryClass::InnerBoundary);
        assert_eq!(p.classify(2, &sum_m4).unwrap(), BoundaryClass::DeepInside);
        assert_eq!(p.classify(2, &sum2).unwrap(), BoundaryClass::OuterBoundary);
        assert_eq!(p.classify(2, &CubePoint::ones(4)).unwrap(), BoundaryClass::Outside);
        assert!(p.classify(0, &sum0).is_err());
    }

    #[test]
    fn classes_partition_the_cube() {
        let a = vec![
            vec![
                Rational64::new(1, 2),
                Rational64::from_integer(-1),
                Rational64::new(3, 4),
            ],
            vec![
                Rational64::from_integer(2),
                Rational64::new(1, 3),
                Rational64::from_integer(1),
            ],
        ];
        let b = vec![Rational64::new(1, 4), Rational64::from_integer(1)];
        let p = Polytope::new(a, b).unwrap();
        let mut counts = std::collections::HashMap::new();
        for mask in 0..8 {
            let c = p
                .classify(Rational64::from_integer(1), &CubePoint::from_mask(3, mask))
                .unwrap();
            *counts.entry(c).or_insert(0) += 1;
        }
        assert_eq!(counts.values().sum::<i32>(), 8);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Polytope::new(vec![vec![f64::NAN]], vec![0.0]), Err(Error::NonFinite));
        assert!(Polytope::<f64>::new(vec![], vec![]).is_err());
        assert!(Polytope::new(vec![vec![1.0], vec![1.0, 2.0]], vec![0.0, 0.0]).is_err());
        assert!(Polytope::new(vec![vec![1.0]], vec![0.0, 0.0]).is_err());
    }
}
