//! The discrete positive linear functional `A(g) = Σ wᵢ g(xᵢ)` with `A(1) = 1`.

use alloc::vec::Vec;


use crate::bundle::FunctionBundle;
use crate::error::{Error, Result};

/// Weight-sum drift accepted (and removed) by [`DiscreteFunctional::new`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Nonnegative weights summing to one, attached to real nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFunctional {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteFunctional {
    /// Validate and normalize.
    ///
    /// A weight sum within [`WEIGHT_SUM_TOLERANCE`] of one is renormalized so
    /// that `apply(1)` returns exactly `1.0`; anything further off is rejected.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: nodes.len(),
                right: weights.len(),
            });
        }
        if nodes.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(&x) = nodes.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinitePoint { point: x });
        }
        for (index, &w) in weights.iter().enumerate() {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::NegativeWeight { index, value: w });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::WeightSum { sum });
        }
        let mut weights = weights;
        if sum != 1.0 {
            for w in &mut weights {
                *w /= sum;
            }
            // Push the residual into the largest weight until the running
            // sum is exactly one; converges in one or two rounds.
            let big = (0..weights.len())
                .max_by(|&a, &b| weights[a].total_cmp(&weights[b]))
                .unwrap_or(0);
            for _ in 0..8 {
                let s: f64 = weights.iter().sum();
                if s == 1.0 {
                    break;
                }
                weights[big] = (weights[big] + (1.0 - s)).max(0.0);
            }
        }
        Ok(Self { nodes, weights })
    }

    /// Unit mass at `x`.
    pub fn point_mass(x: f64) -> Result<Self> {
        Self::new(alloc::vec![x], alloc::vec![1.0])
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ wᵢ g(xᵢ)`; a non-finite `g(xᵢ)` is an error carrying the node.
    pub fn apply<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64> {
        let mut total = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = g(x);
            if !v.is_finite() {
                return Err(Error::NonFinite { node: x, value: v });
            }
            total += w * v;
        }
        Ok(total)
    }

    /// `A(f)`.
    pub fn mean(&self) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| x * w).sum()
    }

    pub(crate) fn check_nodes_in(&self, m: f64, big_m: f64) -> Result<()> {
        check_interval(m, big_m)?;
        match self.nodes.iter().find(|&&x| x < m || x > big_m) {
            Some(&node) => Err(Error::NodeEscapes { node, lo: m, hi: big_m }),
            None => Ok(()),
        }
    }

    /// Every moment quantity used by the bounds on `[m, M]`.
    pub fn moments(&self, bundle: &FunctionBundle, m: f64, big_m: f64) -> Result<MomentSet> {
        self.check_nodes_in(m, big_m)?;
        bundle.check_inside(m)?;
        bundle.check_inside(big_m)?;
        let mean = self.apply(|x| x)?;
        let cross = self.apply(|x| (big_m - x) * (x - m))?;
        let sq_lo = self.apply(|x| (x - m) * (x - m))?;
        let sq_hi = self.apply(|x| (big_m - x) * (big_m - x))?;
        let value = self.apply(|x| bundle.value(x))?;
        let (d_lo, d_hi) = if bundle.availability()[0] {
            let slope = |x: f64| {
                if x == m {
                    bundle.d1_right(m)
                } else if x == big_m {
                    bundle.d1_left(big_m)
                } else {
                    bundle.d1(x)
                }
                .unwrap_or(f64::NAN)
            };
            (
                Some(self.apply(|x| (x - m) * slope(x))?),
                Some(self.apply(|x| (big_m - x) * slope(x))?),
            )
        } else {
            (None, None)
        };
        Ok(MomentSet {
            mean,
            cross,
            sq_lo,
            sq_hi,
            d_lo,
            d_hi,
            value,
        })
    }
}

/// `m < M`, both finite.
pub(crate) fn check_interval(m: f64, big_m: f64) -> Result<()> {
    if !(m < big_m) || !m.is_finite() || !big_m.is_finite() {
        return Err(Error::DegenerateInterval { lo: m, hi: big_m });
    }
    Ok(())
}

/// Moments of `A` on `[m, M]` for a given `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    /// `A(f)`
    pub mean: f64,
    /// `A[(M − f)(f − m)]`
    pub cross: f64,
    /// `A[(f − m)²]`
    pub sq_lo: f64,
    /// `A[(M − f)²]`
    pub sq_hi: f64,
    /// `A[(f − m) φ'(f)]`, when `φ'` is available
    pub d_lo: Option<f64>,
    /// `A[(M − f) φ'(f)]`, when `φ'` is available
    pub d_hi: Option<f64>,
    /// `A(φ(f))`
    pub value: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two_point() -> DiscreteFunctional {
        DiscreteFunctional::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn construction() {
        assert!(DiscreteFunctional::point_mass(0.5).is_ok());
        assert_eq!(
            DiscreteFunctional::new(vec![0.0, 1.0], vec![0.5, 0.6]),
            Err(Error::WeightSum { sum: 1.1 })
        );
        assert!(matches!(
            DiscreteFunctional::new(vec![0.0, 1.0], vec![1.5, -0.5]),
            Err(Error::NegativeWeight { index: 1, .. })
        ));
        assert!(matches!(
            DiscreteFunctional::new(vec![0.0], vec![0.5, 0.5]),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(DiscreteFunctional::new(vec![], vec![]), Err(Error::Empty));
    }

    #[test]
    fn small_drift_is_renormalized_exactly() {
        let f = DiscreteFunctional::new(vec![0.0, 0.3, 1.0], vec![0.1, 0.2, 0.7 + 5e-10]).unwrap();
        assert_eq!(f.apply(|_| 1.0).unwrap(), 1.0);
        let g = DiscreteFunctional::new(vec![0.0, 0.3, 1.0], vec![0.1, 0.2, 0.7]).unwrap();
        assert_eq!(g.apply(|_| 1.0).unwrap(), 1.0);
    }

    #[test]
    fn apply_examples() {
        let f = two_point();
        assert_eq!(f.apply(|x| x).unwrap(), 0.5);
        assert_eq!(f.apply(|x| x * x * x).unwrap(), 0.5);
        let p = DiscreteFunctional::point_mass(0.5).unwrap();
        assert_eq!(p.apply(|x| x * x * x).unwrap(), 0.125);
    }

    #[test]
    fn apply_reports_bad_node() {
        let f = two_point();
        assert_eq!(
            f.apply(|x| 1.0 / x),
            Err(Error::NonFinite { node: 0.0, value: f64::INFINITY })
        );
    }

    #[test]
    fn moments_point_mass_cube() {
        let p = DiscreteFunctional::point_mass(0.5).unwrap();
        let m = p.moments(&FunctionBundle::monomial(3), 0.0, 1.0).unwrap();
        assert_eq!(m.mean, 0.5);
        assert_eq!(m.cross, 0.25);
        assert_eq!(m.sq_lo, 0.25);
        assert_eq!(m.sq_hi, 0.25);
        assert_eq!(m.value, 0.125);
        assert_eq!(m.d_lo, Some(0.375));
        assert_eq!(m.d_hi, Some(0.375));
    }

    #[test]
    fn endpoint_mass_has_no_cross_term() {
        let m = two_point().moments(&FunctionBundle::monomial(5), 0.0, 1.0).unwrap();
        assert_eq!(m.cross, 0.0);
    }

    #[test]
    fn escaping_node() {
        let f = DiscreteFunctional::new(vec![0.2, 1.5], vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            f.moments(&FunctionBundle::monomial(3), 0.0, 1.0),
            Err(Error::NodeEscapes { node, .. }) if node == 1.5
        ));
        assert!(matches!(
            f.moments(&FunctionBundle::monomial(3), 1.0, 1.0),
            Err(Error::DegenerateInterval { .. })
        ));
    }
}
