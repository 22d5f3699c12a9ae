//! Divided differences at distinct and coalescing points, and a sampling
//! certificate for 3-convexity.

use alloc::vec::Vec;
use core::ops::{Div, Sub};

use crate::bundle::FunctionBundle;
use crate::error::{Error, Result};

/// `[t₀,…,tₙ]f` from `(tᵢ, f(tᵢ))` pairs at pairwise distinct points.
///
/// The points are sorted before the recursion runs, so any permutation of
/// the input yields the same value bit for bit. Generic over the scalar so
/// the same recursion can run in extended precision.
pub fn dd_recursive<T>(values: &[(T, T)]) -> Result<T>
where
    T: Copy + PartialOrd + Sub<Output = T> + Div<Output = T> + Into<f64>,
{
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let mut pts: Vec<(T, T)> = values.to_vec();
    for &(t, _) in &pts {
        let point: f64 = t.into();
        if !point.is_finite() {
            return Err(Error::NonFinitePoint { point });
        }
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    if let Some(w) = pts.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::CoincidentPoints {
            point: w[0].0.into(),
        });
    }
    // Newton table, one column at a time.
    let mut col: Vec<T> = pts.iter().map(|p| p.1).collect();
    for order in 1..pts.len() {
        for i in 0..pts.len() - order {
            col[i] = (col[i + 1] - col[i]) / (pts[i + order].0 - pts[i].0);
        }
    }
    Ok(col[0])
}

/// Shape of a multiplicity pattern on four arguments, largest multiplicity first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternShape {
    Simple,
    Double,
    DoubleDouble,
    Triple,
    Quadruple,
}

/// Distinct points with multiplicities summing to 4.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityPattern {
    points: Vec<f64>,
    multiplicities: Vec<u8>,
}

impl MultiplicityPattern {
    pub fn new(points: Vec<f64>, multiplicities: Vec<u8>) -> Result<Self> {
        if points.len() != multiplicities.len() {
            return Err(Error::LengthMismatch {
                left: points.len(),
                right: multiplicities.len(),
            });
        }
        if multiplicities.iter().any(|&k| k == 0) {
            return Err(Error::InvalidPattern("multiplicities must be positive"));
        }
        if multiplicities.iter().map(|&k| k as u32).sum::<u32>() != 4 {
            return Err(Error::InvalidPattern("multiplicities must sum to 4"));
        }
        if let Some(&p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::NonFinitePoint { point: p });
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(Error::InvalidPattern("points must be pairwise distinct"));
                }
            }
        }
        // order by multiplicity, largest first; stable for equal multiplicities
        let mut idx: Vec<usize> = (0..points.len()).collect();
        idx.sort_by(|&a, &b| multiplicities[b].cmp(&multiplicities[a]));
        Ok(Self {
            points: idx.iter().map(|&i| points[i]).collect(),
            multiplicities: idx.iter().map(|&i| multiplicities[i]).collect(),
        })
    }

    pub fn simple(t0: f64, t1: f64, t2: f64, t3: f64) -> Result<Self> {
        Self::new(alloc::vec![t0, t1, t2, t3], alloc::vec![1, 1, 1, 1])
    }

    /// `[t, t, t₀, t₁]`
    pub fn double(t: f64, t0: f64, t1: f64) -> Result<Self> {
        Self::new(alloc::vec![t, t0, t1], alloc::vec![2, 1, 1])
    }

    /// `[t, t, t₀, t₀]`
    pub fn double_double(t: f64, t0: f64) -> Result<Self> {
        Self::new(alloc::vec![t, t0], alloc::vec![2, 2])
    }

    /// `[t, t, t, t₀]`
    pub fn triple(t: f64, t0: f64) -> Result<Self> {
        Self::new(alloc::vec![t, t0], alloc::vec![3, 1])
    }

    /// `[t, t, t, t]`
    pub fn quadruple(t: f64) -> Result<Self> {
        Self::new(alloc::vec![t], alloc::vec![4])
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn multiplicities(&self) -> &[u8] {
        &self.multiplicities
    }

    pub fn shape(&self) -> PatternShape {
        match self.multiplicities.as_slice() {
            [1, 1, 1, 1] => PatternShape::Simple,
            [2, 1, 1] => PatternShape::Double,
            [2, 2] => PatternShape::DoubleDouble,
            [3, 1] => PatternShape::Triple,
            _ => PatternShape::Quadruple,
        }
    }
}

/// Third-order divided difference of `bundle` with repeated arguments.
pub fn dd_confluent(bundle: &FunctionBundle, pattern: &MultiplicityPattern) -> Result<f64> {
    for &p in pattern.points() {
        bundle.check_inside(p)?;
    }
    let pts = pattern.points();
    let d = |order: usize, x: f64| -> Result<f64> {
        bundle.require(order)?;
        bundle
            .inner_derivative(order, x)
            .ok_or(Error::InsufficientBundle { needed: "endpoint derivative" })
    };
    match pattern.shape() {
        PatternShape::Simple => {
            let vals: Vec<(f64, f64)> = pts.iter().map(|&t| (t, bundle.value(t))).collect();
            dd_recursive(&vals)
        }
        PatternShape::Double => {
            let (t, mut t0, mut t1) = (pts[0], pts[1], pts[2]);
            if (t - t0).abs() < (t - t1).abs() {
                core::mem::swap(&mut t0, &mut t1);
            }
            Ok(double_simple_simple(t, t0, t1, bundle.value(t), d(1, t)?, bundle.value(t0), bundle.value(t1)).0)
        }
        PatternShape::DoubleDouble => {
            let (t, t0) = (pts[0], pts[1]);
            let h = t0 - t;
            Ok((h * (d(1, t0)? + d(1, t)?) + 2.0 * (bundle.value(t) - bundle.value(t0))) / (h * h * h))
        }
        PatternShape::Triple => {
            let (t, t0) = (pts[0], pts[1]);
            let h = t0 - t;
            let taylor = bundle.value(t) + d(1, t)? * h + 0.5 * d(2, t)? * h * h;
            Ok((bundle.value(t0) - taylor) / (h * h * h))
        }
        PatternShape::Quadruple => {
            let t = pts[0];
            bundle.require(3)?;
            Ok(bundle.d3(t).unwrap_or(f64::NAN) / 6.0)
        }
    }
}

/// `[t, t, t₀, t₁]f` together with the sum of absolute values of its terms.
fn double_simple_simple(t: f64, t0: f64, t1: f64, ft: f64, dft: f64, f0: f64, f1: f64) -> (f64, f64) {
    let a = t - t0;
    let b = t - t1;
    let terms = [
        dft / (a * b),
        ft * (t0 + t1 - 2.0 * t) / (a * a * b * b),
        f0 / (a * a * (t0 - t1)),
        f1 / (b * b * (t1 - t0)),
    ];
    (
        terms.iter().sum(),
        terms.iter().map(|v| v.abs()).sum(),
    )
}

/// Outcome of a 3-convexity sampling check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ThreeConvex,
    NegThreeConvex,
    Neither,
    Indeterminate,
}

/// Result of [`certify_3convex`]. A sampling check, not a proof.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityCertificate {
    pub verdict: Verdict,
    pub grid_size: usize,
    /// Smallest sampled witness (`φ‴` or a confluent divided difference).
    pub min_witness: f64,
    pub witness_point: f64,
}

/// Absolute tolerance on sampled third derivatives.
pub const D3_TOLERANCE: f64 = 1e-12;

// Subsample limit for the cubic-cost fallback enumeration.
const FALLBACK_POINTS: usize = 40;

/// Check the sign of the third-order divided differences of `bundle` on `[lo, hi]`.
///
/// With `d3` available, `φ‴` is sampled on a uniform grid of `grid_n` points.
/// Without it, confluent differences `[t,t,t₀,t₁]φ` over sampled triples are
/// used when `d1` exists, and plain four-point differences otherwise; each
/// sample is compared against its own rounding floor and the verdict is
/// `Indeterminate` when no sample is significant.
pub fn certify_3convex(bundle: &FunctionBundle, lo: f64, hi: f64, grid_n: usize) -> Result<ConvexityCertificate> {
    if grid_n < 3 {
        return Err(Error::GridTooSmall { needed: 3, got: grid_n });
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::DegenerateInterval { lo, hi });
    }
    bundle.check_inside(lo)?;
    bundle.check_inside(hi)?;
    let grid: Vec<f64> = (0..grid_n)
        .map(|i| {
            if i + 1 == grid_n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (grid_n - 1) as f64
            }
        })
        .collect();

    if bundle.availability()[2] {
        let mut min = (f64::INFINITY, lo);
        let mut max = f64::NEG_INFINITY;
        for &x in &grid {
            let v = bundle.d3(x).unwrap_or(f64::NAN);
            if v.is_nan() {
                return Ok(ConvexityCertificate {
                    verdict: Verdict::Indeterminate,
                    grid_size: grid_n,
                    min_witness: f64::NAN,
                    witness_point: x,
                });
            }
            if v < min.0 {
                min = (v, x);
            }
            max = max.max(v);
        }
        let verdict = if min.0 >= -D3_TOLERANCE {
            Verdict::ThreeConvex
        } else if max <= D3_TOLERANCE {
            Verdict::NegThreeConvex
        } else {
            Verdict::Neither
        };
        return Ok(ConvexityCertificate {
            verdict,
            grid_size: grid_n,
            min_witness: min.0,
            witness_point: min.1,
        });
    }

    let sub: Vec<f64> = if grid.len() > FALLBACK_POINTS {
        (0..FALLBACK_POINTS)
            .map(|i| grid[i * (grid.len() - 1) / (FALLBACK_POINTS - 1)])
            .collect()
    } else {
        grid.clone()
    };
    let values: Vec<f64> = sub.iter().map(|&x| bundle.value(x)).collect();
    let mut tally = Tally::new();
    if bundle.availability()[0] {
        for (i, &t) in sub.iter().enumerate() {
            let dt = bundle.inner_derivative(1, t).unwrap_or(f64::NAN);
            for j in 0..sub.len() {
                for k in (j + 1)..sub.len() {
                    if j == i || k == i {
                        continue;
                    }
                    let (v, scale) = double_simple_simple(t, sub[j], sub[k], values[i], dt, values[j], values[k]);
                    tally.push(v, scale, t);
                }
            }
        }
    } else {
        let n = sub.len().min(20);
        let pick: Vec<usize> = (0..n).map(|i| i * (sub.len() - 1) / (n - 1)).collect();
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    for d in (c + 1)..n {
                        let idx = [pick[a], pick[b], pick[c], pick[d]];
                        let (v, scale) = four_point(&idx.map(|i| (sub[i], values[i])));
                        tally.push(v, scale, sub[idx[0]]);
                    }
                }
            }
        }
    }
    Ok(tally.finish(grid_n))
}

fn four_point(p: &[(f64, f64); 4]) -> (f64, f64) {
    let mut value = 0.0;
    let mut scale = 0.0;
    for i in 0..4 {
        let mut denom = 1.0;
        for j in 0..4 {
            if i != j {
                denom *= p[i].0 - p[j].0;
            }
        }
        value += p[i].1 / denom;
        scale += (p[i].1 / denom).abs();
    }
    (value, scale)
}

struct Tally {
    min: (f64, f64),
    positive: bool,
    negative: bool,
    nan: bool,
}

impl Tally {
    fn new() -> Self {
        Self {
            min: (f64::INFINITY, f64::NAN),
            positive: false,
            negative: false,
            nan: false,
        }
    }

    fn push(&mut self, value: f64, scale: f64, at: f64) {
        if !value.is_finite() {
            self.nan = true;
            return;
        }
        let floor = 1e3 * f64::EPSILON * scale;
        if value > floor {
            self.positive = true;
        } else if value < -floor {
            self.negative = true;
        }
        if value < self.min.0 {
            self.min = (value, at);
        }
    }

    fn finish(self, grid_size: usize) -> ConvexityCertificate {
        let verdict = match (self.positive, self.negative) {
            _ if self.nan => Verdict::Indeterminate,
            (true, true) => Verdict::Neither,
            (true, false) => Verdict::ThreeConvex,
            (false, true) => Verdict::NegThreeConvex,
            (false, false) => Verdict::Indeterminate,
        };
        ConvexityCertificate {
            verdict,
            grid_size,
            min_witness: self.min.0,
            witness_point: self.min.1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pairs(f: impl Fn(f64) -> f64, pts: &[f64]) -> Vec<(f64, f64)> {
        pts.iter().map(|&t| (t, f(t))).collect()
    }

    #[test]
    fn recursive_examples() {
        assert_eq!(dd_recursive(&pairs(|x| x * x, &[0.0, 1.0, 2.0])).unwrap(), 1.0);
        assert_eq!(dd_recursive(&pairs(|x| x * x * x, &[0.0, 1.0, 2.0, 3.0])).unwrap(), 1.0);
        // x⁴ on 0..3: table by hand
        // values 0 1 16 81 → 1 15 65 → 7 25 → 6
        assert_eq!(dd_recursive(&pairs(|x| x.powi(4), &[0.0, 1.0, 2.0, 3.0])).unwrap(), 6.0);
        assert_eq!(dd_recursive(&[(2.0, 5.0)]).unwrap(), 5.0);
    }

    #[test]
    fn recursive_errors() {
        assert_eq!(dd_recursive::<f64>(&[]), Err(Error::Empty));
        assert!(matches!(
            dd_recursive(&[(1.0, 1.0), (0.0, 0.0), (1.0, 2.0)]),
            Err(Error::CoincidentPoints { point }) if point == 1.0
        ));
    }

    #[test]
    fn permutation_gives_identical_bits() {
        let f = |x: f64| (1.3 * x).sin() + x.powi(5);
        let a = dd_recursive(&pairs(f, &[0.1, 0.7, -0.4, 1.9, 1.2])).unwrap();
        let b = dd_recursive(&pairs(f, &[1.9, -0.4, 1.2, 0.1, 0.7])).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn confluent_examples() {
        let cube = FunctionBundle::monomial(3);
        let q = MultiplicityPattern::quadruple(5.0).unwrap();
        assert_eq!(dd_confluent(&cube, &q).unwrap(), 1.0);
        let dd = MultiplicityPattern::double_double(0.0, 1.0).unwrap();
        assert_eq!(dd_confluent(&cube, &dd).unwrap(), 1.0);
        let sq = FunctionBundle::monomial(2);
        for p in [
            MultiplicityPattern::double(0.3, -1.0, 2.0).unwrap(),
            MultiplicityPattern::double_double(0.3, 2.0).unwrap(),
            MultiplicityPattern::triple(0.3, -1.0).unwrap(),
            MultiplicityPattern::quadruple(0.3).unwrap(),
            MultiplicityPattern::simple(0.0, 1.0, 2.5, -1.0).unwrap(),
        ] {
            assert!(dd_confluent(&sq, &p).unwrap().abs() < 1e-14, "{p:?}");
        }
    }

    #[test]
    fn double_is_symmetric_in_simple_points() {
        let e = FunctionBundle::new(-5.0, 5.0, |x: f64| x.exp())
            .unwrap()
            .with_d1(|x: f64| x.exp());
        let a = dd_confluent(&e, &MultiplicityPattern::double(0.2, 1.0, -2.0).unwrap()).unwrap();
        let b = dd_confluent(&e, &MultiplicityPattern::double(0.2, -2.0, 1.0).unwrap()).unwrap();
        assert_eq!(a, b);
        // pattern given in any order
        let c = dd_confluent(&e, &MultiplicityPattern::new(vec![1.0, 0.2, -2.0], vec![1, 2, 1]).unwrap()).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn confluent_errors() {
        let f = FunctionBundle::new(0.0, 1.0, |x| x).unwrap();
        assert_eq!(
            dd_confluent(&f, &MultiplicityPattern::quadruple(0.5).unwrap()),
            Err(Error::InsufficientBundle { needed: "d3" })
        );
        assert_eq!(
            dd_confluent(&f, &MultiplicityPattern::double(0.5, 0.1, 0.9).unwrap()),
            Err(Error::InsufficientBundle { needed: "d1" })
        );
        assert!(matches!(
            dd_confluent(&f, &MultiplicityPattern::simple(0.0, 0.5, 0.7, 2.0).unwrap()),
            Err(Error::OutsideDomain { .. })
        ));
        assert!(MultiplicityPattern::new(vec![1.0, 1.0], vec![2, 2]).is_err());
        assert!(MultiplicityPattern::new(vec![1.0, 2.0], vec![2, 1]).is_err());
        assert!(MultiplicityPattern::new(vec![1.0, 2.0], vec![4, 0]).is_err());
    }

    fn xlogx() -> FunctionBundle {
        FunctionBundle::new(0.0, f64::INFINITY, |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() })
            .unwrap()
            .with_d1(|x: f64| x.ln() + 1.0)
            .with_d2(|x: f64| 1.0 / x)
            .with_d3(|x: f64| -1.0 / (x * x))
    }

    #[test]
    fn certify_examples() {
        let c = certify_3convex(&FunctionBundle::monomial(3), 0.1, 2.0, 101).unwrap();
        assert_eq!(c.verdict, Verdict::ThreeConvex);
        assert!(c.min_witness >= -1e-12);
        assert_eq!(certify_3convex(&xlogx(), 0.1, 2.0, 101).unwrap().verdict, Verdict::NegThreeConvex);
        let p = FunctionBundle::polynomial(&[0.0, 0.0, 0.0, -1.0, 1.0]);
        assert_eq!(certify_3convex(&p, -1.0, 1.0, 101).unwrap().verdict, Verdict::Neither);
    }

    #[test]
    fn certify_without_third_derivative() {
        let cube_d1 = FunctionBundle::new(-1.0, 2.0, |x: f64| x * x * x)
            .unwrap()
            .with_d1(|x| 3.0 * x * x);
        assert_eq!(certify_3convex(&cube_d1, -1.0, 2.0, 25).unwrap().verdict, Verdict::ThreeConvex);
        let neg = cube_d1.neg();
        assert_eq!(certify_3convex(&neg, -1.0, 2.0, 25).unwrap().verdict, Verdict::NegThreeConvex);
        let values_only = FunctionBundle::new(-1.0, 1.0, |x: f64| x.powi(4) - x.powi(3)).unwrap();
        assert_eq!(certify_3convex(&values_only, -1.0, 1.0, 30).unwrap().verdict, Verdict::Neither);
        let quadratic = FunctionBundle::new(-1.0, 1.0, |x: f64| 3.0 * x * x - x).unwrap();
        assert_eq!(certify_3convex(&quadratic, -1.0, 1.0, 12).unwrap().verdict, Verdict::Indeterminate);
    }

    #[test]
    fn certify_preconditions() {
        let c = FunctionBundle::monomial(3);
        assert!(matches!(certify_3convex(&c, 0.0, 1.0, 2), Err(Error::GridTooSmall { .. })));
        assert!(certify_3convex(&c, 1.0, 0.0, 10).is_err());
        assert!(certify_3convex(&xlogx(), -1.0, 1.0, 10).is_err());
    }
}
