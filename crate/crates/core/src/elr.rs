//! Bounds for the Edmundson-Lah-Ribarič difference
//!
//! ```text
//! D = (M − A(f))/(M − m)·φ(m) + (A(f) − m)/(M − m)·φ(M) − A(φ(f))
//! ```
//!
//! and for the Jensen gap `A(φ(f)) − φ(A(f))`, valid when `φ` (or `−φ`) is
//! 3-convex on `[m, M]`. Each bound pair comes from a confluent divided
//! difference taken at the interval ends:
//!
//! | bound      | divided difference used      | data needed                  |
//! |------------|------------------------------|------------------------------|
//! | secant     | `[m,m,x,M]`, `[M,M,x,m]`     | `φ'₊(m)`, `φ'₋(M)`           |
//! | derivative | `[m,m,x,x]`, `[M,M,x,x]`     | `φ'` on `(m, M)`             |
//! | taylor     | `[m,m,m,x]`, `[M,M,M,x]`     | `φ'`, `φ''` at the ends      |

use crate::bundle::FunctionBundle;
use crate::divided_diff::{ConvexityCertificate, Verdict};
use crate::error::{Error, Result};
use crate::functional::{DiscreteFunctional, MomentSet};

/// Which sign of 3-convexity holds for `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `φ` is 3-convex.
    ThreeConvex,
    /// `−φ` is 3-convex.
    NegThreeConvex,
    Neither,
}

impl From<Verdict> for Direction {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::ThreeConvex => Direction::ThreeConvex,
            Verdict::NegThreeConvex => Direction::NegThreeConvex,
            Verdict::Neither | Verdict::Indeterminate => Direction::Neither,
        }
    }
}

impl From<&ConvexityCertificate> for Direction {
    fn from(c: &ConvexityCertificate) -> Self {
        c.verdict.into()
    }
}

impl Direction {
    pub fn orientation(self) -> Result<Orientation> {
        match self {
            Direction::ThreeConvex => Ok(Orientation::Direct),
            Direction::NegThreeConvex => Ok(Orientation::Reversed),
            Direction::Neither => Err(Error::HypothesesUnmet("function is not 3-convex in either sign")),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Direction::ThreeConvex => Direction::NegThreeConvex,
            Direction::NegThreeConvex => Direction::ThreeConvex,
            Direction::Neither => Direction::Neither,
        }
    }
}

/// `Direct`: `lower ≤ mid ≤ upper`. `Reversed`: `upper ≤ mid ≤ lower`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Direct,
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Secant,
    Derivative,
    Taylor,
    JensenDerivative,
    JensenTaylor,
}

/// Which Jensen-gap bound to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JensenVariant {
    Derivative,
    Taylor,
}

/// The raw three expressions of a bound chain, before orientation is attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerms {
    pub lower: f64,
    pub mid: f64,
    pub upper: f64,
}

/// A bracket around `mid`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub lower: f64,
    pub upper: f64,
    pub mid: f64,
    pub orientation: Orientation,
    pub theorem: BoundKind,
}

/// Absolute slack used when checking a bracket.
pub const BRACKET_SLACK: f64 = 1e-9;

impl BoundReport {
    fn new(terms: BoundTerms, direction: Direction, theorem: BoundKind) -> Result<Self> {
        Ok(Self {
            lower: terms.lower,
            upper: terms.upper,
            mid: terms.mid,
            orientation: direction.orientation()?,
            theorem,
        })
    }

    /// How far `mid` sits outside the bracket (0 when inside).
    pub fn violation(&self) -> f64 {
        let (lo, hi) = match self.orientation {
            Orientation::Direct => (self.lower, self.upper),
            Orientation::Reversed => (self.upper, self.lower),
        };
        (lo - self.mid).max(self.mid - hi).max(0.0)
    }

    pub fn brackets(&self, slack: f64) -> bool {
        self.violation() <= slack
    }
}

struct Ends {
    phi_m: f64,
    phi_big: f64,
    slope: f64,
}

fn ends(bundle: &FunctionBundle, m: f64, big_m: f64) -> Ends {
    let phi_m = bundle.value(m);
    let phi_big = bundle.value(big_m);
    Ends {
        phi_m,
        phi_big,
        slope: (phi_big - phi_m) / (big_m - m),
    }
}

fn need(v: Option<f64>, what: &'static str) -> Result<f64> {
    v.filter(|x| x.is_finite())
        .ok_or(Error::InsufficientBundle { needed: what })
}

fn elr_from(mo: &MomentSet, e: &Ends, m: f64, big_m: f64) -> f64 {
    let w = big_m - m;
    (big_m - mo.mean) / w * e.phi_m + (mo.mean - m) / w * e.phi_big - mo.value
}

/// `D = (M − A(f))/(M − m)·φ(m) + (A(f) − m)/(M − m)·φ(M) − A(φ(f))`.
pub fn elr_difference(functional: &DiscreteFunctional, bundle: &FunctionBundle, m: f64, big_m: f64) -> Result<f64> {
    let mo = functional.moments(bundle, m, big_m)?;
    Ok(elr_from(&mo, &ends(bundle, m, big_m), m, big_m))
}

/// Secant bound pair expressions.
pub fn secant_terms(functional: &DiscreteFunctional, bundle: &FunctionBundle, m: f64, big_m: f64) -> Result<BoundTerms> {
    let mo = functional.moments(bundle, m, big_m)?;
    let e = ends(bundle, m, big_m);
    let d1m = need(bundle.d1_right(m), "d1_plus_at_lo")?;
    let d1big = need(bundle.d1_left(big_m), "d1_minus_at_hi")?;
    let k = mo.cross / (big_m - m);
    Ok(BoundTerms {
        lower: k * (e.slope - d1m),
        mid: elr_from(&mo, &e, m, big_m),
        upper: k * (d1big - e.slope),
    })
}

/// Derivative bound pair expressions.
pub fn derivative_terms(functional: &DiscreteFunctional, bundle: &FunctionBundle, m: f64, big_m: f64) -> Result<BoundTerms> {
    bundle.require(1)?;
    let mo = functional.moments(bundle, m, big_m)?;
    let e = ends(bundle, m, big_m);
    let d1m = need(bundle.d1_right(m), "d1_plus_at_lo")?;
    let d1big = need(bundle.d1_left(big_m), "d1_minus_at_hi")?;
    let d_lo = need(mo.d_lo, "d1")?;
    let d_hi = need(mo.d_hi, "d1")?;
    Ok(BoundTerms {
        lower: (mo.mean - m) * (e.slope - 0.5 * d1m) - 0.5 * d_lo,
        mid: elr_from(&mo, &e, m, big_m),
        upper: 0.5 * d_hi - (big_m - mo.mean) * (e.slope - 0.5 * d1big),
    })
}

/// Taylor bound pair expressions.
pub fn taylor_terms(functional: &DiscreteFunctional, bundle: &FunctionBundle, m: f64, big_m: f64) -> Result<BoundTerms> {
    let mo = functional.moments(bundle, m, big_m)?;
    let e = ends(bundle, m, big_m);
    let d1m = need(bundle.d1_right(m), "d1_plus_at_lo")?;
    let d1big = need(bundle.d1_left(big_m), "d1_minus_at_hi")?;
    let d2m = need(bundle.d2_right(m), "d2_plus_at_lo")?;
    let d2big = need(bundle.d2_left(big_m), "d2_minus_at_hi")?;
    Ok(BoundTerms {
        lower: (big_m - mo.mean) * (d1big - e.slope) - 0.5 * d2big * mo.sq_hi,
        mid: elr_from(&mo, &e, m, big_m),
        upper: (mo.mean - m) * (e.slope - d1m) - 0.5 * d2m * mo.sq_lo,
    })
}

/// Jensen-gap bound expressions: the scalar chain at `x = A(f)` minus the
/// functional chain.
pub fn jensen_terms(
    functional: &DiscreteFunctional,
    bundle: &FunctionBundle,
    m: f64,
    big_m: f64,
    variant: JensenVariant,
) -> Result<BoundTerms> {
    bundle.require(1)?;
    let mo = functional.moments(bundle, m, big_m)?;
    let e = ends(bundle, m, big_m);
    let x = mo.mean;
    let gap = mo.value - bundle.value(x);
    let d1m = need(bundle.d1_right(m), "d1_plus_at_lo")?;
    let d1big = need(bundle.d1_left(big_m), "d1_minus_at_hi")?;
    let s = e.slope;
    match variant {
        JensenVariant::Derivative => {
            let d1x = need(bundle.inner_derivative(1, x), "d1")?;
            let d_lo = need(mo.d_lo, "d1")?;
            let d_hi = need(mo.d_hi, "d1")?;
            Ok(BoundTerms {
                lower: (x - m) * (s - 0.5 * (d1x + d1m)) - 0.5 * d_hi + (big_m - x) * (s - 0.5 * d1big),
                mid: gap,
                upper: (big_m - x) * (0.5 * (d1x + d1big) - s) - (x - m) * (s - 0.5 * d1m) + 0.5 * d_lo,
            })
        }
        JensenVariant::Taylor => {
            let d2m = need(bundle.d2_right(m), "d2_plus_at_lo")?;
            let d2big = need(bundle.d2_left(big_m), "d2_minus_at_hi")?;
            Ok(BoundTerms {
                lower: (big_m - x) * (d1big - s - 0.5 * d2big * (big_m - x)) - (x - m) * (s - d1m)
                    + 0.5 * d2m * mo.sq_lo,
                mid: gap,
                upper: (x - m) * (s - d1m - 0.5 * d2m * (x - m)) - (big_m - x) * (d1big - s)
                    + 0.5 * d2big * mo.sq_hi,
            })
        }
    }
}

/// Secant bounds: `A[(M−f)(f−m)]/(M−m)` times the endpoint slope gaps.
pub fn bounds_secant(
    functional: &DiscreteFunctional,
    bundle: &FunctionBundle,
    m: f64,
    big_m: f64,
    direction: Direction,
) -> Result<BoundReport> {
    direction.orientation()?;
    BoundReport::new(secant_terms(functional, bundle, m, big_m)?, direction, BoundKind::Secant)
}

/// Derivative bounds using `A[(f−m)φ'(f)]` and `A[(M−f)φ'(f)]`.
pub fn bounds_derivative(
    functional: &DiscreteFunctional,
    bundle: &FunctionBundle,
    m: f64,
    big_m: f64,
    direction: Direction,
) -> Result<BoundReport> {
    direction.orientation()?;
    BoundReport::new(derivative_terms(functional, bundle, m, big_m)?, direction, BoundKind::Derivative)
}

/// Taylor bounds using second derivatives at the interval ends.
pub fn bounds_taylor(
    functional: &DiscreteFunctional,
    bundle: &FunctionBundle,
    m: f64,
    big_m: f64,
    direction: Direction,
) -> Result<BoundReport> {
    direction.orientation()?;
    BoundReport::new(taylor_terms(functional, bundle, m, big_m)?, direction, BoundKind::Taylor)
}

/// Bounds on the Jensen gap `A(φ(f)) − φ(A(f))`.
pub fn jensen_gap_bounds(
    functional: &DiscreteFunctional,
    bundle: &FunctionBundle,
    m: f64,
    big_m: f64,
    variant: JensenVariant,
    direction: Direction,
) -> Result<BoundReport> {
    direction.orientation()?;
    let kind = match variant {
        JensenVariant::Derivative => BoundKind::JensenDerivative,
        JensenVariant::Taylor => BoundKind::JensenTaylor,
    };
    BoundReport::new(jensen_terms(functional, bundle, m, big_m, variant)?, direction, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn point() -> DiscreteFunctional {
        DiscreteFunctional::point_mass(0.5).unwrap()
    }

    fn ends01() -> DiscreteFunctional {
        DiscreteFunctional::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    fn triple(r: &BoundReport) -> (f64, f64, f64) {
        (r.lower, r.mid, r.upper)
    }

    #[test]
    fn elr_difference_examples() {
        let cube = FunctionBundle::monomial(3);
        assert_eq!(elr_difference(&ends01(), &cube, 0.0, 1.0).unwrap(), 0.0);
        assert!(close(elr_difference(&point(), &cube, 0.0, 1.0).unwrap(), 0.375));
        assert!(close(elr_difference(&point(), &FunctionBundle::monomial(2), 0.0, 1.0).unwrap(), 0.25));
    }

    #[test]
    fn worked_instance() {
        let cube = FunctionBundle::monomial(3);
        let dir = Direction::ThreeConvex;
        let s = bounds_secant(&point(), &cube, 0.0, 1.0, dir).unwrap();
        assert_eq!(triple(&s), (0.25, 0.375, 0.5));
        assert_eq!(s.orientation, Orientation::Direct);
        let d = bounds_derivative(&point(), &cube, 0.0, 1.0, dir).unwrap();
        assert_eq!(triple(&d), (0.3125, 0.375, 0.4375));
        let t = bounds_taylor(&point(), &cube, 0.0, 1.0, dir).unwrap();
        assert_eq!(triple(&t), (0.25, 0.375, 0.5));
    }

    #[test]
    fn endpoint_mass_is_tight() {
        let cube = FunctionBundle::monomial(3);
        let r = bounds_secant(&ends01(), &cube, 0.0, 1.0, Direction::ThreeConvex).unwrap();
        assert_eq!(triple(&r), (0.0, 0.0, 0.0));
        // the other two pairs stay wide: (-0.25, 0.25) and (-0.5, 0.5)
        let r = bounds_derivative(&ends01(), &cube, 0.0, 1.0, Direction::ThreeConvex).unwrap();
        assert_eq!(triple(&r), (-0.25, 0.0, 0.25));
        let r = bounds_taylor(&ends01(), &cube, 0.0, 1.0, Direction::ThreeConvex).unwrap();
        assert_eq!(triple(&r), (-0.5, 0.0, 0.5));
    }

    #[test]
    fn negated_cube_reverses() {
        let neg = FunctionBundle::monomial(3).neg();
        let r = bounds_secant(&point(), &neg, 0.0, 1.0, Direction::NegThreeConvex).unwrap();
        assert_eq!(r.orientation, Orientation::Reversed);
        assert_eq!(triple(&r), (-0.25, -0.375, -0.5));
        assert!(r.brackets(0.0));
    }

    #[test]
    fn quadratic_makes_derivative_lower_bound_tight() {
        let sq = FunctionBundle::monomial(2);
        let r = bounds_derivative(&point(), &sq, 0.0, 1.0, Direction::ThreeConvex).unwrap();
        assert!(close(r.lower, 0.25));
        assert!(close(r.mid, 0.25));
        assert!(r.upper >= r.mid);
    }

    #[test]
    fn quartic_taylor_brackets() {
        let q = FunctionBundle::monomial(4);
        let r = bounds_taylor(&point(), &q, 0.0, 1.0, Direction::ThreeConvex).unwrap();
        assert!(close(r.mid, 0.4375));
        // lower = 0.5·(4 − 1) − 6·0.25 = 0, upper = 0.5·1 − 0 = 0.5
        assert!(close(r.lower, 0.0));
        assert!(close(r.upper, 0.5));
    }

    #[test]
    fn neither_is_rejected() {
        let cube = FunctionBundle::monomial(3);
        assert!(matches!(
            bounds_secant(&point(), &cube, 0.0, 1.0, Direction::Neither),
            Err(Error::HypothesesUnmet(_))
        ));
        assert!(matches!(
            bounds_taylor(&point(), &cube, 0.5, 0.5, Direction::ThreeConvex),
            Err(Error::DegenerateInterval { .. })
        ));
    }

    #[test]
    fn missing_derivatives() {
        let f = FunctionBundle::new(-1.0, 2.0, |x: f64| x * x * x).unwrap();
        assert!(matches!(
            bounds_derivative(&point(), &f, 0.0, 1.0, Direction::ThreeConvex),
            Err(Error::InsufficientBundle { .. })
        ));
        let f = f.with_d1(|x| 3.0 * x * x);
        assert!(bounds_secant(&point(), &f, 0.0, 1.0, Direction::ThreeConvex).is_ok());
        assert!(matches!(
            bounds_taylor(&point(), &f, 0.0, 1.0, Direction::ThreeConvex),
            Err(Error::InsufficientBundle { .. })
        ));
    }

    #[test]
    fn jensen_gap_examples() {
        let cube = FunctionBundle::monomial(3);
        let r = jensen_gap_bounds(&point(), &cube, 0.0, 1.0, JensenVariant::Derivative, Direction::ThreeConvex).unwrap();
        assert_eq!(r.mid, 0.0);
        assert!(close(r.lower, -0.125));
        assert!(close(r.upper, 0.125));
        let sq = FunctionBundle::monomial(2);
        let r = jensen_gap_bounds(&ends01(), &sq, 0.0, 1.0, JensenVariant::Derivative, Direction::ThreeConvex).unwrap();
        assert!(close(r.mid, 0.25));
        assert!(r.brackets(1e-12));
        for x in [0.0, 0.3, 1.0] {
            let p = DiscreteFunctional::point_mass(x).unwrap();
            let r = jensen_gap_bounds(&p, &FunctionBundle::monomial(4), 0.0, 1.0, JensenVariant::Taylor, Direction::ThreeConvex).unwrap();
            assert_eq!(r.mid, 0.0);
            assert!(r.brackets(1e-12));
        }
    }

    #[test]
    fn jensen_lower_bound_ignores_linear_terms() {
        // φ = x³ − 10x: adding a linear term leaves the gap and both bounds unchanged
        let shifted = FunctionBundle::polynomial(&[0.0, -10.0, 0.0, 1.0]);
        let cube = FunctionBundle::monomial(3);
        let f = DiscreteFunctional::new(vec![0.1, 0.5, 0.9], vec![0.2, 0.5, 0.3]).unwrap();
        let a = jensen_terms(&f, &shifted, 0.0, 1.0, JensenVariant::Derivative).unwrap();
        let b = jensen_terms(&f, &cube, 0.0, 1.0, JensenVariant::Derivative).unwrap();
        assert!((a.lower - b.lower).abs() < 1e-12);
        assert!((a.upper - b.upper).abs() < 1e-12);
        assert!(a.lower <= a.mid && a.mid <= a.upper);
    }
}
