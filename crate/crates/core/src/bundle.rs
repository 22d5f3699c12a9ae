//! Scalar functions carried together with their first three derivatives.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;


use crate::error::{Error, Result};

/// Shared scalar function.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One-sided derivative values at the ends of a bundle's domain.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EndpointDerivatives {
    pub d1_plus_at_lo: Option<f64>,
    pub d1_minus_at_hi: Option<f64>,
    pub d2_plus_at_lo: Option<f64>,
    pub d2_minus_at_hi: Option<f64>,
}

/// A function on `[domain_lo, domain_hi]` with optional derivatives up to order three.
///
/// Missing derivatives are recorded as `None`. One-sided derivative values at
/// the domain ends are stored explicitly; they are used wherever a bound asks
/// for `φ'₊(m)` or `φ'₋(M)` with `m`/`M` on the domain boundary. Away from the
/// boundary the two-sided derivative is used.
#[derive(Clone)]
pub struct FunctionBundle {
    lo: f64,
    hi: f64,
    f: ScalarFn,
    derivs: [Option<ScalarFn>; 3],
    ends: EndpointDerivatives,
}

impl fmt::Debug for FunctionBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionBundle")
            .field("domain", &(self.lo, self.hi))
            .field("available", &self.availability())
            .field("ends", &self.ends)
            .finish()
    }
}

fn arc<F: Fn(f64) -> f64 + Send + Sync + 'static>(g: F) -> ScalarFn {
    Arc::new(g)
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl FunctionBundle {
    /// Bundle with only function values. `lo` may be `-∞` and `hi` may be `+∞`.
    pub fn new<F>(lo: f64, hi: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidDomain { lo, hi });
        }
        Ok(Self {
            lo,
            hi,
            f: arc(f),
            derivs: [None, None, None],
            ends: EndpointDerivatives::default(),
        })
    }

    /// Attach the first derivative; endpoint values are filled from it where finite.
    pub fn with_d1<F>(mut self, d1: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if self.lo.is_finite() {
            self.ends.d1_plus_at_lo = finite(d1(self.lo));
        }
        if self.hi.is_finite() {
            self.ends.d1_minus_at_hi = finite(d1(self.hi));
        }
        self.derivs[0] = Some(arc(d1));
        self
    }

    /// Attach the second derivative; endpoint values are filled from it where finite.
    pub fn with_d2<F>(mut self, d2: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if self.lo.is_finite() {
            self.ends.d2_plus_at_lo = finite(d2(self.lo));
        }
        if self.hi.is_finite() {
            self.ends.d2_minus_at_hi = finite(d2(self.hi));
        }
        self.derivs[1] = Some(arc(d2));
        self
    }

    pub fn with_d3<F>(mut self, d3: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.derivs[2] = Some(arc(d3));
        self
    }

    /// Override the stored one-sided endpoint values.
    pub fn with_endpoint_derivatives(mut self, ends: EndpointDerivatives) -> Self {
        self.ends = ends;
        self
    }

    /// `x ↦ x` on the whole real line.
    pub fn identity() -> Self {
        Self::polynomial(&[0.0, 1.0])
    }

    /// `x ↦ x^k` on the whole real line.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = alloc::vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self::polynomial(&coeffs)
    }

    /// Polynomial with coefficients in ascending order: `c[0] + c[1] x + …`.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        let c0: Vec<f64> = coeffs.to_vec();
        let c1 = poly_derivative(&c0);
        let c2 = poly_derivative(&c1);
        let c3 = poly_derivative(&c2);
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            f: arc(move |x| horner(&c0, x)),
            derivs: [
                Some(arc(move |x| horner(&c1, x))),
                Some(arc(move |x| horner(&c2, x))),
                Some(arc(move |x| horner(&c3, x))),
            ],
            ends: EndpointDerivatives::default(),
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn endpoint_derivatives(&self) -> EndpointDerivatives {
        self.ends
    }

    /// Which of `d1`, `d2`, `d3` are present.
    pub fn availability(&self) -> [bool; 3] {
        [
            self.derivs[0].is_some(),
            self.derivs[1].is_some(),
            self.derivs[2].is_some(),
        ]
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn d1(&self, x: f64) -> Option<f64> {
        self.derivs[0].as_ref().map(|g| g(x))
    }

    pub fn d2(&self, x: f64) -> Option<f64> {
        self.derivs[1].as_ref().map(|g| g(x))
    }

    pub fn d3(&self, x: f64) -> Option<f64> {
        self.derivs[2].as_ref().map(|g| g(x))
    }

    /// Derivative of order `order` (0..=3) as a plain value.
    pub fn derivative(&self, order: usize, x: f64) -> Option<f64> {
        match order {
            0 => Some(self.value(x)),
            1..=3 => self.derivs[order - 1].as_ref().map(|g| g(x)),
            _ => None,
        }
    }

    /// Right derivative; the stored value is used at the lower domain end.
    pub fn d1_right(&self, x: f64) -> Option<f64> {
        if x == self.lo {
            self.ends.d1_plus_at_lo.or_else(|| self.d1(x).and_then(finite))
        } else {
            self.d1(x)
        }
    }

    /// Left derivative; the stored value is used at the upper domain end.
    pub fn d1_left(&self, x: f64) -> Option<f64> {
        if x == self.hi {
            self.ends.d1_minus_at_hi.or_else(|| self.d1(x).and_then(finite))
        } else {
            self.d1(x)
        }
    }

    pub fn d2_right(&self, x: f64) -> Option<f64> {
        if x == self.lo {
            self.ends.d2_plus_at_lo.or_else(|| self.d2(x).and_then(finite))
        } else {
            self.d2(x)
        }
    }

    pub fn d2_left(&self, x: f64) -> Option<f64> {
        if x == self.hi {
            self.ends.d2_minus_at_hi.or_else(|| self.d2(x).and_then(finite))
        } else {
            self.d2(x)
        }
    }

    /// Derivative at `x` taken from inside the domain: right-sided at the
    /// lower end, left-sided at the upper end, two-sided elsewhere.
    pub fn inner_derivative(&self, order: usize, x: f64) -> Option<f64> {
        match order {
            0 => Some(self.value(x)),
            1 if x == self.lo => self.d1_right(x),
            1 if x == self.hi => self.d1_left(x),
            2 if x == self.lo => self.d2_right(x),
            2 if x == self.hi => self.d2_left(x),
            _ => self.derivative(order, x),
        }
    }

    pub(crate) fn require(&self, order: usize) -> Result<()> {
        let needed = match order {
            1 => "d1",
            2 => "d2",
            _ => "d3",
        };
        if (1..=3).contains(&order) && self.derivs[order - 1].is_none() {
            return Err(Error::InsufficientBundle { needed });
        }
        Ok(())
    }

    pub(crate) fn check_inside(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                point: x,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }

    /// `-φ`; negates values, derivatives and endpoint data exactly.
    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// `a·φ`.
    pub fn scale(&self, a: f64) -> Self {
        let f = self.f.clone();
        let derivs = self
            .derivs
            .clone()
            .map(|d| d.map(|g| arc(move |x| a * g(x))));
        let m = |v: Option<f64>| v.map(|v| a * v);
        Self {
            lo: self.lo,
            hi: self.hi,
            f: arc(move |x| a * f(x)),
            derivs,
            ends: EndpointDerivatives {
                d1_plus_at_lo: m(self.ends.d1_plus_at_lo),
                d1_minus_at_hi: m(self.ends.d1_minus_at_hi),
                d2_plus_at_lo: m(self.ends.d2_plus_at_lo),
                d2_minus_at_hi: m(self.ends.d2_minus_at_hi),
            },
        }
    }

    /// `φ + ψ` on the intersection of the two domains.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let (lo, hi) = intersect(self, other)?;
        let (f, g) = (self.f.clone(), other.f.clone());
        let mut derivs: [Option<ScalarFn>; 3] = [None, None, None];
        for (k, slot) in derivs.iter_mut().enumerate() {
            if let (Some(a), Some(b)) = (self.derivs[k].clone(), other.derivs[k].clone()) {
                *slot = Some(arc(move |x| a(x) + b(x)));
            }
        }
        let ends = combine_ends(lo, hi, |order, at_lo| {
            let x = if at_lo { lo } else { hi };
            Some(self.one_sided(order, x, at_lo)? + other.one_sided(order, x, at_lo)?)
        });
        Ok(Self {
            lo,
            hi,
            f: arc(move |x| f(x) + g(x)),
            derivs,
            ends,
        })
    }

    /// `φ·ψ` on the intersection of the two domains, derivatives by Leibniz' rule.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (lo, hi) = intersect(self, other)?;
        let (f, g) = (self.f.clone(), other.f.clone());
        let mut derivs: [Option<ScalarFn>; 3] = [None, None, None];
        for order in 1..=3usize {
            let left: Option<Vec<ScalarFn>> = (0..=order).map(|j| self.nth(j)).collect();
            let right: Option<Vec<ScalarFn>> = (0..=order).map(|j| other.nth(j)).collect();
            if let (Some(a), Some(b)) = (left, right) {
                derivs[order - 1] = Some(arc(move |x| {
                    (0..=order)
                        .map(|j| binomial(order, j) * a[j](x) * b[order - j](x))
                        .sum()
                }));
            }
        }
        let ends = combine_ends(lo, hi, |order, at_lo| {
            let x = if at_lo { lo } else { hi };
            let mut total = 0.0;
            for j in 0..=order {
                total += binomial(order, j)
                    * self.one_sided(j, x, at_lo)?
                    * other.one_sided(order - j, x, at_lo)?;
            }
            Some(total)
        });
        Ok(Self {
            lo,
            hi,
            f: arc(move |x| f(x) * g(x)),
            derivs,
            ends,
        })
    }

    fn nth(&self, order: usize) -> Option<ScalarFn> {
        if order == 0 {
            Some(self.f.clone())
        } else {
            self.derivs[order - 1].clone()
        }
    }

    fn one_sided(&self, order: usize, x: f64, from_right: bool) -> Option<f64> {
        match (order, from_right) {
            (0, _) => finite(self.value(x)),
            (1, true) => self.d1_right(x),
            (1, false) => self.d1_left(x),
            (2, true) => self.d2_right(x),
            (2, false) => self.d2_left(x),
            _ => None,
        }
    }

    /// Compare every available derivative with finite differences of the
    /// next lower order on `samples` interior points of `[lo, hi]`, and the
    /// stored endpoint values when the domain ends lie in `[lo, hi]`.
    ///
    /// Interior points use a central difference with tolerance
    /// `1e-6·(1 + |d|)`; the stored endpoint values use a second-order
    /// one-sided difference with tolerance `1e-5·(1 + |d|)`.
    pub fn check_derivatives(&self, lo: f64, hi: f64, samples: usize) -> core::result::Result<(), DerivativeMismatch> {
        let samples = samples.max(2);
        let width = hi - lo;
        for i in 0..samples {
            let x = lo + width * (i as f64 + 0.5) / samples as f64;
            for order in 1..=3 {
                let Some(d) = self.derivative(order, x) else { continue };
                let Some(lower) = self.nth(order - 1) else { continue };
                let h = 6e-6 * x.abs().max(1.0);
                let h = h.min(0.25 * (x - lo).min(hi - x));
                let fd = (lower(x + h) - lower(x - h)) / (2.0 * h);
                if (fd - d).abs() > 1e-6 * (1.0 + d.abs()) {
                    return Err(DerivativeMismatch { order, x, analytic: d, numeric: fd });
                }
            }
        }
        let checks = [
            (1usize, self.lo, true, self.ends.d1_plus_at_lo),
            (1, self.hi, false, self.ends.d1_minus_at_hi),
            (2, self.lo, true, self.ends.d2_plus_at_lo),
            (2, self.hi, false, self.ends.d2_minus_at_hi),
        ];
        for (order, x, right, stored) in checks {
            let (Some(d), Some(lower)) = (stored, self.nth(order - 1)) else { continue };
            if !x.is_finite() || x < lo || x > hi {
                continue;
            }
            let h = 1e-5 * x.abs().max(1.0);
            let s = if right { 1.0 } else { -1.0 };
            let fd = s * (-3.0 * lower(x) + 4.0 * lower(x + s * h) - lower(x + 2.0 * s * h)) / (2.0 * h);
            if (fd - d).abs() > 1e-5 * (1.0 + d.abs()) {
                return Err(DerivativeMismatch { order, x, analytic: d, numeric: fd });
            }
        }
        Ok(())
    }
}

/// Analytic derivative disagreeing with its finite-difference estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeMismatch {
    pub order: usize,
    pub x: f64,
    pub analytic: f64,
    pub numeric: f64,
}

fn intersect(a: &FunctionBundle, b: &FunctionBundle) -> Result<(f64, f64)> {
    let lo = a.lo.max(b.lo);
    let hi = a.hi.min(b.hi);
    if lo >= hi {
        return Err(Error::InvalidDomain { lo, hi });
    }
    Ok((lo, hi))
}

fn combine_ends<F>(lo: f64, hi: f64, mut at: F) -> EndpointDerivatives
where
    F: FnMut(usize, bool) -> Option<f64>,
{
    let mut ends = EndpointDerivatives::default();
    if lo.is_finite() {
        ends.d1_plus_at_lo = at(1, true);
        ends.d2_plus_at_lo = at(2, true);
    }
    if hi.is_finite() {
        ends.d1_minus_at_hi = at(1, false);
        ends.d2_minus_at_hi = at(2, false);
    }
    ends
}

fn binomial(n: usize, k: usize) -> f64 {
    match (n, k) {
        (_, 0) => 1.0,
        (n, k) if k == n => 1.0,
        (2, 1) => 2.0,
        (3, 1) | (3, 2) => 3.0,
        _ => {
            let mut r = 1.0;
            for i in 0..k {
                r = r * (n - i) as f64 / (i + 1) as f64;
            }
            r
        }
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| a * i as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_bundle() -> FunctionBundle {
        FunctionBundle::new(-3.0, 3.0, |x: f64| x.exp())
            .unwrap()
            .with_d1(|x: f64| x.exp())
            .with_d2(|x: f64| x.exp())
            .with_d3(|x: f64| x.exp())
    }

    #[test]
    fn rejects_bad_domain() {
        assert!(FunctionBundle::new(1.0, 1.0, |x| x).is_err());
        assert!(FunctionBundle::new(f64::NAN, 1.0, |x| x).is_err());
    }

    #[test]
    fn polynomial_derivatives() {
        let p = FunctionBundle::polynomial(&[1.0, -2.0, 0.0, 4.0]);
        assert_eq!(p.value(2.0), 1.0 - 4.0 + 32.0);
        assert_eq!(p.d1(2.0), Some(-2.0 + 48.0));
        assert_eq!(p.d2(2.0), Some(48.0));
        assert_eq!(p.d3(2.0), Some(24.0));
        assert!(p.check_derivatives(-2.0, 2.0, 17).is_ok());
    }

    #[test]
    fn endpoint_values_filled() {
        let b = exp_bundle();
        let e = b.endpoint_derivatives();
        assert_eq!(e.d1_plus_at_lo, Some((-3.0f64).exp()));
        assert_eq!(e.d2_minus_at_hi, Some(3.0f64.exp()));
        assert!(b.check_derivatives(-3.0, 3.0, 11).is_ok());
    }

    #[test]
    fn stored_one_sided_values_win_at_the_boundary() {
        // |x|-like kink handled through explicit endpoint data
        let b = FunctionBundle::new(0.0, 1.0, |x| x)
            .unwrap()
            .with_d1(|_| 1.0)
            .with_endpoint_derivatives(EndpointDerivatives {
                d1_plus_at_lo: Some(0.5),
                ..Default::default()
            });
        assert_eq!(b.d1_right(0.0), Some(0.5));
        assert_eq!(b.d1_right(0.5), Some(1.0));
        assert_eq!(b.d1_left(1.0), Some(1.0));
    }

    #[test]
    fn product_rule() {
        let e = exp_bundle();
        let x3 = FunctionBundle::monomial(3);
        let p = e.mul(&x3).unwrap();
        assert_eq!(p.domain(), (-3.0, 3.0));
        let x: f64 = 1.3;
        let ex = x.exp();
        let d3 = ex * (x.powi(3) + 9.0 * x * x + 18.0 * x + 6.0);
        assert!((p.d3(x).unwrap() - d3).abs() < 1e-12 * d3);
        assert!(p.check_derivatives(-3.0, 3.0, 21).is_ok());
    }

    #[test]
    fn negation_is_exact() {
        let e = exp_bundle();
        let n = e.neg();
        for &x in &[-2.0, 0.1, 2.9] {
            assert_eq!(n.value(x), -e.value(x));
            assert_eq!(n.d3(x), e.d3(x).map(|v| -v));
        }
        assert_eq!(
            n.endpoint_derivatives().d1_plus_at_lo,
            e.endpoint_derivatives().d1_plus_at_lo.map(|v| -v)
        );
    }

    #[test]
    fn detects_wrong_derivative() {
        let b = FunctionBundle::new(0.0, 2.0, |x| x * x)
            .unwrap()
            .with_d1(|x| 2.0 * x + 0.01);
        let err = b.check_derivatives(0.0, 2.0, 8).unwrap_err();
        assert_eq!(err.order, 1);
    }
}
