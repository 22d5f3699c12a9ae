//! The families Υ₁ and Υ₂, mean-value points of the Γ functionals and the
//! means 𝔅_{s,t}(Υ₁), 𝔐_{s,t}(Υ₂).
//!
//! ```text
//! Υ₁:  φ_t(x) = x^t / (t(t−1)(t−2)),  φ₀ = ½ ln x,  φ₁ = −x ln x,  φ₂ = ½ x² ln x
//! Υ₂:  φ_t(x) = e^{tx} / t³,          φ₀ = x³/6
//! ```
//!
//! Both satisfy `φ_t''' > 0` (`x^{t−3}` and `e^{tx}`). Near the special
//! parameters the literal formulas cancel badly, so each [`FamilyMember`]
//! also carries a `stable` bundle that differs from the literal one by a
//! polynomial of degree at most two. The Γ functionals cannot tell the two
//! apart, and all means below are computed from the stable bundles.

use alloc::sync::Arc;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bundle::FunctionBundle;
use crate::error::{Error, Result};
use crate::expconv::{gamma, Family, GammaContext, LIMIT_THRESHOLD};
use crate::special::exp_tail;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyTag {
    Upsilon1,
    Upsilon2,
}

/// One member `φ_t` of Υ₁ or Υ₂.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub t: f64,
    pub tag: FamilyTag,
    /// The function as written.
    pub bundle: FunctionBundle,
    /// Equal to `bundle` up to a quadratic, without cancellation near the
    /// special parameters.
    pub stable: FunctionBundle,
}

/// `x^b · (c₀ + c₁ ln x + c₂ ln² x)`. Closed under differentiation.
#[derive(Debug, Clone, Copy)]
struct PowLog {
    b: f64,
    c: [f64; 3],
}

impl PowLog {
    fn eval(self, x: f64) -> f64 {
        if self.c == [0.0; 3] {
            return 0.0;
        }
        if x == 0.0 {
            if self.b > 0.0 {
                return 0.0;
            }
            if self.b == 0.0 && self.c[1] == 0.0 && self.c[2] == 0.0 {
                return self.c[0];
            }
        }
        let l = x.ln();
        x.powf(self.b) * (self.c[0] + l * (self.c[1] + l * self.c[2]))
    }

    fn derivative(self) -> Self {
        let [c0, c1, c2] = self.c;
        Self {
            b: self.b - 1.0,
            c: [self.b * c0 + c1, self.b * c1 + 2.0 * c2, self.b * c2],
        }
    }

    fn bundle(self) -> FunctionBundle {
        let d1 = self.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        FunctionBundle::new(0.0, f64::INFINITY, move |x| self.eval(x))
            .expect("valid domain")
            .with_d1(move |x| d1.eval(x))
            .with_d2(move |x| d2.eval(x))
            .with_d3(move |x| d3.eval(x))
    }
}

/// The special parameter of Υ₁ nearest to `t`, when closer than 1/2.
fn near_special(t: f64) -> Option<f64> {
    let k = t.round();
    ((0.0..=2.0).contains(&k) && (t - k).abs() < 0.5).then_some(k)
}

/// `∏_{j ∈ {0,1,2}, j ≠ k} (t − j)` and its derivative in `t`.
fn reduced_product(t: f64, k: f64) -> (f64, f64) {
    match k as i32 {
        0 => ((t - 1.0) * (t - 2.0), 2.0 * t - 3.0),
        1 => (t * (t - 2.0), 2.0 * t - 2.0),
        _ => (t * (t - 1.0), 2.0 * t - 1.0),
    }
}

/// `(x^δ − 1)/δ` and its `δ`-derivative, exact at `δ = 0` and at `x = 0`.
fn relative_power(x: f64, delta: f64) -> (f64, f64) {
    if x == 0.0 {
        return if delta > 0.0 {
            (-1.0 / delta, 1.0 / (delta * delta))
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        };
    }
    let l = x.ln();
    (l * exp_tail(1, 0, delta * l), l * l * exp_tail(1, 1, delta * l))
}

fn pow_k(x: f64, e: f64) -> f64 {
    // x^e for the small integer exponents used below, with 0^0 = 1
    x.powi(e as i32)
}

fn upsilon1_literal(t: f64) -> FunctionBundle {
    let p = match t {
        0.0 => PowLog { b: 0.0, c: [0.0, 0.5, 0.0] },
        1.0 => PowLog { b: 1.0, c: [0.0, -1.0, 0.0] },
        2.0 => PowLog { b: 2.0, c: [0.0, 0.5, 0.0] },
        _ => PowLog {
            b: t,
            c: [1.0 / (t * (t - 1.0) * (t - 2.0)), 0.0, 0.0],
        },
    };
    p.bundle()
}

fn upsilon1_stable(t: f64) -> FunctionBundle {
    let Some(k) = near_special(t) else {
        return upsilon1_literal(t);
    };
    let delta = t - k;
    let (pi, _) = reduced_product(t, k);
    let e = move |x: f64| relative_power(x, delta).0;
    FunctionBundle::new(0.0, f64::INFINITY, move |x| pow_k(x, k) * e(x) / pi)
        .expect("valid domain")
        .with_d1(move |x| pow_k(x, k - 1.0) * (t * e(x) + 1.0) / pi)
        .with_d2(move |x| pow_k(x, k - 2.0) * (t * (t - 1.0) * e(x) + (t + k - 1.0)) / pi)
        .with_d3(move |x| x.powf(t - 3.0))
}

/// `∂φ̃_t/∂t` for the stable Υ₁ representative near a special parameter.
fn upsilon1_stable_dt(t: f64, k: f64) -> FunctionBundle {
    let delta = t - k;
    let (pi, dpi) = reduced_product(t, k);
    let w = dpi / (pi * pi);
    let e = move |x: f64| relative_power(x, delta);
    FunctionBundle::new(0.0, f64::INFINITY, move |x| {
        let (e0, e1) = e(x);
        pow_k(x, k) * (e1 / pi - e0 * w)
    })
    .expect("valid domain")
    .with_d1(move |x| {
        let (e0, e1) = e(x);
        pow_k(x, k - 1.0) * ((e0 + t * e1) / pi - (t * e0 + 1.0) * w)
    })
    .with_d2(move |x| {
        let (e0, e1) = e(x);
        let a = (2.0 * t - 1.0) * e0 + t * (t - 1.0) * e1 + 1.0;
        let b = t * (t - 1.0) * e0 + t + k - 1.0;
        pow_k(x, k - 2.0) * (a / pi - b * w)
    })
    .with_d3(move |x| if x == 0.0 && t > 3.0 { 0.0 } else { x.powf(t - 3.0) * x.ln() })
}

/// Member `t` of Υ₁.
pub fn upsilon1(t: f64) -> FamilyMember {
    FamilyMember {
        t,
        tag: FamilyTag::Upsilon1,
        bundle: upsilon1_literal(t),
        stable: upsilon1_stable(t),
    }
}

fn upsilon2_literal(t: f64) -> FunctionBundle {
    if t == 0.0 {
        return FunctionBundle::monomial(3).scale(1.0 / 6.0);
    }
    let (c0, c1, c2) = (1.0 / (t * t * t), 1.0 / (t * t), 1.0 / t);
    FunctionBundle::new(f64::NEG_INFINITY, f64::INFINITY, move |x: f64| c0 * (t * x).exp())
        .expect("valid domain")
        .with_d1(move |x| c1 * (t * x).exp())
        .with_d2(move |x| c2 * (t * x).exp())
        .with_d3(move |x| (t * x).exp())
}

fn upsilon2_stable(t: f64) -> FunctionBundle {
    if t.abs() >= 1.0 {
        return upsilon2_literal(t);
    }
    // (e^{tx} − Σ_{j<3} (tx)^j/j!)/t³ = x³ g₃(tx), and so on down the derivatives
    FunctionBundle::new(f64::NEG_INFINITY, f64::INFINITY, move |x: f64| x * x * x * exp_tail(3, 0, t * x))
        .expect("valid domain")
        .with_d1(move |x| x * x * exp_tail(2, 0, t * x))
        .with_d2(move |x| x * exp_tail(1, 0, t * x))
        .with_d3(move |x| (t * x).exp())
}

/// `∂φ̃_t/∂t` for the stable Υ₂ representative.
fn upsilon2_stable_dt(t: f64) -> FunctionBundle {
    FunctionBundle::new(f64::NEG_INFINITY, f64::INFINITY, move |x: f64| x.powi(4) * exp_tail(3, 1, t * x))
        .expect("valid domain")
        .with_d1(move |x| x.powi(3) * exp_tail(2, 1, t * x))
        .with_d2(move |x| x * x * exp_tail(1, 1, t * x))
        .with_d3(move |x| x * (t * x).exp())
}

/// Member `t` of Υ₂.
pub fn upsilon2(t: f64) -> FamilyMember {
    FamilyMember {
        t,
        tag: FamilyTag::Upsilon2,
        bundle: upsilon2_literal(t),
        stable: upsilon2_stable(t),
    }
}

/// `t ↦ φ_t` of Υ₁, stable representatives.
pub fn upsilon1_family() -> Family {
    Arc::new(upsilon1_stable)
}

/// `t ↦ φ_t` of Υ₂, stable representatives.
pub fn upsilon2_family() -> Family {
    Arc::new(upsilon2_stable)
}

/// `φ_s·φ₀` for Υ₁ with `φ₀ = ½ ln x`, built in closed form.
pub fn upsilon1_times_phi0(s: f64) -> FunctionBundle {
    let p = match s {
        0.0 => PowLog { b: 0.0, c: [0.0, 0.0, 0.25] },
        1.0 => PowLog { b: 1.0, c: [0.0, 0.0, -0.5] },
        2.0 => PowLog { b: 2.0, c: [0.0, 0.0, 0.25] },
        _ => PowLog {
            b: s,
            c: [0.0, 0.5 / (s * (s - 1.0) * (s - 2.0)), 0.0],
        },
    };
    p.bundle()
}

/// `x·φ_s(x)` for Υ₂, built in closed form.
pub fn upsilon2_times_identity(s: f64) -> FunctionBundle {
    if s == 0.0 {
        return FunctionBundle::monomial(4).scale(1.0 / 6.0);
    }
    let c = 1.0 / (s * s * s);
    // d^n/dx^n [x e^{sx}] = (n s^{n−1} + s^n x) e^{sx}
    FunctionBundle::new(f64::NEG_INFINITY, f64::INFINITY, move |x: f64| c * x * (s * x).exp())
        .expect("valid domain")
        .with_d1(move |x| c * (1.0 + s * x) * (s * x).exp())
        .with_d2(move |x| c * (2.0 * s + s * s * x) * (s * x).exp())
        .with_d3(move |x| c * (3.0 * s * s + s * s * s * x) * (s * x).exp())
}

/// A mean-value point. `unique` is false when the defining equation holds on
/// the whole interval and the midpoint was returned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValuePoint {
    pub xi: f64,
    pub unique: bool,
}

/// Slack for the mean-value target lying in the range of `φ'''`.
pub const MVT_TOLERANCE: f64 = 1e-9;
const MONOTONE_SAMPLES: usize = 64;

/// Invert a monotone `g` on `[m, M]` at `target` by bisection.
fn invert_monotone<G: Fn(f64) -> f64>(g: G, target: f64, m: f64, big_m: f64) -> Result<MeanValuePoint> {
    let samples: alloc::vec::Vec<f64> = (0..=MONOTONE_SAMPLES)
        .map(|i| g(m + (big_m - m) * i as f64 / MONOTONE_SAMPLES as f64))
        .collect();
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::InverseUndefined);
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = MVT_TOLERANCE * target.abs().max(1.0);
    if hi - lo <= 1e-12 * lo.abs().max(hi.abs()) {
        if (target - 0.5 * (lo + hi)).abs() > slack {
            return Err(Error::MvtViolated { target, lo, hi });
        }
        return Ok(MeanValuePoint {
            xi: 0.5 * (m + big_m),
            unique: false,
        });
    }
    let increasing = samples[MONOTONE_SAMPLES] >= samples[0];
    let noise = 1e-12 * lo.abs().max(hi.abs());
    let monotone = samples.windows(2).all(|w| {
        if increasing {
            w[1] >= w[0] - noise
        } else {
            w[1] <= w[0] + noise
        }
    });
    if !monotone {
        return Err(Error::InverseUndefined);
    }
    if target < lo - slack || target > hi + slack {
        return Err(Error::MvtViolated { target, lo, hi });
    }
    let (mut a, mut b) = (m, big_m);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a <= 1e-12 || mid <= a || mid >= b {
            break;
        }
        let below = g(mid) < target;
        if below == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(MeanValuePoint {
        xi: 0.5 * (a + b),
        unique: true,
    })
}

/// `ξ ∈ [m, M]` with `Γ(φ) = φ'''(ξ)/6 · Γ(x³)`.
pub fn mvt_xi(ctx: &GammaContext, bundle: &FunctionBundle) -> Result<MeanValuePoint> {
    bundle.require(3)?;
    let (m, big_m) = ctx.interval();
    let reference = gamma(ctx, &FunctionBundle::monomial(3))?;
    let scale = m.abs().max(big_m.abs()).max(big_m - m);
    if reference.abs() <= 64.0 * f64::EPSILON * scale * scale * scale {
        return Err(Error::VanishingDenominator);
    }
    let target = 6.0 * gamma(ctx, bundle)? / reference;
    invert_monotone(|x| bundle.d3(x).unwrap_or(f64::NAN), target, m, big_m)
}

/// `ξ ∈ [m, M]` with `Γ(φ₁)/Γ(φ₂) = φ₁'''(ξ)/φ₂'''(ξ)`.
pub fn cauchy_xi(ctx: &GammaContext, b1: &FunctionBundle, b2: &FunctionBundle) -> Result<MeanValuePoint> {
    b1.require(3)?;
    b2.require(3)?;
    let (m, big_m) = ctx.interval();
    let g2 = gamma(ctx, b2)?;
    if g2 == 0.0 || !g2.is_finite() {
        return Err(Error::VanishingDenominator);
    }
    let target = gamma(ctx, b1)? / g2;
    invert_monotone(
        |x| {
            let (a, b) = (b1.d3(x).unwrap_or(f64::NAN), b2.d3(x).unwrap_or(f64::NAN));
            if b == 0.0 {
                f64::NAN
            } else {
                a / b
            }
        },
        target,
        m,
        big_m,
    )
}

fn positive_gamma(ctx: &GammaContext, bundle: &FunctionBundle, t: f64) -> Result<f64> {
    let value = gamma(ctx, bundle)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositiveCurve { t, value })
    }
}

/// `𝔅_{s,t}(Υ₁) = (Γ(φ_s)/Γ(φ_t))^{1/(s−t)}` and its limits at `s = t`:
///
/// ```text
/// s = t ∉ {0,1,2}:  exp(2Γ(φ_s φ₀)/Γ(φ_s) − (3s² − 6s + 2)/(s(s−1)(s−2)))
/// s = t = 0:        exp(Γ(φ₀²)/Γ(φ₀) + 3/2)
/// s = t = 1:        exp(Γ(φ₀ φ₁)/Γ(φ₁))
/// s = t = 2:        exp(Γ(φ₀ φ₂)/Γ(φ₂) − 3/2)
/// ```
///
/// Within 1/2 of 0, 1 or 2 (but not on them) the first row cancels badly and
/// the same quantity `exp(Γ(∂φ_s/∂s)/Γ(φ_s))` is evaluated from the stable
/// representative instead. Parameters closer than `1e-8` use the limit at
/// their midpoint.
pub fn mean_b1(ctx: &GammaContext, s: f64, t: f64) -> Result<f64> {
    if (s - t).abs() > LIMIT_THRESHOLD {
        let gs = positive_gamma(ctx, &upsilon1_stable(s), s)?;
        let gt = positive_gamma(ctx, &upsilon1_stable(t), t)?;
        return Ok(((gs.ln() - gt.ln()) / (s - t)).exp());
    }
    let s = if s == t { s } else { 0.5 * (s + t) };
    let base = positive_gamma(ctx, &upsilon1_stable(s), s)?;
    let exponent = if s == 0.0 || s == 1.0 || s == 2.0 {
        let shift = [1.5, 0.0, -1.5][s as usize];
        gamma(ctx, &upsilon1_times_phi0(s))? / base + shift
    } else if let Some(k) = near_special(s) {
        gamma(ctx, &upsilon1_stable_dt(s, k))? / base
    } else {
        let c = (3.0 * s * s - 6.0 * s + 2.0) / (s * (s - 1.0) * (s - 2.0));
        2.0 * gamma(ctx, &upsilon1_times_phi0(s))? / base - c
    };
    Ok(exponent.exp())
}

/// `𝔐_{s,t}(Υ₂) = ln(Γ(φ_s)/Γ(φ_t))/(s − t)` and its limits at `s = t`:
///
/// ```text
/// s = t ≠ 0:  Γ(id·φ_s)/Γ(φ_s) − 3/s
/// s = t = 0:  Γ(id·φ₀)/(4Γ(φ₀))
/// ```
///
/// For `0 < |s| < 1` the first row cancels badly and `Γ(∂φ_s/∂s)/Γ(φ_s)` is
/// evaluated from the stable representative instead.
pub fn mean_m2(ctx: &GammaContext, s: f64, t: f64) -> Result<f64> {
    if (s - t).abs() > LIMIT_THRESHOLD {
        let gs = positive_gamma(ctx, &upsilon2_stable(s), s)?;
        let gt = positive_gamma(ctx, &upsilon2_stable(t), t)?;
        return Ok((gs.ln() - gt.ln()) / (s - t));
    }
    let s = if s == t { s } else { 0.5 * (s + t) };
    let base = positive_gamma(ctx, &upsilon2_stable(s), s)?;
    if s == 0.0 {
        Ok(gamma(ctx, &upsilon2_times_identity(0.0))? / (4.0 * base))
    } else if s.abs() < 1.0 {
        Ok(gamma(ctx, &upsilon2_stable_dt(s))? / base)
    } else {
        Ok(gamma(ctx, &upsilon2_times_identity(s))? / base - 3.0 / s)
    }
}
