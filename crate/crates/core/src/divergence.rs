//! Generalized Csiszár f-divergence `D̃_f(p, q) = Σ qᵢ f(pᵢ/qᵢ)` for 3-convex
//! generators, and its Edmundson-Lah-Ribarič type bounds.
//!
//! The bounds are the derivative and Taylor bounds of [`crate::elr`] applied
//! to the functional with nodes `pᵢ/qᵢ` and weights `qᵢ`, for which
//! `A(f) = Σ pᵢ = 1`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bundle::FunctionBundle;
use crate::divided_diff::{certify_3convex, Verdict};
use crate::elr::{self, BoundKind, BoundReport, BoundTerms, Direction};
use crate::error::{Error, Result};
use crate::functional::{check_interval, DiscreteFunctional};
use crate::special::compensated_sum;

/// Tolerance on `Σ entries = 1` for [`ProbabilityVector`].
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// Grid size for the convexity spot-check done before bounds are computed.
pub const SPOT_CHECK_GRID: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    KullbackLeibler,
    Hellinger,
    Renyi,
    Harmonic,
    Jeffreys,
    Custom,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::KullbackLeibler => "kl",
            GeneratorKind::Hellinger => "hellinger",
            GeneratorKind::Renyi => "renyi",
            GeneratorKind::Harmonic => "harmonic",
            GeneratorKind::Jeffreys => "jeffreys",
            GeneratorKind::Custom => "custom",
        }
    }
}

/// A divergence generator `f` on `[0, ∞)` together with its 3-convexity sign.
#[derive(Debug, Clone)]
pub struct GeneratorFunction {
    name: String,
    kind: GeneratorKind,
    params: Vec<f64>,
    bundle: FunctionBundle,
    direction: Direction,
    at_zero: f64,
    slope_at_infinity: f64,
}

/// Coefficient times power that stays 0 when the coefficient is 0, even where
/// the power is infinite.
fn cpow(c: f64, t: f64, e: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * t.powf(e)
    }
}

impl GeneratorFunction {
    /// A user supplied generator.
    ///
    /// `at_zero` is `lim_{t→0+} f(t)` and `slope_at_infinity` is
    /// `lim_{t→∞} f(t)/t`; both may be infinite.
    pub fn custom(
        name: &str,
        bundle: FunctionBundle,
        direction: Direction,
        at_zero: f64,
        slope_at_infinity: f64,
    ) -> Result<Self> {
        for order in 1..=3 {
            bundle.require(order)?;
        }
        Ok(Self {
            name: name.to_string(),
            kind: GeneratorKind::Custom,
            params: Vec::new(),
            bundle,
            direction,
            at_zero,
            slope_at_infinity,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn bundle(&self) -> &FunctionBundle {
        &self.bundle
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Same generator with a different declared direction. Used when `f'''`
    /// vanishes identically and both orientations hold.
    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    /// `lim_{t→0+} f(t)`.
    pub fn at_zero(&self) -> f64 {
        self.at_zero
    }

    /// `lim_{t→∞} f(t)/t`.
    pub fn slope_at_infinity(&self) -> f64 {
        self.slope_at_infinity
    }

    /// `f(t)` with `f(0)` read as the right limit.
    pub fn value(&self, t: f64) -> f64 {
        if t == 0.0 {
            self.at_zero
        } else {
            self.bundle.value(t)
        }
    }
}

/// Build one of the named generators.
///
/// | name        | `f(t)`            | `params` |
/// |-------------|-------------------|----------|
/// | `kl`        | `t ln t`          |          |
/// | `hellinger` | `½(1 − √t)²`      |          |
/// | `renyi`     | `t^α`             | `[α]`    |
/// | `harmonic`  | `2t/(1 + t)`      |          |
/// | `jeffreys`  | `(t − 1) ln t`    |          |
///
/// `custom` generators go through [`GeneratorFunction::custom`].
pub fn generator(name: &str, params: &[f64]) -> Result<GeneratorFunction> {
    let inf = f64::INFINITY;
    let (kind, bundle, direction, at_zero, slope) = match name {
        "kl" => {
            let b = FunctionBundle::new(0.0, inf, |t: f64| if t == 0.0 { 0.0 } else { t * t.ln() })?
                .with_d1(|t| t.ln() + 1.0)
                .with_d2(|t| 1.0 / t)
                .with_d3(|t| -1.0 / (t * t));
            (GeneratorKind::KullbackLeibler, b, Direction::NegThreeConvex, 0.0, inf)
        }
        "hellinger" => {
            let b = FunctionBundle::new(0.0, inf, |t: f64| {
                let r = 1.0 - t.sqrt();
                0.5 * r * r
            })?
            .with_d1(|t| 0.5 - 0.5 / t.sqrt())
            .with_d2(|t| 0.25 / (t * t.sqrt()))
            .with_d3(|t| -0.375 / (t * t * t.sqrt()));
            (GeneratorKind::Hellinger, b, Direction::NegThreeConvex, 0.5, 0.5)
        }
        "renyi" => {
            let &[alpha] = params else {
                return Err(Error::MissingParameter("alpha"));
            };
            if !alpha.is_finite() {
                return Err(Error::InvalidParameter { name: "alpha", value: alpha });
            }
            let c1 = alpha;
            let c2 = alpha * (alpha - 1.0);
            let c3 = c2 * (alpha - 2.0);
            let b = FunctionBundle::new(0.0, inf, move |t: f64| t.powf(alpha))?
                .with_d1(move |t| cpow(c1, t, alpha - 1.0))
                .with_d2(move |t| cpow(c2, t, alpha - 2.0))
                .with_d3(move |t| cpow(c3, t, alpha - 3.0));
            let direction = if (0.0..=1.0).contains(&alpha) || alpha >= 2.0 {
                Direction::ThreeConvex
            } else {
                Direction::NegThreeConvex
            };
            let at_zero = if alpha > 0.0 {
                0.0
            } else if alpha == 0.0 {
                1.0
            } else {
                inf
            };
            let slope = if alpha < 1.0 {
                0.0
            } else if alpha == 1.0 {
                1.0
            } else {
                inf
            };
            (GeneratorKind::Renyi, b, direction, at_zero, slope)
        }
        "harmonic" => {
            let b = FunctionBundle::new(0.0, inf, |t: f64| 2.0 * t / (1.0 + t))?
                .with_d1(|t| 2.0 / ((1.0 + t) * (1.0 + t)))
                .with_d2(|t| -4.0 / (1.0 + t).powi(3))
                .with_d3(|t| 12.0 / (1.0 + t).powi(4));
            (GeneratorKind::Harmonic, b, Direction::ThreeConvex, 0.0, 0.0)
        }
        "jeffreys" => {
            let b = FunctionBundle::new(0.0, inf, |t: f64| (t - 1.0) * t.ln())?
                .with_d1(|t| t.ln() + 1.0 - 1.0 / t)
                .with_d2(|t| 1.0 / t + 1.0 / (t * t))
                .with_d3(|t| -1.0 / (t * t) - 2.0 / (t * t * t));
            (GeneratorKind::Jeffreys, b, Direction::NegThreeConvex, inf, inf)
        }
        other => return Err(Error::UnknownGenerator(other.to_string())),
    };
    Ok(GeneratorFunction {
        name: name.to_string(),
        kind,
        params: params.to_vec(),
        bundle,
        direction,
        at_zero,
        slope_at_infinity: slope,
    })
}

/// Nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    entries: Vec<f64>,
}

impl ProbabilityVector {
    /// Checks `entries ≥ 0` and `|Σ entries − 1| ≤ 1e-12`.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in entries.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        let sum = compensated_sum(entries.iter().copied());
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::WeightSum { sum });
        }
        Ok(Self { entries })
    }

    /// Divide nonnegative weights by their sum.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        for (index, &value) in weights.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        let sum = compensated_sum(weights.iter().copied());
        if !(sum > 0.0) {
            return Err(Error::WeightSum { sum });
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn same_len(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}

/// `Σ qᵢ f(pᵢ/qᵢ)` under Csiszár's conventions:
///
/// - `pᵢ = qᵢ = 0` contributes 0,
/// - `qᵢ = 0 < pᵢ` contributes `pᵢ · lim f(t)/t` (possibly `+∞`),
/// - `pᵢ = 0 < qᵢ` contributes `qᵢ f(0+)`.
///
/// An infinite result is returned as is.
pub fn f_divergence(p: &ProbabilityVector, q: &ProbabilityVector, gen: &GeneratorFunction) -> Result<f64> {
    same_len(p, q)?;
    let terms = p.entries.iter().zip(&q.entries).map(|(&pi, &qi)| {
        if qi == 0.0 {
            if pi == 0.0 {
                0.0
            } else {
                pi * gen.slope_at_infinity
            }
        } else {
            qi * gen.value(pi / qi)
        }
    });
    let terms: Vec<f64> = terms.collect();
    if terms.iter().any(|t| t.is_infinite()) {
        let pos = terms.iter().any(|&t| t == f64::INFINITY);
        let neg = terms.iter().any(|&t| t == f64::NEG_INFINITY);
        return Ok(match (pos, neg) {
            (true, false) => f64::INFINITY,
            (false, true) => f64::NEG_INFINITY,
            _ => f64::NAN,
        });
    }
    Ok(compensated_sum(terms))
}

/// The named divergence formulas in their usual textbook display, which may
/// differ from `Σ qᵢ f(pᵢ/qᵢ)` by argument order or a constant factor:
///
/// | kind        | formula                          |
/// |-------------|----------------------------------|
/// | `kl`        | `Σ qᵢ ln(qᵢ/pᵢ)`                 |
/// | `hellinger` | `½ Σ (√qᵢ − √pᵢ)²`               |
/// | `renyi`     | `Σ qᵢ^(α−1) pᵢ^α`                |
/// | `harmonic`  | `Σ 2pᵢqᵢ/(pᵢ + qᵢ)`              |
/// | `jeffreys`  | `½ Σ (qᵢ − pᵢ) ln(qᵢ/pᵢ)`        |
///
/// Terms with `pᵢ = qᵢ = 0` are skipped. Reported next to [`f_divergence`]
/// for comparison only.
pub fn named_divergence(
    kind: GeneratorKind,
    p: &ProbabilityVector,
    q: &ProbabilityVector,
    params: &[f64],
) -> Result<f64> {
    same_len(p, q)?;
    let alpha = match (kind, params) {
        (GeneratorKind::Renyi, &[a]) => a,
        (GeneratorKind::Renyi, _) => return Err(Error::MissingParameter("alpha")),
        (GeneratorKind::Custom, _) => return Err(Error::UnknownGenerator("custom".to_string())),
        _ => 0.0,
    };
    let terms = p
        .entries
        .iter()
        .zip(&q.entries)
        .filter(|(&pi, &qi)| pi != 0.0 || qi != 0.0)
        .map(|(&pi, &qi)| match kind {
            GeneratorKind::KullbackLeibler => {
                if qi == 0.0 {
                    0.0
                } else {
                    qi * (qi / pi).ln()
                }
            }
            GeneratorKind::Hellinger => {
                let d = qi.sqrt() - pi.sqrt();
                0.5 * d * d
            }
            GeneratorKind::Renyi => qi.powf(alpha - 1.0) * pi.powf(alpha),
            GeneratorKind::Harmonic => 2.0 * pi * qi / (pi + qi),
            GeneratorKind::Jeffreys => 0.5 * (qi - pi) * (qi / pi).ln(),
            GeneratorKind::Custom => f64::NAN,
        });
    Ok(compensated_sum(terms))
}

/// Which divergence bound pair to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceTheorem {
    Derivative,
    Taylor,
}

/// The ratio functional: nodes `pᵢ/qᵢ`, weights `qᵢ`, entries with
/// `pᵢ = qᵢ = 0` dropped.
pub fn ratio_functional(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<DiscreteFunctional> {
    same_len(p, q)?;
    let mut nodes = Vec::with_capacity(p.len());
    let mut weights = Vec::with_capacity(p.len());
    for (index, (&pi, &qi)) in p.entries.iter().zip(&q.entries).enumerate() {
        if qi == 0.0 {
            if pi == 0.0 {
                continue;
            }
            return Err(Error::UnboundedRatio { index });
        }
        nodes.push(pi / qi);
        weights.push(qi);
    }
    DiscreteFunctional::new(nodes, weights)
}

/// `[min pᵢ/qᵢ, max pᵢ/qᵢ]` widened to contain 1.
pub fn auto_interval(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<(f64, f64)> {
    let f = ratio_functional(p, q)?;
    let lo = f.nodes().iter().copied().fold(f64::INFINITY, f64::min);
    let hi = f.nodes().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo.min(1.0), hi.max(1.0)))
}

fn check_hypotheses(gen: &GeneratorFunction, m: f64, big_m: f64) -> Result<()> {
    check_interval(m, big_m)?;
    if !(m <= 1.0 && 1.0 <= big_m) {
        return Err(Error::IntervalExcludesOne { lo: m, hi: big_m });
    }
    gen.direction.orientation()?;
    let signed = match gen.direction {
        Direction::NegThreeConvex => gen.bundle.neg(),
        _ => gen.bundle.clone(),
    };
    let cert = certify_3convex(&signed, m, big_m, SPOT_CHECK_GRID)?;
    match cert.verdict {
        Verdict::ThreeConvex | Verdict::Indeterminate => Ok(()),
        _ => Err(Error::HypothesesUnmet("generator direction contradicted on [m, M]")),
    }
}

/// Bound expressions for an arbitrary bundle on the ratio functional,
/// without any convexity check. Used by the Γ functionals.
pub fn divergence_terms(
    p: &ProbabilityVector,
    q: &ProbabilityVector,
    bundle: &FunctionBundle,
    m: f64,
    big_m: f64,
    theorem: DivergenceTheorem,
) -> Result<BoundTerms> {
    check_interval(m, big_m)?;
    if !(m <= 1.0 && 1.0 <= big_m) {
        return Err(Error::IntervalExcludesOne { lo: m, hi: big_m });
    }
    let f = ratio_functional(p, q)?;
    match theorem {
        DivergenceTheorem::Derivative => elr::derivative_terms(&f, bundle, m, big_m),
        DivergenceTheorem::Taylor => elr::taylor_terms(&f, bundle, m, big_m),
    }
}

/// The derivative or Taylor bound pair around
/// `(M − 1)/(M − m)·f(m) + (1 − m)/(M − m)·f(M) − D̃_f(p, q)`.
///
/// Requires `m ≤ 1 ≤ M`, every ratio in `[m, M]` and `qᵢ > 0` wherever
/// `pᵢ > 0`. The declared direction of the generator is spot-checked on
/// `[m, M]` first.
pub fn divergence_bounds(
    p: &ProbabilityVector,
    q: &ProbabilityVector,
    gen: &GeneratorFunction,
    m: f64,
    big_m: f64,
    theorem: DivergenceTheorem,
) -> Result<BoundReport> {
    check_hypotheses(gen, m, big_m)?;
    let terms = divergence_terms(p, q, &gen.bundle, m, big_m, theorem)?;
    Ok(BoundReport {
        lower: terms.lower,
        upper: terms.upper,
        mid: terms.mid,
        orientation: gen.direction.orientation()?,
        theorem: match theorem {
            DivergenceTheorem::Derivative => BoundKind::Derivative,
            DivergenceTheorem::Taylor => BoundKind::Taylor,
        },
    })
}
