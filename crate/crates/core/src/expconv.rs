//! The functionals Γ₁..Γ₁₀, exponential convexity in the Jensen sense and
//! log-convexity checks for curves `t ↦ Γ(φ_t)`.
//!
//! Every Γ is the gap between one side of a bound chain and its middle term,
//! taken so that Γ ≥ 0 whenever `φ` is 3-convex:
//!
//! | index | chain                    | Γ             |
//! |-------|--------------------------|---------------|
//! | 1, 2  | secant                   | mid − lower, upper − mid |
//! | 3, 4  | derivative               | mid − lower, upper − mid |
//! | 5, 6  | taylor                   | mid − lower, upper − mid |
//! | 7, 8  | divergence, derivative   | mid − lower, upper − mid |
//! | 9, 10 | divergence, taylor       | mid − lower, upper − mid |
//!
//! Each Γ is linear in `φ` and vanishes on polynomials of degree at most two.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bundle::FunctionBundle;
use crate::divergence::{ratio_functional, ProbabilityVector};
use crate::elr::{self, BoundTerms};
use crate::error::{Error, Result};
use crate::functional::{check_interval, DiscreteFunctional};

/// Subsets examined per `n` by [`exp_convexity_check`].
pub const MAX_SUBSETS: usize = 200;
/// Relative eigenvalue floor of the PSD test.
pub const PSD_TOLERANCE: f64 = 1e-10;
/// Floor for `n = 1`, where the test reduces to nonnegativity.
pub const NONNEGATIVE_TOLERANCE: f64 = 1e-12;
/// Slack on the log-convexity residual.
pub const LYAPUNOV_TOLERANCE: f64 = 1e-9;
/// Below this parameter gap the quotient switches to its derivative branch.
pub const LIMIT_THRESHOLD: f64 = 1e-8;
/// Central-difference step of the derivative branch.
pub const DERIVATIVE_STEP: f64 = 1e-5;

const SUBSET_SEED: u64 = 0x5eed_0e1c;

/// What the Γ functional is built from.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaKind {
    /// A discrete functional on `[m, M]`; Γ₁..Γ₆.
    Elr {
        functional: DiscreteFunctional,
        m: f64,
        big_m: f64,
    },
    /// Two probability vectors with ratios in `[m, M]`, `m ≤ 1 ≤ M`; Γ₇..Γ₁₀.
    Divergence {
        p: ProbabilityVector,
        q: ProbabilityVector,
        m: f64,
        big_m: f64,
    },
}

/// A Γ functional: its data and its index in `1..=10`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaContext {
    kind: GammaKind,
    index: u8,
    functional: DiscreteFunctional,
}

impl GammaContext {
    /// Γ₁..Γ₆ for `functional` on `[m, M]`.
    pub fn elr(functional: DiscreteFunctional, m: f64, big_m: f64, index: u8) -> Result<Self> {
        if !(1..=6).contains(&index) {
            return Err(Error::GammaContextMismatch { index });
        }
        functional.check_nodes_in(m, big_m)?;
        Ok(Self {
            kind: GammaKind::Elr {
                functional: functional.clone(),
                m,
                big_m,
            },
            index,
            functional,
        })
    }

    /// Γ₇..Γ₁₀ for the pair `(p, q)` on `[m, M]`.
    pub fn divergence(p: ProbabilityVector, q: ProbabilityVector, m: f64, big_m: f64, index: u8) -> Result<Self> {
        if !(7..=10).contains(&index) {
            return Err(Error::GammaContextMismatch { index });
        }
        check_interval(m, big_m)?;
        if !(m <= 1.0 && 1.0 <= big_m) {
            return Err(Error::IntervalExcludesOne { lo: m, hi: big_m });
        }
        let functional = ratio_functional(&p, &q)?;
        functional.check_nodes_in(m, big_m)?;
        Ok(Self {
            kind: GammaKind::Divergence { p, q, m, big_m },
            index,
            functional,
        })
    }

    /// Same data, another index of the same kind.
    pub fn with_index(&self, index: u8) -> Result<Self> {
        let ok = match self.kind {
            GammaKind::Elr { .. } => (1..=6).contains(&index),
            GammaKind::Divergence { .. } => (7..=10).contains(&index),
        };
        if !ok {
            return Err(Error::GammaContextMismatch { index });
        }
        Ok(Self {
            index,
            ..self.clone()
        })
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn kind(&self) -> &GammaKind {
        &self.kind
    }

    /// `[m, M]`.
    pub fn interval(&self) -> (f64, f64) {
        match self.kind {
            GammaKind::Elr { m, big_m, .. } | GammaKind::Divergence { m, big_m, .. } => (m, big_m),
        }
    }

    /// The functional the bounds are evaluated on. For a divergence context it
    /// has nodes `pᵢ/qᵢ` and weights `qᵢ`.
    pub fn functional(&self) -> &DiscreteFunctional {
        &self.functional
    }

    fn terms(&self, bundle: &FunctionBundle) -> Result<BoundTerms> {
        let (m, big_m) = self.interval();
        let f = &self.functional;
        match self.index {
            1 | 2 => elr::secant_terms(f, bundle, m, big_m),
            3 | 4 | 7 | 8 => elr::derivative_terms(f, bundle, m, big_m),
            5 | 6 | 9 | 10 => elr::taylor_terms(f, bundle, m, big_m),
            index => Err(Error::GammaContextMismatch { index }),
        }
    }
}

/// `Γ_index(φ)`: `mid − lower` for odd indices, `upper − mid` for even ones.
pub fn gamma(ctx: &GammaContext, bundle: &FunctionBundle) -> Result<f64> {
    let t = ctx.terms(bundle)?;
    Ok(if ctx.index % 2 == 1 {
        t.mid - t.lower
    } else {
        t.upper - t.mid
    })
}

/// A one-parameter family `t ↦ φ_t`.
pub type Family = Arc<dyn Fn(f64) -> FunctionBundle + Send + Sync>;

/// The curve `t ↦ Γ(φ_t)` sampled on a strictly increasing grid.
#[derive(Clone)]
pub struct GammaCurve {
    context: GammaContext,
    family: Family,
    t_grid: Vec<f64>,
}

impl fmt::Debug for GammaCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GammaCurve")
            .field("context", &self.context)
            .field("t_grid", &self.t_grid)
            .finish()
    }
}

impl GammaCurve {
    pub fn new(context: GammaContext, family: Family, t_grid: Vec<f64>) -> Result<Self> {
        if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter {
                name: "t_grid",
                value: f64::NAN,
            });
        }
        Ok(Self {
            context,
            family,
            t_grid,
        })
    }

    pub fn context(&self) -> &GammaContext {
        &self.context
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `Γ(φ_t)`.
    pub fn value(&self, t: f64) -> Result<f64> {
        gamma(&self.context, &(self.family)(t))
    }

    fn positive(&self, t: f64) -> Result<f64> {
        let value = self.value(t)?;
        if value > 0.0 {
            Ok(value)
        } else {
            Err(Error::NonPositiveCurve { t, value })
        }
    }
}

/// Outcome of [`exp_convexity_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpConvexity {
    pub pass: bool,
    /// Smallest eigenvalue over all examined matrices.
    pub min_eigenvalue: f64,
    /// Smallest eigenvalue divided by `max(1, ‖G‖)` of its matrix.
    pub min_relative: f64,
    pub subsets: usize,
}

/// n-exponential convexity in the Jensen sense on the curve's grid.
///
/// For every `n`-subset of the grid (all of them when there are at most 200,
/// else 200 drawn with a fixed seed) the matrix `G_jk = Γ(φ_{(t_j+t_k)/2})`
/// must have minimum eigenvalue `≥ −1e-10·max(1, ‖G‖_F)`. For `n = 1` this is
/// `Γ(φ_t) ≥ −1e-12`.
pub fn exp_convexity_check(curve: &GammaCurve, n: usize) -> Result<ExpConvexity> {
    let len = curve.t_grid.len();
    if n == 0 || len < n {
        return Err(Error::GridTooSmall { needed: n.max(1), got: len });
    }
    let subsets = choose_subsets(len, n);
    let mut cache: BTreeMap<u64, f64> = BTreeMap::new();
    let mut value = |t: f64| -> Result<f64> {
        if let Some(&v) = cache.get(&t.to_bits()) {
            return Ok(v);
        }
        let v = curve.value(t)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { node: t, value: v });
        }
        cache.insert(t.to_bits(), v);
        Ok(v)
    };
    let mut out = ExpConvexity {
        pass: true,
        min_eigenvalue: f64::INFINITY,
        min_relative: f64::INFINITY,
        subsets: subsets.len(),
    };
    for subset in &subsets {
        let ts: Vec<f64> = subset.iter().map(|&i| curve.t_grid[i]).collect();
        let mut g = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            for k in j..n {
                let v = value(0.5 * (ts[j] + ts[k]))?;
                g[(j, k)] = v;
                g[(k, j)] = v;
            }
        }
        let (min_eig, floor) = if n == 1 {
            (g[(0, 0)], NONNEGATIVE_TOLERANCE)
        } else {
            let eig = SymmetricEigen::new(g.clone()).eigenvalues.min();
            (eig, PSD_TOLERANCE * g.norm().max(1.0))
        };
        let scale = if n == 1 { 1.0 } else { g.norm().max(1.0) };
        out.min_eigenvalue = out.min_eigenvalue.min(min_eig);
        out.min_relative = out.min_relative.min(min_eig / scale);
        if min_eig < -floor {
            out.pass = false;
        }
    }
    Ok(out)
}

fn choose_subsets(len: usize, n: usize) -> Vec<Vec<usize>> {
    let total = binomial_capped(len, n, MAX_SUBSETS + 1);
    if total <= MAX_SUBSETS {
        let mut all = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            all.push(current.clone());
            // next combination in lexicographic order
            let mut i = n;
            while i > 0 && current[i - 1] == len - n + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            current[i - 1] += 1;
            for j in i..n {
                current[j] = current[j - 1] + 1;
            }
        }
        all
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SUBSET_SEED ^ ((len as u64) << 8) ^ n as u64);
        (0..MAX_SUBSETS)
            .map(|_| {
                let mut idx = rand::seq::index::sample(&mut rng, len, n).into_vec();
                idx.sort_unstable();
                idx
            })
            .collect()
    }
}

fn binomial_capped(n: usize, k: usize, cap: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap as u128 {
            return cap;
        }
    }
    acc as usize
}

/// Log-convexity residual `(t−r) ln Γ_s − (t−s) ln Γ_r − (s−r) ln Γ_t`,
/// which is `≤ 0` for a log-convex curve. Holds when it is `≤ 1e-9`.
pub fn lyapunov_check(curve: &GammaCurve, r: f64, s: f64, t: f64) -> Result<(bool, f64)> {
    if !(r < s && s < t) {
        return Err(Error::InvalidParameter { name: "r < s < t", value: s });
    }
    let (gr, gs, gt) = (curve.positive(r)?, curve.positive(s)?, curve.positive(t)?);
    let residual = (t - r) * gs.ln() - (t - s) * gr.ln() - (s - r) * gt.ln();
    Ok((residual <= LYAPUNOV_TOLERANCE, residual))
}

/// `(Γ(φ_s)/Γ(φ_t))^{1/(s−t)}`, or `exp(d/ds ln Γ(φ_s))` by a central
/// difference with step `1e-5` when `|s − t| ≤ 1e-8`.
pub fn stolarsky_quotient(curve: &GammaCurve, s: f64, t: f64) -> Result<f64> {
    if (s - t).abs() > LIMIT_THRESHOLD {
        let (gs, gt) = (curve.positive(s)?, curve.positive(t)?);
        Ok(((gs.ln() - gt.ln()) / (s - t)).exp())
    } else {
        let c = 0.5 * (s + t);
        let h = DERIVATIVE_STEP;
        let (up, down) = (curve.positive(c + h)?, curve.positive(c - h)?);
        Ok(((up.ln() - down.ln()) / (2.0 * h)).exp())
    }
}
