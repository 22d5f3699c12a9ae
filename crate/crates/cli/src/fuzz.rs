//! Random instances for the bracketing fuzz suite and the `verify` command.
//!
//! ELR instances draw a functional with 1 to 50 nodes in a random
//! `[m, M] ⊂ [−5, 5]` and a 3-convex `φ` from `x³`, `x⁴` (intervals on one
//! side of 0), `eˣ`, `x ln x` (positive intervals) or a spline whose third
//! derivative is a nonnegative cubic B-spline. Divergence instances draw two strictly
//! positive probability vectors and one of the five generators.

use std::sync::Arc;

use elr_core::divergence::{auto_interval, divergence_bounds, generator, DivergenceTheorem, GeneratorFunction, ProbabilityVector};
use elr_core::divided_diff::certify_3convex;
use elr_core::elr::{bounds_derivative, bounds_secant, bounds_taylor};
use elr_core::{BoundReport, Direction, DiscreteFunctional, FunctionBundle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::num::Num;
use crate::registry;
use crate::report::{theorem_name, VerifyStats, Violation};

/// Grid used to certify each drawn function.
pub const CERTIFY_GRID: usize = 32;
/// Violations kept in a report.
pub const MAX_LISTED: usize = 32;

/// Generator for instance `index` of a run seeded with `seed`: one ChaCha
/// stream per instance, so instances are independent of evaluation order.
pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiFamily {
    Cubic,
    Quartic,
    Exp,
    XLogX,
    Spline,
}

impl PhiFamily {
    pub fn name(self) -> &'static str {
        match self {
            PhiFamily::Cubic => "cubic",
            PhiFamily::Quartic => "quartic",
            PhiFamily::Exp => "exp",
            PhiFamily::XLogX => "xlogx",
            PhiFamily::Spline => "spline",
        }
    }
}

/// `φ` on `[lo, hi]` with `φ'''` a uniform cubic B-spline with nonnegative
/// coefficients, integrated three times from random constants.
#[derive(Debug, Clone)]
pub struct SplinePhi {
    lo: f64,
    h: f64,
    /// Per piece, ascending coefficients of `φ` in `v = x − knot`.
    pieces: Vec<[f64; 7]>,
}

fn horner(c: &[f64], v: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * v + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, &a)| i as f64 * a).collect()
}

impl SplinePhi {
    /// `coeffs` has one entry per B-spline, `pieces + 3` in total.
    pub fn new(lo: f64, hi: f64, coeffs: &[f64], constants: [f64; 3]) -> Self {
        let n = coeffs.len().saturating_sub(3).max(1);
        let h = (hi - lo) / n as f64;
        let mut pieces = Vec::with_capacity(n);
        let [mut d0, mut d1, mut d2] = constants;
        for j in 0..n {
            let p = |k: usize| coeffs.get(j + k).copied().unwrap_or(0.0);
            // Segment of the uniform cubic B-spline in u = v/h.
            let u = [
                (p(0) + 4.0 * p(1) + p(2)) / 6.0,
                (-3.0 * p(0) + 3.0 * p(2)) / 6.0,
                (3.0 * p(0) - 6.0 * p(1) + 3.0 * p(2)) / 6.0,
                (-p(0) + 3.0 * p(1) - 3.0 * p(2) + p(3)) / 6.0,
            ];
            let mut c = [d0, d1, d2 / 2.0, 0.0, 0.0, 0.0, 0.0];
            for (k, &uk) in u.iter().enumerate() {
                let ck = uk / h.powi(k as i32);
                c[k + 3] = ck / ((k + 1) * (k + 2) * (k + 3)) as f64;
            }
            let c1 = derivative(&c);
            let c2 = derivative(&c1);
            d0 = horner(&c, h);
            d1 = horner(&c1, h);
            d2 = horner(&c2, h);
            pieces.push(c);
        }
        SplinePhi { lo, h, pieces }
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let j = ((x - self.lo) / self.h).floor();
        let j = if j.is_nan() { 0 } else { (j.max(0.0) as usize).min(self.pieces.len() - 1) };
        (j, x - (self.lo + j as f64 * self.h))
    }

    pub fn eval(&self, order: usize, x: f64) -> f64 {
        let (j, v) = self.locate(x);
        let mut c = self.pieces[j].to_vec();
        for _ in 0..order {
            c = derivative(&c);
        }
        horner(&c, v)
    }

    pub fn bundle(self, hi: f64) -> FunctionBundle {
        let s = Arc::new(self);
        let (a, b, c, d) = (s.clone(), s.clone(), s.clone(), s.clone());
        FunctionBundle::new(s.lo, hi, move |x: f64| a.eval(0, x))
            .expect("nonempty interval")
            .with_d1(move |x| b.eval(1, x))
            .with_d2(move |x| c.eval(2, x))
            .with_d3(move |x| d.eval(3, x))
    }
}

pub fn random_spline<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> FunctionBundle {
    let pieces = rng.random_range(1..=8);
    let coeffs: Vec<f64> = (0..pieces + 3)
        .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random::<f64>() })
        .collect();
    let constants = [
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    ];
    SplinePhi::new(lo, hi, &coeffs, constants).bundle(hi)
}

#[derive(Debug, Clone)]
pub struct ElrInstance {
    pub functional: DiscreteFunctional,
    pub m: f64,
    pub big_m: f64,
    pub family: PhiFamily,
    pub phi: FunctionBundle,
}

pub fn elr_instance<R: Rng>(rng: &mut R) -> ElrInstance {
    let family = match rng.random_range(0..5) {
        0 => PhiFamily::Cubic,
        1 => PhiFamily::Quartic,
        2 => PhiFamily::Exp,
        3 => PhiFamily::XLogX,
        _ => PhiFamily::Spline,
    };
    // x ln x needs x ≥ 0; x⁴ has one sign of φ''' only on one side of 0.
    let (floor, ceil) = match family {
        PhiFamily::XLogX => (0.0, 5.0),
        PhiFamily::Quartic if rng.random_bool(0.5) => (-5.0, 0.0),
        PhiFamily::Quartic => (0.0, 5.0),
        _ => (-5.0, 5.0),
    };
    let mut a: f64 = rng.random_range(floor..ceil);
    let mut b: f64 = rng.random_range(floor..ceil);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    if b - a < 1e-3 {
        b = (a + 1e-3).min(ceil);
        a = b - 1e-3;
    }
    let (m, big_m) = (a, b);
    let n = rng.random_range(1..=50);
    let nodes: Vec<f64> = (0..n)
        .map(|_| match rng.random_range(0..20) {
            0 => m,
            1 => big_m,
            _ => rng.random_range(m..=big_m),
        })
        .collect();
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    let functional = DiscreteFunctional::new(nodes, weights).expect("valid functional");
    let phi = match family {
        PhiFamily::Spline => random_spline(rng, m, big_m),
        f => registry::resolve(&crate::input::PhiSpec::Short(f.name().into()))
            .expect("built-in")
            .bundle,
    };
    ElrInstance {
        functional,
        m,
        big_m,
        family,
        phi,
    }
}

/// Secant, derivative and Taylor reports for `φ` and for `−φ`, or `None`
/// when either fails certification.
pub fn elr_reports(inst: &ElrInstance) -> Option<Vec<(&'static str, BoundReport)>> {
    let mut out = Vec::with_capacity(6);
    for (case, phi) in [("elr", inst.phi.clone()), ("elr_reversed", inst.phi.neg())] {
        let cert = certify_3convex(&phi, inst.m, inst.big_m, CERTIFY_GRID).ok()?;
        let dir = Direction::from(&cert);
        if dir == Direction::Neither {
            return None;
        }
        let (f, m, big_m) = (&inst.functional, inst.m, inst.big_m);
        out.push((case, bounds_secant(f, &phi, m, big_m, dir).ok()?));
        out.push((case, bounds_derivative(f, &phi, m, big_m, dir).ok()?));
        out.push((case, bounds_taylor(f, &phi, m, big_m, dir).ok()?));
    }
    Some(out)
}

fn random_vector<R: Rng>(rng: &mut R, n: usize) -> ProbabilityVector {
    let spread: f64 = rng.random_range(0.0..3.0);
    let raw: Vec<f64> = (0..n).map(|_| (rng.random_range(-spread..spread)).exp()).collect();
    ProbabilityVector::normalized(raw).expect("positive weights")
}

/// Strictly positive `p`, `q` of a common random length in `2..=30`.
pub fn distribution_pair<R: Rng>(rng: &mut R) -> (ProbabilityVector, ProbabilityVector) {
    let n = rng.random_range(2..=30);
    (random_vector(rng, n), random_vector(rng, n))
}

/// One of the five generators; Renyi's `α` is drawn from `[−2, 4]` or, one
/// time in five, from the boundary values `{0, 1, 2}`.
pub fn random_generator<R: Rng>(rng: &mut R) -> GeneratorFunction {
    let name = registry::GENERATORS[rng.random_range(0..5)];
    let params = if name == "renyi" {
        if rng.random_bool(0.2) {
            vec![[0.0, 1.0, 2.0][rng.random_range(0..3)]]
        } else {
            vec![rng.random_range(-2.0..4.0)]
        }
    } else {
        Vec::new()
    };
    generator(name, &params).expect("valid generator")
}

#[derive(Debug, Clone)]
pub struct DivergenceInstance {
    pub p: ProbabilityVector,
    pub q: ProbabilityVector,
    pub generator: GeneratorFunction,
}

pub fn divergence_instance<R: Rng>(rng: &mut R) -> DivergenceInstance {
    let (p, q) = distribution_pair(rng);
    DivergenceInstance {
        p,
        q,
        generator: random_generator(rng),
    }
}

/// Derivative and Taylor reports on the auto-derived interval; `None` when
/// the interval is degenerate.
pub fn divergence_reports(inst: &DivergenceInstance) -> Option<Vec<BoundReport>> {
    let (m, big_m) = auto_interval(&inst.p, &inst.q).ok()?;
    if !(m < big_m) {
        return None;
    }
    [DivergenceTheorem::Derivative, DivergenceTheorem::Taylor]
        .into_iter()
        .map(|th| divergence_bounds(&inst.p, &inst.q, &inst.generator, m, big_m, th).ok())
        .collect()
}

struct InstanceOutcome {
    count: usize,
    skipped: usize,
    max: f64,
    violations: Vec<Violation>,
}

fn run_instance(seed: u64, index: usize, slack: f64) -> InstanceOutcome {
    let mut rng = instance_rng(seed, index);
    let elr = elr_instance(&mut rng);
    let div = divergence_instance(&mut rng);
    let mut out = InstanceOutcome {
        count: 0,
        skipped: 0,
        max: 0.0,
        violations: Vec::new(),
    };
    let mut record = |case: String, r: &BoundReport| {
        out.count += 1;
        let v = r.violation();
        // NaN must not hide behind `max`.
        let v = if v.is_nan() || !r.mid.is_finite() { f64::INFINITY } else { v };
        out.max = out.max.max(v);
        if v > slack {
            out.violations.push(Violation {
                instance: index,
                case,
                theorem: theorem_name(r.theorem).to_string(),
                violation: Num(v),
            });
        }
    };
    match elr_reports(&elr) {
        Some(reports) => {
            for (case, r) in &reports {
                record(format!("{case}:{}", elr.family.name()), r);
            }
        }
        None => out.skipped += 1,
    }
    match divergence_reports(&div) {
        Some(reports) => {
            for r in &reports {
                record(format!("divergence:{}", div.generator.name()), r);
            }
        }
        None => out.skipped += 1,
    }
    out
}

/// Run `instances` fuzz instances in parallel. The result depends only on
/// `seed`, `instances` and `slack`.
pub fn verify(seed: u64, instances: usize, slack: f64) -> VerifyStats {
    let outcomes: Vec<InstanceOutcome> = (0..instances)
        .into_par_iter()
        .map(|i| run_instance(seed, i, slack))
        .collect();
    let mut violations: Vec<Violation> = Vec::new();
    let (mut count, mut skipped, mut max) = (0, 0, 0.0f64);
    for o in outcomes {
        count += o.count;
        skipped += o.skipped;
        max = max.max(o.max);
        violations.extend(o.violations);
    }
    violations.sort_by(|a, b| {
        b.violation
            .0
            .total_cmp(&a.violation.0)
            .then(a.instance.cmp(&b.instance))
            .then(a.case.cmp(&b.case))
            .then(a.theorem.cmp(&b.theorem))
    });
    violations.truncate(MAX_LISTED);
    VerifyStats {
        seed,
        instances,
        count,
        skipped,
        max_violation: Num(max),
        violations,
    }
}
