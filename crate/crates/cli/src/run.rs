//! Command dispatch: input in, report out.

use std::collections::BTreeMap;

use elr_core::divergence::{auto_interval, divergence_bounds, f_divergence, named_divergence, DivergenceTheorem, GeneratorFunction, ProbabilityVector};
use elr_core::divided_diff::certify_3convex;
use elr_core::elr::{bounds_derivative, bounds_secant, bounds_taylor, jensen_gap_bounds, JensenVariant, BRACKET_SLACK};
use elr_core::expconv::GammaContext;
use elr_core::means::{mean_b1, mean_m2, mvt_xi};
use elr_core::zipf::{zm_distribution, zm_divergence_bounds, ZipfMandelbrot};
use elr_core::{BoundReport, Direction, DiscreteFunctional};

use crate::error::CliError;
use crate::input::{Input, PhiSpec, Source, ZmParams};
use crate::num::{floats, nums, Num};
use crate::registry::{self, Phi};
use crate::report::{BoundEntry, Certificate, DivergenceInfo, MeansInfo, Report, ZipfInfo};

/// Grid for certifying user functions.
pub const CERTIFY_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bounds,
    Divergence,
    Zipf,
    Means,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Bounds => "bounds",
            Command::Divergence => "divergence",
            Command::Zipf => "zipf",
            Command::Means => "means",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// Inline JSON, or a path to a JSON or CSV file.
    pub input: Option<String>,
    pub seed: u64,
    pub instances: usize,
    /// Overrides by name; only `bracket` is recognised.
    pub tolerances: BTreeMap<String, f64>,
    /// Fills `phi` when the input has none (CSV input has no room for it).
    pub phi: Option<String>,
    /// Fills `theorem` when the input has none.
    pub theorem: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            input: None,
            seed: 0,
            instances: 1000,
            tolerances: BTreeMap::new(),
            phi: None,
            theorem: None,
        }
    }
}

/// Run a command. A falsified inequality is not an error: it comes back as
/// a report with `status = falsified`.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let slack = tolerance(config)?;
    let source = match &config.input {
        Some(arg) => Some(Source::load(arg)?),
        None => None,
    };
    let mut input = match &source {
        Some(s) => s.parse()?,
        None => Input::default(),
    };
    if let Some(c) = &input.command {
        if c != config.command.name() {
            return Err(CliError::input(
                source.as_ref().map_or(1, |s| s.line_of("command")),
                format!("input is for command {c:?}, not {:?}", config.command.name()),
            ));
        }
    }
    if input.phi.is_none() {
        input.phi = config.phi.clone().map(PhiSpec::Short);
    }
    if input.theorem.is_none() {
        input.theorem = config.theorem.clone();
    }
    let ctx = Ctx {
        source: source.as_ref(),
        input: &input,
        slack,
    };
    let mut report = Report::new(config.command.name(), input.clone(), slack);
    match config.command {
        Command::Bounds => ctx.bounds(&mut report)?,
        Command::Divergence => ctx.divergence(&mut report)?,
        Command::Zipf => ctx.zipf(&mut report)?,
        Command::Means => ctx.means(&mut report)?,
        Command::Verify => {
            if config.instances == 0 {
                return Err(CliError::Usage("--instances must be positive".into()));
            }
            report.verify = Some(crate::fuzz::verify(config.seed, config.instances, slack));
        }
    }
    report.finish();
    Ok(report)
}

fn tolerance(config: &RunConfig) -> Result<f64, CliError> {
    let mut slack = BRACKET_SLACK;
    for (k, &v) in &config.tolerances {
        match k.as_str() {
            "bracket" if v.is_finite() && v >= 0.0 => slack = v,
            "bracket" => return Err(CliError::Usage(format!("tolerance bracket={v} must be finite and nonnegative"))),
            other => return Err(CliError::Usage(format!("unknown tolerance {other:?} (known: bracket)"))),
        }
    }
    Ok(slack)
}

struct Ctx<'a> {
    source: Option<&'a Source>,
    input: &'a Input,
    slack: f64,
}

impl Ctx<'_> {
    fn err(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::input(self.source.map_or(1, |s| s.line_of(key)), message)
    }

    fn core(&self, key: &str) -> impl Fn(elr_core::Error) -> CliError + '_ {
        let key = key.to_string();
        move |e| self.err(&key, e.to_string())
    }

    fn functional(&self) -> Result<DiscreteFunctional, CliError> {
        let spec = self.input.functional.as_ref().ok_or_else(|| self.err("functional", "missing \"functional\""))?;
        DiscreteFunctional::new(floats(&spec.nodes), floats(&spec.weights)).map_err(self.core("functional"))
    }

    fn interval_or(&self, fallback: impl FnOnce() -> Result<(f64, f64), CliError>) -> Result<(f64, f64), CliError> {
        match self.input.interval {
            Some([m, big_m]) => {
                if !(m.is_finite() && big_m.is_finite() && m.0 < big_m.0) {
                    return Err(self.err("interval", "interval must be finite with m < M"));
                }
                Ok((m.0, big_m.0))
            }
            None => fallback(),
        }
    }

    fn phi(&self) -> Result<Phi, CliError> {
        let spec = self.input.phi.as_ref().ok_or_else(|| self.err("phi", "missing \"phi\""))?;
        registry::resolve(spec).map_err(|e| self.err("phi", e))
    }

    fn distributions(&self) -> Result<(ProbabilityVector, ProbabilityVector), CliError> {
        let d = self
            .input
            .distributions
            .as_ref()
            .ok_or_else(|| self.err("distributions", "missing \"distributions\""))?;
        let p = ProbabilityVector::new(floats(&d.p)).map_err(self.core("p"))?;
        let q = ProbabilityVector::new(floats(&d.q)).map_err(self.core("q"))?;
        if p.len() != q.len() {
            return Err(self.err("distributions", format!("p has {} entries, q has {}", p.len(), q.len())));
        }
        Ok((p, q))
    }

    fn theorem(&self) -> Option<&str> {
        self.input.theorem.as_deref()
    }

    fn bounds(&self, report: &mut Report) -> Result<(), CliError> {
        let f = self.functional()?;
        let (m, big_m) = self.interval_or(|| {
            let lo = f.nodes().iter().copied().fold(f64::INFINITY, f64::min);
            let hi = f.nodes().iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo < hi {
                Ok((lo, hi))
            } else {
                Err(self.err("functional", "all nodes coincide; give an \"interval\""))
            }
        })?;
        report.interval = Some([Num(m), Num(big_m)]);
        let phi = self.phi()?;
        let cert = certify_3convex(&phi.bundle, m, big_m, CERTIFY_GRID).map_err(self.core("phi"))?;
        report.convexity = Some(Certificate::from(&cert));
        let dir = Direction::from(&cert);
        if dir == Direction::Neither {
            return Err(self.err("phi", format!("{} is not 3-convex in either sign on [{m}, {big_m}]", phi.name)));
        }
        let b = &phi.bundle;
        let all = ["secant", "derivative", "taylor", "jensen_derivative", "jensen_taylor"];
        let chosen: Vec<&str> = match self.theorem() {
            None => all.to_vec(),
            Some(t) if all.contains(&t) => vec![t],
            Some(t) => return Err(self.err("theorem", format!("unknown theorem {t:?}"))),
        };
        for t in chosen {
            let r = match t {
                "secant" => bounds_secant(&f, b, m, big_m, dir),
                "derivative" => bounds_derivative(&f, b, m, big_m, dir),
                "taylor" => bounds_taylor(&f, b, m, big_m, dir),
                "jensen_derivative" => jensen_gap_bounds(&f, b, m, big_m, JensenVariant::Derivative, dir),
                _ => jensen_gap_bounds(&f, b, m, big_m, JensenVariant::Taylor, dir),
            }
            .map_err(self.core("phi"))?;
            report.bounds.push(BoundEntry::new(&r, self.slack));
        }
        Ok(())
    }

    fn divergence_theorems(&self) -> Result<Vec<DivergenceTheorem>, CliError> {
        match self.theorem() {
            None => Ok(vec![DivergenceTheorem::Derivative, DivergenceTheorem::Taylor]),
            Some("derivative") => Ok(vec![DivergenceTheorem::Derivative]),
            Some("taylor") => Ok(vec![DivergenceTheorem::Taylor]),
            Some(t) => Err(self.err("theorem", format!("unknown theorem {t:?} (derivative or taylor)"))),
        }
    }

    /// The named generator, or any other registry function with its sign
    /// taken from a certificate on `[m, M]`.
    fn generator(&self, phi: Phi, m: f64, big_m: f64, report: &mut Report) -> Result<GeneratorFunction, CliError> {
        if let Some(g) = phi.generator {
            return Ok(g);
        }
        let cert = certify_3convex(&phi.bundle, m, big_m, CERTIFY_GRID).map_err(self.core("phi"))?;
        report.convexity = Some(Certificate::from(&cert));
        let dir = Direction::from(&cert);
        let at_zero = if phi.bundle.contains(0.0) { phi.bundle.value(0.0) } else { f64::NAN };
        GeneratorFunction::custom(&phi.name, phi.bundle, dir, at_zero, f64::NAN).map_err(self.core("phi"))
    }

    fn push_all(&self, report: &mut Report, reports: Vec<BoundReport>) {
        for r in reports {
            report.bounds.push(BoundEntry::new(&r, self.slack));
        }
    }

    fn divergence(&self, report: &mut Report) -> Result<(), CliError> {
        let (p, q) = self.distributions()?;
        let (m, big_m) = self.interval_or(|| auto_interval(&p, &q).map_err(self.core("distributions")))?;
        if !(m < big_m) {
            return Err(self.err("distributions", "p = q gives a degenerate ratio interval"));
        }
        report.interval = Some([Num(m), Num(big_m)]);
        let gen = self.generator(self.phi()?, m, big_m, report)?;
        let value = f_divergence(&p, &q, &gen).map_err(self.core("distributions"))?;
        report.divergence = Some(DivergenceInfo {
            generator: gen.name().to_string(),
            params: nums(gen.params()),
            value: Num(value),
            named_value: named_divergence(gen.kind(), &p, &q, gen.params()).ok().map(Num),
        });
        let mut out = Vec::new();
        for th in self.divergence_theorems()? {
            out.push(divergence_bounds(&p, &q, &gen, m, big_m, th).map_err(self.core("phi"))?);
        }
        self.push_all(report, out);
        Ok(())
    }

    fn zm(&self, z: ZmParams) -> Result<ZipfMandelbrot, CliError> {
        zm_distribution(z.n, z.q.0, z.s.0).map_err(self.core("zm"))
    }

    fn zipf(&self, report: &mut Report) -> Result<(), CliError> {
        let spec = self.input.zm.ok_or_else(|| self.err("zm", "missing \"zm\""))?;
        let (a, b) = (self.zm(spec.a)?, self.zm(spec.b)?);
        let phi = self.phi()?;
        if phi.generator.is_none() {
            return Err(self.err("phi", "zipf needs one of kl, hellinger, renyi, harmonic, jeffreys"));
        }
        let gen = phi.generator.expect("checked");
        let mut out = Vec::new();
        for th in self.divergence_theorems()? {
            let r = zm_divergence_bounds(&a, &b, &gen, th).map_err(self.core("zm"))?;
            report.interval = Some([Num(r.m), Num(r.big_m)]);
            out.push(r.report);
        }
        let value = f_divergence(a.pmf(), b.pmf(), &gen).map_err(self.core("zm"))?;
        report.divergence = Some(DivergenceInfo {
            generator: gen.name().to_string(),
            params: nums(gen.params()),
            value: Num(value),
            named_value: named_divergence(gen.kind(), a.pmf(), b.pmf(), gen.params()).ok().map(Num),
        });
        report.zipf = Some(ZipfInfo {
            normalizer_a: Num(a.normalizer()),
            normalizer_b: Num(b.normalizer()),
        });
        self.push_all(report, out);
        Ok(())
    }

    fn means(&self, report: &mut Report) -> Result<(), CliError> {
        let index = self.input.gamma_index.ok_or_else(|| self.err("gamma_index", "missing \"gamma_index\""))?;
        let ctx = match index {
            1..=6 => {
                let f = self.functional()?;
                let (m, big_m) = self.interval_or(|| Err(self.err("interval", "missing \"interval\"")))?;
                GammaContext::elr(f, m, big_m, index).map_err(self.core("gamma_index"))?
            }
            7..=10 => {
                let (p, q) = self.distributions()?;
                let (m, big_m) = self.interval_or(|| auto_interval(&p, &q).map_err(self.core("distributions")))?;
                GammaContext::divergence(p, q, m, big_m, index).map_err(self.core("gamma_index"))?
            }
            _ => return Err(self.err("gamma_index", format!("gamma_index {index} is not in 1..=10"))),
        };
        let (m, big_m) = ctx.interval();
        report.interval = Some([Num(m), Num(big_m)]);
        let params = self.input.params.ok_or_else(|| self.err("params", "missing \"params\""))?;
        let (s, t) = (params.s.0, params.t.0);
        if !(s.is_finite() && t.is_finite()) {
            return Err(self.err("params", "s and t must be finite"));
        }
        let mut info = MeansInfo {
            gamma_index: index,
            s: Num(s),
            t: Num(t),
            xi: None,
            xi_unique: None,
            b1: None,
            m2: None,
            notes: Vec::new(),
            inside: true,
        };
        if self.input.phi.is_some() {
            let phi = self.phi()?;
            match mvt_xi(&ctx, &phi.bundle) {
                Ok(p) => {
                    info.xi = Some(Num(p.xi));
                    info.xi_unique = Some(p.unique);
                }
                Err(e) => info.notes.push(format!("xi: {e}")),
            }
        }
        if m > 0.0 {
            match mean_b1(&ctx, s, t) {
                Ok(v) => info.b1 = Some(Num(v)),
                Err(e) => info.notes.push(format!("b1: {e}")),
            }
        } else {
            info.notes.push("b1: the Υ₁ family needs m > 0".into());
        }
        match mean_m2(&ctx, s, t) {
            Ok(v) => info.m2 = Some(Num(v)),
            Err(e) => info.notes.push(format!("m2: {e}")),
        }
        info.inside = [info.xi, info.b1, info.m2]
            .iter()
            .flatten()
            .all(|v| m - self.slack <= v.0 && v.0 <= big_m + self.slack);
        report.means = Some(info);
        Ok(())
    }
}
