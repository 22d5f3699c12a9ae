//! Built-in functions the CLI can name.
//!
//! | name | function | domain |
//! |------|----------|--------|
//! | `cubic` | `x³` | ℝ |
//! | `quartic` | `x⁴` | ℝ |
//! | `exp` | `eˣ` | ℝ |
//! | `xlogx` | `x ln x` | `[0, ∞)` |
//! | `upsilon1:t` | member `t` of Υ₁ | `(0, ∞)` |
//! | `upsilon2:t` | member `t` of Υ₂ | ℝ |
//! | `poly:c0,c1,…` | polynomial, ascending coefficients | ℝ |
//! | `kl`, `hellinger`, `renyi:α`, `harmonic`, `jeffreys` | divergence generators | `[0, ∞)` |

use elr_core::divergence::{generator, GeneratorFunction};
use elr_core::means::{upsilon1, upsilon2};
use elr_core::FunctionBundle;

use crate::input::PhiSpec;
use crate::num::floats;

/// A resolved function, and its generator form when it is one of the five
/// named divergence generators.
#[derive(Debug, Clone)]
pub struct Phi {
    pub name: String,
    pub params: Vec<f64>,
    pub bundle: FunctionBundle,
    pub generator: Option<GeneratorFunction>,
}

pub const GENERATORS: [&str; 5] = ["kl", "hellinger", "renyi", "harmonic", "jeffreys"];

fn exp_bundle() -> FunctionBundle {
    FunctionBundle::new(f64::NEG_INFINITY, f64::INFINITY, f64::exp)
        .expect("valid domain")
        .with_d1(f64::exp)
        .with_d2(f64::exp)
        .with_d3(f64::exp)
}

fn xlogx_bundle() -> FunctionBundle {
    FunctionBundle::new(0.0, f64::INFINITY, |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() })
        .expect("valid domain")
        .with_d1(|x| x.ln() + 1.0)
        .with_d2(|x| 1.0 / x)
        .with_d3(|x| -1.0 / (x * x))
}

/// Split `"name:1,2"` into `("name", [1, 2])`; a leading `builtin:` is dropped.
fn split_short(s: &str) -> Result<(String, Vec<f64>), String> {
    let s = s.trim();
    let s = s.strip_prefix("builtin:").unwrap_or(s);
    match s.split_once(':') {
        None => Ok((s.to_string(), Vec::new())),
        Some((name, rest)) => {
            let params = rest
                .split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|e| format!("parameter {p:?} of {name}: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((name.to_string(), params))
        }
    }
}

fn one_param(name: &str, params: &[f64]) -> Result<f64, String> {
    match params {
        [t] if t.is_finite() => Ok(*t),
        _ => Err(format!("{name} takes exactly one finite parameter")),
    }
}

pub fn resolve(spec: &PhiSpec) -> Result<Phi, String> {
    let (name, params) = match spec {
        PhiSpec::Short(s) => split_short(s)?,
        PhiSpec::Poly { poly } => ("poly".to_string(), floats(poly)),
        PhiSpec::Named { name, params } => {
            let (n, extra) = split_short(name)?;
            let mut p = extra;
            p.extend(floats(params));
            (n, p)
        }
    };
    if params.iter().any(|p| !p.is_finite()) {
        return Err(format!("{name}: parameters must be finite"));
    }
    let no_params = |bundle: FunctionBundle| {
        if params.is_empty() {
            Ok(bundle)
        } else {
            Err(format!("{name} takes no parameters"))
        }
    };
    let mut generator_form = None;
    let bundle = match name.as_str() {
        "cubic" => no_params(FunctionBundle::monomial(3))?,
        "quartic" => no_params(FunctionBundle::monomial(4))?,
        "exp" => no_params(exp_bundle())?,
        "xlogx" => no_params(xlogx_bundle())?,
        "upsilon1" => upsilon1(one_param(&name, &params)?).bundle,
        "upsilon2" => upsilon2(one_param(&name, &params)?).bundle,
        "poly" => {
            if params.is_empty() {
                return Err("poly needs at least one coefficient".into());
            }
            FunctionBundle::polynomial(&params)
        }
        g if GENERATORS.contains(&g) => {
            let gen = generator(g, &params).map_err(|e| format!("{g}: {e}"))?;
            let bundle = gen.bundle().clone();
            generator_form = Some(gen);
            bundle
        }
        other => return Err(format!("unknown function {other:?}")),
    };
    Ok(Phi {
        name,
        params,
        bundle,
        generator: generator_form,
    })
}
