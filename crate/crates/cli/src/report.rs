//! Report structures. Every report serializes with fixed float formatting
//! and parses back into the same structure.

use elr_core::{BoundKind, BoundReport, ConvexityCertificate, Orientation, Verdict};
use serde::{Deserialize, Serialize};

use crate::input::Input;
use crate::num::Num;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub input: Input,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[Num; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convexity: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<BoundEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence: Option<DivergenceInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zipf: Option<ZipfInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub means: Option<MeansInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyStats>,
    pub tolerance: Num,
    pub status: Status,
    /// Set when some reported value was infinite or NaN and written as `null`.
    pub nonfinite: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Falsified,
}

impl Report {
    pub fn new(command: &str, input: Input, tolerance: f64) -> Self {
        Report {
            command: command.to_string(),
            input,
            interval: None,
            convexity: None,
            bounds: Vec::new(),
            divergence: None,
            zipf: None,
            means: None,
            verify: None,
            tolerance: Num(tolerance),
            status: Status::Ok,
            nonfinite: false,
        }
    }

    fn values(&self) -> Vec<Num> {
        let mut v = Vec::new();
        v.extend(self.interval.iter().flatten());
        if let Some(c) = &self.convexity {
            v.extend([c.min_witness, c.witness_point]);
        }
        for b in &self.bounds {
            v.extend([b.lower, b.mid, b.upper, b.violation]);
        }
        if let Some(d) = &self.divergence {
            v.push(d.value);
        }
        if let Some(m) = &self.means {
            v.extend(m.xi.iter().chain(&m.b1).chain(&m.m2));
        }
        if let Some(s) = &self.verify {
            v.push(s.max_violation);
        }
        v
    }

    /// Recompute `nonfinite` and `status` from the contents.
    pub fn finish(&mut self) {
        self.nonfinite = self.values().iter().any(|n| !n.is_finite());
        let bad_bound = self.bounds.iter().any(|b| !b.brackets);
        let bad_mean = self.means.as_ref().is_some_and(|m| !m.inside);
        let bad_verify = self.verify.as_ref().is_some_and(|s| !s.violations.is_empty());
        self.status = if bad_bound || bad_mean || bad_verify {
            Status::Falsified
        } else {
            Status::Ok
        };
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::ThreeConvex => "three_convex",
        Verdict::NegThreeConvex => "neg_three_convex",
        Verdict::Neither => "neither",
        Verdict::Indeterminate => "indeterminate",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: String,
    pub grid_size: usize,
    pub min_witness: Num,
    pub witness_point: Num,
}

impl From<&ConvexityCertificate> for Certificate {
    fn from(c: &ConvexityCertificate) -> Self {
        Certificate {
            verdict: verdict_name(c.verdict).to_string(),
            grid_size: c.grid_size,
            min_witness: Num(c.min_witness),
            witness_point: Num(c.witness_point),
        }
    }
}

pub fn theorem_name(k: BoundKind) -> &'static str {
    match k {
        BoundKind::Secant => "secant",
        BoundKind::Derivative => "derivative",
        BoundKind::Taylor => "taylor",
        BoundKind::JensenDerivative => "jensen_derivative",
        BoundKind::JensenTaylor => "jensen_taylor",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub theorem: String,
    /// `direct` means `lower ≤ mid ≤ upper`, `reversed` the opposite chain.
    pub orientation: String,
    pub lower: Num,
    pub mid: Num,
    pub upper: Num,
    pub violation: Num,
    pub brackets: bool,
}

impl BoundEntry {
    pub fn new(r: &BoundReport, slack: f64) -> Self {
        let v = r.violation();
        BoundEntry {
            theorem: theorem_name(r.theorem).to_string(),
            orientation: match r.orientation {
                Orientation::Direct => "direct",
                Orientation::Reversed => "reversed",
            }
            .to_string(),
            lower: Num(r.lower),
            mid: Num(r.mid),
            upper: Num(r.upper),
            violation: Num(v),
            // NaN anywhere counts as a failure to bracket.
            brackets: r.brackets(slack) && !v.is_nan() && r.mid.is_finite(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceInfo {
    pub generator: String,
    pub params: Vec<Num>,
    pub value: Num,
    /// The conventional display formula for the named generators, which can
    /// differ from `value` by argument order or a constant factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub named_value: Option<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipfInfo {
    pub normalizer_a: Num,
    pub normalizer_b: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeansInfo {
    pub gamma_index: u8,
    pub s: Num,
    pub t: Num,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_unique: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m2: Option<Num>,
    /// Why a value is missing.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Every present value lies in `[m, M]` up to the tolerance.
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyStats {
    pub seed: u64,
    pub instances: usize,
    /// Bracket checks performed.
    pub count: usize,
    /// Instances whose function failed certification and were not checked.
    pub skipped: usize,
    pub max_violation: Num,
    /// Checks beyond the tolerance, largest first.
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub instance: usize,
    pub case: String,
    pub theorem: String,
    pub violation: Num,
}
