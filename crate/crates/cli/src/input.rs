//! The JSON input schema, plus the flat CSV form for probability vectors.

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::num::Num;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Input {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<FunctionalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[Num; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distributions: Option<Distributions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zm: Option<ZmSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_index: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<MeanParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalSpec {
    pub nodes: Vec<Num>,
    pub weights: Vec<Num>,
}

/// `"cubic"`, `"upsilon1:0.5"`, `{"name": "renyi", "params": [2]}` or
/// `{"poly": [c0, c1, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiSpec {
    Short(String),
    Poly {
        poly: Vec<Num>,
    },
    Named {
        name: String,
        #[serde(default)]
        params: Vec<Num>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Distributions {
    pub p: Vec<Num>,
    pub q: Vec<Num>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZmParams {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: Num,
    pub s: Num,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZmSpec {
    pub a: ZmParams,
    pub b: ZmParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanParams {
    pub s: Num,
    pub t: Num,
}

/// Raw input text and where it came from, kept for error line lookup.
#[derive(Debug, Clone)]
pub struct Source {
    pub text: String,
    pub csv: bool,
}

impl Source {
    /// `arg` is either inline JSON or a path; `.csv` paths are read as CSV.
    pub fn load(arg: &str) -> Result<Self, CliError> {
        let trimmed = arg.trim_start();
        if trimmed.starts_with('{') {
            return Ok(Source {
                text: arg.to_string(),
                csv: false,
            });
        }
        let text = std::fs::read_to_string(arg)?;
        let csv = std::path::Path::new(arg)
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        Ok(Source { text, csv })
    }

    pub fn parse(&self) -> Result<Input, CliError> {
        if self.csv {
            return parse_csv(&self.text);
        }
        serde_json::from_str(&self.text).map_err(|e| CliError::input(e.line().max(1), e.to_string()))
    }

    /// 1-based line of the first occurrence of `"key"`, else 1.
    pub fn line_of(&self, key: &str) -> usize {
        if self.csv {
            return 1;
        }
        let needle = format!("\"{key}\"");
        self.text
            .lines()
            .position(|l| l.contains(&needle))
            .map_or(1, |i| i + 1)
    }
}

/// Two columns `p,q`, one row per outcome, with an optional header row.
fn parse_csv(text: &str) -> Result<Input, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let (mut p, mut q) = (Vec::new(), Vec::new());
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| CliError::input(i + 1, e.to_string()))?;
        if row.len() != 2 {
            return Err(CliError::input(i + 1, format!("expected 2 columns, found {}", row.len())));
        }
        let parsed: Result<Vec<f64>, _> = row.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => {
                p.push(Num(v[0]));
                q.push(Num(v[1]));
            }
            Err(_) if i == 0 => continue,
            Err(e) => return Err(CliError::input(i + 1, e.to_string())),
        }
    }
    Ok(Input {
        distributions: Some(Distributions { p, q }),
        ..Input::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_worked_instance() {
        let src = Source::load(r#"{"functional": {"nodes": [0.5], "weights": [1]}, "interval": [0, 1], "phi": "builtin:cubic"}"#).unwrap();
        let input = src.parse().unwrap();
        assert_eq!(input.functional.unwrap().nodes, vec![Num(0.5)]);
        assert_eq!(input.phi, Some(PhiSpec::Short("builtin:cubic".into())));
    }

    #[test]
    fn phi_forms() {
        let named: PhiSpec = serde_json::from_str(r#"{"name": "renyi", "params": [2]}"#).unwrap();
        assert_eq!(
            named,
            PhiSpec::Named {
                name: "renyi".into(),
                params: vec![Num(2.0)]
            }
        );
        let poly: PhiSpec = serde_json::from_str(r#"{"poly": [0, 0, 0, 1]}"#).unwrap();
        assert!(matches!(poly, PhiSpec::Poly { .. }));
    }

    #[test]
    fn errors_carry_lines() {
        let src = Source::load("{\n  \"interval\": [0, 1],\n  \"bogus\": 3\n}").unwrap();
        match src.parse() {
            Err(CliError::Input { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert_eq!(src.line_of("interval"), 2);
    }

    #[test]
    fn csv_with_header() {
        let input = parse_csv("p,q\n0.5,0.25\n0.5,0.75\n").unwrap();
        let d = input.distributions.unwrap();
        assert_eq!(d.p, vec![Num(0.5), Num(0.5)]);
        assert_eq!(d.q, vec![Num(0.25), Num(0.75)]);
        assert!(matches!(parse_csv("0.5,x\n0.1,0.2\n"), Ok(_)));
        assert!(matches!(parse_csv("0.5,0.5\n0.1,x\n"), Err(CliError::Input { line: 2, .. })));
    }
}
