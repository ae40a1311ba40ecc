//! The JSON run configuration and its validation.

use std::sync::Arc;

use arithcurv_core::chern::{FormSpec, LiftParams};
use arithcurv_core::ring::rational::{int, parse_rational};
use arithcurv_core::ring::{BaseRingDesc, CycloScalar, Rational};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Delta,
    Lift,
    Curvature,
    VerifyTheorems,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    pub fn to_rational(&self) -> Result<Rational, String> {
        match self {
            Scalar::Int(v) => Ok(int(*v)),
            Scalar::Text(s) => parse_rational(s).map_err(|e| e.to_string()),
        }
    }
}

/// `"sp(4)"`, `{"kind": "so_odd", "r": 1}` or `{"q": [[...]]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FormConfig {
    Name(String),
    Split { kind: String, r: usize },
    Matrix { q: Vec<Vec<Scalar>> },
}

impl FormConfig {
    pub fn build(&self) -> Result<FormSpec, String> {
        let split = |kind: &str, r: usize| -> Result<FormSpec, String> {
            match kind {
                "sp" => FormSpec::split_sp(r),
                "so_even" => FormSpec::split_so_even(r),
                "so_odd" => FormSpec::split_so_odd(r),
                other => return Err(format!("unknown form kind {other:?}; use sp, so_even or so_odd")),
            }
            .map_err(|e| e.to_string())
        };
        match self {
            FormConfig::Name(name) => {
                let (kind, rest) = name
                    .split_once('(')
                    .ok_or_else(|| format!("form {name:?} should look like sp(4) or so(3)"))?;
                let n: usize = rest
                    .strip_suffix(')')
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| format!("form {name:?} should look like sp(4) or so(3)"))?;
                match (kind, n % 2) {
                    ("sp", 0) => split("sp", n / 2),
                    ("so", 0) => split("so_even", n / 2),
                    ("so", 1) => split("so_odd", n / 2),
                    _ => Err(format!("form {name:?}: sp(n) needs n even, and only sp and so are known")),
                }
            }
            FormConfig::Split { kind, r } => split(kind, *r),
            FormConfig::Matrix { q } => {
                let rows = q
                    .iter()
                    .map(|row| row.iter().map(Scalar::to_rational).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                FormSpec::custom(rows).map_err(|e| e.to_string())
            }
        }
    }
}

/// A base ring element: a rational, or coefficients on `1, ζ, ζ², ...`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ElementConfig {
    Scalar(Scalar),
    Coefficients(Vec<Scalar>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: Option<Format>,
}

fn default_n0() -> u64 {
    2
}

fn default_n() -> u64 {
    1
}

fn default_primes() -> Vec<u64> {
    vec![3, 5, 7]
}

fn default_d() -> u32 {
    LiftParams::DEFAULT_D
}

fn default_k() -> u32 {
    LiftParams::DEFAULT_K
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(rename = "N0", default = "default_n0")]
    pub n0: u64,
    #[serde(rename = "N", default = "default_n")]
    pub n: u64,
    #[serde(default = "default_primes")]
    pub primes: Vec<u64>,
    /// Single prime; overrides `primes` for `delta` and `lift`.
    pub p: Option<u64>,
    pub form: Option<FormConfig>,
    pub forms: Option<Vec<FormConfig>>,
    /// Optional matrix size, checked against the form.
    #[serde(rename = "n")]
    pub size: Option<usize>,
    #[serde(rename = "D", default = "default_d")]
    pub d: u32,
    #[serde(rename = "K", default = "default_k")]
    pub k: u32,
    pub a: Option<ElementConfig>,
    /// Randomized samples per identity for `classical`.
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Everything a command needs, checked against module preconditions.
#[derive(Debug, Clone)]
pub struct Validated {
    pub command: Command,
    pub ring: Arc<BaseRingDesc>,
    pub primes: Vec<u64>,
    pub forms: Vec<FormSpec>,
    pub d: u32,
    pub k: u32,
    pub a: Option<CycloScalar>,
    pub samples: usize,
    pub seed: u64,
}

/// The forms checked when `verify-theorems` names none.
pub fn theorem_family() -> Vec<FormSpec> {
    vec![
        FormSpec::split_so_odd(0).expect("so(1)"),
        FormSpec::split_sp(1).expect("sp(2)"),
        FormSpec::split_sp(2).expect("sp(4)"),
        FormSpec::split_so_even(2).expect("so(4)"),
        FormSpec::split_so_odd(1).expect("so(3)"),
    ]
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("config: {e}"))
    }

    pub fn validate(&self) -> Result<Validated, String> {
        let ring = BaseRingDesc::new(self.n0, self.n).map_err(|e| e.to_string())?;
        let mut primes = match (self.command, self.p) {
            (Command::Delta | Command::Lift, Some(p)) => vec![p],
            _ => self.primes.clone(),
        };
        primes.sort_unstable();
        primes.dedup();
        if primes.is_empty() && self.command != Command::Classical {
            return Err("primes: the prime list is empty".into());
        }
        for &p in &primes {
            ring.check_prime(p).map_err(|e| format!("primes: {e}"))?;
        }
        if matches!(self.command, Command::Curvature | Command::VerifyTheorems) && primes.len() < 2 {
            return Err("primes: curvature needs at least two distinct primes".into());
        }

        let mut forms = Vec::new();
        if let Some(f) = &self.form {
            forms.push(f.build().map_err(|e| format!("form: {e}"))?);
        }
        for f in self.forms.iter().flatten() {
            forms.push(f.build().map_err(|e| format!("forms: {e}"))?);
        }
        match self.command {
            Command::VerifyTheorems if forms.is_empty() => forms = theorem_family(),
            Command::Lift | Command::Curvature if forms.is_empty() => {
                return Err("form: this command needs a form, e.g. \"form\": \"sp(2)\"".into())
            }
            _ => {}
        }
        for f in &forms {
            if let Some(n) = self.size {
                if n != f.n() {
                    return Err(format!("n = {n} but form {} has size {}", f.label(), f.n()));
                }
            }
            for c in f.q().iter().flatten() {
                if !ring.allows_denominator(c.denom()) {
                    return Err(format!("form {}: entry {c} is not in the base ring (N0 = {})", f.label(), self.n0));
                }
            }
            if self.command != Command::Delta && self.command != Command::Classical {
                for &p in &primes {
                    let params = LiftParams::new(p, self.k, self.d).map_err(|e| e.to_string())?;
                    params.check_form(f).map_err(|e| format!("form {}: {e}", f.label()))?;
                }
            }
        }

        let a = match (&self.a, self.command) {
            (Some(e), _) => Some(build_element(&ring, e)?),
            (None, Command::Delta) => return Err("a: the delta command needs an element \"a\"".into()),
            (None, _) => None,
        };
        Ok(Validated {
            command: self.command,
            ring,
            primes,
            forms,
            d: self.d,
            k: self.k,
            a,
            samples: self.samples.unwrap_or(50),
            seed: self.seed.unwrap_or(0),
        })
    }
}

fn build_element(ring: &Arc<BaseRingDesc>, e: &ElementConfig) -> Result<CycloScalar, String> {
    let coeffs = match e {
        ElementConfig::Scalar(s) => vec![s.to_rational().map_err(|e| format!("a: {e}"))?],
        ElementConfig::Coefficients(v) => {
            v.iter().map(Scalar::to_rational).collect::<Result<Vec<_>, _>>().map_err(|e| format!("a: {e}"))?
        }
    };
    CycloScalar::from_coeffs(ring, coeffs).map_err(|e| format!("a: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::parse(r#"{"command": "verify-theorems"}"#).unwrap();
        assert_eq!((c.n0, c.n, c.d, c.k), (2, 1, 4, 16));
        assert_eq!(c.primes, vec![3, 5, 7]);
        assert_eq!(c.validate().unwrap().forms.len(), 5);
    }

    #[test]
    fn form_spellings() {
        let f = |s: &str| serde_json::from_str::<FormConfig>(s).unwrap().build();
        assert_eq!(f(r#""sp(4)""#).unwrap(), FormSpec::split_sp(2).unwrap());
        assert_eq!(f(r#""so(3)""#).unwrap(), FormSpec::split_so_odd(1).unwrap());
        assert_eq!(f(r#"{"kind": "so_even", "r": 2}"#).unwrap(), FormSpec::split_so_even(2).unwrap());
        assert_eq!(f(r#"{"q": [[2]]}"#).unwrap(), FormSpec::rank_one(2).unwrap());
        assert_eq!(f(r#"{"q": [["0", 1], [-1, "0"]]}"#).unwrap().epsilon(), -1);
        assert!(f(r#""sp(3)""#).is_err());
        assert!(f(r#""gl(2)""#).is_err());
    }

    #[test]
    fn rejections() {
        let bad = [
            r#"{"command": "curvature", "form": "sp(2)", "primes": []}"#,
            r#"{"command": "curvature", "form": "sp(2)", "primes": [3]}"#,
            r#"{"command": "lift", "form": "sp(2)", "primes": [2]}"#,
            r#"{"command": "lift", "primes": [3]}"#,
            r#"{"command": "lift", "form": {"q": [[3]]}, "p": 3}"#,
            r#"{"command": "lift", "form": {"q": [["1/5"]]}, "p": 3}"#,
            r#"{"command": "lift", "form": "sp(2)", "p": 3, "K": 1}"#,
            r#"{"command": "delta", "p": 3}"#,
            r#"{"command": "delta", "a": "2", "p": 3, "N0": 3}"#,
            r#"{"command": "delta", "a": "2", "p": 3, "N": 3}"#,
        ];
        for b in bad {
            assert!(RunConfig::parse(b).and_then(|c| c.validate()).is_err(), "{b}");
        }
        assert!(RunConfig::parse(r#"{"command": "lift", "typo": 1}"#).is_err());
    }
}
