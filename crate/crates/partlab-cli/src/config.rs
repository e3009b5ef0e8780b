//! Experiment configuration: the JSON schema and its resolution against
//! per-scenario defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use partlab::ensemble::{Field, Kind, Law};
use partlab::moments::DEFAULT_BUDGET;
use partlab::process::{ApproxClass, LevyTriplet, APPROX_CLASSES};
use partlab_core::table::Label;
use partlab_core::{Partition, Q};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, CliError, Result};
use crate::report::{Combine, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Semicircle,
    UnitaryBm,
    Wick,
    FreePoisson,
    FreenessScaling,
    Entries,
    ClassicalBridge,
    GaussianApprox,
    StrongInvariance,
}

pub const SCENARIOS: [Scenario; 9] = [
    Scenario::Semicircle,
    Scenario::UnitaryBm,
    Scenario::Wick,
    Scenario::FreePoisson,
    Scenario::FreenessScaling,
    Scenario::Entries,
    Scenario::ClassicalBridge,
    Scenario::GaussianApprox,
    Scenario::StrongInvariance,
];

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Semicircle => "semicircle",
            Scenario::UnitaryBm => "unitary-bm",
            Scenario::Wick => "wick",
            Scenario::FreePoisson => "free-poisson",
            Scenario::FreenessScaling => "freeness-scaling",
            Scenario::Entries => "entries",
            Scenario::ClassicalBridge => "classical-bridge",
            Scenario::GaussianApprox => "gaussian-approx",
            Scenario::StrongInvariance => "strong-invariance",
        }
    }

    fn default_tolerance(self) -> Tolerance {
        match self {
            Scenario::Semicircle => Tolerance::max(4.0, 0.05),
            Scenario::UnitaryBm => Tolerance::sum(4.0, 0.02),
            Scenario::Wick => Tolerance::max(5.0, 0.0),
            Scenario::FreePoisson => Tolerance::sum(4.0, 0.1),
            Scenario::FreenessScaling => Tolerance::max(0.0, 0.1),
            Scenario::Entries => Tolerance::max(4.0, 0.0),
            Scenario::ClassicalBridge => Tolerance::max(4.0, 0.0),
            Scenario::GaussianApprox => Tolerance::max(4.0, 0.15),
            Scenario::StrongInvariance => Tolerance::max(6.0, 0.0),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        SCENARIOS
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| CliError::Input(format!("unknown scenario {s:?}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub sigmas: Option<f64>,
    pub floor: Option<f64>,
    pub combine: Option<Combine>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

/// The configuration file as written. Every key except `scenario` is
/// optional; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub k: Option<Vec<usize>>,
    #[serde(default, rename = "N")]
    pub n: Option<Vec<usize>>,
    #[serde(default)]
    pub t: Option<Vec<f64>>,
    #[serde(default)]
    pub samples: Option<u64>,
    #[serde(default)]
    pub steps: Option<usize>,
    /// Label to sample kind, e.g. `{"h": "gue"}`.
    #[serde(default)]
    pub family: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub word: Option<Vec<String>>,
    #[serde(default)]
    pub triplet: Option<LevyTriplet>,
    #[serde(default)]
    pub law: Option<String>,
    /// Partition classes of `P_2`, as partition text.
    #[serde(default)]
    pub classes: Option<Vec<String>>,
    #[serde(default)]
    pub field: Option<Field>,
    /// Diagonal entries as rationals, repeated to length `N`.
    #[serde(default)]
    pub diagonal: Option<Vec<String>>,
    #[serde(default)]
    pub tolerance: Option<ToleranceSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub budget: Option<u64>,
}

pub(crate) fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

impl ExperimentConfig {
    /// Parses JSON; schema errors carry the JSON pointer of the offending value.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = pointer(e.path());
            let message = e.into_inner().to_string();
            CliError::Config { path: if path.is_empty() { "/".into() } else { path }, message }
        })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

/// Command-line settings that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub budget: Option<u64>,
}

/// A configuration with defaults filled in and every field checked.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub scenario: Scenario,
    pub seed: Option<u64>,
    pub ks: Vec<usize>,
    pub ns: Vec<usize>,
    pub ts: Vec<f64>,
    pub samples: u64,
    pub steps: usize,
    pub family: BTreeMap<Label, Kind>,
    pub word: Option<Vec<Label>>,
    pub triplet: LevyTriplet,
    pub law: Law,
    pub classes: Vec<ApproxClass>,
    pub field: Field,
    pub diagonal: Vec<Q>,
    pub tolerance: Tolerance,
    pub output: OutputSpec,
    pub threads: usize,
    pub budget: u128,
}

fn parse_q(path: &str, s: &str) -> Result<Q> {
    match s.trim().parse::<Q>() {
        Ok(v) => Ok(v),
        Err(_) => config_err(path, format!("{s:?} is not a rational number")),
    }
}

fn nonempty<T>(path: &str, v: Vec<T>) -> Result<Vec<T>> {
    if v.is_empty() {
        return config_err(path, "must not be empty");
    }
    Ok(v)
}

impl Resolved {
    /// Whether the run draws random samples and therefore needs a seed.
    pub fn stochastic(scenario: Scenario, cfg: &ExperimentConfig) -> bool {
        match scenario {
            Scenario::FreenessScaling => false,
            Scenario::ClassicalBridge => cfg.samples.is_some(),
            _ => true,
        }
    }

    pub fn new(cfg: &ExperimentConfig, ov: &Overrides) -> Result<Self> {
        let sc = cfg.scenario;
        let seed = ov.seed.or(cfg.seed);
        if Self::stochastic(sc, cfg) && seed.is_none() {
            return config_err("/seed", format!("seed is required for the stochastic scenario {sc}"));
        }
        let (ks, ns, ts, samples, steps): (Vec<usize>, Vec<usize>, Vec<f64>, u64, usize) = match sc {
            Scenario::Semicircle => (vec![2, 4, 6], vec![300], vec![], 200, 1),
            Scenario::UnitaryBm => ((1..=6).collect(), vec![128], vec![0.5, 1.0, 2.0], 200, 200),
            Scenario::Wick => (vec![4], vec![4], vec![], 100_000, 1),
            Scenario::FreePoisson => ((1..=4).collect(), vec![200], vec![1.0], 200, 1),
            Scenario::FreenessScaling => (vec![4], vec![8, 16, 32], vec![], 1, 1),
            Scenario::Entries => (vec![1, 2], vec![4, 8], vec![], 20_000, 1),
            Scenario::ClassicalBridge => ((1..=4).collect(), vec![8], vec![], 0, 1),
            Scenario::GaussianApprox => (vec![2], vec![16], vec![1.0], 200, 1),
            Scenario::StrongInvariance => (vec![1, 2], vec![4], vec![], 4000, 1),
        };
        let ks = nonempty("/k", cfg.k.clone().unwrap_or(ks))?;
        for (i, &k) in ks.iter().enumerate() {
            if k == 0 {
                return config_err(&format!("/k/{i}"), "k must be at least 1");
            }
        }
        let ns = nonempty("/N", cfg.n.clone().unwrap_or(ns))?;
        for (i, &n) in ns.iter().enumerate() {
            if n == 0 {
                return config_err(&format!("/N/{i}"), "N must be at least 1");
            }
        }
        let ts = cfg.t.clone().unwrap_or(ts);
        for (i, &t) in ts.iter().enumerate() {
            if !(t.is_finite() && t >= 0.0) {
                return config_err(&format!("/t/{i}"), "times must be finite and nonnegative");
            }
        }
        let samples = cfg.samples.unwrap_or(samples);
        if cfg.samples == Some(0) {
            return config_err("/samples", "samples must be positive");
        }
        let steps = cfg.steps.unwrap_or(steps);
        if steps == 0 || steps > partlab::process::MAX_STEPS {
            return config_err("/steps", format!("steps must be in 1..={}", partlab::process::MAX_STEPS));
        }
        let default_family: &[(&str, &str)] = match sc {
            Scenario::Semicircle => &[("h", "gue")],
            Scenario::Wick => &[("goe", "goe"), ("gue", "gue")],
            Scenario::Entries => &[("m", "conj:U:diag-iid:bernoulli:1/2")],
            Scenario::StrongInvariance => &[("m", "conj:S:diag-iid:bernoulli:1/2")],
            _ => &[],
        };
        let raw_family: BTreeMap<String, String> = cfg
            .family
            .clone()
            .unwrap_or_else(|| default_family.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect());
        let mut family = BTreeMap::new();
        for (label, spec) in &raw_family {
            let path = format!("/family/{label}");
            let kind: Kind = spec.parse().map_err(|e: partlab::Error| CliError::Config { path, message: e.to_string() })?;
            family.insert(label.clone(), kind);
        }
        match sc {
            Scenario::Semicircle | Scenario::Entries if family.len() != 1 => {
                return config_err("/family", "this scenario takes exactly one label");
            }
            Scenario::Semicircle => {
                if !family.values().all(|k| matches!(k, Kind::Gue | Kind::Goe)) {
                    return config_err("/family", "the semicircle scenario needs a gue or goe family");
                }
            }
            Scenario::Wick => {
                if family.is_empty() || !family.values().all(|k| matches!(k, Kind::Gue | Kind::Goe)) {
                    return config_err("/family", "the Wick scenario needs gue or goe labels");
                }
            }
            Scenario::StrongInvariance if family.is_empty() => return config_err("/family", "must not be empty"),
            _ => {}
        }
        let word = match &cfg.word {
            Some(w) => {
                for (i, l) in w.iter().enumerate() {
                    if !family.contains_key(l) {
                        return config_err(&format!("/word/{i}"), format!("label {l:?} is not in the family"));
                    }
                }
                Some(w.clone())
            }
            None => None,
        };
        let triplet = cfg.triplet.clone().unwrap_or_else(|| LevyTriplet::additive(1.0, 0.0, vec![(1.0, 1.0)]));
        triplet.validate().map_err(|e| CliError::Config { path: "/triplet".into(), message: e.to_string() })?;
        let law: Law = cfg
            .law
            .as_deref()
            .unwrap_or("bernoulli:1/2")
            .parse()
            .map_err(|e: partlab::Error| CliError::Config { path: "/law".into(), message: e.to_string() })?;
        let classes = match &cfg.classes {
            None => APPROX_CLASSES.to_vec(),
            Some(cs) => {
                let mut out = Vec::new();
                for (i, c) in cs.iter().enumerate() {
                    let path = format!("/classes/{i}");
                    let p: Partition = c.parse().map_err(|e: partlab_core::Error| CliError::Config {
                        path: path.clone(),
                        message: e.to_string(),
                    })?;
                    out.push(ApproxClass::of(&p).map_err(|e| CliError::Config { path, message: e.to_string() })?);
                }
                nonempty("/classes", out)?
            }
        };
        let diagonal = match &cfg.diagonal {
            None => ["0", "1", "2", "5"].iter().map(|s| parse_q("/diagonal", s)).collect::<Result<Vec<_>>>()?,
            Some(d) => {
                let v = d.iter().enumerate().map(|(i, s)| parse_q(&format!("/diagonal/{i}"), s)).collect::<Result<Vec<_>>>()?;
                nonempty("/diagonal", v)?
            }
        };
        let mut tolerance = sc.default_tolerance();
        if let Some(t) = &cfg.tolerance {
            if let Some(s) = t.sigmas {
                if !(s.is_finite() && s >= 0.0) {
                    return config_err("/tolerance/sigmas", "must be finite and nonnegative");
                }
                tolerance.sigmas = s;
            }
            if let Some(f) = t.floor {
                if !(f.is_finite() && f >= 0.0) {
                    return config_err("/tolerance/floor", "must be finite and nonnegative");
                }
                tolerance.floor = f;
            }
            if let Some(c) = t.combine {
                tolerance.combine = c;
            }
        }
        let budget = ov.budget.or(cfg.budget).map_or(DEFAULT_BUDGET, u128::from);
        Ok(Resolved {
            scenario: sc,
            seed,
            ks,
            ns,
            ts,
            samples,
            steps,
            family,
            word,
            triplet,
            law,
            classes,
            field: cfg.field.unwrap_or(Field::Complex),
            diagonal,
            tolerance,
            output: cfg.output.clone().unwrap_or_default(),
            threads: ov.threads.or(cfg.threads).unwrap_or(0),
            budget,
        })
    }

    /// The seed of a stochastic run; validated to exist by [`Resolved::new`].
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> (String, String) {
        match ExperimentConfig::from_json(text).and_then(|c| Resolved::new(&c, &Overrides::default())) {
            Err(CliError::Config { path, message }) => (path, message),
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn missing_seed_is_named() {
        let (path, message) = err(r#"{"scenario": "semicircle"}"#);
        assert_eq!(path, "/seed");
        assert!(message.contains("seed"));
    }

    #[test]
    fn seed_from_the_command_line_suffices() {
        let c = ExperimentConfig::from_json(r#"{"scenario": "semicircle"}"#).unwrap();
        let r = Resolved::new(&c, &Overrides { seed: Some(3), ..Overrides::default() }).unwrap();
        assert_eq!(r.seed, Some(3));
    }

    #[test]
    fn exact_scenarios_need_no_seed() {
        let c = ExperimentConfig::from_json(r#"{"scenario": "freeness-scaling"}"#).unwrap();
        assert!(Resolved::new(&c, &Overrides::default()).is_ok());
        let c = ExperimentConfig::from_json(r#"{"scenario": "classical-bridge"}"#).unwrap();
        assert!(Resolved::new(&c, &Overrides::default()).is_ok());
    }

    #[test]
    fn schema_errors_carry_pointers() {
        assert_eq!(err(r#"{"scenario": "semicircle", "seed": 1, "samples": 0}"#).0, "/samples");
        assert_eq!(err(r#"{"scenario": "semicircle", "seed": 1, "bogus": 0}"#).0, "/bogus");
        assert_eq!(err(r#"{"scenario": "semicircle", "seed": 1, "tolerance": {"sigma": 2}}"#).0, "/tolerance/sigma");
        assert_eq!(err(r#"{"scenario": "semicircle", "seed": 1, "N": [300, "x"]}"#).0, "/N/1");
        assert_eq!(err(r#"{"scenario": "semicircle", "seed": 1, "family": {"h": "nope"}}"#).0, "/family/h");
        assert_eq!(err(r#"{"scenario": "nope"}"#).0, "/scenario");
        assert_eq!(err(r#"{"scenario": "gaussian-approx", "seed": 1, "classes": ["{1 2 3}"]}"#).0, "/classes/0");
    }
}
