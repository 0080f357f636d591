//! Experiment configuration: JSON-serializable description of what to run,
//! on which graph family, with which parameter grid, plus the assertions
//! whose outcome decides the process exit code.

use std::env;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{
    complete_graph, cycle_graph, hamming_graph, lps_ramanujan_graph, random_regular_graph,
    read_edge_list, Graph,
};
use crate::{Error, Result};

use super::OUT_DIR_ENV;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Window,
    Supercritical,
    Conditions,
    Coupling,
    Tree,
}

/// A parametrized graph family, or a single graph loaded from an edge-list
/// file. Every member is addressed by one integer parameter (size, side
/// length, or modulus), so sweeps can iterate `params()` and call `build`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FamilySpec {
    Complete { sizes: Vec<usize> },
    Hamming { k: usize, sides: Vec<usize> },
    RandomRegular { degree: usize, sizes: Vec<usize> },
    Lps { p: u64, qs: Vec<u64> },
    Cycle { sizes: Vec<usize> },
    File { path: PathBuf },
}

impl FamilySpec {
    pub fn params(&self) -> Vec<u64> {
        match self {
            FamilySpec::Complete { sizes }
            | FamilySpec::RandomRegular { sizes, .. }
            | FamilySpec::Cycle { sizes } => sizes.iter().map(|&s| s as u64).collect(),
            FamilySpec::Hamming { sides, .. } => sides.iter().map(|&s| s as u64).collect(),
            FamilySpec::Lps { qs, .. } => qs.clone(),
            FamilySpec::File { .. } => vec![0],
        }
    }

    pub fn member_label(&self, param: u64) -> String {
        match self {
            FamilySpec::Complete { .. } => format!("K_{param}"),
            FamilySpec::Hamming { k, .. } => format!("H({k},{param})"),
            FamilySpec::RandomRegular { degree, .. } => format!("RR({degree},{param})"),
            FamilySpec::Lps { p, .. } => format!("LPS({p},{param})"),
            FamilySpec::Cycle { .. } => format!("C_{param}"),
            FamilySpec::File { path } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "file".into()),
        }
    }

    /// Materialize one member. `seed` only matters for random families.
    pub fn build(&self, param: u64, seed: u64) -> Result<Graph> {
        match self {
            FamilySpec::Complete { .. } => complete_graph(param as usize),
            FamilySpec::Hamming { k, .. } => hamming_graph(*k, param as usize),
            FamilySpec::RandomRegular { degree, .. } => {
                random_regular_graph(param as usize, *degree, seed)
            }
            FamilySpec::Lps { p, .. } => lps_ramanujan_graph(*p, param),
            FamilySpec::Cycle { .. } => cycle_graph(param as usize),
            FamilySpec::File { path } => read_edge_list(path),
        }
    }

    /// Complete graphs percolate through the implicit pair sampler instead
    /// of a materialized edge list, so sweeps can reach n = 10^5 and beyond.
    pub fn is_complete(&self) -> bool {
        matches!(self, FamilySpec::Complete { .. })
    }

    pub fn check(&self) -> Result<()> {
        if self.params().is_empty() {
            return Err(Error::Config("family has no members".into()));
        }
        Ok(())
    }
}

/// Supercriticality as a function of size: eps(n) = c * n^{-a}. The decay
/// exponent must stay below 1/3 so that eps(n)^3 * n still grows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsRule {
    pub c: f64,
    pub a: f64,
}

impl EpsRule {
    pub fn new(c: f64, a: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Config(format!("eps rule needs c > 0, got {c}")));
        }
        if !(a > 0.0 && a < 1.0 / 3.0) {
            return Err(Error::Config(format!(
                "eps rule needs decay exponent in (0, 1/3), got {a}"
            )));
        }
        Ok(EpsRule { c, a })
    }

    pub fn eps(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(-self.a)
    }

    pub fn validate(&self) -> Result<()> {
        EpsRule::new(self.c, self.a).map(|_| ())
    }
}

impl fmt::Display for EpsRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c == 1.0 {
            write!(f, "n^-{}", self.a)
        } else {
            write!(f, "{}*n^-{}", self.c, self.a)
        }
    }
}

impl FromStr for EpsRule {
    type Err = Error;

    /// Accepts `n^-0.25` or `0.5*n^-0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace(' ', "");
        let (c, rest) = match s.split_once('*') {
            Some((c, rest)) => (
                c.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("eps rule coefficient {c:?}: {e}")))?,
                rest,
            ),
            None => (1.0, s.as_str()),
        };
        let exp = rest
            .strip_prefix("n^")
            .ok_or_else(|| Error::Parse(format!("eps rule {s:?}: expected c*n^-a form")))?
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("eps rule exponent in {s:?}: {e}")))?;
        if exp >= 0.0 {
            return Err(Error::Parse(format!(
                "eps rule {s:?}: exponent must be negative"
            )));
        }
        EpsRule::new(c, -exp)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryStats {
    #[serde(default)]
    pub diameter: bool,
    #[serde(default)]
    pub mixing: bool,
}

/// Bound on one summary metric, optionally restricted to the cells matching
/// the given selectors. Every configured assertion must pass for a run to
/// exit 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}

impl Assertion {
    pub fn admits(&self, value: f64) -> bool {
        self.min.map_or(true, |m| value >= m) && self.max.map_or(true, |m| value <= m)
    }

    pub fn matches_cell(&self, n: usize, lambda: Option<f64>) -> bool {
        self.n.map_or(true, |want| want == n)
            && match (self.lambda, lambda) {
                (None, _) => true,
                (Some(want), Some(have)) => (want - have).abs() < 1e-12,
                (Some(_), None) => false,
            }
    }

    fn check(&self) -> Result<()> {
        if self.metric.is_empty() {
            return Err(Error::Config("assertion with empty metric".into()));
        }
        if self.min.is_none() && self.max.is_none() {
            return Err(Error::Config(format!(
                "assertion on {:?} has neither min nor max",
                self.metric
            )));
        }
        Ok(())
    }
}

fn default_delta() -> f64 {
    0.01
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Required for every kind except `tree`, which runs graph-free.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lambda_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_rule: Option<EpsRule>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub geometry: GeometryStats,
    /// Constant in the giant-component detection threshold
    /// delta * eps * n / ln^3(n eps^3).
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub avoid_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eps_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub r_grid: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assertions: Vec<Assertion>,
}

impl ExperimentConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::Config(format!("delta must be positive, got {}", self.delta)));
        }
        if self.lambda_grid.iter().any(|l| !l.is_finite()) {
            return Err(Error::Config("lambda grid contains a non-finite value".into()));
        }
        if let Some(rule) = &self.eps_rule {
            rule.validate()?;
        }
        for a in &self.assertions {
            a.check()?;
        }
        let family = || {
            self.family
                .as_ref()
                .ok_or_else(|| Error::Config(format!("{:?} experiment needs a family", self.kind)))
        };
        match self.kind {
            ExperimentKind::Window => {
                family()?.check()?;
                if self.lambda_grid.is_empty() {
                    return Err(Error::Config("window experiment needs a lambda grid".into()));
                }
            }
            ExperimentKind::Supercritical => {
                family()?.check()?;
                if self.eps_rule.is_none() {
                    return Err(Error::Config("supercritical experiment needs an eps rule".into()));
                }
            }
            ExperimentKind::Conditions => {
                family()?.check()?;
            }
            ExperimentKind::Coupling => {
                family()?.check()?;
                let p = self
                    .p
                    .ok_or_else(|| Error::Config("coupling experiment needs p".into()))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Config(format!("p must lie in [0, 1], got {p}")));
                }
                if self.r.unwrap_or(0) == 0 {
                    return Err(Error::Config("coupling experiment needs r >= 1".into()));
                }
            }
            ExperimentKind::Tree => {
                let d = self
                    .degree
                    .ok_or_else(|| Error::Config("tree experiment needs a degree".into()))?;
                if d < 3 {
                    return Err(Error::Config(format!("degree must be at least 3, got {d}")));
                }
                if self.eps_grid.is_empty() || self.r_grid.is_empty() {
                    return Err(Error::Config("tree experiment needs eps and r grids".into()));
                }
                if self.eps_grid.iter().any(|&e| !(e > 0.0 && e < 0.5)) {
                    return Err(Error::Config("eps grid values must lie in (0, 1/2)".into()));
                }
                if self.r_grid.contains(&0) {
                    return Err(Error::Config("r grid values must be at least 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Output directory for this run: explicit path if given (relative ones
    /// resolved against the output env var), else the env var, else the
    /// current directory.
    pub fn resolve_out(&self) -> PathBuf {
        match &self.out {
            Some(path) => resolve_against_out_dir(path),
            None => env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| ".".into()),
        }
    }
}

pub fn resolve_against_out_dir(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match env::var_os(OUT_DIR_ENV) {
        Some(base) => PathBuf::from(base).join(path),
        None => path.to_path_buf(),
    }
}
