//! Experiment configuration.
//!
//! Configs are UTF-8 TOML restricted to flat sections of scalar or array
//! keys. No nesting below the section level.
//!
//! ```toml
//! [experiment]
//! kind = "hydrodynamics"   # required
//! seed = 7                 # default 0
//! out = "runs/hydro"       # default "out"
//!
//! [model]
//! n = [200]                # required, integer or list
//! theta = [0.5, 1.0, 2.0]  # required, number or list
//! alpha = 0.1              # default rho
//! beta = 0.9               # default rho
//! rho = 0.5                # default 0.5
//!
//! [run]
//! replicas = 1000
//! horizon = 0.1
//! times = [0.01, 0.05, 0.1]
//! burn_in = 0.5            # hydrostatics only
//! mode = 1                 # eigenfunction index of the test function
//! boundary = "left"        # replacement-scaling only: "left" or "right"
//!
//! [pde]
//! dt = 1e-3
//! m = 400
//!
//! [gates]
//! sigmas = 4.0
//! l1 = 0.02
//! exact = 1e-10
//! slope = 0.2
//! skewness = 0.1
//!
//! [output]
//! dump_matrix = false
//! trajectories = "none"    # "none", "csv" or "binary"
//! export_replicas = 1
//! ```

use std::fmt;
use std::path::PathBuf;

use serde::Serialize;
use slowsep::oracle::MAX_EXACT_N;
use slowsep::Params;
use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ExactCheck,
    Hydrodynamics,
    Hydrostatics,
    QvCheck,
    Gaussianity,
    OuCovariance,
    ReplacementScaling,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::ExactCheck,
        ExperimentKind::Hydrodynamics,
        ExperimentKind::Hydrostatics,
        ExperimentKind::QvCheck,
        ExperimentKind::Gaussianity,
        ExperimentKind::OuCovariance,
        ExperimentKind::ReplacementScaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ExactCheck => "exact-check",
            ExperimentKind::Hydrodynamics => "hydrodynamics",
            ExperimentKind::Hydrostatics => "hydrostatics",
            ExperimentKind::QvCheck => "qv-check",
            ExperimentKind::Gaussianity => "gaussianity",
            ExperimentKind::OuCovariance => "ou-covariance",
            ExperimentKind::ReplacementScaling => "replacement-scaling",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    fn default_horizon(self) -> f64 {
        match self {
            ExperimentKind::Hydrostatics => 1.5,
            ExperimentKind::ReplacementScaling => 0.5,
            _ => 0.1,
        }
    }

    fn default_times(self, horizon: f64) -> Vec<f64> {
        match self {
            ExperimentKind::Hydrodynamics => vec![horizon / 10.0, horizon / 2.0, horizon],
            ExperimentKind::QvCheck | ExperimentKind::OuCovariance => {
                vec![0.0, horizon / 5.0, horizon / 2.0, horizon]
            }
            _ => vec![horizon],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which reservoir-adjacent site the replacement experiment watches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Left,
    Right,
}

impl Boundary {
    pub fn site(self, n: usize) -> usize {
        match self {
            Boundary::Left => 1,
            Boundary::Right => n - 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryFormat {
    None,
    Csv,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub sigmas: f64,
    pub l1: f64,
    pub exact: f64,
    pub slope: f64,
    pub skewness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub out: PathBuf,
    pub n: Vec<usize>,
    pub theta: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub replicas: usize,
    pub horizon: f64,
    pub times: Vec<f64>,
    pub burn_in: f64,
    pub mode: usize,
    pub boundary: Boundary,
    pub dt: f64,
    pub m: usize,
    pub gates: Tolerances,
    pub dump_matrix: bool,
    pub trajectories: TrajectoryFormat,
    pub export_replicas: usize,
}

impl ExperimentConfig {
    /// Parameter sets for the `(n, theta)` grid, row-major in `n`.
    pub fn cells(&self) -> Vec<(usize, f64)> {
        self.n
            .iter()
            .flat_map(|&n| self.theta.iter().map(move |&t| (n, t)))
            .collect()
    }

    pub fn params(&self, n: usize, theta: f64) -> slowsep::Result<Params> {
        Params::new(n, theta, self.alpha, self.beta, self.rho)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigIssue {
    Syntax(String),
    UnknownSection { section: String, suggestion: Option<String> },
    UnknownKey { key: String, suggestion: Option<String> },
    Missing(String),
    Type { key: String, expected: &'static str },
    Invalid { key: String, reason: String },
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hint = |s: &Option<String>| match s {
            Some(s) => format!(" (did you mean `{s}`?)"),
            None => String::new(),
        };
        match self {
            ConfigIssue::Syntax(m) => write!(f, "syntax error: {m}"),
            ConfigIssue::UnknownSection { section, suggestion } => {
                write!(f, "unknown section `[{section}]`{}", hint(suggestion))
            }
            ConfigIssue::UnknownKey { key, suggestion } => {
                write!(f, "unknown key `{key}`{}", hint(suggestion))
            }
            ConfigIssue::Missing(k) => write!(f, "missing required key `{k}`"),
            ConfigIssue::Type { key, expected } => write!(f, "`{key}` must be {expected}"),
            ConfigIssue::Invalid { key, reason } => write!(f, "invalid `{key}`: {reason}"),
        }
    }
}

/// Every problem found in a config document.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for issue in &self.0 {
            writeln!(f, "  - {issue}")?;
        }
        Ok(())
    }
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("experiment", &["kind", "seed", "out"]),
    ("model", &["n", "theta", "alpha", "beta", "rho"]),
    ("run", &["replicas", "horizon", "times", "burn_in", "mode", "boundary"]),
    ("pde", &["dt", "m"]),
    ("gates", &["sigmas", "l1", "exact", "slope", "skewness"]),
    ("output", &["dump_matrix", "trajectories", "export_replicas"]),
];

fn nearest<'a>(word: &str, candidates: impl Iterator<Item = &'a str>) -> Option<String> {
    candidates
        .map(|c| (strsim::damerau_levenshtein(word, c), c))
        .filter(|&(d, c)| d <= 2.max(c.len() / 3))
        .min_by_key(|&(d, _)| d)
        .map(|(_, c)| c.to_string())
}

struct Reader<'a> {
    root: &'a Table,
    issues: Vec<ConfigIssue>,
}

impl<'a> Reader<'a> {
    fn get(&self, section: &str, key: &str) -> Option<&'a Value> {
        self.root.get(section)?.as_table()?.get(key)
    }

    fn type_error(&mut self, section: &str, key: &str, expected: &'static str) {
        self.issues.push(ConfigIssue::Type {
            key: format!("{section}.{key}"),
            expected,
        });
    }

    fn invalid(&mut self, section: &str, key: &str, reason: impl Into<String>) {
        self.issues.push(ConfigIssue::Invalid {
            key: format!("{section}.{key}"),
            reason: reason.into(),
        });
    }

    fn float(&mut self, section: &str, key: &str) -> Option<f64> {
        match self.get(section, key)? {
            Value::Float(v) => Some(*v),
            Value::Integer(v) => Some(*v as f64),
            _ => {
                self.type_error(section, key, "a number");
                None
            }
        }
    }

    fn uint(&mut self, section: &str, key: &str) -> Option<u64> {
        match self.get(section, key)? {
            Value::Integer(v) if *v >= 0 => Some(*v as u64),
            _ => {
                self.type_error(section, key, "a nonnegative integer");
                None
            }
        }
    }

    fn string(&mut self, section: &str, key: &str) -> Option<&'a str> {
        match self.get(section, key)? {
            Value::String(s) => Some(s),
            _ => {
                self.type_error(section, key, "a string");
                None
            }
        }
    }

    fn boolean(&mut self, section: &str, key: &str) -> Option<bool> {
        match self.get(section, key)? {
            Value::Boolean(b) => Some(*b),
            _ => {
                self.type_error(section, key, "a boolean");
                None
            }
        }
    }

    fn float_list(&mut self, section: &str, key: &str) -> Option<Vec<f64>> {
        let v = self.get(section, key)?;
        let items: Vec<&Value> = match v {
            Value::Array(a) => a.iter().collect(),
            other => vec![other],
        };
        let out: Option<Vec<f64>> = items
            .iter()
            .map(|v| match v {
                Value::Float(x) => Some(*x),
                Value::Integer(x) => Some(*x as f64),
                _ => None,
            })
            .collect();
        if out.is_none() {
            self.type_error(section, key, "a number or a list of numbers");
        }
        out
    }

    fn uint_list(&mut self, section: &str, key: &str) -> Option<Vec<usize>> {
        let v = self.get(section, key)?;
        let items: Vec<&Value> = match v {
            Value::Array(a) => a.iter().collect(),
            other => vec![other],
        };
        let out: Option<Vec<usize>> = items
            .iter()
            .map(|v| match v {
                Value::Integer(x) if *x >= 0 => Some(*x as usize),
                _ => None,
            })
            .collect();
        if out.is_none() {
            self.type_error(section, key, "a nonnegative integer or a list of them");
        }
        out
    }
}

fn check_shape(root: &Table, issues: &mut Vec<ConfigIssue>) {
    for (section, value) in root {
        let Some(&(_, keys)) = SCHEMA.iter().find(|(s, _)| s == section) else {
            // a top-level key that belongs in some section
            let owner = SCHEMA.iter().find(|(_, keys)| keys.contains(&section.as_str()));
            let suggestion = match owner {
                Some((s, _)) => Some(format!("[{s}] {section}")),
                None => nearest(section, SCHEMA.iter().map(|(s, _)| *s)).map(|s| format!("[{s}]")),
            };
            issues.push(ConfigIssue::UnknownSection {
                section: section.clone(),
                suggestion,
            });
            continue;
        };
        let Some(table) = value.as_table() else {
            issues.push(ConfigIssue::Type {
                key: section.clone(),
                expected: "a section",
            });
            continue;
        };
        for (key, v) in table {
            if !keys.contains(&key.as_str()) {
                issues.push(ConfigIssue::UnknownKey {
                    key: format!("{section}.{key}"),
                    suggestion: nearest(key, keys.iter().copied()).map(|k| format!("{section}.{k}")),
                });
            } else if v.is_table() {
                issues.push(ConfigIssue::Type {
                    key: format!("{section}.{key}"),
                    expected: "a scalar or a list, not a nested table",
                });
            }
        }
    }
}

/// Parses and validates a config document, collecting every problem.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigErrors(vec![ConfigIssue::Syntax(e.message().to_string())]))?;
    let mut issues = Vec::new();
    check_shape(&root, &mut issues);
    let mut r = Reader { root: &root, issues };

    let kind = match r.string("experiment", "kind") {
        Some(s) => match ExperimentKind::parse(s) {
            Some(k) => Some(k),
            None => {
                let names = ExperimentKind::ALL.iter().map(|k| k.name());
                let hint = nearest(s, names)
                    .map(|k| format!(", did you mean `{k}`?"))
                    .unwrap_or_default();
                r.invalid("experiment", "kind", format!("unknown experiment `{s}`{hint}"));
                None
            }
        },
        None => {
            if r.get("experiment", "kind").is_none() {
                r.issues.push(ConfigIssue::Missing("experiment.kind".into()));
            }
            None
        }
    };
    let seed = r.uint("experiment", "seed").unwrap_or(0);
    let out = r.string("experiment", "out").unwrap_or("out").into();

    let n = r.uint_list("model", "n");
    if r.get("model", "n").is_none() {
        r.issues.push(ConfigIssue::Missing("model.n".into()));
    }
    let theta = r.float_list("model", "theta");
    if r.get("model", "theta").is_none() {
        r.issues.push(ConfigIssue::Missing("model.theta".into()));
    }
    let rho = r.float("model", "rho").unwrap_or(0.5);
    let alpha = r.float("model", "alpha").unwrap_or(rho);
    let beta = r.float("model", "beta").unwrap_or(rho);

    let replicas = r.uint("run", "replicas").unwrap_or(1000) as usize;
    let default_horizon = kind.map_or(0.1, ExperimentKind::default_horizon);
    let horizon = r.float("run", "horizon").unwrap_or(default_horizon);
    let times = r
        .float_list("run", "times")
        .unwrap_or_else(|| kind.map_or(vec![horizon], |k| k.default_times(horizon)));
    let burn_in = r.float("run", "burn_in").unwrap_or(horizon / 3.0);
    let mode = r.uint("run", "mode").unwrap_or(1) as usize;
    let boundary = match r.string("run", "boundary").unwrap_or("left") {
        "left" => Boundary::Left,
        "right" => Boundary::Right,
        other => {
            r.invalid("run", "boundary", format!("`{other}` is not one of left, right"));
            Boundary::Left
        }
    };

    let dt = r.float("pde", "dt").unwrap_or(1e-3);
    let m = r.uint("pde", "m").unwrap_or(400) as usize;

    let gates = Tolerances {
        sigmas: r.float("gates", "sigmas").unwrap_or(4.0),
        l1: r.float("gates", "l1").unwrap_or(match kind {
            Some(ExperimentKind::Hydrostatics) => 0.03,
            _ => 0.02,
        }),
        exact: r.float("gates", "exact").unwrap_or(1e-10),
        slope: r.float("gates", "slope").unwrap_or(0.2),
        skewness: r.float("gates", "skewness").unwrap_or(0.1),
    };

    let dump_matrix = r.boolean("output", "dump_matrix").unwrap_or(false);
    let trajectories = match r.string("output", "trajectories").unwrap_or("none") {
        "none" => TrajectoryFormat::None,
        "csv" => TrajectoryFormat::Csv,
        "binary" => TrajectoryFormat::Binary,
        other => {
            r.invalid("output", "trajectories", format!("`{other}` is not one of none, csv, binary"));
            TrajectoryFormat::None
        }
    };
    let export_replicas = r.uint("output", "export_replicas").unwrap_or(1) as usize;

    let mut issues = r.issues;
    let mut invalid = |key: &str, reason: String| {
        issues.push(ConfigIssue::Invalid {
            key: key.into(),
            reason,
        })
    };

    if replicas < 1 {
        invalid("run.replicas", "need at least one replica".into());
    }
    if !(horizon > 0.0) {
        invalid("run.horizon", format!("must be positive, got {horizon}"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        invalid("run.times", "must be strictly increasing".into());
    }
    if times.iter().any(|&t| t < 0.0 || t > horizon) {
        invalid("run.times", format!("every time must lie in [0, {horizon}]"));
    }
    if !(dt > 0.0) {
        invalid("pde.dt", format!("must be positive, got {dt}"));
    }
    if m < 2 {
        invalid("pde.m", format!("need at least 2 intervals, got {m}"));
    }
    if !(gates.sigmas > 0.0) {
        invalid("gates.sigmas", "must be positive".into());
    }
    if let (Some(ns), Some(thetas)) = (&n, &theta) {
        if ns.is_empty() {
            invalid("model.n", "empty list".into());
        }
        if thetas.is_empty() {
            invalid("model.theta", "empty list".into());
        }
        let mut seen = Vec::new();
        for &nn in ns {
            for &th in thetas {
                if let Err(e) = Params::new(nn.max(2), th, alpha, beta, rho) {
                    let msg = e.to_string();
                    if !seen.contains(&msg) {
                        seen.push(msg);
                    }
                }
            }
            if nn < 2 {
                let msg = slowsep::Error::LatticeTooSmall(nn).to_string();
                if !seen.contains(&msg) {
                    seen.push(msg);
                }
            }
        }
        for msg in seen {
            invalid("model", msg);
        }
        if kind == Some(ExperimentKind::ExactCheck) && ns.iter().any(|&x| x > MAX_EXACT_N) {
            invalid("model.n", format!("exact-check needs n <= {MAX_EXACT_N}"));
        }
        if kind == Some(ExperimentKind::ReplacementScaling) {
            if ns.len() < 2 {
                invalid("model.n", "replacement-scaling needs at least two lattice sizes".into());
            }
        }
    }
    if kind == Some(ExperimentKind::Hydrostatics) && !(burn_in >= 0.0 && burn_in < horizon) {
        invalid("run.burn_in", format!("must lie in [0, {horizon})"));
    }
    if kind == Some(ExperimentKind::Gaussianity) && replicas < slowsep::fluct::MIN_GAUSSIANITY_REPLICAS {
        invalid(
            "run.replicas",
            format!("gaussianity needs at least {}", slowsep::fluct::MIN_GAUSSIANITY_REPLICAS),
        );
    }

    if !issues.is_empty() {
        return Err(ConfigErrors(issues));
    }
    Ok(ExperimentConfig {
        kind: kind.expect("checked above"),
        seed,
        out,
        n: n.expect("checked above"),
        theta: theta.expect("checked above"),
        alpha,
        beta,
        rho,
        replicas,
        horizon,
        times,
        burn_in,
        mode,
        boundary,
        dt,
        m,
        gates,
        dump_matrix,
        trajectories,
        export_replicas,
    })
}
