//! Flat `key = value` scenario documents.
//!
//! One assignment per line, `#` starts a comment, dotted prefixes group
//! keys (`system.kind = monotubular`, `target.center = 0.5`). Parsing
//! collects every problem before giving up.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use exsteer_core::grid::{Grid, Kind};
use exsteer_core::presets::Preset;
use exsteer_core::semigroup::{Plant, SystemSpec};
use exsteer_core::semilinear::Nonlinearity;
use exsteer_core::steering::TargetTransport;
use thiserror::Error;

pub const DEFAULT_N_CELLS: usize = 1024;
pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    GramianReport,
    CheckConditions,
    SteerLinear,
    SteerSemilinear,
    DemoNoncoercivity,
    Selftest,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::GramianReport,
        Command::CheckConditions,
        Command::SteerLinear,
        Command::SteerSemilinear,
        Command::DemoNoncoercivity,
        Command::Selftest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::GramianReport => "gramian-report",
            Command::CheckConditions => "check-conditions",
            Command::SteerLinear => "steer-linear",
            Command::SteerSemilinear => "steer-semilinear",
            Command::DemoNoncoercivity => "demo-noncoercivity",
            Command::Selftest => "selftest",
        }
    }

    fn needs_target(self) -> bool {
        matches!(self, Command::SteerLinear | Command::SteerSemilinear)
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| one_of(Command::ALL.map(Command::as_str)))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A profile as written in the document. `samples` keeps both the path and
/// the knots read from it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec {
    pub preset: Preset,
    pub path: Option<PathBuf>,
}

impl ProfileSpec {
    pub fn zero() -> Self {
        Self {
            preset: Preset::Zero,
            path: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    pub n_time_steps_per_stage: usize,
    pub n_stages: usize,
    pub stop_tol: f64,
    pub max_picard: usize,
    pub tol_picard: f64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            n_time_steps_per_stage: 256,
            n_stages: 20,
            stop_tol: 0.0,
            max_picard: 50,
            tol_picard: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub command: Command,
    pub plant: Plant,
    pub n_cells: usize,
    pub horizon: f64,
    pub eps: f64,
    /// One profile per state component.
    pub initial: Vec<ProfileSpec>,
    pub target: Option<Vec<ProfileSpec>>,
    pub nonlinearity: Nonlinearity,
    pub numeric: NumericOptions,
    /// Start of the single steering segment for `steer-linear`.
    pub linear_tau: f64,
    pub transport: TargetTransport,
    /// Number of log-spaced times in the coercivity table.
    pub report_n_t: usize,
    pub report_t_min: f64,
    pub demo_deltas: Vec<f64>,
    pub demo_t: f64,
    pub selftest_n_cells: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn system(&self) -> SystemSpec {
        SystemSpec::new(self.plant, self.horizon, self.eps).expect("validated at parse time")
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.n_cells).expect("validated at parse time")
    }

    pub fn kind(&self) -> Kind {
        match self.plant {
            Plant::Monotubular { .. } => Kind::Scalar,
            Plant::TwoStream { .. } => Kind::Pair,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigIssue {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("missing key `{key}`")]
    MissingKey { key: String },
    #[error("`{key}` = `{value}`: expected {expected}")]
    Invalid { key: String, value: String, expected: String },
    #[error("`{key}` = {value} out of range: admissible range is {range}")]
    Range { key: String, value: String, range: String },
}

impl ConfigIssue {
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigIssue::Syntax { .. } => None,
            ConfigIssue::Duplicate { key, .. }
            | ConfigIssue::UnknownKey { key }
            | ConfigIssue::MissingKey { key }
            | ConfigIssue::Invalid { key, .. }
            | ConfigIssue::Range { key, .. } => Some(key),
        }
    }
}

/// Every problem found in one document.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} configuration error(s)", self.0.len())?;
        for issue in &self.0 {
            write!(f, "\n  - {issue}")?;
        }
        Ok(())
    }
}

/// Values that take precedence over the document (command-line flags).
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub command: Option<Command>,
    pub n_cells: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    /// Directory that relative `samples` paths are resolved against.
    pub base_dir: Option<PathBuf>,
}

pub fn parse_config(document: &str) -> Result<ScenarioConfig, ConfigErrors> {
    parse_config_with(document, &Overrides::default())
}

pub fn parse_config_with(document: &str, overrides: &Overrides) -> Result<ScenarioConfig, ConfigErrors> {
    let mut r = Reader::default();
    r.load(document);
    r.apply(overrides);
    let cfg = r.build(overrides.base_dir.as_deref());
    let leftovers: Vec<String> = r.entries.keys().filter(|k| !r.used.contains(*k)).cloned().collect();
    r.issues.extend(leftovers.into_iter().map(|key| ConfigIssue::UnknownKey { key }));
    match cfg {
        Some(cfg) if r.issues.is_empty() => Ok(cfg),
        _ => Err(ConfigErrors(r.issues)),
    }
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ScenarioConfig, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut ov = overrides.clone();
    if ov.base_dir.is_none() {
        ov.base_dir = path.parent().map(Path::to_path_buf);
    }
    parse_config_with(&text, &ov).map_err(|errors| LoadError::Invalid {
        path: path.to_path_buf(),
        errors,
    })
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {errors}", path.display())]
    Invalid { path: PathBuf, errors: ConfigErrors },
}

fn one_of<const N: usize>(names: [&str; N]) -> String {
    format!("one of {}", names.map(|n| format!("`{n}`")).join(", "))
}

#[derive(Default)]
struct Reader {
    entries: BTreeMap<String, String>,
    used: BTreeSet<String>,
    issues: Vec<ConfigIssue>,
}

impl Reader {
    fn load(&mut self, document: &str) {
        for (i, raw) in document.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                self.issues.push(ConfigIssue::Syntax {
                    line: i + 1,
                    text: raw.trim().to_string(),
                });
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || k.contains(char::is_whitespace) {
                self.issues.push(ConfigIssue::Syntax {
                    line: i + 1,
                    text: raw.trim().to_string(),
                });
                continue;
            }
            if self.entries.insert(k.to_string(), v.to_string()).is_some() {
                self.issues.push(ConfigIssue::Duplicate {
                    line: i + 1,
                    key: k.to_string(),
                });
            }
        }
    }

    fn apply(&mut self, ov: &Overrides) {
        if let Some(cmd) = ov.command {
            match self.entries.get("command") {
                Some(v) if v != cmd.as_str() => self.issues.push(ConfigIssue::Invalid {
                    key: "command".into(),
                    value: v.clone(),
                    expected: format!("`{cmd}` (the command being run)"),
                }),
                _ => {
                    self.entries.insert("command".into(), cmd.as_str().into());
                }
            }
        }
        if let Some(n) = ov.n_cells {
            self.entries.insert("grid.n_cells".into(), n.to_string());
            if ov.command == Some(Command::Selftest) || self.entries.get("command").map(String::as_str) == Some("selftest") {
                self.entries.insert("selftest.n_cells".into(), n.to_string());
            }
        }
        if let Some(s) = ov.seed {
            self.entries.insert("selftest.seed".into(), s.to_string());
        }
        if let Some(d) = &ov.output_dir {
            self.entries.insert("output.dir".into(), d.display().to_string());
        }
    }

    fn has_prefix(&self, prefix: &str) -> bool {
        let dotted = format!("{prefix}.");
        self.entries.keys().any(|k| k.starts_with(&dotted))
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        let v = self.entries.get(key).cloned();
        if v.is_some() {
            self.used.insert(key.to_string());
        }
        v
    }

    fn missing(&mut self, key: &str) {
        self.issues.push(ConfigIssue::MissingKey { key: key.into() });
    }

    fn invalid(&mut self, key: &str, value: &str, expected: impl Into<String>) {
        self.issues.push(ConfigIssue::Invalid {
            key: key.into(),
            value: value.into(),
            expected: expected.into(),
        });
    }

    fn parsed<T: FromStr>(&mut self, key: &str, what: &str) -> Option<T> {
        let v = self.raw(key)?;
        match v.parse() {
            Ok(x) => Some(x),
            Err(_) => {
                self.invalid(key, &v, what);
                None
            }
        }
    }

    /// Parses a float and checks it against `ok`; `range` names the admissible set.
    fn float(&mut self, key: &str, ok: impl Fn(f64) -> bool, range: &str) -> Option<f64> {
        let x: f64 = self.parsed(key, "a number")?;
        if x.is_finite() && ok(x) {
            Some(x)
        } else {
            self.issues.push(ConfigIssue::Range {
                key: key.into(),
                value: fmt_f64(x),
                range: range.into(),
            });
            None
        }
    }

    fn float_req(&mut self, key: &str, ok: impl Fn(f64) -> bool, range: &str) -> Option<f64> {
        if !self.entries.contains_key(key) {
            self.missing(key);
            return None;
        }
        self.float(key, ok, range)
    }

    fn count(&mut self, key: &str, min: usize, max: usize) -> Option<usize> {
        let n: usize = self.parsed(key, "a non-negative integer")?;
        if (min..=max).contains(&n) {
            Some(n)
        } else {
            self.issues.push(ConfigIssue::Range {
                key: key.into(),
                value: n.to_string(),
                range: format!("[{min}, {max}]"),
            });
            None
        }
    }

    fn float_list(&mut self, key: &str, ok: impl Fn(f64) -> bool, range: &str) -> Option<Vec<f64>> {
        let v = self.raw(key)?;
        let mut out = Vec::new();
        for item in v.split(',').map(str::trim) {
            match item.parse::<f64>() {
                Ok(x) if x.is_finite() && ok(x) => out.push(x),
                Ok(x) => {
                    self.issues.push(ConfigIssue::Range {
                        key: key.into(),
                        value: fmt_f64(x),
                        range: range.into(),
                    });
                    return None;
                }
                Err(_) => {
                    self.invalid(key, &v, "a comma-separated list of numbers");
                    return None;
                }
            }
        }
        Some(out)
    }

    fn build(&mut self, base_dir: Option<&Path>) -> Option<ScenarioConfig> {
        let command = match self.raw("command") {
            None => {
                self.missing("command");
                None
            }
            Some(v) => match v.parse::<Command>() {
                Ok(c) => Some(c),
                Err(e) => {
                    self.invalid("command", &v, e);
                    None
                }
            },
        };

        let plant = self.plant();
        let n_cells = if self.entries.contains_key("grid.n_cells") {
            self.count("grid.n_cells", 4, 1 << 24)
        } else {
            Some(DEFAULT_N_CELLS)
        };
        let horizon = self.float_req("horizon", |x| x > 0.0, "(0, ∞)");
        let eps = self.float_req("epsilon", |x| x > 0.0 && x < 0.5, "(0, 1/2)");
        if let (Some(n), Some(e)) = (n_cells, eps) {
            if let Err(err) = Grid::new(n).and_then(|g| exsteer_core::grid::Margin::snapped(g, e)) {
                self.invalid("epsilon", &fmt_f64(e), format!("a window that fits the grid ({err})"));
            }
        }

        let components = match plant {
            Some(Plant::TwoStream { .. }) => 2,
            _ => 1,
        };
        let initial = if self.has_prefix("initial") {
            self.profiles("initial", components, base_dir)
        } else {
            Some(vec![ProfileSpec::zero(); components])
        };
        let target = if self.has_prefix("target") {
            self.profiles("target", components, base_dir).map(Some)
        } else {
            if command.is_some_and(Command::needs_target) {
                self.missing("target.kind");
            }
            Some(None)
        };

        let nonlinearity = self.nonlinearity();
        let numeric = self.numeric();

        let linear_tau = match self.float("linear.tau", |x| x >= 0.0, "[0, T)") {
            Some(t) => match horizon {
                Some(h) if t >= h => {
                    self.issues.push(ConfigIssue::Range {
                        key: "linear.tau".into(),
                        value: fmt_f64(t),
                        range: format!("[0, {}) (below the horizon)", fmt_f64(h)),
                    });
                    None
                }
                _ => Some(t),
            },
            None if self.entries.contains_key("linear.tau") => None,
            None => Some(0.0),
        };
        let transport = match self.raw("linear.transport").as_deref() {
            None | Some("transported") => Some(TargetTransport::Transported),
            Some("direct") => Some(TargetTransport::Direct),
            Some(other) => {
                self.invalid("linear.transport", other, one_of(["transported", "direct"]));
                None
            }
        };

        let report_n_t = self.count_or("report.n_t", 50, 2, 100_000);
        let report_t_min = self.float_or("report.t_min", 1e-3, |x| x > 0.0, "(0, T]");
        if let (Some(t), Some(h)) = (report_t_min, horizon) {
            if t > h {
                self.issues.push(ConfigIssue::Range {
                    key: "report.t_min".into(),
                    value: fmt_f64(t),
                    range: format!("(0, {}]", fmt_f64(h)),
                });
            }
        }
        let demo_deltas = if self.entries.contains_key("demo.deltas") {
            self.float_list("demo.deltas", |x| x > 0.0 && x < 0.5, "(0, 1/2)")
        } else {
            Some(vec![0.1, 0.05, 0.025])
        };
        let demo_t = if self.entries.contains_key("demo.t") {
            self.float("demo.t", |x| x > 0.0, "(0, ∞)")
        } else {
            horizon
        };
        let selftest_n_cells = self.count_or("selftest.n_cells", 256, 16, 1 << 16);
        let seed = if self.entries.contains_key("selftest.seed") {
            self.parsed("selftest.seed", "a non-negative integer")
        } else {
            Some(DEFAULT_SEED)
        };
        let output_dir = PathBuf::from(self.raw("output.dir").unwrap_or_else(|| "out".into()));

        Some(ScenarioConfig {
            command: command?,
            plant: plant?,
            n_cells: n_cells?,
            horizon: horizon?,
            eps: eps?,
            initial: initial?,
            target: target?,
            nonlinearity: nonlinearity?,
            numeric: numeric?,
            linear_tau: linear_tau?,
            transport: transport?,
            report_n_t: report_n_t?,
            report_t_min: report_t_min?,
            demo_deltas: demo_deltas?,
            demo_t: demo_t?,
            selftest_n_cells: selftest_n_cells?,
            seed: seed?,
            output_dir,
        })
    }

    fn count_or(&mut self, key: &str, default: usize, min: usize, max: usize) -> Option<usize> {
        if self.entries.contains_key(key) {
            self.count(key, min, max)
        } else {
            Some(default)
        }
    }

    fn float_or(&mut self, key: &str, default: f64, ok: impl Fn(f64) -> bool, range: &str) -> Option<f64> {
        if self.entries.contains_key(key) {
            self.float(key, ok, range)
        } else {
            Some(default)
        }
    }

    fn plant(&mut self) -> Option<Plant> {
        let kind = match self.raw("system.kind") {
            None => {
                self.missing("system.kind");
                return None;
            }
            Some(k) => k,
        };
        let positive = |x: f64| x > 0.0;
        let nonzero = |x: f64| x != 0.0;
        match kind.as_str() {
            "monotubular" => {
                let a = self.float_req("system.a", positive, "(0, ∞)");
                let b = self.float_req("system.b", nonzero, "ℝ \\ {0}");
                Some(Plant::Monotubular { a: a?, b: b? })
            }
            "two_stream" => {
                let h1 = self.float_req("system.h1", positive, "(0, ∞)");
                let h2 = self.float_req("system.h2", positive, "(0, ∞)");
                let b1 = self.float_req("system.b1", nonzero, "ℝ \\ {0}");
                let b2 = self.float_req("system.b2", nonzero, "ℝ \\ {0}");
                Some(Plant::TwoStream {
                    h1: h1?,
                    h2: h2?,
                    b1: b1?,
                    b2: b2?,
                })
            }
            other => {
                self.invalid("system.kind", other, one_of(["monotubular", "two_stream"]));
                None
            }
        }
    }

    /// `prefix.*` for the first component, `prefix2.*` for the second; a
    /// missing second section repeats the first.
    fn profiles(&mut self, prefix: &str, components: usize, base_dir: Option<&Path>) -> Option<Vec<ProfileSpec>> {
        let first = self.profile(prefix, base_dir);
        let mut out = vec![first];
        if components == 2 {
            let second = format!("{prefix}2");
            if self.has_prefix(&second) {
                out.push(self.profile(&second, base_dir));
            } else {
                out.push(out[0].clone());
            }
        }
        out.into_iter().collect()
    }

    fn profile(&mut self, prefix: &str, base_dir: Option<&Path>) -> Option<ProfileSpec> {
        let key = |k: &str| format!("{prefix}.{k}");
        let kind_key = key("kind");
        let Some(kind) = self.raw(&kind_key) else {
            self.missing(&kind_key);
            return None;
        };
        let any = |_: f64| true;
        let preset = match kind.as_str() {
            "zero" => Some(Preset::Zero),
            "const" => self.float_req(&key("value"), any, "ℝ").map(Preset::Const),
            "sine" => {
                let k = self.float_req(&key("k"), any, "ℝ");
                let amplitude = self.float_or(&key("amplitude"), 1.0, any, "ℝ");
                Some(Preset::Sine { k: k?, amplitude: amplitude? })
            }
            "bump" => {
                let center = self.float_req(&key("center"), any, "ℝ");
                let width = self.float_req(&key("width"), |x| x > 0.0, "(0, ∞)");
                let amplitude = self.float_or(&key("amplitude"), 1.0, any, "ℝ");
                Some(Preset::Bump {
                    center: center?,
                    width: width?,
                    amplitude: amplitude?,
                })
            }
            "poly" => {
                let k = key("coeffs");
                if !self.entries.contains_key(&k) {
                    self.missing(&k);
                }
                self.float_list(&k, |_| true, "ℝ").map(Preset::Poly)
            }
            "samples" => {
                let k = key("path");
                let Some(p) = self.raw(&k) else {
                    self.missing(&k);
                    return None;
                };
                let path = match base_dir {
                    Some(base) if Path::new(&p).is_relative() => base.join(&p),
                    _ => PathBuf::from(&p),
                };
                return match read_samples(&path) {
                    Ok(knots) => {
                        let preset = Preset::Samples(knots);
                        if let Err(e) = preset.validate() {
                            self.invalid(&k, &p, format!("a usable (theta, value) table: {e}"));
                            return None;
                        }
                        Some(ProfileSpec {
                            preset,
                            path: Some(path),
                        })
                    }
                    Err(msg) => {
                        self.invalid(&k, &p, msg);
                        None
                    }
                };
            }
            other => {
                self.invalid(&kind_key, other, one_of(["zero", "const", "sine", "bump", "poly", "samples"]));
                None
            }
        }?;
        Some(ProfileSpec { preset, path: None })
    }

    fn nonlinearity(&mut self) -> Option<Nonlinearity> {
        let name = self.raw("nonlinearity.name").unwrap_or_else(|| "zero".into());
        let has_gain = self.entries.contains_key("nonlinearity.gain");
        let gain = if has_gain {
            self.float("nonlinearity.gain", |x| x >= 0.0, "[0, ∞)")
        } else {
            None
        };
        if has_gain && gain.is_none() {
            return None;
        }
        match name.as_str() {
            "zero" if has_gain => {
                self.invalid("nonlinearity.gain", &fmt_f64(gain?), "no gain for `zero`");
                None
            }
            "sat_tanh" | "bounded_mix" if !has_gain => {
                self.missing("nonlinearity.gain");
                None
            }
            _ => match Nonlinearity::from_name(&name, gain) {
                Ok(f) => Some(f),
                Err(_) => {
                    self.invalid("nonlinearity.name", &name, one_of(Nonlinearity::NAMES));
                    None
                }
            },
        }
    }

    fn numeric(&mut self) -> Option<NumericOptions> {
        let d = NumericOptions::default();
        let n_time_steps_per_stage = self.count_or("numeric.n_time_steps_per_stage", d.n_time_steps_per_stage, 2, 1 << 20);
        let n_stages = self.count_or("numeric.n_stages", d.n_stages, 1, 60);
        let stop_tol = self.float_or("numeric.stop_tol", d.stop_tol, |x| x >= 0.0, "[0, ∞)");
        let max_picard = self.count_or("numeric.max_picard", d.max_picard, 1, 10_000);
        let tol_picard = self.float_or("numeric.tol_picard", d.tol_picard, |x| x > 0.0, "(0, ∞)");
        Some(NumericOptions {
            n_time_steps_per_stage: n_time_steps_per_stage?,
            n_stages: n_stages?,
            stop_tol: stop_tol?,
            max_picard: max_picard?,
            tol_picard: tol_picard?,
        })
    }
}

/// Two-column `theta,value` CSV; a non-numeric first row is a header.
fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("a readable file ({e})"))?;
    let mut knots = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match cols.as_slice() {
            [a, b] => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some(k) => knots.push(k),
            None if knots.is_empty() && i == 0 => continue,
            None => return Err(format!("two numeric columns on line {}", i + 1)),
        }
    }
    Ok(knots)
}

/// Shortest text that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", ")
}

fn write_profile(out: &mut Vec<(String, String)>, prefix: &str, spec: &ProfileSpec) {
    let mut put = |k: &str, v: String| out.push((format!("{prefix}.{k}"), v));
    put("kind", spec.preset.name().into());
    match &spec.preset {
        Preset::Zero => {}
        Preset::Const(c) => put("value", fmt_f64(*c)),
        Preset::Sine { k, amplitude } => {
            put("k", fmt_f64(*k));
            put("amplitude", fmt_f64(*amplitude));
        }
        Preset::Bump { center, width, amplitude } => {
            put("center", fmt_f64(*center));
            put("width", fmt_f64(*width));
            put("amplitude", fmt_f64(*amplitude));
        }
        Preset::Poly(c) => put("coeffs", list(c)),
        Preset::Samples(_) => {
            let path = spec.path.as_ref().expect("samples profile keeps its path");
            put("path", path.display().to_string());
        }
    }
}

/// Canonical document: every key spelled out, defaults included.
pub fn serialize(cfg: &ScenarioConfig) -> String {
    let mut kv: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: String| kv.push((k.to_string(), v));
    put("command", cfg.command.as_str().into());
    match cfg.plant {
        Plant::Monotubular { a, b } => {
            put("system.kind", "monotubular".into());
            put("system.a", fmt_f64(a));
            put("system.b", fmt_f64(b));
        }
        Plant::TwoStream { h1, h2, b1, b2 } => {
            put("system.kind", "two_stream".into());
            put("system.h1", fmt_f64(h1));
            put("system.h2", fmt_f64(h2));
            put("system.b1", fmt_f64(b1));
            put("system.b2", fmt_f64(b2));
        }
    }
    put("grid.n_cells", cfg.n_cells.to_string());
    put("horizon", fmt_f64(cfg.horizon));
    put("epsilon", fmt_f64(cfg.eps));
    for (i, spec) in cfg.initial.iter().enumerate() {
        let prefix = if i == 0 { "initial".to_string() } else { format!("initial{}", i + 1) };
        write_profile(&mut kv, &prefix, spec);
    }
    if let Some(target) = &cfg.target {
        for (i, spec) in target.iter().enumerate() {
            let prefix = if i == 0 { "target".to_string() } else { format!("target{}", i + 1) };
            write_profile(&mut kv, &prefix, spec);
        }
    }
    let mut put = |k: &str, v: String| kv.push((k.to_string(), v));
    put("nonlinearity.name", cfg.nonlinearity.name().into());
    if !matches!(cfg.nonlinearity, Nonlinearity::Zero) {
        put("nonlinearity.gain", fmt_f64(cfg.nonlinearity.gain()));
    }
    let n = &cfg.numeric;
    put("numeric.n_time_steps_per_stage", n.n_time_steps_per_stage.to_string());
    put("numeric.n_stages", n.n_stages.to_string());
    put("numeric.stop_tol", fmt_f64(n.stop_tol));
    put("numeric.max_picard", n.max_picard.to_string());
    put("numeric.tol_picard", fmt_f64(n.tol_picard));
    put("linear.tau", fmt_f64(cfg.linear_tau));
    put(
        "linear.transport",
        match cfg.transport {
            TargetTransport::Transported => "transported",
            TargetTransport::Direct => "direct",
        }
        .into(),
    );
    put("report.n_t", cfg.report_n_t.to_string());
    put("report.t_min", fmt_f64(cfg.report_t_min));
    put("demo.deltas", list(&cfg.demo_deltas));
    put("demo.t", fmt_f64(cfg.demo_t));
    put("selftest.n_cells", cfg.selftest_n_cells.to_string());
    put("selftest.seed", cfg.seed.to_string());
    put("output.dir", cfg.output_dir.display().to_string());

    let mut s = String::new();
    for (k, v) in kv {
        s.push_str(&k);
        s.push_str(" = ");
        s.push_str(&v);
        s.push('\n');
    }
    s
}
