//! Flat, sectioned `key = value` configuration.
//!
//! ```text
//! # comment
//! [system]
//! n_qubits = 2
//! omegas = 1, 1
//! channel = sigma_x          # sigma_x | sigma_z | sigma_minus
//! initial_state = gg         # string over {e, g}, qubit 1 first, or "mixed"
//! regime = nonmarkovian      # nonmarkovian | markovian
//!
//! [bath]
//! coupling = 0.05            # Gamma
//! bandwidth = 5              # gamma
//! temperature = 15           # T
//! omega0 = 1
//!
//! [squeeze]                  # optional, non-Markovian only
//! r = 0.4
//! theta = pi/2
//!
//! [integrator]               # all optional
//! dt = 0.01
//! t_max = 200
//! sample_every = 10
//! scheme = rk4
//! stability = reject         # reject | warn
//! steady_tol = 1e-4
//! steady_window = 20
//!
//! [sweep]                    # present => the file describes a sweep
//! axis = Gamma               # Gamma | T | gamma | r | theta
//! values = 0.01, 0.02        # or start / stop / count
//! outer_axis = theta         # optional second axis, same value forms
//!
//! [output]
//! path = out.csv
//! json = false
//! ```
//!
//! Numbers accept `pi`, `pi/x` and `x*pi` besides plain decimals. Every
//! problem in a file is reported, each with its line number.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use ssqc_core::analysis::{DEFAULT_TOL, DEFAULT_WINDOW};
use ssqc_core::{
    BathParams, Channel, DensityMatrix, IntegratorConfig, Regime, Scheme, SqueezeParams,
    StabilityPolicy, SystemSpec,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// All violations found in one file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialState {
    Basis(String),
    Mixed,
}

impl InitialState {
    pub fn build(&self, n_qubits: usize) -> ssqc_core::Result<DensityMatrix> {
        match self {
            InitialState::Basis(label) => DensityMatrix::basis_state(label),
            InitialState::Mixed => DensityMatrix::maximally_mixed(n_qubits),
        }
    }

    fn label(&self) -> &str {
        match self {
            InitialState::Basis(s) => s,
            InitialState::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub json: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyConfig {
    pub tol: f64,
    pub window: f64,
}

impl Default for SteadyConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            window: DEFAULT_WINDOW,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemSpec,
    pub initial_state: InitialState,
    pub regime: Regime,
    pub bath: BathParams,
    pub squeeze: Option<SqueezeParams>,
    pub integrator: IntegratorConfig,
    pub steady: SteadyConfig,
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Coupling strength `Γ`.
    Coupling,
    Temperature,
    /// Bandwidth `γ`.
    Bandwidth,
    SqueezeStrength,
    SqueezeAngle,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Coupling => "Gamma",
            SweepAxis::Temperature => "T",
            SweepAxis::Bandwidth => "gamma",
            SweepAxis::SqueezeStrength => "r",
            SweepAxis::SqueezeAngle => "theta",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "Gamma" => Some(SweepAxis::Coupling),
            "T" => Some(SweepAxis::Temperature),
            "gamma" => Some(SweepAxis::Bandwidth),
            "r" => Some(SweepAxis::SqueezeStrength),
            "theta" => Some(SweepAxis::SqueezeAngle),
            _ => None,
        }
    }

    fn needs_squeeze(self) -> bool {
        matches!(self, SweepAxis::SqueezeStrength | SweepAxis::SqueezeAngle)
    }

    /// `base` with this axis set to `value`.
    pub fn apply(self, base: &RunConfig, value: f64) -> ssqc_core::Result<RunConfig> {
        let mut cfg = base.clone();
        let b = &base.bath;
        match self {
            SweepAxis::Coupling => {
                cfg.bath = BathParams::new(value, b.bandwidth(), b.temperature(), b.omega0())?
            }
            SweepAxis::Temperature => {
                cfg.bath = BathParams::new(b.coupling(), b.bandwidth(), value, b.omega0())?
            }
            SweepAxis::Bandwidth => {
                cfg.bath = BathParams::new(b.coupling(), value, b.temperature(), b.omega0())?
            }
            SweepAxis::SqueezeStrength | SweepAxis::SqueezeAngle => {
                let q = base.squeeze.ok_or_else(|| {
                    ssqc_core::Error::Unsupported(format!("axis {} needs a [squeeze] section", self.name()))
                })?;
                cfg.squeeze = Some(if self == SweepAxis::SqueezeStrength {
                    SqueezeParams::new(value, q.theta())?
                } else {
                    SqueezeParams::new(q.r(), value)?
                });
            }
        }
        Ok(cfg)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepValues {
    List(Vec<f64>),
    Linear { start: f64, stop: f64, count: usize },
}

impl SweepValues {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SweepValues::List(v) => v.clone(),
            SweepValues::Linear { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|k| start + (stop - start) * k as f64 / (*n - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub axis: SweepAxis,
    pub values: SweepValues,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: RunConfig,
    pub inner: AxisSpec,
    /// Optional second axis; the sweep covers the outer product with the
    /// outer axis varying slowest.
    pub outer: Option<AxisSpec>,
}

impl SweepSpec {
    /// `(outer value, inner value, config)` in output order.
    pub fn points(&self) -> ssqc_core::Result<Vec<(Option<f64>, f64, RunConfig)>> {
        let inner = self.inner.values.values();
        let mut out = Vec::new();
        match &self.outer {
            None => {
                for v in inner {
                    out.push((None, v, self.inner.axis.apply(&self.base, v)?));
                }
            }
            Some(outer) => {
                for o in outer.values.values() {
                    let base = outer.axis.apply(&self.base, o)?;
                    for &v in &inner {
                        out.push((Some(o), v, self.inner.axis.apply(&base, v)?));
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigDoc {
    Run(RunConfig),
    Sweep(SweepSpec),
}

impl ConfigDoc {
    pub fn emit(&self) -> String {
        match self {
            ConfigDoc::Run(c) => emit_run(c),
            ConfigDoc::Sweep(s) => emit_sweep(s),
        }
    }
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("system", &["n_qubits", "omegas", "channel", "initial_state", "regime"]),
    ("bath", &["coupling", "bandwidth", "temperature", "omega0"]),
    ("squeeze", &["r", "theta"]),
    (
        "integrator",
        &["dt", "t_max", "sample_every", "scheme", "stability", "steady_tol", "steady_window"],
    ),
    (
        "sweep",
        &[
            "axis", "values", "start", "stop", "count", "outer_axis", "outer_values",
            "outer_start", "outer_stop", "outer_count",
        ],
    ),
    ("output", &["path", "json"]),
];

#[derive(Debug)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Default)]
struct Section {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

struct Reader {
    sections: BTreeMap<String, Section>,
    errors: Vec<ConfigError>,
}

pub fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    if t == "pi" {
        return Some(PI);
    }
    if let Some(d) = t.strip_prefix("pi/") {
        return d.trim().parse::<f64>().ok().map(|d| PI / d);
    }
    if let Some(m) = t.strip_suffix("*pi") {
        return m.trim().parse::<f64>().ok().map(|m| m * PI);
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

impl Reader {
    fn lex(text: &str) -> Self {
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        let mut errors = Vec::new();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|c| c.strip_suffix(']')) {
                let name = name.trim();
                if !SECTIONS.iter().any(|(s, _)| *s == name) {
                    errors.push(err(line, format!("unknown section [{name}]")));
                    current = None;
                    continue;
                }
                if sections.contains_key(name) {
                    errors.push(err(line, format!("section [{name}] appears twice")));
                }
                sections.entry(name.to_string()).or_default().line = line;
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                errors.push(err(line, format!("expected `key = value`, found {content:?}")));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(section) = current.as_deref() else {
                errors.push(err(line, format!("key `{key}` outside a known section")));
                continue;
            };
            let known = SECTIONS.iter().find(|(s, _)| *s == section).unwrap().1;
            if !known.contains(&key) {
                errors.push(err(line, format!("unknown key `{key}` in [{section}]")));
                continue;
            }
            let sec = sections.get_mut(section).unwrap();
            if let Some(prev) = sec.entries.get(key) {
                errors.push(err(
                    line,
                    format!("duplicate key `{key}` (first set on line {})", prev.line),
                ));
                continue;
            }
            sec.entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
        }
        Self { sections, errors }
    }

    fn has(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|s| s.entries.get(key))
    }

    fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        self.entry(section, key)
            .map(|e| e.line)
            .or_else(|| self.sections.get(section).map(|s| s.line))
    }

    fn push(&mut self, line: Option<usize>, message: String) {
        self.errors.push(ConfigError { line, message });
    }

    fn missing(&mut self, section: &str, key: &str) {
        let line = self.sections.get(section).map(|s| s.line);
        self.push(line, format!("missing required key `{key}` in [{section}]"));
    }

    fn number(&mut self, section: &str, key: &str, required: bool) -> Option<f64> {
        let Some(e) = self.entry(section, key) else {
            if required {
                self.missing(section, key);
            }
            return None;
        };
        let (value, line) = (e.value.clone(), e.line);
        match parse_number(&value) {
            Some(v) => Some(v),
            None => {
                self.push(Some(line), format!("`{key}` expects a number, found {value:?}"));
                None
            }
        }
    }

    fn integer(&mut self, section: &str, key: &str, required: bool) -> Option<usize> {
        let Some(e) = self.entry(section, key) else {
            if required {
                self.missing(section, key);
            }
            return None;
        };
        let (value, line) = (e.value.clone(), e.line);
        match value.parse::<usize>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.push(
                    Some(line),
                    format!("`{key}` expects a non-negative integer, found {value:?}"),
                );
                None
            }
        }
    }

    fn list(&mut self, section: &str, key: &str) -> Option<Vec<f64>> {
        let e = self.entry(section, key)?;
        let (value, line) = (e.value.clone(), e.line);
        let mut out = Vec::new();
        for item in value.split(',') {
            match parse_number(item) {
                Some(v) => out.push(v),
                None => {
                    self.push(
                        Some(line),
                        format!("`{key}` expects comma-separated numbers, found {:?}", item.trim()),
                    );
                    return None;
                }
            }
        }
        Some(out)
    }

    fn word(&self, section: &str, key: &str) -> Option<(String, usize)> {
        self.entry(section, key).map(|e| (e.value.clone(), e.line))
    }

    fn choice<T>(
        &mut self,
        section: &str,
        key: &str,
        default: T,
        options: &str,
        parse: impl Fn(&str) -> Option<T>,
    ) -> Option<T> {
        match self.word(section, key) {
            None => Some(default),
            Some((v, line)) => match parse(&v) {
                Some(t) => Some(t),
                None => {
                    self.push(Some(line), format!("`{key}` must be one of {options}, found {v:?}"));
                    None
                }
            },
        }
    }
}

fn err(line: usize, message: String) -> ConfigError {
    ConfigError {
        line: Some(line),
        message,
    }
}

fn parse_run(r: &mut Reader) -> Option<RunConfig> {
    for required in ["system", "bath"] {
        if !r.has(required) {
            r.push(None, format!("missing section [{required}]"));
        }
    }

    // [system]
    let n_qubits = r.integer("system", "n_qubits", true);
    let omegas = match r.list("system", "omegas") {
        Some(v) => Some(v),
        None => {
            if r.entry("system", "omegas").is_none() && r.has("system") {
                r.missing("system", "omegas");
            }
            None
        }
    };
    let channel = r.choice("system", "channel", Channel::SigmaX, "sigma_x, sigma_z, sigma_minus", Channel::from_name);
    let regime = r.choice("system", "regime", Regime::NonMarkovian, "nonmarkovian, markovian", Regime::from_name);
    let system = match (n_qubits, omegas, channel) {
        (Some(n), Some(w), Some(c)) => match SystemSpec::new(n, w, c) {
            Ok(s) if n > ssqc_core::qubits::DEFAULT_MAX_QUBITS => {
                let line = r.line_of("system", "n_qubits");
                r.push(
                    line,
                    format!("n_qubits {n} exceeds the maximum of {}", ssqc_core::qubits::DEFAULT_MAX_QUBITS),
                );
                drop(s);
                None
            }
            Ok(s) => Some(s),
            Err(e) => {
                let line = r.line_of("system", "omegas");
                r.push(line, e.to_string());
                None
            }
        },
        _ => None,
    };
    let initial_state = match (r.word("system", "initial_state"), &system) {
        (None, Some(s)) => Some(InitialState::Basis("g".repeat(s.n_qubits()))),
        (None, None) => None,
        (Some((v, _)), _) if v == "mixed" => Some(InitialState::Mixed),
        (Some((v, line)), sys) => {
            let state = InitialState::Basis(v.clone());
            match (state.build(v.chars().count()), sys) {
                (Err(e), _) => {
                    r.push(Some(line), e.to_string());
                    None
                }
                (Ok(_), Some(s)) if v.chars().count() != s.n_qubits() => {
                    r.push(
                        Some(line),
                        format!("initial_state {v:?} has {} qubits, system has {}", v.chars().count(), s.n_qubits()),
                    );
                    None
                }
                (Ok(_), _) => Some(state),
            }
        }
    };

    // [bath]
    let coupling = r.number("bath", "coupling", true);
    let bandwidth = r.number("bath", "bandwidth", true);
    let temperature = r.number("bath", "temperature", true);
    let omega0 = r.number("bath", "omega0", true);
    let checks: [(&str, Option<f64>, fn(f64) -> bool, &str); 3] = [
        ("coupling", coupling, |v| v < 0.0, "coupling Gamma must be >= 0"),
        ("bandwidth", bandwidth, |v| v <= 0.0, "bandwidth gamma must be positive"),
        ("temperature", temperature, |v| v < 0.0, "temperature T must be >= 0"),
    ];
    let mut bath_ok = true;
    for (key, value, bad, msg) in checks {
        if let Some(v) = value.filter(|v| bad(*v)) {
            let line = r.line_of("bath", key);
            r.push(line, format!("{msg}, got {v}"));
            bath_ok = false;
        }
    }
    let bath = match (coupling, bandwidth, temperature, omega0) {
        (Some(g), Some(b), Some(t), Some(w)) if bath_ok => BathParams::new(g, b, t, w).ok(),
        _ => None,
    };

    // [squeeze]
    let squeeze = if r.has("squeeze") {
        let sq_r = r.number("squeeze", "r", true);
        let theta = r.number("squeeze", "theta", true);
        match (sq_r, theta) {
            (Some(a), Some(b)) => match SqueezeParams::new(a, b) {
                Ok(q) => Some(Some(q)),
                Err(e) => {
                    let line = r.line_of("squeeze", if a < 0.0 { "r" } else { "theta" });
                    r.push(line, e.to_string());
                    None
                }
            },
            _ => None,
        }
    } else {
        Some(None)
    };
    if let (Some(Some(_)), Some(Regime::Markovian)) = (&squeeze, regime) {
        let line = r.sections.get("squeeze").map(|s| s.line);
        r.push(
            line,
            "[squeeze] is only valid with regime = nonmarkovian; the Lindblad limit has no squeezed form".into(),
        );
    }

    // [integrator]
    let defaults = IntegratorConfig::default();
    let dt = r.number("integrator", "dt", false).unwrap_or(defaults.dt);
    let t_max = r.number("integrator", "t_max", false).unwrap_or(defaults.t_max);
    let sample_every = r.integer("integrator", "sample_every", false).unwrap_or(defaults.sample_every);
    let scheme = r.choice("integrator", "scheme", Scheme::Rk4, "rk4", |s| (s == "rk4").then_some(Scheme::Rk4));
    let stability = r.choice("integrator", "stability", StabilityPolicy::Reject, "reject, warn", |s| match s {
        "reject" => Some(StabilityPolicy::Reject),
        "warn" => Some(StabilityPolicy::Warn),
        _ => None,
    });
    let integrator = IntegratorConfig {
        dt,
        t_max,
        sample_every,
        scheme: scheme.unwrap_or_default(),
        stability: stability.unwrap_or_default(),
    };
    if let Err(e) = integrator.validate() {
        let key = if !(dt > 0.0) {
            "dt"
        } else if sample_every == 0 {
            "sample_every"
        } else {
            "t_max"
        };
        let line = r.line_of("integrator", key);
        r.push(line, e.to_string());
    }
    let steady = SteadyConfig {
        tol: r.number("integrator", "steady_tol", false).unwrap_or(DEFAULT_TOL),
        window: r.number("integrator", "steady_window", false).unwrap_or(DEFAULT_WINDOW),
    };
    if steady.tol < 0.0 {
        let line = r.line_of("integrator", "steady_tol");
        r.push(line, format!("steady_tol must be >= 0, got {}", steady.tol));
    }
    if !(steady.window > 0.0) {
        let line = r.line_of("integrator", "steady_window");
        r.push(line, format!("steady_window must be positive, got {}", steady.window));
    } else if t_max < 2.0 * steady.window {
        let line = r.line_of("integrator", "t_max");
        r.push(
            line,
            format!("t_max {t_max} must span at least twice the steady-state window {}", steady.window),
        );
    }

    // [output]
    let path = r.word("output", "path").map(|(p, _)| PathBuf::from(p));
    let json = r
        .choice("output", "json", false, "true, false", |s| match s {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        })
        .unwrap_or(false);

    Some(RunConfig {
        system: system?,
        initial_state: initial_state?,
        regime: regime?,
        bath: bath?,
        squeeze: squeeze?,
        integrator,
        steady,
        output: OutputSpec { path, json },
    })
}

fn parse_axis(r: &mut Reader, prefix: &str, required: bool) -> Option<AxisSpec> {
    let axis_key = format!("{prefix}axis");
    let axis = match r.word("sweep", &axis_key) {
        None => {
            if required {
                r.missing("sweep", &axis_key);
            }
            return None;
        }
        Some((name, line)) => match SweepAxis::from_name(&name) {
            Some(a) => Some(a),
            None => {
                r.push(Some(line), format!("`{axis_key}` must be one of Gamma, T, gamma, r, theta, found {name:?}"));
                None
            }
        },
    };
    let values_key = format!("{prefix}values");
    let (start_key, stop_key, count_key) = (format!("{prefix}start"), format!("{prefix}stop"), format!("{prefix}count"));
    let has_grid = [&start_key, &stop_key, &count_key].iter().any(|k| r.entry("sweep", k).is_some());
    let values = if r.entry("sweep", &values_key).is_some() {
        if has_grid {
            let line = r.line_of("sweep", &values_key);
            r.push(line, format!("give either `{values_key}` or `{start_key}/{stop_key}/{count_key}`, not both"));
        }
        r.list("sweep", &values_key).map(SweepValues::List)
    } else if has_grid {
        let start = r.number("sweep", &start_key, true);
        let stop = r.number("sweep", &stop_key, true);
        let count = r.integer("sweep", &count_key, true);
        match (start, stop, count) {
            (Some(start), Some(stop), Some(count)) => Some(SweepValues::Linear { start, stop, count }),
            _ => None,
        }
    } else {
        let line = r.line_of("sweep", &axis_key);
        r.push(line, format!("`{axis_key}` needs `{values_key}` or `{start_key}/{stop_key}/{count_key}`"));
        None
    };
    let (axis, values) = (axis?, values?);

    let line = r
        .entry("sweep", &values_key)
        .or_else(|| r.entry("sweep", &start_key))
        .map(|e| e.line);
    let pts = values.values();
    if pts.is_empty() {
        r.push(line, format!("{} axis has no values", axis.name()));
    }
    if pts.windows(2).any(|w| !(w[1] > w[0])) {
        r.push(line, format!("{} axis values must be strictly increasing", axis.name()));
    }
    for &v in &pts {
        let bad = match axis {
            SweepAxis::Coupling => v < 0.0,
            SweepAxis::Temperature => v < 0.0,
            SweepAxis::Bandwidth => v <= 0.0,
            SweepAxis::SqueezeStrength => v < 0.0,
            SweepAxis::SqueezeAngle => !(0.0..std::f64::consts::TAU).contains(&v),
        };
        if bad {
            let domain = match axis {
                SweepAxis::Bandwidth => "bandwidth gamma must be positive",
                SweepAxis::SqueezeAngle => "theta must lie in [0, 2pi)",
                _ => "value must be >= 0",
            };
            r.push(line, format!("{} axis value {v} out of range: {domain}", axis.name()));
            break;
        }
    }
    Some(AxisSpec { axis, values })
}

fn parse_sweep(r: &mut Reader, base: Option<RunConfig>) -> Option<SweepSpec> {
    let inner = parse_axis(r, "", true);
    let outer = if r.entry("sweep", "outer_axis").is_some() {
        Some(parse_axis(r, "outer_", true)?)
    } else {
        for k in ["outer_values", "outer_start", "outer_stop", "outer_count"] {
            if r.entry("sweep", k).is_some() {
                let line = r.line_of("sweep", k);
                r.push(line, format!("`{k}` given without `outer_axis`"));
            }
        }
        None
    };
    let (base, inner) = (base?, inner?);
    if let Some(o) = &outer {
        if o.axis == inner.axis {
            let line = r.line_of("sweep", "outer_axis");
            r.push(line, "outer_axis must differ from axis".into());
        }
    }
    for a in std::iter::once(&inner).chain(outer.as_ref()) {
        if a.axis.needs_squeeze() && base.squeeze.is_none() {
            let line = r.line_of("sweep", if std::ptr::eq(a, &inner) { "axis" } else { "outer_axis" });
            r.push(line, format!("axis {} needs a [squeeze] section", a.axis.name()));
            return None;
        }
    }
    let spec = SweepSpec { base, inner, outer };
    if r.errors.is_empty() {
        // Every point must pass the same checks as a single run.
        match spec.points() {
            Ok(points) => {
                let mut seen = Vec::new();
                for (_, _, cfg) in &points {
                    if cfg.integrator.stability == StabilityPolicy::Reject {
                        for v in cfg.integrator.stability_violations(&cfg.system, &cfg.bath, cfg.regime) {
                            if !seen.contains(&v) {
                                seen.push(v);
                            }
                        }
                    }
                }
                if !seen.is_empty() {
                    let line = r.line_of("integrator", "dt");
                    r.push(line, format!("stability guard fails on the sweep: {}", seen.join("; ")));
                }
            }
            Err(e) => r.push(r_line_sweep(r), e.to_string()),
        }
    }
    Some(spec)
}

fn r_line_sweep(r: &Reader) -> Option<usize> {
    r.sections.get("sweep").map(|s| s.line)
}

/// Parse and validate a configuration. A `[sweep]` section makes it a sweep.
pub fn parse_config(text: &str) -> Result<ConfigDoc, ConfigErrors> {
    let mut r = Reader::lex(text);
    let run = parse_run(&mut r);
    let doc = if r.has("sweep") {
        parse_sweep(&mut r, run).map(ConfigDoc::Sweep)
    } else {
        if let Some(cfg) = &run {
            if cfg.integrator.stability == StabilityPolicy::Reject {
                let v = cfg.integrator.stability_violations(&cfg.system, &cfg.bath, cfg.regime);
                if !v.is_empty() {
                    let line = r.line_of("integrator", "dt");
                    r.push(line, format!("stability guard: {}", v.join("; ")));
                }
            }
        }
        run.map(ConfigDoc::Run)
    };
    match doc {
        Some(doc) if r.errors.is_empty() => Ok(doc),
        _ => {
            if r.errors.is_empty() {
                r.push(None, "invalid configuration".into());
            }
            r.errors.sort_by_key(|e| e.line.unwrap_or(0));
            Err(ConfigErrors(r.errors))
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(", ")
}

fn emit_sections(c: &RunConfig, out: &mut String) {
    use std::fmt::Write;
    let _ = writeln!(out, "[system]");
    let _ = writeln!(out, "n_qubits = {}", c.system.n_qubits());
    let _ = writeln!(out, "omegas = {}", join(c.system.omegas()));
    let _ = writeln!(out, "channel = {}", c.system.channel().name());
    let _ = writeln!(out, "initial_state = {}", c.initial_state.label());
    let _ = writeln!(out, "regime = {}", c.regime.name());
    let _ = writeln!(out, "\n[bath]");
    let _ = writeln!(out, "coupling = {}", num(c.bath.coupling()));
    let _ = writeln!(out, "bandwidth = {}", num(c.bath.bandwidth()));
    let _ = writeln!(out, "temperature = {}", num(c.bath.temperature()));
    let _ = writeln!(out, "omega0 = {}", num(c.bath.omega0()));
    if let Some(q) = &c.squeeze {
        let _ = writeln!(out, "\n[squeeze]");
        let _ = writeln!(out, "r = {}", num(q.r()));
        let _ = writeln!(out, "theta = {}", num(q.theta()));
    }
    let i = &c.integrator;
    let _ = writeln!(out, "\n[integrator]");
    let _ = writeln!(out, "dt = {}", num(i.dt));
    let _ = writeln!(out, "t_max = {}", num(i.t_max));
    let _ = writeln!(out, "sample_every = {}", i.sample_every);
    let _ = writeln!(out, "scheme = rk4");
    let _ = writeln!(
        out,
        "stability = {}",
        match i.stability {
            StabilityPolicy::Reject => "reject",
            StabilityPolicy::Warn => "warn",
        }
    );
    let _ = writeln!(out, "steady_tol = {}", num(c.steady.tol));
    let _ = writeln!(out, "steady_window = {}", num(c.steady.window));
}

fn emit_output(c: &RunConfig, out: &mut String) {
    use std::fmt::Write;
    if c.output.path.is_none() && !c.output.json {
        return;
    }
    let _ = writeln!(out, "\n[output]");
    if let Some(p) = &c.output.path {
        let _ = writeln!(out, "path = {}", p.display());
    }
    let _ = writeln!(out, "json = {}", c.output.json);
}

fn emit_axis(a: &AxisSpec, prefix: &str, out: &mut String) {
    use std::fmt::Write;
    let _ = writeln!(out, "{prefix}axis = {}", a.axis.name());
    match &a.values {
        SweepValues::List(v) => {
            let _ = writeln!(out, "{prefix}values = {}", join(v));
        }
        SweepValues::Linear { start, stop, count } => {
            let _ = writeln!(out, "{prefix}start = {}", num(*start));
            let _ = writeln!(out, "{prefix}stop = {}", num(*stop));
            let _ = writeln!(out, "{prefix}count = {count}");
        }
    }
}

/// Canonical text for a single run; `parse_config(emit_run(c))` gives `c`.
pub fn emit_run(c: &RunConfig) -> String {
    let mut out = String::new();
    emit_sections(c, &mut out);
    emit_output(c, &mut out);
    out
}

pub fn emit_sweep(s: &SweepSpec) -> String {
    let mut out = String::new();
    emit_sections(&s.base, &mut out);
    out.push_str("\n[sweep]\n");
    emit_axis(&s.inner, "", &mut out);
    if let Some(o) = &s.outer {
        emit_axis(o, "outer_", &mut out);
    }
    emit_output(&s.base, &mut out);
    out
}
