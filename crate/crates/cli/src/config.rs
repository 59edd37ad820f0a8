use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use spincool_core::analysis::thermal_occupation;
use spincool_core::correlation::Scenario;
use spincool_core::jump_algebra::{
    builtin, AntisymmetricBilocalCoefficients, BuiltinJump, JumpKind, JumpOperatorSpec, LocalJumpCoefficients,
    SymmetricBilocalCoefficients, DEFAULT_CLOSURE_TOL,
};
use spincool_core::lattice::{BoundaryCondition, GeometryKind, PairMode};
use toml::{Table, Value};

/// Prefix of environment variables that override config keys, e.g. `SPINCOOL__LATTICE__EXTENT=64`.
pub const ENV_PREFIX: &str = "SPINCOOL__";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Evolve,
    Gap,
    GapScan,
    Spectrum,
    PhaseDiagram,
    ClosureCheck,
    OracleCompare,
    TwoSpin,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Evolve => "evolve",
            Self::Gap => "gap",
            Self::GapScan => "gap-scan",
            Self::Spectrum => "spectrum",
            Self::PhaseDiagram => "phase-diagram",
            Self::ClosureCheck => "closure-check",
            Self::OracleCompare => "oracle-compare",
            Self::TwoSpin => "two-spin",
        }
    }

    fn needs_lattice(self) -> bool {
        !matches!(self, Self::ClosureCheck | Self::TwoSpin)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    pub geometry: String,
    pub extent: Option<usize>,
    /// Linear sizes swept by `gap-scan`.
    pub sizes: Vec<usize>,
    pub bc: String,
    pub pair_mode: String,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            geometry: "chain".into(),
            extent: None,
            sizes: Vec::new(),
            bc: "periodic".into(),
            pair_mode: "displacement".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Pure,
    Field,
    Thermal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_over_gamma: Option<f64>,
    #[serde(default, rename = "T_over_h", skip_serializing_if = "Option::is_none")]
    pub t_over_h: Option<f64>,
    #[serde(default, rename = "n_T", skip_serializing_if = "Option::is_none")]
    pub n_t: Option<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self { kind: ScenarioKind::Pure, eta: None, kappa_over_gamma: None, t_over_h: None, n_t: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Geometric,
    Linear,
}

/// Output times: `values` when given, otherwise `count` points from `first` to `last` preceded by `τ = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeGrid {
    pub first: f64,
    pub last: f64,
    pub count: usize,
    pub spacing: Spacing,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { first: 0.01, last: 100.0, count: 41, spacing: Spacing::Geometric, values: Vec::new() }
    }
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        if !self.values.is_empty() {
            return self.values.clone();
        }
        match self.spacing {
            Spacing::Geometric => spincool_core::correlation::geometric_times(self.first, self.last, self.count),
            Spacing::Linear => {
                let mut out = vec![0.0];
                let step = if self.count > 1 { (self.last - self.first) / (self.count - 1) as f64 } else { 0.0 };
                out.extend((0..self.count).map(|k| self.first + step * k as f64));
                out
            }
        }
    }

    fn validate(&self, errors: &mut Vec<String>) {
        if !self.values.is_empty() {
            if self.values.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                errors.push("numerics.times.values: all times must be finite and >= 0".into());
            }
            if self.values.windows(2).any(|w| w[1] <= w[0]) {
                errors.push("numerics.times.values: times must increase strictly".into());
            }
            return;
        }
        if self.count == 0 {
            errors.push("numerics.times.count: must be at least 1".into());
        }
        if !(self.first.is_finite() && self.first > 0.0) {
            errors.push(format!("numerics.times.first: must be finite and > 0, got {}", self.first));
        }
        if !(self.last.is_finite() && self.last > self.first) {
            errors.push(format!("numerics.times.last: must be finite and > first, got {}", self.last));
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    InfiniteTemperature,
    AllDown,
    /// Seeded random density matrix; `oracle-compare` only.
    Random,
}

/// `count` log-spaced values from `lo` to `hi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogAxis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl LogAxis {
    fn validate(&self, key: &str, errors: &mut Vec<String>) {
        if !(self.lo.is_finite() && self.lo > 0.0) {
            errors.push(format!("{key}.lo: must be finite and > 0, got {}", self.lo));
        }
        if !(self.hi.is_finite() && self.hi >= self.lo) {
            errors.push(format!("{key}.hi: must be finite and >= lo, got {}", self.hi));
        }
        if self.count == 0 {
            errors.push(format!("{key}.count: must be at least 1"));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub times: TimeGrid,
    /// Number of leading eigenvalues; 0 requests the full dense spectrum.
    pub k: usize,
    pub initial: InitialState,
    pub closure_tol: f64,
    /// Seeded random coefficient sets added to `closure-check`.
    pub random_samples: usize,
    pub seed: u64,
    pub gamma_over_kappa: LogAxis,
    #[serde(rename = "T_over_h")]
    pub t_over_h: LogAxis,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            times: TimeGrid::default(),
            k: 8,
            initial: InitialState::InfiniteTemperature,
            closure_tol: DEFAULT_CLOSURE_TOL,
            random_samples: 0,
            seed: 0,
            gamma_over_kappa: LogAxis { lo: 1.0, hi: 1e7, count: 12 },
            t_over_h: LogAxis { lo: 1e-2, hi: 1e10, count: 12 },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpKindName {
    Local,
    Symmetric,
    Antisymmetric,
}

/// Jump operator for `closure-check`: a built-in name, or `kind` with explicit coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<JumpKindName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Table>,
    #[serde(default = "unit_rate")]
    pub rate: f64,
}

fn unit_rate() -> f64 {
    1.0
}

impl Default for JumpConfig {
    fn default() -> Self {
        Self { builtin: Some("q".into()), kind: None, coefficients: None, rate: 1.0 }
    }
}

impl JumpConfig {
    pub fn spec(&self) -> Result<JumpOperatorSpec, String> {
        let kind = match (&self.builtin, self.kind) {
            (Some(name), None) => {
                if self.coefficients.is_some() {
                    return Err("jump.coefficients: not allowed together with jump.builtin".into());
                }
                builtin(BuiltinJump::from_str(name).map_err(|e| format!("jump.builtin: {e}"))?).kind
            }
            (None, Some(kind)) => {
                let table = Value::Table(self.coefficients.clone().unwrap_or_default());
                let parsed = match kind {
                    JumpKindName::Local => table.try_into::<LocalJumpCoefficients>().map(JumpKind::Local),
                    JumpKindName::Symmetric => {
                        table.try_into::<SymmetricBilocalCoefficients>().map(JumpKind::Symmetric)
                    }
                    JumpKindName::Antisymmetric => {
                        table.try_into::<AntisymmetricBilocalCoefficients>().map(JumpKind::Antisymmetric)
                    }
                };
                parsed.map_err(|e| format!("jump.coefficients: {}", e.message()))?
            }
            (Some(_), Some(_)) => return Err("jump: give either `builtin` or `kind`, not both".into()),
            (None, None) => return Err("jump: one of `builtin` or `kind` is required".into()),
        };
        JumpOperatorSpec::new(kind, self.rate).map_err(|e| format!("jump.rate: {e}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: PathBuf::from("out"), threads: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub jump: JumpConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Flag values applied after the file, environment and `--set` layers.
#[derive(Debug, Default)]
pub struct Overrides {
    pub sets: Vec<String>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

/// Reasons a configuration was rejected, every one of them.
#[derive(Debug)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("; "))
    }
}

/// Parses an override value as a TOML literal, falling back to a bare string.
fn parse_value(raw: &str) -> Value {
    let wrapped = format!("v = {raw}");
    match wrapped.parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.into())),
        Err(_) => Value::String(raw.into()),
    }
}

fn merge(base: &mut Table, top: Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// Fills unset keys from the defaults so nested tables can be overridden one key at a time.
/// The jump section is left alone because its default `builtin` excludes an explicit `kind`.
fn merged_over_defaults(user: Table) -> Table {
    let defaults = RunConfig {
        command: Command::Evolve,
        lattice: LatticeConfig::default(),
        scenario: ScenarioConfig::default(),
        numerics: NumericsConfig::default(),
        jump: JumpConfig::default(),
        output: OutputConfig::default(),
    };
    let Ok(Value::Table(mut base)) = Value::try_from(&defaults) else { unreachable!("defaults serialize to a table") };
    base.remove("jump");
    base.remove("command");
    merge(&mut base, user);
    base
}

fn set_path(root: &mut Table, path: &[&str], value: Value) -> Result<(), String> {
    let (last, parents) = path.split_last().ok_or("empty key")?;
    let mut table = root;
    for key in parents {
        let entry = table.entry(key.to_string()).or_insert_with(|| Value::Table(Table::new()));
        table = entry.as_table_mut().ok_or_else(|| format!("`{key}` is not a table"))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

fn apply_assignment(root: &mut Table, source: &str, key: &str, raw: &str) -> Result<(), String> {
    let path: Vec<&str> = key.split('.').map(str::trim).collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(format!("{source}: malformed key `{key}`"));
    }
    set_path(root, &path, parse_value(raw.trim())).map_err(|e| format!("{source}: {e}"))
}

/// Layers the config: defaults < file < `SPINCOOL__*` environment < `--set` < dedicated flags.
pub fn resolve(
    command: Command,
    file: Option<&Path>,
    env: impl IntoIterator<Item = (String, String)>,
    overrides: &Overrides,
) -> Result<RunConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let mut root = match file {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => text.parse::<Table>().map_err(|e| ConfigErrors(vec![format!("{}: {e}", path.display())]))?,
            Err(e) => return Err(ConfigErrors(vec![format!("{}: {e}", path.display())])),
        },
        None => Table::new(),
    };
    root = merged_over_defaults(root);
    let mut env: Vec<(String, String)> = env.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    env.sort();
    for (name, raw) in env {
        let key = name[ENV_PREFIX.len()..].to_ascii_lowercase().replace("__", ".");
        if let Err(e) = apply_assignment(&mut root, &name, &key, &raw) {
            errors.push(e);
        }
    }
    for set in &overrides.sets {
        match set.split_once('=') {
            Some((key, raw)) => {
                if let Err(e) = apply_assignment(&mut root, "--set", key, raw) {
                    errors.push(e);
                }
            }
            None => errors.push(format!("--set: expected key=value, got `{set}`")),
        }
    }
    root.insert("command".into(), Value::String(command.name().into()));
    let mut assign = |path: &[&str], v: Value| {
        set_path(&mut root, path, v).expect("config section is a table");
    };
    if let Some(out) = &overrides.out {
        assign(&["output", "directory"], Value::String(out.display().to_string()));
    }
    if let Some(threads) = overrides.threads {
        assign(&["output", "threads"], Value::Integer(threads as i64));
    }
    if let Some(seed) = overrides.seed {
        match i64::try_from(seed) {
            Ok(v) => assign(&["numerics", "seed"], Value::Integer(v)),
            Err(_) => errors.push(format!("--seed: must be at most {}, got {seed}", i64::MAX)),
        }
    }
    if !errors.is_empty() {
        return Err(ConfigErrors(errors));
    }
    let config: RunConfig = Value::Table(root)
        .try_into()
        .map_err(|e: toml::de::Error| ConfigErrors(vec![e.message().trim().to_string()]))?;
    config.validate().map_err(ConfigErrors)?;
    Ok(config)
}

fn nonnegative(key: &str, v: Option<f64>, errors: &mut Vec<String>) {
    if let Some(v) = v {
        if !(v.is_finite() && v >= 0.0) {
            errors.push(format!("{key}: must be finite and >= 0, got {v}"));
        }
    }
}

impl RunConfig {
    pub fn geometry(&self) -> Option<GeometryKind> {
        self.lattice.geometry.parse().ok()
    }

    pub fn bc(&self) -> Option<BoundaryCondition> {
        self.lattice.bc.parse().ok()
    }

    pub fn pair_mode(&self) -> Option<PairMode> {
        self.lattice.pair_mode.parse().ok()
    }

    /// Physical scenario with the temperature converted to `n_T`.
    pub fn scenario(&self) -> Scenario {
        let s = &self.scenario;
        match s.kind {
            ScenarioKind::Pure => Scenario::Pure,
            ScenarioKind::Field => Scenario::Field { eta: s.eta.unwrap_or(0.0) },
            ScenarioKind::Thermal => Scenario::Thermal {
                kappa_over_gamma: s.kappa_over_gamma.unwrap_or(0.0),
                n_t: s.n_t.unwrap_or_else(|| s.t_over_h.map_or(0.0, thermal_occupation)),
            },
        }
    }

    /// Collects every violation instead of stopping at the first.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errors = Vec::new();
        self.validate_lattice(&mut errors);
        self.validate_scenario(&mut errors);
        let num = &self.numerics;
        match self.command {
            Command::Evolve | Command::OracleCompare | Command::TwoSpin => num.times.validate(&mut errors),
            Command::Gap if num.k == 0 => errors.push("numerics.k: must be at least 1 for gap".into()),
            Command::PhaseDiagram => {
                num.gamma_over_kappa.validate("numerics.gamma_over_kappa", &mut errors);
                num.t_over_h.validate("numerics.T_over_h", &mut errors);
            }
            Command::ClosureCheck => {
                if !(num.closure_tol.is_finite() && num.closure_tol > 0.0) {
                    errors.push(format!("numerics.closure_tol: must be finite and > 0, got {}", num.closure_tol));
                }
                match self.jump.spec() {
                    Ok(spec) if !spec.is_bilocal() => {
                        errors.push("jump: closure conditions apply to bilocal operators only".into())
                    }
                    Ok(_) => {}
                    Err(e) => errors.push(e),
                }
            }
            _ => {}
        }
        if num.initial == InitialState::Random && self.command != Command::OracleCompare {
            errors.push("numerics.initial: `random` is only available for oracle-compare".into());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    fn validate_lattice(&self, errors: &mut Vec<String>) {
        if !self.command.needs_lattice() {
            return;
        }
        let l = &self.lattice;
        if self.geometry().is_none() {
            errors.push(format!(
                "lattice.geometry: unknown geometry `{}` (chain, square, triangular, honeycomb, cubic)",
                l.geometry
            ));
        }
        if self.bc().is_none() {
            errors.push(format!("lattice.bc: unknown boundary condition `{}` (periodic, open)", l.bc));
        }
        if self.pair_mode().is_none() {
            errors.push(format!(
                "lattice.pair_mode: unknown pair mode `{}` (full_pairs, displacement, point_group)",
                l.pair_mode
            ));
        }
        if self.command == Command::GapScan {
            if l.sizes.len() < spincool_core::analysis::MIN_FIT_POINTS {
                errors.push(format!(
                    "lattice.sizes: gap-scan needs at least {} sizes, got {}",
                    spincool_core::analysis::MIN_FIT_POINTS,
                    l.sizes.len()
                ));
            }
            if l.sizes.windows(2).any(|w| w[1] <= w[0]) {
                errors.push("lattice.sizes: sizes must increase strictly".into());
            }
        } else {
            match l.extent {
                None => errors.push(format!("lattice.extent: required for {}", self.command)),
                Some(0) => errors.push("lattice.extent: must be at least 1".into()),
                Some(_) => {}
            }
        }
    }

    fn validate_scenario(&self, errors: &mut Vec<String>) {
        let s = &self.scenario;
        nonnegative("scenario.eta", s.eta, errors);
        nonnegative("scenario.kappa_over_gamma", s.kappa_over_gamma, errors);
        nonnegative("scenario.T_over_h", s.t_over_h, errors);
        nonnegative("scenario.n_T", s.n_t, errors);
        let stray = |name: &str, present: bool, errors: &mut Vec<String>| {
            if present {
                errors.push(format!("scenario.{name}: not a parameter of the {:?} scenario", s.kind));
            }
        };
        match s.kind {
            ScenarioKind::Pure => {
                stray("eta", s.eta.is_some(), errors);
                stray("kappa_over_gamma", s.kappa_over_gamma.is_some(), errors);
                stray("T_over_h", s.t_over_h.is_some(), errors);
                stray("n_T", s.n_t.is_some(), errors);
            }
            ScenarioKind::Field => {
                if s.eta.is_none() {
                    errors.push("scenario.eta: required for the field scenario".into());
                }
                stray("kappa_over_gamma", s.kappa_over_gamma.is_some(), errors);
                stray("T_over_h", s.t_over_h.is_some(), errors);
                stray("n_T", s.n_t.is_some(), errors);
            }
            ScenarioKind::Thermal => {
                stray("eta", s.eta.is_some(), errors);
                if s.kappa_over_gamma.is_none() {
                    errors.push("scenario.kappa_over_gamma: required for the thermal scenario".into());
                }
                match (s.t_over_h.is_some(), s.n_t.is_some()) {
                    (true, true) => errors.push("scenario: give either T_over_h or n_T, not both".into()),
                    (false, false) => errors.push("scenario: thermal scenario needs T_over_h or n_T".into()),
                    _ => {}
                }
            }
        }
        match self.command {
            Command::TwoSpin if s.kind != ScenarioKind::Field => {
                errors.push("scenario.kind: two-spin needs the field scenario".into())
            }
            Command::PhaseDiagram if s.kind != ScenarioKind::Pure => {
                errors.push("scenario: phase-diagram sweeps the thermal parameters itself; omit the scenario".into())
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve_text(
        command: Command,
        text: &str,
        env: Vec<(&str, &str)>,
        o: &Overrides,
    ) -> Result<RunConfig, ConfigErrors> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, text).unwrap();
        resolve(command, Some(&path), env.into_iter().map(|(a, b)| (a.to_string(), b.to_string())), o)
    }

    #[test]
    fn round_trips_through_toml() {
        let text = r#"
            [lattice]
            geometry = "square"
            extent = 8
            [scenario]
            kind = "thermal"
            kappa_over_gamma = 0.1
            T_over_h = 2.5
            [numerics.times]
            first = 0.1
            last = 10.0
            count = 5
        "#;
        let cfg = resolve_text(Command::Evolve, text, vec![], &Overrides::default()).unwrap();
        let back: RunConfig = toml::from_str(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let Scenario::Thermal { n_t, .. } = cfg.scenario() else { panic!() };
        assert_eq!(n_t, thermal_occupation(2.5));
    }

    #[test]
    fn precedence_is_flags_then_set_then_env_then_file() {
        let text = "[lattice]\nextent = 4\n[output]\ndirectory = \"file\"\n";
        let env = vec![("SPINCOOL__LATTICE__EXTENT", "6"), ("SPINCOOL__OUTPUT__DIRECTORY", "env"), ("OTHER", "x")];
        let cfg = resolve_text(Command::Gap, text, env.clone(), &Overrides::default()).unwrap();
        assert_eq!(cfg.lattice.extent, Some(6));
        assert_eq!(cfg.output.directory, PathBuf::from("env"));
        let o = Overrides { sets: vec!["lattice.extent=8".into()], out: Some("flag".into()), ..Default::default() };
        let cfg = resolve_text(Command::Gap, text, env, &o).unwrap();
        assert_eq!(cfg.lattice.extent, Some(8));
        assert_eq!(cfg.output.directory, PathBuf::from("flag"));
    }

    #[test]
    fn reports_every_violation() {
        let text = r#"
            [lattice]
            geometry = "hexagon"
            bc = "twisted"
            [scenario]
            kind = "thermal"
            eta = -1.0
            [numerics.times]
            count = 0
        "#;
        let err = resolve_text(Command::Evolve, text, vec![], &Overrides::default()).unwrap_err();
        let all = err.0.join("\n");
        for needle in [
            "lattice.geometry",
            "lattice.bc",
            "lattice.extent",
            "scenario.eta",
            "kappa_over_gamma",
            "T_over_h or n_T",
            "count",
        ] {
            assert!(all.contains(needle), "missing {needle} in\n{all}");
        }
        assert!(err.0.len() >= 7);
    }

    #[test]
    fn explicit_jump_coefficients_parse() {
        let jump = JumpConfig {
            builtin: None,
            kind: Some(JumpKindName::Antisymmetric),
            coefficients: Some(
                toml::from_str("l = [[0.0, 0.0], [0.0, 0.0], [-0.5, 0.0]]\nk = [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]")
                    .unwrap(),
            ),
            rate: 2.0,
        };
        let spec = jump.spec().unwrap();
        assert_eq!(spec.rate, 2.0);
        assert!(matches!(spec.kind, JumpKind::Antisymmetric(_)));
        let bad = JumpConfig { builtin: Some("q".into()), kind: Some(JumpKindName::Local), ..jump };
        assert!(bad.spec().is_err());
    }
}
