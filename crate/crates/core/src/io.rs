// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Config files, output directories and run manifests.
//!
//! A config file is flat `key = value` text with dotted sections, which is
//! also valid TOML:
//!
//! ```text
//! medium = "tls"            # tls | tlos | oms
//! topology = "standard"     # standard | swapped
//! gating = "ideal"          # ideal | single-cycle
//! omega_h = 1.0             # A frequency (swapped: omega_c)
//! omega_c = 0.1             # B frequency (swapped: omega_w)
//! g = 0.005
//! kappa = 0.005             # default for every bath
//! leak = "work_transition"  # optional: work_transition | hot_transition
//! truncation.a = 10         # oscillator truncations, optional
//! truncation.b = 12
//! truncation.auto = true
//! bath.work.T = 0.75
//! bath.hot.T = 0.5
//! bath.cold.T = 0.125
//! bath.cold.kappa = 0.005   # per-bath overrides: kappa, p, cutoff,
//! bath.hot.windows = "auto" # windows ("auto" | "full" | [[lo, hi], ...]),
//!                           # filter.center, filter.strength, filter.lamb_shift
//! ```
//!
//! Study sections (`sweep.*`, `maxpower.*`, `sample.*`, `leak_curves.*`,
//! `swapped.*`) are listed in [`StudySections`]. Unknown keys are errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use thiserror::Error;

use crate::config::{
    BathRole, Filter, Gating, Interval, LambShiftMode, LeakSpec, LeakTarget, MediumKind, MediumVariant, SystemConfig,
    Topology, Windows,
};
use crate::studies::{Grid, SamplingSpec, Spacing, SweepParam, SWAPPED_G_VALUES};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("UnknownKey: {0}")]
    UnknownKey(String),
    #[error("BadValue: {key} must be {expected}")]
    BadValue { key: String, expected: &'static str },
    #[error("MissingKey: {0}")]
    MissingKey(String),
    #[error("OutputExists: {0} already holds a run; pass --force to overwrite")]
    OutputExists(PathBuf),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
}

/// Couplings of the heat-leak study.
pub const LEAK_G_VALUES: [f64; 4] = [0.04, 0.06, 0.08, 0.10];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub param: SweepParam,
    pub grid: Grid,
    pub correlations: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySections {
    /// `sweep.param`, `sweep.values` or `sweep.min/max/count/spacing`,
    /// `sweep.correlations`.
    pub sweep: Option<SweepSection>,
    /// `maxpower.lo`, `maxpower.hi`.
    pub maxpower: Option<(f64, f64)>,
    /// `sample.n`, `sample.seed`, `sample.t_cold = [lo, hi]`,
    /// `sample.t_hot_max`, `sample.t_work_max`, `sample.kappa = [lo, hi]`,
    /// `sample.g = [lo, hi]`, `sample.bins`.
    pub sample: SamplingSpec,
    /// `leak_curves.g`, `leak_curves.points`, `leak_curves.target`
    /// (work_transition | hot_transition | none).
    pub leak_g: Vec<f64>,
    pub leak_points: usize,
    pub leak_target: Option<LeakTarget>,
    /// `swapped.g`, `swapped.tolerance`.
    pub swapped_g: Vec<f64>,
    pub swapped_tolerance: f64,
}

impl Default for StudySections {
    fn default() -> Self {
        StudySections {
            sweep: None,
            maxpower: None,
            sample: SamplingSpec::default(),
            leak_g: LEAK_G_VALUES.to_vec(),
            leak_points: 200,
            leak_target: Some(LeakTarget::WorkTransition),
            swapped_g: SWAPPED_G_VALUES.to_vec(),
            swapped_tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    /// `None` when the file holds no system keys (e.g. a pure `sample.*`
    /// file).
    pub system: Option<SystemConfig>,
    pub studies: StudySections,
}

struct Keys {
    map: BTreeMap<String, toml::Value>,
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, toml::Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

fn bad(key: &str, expected: &'static str) -> IoError {
    IoError::BadValue { key: key.to_string(), expected }
}

fn as_f64(key: &str, v: &toml::Value) -> Result<f64, IoError> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(bad(key, "a number")),
    }
}

impl Keys {
    fn take(&mut self, key: &str) -> Option<(String, toml::Value)> {
        self.map.remove_entry(key)
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>, IoError> {
        self.take(key).map(|(k, v)| as_f64(&k, &v)).transpose()
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>, IoError> {
        match self.take(key) {
            None => Ok(None),
            Some((_, toml::Value::Integer(i))) if i >= 0 => Ok(Some(i as usize)),
            Some((k, _)) => Err(bad(&k, "a non-negative integer")),
        }
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>, IoError> {
        match self.take(key) {
            None => Ok(None),
            Some((_, toml::Value::Boolean(b))) => Ok(Some(b)),
            Some((k, _)) => Err(bad(&k, "true or false")),
        }
    }

    fn str(&mut self, key: &str) -> Result<Option<String>, IoError> {
        match self.take(key) {
            None => Ok(None),
            Some((_, toml::Value::String(s))) => Ok(Some(s)),
            Some((k, _)) => Err(bad(&k, "a string")),
        }
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>, IoError> {
        match self.take(key) {
            None => Ok(None),
            Some((k, toml::Value::Array(a))) => a.iter().map(|v| as_f64(&k, v)).collect::<Result<_, _>>().map(Some),
            Some((k, _)) => Err(bad(&k, "an array of numbers")),
        }
    }

    fn pair(&mut self, key: &str) -> Result<Option<(f64, f64)>, IoError> {
        match self.list(key)? {
            None => Ok(None),
            Some(v) if v.len() == 2 => Ok(Some((v[0], v[1]))),
            Some(_) => Err(bad(key, "a [lo, hi] pair")),
        }
    }

    fn has_prefix(&self, prefix: &str) -> bool {
        self.map.keys().any(|k| k.starts_with(prefix))
    }
}

fn parse_windows(key: &str, v: toml::Value) -> Result<Windows, IoError> {
    match v {
        toml::Value::String(s) if s == "auto" => Ok(Windows::Auto),
        toml::Value::String(s) if s == "full" => Ok(Windows::Full),
        toml::Value::Array(a) => a
            .iter()
            .map(|w| match w {
                toml::Value::Array(p) if p.len() == 2 => Ok(Interval::new(as_f64(key, &p[0])?, as_f64(key, &p[1])?)),
                _ => Err(bad(key, "\"auto\", \"full\" or [[lo, hi], ...]")),
            })
            .collect::<Result<_, _>>()
            .map(Windows::Explicit),
        _ => Err(bad(key, "\"auto\", \"full\" or [[lo, hi], ...]")),
    }
}

fn parse_leak_target(key: &str, s: &str) -> Result<Option<LeakTarget>, IoError> {
    match s {
        "work_transition" => Ok(Some(LeakTarget::WorkTransition)),
        "hot_transition" => Ok(Some(LeakTarget::HotTransition)),
        "none" => Ok(None),
        _ => Err(bad(key, "work_transition, hot_transition or none")),
    }
}

const SYSTEM_KEYS: [&str; 10] =
    ["topology", "gating", "omega_a", "omega_b", "omega_h", "omega_c", "omega_w", "g", "kappa", "leak"];

fn parse_medium(keys: &mut Keys) -> Result<MediumVariant, IoError> {
    match keys.str("medium")?.as_deref() {
        None | Some("tls") => Ok(MediumVariant::Tls),
        Some("tlos") => Ok(MediumVariant::Tlos),
        Some("oms") => Ok(MediumVariant::Oms),
        Some(_) => Err(bad("medium", "tls, tlos or oms")),
    }
}

/// `medium` alone does not make a system config; a pure `sample.*` file may
/// name the medium to sample.
fn parse_system(keys: &mut Keys) -> Result<Option<SystemConfig>, IoError> {
    let present = SYSTEM_KEYS.iter().any(|k| keys.map.contains_key(*k)) || keys.has_prefix("bath.") || keys.has_prefix("truncation.");
    if !present {
        return Ok(None);
    }
    let variant = parse_medium(keys)?;
    let mut medium = MediumKind::of(variant);
    if let Some(a) = keys.usize("truncation.a")? {
        medium.truncation_a = a;
    }
    if let Some(b) = keys.usize("truncation.b")? {
        medium.truncation_b = b;
    }
    if let Some(auto) = keys.bool("truncation.auto")? {
        medium.auto_truncation = auto;
    }
    let topology = match keys.str("topology")?.as_deref() {
        None | Some("standard") => Topology::Standard,
        Some("swapped") => Topology::Swapped,
        Some(_) => return Err(bad("topology", "standard or swapped")),
    };
    let gating = match keys.str("gating")?.as_deref() {
        None | Some("ideal") => Gating::Ideal,
        Some("single-cycle") => Gating::SingleCycle,
        Some(_) => return Err(bad("gating", "ideal or single-cycle")),
    };
    let (alias_a, alias_b) = match topology {
        Topology::Standard => ("omega_h", "omega_c"),
        Topology::Swapped => ("omega_c", "omega_w"),
    };
    let omega_a = match (keys.f64("omega_a")?, keys.f64(alias_a)?) {
        (Some(_), Some(_)) => return Err(bad(alias_a, "given once (omega_a is the same key)")),
        (a, b) => a.or(b).unwrap_or(1.0),
    };
    let omega_b = match (keys.f64("omega_b")?, keys.f64(alias_b)?) {
        (Some(_), Some(_)) => return Err(bad(alias_b, "given once (omega_b is the same key)")),
        (a, b) => a.or(b).ok_or_else(|| IoError::MissingKey(alias_b.into()))?,
    };
    let g = keys.f64("g")?.ok_or_else(|| IoError::MissingKey("g".into()))?;
    let kappa = keys.f64("kappa")?;
    let leak = match keys.str("leak")? {
        None => None,
        Some(s) => parse_leak_target("leak", &s)?.map(|t| LeakSpec { overlap_target: t }),
    };
    let mut c = match topology {
        Topology::Standard => SystemConfig::standard(medium, omega_b, g, [0.0; 3], 0.0),
        Topology::Swapped => SystemConfig::swapped(medium, omega_a, omega_b, g, [0.0; 3], 0.0),
    };
    c.omega_a = omega_a;
    c.gating = gating;
    c.leak = leak;
    for role in BathRole::ALL {
        let p = format!("bath.{}.", role.name());
        let spec = c.baths.get_mut(role);
        spec.temperature = keys.f64(&format!("{p}T"))?.ok_or_else(|| IoError::MissingKey(format!("{p}T")))?;
        spec.kappa = keys.f64(&format!("{p}kappa"))?.or(kappa).ok_or_else(|| IoError::MissingKey(format!("{p}kappa")))?;
        if let Some(x) = keys.f64(&format!("{p}p"))? {
            spec.ohmic_exponent = x;
        }
        spec.cutoff = keys.f64(&format!("{p}cutoff"))?;
        if let Some((k, v)) = keys.take(&format!("{p}windows")) {
            spec.windows = parse_windows(&k, v)?;
        }
        let strength = keys.f64(&format!("{p}filter.strength"))?;
        let center = keys.f64(&format!("{p}filter.center"))?;
        let lamb = match keys.str(&format!("{p}filter.lamb_shift"))?.as_deref() {
            None | Some("zero") => LambShiftMode::Zero,
            Some("numeric-pv") => LambShiftMode::NumericPv,
            Some(_) => return Err(bad(&format!("{p}filter.lamb_shift"), "zero or numeric-pv")),
        };
        spec.filter = match strength {
            Some(strength) => Some(Filter { center, strength, lamb_shift: lamb }),
            None if center.is_some() => return Err(IoError::MissingKey(format!("{p}filter.strength"))),
            None => None,
        };
    }
    Ok(Some(c))
}

fn parse_studies(keys: &mut Keys) -> Result<StudySections, IoError> {
    let mut s = StudySections::default();
    if keys.has_prefix("sweep.") {
        let name = keys.str("sweep.param")?.ok_or_else(|| IoError::MissingKey("sweep.param".into()))?;
        let param = SweepParam::parse(&name).ok_or_else(|| bad("sweep.param", "omega_c, g, p, T_work, T_hot or T_cold"))?;
        let grid = match keys.list("sweep.values")? {
            Some(v) => Grid::Explicit(v),
            None => {
                let need = |k: &str, v: Option<f64>| v.ok_or_else(|| IoError::MissingKey(k.into()));
                let min = need("sweep.min", keys.f64("sweep.min")?)?;
                let max = need("sweep.max", keys.f64("sweep.max")?)?;
                let count = keys.usize("sweep.count")?.ok_or_else(|| IoError::MissingKey("sweep.count".into()))?;
                let spacing = match keys.str("sweep.spacing")?.as_deref() {
                    None | Some("linear") => Spacing::Linear,
                    Some("log") => Spacing::Log,
                    Some(_) => return Err(bad("sweep.spacing", "linear or log")),
                };
                Grid::Range { min, max, count, spacing }
            }
        };
        let correlations = keys.bool("sweep.correlations")?.unwrap_or(false);
        s.sweep = Some(SweepSection { param, grid, correlations });
    }
    match (keys.f64("maxpower.lo")?, keys.f64("maxpower.hi")?) {
        (Some(lo), Some(hi)) => s.maxpower = Some((lo, hi)),
        (None, None) => {}
        (Some(_), None) => return Err(IoError::MissingKey("maxpower.hi".into())),
        (None, Some(_)) => return Err(IoError::MissingKey("maxpower.lo".into())),
    }
    let sp = &mut s.sample;
    if let Some(n) = keys.usize("sample.n")? {
        sp.samples = n;
    }
    if let Some(seed) = keys.usize("sample.seed")? {
        sp.seed = seed as u64;
    }
    if let Some(p) = keys.pair("sample.t_cold")? {
        sp.t_cold = p;
    }
    if let Some(x) = keys.f64("sample.t_hot_max")? {
        sp.t_hot_max = x;
    }
    if let Some(x) = keys.f64("sample.t_work_max")? {
        sp.t_work_max = x;
    }
    if let Some(p) = keys.pair("sample.kappa")? {
        sp.kappa = p;
    }
    if let Some(p) = keys.pair("sample.g")? {
        sp.g = p;
    }
    if let Some(b) = keys.usize("sample.bins")? {
        if b == 0 {
            return Err(bad("sample.bins", "at least 1"));
        }
        sp.histogram_bins = b;
    }
    let ok_range = |(lo, hi): (f64, f64)| lo > 0.0 && hi > lo;
    if !(ok_range(sp.t_cold) && ok_range(sp.kappa) && ok_range(sp.g) && sp.t_hot_max > sp.t_cold.1 && sp.t_work_max > sp.t_hot_max) {
        return Err(bad("sample", "positive increasing ranges with t_cold < t_hot_max < t_work_max"));
    }
    if let Some(g) = keys.list("leak_curves.g")? {
        s.leak_g = g;
    }
    if let Some(n) = keys.usize("leak_curves.points")? {
        s.leak_points = n;
    }
    if let Some(t) = keys.str("leak_curves.target")? {
        s.leak_target = parse_leak_target("leak_curves.target", &t)?;
    }
    if let Some(g) = keys.list("swapped.g")? {
        s.swapped_g = g;
    }
    if let Some(t) = keys.f64("swapped.tolerance")? {
        s.swapped_tolerance = t;
    }
    Ok(s)
}

/// Parses config text. The system part is checked by
/// [`crate::config::validate`] later, not here.
pub fn parse_config(text: &str) -> Result<ConfigFile, IoError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| IoError::Syntax(e.message().to_string()))?;
    let mut keys = Keys { map: BTreeMap::new() };
    flatten("", &table, &mut keys.map);
    let system = parse_system(&mut keys)?;
    let sample_medium = if system.is_none() { Some(parse_medium(&mut keys)?) } else { None };
    let mut studies = parse_studies(&mut keys)?;
    if let Some(k) = keys.map.keys().next() {
        return Err(IoError::UnknownKey(k.clone()));
    }
    studies.sample.medium = match (&system, sample_medium) {
        (Some(c), _) => c.medium,
        (None, Some(v)) => MediumKind::of(v),
        (None, None) => studies.sample.medium,
    };
    Ok(ConfigFile { system, studies })
}

pub fn read_config(path: &Path) -> Result<ConfigFile, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::File { path: path.to_path_buf(), source })?;
    parse_config(&text)
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub tail_population: f64,
    pub cross_check: f64,
    pub golden_section_bracket: f64,
    pub weak_coupling_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tail_population: crate::thermo::TAIL_TOLERANCE,
            cross_check: crate::steady::CROSS_CHECK_TOL,
            golden_section_bracket: crate::studies::SearchOptions::default().tolerance,
            weak_coupling_ratio: crate::thermo::WEAK_COUPLING_RATIO,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyCount {
    pub study: String,
    pub rows: usize,
    pub failures: usize,
}

/// Provenance of one CLI run. Timestamps are the only fields that change
/// between otherwise identical runs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: Option<String>,
    pub seed: Option<u64>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub threads: usize,
    pub tolerances: Tolerances,
    pub studies: Vec<StudyCount>,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
}

pub fn unix_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

impl RunManifest {
    pub fn start(command: &str, config_hash: Option<String>, seed: Option<u64>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_hash,
            seed,
            started_unix_ms: unix_ms(),
            finished_unix_ms: 0,
            threads: rayon::current_num_threads(),
            tolerances: Tolerances::default(),
            studies: Vec::new(),
            warnings: Vec::new(),
            files: Vec::new(),
        }
    }
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Single-writer output directory holding exactly one manifest.
#[derive(Debug)]
pub struct OutputDir {
    path: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    /// Creates `path`; refuses a directory that already holds a run unless
    /// `force` is set.
    pub fn create(path: &Path, force: bool) -> Result<Self, IoError> {
        let err = |source| IoError::File { path: path.to_path_buf(), source };
        if path.join(MANIFEST_FILE).exists() && !force {
            return Err(IoError::OutputExists(path.to_path_buf()));
        }
        fs::create_dir_all(path).map_err(err)?;
        Ok(OutputDir { path: path.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), IoError> {
        let p = self.path.join(name);
        fs::write(&p, contents).map_err(|source| IoError::File { path: p, source })?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn finish(mut self, mut manifest: RunManifest) -> Result<(), IoError> {
        manifest.finished_unix_ms = unix_ms();
        manifest.files = std::mem::take(&mut self.files);
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        self.write(MANIFEST_FILE, &(text + "\n"))
    }
}
