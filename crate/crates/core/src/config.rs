// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Configuration data model shared by every other module.
//!
//! All energies are dimensionless: ħ = k_B = 1 and, for the standard
//! topology, every frequency and temperature is expressed in units of the
//! subsystem-A frequency. [`validate`] performs that rescaling, fills
//! defaults and collects every violation it finds.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Default cutoff frequency, in units of the subsystem-A frequency.
pub const DEFAULT_CUTOFF: f64 = 1000.0;
pub const DEFAULT_TLOS_TRUNCATION_B: usize = 12;
pub const DEFAULT_OMS_TRUNCATION: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MediumVariant {
    /// Two coupled two-level systems.
    Tls,
    /// Two-level system (A) coupled to an oscillator (B).
    Tlos,
    /// Two coupled oscillators.
    Oms,
}

impl MediumVariant {
    pub fn name(self) -> &'static str {
        match self {
            MediumVariant::Tls => "TLS",
            MediumVariant::Tlos => "TLOS",
            MediumVariant::Oms => "OMS",
        }
    }
}

impl fmt::Display for MediumVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Working medium selector plus Fock truncations.
///
/// With `auto_truncation` set, the truncations are starting sizes: the
/// solver grows them until the top two levels of every oscillator carry
/// negligible steady-state population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumKind {
    pub variant: MediumVariant,
    pub truncation_a: usize,
    pub truncation_b: usize,
    pub auto_truncation: bool,
}

impl MediumKind {
    pub fn tls() -> Self {
        Self { variant: MediumVariant::Tls, truncation_a: 2, truncation_b: 2, auto_truncation: false }
    }

    pub fn tlos() -> Self {
        Self {
            variant: MediumVariant::Tlos,
            truncation_a: 2,
            truncation_b: DEFAULT_TLOS_TRUNCATION_B,
            auto_truncation: true,
        }
    }

    pub fn oms() -> Self {
        Self {
            variant: MediumVariant::Oms,
            truncation_a: DEFAULT_OMS_TRUNCATION,
            truncation_b: DEFAULT_OMS_TRUNCATION,
            auto_truncation: true,
        }
    }

    pub fn of(variant: MediumVariant) -> Self {
        match variant {
            MediumVariant::Tls => Self::tls(),
            MediumVariant::Tlos => Self::tlos(),
            MediumVariant::Oms => Self::oms(),
        }
    }

    /// Fixed truncation, no automatic growth.
    pub fn fixed(variant: MediumVariant, truncation_a: usize, truncation_b: usize) -> Self {
        Self { variant, truncation_a, truncation_b, auto_truncation: false }
    }

    pub fn dimension(&self) -> usize {
        self.truncation_a * self.truncation_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BathRole {
    Work,
    Hot,
    Cold,
}

impl BathRole {
    pub const ALL: [BathRole; 3] = [BathRole::Work, BathRole::Hot, BathRole::Cold];

    pub fn name(self) -> &'static str {
        match self {
            BathRole::Work => "work",
            BathRole::Hot => "hot",
            BathRole::Cold => "cold",
        }
    }
}

impl fmt::Display for BathRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambShiftMode {
    #[default]
    Zero,
    NumericPv,
}

/// Lorentzian filter applied to a bath's response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Filter {
    /// Line centre. `None` centres the filter on the transition the bath
    /// is meant to drive under the configured gating preset.
    pub center: Option<f64>,
    pub strength: f64,
    pub lamb_shift: LambShiftMode,
}

/// Closed frequency interval `[lo, hi]` on |ω|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn around(center: f64, half_width: f64) -> Self {
        Self { lo: center - half_width, hi: center + half_width }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Frequency windows on which a bath couples to the medium.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Windows {
    /// Derived from the gating preset and the dressed transition table.
    #[default]
    Auto,
    /// The bath couples at every frequency.
    Full,
    Explicit(Vec<Interval>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub role: BathRole,
    pub temperature: f64,
    pub kappa: f64,
    /// Spectral-density exponent (1 = Ohmic).
    pub ohmic_exponent: f64,
    /// Cutoff frequency; `None` means [`DEFAULT_CUTOFF`] after validation.
    pub cutoff: Option<f64>,
    pub filter: Option<Filter>,
    pub windows: Windows,
}

impl BathSpec {
    pub fn ohmic(role: BathRole, temperature: f64, kappa: f64) -> Self {
        Self {
            role,
            temperature,
            kappa,
            ohmic_exponent: 1.0,
            cutoff: None,
            filter: None,
            windows: Windows::Auto,
        }
    }

    /// Cutoff after validation; panics never, falls back to the default.
    pub fn cutoff(&self) -> f64 {
        self.cutoff.unwrap_or(DEFAULT_CUTOFF)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baths {
    pub work: BathSpec,
    pub hot: BathSpec,
    pub cold: BathSpec,
}

impl Baths {
    pub fn new(t_work: f64, t_hot: f64, t_cold: f64, kappa: f64) -> Self {
        Self {
            work: BathSpec::ohmic(BathRole::Work, t_work, kappa),
            hot: BathSpec::ohmic(BathRole::Hot, t_hot, kappa),
            cold: BathSpec::ohmic(BathRole::Cold, t_cold, kappa),
        }
    }

    pub fn get(&self, role: BathRole) -> &BathSpec {
        match role {
            BathRole::Work => &self.work,
            BathRole::Hot => &self.hot,
            BathRole::Cold => &self.cold,
        }
    }

    pub fn get_mut(&mut self, role: BathRole) -> &mut BathSpec {
        match role {
            BathRole::Work => &mut self.work,
            BathRole::Hot => &mut self.hot,
            BathRole::Cold => &mut self.cold,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &BathSpec> {
        [&self.work, &self.hot, &self.cold].into_iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Work and hot baths on A, cold bath on B.
    #[default]
    Standard,
    /// Hot and cold baths on A, work bath on B.
    Swapped,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::Standard => "standard",
            Topology::Swapped => "swapped",
        }
    }
}

/// Preset used to resolve [`Windows::Auto`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gating {
    /// Work bath on the work transition, hot bath on the A transition:
    /// two three-level cycles sharing the work transition.
    #[default]
    Ideal,
    /// Hot bath on the sum transition instead: a single four-transition
    /// cycle.
    SingleCycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeakTarget {
    /// The hot bath also drives the work transition.
    WorkTransition,
    /// The work bath also drives the hot (A) transition.
    HotTransition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeakSpec {
    pub overlap_target: LeakTarget,
}

/// One refrigerator instance.
///
/// `omega_a` and `omega_b` are the bare frequencies of subsystems A and B.
/// In the standard topology these are ω_h and ω_c; in the swapped topology
/// A carries the cold frequency and B the work frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub medium: MediumKind,
    pub omega_a: f64,
    pub omega_b: f64,
    pub g: f64,
    pub topology: Topology,
    pub gating: Gating,
    pub baths: Baths,
    pub leak: Option<LeakSpec>,
}

impl SystemConfig {
    /// Standard-topology config with Ohmic baths and ideal gating.
    pub fn standard(medium: MediumKind, omega_c: f64, g: f64, temps: [f64; 3], kappa: f64) -> Self {
        Self {
            medium,
            omega_a: 1.0,
            omega_b: omega_c,
            g,
            topology: Topology::Standard,
            gating: Gating::Ideal,
            baths: Baths::new(temps[0], temps[1], temps[2], kappa),
            leak: None,
        }
    }

    /// Swapped-topology config: A at the cold frequency, B at the work
    /// frequency.
    pub fn swapped(medium: MediumKind, omega_c: f64, omega_w: f64, g: f64, temps: [f64; 3], kappa: f64) -> Self {
        Self {
            medium,
            omega_a: omega_c,
            omega_b: omega_w,
            g,
            topology: Topology::Swapped,
            gating: Gating::Ideal,
            baths: Baths::new(temps[0], temps[1], temps[2], kappa),
            leak: None,
        }
    }

    pub fn temperatures(&self) -> [f64; 3] {
        [self.baths.work.temperature, self.baths.hot.temperature, self.baths.cold.temperature]
    }
}

/// One violated constraint, naming the offending config key.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("TemperatureOrderViolation: require T_w > T_h > T_c, got bath.work.T = {work}, bath.hot.T = {hot}, bath.cold.T = {cold}")]
    TemperatureOrderViolation { work: f64, hot: f64, cold: f64 },
    #[error("NonPositiveParameter: {key} = {value} must be {requirement}")]
    NonPositiveParameter { key: String, value: f64, requirement: &'static str },
    #[error("TruncationTooSmall: {key} = {value} must be at least 2")]
    TruncationTooSmall { key: &'static str, value: usize },
    #[error("InvalidWindows: {key}: {reason}")]
    InvalidWindows { key: String, reason: &'static str },
    #[error("InvalidLeak: leak is only valid for the standard topology")]
    LeakRequiresStandard,
    #[error("RoleMismatch: bath.{slot}.role is {found}")]
    RoleMismatch { slot: BathRole, found: BathRole },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ConfigError {
    pub violations: Vec<Violation>,
}

impl ConfigError {
    pub fn has_temperature_order_violation(&self) -> bool {
        self.violations.iter().any(|v| matches!(v, Violation::TemperatureOrderViolation { .. }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Accept T_w ≥ T_h ≥ T_c. Used for equilibrium checks only.
    pub allow_equal_temperatures: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { allow_equal_temperatures: false }
    }
}

/// A config that passed [`validate`]. Downstream modules accept only this.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidatedConfig {
    inner: SystemConfig,
    #[serde(skip)]
    options: ValidationOptions,
}

impl Deref for ValidatedConfig {
    type Target = SystemConfig;

    fn deref(&self) -> &SystemConfig {
        &self.inner
    }
}

impl ValidatedConfig {
    pub fn config(&self) -> &SystemConfig {
        &self.inner
    }

    pub fn into_inner(self) -> SystemConfig {
        self.inner
    }

    /// Applies `edit` to a copy and revalidates with the same options.
    pub fn modify(&self, edit: impl FnOnce(&mut SystemConfig)) -> Result<ValidatedConfig, ConfigError> {
        let mut c = self.inner.clone();
        edit(&mut c);
        validate_with(c, self.options)
    }

    /// Sorted `key = value` lines; floats in shortest round-trip scientific
    /// notation so the text is identical on every platform.
    pub fn canonical_text(&self) -> String {
        let mut lines = canonical_lines(&self.inner);
        lines.sort();
        let mut s = lines.join("\n");
        s.push('\n');
        s
    }

    /// Hex SHA-256 of [`Self::canonical_text`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn validate(config: SystemConfig) -> Result<ValidatedConfig, ConfigError> {
    validate_with(config, ValidationOptions::default())
}

pub fn validate_with(mut c: SystemConfig, options: ValidationOptions) -> Result<ValidatedConfig, ConfigError> {
    let mut violations = Vec::new();

    let mut positive = |key: &str, value: f64| {
        if !(value > 0.0 && value.is_finite()) {
            violations.push(Violation::NonPositiveParameter {
                key: key.to_string(),
                value,
                requirement: "positive and finite",
            });
        }
    };
    positive("omega_a", c.omega_a);
    positive("omega_b", c.omega_b);
    for bath in c.baths.iter() {
        let r = bath.role.name();
        positive(&format!("bath.{r}.T"), bath.temperature);
        positive(&format!("bath.{r}.kappa"), bath.kappa);
        positive(&format!("bath.{r}.p"), bath.ohmic_exponent);
        if let Some(ct) = bath.cutoff {
            positive(&format!("bath.{r}.cutoff"), ct);
        }
        if let Some(f) = &bath.filter {
            positive(&format!("bath.{r}.filter.strength"), f.strength);
            if let Some(center) = f.center {
                positive(&format!("bath.{r}.filter.center"), center);
            }
        }
    }
    if !(c.g >= 0.0 && c.g.is_finite()) {
        violations.push(Violation::NonPositiveParameter {
            key: "g".into(),
            value: c.g,
            requirement: "non-negative and finite",
        });
    }

    for (slot, bath) in [(BathRole::Work, &c.baths.work), (BathRole::Hot, &c.baths.hot), (BathRole::Cold, &c.baths.cold)] {
        if bath.role != slot {
            violations.push(Violation::RoleMismatch { slot, found: bath.role });
        }
        if let Windows::Explicit(ws) = &bath.windows {
            let key = format!("bath.{}.windows", slot.name());
            if ws.iter().any(|w| !(w.hi > w.lo)) {
                violations.push(Violation::InvalidWindows { key: key.clone(), reason: "every window needs positive width" });
            }
            let mut sorted = ws.clone();
            sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            if sorted.windows(2).any(|p| p[1].lo <= p[0].hi) {
                violations.push(Violation::InvalidWindows { key, reason: "windows must be disjoint" });
            }
        }
    }

    let [tw, th, tc] = c.temperatures();
    let ordered = if options.allow_equal_temperatures {
        tw >= th && th >= tc
    } else {
        tw > th && th > tc
    };
    if !ordered {
        violations.push(Violation::TemperatureOrderViolation { work: tw, hot: th, cold: tc });
    }

    match c.medium.variant {
        MediumVariant::Tls => {
            c.medium.truncation_a = 2;
            c.medium.truncation_b = 2;
            c.medium.auto_truncation = false;
        }
        MediumVariant::Tlos => {
            c.medium.truncation_a = 2;
            if c.medium.truncation_b < 2 {
                violations.push(Violation::TruncationTooSmall { key: "medium.truncation_b", value: c.medium.truncation_b });
            }
        }
        MediumVariant::Oms => {
            if c.medium.truncation_a < 2 {
                violations.push(Violation::TruncationTooSmall { key: "medium.truncation_a", value: c.medium.truncation_a });
            }
            if c.medium.truncation_b < 2 {
                violations.push(Violation::TruncationTooSmall { key: "medium.truncation_b", value: c.medium.truncation_b });
            }
        }
    }

    if c.leak.is_some() && c.topology != Topology::Standard {
        violations.push(Violation::LeakRequiresStandard);
    }

    if !violations.is_empty() {
        return Err(ConfigError { violations });
    }

    // Rescale to units of the A frequency (ω_h) for the standard topology.
    // In the swapped topology ω_h is a derived transition, so the config is
    // taken as already dimensionless.
    let unit = match c.topology {
        Topology::Standard => c.omega_a,
        Topology::Swapped => 1.0,
    };
    for bath in [&mut c.baths.work, &mut c.baths.hot, &mut c.baths.cold] {
        if bath.cutoff.is_none() {
            bath.cutoff = Some(DEFAULT_CUTOFF * unit);
        }
    }
    if unit != 1.0 {
        rescale(&mut c, 1.0 / unit);
    }

    Ok(ValidatedConfig { inner: c, options })
}

fn rescale(c: &mut SystemConfig, factor: f64) {
    c.omega_a *= factor;
    c.omega_b *= factor;
    c.g *= factor;
    for bath in [&mut c.baths.work, &mut c.baths.hot, &mut c.baths.cold] {
        bath.temperature *= factor;
        bath.cutoff = bath.cutoff.map(|x| x * factor);
        if let Some(f) = bath.filter.as_mut() {
            f.strength *= factor;
            f.center = f.center.map(|x| x * factor);
        }
        if let Windows::Explicit(ws) = &mut bath.windows {
            for w in ws.iter_mut() {
                w.lo *= factor;
                w.hi *= factor;
            }
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Lines in config-file syntax, so `qar validate` output parses back to the
/// same config.
fn canonical_lines(c: &SystemConfig) -> Vec<String> {
    let medium = match c.medium.variant {
        MediumVariant::Tls => "tls",
        MediumVariant::Tlos => "tlos",
        MediumVariant::Oms => "oms",
    };
    let mut out = vec![
        format!("medium = \"{medium}\""),
        format!("truncation.a = {}", c.medium.truncation_a),
        format!("truncation.b = {}", c.medium.truncation_b),
        format!("truncation.auto = {}", c.medium.auto_truncation),
        format!("omega_a = {}", num(c.omega_a)),
        format!("omega_b = {}", num(c.omega_b)),
        format!("g = {}", num(c.g)),
        match c.topology {
            Topology::Standard => "topology = \"standard\"".to_string(),
            Topology::Swapped => "topology = \"swapped\"".to_string(),
        },
        match c.gating {
            Gating::Ideal => "gating = \"ideal\"".to_string(),
            Gating::SingleCycle => "gating = \"single-cycle\"".to_string(),
        },
        match c.leak.map(|l| l.overlap_target) {
            None => "leak = \"none\"".to_string(),
            Some(LeakTarget::WorkTransition) => "leak = \"work_transition\"".to_string(),
            Some(LeakTarget::HotTransition) => "leak = \"hot_transition\"".to_string(),
        },
    ];
    for bath in c.baths.iter() {
        let r = bath.role.name();
        out.push(format!("bath.{r}.T = {}", num(bath.temperature)));
        out.push(format!("bath.{r}.kappa = {}", num(bath.kappa)));
        out.push(format!("bath.{r}.p = {}", num(bath.ohmic_exponent)));
        out.push(format!("bath.{r}.cutoff = {}", num(bath.cutoff())));
        if let Some(f) = &bath.filter {
            if let Some(center) = f.center {
                out.push(format!("bath.{r}.filter.center = {}", num(center)));
            }
            out.push(format!("bath.{r}.filter.strength = {}", num(f.strength)));
            let lamb = match f.lamb_shift {
                LambShiftMode::Zero => "zero",
                LambShiftMode::NumericPv => "numeric-pv",
            };
            out.push(format!("bath.{r}.filter.lamb_shift = \"{lamb}\""));
        }
        out.push(match &bath.windows {
            Windows::Auto => format!("bath.{r}.windows = \"auto\""),
            Windows::Full => format!("bath.{r}.windows = \"full\""),
            Windows::Explicit(ws) => format!(
                "bath.{r}.windows = [{}]",
                ws.iter().map(|w| format!("[{}, {}]", num(w.lo), num(w.hi))).collect::<Vec<_>>().join(", ")
            ),
        });
    }
    out
}
