// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Parameter studies: sweeps, maximum-power searches, random campaigns,
//! heat-leak curves and the swapped-topology bound check.
//!
//! Every study evaluates independent configurations on the rayon pool and
//! collects results in input order, so output never depends on scheduling.

mod campaign;
mod leak;
mod maxpower;

pub use campaign::{draw_samples, log_log_fit, random_campaign, random_campaign_with, CampaignResult, NEAR_CARNOT_RATIO, CampaignRow, Histogram, PowerFit, Sample, SamplingSpec};
pub use leak::{leak_curves, swapped_bound_check, LeakCurve, LeakPoint, SwappedBoundRow, SWAPPED_G_VALUES};
pub use maxpower::{max_power_point, max_power_point_with, search_interval, MaxPowerPoint, SearchOptions};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{BathRole, ConfigError, Topology, ValidatedConfig};
use crate::correlations::{self, CorrelationReport, Party};
use crate::medium;
use crate::thermo::{self, SolveError, SteadyStateReport, REPORT_CSV_HEADER};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StudyError {
    #[error("NoCoolingInInterval: J_c ≤ 0 everywhere on [{lo:e}, {hi:e}]")]
    NoCoolingInInterval { lo: f64, hi: f64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("invalid study: {0}")]
    Invalid(String),
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SweepParam {
    /// The cold-side frequency: B in the standard topology, A when swapped.
    OmegaC,
    G,
    /// Ohmic exponent of all three baths.
    OhmicExponent,
    Temperature(BathRole),
}

impl SweepParam {
    pub fn name(self) -> String {
        match self {
            SweepParam::OmegaC => "omega_c".into(),
            SweepParam::G => "g".into(),
            SweepParam::OhmicExponent => "p".into(),
            SweepParam::Temperature(r) => format!("T_{}", r.name()),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "omega_c" => SweepParam::OmegaC,
            "g" => SweepParam::G,
            "p" => SweepParam::OhmicExponent,
            "T_work" | "T_w" => SweepParam::Temperature(BathRole::Work),
            "T_hot" | "T_h" => SweepParam::Temperature(BathRole::Hot),
            "T_cold" | "T_c" => SweepParam::Temperature(BathRole::Cold),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Grid {
    Explicit(Vec<f64>),
    Range { min: f64, max: f64, count: usize, spacing: Spacing },
}

impl Grid {
    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        Grid::Range { min, max, count, spacing: Spacing::Linear }
    }

    pub fn log(min: f64, max: f64, count: usize) -> Self {
        Grid::Range { min, max, count, spacing: Spacing::Log }
    }

    /// Grid values; at least one, all finite.
    pub fn values(&self) -> Result<Vec<f64>, StudyError> {
        let v = match self {
            Grid::Explicit(v) => v.clone(),
            &Grid::Range { min, max, count, spacing } => {
                if count < 2 {
                    return Err(StudyError::Invalid("grid count must be ≥ 2".into()));
                }
                let t = |k: usize| k as f64 / (count - 1) as f64;
                match spacing {
                    Spacing::Linear => (0..count).map(|k| min + (max - min) * t(k)).collect(),
                    Spacing::Log => {
                        if min <= 0.0 || max <= 0.0 {
                            return Err(StudyError::Invalid("log grid needs positive bounds".into()));
                        }
                        (0..count).map(|k| (min.ln() + (max.ln() - min.ln()) * t(k)).exp()).collect()
                    }
                }
            }
        };
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(StudyError::Invalid("grid needs at least one finite value".into()));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ValidatedConfig,
    pub param: SweepParam,
    pub grid: Grid,
    pub correlations: bool,
}

/// Sets the cold-side frequency of a configuration.
pub fn with_omega_c(config: &ValidatedConfig, omega_c: f64) -> Result<ValidatedConfig, ConfigError> {
    config.modify(|c| match c.topology {
        Topology::Standard => c.omega_b = omega_c,
        Topology::Swapped => c.omega_a = omega_c,
    })
}

/// The cold-side frequency of a configuration.
pub fn omega_c_of(config: &ValidatedConfig) -> f64 {
    match config.topology {
        Topology::Standard => config.omega_b,
        Topology::Swapped => config.omega_a,
    }
}

pub fn with_param(config: &ValidatedConfig, param: SweepParam, value: f64) -> Result<ValidatedConfig, ConfigError> {
    match param {
        SweepParam::OmegaC => with_omega_c(config, value),
        SweepParam::G => config.modify(|c| c.g = value),
        SweepParam::OhmicExponent => config.modify(|c| {
            for r in BathRole::ALL {
                c.baths.get_mut(r).ohmic_exponent = value;
            }
        }),
        SweepParam::Temperature(r) => config.modify(|c| c.baths.get_mut(r).temperature = value),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub index: usize,
    pub value: f64,
    pub report: Option<SteadyStateReport>,
    pub correlations: Option<CorrelationReport>,
    pub error: Option<String>,
}

impl StudyRow {
    pub fn j_c(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.currents.cold)
    }

    pub fn warning(&self) -> Option<&'static str> {
        let r = self.report.as_ref()?;
        if !r.flags.weak_coupling_valid {
            Some("ValidityWarning")
        } else if r.flags.truncation_warning {
            Some("TruncationWarning")
        } else {
            None
        }
    }
}

/// Efficiency at maximum power read off the rows of an ω_c sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub eps_star: Option<f64>,
    pub omega_c_star: Option<f64>,
    pub j_c_star: Option<f64>,
    /// ε_c·d_c/(d_c + 1) with d_c = 1.
    pub bound: f64,
    pub surpassed: Option<bool>,
    pub rows: usize,
    pub failures: usize,
}

impl Summary {
    /// Recomputes the summary from rows (ties go to the earliest row).
    pub fn from_rows(rows: &[StudyRow], carnot: f64) -> Self {
        let mut best: Option<&StudyRow> = None;
        for row in rows {
            let Some(r) = &row.report else { continue };
            if !r.flags.cooling {
                continue;
            }
            if best.is_none_or(|b| r.currents.cold > b.report.as_ref().map_or(f64::NEG_INFINITY, |x| x.currents.cold)) {
                best = Some(row);
            }
        }
        let bound = carnot * 0.5;
        let rep = best.and_then(|b| b.report.as_ref());
        let eps = rep.and_then(|r| r.cop);
        Summary {
            eps_star: eps,
            omega_c_star: best.map(|b| b.value),
            j_c_star: rep.map(|r| r.currents.cold),
            bound,
            surpassed: eps.map(|e| e > bound),
            rows: rows.len(),
            failures: rows.iter().filter(|r| r.error.is_some()).count(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyResult {
    pub param: String,
    pub config_hash: String,
    pub rows: Vec<StudyRow>,
    pub summary: Summary,
}

pub const STUDY_CSV_PREFIX: &str = "index,value";
pub const STUDY_CSV_SUFFIX: &str = "I_total,discord,ppt_min_eig,warning,error";

pub fn study_csv_header() -> String {
    format!("{STUDY_CSV_PREFIX},{REPORT_CSV_HEADER},{STUDY_CSV_SUFFIX}")
}

fn na_report() -> String {
    vec!["NA"; REPORT_CSV_HEADER.split(',').count()].join(",")
}

impl StudyResult {
    pub fn csv(&self) -> String {
        let mut out = study_csv_header();
        out.push('\n');
        for row in &self.rows {
            let report = row.report.as_ref().map_or_else(na_report, |r| r.csv_row());
            let corr = row.correlations.as_ref();
            let f = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |v| format!("{v:e}"));
            out.push_str(&format!(
                "{},{:e},{},{},{},{},{},{}\n",
                row.index,
                row.value,
                report,
                f(corr.map(|c| c.mutual_information)),
                f(corr.and_then(|c| c.discord).map(|d| d.discord)),
                f(corr.and_then(|c| c.ppt).map(|p| p.min_eigenvalue)),
                row.warning().unwrap_or(""),
                row.error.as_deref().unwrap_or("").replace(',', ";"),
            ));
        }
        out
    }
}

fn solve_row(base: &ValidatedConfig, param: SweepParam, index: usize, value: f64, with_corr: bool) -> StudyRow {
    let attempt = || -> Result<(SteadyStateReport, Option<CorrelationReport>), String> {
        let cfg = with_param(base, param, value).map_err(|e| e.to_string())?;
        let report = thermo::solve(&cfg).map_err(|e| e.to_string())?;
        let corr = if with_corr {
            let dressed = medium::build_with_truncation(&cfg, report.dim_a, report.dim_b);
            Some(correlations::analyze(&dressed, &report.density_matrix(), Party::A).map_err(|e| e.to_string())?)
        } else {
            None
        };
        Ok((report, corr))
    };
    match attempt() {
        Ok((r, c)) => StudyRow { index, value, report: Some(r), correlations: c, error: None },
        Err(e) => StudyRow { index, value, report: None, correlations: None, error: Some(e) },
    }
}

/// One solved row per grid point; failures are recorded per row.
pub fn run_sweep(spec: &SweepSpec) -> Result<StudyResult, StudyError> {
    let values = spec.grid.values()?;
    let rows: Vec<StudyRow> = values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| solve_row(&spec.base, spec.param, i, v, spec.correlations))
        .collect();
    let [tw, th, tc] = spec.base.temperatures();
    let carnot = thermo::carnot_cop(tw, th, tc).unwrap_or(f64::NAN);
    let summary = Summary::from_rows(&rows, carnot);
    Ok(StudyResult { param: spec.param.name(), config_hash: spec.base.hash(), rows, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{validate, MediumKind, SystemConfig};

    #[test]
    fn grids() {
        assert_eq!(Grid::linear(0.0, 1.0, 3).values().unwrap(), vec![0.0, 0.5, 1.0]);
        let g = Grid::log(1e-3, 1e-1, 3).values().unwrap();
        assert!((g[1] - 1e-2).abs() < 1e-15);
        assert!(Grid::Explicit(vec![]).values().is_err());
        assert!(Grid::Explicit(vec![f64::NAN]).values().is_err());
        assert!(Grid::linear(0.0, 1.0, 1).values().is_err());
    }

    #[test]
    fn sweep_rows_stay_in_order_and_record_failures() {
        let base = validate(SystemConfig::standard(MediumKind::tls(), 0.1, 0.005, [3.0, 2.0, 1.0], 0.005)).unwrap();
        let spec = SweepSpec { base, param: SweepParam::OmegaC, grid: Grid::Explicit(vec![0.05, -0.1, 0.2, 0.3]), correlations: false };
        let res = run_sweep(&spec).unwrap();
        assert_eq!(res.rows.iter().map(|r| r.index).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert!(res.rows[1].error.as_deref().unwrap().contains("NonPositiveParameter"));
        // ω̃_c = 0.3 lies outside the window 0.25
        assert!(!res.rows[3].report.as_ref().unwrap().flags.cooling);
        assert_eq!(res.summary.failures, 1);
        assert!(res.csv().lines().count() == 5);
        let header_cols = study_csv_header().split(',').count();
        for line in res.csv().lines() {
            assert_eq!(line.split(',').count(), header_cols, "{line}");
        }
    }
}
