// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Power-efficiency loops under heat leaks and the swapped-topology bound.

use rayon::prelude::*;
use serde::Serialize;

use super::{max_power_point, search_interval, with_omega_c, MaxPowerPoint, StudyError};
use crate::config::{LeakSpec, LeakTarget, Topology, ValidatedConfig};
use crate::medium::dressed_frequencies;
use crate::thermo::{self, cooling_window};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeakPoint {
    pub omega_c: f64,
    pub j_c: f64,
    /// ε/ε_c, present only while the machine cools.
    pub cop_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakCurve {
    pub g: f64,
    pub target: Option<LeakTarget>,
    pub points: Vec<LeakPoint>,
    /// Largest J_c on the curve, used to normalize.
    pub j_0: f64,
    /// Largest ε/ε_c on the curve; `None` when the machine never cools.
    pub max_cop_ratio: Option<f64>,
    /// 1 − max ε/ε_c: how far the loop stays from Carnot.
    pub gap: Option<f64>,
    /// ε/ε_c turns back toward zero where cooling stops (the last cooling
    /// point sits below half the maximum), so the loop closes. An open
    /// curve ends near its maximum ε with J_c → 0.
    pub closed: bool,
}

impl LeakCurve {
    pub fn cools(&self) -> bool {
        self.max_cop_ratio.is_some()
    }

    /// (J_c/J_0, ε/ε_c) on the cooling part of the curve.
    pub fn normalized(&self) -> Vec<(f64, f64)> {
        self.points.iter().filter_map(|p| p.cop_ratio.map(|r| (p.j_c / self.j_0, r))).collect()
    }
}

/// Scans ω_c over (0, √(w² − 4g²)] for each coupling in `gs`, where w is the
/// cooling window, with the given leak switched on (`None` is the ideal
/// control). `base` supplies everything except ω_c, g and the leak. When
/// 2g ≥ w the scan covers (0, w] and never cools.
pub fn leak_curves(base: &ValidatedConfig, gs: &[f64], target: Option<LeakTarget>, points: usize) -> Result<Vec<LeakCurve>, StudyError> {
    if points < 3 {
        return Err(StudyError::Invalid("leak curves need at least 3 points".into()));
    }
    let w = cooling_window(base).map_err(|e| StudyError::Invalid(e.to_string()))?;
    gs.par_iter()
        .map(|&g| {
            let cfg = base.modify(|c| {
                c.g = g;
                c.leak = target.map(|t| LeakSpec { overlap_target: t });
            })?;
            let hi = if 2.0 * g < w { (w * w - 4.0 * g * g).sqrt() } else { w };
            let mut pts = Vec::with_capacity(points);
            for k in 1..=points {
                let x = hi * k as f64 / points as f64;
                let r = thermo::solve(&with_omega_c(&cfg, x)?)?;
                pts.push(LeakPoint { omega_c: x, j_c: r.currents.cold, cop_ratio: r.cop_ratio });
            }
            let j_0 = pts.iter().map(|p| p.j_c).fold(f64::NEG_INFINITY, f64::max);
            let max_ratio = pts.iter().filter_map(|p| p.cop_ratio).reduce(f64::max);
            let last = pts.iter().rev().find_map(|p| p.cop_ratio);
            let closed = matches!((last, max_ratio), (Some(l), Some(m)) if l < 0.5 * m);
            Ok(LeakCurve { g, target, points: pts, j_0, max_cop_ratio: max_ratio, gap: max_ratio.map(|r| 1.0 - r), closed })
        })
        .collect()
}

/// Couplings of the swapped-topology check.
pub const SWAPPED_G_VALUES: [f64; 5] = [0.025, 0.05, 0.075, 0.1, 0.125];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwappedBoundRow {
    pub g: f64,
    pub omega_w_dressed: f64,
    pub point: MaxPowerPoint,
    /// ε* ≤ ε_c/2 within `tolerance`.
    pub holds: bool,
}

/// Maximum-power COP of a swapped-topology base config for each g, with
/// the cold frequency searched over [`search_interval`].
pub fn swapped_bound_check(base: &ValidatedConfig, gs: &[f64], tolerance: f64) -> Result<Vec<SwappedBoundRow>, StudyError> {
    if base.topology != Topology::Swapped {
        return Err(StudyError::Invalid("swapped_bound_check needs the swapped topology".into()));
    }
    gs.par_iter()
        .map(|&g| {
            let cfg = base.modify(|c| c.g = g)?;
            let (lo, hi) = search_interval(&cfg)?;
            let point = max_power_point(&cfg, lo, hi)?;
            let ww = dressed_frequencies(cfg.medium.variant, cfg.omega_b, g).omega_b_dressed;
            Ok(SwappedBoundRow { g, omega_w_dressed: ww, point, holds: point.cop_ratio <= 0.5 + tolerance })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{validate, MediumKind, SystemConfig};

    #[test]
    fn leak_loops_close_below_carnot() {
        let base = validate(SystemConfig::standard(MediumKind::tls(), 0.1, 0.04, [3.0, 2.0, 1.0], 0.005)).unwrap();
        let curves = leak_curves(&base, &[0.04], Some(LeakTarget::WorkTransition), 40).unwrap();
        let c = &curves[0];
        assert!(c.closed && c.gap.unwrap() > 0.0);
        assert!(c.normalized().iter().all(|&(j, r)| j <= 1.0 + 1e-12 && r < 1.0));
    }

    #[test]
    fn ideal_control_approaches_carnot() {
        let base = validate(SystemConfig::standard(MediumKind::tls(), 0.1, 0.04, [3.0, 2.0, 1.0], 0.005)).unwrap();
        let c = &leak_curves(&base, &[0.04], None, 200).unwrap()[0];
        // ε/ε_c → 1 at the window edge, where J_c → 0
        assert!(c.gap.unwrap() < 0.02 && !c.closed);
        let last = c.points.last().unwrap();
        assert!(last.j_c.abs() < 1e-3 * c.j_0);
    }

    #[test]
    fn swapped_check_rejects_standard_configs() {
        let base = validate(SystemConfig::standard(MediumKind::tls(), 0.1, 0.01, [3.0, 2.0, 1.0], 0.005)).unwrap();
        assert!(matches!(swapped_bound_check(&base, &[0.05], 1e-3), Err(StudyError::Invalid(_))));
    }

    #[test]
    fn couplings_beyond_the_window_never_cool() {
        let base = validate(SystemConfig::standard(MediumKind::tls(), 0.1, 0.01, [3.0, 2.0, 1.0], 0.005)).unwrap();
        let c = &leak_curves(&base, &[0.2], Some(LeakTarget::WorkTransition), 10).unwrap()[0];
        assert!(!c.cools() && c.gap.is_none());
    }
}
