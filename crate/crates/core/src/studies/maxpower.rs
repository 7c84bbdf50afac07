// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Maximum cooling power over the cold-side frequency.

use serde::Serialize;

use super::{with_omega_c, StudyError};
use crate::config::{MediumVariant, Topology, ValidatedConfig};
use crate::medium::dressed_frequencies;
use crate::thermo::{self, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Points in the coarse scan.
    pub coarse_points: usize,
    /// Golden-section stops once the bracket is narrower than this.
    pub tolerance: f64,
    pub solve: SolveOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { coarse_points: 48, tolerance: 1e-5, solve: SolveOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxPowerPoint {
    pub omega_c: f64,
    pub omega_c_dressed: f64,
    pub j_c: f64,
    pub cop: f64,
    pub cop_ratio: f64,
    pub carnot: f64,
    /// ε_c/2, the Ohmic weak-coupling bound.
    pub bound: f64,
    pub surpassed: bool,
    pub evaluations: usize,
}

/// Default ω_c search interval: up to the edge of the cooling window.
///
/// Standard TLS: ω̃_c ≤ w means ω_c ≤ √(w² − 4g²); the oscillator media do
/// not dress ω_c, so ω_c ≤ w. Swapped: ω_c ≤ ε_c·ω̃_w. The lower end sits
/// four decades below.
pub fn search_interval(config: &ValidatedConfig) -> Result<(f64, f64), StudyError> {
    let [tw, th, tc] = config.temperatures();
    let carnot = thermo::carnot_cop(tw, th, tc).map_err(|e| StudyError::Invalid(e.to_string()))?;
    let hi = match config.topology {
        Topology::Standard => {
            let w = carnot / (1.0 + carnot) * config.omega_a;
            match config.medium.variant {
                MediumVariant::Tls if 2.0 * config.g >= w => return Err(StudyError::NoCoolingInInterval { lo: 0.0, hi: w }),
                MediumVariant::Tls => (w * w - 4.0 * config.g * config.g).sqrt(),
                _ => w,
            }
        }
        Topology::Swapped => carnot * dressed_frequencies(config.medium.variant, config.omega_b, config.g).omega_b_dressed,
    };
    Ok((hi * 1e-4, hi))
}

pub fn max_power_point(base: &ValidatedConfig, lo: f64, hi: f64) -> Result<MaxPowerPoint, StudyError> {
    max_power_point_with(base, lo, hi, SearchOptions::default())
}

/// Maximizes J_c over ω_c ∈ [lo, hi]: a coarse scan (geometric when the
/// interval spans more than a decade) locates the best cooling point, then
/// golden-section search refines it. Ties go to the smaller ω_c.
pub fn max_power_point_with(base: &ValidatedConfig, lo: f64, hi: f64, opts: SearchOptions) -> Result<MaxPowerPoint, StudyError> {
    if !(lo > 0.0 && hi > lo) || opts.coarse_points < 3 {
        return Err(StudyError::Invalid(format!("bad search interval [{lo}, {hi}]")));
    }
    let mut evaluations = 0usize;
    let mut eval = |x: f64| -> Result<Option<thermo::SteadyStateReport>, StudyError> {
        evaluations += 1;
        let cfg = with_omega_c(base, x)?;
        let r = thermo::solve_with(&cfg, opts.solve)?;
        Ok(r.flags.cooling.then_some(r))
    };
    let score = |r: &Option<thermo::SteadyStateReport>| r.as_ref().map_or(f64::NEG_INFINITY, |r| r.currents.cold);

    let n = opts.coarse_points;
    let geometric = hi / lo > 10.0;
    let grid: Vec<f64> = (0..n)
        .map(|k| {
            let t = k as f64 / (n - 1) as f64;
            if geometric {
                (lo.ln() + (hi.ln() - lo.ln()) * t).exp()
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect();
    let mut best: Option<thermo::SteadyStateReport> = None;
    let mut best_i = 0;
    for (i, &x) in grid.iter().enumerate() {
        let r = eval(x)?;
        if score(&r) > score(&best) {
            best = r;
            best_i = i;
        }
    }
    if best.is_none() {
        return Err(StudyError::NoCoolingInInterval { lo, hi });
    }

    let (mut a, mut b) = (grid[best_i.saturating_sub(1)], grid[(best_i + 1).min(n - 1)]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut rc = eval(c)?;
    let mut rd = eval(d)?;
    while b - a > opts.tolerance {
        if score(&rc) >= score(&rd) {
            b = d;
            d = c;
            rd = rc;
            c = b - inv_phi * (b - a);
            rc = eval(c)?;
        } else {
            a = c;
            c = d;
            rc = rd;
            d = a + inv_phi * (b - a);
            rd = eval(d)?;
        }
    }
    for r in [rc, rd] {
        let better = score(&r) > score(&best)
            || (score(&r) == score(&best) && r.as_ref().map(|x| omega_c_of_report(x)) < best.as_ref().map(|x| omega_c_of_report(x)));
        if better {
            best = r;
        }
    }
    let r = best.expect("coarse scan found a cooling point");
    let carnot = r.carnot;
    let cop = r.cop.expect("cooling point has a COP");
    Ok(MaxPowerPoint {
        omega_c: omega_c_of_report(&r),
        omega_c_dressed: dressed_cold(&r),
        j_c: r.currents.cold,
        cop,
        cop_ratio: cop / carnot,
        carnot,
        bound: carnot / 2.0,
        surpassed: cop > carnot / 2.0,
        evaluations,
    })
}

fn omega_c_of_report(r: &thermo::SteadyStateReport) -> f64 {
    match r.topology {
        Topology::Standard => r.omega_b,
        Topology::Swapped => r.omega_a,
    }
}

fn dressed_cold(r: &thermo::SteadyStateReport) -> f64 {
    match r.topology {
        Topology::Standard => r.omega_b_dressed,
        Topology::Swapped => r.omega_a,
    }
}
