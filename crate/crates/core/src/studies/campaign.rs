// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Randomized efficiency-at-maximum-power campaigns.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{max_power_point_with, MaxPowerPoint, SearchOptions, StudyError};
use crate::config::{validate, MediumKind, SystemConfig};
use crate::thermo::carnot_cop;

/// Ranges of the sampled parameters. Temperatures, κ and g are drawn
/// log-uniformly; samples with 2g at or beyond the cooling window are
/// rejected and redrawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingSpec {
    pub samples: usize,
    pub seed: u64,
    pub t_cold: (f64, f64),
    pub t_hot_max: f64,
    pub t_work_max: f64,
    pub kappa: (f64, f64),
    pub g: (f64, f64),
    pub medium: MediumKind,
    pub histogram_bins: usize,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            samples: 10_000,
            seed: 0,
            t_cold: (0.05, 1.0),
            t_hot_max: 4.0,
            t_work_max: 20.0,
            kappa: (1e-3, 1e-2),
            g: (1e-3, 0.15),
            medium: MediumKind::tls(),
            histogram_bins: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub index: usize,
    /// `[T_w, T_h, T_c]`.
    pub temperatures: [f64; 3],
    /// `[κ_w, κ_h, κ_c]`.
    pub kappas: [f64; 3],
    pub g: f64,
    /// Draws discarded before this one was accepted.
    pub rejected: usize,
}

impl Sample {
    pub fn carnot(&self) -> f64 {
        let [tw, th, tc] = self.temperatures;
        carnot_cop(tw, th, tc).expect("sampled temperatures are ordered")
    }

    /// Largest dressed cold frequency that cools.
    pub fn window(&self) -> f64 {
        let ec = self.carnot();
        ec / (1.0 + ec)
    }

    pub fn config(&self, medium: MediumKind, omega_c: f64) -> SystemConfig {
        let mut c = SystemConfig::standard(medium, omega_c, self.g, self.temperatures, 1.0);
        c.baths.work.kappa = self.kappas[0];
        c.baths.hot.kappa = self.kappas[1];
        c.baths.cold.kappa = self.kappas[2];
        c
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Draws the accepted samples. Reproducible for a given seed.
pub fn draw_samples(spec: &SamplingSpec) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.samples);
    let mut rejected = 0;
    while out.len() < spec.samples {
        let tc = log_uniform(&mut rng, spec.t_cold.0, spec.t_cold.1);
        let th = log_uniform(&mut rng, tc, spec.t_hot_max);
        let tw = log_uniform(&mut rng, th, spec.t_work_max);
        let kappas = [
            log_uniform(&mut rng, spec.kappa.0, spec.kappa.1),
            log_uniform(&mut rng, spec.kappa.0, spec.kappa.1),
            log_uniform(&mut rng, spec.kappa.0, spec.kappa.1),
        ];
        let g = log_uniform(&mut rng, spec.g.0, spec.g.1);
        let s = Sample { index: out.len(), temperatures: [tw, th, tc], kappas, g, rejected };
        // boundary draws (equal temperatures) are rejected too
        if !(tw > th && th > tc) || 2.0 * g >= s.window() {
            rejected += 1;
            continue;
        }
        out.push(s);
        rejected = 0;
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignRow {
    pub sample: Sample,
    pub point: Option<MaxPowerPoint>,
    pub error: Option<String>,
}

impl CampaignRow {
    pub fn ratio(&self) -> Option<f64> {
        self.point.map(|p| p.cop_ratio)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// Bin edges of ε*/ε_c on [0, 1]; values above 1 go to the last bin.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(values: impl IntoIterator<Item = f64>, bins: usize) -> Self {
        let edges = (0..=bins).map(|k| k as f64 / bins as f64).collect();
        let mut counts = vec![0; bins];
        for v in values {
            let k = ((v * bins as f64).floor().max(0.0) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Histogram { edges, counts }
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("lo,hi,count\n");
        for (k, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", self.edges[k], self.edges[k + 1], c));
        }
        out
    }
}

/// y = A·x^exponent fitted by least squares in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub points: usize,
    /// Standard error of the exponent.
    pub exponent_stderr: f64,
}

pub fn log_log_fit(points: &[(f64, f64)]) -> Option<PowerFit> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum();
    let stderr = (rss / (nf - 2.0) / sxx).sqrt();
    Some(PowerFit { exponent: slope, prefactor: icpt.exp(), points: n, exponent_stderr: stderr })
}

/// Samples with ε*/ε_c at or above this belong to the near-Carnot subset.
pub const NEAR_CARNOT_RATIO: f64 = 0.9;

#[derive(Debug, Clone, Serialize)]
pub struct CampaignResult {
    pub spec: SamplingSpec,
    pub rows: Vec<CampaignRow>,
    pub histogram: Histogram,
    /// Fraction of successful samples with ε* > ε_c/2.
    pub surpassing_fraction: f64,
    pub max_ratio: f64,
    /// Rows with ε* > ε_c (must be zero).
    pub above_carnot: usize,
    pub failures: usize,
    /// ω_c* against g on the near-Carnot subset.
    pub near_carnot_fit: Option<PowerFit>,
}

impl CampaignResult {
    pub fn csv(&self) -> String {
        let mut out = String::from("index,T_w,T_h,T_c,kappa_w,kappa_h,kappa_c,g,omega_c_star,J_c_star,eps_star,carnot,ratio,surpassed,error\n");
        for r in &self.rows {
            let s = &r.sample;
            let p = r.point;
            let f = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |v| format!("{v:e}"));
            out.push_str(&format!(
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{},{},{:e},{},{},{}\n",
                s.index,
                s.temperatures[0],
                s.temperatures[1],
                s.temperatures[2],
                s.kappas[0],
                s.kappas[1],
                s.kappas[2],
                s.g,
                f(p.map(|p| p.omega_c)),
                f(p.map(|p| p.j_c)),
                f(p.map(|p| p.cop)),
                s.carnot(),
                f(p.map(|p| p.cop_ratio)),
                p.map_or("NA".to_string(), |p| p.surpassed.to_string()),
                r.error.as_deref().unwrap_or("").replace(',', ";"),
            ));
        }
        out
    }
}

/// Maximum-power point of one sample over ω_c ∈ (0, √(w² − 4g²)), where w is
/// the cooling window (TLS dressing ω̃_c = √(ω_c² + 4g²)).
pub fn sample_max_power(sample: &Sample, medium: MediumKind, opts: SearchOptions) -> Result<MaxPowerPoint, StudyError> {
    let w = sample.window();
    let hi = (w * w - 4.0 * sample.g * sample.g).sqrt();
    let cfg = validate(sample.config(medium, hi / 2.0))?;
    max_power_point_with(&cfg, hi * 1e-4, hi, opts)
}

pub fn random_campaign(spec: &SamplingSpec) -> CampaignResult {
    random_campaign_with(spec, SearchOptions::default())
}

pub fn random_campaign_with(spec: &SamplingSpec, opts: SearchOptions) -> CampaignResult {
    let samples = draw_samples(spec);
    let rows: Vec<CampaignRow> = samples
        .par_iter()
        .map(|s| match sample_max_power(s, spec.medium, opts) {
            Ok(p) => CampaignRow { sample: *s, point: Some(p), error: None },
            Err(e) => CampaignRow { sample: *s, point: None, error: Some(e.to_string()) },
        })
        .collect();
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio()).collect();
    let ok = ratios.len();
    let near: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.point.filter(|p| p.cop_ratio >= NEAR_CARNOT_RATIO).map(|p| (r.sample.g, p.omega_c)))
        .collect();
    CampaignResult {
        spec: *spec,
        histogram: Histogram::new(ratios.iter().copied(), spec.histogram_bins.max(1)),
        surpassing_fraction: if ok == 0 { 0.0 } else { ratios.iter().filter(|&&r| r > 0.5).count() as f64 / ok as f64 },
        max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        above_carnot: ratios.iter().filter(|&&r| r > 1.0).count(),
        failures: rows.len() - ok,
        near_carnot_fit: log_log_fit(&near),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible_and_admissible() {
        let spec = SamplingSpec { samples: 200, seed: 7, ..Default::default() };
        let a = draw_samples(&spec);
        assert_eq!(a, draw_samples(&spec));
        assert_ne!(a, draw_samples(&SamplingSpec { seed: 8, ..spec }));
        for s in &a {
            let [tw, th, tc] = s.temperatures;
            assert!(tw > th && th > tc && (0.05..=1.0).contains(&tc) && th <= 4.0 && tw <= 20.0);
            assert!(2.0 * s.g < s.window());
            assert!(s.kappas.iter().all(|k| (1e-3..=1e-2).contains(k)));
        }
    }

    #[test]
    fn histogram_bins() {
        let h = Histogram::new([0.0, 0.05, 0.5, 0.99, 1.0, 1.2], 10);
        assert_eq!(h.counts.iter().sum::<usize>(), 6);
        assert_eq!(h.counts[0], 2);
        assert_eq!(h.counts[5], 1);
        assert_eq!(h.counts[9], 3);
    }

    #[test]
    fn fit_recovers_a_power_law() {
        let pts: Vec<(f64, f64)> = (1..20).map(|k| (k as f64 * 0.01, 3.0 * (k as f64 * 0.01).powf(2.0))).collect();
        let f = log_log_fit(&pts).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12 && (f.prefactor - 3.0).abs() < 1e-10);
        assert!(log_log_fit(&pts[..2]).is_none());
    }

    #[test]
    fn small_campaign_never_beats_carnot() {
        let spec = SamplingSpec { samples: 16, seed: 3, ..Default::default() };
        let res = random_campaign(&spec);
        assert_eq!(res.rows.len(), 16);
        assert_eq!(res.above_carnot, 0);
        assert_eq!(res.failures, 0, "{:?}", res.rows.iter().filter_map(|r| r.error.clone()).collect::<Vec<_>>());
    }
}
