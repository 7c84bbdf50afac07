// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Bath spectral response functions.
//!
//! The positive-frequency branch is the emission rate γ(ω)(1 + n̄(ω)); the
//! negative branch is always obtained from it by detailed balance,
//! G(−ω) = e^{−ω/T} G(ω), for the plain, filtered and gated responses
//! alike. That keeps every assembled master equation thermodynamically
//! consistent regardless of how the positive branch was shaped.

use std::f64::consts::PI;

use thiserror::Error;

use crate::config::{BathRole, BathSpec, Filter, Interval, LambShiftMode, Windows};
use crate::quad;

/// Relative tolerance demanded of the principal-value integral.
pub const PV_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("DomainError: occupation requires ω > 0 and T > 0 (ω = {omega}, T = {temperature})")]
    DomainError { omega: f64, temperature: f64 },
    #[error("QuadratureFailure: principal-value shift at ω = {omega} did not reach relative tolerance (error estimate {error:e})")]
    QuadratureFailure { omega: f64, error: f64 },
    #[error("filtered response requested for the {0} bath, which has no filter centre")]
    MissingFilter(BathRole),
}

/// One evaluated point of a bath response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseSample {
    pub omega: f64,
    pub value: f64,
    pub bath_role: BathRole,
}

/// Mean thermal occupation 1/(e^{ω/T} − 1).
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64, SpectraError> {
    if !(omega > 0.0) || !(temperature > 0.0) {
        return Err(SpectraError::DomainError { omega, temperature });
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Ohmic-family spectral density κ ω^p ω_ct^{p−1} e^{−ω/ω_ct}; zero for ω ≤ 0.
pub fn ohmic_density(omega: f64, kappa: f64, p: f64, cutoff: f64) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    kappa * omega.powf(p) * cutoff.powf(p - 1.0) * (-omega / cutoff).exp()
}

/// Energy damping rate γ(ω) = 2π J(ω).
pub fn damping_rate(omega: f64, bath: &BathSpec) -> f64 {
    2.0 * PI * ohmic_density(omega, bath.kappa, bath.ohmic_exponent, bath.cutoff())
}

/// Emission rate γ(ω)(1 + n̄(ω)) for ω > 0, or the ω → 0 limit.
fn emission(omega: f64, bath: &BathSpec) -> f64 {
    let t = bath.temperature;
    if omega == 0.0 {
        // lim γ(ω) n̄(ω) = 2πκT (ω ω_ct)^{p−1}
        return if bath.ohmic_exponent == 1.0 {
            2.0 * PI * bath.kappa * t
        } else if bath.ohmic_exponent > 1.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let x = omega / t;
    // 1 + n̄ = 1/(1 − e^{−x})
    damping_rate(omega, bath) / -(-x).exp_m1()
}

fn boltzmann(omega: f64, temperature: f64) -> f64 {
    (-omega / temperature).exp()
}

/// Applies detailed balance to a positive-branch function.
fn kms(omega: f64, temperature: f64, positive: impl FnOnce(f64) -> f64) -> f64 {
    if omega >= 0.0 {
        positive(omega)
    } else {
        boltzmann(-omega, temperature) * positive(-omega)
    }
}

/// Unfiltered response G(ω) for signed ω.
pub fn spectral_response(omega: f64, bath: &BathSpec) -> f64 {
    kms(omega, bath.temperature, |w| emission(w, bath))
}

/// Principal value of ∫₀^∞ G(ω')/(ω − ω') dω' over the unfiltered positive
/// branch, by subtracting the singularity on [0, 2ω] and integrating the
/// remaining tail on geometrically growing panels.
pub fn principal_value_shift(omega: f64, bath: &BathSpec) -> Result<f64, SpectraError> {
    if !(omega > 0.0) {
        return Err(SpectraError::DomainError { omega, temperature: bath.temperature });
    }
    let g0 = emission(omega, bath);
    let near = quad::integrate(
        |x| {
            let d = omega - x;
            if d == 0.0 {
                0.0
            } else {
                (emission(x, bath) - g0) / d
            }
        },
        0.0,
        2.0 * omega,
        PV_REL_TOL * 1e-3,
        0.0,
        400,
    );
    let mut total = near.value;
    let mut err = near.error;
    let mut converged = near.converged;
    let reach = 60.0 * bath.cutoff() + 2.0 * omega;
    let mut lo = 2.0 * omega;
    while lo < reach {
        let hi = 2.0 * lo;
        let q = quad::integrate(|x| emission(x, bath) / (omega - x), lo, hi, PV_REL_TOL * 1e-3, 0.0, 400);
        total += q.value;
        err += q.error;
        converged &= q.converged;
        lo = hi;
    }
    if !converged || err > PV_REL_TOL * total.abs().max(f64::MIN_POSITIVE) {
        return Err(SpectraError::QuadratureFailure { omega, error: err });
    }
    Ok(total)
}

/// Lorentzian-filtered response with an explicit filter.
pub fn filtered_response_with(omega: f64, bath: &BathSpec, filter: &Filter, center: f64) -> Result<f64, SpectraError> {
    let positive = |w: f64| -> Result<f64, SpectraError> {
        let g = emission(w, bath);
        let shift = match filter.lamb_shift {
            LambShiftMode::Zero => 0.0,
            LambShiftMode::NumericPv => {
                if w > 0.0 {
                    principal_value_shift(w, bath)?
                } else {
                    0.0
                }
            }
        };
        let width = PI * g;
        let detuning = w - center - shift;
        Ok(filter.strength / PI * width * width / (detuning * detuning + width * width))
    };
    if omega >= 0.0 {
        positive(omega)
    } else {
        Ok(boltzmann(-omega, bath.temperature) * positive(-omega)?)
    }
}

/// Lorentzian-filtered response; the bath's filter must carry a centre.
pub fn filtered_response(omega: f64, bath: &BathSpec) -> Result<f64, SpectraError> {
    let filter = bath.filter.as_ref().ok_or(SpectraError::MissingFilter(bath.role))?;
    let center = filter.center.ok_or(SpectraError::MissingFilter(bath.role))?;
    filtered_response_with(omega, bath, filter, center)
}

fn in_windows(omega: f64, windows: &[Interval]) -> bool {
    let a = omega.abs();
    windows.iter().any(|w| w.contains(a))
}

/// Hard-window gating of the unfiltered response. `Auto` windows count as
/// the full axis here; use [`BathResponse`] to resolve them.
pub fn gated_response(omega: f64, bath: &BathSpec) -> f64 {
    match &bath.windows {
        Windows::Explicit(ws) if !in_windows(omega, ws) => 0.0,
        _ => spectral_response(omega, bath),
    }
}

/// A bath whose windows and filter centre have been resolved against a
/// concrete transition table.
#[derive(Debug, Clone, PartialEq)]
pub struct BathResponse {
    pub spec: BathSpec,
    /// `None` couples on the full axis.
    pub windows: Option<Vec<Interval>>,
    pub filter_center: Option<f64>,
}

impl BathResponse {
    pub fn new(spec: BathSpec, windows: Option<Vec<Interval>>, filter_center: Option<f64>) -> Self {
        Self { spec, windows, filter_center }
    }

    pub fn role(&self) -> BathRole {
        self.spec.role
    }

    pub fn temperature(&self) -> f64 {
        self.spec.temperature
    }

    pub fn couples_at(&self, omega: f64) -> bool {
        self.windows.as_ref().is_none_or(|ws| in_windows(omega, ws))
    }

    /// Rate at signed frequency ω: gate, then filter (if any) or plain.
    pub fn rate(&self, omega: f64) -> Result<f64, SpectraError> {
        if !self.couples_at(omega) {
            return Ok(0.0);
        }
        match (&self.spec.filter, self.filter_center) {
            (Some(f), Some(c)) => filtered_response_with(omega, &self.spec, f, c),
            (Some(_), None) => Err(SpectraError::MissingFilter(self.spec.role)),
            (None, _) => Ok(spectral_response(omega, &self.spec)),
        }
    }

    pub fn sample(&self, omega: f64) -> Result<ResponseSample, SpectraError> {
        Ok(ResponseSample { omega, value: self.rate(omega)?, bath_role: self.spec.role })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::BathSpec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn bath(t: f64, kappa: f64, p: f64) -> BathSpec {
        let mut b = BathSpec::ohmic(BathRole::Hot, t, kappa);
        b.ohmic_exponent = p;
        b.cutoff = Some(1000.0);
        b
    }

    #[test]
    fn occupation_limits() {
        assert!(bose_occupation(1.0, 1e-3).unwrap() < 1e-300);
        assert_relative_eq!(bose_occupation(0.7 * 2f64.ln(), 0.7).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(bose_occupation(1.0, 1.0).unwrap(), 0.581_976_706_869_326_4, max_relative = 1e-12);
        assert!(matches!(bose_occupation(0.0, 1.0), Err(SpectraError::DomainError { .. })));
        assert!(bose_occupation(-1.0, 1.0).is_err());
    }

    #[test]
    fn ohmic_density_values() {
        assert!(ohmic_density(1e-12, 0.005, 1.0, 1000.0) < 1e-14);
        // 0.005 e^{-0.001}
        assert_relative_eq!(ohmic_density(1.0, 0.005, 1.0, 1000.0), 0.004_995_002_499_166_875, max_relative = 1e-12);
        let r = ohmic_density(2e-3, 0.005, 2.0, 1000.0) / ohmic_density(1e-3, 0.005, 2.0, 1000.0);
        assert_relative_eq!(r, 4.0, max_relative = 1e-5);
    }

    #[test]
    fn response_branches() {
        let cold = bath(1e-4, 0.005, 1.0);
        assert!(spectral_response(-1.0, &cold) < 1e-300);
        let b = bath(2.0, 0.005, 1.0);
        let ratio = spectral_response(-0.5, &b) / spectral_response(0.5, &b);
        assert_relative_eq!(ratio, (-0.25f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(ratio, 0.778_800_783_071_404_9, max_relative = 1e-12);
        let b1 = bath(1.0, 0.005, 1.0);
        // 2π·0.005e^{-0.001}·(1 + 1/(e − 1))
        let expected = 2.0 * PI * 0.004_995_002_499_166_875 * (1.0 + 0.581_976_706_869_326_4);
        assert_relative_eq!(spectral_response(1.0, &b1), expected, max_relative = 1e-12);
        assert_relative_eq!(expected, 0.049_649_59, max_relative = 1e-6);
    }

    #[test]
    fn zero_frequency_limit() {
        let b = bath(0.7, 0.01, 1.0);
        assert_relative_eq!(spectral_response(0.0, &b), 2.0 * PI * 0.01 * 0.7, max_relative = 1e-14);
        assert_relative_eq!(spectral_response(1e-9, &b), spectral_response(0.0, &b), max_relative = 1e-6);
        assert_eq!(spectral_response(0.0, &bath(0.7, 0.01, 2.0)), 0.0);
    }

    fn filtered_bath(center: f64, strength: f64, mode: LambShiftMode) -> BathSpec {
        let mut b = bath(0.5, 0.005, 1.0);
        b.filter = Some(Filter { center: Some(center), strength, lamb_shift: mode });
        b
    }

    #[test]
    fn filter_line_center_and_wings() {
        let b = filtered_bath(1.0, 0.02, LambShiftMode::Zero);
        assert_relative_eq!(filtered_response(1.0, &b).unwrap(), 0.02 / PI, max_relative = 1e-14);
        // The width πG(ω) grows with ω, so the wings are not symmetric.
        assert!(filtered_response(3.0, &b).unwrap() < 0.03 * 0.02 / PI);
        assert!(filtered_response(0.2, &b).unwrap() < 0.01 * 0.02 / PI);
    }

    #[test]
    fn filter_half_width() {
        // For slowly varying G the FWHM is 2πG(ω_f): evaluate at ω_f ± πG(ω_f)
        // with the width frozen at the line centre.
        let mut b = filtered_bath(1.0, 0.02, LambShiftMode::Zero);
        b.cutoff = Some(1e12);
        b.temperature = 1e-3;
        b.kappa = 5e-4;
        let g = spectral_response(1.0, &b);
        let peak = filtered_response(1.0, &b).unwrap();
        let f = b.filter.unwrap();
        let half_width = PI * g;
        // Lorentzian evaluated with the line-centre width.
        let lorentz = |w: f64| f.strength / PI * (PI * g).powi(2) / ((w - 1.0).powi(2) + (PI * g).powi(2));
        assert_relative_eq!(lorentz(1.0 + half_width) / peak, 0.5, max_relative = 1e-12);
        // The actual filtered response differs only through G's slow drift.
        let actual = filtered_response(1.0 + half_width, &b).unwrap() / peak;
        assert_relative_eq!(actual, 0.5, max_relative = 0.02);
    }

    #[test]
    fn principal_value_shift_matches_symmetric_excision() {
        // Independent route: integrate up to ω − ε and from ω + ε.
        let mut b = bath(1e-6, 0.005, 1.0);
        b.cutoff = Some(5.0);
        let omega = 1.0;
        let shift = principal_value_shift(omega, &b).unwrap();
        let eps = 1e-4;
        let f = |x: f64| emission(x, &b) / (omega - x);
        let left = quad::integrate(f, 0.0, omega - eps, 1e-12, 0.0, 2000).value;
        let right = quad::integrate(f, omega + eps, 400.0, 1e-12, 0.0, 4000).value;
        assert_relative_eq!(shift, left + right, max_relative = 1e-4);
    }

    #[test]
    fn numeric_pv_mode_moves_the_line() {
        let b0 = filtered_bath(1.0, 0.02, LambShiftMode::Zero);
        let b1 = filtered_bath(1.0, 0.02, LambShiftMode::NumericPv);
        let a = filtered_response(1.0, &b0).unwrap();
        let c = filtered_response(1.0, &b1).unwrap();
        assert!(c < a);
        assert!(c > 0.0);
    }

    #[test]
    fn gating() {
        let mut b = bath(0.5, 0.005, 1.0);
        b.windows = Windows::Explicit(vec![Interval::new(0.85, 1.15)]);
        assert_eq!(gated_response(0.9, &b), spectral_response(0.9, &b));
        assert_eq!(gated_response(-0.9, &b), spectral_response(-0.9, &b));
        assert_eq!(gated_response(0.2, &b), 0.0);
        b.windows = Windows::Full;
        assert!(gated_response(0.2, &b) > 0.0);
    }

    #[test]
    fn resolved_response_gates_then_filters() {
        let spec = filtered_bath(1.0, 0.02, LambShiftMode::Zero);
        let r = BathResponse::new(spec.clone(), Some(vec![Interval::new(0.9, 1.1)]), Some(1.0));
        assert_eq!(r.rate(0.5).unwrap(), 0.0);
        assert_relative_eq!(r.rate(1.0).unwrap(), 0.02 / PI, max_relative = 1e-14);
        let missing = BathResponse::new(spec, None, None);
        assert!(missing.rate(1.0).is_err());
    }

    proptest! {
        #[test]
        fn detailed_balance_every_mode(
            omega in 1e-3f64..5.0,
            t in 0.05f64..20.0,
            kappa in 1e-3f64..1e-1,
            p in 1.0f64..3.0,
            center in 0.1f64..2.0,
        ) {
            let mut b = bath(t, kappa, p);
            let plain = spectral_response(-omega, &b) / spectral_response(omega, &b);
            prop_assert!((plain / (-omega / t).exp() - 1.0).abs() < 1e-12);
            b.filter = Some(Filter { center: Some(center), strength: 0.01, lamb_shift: LambShiftMode::Zero });
            let fp = filtered_response(omega, &b).unwrap();
            let fm = filtered_response(-omega, &b).unwrap();
            prop_assert!(fp >= 0.0 && fm >= 0.0);
            if fp > 0.0 {
                prop_assert!((fm / fp / (-omega / t).exp() - 1.0).abs() < 1e-12);
            }
            b.filter = None;
            b.windows = Windows::Explicit(vec![Interval::new(omega * 0.9, omega * 1.1)]);
            let gp = gated_response(omega, &b);
            let gm = gated_response(-omega, &b);
            prop_assert!((gm / gp / (-omega / t).exp() - 1.0).abs() < 1e-12);
        }
    }
}
