// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form two-qubit refrigerator with an infinitely hot work bath.
//!
//! The dressed excitation probabilities p_h = ⟨σ̃⁺_h σ̃⁻_h⟩ and
//! p_c = ⟨σ̃⁺_c σ̃⁻_c⟩ obey
//!
//! ```text
//! ṗ_h = −c²Γ_h(1 + x_h) p_h + c²Γ_h x_h + s²Γ_w (p_c − p_h)
//! ṗ_c = −c²Γ_c(1 + x_c) p_c + c²Γ_c x_c + s²Γ_w (p_h − p_c)
//! ```
//!
//! with x_h = e^{−ω_h/T_h}, x_c = e^{−ω̃_c/T_c} and Γ_α = ω_α κ_α n̄(ω_α).
//! In the four-level model these are exact (not a factorization), because
//! the work transition |10⟩ ↔ |01⟩ moves p_h and p_c by the same flux.
//!
//! The steady currents are J_α = ω_α K with signs (J_w, J_h, J_c) =
//! (+ω_w K, −ω_h K, +ω̃_c K), and solving the 2×2 system exactly gives
//!
//! ```text
//!        c² s² Γ_w Γ_h Γ_c (e^{ω_h/T_h} − e^{ω̃_c/T_c})
//! K = ───────────────────────────────────────────────────────────────
//!     c² Γ_c Γ_h (1 + e^{ω̃_c/T_c})(1 + e^{ω_h/T_h})
//!       + s² Γ_w [Γ_c e^{ω_h/T_h}(1 + e^{ω̃_c/T_c}) + Γ_h e^{ω̃_c/T_c}(1 + e^{ω_h/T_h})]
//! ```
//!
//! K > 0 (cooling) exactly when ω̃_c/T_c < ω_h/T_h, the T_w → ∞ edge of the
//! cooling window.

use std::f64::consts::PI;

use crate::config::{BathRole, MediumVariant, ValidatedConfig};
use crate::medium::dressed_frequencies;
use crate::spectra::bose_occupation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams {
    pub gamma_w: f64,
    pub gamma_h: f64,
    pub gamma_c: f64,
    pub c2: f64,
    pub s2: f64,
    pub t_h: f64,
    pub t_c: f64,
    pub omega_h: f64,
    pub omega_c_dressed: f64,
    pub omega_w: f64,
}

impl RateParams {
    /// Rates from frequencies, couplings and temperatures `[T_w, T_h, T_c]`.
    pub fn new(omega_h: f64, omega_c: f64, g: f64, kappas: [f64; 3], temps: [f64; 3]) -> Self {
        let f = dressed_frequencies(MediumVariant::Tls, omega_c, g);
        let wc = f.omega_b_dressed;
        let ww = omega_h - wc;
        let gamma = |w: f64, k: f64, t: f64| w * k * bose_occupation(w, t).expect("positive frequency and temperature");
        RateParams {
            gamma_w: gamma(ww, kappas[0], temps[0]),
            gamma_h: gamma(omega_h, kappas[1], temps[1]),
            gamma_c: gamma(wc, kappas[2], temps[2]),
            c2: f.c2,
            s2: f.s2,
            t_h: temps[1],
            t_c: temps[2],
            omega_h,
            omega_c_dressed: wc,
            omega_w: ww,
        }
    }

    pub fn from_config(config: &ValidatedConfig) -> Self {
        let b = &config.baths;
        Self::new(
            config.omega_a,
            config.omega_b,
            config.g,
            [b.work.kappa, b.hot.kappa, b.cold.kappa],
            config.temperatures(),
        )
    }

    fn x_h(&self) -> f64 {
        (-self.omega_h / self.t_h).exp()
    }

    fn x_c(&self) -> f64 {
        (-self.omega_c_dressed / self.t_c).exp()
    }
}

/// Time derivatives (ṗ_h, ṗ_c).
pub fn rate_odes(p: &RateParams, (ph, pc): (f64, f64)) -> (f64, f64) {
    let (xh, xc) = (p.x_h(), p.x_c());
    let w = p.s2 * p.gamma_w;
    let dh = -p.c2 * p.gamma_h * (1.0 + xh) * ph + p.c2 * p.gamma_h * xh + w * (pc - ph);
    let dc = -p.c2 * p.gamma_c * (1.0 + xc) * pc + p.c2 * p.gamma_c * xc + w * (ph - pc);
    (dh, dc)
}

/// Stationary (p_h, p_c) from the 2×2 linear system.
pub fn fixed_point(p: &RateParams) -> (f64, f64) {
    let (xh, xc) = (p.x_h(), p.x_c());
    let w = p.s2 * p.gamma_w;
    let a = [[p.c2 * p.gamma_h * (1.0 + xh) + w, -w], [-w, p.c2 * p.gamma_c * (1.0 + xc) + w]];
    let rhs = [p.c2 * p.gamma_h * xh, p.c2 * p.gamma_c * xc];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    ((rhs[0] * a[1][1] - a[0][1] * rhs[1]) / det, (a[0][0] * rhs[1] - a[1][0] * rhs[0]) / det)
}

/// Integrates the rate equations with classical RK4 from `start` until the
/// state moves by less than `tol` over one relaxation time.
pub fn integrate_to_steady(p: &RateParams, start: (f64, f64), tol: f64) -> (f64, f64) {
    let (xh, xc) = (p.x_h(), p.x_c());
    let w = p.s2 * p.gamma_w;
    let fastest = (p.c2 * p.gamma_h * (1.0 + xh) + 2.0 * w).max(p.c2 * p.gamma_c * (1.0 + xc) + 2.0 * w);
    let slowest = (p.c2 * p.gamma_h * (1.0 + xh)).min(p.c2 * p.gamma_c * (1.0 + xc)).max(1e-300);
    let dt = 0.2 / fastest;
    let steps_per_check = ((1.0 / slowest) / dt).ceil().max(1.0) as usize;
    let mut y = start;
    let f = |y: (f64, f64)| rate_odes(p, y);
    for _ in 0..10_000 {
        let before = y;
        for _ in 0..steps_per_check {
            let k1 = f(y);
            let k2 = f((y.0 + 0.5 * dt * k1.0, y.1 + 0.5 * dt * k1.1));
            let k3 = f((y.0 + 0.5 * dt * k2.0, y.1 + 0.5 * dt * k2.1));
            let k4 = f((y.0 + dt * k3.0, y.1 + dt * k3.1));
            y.0 += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            y.1 += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        if (y.0 - before.0).abs().max((y.1 - before.1).abs()) < tol {
            break;
        }
    }
    y
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticCurrents {
    pub k: f64,
    pub j_w: f64,
    pub j_h: f64,
    pub j_c: f64,
}

/// The closed-form K and the currents it implies.
pub fn analytic_currents(p: &RateParams) -> AnalyticCurrents {
    let eh = (p.omega_h / p.t_h).exp();
    let ec = (p.omega_c_dressed / p.t_c).exp();
    let (gw, gh, gc) = (p.gamma_w, p.gamma_h, p.gamma_c);
    let num = p.c2 * p.s2 * gw * gh * gc * (eh - ec);
    let den = p.c2 * gc * gh * (1.0 + ec) * (1.0 + eh) + p.s2 * gw * (gc * eh * (1.0 + ec) + gh * ec * (1.0 + eh));
    let k = num / den;
    AnalyticCurrents { k, j_w: p.omega_w * k, j_h: -p.omega_h * k, j_c: p.omega_c_dressed * k }
}

/// K = s²Γ_w (p_c − p_h) from a pair of populations.
pub fn k_from_populations(p: &RateParams, (ph, pc): (f64, f64)) -> f64 {
    p.s2 * p.gamma_w * (pc - ph)
}

/// Rewrites the κ's of an ideal two-qubit configuration so that the master
/// equation's emission rate on each bath's transition equals the oracle's
/// Γ_α: 2πκ' ω (1 + n̄) e^{−ω/ω_ct} = ω κ n̄, i.e.
/// κ' = κ n̄ e^{ω/ω_ct} / (2π (1 + n̄)).
pub fn numeric_equivalent(config: &ValidatedConfig) -> ValidatedConfig {
    let p = RateParams::from_config(config);
    let freq = |role: BathRole| match role {
        BathRole::Work => p.omega_w,
        BathRole::Hot => p.omega_h,
        BathRole::Cold => p.omega_c_dressed,
    };
    config
        .modify(|c| {
            for role in BathRole::ALL {
                let w = freq(role);
                let spec = c.baths.get_mut(role);
                let n = bose_occupation(w, spec.temperature).expect("positive frequency");
                spec.kappa = spec.kappa * n * (w / spec.cutoff()).exp() / (2.0 * PI * (1.0 + n));
            }
        })
        .expect("rescaling κ keeps the configuration valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(gamma_w: f64) -> RateParams {
        let mut p = RateParams::new(1.0, 0.1, 0.02, [0.005; 3], [1e4, 2.0, 1.0]);
        p.gamma_w = gamma_w;
        p
    }

    #[test]
    fn uncoupled_qubits_thermalize() {
        let p = params(0.0);
        let (ph, pc) = fixed_point(&p);
        let xh = (-1.0f64 / 2.0).exp();
        assert!((ph - xh / (1.0 + xh)).abs() < 1e-15);
        let xc = (-p.omega_c_dressed).exp();
        assert!((pc - xc / (1.0 + xc)).abs() < 1e-15);
    }

    #[test]
    fn linear_solve_and_time_integration_agree() {
        for gw in [1e-4, 1e-2, 1.0, 50.0] {
            let p = params(gw);
            let fp = fixed_point(&p);
            let ti = integrate_to_steady(&p, (0.0, 0.0), 1e-14);
            assert!((fp.0 - ti.0).abs() < 1e-10 && (fp.1 - ti.1).abs() < 1e-10, "Γ_w={gw}: {fp:?} vs {ti:?}");
            let d = rate_odes(&p, fp);
            assert!(d.0.abs() < 1e-15 && d.1.abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_matches_rate_equations() {
        for gw in [1e-4, 1e-2, 1.0] {
            let p = params(gw);
            let k = analytic_currents(&p).k;
            let k_direct = k_from_populations(&p, fixed_point(&p));
            assert!((k - k_direct).abs() <= 1e-12 * k.abs(), "{k} vs {k_direct}");
        }
    }

    #[test]
    fn first_law_holds_identically() {
        let a = analytic_currents(&params(0.3));
        assert!((a.j_w + a.j_h + a.j_c).abs() <= 1e-15 * a.j_h.abs());
    }

    #[test]
    fn currents_scale_with_frequencies() {
        let p = params(0.3);
        let a = analytic_currents(&p);
        assert!((a.j_c / a.j_w - p.omega_c_dressed / p.omega_w).abs() < 1e-14);
        assert!((a.j_h / a.j_w + p.omega_h / p.omega_w).abs() < 1e-14);
    }

    #[test]
    fn k_vanishes_when_boltzmann_factors_match() {
        // ω_h/T_h = ω̃_c/T_c
        let mut p = params(0.3);
        p.t_c = p.t_h * p.omega_c_dressed / p.omega_h;
        assert!(analytic_currents(&p).k.abs() < 1e-18);
        // a colder cold bath is past the cooling edge
        p.t_c *= 0.9;
        assert!(analytic_currents(&p).k < 0.0);
        p.t_c *= 1.5;
        assert!(analytic_currents(&p).k > 0.0);
    }
}
