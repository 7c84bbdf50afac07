// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Steady-state thermodynamics: heat currents, first and second laws, COP,
//! the Carnot bound, the cooling window and cycle entropies.
//!
//! Heat flowing *into* the working medium is positive.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;
use twofloat::TwoFloat;

use crate::config::{BathRole, MediumVariant, Topology, ValidatedConfig};
use crate::liouvillian::{self, adjoint_action, LiouvillianError, LiouvillianSet, C64};
use crate::medium::{self, DressedSystem};
use crate::steady::{self, Method, SolverError, SteadyState};

/// Population allowed in the two highest retained levels of an oscillator.
pub const TAIL_TOLERANCE: f64 = 1e-8;
/// Largest number of levels per oscillator mode.
pub const MAX_MODE_TRUNCATION: usize = 4000;
/// Largest total Hilbert dimension the adaptive loop will reach.
pub const MAX_TOTAL_DIMENSION: usize = 250_000;
/// `g ≤ WEAK_COUPLING_RATIO · ω_B` marks the oscillator media as weakly coupled.
pub const WEAK_COUPLING_RATIO: f64 = 0.1;
/// Relative size, against the gross energy flux, below which currents are
/// indistinguishable from zero.
pub const CURRENT_RESOLUTION: f64 = 16.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("TemperatureOrderViolation: need T_w > T_h > T_c > 0, got ({0}, {1}, {2})")]
    TemperatureOrderViolation(f64, f64, f64),
    #[error("NotRefrigerating: cooling flags not satisfied (J_w={j_w:e}, J_h={j_h:e}, J_c={j_c:e})")]
    NotRefrigerating { j_w: f64, j_h: f64, j_c: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Liouvillian(#[from] LiouvillianError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct Currents {
    pub work: f64,
    pub hot: f64,
    pub cold: f64,
}

impl Currents {
    pub fn get(&self, role: BathRole) -> f64 {
        match role {
            BathRole::Work => self.work,
            BathRole::Hot => self.hot,
            BathRole::Cold => self.cold,
        }
    }

    fn get_mut(&mut self, role: BathRole) -> &mut f64 {
        match role {
            BathRole::Work => &mut self.work,
            BathRole::Hot => &mut self.hot,
            BathRole::Cold => &mut self.cold,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.work.abs().max(self.hot.abs()).max(self.cold.abs())
    }

    /// |ΣJ| / max|J| (0 when every current vanishes).
    pub fn first_law_residual(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            0.0
        } else {
            (self.work + self.hot + self.cold).abs() / m
        }
    }

    pub fn is_cooling(&self) -> bool {
        self.cold > 0.0 && self.work > 0.0 && self.hot < 0.0
    }
}

/// Per-bath currents from populations, as the sum over channels of net
/// jump flux times the energy it deposits in the system.
pub fn heat_currents(l: &LiouvillianSet, populations: &[f64]) -> Currents {
    let dd: Vec<TwoFloat> = populations.iter().map(|&p| TwoFloat::from(p)).collect();
    heat_currents_dd(l, &dd)
}

/// [`heat_currents`] on double-double populations. Net fluxes are formed
/// from the same f64 rates the population solve saw, and accumulated
/// without rounding, so the first law survives currents that are many
/// orders of magnitude below the gross jump fluxes.
///
/// The rates themselves are only f64-accurate, so when every current is
/// below [`CURRENT_RESOLUTION`] times the gross energy flux the machine is
/// at equilibrium to within what the rates resolve, and all currents are
/// reported as zero.
pub fn heat_currents_dd(l: &LiouvillianSet, populations: &[TwoFloat]) -> Currents {
    let zero = TwoFloat::from(0.0);
    let mut acc = [zero; 3];
    let mut gross = 0.0f64;
    // Channels come in (lowering, raising) pairs with mirrored entries.
    for pair in l.channels.chunks(2) {
        let [down, up] = pair else { continue };
        let slot = BathRole::ALL.iter().position(|&b| b == down.bath).expect("bath role");
        for (&(to, from, amp), _) in down.entries.iter().zip(&up.entries) {
            // `down` moves from → to releasing `bohr`; `up` is the reverse.
            // Rates are rounded exactly as in the population graph.
            let (r_up, r_down) = (up.rate * amp * amp, down.rate * amp * amp);
            let (inward, outward) = (populations[to] * r_up, populations[from] * r_down);
            gross += (inward.hi() + outward.hi()) * down.bohr.abs();
            acc[slot] += (inward - outward) * down.bohr;
        }
    }
    let mut j = Currents::default();
    if acc.iter().all(|a| a.hi().abs() <= CURRENT_RESOLUTION * gross) {
        return j;
    }
    for (role, a) in BathRole::ALL.iter().zip(acc) {
        *j.get_mut(*role) = a.hi();
    }
    j
}

/// J_α = Tr{(L_α ρ) H} from a dense density matrix.
pub fn heat_currents_dense(l: &LiouvillianSet, rho: &DMatrix<C64>) -> Result<Currents, LiouvillianError> {
    let d = l.dim;
    let h = DMatrix::from_fn(d, d, |i, k| if i == k { C64::new(l.energies[i], 0.0) } else { C64::new(0.0, 0.0) });
    let mut j = Currents::default();
    for role in BathRole::ALL {
        let sup = l.superoperator(Some(role))?;
        // Tr{L(ρ) H} = Tr{ρ L†(H)}
        let lh = adjoint_action(&sup, &h);
        *j.get_mut(role) = (rho * lh).trace().re;
    }
    Ok(j)
}

pub fn carnot_cop(t_w: f64, t_h: f64, t_c: f64) -> Result<f64, ThermoError> {
    if !(t_w > t_h && t_h > t_c && t_c > 0.0) {
        return Err(ThermoError::TemperatureOrderViolation(t_w, t_h, t_c));
    }
    Ok((t_w - t_h) * t_c / ((t_h - t_c) * t_w))
}

/// Largest dressed cold frequency that still cools, ε_c·ω_w, evaluated at
/// the resonance ω_h = ω̃_c + ω_w: ε_c/(1 + ε_c)·ω_h.
pub fn cooling_window(config: &ValidatedConfig) -> Result<f64, ThermoError> {
    let [tw, th, tc] = config.temperatures();
    let ec = carnot_cop(tw, th, tc)?;
    Ok(ec / (1.0 + ec) * config.omega_a)
}

/// Raman cycles of the two-qubit medium, named by their level sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cycle {
    Cooling4324,
    Cooling3213,
    Heating4234,
    Heating3123,
}

/// Entropy produced in the baths by one completed cycle.
pub fn cycle_entropy(omega_h: f64, omega_c_dressed: f64, omega_w: f64, temps: [f64; 3], cycle: Cycle) -> f64 {
    let [tw, th, tc] = temps;
    let cooling = -omega_c_dressed / tc - omega_w / tw + omega_h / th;
    match cycle {
        Cycle::Cooling4324 | Cycle::Cooling3213 => cooling,
        Cycle::Heating4234 | Cycle::Heating3123 => -cooling,
    }
}

/// σ = −Σ J_α / T_α.
pub fn entropy_production(currents: &Currents, temps: [f64; 3]) -> f64 {
    -(currents.work / temps[0] + currents.hot / temps[1] + currents.cold / temps[2])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopEntropy {
    pub cop: f64,
    pub cop_ratio: f64,
    pub sigma: f64,
}

pub fn cop_and_entropy(currents: &Currents, temps: [f64; 3]) -> Result<CopEntropy, ThermoError> {
    if !currents.is_cooling() {
        return Err(ThermoError::NotRefrigerating { j_w: currents.work, j_h: currents.hot, j_c: currents.cold });
    }
    let ec = carnot_cop(temps[0], temps[1], temps[2])?;
    let cop = currents.cold / currents.work;
    Ok(CopEntropy { cop, cop_ratio: cop / ec, sigma: entropy_production(currents, temps) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct Flags {
    pub cooling: bool,
    pub degenerate_nullspace: bool,
    pub truncation_warning: bool,
    pub weak_coupling_valid: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyStateReport {
    pub config_hash: String,
    pub medium: MediumVariant,
    pub topology: Topology,
    pub omega_a: f64,
    pub omega_b: f64,
    pub g: f64,
    pub omega_b_dressed: f64,
    pub dim_a: usize,
    pub dim_b: usize,
    pub temperatures: [f64; 3],
    pub currents: Currents,
    pub sigma: f64,
    pub cop: Option<f64>,
    pub cop_ratio: Option<f64>,
    pub carnot: f64,
    pub first_law_residual: f64,
    pub solver_residual: f64,
    pub cross_check: Option<f64>,
    /// Population in the two highest levels of modes A and B.
    pub tail_population: [f64; 2],
    pub flags: Flags,
    pub populations: Vec<f64>,
    #[serde(skip)]
    pub rho: Option<DMatrix<C64>>,
}

pub const REPORT_CSV_HEADER: &str = "config_hash,medium,topology,omega_a,omega_b,g,omega_b_dressed,dim_a,dim_b,T_w,T_h,T_c,J_w,J_h,J_c,sigma,cop,cop_ratio,carnot,first_law_residual,solver_residual,cooling,degenerate_nullspace,truncation_warning,weak_coupling_valid";

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| format!("{v:e}"))
}

impl SteadyStateReport {
    pub fn j_c(&self) -> f64 {
        self.currents.cold
    }

    pub fn csv_row(&self) -> String {
        let t = self.temperatures;
        let c = &self.currents;
        let f = &self.flags;
        format!(
            "{},{},{},{:e},{:e},{:e},{:e},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{},{:e},{:e},{:e},{},{},{},{}",
            self.config_hash,
            self.medium,
            self.topology.name(),
            self.omega_a,
            self.omega_b,
            self.g,
            self.omega_b_dressed,
            self.dim_a,
            self.dim_b,
            t[0],
            t[1],
            t[2],
            c.work,
            c.hot,
            c.cold,
            self.sigma,
            opt(self.cop),
            opt(self.cop_ratio),
            self.carnot,
            self.first_law_residual,
            self.solver_residual,
            f.cooling,
            f.degenerate_nullspace,
            f.truncation_warning,
            f.weak_coupling_valid
        )
    }

    /// Dense steady state (diagonal unless the full path ran).
    pub fn density_matrix(&self) -> DMatrix<C64> {
        self.rho.clone().unwrap_or_else(|| {
            let d = self.populations.len();
            DMatrix::from_fn(d, d, |i, j| if i == j { C64::new(self.populations[i], 0.0) } else { C64::new(0.0, 0.0) })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub method: Method,
    /// Grow oscillator truncations until the tail population is below
    /// [`TAIL_TOLERANCE`] (only when the medium allows it).
    pub adaptive: bool,
    /// Count the Liouvillian nullspace by SVD (small d only).
    pub audit_nullspace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { method: Method::Auto, adaptive: true, audit_nullspace: false }
    }
}

/// Population held by the two highest levels of each truncated oscillator.
pub fn tail_population(dressed: &DressedSystem, populations: &[f64]) -> (f64, f64) {
    let (mut ta, mut tb) = (0.0, 0.0);
    for (idx, &p) in populations.iter().enumerate() {
        let (n, m) = dressed.quantum_numbers(idx);
        if n + 2 >= dressed.dim_a {
            ta += p;
        }
        if m + 2 >= dressed.dim_b {
            tb += p;
        }
    }
    let a = if dressed.variant == MediumVariant::Oms { ta } else { 0.0 };
    let b = if dressed.variant == MediumVariant::Tls { 0.0 } else { tb };
    (a, b)
}

fn grow(dim: usize) -> usize {
    (dim + (dim / 2).max(4)).min(MAX_MODE_TRUNCATION)
}

/// Solves one configuration at fixed truncation.
pub fn solve_at(config: &ValidatedConfig, dim_a: usize, dim_b: usize, options: SolveOptions) -> Result<SteadyStateReport, SolveError> {
    let dressed = medium::build_with_truncation(config, dim_a, dim_b);
    let l = liouvillian::assemble(config, &dressed)?;
    let order = steady::product_order(dressed.dim_a, dressed.dim_b);
    let ss = steady::steady_state_with(&l, options.method, Some(&order))?;
    let mut report = build_report(config, &dressed, &l, &ss);
    if options.audit_nullspace && l.dim <= liouvillian::DENSE_SUPEROPERATOR_LIMIT {
        report.flags.degenerate_nullspace = steady::nullspace_dimension(&l, 1e-12)? > 1;
    }
    Ok(report)
}

/// Builds, assembles and solves one configuration, growing oscillator
/// truncations when the medium asks for it.
pub fn solve(config: &ValidatedConfig) -> Result<SteadyStateReport, SolveError> {
    solve_with(config, SolveOptions::default())
}

pub fn solve_with(config: &ValidatedConfig, options: SolveOptions) -> Result<SteadyStateReport, SolveError> {
    let (mut da, mut db) = (config.medium.truncation_a, config.medium.truncation_b);
    loop {
        let report = solve_at(config, da, db, options)?;
        if !(options.adaptive && config.medium.auto_truncation) {
            return Ok(report);
        }
        let dressed_variant = config.medium.variant;
        let [ta, tb] = report.tail_population;
        let mut nda = da;
        let mut ndb = db;
        if dressed_variant == MediumVariant::Oms && ta > TAIL_TOLERANCE {
            nda = grow(da);
        }
        if tb > TAIL_TOLERANCE {
            ndb = grow(db);
        }
        let stuck = (nda, ndb) == (da, db) || nda * ndb > MAX_TOTAL_DIMENSION;
        if ta.max(tb) <= TAIL_TOLERANCE || stuck {
            return Ok(report);
        }
        da = nda;
        db = ndb;
    }
}

fn build_report(config: &ValidatedConfig, dressed: &DressedSystem, l: &LiouvillianSet, ss: &SteadyState) -> SteadyStateReport {
    let temps = config.temperatures();
    let currents = heat_currents_dd(l, &ss.populations_dd);
    let sigma = entropy_production(&currents, temps);
    let carnot = carnot_cop(temps[0], temps[1], temps[2]).unwrap_or(f64::NAN);
    let ce = cop_and_entropy(&currents, temps).ok();
    let (ta, tb) = tail_population(dressed, &ss.populations);
    let weak = match config.medium.variant {
        MediumVariant::Tls => true,
        _ => config.g <= WEAK_COUPLING_RATIO * config.omega_b,
    };
    SteadyStateReport {
        config_hash: config.hash(),
        medium: config.medium.variant,
        topology: config.topology,
        omega_a: config.omega_a,
        omega_b: config.omega_b,
        g: config.g,
        omega_b_dressed: dressed.frequencies.omega_b_dressed,
        dim_a: dressed.dim_a,
        dim_b: dressed.dim_b,
        temperatures: temps,
        currents,
        sigma,
        cop: ce.map(|c| c.cop),
        cop_ratio: ce.map(|c| c.cop_ratio),
        carnot,
        first_law_residual: currents.first_law_residual(),
        solver_residual: ss.residual,
        cross_check: ss.cross_check,
        tail_population: [ta, tb],
        flags: Flags {
            cooling: currents.is_cooling(),
            degenerate_nullspace: false,
            truncation_warning: ta.max(tb) > TAIL_TOLERANCE,
            weak_coupling_valid: weak,
        },
        populations: ss.populations.clone(),
        rho: ss.rho.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{validate, validate_with, MediumKind, SystemConfig, ValidationOptions};

    fn equal_temperature(medium: MediumKind, t: f64) -> ValidatedConfig {
        let c = SystemConfig::standard(medium, 0.1, 0.005, [t; 3], 0.005);
        validate_with(c, ValidationOptions { allow_equal_temperatures: true }).unwrap()
    }

    #[test]
    fn equal_temperatures_give_the_gibbs_state() {
        for medium in [MediumKind::tls(), MediumKind::tlos(), MediumKind::oms()] {
            let t = 0.3;
            let cfg = equal_temperature(medium, t);
            let r = solve(&cfg).unwrap();
            let dressed = medium::build_with_truncation(&cfg, r.dim_a, r.dim_b);
            let e0 = dressed.energies.iter().copied().fold(f64::INFINITY, f64::min);
            let w: Vec<f64> = dressed.energies.iter().map(|e| (-(e - e0) / t).exp()).collect();
            let z: f64 = w.iter().sum();
            for (p, wi) in r.populations.iter().zip(&w) {
                assert!((p - wi / z).abs() < 1e-10, "{:?}", medium.variant);
            }
            assert!(r.currents.max_abs() < 1e-15, "{:?}", r.currents);
            assert!(!r.flags.cooling && r.cop.is_none());
        }
    }

    #[test]
    fn uncoupled_qubit_occupation_is_fermi_dirac() {
        // g = 0: subsystem B only sees the cold bath
        let cfg = validate(SystemConfig::standard(MediumKind::tls(), 0.2, 0.0, [3.0, 2.0, 1.0], 0.005)).unwrap();
        let r = solve(&cfg).unwrap();
        let p_b: f64 = r.populations.iter().enumerate().filter(|(i, _)| i % 2 == 1).map(|(_, p)| p).sum();
        assert!((p_b - 1.0 / (1.0 + (0.2f64).exp())).abs() < 1e-12);
        assert!(r.currents.cold.abs() < 1e-18);
    }

    #[test]
    fn flux_and_dense_currents_agree() {
        for (medium, g) in [(MediumKind::tls(), 0.05), (MediumKind::fixed(MediumVariant::Tlos, 2, 5), 0.01)] {
            let cfg = validate(SystemConfig::standard(medium, 0.1, g, [3.0, 2.0, 1.0], 0.005)).unwrap();
            let dressed = medium::build(&cfg);
            let l = liouvillian::assemble(&cfg, &dressed).unwrap();
            let ss = steady::steady_state_with(&l, Method::Full, None).unwrap();
            let a = heat_currents(&l, &ss.populations);
            let b = heat_currents_dense(&l, ss.rho.as_ref().unwrap()).unwrap();
            for role in BathRole::ALL {
                assert!((a.get(role) - b.get(role)).abs() <= 1e-9 * a.max_abs(), "{role}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn carnot_values() {
        assert!((carnot_cop(3.0, 2.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((carnot_cop(0.75, 0.5, 0.125).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!((carnot_cop(10.0, 6.0, 5.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(carnot_cop(2.0, 2.0, 1.0), Err(ThermoError::TemperatureOrderViolation(..))));
    }

    #[test]
    fn cooling_window_values() {
        let cfg = |t| validate(SystemConfig::standard(MediumKind::tls(), 0.1, 0.01, t, 0.005)).unwrap();
        assert!((cooling_window(&cfg([3.0, 2.0, 1.0])).unwrap() - 0.25).abs() < 1e-15);
        assert!((cooling_window(&cfg([0.75, 0.5, 0.125])).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn cycle_entropy_signs() {
        let temps = [3.0, 2.0, 1.0];
        // inside the window the cooling cycles produce entropy
        let (wh, wc) = (1.0, 0.2);
        let s = cycle_entropy(wh, wc, wh - wc, temps, Cycle::Cooling4324);
        assert!(s > 0.0);
        assert_eq!(s, cycle_entropy(wh, wc, wh - wc, temps, Cycle::Cooling3213));
        assert_eq!(-s, cycle_entropy(wh, wc, wh - wc, temps, Cycle::Heating4234));
        // at the window edge the cycle is reversible
        let edge = cycle_entropy(wh, 0.25, 0.75, temps, Cycle::Cooling4324);
        assert!(edge.abs() < 1e-15);
        assert!(cycle_entropy(wh, 0.3, 0.7, temps, Cycle::Cooling3213) < 0.0);
    }

    #[test]
    fn cop_needs_refrigeration() {
        let off = Currents { work: 1.0, hot: -0.5, cold: -0.5 };
        assert!(matches!(cop_and_entropy(&off, [3.0, 2.0, 1.0]), Err(ThermoError::NotRefrigerating { .. })));
        let on = Currents { work: 0.8, hot: -1.0, cold: 0.2 };
        let ce = cop_and_entropy(&on, [3.0, 2.0, 1.0]).unwrap();
        assert!((ce.cop - 0.25).abs() < 1e-15 && (ce.cop_ratio - 0.75).abs() < 1e-15);
        assert!((ce.sigma - (-(0.8 / 3.0) + 0.5 - 0.2)).abs() < 1e-15);
    }

    #[test]
    fn ideal_tls_currents_follow_frequencies() {
        let cfg = validate(SystemConfig::standard(MediumKind::tls(), 0.1, 0.07, [3.0, 2.0, 1.0], 0.005)).unwrap();
        let r = solve(&cfg).unwrap();
        let wc = r.omega_b_dressed;
        assert!((r.currents.cold / r.currents.work - wc / (1.0 - wc)).abs() < 1e-9);
        assert!((r.currents.hot / r.currents.work + 1.0 / (1.0 - wc)).abs() < 1e-9);
        assert!((r.cop.unwrap() - wc / (1.0 - wc)).abs() < 1e-9);
    }

    #[test]
    fn adaptive_truncation_grows_until_the_tail_is_small() {
        // hot cold bath: the oscillator needs more than the starting levels
        let mut c = SystemConfig::standard(MediumKind::fixed(MediumVariant::Tlos, 2, 4), 0.1, 0.005, [3.0, 2.0, 1.0], 0.005);
        c.medium.auto_truncation = true;
        let cfg = validate(c).unwrap();
        let r = solve(&cfg).unwrap();
        assert!(r.dim_b > 4 && r.tail_population[1] <= TAIL_TOLERANCE && !r.flags.truncation_warning);
        let fixed = solve_with(&cfg, SolveOptions { adaptive: false, ..Default::default() }).unwrap();
        assert!(fixed.dim_b == 4 && fixed.flags.truncation_warning);
    }
}
