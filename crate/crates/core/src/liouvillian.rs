// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Global master equation assembly.
//!
//! Every labeled jump operator is split into Bohr-frequency components
//! (one component per distinct energy gap) and each component becomes a
//! Lindblad channel with rate `weight × G_α(ω)`. Because each component
//! moves every basis state to at most one other basis state, populations
//! and coherences evolve independently: the population sector is a
//! classical rate matrix, which [`LiouvillianSet::population_rates`]
//! exposes for the fast steady-state path.

use nalgebra::{Complex, DMatrix};
use thiserror::Error;

use crate::config::{BathRole, Gating, Interval, LeakTarget, Topology, ValidatedConfig, Windows};
use crate::medium::{DressedSystem, Family, OpLabel};
use crate::spectra::{BathResponse, SpectraError};

pub type C64 = Complex<f64>;

/// Largest Hilbert dimension for which dense d²×d² superoperators are built.
pub const DENSE_SUPEROPERATOR_LIMIT: usize = 40;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiouvillianError {
    #[error("NegativeRate: dissipator rate {0} is negative")]
    NegativeRate(f64),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error("dense superoperator requested for dimension {0} (limit {DENSE_SUPEROPERATOR_LIMIT})")]
    TooLarge(usize),
}

/// One Lindblad channel: a Bohr-frequency component of a labeled operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub bath: BathRole,
    pub label: OpLabel,
    pub family: Family,
    /// Energy released to the bath per jump (negative for absorption).
    pub bohr: f64,
    pub weight: f64,
    pub response: f64,
    pub rate: f64,
    /// Added only because of a configured heat leak.
    pub parasitic: bool,
    /// Sparse `(row, col, amplitude)` entries.
    pub entries: Vec<(usize, usize, f64)>,
}

/// Assembled master equation for one configuration.
#[derive(Debug, Clone)]
pub struct LiouvillianSet {
    pub dim: usize,
    pub energies: Vec<f64>,
    pub channels: Vec<Channel>,
    pub temperatures: [(BathRole, f64); 3],
    /// Resolved coupling windows per bath (`None` = full axis).
    pub windows: Vec<(BathRole, Option<Vec<Interval>>)>,
}

/// Ledger row for CSV export.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    pub bath: BathRole,
    pub label: OpLabel,
    pub family: Family,
    pub bohr: f64,
    pub weight: f64,
    pub response: f64,
    pub rate: f64,
    pub parasitic: bool,
}

pub const LEDGER_HEADER: &str = "bath,operator,family,bohr,weight,response,rate,parasitic";

impl LedgerRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{:e},{:e},{:e},{:e},{}",
            self.bath,
            self.label,
            self.family.name(),
            self.bohr,
            self.weight,
            self.response,
            self.rate,
            self.parasitic
        )
    }
}

/// Matrix of ρ ↦ rate (o ρ o† − ½{o†o, ρ}) acting on column-stacked ρ.
pub fn dissipator(o: &DMatrix<C64>, rate: f64) -> Result<DMatrix<C64>, LiouvillianError> {
    if rate < 0.0 {
        return Err(LiouvillianError::NegativeRate(rate));
    }
    let d = o.nrows();
    let id = DMatrix::<C64>::identity(d, d);
    let odo = o.adjoint() * o;
    // vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)
    let jump = o.conjugate().kronecker(o);
    let left = id.kronecker(&odo);
    let right = odo.transpose().kronecker(&id);
    let half = C64::new(0.5, 0.0);
    Ok((jump - (left + right) * half) * C64::new(rate, 0.0))
}

/// Adjoint (Heisenberg) action of a superoperator on an operator.
pub fn adjoint_action(superop: &DMatrix<C64>, x: &DMatrix<C64>) -> DMatrix<C64> {
    let d = x.nrows();
    let v = nalgebra::DVector::from_column_slice(x.as_slice());
    let out = superop.adjoint() * v;
    DMatrix::from_column_slice(d, d, out.as_slice())
}

fn to_complex(entries: &[(usize, usize, f64)], dim: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(dim, dim);
    for &(r, c, v) in entries {
        m[(r, c)] += C64::new(v, 0.0);
    }
    m
}

impl LiouvillianSet {
    pub fn temperature(&self, role: BathRole) -> f64 {
        self.temperatures.iter().find(|(r, _)| *r == role).map(|t| t.1).unwrap_or(f64::NAN)
    }

    pub fn ledger(&self) -> Vec<LedgerRow> {
        self.channels
            .iter()
            .map(|c| LedgerRow {
                bath: c.bath,
                label: c.label,
                family: c.family,
                bohr: c.bohr,
                weight: c.weight,
                response: c.response,
                rate: c.rate,
                parasitic: c.parasitic,
            })
            .collect()
    }

    pub fn ledger_csv(&self) -> String {
        let mut s = String::from(LEDGER_HEADER);
        s.push('\n');
        for row in self.ledger() {
            s.push_str(&row.csv());
            s.push('\n');
        }
        s
    }

    /// Dense superoperator of one bath's block, or of the total when `bath`
    /// is `None`.
    pub fn superoperator(&self, bath: Option<BathRole>) -> Result<DMatrix<C64>, LiouvillianError> {
        if self.dim > DENSE_SUPEROPERATOR_LIMIT {
            return Err(LiouvillianError::TooLarge(self.dim));
        }
        let n = self.dim * self.dim;
        let mut total = DMatrix::<C64>::zeros(n, n);
        for ch in self.channels.iter().filter(|c| bath.is_none_or(|b| c.bath == b)) {
            if ch.rate == 0.0 {
                continue;
            }
            total += dissipator(&to_complex(&ch.entries, self.dim), ch.rate)?;
        }
        Ok(total)
    }

    /// Population-sector transitions `(from, to, rate)` with positive rate,
    /// optionally restricted to one bath.
    pub fn population_rates(&self, bath: Option<BathRole>) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for ch in self.channels.iter().filter(|c| bath.is_none_or(|b| c.bath == b)) {
            if ch.rate <= 0.0 {
                continue;
            }
            for &(to, from, amp) in &ch.entries {
                if to != from {
                    out.push((from, to, ch.rate * amp * amp));
                }
            }
        }
        out
    }

    /// Scales every rate of one bath's channels (used by oracle mappings).
    pub fn channels_of(&self, bath: BathRole) -> impl Iterator<Item = &Channel> {
        self.channels.iter().filter(move |c| c.bath == bath)
    }
}

/// Which families a bath may couple through, given the topology.
fn families_for(topology: Topology, role: BathRole) -> &'static [Family] {
    const A_SIDE: &[Family] = &[Family::A, Family::Minus, Family::Plus];
    const B_SIDE: &[Family] = &[Family::B];
    match (topology, role) {
        (Topology::Standard, BathRole::Cold) | (Topology::Swapped, BathRole::Work) => B_SIDE,
        _ => A_SIDE,
    }
}

/// Family each bath targets under the preset (`None` = full axis).
fn target_family(topology: Topology, gating: Gating, role: BathRole) -> Option<Family> {
    match (topology, role) {
        (Topology::Standard, BathRole::Work) => Some(Family::Minus),
        (Topology::Standard, BathRole::Hot) => Some(match gating {
            Gating::Ideal => Family::A,
            Gating::SingleCycle => Family::Plus,
        }),
        (Topology::Standard, BathRole::Cold) => None,
        (Topology::Swapped, BathRole::Cold) => Some(Family::A),
        (Topology::Swapped, BathRole::Hot) => Some(Family::Plus),
        (Topology::Swapped, BathRole::Work) => None,
    }
}

fn leak_family(leak: Option<LeakTarget>, role: BathRole) -> Option<Family> {
    match (leak, role) {
        (Some(LeakTarget::WorkTransition), BathRole::Hot) => Some(Family::Minus),
        (Some(LeakTarget::HotTransition), BathRole::Work) => Some(Family::A),
        _ => None,
    }
}

fn family_label(family: Family) -> OpLabel {
    match family {
        Family::A => OpLabel::A,
        Family::B => OpLabel::B,
        Family::Minus => OpLabel::ABDag,
        Family::Plus => OpLabel::AB,
    }
}

/// Windows around every Bohr frequency of `family`, each reaching halfway
/// to the nearest frequency of another A-side family (and never wider than
/// half the nominal family spacing). Overlapping pieces are merged.
fn auto_windows(dressed: &DressedSystem, family: Family) -> Vec<Interval> {
    let nominal = dressed.nominal();
    let center = nominal.of(family).abs();
    let cap = [Family::A, Family::Minus, Family::Plus]
        .iter()
        .filter(|&&f| f != family)
        .map(|&f| (nominal.of(f).abs() - center).abs())
        .fold(f64::INFINITY, f64::min)
        * 0.5;
    let freqs = |f: Family| -> Vec<f64> { components(dressed, family_label(f)).into_iter().map(|c| c.0.abs()).collect() };
    let others: Vec<f64> = [Family::A, Family::Minus, Family::Plus]
        .iter()
        .filter(|&&f| f != family)
        .flat_map(|&f| freqs(f))
        .collect();
    let mut pieces: Vec<Interval> = freqs(family)
        .into_iter()
        .map(|w| {
            let gap = others.iter().map(|&o| (o - w).abs()).fold(f64::INFINITY, f64::min);
            Interval::around(w, (0.5 * gap).min(cap))
        })
        .collect();
    pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut merged: Vec<Interval> = Vec::new();
    for p in pieces {
        match merged.last_mut() {
            Some(last) if p.lo <= last.hi => last.hi = last.hi.max(p.hi),
            _ => merged.push(p),
        }
    }
    merged
}

fn resolve_windows(config: &ValidatedConfig, dressed: &DressedSystem, role: BathRole) -> Option<Vec<Interval>> {
    let spec = config.baths.get(role);
    let leak = config.leak.map(|l| l.overlap_target);
    match &spec.windows {
        Windows::Full => None,
        Windows::Explicit(ws) => Some(ws.clone()),
        Windows::Auto => {
            // A filtered bath is shaped by its Lorentzian, not by windows.
            if spec.filter.is_some() {
                return None;
            }
            let target = target_family(config.topology, config.gating, role)?;
            let mut ws = auto_windows(dressed, target);
            if let Some(extra) = leak_family(leak, role) {
                ws.extend(auto_windows(dressed, extra));
            }
            ws.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            Some(ws)
        }
    }
}

fn resolve_response(config: &ValidatedConfig, dressed: &DressedSystem, role: BathRole) -> BathResponse {
    let spec = config.baths.get(role).clone();
    let windows = resolve_windows(config, dressed, role);
    let center = spec.filter.as_ref().map(|f| {
        f.center.unwrap_or_else(|| {
            target_family(config.topology, config.gating, role)
                .map(|fam| dressed.nominal().of(fam).abs())
                .unwrap_or(0.0)
        })
    });
    BathResponse::new(spec, windows, center)
}

/// Splits a lowering operator into components of equal Bohr frequency.
fn components(dressed: &DressedSystem, label: OpLabel) -> Vec<(f64, Vec<(usize, usize, f64)>)> {
    let op = dressed.jump_op(label);
    let mut tagged: Vec<(f64, (usize, usize, f64))> = op
        .entries
        .iter()
        .map(|&(to, from, v)| (dressed.energies[from] - dressed.energies[to], (to, from, v)))
        .collect();
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, Vec<(usize, usize, f64)>)> = Vec::new();
    for (w, e) in tagged {
        match out.last_mut() {
            Some((w0, es)) if (w - *w0).abs() <= 1e-12 * w0.abs().max(1.0) => es.push(e),
            _ => out.push((w, vec![e])),
        }
    }
    out
}

fn assemble_inner(
    config: &ValidatedConfig,
    dressed: &DressedSystem,
    topology: Topology,
) -> Result<LiouvillianSet, LiouvillianError> {
    let leak = config.leak.map(|l| l.overlap_target);
    let mut channels = Vec::new();
    let mut windows = Vec::new();
    for role in BathRole::ALL {
        let response = resolve_response(config, dressed, role);
        windows.push((role, response.windows.clone()));
        let parasitic_family = leak_family(leak, role);
        for &family in families_for(topology, role) {
            let weight = dressed.weight(family);
            let label = family_label(family);
            for (bohr, entries) in components(dressed, label) {
                let parasitic = parasitic_family == Some(family);
                let down = response.rate(bohr)?;
                let up = response.rate(-bohr)?;
                channels.push(Channel {
                    bath: role,
                    label,
                    family,
                    bohr,
                    weight,
                    response: down,
                    rate: weight * down,
                    parasitic,
                    entries: entries.clone(),
                });
                channels.push(Channel {
                    bath: role,
                    label: label.adjoint(),
                    family,
                    bohr: -bohr,
                    weight,
                    response: up,
                    rate: weight * up,
                    parasitic,
                    entries: entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
                });
            }
        }
    }
    Ok(LiouvillianSet {
        dim: dressed.dim(),
        energies: dressed.energies.clone(),
        channels,
        temperatures: [
            (BathRole::Work, config.baths.work.temperature),
            (BathRole::Hot, config.baths.hot.temperature),
            (BathRole::Cold, config.baths.cold.temperature),
        ],
        windows,
    })
}

/// Work and hot baths on A (ω_h, ω_w, ω_+ families), cold bath on B.
pub fn assemble_standard(config: &ValidatedConfig, dressed: &DressedSystem) -> Result<LiouvillianSet, LiouvillianError> {
    let mut c = config.clone();
    if c.leak.is_some() {
        c = c.modify(|s| s.leak = None).map_err(|_| LiouvillianError::NegativeRate(f64::NAN))?;
    }
    assemble_inner(&c, dressed, Topology::Standard)
}

/// Hot and cold baths on A (ω_c, ω_−, ω_h families), work bath on B.
pub fn assemble_swapped(config: &ValidatedConfig, dressed: &DressedSystem) -> Result<LiouvillianSet, LiouvillianError> {
    assemble_inner(config, dressed, Topology::Swapped)
}

/// Standard assembly with the configured leak: the leak target is driven
/// additively by both A-side baths and its extra terms are marked parasitic.
pub fn assemble_with_leak(config: &ValidatedConfig, dressed: &DressedSystem) -> Result<LiouvillianSet, LiouvillianError> {
    assemble_inner(config, dressed, Topology::Standard)
}

/// Dispatches on topology and leak.
pub fn assemble(config: &ValidatedConfig, dressed: &DressedSystem) -> Result<LiouvillianSet, LiouvillianError> {
    match (config.topology, config.leak) {
        (Topology::Swapped, _) => assemble_swapped(config, dressed),
        (Topology::Standard, Some(_)) => assemble_with_leak(config, dressed),
        (Topology::Standard, None) => assemble_standard(config, dressed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{validate, LeakSpec, MediumKind, SystemConfig};
    use crate::medium;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sigma_minus() -> DMatrix<C64> {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0);
        m
    }

    #[test]
    fn amplitude_damping_rate() {
        let gamma = 0.3;
        let l = dissipator(&sigma_minus(), gamma).unwrap();
        // ρ = |1⟩⟨1| decays: d ρ11/dt = −γ ρ11
        let rho = [c(0.0), c(0.0), c(0.0), c(1.0)];
        let v = nalgebra::DVector::from_column_slice(&rho);
        let out = &l * v;
        assert!((out[3].re + gamma).abs() < 1e-15);
        assert!((out[0].re - gamma).abs() < 1e-15);
        // eigenvalue −γ on the population difference sector
        let diff = nalgebra::DVector::from_column_slice(&[c(1.0), c(0.0), c(0.0), c(-1.0)]);
        let out = &l * &diff;
        assert!((out[3].re - gamma).abs() < 1e-15);
    }

    #[test]
    fn identity_dissipator_vanishes() {
        let l = dissipator(&DMatrix::identity(3, 3), 1.7).unwrap();
        assert!(l.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn negative_rate_is_rejected() {
        assert_eq!(dissipator(&sigma_minus(), -1.0), Err(LiouvillianError::NegativeRate(-1.0)));
    }

    proptest! {
        #[test]
        fn random_dissipator_is_trace_preserving(entries in prop::collection::vec(-1.0f64..1.0, 32), rate in 0.0f64..3.0) {
            let o = DMatrix::from_fn(4, 4, |i, j| C64::new(entries[i * 4 + j], entries[16 + i * 4 + j]));
            let l = dissipator(&o, rate).unwrap();
            let adj = adjoint_action(&l, &DMatrix::identity(4, 4));
            prop_assert!(adj.iter().all(|z| z.norm() < 1e-12));
        }
    }

    fn tls(omega_c: f64, g: f64) -> (ValidatedConfig, DressedSystem) {
        let cfg = validate(SystemConfig::standard(MediumKind::tls(), omega_c, g, [3.0, 2.0, 1.0], 0.005)).unwrap();
        let d = medium::build(&cfg);
        (cfg, d)
    }

    fn active(set: &LiouvillianSet, bath: BathRole) -> Vec<Family> {
        let mut f: Vec<Family> = set.channels_of(bath).filter(|c| c.rate > 0.0).map(|c| c.family).collect();
        f.sort();
        f.dedup();
        f
    }

    #[test]
    fn ideal_gating_assigns_one_bath_per_transition() {
        let (cfg, d) = tls(0.1, 0.02);
        let set = assemble(&cfg, &d).unwrap();
        assert_eq!(active(&set, BathRole::Work), vec![Family::Minus]);
        assert_eq!(active(&set, BathRole::Hot), vec![Family::A]);
        assert_eq!(active(&set, BathRole::Cold), vec![Family::B]);
        // ω_+ terms are present in the ledger with zero rate for both baths.
        for bath in [BathRole::Work, BathRole::Hot] {
            assert!(set.channels_of(bath).any(|c| c.family == Family::Plus && c.rate == 0.0));
        }
        assert!(set.channels.iter().all(|c| !c.parasitic));
    }

    fn cycle_rank(set: &LiouvillianSet) -> usize {
        // Cycle-space dimension E − V + components of the undirected graph.
        let mut edges: Vec<(usize, usize)> = set
            .population_rates(None)
            .into_iter()
            .map(|(a, b, _)| (a.min(b), a.max(b)))
            .collect();
        edges.sort();
        edges.dedup();
        let n = set.dim;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let mut comps = n;
        for &(a, b) in &edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                comps -= 1;
            }
        }
        edges.len() + comps - n
    }

    #[test]
    fn single_cycle_windows_leave_one_cycle() {
        let (cfg, _) = tls(0.1, 0.02);
        let cfg = cfg.modify(|c| c.gating = Gating::SingleCycle).unwrap();
        let d = medium::build(&cfg);
        let set = assemble(&cfg, &d).unwrap();
        assert_eq!(active(&set, BathRole::Hot), vec![Family::Plus]);
        assert_eq!(cycle_rank(&set), 1);
        let (cfg, d) = tls(0.1, 0.02);
        assert_eq!(cycle_rank(&assemble(&cfg, &d).unwrap()), 2);
    }

    #[test]
    fn leaks_add_parasitic_terms() {
        let (cfg, _) = tls(0.1, 0.04);
        let on_work = cfg.modify(|c| c.leak = Some(LeakSpec { overlap_target: LeakTarget::WorkTransition })).unwrap();
        let d = medium::build(&on_work);
        let set = assemble(&on_work, &d).unwrap();
        assert_eq!(active(&set, BathRole::Hot), vec![Family::A, Family::Minus]);
        assert!(set.channels_of(BathRole::Hot).filter(|c| c.family == Family::Minus).all(|c| c.parasitic));
        let on_hot = cfg.modify(|c| c.leak = Some(LeakSpec { overlap_target: LeakTarget::HotTransition })).unwrap();
        let set = assemble(&on_hot, &d).unwrap();
        assert_eq!(active(&set, BathRole::Work), vec![Family::A, Family::Minus]);
        assert!(set.channels_of(BathRole::Work).filter(|c| c.family == Family::A).all(|c| c.parasitic));
    }

    #[test]
    fn work_leak_closes_two_step_loop() {
        let (cfg, _) = tls(0.1, 0.04);
        let cfg = cfg.modify(|c| c.leak = Some(LeakSpec { overlap_target: LeakTarget::WorkTransition })).unwrap();
        let d = medium::build(&cfg);
        let set = assemble(&cfg, &d).unwrap();
        // levels |2⟩ = index 2, |3⟩ = index 1
        let has = |bath: BathRole, from: usize, to: usize| {
            set.channels_of(bath).any(|c| c.rate > 0.0 && c.entries.iter().any(|&(r, col, _)| col == from && r == to))
        };
        assert!(has(BathRole::Work, 2, 1) && has(BathRole::Work, 1, 2));
        assert!(has(BathRole::Hot, 2, 1) && has(BathRole::Hot, 1, 2));
    }

    #[test]
    fn swapped_assignment() {
        let cfg = validate(SystemConfig::swapped(MediumKind::tls(), 0.15, 0.1, 0.05, [10.0, 6.0, 5.0], 0.005)).unwrap();
        let d = medium::build(&cfg);
        let set = assemble(&cfg, &d).unwrap();
        assert_eq!(active(&set, BathRole::Cold), vec![Family::A]);
        assert_eq!(active(&set, BathRole::Hot), vec![Family::Plus]);
        assert_eq!(active(&set, BathRole::Work), vec![Family::B]);
        // Cold weight is c² = ω_w²/ω̃_w², independent of the A frequency.
        let w = |cfg: &ValidatedConfig| {
            let d = medium::build(cfg);
            let s = assemble(cfg, &d).unwrap();
            let w = s.channels_of(BathRole::Cold).find(|c| c.rate > 0.0).unwrap().weight;
            w
        };
        let other = cfg.modify(|c| c.omega_a = 0.3).unwrap();
        assert_eq!(w(&cfg), w(&other));
        let expected = 0.01 / (0.01 + 4.0 * 0.05 * 0.05);
        assert!((w(&cfg) - expected).abs() < 1e-15);
    }

    #[test]
    fn swapped_uncoupled_limit() {
        let cfg = validate(SystemConfig::swapped(MediumKind::tls(), 0.15, 0.1, 0.0, [10.0, 6.0, 5.0], 0.005)).unwrap();
        let d = medium::build(&cfg);
        let n = d.nominal();
        assert_eq!(n.a, 0.15);
        assert!((n.minus - 0.05).abs() < 1e-15);
        assert!((n.plus - 0.25).abs() < 1e-15);
    }

    #[test]
    fn total_superoperator_is_trace_preserving() {
        for cfg in [
            tls(0.1, 0.03).0,
            validate(SystemConfig::standard(MediumKind::fixed(crate::config::MediumVariant::Tlos, 2, 6), 0.1, 0.01, [3.0, 2.0, 1.0], 0.005)).unwrap(),
            validate(SystemConfig::standard(MediumKind::fixed(crate::config::MediumVariant::Oms, 3, 4), 0.1, 0.01, [3.0, 2.0, 1.0], 0.005)).unwrap(),
        ] {
            let d = medium::build(&cfg);
            let set = assemble(&cfg, &d).unwrap();
            for bath in [None, Some(BathRole::Work), Some(BathRole::Hot), Some(BathRole::Cold)] {
                let l = set.superoperator(bath).unwrap();
                let adj = adjoint_action(&l, &DMatrix::identity(set.dim, set.dim));
                let scale = l.iter().fold(0.0f64, |a, z| a.max(z.norm()));
                assert!(adj.iter().all(|z| z.norm() <= 1e-12 * scale.max(1.0)));
            }
            assert!(set.channels.iter().all(|c| c.rate >= 0.0));
        }
    }

    #[test]
    fn populations_decouple_from_coherences() {
        let cfg = validate(SystemConfig::standard(MediumKind::fixed(crate::config::MediumVariant::Oms, 3, 3), 0.1, 0.02, [3.0, 2.0, 1.0], 0.005)).unwrap();
        let d = medium::build(&cfg);
        let set = assemble(&cfg, &d).unwrap();
        let l = set.superoperator(None).unwrap();
        let n = set.dim;
        let diag = |k: usize| k % n == k / n;
        for r in 0..n * n {
            for col in 0..n * n {
                if diag(r) != diag(col) {
                    assert!(l[(r, col)].norm() < 1e-15, "population/coherence coupling at {r},{col}");
                }
            }
        }
    }

    #[test]
    fn ledger_csv_has_one_row_per_channel() {
        let (cfg, d) = tls(0.1, 0.02);
        let set = assemble(&cfg, &d).unwrap();
        let csv = set.ledger_csv();
        assert!(csv.starts_with(LEDGER_HEADER));
        assert_eq!(csv.lines().count(), set.channels.len() + 1);
    }
}
