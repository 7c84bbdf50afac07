// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Dressed (polaron-frame) description of the three working media.
//!
//! States are product states |n, m⟩ of the dressed A and B excitations,
//! stored at index `n * dim_b + m`. Jump operators are written directly in
//! this basis as ladder operators on the dressed indices; the displacement
//! generated by the polaron unitary is absorbed into the frame, so nothing
//! is ever exponentiated on a truncated Fock space.

use std::fmt;

use nalgebra::DMatrix;

use crate::config::{MediumVariant, ValidatedConfig};

/// Operator labels. The first four lower the energy; the rest are their
/// adjoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpLabel {
    A,
    B,
    ABDag,
    AB,
    ADag,
    BDag,
    ADagB,
    ADagBDag,
}

impl OpLabel {
    pub const LOWERING: [OpLabel; 4] = [OpLabel::A, OpLabel::B, OpLabel::ABDag, OpLabel::AB];

    pub fn adjoint(self) -> OpLabel {
        match self {
            OpLabel::A => OpLabel::ADag,
            OpLabel::B => OpLabel::BDag,
            OpLabel::ABDag => OpLabel::ADagB,
            OpLabel::AB => OpLabel::ADagBDag,
            OpLabel::ADag => OpLabel::A,
            OpLabel::BDag => OpLabel::B,
            OpLabel::ADagB => OpLabel::ABDag,
            OpLabel::ADagBDag => OpLabel::AB,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OpLabel::A => "a",
            OpLabel::B => "b",
            OpLabel::ABDag => "a b+",
            OpLabel::AB => "a b",
            OpLabel::ADag => "a+",
            OpLabel::BDag => "b+",
            OpLabel::ADagB => "a+ b",
            OpLabel::ADagBDag => "a+ b+",
        }
    }

    /// Change of (n, m) produced by the operator.
    fn shift(self) -> (i64, i64) {
        match self {
            OpLabel::A => (-1, 0),
            OpLabel::B => (0, -1),
            OpLabel::ABDag => (-1, 1),
            OpLabel::AB => (-1, -1),
            OpLabel::ADag => (1, 0),
            OpLabel::BDag => (0, 1),
            OpLabel::ADagB => (1, -1),
            OpLabel::ADagBDag => (1, 1),
        }
    }

    /// Nominal transition family.
    pub fn family(self) -> Family {
        match self {
            OpLabel::A | OpLabel::ADag => Family::A,
            OpLabel::B | OpLabel::BDag => Family::B,
            OpLabel::ABDag | OpLabel::ADagB => Family::Minus,
            OpLabel::AB | OpLabel::ADagBDag => Family::Plus,
        }
    }
}

impl fmt::Display for OpLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Transition families (degeneracy classes) of the dressed spectrum.
///
/// In the standard topology these are ω_h (`A`), ω_w = ω_h − ω̃_c
/// (`Minus`), ω_+ = ω_h + ω̃_c (`Plus`) and ω̃_c (`B`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    Minus,
    Plus,
    B,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::A => "a",
            Family::Minus => "minus",
            Family::Plus => "plus",
            Family::B => "b",
        }
    }
}

/// Sparse operator: `(row, col, value)` entries in the dressed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpOperator {
    pub label: OpLabel,
    pub entries: Vec<(usize, usize, f64)>,
}

impl JumpOperator {
    pub fn adjoint(&self) -> JumpOperator {
        JumpOperator {
            label: self.label.adjoint(),
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        }
    }

    pub fn to_dense(&self, dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }
}

/// One matrix element of a lowering operator: `from → to` releases `bohr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub bohr: f64,
    pub label: OpLabel,
    pub amplitude: f64,
    pub family: Family,
}

/// Dressed B frequency and the mixing weights attached to the dissipators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedFrequencies {
    pub omega_b_dressed: f64,
    /// Mixing angle θ for TLS (sin θ = 2g/ω̃, cos θ = ω/ω̃); `None` otherwise.
    pub theta: Option<f64>,
    /// Displacement β = g/ω for TLOS/OMS; `None` for TLS.
    pub beta: Option<f64>,
    pub c2: f64,
    pub s2: f64,
}

/// Nominal transition frequencies of the four families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nominal {
    pub a: f64,
    pub minus: f64,
    pub plus: f64,
    pub b: f64,
}

impl Nominal {
    pub fn of(&self, family: Family) -> f64 {
        match family {
            Family::A => self.a,
            Family::Minus => self.minus,
            Family::Plus => self.plus,
            Family::B => self.b,
        }
    }
}

pub fn dressed_frequencies(variant: MediumVariant, omega_b: f64, g: f64) -> DressedFrequencies {
    match variant {
        MediumVariant::Tls => {
            let w = (omega_b * omega_b + 4.0 * g * g).sqrt();
            let sin = 2.0 * g / w;
            let cos = omega_b / w;
            DressedFrequencies {
                omega_b_dressed: w,
                theta: Some((2.0 * g).atan2(omega_b)),
                beta: None,
                c2: cos * cos,
                s2: sin * sin,
            }
        }
        MediumVariant::Tlos | MediumVariant::Oms => {
            let beta = g / omega_b;
            DressedFrequencies {
                omega_b_dressed: omega_b,
                theta: None,
                beta: Some(beta),
                c2: 1.0,
                s2: beta * beta,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DressedSystem {
    pub variant: MediumVariant,
    pub dim_a: usize,
    pub dim_b: usize,
    pub omega_a: f64,
    pub omega_b: f64,
    pub g: f64,
    pub frequencies: DressedFrequencies,
    /// Diagonal of the dressed Hamiltonian.
    pub energies: Vec<f64>,
    /// Lowering operators; adjoints via [`JumpOperator::adjoint`].
    pub jump_ops: Vec<JumpOperator>,
    pub transitions: Vec<Transition>,
    /// TLS only: columns are the dressed eigenstates expanded in the bare
    /// product basis (index `n_A * 2 + n_B`, 1 = excited).
    pub bare_vectors: Option<DMatrix<f64>>,
}

impl DressedSystem {
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn index(&self, n: usize, m: usize) -> usize {
        n * self.dim_b + m
    }

    pub fn quantum_numbers(&self, idx: usize) -> (usize, usize) {
        (idx / self.dim_b, idx % self.dim_b)
    }

    pub fn nominal(&self) -> Nominal {
        let wb = self.frequencies.omega_b_dressed;
        Nominal { a: self.omega_a, minus: self.omega_a - wb, plus: self.omega_a + wb, b: wb }
    }

    /// Mixing weight multiplying every dissipator of a family.
    pub fn weight(&self, family: Family) -> f64 {
        match family {
            Family::A | Family::B => self.frequencies.c2,
            Family::Minus | Family::Plus => self.frequencies.s2,
        }
    }

    pub fn jump_op(&self, label: OpLabel) -> JumpOperator {
        let lowering = OpLabel::LOWERING.contains(&label);
        let base = if lowering { label } else { label.adjoint() };
        let op = self
            .jump_ops
            .iter()
            .find(|o| o.label == base)
            .cloned()
            .unwrap_or(JumpOperator { label: base, entries: Vec::new() });
        if lowering {
            op
        } else {
            op.adjoint()
        }
    }

    pub fn hamiltonian(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.energies))
    }

    /// Copy with every energy shifted by `offset`. Bohr frequencies are
    /// unchanged.
    pub fn with_energy_offset(&self, offset: f64) -> DressedSystem {
        let mut s = self.clone();
        for e in s.energies.iter_mut() {
            *e += offset;
        }
        s
    }

    /// Conventional level label for TLS (|1⟩ highest … |4⟩ ground).
    pub fn tls_level_label(&self, idx: usize) -> Option<usize> {
        (self.variant == MediumVariant::Tls).then(|| 4 - idx)
    }

    /// Largest pairwise gap closer than `tol` between distinct levels.
    pub fn has_degenerate_levels(&self, tol: f64) -> bool {
        let mut e = self.energies.clone();
        e.sort_by(f64::total_cmp);
        let scale = e.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1.0);
        e.windows(2).any(|p| (p[1] - p[0]).abs() <= tol * scale)
    }
}

fn ladder(n: usize) -> f64 {
    (n as f64).sqrt()
}

fn assemble(
    variant: MediumVariant,
    dim_a: usize,
    dim_b: usize,
    omega_a: f64,
    omega_b: f64,
    g: f64,
    energy: impl Fn(usize, usize) -> f64,
) -> DressedSystem {
    let frequencies = dressed_frequencies(variant, omega_b, g);
    let dim = dim_a * dim_b;
    let mut energies = vec![0.0; dim];
    for n in 0..dim_a {
        for m in 0..dim_b {
            energies[n * dim_b + m] = energy(n, m);
        }
    }
    let mut jump_ops = Vec::new();
    let mut transitions = Vec::new();
    for label in OpLabel::LOWERING {
        let (dn, dm) = label.shift();
        let mut entries = Vec::new();
        for n in 0..dim_a {
            for m in 0..dim_b {
                let (tn, tm) = (n as i64 + dn, m as i64 + dm);
                if tn < 0 || tm < 0 || tn >= dim_a as i64 || tm >= dim_b as i64 {
                    continue;
                }
                let (tn, tm) = (tn as usize, tm as usize);
                let amp_a = if dn != 0 { ladder(n) } else { 1.0 };
                let amp_b = match dm {
                    -1 => ladder(m),
                    1 => ladder(m + 1),
                    _ => 1.0,
                };
                let amplitude = amp_a * amp_b;
                let from = n * dim_b + m;
                let to = tn * dim_b + tm;
                entries.push((to, from, amplitude));
                transitions.push(Transition {
                    from,
                    to,
                    bohr: energies[from] - energies[to],
                    label,
                    amplitude,
                    family: label.family(),
                });
            }
        }
        jump_ops.push(JumpOperator { label, entries });
    }
    DressedSystem {
        variant,
        dim_a,
        dim_b,
        omega_a,
        omega_b,
        g,
        frequencies,
        energies,
        jump_ops,
        transitions,
        bare_vectors: None,
    }
}

/// Coupled qubits: E = (n − ½) ω_a + (m − ½) ω̃_b.
pub fn build_tls_raw(omega_a: f64, omega_b: f64, g: f64) -> DressedSystem {
    let wb = dressed_frequencies(MediumVariant::Tls, omega_b, g).omega_b_dressed;
    let mut s = assemble(MediumVariant::Tls, 2, 2, omega_a, omega_b, g, |n, m| {
        (n as f64 - 0.5) * omega_a + (m as f64 - 0.5) * wb
    });
    let theta = s.frequencies.theta.unwrap_or(0.0);
    let (c, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    // Bare index: n_A * 2 + n_B with 1 = excited; |++⟩ = 3, |+−⟩ = 2,
    // |−+⟩ = 1, |−−⟩ = 0. Dressed index uses the same (n, m) packing.
    let mut v = DMatrix::zeros(4, 4);
    // |1⟩ = (1,1): cos|++⟩ − sin|+−⟩
    v[(3, 3)] = c;
    v[(2, 3)] = -sn;
    // |2⟩ = (1,0): sin|++⟩ + cos|+−⟩
    v[(3, 2)] = sn;
    v[(2, 2)] = c;
    // |3⟩ = (0,1): cos|−+⟩ + sin|−−⟩
    v[(1, 1)] = c;
    v[(0, 1)] = sn;
    // |4⟩ = (0,0): cos|−−⟩ − sin|−+⟩
    v[(0, 0)] = c;
    v[(1, 0)] = -sn;
    s.bare_vectors = Some(v);
    s
}

/// Qubit–oscillator: E = (n − ½) ω_a + m ω_b − g²/ω_b.
pub fn build_tlos_raw(omega_a: f64, omega_b: f64, g: f64, dim_b: usize) -> DressedSystem {
    let shift = g * g / omega_b;
    assemble(MediumVariant::Tlos, 2, dim_b, omega_a, omega_b, g, |n, m| {
        (n as f64 - 0.5) * omega_a + m as f64 * omega_b - shift
    })
}

/// Two oscillators: E = n ω_a + m ω_b − (g²/ω_b) n².
pub fn build_oms_raw(omega_a: f64, omega_b: f64, g: f64, dim_a: usize, dim_b: usize) -> DressedSystem {
    let chi = g * g / omega_b;
    assemble(MediumVariant::Oms, dim_a, dim_b, omega_a, omega_b, g, |n, m| {
        let n = n as f64;
        n * omega_a + m as f64 * omega_b - chi * n * n
    })
}

pub fn build_tls(config: &ValidatedConfig) -> DressedSystem {
    build_tls_raw(config.omega_a, config.omega_b, config.g)
}

pub fn build_tlos(config: &ValidatedConfig) -> DressedSystem {
    build_tlos_raw(config.omega_a, config.omega_b, config.g, config.medium.truncation_b)
}

pub fn build_oms(config: &ValidatedConfig) -> DressedSystem {
    build_oms_raw(config.omega_a, config.omega_b, config.g, config.medium.truncation_a, config.medium.truncation_b)
}

/// Builds the dressed system for the config's medium at explicit truncations.
pub fn build_with_truncation(config: &ValidatedConfig, dim_a: usize, dim_b: usize) -> DressedSystem {
    match config.medium.variant {
        MediumVariant::Tls => build_tls(config),
        MediumVariant::Tlos => build_tlos_raw(config.omega_a, config.omega_b, config.g, dim_b),
        MediumVariant::Oms => build_oms_raw(config.omega_a, config.omega_b, config.g, dim_a, dim_b),
    }
}

pub fn build(config: &ValidatedConfig) -> DressedSystem {
    build_with_truncation(config, config.medium.truncation_a, config.medium.truncation_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tls_uncoupled_limit() {
        let f = dressed_frequencies(MediumVariant::Tls, 0.1, 0.0);
        assert_eq!(f.omega_b_dressed, 0.1);
        assert_eq!(f.theta, Some(0.0));
        let s = build_tls_raw(1.0, 0.1, 0.0);
        let v = s.bare_vectors.as_ref().unwrap();
        assert_eq!(*v, DMatrix::identity(4, 4));
        let mut e = s.energies.clone();
        e.sort_by(f64::total_cmp);
        assert_eq!(e, vec![-0.55, -0.45, 0.45, 0.55]);
    }

    #[test]
    fn tls_dressed_frequencies() {
        let f = dressed_frequencies(MediumVariant::Tls, 0.1, 0.005);
        assert_relative_eq!(f.omega_b_dressed, 0.010_1f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(f.omega_b_dressed, 0.100_498_756, max_relative = 1e-8);
        assert_relative_eq!(f.s2.sqrt(), 0.099_503_719, max_relative = 1e-8);
        assert_relative_eq!(f.c2 + f.s2, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn oscillator_media_keep_bare_b_frequency() {
        for v in [MediumVariant::Tlos, MediumVariant::Oms] {
            let f = dressed_frequencies(v, 0.05, 0.02);
            assert_eq!(f.omega_b_dressed, 0.05);
            assert_eq!(f.c2, 1.0);
            assert_relative_eq!(f.s2, 0.16, max_relative = 1e-14);
        }
    }

    #[test]
    fn tls_transition_table_matches_level_diagram() {
        let s = build_tls_raw(1.0, 0.1, 0.02);
        let n = s.nominal();
        let mut arrows: Vec<(usize, usize, Family)> = s
            .transitions
            .iter()
            .map(|t| {
                let a = s.tls_level_label(t.from).unwrap();
                let b = s.tls_level_label(t.to).unwrap();
                (a.min(b), a.max(b), t.family)
            })
            .collect();
        arrows.sort();
        assert_eq!(
            arrows,
            vec![
                (1, 2, Family::B),
                (1, 3, Family::A),
                (1, 4, Family::Plus),
                (2, 3, Family::Minus),
                (2, 4, Family::A),
                (3, 4, Family::B),
            ]
        );
        for t in &s.transitions {
            assert!((t.bohr - n.of(t.family)).abs() < 1e-12);
        }
    }

    #[test]
    fn tls_eigenvectors_are_orthonormal() {
        let s = build_tls_raw(1.0, 0.07, 0.03);
        let v = s.bare_vectors.unwrap();
        let err = (v.transpose() * &v - DMatrix::<f64>::identity(4, 4)).abs().max();
        assert!(err < 1e-12);
    }

    #[test]
    fn tls_eigenvectors_diagonalize_bare_hamiltonian() {
        // H = ω_h/2 σz_h + ω_c/2 σz_c + g σz_h σx_c, which the dressed
        // states diagonalize with the symmetric-zero eigenvalues.
        let (wh, wc, g) = (1.0, 0.08, 0.03);
        let s = build_tls_raw(wh, wc, g);
        let v = s.bare_vectors.clone().unwrap();
        let mut h = DMatrix::<f64>::zeros(4, 4);
        for i in 0..4 {
            let (na, nb) = (i / 2, i % 2);
            let za = if na == 1 { 1.0 } else { -1.0 };
            let zb = if nb == 1 { 1.0 } else { -1.0 };
            h[(i, i)] = 0.5 * wh * za + 0.5 * wc * zb;
            // σx on B flips nb; sign of the coupling term follows the
            // dressed-state convention (−g σz_h σx_c).
            let j = na * 2 + (1 - nb);
            h[(j, i)] += -g * za;
        }
        let d = v.transpose() * &h * &v;
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { s.energies[i] } else { 0.0 };
                assert!((d[(i, j)] - expect).abs() < 1e-12, "{i},{j}: {}", d[(i, j)]);
            }
        }
    }

    #[test]
    fn tlos_spectrum() {
        let s = build_tlos_raw(1.0, 0.1, 0.0, 6);
        for n in 0..2 {
            for m in 0..6 {
                let e = s.energies[s.index(n, m)];
                assert_relative_eq!(e, (n as f64 - 0.5) + 0.1 * m as f64, epsilon = 1e-15);
            }
        }
        let s = build_tlos_raw(1.0, 0.1, 0.02, 6);
        let nominal = s.nominal();
        for t in &s.transitions {
            assert!((t.bohr - nominal.of(t.family)).abs() < 1e-12, "{t:?}");
        }
        let shift = s.energies[0] - (-0.5);
        assert_relative_eq!(shift, -0.004, max_relative = 1e-12);
        let mut families: Vec<f64> = [Family::A, Family::Minus, Family::Plus, Family::B].iter().map(|&f| nominal.of(f)).collect();
        families.sort_by(f64::total_cmp);
        assert_eq!(families, vec![0.1, 0.9, 1.0, 1.1]);
    }

    #[test]
    fn oms_anharmonicity() {
        let s = build_oms_raw(1.0, 0.1, 0.0, 4, 4);
        assert_relative_eq!(s.energies[s.index(2, 3)], 2.3, epsilon = 1e-15);
        let (g, wc) = (0.02, 0.1);
        let s = build_oms_raw(1.0, wc, g, 4, 4);
        let e = |n, m| s.energies[s.index(n, m)];
        assert_relative_eq!(e(2, 0) - 2.0 * e(1, 0), -2.0 * g * g / wc, max_relative = 1e-12);
        for t in s.transitions.iter().filter(|t| t.label == OpLabel::ABDag) {
            let (n, _) = s.quantum_numbers(t.from);
            let expected = 1.0 - wc - (2.0 * n as f64 - 1.0) * g * g / wc;
            assert_relative_eq!(t.bohr, expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn commutator_with_hamiltonian() {
        // [H, O] = −ω O exactly for TLS and TLOS; OMS deviates by at most
        // 2χ n per excitation.
        for s in [build_tls_raw(1.0, 0.1, 0.04), build_tlos_raw(1.0, 0.1, 0.02, 8), build_oms_raw(1.0, 0.1, 0.02, 5, 5)] {
            let h = s.hamiltonian();
            let nominal = s.nominal();
            let chi = s.g * s.g / s.omega_b;
            for op in &s.jump_ops {
                let o = op.to_dense(s.dim());
                let remainder = &h * &o - &o * &h + o.clone() * nominal.of(op.label.family());
                let bound = if s.variant == MediumVariant::Oms {
                    2.0 * chi * s.dim_a as f64 * o.abs().max()
                } else {
                    1e-12
                };
                assert!(remainder.abs().max() <= bound, "{:?} {:?}: {}", s.variant, op.label, remainder.abs().max());
            }
        }
    }

    #[test]
    fn adjoint_labels_round_trip() {
        let s = build_tlos_raw(1.0, 0.1, 0.02, 4);
        for l in OpLabel::LOWERING {
            let up = s.jump_op(l.adjoint());
            assert_eq!(up.label, l.adjoint());
            assert_eq!(up.adjoint(), s.jump_op(l));
        }
    }
}
