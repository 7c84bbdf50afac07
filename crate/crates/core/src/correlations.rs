// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Bipartite correlations of the steady state in the bare (product) basis.
//!
//! Entropies are in nats. Discord and the PPT test are two-qubit only; for
//! the oscillator media only the mutual information is reported.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::config::MediumVariant;
use crate::liouvillian::C64;
use crate::medium::DressedSystem;

/// Tolerance for the two-qubit block pattern.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Eigenvalues below this count as exact zeros in x ln x.
pub const ENTROPY_FLOOR: f64 = 1e-14;
/// Angular grid per axis for the discord search.
pub const DISCORD_GRID: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error("StructureViolation: off-block element of magnitude {0:e}")]
    StructureViolation(f64),
    #[error("operation needs a two-qubit state")]
    NotTwoQubit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Party {
    A,
    B,
}

/// A bipartite density matrix with index `a·dim_b + b`.
#[derive(Debug, Clone)]
pub struct Bipartite {
    pub rho: DMatrix<C64>,
    pub dim_a: usize,
    pub dim_b: usize,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Von Neumann entropy of a Hermitian density matrix.
pub fn entropy(rho: &DMatrix<C64>) -> f64 {
    let ev = rho.clone().symmetric_eigenvalues();
    shannon(ev.iter().copied())
}

/// −Σ p ln p over a probability list, ignoring entries below the floor.
pub fn shannon(p: impl IntoIterator<Item = f64>) -> f64 {
    p.into_iter().filter(|&x| x > ENTROPY_FLOOR).map(|x| -x * x.ln()).sum()
}

impl Bipartite {
    pub fn new(rho: DMatrix<C64>, dim_a: usize, dim_b: usize) -> Self {
        assert_eq!(rho.nrows(), dim_a * dim_b);
        Bipartite { rho, dim_a, dim_b }
    }

    pub fn reduced_a(&self) -> DMatrix<C64> {
        let (da, db) = (self.dim_a, self.dim_b);
        DMatrix::from_fn(da, da, |i, j| (0..db).map(|k| self.rho[(i * db + k, j * db + k)]).sum())
    }

    pub fn reduced_b(&self) -> DMatrix<C64> {
        let (da, db) = (self.dim_a, self.dim_b);
        DMatrix::from_fn(db, db, |i, j| (0..da).map(|k| self.rho[(k * db + i, k * db + j)]).sum())
    }

    pub fn partial_transpose_b(&self) -> DMatrix<C64> {
        let (da, db) = (self.dim_a, self.dim_b);
        let n = da * db;
        DMatrix::from_fn(n, n, |r, col| {
            let (a1, b1) = (r / db, r % db);
            let (a2, b2) = (col / db, col % db);
            self.rho[(a1 * db + b2, a2 * db + b1)]
        })
    }

    /// Largest element coupling different A blocks.
    pub fn off_block_max(&self) -> f64 {
        let db = self.dim_b;
        let mut worst = 0.0f64;
        for (r, col) in (0..self.rho.nrows()).flat_map(|r| (0..self.rho.ncols()).map(move |c| (r, c))) {
            if r / db != col / db {
                worst = worst.max(self.rho[(r, col)].norm());
            }
        }
        worst
    }
}

/// Columns are the dressed states of `dressed` in the bare product basis
/// (B side padded to `bare_dim_b`).
fn dressed_to_bare(dressed: &DressedSystem, bare_dim_b: usize) -> DMatrix<f64> {
    if let Some(v) = &dressed.bare_vectors {
        return v.clone();
    }
    let beta = dressed.frequencies.beta.unwrap_or(0.0);
    let (da, db) = (dressed.dim_a, dressed.dim_b);
    // Generator of D(1) = exp(b† − b) on the padded space.
    let mut gen = DMatrix::<f64>::zeros(bare_dim_b, bare_dim_b);
    for k in 1..bare_dim_b {
        let s = (k as f64).sqrt();
        gen[(k, k - 1)] = s;
        gen[(k - 1, k)] = -s;
    }
    let mut v = DMatrix::zeros(da * bare_dim_b, da * db);
    for n in 0..da {
        // The qubit shifts the oscillator by ±β, an oscillator by nβ.
        let alpha = match dressed.variant {
            MediumVariant::Tlos => -beta * (2.0 * n as f64 - 1.0),
            _ => -beta * n as f64,
        };
        let d = (&gen * alpha).exp();
        for m in 0..db {
            for k in 0..bare_dim_b {
                v[(n * bare_dim_b + k, n * db + m)] = d[(k, m)];
            }
        }
    }
    v
}

fn padding(dressed: &DressedSystem) -> usize {
    let beta = dressed.frequencies.beta.unwrap_or(0.0).abs();
    let alpha = match dressed.variant {
        MediumVariant::Tls => return 0,
        MediumVariant::Tlos => beta,
        MediumVariant::Oms => beta * dressed.dim_a as f64,
    };
    ((alpha * alpha + 6.0 * alpha).ceil() as usize + 8).min(600)
}

/// Steady state in the bare product basis. Two-qubit states must show the
/// block pattern with no coherence between A levels.
pub fn to_bare_basis(rho_dressed: &DMatrix<C64>, dressed: &DressedSystem) -> Result<Bipartite, CorrelationError> {
    let bare_b = dressed.dim_b + padding(dressed);
    let v = dressed_to_bare(dressed, bare_b).map(c);
    let rho = &v * rho_dressed * v.adjoint();
    let out = Bipartite::new(rho, dressed.dim_a, bare_b);
    if dressed.variant == MediumVariant::Tls {
        let off = out.off_block_max();
        if off > STRUCTURE_TOL {
            return Err(CorrelationError::StructureViolation(off));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Entropies {
    pub s_a: f64,
    pub s_b: f64,
    pub s_ab: f64,
}

impl Entropies {
    pub fn mutual_information(&self) -> f64 {
        self.s_a + self.s_b - self.s_ab
    }
}

pub fn entropies(state: &Bipartite) -> Entropies {
    Entropies { s_a: entropy(&state.reduced_a()), s_b: entropy(&state.reduced_b()), s_ab: entropy(&state.rho) }
}

/// S_A + S_B − S_AB.
pub fn mutual_information(state: &Bipartite) -> f64 {
    entropies(state).mutual_information()
}

/// Entropies of a diagonal dressed state without forming the joint matrix:
/// the bare state is block diagonal in A and unitarily equivalent to the
/// dressed one, so S_AB and S_A are Shannon entropies of populations.
pub fn entropies_from_populations(dressed: &DressedSystem, populations: &[f64]) -> Entropies {
    let (da, db) = (dressed.dim_a, dressed.dim_b);
    let s_ab = shannon(populations.iter().copied());
    let marg_a: Vec<f64> = (0..da).map(|n| (0..db).map(|m| populations[n * db + m]).sum()).collect();
    let s_a = shannon(marg_a);
    let bare_b = db + padding(dressed);
    let v = dressed_to_bare(dressed, bare_b);
    let mut rho_b = DMatrix::<f64>::zeros(bare_b, bare_b);
    for n in 0..da {
        let block = v.view((n * bare_b, n * db), (bare_b, db));
        let w = DMatrix::from_fn(bare_b, db, |k, m| block[(k, m)] * populations[n * db + m].sqrt());
        rho_b += &w * w.transpose();
    }
    let ev = rho_b.symmetric_eigenvalues();
    Entropies { s_a, s_b: shannon(ev.iter().copied()), s_ab }
}

fn projector(theta: f64, phi: f64, sign: f64) -> DMatrix<C64> {
    // ½(I + s n·σ)
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let (nx, ny, nz) = (st * cp, st * sp, ct);
    let h = 0.5 * sign;
    DMatrix::from_row_slice(
        2,
        2,
        &[c(0.5 + h * nz), C64::new(h * nx, -h * ny), C64::new(h * nx, h * ny), c(0.5 - h * nz)],
    )
}

fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// S(other) − Σ_k p_k S(other | k) for a projective measurement along
/// (θ, φ) on `party`.
pub fn classical_information(state: &Bipartite, party: Party, theta: f64, phi: f64) -> f64 {
    let id = DMatrix::<C64>::identity(2, 2);
    let other = match party {
        Party::A => state.reduced_b(),
        Party::B => state.reduced_a(),
    };
    let mut cond = 0.0;
    for sign in [1.0, -1.0] {
        let p = projector(theta, phi, sign);
        let m = match party {
            Party::A => kron(&p, &id),
            Party::B => kron(&id, &p),
        };
        let post = &m * &state.rho * &m;
        let pk = post.trace().re;
        if pk <= ENTROPY_FLOOR {
            continue;
        }
        let reduced = match party {
            Party::A => Bipartite::new(post, 2, 2).reduced_b(),
            Party::B => Bipartite::new(post, 2, 2).reduced_a(),
        } / c(pk);
        cond += pk * entropy(&reduced);
    }
    entropy(&other) - cond
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Discord {
    pub discord: f64,
    pub classical: f64,
    pub mutual_information: f64,
    pub theta: f64,
    pub phi: f64,
    pub party: Party,
}

/// Best grid point of the angular search: θ_i = iπ/N, φ_j = jπ/N for
/// i, j < N, which covers every measurement axis once up to sign.
pub fn discord_grid(state: &Bipartite, party: Party, n: usize) -> (f64, f64, f64) {
    let step = std::f64::consts::PI / n as f64;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (t, p) = (i as f64 * step, j as f64 * step);
            let v = classical_information(state, party, t, p);
            // strict comparison keeps the lexicographically first maximizer
            if v > best.0 {
                best = (v, t, p);
            }
        }
    }
    best
}

/// Quantum discord with measurement on `party`: grid search then
/// compass refinement down to 1e-10 rad.
pub fn discord(state: &Bipartite, party: Party) -> Result<Discord, CorrelationError> {
    if state.dim_a != 2 || state.dim_b != 2 {
        return Err(CorrelationError::NotTwoQubit);
    }
    let (mut best, mut t, mut p) = discord_grid(state, party, DISCORD_GRID);
    let mut step = std::f64::consts::PI / DISCORD_GRID as f64;
    while step > 1e-10 {
        let mut moved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let v = classical_information(state, party, t + dt, p + dp);
            if v > best + 1e-15 {
                best = v;
                t += dt;
                p += dp;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    let i = mutual_information(state);
    Ok(Discord { discord: i - best, classical: best, mutual_information: i, theta: t, phi: p, party })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ppt {
    pub min_eigenvalue: f64,
    pub entangled: bool,
    /// Least eigenvalue from the block closed form, when the state has the
    /// two-block pattern.
    pub closed_form: Option<f64>,
}

/// Closed form for a two-block state: within each A block with entries
/// (ρ₁₁, ρ₁₂; ρ₁₂*, ρ₂₂), ρ₁₁ + ρ₂₂ − √((ρ₁₁ − ρ₂₂)² + 4|ρ₁₂|²); this is
/// twice the block's least eigenvalue. Returns the minimum over blocks.
pub fn ppt_closed_form(state: &Bipartite) -> f64 {
    (0..2)
        .map(|a| {
            let (r11, r22, r12) = (state.rho[(2 * a, 2 * a)].re, state.rho[(2 * a + 1, 2 * a + 1)].re, state.rho[(2 * a, 2 * a + 1)].norm());
            r11 + r22 - ((r11 - r22).powi(2) + 4.0 * r12 * r12).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn ppt_check(state: &Bipartite) -> Result<Ppt, CorrelationError> {
    if state.dim_a != 2 || state.dim_b != 2 {
        return Err(CorrelationError::NotTwoQubit);
    }
    let ev = state.partial_transpose_b().symmetric_eigenvalues();
    let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let closed_form = (state.off_block_max() <= STRUCTURE_TOL).then(|| 0.5 * ppt_closed_form(state));
    Ok(Ppt { min_eigenvalue: min, entangled: min < -1e-10, closed_form })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub entropies: Entropies,
    pub mutual_information: f64,
    pub discord: Option<Discord>,
    pub ppt: Option<Ppt>,
}

/// Correlation analysis of a dressed steady state. Discord (measured on
/// `party`) and PPT are computed for two qubits only.
pub fn analyze(dressed: &DressedSystem, rho_dressed: &DMatrix<C64>, party: Party) -> Result<CorrelationReport, CorrelationError> {
    if dressed.variant != MediumVariant::Tls {
        let pops: Vec<f64> = (0..dressed.dim()).map(|i| rho_dressed[(i, i)].re).collect();
        let e = entropies_from_populations(dressed, &pops);
        return Ok(CorrelationReport { entropies: e, mutual_information: e.mutual_information(), discord: None, ppt: None });
    }
    let bare = to_bare_basis(rho_dressed, dressed)?;
    let e = entropies(&bare);
    Ok(CorrelationReport {
        entropies: e,
        mutual_information: e.mutual_information(),
        discord: Some(discord(&bare, party)?),
        ppt: Some(ppt_check(&bare)?),
    })
}
