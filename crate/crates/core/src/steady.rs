// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Steady-state solvers.
//!
//! Two independent paths:
//!
//! * **Populations.** All channels are monomial in the dressed basis, so the
//!   diagonal of ρ obeys a closed classical master equation. Its stationary
//!   vector is found by Grassmann–Taksar–Heyman state reduction, which uses
//!   no subtractions and keeps full relative accuracy even when rates span
//!   many decades. States are ordered so the generator is banded; cost is
//!   O(N·b²) with b ≈ min(dim_a, dim_b) + 1.
//! * **Full.** Dense d²×d² Liouvillian with one row replaced by the trace
//!   constraint, solved by LU. Only for small d; used to audit the first path.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;
use twofloat::TwoFloat;

use crate::liouvillian::{LiouvillianError, LiouvillianSet, C64, DENSE_SUPEROPERATOR_LIMIT};

/// Dimension up to which `Method::Auto` also runs the full path.
pub const AUTO_CROSS_CHECK_LIMIT: usize = 16;
/// Agreement demanded between the two paths for well-conditioned rates.
pub const CROSS_CHECK_TOL: f64 = 1e-10;

/// Cross-check tolerance for a rate set: dense LU loses accuracy in
/// proportion to the spread between the fastest and slowest rate.
pub fn cross_check_tolerance(rates: &[(usize, usize, f64)]) -> f64 {
    let max = rates.iter().map(|r| r.2).fold(0.0, f64::max);
    let min = rates.iter().map(|r| r.2).filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
    if !(max > 0.0 && min.is_finite()) {
        return CROSS_CHECK_TOL;
    }
    CROSS_CHECK_TOL.max(64.0 * f64::EPSILON * max / min)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("DegenerateSteadyState: {closed_classes} closed classes (nullspace dimension > 1)")]
    DegenerateSteadyState { closed_classes: usize },
    #[error("steady-state paths disagree by {0:e}")]
    CrossCheckFailed(f64),
    #[error("singular trace-constrained Liouvillian")]
    Singular,
    #[error(transparent)]
    Liouvillian(#[from] LiouvillianError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Population path, plus the full path when d is small.
    Auto,
    Populations,
    Full,
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub populations: Vec<f64>,
    /// Populations in double-double precision. Heat currents come from
    /// near-cancelling jump fluxes, so they are evaluated from these.
    pub populations_dd: Vec<TwoFloat>,
    /// Present when the full path ran.
    pub rho: Option<DMatrix<C64>>,
    /// ‖Qπ‖∞ / ‖Q‖∞ on the population generator.
    pub residual: f64,
    /// max |Δρ| between paths, when both ran.
    pub cross_check: Option<f64>,
}

impl SteadyState {
    /// Dense density matrix (diagonal unless the full path supplied one).
    pub fn density_matrix(&self) -> DMatrix<C64> {
        match &self.rho {
            Some(r) => r.clone(),
            None => {
                let d = self.populations.len();
                DMatrix::from_fn(d, d, |i, j| if i == j { C64::new(self.populations[i], 0.0) } else { C64::new(0.0, 0.0) })
            }
        }
    }
}

/// Off-diagonal rates of a continuous-time chain, deduplicated per pair.
#[derive(Debug, Clone)]
pub struct RateGraph {
    pub n: usize,
    /// `out[i]` = list of (j, rate i→j), j ≠ i, sorted by j. Parallel
    /// edges are summed without rounding.
    pub out: Vec<Vec<(usize, TwoFloat)>>,
}

impl RateGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut out: Vec<Vec<(usize, TwoFloat)>> = vec![Vec::new(); n];
        for (from, to, r) in edges {
            if from != to && r > 0.0 {
                out[from].push((to, TwoFloat::from(r)));
            }
        }
        for row in &mut out {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, TwoFloat)> = Vec::with_capacity(row.len());
            for &(j, r) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += r,
                    _ => merged.push((j, r)),
                }
            }
            *row = merged;
        }
        RateGraph { n, out }
    }

    /// ‖Qᵀπ‖∞ / max exit rate.
    pub fn residual(&self, pi: &[f64]) -> f64 {
        let mut flow = vec![0.0; self.n];
        let mut scale = 0.0f64;
        for (i, row) in self.out.iter().enumerate() {
            let exit: f64 = row.iter().map(|e| e.1.hi()).sum();
            scale = scale.max(exit);
            flow[i] -= exit * pi[i];
            for &(j, r) in row {
                flow[j] += r.hi() * pi[i];
            }
        }
        let worst = flow.iter().fold(0.0f64, |a, f| a.max(f.abs()));
        if scale == 0.0 {
            worst
        } else {
            worst / scale
        }
    }

    /// Closed communicating classes (strongly connected components with no
    /// exit), each sorted.
    pub fn closed_classes(&self) -> Vec<Vec<usize>> {
        let comp = tarjan(self);
        let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut leaves = vec![true; ncomp];
        for (i, row) in self.out.iter().enumerate() {
            for &(j, _) in row {
                if comp[i] != comp[j] {
                    leaves[comp[i]] = false;
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
        for (i, &c) in comp.iter().enumerate() {
            if leaves[c] {
                classes[c].push(i);
            }
        }
        let mut classes: Vec<Vec<usize>> = classes.into_iter().filter(|c| !c.is_empty()).collect();
        classes.sort();
        classes
    }
}

/// Iterative Tarjan SCC; returns the component id of each vertex.
fn tarjan(g: &RateGraph) -> Vec<usize> {
    const UNSET: usize = usize::MAX;
    let n = g.n;
    let mut index = vec![UNSET; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSET; n];
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            if *k < g.out[v].len() {
                let w = g.out[v][*k].0;
                *k += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Banded storage for the GTH reduction: `a[i][j - i + b]` holds the rate
/// i→j for |i − j| ≤ b.
struct Band {
    b: usize,
    data: Vec<TwoFloat>,
}

impl Band {
    fn new(n: usize, b: usize) -> Self {
        Band { b, data: vec![TwoFloat::from(0.0); n * (2 * b + 1)] }
    }
    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut TwoFloat {
        let w = 2 * self.b + 1;
        &mut self.data[i * w + (j + self.b - i)]
    }
    #[inline]
    fn get(&self, i: usize, j: usize) -> TwoFloat {
        let w = 2 * self.b + 1;
        self.data[i * w + (j + self.b - i)]
    }
}

/// Double-double quotient. The crate's own dd/dd division is only good to
/// f64 precision, so one Newton correction restores the lost digits.
fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q = a / b;
    let r = a - q * b;
    q + r.hi() / b.hi()
}

/// Stationary vector of an irreducible chain by GTH reduction.
///
/// `order` lists the states to use, in elimination order; rates to states
/// outside `order` must not exist. Runs in double-double arithmetic: GTH
/// has no subtractions, so the result carries ~32 correct digits.
fn gth(graph: &RateGraph, order: &[usize]) -> Vec<TwoFloat> {
    let zero = TwoFloat::from(0.0);
    let n = order.len();
    if n == 1 {
        let mut pi = vec![zero; graph.n];
        pi[order[0]] = TwoFloat::from(1.0);
        return pi;
    }
    let mut pos = vec![usize::MAX; graph.n];
    for (k, &s) in order.iter().enumerate() {
        pos[s] = k;
    }
    let mut b = 0usize;
    for &s in order {
        for &(t, _) in &graph.out[s] {
            if pos[t] != usize::MAX {
                b = b.max(pos[s].abs_diff(pos[t]));
            }
        }
    }
    let mut q = Band::new(n, b);
    for &s in order {
        for &(t, r) in &graph.out[s] {
            if pos[t] != usize::MAX {
                *q.at(pos[s], pos[t]) += r;
            }
        }
    }
    // Eliminate states n−1 … 1.
    for k in (1..n).rev() {
        let lo = k.saturating_sub(b);
        let exit = (lo..k).fold(zero, |acc, j| acc + q.get(k, j));
        for i in lo..k {
            let qik = q.get(i, k);
            if qik.hi() == 0.0 {
                continue;
            }
            let f = div(qik, exit);
            for j in lo..k {
                if j != i {
                    let qkj = q.get(k, j);
                    if qkj.hi() != 0.0 {
                        *q.at(i, j) += f * qkj;
                    }
                }
            }
        }
        // Stash the exit sum on the (unused) diagonal for back substitution.
        *q.at(k, k) = exit;
    }
    let mut x = vec![zero; n];
    x[0] = TwoFloat::from(1.0);
    for k in 1..n {
        let lo = k.saturating_sub(b);
        let inflow = (lo..k).fold(zero, |acc, i| acc + x[i] * q.get(i, k));
        x[k] = div(inflow, q.get(k, k));
    }
    let total = x.iter().fold(zero, |acc, &v| acc + v);
    let mut pi = vec![zero; graph.n];
    for (k, &s) in order.iter().enumerate() {
        pi[s] = div(x[k], total);
    }
    pi
}

/// Stationary populations of `graph`.
///
/// `order` optionally supplies a bandwidth-reducing permutation of all
/// states. Transient states get zero weight.
pub fn stationary_populations(graph: &RateGraph, order: Option<&[usize]>) -> Result<Vec<f64>, SolverError> {
    Ok(stationary_populations_dd(graph, order)?.iter().map(|p| p.hi()).collect())
}

/// [`stationary_populations`] without the final rounding to f64.
pub fn stationary_populations_dd(graph: &RateGraph, order: Option<&[usize]>) -> Result<Vec<TwoFloat>, SolverError> {
    let classes = graph.closed_classes();
    if classes.len() != 1 {
        return Err(SolverError::DegenerateSteadyState { closed_classes: classes.len() });
    }
    let class = &classes[0];
    let mut member = vec![false; graph.n];
    for &s in class {
        member[s] = true;
    }
    let full: Vec<usize> = match order {
        Some(o) => o.to_vec(),
        None => (0..graph.n).collect(),
    };
    let ordered: Vec<usize> = full.into_iter().filter(|&s| member[s]).collect();
    Ok(gth(graph, &ordered))
}

/// State order that minimizes the bandwidth for an `(n, m)` product grid
/// indexed as `n·dim_b + m`: the smaller dimension runs fastest.
pub fn product_order(dim_a: usize, dim_b: usize) -> Vec<usize> {
    if dim_b <= dim_a {
        (0..dim_a * dim_b).collect()
    } else {
        let mut v = Vec::with_capacity(dim_a * dim_b);
        for m in 0..dim_b {
            for n in 0..dim_a {
                v.push(n * dim_b + m);
            }
        }
        v
    }
}

/// Full-Liouvillian steady state by trace-constrained LU.
pub fn full_steady_state(l: &LiouvillianSet) -> Result<DMatrix<C64>, SolverError> {
    let d = l.dim;
    let mut m = total_superoperator(l)?;
    let n = d * d;
    for c in 0..n {
        m[(0, c)] = C64::new(0.0, 0.0);
    }
    for i in 0..d {
        m[(0, i * d + i)] = C64::new(1.0, 0.0);
    }
    let mut rhs = DVector::<C64>::zeros(n);
    rhs[0] = C64::new(1.0, 0.0);
    let x = m.lu().solve(&rhs).ok_or(SolverError::Singular)?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SolverError::Singular);
    }
    let rho = DMatrix::from_column_slice(d, d, x.as_slice());
    // Symmetrize away rounding.
    Ok((&rho + rho.adjoint()) * C64::new(0.5, 0.0))
}

/// −i[H, ·] plus all dissipators.
pub fn total_superoperator(l: &LiouvillianSet) -> Result<DMatrix<C64>, SolverError> {
    let d = l.dim;
    if d > DENSE_SUPEROPERATOR_LIMIT {
        return Err(LiouvillianError::TooLarge(d).into());
    }
    let mut m = l.superoperator(None)?;
    // vec(Hρ − ρH) with diagonal H: entry (i, j) scales by E_i − E_j.
    for j in 0..d {
        for i in 0..d {
            let k = j * d + i;
            m[(k, k)] += C64::new(0.0, -(l.energies[i] - l.energies[j]));
        }
    }
    Ok(m)
}

/// Number of singular values of the total Liouvillian below `rel_tol·σ_max`.
pub fn nullspace_dimension(l: &LiouvillianSet, rel_tol: f64) -> Result<usize, SolverError> {
    let m = total_superoperator(l)?;
    let sv = m.singular_values();
    let max = sv.iter().fold(0.0f64, |a, &s| a.max(s));
    Ok(sv.iter().filter(|&&s| s <= rel_tol * max).count())
}

pub fn population_graph(l: &LiouvillianSet) -> RateGraph {
    RateGraph::new(l.dim, l.population_rates(None))
}

/// Steady state of an assembled Liouvillian.
///
/// `order` is the bandwidth-reducing permutation for the population path.
pub fn steady_state_with(l: &LiouvillianSet, method: Method, order: Option<&[usize]>) -> Result<SteadyState, SolverError> {
    let graph = population_graph(l);
    match method {
        Method::Full => {
            let rho = full_steady_state(l)?;
            let populations: Vec<f64> = (0..l.dim).map(|i| rho[(i, i)].re).collect();
            let residual = graph.residual(&populations);
            let populations_dd = populations.iter().map(|&p| TwoFloat::from(p)).collect();
            Ok(SteadyState { populations, populations_dd, rho: Some(rho), residual, cross_check: None })
        }
        Method::Populations | Method::Auto => {
            let populations_dd = stationary_populations_dd(&graph, order)?;
            let populations: Vec<f64> = populations_dd.iter().map(|p| p.hi()).collect();
            let residual = graph.residual(&populations);
            let mut out = SteadyState { populations, populations_dd, rho: None, residual, cross_check: None };
            if method == Method::Auto && l.dim <= AUTO_CROSS_CHECK_LIMIT {
                let rho = full_steady_state(l)?;
                let mut diff = 0.0f64;
                for i in 0..l.dim {
                    for j in 0..l.dim {
                        let p = if i == j { out.populations[i] } else { 0.0 };
                        diff = diff.max((rho[(i, j)] - C64::new(p, 0.0)).norm());
                    }
                }
                if diff > cross_check_tolerance(&l.population_rates(None)) {
                    return Err(SolverError::CrossCheckFailed(diff));
                }
                out.cross_check = Some(diff);
            }
            Ok(out)
        }
    }
}

pub fn steady_state(l: &LiouvillianSet) -> Result<SteadyState, SolverError> {
    steady_state_with(l, Method::Auto, None)
}
