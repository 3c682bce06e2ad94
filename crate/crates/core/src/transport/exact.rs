//! Exact transport by the transportation simplex (MODI / u-v method).
//!
//! The basis is a spanning tree over the `m1 + m2` row and column nodes with
//! exactly `m1 + m2 − 1` basic cells, degenerate (zero-flow) cells included.
//! Entering cells follow Dantzig's most-negative reduced cost; after a run of
//! degenerate pivots the solver switches to Bland's lowest-index rule, which
//! cannot cycle.

use std::collections::VecDeque;

use super::{CostMatrix, Coupling, SolveReport};
use crate::distribution::check_mass_vector;
use crate::error::{OtError, Result};
use crate::scalar::Scalar;

/// Largest `m1 * m2` accepted by [`exact_solve`].
pub const EXACT_SIZE_LIMIT: usize = 10_000;

const MARGINAL_MISMATCH: f64 = 1e-9;

/// Minimizes `Σ C_ij P_ij` over couplings with marginals `a` and `b`.
pub fn exact_solve<T: Scalar>(cost: &CostMatrix<T>, a: &[T], b: &[T]) -> Result<SolveReport<T>> {
    let (m1, m2) = (cost.rows(), cost.cols());
    if a.len() != m1 {
        return Err(OtError::DimensionError { expected: m1, found: a.len() });
    }
    if b.len() != m2 {
        return Err(OtError::DimensionError { expected: m2, found: b.len() });
    }
    if m1 * m2 > EXACT_SIZE_LIMIT {
        return Err(OtError::InstanceTooLarge { m1, m2, limit: EXACT_SIZE_LIMIT });
    }
    let sa = check_mass_vector(a, "source masses")?;
    let sb = check_mass_vector(b, "target masses")?;
    if (sa - sb).abs() > T::lit(MARGINAL_MISMATCH) {
        return Err(OtError::InfeasibleMarginals { source_sum: sa.as_f64(), target_sum: sb.as_f64() });
    }

    let mut simplex = Tableau::north_west(cost, a, b);
    let pivots = simplex.optimize();

    let plan = simplex.flow;
    let transport_cost = plan.iter().zip(cost.entries()).map(|(&p, &c)| p * c).sum();
    Ok(SolveReport {
        transport_cost,
        coupling: Coupling::new(m1, m2, plan, a, b),
        iterations: pivots,
        converged: true,
        log_kernel_stability: None,
        shift_used: cost.shift().to_vec(),
    })
}

struct Tableau<'a, T> {
    cost: &'a CostMatrix<T>,
    m1: usize,
    m2: usize,
    flow: Vec<T>,
    basic: Vec<bool>,
    basis: Vec<(usize, usize)>,
}

impl<'a, T: Scalar> Tableau<'a, T> {
    /// Staircase initial basis: every step moves down or right, so the
    /// `m1 + m2 − 1` visited cells always form a spanning tree.
    fn north_west(cost: &'a CostMatrix<T>, a: &[T], b: &[T]) -> Self {
        let (m1, m2) = (cost.rows(), cost.cols());
        let mut supply = a.to_vec();
        let mut demand = b.to_vec();
        let mut flow = vec![T::zero(); m1 * m2];
        let mut basic = vec![false; m1 * m2];
        let mut basis = Vec::with_capacity(m1 + m2 - 1);
        let (mut i, mut j) = (0, 0);
        loop {
            let x = supply[i].min(demand[j]).max(T::zero());
            flow[i * m2 + j] = x;
            basic[i * m2 + j] = true;
            basis.push((i, j));
            supply[i] = supply[i] - x;
            demand[j] = demand[j] - x;
            if i == m1 - 1 && j == m2 - 1 {
                break;
            }
            if j == m2 - 1 || (i < m1 - 1 && supply[i] <= demand[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        // the last cell absorbs rounding so row sums match `a` exactly where possible
        let (li, lj) = (m1 - 1, m2 - 1);
        let row_rest: T = (0..m2 - 1).map(|c| flow[li * m2 + c]).sum();
        flow[li * m2 + lj] = (a[li] - row_rest).max(T::zero());
        Self { cost, m1, m2, flow, basic, basis }
    }

    fn optimize(&mut self) -> usize {
        let scale = self.cost.inf_norm().max(T::one());
        let tol = T::epsilon() * T::lit(64.0) * scale;
        let max_pivots = 50 * self.m1 * self.m2 + 1000;
        let bland_after = 2 * (self.m1 + self.m2);

        let mut u = vec![T::zero(); self.m1];
        let mut v = vec![T::zero(); self.m2];
        let mut degenerate_run = 0;
        let mut pivots = 0;
        while pivots < max_pivots {
            self.potentials(&mut u, &mut v);
            let use_bland = degenerate_run >= bland_after;
            let Some(enter) = self.entering(&u, &v, tol, use_bland) else {
                break;
            };
            let theta = self.pivot(enter, use_bland);
            pivots += 1;
            if theta > T::zero() {
                degenerate_run = 0;
            } else {
                degenerate_run += 1;
            }
        }
        pivots
    }

    fn adjacency(&self) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let mut rows = vec![Vec::new(); self.m1];
        let mut cols = vec![Vec::new(); self.m2];
        for &(i, j) in &self.basis {
            rows[i].push(j);
            cols[j].push(i);
        }
        (rows, cols)
    }

    /// Solves `u_i + v_j = C_ij` on the basis tree with `u_0 = 0`.
    fn potentials(&self, u: &mut [T], v: &mut [T]) {
        let (rows, cols) = self.adjacency();
        let mut row_seen = vec![false; self.m1];
        let mut col_seen = vec![false; self.m2];
        // nodes: rows are 0..m1, columns are m1..m1+m2
        let mut queue = VecDeque::new();
        u[0] = T::zero();
        row_seen[0] = true;
        queue.push_back(0);
        while let Some(node) = queue.pop_front() {
            if node < self.m1 {
                let i = node;
                for &j in &rows[i] {
                    if !col_seen[j] {
                        col_seen[j] = true;
                        v[j] = self.cost.get(i, j) - u[i];
                        queue.push_back(self.m1 + j);
                    }
                }
            } else {
                let j = node - self.m1;
                for &i in &cols[j] {
                    if !row_seen[i] {
                        row_seen[i] = true;
                        u[i] = self.cost.get(i, j) - v[j];
                        queue.push_back(i);
                    }
                }
            }
        }
    }

    fn entering(&self, u: &[T], v: &[T], tol: T, bland: bool) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), T)> = None;
        for (i, &ui) in u.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                if self.basic[i * self.m2 + j] {
                    continue;
                }
                let reduced = self.cost.get(i, j) - ui - vj;
                if reduced < -tol {
                    if bland {
                        return Some((i, j));
                    }
                    if best.is_none_or(|(_, r)| reduced < r) {
                        best = Some(((i, j), reduced));
                    }
                }
            }
        }
        best.map(|(cell, _)| cell)
    }

    /// Path of basic cells from row node `i` to column node `j` in the tree.
    fn tree_path(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        let (rows, cols) = self.adjacency();
        let total = self.m1 + self.m2;
        let mut parent = vec![usize::MAX; total];
        let mut queue = VecDeque::new();
        parent[i] = i;
        queue.push_back(i);
        let target = self.m1 + j;
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            if node < self.m1 {
                for &c in &rows[node] {
                    let next = self.m1 + c;
                    if parent[next] == usize::MAX {
                        parent[next] = node;
                        queue.push_back(next);
                    }
                }
            } else {
                for &r in &cols[node - self.m1] {
                    if parent[r] == usize::MAX {
                        parent[r] = node;
                        queue.push_back(r);
                    }
                }
            }
        }
        let mut path = Vec::new();
        let mut node = target;
        while node != i {
            let prev = parent[node];
            let cell = if node >= self.m1 { (prev, node - self.m1) } else { (node, prev - self.m1) };
            path.push(cell);
            node = prev;
        }
        path.reverse();
        path
    }

    /// Pushes flow around the cycle closed by `enter`; returns the step size.
    fn pivot(&mut self, enter: (usize, usize), bland: bool) -> T {
        let path = self.tree_path(enter.0, enter.1);
        // path alternates; cells at even positions (0, 2, ...) lose flow
        let mut leave_pos = 0;
        let mut theta = T::infinity();
        for (k, &(i, j)) in path.iter().enumerate().step_by(2) {
            let f = self.flow[i * self.m2 + j];
            let better = f < theta || (bland && f == theta && (i, j) < path[leave_pos]);
            if better {
                theta = f;
                leave_pos = k;
            }
        }
        for (k, &(i, j)) in path.iter().enumerate() {
            let idx = i * self.m2 + j;
            self.flow[idx] = if k % 2 == 0 { (self.flow[idx] - theta).max(T::zero()) } else { self.flow[idx] + theta };
        }
        let (li, lj) = path[leave_pos];
        self.flow[li * self.m2 + lj] = T::zero();
        self.basic[li * self.m2 + lj] = false;
        let pos = self.basis.iter().position(|&c| c == (li, lj)).expect("leaving cell is basic");
        self.basis.swap_remove(pos);

        let eidx = enter.0 * self.m2 + enter.1;
        self.flow[eidx] = theta;
        self.basic[eidx] = true;
        self.basis.push(enter);
        theta
    }
}
