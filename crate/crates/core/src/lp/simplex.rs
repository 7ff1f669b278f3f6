//! Two-phase revised primal simplex.
//!
//! Columns are kept in compressed sparse column form; the basis inverse is a
//! dense column-major `m x m` matrix updated in product form after every pivot
//! and rebuilt from scratch periodically. Pricing is Dantzig's rule; after a
//! run of degenerate pivots the solver switches to Bland's rule until it makes
//! progress again.

use super::{LinearProgram, LpBackend, LpSolution, LpStatus, FEASIBILITY_TOL, OPTIMALITY_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    /// Smallest pivot element accepted in the ratio test.
    pub pivot_tol: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    /// Pivots between fresh basis inversions.
    pub refactor_every: usize,
    /// Defaults to `50 * (num_vars + num_rows)`.
    pub max_iterations: Option<usize>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: FEASIBILITY_TOL,
            optimality_tol: OPTIMALITY_TOL,
            pivot_tol: 1e-9,
            bland_after: 1000,
            refactor_every: 400,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Simplex {
    pub options: SimplexOptions,
}

impl Simplex {
    pub fn new(options: SimplexOptions) -> Self {
        Self { options }
    }
}

impl LpBackend for Simplex {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution> {
        lp.validate()?;
        let mut state = State::build(lp, self.options, None);
        state.solve(lp)
    }

    /// Crashes the support of `start` into the initial basis, in rows that
    /// `start` satisfies with equality. Rows it violates keep artificials,
    /// so phase 1 only has to repair those.
    fn solve_from(&self, lp: &LinearProgram, start: &[f64]) -> Result<LpSolution> {
        lp.validate()?;
        if start.len() != lp.num_vars || start.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidLp("start point must be finite, nonnegative and match the variable count".into()));
        }
        let mut state = State::build(lp, self.options, Some(start));
        if !state.crash(start)? {
            state = State::build(lp, self.options, None);
        }
        state.solve(lp)
    }
}

const NONBASIC: usize = usize::MAX;

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

struct State {
    opts: SimplexOptions,
    m: usize,
    n_struct: usize,
    first_art: usize,
    n_total: usize,
    col_start: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<f64>,
    b: Vec<f64>,
    /// Scaled row residuals at the starting point; all nonnegative.
    residual: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    position: Vec<usize>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
    since_refactor: usize,
    degenerate_run: usize,
    bland: bool,
    // scratch
    pi: Vec<f64>,
    alpha: Vec<f64>,
}

impl State {
    fn build(lp: &LinearProgram, opts: SimplexOptions, start: Option<&[f64]>) -> Self {
        let n = lp.num_vars;
        let rows: Vec<(&super::SparseRow, bool)> = lp
            .eq
            .iter()
            .map(|r| (r, false))
            .chain(lp.ub.iter().map(|r| (r, true)))
            .collect();
        let m = rows.len();

        // Row scaling to unit max-norm, with the sign chosen so the residual
        // at the starting point (the origin by default) is nonnegative.
        let mut scale = vec![1.0; m];
        let mut b = vec![0.0; m];
        let mut residual = vec![0.0; m];
        for (i, (row, _)) in rows.iter().enumerate() {
            let big = row.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let mut s = if big > 0.0 { 1.0 / big } else { 1.0 };
            let mut r = row.rhs;
            if let Some(x0) = start {
                r -= row.indices.iter().zip(&row.values).map(|(&j, &v)| v * x0[j]).sum::<f64>();
            }
            if r < 0.0 {
                s = -s;
            }
            scale[i] = s;
            b[i] = row.rhs * s;
            residual[i] = r * s;
        }

        // Slack columns for <= rows; a slack whose coefficient stays +1 can
        // start in the basis, every other row gets an artificial.
        let n_slack = lp.ub.len();
        let first_art = n + n_slack;
        let mut art_rows = Vec::new();
        let mut initial_basis = vec![NONBASIC; m];
        let mut slack_sign = Vec::with_capacity(n_slack);
        for (i, (_, is_ub)) in rows.iter().enumerate() {
            if *is_ub {
                let sign = scale[i].signum();
                let col = n + slack_sign.len();
                slack_sign.push((i, sign));
                if sign > 0.0 {
                    initial_basis[i] = col;
                    continue;
                }
            }
            art_rows.push(i);
        }
        let n_total = first_art + art_rows.len();

        let mut counts = vec![0usize; n_total + 1];
        for (row, _) in &rows {
            for &j in &row.indices {
                counts[j + 1] += 1;
            }
        }
        for j in n..n_total {
            counts[j + 1] = 1;
        }
        for j in 0..n_total {
            counts[j + 1] += counts[j];
        }
        let col_start = counts;
        let nnz = col_start[n_total];
        let mut fill = col_start.clone();
        let mut row_idx = vec![0usize; nnz];
        let mut vals = vec![0.0; nnz];
        for (i, (row, _)) in rows.iter().enumerate() {
            for (&j, &v) in row.indices.iter().zip(&row.values) {
                let p = fill[j];
                row_idx[p] = i;
                vals[p] = v * scale[i];
                fill[j] += 1;
            }
        }
        for (s, &(i, sign)) in slack_sign.iter().enumerate() {
            let p = col_start[n + s];
            row_idx[p] = i;
            vals[p] = sign;
        }
        for (a, &i) in art_rows.iter().enumerate() {
            let col = first_art + a;
            let p = col_start[col];
            row_idx[p] = i;
            vals[p] = 1.0;
            initial_basis[i] = col;
        }

        let mut position = vec![NONBASIC; n_total];
        for (i, &col) in initial_basis.iter().enumerate() {
            position[col] = i;
        }
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let max_iterations = opts.max_iterations.unwrap_or(50 * (n + m).max(1));
        State {
            opts,
            m,
            n_struct: n,
            first_art,
            n_total,
            col_start,
            row_idx,
            vals,
            xb: if start.is_some() { residual.clone() } else { b.clone() },
            b,
            residual,
            cost: vec![0.0; n_total],
            basis: initial_basis,
            position,
            binv,
            iterations: 0,
            max_iterations,
            since_refactor: 0,
            degenerate_run: 0,
            bland: false,
            pi: vec![0.0; m],
            alpha: vec![0.0; m],
        }
    }

    /// Pivots the support of `start` into rows it satisfies exactly, then
    /// recomputes the basic solution. Returns false when the resulting basis
    /// is infeasible, in which case the caller starts cold.
    fn crash(&mut self, start: &[f64]) -> Result<bool> {
        let m = self.m;
        let tol = self.opts.feasibility_tol;
        for j in (0..self.n_struct).filter(|&j| start[j] > 0.0) {
            self.ftran(j);
            let mut best: Option<(usize, f64)> = None;
            for r in 0..m {
                if self.basis[r] < self.first_art || self.residual[r] > tol {
                    continue;
                }
                let a = self.alpha[r].abs();
                if a > 1e-7 && best.is_none_or(|(_, ba)| a > ba) {
                    best = Some((r, a));
                }
            }
            if let Some((r, _)) = best {
                self.pivot(j, r, 0.0);
                if self.since_refactor >= self.opts.refactor_every {
                    self.refactor()?;
                }
            }
        }
        self.refactor()?;
        if self.xb.iter().any(|&v| v < -tol) {
            return Ok(false);
        }
        for v in &mut self.xb {
            *v = v.max(0.0);
        }
        Ok(true)
    }

    fn solve(&mut self, lp: &LinearProgram) -> Result<LpSolution> {
        if self.first_art < self.n_total {
            for j in self.first_art..self.n_total {
                self.cost[j] = 1.0;
            }
            match self.run_phase()? {
                PhaseOutcome::Optimal => {}
                PhaseOutcome::Unbounded => unreachable!("phase 1 objective is bounded below"),
            }
            self.refactor()?;
            let infeasibility: f64 = (0..self.m)
                .filter(|&i| self.basis[i] >= self.first_art)
                .map(|i| self.xb[i].max(0.0))
                .sum();
            if infeasibility > self.opts.feasibility_tol {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    x: vec![0.0; self.n_struct],
                    objective_value: f64::NAN,
                    iterations: self.iterations,
                });
            }
            self.drive_out_artificials()?;
            for j in self.first_art..self.n_total {
                self.cost[j] = 0.0;
            }
        }

        self.cost[..self.n_struct].copy_from_slice(&lp.objective);
        self.degenerate_run = 0;
        self.bland = false;
        let outcome = self.run_phase()?;
        if let PhaseOutcome::Unbounded = outcome {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                x: vec![0.0; self.n_struct],
                objective_value: f64::NEG_INFINITY,
                iterations: self.iterations,
            });
        }
        self.refactor()?;
        let mut x = vec![0.0; self.n_struct];
        for (i, &col) in self.basis.iter().enumerate() {
            if col < self.n_struct {
                x[col] = self.xb[i];
            }
        }
        for v in &mut x {
            if *v < 0.0 && *v > -self.opts.feasibility_tol {
                *v = 0.0;
            }
        }
        Ok(LpSolution {
            status: LpStatus::Optimal,
            objective_value: lp.objective_value(&x),
            x,
            iterations: self.iterations,
        })
    }

    fn run_phase(&mut self) -> Result<PhaseOutcome> {
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::IterationCap(self.max_iterations));
            }
            if self.since_refactor >= self.opts.refactor_every {
                self.refactor()?;
            }
            self.compute_duals();
            let Some(entering) = self.price() else {
                return Ok(PhaseOutcome::Optimal);
            };
            self.ftran(entering);
            let Some((leave_row, theta)) = self.ratio_test() else {
                return Ok(PhaseOutcome::Unbounded);
            };
            if theta <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run > self.opts.bland_after {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
                self.bland = false;
            }
            self.pivot(entering, leave_row, theta);
            self.iterations += 1;
        }
    }

    fn compute_duals(&mut self) {
        let m = self.m;
        for j in 0..m {
            let col = &self.binv[j * m..(j + 1) * m];
            self.pi[j] = self
                .basis
                .iter()
                .zip(col)
                .map(|(&bj, &v)| self.cost[bj] * v)
                .sum();
        }
    }

    fn reduced_cost(&self, j: usize) -> f64 {
        let mut d = self.cost[j];
        for p in self.col_start[j]..self.col_start[j + 1] {
            d -= self.pi[self.row_idx[p]] * self.vals[p];
        }
        d
    }

    /// Artificial columns never re-enter once they leave.
    fn price(&self) -> Option<usize> {
        let tol = self.opts.optimality_tol;
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.first_art {
            if self.position[j] != NONBASIC {
                continue;
            }
            let d = self.reduced_cost(j);
            if d < -tol {
                if self.bland {
                    return Some(j);
                }
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((j, d));
                }
            }
        }
        best.map(|(j, _)| j)
    }

    fn ftran(&mut self, j: usize) {
        let m = self.m;
        self.alpha.iter_mut().for_each(|a| *a = 0.0);
        for p in self.col_start[j]..self.col_start[j + 1] {
            let (r, v) = (self.row_idx[p], self.vals[p]);
            let col = &self.binv[r * m..(r + 1) * m];
            for (a, &c) in self.alpha.iter_mut().zip(col) {
                *a += v * c;
            }
        }
    }

    fn ratio_test(&self) -> Option<(usize, f64)> {
        let tol = self.opts.pivot_tol;
        let mut theta_min = f64::INFINITY;
        for i in 0..self.m {
            let a = self.alpha[i];
            if a > tol {
                theta_min = theta_min.min(self.xb[i].max(0.0) / a);
            }
        }
        if !theta_min.is_finite() {
            return None;
        }
        let slack = theta_min + 1e-12 * (1.0 + theta_min);
        let mut choice: Option<usize> = None;
        for i in 0..self.m {
            let a = self.alpha[i];
            if a > tol && self.xb[i].max(0.0) / a <= slack {
                choice = match choice {
                    None => Some(i),
                    Some(c) if self.bland => {
                        if self.basis[i] < self.basis[c] {
                            Some(i)
                        } else {
                            Some(c)
                        }
                    }
                    Some(c) => {
                        if a > self.alpha[c] {
                            Some(i)
                        } else {
                            Some(c)
                        }
                    }
                };
            }
        }
        choice.map(|r| (r, self.xb[r].max(0.0) / self.alpha[r]))
    }

    fn pivot(&mut self, entering: usize, r: usize, theta: f64) {
        let m = self.m;
        for i in 0..m {
            self.xb[i] -= theta * self.alpha[i];
        }
        self.xb[r] = theta;
        let ar = self.alpha[r];
        for c in 0..m {
            let col = &mut self.binv[c * m..(c + 1) * m];
            let t = col[r];
            if t == 0.0 {
                continue;
            }
            let t = t / ar;
            for (v, &a) in col.iter_mut().zip(&self.alpha) {
                *v -= a * t;
            }
            col[r] = t;
        }
        let leaving = self.basis[r];
        self.position[leaving] = NONBASIC;
        self.basis[r] = entering;
        self.position[entering] = r;
        self.since_refactor += 1;
    }

    /// Pivots zero-valued artificials out of the basis where some structural
    /// or slack column has a nonzero entry in their row. Artificials left
    /// behind sit on redundant rows and stay at zero.
    fn drive_out_artificials(&mut self) -> Result<()> {
        let m = self.m;
        let mut rho = vec![0.0; m];
        for r in 0..m {
            if self.basis[r] < self.first_art {
                continue;
            }
            for (k, v) in rho.iter_mut().enumerate() {
                *v = self.binv[k * m + r];
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.first_art {
                if self.position[j] != NONBASIC {
                    continue;
                }
                let mut a = 0.0;
                for p in self.col_start[j]..self.col_start[j + 1] {
                    a += rho[self.row_idx[p]] * self.vals[p];
                }
                if a.abs() > 1e-7 && best.is_none_or(|(_, ba)| a.abs() > ba.abs()) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                self.ftran(j);
                let theta = self.xb[r] / self.alpha[r];
                self.pivot(j, r, theta);
                if self.since_refactor >= self.opts.refactor_every {
                    self.refactor()?;
                }
            }
        }
        self.refactor()
    }

    /// Rebuilds the basis inverse by Gauss-Jordan elimination with partial
    /// pivoting and recomputes the basic solution from it.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        // Row-major working copies of B and the identity.
        let mut a = vec![0.0; m * m];
        for (c, &col) in self.basis.iter().enumerate() {
            for p in self.col_start[col]..self.col_start[col + 1] {
                a[self.row_idx[p] * m + c] = self.vals[p];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let (piv, big) = (c..m)
                .map(|r| (r, a[r * m + c].abs()))
                .fold((c, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if big < 1e-14 {
                return Err(Error::InvalidLp("singular basis during refactorization".into()));
            }
            if piv != c {
                for k in 0..m {
                    a.swap(piv * m + k, c * m + k);
                    inv.swap(piv * m + k, c * m + k);
                }
            }
            let d = a[c * m + c];
            for k in 0..m {
                a[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            let (pa, pi) = (a[c * m..(c + 1) * m].to_vec(), inv[c * m..(c + 1) * m].to_vec());
            for r in 0..m {
                if r == c {
                    continue;
                }
                let f = a[r * m + c];
                if f == 0.0 {
                    continue;
                }
                let (ra, ri) = (&mut a[r * m..(r + 1) * m], &mut inv[r * m..(r + 1) * m]);
                for k in c..m {
                    ra[k] -= f * pa[k];
                }
                for k in 0..m {
                    ri[k] -= f * pi[k];
                }
            }
        }
        // inv is row-major B^{-1}; store column-major.
        for r in 0..m {
            for c in 0..m {
                self.binv[c * m + r] = inv[r * m + c];
            }
        }
        for i in 0..m {
            self.xb[i] = 0.0;
        }
        for k in 0..m {
            let bk = self.b[k];
            if bk == 0.0 {
                continue;
            }
            let col = &self.binv[k * m..(k + 1) * m];
            for (x, &v) in self.xb.iter_mut().zip(col) {
                *x += bk * v;
            }
        }
        Ok(())
    }
}
