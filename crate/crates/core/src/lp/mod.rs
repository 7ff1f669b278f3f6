//! Linear programs in the form
//!
//! ```text
//! minimize    c·x
//! subject to  A_eq x  = b_eq
//!             A_ub x <= b_ub
//!             x >= 0
//! ```
//!
//! and a solver contract ([`LpBackend`]) with an embedded two-phase revised
//! simplex implementation ([`Simplex`]).

mod simplex;

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub use simplex::{Simplex, SimplexOptions};

/// Feasibility tolerance: a phase-1 optimum above this is infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Reduced-cost tolerance for optimality.
pub const OPTIMALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub rhs: f64,
}

impl SparseRow {
    pub fn new(entries: impl IntoIterator<Item = (usize, f64)>, rhs: f64) -> Self {
        let (indices, values) = entries.into_iter().filter(|&(_, v)| v != 0.0).unzip();
        Self { indices, values, rhs }
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.indices.iter().zip(&self.values).map(|(&i, &v)| v * x[i]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub eq: Vec<SparseRow>,
    pub ub: Vec<SparseRow>,
}

impl LinearProgram {
    /// A pure feasibility problem (zero objective).
    pub fn feasibility(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            eq: Vec::new(),
            ub: Vec::new(),
        }
    }

    pub fn add_eq(&mut self, entries: impl IntoIterator<Item = (usize, f64)>, rhs: f64) {
        self.eq.push(SparseRow::new(entries, rhs));
    }

    pub fn add_ub(&mut self, entries: impl IntoIterator<Item = (usize, f64)>, rhs: f64) {
        self.ub.push(SparseRow::new(entries, rhs));
    }

    pub fn num_rows(&self) -> usize {
        self.eq.len() + self.ub.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(Error::InvalidLp(format!(
                "objective has {} entries for {} variables",
                self.objective.len(),
                self.num_vars
            )));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidLp("non-finite objective coefficient".into()));
        }
        for (kind, rows) in [("eq", &self.eq), ("ub", &self.ub)] {
            for (r, row) in rows.iter().enumerate() {
                if row.indices.len() != row.values.len() {
                    return Err(Error::InvalidLp(format!("{kind} row {r}: index/value length mismatch")));
                }
                if let Some(&i) = row.indices.iter().find(|&&i| i >= self.num_vars) {
                    return Err(Error::InvalidLp(format!(
                        "{kind} row {r}: index {i} >= num_vars {}",
                        self.num_vars
                    )));
                }
                if !row.rhs.is_finite() || row.values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidLp(format!("{kind} row {r}: non-finite value")));
                }
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Residuals of `x` against every constraint, computed directly from the
    /// rows rather than from any solver state.
    pub fn residuals(&self, x: &[f64]) -> Residuals {
        let eq = self.eq.iter().map(|r| (r.dot(x) - r.rhs).abs()).fold(0.0, f64::max);
        let ub = self.ub.iter().map(|r| r.dot(x) - r.rhs).fold(0.0, f64::max);
        let neg = x.iter().map(|&v| -v).fold(0.0, f64::max);
        let b_inf = self.eq.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        Residuals {
            max_eq: eq,
            max_ub: ub,
            max_negative: neg,
            eq_rhs_inf: b_inf,
        }
    }

    /// Plain-text dump, one constraint per line:
    ///
    /// ```text
    /// vars 3
    /// min 0:1 2:-1
    /// eq 0:1 1:1 = 1
    /// ub 2:1 <= 3
    /// ```
    pub fn dump(&self) -> String {
        fn terms(out: &mut String, idx: impl Iterator<Item = (usize, f64)>) {
            for (i, v) in idx {
                let _ = write!(out, " {i}:{v}");
            }
        }
        let mut s = String::new();
        let _ = writeln!(s, "vars {}", self.num_vars);
        s.push_str("min");
        terms(
            &mut s,
            self.objective.iter().copied().enumerate().filter(|&(_, c)| c != 0.0),
        );
        s.push('\n');
        for row in &self.eq {
            s.push_str("eq");
            terms(&mut s, row.indices.iter().copied().zip(row.values.iter().copied()));
            let _ = writeln!(s, " = {}", row.rhs);
        }
        for row in &self.ub {
            s.push_str("ub");
            terms(&mut s, row.indices.iter().copied().zip(row.values.iter().copied()));
            let _ = writeln!(s, " <= {}", row.rhs);
        }
        s
    }

    /// Parses the format written by [`LinearProgram::dump`].
    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut lp = LinearProgram::default();
        let mut saw_vars = false;
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            let mut toks = line.split_whitespace();
            let Some(head) = toks.next() else { continue };
            let rest: Vec<&str> = toks.collect();
            let parse_terms = |toks: &[&str]| -> Result<Vec<(usize, f64)>> {
                toks.iter()
                    .map(|t| {
                        let (i, v) = t.split_once(':').ok_or_else(|| perr(format!("bad term {t:?}")))?;
                        Ok((
                            i.parse().map_err(|_| perr(format!("bad index {i:?}")))?,
                            v.parse().map_err(|_| perr(format!("bad value {v:?}")))?,
                        ))
                    })
                    .collect()
            };
            match head {
                "vars" => {
                    let n: usize = rest
                        .first()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr("bad vars line".into()))?;
                    lp.num_vars = n;
                    lp.objective = vec![0.0; n];
                    saw_vars = true;
                }
                "min" => {
                    if !saw_vars {
                        return Err(perr("min before vars".into()));
                    }
                    for (i, v) in parse_terms(&rest)? {
                        if i >= lp.num_vars {
                            return Err(perr(format!("index {i} out of range")));
                        }
                        lp.objective[i] = v;
                    }
                }
                "eq" | "ub" => {
                    let op = if head == "eq" { "=" } else { "<=" };
                    let pos = rest
                        .iter()
                        .position(|&t| t == op)
                        .ok_or_else(|| perr(format!("missing {op}")))?;
                    let rhs: f64 = rest
                        .get(pos + 1)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr("bad rhs".into()))?;
                    let row = SparseRow::new(parse_terms(&rest[..pos])?, rhs);
                    if head == "eq" {
                        lp.eq.push(row);
                    } else {
                        lp.ub.push(row);
                    }
                }
                other => return Err(perr(format!("unknown line kind {other:?}"))),
            }
        }
        lp.validate()?;
        Ok(lp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub max_eq: f64,
    pub max_ub: f64,
    pub max_negative: f64,
    pub eq_rhs_inf: f64,
}

impl Residuals {
    /// The tolerances an `Optimal` answer must meet.
    pub fn acceptable(&self) -> bool {
        self.max_eq <= 1e-7 * (1.0 + self.eq_rhs_inf) && self.max_ub <= 1e-7 && self.max_negative <= 1e-9
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpStatus {
    pub fn name(self) -> &'static str {
        match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; meaningful only when `status` is `Optimal`.
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
}

/// Anything that can solve a [`LinearProgram`].
pub trait LpBackend: Sync {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution>;

    /// Same contract; the objective is ignored and any feasible point is
    /// acceptable.
    fn solve_feasibility(&self, lp: &LinearProgram) -> Result<LpSolution> {
        let mut lp = lp.clone();
        lp.objective.iter_mut().for_each(|c| *c = 0.0);
        self.solve(&lp)
    }

    /// Same contract, with a hint: a nonnegative point whose support the
    /// solver may use to build its starting basis. Backends are free to
    /// ignore it.
    fn solve_from(&self, lp: &LinearProgram, _start: &[f64]) -> Result<LpSolution> {
        self.solve(lp)
    }
}

impl<T: LpBackend + ?Sized> LpBackend for &T {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution> {
        (**self).solve(lp)
    }

    fn solve_from(&self, lp: &LinearProgram, start: &[f64]) -> Result<LpSolution> {
        (**self).solve_from(lp, start)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_x_bounded() {
        let mut lp = LinearProgram::feasibility(1);
        lp.objective[0] = -1.0;
        lp.add_ub([(0, 1.0)], 3.0);
        let sol = Simplex::default().solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 3.0).abs() < 1e-12);
        assert!((sol.objective_value + 3.0).abs() < 1e-12);
    }

    #[test]
    fn forced_negative_is_infeasible() {
        let mut lp = LinearProgram::feasibility(2);
        lp.add_eq([(0, 1.0), (1, 1.0)], 1.0);
        lp.add_eq([(0, 1.0), (1, -1.0)], 3.0);
        let sol = Simplex::default().solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::feasibility(2);
        lp.objective = vec![-1.0, 0.0];
        lp.add_ub([(0, 1.0), (1, -1.0)], 1.0);
        let sol = Simplex::default().solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn simple_feasibility() {
        let mut lp = LinearProgram::feasibility(2);
        lp.add_eq([(0, 1.0), (1, 1.0)], 1.0);
        let sol = Simplex::default().solve_feasibility(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] + sol.x[1] - 1.0).abs() < 1e-9);
        assert!(lp.residuals(&sol.x).acceptable());
    }

    #[test]
    fn vacuous_feasibility() {
        let lp = LinearProgram::feasibility(3);
        let sol = Simplex::default().solve_feasibility(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.x, vec![0.0; 3]);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut lp = LinearProgram::feasibility(2);
        lp.add_eq([(5, 1.0)], 1.0);
        assert!(matches!(Simplex::default().solve(&lp), Err(Error::InvalidLp(_))));
        let mut lp = LinearProgram::feasibility(2);
        lp.objective.push(1.0);
        assert!(matches!(Simplex::default().solve(&lp), Err(Error::InvalidLp(_))));
    }

    #[test]
    fn redundant_rows_handled() {
        // Transportation problem with the usual dependent row.
        let mut lp = LinearProgram::feasibility(4);
        lp.objective = vec![1.0, 3.0, 2.0, 1.0];
        lp.add_eq([(0, 1.0), (1, 1.0)], 0.4);
        lp.add_eq([(2, 1.0), (3, 1.0)], 0.6);
        lp.add_eq([(0, 1.0), (2, 1.0)], 0.5);
        lp.add_eq([(1, 1.0), (3, 1.0)], 0.5);
        let sol = Simplex::default().solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        // x0 = 0.4, x2 = 0.1, x3 = 0.5 -> 0.4 + 0.2 + 0.5
        assert!((sol.objective_value - 1.1).abs() < 1e-12, "{}", sol.objective_value);
        assert!(lp.residuals(&sol.x).acceptable());
    }

    #[test]
    fn negative_rhs_ub() {
        // x0 + x1 >= 2 written as -x0 - x1 <= -2; minimize x0 + 2 x1.
        let mut lp = LinearProgram::feasibility(2);
        lp.objective = vec![1.0, 2.0];
        lp.add_ub([(0, -1.0), (1, -1.0)], -2.0);
        let sol = Simplex::default().solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dump_roundtrip() {
        let mut lp = LinearProgram::feasibility(3);
        lp.objective = vec![1.5, 0.0, -2.0];
        lp.add_eq([(0, 1.0), (2, 0.25)], 1.0);
        lp.add_ub([(1, -3.0)], 4.5);
        let text = lp.dump();
        assert_eq!(LinearProgram::parse_dump(&text).unwrap(), lp);
    }

    #[test]
    fn deterministic() {
        let mut lp = LinearProgram::feasibility(3);
        lp.objective = vec![-1.0, -1.0, -1.0];
        lp.add_ub([(0, 1.0), (1, 1.0)], 1.0);
        lp.add_ub([(1, 1.0), (2, 1.0)], 1.0);
        lp.add_ub([(0, 1.0), (2, 1.0)], 1.0);
        let a = Simplex::default().solve(&lp).unwrap();
        let b = Simplex::default().solve(&lp).unwrap();
        assert_eq!(a, b);
        assert!((a.objective_value + 1.5).abs() < 1e-12);
    }
}
