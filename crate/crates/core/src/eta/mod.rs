//! Target edge-mix matrices and attainable assortativity bounds.
//!
//! For a fixed degree-pair distribution `ν`, the source and target masses of
//! every degree pair are fixed, so the set of admissible `η` is a
//! transportation polytope. Each `Σ k l e^{(a,b)}_{kl}` is linear in `η` and
//! an affine function of `r(a, b)` ([`EtaProblem::g_map`]), so target
//! equalities and conditioning intervals are linear rows of the same LP.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::assort::{csv_err, AssortProfile, EdgeEndDistributions, EdgeMixMatrix, TypePair};
use crate::error::{Error, Result};
use crate::graph::{DegreePair, DegreePairDist, DirectedGraph};
use crate::lp::{LinearProgram, LpBackend, LpStatus};

mod interior;

use interior::Newton;

/// Slack allowed on reported bounds before mapping back into `[-1, 1]`.
pub const BOUND_OVERSHOOT_TOL: f64 = 1e-6;

/// `L <= r(pair) <= U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub pair: TypePair,
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(pair: TypePair, lower: f64, upper: f64) -> Self {
        Self { pair, lower, upper }
    }

    pub fn singleton(pair: TypePair, value: f64) -> Self {
        Self::new(pair, value, value)
    }
}

#[derive(Debug, Clone)]
pub struct EtaProblem {
    nu: DegreePairDist,
    source: Vec<(DegreePair, f64)>,
    target: Vec<(DegreePair, f64)>,
    ends: EdgeEndDistributions,
    pub targets: Option<AssortProfile>,
    pub intervals: Vec<Interval>,
}

impl EtaProblem {
    pub fn new(nu: DegreePairDist) -> Result<Self> {
        let source = nu.source_mass();
        let target = nu.target_mass();
        if source.is_empty() || target.is_empty() {
            return Err(Error::NoEdges);
        }
        let ends = EdgeEndDistributions::from_masses(source.iter().copied(), target.iter().copied());
        Ok(Self {
            nu,
            source,
            target,
            ends,
            targets: None,
            intervals: Vec::new(),
        })
    }

    pub fn from_graph(g: &DirectedGraph) -> Result<Self> {
        Self::new(g.degree_pair_dist()?)
    }

    pub fn with_targets(mut self, targets: AssortProfile) -> Self {
        self.targets = Some(targets);
        self
    }

    pub fn with_interval(mut self, interval: Interval) -> Self {
        self.intervals.push(interval);
        self
    }

    pub fn nu(&self) -> &DegreePairDist {
        &self.nu
    }

    pub fn ends(&self) -> &EdgeEndDistributions {
        &self.ends
    }

    pub fn source_pairs(&self) -> Vec<DegreePair> {
        self.source.iter().map(|p| p.0).collect()
    }

    pub fn target_pairs(&self) -> Vec<DegreePair> {
        self.target.iter().map(|p| p.0).collect()
    }

    pub fn source_mass(&self) -> &[(DegreePair, f64)] {
        &self.source
    }

    pub fn target_mass(&self) -> &[(DegreePair, f64)] {
        &self.target
    }

    pub fn num_vars(&self) -> usize {
        self.source.len() * self.target.len()
    }

    /// `g^{(a,b)}(r) = σ_q^(a) σ_q̃^(b) r + Σ k l q_k^(a) q̃_l^(b)`.
    pub fn g_map(&self, pair: TypePair, r: f64) -> Result<f64> {
        g_map(pair, r, &self.ends)
    }

    /// Inverse of [`EtaProblem::g_map`].
    pub fn g_inverse(&self, pair: TypePair, value: f64) -> Result<f64> {
        let s = self.ends.sigma_product(pair)?;
        Ok((value - self.ends.independent_product(pair)) / s)
    }

    /// Coefficients of `Σ k l e^{(a,b)}_{kl}` over the row-major `H` variables.
    fn product_row(&self, pair: TypePair) -> Vec<(usize, f64)> {
        let (sa, tb) = (pair.source(), pair.target());
        let cols = self.target.len();
        let mut row = Vec::new();
        for (u, &(sp, _)) in self.source.iter().enumerate() {
            let x = sa.of(sp) as f64;
            if x == 0.0 {
                continue;
            }
            for (v, &(tp, _)) in self.target.iter().enumerate() {
                let y = tb.of(tp) as f64;
                if y != 0.0 {
                    row.push((u * cols + v, x * y));
                }
            }
        }
        row
    }

    /// The coupling of the source and target masses that pairs sources
    /// sorted by their `pair.source()` degree with targets sorted by their
    /// `pair.target()` degree, in the same order when `comonotone` and in
    /// opposite orders otherwise. Because the product row's coefficients are
    /// products `x_u y_v`, the comonotone coupling maximizes it over the
    /// transportation polytope and the antitone one minimizes it.
    fn monotone_coupling(&self, pair: TypePair, comonotone: bool) -> Vec<f64> {
        let cols = self.target.len();
        let mut us: Vec<usize> = (0..self.source.len()).collect();
        let mut vs: Vec<usize> = (0..cols).collect();
        us.sort_by_key(|&u| pair.source().of(self.source[u].0));
        vs.sort_by_key(|&v| pair.target().of(self.target[v].0));
        if !comonotone {
            vs.reverse();
        }
        let mut eta = vec![0.0; self.num_vars()];
        let (mut i, mut k) = (0, 0);
        let (mut ru, mut rv) = (self.source[us[0]].1, self.target[vs[0]].1);
        loop {
            let flow = ru.min(rv);
            eta[us[i] * cols + vs[k]] += flow;
            if ru <= rv {
                rv -= ru;
                i += 1;
                if i == us.len() {
                    break;
                }
                ru = self.source[us[i]].1;
            } else {
                ru -= rv;
                k += 1;
                if k == vs.len() {
                    break;
                }
                rv = self.target[vs[k]].1;
            }
        }
        eta
    }

    fn marginal_lp(&self) -> LinearProgram {
        let cols = self.target.len();
        let mut lp = LinearProgram::feasibility(self.num_vars());
        for (u, &(_, mass)) in self.source.iter().enumerate() {
            lp.add_eq((0..cols).map(|v| (u * cols + v, 1.0)), mass);
        }
        for (v, &(_, mass)) in self.target.iter().enumerate() {
            lp.add_eq((0..self.source.len()).map(|u| (u * cols + v, 1.0)), mass);
        }
        lp
    }

    fn push_interval(&self, lp: &mut LinearProgram, iv: &Interval) -> Result<()> {
        let row = self.product_row(iv.pair);
        let hi = self.g_map(iv.pair, iv.upper)?;
        let lo = self.g_map(iv.pair, iv.lower)?;
        lp.add_ub(row.iter().copied(), hi);
        lp.add_ub(row.iter().map(|&(i, c)| (i, -c)), -lo);
        Ok(())
    }

    /// The LP over `H` (row-major, source pairs by target pairs): row and
    /// column marginal equalities, then one equality per target coefficient,
    /// then two `<=` rows per conditioning interval. The marginal families
    /// share total mass, so one of their rows is redundant; it is kept.
    pub fn assemble_constraints(&self) -> Result<LinearProgram> {
        let mut lp = self.marginal_lp();
        if let Some(t) = self.targets {
            for pair in TypePair::ALL {
                let rhs = self.g_map(pair, t.get(pair))?;
                lp.add_eq(self.product_row(pair), rhs);
            }
        }
        for iv in &self.intervals {
            self.push_interval(&mut lp, iv)?;
        }
        Ok(lp)
    }

    fn to_matrix(&self, values: Vec<f64>) -> Result<EdgeMixMatrix> {
        EdgeMixMatrix::new(self.source_pairs(), self.target_pairs(), values)
    }

    /// The observed-graph witness: `η` of `g` laid out on this problem's support.
    pub fn witness_vector(&self, eta: &EdgeMixMatrix) -> Result<Vec<f64>> {
        if eta.source_pairs() != self.source_pairs().as_slice() || eta.target_pairs() != self.target_pairs().as_slice()
        {
            return Err(Error::SupportMismatch);
        }
        Ok(eta.values().to_vec())
    }
}

pub fn g_map(pair: TypePair, r: f64, ends: &EdgeEndDistributions) -> Result<f64> {
    Ok(ends.sigma_product(pair)? * r + ends.independent_product(pair))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaMethod {
    /// Strictly positive `η` closest in KL divergence to the independent
    /// coupling of the marginals.
    #[default]
    MaxEntropy,
    /// Strictly positive `η` maximizing `Σ ln η` (the analytic center).
    /// Much slower to compute, and the chain mixes slowly toward it.
    AnalyticCenter,
    /// A basic feasible solution of the zero-objective LP.
    Vertex,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EtaOutcome {
    Solved(EdgeMixMatrix),
    Unattainable,
}

impl EtaOutcome {
    pub fn solved(self) -> Option<EdgeMixMatrix> {
        match self {
            EtaOutcome::Solved(m) => Some(m),
            EtaOutcome::Unattainable => None,
        }
    }
}

fn check_targets(t: &AssortProfile) -> Result<()> {
    if t.to_array().iter().any(|r| !(-1.0..=1.0).contains(r)) {
        return Err(Error::InvalidParam(format!("targets must lie in [-1, 1], got {t:?}")));
    }
    Ok(())
}

/// Finds an `η` matching the problem's `ν` marginals and all four targets.
///
/// The interior methods report unattainable targets from a dual certificate.
/// When Newton's method stalls without one (targets on or near the
/// attainable boundary) they fall back to the LP, which decides
/// attainability; the returned `η` then maximizes a uniform floor
/// `η >= ε s tᵀ`.
pub fn solve_target_eta<B: LpBackend>(problem: &EtaProblem, method: EtaMethod, backend: &B) -> Result<EtaOutcome> {
    let targets = problem
        .targets
        .ok_or_else(|| Error::InvalidParam("solve_target_eta needs four targets".into()))?;
    check_targets(&targets)?;
    for pair in TypePair::ALL {
        problem.ends.sigma_product(pair)?;
    }
    let interior = match method {
        EtaMethod::AnalyticCenter => Some(interior::analytic_center(problem, &targets)),
        EtaMethod::MaxEntropy => Some(interior::max_entropy(problem, &targets)),
        EtaMethod::Vertex => None,
    };
    match interior {
        Some(Newton::Solved(values)) => return Ok(EtaOutcome::Solved(problem.to_matrix(values)?)),
        Some(Newton::Infeasible) => return Ok(EtaOutcome::Unattainable),
        Some(Newton::Stalled) => return floor_lp_eta(problem, backend),
        None => {}
    }
    let mut lp = problem.assemble_constraints()?;
    lp.objective.iter_mut().for_each(|c| *c = 0.0);
    let sol = backend.solve_feasibility(&lp)?;
    match sol.status {
        LpStatus::Infeasible => Ok(EtaOutcome::Unattainable),
        LpStatus::Unbounded => Err(Error::UnexpectedLpStatus("unbounded")),
        LpStatus::Optimal => {
            let values = sol.x.into_iter().map(|v| v.max(0.0)).collect();
            Ok(EtaOutcome::Solved(problem.to_matrix(values)?))
        }
    }
}

/// `η = ε s tᵀ + ξ` with `ε` maximal and `ξ >= 0`.
fn floor_lp_eta<B: LpBackend>(problem: &EtaProblem, backend: &B) -> Result<EtaOutcome> {
    let base = problem.assemble_constraints()?;
    let n = base.num_vars;
    let cols = problem.target.len();
    let reference: Vec<f64> = problem
        .source
        .iter()
        .flat_map(|&(_, s)| problem.target.iter().map(move |&(_, t)| s * t))
        .collect();
    let mut lp = LinearProgram::feasibility(n + 1);
    lp.objective[n] = -1.0;
    for row in &base.eq {
        let floor: f64 = row.indices.iter().zip(&row.values).map(|(&i, &c)| c * reference[i]).sum();
        let entries = row
            .indices
            .iter()
            .copied()
            .zip(row.values.iter().copied())
            .chain(std::iter::once((n, floor)));
        lp.add_eq(entries, row.rhs);
    }
    for row in &base.ub {
        let floor: f64 = row.indices.iter().zip(&row.values).map(|(&i, &c)| c * reference[i]).sum();
        let entries = row
            .indices
            .iter()
            .copied()
            .zip(row.values.iter().copied())
            .chain(std::iter::once((n, floor)));
        lp.add_ub(entries, row.rhs);
    }
    let sol = backend.solve(&lp)?;
    match sol.status {
        LpStatus::Infeasible => Ok(EtaOutcome::Unattainable),
        LpStatus::Unbounded => Err(Error::UnexpectedLpStatus("unbounded")),
        LpStatus::Optimal => {
            let eps = sol.x[n].max(0.0);
            let values = (0..n).map(|i| (sol.x[i] + eps * reference[i]).max(0.0)).collect();
            debug_assert_eq!(cols * problem.source.len(), n);
            Ok(EtaOutcome::Solved(problem.to_matrix(values)?))
        }
    }
}

/// Lower and upper bound per coefficient; `None` for pairs not queried.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AssortBounds {
    pub bounds: [Option<(f64, f64)>; 4],
}

impl AssortBounds {
    pub fn get(&self, pair: TypePair) -> Option<(f64, f64)> {
        self.bounds[pair.index()]
    }

    pub fn lower(&self, pair: TypePair) -> Option<f64> {
        self.get(pair).map(|b| b.0)
    }

    pub fn upper(&self, pair: TypePair) -> Option<f64> {
        self.get(pair).map(|b| b.1)
    }

    pub fn width(&self, pair: TypePair) -> Option<f64> {
        self.get(pair).map(|(l, u)| u - l)
    }
}

fn clamp_bound(r: f64) -> Result<f64> {
    if !(-1.0 - BOUND_OVERSHOOT_TOL..=1.0 + BOUND_OVERSHOOT_TOL).contains(&r) {
        return Err(Error::BoundOvershoot((r.abs() - 1.0).max(0.0)));
    }
    Ok(r.clamp(-1.0, 1.0))
}

/// Attainable range of each coefficient in `order`, given `ν` and the
/// problem's conditioning intervals. An interval on the queried coefficient
/// itself is left out of that coefficient's own LP, so the result answers
/// "which values of this coefficient are compatible with the others".
/// Exact targets, if any, are not used.
pub fn coefficient_bounds<B: LpBackend>(problem: &EtaProblem, order: &[TypePair], backend: &B) -> Result<AssortBounds> {
    let base = problem.marginal_lp();
    let mut out = AssortBounds::default();
    for &pair in order {
        let mut lp = base.clone();
        for iv in problem.intervals.iter().filter(|iv| iv.pair != pair) {
            problem.push_interval(&mut lp, iv)?;
        }
        let conditioned = lp.ub.len() > base.ub.len();
        let row = problem.product_row(pair);
        let mut ends = [0.0; 2];
        for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
            // Monotone couplings are the exact extremes without conditioning,
            // and a good starting basis with it.
            let coupling = problem.monotone_coupling(pair, sign < 0.0);
            let x = if conditioned {
                lp.objective.iter_mut().for_each(|c| *c = 0.0);
                for &(i, c) in &row {
                    lp.objective[i] = sign * c;
                }
                let sol = backend.solve_from(&lp, &coupling)?;
                match sol.status {
                    LpStatus::Optimal => {}
                    LpStatus::Infeasible => return Err(Error::ConditioningUnattainable),
                    LpStatus::Unbounded => return Err(Error::UnexpectedLpStatus("unbounded")),
                }
                sol.x
            } else {
                coupling
            };
            let value: f64 = row.iter().map(|&(i, c)| c * x[i]).sum();
            ends[k] = clamp_bound(problem.g_inverse(pair, value)?)?;
        }
        let (lo, hi) = (ends[0].min(ends[1]), ends[0].max(ends[1]));
        out.bounds[pair.index()] = Some((lo, hi));
    }
    Ok(out)
}

/// One row of the bounds CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRecord {
    pub conditioned_pair: String,
    pub conditioned_value: f64,
    pub pair: String,
    pub lower: f64,
    pub upper: f64,
}

/// Writes `conditioned_pair,conditioned_value,pair,lower,upper` rows.
pub fn write_bounds_csv<W: Write>(
    writer: W,
    rows: impl IntoIterator<Item = (Option<Interval>, TypePair, (f64, f64))>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["conditioned_pair", "conditioned_value", "pair", "lower", "upper"])
        .map_err(csv_err)?;
    for (cond, pair, (lo, hi)) in rows {
        let (cp, cv) = match cond {
            Some(iv) => (iv.pair.to_string(), format!("{}", iv.lower)),
            None => (String::new(), String::new()),
        };
        w.write_record([cp, cv, pair.to_string(), format!("{lo}"), format!("{hi}")])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Simplex;
    use approx::assert_abs_diff_eq;

    #[test]
    fn toy_lp_dimensions() {
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 2), (2, 1), (2, 0)]);
        let p = EtaProblem::from_graph(&g).unwrap();
        // Degree pairs (1,1), (1,2), (2,1), all with both degrees positive.
        assert_eq!(p.source_pairs(), vec![(1, 1), (1, 2), (2, 1)]);
        assert_eq!(p.target_pairs(), vec![(1, 1), (1, 2), (2, 1)]);
        let lp = p.assemble_constraints().unwrap();
        assert_eq!(lp.num_vars, 9);
        assert_eq!(lp.eq.len(), 6);
        assert!(lp.ub.is_empty());
    }

    #[test]
    fn target_rows_follow_marginal_rows() {
        let g = DirectedGraph::from_edges(4, [(0, 1), (1, 2), (2, 0), (0, 2), (3, 0), (0, 3), (3, 3)]);
        let p = EtaProblem::from_graph(&g).unwrap();
        let r = crate::assortativity_of_graph(&g).unwrap();
        let lp = p.clone().with_targets(r).assemble_constraints().unwrap();
        assert_eq!(lp.eq.len(), p.source_pairs().len() + p.target_pairs().len() + 4);
    }

    #[test]
    fn witness_satisfies_marginals() {
        let g = DirectedGraph::from_edges(
            6,
            [(0, 1), (1, 2), (2, 0), (0, 2), (3, 0), (0, 3), (3, 3), (4, 1), (5, 0), (1, 5), (2, 4)],
        );
        let p = EtaProblem::from_graph(&g).unwrap();
        let r = crate::assortativity_of_graph(&g).unwrap();
        let lp = p.clone().with_targets(r).assemble_constraints().unwrap();
        let eta = EdgeMixMatrix::from_graph(&g).unwrap();
        let x = p.witness_vector(&eta).unwrap();
        let res = lp.residuals(&x);
        assert!(res.max_eq < 1e-12, "{res:?}");
    }

    #[test]
    fn g_map_examples() {
        let pairs = vec![(1, 1), (2, 2)];
        let h = EdgeMixMatrix::new(pairs.clone(), pairs, vec![0.25; 4]).unwrap();
        let ends = h.end_distributions();
        let indep = ends.independent_product(TypePair::OutOut);
        assert_abs_diff_eq!(g_map(TypePair::OutOut, 0.0, &ends).unwrap(), indep);
        // σ = 0.5 on both ends, means 1.5 -> 2.25 + 0.25 r
        assert_abs_diff_eq!(g_map(TypePair::OutOut, 1.0, &ends).unwrap(), 2.5, epsilon = 1e-15);

        let h = EdgeMixMatrix::new(vec![(2, 3)], vec![(5, 7)], vec![1.0]).unwrap();
        assert!(matches!(
            g_map(TypePair::InIn, 0.3, &h.end_distributions()),
            Err(Error::DegenerateEnds(_))
        ));
    }

    #[test]
    fn g_map_arithmetic_case() {
        // σ_q = σ_q̃ = 0.5 and Σ kl q q̃ = 4: degrees {1.5, 2.5} on both ends.
        let mut ends = EdgeEndDistributions::from_masses([((1, 1), 0.5), ((3, 3), 0.5)], [((1, 1), 0.5), ((3, 3), 0.5)]);
        ends.sigma_q = [0.5, 0.5];
        ends.sigma_q_tilde = [0.5, 0.5];
        assert_eq!(ends.independent_product(TypePair::OutOut), 4.0);
        assert_abs_diff_eq!(g_map(TypePair::OutOut, 1.0, &ends).unwrap(), 4.25);
    }

    #[test]
    fn vertex_and_maxent_reproduce_own_profile() {
        let g = DirectedGraph::from_edges(
            6,
            [(0, 1), (1, 2), (2, 0), (0, 2), (3, 0), (0, 3), (3, 3), (4, 1), (5, 0), (1, 5), (2, 4)],
        );
        let r = crate::assortativity_of_graph(&g).unwrap();
        let p = EtaProblem::from_graph(&g).unwrap().with_targets(r);
        for method in [EtaMethod::Vertex, EtaMethod::MaxEntropy, EtaMethod::AnalyticCenter] {
            let eta = solve_target_eta(&p, method, &Simplex::default()).unwrap().solved().unwrap();
            let got = eta.assortativity().unwrap();
            assert!(got.max_abs_diff(&r) < 1e-6, "{method:?}: {got:?} vs {r:?}");
        }
    }

    #[test]
    fn targets_out_of_range_rejected() {
        let g = DirectedGraph::from_edges(4, [(0, 1), (1, 2), (2, 0), (0, 2), (3, 0), (0, 3), (3, 3)]);
        let p = EtaProblem::from_graph(&g)
            .unwrap()
            .with_targets(AssortProfile::new(1.5, 0.0, 0.0, 0.0));
        assert!(matches!(
            solve_target_eta(&p, EtaMethod::Vertex, &Simplex::default()),
            Err(Error::InvalidParam(_))
        ));
    }

    #[test]
    fn degenerate_source_end_is_reported() {
        let g = DirectedGraph::from_edges(3, [(0, 1), (0, 2), (0, 2)]);
        let p = EtaProblem::from_graph(&g).unwrap();
        assert_eq!(p.source_pairs().len(), 1);
        let err = coefficient_bounds(&p, &[TypePair::OutIn], &Simplex::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateEnds(_)));
    }

    #[test]
    fn bounds_contain_observed_profile() {
        let g = DirectedGraph::from_edges(
            6,
            [(0, 1), (1, 2), (2, 0), (0, 2), (3, 0), (0, 3), (3, 3), (4, 1), (5, 0), (1, 5), (2, 4)],
        );
        let r = crate::assortativity_of_graph(&g).unwrap();
        let p = EtaProblem::from_graph(&g).unwrap();
        let b = coefficient_bounds(&p, &TypePair::ALL, &Simplex::default()).unwrap();
        for pair in TypePair::ALL {
            let (lo, hi) = b.get(pair).unwrap();
            assert!(lo - 1e-9 <= r.get(pair) && r.get(pair) <= hi + 1e-9);
        }
    }

    struct Cold;

    impl LpBackend for Cold {
        fn solve(&self, lp: &LinearProgram) -> Result<crate::lp::LpSolution> {
            Simplex::default().solve(lp)
        }
    }

    fn mixed_graph() -> DirectedGraph {
        DirectedGraph::from_edges(
            7,
            [(0, 1), (1, 2), (2, 0), (0, 2), (3, 0), (0, 3), (3, 3), (4, 1), (5, 0), (1, 5), (2, 4), (6, 0), (6, 1), (2, 6)],
        )
    }

    #[test]
    fn monotone_couplings_match_lp_extremes() {
        let p = EtaProblem::from_graph(&mixed_graph()).unwrap();
        let base = p.marginal_lp();
        for pair in TypePair::ALL {
            let row = p.product_row(pair);
            for (sign, comonotone) in [(1.0, false), (-1.0, true)] {
                let mut lp = base.clone();
                for &(i, c) in &row {
                    lp.objective[i] = sign * c;
                }
                let lp_best = Simplex::default().solve(&lp).unwrap().objective_value;
                let coupling = p.monotone_coupling(pair, comonotone);
                assert!(base.residuals(&coupling).max_eq < 1e-12);
                assert_abs_diff_eq!(lp.objective_value(&coupling), lp_best, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn warm_started_bounds_match_cold() {
        let p = EtaProblem::from_graph(&mixed_graph())
            .unwrap()
            .with_interval(Interval::new(TypePair::OutOut, -0.2, 0.1))
            .with_interval(Interval::singleton(TypePair::InOut, 0.0));
        let warm = coefficient_bounds(&p, &TypePair::ALL, &Simplex::default()).unwrap();
        let cold = coefficient_bounds(&p, &TypePair::ALL, &Cold).unwrap();
        for pair in TypePair::ALL {
            let (a, b) = (warm.get(pair).unwrap(), cold.get(pair).unwrap());
            assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-9);
            assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-9);
        }
    }
}
