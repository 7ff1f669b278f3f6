//! Helpers shared by the integration tests.
#![allow(dead_code)]

use didpr::lp::{LinearProgram, LpStatus};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Brute-force answer for a small LP: `(status, optimal objective)`.
///
/// The feasible set `{x >= 0, A_eq x = b_eq, A_ub x <= b_ub}` is pointed, so
/// it is empty iff it has no vertex, and otherwise the LP is unbounded iff
/// some extreme ray (a vertex of the recession cone cut by `Σ d = 1`) has
/// negative cost. When bounded the optimum sits at a vertex.
pub fn vertex_enumeration(lp: &LinearProgram) -> (LpStatus, Option<f64>) {
    let n = lp.num_vars;
    let eq: Vec<(Vec<f64>, f64)> = lp.eq.iter().map(|r| (dense(r, n), r.rhs)).collect();
    let ub: Vec<(Vec<f64>, f64)> = lp.ub.iter().map(|r| (dense(r, n), r.rhs)).collect();
    let points = vertices(n, &eq, &ub);
    if points.is_empty() {
        return (LpStatus::Infeasible, None);
    }
    let mut cone_eq: Vec<(Vec<f64>, f64)> = eq.iter().map(|(a, _)| (a.clone(), 0.0)).collect();
    cone_eq.push((vec![1.0; n], 1.0));
    let cone_ub: Vec<(Vec<f64>, f64)> = ub.iter().map(|(a, _)| (a.clone(), 0.0)).collect();
    let cost = |x: &[f64]| x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum::<f64>();
    if vertices(n, &cone_eq, &cone_ub).iter().any(|d| cost(d) < -1e-9) {
        return (LpStatus::Unbounded, None);
    }
    let best = points.iter().map(|x| cost(x)).fold(f64::INFINITY, f64::min);
    (LpStatus::Optimal, Some(best))
}

fn dense(row: &didpr::lp::SparseRow, n: usize) -> Vec<f64> {
    let mut a = vec![0.0; n];
    for (&j, &v) in row.indices.iter().zip(&row.values) {
        a[j] += v;
    }
    a
}

/// Every point where the equalities plus some subset of inequalities
/// (including `x_j >= 0`) pin down a unique feasible solution.
fn vertices(n: usize, eq: &[(Vec<f64>, f64)], ub: &[(Vec<f64>, f64)]) -> Vec<Vec<f64>> {
    let mut ineq: Vec<(Vec<f64>, f64)> = ub.to_vec();
    for j in 0..n {
        let mut a = vec![0.0; n];
        a[j] = -1.0;
        ineq.push((a, 0.0));
    }
    let feasible = |x: &[f64]| {
        let dot = |a: &[f64]| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>();
        eq.iter().all(|(a, b)| (dot(a) - b).abs() <= 1e-9) && ineq.iter().all(|(a, b)| dot(a) <= b + 1e-9)
    };
    let mut out = Vec::new();
    for mask in 0u32..(1 << ineq.len()) {
        if mask.count_ones() as usize > n {
            continue;
        }
        let rows: Vec<&(Vec<f64>, f64)> = eq
            .iter()
            .chain((0..ineq.len()).filter(|k| mask >> k & 1 == 1).map(|k| &ineq[k]))
            .collect();
        if rows.len() < n {
            continue;
        }
        let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i].0[j]);
        let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
        let svd = m.clone().svd(true, true);
        if svd.rank(1e-9) < n {
            continue;
        }
        let Ok(x) = svd.solve(&b, 1e-12) else { continue };
        if (&m * &x - &b).amax() > 1e-9 {
            continue;
        }
        let x: Vec<f64> = x.iter().copied().collect();
        if feasible(&x) {
            out.push(x);
        }
    }
    out
}

/// Small LP with integer data: up to 6 variables and 6 rows.
pub fn random_small_lp<R: Rng>(rng: &mut R) -> LinearProgram {
    let n = rng.random_range(1..=6);
    let rows = rng.random_range(0..=6);
    let n_eq = rng.random_range(0..=rows.min(3));
    let mut lp = LinearProgram::feasibility(n);
    for c in lp.objective.iter_mut() {
        *c = rng.random_range(-3..=3) as f64;
    }
    for k in 0..rows {
        let mut entries = Vec::new();
        for j in 0..n {
            let v = rng.random_range(-3..=3);
            if v != 0 && rng.random_bool(0.6) {
                entries.push((j, v as f64));
            }
        }
        if entries.is_empty() {
            entries.push((rng.random_range(0..n), 1.0));
        }
        let rhs = rng.random_range(-2..=8) as f64;
        if k < n_eq {
            lp.add_eq(entries, rhs);
        } else {
            lp.add_ub(entries, rhs);
        }
    }
    lp
}

/// Strictly positive edge mix matrix on 2–5 random source and target degree
/// pairs, with its supports.
pub fn random_eta<R: Rng>(rng: &mut R) -> (didpr::EdgeMixMatrix, Vec<didpr::DegreePair>, Vec<didpr::DegreePair>) {
    let pick = |rng: &mut R| {
        let k = rng.random_range(2..6u32);
        (0..k).map(|i| (i + 1, rng.random_range(1..9))).collect::<Vec<_>>()
    };
    let (s, t) = (pick(rng), pick(rng));
    let vals: Vec<f64> = (0..s.len() * t.len()).map(|_| rng.random_range(1e-6..1.0)).collect();
    let total: f64 = vals.iter().sum();
    let eta = didpr::EdgeMixMatrix::new(s.clone(), t.clone(), vals.iter().map(|v| v / total).collect()).unwrap();
    (eta, s, t)
}
