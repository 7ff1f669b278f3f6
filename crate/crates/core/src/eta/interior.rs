//! Strictly positive solutions of the target-`η` constraints by Newton's
//! method. Both solvers work with the reduced constraint matrix `A`: source
//! row sums, target column sums minus the last (redundant) one, and four
//! standardized moment rows `Σ η_uv z_a(u) z_b(v) = r*(a,b)`.

use nalgebra::{DMatrix, DVector};

use super::EtaProblem;
use crate::assort::{AssortProfile, DegreeType, TypePair};

const MAX_ITER: usize = 200;
const MARGINAL_TOL: f64 = 1e-12;
const MOMENT_TOL: f64 = 1e-11;
const STALL_MARGINAL_TOL: f64 = 1e-9;
const STALL_MOMENT_TOL: f64 = 1e-7;
const CENTER_TOL: f64 = 1e-10;

struct Design {
    ns: usize,
    nt: usize,
    zs: [Vec<f64>; 2],
    zt: [Vec<f64>; 2],
    feat: [(usize, usize); 4],
    rhs: Vec<f64>,
    s: Vec<f64>,
    t: Vec<f64>,
}

fn type_slot(ty: DegreeType) -> usize {
    match ty {
        DegreeType::Out => 0,
        DegreeType::In => 1,
    }
}

impl Design {
    fn new(p: &EtaProblem, targets: &AssortProfile) -> Self {
        let ends = p.ends();
        let s: Vec<f64> = p.source_mass().iter().map(|x| x.1).collect();
        let t: Vec<f64> = p.target_mass().iter().map(|x| x.1).collect();
        let z = |ty: DegreeType, pairs: &[((u32, u32), f64)], mean: f64, sd: f64| -> Vec<f64> {
            pairs.iter().map(|&(d, _)| (ty.of(d) as f64 - mean) / sd).collect()
        };
        let zs = [DegreeType::Out, DegreeType::In]
            .map(|ty| z(ty, p.source_mass(), ends.mean_q[type_slot(ty)], ends.sigma_q[type_slot(ty)]));
        let zt = [DegreeType::Out, DegreeType::In].map(|ty| {
            z(
                ty,
                p.target_mass(),
                ends.mean_q_tilde[type_slot(ty)],
                ends.sigma_q_tilde[type_slot(ty)],
            )
        });
        let feat = TypePair::ALL.map(|pair| (type_slot(pair.source()), type_slot(pair.target())));
        let (ns, nt) = (s.len(), t.len());
        let mut rhs = s.clone();
        rhs.extend_from_slice(&t[..nt - 1]);
        rhs.extend_from_slice(&targets.to_array());
        Self {
            ns,
            nt,
            zs,
            zt,
            feat,
            rhs,
            s,
            t,
        }
    }

    fn dim(&self) -> usize {
        self.ns + self.nt - 1 + 4
    }

    fn lo(&self) -> usize {
        self.ns + self.nt - 1
    }

    #[inline]
    fn features(&self, u: usize, v: usize) -> [f64; 4] {
        let zu = [self.zs[0][u], self.zs[1][u]];
        let zv = [self.zt[0][v], self.zt[1][v]];
        self.feat.map(|(a, b)| zu[a] * zv[b])
    }

    /// `(Aᵀ w)_uv` for every entry.
    fn transpose(&self, w: &[f64], out: &mut [f64]) {
        let lo = self.lo();
        let lam = &w[lo..];
        for u in 0..self.ns {
            for v in 0..self.nt {
                let f = self.features(u, v);
                let mut x = w[u] + if v + 1 < self.nt { w[self.ns + v] } else { 0.0 };
                for m in 0..4 {
                    x += lam[m] * f[m];
                }
                out[u * self.nt + v] = x;
            }
        }
    }

    /// `A x` together with `A diag(d) Aᵀ`.
    fn apply_and_normal(&self, x: &[f64], d: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let (ns, nt, lo) = (self.ns, self.nt, self.lo());
        let n = self.dim();
        let mut ax = vec![0.0; n];
        let mut h = DMatrix::<f64>::zeros(n, n);
        let mut ff = [[0.0f64; 4]; 4];
        for u in 0..ns {
            for v in 0..nt {
                let i = u * nt + v;
                let (xi, di) = (x[i], d[i]);
                let f = self.features(u, v);
                ax[u] += xi;
                h[(u, u)] += di;
                if v + 1 < nt {
                    ax[ns + v] += xi;
                    h[(ns + v, ns + v)] += di;
                    h[(u, ns + v)] = di;
                }
                for m in 0..4 {
                    ax[lo + m] += xi * f[m];
                    let dfm = di * f[m];
                    h[(u, lo + m)] += dfm;
                    if v + 1 < nt {
                        h[(ns + v, lo + m)] += dfm;
                    }
                    for k in m..4 {
                        ff[m][k] += dfm * f[k];
                    }
                }
            }
        }
        for m in 0..4 {
            for k in m..4 {
                h[(lo + m, lo + k)] = ff[m][k];
            }
        }
        h.fill_lower_triangle_with_upper_triangle();
        (ax, h)
    }

    fn converged(&self, residual: &[f64]) -> bool {
        let lo = self.lo();
        residual[..lo].iter().all(|r| r.abs() <= MARGINAL_TOL) && residual[lo..].iter().all(|r| r.abs() <= MOMENT_TOL)
    }

    fn residual(&self, ax: &[f64]) -> Vec<f64> {
        ax.iter().zip(&self.rhs).map(|(a, b)| a - b).collect()
    }
}

fn solve_spd(mut h: DMatrix<f64>, rhs: &[f64]) -> Option<DVector<f64>> {
    let n = h.nrows();
    let ridge = 1e-14 * (0..n).map(|i| h[(i, i)]).fold(0.0, f64::max);
    for i in 0..n {
        h[(i, i)] += ridge;
    }
    let sol = h.cholesky()?.solve(&DVector::from_column_slice(rhs));
    sol.iter().all(|x| x.is_finite()).then_some(sol)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn max_parts(d: &Design, res: &[f64]) -> (f64, f64) {
    let m = |r: &[f64]| r.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    (m(&res[..d.lo()]), m(&res[d.lo()..]))
}

/// Residuals small enough to use when Newton can make no further progress
/// in floating point.
fn acceptable(d: &Design, res: &[f64]) -> bool {
    let (marg, mom) = max_parts(d, res);
    marg <= STALL_MARGINAL_TOL && mom <= STALL_MOMENT_TOL
}

pub(super) enum Newton {
    Solved(Vec<f64>),
    /// The dual dropped below the value any feasible `η` allows.
    Infeasible,
    Stalled,
}

impl Newton {
    fn from_stall(d: &Design, res: &[f64], eta: Vec<f64>) -> Self {
        if acceptable(d, res) {
            Newton::Solved(eta)
        } else {
            Newton::Stalled
        }
    }
}

/// Minimum KL divergence from the independent coupling `s tᵀ`:
/// `η_uv = s_u t_v exp((Aᵀθ)_uv)`, found by damped Newton on the convex dual
/// `Φ(θ) = Σ η − θ·b`. Near the optimum the dual stops resolving in `f64`, so
/// a step that shrinks the gradient is also accepted.
///
/// Weak duality gives `Φ(θ) >= 1 − KL(η ‖ s tᵀ)` for every feasible `η`, and
/// `η_uv <= s_u` bounds that divergence by `ln(1 / min t)`. A dual value below
/// the resulting floor proves the targets unattainable.
pub(super) fn max_entropy(p: &EtaProblem, targets: &AssortProfile) -> Newton {
    let d = Design::new(p, targets);
    max_entropy_design(&d)
}

fn max_entropy_design(d: &Design) -> Newton {
    let min_t = d.t.iter().copied().fold(f64::INFINITY, f64::min);
    let floor = 1.0 - (1.0 / min_t).ln() - 1e-6;
    let size = d.ns * d.nt;
    let base: Vec<f64> = (0..size).map(|i| (d.s[i / d.nt] * d.t[i % d.nt]).ln()).collect();
    let eval = |theta: &[f64], eta: &mut [f64], scratch: &mut [f64]| -> f64 {
        d.transpose(theta, scratch);
        let mut total = 0.0;
        for i in 0..size {
            eta[i] = (base[i] + scratch[i]).exp();
            total += eta[i];
        }
        total - theta.iter().zip(&d.rhs).map(|(a, b)| a * b).sum::<f64>()
    };

    let mut theta = vec![0.0; d.dim()];
    let mut eta = vec![0.0; size];
    let mut trial = vec![0.0; size];
    let mut scratch = vec![0.0; size];
    let mut dual = eval(&theta, &mut eta, &mut scratch);
    for _ in 0..MAX_ITER {
        let (ax, h) = d.apply_and_normal(&eta, &eta);
        let grad = d.residual(&ax);
        if d.converged(&grad) {
            return Newton::Solved(eta);
        }
        if dual < floor {
            return Newton::Infeasible;
        }
        let grad_norm = norm2(&grad);
        let Some(step) = solve_spd(h, &grad) else {
            return Newton::from_stall(d, &grad, eta);
        };
        let slope: f64 = step.iter().zip(&grad).map(|(a, b)| a * b).sum();
        if !(slope > 0.0) {
            return Newton::from_stall(d, &grad, eta);
        }
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<f64> = theta.iter().zip(step.iter()).map(|(x, s)| x - alpha * s).collect();
            let dn = eval(&cand, &mut trial, &mut scratch);
            let armijo = dn.is_finite() && dn < dual - 1e-4 * alpha * slope;
            if armijo || (dn.is_finite() && norm2(&d.residual(&apply(d, &trial))) < (1.0 - 1e-4 * alpha) * grad_norm) {
                theta = cand;
                dual = dn;
                std::mem::swap(&mut eta, &mut trial);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Newton::from_stall(d, &grad, eta);
        }
    }
    if dual < floor {
        Newton::Infeasible
    } else {
        Newton::Stalled
    }
}

/// Analytic center: maximizes `Σ ln η_uv` subject to `A η = b`. This is the
/// point an interior-point method converges to for a zero objective.
/// Feasible-start Newton from the maximum-entropy solution, with
/// backtracking on the barrier.
pub(super) fn analytic_center(p: &EtaProblem, targets: &AssortProfile) -> Newton {
    let d = Design::new(p, targets);
    let size = d.ns * d.nt;
    let mut x = match max_entropy_design(&d) {
        Newton::Solved(x) => x,
        other => return other,
    };
    let mut atw = vec![0.0; size];
    let barrier = |x: &[f64]| -> f64 { -x.iter().map(|v| v.ln()).sum::<f64>() };
    let mut f = barrier(&x);

    for _ in 0..MAX_ITER {
        let d2: Vec<f64> = x.iter().map(|v| v * v).collect();
        let (ax, h) = d.apply_and_normal(&x, &d2);
        // A D Aᵀ w = 2 A x − b also removes residual drift from round-off.
        let rhs: Vec<f64> = ax.iter().zip(&d.rhs).map(|(a, b)| 2.0 * a - b).collect();
        let Some(w) = solve_spd(h, &rhs) else {
            return Newton::Stalled;
        };
        d.transpose(w.as_slice(), &mut atw);
        let dx: Vec<f64> = (0..size).map(|i| x[i] - d2[i] * atw[i]).collect();
        // Squared Newton decrement.
        let decrement: f64 = dx.iter().zip(&x).map(|(a, b)| (a / b).powi(2)).sum();
        let res = d.residual(&ax);
        if decrement <= CENTER_TOL && d.converged(&res) {
            return Newton::Solved(x);
        }
        let mut t = 1.0f64;
        for i in 0..size {
            if dx[i] < 0.0 {
                t = t.min(-0.99 * x[i] / dx[i]);
            }
        }
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<f64> = (0..size).map(|i| x[i] + t * dx[i]).collect();
            let fc = barrier(&cand);
            if fc.is_finite() && fc <= f - 0.25 * t * decrement {
                x = cand;
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            if decrement <= 1e-6 && acceptable(&d, &res) {
                return Newton::Solved(x);
            }
            return Newton::Stalled;
        }
    }
    Newton::Stalled
}

fn apply(d: &Design, x: &[f64]) -> Vec<f64> {
    let (ns, nt, lo) = (d.ns, d.nt, d.lo());
    let mut ax = vec![0.0; d.dim()];
    for u in 0..ns {
        for v in 0..nt {
            let xi = x[u * nt + v];
            ax[u] += xi;
            if v + 1 < nt {
                ax[ns + v] += xi;
            }
            let f = d.features(u, v);
            for m in 0..4 {
                ax[lo + m] += xi * f[m];
            }
        }
    }
    ax
}
