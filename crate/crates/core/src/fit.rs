//! Extreme-value fitting of the DPA model to an observed network.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{gen_dpa, DpaParams};
use crate::graph::DirectedGraph;

/// `1 - |V| / |E|`.
pub fn beta_hat(g: &DirectedGraph) -> Result<f64> {
    beta_hat_counts(g.num_nodes(), g.num_edges())
}

pub fn beta_hat_counts(nodes: usize, edges: usize) -> Result<f64> {
    if edges < nodes || edges == 0 {
        return Err(Error::MoreNodesThanEdges);
    }
    Ok(1.0 - nodes as f64 / edges as f64)
}

// Bernoulli numbers B_2 .. B_20 for the Euler-Maclaurin tail of zeta.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta `Σ_{k>=0} (q+k)^{-s}` for `s > 1`, `q > 0`.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    const N: usize = 12;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + N as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // Σ B_2j / (2j)! · s(s+1)…(s+2j-2) · a^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut pow = a.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = b / fact * rising * pow;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let m = 2.0 * j as f64 + 2.0;
        rising *= (s + m - 1.0) * (s + m);
        fact *= (m + 1.0) * (m + 2.0);
        pow /= a * a;
    }
    sum
}

/// Tail estimate for one degree sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// Tail index: power-law exponent minus one.
    pub iota: f64,
    pub x_min: u32,
    pub n_tail: usize,
    pub ks: f64,
}

const MIN_POSITIVE: usize = 50;
const MIN_TAIL: usize = 10;

/// Discrete power-law MLE for the exponent of `x >= x_min`, given the tail
/// size and `Σ ln x`. Golden-section search on the concave log-likelihood.
fn mle_exponent(x_min: f64, n: f64, sum_log: f64) -> f64 {
    let nll = |a: f64| n * hurwitz_zeta(a, x_min).ln() + a * sum_log;
    let (mut lo, mut hi) = (1.0 + 1e-6, 20.0);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let (mut fc, mut fd) = (nll(c), nll(d));
    while hi - lo > 1e-9 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = nll(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = nll(d);
        }
    }
    0.5 * (lo + hi)
}

/// Minimum-distance power-law fit: every distinct positive degree with at
/// least 10 observations at or above it is a candidate `x_min`; the exponent
/// is the discrete MLE on that tail and the candidate with the smallest
/// Kolmogorov-Smirnov distance wins. Zeros are ignored.
pub fn tail_index(degrees: &[u32]) -> Result<TailFit> {
    let mut xs: Vec<u32> = degrees.iter().copied().filter(|&d| d > 0).collect();
    if xs.len() < MIN_POSITIVE {
        return Err(Error::TooFewDegrees(xs.len()));
    }
    xs.sort_unstable();
    // Distinct values with counts, ascending.
    let mut vals: Vec<(u32, usize)> = Vec::new();
    for &x in &xs {
        match vals.last_mut() {
            Some((v, c)) if *v == x => *c += 1,
            _ => vals.push((x, 1)),
        }
    }
    if vals.len() < 2 {
        return Err(Error::NoPowerLawTail("all positive degrees are equal"));
    }
    // Suffix counts and log sums.
    let k = vals.len();
    let mut tail_n = vec![0usize; k + 1];
    let mut tail_log = vec![0.0f64; k + 1];
    for i in (0..k).rev() {
        let (v, c) = vals[i];
        tail_n[i] = tail_n[i + 1] + c;
        tail_log[i] = tail_log[i + 1] + c as f64 * (v as f64).ln();
    }

    let candidates: Vec<usize> = (0..k - 1).filter(|&i| tail_n[i] >= MIN_TAIL).collect();
    if candidates.is_empty() {
        return Err(Error::NoPowerLawTail("tail too short"));
    }
    let fits: Vec<TailFit> = candidates
        .par_iter()
        .map(|&i| {
            let x_min = vals[i].0 as f64;
            let n = tail_n[i] as f64;
            let a = mle_exponent(x_min, n, tail_log[i]);
            let z0 = hurwitz_zeta(a, x_min);
            // Model survival P(X >= x) = ζ(a, x) / ζ(a, x_min), stepped between
            // observed values by subtracting point masses.
            let mut ks: f64 = 0.0;
            let mut seen = 0usize;
            let mut zeta_next = z0;
            let mut x_cur = x_min;
            for &(v, c) in &vals[i..] {
                let v = v as f64;
                if v - x_cur > 64.0 {
                    zeta_next = hurwitz_zeta(a, v);
                } else {
                    while x_cur < v {
                        zeta_next -= x_cur.powf(-a);
                        x_cur += 1.0;
                    }
                }
                // Empirical and model CDFs just below and at v.
                let model_below = 1.0 - zeta_next / z0;
                let emp_below = seen as f64 / n;
                seen += c;
                zeta_next -= v.powf(-a);
                x_cur = v + 1.0;
                let model_at = 1.0 - zeta_next / z0;
                let emp_at = seen as f64 / n;
                ks = ks.max((model_below - emp_below).abs()).max((model_at - emp_at).abs());
            }
            TailFit {
                iota: a - 1.0,
                x_min: vals[i].0,
                n_tail: tail_n[i],
                ks,
            }
        })
        .collect();
    Ok(fits
        .into_iter()
        .min_by(|a, b| a.ks.total_cmp(&b.ks).then(a.x_min.cmp(&b.x_min)))
        .expect("non-empty candidates"))
}

/// L1 polar coordinates `R = d_out + d_in^â`, `θ = d_in^â / R`, skipping
/// nodes with both degrees zero.
pub fn polar_transform(out_deg: &[u32], in_deg: &[u32], a_hat: f64) -> Result<Vec<(f64, f64)>> {
    if !(a_hat > 0.0 && a_hat.is_finite()) {
        return Err(Error::InvalidParam(format!("a_hat must be positive, got {a_hat}")));
    }
    if out_deg.len() != in_deg.len() {
        return Err(Error::InvalidParam("degree sequences differ in length".into()));
    }
    let pts: Vec<(f64, f64)> = out_deg
        .iter()
        .zip(in_deg)
        .filter(|(&o, &i)| o > 0 || i > 0)
        .map(|(&o, &i)| {
            let y = (i as f64).powf(a_hat);
            let r = o as f64 + y;
            (r, y / r)
        })
        .collect();
    if pts.is_empty() {
        return Err(Error::AllZeroDegree);
    }
    Ok(pts)
}

/// θ values of the nodes whose radius strictly exceeds the
/// `(n_tail + 1)`-th largest radius.
pub fn tail_angles(points: &[(f64, f64)], n_tail: usize) -> Vec<f64> {
    let mut radii: Vec<f64> = points.iter().map(|p| p.0).collect();
    radii.sort_unstable_by(|a, b| b.total_cmp(a));
    let Some(&c) = radii.get(n_tail) else {
        return points.iter().map(|p| p.1).collect();
    };
    points.iter().filter(|p| p.0 > c).map(|p| p.1).collect()
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// `(δ_out, δ_in)` from the tail indices by inverting
/// `ι₁ = (1 + δ_out(α+γ))/(β+γ)` and `ι₂ = (1 + δ_in(α+γ))/(α+β)`.
pub fn invert_deltas(iota1: f64, iota2: f64, alpha: f64, beta: f64, gamma: f64) -> (f64, f64) {
    let ag = alpha + gamma;
    ((iota1 * (beta + gamma) - 1.0) / ag, (iota2 * (alpha + beta) - 1.0) / ag)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvFit {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub gamma_hat: f64,
    pub delta_in_hat: f64,
    pub delta_out_hat: f64,
    pub iota1_hat: f64,
    pub iota2_hat: f64,
    pub n_tail: usize,
    pub a_hat: f64,
}

impl EvFit {
    pub fn dpa_params(&self, target_edges: usize, seed: u64) -> DpaParams {
        DpaParams {
            alpha: self.alpha_hat,
            beta: self.beta_hat,
            gamma: 1.0 - self.alpha_hat - self.beta_hat,
            delta_in: self.delta_in_hat,
            delta_out: self.delta_out_hat,
            target_edges,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitOptions {
    /// Number of α intervals on `[0, 1 - β̂]`.
    pub alpha_grid: usize,
    /// Simulated networks per grid point; their tail angles are pooled.
    pub sims_per_alpha: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            alpha_grid: 40,
            sims_per_alpha: 1,
            seed: 0,
        }
    }
}

/// Fits `(α, β, γ, δ_in, δ_out)`.
///
/// β̂ from the node/edge ratio, ι̂₁ and ι̂₂ from [`tail_index`] on out- and
/// in-degrees, `â = ι̂₂/ι̂₁`. α̂ is the grid value whose simulated DPA networks
/// (β̂ fixed, `γ = 1 - α - β̂`, δs inverted from the ι̂s at that α, same edge
/// count) produce tail angles closest in two-sample KS distance to the
/// observed ones. Common random numbers are used across grid points.
pub fn fit_ev(g: &DirectedGraph, n_tail: usize, opts: &FitOptions) -> Result<EvFit> {
    if n_tail < 50 {
        return Err(Error::InvalidParam(format!("n_tail must be at least 50, got {n_tail}")));
    }
    if opts.alpha_grid == 0 || opts.sims_per_alpha == 0 {
        return Err(Error::InvalidParam("alpha_grid and sims_per_alpha must be positive".into()));
    }
    let beta = beta_hat(g)?;
    let iota1 = tail_index(g.out_degrees())?.iota;
    let iota2 = tail_index(g.in_degrees())?.iota;
    let a_hat = iota2 / iota1;
    let observed = tail_angles(&polar_transform(g.out_degrees(), g.in_degrees(), a_hat)?, n_tail);
    let free = 1.0 - beta;
    if free <= 0.0 {
        return Err(Error::InconsistentTail("beta_hat is 1; alpha + gamma must be positive".into()));
    }
    let edges = g.num_edges().saturating_sub(1).max(1);

    let scores: Vec<(f64, f64)> = (0..=opts.alpha_grid)
        .into_par_iter()
        .filter_map(|k| {
            let alpha = (free * k as f64 / opts.alpha_grid as f64).min(free);
            let gamma = (free - alpha).max(0.0);
            let (d_out, d_in) = invert_deltas(iota1, iota2, alpha, beta, gamma);
            if !(d_out > 0.0 && d_in > 0.0) {
                return None;
            }
            let mut sim = Vec::new();
            for r in 0..opts.sims_per_alpha {
                let p = DpaParams {
                    alpha,
                    beta,
                    gamma: 1.0 - alpha - beta,
                    delta_in: d_in,
                    delta_out: d_out,
                    target_edges: edges,
                    seed: opts.seed.wrapping_add(r as u64),
                };
                let d = gen_dpa(&p).ok()?;
                let pts = polar_transform(d.graph.out_degrees(), d.graph.in_degrees(), a_hat).ok()?;
                sim.extend(tail_angles(&pts, n_tail));
            }
            Some((alpha, ks_two_sample(&observed, &sim)))
        })
        .collect();
    let &(alpha, _) = scores
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::InconsistentTail(format!("no alpha gives positive deltas (iota1 {iota1}, iota2 {iota2})")))?;
    let gamma = (1.0 - alpha - beta).max(0.0);
    let (d_out, d_in) = invert_deltas(iota1, iota2, alpha, beta, gamma);
    if !(d_out > 0.0 && d_in > 0.0) {
        return Err(Error::InconsistentTail(format!("delta_out {d_out}, delta_in {d_in}")));
    }
    Ok(EvFit {
        alpha_hat: alpha,
        beta_hat: beta,
        gamma_hat: gamma,
        delta_in_hat: d_in,
        delta_out_hat: d_out,
        iota1_hat: iota1,
        iota2_hat: iota2,
        n_tail,
        a_hat,
    })
}
