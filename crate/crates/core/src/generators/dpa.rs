use std::fmt;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fenwick::Fenwick;
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpaParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta_in: f64,
    pub delta_out: f64,
    pub target_edges: usize,
    pub seed: u64,
}

impl DpaParams {
    /// `γ = 1 - α - β`, `δ_in = δ_out = delta`.
    pub fn new(alpha: f64, beta: f64, delta: f64, target_edges: usize, seed: u64) -> Self {
        Self {
            alpha,
            beta,
            gamma: 1.0 - alpha - beta,
            delta_in: delta,
            delta_out: delta,
            target_edges,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [self.alpha, self.beta, self.gamma];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParam(format!(
                "alpha, beta, gamma must lie in [0, 1], got {probs:?}"
            )));
        }
        if (self.alpha + self.beta + self.gamma - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParam(format!(
                "alpha + beta + gamma must equal 1, got {}",
                self.alpha + self.beta + self.gamma
            )));
        }
        if !(self.delta_in > 0.0 && self.delta_out > 0.0) || !self.delta_in.is_finite() || !self.delta_out.is_finite() {
            return Err(Error::InvalidParam("delta_in and delta_out must be positive".into()));
        }
        if self.target_edges == 0 {
            return Err(Error::InvalidParam("target_edges must be at least 1".into()));
        }
        Ok(())
    }

    /// Out-degree tail index `(1 + δ_out(α+γ)) / (β+γ)`.
    pub fn iota_out(&self) -> f64 {
        (1.0 + self.delta_out * (self.alpha + self.gamma)) / (self.beta + self.gamma)
    }

    /// In-degree tail index `(1 + δ_in(α+γ)) / (α+β)`.
    pub fn iota_in(&self) -> f64 {
        (1.0 + self.delta_in * (self.alpha + self.gamma)) / (self.alpha + self.beta)
    }
}

/// Edge-creation scenario. `Seed` marks the initial self-loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Seed,
    Alpha,
    Beta,
    Gamma,
}

impl Scenario {
    pub fn letter(self) -> char {
        match self {
            Scenario::Seed => 's',
            Scenario::Alpha => 'a',
            Scenario::Beta => 'b',
            Scenario::Gamma => 'g',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            's' => Some(Scenario::Seed),
            'a' => Some(Scenario::Alpha),
            'b' => Some(Scenario::Beta),
            'g' => Some(Scenario::Gamma),
            _ => None,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Scenario::Seed => "seed",
            Scenario::Alpha => "alpha",
            Scenario::Beta => "beta",
            Scenario::Gamma => "gamma",
        };
        f.write_str(name)
    }
}

/// A DPA graph with the scenario that created each edge (by edge index).
#[derive(Debug, Clone, PartialEq)]
pub struct DpaGraph {
    pub graph: DirectedGraph,
    pub scenarios: Vec<Scenario>,
}

impl DpaGraph {
    pub fn scenario_of_edge(&self, edge: usize) -> Result<Scenario> {
        scenario_of_edge(&self.scenarios, edge)
    }
}

/// Label of edge `edge`; an empty label list means the graph carries none.
pub fn scenario_of_edge(labels: &[Scenario], edge: usize) -> Result<Scenario> {
    if labels.is_empty() {
        return Err(Error::NoScenarioLabels);
    }
    labels.get(edge).copied().ok_or(Error::EdgeIndex {
        index: edge,
        len: labels.len(),
    })
}

/// Grows a DPA network from one node carrying a self-loop, adding
/// `target_edges` further edges.
///
/// * α: new node `v1`, edge `v1 → v2` with `v2 ∝ d_in + δ_in`.
/// * β: edge `v1 → v2` between existing nodes, `v1 ∝ d_out + δ_out` and
///   `v2 ∝ d_in + δ_in` drawn independently (self-loops possible).
/// * γ: new node `v2`, edge `v1 → v2` with `v1 ∝ d_out + δ_out`.
pub fn gen_dpa(params: &DpaParams) -> Result<DpaGraph> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let cap = params.target_edges + 1;
    let mut g = DirectedGraph::new(0);
    let mut out_tree = Fenwick::with_capacity(cap);
    let mut in_tree = Fenwick::with_capacity(cap);
    let mut scenarios = Vec::with_capacity(cap);

    let v0 = g.add_node();
    g.add_edge(v0, v0);
    out_tree.push(1.0 + params.delta_out);
    in_tree.push(1.0 + params.delta_in);
    scenarios.push(Scenario::Seed);

    let new_node = |g: &mut DirectedGraph, out_tree: &mut Fenwick, in_tree: &mut Fenwick| {
        out_tree.push(params.delta_out);
        in_tree.push(params.delta_in);
        g.add_node()
    };

    for _ in 0..params.target_edges {
        let u: f64 = rng.random();
        let (src, dst, scenario) = if u < params.alpha {
            let dst = in_tree.sample(&mut rng) as u32;
            let src = new_node(&mut g, &mut out_tree, &mut in_tree);
            (src, dst, Scenario::Alpha)
        } else if u < params.alpha + params.beta {
            let src = out_tree.sample(&mut rng) as u32;
            let dst = in_tree.sample(&mut rng) as u32;
            (src, dst, Scenario::Beta)
        } else {
            let src = out_tree.sample(&mut rng) as u32;
            let dst = new_node(&mut g, &mut out_tree, &mut in_tree);
            (src, dst, Scenario::Gamma)
        };
        g.add_edge(src, dst);
        out_tree.add(src as usize, 1.0);
        in_tree.add(dst as usize, 1.0);
        scenarios.push(scenario);
    }
    Ok(DpaGraph { graph: g, scenarios })
}

/// Sidecar format: one scenario letter (`s`, `a`, `b`, `g`) per line, in
/// edge order.
pub fn write_scenarios<W: Write>(labels: &[Scenario], mut writer: W) -> Result<()> {
    for s in labels {
        writeln!(writer, "{}", s.letter())?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_scenarios<R: BufRead>(reader: R) -> Result<Vec<Scenario>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let mut chars = t.chars();
        let s = match (chars.next(), chars.next()) {
            (Some(c), None) => Scenario::from_letter(c),
            _ => None,
        };
        out.push(s.ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: format!("expected one of s, a, b, g; got {t:?}"),
        })?);
    }
    Ok(out)
}
