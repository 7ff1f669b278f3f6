//! Directed multigraph storage and the degree-pair distribution.
//!
//! Nodes are dense ids `0..num_nodes`. Self-loops and parallel edges are
//! allowed everywhere, including as the result of a swap.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result};

pub type NodeId = u32;

/// `(out-degree, in-degree)` of a node.
pub type DegreePair = (u32, u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    num_nodes: usize,
    edges: Vec<(NodeId, NodeId)>,
    out_deg: Vec<u32>,
    in_deg: Vec<u32>,
}

impl DirectedGraph {
    pub fn new(num_nodes: usize) -> Self {
        Self {
            num_nodes,
            edges: Vec::new(),
            out_deg: vec![0; num_nodes],
            in_deg: vec![0; num_nodes],
        }
    }

    /// Builds a graph from an edge list. `num_nodes` is raised to cover every
    /// id that appears.
    pub fn from_edges(num_nodes: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut g = Self::new(num_nodes);
        for (s, t) in edges {
            g.add_edge(s, t);
        }
        g
    }

    /// Appends a node with no edges and returns its id.
    pub fn add_node(&mut self) -> NodeId {
        let id = self.num_nodes as NodeId;
        self.num_nodes += 1;
        self.out_deg.push(0);
        self.in_deg.push(0);
        id
    }

    /// Appends an edge, growing the node set if needed. Returns the edge index.
    pub fn add_edge(&mut self, source: NodeId, target: NodeId) -> usize {
        let need = source.max(target) as usize + 1;
        if need > self.num_nodes {
            self.num_nodes = need;
            self.out_deg.resize(need, 0);
            self.in_deg.resize(need, 0);
        }
        self.out_deg[source as usize] += 1;
        self.in_deg[target as usize] += 1;
        self.edges.push((source, target));
        self.edges.len() - 1
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> Option<(NodeId, NodeId)> {
        self.edges.get(index).copied()
    }

    pub fn out_degrees(&self) -> &[u32] {
        &self.out_deg
    }

    pub fn in_degrees(&self) -> &[u32] {
        &self.in_deg
    }

    pub fn degree_pair(&self, v: NodeId) -> DegreePair {
        (self.out_deg[v as usize], self.in_deg[v as usize])
    }

    /// Recomputes degrees from the edge list and compares them against the
    /// maintained counters.
    pub fn degrees_consistent(&self) -> bool {
        let mut out = vec![0u32; self.num_nodes];
        let mut inn = vec![0u32; self.num_nodes];
        for &(s, t) in &self.edges {
            out[s as usize] += 1;
            inn[t as usize] += 1;
        }
        out == self.out_deg && inn == self.in_deg
    }

    /// Draws two distinct edge indices; every unordered pair is equally likely.
    pub fn sample_edge_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(usize, usize)> {
        let m = self.edges.len();
        if m < 2 {
            return Err(Error::TooFewEdges(m));
        }
        let first = rng.random_range(0..m);
        let mut second = rng.random_range(0..m - 1);
        if second >= first {
            second += 1;
        }
        Ok((first, second))
    }

    /// Replaces `(v1, v2)` and `(v3, v4)` at indices `e1`, `e2` with
    /// `(v1, v4)` and `(v3, v2)`. Degree counters are untouched because every
    /// node keeps the same number of outgoing and incoming edge ends.
    pub fn swap_edges(&mut self, e1: usize, e2: usize) -> Result<()> {
        let len = self.edges.len();
        for index in [e1, e2] {
            if index >= len {
                return Err(Error::EdgeIndex { index, len });
            }
        }
        if e1 == e2 {
            return Err(Error::SameEdge(e1));
        }
        let t1 = self.edges[e1].1;
        self.edges[e1].1 = self.edges[e2].1;
        self.edges[e2].1 = t1;
        Ok(())
    }

    pub fn sorted_out_degrees(&self) -> Vec<u32> {
        let mut v = self.out_deg.clone();
        v.sort_unstable();
        v
    }

    pub fn sorted_in_degrees(&self) -> Vec<u32> {
        let mut v = self.in_deg.clone();
        v.sort_unstable();
        v
    }

    pub fn degree_pair_dist(&self) -> Result<DegreePairDist> {
        DegreePairDist::from_graph(self)
    }

    /// Reads the whitespace-separated edge-list format. Lines starting with
    /// `#` or `%` are comments; a `# nodes=N` comment declares the node count
    /// so isolated trailing nodes survive a round trip. Extra columns after
    /// the first two are ignored.
    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut g = Self::new(0);
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                if let Some(n) = rest.trim().strip_prefix("nodes=") {
                    let n = n.trim().parse::<usize>().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("bad node count {n:?}"),
                    })?;
                    declared = Some(n);
                }
                continue;
            }
            if trimmed.starts_with('%') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let mut next_id = |what: &str| -> Result<NodeId> {
                let tok = tokens.next().ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: format!("missing {what} id"),
                })?;
                if tok.starts_with('-') {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("negative {what} id {tok}"),
                    });
                }
                tok.parse::<NodeId>().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("non-integer {what} id {tok:?}"),
                })
            };
            let s = next_id("source")?;
            let t = next_id("target")?;
            g.add_edge(s, t);
        }
        if let Some(n) = declared {
            if n > g.num_nodes {
                g.num_nodes = n;
                g.out_deg.resize(n, 0);
                g.in_deg.resize(n, 0);
            }
        }
        Ok(g)
    }

    pub fn write_edge_list<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "# nodes={}", self.num_nodes)?;
        for &(s, t) in &self.edges {
            writeln!(writer, "{s}\t{t}")?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Joint distribution of `(out-degree, in-degree)` over nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreePairDist {
    num_nodes: usize,
    counts: BTreeMap<DegreePair, usize>,
}

impl DegreePairDist {
    pub fn from_graph(g: &DirectedGraph) -> Result<Self> {
        if g.num_nodes() == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut counts = BTreeMap::new();
        for (&o, &i) in g.out_deg.iter().zip(&g.in_deg) {
            *counts.entry((o, i)).or_insert(0) += 1;
        }
        Ok(Self {
            num_nodes: g.num_nodes(),
            counts,
        })
    }

    /// Builds the distribution directly from node counts per degree pair.
    pub fn from_counts(counts: BTreeMap<DegreePair, usize>) -> Result<Self> {
        let num_nodes = counts.values().sum();
        if num_nodes == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(Self { num_nodes, counts })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn count(&self, pair: DegreePair) -> usize {
        self.counts.get(&pair).copied().unwrap_or(0)
    }

    pub fn get(&self, pair: DegreePair) -> f64 {
        self.count(pair) as f64 / self.num_nodes as f64
    }

    /// `(pair, proportion)` in ascending pair order.
    pub fn iter(&self) -> impl Iterator<Item = (DegreePair, f64)> + '_ {
        let n = self.num_nodes as f64;
        self.counts.iter().map(move |(&p, &c)| (p, c as f64 / n))
    }

    pub fn counts(&self) -> &BTreeMap<DegreePair, usize> {
        &self.counts
    }

    pub fn out_marginal(&self) -> BTreeMap<u32, f64> {
        let mut m = BTreeMap::new();
        for (p, v) in self.iter() {
            *m.entry(p.0).or_insert(0.0) += v;
        }
        m
    }

    pub fn in_marginal(&self) -> BTreeMap<u32, f64> {
        let mut m = BTreeMap::new();
        for (p, v) in self.iter() {
            *m.entry(p.1).or_insert(0.0) += v;
        }
        m
    }

    /// Source-end mass `i ν_ij / Σ i ν_ij` for every pair with out-degree > 0.
    pub fn source_mass(&self) -> Vec<(DegreePair, f64)> {
        let total: usize = self.counts.iter().map(|(p, c)| p.0 as usize * c).sum();
        self.counts
            .iter()
            .filter(|(p, _)| p.0 > 0)
            .map(|(&p, &c)| (p, (p.0 as usize * c) as f64 / total as f64))
            .collect()
    }

    /// Target-end mass `l ν_kl / Σ l ν_kl` for every pair with in-degree > 0.
    pub fn target_mass(&self) -> Vec<(DegreePair, f64)> {
        let total: usize = self.counts.iter().map(|(p, c)| p.1 as usize * c).sum();
        self.counts
            .iter()
            .filter(|(p, _)| p.1 > 0)
            .map(|(&p, &c)| (p, (p.1 as usize * c) as f64 / total as f64))
            .collect()
    }
}
