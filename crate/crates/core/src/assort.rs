//! Edge-end distributions, the joint edge mix matrix and the four directed
//! assortativity coefficients.
//!
//! Degree type 1 is out-degree and type 2 is in-degree. `r(a, b)` correlates
//! the type-`a` degree of an edge's source with the type-`b` degree of its
//! target.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreePair, DirectedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DegreeType {
    Out,
    In,
}

impl DegreeType {
    #[inline]
    pub fn of(self, pair: DegreePair) -> u32 {
        match self {
            DegreeType::Out => pair.0,
            DegreeType::In => pair.1,
        }
    }

    fn index(self) -> usize {
        match self {
            DegreeType::Out => 0,
            DegreeType::In => 1,
        }
    }
}

/// One of the four `(source type, target type)` combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypePair {
    #[serde(rename = "11")]
    OutOut,
    #[serde(rename = "12")]
    OutIn,
    #[serde(rename = "21")]
    InOut,
    #[serde(rename = "22")]
    InIn,
}

impl TypePair {
    pub const ALL: [TypePair; 4] = [
        TypePair::OutOut,
        TypePair::OutIn,
        TypePair::InOut,
        TypePair::InIn,
    ];

    pub fn index(self) -> usize {
        match self {
            TypePair::OutOut => 0,
            TypePair::OutIn => 1,
            TypePair::InOut => 2,
            TypePair::InIn => 3,
        }
    }

    pub fn source(self) -> DegreeType {
        match self {
            TypePair::OutOut | TypePair::OutIn => DegreeType::Out,
            TypePair::InOut | TypePair::InIn => DegreeType::In,
        }
    }

    pub fn target(self) -> DegreeType {
        match self {
            TypePair::OutOut | TypePair::InOut => DegreeType::Out,
            TypePair::OutIn | TypePair::InIn => DegreeType::In,
        }
    }

    /// `"11"`, `"12"`, `"21"` or `"22"`.
    pub fn code(self) -> &'static str {
        match self {
            TypePair::OutOut => "11",
            TypePair::OutIn => "12",
            TypePair::InOut => "21",
            TypePair::InIn => "22",
        }
    }
}

impl fmt::Display for TypePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.code())
    }
}

impl FromStr for TypePair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('r').replace([',', '(', ')', ' '], "");
        match t.as_str() {
            "11" | "out-out" => Ok(TypePair::OutOut),
            "12" | "out-in" => Ok(TypePair::OutIn),
            "21" | "in-out" => Ok(TypePair::InOut),
            "22" | "in-in" => Ok(TypePair::InIn),
            _ => Err(Error::InvalidParam(format!("unknown type pair {s:?}"))),
        }
    }
}

/// The four coefficients `r(1,1)`, `r(1,2)`, `r(2,1)`, `r(2,2)`. Also used
/// for target values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssortProfile {
    pub r11: f64,
    pub r12: f64,
    pub r21: f64,
    pub r22: f64,
}

impl AssortProfile {
    pub fn new(r11: f64, r12: f64, r21: f64, r22: f64) -> Self {
        Self { r11, r12, r21, r22 }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.r11, self.r12, self.r21, self.r22]
    }

    pub fn get(&self, pair: TypePair) -> f64 {
        self.to_array()[pair.index()]
    }

    pub fn max_abs_diff(&self, other: &AssortProfile) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Marginal distributions of degrees at the source end (`q`) and target end
/// (`q_tilde`) of a uniformly chosen edge, indexed by degree type.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeEndDistributions {
    pub q: [BTreeMap<u32, f64>; 2],
    pub q_tilde: [BTreeMap<u32, f64>; 2],
    pub mean_q: [f64; 2],
    pub mean_q_tilde: [f64; 2],
    pub sigma_q: [f64; 2],
    pub sigma_q_tilde: [f64; 2],
}

fn moments(dist: &BTreeMap<u32, f64>) -> (f64, f64) {
    let mass: f64 = dist.values().sum();
    let mean = dist.iter().map(|(&k, &p)| k as f64 * p).sum::<f64>() / mass;
    if dist.values().filter(|&&p| p > 0.0).count() <= 1 {
        return (mean, 0.0);
    }
    let var = dist
        .iter()
        .map(|(&k, &p)| p * (k as f64 - mean).powi(2))
        .sum::<f64>()
        / mass;
    (mean, var.max(0.0).sqrt())
}

impl EdgeEndDistributions {
    /// Builds the end distributions from per-pair source and target masses.
    pub fn from_masses(
        source: impl IntoIterator<Item = (DegreePair, f64)>,
        target: impl IntoIterator<Item = (DegreePair, f64)>,
    ) -> Self {
        let mut q = [BTreeMap::new(), BTreeMap::new()];
        let mut q_tilde = [BTreeMap::new(), BTreeMap::new()];
        for (p, m) in source {
            *q[0].entry(p.0).or_insert(0.0) += m;
            *q[1].entry(p.1).or_insert(0.0) += m;
        }
        for (p, m) in target {
            *q_tilde[0].entry(p.0).or_insert(0.0) += m;
            *q_tilde[1].entry(p.1).or_insert(0.0) += m;
        }
        let mq = [moments(&q[0]), moments(&q[1])];
        let mt = [moments(&q_tilde[0]), moments(&q_tilde[1])];
        Self {
            q,
            q_tilde,
            mean_q: [mq[0].0, mq[1].0],
            mean_q_tilde: [mt[0].0, mt[1].0],
            sigma_q: [mq[0].1, mq[1].1],
            sigma_q_tilde: [mt[0].1, mt[1].1],
        }
    }

    /// `σ_q^(a) σ_q̃^(b)`, or an error when either factor is zero.
    pub fn sigma_product(&self, pair: TypePair) -> Result<f64> {
        let s = self.sigma_q[pair.source().index()];
        let t = self.sigma_q_tilde[pair.target().index()];
        if s <= 0.0 {
            return Err(Error::DegenerateEnds(match pair.source() {
                DegreeType::Out => "source out-degree",
                DegreeType::In => "source in-degree",
            }));
        }
        if t <= 0.0 {
            return Err(Error::DegenerateEnds(match pair.target() {
                DegreeType::Out => "target out-degree",
                DegreeType::In => "target in-degree",
            }));
        }
        Ok(s * t)
    }

    /// `Σ k l q_k^(a) q̃_l^(b)`, the degree-product expectation under independence.
    pub fn independent_product(&self, pair: TypePair) -> f64 {
        self.mean_q[pair.source().index()] * self.mean_q_tilde[pair.target().index()]
    }
}

/// Joint distribution `η` of edges over (source degree pair, target degree
/// pair), stored as a dense row-major matrix on the sparse support of pairs
/// that actually carry source or target mass.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMixMatrix {
    source_pairs: Vec<DegreePair>,
    target_pairs: Vec<DegreePair>,
    values: Vec<f64>,
}

impl EdgeMixMatrix {
    /// `source_pairs` and `target_pairs` must be strictly ascending.
    pub fn new(source_pairs: Vec<DegreePair>, target_pairs: Vec<DegreePair>, values: Vec<f64>) -> Result<Self> {
        if values.len() != source_pairs.len() * target_pairs.len() {
            return Err(Error::InvalidParam(format!(
                "edge mix has {} values for a {}x{} support",
                values.len(),
                source_pairs.len(),
                target_pairs.len()
            )));
        }
        if !source_pairs.windows(2).all(|w| w[0] < w[1]) || !target_pairs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParam("degree pairs must be strictly ascending".into()));
        }
        Ok(Self {
            source_pairs,
            target_pairs,
            values,
        })
    }

    pub fn from_graph(g: &DirectedGraph) -> Result<Self> {
        let m = g.num_edges();
        if m == 0 {
            return Err(Error::NoEdges);
        }
        let mut src: Vec<DegreePair> = Vec::new();
        let mut tgt: Vec<DegreePair> = Vec::new();
        for v in 0..g.num_nodes() as u32 {
            let p = g.degree_pair(v);
            if p.0 > 0 {
                src.push(p);
            }
            if p.1 > 0 {
                tgt.push(p);
            }
        }
        src.sort_unstable();
        src.dedup();
        tgt.sort_unstable();
        tgt.dedup();
        let cols = tgt.len();
        let mut counts = vec![0usize; src.len() * cols];
        for &(s, t) in g.edges() {
            let u = src.binary_search(&g.degree_pair(s)).expect("source pair in support");
            let v = tgt.binary_search(&g.degree_pair(t)).expect("target pair in support");
            counts[u * cols + v] += 1;
        }
        let values = counts.into_iter().map(|c| c as f64 / m as f64).collect();
        Ok(Self {
            source_pairs: src,
            target_pairs: tgt,
            values,
        })
    }

    pub fn source_pairs(&self) -> &[DegreePair] {
        &self.source_pairs
    }

    pub fn target_pairs(&self) -> &[DegreePair] {
        &self.target_pairs
    }

    pub fn rows(&self) -> usize {
        self.source_pairs.len()
    }

    pub fn cols(&self) -> usize {
        self.target_pairs.len()
    }

    /// Row-major entries.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.target_pairs.len() + col]
    }

    pub fn source_index(&self, pair: DegreePair) -> Option<usize> {
        self.source_pairs.binary_search(&pair).ok()
    }

    pub fn target_index(&self, pair: DegreePair) -> Option<usize> {
        self.target_pairs.binary_search(&pair).ok()
    }

    /// `η_{ijkl}` for explicit degree pairs.
    pub fn get(&self, source: DegreePair, target: DegreePair) -> Result<f64> {
        let u = self.source_index(source).ok_or(Error::MissingPair(source))?;
        let v = self.target_index(target).ok_or(Error::MissingPair(target))?;
        Ok(self.at(u, v))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.values.chunks(self.cols().max(1)).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols()];
        for row in self.values.chunks(self.cols().max(1)) {
            for (s, x) in sums.iter_mut().zip(row) {
                *s += x;
            }
        }
        sums
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn end_distributions(&self) -> EdgeEndDistributions {
        EdgeEndDistributions::from_masses(
            self.source_pairs.iter().copied().zip(self.row_sums()),
            self.target_pairs.iter().copied().zip(self.col_sums()),
        )
    }

    /// Two-way marginal `e^{(a,b)}` as a map from `(k, l)` to mass.
    pub fn two_way_marginal(&self, pair: TypePair) -> BTreeMap<(u32, u32), f64> {
        let (sa, tb) = (pair.source(), pair.target());
        let mut e = BTreeMap::new();
        for (u, &sp) in self.source_pairs.iter().enumerate() {
            for (v, &tp) in self.target_pairs.iter().enumerate() {
                let x = self.at(u, v);
                if x != 0.0 {
                    *e.entry((sa.of(sp), tb.of(tp))).or_insert(0.0) += x;
                }
            }
        }
        e
    }

    /// `Σ_{k,l} k l e^{(a,b)}_{kl}`.
    pub fn degree_product_mean(&self, pair: TypePair) -> f64 {
        let (sa, tb) = (pair.source(), pair.target());
        let mut total = 0.0;
        for (u, &sp) in self.source_pairs.iter().enumerate() {
            let x = sa.of(sp) as f64;
            let row = &self.values[u * self.cols()..(u + 1) * self.cols()];
            let inner: f64 = row
                .iter()
                .zip(&self.target_pairs)
                .map(|(h, &tp)| h * tb.of(tp) as f64)
                .sum();
            total += x * inner;
        }
        total
    }

    pub fn assortativity(&self) -> Result<AssortProfile> {
        let ends = self.end_distributions();
        let mut r = [0.0; 4];
        for pair in TypePair::ALL {
            let denom = ends.sigma_product(pair)?;
            r[pair.index()] = (self.degree_product_mean(pair) - ends.independent_product(pair)) / denom;
        }
        Ok(AssortProfile::from_array(r))
    }

    /// Writes nonzero entries as `i,j,k,l,eta` rows. Every support pair has
    /// positive row or column mass, so the support is recoverable on read.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["i", "j", "k", "l", "eta"]).map_err(csv_err)?;
        for (u, &(i, j)) in self.source_pairs.iter().enumerate() {
            for (v, &(k, l)) in self.target_pairs.iter().enumerate() {
                let x = self.at(u, v);
                if x > 0.0 {
                    w.write_record([
                        i.to_string(),
                        j.to_string(),
                        k.to_string(),
                        l.to_string(),
                        format!("{x:e}"),
                    ])
                    .map_err(csv_err)?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut entries = Vec::new();
        for (n, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let line = n + 2;
            let field = |i: usize| -> Result<&str> {
                rec.get(i).ok_or_else(|| Error::Parse {
                    line,
                    msg: "expected 5 columns".into(),
                })
            };
            let int = |i: usize| -> Result<u32> {
                field(i)?.trim().parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad degree {:?}", rec.get(i)),
                })
            };
            let x: f64 = field(4)?.trim().parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad eta {:?}", rec.get(4)),
            })?;
            entries.push(((int(0)?, int(1)?), (int(2)?, int(3)?), x));
        }
        let mut src: Vec<DegreePair> = entries.iter().map(|e| e.0).collect();
        let mut tgt: Vec<DegreePair> = entries.iter().map(|e| e.1).collect();
        src.sort_unstable();
        src.dedup();
        tgt.sort_unstable();
        tgt.dedup();
        let mut values = vec![0.0; src.len() * tgt.len()];
        for (s, t, x) in entries {
            let u = src.binary_search(&s).unwrap();
            let v = tgt.binary_search(&t).unwrap();
            values[u * tgt.len() + v] += x;
        }
        Self::new(src, tgt, values)
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            line: 0,
            msg: format!("{other:?}"),
        },
    }
}

pub fn assortativity_of_graph(g: &DirectedGraph) -> Result<AssortProfile> {
    EdgeMixMatrix::from_graph(g)?.assortativity()
}
