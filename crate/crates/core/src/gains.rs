//! Attribution of assortativity change during rewiring to the creation
//! scenarios of the two sampled DPA edges.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::assort::{csv_err, AssortProfile, EdgeMixMatrix, TypePair};
use crate::error::{Error, Result};
use crate::generators::{DpaGraph, Scenario};
use crate::graph::DirectedGraph;
use crate::rewire::{rewire_observed, AssortTracker, RewiringConfig, RewiringTrace};

/// Unordered pair of edge scenarios. Pairs involving the seed edge go to
/// `Other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScenarioPair {
    AlphaAlpha,
    AlphaBeta,
    AlphaGamma,
    BetaBeta,
    BetaGamma,
    GammaGamma,
    Other,
}

impl ScenarioPair {
    pub const ALL: [ScenarioPair; 7] = [
        ScenarioPair::AlphaAlpha,
        ScenarioPair::AlphaBeta,
        ScenarioPair::AlphaGamma,
        ScenarioPair::BetaBeta,
        ScenarioPair::BetaGamma,
        ScenarioPair::GammaGamma,
        ScenarioPair::Other,
    ];

    pub fn of(a: Scenario, b: Scenario) -> Self {
        use Scenario::*;
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        match (a, b) {
            (Alpha, Alpha) => ScenarioPair::AlphaAlpha,
            (Alpha, Beta) => ScenarioPair::AlphaBeta,
            (Alpha, Gamma) => ScenarioPair::AlphaGamma,
            (Beta, Beta) => ScenarioPair::BetaBeta,
            (Beta, Gamma) => ScenarioPair::BetaGamma,
            (Gamma, Gamma) => ScenarioPair::GammaGamma,
            _ => ScenarioPair::Other,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ScenarioPair::AlphaAlpha => "alpha-alpha",
            ScenarioPair::AlphaBeta => "alpha-beta",
            ScenarioPair::AlphaGamma => "alpha-gamma",
            ScenarioPair::BetaBeta => "beta-beta",
            ScenarioPair::BetaGamma => "beta-gamma",
            ScenarioPair::GammaGamma => "gamma-gamma",
            ScenarioPair::Other => "other",
        }
    }
}

impl fmt::Display for ScenarioPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-bucket change in each coefficient, accumulated exactly as integer
/// changes of the degree-product sums.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioGains {
    sums: [[i128; 4]; 7],
    accepted: [u64; 7],
    scale: [f64; 4],
    pub initial: AssortProfile,
    pub r#final: AssortProfile,
}

impl ScenarioGains {
    pub fn accepted(&self, bucket: ScenarioPair) -> u64 {
        self.accepted[bucket.index()]
    }

    pub fn increase(&self, bucket: ScenarioPair, pair: TypePair) -> f64 {
        self.sums[bucket.index()][pair.index()] as f64 * self.scale[pair.index()]
    }

    pub fn increases(&self, bucket: ScenarioPair) -> [f64; 4] {
        TypePair::ALL.map(|p| self.increase(bucket, p))
    }

    /// `final - initial` for each coefficient, from the exact bucket sums.
    pub fn total(&self, pair: TypePair) -> f64 {
        let s: i128 = self.sums.iter().map(|b| b[pair.index()]).sum();
        s as f64 * self.scale[pair.index()]
    }

    /// Bucket with the largest increase of `pair` among the six scenario
    /// pairs.
    pub fn leader(&self, pair: TypePair) -> ScenarioPair {
        ScenarioPair::ALL[..6]
            .iter()
            .copied()
            .max_by(|a, b| self.increase(*a, pair).total_cmp(&self.increase(*b, pair)))
            .expect("six buckets")
    }

    /// `bucket,accepted,r11,r12,r21,r22`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["bucket", "accepted", "r11", "r12", "r21", "r22"])
            .map_err(csv_err)?;
        for b in ScenarioPair::ALL {
            let inc = self.increases(b);
            let mut row = vec![b.name().to_string(), self.accepted(b).to_string()];
            row.extend(inc.iter().map(|x| x.to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the chain on a labeled DPA graph, attributing every accepted swap to
/// the scenario pair of the two sampled edges. Labels stay with edge
/// indices, so after a swap edge `e` keeps its source and its label.
pub fn scenario_gains(
    dpa: &DpaGraph,
    eta: &EdgeMixMatrix,
    cfg: &RewiringConfig,
) -> Result<(ScenarioGains, DirectedGraph, RewiringTrace)> {
    let labels = &dpa.scenarios;
    if labels.is_empty() {
        return Err(Error::NoScenarioLabels);
    }
    if labels.len() != dpa.graph.num_edges() {
        return Err(Error::InvalidParam(format!(
            "{} scenario labels for {} edges",
            labels.len(),
            dpa.graph.num_edges()
        )));
    }
    let tracker = AssortTracker::new(&dpa.graph)?;
    let scale = TypePair::ALL.map(|p| tracker.scale(p));
    let mut sums = [[0i128; 4]; 7];
    let mut accepted = [0u64; 7];
    let (g, trace) = rewire_observed(&dpa.graph, eta, cfg, |ev| {
        let b = ScenarioPair::of(labels[ev.e1], labels[ev.e2]).index();
        accepted[b] += 1;
        for (s, d) in sums[b].iter_mut().zip(ev.delta_sums) {
            *s += d;
        }
    })?;
    let initial = tracker.profile();
    let r#final = AssortTracker::new(&g)?.profile();
    Ok((
        ScenarioGains {
            sums,
            accepted,
            scale,
            initial,
            r#final,
        },
        g,
        trace,
    ))
}
