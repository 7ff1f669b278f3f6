use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty graph")]
    EmptyGraph,

    #[error("graph has no edges")]
    NoEdges,

    #[error("need at least 2 edges to sample a pair, graph has {0}")]
    TooFewEdges(usize),

    #[error("edge index {index} out of range for {len} edges")]
    EdgeIndex { index: usize, len: usize },

    #[error("swap needs two distinct edges, got {0} twice")]
    SameEdge(usize),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("degenerate end distribution; assortativity undefined ({0})")]
    DegenerateEnds(&'static str),

    #[error("degree pair {0:?} not present in the edge mix support")]
    MissingPair((u32, u32)),

    #[error("graph and edge mix matrix have different degree-pair support")]
    SupportMismatch,

    #[error("invalid linear program: {0}")]
    InvalidLp(String),

    #[error("simplex cycling/stall: iteration cap {0} exceeded")]
    IterationCap(usize),

    #[error("LP solver reported {0}")]
    UnexpectedLpStatus(&'static str),

    #[error("conditioning intervals unattainable")]
    ConditioningUnattainable,

    #[error("bound overshoots [-1, 1] by {0:e}")]
    BoundOvershoot(f64),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("no scenario labels")]
    NoScenarioLabels,

    #[error("more nodes than edges; beta_hat undefined")]
    MoreNodesThanEdges,

    #[error("too few positive degrees for tail estimation: {0}")]
    TooFewDegrees(usize),

    #[error("no power-law tail: {0}")]
    NoPowerLawTail(&'static str),

    #[error("all nodes have zero degree")]
    AllZeroDegree,

    #[error("inconsistent tail estimates: {0}")]
    InconsistentTail(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
