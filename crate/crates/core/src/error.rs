use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("defect size r must be at least 1")]
    EmptyDefect,
    #[error("defect touches or overlaps the external boundary (b = {0}, need b >= 2)")]
    TouchesBoundary(usize),
    #[error("defects touch or overlap (s = {0}, need s >= 2)")]
    DefectsOverlap(usize),
    #[error("graph kind {0} needs two defects")]
    NeedsTwoDefects(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge {edge} references vertex {vertex} out of range")]
    VertexOutOfRange { edge: usize, vertex: usize },
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("edge {edge} has invalid weight {weight}")]
    InvalidWeight { edge: usize, weight: f64 },
    #[error("boundary vertex {0} must have exactly one incident edge")]
    BoundaryDegree(usize),
    #[error("{0} per-edge values given for {1} edges")]
    LengthMismatch(usize, usize),
    #[error("malformed graph file at line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("syndrome vertex {0} is not a non-boundary vertex of the graph")]
    BadSyndromeVertex(usize),
    #[error("no recovery chain exists for this syndrome (odd component without boundary)")]
    Infeasible,
    #[error("path weights overflow the integer matching range")]
    WeightOverflow,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("rungs {0} and {1} do not overlap (smaller g-average {2:.3e})")]
    RungOverlap(usize, usize, f64),
    #[error("invalid physical error rate {0}")]
    InvalidRate(f64),
    #[error("empty sample set")]
    NoSamples,
    #[error("initial chain is correctable")]
    CorrectableStart,
    #[error("graph has no logical failure chain")]
    NoFailureChain,
    #[error("stopped: {0}")]
    Interrupted(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("not enough data points ({0}) for {1} parameters")]
    TooFewPoints(usize, usize),
    #[error("data do not determine all parameters (singular normal equations)")]
    Singular,
    #[error("invalid data point: {0}")]
    InvalidPoint(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("readout schedule does not measure commuting checks consistently: {0}")]
    BadSchedule(String),
    #[error("fault {event} produces {count} detection events (at most two expected)")]
    TooManyDetectors { event: String, count: usize },
    #[error("faults mapped to edge {0} disagree on the logical parity of their data error")]
    AmbiguousClass(usize),
    #[error("edge {edge} has prior {prior} >= 1/2 at this error rate")]
    PriorTooLarge { edge: usize, prior: f64 },
    #[error("fault {0} flips a single check but the graph has no boundary")]
    UnmatchedDetector(String),
    #[error("need at least one readout cycle")]
    NoCycles,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
