use thiserror::Error;

/// Network construction / validation failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("duplicate pipe id `{0}`")]
    DuplicatePipe(String),
    #[error("pipe `{pipe}` references unknown node `{node}`")]
    DanglingEndpoint { pipe: String, node: String },
    #[error("pipe `{0}` connects a node to itself")]
    SelfLoop(String),
    #[error("pipe `{pipe}`: {what} must be positive (got {value})")]
    NonPositive {
        pipe: String,
        what: &'static str,
        value: f64,
    },
    #[error("node `{node}`: {what}")]
    InvalidNode { node: String, what: String },
    #[error("network has no tank; heads are undetermined without a fixed-head node")]
    NoTank,
    #[error("network is disconnected: node `{0}` is unreachable from the first node")]
    Disconnected(String),
    #[error("demands are unbalanced: sum over all nodes is {sum:.3e} m³/s (|sum| > {tol:.1e})")]
    UnbalancedDemand { sum: f64, tol: f64 },
    #[error("pump references unknown tank `{0}`")]
    UnknownPumpTank(String),
    #[error("pump for tank `{tank}`: {what}")]
    InvalidPump { tank: String, what: String },
    #[error("loop {index}: pipes do not form a closed walk or tank-to-tank path ({what})")]
    OpenWalk { index: usize, what: String },
    #[error("loop rows are rank-deficient: rank {rank} < {count} loops")]
    RankDeficient { rank: usize, count: usize },
    #[error("wrong loop count: got {got}, need pipes - junctions = {need}")]
    WrongLoopCount { got: usize, need: usize },
}

/// Flow-solver failures. Non-convergence is reported in the solution
/// itself, not as an error.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("Jacobian is singular at iteration {iteration}; suspect pipes with zero resistance: {suspects:?}")]
    SingularJacobian {
        iteration: usize,
        suspects: Vec<String>,
    },
    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// Design-optimizer failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("no feasible design found across {starts} starts; least violation {violation:.4} m at h_r={water_depth:.3}, h_b={height:.3}")]
    Infeasible {
        starts: usize,
        violation: f64,
        water_depth: f64,
        height: f64,
    },
    #[error("network has no tanks to design")]
    NoTanks,
    #[error("design compares different scenarios: {0}")]
    ScenarioMismatch(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}
