use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph must have at least one node")]
    NoNodes,
    #[error("graph has {n} nodes, at most {max} are supported")]
    TooManyNodes { n: usize, max: usize },
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("n = {n} outside the supported range {min}..={max}")]
    UnsupportedSize { n: usize, min: usize, max: usize },
    #[error("power iteration did not converge after {iterations} iterations")]
    SpectralNoConvergence { iterations: usize },
    #[error("epidemic threshold is undefined for a graph without links")]
    UndefinedThreshold,
    #[error("steady-state iteration did not converge (residual {residual:e} after {iterations} iterations)")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("explicit Euler step left [0, 1] at node {node} (value {value}); reduce dt")]
    StepInstability { node: usize, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("ownership profile does not match the graph: {0}")]
    OwnershipMismatch(&'static str),
    #[error("deviation space has {required} strategies, budget is {budget}")]
    BudgetExceeded { required: u64, budget: u64 },
    #[error("equilibrium set is empty")]
    NoEquilibria,
    #[error("profile {index} is not an exact Nash equilibrium")]
    NotAnEquilibrium { index: usize },
    #[error("guard violated: {0}")]
    GuardViolation(&'static str),
}
