use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("n = {0} is below the minimum of 2 sets")]
    TooFewSets(usize),
    #[error("k = {0} is below the minimum of 2 stars per set (k = 1 is a complete cored star network, not supported)")]
    TooFewStars(usize),
    #[error("m = {0} is below the minimum path length of 1")]
    PathTooShort(usize),
    #[error("L = {0} is below the minimum of 1 branch per star")]
    TooFewBranches(usize),

    #[error("node ({i},{j},{p},{q}) is outside the network")]
    NodeOutOfRange {
        i: usize,
        j: usize,
        p: usize,
        q: usize,
    },
    #[error("linear index {index} is outside [0, {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("expected {expected} orbit weights, got {actual}")]
    WeightLength { expected: usize, actual: usize },
    #[error("orbit weight {index} is not finite")]
    NonFiniteWeight { index: usize },

    #[error("singular evaluation of {what} at theta = {theta}")]
    Singular { what: &'static str, theta: f64 },
    #[error("no sign change of the optimality residual found on (0, pi)")]
    NoRoot,
    #[error("none of the {candidates} residual roots reproduces the assembled spectrum (best cos(theta) = {cos_theta}, slem = {slem})")]
    Inconsistent {
        candidates: usize,
        cos_theta: f64,
        slem: f64,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max |a_ij - a_ji| = {0:e})")]
    NotSymmetric(f64),
    #[error("Jacobi iteration did not converge in {0} sweeps")]
    NoConvergence(usize),

    #[error("window [{start}, {end}) is outside the recorded {len} iterations")]
    BadWindow {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("decay rate is undefined: the distance reached zero at t = {0}")]
    ZeroDistance(usize),
    #[error("every trial started from a constant vector")]
    NoUsableTrials,
}

pub type Result<T> = std::result::Result<T, Error>;
