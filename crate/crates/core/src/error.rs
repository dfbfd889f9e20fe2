use thiserror::Error;

/// Errors raised by topology construction, synthesis and simulation.
///
/// Bin indices carried in error values are 1-based, matching every
/// external format the crate reads or writes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid dimensions must be positive (rows={rows}, cols={cols}, hop={hop})")]
    InvalidGrid { rows: usize, cols: usize, hop: usize },

    #[error("adjacency is not symmetric at bins ({0}, {1})")]
    AsymmetricAdjacency(usize, usize),

    #[error("bin {0} is missing its self-loop")]
    MissingSelfLoop(usize),

    #[error("bin subset is empty")]
    EmptySubset,

    #[error("bin {bin} is out of range for {bins} bins")]
    BinOutOfRange { bin: usize, bins: usize },

    #[error("bin subset is not connected")]
    Disconnected,

    #[error("transient bin {0} cannot reach the recurrent set")]
    UnreachableBin(usize),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("entry {index} is negative")]
    NegativeEntry { index: usize },

    #[error("entries sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("weight map has no positive weight")]
    ZeroWeights,

    #[error("swarm has no agents")]
    EmptySwarm,

    #[error("d_chsn = {d_chsn} must exceed the maximum degree {max_degree}")]
    InadmissibleDivisor { d_chsn: f64, max_degree: usize },

    #[error("desired value on recurrent bin {0} must be positive")]
    NonPositiveDesired(usize),

    #[error("missing data for neighbor bin {0}")]
    MissingNeighbor(usize),

    #[error("transient bin {0} has no neighbor in the next layer")]
    DeadEndTransient(usize),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("invalid Markov matrix: {0}")]
    InvalidMatrix(String),

    #[error("zero-sum constraint violated: entries sum to {0}")]
    NotZeroSum(f64),

    #[error("removal fraction {0} must lie strictly between 0 and 1")]
    InvalidFraction(f64),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
