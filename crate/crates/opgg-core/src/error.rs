//! Error type shared across the crate.

/// Everything that can go wrong when building inputs or running solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Game parameters violate the assumptions the model needs.
    #[error("invalid game parameters: {0}")]
    InvalidParams(String),

    /// A population state is not a point of the probability simplex.
    #[error("invalid population state: {0}")]
    InvalidState(String),

    /// A punishment fraction lies outside its admissible interval.
    #[error("punishment fraction {value} outside [{lo}, {hi}]")]
    ControlOutOfRange { value: f64, lo: f64, hi: f64 },

    /// A group composition does not add up to the group size.
    #[error("invalid group composition: {0}")]
    InvalidComposition(String),

    /// Brute-force enumeration was requested for a group too large to sum.
    #[error("group size {n} exceeds the enumeration cap of {cap}")]
    EnumerationCap { n: u32, cap: u32 },

    /// A time grid has a non-positive span or zero steps.
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    /// Two containers that must share a grid do not.
    #[error("mismatched grids: {0}")]
    GridMismatch(String),

    /// Cost weights are negative, all zero, or the bound is out of range.
    #[error("invalid cost weights: {0}")]
    InvalidWeights(String),

    /// A solver configuration field is out of range.
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    /// An integration step left the simplex by more than the safety margin,
    /// which means the step size is too coarse for the dynamics.
    #[error("integration step {index} drifted off the simplex by {drift:.3e}; use a finer grid")]
    StepOffSimplex { index: usize, drift: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
