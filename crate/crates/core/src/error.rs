use thiserror::Error;

pub type Result<T> = std::result::Result<T, ChainError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The explicit integrator would be unstable at the requested step.
    #[error("stability bound violated: {0}")]
    Stability(String),

    /// A pair gap collapsed onto the repulsive singularity of the potential.
    #[error("singular potential: gap {gap:e} at bond {bond} (t = {t})")]
    Singular { bond: usize, gap: f64, t: f64 },

    #[error("integer relation search space of {size} vectors exceeds the limit {limit}")]
    SearchTooLarge { size: f64, limit: f64 },
}

impl ChainError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        ChainError::Domain(msg.into())
    }

    /// True for failures of the numerical scheme rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, ChainError::Stability(_) | ChainError::Singular { .. })
    }
}
