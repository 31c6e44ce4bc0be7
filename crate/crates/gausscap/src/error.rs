use thiserror::Error;

/// Errors produced by the Gaussian-channel and Fock-oracle layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("invalid dilation: {0}")]
    InvalidDilation(String),

    /// The noise decomposition requires a nondegenerate difference form.
    #[error("unsupported channel: {0}")]
    UnsupportedChannel(String),

    /// The truncated Fock basis is too small for the requested accuracy.
    #[error("cutoff too small: {msg} (estimated required cutoff: {required})")]
    CutoffTooSmall { msg: String, required: usize },

    /// A moment-preserving perturbation could not be constructed; retry with
    /// another seed.
    #[error("perturbation rejected: {0}")]
    PerturbationRejected(String),
}

pub type Result<T> = std::result::Result<T, Error>;
