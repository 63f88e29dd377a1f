//! Dense third-order tensor algebra and low-tubal-rank tensor completion.
//!
//! The crate is organized bottom-up:
//!
//! * [`tensor`] — the `Tensor3` value type: slicing, folding, the
//!   block-circulant expansion, inner products, and elementwise norms.
//! * [`spectral`] — the mode-3 DFT, its inverse, and the block-diagonal
//!   view of the spectrum.
//! * [`algebra`] — the t-product algebra: tensor product, conjugate
//!   transpose, t-SVD, tubal rank, tensor nuclear norms, and the
//!   singular-value shrinkage operator.
//! * [`solver`] — tensor completion by truncated-nuclear-norm minimization
//!   (a two-level ADMM) and the tubal-nuclear-norm baseline.
//! * [`metrics`] — MSE/PSNR over the missing entries.
//!
//! Indices in the public API are 1-based throughout, matching the usual
//! mathematical notation for tensors; storage is 0-based internally.

pub mod algebra;
pub mod metrics;
pub mod solver;
pub mod spectral;
pub mod tensor;

pub use algebra::TSvdFactors;
pub use metrics::RecoveryScore;
pub use solver::{Method, ObservationMask, SolverConfig, SolverReport};
pub use spectral::{CMatrix, SpectralTensor};
pub use tensor::{Matrix, Norms, Tensor3};

/// Unified error type for the whole crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Operand shapes are incompatible for the requested operation.
    #[error("{op}: dimension mismatch ({detail})")]
    DimMismatch { op: &'static str, detail: String },

    /// A 1-based index fell outside its valid range.
    #[error("{op}: index {index} out of range 1..={bound}")]
    IndexOutOfRange {
        op: &'static str,
        index: usize,
        bound: usize,
    },

    /// A truncation/rank argument fell outside its valid range.
    #[error("{op}: rank {r} out of range {min}..={max}")]
    RankOutOfRange {
        op: &'static str,
        r: usize,
        min: usize,
        max: usize,
    },

    /// The inverse mode-3 transform produced imaginary mass above tolerance,
    /// meaning the spectral input was not conjugate-symmetric. This always
    /// indicates a logic error upstream, never ordinary round-off.
    #[error("inverse transform imaginary residue {residue:.3e} exceeds {tolerance:.3e} (spectrum not conjugate-symmetric)")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    /// The iterative SVD failed to converge on one spectral slice.
    #[error("SVD did not converge on spectral slice {slice}")]
    SvdFailure { slice: usize },

    /// A solver configuration value is out of its admissible range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An observation mask violated its invariants.
    #[error("invalid mask: {0}")]
    InvalidMask(String),

    /// A NaN or infinity appeared where finite data is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// The mask leaves no entry missing, so recovery quality is undefined.
    #[error("nothing to score: mask leaves no entry missing")]
    NothingToScore,
}

pub type Result<T> = std::result::Result<T, Error>;
