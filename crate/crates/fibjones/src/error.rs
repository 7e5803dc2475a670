use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Braid text did not match the grammar. `pos` is a byte offset into the input.
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// A generator index fell outside `1..strands`.
    #[error("generator index {index} out of range for {strands} strands")]
    GeneratorOutOfRange { index: i64, strands: usize },

    /// Binary operation on braids with different strand counts.
    #[error("strand count mismatch: {left} vs {right}")]
    StrandMismatch { left: usize, right: usize },

    /// An argument violated a documented domain bound.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input exceeds the desk-scale cap for an exact computation.
    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    /// A matrix expected to be unitary was not, within tolerance.
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    /// Precondition of an operation was violated by the argument.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot read input file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
