//! Crate-wide error type. Variants are grouped by what the caller can do about
//! them: input/validation problems, size caps, and numerical failures.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent user input (monomer lists, connectivity,
    /// parameter vectors of the wrong length, …).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two monomers share a center of mass; the dipole-dipole coupling is
    /// undefined.
    #[error("degenerate geometry: centers {a:?} and {b:?} coincide (r = {r:.3e} bohr)")]
    DegenerateGeometry { a: [f64; 3], b: [f64; 3], r: f64 },

    /// A size cap was exceeded (dense materialization, statevector width, …).
    #[error("{what} requires n = {n}, above the cap {cap}")]
    CapExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    /// An operand violated a numerical precondition (asymmetric matrix where
    /// a symmetric one is required, non-orthonormal states, …).
    #[error("numerical precondition violated: {0}")]
    Precondition(String),

    /// An iterative solver ran out of budget. `residuals` carries the best
    /// per-pair residual norms seen.
    #[error("iterative solver did not converge: {context} (best residuals {residuals:?})")]
    NotConverged {
        context: String,
        residuals: Vec<f64>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}
