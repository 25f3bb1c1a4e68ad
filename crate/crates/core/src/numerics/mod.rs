//! Self-contained numerical kernels: dense symmetric eigensolver, 4×4
//! antisymmetric matrix exponential, L-BFGS and Powell minimizers, central
//! finite-difference gradients, and a small deterministic RNG.
//!
//! Matrix sizes in this crate stay small — CIS and subspace matrices are
//! (N+1)×(N+1), Lanczos tridiagonals a few hundred rows — so the kernels favor
//! clarity and bit-reproducibility over BLAS-grade throughput.

mod eigh;
mod expm;
mod mat;
mod mat4;
mod optim;
mod rng;

pub use eigh::eigh;
pub use expm::expm_antisym4;
pub use mat::Mat;
pub use mat4::{mat4_det, mat4_identity, mat4_max_abs, mat4_mul, mat4_mul_vec, mat4_transpose, Mat4};
pub use optim::{
    fd_gradient, lbfgs, powell, OptimOutcome, OptimResult, OptimizerOptions, TraceEntry,
};
pub use rng::SplitMix64;
