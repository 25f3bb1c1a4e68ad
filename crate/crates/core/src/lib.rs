//! Exciton-model excited states via the multistate contracted VQE (MC-VQE),
//! simulated classically on a real-amplitude statevector.
//!
//! The pipeline mirrors the four algorithm stages:
//!
//! 1. [`cis`] — solve configuration interaction singles in the
//!    {reference + single excitations} basis; these are the contracted
//!    reference states `|Φ_Θ⟩`, preparable by a shallow Ry/controlled-Fy/CNOT
//!    circuit.
//! 2. [`mcvqe::McVqe::optimize_entangler`] — minimize the state-averaged
//!    energy `Ē = (1/N_Θ) Σ_Θ ⟨Φ_Θ|Û†ĤÛ|Φ_Θ⟩` over the SO(4) entangler
//!    parameters (L-BFGS on central finite-difference gradients, or Powell).
//! 3. [`mcvqe::McVqe::assemble_subspace`] — measure the entangled contracted
//!    Hamiltonian: diagonal elements directly, off-diagonals through
//!    interference states via `H_ΘΘ' = [E(+) − E(−)]/2`.
//! 4. Classical diagonalization of the small subspace matrix; transition
//!    dipoles and oscillator strengths follow by substituting the dipole
//!    operator for Ĥ in the same interference procedure.
//!
//! [`pauli`] builds the exciton Hamiltonian and dipole operator in Pauli form
//! from per-monomer data, [`simulator`] provides the statevector backend,
//! [`exact`] the FCI validation oracle (dense or matrix-free Lanczos), and
//! [`synth`] deterministic ring/stack test systems. Everything works in atomic
//! units (hartree, bohr); eV appears only at reporting boundaries via
//! [`HARTREE_TO_EV`].

pub mod cis;
pub mod entangler;
pub mod error;
pub mod exact;
pub mod io;
pub mod mcvqe;
pub mod numerics;
pub mod pauli;
pub mod simulator;
pub mod synth;

pub use error::{Error, Result};

/// CODATA hartree → electronvolt conversion.
pub const HARTREE_TO_EV: f64 = 27.211386245988;
