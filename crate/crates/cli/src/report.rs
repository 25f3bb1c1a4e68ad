//! Machine-readable output schemas (results JSON, comparison report,
//! spectrum) and the Lorentzian broadening kernel.
//!
//! Floats are serialized at full round-trip precision and parsed exactly, so
//! a results file written and read back reproduces every value bit-exactly.

use exciton_vqe::mcvqe::TransitionSet;
use exciton_vqe::numerics::TraceEntry;
use exciton_vqe::{Error, Result};
use serde::{Deserialize, Serialize};

/// Wall-clock accounting in seconds; stages that did not run stay zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    #[serde(default)]
    pub setup_s: f64,
    #[serde(default)]
    pub optimize_s: f64,
    #[serde(default)]
    pub assemble_s: f64,
    #[serde(default)]
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub value: f64,
    pub grad_inf: Option<f64>,
}

impl From<&TraceEntry> for TraceRow {
    fn from(e: &TraceEntry) -> Self {
        TraceRow {
            iter: e.iter,
            value: e.value,
            grad_inf: e.grad_inf,
        }
    }
}

/// One method's results file (`cis`, `mcvqe`, or `fci`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: String,
    pub n_sites: usize,
    pub n_states: usize,
    /// Absolute state energies (hartree), ascending.
    pub energies_hartree: Vec<f64>,
    /// The same energies in eV.
    pub energies_ev: Vec<f64>,
    /// Excitation energies E_Θ − E_0 (eV).
    pub excitations_ev: Vec<f64>,
    /// ⟨Ψ_0|μ̂|Ψ_Θ⟩ (a.u.).
    pub transition_dipoles: Vec<[f64; 3]>,
    pub oscillator_strengths: Vec<f64>,
    /// Site excitation populations, one row per state.
    pub populations: Vec<Vec<f64>>,
    /// States inside a near-degenerate cluster (transition properties
    /// gauge-dependent there).
    pub degenerate: Vec<bool>,
    /// Optimized entangler parameter values (mcvqe only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<Vec<f64>>,
    /// Accepted-iterate optimizer trace (mcvqe only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
    /// Optimizer outcome tag (mcvqe only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    /// Objective evaluations spent (mcvqe only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_evals: Option<usize>,
    /// Final eigenpair residual norms (fci only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<Vec<f64>>,
    /// Sidecar file with raw statevector amplitudes, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states_file: Option<String>,
    #[serde(default)]
    pub timings: Timings,
}

impl MethodResult {
    pub fn from_transitions(method: &str, n_sites: usize, t: &TransitionSet) -> Self {
        MethodResult {
            method: method.to_string(),
            n_sites,
            n_states: t.energies.len(),
            energies_hartree: t.energies.clone(),
            energies_ev: t
                .energies
                .iter()
                .map(|e| e * exciton_vqe::HARTREE_TO_EV)
                .collect(),
            excitations_ev: t.excitations_ev.clone(),
            transition_dipoles: t.transition_dipoles.clone(),
            oscillator_strengths: t.oscillator_strengths.clone(),
            populations: t.populations.clone(),
            degenerate: t.degenerate.clone(),
            parameters: None,
            trace: None,
            outcome: None,
            n_evals: None,
            residuals: None,
            states_file: None,
            timings: Timings::default(),
        }
    }
}

/// Sidecar format for raw eigenstate amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatesFile {
    pub n_qubits: usize,
    /// One amplitude vector (length 2^n) per state, ascending energy.
    pub states: Vec<Vec<f64>>,
}

/// A broadened absorption spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub method: String,
    /// Lorentzian half-width at half-maximum (eV).
    pub delta_ev: f64,
    /// (excitation energy eV, oscillator strength) stick list, Θ ≥ 1.
    pub transitions: Vec<(f64, f64)>,
    /// Strictly increasing energy grid (eV).
    pub grid_ev: Vec<f64>,
    /// I(E) ≥ 0 per grid point.
    pub intensity: Vec<f64>,
}

/// Area-normalized Lorentzian stick broadening:
/// I(E) = Σ_Θ O_Θ · (1/π) · δ / ((E − ΔE_Θ)² + δ²), δ = HWHM.
pub fn broaden(transitions: &[(f64, f64)], delta: f64, grid: &[f64]) -> Vec<f64> {
    assert!(delta > 0.0, "broadening width must be positive");
    grid.iter()
        .map(|&e| {
            transitions
                .iter()
                .map(|&(de, o)| o * std::f64::consts::FRAC_1_PI * delta / ((e - de).powi(2) + delta * delta))
                .sum()
        })
        .collect()
}

/// Uniform grid emin..emax inclusive with `points` samples.
pub fn energy_grid(emin: f64, emax: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(emax > emin) {
        return Err(Error::InvalidInput(format!(
            "need points ≥ 2 and emax > emin, got {points} points over [{emin}, {emax}]"
        )));
    }
    let step = (emax - emin) / (points - 1) as f64;
    Ok((0..points).map(|j| emin + step * j as f64).collect())
}

/// Pairwise errors of one method against the reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareEntry {
    pub method: String,
    pub path: String,
    /// |ΔE_Θ − ΔE_Θ^ref| per excited state (eV).
    pub energy_errors_ev: Vec<f64>,
    pub max_abs_energy_error_ev: f64,
    /// |O_Θ − O_Θ^ref| per excited state.
    pub osc_abs_errors: Vec<f64>,
    pub max_osc_abs_error: f64,
    /// |O_Θ − O_Θ^ref| / max(O_Θ^ref, 1e−12).
    pub osc_rel_errors: Vec<f64>,
    /// Per-state |⟨Ψ_Θ|Ψ_Θ^ref⟩| when both runs stored states.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelities: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_fidelity: Option<f64>,
}

/// Cross-method comparison: every non-reference input scored against the
/// reference (the FCI file when present, otherwise the last input).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub reference_method: String,
    pub reference_path: String,
    pub entries: Vec<CompareEntry>,
}

pub fn compare_against(
    reference: &MethodResult,
    reference_states: Option<&StatesFile>,
    candidate: &MethodResult,
    candidate_states: Option<&StatesFile>,
    path: &str,
) -> CompareEntry {
    let k = reference.n_states.min(candidate.n_states);
    let energy_errors_ev: Vec<f64> = (1..k)
        .map(|t| (candidate.excitations_ev[t] - reference.excitations_ev[t]).abs())
        .collect();
    let osc_abs_errors: Vec<f64> = (1..k)
        .map(|t| (candidate.oscillator_strengths[t] - reference.oscillator_strengths[t]).abs())
        .collect();
    let osc_rel_errors: Vec<f64> = (1..k)
        .map(|t| {
            (candidate.oscillator_strengths[t] - reference.oscillator_strengths[t]).abs()
                / reference.oscillator_strengths[t].max(1e-12)
        })
        .collect();
    let fidelities: Option<Vec<f64>> = match (reference_states, candidate_states) {
        (Some(r), Some(c)) if r.n_qubits == c.n_qubits => {
            let m = r.states.len().min(c.states.len()).min(k);
            Some(
                (0..m)
                    .map(|t| {
                        r.states[t]
                            .iter()
                            .zip(&c.states[t])
                            .map(|(a, b)| a * b)
                            .sum::<f64>()
                            .abs()
                    })
                    .collect(),
            )
        }
        _ => None,
    };
    let min_fidelity = fidelities
        .as_ref()
        .and_then(|f| f.iter().copied().reduce(f64::min));
    let max = |v: &[f64]| v.iter().copied().fold(0.0f64, f64::max);
    CompareEntry {
        method: candidate.method.clone(),
        path: path.to_string(),
        max_abs_energy_error_ev: max(&energy_errors_ev),
        energy_errors_ev,
        max_osc_abs_error: max(&osc_abs_errors),
        osc_abs_errors,
        osc_rel_errors,
        fidelities,
        min_fidelity,
    }
}
