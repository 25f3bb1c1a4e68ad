//! The MC-VQE driver: state-averaged entangler optimization, contracted
//! Hamiltonian assembly through interference states, subspace
//! diagonalization, and transition properties.
//!
//! The four algorithm stages map onto this module as
//!
//! 1. CIS references — solved once at construction and cached as prepared
//!    statevectors `|Φ_Θ⟩`;
//! 2. [`McVqe::optimize_entangler`] — minimize the state-averaged energy
//!    `Ē(θ) = (1/N_Θ) Σ_Θ ⟨Φ_Θ|Û†(θ) Ĥ Û(θ)|Φ_Θ⟩` from the zero-entangler
//!    (pure CIS) starting point, with central finite-difference gradients;
//! 3. [`McVqe::assemble_subspace`] — diagonal elements directly, off-diagonal
//!    elements from the interference identity
//!    `H_ΘΘ' = [E(+) − E(−)]/2`, `E(±) = ⟨Φ_± |Û†ĤÛ| Φ_±⟩`,
//!    `|Φ_±⟩ = (|Φ_Θ⟩ ± |Φ_Θ'⟩)/√2` — every quantity a measurable
//!    expectation value;
//! 4. classical diagonalization of the small symmetric subspace matrix.
//!
//! Transition dipoles reuse stage 3 verbatim with the dipole operator in
//! place of Ĥ, so a single preparation pass serves all four operators. The
//! subspace eigenvalues are Ritz values: by min-max each upper-bounds the
//! corresponding exact eigenvalue, which the tests exploit against FCI.

use crate::cis::{
    canonicalize_columns, interference_coeffs, prepare_cis_state, solve_cis, CisSolution,
};
use crate::entangler::{
    build_entangler_circuit, EntanglerLayout, EntanglerParams, Parametrization,
};
use crate::numerics::{eigh, fd_gradient, lbfgs, powell, Mat, OptimizerOptions, TraceEntry};
pub use crate::numerics::{OptimOutcome, OptimResult};
use crate::pauli::{
    build_dipole_operator, build_hamiltonian, Connectivity, DipoleOperator, ExcitonHamiltonian,
    MonomerData, PauliTerm,
};
use crate::simulator::{apply_circuit, inner_product, ExpectationPlan, PauliApplier, StateVector};
use crate::{Error, Result, HARTREE_TO_EV};
use serde::{Deserialize, Serialize};

/// Energy gap (hartree) below which two subspace states are treated as
/// degenerate and their transition properties flagged.
pub const DEGENERACY_GAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Lbfgs,
    Powell,
}

#[derive(Debug, Clone)]
pub struct McVqeConfig {
    /// Number of contracted states N_Θ; defaults to all N+1 CIS states.
    pub n_states: Option<usize>,
    /// Central finite-difference step Δθ (radians).
    pub fd_step: f64,
    /// Convergence threshold on max |∂Ē/∂θ|.
    pub gtol: f64,
    pub max_iter: usize,
    pub optimizer: OptimizerKind,
    pub n_layers: usize,
    pub parametrization: Parametrization,
}

impl Default for McVqeConfig {
    fn default() -> Self {
        McVqeConfig {
            n_states: None,
            fd_step: 0.01,
            gtol: 1e-7,
            max_iter: 200,
            optimizer: OptimizerKind::Lbfgs,
            n_layers: 1,
            parametrization: Parametrization::PauliAngles,
        }
    }
}

/// The contracted subspace after assembly: `h_sub` in the reference basis,
/// its spectrum, and the optimization history that produced the parameters.
#[derive(Debug, Clone)]
pub struct SubspaceResult {
    /// N_Θ×N_Θ symmetric contracted Hamiltonian (hartree).
    pub h_sub: Mat,
    /// Ascending eigenvalues (hartree).
    pub energies: Vec<f64>,
    /// Orthogonal eigenvector matrix, columns canonicalized.
    pub v: Mat,
    /// Entangler parameters the subspace was assembled at.
    pub params: EntanglerParams,
    /// Accepted-iterate optimizer trace (empty if assembled directly).
    pub trace: Vec<TraceEntry>,
}

/// Per-state and per-transition observables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionSet {
    /// Absolute energies (hartree), ascending.
    pub energies: Vec<f64>,
    /// Excitation energies E_Θ − E_0 (eV).
    pub excitations_ev: Vec<f64>,
    /// Transition dipole ⟨Ψ_0|μ̂|Ψ_Θ⟩ (a.u.); entry 0 is the zero vector.
    pub transition_dipoles: Vec<[f64; 3]>,
    /// O_0Θ = (2/3)(E_Θ − E_0)‖μ_0Θ‖²; entry 0 is 0.
    pub oscillator_strengths: Vec<f64>,
    /// Site excitation populations P_A = (1 − ⟨Z_A⟩)/2, one row per state.
    pub populations: Vec<Vec<f64>>,
    /// True for states inside a near-degenerate cluster (gap < 1e−8
    /// hartree), where individual transition properties are gauge-dependent.
    pub degenerate: Vec<bool>,
}

impl TransitionSet {
    fn assemble(energies: Vec<f64>, dipoles: Vec<[f64; 3]>, populations: Vec<Vec<f64>>) -> Self {
        let e0 = energies[0];
        let excitations_ev: Vec<f64> = energies.iter().map(|e| (e - e0) * HARTREE_TO_EV).collect();
        let oscillator_strengths = oscillator_strengths(&energies, &dipoles);
        let mut degenerate = vec![false; energies.len()];
        for t in 1..energies.len() {
            if energies[t] - energies[t - 1] < DEGENERACY_GAP {
                degenerate[t] = true;
                degenerate[t - 1] = true;
            }
        }
        TransitionSet {
            energies,
            excitations_ev,
            transition_dipoles: dipoles,
            oscillator_strengths,
            populations,
            degenerate,
        }
    }
}

/// Everything a full MC-VQE run produces.
#[derive(Debug, Clone)]
pub struct McVqeResult {
    pub subspace: SubspaceResult,
    pub transitions: TransitionSet,
    /// Entangled rotated eigenstates |Ψ_Θ⟩, one per subspace state.
    pub eigenstates: Vec<StateVector>,
    pub outcome: OptimOutcome,
    /// Objective evaluations consumed by the optimizer.
    pub n_evals: usize,
}

/// O_0Θ = (2/3)(E_Θ − E_0)·‖μ_0Θ‖² in atomic units.
pub fn oscillator_strengths(energies: &[f64], dipoles: &[[f64; 3]]) -> Vec<f64> {
    assert_eq!(energies.len(), dipoles.len(), "one dipole row per state");
    let e0 = energies[0];
    energies
        .iter()
        .zip(dipoles)
        .map(|(e, mu)| {
            let mu2: f64 = mu.iter().map(|c| c * c).sum();
            (2.0 / 3.0) * (e - e0) * mu2
        })
        .collect()
}

/// Site excitation populations P_A = (1 − ⟨Z_A⟩)/2 = Σ_{j: bit A set} ψ_j².
pub fn populations(state: &StateVector) -> Vec<f64> {
    let n = state.n_qubits();
    let mut p = vec![0.0f64; n];
    for (j, amp) in state.amplitudes().iter().enumerate() {
        let w = amp * amp;
        if w == 0.0 {
            continue;
        }
        for (a, pa) in p.iter_mut().enumerate() {
            // Site a occupies bit n−1−a (site 0 = most significant).
            if j >> (n - 1 - a) & 1 == 1 {
                *pa += w;
            }
        }
    }
    p
}

/// |⟨a|b⟩| for normalized real states.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(inner_product(a, b)?.abs())
}

/// Transition properties straight from explicit eigenstates (the FCI and CIS
/// reporting path; MC-VQE itself extracts dipoles via interference instead).
pub fn transitions_from_states(
    energies: &[f64],
    states: &[StateVector],
    dipole: &DipoleOperator,
) -> Result<TransitionSet> {
    if energies.len() != states.len() || states.is_empty() {
        return Err(Error::InvalidInput(format!(
            "need one state per energy, got {} energies and {} states",
            energies.len(),
            states.len()
        )));
    }
    let n = dipole.n_sites();
    let appliers: Vec<PauliApplier> = (0..3)
        .map(|k| PauliApplier::new(n, &dipole.component_terms(k)))
        .collect::<Result<_>>()?;
    let mut dipoles = vec![[0.0f64; 3]; states.len()];
    let mut work = vec![0.0f64; 1usize << n];
    for (theta, state) in states.iter().enumerate().skip(1) {
        for (k, applier) in appliers.iter().enumerate() {
            applier.apply(state.amplitudes(), &mut work);
            dipoles[theta][k] = states[0]
                .amplitudes()
                .iter()
                .zip(&work)
                .map(|(a, y)| a * y)
                .sum();
        }
    }
    let pops = states.iter().map(populations).collect();
    Ok(TransitionSet::assemble(energies.to_vec(), dipoles, pops))
}

/// The MC-VQE engine for one exciton Hamiltonian. Construction solves CIS,
/// prepares the contracted reference states, and compiles the expectation
/// plan; every later operation reuses those caches.
pub struct McVqe {
    h: ExcitonHamiltonian,
    dipole: Option<DipoleOperator>,
    config: McVqeConfig,
    cis: CisSolution,
    n_states: usize,
    layout: EntanglerLayout,
    plan: ExpectationPlan,
    reference_states: Vec<StateVector>,
}

impl McVqe {
    /// Full setup from monomer data: Hamiltonian, dipole operator, CIS.
    pub fn new(
        monomers: &[MonomerData],
        connectivity: &Connectivity,
        config: McVqeConfig,
    ) -> Result<Self> {
        let h = build_hamiltonian(monomers, connectivity)?;
        let dipole = build_dipole_operator(monomers)?;
        Self::with_dipole(h, Some(dipole), config)
    }

    /// Energy-only setup (no transition dipoles) from a prebuilt Hamiltonian.
    pub fn from_hamiltonian(h: ExcitonHamiltonian, config: McVqeConfig) -> Result<Self> {
        Self::with_dipole(h, None, config)
    }

    pub fn with_dipole(
        h: ExcitonHamiltonian,
        dipole: Option<DipoleOperator>,
        config: McVqeConfig,
    ) -> Result<Self> {
        let n = h.n_sites;
        let n_states = config.n_states.unwrap_or(n + 1);
        if n_states == 0 || n_states > n + 1 {
            return Err(Error::InvalidInput(format!(
                "n_states must lie in 1..={} (reference + singles), got {n_states}",
                n + 1
            )));
        }
        if !(config.fd_step > 0.0) {
            return Err(Error::InvalidInput(format!(
                "fd_step must be positive, got {}",
                config.fd_step
            )));
        }
        let cis = solve_cis(&h)?;
        let layout = EntanglerLayout::from_connectivity(&h.connectivity)?;
        let plan = ExpectationPlan::compile(n, &h.to_pauli_terms())?;
        let reference_states: Vec<StateVector> = (0..n_states)
            .map(|theta| prepare_cis_state(&cis.column(theta)))
            .collect::<Result<_>>()?;
        Ok(McVqe {
            h,
            dipole,
            config,
            cis,
            n_states,
            layout,
            plan,
            reference_states,
        })
    }

    pub fn hamiltonian(&self) -> &ExcitonHamiltonian {
        &self.h
    }

    pub fn cis(&self) -> &CisSolution {
        &self.cis
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn layout(&self) -> &EntanglerLayout {
        &self.layout
    }

    /// The all-zero (identity-entangler) parameter point: Û = I, pure CIS.
    pub fn zero_params(&self) -> Result<EntanglerParams> {
        EntanglerParams::zeros(
            self.layout.clone(),
            self.config.parametrization,
            self.config.n_layers,
        )
    }

    /// H_ΘΘ(θ) = ⟨Φ_Θ|Û†ĤÛ|Φ_Θ⟩.
    pub fn diagonal_element(&self, theta: usize, params: &EntanglerParams) -> Result<f64> {
        if theta >= self.n_states {
            return Err(Error::InvalidInput(format!(
                "state index {theta} out of range (n_states = {})",
                self.n_states
            )));
        }
        let circuit = build_entangler_circuit(params)?;
        let state = apply_circuit(&self.reference_states[theta], &circuit)?;
        self.plan.expectation(&state)
    }

    /// Ē(θ) = (1/N_Θ) Σ_Θ H_ΘΘ(θ) — the optimization objective.
    pub fn state_averaged_energy(&self, params: &EntanglerParams) -> Result<f64> {
        let circuit = build_entangler_circuit(params)?;
        let mut sum = 0.0;
        for reference in &self.reference_states {
            let state = apply_circuit(reference, &circuit)?;
            sum += self.plan.expectation(&state)?;
        }
        Ok(sum / self.n_states as f64)
    }

    /// Ē as a plain objective over the flattened parameter vector.
    pub fn objective(&self) -> Result<(impl Fn(&[f64]) -> f64 + Sync + '_, Vec<f64>)> {
        let template = self.zero_params()?;
        let x0 = vec![0.0; template.n_params()];
        let f = move |x: &[f64]| -> f64 {
            let params = template
                .with_values(x)
                .unwrap_or_else(|e| panic!("parameter vector rejected: {e}"));
            self.state_averaged_energy(&params)
                .unwrap_or_else(|e| panic!("objective evaluation failed: {e}"))
        };
        Ok((f, x0))
    }

    /// Stage 2: minimize Ē from the zero-entangler start. Non-convergence is
    /// reported in the outcome, not an error.
    pub fn optimize_entangler(&self) -> Result<(EntanglerParams, OptimResult)> {
        let (f, x0) = self.objective()?;
        let opts = OptimizerOptions {
            max_iter: self.config.max_iter,
            gtol: self.config.gtol,
            fd_step: self.config.fd_step,
            // The gradient is a 2·dim finite-difference loop, so have the
            // line search probe with objective values only.
            line_search_fd: Some(self.config.fd_step),
            ..OptimizerOptions::default()
        };
        let result = match self.config.optimizer {
            OptimizerKind::Lbfgs => lbfgs(
                |x| f(x),
                |x| fd_gradient(&f, x, self.config.fd_step),
                &x0,
                &opts,
            ),
            OptimizerKind::Powell => powell(|x| f(x), &x0, &opts),
        };
        let params = self.zero_params()?.with_values(&result.x)?;
        Ok((params, result))
    }

    /// Reference-basis matrices of several operators in one preparation
    /// pass: diagonals from `|Φ_Θ⟩`, off-diagonals from the ± interference
    /// states, two preparations per pair shared across all operators.
    fn operator_matrices(
        &self,
        params: &EntanglerParams,
        plans: &[&ExpectationPlan],
    ) -> Result<Vec<Mat>> {
        let circuit = build_entangler_circuit(params)?;
        let n = self.n_states;
        let mut mats = vec![Mat::zeros(n, n); plans.len()];
        for theta in 0..n {
            let state = apply_circuit(&self.reference_states[theta], &circuit)?;
            for (m, plan) in mats.iter_mut().zip(plans) {
                m[(theta, theta)] = plan.expectation(&state)?;
            }
        }
        for a in 0..n {
            let va = self.cis.column(a);
            for b in (a + 1)..n {
                let vb = self.cis.column(b);
                let plus = apply_circuit(
                    &prepare_cis_state(&interference_coeffs(&va, &vb, 1.0)?)?,
                    &circuit,
                )?;
                let minus = apply_circuit(
                    &prepare_cis_state(&interference_coeffs(&va, &vb, -1.0)?)?,
                    &circuit,
                )?;
                for (m, plan) in mats.iter_mut().zip(plans) {
                    let element = 0.5 * (plan.expectation(&plus)? - plan.expectation(&minus)?);
                    m[(a, b)] = element;
                    m[(b, a)] = element;
                }
            }
        }
        Ok(mats)
    }

    /// Stages 3–4: assemble the contracted Hamiltonian and diagonalize.
    pub fn assemble_subspace(&self, params: &EntanglerParams) -> Result<SubspaceResult> {
        let h_sub = self
            .operator_matrices(params, &[&self.plan])?
            .pop()
            .expect("one matrix per plan");
        let (energies, mut v) = eigh(&h_sub)?;
        canonicalize_columns(&mut v);
        Ok(SubspaceResult {
            h_sub,
            energies,
            v,
            params: params.clone(),
            trace: Vec::new(),
        })
    }

    /// Reference-basis matrix of an arbitrary Pauli operator transformed to
    /// the subspace eigenbasis: Vᵀ M V.
    pub fn contracted_operator(
        &self,
        params: &EntanglerParams,
        terms: &[PauliTerm],
        v: &Mat,
    ) -> Result<Mat> {
        let plan = ExpectationPlan::compile(self.h.n_sites, terms)?;
        let m = self
            .operator_matrices(params, &[&plan])?
            .pop()
            .expect("one matrix per plan");
        Ok(v.transpose().matmul(&m).matmul(v))
    }

    /// |Ψ_Θ⟩ = Û |Γ_Θ⟩ with the rotated reference |Γ_Θ⟩ = Σ_Θ' |Φ_Θ'⟩ V_Θ'Θ,
    /// prepared directly from the rotated CIS coefficients.
    pub fn prepare_eigenstate(
        &self,
        theta: usize,
        params: &EntanglerParams,
        v: &Mat,
    ) -> Result<StateVector> {
        if theta >= self.n_states {
            return Err(Error::InvalidInput(format!(
                "state index {theta} out of range (n_states = {})",
                self.n_states
            )));
        }
        let dim = self.h.n_sites + 1;
        let mut gamma = vec![0.0f64; dim];
        for tp in 0..self.n_states {
            let w = v[(tp, theta)];
            for (g, c) in gamma.iter_mut().zip(self.cis.column(tp)) {
                *g += w * c;
            }
        }
        let circuit = build_entangler_circuit(params)?;
        apply_circuit(&prepare_cis_state(&gamma)?, &circuit)
    }

    /// The full pipeline: optimize, assemble H and all three dipole
    /// components in one interference pass, diagonalize, extract transition
    /// properties and eigenstates.
    pub fn run(&self) -> Result<McVqeResult> {
        let (params, opt) = self.optimize_entangler()?;
        self.run_at(&params, opt.trace.clone(), opt.outcome, opt.n_evals)
    }

    /// As [`run`](Self::run) but at fixed entangler parameters.
    pub fn run_at(
        &self,
        params: &EntanglerParams,
        trace: Vec<TraceEntry>,
        outcome: OptimOutcome,
        n_evals: usize,
    ) -> Result<McVqeResult> {
        let dipole = self.dipole.as_ref().ok_or_else(|| {
            Error::InvalidInput("transition properties need monomer dipole data".into())
        })?;
        let dipole_plans: Vec<ExpectationPlan> = (0..3)
            .map(|k| ExpectationPlan::compile(self.h.n_sites, &dipole.component_terms(k)))
            .collect::<Result<_>>()?;
        let mut plan_refs: Vec<&ExpectationPlan> = vec![&self.plan];
        plan_refs.extend(dipole_plans.iter());
        let mut mats = self.operator_matrices(params, &plan_refs)?;
        let dipole_mats = mats.split_off(1);
        let h_sub = mats.pop().expect("Hamiltonian matrix");

        let (energies, mut v) = eigh(&h_sub)?;
        canonicalize_columns(&mut v);
        let contracted: Vec<Mat> = dipole_mats
            .iter()
            .map(|m| v.transpose().matmul(m).matmul(&v))
            .collect();
        let dipoles: Vec<[f64; 3]> = (0..self.n_states)
            .map(|theta| {
                if theta == 0 {
                    [0.0; 3]
                } else {
                    [
                        contracted[0][(0, theta)],
                        contracted[1][(0, theta)],
                        contracted[2][(0, theta)],
                    ]
                }
            })
            .collect();
        let eigenstates: Vec<StateVector> = (0..self.n_states)
            .map(|theta| self.prepare_eigenstate(theta, params, &v))
            .collect::<Result<_>>()?;
        let pops = eigenstates.iter().map(populations).collect();
        let transitions = TransitionSet::assemble(energies.clone(), dipoles, pops);
        Ok(McVqeResult {
            subspace: SubspaceResult {
                h_sub,
                energies,
                v,
                params: params.clone(),
                trace,
            },
            transitions,
            eigenstates,
            outcome,
            n_evals,
        })
    }
}
