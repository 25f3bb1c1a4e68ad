//! Dense real-amplitude statevector simulator.
//!
//! Every gate in scope (Ry, H, X, Z, CNOT, CZ, controlled-F_y, SO(4) blocks)
//! is a real orthogonal matrix, so the full circuit lives in SO(2^N) and real
//! amplitudes suffice — half the memory and no phases to track. This is an
//! infinite-shot simulator: expectation values are computed exactly from the
//! amplitudes, never sampled.
//!
//! Qubit q occupies bit position N−1−q of a configuration index (qubit 0 is
//! the most significant bit), matching the site convention of the Pauli
//! module. Gates are applied in place over the natural stride pattern.

use crate::entangler::So4Matrix;
use crate::numerics::mat4_mul_vec;
use crate::pauli::{Axis, PauliTerm};
use crate::{Error, Result};

/// Hard cap on qubit count (2^24 amplitudes ≈ 134 MB as f64).
pub const MAX_QUBITS: usize = 24;

/// Memory budget for compiled expectation weight tables.
const PLAN_MEMORY_CAP_BYTES: usize = 512 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<f64>,
}

impl StateVector {
    /// |00…0⟩.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        Self::check_width(n_qubits)?;
        let mut amps = vec![0.0; 1 << n_qubits];
        amps[0] = 1.0;
        Ok(StateVector { n_qubits, amps })
    }

    /// A specific computational basis state.
    pub fn basis_state(n_qubits: usize, config: usize) -> Result<Self> {
        Self::check_width(n_qubits)?;
        if config >= 1 << n_qubits {
            return Err(Error::InvalidInput(format!(
                "basis configuration {config} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![0.0; 1 << n_qubits];
        amps[config] = 1.0;
        Ok(StateVector { n_qubits, amps })
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<f64>) -> Result<Self> {
        Self::check_width(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::InvalidInput(format!(
                "amplitude vector of length {} for {n_qubits} qubits (expected {})",
                amps.len(),
                1usize << n_qubits
            )));
        }
        if amps.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("non-finite amplitude".into()));
        }
        Ok(StateVector { n_qubits, amps })
    }

    fn check_width(n_qubits: usize) -> Result<()> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::CapExceeded {
                what: "statevector",
                n: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::Precondition("cannot normalize a zero vector".into()));
        }
        for a in &mut self.amps {
            *a /= n;
        }
        Ok(())
    }

    /// Linear combination c_a·a + c_b·b of two equal-width states.
    pub fn linear_combination(c_a: f64, a: &StateVector, c_b: f64, b: &StateVector) -> Result<Self> {
        if a.n_qubits != b.n_qubits {
            return Err(Error::InvalidInput(format!(
                "statevector widths differ: {} vs {}",
                a.n_qubits, b.n_qubits
            )));
        }
        let amps = a
            .amps
            .iter()
            .zip(&b.amps)
            .map(|(x, y)| c_a * x + c_b * y)
            .collect();
        Ok(StateVector {
            n_qubits: a.n_qubits,
            amps,
        })
    }
}

/// Real inner product Σ_i a_i b_i.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::InvalidInput(format!(
            "inner product between {}- and {}-qubit states",
            a.n_qubits, b.n_qubits
        )));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x * y).sum())
}

/// One gate of the real orthogonal gate set.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// Ry(θ) = [[cos(θ/2), −sin(θ/2)], [sin(θ/2), cos(θ/2)]].
    Ry { qubit: usize, theta: f64 },
    H { qubit: usize },
    X { qubit: usize },
    Z { qubit: usize },
    Cnot { control: usize, target: usize },
    Cz { a: usize, b: usize },
    /// Controlled F_y(θ): on control = 1 the target sees
    /// [[cos θ, sin θ], [sin θ, −cos θ]] (full angle).
    CFy {
        control: usize,
        target: usize,
        theta: f64,
    },
    /// Orthogonal 4×4 applied to the (a, b) amplitude quadruples; qubit `a`
    /// supplies the high bit of the local index.
    So4Block { a: usize, b: usize, matrix: So4Matrix },
}

impl Gate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::Ry { qubit, .. } | Gate::H { qubit } | Gate::X { qubit } | Gate::Z { qubit } => {
                (qubit, None)
            }
            Gate::Cnot { control, target } => (control, Some(target)),
            Gate::Cz { a, b } => (a, Some(b)),
            Gate::CFy {
                control, target, ..
            } => (control, Some(target)),
            Gate::So4Block { a, b, .. } => (a, Some(b)),
        }
    }
}

/// An ordered gate list over a fixed qubit count. Gate indices are validated
/// at insertion so application can proceed unchecked.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        StateVector::check_width(n_qubits)?;
        Ok(Circuit {
            n_qubits,
            gates: Vec::new(),
        })
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let (q0, q1) = gate.qubits();
        if q0 >= self.n_qubits || q1.is_some_and(|q| q >= self.n_qubits) {
            return Err(Error::InvalidInput(format!(
                "gate {gate:?} touches a qubit outside 0..{}",
                self.n_qubits
            )));
        }
        if q1 == Some(q0) {
            return Err(Error::InvalidInput(format!(
                "two-qubit gate {gate:?} uses qubit {q0} twice"
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::InvalidInput(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

/// Apply a circuit to a state, returning the transformed state.
pub fn apply_circuit(state: &StateVector, circuit: &Circuit) -> Result<StateVector> {
    let mut out = state.clone();
    apply_circuit_inplace(&mut out, circuit)?;
    Ok(out)
}

/// In-place variant for hot loops (saves the clone).
pub fn apply_circuit_inplace(state: &mut StateVector, circuit: &Circuit) -> Result<()> {
    if state.n_qubits != circuit.n_qubits {
        return Err(Error::InvalidInput(format!(
            "{}-qubit circuit applied to {}-qubit state",
            circuit.n_qubits, state.n_qubits
        )));
    }
    let n = state.n_qubits;
    for gate in &circuit.gates {
        apply_gate(&mut state.amps, n, gate);
    }
    Ok(())
}

fn bit_of(n_qubits: usize, qubit: usize) -> usize {
    1usize << (n_qubits - 1 - qubit)
}

fn apply_gate(amps: &mut [f64], n: usize, gate: &Gate) {
    match *gate {
        Gate::Ry { qubit, theta } => {
            let (s, c) = (0.5 * theta).sin_cos();
            apply_one_qubit(amps, bit_of(n, qubit), |a0, a1| {
                (c * a0 - s * a1, s * a0 + c * a1)
            });
        }
        Gate::H { qubit } => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            apply_one_qubit(amps, bit_of(n, qubit), |a0, a1| {
                (r * (a0 + a1), r * (a0 - a1))
            });
        }
        Gate::X { qubit } => {
            apply_one_qubit(amps, bit_of(n, qubit), |a0, a1| (a1, a0));
        }
        Gate::Z { qubit } => {
            let mask = bit_of(n, qubit);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & mask != 0 {
                    *a = -*a;
                }
            }
        }
        Gate::Cnot { control, target } => {
            let cm = bit_of(n, control);
            let tm = bit_of(n, target);
            // Swap the target pair wherever the control bit is set.
            for i in 0..amps.len() {
                if i & cm != 0 && i & tm == 0 {
                    amps.swap(i, i | tm);
                }
            }
        }
        Gate::Cz { a, b } => {
            let mask = bit_of(n, a) | bit_of(n, b);
            for (i, amp) in amps.iter_mut().enumerate() {
                if i & mask == mask {
                    *amp = -*amp;
                }
            }
        }
        Gate::CFy {
            control,
            target,
            theta,
        } => {
            let cm = bit_of(n, control);
            let tm = bit_of(n, target);
            let (s, c) = theta.sin_cos();
            for i in 0..amps.len() {
                if i & cm != 0 && i & tm == 0 {
                    let (a0, a1) = (amps[i], amps[i | tm]);
                    amps[i] = c * a0 + s * a1;
                    amps[i | tm] = s * a0 - c * a1;
                }
            }
        }
        Gate::So4Block { a, b, ref matrix } => {
            let ma = bit_of(n, a);
            let mb = bit_of(n, b);
            let both = ma | mb;
            let m = matrix.matrix();
            for i in 0..amps.len() {
                if i & both == 0 {
                    // Local index ℓ = 2·bit(a) + bit(b); qubit a is the high bit.
                    let idx = [i, i | mb, i | ma, i | ma | mb];
                    let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
                    let w = mat4_mul_vec(m, &v);
                    for (k, &j) in idx.iter().enumerate() {
                        amps[j] = w[k];
                    }
                }
            }
        }
    }
}

/// Visit each (low, high) amplitude pair split by `mask`, replacing the pair
/// with `f(low, high)`. Branch-free block iteration.
fn apply_one_qubit(amps: &mut [f64], mask: usize, f: impl Fn(f64, f64) -> (f64, f64)) {
    let half = amps.len() >> 1;
    let lo_mask = mask - 1;
    for g in 0..half {
        let i0 = ((g & !lo_mask) << 1) | (g & lo_mask);
        let i1 = i0 | mask;
        let (a0, a1) = (amps[i0], amps[i1]);
        let (b0, b1) = f(a0, a1);
        amps[i0] = b0;
        amps[i1] = b1;
    }
}

/// Compiled form of one Pauli term: configurations j couple to j ^ flip with
/// sign (−1)^popcount(j & phase), scaled by coeff. Terms with an odd Y count
/// are purely imaginary and excluded at compilation.
#[derive(Debug, Clone, Copy)]
struct CompiledTerm {
    flip: usize,
    phase: usize,
    coeff: f64,
}

fn compile_term(n_qubits: usize, term: &PauliTerm) -> Option<CompiledTerm> {
    let mut flip = 0usize;
    let mut phase = 0usize;
    let mut n_y = 0u32;
    for &(site, axis) in &term.factors {
        assert!(
            site < n_qubits,
            "pauli factor on site {site} outside 0..{n_qubits}"
        );
        let bit = 1usize << (n_qubits - 1 - site);
        match axis {
            Axis::X => flip |= bit,
            Axis::Y => {
                flip |= bit;
                phase |= bit;
                n_y += 1;
            }
            Axis::Z => phase |= bit,
        }
    }
    if n_y % 2 == 1 {
        return None;
    }
    let coeff = if (n_y / 2) % 2 == 0 {
        term.coefficient
    } else {
        -term.coefficient
    };
    Some(CompiledTerm { flip, phase, coeff })
}

fn term_expectation(amps: &[f64], t: &CompiledTerm) -> f64 {
    let mut sum = 0.0;
    if t.phase == 0 {
        if t.flip == 0 {
            sum = amps.iter().map(|a| a * a).sum();
        } else {
            for (j, a) in amps.iter().enumerate() {
                sum += amps[j ^ t.flip] * a;
            }
        }
    } else {
        for (j, a) in amps.iter().enumerate() {
            let s = if (j & t.phase).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            sum += s * amps[j ^ t.flip] * a;
        }
    }
    t.coeff * sum
}

/// ⟨ψ| Σ terms |ψ⟩ by direct per-term masked sums. Reference path; use
/// `ExpectationPlan` when evaluating the same operator against many states.
pub fn expectation(state: &StateVector, terms: &[PauliTerm]) -> f64 {
    let amps = &state.amps;
    terms
        .iter()
        .filter_map(|t| compile_term(state.n_qubits, t))
        .map(|ct| term_expectation(amps, &ct))
        .sum()
}

/// Matrix-free application y = (Σ terms)·x on configuration amplitudes,
/// the apply-H kernel behind the iterative eigensolver. Terms with an odd
/// Y count are dropped at compilation (purely imaginary action).
#[derive(Debug, Clone)]
pub struct PauliApplier {
    n_qubits: usize,
    terms: Vec<CompiledTerm>,
}

impl PauliApplier {
    pub fn new(n_qubits: usize, terms: &[PauliTerm]) -> Result<Self> {
        StateVector::check_width(n_qubits)?;
        Ok(PauliApplier {
            n_qubits,
            terms: terms
                .iter()
                .filter_map(|t| compile_term(n_qubits, t))
                .collect(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    /// Overwrites y with (Σ terms)·x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim(), "input dimension mismatch");
        assert_eq!(y.len(), self.dim(), "output dimension mismatch");
        y.fill(0.0);
        for t in &self.terms {
            if t.flip == 0 && t.phase == 0 {
                for (yi, xi) in y.iter_mut().zip(x) {
                    *yi += t.coeff * xi;
                }
            } else if t.phase == 0 {
                for (j, xi) in x.iter().enumerate() {
                    y[j ^ t.flip] += t.coeff * xi;
                }
            } else {
                for (j, xi) in x.iter().enumerate() {
                    let c = if (j & t.phase).count_ones() % 2 == 0 {
                        t.coeff
                    } else {
                        -t.coeff
                    };
                    y[j ^ t.flip] += c * xi;
                }
            }
        }
    }
}

/// A term list compiled for repeated expectation evaluation.
///
/// Terms are grouped by flip mask. Groups whose members carry Z/Y phases are
/// materialized as per-configuration weight tables (one fused pass per mask);
/// phase-free groups collapse to a scalar. If the weight tables would exceed
/// the memory budget the plan falls back to per-term evaluation.
#[derive(Debug, Clone)]
pub struct ExpectationPlan {
    n_qubits: usize,
    vector_groups: Vec<(usize, Vec<f64>)>,
    scalar_groups: Vec<(usize, f64)>,
    fallback: Vec<CompiledTerm>,
}

impl ExpectationPlan {
    pub fn compile(n_qubits: usize, terms: &[PauliTerm]) -> Result<Self> {
        StateVector::check_width(n_qubits)?;
        let compiled: Vec<CompiledTerm> = terms
            .iter()
            .filter_map(|t| compile_term(n_qubits, t))
            .collect();

        // Group by flip mask, preserving first-seen order for determinism.
        let mut masks: Vec<usize> = Vec::new();
        for ct in &compiled {
            if !masks.contains(&ct.flip) {
                masks.push(ct.flip);
            }
        }
        let needs_vector = |mask: usize| {
            compiled
                .iter()
                .any(|ct| ct.flip == mask && ct.phase != 0)
        };
        let n_vector_masks = masks.iter().filter(|&&m| needs_vector(m)).count();
        let dim = 1usize << n_qubits;
        let bytes = n_vector_masks * dim * std::mem::size_of::<f64>();
        if bytes > PLAN_MEMORY_CAP_BYTES {
            return Ok(ExpectationPlan {
                n_qubits,
                vector_groups: Vec::new(),
                scalar_groups: Vec::new(),
                fallback: compiled,
            });
        }

        let mut vector_groups = Vec::new();
        let mut scalar_groups = Vec::new();
        for &mask in &masks {
            if needs_vector(mask) {
                let mut w = vec![0.0f64; dim];
                for ct in compiled.iter().filter(|ct| ct.flip == mask) {
                    if ct.phase == 0 {
                        for v in &mut w {
                            *v += ct.coeff;
                        }
                    } else {
                        for (j, v) in w.iter_mut().enumerate() {
                            if (j & ct.phase).count_ones() % 2 == 0 {
                                *v += ct.coeff;
                            } else {
                                *v -= ct.coeff;
                            }
                        }
                    }
                }
                vector_groups.push((mask, w));
            } else {
                let c = compiled
                    .iter()
                    .filter(|ct| ct.flip == mask)
                    .map(|ct| ct.coeff)
                    .sum();
                scalar_groups.push((mask, c));
            }
        }
        Ok(ExpectationPlan {
            n_qubits,
            vector_groups,
            scalar_groups,
            fallback: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if state.n_qubits != self.n_qubits {
            return Err(Error::InvalidInput(format!(
                "plan over {} qubits evaluated on a {}-qubit state",
                self.n_qubits, state.n_qubits
            )));
        }
        let amps = &state.amps;
        if !self.fallback.is_empty() {
            return Ok(self
                .fallback
                .iter()
                .map(|ct| term_expectation(amps, ct))
                .sum());
        }
        let mut total = 0.0;
        for &(mask, c) in &self.scalar_groups {
            let mut s = 0.0;
            if mask == 0 {
                s = amps.iter().map(|a| a * a).sum();
            } else {
                for (j, a) in amps.iter().enumerate() {
                    s += amps[j ^ mask] * a;
                }
            }
            total += c * s;
        }
        for (mask, w) in &self.vector_groups {
            let mut s = 0.0;
            if *mask == 0 {
                for (j, a) in amps.iter().enumerate() {
                    s += w[j] * a * a;
                }
            } else {
                for (j, a) in amps.iter().enumerate() {
                    s += w[j] * amps[j ^ mask] * a;
                }
            }
            total += s;
        }
        Ok(total)
    }
}
