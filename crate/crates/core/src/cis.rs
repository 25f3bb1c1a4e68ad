//! Classical CIS reference states and their preparation circuits.
//!
//! The CIS subspace of an N-site exciton system is spanned by the reference
//! |0…0⟩ and the N single excitations |e_A⟩ (site A excited). The
//! Hamiltonian restricted to this (N+1)-dimensional space is diagonalized
//! classically; each eigenvector maps to a preparation circuit of one pump
//! Ry, a chain of controlled-F_y gates building a "thermometer" ladder, and
//! a CNOT fan collapsing thermometer configurations to one-hot excitations.
//!
//! The angle recursion writes a unit vector (c_0, …, c_N) as
//!   c_0 = cos a_0,   c_k = sin a_0 ⋯ sin a_{k−1} cos a_k,   c_N = Π sin a_j,
//! a spherical-coordinate factorization with a_0 the pump angle and the rest
//! the chain angles. Since arccos lands in [0, π] every sine is nonnegative;
//! a negative final coefficient is absorbed by negating the last angle.

use crate::numerics::Mat;
use crate::pauli::{pauli_matrix_element, ExcitonHamiltonian, PauliTerm};
use crate::simulator::{apply_circuit, Circuit, Gate, StateVector};
use crate::{Error, Result};

/// Basis configurations of the CIS space: |0…0⟩ then |e_0⟩, …, |e_{N−1}⟩
/// (site A occupies bit N−1−A).
pub fn cis_configs(n_sites: usize) -> Vec<usize> {
    let mut configs = Vec::with_capacity(n_sites + 1);
    configs.push(0);
    for a in 0..n_sites {
        configs.push(1usize << (n_sites - 1 - a));
    }
    configs
}

/// The Hamiltonian projected onto the CIS configurations; (N+1)×(N+1),
/// exactly symmetric.
pub fn cis_matrix(h: &ExcitonHamiltonian) -> Mat {
    let terms = h.to_pauli_terms();
    let configs = cis_configs(h.n_sites);
    Mat::from_fn(configs.len(), configs.len(), |i, j| {
        pauli_matrix_element(h.n_sites, configs[i], configs[j], &terms)
    })
}

/// Eigenpairs of the CIS matrix: ascending energies, orthonormal columns
/// with canonical signs.
#[derive(Debug, Clone)]
pub struct CisSolution {
    pub n_sites: usize,
    /// N+1 ascending CIS energies (hartree).
    pub energies: Vec<f64>,
    /// Column Θ holds the coefficients of state Θ over the CIS basis.
    pub vectors: Mat,
}

impl CisSolution {
    pub fn n_states(&self) -> usize {
        self.energies.len()
    }

    pub fn column(&self, theta: usize) -> Vec<f64> {
        self.vectors.col(theta)
    }
}

/// Flip signs so each column's first entry of magnitude > 1e−10 is positive.
/// Total phase is physically irrelevant; a fixed convention keeps outputs
/// deterministic across runs and solvers.
pub fn canonicalize_columns(m: &mut Mat) {
    for j in 0..m.ncols() {
        let mut sign = 1.0;
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v.abs() > 1e-10 {
                sign = v.signum();
                break;
            }
        }
        if sign < 0.0 {
            for i in 0..m.nrows() {
                m[(i, j)] = -m[(i, j)];
            }
        }
    }
}

pub fn solve_cis(h: &ExcitonHamiltonian) -> Result<CisSolution> {
    let m = cis_matrix(h);
    let (energies, mut vectors) = crate::numerics::eigh(&m)?;
    canonicalize_columns(&mut vectors);
    Ok(CisSolution {
        n_sites: h.n_sites,
        energies,
        vectors,
    })
}

/// Preparation angles for one CIS vector: a pump rotation plus N−1 chain
/// angles (site k controlling site k+1).
#[derive(Debug, Clone, PartialEq)]
pub struct CisAngles {
    pub pump: f64,
    pub chain: Vec<f64>,
}

impl CisAngles {
    pub fn n_sites(&self) -> usize {
        self.chain.len() + 1
    }
}

/// Invert the spherical factorization for a unit vector of length N+1.
pub fn cis_angles(coeffs: &[f64]) -> Result<CisAngles> {
    if coeffs.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "CIS coefficient vector needs ≥ 2 entries, got {}",
            coeffs.len()
        )));
    }
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!(
            "CIS coefficients have norm {norm}, expected 1"
        )));
    }
    let n_angles = coeffs.len() - 1;
    let mut angles = vec![0.0f64; n_angles];
    let mut sine_product = 1.0f64;
    for k in 0..n_angles {
        if sine_product.abs() < 1e-14 {
            // All remaining coefficients are necessarily 0; leave angles 0.
            break;
        }
        let ratio = (coeffs[k] / sine_product).clamp(-1.0, 1.0);
        angles[k] = ratio.acos();
        sine_product *= angles[k].sin();
    }
    // arccos keeps every sine ≥ 0, so the reconstructed last coefficient is
    // +|c_N|; negate the last touched angle if the source was negative.
    if coeffs[n_angles] * sine_product < 0.0 {
        // Find the last angle that still influences the product (the final
        // nonzero-sine position reached by the recursion).
        for k in (0..n_angles).rev() {
            if angles[k] != 0.0 || k == 0 {
                angles[k] = -angles[k];
                break;
            }
        }
    }
    Ok(CisAngles {
        pump: angles[0],
        chain: angles[1..].to_vec(),
    })
}

/// Forward evaluation of the factorization (test oracle and sign check).
pub fn reconstruct_coeffs(angles: &CisAngles) -> Vec<f64> {
    let mut all = Vec::with_capacity(angles.chain.len() + 1);
    all.push(angles.pump);
    all.extend_from_slice(&angles.chain);
    let mut coeffs = Vec::with_capacity(all.len() + 1);
    let mut sine_product = 1.0;
    for &a in &all {
        coeffs.push(sine_product * a.cos());
        sine_product *= a.sin();
    }
    coeffs.push(sine_product);
    coeffs
}

/// Build the preparation circuit: pump Ry on qubit 0, the controlled-F_y
/// chain, and the collapsing CNOT fan. The pump is emitted as Ry(2·a_0)
/// because this crate's Ry uses half-angle convention while the recursion's
/// angles act at full angle (cos a_0 amplitude on the reference).
pub fn cis_prep_circuit(angles: &CisAngles) -> Result<Circuit> {
    let n = angles.n_sites();
    let mut c = Circuit::new(n)?;
    c.push(Gate::Ry {
        qubit: 0,
        theta: 2.0 * angles.pump,
    })?;
    for (k, &theta) in angles.chain.iter().enumerate() {
        c.push(Gate::CFy {
            control: k,
            target: k + 1,
            theta,
        })?;
    }
    if n >= 2 {
        for target in (0..=n - 2).rev() {
            for control in ((target + 1)..n).rev() {
                c.push(Gate::Cnot { control, target })?;
            }
        }
    }
    Ok(c)
}

/// Prepare the statevector of one CIS coefficient vector from |0…0⟩.
pub fn prepare_cis_state(coeffs: &[f64]) -> Result<StateVector> {
    let circuit = cis_prep_circuit(&cis_angles(coeffs)?)?;
    apply_circuit(&StateVector::zero_state(circuit.n_qubits())?, &circuit)
}

/// Coefficients of the interference state (v_a + sign·v_b)/√2.
pub fn interference_coeffs(v_a: &[f64], v_b: &[f64], sign: f64) -> Result<Vec<f64>> {
    if v_a.len() != v_b.len() {
        return Err(Error::InvalidInput(format!(
            "interference between vectors of length {} and {}",
            v_a.len(),
            v_b.len()
        )));
    }
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::InvalidInput(format!(
            "interference sign must be ±1, got {sign}"
        )));
    }
    let norm_a = v_a.iter().map(|c| c * c).sum::<f64>().sqrt();
    let norm_b = v_b.iter().map(|c| c * c).sum::<f64>().sqrt();
    let overlap: f64 = v_a.iter().zip(v_b).map(|(x, y)| x * y).sum();
    if (norm_a - 1.0).abs() > 1e-8 || (norm_b - 1.0).abs() > 1e-8 || overlap.abs() > 1e-8 {
        return Err(Error::Precondition(format!(
            "interference inputs not orthonormal: norms {norm_a}, {norm_b}, overlap {overlap}"
        )));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    Ok(v_a
        .iter()
        .zip(v_b)
        .map(|(x, y)| inv_sqrt2 * (x + sign * y))
        .collect())
}

/// Lift an (N+1)-coefficient CIS vector to the full 2^N statevector.
pub fn embed_cis_vector(n_sites: usize, coeffs: &[f64]) -> Result<StateVector> {
    if coeffs.len() != n_sites + 1 {
        return Err(Error::InvalidInput(format!(
            "{} coefficients for {n_sites} sites (expected {})",
            coeffs.len(),
            n_sites + 1
        )));
    }
    let mut amps = vec![0.0; 1usize << n_sites];
    for (c, cfg) in coeffs.iter().zip(cis_configs(n_sites)) {
        amps[cfg] = *c;
    }
    StateVector::from_amplitudes(n_sites, amps)
}

/// Matrix element helper used by reporting paths: ⟨bra| Σ terms |ket⟩ for
/// two CIS coefficient vectors, evaluated through the projected operator.
pub fn cis_operator_matrix(n_sites: usize, terms: &[PauliTerm]) -> Mat {
    let configs = cis_configs(n_sites);
    Mat::from_fn(configs.len(), configs.len(), |i, j| {
        pauli_matrix_element(n_sites, configs[i], configs[j], terms)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SplitMix64;
    use crate::pauli::{build_hamiltonian, to_dense, Connectivity, MonomerData};
    use crate::simulator::inner_product;

    fn dimer(gap: f64, mu_t: f64) -> Vec<MonomerData> {
        (0..2)
            .map(|i| MonomerData {
                index: i,
                e_s0: 0.0,
                e_s1: gap,
                com: [10.0 * i as f64, 0.0, 0.0],
                mu_00: [0.0; 3],
                mu_11: [0.0; 3],
                mu_01: [0.0, 0.0, mu_t],
                x_intra: 0.0,
            })
            .collect()
    }

    fn random_monomers(n: usize, seed: u64) -> Vec<MonomerData> {
        let mut rng = SplitMix64::new(seed);
        (0..n)
            .map(|i| {
                let v3 = |rng: &mut SplitMix64| {
                    [
                        rng.uniform(-1.0, 1.0),
                        rng.uniform(-1.0, 1.0),
                        rng.uniform(-1.0, 1.0),
                    ]
                };
                MonomerData {
                    index: i,
                    e_s0: rng.uniform(-0.05, 0.05),
                    e_s1: rng.uniform(0.9, 1.4),
                    com: [4.0 * i as f64, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)],
                    mu_00: v3(&mut rng),
                    mu_11: v3(&mut rng),
                    mu_01: v3(&mut rng),
                    x_intra: 0.0,
                }
            })
            .collect()
    }

    fn random_unit(n: usize, rng: &mut SplitMix64) -> Vec<f64> {
        rng.unit_vector(n)
    }

    #[test]
    fn zero_coupling_dimer_matrix_is_diagonal() {
        let h = build_hamiltonian(&dimer(1.0, 0.0), &Connectivity::linear(2, 1)).unwrap();
        let m = cis_matrix(&h);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j && i > 0 { 1.0 } else { 0.0 };
                assert!((m[(i, j)] - expect).abs() < 1e-15, "entry ({i}, {j})");
            }
        }
    }

    #[test]
    fn coupled_dimer_splits_by_the_coupling() {
        // Transition dipoles ⊥ separation: coupling μ²/r³ = 1e-3.
        let h = build_hamiltonian(&dimer(1.0, 1.0), &Connectivity::linear(2, 1)).unwrap();
        let sol = solve_cis(&h).unwrap();
        assert!((sol.energies[0] - 0.0).abs() < 1e-12);
        assert!((sol.energies[1] - (1.0 - 1e-3)).abs() < 1e-12);
        assert!((sol.energies[2] - (1.0 + 1e-3)).abs() < 1e-12);
    }

    #[test]
    fn cis_matrix_matches_dense_slice_and_is_exactly_symmetric() {
        let monomers = random_monomers(8, 0xc15);
        let h = build_hamiltonian(&monomers, &Connectivity::linear(8, 3)).unwrap();
        let m = cis_matrix(&h);
        let dense = to_dense(8, &h.to_pauli_terms()).unwrap();
        let configs = cis_configs(8);
        for (i, &ci) in configs.iter().enumerate() {
            for (j, &cj) in configs.iter().enumerate() {
                assert_eq!(m[(i, j)].to_bits(), dense[(ci, cj)].to_bits());
                assert_eq!(m[(i, j)].to_bits(), m[(j, i)].to_bits());
            }
        }
    }

    #[test]
    fn solved_columns_diagonalize_the_matrix() {
        let monomers = random_monomers(6, 0x50e);
        let h = build_hamiltonian(&monomers, &Connectivity::cyclic(6, 1)).unwrap();
        let m = cis_matrix(&h);
        let sol = solve_cis(&h).unwrap();
        for t in 0..sol.n_states() {
            let v = sol.column(t);
            let mv = m.mul_vec(&v);
            let resid: f64 = mv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - sol.energies[t] * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(resid < 1e-10 * m.max_abs().max(1.0), "state {t}: residual {resid}");
        }
        // Orthonormal columns, canonical signs.
        for a in 0..sol.n_states() {
            let va = sol.column(a);
            let first = va.iter().find(|c| c.abs() > 1e-10).unwrap();
            assert!(*first > 0.0, "column {a} not canonical");
            for b in 0..sol.n_states() {
                let dot: f64 = va.iter().zip(sol.column(b)).map(|(x, y)| x * y).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn angle_edge_cases() {
        let pure_ref = cis_angles(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(pure_ref.pump, 0.0);
        assert_eq!(pure_ref.chain, vec![0.0]);

        let w2 = cis_angles(&[0.0, 1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()]).unwrap();
        assert!((w2.pump - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((w2.chain[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-12);

        // Negative final coefficient flips the last consumed angle.
        let a = cis_angles(&[0.6, 0.0, -0.8]).unwrap();
        assert!((a.chain[0] + std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let rec = reconstruct_coeffs(&a);
        for (r, c) in rec.iter().zip(&[0.6, 0.0, -0.8]) {
            assert!((r - c).abs() < 1e-12);
        }

        // Negative single-excitation amplitude on N=1 flips the pump.
        let single = cis_angles(&[0.8, -0.6]).unwrap();
        assert!(single.pump < 0.0);
        let rec = reconstruct_coeffs(&single);
        assert!((rec[0] - 0.8).abs() < 1e-12 && (rec[1] + 0.6).abs() < 1e-12);

        assert!(cis_angles(&[0.5, 0.5]).is_err(), "non-unit norm");
        assert!(cis_angles(&[1.0]).is_err(), "too short");
    }

    #[test]
    fn thousand_round_trips() {
        let mut rng = SplitMix64::new(0x1000);
        for trial in 0..1000 {
            let n = 2 + rng.below(9); // sites 2..=10 → vectors of length 3..=11
            let v = random_unit(n + 1, &mut rng);
            let angles = cis_angles(&v).unwrap();
            let rec = reconstruct_coeffs(&angles);
            let err = rec
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(err < 1e-10, "trial {trial}: round-trip error {err}");
        }
    }

    #[test]
    fn prep_of_pure_reference_is_identity_on_zero() {
        let angles = cis_angles(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let c = cis_prep_circuit(&angles).unwrap();
        let out = apply_circuit(&StateVector::zero_state(3).unwrap(), &c).unwrap();
        assert!((out.amplitudes()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn n5_prep_gate_count_and_support() {
        let mut rng = SplitMix64::new(0x55);
        let v = random_unit(6, &mut rng);
        let angles = cis_angles(&v).unwrap();
        let circuit = cis_prep_circuit(&angles).unwrap();
        let mut n_ry = 0;
        let mut n_cfy = 0;
        let mut n_cnot = 0;
        for g in circuit.gates() {
            match g {
                Gate::Ry { .. } => n_ry += 1,
                Gate::CFy { .. } => n_cfy += 1,
                Gate::Cnot { .. } => n_cnot += 1,
                other => panic!("unexpected gate {other:?}"),
            }
        }
        assert_eq!((n_ry, n_cfy, n_cnot), (1, 4, 10));

        let out = apply_circuit(&StateVector::zero_state(5).unwrap(), &circuit).unwrap();
        let configs = cis_configs(5);
        for (k, &cfg) in configs.iter().enumerate() {
            assert!(
                (out.amplitudes()[cfg] - v[k]).abs() < 1e-10,
                "coefficient {k}: {} vs {}",
                out.amplitudes()[cfg],
                v[k]
            );
        }
        for (idx, a) in out.amplitudes().iter().enumerate() {
            if !configs.contains(&idx) {
                assert!(a.abs() < 1e-12, "support leaked to configuration {idx}");
            }
        }
    }

    #[test]
    fn prepared_eigenvectors_are_orthonormal_in_the_simulator() {
        let monomers = random_monomers(5, 0xabc);
        let h = build_hamiltonian(&monomers, &Connectivity::linear(5, 2)).unwrap();
        let sol = solve_cis(&h).unwrap();
        let states: Vec<StateVector> = (0..sol.n_states())
            .map(|t| prepare_cis_state(&sol.column(t)).unwrap())
            .collect();
        for a in 0..states.len() {
            for b in 0..states.len() {
                let ip = inner_product(&states[a], &states[b]).unwrap();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (ip - expect).abs() < 1e-10,
                    "⟨{a}|{b}⟩ = {ip}, expected {expect}"
                );
            }
        }
    }

    #[test]
    fn interference_prep_equals_state_average() {
        let monomers = random_monomers(4, 0x1f);
        let h = build_hamiltonian(&monomers, &Connectivity::linear(4, 1)).unwrap();
        let sol = solve_cis(&h).unwrap();
        let (va, vb) = (sol.column(0), sol.column(2));
        for sign in [1.0, -1.0] {
            let coeffs = interference_coeffs(&va, &vb, sign).unwrap();
            let norm: f64 = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
            let direct = prepare_cis_state(&coeffs).unwrap();
            let pa = prepare_cis_state(&va).unwrap();
            let pb = prepare_cis_state(&vb).unwrap();
            let combo = StateVector::linear_combination(
                std::f64::consts::FRAC_1_SQRT_2,
                &pa,
                sign * std::f64::consts::FRAC_1_SQRT_2,
                &pb,
            )
            .unwrap();
            for (x, y) in direct.amplitudes().iter().zip(combo.amplitudes()) {
                assert!((x - y).abs() < 1e-10, "sign {sign}");
            }
        }
    }

    #[test]
    fn interference_unit_vectors() {
        let e0 = [1.0, 0.0, 0.0];
        let e1 = [0.0, 1.0, 0.0];
        let plus = interference_coeffs(&e0, &e1, 1.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(plus, vec![r, r, 0.0]);
        assert!(interference_coeffs(&e0, &e0, 1.0).is_err(), "not orthogonal");
        assert!(
            interference_coeffs(&[0.5, 0.0, 0.0], &e1, 1.0).is_err(),
            "not normalized"
        );
        assert!(interference_coeffs(&e0, &e1, 0.5).is_err(), "bad sign");
    }

    #[test]
    fn embedding_matches_preparation() {
        let mut rng = SplitMix64::new(0xe3bed);
        let v = random_unit(5, &mut rng);
        let embedded = embed_cis_vector(4, &v).unwrap();
        let prepared = prepare_cis_state(&v).unwrap();
        for (x, y) in embedded.amplitudes().iter().zip(prepared.amplitudes()) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
