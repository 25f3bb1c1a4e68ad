//! SO(4) entangler layers.
//!
//! The variational ansatz applies one orthogonal 4×4 block with determinant
//! +1 to each connected qubit pair, tiled into sublayers of disjoint pairs
//! so blocks within a sublayer commute. The 6-dimensional Lie algebra so(4)
//! is parametrized three equivalent ways:
//!
//! - `antisym`: the six upper-triangle entries A…F of a real antisymmetric
//!   generator, exponentiated;
//! - `pauli`: weights on the six odd-Y two-qubit Pauli strings
//!   {IY, YI, XY, YX, ZY, YZ} — each −i·P⊗Q is real antisymmetric, so the
//!   weighted sum exponentiates to SO(4); related to `antisym` by a linear
//!   correspondence map;
//! - `gate_native`: six Ry angles in an Ry/CNOT/Ry/CNOT/Ry sandwich whose
//!   dense matrix covers SO(4).
//!
//! Within a block the first listed qubit of the pair supplies the more
//! significant local index, matching the controlled-F_y convention.

use crate::numerics::{
    expm_antisym4, mat4_det, mat4_identity, mat4_mul, mat4_transpose, Mat4,
};
use crate::pauli::{Connectivity, Topology};
use crate::simulator::{apply_circuit, Circuit, Gate, StateVector};
use crate::{Error, Result};

/// A validated element of SO(4): orthogonal to 1e−12 and det = +1 ± 1e−12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So4Matrix(Mat4);

impl So4Matrix {
    pub fn new(m: Mat4) -> Result<Self> {
        let mtm = mat4_mul(&mat4_transpose(&m), &m);
        let id = mat4_identity();
        let mut dev = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                dev = dev.max((mtm[i][j] - id[i][j]).abs());
            }
        }
        if dev > 1e-12 {
            return Err(Error::Precondition(format!(
                "SO(4) block not orthogonal: max |MᵀM − 1| = {dev:.3e}"
            )));
        }
        let det = mat4_det(&m);
        if (det - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "SO(4) block has determinant {det}, expected +1"
            )));
        }
        Ok(So4Matrix(m))
    }

    pub fn identity() -> Self {
        So4Matrix(mat4_identity())
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }
}

/// exp of an arbitrary antisymmetric generator; orthogonal with det +1 by
/// construction, still validated as a numerical safeguard.
pub fn so4_from_generator(generator: &Mat4) -> Result<So4Matrix> {
    for i in 0..4 {
        for j in 0..4 {
            if (generator[i][j] + generator[j][i]).abs() > 1e-12 {
                return Err(Error::Precondition(format!(
                    "generator not antisymmetric at ({i}, {j})"
                )));
            }
        }
    }
    So4Matrix::new(expm_antisym4(generator)?)
}

/// The printed antisymmetric pattern: +A at (0,1), +B at (0,2), +C at (0,3),
/// +D at (1,2), +E at (1,3), +F at (2,3), completed antisymmetrically.
pub fn antisym_generator(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Mat4 {
    [
        [0.0, a, b, c],
        [-a, 0.0, d, e],
        [-b, -d, 0.0, f],
        [-c, -e, -f, 0.0],
    ]
}

pub fn so4_from_antisym(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Result<So4Matrix> {
    so4_from_generator(&antisym_generator(a, b, c, d, e, f))
}

/// The six odd-Y Pauli generators as real antisymmetric matrices −i·(P⊗Q),
/// in a fixed (qubit-a ⊗ qubit-b) ordering with qubit a the high bit.
pub mod pauli_generators {
    use super::Mat4;

    pub const G_IY: Mat4 = [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ];
    pub const G_YI: Mat4 = [
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
    ];
    pub const G_XY: Mat4 = [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ];
    pub const G_YX: Mat4 = [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ];
    pub const G_ZY: Mat4 = [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ];
    pub const G_YZ: Mat4 = [
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ];
}

/// Exponential of Σ θ_PQ · (−i·P⊗Q) over the six odd-Y Pauli strings.
pub fn so4_from_pauli_angles(
    theta_iy: f64,
    theta_yi: f64,
    theta_xy: f64,
    theta_yx: f64,
    theta_zy: f64,
    theta_yz: f64,
) -> Result<So4Matrix> {
    use pauli_generators::*;
    let weights = [
        (theta_iy, G_IY),
        (theta_yi, G_YI),
        (theta_xy, G_XY),
        (theta_yx, G_YX),
        (theta_zy, G_ZY),
        (theta_yz, G_YZ),
    ];
    let mut k = [[0.0f64; 4]; 4];
    for (w, g) in weights {
        for i in 0..4 {
            for j in 0..4 {
                k[i][j] += w * g[i][j];
            }
        }
    }
    so4_from_generator(&k)
}

/// Linear correspondence from Pauli-angle weights to the antisymmetric
/// pattern entries (A, B, C, D, E, F).
pub fn map_pauli_to_antisym(theta: [f64; 6]) -> [f64; 6] {
    let [iy, yi, xy, yx, zy, yz] = theta;
    [
        -(iy + zy), // A at (0,1)
        -(yi + yz), // B at (0,2)
        -(yx + xy), // C at (0,3)
        -(yx - xy), // D at (1,2)
        -(yi - yz), // E at (1,3)
        -(iy - zy), // F at (2,3)
    ]
}

/// Inverse of `map_pauli_to_antisym`.
pub fn map_antisym_to_pauli(abcdef: [f64; 6]) -> [f64; 6] {
    let [a, b, c, d, e, f] = abcdef;
    [
        -0.5 * (a + f), // θ_IY
        -0.5 * (b + e), // θ_YI
        0.5 * (d - c),  // θ_XY
        -0.5 * (c + d), // θ_YX
        0.5 * (f - a),  // θ_ZY
        0.5 * (e - b),  // θ_YZ
    ]
}

/// The printed two-body circuit: Ry pairs sandwiching two CNOTs. All-zero
/// angles collapse to CNOT·CNOT = identity.
pub fn gate_native_circuit(theta: [f64; 6], pair: (usize, usize), n_qubits: usize) -> Result<Circuit> {
    let (qa, qb) = pair;
    let mut c = Circuit::new(n_qubits)?;
    c.push(Gate::Ry { qubit: qa, theta: theta[0] })?;
    c.push(Gate::Ry { qubit: qb, theta: theta[1] })?;
    c.push(Gate::Cnot { control: qa, target: qb })?;
    c.push(Gate::Ry { qubit: qa, theta: theta[2] })?;
    c.push(Gate::Ry { qubit: qb, theta: theta[3] })?;
    c.push(Gate::Cnot { control: qa, target: qb })?;
    c.push(Gate::Ry { qubit: qa, theta: theta[4] })?;
    c.push(Gate::Ry { qubit: qb, theta: theta[5] })?;
    Ok(c)
}

/// Dense 4×4 of the gate-native circuit on an isolated pair, columns = images
/// of the four local basis states (first pair qubit = high bit).
pub fn gate_native_so4(theta: [f64; 6]) -> Result<So4Matrix> {
    let circuit = gate_native_circuit(theta, (0, 1), 2)?;
    let mut m = [[0.0f64; 4]; 4];
    for col in 0..4 {
        let out = apply_circuit(&StateVector::basis_state(2, col)?, &circuit)?;
        for row in 0..4 {
            m[row][col] = out.amplitudes()[row];
        }
    }
    So4Matrix::new(m)
}

/// Which 6-angle convention the parameter values use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parametrization {
    Antisym,
    PauliAngles,
    GateNative,
}

/// Qubit pairs grouped into sublayers of disjoint pairs. Blocks within a
/// sublayer act on disjoint qubits and therefore commute.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglerLayout {
    n_qubits: usize,
    sublayers: Vec<Vec<(usize, usize)>>,
}

impl EntanglerLayout {
    /// Validates distinct in-range qubits and disjointness within sublayers.
    pub fn from_sublayers(n_qubits: usize, sublayers: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        for sub in &sublayers {
            let mut used = vec![false; n_qubits];
            for &(a, b) in sub {
                if a >= n_qubits || b >= n_qubits {
                    return Err(Error::InvalidInput(format!(
                        "entangler pair ({a}, {b}) outside 0..{n_qubits}"
                    )));
                }
                if a == b {
                    return Err(Error::InvalidInput(format!(
                        "entangler pair on duplicate qubit {a}"
                    )));
                }
                if used[a] || used[b] {
                    return Err(Error::InvalidInput(format!(
                        "pair ({a}, {b}) overlaps an earlier pair in its sublayer"
                    )));
                }
                used[a] = true;
                used[b] = true;
            }
        }
        Ok(EntanglerLayout { n_qubits, sublayers })
    }

    /// Nearest-neighbor chain: sublayer (0,1),(2,3),… then (1,2),(3,4),….
    pub fn linear(n_qubits: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::InvalidInput(
                "entangler layout needs at least 2 qubits".into(),
            ));
        }
        let even: Vec<(usize, usize)> = (0..n_qubits - 1).step_by(2).map(|q| (q, q + 1)).collect();
        let odd: Vec<(usize, usize)> = (1..n_qubits - 1).step_by(2).map(|q| (q, q + 1)).collect();
        let mut sublayers = vec![even];
        if !odd.is_empty() {
            sublayers.push(odd);
        }
        Self::from_sublayers(n_qubits, sublayers)
    }

    /// Nearest-neighbor ring: the linear layout plus the closing pair
    /// (N−1, 0), appended to the second sublayer when disjoint (even N) and
    /// spilled to a third sublayer otherwise (odd N, where qubit N−1 is
    /// already used). N=2 has a single distinct pair; the ring equals the
    /// chain.
    pub fn cyclic(n_qubits: usize) -> Result<Self> {
        if n_qubits == 2 {
            return Self::linear(2);
        }
        let mut layout = Self::linear(n_qubits)?;
        let closing = (n_qubits - 1, 0);
        let fits_second = layout.sublayers.len() >= 2
            && layout.sublayers[1]
                .iter()
                .all(|&(a, b)| a != closing.0 && b != closing.0 && a != closing.1 && b != closing.1);
        if fits_second {
            layout.sublayers[1].push(closing);
        } else {
            layout.sublayers.push(vec![closing]);
        }
        Self::from_sublayers(layout.n_qubits, layout.sublayers)
    }

    /// Greedy first-fit packing of an explicit pair list into disjoint
    /// sublayers, preserving the given order within each sublayer.
    pub fn from_pairs(n_qubits: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut sublayers: Vec<Vec<(usize, usize)>> = Vec::new();
        for &(a, b) in pairs {
            let slot = sublayers.iter_mut().find(|sub| {
                sub.iter()
                    .all(|&(x, y)| x != a && y != a && x != b && y != b)
            });
            match slot {
                Some(sub) => sub.push((a, b)),
                None => sublayers.push(vec![(a, b)]),
            }
        }
        Self::from_sublayers(n_qubits, sublayers)
    }

    /// The canonical layout for a Hamiltonian's interaction graph: chain and
    /// ring topologies at order 1 use the hand-tiled patterns; anything else
    /// greedy-packs the retained pairs (oriented high-to-low as stored).
    pub fn from_connectivity(conn: &Connectivity) -> Result<Self> {
        match (conn.topology, conn.neighbor_order) {
            (Topology::Linear, 1) => Self::linear(conn.n_sites),
            (Topology::Cyclic, 1) => Self::cyclic(conn.n_sites),
            _ => Self::from_pairs(conn.n_sites, &conn.retained_pairs()?),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn sublayers(&self) -> &[Vec<(usize, usize)>] {
        &self.sublayers
    }

    /// All pairs in application order (sublayer by sublayer).
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.sublayers.iter().flatten().copied().collect()
    }

    pub fn n_pairs(&self) -> usize {
        self.sublayers.iter().map(Vec::len).sum()
    }
}

/// A full parameter assignment: 6 angles per pair per layer, flattened
/// layer-major (layer, then pair in layout order, then the 6 angles).
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglerParams {
    pub layout: EntanglerLayout,
    pub parametrization: Parametrization,
    pub n_layers: usize,
    pub values: Vec<f64>,
}

impl EntanglerParams {
    pub fn zeros(layout: EntanglerLayout, parametrization: Parametrization, n_layers: usize) -> Result<Self> {
        if n_layers == 0 {
            return Err(Error::InvalidInput("n_layers must be ≥ 1".into()));
        }
        let n = 6 * layout.n_pairs() * n_layers;
        Ok(EntanglerParams {
            layout,
            parametrization,
            n_layers,
            values: vec![0.0; n],
        })
    }

    pub fn from_values(
        layout: EntanglerLayout,
        parametrization: Parametrization,
        n_layers: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        let mut p = Self::zeros(layout, parametrization, n_layers)?;
        if values.len() != p.values.len() {
            return Err(Error::InvalidInput(format!(
                "{} parameter values for a layout needing {}",
                values.len(),
                p.values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite entangler parameter".into()));
        }
        p.values = values;
        Ok(p)
    }

    pub fn n_params(&self) -> usize {
        self.values.len()
    }

    /// Replace the parameter values (length must match).
    pub fn with_values(&self, values: &[f64]) -> Result<Self> {
        Self::from_values(
            self.layout.clone(),
            self.parametrization,
            self.n_layers,
            values.to_vec(),
        )
    }

    fn block(&self, six: &[f64]) -> Result<So4Matrix> {
        let t: [f64; 6] = six.try_into().expect("six angles per block");
        match self.parametrization {
            Parametrization::Antisym => so4_from_antisym(t[0], t[1], t[2], t[3], t[4], t[5]),
            Parametrization::PauliAngles => {
                so4_from_pauli_angles(t[0], t[1], t[2], t[3], t[4], t[5])
            }
            Parametrization::GateNative => gate_native_so4(t),
        }
    }
}

/// Emit the layered entangler: one SO4Block per pair per layer, in layout
/// order. Gate-native parameters are folded to their dense blocks so the
/// simulator sees a uniform circuit.
pub fn build_entangler_circuit(params: &EntanglerParams) -> Result<Circuit> {
    let mut circuit = Circuit::new(params.layout.n_qubits())?;
    let pairs = params.layout.pairs();
    let mut offset = 0;
    for _layer in 0..params.n_layers {
        for &(a, b) in &pairs {
            let matrix = params.block(&params.values[offset..offset + 6])?;
            circuit.push(Gate::So4Block { a, b, matrix })?;
            offset += 6;
        }
    }
    debug_assert_eq!(offset, params.values.len());
    Ok(circuit)
}
