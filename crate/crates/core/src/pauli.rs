//! Pauli-operator form of the Frenkel exciton Hamiltonian.
//!
//! Each chromophore A is a two-level site: |0_A⟩ is its electronic ground
//! state, |1_A⟩ the excited state. In that basis the N-site Hamiltonian with
//! dipole–dipole couplings reduces to at most quadratic Pauli strings,
//!
//!   Ĥ = 𝓔·1 + Σ_A (𝓩_A Z_A + 𝓧_A X_A)
//!         + Σ_{A>B} (𝓧𝓧_AB X_A X_B + 𝓧𝓩_AB X_A Z_B + 𝓩𝓧_AB Z_A X_B + 𝓩𝓩_AB Z_A Z_B),
//!
//! with coefficients assembled from per-monomer energies and dipoles:
//! sum/difference energies S_A = (e_S0 + e_S1)/2 and D_A = (e_S0 − e_S1)/2
//! (negative for a normal gap), and pair primitives (P_A|Q_B) evaluated by
//! the point-dipole interaction between the monomers' transition (T = μ_01),
//! sum (S = (μ_00 + μ_11)/2), and difference (D = (μ_00 − μ_11)/2) dipoles.
//!
//! Conventions used throughout the crate:
//! - site 0 is the most significant bit of a configuration index;
//! - Z has eigenvalue +1 on |0⟩ (ground) and −1 on |1⟩ (excited);
//! - all quantities are in atomic units (hartree, bohr, a.u. dipoles).

use crate::numerics::Mat;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest site count for which a dense 2^N × 2^N matrix may be formed.
pub const DENSE_CAP_DEFAULT: usize = 12;

/// Per-monomer electronic-structure input (all atomic units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomerData {
    pub index: usize,
    /// Ground-state energy (hartree).
    pub e_s0: f64,
    /// Excited-state energy (hartree); must satisfy e_s1 ≥ e_s0.
    pub e_s1: f64,
    /// Center of mass (bohr).
    pub com: [f64; 3],
    /// Ground-state dipole.
    pub mu_00: [f64; 3],
    /// Excited-state dipole.
    pub mu_11: [f64; 3],
    /// Transition dipole.
    pub mu_01: [f64; 3],
    /// Intramonomer coupling (hartree); zero in the usual exciton convention.
    #[serde(default)]
    pub x_intra: f64,
}

impl MonomerData {
    fn validate(&self) -> Result<()> {
        let finite = self.e_s0.is_finite()
            && self.e_s1.is_finite()
            && self.x_intra.is_finite()
            && self
                .com
                .iter()
                .chain(&self.mu_00)
                .chain(&self.mu_11)
                .chain(&self.mu_01)
                .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput(format!(
                "monomer {}: non-finite entry",
                self.index
            )));
        }
        if self.e_s1 < self.e_s0 {
            return Err(Error::InvalidInput(format!(
                "monomer {}: e_s1 = {} below e_s0 = {}",
                self.index, self.e_s1, self.e_s0
            )));
        }
        Ok(())
    }
}

/// Which interaction pairs are retained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Linear,
    Cyclic,
    Pairs,
}

/// Retained-pair policy for an N-site system. Pairs are stored as (a, b)
/// with a > b.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connectivity {
    pub n_sites: usize,
    pub topology: Topology,
    /// Maximum neighbor rank kept for linear/cyclic topologies.
    pub neighbor_order: usize,
    /// Explicit pair list (Pairs topology only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(usize, usize)>>,
    /// Optional center-of-mass distance cutoff (bohr) applied on top of the
    /// topology rule when monomer geometry is available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
}

impl Connectivity {
    pub fn linear(n_sites: usize, neighbor_order: usize) -> Self {
        Connectivity {
            n_sites,
            topology: Topology::Linear,
            neighbor_order,
            pairs: None,
            cutoff: None,
        }
    }

    pub fn cyclic(n_sites: usize, neighbor_order: usize) -> Self {
        Connectivity {
            n_sites,
            topology: Topology::Cyclic,
            neighbor_order,
            pairs: None,
            cutoff: None,
        }
    }

    /// Explicit pair list; pairs are normalized to (a, b) with a > b and
    /// deduplicated.
    pub fn from_pairs(n_sites: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut normalized = Vec::with_capacity(pairs.len());
        for &(p, q) in pairs {
            if p == q || p >= n_sites || q >= n_sites {
                return Err(Error::InvalidInput(format!(
                    "pair ({p}, {q}) invalid for {n_sites} sites"
                )));
            }
            let (a, b) = if p > q { (p, q) } else { (q, p) };
            if !normalized.contains(&(a, b)) {
                normalized.push((a, b));
            }
        }
        Ok(Connectivity {
            n_sites,
            topology: Topology::Pairs,
            neighbor_order: 1,
            pairs: Some(normalized),
            cutoff: None,
        })
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::InvalidInput("connectivity over zero sites".into()));
        }
        match self.topology {
            Topology::Pairs => {
                let pairs = self.pairs.as_ref().ok_or_else(|| {
                    Error::InvalidInput("pairs topology without a pair list".into())
                })?;
                let mut seen = std::collections::HashSet::new();
                for &(a, b) in pairs {
                    if !(b < a && a < self.n_sites) {
                        return Err(Error::InvalidInput(format!(
                            "pair ({a}, {b}) violates 0 ≤ b < a < {}",
                            self.n_sites
                        )));
                    }
                    if !seen.insert((a, b)) {
                        return Err(Error::InvalidInput(format!("duplicate pair ({a}, {b})")));
                    }
                }
            }
            Topology::Linear | Topology::Cyclic => {
                if self.neighbor_order == 0 {
                    return Err(Error::InvalidInput("neighbor_order must be ≥ 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Pairs retained by the topology rule, each as (a, b) with a > b,
    /// sorted by (b, a). The distance cutoff is applied separately where
    /// geometry is known.
    pub fn retained_pairs(&self) -> Result<Vec<(usize, usize)>> {
        self.validate()?;
        let n = self.n_sites;
        let mut out = Vec::new();
        match self.topology {
            Topology::Pairs => out.extend(self.pairs.as_ref().unwrap().iter().copied()),
            Topology::Linear => {
                for b in 0..n {
                    for a in (b + 1)..n.min(b + self.neighbor_order + 1) {
                        out.push((a, b));
                    }
                }
            }
            Topology::Cyclic => {
                for b in 0..n {
                    for a in (b + 1)..n {
                        let d = (a - b).min(n - (a - b));
                        if d <= self.neighbor_order {
                            out.push((a, b));
                        }
                    }
                }
            }
        }
        out.sort_by_key(|&(a, b)| (b, a));
        Ok(out)
    }
}

/// Pauli axis of a single-site factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// One real-coefficient Pauli string: coefficient × Π (axis on site). Sites
/// in `factors` are strictly increasing; an empty list is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub factors: Vec<(usize, Axis)>,
}

impl PauliTerm {
    pub fn identity(coefficient: f64) -> Self {
        PauliTerm {
            coefficient,
            factors: Vec::new(),
        }
    }

    pub fn single(coefficient: f64, site: usize, axis: Axis) -> Self {
        PauliTerm {
            coefficient,
            factors: vec![(site, axis)],
        }
    }

    /// Two-site term; sites are ordered ascending regardless of argument
    /// order.
    pub fn pair(coefficient: f64, a: (usize, Axis), b: (usize, Axis)) -> Self {
        assert_ne!(a.0, b.0, "pair term on duplicate site {}", a.0);
        let factors = if a.0 < b.0 { vec![a, b] } else { vec![b, a] };
        PauliTerm {
            coefficient,
            factors,
        }
    }

    fn assert_valid(&self, n_sites: usize) {
        let mut prev: Option<usize> = None;
        for &(site, _) in &self.factors {
            assert!(
                site < n_sites,
                "pauli factor on site {site} but system has {n_sites} sites"
            );
            if let Some(p) = prev {
                assert!(p < site, "pauli factor sites not strictly increasing");
            }
            prev = Some(site);
        }
    }
}

/// The assembled exciton Hamiltonian in Pauli-coefficient form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCoefficients {
    pub a: usize,
    pub b: usize,
    /// 𝓧𝓧_AB on X_A X_B.
    pub xx: f64,
    /// 𝓧𝓩_AB on X_A Z_B.
    pub xz: f64,
    /// 𝓩𝓧_AB on Z_A X_B.
    pub zx: f64,
    /// 𝓩𝓩_AB on Z_A Z_B.
    pub zz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitonHamiltonian {
    pub n_sites: usize,
    /// Identity coefficient 𝓔 (hartree); carries the absolute energy scale.
    pub e_scalar: f64,
    /// Per-site 𝓩_A.
    pub z: Vec<f64>,
    /// Per-site 𝓧_A.
    pub x: Vec<f64>,
    /// Retained pair coefficients, (a, b) with a > b.
    pub pairs: Vec<PairCoefficients>,
    /// Source connectivity (kept so downstream consumers can lay out
    /// entanglers to match the interaction graph).
    pub connectivity: Connectivity,
}

impl ExcitonHamiltonian {
    /// The Hamiltonian as a flat Pauli-term list. Exact-zero coefficients
    /// are dropped except the identity, which anchors the energy origin.
    pub fn to_pauli_terms(&self) -> Vec<PauliTerm> {
        let mut terms = vec![PauliTerm::identity(self.e_scalar)];
        for (a, &c) in self.z.iter().enumerate() {
            if c != 0.0 {
                terms.push(PauliTerm::single(c, a, Axis::Z));
            }
        }
        for (a, &c) in self.x.iter().enumerate() {
            if c != 0.0 {
                terms.push(PauliTerm::single(c, a, Axis::X));
            }
        }
        for p in &self.pairs {
            for (c, ax_a, ax_b) in [
                (p.xx, Axis::X, Axis::X),
                (p.xz, Axis::X, Axis::Z),
                (p.zx, Axis::Z, Axis::X),
                (p.zz, Axis::Z, Axis::Z),
            ] {
                if c != 0.0 {
                    terms.push(PauliTerm::pair(c, (p.a, ax_a), (p.b, ax_b)));
                }
            }
        }
        terms
    }

    /// Same list with the identity removed: the spectrum shifted by −𝓔.
    /// Better conditioned for iterative eigensolvers when 𝓔 is large.
    pub fn to_pauli_terms_traceless(&self) -> Vec<PauliTerm> {
        let mut terms = self.to_pauli_terms();
        terms.retain(|t| !t.factors.is_empty());
        terms
    }

    pub fn pair_list(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(|p| (p.a, p.b)).collect()
    }
}

/// Point-dipole interaction (μ_A·μ_B − 3(μ_A·n̂)(μ_B·n̂)) / r³ between
/// dipoles at the two centers of mass. Symmetric under exchange of the two
/// (dipole, center) pairs.
pub fn dipole_coupling(
    mu_a: [f64; 3],
    mu_b: [f64; 3],
    com_a: [f64; 3],
    com_b: [f64; 3],
) -> Result<f64> {
    let dr = [
        com_b[0] - com_a[0],
        com_b[1] - com_a[1],
        com_b[2] - com_a[2],
    ];
    let r2 = dot3(dr, dr);
    let r = r2.sqrt();
    if r < 1e-10 {
        return Err(Error::DegenerateGeometry {
            a: com_a,
            b: com_b,
            r,
        });
    }
    let n = [dr[0] / r, dr[1] / r, dr[2] / r];
    Ok((dot3(mu_a, mu_b) - 3.0 * dot3(mu_a, n) * dot3(mu_b, n)) / (r * r * r))
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn scale3(v: [f64; 3], s: f64) -> [f64; 3] {
    [v[0] * s, v[1] * s, v[2] * s]
}

fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Assemble the Pauli-coefficient Hamiltonian from monomer data and the
/// retained-pair policy. One-body dressings (D_A|S_B), (T_A|S_B) sum over
/// exactly the retained pairs, keeping the truncation consistent with the
/// two-body terms.
pub fn build_hamiltonian(
    monomers: &[MonomerData],
    conn: &Connectivity,
) -> Result<ExcitonHamiltonian> {
    if monomers.is_empty() {
        return Err(Error::InvalidInput("no monomers".into()));
    }
    if conn.n_sites != monomers.len() {
        return Err(Error::InvalidInput(format!(
            "connectivity is for {} sites but {} monomers given",
            conn.n_sites,
            monomers.len()
        )));
    }
    for (i, m) in monomers.iter().enumerate() {
        m.validate()?;
        if m.index != i {
            return Err(Error::InvalidInput(format!(
                "monomer at position {i} has index {}; expected 0..N in order",
                m.index
            )));
        }
    }

    let n = monomers.len();
    // One-body energies: sum and (ground − excited)/2 difference.
    let s_e: Vec<f64> = monomers.iter().map(|m| 0.5 * (m.e_s0 + m.e_s1)).collect();
    let d_e: Vec<f64> = monomers.iter().map(|m| 0.5 * (m.e_s0 - m.e_s1)).collect();
    // Dipole primitives: transition, sum, and (ground − excited)/2 difference.
    let t_mu: Vec<[f64; 3]> = monomers.iter().map(|m| m.mu_01).collect();
    let s_mu: Vec<[f64; 3]> = monomers
        .iter()
        .map(|m| scale3(add3(m.mu_00, m.mu_11), 0.5))
        .collect();
    let d_mu: Vec<[f64; 3]> = monomers
        .iter()
        .map(|m| scale3(sub3(m.mu_00, m.mu_11), 0.5))
        .collect();

    let mut e_scalar: f64 = s_e.iter().sum();
    let mut z = d_e.clone();
    let mut x: Vec<f64> = monomers.iter().map(|m| m.x_intra).collect();
    let mut pairs = Vec::new();

    for (a, b) in conn.retained_pairs()? {
        if let Some(cut) = conn.cutoff {
            let dr = sub3(monomers[a].com, monomers[b].com);
            if dot3(dr, dr).sqrt() > cut {
                continue;
            }
        }
        let v = |mu_a: [f64; 3], mu_b: [f64; 3]| -> Result<f64> {
            dipole_coupling(mu_a, mu_b, monomers[a].com, monomers[b].com)
        };
        // Scalar and one-body dressings from this pair.
        e_scalar += v(s_mu[a], s_mu[b])?;
        z[a] += v(d_mu[a], s_mu[b])?;
        z[b] += v(s_mu[a], d_mu[b])?;
        x[a] += v(t_mu[a], s_mu[b])?;
        x[b] += v(s_mu[a], t_mu[b])?;
        // Two-body coefficients.
        pairs.push(PairCoefficients {
            a,
            b,
            xx: v(t_mu[a], t_mu[b])?,
            xz: v(t_mu[a], d_mu[b])?,
            zx: v(d_mu[a], t_mu[b])?,
            zz: v(d_mu[a], d_mu[b])?,
        });
    }

    Ok(ExcitonHamiltonian {
        n_sites: n,
        e_scalar,
        z,
        x,
        pairs,
        connectivity: conn.clone(),
    })
}

/// The total dipole operator μ̂ = Σ_A μ̂_A as stored per-site 3-vectors.
/// Fields follow the convention mu_i = (μ_11 + μ_00)/2,
/// mu_z = (μ_11 − μ_00)/2 (excited minus ground), mu_x = μ_01.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipoleOperator {
    pub mu_i: Vec<[f64; 3]>,
    pub mu_z: Vec<[f64; 3]>,
    pub mu_x: Vec<[f64; 3]>,
}

impl DipoleOperator {
    pub fn n_sites(&self) -> usize {
        self.mu_i.len()
    }

    /// Pauli terms of one Cartesian component k ∈ {0,1,2}. The Z coefficient
    /// is −mu_z: Z has eigenvalue +1 on the ground (bit-0) configuration, so
    /// its coefficient is the ground-minus-excited half-difference, the
    /// negative of the stored excited-minus-ground field.
    pub fn component_terms(&self, k: usize) -> Vec<PauliTerm> {
        assert!(k < 3, "cartesian component {k} out of range");
        let mut terms = vec![PauliTerm::identity(
            self.mu_i.iter().map(|v| v[k]).sum::<f64>(),
        )];
        for (a, (mz, mx)) in self.mu_z.iter().zip(&self.mu_x).enumerate() {
            if mz[k] != 0.0 {
                terms.push(PauliTerm::single(-mz[k], a, Axis::Z));
            }
            if mx[k] != 0.0 {
                terms.push(PauliTerm::single(mx[k], a, Axis::X));
            }
        }
        terms
    }
}

/// Build the dipole operator from monomer data.
pub fn build_dipole_operator(monomers: &[MonomerData]) -> Result<DipoleOperator> {
    if monomers.is_empty() {
        return Err(Error::InvalidInput("no monomers".into()));
    }
    for m in monomers {
        m.validate()?;
    }
    Ok(DipoleOperator {
        mu_i: monomers
            .iter()
            .map(|m| scale3(add3(m.mu_11, m.mu_00), 0.5))
            .collect(),
        mu_z: monomers
            .iter()
            .map(|m| scale3(sub3(m.mu_11, m.mu_00), 0.5))
            .collect(),
        mu_x: monomers.iter().map(|m| m.mu_01).collect(),
    })
}

/// Computational-basis matrix element ⟨bra| Σ terms |ket⟩ for N-site
/// configurations (site 0 = most significant bit).
///
/// A term contributes iff its X∪Y support equals the bra/ket flip set; Z and
/// identity factors require equal bits. Each Z (or Y) factor contributes a
/// sign from the ket bit; a term with an odd number of Y factors has a purely
/// imaginary element, which is zero in this real framework.
pub fn pauli_matrix_element(n_sites: usize, bra: usize, ket: usize, terms: &[PauliTerm]) -> f64 {
    let dim = 1usize << n_sites;
    assert!(
        bra < dim && ket < dim,
        "configuration out of range for {n_sites} sites"
    );
    let flip = bra ^ ket;
    let mut total = 0.0;
    for t in terms {
        t.assert_valid(n_sites);
        let mut flip_mask = 0usize;
        let mut phase_mask = 0usize;
        let mut n_y = 0u32;
        for &(site, axis) in &t.factors {
            let bit = 1usize << (n_sites - 1 - site);
            match axis {
                Axis::X => flip_mask |= bit,
                Axis::Y => {
                    flip_mask |= bit;
                    phase_mask |= bit;
                    n_y += 1;
                }
                Axis::Z => phase_mask |= bit,
            }
        }
        if flip_mask != flip || n_y % 2 == 1 {
            continue;
        }
        // i^{n_y} = (−1)^{n_y/2} for even n_y; Z/Y signs come from ket bits.
        let sign_exp = (ket & phase_mask).count_ones() + n_y / 2;
        let sign = if sign_exp % 2 == 0 { 1.0 } else { -1.0 };
        total += t.coefficient * sign;
    }
    total
}

/// Dense 2^N × 2^N matrix of a Pauli-term list, entry (i, j) =
/// ⟨i| Σ terms |j⟩. Exactly symmetric as computed (identical term-by-term
/// accumulation for (i, j) and (j, i)).
pub fn to_dense(n_sites: usize, terms: &[PauliTerm]) -> Result<Mat> {
    to_dense_with_cap(n_sites, terms, DENSE_CAP_DEFAULT)
}

pub fn to_dense_with_cap(n_sites: usize, terms: &[PauliTerm], cap: usize) -> Result<Mat> {
    if n_sites > cap {
        return Err(Error::CapExceeded {
            what: "dense Pauli matrix",
            n: n_sites,
            cap,
        });
    }
    let dim = 1usize << n_sites;
    let mut m = Mat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = pauli_matrix_element(n_sites, i, j, terms);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SplitMix64;

    /// Independent oracle: dense matrix via Kronecker products of 2×2 reals.
    /// Only valid for terms whose imaginary parts cancel (even Y count); the
    /// complex case is handled where needed by tracking (re, im) parts.
    fn kron(a: &Mat, b: &Mat) -> Mat {
        let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
        Mat::from_fn(ar * br, ac * bc, |i, j| {
            a[(i / br, j / bc)] * b[(i % br, j % bc)]
        })
    }

    fn pauli_2x2(axis: Option<Axis>) -> (Mat, Mat) {
        // (real part, imaginary part)
        let re = |v: [[f64; 2]; 2]| Mat::from_fn(2, 2, |i, j| v[i][j]);
        match axis {
            None => (re([[1.0, 0.0], [0.0, 1.0]]), Mat::zeros(2, 2)),
            Some(Axis::X) => (re([[0.0, 1.0], [1.0, 0.0]]), Mat::zeros(2, 2)),
            Some(Axis::Y) => (Mat::zeros(2, 2), re([[0.0, -1.0], [1.0, 0.0]])),
            Some(Axis::Z) => (re([[1.0, 0.0], [0.0, -1.0]]), Mat::zeros(2, 2)),
        }
    }

    /// Complex Kronecker assembly of one term over n sites, returning the
    /// real part (the imaginary part must vanish for symmetric operators).
    fn term_dense_oracle(n: usize, term: &PauliTerm) -> Mat {
        let dim = 1usize << n;
        let mut re = Mat::from_fn(1, 1, |_, _| term.coefficient);
        let mut im = Mat::zeros(1, 1);
        for site in 0..n {
            let axis = term
                .factors
                .iter()
                .find(|(s, _)| *s == site)
                .map(|&(_, ax)| ax);
            let (pr, pi) = pauli_2x2(axis);
            // (re + i·im) ⊗ (pr + i·pi)
            let new_re = {
                let mut m = kron(&re, &pr);
                let mi = kron(&im, &pi);
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        m[(i, j)] -= mi[(i, j)];
                    }
                }
                m
            };
            let new_im = {
                let mut m = kron(&re, &pi);
                let mi = kron(&im, &pr);
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        m[(i, j)] += mi[(i, j)];
                    }
                }
                m
            };
            re = new_re;
            im = new_im;
        }
        assert_eq!(re.nrows(), dim);
        // Only the real part is observable here; odd-Y terms live entirely
        // in `im` and therefore read as zero, matching the implementation.
        drop(im);
        re
    }

    fn dense_oracle(n: usize, terms: &[PauliTerm]) -> Mat {
        let dim = 1usize << n;
        let mut m = Mat::zeros(dim, dim);
        for t in terms {
            let td = term_dense_oracle(n, t);
            for i in 0..dim {
                for j in 0..dim {
                    m[(i, j)] += td[(i, j)];
                }
            }
        }
        m
    }

    fn max_diff(a: &Mat, b: &Mat) -> f64 {
        let mut d = 0.0f64;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                d = d.max((a[(i, j)] - b[(i, j)]).abs());
            }
        }
        d
    }

    fn monomer(index: usize, gap: f64) -> MonomerData {
        MonomerData {
            index,
            e_s0: 0.0,
            e_s1: gap,
            com: [10.0 * index as f64, 0.0, 0.0],
            mu_00: [0.0; 3],
            mu_11: [0.0; 3],
            mu_01: [0.0; 3],
            x_intra: 0.0,
        }
    }

    fn random_monomer(index: usize, rng: &mut SplitMix64) -> MonomerData {
        let v3 = |rng: &mut SplitMix64| {
            [
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
            ]
        };
        MonomerData {
            index,
            e_s0: rng.uniform(-0.1, 0.1),
            e_s1: rng.uniform(1.0, 2.0),
            com: [
                3.0 * index as f64 + rng.uniform(-0.4, 0.4),
                rng.uniform(-0.5, 0.5),
                rng.uniform(-0.5, 0.5),
            ],
            mu_00: v3(rng),
            mu_11: v3(rng),
            mu_01: v3(rng),
            x_intra: 0.0,
        }
    }

    #[test]
    fn dipole_coupling_axis_cases() {
        let o = [0.0; 3];
        let x10 = [10.0, 0.0, 0.0];
        let z = [0.0, 0.0, 1.0];
        let x = [1.0, 0.0, 0.0];
        let perp = dipole_coupling(z, z, o, x10).unwrap();
        assert!(
            (perp - 1.0e-3).abs() < 1e-18,
            "perpendicular pair: {perp} vs 1.0e-3"
        );
        let along = dipole_coupling(x, x, o, x10).unwrap();
        assert!(
            (along + 2.0e-3).abs() < 1e-18,
            "head-to-tail pair: {along} vs -2.0e-3"
        );
        assert_eq!(dipole_coupling([0.0; 3], z, o, x10).unwrap(), 0.0);
    }

    #[test]
    fn dipole_coupling_is_exchange_symmetric() {
        let mut rng = SplitMix64::new(0xd1b0);
        for _ in 0..20 {
            let v3 = |rng: &mut SplitMix64| {
                [
                    rng.uniform(-2.0, 2.0),
                    rng.uniform(-2.0, 2.0),
                    rng.uniform(-2.0, 2.0),
                ]
            };
            let (ma, mb) = (v3(&mut rng), v3(&mut rng));
            let ca = v3(&mut rng);
            let cb = add3(ca, [5.0, 1.0, -2.0]);
            let ab = dipole_coupling(ma, mb, ca, cb).unwrap();
            let ba = dipole_coupling(mb, ma, cb, ca).unwrap();
            assert!((ab - ba).abs() < 1e-15);
        }
    }

    #[test]
    fn dipole_coupling_rejects_coincident_centers() {
        let c = [1.0, 2.0, 3.0];
        let err = dipole_coupling([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], c, c);
        assert!(matches!(err, Err(Error::DegenerateGeometry { .. })));
    }

    #[test]
    fn single_monomer_one_body_coefficients() {
        let h = build_hamiltonian(&[monomer(0, 1.0)], &Connectivity::linear(1, 1)).unwrap();
        assert_eq!(h.e_scalar, 0.5);
        assert_eq!(h.z[0], -0.5);
        assert_eq!(h.x[0], 0.0);
        assert!(h.pairs.is_empty());
    }

    #[test]
    fn zero_dipoles_give_zero_pair_coefficients() {
        let monomers = vec![monomer(0, 1.0), monomer(1, 1.2)];
        let h = build_hamiltonian(&monomers, &Connectivity::linear(2, 1)).unwrap();
        let p = &h.pairs[0];
        assert_eq!((p.xx, p.xz, p.zx, p.zz), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(h.z, vec![-0.5, -0.6]);
    }

    #[test]
    fn difference_energy_matches_tabulated_monomer() {
        let m = MonomerData {
            index: 0,
            e_s0: -2263.26377175,
            e_s1: -2263.19429617,
            com: [0.0; 3],
            mu_00: [0.0; 3],
            mu_11: [0.0; 3],
            mu_01: [0.0; 3],
            x_intra: 0.0,
        };
        let h = build_hamiltonian(&[m], &Connectivity::linear(1, 1)).unwrap();
        assert!((h.z[0] - (-0.03473779)).abs() < 1e-8, "D = {}", h.z[0]);
        assert!(
            (h.e_scalar - (-2263.22903396)).abs() < 1e-8,
            "S = {}",
            h.e_scalar
        );
    }

    #[test]
    fn dense_single_site_cases() {
        let m = to_dense(
            1,
            &[PauliTerm::identity(0.5), PauliTerm::single(-0.5, 0, Axis::Z)],
        )
        .unwrap();
        assert_eq!(
            (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]),
            (0.0, 0.0, 0.0, 1.0)
        );
        let c = 0.37;
        let mx = to_dense(1, &[PauliTerm::single(c, 0, Axis::X)]).unwrap();
        assert_eq!((mx[(0, 0)], mx[(0, 1)], mx[(1, 0)], mx[(1, 1)]), (0.0, c, c, 0.0));
    }

    #[test]
    fn matrix_element_flip_set_rules() {
        let n = 2;
        let zz = [PauliTerm::pair(0.3, (0, Axis::Z), (1, Axis::Z))];
        assert_eq!(pauli_matrix_element(n, 0b00, 0b00, &zz), 0.3);
        assert_eq!(pauli_matrix_element(n, 0b01, 0b01, &zz), -0.3);
        assert_eq!(pauli_matrix_element(n, 0b11, 0b11, &zz), 0.3);
        assert_eq!(pauli_matrix_element(n, 0b11, 0b00, &zz), 0.0);

        let x0 = [PauliTerm::single(0.2, 0, Axis::X)];
        assert_eq!(pauli_matrix_element(n, 0b10, 0b00, &x0), 0.2);
        assert_eq!(pauli_matrix_element(n, 0b01, 0b00, &x0), 0.0);

        let xx = [PauliTerm::pair(0.05, (0, Axis::X), (1, Axis::X))];
        assert_eq!(pauli_matrix_element(n, 0b11, 0b00, &xx), 0.05);
        assert_eq!(pauli_matrix_element(n, 0b10, 0b00, &xx), 0.0);
    }

    #[test]
    fn odd_y_count_vanishes_and_even_y_matches_kron() {
        let y1 = [PauliTerm::single(1.0, 0, Axis::Y)];
        for bra in 0..2 {
            for ket in 0..2 {
                assert_eq!(pauli_matrix_element(1, bra, ket, &y1), 0.0);
            }
        }
        let yy = [PauliTerm::pair(0.7, (0, Axis::Y), (1, Axis::Y))];
        let dense = to_dense(2, &yy).unwrap();
        let oracle = dense_oracle(2, &yy);
        assert!(max_diff(&dense, &oracle) < 1e-15);
        // Spot value: ⟨00|Y⊗Y|11⟩ = −1 per complex Kronecker arithmetic.
        assert_eq!(dense[(0, 3)], -0.7);
    }

    #[test]
    fn random_three_site_hamiltonian_matches_kronecker_oracle() {
        let mut rng = SplitMix64::new(0x3a17);
        let monomers: Vec<MonomerData> =
            (0..3).map(|i| random_monomer(i, &mut rng)).collect();
        let h = build_hamiltonian(&monomers, &Connectivity::linear(3, 2)).unwrap();
        let terms = h.to_pauli_terms();
        let dense = to_dense(3, &terms).unwrap();
        let oracle = dense_oracle(3, &terms);
        assert!(
            max_diff(&dense, &oracle) < 1e-14,
            "dense vs kron oracle diff {}",
            max_diff(&dense, &oracle)
        );
    }

    #[test]
    fn dense_is_bitwise_symmetric() {
        let mut rng = SplitMix64::new(0xbeef);
        let monomers: Vec<MonomerData> =
            (0..4).map(|i| random_monomer(i, &mut rng)).collect();
        let h = build_hamiltonian(&monomers, &Connectivity::cyclic(4, 1)).unwrap();
        let dense = to_dense(4, &h.to_pauli_terms()).unwrap();
        for i in 0..dense.nrows() {
            for j in 0..dense.ncols() {
                assert_eq!(
                    dense[(i, j)].to_bits(),
                    dense[(j, i)].to_bits(),
                    "asymmetry at ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn zero_dipole_spectrum_is_all_level_sums() {
        let monomers = vec![monomer(0, 1.0), monomer(1, 0.7), monomer(2, 0.3)];
        let h = build_hamiltonian(&monomers, &Connectivity::cyclic(3, 1)).unwrap();
        let dense = to_dense(3, &h.to_pauli_terms()).unwrap();
        // Strictly diagonal...
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert_eq!(dense[(i, j)], 0.0);
                }
            }
        }
        // ...with every choice of per-site levels, site 0 as MSB.
        let mut expected: Vec<f64> = (0..8usize)
            .map(|cfg| {
                let gaps = [1.0, 0.7, 0.3];
                (0..3)
                    .map(|site| {
                        if cfg >> (2 - site) & 1 == 1 {
                            gaps[site]
                        } else {
                            0.0
                        }
                    })
                    .sum()
            })
            .collect();
        let mut diag: Vec<f64> = (0..8).map(|i| dense[(i, i)]).collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        diag.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (d, e) in diag.iter().zip(&expected) {
            assert!((d - e).abs() < 1e-12);
        }
    }

    #[test]
    fn z_lift_respects_declared_bit_ordering() {
        // Z on site 0 of three sites = Z ⊗ I ⊗ I (site 0 most significant).
        let term = [PauliTerm::single(1.0, 0, Axis::Z)];
        let dense = to_dense(3, &term).unwrap();
        let oracle = dense_oracle(3, &term);
        assert!(max_diff(&dense, &oracle) < 1e-15);
        assert_eq!(dense[(0, 0)], 1.0);
        assert_eq!(dense[(4, 4)], -1.0, "config 0b100 has site 0 excited");
    }

    #[test]
    fn dipole_operator_fields_and_dense_oracle() {
        let mut m = monomer(0, 1.0);
        m.mu_00 = [0.0; 3];
        m.mu_11 = [2.0, 0.0, 0.0];
        m.mu_01 = [1.0, 1.0, 0.0];
        let op = build_dipole_operator(&[m]).unwrap();
        assert_eq!(op.mu_i[0], [1.0, 0.0, 0.0]);
        assert_eq!(op.mu_z[0], [1.0, 0.0, 0.0]);
        assert_eq!(op.mu_x[0], [1.0, 1.0, 0.0]);

        let mut rng = SplitMix64::new(0x0d1);
        let monomers: Vec<MonomerData> =
            (0..3).map(|i| random_monomer(i, &mut rng)).collect();
        let op = build_dipole_operator(&monomers).unwrap();
        for k in 0..3 {
            let dense = to_dense(3, &op.component_terms(k)).unwrap();
            // Oracle: Σ_A kron-lift of [[mu_00_k, mu_01_k], [mu_01_k, mu_11_k]].
            let dim = 8;
            let mut oracle = Mat::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    let flip = i ^ j;
                    for (site, mo) in monomers.iter().enumerate() {
                        let bit = 1usize << (2 - site);
                        if flip == 0 {
                            oracle[(i, j)] += if i & bit == 0 {
                                mo.mu_00[k]
                            } else {
                                mo.mu_11[k]
                            };
                        } else if flip == bit {
                            oracle[(i, j)] += mo.mu_01[k];
                        }
                    }
                    if flip != 0 && flip.count_ones() > 1 {
                        oracle[(i, j)] = 0.0;
                    }
                }
            }
            assert!(
                max_diff(&dense, &oracle) < 1e-14,
                "component {k} mismatch {}",
                max_diff(&dense, &oracle)
            );
        }
        let mut same = monomer(0, 1.0);
        same.mu_00 = [0.3, -0.2, 0.1];
        same.mu_11 = [0.3, -0.2, 0.1];
        let op = build_dipole_operator(&[same]).unwrap();
        assert_eq!(op.mu_z[0], [0.0; 3]);
    }

    #[test]
    fn connectivity_retained_pairs() {
        let cyc = Connectivity::cyclic(6, 1).retained_pairs().unwrap();
        assert_eq!(cyc, vec![(1, 0), (5, 0), (2, 1), (3, 2), (4, 3), (5, 4)]);
        let lin = Connectivity::linear(4, 1).retained_pairs().unwrap();
        assert_eq!(lin, vec![(1, 0), (2, 1), (3, 2)]);
        let lin2 = Connectivity::linear(4, 2).retained_pairs().unwrap();
        assert_eq!(lin2, vec![(1, 0), (2, 0), (2, 1), (3, 1), (3, 2)]);
        let pr = Connectivity::from_pairs(5, &[(0, 3), (4, 1), (3, 0)])
            .unwrap()
            .retained_pairs()
            .unwrap();
        assert_eq!(pr, vec![(3, 0), (4, 1)]);
    }

    #[test]
    fn cutoff_drops_distant_pairs() {
        let monomers = vec![monomer(0, 1.0), monomer(1, 1.0), monomer(2, 1.0)];
        // coms at x = 0, 10, 20; full linear order-2 would keep (2,0) at r=20.
        let conn = Connectivity::linear(3, 2).with_cutoff(15.0);
        let h = build_hamiltonian(&monomers, &conn).unwrap();
        assert_eq!(h.pair_list(), vec![(1, 0), (2, 1)]);
    }

    #[test]
    fn build_rejects_bad_inputs() {
        let m = vec![monomer(0, 1.0)];
        assert!(build_hamiltonian(&m, &Connectivity::linear(2, 1)).is_err());
        assert!(build_hamiltonian(&[], &Connectivity::linear(0, 1)).is_err());
        let mut inverted = monomer(0, 1.0);
        inverted.e_s1 = -2.0;
        assert!(build_hamiltonian(&[inverted], &Connectivity::linear(1, 1)).is_err());
        assert!(Connectivity::from_pairs(3, &[(1, 1)]).is_err());
        assert!(Connectivity::from_pairs(3, &[(0, 7)]).is_err());
    }

    #[test]
    fn dense_cap_is_enforced() {
        let terms = [PauliTerm::identity(1.0)];
        let err = to_dense_with_cap(13, &terms, 12);
        assert!(matches!(err, Err(Error::CapExceeded { .. })));
    }
}
