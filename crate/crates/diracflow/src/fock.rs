//! Finite fermionic Fock space over a truncated mode set.
//!
//! Occupation states carry at most one fermion per mode. Signs follow a
//! fixed global mode ordering (particle modes first, then antiparticle
//! modes), which turns the canonical anticommutation relations into exact
//! matrix identities.

use crate::error::{Error, Result};
use crate::modes::{evaluate_mode, Branch, ModeBasis};
use nalgebra::{DMatrix, DVector};
use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use std::collections::HashMap;

type C = Complex64;

const DIMENSION_GUARD: usize = 1_000_000;

/// Occupation bitmask pair: particle occupations and antiparticle
/// occupations, one bit per mode in the basis ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccState {
    pub particles: u64,
    pub antiparticles: u64,
}

impl OccState {
    pub const VACUUM: OccState = OccState { particles: 0, antiparticles: 0 };

    pub fn n_p(&self) -> usize {
        self.particles.count_ones() as usize
    }

    pub fn n_a(&self) -> usize {
        self.antiparticles.count_ones() as usize
    }

    pub fn sector(&self) -> (usize, usize) {
        (self.n_p(), self.n_a())
    }
}

#[derive(Debug, Clone)]
pub struct FockBasis {
    /// Indices into `ModeBasis::modes` for the particle ladder slots.
    pub particle_modes: Vec<usize>,
    /// Indices into `ModeBasis::modes` for the antiparticle ladder slots.
    pub antiparticle_modes: Vec<usize>,
    pub cap: usize,
    /// Lexicographically ordered occupation states with n_P + n_A <= cap.
    pub states: Vec<OccState>,
    index: HashMap<OccState, usize>,
}

/// Enumerate all occupation pairs with n_P + n_A <= cap (vacuum included).
pub fn build_fock_basis(
    particle_modes: Vec<usize>,
    antiparticle_modes: Vec<usize>,
    cap: usize,
) -> Result<FockBasis> {
    let np = particle_modes.len();
    let na = antiparticle_modes.len();
    assert!(np <= 20 && na <= 20, "mode lists beyond desk scale");
    let mut states = Vec::new();
    for p in 0u64..(1 << np) {
        for a in 0u64..(1 << na) {
            let s = OccState { particles: p, antiparticles: a };
            if s.n_p() + s.n_a() <= cap {
                states.push(s);
            }
            if states.len() > DIMENSION_GUARD {
                return Err(Error::DimensionGuard { dim: states.len(), guard: DIMENSION_GUARD });
            }
        }
    }
    states.sort();
    let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    Ok(FockBasis { particle_modes, antiparticle_modes, cap, states, index })
}

impl FockBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn position(&self, state: OccState) -> Option<usize> {
        self.index.get(&state).copied()
    }

    pub fn vacuum_index(&self) -> usize {
        self.position(OccState::VACUUM).expect("basis always contains the vacuum")
    }

    /// States of a definite (n_P, n_A) sector.
    pub fn sector_indices(&self, n_p: usize, n_a: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.states[i].sector() == (n_p, n_a)).collect()
    }

    pub fn sectors(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self.states.iter().map(|s| s.sector()).collect();
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderOp {
    B,
    BDag,
    D,
    DDag,
}

/// Jordan-Wigner sign for the particle slot `mode`: particles precede
/// antiparticles in the global ordering.
fn jw_sign_particle(state: OccState, mode: usize) -> f64 {
    let below = (state.particles & ((1u64 << mode) - 1)).count_ones();
    if below % 2 == 0 { 1.0 } else { -1.0 }
}

fn jw_sign_antiparticle(state: OccState, mode: usize) -> f64 {
    let below = state.particles.count_ones()
        + (state.antiparticles & ((1u64 << mode) - 1)).count_ones();
    if below % 2 == 0 { 1.0 } else { -1.0 }
}

/// Action of one basis state under a ladder operator: the image state and
/// its sign, or None (zero vector).
fn ladder_on_state(basis: &FockBasis, op: LadderOp, mode: usize, state: OccState) -> Option<(OccState, f64)> {
    let (occ, is_particle) = match op {
        LadderOp::B | LadderOp::BDag => (state.particles, true),
        LadderOp::D | LadderOp::DDag => (state.antiparticles, false),
    };
    let bit = 1u64 << mode;
    let creating = matches!(op, LadderOp::BDag | LadderOp::DDag);
    if creating && (occ & bit != 0) {
        return None; // Pauli exclusion
    }
    if !creating && (occ & bit == 0) {
        return None; // annihilating an empty mode
    }
    let sign = if is_particle {
        jw_sign_particle(state, mode)
    } else {
        jw_sign_antiparticle(state, mode)
    };
    let new = if is_particle {
        OccState { particles: occ ^ bit, ..state }
    } else {
        OccState { antiparticles: occ ^ bit, ..state }
    };
    // states outside the cap are dropped (the truncated space is not
    // closed under creation at the cap boundary)
    basis.position(new).map(|_| (new, sign))
}

/// Standard fermionic ladder action on a coefficient vector. The result
/// is unnormalized; annihilating an empty mode yields the zero vector.
pub fn apply_ladder(basis: &FockBasis, coeffs: &DVector<C>, op: LadderOp, mode: usize) -> DVector<C> {
    let n_modes = match op {
        LadderOp::B | LadderOp::BDag => basis.particle_modes.len(),
        LadderOp::D | LadderOp::DDag => basis.antiparticle_modes.len(),
    };
    assert!(mode < n_modes, "ladder mode {mode} outside the basis");
    let mut out = DVector::zeros(basis.dim());
    for (i, &state) in basis.states.iter().enumerate() {
        if coeffs[i] == C::new(0.0, 0.0) {
            continue;
        }
        if let Some((new, sign)) = ladder_on_state(basis, op, mode, state) {
            let j = basis.position(new).unwrap();
            out[j] += coeffs[i] * sign;
        }
    }
    out
}

/// Dense matrix of a ladder operator over the full basis (test and
/// Hamiltonian construction helper).
pub fn ladder_matrix(basis: &FockBasis, op: LadderOp, mode: usize) -> DMatrix<C> {
    let dim = basis.dim();
    let mut m = DMatrix::zeros(dim, dim);
    for (i, &state) in basis.states.iter().enumerate() {
        if let Some((new, sign)) = ladder_on_state(basis, op, mode, state) {
            let j = basis.position(new).unwrap();
            m[(j, i)] = C::new(sign, 0.0);
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianKind {
    Free,
    QuadraticMixing,
}

/// Pair creation/annihilation term lambda (b^dag_p d^dag_a + d_a b_p).
#[derive(Debug, Clone, Copy)]
pub struct PairTerm {
    pub particle_mode: usize,
    pub antiparticle_mode: usize,
    pub lambda: C,
}

#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    pub kind: HamiltonianKind,
    pub matrix: DMatrix<C>,
}

/// Free Hamiltonian sum_k E_k (b^dag_k b_k + d^dag_k d_k) with the mode
/// energies taken from the Dirac mode basis.
pub fn build_free_hamiltonian(basis: &FockBasis, modes: &ModeBasis) -> HamiltonianMatrix {
    let dim = basis.dim();
    let mut m = DMatrix::zeros(dim, dim);
    for (i, state) in basis.states.iter().enumerate() {
        let mut e = 0.0;
        for (slot, &mode_idx) in basis.particle_modes.iter().enumerate() {
            if state.particles & (1 << slot) != 0 {
                e += modes.modes[mode_idx].energy;
            }
        }
        for (slot, &mode_idx) in basis.antiparticle_modes.iter().enumerate() {
            if state.antiparticles & (1 << slot) != 0 {
                e += modes.modes[mode_idx].energy;
            }
        }
        m[(i, i)] = C::new(e, 0.0);
    }
    HamiltonianMatrix { kind: HamiltonianKind::Free, matrix: m }
}

/// Free part plus hermitian pair-mixing terms: sector flow only between
/// (n_P, n_A) and (n_P+1, n_A+1).
pub fn build_mixing_hamiltonian(
    basis: &FockBasis,
    modes: &ModeBasis,
    pairs: &[PairTerm],
) -> HamiltonianMatrix {
    let mut h = build_free_hamiltonian(basis, modes).matrix;
    for term in pairs {
        let bdag = ladder_matrix(basis, LadderOp::BDag, term.particle_mode);
        let ddag = ladder_matrix(basis, LadderOp::DDag, term.antiparticle_mode);
        let x = &bdag * &ddag * term.lambda;
        h += &x + x.adjoint();
    }
    HamiltonianMatrix { kind: HamiltonianKind::QuadraticMixing, matrix: h }
}

/// Wrap an explicit matrix; rejects non-hermitian input.
pub fn hamiltonian_from_matrix(kind: HamiltonianKind, matrix: DMatrix<C>) -> Result<HamiltonianMatrix> {
    let adj = matrix.adjoint();
    let mut max = 0.0f64;
    let mut scale = 0.0f64;
    for (a, b) in matrix.iter().zip(adj.iter()) {
        max = max.max((a - b).norm());
        scale = scale.max(a.norm());
    }
    if max > 1e-12 * scale.max(1.0) {
        return Err(Error::NonHermitian(format!("max |H - H^dag| = {max:.3e}")));
    }
    Ok(HamiltonianMatrix { kind, matrix })
}

/// Complex coefficient vector over the occupation basis.
#[derive(Debug, Clone)]
pub struct FockState {
    pub coeffs: DVector<C>,
    pub t: f64,
}

impl FockState {
    pub fn from_occupation(basis: &FockBasis, state: OccState) -> Self {
        let mut coeffs = DVector::zeros(basis.dim());
        coeffs[basis.position(state).expect("occupation state in basis")] = C::new(1.0, 0.0);
        FockState { coeffs, t: 0.0 }
    }

    pub fn vacuum(basis: &FockBasis) -> Self {
        Self::from_occupation(basis, OccState::VACUUM)
    }

    pub fn normalized(mut self) -> Self {
        let n = self.coeffs.norm();
        assert!(n > 0.0);
        self.coeffs /= C::new(n, 0.0);
        self
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    /// Population sum |c_K|^2 over one (n_P, n_A) sector.
    pub fn sector_population(&self, basis: &FockBasis, n_p: usize, n_a: usize) -> f64 {
        basis
            .sector_indices(n_p, n_a)
            .into_iter()
            .map(|i| self.coeffs[i].norm_sqr())
            .sum()
    }
}

/// Exact unitary propagator from the hermitian eigendecomposition of H.
pub struct Propagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C>,
    h: DMatrix<C>,
}

impl Propagator {
    pub fn new(h: &HamiltonianMatrix) -> Self {
        let eig = nalgebra::SymmetricEigen::new(h.matrix.clone());
        Propagator { eigenvalues: eig.eigenvalues, eigenvectors: eig.eigenvectors, h: h.matrix.clone() }
    }

    /// c(t) = exp(-i H t) c(0).
    pub fn coefficients_at(&self, c0: &DVector<C>, t: f64) -> DVector<C> {
        let mut proj = self.eigenvectors.adjoint() * c0;
        for (i, v) in proj.iter_mut().enumerate() {
            *v *= C::from_polar(1.0, -self.eigenvalues[i] * t);
        }
        &self.eigenvectors * proj
    }

    /// cdot = -i H c.
    pub fn derivative(&self, c: &DVector<C>) -> DVector<C> {
        &self.h * c * C::new(0.0, -1.0)
    }
}

/// c(t) = exp(-i H t) c(0) via exact hermitian eigendecomposition.
pub fn evolve(state: &FockState, h: &HamiltonianMatrix, t: f64) -> FockState {
    let prop = Propagator::new(h);
    FockState { coeffs: prop.coefficients_at(&state.coeffs, t), t: state.t + t }
}

/// Free-field multiparticle wave function (unnormalized), built by
/// <0| psi^(P)(t,x_1) ... psi^(A)dag(t,y_nA) |Psi> evaluated by applying
/// the annihilator chains to the occupation-basis coefficients. Only the
/// (n_P, n_A) sector of the state contributes.
///
/// The returned tensor has one spinor axis (dimension 4) per corpuscle
/// slot, particle slots first.
pub fn wavefunction(
    state: &FockState,
    fock: &FockBasis,
    modes: &ModeBasis,
    particle_points: &[[f64; 3]],
    antiparticle_points: &[[f64; 3]],
    t: f64,
) -> Result<ArrayD<C>> {
    let n_p = particle_points.len();
    let n_a = antiparticle_points.len();
    if n_p + n_a > fock.cap {
        return Err(Error::UnsupportedSector {
            n_p,
            n_a,
            reason: format!("sector above the basis cap {}", fock.cap),
        });
    }
    if fock.sector_indices(n_p, n_a).is_empty() {
        return Err(Error::UnsupportedSector { n_p, n_a, reason: "sector empty in basis".into() });
    }

    // Operators act right-to-left; vectors are indexed by the spinor
    // multi-index of the slots already processed, slot order slowest-first.
    let mut vectors = vec![state.coeffs.clone()];

    // antiparticle slots, rightmost first:
    // psi^(A)dag_d(y) = sum_k conj(v_k_d(y,t)) d_k
    for j in (0..n_a).rev() {
        let y = antiparticle_points[j];
        let mut applied: Vec<DVector<C>> = Vec::with_capacity(vectors.len() * fock.antiparticle_modes.len());
        for w in &vectors {
            for slot in 0..fock.antiparticle_modes.len() {
                applied.push(apply_ladder(fock, w, LadderOp::D, slot));
            }
        }
        let m = fock.antiparticle_modes.len();
        let mut next = Vec::with_capacity(4 * vectors.len());
        for d in 0..4 {
            for (wi, _) in vectors.iter().enumerate() {
                let mut acc = DVector::zeros(fock.dim());
                for (slot, &mode_idx) in fock.antiparticle_modes.iter().enumerate() {
                    let v = evaluate_mode(&modes.modes[mode_idx], Branch::Antiparticle, y, t);
                    acc += &applied[wi * m + slot] * v[d].conj();
                }
                next.push(acc);
            }
        }
        vectors = next;
    }

    // particle slots, rightmost first: psi^(P)_b(x) = sum_k u_k_b(x,t) b_k
    for i in (0..n_p).rev() {
        let x = particle_points[i];
        let m = fock.particle_modes.len();
        let mut applied: Vec<DVector<C>> = Vec::with_capacity(vectors.len() * m);
        for w in &vectors {
            for slot in 0..m {
                applied.push(apply_ladder(fock, w, LadderOp::B, slot));
            }
        }
        let mut next = Vec::with_capacity(4 * vectors.len());
        for b in 0..4 {
            for (wi, _) in vectors.iter().enumerate() {
                let mut acc = DVector::zeros(fock.dim());
                for (slot, &mode_idx) in fock.particle_modes.iter().enumerate() {
                    let u = evaluate_mode(&modes.modes[mode_idx], Branch::Particle, x, t);
                    acc += &applied[wi * m + slot] * u[b];
                }
                next.push(acc);
            }
        }
        vectors = next;
    }

    let vac = fock.vacuum_index();
    let shape: Vec<usize> = vec![4; n_p + n_a];
    let values: Vec<C> = vectors.iter().map(|w| w[vac]).collect();
    if !values.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        return Err(Error::NonFinite("multiparticle wave function"));
    }
    let shape = if shape.is_empty() { vec![1] } else { shape };
    Ok(ArrayD::from_shape_vec(IxDyn(&shape), values).expect("shape matches value count"))
}

/// Expectation of the positron density n^(A)(x) = psi^(A)_a psi^(A)dag_a
/// computed two ways for the cross-check: via ladder algebra and via the
/// one-antiparticle wave-function modulus.
pub fn antiparticle_density_expectation(
    state: &FockState,
    fock: &FockBasis,
    modes: &ModeBasis,
    x: [f64; 3],
    t: f64,
) -> Result<(f64, f64)> {
    // implemented for the one-antiparticle demonstration; other sectors
    // are unsupported here
    let pops: Vec<_> = fock
        .sectors()
        .into_iter()
        .map(|(np, na)| ((np, na), state.sector_population(fock, np, na)))
        .collect();
    for &((np, na), pop) in &pops {
        if (np, na) != (0, 1) && (np, na) != (0, 0) && pop > 1e-12 {
            return Err(Error::UnsupportedSector {
                n_p: np,
                n_a: na,
                reason: "density expectation implemented for one-antiparticle states".into(),
            });
        }
    }

    // operator route: n^(A)(x) = sum_{k,k'} v_k_a(x,t) conj(v_k'_a(x,t)) d^dag_k d_k'
    let mut annihilated: Vec<DVector<C>> = Vec::new();
    for slot in 0..fock.antiparticle_modes.len() {
        annihilated.push(apply_ladder(fock, &state.coeffs, LadderOp::D, slot));
    }
    let mut op_value = C::new(0.0, 0.0);
    for (slot_k, &mk) in fock.antiparticle_modes.iter().enumerate() {
        for (slot_kp, &mkp) in fock.antiparticle_modes.iter().enumerate() {
            let vk = evaluate_mode(&modes.modes[mk], Branch::Antiparticle, x, t);
            let vkp = evaluate_mode(&modes.modes[mkp], Branch::Antiparticle, x, t);
            // <Psi| d^dag_k d_k' |Psi> = <d_k Psi, d_k' Psi>
            let overlap = annihilated[slot_k].dotc(&annihilated[slot_kp]);
            let weight: C = (0..4).map(|a| vk[a] * vkp[a].conj()).sum();
            op_value += weight * overlap;
        }
    }

    // wave-function route: |psi_{0,1}(x)|^2 summed over the spinor index
    let wf = wavefunction(state, fock, modes, &[], &[x], t)?;
    let wf_value: f64 = wf.iter().map(|c| c.norm_sqr()).sum();

    if op_value.im.abs() > 1e-10 {
        return Err(Error::NonRealCurrent { residue: op_value.im.abs(), tol: 1e-10 });
    }
    Ok((op_value.re, wf_value))
}
