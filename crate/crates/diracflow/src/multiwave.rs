//! Multiparticle wave functions as guidance objects: a common trait for
//! anything that can be evaluated on a joint configuration, plus the
//! corpuscle 4-currents read off from such a wave function.

use crate::error::{Error, Result};
use crate::fock::{FockBasis, Propagator};
use crate::gamma::GammaSet;
use crate::lattice::Lattice;
use crate::modes::ModeBasis;
use nalgebra::{DVector, Matrix4, Vector4};
use ndarray::{ArrayD, Axis};
use num_complex::Complex64;

type C = Complex64;

/// A wave function over joint configurations of n_P particle and n_A
/// antiparticle corpuscles. The returned tensor carries one spinor axis
/// (dimension 4) per corpuscle, particle slots first.
pub trait MultiWave: Sync {
    fn n_particles(&self) -> usize;
    fn n_antiparticles(&self) -> usize;
    fn lattice(&self) -> &Lattice;
    fn evaluate(&self, particle_points: &[[f64; 3]], antiparticle_points: &[[f64; 3]], t: f64)
        -> Result<ArrayD<C>>;

    fn n_slots(&self) -> usize {
        self.n_particles() + self.n_antiparticles()
    }
}

/// Fock-state wave function in the Schroedinger picture: mode functions
/// frozen at t=0, all time dependence in the coefficients c(t) =
/// exp(-i H t) c(0). For the free Hamiltonian this reproduces the plane
/// waves with their e^{-iEt} phases.
pub struct FockWave<'a> {
    pub fock: &'a FockBasis,
    pub modes: &'a ModeBasis,
    c0: DVector<C>,
    propagator: Propagator,
    n_p: usize,
    n_a: usize,
}

impl<'a> FockWave<'a> {
    /// `n_p`, `n_a` select which corpuscle sector the wave function is
    /// read out of; the state must have weight there.
    pub fn new(
        fock: &'a FockBasis,
        modes: &'a ModeBasis,
        c0: DVector<C>,
        h: &crate::fock::HamiltonianMatrix,
        n_p: usize,
        n_a: usize,
    ) -> Result<Self> {
        if fock.sector_indices(n_p, n_a).is_empty() {
            return Err(Error::UnsupportedSector {
                n_p,
                n_a,
                reason: "sector not present in the Fock basis".into(),
            });
        }
        Ok(FockWave { fock, modes, c0, propagator: Propagator::new(h), n_p, n_a })
    }

    pub fn coefficients_at(&self, t: f64) -> DVector<C> {
        self.propagator.coefficients_at(&self.c0, t)
    }
}

impl MultiWave for FockWave<'_> {
    fn n_particles(&self) -> usize {
        self.n_p
    }

    fn n_antiparticles(&self) -> usize {
        self.n_a
    }

    fn lattice(&self) -> &Lattice {
        &self.modes.lattice
    }

    fn evaluate(&self, xp: &[[f64; 3]], xa: &[[f64; 3]], t: f64) -> Result<ArrayD<C>> {
        assert_eq!(xp.len(), self.n_p);
        assert_eq!(xa.len(), self.n_a);
        let state = crate::fock::FockState { coeffs: self.coefficients_at(t), t };
        crate::fock::wavefunction(&state, self.fock, self.modes, xp, xa, 0.0)
    }
}

fn apply_matrix_along_axis(arr: &mut ArrayD<C>, m: &Matrix4<C>, axis: usize) {
    for mut lane in arr.lanes_mut(Axis(axis)) {
        let v = Vector4::new(lane[0], lane[1], lane[2], lane[3]);
        let w = m * v;
        for i in 0..4 {
            lane[i] = w[i];
        }
    }
}

/// Per-corpuscle 4-currents at one joint configuration.
#[derive(Debug, Clone)]
pub struct SlotCurrents {
    /// guidance density j^0 of each slot
    pub j0: Vec<f64>,
    /// contravariant spatial current of each slot
    pub j: Vec<[f64; 3]>,
}

/// Corpuscle currents of a multiparticle wave function tensor. With
/// chi = (gamma_0^T on each antiparticle axis) psi and
/// chibar = (gamma_0 on each particle axis) conj(psi), the current of
/// slot s is j^mu_s = sum chibar (Gamma^mu_s chi), where Gamma^mu is
/// gamma^mu on a particle axis and its transpose on an antiparticle
/// axis. Each j^mu is real up to roundoff; the imaginary residue is
/// guarded.
pub fn corpuscle_currents(
    psi: &ArrayD<C>,
    gammas: &GammaSet,
    n_p: usize,
    n_a: usize,
) -> Result<SlotCurrents> {
    assert_eq!(psi.ndim(), n_p + n_a, "one spinor axis per corpuscle");
    let g0 = *gammas.upper(0);
    let g0_t = g0.transpose();

    let mut chi = psi.clone();
    for axis in n_p..n_p + n_a {
        apply_matrix_along_axis(&mut chi, &g0_t, axis);
    }
    let mut chibar = psi.mapv(|c| c.conj());
    for axis in 0..n_p {
        apply_matrix_along_axis(&mut chibar, &g0, axis);
    }

    let scale: f64 = chibar.iter().zip(chi.iter()).map(|(a, b)| a.norm() * b.norm()).sum();
    let tol = 1e-10 * scale.max(f64::MIN_POSITIVE);

    let contract = |gamma_slot: &ArrayD<C>| -> Result<f64> {
        let value: C = chibar.iter().zip(gamma_slot.iter()).map(|(a, b)| a * b).sum();
        if value.im.abs() > tol {
            return Err(Error::NonRealCurrent { residue: value.im.abs(), tol });
        }
        if !value.re.is_finite() {
            return Err(Error::NonFinite("corpuscle current"));
        }
        Ok(value.re)
    };

    let mut j0 = Vec::with_capacity(n_p + n_a);
    let mut j = Vec::with_capacity(n_p + n_a);
    for slot in 0..n_p + n_a {
        let antiparticle = slot >= n_p;
        let gamma_mu = |mu: usize| {
            let g = *gammas.upper(mu);
            if antiparticle {
                g.transpose()
            } else {
                g
            }
        };
        let mut tmp = chi.clone();
        apply_matrix_along_axis(&mut tmp, &gamma_mu(0), slot);
        j0.push(contract(&tmp)?);
        let mut ji = [0.0; 3];
        for (i, out) in ji.iter_mut().enumerate() {
            let mut tmp = chi.clone();
            apply_matrix_along_axis(&mut tmp, &gamma_mu(i + 1), slot);
            *out = contract(&tmp)?;
        }
        j.push(ji);
    }
    Ok(SlotCurrents { j0, j })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{
        build_fock_basis, build_free_hamiltonian, FockState, OccState,
    };
    use crate::modes::{build_mode_basis, evaluate_mode, Branch, Spin};

    fn setup() -> (Lattice, ModeBasis) {
        let lat = Lattice::line(2.0 * std::f64::consts::PI, 32);
        let modes = build_mode_basis(&lat, 1.0, 2).unwrap();
        (lat, modes)
    }

    #[test]
    fn one_particle_plane_wave_velocity_is_group_velocity() {
        let (_, modes) = setup();
        let g = GammaSet::dirac_pauli();
        let idx = modes.find([2, 0, 0], Spin::Up).unwrap();
        let mode = &modes.modes[idx];
        let psi_vec = evaluate_mode(mode, Branch::Particle, [0.7, 0.0, 0.0], 0.3);
        let psi = ArrayD::from_shape_vec(ndarray::IxDyn(&[4]), psi_vec.iter().copied().collect())
            .unwrap();
        let cur = corpuscle_currents(&psi, &g, 1, 0).unwrap();
        assert!(cur.j0[0] > 0.0);
        let v = cur.j[0][0] / cur.j0[0];
        assert!((v - mode.k[0] / mode.energy).abs() < 1e-14);
        assert!(cur.j[0][1].abs() < 1e-14 && cur.j[0][2].abs() < 1e-14);
    }

    #[test]
    fn one_positron_plane_wave_moves_with_its_momentum() {
        let (_, modes) = setup();
        let g = GammaSet::dirac_pauli();
        let idx = modes.find([1, 0, 0], Spin::Down).unwrap();
        let mode = &modes.modes[idx];
        // one-positron wave function is the conjugated antiparticle field
        let v_vec = evaluate_mode(mode, Branch::Antiparticle, [1.2, 0.0, 0.0], 0.5);
        let psi = ArrayD::from_shape_vec(
            ndarray::IxDyn(&[4]),
            v_vec.iter().map(|c| c.conj()).collect(),
        )
        .unwrap();
        let cur = corpuscle_currents(&psi, &g, 0, 1).unwrap();
        assert!(cur.j0[0] > 0.0, "positron guidance density must be positive");
        let vel = cur.j[0][0] / cur.j0[0];
        // a d^dag_k excitation propagates with +k/E
        assert!((vel - mode.k[0] / mode.energy).abs() < 1e-14);
    }

    #[test]
    fn two_particle_orthogonal_modes_share_the_total_velocity() {
        // opposite spins with k along x make every cross spinor product
        // vanish; the spectator axis contracts through gamma_0, weighting
        // each mode by ubar u = m/(E V), so both slots move with the
        // centre-of-momentum velocity (k1 + k2)/(E1 + E2) (hand derivation)
        let (_, modes) = setup();
        let g = GammaSet::dirac_pauli();
        let m1 = modes.find([1, 0, 0], Spin::Up).unwrap();
        let m2 = modes.find([2, 0, 0], Spin::Down).unwrap();
        let fock = build_fock_basis(vec![m1, m2], vec![], 2).unwrap();
        let state = FockState::from_occupation(&fock, OccState { particles: 0b11, antiparticles: 0 });
        let h = build_free_hamiltonian(&fock, &modes);
        let wave = FockWave::new(&fock, &modes, state.coeffs, &h, 2, 0).unwrap();
        let psi = wave.evaluate(&[[0.4, 0.0, 0.0], [2.9, 0.0, 0.0]], &[], 0.7).unwrap();
        let cur = corpuscle_currents(&psi, &g, 2, 0).unwrap();
        let e1 = modes.modes[m1].energy;
        let e2 = modes.modes[m2].energy;
        let expect = (modes.modes[m1].k[0] + modes.modes[m2].k[0]) / (e1 + e2);
        for slot in 0..2 {
            assert!(cur.j0[slot] > 0.0);
            let v = cur.j[slot][0] / cur.j0[slot];
            assert!((v - expect).abs() < 1e-12, "slot {slot}: {v} vs {expect}");
        }
    }

    #[test]
    fn pair_state_slots_move_with_their_mode_velocities() {
        let (_, modes) = setup();
        let g = GammaSet::dirac_pauli();
        let mp = modes.find([1, 0, 0], Spin::Up).unwrap();
        let ma = modes.find([-1, 0, 0], Spin::Down).unwrap();
        let fock = build_fock_basis(vec![mp], vec![ma], 2).unwrap();
        // superpose vacuum and pair so the sector wave function is generic
        let mut coeffs = DVector::zeros(fock.dim());
        coeffs[fock.vacuum_index()] = C::new(0.6, 0.0);
        coeffs[fock.position(OccState { particles: 1, antiparticles: 1 }).unwrap()] =
            C::new(0.5, 0.6);
        let h = build_free_hamiltonian(&fock, &modes);
        let wave = FockWave::new(&fock, &modes, coeffs, &h, 1, 1).unwrap();
        for &t in &[0.0, 0.9] {
            let psi = wave.evaluate(&[[0.3, 0.0, 0.0]], &[[4.1, 0.0, 0.0]], t).unwrap();
            let cur = corpuscle_currents(&psi, &g, 1, 1).unwrap();
            assert_eq!(cur.j0.len(), 2);
            // the product form u(x) conj(v(y)) makes the spectator factor
            // cancel in each ratio: every slot keeps its own group
            // velocity. The guidance density itself carries a negative
            // spectator factor vbar v = -m/(E V) for slot 1; only the
            // ratio is physical.
            for slot in 0..2 {
                assert!(cur.j0[slot] != 0.0);
                let mode = &modes.modes[[mp, ma][slot]];
                let v = cur.j[slot][0] / cur.j0[slot];
                assert!((v - mode.k[0] / mode.energy).abs() < 1e-12, "slot {slot}");
            }
            assert!(cur.j0[0] < 0.0 && cur.j0[1] > 0.0);
        }
    }

    #[test]
    fn fock_wave_free_evolution_matches_heisenberg_phases() {
        // Schroedinger-picture readout (frozen modes, evolved c) must
        // agree with static coefficients and time-dependent modes
        let (_, modes) = setup();
        let m1 = modes.find([1, 0, 0], Spin::Up).unwrap();
        let m2 = modes.find([2, 0, 0], Spin::Up).unwrap();
        let fock = build_fock_basis(vec![m1, m2], vec![], 1).unwrap();
        let mut coeffs = DVector::zeros(fock.dim());
        coeffs[fock.position(OccState { particles: 0b01, antiparticles: 0 }).unwrap()] =
            C::new(0.8, 0.0);
        coeffs[fock.position(OccState { particles: 0b10, antiparticles: 0 }).unwrap()] =
            C::new(0.0, 0.6);
        let h = build_free_hamiltonian(&fock, &modes);
        let wave = FockWave::new(&fock, &modes, coeffs.clone(), &h, 1, 0).unwrap();
        let t = 1.4;
        let x = [2.2, 0.0, 0.0];
        let psi = wave.evaluate(&[x], &[], t).unwrap();
        let expect = evaluate_mode(&modes.modes[m1], Branch::Particle, x, t) * C::new(0.8, 0.0)
            + evaluate_mode(&modes.modes[m2], Branch::Particle, x, t) * C::new(0.0, 0.6);
        for a in 0..4 {
            assert!((psi[[a]] - expect[a]).norm() < 1e-12);
        }
    }
}
