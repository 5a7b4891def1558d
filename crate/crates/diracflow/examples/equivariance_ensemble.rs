//! Equivariance in both pictures: an ensemble sampled from the quantum
//! density at t0 still matches it at t1 after transport along the
//! guidance flow — for corpuscle trajectories in a two-mode particle
//! superposition, and for field-configuration trajectories under a
//! pair-mixing Hamiltonian.

use diracflow::causal::{build_functional_basis, field_equivariance_test, CausalPipeline, ConfigGrid};
use diracflow::fock::{
    build_fock_basis, build_free_hamiltonian, build_mixing_hamiltonian, OccState, PairTerm,
};
use diracflow::gamma::GammaSet;
use diracflow::lattice::Lattice;
use diracflow::modes::{build_mode_basis, Spin};
use diracflow::multiwave::FockWave;
use diracflow::trajectory::equivariance_test;
use nalgebra::DVector;
use num_complex::Complex64 as C;

fn main() {
    // corpuscle picture: superposition of two particle modes
    let lattice = Lattice::line(2.0 * std::f64::consts::PI, 16);
    let modes = build_mode_basis(&lattice, 1.0, 2).expect("mode basis");
    let m1 = modes.find([1, 0, 0], Spin::Up).unwrap();
    let m2 = modes.find([-2, 0, 0], Spin::Up).unwrap();
    let fock = build_fock_basis(vec![m1, m2], vec![], 1).expect("fock basis");
    let h = build_free_hamiltonian(&fock, &modes);
    let mut c0 = DVector::zeros(fock.dim());
    c0[fock.position(OccState { particles: 0b01, antiparticles: 0 }).unwrap()] = C::new(0.8, 0.0);
    c0[fock.position(OccState { particles: 0b10, antiparticles: 0 }).unwrap()] = C::new(0.0, 0.6);
    let wave = FockWave::new(&fock, &modes, c0, &h, 1, 0).expect("one-particle sector");
    let gammas = GammaSet::dirac_pauli();
    let report = equivariance_test(&wave, 2000, 0.0, 1.9, 0.02, 11, &gammas).expect("ensemble");
    println!(
        "corpuscles: KS = {:.4} (critical {:.4}), excluded = {:.3}%, passed = {}",
        report.ks,
        report.ks_critical,
        100.0 * report.excluded_fraction,
        report.passed
    );

    // field picture: pair-mixing dynamics on a 2-variable grid
    let modes = build_mode_basis(&lattice, 1.0, 1).expect("mode basis");
    let rest = modes.find([0, 0, 0], Spin::Up).unwrap();
    let fock = build_fock_basis(vec![rest], vec![rest], 2).expect("fock basis");
    let grid = ConfigGrid::new(2, 7.0, 64);
    let basis = build_functional_basis(&fock, &grid).expect("functional basis");
    let h = build_mixing_hamiltonian(
        &fock,
        &modes,
        &[PairTerm { particle_mode: 0, antiparticle_mode: 0, lambda: C::new(0.1, 0.0) }],
    );
    let mut c0 = DVector::zeros(fock.dim());
    let amp = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    c0[fock.vacuum_index()] = amp;
    c0[fock.position(OccState { particles: 1, antiparticles: 1 }).unwrap()] = amp;
    let pipeline = CausalPipeline::new(&basis, &h, c0);
    let report = field_equivariance_test(&pipeline, 1500, 0.0, 1.2, 0.02, 5, 0).expect("ensemble");
    println!(
        "fields:     KS = {:.4} (critical {:.4}), excluded = {:.3}%, passed = {}",
        report.ks,
        report.ks_critical,
        100.0 * report.excluded_fraction,
        report.passed
    );
}
