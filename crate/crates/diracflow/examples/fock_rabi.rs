//! Vacuum under a pair-mixing Hamiltonian: the vacuum and the pair state
//! form a two-level system whose populations follow the analytic Rabi
//! formula P(t) = (lambda^2 / Omega^2) sin^2(Omega t).

use diracflow::fock::{build_fock_basis, build_mixing_hamiltonian, evolve, FockState, PairTerm};
use diracflow::lattice::Lattice;
use diracflow::modes::{build_mode_basis, Spin};
use num_complex::Complex64 as C;

fn main() {
    let lattice = Lattice::line(2.0 * std::f64::consts::PI, 16);
    let modes = build_mode_basis(&lattice, 1.0, 1).expect("mode basis");
    let rest = modes.find([0, 0, 0], Spin::Up).unwrap();
    let fock = build_fock_basis(vec![rest], vec![rest], 2).expect("fock basis");

    let lambda = 0.1;
    let h = build_mixing_hamiltonian(
        &fock,
        &modes,
        &[PairTerm { particle_mode: 0, antiparticle_mode: 0, lambda: C::new(lambda, 0.0) }],
    );

    // energies 0 (vacuum) and 2 (pair): detuning delta = 1 in the
    // rotating frame, Rabi frequency Omega = sqrt(lambda^2 + delta^2)
    let delta = 1.0;
    let omega = (lambda * lambda + delta * delta).sqrt();
    let vacuum = FockState::vacuum(&fock);

    println!("{:>6} {:>12} {:>12} {:>10}", "t", "P_pair", "analytic", "error");
    for i in 0..=10 {
        let t = i as f64 * 0.5;
        let state = evolve(&vacuum, &h, t);
        let p_pair = state.sector_population(&fock, 1, 1);
        let analytic = (lambda / omega * (omega * t).sin()).powi(2);
        println!("{t:6.2} {p_pair:12.8} {analytic:12.8} {:10.2e}", (p_pair - analytic).abs());
    }
}
