//! Per-corpuscle currents of a two-particle state: both slots of an
//! (orthogonal-mode) two-particle plane-wave state share the velocity
//! (k1 + k2)/(E1 + E2), because each slot's current carries the other
//! mode's spinor contraction m/(E V) as a spectator weight.

use diracflow::fock::{build_fock_basis, build_free_hamiltonian, FockState, OccState};
use diracflow::gamma::GammaSet;
use diracflow::lattice::Lattice;
use diracflow::modes::{build_mode_basis, Spin};
use diracflow::multiwave::{corpuscle_currents, FockWave, MultiWave};

fn main() {
    let lattice = Lattice::line(2.0 * std::f64::consts::PI, 16);
    let modes = build_mode_basis(&lattice, 1.0, 2).expect("mode basis");
    let m1 = modes.find([1, 0, 0], Spin::Up).unwrap();
    let m2 = modes.find([2, 0, 0], Spin::Down).unwrap();
    let fock = build_fock_basis(vec![m1, m2], vec![], 2).expect("fock basis");
    let h = build_free_hamiltonian(&fock, &modes);

    let c0 = FockState::from_occupation(&fock, OccState { particles: 0b11, antiparticles: 0 });
    let wave = FockWave::new(&fock, &modes, c0.coeffs, &h, 2, 0).expect("two-particle sector");

    let psi = wave
        .evaluate(&[[0.7, 0.0, 0.0], [2.1, 0.0, 0.0]], &[], 0.5)
        .expect("joint wave function");
    let gammas = GammaSet::dirac_pauli();
    let currents = corpuscle_currents(&psi, &gammas, 2, 0).expect("real currents");

    let (e1, e2) = (modes.modes[m1].energy, modes.modes[m2].energy);
    let (k1, k2) = (modes.modes[m1].k[0], modes.modes[m2].k[0]);
    println!("modes: k1 = {k1:.4} (E1 = {e1:.4}), k2 = {k2:.4} (E2 = {e2:.4})");
    println!("shared velocity (k1 + k2)/(E1 + E2) = {:.6}", (k1 + k2) / (e1 + e2));
    for slot in 0..2 {
        let v = currents.j[slot][0] / currents.j0[slot];
        println!(
            "slot {slot}: j0 = {:+.4e}, v = {v:.6}",
            currents.j0[slot]
        );
    }
}
