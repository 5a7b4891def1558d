//! A single positron guided by a plane-wave mode: its Bohmian velocity
//! is constant and equals the group velocity k/E of the mode.

use diracflow::fock::{build_fock_basis, build_free_hamiltonian, FockState, OccState};
use diracflow::gamma::GammaSet;
use diracflow::lattice::Lattice;
use diracflow::modes::{build_mode_basis, Spin};
use diracflow::multiwave::FockWave;
use diracflow::trajectory::{integrate, node_epsilon, JointConfig};

fn main() {
    let lattice = Lattice::line(2.0 * std::f64::consts::PI, 16);
    let modes = build_mode_basis(&lattice, 1.0, 1).expect("mode basis");
    let moving = modes.find([1, 0, 0], Spin::Up).expect("k = 1 mode");
    let fock = build_fock_basis(vec![], vec![moving], 1).expect("fock basis");
    let h = build_free_hamiltonian(&fock, &modes);

    let c0 = FockState::from_occupation(&fock, OccState { particles: 0, antiparticles: 1 });
    let wave = FockWave::new(&fock, &modes, c0.coeffs, &h, 0, 1).expect("one-positron sector");

    let gammas = GammaSet::dirac_pauli();
    let eps = node_epsilon(&wave, 0.0, &gammas).expect("node threshold");
    let start = JointConfig::single_antiparticle([1.0, 0.0, 0.0]);
    let trajectory = integrate(&wave, &start, 0.0, 2.0, 0.01, &gammas, eps).expect("integrate");

    let mode = &modes.modes[moving];
    let expected = mode.k[0] / mode.energy;
    println!("mode k = {:.4}, E = {:.4}, group velocity = {:.6}", mode.k[0], mode.energy, expected);
    println!("status: {:?}", trajectory.status);
    for step in trajectory.steps.iter().step_by(50) {
        println!("t = {:5.2}  x = {:8.5}  j0 = {:.3e}", step.t, step.config.slot(0)[0], step.j0[0]);
    }
    let x1 = trajectory.last().config.slot(0)[0];
    let measured = (x1 - 1.0) / 2.0;
    println!("measured velocity = {measured:.6} (error {:.2e})", (measured - expected).abs());
}
