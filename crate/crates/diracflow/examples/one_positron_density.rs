//! The positron density of a one-antiparticle state computed two ways:
//! through the ladder-operator expectation and through the modulus of
//! the one-positron wave function. The two routes agree pointwise.

use diracflow::fock::{antiparticle_density_expectation, build_fock_basis, FockState, OccState};
use diracflow::lattice::Lattice;
use diracflow::modes::{build_mode_basis, Spin};
use nalgebra::DVector;
use num_complex::Complex64 as C;

fn main() {
    let lattice = Lattice::line(2.0 * std::f64::consts::PI, 16);
    let modes = build_mode_basis(&lattice, 1.0, 1).expect("mode basis");
    let m1 = modes.find([1, 0, 0], Spin::Up).unwrap();
    let m2 = modes.find([-1, 0, 0], Spin::Down).unwrap();
    let fock = build_fock_basis(vec![], vec![m1, m2], 1).expect("fock basis");

    // superposition of two positron modes: an interference pattern
    let mut coeffs = DVector::zeros(fock.dim());
    coeffs[fock.position(OccState { particles: 0, antiparticles: 1 }).unwrap()] =
        C::new(0.8, 0.0);
    coeffs[fock.position(OccState { particles: 0, antiparticles: 2 }).unwrap()] =
        C::new(0.0, 0.6);
    let state = FockState { coeffs, t: 0.0 };

    println!("{:>8} {:>14} {:>14} {:>10}", "x", "operator", "wavefunction", "error");
    for i in 0..8 {
        let x = [i as f64 * lattice.l / 8.0, 0.0, 0.0];
        let (op, wf) =
            antiparticle_density_expectation(&state, &fock, &modes, x, 0.4).expect("density");
        println!("{:8.4} {op:14.10} {wf:14.10} {:10.2e}", x[0], (op - wf).abs());
    }
}
