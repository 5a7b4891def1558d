//! A field-configuration trajectory under a free cross-sector beat: the
//! velocity field is periodic with the sector beat 2 pi / Delta E, so
//! the configuration returns to its start after one beat.

use diracflow::causal::{build_functional_basis, integrate_field, CausalPipeline, ConfigGrid};
use diracflow::fock::{build_fock_basis, build_free_hamiltonian, OccState};
use diracflow::lattice::Lattice;
use diracflow::modes::{build_mode_basis, Spin};
use nalgebra::DVector;
use num_complex::Complex64 as C;

fn main() {
    let lattice = Lattice::line(2.0 * std::f64::consts::PI, 16);
    let modes = build_mode_basis(&lattice, 1.0, 1).expect("mode basis");
    let rest = modes.find([0, 0, 0], Spin::Up).unwrap();
    let fock = build_fock_basis(vec![rest], vec![rest], 2).expect("fock basis");
    let grid = ConfigGrid::new(2, 7.0, 64);
    let basis = build_functional_basis(&fock, &grid).expect("functional basis");
    let h = build_free_hamiltonian(&fock, &modes);

    let mut c0 = DVector::zeros(fock.dim());
    let amp = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    c0[fock.vacuum_index()] = amp;
    c0[fock.position(OccState { particles: 1, antiparticles: 1 }).unwrap()] = amp;
    let pipeline = CausalPipeline::new(&basis, &h, c0);

    // vacuum energy 0, pair energy 2: beat period 2 pi / 2 = pi
    let beat = std::f64::consts::PI;
    let phi0 = [0.9, 0.6];
    let trajectory =
        integrate_field(&pipeline, &phi0, 0.0, beat, 0.01).expect("field trajectory");
    println!("status: {:?}", trajectory.status);
    for step in trajectory.steps.iter().step_by(40) {
        println!(
            "t = {:5.3}  phi = ({:+.5}, {:+.5})  rho = {:.4e}",
            step.t, step.phi[0], step.phi[1], step.rho
        );
    }
    let end = &trajectory.steps.last().unwrap().phi;
    println!(
        "return error after one beat: ({:.2e}, {:.2e})",
        (end[0] - phi0[0]).abs(),
        (end[1] - phi0[1]).abs()
    );
}
