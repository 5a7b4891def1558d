//! The causal-field pipeline on a 2-variable configuration grid: build
//! the density, the drift flux, the source J, and the Poisson-sourced
//! correction that restores the continuity equation.

use diracflow::causal::{build_functional_basis, CausalPipeline, ConfigGrid};
use diracflow::fock::{build_fock_basis, build_mixing_hamiltonian, OccState, PairTerm};
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

    let h = build_mixing_hamiltonian(
        &fock,
        &modes,
        &[PairTerm { particle_mode: 0, antiparticle_mode: 0, lambda: C::new(0.1, 0.0) }],
    );

    // (|0> + b^dag d^dag |0>)/sqrt(2): a cross-sector beat
    let mut c0 = DVector::zeros(fock.dim());
    let amp = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    c0[fock.vacuum_index()] = amp;
    c0[fock.position(OccState { particles: 1, antiparticles: 1 }).unwrap()] = amp;

    let pipeline = CausalPipeline::new(&basis, &h, c0);
    println!("{:>5} {:>11} {:>12} {:>12} {:>12}", "t", "max |J|", "|int J|", "poisson", "continuity");
    for i in 0..6 {
        let t = 0.4 + i as f64 * 0.4;
        let state = pipeline.state_at(t).expect("pipeline state");
        let j_max = state.source_j.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        println!(
            "{t:5.2} {j_max:11.4e} {:12.4e} {:12.4e} {:12.4e}",
            state.j_quadrature.abs(),
            state.poisson_residual,
            state.continuity_residual(&grid)
        );
    }

    let t = 1.2;
    let state = pipeline.state_at(t).expect("pipeline state");
    let mean_v = state.mean_velocity(&grid);
    let oracle = pipeline.mean_velocity_from_coefficients(t);
    println!("\nmean velocity at t = {t}:");
    for a in 0..2 {
        println!(
            "  axis {a}: quadrature of rho v = {:+.8e}, coefficient dynamics = {:+.8e}",
            mean_v[a], oracle[a]
        );
    }
}
