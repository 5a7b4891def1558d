//! Sector effectivities as soft collapse indicators: far out on the
//! particle axis the one-particle sector dominates the field amplitude,
//! approaching effectivity 1 even when the state assigns it only part of
//! the total weight.

use diracflow::causal::{build_functional_basis, sector_effectivities, ConfigGrid};
use diracflow::fock::{build_fock_basis, OccState};
use diracflow::lattice::Lattice;
use diracflow::modes::{build_mode_basis, Spin};
use nalgebra::DVector;
use num_complex::Complex64 as C;

fn main() {
    let lattice = Lattice::line(2.0 * std::f64::consts::PI, 16);
    let modes = build_mode_basis(&lattice, 1.0, 1).expect("mode basis");
    let rest = modes.find([0, 0, 0], Spin::Up).unwrap();
    let fock = build_fock_basis(vec![rest], vec![], 1).expect("fock basis");
    let grid = ConfigGrid::new(1, 7.0, 64);
    let basis = build_functional_basis(&fock, &grid).expect("functional basis");

    // (|0> + 2 b^dag |0>)/sqrt(5): 20% vacuum, 80% one-particle weight
    let norm = 1.0 / 5.0f64.sqrt();
    let mut c = DVector::zeros(fock.dim());
    c[fock.vacuum_index()] = C::new(norm, 0.0);
    c[fock.position(OccState { particles: 1, antiparticles: 0 }).unwrap()] =
        C::new(2.0 * norm, 0.0);

    println!("{:>6} {:>12} {:>12} {:>12}", "phi", "e_vacuum", "e_particle", "analytic");
    for i in 0..=10 {
        let phi = i as f64 * 0.5;
        let eff = sector_effectivities(&basis, &c, &[phi]).expect("effectivities");
        let vac = eff.iter().find(|e| e.sector == (0, 0)).unwrap().weight;
        let one = eff.iter().find(|e| e.sector == (1, 0)).unwrap().weight;
        // h1/h0 ratio: |2 h1|^2 / (|h0|^2 + |2 h1|^2) with h1 = sqrt(2) phi h0
        let analytic = 8.0 * phi * phi / (1.0 + 8.0 * phi * phi);
        println!("{phi:6.2} {vac:12.8} {one:12.8} {analytic:12.8}");
    }
}
