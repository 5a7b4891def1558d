//! Acceptance gate: twelve release criteria, each printed as one
//! pass/fail line. The whole suite fails if any criterion fails.

use std::time::Instant;

use diracflow::causal::{
    build_functional_basis, field_equivariance_test, sector_effectivities, CausalPipeline,
    ConfigGrid,
};
use diracflow::fock::{
    build_fock_basis, build_free_hamiltonian, build_mixing_hamiltonian,
    antiparticle_density_expectation, evolve, FockState, OccState, PairTerm, Propagator,
};
use diracflow::gamma::GammaSet;
use diracflow::lattice::Lattice;
use diracflow::modes::{
    build_mode_basis, evaluate_mode, synthesize_field, Branch, ModeCoefficients, Spin,
};
use diracflow::multiwave::FockWave;
use diracflow::projection::{
    current, divergence_residual, divergence_residual_analytic, dj0_dt_analytic, extract_part,
    projection_kernel,
};
use diracflow::run::{run_scenario, SHIPPED_SCENARIOS};
use diracflow::scenario::Scenario;
use diracflow::trajectory::{corpuscle_current, equivariance_test, JointConfig};
use nalgebra::DVector;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn run(&mut self, number: usize, name: &str, body: impl FnOnce() -> Result<(), String>) {
        let start = Instant::now();
        let outcome = body();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {number:2}  PASS  ({secs:7.2} s)  {name}"),
            Err(why) => {
                println!("criterion {number:2}  FAIL  ({secs:7.2} s)  {name}: {why}");
                self.failures.push(format!("{number}: {name}: {why}"));
            }
        }
    }
}

fn check(ok: bool, why: impl Fn() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

/// gamma anticommutators exactly 2 g^{mu nu} 1 and the full plane-wave
/// Gram matrix (both branches, lattice quadrature) equal to the identity.
fn c1_clifford_and_gram() -> Result<(), String> {
    let g = GammaSet::dirac_pauli();
    let id = nalgebra::Matrix4::<C>::identity();
    for mu in 0..4 {
        for nu in 0..4 {
            let anti = g.upper(mu) * g.upper(nu) + g.upper(nu) * g.upper(mu);
            let expect = id * C::new(2.0 * g.metric(mu, nu), 0.0);
            let resid = (anti - expect).map(|z| z.norm()).max();
            check(resid <= 1e-10, || format!("anticommutator ({mu},{nu}) residual {resid}"))?;
        }
    }

    let lat = Lattice::line(2.0 * std::f64::consts::PI, 64);
    let modes = build_mode_basis(&lat, 1.0, 3).map_err(|e| e.to_string())?;
    let t = 0.3;
    // stack every mode of both branches into one function list
    let mut fns = Vec::new();
    for branch in [Branch::Particle, Branch::Antiparticle] {
        for mode in &modes.modes {
            let column: Vec<_> =
                lat.iter_coords().map(|(_, x)| evaluate_mode(mode, branch, x, t)).collect();
            fns.push(column);
        }
    }
    let w = lat.cell_volume();
    let mut worst = 0.0f64;
    for (i, fi) in fns.iter().enumerate() {
        for (j, fj) in fns.iter().enumerate() {
            let overlap: C = fi.iter().zip(fj).map(|(a, b)| a.dotc(b)).sum::<C>() * w;
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((overlap - C::new(expect, 0.0)).norm());
        }
    }
    check(worst <= 1e-10, || format!("Gram deviation from identity {worst}"))
}

/// Projection kernels: idempotence, mutual annihilation of the two
/// branches, and completeness on band-limited fields, N = 64, k_cut = 5.
fn c2_projection_suite() -> Result<(), String> {
    let lat = Lattice::line(2.0 * std::f64::consts::PI, 64);
    let modes = build_mode_basis(&lat, 1.0, 5).map_err(|e| e.to_string())?;
    let kp = projection_kernel(&modes, Branch::Particle);
    let ka = projection_kernel(&modes, Branch::Antiparticle);

    let max_diff = |x: &diracflow::modes::SpinorField, y: &diracflow::modes::SpinorField| {
        x.values
            .iter()
            .zip(&y.values)
            .map(|(a, b)| (a - b).map(|z| z.norm()).max())
            .fold(0.0f64, f64::max)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut rand_entries = |n: usize| -> Vec<(usize, C)> {
        (0..n)
            .map(|_| {
                (
                    rng.gen_range(0..modes.modes.len()),
                    C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                )
            })
            .collect()
    };
    for _ in 0..5 {
        let coeffs = ModeCoefficients { b: rand_entries(4), dstar: rand_entries(4) };
        let field = synthesize_field(&modes, &coeffs, 0.45);
        let p_f = kp.apply(&field);
        let a_f = ka.apply(&field);

        // idempotence on each extracted branch
        let idem_p = max_diff(&kp.apply(&p_f), &p_f);
        let idem_a = max_diff(&ka.apply(&a_f), &a_f);
        check(idem_p <= 1e-10 && idem_a <= 1e-10, || {
            format!("idempotence residuals {idem_p}, {idem_a}")
        })?;

        // mutual annihilation: A P = P A = 0
        let ap = ka.apply(&p_f).max_abs();
        let pa = kp.apply(&a_f).max_abs();
        check(ap <= 1e-10 && pa <= 1e-10, || {
            format!("mutual annihilation residuals {ap}, {pa}")
        })?;

        // band-limited completeness: P + A restores the field
        let mut sum = p_f.clone();
        for (v, w) in sum.values.iter_mut().zip(&a_f.values) {
            *v += w;
        }
        let complete = max_diff(&sum, &field);
        check(complete <= 1e-10, || format!("completeness residual {complete}"))?;
        let part = extract_part(&field, &kp);
        check(!part.out_of_band, || {
            format!("in-band field flagged out of band ({})", part.completeness_residual)
        })?;
    }
    Ok(())
}

/// Continuity of the spinor current: the spectral divergence with the
/// analytic time derivative is roundoff small, and the centered
/// finite-difference version converges at second order in the time step.
fn c3_current_conservation() -> Result<(), String> {
    let lat = Lattice::line(2.0 * std::f64::consts::PI, 64);
    let modes = build_mode_basis(&lat, 1.0, 3).map_err(|e| e.to_string())?;
    let m1 = modes.find([1, 0, 0], Spin::Up).unwrap();
    let m2 = modes.find([-2, 0, 0], Spin::Down).unwrap();
    let m3 = modes.find([3, 0, 0], Spin::Up).unwrap();
    let coeffs = ModeCoefficients {
        b: vec![(m1, C::new(0.7, 0.2)), (m2, C::new(-0.3, 0.4))],
        dstar: vec![(m3, C::new(0.25, -0.55))],
    };
    let g = GammaSet::dirac_pauli();
    let t = 0.8;

    let field = synthesize_field(&modes, &coeffs, t);
    let cur = current(&field, &g).map_err(|e| e.to_string())?;
    let dj0 = dj0_dt_analytic(&modes, &coeffs, t);
    let analytic = divergence_residual_analytic(&cur, &dj0);
    check(analytic <= 1e-8, || format!("analytic divergence residual {analytic}"))?;

    let fd_residual = |dt: f64| -> Result<f64, String> {
        let fields: Vec<_> = [-1.0f64, 0.0, 1.0]
            .iter()
            .map(|s| current(&synthesize_field(&modes, &coeffs, t + s * dt), &g))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        Ok(divergence_residual(&fields, dt))
    };
    let coarse = fd_residual(0.02)?;
    let fine = fd_residual(0.01)?;
    let ratio = coarse / fine;
    // second order: halving dt divides the residual by 4, factor-2 window
    check((2.0..=8.0).contains(&ratio), || {
        format!("Richardson ratio {ratio} outside [2, 8] ({coarse} vs {fine})")
    })
}

/// One-positron reduction: the multiparticle corpuscle current of an
/// (n_P, n_A) = (0, 1) state equals the spinor-field current of the
/// conjugate-coefficient antiparticle field at random points.
fn c4_one_positron_reduction() -> Result<(), String> {
    let lat = Lattice::line(2.0 * std::f64::consts::PI, 64);
    let modes = build_mode_basis(&lat, 1.0, 3).map_err(|e| e.to_string())?;
    let g = GammaSet::dirac_pauli();
    let ma1 = modes.find([1, 0, 0], Spin::Down).unwrap();
    let ma2 = modes.find([-2, 0, 0], Spin::Up).unwrap();
    let (c1, c2) = (C::new(0.6, -0.3), C::new(-0.2, 0.7));

    let fock = build_fock_basis(vec![], vec![ma1, ma2], 1).map_err(|e| e.to_string())?;
    let h = build_free_hamiltonian(&fock, &modes);
    let mut coeffs = DVector::zeros(fock.dim());
    coeffs[fock.position(OccState { particles: 0, antiparticles: 1 }).unwrap()] = c1;
    coeffs[fock.position(OccState { particles: 0, antiparticles: 2 }).unwrap()] = c2;
    let wave = FockWave::new(&fock, &modes, coeffs, &h, 0, 1).map_err(|e| e.to_string())?;

    let t = 0.7;
    let field = synthesize_field(
        &modes,
        &ModeCoefficients::antiparticle(vec![(ma1, c1.conj()), (ma2, c2.conj())]),
        t,
    );
    let cur = current(&field, &g).map_err(|e| e.to_string())?;

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let flat = rng.gen_range(0..lat.num_points());
        let x = lat.coord(lat.unflatten(flat));
        let config = JointConfig { particles: vec![], antiparticles: vec![x] };
        let j = corpuscle_current(&wave, 0, &config, t, &g).map_err(|e| e.to_string())?;
        for mu in 0..4 {
            worst = worst.max((j[mu] - cur.values[flat][mu]).abs());
        }
    }
    check(worst <= 1e-10, || format!("max current mismatch {worst}"))
}

/// Positron density two ways: ladder-operator expectation and the
/// one-antiparticle wave-function modulus, for random superpositions.
fn c5_positron_density_cross_check() -> Result<(), String> {
    let lat = Lattice::line(2.0 * std::f64::consts::PI, 64);
    let modes = build_mode_basis(&lat, 1.0, 2).map_err(|e| e.to_string())?;
    let ma: Vec<usize> = [
        modes.find([0, 0, 0], Spin::Up).unwrap(),
        modes.find([1, 0, 0], Spin::Down).unwrap(),
        modes.find([-2, 0, 0], Spin::Up).unwrap(),
    ]
    .to_vec();
    let fock = build_fock_basis(vec![], vec![ma[0], ma[1], ma[2]], 1).map_err(|e| e.to_string())?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let mut coeffs = DVector::zeros(fock.dim());
        for slot in 0..3 {
            let pos = fock.position(OccState { particles: 0, antiparticles: 1 << slot }).unwrap();
            coeffs[pos] = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let state = FockState { coeffs, t: 0.0 }.normalized();
        for _ in 0..4 {
            let x = [rng.gen_range(0.0..lat.l), 0.0, 0.0];
            let t = rng.gen_range(0.0..2.0);
            let (op_route, wave_route) =
                antiparticle_density_expectation(&state, &fock, &modes, x, t)
                    .map_err(|e| e.to_string())?;
            worst = worst.max((op_route - wave_route).abs());
        }
    }
    check(worst <= 1e-10, || format!("max route disagreement {worst}"))
}

/// Fock dynamics: exact unitarity, constant mode amplitudes under the
/// free Hamiltonian over [0, 10/E_min], and the analytic Rabi formula
/// for the vacuum-pair two-level system under pair mixing.
fn c6_fock_dynamics() -> Result<(), String> {
    let lat = Lattice::line(2.0 * std::f64::consts::PI, 16);
    let modes = build_mode_basis(&lat, 1.0, 1).map_err(|e| e.to_string())?;
    let rest = modes.find([0, 0, 0], Spin::Up).unwrap();
    let fock = build_fock_basis(vec![rest], vec![rest], 2).map_err(|e| e.to_string())?;

    // free evolution: unitary with every |c_K| constant over [0, 10/E_min]
    let h_free = build_free_hamiltonian(&fock, &modes);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut c0 = DVector::zeros(fock.dim());
    for k in 0..fock.dim() {
        c0[k] = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let state0 = FockState { coeffs: c0, t: 0.0 }.normalized();
    let e_min = modes.modes.iter().map(|m| m.energy).fold(f64::INFINITY, f64::min);
    let prop = Propagator::new(&h_free);
    let mut norm_drift = 0.0f64;
    let mut modulus_drift = 0.0f64;
    for i in 0..=40 {
        let t = i as f64 * (10.0 / e_min) / 40.0;
        let c = prop.coefficients_at(&state0.coeffs, t);
        norm_drift = norm_drift.max((c.norm() - 1.0).abs());
        for k in 0..fock.dim() {
            modulus_drift = modulus_drift.max((c[k].norm() - state0.coeffs[k].norm()).abs());
        }
    }
    check(norm_drift <= 1e-12, || format!("free norm drift {norm_drift}"))?;
    check(modulus_drift <= 1e-12, || format!("free |c_K| drift {modulus_drift}"))?;

    // pair mixing: vacuum and pair form a detuned two-level system
    let lambda = 0.1;
    let h_mix = build_mixing_hamiltonian(
        &fock,
        &modes,
        &[PairTerm { particle_mode: 0, antiparticle_mode: 0, lambda: C::new(lambda, 0.0) }],
    );
    let delta = 1.0; // half the vacuum-pair energy gap
    let omega = (lambda * lambda + delta * delta).sqrt();
    let vacuum = FockState::vacuum(&fock);
    let mut rabi_err = 0.0f64;
    let mut unitary_err = 0.0f64;
    for i in 0..=64 {
        let t = i as f64 * 0.1;
        let state = evolve(&vacuum, &h_mix, t);
        unitary_err = unitary_err.max((state.norm() - 1.0).abs());
        let p_pair = state.sector_population(&fock, 1, 1);
        let analytic = (lambda / omega * (omega * t).sin()).powi(2);
        rabi_err = rabi_err.max((p_pair - analytic).abs());
    }
    check(unitary_err <= 1e-12, || format!("mixing norm drift {unitary_err}"))?;
    check(rabi_err <= 1e-10, || format!("Rabi formula error {rabi_err}"))
}

/// First-quantized equivariance: a density-sampled ensemble of 10^4
/// guided trajectories still matches |psi|^2 a quarter beat later.
fn c7_corpuscle_equivariance() -> Result<(), String> {
    let lat = Lattice::line(2.0 * std::f64::consts::PI, 64);
    let modes = build_mode_basis(&lat, 1.0, 2).map_err(|e| e.to_string())?;
    let g = GammaSet::dirac_pauli();
    let m1 = modes.find([1, 0, 0], Spin::Up).unwrap();
    let m2 = modes.find([2, 0, 0], Spin::Up).unwrap();
    let fock = build_fock_basis(vec![m1, m2], vec![], 1).map_err(|e| e.to_string())?;
    let h = build_free_hamiltonian(&fock, &modes);
    let amp = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut coeffs = DVector::zeros(fock.dim());
    coeffs[fock.position(OccState { particles: 1, antiparticles: 0 }).unwrap()] = amp;
    coeffs[fock.position(OccState { particles: 2, antiparticles: 0 }).unwrap()] = amp;
    let wave = FockWave::new(&fock, &modes, coeffs, &h, 1, 0).map_err(|e| e.to_string())?;

    let beat = 2.0 * std::f64::consts::PI
        / (modes.modes[m2].energy - modes.modes[m1].energy);
    let report = equivariance_test(&wave, 10_000, 0.0, beat / 4.0, 0.02, 7, &g)
        .map_err(|e| e.to_string())?;
    check(report.ks < report.ks_critical, || {
        format!("KS {} at critical {}", report.ks, report.ks_critical)
    })?;
    check(report.excluded_fraction < 0.01, || {
        format!("excluded fraction {}", report.excluded_fraction)
    })
}

/// Field pipeline with a sector-diagonal Hamiltonian: the source J is
/// identified as zero, the correction field and offset vanish, and the
/// corrected velocity equals the drift bitwise.
fn c8_pipeline_j_zero_branch() -> Result<(), String> {
    let lat = Lattice::line(2.0 * std::f64::consts::PI, 16);
    let modes = build_mode_basis(&lat, 1.0, 1).map_err(|e| e.to_string())?;
    let rest = modes.find([0, 0, 0], Spin::Up).unwrap();
    let fock = build_fock_basis(vec![rest], vec![rest], 2).map_err(|e| e.to_string())?;
    let grid = ConfigGrid::new(2, 7.0, 64);
    let basis = build_functional_basis(&fock, &grid).map_err(|e| e.to_string())?;
    let h = build_free_hamiltonian(&fock, &modes);
    let mut c0 = DVector::zeros(fock.dim());
    c0[fock.position(OccState { particles: 1, antiparticles: 1 }).unwrap()] = C::new(1.0, 0.0);
    let pipe = CausalPipeline::new(&basis, &h, c0);
    let state = pipe.state_at(0.7).map_err(|e| e.to_string())?;

    check(state.j_is_zero, || "source J not identified as zero".into())?;
    check(state.e_offset.iter().all(|&e| e == 0.0), || format!("offset {:?}", state.e_offset))?;
    for axis in 0..grid.n {
        let e_max = state.e_field[axis].iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        check(e_max == 0.0, || format!("axis {axis}: correction field max {e_max}"))?;
    }
    let u = state.drift_u();
    let v = state.velocity_v();
    let mut worst = 0.0f64;
    for axis in 0..grid.n {
        for (a, b) in v[axis].iter().zip(u[axis].iter()) {
            worst = worst.max((a - b).abs());
        }
    }
    check(worst <= 1e-10, || format!("max |v - u| = {worst}"))
}

/// Field pipeline with pair mixing on an n = 2, G = 128 grid: charge-free
/// source, spectral Poisson solve, continuity with the corrected
/// velocity, and the mean-velocity identity from coefficient dynamics.
fn c9_pipeline_j_nonzero_branch() -> Result<(), String> {
    let lat = Lattice::line(2.0 * std::f64::consts::PI, 16);
    let modes = build_mode_basis(&lat, 1.0, 1).map_err(|e| e.to_string())?;
    let rest = modes.find([0, 0, 0], Spin::Up).unwrap();
    let fock = build_fock_basis(vec![rest], vec![rest], 2).map_err(|e| e.to_string())?;
    let grid = ConfigGrid::new(2, 7.0, 128);
    let basis = build_functional_basis(&fock, &grid).map_err(|e| e.to_string())?;
    let h = build_mixing_hamiltonian(
        &fock,
        &modes,
        &[PairTerm { particle_mode: 0, antiparticle_mode: 0, lambda: C::new(0.1, 0.0) }],
    );
    let amp = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut c0 = DVector::zeros(fock.dim());
    c0[fock.vacuum_index()] = amp;
    c0[fock.position(OccState { particles: 1, antiparticles: 1 }).unwrap()] = amp;
    let pipe = CausalPipeline::new(&basis, &h, c0);
    let state = pipe.state_at(0.8).map_err(|e| e.to_string())?;

    check(!state.j_is_zero, || "mixing dynamics failed to source J".into())?;
    check(state.j_quadrature.abs() <= 1e-6, || {
        format!("quadrature of J = {}", state.j_quadrature)
    })?;
    let j_max = state.source_j.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    check(state.poisson_residual <= 1e-8 * j_max, || {
        format!("Poisson residual {} vs source scale {}", state.poisson_residual, j_max)
    })?;
    let cont = state.continuity_residual(&grid);
    check(cont <= 1e-6, || format!("continuity residual {cont}"))?;
    let lhs = state.mean_velocity(&grid);
    let rhs = pipe.mean_velocity_from_coefficients(0.8);
    let mut worst = 0.0f64;
    for axis in 0..grid.n {
        worst = worst.max((lhs[axis] - rhs[axis]).abs());
    }
    check(worst <= 1e-6, || format!("mean-velocity mismatch {worst}"))
}

/// Configuration-space equivariance: a rho-sampled ensemble of 10^4
/// field trajectories under the mixing scenario still matches the
/// marginal of rho at the later time.
fn c10_field_equivariance() -> Result<(), String> {
    let lat = Lattice::line(2.0 * std::f64::consts::PI, 16);
    let modes = build_mode_basis(&lat, 1.0, 1).map_err(|e| e.to_string())?;
    let rest = modes.find([0, 0, 0], Spin::Up).unwrap();
    let fock = build_fock_basis(vec![rest], vec![rest], 2).map_err(|e| e.to_string())?;
    let grid = ConfigGrid::new(2, 7.0, 128);
    let basis = build_functional_basis(&fock, &grid).map_err(|e| e.to_string())?;
    let h = build_mixing_hamiltonian(
        &fock,
        &modes,
        &[PairTerm { particle_mode: 0, antiparticle_mode: 0, lambda: C::new(0.1, 0.0) }],
    );
    let amp = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut c0 = DVector::zeros(fock.dim());
    c0[fock.vacuum_index()] = amp;
    c0[fock.position(OccState { particles: 1, antiparticles: 1 }).unwrap()] = amp;
    let pipe = CausalPipeline::new(&basis, &h, c0);

    let report = field_equivariance_test(&pipe, 10_000, 0.0, 1.2, 0.02, 10, 0)
        .map_err(|e| e.to_string())?;
    check(report.ks < report.ks_critical, || {
        format!("KS {} at critical {}", report.ks, report.ks_critical)
    })?;
    check(report.excluded_fraction < 0.01, || {
        format!("excluded fraction {}", report.excluded_fraction)
    })
}

/// Effectivities: unit sum wherever defined, indicator values on pure
/// sectors, and analytic tail dominance of the higher occupation.
fn c11_effectivity() -> Result<(), String> {
    let lat = Lattice::line(2.0 * std::f64::consts::PI, 16);
    let modes = build_mode_basis(&lat, 1.0, 1).map_err(|e| e.to_string())?;
    let rest = modes.find([0, 0, 0], Spin::Up).unwrap();
    let fock = build_fock_basis(vec![rest], vec![rest], 2).map_err(|e| e.to_string())?;
    let grid = ConfigGrid::new(2, 7.0, 32);
    let basis = build_functional_basis(&fock, &grid).map_err(|e| e.to_string())?;

    // unit sum for a spread-out superposition
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let mut c = DVector::zeros(fock.dim());
        for k in 0..fock.dim() {
            c[k] = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let point = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let eff = sector_effectivities(&basis, &c, &point).map_err(|e| e.to_string())?;
        let sum: f64 = eff.iter().map(|e| e.weight).sum();
        check((sum - 1.0).abs() <= 1e-12, || format!("sum {sum} at {point:?}"))?;
    }

    // pure sector: indicator values away from the amplitude's node plane
    let mut pure = DVector::zeros(fock.dim());
    pure[fock.position(OccState { particles: 1, antiparticles: 0 }).unwrap()] = C::new(1.0, 0.0);
    let eff = sector_effectivities(&basis, &pure, &[0.6, 0.3]).map_err(|e| e.to_string())?;
    for e in &eff {
        let expected = if e.sector == (1, 0) { 1.0 } else { 0.0 };
        check((e.weight - expected).abs() <= 1e-12, || {
            format!("sector {:?} weight {}", e.sector, e.weight)
        })?;
    }

    // tail dominance of (|0> + 2 b^dag|0>)/sqrt(5) against the analytic
    // h1/h0 weight ratio 8 phi^2 : 1
    let norm = 1.0 / 5.0f64.sqrt();
    let mut c = DVector::zeros(fock.dim());
    c[fock.vacuum_index()] = C::new(norm, 0.0);
    c[fock.position(OccState { particles: 1, antiparticles: 0 }).unwrap()] =
        C::new(2.0 * norm, 0.0);
    for &phi1 in &[4.0f64, -4.0, 5.5] {
        let eff = sector_effectivities(&basis, &c, &[phi1, 0.2]).map_err(|e| e.to_string())?;
        let one = eff.iter().find(|e| e.sector == (1, 0)).unwrap().weight;
        let analytic = 8.0 * phi1 * phi1 / (1.0 + 8.0 * phi1 * phi1);
        check((one - analytic).abs() <= 1e-12, || {
            format!("phi1 = {phi1}: weight {one} vs analytic {analytic}")
        })?;
        check(one > 0.99, || format!("phi1 = {phi1}: weight {one} not above 0.99"))?;
    }
    Ok(())
}

/// Determinism: every shipped scenario, run twice with its own seed,
/// produces byte-identical numeric artifacts.
fn c12_determinism() -> Result<(), String> {
    for (name, text) in SHIPPED_SCENARIOS {
        let scenario = Scenario::from_json(text).map_err(|e| e.to_string())?;
        let mut manifests = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let report = run_scenario(&scenario, dir.path()).map_err(|e| e.to_string())?;
            check(report.passed, || format!("scenario {name} failed its invariants"))?;
            let mut manifest: Vec<(String, String)> = report
                .artifacts
                .iter()
                .map(|a| (a.file.clone(), a.sha256.clone()))
                .collect();
            manifest.sort();
            manifests.push(manifest);
        }
        check(manifests[0] == manifests[1], || {
            format!("scenario {name}: artifact hashes differ between runs")
        })?;
    }
    Ok(())
}

#[test]
fn acceptance_gate() {
    let mut gate = Gate { failures: Vec::new() };
    gate.run(1, "Clifford algebra and mode orthonormality", c1_clifford_and_gram);
    gate.run(2, "projection kernel suite (N=64, k_cut=5)", c2_projection_suite);
    gate.run(3, "current conservation, spectral + Richardson", c3_current_conservation);
    gate.run(4, "one-positron reduction to the field current", c4_one_positron_reduction);
    gate.run(5, "positron density, operator vs wave function", c5_positron_density_cross_check);
    gate.run(6, "Fock dynamics: unitarity, free moduli, Rabi", c6_fock_dynamics);
    gate.run(7, "corpuscle equivariance, M = 10^4", c7_corpuscle_equivariance);
    gate.run(8, "causal pipeline, J = 0 branch", c8_pipeline_j_zero_branch);
    gate.run(9, "causal pipeline, J != 0 branch (G = 128)", c9_pipeline_j_nonzero_branch);
    gate.run(10, "field equivariance, M = 10^4", c10_field_equivariance);
    gate.run(11, "sector effectivities and tail dominance", c11_effectivity);
    gate.run(12, "shipped-scenario determinism", c12_determinism);
    assert!(gate.failures.is_empty(), "failed criteria:\n{}", gate.failures.join("\n"));
}
