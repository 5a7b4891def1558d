//! Particle/antiparticle projection kernels, field splitting, Dirac
//! currents, and conservation diagnostics.
//!
//! Kernels are kept in factored mode-sum form: applying
//! Omega(x,x') = sum_k w_k(x) w_k^dag(x') costs O(modes * N) instead of
//! materializing an N^2 block matrix.

use crate::error::{Error, Result};
use crate::gamma::GammaSet;
use crate::lattice::Lattice;
use crate::modes::{evaluate_mode, Branch, ModeBasis, SpinorField};
use nalgebra::{DMatrix, Vector4};
use num_complex::Complex64;

type C = Complex64;

/// Relative completeness residual above which `extract_part` flags
/// out-of-band content.
pub const OUT_OF_BAND_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ProjectionKernel {
    pub branch: Branch,
    basis: ModeBasis,
}

/// Equal-time kernel built from the static (t = 0) basis spinors. The
/// particle/antiparticle subspaces are invariant under free evolution, so
/// the same kernel projects exactly at any time.
pub fn projection_kernel(basis: &ModeBasis, branch: Branch) -> ProjectionKernel {
    assert!(!basis.modes.is_empty(), "kernel needs a nonempty basis");
    ProjectionKernel { branch, basis: basis.clone() }
}

pub struct ExtractedPart {
    pub field: SpinorField,
    /// Set when ||psi - P psi - A psi|| / ||psi|| > 1e-8, signaling
    /// content outside the truncated mode basis.
    pub out_of_band: bool,
    pub completeness_residual: f64,
}

impl ProjectionKernel {
    pub fn lattice(&self) -> &Lattice {
        &self.basis.lattice
    }

    /// psi^(kind)(x) = sum_x' dV Omega(x,x') psi(x').
    pub fn apply(&self, field: &SpinorField) -> SpinorField {
        assert_eq!(
            field.lattice, self.basis.lattice,
            "field and kernel must share a lattice"
        );
        let w = self.basis.lattice.cell_volume();
        let mut out = SpinorField::zeros(&field.lattice, field.t);
        for mode in &self.basis.modes {
            // overlap <w_k, psi> under lattice quadrature
            let mut overlap = C::new(0.0, 0.0);
            for (flat, x) in self.basis.lattice.iter_coords() {
                let wk = evaluate_mode(mode, self.branch, x, 0.0);
                overlap += wk.dotc(&field.values[flat]) * w;
            }
            if overlap.norm() == 0.0 {
                continue;
            }
            for (flat, x) in self.basis.lattice.iter_coords() {
                out.values[flat] += evaluate_mode(mode, self.branch, x, 0.0) * overlap;
            }
        }
        out
    }

    /// Dense (4N x 4N) materialization for small-grid diagnostics.
    pub fn dense(&self) -> DMatrix<C> {
        let n = self.basis.lattice.num_points();
        assert!(n <= 32, "dense kernels are a small-grid diagnostic only");
        let mut m = DMatrix::zeros(4 * n, 4 * n);
        for mode in &self.basis.modes {
            let spinors: Vec<Vector4<C>> = self
                .basis
                .lattice
                .iter_coords()
                .map(|(_, x)| evaluate_mode(mode, self.branch, x, 0.0))
                .collect();
            for (i, wi) in spinors.iter().enumerate() {
                for (j, wj) in spinors.iter().enumerate() {
                    for a in 0..4 {
                        for b in 0..4 {
                            m[(4 * i + a, 4 * j + b)] += wi[a] * wj[b].conj();
                        }
                    }
                }
            }
        }
        m
    }
}

/// Split a field and report the band-limited completeness residual.
pub fn extract_part(field: &SpinorField, kernel: &ProjectionKernel) -> ExtractedPart {
    let part = kernel.apply(field);
    let other = ProjectionKernel {
        branch: match kernel.branch {
            Branch::Particle => Branch::Antiparticle,
            Branch::Antiparticle => Branch::Particle,
        },
        basis: kernel.basis.clone(),
    };
    let complement = other.apply(field);
    let norm = field.norm_sq().sqrt();
    let mut diff = 0.0f64;
    for flat in 0..field.values.len() {
        let r = field.values[flat] - part.values[flat] - complement.values[flat];
        diff += r.norm_squared() * field.lattice.cell_volume();
    }
    let residual = if norm > 0.0 { diff.sqrt() / norm } else { 0.0 };
    ExtractedPart { field: part, out_of_band: residual > OUT_OF_BAND_TOL, completeness_residual: residual }
}

/// Real contravariant 4-vector (j0, j1, j2, j3) per grid point.
#[derive(Debug, Clone)]
pub struct CurrentField {
    pub lattice: Lattice,
    pub values: Vec<[f64; 4]>,
    pub t: f64,
}

impl CurrentField {
    pub fn charge(&self) -> f64 {
        let w = self.lattice.cell_volume();
        self.values.iter().map(|j| j[0] * w).sum()
    }
}

/// j^mu(x) = psi^dag(x) gamma^0 gamma^mu psi(x). Fails when the imaginary
/// residue exceeds 1e-10 (corrupted field or wrong gammas).
pub fn current(field: &SpinorField, gammas: &GammaSet) -> Result<CurrentField> {
    let tol = 1e-10;
    let mats: Vec<_> = (0..4).map(|mu| gammas.g0_gmu(mu)).collect();
    let mut values = Vec::with_capacity(field.values.len());
    let scale = field.max_abs().powi(2).max(1.0);
    for psi in &field.values {
        if !psi.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite("spinor field"));
        }
        let mut j = [0.0f64; 4];
        for mu in 0..4 {
            let z = psi.dotc(&(mats[mu] * psi));
            if z.im.abs() > tol * scale {
                return Err(Error::NonRealCurrent { residue: z.im.abs(), tol: tol * scale });
            }
            j[mu] = z.re;
        }
        values.push(j);
    }
    Ok(CurrentField { lattice: field.lattice.clone(), values, t: field.t })
}

/// Max-norm of d_t j0 + div j over the interior time samples: the time
/// derivative by central difference, the divergence spectral.
///
/// Conservation diagnostics are only exact when the grid resolves the
/// quadratic band: N >= 2 (2 k_cut + 1) points per active axis.
pub fn divergence_residual(fields: &[CurrentField], dt: f64) -> f64 {
    assert!(fields.len() >= 3, "need at least 3 uniformly spaced time samples");
    let mut residual = 0.0f64;
    for w in fields.windows(3) {
        let div = spatial_divergence(&w[1]);
        for flat in 0..w[1].values.len() {
            let djdt = (w[2].values[flat][0] - w[0].values[flat][0]) / (2.0 * dt);
            residual = residual.max((djdt + div[flat]).abs());
        }
    }
    residual
}

/// Same residual with the time derivative of j0 supplied analytically.
pub fn divergence_residual_analytic(field: &CurrentField, dj0_dt: &[f64]) -> f64 {
    let div = spatial_divergence(field);
    dj0_dt
        .iter()
        .zip(&div)
        .map(|(d, v)| (d + v).abs())
        .fold(0.0, f64::max)
}

/// Analytic d_t j0 = 2 Re(psi^dag d_t psi) with the mode-phase time
/// derivative of a synthesized field.
pub fn dj0_dt_analytic(
    basis: &ModeBasis,
    coeffs: &crate::modes::ModeCoefficients,
    t: f64,
) -> Vec<f64> {
    let field = crate::modes::synthesize_field(basis, coeffs, t);
    let mut out = vec![0.0; field.values.len()];
    for (flat, x) in basis.lattice.iter_coords() {
        let mut dt_psi = Vector4::zeros();
        for &(idx, c) in &coeffs.b {
            let m = &basis.modes[idx];
            dt_psi += evaluate_mode(m, Branch::Particle, x, t) * c * C::new(0.0, -m.energy);
        }
        for &(idx, c) in &coeffs.dstar {
            let m = &basis.modes[idx];
            dt_psi += evaluate_mode(m, Branch::Antiparticle, x, t) * c * C::new(0.0, m.energy);
        }
        out[flat] = 2.0 * field.values[flat].dotc(&dt_psi).re;
    }
    out
}

fn spatial_divergence(field: &CurrentField) -> Vec<f64> {
    let lat = &field.lattice;
    let mut div = vec![0.0f64; field.values.len()];
    for axis in 0..3 {
        if !lat.active[axis] {
            continue;
        }
        let n = lat.points[axis];
        let (oa, ob) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for ia in 0..lat.points[oa] {
            for ib in 0..lat.points[ob] {
                let mut idx = [0usize; 3];
                idx[oa] = ia;
                idx[ob] = ib;
                let mut line: Vec<C> = (0..n)
                    .map(|j| {
                        let mut p = idx;
                        p[axis] = j;
                        C::new(field.values[lat.flat_index(p)][axis + 1], 0.0)
                    })
                    .collect();
                crate::spectral::derivative_line(&mut line, lat.l);
                for (j, val) in line.into_iter().enumerate() {
                    let mut p = idx;
                    p[axis] = j;
                    div[lat.flat_index(p)] += val.re;
                }
            }
        }
    }
    div
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::modes::{build_mode_basis, synthesize_field, ModeCoefficients, Spin};

    fn setup(n: usize, k_cut: i32) -> ModeBasis {
        let lat = Lattice::line(2.0 * std::f64::consts::PI, n);
        build_mode_basis(&lat, 1.0, k_cut).unwrap()
    }

    fn random_field(basis: &ModeBasis, seed: u64) -> SpinorField {
        // deterministic pseudo-random grid field, generally out-of-band
        let mut f = SpinorField::zeros(&basis.lattice, 0.0);
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for v in &mut f.values {
            for comp in 0..4 {
                v[comp] = C::new(next(), next());
            }
        }
        f
    }

    #[test]
    fn kernel_idempotent_and_mutually_annihilating() {
        let basis = setup(64, 5);
        let p = projection_kernel(&basis, Branch::Particle);
        let a = projection_kernel(&basis, Branch::Antiparticle);
        let f = random_field(&basis, 7);
        let pf = p.apply(&f);
        let ppf = p.apply(&pf);
        let apf = a.apply(&pf);
        let scale = pf.max_abs().max(1e-30);
        let mut idem = 0.0f64;
        let mut annih = 0.0f64;
        for flat in 0..f.values.len() {
            idem = idem.max((ppf.values[flat] - pf.values[flat]).camax());
            annih = annih.max(apf.values[flat].camax());
        }
        assert!(idem / scale < 1e-10, "idempotence residual {idem}");
        assert!(annih / scale < 1e-10, "annihilation residual {annih}");
    }

    #[test]
    fn band_limited_completeness() {
        let basis = setup(64, 5);
        let coeffs = ModeCoefficients {
            b: vec![(0, C::new(0.4, 0.3)), (7, C::new(-0.2, 0.1))],
            dstar: vec![(3, C::new(0.5, -0.6))],
        };
        let f = synthesize_field(&basis, &coeffs, 0.4);
        let p = projection_kernel(&basis, Branch::Particle);
        let part = extract_part(&f, &p);
        assert!(!part.out_of_band);
        assert!(part.completeness_residual < 1e-10);
    }

    #[test]
    fn single_mode_kernel_reproduces_and_annihilates_plane_waves() {
        let lat = Lattice::line(2.0 * std::f64::consts::PI, 16);
        let basis = build_mode_basis(&lat, 1.0, 0).unwrap();
        let p = projection_kernel(&basis, Branch::Particle);
        let idx = basis.find([0, 0, 0], Spin::Up).unwrap();
        let u_wave = synthesize_field(
            &basis,
            &ModeCoefficients::particle(vec![(idx, C::new(1.0, 0.0))]),
            0.0,
        );
        let v_wave = synthesize_field(
            &basis,
            &ModeCoefficients::antiparticle(vec![(idx, C::new(1.0, 0.0))]),
            0.0,
        );
        let pu = p.apply(&u_wave);
        let pv = p.apply(&v_wave);
        for flat in 0..u_wave.values.len() {
            assert!((pu.values[flat] - u_wave.values[flat]).camax() < 1e-12);
            assert!(pv.values[flat].camax() < 1e-12);
        }
    }

    #[test]
    fn mixed_field_extraction_matches_b_only_synthesis() {
        let basis = setup(64, 3);
        let amp = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let k1 = basis.find([1, 0, 0], Spin::Up).unwrap();
        let k2 = basis.find([-2, 0, 0], Spin::Down).unwrap();
        let mixed = ModeCoefficients { b: vec![(k1, amp)], dstar: vec![(k2, amp)] };
        let f = synthesize_field(&basis, &mixed, 0.0);
        let p = projection_kernel(&basis, Branch::Particle);
        let got = extract_part(&f, &p);
        let expect = synthesize_field(&basis, &ModeCoefficients::particle(vec![(k1, amp)]), 0.0);
        for flat in 0..f.values.len() {
            assert!((got.field.values[flat] - expect.values[flat]).camax() < 1e-12);
        }
        // zero field gives zero parts
        let z = SpinorField::zeros(&basis.lattice, 0.0);
        let pz = extract_part(&z, &p);
        assert!(pz.field.max_abs() == 0.0);
    }

    #[test]
    fn out_of_band_content_flagged() {
        let wide = setup(64, 5);
        let narrow_basis = {
            let lat = Lattice::line(2.0 * std::f64::consts::PI, 64);
            build_mode_basis(&lat, 1.0, 2).unwrap()
        };
        let hi = wide.find([5, 0, 0], Spin::Up).unwrap();
        let f = synthesize_field(
            &wide,
            &ModeCoefficients::particle(vec![(hi, C::new(1.0, 0.0))]),
            0.0,
        );
        let p = projection_kernel(&narrow_basis, Branch::Particle);
        let got = extract_part(&f, &p);
        assert!(got.out_of_band);
    }

    #[test]
    fn plane_wave_current_is_group_velocity() {
        let basis = setup(64, 3);
        let g = GammaSet::dirac_pauli();
        for (n, spin) in [(2, Spin::Up), (-3, Spin::Down), (1, Spin::Down)] {
            let idx = basis.find([n, 0, 0], spin).unwrap();
            let mode = &basis.modes[idx];
            let f = synthesize_field(
                &basis,
                &ModeCoefficients::particle(vec![(idx, C::new(1.0, 0.0))]),
                0.0,
            );
            let j = current(&f, &g).unwrap();
            for val in &j.values {
                assert!((val[1] / val[0] - mode.k[0] / mode.energy).abs() < 1e-12);
                assert!(val[2].abs() < 1e-14 && val[3].abs() < 1e-14);
            }
        }
        // k = 0: rest frame, no spatial current, constant density
        let rest = basis.find([0, 0, 0], Spin::Up).unwrap();
        let f = synthesize_field(
            &basis,
            &ModeCoefficients::particle(vec![(rest, C::new(1.0, 0.0))]),
            0.0,
        );
        let j = current(&f, &g).unwrap();
        let j0 = j.values[0][0];
        for val in &j.values {
            assert!((val[0] - j0).abs() < 1e-14);
            assert!(val[1].abs() < 1e-14);
        }
    }

    #[test]
    fn two_mode_interference_fringes() {
        let basis = setup(64, 3);
        let g = GammaSet::dirac_pauli();
        let i1 = basis.find([1, 0, 0], Spin::Up).unwrap();
        let i2 = basis.find([3, 0, 0], Spin::Up).unwrap();
        let amp = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let f = synthesize_field(&basis, &ModeCoefficients::particle(vec![(i1, amp), (i2, amp)]), 0.0);
        let j = current(&f, &g).unwrap();
        // independent pointwise oracle from the stored constant spinors
        let m1 = &basis.modes[i1];
        let m2 = &basis.modes[i2];
        let dk = m2.k[0] - m1.k[0];
        for (flat, x) in basis.lattice.iter_coords() {
            let cross = m1.u.dotc(&m2.u) * C::from_polar(1.0, dk * x[0]);
            let expect =
                0.5 * (m1.u.norm_squared() + m2.u.norm_squared()) + (cross).re;
            assert!((j.values[flat][0] - expect).abs() < 1e-12);
        }
        // fringe period 2 pi / |k1 - k2|: density repeats after that shift
        let period_points = basis.lattice.points[0] as f64 * (2.0 * std::f64::consts::PI / dk.abs()) / basis.lattice.l;
        let shift = period_points.round() as usize;
        for flat in 0..(basis.lattice.num_points() - shift) {
            assert!((j.values[flat][0] - j.values[flat + shift][0]).abs() < 1e-12);
        }
    }

    #[test]
    fn current_conservation_richardson() {
        let basis = setup(64, 3);
        let g = GammaSet::dirac_pauli();
        let i1 = basis.find([1, 0, 0], Spin::Up).unwrap();
        let i2 = basis.find([2, 0, 0], Spin::Up).unwrap();
        let amp = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let coeffs = ModeCoefficients::particle(vec![(i1, amp), (i2, amp)]);
        let residual_at = |dt: f64| {
            let fields: Vec<CurrentField> = [-dt, 0.0, dt]
                .iter()
                .map(|&t| current(&synthesize_field(&basis, &coeffs, 1.0 + t), &g).unwrap())
                .collect();
            divergence_residual(&fields, dt)
        };
        let r1 = residual_at(1e-3);
        let r2 = residual_at(5e-4);
        // O(dt^2): halving dt quarters the residual
        assert!(r1 / r2 > 3.0 && r1 / r2 < 5.0, "ratio {}", r1 / r2);

        // analytic time derivative: residual at rounding level
        let dj0 = dj0_dt_analytic(&basis, &coeffs, 1.0);
        let j = current(&synthesize_field(&basis, &coeffs, 1.0), &g).unwrap();
        assert!(divergence_residual_analytic(&j, &dj0) < 1e-12);
    }

    #[test]
    fn mixed_field_current_also_conserved() {
        let basis = setup(64, 2);
        let g = GammaSet::dirac_pauli();
        let k1 = basis.find([1, 0, 0], Spin::Up).unwrap();
        let k2 = basis.find([-1, 0, 0], Spin::Down).unwrap();
        let coeffs = ModeCoefficients {
            b: vec![(k1, C::new(0.6, 0.2))],
            dstar: vec![(k2, C::new(-0.3, 0.7))],
        };
        let dj0 = dj0_dt_analytic(&basis, &coeffs, 0.5);
        let j = current(&synthesize_field(&basis, &coeffs, 0.5), &g).unwrap();
        assert!(divergence_residual_analytic(&j, &dj0) < 1e-12);
    }

    #[test]
    fn charges_of_parts_conserved_in_time() {
        let basis = setup(64, 3);
        let g = GammaSet::dirac_pauli();
        let coeffs = ModeCoefficients {
            b: vec![(2, C::new(0.5, 0.1)), (9, C::new(0.3, -0.2))],
            dstar: vec![(4, C::new(0.2, 0.6))],
        };
        let p = projection_kernel(&basis, Branch::Particle);
        let a = projection_kernel(&basis, Branch::Antiparticle);
        let mut charges = Vec::new();
        for &t in &[0.0, 0.7, 2.3] {
            let f = synthesize_field(&basis, &coeffs, t);
            let qp = current(&extract_part(&f, &p).field, &g).unwrap().charge();
            let qa = current(&extract_part(&f, &a).field, &g).unwrap().charge();
            charges.push((qp, qa));
        }
        for w in charges.windows(2) {
            assert!((w[0].0 - w[1].0).abs() < 1e-10);
            assert!((w[0].1 - w[1].1).abs() < 1e-10);
        }
        // j0 of each part is nonnegative pointwise
        let f = synthesize_field(&basis, &coeffs, 0.7);
        for part in [&p, &a] {
            let j = current(&extract_part(&f, part).field, &g).unwrap();
            for v in &j.values {
                assert!(v[0] >= -1e-15);
            }
        }
    }

    #[test]
    fn dense_kernel_small_grid() {
        let lat = Lattice::line(2.0 * std::f64::consts::PI, 8);
        let basis = build_mode_basis(&lat, 1.0, 1).unwrap();
        let p = projection_kernel(&basis, Branch::Particle);
        let dense = p.dense();
        // idempotence of the dense materialization under quadrature weight
        let w = C::new(lat.cell_volume(), 0.0);
        let prod = &dense * &dense * w;
        let mut max = 0.0f64;
        for i in 0..dense.nrows() {
            for j in 0..dense.ncols() {
                max = max.max((prod[(i, j)] - dense[(i, j)]).norm());
            }
        }
        assert!(max < 1e-10);
    }
}
