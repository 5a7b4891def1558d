//! Plane-wave solutions of the free Dirac equation in a periodic box and
//! spinor-field synthesis from mode coefficients.
//!
//! Spinors are box-normalized so the lattice quadrature of u^dag u equals
//! one (Kronecker orthonormality on the truncated reciprocal lattice).

use crate::error::{Error, Result};
use crate::gamma::GammaSet;
use crate::lattice::Lattice;
use nalgebra::{Matrix2, Vector2, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    fn chi(self) -> Vector2<C> {
        match self {
            Spin::Up => Vector2::new(C::new(1.0, 0.0), C::new(0.0, 0.0)),
            Spin::Down => Vector2::new(C::new(0.0, 0.0), C::new(1.0, 0.0)),
        }
    }
}

/// Particle (positive frequency) or antiparticle (negative frequency) branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Particle,
    Antiparticle,
}

#[derive(Debug, Clone)]
pub struct Mode {
    /// Integer reciprocal-lattice labels per axis (k_i = 2 pi n_i / L).
    pub n: [i32; 3],
    pub spin: Spin,
    pub k: [f64; 3],
    pub energy: f64,
    /// Constant 4-spinor u_{k,s} (particle branch).
    pub u: Vector4<C>,
    /// Constant 4-spinor v_{k,s} (antiparticle branch).
    pub v: Vector4<C>,
}

#[derive(Debug, Clone)]
pub struct ModeBasis {
    pub lattice: Lattice,
    pub mass: f64,
    pub k_cut: i32,
    pub modes: Vec<Mode>,
}

fn sigma_dot_k(k: [f64; 3]) -> Matrix2<C> {
    let kz = C::new(k[2], 0.0);
    let k_minus = C::new(k[0], -k[1]);
    let k_plus = C::new(k[0], k[1]);
    Matrix2::new(kz, k_minus, k_plus, -kz)
}

fn make_mode(lattice: &Lattice, mass: f64, n: [i32; 3], spin: Spin) -> Result<Mode> {
    let base = 2.0 * std::f64::consts::PI / lattice.l;
    let k = [n[0] as f64 * base, n[1] as f64 * base, n[2] as f64 * base];
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if mass == 0.0 && k2 == 0.0 {
        return Err(Error::MasslessZeroMode);
    }
    let energy = (k2 + mass * mass).sqrt();
    let chi = spin.chi();
    let lower = sigma_dot_k(k) * chi / C::new(energy + mass, 0.0);
    let norm = 1.0 / (lattice.box_volume() * (1.0 + k2 / (energy + mass).powi(2))).sqrt();
    let nc = C::new(norm, 0.0);
    let u = Vector4::new(chi[0] * nc, chi[1] * nc, lower[0] * nc, lower[1] * nc);
    let v = Vector4::new(lower[0] * nc, lower[1] * nc, chi[0] * nc, chi[1] * nc);
    Ok(Mode { n, spin, k, energy, u, v })
}

/// Enumerate all (k, s) with |n_i| <= k_cut on active axes.
pub fn build_mode_basis(lattice: &Lattice, mass: f64, k_cut: i32) -> Result<ModeBasis> {
    assert!(k_cut >= 0 && mass >= 0.0);
    let range = |axis: usize| -> Vec<i32> {
        if lattice.active[axis] {
            (-k_cut..=k_cut).collect()
        } else {
            vec![0]
        }
    };
    let mut modes = Vec::new();
    for &n0 in &range(0) {
        for &n1 in &range(1) {
            for &n2 in &range(2) {
                for spin in [Spin::Up, Spin::Down] {
                    modes.push(make_mode(lattice, mass, [n0, n1, n2], spin)?);
                }
            }
        }
    }
    Ok(ModeBasis { lattice: lattice.clone(), mass, k_cut, modes })
}

impl ModeBasis {
    pub fn find(&self, n: [i32; 3], spin: Spin) -> Option<usize> {
        self.modes.iter().position(|m| m.n == n && m.spin == spin)
    }
}

/// Time-dependent plane-wave mode value at a continuous point.
///
/// Particle branch: u_{k,s} e^{i(k.x - E t)}; antiparticle branch:
/// v_{k,s} e^{-i(k.x - E t)}. At t = 0 these reduce to the static basis
/// spinors times their spatial phases.
pub fn evaluate_mode(mode: &Mode, branch: Branch, x: [f64; 3], t: f64) -> Vector4<C> {
    let kx = mode.k[0] * x[0] + mode.k[1] * x[1] + mode.k[2] * x[2];
    match branch {
        Branch::Particle => mode.u * C::from_polar(1.0, kx - mode.energy * t),
        Branch::Antiparticle => mode.v * C::from_polar(1.0, -(kx - mode.energy * t)),
    }
}

/// Complex expansion coefficients: b_k per particle mode, d*_k per
/// antiparticle mode, indexed by position in `ModeBasis::modes`.
#[derive(Debug, Clone, Default)]
pub struct ModeCoefficients {
    pub b: Vec<(usize, C)>,
    pub dstar: Vec<(usize, C)>,
}

impl ModeCoefficients {
    pub fn particle(entries: Vec<(usize, C)>) -> Self {
        ModeCoefficients { b: entries, dstar: Vec::new() }
    }

    pub fn antiparticle(entries: Vec<(usize, C)>) -> Self {
        ModeCoefficients { b: Vec::new(), dstar: entries }
    }

    pub fn is_finite(&self) -> bool {
        self.b.iter().chain(self.dstar.iter()).all(|(_, c)| c.re.is_finite() && c.im.is_finite())
    }
}

/// Complex 4-spinor sampled on the lattice at one time.
#[derive(Debug, Clone)]
pub struct SpinorField {
    pub lattice: Lattice,
    pub values: Vec<Vector4<C>>,
    pub t: f64,
}

impl SpinorField {
    pub fn zeros(lattice: &Lattice, t: f64) -> Self {
        SpinorField { lattice: lattice.clone(), values: vec![Vector4::zeros(); lattice.num_points()], t }
    }

    pub fn norm_sq(&self) -> f64 {
        let w = self.lattice.cell_volume();
        self.values.iter().map(|v| v.norm_squared() * w).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.camax()).fold(0.0, f64::max)
    }
}

/// Pointwise sum over modes: psi(x) = sum_k b_k u_k(x,t) + sum_k d*_k v_k(x,t).
pub fn synthesize_field(basis: &ModeBasis, coeffs: &ModeCoefficients, t: f64) -> SpinorField {
    assert!(coeffs.is_finite(), "mode coefficients must be finite");
    let mut field = SpinorField::zeros(&basis.lattice, t);
    for (flat, x) in basis.lattice.iter_coords() {
        let mut acc = Vector4::zeros();
        for &(idx, c) in &coeffs.b {
            acc += evaluate_mode(&basis.modes[idx], Branch::Particle, x, t) * c;
        }
        for &(idx, c) in &coeffs.dstar {
            acc += evaluate_mode(&basis.modes[idx], Branch::Antiparticle, x, t) * c;
        }
        field.values[flat] = acc;
    }
    field
}

/// Lattice quadrature of mode^dag against the field; recovers expansion
/// coefficients of band-limited fields.
pub fn project_coefficients(basis: &ModeBasis, field: &SpinorField) -> ModeCoefficients {
    let w = basis.lattice.cell_volume();
    let mut b = Vec::with_capacity(basis.modes.len());
    let mut dstar = Vec::with_capacity(basis.modes.len());
    for (idx, mode) in basis.modes.iter().enumerate() {
        let mut bu = C::new(0.0, 0.0);
        let mut dv = C::new(0.0, 0.0);
        for (flat, x) in basis.lattice.iter_coords() {
            let u = evaluate_mode(mode, Branch::Particle, x, field.t);
            let v = evaluate_mode(mode, Branch::Antiparticle, x, field.t);
            bu += u.dotc(&field.values[flat]) * w;
            dv += v.dotc(&field.values[flat]) * w;
        }
        b.push((idx, bu));
        dstar.push((idx, dv));
    }
    ModeCoefficients { b, dstar }
}

/// Max-norm residual of the lattice Dirac equation (i gamma^mu d_mu - m) psi
/// for a field synthesized from the basis: the time derivative is analytic
/// (mode phases), the spatial derivative spectral.
pub fn dirac_residual(
    basis: &ModeBasis,
    coeffs: &ModeCoefficients,
    t: f64,
    gammas: &GammaSet,
) -> f64 {
    let field = synthesize_field(basis, coeffs, t);
    // analytic d_t psi: each mode picks up -+ i E
    let mut dt = SpinorField::zeros(&basis.lattice, t);
    for (flat, x) in basis.lattice.iter_coords() {
        let mut acc = Vector4::zeros();
        for &(idx, c) in &coeffs.b {
            let m = &basis.modes[idx];
            acc += evaluate_mode(m, Branch::Particle, x, t) * c * C::new(0.0, -m.energy);
        }
        for &(idx, c) in &coeffs.dstar {
            let m = &basis.modes[idx];
            acc += evaluate_mode(m, Branch::Antiparticle, x, t) * c * C::new(0.0, m.energy);
        }
        dt.values[flat] = acc;
    }
    let grads = spatial_gradient(&field);
    let i = C::new(0.0, 1.0);
    let mc = C::new(basis.mass, 0.0);
    let mut residual = 0.0f64;
    for flat in 0..basis.lattice.num_points() {
        let mut r = gammas.upper(0) * dt.values[flat] * i - field.values[flat] * mc;
        for (axis, grad) in grads.iter().enumerate() {
            r += gammas.upper(axis + 1) * grad.values[flat] * i;
        }
        residual = residual.max(r.camax());
    }
    residual
}

/// Spectral gradient of a spinor field along the active axes (inactive
/// axes contribute zero).
pub fn spatial_gradient(field: &SpinorField) -> [SpinorField; 3] {
    let lat = &field.lattice;
    let mut out = [
        SpinorField::zeros(lat, field.t),
        SpinorField::zeros(lat, field.t),
        SpinorField::zeros(lat, field.t),
    ];
    for axis in 0..3 {
        if !lat.active[axis] {
            continue;
        }
        // gather lines along the axis per spinor component
        let n = lat.points[axis];
        let mut idx = [0usize; 3];
        let (oa, ob) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for ia in 0..lat.points[oa] {
            for ib in 0..lat.points[ob] {
                idx[oa] = ia;
                idx[ob] = ib;
                for comp in 0..4 {
                    let mut line: Vec<C> = (0..n)
                        .map(|j| {
                            let mut p = idx;
                            p[axis] = j;
                            field.values[lat.flat_index(p)][comp]
                        })
                        .collect();
                    crate::spectral::derivative_line(&mut line, lat.l);
                    for (j, val) in line.into_iter().enumerate() {
                        let mut p = idx;
                        p[axis] = j;
                        out[axis].values[lat.flat_index(p)][comp] = val;
                    }
                }
            }
        }
    }
    out
}
