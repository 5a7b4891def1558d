//! Functional basis on the configuration grid: each Fock occupation
//! state maps to a product of oscillator functions, one continuous
//! degree of freedom per mode (occupation 0 -> h_0, occupation 1 -> h_1).
//! The projected Hamiltonian acts on grid functions through this basis.

use crate::causal::grid::{oscillator_fn, ConfigGrid};
use crate::error::{Error, Result};
use crate::fock::{FockBasis, HamiltonianMatrix, OccState};
use nalgebra::{DMatrix, DVector};
use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

type C = Complex64;

/// Minimum half-range, in oscillator lengths, for quadrature
/// orthonormality: the h_0 h_2 overlap tail must fall below tolerance.
const MIN_RANGE: f64 = 6.0;

#[derive(Debug, Clone)]
pub struct FunctionalBasis {
    pub grid: ConfigGrid,
    /// per Fock state K, the occupation of each grid axis
    pub occupations: Vec<Vec<usize>>,
    /// per Fock state K, its (n_P, n_A) sector
    pub sectors: Vec<(usize, usize)>,
    /// basis functions sampled on the grid (real products of h_0/h_1)
    pub functions: Vec<ArrayD<f64>>,
}

fn occupation_vector(fock: &FockBasis, state: OccState) -> Vec<usize> {
    let mut occ = Vec::with_capacity(fock.particle_modes.len() + fock.antiparticle_modes.len());
    for slot in 0..fock.particle_modes.len() {
        occ.push(((state.particles >> slot) & 1) as usize);
    }
    for slot in 0..fock.antiparticle_modes.len() {
        occ.push(((state.antiparticles >> slot) & 1) as usize);
    }
    occ
}

/// Build the product-oscillator image of every Fock basis state on the
/// grid. One continuous degree of freedom per mode, particle modes
/// first, matching the Jordan-Wigner mode ordering.
pub fn build_functional_basis(fock: &FockBasis, grid: &ConfigGrid) -> Result<FunctionalBasis> {
    let n_modes = fock.particle_modes.len() + fock.antiparticle_modes.len();
    assert_eq!(grid.n, n_modes, "one grid axis per Fock mode");
    if grid.lambda < MIN_RANGE {
        return Err(Error::GridRangeTooSmall { lambda: grid.lambda, required: MIN_RANGE });
    }
    let coords = grid.axis_coords();
    // h_0, h_1, h_2 sampled on one axis (all axes share coordinates)
    let tables: Vec<Vec<f64>> =
        (0..3).map(|n| coords.iter().map(|&x| oscillator_fn(n, x)).collect()).collect();

    let shape = grid.shape();
    let mut occupations = Vec::with_capacity(fock.dim());
    let mut sectors = Vec::with_capacity(fock.dim());
    let mut functions = Vec::with_capacity(fock.dim());
    for &state in &fock.states {
        let occ = occupation_vector(fock, state);
        let mut f = ArrayD::from_elem(IxDyn(&shape), 1.0f64);
        for (axis, &o) in occ.iter().enumerate() {
            let table = &tables[o];
            f.indexed_iter_mut().for_each(|(idx, v)| {
                *v *= table[idx[axis]];
            });
        }
        occupations.push(occ);
        sectors.push(state.sector());
        functions.push(f);
    }
    Ok(FunctionalBasis { grid: grid.clone(), occupations, sectors, functions })
}

impl FunctionalBasis {
    pub fn dim(&self) -> usize {
        self.functions.len()
    }

    /// Psi = sum_K c_K Psi_K on the grid.
    pub fn synthesize(&self, c: &DVector<C>) -> ArrayD<C> {
        assert_eq!(c.len(), self.dim());
        let mut out = ArrayD::from_elem(IxDyn(&self.grid.shape()), C::new(0.0, 0.0));
        for (k, f) in self.functions.iter().enumerate() {
            if c[k] == C::new(0.0, 0.0) {
                continue;
            }
            out.zip_mut_with(f, |o, &b| *o += c[k] * b);
        }
        out
    }

    /// Quadrature projection <Psi_K | f> for every K.
    pub fn project(&self, f: &ArrayD<C>) -> DVector<C> {
        let w = self.grid.cell_volume();
        DVector::from_iterator(
            self.dim(),
            self.functions.iter().map(|psi| {
                psi.iter().zip(f.iter()).map(|(&a, &b)| b * a).sum::<C>() * w
            }),
        )
    }

    /// Max deviation of the quadrature Gram matrix from the identity.
    pub fn gram_residual(&self) -> f64 {
        let w = self.grid.cell_volume();
        let mut max = 0.0f64;
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                let overlap: f64 = self.functions[a]
                    .iter()
                    .zip(self.functions[b].iter())
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
                    * w;
                let expect = if a == b { 1.0 } else { 0.0 };
                max = max.max((overlap - expect).abs());
            }
        }
        max
    }

    /// Psi_K at an arbitrary continuous point.
    pub fn evaluate_state(&self, k: usize, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.grid.n);
        self.occupations[k]
            .iter()
            .zip(point)
            .map(|(&o, &x)| oscillator_fn(o, x))
            .product()
    }

    /// Coefficient matrix of multiplication by phi_axis followed by
    /// projection back onto the basis: phi h_0 = h_1/sqrt(2) + ...,
    /// phi h_1 = h_0/sqrt(2) + h_2, and the h_2 overflow is annihilated
    /// by the projector, so (X_a)_{K'K} = 1/sqrt(2) when K' is K with
    /// the occupation of `axis` flipped (and K' exists in the basis).
    pub fn phi_matrix(&self, axis: usize) -> DMatrix<C> {
        assert!(axis < self.grid.n);
        let dim = self.dim();
        let mut x = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            let mut flipped = self.occupations[k].clone();
            flipped[axis] = 1 - flipped[axis];
            if let Some(kp) = self.occupations.iter().position(|o| *o == flipped) {
                x[(kp, k)] = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            }
        }
        x
    }
}

/// The finite-rank projected Hamiltonian on grid functions:
/// H_phi = sum_{K,K'} |Psi_K> H_{KK'} <Psi_K'|.
pub struct ProjectedHamiltonian<'a> {
    pub basis: &'a FunctionalBasis,
    pub h: DMatrix<C>,
}

impl<'a> ProjectedHamiltonian<'a> {
    pub fn new(basis: &'a FunctionalBasis, h: &HamiltonianMatrix) -> Self {
        assert_eq!(h.matrix.nrows(), basis.dim());
        ProjectedHamiltonian { basis, h: h.matrix.clone() }
    }

    /// Project onto span{Psi_K}, apply H in coefficients, resynthesize.
    pub fn apply(&self, f: &ArrayD<C>) -> ArrayD<C> {
        let coeff = self.basis.project(f);
        self.basis.synthesize(&(&self.h * coeff))
    }

    /// <Psi_K | H_phi | Psi_K'> by grid quadrature — the slow oracle
    /// route, used to confirm agreement with the Fock matrix.
    pub fn matrix_element(&self, k: usize, kp: usize) -> C {
        let image = self.apply(&self.basis.functions[kp].mapv(|x| C::new(x, 0.0)));
        let w = self.basis.grid.cell_volume();
        self.basis.functions[k]
            .iter()
            .zip(image.iter())
            .map(|(&a, &b)| b * a)
            .sum::<C>()
            * w
    }
}
