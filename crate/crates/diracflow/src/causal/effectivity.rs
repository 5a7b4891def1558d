//! Sector effectivities: the relative weight each particle-number
//! sector contributes to the field-state amplitude at a given point of
//! configuration space. Along a trajectory these act as soft collapse
//! indicators — once one sector's effectivity saturates at 1 the field
//! behaves as if that sector alone were present.

use crate::causal::basis::FunctionalBasis;
use crate::error::{Error, Result};
use nalgebra::DVector;
use num_complex::Complex64 as C;

#[derive(Debug, Clone, PartialEq)]
pub struct SectorEffectivity {
    pub sector: (usize, usize),
    /// |Psi_sector(phi)|^2 / sum over sectors, in [0, 1]
    pub weight: f64,
}

/// Evaluate the per-sector amplitudes of the field state at a continuous
/// configuration point and normalize their moduli squared. Fails with
/// `IndeterminateEffectivity` when every sector amplitude underflows
/// (deep in the tail of all basis functions) so no ratio is defined.
pub fn sector_effectivities(
    basis: &FunctionalBasis,
    coeffs: &DVector<C>,
    point: &[f64],
) -> Result<Vec<SectorEffectivity>> {
    assert_eq!(coeffs.len(), basis.dim());
    assert_eq!(point.len(), basis.grid.n);
    let mut sectors: Vec<(usize, usize)> = basis.sectors.clone();
    sectors.sort_unstable();
    sectors.dedup();

    let mut amplitudes = vec![C::new(0.0, 0.0); sectors.len()];
    for k in 0..basis.dim() {
        let s = sectors.iter().position(|&s| s == basis.sectors[k]).unwrap();
        amplitudes[s] += coeffs[k] * basis.evaluate_state(k, point);
    }
    let denom: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if !denom.is_finite() || denom <= f64::MIN_POSITIVE {
        return Err(Error::IndeterminateEffectivity);
    }
    Ok(sectors
        .into_iter()
        .zip(amplitudes)
        .map(|(sector, a)| SectorEffectivity { sector, weight: a.norm_sqr() / denom })
        .collect())
}
