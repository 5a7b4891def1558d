//! Gamma matrices in the Dirac-Pauli representation.
//!
//! Metric signature diag(1, -1, -1, -1). All entries are 0, ±1 or ±i, so
//! the Clifford relations hold exactly in floating point.

use nalgebra::Matrix4;
use num_complex::Complex64;

type C = Complex64;
type M4 = Matrix4<Complex64>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// The four gamma matrices `gamma[mu]` for mu in 0..4, Dirac-Pauli
/// representation: gamma^0 = diag(1, 1, -1, -1).
#[derive(Debug, Clone)]
pub struct GammaSet {
    gamma: [M4; 4],
}

impl GammaSet {
    pub fn dirac_pauli() -> Self {
        let o = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        let g0 = M4::from_rows(&[
            [one, o, o, o].into(),
            [o, one, o, o].into(),
            [o, o, -one, o].into(),
            [o, o, o, -one].into(),
        ]);
        // gamma^i = [[0, sigma_i], [-sigma_i, 0]]
        let g1 = M4::from_rows(&[
            [o, o, o, one].into(),
            [o, o, one, o].into(),
            [o, -one, o, o].into(),
            [-one, o, o, o].into(),
        ]);
        let g2 = M4::from_rows(&[
            [o, o, o, -i].into(),
            [o, o, i, o].into(),
            [o, i, o, o].into(),
            [-i, o, o, o].into(),
        ]);
        let g3 = M4::from_rows(&[
            [o, o, one, o].into(),
            [o, o, o, -one].into(),
            [-one, o, o, o].into(),
            [o, one, o, o].into(),
        ]);
        GammaSet { gamma: [g0, g1, g2, g3] }
    }

    /// gamma^mu with an upper (contravariant) index.
    pub fn upper(&self, mu: usize) -> &M4 {
        &self.gamma[mu]
    }

    /// gamma_mu with a lower index: gamma_0 = gamma^0, gamma_i = -gamma^i.
    pub fn lower(&self, mu: usize) -> M4 {
        if mu == 0 {
            self.gamma[0]
        } else {
            -self.gamma[mu]
        }
    }

    /// alpha^i = gamma^0 gamma^i, so that j^mu = psi^dag (1, alpha) psi.
    pub fn alpha(&self, i: usize) -> M4 {
        assert!((1..4).contains(&i));
        self.gamma[0] * self.gamma[i]
    }

    /// gamma^0 gamma^mu (identity for mu = 0).
    pub fn g0_gmu(&self, mu: usize) -> M4 {
        self.gamma[0] * self.gamma[mu]
    }

    pub fn metric(&self, mu: usize, nu: usize) -> f64 {
        if mu != nu {
            0.0
        } else if mu == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl Default for GammaSet {
    fn default() -> Self {
        Self::dirac_pauli()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_relations_exact() {
        let g = GammaSet::dirac_pauli();
        for mu in 0..4 {
            for nu in 0..4 {
                let anti = g.upper(mu) * g.upper(nu) + g.upper(nu) * g.upper(mu);
                let expected = M4::identity() * c(2.0 * g.metric(mu, nu), 0.0);
                // entries are 0, +-1, +-i: the relation must hold exactly
                assert_eq!(anti, expected, "mu={mu} nu={nu}");
            }
        }
    }

    #[test]
    fn hermiticity() {
        let g = GammaSet::dirac_pauli();
        assert_eq!(g.upper(0).adjoint(), *g.upper(0));
        for i in 1..4 {
            assert_eq!(g.upper(i).adjoint(), -g.upper(i));
        }
    }
}
