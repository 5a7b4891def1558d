//! Periodic spatial lattice. Units hbar = c = 1; the box has length `l`
//! along every axis, but momenta may be restricted to a subset of axes
//! (the active axes) to keep desk-scale runs cheap while retaining the
//! full 3+1 spinor structure.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    /// Box length per axis.
    pub l: f64,
    /// Points per axis; inactive axes carry a single point.
    pub points: [usize; 3],
    /// Axes on which momenta run.
    pub active: [bool; 3],
}

impl Lattice {
    /// 1-active-axis lattice with `n` points along x^1.
    pub fn line(l: f64, n: usize) -> Self {
        assert!(n >= 2 && l > 0.0);
        Lattice { l, points: [n, 1, 1], active: [true, false, false] }
    }

    pub fn new(l: f64, points: [usize; 3], active: [bool; 3]) -> Self {
        assert!(l > 0.0);
        for (axis, &n) in points.iter().enumerate() {
            if active[axis] {
                assert!(n >= 2, "active axis {axis} needs at least 2 points");
            } else {
                assert_eq!(n, 1, "inactive axis {axis} must carry a single point");
            }
        }
        Lattice { l, points, active }
    }

    pub fn num_points(&self) -> usize {
        self.points.iter().product()
    }

    pub fn box_volume(&self) -> f64 {
        self.l.powi(3)
    }

    /// Quadrature weight of a single grid point; cell volume times the
    /// point count equals the box volume.
    pub fn cell_volume(&self) -> f64 {
        self.box_volume() / self.num_points() as f64
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.l / self.points[axis] as f64
    }

    pub fn coord(&self, idx: [usize; 3]) -> [f64; 3] {
        [
            idx[0] as f64 * self.spacing(0),
            idx[1] as f64 * self.spacing(1),
            idx[2] as f64 * self.spacing(2),
        ]
    }

    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.points[1] + idx[1]) * self.points[2] + idx[2]
    }

    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let i2 = flat % self.points[2];
        let rest = flat / self.points[2];
        let i1 = rest % self.points[1];
        let i0 = rest / self.points[1];
        [i0, i1, i2]
    }

    pub fn iter_coords(&self) -> impl Iterator<Item = (usize, [f64; 3])> + '_ {
        (0..self.num_points()).map(move |f| (f, self.coord(self.unflatten(f))))
    }

    /// Wrap a continuous position into [0, L) on every axis.
    pub fn wrap(&self, x: [f64; 3]) -> [f64; 3] {
        let mut out = x;
        for v in &mut out {
            *v = v.rem_euclid(self.l);
        }
        out
    }
}
