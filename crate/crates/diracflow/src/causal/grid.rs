//! Discretized field-configuration space: a uniform symmetric grid over
//! n continuous degrees of freedom, plus the harmonic-oscillator
//! eigenfunctions used as the functional basis on each axis.

/// Uniform grid over [-lambda, lambda)^n, G points per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigGrid {
    pub n: usize,
    pub lambda: f64,
    pub g: usize,
}

impl ConfigGrid {
    pub fn new(n: usize, lambda: f64, g: usize) -> Self {
        assert!(n >= 1 && n <= 4, "desk-scale configuration spaces have 1..=4 axes");
        assert!(g >= 16, "grid too coarse for quadrature orthonormality");
        assert!(lambda > 0.0);
        ConfigGrid { n, lambda, g }
    }

    /// Periodic box length per axis.
    pub fn length(&self) -> f64 {
        2.0 * self.lambda
    }

    pub fn spacing(&self) -> f64 {
        self.length() / self.g as f64
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.g; self.n]
    }

    pub fn num_points(&self) -> usize {
        self.g.pow(self.n as u32)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    /// Coordinates of one axis (shared by all axes).
    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.g).map(|i| -self.lambda + i as f64 * self.spacing()).collect()
    }

    /// True when the point lies inside the grid on every axis.
    pub fn contains(&self, point: &[f64]) -> bool {
        point.iter().all(|&x| x >= -self.lambda && x < self.lambda)
    }
}

/// Harmonic-oscillator eigenfunction h_n (unit mass and frequency):
/// h_0 = pi^{-1/4} exp(-x^2/2), with the standard recurrence
/// h_{n+1} = sqrt(2/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1}.
pub fn oscillator_fn(n: usize, x: f64) -> f64 {
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return h0;
    }
    let mut prev = h0;
    let mut cur = std::f64::consts::SQRT_2 * x * h0;
    for k in 1..n {
        let next = (2.0 / (k as f64 + 1.0)).sqrt() * x * cur
            - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}
