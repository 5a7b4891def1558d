//! Sampling and goodness-of-fit helpers for the equivariance checks.

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
/// The sample is sorted internally.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!samples.is_empty());
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max((f - (i as f64 + 1.0) / n).abs());
    }
    d
}

/// Critical KS distance at the working confidence level: 1.63 / sqrt(M).
pub fn ks_critical(m: usize) -> f64 {
    1.63 / (m as f64).sqrt()
}

/// Piecewise-linear CDF built from nonnegative density values on a
/// uniform grid over [x0, x0 + span), periodic-cell convention (the last
/// interval closes the span). Supports evaluation and inverse sampling.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    pub x0: f64,
    pub dx: f64,
    /// cumulative[i] = integral of the density up to grid point i, with
    /// cumulative[n] = 1 after normalization.
    cumulative: Vec<f64>,
}

impl TabulatedCdf {
    /// Trapezoid accumulation of `density` sampled at x0 + i dx for
    /// i = 0..n, wrapping the final trapezoid to density[0].
    pub fn from_density(x0: f64, dx: f64, density: &[f64]) -> Self {
        assert!(density.len() >= 2 && dx > 0.0);
        assert!(density.iter().all(|&d| d >= 0.0 && d.is_finite()), "density must be nonnegative");
        let n = density.len();
        let mut cumulative = Vec::with_capacity(n + 1);
        cumulative.push(0.0);
        for i in 0..n {
            let right = density[(i + 1) % n];
            let step = 0.5 * (density[i] + right) * dx;
            cumulative.push(cumulative[i] + step);
        }
        let total = *cumulative.last().unwrap();
        assert!(total > 0.0, "density integrates to zero");
        for c in &mut cumulative {
            *c /= total;
        }
        TabulatedCdf { x0, dx, cumulative }
    }

    pub fn span(&self) -> f64 {
        self.dx * (self.cumulative.len() - 1) as f64
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let s = (x - self.x0) / self.dx;
        if s <= 0.0 {
            return 0.0;
        }
        let i = s.floor() as usize;
        if i + 1 >= self.cumulative.len() {
            return 1.0;
        }
        let frac = s - i as f64;
        self.cumulative[i] + frac * (self.cumulative[i + 1] - self.cumulative[i])
    }

    /// Inverse CDF by binary search plus linear interpolation; `u` in [0, 1).
    pub fn inverse(&self, u: f64) -> f64 {
        assert!((0.0..=1.0).contains(&u));
        let c = &self.cumulative;
        let mut lo = 0usize;
        let mut hi = c.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if c[mid] <= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let width = c[hi] - c[lo];
        let frac = if width > 0.0 { (u - c[lo]) / width } else { 0.0 };
        self.x0 + (lo as f64 + frac) * self.dx
    }
}
