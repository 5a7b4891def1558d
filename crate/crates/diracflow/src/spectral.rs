//! FFT-based spectral derivatives and the n-dimensional Poisson solve.

use ndarray::{ArrayD, Axis};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::sync::Arc;

type C = Complex64;

/// Signed wavenumbers 2*pi*n/length in FFT bin order.
pub fn wavenumbers(n: usize, length: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / length;
    (0..n)
        .map(|i| {
            let s = if i <= n / 2 { i as isize } else { i as isize - n as isize };
            s as f64 * base
        })
        .collect()
}

pub struct Fft1d {
    n: usize,
    fwd: Arc<dyn rustfft::Fft<f64>>,
    inv: Arc<dyn rustfft::Fft<f64>>,
}

impl Fft1d {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft1d { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    pub fn forward(&self, data: &mut [C]) {
        self.fwd.process(data);
    }

    /// Inverse transform including the 1/n normalization.
    pub fn inverse(&self, data: &mut [C]) {
        self.inv.process(data);
        let scale = 1.0 / self.n as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// Spectral derivative of periodic samples along a flat complex line.
pub fn derivative_line(data: &mut [C], length: f64) {
    let n = data.len();
    let fft = Fft1d::new(n);
    fft.forward(data);
    let ks = wavenumbers(n, length);
    for (v, k) in data.iter_mut().zip(ks) {
        *v *= C::new(0.0, k);
    }
    // Nyquist bin of an even-length derivative is set to zero (its sign
    // is ambiguous and it must vanish for a real derivative).
    if n % 2 == 0 {
        data[n / 2] = C::new(0.0, 0.0);
    }
    fft.inverse(data);
}

fn map_lanes(field: &ArrayD<C>, axis: usize, mut f: impl FnMut(&mut [C])) -> ArrayD<C> {
    let mut out = field.clone();
    for mut lane in out.lanes_mut(Axis(axis)) {
        let mut buf: Vec<C> = lane.iter().copied().collect();
        f(&mut buf);
        for (dst, src) in lane.iter_mut().zip(buf) {
            *dst = src;
        }
    }
    out
}

/// Spectral partial derivative of an n-dimensional periodic complex field.
pub fn derivative_axis(field: &ArrayD<C>, axis: usize, length: f64) -> ArrayD<C> {
    map_lanes(field, axis, |buf| derivative_line(buf, length))
}

/// Spectral partial derivative of a real field; returns the real part.
pub fn derivative_axis_real(field: &ArrayD<f64>, axis: usize, length: f64) -> ArrayD<f64> {
    let complex = field.mapv(|v| C::new(v, 0.0));
    derivative_axis(&complex, axis, length).mapv(|v| v.re)
}

fn fft_all_axes(field: &ArrayD<C>, inverse: bool) -> ArrayD<C> {
    let mut out = field.clone();
    for axis in 0..field.ndim() {
        out = map_lanes(&out, axis, |buf| {
            let fft = Fft1d::new(buf.len());
            if inverse {
                fft.inverse(buf);
            } else {
                fft.forward(buf);
            }
        });
    }
    out
}

/// Trigonometric interpolant of a real periodic grid field: the full
/// Fourier series evaluated at continuous points. Smooth (C-infinity),
/// so ODE integrators retain their nominal order through it.
pub struct SpectralInterpolant {
    x0: f64,
    coeffs: ArrayD<C>,
    ks: Vec<Vec<f64>>,
}

impl SpectralInterpolant {
    /// Forward-transform a field sampled on [x0, x0 + length) per axis.
    pub fn new(field: &ArrayD<f64>, x0: f64, length: f64) -> Self {
        let mut coeffs = fft_all_axes(&field.mapv(|v| C::new(v, 0.0)), false);
        let scale = 1.0 / field.len() as f64;
        coeffs.mapv_inplace(|v| v * scale);
        let ks = field.shape().iter().map(|&n| wavenumbers(n, length)).collect();
        SpectralInterpolant { x0, coeffs, ks }
    }

    /// Sum the series at a point; `deriv_axis` multiplies by ik on that
    /// axis (with the ambiguous Nyquist bin zeroed, as in the grid
    /// derivative).
    fn sum(&self, point: &[f64], deriv_axis: Option<usize>) -> f64 {
        let ndim = self.coeffs.ndim();
        assert_eq!(point.len(), ndim);
        let mut cur = self.coeffs.clone();
        for axis in (0..ndim).rev() {
            let n = self.ks[axis].len();
            let weights: Vec<C> = self.ks[axis]
                .iter()
                .enumerate()
                .map(|(i, &k)| {
                    let mut w = C::from_polar(1.0, k * (point[axis] - self.x0));
                    if deriv_axis == Some(axis) {
                        w *= C::new(0.0, k);
                        if n % 2 == 0 && i == n / 2 {
                            w = C::new(0.0, 0.0);
                        }
                    }
                    w
                })
                .collect();
            cur = cur.map_axis(Axis(axis), |lane| {
                lane.iter().zip(&weights).map(|(&v, &w)| v * w).sum()
            });
        }
        cur.iter().next().unwrap().re
    }

    pub fn value_at(&self, point: &[f64]) -> f64 {
        self.sum(point, None)
    }

    pub fn gradient_at(&self, point: &[f64], axis: usize) -> f64 {
        self.sum(point, Some(axis))
    }
}

/// Solution of laplacian(phi) = -source on the periodic box, with the
/// zero mode of phi set to zero, plus the gradient field of phi.
pub struct PoissonSolution {
    pub phi: ArrayD<f64>,
    pub gradient: Vec<ArrayD<f64>>,
    /// max |laplacian(phi) + source|
    pub residual: f64,
}

/// Spectral Poisson solve on an n-dimensional periodic box of the given
/// edge length per axis.
pub fn poisson_periodic(source: &ArrayD<f64>, length: f64) -> PoissonSolution {
    let ndim = source.ndim();
    let shape: Vec<usize> = source.shape().to_vec();
    let mut hat = fft_all_axes(&source.mapv(|v| C::new(v, 0.0)), false);
    let ks: Vec<Vec<f64>> = shape.iter().map(|&n| wavenumbers(n, length)).collect();

    for (idx, v) in hat.indexed_iter_mut() {
        let k2: f64 = (0..ndim).map(|a| ks[a][idx[a]] * ks[a][idx[a]]).sum();
        if k2 == 0.0 {
            *v = C::new(0.0, 0.0);
        } else {
            *v /= k2;
        }
    }

    let phi_hat = hat;
    let phi = fft_all_axes(&phi_hat, true).mapv(|v| v.re);

    let mut gradient = Vec::with_capacity(ndim);
    for axis in 0..ndim {
        let mut g = phi_hat.clone();
        for (idx, v) in g.indexed_iter_mut() {
            *v *= C::new(0.0, ks[axis][idx[axis]]);
        }
        gradient.push(fft_all_axes(&g, true).mapv(|v| v.re));
    }

    // residual check: laplacian reconstructed spectrally from phi
    let mut lap_hat = phi_hat;
    for (idx, v) in lap_hat.indexed_iter_mut() {
        let k2: f64 = (0..ndim).map(|a| ks[a][idx[a]] * ks[a][idx[a]]).sum();
        *v *= -k2;
    }
    let lap = fft_all_axes(&lap_hat, true).mapv(|v| v.re);
    let mut residual = 0.0f64;
    // the zero mode of the source cannot be represented by the gradient
    let mean = source.mean().unwrap_or(0.0);
    for (l, s) in lap.iter().zip(source.iter()) {
        residual = residual.max((l + s - mean).abs());
    }

    PoissonSolution { phi, gradient, residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::IxDyn;

    #[test]
    fn derivative_of_sine() {
        let n = 64;
        let l = 2.0 * std::f64::consts::PI;
        let mut data: Vec<C> = (0..n)
            .map(|i| C::new((3.0 * (i as f64) * l / n as f64).sin(), 0.0))
            .collect();
        derivative_line(&mut data, l);
        for (i, v) in data.iter().enumerate() {
            let x = i as f64 * l / n as f64;
            assert!((v.re - 3.0 * (3.0 * x).cos()).abs() < 1e-10);
            assert!(v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn spectral_interpolant_reproduces_a_band_limited_field() {
        // f(x, y) = sin(2 pi x / L) cos(4 pi y / L) on a 2d box: values,
        // samples and gradients must match the analytic form off-grid
        let n = 32;
        let l = 10.0;
        let x0 = -5.0;
        let w1 = 2.0 * std::f64::consts::PI / l;
        let f = |x: f64, y: f64| (w1 * x).sin() * (2.0 * w1 * y).cos();
        let field = ArrayD::from_shape_fn(IxDyn(&[n, n]), |idx| {
            f(x0 + idx[0] as f64 * l / n as f64, x0 + idx[1] as f64 * l / n as f64)
        });
        let interp = SpectralInterpolant::new(&field, x0, l);
        for &(x, y) in &[(0.123, -2.456), (-4.9, 3.3), (1.0, 1.0)] {
            assert!((interp.value_at(&[x, y]) - f(x, y)).abs() < 1e-12);
            let dx = w1 * (w1 * x).cos() * (2.0 * w1 * y).cos();
            let dy = -2.0 * w1 * (w1 * x).sin() * (2.0 * w1 * y).sin();
            assert!((interp.gradient_at(&[x, y], 0) - dx).abs() < 1e-12);
            assert!((interp.gradient_at(&[x, y], 1) - dy).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_single_harmonic() {
        // laplacian(phi) = -J with J = A sin(2 pi x / L) has
        // phi = A (L / 2 pi)^2 sin(2 pi x / L)
        let n = 64;
        let l = 12.0;
        let a = 0.7;
        let source = ArrayD::from_shape_fn(IxDyn(&[n]), |idx| {
            let x = idx[0] as f64 * l / n as f64;
            a * (2.0 * std::f64::consts::PI * x / l).sin()
        });
        let sol = poisson_periodic(&source, l);
        let scale = (l / (2.0 * std::f64::consts::PI)).powi(2);
        for (idx, v) in sol.phi.indexed_iter() {
            let x = idx[0] as f64 * l / n as f64;
            let expect = a * scale * (2.0 * std::f64::consts::PI * x / l).sin();
            assert!((v - expect).abs() < 1e-10, "x={x} got={v} want={expect}");
        }
        assert!(sol.residual < 1e-10);
    }

    #[test]
    fn poisson_manufactured_gaussian_2d() {
        // J = -laplacian(bump), mean-adjusted; solve recovers bump up to a constant
        let n = 64;
        let l = 16.0;
        let bump = ArrayD::from_shape_fn(IxDyn(&[n, n]), |idx| {
            let x = idx[0] as f64 * l / n as f64 - l / 2.0;
            let y = idx[1] as f64 * l / n as f64 - l / 2.0;
            (-(x * x + y * y) / 2.0).exp()
        });
        let mut lap = ArrayD::zeros(IxDyn(&[n, n]));
        for axis in 0..2 {
            let d2 = derivative_axis_real(&derivative_axis_real(&bump, axis, l), axis, l);
            lap = lap + d2;
        }
        let source = -lap;
        let sol = poisson_periodic(&source, l);
        // compare up to a constant offset
        let offset = sol.phi.first().unwrap() - bump.first().unwrap();
        for (p, b) in sol.phi.iter().zip(bump.iter()) {
            assert!((p - b - offset).abs() < 1e-8);
        }
        assert!(sol.residual < 1e-8);
    }
}
