//! Periodic grids, Fourier transforms and spectral calculus on `[0, L)`.
//!
//! Spectra are stored in FFT order: index `i` holds integer mode `i` for
//! `i <= N/2` and mode `i - N` otherwise. The normalization is
//! `û_m = (1/N) Σ_j u(x_j) exp(-i k_m x_j)`, so a constant field has
//! `û_0` equal to that constant.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::SpectralError;

/// Smallest supported number of grid points.
pub const MIN_POINTS: usize = 8;

struct GridInner {
    n: usize,
    length: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform N-point discretization of the periodic interval `[0, L)`.
///
/// Cloning is cheap; FFT plans are shared between clones and are safe to
/// use from several threads at once.
#[derive(Clone)]
pub struct PeriodicGrid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("n_points", &self.inner.n)
            .field("length", &self.inner.length)
            .finish()
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n && self.inner.length == other.inner.length
    }
}

impl PeriodicGrid {
    pub fn new(n_points: usize, length: f64) -> Result<Self, SpectralError> {
        if n_points < MIN_POINTS || !n_points.is_multiple_of(2) {
            return Err(SpectralError::InvalidPointCount(n_points));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(SpectralError::InvalidLength(length));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n_points);
        let inverse = planner.plan_fft_inverse(n_points);
        Ok(Self {
            inner: Arc::new(GridInner {
                n: n_points,
                length,
                forward,
                inverse,
            }),
        })
    }

    pub fn n_points(&self) -> usize {
        self.inner.n
    }

    pub fn length(&self) -> f64 {
        self.inner.length
    }

    pub fn spacing(&self) -> f64 {
        self.inner.length / self.inner.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.inner.n).map(|j| self.node(j)).collect()
    }

    /// Integer mode number stored at FFT index `index`.
    pub fn mode(&self, index: usize) -> i64 {
        let n = self.inner.n;
        if index <= n / 2 {
            index as i64
        } else {
            index as i64 - n as i64
        }
    }

    /// FFT index holding integer mode `m`, for `-N/2 < m <= N/2`.
    pub fn index_of_mode(&self, m: i64) -> Option<usize> {
        let half = (self.inner.n / 2) as i64;
        if m > half || m <= -half {
            return None;
        }
        Some(if m >= 0 {
            m as usize
        } else {
            (m + self.inner.n as i64) as usize
        })
    }

    pub fn nyquist_index(&self) -> usize {
        self.inner.n / 2
    }

    /// Physical wavenumber `2πm/L` for the mode stored at `index`.
    pub fn wavenumber(&self, index: usize) -> f64 {
        2.0 * PI * self.mode(index) as f64 / self.inner.length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.inner.n).map(|i| self.wavenumber(i)).collect()
    }

    /// Largest mode kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.inner.n / 3) as i64
    }

    fn forward(&self, buffer: &mut [Complex64]) {
        self.inner.forward.process(buffer);
    }

    fn inverse(&self, buffer: &mut [Complex64]) {
        self.inner.inverse.process(buffer);
    }
}

/// Real-valued grid function with a lazily computed spectrum.
pub struct Field {
    grid: PeriodicGrid,
    samples: Vec<f64>,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl Clone for Field {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Self {
            grid: self.grid.clone(),
            samples: self.samples.clone(),
            spectrum,
        }
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("grid", &self.grid)
            .field("samples", &self.samples)
            .finish()
    }
}

impl Field {
    pub fn from_samples(grid: &PeriodicGrid, samples: Vec<f64>) -> Result<Self, SpectralError> {
        if samples.len() != grid.n_points() {
            return Err(SpectralError::DimensionMismatch {
                expected: grid.n_points(),
                actual: samples.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            samples,
            spectrum: OnceLock::new(),
        })
    }

    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(f64) -> f64) -> Self {
        let samples = grid.nodes().into_iter().map(f).collect();
        Self {
            grid: grid.clone(),
            samples,
            spectrum: OnceLock::new(),
        }
    }

    pub fn constant(grid: &PeriodicGrid, value: f64) -> Self {
        Self::from_fn(grid, |_| value)
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Builds a field from FFT-ordered coefficients. Only the real part of
    /// the synthesized samples is kept, so coefficients that are not
    /// conjugate-symmetric are projected onto the nearest real field.
    pub fn from_spectrum(
        grid: &PeriodicGrid,
        coefficients: &[Complex64],
    ) -> Result<Self, SpectralError> {
        if coefficients.len() != grid.n_points() {
            return Err(SpectralError::DimensionMismatch {
                expected: grid.n_points(),
                actual: coefficients.len(),
            });
        }
        Ok(Self::from_spectrum_vec(grid, coefficients.to_vec()))
    }

    /// Keeps the conjugate-symmetric part of `buffer` as the cached spectrum,
    /// so coefficients that are exactly zero stay zero.
    pub(crate) fn from_spectrum_vec(grid: &PeriodicGrid, mut buffer: Vec<Complex64>) -> Self {
        let n = buffer.len();
        let symmetric: Vec<Complex64> = (0..n)
            .map(|i| 0.5 * (buffer[i] + buffer[(n - i) % n].conj()))
            .collect();
        grid.inverse(&mut buffer);
        let samples = buffer.iter().map(|c| c.re).collect();
        Self {
            grid: grid.clone(),
            samples,
            spectrum: OnceLock::from(symmetric),
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// FFT-ordered Fourier coefficients, computed on first access.
    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| {
            let n = self.samples.len();
            let mut buffer: Vec<Complex64> = self
                .samples
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect();
            self.grid.forward(&mut buffer);
            let scale = 1.0 / n as f64;
            for c in &mut buffer {
                *c *= scale;
            }
            buffer
        })
    }

    /// Coefficient of integer mode `m`, or zero when `m` is not resolved.
    pub fn coefficient(&self, m: i64) -> Complex64 {
        match self.grid.index_of_mode(m) {
            Some(i) => self.spectrum()[i],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Multiplies every coefficient by `multiplier(index, wavenumber)`.
    pub fn map_spectrum(&self, multiplier: impl Fn(usize, f64) -> Complex64) -> Field {
        let buffer: Vec<Complex64> = self
            .spectrum()
            .iter()
            .enumerate()
            .map(|(i, &c)| c * multiplier(i, self.grid.wavenumber(i)))
            .collect();
        Field::from_spectrum_vec(&self.grid, buffer)
    }

    /// Spectral derivative of the given order. The Nyquist mode is dropped
    /// for odd orders so that the result stays real.
    pub fn derivative(&self, order: u32) -> Result<Field, SpectralError> {
        let limit = (self.grid.n_points() / 4) as u32;
        if order > limit {
            return Err(SpectralError::DerivativeOrder { order, limit });
        }
        Ok(self.derivative_unchecked(order))
    }

    pub(crate) fn derivative_unchecked(&self, order: u32) -> Field {
        if order == 0 {
            return self.clone();
        }
        let nyquist = self.grid.nyquist_index();
        self.map_spectrum(|i, k| {
            if i == nyquist && order % 2 == 1 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k).powu(order)
            }
        })
    }

    /// Discrete `H^s` norm `sqrt(L Σ_m (1 + k_m²)^s |û_m|²)`.
    pub fn sobolev_norm(&self, s: u32) -> f64 {
        let sum: f64 = self
            .spectrum()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = self.grid.wavenumber(i);
                (1.0 + k * k).powi(s as i32) * c.norm_sqr()
            })
            .sum();
        (self.grid.length() * sum).sqrt()
    }

    /// Discrete L² norm from the samples, `sqrt((L/N) Σ_j u_j²)`.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.samples.iter().map(|x| x * x).sum();
        (self.grid.spacing() * sum).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// 2/3 rule: zero every mode with `|m| > N/3`.
    pub fn dealias(&self) -> Field {
        self.truncate(self.grid.dealias_cutoff())
    }

    /// Zeroes every mode with `|m| > max_mode`.
    pub fn truncate(&self, max_mode: i64) -> Field {
        self.map_spectrum(|i, _| {
            if self.grid.mode(i).abs() > max_mode {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
    }

    /// Largest `|m|` whose coefficient exceeds `rel_tol` times the largest
    /// coefficient magnitude. Zero for the zero field.
    pub fn bandwidth(&self, rel_tol: f64) -> i64 {
        let spectrum = self.spectrum();
        let peak = spectrum.iter().fold(0.0_f64, |acc, c| acc.max(c.norm()));
        if peak == 0.0 {
            return 0;
        }
        spectrum
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > rel_tol * peak)
            .map(|(i, _)| self.grid.mode(i).abs())
            .max()
            .unwrap_or(0)
    }

    /// Pointwise product on the grid, without dealiasing.
    pub fn pointwise(&self, other: &Field) -> Field {
        debug_assert_eq!(self.grid, other.grid);
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .collect();
        Field {
            grid: self.grid.clone(),
            samples,
            spectrum: OnceLock::new(),
        }
    }

    /// Dealiased product.
    pub fn product(&self, other: &Field) -> Field {
        self.pointwise(other).dealias()
    }

    pub fn scale(&self, factor: f64) -> Field {
        let mut out = self.map_samples(|x| factor * x);
        if let Some(s) = self.spectrum.get() {
            out.spectrum = OnceLock::from(s.iter().map(|c| c * factor).collect::<Vec<_>>());
        }
        out
    }

    pub fn map_samples(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|&x| f(x)).collect(),
            spectrum: OnceLock::new(),
        }
    }

    /// Mirror image `u(-x)`, sampled on the same grid.
    pub fn reflect(&self) -> Field {
        let n = self.samples.len();
        let samples = (0..n).map(|j| self.samples[(n - j) % n]).collect();
        Field {
            grid: self.grid.clone(),
            samples,
            spectrum: OnceLock::new(),
        }
    }

    pub fn max_abs_difference(&self, other: &Field) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Evaluates the trigonometric interpolant at arbitrary points.
    pub fn interpolate(&self, points: &[f64]) -> Vec<f64> {
        let interpolant = Interpolant::new(self);
        points.iter().map(|&x| interpolant.eval(x)).collect()
    }

    /// Applies a linear combination to samples and, when both operands
    /// carry one, to the cached spectra as well.
    fn combine(
        &self,
        other: &Field,
        f: impl Fn(f64, f64) -> f64,
        g: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Field {
        debug_assert_eq!(self.grid, other.grid);
        let spectrum = match (self.spectrum.get(), other.spectrum.get()) {
            (Some(a), Some(b)) => {
                OnceLock::from(a.iter().zip(b).map(|(&x, &y)| g(x, y)).collect::<Vec<_>>())
            }
            _ => OnceLock::new(),
        };
        Field {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            spectrum,
        }
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.combine(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.combine(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale(-1.0)
    }
}

impl Mul<&Field> for f64 {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        rhs.scale(self)
    }
}

/// Precomputed trigonometric interpolant of a field, evaluated by direct
/// summation over the resolved modes (O(N) per point).
pub struct Interpolant {
    mean: f64,
    // (û_m for m = 1..N/2-1), each counted twice via the real part.
    positive: Vec<Complex64>,
    nyquist: f64,
    base_wavenumber: f64,
    length: f64,
}

impl Interpolant {
    pub fn new(field: &Field) -> Self {
        let grid = field.grid();
        let spectrum = field.spectrum();
        let half = grid.n_points() / 2;
        Self {
            mean: spectrum[0].re,
            positive: spectrum[1..half].to_vec(),
            nyquist: spectrum[half].re,
            base_wavenumber: 2.0 * PI / grid.length(),
            length: grid.length(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.rem_euclid(self.length);
        let theta = self.base_wavenumber * x;
        let step = Complex64::from_polar(1.0, theta);
        let mut phase = step;
        let mut acc = 0.0;
        for (m, c) in self.positive.iter().enumerate() {
            // Re-anchor the recurrence periodically to bound drift.
            if m % 32 == 31 {
                phase = Complex64::from_polar(1.0, theta * (m + 1) as f64);
            }
            acc += c.re * phase.re - c.im * phase.im;
            phase *= step;
        }
        let half = (self.positive.len() + 1) as f64;
        self.mean + 2.0 * acc + self.nyquist * (theta * half).cos()
    }

    /// Value and first derivative of the interpolant at `x`.
    pub fn eval_with_slope(&self, x: f64) -> (f64, f64) {
        let x = x.rem_euclid(self.length);
        let theta = self.base_wavenumber * x;
        let step = Complex64::from_polar(1.0, theta);
        let mut phase = step;
        let mut value = 0.0;
        let mut slope = 0.0;
        for (m, c) in self.positive.iter().enumerate() {
            if m % 32 == 31 {
                phase = Complex64::from_polar(1.0, theta * (m + 1) as f64);
            }
            let term = c * phase;
            value += term.re;
            // d/dx of c e^{ikx} = i k c e^{ikx}
            slope -= (m + 1) as f64 * term.im;
            phase *= step;
        }
        let half = (self.positive.len() + 1) as f64;
        (
            self.mean + 2.0 * value + self.nyquist * (theta * half).cos(),
            2.0 * self.base_wavenumber * slope,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_pi_grid(n: usize) -> PeriodicGrid {
        PeriodicGrid::new(n, 2.0 * PI).unwrap()
    }

    #[test]
    fn grid_rejects_odd_and_small() {
        assert!(PeriodicGrid::new(7, 1.0).is_err());
        assert!(PeriodicGrid::new(6, 1.0).is_err());
        assert!(PeriodicGrid::new(10, 0.0).is_err());
        assert!(PeriodicGrid::new(10, f64::NAN).is_err());
        assert!(PeriodicGrid::new(8, 1.0).is_ok());
    }

    #[test]
    fn grid_nodes_and_modes() {
        let g = PeriodicGrid::new(16, 3.0).unwrap();
        let x = g.nodes();
        assert_eq!(x[0], 0.0);
        assert!(x.windows(2).all(|w| w[1] > w[0]));
        assert!(*x.last().unwrap() < 3.0);
        assert_eq!(g.wavenumber(0), 0.0);
        assert_eq!(g.mode(8), 8);
        assert_eq!(g.mode(9), -7);
        assert_eq!(g.index_of_mode(-7), Some(9));
        assert_eq!(g.index_of_mode(-8), None);
    }

    #[test]
    fn constant_spectrum() {
        let g = two_pi_grid(32);
        let u = Field::constant(&g, 1.0);
        let s = u.spectrum();
        assert!((s[0].re - 1.0).abs() < 1e-15);
        assert!(s[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn single_sine_spectrum() {
        let g = PeriodicGrid::new(32, 5.0).unwrap();
        let u = Field::from_fn(&g, |x| (2.0 * PI * x / 5.0).sin());
        let plus = u.coefficient(1);
        let minus = u.coefficient(-1);
        assert!((plus - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((minus - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        for m in 2..=16 {
            assert!(u.coefficient(m).norm() < 1e-15);
        }
    }

    #[test]
    fn spectrum_size_mismatch() {
        let g = two_pi_grid(16);
        let err = Field::from_spectrum(&g, &[Complex64::new(0.0, 0.0); 8]).unwrap_err();
        assert!(matches!(
            err,
            SpectralError::DimensionMismatch {
                expected: 16,
                actual: 8
            }
        ));
        assert!(Field::from_samples(&g, vec![0.0; 15]).is_err());
    }

    #[test]
    fn derivative_of_sine() {
        let l = 3.7;
        let g = PeriodicGrid::new(64, l).unwrap();
        let k = 2.0 * PI / l;
        let u = Field::from_fn(&g, |x| (k * x).sin());
        let du = u.derivative(1).unwrap();
        let exact = Field::from_fn(&g, |x| k * (k * x).cos());
        assert!(du.max_abs_difference(&exact) <= 1e-10 * k);
        assert_eq!(u.derivative(0).unwrap().samples(), u.samples());
    }

    #[test]
    fn derivative_order_guard() {
        let g = two_pi_grid(16);
        let u = Field::constant(&g, 1.0);
        assert!(u.derivative(4).is_ok());
        assert!(matches!(
            u.derivative(5),
            Err(SpectralError::DerivativeOrder { order: 5, limit: 4 })
        ));
    }

    #[test]
    fn odd_derivative_drops_nyquist() {
        let g = two_pi_grid(16);
        let u = Field::from_fn(&g, |x| (8.0 * x).cos());
        assert!(u.derivative(1).unwrap().linf_norm() < 1e-12);
        let d2 = u.derivative(2).unwrap();
        assert!((d2.linf_norm() - 64.0).abs() < 1e-9);
    }

    #[test]
    fn sobolev_norm_examples() {
        let g = two_pi_grid(32);
        let zero = Field::zeros(&g);
        for s in 0..5 {
            assert_eq!(zero.sobolev_norm(s), 0.0);
        }
        let u = Field::from_fn(&g, f64::sin);
        // L Σ (1+k²)|û|² over m = ±1 with |û| = 1/2.
        let expected = (2.0 * PI * 2.0 * 2.0 * 0.25_f64).sqrt();
        assert!((u.sobolev_norm(1) - expected).abs() < 1e-12);
        assert!((u.sobolev_norm(0) - u.l2_norm()).abs() < 1e-12);
    }

    #[test]
    fn linf_examples() {
        let g = two_pi_grid(64);
        assert!((Field::from_fn(&g, f64::sin).linf_norm() - 1.0).abs() < 1e-12);
        assert_eq!(Field::constant(&g, -3.0).linf_norm(), 3.0);
    }

    #[test]
    fn dealias_examples() {
        let g = two_pi_grid(48);
        let band = Field::from_fn(&g, |x| (12.0 * x).sin() + (3.0 * x).cos());
        assert!(band.dealias().max_abs_difference(&band) < 1e-13);
        let nyquist = Field::from_fn(&g, |x| (24.0 * x).cos());
        assert!(nyquist.dealias().linf_norm() < 1e-14);
    }

    #[test]
    fn interpolation_at_nodes_and_resolved_mode() {
        let g = PeriodicGrid::new(32, 2.5).unwrap();
        let u = Field::from_fn(&g, |x| {
            (2.0 * PI * x / 2.5).cos() + 0.3 * (6.0 * PI * x / 2.5).sin()
        });
        let at_nodes = u.interpolate(&g.nodes());
        for (a, b) in at_nodes.iter().zip(u.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
        let v = Field::from_fn(&g, |x| (2.0 * PI * x / 2.5).cos());
        let val = v.interpolate(&[2.5 / 8.0])[0];
        assert!((val - 0.7071067811865476).abs() < 1e-12);
        // Periodic reduction of the argument.
        let wrapped = v.interpolate(&[2.5 / 8.0 + 2.5 * 3.0, 2.5 / 8.0 - 2.5])[..].to_vec();
        assert!(wrapped
            .iter()
            .all(|w| (w - 0.7071067811865476).abs() < 1e-12));
    }

    #[test]
    fn interpolant_slope_matches_derivative() {
        let g = two_pi_grid(64);
        let u = Field::from_fn(&g, |x| (x.sin()).exp());
        let du = u.derivative(1).unwrap();
        let interp = Interpolant::new(&u);
        for (j, x) in g.nodes().into_iter().enumerate() {
            let (v, s) = interp.eval_with_slope(x);
            assert!((v - u.samples()[j]).abs() < 1e-12);
            assert!((s - du.samples()[j]).abs() < 1e-11);
        }
    }

    #[test]
    fn reflect_is_mirror() {
        let g = two_pi_grid(16);
        let u = Field::from_fn(&g, |x| x.sin() + 0.5 * (2.0 * x).cos());
        let r = u.reflect();
        let exact = Field::from_fn(&g, |x| (-x).sin() + 0.5 * (-2.0 * x).cos());
        assert!(r.max_abs_difference(&exact) < 1e-14);
    }
}
