//! Named initial-condition families.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::spectral::{Field, PeriodicGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `amplitude · sin(2π · mode · x / L)`.
    Sine { amplitude: f64, mode: u32 },
    /// `amplitude · exp(-((x - center) / width)²)`.
    Gaussian {
        amplitude: f64,
        width: f64,
        center: f64,
    },
    /// KdV traveling wave `3c sech²(√c (x - center) / 2)`; center defaults
    /// to `L/2`.
    Soliton {
        c: f64,
        #[serde(default)]
        center: Option<f64>,
    },
    /// Seeded random Fourier coefficients on modes `1..=max_mode`, scaled
    /// so that `max |u| = amplitude`.
    RandomBandlimited {
        max_mode: u32,
        amplitude: f64,
        seed: u64,
    },
}

impl InitialCondition {
    pub fn family(&self) -> &'static str {
        match self {
            InitialCondition::Sine { .. } => "sine",
            InitialCondition::Gaussian { .. } => "gaussian",
            InitialCondition::Soliton { .. } => "soliton",
            InitialCondition::RandomBandlimited { .. } => "random-bandlimited",
        }
    }

    /// Parameter checks that do not depend on the grid.
    pub fn validate(&self) -> Result<(), String> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be finite"))
            }
        };
        match *self {
            InitialCondition::Sine { amplitude, .. } => finite("amplitude", amplitude),
            InitialCondition::Gaussian {
                amplitude,
                width,
                center,
            } => {
                finite("amplitude", amplitude)?;
                finite("center", center)?;
                if width > 0.0 && width.is_finite() {
                    Ok(())
                } else {
                    Err("width must be positive".into())
                }
            }
            InitialCondition::Soliton { c, center } => {
                if let Some(x0) = center {
                    finite("center", x0)?;
                }
                if c > 0.0 && c.is_finite() {
                    Ok(())
                } else {
                    Err("soliton speed c must be positive".into())
                }
            }
            InitialCondition::RandomBandlimited {
                max_mode,
                amplitude,
                ..
            } => {
                finite("amplitude", amplitude)?;
                if max_mode == 0 {
                    Err("max_mode must be at least 1".into())
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn sample(&self, grid: &PeriodicGrid) -> Field {
        let l = grid.length();
        match *self {
            InitialCondition::Sine { amplitude, mode } => {
                Field::from_fn(grid, |x| amplitude * (2.0 * PI * mode as f64 * x / l).sin())
            }
            InitialCondition::Gaussian {
                amplitude,
                width,
                center,
            } => Field::from_fn(grid, |x| {
                let z = (x - center) / width;
                amplitude * (-z * z).exp()
            }),
            InitialCondition::Soliton { c, center } => {
                let x0 = center.unwrap_or(0.5 * l);
                Field::from_fn(grid, |x| kdv_soliton(c, x - x0, 0.0))
            }
            InitialCondition::RandomBandlimited {
                max_mode,
                amplitude,
                seed,
            } => random_bandlimited(grid, max_mode, amplitude, seed),
        }
    }
}

/// `3c sech²(√c (x + ct) / 2)`, a traveling wave of `u_t = u_xxx + u u_x`
/// moving left with speed `c`.
pub fn kdv_soliton(c: f64, x: f64, t: f64) -> f64 {
    let s = 1.0 / (0.5 * c.sqrt() * (x + c * t)).cosh();
    3.0 * c * s * s
}

/// Random real field with modes `1..=max_mode` drawn uniformly in the unit
/// square and normalized to `max |u| = amplitude`. Modes beyond the grid's
/// Nyquist limit are ignored.
pub fn random_bandlimited(grid: &PeriodicGrid, max_mode: u32, amplitude: f64, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n_points();
    let top = (max_mode as usize).min(n / 2 - 1);
    let mut coefficients = vec![Complex64::new(0.0, 0.0); n];
    for m in 1..=top {
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        coefficients[m] = c;
        coefficients[n - m] = c.conj();
    }
    let raw = Field::from_spectrum(grid, &coefficients).expect("sized to grid");
    let peak = raw.linf_norm();
    if peak == 0.0 {
        raw
    } else {
        raw.scale(amplitude / peak)
    }
}
