//! Dispersion polynomials, equation presets and Sobolev index bookkeeping.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::spectral::{Field, PeriodicGrid};

/// Real polynomial `P(X) = Σ_{j=2}^{ℓ} a_j X^j` defining `A = P(∂x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionSymbol {
    /// `coefficients[j]` is `a_j`; entries 0 and 1 are always zero.
    coefficients: Vec<f64>,
}

impl DispersionSymbol {
    /// Builds a symbol from `(order, coefficient)` terms. Repeated orders
    /// are summed.
    pub fn from_terms(terms: &[(usize, f64)]) -> Result<Self, ModelError> {
        let top = terms.iter().map(|&(j, _)| j).max().unwrap_or(0);
        let mut coefficients = vec![0.0; top + 1];
        for &(order, value) in terms {
            if !value.is_finite() {
                return Err(ModelError::NonFiniteCoefficient { order, value });
            }
            if order < 2 && value != 0.0 {
                return Err(ModelError::LowOrderTerm(order));
            }
            coefficients[order] += value;
        }
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        if coefficients.len() < 3 {
            return Err(ModelError::InvalidDegree);
        }
        Ok(Self { coefficients })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficient(&self, order: usize) -> f64 {
        self.coefficients.get(order).copied().unwrap_or(0.0)
    }

    /// Nonzero `(order, a_order)` pairs in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(j, a)| (j, *a))
    }

    /// `P(ik)`.
    pub fn eval(&self, k: f64) -> Complex64 {
        let ik = Complex64::new(0.0, k);
        self.terms().map(|(j, a)| a * ik.powu(j as u32)).sum()
    }

    /// `P(ik)` with odd powers dropped, the multiplier used on the Nyquist
    /// mode (matches the real-output convention of odd derivatives).
    fn eval_even_part(&self, k: f64) -> Complex64 {
        let ik = Complex64::new(0.0, k);
        self.terms()
            .filter(|(j, _)| j % 2 == 0)
            .map(|(j, a)| a * ik.powu(j as u32))
            .sum()
    }

    /// Copy with every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|a| a * factor).collect(),
        }
    }
}

impl fmt::Display for DispersionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, a) in self.terms() {
            if first {
                write!(f, "{a}*X^{j}")?;
                first = false;
            } else if a < 0.0 {
                write!(f, " - {}*X^{j}", -a)?;
            } else {
                write!(f, " + {a}*X^{j}")?;
            }
        }
        Ok(())
    }
}

/// `P(i k_m)` for every grid mode, in FFT order. The Nyquist entry keeps
/// only the even-power part.
pub fn symbol_values(symbol: &DispersionSymbol, grid: &PeriodicGrid) -> Vec<Complex64> {
    let nyquist = grid.nyquist_index();
    (0..grid.n_points())
        .map(|i| {
            let k = grid.wavenumber(i);
            if i == nyquist {
                symbol.eval_even_part(k)
            } else {
                symbol.eval(k)
            }
        })
        .collect()
}

/// Applies `P(∂x)` spectrally.
pub fn apply_symbol(symbol: &DispersionSymbol, field: &Field) -> Field {
    let values = symbol_values(symbol, field.grid());
    field.map_spectrum(|i, _| values[i])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeViolation {
    pub mode: i64,
    pub real_part: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DissipativityReport {
    pub passed: bool,
    /// Largest `Re P(ik_m)` over all modes (0 for purely dispersive symbols).
    pub max_real_part: f64,
    pub min_real_part: f64,
    pub max_imag_part: f64,
    pub min_imag_part: f64,
    pub tolerance: f64,
    /// Modes with `Re P(ik_m)` above tolerance, sorted by mode number.
    pub violations: Vec<ModeViolation>,
}

impl DissipativityReport {
    pub fn worst(&self) -> Option<&ModeViolation> {
        self.violations.iter().max_by(|a, b| {
            a.real_part
                .total_cmp(&b.real_part)
                .then(b.mode.cmp(&a.mode))
        })
    }
}

/// Checks `Re P(ik_m) <= 1e-12 * max|P(ik)|` on every grid mode.
///
/// In strict mode a violation is returned as an error; otherwise the report
/// carries the violations and `passed == false`.
pub fn validate_dissipativity(
    symbol: &DispersionSymbol,
    grid: &PeriodicGrid,
    strict: bool,
) -> Result<DissipativityReport, ModelError> {
    let values = symbol_values(symbol, grid);
    let scale = values.iter().fold(0.0_f64, |acc, v| acc.max(v.norm()));
    let tolerance = 1e-12 * scale;
    let mut report = DissipativityReport {
        passed: true,
        max_real_part: f64::NEG_INFINITY,
        min_real_part: f64::INFINITY,
        max_imag_part: f64::NEG_INFINITY,
        min_imag_part: f64::INFINITY,
        tolerance,
        violations: Vec::new(),
    };
    for (i, v) in values.iter().enumerate() {
        report.max_real_part = report.max_real_part.max(v.re);
        report.min_real_part = report.min_real_part.min(v.re);
        report.max_imag_part = report.max_imag_part.max(v.im);
        report.min_imag_part = report.min_imag_part.min(v.im);
        if v.re > tolerance {
            report.violations.push(ModeViolation {
                mode: grid.mode(i),
                real_part: v.re,
            });
        }
    }
    report.violations.sort_by_key(|v| v.mode);
    report.passed = report.violations.is_empty();
    if strict && !report.passed {
        let worst = report.worst().expect("violations present");
        return Err(ModelError::Dissipativity {
            worst_mode: worst.mode,
            max_real_part: worst.real_part,
            modes: report.violations.iter().map(|v| v.mode).collect(),
        });
    }
    Ok(report)
}

/// Named equations of the form `u_t = P(∂x)u + u u_x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetName {
    ViscousBurgers,
    Kdv,
    BenneyLin,
    Kawahara,
}

impl PresetName {
    pub const ALL: [PresetName; 4] = [
        PresetName::ViscousBurgers,
        PresetName::Kdv,
        PresetName::BenneyLin,
        PresetName::Kawahara,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::ViscousBurgers => "viscous-burgers",
            PresetName::Kdv => "kdv",
            PresetName::BenneyLin => "benney-lin",
            PresetName::Kawahara => "kawahara",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| ModelError::UnknownPreset(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationPreset {
    pub name: PresetName,
    /// Only meaningful for Benney–Lin.
    pub beta: f64,
    pub symbol: DispersionSymbol,
}

/// Builds a named preset. `beta` is only read for Benney–Lin (default 0).
pub fn make_preset(name: &str, beta: Option<f64>) -> Result<EquationPreset, ModelError> {
    let name: PresetName = name.parse()?;
    preset(name, beta.unwrap_or(0.0))
}

pub fn preset(name: PresetName, beta: f64) -> Result<EquationPreset, ModelError> {
    let terms: Vec<(usize, f64)> = match name {
        PresetName::ViscousBurgers => vec![(2, 1.0)],
        PresetName::Kdv => vec![(3, 1.0)],
        PresetName::BenneyLin => {
            if !(beta >= 0.0 && beta.is_finite()) {
                return Err(ModelError::InvalidBeta(beta));
            }
            vec![(2, -beta), (3, -1.0), (4, -beta), (5, -1.0)]
        }
        PresetName::Kawahara => vec![(3, -1.0), (5, 1.0)],
    };
    let beta = if name == PresetName::BenneyLin {
        beta
    } else {
        0.0
    };
    Ok(EquationPreset {
        name,
        beta,
        symbol: DispersionSymbol::from_terms(&terms)?,
    })
}

/// Regularity indices `p = r + 2ℓ - 1`, `q = r + ℓ - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SobolevIndices {
    pub r: u32,
    pub ell: u32,
    pub q: u32,
    pub p: u32,
}

pub fn indices_for(r: u32, ell: u32) -> Result<SobolevIndices, ModelError> {
    if r < 1 || ell < 2 {
        return Err(ModelError::InvalidIndices { r, ell });
    }
    Ok(SobolevIndices {
        r,
        ell,
        q: r + ell - 1,
        p: r + 2 * ell - 1,
    })
}
