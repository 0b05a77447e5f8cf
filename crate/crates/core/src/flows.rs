//! The two subflows of the splitting: the exact linear flow `exp(tA)` with
//! `A = P(∂x)` and the inviscid Burgers flow of `w_t = w w_x`, together
//! with the Lie commutators `[A, B]` and `[A, [A, B]]` for `B(u) = u u_x`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::FlowError;
use crate::model::{apply_symbol, symbol_values, DispersionSymbol};
use crate::spectral::{Field, Interpolant};

/// What to do when `exp(tA)` would amplify a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthPolicy {
    #[default]
    Reject,
    Allow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BurgersMethod {
    #[default]
    Characteristics,
    SpectralRk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurgersSolveOptions {
    /// Absolute fixed-point residual of the characteristic equation.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Fraction of the shock time a single Burgers flow may cover.
    pub safety_fraction: f64,
    pub method: BurgersMethod,
    /// RK4 substeps; chosen from the shock guard and an advective CFL
    /// bound when `None`.
    pub rk_substeps: Option<usize>,
}

impl Default for BurgersSolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 100,
            safety_fraction: 0.5,
            method: BurgersMethod::Characteristics,
            rk_substeps: None,
        }
    }
}

impl BurgersSolveOptions {
    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(FlowError::InvalidOptions(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(FlowError::InvalidOptions(
                "max_iterations must be positive".into(),
            ));
        }
        if !(self.safety_fraction > 0.0 && self.safety_fraction < 1.0) {
            return Err(FlowError::InvalidOptions(format!(
                "safety_fraction must lie in (0, 1), got {}",
                self.safety_fraction
            )));
        }
        if self.rk_substeps == Some(0) {
            return Err(FlowError::InvalidOptions(
                "rk_substeps must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `B(u) = u u_x`, dealiased.
pub fn apply_b(u: &Field) -> Field {
    u.product(&u.derivative_unchecked(1))
}

/// `exp(tA) u`, rejecting any mode the symbol would amplify.
pub fn linear_flow(u: &Field, t: f64, symbol: &DispersionSymbol) -> Result<Field, FlowError> {
    linear_flow_with(u, t, symbol, GrowthPolicy::Reject)
}

pub fn linear_flow_with(
    u: &Field,
    t: f64,
    symbol: &DispersionSymbol,
    policy: GrowthPolicy,
) -> Result<Field, FlowError> {
    if t < 0.0 {
        return Err(FlowError::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(u.clone());
    }
    let grid = u.grid();
    let values = symbol_values(symbol, grid);
    if policy == GrowthPolicy::Reject {
        let scale = values.iter().fold(0.0_f64, |acc, v| acc.max(v.norm()));
        let tolerance = 1e-12 * scale * t;
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.re * t > tolerance)
            .max_by(|a, b| a.1.re.total_cmp(&b.1.re))
        {
            return Err(FlowError::Amplification {
                mode: grid.mode(i),
                exponent: v.re * t,
            });
        }
    }
    Ok(u.map_spectrum(|i, _| (values[i] * t).exp()))
}

/// Blow-up time `1 / max u'` of `w_t = w w_x`, or infinity when `u` has
/// no positive slope.
pub fn shock_time(u: &Field) -> f64 {
    let grid = u.grid();
    let slope = u.derivative_unchecked(1);
    let max_slope = slope
        .samples()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    // Slopes at round-off level of the transform count as flat.
    let k_max = grid.wavenumber(grid.nyquist_index()).abs();
    let noise = 1e-12 * k_max * u.linf_norm();
    if max_slope <= noise {
        f64::INFINITY
    } else {
        1.0 / max_slope
    }
}

fn check_burgers_step(u0: &Field, t: f64, opts: &BurgersSolveOptions) -> Result<f64, FlowError> {
    opts.validate()?;
    if t < 0.0 {
        return Err(FlowError::NegativeTime(t));
    }
    let shock = shock_time(u0);
    if t > opts.safety_fraction * shock {
        return Err(FlowError::StepTooLarge {
            t,
            shock_time: shock,
            safety_fraction: opts.safety_fraction,
        });
    }
    Ok(shock)
}

/// Burgers flow with the method selected in `opts`.
pub fn burgers_subflow(u0: &Field, t: f64, opts: &BurgersSolveOptions) -> Result<Field, FlowError> {
    match opts.method {
        BurgersMethod::Characteristics => burgers_flow(u0, t, opts),
        BurgersMethod::SpectralRk4 => burgers_flow_rk(u0, t, opts),
    }
}

/// Exact Burgers flow by characteristics: at each node solve
/// `w = u0(x_j + t w)` with a damped fixed-point iteration, evaluating `u0`
/// off-grid through its trigonometric interpolant.
pub fn burgers_flow(u0: &Field, t: f64, opts: &BurgersSolveOptions) -> Result<Field, FlowError> {
    check_burgers_step(u0, t, opts)?;
    if t == 0.0 {
        return Ok(u0.clone());
    }
    let grid = u0.grid();
    let interpolant = Interpolant::new(u0);
    let slope = u0.derivative_unchecked(1);
    let (min_slope, max_slope) = slope
        .samples()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
            (lo.min(s), hi.max(s))
        });
    // g(w) = u0(x + t w) has g' in [t min u0', t max u0'] with t max u0' < 1.
    // The relaxation weight centres that interval on the optimal rate.
    let damping = 2.0 / (2.0 - t * max_slope - t * min_slope);

    let nodes = grid.nodes();
    let solved: Vec<Result<f64, (usize, f64)>> = nodes
        .par_iter()
        .zip(u0.samples().par_iter())
        .map(|(&x, &start)| {
            let mut w = start;
            let mut residual = f64::INFINITY;
            for _ in 0..opts.max_iterations {
                let g = interpolant.eval(x + t * w);
                residual = (g - w).abs();
                let next = w + damping * (g - w);
                if residual <= opts.tolerance {
                    return Ok(next);
                }
                w = next;
            }
            Err((opts.max_iterations, residual))
        })
        .collect();

    let mut samples = Vec::with_capacity(solved.len());
    for value in solved {
        match value {
            Ok(w) => samples.push(w),
            Err((iterations, residual)) => {
                return Err(FlowError::NoConvergence {
                    iterations,
                    residual,
                })
            }
        }
    }
    Ok(Field::from_samples(grid, samples)?)
}

/// Number of RK4 substeps used when none is configured: enough to respect
/// both the shock guard and an advective CFL number of 1/2 on the
/// dealiased band.
pub fn default_rk_substeps(u0: &Field, t: f64, opts: &BurgersSolveOptions) -> usize {
    let grid = u0.grid();
    let shock = shock_time(u0);
    let guard = if shock.is_finite() {
        (t / (opts.safety_fraction * shock)).ceil()
    } else {
        1.0
    };
    let k_cut = 2.0 * std::f64::consts::PI * grid.dealias_cutoff() as f64 / grid.length();
    let cfl = (t * u0.linf_norm() * k_cut / 0.5).ceil();
    guard.max(cfl).max(1.0) as usize
}

/// Classical RK4 on `dw/dt = B(w)` with uniform substeps.
pub fn burgers_flow_rk(u0: &Field, t: f64, opts: &BurgersSolveOptions) -> Result<Field, FlowError> {
    check_burgers_step(u0, t, opts)?;
    if t == 0.0 {
        return Ok(u0.clone());
    }
    let substeps = opts
        .rk_substeps
        .unwrap_or_else(|| default_rk_substeps(u0, t, opts));
    let h = t / substeps as f64;
    let mut w = u0.clone();
    for substep in 0..substeps {
        let k1 = apply_b(&w);
        let k2 = apply_b(&(&w + &k1.scale(0.5 * h)));
        let k3 = apply_b(&(&w + &k2.scale(0.5 * h)));
        let k4 = apply_b(&(&w + &k3.scale(h)));
        let samples: Vec<f64> = (0..w.samples().len())
            .map(|j| {
                w.samples()[j]
                    + h / 6.0
                        * (k1.samples()[j]
                            + 2.0 * k2.samples()[j]
                            + 2.0 * k3.samples()[j]
                            + k4.samples()[j])
            })
            .collect();
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(FlowError::BlowUp { substep });
        }
        w = Field::from_samples(u0.grid(), samples)?;
    }
    Ok(w)
}

/// Both evaluations of a commutator, for route-equivalence checks.
#[derive(Debug, Clone)]
pub struct CommutatorRoutes {
    /// Closed form obtained from the definition.
    pub defining: Field,
    /// Leibniz expansion with the top-order terms cancelled analytically.
    pub expanded: Field,
}

impl CommutatorRoutes {
    /// `max|defining − expanded| / max(max|defining|, max|expanded|)`;
    /// zero when both vanish identically.
    pub fn relative_discrepancy(&self) -> f64 {
        let scale = self.defining.linf_norm().max(self.expanded.linf_norm());
        let diff = self.defining.max_abs_difference(&self.expanded);
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

const BAND_TOLERANCE: f64 = 1e-13;

pub(crate) fn require_band(v: &Field, divisor: usize) -> Result<(), FlowError> {
    let limit = (v.grid().n_points() / divisor) as i64;
    let found = v.bandwidth(BAND_TOLERANCE);
    if found > limit {
        return Err(FlowError::NotBandLimited { limit, found });
    }
    Ok(())
}

/// `v` cut to the band it actually occupies, plus that band. Roundoff above
/// the band would otherwise be amplified by the high derivatives below.
fn projected(v: &Field) -> (Field, i64) {
    let band = v.bandwidth(BAND_TOLERANCE);
    (v.truncate(band), band)
}

fn binomial(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// `[A, B](v) = A(v v_x) − (Av) v_x − v A v_x`, returned from the Leibniz
/// route. `v` must be band-limited to `|m| <= N/4`.
pub fn commutator_ab(v: &Field, symbol: &DispersionSymbol) -> Result<Field, FlowError> {
    Ok(commutator_ab_routes(v, symbol)?.expanded)
}

pub fn commutator_ab_routes(
    v: &Field,
    symbol: &DispersionSymbol,
) -> Result<CommutatorRoutes, FlowError> {
    require_band(v, 4)?;
    let expanded = commutator_ab_expanded(v, symbol);
    let (v, band) = projected(v);
    let mul = |a: &Field, b: &Field| a.product(b).truncate(2 * band);
    let vx = v.derivative_unchecked(1);
    let av = apply_symbol(symbol, &v);
    let defining = &(&apply_symbol(symbol, &mul(&v, &vx)) - &mul(&av, &vx))
        - &mul(&v, &apply_symbol(symbol, &vx));
    Ok(CommutatorRoutes { defining, expanded })
}

pub(crate) fn commutator_ab_expanded(v: &Field, symbol: &DispersionSymbol) -> Field {
    let (v, band) = projected(v);
    let top = symbol.degree() as u32 + 1;
    let derivatives: Vec<Field> = (0..=top).map(|k| v.derivative_unchecked(k)).collect();
    let mut acc = Field::zeros(v.grid());
    // Each monomial a_j ∂^j leaves Σ_{k=1}^{j-1} C(j,k) ∂^k v ∂^{j+1-k} v;
    // the two terms with a (j+1)-th derivative cancel.
    for (j, a) in symbol.terms() {
        let j = j as u32;
        for k in 1..j {
            let weight = a * binomial(j, k) as f64;
            let term = derivatives[k as usize]
                .product(&derivatives[(j + 1 - k) as usize])
                .truncate(2 * band);
            acc = &acc + &term.scale(weight);
        }
    }
    acc
}

/// Integer Leibniz coefficients of
/// `∂^{i+j}(v v_x) − ∂^{i+1}(v ∂^j v) − ∂^{j+1}(v ∂^i v) + (∂^i v ∂^j v)_x + (v ∂^{i+j} v)_x`,
/// the `a_i a_j` part of `[A, [A, B]](v)`. Entry `(a, b, c)` with `a <= b`
/// stands for `c · ∂^a v ∂^b v`; every pair has `a + b = i + j + 1`.
pub fn double_commutator_coefficients(i: u32, j: u32) -> Vec<(u32, u32, i64)> {
    let n = i + j;
    let mut by_order = vec![0i64; (n + 2) as usize];
    let mut add = |a: u32, c: i64| by_order[a as usize] += c;
    for k in 0..=n {
        add(k, binomial(n, k));
    }
    for k in 0..=i + 1 {
        add(k, -binomial(i + 1, k));
    }
    for k in 0..=j + 1 {
        add(k, -binomial(j + 1, k));
    }
    add(i + 1, 1);
    add(i, 1);
    add(1, 1);
    add(0, 1);
    let mut pairs = Vec::new();
    for a in 0..=n.div_ceil(2) {
        let b = n + 1 - a;
        let c = if a == b {
            by_order[a as usize]
        } else {
            by_order[a as usize] + by_order[b as usize]
        };
        pairs.push((a, b, c));
    }
    pairs
}

/// `[A, [A, B]](v) = A²(v v_x) − 2A(v Av)_x + ((Av)²)_x + (v A²v)_x`,
/// returned from the closed form. `v` must be band-limited to `|m| <= N/6`.
pub fn double_commutator(v: &Field, symbol: &DispersionSymbol) -> Result<Field, FlowError> {
    Ok(double_commutator_routes(v, symbol)?.defining)
}

pub fn double_commutator_routes(
    v: &Field,
    symbol: &DispersionSymbol,
) -> Result<CommutatorRoutes, FlowError> {
    require_band(v, 6)?;
    let expanded = double_commutator_expanded(v, symbol);
    let (v, band) = projected(v);
    let mul = |a: &Field, b: &Field| a.product(b).truncate(2 * band);
    let vx = v.derivative_unchecked(1);
    let av = apply_symbol(symbol, &v);
    let aav = apply_symbol(symbol, &av);
    let first = apply_symbol(symbol, &apply_symbol(symbol, &mul(&v, &vx)));
    let second = apply_symbol(symbol, &mul(&v, &av).derivative_unchecked(1)).scale(2.0);
    let third = mul(&av, &av).derivative_unchecked(1);
    let fourth = mul(&v, &aav).derivative_unchecked(1);
    let defining = &(&(&first - &second) + &third) + &fourth;
    Ok(CommutatorRoutes { defining, expanded })
}

pub(crate) fn double_commutator_expanded(v: &Field, symbol: &DispersionSymbol) -> Field {
    let mut weights: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for (i, ai) in symbol.terms() {
        for (j, aj) in symbol.terms() {
            for (a, b, c) in double_commutator_coefficients(i as u32, j as u32) {
                if c != 0 {
                    *weights.entry((a, b)).or_insert(0.0) += ai * aj * c as f64;
                }
            }
        }
    }
    let (v, band) = projected(v);
    let top = 2 * symbol.degree() as u32 + 1;
    let derivatives: Vec<Field> = (0..=top).map(|k| v.derivative_unchecked(k)).collect();
    let mut acc = Field::zeros(v.grid());
    for ((a, b), w) in weights {
        if w != 0.0 {
            let term = derivatives[a as usize]
                .product(&derivatives[b as usize])
                .truncate(2 * band);
            acc = &acc + &term.scale(w);
        }
    }
    acc
}

/// Symbol values cached for repeated application on one grid.
pub(crate) fn exp_multipliers(values: &[Complex64], t: f64) -> Vec<Complex64> {
    values.iter().map(|v| (v * t).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_preset;
    use crate::spectral::PeriodicGrid;
    use std::f64::consts::PI;

    fn grid(n: usize) -> PeriodicGrid {
        PeriodicGrid::new(n, 2.0 * PI).unwrap()
    }

    fn kdv() -> DispersionSymbol {
        make_preset("kdv", None).unwrap().symbol
    }

    #[test]
    fn b_of_constant_and_sine() {
        let g = grid(32);
        assert!(apply_b(&Field::constant(&g, 2.5)).linf_norm() < 1e-14);
        let b = apply_b(&Field::from_fn(&g, f64::sin));
        let exact = Field::from_fn(&g, |x| 0.5 * (2.0 * x).sin());
        assert!(b.max_abs_difference(&exact) < 1e-14);
    }

    #[test]
    fn linear_flow_identity_and_heat_decay() {
        let g = grid(32);
        let u = Field::from_fn(&g, f64::sin);
        let heat = make_preset("viscous-burgers", None).unwrap().symbol;
        assert_eq!(linear_flow(&u, 0.0, &heat).unwrap().samples(), u.samples());
        let decayed = linear_flow(&u, 1.0, &heat).unwrap();
        let exact = Field::from_fn(&g, |x| (-1.0f64).exp() * x.sin());
        assert!(decayed.max_abs_difference(&exact) < 1e-12);
        assert_eq!(
            linear_flow(&u, -1.0, &heat).unwrap_err(),
            FlowError::NegativeTime(-1.0)
        );
    }

    #[test]
    fn linear_flow_rejects_growth() {
        let g = PeriodicGrid::new(32, 4.0 * PI).unwrap();
        let bl = make_preset("benney-lin", Some(1.0)).unwrap().symbol;
        let u = Field::from_fn(&g, |x| (0.5 * x).sin());
        let err = linear_flow(&u, 1.0, &bl).unwrap_err();
        assert!(matches!(err, FlowError::Amplification { mode, .. } if mode.abs() == 1));
        let grown = linear_flow_with(&u, 1.0, &bl, GrowthPolicy::Allow).unwrap();
        assert!(grown.l2_norm() > u.l2_norm());
    }

    #[test]
    fn shock_time_examples() {
        let g = grid(64);
        assert_eq!(shock_time(&Field::constant(&g, 3.0)), f64::INFINITY);
        assert_eq!(shock_time(&Field::zeros(&g)), f64::INFINITY);
        assert!((shock_time(&Field::from_fn(&g, f64::sin)) - 1.0).abs() < 1e-12);
        assert!((shock_time(&Field::from_fn(&g, |x| 0.5 * x.sin())) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn burgers_constant_is_fixed() {
        let g = grid(32);
        let c = Field::constant(&g, 0.7);
        let opts = BurgersSolveOptions::default();
        for t in [0.0, 0.3, 10.0] {
            let w = burgers_flow(&c, t, &opts).unwrap();
            assert!(w.max_abs_difference(&c) < 1e-14);
            let w = burgers_flow_rk(&c, t.min(1.0), &opts).unwrap();
            assert!(w.max_abs_difference(&c) < 1e-14);
        }
    }

    #[test]
    fn burgers_guard() {
        let g = grid(64);
        let u = Field::from_fn(&g, f64::sin);
        let opts = BurgersSolveOptions::default();
        assert!(burgers_flow(&u, 0.5, &opts).is_ok());
        let err = burgers_flow(&u, 0.6, &opts).unwrap_err();
        assert!(
            matches!(err, FlowError::StepTooLarge { shock_time, .. } if (shock_time - 1.0).abs() < 1e-12)
        );
        assert!(burgers_flow_rk(&u, 0.6, &opts).is_err());
    }

    #[test]
    fn burgers_non_convergence_reported() {
        let g = grid(64);
        let u = Field::from_fn(&g, f64::sin);
        let opts = BurgersSolveOptions {
            max_iterations: 2,
            ..Default::default()
        };
        assert!(matches!(
            burgers_flow(&u, 0.4, &opts),
            Err(FlowError::NoConvergence { iterations: 2, .. })
        ));
    }

    #[test]
    fn burgers_conserves_mean_and_l2() {
        let g = grid(256);
        let u = Field::from_fn(&g, f64::sin);
        let w = burgers_flow(&u, 0.25, &BurgersSolveOptions::default()).unwrap();
        assert!(w.mean().abs() < 1e-10);
        assert!((w.l2_norm() - u.l2_norm()).abs() < 1e-8);
    }

    #[test]
    fn burgers_matches_bessel_series() {
        // w(x,t) for u0 = sin x solves w = sin(x + t w); its Fourier sine
        // series is Σ_n 2 (-1)^{n+1} J_n(n t)/(n t) sin(n x) up to sign of x.
        // Independent check: fine-grid characteristic solve by bisection.
        let g = grid(64);
        let t = 0.3;
        let u = Field::from_fn(&g, f64::sin);
        let w = burgers_flow(&u, t, &BurgersSolveOptions::default()).unwrap();
        for (j, x) in g.nodes().into_iter().enumerate() {
            let (mut lo, mut hi) = (-1.0f64, 1.0f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid - (x + t * mid).sin() > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            assert!((w.samples()[j] - 0.5 * (lo + hi)).abs() < 1e-12);
        }
    }

    #[test]
    fn options_validation() {
        let bad = BurgersSolveOptions {
            safety_fraction: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = BurgersSolveOptions {
            tolerance: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(BurgersSolveOptions::default().validate().is_ok());
    }

    #[test]
    fn commutator_of_constant_vanishes() {
        let g = grid(64);
        let c = Field::constant(&g, 1.3);
        for name in ["viscous-burgers", "kdv", "benney-lin", "kawahara"] {
            let s = make_preset(name, Some(0.5)).unwrap().symbol;
            let r = commutator_ab_routes(&c, &s).unwrap();
            assert!(r.defining.linf_norm() < 1e-12);
            assert!(r.expanded.linf_norm() < 1e-12);
            let r = double_commutator_routes(&c, &s).unwrap();
            assert!(r.defining.linf_norm() < 1e-10);
            assert!(r.expanded.linf_norm() < 1e-10);
        }
    }

    #[test]
    fn kdv_commutator_of_sine() {
        let g = grid(64);
        let v = Field::from_fn(&g, f64::sin);
        let r = commutator_ab_routes(&v, &kdv()).unwrap();
        let exact = Field::from_fn(&g, |x| -3.0 * (2.0 * x).cos());
        assert!(r.expanded.max_abs_difference(&exact) < 1e-10);
        assert!(r.defining.max_abs_difference(&exact) < 1e-10);
    }

    #[test]
    fn band_limit_precondition() {
        let g = grid(32);
        let v = Field::from_fn(&g, |x| (10.0 * x).sin());
        assert!(matches!(
            commutator_ab(&v, &kdv()),
            Err(FlowError::NotBandLimited {
                limit: 8,
                found: 10
            })
        ));
        let v = Field::from_fn(&g, |x| (6.0 * x).sin());
        assert!(commutator_ab(&v, &kdv()).is_ok());
        assert!(double_commutator(&v, &kdv()).is_err());
    }

    #[test]
    fn leibniz_top_orders_cancel() {
        for i in 2..=6u32 {
            for j in 2..=6u32 {
                let pairs = double_commutator_coefficients(i, j);
                let n = i + j;
                assert_eq!(pairs[0], (0, n + 1, 0));
                assert_eq!(pairs[1], (1, n, 0));
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(10, 0), 1);
        assert_eq!(binomial(10, 10), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(12, 6), 924);
    }
}
