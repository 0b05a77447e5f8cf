use std::f64::consts::PI;

use dispersplit_core::initial::random_bandlimited;
use dispersplit_core::{Field, PeriodicGrid};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid(n: usize, l: f64) -> PeriodicGrid {
    PeriodicGrid::new(n, l).unwrap()
}

/// Direct O(N²) transform with the same normalization.
fn dft(samples: &[f64], l: f64) -> Vec<Complex64> {
    let n = samples.len();
    (0..n)
        .map(|i| {
            let m = if i <= n / 2 {
                i as f64
            } else {
                i as f64 - n as f64
            };
            let k = 2.0 * PI * m / l;
            samples
                .iter()
                .enumerate()
                .map(|(j, u)| {
                    let x = l * j as f64 / n as f64;
                    Complex64::from_polar(*u, -k * x)
                })
                .sum::<Complex64>()
                / n as f64
        })
        .collect()
}

#[test]
fn spectrum_matches_direct_transform() {
    let g = grid(48, 3.7);
    let samples: Vec<f64> = (0..48)
        .map(|j| ((j * 37 % 11) as f64 - 5.0) / 3.0)
        .collect();
    let u = Field::from_samples(&g, samples.clone()).unwrap();
    let direct = dft(&samples, 3.7);
    for (a, b) in u.spectrum().iter().zip(&direct) {
        assert!((a - b).norm() < 1e-14, "{a} vs {b}");
    }
}

#[test]
fn second_derivative_matches_fourth_order_differences() {
    let n = 512;
    let g = grid(n, 2.0 * PI);
    let u = Field::from_fn(&g, |x| (x.sin()).exp());
    let h = g.spacing();
    let s = u.samples();
    let at = |j: isize| s[j.rem_euclid(n as isize) as usize];
    let spectral = u.derivative(2).unwrap();
    let mut worst = 0.0_f64;
    for j in 0..n as isize {
        let fd = (-at(j + 2) + 16.0 * at(j + 1) - 30.0 * at(j) + 16.0 * at(j - 1) - at(j - 2))
            / (12.0 * h * h);
        worst = worst.max((fd - spectral.samples()[j as usize]).abs());
    }
    // Truncation error of the stencil is h⁴/90 · max|u⁽⁶⁾| ≈ 1.5e-8.
    assert!(worst < 5e-8, "{worst}");
}

#[test]
fn dealiased_product_equals_truncated_exact_product() {
    let n = 96;
    let coarse = grid(n, 2.0 * PI);
    let fine = grid(2 * n, 2.0 * PI);
    let cutoff = coarse.dealias_cutoff();
    // Inputs stay strictly below the cutoff: with N = 96 the mode 2·32
    // would alias onto −32, which the 2/3 rule keeps.
    let band = cutoff as u32 - 1;
    let u = random_bandlimited(&coarse, band, 1.0, 3);
    let v = random_bandlimited(&coarse, band, 0.7, 4);
    let lift = |f: &Field| {
        let mut c = vec![Complex64::new(0.0, 0.0); 2 * n];
        for m in -cutoff..=cutoff {
            c[fine.index_of_mode(m).unwrap()] = f.coefficient(m);
        }
        Field::from_spectrum(&fine, &c).unwrap()
    };
    // Pointwise on the fine grid is exact for modes up to 2·cutoff < N.
    let exact = lift(&u).pointwise(&lift(&v));
    let product = u.product(&v);
    for m in -(n as i64) / 2 + 1..(n as i64) / 2 {
        let expected = if m.abs() <= cutoff {
            exact.coefficient(m)
        } else {
            Complex64::new(0.0, 0.0)
        };
        assert!(
            (product.coefficient(m) - expected).norm() < 1e-15,
            "mode {m}: {}",
            (product.coefficient(m) - expected).norm()
        );
    }
}

#[test]
fn interpolation_matches_oversampled_grid() {
    let n = 32;
    let g = grid(n, 5.0);
    let fine = grid(8 * n, 5.0);
    let u = random_bandlimited(&g, 15, 1.0, 9);
    let mut c = vec![Complex64::new(0.0, 0.0); 8 * n];
    for m in -15..=15 {
        c[fine.index_of_mode(m).unwrap()] = u.coefficient(m);
    }
    let padded = Field::from_spectrum(&fine, &c).unwrap();
    let values = u.interpolate(&fine.nodes());
    for (a, b) in values.iter().zip(padded.samples()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn sobolev_norm_of_a_single_mode() {
    // u = cos(3x) on [0, 2π): ‖u‖²_{H^s} = π · 10^s.
    let g = grid(32, 2.0 * PI);
    let u = Field::from_fn(&g, |x| (3.0 * x).cos());
    for s in 0..5 {
        let expected = (PI * 10f64.powi(s as i32)).sqrt();
        assert!((u.sobolev_norm(s) - expected).abs() < 1e-12 * expected);
    }
}

fn field_strategy() -> impl Strategy<Value = Field> {
    (
        any::<u64>(),
        1u32..20,
        0.1f64..3.0,
        prop_oneof![Just(2.0 * PI), Just(10.0)],
    )
        .prop_map(|(seed, modes, amplitude, length)| {
            random_bandlimited(&grid(64, length), modes, amplitude, seed)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(u in field_strategy()) {
        let g = u.grid();
        let quadrature = g.spacing() * u.samples().iter().map(|v| v * v).sum::<f64>();
        prop_assert!((u.l2_norm().powi(2) - quadrature).abs() <= 1e-12 * quadrature);
        prop_assert!((u.sobolev_norm(0) - u.l2_norm()).abs() <= 1e-12 * u.l2_norm());
    }

    #[test]
    fn sobolev_norms_increase_with_index(u in field_strategy()) {
        for s in 0..6 {
            prop_assert!(u.sobolev_norm(s) <= u.sobolev_norm(s + 1) * (1.0 + 1e-14));
        }
    }

    #[test]
    fn round_trip(u in field_strategy()) {
        let back = Field::from_spectrum(u.grid(), u.spectrum()).unwrap();
        prop_assert!(back.max_abs_difference(&u) <= 1e-14 * u.linf_norm().max(1.0));
    }

    #[test]
    fn derivative_of_mean_free_antiderivative(u in field_strategy()) {
        // ∂ is linear and kills constants.
        let shifted = &u + &Field::constant(u.grid(), 2.5);
        let a = u.derivative(1).unwrap();
        let b = shifted.derivative(1).unwrap();
        prop_assert!(a.max_abs_difference(&b) <= 1e-12 * a.linf_norm().max(1.0));
        prop_assert!(a.mean().abs() <= 1e-13 * a.linf_norm().max(1.0));
    }

    #[test]
    fn sup_norm_embedding_on_two_pi(seed in any::<u64>(), modes in 1u32..30) {
        // sup|u| <= sqrt(coth(π)/2) ‖u‖_{H^1} ≈ 0.7079 ‖u‖_{H^1} on [0, 2π).
        let u = random_bandlimited(&grid(64, 2.0 * PI), modes, 1.0, seed);
        let constant = ((1.0 / PI.tanh()) / 2.0).sqrt();
        let ratio = u.linf_norm() / u.sobolev_norm(1);
        prop_assert!(ratio <= constant * (1.0 + 1e-12), "{}", ratio);
        prop_assert!(ratio <= 0.75);
    }

    #[test]
    fn dealiasing_is_a_projection(u in field_strategy()) {
        let once = u.dealias();
        let twice = once.dealias();
        prop_assert_eq!(once.samples(), twice.samples());
        prop_assert!(once.bandwidth(1e-13) <= u.grid().dealias_cutoff());
    }
}
