//! Cross-checks of the combinatorial machinery against brute-force
//! computations that never touch the production code paths.

use equiloc_core::*;
use num::complex::Complex64;
use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Flow [x_0 : ... : x_n] along z^{-1}·x with z = e^{-s} → 0 on the chart
/// coordinates: coordinate j scales by e^{s a_j}. Returns the index of the
/// limiting fixed point, numerically.
fn limit_fixed_point(a_values: &[f64], support: &[usize], magnitudes: &[f64]) -> usize {
    let mut gaps: Vec<f64> = Vec::new();
    for (k, &i) in support.iter().enumerate() {
        for &j in &support[k + 1..] {
            let g = (a_values[i] - a_values[j]).abs();
            if g > 0.0 {
                gaps.push(g);
            }
        }
    }
    let min_gap = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min_gap.is_finite() && min_gap > 0.0, "flow is degenerate on this support");
    let s = 80.0 / min_gap;
    let max_a = support.iter().map(|&j| a_values[j]).fold(f64::NEG_INFINITY, f64::max);
    let coords: Vec<(usize, f64)> = support
        .iter()
        .map(|&j| (j, magnitudes[j] * (s * (a_values[j] - max_a)).exp()))
        .collect();
    let top = coords.iter().map(|&(_, c)| c).fold(0.0f64, f64::max);
    let survivors: Vec<usize> = coords
        .iter()
        .filter(|&&(_, c)| c > 1e-9 * top)
        .map(|&(j, _)| j)
        .collect();
    assert_eq!(survivors.len(), 1, "flow limit is not a single fixed point");
    survivors[0]
}

/// Attracting-cell dimensions by the pairwise limit test: a generic point
/// supported on {i, j} flows into p_i exactly when j contributes a negative
/// direction at p_i.
fn cell_dims_by_limits(a_values: &[f64], magnitudes: &[f64]) -> Vec<usize> {
    let n = a_values.len();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && limit_fixed_point(a_values, &[i, j], magnitudes) == i)
                .count()
        })
        .collect()
}

fn coordinate_values(model: &GKMModel, x: &CartanElement) -> Vec<f64> {
    let orbit = model.orbit.as_ref().unwrap();
    orbit.factors[0]
        .iter()
        .map(|a| eval_weight(a, x).unwrap().re.to_f64().unwrap())
        .collect()
}

#[test]
fn bb_cells_match_brute_force_limits_on_cp1() {
    let m = cp1_default();
    let mags = [1.3, 0.7];
    for (x, expected) in [
        (CartanElement::from_ints(&[1]), vec![0usize, 1]),
        (CartanElement::from_ints(&[-1]), vec![1, 0]),
    ] {
        let oracle = cell_dims_by_limits(&coordinate_values(&m, &x), &mags);
        assert_eq!(oracle, expected);
        let d = bb_decompose(&m, &x, Slice::Split).unwrap();
        let dims: Vec<usize> = d.cells.iter().map(|c| c.dim_minus).collect();
        assert_eq!(dims, oracle);
    }
}

#[test]
fn bb_cells_match_brute_force_limits_on_cp2_and_cp3() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for n in [2usize, 3] {
        let m = cpn_coordinate(n);
        let mags: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.25..4.0)).collect();
        for _ in 0..8 {
            let coords: Vec<i64> = (0..=n).map(|_| rng.gen_range(-20i64..20)).collect();
            let x = CartanElement::from_ints(&coords);
            if is_regular(m.delta(), &x).map(|r| !r.regular).unwrap_or(true) {
                continue;
            }
            let oracle = cell_dims_by_limits(&coordinate_values(&m, &x), &mags);
            let d = bb_decompose(&m, &x, Slice::Split).unwrap();
            let dims: Vec<usize> = d.cells.iter().map(|c| c.dim_minus).collect();
            assert_eq!(dims, oracle, "X = {coords:?}");
        }
    }
}

#[test]
fn regularity_fails_exactly_on_weight_hyperplanes() {
    // project random rational X onto each hyperplane {β(X) = 0}: the result
    // must be non-regular, and the original (generically) regular
    let m = cpn_coordinate(2);
    let delta = m.delta().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let coords: Vec<Rat> = (0..3)
            .map(|_| Rat::new(rng.gen_range(-50i64..50).into(), rng.gen_range(1i64..8).into()))
            .collect();
        let x = CartanElement::from_re(coords.clone());
        for beta in &delta {
            let bx = eval_weight(beta, &x).unwrap().re;
            let norm: Rat = beta.0.iter().map(|&c| Rat::from_integer((c * c).into())).sum();
            let shift = &bx / &norm;
            let projected: Vec<Rat> = coords
                .iter()
                .zip(&beta.0)
                .map(|(c, &b)| c - &shift * Rat::from_integer(b.into()))
                .collect();
            let proj = CartanElement::from_re(projected);
            let reg = is_regular(&delta, &proj).unwrap();
            assert!(!reg.regular, "projection onto {beta} hyperplane stayed regular");
            assert!(reg.violations.contains(beta));
        }
    }
}

#[test]
fn cp2_regularity_violation_names_the_wall() {
    let m = cpn_coordinate(2);
    let x = CartanElement::from_ints(&[0, 1, 1]);
    let r = is_regular(m.delta(), &x).unwrap();
    assert!(!r.regular);
    let expected = [Weight::new(vec![0, 1, -1]), Weight::new(vec![0, -1, 1])];
    assert_eq!(r.violations.len(), 2);
    for w in expected {
        assert!(r.violations.contains(&w));
    }
}

/// The localized Duistermaat–Heckman value on CP¹ coincides with the direct
/// sphere quadrature; the uncalibrated master value is off by exactly one
/// factor of i.
#[test]
fn cp1_localization_agrees_with_quadrature() {
    let m = cp1_default();
    let f = constant_sheaf(&m);
    let spec = QuadratureSpec::gauss_legendre(256);
    for t in [0.5f64, 1.0, 2.0] {
        let x = CartanElement::from_re(vec![parse_rat(&t.to_string()).unwrap()]);
        let reference = quadrature_cp1(t, &spec).unwrap();
        let dh = dh_fourier(&m, &f, &x, Slice::Split).unwrap().value;
        assert!((dh - Complex64::new(reference, 0.0)).norm() < 1e-8 * reference);
        let cls = exp_hamiltonian_class(&m, &Rat::from_integer(1.into()));
        let master = bv_localize(&m, &cls, &x, Slice::Split).unwrap().value;
        assert!((master * Complex64::new(0.0, -1.0) - dh).norm() < 1e-12 * reference);
    }
}

#[test]
fn gaussian_fiber_product_reproduces_master_prefactor() {
    // two independent fiber factors multiply to (−2πi)² / (β₁ β₂)
    let b1 = Complex64::new(1.0, 0.0);
    let b2 = Complex64::new(0.0, 2.0);
    let v1 = gaussian_fiber_integral(b1, 6.0, 128).unwrap();
    let v2 = gaussian_fiber_integral(b2, 6.0 / 2.0f64.sqrt(), 128).unwrap();
    let expected = Complex64::new(0.0, -2.0 * PI).powi(2) / (b1 * b2);
    assert!((v1 * v2 - expected).norm() < 1e-3);
}
