//! Independent numerical verification.
//!
//! Nothing here touches the symbolic localization path: the sphere integrals
//! are done by direct quadrature on a (θ, φ) grid, the Gaussian fiber
//! integral by two-dimensional quadrature over a disk, and the
//! Duistermaat–Heckman pushforward by seeded Monte Carlo. Agreement with the
//! localization module is what pins the calibration constant.
//!
//! Reductions use a fixed-shape pairwise tree and Monte-Carlo streams are
//! chunked with per-chunk generators, so results are identical run to run
//! and independent of the worker count.

use crate::error::{Error, Result};
use crate::exact::Rat;
use crate::localize::{bv_localize, dh_fourier};
use crate::models::{cp1_default, exp_hamiltonian_class, DH_CALIBRATION_I_POWER};
use crate::sheaves::constant_sheaf;
use crate::weights::{CartanElement, Slice};
use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

const MIN_GRID: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Midpoint,
    GaussLegendre,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    pub n_theta: usize,
    pub n_phi: usize,
    pub scheme: Scheme,
}

impl QuadratureSpec {
    pub fn gauss_legendre(n: usize) -> Self {
        Self { n_theta: n, n_phi: n, scheme: Scheme::GaussLegendre }
    }

    pub fn midpoint(n: usize) -> Self {
        Self { n_theta: n, n_phi: n, scheme: Scheme::Midpoint }
    }

    fn check(&self) -> Result<()> {
        let min = self.n_theta.min(self.n_phi);
        if min < MIN_GRID {
            return Err(Error::GridTooSmall { got: min, min: MIN_GRID });
        }
        Ok(())
    }
}

/// Sum with a fixed-shape pairwise tree; deterministic regardless of how the
/// slice was produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // P_n(x) and P_n'(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        // recompute derivative at the converged node for the weight
        let mut p0 = 1.0;
        let mut p1 = x;
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn nodes_on(a: f64, b: f64, n: usize, scheme: Scheme) -> (Vec<f64>, Vec<f64>) {
    match scheme {
        Scheme::Midpoint => {
            let h = (b - a) / n as f64;
            let nodes = (0..n).map(|i| a + (i as f64 + 0.5) * h).collect();
            (nodes, vec![h; n])
        }
        Scheme::GaussLegendre => {
            let (xs, ws) = gauss_legendre_nodes(n);
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let nodes = xs.iter().map(|x| mid + half * x).collect();
            let weights = ws.iter().map(|w| half * w).collect();
            (nodes, weights)
        }
    }
}

/// ∬ e^{t cos θ} sin θ dθ dφ over the sphere; θ uses the requested scheme,
/// φ the periodic trapezoid rule (uniform weights, since the endpoints are
/// identified). Converges to 2π (e^t − e^{−t}) / t, and to the Liouville
/// volume 4π at t = 0.
pub fn quadrature_cp1(t: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.check()?;
    let (theta, w_theta) = nodes_on(0.0, PI, spec.n_theta, spec.scheme);
    let (_, w_phi) = nodes_on(0.0, 2.0 * PI, spec.n_phi, Scheme::Midpoint);
    let phi_total = pairwise_sum(&w_phi);
    let contributions: Vec<f64> = theta
        .iter()
        .zip(&w_theta)
        .map(|(&th, &w)| w * (t * th.cos()).exp() * th.sin())
        .collect();
    Ok(phi_total * pairwise_sum(&contributions))
}

/// Closed form 2π(e^t − e^{−t})/t that the sphere quadrature converges to.
pub fn cp1_closed_form(t: f64) -> f64 {
    if t == 0.0 {
        4.0 * PI
    } else {
        2.0 * PI * (t.exp() - (-t).exp()) / t
    }
}

/// Two-dimensional quadrature of the Gaussian fiber integrand
/// e^{−|β| |y|²} (β̄/|β|) dy ∧ dȳ over the disk of the given radius, with
/// dy ∧ dȳ = −2i dx ∧ dv. Converges to −2πi/β. The radius must cover the
/// Gaussian: at 6/√|β| the discarded tail is below 1e−15 of the mass.
pub fn gaussian_fiber_integral(
    beta: Complex64,
    truncation_radius: f64,
    grid: usize,
) -> Result<Complex64> {
    if beta.norm() == 0.0 {
        return Err(Error::SingularEvaluation { weight: "beta".into() });
    }
    if grid < MIN_GRID {
        return Err(Error::GridTooSmall { got: grid, min: MIN_GRID });
    }
    let min_radius = 6.0 / beta.norm().sqrt();
    if truncation_radius < min_radius * (1.0 - 1e-12) {
        return Err(Error::InvalidInput(format!(
            "truncation radius {truncation_radius} below 6/sqrt(|beta|) = {min_radius}"
        )));
    }
    let b = beta.norm();
    let (r_nodes, r_weights) = nodes_on(0.0, truncation_radius, grid, Scheme::GaussLegendre);
    let (_, phi_weights) = nodes_on(0.0, 2.0 * PI, grid, Scheme::Midpoint);
    let phi_total = pairwise_sum(&phi_weights);
    let radial: Vec<f64> = r_nodes
        .iter()
        .zip(&r_weights)
        .map(|(&r, &w)| w * (-b * r * r).exp() * r)
        .collect();
    let area_part = phi_total * pairwise_sum(&radial);
    Ok(beta.conj() / b * Complex64::new(0.0, -2.0) * area_part)
}

/// Histogram row of a pushforward measure.
#[derive(Clone, Debug, Serialize)]
pub struct HistogramBin {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Pushforward {
    pub seed: u64,
    pub samples: usize,
    pub bins: Vec<HistogramBin>,
    /// Kolmogorov distance of the sampled moment values to the uniform
    /// distribution on [−1, 1].
    pub kolmogorov: f64,
    pub mean: f64,
}

const MC_CHUNK: usize = 1 << 16;

/// Sample the Liouville measure of the sphere (uniform in cos θ and φ) and
/// push forward along the moment map H = cos θ. Total mass 4π; the true
/// pushforward density is uniform on [−1, 1].
pub fn dh_pushforward_cp1(samples: usize, seed: u64, n_bins: usize) -> Result<Pushforward> {
    if samples < 10_000 {
        return Err(Error::InvalidInput(format!(
            "need at least 10^4 samples, got {samples}"
        )));
    }
    if n_bins == 0 {
        return Err(Error::InvalidInput("need at least one bin".into()));
    }
    let n_chunks = samples.div_ceil(MC_CHUNK);
    let mut values: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(c as u64 + 1)));
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            (0..count).map(|_| rng.gen_range(-1.0f64..1.0)).collect::<Vec<f64>>()
        })
        .flatten()
        .collect();
    let total_mass = 4.0 * PI;
    let per_sample = total_mass / samples as f64;
    let mut counts = vec![0usize; n_bins];
    for &h in &values {
        let mut b = ((h + 1.0) / 2.0 * n_bins as f64) as usize;
        if b >= n_bins {
            b = n_bins - 1;
        }
        counts[b] += 1;
    }
    let bins = (0..n_bins)
        .map(|b| HistogramBin {
            bin_lo: -1.0 + 2.0 * b as f64 / n_bins as f64,
            bin_hi: -1.0 + 2.0 * (b + 1) as f64 / n_bins as f64,
            mass: counts[b] as f64 * per_sample,
        })
        .collect();
    let mean = pairwise_sum(&values) / samples as f64;
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut kolmogorov: f64 = 0.0;
    let n = values.len() as f64;
    for (i, &v) in values.iter().enumerate() {
        let cdf = (v + 1.0) / 2.0;
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        kolmogorov = kolmogorov.max((cdf - lo).abs()).max((hi - cdf).abs());
    }
    Ok(Pushforward { seed, samples, bins, kolmogorov, mean })
}

#[derive(Clone, Debug, Serialize)]
pub struct InversionRow {
    pub t: f64,
    pub localized: f64,
    pub quadrature: f64,
    pub rel_err: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InversionReport {
    pub rows: Vec<InversionRow>,
    pub max_rel_err: f64,
}

/// Compare the localized Duistermaat–Heckman transform on CP¹ against the
/// direct transform of the uniform pushforward density: ∫_{−1}^{1} e^{t h} 2π dh.
pub fn dh_inversion_check(t_values: &[f64]) -> Result<InversionReport> {
    let model = cp1_default();
    let sheaf = constant_sheaf(&model);
    let (h_nodes, h_weights) = nodes_on(-1.0, 1.0, 256, Scheme::GaussLegendre);
    let mut rows = Vec::with_capacity(t_values.len());
    let mut max_rel_err: f64 = 0.0;
    for &t in t_values {
        let x = CartanElement::from_re(vec![rat_from_f64(t)?]);
        let localized = dh_fourier(&model, &sheaf, &x, Slice::Split)?.value.re;
        let contributions: Vec<f64> = h_nodes
            .iter()
            .zip(&h_weights)
            .map(|(&h, &w)| w * (t * h).exp() * 2.0 * PI)
            .collect();
        let quadrature = pairwise_sum(&contributions);
        let rel_err = (localized - quadrature).abs() / quadrature.abs().max(f64::MIN_POSITIVE);
        max_rel_err = max_rel_err.max(rel_err);
        rows.push(InversionRow { t, localized, quadrature, rel_err });
    }
    Ok(InversionReport { rows, max_rel_err })
}

fn rat_from_f64(t: f64) -> Result<Rat> {
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite parameter {t}")));
    }
    // dyadic: f64 is exactly representable this way
    let scaled = (t * (1u64 << 32) as f64).round() as i64;
    Ok(Rat::new(scaled.into(), (1i64 << 32).into()))
}

/// Outcome of the calibration sweep: the master prefactor (−2πi)^n needs one
/// fourth root of unity per dimension to match the real quadrature; exactly
/// one candidate may survive.
#[derive(Clone, Debug, Serialize)]
pub struct CalibrationSweep {
    /// Surviving exponents k with i^k · (bv sum) matching the quadrature.
    pub surviving: Vec<u8>,
}

/// Try all four per-dimension constants i^k against the CP¹ quadrature at
/// t ∈ {1/2, 1, 2}; the stored calibration must be the unique survivor.
pub fn calibration_sweep(tolerance: f64) -> Result<CalibrationSweep> {
    let model = cp1_default();
    let spec = QuadratureSpec::gauss_legendre(256);
    let mut surviving = Vec::new();
    for k in 0u8..4 {
        let rotate = match k {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let mut ok = true;
        for t in [0.5f64, 1.0, 2.0] {
            let x = CartanElement::from_re(vec![rat_from_f64(t)?]);
            let cls = exp_hamiltonian_class(&model, &Rat::from_integer(1.into()));
            let bv = bv_localize(&model, &cls, &x, Slice::Split)?;
            let candidate = bv.value * rotate; // model.dim == 1
            let reference = Complex64::new(quadrature_cp1(t, &spec)?, 0.0);
            if (candidate - reference).norm() > tolerance * reference.norm() {
                ok = false;
                break;
            }
        }
        if ok {
            surviving.push(k);
        }
    }
    Ok(CalibrationSweep { surviving })
}

/// The stored calibration constant, as asserted by tests.
pub fn stored_calibration() -> u8 {
    DH_CALIBRATION_I_POWER
}
