//! Fixed-point localization of equivariant integrals.
//!
//! Everything reduces to one master sum
//!
//! ```text
//!   value = prefactor · Σ_p  m_p · cls(p)(X) / Den_p(X)
//! ```
//!
//! with the master prefactor (−2πi)^n, n the complex dimension. With unit
//! multiplicities this is the Berline–Vergne sum; with the multiplicities of
//! a constructible sheaf it evaluates the integral over the sheaf's
//! characteristic cycle. Prefactor bookkeeping is the one place where sign
//! conventions can drift silently, so each result records its prefactor as a
//! (sign, power of 2π, power of i) triple and the Duistermaat–Heckman
//! transform applies the single calibration constant
//! [`DH_CALIBRATION_I_POWER`](crate::models::DH_CALIBRATION_I_POWER), turning
//! (−2πi)^n into (−2π)^n. The calibration is pinned against the direct CP¹
//! quadrature by the oracle suite; no other operation is calibrated.
//!
//! Two algebraic identities make the suite self-checking: localizing the
//! Euler form divided by (2π)^n returns the Euler characteristic of the
//! sheaf exactly (Gauss–Bonnet), and localizing the constant class 1 returns
//! zero because its top-degree component vanishes.

use crate::error::{Error, Result};
use crate::exact::Rat;
use crate::models::{
    euler_form_class, exp_hamiltonian_class, FixedPointClass, GKMModel, DH_CALIBRATION_I_POWER,
};
use crate::sheaves::{euler_characteristic, multiplicities, ConstructibleSheaf, MultiplicityVector};
use crate::weights::{eval_weight, signs_over, signs_to_string, CartanElement, Slice};
use num::complex::Complex64;
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// sign · (2π)^two_pi_power · i^i_power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Prefactor {
    pub sign: i8,
    pub two_pi_power: i32,
    pub i_power: u8,
}

impl Prefactor {
    /// (−2πi)^n, normalized.
    pub fn master(n: usize) -> Self {
        Self {
            sign: if n.is_multiple_of(2) { 1 } else { -1 },
            two_pi_power: n as i32,
            i_power: (n % 4) as u8,
        }
    }

    /// (−2πi)^n times the calibration i^3 per dimension: (−2π)^n.
    pub fn calibrated_dh(n: usize) -> Self {
        Self {
            sign: if n.is_multiple_of(2) { 1 } else { -1 },
            two_pi_power: n as i32,
            i_power: ((n + n * DH_CALIBRATION_I_POWER as usize) % 4) as u8,
        }
    }

    pub fn value(&self) -> Complex64 {
        let i_pow = match self.i_power % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        f64::from(self.sign) * (2.0 * PI).powi(self.two_pi_power) * i_pow
    }
}

/// One fixed point's contribution, kept for auditability.
#[derive(Clone, Debug, Serialize)]
pub struct LocalizationTerm {
    pub fixed_point: String,
    pub m: i64,
    #[serde(serialize_with = "ser_complex")]
    pub numerator: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub den: Complex64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalizationResult {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub prefactor: Prefactor,
    pub terms: Vec<LocalizationTerm>,
    pub warnings: Vec<String>,
}

impl LocalizationResult {
    /// Re-evaluate prefactor · Σ m·num/den from the recorded terms, in the
    /// fixed model order.
    pub fn recompute(&self) -> Complex64 {
        let sum = self
            .terms
            .iter()
            .fold(Complex64::zero(), |acc, t| acc + (t.m as f64) * t.numerator / t.den);
        self.prefactor.value() * sum
    }
}

fn require_regular(model: &GKMModel, x: &CartanElement) -> Result<()> {
    for beta in model.delta() {
        if eval_weight(beta, x)?.is_zero() {
            return Err(Error::SingularEvaluation { weight: beta.to_string() });
        }
    }
    Ok(())
}

fn localization_sum(
    model: &GKMModel,
    cls: &FixedPointClass,
    x: &CartanElement,
    m: &[i64],
    prefactor: Prefactor,
    warnings: Vec<String>,
) -> Result<LocalizationResult> {
    debug_assert_eq!(cls.exprs.len(), model.fixed_points.len());
    let mut terms = Vec::with_capacity(model.fixed_points.len());
    let mut sum = Complex64::zero();
    for (p, fp) in model.fixed_points.iter().enumerate() {
        let numerator = cls.exprs[p].eval(x)?;
        let den = model.den_at(p, x)?.to_complex64();
        sum += (m[p] as f64) * numerator / den;
        terms.push(LocalizationTerm {
            fixed_point: fp.name.clone(),
            m: m[p],
            numerator,
            den,
        });
    }
    Ok(LocalizationResult {
        value: prefactor.value() * sum,
        prefactor,
        terms,
        warnings,
    })
}

fn slice_warnings(x: &CartanElement, slice: Slice) -> Vec<String> {
    if slice.contains(x) {
        Vec::new()
    } else {
        vec![format!(
            "X = {x} is not on the declared {} real slice; values are analytic continuations",
            match slice {
                Slice::Split => "split",
                Slice::Compact => "compact",
            }
        )]
    }
}

/// Berline–Vergne sum: unit multiplicities, master prefactor (−2πi)^n.
pub fn bv_localize(
    model: &GKMModel,
    cls: &FixedPointClass,
    x: &CartanElement,
    slice: Slice,
) -> Result<LocalizationResult> {
    require_regular(model, x)?;
    let m = vec![1i64; model.fixed_points.len()];
    localization_sum(
        model,
        cls,
        x,
        &m,
        Prefactor::master(model.dim),
        slice_warnings(x, slice),
    )
}

/// Localization against the characteristic-cycle data of a sheaf: the
/// multiplicities of X's chamber weight each fixed-point contribution.
pub fn sheaf_localize(
    model: &GKMModel,
    sheaf: &ConstructibleSheaf,
    cls: &FixedPointClass,
    x: &CartanElement,
    slice: Slice,
) -> Result<LocalizationResult> {
    require_regular(model, x)?;
    let mv = multiplicities(model, sheaf, x, slice)?;
    localization_sum(
        model,
        cls,
        x,
        &mv.m,
        Prefactor::master(model.dim),
        slice_warnings(x, slice),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussBonnetCheck {
    #[serde(serialize_with = "ser_complex")]
    pub localized: Complex64,
    pub combinatorial: i64,
    pub matched: bool,
}

/// Sheaf Gauss–Bonnet: localizing the Euler form over the cycle of F and
/// dividing by (2π)^n reproduces χ(M, F).
pub fn gauss_bonnet(
    model: &GKMModel,
    sheaf: &ConstructibleSheaf,
    x: &CartanElement,
    slice: Slice,
) -> Result<GaussBonnetCheck> {
    let cls = euler_form_class(model);
    let r = sheaf_localize(model, sheaf, &cls, x, slice)?;
    let localized = r.value / (2.0 * PI).powi(model.dim as i32);
    let combinatorial = euler_characteristic(sheaf);
    let matched = (localized - Complex64::new(combinatorial as f64, 0.0)).norm() < 1e-9;
    Ok(GaussBonnetCheck { localized, combinatorial, matched })
}

/// Fourier transform of the Duistermaat–Heckman measure: exponential of the
/// Hamiltonian, calibrated prefactor (−2π)^n. On the CP¹ model this is the
/// direct sphere integral of e^{⟨X,J⟩} against the area form.
pub fn dh_fourier(
    model: &GKMModel,
    sheaf: &ConstructibleSheaf,
    x: &CartanElement,
    slice: Slice,
) -> Result<LocalizationResult> {
    require_regular(model, x)?;
    let cls = exp_hamiltonian_class(model, &Rat::one());
    let mv = multiplicities(model, sheaf, x, slice)?;
    localization_sum(
        model,
        &cls,
        x,
        &mv.m,
        Prefactor::calibrated_dh(model.dim),
        slice_warnings(x, slice),
    )
}

/// A realizable chamber together with an exact witness.
#[derive(Clone, Debug)]
pub struct ChamberWitness {
    pub chamber: String,
    pub witness: CartanElement,
}

/// Enumerate the realizable chambers of the model's reduced Δ.
///
/// For each candidate sign pattern the signed sum of the weights themselves
/// is tried as a witness and verified by exact sign evaluation; seeded random
/// rational samples catch thin cones the heuristic misses. Unrealizable
/// patterns simply never acquire a witness.
pub fn enumerate_chambers(model: &GKMModel) -> Result<Vec<ChamberWitness>> {
    let reps = model.delta_reduced();
    let k = reps.len();
    if k > 20 {
        return Err(Error::InvalidInput(format!(
            "chamber enumeration over {k} hyperplanes is not feasible"
        )));
    }
    let mut found: BTreeMap<String, CartanElement> = BTreeMap::new();
    let verify = |x: &CartanElement| -> Option<String> {
        signs_over(&reps, x).ok().map(|s| signs_to_string(&s))
    };
    for mask in 0..(1u64 << k) {
        let mut coords = vec![0i64; model.rank];
        for (i, beta) in reps.iter().enumerate() {
            let s: i64 = if mask >> i & 1 == 1 { 1 } else { -1 };
            for (j, &c) in beta.0.iter().enumerate() {
                coords[j] += s * c;
            }
        }
        let x = CartanElement::from_ints(&coords);
        if let Some(chamber) = verify(&x) {
            found.entry(chamber).or_insert(x);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0e71_10c5);
    for _ in 0..512 {
        let coords: Vec<Rat> = (0..model.rank)
            .map(|_| {
                Rat::new(
                    rng.gen_range(-999i64..1000).into(),
                    rng.gen_range(1i64..10).into(),
                )
            })
            .collect();
        let x = CartanElement::from_re(coords);
        if let Some(chamber) = verify(&x) {
            found.entry(chamber).or_insert(x);
        }
    }
    Ok(found
        .into_iter()
        .map(|(chamber, witness)| ChamberWitness { chamber, witness })
        .collect())
}

/// One row of a chamber scan.
#[derive(Clone, Debug, Serialize)]
pub struct ChamberScanRow {
    pub chamber: String,
    pub sample_x: String,
    pub m: Vec<i64>,
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub sum_m: i64,
}

/// Evaluate the multiplicities and the localized value of `cls` once per
/// realizable chamber. The multiplicity total is chamber-independent and
/// equals χ(M, F), which makes the scan a quick consistency sweep.
pub fn chamber_scan(
    model: &GKMModel,
    sheaf: &ConstructibleSheaf,
    cls: &FixedPointClass,
) -> Result<Vec<ChamberScanRow>> {
    let mut rows = Vec::new();
    for cw in enumerate_chambers(model)? {
        let mv: MultiplicityVector = multiplicities(model, sheaf, &cw.witness, Slice::Split)?;
        let r = sheaf_localize(model, sheaf, cls, &cw.witness, Slice::Split)?;
        rows.push(ChamberScanRow {
            chamber: cw.chamber,
            sample_x: cw.witness.to_string(),
            sum_m: mv.total(),
            m: mv.m,
            value: r.value,
        });
    }
    Ok(rows)
}
