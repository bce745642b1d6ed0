//! Attracting-cell decompositions per chamber and cell–stratum intersection
//! tables.
//!
//! A regular element with nonzero sign data splits every tangent space into
//! strictly negative and strictly positive weights; the attracting cell of a
//! fixed point is an affine space of the negative dimension. Cells are never
//! realized as geometric sets — all downstream formulas consume only the
//! compactly-supported Euler characteristics of their intersections with the
//! strata of a sheaf.

use crate::error::{Error, Result};
use crate::exact::Rat;
use crate::models::GKMModel;
use crate::sheaves::{orbit_strata, orbit_stratum_name, validate_cell_tables, ConstructibleSheaf, SheafKind};
use crate::weights::{eval_weight, CartanElement, Slice, Weight};
use num::{Signed, Zero};

/// Attracting-cell data at one fixed point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BBCell {
    pub fixed_point: String,
    /// Complex dimension of the negative tangent subspace.
    pub dim_minus: usize,
    pub negative_weights: Vec<Weight>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BBDecomposition {
    pub chamber: String,
    pub cells: Vec<BBCell>,
}

/// Sign of Re β(x); zero is a wall.
fn re_sign(beta: &Weight, x: &CartanElement) -> Result<i8> {
    let v = eval_weight(beta, x)?;
    if v.re.is_zero() {
        return Err(Error::OnWall { weight: beta.to_string() });
    }
    Ok(if v.re.is_positive() { 1 } else { -1 })
}

/// Attracting-cell decomposition for the chamber of X. Deterministic: the
/// negative weights keep the order they have on the fixed point.
pub fn bb_decompose(model: &GKMModel, x: &CartanElement, slice: Slice) -> Result<BBDecomposition> {
    let x_bb = slice.bb_point(x);
    let chamber = model.chamber_string(&x_bb)?;
    let mut cells = Vec::with_capacity(model.fixed_points.len());
    for fp in &model.fixed_points {
        let mut negative_weights = Vec::new();
        for beta in &fp.tangent_weights {
            if re_sign(beta, &x_bb)? < 0 {
                negative_weights.push(beta.clone());
            }
        }
        cells.push(BBCell {
            fixed_point: fp.name.clone(),
            dim_minus: negative_weights.len(),
            negative_weights,
        });
    }
    Ok(BBDecomposition { chamber, cells })
}

/// χ_c of every (stratum ∩ attracting cell), entries\[fixed_point\]\[stratum\].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionTable {
    pub chamber: String,
    pub strata_names: Vec<String>,
    pub entries: Vec<Vec<i64>>,
}

/// The attracting cell containing an orbit stratum: per projective factor,
/// the coordinate of largest Re a_i(X) among the support.
fn orbit_cell_index(
    factors: &[Vec<Weight>],
    id: &[Vec<usize>],
    x_bb: &CartanElement,
) -> Result<usize> {
    let mut index = 0usize;
    for (f, support) in factors.iter().zip(id) {
        let values: Vec<Rat> = f
            .iter()
            .map(|a| eval_weight(a, x_bb).map(|v| v.re))
            .collect::<Result<_>>()?;
        let mut best = support[0];
        for &i in &support[1..] {
            if values[i] == values[best] {
                return Err(Error::OnWall {
                    weight: f[i].sub(&f[best]).to_string(),
                });
            }
            if values[i] > values[best] {
                best = i;
            }
        }
        index = index * f.len() + best;
    }
    Ok(index)
}

/// Cell–stratum intersection table for the chamber of X.
///
/// Built-in kinds are computed combinatorially: the constant sheaf's single
/// stratum meets every cell in an affine space (χ_c = 1); a torus-orbit
/// stratum lies entirely inside the cell of its dominant coordinate and
/// contributes its own χ_c there. Preset and custom sheaves return their
/// stored tables after the additivity validation.
pub fn cell_intersection_table(
    model: &GKMModel,
    sheaf: &ConstructibleSheaf,
    x: &CartanElement,
    slice: Slice,
) -> Result<IntersectionTable> {
    let x_bb = slice.bb_point(x);
    let chamber = model.chamber_string(&x_bb)?;
    let d = model.fixed_points.len();
    let strata_names: Vec<String> = sheaf.strata.iter().map(|s| s.name.clone()).collect();
    let entries = match &sheaf.kind {
        SheafKind::Constant => {
            if sheaf.strata.len() != 1 {
                return Err(Error::InconsistentSheaf(
                    "constant sheaf must have exactly one stratum".into(),
                ));
            }
            vec![vec![1i64]; d]
        }
        SheafKind::Orbit => {
            let orbit = model.orbit.as_ref().ok_or_else(|| {
                Error::UnsupportedSheaf("model has no torus-orbit stratification".into())
            })?;
            let ids = orbit_strata(orbit);
            if ids.len() != sheaf.strata.len() {
                return Err(Error::InconsistentSheaf(format!(
                    "orbit sheaf has {} strata, model supports {}",
                    sheaf.strata.len(),
                    ids.len()
                )));
            }
            let mut entries = vec![vec![0i64; ids.len()]; d];
            for (s, id) in ids.iter().enumerate() {
                debug_assert_eq!(orbit_stratum_name(id), sheaf.strata[s].name);
                let cell = orbit_cell_index(&orbit.factors, id, &x_bb)?;
                entries[cell][s] = sheaf.strata[s].chi_c;
            }
            entries
        }
        SheafKind::Preset(_) | SheafKind::Custom => {
            validate_cell_tables(model, sheaf)?;
            sheaf
                .cell_tables
                .get(&chamber)
                .cloned()
                .ok_or_else(|| {
                    Error::InconsistentSheaf(format!("no cell table stored for chamber {chamber}"))
                })?
        }
    };
    Ok(IntersectionTable { chamber, strata_names, entries })
}
