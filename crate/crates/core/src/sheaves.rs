//! Constructible sheaves at the level of Euler characteristics.
//!
//! A sheaf is carried as stratum data: the compactly-supported Euler
//! characteristic of each stratum and the Euler characteristic of the stalks
//! along it. Every formula in scope consumes only this data, so no chain
//! complexes are ever built. The fixed-point multiplicities come in two
//! routes: the global one, χ(M, F restricted to an attracting cell) computed
//! from cell–stratum intersection tables, and the local one, costalk Euler
//! characteristics stored as preset oracle data. The two are asserted equal
//! wherever both are available.

use crate::bb::cell_intersection_table;
use crate::error::{Error, Result};
use crate::models::{chamber_of, GKMModel, OrbitStructure};
use crate::weights::{CartanElement, Slice};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub name: String,
    /// χ_c of the stratum itself.
    pub chi_c: i64,
    /// χ of the stalks of the sheaf along the stratum.
    pub stalk_euler: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SheafKind {
    Constant,
    Orbit,
    Preset(String),
    Custom,
}

/// Costalk Euler characteristics per fixed point: the local route to the
/// multiplicities. `Uniform` holds for sheaves whose costalks do not depend
/// on the chamber (constant and orbit presets).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CostalkData {
    None,
    Uniform(Vec<i64>),
    PerChamber(BTreeMap<String, Vec<i64>>),
}

/// Index of a torus-orbit stratum: one coordinate subset per projective
/// factor.
pub type OrbitId = Vec<Vec<usize>>;

#[derive(Clone, Debug)]
pub struct ConstructibleSheaf {
    pub strata: Vec<Stratum>,
    pub kind: SheafKind,
    /// For orbit sheaves, the orbit index of each stratum (aligned).
    pub orbit_ids: Option<Vec<OrbitId>>,
    /// Stored per-chamber intersection tables, entries[fixed_point][stratum];
    /// used by presets and custom sheaves.
    pub cell_tables: BTreeMap<String, Vec<Vec<i64>>>,
    pub costalks: CostalkData,
}

/// χ(M, F) = Σ_S χ_c(S) · e_S.
pub fn euler_characteristic(sheaf: &ConstructibleSheaf) -> i64 {
    sheaf
        .strata
        .iter()
        .map(|s| s.chi_c * s.stalk_euler)
        .sum()
}

/// Enumerate the orbit strata of a model: nonempty coordinate subsets per
/// factor, ordered by (size, lex) within each factor, cartesian across
/// factors.
pub fn orbit_strata(orbit: &OrbitStructure) -> Vec<OrbitId> {
    fn subsets(k: usize) -> Vec<Vec<usize>> {
        let mut all: Vec<Vec<usize>> = (1u64..(1 << k))
            .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
            .collect();
        all.sort_by_key(|s| (s.len(), s.clone()));
        all
    }
    let mut ids: Vec<OrbitId> = vec![Vec::new()];
    for factor in &orbit.factors {
        let subs = subsets(factor.len());
        let mut next = Vec::with_capacity(ids.len() * subs.len());
        for id in &ids {
            for s in &subs {
                let mut e = id.clone();
                e.push(s.clone());
                next.push(e);
            }
        }
        ids = next;
    }
    ids
}

pub fn orbit_stratum_name(id: &OrbitId) -> String {
    id.iter()
        .map(|s| s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("|")
}

fn orbit_chi_c(id: &OrbitId) -> i64 {
    // the stratum is a torus (C^*)^a with a = Σ (|T_f| - 1)
    if id.iter().all(|s| s.len() == 1) {
        1
    } else {
        0
    }
}

/// Constant sheaf: one stratum, the whole space, with χ_c = number of fixed
/// points (each attracting cell is an affine space of χ_c one).
pub fn constant_sheaf(model: &GKMModel) -> ConstructibleSheaf {
    let d = model.fixed_points.len();
    ConstructibleSheaf {
        strata: vec![Stratum {
            name: "M".into(),
            chi_c: d as i64,
            stalk_euler: 1,
        }],
        kind: SheafKind::Constant,
        orbit_ids: None,
        cell_tables: BTreeMap::new(),
        // local cohomology of a constant sheaf on C^d at the origin sits in
        // one even degree, so every costalk has χ = 1
        costalks: CostalkData::Uniform(vec![1; d]),
    }
}

/// Orbit sheaf on a model with torus-orbit strata: stalk Euler data per
/// stratum, extension by zero off the named strata (absent names mean 0).
pub fn orbit_sheaf(model: &GKMModel, stalks: &BTreeMap<String, i64>) -> Result<ConstructibleSheaf> {
    let orbit = model
        .orbit
        .as_ref()
        .ok_or_else(|| Error::UnsupportedSheaf("model has no torus-orbit stratification".into()))?;
    let ids = orbit_strata(orbit);
    let names: Vec<String> = ids.iter().map(orbit_stratum_name).collect();
    for key in stalks.keys() {
        if !names.contains(key) {
            return Err(Error::InvalidInput(format!("unknown orbit stratum '{key}'")));
        }
    }
    let strata: Vec<Stratum> = ids
        .iter()
        .zip(&names)
        .map(|(id, name)| Stratum {
            name: name.clone(),
            chi_c: orbit_chi_c(id),
            stalk_euler: stalks.get(name).copied().unwrap_or(0),
        })
        .collect();
    // costalk at a fixed point: χ_c of a conic neighborhood in its cell,
    // which collapses to the stalk datum of the point stratum
    let sizes: Vec<usize> = orbit.factors.iter().map(|f| f.len()).collect();
    let mut costalks = Vec::with_capacity(model.fixed_points.len());
    for p in 0..model.fixed_points.len() {
        let digits = mixed_radix_digits(p, &sizes);
        let id: OrbitId = digits.into_iter().map(|d| vec![d]).collect();
        let name = orbit_stratum_name(&id);
        costalks.push(stalks.get(&name).copied().unwrap_or(0));
    }
    Ok(ConstructibleSheaf {
        strata,
        kind: SheafKind::Orbit,
        orbit_ids: Some(ids),
        cell_tables: BTreeMap::new(),
        costalks: CostalkData::Uniform(costalks),
    })
}

/// Decompose a fixed-point index into per-factor digits, most significant
/// factor first.
pub fn mixed_radix_digits(mut index: usize, sizes: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; sizes.len()];
    for (k, &s) in sizes.iter().enumerate().rev() {
        digits[k] = index % s;
        index /= s;
    }
    digits
}

/// The SL(2,R)-orbit stratification of CP¹: the real circle and two open
/// disks, with the constant sheaf extended by zero off the upper disk. The
/// two torus fixed points lie on the circle, so the cell intersections
/// genuinely depend on the chamber: the circle meets the big cell in a line
/// (χ_c = −1) and the small cell in a point.
pub fn upper_halfplane_sheaf(model: &GKMModel) -> Result<ConstructibleSheaf> {
    if model.fixed_points.len() != 2 || model.dim != 1 {
        return Err(Error::UnsupportedSheaf(
            "cp1-upper-halfplane preset needs a CP^1 model".into(),
        ));
    }
    let strata = vec![
        Stratum { name: "upper".into(), chi_c: 1, stalk_euler: 1 },
        Stratum { name: "circle".into(), chi_c: 0, stalk_euler: 0 },
        Stratum { name: "lower".into(), chi_c: 1, stalk_euler: 0 },
    ];
    let mut cell_tables = BTreeMap::new();
    // chamber "+": big cell at p0
    cell_tables.insert("+".to_string(), vec![vec![1, -1, 1], vec![0, 1, 0]]);
    cell_tables.insert("-".to_string(), vec![vec![0, 1, 0], vec![1, -1, 1]]);
    let mut costalks = BTreeMap::new();
    costalks.insert("+".to_string(), vec![1, 0]);
    costalks.insert("-".to_string(), vec![0, 1]);
    Ok(ConstructibleSheaf {
        strata,
        kind: SheafKind::Preset("cp1-upper-halfplane".into()),
        orbit_ids: None,
        cell_tables,
        costalks: CostalkData::PerChamber(costalks),
    })
}

/// Custom sheaf from explicit stratum data and per-chamber tables.
pub fn custom_sheaf(
    strata: Vec<Stratum>,
    cell_tables: BTreeMap<String, Vec<Vec<i64>>>,
    costalks: CostalkData,
) -> Result<ConstructibleSheaf> {
    let mut names = std::collections::BTreeSet::new();
    for s in &strata {
        if !names.insert(s.name.clone()) {
            return Err(Error::InvalidInput(format!("duplicate stratum name {}", s.name)));
        }
    }
    Ok(ConstructibleSheaf {
        strata,
        kind: SheafKind::Custom,
        orbit_ids: None,
        cell_tables,
        costalks,
    })
}

/// Degree shift: stalk and costalk Euler characteristics flip sign with the
/// parity of k; the underlying stratification is untouched.
pub fn shift(sheaf: &ConstructibleSheaf, k: i64) -> ConstructibleSheaf {
    let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
    let mut out = sheaf.clone();
    for s in &mut out.strata {
        s.stalk_euler *= sign;
    }
    out.costalks = match &sheaf.costalks {
        CostalkData::None => CostalkData::None,
        CostalkData::Uniform(v) => CostalkData::Uniform(v.iter().map(|m| m * sign).collect()),
        CostalkData::PerChamber(map) => CostalkData::PerChamber(
            map.iter()
                .map(|(c, v)| (c.clone(), v.iter().map(|m| m * sign).collect()))
                .collect(),
        ),
    };
    out
}

/// Sum of two sheaves on the same stratification, modelling the middle term
/// of a distinguished triangle: stalk data adds, geometric data must agree.
pub fn add(a: &ConstructibleSheaf, b: &ConstructibleSheaf) -> Result<ConstructibleSheaf> {
    if a.strata.len() != b.strata.len() {
        return Err(Error::IncompatibleStratification(format!(
            "{} vs {} strata",
            a.strata.len(),
            b.strata.len()
        )));
    }
    let mut strata = Vec::with_capacity(a.strata.len());
    for (sa, sb) in a.strata.iter().zip(&b.strata) {
        if sa.name != sb.name || sa.chi_c != sb.chi_c {
            return Err(Error::IncompatibleStratification(format!(
                "stratum '{}' (chi_c {}) vs '{}' (chi_c {})",
                sa.name, sa.chi_c, sb.name, sb.chi_c
            )));
        }
        strata.push(Stratum {
            name: sa.name.clone(),
            chi_c: sa.chi_c,
            stalk_euler: sa.stalk_euler + sb.stalk_euler,
        });
    }
    let mut cell_tables = a.cell_tables.clone();
    for (chamber, table) in &b.cell_tables {
        match cell_tables.get(chamber) {
            Some(existing) if existing != table => {
                return Err(Error::IncompatibleStratification(format!(
                    "cell tables disagree for chamber {chamber}"
                )))
            }
            Some(_) => {}
            None => {
                cell_tables.insert(chamber.clone(), table.clone());
            }
        }
    }
    let costalks = match (&a.costalks, &b.costalks) {
        (CostalkData::Uniform(va), CostalkData::Uniform(vb)) if va.len() == vb.len() => {
            CostalkData::Uniform(va.iter().zip(vb).map(|(x, y)| x + y).collect())
        }
        (CostalkData::PerChamber(ma), CostalkData::PerChamber(mb)) => {
            let mut merged = BTreeMap::new();
            for (c, va) in ma {
                if let Some(vb) = mb.get(c) {
                    if va.len() == vb.len() {
                        merged.insert(c.clone(), va.iter().zip(vb).map(|(x, y)| x + y).collect());
                    }
                }
            }
            if merged.is_empty() {
                CostalkData::None
            } else {
                CostalkData::PerChamber(merged)
            }
        }
        _ => CostalkData::None,
    };
    let kind = if a.kind == b.kind { a.kind.clone() } else { SheafKind::Custom };
    let orbit_ids = if a.orbit_ids == b.orbit_ids { a.orbit_ids.clone() } else { None };
    Ok(ConstructibleSheaf { strata, kind, orbit_ids, cell_tables, costalks })
}

/// Check the additivity identities of every stored cell table: the cells
/// partition the space, so per stratum the entries must sum to χ_c(S).
pub fn validate_cell_tables(model: &GKMModel, sheaf: &ConstructibleSheaf) -> Result<()> {
    let n_signs = model.delta_reduced().len();
    for (chamber, table) in &sheaf.cell_tables {
        if chamber.len() != n_signs || !chamber.chars().all(|c| c == '+' || c == '-') {
            return Err(Error::InconsistentSheaf(format!(
                "chamber key '{chamber}' is not a sign string of length {n_signs}"
            )));
        }
        if table.len() != model.fixed_points.len() {
            return Err(Error::InconsistentSheaf(format!(
                "chamber '{chamber}': table has {} rows, model has {} fixed points",
                table.len(),
                model.fixed_points.len()
            )));
        }
        for row in table {
            if row.len() != sheaf.strata.len() {
                return Err(Error::InconsistentSheaf(format!(
                    "chamber '{chamber}': row length {} does not match {} strata",
                    row.len(),
                    sheaf.strata.len()
                )));
            }
        }
        for (s, stratum) in sheaf.strata.iter().enumerate() {
            let got: i64 = table.iter().map(|row| row[s]).sum();
            if got != stratum.chi_c {
                return Err(Error::InconsistentSheaf(format!(
                    "chamber '{chamber}', stratum '{}': sum over cells of chi_c(S \u{2229} O_p) = {got}, but chi_c(S) = {}",
                    stratum.name, stratum.chi_c
                )));
            }
        }
    }
    Ok(())
}

/// Integer multiplicity of each fixed point in a fixed chamber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityVector {
    pub chamber: String,
    /// Aligned with the model's fixed points.
    pub m: Vec<i64>,
}

impl MultiplicityVector {
    pub fn total(&self) -> i64 {
        self.m.iter().sum()
    }
}

/// Global route: m_p = Σ_S χ_c(S ∩ O_p) · e_S from the intersection table.
pub fn multiplicities(
    model: &GKMModel,
    sheaf: &ConstructibleSheaf,
    x: &CartanElement,
    slice: Slice,
) -> Result<MultiplicityVector> {
    let table = cell_intersection_table(model, sheaf, x, slice)?;
    let m = table
        .entries
        .iter()
        .map(|row| {
            row.iter()
                .zip(&sheaf.strata)
                .map(|(t, s)| t * s.stalk_euler)
                .sum()
        })
        .collect();
    Ok(MultiplicityVector { chamber: table.chamber, m })
}

/// Local route: stored costalk Euler characteristics. Only presets (and
/// custom sheaves that supply the data) support this; it exists as an
/// independent check of the global route.
pub fn multiplicities_local(
    model: &GKMModel,
    sheaf: &ConstructibleSheaf,
    x: &CartanElement,
    slice: Slice,
) -> Result<MultiplicityVector> {
    let chamber = chamber_of(model, x, slice)?;
    let m = match &sheaf.costalks {
        CostalkData::Uniform(v) => v.clone(),
        CostalkData::PerChamber(map) => map
            .get(&chamber)
            .cloned()
            .ok_or_else(|| Error::UnsupportedSheaf(format!("no costalk data for chamber {chamber}")))?,
        CostalkData::None => {
            return Err(Error::UnsupportedSheaf("sheaf carries no costalk data".into()))
        }
    };
    if m.len() != model.fixed_points.len() {
        return Err(Error::InconsistentSheaf(format!(
            "costalk table has {} entries, model has {} fixed points",
            m.len(),
            model.fixed_points.len()
        )));
    }
    Ok(MultiplicityVector { chamber, m })
}
