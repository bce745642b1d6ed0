//! Scene files: a manifold descriptor, a sheaf descriptor, an optional
//! evaluation point and options, all as JSON with rationals carried as
//! strings so nothing is ever rounded on the way in or out.

use equiloc_core::{
    build_cpn, build_flag3, build_product, constant_sheaf, cp1_default, cpn_coordinate,
    custom_sheaf, orbit_sheaf, parse_rat, upper_halfplane_sheaf, CartanElement,
    ConstructibleSheaf, CostalkData, Error as CoreError, FixedPoint, GKMModel, ModelKind, Rat,
    Slice, Stratum, Weight,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scene {
    pub manifold: ManifoldDesc,
    #[serde(default)]
    pub sheaf: SheafDesc,
    #[serde(default, rename = "X", skip_serializing_if = "Option::is_none")]
    pub x: Option<XDesc>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Options {
    #[serde(default)]
    pub slice: Slice,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XDesc {
    pub re: Vec<String>,
    #[serde(default)]
    pub im: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ManifoldDesc {
    Cpn {
        n: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        coordinate_weights: Option<Vec<Vec<i64>>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        hamiltonian_levels: Option<Vec<Vec<String>>>,
    },
    Flag3 {
        #[serde(skip_serializing_if = "Option::is_none")]
        lambda: Option<[String; 3]>,
    },
    Product {
        factors: Vec<ManifoldDesc>,
    },
    Custom {
        rank: usize,
        dim: usize,
        fixed_points: Vec<FixedPointDesc>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixedPointDesc {
    pub name: String,
    pub tangent_weights: Vec<Vec<i64>>,
    pub hamiltonian: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SheafDesc {
    Constant {},
    Orbit {
        stalks: BTreeMap<String, i64>,
    },
    Preset {
        name: String,
    },
    Custom {
        strata: Vec<StratumDesc>,
        #[serde(default)]
        cell_tables: BTreeMap<String, Vec<Vec<i64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        costalk_tables: Option<BTreeMap<String, Vec<i64>>>,
    },
}

impl Default for SheafDesc {
    fn default() -> Self {
        SheafDesc::Constant {}
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StratumDesc {
    pub name: String,
    pub chi_c: i64,
    pub stalk_euler: i64,
}

fn rat_of(s: &str) -> Result<Rat, CoreError> {
    parse_rat(s).ok_or_else(|| CoreError::InvalidInput(format!("cannot parse rational '{s}'")))
}

fn rat_vec(strings: &[String]) -> Result<Vec<Rat>, CoreError> {
    strings.iter().map(|s| rat_of(s)).collect()
}

pub fn build_model(desc: &ManifoldDesc) -> Result<GKMModel, CoreError> {
    match desc {
        ManifoldDesc::Cpn { n, coordinate_weights, hamiltonian_levels } => {
            match (coordinate_weights, hamiltonian_levels) {
                (None, None) => Ok(if *n == 1 { cp1_default() } else { cpn_coordinate(*n) }),
                _ => {
                    let coords: Vec<Weight> = coordinate_weights
                        .clone()
                        .ok_or_else(|| {
                            CoreError::InvalidInput(
                                "hamiltonian_levels given without coordinate_weights".into(),
                            )
                        })?
                        .into_iter()
                        .map(Weight::new)
                        .collect();
                    let levels: Vec<Vec<Rat>> = match hamiltonian_levels {
                        Some(levels) => levels
                            .iter()
                            .map(|l| rat_vec(l))
                            .collect::<Result<_, _>>()?,
                        None => {
                            let rank = coords.first().map(|w| w.rank()).unwrap_or(0);
                            vec![vec![Rat::from_integer(0.into()); rank]; n + 1]
                        }
                    };
                    build_cpn(*n, &coords, &levels)
                }
            }
        }
        ManifoldDesc::Flag3 { lambda } => {
            let lambda = match lambda {
                Some([a, b, c]) => Some([rat_of(a)?, rat_of(b)?, rat_of(c)?]),
                None => None,
            };
            Ok(build_flag3(lambda))
        }
        ManifoldDesc::Product { factors } => {
            if factors.len() < 2 {
                return Err(CoreError::InvalidInput("product needs at least two factors".into()));
            }
            let mut model = build_model(&factors[0])?;
            for f in &factors[1..] {
                model = build_product(&model, &build_model(f)?);
            }
            Ok(model)
        }
        ManifoldDesc::Custom { rank, dim, fixed_points } => {
            let fps: Vec<FixedPoint> = fixed_points
                .iter()
                .map(|fp| {
                    Ok(FixedPoint {
                        name: fp.name.clone(),
                        tangent_weights: fp.tangent_weights.iter().cloned().map(Weight::new).collect(),
                        hamiltonian: rat_vec(&fp.hamiltonian)?,
                    })
                })
                .collect::<Result<_, CoreError>>()?;
            GKMModel::assemble(*rank, *dim, fps, ModelKind::Custom, None)
        }
    }
}

pub fn build_sheaf(model: &GKMModel, desc: &SheafDesc) -> Result<ConstructibleSheaf, CoreError> {
    match desc {
        SheafDesc::Constant {} => Ok(constant_sheaf(model)),
        SheafDesc::Orbit { stalks } => orbit_sheaf(model, stalks),
        SheafDesc::Preset { name } => match name.as_str() {
            "cp1-upper-halfplane" => upper_halfplane_sheaf(model),
            other => Err(CoreError::InvalidInput(format!("unknown preset sheaf '{other}'"))),
        },
        SheafDesc::Custom { strata, cell_tables, costalk_tables } => {
            let strata = strata
                .iter()
                .map(|s| Stratum {
                    name: s.name.clone(),
                    chi_c: s.chi_c,
                    stalk_euler: s.stalk_euler,
                })
                .collect();
            let costalks = match costalk_tables {
                Some(map) => CostalkData::PerChamber(map.clone()),
                None => CostalkData::None,
            };
            custom_sheaf(strata, cell_tables.clone(), costalks)
        }
    }
}

pub fn build_x(desc: &XDesc, rank: usize) -> Result<CartanElement, CoreError> {
    let re = rat_vec(&desc.re)?;
    let im = if desc.im.is_empty() {
        vec![Rat::from_integer(0.into()); re.len()]
    } else {
        rat_vec(&desc.im)?
    };
    let x = CartanElement::new(re, im)?;
    if x.rank() != rank {
        return Err(CoreError::DimensionMismatch { expected: rank, got: x.rank() });
    }
    Ok(x)
}

/// Parse a command-line Cartan element: comma-separated components, each a
/// rational with an optional imaginary part, e.g. `1`, `-2/3`, `i1`,
/// `3/7-i1/5`, `2+i3`.
pub fn parse_x_arg(s: &str, rank: usize) -> Result<CartanElement, CoreError> {
    let mut re = Vec::new();
    let mut im = Vec::new();
    for part in s.split(',') {
        let (r, i) = parse_component(part.trim())
            .ok_or_else(|| CoreError::InvalidInput(format!("cannot parse X component '{part}'")))?;
        re.push(r);
        im.push(i);
    }
    let x = CartanElement::new(re, im)?;
    if x.rank() != rank {
        return Err(CoreError::DimensionMismatch { expected: rank, got: x.rank() });
    }
    Ok(x)
}

fn parse_component(s: &str) -> Option<(Rat, Rat)> {
    if s.is_empty() {
        return None;
    }
    // split into at most two signed terms; signs occur only at the start or
    // as a separator (rational syntax has no interior +/-)
    let bytes = s.as_bytes();
    let mut split_at = None;
    for (k, &b) in bytes.iter().enumerate().skip(1) {
        if b == b'+' || b == b'-' {
            split_at = Some(k);
            break;
        }
    }
    let terms: Vec<&str> = match split_at {
        Some(k) => vec![&s[..k], &s[k..]],
        None => vec![s],
    };
    let zero = Rat::from_integer(0.into());
    let mut re: Option<Rat> = None;
    let mut im: Option<Rat> = None;
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, term.strip_prefix('+').unwrap_or(term)),
        };
        let signed = |r: Rat| if sign < 0 { -r } else { r };
        if let Some(mag) = body.strip_prefix('i') {
            if im.is_some() {
                return None;
            }
            let r = if mag.is_empty() { Rat::from_integer(1.into()) } else { parse_rat(mag)? };
            im = Some(signed(r));
        } else {
            if re.is_some() {
                return None;
            }
            re = Some(signed(parse_rat(body)?));
        }
    }
    Some((re.unwrap_or_else(|| zero.clone()), im.unwrap_or(zero)))
}
