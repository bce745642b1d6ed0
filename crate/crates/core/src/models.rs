//! Combinatorial models of smooth projective torus-manifolds: a finite fixed
//! point set with tangent weights and Hamiltonian values is all the
//! localization formulas ever read.
//!
//! Builders are provided for projective spaces, the three-dimensional flag
//! variety and products; anything else enters as custom fixed-point data.
//! Correctness of the builders is certified by invariants (the reciprocal
//! denominator sum vanishes, the Euler characteristic comes out right)
//! rather than by re-deriving root combinatorics.

use crate::error::{Error, Result};
use crate::exact::{ComplexRat, Rat};
use crate::weights::{
    canonical_order, eval_weight, reduced_delta, signs_over, signs_to_string, CartanElement,
    ClassExpr, Slice, Weight,
};
use num::{One, Zero};
use serde::{Deserialize, Serialize};

/// Per-dimension calibration exponent for real-form integrals.
///
/// The master localization prefactor is (−2πi)^n. Against the direct sphere
/// quadrature the Fourier transform of the Liouville measure needs one extra
/// factor of i^3 = −i per complex dimension, which turns (−2πi)^n into
/// (−2π)^n. The oracle suite asserts that this is the unique choice among
/// the fourth roots of unity reproducing the CP¹ quadrature at t ∈ {1/2, 1, 2}.
pub const DH_CALIBRATION_I_POWER: u8 = 3;

/// Fixed point of the torus action: tangent weights and the moment-map value
/// as a rational linear form on the Cartan algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPoint {
    pub name: String,
    pub tangent_weights: Vec<Weight>,
    pub hamiltonian: Vec<Rat>,
}

/// Tag recording which builder produced the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Cpn,
    Flag3,
    Product,
    Custom,
}

/// Torus-orbit stratification generators: for each projective factor, the
/// embedded coordinate weight of every homogeneous coordinate. Fixed points
/// are indexed mixed-radix over the factors (most significant first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitStructure {
    pub factors: Vec<Vec<Weight>>,
}

/// GKM-style model: isolated fixed points with tangent weights.
#[derive(Clone, Debug)]
pub struct GKMModel {
    pub rank: usize,
    pub dim: usize,
    pub fixed_points: Vec<FixedPoint>,
    pub kind: ModelKind,
    pub orbit: Option<OrbitStructure>,
    delta: Vec<Weight>,
}

impl GKMModel {
    /// Validate fixed-point data and derive Δ. Used by every builder and by
    /// custom scene input.
    pub fn assemble(
        rank: usize,
        dim: usize,
        fixed_points: Vec<FixedPoint>,
        kind: ModelKind,
        orbit: Option<OrbitStructure>,
    ) -> Result<Self> {
        if fixed_points.is_empty() {
            return Err(Error::InvalidInput("model needs at least one fixed point".into()));
        }
        let mut names = std::collections::BTreeSet::new();
        for fp in &fixed_points {
            if !names.insert(fp.name.clone()) {
                return Err(Error::InvalidInput(format!("duplicate fixed point name {}", fp.name)));
            }
            if fp.tangent_weights.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "fixed point {} has {} tangent weights, expected {}",
                    fp.name,
                    fp.tangent_weights.len(),
                    dim
                )));
            }
            for w in &fp.tangent_weights {
                if w.rank() != rank {
                    return Err(Error::DimensionMismatch { expected: rank, got: w.rank() });
                }
                if w.is_zero() {
                    return Err(Error::DegenerateAction(format!(
                        "zero tangent weight at fixed point {}",
                        fp.name
                    )));
                }
            }
            if fp.hamiltonian.len() != rank {
                return Err(Error::DimensionMismatch { expected: rank, got: fp.hamiltonian.len() });
            }
        }
        let all: Vec<Weight> = fixed_points
            .iter()
            .flat_map(|fp| fp.tangent_weights.iter().cloned())
            .collect();
        let delta = canonical_order(&all);
        Ok(Self { rank, dim, fixed_points, kind, orbit, delta })
    }

    /// Δ: every tangent weight that occurs, canonically ordered.
    pub fn delta(&self) -> &[Weight] {
        &self.delta
    }

    /// One representative per antipodal pair of Δ; chamber strings are signs
    /// over this list.
    pub fn delta_reduced(&self) -> Vec<Weight> {
        reduced_delta(&self.delta)
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.fixed_points.iter().position(|fp| fp.name == name)
    }

    /// Chamber signature of X over the reduced Δ, e.g. "+" or "+-+".
    /// `x_bb` must already be the slice representative (see [`Slice`]).
    pub fn chamber_string(&self, x_bb: &CartanElement) -> Result<String> {
        Ok(signs_to_string(&signs_over(&self.delta_reduced(), x_bb)?))
    }

    /// Den_p(X) = Π β(X) over the tangent weights at the fixed point.
    pub fn den_at(&self, point: usize, x: &CartanElement) -> Result<ComplexRat> {
        let mut v = ComplexRat::one();
        for beta in &self.fixed_points[point].tangent_weights {
            v = &v * &eval_weight(beta, x)?;
        }
        Ok(v)
    }

    /// Σ_p 1/Den_p(X), exact. Zero for every model of positive dimension and
    /// regular X: localizing the class 1, whose top component vanishes.
    pub fn sum_reciprocal_dens(&self, x: &CartanElement) -> Result<ComplexRat> {
        let mut total = ComplexRat::zero();
        for (idx, fp) in self.fixed_points.iter().enumerate() {
            let den = self.den_at(idx, x)?;
            let inv = den.inv().ok_or_else(|| Error::SingularEvaluation {
                weight: format!("Den_{}", fp.name),
            })?;
            total = &total + &inv;
        }
        Ok(total)
    }
}

/// Chamber of X for a model, applying the slice rotation first.
pub fn chamber_of(model: &GKMModel, x: &CartanElement, slice: Slice) -> Result<String> {
    model.chamber_string(&slice.bb_point(x))
}

/// Projective space CP^n from n+1 pairwise distinct coordinate weights.
/// Tangent weights at p_i are {a_j − a_i : j ≠ i}.
pub fn build_cpn(
    n: usize,
    coordinate_weights: &[Weight],
    hamiltonian_levels: &[Vec<Rat>],
) -> Result<GKMModel> {
    if coordinate_weights.len() != n + 1 {
        return Err(Error::InvalidInput(format!(
            "CP^{} needs {} coordinate weights, got {}",
            n,
            n + 1,
            coordinate_weights.len()
        )));
    }
    if hamiltonian_levels.len() != n + 1 {
        return Err(Error::InvalidInput(format!(
            "CP^{} needs {} hamiltonian levels, got {}",
            n,
            n + 1,
            hamiltonian_levels.len()
        )));
    }
    let rank = coordinate_weights[0].rank();
    for (i, a) in coordinate_weights.iter().enumerate() {
        for b in &coordinate_weights[i + 1..] {
            if a == b {
                return Err(Error::DegenerateAction(format!(
                    "repeated coordinate weight {a}: torus fixed points are not isolated"
                )));
            }
        }
    }
    let fixed_points = (0..=n)
        .map(|i| FixedPoint {
            name: format!("p{i}"),
            tangent_weights: (0..=n)
                .filter(|&j| j != i)
                .map(|j| coordinate_weights[j].sub(&coordinate_weights[i]))
                .collect(),
            hamiltonian: hamiltonian_levels[i].clone(),
        })
        .collect();
    GKMModel::assemble(
        rank,
        n,
        fixed_points,
        ModelKind::Cpn,
        Some(OrbitStructure { factors: vec![coordinate_weights.to_vec()] }),
    )
}

/// Rank-1 CP¹ with coordinate weights (0), (1) and moment image [−1, 1]:
/// the model every numerical oracle is compared against.
pub fn cp1_default() -> GKMModel {
    build_cpn(
        1,
        &[Weight::new(vec![0]), Weight::new(vec![1])],
        &[vec![-Rat::one()], vec![Rat::one()]],
    )
    .expect("CP^1 default model")
}

/// CP^n under the full coordinate torus of rank n+1 (a_i = e_i), Hamiltonian
/// levels e_i.
pub fn cpn_coordinate(n: usize) -> GKMModel {
    let coords: Vec<Weight> = (0..=n)
        .map(|i| {
            let mut c = vec![0; n + 1];
            c[i] = 1;
            Weight::new(c)
        })
        .collect();
    let levels: Vec<Vec<Rat>> = (0..=n)
        .map(|i| {
            let mut l = vec![Rat::zero(); n + 1];
            l[i] = Rat::one();
            l
        })
        .collect();
    build_cpn(n, &coords, &levels).expect("coordinate CP^n model")
}

fn permutations3() -> Vec<[usize; 3]> {
    vec![
        [1, 2, 3],
        [1, 3, 2],
        [2, 1, 3],
        [2, 3, 1],
        [3, 1, 2],
        [3, 2, 1],
    ]
}

/// Full flag variety of C³: six fixed points indexed by permutations, rank 3,
/// complex dimension 3. Tangent weights at w are {e_{w(j)} − e_{w(i)} : i < j};
/// the Hamiltonian is ⟨w·λ, ·⟩ for a strictly dominant λ.
pub fn build_flag3(lambda: Option<[Rat; 3]>) -> GKMModel {
    let lambda = lambda.unwrap_or_else(|| {
        [
            Rat::from_integer(2.into()),
            Rat::one(),
            Rat::zero(),
        ]
    });
    let mut fixed_points = Vec::with_capacity(6);
    for w in permutations3() {
        let name: String = w.iter().map(|v| v.to_string()).collect();
        let mut tangent_weights = Vec::with_capacity(3);
        for i in 0..3 {
            for j in (i + 1)..3 {
                let mut c = vec![0i64; 3];
                c[w[j] - 1] += 1;
                c[w[i] - 1] -= 1;
                tangent_weights.push(Weight::new(c));
            }
        }
        // coordinate w(i) of w·λ carries λ_i
        let mut ham = vec![Rat::zero(); 3];
        for i in 0..3 {
            ham[w[i] - 1] = lambda[i].clone();
        }
        fixed_points.push(FixedPoint { name, tangent_weights, hamiltonian: ham });
    }
    GKMModel::assemble(3, 3, fixed_points, ModelKind::Flag3, None)
        .expect("flag3 model")
}

/// Product model: fixed points are pairs, weights and Hamiltonians are
/// block-embedded. Orbit structure survives when both factors have one.
pub fn build_product(a: &GKMModel, b: &GKMModel) -> GKMModel {
    let rank = a.rank + b.rank;
    let mut fixed_points = Vec::with_capacity(a.fixed_points.len() * b.fixed_points.len());
    for fa in &a.fixed_points {
        for fb in &b.fixed_points {
            let mut tangent_weights: Vec<Weight> = fa
                .tangent_weights
                .iter()
                .map(|w| w.embed(rank, 0))
                .collect();
            tangent_weights.extend(fb.tangent_weights.iter().map(|w| w.embed(rank, a.rank)));
            let mut ham = fa.hamiltonian.clone();
            ham.extend(fb.hamiltonian.iter().cloned());
            fixed_points.push(FixedPoint {
                name: format!("{}x{}", fa.name, fb.name),
                tangent_weights,
                hamiltonian: ham,
            });
        }
    }
    let orbit = match (&a.orbit, &b.orbit) {
        (Some(oa), Some(ob)) => {
            let mut factors: Vec<Vec<Weight>> = oa
                .factors
                .iter()
                .map(|f| f.iter().map(|w| w.embed(rank, 0)).collect())
                .collect();
            factors.extend(
                ob.factors
                    .iter()
                    .map(|f| f.iter().map(|w| w.embed(rank, a.rank)).collect::<Vec<_>>()),
            );
            Some(OrbitStructure { factors })
        }
        _ => None,
    };
    GKMModel::assemble(rank, a.dim + b.dim, fixed_points, ModelKind::Product, orbit)
        .expect("product model")
}

/// Restrictions of an equivariant class to the fixed points, one expression
/// per point in model order.
#[derive(Clone, Debug)]
pub struct FixedPointClass {
    pub exprs: Vec<ClassExpr>,
}

/// The class 1.
pub fn one_class(model: &GKMModel) -> FixedPointClass {
    FixedPointClass {
        exprs: model
            .fixed_points
            .iter()
            .map(|_| ClassExpr::one(model.rank))
            .collect(),
    }
}

/// Equivariant Euler form of the tangent bundle: restriction at p is
/// i^n · Den_p(X).
pub fn euler_form_class(model: &GKMModel) -> FixedPointClass {
    let i_power = (model.dim % 4) as u8;
    FixedPointClass {
        exprs: model
            .fixed_points
            .iter()
            .map(|fp| ClassExpr::monomial(model.rank, i_power, fp.tangent_weights.clone(), vec![]))
            .collect(),
    }
}

/// exp(J + ω) with the Hamiltonian scaled by rational t: restriction at p is
/// e^{t·⟨J(p), X⟩}.
pub fn exp_hamiltonian_class(model: &GKMModel, t: &Rat) -> FixedPointClass {
    FixedPointClass {
        exprs: model
            .fixed_points
            .iter()
            .map(|fp| ClassExpr::exponential(fp.hamiltonian.iter().map(|h| h * t).collect()))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::complex::Complex64;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn cp1_builder_difference_rule() {
        let m = cp1_default();
        assert_eq!(m.fixed_points[0].tangent_weights, vec![Weight::new(vec![1])]);
        assert_eq!(m.fixed_points[1].tangent_weights, vec![Weight::new(vec![-1])]);
        assert_eq!(m.fixed_points[0].hamiltonian, vec![rat(-1, 1)]);
    }

    #[test]
    fn cp2_builder_difference_rule() {
        let a = [
            Weight::new(vec![0, 0]),
            Weight::new(vec![1, 0]),
            Weight::new(vec![0, 1]),
        ];
        let levels = vec![vec![Rat::zero(); 2]; 3];
        let m = build_cpn(2, &a, &levels).unwrap();
        assert_eq!(
            m.fixed_points[0].tangent_weights,
            vec![Weight::new(vec![1, 0]), Weight::new(vec![0, 1])]
        );
        assert_eq!(
            m.fixed_points[1].tangent_weights,
            vec![Weight::new(vec![-1, 0]), Weight::new(vec![-1, 1])]
        );
        assert_eq!(
            m.fixed_points[2].tangent_weights,
            vec![Weight::new(vec![0, -1]), Weight::new(vec![1, -1])]
        );
    }

    #[test]
    fn repeated_coordinate_weights_rejected() {
        let a = [Weight::new(vec![1]), Weight::new(vec![1])];
        let levels = vec![vec![Rat::zero()]; 2];
        assert!(matches!(
            build_cpn(1, &a, &levels),
            Err(Error::DegenerateAction(_))
        ));
    }

    #[test]
    fn flag3_shape() {
        let m = build_flag3(None);
        assert_eq!(m.fixed_points.len(), 6);
        assert_eq!(m.dim, 3);
        assert_eq!(m.rank, 3);
        // identity permutation carries {e2-e1, e3-e1, e3-e2}
        let id = &m.fixed_points[0];
        assert_eq!(id.name, "123");
        assert_eq!(
            id.tangent_weights,
            vec![
                Weight::new(vec![-1, 1, 0]),
                Weight::new(vec![-1, 0, 1]),
                Weight::new(vec![0, -1, 1]),
            ]
        );
        // Δ is the six roots ±(e_i - e_j)
        assert_eq!(m.delta().len(), 6);
        assert_eq!(m.fixed_points[0].hamiltonian, vec![rat(2, 1), rat(1, 1), rat(0, 1)]);
    }

    #[test]
    fn product_shape_and_den_factorization() {
        let m = build_product(&cp1_default(), &cp1_default());
        assert_eq!(m.fixed_points.len(), 4);
        assert_eq!(m.dim, 2);
        for fp in &m.fixed_points {
            assert_eq!(fp.tangent_weights.len(), 2);
        }
        let x = CartanElement::from_ints(&[3, 5]);
        let xa = CartanElement::from_ints(&[3]);
        let xb = CartanElement::from_ints(&[5]);
        let a = cp1_default();
        for (i, fp) in m.fixed_points.iter().enumerate() {
            let ia = i / 2;
            let ib = i % 2;
            let lhs = m.den_at(i, &x).unwrap();
            let rhs = &a.den_at(ia, &xa).unwrap() * &a.den_at(ib, &xb).unwrap();
            assert_eq!(lhs, rhs, "at {}", fp.name);
        }
    }

    #[test]
    fn reciprocal_den_sum_vanishes_on_builtins() {
        let x3 = CartanElement::from_ints(&[5, 2, -3]);
        for m in [cpn_coordinate(1), cpn_coordinate(2), build_flag3(None)] {
            let x = if m.rank == 3 {
                x3.clone()
            } else {
                CartanElement::from_ints(&[5, 2])
            };
            let s = m.sum_reciprocal_dens(&x).unwrap();
            assert!(s.is_zero(), "sum 1/Den nonzero for {:?}", m.kind);
        }
        let p = build_product(&cp1_default(), &cpn_coordinate(1));
        let x = CartanElement::from_ints(&[7, 2, 9]);
        assert!(p.sum_reciprocal_dens(&x).unwrap().is_zero());
    }

    #[test]
    fn den_over_den_counts_points() {
        let m = build_flag3(None);
        let x = CartanElement::from_ints(&[4, 1, -2]);
        let mut total = ComplexRat::zero();
        for fp in &m.fixed_points {
            let e = ClassExpr::monomial(3, 0, fp.tangent_weights.clone(), fp.tangent_weights.clone());
            total = &total + &e.eval_exact(&x).unwrap();
        }
        assert_eq!(total, ComplexRat::from_int(6));
    }

    #[test]
    fn euler_form_restrictions() {
        let m = cp1_default();
        let cls = euler_form_class(&m);
        let x = CartanElement::from_ints(&[2]);
        let v0 = cls.exprs[0].eval(&x).unwrap();
        let v1 = cls.exprs[1].eval(&x).unwrap();
        assert!((v0 - Complex64::new(0.0, 2.0)).norm() < 1e-14);
        assert!((v1 - Complex64::new(0.0, -2.0)).norm() < 1e-14);

        let a = [
            Weight::new(vec![0, 0]),
            Weight::new(vec![1, 0]),
            Weight::new(vec![0, 1]),
        ];
        let m2 = build_cpn(2, &a, &vec![vec![Rat::zero(); 2]; 3]).unwrap();
        let cls2 = euler_form_class(&m2);
        let x2 = CartanElement::from_ints(&[1, 2]);
        let v = cls2.exprs[0].eval(&x2).unwrap();
        assert!((v - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn exp_hamiltonian_restrictions() {
        let m = cp1_default();
        let x = CartanElement::from_ints(&[1]);
        let cls = exp_hamiltonian_class(&m, &Rat::one());
        let v0 = cls.exprs[0].eval(&x).unwrap();
        let v1 = cls.exprs[1].eval(&x).unwrap();
        assert!((v0.re - (-1.0f64).exp()).abs() < 1e-14 && v0.im.abs() < 1e-16);
        assert!((v1.re - 1.0f64.exp()).abs() < 1e-14);

        // t = 0 collapses to the constant class 1
        let cls0 = exp_hamiltonian_class(&m, &Rat::zero());
        for e in &cls0.exprs {
            let v = e.eval(&CartanElement::from_ints(&[17])).unwrap();
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }

        // product model multiplies factor exponentials
        let p = build_product(&m, &m);
        let clsp = exp_hamiltonian_class(&p, &Rat::one());
        let xp = CartanElement::from_ints(&[1, 2]);
        let v = clsp.exprs[1].eval(&xp).unwrap(); // p0 x p1: e^{-1} * e^{2}
        assert!((v.re - (1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn chamber_strings_on_cp1() {
        let m = cp1_default();
        // reduced Δ representative is (-1): X = -1 gives "+" (big cell at p0)
        assert_eq!(chamber_of(&m, &CartanElement::from_ints(&[-1]), Slice::Split).unwrap(), "+");
        assert_eq!(chamber_of(&m, &CartanElement::from_ints(&[1]), Slice::Split).unwrap(), "-");
        // compact slice: X = i rotates to -1
        let xi = CartanElement::from_im(vec![Rat::one()]);
        assert_eq!(chamber_of(&m, &xi, Slice::Compact).unwrap(), "+");
    }
}
