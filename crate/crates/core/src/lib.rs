//! Fixed-point localization engine for equivariant integrals over
//! characteristic cycles of constructible sheaves.
//!
//! The crate evaluates localization sums over combinatorial models of torus
//! manifolds (projective spaces, the flag variety of C³, products, custom
//! fixed-point data), computes the chamber-dependent integer multiplicities
//! of constructible sheaves, verifies the sheaf Gauss–Bonnet identity, and
//! evaluates Fourier transforms of Duistermaat–Heckman measures — with every
//! sign decision made in exact rational arithmetic and every symbolic result
//! cross-checked against independent numerical oracles.
//!
//! Module map:
//! - [`weights`]: torus characters, Cartan elements, regularity, chambers,
//!   and the expression grammar of fixed-point classes;
//! - [`models`]: builders for the supported manifolds and the standard
//!   equivariant classes (1, Euler form, exponential of the Hamiltonian);
//! - [`bb`]: attracting-cell decompositions and cell–stratum intersection
//!   tables;
//! - [`sheaves`]: Euler-characteristic calculus of constructible sheaves and
//!   the two routes to the multiplicities;
//! - [`localize`]: the localization sums, Gauss–Bonnet, Duistermaat–Heckman
//!   transforms, chamber scans;
//! - [`oracle`]: quadrature, Gaussian fiber integrals and Monte-Carlo
//!   pushforwards that everything symbolic is checked against.

pub mod bb;
pub mod error;
pub mod exact;
pub mod localize;
pub mod models;
pub mod oracle;
pub mod sheaves;
pub mod weights;

pub use bb::{bb_decompose, cell_intersection_table, BBCell, BBDecomposition, IntersectionTable};
pub use error::{Error, Result};
pub use exact::{parse_rat, ComplexRat, Rat};
pub use localize::{
    bv_localize, chamber_scan, dh_fourier, enumerate_chambers, gauss_bonnet, sheaf_localize,
    ChamberScanRow, ChamberWitness, GaussBonnetCheck, LocalizationResult, LocalizationTerm,
    Prefactor,
};
pub use models::{
    build_cpn, build_flag3, build_product, chamber_of, cp1_default, cpn_coordinate,
    euler_form_class, exp_hamiltonian_class, one_class, FixedPoint, FixedPointClass, GKMModel,
    ModelKind, OrbitStructure, DH_CALIBRATION_I_POWER,
};
pub use oracle::{
    calibration_sweep, cp1_closed_form, dh_inversion_check, dh_pushforward_cp1,
    gaussian_fiber_integral, quadrature_cp1, QuadratureSpec, Scheme,
};
pub use sheaves::{
    add, constant_sheaf, custom_sheaf, euler_characteristic, multiplicities,
    multiplicities_local, orbit_sheaf, orbit_stratum_name, shift, upper_halfplane_sheaf,
    validate_cell_tables, ConstructibleSheaf, CostalkData, MultiplicityVector, SheafKind, Stratum,
};
pub use weights::{
    chamber_id, eval_form, eval_weight, is_regular, CartanElement, ClassExpr, ClassTerm,
    Regularity, Slice, Weight,
};
