//! Exact computation of closures of connected complex Lie subgroups in
//! compact complex tori `ℂⁿ/Γ` whose period lattice has entries in a number
//! field, together with the endomorphism, complex-multiplication and
//! isogeny tests that decide when every such closure is a complex subtorus.

pub mod closure;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod interval;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod structure;
pub mod torus;

/// Exact rationals.
pub type Q = num_rational::BigRational;

pub use closure::{closure, is_complex_subspace, lambda_invariance_check, multiplier_matrix, ClosureResult, MultiplierMatrix};
pub use elliptic::{cm_check, endo_clear_denominator, is_isogenous, tau_invariant, CmVerdict, Isogeny, TauInvariant};
pub use error::{Error, Result};
pub use field::{rational_kernel, AlgebraicNumber, FieldSpec, Side};
pub use interval::{ComplexBox, Interval};
pub use lattice::{hnf, hnf_saturate, lattice_index, IMat, IntegerMatrixHNF};
pub use linalg::{Mat, QMat};
pub use structure::{
    census, classify, classify_with_census, endomorphism_algebra, hyperplane_core, hyperplane_forms,
    isogeny_to_product, line_census, product_form_classify, product_torus, quotient_torus, witness_search, Census,
    CensusExample, ClassificationReport, EndAlgebra, HyperplaneForm, QuotientTorus, Signal, Slope,
};
pub use torus::{commensurable, Commensurability, ComplexSubgroupSpec, ComplexTorus, EllipticCurveSpec, RationalSubspace};
