//! Verification workbench for algebraic curvature tensors.
//!
//! The crate implements curvature operators on two-forms together with the
//! Kulkarni–Nomizu, dot and sharp products, the Weyl decomposition, the
//! Bochner–Weitzenböck zero-order identities for harmonic Weyl curvature, the
//! four-dimensional self-dual machinery, the scalar rigidity bounds and a
//! finite-difference chart calculus used to check the differential identities.
//!
//! Every identity is checked numerically against an independent evaluation
//! path; see the `tests/` directory and the `weylbench` binary.

pub mod algebra;
pub mod bounds;
pub mod chart;
pub mod cli;
pub mod dim4;
pub mod error;
pub mod model_spaces;
pub mod report;
pub mod sampling;
pub mod suite;
pub mod tol;

pub use algebra::{
    AlgebraicOperator2Forms, CovDerivCurvature, CurvatureDecomposition, CurvatureTensor,
    Dimension, PureCurvatureMatrix, SymmetricForm2, ThreeTwoTensor, TwoFormIndexing,
    TwoFormOneForm,
};
pub use error::{Error, Result};
