//! Operators on two-forms and the curvature algebra built on them.

pub mod cubic;
pub mod decomposition;
pub mod derivative;
pub mod forms;
pub mod indexing;
pub mod json;
pub mod operator;
pub mod products;

pub use cubic::{pure_cubics, u_contraction, weyl_sectional_split, PureCubics, PureCurvatureMatrix, UContraction};
pub use decomposition::{decompose, weyl_part, CurvatureDecomposition, DecompositionResiduals};
pub use derivative::{
    circ_prime, divergence, kn_derivative, p_tensor, q_tensor, second_bianchi, weyl_divergence_from_pq,
    CovDerivCurvature, ThreeTwoTensor, TwoFormOneForm,
};
pub use forms::SymmetricForm2;
pub use indexing::{Dimension, TwoFormIndexing};
pub use operator::{bianchi_project, inner, kulkarni_nomizu, ricci_contraction, AlgebraicOperator2Forms, CurvatureTensor};
pub use products::{dot_product, quadratic_forms, sharp, sharp_product, square, square_plus_sharp, tri, QuadraticForms};
