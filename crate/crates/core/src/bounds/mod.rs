//! Scalar curvature bounds, rigidity constants and pinching verdicts.

pub mod constants;
pub mod spectral;
pub mod verdict;
pub mod wcubic;

pub use constants::{constants, c_n, s_n, ConstantsTable, IntegralRigidity};
pub use spectral::{
    berger_component_bound, cubic_bound_eval, eigen_estimate, spectral_extremes, BergerBound, CubicBounds,
    SpectralExtremes,
};
pub use verdict::{
    gap_verdict_integral, pinch_verdict_dim4, pinch_verdict_norm, pinch_verdict_norm_scalar, pinch_verdict_pointwise,
    pinch_verdict_pointwise_scalar,
    pinch_verdict_pointwise_with, OmegaChoice, PinchKind, PinchVerdict,
};
pub use wcubic::{wcubic_closed_form, wcubic_oracle, WcubicOracle};
