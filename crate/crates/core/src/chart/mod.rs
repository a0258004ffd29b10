//! Finite-difference curvature on a coordinate chart.
//!
//! Christoffel symbols come from central differences of `g`, curvature from
//! the coordinate formula (with the `R(X,Y,Z,W) = −⟨∇²_{X,Y}Z − ∇²_{Y,X}Z, W⟩`
//! sign, so round spheres have positive `R_ijij`), and `∇R` from differencing
//! `R` plus Christoffel corrections. Everything is reported in the Gram–Schmidt
//! orthonormal frame at the center.

mod field;
mod metric;

pub use field::{
    bochner_residual, curvature_field, identity_residual_report, ricci_identity_residual,
    weyl_derivative_pack, ChartCurvatureField, GridSpec, IdentityResiduals, RicciIdentityResidual,
    WeylDerivativePack, DEFAULT_H, DEFAULT_OUTER_FACTOR,
};
pub use metric::{ChartMetric, GridFile, Recorder};

use serde::Serialize;

use crate::error::Result;
use crate::model_spaces::{model_curvature, ModelSpec};

/// The model-space package a preset is a chart of, if any.
pub fn model_counterpart(metric: &ChartMetric) -> Option<ModelSpec> {
    let parts: Vec<&str> = metric.tag().split(':').collect();
    let spec = match parts.as_slice() {
        ["euclidean", n] => format!("euclidean:{n}"),
        ["sphere-stereo", n] => format!("sphere:{n}:1"),
        ["hyperbolic-ball", n] => format!("hyperbolic:{n}:1"),
        ["product-spheres", p, q, r1, r2] => format!("product:sphere:{p}:{r1},sphere:{q}:{r2}"),
        _ => return None,
    };
    spec.parse().ok()
}

/// Frame-independent comparison of a chart field with its model package.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModelComparison {
    pub scalar_diff: f64,
    /// Max deviation of the sorted Weyl spectra on two-forms.
    pub weyl_spectrum_diff: f64,
    /// Max deviation of the sorted Ricci spectra.
    pub ricci_spectrum_diff: f64,
}

pub fn compare_with_model(field: &ChartCurvatureField, spec: &ModelSpec) -> Result<ModelComparison> {
    let pkg = model_curvature(spec)?;
    crate::error::ensure_same(field.dim().get(), pkg.dim().get())?;
    let diff = |a: Vec<f64>, b: Vec<f64>| {
        let mut a = a;
        let mut b = b;
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    Ok(ModelComparison {
        scalar_diff: (field.scalar - pkg.s).abs(),
        weyl_spectrum_diff: diff(field.weyl().eigenvalues(), pkg.weyl()?.eigenvalues()),
        ricci_spectrum_diff: diff(field.ricci.eigenvalues(), pkg.rc.eigenvalues()),
    })
}
