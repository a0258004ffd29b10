use serde::Serialize;

use crate::algebra::{CurvatureTensor, SymmetricForm2};
use crate::error::{Error, Result};
use crate::tol;

use super::constants::{c_n, constants, s_n};
use super::spectral::spectral_extremes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PinchKind {
    Pointwise,
    Norm,
    Dim4Selfdual,
    Integral,
    Case5,
}

/// Outcome of evaluating a rigidity hypothesis `condition ≤ threshold`.
///
/// Comparisons allow a relative slack of `tolerance` so that exact borderline
/// configurations are not decided by rounding; the integral gap is strict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinchVerdict {
    pub which: PinchKind,
    pub condition_value: f64,
    pub threshold: f64,
    pub satisfied: bool,
    pub strict: bool,
    pub tolerance: f64,
}

impl PinchVerdict {
    fn new(which: PinchKind, condition_value: f64, threshold: f64, strict: bool) -> Self {
        let tolerance = tol::ALG;
        let slack = tolerance * 1f64.max(condition_value.abs()).max(threshold.abs());
        let satisfied = if strict {
            condition_value < threshold - slack
        } else {
            condition_value <= threshold + slack
        };
        PinchVerdict {
            which,
            condition_value,
            threshold,
            satisfied,
            strict,
            tolerance,
        }
    }

    pub fn margin(&self) -> f64 {
        self.threshold - self.condition_value
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaChoice {
    /// Largest eigenvalue magnitude.
    Magnitude,
    /// Largest (signed) eigenvalue; admissible in dimension five only.
    Largest,
}

fn finite(xs: &[f64]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("non-finite verdict input".into()))
    }
}

/// `(2(n−1)/3) ω + ℓ ≤ S/n`; `ω` is the signed largest eigenvalue for `n = 5`.
pub fn pinch_verdict_pointwise(w: &CurvatureTensor, e: &SymmetricForm2, s: f64) -> Result<PinchVerdict> {
    let choice = if w.dim().get() == 5 {
        OmegaChoice::Largest
    } else {
        OmegaChoice::Magnitude
    };
    pinch_verdict_pointwise_with(w, e, s, choice)
}

pub fn pinch_verdict_pointwise_with(
    w: &CurvatureTensor,
    e: &SymmetricForm2,
    s: f64,
    omega: OmegaChoice,
) -> Result<PinchVerdict> {
    let n = w.dim();
    n.require_at_least(5, "pinch_verdict_pointwise")?;
    finite(&[s])?;
    if omega == OmegaChoice::Largest && n.get() != 5 {
        return Err(Error::NotApplicable("the largest-eigenvalue form is stated for n = 5 only".into()));
    }
    let ext = spectral_extremes(w, e)?;
    let om = match omega {
        OmegaChoice::Magnitude => ext.omega_mag,
        OmegaChoice::Largest => ext.omega_max,
    };
    let nf = n.get() as f64;
    Ok(PinchVerdict::new(
        PinchKind::Pointwise,
        2.0 * (nf - 1.0) / 3.0 * om + ext.ell,
        s / nf,
        false,
    ))
}

/// `c(n)|W| + √((n−1)/n)|E| ≤ S/n`.
pub fn pinch_verdict_norm(w: &CurvatureTensor, e: &SymmetricForm2, s: f64) -> Result<PinchVerdict> {
    let n = w.dim().get();
    w.dim().require_at_least(5, "pinch_verdict_norm")?;
    // validates the Weyl and traceless inputs
    spectral_extremes(w, e)?;
    pinch_verdict_norm_scalar(n, w.norm(), e.norm(), s)
}

pub fn pinch_verdict_norm_scalar(n: usize, norm_w: f64, norm_e: f64, s: f64) -> Result<PinchVerdict> {
    finite(&[norm_w, norm_e, s])?;
    let nf = n as f64;
    let c = c_n(n)?;
    Ok(PinchVerdict::new(
        PinchKind::Norm,
        c * norm_w + ((nf - 1.0) / nf).sqrt() * norm_e,
        s / nf,
        false,
    ))
}

/// Scalar form of the pointwise verdict.
pub fn pinch_verdict_pointwise_scalar(n: usize, omega: f64, ell: f64, s: f64) -> Result<PinchVerdict> {
    finite(&[omega, ell, s])?;
    if n < 5 {
        return Err(Error::DimensionTooSmall {
            found: n,
            required: 5,
            context: "pinch_verdict_pointwise",
        });
    }
    let nf = n as f64;
    Ok(PinchVerdict::new(PinchKind::Pointwise, 2.0 * (nf - 1.0) / 3.0 * omega + ell, s / nf, false))
}

/// `6ω ≤ S` in dimension four.
pub fn pinch_verdict_dim4(omega: f64, s: f64) -> Result<PinchVerdict> {
    finite(&[omega, s])?;
    Ok(PinchVerdict::new(PinchKind::Dim4Selfdual, 6.0 * omega, s, false))
}

/// The integral gap: `a₁‖W‖ + a₂‖E‖ < s_n λ` (`n ≥ 6`) or
/// `(8/√10)‖W‖ + (2/√5)‖E‖ < (3/16) λ` (`n = 5`). Satisfied means the gap
/// theorem forces local conformal flatness.
pub fn gap_verdict_integral(norm_w: f64, norm_e: f64, lambda: f64, n: usize) -> Result<PinchVerdict> {
    finite(&[norm_w, norm_e, lambda])?;
    if n < 5 {
        return Err(Error::DimensionTooSmall {
            found: n,
            required: 5,
            context: "gap_verdict_integral",
        });
    }
    if lambda <= 0.0 {
        return Err(Error::InvalidInput("the Yamabe invariant must be positive".into()));
    }
    if norm_w < 0.0 || norm_e < 0.0 {
        return Err(Error::InvalidInput("norms must be non-negative".into()));
    }
    let t = constants(n)?;
    let (a1, a2) = (t.a1.expect("n >= 5"), t.a2.expect("n >= 5"));
    let (which, coeff) = if n == 5 {
        (PinchKind::Case5, 3.0 / 16.0)
    } else {
        (PinchKind::Integral, s_n(n))
    };
    Ok(PinchVerdict::new(which, a1 * norm_w + a2 * norm_e, coeff * lambda, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim4_examples() {
        assert!(pinch_verdict_dim4(0.0, 0.0).unwrap().satisfied);
        assert!(!pinch_verdict_dim4(1.0, 5.0).unwrap().satisfied);
        assert!(pinch_verdict_dim4(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn integral_rejects_bad_lambda() {
        assert!(gap_verdict_integral(0.0, 0.0, 0.0, 6).is_err());
        assert!(gap_verdict_integral(0.0, 0.0, -1.0, 6).is_err());
        assert!(gap_verdict_integral(0.0, 0.0, 1.0, 4).is_err());
    }

    #[test]
    fn integral_is_strict() {
        let v = gap_verdict_integral(0.0, 0.0, 1.0, 7).unwrap();
        assert!(v.satisfied);
        let a1 = constants(6).unwrap().a1.unwrap();
        let border = gap_verdict_integral(s_n(6) / a1, 0.0, 1.0, 6).unwrap();
        assert!(!border.satisfied && border.margin().abs() < 1e-15);
    }
}
