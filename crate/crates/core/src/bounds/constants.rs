use serde::Serialize;

use crate::error::{Error, Result};

/// `s_n = (n−2)/(4(n−1))`.
pub fn s_n(n: usize) -> f64 {
    let n = n as f64;
    (n - 2.0) / (4.0 * (n - 1.0))
}

/// Norm constant of the cubic Weyl bound: `8/√10` for `n = 5`, `5` for `n ≥ 6`.
pub fn c_n(n: usize) -> Result<f64> {
    match n {
        0..=4 => Err(Error::DimensionTooSmall {
            found: n,
            required: 5,
            context: "c(n)",
        }),
        5 => Ok(8.0 / 10f64.sqrt()),
        _ => Ok(5.0),
    }
}

/// Coefficients of `8(n−1)²α² − 2n(n−1)(n−2)α + n(n−2)(n−3)`.
pub fn alpha_quadratic(n: usize) -> (f64, f64, f64) {
    let n = n as f64;
    (
        8.0 * (n - 1.0).powi(2),
        -2.0 * n * (n - 1.0) * (n - 2.0),
        n * (n - 2.0) * (n - 3.0),
    )
}

pub fn alpha_residual(n: usize, alpha: f64) -> f64 {
    let (a, b, c) = alpha_quadratic(n);
    // relative to the size of the terms
    (a * alpha * alpha + b * alpha + c) / (a * alpha * alpha).abs().max(c.abs()).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsVariant {
    /// `n ≥ 6`: `α` is the larger root, `a₁`, `a₂` from the integral theorem.
    Integral,
    /// `n = 5`: `α = 1/2` and the fixed constants `8/√10`, `2/√5`, `3/16`.
    Case5,
    /// `n = 4`: the double root is reported only.
    ReportOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsTable {
    pub n: usize,
    pub s_n: f64,
    pub variant: ConstantsVariant,
    /// Larger real root of the α-quadratic (or `1/2` for `n = 5`).
    pub alpha: Option<f64>,
    pub alpha_residual: Option<f64>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub c_n: Option<f64>,
    /// Right-hand coefficient of the integral gap: `s_n` for `n ≥ 6`, `3/16` for `n = 5`.
    pub gap_coefficient: Option<f64>,
    pub discriminant: f64,
}

pub fn constants(n: usize) -> Result<ConstantsTable> {
    if n < 4 {
        return Err(Error::DimensionTooSmall {
            found: n,
            required: 4,
            context: "constants",
        });
    }
    let (a, b, c) = alpha_quadratic(n);
    let disc = b * b - 4.0 * a * c;
    let nf = n as f64;
    let mut t = ConstantsTable {
        n,
        s_n: s_n(n),
        variant: ConstantsVariant::ReportOnly,
        alpha: None,
        alpha_residual: None,
        a1: None,
        a2: None,
        c_n: c_n(n).ok(),
        gap_coefficient: None,
        discriminant: disc,
    };
    match n {
        4 => {
            // double root: disc vanishes identically
            let alpha = -b / (2.0 * a);
            t.alpha = Some(alpha);
            t.alpha_residual = Some(alpha_residual(n, alpha));
        }
        5 => {
            t.variant = ConstantsVariant::Case5;
            t.alpha = Some(0.5);
            t.a1 = Some(8.0 / 10f64.sqrt());
            t.a2 = Some(2.0 / 5f64.sqrt());
            t.gap_coefficient = Some(3.0 / 16.0);
        }
        _ => {
            // 4n(n−1)²(n−2)(n−4)(n−6) ≥ 0; clamp rounding at the n = 6 double root
            let disc_exact = 4.0 * nf * (nf - 1.0).powi(2) * (nf - 2.0) * (nf - 4.0) * (nf - 6.0);
            let alpha = (-b + disc_exact.max(0.0).sqrt()) / (2.0 * a);
            let denom = 2.0 * (nf - 1.0) * alpha - nf + 3.0;
            t.variant = ConstantsVariant::Integral;
            t.alpha = Some(alpha);
            t.alpha_residual = Some(alpha_residual(n, alpha));
            t.a1 = Some(10.0 * (nf - 1.0) * alpha * alpha / denom);
            t.a2 = Some(2.0 * (nf - 1.0) * alpha * alpha / denom * ((nf - 1.0) / nf).sqrt());
            t.gap_coefficient = Some(s_n(n));
        }
    }
    Ok(t)
}

/// The integral rigidity step with a user-chosen `d(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralRigidity {
    pub c1: f64,
    pub c2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub hypothesis_holds: bool,
    /// `d` for which the hypothesis is an equality: `(c₁‖W‖ + c₂‖E‖)/λ`.
    pub consistent_d: f64,
    /// Coefficient `1 − d/s_n` of `∫|∇W|²`.
    pub gradient_coefficient: f64,
    /// Coefficient `d − 2/n` of `∫S|W|²`.
    pub scalar_coefficient: f64,
}

impl IntegralRigidity {
    pub fn evaluate(n: usize, norm_w: f64, norm_e: f64, lambda: f64, d: f64) -> Result<Self> {
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidInput("the Yamabe invariant must be positive".into()));
        }
        if norm_w < 0.0 || norm_e < 0.0 {
            return Err(Error::InvalidInput("norms must be non-negative".into()));
        }
        let nf = n as f64;
        let c1 = 2.0 * c_n(n)?;
        let c2 = 2.0 * ((nf - 1.0) / nf).sqrt();
        let lhs = c1 * norm_w + c2 * norm_e;
        let rhs = d * lambda;
        Ok(IntegralRigidity {
            c1,
            c2,
            lhs,
            rhs,
            hypothesis_holds: lhs <= rhs,
            consistent_d: lhs / lambda,
            gradient_coefficient: 1.0 - d / s_n(n),
            scalar_coefficient: d - 2.0 / nf,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminant_matches_factorization() {
        for n in 4..40 {
            let nf = n as f64;
            let t = constants(n).unwrap();
            let f = 4.0 * nf * (nf - 1.0).powi(2) * (nf - 2.0) * (nf - 4.0) * (nf - 6.0);
            assert!((t.discriminant - f).abs() <= 1e-9 * f.abs().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn small_dimensions() {
        assert!(constants(3).is_err());
        let t4 = constants(4).unwrap();
        assert!((t4.alpha.unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(t4.a1.is_none());
        assert_eq!(constants(5).unwrap().variant, ConstantsVariant::Case5);
    }
}
