use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::algebra::{ricci_contraction, square, square_plus_sharp, CurvatureTensor, SymmetricForm2};
use crate::error::{ensure_same, Error, Result};
use crate::tol;

use super::constants::c_n;

fn require_weyl(w: &CurvatureTensor, what: &'static str) -> Result<()> {
    let scale = w.norm().max(1.0);
    let rc = ricci_contraction(w).norm();
    if rc > tol::ALG * scale {
        return Err(Error::Invariant(format!("{what}: W is not trace-free (|rc| = {rc:.3e})")));
    }
    let b = w.bianchi_residual();
    if b > tol::ALG * scale {
        return Err(Error::Invariant(format!("{what}: W fails the first Bianchi identity ({b:.3e})")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralExtremes {
    /// Largest eigenvalue magnitude of `W` on Λ².
    pub omega_mag: f64,
    /// Largest eigenvalue of `W`.
    pub omega_max: f64,
    /// Minus the smallest eigenvalue of `E`.
    pub ell: f64,
}

pub fn spectral_extremes(w: &CurvatureTensor, e: &SymmetricForm2) -> Result<SpectralExtremes> {
    ensure_same(w.dim().get(), e.dim().get())?;
    require_weyl(w, "spectral_extremes")?;
    if e.trace().abs() > tol::ALG * e.norm().max(1.0) {
        return Err(Error::Invariant("spectral_extremes: E must be traceless".into()));
    }
    let ev = w.eigenvalues();
    let ee = e.eigenvalues();
    Ok(SpectralExtremes {
        omega_mag: ev.iter().fold(0.0_f64, |a, x| a.max(x.abs())),
        omega_max: *ev.last().expect("nonempty"),
        ell: -ee[0],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BergerBound {
    pub max_component: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `max |W_ijkl|` against `(4/3) ω`.
pub fn berger_component_bound(w: &CurvatureTensor) -> Result<BergerBound> {
    require_weyl(w, "berger_component_bound")?;
    let max_component = w.matrix().amax();
    let bound = 4.0 / 3.0 * w.spectral_radius();
    Ok(BergerBound {
        max_component,
        bound,
        holds: max_component <= bound + tol::ALG * bound.max(1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicBounds {
    /// `⟨W, W²+W♯⟩`.
    pub lhs: f64,
    /// `(2(n−1)/3) ω |W|²` with `ω` the largest eigenvalue magnitude.
    pub eig_bound: f64,
    /// `c(n) |W|³`.
    pub norm_bound: f64,
    /// `n = 5` only: `3⟨W, W²⟩`, which equals `lhs`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub five_cubic: Option<f64>,
    /// `n = 5` only: `(8/3) λ_max |W|²`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub five_largest_bound: Option<f64>,
    pub holds: bool,
}

pub fn cubic_bound_eval(w: &CurvatureTensor) -> Result<CubicBounds> {
    let n = w.dim();
    n.require_at_least(5, "cubic_bound_eval (use the dim4 determinant path for n = 4)")?;
    require_weyl(w, "cubic_bound_eval")?;
    let nf = n.get() as f64;
    let lhs = w.inner(&square_plus_sharp(w))?;
    let nsq = w.norm_sq();
    let ev = w.eigenvalues();
    let omega = ev.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let eig_bound = 2.0 * (nf - 1.0) / 3.0 * omega * nsq;
    let norm_bound = c_n(n.get())? * nsq.sqrt().powi(3);
    let (five_cubic, five_largest_bound) = if n.get() == 5 {
        let lmax = *ev.last().expect("nonempty");
        (Some(3.0 * w.inner(&square(w))?), Some(8.0 / 3.0 * lmax * nsq))
    } else {
        (None, None)
    };
    let slack = |b: f64| b + tol::ALG * b.abs().max(lhs.abs()).max(1.0);
    let mut holds = lhs <= slack(eig_bound) && lhs <= slack(norm_bound);
    if let Some(b) = five_largest_bound {
        holds &= lhs <= slack(b);
    }
    Ok(CubicBounds {
        lhs,
        eig_bound,
        norm_bound,
        five_cubic,
        five_largest_bound,
        holds,
    })
}

/// For a symmetric trace-free `m×m` matrix: `(max λ², ((m−1)/m)|T|²)`.
pub fn eigen_estimate(t: &DMatrix<f64>) -> Result<(f64, f64)> {
    if !t.is_square() || t.nrows() < 2 {
        return Err(Error::InvalidInput("need a square matrix of size >= 2".into()));
    }
    let scale = t.amax().max(1.0);
    if (t - t.transpose()).amax() > tol::ALG * scale || t.trace().abs() > tol::ALG * scale * t.nrows() as f64 {
        return Err(Error::Invariant("eigen_estimate needs a symmetric trace-free matrix".into()));
    }
    let m = t.nrows() as f64;
    let ev = SymmetricEigen::new(t.clone()).eigenvalues;
    let max_sq = ev.iter().fold(0.0_f64, |a, x| a.max(x * x));
    Ok((max_sq, (m - 1.0) / m * t.norm_squared()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Dimension;

    #[test]
    fn zero_weyl() {
        let d = Dimension::new(5).unwrap();
        let w = CurvatureTensor::zeros(d);
        let e = SymmetricForm2::zeros(d);
        let s = spectral_extremes(&w, &e).unwrap();
        assert_eq!((s.omega_mag, s.omega_max, s.ell), (0.0, 0.0, 0.0));
        let b = berger_component_bound(&w).unwrap();
        assert_eq!((b.max_component, b.bound), (0.0, 0.0));
        let c = cubic_bound_eval(&w).unwrap();
        assert_eq!((c.lhs, c.eig_bound, c.norm_bound), (0.0, 0.0, 0.0));
    }

    #[test]
    fn dimension_four_routed_elsewhere() {
        let w = CurvatureTensor::zeros(Dimension::new(4).unwrap());
        assert!(cubic_bound_eval(&w).is_err());
    }

    #[test]
    fn eigen_estimate_equality_family() {
        for m in 2..11 {
            let t = 0.3;
            let mut d = vec![t; m];
            d[m - 1] = -(m as f64 - 1.0) * t;
            let (l, b) = eigen_estimate(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))).unwrap();
            assert!((l - b).abs() < 1e-12 * b.max(1.0));
        }
    }
}
