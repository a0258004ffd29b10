use serde::Serialize;

use super::forms::SymmetricForm2;
use super::operator::{kulkarni_nomizu, ricci_contraction, CurvatureTensor};
use crate::error::Result;

/// Orthogonal splitting `R = W + (E∘g)/(n−2) + S g∘g/(2n(n−1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureDecomposition {
    pub weyl: CurvatureTensor,
    pub e_part: CurvatureTensor,
    pub s_part: CurvatureTensor,
    pub traceless_ricci: SymmetricForm2,
    pub scalar: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecompositionResiduals {
    pub reconstruction: f64,
    pub orthogonality: f64,
    pub weyl_trace: f64,
    pub e_trace: f64,
    pub u_norm: f64,
    pub v_norm: f64,
    pub pythagoras: f64,
}

pub fn decompose(r: &CurvatureTensor) -> Result<CurvatureDecomposition> {
    let n = r.dim();
    n.require_at_least(4, "Weyl decomposition")?;
    let nf = n.get() as f64;
    let g = SymmetricForm2::identity(n);
    let rc = ricci_contraction(r);
    let s = rc.trace();
    let e = rc.traceless();
    let gg = kulkarni_nomizu(&g, &g)?;
    let s_part = gg.scale(s / (2.0 * nf * (nf - 1.0)));
    let e_part = kulkarni_nomizu(&e, &g)?.scale(1.0 / (nf - 2.0));
    let weyl = &(r as &CurvatureTensor - &s_part) - &e_part;
    Ok(CurvatureDecomposition {
        weyl,
        e_part,
        s_part,
        traceless_ricci: e,
        scalar: s,
    })
}

/// The Weyl part of `r`.
pub fn weyl_part(r: &CurvatureTensor) -> Result<CurvatureTensor> {
    Ok(decompose(r)?.weyl)
}

impl CurvatureDecomposition {
    /// Absolute deviations of every structural invariant from its exact value.
    pub fn residuals(&self, r: &CurvatureTensor) -> DecompositionResiduals {
        let n = r.dim().get() as f64;
        let sum = &(&self.weyl + &self.e_part) + &self.s_part;
        let rec = (sum.matrix() - r.matrix()).amax();
        let w = self.weyl.as_operator();
        let e = self.e_part.as_operator();
        let s = self.s_part.as_operator();
        let orth = w
            .inner(e)
            .unwrap()
            .abs()
            .max(w.inner(s).unwrap().abs())
            .max(e.inner(s).unwrap().abs());
        let rcw = ricci_contraction(w);
        let u = (s.norm_sq() - self.scalar.powi(2) / (2.0 * n * (n - 1.0))).abs();
        let v = (e.norm_sq() - self.traceless_ricci.norm_sq() / (n - 2.0)).abs();
        let pyth = (r.norm_sq() - w.norm_sq() - s.norm_sq() - e.norm_sq()).abs();
        DecompositionResiduals {
            reconstruction: rec,
            orthogonality: orth,
            weyl_trace: rcw.norm(),
            e_trace: self.traceless_ricci.trace().abs(),
            u_norm: u,
            v_norm: v,
            pythagoras: pyth,
        }
    }

    pub fn ricci(&self) -> SymmetricForm2 {
        let n = self.traceless_ricci.dim();
        self.traceless_ricci
            .add(&SymmetricForm2::identity(n).scale(self.scalar / n.get() as f64))
            .expect("same dimension")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Dimension;

    #[test]
    fn sphere_has_no_weyl() {
        let r = CurvatureTensor::identity(Dimension::new(4).unwrap());
        let d = decompose(&r).unwrap();
        assert!(d.weyl.norm() < 1e-14);
        assert!(d.traceless_ricci.norm() < 1e-14);
        assert!((d.scalar - 12.0).abs() < 1e-14);
    }

    #[test]
    fn dimension_three_rejected() {
        let r = CurvatureTensor::identity(Dimension::new(3).unwrap());
        assert!(decompose(&r).is_err());
    }
}
