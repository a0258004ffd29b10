//! Cubic Weyl invariants: the u-tensor contraction, pure curvature and
//! sectional splittings.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::indexing::{Dimension, TwoFormIndexing};
use super::operator::{ricci_contraction, AlgebraicOperator2Forms, CurvatureTensor};
use super::products::sectional_sum;
use crate::error::{Error, Result};
use crate::tol;

fn require_traceless(w: &AlgebraicOperator2Forms, what: &'static str) -> Result<()> {
    let rc = ricci_contraction(w).norm();
    if rc > tol::ALG * w.norm().max(1.0) {
        return Err(Error::Invariant(format!("{what}: input is not trace-free (|rc| = {rc:.3e})")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UContraction {
    /// `Σ_{mnpq} Σ_{ij} (u_ij^{(mnpq)})²`.
    pub u_norm_sq: f64,
    /// `(1/8) Σ_{mnpq} Σ_{ijkl} W_ijkl u_ij^{(mnpq)} u_kl^{(mnpq)}`.
    pub contracted: f64,
}

/// Evaluates the skew tensors `u^{(mnpq)}` for every `(m,n,p,q)` and contracts them.
pub fn u_contraction(w: &CurvatureTensor) -> Result<UContraction> {
    let dim = w.dim();
    dim.require_at_least(4, "u_contraction")?;
    require_traceless(w, "u_contraction")?;
    let n = dim.get();
    let idx = TwoFormIndexing::new(dim);
    let mw = w.matrix();
    let full = w.to_full();
    let at = |i: usize, j: usize, k: usize, l: usize| full[((i * n + j) * n + k) * n + l];
    let mut norm_sq = 0.0;
    let mut quad = 0.0;
    let mut u = DVector::zeros(idx.len());
    for m in 0..n {
        for nn in 0..n {
            for p in 0..n {
                for q in 0..n {
                    for (c, &(i, j)) in idx.pairs().iter().enumerate() {
                        let half = |i: usize, j: usize| {
                            let mut v = 0.0;
                            if j == m {
                                v += at(i, nn, p, q);
                            }
                            if j == nn {
                                v += at(m, i, p, q);
                            }
                            if j == p {
                                v += at(m, nn, i, q);
                            }
                            if j == q {
                                v += at(m, nn, p, i);
                            }
                            v
                        };
                        u[c] = half(i, j) - half(j, i);
                    }
                    // full (i,j) sums are twice / four times the pair sums
                    norm_sq += 2.0 * u.norm_squared();
                    quad += 4.0 * u.dot(&(mw * &u));
                }
            }
        }
    }
    Ok(UContraction {
        u_norm_sq: norm_sq,
        contracted: quad / 8.0,
    })
}

/// Symmetric `n×n` matrix `w_ij = W_ijij` of a pure Weyl tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct PureCurvatureMatrix {
    n: Dimension,
    w: DMatrix<f64>,
}

impl PureCurvatureMatrix {
    /// Validates symmetry, zero diagonal and zero row sums.
    pub fn new(w: DMatrix<f64>) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::InvalidInput("pure curvature matrix must be square".into()));
        }
        let n = Dimension::new(w.nrows())?;
        let scale = w.amax().max(1.0) * tol::ALG;
        for i in 0..n.get() {
            if w[(i, i)].abs() > scale {
                return Err(Error::Invariant(format!("nonzero diagonal entry at {}", i + 1)));
            }
            for j in 0..n.get() {
                if (w[(i, j)] - w[(j, i)]).abs() > scale {
                    return Err(Error::Invariant("pure curvature matrix not symmetric".into()));
                }
            }
            let row: f64 = w.row(i).sum();
            if row.abs() > scale * n.get() as f64 {
                return Err(Error::Invariant(format!("row {} sums to {row:.3e}", i + 1)));
            }
        }
        Ok(PureCurvatureMatrix { n, w })
    }

    /// Reads `w_ij = W_ijij`; fails unless the tensor is diagonal on `e_i∧e_j`.
    pub fn from_curvature(w: &CurvatureTensor) -> Result<Self> {
        let m = w.matrix();
        let off = (m - DMatrix::from_diagonal(&m.diagonal())).amax();
        if off > tol::ALG * m.amax().max(1.0) {
            return Err(Error::Invariant(format!(
                "tensor is not pure in this frame (off-diagonal {off:.3e})"
            )));
        }
        let n = w.dim().get();
        Self::new(DMatrix::from_fn(n, n, |i, j| w.get(i, j, i, j)))
    }

    pub fn dim(&self) -> Dimension {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// The diagonal pair-basis operator with entries `w_ij`.
    pub fn to_operator(&self) -> AlgebraicOperator2Forms {
        let idx = TwoFormIndexing::new(self.n);
        let diag = DVector::from_iterator(idx.len(), idx.pairs().iter().map(|&(i, j)| self.w[(i, j)]));
        AlgebraicOperator2Forms::from_matrix_unchecked(self.n, DMatrix::from_diagonal(&diag))
            .expect("square of the right size")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PureCubics {
    /// `⟨W, W♯⟩ = (1/2) Σ_ijk w_ij w_ik w_kj`.
    pub sharp_cubic: f64,
    /// `⟨W, W²⟩ = Σ_{i<j} w_ij³`.
    pub square_cubic: f64,
    /// `(1/2) Σ_{i<j<k} (w_ij + w_jk + w_ik)³`.
    pub three_plane_sum: f64,
}

impl PureCubics {
    /// `sharp_cubic − ((8−n)/2) square_cubic − three_plane_sum`.
    pub fn identity_residual(&self, n: usize) -> f64 {
        self.sharp_cubic - (8.0 - n as f64) / 2.0 * self.square_cubic - self.three_plane_sum
    }
}

pub fn pure_cubics(w: &PureCurvatureMatrix) -> PureCubics {
    let n = w.n.get();
    let m = &w.w;
    let sharp_cubic = 0.5 * (m * m * m).trace();
    let mut square_cubic = 0.0;
    let mut three = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            square_cubic += m[(i, j)].powi(3);
            for k in j + 1..n {
                three += (m[(i, j)] + m[(j, k)] + m[(i, k)]).powi(3);
            }
        }
    }
    PureCubics {
        sharp_cubic,
        square_cubic,
        three_plane_sum: 0.5 * three,
    }
}

/// Sectional sums `Σ_{i<j ∈ N₁} W_ijij` and the same over the complement.
pub fn weyl_sectional_split(w: &CurvatureTensor, subset: &[usize]) -> Result<(f64, f64)> {
    let dim = w.dim();
    require_traceless(w, "weyl_sectional_split")?;
    let n = dim.get();
    let mut mask = vec![false; n];
    for &i in subset {
        if i >= n {
            return Err(Error::InvalidInput(format!("index {i} out of range for n = {n}")));
        }
        if mask[i] {
            return Err(Error::InvalidInput(format!("index {i} repeated")));
        }
        mask[i] = true;
    }
    if subset.is_empty() || subset.len() == n {
        return Err(Error::InvalidInput("subset must be proper and nonempty".into()));
    }
    let idx = TwoFormIndexing::new(dim);
    let w1 = sectional_sum(w, &idx, |i, j| mask[i] && mask[j]);
    let w2 = sectional_sum(w, &idx, |i, j| !mask[i] && !mask[j]);
    Ok((w1, w2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_inputs() {
        let d = Dimension::new(5).unwrap();
        let u = u_contraction(&CurvatureTensor::zeros(d)).unwrap();
        assert_eq!((u.u_norm_sq, u.contracted), (0.0, 0.0));
        let p = pure_cubics(&PureCurvatureMatrix::new(DMatrix::zeros(5, 5)).unwrap());
        assert_eq!(p.sharp_cubic, 0.0);
        assert_eq!(weyl_sectional_split(&CurvatureTensor::zeros(d), &[0, 2]).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn pure_matrix_validation() {
        let mut w = DMatrix::zeros(4, 4);
        w[(0, 1)] = 1.0;
        w[(1, 0)] = 1.0;
        assert!(PureCurvatureMatrix::new(w).is_err());
    }

    #[test]
    fn split_rejects_bad_subsets() {
        let w = CurvatureTensor::zeros(Dimension::new(4).unwrap());
        assert!(weyl_sectional_split(&w, &[]).is_err());
        assert!(weyl_sectional_split(&w, &[0, 1, 2, 3]).is_err());
        assert!(weyl_sectional_split(&w, &[0, 0]).is_err());
    }

    #[test]
    fn traced_input_rejected() {
        let r = CurvatureTensor::identity(Dimension::new(4).unwrap());
        assert!(u_contraction(&r).is_err());
    }
}
