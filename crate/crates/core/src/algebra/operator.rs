use std::ops::{Add, Deref, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};

use super::forms::SymmetricForm2;
use super::indexing::{signed_pair, Dimension, TwoFormIndexing};
use crate::error::{ensure_same, Error, Result};
use crate::tol;

/// Operator on Λ² stored in the lexicographic pair basis:
/// `matrix[(ij),(kl)] = T_ijkl` for `i<j`, `k<l`.
///
/// Elements of S²(Λ²) are symmetric; dot products of two operators need not be,
/// so symmetry is validated at the public constructors only.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicOperator2Forms {
    n: Dimension,
    m: DMatrix<f64>,
}

impl AlgebraicOperator2Forms {
    pub fn zeros(n: Dimension) -> Self {
        let k = n.pairs();
        AlgebraicOperator2Forms {
            n,
            m: DMatrix::zeros(k, k),
        }
    }

    /// Identity on Λ², which equals `(1/2) g∘g`.
    pub fn identity(n: Dimension) -> Self {
        let k = n.pairs();
        AlgebraicOperator2Forms {
            n,
            m: DMatrix::identity(k, k),
        }
    }

    /// Validating constructor: requires a symmetric `N×N` matrix.
    pub fn from_matrix(n: Dimension, m: DMatrix<f64>) -> Result<Self> {
        let op = Self::from_matrix_unchecked(n, m)?;
        let asym = op.asymmetry();
        if asym > tol::ALG * op.m.amax().max(1.0) {
            return Err(Error::Invariant(format!(
                "operator not self-adjoint (max |T_ijkl - T_klij| = {asym:.3e})"
            )));
        }
        Ok(op)
    }

    /// Shape-checked but not symmetry-checked; used for product outputs.
    pub fn from_matrix_unchecked(n: Dimension, m: DMatrix<f64>) -> Result<Self> {
        let k = n.pairs();
        if m.nrows() != k || m.ncols() != k {
            return Err(Error::InvalidInput(format!(
                "expected {k}x{k} pair-basis matrix for n = {n}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(AlgebraicOperator2Forms { n, m })
    }

    /// Builds the operator from a four-index evaluator, sampled on `i<j`, `k<l`.
    pub fn from_four_index(n: Dimension, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let idx = TwoFormIndexing::new(n);
        let k = idx.len();
        let mut m = DMatrix::zeros(k, k);
        for (a, &(i, j)) in idx.pairs().iter().enumerate() {
            for (b, &(p, q)) in idx.pairs().iter().enumerate() {
                m[(a, b)] = f(i, j, p, q);
            }
        }
        AlgebraicOperator2Forms { n, m }
    }

    #[inline]
    pub fn dim(&self) -> Dimension {
        self.n
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// Four-index component `T_ijkl`, zero-based, with antisymmetry reconstructed.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n.get();
        match (signed_pair(n, i, j), signed_pair(n, k, l)) {
            (Some((a, s)), Some((b, t))) => s * t * self.m[(a, b)],
            _ => 0.0,
        }
    }

    /// Dense `n⁴` array of components, row-major in `(i,j,k,l)`.
    pub fn to_full(&self) -> Vec<f64> {
        let n = self.n.get();
        let mut out = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        out[((i * n + j) * n + k) * n + l] = self.get(i, j, k, l);
                    }
                }
            }
        }
        out
    }

    /// Largest `|T_ijkl - T_klij|`.
    pub fn asymmetry(&self) -> f64 {
        (&self.m - self.m.transpose()).amax()
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.asymmetry() <= tol * self.m.amax().max(1.0)
    }

    /// `⟨T, S⟩ = (1/4) Σ_ijkl T_ijkl S_ijkl`, the Frobenius product of pair matrices.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        ensure_same(self.n.get(), other.n.get())?;
        Ok(self.m.dot(&other.m))
    }

    pub fn norm_sq(&self) -> f64 {
        self.m.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    pub fn scale(&self, c: f64) -> Self {
        AlgebraicOperator2Forms {
            n: self.n,
            m: &self.m * c,
        }
    }

    /// Ascending eigenvalues of the (symmetrized) operator.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let sym = (&self.m + self.m.transpose()) * 0.5;
        let mut v: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0_f64, |a, x| a.max(x.abs()))
    }

    /// Components in the frame `e'_i = Σ_a F_ai e_a` (`F` orthogonal).
    pub fn rotated(&self, f: &DMatrix<f64>) -> Result<Self> {
        ensure_same(self.n.get(), f.nrows())?;
        let l = lambda2(self.n, f);
        Ok(AlgebraicOperator2Forms {
            n: self.n,
            m: l.transpose() * &self.m * l,
        })
    }

    /// The first Bianchi map `b(T)_ijkl = (T_ijkl + T_jkil + T_kijl)/3`.
    pub fn bianchi_map(&self) -> Self {
        Self::from_four_index(self.n, |i, j, k, l| {
            (self.get(i, j, k, l) + self.get(j, k, i, l) + self.get(k, i, j, l)) / 3.0
        })
    }

    pub fn bianchi_residual(&self) -> f64 {
        self.bianchi_map().norm()
    }
}

/// Induced action of a frame change on Λ² in the pair basis.
pub(crate) fn lambda2(n: Dimension, f: &DMatrix<f64>) -> DMatrix<f64> {
    let idx = TwoFormIndexing::new(n);
    let k = idx.len();
    DMatrix::from_fn(k, k, |r, c| {
        let (a, b) = idx.pair(r);
        let (i, j) = idx.pair(c);
        f[(a, i)] * f[(b, j)] - f[(b, i)] * f[(a, j)]
    })
}

impl Add for &AlgebraicOperator2Forms {
    type Output = AlgebraicOperator2Forms;
    fn add(self, rhs: Self) -> AlgebraicOperator2Forms {
        assert_eq!(self.n, rhs.n, "dimension mismatch in operator sum");
        AlgebraicOperator2Forms {
            n: self.n,
            m: &self.m + &rhs.m,
        }
    }
}

impl Sub for &AlgebraicOperator2Forms {
    type Output = AlgebraicOperator2Forms;
    fn sub(self, rhs: Self) -> AlgebraicOperator2Forms {
        assert_eq!(self.n, rhs.n, "dimension mismatch in operator difference");
        AlgebraicOperator2Forms {
            n: self.n,
            m: &self.m - &rhs.m,
        }
    }
}

impl Mul<f64> for &AlgebraicOperator2Forms {
    type Output = AlgebraicOperator2Forms;
    fn mul(self, c: f64) -> AlgebraicOperator2Forms {
        self.scale(c)
    }
}

impl Neg for &AlgebraicOperator2Forms {
    type Output = AlgebraicOperator2Forms;
    fn neg(self) -> AlgebraicOperator2Forms {
        self.scale(-1.0)
    }
}

/// An algebraic curvature tensor: a self-adjoint operator on Λ² in the kernel of `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor(AlgebraicOperator2Forms);

impl CurvatureTensor {
    /// Checks self-adjointness and the first Bianchi identity to `tol::ALG`.
    pub fn new(op: AlgebraicOperator2Forms) -> Result<Self> {
        let scale = op.norm().max(1.0);
        if !op.is_self_adjoint(tol::ALG) {
            return Err(Error::Invariant("curvature tensor must be self-adjoint".into()));
        }
        let b = op.bianchi_residual();
        if b > tol::ALG * scale {
            return Err(Error::Invariant(format!(
                "first Bianchi identity fails: |b(R)| = {b:.3e}"
            )));
        }
        Ok(CurvatureTensor(op))
    }

    pub(crate) fn new_unchecked(op: AlgebraicOperator2Forms) -> Self {
        CurvatureTensor(op)
    }

    pub fn zeros(n: Dimension) -> Self {
        CurvatureTensor(AlgebraicOperator2Forms::zeros(n))
    }

    /// `(1/2) g∘g`, the curvature of the unit sphere.
    pub fn identity(n: Dimension) -> Self {
        CurvatureTensor(AlgebraicOperator2Forms::identity(n))
    }

    pub fn from_matrix(n: Dimension, m: DMatrix<f64>) -> Result<Self> {
        Self::new(AlgebraicOperator2Forms::from_matrix(n, m)?)
    }

    pub fn as_operator(&self) -> &AlgebraicOperator2Forms {
        &self.0
    }

    pub fn into_operator(self) -> AlgebraicOperator2Forms {
        self.0
    }

    pub fn scale(&self, c: f64) -> Self {
        CurvatureTensor(self.0.scale(c))
    }

    pub fn rotated(&self, f: &DMatrix<f64>) -> Result<Self> {
        Ok(CurvatureTensor(self.0.rotated(f)?))
    }
}

impl Deref for CurvatureTensor {
    type Target = AlgebraicOperator2Forms;
    fn deref(&self) -> &AlgebraicOperator2Forms {
        &self.0
    }
}

impl AsRef<AlgebraicOperator2Forms> for CurvatureTensor {
    fn as_ref(&self) -> &AlgebraicOperator2Forms {
        &self.0
    }
}

impl Add for &CurvatureTensor {
    type Output = CurvatureTensor;
    fn add(self, rhs: Self) -> CurvatureTensor {
        CurvatureTensor(&self.0 + &rhs.0)
    }
}

impl Sub for &CurvatureTensor {
    type Output = CurvatureTensor;
    fn sub(self, rhs: Self) -> CurvatureTensor {
        CurvatureTensor(&self.0 - &rhs.0)
    }
}

/// `(h∘k)_ijkl = h_ik k_jl + k_ik h_jl − h_il k_jk − k_il h_jk`.
pub fn kulkarni_nomizu(h: &SymmetricForm2, k: &SymmetricForm2) -> Result<CurvatureTensor> {
    ensure_same(h.dim().get(), k.dim().get())?;
    let op = AlgebraicOperator2Forms::from_four_index(h.dim(), |i, j, p, q| {
        h.get(i, p) * k.get(j, q) + k.get(i, p) * h.get(j, q)
            - h.get(i, q) * k.get(j, p)
            - k.get(i, q) * h.get(j, p)
    });
    Ok(CurvatureTensor::new_unchecked(op))
}

/// `rc(T)_ik = Σ_j T_ijkj`.
pub fn ricci_contraction(t: &AlgebraicOperator2Forms) -> SymmetricForm2 {
    let n = t.dim().get();
    // average the two index orders so a non-self-adjoint input still yields a form
    SymmetricForm2::from_fn(t.dim(), |i, k| {
        let mut s = 0.0;
        for j in 0..n {
            s += t.get(i, j, k, j) + t.get(k, j, i, j);
        }
        0.5 * s
    })
}

/// Splits `T = kerb + imb` along `S²(Λ²) = Ker b ⊕ Im b`.
pub fn bianchi_project(t: &AlgebraicOperator2Forms) -> (CurvatureTensor, AlgebraicOperator2Forms) {
    let imb = t.bianchi_map();
    let kerb = t - &imb;
    (CurvatureTensor::new_unchecked(kerb), imb)
}

pub fn inner(a: &AlgebraicOperator2Forms, b: &AlgebraicOperator2Forms) -> Result<f64> {
    a.inner(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::indexing::pair_pos as pos;

    fn d(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn kn_of_metric_is_twice_identity() {
        for n in 3..8 {
            let g = SymmetricForm2::identity(d(n));
            let gg = kulkarni_nomizu(&g, &g).unwrap();
            assert_eq!(gg.get(0, 1, 0, 1), 2.0);
            assert_eq!(gg.matrix(), &(DMatrix::identity(d(n).pairs(), d(n).pairs()) * 2.0));
        }
    }

    #[test]
    fn accessor_signs() {
        let op = AlgebraicOperator2Forms::identity(d(4));
        assert_eq!(op.get(0, 1, 0, 1), 1.0);
        assert_eq!(op.get(1, 0, 0, 1), -1.0);
        assert_eq!(op.get(1, 0, 1, 0), 1.0);
        assert_eq!(op.get(0, 0, 1, 2), 0.0);
    }

    #[test]
    fn ricci_of_identity() {
        let rc = ricci_contraction(&AlgebraicOperator2Forms::identity(d(4)));
        assert_eq!(rc, SymmetricForm2::identity(d(4)).scale(3.0));
    }

    #[test]
    fn identity_is_curvature() {
        assert!(CurvatureTensor::new(AlgebraicOperator2Forms::identity(d(5))).is_ok());
    }

    #[test]
    fn non_bianchi_is_rejected() {
        // the Hodge-star-like operator e12 <-> e34 lies in Im b
        let n = d(4);
        let mut m = DMatrix::zeros(6, 6);
        m[(pos(4, 0, 1), pos(4, 2, 3))] = 1.0;
        m[(pos(4, 2, 3), pos(4, 0, 1))] = 1.0;
        let op = AlgebraicOperator2Forms::from_matrix(n, m).unwrap();
        assert!(CurvatureTensor::new(op).is_err());
    }
}
