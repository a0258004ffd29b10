use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::indexing::Dimension;
use crate::error::{ensure_same, Error, Result};
use crate::tol;

/// Symmetric bilinear form on an `n`-dimensional inner-product space.
///
/// Stored as the upper triangle (row-major); the accessor mirrors, so symmetry
/// is exact by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricForm2 {
    n: Dimension,
    upper: Vec<f64>,
}

#[inline]
fn tri_pos(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * n - i + 1) / 2 + (j - i)
}

impl SymmetricForm2 {
    pub fn zeros(n: Dimension) -> Self {
        let m = n.get();
        SymmetricForm2 {
            n,
            upper: vec![0.0; m * (m + 1) / 2],
        }
    }

    /// The metric `g`, i.e. the identity in an orthonormal frame.
    pub fn identity(n: Dimension) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Evaluates `f(i, j)` for `i <= j`.
    pub fn from_fn(n: Dimension, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let m = n.get();
        let mut upper = Vec::with_capacity(m * (m + 1) / 2);
        for i in 0..m {
            for j in i..m {
                upper.push(f(i, j));
            }
        }
        SymmetricForm2 { n, upper }
    }

    pub fn diagonal(n: Dimension, d: &[f64]) -> Result<Self> {
        ensure_same(n.get(), d.len())?;
        Ok(Self::from_fn(n, |i, j| if i == j { d[i] } else { 0.0 }))
    }

    /// Accepts a square matrix that is symmetric up to `tol::ALG` (relative).
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidInput("symmetric form must be square".into()));
        }
        let n = Dimension::new(m.nrows())?;
        let scale = m.amax().max(1.0);
        for i in 0..m.nrows() {
            for j in i + 1..m.nrows() {
                if (m[(i, j)] - m[(j, i)]).abs() > tol::ALG * scale {
                    return Err(Error::Invariant(format!(
                        "form not symmetric at ({},{})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)])))
    }

    #[inline]
    pub fn dim(&self) -> Dimension {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[tri_pos(self.n.get(), i, j)]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.n.get();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n.get()).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius product `Σ_ij h_ij k_ij`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        ensure_same(self.n.get(), other.n.get())?;
        let n = self.n.get();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.get(i, j) * other.get(i, j);
            }
        }
        Ok(s)
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self).expect("same dimension")
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        SymmetricForm2 {
            n: self.n,
            upper: self.upper.iter().map(|x| c * x).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_same(self.n.get(), other.n.get())?;
        Ok(SymmetricForm2 {
            n: self.n,
            upper: self
                .upper
                .iter()
                .zip(&other.upper)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// `A - (tr A / n) g`.
    pub fn traceless(&self) -> Self {
        let t = self.trace() / self.n.get() as f64;
        self.sub(&Self::identity(self.n).scale(t)).expect("same dimension")
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.to_matrix())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    /// `Fᵀ A F` for a change of frame `F` (columns are the new frame vectors).
    pub fn conjugate(&self, f: &DMatrix<f64>) -> Result<Self> {
        ensure_same(self.n.get(), f.nrows())?;
        let m = f.transpose() * self.to_matrix() * f;
        Self::from_matrix(&m)
    }

    /// `Σ_ij A_ij A_jk A_ki`.
    pub fn cubic_trace(&self) -> f64 {
        let m = self.to_matrix();
        (&m * &m * &m).trace()
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        self.to_matrix() * v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn storage_is_mirrored() {
        let h = SymmetricForm2::from_fn(d(4), |i, j| (10 * i + j) as f64);
        assert_eq!(h.get(1, 3), 13.0);
        assert_eq!(h.get(3, 1), 13.0);
        assert_eq!(h.to_matrix(), h.to_matrix().transpose());
    }

    #[test]
    fn rejects_asymmetric_matrix() {
        let mut m = DMatrix::identity(3, 3);
        m[(0, 1)] = 1.0;
        assert!(SymmetricForm2::from_matrix(&m).is_err());
    }

    #[test]
    fn traceless_part() {
        let h = SymmetricForm2::diagonal(d(3), &[1.0, 2.0, 6.0]).unwrap();
        let e = h.traceless();
        assert!(e.trace().abs() < 1e-15);
        assert_eq!(e.get(0, 0), -2.0);
    }
}
