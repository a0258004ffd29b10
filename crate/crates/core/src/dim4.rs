//! Four-dimensional Weyl curvature: the Hodge splitting `W = W⁺ ⊕ W⁻`, Berger's
//! normal form, determinant identities and the pinching lemma.

use nalgebra::{DMatrix, Matrix3, Matrix4, SymmetricEigen, Vector4};
use serde::Serialize;

use crate::algebra::{
    kulkarni_nomizu, ricci_contraction, sharp, square, AlgebraicOperator2Forms, CurvatureTensor, Dimension,
    SymmetricForm2,
};
use crate::error::{Error, Result};
use crate::tol;

const S2: f64 = std::f64::consts::SQRT_2;

/// Columns: `(e12+e34, e13−e24, e14+e23)/√2` then `(e12−e34, e13+e24, e14−e23)/√2`
/// in the lexicographic pair basis `e12, e13, e14, e23, e24, e34`.
pub fn hodge_basis() -> DMatrix<f64> {
    let h = 1.0 / S2;
    #[rustfmt::skip]
    let cols = [
        [h, 0.0, 0.0, 0.0, 0.0, h],
        [0.0, h, 0.0, 0.0, -h, 0.0],
        [0.0, 0.0, h, h, 0.0, 0.0],
        [h, 0.0, 0.0, 0.0, 0.0, -h],
        [0.0, h, 0.0, 0.0, h, 0.0],
        [0.0, 0.0, h, -h, 0.0, 0.0],
    ];
    DMatrix::from_fn(6, 6, |r, c| cols[c][r])
}

fn four() -> Dimension {
    Dimension::new(4).expect("4 >= 3")
}

fn require_weyl4(w: &AlgebraicOperator2Forms, what: &'static str) -> Result<()> {
    w.dim().require_exactly(4, what)?;
    let rc = ricci_contraction(w).norm();
    if rc > tol::ALG * w.norm().max(1.0) {
        return Err(Error::Invariant(format!("{what}: input is not trace-free (|rc| = {rc:.3e})")));
    }
    Ok(())
}

/// `W⁺` and `W⁻` as 3×3 matrices on the self-dual and anti-self-dual bases.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfDualSplit {
    pub wplus: Matrix3<f64>,
    pub wminus: Matrix3<f64>,
    /// Norm of the Λ⁺→Λ⁻ block, zero for a Weyl tensor.
    pub cross: f64,
}

pub fn split_self_dual(w: &CurvatureTensor) -> Result<SelfDualSplit> {
    require_weyl4(w, "split_self_dual")?;
    let u = hodge_basis();
    let m = u.transpose() * w.matrix() * &u;
    let wplus = Matrix3::from_fn(|r, c| m[(r, c)]);
    let wminus = Matrix3::from_fn(|r, c| m[(r + 3, c + 3)]);
    let cross = m.view((0, 3), (3, 3)).norm();
    Ok(SelfDualSplit { wplus, wminus, cross })
}

/// Embeds a 3×3 block acting on Λ⁺ (or Λ⁻) into the pair basis.
pub fn embed(block: &Matrix3<f64>, self_dual: bool) -> AlgebraicOperator2Forms {
    let u = hodge_basis();
    let off = if self_dual { 0 } else { 3 };
    let mut big = DMatrix::zeros(6, 6);
    for r in 0..3 {
        for c in 0..3 {
            big[(r + off, c + off)] = block[(r, c)];
        }
    }
    AlgebraicOperator2Forms::from_matrix_unchecked(four(), &u * big * u.transpose()).expect("6x6")
}

impl SelfDualSplit {
    pub fn norm_plus_sq(&self) -> f64 {
        self.wplus.norm_squared()
    }

    pub fn norm_minus_sq(&self) -> f64 {
        self.wminus.norm_squared()
    }

    pub fn reassemble(&self) -> AlgebraicOperator2Forms {
        &embed(&self.wplus, true) + &embed(&self.wminus, false)
    }

    /// `⟨W⁺, W⁻⟩` evaluated on the embedded tensors.
    pub fn cross_inner(&self) -> f64 {
        embed(&self.wplus, true)
            .inner(&embed(&self.wminus, false))
            .expect("same dimension")
    }
}

fn sorted_eigen(m: &Matrix3<f64>) -> (Vec<f64>, Matrix3<f64>) {
    let e = SymmetricEigen::new(*m);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]));
    let vals = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let mut vecs = Matrix3::from_fn(|r, c| e.eigenvectors[(r, order[c])]);
    for c in 0..3 {
        // lexicographic sign convention: first non-negligible entry positive
        let col = vecs.column(c);
        if let Some(x) = col.iter().find(|x| x.abs() > 1e-12) {
            if *x < 0.0 {
                vecs.column_mut(c).neg_mut();
            }
        }
    }
    if vecs.determinant() < 0.0 {
        vecs.column_mut(2).neg_mut();
    }
    (vals, vecs)
}

/// Orthonormal frame with `W = [[A, B], [B, A]]` on `e12, e13, e14, e34, e42, e23`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BergerNormalForm {
    /// Column `i` is `e_{i+1}` in the input frame.
    pub frame: [[f64; 4]; 4],
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub residual: f64,
}

/// Components of `w` on `e12, e13, e14, e34, e42, e23`.
fn berger_block(w: &AlgebraicOperator2Forms) -> DMatrix<f64> {
    let basis = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)];
    DMatrix::from_fn(6, 6, |r, c| {
        let (i, j) = basis[r];
        let (k, l) = basis[c];
        w.get(i, j, k, l)
    })
}

fn antisym(col: &[f64]) -> Matrix4<f64> {
    // the 2-form Σ_{i<j} c_ij e_i∧e_j as an antisymmetric matrix
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut m = Matrix4::zeros();
    for (p, &(i, j)) in pairs.iter().enumerate() {
        m[(i, j)] = col[p];
        m[(j, i)] = -col[p];
    }
    m
}

fn frame_from(u: &Matrix3<f64>, v: &Matrix3<f64>) -> Option<Matrix4<f64>> {
    let h = hodge_basis();
    let phis: Vec<Matrix4<f64>> = (0..3)
        .map(|k| {
            let up = h.view((0, 0), (6, 3)) * u.column(k);
            let vm = h.view((0, 3), (6, 3)) * v.column(k);
            let c: Vec<f64> = (0..6).map(|r| (up[r] + vm[r]) / S2).collect();
            antisym(&c)
        })
        .collect();
    let mut acc = Matrix4::zeros();
    for p in &phis {
        acc -= p * p;
    }
    let e = SymmetricEigen::new(acc);
    let top = e.eigenvalues.imax();
    let mut e1: Vector4<f64> = e.eigenvectors.column(top).into();
    if let Some(x) = e1.iter().find(|x| x.abs() > 1e-12) {
        if *x < 0.0 {
            e1 = -e1;
        }
    }
    let mut f = Matrix4::zeros();
    f.set_column(0, &e1);
    for (k, p) in phis.iter().enumerate() {
        f.set_column(k + 1, &(p.transpose() * e1));
    }
    let orth = (f.transpose() * f - Matrix4::identity()).amax();
    (orth < 1e-8).then_some(f)
}

pub fn berger_normal_form(w: &CurvatureTensor) -> Result<BergerNormalForm> {
    require_weyl4(w, "berger_normal_form")?;
    if w.bianchi_residual() > tol::ALG * w.norm().max(1.0) {
        return Err(Error::Invariant("berger_normal_form: first Bianchi identity fails".into()));
    }
    let split = split_self_dual(w)?;
    let (lp, up) = sorted_eigen(&split.wplus);
    let (lm, vm) = sorted_eigen(&split.wminus);
    let a = [0, 1, 2].map(|k| 0.5 * (lp[k] + lm[k]));
    let b = [0, 1, 2].map(|k| 0.5 * (lp[k] - lm[k]));
    let target = {
        let mut t = DMatrix::zeros(6, 6);
        for k in 0..3 {
            t[(k, k)] = a[k];
            t[(k + 3, k + 3)] = a[k];
            t[(k, k + 3)] = b[k];
            t[(k + 3, k)] = b[k];
        }
        t
    };
    let scale = w.matrix().amax().max(1.0);
    let mut best: Option<(f64, Matrix4<f64>)> = None;
    // orientation-preserving sign patterns of the paired eigenvectors
    let flips = [[1.0, 1.0, 1.0], [-1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, -1.0]];
    'outer: for fp in flips {
        for fm in flips {
            let u = Matrix3::from_fn(|r, c| up[(r, c)] * fp[c]);
            let v = Matrix3::from_fn(|r, c| vm[(r, c)] * fm[c]);
            let Some(f) = frame_from(&u, &v) else { continue };
            let fd = DMatrix::from_fn(4, 4, |r, c| f[(r, c)]);
            let rot = w.rotated(&fd)?;
            let res = (berger_block(&rot) - &target).amax() / scale;
            if best.as_ref().is_none_or(|(r, _)| res < *r) {
                best = Some((res, f));
            }
            if res <= tol::NORMAL_FORM {
                break 'outer;
            }
        }
    }
    let (residual, f) = best.ok_or_else(|| Error::Invariant("no orthonormal Berger frame found".into()))?;
    Ok(BergerNormalForm {
        frame: [0, 1, 2, 3].map(|r| [0, 1, 2, 3].map(|c| f[(r, c)])),
        a,
        b,
        residual,
    })
}

impl BergerNormalForm {
    pub fn frame_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(4, 4, |r, c| self.frame[r][c])
    }

    /// `W⁺` (`W⁻`) in the frame's 6×6 basis: blocks `(A ± B)/2` and `(B ± A)/2`.
    pub fn half_blocks(&self, self_dual: bool) -> DMatrix<f64> {
        let s = if self_dual { 1.0 } else { -1.0 };
        let mut t = DMatrix::zeros(6, 6);
        for k in 0..3 {
            let d = 0.5 * (self.a[k] + s * self.b[k]);
            let o = 0.5 * (self.b[k] + s * self.a[k]);
            t[(k, k)] = d;
            t[(k + 3, k + 3)] = d;
            t[(k, k + 3)] = o;
            t[(k + 3, k)] = o;
        }
        t
    }
}

/// The 6×6 matrix of `T` on `e12, e13, e14, e34, e42, e23` in the given frame.
pub fn berger_basis_matrix(t: &AlgebraicOperator2Forms, frame: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(berger_block(&t.rotated(frame)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetIdentities {
    /// `⟨W⁺, (W⁺)²⟩` through the four-index embedding.
    pub cube_dot: f64,
    /// `⟨W⁺, (W⁺)♯⟩` through the four-index embedding.
    pub cube_sharp: f64,
    pub det: f64,
}

pub fn det_identities(wp: &Matrix3<f64>) -> Result<DetIdentities> {
    let scale = wp.amax().max(1.0);
    if (wp - wp.transpose()).amax() > tol::ALG * scale {
        return Err(Error::Invariant("W⁺ block must be symmetric".into()));
    }
    if wp.trace().abs() > tol::ALG * scale {
        return Err(Error::Invariant(format!("W⁺ block must be traceless (trace {:.3e})", wp.trace())));
    }
    let w = embed(wp, true);
    Ok(DetIdentities {
        cube_dot: w.inner(&square(&w))?,
        cube_sharp: w.inner(&sharp(&w))?,
        det: wp.determinant(),
    })
}

/// `18 det(W⁺) ≤ √6 |W⁺|³`; returns `(lhs, rhs)`.
pub fn sharp_det_estimate(wp: &Matrix3<f64>) -> (f64, f64) {
    (18.0 * wp.determinant(), 6f64.sqrt() * wp.norm().powi(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinchedLemma {
    pub holds: bool,
    pub threshold: f64,
    /// `S |W⁺|²` and `36 det W⁺` on the spectrum `(λ1, −λ1−λ3, λ3)`.
    pub s_norm_sq: f64,
    pub thirty_six_det: f64,
}

/// `λ3 ≤ −λ1/2 − λ1 √(3(λ1 − S/6) / (4(3λ1 + S/6)))`, valid when `λ1 ≥ S/6 > 0`.
pub fn pinched_lemma_check(lambda1: f64, lambda3: f64, s: f64) -> Result<PinchedLemma> {
    if !(lambda1.is_finite() && lambda3.is_finite() && s.is_finite()) {
        return Err(Error::InvalidInput("non-finite input".into()));
    }
    if s <= 0.0 || lambda1 < s / 6.0 {
        return Err(Error::NotApplicable(format!(
            "pinched lemma needs λ1 ≥ S/6 > 0 (λ1 = {lambda1}, S = {s})"
        )));
    }
    let threshold = -lambda1 / 2.0 - lambda1 * (3.0 * (lambda1 - s / 6.0) / (4.0 * (3.0 * lambda1 + s / 6.0))).sqrt();
    let l2 = -lambda1 - lambda3;
    let holds = lambda3 <= threshold;
    let s_norm_sq = s * (lambda1 * lambda1 + l2 * l2 + lambda3 * lambda3);
    let thirty_six_det = 36.0 * lambda1 * l2 * lambda3;
    if holds && s_norm_sq < thirty_six_det - tol::ALG * s_norm_sq.abs().max(1.0) {
        return Err(Error::Invariant(format!(
            "pinched lemma conclusion fails: S|W⁺|² = {s_norm_sq} < 36 det = {thirty_six_det}"
        )));
    }
    Ok(PinchedLemma {
        holds,
        threshold,
        s_norm_sq,
        thirty_six_det,
    })
}

/// `⟨E∘g, W²⟩` in any dimension `n ≥ 4`.
pub fn e_circ_g_w_square(w: &CurvatureTensor, e: &SymmetricForm2) -> Result<f64> {
    let g = SymmetricForm2::identity(w.dim());
    kulkarni_nomizu(e, &g)?.inner(&square(w))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ECircGReport {
    pub value: f64,
    /// `max_ij |Σ_kpq W_ikpq W_jkpq − |W|² δ_ij|`.
    pub contraction_residual: f64,
}

pub fn e_circ_g_orthogonality(w: &CurvatureTensor, e: &SymmetricForm2) -> Result<ECircGReport> {
    require_weyl4(w, "e_circ_g_orthogonality")?;
    e.dim().require_exactly(4, "e_circ_g_orthogonality")?;
    if e.trace().abs() > tol::ALG * e.norm().max(1.0) {
        return Err(Error::Invariant("E must be traceless".into()));
    }
    let value = e_circ_g_w_square(w, e)?;
    let n2 = w.norm_sq();
    let mut res: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let mut s = 0.0;
            for k in 0..4 {
                for p in 0..4 {
                    for q in 0..4 {
                        s += w.get(i, k, p, q) * w.get(j, k, p, q);
                    }
                }
            }
            let target = if i == j { n2 } else { 0.0 };
            res = res.max((s - target).abs());
        }
    }
    let scale = n2.max(1.0);
    if value.abs() > tol::ALG * scale || res > tol::ALG * scale {
        return Err(Error::Invariant(format!(
            "⟨E∘g, W²⟩ = {value:.3e}, contraction residual {res:.3e}"
        )));
    }
    Ok(ECircGReport {
        value,
        contraction_residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hodge_basis_is_orthogonal() {
        let u = hodge_basis();
        assert!((u.transpose() * &u - DMatrix::identity(6, 6)).amax() < 1e-15);
    }

    #[test]
    fn zero_weyl() {
        let w = CurvatureTensor::zeros(four());
        let s = split_self_dual(&w).unwrap();
        assert_eq!(s.wplus, Matrix3::zeros());
        let nf = berger_normal_form(&w).unwrap();
        assert_eq!((nf.a, nf.b), ([0.0; 3], [0.0; 3]));
        let d = det_identities(&Matrix3::zeros()).unwrap();
        assert_eq!((d.cube_dot, d.cube_sharp, d.det), (0.0, 0.0, 0.0));
    }

    #[test]
    fn rejects_wrong_dimension() {
        let w = CurvatureTensor::zeros(Dimension::new(5).unwrap());
        assert!(split_self_dual(&w).is_err());
        assert!(berger_normal_form(&w).is_err());
    }

    #[test]
    fn pinched_lemma_preconditions() {
        assert!(pinched_lemma_check(1.0, -1.0, 12.0).is_err());
        assert!(pinched_lemma_check(1.0, -1.0, -1.0).is_err());
    }
}
