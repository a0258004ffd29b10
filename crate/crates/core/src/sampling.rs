//! Seeded random generators for tensors used by the property suites.
//!
//! Every stream is a ChaCha8 generator keyed by `(seed, stream)`, so trials can
//! run in parallel and still reproduce bit for bit.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    bianchi_project, decompose, AlgebraicOperator2Forms, CovDerivCurvature, CurvatureTensor, Dimension,
    PureCurvatureMatrix, SymmetricForm2, TwoFormIndexing, TwoFormOneForm,
};

pub type TrialRng = ChaCha8Rng;

pub fn rng(seed: u64, stream: u64) -> TrialRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[inline]
fn unit(r: &mut TrialRng) -> f64 {
    r.random_range(-1.0..1.0)
}

pub fn symmetric_operator(n: Dimension, r: &mut TrialRng) -> AlgebraicOperator2Forms {
    let k = n.pairs();
    let mut m = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let v = unit(r);
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    AlgebraicOperator2Forms::from_matrix_unchecked(n, m).expect("shape")
}

/// Uniform symmetric operator projected onto `Ker b`.
pub fn curvature(n: Dimension, r: &mut TrialRng) -> CurvatureTensor {
    bianchi_project(&symmetric_operator(n, r)).0
}

/// Weyl part of a random curvature tensor (`n >= 4`).
pub fn weyl(n: Dimension, r: &mut TrialRng) -> CurvatureTensor {
    decompose(&curvature(n, r)).expect("n >= 4").weyl
}

pub fn symmetric_form(n: Dimension, r: &mut TrialRng) -> SymmetricForm2 {
    SymmetricForm2::from_fn(n, |_, _| unit(r))
}

pub fn traceless_form(n: Dimension, r: &mut TrialRng) -> SymmetricForm2 {
    symmetric_form(n, r).traceless()
}

pub fn two_form_one_form(n: Dimension, r: &mut TrialRng) -> TwoFormOneForm {
    TwoFormOneForm::from_fn(n, |_, _, _| unit(r))
}

/// Random `A` with `Σ_a A_aba = 0`, obtained by removing `δ_ak x_b − δ_bk x_a`.
pub fn trace_free_two_form_one_form(n: Dimension, r: &mut TrialRng) -> TwoFormOneForm {
    let a = two_form_one_form(n, r);
    let t = a.trace();
    let c = 1.0 / (n.get() as f64 - 1.0);
    TwoFormOneForm::from_fn(n, |i, j, k| {
        let mut v = a.get(i, j, k);
        if i == k {
            v -= c * t[j];
        }
        if j == k {
            v += c * t[i];
        }
        v
    })
}

/// Haar-like orthogonal matrix from the QR factorization of a uniform matrix.
pub fn orthogonal(n: usize, r: &mut TrialRng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| unit(r));
    let qr = a.qr();
    let mut q = qr.q();
    let rr = qr.r();
    for j in 0..n {
        if rr[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Formal `∇R` at the center of normal coordinates built from a random
/// third-order metric jet `G_{ij,klm}` (symmetric in `ij` and in `klm`):
/// `∇_m R_ijkl = (1/2)(G_{il,jkm} + G_{jk,ilm} − G_{ik,jlm} − G_{jl,ikm})`.
///
/// Both Bianchi identities hold exactly for this construction.
pub fn jet_derivative(n: Dimension, r: &mut TrialRng) -> CovDerivCurvature {
    let m = n.get();
    let at = |i: usize, j: usize, k: usize, l: usize, p: usize| (((i * m + j) * m + k) * m + l) * m + p;
    let raw: Vec<f64> = (0..m.pow(5)).map(|_| unit(r)).collect();
    let mut g = vec![0.0; m.pow(5)];
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    for p in 0..m {
                        let t = [k, l, p];
                        let mut acc = 0.0;
                        for pr in perms {
                            let (a, b, c) = (t[pr[0]], t[pr[1]], t[pr[2]]);
                            acc += raw[at(i, j, a, b, c)] + raw[at(j, i, a, b, c)];
                        }
                        g[at(i, j, k, l, p)] = acc / 12.0;
                    }
                }
            }
        }
    }
    let slices = (0..m)
        .map(|q| {
            AlgebraicOperator2Forms::from_four_index(n, |i, j, k, l| {
                0.5 * (g[at(i, l, j, k, q)] + g[at(j, k, i, l, q)] - g[at(i, k, j, l, q)] - g[at(j, l, i, k, q)])
            })
        })
        .collect();
    CovDerivCurvature::from_slices(slices).expect("jet derivative slices are self-adjoint")
}

/// Uniform pair values projected onto the row-sum-zero subspace.
pub fn pure_matrix(n: Dimension, r: &mut TrialRng) -> PureCurvatureMatrix {
    let idx = TwoFormIndexing::new(n);
    let k = idx.len();
    let m = n.get();
    // incidence matrix: row i has ones on the pairs containing i
    let c = DMatrix::from_fn(m, k, |i, p| {
        let (a, b) = idx.pair(p);
        if a == i || b == i {
            1.0
        } else {
            0.0
        }
    });
    let w = nalgebra::DVector::from_fn(k, |_, _| unit(r));
    let cct = &c * c.transpose();
    let y = cct.lu().solve(&(&c * &w)).expect("C Cᵀ is invertible for n >= 3");
    let proj = &w - c.transpose() * y;
    let mut out = DMatrix::zeros(m, m);
    for (p, &(a, b)) in idx.pairs().iter().enumerate() {
        out[(a, b)] = proj[p];
        out[(b, a)] = proj[p];
    }
    PureCurvatureMatrix::new(out).expect("projection satisfies the invariants")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let n = Dimension::new(5).unwrap();
        let a = weyl(n, &mut rng(7, 3));
        let b = weyl(n, &mut rng(7, 3));
        let c = weyl(n, &mut rng(7, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let q = orthogonal(6, &mut rng(1, 0));
        assert!((q.transpose() * &q - DMatrix::identity(6, 6)).amax() < 1e-13);
    }

    #[test]
    fn jet_derivative_is_curvature_valued() {
        let n = Dimension::new(5).unwrap();
        let d = jet_derivative(n, &mut rng(2, 0));
        for s in d.slices() {
            assert!(s.bianchi_residual() < 1e-13);
        }
        assert!(crate::algebra::second_bianchi(&d).norm() < 1e-13);
    }
}
