use super::forms::SymmetricForm2;
use super::operator::AlgebraicOperator2Forms;
use super::indexing::TwoFormIndexing;
use crate::error::{ensure_same, Result};

/// `(R.S)_ijkl = (1/2) Σ_pq R_ijpq S_klpq`; in the pair basis this is `M_R M_Sᵀ`.
///
/// The result is self-adjoint only when `R` and `S` commute.
pub fn dot_product(
    r: &AlgebraicOperator2Forms,
    s: &AlgebraicOperator2Forms,
) -> Result<AlgebraicOperator2Forms> {
    ensure_same(r.dim().get(), s.dim().get())?;
    AlgebraicOperator2Forms::from_matrix_unchecked(r.dim(), r.matrix() * s.matrix().transpose())
}

/// `R² = R.R`.
pub fn square(r: &AlgebraicOperator2Forms) -> AlgebraicOperator2Forms {
    dot_product(r, r).expect("same dimension")
}

/// `(R♯S)_ijkl = (1/2) Σ_pq [R_ipkq S_jplq + S_ipkq R_jplq − R_iplq S_jpkq − S_iplq R_jpkq]`.
pub fn sharp_product(
    r: &AlgebraicOperator2Forms,
    s: &AlgebraicOperator2Forms,
) -> Result<AlgebraicOperator2Forms> {
    ensure_same(r.dim().get(), s.dim().get())?;
    let n = r.dim().get();
    let fr = r.to_full();
    let fs = s.to_full();
    let at = |t: &[f64], i: usize, j: usize, k: usize, l: usize| t[((i * n + j) * n + k) * n + l];
    // X(i,j,k,l) = Σ_pq A_ipkq B_jplq
    let cross = |a: &[f64], b: &[f64], i: usize, j: usize, k: usize, l: usize| {
        let mut acc = 0.0;
        for p in 0..n {
            for q in 0..n {
                acc += at(a, i, p, k, q) * at(b, j, p, l, q);
            }
        }
        acc
    };
    let out = AlgebraicOperator2Forms::from_four_index(r.dim(), |i, j, k, l| {
        0.5 * (cross(&fr, &fs, i, j, k, l) + cross(&fs, &fr, i, j, k, l)
            - cross(&fr, &fs, i, j, l, k)
            - cross(&fs, &fr, i, j, l, k))
    });
    Ok(out)
}

/// `R♯ = R♯R`.
pub fn sharp(r: &AlgebraicOperator2Forms) -> AlgebraicOperator2Forms {
    sharp_product(r, r).expect("same dimension")
}

/// `R² + R♯`.
pub fn square_plus_sharp(r: &AlgebraicOperator2Forms) -> AlgebraicOperator2Forms {
    &square(r) + &sharp(r)
}

/// `tri(R1,R2,R3) = ⟨R1.R2 + R2.R1 + 2 R1♯R2, R3⟩`, symmetric in its arguments.
pub fn tri(
    r1: &AlgebraicOperator2Forms,
    r2: &AlgebraicOperator2Forms,
    r3: &AlgebraicOperator2Forms,
) -> Result<f64> {
    ensure_same(r1.dim().get(), r3.dim().get())?;
    let a = dot_product(r1, r2)?;
    let b = dot_product(r2, r1)?;
    let c = sharp_product(r1, r2)?;
    let sum = &(&a + &b) + &c.scale(2.0);
    sum.inner(r3)
}

/// The scalars `W(A,A) = Σ W_ijkl A_ik A_jl` and `A³ = Σ A_ij A_jk A_ki`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadraticForms {
    pub w_aa: f64,
    pub a_cubed: f64,
}

pub fn quadratic_forms(w: &AlgebraicOperator2Forms, a: &SymmetricForm2) -> Result<QuadraticForms> {
    ensure_same(w.dim().get(), a.dim().get())?;
    let n = w.dim().get();
    let mut w_aa = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    w_aa += w.get(i, j, k, l) * a.get(i, k) * a.get(j, l);
                }
            }
        }
    }
    Ok(QuadraticForms {
        w_aa,
        a_cubed: a.cubic_trace(),
    })
}

/// Sum of the sectional values `T_ijij` over a set of pairs.
pub(crate) fn sectional_sum(t: &AlgebraicOperator2Forms, idx: &TwoFormIndexing, keep: impl Fn(usize, usize) -> bool) -> f64 {
    idx.pairs()
        .iter()
        .filter(|&&(i, j)| keep(i, j))
        .map(|&(i, j)| t.get(i, j, i, j))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Dimension;

    #[test]
    fn identity_squares_to_identity() {
        let id = AlgebraicOperator2Forms::identity(Dimension::new(5).unwrap());
        assert_eq!(square(&id), id);
    }

    #[test]
    fn sharp_of_identity() {
        // Id♯Id = (n-2) Id for the curvature operator of the unit sphere
        for n in 3..7 {
            let d = Dimension::new(n).unwrap();
            let id = AlgebraicOperator2Forms::identity(d);
            let s = sharp(&id);
            let expect = id.scale((n - 2) as f64);
            assert!((s.matrix() - expect.matrix()).amax() < 1e-13, "n = {n}");
        }
    }
}
