#![allow(dead_code)]

use weylbench::algebra::{AlgebraicOperator2Forms, Dimension, SymmetricForm2};

pub const ALG: f64 = 1e-10;

pub fn dim(n: usize) -> Dimension {
    Dimension::new(n).unwrap()
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    let scale = 1f64.max(a.abs()).max(b.abs());
    assert!((a - b).abs() <= tol * scale, "{what}: {a} vs {b} (diff {:.3e})", (a - b).abs());
}

/// Dense four-index array of an operator, read through the public accessor.
pub fn full(t: &AlgebraicOperator2Forms) -> Vec<f64> {
    t.to_full()
}

pub fn at(t: &[f64], n: usize, i: usize, j: usize, k: usize, l: usize) -> f64 {
    t[((i * n + j) * n + k) * n + l]
}

/// `(1/4) Σ_ijkl a_ijkl b_ijkl` over full index ranges.
pub fn brute_inner(a: &AlgebraicOperator2Forms, b: &AlgebraicOperator2Forms) -> f64 {
    full(a).iter().zip(full(b)).map(|(x, y)| x * y).sum::<f64>() / 4.0
}

/// `Σ_j T_ijkj` by explicit loops.
pub fn brute_ricci(t: &AlgebraicOperator2Forms) -> Vec<Vec<f64>> {
    let n = t.dim().get();
    (0..n)
        .map(|i| (0..n).map(|k| (0..n).map(|j| t.get(i, j, k, j)).sum()).collect())
        .collect()
}

pub fn form_diff(a: &SymmetricForm2, b: &[Vec<f64>]) -> f64 {
    let n = a.dim().get();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            m = m.max((a.get(i, j) - b[i][j]).abs());
        }
    }
    m
}

pub fn op_diff(a: &AlgebraicOperator2Forms, b: &AlgebraicOperator2Forms) -> f64 {
    (a.matrix() - b.matrix()).amax()
}
