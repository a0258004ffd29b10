//! JSON exchange format for operators on Λ².
//!
//! Dense: `{"n": 4, "basis": "lex-pairs", "matrix": [[...], ...]}`.
//! Sparse: `{"n": 4, "components": {"1,2,1,2": 1.0, ...}}` with one-based
//! indices; unspecified components are zero, the pair-swap partner
//! `T_klij` is implied, and every redundant entry must agree.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::indexing::{signed_pair, Dimension};
use super::operator::AlgebraicOperator2Forms;
use crate::error::{Error, Result};
use crate::tol;

pub const BASIS_TAG: &str = "lex-pairs";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseOperatorJson {
    pub n: usize,
    pub basis: String,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparseOperatorJson {
    pub n: usize,
    pub components: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum AnyOperatorJson {
    Dense(DenseOperatorJson),
    Sparse(SparseOperatorJson),
}

pub fn to_json(op: &AlgebraicOperator2Forms) -> DenseOperatorJson {
    let m = op.matrix();
    DenseOperatorJson {
        n: op.dim().get(),
        basis: BASIS_TAG.into(),
        matrix: (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
            .collect(),
    }
}

pub fn to_json_string(op: &AlgebraicOperator2Forms) -> String {
    serde_json::to_string_pretty(&to_json(op)).expect("plain data serializes")
}

pub fn from_json_str(s: &str) -> Result<AlgebraicOperator2Forms> {
    let v: serde_json::Value = serde_json::from_str(s)?;
    from_json_value(v)
}

pub fn from_json_value(v: serde_json::Value) -> Result<AlgebraicOperator2Forms> {
    match serde_json::from_value::<AnyOperatorJson>(v)
        .map_err(|e| Error::Parse(format!("not an operator document: {e}")))?
    {
        AnyOperatorJson::Dense(d) => from_dense(&d),
        AnyOperatorJson::Sparse(s) => from_sparse(&s),
    }
}

pub fn from_dense(d: &DenseOperatorJson) -> Result<AlgebraicOperator2Forms> {
    if d.basis != BASIS_TAG {
        return Err(Error::Parse(format!("unsupported basis {:?}", d.basis)));
    }
    let n = Dimension::new(d.n)?;
    let k = n.pairs();
    if d.matrix.len() != k || d.matrix.iter().any(|r| r.len() != k) {
        return Err(Error::Parse(format!("matrix must be {k}x{k} for n = {}", d.n)));
    }
    let m = DMatrix::from_fn(k, k, |r, c| d.matrix[r][c]);
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parse("non-finite matrix entry".into()));
    }
    AlgebraicOperator2Forms::from_matrix(n, m)
}

fn parse_key(key: &str, n: usize) -> Result<[usize; 4]> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::Parse(format!("component key {key:?} must have four indices")));
    }
    let mut out = [0; 4];
    for (o, p) in out.iter_mut().zip(parts) {
        let v: usize = p
            .parse()
            .map_err(|_| Error::Parse(format!("bad index {p:?} in key {key:?}")))?;
        if v == 0 || v > n {
            return Err(Error::Parse(format!("index {v} out of range 1..={n} in key {key:?}")));
        }
        *o = v - 1;
    }
    Ok(out)
}

pub fn from_sparse(s: &SparseOperatorJson) -> Result<AlgebraicOperator2Forms> {
    let n = Dimension::new(s.n)?;
    let k = n.pairs();
    let mut slots: Vec<Option<f64>> = vec![None; k * k];
    let scale = s.components.values().fold(1.0_f64, |a, v| a.max(v.abs()));
    for (key, &v) in &s.components {
        if !v.is_finite() {
            return Err(Error::Parse(format!("non-finite component {key:?}")));
        }
        let [i, j, p, q] = parse_key(key, s.n)?;
        let (a, sa) = match signed_pair(s.n, i, j) {
            Some(x) => x,
            None if v.abs() <= tol::ALG * scale => continue,
            None => return Err(Error::Invariant(format!("component {key} violates antisymmetry"))),
        };
        let (b, sb) = match signed_pair(s.n, p, q) {
            Some(x) => x,
            None if v.abs() <= tol::ALG * scale => continue,
            None => return Err(Error::Invariant(format!("component {key} violates antisymmetry"))),
        };
        let val = sa * sb * v;
        match slots[a * k + b] {
            Some(prev) if (prev - val).abs() > tol::ALG * scale => {
                return Err(Error::Invariant(format!(
                    "component {key} conflicts with an equivalent entry"
                )))
            }
            _ => slots[a * k + b] = Some(val),
        }
    }
    let mut m = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            let v = match (slots[a * k + b], slots[b * k + a]) {
                (Some(x), Some(y)) if (x - y).abs() > tol::ALG * scale => {
                    return Err(Error::Invariant(
                        "components violate the pair symmetry T_ijkl = T_klij".into(),
                    ))
                }
                (Some(x), _) | (None, Some(x)) => x,
                (None, None) => 0.0,
            };
            m[(a, b)] = v;
        }
    }
    AlgebraicOperator2Forms::from_matrix(n, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip() {
        let op = AlgebraicOperator2Forms::identity(Dimension::new(4).unwrap()).scale(0.3);
        let back = from_json_str(&to_json_string(&op)).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn sparse_fills_partners() {
        let doc = r#"{"n": 3, "components": {"1,2,1,2": 1.0, "2,1,3,1": 0.5}}"#;
        let op = from_json_str(doc).unwrap();
        assert_eq!(op.get(0, 1, 0, 1), 1.0);
        assert_eq!(op.get(0, 2, 0, 1), 0.5);
        assert_eq!(op.get(1, 0, 0, 2), -0.5);
    }

    #[test]
    fn sparse_rejects_asymmetry() {
        let bad = r#"{"n": 3, "components": {"1,2,1,3": 1.0, "1,3,1,2": 2.0}}"#;
        assert!(from_json_str(bad).is_err());
        let diag = r#"{"n": 3, "components": {"1,1,1,2": 1.0}}"#;
        assert!(from_json_str(diag).is_err());
        let clash = r#"{"n": 3, "components": {"1,2,1,3": 1.0, "2,1,3,1": 2.0}}"#;
        assert!(from_json_str(clash).is_err());
    }

    #[test]
    fn dense_rejects_wrong_basis() {
        let doc = r#"{"n": 3, "basis": "hodge", "matrix": [[1,0,0],[0,1,0],[0,0,1]]}"#;
        assert!(from_json_str(doc).is_err());
    }
}
