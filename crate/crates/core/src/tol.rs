//! Default tolerances.

/// Relative tolerance for exact algebraic identities in double precision.
pub const ALG: f64 = 1e-10;

/// Round-trip tolerance for eigenvector-based constructions (normal forms).
pub const NORMAL_FORM: f64 = 1e-8;

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// Relative discrepancy `|a - b| / max(1, |a|, |b|)`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Named tolerances, overridable from the command line with `name=value`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<&'static str, f64>);

const DEFAULTS: &[(&str, f64)] = &[
    ("alg", ALG),
    ("sharpcubic", 1e-9),
    ("normal_form", NORMAL_FORM),
    ("equality", 1e-12),
    ("oracle_below", 1e-4),
    ("oracle_above", 1e-9),
    ("chart_zero", 1e-12),
    ("chart", 1e-4),
    ("kato_zero", 1e-10),
    ("ratio_low", 3.5),
    ("ratio_high", 4.5),
];

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(DEFAULTS.iter().copied().collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    /// Applies `name=value` overrides; unknown names and non-positive values are errors.
    pub fn with_overrides<S: AsRef<str>>(mut self, overrides: &[S]) -> Result<Self> {
        for o in overrides {
            let o = o.as_ref();
            let (name, value) = o
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("tolerance override '{o}' is not name=value")))?;
            let key = DEFAULTS
                .iter()
                .map(|(k, _)| *k)
                .find(|k| *k == name.trim())
                .ok_or_else(|| Error::Parse(format!("unknown tolerance '{name}'")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad tolerance value '{value}'")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parse(format!("tolerance '{name}' must be positive")));
            }
            self.0.insert(key, v);
        }
        Ok(self)
    }

    pub fn as_map(&self) -> &BTreeMap<&'static str, f64> {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let t = Tolerances::default().with_overrides(&["alg=1e-12"]).unwrap();
        assert_eq!(t.get("alg"), 1e-12);
        assert_eq!(t.get("sharpcubic"), 1e-9);
        assert!(Tolerances::default().with_overrides(&["nope=1"]).is_err());
        assert!(Tolerances::default().with_overrides(&["alg=-1"]).is_err());
        assert!(Tolerances::default().with_overrides(&["alg"]).is_err());
        assert!(close(1.0, 1.0 + 1e-12, 1e-10) && !close(1.0, 1.1, 1e-10));
    }
}
