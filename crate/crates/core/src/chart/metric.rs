use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::Dimension;
use crate::error::{Error, Result};

type Evaluator = dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync;

/// A coordinate chart metric `x ↦ g(x)` with a descriptive tag.
///
/// Every evaluation is checked for symmetry and positive-definiteness.
#[derive(Clone)]
pub struct ChartMetric {
    n: Dimension,
    tag: String,
    harmonic_weyl: bool,
    default_center: Vec<f64>,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for ChartMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartMetric")
            .field("n", &self.n.get())
            .field("tag", &self.tag)
            .field("harmonic_weyl", &self.harmonic_weyl)
            .finish()
    }
}

fn conformal(n: usize, factor: f64) -> DMatrix<f64> {
    DMatrix::identity(n, n) * factor
}

fn sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("bad {what} '{s}'")))
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| Error::Parse(format!("bad {what} '{s}'")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("{what} must be finite")));
    }
    Ok(v)
}

impl ChartMetric {
    /// Wraps a user evaluator. User metrics are never tagged harmonic-Weyl.
    pub fn custom(
        n: Dimension,
        tag: impl Into<String>,
        default_center: Vec<f64>,
        f: impl Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync + 'static,
    ) -> Result<Self> {
        if default_center.len() != n.get() {
            return Err(Error::DimensionMismatch {
                left: default_center.len(),
                right: n.get(),
            });
        }
        Ok(ChartMetric {
            n,
            tag: tag.into(),
            harmonic_weyl: false,
            default_center,
            eval: Arc::new(f),
        })
    }

    fn preset_with(
        n: usize,
        tag: String,
        harmonic_weyl: bool,
        default_center: Vec<f64>,
        f: impl Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync + 'static,
    ) -> Result<Self> {
        let n = Dimension::new(n)?;
        n.require_at_least(4, "chart presets")?;
        Ok(ChartMetric {
            n,
            tag,
            harmonic_weyl,
            default_center,
            eval: Arc::new(f),
        })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        let center = (0..n).map(|i| 0.3 - 0.1 * i as f64).collect();
        Self::preset_with(n, format!("euclidean:{n}"), true, center, move |_| Ok(DMatrix::identity(n, n)))
    }

    /// Unit round sphere through stereographic projection, `4/(1+|x|²)² δ`.
    pub fn sphere_stereo(n: usize) -> Result<Self> {
        let center = (0..n).map(|i| 0.2 + 0.07 * i as f64).collect();
        Self::preset_with(n, format!("sphere-stereo:{n}"), true, center, move |x| {
            let c = 2.0 / (1.0 + sq(x));
            Ok(conformal(n, c * c))
        })
    }

    /// Unit hyperbolic space in the Poincaré ball, `4/(1−|x|²)² δ`, domain `|x| < 1`.
    pub fn hyperbolic_ball(n: usize) -> Result<Self> {
        let center = (0..n).map(|i| 0.1 + 0.04 * i as f64).collect();
        Self::preset_with(n, format!("hyperbolic-ball:{n}"), true, center, move |x| {
            let r2 = sq(x);
            if r2 >= 1.0 {
                return Err(Error::Chart("point outside the Poincaré ball".into()));
            }
            let c = 2.0 / (1.0 - r2);
            Ok(conformal(n, c * c))
        })
    }

    /// `S^p(r1) × S^q(r2)`, each factor in stereographic coordinates.
    pub fn product_spheres(p: usize, q: usize, r1: f64, r2: f64) -> Result<Self> {
        if p < 2 || q < 2 {
            return Err(Error::InvalidInput("product factors need dimension ≥ 2".into()));
        }
        if !(r1 > 0.0 && r2 > 0.0) {
            return Err(Error::InvalidInput("radii must be positive".into()));
        }
        let n = p + q;
        let center = (0..n).map(|i| 0.15 + 0.05 * i as f64).collect();
        Self::preset_with(
            n,
            format!("product-spheres:{p}:{q}:{r1}:{r2}"),
            true,
            center,
            move |x| {
                let mut g = DMatrix::zeros(n, n);
                let c1 = 2.0 * r1 / (1.0 + sq(&x[..p]));
                let c2 = 2.0 * r2 / (1.0 + sq(&x[p..]));
                for i in 0..n {
                    g[(i, i)] = if i < p { c1 * c1 } else { c2 * c2 };
                }
                Ok(g)
            },
        )
    }

    /// A generic smooth perturbation of the flat metric, `δ + ε φ(x)`.
    ///
    /// Nothing is special about `φ`; it has non-vanishing Weyl tensor,
    /// divergence of Weyl and traceless Ricci at the default center.
    pub fn perturbed(n: usize, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps.abs() * 1.5 * n as f64 <= 0.9) {
            return Err(Error::InvalidInput(format!("|eps| too large for n = {n}")));
        }
        let center = (0..n).map(|i| 0.2 + 0.1 * i as f64).collect();
        Self::preset_with(n, format!("perturbed:{n}:{eps}"), false, center, move |x| {
            Ok(DMatrix::from_fn(n, n, |a, b| {
                let s = a + b;
                let p = a * b;
                let phase: f64 = 1.0
                    + s as f64
                    + x.iter()
                        .enumerate()
                        .map(|(c, xc)| (0.5 + 0.3 * ((s + 2 * c) % 5) as f64) * xc)
                        .sum::<f64>();
                let amp = 1.0 + 0.5 * (x[p % n] + 0.3 * p as f64).sin();
                let delta = if a == b { 1.0 } else { 0.0 };
                delta + eps * phase.cos() * amp
            }))
        })
    }

    /// Parses `euclidean:n`, `sphere-stereo:n`, `hyperbolic-ball:n`,
    /// `product-spheres:p:q:r1:r2` and `perturbed:n:eps`.
    pub fn preset(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        match parts.as_slice() {
            ["euclidean", n] => Self::euclidean(parse_usize(n, "dimension")?),
            ["sphere-stereo", n] => Self::sphere_stereo(parse_usize(n, "dimension")?),
            ["hyperbolic-ball", n] => Self::hyperbolic_ball(parse_usize(n, "dimension")?),
            ["product-spheres", p, q, r1, r2] => Self::product_spheres(
                parse_usize(p, "dimension")?,
                parse_usize(q, "dimension")?,
                parse_f64(r1, "radius")?,
                parse_f64(r2, "radius")?,
            ),
            ["perturbed", n, eps] => Self::perturbed(parse_usize(n, "dimension")?, parse_f64(eps, "eps")?),
            _ => Err(Error::Parse(format!("unknown chart preset '{spec}'"))),
        }
    }

    pub fn dim(&self) -> Dimension {
        self.n
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn is_harmonic_weyl(&self) -> bool {
        self.harmonic_weyl
    }

    pub fn default_center(&self) -> &[f64] {
        &self.default_center
    }

    /// `g(x)`, rejected unless symmetric and positive-definite.
    pub fn eval(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.n.get();
        if x.len() != n {
            return Err(Error::DimensionMismatch { left: x.len(), right: n });
        }
        let g = (self.eval)(x)?;
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::Chart(format!("metric evaluator returned {}×{}", g.nrows(), g.ncols())));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Chart("metric is not finite".into()));
        }
        let scale = g.amax().max(1.0);
        if (&g - g.transpose()).amax() > 1e-12 * scale {
            return Err(Error::Chart("metric is not symmetric".into()));
        }
        let min = g.clone().symmetric_eigenvalues().min();
        if min <= 0.0 {
            return Err(Error::Chart(format!("metric not positive-definite (λmin = {min:e})")));
        }
        Ok(g)
    }

    /// A copy of this metric that records every point it is evaluated at.
    pub fn recording(&self) -> (ChartMetric, Recorder) {
        let log: Recorder = Recorder(Arc::new(Mutex::new(Vec::new())));
        let inner = self.eval.clone();
        let sink = log.clone();
        let recorded = ChartMetric {
            eval: Arc::new(move |x: &[f64]| {
                let g = inner(x)?;
                sink.0.lock().expect("recorder poisoned").push((x.to_vec(), g.clone()));
                Ok(g)
            }),
            ..self.clone()
        };
        (recorded, log)
    }
}

#[derive(Clone, Default)]
pub struct Recorder(Arc<Mutex<Vec<(Vec<f64>, DMatrix<f64>)>>>);

impl Recorder {
    /// The recorded nodes as a grid file, duplicates removed, in first-seen order.
    pub fn to_grid_file(&self, n: Dimension, center: Vec<f64>, h: f64, order: u8) -> GridFile {
        let log = self.0.lock().expect("recorder poisoned");
        let mut seen = HashMap::new();
        let mut points = Vec::new();
        let mut metrics = Vec::new();
        for (x, g) in log.iter() {
            let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
            if seen.insert(key, ()).is_none() {
                points.push(x.clone());
                metrics.push(
                    (0..g.nrows())
                        .map(|i| (0..g.ncols()).map(|j| g[(i, j)]).collect())
                        .collect(),
                );
            }
        }
        GridFile {
            n: n.get(),
            center: Some(center),
            h: Some(h),
            order: Some(order),
            points,
            metrics,
        }
    }

    pub fn len(&self) -> usize {
        self.0.lock().expect("recorder poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// User metric sampled at explicit nodes. No interpolation: any stencil node
/// missing from the file is an error.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GridFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u8>,
    pub points: Vec<Vec<f64>>,
    pub metrics: Vec<Vec<Vec<f64>>>,
}

impl GridFile {
    pub fn into_metric(self, tag: impl Into<String>) -> Result<ChartMetric> {
        let n = Dimension::new(self.n)?;
        n.require_at_least(4, "chart metrics")?;
        if self.points.len() != self.metrics.len() {
            return Err(Error::Parse("points and metrics differ in length".into()));
        }
        let mut table = HashMap::with_capacity(self.points.len());
        for (p, m) in self.points.iter().zip(&self.metrics) {
            if p.len() != self.n || m.len() != self.n || m.iter().any(|row| row.len() != self.n) {
                return Err(Error::Parse("grid node has the wrong shape".into()));
            }
            let g = DMatrix::from_fn(self.n, self.n, |i, j| m[i][j]);
            table.insert(p.iter().map(|v| v.to_bits()).collect::<Vec<u64>>(), g);
        }
        let center = match self.center {
            Some(c) => c,
            None => self
                .points
                .first()
                .cloned()
                .ok_or_else(|| Error::Parse("grid file has no points".into()))?,
        };
        let points = self.points;
        ChartMetric::custom(n, tag, center, move |x| {
            let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
            if let Some(g) = table.get(&key) {
                return Ok(g.clone());
            }
            // tolerate coordinates that went through a decimal round trip
            let scale = 1e-12 * (1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max));
            points
                .iter()
                .find(|p| p.iter().zip(x).all(|(a, b)| (a - b).abs() <= scale))
                .and_then(|p| table.get(&p.iter().map(|v| v.to_bits()).collect::<Vec<u64>>()))
                .cloned()
                .ok_or_else(|| Error::Chart(format!("stencil node {x:?} is not in the grid file")))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for s in [
            "euclidean:4",
            "sphere-stereo:5",
            "hyperbolic-ball:4",
            "product-spheres:2:3:1:2",
            "perturbed:4:0.05",
        ] {
            let m = ChartMetric::preset(s).unwrap();
            assert!(m.eval(m.default_center()).is_ok(), "{s}");
        }
        assert!(!ChartMetric::preset("perturbed:4:0.05").unwrap().is_harmonic_weyl());
        assert!(ChartMetric::preset("torus:4").is_err());
        assert!(ChartMetric::preset("euclidean:3").is_err());
        assert!(ChartMetric::preset("product-spheres:1:3:1:1").is_err());
    }

    #[test]
    fn rejects_indefinite_and_out_of_domain() {
        let m = ChartMetric::custom(Dimension::new(4).unwrap(), "bad", vec![0.0; 4], |_| {
            Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0])))
        })
        .unwrap();
        assert!(m.eval(&[0.0; 4]).is_err());
        let h = ChartMetric::hyperbolic_ball(4).unwrap();
        assert!(h.eval(&[1.0, 0.0, 0.0, 0.0]).is_err());
    }
}
