//! Curvature of homogeneous model spaces at a point, in an adapted orthonormal frame.
//!
//! Every entry is locally symmetric (∇R = 0), so the Bochner-type identities
//! collapse to algebraic equations that can be checked exactly.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::{
    decompose, kulkarni_nomizu, quadratic_forms, ricci_contraction, square, square_plus_sharp,
    AlgebraicOperator2Forms, CurvatureTensor, Dimension, SymmetricForm2, TwoFormIndexing,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    Sphere,
    Hyperbolic,
}

/// A constant-curvature factor of dimension `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Factor {
    pub kind: FactorKind,
    pub n: usize,
    pub radius: f64,
}

impl Factor {
    pub fn sectional(&self) -> f64 {
        let k = 1.0 / (self.radius * self.radius);
        match self.kind {
            FactorKind::Sphere => k,
            FactorKind::Hyperbolic => -k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Sphere { n: usize, radius: f64 },
    Hyperbolic { n: usize, radius: f64 },
    Euclidean { n: usize },
    Product { factors: Vec<Factor> },
    FubiniStudy { complex_dim: usize },
}

impl ModelSpec {
    pub fn dimension(&self) -> usize {
        match self {
            ModelSpec::Sphere { n, .. } | ModelSpec::Hyperbolic { n, .. } | ModelSpec::Euclidean { n } => *n,
            ModelSpec::Product { factors } => factors.iter().map(|f| f.n).sum(),
            ModelSpec::FubiniStudy { complex_dim } => 2 * complex_dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad_radius = |r: f64| !(r.is_finite() && r > 0.0);
        match self {
            ModelSpec::Sphere { radius, .. } | ModelSpec::Hyperbolic { radius, .. } if bad_radius(*radius) => {
                return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")))
            }
            ModelSpec::Product { factors } => {
                if factors.len() < 2 {
                    return Err(Error::InvalidInput("a product needs at least two factors".into()));
                }
                for f in factors {
                    if f.n < 2 {
                        return Err(Error::InvalidInput("product factors must have dimension >= 2".into()));
                    }
                    if bad_radius(f.radius) {
                        return Err(Error::InvalidInput(format!("radius must be positive, got {}", f.radius)));
                    }
                }
            }
            ModelSpec::FubiniStudy { complex_dim } if *complex_dim < 2 => {
                return Err(Error::InvalidInput("Fubini-Study needs complex dimension >= 2".into()))
            }
            _ => {}
        }
        Dimension::new(self.dimension()).map(|_| ())
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} {s:?}")))
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} {s:?}")))
}

fn parse_factor(s: &str) -> Result<Factor> {
    let parts: Vec<&str> = s.split(':').collect();
    let kind = match parts.first().map(|k| k.trim()) {
        Some("sphere") => FactorKind::Sphere,
        Some("hyperbolic") => FactorKind::Hyperbolic,
        _ => return Err(Error::Parse(format!("unknown product factor {s:?}"))),
    };
    let n = parts.get(1).ok_or_else(|| Error::Parse(format!("factor {s:?} lacks a dimension")))?;
    let radius = parts.get(2).map_or(Ok(1.0), |r| parse_f64(r, "radius"))?;
    if parts.len() > 3 {
        return Err(Error::Parse(format!("trailing fields in factor {s:?}")));
    }
    Ok(Factor {
        kind,
        n: parse_usize(n, "dimension")?,
        radius,
    })
}

/// Parses `sphere:4:1.0`, `hyperbolic:5:1`, `euclidean:4`,
/// `product:sphere:2:1.0,sphere:2:1.0` and `fubini-study:2`.
impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').ok_or_else(|| Error::Parse(format!("bad model spec {s:?}")))?;
        let spec = match head {
            "sphere" | "hyperbolic" => {
                let f = parse_factor(s)?;
                if f.kind == FactorKind::Sphere {
                    ModelSpec::Sphere { n: f.n, radius: f.radius }
                } else {
                    ModelSpec::Hyperbolic { n: f.n, radius: f.radius }
                }
            }
            "euclidean" => ModelSpec::Euclidean {
                n: parse_usize(rest, "dimension")?,
            },
            "product" => ModelSpec::Product {
                factors: rest.split(',').map(parse_factor).collect::<Result<_>>()?,
            },
            "fubini-study" | "fubini_study" | "cp" => ModelSpec::FubiniStudy {
                complex_dim: parse_usize(rest, "complex dimension")?,
            },
            _ => return Err(Error::Parse(format!("unknown model {head:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factor = |x: &Factor| {
            let k = match x.kind {
                FactorKind::Sphere => "sphere",
                FactorKind::Hyperbolic => "hyperbolic",
            };
            format!("{k}:{}:{}", x.n, x.radius)
        };
        match self {
            ModelSpec::Sphere { n, radius } => write!(f, "sphere:{n}:{radius}"),
            ModelSpec::Hyperbolic { n, radius } => write!(f, "hyperbolic:{n}:{radius}"),
            ModelSpec::Euclidean { n } => write!(f, "euclidean:{n}"),
            ModelSpec::Product { factors } => {
                write!(f, "product:{}", factors.iter().map(factor).collect::<Vec<_>>().join(","))
            }
            ModelSpec::FubiniStudy { complex_dim } => write!(f, "fubini-study:{complex_dim}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePackage {
    pub spec: ModelSpec,
    pub r: CurvatureTensor,
    pub rc: SymmetricForm2,
    pub s: f64,
    pub is_locally_symmetric: bool,
}

pub fn model_curvature(spec: &ModelSpec) -> Result<CurvaturePackage> {
    spec.validate()?;
    let n = Dimension::new(spec.dimension())?;
    let r = match spec {
        ModelSpec::Sphere { radius, .. } => CurvatureTensor::identity(n).scale(1.0 / (radius * radius)),
        ModelSpec::Hyperbolic { radius, .. } => CurvatureTensor::identity(n).scale(-1.0 / (radius * radius)),
        ModelSpec::Euclidean { .. } => CurvatureTensor::zeros(n),
        ModelSpec::Product { factors } => product_curvature(n, factors)?,
        ModelSpec::FubiniStudy { complex_dim } => fubini_study(n, *complex_dim)?,
    };
    let rc = ricci_contraction(&r);
    let s = rc.trace();
    Ok(CurvaturePackage {
        spec: spec.clone(),
        r,
        rc,
        s,
        is_locally_symmetric: true,
    })
}

/// Block sum: a plane inside one factor has that factor's curvature, mixed planes are flat.
fn product_curvature(n: Dimension, factors: &[Factor]) -> Result<CurvatureTensor> {
    let mut owner = Vec::with_capacity(n.get());
    for (f, fac) in factors.iter().enumerate() {
        owner.extend(std::iter::repeat(f).take(fac.n));
    }
    let idx = TwoFormIndexing::new(n);
    let diag: Vec<f64> = idx
        .pairs()
        .iter()
        .map(|&(i, j)| if owner[i] == owner[j] { factors[owner[i]].sectional() } else { 0.0 })
        .collect();
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    CurvatureTensor::from_matrix(n, m)
}

/// Holomorphic sectional curvature 4:
/// `R_ijkl = δ_ik δ_jl − δ_il δ_jk + J_ik J_jl − J_il J_jk + 2 J_ij J_kl`.
fn fubini_study(n: Dimension, m: usize) -> Result<CurvatureTensor> {
    let mut j = DMatrix::zeros(2 * m, 2 * m);
    for b in 0..m {
        j[(2 * b + 1, 2 * b)] = 1.0;
        j[(2 * b, 2 * b + 1)] = -1.0;
    }
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let op = AlgebraicOperator2Forms::from_four_index(n, |a, b, c, e| {
        d(a, c) * d(b, e) - d(a, e) * d(b, c) + j[(a, c)] * j[(b, e)] - j[(a, e)] * j[(b, c)]
            + 2.0 * j[(a, b)] * j[(c, e)]
    });
    CurvatureTensor::new(op)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PackageConsistency {
    pub ricci: f64,
    pub trace: f64,
    pub bianchi: f64,
    pub pythagoras: f64,
}

impl CurvaturePackage {
    pub fn dim(&self) -> Dimension {
        self.r.dim()
    }

    /// Weyl part; identically zero in dimension three.
    pub fn weyl(&self) -> Result<CurvatureTensor> {
        if self.dim().get() < 4 {
            return Ok(CurvatureTensor::zeros(self.dim()));
        }
        Ok(decompose(&self.r)?.weyl)
    }

    pub fn traceless_ricci(&self) -> SymmetricForm2 {
        self.rc.traceless()
    }

    pub fn consistency(&self) -> Result<PackageConsistency> {
        let n = self.dim().get() as f64;
        let ricci = ricci_contraction(&self.r).sub(&self.rc)?.norm();
        let trace = (self.rc.trace() - self.s).abs();
        let w = self.weyl()?;
        let e = self.traceless_ricci();
        let pyth = if n >= 4.0 {
            (self.r.norm_sq() - w.norm_sq() - self.s * self.s / (2.0 * n * (n - 1.0)) - e.norm_sq() / (n - 2.0)).abs()
        } else {
            0.0
        };
        Ok(PackageConsistency {
            ricci,
            trace,
            bianchi: self.r.bianchi_residual(),
            pythagoras: pyth,
        })
    }
}

/// Residuals of the Bochner identities after `∇R = 0` kills every derivative term.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SymmetricSpaceResiduals {
    /// `2⟨W, W²+W♯⟩ − ⟨Rc∘g, W²⟩`.
    pub r1: f64,
    /// `W(E,E) − (n/(n−2)) E³ − S|E|²/(n−1)`.
    pub r2: f64,
    pub weyl_cubic: f64,
    pub ricci_weyl_square: f64,
    pub w_ee: f64,
    pub e_cubed: f64,
    pub e_norm_sq: f64,
    pub s: f64,
}

pub fn symmetric_space_identity_report(pkg: &CurvaturePackage) -> Result<SymmetricSpaceResiduals> {
    if !pkg.is_locally_symmetric {
        return Err(Error::NotApplicable(
            "the degenerate Bochner identities need a locally symmetric package".into(),
        ));
    }
    let n = pkg.dim();
    let nf = n.get() as f64;
    let w = pkg.weyl()?;
    let e = pkg.traceless_ricci();
    let g = SymmetricForm2::identity(n);
    let weyl_cubic = w.inner(&square_plus_sharp(&w))?;
    let ricci_weyl_square = kulkarni_nomizu(&pkg.rc, &g)?.inner(&square(&w))?;
    let q = quadratic_forms(&w, &e)?;
    let e2 = e.norm_sq();
    Ok(SymmetricSpaceResiduals {
        r1: 2.0 * weyl_cubic - ricci_weyl_square,
        r2: q.w_aa - nf / (nf - 2.0) * q.a_cubed - pkg.s * e2 / (nf - 1.0),
        weyl_cubic,
        ricci_weyl_square,
        w_ee: q.w_aa,
        e_cubed: q.a_cubed,
        e_norm_sq: e2,
        s: pkg.s,
    })
}
