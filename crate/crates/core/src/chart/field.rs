use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metric::ChartMetric;
use crate::algebra::{
    bianchi_project, circ_prime, decompose, divergence, kulkarni_nomizu, p_tensor, q_tensor,
    ricci_contraction, second_bianchi, square, square_plus_sharp, weyl_divergence_from_pq,
    AlgebraicOperator2Forms, CovDerivCurvature, CurvatureDecomposition, CurvatureTensor, Dimension,
    SymmetricForm2, ThreeTwoTensor, TwoFormOneForm,
};
use crate::error::{Error, Result};

/// Where and how finely the chart is differenced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: Vec<f64>,
    pub h: f64,
    /// Central-difference order, 2 or 4.
    pub order: u8,
    /// The scalar Laplacian of `|W|²` is differenced with step `outer_factor · h`
    /// on top of the inner stencils; a coarser outer step keeps the rounding in
    /// `|W|²` from being amplified by `1/h²`.
    pub outer_factor: f64,
}

pub const DEFAULT_H: f64 = 1e-3;
pub const DEFAULT_OUTER_FACTOR: f64 = 10.0;

impl GridSpec {
    pub fn new(center: Vec<f64>, h: f64, order: u8) -> Self {
        GridSpec {
            center,
            h,
            order,
            outer_factor: DEFAULT_OUTER_FACTOR,
        }
    }

    pub fn at_default_center(metric: &ChartMetric, h: f64, order: u8) -> Self {
        Self::new(metric.default_center().to_vec(), h, order)
    }

    pub fn validate(&self, n: Dimension) -> Result<()> {
        if self.center.len() != n.get() {
            return Err(Error::DimensionMismatch {
                left: self.center.len(),
                right: n.get(),
            });
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::InvalidInput("step h must be positive".into()));
        }
        if self.order != 2 && self.order != 4 {
            return Err(Error::InvalidInput(format!("stencil order {} (expected 2 or 4)", self.order)));
        }
        if !(self.outer_factor.is_finite() && self.outer_factor >= 1.0) {
            return Err(Error::InvalidInput("outer factor must be ≥ 1".into()));
        }
        Ok(())
    }
}

fn first_weights(order: u8) -> &'static [(i32, f64)] {
    if order == 4 {
        &[(-2, 1.0 / 12.0), (-1, -2.0 / 3.0), (1, 2.0 / 3.0), (2, -1.0 / 12.0)]
    } else {
        &[(-1, -0.5), (1, 0.5)]
    }
}

fn second_weights(order: u8) -> &'static [(i32, f64)] {
    if order == 4 {
        &[(-2, -1.0 / 12.0), (-1, 4.0 / 3.0), (0, -2.5), (1, 4.0 / 3.0), (2, -1.0 / 12.0)]
    } else {
        &[(-1, 1.0), (0, -2.0), (1, 1.0)]
    }
}

fn shifted(x: &[f64], m: usize, k: i32, step: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[m] += k as f64 * step;
    y
}

/// Coordinate-frame data at a point: metric, Christoffel symbols of the second
/// kind `Γ[l][i][j]` and the lowered curvature `R[i][j][k][l]`.
struct Point {
    g: DMatrix<f64>,
    ginv: DMatrix<f64>,
    gamma: Vec<f64>,
    r: Vec<f64>,
}

struct Calc<'a> {
    metric: &'a ChartMetric,
    n: usize,
    h: f64,
    order: u8,
}

impl<'a> Calc<'a> {
    fn partial<F>(&self, x: &[f64], m: usize, step: f64, f: &F) -> Result<Vec<f64>>
    where
        F: Fn(&[f64]) -> Result<Vec<f64>>,
    {
        let mut acc: Option<Vec<f64>> = None;
        for &(k, w) in first_weights(self.order) {
            let v = f(&shifted(x, m, k, step))?;
            let a = acc.get_or_insert_with(|| vec![0.0; v.len()]);
            for (ai, vi) in a.iter_mut().zip(&v) {
                *ai += w * vi;
            }
        }
        let mut out = acc.unwrap_or_default();
        for v in &mut out {
            *v /= step;
        }
        Ok(out)
    }

    fn g(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.metric.eval(x)
    }

    fn g_flat(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.g(x)?.as_slice().to_vec())
    }

    fn inverse(&self, g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        g.clone()
            .cholesky()
            .map(|c| c.inverse())
            .ok_or_else(|| Error::Chart("metric not positive-definite".into()))
    }

    fn christoffel_with(&self, x: &[f64], ginv: &DMatrix<f64>) -> Result<Vec<f64>> {
        let n = self.n;
        let dg: Vec<Vec<f64>> = (0..n)
            .map(|c| self.partial(x, c, self.h, &|y: &[f64]| self.g_flat(y)))
            .collect::<Result<_>>()?;
        // column-major flat g: g[a + b n]
        let d = |c: usize, a: usize, b: usize| dg[c][a + b * n];
        let mut first = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    first[(k * n + i) * n + j] = 0.5 * (d(i, j, k) + d(j, i, k) - d(k, i, j));
                }
            }
        }
        let mut gamma = vec![0.0; n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    gamma[(l * n + i) * n + j] = (0..n).map(|k| ginv[(l, k)] * first[(k * n + i) * n + j]).sum();
                }
            }
        }
        Ok(gamma)
    }

    fn christoffel(&self, x: &[f64]) -> Result<Vec<f64>> {
        let ginv = self.inverse(&self.g(x)?)?;
        self.christoffel_with(x, &ginv)
    }

    fn point(&self, x: &[f64]) -> Result<Point> {
        let n = self.n;
        let g = self.g(x)?;
        let ginv = self.inverse(&g)?;
        let gamma = self.christoffel_with(x, &ginv)?;
        let dgamma: Vec<Vec<f64>> = (0..n)
            .map(|i| self.partial(x, i, self.h, &|y: &[f64]| self.christoffel(y)))
            .collect::<Result<_>>()?;
        let gm = |l: usize, i: usize, j: usize| gamma[(l * n + i) * n + j];
        let dg = |c: usize, l: usize, i: usize, j: usize| dgamma[c][(l * n + i) * n + j];
        // R(∂i,∂j)∂k = R^m_ijk ∂m in the ∇_i∇_j − ∇_j∇_i − ∇_[i,j] sign, then
        // R_ijkl = −g_lm R^m_ijk.
        let mut up = vec![0.0; n * n * n * n];
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut v = dg(i, m, j, k) - dg(j, m, i, k);
                        for p in 0..n {
                            v += gm(m, i, p) * gm(p, j, k) - gm(m, j, p) * gm(p, i, k);
                        }
                        up[((m * n + i) * n + j) * n + k] = v;
                    }
                }
            }
        }
        let mut r = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        r[idx4(n, i, j, k, l)] =
                            -(0..n).map(|m| g[(l, m)] * up[((m * n + i) * n + j) * n + k]).sum::<f64>();
                    }
                }
            }
        }
        Ok(Point { g, ginv, gamma, r })
    }

    fn ricci_coord(&self, p: &Point) -> (Vec<f64>, f64) {
        let n = self.n;
        let mut rc = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let mut v = 0.0;
                for j in 0..n {
                    for l in 0..n {
                        v += p.ginv[(j, l)] * p.r[idx4(n, i, j, k, l)];
                    }
                }
                rc[i * n + k] = v;
            }
        }
        let s = (0..n).flat_map(|i| (0..n).map(move |k| (i, k))).map(|(i, k)| p.ginv[(i, k)] * rc[i * n + k]).sum();
        (rc, s)
    }

    fn weyl_coord(&self, p: &Point) -> Vec<f64> {
        let n = self.n;
        let nf = n as f64;
        let (rc, s) = self.ricci_coord(p);
        let g = &p.g;
        let kn = |h: &dyn Fn(usize, usize) -> f64, k: &dyn Fn(usize, usize) -> f64, i, j, a, b| {
            h(i, a) * k(j, b) + h(j, b) * k(i, a) - h(i, b) * k(j, a) - h(j, a) * k(i, b)
        };
        let rcf = |a: usize, b: usize| rc[a * n + b];
        let gf = |a: usize, b: usize| g[(a, b)];
        let mut w = p.r.clone();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        w[idx4(n, i, j, k, l)] += -kn(&rcf, &gf, i, j, k, l) / (nf - 2.0)
                            + s / (2.0 * (nf - 1.0) * (nf - 2.0)) * kn(&gf, &gf, i, j, k, l);
                    }
                }
            }
        }
        w
    }

    /// `|W|²` at `x`, in the operator normalization.
    fn weyl_norm_sq(&self, x: &[f64]) -> Result<f64> {
        let p = self.point(x)?;
        let w = self.weyl_coord(&p);
        let f = frame(&p.g)?;
        Ok(0.25 * to_frame(self.n, 4, &f, &w).iter().map(|v| v * v).sum::<f64>())
    }

    /// Coordinate `∇_m T_abcd` from `T`, its partial derivatives and `Γ`.
    fn nabla4(&self, gamma: &[f64], t: &[f64], dt: &[Vec<f64>]) -> Vec<f64> {
        let n = self.n;
        let gm = |l: usize, i: usize, j: usize| gamma[(l * n + i) * n + j];
        let mut out = vec![0.0; n.pow(5)];
        for m in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let mut v = dt[m][idx4(n, a, b, c, d)];
                            for s in 0..n {
                                v -= gm(s, m, a) * t[idx4(n, s, b, c, d)]
                                    + gm(s, m, b) * t[idx4(n, a, s, c, d)]
                                    + gm(s, m, c) * t[idx4(n, a, b, s, d)]
                                    + gm(s, m, d) * t[idx4(n, a, b, c, s)];
                            }
                            out[m * n.pow(4) + idx4(n, a, b, c, d)] = v;
                        }
                    }
                }
            }
        }
        out
    }

    /// Coordinate `∇_m Rc_ab`.
    fn nabla_ricci(&self, x: &[f64]) -> Result<(Point, Vec<f64>, Vec<f64>)> {
        let n = self.n;
        let p = self.point(x)?;
        let (rc, _) = self.ricci_coord(&p);
        let drc: Vec<Vec<f64>> = (0..n)
            .map(|m| self.partial(x, m, self.h, &|y: &[f64]| Ok(self.ricci_coord(&self.point(y)?).0)))
            .collect::<Result<_>>()?;
        let gm = |l: usize, i: usize, j: usize| p.gamma[(l * n + i) * n + j];
        let mut out = vec![0.0; n * n * n];
        for m in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let mut v = drc[m][a * n + b];
                    for s in 0..n {
                        v -= gm(s, m, a) * rc[s * n + b] + gm(s, m, b) * rc[a * n + s];
                    }
                    out[(m * n + a) * n + b] = v;
                }
            }
        }
        Ok((p, rc, out))
    }
}

#[inline]
fn idx4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

/// Gram–Schmidt of the coordinate frame: `e_i = Σ_a F[a,i] ∂_a` with `F = L^{-T}`,
/// `g = L Lᵀ`, so `e_i ∈ span(∂_1, …, ∂_i)`.
fn frame(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let l = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Chart("metric not positive-definite".into()))?
        .l();
    let n = g.nrows();
    let linv = l
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::Chart("singular Cholesky factor".into()))?;
    Ok(linv.transpose())
}

/// Contracts every slot of a rank-`rank` coordinate tensor with `F`.
fn to_frame(n: usize, rank: u32, f: &DMatrix<f64>, t: &[f64]) -> Vec<f64> {
    let mut cur = t.to_vec();
    let total = n.pow(rank);
    for slot in 0..rank {
        let stride = n.pow(rank - 1 - slot);
        let mut next = vec![0.0; total];
        for (flat, out) in next.iter_mut().enumerate() {
            let i = (flat / stride) % n;
            let base = flat - i * stride;
            *out = (0..n).map(|a| f[(a, i)] * cur[base + a * stride]).sum();
        }
        cur = next;
    }
    cur
}

fn operator_from_full(n: Dimension, t: &[f64]) -> AlgebraicOperator2Forms {
    let k = n.get();
    let at = |a: usize, b: usize, c: usize, d: usize| t[idx4(k, a, b, c, d)];
    let op = AlgebraicOperator2Forms::from_four_index(n, |i, j, p, q| {
        (at(i, j, p, q) - at(j, i, p, q) - at(i, j, q, p) + at(j, i, q, p) + at(p, q, i, j)
            - at(q, p, i, j)
            - at(p, q, j, i)
            + at(q, p, j, i))
            / 8.0
    });
    let m = op.matrix();
    let sym = (m + m.transpose()) * 0.5;
    AlgebraicOperator2Forms::from_matrix(n, sym).expect("symmetrized matrix")
}

/// Finite-difference curvature data at the grid center, in the Gram–Schmidt
/// orthonormal frame.
#[derive(Debug, Clone)]
pub struct ChartCurvatureField {
    pub tag: String,
    pub harmonic_weyl: bool,
    pub grid: GridSpec,
    /// Columns are the frame vectors in coordinates.
    pub frame: DMatrix<f64>,
    pub r: CurvatureTensor,
    pub ricci: SymmetricForm2,
    pub scalar: f64,
    pub decomposition: CurvatureDecomposition,
    pub nabla_r: CovDerivCurvature,
    pub nabla_w: CovDerivCurvature,
    pub delta_w: TwoFormOneForm,
    pub p: TwoFormOneForm,
    pub q: TwoFormOneForm,
    pub b_w: ThreeTwoTensor,
    pub b_r: ThreeTwoTensor,
    pub laplacian_weyl_norm_sq: f64,
    /// Size of the first-Bianchi component removed from `R` and `∇R`; only rounding.
    pub bianchi_defect: f64,
}

impl ChartCurvatureField {
    pub fn dim(&self) -> Dimension {
        self.r.dim()
    }

    pub fn weyl(&self) -> &CurvatureTensor {
        &self.decomposition.weyl
    }
}

pub fn curvature_field(metric: &ChartMetric, grid: &GridSpec) -> Result<ChartCurvatureField> {
    let dim = metric.dim();
    dim.require_at_least(4, "chart curvature field")?;
    grid.validate(dim)?;
    let n = dim.get();
    let calc = Calc {
        metric,
        n,
        h: grid.h,
        order: grid.order,
    };
    let x0 = &grid.center;
    let p0 = calc.point(x0)?;
    let f = frame(&p0.g)?;

    let (r, imb) = bianchi_project(&operator_from_full(dim, &to_frame(n, 4, &f, &p0.r)));
    let mut defect = imb.norm();
    let decomposition = decompose(&r)?;
    let ricci = ricci_contraction(&r);
    let scalar = ricci.trace();

    let dr: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|m| calc.partial(x0, m, grid.h, &|y: &[f64]| Ok(calc.point(y)?.r)))
        .collect::<Result<_>>()?;
    let nabla = to_frame(n, 5, &f, &calc.nabla4(&p0.gamma, &p0.r, &dr));
    let n4 = n.pow(4);
    let mut slices = Vec::with_capacity(n);
    for m in 0..n {
        let (kerb, imb) = bianchi_project(&operator_from_full(dim, &nabla[m * n4..(m + 1) * n4]));
        defect = defect.max(imb.norm());
        slices.push(kerb.into_operator());
    }
    let nabla_r = CovDerivCurvature::from_slices(slices)?;
    let nabla_w = nabla_r.weyl_part()?;
    let delta_w = divergence(&nabla_w);
    let p = p_tensor(&nabla_r.ricci())?;
    let q = q_tensor(dim, &nabla_r.scalar())?;
    let b_w = second_bianchi(&nabla_w);
    let b_r = second_bianchi(&nabla_r);
    let laplacian_weyl_norm_sq = laplacian(&calc, &p0, x0, grid.h * grid.outer_factor, &|y| calc.weyl_norm_sq(y))?;

    Ok(ChartCurvatureField {
        tag: metric.tag().to_string(),
        harmonic_weyl: metric.is_harmonic_weyl(),
        grid: grid.clone(),
        frame: f,
        r,
        ricci,
        scalar,
        decomposition,
        nabla_r,
        nabla_w,
        delta_w,
        p,
        q,
        b_w,
        b_r,
        laplacian_weyl_norm_sq,
        bianchi_defect: defect,
    })
}

/// Laplace–Beltrami `g^{ab}(∂_a∂_b u − Γ^c_ab ∂_c u)` by second differences of the scalar `u`.
fn laplacian<F>(calc: &Calc<'_>, p0: &Point, x0: &[f64], step: f64, u: &F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let n = calc.n;
    let order = calc.order;
    // every node of the Hessian and gradient stencils, evaluated once
    let mut nodes: Vec<Vec<f64>> = vec![x0.to_vec()];
    for a in 0..n {
        for &(k, _) in second_weights(order) {
            if k != 0 {
                nodes.push(shifted(x0, a, k, step));
            }
        }
        for b in (a + 1)..n {
            for &(ka, _) in first_weights(order) {
                for &(kb, _) in first_weights(order) {
                    nodes.push(shifted(&shifted(x0, a, ka, step), b, kb, step));
                }
            }
        }
    }
    let values: Vec<f64> = nodes.par_iter().map(|y| u(y)).collect::<Result<_>>()?;
    let mut it = values.into_iter();
    let u0 = it.next().expect("center value");
    let mut hess = DMatrix::zeros(n, n);
    let mut grad = vec![0.0; n];
    for a in 0..n {
        let mut second = 0.0;
        for &(k, w) in second_weights(order) {
            let v = if k == 0 { u0 } else { it.next().expect("axis node") };
            second += w * v;
            if let Some(&(_, w1)) = first_weights(order).iter().find(|(k1, _)| *k1 == k) {
                grad[a] += w1 * v / step;
            }
        }
        hess[(a, a)] = second / (step * step);
        for b in (a + 1)..n {
            let mut mixed = 0.0;
            for &(_, wa) in first_weights(order) {
                for &(_, wb) in first_weights(order) {
                    mixed += wa * wb * it.next().expect("mixed node");
                }
            }
            hess[(a, b)] = mixed / (step * step);
            hess[(b, a)] = hess[(a, b)];
        }
    }
    let mut lap = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut v = hess[(a, b)];
            for c in 0..n {
                v -= p0.gamma[(c * n + a) * n + b] * grad[c];
            }
            lap += p0.ginv[(a, b)] * v;
        }
    }
    Ok(lap)
}

/// The divergence, `P`, `Q` and second-Bianchi pieces with their residuals.
#[derive(Debug, Clone)]
pub struct WeylDerivativePack {
    pub delta_w: TwoFormOneForm,
    pub p: TwoFormOneForm,
    pub q: TwoFormOneForm,
    pub b_w: ThreeTwoTensor,
    pub b_r: ThreeTwoTensor,
    /// `−((n−3)/(n−2))(P + Q/(2(n−1)))`.
    pub delta_w_from_pq: TwoFormOneForm,
    /// `|δW − δW_from_pq|`.
    pub pq_residual: f64,
    /// `|B(W) − (δW)∘′g/(n−3)|`.
    pub circ_residual: f64,
    pub b_r_norm: f64,
}

pub fn weyl_derivative_pack(field: &ChartCurvatureField) -> Result<WeylDerivativePack> {
    let nf = field.dim().get() as f64;
    let delta_w_from_pq = weyl_divergence_from_pq(&field.p, &field.q)?;
    let pq_residual = field.delta_w.sub(&delta_w_from_pq)?.norm();
    let circ_residual = field
        .b_w
        .sub(&circ_prime(&field.delta_w)?.scale(1.0 / (nf - 3.0)))?
        .norm();
    Ok(WeylDerivativePack {
        delta_w: field.delta_w.clone(),
        p: field.p.clone(),
        q: field.q.clone(),
        b_w: field.b_w.clone(),
        b_r: field.b_r.clone(),
        delta_w_from_pq,
        pq_residual,
        circ_residual,
        b_r_norm: field.b_r.norm(),
    })
}

/// Named residuals of the first-order Weyl identities at the grid center.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityResiduals {
    pub values: BTreeMap<String, f64>,
    pub kato_classical_holds: bool,
    /// Only for presets tagged harmonic-Weyl.
    pub bochner: Option<f64>,
}

impl IdentityResiduals {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}

/// `Δ|W|² − 2|∇W|² + 4⟨W,W²+W♯⟩ − 2⟨Rc∘g,W²⟩`; refused unless the preset
/// is tagged harmonic-Weyl.
pub fn bochner_residual(field: &ChartCurvatureField) -> Result<f64> {
    if !field.harmonic_weyl {
        return Err(Error::NotApplicable(format!(
            "'{}' is not tagged harmonic-Weyl; the pointwise Bochner identity is not implied",
            field.tag
        )));
    }
    let w = field.weyl();
    let g = SymmetricForm2::identity(field.dim());
    let cubic = w.inner(&square_plus_sharp(w))?;
    let rcg = kulkarni_nomizu(&field.ricci, &g)?.inner(&square(w))?;
    Ok(field.laplacian_weyl_norm_sq - 2.0 * field.nabla_w.norm_sq() + 4.0 * cubic - 2.0 * rcg)
}

pub fn identity_residual_report(field: &ChartCurvatureField) -> Result<IdentityResiduals> {
    let nf = field.dim().get() as f64;
    let pack = weyl_derivative_pack(field)?;
    let nabla_w_sq = field.nabla_w.norm_sq();
    let grad_norm_sq = field.nabla_w.gradient_of_norm_sq(field.weyl())?;
    let bw_sq = field.b_w.norm_sq();
    let dw_sq = field.delta_w.norm_sq();
    let mut v = BTreeMap::new();
    v.insert("b_w_circ_prime".to_string(), pack.circ_residual);
    v.insert("b_w_norm_identity".to_string(), bw_sq - dw_sq / (nf - 3.0));
    v.insert("b_w_three_bound_margin".to_string(), 3.0 * nabla_w_sq - bw_sq);
    v.insert("b_r".to_string(), pack.b_r_norm);
    v.insert("delta_w_pq".to_string(), pack.pq_residual);
    v.insert("delta_w_norm".to_string(), dw_sq.sqrt());
    v.insert("nabla_w_norm_sq".to_string(), nabla_w_sq);
    v.insert("grad_weyl_norm_sq".to_string(), grad_norm_sq);
    v.insert("kato_classical_margin".to_string(), nabla_w_sq - grad_norm_sq);
    v.insert(
        "kato_improved_margin".to_string(),
        nabla_w_sq - (nf + 1.0) / (nf - 1.0) * grad_norm_sq,
    );
    v.insert("bianchi_defect".to_string(), field.bianchi_defect);
    let bochner = if field.harmonic_weyl {
        let b = bochner_residual(field)?;
        v.insert("bochner".to_string(), b);
        Some(b)
    } else {
        None
    };
    Ok(IdentityResiduals {
        kato_classical_holds: nabla_w_sq - grad_norm_sq >= -crate::tol::ALG * nabla_w_sq.max(1.0),
        values: v,
        bochner,
    })
}

/// Commutator of second covariant derivatives of `Rc` against the curvature
/// action, both in the orthonormal frame at the center.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RicciIdentityResidual {
    /// `|∇²_{m,p}Rc − ∇²_{p,m}Rc − (R(·,·,·,e_k)Rc + …)|`, full-tensor norm.
    pub residual: f64,
    /// Norm of the curvature side alone.
    pub curvature_side: f64,
}

pub fn ricci_identity_residual(metric: &ChartMetric, grid: &GridSpec) -> Result<RicciIdentityResidual> {
    let dim = metric.dim();
    dim.require_at_least(4, "Ricci identity")?;
    grid.validate(dim)?;
    let n = dim.get();
    let calc = Calc {
        metric,
        n,
        h: grid.h,
        order: grid.order,
    };
    let x0 = &grid.center;
    let (p0, rc0, nrc0) = calc.nabla_ricci(x0)?;
    let outer = grid.h;
    let dn: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|m| calc.partial(x0, m, outer, &|y: &[f64]| Ok(calc.nabla_ricci(y)?.2)))
        .collect::<Result<_>>()?;
    let gm = |l: usize, i: usize, j: usize| p0.gamma[(l * n + i) * n + j];
    let nr = |p: usize, a: usize, b: usize| nrc0[(p * n + a) * n + b];
    let second = |m: usize, p: usize, a: usize, b: usize| {
        let mut v = dn[m][(p * n + a) * n + b];
        for s in 0..n {
            v -= gm(s, m, p) * nr(s, a, b) + gm(s, m, a) * nr(p, s, b) + gm(s, m, b) * nr(p, a, s);
        }
        v
    };
    // raised Ricci on the second slot: Rc^k_b = g^{ks} Rc_sb
    let rc_up = |k: usize, b: usize| (0..n).map(|s| p0.ginv[(k, s)] * rc0[s * n + b]).sum::<f64>();
    let mut diff = vec![0.0; n.pow(4)];
    let mut rhs = vec![0.0; n.pow(4)];
    for m in 0..n {
        for p in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let c = second(m, p, a, b) - second(p, m, a, b);
                    let mut r = 0.0;
                    for k in 0..n {
                        r += p0.r[idx4(n, m, p, a, k)] * rc_up(k, b) + p0.r[idx4(n, m, p, b, k)] * rc_up(k, a);
                    }
                    diff[idx4(n, m, p, a, b)] = c - r;
                    rhs[idx4(n, m, p, a, b)] = r;
                }
            }
        }
    }
    let f = frame(&p0.g)?;
    let norm = |t: &[f64]| to_frame(n, 4, &f, t).iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(RicciIdentityResidual {
        residual: norm(&diff),
        curvature_side: norm(&rhs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_is_orthonormal_and_triangular() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.1]);
        let f = frame(&g).unwrap();
        let id = f.transpose() * &g * &f;
        assert!((id - DMatrix::<f64>::identity(3, 3)).amax() < 1e-14);
        for i in 0..3 {
            for a in (i + 1)..3 {
                assert_eq!(f[(a, i)], 0.0);
            }
        }
    }

    #[test]
    fn to_frame_matches_explicit_contraction() {
        let n = 3;
        let t: Vec<f64> = (0..n * n).map(|i| (i as f64 * 0.37).sin()).collect();
        let f = DMatrix::from_fn(n, n, |a, b| ((a * 3 + b) as f64 * 0.11).cos());
        let out = to_frame(n, 2, &f, &t);
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        v += f[(a, i)] * f[(b, j)] * t[a * n + b];
                    }
                }
                assert!((out[i * n + j] - v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn grid_validation() {
        let d = Dimension::new(4).unwrap();
        assert!(GridSpec::new(vec![0.0; 4], 1e-3, 2).validate(d).is_ok());
        assert!(GridSpec::new(vec![0.0; 4], 1e-3, 3).validate(d).is_err());
        assert!(GridSpec::new(vec![0.0; 4], 0.0, 2).validate(d).is_err());
        assert!(GridSpec::new(vec![0.0; 3], 1e-3, 2).validate(d).is_err());
    }

    #[test]
    fn euclidean_field_vanishes() {
        let m = ChartMetric::euclidean(4).unwrap();
        let f = curvature_field(&m, &GridSpec::at_default_center(&m, 1e-3, 2)).unwrap();
        assert!(f.r.norm() <= 1e-12);
        assert!(f.nabla_r.norm() <= 1e-12);
        assert!(f.laplacian_weyl_norm_sq.abs() <= 1e-12);
    }
}
