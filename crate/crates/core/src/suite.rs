//! Randomized verification suites shared by the CLI and the acceptance tests.
//!
//! Every trial draws from its own ChaCha stream `(seed, stream)`, so results do
//! not depend on thread scheduling.

use nalgebra::{DMatrix, DVector, Matrix3};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{
    circ_prime, decompose, divergence, kn_derivative, kulkarni_nomizu, p_tensor, pure_cubics,
    q_tensor, ricci_contraction, second_bianchi, sharp, sharp_product, square, square_plus_sharp,
    tri, weyl_divergence_from_pq, Dimension, SymmetricForm2,
};
use crate::bounds::{berger_component_bound, cubic_bound_eval, eigen_estimate, wcubic_closed_form, wcubic_oracle};
use crate::dim4::{berger_normal_form, det_identities, e_circ_g_orthogonality, sharp_det_estimate, split_self_dual};
use crate::error::Result;
use crate::model_spaces::model_curvature;
use crate::report::Check;
use crate::sampling;
use crate::tol::{rel_diff, Tolerances};

/// Aggregate of one identity or bound over many trials.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteEntry {
    pub name: String,
    pub n: usize,
    pub trials: usize,
    /// Largest residual seen (relative unless stated in `detail`).
    pub worst: f64,
    pub tolerance: f64,
    pub violations: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl SuiteEntry {
    fn from_values(name: &str, n: usize, values: &[f64], tolerance: f64) -> Self {
        let violations = values.iter().filter(|v| !(**v <= tolerance)).count();
        let worst = values.iter().copied().fold(0.0_f64, |a, v| if v.is_nan() { f64::NAN } else { a.max(v) });
        SuiteEntry {
            name: name.to_string(),
            n,
            trials: values.len(),
            worst,
            tolerance,
            violations,
            passed: violations == 0,
            detail: None,
        }
    }

    fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn to_check(&self) -> Check {
        let c = Check {
            name: format!("{}[n={}]", self.name, self.n),
            passed: self.passed,
            value: self.worst,
            tolerance: self.tolerance,
            detail: None,
        };
        let d = format!("{} trials, {} violations", self.trials, self.violations);
        match &self.detail {
            Some(x) => c.with_detail(format!("{d}; {x}")),
            None => c.with_detail(d),
        }
    }
}

fn stream(n: usize, trial: usize, salt: u64) -> u64 {
    salt.wrapping_mul(1 << 40) ^ ((n as u64) << 32) ^ trial as u64
}

/// Column `k` of a trial-by-residual table.
fn column(rows: &[Vec<f64>], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k]).collect()
}

const IDENTITY_NAMES: [&str; 13] = [
    "selfadjoint",
    "pythagoras",
    "rc_square_plus_sharp",
    "tri_symmetry",
    "product_w_orthogonal",
    "product_w_square",
    "product_w_sharp",
    "circ_prime_norm",
    "bianchi_ricci",
    "bianchi_scalar",
    "bianchi_weyl",
    "weyl_divergence_pq",
    "pure_cubic",
];

fn identity_trial(d: Dimension, seed: u64, trial: usize) -> Result<(Vec<f64>, Option<f64>)> {
    let n = d.get();
    let mut r = sampling::rng(seed, stream(n, trial, 1));
    let g = SymmetricForm2::identity(d);
    let mut out = Vec::with_capacity(IDENTITY_NAMES.len());

    let rr = sampling::curvature(d, &mut r);
    let h = sampling::symmetric_form(d, &mut r);
    out.push(rel_diff(kulkarni_nomizu(&h, &g)?.inner(&rr)?, h.inner(&ricci_contraction(&rr))?));

    let dec = decompose(&rr)?;
    let parts = dec.weyl.norm_sq() + dec.e_part.norm_sq() + dec.s_part.norm_sq();
    out.push(rel_diff(rr.norm_sq(), parts));

    let w = sampling::weyl(d, &mut r);
    let wsq = w.norm_sq().max(1.0);
    out.push(ricci_contraction(&square_plus_sharp(&w)).norm() / wsq);

    let b = sampling::curvature(d, &mut r);
    let c = sampling::curvature(d, &mut r);
    let t0 = tri(&rr, &b, &c)?;
    let mut worst: f64 = 0.0;
    for v in [tri(&rr, &c, &b)?, tri(&b, &rr, &c)?, tri(&b, &c, &rr)?, tri(&c, &rr, &b)?, tri(&c, &b, &rr)?] {
        worst = worst.max(rel_diff(t0, v));
    }
    out.push(worst);

    let diag: Vec<f64> = (0..n).map(|i| sampling::symmetric_form(d, &mut r).get(i, i)).collect();
    let a = SymmetricForm2::diagonal(d, &diag)?;
    let ag = kulkarni_nomizu(&a, &g)?;
    let scale = (a.norm() * w.norm_sq()).max(1.0);
    out.push(ag.inner(&square_plus_sharp(&w))?.abs() / scale);
    let lhs = square(&w).inner(&ag)?;
    let mut brute = 0.0;
    for (i, ai) in diag.iter().enumerate() {
        for j in 0..n {
            for p in 0..n {
                for q in 0..n {
                    brute += ai * w.get(i, j, p, q).powi(2);
                }
            }
        }
    }
    out.push(rel_diff(lhs, 0.5 * brute));
    out.push(rel_diff(lhs, -w.inner(&sharp_product(&ag, &w)?)?));

    let tf = sampling::trace_free_two_form_one_form(d, &mut r);
    out.push(rel_diff(circ_prime(&tf)?.norm_sq(), (n as f64 - 3.0) * tf.norm_sq()));

    let dr = sampling::jet_derivative(d, &mut r);
    let drc = dr.ricci();
    let ds = dr.scalar();
    let p = p_tensor(&drc)?;
    let q = q_tensor(d, &ds)?;
    let b1 = second_bianchi(&kn_derivative(&drc)?);
    out.push(b1.sub(&circ_prime(&p)?)?.norm() / b1.norm().max(1.0));
    let sg: Vec<_> = ds.iter().map(|&x| g.scale(x)).collect();
    let b2 = second_bianchi(&kn_derivative(&sg)?);
    out.push(b2.sub(&circ_prime(&q)?.scale(-1.0))?.norm() / b2.norm().max(1.0));
    let dw = dr.weyl_part()?;
    let delta = divergence(&dw);
    let b3 = second_bianchi(&dw);
    out.push(b3.sub(&circ_prime(&delta)?.scale(1.0 / (n as f64 - 3.0)))?.norm() / b3.norm().max(1.0));
    out.push(delta.sub(&weyl_divergence_from_pq(&p, &q)?)?.norm() / delta.norm().max(1.0));

    let pm = sampling::pure_matrix(d, &mut r);
    let pc = pure_cubics(&pm);
    out.push(pc.identity_residual(n).abs() / pc.sharp_cubic.abs().max(1.0));

    let sharpcubic = if n <= 5 {
        Some(rel_diff(w.inner(&sharp(&w))?, 2.0 * w.inner(&square(&w))?))
    } else {
        None
    };
    Ok((out, sharpcubic))
}

/// The algebraic identity suite in dimension `n ≥ 4`.
///
/// Includes `⟨W,W♯⟩ = 2⟨W,W²⟩` for `n ∈ {4, 5}` at tolerance `sharpcubic`;
/// everything else is checked at `alg`.
pub fn identity_suite(n: usize, trials: usize, seed: u64, tol: &Tolerances) -> Result<Vec<SuiteEntry>> {
    let d = Dimension::new(n)?;
    d.require_at_least(4, "identity suite")?;
    let rows: Vec<(Vec<f64>, Option<f64>)> = (0..trials)
        .into_par_iter()
        .map(|t| identity_trial(d, seed, t))
        .collect::<Result<_>>()?;
    let table: Vec<Vec<f64>> = rows.iter().map(|r| r.0.clone()).collect();
    let mut out: Vec<SuiteEntry> = if trials == 0 {
        Vec::new()
    } else {
        IDENTITY_NAMES
            .iter()
            .enumerate()
            .map(|(k, name)| SuiteEntry::from_values(name, n, &column(&table, k), tol.get("alg")))
            .collect()
    };
    if trials > 0 && n <= 5 {
        let sc: Vec<f64> = rows.iter().filter_map(|r| r.1).collect();
        out.push(SuiteEntry::from_values("sharp_cubic", n, &sc, tol.get("sharpcubic")));
    }
    Ok(out)
}

/// Berger component bound and the cubic Weyl bounds on random Weyl tensors.
///
/// Residuals are `(lhs − bound)/max(1, |bound|)`; a trial violates when this
/// exceeds `alg`.
pub fn bounds_audit(n: usize, trials: usize, seed: u64, tol: &Tolerances) -> Result<Vec<SuiteEntry>> {
    let d = Dimension::new(n)?;
    d.require_at_least(4, "bounds audit")?;
    let rows: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = sampling::rng(seed, stream(n, t, 2));
            // spread the scale over several decades
            let s = 10f64.powf(sampling::symmetric_form(Dimension::new(3)?, &mut r).get(0, 1) * 2.0);
            let w = sampling::weyl(d, &mut r).scale(s);
            let b = berger_component_bound(&w)?;
            let mut row = vec![(b.max_component - b.bound) / b.bound.max(1.0)];
            if n >= 5 {
                let c = cubic_bound_eval(&w)?;
                let rel = |bound: f64| (c.lhs - bound) / bound.abs().max(1.0);
                row.push(rel(c.eig_bound));
                row.push(rel(c.norm_bound));
                if let Some(fb) = c.five_largest_bound {
                    row.push(rel(fb));
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    if trials == 0 {
        return Ok(Vec::new());
    }
    let mut names = vec!["berger_component"];
    if n >= 5 {
        names.push("eigenvalue_cubic_bound");
        names.push("norm_cubic_bound");
    }
    if n == 5 {
        names.push("largest_eigenvalue_cubic_bound");
    }
    Ok(names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            SuiteEntry::from_values(name, n, &column(&rows, k), tol.get("alg"))
                .with_detail("residual is (lhs − bound)/max(1,|bound|)")
        })
        .collect())
}

/// `max λ² ≤ ((m−1)/m)|T|²` on random trace-free matrices, and equality on
/// `diag(t, …, t, −(m−1)t)`.
pub fn eigen_estimate_audit(m: usize, trials: usize, seed: u64, tol: &Tolerances) -> Result<Vec<SuiteEntry>> {
    let random: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = sampling::rng(seed, stream(m, t, 3));
            let o = sampling::orthogonal(m, &mut r);
            let raw: Vec<f64> = (0..m).map(|i| o[(i, (i + 1) % m)] * 3.0).collect();
            let mean = raw.iter().sum::<f64>() / m as f64;
            let dvec = DVector::from_iterator(m, raw.iter().map(|x| x - mean));
            let t = &o * DMatrix::from_diagonal(&dvec) * o.transpose();
            let t = (&t + t.transpose()) * 0.5;
            let t = &t - DMatrix::identity(m, m) * (t.trace() / m as f64);
            let (l, b) = eigen_estimate(&t)?;
            Ok((l - b) / b.max(1.0))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    if trials > 0 {
        out.push(SuiteEntry::from_values("eigen_estimate", m, &random, tol.get("alg")));
    }
    let mut dg = vec![0.7; m];
    dg[m - 1] = -0.7 * (m as f64 - 1.0);
    let (l, b) = eigen_estimate(&DMatrix::from_diagonal(&DVector::from_vec(dg)))?;
    out.push(SuiteEntry::from_values("eigen_estimate_equality", m, &[rel_diff(l, b)], tol.get("equality")));
    Ok(out)
}

/// Multi-start oracle against the closed form `s(n−2)/(n−1)`.
pub fn wcubic_table(ns: &[usize], ss: &[f64], budget: u64, seed: u64, tol: &Tolerances) -> Result<Vec<SuiteEntry>> {
    let mut out = Vec::new();
    for &n in ns {
        for &s in ss {
            let closed = wcubic_closed_form(s, n)?;
            let o = wcubic_oracle(s, n, budget, seed)?;
            let below = closed - o.best;
            let above = o.best - closed;
            let passed = below <= tol.get("oracle_below") && above <= tol.get("oracle_above");
            out.push(SuiteEntry {
                name: format!("wcubic_oracle[s={s}]"),
                n,
                trials: 1,
                worst: (o.best - closed).abs(),
                tolerance: tol.get("oracle_below"),
                violations: usize::from(!passed),
                passed,
                detail: Some(format!(
                    "oracle {:.12} closed {:.12} ascent {:.12} kkt {:.12} evals {} converged {}",
                    o.best, closed, o.ascent_best, o.kkt_best, o.evaluations, o.converged
                )),
            });
        }
    }
    Ok(out)
}

/// Dimension-four checks: determinant identities, the `√6` estimate and its
/// equality case, `⟨E∘g, W²⟩ = 0`, split and normal-form round trips, and the
/// `S²×S²` borderline.
pub fn dim4_audit(trials: usize, samples: usize, seed: u64, tol: &Tolerances) -> Result<Vec<SuiteEntry>> {
    let d = Dimension::new(4)?;
    let rows: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = sampling::rng(seed, stream(4, t, 4));
            let w = sampling::weyl(d, &mut r);
            let sd = split_self_dual(&w)?;
            let mut row = Vec::new();
            for block in [&sd.wplus, &sd.wminus] {
                let di = det_identities(block)?;
                let sc = di.cube_sharp.abs().max(1.0);
                row.push((di.cube_sharp - 6.0 * di.det).abs() / sc);
                row.push((di.cube_dot - 3.0 * di.det).abs() / sc);
            }
            let e = sampling::traceless_form(d, &mut r);
            let ec = e_circ_g_orthogonality(&w, &e)?;
            row.push(ec.value.abs() / (e.norm() * w.norm_sq()).max(1.0));
            let scale = w.norm().max(1.0);
            row.push((sd.reassemble().matrix() - w.matrix()).amax() / scale);
            row.push(rel_diff(w.norm_sq(), sd.norm_plus_sq() + sd.norm_minus_sq()));
            row.push(berger_normal_form(&w)?.residual / scale);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let alg = tol.get("alg");
    let mut out = Vec::new();
    if trials > 0 {
        for (k, name) in [
            "det_sharp_plus",
            "det_square_plus",
            "det_sharp_minus",
            "det_square_minus",
            "e_circ_g_w_square",
            "self_dual_reassembly",
            "self_dual_pythagoras",
        ]
        .iter()
        .enumerate()
        {
            out.push(SuiteEntry::from_values(name, 4, &column(&rows, k), alg));
        }
        out.push(SuiteEntry::from_values("berger_normal_form", 4, &column(&rows, 7), tol.get("normal_form")));
    }

    let est: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|t| {
            let mut r = sampling::rng(seed, stream(4, t, 5));
            let w = sampling::weyl(d, &mut r);
            let sd = split_self_dual(&w)?;
            let (lhs, rhs) = sharp_det_estimate(&sd.wplus);
            Ok((lhs - rhs) / rhs.max(1.0))
        })
        .collect::<Result<_>>()?;
    if samples > 0 {
        out.push(SuiteEntry::from_values("sqrt6_det_estimate", 4, &est, alg));
    }
    let (lhs, rhs) = sharp_det_estimate(&Matrix3::from_diagonal(&nalgebra::Vector3::new(2.0, -1.0, -1.0)));
    out.push(SuiteEntry::from_values("sqrt6_equality", 4, &[rel_diff(lhs, rhs)], tol.get("equality")));

    let pkg = model_curvature(&"product:sphere:2:1,sphere:2:1".parse()?)?;
    let omega = pkg.weyl()?.spectral_radius();
    out.push(
        SuiteEntry::from_values("s2xs2_borderline", 4, &[(6.0 * omega - pkg.s).abs()], tol.get("equality"))
            .with_detail(format!("omega = {omega}, S = {}", pkg.s)),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass_and_are_deterministic() {
        let tol = Tolerances::default();
        let a = identity_suite(5, 4, 9, &tol).unwrap();
        let b = identity_suite(5, 4, 9, &tol).unwrap();
        assert!(a.iter().all(|e| e.passed), "{a:?}");
        assert_eq!(a.iter().map(|e| e.worst.to_bits()).collect::<Vec<_>>(), b.iter().map(|e| e.worst.to_bits()).collect::<Vec<_>>());
        assert!(identity_suite(4, 0, 0, &tol).unwrap().is_empty());
        assert!(bounds_audit(6, 8, 1, &tol).unwrap().iter().all(|e| e.passed));
        assert!(eigen_estimate_audit(4, 8, 1, &tol).unwrap().iter().all(|e| e.passed));
        assert!(dim4_audit(4, 16, 1, &tol).unwrap().iter().all(|e| e.passed));
        assert!(identity_suite(3, 1, 0, &tol).is_err());
    }
}
