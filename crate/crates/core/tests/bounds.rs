mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use weylbench::algebra::*;
use weylbench::bounds::verdict::{pinch_verdict_norm_scalar, pinch_verdict_pointwise_scalar};
use weylbench::bounds::*;
use weylbench::model_spaces::model_curvature;
use weylbench::sampling;

#[test]
fn wcubic_oracle_matches_closed_form() {
    for n in 2..=10 {
        for s in [0.5, 1.0, 2.0] {
            let closed = wcubic_closed_form(s, n).unwrap();
            let o = wcubic_oracle(s, n, 100_000, 1).unwrap();
            assert!(o.best <= closed + 1e-9, "n={n} s={s}: {} > {closed}", o.best);
            assert!(o.best >= closed - 1e-4, "n={n} s={s}");
            // the ascent alone must also find the maximum, and never beat it
            assert!(o.ascent_best <= closed + 1e-9 && o.ascent_best >= closed - 1e-4, "n={n} s={s}: ascent {}", o.ascent_best);
            assert!((o.kkt_best - closed).abs() <= 1e-12 * closed.max(1.0), "KKT point attains the bound");
        }
    }
}

#[test]
fn wcubic_named_examples() {
    assert!((wcubic_oracle(1.0, 3, 100_000, 2).unwrap().best - 0.5).abs() < 1e-4);
    assert!((wcubic_oracle(1.0, 5, 100_000, 2).unwrap().best - 0.75).abs() < 1e-4);
    assert!(wcubic_oracle(1.0, 2, 100_000, 2).unwrap().best.abs() < 1e-6);
    assert!(wcubic_oracle(1.0, 13, 100, 2).is_err());
}

#[test]
fn constants_examples() {
    let t6 = constants(6).unwrap();
    assert_close(t6.alpha.unwrap(), 0.6, 1e-12, "alpha(6)");
    assert_close(t6.a1.unwrap(), 6.0, 1e-12, "a1(6)");
    assert_close(t6.a2.unwrap(), 1.2 * (5.0f64 / 6.0).sqrt(), 1e-12, "a2(6)");
    assert!(t6.alpha_residual.unwrap().abs() <= 1e-10);
    assert_close(s_n(4), 1.0 / 6.0, 1e-15, "s_4");
    let big = constants(10_000).unwrap();
    let n = 10_000.0;
    assert!((big.a1.unwrap() / n - 1.25).abs() <= 0.025);
    assert!((big.alpha.unwrap() / n - 0.25).abs() <= 0.005);
    assert!((big.a2.unwrap() / n - 0.25).abs() <= 0.005);
    assert_close(c_n(5).unwrap(), 8.0 / 10f64.sqrt(), 1e-15, "c(5)");
    let t5 = constants(5).unwrap();
    assert_eq!(t5.alpha, Some(0.5));
    assert_close(t5.gap_coefficient.unwrap(), 3.0 / 16.0, 1e-15, "case5 coefficient");
    for n in 6..60 {
        let t = constants(n).unwrap();
        let a = t.alpha.unwrap();
        assert!(t.alpha_residual.unwrap().abs() <= 1e-10, "n = {n}");
        assert!(a > (n as f64 - 3.0) / (2.0 * (n as f64 - 1.0)), "n = {n}");
        assert_close(t.s_n, (n as f64 - 2.0) / (4.0 * (n as f64 - 1.0)), 1e-15, "s_n");
    }
}

#[test]
fn spectral_examples() {
    let w = model_curvature(&"product:sphere:2:1,sphere:2:1".parse().unwrap()).unwrap().weyl().unwrap();
    let ext = spectral_extremes(&w, &SymmetricForm2::zeros(dim(4))).unwrap();
    assert_close(ext.omega_max, 2.0 / 3.0, ALG, "ω of S2xS2");
    let b = berger_component_bound(&w).unwrap();
    assert!(b.holds);
    assert_close(b.bound, 8.0 / 9.0, ALG, "(4/3)(2/3)");

    for n in 4..8 {
        let t = 0.4;
        let mut d = vec![t; n];
        d[n - 1] = -(n as f64 - 1.0) * t;
        let e = SymmetricForm2::diagonal(dim(n), &d).unwrap();
        let ext = spectral_extremes(&CurvatureTensor::zeros(dim(n)), &e).unwrap();
        assert_close(ext.ell, (n as f64 - 1.0) * t, ALG, "ell");
        assert_close(ext.ell, ((n as f64 - 1.0) / n as f64).sqrt() * e.norm(), ALG, "eigenestimate equality");
    }
}

#[test]
fn cubic_bound_examples() {
    let mut r = sampling::rng(31, 0);
    for _ in 0..100 {
        let w = sampling::weyl(dim(5), &mut r);
        let c = cubic_bound_eval(&w).unwrap();
        assert_close(c.lhs, c.five_cubic.unwrap(), ALG, "⟨W,W²+W♯⟩ = 3⟨W,W²⟩ at n = 5");
        assert!(c.lhs <= 8.0 / 10f64.sqrt() * w.norm().powi(3));
        assert!(c.holds);
    }
}

#[test]
fn eigen_estimate_random() {
    let mut r = sampling::rng(32, 0);
    for m in 2..=10 {
        for _ in 0..200 {
            let o = sampling::orthogonal(m, &mut r);
            let d: Vec<f64> = (0..m).map(|i| ((i * 37 + m) % 11) as f64 - 5.0 + o[(0, i)]).collect();
            let mean = d.iter().sum::<f64>() / m as f64;
            let t = &o * DMatrix::from_diagonal(&DVector::from_iterator(m, d.iter().map(|x| x - mean))) * o.transpose();
            let t = (&t + t.transpose()) * 0.5;
            let (l, b) = eigen_estimate(&t).unwrap();
            assert!(l <= b * (1.0 + 1e-12));
        }
    }
}

#[test]
fn pointwise_verdict_examples() {
    let z5 = CurvatureTensor::zeros(dim(5));
    assert!(pinch_verdict_pointwise(&z5, &SymmetricForm2::zeros(dim(5)), 1.0).unwrap().satisfied);
    let sph = model_curvature(&"sphere:6:1".parse().unwrap()).unwrap();
    let v = pinch_verdict_pointwise(&sph.weyl().unwrap(), &sph.traceless_ricci(), sph.s).unwrap();
    assert!(v.satisfied && v.condition_value.abs() < ALG);
    assert_close(v.threshold, 5.0, ALG, "S/n on S^6");
    let p = model_curvature(&"product:sphere:3:1,sphere:2:1".parse().unwrap()).unwrap();
    let v = pinch_verdict_pointwise(&p.weyl().unwrap(), &p.traceless_ricci(), p.s).unwrap();
    assert!(v.condition_value > 0.0 && v.threshold > 0.0);
    let z4 = CurvatureTensor::zeros(dim(4));
    assert!(pinch_verdict_pointwise(&z4, &SymmetricForm2::zeros(dim(4)), 1.0).is_err());
    assert!(pinch_verdict_pointwise_scalar(4, 0.0, 0.0, 1.0).is_err());
}

#[test]
fn norm_verdict_examples() {
    assert!(pinch_verdict_norm_scalar(7, 0.0, 0.0, 0.5).unwrap().satisfied);
    let mut r = sampling::rng(33, 0);
    let w = sampling::weyl(dim(5), &mut r);
    let s = 5.0 * c_n(5).unwrap() * w.norm();
    let v = pinch_verdict_norm(&w, &SymmetricForm2::zeros(dim(5)), s).unwrap();
    assert!(v.satisfied && v.margin().abs() <= 1e-12 * s);
    let e = sampling::traceless_form(dim(6), &mut r).scale(10.0);
    let v = pinch_verdict_norm(&CurvatureTensor::zeros(dim(6)), &e, 1.0).unwrap();
    assert!(!v.satisfied);
}

#[test]
fn dim4_verdict_s2xs2() {
    let p = model_curvature(&"product:sphere:2:1,sphere:2:1".parse().unwrap()).unwrap();
    let w = p.weyl().unwrap();
    let omega = w.spectral_radius();
    assert!((6.0 * omega - p.s).abs() <= 1e-12);
    assert!(pinch_verdict_dim4(omega, p.s).unwrap().satisfied);
}

#[test]
fn integral_verdict_examples() {
    assert!(gap_verdict_integral(0.0, 0.0, 1.0, 6).unwrap().satisfied);
    let v = gap_verdict_integral(0.1, 0.1, 16.0, 5).unwrap();
    assert_close(v.condition_value, 0.8 / 10f64.sqrt() + 0.2 / 5f64.sqrt(), 1e-15, "case5 condition");
    assert_close(v.threshold, 3.0, 1e-15, "case5 threshold");
    assert!(v.satisfied);
    let ir = IntegralRigidity::evaluate(6, 0.1, 0.2, 2.0, 0.3).unwrap();
    assert_close(ir.c1, 10.0, 1e-15, "c1 = 2c(n)");
    assert_close(ir.consistent_d, ir.lhs / 2.0, 1e-15, "consistent d");
}
