mod common;

use common::*;
use proptest::prelude::*;
use weylbench::algebra::*;
use weylbench::sampling;

fn kn_oracle(h: &SymmetricForm2, k: &SymmetricForm2, i: usize, j: usize, p: usize, q: usize) -> f64 {
    h.get(i, p) * k.get(j, q) + k.get(i, p) * h.get(j, q) - h.get(i, q) * k.get(j, p) - k.get(i, q) * h.get(j, p)
}

#[test]
fn kn_example_in_dimension_three() {
    let g = SymmetricForm2::identity(dim(3));
    let gg = kulkarni_nomizu(&g, &g).unwrap();
    assert_eq!(gg.get(0, 1, 0, 1), 2.0);
}

#[test]
fn kn_matches_four_index_oracle() {
    for n in 3..8 {
        let mut r = sampling::rng(11, n as u64);
        let h = sampling::symmetric_form(dim(n), &mut r);
        let k = sampling::symmetric_form(dim(n), &mut r);
        let hk = kulkarni_nomizu(&h, &k).unwrap();
        let kh = kulkarni_nomizu(&k, &h).unwrap();
        assert!(op_diff(&hk, &kh) < 1e-15);
        assert!(hk.bianchi_residual() < 1e-13);
        for i in 0..n {
            for j in 0..n {
                for p in 0..n {
                    for q in 0..n {
                        assert!((hk.get(i, j, p, q) - kn_oracle(&h, &k, i, j, p, q)).abs() < 1e-14);
                    }
                }
            }
        }
    }
}

#[test]
fn half_g_circ_g_is_identity() {
    for n in 3..9 {
        let g = SymmetricForm2::identity(dim(n));
        let id = kulkarni_nomizu(&g, &g).unwrap().scale(0.5);
        assert_eq!(id.as_operator(), &AlgebraicOperator2Forms::identity(dim(n)));
        assert_close(id.norm_sq(), (n * (n - 1) / 2) as f64, 1e-15, "|Id|^2 = N");
    }
    let rc = ricci_contraction(&AlgebraicOperator2Forms::identity(dim(4)));
    assert_eq!(rc, SymmetricForm2::identity(dim(4)).scale(3.0));
}

#[test]
fn mismatched_dimensions_are_errors() {
    let a = AlgebraicOperator2Forms::identity(dim(4));
    let b = AlgebraicOperator2Forms::identity(dim(5));
    assert!(a.inner(&b).is_err());
    assert!(dot_product(&a, &b).is_err());
    assert!(sharp_product(&a, &b).is_err());
    assert!(tri(&a, &a, &b).is_err());
    let g4 = SymmetricForm2::identity(dim(4));
    let g5 = SymmetricForm2::identity(dim(5));
    assert!(kulkarni_nomizu(&g4, &g5).is_err());
}

#[test]
fn inner_product_normalization() {
    let mut r = sampling::rng(3, 0);
    for n in 4..8 {
        let a = sampling::curvature(dim(n), &mut r);
        let b = sampling::curvature(dim(n), &mut r);
        assert_close(a.inner(&b).unwrap(), brute_inner(&a, &b), ALG, "inner vs full sum");
        let full_sq: f64 = full(&a).iter().map(|x| x * x).sum();
        assert_close(full_sq, 4.0 * a.norm_sq(), ALG, "full sum is four times the operator norm");
        assert_eq!(a.inner(&AlgebraicOperator2Forms::zeros(dim(n))).unwrap(), 0.0);
    }
}

#[test]
fn dot_matches_six_loop_oracle() {
    let mut r = sampling::rng(5, 0);
    for n in 4..7 {
        let a = sampling::symmetric_operator(dim(n), &mut r);
        let b = sampling::symmetric_operator(dim(n), &mut r);
        let ab = dot_product(&a, &b).unwrap();
        let (fa, fb) = (full(&a), full(&b));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = 0.0;
                        for p in 0..n {
                            for q in 0..n {
                                s += at(&fa, n, i, j, p, q) * at(&fb, n, k, l, p, q);
                            }
                        }
                        assert!((ab.get(i, j, k, l) - 0.5 * s).abs() < 1e-12);
                    }
                }
            }
        }
        let id = AlgebraicOperator2Forms::identity(dim(n));
        assert_eq!(dot_product(&id, &id).unwrap(), id);
        assert_eq!(dot_product(&a, &AlgebraicOperator2Forms::zeros(dim(n))).unwrap().norm(), 0.0);
    }
}

#[test]
fn sharp_identities() {
    let mut r = sampling::rng(6, 0);
    for n in 4..8 {
        let a = sampling::curvature(dim(n), &mut r);
        let b = sampling::curvature(dim(n), &mut r);
        let ab = sharp_product(&a, &b).unwrap();
        let ba = sharp_product(&b, &a).unwrap();
        assert!(op_diff(&ab, &ba) < ALG, "commutativity");
        assert!(ab.is_self_adjoint(ALG));
        let z = sharp_product(&a, &AlgebraicOperator2Forms::zeros(dim(n))).unwrap();
        assert_eq!(z.norm(), 0.0);

        // ⟨W, R♯W⟩ = (1/2) Σ W_ijkl W_jplq R_ipkq
        let w = sampling::weyl(dim(n), &mut r);
        let (fw, fa) = (full(&w), full(&a));
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let wijkl = at(&fw, n, i, j, k, l);
                        if wijkl == 0.0 {
                            continue;
                        }
                        for p in 0..n {
                            for q in 0..n {
                                s += wijkl * at(&fw, n, j, p, l, q) * at(&fa, n, i, p, k, q);
                            }
                        }
                    }
                }
            }
        }
        let lhs = w.inner(&sharp_product(&a, &w).unwrap()).unwrap();
        assert_close(lhs, 0.5 * s, ALG, "⟨W,R♯W⟩ contraction");
    }
}

#[test]
fn sharp_of_sphere() {
    for n in 3..8 {
        let id = AlgebraicOperator2Forms::identity(dim(n));
        assert!(op_diff(&sharp(&id), &id.scale((n - 2) as f64)) < 1e-13);
    }
}

#[test]
fn bianchi_projection_examples() {
    let mut r = sampling::rng(8, 0);
    for n in 4..8 {
        let h = sampling::symmetric_form(dim(n), &mut r);
        let k = sampling::symmetric_form(dim(n), &mut r);
        let (_, imb) = bianchi_project(&kulkarni_nomizu(&h, &k).unwrap());
        assert!(imb.norm() < 1e-13);

        let c = sampling::curvature(dim(n), &mut r);
        let (kerb, imb) = bianchi_project(&c);
        assert!(op_diff(&kerb, &c) < 1e-13);
        assert!(imb.norm() < 1e-13);

        let t = sampling::symmetric_operator(dim(n), &mut r);
        let (kerb, imb) = bianchi_project(&t);
        assert!(op_diff(&(&*kerb + &imb), &t) < 1e-14);
        assert!(kerb.bianchi_residual() < ALG);
        assert_close(t.norm_sq(), kerb.norm_sq() + imb.norm_sq(), ALG, "Pythagoras for b");
        assert!(kerb.inner(&imb).unwrap().abs() < ALG);
        let (again, rest) = bianchi_project(&kerb);
        assert!(op_diff(&again, &kerb) < 1e-14 && rest.norm() < 1e-14);
        assert!(CurvatureTensor::new(kerb.into_operator()).is_ok());
    }
}

#[test]
fn decomposition_examples() {
    let s = CurvatureTensor::identity(dim(4));
    let d = decompose(&s).unwrap();
    assert!(d.weyl.norm() < 1e-14 && d.traceless_ricci.norm() < 1e-14);
    assert_close(d.scalar, 12.0, 1e-15, "S of the unit 4-sphere");

    let mut r = sampling::rng(9, 0);
    for n in 4..8 {
        let c = sampling::curvature(dim(n), &mut r);
        let d = decompose(&c).unwrap();
        let nf = n as f64;
        assert_close(
            c.norm_sq(),
            d.weyl.norm_sq() + d.scalar.powi(2) / (2.0 * nf * (nf - 1.0)) + d.traceless_ricci.norm_sq() / (nf - 2.0),
            ALG,
            "|R|^2 = |W|^2 + |U|^2 + |V|^2",
        );
        let res = d.residuals(&c);
        assert!(res.reconstruction < ALG && res.orthogonality < ALG && res.weyl_trace < ALG);
        assert!(res.e_trace < ALG && res.u_norm < ALG && res.v_norm < ALG);
        assert!(form_diff(&ricci_contraction(&d.weyl), &vec![vec![0.0; n]; n]) < ALG);
        assert!(d.weyl.bianchi_residual() < ALG);
    }
}

#[test]
fn u_tensor_examples() {
    let w = CurvatureTensor::zeros(dim(5));
    let u = u_contraction(&w).unwrap();
    assert_eq!((u.u_norm_sq, u.contracted), (0.0, 0.0));

    let mut r = sampling::rng(10, 0);
    let w5 = sampling::weyl(dim(5), &mut r);
    let u5 = u_contraction(&w5).unwrap();
    assert_close(u5.u_norm_sq / w5.norm_sq(), 128.0, ALG, "8|u|^2 / |W|^2 at n = 5");

    // the u-contraction equals −8⟨W, W²+W♯⟩ under the fixed inner product
    let w6 = sampling::weyl(dim(6), &mut r);
    let u6 = u_contraction(&w6).unwrap();
    let direct = w6.inner(&square_plus_sharp(&w6)).unwrap();
    assert_close(u6.contracted, -8.0 * direct, ALG, "u-contraction vs dot/sharp path");
}

#[test]
fn quadratic_form_examples() {
    let mut r = sampling::rng(12, 0);
    for n in 4..8 {
        let nf = n as f64;
        let z = quadratic_forms(&sampling::curvature(dim(n), &mut r), &SymmetricForm2::zeros(dim(n))).unwrap();
        assert_eq!((z.w_aa, z.a_cubed), (0.0, 0.0));

        let c = sampling::curvature(dim(n), &mut r);
        let d = decompose(&c).unwrap();
        let rc = d.ricci();
        let e = &d.traceless_ricci;
        let s = d.scalar;
        let e3 = e.cubic_trace();
        let e2 = e.norm_sq();
        let q = quadratic_forms(&c, &rc).unwrap();
        assert_close(q.a_cubed, e3 + 3.0 / nf * s * e2 + s.powi(3) / (nf * nf), ALG, "Rc^3 expansion");
        let wq = quadratic_forms(&d.weyl, &rc).unwrap();
        assert_close(
            q.w_aa,
            wq.w_aa - 2.0 * e3 / (nf - 2.0) + s.powi(3) / (nf * nf) + (2.0 * nf - 3.0) * s * e2 / (nf * (nf - 1.0)),
            ALG,
            "R(Rc,Rc) expansion",
        );

        // basis independence
        let o = sampling::orthogonal(n, &mut r);
        let wr = d.weyl.rotated(&o).unwrap();
        let er = e.conjugate(&o).unwrap();
        let a = quadratic_forms(&d.weyl, e).unwrap();
        let b = quadratic_forms(&wr, &er).unwrap();
        assert_close(a.w_aa, b.w_aa, ALG, "W(E,E) invariance");
        assert_close(a.a_cubed, b.a_cubed, ALG, "E^3 invariance");
    }
}

#[test]
fn sectional_split_examples() {
    let mut r = sampling::rng(13, 0);
    for _ in 0..20 {
        let w = sampling::weyl(dim(4), &mut r);
        let (a, b) = weyl_sectional_split(&w, &[0, 1]).unwrap();
        assert_close(a, b, ALG, "W_1212 = W_3434");
        let w6 = sampling::weyl(dim(6), &mut r);
        let (a, b) = weyl_sectional_split(&w6, &[0, 3, 4]).unwrap();
        assert_close(a, b, ALG, "complementary 3-plane sums");
    }
}

#[test]
fn pure_cubic_identity_and_products() {
    let mut r = sampling::rng(14, 0);
    for n in 4..9 {
        for _ in 0..50 {
            let p = sampling::pure_matrix(dim(n), &mut r);
            let c = pure_cubics(&p);
            assert!(c.identity_residual(n).abs() < ALG * 1f64.max(c.sharp_cubic.abs()));
            // cross-check against the operator products on the diagonal tensor
            let w = p.to_operator();
            assert!(ricci_contraction(&w).norm() < ALG);
            assert!(w.bianchi_residual() < ALG);
            assert_close(c.square_cubic, w.inner(&square(&w)).unwrap(), ALG, "square_cubic");
            assert_close(c.sharp_cubic, w.inner(&sharp(&w)).unwrap(), ALG, "sharp_cubic");
            if n == 5 {
                assert_close(c.three_plane_sum, 0.5 * c.square_cubic, ALG, "n = 5 three-plane sum");
                assert_close(c.sharp_cubic, 2.0 * c.square_cubic, ALG, "n = 5 sharp = 2 square");
            }
        }
    }
}

#[test]
fn bianchi_map_lemma_examples() {
    let mut r = sampling::rng(15, 0);
    for n in 4..8 {
        let d = dim(n);
        let z = TwoFormOneForm::zeros(d);
        assert_eq!(circ_prime(&z).unwrap().norm(), 0.0);
        assert_eq!(second_bianchi(&CovDerivCurvature::zeros(d)).norm(), 0.0);

        let dr = sampling::jet_derivative(d, &mut r);
        let drc = dr.ricci();
        let ds = dr.scalar();
        let p = p_tensor(&drc).unwrap();
        let q = q_tensor(d, &ds).unwrap();
        let g = SymmetricForm2::identity(d);

        let b1 = second_bianchi(&kn_derivative(&drc).unwrap());
        assert!(b1.sub(&circ_prime(&p).unwrap()).unwrap().norm() < ALG * b1.norm().max(1.0), "B(Rc∘g) = P∘′g");

        let sg: Vec<_> = ds.iter().map(|&x| g.scale(x)).collect();
        let b2 = second_bianchi(&kn_derivative(&sg).unwrap());
        assert!(
            b2.sub(&circ_prime(&q).unwrap().scale(-1.0)).unwrap().norm() < ALG * b2.norm().max(1.0),
            "B(S g∘g) = −Q∘′g"
        );

        let dw = dr.weyl_part().unwrap();
        let delta = divergence(&dw);
        let b3 = second_bianchi(&dw);
        let rhs = circ_prime(&delta).unwrap().scale(1.0 / (n as f64 - 3.0));
        assert!(b3.sub(&rhs).unwrap().norm() < ALG * b3.norm().max(1.0), "B(W) = δW∘′g/(n−3)");
        let pred = weyl_divergence_from_pq(&p, &q).unwrap();
        assert!(delta.sub(&pred).unwrap().norm() < ALG * delta.norm().max(1.0), "δW from P, Q");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, .. ProptestConfig::default() })]

    #[test]
    fn selfadjointness_of_kn_with_g(seed in any::<u64>(), n in 4usize..9) {
        let mut r = sampling::rng(seed, 0);
        let rr = sampling::curvature(dim(n), &mut r);
        let k = sampling::symmetric_form(dim(n), &mut r);
        let g = SymmetricForm2::identity(dim(n));
        let lhs = kulkarni_nomizu(&g, &k).unwrap().inner(&rr).unwrap();
        let rhs = k.inner(&ricci_contraction(&rr)).unwrap();
        prop_assert!((lhs - rhs).abs() <= ALG * 1f64.max(lhs.abs()));
        let brute = brute_ricci(&rr);
        prop_assert!(form_diff(&ricci_contraction(&rr), &brute) < 1e-13);
    }

    #[test]
    fn ricci_of_square_plus_sharp(seed in any::<u64>(), n in 4usize..9) {
        let mut r = sampling::rng(seed, 1);
        let rr = sampling::curvature(dim(n), &mut r);
        let q = square_plus_sharp(&rr);
        let (_, imb) = bianchi_project(&q);
        prop_assert!(imb.norm() <= ALG * q.norm().max(1.0));
        let rc = ricci_contraction(&rr);
        let lhs = ricci_contraction(&q);
        let expect: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| {
            let mut s = 0.0;
            for p in 0..n { for qq in 0..n { s += rr.get(i, p, j, qq) * rc.get(p, qq); } }
            s
        }).collect()).collect();
        prop_assert!(form_diff(&lhs, &expect) <= ALG * lhs.norm().max(1.0));
        let w = sampling::weyl(dim(n), &mut r);
        prop_assert!(ricci_contraction(&square_plus_sharp(&w)).norm() <= ALG * w.norm_sq().max(1.0));
    }

    #[test]
    fn tri_is_symmetric(seed in any::<u64>(), n in 4usize..9) {
        let mut r = sampling::rng(seed, 2);
        let a = sampling::curvature(dim(n), &mut r);
        let b = sampling::curvature(dim(n), &mut r);
        let c = sampling::curvature(dim(n), &mut r);
        let vals = [
            tri(&a, &b, &c).unwrap(), tri(&a, &c, &b).unwrap(), tri(&b, &a, &c).unwrap(),
            tri(&b, &c, &a).unwrap(), tri(&c, &a, &b).unwrap(), tri(&c, &b, &a).unwrap(),
        ];
        let scale = vals.iter().fold(1f64, |m, v| m.max(v.abs()));
        for v in vals { prop_assert!((v - vals[0]).abs() <= ALG * scale); }
        let rrr = tri(&a, &a, &a).unwrap();
        let expect = 2.0 * a.inner(&square_plus_sharp(&a)).unwrap();
        prop_assert!((rrr - expect).abs() <= ALG * rrr.abs().max(1.0));
    }

    #[test]
    fn product_w_lemma(seed in any::<u64>(), n in 4usize..9) {
        let mut r = sampling::rng(seed, 3);
        let w = sampling::weyl(dim(n), &mut r);
        let diag: Vec<f64> = (0..n).map(|_| sampling::symmetric_form(dim(n), &mut r).get(0, 0)).collect();
        let a = SymmetricForm2::diagonal(dim(n), &diag).unwrap();
        let g = SymmetricForm2::identity(dim(n));
        let b = kulkarni_nomizu(&a, &g).unwrap();
        let w2 = square(&w);
        let scale = w.norm_sq().max(1.0);
        prop_assert!(b.inner(&square_plus_sharp(&w)).unwrap().abs() <= ALG * scale);
        let lhs = w2.inner(&b).unwrap();
        let mut s = 0.0;
        for i in 0..n { for j in 0..n { for p in 0..n { for q in 0..n {
            s += diag[i] * w.get(i, j, p, q).powi(2);
        }}}}
        prop_assert!((lhs - 0.5 * s).abs() <= ALG * lhs.abs().max(1.0));
        let other = -w.inner(&sharp_product(&b, &w).unwrap()).unwrap();
        prop_assert!((lhs - other).abs() <= ALG * lhs.abs().max(1.0));
    }

    #[test]
    fn circ_prime_norm(seed in any::<u64>(), n in 4usize..9) {
        let mut r = sampling::rng(seed, 4);
        let a = sampling::trace_free_two_form_one_form(dim(n), &mut r);
        let lhs = circ_prime(&a).unwrap().norm_sq();
        let rhs = (n as f64 - 3.0) * a.norm_sq();
        prop_assert!((lhs - rhs).abs() <= ALG * lhs.max(1.0));
    }

    #[test]
    fn sharp_cubic_in_low_dimension(seed in any::<u64>(), n in 4usize..6) {
        let mut r = sampling::rng(seed, 5);
        let w = sampling::weyl(dim(n), &mut r);
        let a = w.inner(&sharp(&w)).unwrap();
        let b = 2.0 * w.inner(&square(&w)).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn u_tensor_identities(seed in any::<u64>(), n in 4usize..8) {
        let mut r = sampling::rng(seed, 6);
        let w = sampling::weyl(dim(n), &mut r);
        let u = u_contraction(&w).unwrap();
        let nf = n as f64;
        prop_assert!((u.u_norm_sq - 32.0 * (nf - 1.0) * w.norm_sq()).abs() <= ALG * u.u_norm_sq.max(1.0));
        let direct = -8.0 * w.inner(&square_plus_sharp(&w)).unwrap();
        prop_assert!((u.contracted - direct).abs() <= ALG * direct.abs().max(1.0));
    }

    #[test]
    fn rotation_preserves_structure(seed in any::<u64>(), n in 4usize..8) {
        let mut r = sampling::rng(seed, 7);
        let c = sampling::curvature(dim(n), &mut r);
        let o = sampling::orthogonal(n, &mut r);
        let rc = c.rotated(&o).unwrap();
        prop_assert!(rc.bianchi_residual() <= ALG * c.norm().max(1.0));
        prop_assert!((rc.norm_sq() - c.norm_sq()).abs() <= ALG * c.norm_sq().max(1.0));
        let rc_rot = ricci_contraction(&c).conjugate(&o).unwrap();
        prop_assert!(ricci_contraction(&rc).sub(&rc_rot).unwrap().norm() <= ALG * rc_rot.norm().max(1.0));
    }
}
