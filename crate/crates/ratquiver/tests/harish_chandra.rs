use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ratquiver::exact_algebra::{q, q_frac, QuadField, QuadMatrix};
use ratquiver::harish_chandra::*;
use ratquiver::random;
use ratquiver::representations::{functor_f, hom_space, is_isomorphism, QuiverRep, SummandKind};

fn field() -> QuadField {
    QuadField::gaussian()
}

fn eps(ell: usize) -> usize {
    (ell + 1) % 2
}

/// Classical one-dimensional-weight model written directly from the ladder formulas:
/// `X = (s ell + w + 1)/2` on `M_w`, `Y = (s ell - w - 1)/2` on `M_{w+2}`, restricted to
/// weights where `keep` holds. `s = 1` gives the principal series with its discrete
/// submodule, `s = -1` the opposite extension.
fn ladder_model(ell: usize, window: usize, s: i64, keep: impl Fn(i64) -> bool) -> HCModule {
    let k = field();
    let l = ell as i64;
    let n = window as i64;
    let weights: Vec<i64> = (0..=window).map(|i| -n + 2 * i as i64).collect();
    let dims: Vec<usize> = weights.iter().map(|&w| keep(w) as usize).collect();
    let entry = |r: usize, c: usize, x: i64| {
        QuadMatrix::from_fn(&k, r, c, |_, _| k.rational(q_frac(x, 2)))
    };
    let x = (0..window).map(|i| entry(dims[i + 1], dims[i], s * l + weights[i] + 1)).collect();
    let y = (0..window).map(|i| entry(dims[i], dims[i + 1], s * l - weights[i] - 1)).collect();
    let rational = dims.iter().rev().zip(&dims).map(|(&r, &c)| QuadMatrix::identity(&k, r.min(c))).collect();
    HCModule { field: k, ell, window, dims, x, y, rational, tails: None }
}

fn classical(kind: ExampleKind, ell: usize, window: usize) -> HCModule {
    let l = ell as i64;
    match kind {
        ExampleKind::Finite => ladder_model(ell, window, 1, |w| w.abs() < l),
        ExampleKind::Discrete => ladder_model(ell, window, 1, |w| w.abs() > l),
        ExampleKind::Principal => ladder_model(ell, window, 1, |_| true),
        ExampleKind::PrincipalDual => ladder_model(ell, window, -1, |_| true),
    }
}

#[test]
fn fixtures_match_classical_ladders() {
    for ell in 0..=3 {
        for kind in ExampleKind::ALL {
            let Ok(m) = build_example(kind, ell, eps(ell)) else { continue };
            let c = classical(kind, ell, m.window);
            assert!(validate_hc(&c).ok(), "oracle {} ell={ell}\n{}", kind.label(), validate_hc(&c));
            assert_eq!(m.dims, c.dims);
            assert!(hc_isomorphic(&m, &c).unwrap().is_some(), "{} ell={ell}", kind.label());
        }
    }
}

#[test]
fn finite_fixture_dimensions() {
    let m = build_example(ExampleKind::Finite, 2, 1).unwrap();
    assert_eq!(m.dim(-1).unwrap(), 1);
    assert_eq!(m.dim(1).unwrap(), 1);
    assert_eq!(m.dim(3).unwrap(), 0);
    assert_eq!(m.dim(-3).unwrap(), 0);
    assert_eq!(m.total_dim(), 2);
    assert_eq!(casimir_matrix(&m, 1).unwrap(), QuadMatrix::scalar(&m.field, 1, &m.field.int(4)));
}

#[test]
fn casimir_out_of_window() {
    let m = build_example(ExampleKind::Principal, 1, 0).unwrap();
    assert!(matches!(casimir_matrix(&m, 99), Err(HcError::OutOfWindow(99))));
}

#[test]
fn extension_fixture_has_square_zero_casimir_part() {
    for ell in 1..=3 {
        let m = build_extension(ell).unwrap();
        assert!(validate_hc(&m).ok());
        let l = ell as i64;
        let c = casimir_matrix(&m, -(l + 1)).unwrap();
        let n = &c - &QuadMatrix::scalar(&m.field, c.rows(), &m.field.int(l * l));
        assert!(!n.is_zero());
        assert!((&n * &n).is_zero());
        let nm = normalizations(&m).unwrap();
        let t = &nm.t_minus - &QuadMatrix::identity(&m.field, nm.t_minus.rows());
        assert_eq!(t.is_zero(), ell == 1);
        assert!(t.nilpotency_exponent().is_some());
    }
}

#[test]
fn power_product_scalars() {
    let expected = [1i64, 4, 64, 2304, 147456];
    for ell in 1..=5usize {
        let m = build_example(ExampleKind::Finite, ell, eps(ell)).unwrap();
        let p = power_product_identity(&m, ell - 1, ell as i64 - 2).unwrap();
        assert!(p.report.ok(), "{}", p.report);
        assert_eq!(p.scalar, q(expected[ell - 1]));
        let nm = normalizations(&m).unwrap();
        let fact: i64 = (1..ell as i64).product();
        assert_eq!(nm.gamma_star, q(fact));
        assert!((&nm.x_star * &nm.y_star).is_identity());
    }
    let m = build_example(ExampleKind::Principal, 3, 0).unwrap();
    let p = power_product_identity(&m, 2, 1).unwrap();
    assert_eq!(p.scalar, q(64));
    let p = power_product_identity(&m, 0, 5).unwrap();
    assert!(p.rhs.is_identity() && p.scalar == q(1));
}

#[test]
fn power_product_on_extension_is_not_scalar() {
    let m = build_extension(3).unwrap();
    for k in [-5i64, 3, 5] {
        for mpow in 0..3 {
            let p = power_product_identity(&m, mpow, k).unwrap();
            assert!(p.report.ok(), "k={k} m={mpow}\n{}", p.report);
        }
    }
}

#[test]
fn zeroed_raising_maps_detected() {
    let ell = 2;
    let m = build_example(ExampleKind::Principal, ell, 1).unwrap();
    // on P the lowering maps next to X_{ell-1} vanish, so only the rational swap sees it
    let mut top = m.clone();
    let k = top.index(1).unwrap();
    top.x[k] = QuadMatrix::zeros(&m.field, 1, 1);
    let r = validate_hc(&top);
    assert_eq!(r.passed("bracket"), Some(true));
    assert_eq!(r.passed("rational swap"), Some(false));
    let mut outer = m.clone();
    let k = outer.index(5).unwrap();
    outer.x[k] = QuadMatrix::zeros(&m.field, 1, 1);
    let r = validate_hc(&outer);
    assert_eq!(r.passed("bracket"), Some(false));
    assert!(r.failures().any(|c| c.name == "bracket" && c.detail.contains("5") && c.detail.contains("7")));
}

#[test]
fn broken_rational_structure_detected() {
    let mut m = build_example(ExampleKind::Principal, 1, 0).unwrap();
    let k = m.index(0).unwrap();
    m.rational[k] = QuadMatrix::scalar(&m.field, 1, &m.field.root());
    let r = validate_hc(&m);
    assert_eq!(r.passed("rational swap"), Some(false));
    assert_eq!(r.passed("rational cocycle"), Some(true));
}

fn kinds_with_nonzero_maps(rep: &QuiverRep) -> Vec<SummandKind> {
    let w = functor_f(rep).unwrap();
    (0..w.maps.len()).filter(|&k| !w.maps[k].is_zero()).map(|k| w.kind(k)).collect()
}

#[test]
fn comparison_diagrams_of_fixtures() {
    for ell in 1..=3 {
        let k = field();
        for kind in ExampleKind::ALL {
            let m = build_example(kind, ell, eps(ell)).unwrap();
            let c = functor_e(&m).unwrap();
            assert!(c.report.ok());
            let r = &c.rep;
            let one = QuadMatrix::identity(&k, 1);
            let zero = QuadMatrix::zeros(&k, 1, 1);
            match kind {
                ExampleKind::Finite => {
                    assert_eq!(r.dims, vec![0, 1, 0]);
                    let xs = normalizations(&m).unwrap().x_star;
                    assert_eq!(r.phi(1, 1).matrix, &one * &xs.conj());
                }
                ExampleKind::Discrete => {
                    assert_eq!(r.dims, vec![1, 0, 1]);
                    assert!(r.phi(0, 1).matrix.is_identity() && r.phi(2, 1).matrix.is_identity());
                }
                ExampleKind::Principal => {
                    assert_eq!(r.edges, vec![zero.clone(), one.clone(), zero.clone(), one.clone()]);
                    assert_eq!(kinds_with_nonzero_maps(r), vec![SummandKind::Linear(ratquiver::exact_algebra::Galois::Id)]);
                }
                ExampleKind::PrincipalDual => {
                    assert_eq!(r.edges, vec![one.clone(), zero.clone(), one.clone(), zero.clone()]);
                    assert!(matches!(kinds_with_nonzero_maps(r).as_slice(), [SummandKind::Trace(_)]));
                }
            }
        }
    }
}

#[test]
fn discrete_at_ell_zero_is_cyclic() {
    let m = build_example(ExampleKind::Discrete, 0, 1).unwrap();
    let c = functor_e(&m).unwrap();
    assert_eq!(c.rep.quiver.vertex_count(), 2);
    assert_eq!(c.rep.dims, vec![1, 1]);
    assert!(c.rep.edges.iter().all(|e| e.is_zero()));
}

#[test]
fn inverse_of_zero_rep_is_zero() {
    let k = field();
    let z = QuiverRep::zero(ratquiver::quiver::fixtures::gelfand(), k).unwrap();
    let m = inverse_e(&z, 2).unwrap();
    assert_eq!(m.total_dim(), 0);
    assert!(validate_hc(&m).ok());
}

#[test]
fn inverse_of_discrete_image_has_empty_middle() {
    let d = build_example(ExampleKind::Discrete, 3, 0).unwrap();
    let m = inverse_e(&functor_e(&d).unwrap().rep, 3).unwrap();
    for w in [-2i64, 0, 2] {
        assert_eq!(m.dim(w).unwrap(), 0);
    }
    assert_eq!(m.dim(4).unwrap(), 1);
    assert!(hc_isomorphic(&m, &d).unwrap().is_some());
}

#[test]
fn fixtures_survive_both_round_trips() {
    for ell in 0..=3 {
        for kind in ExampleKind::ALL {
            let Ok(m) = build_example(kind, ell, eps(ell)) else { continue };
            let v = functor_e(&m).unwrap().rep;
            let back = inverse_e(&v, ell).unwrap();
            assert!(hc_isomorphic(&m, &back).unwrap().is_some(), "{} ell={ell}", kind.label());
            let rt = roundtrip_hc(&v, ell).unwrap();
            assert_eq!(rt.path, WitnessPath::Constructive);
            assert!(is_isomorphism(&v, &rt.image, &rt.witness));
        }
    }
}

#[test]
fn hom_dimensions_agree_on_fixture_pairs() {
    for ell in 1..=2 {
        for a in ExampleKind::ALL {
            for b in ExampleKind::ALL {
                let ma = build_example(a, ell, eps(ell)).unwrap();
                let mb = build_example(b, ell, eps(ell)).unwrap();
                let hc = hc_hom_dim(&ma, &mb).unwrap();
                let quiver = hom_space(&functor_e(&ma).unwrap().rep, &functor_e(&mb).unwrap().rep).unwrap().dim_k();
                assert_eq!(hc, quiver, "{} -> {} ell={ell}", a.label(), b.label());
            }
        }
    }
}

#[test]
fn hom_dimension_examples() {
    // End(D) is a copy of the Gaussian field; P contains D but P does not map onto D
    let d = build_example(ExampleKind::Discrete, 2, 1).unwrap();
    let p = build_example(ExampleKind::Principal, 2, 1).unwrap();
    assert_eq!(hc_hom_dim(&d, &d).unwrap(), 2);
    assert_eq!(hc_hom_dim(&d, &p).unwrap(), 2);
    assert_eq!(hc_hom_dim(&p, &d).unwrap(), 0);
}

#[test]
fn random_gelfand_round_trips() {
    let k = field();
    let mut rng = ChaCha8Rng::seed_from_u64(0xe1);
    let mut nontrivial = 0;
    for i in 0..24 {
        let ell = 1 + i % 3;
        let v = random::gelfand_rep(&mut rng, &k, 3).unwrap();
        let m = inverse_e(&v, ell).unwrap();
        let r = validate_hc(&m);
        assert!(r.ok(), "{r}");
        let rt = roundtrip_hc(&v, ell).unwrap();
        assert!(rt.star_identity);
        assert!(is_isomorphism(&v, &rt.image, &rt.witness));
        let cmp = functor_e(&m).unwrap();
        nontrivial += (cmp.iterations > 0) as usize;
    }
    assert!(nontrivial > 0);
}

#[test]
fn random_cyclic_round_trips() {
    let k = field();
    let mut rng = ChaCha8Rng::seed_from_u64(0xe0);
    for _ in 0..16 {
        let v = random::cyclic_rep(&mut rng, &k, 3).unwrap();
        let m = inverse_e(&v, 0).unwrap();
        assert!(validate_hc(&m).ok());
        let rt = roundtrip_hc(&v, 0).unwrap();
        assert!(is_isomorphism(&v, &rt.image, &rt.witness));
    }
}

#[test]
fn ell_mismatch_rejected() {
    let k = field();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let v = random::cyclic_rep(&mut rng, &k, 2).unwrap();
    assert!(matches!(inverse_e(&v, 1), Err(HcError::NotApplicable(_))));
    let g = random::gelfand_rep(&mut rng, &k, 2).unwrap();
    assert!(matches!(inverse_e(&g, 0), Err(HcError::NotApplicable(_))));
}

#[test]
fn hom_dimensions_stable_under_window_growth() {
    let k = field();
    let mut rng = ChaCha8Rng::seed_from_u64(0x77);
    for i in 0..6 {
        let ell = 1 + i % 2;
        let a = inverse_e(&random::gelfand_rep(&mut rng, &k, 2).unwrap(), ell).unwrap();
        let b = inverse_e(&random::gelfand_rep(&mut rng, &k, 2).unwrap(), ell).unwrap();
        let small = hc_hom_dim(&a, &b).unwrap();
        let big = hc_hom_dim(&a.with_window(ell + 17).unwrap(), &b.with_window(ell + 17).unwrap()).unwrap();
        assert_eq!(small, big);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn inverse_modules_satisfy_every_invariant(seed in any::<u64>(), ell in 0usize..4) {
        let k = field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = if ell == 0 { random::cyclic_rep(&mut rng, &k, 2).unwrap() } else { random::gelfand_rep(&mut rng, &k, 2).unwrap() };
        let m = inverse_e(&v, ell).unwrap();
        let r = validate_hc(&m);
        prop_assert!(r.ok(), "{}", r);
        let c = functor_e(&m).unwrap();
        prop_assert!(c.report.ok());
    }
}
