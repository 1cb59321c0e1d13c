use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ratquiver::exact_algebra::{Galois, QuadElement, QuadField, QuadMatrix};
use ratquiver::gsets::FiniteGroup;
use ratquiver::quiver::fixtures;
use ratquiver::random;
use ratquiver::representations::*;

fn field() -> QuadField {
    QuadField::gaussian()
}

/// dim_Q of rational morphisms by one direct rational system: every L-entry is split into
/// two rational unknowns and both edge commutation and compatibility with the semilinear
/// maps are imposed at once.
fn direct_hom_dim(m: &QuiverRep, n: &QuiverRep) -> usize {
    let q = &m.quiver;
    let k = &m.field;
    let d = k.rational(k.d().clone());
    let mut off = Vec::new();
    let mut total = 0;
    for v in 0..q.vertex_count() {
        off.push(total);
        total += 2 * n.dims[v] * m.dims[v];
    }
    // each term is (unknown, coefficient, conjugated?); psi_entry = x + r y with r = sqrt(d)
    let mut rows: Vec<Vec<QuadElement>> = Vec::new();
    let mut push_l_equation = |terms: Vec<(usize, QuadElement, bool)>| {
        let mut re = vec![k.zero(); total];
        let mut im = vec![k.zero(); total];
        for (idx, c, conj) in terms {
            let sign = k.int(if conj { -1 } else { 1 });
            let (a, b) = (k.rational(c.a().clone()), k.rational(c.b().clone()));
            // (a + b r)(x + s r y) = a x + s b d y + r (b x + s a y)
            re[idx] += &a;
            re[idx + 1] += &(&(&b * &d) * &sign);
            im[idx] += &b;
            im[idx + 1] += &(&a * &sign);
        }
        rows.push(re);
        rows.push(im);
    };
    let var = |v: usize, i: usize, j: usize| off[v] + 2 * (i * m.dims[v] + j);
    for e in 0..q.edge_count() {
        let (s, t) = (q.src[e], q.tgt[e]);
        for i in 0..n.dims[t] {
            for j in 0..m.dims[s] {
                let mut terms = Vec::new();
                for l in 0..m.dims[t] {
                    terms.push((var(t, i, l), m.edges[e].get(l, j).clone(), false));
                }
                for l in 0..n.dims[s] {
                    terms.push((var(s, l, j), -n.edges[e].get(i, l), false));
                }
                push_l_equation(terms);
            }
        }
    }
    for g in q.group.elements() {
        for v in 0..q.vertex_count() {
            let w = q.vertices.act(g, v);
            let (pm, pn) = (m.phi(v, g), n.phi(v, g));
            let twisted = pm.sigma != Galois::Id;
            // psi_w A = B sigma(psi_v)
            for i in 0..n.dims[w] {
                for j in 0..m.dims[v] {
                    let mut terms = Vec::new();
                    for l in 0..m.dims[w] {
                        terms.push((var(w, i, l), pm.matrix.get(l, j).clone(), false));
                    }
                    for l in 0..n.dims[v] {
                        terms.push((var(v, l, j), -pn.matrix.get(i, l), twisted));
                    }
                    push_l_equation(terms);
                }
            }
        }
    }
    if rows.is_empty() {
        return total;
    }
    let sys = QuadMatrix::from_rows(k, rows).unwrap();
    total - sys.rank()
}

#[test]
fn hom_space_matches_direct_rational_system() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = Arc::new(FiniteGroup::cyclic(2));
    let mut nonzero = 0;
    for i in 0..25 {
        let qv = random::quiver(&mut rng, g.clone(), 3, 4);
        let a = random::rep(&mut rng, &qv, &field(), 2).unwrap();
        let b = if i % 2 == 0 { random::gauge(&mut rng, &a).unwrap() } else { random::rep(&mut rng, &qv, &field(), 2).unwrap() };
        let h = hom_space(&a, &b).unwrap();
        assert_eq!(h.dim_k(), direct_hom_dim(&a, &b));
        assert_eq!(h.dim_k(), h.dim_l);
        for psi in &h.basis {
            assert!(is_morphism(&a, &b, psi));
        }
        nonzero += usize::from(h.dim_k() > 0);
    }
    assert!(nonzero >= 10);
}

#[test]
fn gelfand_and_cyclic_generators_are_valid_nilpotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let r = random::gelfand_rep(&mut rng, &field(), 3).unwrap();
        let rep = validate_rep(&r);
        assert!(rep.ok(), "{rep}");
        let c = random::cyclic_rep(&mut rng, &field(), 3).unwrap();
        assert!(validate_rep(&c).ok());
    }
}

#[test]
fn functor_round_trips_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = Arc::new(FiniteGroup::cyclic(2));
    for _ in 0..20 {
        let qv = random::quiver(&mut rng, g.clone(), 4, 6);
        let r = random::rep(&mut rng, &qv, &field(), 2).unwrap();
        assert!(r.is_valid());
        assert!(check_hf(&r).unwrap());
        assert!(theta_consistency(&r).unwrap().ok());
        let w = random::species_rep(&mut rng, &qv, &field(), 2).unwrap();
        assert!(check_fh(&w).unwrap());
        assert!(functor_h(&w).unwrap().is_valid());
    }
}

#[test]
fn functors_preserve_nilpotency() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let r = random::gelfand_rep(&mut rng, &field(), 2).unwrap();
        let back = functor_h(&functor_f(&r).unwrap()).unwrap();
        assert!(back.is_nilpotent());
    }
}

#[test]
fn base_change_preserves_nilpotency() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..20 {
        let r = random::cyclic_rep(&mut rng, &field(), 3).unwrap();
        let triv = r.quiver.group.trivial_subgroup();
        let b = rep_base_change(&r, &triv).unwrap();
        assert!(b.is_nilpotent() && b.is_valid());
    }
}

#[test]
fn trivial_group_functors_are_identity_like() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let g = Arc::new(FiniteGroup::trivial());
    let qv = random::quiver(&mut rng, g, 3, 4);
    let r = random::rep(&mut rng, &qv, &field(), 3).unwrap();
    let w = functor_f(&r).unwrap();
    assert_eq!(w.maps, (0..w.maps.len()).map(|k| r.edges[w.layout().summands[k].rep].clone()).collect::<Vec<_>>());
    assert!(check_hf(&r).unwrap());
}

#[test]
fn larger_groups_rejected() {
    let q = fixtures::one_loop(Arc::new(FiniteGroup::cyclic(3)));
    assert!(matches!(QuiverRep::zero(q, field()), Err(RepError::NotQuadratic(3))));
}

#[test]
fn different_dimension_vectors_not_isomorphic() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let a = random::cyclic_rep(&mut rng, &field(), 2).unwrap();
    let z = QuiverRep::zero(fixtures::cyclic(), field()).unwrap();
    if a.total_dim() > 0 {
        assert!(rep_isomorphic(&a, &z).unwrap().is_none());
    }
    let found = rep_isomorphic(&a, &a).unwrap().expect("self");
    assert!(is_isomorphism(&a, &a, &found));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hom_descent_dimensions_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::gelfand_rep(&mut rng, &field(), 2).unwrap();
        let b = random::gelfand_rep(&mut rng, &field(), 2).unwrap();
        let h = hom_space(&a, &b).unwrap();
        prop_assert_eq!(h.dim_k(), h.dim_l);
    }

    #[test]
    fn gauge_changes_preserve_isomorphism_class(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::cyclic_rep(&mut rng, &field(), 2).unwrap();
        let b = random::gauge(&mut rng, &a).unwrap();
        let psi = rep_isomorphic(&a, &b).unwrap();
        prop_assert!(psi.map(|p| is_isomorphism(&a, &b, &p)).unwrap_or(false));
    }
}
