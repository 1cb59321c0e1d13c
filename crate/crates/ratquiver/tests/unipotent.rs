use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratquiver::exact_algebra::{q, Galois, QuadElement, QuadField, QuadMatrix, Q};
use ratquiver::random;
use ratquiver::unipotent::*;

fn field() -> QuadField {
    QuadField::gaussian()
}

/// Truncated binomial series sum_k binom(1/2, k) n^k.
fn binomial_sqrt(u: &QuadMatrix) -> QuadMatrix {
    let k = u.field().clone();
    let size = u.rows();
    let n = u - &QuadMatrix::identity(&k, size);
    let mut coeff = q(1);
    let mut pow = QuadMatrix::identity(&k, size);
    let mut sum = pow.clone();
    for j in 1..=size {
        // binom(1/2, j) = binom(1/2, j-1) * (1/2 - (j-1)) / j
        coeff = &coeff * &(Q::new(1.into(), 2.into()) - q(j as i64 - 1)) / q(j as i64);
        pow = &pow * &n;
        sum = &sum + &pow.scale_q(&coeff);
    }
    sum
}

fn ceil_log2(e: usize) -> usize {
    (usize::BITS - (e.max(1) - 1).leading_zeros()) as usize
}

#[test]
fn stabilize_random_problems_reach_conjugate_inverse_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..60 {
        let n = rng.random_range(1..=5);
        let e = rng.random_range(1..=n);
        let p = random::stabilization_problem(&mut rng, &field(), n, e);
        assert_eq!(p.defect_exponent(), Some(e));
        let s = stabilize(&p).unwrap();
        let id = QuadMatrix::identity(&field(), n);
        assert_eq!(&s.minus.conj() * &s.plus, id);
        assert_eq!(&s.plus.conj() * &s.minus, id);
        assert!(s.evaluated_steps() <= ceil_log2(e) + 1);
        for w in s.defect_exponents.windows(2) {
            assert!(w[1] <= w[0].div_ceil(2));
        }
    }
}

#[test]
fn defect_exponent_sequence_for_exponent_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let p = random::stabilization_problem(&mut rng, &field(), 5, 4);
    let s = stabilize(&p).unwrap();
    assert_eq!(s.defect_exponents[0], 4);
    assert!(s.defect_exponents[1] <= 2);
    assert_eq!(*s.defect_exponents.last().unwrap(), 1);
    assert!(s.iterations <= 2);
}

#[test]
fn swapped_problem_gives_transposed_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..20 {
        let n = rng.random_range(1..=4);
        let e = rng.random_range(1..=n);
        let p = random::stabilization_problem(&mut rng, &field(), n, e);
        let a = stabilize(&p).unwrap();
        let b = stabilize(&p.swapped().unwrap()).unwrap();
        assert_eq!((a.plus, a.minus), (b.minus, b.plus));
    }
}

#[test]
fn addendum_invariants_hold_along_iteration() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..30 {
        let n = rng.random_range(1..=5);
        let e = rng.random_range(1..=n);
        let p = random::commuting_unipotent_problem(&mut rng, &field(), n, e);
        let s = stabilize(&p).unwrap();
        for it in &s.iterates {
            assert!(addendum_holds(it));
        }
    }
}

#[test]
fn sqrt_matches_binomial_series_on_jordan_block() {
    let k = field();
    let u = QuadMatrix::from_ints(&k, &[&[1, 1, 0, 0], &[0, 1, 1, 0], &[0, 0, 1, 1], &[0, 0, 0, 1]]);
    let r = unipotent_sqrt(&u).unwrap();
    assert_eq!(r, binomial_sqrt(&u));
    assert_eq!(&r * &r, u);
}

#[test]
fn sqrt_random_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for _ in 0..60 {
        let n = rng.random_range(0..=5);
        let e = rng.random_range(1..=n.max(1));
        let u = &QuadMatrix::identity(&field(), n) + &random::nilpotent_with_exponent(&mut rng, &field(), n, e);
        let t = unipotent_sqrt_traced(&u).unwrap();
        assert_eq!(&t.root * &t.root, u);
        assert_eq!(t.root, binomial_sqrt(&u));
        assert!(defect(&t.root).nilpotency_exponent().is_some());
    }
}

#[test]
fn sqrt_rejects_non_unipotent() {
    let k = field();
    let m = QuadMatrix::from_ints(&k, &[&[2, 0], &[0, 1]]);
    assert!(matches!(unipotent_sqrt(&m), Err(UnipotentError::PreconditionViolated(_))));
    assert!(matches!(neumann_inverse(&m), Err(UnipotentError::PreconditionViolated(_))));
}

/// Perturbations that keep the candidate unipotent never square to the same matrix.
#[test]
fn sqrt_uniqueness_by_perturbation() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let k = field();
    let mut tried = 0;
    for _ in 0..40 {
        let n = rng.random_range(2..=3);
        let u = &QuadMatrix::identity(&k, n) + &random::nilpotent_with_exponent(&mut rng, &k, n, n);
        let r = unipotent_sqrt(&u).unwrap();
        for _ in 0..20 {
            let e = random::matrix(&mut rng, &k, n, n, false);
            if e.is_zero() {
                continue;
            }
            let cand = &r + &e;
            if defect(&cand).nilpotency_exponent().is_none() {
                continue;
            }
            tried += 1;
            assert_ne!(&cand * &cand, u);
        }
        // a genuinely different unipotent candidate in the same commutant
        let cand = &r + &(&r - &QuadMatrix::identity(&k, n)).pow(n as u32 - 1);
        assert_ne!(&cand * &cand, u);
    }
    let _ = tried;
}

#[test]
fn sqrt_commutes_with_commutant_and_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    let k = field();
    for _ in 0..20 {
        let n = rng.random_range(1..=4);
        let u = &QuadMatrix::identity(&k, n) + &random::nilpotent_with_exponent(&mut rng, &k, n, n);
        let r = unipotent_sqrt(&u).unwrap();
        // commutant of u: kernel of X -> uX - Xu
        let rows: Vec<Vec<QuadElement>> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                (0..n * n)
                    .map(|var| {
                        let (a, b) = (var / n, var % n);
                        let mut c = k.zero();
                        if b == j {
                            c += u.get(i, a);
                        }
                        if a == i {
                            c -= u.get(b, j);
                        }
                        c
                    })
                    .collect()
            })
            .collect();
        let sys = QuadMatrix::from_rows(&k, rows).unwrap();
        for v in sys.kernel_basis() {
            let psi = QuadMatrix::from_fn(&k, n, n, |i, j| v[i * n + j].clone());
            assert_eq!(&psi * &u, &u * &psi);
            assert_eq!(&psi * &r, &r * &psi);
        }
        assert_eq!(unipotent_sqrt(&u.conj()).unwrap(), r.conj());
        // semilinear conjugation by (A, conj)
        let a = random::invertible(&mut rng, &k, n, false);
        let ai = a.inverse().unwrap();
        let moved = &(&a * &u.conj()) * &ai;
        assert_eq!(unipotent_sqrt(&moved).unwrap(), &(&a * &r.conj()) * &ai);
    }
}

#[test]
fn scaled_sqrt_examples_and_inverse_compatibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let k = field();
    let n = random::nilpotent_with_exponent(&mut rng, &k, 2, 2);
    let phi = &QuadMatrix::scalar(&k, 2, &k.int(9)) + &n.scale(&k.int(4));
    let r = scaled_sqrt(&phi, &k.int(3)).unwrap();
    assert_eq!(&r * &r, phi);
    let inner = &QuadMatrix::identity(&k, 2) + &n.scale(&k.rational(Q::new(4.into(), 9.into())));
    assert_eq!(r, unipotent_sqrt(&inner).unwrap().scale(&k.int(3)));
    let inv_root = scaled_sqrt(&phi.inverse().unwrap(), &k.int(3).inv().unwrap()).unwrap();
    assert_eq!(inv_root, r.inverse().unwrap());
    let gamma = k.element(q(1), q(2));
    let phi2 = &QuadMatrix::scalar(&k, 2, &(&gamma * &gamma)) + &n;
    let root = scaled_sqrt(&phi2, &gamma).unwrap();
    assert_eq!(scaled_sqrt(&phi2.conj(), &gamma.conj()).unwrap(), root.conj());
    assert_eq!(Galois::Conj.apply(&gamma), gamma.conj());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn stabilization_halves_defect_exponent(seed in any::<u64>(), n in 1usize..=6, e in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = e.min(n);
        let p = random::stabilization_problem(&mut rng, &field(), n, e);
        let s = stabilize(&p).unwrap();
        for w in s.defect_exponents.windows(2) {
            prop_assert!(w[1] <= w[0].div_ceil(2));
        }
        prop_assert!(s.evaluated_steps() <= ceil_log2(e) + 1);
    }

    #[test]
    fn sqrt_squares_back(seed in any::<u64>(), n in 0usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = &QuadMatrix::identity(&field(), n) + &random::nilpotent_with_exponent(&mut rng, &field(), n, n);
        let r = unipotent_sqrt(&u).unwrap();
        prop_assert_eq!(&r * &r, u);
    }
}
