//! Seeded randomized sweeps over independent cases. Every case draws from its own RNG,
//! derived from the sweep seed and the case index, so outcomes do not depend on the
//! scheduling. With the `parallel` feature the cases fan out over rayon; otherwise, or
//! when `parallel` is false, they run in order on the calling thread.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exact_algebra::QuadField;
use crate::gsets::FiniteGroup;
use crate::harish_chandra::{inverse_e, roundtrip_hc, validate_hc, WitnessPath};
use crate::quiver::{fixtures, RationalQuiver, RelationMode};
use crate::random;
use crate::representations::{check_fh, check_hf, hom_space};
use crate::species::{roundtrip_quiver, roundtrip_species, species_of_quiver, verify_species_iso};
use crate::unipotent::{stabilize, unipotent_sqrt_traced};

pub const DEFAULT_SEED: u64 = 0x5eed;

pub fn case_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Runs `f` on `0..n`, in parallel when requested and compiled in. Results keep case order.
pub fn run_cases<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// Whether the parallel runner is compiled in.
pub fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseFailure {
    pub index: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub name: String,
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<CaseFailure>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SweepSummary {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn summarize(name: &str, seed: u64, outcomes: Vec<Result<(), String>>, started: Instant) -> SweepSummary {
    let cases = outcomes.len();
    let failures = outcomes
        .into_iter()
        .enumerate()
        .filter_map(|(index, o)| o.err().map(|detail| CaseFailure { index, detail }))
        .collect();
    SweepSummary { name: name.to_string(), seed, cases, failures, elapsed: started.elapsed() }
}

fn check_quiver_roundtrips(q: &RationalQuiver) -> Result<(), String> {
    let (q2, f) = roundtrip_quiver(q).map_err(|e| e.to_string())?;
    if !q.is_morphism(&q2, &f, RelationMode::Raw) {
        return Err("quiver witness is not a morphism".into());
    }
    let s = species_of_quiver(q);
    let (s2, iso) = roundtrip_species(&s).map_err(|e| e.to_string())?;
    if !verify_species_iso(&s, &s2, &iso) {
        return Err("species witness does not verify".into());
    }
    Ok(())
}

/// Quiver and species round trips on random quivers over the given group.
pub fn quiver_roundtrip_sweep(group: Arc<FiniteGroup>, seed: u64, cases: usize, parallel: bool) -> SweepSummary {
    let started = Instant::now();
    let name = format!("quiver round trips (order {})", group.order());
    let out = run_cases(cases, parallel, |i| {
        let mut rng = case_rng(seed, i);
        check_quiver_roundtrips(&random::quiver(&mut rng, group.clone(), 4, 6))
    });
    summarize(&name, seed, out, started)
}

pub fn fixture_quivers() -> Vec<RationalQuiver> {
    vec![fixtures::gelfand(), fixtures::cyclic(), fixtures::two_loop()]
}

pub fn fixture_roundtrip_sweep() -> SweepSummary {
    let started = Instant::now();
    let out = fixture_quivers().iter().map(check_quiver_roundtrips).collect();
    summarize("quiver round trips (fixtures)", 0, out, started)
}

/// F H and H F witnesses on random representations of random quadratic quivers.
pub fn functor_witness_sweep(seed: u64, cases: usize, parallel: bool) -> SweepSummary {
    let started = Instant::now();
    let field = QuadField::gaussian();
    let out = run_cases(cases, parallel, |i| {
        let mut rng = case_rng(seed, i);
        let q = random::quiver(&mut rng, fixtures::c2(), 4, 6);
        let r = random::rep(&mut rng, &q, &field, 3).map_err(|e| e.to_string())?;
        if !check_hf(&r).map_err(|e| e.to_string())? {
            return Err("H F witness failed".into());
        }
        let w = random::species_rep(&mut rng, &q, &field, 3).map_err(|e| e.to_string())?;
        if !check_fh(&w).map_err(|e| e.to_string())? {
            return Err("F H witness failed".into());
        }
        Ok(())
    });
    summarize("representation equivalence", seed, out, started)
}

/// `dim_K Hom_K = dim_L Hom_L` on random pairs.
pub fn hom_descent_sweep(seed: u64, cases: usize, parallel: bool) -> SweepSummary {
    let started = Instant::now();
    let field = QuadField::gaussian();
    let out = run_cases(cases, parallel, |i| {
        let mut rng = case_rng(seed, i);
        let q = random::quiver(&mut rng, fixtures::c2(), 3, 4);
        let a = random::rep(&mut rng, &q, &field, 2).map_err(|e| e.to_string())?;
        let b = random::rep(&mut rng, &q, &field, 2).map_err(|e| e.to_string())?;
        let h = hom_space(&a, &b).map_err(|e| e.to_string())?;
        if h.dim_k() != h.dim_l {
            return Err(format!("dim_K {} != dim_L {}", h.dim_k(), h.dim_l));
        }
        Ok(())
    });
    summarize("hom descent", seed, out, started)
}

fn ceil_log2(e: usize) -> usize {
    (usize::BITS - (e.max(1) - 1).leading_zeros()) as usize
}

/// Stabilization on random problems: iteration bound, halving of defect exponents and the
/// exact conjugate-inverse identities at the fixed point.
pub fn stabilize_sweep(seed: u64, cases: usize, parallel: bool) -> SweepSummary {
    let started = Instant::now();
    let field = QuadField::gaussian();
    let out = run_cases(cases, parallel, |i| {
        let mut rng = case_rng(seed, i);
        let n = rng.random_range(1..=6);
        let e = rng.random_range(1..=n);
        let p = random::stabilization_problem(&mut rng, &field, n, e);
        let s = stabilize(&p).map_err(|e| e.to_string())?;
        let e0 = s.defect_exponents[0];
        if s.evaluated_steps() > ceil_log2(e0) + 1 {
            return Err(format!("{} steps for exponent {e0}", s.evaluated_steps()));
        }
        for w in s.defect_exponents.windows(2) {
            if w[1] > w[0].div_ceil(2) {
                return Err(format!("exponent {} after {}", w[1], w[0]));
            }
        }
        let tau_minus = s.minus.galois(p.tau);
        let tau_plus = s.plus.galois(p.tau);
        if !(&tau_minus * &s.plus).is_identity() || !(&tau_plus * &s.minus).is_identity() {
            return Err("limit maps are not conjugate inverses".into());
        }
        Ok(())
    });
    summarize("unipotent stabilization", seed, out, started)
}

/// Unipotent square roots: squares back, halving of the defect.
pub fn sqrt_sweep(seed: u64, cases: usize, parallel: bool) -> SweepSummary {
    let started = Instant::now();
    let field = QuadField::gaussian();
    let out = run_cases(cases, parallel, |i| {
        let mut rng = case_rng(seed, i);
        let n = rng.random_range(1..=6);
        let e = rng.random_range(1..=n);
        let nil = random::nilpotent_with_exponent(&mut rng, &field, n, e);
        let phi = &crate::exact_algebra::QuadMatrix::identity(&field, n) + &nil;
        let t = unipotent_sqrt_traced(&phi).map_err(|e| e.to_string())?;
        if &t.root * &t.root != phi {
            return Err("root does not square back".into());
        }
        let exps: Vec<usize> = t.defect_exponents.iter().map(|x| x.unwrap_or(usize::MAX)).collect();
        for w in exps.windows(2) {
            if w[1] > w[0].div_ceil(2) {
                return Err(format!("gap exponent {} after {}", w[1], w[0]));
            }
        }
        Ok(())
    });
    summarize("unipotent square roots", seed, out, started)
}

/// inverse construction and constructive round trip on random Gelfand (`ell >= 1`) or
/// cyclic (`ell = 0`) representations.
pub fn essential_surjectivity_sweep(seed: u64, cases: usize, cyclic: bool, parallel: bool) -> SweepSummary {
    let started = Instant::now();
    let field = QuadField::gaussian();
    let out = run_cases(cases, parallel, |i| {
        let mut rng = case_rng(seed, i);
        let (v, ell) = if cyclic {
            (random::cyclic_rep(&mut rng, &field, 3), 0)
        } else {
            (random::gelfand_rep(&mut rng, &field, 3), 1 + i % 3)
        };
        let v = v.map_err(|e| e.to_string())?;
        let m = inverse_e(&v, ell).map_err(|e| e.to_string())?;
        let r = validate_hc(&m);
        if !r.ok() {
            return Err(r.to_string());
        }
        let rt = roundtrip_hc(&v, ell).map_err(|e| e.to_string())?;
        if rt.path != WitnessPath::Constructive {
            return Err("constructive witness failed; search was needed".into());
        }
        Ok(())
    });
    let name = if cyclic { "essential surjectivity (cyclic)" } else { "essential surjectivity (Gelfand)" };
    summarize(name, seed, out, started)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let a = stabilize_sweep(9, 12, true);
        let b = stabilize_sweep(9, 12, false);
        assert_eq!(a.failures, b.failures);
        assert_eq!(a.cases, 12);
        assert_eq!(run_cases(5, true, |i| i * i), vec![0, 1, 4, 9, 16]);
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!([1, 2, 3, 4, 5, 8, 9].map(ceil_log2), [0, 1, 2, 2, 3, 3, 4]);
    }
}
