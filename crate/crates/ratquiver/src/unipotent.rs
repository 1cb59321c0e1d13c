//! Unipotent stabilization of pairs of twisted maps and unipotent square roots.
//!
//! Both iterations are run to an exact fixed point. Inverses of unipotent matrices use
//! the finite Neumann series.

use crate::exact_algebra::{q_frac, Galois, QuadElement, QuadMatrix};

/// Hard stop for the iterations; reaching it means the arithmetic is broken.
pub const SAFETY_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UnipotentError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("iteration did not reach a fixed point: {0}")]
    SingularIterate(String),
}

/// `m - 1` for square `m`.
pub fn defect(m: &QuadMatrix) -> QuadMatrix {
    m - &QuadMatrix::identity(m.field(), m.rows())
}

/// Inverse of `1 + n` for nilpotent `n` as the finite sum of `(-n)^k`.
pub fn neumann_inverse(u: &QuadMatrix) -> Result<QuadMatrix, UnipotentError> {
    if !u.is_square() {
        return Err(UnipotentError::PreconditionViolated(format!("{}x{} matrix is not square", u.rows(), u.cols())));
    }
    let n = defect(u);
    let e = n.nilpotency_exponent().ok_or_else(|| UnipotentError::PreconditionViolated("matrix is not unipotent".into()))?;
    let minus_n = -&n;
    let mut term = QuadMatrix::identity(u.field(), u.rows());
    let mut sum = term.clone();
    for _ in 1..e {
        term = &term * &minus_n;
        sum = &sum + &term;
    }
    Ok(sum)
}

fn half(m: &QuadMatrix) -> QuadMatrix {
    m.scale_q(&q_frac(1, 2))
}

/// A pair of isomorphisms `plus: W+ -> W-^tau`, `minus: W- -> W+^tau`, stored as matrices,
/// whose defect `tau(minus) * plus - 1` is nilpotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizationProblem {
    pub plus: QuadMatrix,
    pub minus: QuadMatrix,
    pub tau: Galois,
}

impl StabilizationProblem {
    pub fn new(plus: QuadMatrix, minus: QuadMatrix, tau: Galois) -> Result<Self, UnipotentError> {
        let n = plus.rows();
        if !plus.is_square() || minus.rows() != n || minus.cols() != n {
            return Err(UnipotentError::PreconditionViolated(format!(
                "maps must be square of one size, got {}x{} and {}x{}",
                plus.rows(),
                plus.cols(),
                minus.rows(),
                minus.cols()
            )));
        }
        let p = StabilizationProblem { plus, minus, tau };
        if p.defect_exponent().is_none() {
            return Err(UnipotentError::PreconditionViolated("defect is not nilpotent".into()));
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.plus.rows()
    }

    /// `tau(minus) * plus - 1`.
    pub fn defect(&self) -> QuadMatrix {
        defect(&(&self.minus.galois(self.tau) * &self.plus))
    }

    pub fn defect_exponent(&self) -> Option<usize> {
        self.defect().nilpotency_exponent()
    }

    /// The problem with the two maps exchanged.
    pub fn swapped(&self) -> Result<Self, UnipotentError> {
        StabilizationProblem::new(self.minus.clone(), self.plus.clone(), self.tau)
    }

    /// One step of the averaging iteration.
    pub fn step(&self) -> Result<Self, UnipotentError> {
        let t_minus = self.minus.galois(self.tau);
        let t_plus = self.plus.galois(self.tau);
        // tau(minus)^-1 = plus (tau(minus) plus)^-1, and symmetrically
        let inv_t_minus = &self.plus * &neumann_inverse(&(&t_minus * &self.plus))?;
        let inv_t_plus = &self.minus * &neumann_inverse(&(&t_plus * &self.minus))?;
        Ok(StabilizationProblem {
            plus: half(&(&self.plus + &inv_t_minus)),
            minus: half(&(&self.minus + &inv_t_plus)),
            tau: self.tau,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilization {
    pub plus: QuadMatrix,
    pub minus: QuadMatrix,
    /// Steps that changed the pair; one more step is evaluated to confirm the fixed point.
    pub iterations: usize,
    /// Defect exponent of every iterate, starting with the input.
    pub defect_exponents: Vec<usize>,
    /// Every iterate, starting with the input and ending with the fixed point.
    pub iterates: Vec<StabilizationProblem>,
}

impl Stabilization {
    /// Steps actually evaluated, including the confirming one.
    pub fn evaluated_steps(&self) -> usize {
        self.iterations + 1
    }
}

pub fn stabilize(p: &StabilizationProblem) -> Result<Stabilization, UnipotentError> {
    let first = p.defect_exponent().ok_or_else(|| UnipotentError::PreconditionViolated("defect is not nilpotent".into()))?;
    let mut iterates = vec![p.clone()];
    let mut exps = vec![first];
    for _ in 0..SAFETY_CAP {
        let cur = iterates.last().expect("nonempty");
        let next = cur.step()?;
        if next == *cur {
            return Ok(Stabilization {
                plus: next.plus,
                minus: next.minus,
                iterations: iterates.len() - 1,
                defect_exponents: exps,
                iterates,
            });
        }
        let e = next
            .defect_exponent()
            .ok_or_else(|| UnipotentError::SingularIterate("iterate lost nilpotent defect".into()))?;
        exps.push(e);
        iterates.push(next);
    }
    Err(UnipotentError::SingularIterate(format!("no fixed point after {SAFETY_CAP} steps")))
}

/// True when `plus`, `minus` are endomorphisms that are unipotent and `plus` commutes
/// with `tau(minus)`.
pub fn addendum_holds(p: &StabilizationProblem) -> bool {
    let t_minus = p.minus.galois(p.tau);
    &p.plus * &t_minus == &t_minus * &p.plus
        && defect(&p.plus).nilpotency_exponent().is_some()
        && defect(&p.minus).nilpotency_exponent().is_some()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtTrace {
    pub root: QuadMatrix,
    pub iterations: usize,
    /// Nilpotency exponent of `phi_k^2 - phi` along the iteration; absent entries mean the
    /// difference was not nilpotent at that step.
    pub defect_exponents: Vec<Option<usize>>,
}

/// Newton iteration `phi_{k+1} = (phi_k + phi_k^-1 phi) / 2` from `phi_0 = phi`.
pub fn unipotent_sqrt_traced(phi: &QuadMatrix) -> Result<SqrtTrace, UnipotentError> {
    if !phi.is_square() {
        return Err(UnipotentError::PreconditionViolated("square root of a non-square matrix".into()));
    }
    if defect(phi).nilpotency_exponent().is_none() {
        return Err(UnipotentError::PreconditionViolated("matrix is not unipotent".into()));
    }
    let gap = |x: &QuadMatrix| (&(x * x) - phi).nilpotency_exponent();
    let mut cur = phi.clone();
    let mut exps = vec![gap(&cur)];
    for k in 0..SAFETY_CAP {
        let inv = neumann_inverse(&cur).map_err(|e| UnipotentError::SingularIterate(e.to_string()))?;
        let next = half(&(&cur + &(&inv * phi)));
        if next == cur {
            return Ok(SqrtTrace { root: cur, iterations: k, defect_exponents: exps });
        }
        exps.push(gap(&next));
        cur = next;
    }
    Err(UnipotentError::SingularIterate(format!("no fixed point after {SAFETY_CAP} steps")))
}

pub fn unipotent_sqrt(phi: &QuadMatrix) -> Result<QuadMatrix, UnipotentError> {
    unipotent_sqrt_traced(phi).map(|t| t.root)
}

/// `gamma * sqrt(gamma^-2 phi)` for `phi = gamma^2 + nilpotent`.
pub fn scaled_sqrt(phi: &QuadMatrix, gamma: &QuadElement) -> Result<QuadMatrix, UnipotentError> {
    let inv = gamma.inv().ok_or_else(|| UnipotentError::PreconditionViolated("gamma is zero".into()))?;
    let normalized = phi.scale(&(&inv * &inv));
    let root = unipotent_sqrt(&normalized).map_err(|_| {
        UnipotentError::PreconditionViolated(format!("matrix is not {gamma}^2 times a unipotent matrix"))
    })?;
    Ok(root.scale(gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::QuadField;

    fn k() -> QuadField {
        QuadField::gaussian()
    }

    #[test]
    fn identity_pair_is_fixed() {
        let id = QuadMatrix::identity(&k(), 3);
        let p = StabilizationProblem::new(id.clone(), id.clone(), Galois::Conj).unwrap();
        let s = stabilize(&p).unwrap();
        assert_eq!(s.iterations, 0);
        assert_eq!((s.plus, s.minus), (id.clone(), id));
    }

    #[test]
    fn two_by_two_defect_settles_in_one_step() {
        let f = k();
        let u = QuadMatrix::from_ints(&f, &[&[1, 1], &[0, 1]]);
        let id = QuadMatrix::identity(&f, 2);
        let p = StabilizationProblem::new(id, u, Galois::Conj).unwrap();
        let s = stabilize(&p).unwrap();
        assert_eq!(s.iterations, 1);
        assert_eq!(s.defect_exponents, vec![2, 1]);
        // plus = (1 + u^-1)/2, minus = (u + 1)/2
        let half = q_frac(1, 2);
        assert_eq!(s.plus, QuadMatrix::from_fn(&f, 2, 2, |i, j| f.rational(if i == j { q_frac(1, 1) } else if j > i { -half.clone() } else { q_frac(0, 1) })));
        assert_eq!(s.minus, QuadMatrix::from_fn(&f, 2, 2, |i, j| f.rational(if i == j { q_frac(1, 1) } else if j > i { half.clone() } else { q_frac(0, 1) })));
    }

    #[test]
    fn non_nilpotent_defect_rejected() {
        let f = k();
        let id = QuadMatrix::identity(&f, 2);
        let two = id.scale(&f.int(2));
        assert!(matches!(StabilizationProblem::new(id, two, Galois::Conj), Err(UnipotentError::PreconditionViolated(_))));
    }

    #[test]
    fn sqrt_examples() {
        let f = k();
        let id = QuadMatrix::identity(&f, 2);
        assert_eq!(unipotent_sqrt(&id).unwrap(), id);
        let u = QuadMatrix::from_ints(&f, &[&[1, 1], &[0, 1]]);
        let r = unipotent_sqrt(&u).unwrap();
        assert_eq!(r.get(0, 1), &f.rational(q_frac(1, 2)));
        let four = id.scale(&f.int(4));
        assert_eq!(scaled_sqrt(&four, &f.int(2)).unwrap(), id.scale(&f.int(2)));
        assert_eq!(scaled_sqrt(&four, &f.int(-2)).unwrap(), id.scale(&f.int(-2)));
        assert!(scaled_sqrt(&four, &f.int(3)).is_err());
        assert!(scaled_sqrt(&four, &f.zero()).is_err());
    }
}
