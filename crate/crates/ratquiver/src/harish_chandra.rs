//! Rational sl2 Harish-Chandra modules in the block of infinitesimal character `ell^2`,
//! stored on a finite weight window with closed-form tails, and the comparison with
//! nilpotent rational representations of the Gelfand quiver (cyclic quiver for `ell = 0`).
//!
//! Conventions: `X` raises weights by 2, `Y` lowers them by 2, and the Casimir is
//! `C = H^2 - 2H + 4XY + 1 = H^2 + 2H + 4YX + 1`. The rational structure on `M_w` is the
//! semilinear map `v -> P_w conj(v)` into `M_{-w}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact_algebra::{q, QuadElement, QuadField, QuadMatrix, SemilinearMap, Galois, Q};
use crate::quiver::fixtures;
use crate::report::Report;
use crate::representations::{is_isomorphism, rep_isomorphic, validate_rep, QuiverRep, RepError, RepMorphism};
use crate::unipotent::{scaled_sqrt, stabilize, Stabilization, StabilizationProblem, UnipotentError};

/// Default number of stable weights kept on each side beyond the boundary weights.
pub const DEFAULT_MARGIN: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HcError {
    #[error("weight {0} is outside the window")]
    OutOfWindow(i64),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("bad parity: {0}")]
    BadParity(String),
    #[error("malformed module: {0}")]
    Shape(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("no isomorphism found: {0}")]
    IsoSearchFailed(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Unipotent(#[from] UnipotentError),
}

/// A Gelfand-quiver (or cyclic-quiver) representation.
pub type GelfandRep = QuiverRep;

/// Stable data on one side: the Casimir `phi` and, for `ell >= 1`, its root with scalar part `ell`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailSide {
    pub phi: QuadMatrix,
    pub root: Option<QuadMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tails {
    pub minus: TailSide,
    pub plus: TailSide,
}

/// Weights are `w_k = -window + 2k` for `k = 0..=window`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HCModule {
    pub field: QuadField,
    pub ell: usize,
    pub window: usize,
    pub dims: Vec<usize>,
    /// `x[k]: M_{w_k} -> M_{w_{k+1}}`
    pub x: Vec<QuadMatrix>,
    /// `y[k]: M_{w_{k+1}} -> M_{w_k}`
    pub y: Vec<QuadMatrix>,
    /// `rational[k]` is the matrix of the structure map `M_{w_k} -> M_{-w_k}`.
    pub rational: Vec<QuadMatrix>,
    pub tails: Option<Tails>,
}

fn ell_i(ell: usize) -> i64 {
    ell as i64
}

fn int_q(n: i64) -> Q {
    q(n)
}

impl HCModule {
    /// Weight parity, `ell + 1 mod 2`.
    pub fn epsilon(&self) -> usize {
        (self.ell + 1) % 2
    }

    pub fn weights(&self) -> Vec<i64> {
        let n = self.window as i64;
        (0..=self.window).map(|k| -n + 2 * k as i64).collect()
    }

    pub fn index(&self, w: i64) -> Option<usize> {
        let n = self.window as i64;
        if w.abs() > n || (w + n) % 2 != 0 {
            return None;
        }
        Some(((w + n) / 2) as usize)
    }

    fn mirror(&self, k: usize) -> usize {
        self.window - k
    }

    pub fn dim(&self, w: i64) -> Result<usize, HcError> {
        self.index(w).map(|k| self.dims[k]).ok_or(HcError::OutOfWindow(w))
    }

    pub fn rational_at(&self, w: i64) -> Result<&QuadMatrix, HcError> {
        self.index(w).map(|k| &self.rational[k]).ok_or(HcError::OutOfWindow(w))
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `X` on `M_w`, from the window or from the tail closed form.
    pub fn x_at(&self, w: i64) -> Result<QuadMatrix, HcError> {
        if let (Some(k), Some(_)) = (self.index(w), self.index(w + 2)) {
            return Ok(self.x[k].clone());
        }
        self.tail_x(w)
    }

    /// `Y` on `M_w`, landing in `M_{w-2}`.
    pub fn y_at(&self, w: i64) -> Result<QuadMatrix, HcError> {
        if let (Some(k), Some(_)) = (self.index(w - 2), self.index(w)) {
            return Ok(self.y[k].clone());
        }
        self.tail_y(w)
    }

    fn tail(&self, j: i64) -> Result<&TailSide, HcError> {
        let t = self.tails.as_ref().ok_or(HcError::OutOfWindow(j))?;
        Ok(if j > 0 { &t.plus } else { &t.minus })
    }

    /// `xi_{+}^{(j)}` on the stable side containing `j`, `|j| > ell`.
    fn xi_plus(&self, side: &TailSide, j: i64) -> Result<QuadMatrix, HcError> {
        xi(&self.field, self.ell, side, j, true)
    }

    fn tail_x(&self, w: i64) -> Result<QuadMatrix, HcError> {
        let j = w + 1;
        if j.abs() <= ell_i(self.ell) || (w + self.window as i64) % 2 != 0 {
            return Err(HcError::OutOfWindow(w));
        }
        let side = self.tail(j)?;
        Ok(half(&self.xi_plus(side, j)?))
    }

    fn tail_y(&self, w: i64) -> Result<QuadMatrix, HcError> {
        let j = w - 1;
        if j.abs() <= ell_i(self.ell) || (w + self.window as i64) % 2 != 0 {
            return Err(HcError::OutOfWindow(w));
        }
        let side = self.tail(j)?;
        Ok(half(&xi(&self.field, self.ell, side, j, false)?))
    }

    fn stable_dim(&self, w: i64) -> Result<usize, HcError> {
        if let Some(k) = self.index(w) {
            return Ok(self.dims[k]);
        }
        Ok(self.tail(w)?.phi.rows())
    }

    /// The same module on the window `[-n, n]`, extending through the tails when `n`
    /// exceeds the current window.
    pub fn with_window(&self, n: usize) -> Result<HCModule, HcError> {
        if n % 2 != self.window % 2 || n < self.ell + 3 {
            return Err(HcError::BadParity(format!("window {n} incompatible with ell = {}", self.ell)));
        }
        let ni = n as i64;
        let weights: Vec<i64> = (0..=n).map(|k| -ni + 2 * k as i64).collect();
        let cur = self.window as i64;
        let mut dims = Vec::with_capacity(n + 1);
        let mut rational = Vec::with_capacity(n + 1);
        for &w in &weights {
            dims.push(self.stable_dim(w)?);
            let src = w.clamp(-cur, cur);
            rational.push(self.rational_at(src)?.clone());
        }
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for &w in &weights[..n] {
            x.push(self.x_at(w)?);
            y.push(self.y_at(w + 2)?);
        }
        Ok(HCModule { field: self.field.clone(), ell: self.ell, window: n, dims, x, y, rational, tails: self.tails.clone() })
    }

    /// Transport of an endomorphism of `M_w` to `M_{-w}` along the rational structure.
    pub fn transport(&self, w: i64, a: &QuadMatrix) -> Result<QuadMatrix, HcError> {
        let p = self.rational_at(w)?;
        let back = self.rational_at(-w)?;
        Ok(&(p * &a.conj()) * &back.conj())
    }
}

fn half(m: &QuadMatrix) -> QuadMatrix {
    m.scale_q(&crate::exact_algebra::q_frac(1, 2))
}

/// `xi_{+/-}^{(j)}`: `root +/- j` for `ell >= 1`; for `ell = 0` a rational factorization
/// `xi_+ xi_- = phi - j^2` with one scalar factor.
fn xi(field: &QuadField, ell: usize, side: &TailSide, j: i64, plus: bool) -> Result<QuadMatrix, HcError> {
    let n = side.phi.rows();
    let id = QuadMatrix::identity(field, n);
    let jj = field.int(j);
    if let Some(root) = &side.root {
        let shift = id.scale(&jj);
        return Ok(if plus { root + &shift } else { root - &shift });
    }
    if ell != 0 {
        return Err(HcError::Shape("tail root missing".into()));
    }
    let sq = id.scale(&field.int(j * j));
    let inv_j = jj.inv().expect("j != 0 on a stable side");
    Ok(match (j > 0, plus) {
        (true, true) => (&sq - &side.phi).scale(&inv_j),
        (true, false) => id.scale(&field.int(-j)),
        (false, true) => id.scale(&jj),
        (false, false) => (&side.phi - &sq).scale(&inv_j),
    })
}

/// Casimir on `M_w`, from `XY` when `M_{w-2}` is in the window, otherwise from `YX`.
pub fn casimir_matrix(m: &HCModule, w: i64) -> Result<QuadMatrix, HcError> {
    let d = m.dim(w)?;
    let f = &m.field;
    if m.index(w - 2).is_some() {
        let xy = &m.x_at(w - 2)? * &m.y_at(w)?;
        let s = QuadMatrix::scalar(f, d, &f.int((w - 1) * (w - 1)));
        return Ok(&s + &xy.scale(&f.int(4)));
    }
    if m.index(w + 2).is_some() {
        let yx = &m.y_at(w + 2)? * &m.x_at(w)?;
        let s = QuadMatrix::scalar(f, d, &f.int((w + 1) * (w + 1)));
        return Ok(&s + &yx.scale(&f.int(4)));
    }
    Err(HcError::OutOfWindow(w))
}

#[derive(Debug, Clone)]
pub struct PowerProduct {
    /// `4^m X^m Y^m` on `M_{k+1}`.
    pub lhs: QuadMatrix,
    /// `prod_{j<m} (C - (k - 2j)^2)` on `M_{k+1}`.
    pub rhs: QuadMatrix,
    /// `prod_{j<m} (ell^2 - (k - 2j)^2)`.
    pub scalar: Q,
    pub report: Report,
}

/// Checks `4^m X^m Y^m = prod_{j<m} (C - (k-2j)^2)` on `M_{k+1}` and that the right side
/// is the scalar `prod (ell^2 - (k-2j)^2)` plus a nilpotent.
pub fn power_product_identity(m: &HCModule, mpow: usize, k: i64) -> Result<PowerProduct, HcError> {
    let f = &m.field;
    let w = k + 1;
    let d = m.dim(w)?;
    let id = QuadMatrix::identity(f, d);
    let mut down = id.clone();
    let mut cur = w;
    for _ in 0..mpow {
        down = &m.y_at(cur)? * &down;
        cur -= 2;
    }
    let mut up = QuadMatrix::identity(f, m.dim(cur)?);
    for _ in 0..mpow {
        up = &m.x_at(cur)? * &up;
        cur += 2;
    }
    let four_m = f.int(4).pow(mpow as u32);
    let lhs = (&up * &down).scale(&four_m);
    let c = casimir_matrix(m, w)?;
    let ell2 = ell_i(m.ell) * ell_i(m.ell);
    let mut rhs = id.clone();
    let mut scalar = int_q(1);
    for j in 0..mpow as i64 {
        let s = (k - 2 * j) * (k - 2 * j);
        rhs = &rhs * &(&c - &id.scale(&f.int(s)));
        scalar *= int_q(ell2 - s);
    }
    let mut report = Report::new();
    report.push("power product", lhs == rhs, if lhs == rhs { String::new() } else { format!("mismatch on M_{w}") });
    let gap = &rhs - &id.scale(&f.rational(scalar.clone()));
    let nil = gap.nilpotency_exponent();
    report.push("scalar part", nil.is_some(), format!("scalar {scalar}"));
    Ok(PowerProduct { lhs, rhs, scalar, report })
}

#[derive(Debug, Clone)]
pub struct Normalizations {
    pub gamma_star: Q,
    /// `M_{-(ell-1)} -> M_{ell-1}`
    pub x_star: QuadMatrix,
    /// `M_{ell-1} -> M_{-(ell-1)}`
    pub y_star: QuadMatrix,
    pub t_plus: QuadMatrix,
    pub t_minus: QuadMatrix,
}

fn factorial(n: usize) -> Q {
    (1..=n as i64).fold(int_q(1), |acc, k| acc * int_q(k))
}

pub fn normalizations(m: &HCModule) -> Result<Normalizations, HcError> {
    if m.ell == 0 {
        return Err(HcError::NotApplicable("normalizations need ell >= 1".into()));
    }
    let f = &m.field;
    let l = ell_i(m.ell);
    let gamma_star = factorial(m.ell - 1);
    let g_inv = f.rational(int_q(1) / &gamma_star);
    let mut xs = QuadMatrix::identity(f, m.dim(-(l - 1))?);
    let mut w = -(l - 1);
    while w < l - 1 {
        xs = &m.x_at(w)? * &xs;
        w += 2;
    }
    let mut ys = QuadMatrix::identity(f, m.dim(l - 1)?);
    let mut w = l - 1;
    while w > -(l - 1) {
        ys = &m.y_at(w)? * &ys;
        w -= 2;
    }
    // 4^{ell-1} gamma_*^2 normalizes the product to scalar part 1
    let norm = f.rational(int_q(1) / (int_q(4).pow((m.ell - 1) as i32) * &gamma_star * &gamma_star));
    let t = |w: i64| -> Result<QuadMatrix, HcError> {
        let c = casimir_matrix(m, w)?;
        let id = QuadMatrix::identity(f, c.rows());
        let mut acc = id.clone();
        for j in 0..(l - 1) {
            let s = (l - 2 - 2 * j) * (l - 2 - 2 * j);
            acc = &acc * &(&c - &id.scale(&f.int(s)));
        }
        Ok(acc.scale(&norm))
    };
    Ok(Normalizations {
        x_star: xs.scale(&g_inv),
        y_star: ys.scale(&g_inv),
        t_plus: t(l + 1)?,
        t_minus: t(-(l + 1))?,
        gamma_star,
    })
}

/// Output of the comparison functor.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub rep: GelfandRep,
    /// Shared iteration count of the three stabilizations.
    pub iterations: usize,
    /// Stabilized maps on `M_{ell+1}`, `M_{-(ell+1)}` and `M_{-(ell-1)} -> M_{ell-1}`.
    pub limit_plus: QuadMatrix,
    pub limit_minus: QuadMatrix,
    pub limit_star: QuadMatrix,
    pub report: Report,
}

fn structure(field: &QuadField, dims: &[usize], c_maps: Vec<QuadMatrix>) -> Vec<Vec<SemilinearMap>> {
    vec![
        dims.iter().map(|&d| SemilinearMap::identity(field, d)).collect(),
        c_maps.into_iter().map(|m| SemilinearMap::new(Galois::Conj, m)).collect(),
    ]
}

/// The functor to Gelfand-quiver representations (cyclic quiver for `ell = 0`).
pub fn functor_e(m: &HCModule) -> Result<Comparison, HcError> {
    let f = &m.field;
    let l = ell_i(m.ell);
    let mut report = validate_hc(m);
    if !report.ok() {
        return Err(HcError::Invariant(first_failure(&report)));
    }
    if m.ell == 0 {
        let dims = vec![m.dim(-1)?, m.dim(1)?];
        let edges = vec![m.x_at(-1)?, m.y_at(1)?];
        // c_{-1}, c_{+1}: the stabilization of (1, 1) is trivial
        let c_maps = vec![m.rational_at(-1)?.clone(), m.rational_at(1)?.clone()];
        let rep = QuiverRep::new(fixtures::cyclic(), f.clone(), dims.clone(), structure(f, &dims, c_maps), edges)?;
        report.extend("rep: ", validate_rep(&rep));
        if !report.ok() {
            return Err(HcError::Invariant(first_failure(&report)));
        }
        return Ok(Comparison {
            rep,
            iterations: 0,
            limit_plus: QuadMatrix::identity(f, dims[1]),
            limit_minus: QuadMatrix::identity(f, dims[0]),
            limit_star: QuadMatrix::zeros(f, 0, 0),
            report,
        });
    }
    let nm = normalizations(m)?;
    let x_star_inv = nm.x_star.inverse().ok_or_else(|| HcError::Invariant("X_star is not invertible".into()))?;
    let edges = vec![
        m.x_at(-(l + 1))?,
        m.y_at(-(l - 1))?,
        &x_star_inv * &m.y_at(l + 1)?,
        &m.x_at(l - 1)? * &nm.x_star,
    ];
    let dims = vec![m.dim(-(l + 1))?, m.dim(-(l - 1))?, m.dim(l + 1)?];

    let id_plus = QuadMatrix::identity(f, dims[2]);
    let id_minus = QuadMatrix::identity(f, dims[0]);
    let plus_prob = StabilizationProblem::new(id_plus, m.transport(-(l + 1), &nm.t_minus)?, Galois::Id)?;
    let minus_prob = StabilizationProblem::new(nm.t_minus.clone(), id_minus, Galois::Id)?;
    let star_prob = StabilizationProblem::new(nm.x_star.clone(), nm.y_star.clone(), Galois::Id)?;
    let sp = stabilize(&plus_prob)?;
    let sm = stabilize(&minus_prob)?;
    let ss = stabilize(&star_prob)?;
    let iterations = sp.iterations.max(sm.iterations).max(ss.iterations);
    report.push(
        "stabilization: +/- in step",
        swap_relation_holds(m, &sp, &sm)?,
        format!("iterations {} / {} / {}", sp.iterations, sm.iterations, ss.iterations),
    );
    report.push("stabilization: * self-conjugate", star_relation_holds(m, &ss)?, "");

    let c_minus = &m.rational_at(-(l + 1))?.clone() * &sm.plus.conj();
    let c_star = m.rational_at(l - 1)? * &ss.plus.conj();
    let c_plus = m.rational_at(l + 1)? * &sp.plus.conj();
    let rep = QuiverRep::new(fixtures::gelfand(), f.clone(), dims.clone(), structure(f, &dims, vec![c_minus, c_star, c_plus]), edges)?;
    report.extend("rep: ", validate_rep(&rep));
    if !report.ok() {
        return Err(HcError::Invariant(first_failure(&report)));
    }
    Ok(Comparison { rep, iterations, limit_plus: sp.plus, limit_minus: sm.plus, limit_star: ss.plus, report })
}

fn iterate_at(s: &Stabilization, k: usize) -> &StabilizationProblem {
    &s.iterates[k.min(s.iterates.len() - 1)]
}

/// Step by step, the (-) iterate is the transport of the (+) iterate with the two maps exchanged.
fn swap_relation_holds(m: &HCModule, sp: &Stabilization, sm: &Stabilization) -> Result<bool, HcError> {
    let w = ell_i(m.ell) + 1;
    let steps = sp.iterates.len().max(sm.iterates.len());
    for k in 0..steps {
        let (p, n) = (iterate_at(sp, k), iterate_at(sm, k));
        if n.plus != m.transport(w, &p.minus)? || n.minus != m.transport(w, &p.plus)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Each (*) iterate satisfies `minus = c plus c` with `c` the structure map on `M_{ell-1}`.
fn star_relation_holds(m: &HCModule, ss: &Stabilization) -> Result<bool, HcError> {
    let p = m.rational_at(ell_i(m.ell) - 1)?;
    for it in &ss.iterates {
        if it.minus != &(p * &it.plus.conj()) * &p.conj() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn first_failure(r: &Report) -> String {
    r.failures().next().map(|c| format!("{}: {}", c.name, c.detail)).unwrap_or_default()
}

/// Normal-form data from which a module is assembled.
struct NormalForm {
    field: QuadField,
    ell: usize,
    window: usize,
    /// dimensions of the (-), (*), (+) spaces
    dims: [usize; 3],
    rational: [QuadMatrix; 3],
    /// `[a-, b-, a+, b+]`, or `[a, b]` when `ell = 0`
    edges: Vec<QuadMatrix>,
    star_root: Option<QuadMatrix>,
    tails: Tails,
}

fn side_of(ell: usize, w: i64) -> usize {
    let l = ell_i(ell);
    if w > l {
        2
    } else if w <= -(l + 1) {
        0
    } else {
        1
    }
}

fn assemble(nf: NormalForm) -> Result<HCModule, HcError> {
    let l = ell_i(nf.ell);
    let n = nf.window as i64;
    let f = nf.field.clone();
    let weights: Vec<i64> = (0..=nf.window).map(|k| -n + 2 * k as i64).collect();
    let dims: Vec<usize> = weights.iter().map(|&w| nf.dims[side_of(nf.ell, w)]).collect();
    let rational: Vec<QuadMatrix> = weights.iter().map(|&w| nf.rational[side_of(nf.ell, w)].clone()).collect();
    let mut m = HCModule { field: f.clone(), ell: nf.ell, window: nf.window, dims, x: vec![], y: vec![], rational, tails: Some(nf.tails) };
    let star = |j: i64, plus: bool| -> Result<QuadMatrix, HcError> {
        let root = nf.star_root.as_ref().ok_or_else(|| HcError::Shape("missing interior root".into()))?;
        let shift = QuadMatrix::scalar(&f, root.rows(), &f.int(j));
        Ok(half(&if plus { root + &shift } else { root - &shift }))
    };
    let mut x = Vec::with_capacity(nf.window);
    let mut y = Vec::with_capacity(nf.window);
    for &w in &weights[..nf.window] {
        let j = w + 1;
        let (xw, yw) = if nf.ell == 0 {
            if w == -1 {
                (nf.edges[0].clone(), nf.edges[1].clone())
            } else {
                (m.tail_x(w)?, m.tail_y(w + 2)?)
            }
        } else {
            let xw = if w == -(l + 1) {
                nf.edges[0].clone()
            } else if w == l - 1 {
                nf.edges[3].clone()
            } else if j.abs() < l {
                star(j, true)?
            } else {
                m.tail_x(w)?
            };
            // Y on M_{w+2}
            let yw = if w + 2 == -(l - 1) {
                nf.edges[1].clone()
            } else if w + 2 == l + 1 {
                nf.edges[2].clone()
            } else if j.abs() < l {
                star(j, false)?
            } else {
                m.tail_y(w + 2)?
            };
            (xw, yw)
        };
        x.push(xw);
        y.push(yw);
    }
    m.x = x;
    m.y = y;
    Ok(m)
}

fn default_window(ell: usize) -> usize {
    ell + 1 + 2 * DEFAULT_MARGIN
}

/// Quasi-inverse of the comparison functor on the default window `ell + 9`.
pub fn inverse_e(v: &GelfandRep, ell: usize) -> Result<HCModule, HcError> {
    inverse_e_with_margin(v, ell, DEFAULT_MARGIN)
}

/// Assembles the module in normal form on the window `ell + 1 + 2 margin`.
pub fn inverse_e_with_margin(v: &GelfandRep, ell: usize, margin: usize) -> Result<HCModule, HcError> {
    let f = &v.field;
    let check = validate_rep(v);
    if !check.ok() {
        return Err(RepError::Invalid(first_failure(&check)).into());
    }
    let l = ell_i(ell);
    let window = ell + 1 + 2 * margin;
    let c = 1;
    let four = f.int(4);
    let id = |d: usize| QuadMatrix::identity(f, d);
    match (v.quiver.vertex_count(), ell) {
        (2, 0) => {
            let (a, b) = (&v.edges[0], &v.edges[1]);
            let phi_minus = (b * a).scale(&four);
            let phi_plus = (a * b).scale(&four);
            let nf = NormalForm {
                field: f.clone(),
                ell,
                window,
                dims: [v.dims[0], 0, v.dims[1]],
                rational: [v.phi(0, c).matrix.clone(), QuadMatrix::zeros(f, 0, 0), v.phi(1, c).matrix.clone()],
                edges: v.edges.clone(),
                star_root: None,
                tails: Tails { minus: TailSide { phi: phi_minus, root: None }, plus: TailSide { phi: phi_plus, root: None } },
            };
            assemble(nf)
        }
        (3, e) if e >= 1 => {
            let e_ = &v.edges;
            let ell2 = f.int(l * l);
            let phi = |n: QuadMatrix| -> QuadMatrix { &id(n.rows()).scale(&ell2) + &n.scale(&four) };
            let phi_minus = phi(&e_[1] * &e_[0]);
            let phi_star = phi(&e_[0] * &e_[1]);
            let phi_plus = phi(&e_[3] * &e_[2]);
            let gamma = f.int(l);
            let root = |p: &QuadMatrix| scaled_sqrt(p, &gamma);
            let nf = NormalForm {
                field: f.clone(),
                ell,
                window,
                dims: [v.dims[0], v.dims[1], v.dims[2]],
                rational: [v.phi(0, c).matrix.clone(), v.phi(1, c).matrix.clone(), v.phi(2, c).matrix.clone()],
                edges: v.edges.clone(),
                star_root: Some(root(&phi_star)?),
                tails: Tails {
                    minus: TailSide { root: Some(root(&phi_minus)?), phi: phi_minus },
                    plus: TailSide { root: Some(root(&phi_plus)?), phi: phi_plus },
                },
            };
            assemble(nf)
        }
        _ => Err(HcError::NotApplicable(format!("ell = {ell} does not match a quiver with {} vertices", v.quiver.vertex_count()))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessPath {
    /// Conjugation by the stabilized map on `+`, identity elsewhere.
    Constructive,
    /// Seeded search through the Hom space.
    Search,
}

#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub module: HCModule,
    pub image: GelfandRep,
    /// Isomorphism from the input to `image`, one matrix per vertex.
    pub witness: RepMorphism,
    pub path: WitnessPath,
    /// Whether the stabilized map on `*` was the identity.
    pub star_identity: bool,
}

/// `E(inverse_E(v))` together with an isomorphism `v -> E(inverse_E(v))`.
pub fn roundtrip_hc(v: &GelfandRep, ell: usize) -> Result<RoundTrip, HcError> {
    let module = inverse_e_with_margin(v, ell, DEFAULT_MARGIN)?;
    let cmp = functor_e(&module)?;
    let f = &v.field;
    let star_identity = cmp.limit_star.is_identity();
    let mut candidate: RepMorphism = v.dims.iter().map(|&d| QuadMatrix::identity(f, d)).collect();
    if ell >= 1 && star_identity {
        // X_* = g(n_*) while the (+) limit is g(n_+)^{-1}; the identity on - and *
        // and the inverse limit on + intertwine every edge and structure map
        if let Some(inv) = cmp.limit_plus.inverse() {
            candidate[2] = inv;
        }
    }
    if is_isomorphism(v, &cmp.rep, &candidate) {
        return Ok(RoundTrip { module, image: cmp.rep, witness: candidate, path: WitnessPath::Constructive, star_identity });
    }
    match rep_isomorphic(v, &cmp.rep)? {
        Some(w) => Ok(RoundTrip { module, image: cmp.rep, witness: w, path: WitnessPath::Search, star_identity }),
        None => Err(HcError::IsoSearchFailed("input and its round trip".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleKind {
    Finite,
    Discrete,
    Principal,
    PrincipalDual,
}

impl ExampleKind {
    pub const ALL: [ExampleKind; 4] = [ExampleKind::Finite, ExampleKind::Discrete, ExampleKind::Principal, ExampleKind::PrincipalDual];

    pub fn label(self) -> &'static str {
        match self {
            ExampleKind::Finite => "finite",
            ExampleKind::Discrete => "discrete",
            ExampleKind::Principal => "principal",
            ExampleKind::PrincipalDual => "principal_dual",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        ExampleKind::ALL.into_iter().find(|k| k.label() == s)
    }
}

/// The standard block members: the finite-dimensional module of dimension `ell`, the
/// discrete series pair, and the two principal series with their opposite extensions.
pub fn build_example(kind: ExampleKind, ell: usize, epsilon: usize) -> Result<HCModule, HcError> {
    build_example_window(kind, ell, epsilon, default_window(ell))
}

pub fn build_example_window(kind: ExampleKind, ell: usize, epsilon: usize, window: usize) -> Result<HCModule, HcError> {
    if epsilon != (ell + 1) % 2 {
        return Err(HcError::BadParity(format!("epsilon = {epsilon} but weights of the ell = {ell} block have parity {}", (ell + 1) % 2)));
    }
    if window < ell + 3 || window % 2 != (ell + 1) % 2 {
        return Err(HcError::BadParity(format!("window {window} incompatible with ell = {ell}")));
    }
    if ell == 0 && kind != ExampleKind::Discrete {
        return Err(HcError::NotApplicable(format!("{} needs ell >= 1", kind.label())));
    }
    let f = QuadField::gaussian();
    let (ds, dpm, a, b) = match kind {
        ExampleKind::Finite => (1, 0, 0, 0),
        ExampleKind::Discrete => (0, 1, 0, 0),
        ExampleKind::Principal => (1, 1, 0, 1),
        ExampleKind::PrincipalDual => (1, 1, 1, 0),
    };
    let ds = if ell == 0 { 0 } else { ds };
    let scal = |r: usize, c: usize, x: i64| QuadMatrix::from_fn(&f, r, c, |_, _| f.int(x));
    let l = ell_i(ell);
    let side = |d: usize| TailSide {
        phi: QuadMatrix::scalar(&f, d, &f.int(l * l)),
        root: if ell == 0 { None } else { Some(QuadMatrix::scalar(&f, d, &f.int(l))) },
    };
    let edges = if ell == 0 {
        vec![scal(dpm, dpm, 0), scal(dpm, dpm, 0)]
    } else {
        vec![scal(ds, dpm, a), scal(dpm, ds, b), scal(ds, dpm, a), scal(dpm, ds, b)]
    };
    let nf = NormalForm {
        field: f.clone(),
        ell,
        window,
        dims: [dpm, ds, dpm],
        rational: [QuadMatrix::identity(&f, dpm), QuadMatrix::identity(&f, ds), QuadMatrix::identity(&f, dpm)],
        edges,
        star_root: if ell == 0 { None } else { Some(QuadMatrix::scalar(&f, ds, &f.int(l))) },
        tails: Tails { minus: side(dpm), plus: side(dpm) },
    };
    assemble(nf)
}

/// The Gelfand representation with two-dimensional outer spaces whose composite
/// `b a` on each outer space is a nonzero square-zero map; its module has Casimir with a
/// nonzero nilpotent part on the outer weights.
pub fn extension_rep(field: &QuadField) -> Result<GelfandRep, HcError> {
    let a = QuadMatrix::from_ints(field, &[&[1, 0]]);
    let b = QuadMatrix::from_ints(field, &[&[0], &[1]]);
    Ok(QuiverRep::canonical(fixtures::gelfand(), field.clone(), vec![2, 1, 2], vec![a.clone(), b.clone(), a, b])?)
}

pub fn build_extension(ell: usize) -> Result<HCModule, HcError> {
    if ell == 0 {
        return Err(HcError::NotApplicable("the extension fixture needs ell >= 1".into()));
    }
    inverse_e_with_margin(&extension_rep(&QuadField::gaussian())?, ell, DEFAULT_MARGIN)
}

/// Checks every module invariant on the window and the tail consistency.
pub fn validate_hc(m: &HCModule) -> Report {
    let mut r = Report::new();
    let n = m.window;
    if n < m.ell + 3 || n % 2 != (m.ell + 1) % 2 {
        r.fail("window", format!("window {n} must be >= ell + 3 = {} with parity of ell + 1", m.ell + 3));
        return r;
    }
    if m.dims.len() != n + 1 || m.x.len() != n || m.y.len() != n || m.rational.len() != n + 1 {
        r.fail("shapes", "per-weight data has the wrong length");
        return r;
    }
    let mut bad = Vec::new();
    for k in 0..n {
        if m.x[k].rows() != m.dims[k + 1] || m.x[k].cols() != m.dims[k] || m.y[k].rows() != m.dims[k] || m.y[k].cols() != m.dims[k + 1] {
            bad.push(k);
        }
    }
    for k in 0..=n {
        let p = &m.rational[k];
        if p.rows() != m.dims[m.mirror(k)] || p.cols() != m.dims[k] {
            bad.push(k);
        }
    }
    if !bad.is_empty() {
        r.fail("shapes", format!("bad matrix shapes at indices {bad:?}"));
        return r;
    }
    r.pass("shapes");
    r.pass("central character");
    let f = &m.field;
    let weights = m.weights();

    let mut bracket_bad = Vec::new();
    for &w in &weights {
        let d = m.dims[m.index(w).expect("window weight")];
        let (Ok(xl), Ok(yl), Ok(yr), Ok(xr)) = (m.x_at(w - 2), m.y_at(w), m.y_at(w + 2), m.x_at(w)) else {
            continue;
        };
        let lhs = &(&xl * &yl) - &(&yr * &xr);
        if lhs != QuadMatrix::scalar(f, d, &f.int(w)) {
            bracket_bad.push(w);
        }
    }
    r.push("bracket", bracket_bad.is_empty(), if bracket_bad.is_empty() { String::new() } else { format!("weights {bracket_bad:?}") });

    let ell2 = f.int(ell_i(m.ell) * ell_i(m.ell));
    let mut cas_bad = Vec::new();
    for &w in &weights {
        match casimir_matrix(m, w) {
            Ok(c) => {
                let gap = &c - &QuadMatrix::scalar(f, c.rows(), &ell2);
                if gap.nilpotency_exponent().is_none() {
                    cas_bad.push(w);
                }
            }
            Err(_) => cas_bad.push(w),
        }
    }
    r.push("casimir", cas_bad.is_empty(), if cas_bad.is_empty() { String::new() } else { format!("C - ell^2 not nilpotent at {cas_bad:?}") });

    let mut coc_bad = Vec::new();
    for k in 0..=n {
        let back = &m.rational[m.mirror(k)];
        if !(back * &m.rational[k].conj()).is_identity() {
            coc_bad.push(weights[k]);
        }
    }
    r.push("rational cocycle", coc_bad.is_empty(), if coc_bad.is_empty() { String::new() } else { format!("weights {coc_bad:?}") });

    let mut swap_bad = Vec::new();
    for k in 0..n {
        let w = weights[k];
        // c X c^{-1} on M_{-w} is Y, and c Y c^{-1} on M_{-(w+2)} is X
        let cx = &(&m.rational[k + 1] * &m.x[k].conj()) * &m.rational[m.mirror(k)].conj();
        let cy = &(&m.rational[k] * &m.y[k].conj()) * &m.rational[m.mirror(k + 1)].conj();
        if cx != m.y[m.mirror(k + 1)] || cy != m.x[m.mirror(k + 1)] {
            swap_bad.push(w);
        }
    }
    r.push("rational swap", swap_bad.is_empty(), if swap_bad.is_empty() { String::new() } else { format!("weights {swap_bad:?}") });

    if let Some(t) = &m.tails {
        let mut tail_bad = Vec::new();
        for side in [&t.minus, &t.plus] {
            if !side.phi.is_square() || side.root.as_ref().is_some_and(|s| s.rows() != side.phi.rows() || s * s != side.phi) {
                tail_bad.push("root".to_string());
            }
            if m.ell == 0 && side.root.is_some() || m.ell > 0 && side.root.is_none() {
                tail_bad.push("root presence".to_string());
            }
        }
        let l = ell_i(m.ell);
        for (k, &w) in weights.iter().enumerate() {
            if w.abs() > l {
                let side = if w > 0 { &t.plus } else { &t.minus };
                if side.phi.rows() != m.dims[k] {
                    tail_bad.push(format!("dim at {w}"));
                } else if casimir_matrix(m, w).map(|c| c != side.phi).unwrap_or(true) {
                    tail_bad.push(format!("casimir at {w}"));
                }
            }
            if k < n {
                if let Ok(tx) = m.tail_x(w) {
                    if tx != m.x[k] {
                        tail_bad.push(format!("X at {w}"));
                    }
                }
                if let Ok(ty) = m.tail_y(w + 2) {
                    if ty != m.y[k] {
                        tail_bad.push(format!("Y at {}", w + 2));
                    }
                }
            }
        }
        r.push("tails", tail_bad.is_empty(), tail_bad.join(", "));
    }
    r
}

/// A Q-linear system in the real and imaginary parts of L-valued unknowns.
struct SplitSystem {
    d: Q,
    unknowns: usize,
    rows: Vec<Vec<Q>>,
}

impl SplitSystem {
    fn new(field: &QuadField, unknowns: usize) -> Self {
        SplitSystem { d: field.d().clone(), unknowns, rows: Vec::new() }
    }

    /// Adds `sum coeff * (conj?)(x_idx) = 0`.
    fn add(&mut self, terms: &[(usize, QuadElement, bool)]) {
        let zero = int_q(0);
        let mut re = vec![zero.clone(); 2 * self.unknowns];
        let mut im = vec![zero; 2 * self.unknowns];
        let mut any = false;
        for (idx, c, conj) in terms {
            if c.is_zero() {
                continue;
            }
            any = true;
            let (al, be) = (c.a(), c.b());
            let s = if *conj { int_q(-1) } else { int_q(1) };
            re[2 * idx] += al;
            re[2 * idx + 1] += &self.d * be * &s;
            im[2 * idx] += be;
            im[2 * idx + 1] += al * &s;
        }
        if any {
            self.rows.push(re);
            self.rows.push(im);
        }
    }

    fn kernel(&self, field: &QuadField) -> Vec<Vec<Q>> {
        let cols = 2 * self.unknowns;
        if self.rows.is_empty() {
            return (0..cols).map(|i| (0..cols).map(|j| int_q((i == j) as i64)).collect()).collect();
        }
        let mat = QuadMatrix::from_fn(field, self.rows.len(), cols, |i, j| field.rational(self.rows[i][j].clone()));
        mat.kernel_basis().into_iter().map(|v| v.iter().map(|x| x.a().clone()).collect()).collect()
    }
}

/// K-basis of the rational morphisms `a -> b` on the window.
pub fn hc_hom_space(a: &HCModule, b: &HCModule) -> Result<Vec<Vec<QuadMatrix>>, HcError> {
    if a.ell != b.ell || a.window != b.window || a.field != b.field {
        return Err(HcError::Shape("modules must share ell, window and field".into()));
    }
    let f = &a.field;
    let n = a.window;
    let mut off = Vec::with_capacity(n + 1);
    let mut total = 0;
    for k in 0..=n {
        off.push(total);
        total += b.dims[k] * a.dims[k];
    }
    let var = |k: usize, r: usize, c: usize| off[k] + r * a.dims[k] + c;
    let mut sys = SplitSystem::new(f, total);
    let neg = |x: &QuadElement| -x;
    for k in 0..n {
        // f_{k+1} X^a_k = X^b_k f_k on M_{w_k}
        for r in 0..b.dims[k + 1] {
            for c in 0..a.dims[k] {
                let mut t = Vec::new();
                for s in 0..a.dims[k + 1] {
                    t.push((var(k + 1, r, s), a.x[k].get(s, c).clone(), false));
                }
                for s in 0..b.dims[k] {
                    t.push((var(k, s, c), neg(b.x[k].get(r, s)), false));
                }
                sys.add(&t);
            }
        }
        // f_k Y^a_k = Y^b_k f_{k+1} on M_{w_{k+1}}
        for r in 0..b.dims[k] {
            for c in 0..a.dims[k + 1] {
                let mut t = Vec::new();
                for s in 0..a.dims[k] {
                    t.push((var(k, r, s), a.y[k].get(s, c).clone(), false));
                }
                for s in 0..b.dims[k + 1] {
                    t.push((var(k + 1, s, c), neg(b.y[k].get(r, s)), false));
                }
                sys.add(&t);
            }
        }
    }
    for k in 0..=n {
        // f_{-w} P^a_w = P^b_w conj(f_w)
        let mk = a.mirror(k);
        for r in 0..b.dims[mk] {
            for c in 0..a.dims[k] {
                let mut t = Vec::new();
                for s in 0..a.dims[mk] {
                    t.push((var(mk, r, s), a.rational[k].get(s, c).clone(), false));
                }
                for s in 0..b.dims[k] {
                    t.push((var(k, s, c), neg(b.rational[k].get(r, s)), true));
                }
                sys.add(&t);
            }
        }
    }
    let basis = sys
        .kernel(f)
        .into_iter()
        .map(|v| {
            (0..=n)
                .map(|k| {
                    QuadMatrix::from_fn(f, b.dims[k], a.dims[k], |r, c| {
                        let i = var(k, r, c);
                        f.element(v[2 * i].clone(), v[2 * i + 1].clone())
                    })
                })
                .collect()
        })
        .collect();
    Ok(basis)
}

pub fn hc_hom_dim(a: &HCModule, b: &HCModule) -> Result<usize, HcError> {
    hc_hom_space(a, b).map(|b| b.len())
}

/// Seeded search for a rational isomorphism of modules on the window.
pub fn hc_isomorphic(a: &HCModule, b: &HCModule) -> Result<Option<Vec<QuadMatrix>>, HcError> {
    if a.dims != b.dims {
        return Ok(None);
    }
    let basis = hc_hom_space(a, b)?;
    let f = &a.field;
    let invertible = |psi: &[QuadMatrix]| psi.iter().all(|p| p.inverse().is_some());
    if basis.is_empty() {
        return Ok(if a.total_dim() == 0 { Some(a.dims.iter().map(|_| QuadMatrix::zeros(f, 0, 0)).collect()) } else { None });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c17);
    for attempt in 0..64 {
        let coeffs: Vec<i64> = (0..basis.len()).map(|i| if attempt == 0 { (i == 0) as i64 } else { rng.random_range(-40..=40) }).collect();
        let mut psi: Vec<QuadMatrix> = basis[0].iter().map(|p| QuadMatrix::zeros(f, p.rows(), p.cols())).collect();
        for (bv, &c) in basis.iter().zip(&coeffs) {
            let s = f.int(c);
            for (o, p) in psi.iter_mut().zip(bv) {
                *o = &*o + &p.scale(&s);
            }
        }
        if invertible(&psi) {
            return Ok(Some(psi));
        }
    }
    Ok(None)
}
