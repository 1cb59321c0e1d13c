//! Rational quiver representations, species representations, Hom spaces with
//! Galois descent, and the equivalence functors between the two sides.
//!
//! The linear-algebra layer covers groups of order at most 2. A group element is
//! realized as the identity or the conjugation of the quadratic field; the
//! trivial group means "plain L-linear data".

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact_algebra::{fixed_space, descend_subspace, AlgebraError, Galois, QuadElement, QuadField, QuadMatrix, QuadVector, SemilinearMap};
use crate::gsets::{FiniteGroup, GroupError, Subgroup};
use crate::quiver::RationalQuiver;
use crate::report::Report;
use crate::species::{species_of_quiver, EtaleSpecies};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepError {
    #[error("linear algebra is implemented for groups of order <= 2, got order {0}")]
    NotQuadratic(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid representation: {0}")]
    Invalid(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Field automorphism realizing a group element of a group of order <= 2.
pub fn galois_of(group: &FiniteGroup, g: usize) -> Galois {
    if g == group.identity() {
        Galois::Id
    } else {
        Galois::Conj
    }
}

fn check_quadratic(group: &FiniteGroup) -> Result<(), RepError> {
    if group.order() > 2 {
        return Err(RepError::NotQuadratic(group.order()));
    }
    Ok(())
}

/// The non-identity element of a group of order 2.
fn conj_element(group: &FiniteGroup) -> Option<usize> {
    group.elements().find(|&g| g != group.identity())
}

/// A representation of a rational quiver: spaces L^{dims[v]}, semilinear maps
/// `semilinear[g][v]`: M(v) -> M(g v) and edge matrices `edges[e]`: M(src) -> M(tgt).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiverRep {
    pub quiver: RationalQuiver,
    pub field: QuadField,
    pub dims: Vec<usize>,
    pub semilinear: Vec<Vec<SemilinearMap>>,
    pub edges: Vec<QuadMatrix>,
}

impl QuiverRep {
    pub fn new(
        quiver: RationalQuiver,
        field: QuadField,
        dims: Vec<usize>,
        semilinear: Vec<Vec<SemilinearMap>>,
        edges: Vec<QuadMatrix>,
    ) -> Result<Self, RepError> {
        check_quadratic(&quiver.group)?;
        let r = QuiverRep { quiver, field, dims, semilinear, edges };
        r.check_shapes()?;
        Ok(r)
    }

    /// Representation whose rational structure is entrywise conjugation on every vertex.
    pub fn canonical(quiver: RationalQuiver, field: QuadField, dims: Vec<usize>, edges: Vec<QuadMatrix>) -> Result<Self, RepError> {
        check_quadratic(&quiver.group)?;
        let g = quiver.group.clone();
        let semilinear = g
            .elements()
            .map(|x| {
                (0..quiver.vertex_count())
                    .map(|v| SemilinearMap::new(galois_of(&g, x), QuadMatrix::identity(&field, dims[v])))
                    .collect()
            })
            .collect();
        Self::new(quiver, field, dims, semilinear, edges)
    }

    pub fn zero(quiver: RationalQuiver, field: QuadField) -> Result<Self, RepError> {
        let nv = quiver.vertex_count();
        let edges = vec![QuadMatrix::zeros(&field, 0, 0); quiver.edge_count()];
        Self::canonical(quiver, field, vec![0; nv], edges)
    }

    fn check_shapes(&self) -> Result<(), RepError> {
        let q = &self.quiver;
        if self.dims.len() != q.vertex_count() || self.edges.len() != q.edge_count() {
            return Err(RepError::Shape("dimension vector or edge list has the wrong length".into()));
        }
        if self.semilinear.len() != q.group.order() || self.semilinear.iter().any(|row| row.len() != q.vertex_count()) {
            return Err(RepError::Shape("semilinear family must have one map per (group element, vertex)".into()));
        }
        for (e, m) in self.edges.iter().enumerate() {
            if m.rows() != self.dims[q.tgt[e]] || m.cols() != self.dims[q.src[e]] {
                return Err(RepError::Shape(format!(
                    "edge {} is {}x{}, expected {}x{}",
                    q.edge_names[e],
                    m.rows(),
                    m.cols(),
                    self.dims[q.tgt[e]],
                    self.dims[q.src[e]]
                )));
            }
        }
        for g in q.group.elements() {
            for v in 0..q.vertex_count() {
                let s = &self.semilinear[g][v];
                let w = q.vertices.act(g, v);
                if s.matrix.cols() != self.dims[v] || s.matrix.rows() != self.dims[w] || s.sigma != galois_of(&q.group, g) {
                    return Err(RepError::Shape(format!("semilinear map at ({}, {g}) has the wrong shape or twist", q.vertex_names[v])));
                }
            }
        }
        Ok(())
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// phi_{v,g}
    pub fn phi(&self, v: usize, g: usize) -> &SemilinearMap {
        &self.semilinear[g][v]
    }

    /// Composite of a path given in traversal order.
    pub fn path_matrix(&self, p: &[usize]) -> QuadMatrix {
        let q = &self.quiver;
        let start = q.path_source(p);
        let mut m = QuadMatrix::identity(&self.field, self.dims[start]);
        for &e in p {
            m = &self.edges[e] * &m;
        }
        m
    }

    /// Smallest k such that every path of length k acts by zero, if the representation is nilpotent.
    pub fn vanishing_length(&self) -> Option<usize> {
        let q = &self.quiver;
        // spans[(s, t)] = basis of composites of paths of the current length from s to t
        let mut spans: BTreeMap<(usize, usize), Vec<QuadMatrix>> = BTreeMap::new();
        for e in 0..q.edge_count() {
            spans.entry((q.src[e], q.tgt[e])).or_default().push(self.edges[e].clone());
        }
        reduce_spans(&mut spans);
        let bound = self.total_dim() + 1;
        for k in 1..=bound {
            if spans.is_empty() {
                return Some(k);
            }
            let mut next: BTreeMap<(usize, usize), Vec<QuadMatrix>> = BTreeMap::new();
            for ((s, t), mats) in &spans {
                for e in (0..q.edge_count()).filter(|&e| q.src[e] == *t) {
                    for m in mats {
                        next.entry((*s, q.tgt[e])).or_default().push(&self.edges[e] * m);
                    }
                }
            }
            reduce_spans(&mut next);
            spans = next;
        }
        None
    }

    pub fn is_nilpotent(&self) -> bool {
        self.vanishing_length().is_some()
    }

    /// Structural validity: cocycle, equivariance and relations (nilpotency excluded).
    pub fn is_valid(&self) -> bool {
        let r = validate_rep(self);
        r.checks.iter().filter(|c| c.name != "nilpotent").all(|c| c.passed)
    }
}

/// Keeps a basis of each span of matrices, dropping empty entries.
fn reduce_spans(spans: &mut BTreeMap<(usize, usize), Vec<QuadMatrix>>) {
    for mats in spans.values_mut() {
        *mats = matrix_span_basis(mats);
    }
    spans.retain(|_, v| !v.is_empty());
}

fn matrix_span_basis(mats: &[QuadMatrix]) -> Vec<QuadMatrix> {
    let Some(first) = mats.first() else { return Vec::new() };
    let (r, c) = (first.rows(), first.cols());
    let field = first.field().clone();
    let rows: Vec<Vec<QuadElement>> = mats.iter().map(|m| m.entries().to_vec()).collect();
    if r * c == 0 {
        return Vec::new();
    }
    let stacked = QuadMatrix::from_rows(&field, rows).expect("uniform shapes");
    let (red, pivots) = stacked.rref();
    (0..pivots.len())
        .map(|i| QuadMatrix::new(&field, r, c, (0..r * c).map(|j| red.get(i, j).clone()).collect()).expect("shape"))
        .collect()
}

/// Checks cocycle, edge equivariance, relations and nilpotency.
pub fn validate_rep(r: &QuiverRep) -> Report {
    let mut rep = Report::new();
    let q = &r.quiver;
    let g = &q.group;

    let mut bad = Vec::new();
    for x in g.elements() {
        for v in 0..q.vertex_count() {
            if r.dims[v] != r.dims[q.vertices.act(x, v)] {
                bad.push(format!("dim M({}) != dim M({x}.{})", q.vertex_names[v], q.vertex_names[v]));
            }
        }
    }
    rep.push("dimensions", bad.is_empty(), bad.join("; "));

    let mut bad = Vec::new();
    for v in 0..q.vertex_count() {
        if !r.phi(v, g.identity()).is_identity() {
            bad.push(format!("phi({}, id) is not the identity", q.vertex_names[v]));
        }
        for t in g.elements() {
            for s in g.elements() {
                let tv = q.vertices.act(t, v);
                let lhs = r.phi(tv, s).after(r.phi(v, t));
                if lhs != *r.phi(v, g.mul(s, t)) {
                    bad.push(format!("(v={}, s={s}, t={t})", q.vertex_names[v]));
                }
            }
        }
    }
    rep.push("cocycle", bad.is_empty(), bad.join("; "));

    let mut bad = Vec::new();
    for e in 0..q.edge_count() {
        for s in g.elements() {
            let se = q.edges.act(s, e);
            let lhs = r.phi(q.src[e], s).then_linear(&r.edges[se]);
            let rhs = r.phi(q.tgt[e], s).after_linear(&r.edges[e]);
            if lhs != rhs {
                bad.push(format!("(e={}, s={s})", q.edge_names[e]));
            }
        }
    }
    rep.push("edge equivariance", bad.is_empty(), bad.join("; "));

    let mut bad = Vec::new();
    for (k, (p1, p2)) in q.relations.iter().enumerate() {
        if r.path_matrix(p1) != r.path_matrix(p2) {
            bad.push(format!("relation {k}"));
        }
    }
    rep.push("relations", bad.is_empty(), bad.join("; "));

    match r.vanishing_length() {
        Some(k) => rep.push("nilpotent", true, format!("paths of length {k} vanish")),
        None => rep.fail("nilpotent", "some cycle acts non-nilpotently"),
    }
    rep
}

/// Restricts the rational structure to a subgroup; spaces and edge maps are unchanged.
pub fn rep_base_change(r: &QuiverRep, h: &Subgroup) -> Result<QuiverRep, RepError> {
    let quiver = r.quiver.base_change(h)?;
    let semilinear = h.elements().iter().map(|&x| r.semilinear[x].clone()).collect();
    QuiverRep::new(quiver, r.field.clone(), r.dims.clone(), semilinear, r.edges.clone())
}

/// A morphism is one matrix per vertex.
pub type RepMorphism = Vec<QuadMatrix>;

#[derive(Debug, Clone)]
pub struct HomSpace {
    /// K-basis of the rational morphisms.
    pub basis: Vec<RepMorphism>,
    /// Dimension over L of the morphisms of the underlying L-representations.
    pub dim_l: usize,
}

impl HomSpace {
    pub fn dim_k(&self) -> usize {
        self.basis.len()
    }
}

fn hom_offsets(m: &QuiverRep, n: &QuiverRep) -> (Vec<usize>, usize) {
    let mut off = Vec::with_capacity(m.dims.len());
    let mut total = 0;
    for v in 0..m.dims.len() {
        off.push(total);
        total += n.dims[v] * m.dims[v];
    }
    (off, total)
}

fn unpack(m: &QuiverRep, n: &QuiverRep, off: &[usize], x: &[QuadElement]) -> RepMorphism {
    (0..m.dims.len())
        .map(|v| {
            let (r, c) = (n.dims[v], m.dims[v]);
            QuadMatrix::new(&m.field, r, c, x[off[v]..off[v] + r * c].to_vec()).expect("shape")
        })
        .collect()
}

fn pack(psi: &[QuadMatrix]) -> QuadVector {
    psi.iter().flat_map(|p| p.entries().iter().cloned()).collect()
}

/// Hom_{Gamma_K}(m, n): solves the edge-commutation system over L, then descends
/// along the induced c-semilinear involution on the solution space.
pub fn hom_space(m: &QuiverRep, n: &QuiverRep) -> Result<HomSpace, RepError> {
    if m.quiver != n.quiver {
        return Err(RepError::Shape("representations of different quivers".into()));
    }
    let q = &m.quiver;
    let field = &m.field;
    let (off, total) = hom_offsets(m, n);
    let mut rows: Vec<QuadVector> = Vec::new();
    for e in 0..q.edge_count() {
        let (s, t) = (q.src[e], q.tgt[e]);
        let (me, ne) = (&m.edges[e], &n.edges[e]);
        // (psi_t me - ne psi_s)[i][j] = 0
        for i in 0..n.dims[t] {
            for j in 0..m.dims[s] {
                let mut row = vec![field.zero(); total];
                for k in 0..m.dims[t] {
                    row[off[t] + i * m.dims[t] + k] += me.get(k, j);
                }
                for k in 0..n.dims[s] {
                    row[off[s] + k * m.dims[s] + j] -= ne.get(i, k);
                }
                rows.push(row);
            }
        }
    }
    let kernel = if rows.is_empty() {
        (0..total).map(|i| (0..total).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect()
    } else {
        QuadMatrix::from_rows(field, rows).expect("uniform rows").kernel_basis()
    };
    let dim_l = kernel.len();
    let Some(c) = conj_element(&q.group) else {
        return Ok(HomSpace { basis: kernel.iter().map(|x| unpack(m, n, &off, x)).collect(), dim_l });
    };
    let inv_q: Vec<QuadMatrix> = (0..q.vertex_count())
        .map(|u| m.phi(u, c).matrix.inverse().ok_or_else(|| RepError::Invalid("non-invertible rational structure".into())))
        .collect::<Result<_, _>>()?;
    let image_of = |x: &[QuadElement]| -> QuadVector {
        let psi = unpack(m, n, &off, x);
        let twisted: Vec<QuadMatrix> = (0..q.vertex_count())
            .map(|v| {
                let u = q.vertices.act(c, v);
                &(&n.phi(u, c).matrix * &psi[u].conj()) * &inv_q[u]
            })
            .collect();
        pack(&twisted)
    };
    let fixed = descend_subspace(field, total, &kernel, image_of)?;
    Ok(HomSpace { basis: fixed.iter().map(|x| unpack(m, n, &off, x)).collect(), dim_l })
}

/// Checks that psi commutes with edge maps and rational structures.
pub fn is_morphism(a: &QuiverRep, b: &QuiverRep, psi: &[QuadMatrix]) -> bool {
    let q = &a.quiver;
    if psi.len() != q.vertex_count() || a.quiver != b.quiver {
        return false;
    }
    for v in 0..q.vertex_count() {
        if psi[v].rows() != b.dims[v] || psi[v].cols() != a.dims[v] {
            return false;
        }
    }
    for e in 0..q.edge_count() {
        if &psi[q.tgt[e]] * &a.edges[e] != &b.edges[e] * &psi[q.src[e]] {
            return false;
        }
    }
    for g in q.group.elements() {
        for v in 0..q.vertex_count() {
            let gv = q.vertices.act(g, v);
            if a.phi(v, g).then_linear(&psi[gv]) != b.phi(v, g).after_linear(&psi[v]) {
                return false;
            }
        }
    }
    true
}

pub fn is_isomorphism(a: &QuiverRep, b: &QuiverRep, psi: &[QuadMatrix]) -> bool {
    is_morphism(a, b, psi) && psi.iter().all(|p| p.is_square() && p.inverse().is_some())
}

/// Searches for an isomorphism a -> b among rational combinations of a Hom basis.
///
/// Tries single basis elements, then seeded pseudo-random integer combinations;
/// a generic combination is invertible whenever some element is.
pub fn rep_isomorphic(a: &QuiverRep, b: &QuiverRep) -> Result<Option<RepMorphism>, RepError> {
    if a.dims != b.dims {
        return Ok(None);
    }
    let hom = hom_space(a, b)?;
    if hom.basis.is_empty() {
        return Ok(if a.total_dim() == 0 { Some(zero_morphism(a, b)) } else { None });
    }
    let invertible = |psi: &RepMorphism| psi.iter().all(|p| p.inverse().is_some());
    for psi in &hom.basis {
        if invertible(psi) {
            return Ok(Some(psi.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1505);
    for _ in 0..96 {
        let coeffs: Vec<i64> = (0..hom.basis.len()).map(|_| rng.random_range(-50..=50)).collect();
        let psi = combine(&a.field, &hom.basis, &coeffs);
        if invertible(&psi) {
            return Ok(Some(psi));
        }
    }
    Ok(None)
}

fn zero_morphism(a: &QuiverRep, b: &QuiverRep) -> RepMorphism {
    (0..a.dims.len()).map(|v| QuadMatrix::zeros(&a.field, b.dims[v], a.dims[v])).collect()
}

fn combine(field: &QuadField, basis: &[RepMorphism], coeffs: &[i64]) -> RepMorphism {
    let mut out: RepMorphism = basis[0].iter().map(|p| QuadMatrix::zeros(field, p.rows(), p.cols())).collect();
    for (psi, &c) in basis.iter().zip(coeffs) {
        let s = field.int(c);
        for (o, p) in out.iter_mut().zip(psi) {
            *o = &*o + &p.scale(&s);
        }
    }
    out
}

/// Orbit bookkeeping shared by the two functors: representatives are minimal indices and
/// twists are minimal coset elements.
#[derive(Debug, Clone)]
pub struct OrbitLayout {
    pub vertex_reps: Vec<usize>,
    pub orbit_of: Vec<usize>,
    pub vertex_stab: Vec<Subgroup>,
    /// Edge orbits in species summand order.
    pub summands: Vec<EdgeOrbit>,
}

#[derive(Debug, Clone)]
pub struct EdgeOrbit {
    pub rep: usize,
    pub from: usize,
    pub to: usize,
    /// s(rep) = sigma v_from
    pub sigma: usize,
    /// t(rep) = tau v_to
    pub tau: usize,
    pub stab: Subgroup,
}

fn coset_min(g: usize, h: &Subgroup) -> usize {
    let p = h.parent();
    h.elements().iter().map(|&x| p.mul(g, x)).min().expect("nonempty")
}

impl OrbitLayout {
    pub fn of(q: &RationalQuiver) -> Self {
        let orbits = q.vertices.orbits();
        let mut orbit_of = vec![0; q.vertex_count()];
        for (i, o) in orbits.iter().enumerate() {
            for &v in o {
                orbit_of[v] = i;
            }
        }
        let vertex_reps: Vec<usize> = orbits.iter().map(|o| o[0]).collect();
        let vertex_stab: Vec<Subgroup> = vertex_reps.iter().map(|&v| q.vertices.stabilizer(v)).collect();
        let mut summands: Vec<EdgeOrbit> = q
            .edges
            .orbits()
            .iter()
            .map(|o| {
                let e = o[0];
                let (from, to) = (orbit_of[q.src[e]], orbit_of[q.tgt[e]]);
                let sigma = q.vertices.transporter(vertex_reps[from], q.src[e]).expect("orbit");
                let tau = q.vertices.transporter(vertex_reps[to], q.tgt[e]).expect("orbit");
                EdgeOrbit {
                    rep: e,
                    from,
                    to,
                    sigma: coset_min(sigma, &vertex_stab[from]),
                    tau: coset_min(tau, &vertex_stab[to]),
                    stab: q.edges.stabilizer(e),
                }
            })
            .collect();
        summands.sort_by_key(|s| (s.from, s.to));
        OrbitLayout { vertex_reps, orbit_of, vertex_stab, summands }
    }
}

/// How a summand map acts on coordinates in the quadratic case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummandKind {
    /// x -> F x with F over K; every field involved is K.
    Rational,
    /// x -> F theta(x): the target field equals the summand field.
    Linear(Galois),
    /// x -> tr(F sigma(x)): summand field L over a target field K.
    Trace(Galois),
}

fn summand_kind(group: &FiniteGroup, target_stab: &Subgroup, s: &EdgeOrbit) -> SummandKind {
    if group.order() == 1 {
        return SummandKind::Linear(Galois::Id);
    }
    let theta = galois_of(group, group.mul(group.inv(s.tau), s.sigma));
    if s.stab.is_full() {
        SummandKind::Rational
    } else if target_stab.is_full() {
        SummandKind::Trace(galois_of(group, s.sigma))
    } else {
        SummandKind::Linear(theta)
    }
}

/// A representation of the species of `quiver`: W_i has dimension `dims[i]` over L_i and
/// `maps[k]` encodes f on the k-th summand as a `dims[to] x dims[from]` matrix read through
/// its [`SummandKind`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeciesRep {
    pub quiver: RationalQuiver,
    pub species: EtaleSpecies,
    pub field: QuadField,
    pub dims: Vec<usize>,
    pub maps: Vec<QuadMatrix>,
}

impl SpeciesRep {
    pub fn new(quiver: RationalQuiver, field: QuadField, dims: Vec<usize>, maps: Vec<QuadMatrix>) -> Result<Self, RepError> {
        check_quadratic(&quiver.group)?;
        let species = species_of_quiver(&quiver);
        let w = SpeciesRep { quiver, species, field, dims, maps };
        let r = validate_species_rep(&w);
        if !r.ok() {
            return Err(RepError::Invalid(r.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect::<Vec<_>>().join("; ")));
        }
        Ok(w)
    }

    pub fn layout(&self) -> OrbitLayout {
        OrbitLayout::of(&self.quiver)
    }

    pub fn kind(&self, k: usize) -> SummandKind {
        let l = self.layout();
        let s = &l.summands[k];
        summand_kind(&self.quiver.group, &l.vertex_stab[s.to], s)
    }

    /// Whether W_i is realized over K (in the quadratic case).
    pub fn is_rational_index(&self, i: usize) -> bool {
        self.quiver.group.order() == 2 && self.layout().vertex_stab[i].is_full()
    }

    /// f on the k-th summand applied to w in W_from.
    pub fn apply(&self, k: usize, x: &[QuadElement]) -> QuadVector {
        let f = &self.maps[k];
        match self.kind(k) {
            SummandKind::Rational => f.mul_vec(x),
            SummandKind::Linear(t) => f.mul_vec(&x.iter().map(|y| t.apply(y)).collect::<Vec<_>>()),
            SummandKind::Trace(t) => f
                .mul_vec(&x.iter().map(|y| t.apply(y)).collect::<Vec<_>>())
                .iter()
                .map(|y| self.field.rational(y.trace()))
                .collect(),
        }
    }
}

pub fn validate_species_rep(w: &SpeciesRep) -> Report {
    let mut r = Report::new();
    let l = w.layout();
    let mut bad = Vec::new();
    if w.dims.len() != l.vertex_reps.len() {
        bad.push(format!("{} dimensions for {} indices", w.dims.len(), l.vertex_reps.len()));
    }
    if w.maps.len() != l.summands.len() {
        bad.push(format!("{} maps for {} summands", w.maps.len(), l.summands.len()));
    }
    if bad.is_empty() {
        for (k, s) in l.summands.iter().enumerate() {
            if w.maps[k].rows() != w.dims[s.to] || w.maps[k].cols() != w.dims[s.from] {
                bad.push(format!("summand {k} has shape {}x{}", w.maps[k].rows(), w.maps[k].cols()));
            }
        }
    }
    r.push("shapes", bad.is_empty(), bad.join("; "));
    if !bad.is_empty() {
        return r;
    }
    let mut bad = Vec::new();
    for (k, s) in l.summands.iter().enumerate() {
        if summand_kind(&w.quiver.group, &l.vertex_stab[s.to], s) == SummandKind::Rational && !w.maps[k].is_rational() {
            bad.push(format!("summand {k} must be K-rational"));
        }
    }
    r.push("realized fields", bad.is_empty(), bad.join("; "));
    r
}

/// Species morphism: one matrix per index, over L_i.
pub type SpeciesMorphism = Vec<QuadMatrix>;

/// Checks F' theta(g_from) = g_to F on every summand and that rational indices get rational maps.
pub fn is_species_morphism(a: &SpeciesRep, b: &SpeciesRep, g: &[QuadMatrix]) -> bool {
    if a.quiver != b.quiver || g.len() != a.dims.len() {
        return false;
    }
    let l = a.layout();
    for (i, gi) in g.iter().enumerate() {
        if gi.rows() != b.dims[i] || gi.cols() != a.dims[i] {
            return false;
        }
        if a.is_rational_index(i) && !gi.is_rational() {
            return false;
        }
    }
    for (k, s) in l.summands.iter().enumerate() {
        let twist = match a.kind(k) {
            SummandKind::Rational => Galois::Id,
            SummandKind::Linear(t) | SummandKind::Trace(t) => t,
        };
        if &b.maps[k] * &g[s.from].galois(twist) != &g[s.to] * &a.maps[k] {
            return false;
        }
    }
    true
}

pub fn is_species_isomorphism(a: &SpeciesRep, b: &SpeciesRep, g: &[QuadMatrix]) -> bool {
    is_species_morphism(a, b, g) && g.iter().all(|m| m.is_square() && m.inverse().is_some())
}

/// Columns span M(v_i)^{G_{v_i}} over K: a fixed-space basis for fixed vertices, the identity otherwise.
pub fn descent_bases(r: &QuiverRep) -> Result<Vec<QuadMatrix>, RepError> {
    check_quadratic(&r.quiver.group)?;
    let l = OrbitLayout::of(&r.quiver);
    let c = conj_element(&r.quiver.group);
    l.vertex_reps
        .iter()
        .zip(&l.vertex_stab)
        .map(|(&v, stab)| match c {
            Some(c) if stab.is_full() => {
                let basis = fixed_space(r.phi(v, c))?;
                Ok(QuadMatrix::from_columns(&r.field, r.dims[v], &basis))
            }
            _ => Ok(QuadMatrix::identity(&r.field, r.dims[v])),
        })
        .collect()
}

/// The functor F: W_i = M(v_i)^{G_{v_i}}, f from the descent of the summand maps
/// phi_{t(e),tau^-1} phi_e phi_{v_i,sigma}, summed over G_{v_j}/G_e.
pub fn functor_f(r: &QuiverRep) -> Result<SpeciesRep, RepError> {
    let q = &r.quiver;
    let g = &q.group;
    let l = OrbitLayout::of(q);
    let bases = descent_bases(r)?;
    let dims: Vec<usize> = l.vertex_reps.iter().map(|&v| r.dims[v]).collect();
    let mut maps = Vec::new();
    for s in &l.summands {
        let e = s.rep;
        let vi = l.vertex_reps[s.from];
        let psi = r
            .phi(q.tgt[e], g.inv(s.tau))
            .after(&r.phi(vi, s.sigma).then_linear(&r.edges[e]))
            .after_linear(&bases[s.from]);
        let bj_inv = bases[s.to].inverse().ok_or_else(|| RepError::Invalid("descent basis is singular".into()))?;
        let f = &bj_inv * &psi.matrix;
        if summand_kind(g, &l.vertex_stab[s.to], s) == SummandKind::Rational && !f.is_rational() {
            return Err(RepError::Invalid(format!("summand at edge {} does not descend to K", q.edge_names[e])));
        }
        maps.push(f);
    }
    SpeciesRep::new(q.clone(), r.field.clone(), dims, maps)
}

/// The functor H: M(v) = W_{i,K} (x) L with the canonical rational structure and
/// phi_{g e_eps} = g tau (F).
pub fn functor_h(w: &SpeciesRep) -> Result<QuiverRep, RepError> {
    let q = &w.quiver;
    let g = &q.group;
    let l = w.layout();
    let dims: Vec<usize> = (0..q.vertex_count()).map(|v| w.dims[l.orbit_of[v]]).collect();
    let mut edges = vec![QuadMatrix::zeros(&w.field, 0, 0); q.edge_count()];
    for (k, s) in l.summands.iter().enumerate() {
        let base = w.maps[k].galois(galois_of(g, s.tau));
        for x in g.elements() {
            let e = q.edges.act(x, s.rep);
            edges[e] = base.galois(galois_of(g, x));
        }
    }
    QuiverRep::canonical(q.clone(), w.field.clone(), dims, edges)
}

/// The natural isomorphism H(F(r)) -> r: psi_{t v_i} = phi_{v_i,t} t(B_i).
pub fn witness_hf(r: &QuiverRep) -> Result<RepMorphism, RepError> {
    let q = &r.quiver;
    let l = OrbitLayout::of(q);
    let bases = descent_bases(r)?;
    Ok((0..q.vertex_count())
        .map(|v| {
            let i = l.orbit_of[v];
            let t = q.vertices.transporter(l.vertex_reps[i], v).expect("orbit");
            let phi = r.phi(l.vertex_reps[i], t);
            &phi.matrix * &bases[i].galois(phi.sigma)
        })
        .collect())
}

/// The natural isomorphism w -> F(H(w)): the inverse descent bases of H(w).
pub fn witness_fh(w: &SpeciesRep) -> Result<SpeciesMorphism, RepError> {
    let h = functor_h(w)?;
    descent_bases(&h)?
        .into_iter()
        .map(|b| b.inverse().ok_or_else(|| RepError::Invalid("descent basis is singular".into())))
        .collect()
}

/// Round trip H(F(r)) ~ r with the constructed witness verified.
pub fn check_hf(r: &QuiverRep) -> Result<bool, RepError> {
    let back = functor_h(&functor_f(r)?)?;
    let psi = witness_hf(r)?;
    Ok(is_isomorphism(&back, r, &psi))
}

/// Round trip F(H(w)) ~ w with the constructed witness verified.
pub fn check_fh(w: &SpeciesRep) -> Result<bool, RepError> {
    let back = functor_f(&functor_h(w)?)?;
    let g = witness_fh(w)?;
    Ok(is_species_isomorphism(w, &back, &g))
}

/// Compares the rational structure on W_i (x) M_j (x) L given by the explicit twisting
/// action with the canonical one, per summand with rational target field.
pub fn theta_consistency(r: &QuiverRep) -> Result<Report, RepError> {
    let mut rep = Report::new();
    let q = &r.quiver;
    let g = &q.group;
    let Some(c) = conj_element(g) else {
        rep.pass("theta: trivial group");
        return Ok(rep);
    };
    let l = OrbitLayout::of(q);
    let bases = descent_bases(r)?;
    let field = &r.field;
    for (k, s) in l.summands.iter().enumerate() {
        if !l.vertex_stab[s.to].is_full() {
            continue;
        }
        let vi = l.vertex_reps[s.from];
        let n = r.dims[vi];
        // eta runs through G_{v_j}/G_e; component eta lives in M(eta tau^-1 sigma v_i)
        let etas: Vec<usize> = s.stab.left_coset_reps();
        let base_shift = g.mul(g.inv(s.tau), s.sigma);
        let comp_vertex = |eta: usize| q.vertices.act(g.mul(eta, base_shift), vi);
        // K-basis of W_i (x) L(e): pairs (w, y)
        let mut pairs: Vec<(QuadVector, QuadElement)> = Vec::new();
        let w_basis: Vec<QuadVector> = if l.vertex_stab[s.from].is_full() {
            bases[s.from].columns()
        } else {
            let id = QuadMatrix::identity(field, n);
            id.columns().into_iter().chain(id.columns().into_iter().map(|v| v.iter().map(|x| x * &field.root()).collect())).collect()
        };
        let extra: Vec<QuadElement> =
            if s.stab.is_full() || !l.vertex_stab[s.from].is_full() { vec![field.one()] } else { vec![field.one(), field.root()] };
        for w in &w_basis {
            for y in &extra {
                pairs.push((w.clone(), y.clone()));
            }
        }
        let m = etas.len() * n;
        if pairs.len() != m {
            rep.fail(format!("theta summand {k}"), format!("K-basis has {} elements, expected {m}", pairs.len()));
            continue;
        }
        let columns: Vec<QuadVector> = pairs
            .iter()
            .map(|(w, y)| {
                etas.iter()
                    .flat_map(|&eta| {
                        let img = r.phi(vi, g.mul(eta, base_shift)).apply(w);
                        let ey = galois_of(g, eta).apply(y);
                        img.into_iter().map(move |x| &x * &ey)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let j = QuadMatrix::from_columns(field, m, &columns);
        let Some(j_conj_inv) = j.conj().inverse() else {
            rep.fail(format!("theta summand {k}"), "identification is not invertible");
            continue;
        };
        let canonical = &j * &j_conj_inv;
        let mut theta = QuadMatrix::zeros(field, m, m);
        for (a, &eta) in etas.iter().enumerate() {
            let ceta = g.mul(c, eta);
            let b = etas.iter().position(|&x| s.stab.contains(g.mul(g.inv(x), ceta))).expect("coset");
            let block = &r.phi(comp_vertex(etas[b]), c).matrix;
            for x in 0..n {
                for y in 0..n {
                    theta.set(a * n + x, b * n + y, block.get(x, y).clone());
                }
            }
        }
        rep.push(format!("theta summand {k}"), theta == canonical, "");
    }
    if rep.checks.is_empty() {
        rep.pass("theta: no summand with rational target");
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::q;
    use crate::quiver::fixtures;

    fn k() -> QuadField {
        QuadField::gaussian()
    }

    /// Gelfand rep with M(*) = 0, M(+-) = L and phi_+- = c.
    fn discrete() -> QuiverRep {
        let f = k();
        let z = |r, c| QuadMatrix::zeros(&f, r, c);
        QuiverRep::canonical(fixtures::gelfand(), f.clone(), vec![1, 0, 1], vec![z(0, 1), z(1, 0), z(0, 1), z(1, 0)]).unwrap()
    }

    #[test]
    fn discrete_fixture_validates() {
        let r = discrete();
        let rep = validate_rep(&r);
        assert!(rep.ok(), "{rep}");
        let mut broken = r.clone();
        let plus = 2;
        broken.semilinear[1][plus].matrix = broken.semilinear[1][plus].matrix.scale(&k().int(-1));
        assert_eq!(validate_rep(&broken).passed("cocycle"), Some(false));
    }

    #[test]
    fn hom_of_discrete_is_gaussian_integers_rank() {
        let r = discrete();
        let h = hom_space(&r, &r).unwrap();
        assert_eq!((h.dim_k(), h.dim_l), (2, 2));
    }

    #[test]
    fn functors_on_discrete() {
        let r = discrete();
        let w = functor_f(&r).unwrap();
        assert_eq!(w.dims, vec![1, 0]);
        assert!(w.maps.iter().all(|m| m.is_zero()));
        assert!(check_hf(&r).unwrap());
        assert!(check_fh(&w).unwrap());
        assert!(theta_consistency(&r).unwrap().ok());
    }

    #[test]
    fn base_change_forgets_structure() {
        let r = discrete();
        let g = r.quiver.group.clone();
        let split = rep_base_change(&r, &g.trivial_subgroup()).unwrap();
        assert!(validate_rep(&split).ok());
        assert_eq!(hom_space(&split, &split).unwrap().dim_k(), 2);
        assert_eq!(rep_base_change(&r, &g.full_subgroup()).unwrap(), r);
    }

    #[test]
    fn trace_summand() {
        // principal-series shape: W_* = Q, W_+- = L, f_{+- -> *} = trace, f_{* -> +-} = 0
        let f = k();
        let qv = fixtures::gelfand();
        let l = OrbitLayout::of(&qv);
        let maps: Vec<QuadMatrix> = l
            .summands
            .iter()
            .map(|s| if s.to == l.orbit_of[1] { QuadMatrix::from_ints(&f, &[&[1]]) } else { QuadMatrix::zeros(&f, 1, 1) })
            .collect();
        let dims = l.vertex_reps.iter().map(|_| 1).collect();
        let w = SpeciesRep::new(qv, f.clone(), dims, maps).unwrap();
        let k_tr = l.summands.iter().position(|s| s.to == l.orbit_of[1]).unwrap();
        assert!(matches!(w.kind(k_tr), SummandKind::Trace(_)));
        assert_eq!(w.apply(k_tr, &[f.element(q(3), q(5))]), vec![f.int(6)]);
        let r = functor_h(&w).unwrap();
        assert!(validate_rep(&r).ok(), "{}", validate_rep(&r));
        assert!(check_fh(&w).unwrap());
        assert!(check_hf(&r).unwrap());
        assert!(theta_consistency(&r).unwrap().ok());
    }

    #[test]
    fn isomorphism_search() {
        let r = discrete();
        assert!(rep_isomorphic(&r, &r).unwrap().is_some());
        let z = QuiverRep::zero(fixtures::gelfand(), k()).unwrap();
        assert!(rep_isomorphic(&r, &z).unwrap().is_none());
    }
}
