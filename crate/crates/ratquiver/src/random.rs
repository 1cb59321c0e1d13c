//! Seeded random instances for property sweeps.

use std::sync::Arc;

use rand::Rng;

use crate::exact_algebra::{q, QuadElement, QuadField, QuadMatrix, SemilinearMap};
use crate::gsets::{FiniteGroup, GSet, Subgroup};
use crate::quiver::{fixtures, RationalQuiver};
use crate::representations::{galois_of, OrbitLayout, QuiverRep, RepError, SpeciesRep};

pub fn element<R: Rng>(rng: &mut R, field: &QuadField, rational: bool) -> QuadElement {
    let a = q(rng.random_range(-3..=3));
    let b = if rational { q(0) } else { q(rng.random_range(-3..=3)) };
    field.element(a, b)
}

pub fn matrix<R: Rng>(rng: &mut R, field: &QuadField, rows: usize, cols: usize, rational: bool) -> QuadMatrix {
    QuadMatrix::from_fn(field, rows, cols, |_, _| element(rng, field, rational))
}

pub fn invertible<R: Rng>(rng: &mut R, field: &QuadField, n: usize, rational: bool) -> QuadMatrix {
    loop {
        let m = matrix(rng, field, n, n, rational);
        if m.inverse().is_some() {
            return m;
        }
    }
}

/// Invertible matrix with small entries whose inverse also has integral entries: a product
/// of a lower and an upper unitriangular matrix over the Gaussian-style integers.
pub fn unimodular<R: Rng>(rng: &mut R, field: &QuadField, n: usize, rational: bool) -> QuadMatrix {
    let small = |rng: &mut R| {
        let a = q(rng.random_range(-1..=1));
        let b = if rational { q(0) } else { q(rng.random_range(-1..=1)) };
        field.element(a, b)
    };
    let lower = QuadMatrix::from_fn(field, n, n, |i, j| if i == j { field.one() } else if i > j { small(rng) } else { field.zero() });
    let upper = QuadMatrix::from_fn(field, n, n, |i, j| if i == j { field.one() } else if i < j { small(rng) } else { field.zero() });
    &lower * &upper
}

/// Rational nilpotent matrix S N S^-1 with N strictly upper triangular; rows of N below
/// `rank_rows` are zero, so the rank is at most `rank_rows`.
pub fn rational_nilpotent<R: Rng>(rng: &mut R, field: &QuadField, n: usize, rank_rows: usize) -> QuadMatrix {
    let nil = QuadMatrix::from_fn(field, n, n, |i, j| if j > i && i < rank_rows { element(rng, field, true) } else { field.zero() });
    let s = invertible(rng, field, n, true);
    &(&s * &nil) * &s.inverse().expect("invertible")
}

/// A random rational quiver: vertex orbits G/H and edge orbits G/H_e with H_e inside both
/// endpoint stabilizers.
pub fn quiver<R: Rng>(rng: &mut R, group: Arc<FiniteGroup>, max_vertices: usize, max_edges: usize) -> RationalQuiver {
    let subgroups = group.all_subgroups();
    let mut vaction: Vec<Vec<usize>> = vec![Vec::new(); group.order()];
    let mut nv = 0;
    let target_orbits = rng.random_range(1..=max_vertices.max(1));
    for _ in 0..target_orbits {
        let h = &subgroups[rng.random_range(0..subgroups.len())];
        if nv + h.index() > max_vertices {
            continue;
        }
        append_cosets(&mut vaction, h, nv);
        nv += h.index();
    }
    if nv == 0 {
        let full = group.full_subgroup();
        append_cosets(&mut vaction, &full, 0);
        nv = 1;
    }
    let vertices = GSet::from_action(group.clone(), nv, vaction).expect("coset action");
    let mut eaction: Vec<Vec<usize>> = vec![Vec::new(); group.order()];
    let (mut src, mut tgt) = (Vec::new(), Vec::new());
    let mut ne = 0;
    let target_edges = rng.random_range(0..=max_edges);
    for _ in 0..2 * target_edges + 2 {
        if ne >= target_edges {
            break;
        }
        let h = &subgroups[rng.random_range(0..subgroups.len())];
        if ne + h.index() > max_edges {
            continue;
        }
        let fits: Vec<usize> = (0..nv).filter(|&v| h.is_subgroup_of(&vertices.stabilizer(v))).collect();
        if fits.is_empty() {
            continue;
        }
        let (s, t) = (fits[rng.random_range(0..fits.len())], fits[rng.random_range(0..fits.len())]);
        let reps = h.left_coset_reps();
        append_cosets(&mut eaction, h, ne);
        for &r in &reps {
            src.push(vertices.act(r, s));
            tgt.push(vertices.act(r, t));
        }
        ne += reps.len();
    }
    let edges = GSet::from_action(group, ne, eaction).expect("coset action");
    let mut qv = RationalQuiver::new(vertices, edges, src, tgt, vec![]).expect("well-formed random quiver");
    qv.vertex_names = (0..nv).map(|v| format!("v{v}")).collect();
    qv.edge_names = (0..ne).map(|e| format!("e{e}")).collect();
    qv
}

fn append_cosets(action: &mut [Vec<usize>], h: &Subgroup, offset: usize) {
    let cos = GSet::cosets(h);
    for (g, row) in action.iter_mut().enumerate() {
        row.extend(cos.action_table()[g].iter().map(|&p| p + offset));
    }
}

/// Random rational representation of a quiver over a group of order <= 2, with a
/// non-canonical rational structure. Relations are ignored.
pub fn rep<R: Rng>(rng: &mut R, quiver: &RationalQuiver, field: &QuadField, max_dim: usize) -> Result<QuiverRep, RepError> {
    let g = quiver.group.clone();
    let l = OrbitLayout::of(quiver);
    let nv = quiver.vertex_count();
    let orbit_dims: Vec<usize> = l.vertex_reps.iter().map(|_| rng.random_range(0..=max_dim)).collect();
    let dims: Vec<usize> = (0..nv).map(|v| orbit_dims[l.orbit_of[v]]).collect();
    let c = g.elements().find(|&x| x != g.identity());
    // matrices of phi_{v,c}
    let mut struct_mats: Vec<QuadMatrix> = (0..nv).map(|v| QuadMatrix::identity(field, dims[v])).collect();
    if let Some(c) = c {
        for &v in &l.vertex_reps {
            let cv = quiver.vertices.act(c, v);
            let p = invertible(rng, field, dims[v], false);
            if cv == v {
                // Hilbert 90: P conj(P)^-1 satisfies A conj(A) = 1
                struct_mats[v] = &p * &p.conj().inverse().expect("invertible");
            } else {
                struct_mats[v] = p.clone();
                struct_mats[cv] = p.conj().inverse().expect("invertible");
            }
        }
    }
    let mut edges = vec![QuadMatrix::zeros(field, 0, 0); quiver.edge_count()];
    for o in quiver.edges.orbits() {
        let e = o[0];
        let (s, t) = (quiver.src[e], quiver.tgt[e]);
        let base = matrix(rng, field, dims[t], dims[s], false);
        match c {
            None => edges[e] = base,
            Some(c) => {
                let ce = quiver.edges.act(c, e);
                // phi_{ce} = A_t conj(phi_e) A_s^-1 with A_x the matrix of phi_{x,c}
                let a_t = &struct_mats[t];
                let a_s_inv = struct_mats[s].inverse().expect("invertible");
                let moved = &(a_t * &base.conj()) * &a_s_inv;
                if ce == e {
                    edges[e] = &base + &moved;
                } else {
                    edges[e] = base;
                    edges[ce] = moved;
                }
            }
        }
    }
    let semilinear = g
        .elements()
        .map(|x| {
            (0..nv)
                .map(|v| {
                    let m = if x == g.identity() { QuadMatrix::identity(field, dims[v]) } else { struct_mats[v].clone() };
                    SemilinearMap::new(galois_of(&g, x), m)
                })
                .collect()
        })
        .collect();
    QuiverRep::new(quiver.clone(), field.clone(), dims, semilinear, edges)
}

/// Random species representation of the species of `quiver`.
pub fn species_rep<R: Rng>(rng: &mut R, quiver: &RationalQuiver, field: &QuadField, max_dim: usize) -> Result<SpeciesRep, RepError> {
    let l = OrbitLayout::of(quiver);
    let dims: Vec<usize> = l.vertex_reps.iter().map(|_| rng.random_range(0..=max_dim)).collect();
    let split = quiver.group.order() == 1;
    let maps = l
        .summands
        .iter()
        .map(|s| {
            let rational = !split && s.stab.is_full();
            matrix(rng, field, dims[s.to], dims[s.from], rational)
        })
        .collect();
    SpeciesRep::new(quiver.clone(), field.clone(), dims, maps)
}

/// Applies a random gauge change (independent invertible matrices per vertex) to a rep.
pub fn gauge<R: Rng>(rng: &mut R, r: &QuiverRep) -> Result<QuiverRep, RepError> {
    let field = &r.field;
    let gs: Vec<QuadMatrix> = r.dims.iter().map(|&n| invertible(rng, field, n, false)).collect();
    let inv: Vec<QuadMatrix> = gs.iter().map(|m| m.inverse().expect("invertible")).collect();
    let qv = &r.quiver;
    let edges = (0..qv.edge_count()).map(|e| &(&gs[qv.tgt[e]] * &r.edges[e]) * &inv[qv.src[e]]).collect();
    let semilinear = qv
        .group
        .elements()
        .map(|x| {
            (0..qv.vertex_count())
                .map(|v| {
                    let p = r.phi(v, x);
                    let w = qv.vertices.act(x, v);
                    SemilinearMap::new(p.sigma, &(&gs[w] * &p.matrix) * &inv[v].galois(p.sigma))
                })
                .collect()
        })
        .collect();
    QuiverRep::new(qv.clone(), field.clone(), r.dims.clone(), semilinear, edges)
}

/// Random nilpotent rational representation of the Gelfand quiver (relation enforced),
/// gauged away from the canonical rational structure.
pub fn gelfand_rep<R: Rng>(rng: &mut R, field: &QuadField, max_dim: usize) -> Result<QuiverRep, RepError> {
    let n = rng.random_range(0..=max_dim);
    let ns = rng.random_range(0..=max_dim);
    let (a, b) = relation_pair(rng, field, ns, n);
    // edges a-: - -> *, b-: * -> -, a+ = conj(a-), b+ = conj(b-)
    let edges = vec![a.clone(), b.clone(), a.conj(), b.conj()];
    let r = QuiverRep::canonical(fixtures::gelfand(), field.clone(), vec![n, ns, n], edges)?;
    gauge(rng, &r)
}

/// A (ns x n) and B (n x ns) with A B rational and nilpotent.
fn relation_pair<R: Rng>(rng: &mut R, field: &QuadField, ns: usize, n: usize) -> (QuadMatrix, QuadMatrix) {
    if n == 0 || ns == 0 {
        return (QuadMatrix::zeros(field, ns, n), QuadMatrix::zeros(field, n, ns));
    }
    let rank_rows = rng.random_range(0..=n.min(ns));
    let p = rational_nilpotent(rng, field, ns, rank_rows);
    // P = C R with C a column basis of P
    let (_, pivots) = p.rref();
    let cols: Vec<_> = pivots.iter().map(|&j| p.column(j)).collect();
    let rho = cols.len();
    let c = QuadMatrix::from_columns(field, ns, &cols);
    let rmat = if rho == 0 { QuadMatrix::zeros(field, 0, ns) } else { c.solve_right(&p).expect("column basis") };
    let z = matrix(rng, field, ns, n - rho, false);
    let cz = if rho == 0 { z } else if n == rho { c.clone() } else { c.hstack(&z) };
    let g = invertible(rng, field, n, false);
    let a = &cz * &g;
    let padded = if n == rho { rmat } else { rmat.vstack(&QuadMatrix::zeros(field, n - rho, ns)) };
    let mut b = &g.inverse().expect("invertible") * &padded;
    let ker = a.kernel_basis();
    if !ker.is_empty() {
        let kmat = QuadMatrix::from_columns(field, n, &ker);
        let y = matrix(rng, field, ker.len(), ns, false);
        b = &b + &(&kmat * &y);
    }
    (a, b)
}

/// Random nilpotent rational representation of the cyclic quiver: a = S N conj(S)^-1 with
/// N rational strictly upper triangular and b = conj(a), then gauged.
pub fn cyclic_rep<R: Rng>(rng: &mut R, field: &QuadField, max_dim: usize) -> Result<QuiverRep, RepError> {
    let n = rng.random_range(0..=max_dim);
    let nil = QuadMatrix::from_fn(field, n, n, |i, j| if j > i { element(rng, field, true) } else { field.zero() });
    let s = invertible(rng, field, n, false);
    let a = &(&s * &nil) * &s.conj().inverse().expect("invertible");
    let r = QuiverRep::canonical(fixtures::cyclic(), field.clone(), vec![n, n], vec![a.clone(), a.conj()])?;
    gauge(rng, &r)
}

/// Nilpotent n x n matrix over the quadratic field with exponent exactly `e` (1 <= e <= n,
/// or e = 1 for n = 0), conjugated by a random non-rational change of basis.
pub fn nilpotent_with_exponent<R: Rng>(rng: &mut R, field: &QuadField, n: usize, e: usize) -> QuadMatrix {
    if n == 0 {
        return QuadMatrix::zeros(field, 0, 0);
    }
    let e = e.clamp(1, n);
    let rest = n - e;
    let j = QuadMatrix::from_fn(field, n, n, |i, k| {
        if i < e && k < e {
            if k == i + 1 {
                let x = element(rng, field, false);
                if x.is_zero() { field.one() } else { x }
            } else if k > i + 1 {
                element(rng, field, false)
            } else {
                field.zero()
            }
        } else if i >= e && k > i && rest <= e {
            element(rng, field, false)
        } else {
            field.zero()
        }
    });
    let s = unimodular(rng, field, n, false);
    &(&s * &j) * &s.inverse().expect("invertible")
}

/// Random stabilization problem of size n whose defect has exponent exactly `e`.
pub fn stabilization_problem<R: Rng>(rng: &mut R, field: &QuadField, n: usize, e: usize) -> crate::unipotent::StabilizationProblem {
    let u = &QuadMatrix::identity(field, n) + &nilpotent_with_exponent(rng, field, n, e);
    let plus = unimodular(rng, field, n, false);
    // conj(minus) plus = u
    let minus = (&u * &plus.inverse().expect("invertible")).conj();
    crate::unipotent::StabilizationProblem::new(plus, minus, crate::exact_algebra::Galois::Conj).expect("nilpotent defect")
}

/// Random problem in the setting of the addendum: both maps unipotent polynomials in one
/// nilpotent matrix, so `plus` commutes with `conj(minus)`.
pub fn commuting_unipotent_problem<R: Rng>(rng: &mut R, field: &QuadField, n: usize, e: usize) -> crate::unipotent::StabilizationProblem {
    let nil = nilpotent_with_exponent(rng, field, n, e);
    let id = QuadMatrix::identity(field, n);
    let poly = |rng: &mut R| {
        let mut acc = id.clone();
        let mut pow = id.clone();
        for _ in 1..e.max(1) {
            pow = &pow * &nil;
            acc = &acc + &pow.scale(&element(rng, field, false));
        }
        acc
    };
    let plus = poly(rng);
    let minus = poly(rng).conj();
    crate::unipotent::StabilizationProblem::new(plus, minus, crate::exact_algebra::Galois::Conj).expect("nilpotent defect")
}
