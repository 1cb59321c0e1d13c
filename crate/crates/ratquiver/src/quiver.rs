//! Quivers internal to finite G-sets, with relations, morphisms, base change and restriction.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use crate::gsets::{equivariant_maps, induce, FiniteGroup, GSet, GroupError, Subgroup};
use crate::report::Report;

/// A path lists its edges in traversal order: t(p[k]) = s(p[k+1]).
pub type Path = Vec<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationMode {
    WithRelations,
    Raw,
}

impl RelationMode {
    pub fn label(self) -> &'static str {
        match self {
            RelationMode::WithRelations => "with-relations",
            RelationMode::Raw => "raw",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalQuiver {
    pub group: Arc<FiniteGroup>,
    pub vertices: GSet,
    pub edges: GSet,
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    pub relations: Vec<(Path, Path)>,
    pub vertex_names: Vec<String>,
    pub edge_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuiverMorphism {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
}

impl RationalQuiver {
    pub fn new(
        vertices: GSet,
        edges: GSet,
        src: Vec<usize>,
        tgt: Vec<usize>,
        relations: Vec<(Path, Path)>,
    ) -> Result<Self, GroupError> {
        if vertices.group() != edges.group() {
            return Err(GroupError::Mismatch("vertex and edge sets over different groups".into()));
        }
        if src.len() != edges.size() || tgt.len() != edges.size() {
            return Err(GroupError::Mismatch("src/tgt length differs from edge count".into()));
        }
        if src.iter().chain(&tgt).any(|&v| v >= vertices.size()) {
            return Err(GroupError::Mismatch("endpoint out of range".into()));
        }
        let vertex_names = (0..vertices.size()).map(|v| format!("v{v}")).collect();
        let edge_names = (0..edges.size()).map(|e| format!("e{e}")).collect();
        Ok(RationalQuiver { group: vertices.group().clone(), vertices, edges, src, tgt, relations, vertex_names, edge_names })
    }

    pub fn with_names(mut self, vertex_names: &[&str], edge_names: &[&str]) -> Self {
        assert_eq!(vertex_names.len(), self.vertices.size());
        assert_eq!(edge_names.len(), self.edges.size());
        self.vertex_names = vertex_names.iter().map(|s| s.to_string()).collect();
        self.edge_names = edge_names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.size()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.size()
    }

    pub fn is_split(&self) -> bool {
        self.vertices.is_trivial_action() && self.edges.is_trivial_action()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edge_names.iter().position(|n| n == name)
    }

    pub fn path_source(&self, p: &[usize]) -> usize {
        self.src[p[0]]
    }

    pub fn path_target(&self, p: &[usize]) -> usize {
        self.tgt[*p.last().expect("nonempty path")]
    }

    pub fn is_composable(&self, p: &[usize]) -> bool {
        !p.is_empty() && p.iter().all(|&e| e < self.edge_count()) && p.windows(2).all(|w| self.tgt[w[0]] == self.src[w[1]])
    }

    fn act_path(&self, g: usize, p: &[usize]) -> Path {
        p.iter().map(|&e| self.edges.act(g, e)).collect()
    }

    fn has_relation(&self, p: &[usize], q: &[usize]) -> bool {
        self.relations.iter().any(|(a, b)| (a == p && b == q) || (a == q && b == p))
    }

    /// Checks equivariance, composability of relations and their stability under the action.
    pub fn validate(&self) -> Report {
        let mut r = Report::new();
        let mut bad = Vec::new();
        for g in self.group.elements() {
            for e in 0..self.edge_count() {
                let ge = self.edges.act(g, e);
                if self.src[ge] != self.vertices.act(g, self.src[e]) {
                    bad.push(format!("s({g}.{}) != {g}.s({})", self.edge_names[e], self.edge_names[e]));
                }
                if self.tgt[ge] != self.vertices.act(g, self.tgt[e]) {
                    bad.push(format!("t({g}.{}) != {g}.t({})", self.edge_names[e], self.edge_names[e]));
                }
            }
        }
        r.push("equivariance", bad.is_empty(), bad.join("; "));
        let mut bad = Vec::new();
        for (k, (p, q)) in self.relations.iter().enumerate() {
            if !self.is_composable(p) || !self.is_composable(q) {
                bad.push(format!("relation {k}: path not composable"));
            } else if self.path_source(p) != self.path_source(q) || self.path_target(p) != self.path_target(q) {
                bad.push(format!("relation {k}: endpoints differ"));
            }
        }
        r.push("relations composable", bad.is_empty(), bad.join("; "));
        let mut bad = Vec::new();
        if r.ok() {
            for g in self.group.elements() {
                for (k, (p, q)) in self.relations.iter().enumerate() {
                    if !self.has_relation(&self.act_path(g, p), &self.act_path(g, q)) {
                        bad.push(format!("element {g} moves relation {k} outside the list"));
                    }
                }
            }
        }
        r.push("relations action-stable", bad.is_empty(), bad.join("; "));
        r.push("split", true, if self.is_split() { "split (trivial action)" } else { "non-split" });
        r
    }

    /// Restricts the action to a subgroup; the result lives over `h.as_group()`.
    pub fn base_change(&self, h: &Subgroup) -> Result<RationalQuiver, GroupError> {
        let vertices = self.vertices.restrict(h)?;
        let edges = self.edges.restrict(h)?;
        Ok(RationalQuiver {
            group: vertices.group().clone(),
            vertices,
            edges,
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            relations: self.relations.clone(),
            vertex_names: self.vertex_names.clone(),
            edge_names: self.edge_names.clone(),
        })
    }

    /// Induces a quiver over `h.as_group()` to the parent group of `h`.
    pub fn restrict(&self, h: &Subgroup) -> Result<Restricted, GroupError> {
        let iv = induce(&self.vertices, h)?;
        let ie = induce(&self.edges, h)?;
        let nv = self.vertex_count();
        let ne = self.edge_count();
        let k = iv.coset_reps.len();
        let mut src = vec![0; k * ne];
        let mut tgt = vec![0; k * ne];
        let mut edge_names = vec![String::new(); k * ne];
        let mut vertex_names = vec![String::new(); k * nv];
        for c in 0..k {
            let tag = if k == 1 { String::new() } else { format!("@{}", iv.coset_reps[c]) };
            for e in 0..ne {
                src[ie.point(c, e)] = iv.point(c, self.src[e]);
                tgt[ie.point(c, e)] = iv.point(c, self.tgt[e]);
                edge_names[ie.point(c, e)] = format!("{}{tag}", self.edge_names[e]);
            }
            for v in 0..nv {
                vertex_names[iv.point(c, v)] = format!("{}{tag}", self.vertex_names[v]);
            }
        }
        let mut relations = Vec::new();
        for c in 0..k {
            for (p, q) in &self.relations {
                relations.push((p.iter().map(|&e| ie.point(c, e)).collect(), q.iter().map(|&e| ie.point(c, e)).collect()));
            }
        }
        let quiver = RationalQuiver {
            group: h.parent().clone(),
            vertices: iv.set.clone(),
            edges: ie.set.clone(),
            src,
            tgt,
            relations,
            vertex_names,
            edge_names,
        };
        Ok(Restricted { quiver, vertex_unit: iv.unit, edge_unit: ie.unit, coset_reps: iv.coset_reps })
    }

    /// True when the two paths have equal composites modulo the relations.
    pub fn paths_equivalent(&self, p: &[usize], q: &[usize]) -> bool {
        if p == q {
            return true;
        }
        if self.relations.is_empty() {
            return false;
        }
        let max_len = p.len().max(q.len()) + self.relations.iter().map(|(a, b)| a.len().max(b.len())).max().unwrap_or(0);
        let mut seen: HashSet<Path> = HashSet::new();
        let mut queue: VecDeque<Path> = VecDeque::new();
        seen.insert(p.to_vec());
        queue.push_back(p.to_vec());
        while let Some(cur) = queue.pop_front() {
            if seen.len() > 4096 {
                break;
            }
            for (a, b) in &self.relations {
                for (from, to) in [(a, b), (b, a)] {
                    if from.len() > cur.len() {
                        continue;
                    }
                    for start in 0..=cur.len() - from.len() {
                        if cur[start..start + from.len()] != from[..] {
                            continue;
                        }
                        let mut next = cur[..start].to_vec();
                        next.extend_from_slice(to);
                        next.extend_from_slice(&cur[start + from.len()..]);
                        if next.len() > max_len {
                            continue;
                        }
                        if next == q {
                            return true;
                        }
                        if seen.insert(next.clone()) {
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
        false
    }

    /// Checks that a pair of maps is a morphism into `target`.
    pub fn is_morphism(&self, target: &RationalQuiver, f: &QuiverMorphism, mode: RelationMode) -> bool {
        if f.vertex_map.len() != self.vertex_count() || f.edge_map.len() != self.edge_count() {
            return false;
        }
        if !self.vertices.is_equivariant(&target.vertices, &f.vertex_map) || !self.edges.is_equivariant(&target.edges, &f.edge_map) {
            return false;
        }
        for e in 0..self.edge_count() {
            let fe = f.edge_map[e];
            if target.src[fe] != f.vertex_map[self.src[e]] || target.tgt[fe] != f.vertex_map[self.tgt[e]] {
                return false;
            }
        }
        mode == RelationMode::Raw || self.relations_preserved(target, f)
    }

    fn relations_preserved(&self, target: &RationalQuiver, f: &QuiverMorphism) -> bool {
        self.relations.iter().all(|(p, q)| {
            let fp: Path = p.iter().map(|&e| f.edge_map[e]).collect();
            let fq: Path = q.iter().map(|&e| f.edge_map[e]).collect();
            target.paths_equivalent(&fp, &fq)
        })
    }

    pub fn identity_morphism(&self) -> QuiverMorphism {
        QuiverMorphism { vertex_map: (0..self.vertex_count()).collect(), edge_map: (0..self.edge_count()).collect() }
    }

    /// Finds an isomorphism onto `other`, if one exists (exhaustive search, raw mode).
    pub fn find_isomorphism(&self, other: &RationalQuiver) -> Option<QuiverMorphism> {
        if self.vertex_count() != other.vertex_count() || self.edge_count() != other.edge_count() {
            return None;
        }
        quiver_homs(self, other, RelationMode::Raw).ok()?.into_iter().find(|f| is_bijective(&f.vertex_map) && is_bijective(&f.edge_map))
    }
}

fn is_bijective(f: &[usize]) -> bool {
    let mut seen = vec![false; f.len()];
    f.iter().all(|&x| x < f.len() && !std::mem::replace(&mut seen[x], true))
}

/// Restriction together with the adjunction unit.
#[derive(Debug, Clone)]
pub struct Restricted {
    pub quiver: RationalQuiver,
    pub vertex_unit: Vec<usize>,
    pub edge_unit: Vec<usize>,
    pub coset_reps: Vec<usize>,
}

/// All morphisms q1 -> q2.
pub fn quiver_homs(q1: &RationalQuiver, q2: &RationalQuiver, mode: RelationMode) -> Result<Vec<QuiverMorphism>, GroupError> {
    if q1.group != q2.group {
        return Err(GroupError::Mismatch("quivers over different groups".into()));
    }
    let mut out = Vec::new();
    let edge_orbits = q1.edges.orbits();
    for vmap in equivariant_maps(&q1.vertices, &q2.vertices)? {
        let choices: Vec<Vec<usize>> = edge_orbits
            .iter()
            .map(|o| {
                let e = o[0];
                let stab = q1.edges.stabilizer(e);
                (0..q2.edge_count())
                    .filter(|&f| {
                        q2.src[f] == vmap[q1.src[e]]
                            && q2.tgt[f] == vmap[q1.tgt[e]]
                            && stab.elements().iter().all(|&g| q2.edges.act(g, f) == f)
                    })
                    .collect()
            })
            .collect();
        if choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut pick = vec![0usize; edge_orbits.len()];
        loop {
            let mut emap = vec![0; q1.edge_count()];
            for (k, o) in edge_orbits.iter().enumerate() {
                let img = choices[k][pick[k]];
                for g in q1.group.elements() {
                    emap[q1.edges.act(g, o[0])] = q2.edges.act(g, img);
                }
            }
            let f = QuiverMorphism { vertex_map: vmap.clone(), edge_map: emap };
            if mode == RelationMode::Raw || q1.relations_preserved(q2, &f) {
                out.push(f);
            }
            let mut i = 0;
            loop {
                if i == pick.len() {
                    break;
                }
                pick[i] += 1;
                if pick[i] < choices[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == pick.len() {
                break;
            }
        }
    }
    Ok(out)
}

/// Outcome of the restriction / base-change adjunction check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjunctionCheck {
    /// |Hom_H(q_e, base_change(q_k, H))|
    pub left: usize,
    /// |Hom_G(restrict(q_e), q_k)|
    pub right: usize,
    /// The transpose map is a well-defined bijection with inverse "precompose with the unit".
    pub bijection: bool,
}

/// Verifies Hom_H(q_e, q_k|_H) = Hom_G(G x_H q_e, q_k) via the explicit transpose.
pub fn check_adjunction(q_e: &RationalQuiver, h: &Subgroup, q_k: &RationalQuiver, mode: RelationMode) -> Result<AdjunctionCheck, GroupError> {
    let res = q_e.restrict(h)?;
    let bc = q_k.base_change(h)?;
    let left = quiver_homs(q_e, &bc, mode)?;
    let right = quiver_homs(&res.quiver, q_k, mode)?;
    let nv = q_e.vertex_count();
    let ne = q_e.edge_count();
    let mut images = HashSet::new();
    let mut bijection = true;
    for f in &left {
        let mut vmap = vec![0; res.quiver.vertex_count()];
        let mut emap = vec![0; res.quiver.edge_count()];
        for (c, &r) in res.coset_reps.iter().enumerate() {
            for v in 0..nv {
                vmap[c * nv + v] = q_k.vertices.act(r, f.vertex_map[v]);
            }
            for e in 0..ne {
                emap[c * ne + e] = q_k.edges.act(r, f.edge_map[e]);
            }
        }
        let t = QuiverMorphism { vertex_map: vmap, edge_map: emap };
        let back = QuiverMorphism {
            vertex_map: res.vertex_unit.iter().map(|&p| t.vertex_map[p]).collect(),
            edge_map: res.edge_unit.iter().map(|&p| t.edge_map[p]).collect(),
        };
        if !res.quiver.is_morphism(q_k, &t, mode) || back != *f {
            bijection = false;
        }
        images.insert(t);
    }
    bijection &= images.len() == left.len() && images.len() == right.len() && right.iter().all(|f| images.contains(f));
    Ok(AdjunctionCheck { left: left.len(), right: right.len(), bijection })
}

/// Fixture quivers.
pub mod fixtures {
    use super::*;

    pub fn c2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(2))
    }

    /// Vertices (-, *, +), edges a-: - -> *, b-: * -> -, a+: + -> *, b+: * -> +, with c swapping signs
    /// and the relation a- b- = a+ b+ on M(*).
    pub fn gelfand() -> RationalQuiver {
        let g = c2();
        let v = GSet::from_generators(g.clone(), 3, &[vec![2, 1, 0]]).expect("action");
        let e = GSet::from_generators(g, 4, &[vec![2, 3, 0, 1]]).expect("action");
        RationalQuiver::new(v, e, vec![0, 1, 2, 1], vec![1, 0, 1, 2], vec![(vec![1, 0], vec![3, 2])])
            .expect("gelfand quiver")
            .with_names(&["-", "*", "+"], &["a-", "b-", "a+", "b+"])
    }

    /// Two vertices (-, +), edges a: - -> +, b: + -> -, swapped by c.
    pub fn cyclic() -> RationalQuiver {
        let g = c2();
        let v = GSet::from_generators(g.clone(), 2, &[vec![1, 0]]).expect("action");
        let e = GSet::from_generators(g, 2, &[vec![1, 0]]).expect("action");
        RationalQuiver::new(v, e, vec![0, 1], vec![1, 0], vec![]).expect("cyclic quiver").with_names(&["-", "+"], &["a", "b"])
    }

    /// One vertex with one loop over the given group, trivial action.
    pub fn one_loop(group: Arc<FiniteGroup>) -> RationalQuiver {
        let v = GSet::trivial(group.clone(), 1);
        let e = GSet::trivial(group, 1);
        RationalQuiver::new(v, e, vec![0], vec![0], vec![]).expect("loop").with_names(&["o"], &["l"])
    }

    /// The restriction of the one-loop quiver over Q(sqrt -1) to Q: two swapped loops.
    pub fn two_loop() -> RationalQuiver {
        let g = c2();
        let triv = g.trivial_subgroup();
        let base = one_loop(Arc::new(triv.as_group()));
        let mut q = base.restrict(&triv).expect("restriction").quiver;
        q.vertex_names = vec!["+".into(), "-".into()];
        q.edge_names = vec!["a+".into(), "a-".into()];
        q
    }

    /// The 2-cycle - -> + -> - over the given group with trivial action.
    pub fn split_two_cycle(group: Arc<FiniteGroup>) -> RationalQuiver {
        let v = GSet::trivial(group.clone(), 2);
        let e = GSet::trivial(group, 2);
        RationalQuiver::new(v, e, vec![0, 1], vec![1, 0], vec![]).expect("2-cycle").with_names(&["-", "+"], &["a", "b"])
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn gelfand_valid_and_nonsplit() {
        let r = gelfand().validate();
        assert!(r.ok(), "{r}");
        assert!(!gelfand().is_split());
    }

    #[test]
    fn broken_action_reports_edge() {
        let q = gelfand();
        // c a+ = b+ and c b+ = a+, with a-/b- swapped accordingly
        let e = GSet::from_generators(q.group.clone(), 4, &[vec![1, 0, 3, 2]]).unwrap();
        let bad = RationalQuiver { edges: e, ..q };
        let r = bad.validate();
        assert_eq!(r.passed("equivariance"), Some(false));
        assert!(r.checks[0].detail.contains("a+"));
    }

    #[test]
    fn trivial_action_is_split() {
        let q = one_loop(c2());
        assert!(q.validate().ok());
        assert!(q.is_split());
    }

    #[test]
    fn base_change_examples() {
        let q = gelfand();
        let g = q.group.clone();
        let split = q.base_change(&g.trivial_subgroup()).unwrap();
        assert!(split.is_split() && split.validate().ok());
        let same = q.base_change(&g.full_subgroup()).unwrap();
        assert_eq!(same, q);
        let c = cyclic().base_change(&g.trivial_subgroup()).unwrap();
        assert!(c.is_split() && c.edge_count() == 2);
    }

    #[test]
    fn restrict_examples() {
        let two = two_loop();
        assert_eq!((two.vertex_count(), two.edge_count()), (2, 2));
        assert!(two.validate().ok() && !two.is_split());
        let g = c2();
        let cyc = split_two_cycle(Arc::new(g.trivial_subgroup().as_group()));
        let r = cyc.restrict(&g.trivial_subgroup()).unwrap().quiver;
        assert_eq!((r.vertex_count(), r.edge_count()), (4, 4));
        assert_eq!(r.edges.orbits().len(), 2);
        let q = gelfand();
        let same = q.restrict(&g.full_subgroup()).unwrap().quiver;
        assert!(same.find_isomorphism(&q).is_some());
    }

    #[test]
    fn homs_and_adjunction() {
        let q = gelfand();
        let homs = quiver_homs(&q, &q, RelationMode::WithRelations).unwrap();
        assert!(homs.contains(&q.identity_morphism()));
        // a split loop must land on a c-fixed loop; the Gelfand quiver has none
        assert!(quiver_homs(&one_loop(c2()), &q, RelationMode::WithRelations).unwrap().is_empty());
        let g = c2();
        let triv = g.trivial_subgroup();
        let base = one_loop(Arc::new(triv.as_group()));
        for target in [two_loop(), gelfand(), cyclic(), one_loop(g.clone())] {
            let adj = check_adjunction(&base, &triv, &target, RelationMode::WithRelations).unwrap();
            assert!(adj.bijection && adj.left == adj.right, "{adj:?}");
        }
        let adj = check_adjunction(&base, &triv, &two_loop(), RelationMode::Raw).unwrap();
        assert_eq!(adj.left, 2);
    }

    #[test]
    fn gelfand_relation_rewrites() {
        let q = gelfand();
        assert!(q.paths_equivalent(&[1, 0], &[3, 2]));
        assert!(q.paths_equivalent(&[1, 0, 1], &[3, 2, 1]));
        assert!(!q.paths_equivalent(&[0, 1], &[2, 3]));
    }
}
