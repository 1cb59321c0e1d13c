//! Finite groups given by multiplication tables and finite G-sets.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("not a group law: {0}")]
    NotAGroup(String),
    #[error("not a group action: {0}")]
    NotAnAction(String),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("group mismatch: {0}")]
    Mismatch(String),
}

/// Finite group with elements 0..n. Equality compares multiplication tables.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
    generators: Vec<usize>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
    }
}
impl Eq for FiniteGroup {}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::NotAGroup("empty table".into()));
        }
        if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(GroupError::NotAGroup("table must be n x n with entries < n".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| GroupError::NotAGroup("no identity".into()))?;
        let mut inverses = vec![0; n];
        for g in 0..n {
            inverses[g] = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| GroupError::NotAGroup(format!("element {g} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAGroup(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        let mut g = FiniteGroup { table, identity, inverses, generators: Vec::new() };
        g.generators = g.greedy_generators();
        Ok(g)
    }

    pub fn with_generators(mut self, generators: Vec<usize>) -> Result<Self, GroupError> {
        if generators.iter().any(|&x| x >= self.order()) {
            return Err(GroupError::NotAGroup("generator out of range".into()));
        }
        if self.closure(&generators).len() != self.order() {
            return Err(GroupError::NotAGroup("designated generators do not generate".into()));
        }
        self.generators = generators;
        Ok(self)
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(table).expect("cyclic group")
    }

    /// Symmetric group on `n` letters; element 0 is the identity, elements in lexicographic order.
    pub fn symmetric(n: usize) -> Self {
        let perms = permutations(n);
        let index = |p: &Vec<usize>| perms.iter().position(|x| x == p).expect("closed");
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| index(&(0..n).map(|i| a[b[i]]).collect())).collect())
            .collect();
        Self::from_table(table).expect("symmetric group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    fn closure(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = [self.identity].into();
        let mut queue: VecDeque<usize> = [self.identity].into();
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(g, x);
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        set
    }

    fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = self.closure(&gens);
        for g in self.elements() {
            if !span.contains(&g) {
                gens.push(g);
                span = self.closure(&gens);
            }
        }
        gens
    }

    pub fn full_subgroup(self: &Arc<Self>) -> Subgroup {
        Subgroup { parent: self.clone(), elements: self.elements().collect() }
    }

    pub fn trivial_subgroup(self: &Arc<Self>) -> Subgroup {
        Subgroup { parent: self.clone(), elements: vec![self.identity] }
    }

    pub fn subgroup(self: &Arc<Self>, elements: &[usize]) -> Result<Subgroup, GroupError> {
        Subgroup::new(self.clone(), elements.to_vec())
    }

    /// All subgroups, each as a sorted element list.
    pub fn all_subgroups(self: &Arc<Self>) -> Vec<Subgroup> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut frontier = vec![self.closure(&[])];
        found.insert(frontier[0].iter().copied().collect());
        while let Some(s) = frontier.pop() {
            for g in self.elements() {
                if s.contains(&g) {
                    continue;
                }
                let mut gens: Vec<usize> = s.iter().copied().collect();
                gens.push(g);
                let t = self.closure(&gens);
                if found.insert(t.iter().copied().collect()) {
                    frontier.push(t);
                }
            }
        }
        found.into_iter().map(|e| Subgroup { parent: self.clone(), elements: e }).collect()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q: Vec<usize> = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Subgroup of a finite group, stored as a sorted element list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn new(parent: Arc<FiniteGroup>, mut elements: Vec<usize>) -> Result<Self, GroupError> {
        elements.sort_unstable();
        elements.dedup();
        if elements.iter().any(|&x| x >= parent.order()) {
            return Err(GroupError::NotASubgroup("element out of range".into()));
        }
        if !elements.contains(&parent.identity()) {
            return Err(GroupError::NotASubgroup("missing identity".into()));
        }
        for &a in &elements {
            if elements.binary_search(&parent.inv(a)).is_err() {
                return Err(GroupError::NotASubgroup(format!("not closed under inverse at {a}")));
            }
            for &b in &elements {
                if elements.binary_search(&parent.mul(a, b)).is_err() {
                    return Err(GroupError::NotASubgroup(format!("not closed under product at ({a},{b})")));
                }
            }
        }
        Ok(Subgroup { parent, elements })
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn is_full(&self) -> bool {
        self.order() == self.parent.order()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&g| other.contains(g))
    }

    pub fn index(&self) -> usize {
        self.parent.order() / self.order()
    }

    /// g H g^-1.
    pub fn conjugate(&self, g: usize) -> Subgroup {
        let p = &self.parent;
        let mut elements: Vec<usize> = self.elements.iter().map(|&h| p.mul(p.mul(g, h), p.inv(g))).collect();
        elements.sort_unstable();
        Subgroup { parent: p.clone(), elements }
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        Subgroup {
            parent: self.parent.clone(),
            elements: self.elements.iter().copied().filter(|&g| other.contains(g)).collect(),
        }
    }

    /// The subgroup as a group in its own right; element k corresponds to `elements()[k]`.
    pub fn as_group(&self) -> FiniteGroup {
        let p = &self.parent;
        let idx = |g: usize| self.elements.binary_search(&g).expect("closed");
        let table = self.elements.iter().map(|&a| self.elements.iter().map(|&b| idx(p.mul(a, b))).collect()).collect();
        FiniteGroup::from_table(table).expect("subgroup law")
    }

    /// Index of g inside `elements()`, if g lies in the subgroup.
    pub fn local_index(&self, g: usize) -> Option<usize> {
        self.elements.binary_search(&g).ok()
    }

    /// Left cosets gH ordered by their minimal element; the representative of H itself is
    /// the identity, all others use the minimal element.
    pub fn left_coset_reps(&self) -> Vec<usize> {
        let p = &self.parent;
        let mut seen = vec![false; p.order()];
        let mut reps = Vec::new();
        for g in p.elements() {
            if seen[g] {
                continue;
            }
            let rep = if self.contains(g) { p.identity() } else { g };
            for &h in &self.elements {
                seen[p.mul(g, h)] = true;
            }
            reps.push(rep);
        }
        reps
    }

    /// Index of the coset containing g in `left_coset_reps()` order.
    pub fn coset_of(&self, reps: &[usize], g: usize) -> usize {
        let p = &self.parent;
        reps.iter()
            .position(|&r| self.contains(p.mul(p.inv(r), g)))
            .expect("cosets cover the group")
    }
}

/// Finite set {0..size} with a left action; `action[g][x]` is g.x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GSet {
    group: Arc<FiniteGroup>,
    size: usize,
    action: Vec<Vec<usize>>,
}

impl GSet {
    /// Builds an action from permutations of the designated generators.
    pub fn from_generators(group: Arc<FiniteGroup>, size: usize, perms: &[Vec<usize>]) -> Result<Self, GroupError> {
        let gens = group.generators().to_vec();
        if perms.len() != gens.len() {
            return Err(GroupError::NotAnAction(format!("{} permutations for {} generators", perms.len(), gens.len())));
        }
        for p in perms {
            let mut sorted = p.clone();
            sorted.sort_unstable();
            if sorted != (0..size).collect::<Vec<_>>() {
                return Err(GroupError::NotAnAction(format!("{p:?} is not a permutation of {size} points")));
            }
        }
        let n = group.order();
        let mut action: Vec<Option<Vec<usize>>> = vec![None; n];
        action[group.identity()] = Some((0..size).collect());
        let mut queue: VecDeque<usize> = [group.identity()].into();
        while let Some(g) = queue.pop_front() {
            let ag = action[g].clone().expect("visited");
            for (s, p) in gens.iter().zip(perms) {
                let sg = group.mul(*s, g);
                let cand: Vec<usize> = ag.iter().map(|&x| p[x]).collect();
                match &action[sg] {
                    Some(existing) if *existing != cand => {
                        return Err(GroupError::NotAnAction("generator permutations violate the group relations".into()))
                    }
                    Some(_) => {}
                    None => {
                        action[sg] = Some(cand);
                        queue.push_back(sg);
                    }
                }
            }
        }
        let action: Vec<Vec<usize>> = action.into_iter().map(|a| a.expect("generators generate")).collect();
        Self::from_action(group, size, action)
    }

    pub fn from_action(group: Arc<FiniteGroup>, size: usize, action: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        if action.len() != group.order() || action.iter().any(|r| r.len() != size || r.iter().any(|&x| x >= size)) {
            return Err(GroupError::NotAnAction("action table has wrong shape".into()));
        }
        if action[group.identity()] != (0..size).collect::<Vec<_>>() {
            return Err(GroupError::NotAnAction("identity does not act trivially".into()));
        }
        for g in group.elements() {
            for h in group.elements() {
                let gh = group.mul(g, h);
                if (0..size).any(|x| action[g][action[h][x]] != action[gh][x]) {
                    return Err(GroupError::NotAnAction(format!("g(hx) != (gh)x for g={g}, h={h}")));
                }
            }
        }
        Ok(GSet { group, size, action })
    }

    pub fn trivial(group: Arc<FiniteGroup>, size: usize) -> Self {
        let action = vec![(0..size).collect(); group.order()];
        GSet { group, size, action }
    }

    /// Left translation action on the group itself.
    pub fn regular(group: Arc<FiniteGroup>) -> Self {
        let action = group.elements().map(|g| group.elements().map(|x| group.mul(g, x)).collect()).collect();
        let size = group.order();
        GSet { group, size, action }
    }

    /// Left multiplication on the cosets G/H in `left_coset_reps` order.
    pub fn cosets(h: &Subgroup) -> Self {
        let group = h.parent().clone();
        let reps = h.left_coset_reps();
        let action = group
            .elements()
            .map(|g| reps.iter().map(|&r| h.coset_of(&reps, group.mul(g, r))).collect())
            .collect();
        GSet { group, size: reps.len(), action }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.action[g][x]
    }

    pub fn action_table(&self) -> &[Vec<usize>] {
        &self.action
    }

    /// Permutations of the designated generators.
    pub fn generator_perms(&self) -> Vec<Vec<usize>> {
        self.group.generators().iter().map(|&g| self.action[g].clone()).collect()
    }

    pub fn is_trivial_action(&self) -> bool {
        self.action.iter().all(|r| r.iter().enumerate().all(|(i, &x)| i == x))
    }

    /// Orbits as sorted point lists, ordered by their minimal point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size];
        let mut out = Vec::new();
        for x in 0..self.size {
            if seen[x] {
                continue;
            }
            let mut orbit: Vec<usize> = self.group.elements().map(|g| self.act(g, x)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &y in &orbit {
                seen[y] = true;
            }
            out.push(orbit);
        }
        out
    }

    /// Minimal-index representative of the orbit of x.
    pub fn orbit_rep(&self, x: usize) -> usize {
        self.group.elements().map(|g| self.act(g, x)).min().expect("nonempty group")
    }

    pub fn stabilizer(&self, x: usize) -> Subgroup {
        Subgroup {
            parent: self.group.clone(),
            elements: self.group.elements().filter(|&g| self.act(g, x) == x).collect(),
        }
    }

    /// Minimal g with g.from = to.
    pub fn transporter(&self, from: usize, to: usize) -> Option<usize> {
        self.group.elements().find(|&g| self.act(g, from) == to)
    }

    /// Restriction of the action to a subgroup, as a set over `h.as_group()`.
    pub fn restrict(&self, h: &Subgroup) -> Result<GSet, GroupError> {
        if h.parent() != &self.group {
            return Err(GroupError::Mismatch("subgroup of a different group".into()));
        }
        let group = Arc::new(h.as_group());
        let action = h.elements().iter().map(|&g| self.action[g].clone()).collect();
        Ok(GSet { group, size: self.size, action })
    }

    /// Checks that `f` commutes with the actions.
    pub fn is_equivariant(&self, target: &GSet, f: &[usize]) -> bool {
        self.group.elements().all(|g| (0..self.size).all(|x| f[self.act(g, x)] == target.act(g, f[x])))
    }
}

/// Balanced product G x_H X of an H-set X, with the canonical H-map X -> G x_H X.
#[derive(Debug, Clone)]
pub struct Induced {
    pub set: GSet,
    pub coset_reps: Vec<usize>,
    /// Image of x under the unit X -> res(G x_H X).
    pub unit: Vec<usize>,
}

impl Induced {
    /// Point [coset_reps[k], x].
    pub fn point(&self, k: usize, x: usize) -> usize {
        k * self.unit.len() + x
    }
}

/// Induces an H-set to G. `x` must be a set over `h.as_group()`.
pub fn induce(x: &GSet, h: &Subgroup) -> Result<Induced, GroupError> {
    let g = h.parent().clone();
    if x.group().order() != h.order() || **x.group() != h.as_group() {
        return Err(GroupError::Mismatch("set is not over the given subgroup".into()));
    }
    let reps = h.left_coset_reps();
    let n = x.size();
    let mut action = vec![vec![0; reps.len() * n]; g.order()];
    for s in g.elements() {
        for (k, &r) in reps.iter().enumerate() {
            let sr = g.mul(s, r);
            let l = h.coset_of(&reps, sr);
            let hh = g.mul(g.inv(reps[l]), sr);
            let local = h.local_index(hh).expect("in subgroup");
            for p in 0..n {
                action[s][k * n + p] = l * n + x.act(local, p);
            }
        }
    }
    let k0 = reps.iter().position(|&r| r == g.identity()).expect("identity coset");
    let unit = (0..n).map(|p| k0 * n + p).collect();
    let set = GSet::from_action(g, reps.len() * n, action)?;
    Ok(Induced { set, coset_reps: reps, unit })
}

/// All equivariant maps x -> y, each as a point list. Enumerates images of orbit
/// representatives subject to stabilizer containment.
pub fn equivariant_maps(x: &GSet, y: &GSet) -> Result<Vec<Vec<usize>>, GroupError> {
    if x.group() != y.group() {
        return Err(GroupError::Mismatch("sets over different groups".into()));
    }
    let orbits = x.orbits();
    let mut choices: Vec<Vec<usize>> = Vec::new();
    for o in &orbits {
        let stab = x.stabilizer(o[0]);
        choices.push((0..y.size()).filter(|&p| stab.elements().iter().all(|&g| y.act(g, p) == p)).collect());
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; orbits.len()];
    if choices.iter().any(|c| c.is_empty()) {
        return Ok(out);
    }
    loop {
        let mut f = vec![usize::MAX; x.size()];
        for (k, o) in orbits.iter().enumerate() {
            let rep = o[0];
            let img = choices[k][pick[k]];
            for g in x.group().elements() {
                f[x.act(g, rep)] = y.act(g, img);
            }
        }
        out.push(f);
        let mut i = 0;
        loop {
            if i == pick.len() {
                return Ok(out);
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<usize>>,
}

impl GroupJson {
    pub fn from_group(g: &FiniteGroup) -> Self {
        GroupJson { order: g.order(), table: g.table().to_vec(), generators: Some(g.generators().to_vec()) }
    }

    pub fn to_group(&self) -> Result<FiniteGroup, GroupError> {
        if self.table.len() != self.order {
            return Err(GroupError::NotAGroup("order does not match table".into()));
        }
        let g = FiniteGroup::from_table(self.table.clone())?;
        match &self.generators {
            Some(gens) => g.with_generators(gens.clone()),
            None => Ok(g),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GSetJson {
    pub size: usize,
    pub action: Vec<Vec<usize>>,
}

impl GSetJson {
    pub fn from_gset(x: &GSet) -> Self {
        GSetJson { size: x.size(), action: x.generator_perms() }
    }

    pub fn to_gset(&self, group: &Arc<FiniteGroup>) -> Result<GSet, GroupError> {
        GSet::from_generators(group.clone(), self.size, &self.action)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(2))
    }

    #[test]
    fn orbit_examples() {
        let g = c2();
        assert_eq!(GSet::trivial(g.clone(), 3).orbits(), vec![vec![0], vec![1], vec![2]]);
        // points: 0 = minus, 1 = star, 2 = plus
        let gel = GSet::from_generators(g, 3, &[vec![2, 1, 0]]).unwrap();
        assert_eq!(gel.orbits(), vec![vec![0, 2], vec![1]]);
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        assert_eq!(GSet::regular(s3).orbits().len(), 1);
    }

    #[test]
    fn stabilizer_examples() {
        let g = c2();
        let gel = GSet::from_generators(g.clone(), 3, &[vec![2, 1, 0]]).unwrap();
        assert!(gel.stabilizer(1).is_full());
        assert!(gel.stabilizer(2).is_trivial());
        assert!(GSet::trivial(g, 2).stabilizer(0).is_full());
    }

    #[test]
    fn induce_examples() {
        let g = c2();
        let triv = g.trivial_subgroup();
        let pt = GSet::trivial(Arc::new(triv.as_group()), 1);
        let ind = induce(&pt, &triv).unwrap();
        assert_eq!(ind.set.size(), 2);
        assert_eq!(ind.set.orbits().len(), 1);

        let full = g.full_subgroup();
        let x = GSet::from_generators(Arc::new(full.as_group()), 2, &[vec![1, 0]]).unwrap();
        let same = induce(&x, &full).unwrap();
        assert_eq!(same.set.action_table(), x.action_table());

        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let t = s3.all_subgroups().into_iter().find(|h| h.order() == 2).unwrap();
        let pt = GSet::trivial(Arc::new(t.as_group()), 1);
        let ind = induce(&pt, &t).unwrap();
        assert_eq!(ind.set.size(), 3);
        assert_eq!(ind.set.orbits().len(), 1);
        assert_eq!(ind.set.stabilizer(ind.unit[0]), t);
    }

    #[test]
    fn equivariant_map_examples() {
        let g = c2();
        let swap = GSet::from_generators(g.clone(), 2, &[vec![1, 0]]).unwrap();
        assert_eq!(equivariant_maps(&swap, &swap).unwrap().len(), 2);
        let pt = GSet::trivial(g, 1);
        assert_eq!(equivariant_maps(&swap, &pt).unwrap().len(), 1);
        assert_eq!(equivariant_maps(&pt, &swap).unwrap().len(), 0);
    }

    #[test]
    fn bad_tables_rejected() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
        let g = c2();
        assert!(GSet::from_generators(g, 3, &[vec![1, 2, 0]]).is_err());
    }
}
