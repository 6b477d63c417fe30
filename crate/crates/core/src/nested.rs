//! Nested collections of strongly connected subsets, maximal nested
//! collections with their `i ↦ S_i` bijection, the three mutation moves, and
//! the exchange graph on all maximal nested collections.

use std::collections::VecDeque;
use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::digraph::{Digraph, VertexSet};
use crate::{Error, Result};

/// Default vertex-count cap for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// Why a family fails to be nested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NestedViolation {
    Empty,
    NotStronglyConnected { set: VertexSet },
    Repeated { set: VertexSet },
    Crossing { a: VertexSet, b: VertexSet },
    /// Pairwise disjoint members that are not the components of their union.
    MergedComponents { members: Vec<VertexSet> },
}

impl fmt::Display for NestedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "empty member"),
            Self::NotStronglyConnected { set } => write!(f, "{set} is not strongly connected"),
            Self::Repeated { set } => write!(f, "{set} repeated"),
            Self::Crossing { a, b } => write!(f, "{a} and {b} overlap without nesting"),
            Self::MergedComponents { members } => {
                let parts: Vec<String> = members.iter().map(|s| s.to_string()).collect();
                write!(f, "disjoint members {} are not the strongly connected components of their union", parts.join(" "))
            }
        }
    }
}

/// Checks the three nestedness conditions. The empty family is nested.
pub fn check_nested(g: &Digraph, family: &[VertexSet]) -> std::result::Result<(), NestedViolation> {
    let mut seen = FxHashSet::default();
    for &s in family {
        if s.is_empty() {
            return Err(NestedViolation::Empty);
        }
        if !s.is_subset(g.vertices()) || !g.is_strongly_connected(s).expect("nonempty") {
            return Err(NestedViolation::NotStronglyConnected { set: s });
        }
        if !seen.insert(s) {
            return Err(NestedViolation::Repeated { set: s });
        }
    }
    for (k, &a) in family.iter().enumerate() {
        for &b in &family[k + 1..] {
            if !a.is_disjoint(b) && !a.is_subset(b) && !b.is_subset(a) {
                return Err(NestedViolation::Crossing { a, b });
            }
        }
    }
    // Merging is monotone under enlarging a disjoint subfamily, so maximal
    // pairwise-disjoint subfamilies suffice.
    let mut chosen = Vec::new();
    disjoint_subfamilies(g, family, 0, VertexSet::EMPTY, &mut chosen)
}

fn disjoint_subfamilies(g: &Digraph, family: &[VertexSet], from: usize, used: VertexSet, chosen: &mut Vec<VertexSet>) -> std::result::Result<(), NestedViolation> {
    let mut extended = false;
    for k in from..family.len() {
        if family[k].is_disjoint(used) {
            extended = true;
            chosen.push(family[k]);
            let r = disjoint_subfamilies(g, family, k + 1, used | family[k], chosen);
            chosen.pop();
            r?;
        }
    }
    let maximal = !extended && family.iter().all(|s| !s.is_disjoint(used) || chosen.contains(s));
    if maximal && chosen.len() >= 2 && g.scc_partition(used).len() != chosen.len() {
        let mut members = chosen.clone();
        members.sort();
        return Err(NestedViolation::MergedComponents { members });
    }
    Ok(())
}

pub fn is_nested(g: &Digraph, family: &[VertexSet]) -> bool {
    check_nested(g, family).is_ok()
}

/// The kind of move a mutation direction performs on a collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    Activation,
    Deactivation,
    InternalMutation,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::Activation => "activation",
            Move::Deactivation => "deactivation",
            Move::InternalMutation => "internal mutation",
        })
    }
}

/// A maximal nested collection on its support `S`, stored through the
/// bijection `i ↦ S_i` (the smallest member containing `i`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MaximalNestedCollection {
    /// `owner[i - 1] = S_i`, or empty for `i ∉ S`.
    owner: Vec<VertexSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionJson {
    pub support: VertexSet,
    pub sets: Vec<VertexSet>,
}

impl MaximalNestedCollection {
    pub fn empty(n: usize) -> Self {
        MaximalNestedCollection { owner: vec![VertexSet::EMPTY; n] }
    }

    /// Validates nestedness and maximality (the smallest-member map must be a
    /// bijection from the support onto the family).
    pub fn from_sets(g: &Digraph, sets: &[VertexSet]) -> Result<Self> {
        check_nested(g, sets).map_err(|v| Error::Invalid(format!("not nested: {v}")))?;
        let mut owner = vec![VertexSet::EMPTY; g.n()];
        for &s in sets {
            let inner = sets.iter().filter(|t| t.is_subset(s) && **t != s).fold(VertexSet::EMPTY, |acc, t| acc | *t);
            let rest = s.minus(inner);
            if rest.len() != 1 {
                return Err(Error::Invalid(format!("not maximal: {s} has {} vertices outside its proper sub-members", rest.len())));
            }
            owner[rest.first().expect("one vertex") - 1] = s;
        }
        Ok(MaximalNestedCollection { owner })
    }

    pub fn from_json(g: &Digraph, j: &CollectionJson) -> Result<Self> {
        let m = Self::from_sets(g, &j.sets)?;
        if m.support() != j.support {
            return Err(Error::Invalid(format!("support {} does not match the union of the sets {}", j.support, m.support())));
        }
        Ok(m)
    }

    pub fn to_json(&self) -> CollectionJson {
        CollectionJson { support: self.support(), sets: self.sets() }
    }

    /// Activates the vertices of `seq` in order starting from the empty
    /// collection.
    pub fn from_activations(g: &Digraph, seq: &[usize]) -> Result<Self> {
        let mut m = Self::empty(g.n());
        for &s in seq {
            m = m.activate(g, s)?;
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.owner.len()
    }

    pub fn support(&self) -> VertexSet {
        self.owner.iter().enumerate().filter(|(_, s)| !s.is_empty()).map(|(i, _)| i + 1).collect()
    }

    /// Members in display order (by size, then lexicographically).
    pub fn sets(&self) -> Vec<VertexSet> {
        let mut v: Vec<VertexSet> = self.owner.iter().copied().filter(|s| !s.is_empty()).collect();
        v.sort_by(VertexSet::display_cmp);
        v
    }

    pub fn len(&self) -> usize {
        self.owner.iter().filter(|s| !s.is_empty()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `S_i`, or `None` if `i` is outside the support.
    pub fn set_of(&self, i: usize) -> Option<VertexSet> {
        let s = self.owner[i - 1];
        (!s.is_empty()).then_some(s)
    }

    pub fn contains_set(&self, s: VertexSet) -> bool {
        !s.is_empty() && self.owner.contains(&s)
    }

    /// The vertex `i` with `S_i = s`.
    pub fn owner_of(&self, s: VertexSet) -> Option<usize> {
        self.owner.iter().position(|&t| t == s && !s.is_empty()).map(|k| k + 1)
    }

    /// `i ⪯ j` iff `S_i ⊆ S_j`.
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        match (self.set_of(i), self.set_of(j)) {
            (Some(a), Some(b)) => a.is_subset(b),
            _ => false,
        }
    }

    /// The cover `i⁺`: owner of the smallest member strictly containing `S_i`.
    pub fn cover(&self, i: usize) -> Option<usize> {
        let si = self.set_of(i)?;
        self.owner
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_empty() && si.is_subset(**t) && **t != si)
            .min_by_key(|(_, t)| t.len())
            .map(|(k, _)| k + 1)
    }

    pub fn is_maximal(&self, i: usize) -> bool {
        self.set_of(i).is_some() && self.cover(i).is_none()
    }

    /// `S^max`.
    pub fn maxima(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&i| self.is_maximal(i)).collect()
    }

    /// Vertices `k` with `k⁺ = i`.
    pub fn children(&self, i: usize) -> Vec<usize> {
        (1..=self.n()).filter(|&k| self.cover(k) == Some(i)).collect()
    }

    /// The members contained in `within`, as a collection on that support.
    pub fn restrict(&self, within: VertexSet) -> MaximalNestedCollection {
        let owner = self.owner.iter().map(|&s| if !s.is_empty() && s.is_subset(within) { s } else { VertexSet::EMPTY }).collect();
        MaximalNestedCollection { owner }
    }

    /// The move `mutate` performs at `s`.
    pub fn move_kind(&self, s: usize) -> Move {
        match self.set_of(s) {
            None => Move::Activation,
            Some(_) if self.cover(s).is_none() => Move::Deactivation,
            Some(_) => Move::InternalMutation,
        }
    }

    /// Adds `S ⊕ s`.
    pub fn activate(&self, g: &Digraph, s: usize) -> Result<Self> {
        if s == 0 || s > self.n() {
            return Err(Error::Invalid(format!("vertex {s} outside 1..={}", self.n())));
        }
        if self.set_of(s).is_some() {
            return Err(Error::Invalid(format!("vertex {s} already active")));
        }
        let mut owner = self.owner.clone();
        owner[s - 1] = g.oplus(self.support(), s);
        Ok(MaximalNestedCollection { owner })
    }

    /// The direction undoing `mutate(s)`: `s` itself, except `s⁺` after an
    /// internal mutation (where `s` takes over `S_{s⁺}`).
    pub fn inverse_direction(&self, s: usize) -> usize {
        match self.move_kind(s) {
            Move::InternalMutation => self.cover(s).expect("internal vertex has a cover"),
            _ => s,
        }
    }

    /// Activation, deactivation or internal mutation at `s`.
    pub fn mutate(&self, g: &Digraph, s: usize) -> Result<(Move, Self)> {
        if s == 0 || s > self.n() {
            return Err(Error::Invalid(format!("vertex {s} outside 1..={}", self.n())));
        }
        let kind = self.move_kind(s);
        let next = match kind {
            Move::Activation => self.activate(g, s)?,
            Move::Deactivation => {
                let mut owner = self.owner.clone();
                owner[s - 1] = VertexSet::EMPTY;
                MaximalNestedCollection { owner }
            }
            Move::InternalMutation => {
                let up = self.cover(s).expect("internal vertex has a cover");
                let top = self.owner[up - 1];
                let mut owner = self.owner.clone();
                owner[s - 1] = top;
                owner[up - 1] = g.oplus(top.without(s).without(up), up);
                MaximalNestedCollection { owner }
            }
        };
        Ok((kind, next))
    }
}

impl fmt::Display for MaximalNestedCollection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sets().iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for MaximalNestedCollection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Labeled exchange graph stored as directed arcs `(from, to, label)`: one
/// arc per vertex and mutation direction. Every arc has a reverse arc, whose
/// label may differ (internal mutation at `s` is undone at `s⁺`).
#[derive(Debug, Clone, Serialize)]
pub struct ExchangeGraph<V> {
    pub vertices: Vec<V>,
    pub arcs: Vec<(usize, usize, usize)>,
}

impl<V> ExchangeGraph<V> {
    /// `(neighbor, label)` for the arcs leaving `v`.
    pub fn neighbors(&self, v: usize) -> Vec<(usize, usize)> {
        self.arcs.iter().filter(|a| a.0 == v).map(|&(_, b, l)| (b, l)).collect()
    }

    /// Undirected edges `(a, b, label at a, label at b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize, usize, usize)> {
        let back: FxHashMap<(usize, usize), usize> = self.arcs.iter().map(|&(a, b, l)| ((a, b), l)).collect();
        self.arcs.iter().filter(|a| a.0 < a.1).map(|&(a, b, l)| (a, b, l, back.get(&(b, a)).copied().unwrap_or(0))).collect()
    }

    /// Each vertex has one arc per label `1..=n`, no loops, and every arc has
    /// a reverse arc, so the underlying simple graph is `n`-regular.
    pub fn is_regular_with_distinct_labels(&self, n: usize) -> bool {
        let mut labels: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        let pairs: FxHashSet<(usize, usize)> = self.arcs.iter().map(|a| (a.0, a.1)).collect();
        for &(a, b, l) in &self.arcs {
            if a == b || !pairs.contains(&(b, a)) {
                return false;
            }
            labels[a].push(l);
        }
        let distinct_targets = (0..self.vertices.len()).all(|v| {
            let t: FxHashSet<usize> = self.arcs.iter().filter(|a| a.0 == v).map(|a| a.1).collect();
            t.len() == n
        });
        distinct_targets
            && labels.into_iter().all(|mut ls| {
                ls.sort_unstable();
                ls == (1..=n).collect::<Vec<_>>()
            })
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b, _) in &self.arcs {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Graphviz export of the undirected graph; an edge whose two end labels
    /// differ is labeled `s/t`.
    pub fn to_dot(&self, label: impl Fn(&V) -> String) -> String {
        let mut out = String::from("graph exchange {\n");
        for (k, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!("  {k} [label=\"{}\"];\n", label(v).replace('"', "\\\"")));
        }
        for (a, b, la, lb) in self.edges() {
            let l = if la == lb { la.to_string() } else { format!("{la}/{lb}") };
            out.push_str(&format!("  {a} -- {b} [label=\"{l}\"];\n"));
        }
        out.push_str("}\n");
        out
    }
}

fn check_cap(g: &Digraph, cap: usize) -> Result<()> {
    if g.n() > cap {
        return Err(Error::Limit(format!("{} vertices exceeds the enumeration cap {cap}", g.n())));
    }
    Ok(())
}

/// All maximal nested collections (every support, including the empty one),
/// in breadth-first order from the empty collection, with the labeled
/// exchange graph.
pub fn exchange_graph(g: &Digraph, cap: usize) -> Result<ExchangeGraph<MaximalNestedCollection>> {
    check_cap(g, cap)?;
    let start = MaximalNestedCollection::empty(g.n());
    let mut index: FxHashMap<MaximalNestedCollection, usize> = FxHashMap::default();
    index.insert(start.clone(), 0);
    let mut vertices = vec![start];
    let mut arcs = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        for s in 1..=g.n() {
            let (_, next) = vertices[k].mutate(g, s)?;
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    let j = vertices.len();
                    index.insert(next.clone(), j);
                    vertices.push(next);
                    queue.push_back(j);
                    j
                }
            };
            arcs.push((k, j, s));
        }
    }
    Ok(ExchangeGraph { vertices, arcs })
}

pub fn enumerate_maximal_collections(g: &Digraph, cap: usize) -> Result<Vec<MaximalNestedCollection>> {
    Ok(exchange_graph(g, cap)?.vertices)
}

/// The extended nested complex (all nested families over the strongly
/// connected subsets) and the nested set complex (nested families avoiding
/// the components of the graph).
#[derive(Debug, Clone)]
pub struct NestedComplexes {
    pub extended: Vec<Vec<VertexSet>>,
    pub nested: Vec<Vec<VertexSet>>,
    /// `nested_full_support[k]`: `nested[k]` together with the components is
    /// a maximal nested collection on all vertices.
    pub nested_full_support: Vec<bool>,
}

pub fn nested_complexes(g: &Digraph, cap: usize) -> Result<NestedComplexes> {
    check_cap(g, cap)?;
    let all = g.strongly_connected_subsets();
    let comps = g.components();
    let extended = nested_families(g, &all);
    let nested: Vec<Vec<VertexSet>> = extended.iter().filter(|f| f.iter().all(|s| !comps.contains(s))).cloned().collect();
    let nested_full_support = nested
        .iter()
        .map(|f| {
            let mut with: Vec<VertexSet> = f.clone();
            with.extend(comps.iter().copied());
            MaximalNestedCollection::from_sets(g, &with).is_ok_and(|m| m.support() == g.vertices())
        })
        .collect();
    Ok(NestedComplexes { extended, nested, nested_full_support })
}

/// All nested subfamilies of `ground` (sorted members), including the empty one.
fn nested_families(g: &Digraph, ground: &[VertexSet]) -> Vec<Vec<VertexSet>> {
    fn go(g: &Digraph, ground: &[VertexSet], from: usize, cur: &mut Vec<VertexSet>, out: &mut Vec<Vec<VertexSet>>) {
        out.push(cur.clone());
        for k in from..ground.len() {
            cur.push(ground[k]);
            // nestedness is inherited by subfamilies, so pruning is complete
            if is_nested(g, cur) {
                go(g, ground, k + 1, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(g, ground, 0, &mut Vec::new(), &mut out);
    out
}

/// Faces not contained in any other face.
pub fn facets(faces: &[Vec<VertexSet>]) -> Vec<Vec<VertexSet>> {
    let masks: Vec<FxHashSet<VertexSet>> = faces.iter().map(|f| f.iter().copied().collect()).collect();
    faces
        .iter()
        .enumerate()
        .filter(|(k, f)| !masks.iter().enumerate().any(|(j, m)| j != *k && m.len() > f.len() && f.iter().all(|s| m.contains(s))))
        .map(|(_, f)| f.clone())
        .collect()
}

fn validate_sequence(g: &Digraph, seq: &[usize]) -> Result<()> {
    let mut seen = VertexSet::EMPTY;
    for &s in seq {
        if s == 0 || s > g.n() {
            return Err(Error::Invalid(format!("vertex {s} outside 1..={}", g.n())));
        }
        if seen.contains(s) {
            return Err(Error::Invalid(format!("vertex {s} activated twice")));
        }
        seen = seen.with(s);
    }
    Ok(())
}

/// Whether `seq2` is obtained from `seq1` by swapping adjacent activations
/// whose sets are disjoint. Swaps keep the collection, so the sets are those
/// of `seq1`'s collection; two sequences are then swap-equivalent iff they
/// order every pair of overlapping sets the same way.
pub fn exchangeable_swap_equiv(g: &Digraph, seq1: &[usize], seq2: &[usize]) -> Result<bool> {
    validate_sequence(g, seq1)?;
    validate_sequence(g, seq2)?;
    if seq1.len() != seq2.len() || seq1.iter().collect::<VertexSet>() != seq2.iter().collect::<VertexSet>() {
        return Ok(false);
    }
    let m = MaximalNestedCollection::from_activations(g, seq1)?;
    let pos2: FxHashMap<usize, usize> = seq2.iter().enumerate().map(|(k, &s)| (s, k)).collect();
    for a in 0..seq1.len() {
        for b in a + 1..seq1.len() {
            let (sa, sb) = (seq1[a], seq1[b]);
            let overlap = !m.set_of(sa).expect("active").is_disjoint(m.set_of(sb).expect("active"));
            if overlap && pos2[&sa] > pos2[&sb] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl<'a> FromIterator<&'a usize> for VertexSet {
    fn from_iter<T: IntoIterator<Item = &'a usize>>(iter: T) -> Self {
        iter.into_iter().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample() -> Digraph {
        Digraph::new(4, &[(1, 2), (2, 1), (1, 3), (3, 1), (3, 2), (2, 3), (1, 4), (3, 4), (4, 2)]).unwrap()
    }

    fn vs(v: &[usize]) -> VertexSet {
        VertexSet::of(v)
    }

    #[test]
    fn nestedness_conditions() {
        let g = sample();
        assert!(is_nested(&g, &[vs(&[3]), vs(&[4]), vs(&[2, 3, 4]), vs(&[1, 2, 3, 4])]));
        assert!(is_nested(&g, &[]));
        let p3 = Digraph::path(3);
        assert_eq!(check_nested(&p3, &[vs(&[1]), vs(&[2])]), Err(NestedViolation::MergedComponents { members: vec![vs(&[1]), vs(&[2])] }));
        assert!(matches!(check_nested(&g, &[vs(&[1, 4])]), Err(NestedViolation::NotStronglyConnected { .. })));
        assert!(matches!(check_nested(&g, &[vs(&[1, 2]), vs(&[2, 3])]), Err(NestedViolation::Crossing { .. })));
        // three pairwise-harmless members merging only together
        let c3 = Digraph::new(3, &[(1, 2), (2, 3), (3, 1)]).unwrap();
        assert!(is_nested(&c3, &[vs(&[1]), vs(&[2])]));
        assert!(!is_nested(&c3, &[vs(&[1]), vs(&[2]), vs(&[3])]));
    }

    #[test]
    fn activation_examples() {
        let g = sample();
        let a = MaximalNestedCollection::from_activations(&g, &[3, 4, 2, 1]).unwrap();
        assert_eq!(a.to_string(), "{{3},{4},{2,3,4},{1,2,3,4}}");
        let b = MaximalNestedCollection::from_activations(&g, &[3, 4, 1, 2]).unwrap();
        assert_eq!(b.to_string(), "{{3},{4},{1,3},{1,2,3,4}}");
        let (kind, c) = a.mutate(&g, 2).unwrap();
        assert_eq!(kind, Move::InternalMutation);
        assert_eq!(c, b);
        assert!(a.activate(&g, 3).is_err());
        assert_eq!(a.maxima(), vec![1]);
        assert_eq!(a.cover(3), Some(2));
        assert_eq!(a.children(2), vec![3, 4]);
    }

    #[test]
    fn sample_graph_has_46_collections() {
        let g = sample();
        let eg = exchange_graph(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(eg.vertices.len(), 46);
        for m in &eg.vertices {
            for s in 1..=4 {
                let (_, next) = m.mutate(&g, s).unwrap();
                assert_ne!(&next, m);
                assert_eq!(&next.mutate(&g, m.inverse_direction(s)).unwrap().1, m);
            }
        }
        assert!(eg.is_regular_with_distinct_labels(4));
        assert!(eg.is_connected());
    }

    #[test]
    fn swap_equivalence() {
        let g = sample();
        assert!(exchangeable_swap_equiv(&g, &[3, 4, 2, 1], &[4, 3, 2, 1]).unwrap());
        assert!(exchangeable_swap_equiv(&g, &[3, 4, 2, 1], &[3, 4, 2, 1]).unwrap());
        assert!(!exchangeable_swap_equiv(&g, &[3, 4, 2, 1], &[3, 4, 1, 2]).unwrap());
        assert!(exchangeable_swap_equiv(&g, &[3, 3], &[3, 3]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = sample();
        let a = MaximalNestedCollection::from_activations(&g, &[3, 4, 2, 1]).unwrap();
        let s = serde_json::to_string(&a.to_json()).unwrap();
        assert_eq!(s, r#"{"support":[1,2,3,4],"sets":[[3],[4],[2,3,4],[1,2,3,4]]}"#);
        let back = MaximalNestedCollection::from_json(&g, &serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, a);
        assert!(MaximalNestedCollection::from_sets(&g, &[vs(&[1, 2, 3])]).is_err());
    }
}
