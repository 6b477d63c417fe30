//! Directed graphs on `1..=n`, vertex bitsets, strong connectivity and the
//! `S ⊕ j` / `S ⊖ j` split.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Largest supported vertex count (one bit per vertex).
pub const MAX_VERTICES: usize = 64;

/// A set of 1-based vertices; bit `v - 1` stands for vertex `v`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub const fn from_mask(mask: u64) -> Self {
        VertexSet(mask)
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    pub fn singleton(v: usize) -> Self {
        debug_assert!((1..=MAX_VERTICES).contains(&v));
        VertexSet(1u64 << (v - 1))
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn of(vertices: &[usize]) -> Self {
        vertices.iter().fold(Self::EMPTY, |s, &v| s.with(v))
    }

    pub fn contains(self, v: usize) -> bool {
        (1..=MAX_VERTICES).contains(&v) && self.0 >> (v - 1) & 1 == 1
    }

    pub fn with(self, v: usize) -> Self {
        self | Self::singleton(v)
    }

    pub fn without(self, v: usize) -> Self {
        VertexSet(self.0 & !Self::singleton(v).0)
    }

    pub fn minus(self, other: VertexSet) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: VertexSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest member.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                return None;
            }
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b + 1)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Number of members strictly between `a` and `b`.
    pub fn count_between(self, a: usize, b: usize) -> usize {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.iter().filter(|&v| v > lo && v < hi).count()
    }

    /// All subsets, in increasing mask order.
    pub fn subsets(self) -> impl Iterator<Item = VertexSet> {
        let full = self.0;
        let mut cur: Option<u64> = Some(0);
        std::iter::from_fn(move || {
            let c = cur?;
            cur = if c == full { None } else { Some((c.wrapping_sub(full)) & full) };
            Some(VertexSet(c))
        })
    }

    /// Display order: by size, then lexicographically by sorted members.
    pub fn display_cmp(&self, other: &VertexSet) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.to_vec().cmp(&other.to_vec()))
    }
}

impl std::ops::BitOr for VertexSet {
    type Output = VertexSet;
    fn bitor(self, rhs: VertexSet) -> VertexSet {
        VertexSet(self.0 | rhs.0)
    }
}

impl std::ops::BitAnd for VertexSet {
    type Output = VertexSet;
    fn bitand(self, rhs: VertexSet) -> VertexSet {
        VertexSet(self.0 & rhs.0)
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        iter.into_iter().fold(Self::EMPTY, |s, v| s.with(v))
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if let Some(bad) = v.iter().find(|&&x| x == 0 || x > MAX_VERTICES) {
            return Err(serde::de::Error::custom(format!("vertex {bad} out of range")));
        }
        Ok(v.into_iter().collect())
    }
}

/// A loopless directed graph without multiple edges on vertices `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    out: Vec<VertexSet>,
    inc: Vec<VertexSet>,
}

/// On-disk graph format. Undirected edges expand to both directions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: usize,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub undirected_edges: Option<Vec<[usize; 2]>>,
}

impl Digraph {
    /// Builds a graph; rejects loops, out-of-range vertices and repeated edges.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, Error> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::Graph(format!("vertex count {n} outside 1..={MAX_VERTICES}")));
        }
        let mut g = Digraph { n, out: vec![VertexSet::EMPTY; n], inc: vec![VertexSet::EMPTY; n] };
        for &(i, j) in edges {
            if i == 0 || j == 0 || i > n || j > n {
                return Err(Error::Graph(format!("edge ({i},{j}) has a vertex outside 1..={n}")));
            }
            if i == j {
                return Err(Error::Graph(format!("loop at vertex {i}")));
            }
            if g.has_edge(i, j) {
                return Err(Error::Graph(format!("duplicate edge ({i},{j})")));
            }
            g.out[i - 1] = g.out[i - 1].with(j);
            g.inc[j - 1] = g.inc[j - 1].with(i);
        }
        Ok(g)
    }

    pub fn from_json(j: &GraphJson) -> Result<Self, Error> {
        let mut edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        for e in j.undirected_edges.iter().flatten() {
            edges.push((e[0], e[1]));
            edges.push((e[1], e[0]));
        }
        Self::new(j.n, &edges)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson { n: self.n, edges: self.edges().map(|(i, j)| [i, j]).collect(), undirected_edges: None }
    }

    pub fn parse_json(text: &str) -> Result<Self, Error> {
        let j: GraphJson = serde_json::from_str(text).map_err(|e| Error::Graph(format!("bad graph JSON: {e}")))?;
        Self::from_json(&j)
    }

    /// Bidirected path `1 - 2 - ... - n`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).flat_map(|i| [(i, i + 1), (i + 1, i)]).collect();
        Self::new(n, &edges).expect("valid path")
    }

    /// Bidirected cycle on `n ≥ 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need at least 3 vertices");
        let mut edges: Vec<_> = (1..n).flat_map(|i| [(i, i + 1), (i + 1, i)]).collect();
        edges.extend([(n, 1), (1, n)]);
        Self::new(n, &edges).expect("valid cycle")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (1..=n).flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        Self::new(n, &edges).expect("valid complete graph")
    }

    pub fn edgeless(n: usize) -> Self {
        Self::new(n, &[]).expect("valid edgeless graph")
    }

    /// The graph with `n` vertices whose edge set is encoded by the bits of
    /// `code`, enumerating ordered pairs `(i, j)`, `i ≠ j`, row by row.
    pub fn from_code(n: usize, code: u64) -> Self {
        let mut edges = Vec::new();
        let mut bit = 0;
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    if code >> bit & 1 == 1 {
                        edges.push((i, j));
                    }
                    bit += 1;
                }
            }
        }
        Self::new(n, &edges).expect("valid coded graph")
    }

    /// Builtin graphs by name: `path:N`, `cycle:N`, `complete:N`, `edgeless:N`.
    pub fn builtin(name: &str) -> Result<Self, Error> {
        if name == "example" {
            return Ok(Self::example());
        }
        let (kind, n) = name.split_once(':').ok_or_else(|| Error::Graph(format!("unknown graph {name:?}")))?;
        let n: usize = n.parse().map_err(|_| Error::Graph(format!("bad vertex count in {name:?}")))?;
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::Graph(format!("vertex count {n} outside 1..={MAX_VERTICES}")));
        }
        match kind {
            "path" => Ok(Self::path(n)),
            "cycle" if n >= 3 => Ok(Self::cycle(n)),
            "complete" => Ok(Self::complete(n)),
            "edgeless" => Ok(Self::edgeless(n)),
            _ => Err(Error::Graph(format!("unknown graph {name:?}"))),
        }
    }

    /// The four-vertex running example: 1, 2, 3 pairwise joined both ways,
    /// 1→4, 3→4 and 4→2.
    pub fn example() -> Self {
        Self::new(4, &[(1, 2), (2, 1), (1, 3), (3, 1), (3, 2), (2, 3), (1, 4), (3, 4), (4, 2)]).expect("valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.out[i - 1].contains(j)
    }

    pub fn out_neighbors(&self, i: usize) -> VertexSet {
        self.out[i - 1]
    }

    pub fn in_neighbors(&self, i: usize) -> VertexSet {
        self.inc[i - 1]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.n).flat_map(move |i| self.out[i - 1].iter().map(move |j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(|s| s.len()).sum()
    }

    /// The graph with one extra vertex `n + 1` and the extra edges given.
    pub fn with_extra_vertex(&self, extra: &[(usize, usize)]) -> Result<Self, Error> {
        let mut edges: Vec<_> = self.edges().collect();
        edges.extend_from_slice(extra);
        Self::new(self.n + 1, &edges)
    }

    fn reach(&self, within: VertexSet, from: usize, forward: bool) -> VertexSet {
        let mut seen = VertexSet::singleton(from);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier.iter() {
                next = next | if forward { self.out[v - 1] } else { self.inc[v - 1] };
            }
            next = (next & within).minus(seen);
            seen = seen | next;
            frontier = next;
        }
        seen
    }

    /// Vertices reachable from `from` along paths inside `within ∪ {from}`.
    pub fn reachable_within(&self, within: VertexSet, from: usize) -> VertexSet {
        self.reach(within.with(from), from, true)
    }

    pub fn is_strongly_connected(&self, s: VertexSet) -> Result<bool, Error> {
        let Some(v) = s.first() else {
            return Err(Error::Invalid("empty-set connectivity undefined".into()));
        };
        Ok(self.reach(s, v, true) == s && self.reach(s, v, false) == s)
    }

    /// Strongly connected components of the subgraph induced on `s`, ordered
    /// by smallest member.
    pub fn scc_partition(&self, s: VertexSet) -> Vec<VertexSet> {
        let mut rest = s;
        let mut out = Vec::new();
        while let Some(v) = rest.first() {
            let c = self.reach(rest, v, true) & self.reach(rest, v, false);
            out.push(c);
            rest = rest.minus(c);
        }
        out
    }

    /// The strongly connected components of the whole graph.
    pub fn components(&self) -> Vec<VertexSet> {
        self.scc_partition(self.vertices())
    }

    /// All nonempty strongly connected subsets, in display order.
    pub fn strongly_connected_subsets(&self) -> Vec<VertexSet> {
        let mut out: Vec<VertexSet> = self
            .vertices()
            .subsets()
            .filter(|s| !s.is_empty() && self.is_strongly_connected(*s).expect("nonempty"))
            .collect();
        out.sort_by(VertexSet::display_cmp);
        out
    }

    /// `S ⊕ j`: the strongly connected component of `S ∪ {j}` containing `j`.
    pub fn oplus(&self, s: VertexSet, j: usize) -> VertexSet {
        let sj = s.with(j);
        self.reach(sj, j, true) & self.reach(sj, j, false)
    }

    /// `S ⊖ j = (S ∪ {j}) − (S ⊕ j)`.
    pub fn ominus(&self, s: VertexSet, j: usize) -> VertexSet {
        s.with(j).minus(self.oplus(s, j))
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges().map(|(i, j)| format!("{i}->{j}")).collect();
        write!(f, "Digraph(n={}, [{}])", self.n, edges.join(", "))
    }
}
