//! Interactive mutation sessions: a graph, the directions applied so far and
//! the seed they lead to. The seed is always the replay of the history from
//! the initial seed, so a session is determined by `(graph, history)`.

use std::collections::{BTreeMap, VecDeque};

use lpgraph_core::graphlp::{collection_of_names, in_names, initial_seed, position_label, render_seed, ClusterVar, Engine, SeedJson};
use lpgraph_core::lpcore::Seed;
use lpgraph_core::nested::CollectionJson;
use lpgraph_core::{Digraph, GraphJson, MaximalNestedCollection, Move};
use serde::Serialize;

use crate::Failure;

/// Largest neighborhood radius served.
pub const MAX_RADIUS: usize = 2;

pub struct Session {
    graph: Digraph,
    history: Vec<usize>,
    seed: Seed,
    names: Vec<Option<ClusterVar>>,
}

/// What a client needs to draw the current state.
#[derive(Debug, Clone, Serialize)]
pub struct SeedView {
    pub graph: GraphJson,
    pub history: Vec<usize>,
    pub seed: SeedJson,
    /// `None` when some variable is not an `X_i` or `Y_I`.
    pub collection: Option<CollectionJson>,
    pub directions: Vec<Direction>,
}

/// A mutation direction with the move it performs on the collection.
#[derive(Debug, Clone, Serialize)]
pub struct Direction {
    pub position: usize,
    pub variable: String,
    pub vertex: Option<usize>,
    #[serde(rename = "move")]
    pub kind: Option<Move>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Changed {
    pub position: usize,
    pub old: String,
    pub new: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MutationView {
    pub seed: SeedView,
    pub changed: Changed,
    /// `old · new = hatF` in the variables of the seed before mutation.
    pub relation: String,
    #[serde(rename = "move")]
    pub kind: Option<Move>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NeighborNode {
    pub id: usize,
    pub vars: Vec<String>,
    pub distance: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NeighborEdge {
    pub from: usize,
    pub to: usize,
    pub position: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Neighborhood {
    pub radius: usize,
    pub nodes: Vec<NeighborNode>,
    pub edges: Vec<NeighborEdge>,
}

fn name_str(names: &[Option<ClusterVar>], t: &Seed, p: usize) -> String {
    names[p - 1].map_or_else(|| t.var(p).to_string(), |v| v.to_string())
}

/// Names of the variables of `t` as cluster variables of `engine`'s graph.
pub fn name_seed(engine: &mut Engine<'_>, t: &Seed) -> Vec<Option<ClusterVar>> {
    t.vars().iter().map(|v| engine.name_of(v)).collect()
}

/// Seed reached from the initial seed along `path`, with its names.
pub fn replay(g: &Digraph, path: &[usize]) -> Result<(Seed, Vec<Option<ClusterVar>>), Failure> {
    check_directions(g, path)?;
    let t = initial_seed(g).mutate_path(path)?;
    let names = name_seed(&mut Engine::new(g), &t);
    Ok((t, names))
}

fn check_directions(g: &Digraph, path: &[usize]) -> Result<(), Failure> {
    match path.iter().find(|&&i| i == 0 || i > g.n()) {
        Some(i) => Err(Failure::Input(format!("direction {i} outside 1..={}", g.n()))),
        None => Ok(()),
    }
}

pub fn view_of(g: &Digraph, history: &[usize], t: &Seed, names: &[Option<ClusterVar>]) -> SeedView {
    let m = collection_of_names(g, names);
    let directions = (1..=t.rank())
        .map(|p| {
            let vertex = m.as_ref().and_then(|m| position_label(m, names, p));
            Direction { position: p, variable: name_str(names, t, p), vertex, kind: m.as_ref().zip(vertex).map(|(m, k)| m.move_kind(k)) }
        })
        .collect();
    SeedView { graph: g.to_json(), history: history.to_vec(), seed: render_seed(t, names), collection: m.map(|m| m.to_json()), directions }
}

impl Session {
    pub fn new(graph: Digraph) -> Self {
        let seed = initial_seed(&graph);
        let names = (1..=graph.n()).map(|i| Some(ClusterVar::X(i))).collect();
        Session { graph, history: Vec::new(), seed, names }
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn history(&self) -> &[usize] {
        &self.history
    }

    pub fn view(&self) -> SeedView {
        view_of(&self.graph, &self.history, &self.seed, &self.names)
    }

    fn collection(&self) -> Option<MaximalNestedCollection> {
        collection_of_names(&self.graph, &self.names)
    }

    pub fn mutate(&mut self, i: usize) -> Result<MutationView, Failure> {
        check_directions(&self.graph, &[i])?;
        let kind = self.collection().and_then(|m| position_label(&m, &self.names, i).map(|k| m.move_kind(k)));
        let next = self.seed.mutate(i)?;
        let mut engine = Engine::new(&self.graph);
        let mut names = self.names.clone();
        names[i - 1] = engine.name_of(next.var(i));
        let old = name_str(&self.names, &self.seed, i);
        let new = name_str(&names, &next, i);
        let hat = in_names(&self.seed.hat_f(i), &self.names);
        let relation = format!("{old} * {new} = {hat}");
        self.seed = next;
        self.names = names;
        self.history.push(i);
        Ok(MutationView { seed: self.view(), changed: Changed { position: i, old, new }, relation, kind })
    }

    /// Drops the last direction and replays the rest.
    pub fn undo(&mut self) -> Result<SeedView, Failure> {
        if self.history.pop().is_none() {
            return Err(Failure::Input("nothing to undo".into()));
        }
        let (t, names) = replay(&self.graph, &self.history)?;
        self.seed = t;
        self.names = names;
        Ok(self.view())
    }

    /// Seeds within `radius` mutations of the current one, keyed by their
    /// clusters.
    pub fn neighborhood(&self, radius: usize) -> Result<Neighborhood, Failure> {
        if radius > MAX_RADIUS {
            return Err(Failure::Input(format!("radius {radius} exceeds {MAX_RADIUS}")));
        }
        let mut engine = Engine::new(&self.graph);
        let key = |t: &Seed, names: &[Option<ClusterVar>]| {
            let mut vars: Vec<String> = (1..=t.rank()).map(|p| name_str(names, t, p)).collect();
            vars.sort();
            vars
        };
        let mut ids: BTreeMap<Vec<String>, usize> = BTreeMap::new();
        let start = key(&self.seed, &self.names);
        ids.insert(start.clone(), 0);
        let mut out = Neighborhood { radius, nodes: vec![NeighborNode { id: 0, vars: start, distance: 0 }], edges: Vec::new() };
        let mut queue = VecDeque::from([(self.seed.clone(), self.names.clone(), 0usize, 0usize)]);
        while let Some((t, names, id, d)) = queue.pop_front() {
            if d == radius {
                continue;
            }
            for p in 1..=t.rank() {
                let u = t.mutate(p)?;
                let mut un = names.clone();
                un[p - 1] = engine.name_of(u.var(p));
                let k = key(&u, &un);
                let to = match ids.get(&k) {
                    Some(&to) => to,
                    None => {
                        let to = out.nodes.len();
                        ids.insert(k.clone(), to);
                        out.nodes.push(NeighborNode { id: to, vars: k, distance: d + 1 });
                        queue.push_back((u, un, to, d + 1));
                        to
                    }
                };
                out.edges.push(NeighborEdge { from: id, to, position: p });
            }
        }
        Ok(out)
    }
}
