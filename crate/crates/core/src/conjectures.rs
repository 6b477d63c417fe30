//! Empirical checks of two conjectures about graph LP algebras: positivity of
//! exchange polynomials and of Laurent expansions in every cluster, and
//! linear independence of low-degree cluster monomials.

use std::collections::{BTreeMap, VecDeque};
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::digraph::GraphJson;
use crate::graphlp::GraphLPAlgebra;
use crate::{LaurentPoly, Result, VarId};

/// A reproducible counterexample: mutating the base seed, with symbolic
/// groundings, along `path` puts `expansion` at `position`.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub graph: GraphJson,
    pub seed: Vec<String>,
    pub variable: String,
    pub path: Vec<usize>,
    pub position: usize,
    pub expansion: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReport {
    pub conjecture: String,
    pub instances: usize,
    pub failures: Vec<Witness>,
    pub detail: String,
    pub runtime_ms: u128,
}

impl ConjectureReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn seed_label(alg: &GraphLPAlgebra, t: usize) -> Vec<String> {
    alg.names[t].iter().enumerate().map(|(k, v)| v.map_or(format!("Z{}", k + 1), |v| v.to_string())).collect()
}

fn variable_label(alg: &GraphLPAlgebra, id: usize) -> String {
    alg.variables[id].0.map_or_else(|| alg.variables[id].1.to_string(), |v| v.to_string())
}

/// Expansions of every cluster variable in the cluster of one seed.
#[derive(Debug, Clone)]
pub struct ClusterExpansions {
    pub base: usize,
    /// `expansions[id]`, in the symbols `Z_k` of the base seed's positions.
    pub expansions: Vec<LaurentPoly>,
    /// Base-seed positions along which each variable first appears, and its
    /// position in the seed reached.
    pub paths: Vec<(Vec<usize>, usize)>,
}

/// Target seed, mutated position, source position of each target position
/// and sign of the stored variable.
type ArcEntry = (usize, usize, Vec<usize>, bool);

/// Exchange data shared by every base seed: for each arc `(a, b, p)`, the
/// position in `a` each position of `b` comes from (`p` for the new one),
/// and the sign relating the exchange relation to the stored variable.
struct ArcTable {
    adjacency: Vec<Vec<ArcEntry>>,
    location: Vec<(usize, usize)>,
}

fn arc_table(alg: &GraphLPAlgebra) -> Result<ArcTable> {
    let ids: FxHashMap<&LaurentPoly, usize> = alg.variables.iter().enumerate().map(|(k, (_, p))| (p, k)).collect();
    let var_ids: Vec<Vec<usize>> = alg.seeds.iter().map(|t| t.vars().iter().map(|v| ids[v]).collect()).collect();
    let mut location = vec![(usize::MAX, 0); alg.variables.len()];
    for (t, vs) in var_ids.iter().enumerate() {
        for (q, &id) in vs.iter().enumerate() {
            if location[id].0 == usize::MAX {
                location[id] = (t, q + 1);
            }
        }
    }
    let mut adjacency = vec![Vec::new(); alg.seeds.len()];
    for &(a, b, p) in &alg.exchange.arcs {
        let from: Vec<usize> = var_ids[b]
            .iter()
            .map(|id| var_ids[a].iter().enumerate().find(|&(r, v)| r + 1 != p && v == id).map_or(p, |(r, _)| r + 1))
            .collect();
        let fresh = alg.seeds[a].exchanged_variable(p)?;
        let q = from.iter().position(|&r| r == p).expect("one new variable");
        let negate = fresh != alg.seeds[b].vars()[q];
        adjacency[a].push((b, p, from, negate));
    }
    Ok(ArcTable { adjacency, location })
}

fn expansions_from(alg: &GraphLPAlgebra, table: &ArcTable, base: usize) -> Result<ClusterExpansions> {
    let n = alg.graph.n();
    let mut groundings: Vec<Option<Vec<LaurentPoly>>> = vec![None; alg.seeds.len()];
    // replay position of each stored position, and the base path reaching the seed
    let mut replay: Vec<Vec<usize>> = vec![Vec::new(); alg.seeds.len()];
    let mut path: Vec<Vec<usize>> = vec![Vec::new(); alg.seeds.len()];
    groundings[base] = Some((1..=n).map(|k| LaurentPoly::var(VarId::z(k))).collect());
    replay[base] = (1..=n).collect();
    let mut queue = VecDeque::from([base]);
    while let Some(a) = queue.pop_front() {
        for (b, p, from, negate) in &table.adjacency[a] {
            if groundings[*b].is_some() {
                continue;
            }
            let ga = groundings[a].clone().expect("visited");
            let mut fresh = alg.seeds[a].with_groundings(ga.clone())?.exchanged_variable(*p)?;
            if *negate {
                fresh = -fresh;
            }
            groundings[*b] = Some(from.iter().map(|&r| if r == *p { fresh.clone() } else { ga[r - 1].clone() }).collect());
            replay[*b] = from.iter().map(|&r| replay[a][r - 1]).collect();
            let mut pb = path[a].clone();
            pb.push(replay[a][*p - 1]);
            path[*b] = pb;
            queue.push_back(*b);
        }
    }
    let mut expansions = Vec::with_capacity(alg.variables.len());
    let mut paths = Vec::with_capacity(alg.variables.len());
    for &(t, q) in &table.location {
        let g = groundings[t].as_ref().ok_or_else(|| crate::Error::Verification("exchange graph is not connected".into()))?;
        expansions.push(g[q - 1].clone());
        paths.push((path[t].clone(), replay[t][q - 1]));
    }
    Ok(ClusterExpansions { base, expansions, paths })
}

/// Every cluster variable expanded in the cluster of `base`, following a
/// breadth-first tree of the exchange graph.
pub fn cluster_expansions(alg: &GraphLPAlgebra, base: usize) -> Result<ClusterExpansions> {
    expansions_from(alg, &arc_table(alg)?, base)
}

fn positive(p: &LaurentPoly) -> bool {
    !p.is_zero() && p.coeffs().iter().all(|c| !c.is_negative() && !c.is_zero())
}

/// Exchange polynomials and all Laurent expansions in every cluster must
/// have positive coefficients. Base seeds are split across `threads`.
pub fn check_positivity(alg: &GraphLPAlgebra, threads: usize) -> Result<ConjectureReport> {
    let start = Instant::now();
    let table = arc_table(alg)?;
    let graph = alg.graph.to_json();
    let mut failures = Vec::new();
    let mut instances = 0;
    for (t, seed) in alg.seeds.iter().enumerate() {
        for (k, f) in seed.exchanges().iter().enumerate() {
            instances += 1;
            if !positive(f) {
                failures.push(Witness { graph: graph.clone(), seed: seed_label(alg, t), variable: format!("F{}", k + 1), path: Vec::new(), position: k + 1, expansion: f.to_string() });
            }
        }
    }
    let threads = threads.max(1).min(alg.seeds.len().max(1));
    let results: Vec<Result<ClusterExpansions>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let table = &table;
                s.spawn(move || (w..alg.seeds.len()).step_by(threads).map(|b| expansions_from(alg, table, b)).collect::<Vec<_>>())
            })
            .collect();
        let mut out: Vec<Result<ClusterExpansions>> = handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect();
        out.sort_by_key(|r| r.as_ref().map_or(usize::MAX, |e| e.base));
        out
    });
    for r in results {
        let ex = r?;
        for (id, e) in ex.expansions.iter().enumerate() {
            instances += 1;
            if positive(e) {
                continue;
            }
            // re-derive by plain mutation before reporting
            let (path, q) = &ex.paths[id];
            let replayed = alg.seeds[ex.base].formal().mutate_path(path)?.var(*q).clone();
            failures.push(Witness { graph: graph.clone(), seed: seed_label(alg, ex.base), variable: variable_label(alg, id), path: path.clone(), position: *q, expansion: replayed.to_string() });
        }
    }
    Ok(ConjectureReport {
        conjecture: "positivity".into(),
        instances,
        detail: format!("{} seeds x {} cluster variables, plus {} exchange polynomials", alg.seeds.len(), alg.variables.len(), alg.seeds.len() * alg.graph.n()),
        failures,
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// Cluster monomials of total degree at most `d`, as multisets of variable
/// ids (sorted), each contained in some seed.
pub fn cluster_monomials(alg: &GraphLPAlgebra, d: usize) -> Vec<Vec<usize>> {
    let ids: FxHashMap<&LaurentPoly, usize> = alg.variables.iter().enumerate().map(|(k, (_, p))| (p, k)).collect();
    let mut out = std::collections::BTreeSet::new();
    for t in &alg.seeds {
        let mut cluster: Vec<usize> = t.vars().iter().map(|v| ids[v]).collect();
        cluster.sort_unstable();
        let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
        out.insert(Vec::new());
        for _ in 0..d {
            let mut next = Vec::new();
            for m in &frontier {
                for &v in &cluster {
                    if m.last().is_none_or(|&l| l <= v) {
                        let mut m2 = m.clone();
                        m2.push(v);
                        next.push(m2);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
    }
    out.into_iter().collect()
}

/// Rank over ℚ of coefficient vectors indexed by (X, A)-monomials.
pub fn rational_rank(polys: &[LaurentPoly]) -> usize {
    let mut columns: FxHashMap<Vec<(VarId, i32)>, usize> = FxHashMap::default();
    // pivot column -> row whose least column is the pivot, pivot entry 1
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigRational>> = BTreeMap::new();
    for p in polys {
        let mut row: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (m, c) in p.terms() {
            let next = columns.len();
            let col = *columns.entry(m).or_insert(next);
            row.insert(col, BigRational::from_integer(c.to_big()));
        }
        while let Some((&c, lead)) = row.iter().next() {
            let Some(piv) = pivots.get(&c) else {
                let inv = BigRational::one() / lead.clone();
                let normalized = row.into_iter().map(|(k, v)| (k, v * &inv)).collect();
                pivots.insert(c, normalized);
                break;
            };
            let f = lead.clone();
            for (k, v) in piv {
                let e = row.entry(*k).or_insert_with(BigRational::zero);
                *e -= &f * v;
                if e.is_zero() {
                    row.remove(k);
                }
            }
        }
    }
    pivots.len()
}

/// Cluster monomials of degree at most `d`, expanded in the initial cluster,
/// must be linearly independent over ℚ (coordinates: (X, A)-monomials).
pub fn check_cluster_monomials(alg: &GraphLPAlgebra, d: usize) -> ConjectureReport {
    let start = Instant::now();
    let monomials = cluster_monomials(alg, d);
    let expanded: Vec<LaurentPoly> = monomials.iter().map(|m| LaurentPoly::product(m.iter().map(|&id| &alg.variables[id].1))).collect();
    let rank = rational_rank(&expanded);
    let mut failures = Vec::new();
    if rank < monomials.len() {
        // the first monomial that does not raise the rank is the witness
        let mut r = 0;
        for k in 0..expanded.len() {
            let rk = rational_rank(&expanded[..=k]);
            if rk == r {
                let name: Vec<String> = monomials[k].iter().map(|&id| variable_label(alg, id)).collect();
                failures.push(Witness {
                    graph: alg.graph.to_json(),
                    seed: Vec::new(),
                    variable: if name.is_empty() { "1".into() } else { name.join("*") },
                    path: Vec::new(),
                    position: 0,
                    expansion: expanded[k].to_string(),
                });
                break;
            }
            r = rk;
        }
    }
    ConjectureReport {
        conjecture: "cluster monomial independence".into(),
        instances: monomials.len(),
        detail: format!("degree <= {d}: {} monomials, rank {rank}", monomials.len()),
        failures,
        runtime_ms: start.elapsed().as_millis(),
    }
}
