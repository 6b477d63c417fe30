//! Argument parsing and the subcommands.

use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lpgraph_core::acyclic::{verify_identities, y_by_determinant, y_by_enumeration, Basis, IdentityScope};
use lpgraph_core::conjectures::{check_cluster_monomials, check_positivity};
use lpgraph_core::graphlp::{build_algebra, check_frozen, check_main, freeze, BuildOptions, Engine, GraphLPAlgebra, Identity, DEFAULT_BUDGET, DEFAULT_CAP};
use lpgraph_core::lpcore::Seed;
use lpgraph_core::{Digraph, MaximalNestedCollection, VertexSet};
use serde::Serialize;
use serde_json::json;

use crate::session::{name_seed, replay, view_of, SeedView};
use crate::Failure;

#[derive(Debug, Parser)]
#[command(name = "lpgraph", version, about = "Explore the Laurent phenomenon algebra of a directed graph")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Graph JSON file, or a builtin: example, path:N, cycle:N, complete:N, edgeless:N.
    #[arg(long, global = true)]
    pub graph: Option<String>,
    /// Largest vertex count accepted by algebra-building commands.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// Largest number of seeds explored when building an algebra.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for the conjecture checks (default: all cores).
    #[arg(long, global = true, env = "LPGRAPH_THREADS")]
    pub threads: Option<usize>,
    /// How new cluster variables are identified while building an algebra.
    #[arg(long, global = true, value_enum)]
    pub identity: Option<IdentityArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityArg {
    Exact,
    Fingerprint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Expanded,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Full,
    YOnly,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Vertices, edges, strongly connected subsets and components.
    Info,
    /// The Y variables, by enumeration of acyclic functions.
    Ys {
        /// A vertex set such as `1,2,4` (or `124` when n < 10); all strongly
        /// connected subsets when omitted.
        #[arg(long)]
        set: Option<String>,
        /// Compute through the principal minor of the Y-matrix instead.
        #[arg(long, value_enum)]
        basis: Option<BasisArg>,
    },
    /// The seed of a maximal nested collection.
    Seed {
        /// Sets separated by `;`, e.g. `1;1,4;1,3,4;1,2,3,4`.
        #[arg(long, conflicts_with = "activation")]
        collection: Option<String>,
        /// Vertices activated in order from the empty collection, e.g. `2,4,1`.
        #[arg(long)]
        activation: Option<String>,
    },
    /// Mutate the initial seed along a sequence of directions.
    Mutate {
        /// Directions, e.g. `1,2,3` (applied left to right).
        #[arg(long, default_value = "")]
        path: String,
    },
    /// Build the algebra by mutation and export its exchange graph.
    ExchangeGraph,
    /// Run the identity suite and compare the algebra with nested collections.
    Verify {
        #[arg(long, value_enum, default_value_t = ScopeArg::Full)]
        scope: ScopeArg,
    },
    /// Freeze the component variables and compare with the nested set complex.
    Freeze,
    /// Empirical checks of positivity and cluster monomial independence.
    Conjectures {
        /// Largest cluster monomial degree.
        #[arg(long, default_value_t = 2)]
        degree: usize,
    },
    /// Run the JSON session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
}

pub fn load_graph(source: Option<&str>) -> Result<Digraph, Failure> {
    let source = source.ok_or_else(|| Failure::Input("--graph is required".into()))?;
    if Path::new(source).is_file() {
        let text = std::fs::read_to_string(source).map_err(|e| Failure::Input(format!("cannot read {source}: {e}")))?;
        return Ok(Digraph::parse_json(&text)?);
    }
    Digraph::builtin(source).map_err(|e| Failure::Input(format!("{source} is neither a readable file nor a builtin graph ({e})")))
}

fn parse_list(text: &str, n: usize) -> Result<Vec<usize>, Failure> {
    let text = text.trim().trim_start_matches('{').trim_end_matches('}');
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = if text.contains([',', ' ']) {
        text.split([',', ' ']).filter(|s| !s.is_empty()).collect()
    } else if n < 10 {
        text.split("").filter(|s| !s.is_empty()).collect()
    } else {
        vec![text]
    };
    parts
        .into_iter()
        .map(|s| match s.parse::<usize>() {
            Ok(v) if (1..=n).contains(&v) => Ok(v),
            _ => Err(Failure::Input(format!("{s:?} is not a vertex in 1..={n}"))),
        })
        .collect()
}

fn parse_set(text: &str, n: usize) -> Result<VertexSet, Failure> {
    let vs = parse_list(text, n)?;
    let s = VertexSet::of(&vs);
    if s.len() != vs.len() {
        return Err(Failure::Input(format!("{text:?} repeats a vertex")));
    }
    Ok(s)
}

impl Common {
    fn options(&self) -> BuildOptions {
        BuildOptions {
            cap: self.cap,
            budget: self.budget,
            identity: self.identity.map(|i| match i {
                IdentityArg::Exact => Identity::Exact,
                IdentityArg::Fingerprint => Identity::Fingerprint,
            }),
        }
    }

    fn threads(&self) -> usize {
        self.threads.filter(|&t| t > 0).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    fn check_cap(&self, g: &Digraph) -> Result<(), Failure> {
        if g.n() > self.cap {
            return Err(Failure::Limit(format!("{} vertices exceeds --cap {}", g.n(), self.cap)));
        }
        Ok(())
    }

    fn algebra(&self, g: &Digraph) -> Result<GraphLPAlgebra, Failure> {
        let alg = build_algebra(g, self.options())?;
        if !alg.complete {
            return Err(Failure::Limit(format!("seed budget {} exhausted after {} seeds", self.budget, alg.seed_count())));
        }
        Ok(alg)
    }
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    writeln!(out, "{text}").map_err(io)
}

fn io(e: std::io::Error) -> Failure {
    Failure::Internal(format!("write failed: {e}"))
}

fn no_dot(format: Format) -> Result<(), Failure> {
    if format == Format::Dot {
        return Err(Failure::Input("--format dot is only available for exchange-graph and freeze".into()));
    }
    Ok(())
}

fn sets_text(sets: &[VertexSet]) -> String {
    sets.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_view(out: &mut dyn Write, v: &SeedView) -> Result<(), Failure> {
    let history: Vec<String> = v.history.iter().map(|i| i.to_string()).collect();
    writeln!(out, "history: {}", if history.is_empty() { "(initial seed)".into() } else { history.join(" ") }).map_err(io)?;
    match &v.collection {
        Some(c) => writeln!(out, "collection: {}", if c.sets.is_empty() { "(empty)".into() } else { sets_text(&c.sets) }).map_err(io)?,
        None => writeln!(out, "collection: none (unnamed variables)").map_err(io)?,
    }
    for (k, d) in v.directions.iter().enumerate() {
        let kind = d.kind.map_or(String::new(), |m| format!(" [{m}]"));
        let den = &v.seed.hat_denominators[k];
        let hat = if den == "1" { String::new() } else { format!("   hatF = F/({den})") };
        writeln!(out, "{}  {}{kind}\n    F = {}{hat}", d.position, d.variable, v.seed.exchange[k]).map_err(io)?;
    }
    Ok(())
}

fn seed_view(g: &Digraph, history: &[usize], t: &Seed) -> SeedView {
    let names = name_seed(&mut Engine::new(g), t);
    view_of(g, history, t, &names)
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let c = &cli.common;
    if let Command::Serve { port, host } = cli.command {
        let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Internal(e.to_string()))?;
        return rt.block_on(crate::service::serve((host, port).into(), c.options())).map_err(|e| Failure::Input(format!("cannot serve on {host}:{port}: {e}")));
    }
    let g = load_graph(c.graph.as_deref())?;
    match &cli.command {
        Command::Info => info(c, &g, out),
        Command::Ys { set, basis } => ys(c, &g, set.as_deref(), *basis, out),
        Command::Seed { collection, activation } => seed(c, &g, collection.as_deref(), activation.as_deref(), out),
        Command::Mutate { path } => {
            no_dot(c.format)?;
            c.check_cap(&g)?;
            let path = parse_list(path, g.n())?;
            let (t, _) = replay(&g, &path)?;
            let v = seed_view(&g, &path, &t);
            match c.format {
                Format::Json => write_json(out, &v),
                _ => write_view(out, &v),
            }
        }
        Command::ExchangeGraph => exchange_graph(c, &g, out),
        Command::Verify { scope } => verify(c, &g, *scope, out),
        Command::Freeze => frozen(c, &g, out),
        Command::Conjectures { degree } => conjectures(c, &g, *degree, out),
        Command::Serve { .. } => unreachable!("handled above"),
    }
}

fn info(c: &Common, g: &Digraph, out: &mut dyn Write) -> Result<(), Failure> {
    no_dot(c.format)?;
    let sc = g.strongly_connected_subsets();
    let components = g.components();
    if c.format == Format::Json {
        return write_json(out, &json!({ "graph": g.to_json(), "strongly_connected_subsets": sc, "components": components }));
    }
    let edges: Vec<String> = g.edges().map(|(i, j)| format!("{i}->{j}")).collect();
    writeln!(out, "vertices: {}", g.n()).map_err(io)?;
    writeln!(out, "edges ({}): {}", edges.len(), edges.join(" ")).map_err(io)?;
    writeln!(out, "strongly connected subsets ({}): {}", sc.len(), sets_text(&sc)).map_err(io)?;
    writeln!(out, "components ({}): {}", components.len(), sets_text(&components)).map_err(io)
}

fn ys(c: &Common, g: &Digraph, set: Option<&str>, basis: Option<BasisArg>, out: &mut dyn Write) -> Result<(), Failure> {
    no_dot(c.format)?;
    let compute = |s: VertexSet| match basis {
        None => y_by_enumeration(g, s),
        Some(BasisArg::Expanded) => y_by_determinant(g, s, Basis::Expanded),
        Some(BasisArg::Diagonal) => y_by_determinant(g, s, Basis::Diagonal),
    };
    let sets = match set {
        Some(text) => vec![parse_set(text, g.n())?],
        None => g.strongly_connected_subsets(),
    };
    let values: Vec<(VertexSet, String)> = sets.iter().map(|&s| (s, compute(s).to_string())).collect();
    match (c.format, set.is_some()) {
        (Format::Json, _) => write_json(out, &values.iter().map(|(s, p)| json!({ "set": s, "y": p })).collect::<Vec<_>>()),
        (_, true) => writeln!(out, "{}", values[0].1).map_err(io),
        (_, false) => {
            for (s, p) in &values {
                writeln!(out, "Y{s} = {p}").map_err(io)?;
            }
            Ok(())
        }
    }
}

fn seed(c: &Common, g: &Digraph, collection: Option<&str>, activation: Option<&str>, out: &mut dyn Write) -> Result<(), Failure> {
    no_dot(c.format)?;
    c.check_cap(g)?;
    let m = match (collection, activation) {
        (Some(text), None) => {
            let sets = text.split(';').filter(|s| !s.trim().is_empty()).map(|s| parse_set(s, g.n())).collect::<Result<Vec<_>, _>>()?;
            MaximalNestedCollection::from_sets(g, &sets)?
        }
        (None, Some(text)) => MaximalNestedCollection::from_activations(g, &parse_list(text, g.n())?)?,
        (None, None) => MaximalNestedCollection::empty(g.n()),
        (Some(_), Some(_)) => unreachable!("clap rejects both"),
    };
    let t = Engine::new(g).seed_for_collection(&m)?;
    let v = seed_view(g, &[], &t);
    match c.format {
        Format::Json => write_json(out, &v),
        _ => write_view(out, &v),
    }
}

fn cluster_label(alg: &GraphLPAlgebra, t: usize) -> String {
    let mut parts: Vec<String> = alg.names[t].iter().enumerate().map(|(k, v)| v.map_or(format!("Z{}", k + 1), |v| v.to_string())).collect();
    parts.sort();
    parts.join(" ")
}

fn exchange_graph(c: &Common, g: &Digraph, out: &mut dyn Write) -> Result<(), Failure> {
    let alg = c.algebra(g)?;
    match c.format {
        Format::Dot => write!(out, "{}", alg.exchange.to_dot(|&t| cluster_label(&alg, t))).map_err(io),
        Format::Json => {
            let seeds: Vec<_> = (0..alg.seed_count()).map(|t| json!({ "id": t, "seed": alg.seed_json(t) })).collect();
            let variables: Vec<_> = alg.variables.iter().map(|(v, p)| json!({ "name": v.map(|v| v.to_string()), "expansion": p.to_string() })).collect();
            write_json(out, &json!({ "seeds": seeds, "arcs": alg.exchange.arcs, "variables": variables, "complete": alg.complete }))
        }
        Format::Text => {
            writeln!(out, "{} seeds, {} cluster variables, {} edges", alg.seed_count(), alg.variable_count(), alg.exchange.edges().len()).map_err(io)?;
            for t in 0..alg.seed_count() {
                let nbrs: Vec<String> = alg.exchange.neighbors(t).into_iter().map(|(b, p)| format!("{p}:{b}")).collect();
                writeln!(out, "{t}: {}  -> {}", cluster_label(&alg, t), nbrs.join(" ")).map_err(io)?;
            }
            Ok(())
        }
    }
}

fn verify(c: &Common, g: &Digraph, scope: ScopeArg, out: &mut dyn Write) -> Result<(), Failure> {
    no_dot(c.format)?;
    let scope = match scope {
        ScopeArg::Full => IdentityScope::Full,
        ScopeArg::YOnly => IdentityScope::YOnly,
    };
    let identities = verify_identities(g, scope, c.cap)?;
    let alg = c.algebra(g)?;
    let main = check_main(&alg, &mut Engine::new(g))?;
    if c.format == Format::Json {
        write_json(out, &json!({ "identities": identities, "main": main }))?;
    } else {
        for t in &identities.tallies {
            let status = if t.failed == 0 { "ok" } else { "FAILED" };
            writeln!(out, "{:<40} {:<9} {:>7} checked  {status}", t.name, format!("{:?}", t.basis).to_lowercase(), t.checked).map_err(io)?;
            if let Some(w) = &t.first_failure {
                writeln!(out, "    first failure: {w}").map_err(io)?;
            }
        }
        writeln!(
            out,
            "algebra: {} seeds for {} maximal nested collections, {} of {} cluster variables, {} arcs checked",
            main.seeds, main.collections, main.variables, main.expected_variables, main.arcs_checked
        )
        .map_err(io)?;
        for f in &main.failures {
            writeln!(out, "    {f}").map_err(io)?;
        }
    }
    if !identities.all_passed() || !main.passed() {
        return Err(Failure::Verification(format!("{} identity failures, {} algebra mismatches", identities.failed(), main.failures.len())));
    }
    Ok(())
}

fn frozen(c: &Common, g: &Digraph, out: &mut dyn Write) -> Result<(), Failure> {
    let alg = c.algebra(g)?;
    let fz = freeze(&alg)?;
    let rep = check_frozen(g, &fz)?;
    match c.format {
        Format::Dot => write!(out, "{}", fz.to_dot()).map_err(io)?,
        Format::Json => {
            let clusters: Vec<Vec<String>> = fz.clusters.iter().map(|c| c.iter().map(|v| v.to_string()).collect()).collect();
            let edges: Vec<(usize, usize)> = {
                let mut e: Vec<_> = fz.edge_set().into_iter().collect();
                e.sort();
                e
            };
            write_json(out, &json!({ "frozen": fz.frozen, "clusters": clusters, "edges": edges, "check": rep }))?;
        }
        Format::Text => {
            writeln!(out, "frozen: {}", sets_text(&fz.frozen)).map_err(io)?;
            writeln!(out, "rank {}, {} clusters, {} edges, {} facets of the nested set complex", rep.rank, rep.clusters, fz.edge_set().len(), rep.facets).map_err(io)?;
            for (k, cl) in fz.clusters.iter().enumerate() {
                let names: Vec<String> = cl.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{k}: {}", names.join(" ")).map_err(io)?;
            }
            for f in &rep.failures {
                writeln!(out, "    {f}").map_err(io)?;
            }
        }
    }
    if !rep.passed() {
        return Err(Failure::Verification(format!("{} mismatches with the nested set complex", rep.failures.len())));
    }
    Ok(())
}

fn conjectures(c: &Common, g: &Digraph, degree: usize, out: &mut dyn Write) -> Result<(), Failure> {
    no_dot(c.format)?;
    let alg = c.algebra(g)?;
    let reports = [check_positivity(&alg, c.threads())?, check_cluster_monomials(&alg, degree)];
    if c.format == Format::Json {
        write_json(out, &reports)?;
    } else {
        for r in &reports {
            let status = if r.passed() { "holds" } else { "FAILS" };
            writeln!(out, "{}: {status} on {} instances ({}; {} ms)", r.conjecture, r.instances, r.detail, r.runtime_ms).map_err(io)?;
            for w in &r.failures {
                writeln!(out, "    witness: {}", serde_json::to_string(w).unwrap_or_default()).map_err(io)?;
            }
        }
    }
    let failed: usize = reports.iter().map(|r| r.failures.len()).sum();
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} counterexamples")));
    }
    Ok(())
}
