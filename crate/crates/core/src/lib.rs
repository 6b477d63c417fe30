//! Graph LP algebras: the algebra of a directed graph, its seeds and
//! cluster variables, LP seed mutation, and executable checks of the
//! identities and closed forms that govern them.

pub mod acyclic;
pub mod conjectures;
pub mod digraph;
pub mod fingerprint;
pub mod graphlp;
pub mod lpcore;
pub mod nested;

pub use digraph::{Digraph, GraphJson, VertexSet};
pub use lpgraph_poly as poly;
pub use lpgraph_poly::{Int, LaurentPoly, PolyError, Tag, VarId};
pub use nested::{MaximalNestedCollection, Move};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid seed: {0}")]
    Seed(String),
    #[error("not a Laurent polynomial: {0}")]
    NotLaurent(String),
    #[error("limit exceeded: {0}")]
    Limit(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
