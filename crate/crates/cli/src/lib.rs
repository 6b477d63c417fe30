//! The `lpgraph` command-line tool and session service for graph LP algebras.

pub mod cli;
pub mod service;
pub mod session;

/// Why a command stopped; decides the exit code.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    /// Unreadable or malformed input (exit 2).
    #[error("{0}")]
    Input(String),
    /// A size cap or search budget was exceeded (exit 2).
    #[error("{0}")]
    Limit(String),
    /// A check ran and found a counterexample (exit 3).
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) | Failure::Limit(_) => 2,
            Failure::Verification(_) => 3,
            Failure::Internal(_) => 1,
        }
    }
}

impl From<lpgraph_core::Error> for Failure {
    fn from(e: lpgraph_core::Error) -> Self {
        use lpgraph_core::Error as E;
        match e {
            E::Graph(_) | E::Invalid(_) | E::Poly(_) | E::Seed(_) | E::NotLaurent(_) => Failure::Input(e.to_string()),
            E::Limit(_) => Failure::Limit(e.to_string()),
            E::Verification(_) => Failure::Verification(e.to_string()),
        }
    }
}
