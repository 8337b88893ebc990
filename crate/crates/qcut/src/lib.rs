//! Cheeger cuts, Robin ground states and spectral minimal partitions of
//! compact metric graphs.
//!
//! A metric graph is a combinatorial graph whose edges carry positive
//! lengths and are identified with intervals. This crate computes, exactly
//! where the structure permits and numerically otherwise:
//!
//! * `k`-Cheeger constants and optimal cuts, via exhaustive enumeration of
//!   partition configuration classes and a small exact LP per class
//!   ([`cheeger`]);
//! * first Robin and Dirichlet eigenvalues of subgraphs, with two
//!   independent solvers — a secular-determinant root finder and a P1
//!   finite-element method ([`spectral`]);
//! * Robin and Dirichlet spectral minimal `k`-partitions and the limit
//!   studies connecting them to the Cheeger data as the Robin parameter
//!   tends to `0` or `∞` ([`robinopt`]).
//!
//! The [`suites`] module bundles the self-check property suites exposed by
//! the `check` subcommand of the CLI.

pub mod cheeger;
pub mod class;
pub mod enumerate;
pub mod corpus;
pub mod graph;
pub mod io;
pub mod lp;
pub mod par;
pub mod robinopt;
pub mod spectral;
pub mod subgraph;
pub mod suites;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid subgraph: {0}")]
    InvalidSubgraph(String),
    #[error("invalid class: {0}")]
    InvalidClass(String),
    #[error("invalid realization: {0}")]
    InvalidRealization(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("linear program: {0}")]
    Lp(String),
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
