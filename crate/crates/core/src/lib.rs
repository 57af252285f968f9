//! Existence and certification of stable matchings in many-to-one matching
//! markets, with and without transfers.
//!
//! A market's *firm-worker hypergraph* has one vertex per agent and one edge
//! `{f} ∪ S` for every possible workforce `S` of firm `f`. When that
//! hypergraph has no nontrivial odd-length cycle, a stable matching exists.
//! This crate builds the hypergraph, searches it for cycles, and backs every
//! verdict with something checkable:
//!
//! * [`tu_solver`] decides existence for transferable-utility markets by
//!   comparing the fractional-cover LP value with the best integral
//!   partition, returning either a stable `(μ, p)` or a dual certificate.
//! * [`discrete_solver`] checks stability, enumerates stable matchings and
//!   traces blocking dynamics for markets without transfers.
//! * [`analysis`] evaluates the refined cycle condition on choice functions,
//!   firms' demand types and total unimodularity.
//! * [`roadmap`] checks specialist workers and specialized firms over a
//!   technology roadmap.
//! * [`generator`] produces seeded random instances; [`cli`] holds the file
//!   formats and the command implementations behind the `matchkit` binary.

pub mod analysis;
pub mod cli;
pub mod discrete_solver;
pub mod error;
pub mod generator;
pub mod hypergraph;
pub mod model;
pub mod roadmap;
pub mod tu_solver;

pub use error::{Error, Result};
pub use model::{
    AgentId, Coalition, DiscreteMarket, DiscreteMatching, FirmId, Market, Rational, TuMarket,
    TuMatching, WorkerId, WorkerSet,
};

/// Default number of search extension steps before a cycle search gives up.
pub const DEFAULT_BUDGET: u64 = 10_000_000;
