//! Duplication–deletion clique process.
//!
//! A discrete-time random graph process whose components are always disjoint
//! cliques: with probability `p` a uniformly chosen vertex is duplicated
//! inside its clique, with probability `1 - p` a uniformly chosen vertex is
//! made isolated. This crate provides
//!
//! * [`process`] — the simulation engine (clique-size multiset state,
//!   Fenwick-backed proportional sampling, checkpointed runs),
//! * [`theory`] — the exact limiting degree distribution `(d_k)` via
//!   endpoint-weighted Gaussian quadrature, a hypergeometric series form,
//!   a backward minimal-solution recursion, fixed-point lower bounds, and
//!   closed-form tail asymptotics in all three regimes of `p`,
//! * [`analysis`] — empirical degree distributions, total-variation
//!   comparison against theory, exponent/rate fits and growth diagnostics,
//! * [`formats`] — the CSV/JSON file schemas shared by the CLI.
//!
//! # Reproducibility
//!
//! All randomness flows through [`process::SimRng`] (ChaCha8), seeded from a
//! caller-provided 64-bit seed. Replica `i` of a run with base seed `s` uses
//! the stream seeded by [`process::replica_seed`]`(s, i)`. The generator
//! family is part of the crate contract and is never silently changed:
//! golden trajectories recorded against a given crate version stay valid.

pub mod analysis;
pub mod error;
pub mod formats;
pub mod process;
pub mod theory;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
