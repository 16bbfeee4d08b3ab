//! Induced subgraphs of Kneser graphs.
//!
//! `KG(n, k)` has the `k`-subsets of `[n]` as vertices, with an edge between
//! every pair of disjoint sets. This crate builds the classical extremal
//! families (stars, Hilton-Milner, the one-edge family `D`, `E_i`, `W_l`, the
//! tightness family `G_s`), measures their induced subgraphs (maximum degree,
//! edges, covering number, restriction profiles), evaluates the standard
//! inequalities relating these quantities, generates set systems with small
//! pairwise intersections and runs exact searches for the minimum maximum
//! degree `d(m, n, k)` on small instances.
//!
//! Hot kernels run on rayon when the `parallel` feature is enabled (default);
//! every such kernel has an [`Exec`] switch that forces the sequential path.

pub mod bounds;
pub mod error;
pub mod families;
pub mod family;
pub mod io;
pub mod kneser;
pub mod lowint;
mod par;
pub mod search;
pub mod setkit;

pub use error::{Error, Result};
pub use family::Family;
pub use par::Exec;
pub use setkit::{binom, KSet, Params};

/// Exact rational used by every bound evaluator.
pub type Rational = num_rational::BigRational;
