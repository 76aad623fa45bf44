//! Densest subhypergraphs under partial-edge rewards.
//!
//! A node set `S` of a hypergraph scores `Γ(S) = f(S) / |S|` with
//! `f(S) = Σ_e w(e) · r_e(|e ∩ S|)`, where each `r_e` is a monotone table
//! with `r_e(0) = 0`. The crate offers bounded peeling heuristics with a
//! `1/k` guarantee, an exact min-cut solver for convex rewards, convex-hull
//! projection for the general case, exhaustive search and an ILP exporter for
//! ground truth, and solvers for size and class constraints.

pub mod constrained;
pub mod error;
pub mod exact;
pub mod flow;
pub mod heap;
pub mod hypergraph;
pub mod maxflow;
pub mod peel;
pub mod project;
pub mod rational;
pub mod rewards;
pub mod scaled;
pub mod solver;

pub use error::{Error, Result};
pub use hypergraph::{parse_hypergraph, Hyperedge, Hypergraph, Labels, SubsetStats};
pub use rational::Rational;
pub use rewards::{Reward, RewardSpec, RewardTable};
