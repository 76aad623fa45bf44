//! A common interface over the unconstrained solvers, used as the inner
//! routine of the constrained variants.

use crate::error::{Error, Result};
use crate::exact::brute_force;
use crate::flow::{solve_convex_exact, solve_projected};
use crate::hypergraph::Hypergraph;
use crate::peel::{peel, peel_degree, DegreeMode, Strategy};
use crate::project::project_hypergraph;

pub trait SwampSolver {
    fn name(&self) -> String;

    /// A nonempty node set of `h`.
    fn solve(&self, h: &Hypergraph) -> Result<Vec<u32>>;
}

pub struct PeelSolver(pub Strategy);

impl SwampSolver for PeelSolver {
    fn name(&self) -> String {
        format!("peel-{}", self.0.name())
    }

    fn solve(&self, h: &Hypergraph) -> Result<Vec<u32>> {
        Ok(peel(h, &self.0)?.best_set)
    }
}

pub struct DegreePeelSolver(pub DegreeMode);

impl SwampSolver for DegreePeelSolver {
    fn name(&self) -> String {
        "deg-peel".into()
    }

    fn solve(&self, h: &Hypergraph) -> Result<Vec<u32>> {
        Ok(peel_degree(h, self.0)?.best_set)
    }
}

pub struct BruteForceSolver {
    pub max_n: usize,
}

impl SwampSolver for BruteForceSolver {
    fn name(&self) -> String {
        "brute".into()
    }

    fn solve(&self, h: &Hypergraph) -> Result<Vec<u32>> {
        Ok(brute_force(h, self.max_n)?.set)
    }
}

fn all_nodes(h: &Hypergraph) -> Vec<u32> {
    (0..h.num_nodes() as u32).collect()
}

/// Exact min-cut solver; requires convex rewards.
pub struct FlowExactSolver;

impl SwampSolver for FlowExactSolver {
    fn name(&self) -> String {
        "flow-exact".into()
    }

    fn solve(&self, h: &Hypergraph) -> Result<Vec<u32>> {
        match solve_convex_exact(h) {
            Ok(sol) => Ok(sol.set),
            Err(Error::ZeroReward) => Ok(all_nodes(h)),
            Err(e) => Err(e),
        }
    }
}

/// Exact solve of the convex-hull instance.
pub struct ProjectedFlowSolver;

impl SwampSolver for ProjectedFlowSolver {
    fn name(&self) -> String {
        "proj-flow".into()
    }

    fn solve(&self, h: &Hypergraph) -> Result<Vec<u32>> {
        Ok(solve_projected(h)?.set)
    }
}

/// Greedy peeling of the convex-hull instance.
pub struct ProjectedGreedySolver;

impl SwampSolver for ProjectedGreedySolver {
    fn name(&self) -> String {
        "proj-greedy".into()
    }

    fn solve(&self, h: &Hypergraph) -> Result<Vec<u32>> {
        let (projected, _) = project_hypergraph(h)?;
        Ok(peel(&projected, &Strategy::Greedy)?.best_set)
    }
}
