//! Exact maximisation of Γ for convex rewards through a min-cut oracle.
//!
//! A convex table is a nonnegative combination of hinges,
//! `r(j) = Σ_t λ(t) · max(0, j − t)` with `λ(0) = δ(1)` and
//! `λ(t) = δ(t+1) − δ(t)`. Each hinge is linearised with a binary `z`:
//!
//! ```text
//! max(0, c − t) = max_z z·(c − t),   z·c = Σ_{v∈e} (z − z·(1 − x_v))
//!   ⇒ z·(c − t) = z·(|e| − t) − Σ_{v∈e} z·(1 − x_v)
//! ```
//!
//! so `max_S f(S) − α|S|` equals the total `source → hinge` capacity
//! `λ(|e| − t)` minus a minimum cut in the network with arcs
//! `hinge → v` of capacity `λ` and `v → sink` of capacity `α`. Nodes on the
//! source side of the cut form the maximiser.

use std::io::Write;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{exact_loop_via, DecisionOracle, ExactSolution};
use crate::hypergraph::Hypergraph;
use crate::maxflow::MaxFlow;
use crate::project::project_hypergraph;
use crate::rational::{self, Rational};
use crate::rewards::RewardTable;
use crate::scaled::{overflow, ScaledRewards};

/// Hinge coefficients `λ(0..m−1)` of a convex table.
#[derive(Debug, Clone, PartialEq)]
pub struct HingeDecomposition {
    pub lambdas: Vec<Rational>,
}

impl HingeDecomposition {
    /// `Σ_t λ(t) · max(0, j − t)`.
    pub fn reconstruct(&self, j: usize) -> Rational {
        self.lambdas
            .iter()
            .enumerate()
            .filter(|&(t, _)| j > t)
            .map(|(t, l)| l * Rational::from_integer(BigInt::from(j - t)))
            .sum()
    }
}

/// Fails with [`Error::InvalidReward`] when the table is not convex.
pub fn hinge_decompose(t: &RewardTable) -> Result<HingeDecomposition> {
    let deltas = t.exact_deltas();
    let lambdas: Vec<Rational> = (0..deltas.len())
        .map(|i| if i == 0 { deltas[0].clone() } else { &deltas[i] - &deltas[i - 1] })
        .collect();
    if lambdas.iter().any(Signed::is_negative) {
        return Err(Error::InvalidReward("table is not convex".into()));
    }
    Ok(HingeDecomposition { lambdas })
}

/// A convex instance in scaled integer form, ready to build cut networks.
#[derive(Debug, Clone)]
pub struct ConvexInstance<'a> {
    h: &'a Hypergraph,
    rewards: ScaledRewards,
    lambdas: Vec<Vec<i128>>,
}

impl<'a> ConvexInstance<'a> {
    /// Fails with [`Error::NotConvex`] on the first non-convex edge.
    pub fn new(h: &'a Hypergraph) -> Result<Self> {
        let rewards = ScaledRewards::new(h)?;
        let mut lambdas = Vec::with_capacity(h.num_edges());
        for (i, t) in rewards.tables.iter().enumerate() {
            let m = t.len() - 1;
            let mut lam = Vec::with_capacity(m);
            for s in 0..m {
                let l = if s == 0 {
                    t[1] - t[0]
                } else {
                    t[s + 1]
                        .checked_sub(2 * t[s])
                        .and_then(|x| x.checked_add(t[s - 1]))
                        .ok_or_else(overflow)?
                };
                if l < 0 {
                    return Err(Error::NotConvex { edge: i });
                }
                lam.push(l);
            }
            lambdas.push(lam);
        }
        Ok(ConvexInstance { h, rewards, lambdas })
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        self.h
    }

    pub fn scale(&self) -> &BigInt {
        &self.rewards.scale
    }

    pub fn scaled_value(&self, set: &[u32]) -> Result<i128> {
        let mask = self.h.membership(set)?;
        self.rewards.value(self.h, &mask)
    }

    pub fn exact_density(&self, set: &[u32]) -> Result<Rational> {
        let size = self.h.membership(set)?.iter().filter(|&&b| b).count();
        Ok(self.rewards.density(self.scaled_value(set)?, size))
    }

    /// `α` in scaled units as a reduced fraction `a / b`.
    fn scaled_alpha(&self, alpha: &Rational) -> Result<(i128, i128)> {
        if alpha.is_negative() {
            return Err(Error::OutOfRange("alpha must be nonnegative".into()));
        }
        let a = alpha * Rational::from_integer(self.rewards.scale.clone());
        let num = rational::to_i128(a.numer()).ok_or_else(overflow)?;
        let den = rational::to_i128(a.denom()).ok_or_else(overflow)?;
        Ok((num, den))
    }

    /// The network deciding `max_S f(S) − α|S| > 0`.
    pub fn network(&self, alpha: &Rational) -> Result<CutNetwork> {
        let (a, b) = self.scaled_alpha(alpha)?;
        let n = self.h.num_nodes();
        let mut flow = MaxFlow::new(n + 2);
        let (source, sink) = (n, n + 1);
        let mut hinges = Vec::new();
        let mut source_total: i128 = 0;
        for (i, (e, lam)) in self.h.edges().iter().zip(&self.lambdas).enumerate() {
            let m = e.len() as i128;
            for (t, &l) in lam.iter().enumerate() {
                if l == 0 {
                    continue;
                }
                let per_node = l.checked_mul(b).ok_or_else(overflow)?;
                let cap = per_node.checked_mul(m - t as i128).ok_or_else(overflow)?;
                source_total = source_total.checked_add(cap).ok_or_else(overflow)?;
                let hv = flow.add_vertex();
                hinges.push((hv, i, t));
                flow.add_edge(source, hv, cap);
                for &v in e.nodes() {
                    flow.add_edge(hv, v as usize, per_node);
                }
            }
        }
        for v in 0..n {
            flow.add_edge(v, sink, a);
        }
        Ok(CutNetwork { flow, source, sink, n, hinges, source_total, solved: None })
    }

    /// Some nonempty `S` with `f(S) − α|S| > 0` if one exists: the node part
    /// of the largest source side of a minimum cut.
    pub fn decide(&self, alpha: &Rational) -> Result<Option<Vec<u32>>> {
        let mut net = self.network(alpha)?;
        let (value, set) = net.solve()?;
        Ok(if value > 0 { Some(set) } else { None })
    }
}

/// Source/sink network for one value of `α`.
#[derive(Debug, Clone)]
pub struct CutNetwork {
    flow: MaxFlow,
    source: usize,
    sink: usize,
    n: usize,
    hinges: Vec<(usize, usize, usize)>,
    source_total: i128,
    solved: Option<(i128, Vec<u32>)>,
}

impl CutNetwork {
    pub fn num_vertices(&self) -> usize {
        self.flow.num_vertices()
    }

    pub fn source_capacity(&self) -> i128 {
        self.source_total
    }

    /// Returns `(source capacity − min cut, S)`. The value is
    /// `max_S f(S) − α|S|` scaled by `L` and the denominator of `α`.
    pub fn solve(&mut self) -> Result<(i128, Vec<u32>)> {
        if let Some(done) = &self.solved {
            return Ok(done.clone());
        }
        let cut = self.flow.max_flow(self.source, self.sink)?;
        let reaches = self.flow.reaches_sink(self.sink);
        let set: Vec<u32> = (0..self.n as u32).filter(|&v| !reaches[v as usize]).collect();
        let value = self.source_total - cut;
        self.solved = Some((value, set.clone()));
        Ok((value, set))
    }

    fn vertex_name(&self, u: usize) -> String {
        if u == self.source {
            "s".into()
        } else if u == self.sink {
            "t".into()
        } else if u < self.n {
            format!("v{u}")
        } else {
            let (_, e, t) = self.hinges[u - self.n - 2];
            format!("h{e}_{t}")
        }
    }

    /// Writes one `u v cap` line per arc, with `s` / `t` for the terminals,
    /// `v<id>` for nodes and `h<edge>_<t>` for hinges.
    pub fn write_arcs<W: Write>(&self, mut out: W) -> Result<()> {
        for (u, v, c) in self.flow.arcs() {
            writeln!(out, "{} {} {}", self.vertex_name(u), self.vertex_name(v), c)?;
        }
        Ok(())
    }
}

/// `decision_oracle` as a free function over a convex hypergraph.
pub fn decision_oracle(h: &Hypergraph, alpha: &Rational) -> Result<Option<Vec<u32>>> {
    ConvexInstance::new(h)?.decide(alpha)
}

/// The min-cut decision procedure as a [`DecisionOracle`].
pub struct FlowOracle<'a> {
    instance: ConvexInstance<'a>,
}

impl<'a> FlowOracle<'a> {
    pub fn new(h: &'a Hypergraph) -> Result<Self> {
        Ok(FlowOracle { instance: ConvexInstance::new(h)? })
    }
}

impl DecisionOracle for FlowOracle<'_> {
    fn improve(&mut self, h: &Hypergraph, alpha: &Rational) -> Result<Option<Vec<u32>>> {
        debug_assert!(std::ptr::eq(h, self.instance.h));
        self.instance.decide(alpha)
    }

    fn exact_density(&self, h: &Hypergraph, set: &[u32]) -> Result<Rational> {
        debug_assert!(std::ptr::eq(h, self.instance.h));
        self.instance.exact_density(set)
    }
}

/// Maximises Γ exactly for convex rewards by repeated min-cut probes at the
/// current density.
pub fn solve_convex_exact(h: &Hypergraph) -> Result<ExactSolution> {
    let mut oracle = FlowOracle::new(h)?;
    exact_loop_via(&mut oracle, h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedSolution {
    pub set: Vec<u32>,
    /// Γ of `set` under the original rewards.
    pub density: f64,
    /// Optimal density under the hull rewards.
    pub hull_density: Rational,
    /// Approximation certificate: `Γ(set) ≥ OPT / rho`.
    pub rho: Rational,
}

/// Projects every table onto its convex hull, solves the hull instance
/// exactly and reports the maximiser under the original rewards.
pub fn solve_projected(h: &Hypergraph) -> Result<ProjectedSolution> {
    let (projected, rho) = project_hypergraph(h)?;
    let (set, hull_density) = match solve_convex_exact(&projected) {
        Ok(sol) => (sol.set, sol.density),
        Err(Error::ZeroReward) => ((0..h.num_nodes() as u32).collect(), Rational::zero()),
        Err(e) => return Err(e),
    };
    let density = h.density(&set)?;
    Ok(ProjectedSolution { set, density, hull_density, rho })
}
