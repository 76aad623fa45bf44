//! Algorithm dispatch and the approximation guarantee each run carries.

use std::fmt;
use std::io::Write;

use clap::ValueEnum;
use densub::constrained::{card_swamp, fair_swamp};
use densub::exact::brute_force;
use densub::flow::{solve_convex_exact, solve_projected, ConvexInstance};
use densub::peel::{peel, peel_degree, DegreeMode, Strategy};
use densub::project::project_hypergraph;
use densub::rational::{self, Rational};
use densub::solver::{
    BruteForceSolver, DegreePeelSolver, FlowExactSolver, PeelSolver, ProjectedFlowSolver,
    ProjectedGreedySolver, SwampSolver,
};
use densub::{Error, Hypergraph};
use num_traits::One;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Algo {
    PeelZero,
    PeelMax,
    Greedy,
    DegPeel,
    ProjFlow,
    ProjGreedy,
    FlowExact,
    Brute,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::PeelZero => "peel-zero",
            Algo::PeelMax => "peel-max",
            Algo::Greedy => "greedy",
            Algo::DegPeel => "deg-peel",
            Algo::ProjFlow => "proj-flow",
            Algo::ProjGreedy => "proj-greedy",
            Algo::FlowExact => "flow-exact",
            Algo::Brute => "brute",
        }
    }
}

/// Run-time knobs shared by all algorithms.
#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub project: bool,
    pub degree_mode: DegreeMode,
    pub max_n: usize,
}

/// The approximation factor of a run, relative to the optimum of its
/// problem variant.
#[derive(Debug, Clone, PartialEq)]
pub enum Guarantee {
    Exact,
    OverK(usize),
    OverRho(Rational),
    OverKSquared(usize),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Plain,
    MinSize,
    Classes,
}

pub fn describe(g: &Guarantee, variant: Variant) -> String {
    let (expr, param) = match g {
        Guarantee::None => return "no guarantee (heuristic)".into(),
        Guarantee::Exact => {
            return match variant {
                Variant::Plain => "exact",
                Variant::MinSize => "1/2",
                Variant::Classes => "1/4",
            }
            .into()
        }
        Guarantee::OverK(k) => ("k", format!("k={k}")),
        Guarantee::OverRho(rho) => ("rho", format!("rho={}", rho_text(rho))),
        Guarantee::OverKSquared(k) => ("k^2", format!("k={k}")),
    };
    match variant {
        Variant::Plain => format!("1/{expr} where {param}"),
        Variant::MinSize => format!("1/({expr}+1) where {param}"),
        Variant::Classes => format!("1/(2{expr}+2) where {param}"),
    }
}

fn rho_text(rho: &Rational) -> String {
    if rho.is_integer() {
        rho.to_integer().to_string()
    } else {
        format!("{} (~{:.4})", rho, rational::to_f64(rho))
    }
}

impl fmt::Display for Guarantee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&describe(self, Variant::Plain))
    }
}

pub struct Outcome {
    pub set: Vec<u32>,
    pub density: f64,
    pub guarantee: String,
}

pub fn is_convex(h: &Hypergraph) -> bool {
    h.edges().iter().all(|e| e.reward().is_some_and(|t| t.is_convex()))
}

/// Rejects combinations that cannot run before any work is timed.
pub fn check(h: &Hypergraph, algo: Algo, opts: &Options) -> Result<(), String> {
    if algo == Algo::FlowExact && !opts.project && !is_convex(h) {
        return Err("flow-exact needs convex rewards; pass --project or use proj-flow".into());
    }
    Ok(())
}

fn guarantee(h: &Hypergraph, algo: Algo, opts: &Options) -> Result<Guarantee, Error> {
    let k = h.max_edge_size();
    Ok(match algo {
        Algo::PeelZero | Algo::PeelMax => Guarantee::OverK(k),
        Algo::Greedy if Strategy::Greedy.is_guaranteed(h)? => Guarantee::OverK(k),
        Algo::Greedy | Algo::DegPeel => Guarantee::None,
        Algo::ProjFlow => rho_guarantee(project_hypergraph(h)?.1),
        Algo::FlowExact if opts.project => rho_guarantee(project_hypergraph(h)?.1),
        Algo::FlowExact | Algo::Brute => Guarantee::Exact,
        Algo::ProjGreedy => Guarantee::OverKSquared(k),
    })
}

fn rho_guarantee(rho: Rational) -> Guarantee {
    if rho.is_one() {
        Guarantee::Exact
    } else {
        Guarantee::OverRho(rho)
    }
}

fn solver(algo: Algo, opts: &Options) -> Box<dyn SwampSolver> {
    match algo {
        Algo::PeelZero => Box::new(PeelSolver(Strategy::Zero)),
        Algo::PeelMax => Box::new(PeelSolver(Strategy::Max)),
        Algo::Greedy => Box::new(PeelSolver(Strategy::Greedy)),
        Algo::DegPeel => Box::new(DegreePeelSolver(opts.degree_mode)),
        Algo::ProjFlow => Box::new(ProjectedFlowSolver),
        Algo::FlowExact if opts.project => Box::new(ProjectedFlowSolver),
        Algo::FlowExact => Box::new(FlowExactSolver),
        Algo::ProjGreedy => Box::new(ProjectedGreedySolver),
        Algo::Brute => Box::new(BruteForceSolver { max_n: opts.max_n }),
    }
}

/// Solves the unconstrained problem.
pub fn run(h: &Hypergraph, algo: Algo, opts: &Options) -> Result<Outcome, Error> {
    let g = guarantee(h, algo, opts)?;
    let (set, density) = match algo {
        Algo::PeelZero | Algo::PeelMax | Algo::Greedy => {
            let s = match algo {
                Algo::PeelZero => Strategy::Zero,
                Algo::PeelMax => Strategy::Max,
                _ => Strategy::Greedy,
            };
            let r = peel(h, &s)?;
            (r.best_set, r.best_density)
        }
        Algo::DegPeel => {
            let r = peel_degree(h, opts.degree_mode)?;
            (r.best_set, r.best_density)
        }
        Algo::FlowExact if !opts.project => match solve_convex_exact(h) {
            Ok(sol) => (sol.set, rational::to_f64(&sol.density)),
            Err(Error::ZeroReward) => ((0..h.num_nodes() as u32).collect(), 0.0),
            Err(e) => return Err(e),
        },
        Algo::FlowExact | Algo::ProjFlow => {
            let sol = solve_projected(h)?;
            (sol.set, sol.density)
        }
        Algo::ProjGreedy => {
            let (p, _) = project_hypergraph(h)?;
            let set = peel(&p, &Strategy::Greedy)?.best_set;
            let d = h.density(&set)?;
            (set, d)
        }
        Algo::Brute => {
            let r = brute_force(h, opts.max_n)?;
            (r.set, r.density)
        }
    };
    Ok(Outcome { set, density, guarantee: describe(&g, Variant::Plain) })
}

/// Solves with a minimum total size.
pub fn run_min_size(h: &Hypergraph, algo: Algo, opts: &Options, ell: usize) -> Result<Outcome, Error> {
    let g = guarantee(h, algo, opts)?;
    let r = card_swamp(h, ell, solver(algo, opts).as_ref())?;
    Ok(Outcome { set: r.set, density: r.density, guarantee: describe(&g, Variant::MinSize) })
}

/// Solves with per-class minimum counts.
pub fn run_classes(h: &Hypergraph, algo: Algo, opts: &Options, ell: &[usize]) -> Result<Outcome, Error> {
    let g = guarantee(h, algo, opts)?;
    let r = fair_swamp(h, ell, solver(algo, opts).as_ref())?;
    Ok(Outcome { set: r.set, density: r.density, guarantee: describe(&g, Variant::Classes) })
}

/// Writes the cut network probed at the density of `set`, on the convex
/// (or projected) instance.
pub fn dump_network(h: &Hypergraph, set: &[u32], out: impl Write) -> Result<(), Error> {
    let projected;
    let g = if is_convex(h) {
        h
    } else {
        projected = project_hypergraph(h)?.0;
        &projected
    };
    let inst = ConvexInstance::new(g)?;
    let alpha = inst.exact_density(set)?;
    inst.network(&alpha)?.write_arcs(out)
}
