//! Densest sets under a minimum size, and under per-class minimum counts.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hypergraph::{Hyperedge, Hypergraph};
use crate::rewards::{contract_reward, RewardTable};
use crate::solver::SwampSolver;

/// `h` with the nodes of `U` absorbed into every edge.
#[derive(Debug, Clone)]
pub struct Contracted {
    pub hypergraph: Hypergraph,
    /// `original_ids[v]` is the id in the input hypergraph of node `v`.
    pub original_ids: Vec<u32>,
}

/// Removes `absorbed` from `h`. Each edge keeps its members outside the set
/// and sees the reward `r'(i) = r(i + j) − r(j)`, with `j` the number of its
/// members absorbed; edges with no members left are dropped.
pub fn contract(h: &Hypergraph, absorbed: &[u32]) -> Result<Contracted> {
    h.require_rewards()?;
    let inside = h.membership(absorbed)?;
    let original_ids: Vec<u32> = (0..h.num_nodes() as u32).filter(|&v| !inside[v as usize]).collect();
    if original_ids.is_empty() {
        return Err(Error::Infeasible("contraction would remove every node".into()));
    }
    let mut new_id = vec![u32::MAX; h.num_nodes()];
    for (i, &v) in original_ids.iter().enumerate() {
        new_id[v as usize] = i as u32;
    }
    let mut memo: HashMap<(*const RewardTable, usize), Arc<RewardTable>> = HashMap::new();
    let mut edges = Vec::new();
    for e in h.edges() {
        let rest: Vec<u32> = e
            .nodes()
            .iter()
            .filter(|&&v| !inside[v as usize])
            .map(|&v| new_id[v as usize])
            .collect();
        if rest.is_empty() {
            continue;
        }
        let j = e.len() - rest.len();
        let t = e.reward().expect("checked");
        let table = if j == 0 {
            t.clone()
        } else {
            match memo.get(&(Arc::as_ptr(t), j)) {
                Some(c) => c.clone(),
                None => {
                    let c = Arc::new(contract_reward(t, j)?);
                    memo.insert((Arc::as_ptr(t), j), c.clone());
                    c
                }
            }
        };
        edges.push(Hyperedge::new(rest, e.weight()).with_reward(table));
    }
    Ok(Contracted { hypergraph: h.induced_from(original_ids.clone(), edges), original_ids })
}

/// Grows a set one node at a time by largest marginal gain in `f`, with ties
/// to the smallest id.
struct Padder<'a> {
    h: &'a Hypergraph,
    incidence: Vec<Vec<u32>>,
    counts: Vec<usize>,
    member: Vec<bool>,
}

impl<'a> Padder<'a> {
    fn new(h: &'a Hypergraph, base: &[u32]) -> Result<Self> {
        let member = h.membership(base)?;
        let counts = h
            .edges()
            .iter()
            .map(|e| e.nodes().iter().filter(|&&v| member[v as usize]).count())
            .collect();
        Ok(Padder { h, incidence: h.incidence(), counts, member })
    }

    fn size(&self) -> usize {
        self.member.iter().filter(|&&b| b).count()
    }

    fn gain(&self, v: u32) -> f64 {
        self.incidence[v as usize]
            .iter()
            .map(|&e| {
                let edge = &self.h.edges()[e as usize];
                let c = self.counts[e as usize];
                edge.value(c + 1) - edge.value(c)
            })
            .sum()
    }

    /// Adds `count` nodes accepted by `allowed`; false if too few exist.
    fn pad(&mut self, count: usize, allowed: impl Fn(u32) -> bool) -> bool {
        for _ in 0..count {
            let mut best: Option<(u32, f64)> = None;
            for v in 0..self.h.num_nodes() as u32 {
                if self.member[v as usize] || !allowed(v) {
                    continue;
                }
                let g = self.gain(v);
                if best.is_none_or(|(_, bg)| g > bg) {
                    best = Some((v, g));
                }
            }
            let Some((v, _)) = best else { return false };
            self.member[v as usize] = true;
            for &e in &self.incidence[v as usize] {
                self.counts[e as usize] += 1;
            }
        }
        true
    }

    fn into_set(self) -> Vec<u32> {
        (0..self.member.len() as u32).filter(|&v| self.member[v as usize]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CardResult {
    pub set: Vec<u32>,
    pub density: f64,
    /// Inner solves performed.
    pub rounds: usize,
    /// Whether the padded union of the earlier rounds won over the full union.
    pub padded: bool,
}

/// Densest set of at least `ell` nodes. Repeatedly solves the contracted
/// instance, absorbing each answer, until the union reaches `ell` nodes;
/// then compares that union with the union of all rounds but the last padded
/// to exactly `ell` nodes, and returns the denser one.
pub fn card_swamp(h: &Hypergraph, ell: usize, inner: &dyn SwampSolver) -> Result<CardResult> {
    h.require_rewards()?;
    let n = h.num_nodes();
    if ell == 0 || ell > n {
        return Err(Error::OutOfRange(format!("minimum size {ell} must be between 1 and n = {n}")));
    }
    let mut union: Vec<bool> = vec![false; n];
    let mut size = 0;
    let mut before_last: Vec<u32>;
    let mut current = Contracted { hypergraph: h.clone(), original_ids: (0..n as u32).collect() };
    let mut rounds = 0;
    loop {
        let g = &current.hypergraph;
        let found = if g.num_edges() == 0 {
            (0..g.num_nodes() as u32).collect()
        } else {
            inner.solve(g)?
        };
        if found.is_empty() {
            return Err(Error::Infeasible(format!("{} returned an empty set", inner.name())));
        }
        rounds += 1;
        before_last = (0..n as u32).filter(|&v| union[v as usize]).collect();
        for v in found {
            let orig = current.original_ids[v as usize];
            if !union[orig as usize] {
                union[orig as usize] = true;
                size += 1;
            }
        }
        if size >= ell {
            break;
        }
        let absorbed: Vec<u32> = (0..n as u32).filter(|&v| union[v as usize]).collect();
        current = contract(h, &absorbed)?;
    }
    let set: Vec<u32> = (0..n as u32).filter(|&v| union[v as usize]).collect();
    let mut padder = Padder::new(h, &before_last)?;
    let missing = ell - padder.size();
    padder.pad(missing, |_| true);
    let alt = padder.into_set();
    let (d_set, d_alt) = (h.density(&set)?, h.density(&alt)?);
    let padded = d_alt > d_set;
    let (set, density) = if padded { (alt, d_alt) } else { (set, d_set) };
    Ok(CardResult { set, density, rounds, padded })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairResult {
    pub set: Vec<u32>,
    pub density: f64,
    /// The size-constrained answer before class padding.
    pub card: CardResult,
}

/// Densest set with at least `ell_per_class[i]` nodes of class `i`. Solves
/// the size-constrained problem with `ℓ = Σ ℓ_i`, then tops up each class
/// with a deficit by largest marginal gain.
pub fn fair_swamp(h: &Hypergraph, ell_per_class: &[usize], inner: &dyn SwampSolver) -> Result<FairResult> {
    let labels = h
        .labels()
        .ok_or_else(|| Error::Infeasible("class constraints need node labels".into()))?;
    let k = labels.num_classes();
    if ell_per_class.len() > k {
        return Err(Error::Infeasible(format!(
            "{} class minimums given for {k} classes",
            ell_per_class.len()
        )));
    }
    let mut members = vec![0usize; k];
    for &c in &labels.class_of {
        members[c as usize] += 1;
    }
    for (c, &need) in ell_per_class.iter().enumerate() {
        if need > members[c] {
            return Err(Error::Infeasible(format!(
                "class `{}` needs {need} nodes but has {}",
                labels.class_names[c], members[c]
            )));
        }
    }
    let total: usize = ell_per_class.iter().sum();
    let card = card_swamp(h, total.max(1), inner)?;
    let mut padder = Padder::new(h, &card.set)?;
    for (c, &need) in ell_per_class.iter().enumerate() {
        let have = card.set.iter().filter(|&&v| labels.class_of[v as usize] as usize == c).count();
        if need > have {
            let ok = padder.pad(need - have, |v| labels.class_of[v as usize] as usize == c);
            debug_assert!(ok, "class sizes were checked");
        }
    }
    let set = padder.into_set();
    let density = h.density(&set)?;
    Ok(FairResult { set, density, card })
}
