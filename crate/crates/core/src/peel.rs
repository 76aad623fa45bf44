//! Bound-function peeling and the degree-peeling baseline.
//!
//! A peel repeatedly removes the node minimising
//! `Σ_{e ∋ u} r_e(|e ∩ X|) − s_e(|e ∩ X| − 1)` and keeps the densest
//! intermediate set. With `s_e` satisfying the bound conditions
//! (`0 ≤ s(i) ≤ r(i)`, `r(i) − s(i−1) ≤ r(i+1) − s(i)`) the result is within
//! a factor `k` of optimal.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::heap::IndexedMinHeap;
use crate::hypergraph::Hypergraph;
use crate::rewards::RewardTable;

/// Subtracted term `s(0..m−1)` of the peeling score for an edge of size `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTable {
    values: Vec<f64>,
}

impl BoundTable {
    pub fn new(values: Vec<f64>) -> Self {
        BoundTable { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `s = 0`.
pub fn bound_zero(t: &RewardTable) -> BoundTable {
    BoundTable::new(vec![0.0; t.edge_size()])
}

/// The largest valid bound: `u(i) = r(i+1) − max_{0≤j≤i} (r(j+1) − r(j))`.
///
/// When the running maximum is attained at `j = i`, `u(i)` is exactly `r(i)`;
/// convex tables therefore give `u = r` without rounding.
pub fn bound_max(t: &RewardTable) -> BoundTable {
    let r = t.values();
    let mut running = f64::NEG_INFINITY;
    let values = (0..t.edge_size())
        .map(|i| {
            let delta = r[i + 1] - r[i];
            if delta >= running {
                running = delta;
                r[i]
            } else {
                r[i + 1] - running
            }
        })
        .collect();
    BoundTable::new(values)
}

/// `s(i) = r(i)`: the classic greedy peel. Valid only for convex tables.
pub fn bound_greedy(t: &RewardTable) -> BoundTable {
    BoundTable::new(t.values()[..t.edge_size()].to_vec())
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundViolation {
    Length { expected: usize, got: usize },
    OutOfRange { index: usize },
    Increment { index: usize },
}

impl fmt::Display for BoundViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundViolation::Length { expected, got } => {
                write!(f, "bound has {got} entries, expected {expected}")
            }
            BoundViolation::OutOfRange { index } => {
                write!(f, "s({index}) outside [0, r({index})]")
            }
            BoundViolation::Increment { index } => write!(
                f,
                "r({index}) - s({}) > r({}) - s({index})",
                index - 1,
                index + 1
            ),
        }
    }
}

/// Checks the two bound conditions. Comparisons allow a slack of
/// `1e-12 · max(1, max r)` for float rounding.
pub fn validate_bound(t: &RewardTable, s: &BoundTable) -> std::result::Result<(), BoundViolation> {
    let r = t.values();
    let m = t.edge_size();
    if s.len() != m {
        return Err(BoundViolation::Length { expected: m, got: s.len() });
    }
    let tol = 1e-12 * r.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
    let s = s.values();
    for i in 0..m {
        if s[i] < -tol || s[i] > r[i] + tol {
            return Err(BoundViolation::OutOfRange { index: i });
        }
    }
    for i in 1..m {
        if r[i] - s[i - 1] > r[i + 1] - s[i] + tol {
            return Err(BoundViolation::Increment { index: i });
        }
    }
    Ok(())
}

/// Choice of bound function.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Zero,
    Max,
    Greedy,
    /// One bound per edge, expressed against the weighted reward `w(e)·r_e`.
    Custom(Vec<BoundTable>),
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Zero => "zero",
            Strategy::Max => "max",
            Strategy::Greedy => "greedy",
            Strategy::Custom(_) => "custom",
        }
    }

    fn bound(&self, t: &RewardTable) -> BoundTable {
        match self {
            Strategy::Zero => bound_zero(t),
            Strategy::Max => bound_max(t),
            Strategy::Greedy => bound_greedy(t),
            Strategy::Custom(_) => unreachable!("custom bounds are per edge"),
        }
    }

    /// Whether every edge's bound passes [`validate_bound`], i.e. the peel
    /// carries the `1/k` guarantee.
    pub fn is_guaranteed(&self, h: &Hypergraph) -> Result<bool> {
        h.require_rewards()?;
        Ok(match self {
            Strategy::Custom(bounds) => {
                bounds.len() == h.num_edges()
                    && h.edges().iter().zip(bounds).all(|(e, s)| {
                        let folded = crate::rewards::fold_weight(e.weight(), e.table());
                        validate_bound(&folded, s).is_ok()
                    })
            }
            _ => h.tables().all(|t| validate_bound(t, &self.bound(t)).is_ok()),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeelResult {
    /// Densest set seen, sorted.
    pub best_set: Vec<u32>,
    pub best_density: f64,
    /// Γ(V), evaluated before any removal.
    pub initial_density: f64,
    pub removal_order: Vec<u32>,
    /// Γ(X) after each removal; the last entry is Γ(∅) = 0.
    pub density_trace: Vec<f64>,
}

/// Per-edge score increments `term[c] = w·r(c) − s(c−1)` for `c ≥ 1`.
fn score_terms(h: &Hypergraph, strategy: &Strategy) -> Result<Vec<Arc<[f64]>>> {
    h.require_rewards()?;
    if let Strategy::Custom(bounds) = strategy {
        if bounds.len() != h.num_edges() {
            return Err(Error::OutOfRange(format!(
                "{} custom bounds for {} edges",
                bounds.len(),
                h.num_edges()
            )));
        }
        return h
            .edges()
            .iter()
            .zip(bounds)
            .enumerate()
            .map(|(i, (e, s))| {
                if s.len() != e.len() {
                    return Err(Error::OutOfRange(format!("bound for edge {i} has wrong length")));
                }
                let mut term = vec![0.0; e.len() + 1];
                for c in 1..=e.len() {
                    term[c] = e.value(c) - s.values()[c - 1];
                }
                Ok(term.into())
            })
            .collect();
    }
    let mut memo: HashMap<(*const RewardTable, u64), Arc<[f64]>> = HashMap::new();
    Ok(h.edges()
        .iter()
        .map(|e| {
            let t = e.reward().expect("checked");
            memo.entry((Arc::as_ptr(t), e.weight().to_bits()))
                .or_insert_with(|| {
                    let s = strategy.bound(t);
                    let w = e.weight();
                    let mut term = vec![0.0; e.len() + 1];
                    for c in 1..=e.len() {
                        term[c] = w * (t.get(c) - s.values()[c - 1]);
                    }
                    term.into()
                })
                .clone()
        })
        .collect())
}

/// Tracks the best prefix while nodes are peeled off.
struct Tracker {
    n: usize,
    f: f64,
    best: f64,
    best_removed: usize,
    initial: f64,
    order: Vec<u32>,
    trace: Vec<f64>,
}

impl Tracker {
    fn new(n: usize, f: f64) -> Self {
        let initial = f / n as f64;
        Tracker {
            n,
            f,
            best: initial,
            best_removed: 0,
            initial,
            order: Vec::with_capacity(n),
            trace: Vec::with_capacity(n),
        }
    }

    fn removed(&mut self, v: u32) {
        self.order.push(v);
        let left = self.n - self.order.len();
        let density = if left == 0 { 0.0 } else { self.f / left as f64 };
        self.trace.push(density);
        if left > 0 && density >= self.best {
            self.best = density;
            self.best_removed = self.order.len();
        }
    }

    fn finish(self) -> PeelResult {
        let mut gone = vec![false; self.n];
        for &v in &self.order[..self.best_removed] {
            gone[v as usize] = true;
        }
        PeelResult {
            best_set: (0..self.n as u32).filter(|&v| !gone[v as usize]).collect(),
            best_density: self.best,
            initial_density: self.initial,
            removal_order: self.order,
            density_trace: self.trace,
        }
    }
}

fn check_nonempty(h: &Hypergraph) -> Result<()> {
    h.require_rewards()?;
    if h.num_nodes() == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Peels `h` with the given bound strategy. Argmin ties go to the smallest
/// node id; a later intermediate set replaces the best one on equal density.
pub fn peel(h: &Hypergraph, strategy: &Strategy) -> Result<PeelResult> {
    check_nonempty(h)?;
    let n = h.num_nodes();
    let terms = score_terms(h, strategy)?;
    let inc = h.incidence();
    let edges = h.edges();
    let mut count: Vec<usize> = edges.iter().map(|e| e.len()).collect();
    let mut scores = vec![0.0; n];
    let mut f = 0.0;
    for (i, e) in edges.iter().enumerate() {
        let t = terms[i][e.len()];
        for &v in e.nodes() {
            scores[v as usize] += t;
        }
        f += e.value(e.len());
    }
    let mut heap = IndexedMinHeap::from_keys(scores);
    let mut tracker = Tracker::new(n, f);
    while let Some((v, _)) = heap.pop() {
        for &ei in &inc[v as usize] {
            let e = &edges[ei as usize];
            let c = count[ei as usize];
            count[ei as usize] = c - 1;
            tracker.f += e.value(c - 1) - e.value(c);
            if c > 1 {
                let term = &terms[ei as usize];
                let delta = term[c - 1] - term[c];
                if delta != 0.0 {
                    for &u in e.nodes() {
                        if heap.contains(u) {
                            heap.add_to_key(u, delta);
                        }
                    }
                }
            }
        }
        tracker.removed(v);
    }
    Ok(tracker.finish())
}

/// What counts towards a node's degree during degree peeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeMode {
    /// Edges fully inside the current set.
    #[default]
    Contained,
    /// Edges meeting the current set; for a node still in the set this is
    /// its full degree, so the order is fixed up front.
    Incident,
}

/// Peels by degree in the induced hypergraph, while still tracking Γ with the
/// true rewards.
pub fn peel_degree(h: &Hypergraph, mode: DegreeMode) -> Result<PeelResult> {
    check_nonempty(h)?;
    let n = h.num_nodes();
    let inc = h.incidence();
    let edges = h.edges();
    let mut count: Vec<usize> = edges.iter().map(|e| e.len()).collect();
    let scores = inc.iter().map(|es| es.len() as f64).collect();
    let f = edges.iter().map(|e| e.value(e.len())).sum();
    let mut heap = IndexedMinHeap::from_keys(scores);
    let mut tracker = Tracker::new(n, f);
    while let Some((v, _)) = heap.pop() {
        for &ei in &inc[v as usize] {
            let e = &edges[ei as usize];
            let c = count[ei as usize];
            if mode == DegreeMode::Contained && c == e.len() {
                for &u in e.nodes() {
                    if heap.contains(u) {
                        heap.add_to_key(u, -1.0);
                    }
                }
            }
            count[ei as usize] = c - 1;
            tracker.f += e.value(c - 1) - e.value(c);
        }
        tracker.removed(v);
    }
    Ok(tracker.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewards::{Reward, RewardSpec};

    fn h0(reward: Reward) -> Hypergraph {
        Hypergraph::from_edges(4, &[&[0, 1, 2], &[1, 2, 3]])
            .unwrap()
            .with_rewards(&RewardSpec::Builtin(reward))
            .unwrap()
    }

    fn approx(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-5)
    }

    #[test]
    fn zero_bound() {
        let t = Reward::Quadratic.table(3);
        assert_eq!(bound_zero(&t).values(), &[0.0, 0.0, 0.0]);
        assert_eq!(bound_zero(&Reward::Standard.table(1)).values(), &[0.0]);
        for r in Reward::ALL {
            for m in 1..8 {
                let t = r.table(m);
                assert!(validate_bound(&t, &bound_zero(&t)).is_ok());
                assert!(validate_bound(&t, &bound_max(&t)).is_ok(), "{r} {m}");
            }
        }
    }

    #[test]
    fn max_bound_examples() {
        assert_eq!(bound_max(&Reward::AtleastTwo.table(3)).values(), &[0.0, 0.0, 0.0]);
        let sq = bound_max(&Reward::SquareRoot.table(3));
        assert!(approx(sq.values(), &[0.0, 0.0, 0.31784]));
        assert_eq!(bound_max(&Reward::Standard.table(3)).values(), &[0.0, 0.0, 0.0]);
        let q = Reward::Quadratic.table(5);
        assert_eq!(bound_max(&q).values(), &q.values()[..5]);
    }

    #[test]
    fn greedy_bound_examples() {
        assert_eq!(bound_greedy(&Reward::Standard.table(3)).values(), &[0.0, 0.0, 0.0]);
        let a2 = Reward::AtleastTwo.table(3);
        let g = bound_greedy(&a2);
        assert_eq!(g.values(), &[0.0, 0.0, 1.0]);
        assert_eq!(validate_bound(&a2, &g), Err(BoundViolation::Increment { index: 2 }));
        let q = Reward::Quadratic.table(3);
        assert!(validate_bound(&q, &bound_greedy(&q)).is_ok());
    }

    #[test]
    fn bound_length_checked() {
        let t = Reward::Standard.table(3);
        assert!(matches!(
            validate_bound(&t, &BoundTable::new(vec![0.0])),
            Err(BoundViolation::Length { .. })
        ));
        assert!(matches!(
            validate_bound(&t, &BoundTable::new(vec![0.0, 0.5, 0.0])),
            Err(BoundViolation::OutOfRange { index: 1 })
        ));
    }

    #[test]
    fn peel_zero_on_h0() {
        let r = peel(&h0(Reward::AtleastTwo), &Strategy::Zero).unwrap();
        assert_eq!(r.removal_order, vec![0, 3, 1, 2]);
        assert_eq!(r.best_set, vec![1, 2]);
        assert_eq!(r.best_density, 1.0);
        assert_eq!(r.initial_density, 0.5);
        assert_eq!(r.density_trace, vec![2.0 / 3.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn degree_peel_on_h0() {
        // Degrees 1,2,2,1 -> remove 0; then only {1,2,3} is contained:
        // degrees 1,1,1 -> remove 1; nothing contained -> remove 2, then 3.
        let r = peel_degree(&h0(Reward::AtleastTwo), DegreeMode::Contained).unwrap();
        assert_eq!(r.removal_order, vec![0, 1, 2, 3]);
        assert_eq!(r.best_set, vec![1, 2, 3]);
        assert!((r.best_density - 2.0 / 3.0).abs() < 1e-15);
        let inc = peel_degree(&h0(Reward::AtleastTwo), DegreeMode::Incident).unwrap();
        assert_eq!(inc.removal_order, vec![0, 3, 1, 2]);
    }

    #[test]
    fn degree_peel_without_contained_edges_uses_ids() {
        let h = Hypergraph::from_edges(5, &[&[0, 1], &[2, 3, 4]])
            .unwrap()
            .with_rewards(&RewardSpec::Builtin(Reward::Quadratic))
            .unwrap();
        let r = peel_degree(&h, DegreeMode::Contained).unwrap();
        // After 0 goes, node 1's edge is broken: all remaining scores tie at
        // 0 or 1, and the broken node 1 goes next.
        assert_eq!(r.removal_order[..2], [0, 1]);
        assert_eq!(r.removal_order[2..], [2, 3, 4]);
    }

    #[test]
    fn single_edge_keeps_everything() {
        let h = Hypergraph::from_edges(2, &[&[0, 1]])
            .unwrap()
            .with_rewards(&RewardSpec::Builtin(Reward::Standard))
            .unwrap();
        let r = peel(&h, &Strategy::Max).unwrap();
        assert_eq!(r.best_set, vec![0, 1]);
        assert_eq!(r.best_density, 0.5);
    }

    #[test]
    fn zero_rewards_never_select_empty_set() {
        let h = Hypergraph::from_edges(3, &[&[0, 1, 2]])
            .unwrap()
            .map_rewards(|_, e| Arc::new(RewardTable::zeros(e.len())));
        let r = peel(&h, &Strategy::Zero).unwrap();
        assert_eq!(r.best_set.len(), 1);
        assert_eq!(r.best_density, 0.0);
    }

    #[test]
    fn empty_graph_is_an_error() {
        let h = Hypergraph::new(0, vec![]).unwrap();
        assert!(matches!(peel(&h, &Strategy::Zero), Err(Error::EmptyInput)));
    }

    #[test]
    fn custom_bounds_match_builtin() {
        let h = h0(Reward::AtleastTwo);
        let bounds = h.edges().iter().map(|e| bound_max(e.table())).collect();
        let custom = peel(&h, &Strategy::Custom(bounds)).unwrap();
        assert_eq!(custom, peel(&h, &Strategy::Max).unwrap());
        assert!(peel(&h, &Strategy::Custom(vec![])).is_err());
    }

    #[test]
    fn guarantee_flags() {
        assert!(Strategy::Greedy.is_guaranteed(&h0(Reward::Quadratic)).unwrap());
        assert!(!Strategy::Greedy.is_guaranteed(&h0(Reward::AtleastTwo)).unwrap());
        assert!(Strategy::Zero.is_guaranteed(&h0(Reward::AtleastTwo)).unwrap());
        assert!(Strategy::Max.is_guaranteed(&h0(Reward::SquareRoot)).unwrap());
    }
}
