//! Hypergraph model, text ingestion, preprocessing and density evaluation.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rewards::{RewardSpec, RewardTable, TableCache};

#[derive(Debug, Clone)]
pub struct Hyperedge {
    nodes: Vec<u32>,
    weight: f64,
    reward: Option<Arc<RewardTable>>,
}

impl Hyperedge {
    /// `nodes` are sorted and deduplicated.
    pub fn new(mut nodes: Vec<u32>, weight: f64) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        assert!(!nodes.is_empty(), "edge must contain a node");
        assert!(weight >= 0.0 && weight.is_finite(), "weight must be finite and nonnegative");
        Hyperedge { nodes, weight, reward: None }
    }

    pub fn with_reward(mut self, reward: Arc<RewardTable>) -> Self {
        assert_eq!(reward.edge_size(), self.nodes.len(), "reward table size mismatch");
        self.reward = Some(reward);
        self
    }

    pub fn nodes(&self) -> &[u32] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn reward(&self) -> Option<&Arc<RewardTable>> {
        self.reward.as_ref()
    }

    /// Panics when no table is attached; callers check with
    /// [`Hypergraph::require_rewards`] first.
    #[inline]
    pub(crate) fn table(&self) -> &RewardTable {
        self.reward.as_deref().expect("reward attached")
    }

    /// `w(e) · r_e(c)`.
    #[inline]
    pub(crate) fn value(&self, c: usize) -> f64 {
        self.weight * self.table().get(c)
    }
}

/// Color classes attached to nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Labels {
    pub class_of: Vec<u32>,
    pub class_names: Vec<String>,
}

impl Labels {
    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_id(&self, name: &str) -> Option<u32> {
        self.class_names.iter().position(|c| c == name).map(|i| i as u32)
    }
}

#[derive(Debug, Clone)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Hyperedge>,
    names: Option<Vec<String>>,
    labels: Option<Labels>,
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        for e in &edges {
            if let Some(&v) = e.nodes.iter().find(|&&v| v as usize >= n) {
                return Err(Error::NodeOutOfRange { node: v, n });
            }
        }
        Ok(Hypergraph { n, edges, names: None, labels: None })
    }

    /// Convenience constructor from node lists with unit weights.
    pub fn from_edges(n: usize, edges: &[&[u32]]) -> Result<Self> {
        Self::new(n, edges.iter().map(|e| Hyperedge::new(e.to_vec(), 1.0)).collect())
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    /// Maximum edge size `k` (0 without edges).
    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(Hyperedge::len).max().unwrap_or(0)
    }

    /// `p = Σ |e|`.
    pub fn total_size(&self) -> usize {
        self.edges.iter().map(Hyperedge::len).sum()
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn name(&self, v: u32) -> String {
        match &self.names {
            Some(names) => names[v as usize].clone(),
            None => v.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.n);
        self.names = Some(names);
        self
    }

    pub fn with_labels(mut self, labels: Labels) -> Self {
        assert_eq!(labels.class_of.len(), self.n);
        self.labels = Some(labels);
        self
    }

    /// Attaches a table to every edge according to `spec`.
    pub fn with_rewards(mut self, spec: &RewardSpec) -> Result<Self> {
        let mut cache = TableCache::new(spec);
        for e in &mut self.edges {
            e.reward = Some(cache.get(e.len())?);
        }
        Ok(self)
    }

    /// Replaces every edge's table by `f(edge index, edge)`.
    pub fn map_rewards(
        &self,
        mut f: impl FnMut(usize, &Hyperedge) -> Arc<RewardTable>,
    ) -> Self {
        let mut out = self.clone();
        for (i, e) in out.edges.iter_mut().enumerate() {
            let t = f(i, &self.edges[i]);
            assert_eq!(t.edge_size(), e.len());
            e.reward = Some(t);
        }
        out
    }

    /// Moves every weight into its reward table, leaving unit weights.
    pub fn fold_weights(&self) -> Result<Self> {
        self.require_rewards()?;
        let mut out = self.clone();
        for e in &mut out.edges {
            if e.weight != 1.0 {
                e.reward = Some(Arc::new(crate::rewards::fold_weight(e.weight, e.table())));
                e.weight = 1.0;
            }
        }
        Ok(out)
    }

    pub fn require_rewards(&self) -> Result<()> {
        match self.edges.iter().position(|e| e.reward.is_none()) {
            Some(edge) => Err(Error::MissingReward { edge }),
            None => Ok(()),
        }
    }

    pub(crate) fn tables(&self) -> impl Iterator<Item = &RewardTable> {
        self.edges.iter().filter_map(|e| e.reward.as_deref())
    }

    /// Incidence lists: for each node, the indices of the edges containing it.
    pub fn incidence(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in &e.nodes {
                inc[v as usize].push(i as u32);
            }
        }
        inc
    }

    /// Membership mask for `set`, failing on out-of-range ids. Duplicates are
    /// ignored.
    pub fn membership(&self, set: &[u32]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n];
        for &v in set {
            if v as usize >= self.n {
                return Err(Error::NodeOutOfRange { node: v, n: self.n });
            }
            mask[v as usize] = true;
        }
        Ok(mask)
    }

    /// `f(S) = Σ_e w(e) · r_e(|e ∩ S|)`.
    pub fn reward_sum(&self, set: &[u32]) -> Result<f64> {
        self.require_rewards()?;
        let mask = self.membership(set)?;
        Ok(self.reward_sum_mask(&mask))
    }

    pub(crate) fn reward_sum_mask(&self, mask: &[bool]) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                let c = e.nodes.iter().filter(|&&v| mask[v as usize]).count();
                e.value(c)
            })
            .sum()
    }

    /// `Γ(S) = f(S) / |S|`, with `Γ(∅) = 0`.
    pub fn density(&self, set: &[u32]) -> Result<f64> {
        self.require_rewards()?;
        let mask = self.membership(set)?;
        let size = mask.iter().filter(|&&b| b).count();
        if size == 0 {
            return Ok(0.0);
        }
        Ok(self.reward_sum_mask(&mask) / size as f64)
    }

    /// Edge-composition counts of `set`.
    pub fn subset_stats(&self, set: &[u32]) -> Result<SubsetStats> {
        let density = self.density(set)?;
        let mask = self.membership(set)?;
        let mut stats = SubsetStats {
            size: mask.iter().filter(|&&b| b).count(),
            density,
            ..Default::default()
        };
        for e in &self.edges {
            let m = e.len();
            let c = e.nodes.iter().filter(|&&v| mask[v as usize]).count();
            if c == 0 {
                continue;
            }
            stats.contained += usize::from(c == m);
            stats.atleast_two += usize::from(c >= 2);
            stats.atleast_half += usize::from(c >= m.div_ceil(2));
            stats.all_but_one += usize::from(c + 1 >= m);
        }
        Ok(stats)
    }

    /// Drops size-1 edges and dangling nodes, then keeps the largest
    /// connected component (clique-expansion adjacency, measured in nodes,
    /// ties to the component holding the smallest node id). Ids are
    /// re-densified in their original order.
    pub fn preprocess(&self) -> Result<Self> {
        let kept: Vec<&Hyperedge> = self.edges.iter().filter(|e| e.len() >= 2).collect();
        if kept.is_empty() {
            return Err(Error::NoEdgesAfterPreprocessing);
        }
        let mut uf = UnionFind::new(self.n);
        let mut touched = vec![false; self.n];
        for e in &kept {
            let first = e.nodes[0];
            for &v in &e.nodes {
                touched[v as usize] = true;
                uf.union(first, v);
            }
        }
        let mut comp_size = vec![0usize; self.n];
        for v in 0..self.n {
            if touched[v] {
                comp_size[uf.find(v as u32) as usize] += 1;
            }
        }
        // Scanning ids in increasing order visits each component first at its
        // smallest member, so a strict `>` keeps the earliest on ties.
        let mut best_root = None;
        let mut best_size = 0;
        for v in 0..self.n {
            if !touched[v] {
                continue;
            }
            let root = uf.find(v as u32) as usize;
            if comp_size[root] > best_size {
                best_size = comp_size[root];
                best_root = Some(root);
            }
        }
        let best_root = best_root.expect("some node is touched") as u32;
        let mut remap = vec![u32::MAX; self.n];
        let mut old_ids = Vec::with_capacity(best_size);
        for v in 0..self.n {
            if touched[v] && uf.find(v as u32) == best_root {
                remap[v] = old_ids.len() as u32;
                old_ids.push(v as u32);
            }
        }
        let edges = kept
            .into_iter()
            .filter(|e| remap[e.nodes[0] as usize] != u32::MAX)
            .map(|e| Hyperedge {
                nodes: e.nodes.iter().map(|&v| remap[v as usize]).collect(),
                weight: e.weight,
                reward: e.reward.clone(),
            })
            .collect();
        Ok(self.induced_from(old_ids, edges))
    }

    /// Builds a hypergraph over `old_ids` (in order) carrying names and labels.
    pub(crate) fn induced_from(&self, old_ids: Vec<u32>, edges: Vec<Hyperedge>) -> Self {
        let names = self
            .names
            .as_ref()
            .map(|names| old_ids.iter().map(|&v| names[v as usize].clone()).collect());
        let labels = self.labels.as_ref().map(|l| Labels {
            class_of: old_ids.iter().map(|&v| l.class_of[v as usize]).collect(),
            class_names: l.class_names.clone(),
        });
        Hypergraph { n: old_ids.len(), edges, names, labels }
    }

    /// Structural equality ignoring reward tables.
    pub fn same_structure(&self, other: &Self) -> bool {
        self.n == other.n
            && self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .zip(&other.edges)
                .all(|(a, b)| a.nodes == b.nodes && a.weight == b.weight)
            && self.names == other.names
            && self.labels == other.labels
    }
}

/// Edge-composition statistics of a node set.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SubsetStats {
    pub size: usize,
    /// Edges with `e ⊆ S`.
    pub contained: usize,
    /// Edges with `|e ∩ S| ≥ 2`.
    pub atleast_two: usize,
    /// Edges with `|e ∩ S| ≥ ⌈|e|/2⌉`.
    pub atleast_half: usize,
    /// Edges with `|e ∩ S| ≥ |e| − 1`.
    pub all_but_one: usize,
    pub density: f64,
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let p = self.parent[v as usize];
            self.parent[v as usize] = self.parent[p as usize];
            v = p;
        }
        v
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb) as usize] = ra.min(rb);
        }
    }
}

/// Non-fatal oddities seen while parsing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseWarnings {
    /// Node tokens repeated within a single line (collapsed).
    pub duplicate_tokens: usize,
    /// Label lines naming tokens absent from the edge file.
    pub unknown_label_tokens: usize,
}

/// Parses the edge-list format: one edge per line, comma-separated node
/// tokens, optional `| weight` suffix, `#` comment lines. Tokens are interned
/// to ids in first-appearance order.
///
/// The optional label text has lines `token,class`; when given, every node
/// must be labelled.
pub fn parse_hypergraph(
    edge_text: &str,
    label_text: Option<&str>,
) -> Result<(Hypergraph, ParseWarnings)> {
    let mut warnings = ParseWarnings::default();
    let mut ids: HashMap<String, u32> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (idx, raw) in edge_text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let (members, weight) = match line.split_once('|') {
            Some((members, w)) => {
                let w = w.trim();
                let weight: f64 = w.parse().map_err(|_| err(format!("bad weight `{w}`")))?;
                if !weight.is_finite() {
                    return Err(err(format!("weight `{w}` is not finite")));
                }
                if weight < 0.0 {
                    return Err(err(format!("negative weight {weight}")));
                }
                (members, weight)
            }
            None => (line, 1.0),
        };
        let mut nodes = Vec::new();
        for tok in members.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                return Err(err("empty node token".into()));
            }
            let id = *ids.entry(tok.to_string()).or_insert_with(|| {
                names.push(tok.to_string());
                (names.len() - 1) as u32
            });
            nodes.push(id);
        }
        let before = nodes.len();
        nodes.sort_unstable();
        nodes.dedup();
        warnings.duplicate_tokens += before - nodes.len();
        edges.push(Hyperedge::new(nodes, weight));
    }
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = names.len();
    let mut h = Hypergraph::new(n, edges)?;
    if let Some(text) = label_text {
        let mut class_of = vec![u32::MAX; n];
        let mut class_names: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (tok, class) = line.rsplit_once(',').ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: "expected `token,class`".into(),
            })?;
            let (tok, class) = (tok.trim(), class.trim());
            let Some(&v) = ids.get(tok) else {
                warnings.unknown_label_tokens += 1;
                continue;
            };
            let cid = match class_names.iter().position(|c| c == class) {
                Some(c) => c as u32,
                None => {
                    class_names.push(class.to_string());
                    (class_names.len() - 1) as u32
                }
            };
            class_of[v as usize] = cid;
        }
        if let Some(v) = class_of.iter().position(|&c| c == u32::MAX) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("node `{}` has no label", names[v]),
            });
        }
        h = h.with_labels(Labels { class_of, class_names });
    }
    Ok((h.with_names(names), warnings))
}
