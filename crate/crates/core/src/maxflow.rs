//! Dinic's maximum flow on integer capacities.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct MaxFlow {
    adj: Vec<Vec<u32>>,
    to: Vec<u32>,
    cap: Vec<i128>,
    original: Vec<i128>,
}

impl MaxFlow {
    pub fn new(n: usize) -> Self {
        MaxFlow { adj: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new(), original: Vec::new() }
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Adds arc `u → v`; returns its index. Arc `i ^ 1` is the reverse arc.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: i128) -> usize {
        assert!(cap >= 0, "capacity must be nonnegative");
        let id = self.to.len();
        self.to.push(v as u32);
        self.cap.push(cap);
        self.original.push(cap);
        self.adj[u].push(id as u32);
        self.to.push(u as u32);
        self.cap.push(0);
        self.original.push(0);
        self.adj[v].push(id as u32 + 1);
        id
    }

    /// Forward arcs as `(from, to, capacity)`.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, i128)> + '_ {
        (0..self.to.len()).step_by(2).map(move |e| {
            (self.to[e + 1] as usize, self.to[e] as usize, self.original[e])
        })
    }

    fn bfs(&self, s: usize, t: usize, level: &mut [i32]) -> bool {
        level.fill(-1);
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e as usize] as usize;
                if self.cap[e as usize] > 0 && level[v] < 0 {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level[t] >= 0
    }

    /// Sends a blocking flow along the level graph with an explicit path
    /// stack.
    fn blocking_flow(&mut self, s: usize, t: usize, level: &mut [i32], it: &mut [usize]) -> Result<i128> {
        let mut total: i128 = 0;
        let mut path: Vec<u32> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let push = path
                    .iter()
                    .map(|&e| self.cap[e as usize])
                    .min()
                    .expect("path to sink is nonempty");
                for &e in &path {
                    self.cap[e as usize] -= push;
                    self.cap[(e ^ 1) as usize] += push;
                }
                total = total
                    .checked_add(push)
                    .ok_or_else(|| Error::CapacityOverflow("total flow exceeds 128 bits".into()))?;
                path.clear();
                u = s;
                continue;
            }
            let mut advanced = false;
            while it[u] < self.adj[u].len() {
                let e = self.adj[u][it[u]];
                let v = self.to[e as usize] as usize;
                if self.cap[e as usize] > 0 && level[v] == level[u] + 1 {
                    path.push(e);
                    u = v;
                    advanced = true;
                    break;
                }
                it[u] += 1;
            }
            if advanced {
                continue;
            }
            level[u] = -1;
            match path.pop() {
                Some(e) => {
                    u = self.to[(e ^ 1) as usize] as usize;
                    it[u] += 1;
                }
                None => return Ok(total),
            }
        }
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> Result<i128> {
        let n = self.adj.len();
        let mut level = vec![-1i32; n];
        let mut it = vec![0usize; n];
        let mut total: i128 = 0;
        while self.bfs(s, t, &mut level) {
            it.fill(0);
            let pushed = self.blocking_flow(s, t, &mut level, &mut it)?;
            total = total
                .checked_add(pushed)
                .ok_or_else(|| Error::CapacityOverflow("total flow exceeds 128 bits".into()))?;
        }
        Ok(total)
    }

    /// After `max_flow`, the vertices that can still reach `t` in the
    /// residual graph. Their complement is the largest source side of a
    /// minimum cut.
    pub fn reaches_sink(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(w) = queue.pop_front() {
            for &e in &self.adj[w] {
                let u = self.to[e as usize] as usize;
                if !seen[u] && self.cap[(e ^ 1) as usize] > 0 {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        let mut g = MaxFlow::new(6);
        for (u, v, c) in [(0, 1, 10), (0, 2, 10), (1, 3, 4), (1, 4, 8), (2, 4, 9), (3, 5, 10), (4, 3, 6), (4, 5, 10)] {
            g.add_edge(u, v, c);
        }
        assert_eq!(g.max_flow(0, 5).unwrap(), 19);
        let sink_side = g.reaches_sink(5);
        assert!(!sink_side[0]);
        let cut: i128 = g
            .arcs()
            .filter(|&(u, v, _)| !sink_side[u] && sink_side[v])
            .map(|(_, _, c)| c)
            .sum();
        assert_eq!(cut, 19);
    }

    #[test]
    fn disconnected() {
        let mut g = MaxFlow::new(4);
        g.add_edge(0, 1, 10);
        g.add_edge(2, 3, 5);
        assert_eq!(g.max_flow(0, 3).unwrap(), 0);
    }

    #[test]
    fn zero_capacity_edges_leave_vertices_on_source_side() {
        let mut g = MaxFlow::new(3);
        g.add_edge(0, 1, 5);
        g.add_edge(1, 2, 0);
        assert_eq!(g.max_flow(0, 2).unwrap(), 0);
        assert_eq!(g.reaches_sink(2), vec![false, false, true]);
    }

    #[test]
    fn long_chain_does_not_recurse() {
        let n = 200_000;
        let mut g = MaxFlow::new(n);
        for i in 0..n - 1 {
            g.add_edge(i, i + 1, 3);
        }
        assert_eq!(g.max_flow(0, n - 1).unwrap(), 3);
    }

    #[test]
    fn overflow_is_reported() {
        let mut g = MaxFlow::new(3);
        g.add_edge(0, 2, i128::MAX);
        g.add_edge(0, 1, i128::MAX);
        g.add_edge(1, 2, i128::MAX);
        assert!(matches!(g.max_flow(0, 2), Err(Error::CapacityOverflow(_))));
    }
}
