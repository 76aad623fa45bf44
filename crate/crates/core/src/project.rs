//! Projection of reward tables onto their lower convex hull.
//!
//! The hull `r̂` is the pointwise largest convex minorant of `r` on
//! `{0, …, m}`. Since `r̂ ≤ r ≤ ρ·r̂` with `ρ = max_i r(i)/r̂(i) ≤ m`, any
//! `β`-approximation for the hull rewards is a `β/ρ`-approximation for the
//! original ones.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::hypergraph::Hypergraph;
use crate::rational::{self, Rational};
use crate::rewards::RewardTable;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexProjection {
    /// `r̂(0..=m)`.
    pub hull: Vec<Rational>,
    /// Hull vertices `0 = t_0 < … < t_last = m`; collinear points are dropped.
    pub breakpoints: Vec<usize>,
    /// `max_{i: r(i) > 0} r(i) / r̂(i)`, or 1 when `r` is identically zero.
    pub rho: Rational,
}

impl ConvexProjection {
    pub fn table(&self) -> RewardTable {
        RewardTable::from_rationals(self.hull.clone()).expect("hull is a valid reward table")
    }

    pub fn rho_f64(&self) -> f64 {
        rational::to_f64(&self.rho)
    }
}

fn int(i: usize) -> Rational {
    Rational::from_integer(BigInt::from(i))
}

/// `(b − a) × (c − a)` for points `(x, r(x))`.
fn cross(r: &[Rational], a: usize, b: usize, c: usize) -> Rational {
    int(b - a) * (&r[c] - &r[a]) - (&r[b] - &r[a]) * int(c - a)
}

/// Lower convex hull by a monotone-chain scan over the exact table. Points on
/// a hull segment are not kept as breakpoints, which matches taking the
/// farthest point among equal minimum slopes.
pub fn lower_convex_hull(t: &RewardTable) -> ConvexProjection {
    let r = t.exact();
    let m = t.edge_size();
    let mut stack: Vec<usize> = Vec::with_capacity(m + 1);
    for x in 0..=m {
        while stack.len() >= 2 {
            let (a, b) = (stack[stack.len() - 2], stack[stack.len() - 1]);
            if cross(r, a, b, x) <= Rational::zero() {
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(x);
    }
    let mut hull = Vec::with_capacity(m + 1);
    hull.push(r[0].clone());
    for seg in stack.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let slope = (&r[b] - &r[a]) / int(b - a);
        for x in a + 1..=b {
            hull.push(&r[a] + &slope * int(x - a));
        }
    }
    let rho = ratio(r, &hull);
    ConvexProjection { hull, breakpoints: stack, rho }
}

fn ratio(r: &[Rational], hull: &[Rational]) -> Rational {
    r.iter()
        .zip(hull)
        .filter(|(ri, _)| !ri.is_zero())
        .map(|(ri, hi)| ri / hi)
        .fold(Rational::one(), |acc, x| if x > acc { x } else { acc })
}

/// `max_i r(i) / r̂(i)` over entries with `r(i) > 0`.
pub fn approx_ratio(t: &RewardTable, projection: &ConvexProjection) -> Rational {
    ratio(t.exact(), &projection.hull)
}

/// Replaces every edge's table by its hull. Returns the projected hypergraph
/// and the largest per-edge ratio `ρ`.
pub fn project_hypergraph(h: &Hypergraph) -> crate::Result<(Hypergraph, Rational)> {
    h.require_rewards()?;
    let mut memo: HashMap<*const RewardTable, (Arc<RewardTable>, Rational)> = HashMap::new();
    let mut rho = Rational::one();
    let projected = h.map_rewards(|_, e| {
        let t = e.reward().expect("checked");
        let (table, r) = memo.entry(Arc::as_ptr(t)).or_insert_with(|| {
            let p = lower_convex_hull(t);
            let rho = p.rho.clone();
            (Arc::new(p.table()), rho)
        });
        if *r > rho {
            rho = r.clone();
        }
        table.clone()
    });
    Ok((projected, rho))
}
