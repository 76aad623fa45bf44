//! Random instances and independent reference implementations shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use densub::hypergraph::{Hyperedge, Hypergraph, Labels};
use densub::rational::Rational;
use densub::rewards::{Reward, RewardTable};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// How the reward tables of a random instance are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Builtin(Reward),
    /// One random monotone table per edge, values in eighths.
    Monotone,
    /// One random convex table per edge, increments in quarters.
    Convex,
}

pub const FAMILIES: [Family; 8] = [
    Family::Builtin(Reward::AtleastTwo),
    Family::Builtin(Reward::AtleastHalf),
    Family::Builtin(Reward::AllButOne),
    Family::Builtin(Reward::Standard),
    Family::Builtin(Reward::Quadratic),
    Family::Builtin(Reward::SquareRoot),
    Family::Monotone,
    Family::Convex,
];

pub fn random_monotone(rng: &mut impl Rng, m: usize) -> RewardTable {
    let mut acc = 0i64;
    let mut vals = vec![q(0, 1)];
    for _ in 0..m {
        acc += rng.gen_range(0..=4);
        vals.push(q(acc, 8));
    }
    RewardTable::from_rationals(vals).unwrap()
}

pub fn random_convex(rng: &mut impl Rng, m: usize) -> RewardTable {
    let mut delta = rng.gen_range(0..=1i64);
    let mut acc = 0i64;
    let mut vals = vec![q(0, 1)];
    for _ in 0..m {
        acc += delta;
        vals.push(q(acc, 4));
        delta += rng.gen_range(0..=2);
    }
    RewardTable::from_rationals(vals).unwrap()
}

/// A random monotone table with arbitrary small denominators.
pub fn random_rational_table(rng: &mut impl Rng, m: usize) -> RewardTable {
    let mut acc = q(0, 1);
    let mut vals = vec![acc.clone()];
    for _ in 0..m {
        if rng.gen_bool(0.7) {
            acc += q(rng.gen_range(0..=6), rng.gen_range(1..=7));
        }
        vals.push(acc.clone());
    }
    RewardTable::from_rationals(vals).unwrap()
}

const WEIGHTS: [f64; 6] = [1.0, 1.0, 1.0, 2.0, 0.5, 1.5];

/// A random instance with `n ≤ max_n` nodes, at most `max_m` edges of size
/// between 2 and `max_k`.
pub fn random_instance(rng: &mut impl Rng, max_n: usize, max_m: usize, max_k: usize, family: Family) -> Hypergraph {
    let n = rng.gen_range(2..=max_n);
    let m = rng.gen_range(1..=max_m);
    let kmax = max_k.min(n);
    let nodes: Vec<u32> = (0..n as u32).collect();
    let mut cache: BTreeMap<usize, Arc<RewardTable>> = BTreeMap::new();
    let edges = (0..m)
        .map(|_| {
            let size = rng.gen_range(2..=kmax);
            let members: Vec<u32> = nodes.choose_multiple(rng, size).copied().collect();
            let w = *WEIGHTS.choose(rng).unwrap();
            let table = match family {
                Family::Builtin(r) => cache.entry(size).or_insert_with(|| Arc::new(r.table(size))).clone(),
                Family::Monotone => Arc::new(random_monotone(rng, size)),
                Family::Convex => Arc::new(random_convex(rng, size)),
            };
            Hyperedge::new(members, w).with_reward(table)
        })
        .collect();
    Hypergraph::new(n, edges).unwrap()
}

pub fn two_class_labels(rng: &mut impl Rng, n: usize) -> Labels {
    let mut class_of: Vec<u32> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    // Both classes nonempty.
    class_of[0] = 0;
    class_of[n - 1] = 1;
    Labels { class_of, class_names: vec!["red".into(), "blue".into()] }
}

pub fn table(e: &Hyperedge) -> &RewardTable {
    e.reward().expect("rewards attached")
}

pub fn is_convex_instance(h: &Hypergraph) -> bool {
    h.edges().iter().all(|e| table(e).is_convex())
}

/// `f` of the node set encoded by `mask`, evaluated straight from the
/// definition.
pub fn f_mask(h: &Hypergraph, mask: u64) -> f64 {
    h.edges()
        .iter()
        .map(|e| {
            let c = e.nodes().iter().filter(|&&v| mask >> v & 1 == 1).count();
            e.weight() * table(e).get(c)
        })
        .sum()
}

pub fn f_exact(h: &Hypergraph, set: &[u32]) -> Rational {
    h.edges()
        .iter()
        .map(|e| {
            let c = e.nodes().iter().filter(|v| set.contains(v)).count();
            Rational::from_float(e.weight()).unwrap() * &table(e).exact()[c]
        })
        .sum()
}

pub fn mask_set(mask: u64) -> Vec<u32> {
    (0..64).filter(|&v| mask >> v & 1 == 1).collect()
}

/// Largest Γ over nonempty subsets accepted by `keep`.
pub fn best_density_where(h: &Hypergraph, keep: impl Fn(u64) -> bool) -> f64 {
    let n = h.num_nodes();
    (1u64..1 << n)
        .filter(|&m| keep(m))
        .map(|m| f_mask(h, m) / m.count_ones() as f64)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn opt_unconstrained(h: &Hypergraph) -> f64 {
    best_density_where(h, |_| true)
}

pub fn opt_card(h: &Hypergraph, ell: usize) -> f64 {
    best_density_where(h, |m| m.count_ones() as usize >= ell)
}

pub fn opt_fair(h: &Hypergraph, labels: &Labels, ell: &[usize]) -> f64 {
    best_density_where(h, |m| {
        ell.iter().enumerate().all(|(c, &need)| {
            mask_set(m).iter().filter(|&&v| labels.class_of[v as usize] as usize == c).count() >= need
        })
    })
}

/// Largest `f(S) − α|S|` over nonempty subsets, in exact arithmetic.
pub fn max_margin_exact(h: &Hypergraph, alpha: &Rational) -> Rational {
    let n = h.num_nodes();
    (1u64..1 << n)
        .map(|m| {
            let set = mask_set(m);
            f_exact(h, &set) - alpha * Rational::from_integer(BigInt::from(set.len()))
        })
        .max()
        .unwrap()
}

/// Bound values straight from their definitions.
pub fn reference_bound(t: &RewardTable, kind: &str) -> Vec<f64> {
    let r = t.values();
    let m = t.edge_size();
    match kind {
        "zero" => vec![0.0; m],
        "greedy" => r[..m].to_vec(),
        "max" => (0..m)
            .map(|i| {
                let big = (0..=i).map(|j| r[j + 1] - r[j]).fold(f64::NEG_INFINITY, f64::max);
                r[i + 1] - big
            })
            .collect(),
        _ => panic!("unknown bound {kind}"),
    }
}

/// Peeling with every score recomputed from scratch each round. Returns the
/// removal order and the best set.
pub fn reference_peel(h: &Hypergraph, kind: &str) -> (Vec<u32>, Vec<u32>, f64) {
    let n = h.num_nodes();
    let bounds: Vec<Vec<f64>> = h.edges().iter().map(|e| reference_bound(table(e), kind)).collect();
    let mut alive: u64 = (1u64 << n) - 1;
    let mut best = alive;
    let mut best_d = f_mask(h, alive) / n as f64;
    let mut order = Vec::new();
    while alive != 0 {
        let mut pick: Option<(u32, f64)> = None;
        for u in 0..n as u32 {
            if alive >> u & 1 == 0 {
                continue;
            }
            let score: f64 = h
                .edges()
                .iter()
                .zip(&bounds)
                .filter(|(e, _)| e.nodes().contains(&u))
                .map(|(e, s)| {
                    let c = e.nodes().iter().filter(|&&v| alive >> v & 1 == 1).count();
                    e.weight() * (table(e).get(c) - s[c - 1])
                })
                .sum();
            if pick.is_none_or(|(_, b)| score < b) {
                pick = Some((u, score));
            }
        }
        let (u, _) = pick.unwrap();
        alive &= !(1 << u);
        order.push(u);
        if alive != 0 {
            let d = f_mask(h, alive) / alive.count_ones() as f64;
            if d >= best_d {
                best = alive;
                best_d = d;
            }
        }
    }
    (order, mask_set(best), best_d)
}

/// The hull by repeatedly taking the smallest slope from the last
/// breakpoint, with ties to the farthest point.
pub fn slope_walk_hull(t: &RewardTable) -> (Vec<Rational>, Vec<usize>) {
    let r = t.exact();
    let m = t.edge_size();
    let mut breaks = vec![0usize];
    let mut hull = vec![r[0].clone()];
    let mut at = 0;
    while at < m {
        let mut best: Option<(usize, Rational)> = None;
        for j in at + 1..=m {
            let slope = (&r[j] - &r[at]) / Rational::from_integer(BigInt::from(j - at));
            if best.as_ref().is_none_or(|(_, b)| slope <= *b) {
                best = Some((j, slope));
            }
        }
        let (j, slope) = best.unwrap();
        for x in at + 1..=j {
            hull.push(&r[at] + &slope * Rational::from_integer(BigInt::from(x - at)));
        }
        breaks.push(j);
        at = j;
    }
    (hull, breaks)
}

/// The hull as the pointwise minimum over all chords spanning each point.
pub fn chord_hull(t: &RewardTable) -> Vec<Rational> {
    let r = t.exact();
    let m = t.edge_size();
    (0..=m)
        .map(|x| {
            let mut best = r[x].clone();
            for a in 0..=x {
                for b in x..=m {
                    if a < b {
                        let v = &r[a]
                            + (&r[b] - &r[a]) * Rational::new(BigInt::from(x - a), BigInt::from(b - a));
                        if v < best {
                            best = v;
                        }
                    }
                }
            }
            best
        })
        .collect()
}

/// A parsed LP file: objective terms, rows `(terms, sense, rhs)`, binaries.
#[derive(Debug, Default)]
pub struct LpModel {
    pub objective: BTreeMap<String, f64>,
    pub rows: BTreeMap<String, (BTreeMap<String, f64>, String, f64)>,
    pub binaries: Vec<String>,
}

/// A minimal reader for the LP subset the exporter writes.
pub fn parse_lp(text: &str) -> LpModel {
    let mut model = LpModel::default();
    let mut section = "";
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('\\') || line.is_empty() {
            continue;
        }
        match line {
            "Maximize" | "Subject To" | "Binary" | "End" => {
                section = match line {
                    "Maximize" => "obj",
                    "Subject To" => "rows",
                    "Binary" => "bin",
                    _ => "",
                };
                continue;
            }
            _ => {}
        }
        let tokens: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if section == "bin" {
            model.binaries.extend(tokens);
            continue;
        }
        for tok in tokens {
            if let Some(name) = tok.strip_suffix(':') {
                rows.push((format!("{section}:{name}"), Vec::new()));
            } else {
                rows.last_mut().expect("row label first").1.push(tok);
            }
        }
    }
    for (label, tokens) in rows {
        let (section, name) = label.split_once(':').unwrap();
        let mut terms = BTreeMap::new();
        let mut sign = 1.0;
        let mut coef: Option<f64> = None;
        let mut sense = String::new();
        let mut rhs = 0.0;
        let mut i = 0;
        while i < tokens.len() {
            let t = tokens[i].as_str();
            match t {
                "+" => sign = 1.0,
                "-" => sign = -1.0,
                "<=" | ">=" | "=" => {
                    sense = t.to_string();
                    rhs = tokens[i + 1].parse().unwrap();
                    i += 1;
                }
                _ => match t.parse::<f64>() {
                    Ok(c) => coef = Some(c),
                    Err(_) => {
                        *terms.entry(t.to_string()).or_insert(0.0) += sign * coef.unwrap_or(1.0);
                        sign = 1.0;
                        coef = None;
                    }
                },
            }
            i += 1;
        }
        if section == "obj" {
            model.objective = terms;
        } else {
            model.rows.insert(name.to_string(), (terms, sense, rhs));
        }
    }
    model
}
