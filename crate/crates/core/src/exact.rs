//! Exhaustive search, the decision ILP exporter and the iterative
//! improvement loop shared by every exact decision procedure.

use std::cmp::Ordering;
use std::io::Write;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rational::{self, Rational};
use crate::scaled::ScaledRewards;

pub const DEFAULT_MAX_N: usize = 20;

/// Hard ceiling for subset enumeration regardless of the requested limit.
const MASK_BITS: usize = 40;

/// How often the floating-point enumeration recomputes `f` from scratch.
const RESYNC_PERIOD: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub set: Vec<u32>,
    pub density: f64,
    /// The optimum as a fraction when every table is exactly representable.
    pub exact: Option<Rational>,
}

fn mask_to_set(mask: u64) -> Vec<u32> {
    (0..64).filter(|&v| mask >> v & 1 == 1).collect()
}

/// True when `a` precedes `b` as sorted id sequences.
fn lex_less(a: u64, b: u64) -> bool {
    if a == b {
        return false;
    }
    let x = (a ^ b).trailing_zeros();
    let (with_x, other) = if a >> x & 1 == 1 { (a, b) } else { (b, a) };
    let other_smaller = (other >> x) >> 1 == 0;
    (with_x == a) != other_smaller
}

fn check_size(h: &Hypergraph, max_n: usize) -> Result<()> {
    h.require_rewards()?;
    let n = h.num_nodes();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let max = max_n.min(MASK_BITS);
    if n > max {
        return Err(Error::TooLarge { n, max });
    }
    Ok(())
}

/// Walks all nonempty subsets in Gray-code order. Callers keep the per-edge
/// intersection counts in step with each flip.
struct GrayWalk<'a> {
    h: &'a Hypergraph,
    incidence: Vec<Vec<u32>>,
    counts: Vec<usize>,
    mask: u64,
    size: usize,
    step: u64,
}

impl<'a> GrayWalk<'a> {
    fn new(h: &'a Hypergraph) -> Self {
        GrayWalk {
            h,
            incidence: h.incidence(),
            counts: vec![0; h.num_edges()],
            mask: 0,
            size: 0,
            step: 0,
        }
    }

    /// Flips the next node; returns it with the sign of the change, or
    /// `None` when every subset has been seen.
    fn advance(&mut self) -> Option<(usize, bool)> {
        self.step += 1;
        if self.step >> self.h.num_nodes() != 0 {
            return None;
        }
        let v = self.step.trailing_zeros() as usize;
        self.mask ^= 1 << v;
        let added = self.mask >> v & 1 == 1;
        if added {
            self.size += 1;
        } else {
            self.size -= 1;
        }
        Some((v, added))
    }
}

/// Exhaustive maximisation of Γ. Ties go to the lexicographically smallest
/// set. Fails with [`Error::TooLarge`] when `n > max_n`.
pub fn brute_force(h: &Hypergraph, max_n: usize) -> Result<BruteForceResult> {
    check_size(h, max_n)?;
    let faithful = h.tables().all(|t| t.is_faithful());
    if faithful {
        match ScaledRewards::new(h) {
            Ok(scaled) => return brute_force_scaled(h, &scaled),
            Err(Error::CapacityOverflow(_)) => {}
            Err(e) => return Err(e),
        }
    }
    brute_force_float(h)
}

fn brute_force_scaled(h: &Hypergraph, scaled: &ScaledRewards) -> Result<BruteForceResult> {
    let mut walk = GrayWalk::new(h);
    let mut f: i128 = scaled.tables.iter().map(|t| t[0]).sum();
    let (mut best_mask, mut best_f, mut best_size) = (0u64, 0i128, 0usize);
    while let Some((v, added)) = walk.advance() {
        for &e in &walk.incidence[v] {
            let e = e as usize;
            let t = &scaled.tables[e];
            let c = walk.counts[e];
            let next = if added { c + 1 } else { c - 1 };
            f += t[next] - t[c];
            walk.counts[e] = next;
        }
        let better = if best_size == 0 {
            true
        } else {
            match compare_ratio(f, walk.size, best_f, best_size) {
                Ordering::Greater => true,
                Ordering::Equal => lex_less(walk.mask, best_mask),
                Ordering::Less => false,
            }
        };
        if better {
            best_mask = walk.mask;
            best_f = f;
            best_size = walk.size;
        }
    }
    let exact = scaled.density(best_f, best_size);
    Ok(BruteForceResult {
        set: mask_to_set(best_mask),
        density: rational::to_f64(&exact),
        exact: Some(exact),
    })
}

/// Compares `a / sa` with `b / sb` for positive sizes without overflow.
fn compare_ratio(a: i128, sa: usize, b: i128, sb: usize) -> Ordering {
    match (a.checked_mul(sb as i128), b.checked_mul(sa as i128)) {
        (Some(x), Some(y)) => x.cmp(&y),
        _ => (BigInt::from(a) * BigInt::from(sb)).cmp(&(BigInt::from(b) * BigInt::from(sa))),
    }
}

fn brute_force_float(h: &Hypergraph) -> Result<BruteForceResult> {
    let mut walk = GrayWalk::new(h);
    let edges = h.edges();
    let mut f: f64 = edges.iter().map(|e| e.value(0)).sum();
    let (mut best_mask, mut best_density) = (0u64, 0.0);
    while let Some((v, added)) = walk.advance() {
        for &e in &walk.incidence[v] {
            let e = e as usize;
            let c = walk.counts[e];
            let next = if added { c + 1 } else { c - 1 };
            f += edges[e].value(next) - edges[e].value(c);
            walk.counts[e] = next;
        }
        if walk.step.is_multiple_of(RESYNC_PERIOD) {
            f = edges.iter().zip(&walk.counts).map(|(e, &c)| e.value(c)).sum();
        }
        let d = f / walk.size as f64;
        let tol = 1e-12 * d.abs().max(best_density.abs()).max(1.0);
        if best_mask == 0
            || d > best_density + tol || ((d - best_density).abs() <= tol && lex_less(walk.mask, best_mask)) {
            best_mask = walk.mask;
            best_density = d;
        }
    }
    let set = mask_to_set(best_mask);
    let density = h.density(&set)?;
    Ok(BruteForceResult { set, density, exact: None })
}

/// `max f(S) − α|S|` over nonempty `S` with `α = a / b` in scaled units,
/// returned as the lexicographically smallest maximiser and its margin
/// `b·F(S) − a·|S|`.
fn best_margin(h: &Hypergraph, scaled: &ScaledRewards, a: &BigInt, b: &BigInt) -> (u64, BigInt) {
    let small = rational::to_i128(a).zip(rational::to_i128(b));
    let mut walk = GrayWalk::new(h);
    let mut f: i128 = scaled.tables.iter().map(|t| t[0]).sum();
    let mut best: Option<(u64, BigInt)> = None;
    while let Some((v, added)) = walk.advance() {
        for &e in &walk.incidence[v] {
            let e = e as usize;
            let t = &scaled.tables[e];
            let c = walk.counts[e];
            let next = if added { c + 1 } else { c - 1 };
            f += t[next] - t[c];
            walk.counts[e] = next;
        }
        let size = walk.size as i128;
        let margin = small
            .and_then(|(a, b)| f.checked_mul(b)?.checked_sub(a.checked_mul(size)?))
            .map(BigInt::from)
            .unwrap_or_else(|| BigInt::from(f) * b - a * BigInt::from(size));
        let better = match &best {
            None => true,
            Some((m, bm)) => margin > *bm || (margin == *bm && lex_less(walk.mask, *m)),
        };
        if better {
            best = Some((walk.mask, margin));
        }
    }
    best.expect("at least one nonempty subset")
}

/// Answers "is there a nonempty `S` with `f(S) − α|S| > 0`?", returning a
/// witness when there is.
pub trait DecisionOracle {
    fn improve(&mut self, h: &Hypergraph, alpha: &Rational) -> Result<Option<Vec<u32>>>;

    /// Γ(S) as a fraction in the oracle's own arithmetic.
    fn exact_density(&self, h: &Hypergraph, set: &[u32]) -> Result<Rational>;
}

/// Exhaustive decision procedure over the exact tables.
pub struct BruteForceOracle {
    scaled: ScaledRewards,
}

impl BruteForceOracle {
    pub fn new(h: &Hypergraph, max_n: usize) -> Result<Self> {
        check_size(h, max_n)?;
        Ok(BruteForceOracle { scaled: ScaledRewards::new(h)? })
    }
}

impl DecisionOracle for BruteForceOracle {
    fn improve(&mut self, h: &Hypergraph, alpha: &Rational) -> Result<Option<Vec<u32>>> {
        if alpha.is_negative() {
            return Err(Error::OutOfRange("alpha must be nonnegative".into()));
        }
        let scaled_alpha = alpha * Rational::from_integer(self.scaled.scale.clone());
        let (mask, margin) = best_margin(h, &self.scaled, scaled_alpha.numer(), scaled_alpha.denom());
        Ok(if margin.is_positive() { Some(mask_to_set(mask)) } else { None })
    }

    fn exact_density(&self, h: &Hypergraph, set: &[u32]) -> Result<Rational> {
        let mask = h.membership(set)?;
        let size = mask.iter().filter(|&&b| b).count();
        Ok(self.scaled.density(self.scaled.value(h, &mask)?, size))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub set: Vec<u32>,
    pub density: Rational,
    /// Oracle calls made, including the final one that found no improvement.
    pub iterations: usize,
}

/// Starts from `V` and re-asks the oracle at the current density until it
/// finds nothing better. Each answer strictly raises the density, so the
/// final set is a global maximiser.
pub fn exact_loop_via(oracle: &mut dyn DecisionOracle, h: &Hypergraph) -> Result<ExactSolution> {
    h.require_rewards()?;
    if h.num_nodes() == 0 {
        return Err(Error::EmptyInput);
    }
    let mut set: Vec<u32> = (0..h.num_nodes() as u32).collect();
    let mut alpha = oracle.exact_density(h, &set)?;
    let mut iterations = 0;
    loop {
        iterations += 1;
        match oracle.improve(h, &alpha)? {
            None if alpha.is_zero() => return Err(Error::ZeroReward),
            None => return Ok(ExactSolution { set, density: alpha, iterations }),
            Some(next) => {
                let d = oracle.exact_density(h, &next)?;
                if d <= alpha {
                    return Err(Error::OracleNoProgress);
                }
                set = next;
                alpha = d;
            }
        }
    }
}

/// Counts of what [`write_ilp`] emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IlpSummary {
    pub variables: usize,
    pub constraints: usize,
    pub objective_terms: usize,
}

/// Terms per output line in long expressions.
const TERMS_PER_LINE: usize = 8;

fn write_terms<W: Write>(out: &mut W, head: &str, terms: &[String]) -> std::io::Result<()> {
    write!(out, " {head}")?;
    for (i, t) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            write!(out, "\n   ")?;
        }
        write!(out, " {t}")?;
    }
    writeln!(out)
}

fn signed_term(first: bool, coef: f64, var: &str) -> String {
    let sign = if coef < 0.0 { "-" } else { "+" };
    let mag = coef.abs();
    let body = if mag == 1.0 { var.to_string() } else { format!("{mag} {var}") };
    if first && sign == "+" {
        body
    } else {
        format!("{sign} {body}")
    }
}

/// Writes the decision ILP in CPLEX LP format:
///
/// ```text
/// max  Σ_e w(e) Σ_i δ_e(i) y_{e,i} − α Σ_v x_v
/// s.t. i·y_{e,i} − Σ_{v∈e} x_v ≤ 0      for every edge e and 1 ≤ i ≤ |e|
///      x, y binary
/// ```
///
/// Terms with a zero coefficient are left out of the objective; every `y`
/// keeps its constraint and binary declaration.
pub fn write_ilp<W: Write>(h: &Hypergraph, alpha: f64, mut out: W) -> Result<IlpSummary> {
    h.require_rewards()?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::OutOfRange("alpha must be finite and nonnegative".into()));
    }
    let n = h.num_nodes();
    let mut objective = Vec::new();
    for (i, e) in h.edges().iter().enumerate() {
        for (t, d) in e.table().deltas().into_iter().enumerate() {
            let coef = e.weight() * d;
            if coef != 0.0 {
                objective.push(signed_term(objective.is_empty(), coef, &format!("y_{i}_{}", t + 1)));
            }
        }
    }
    if alpha != 0.0 {
        for v in 0..n {
            objective.push(signed_term(objective.is_empty(), -alpha, &format!("x_{v}")));
        }
    }
    let objective_terms = objective.len();
    if objective.is_empty() {
        objective.push("0 x_0".into());
    }

    writeln!(out, "\\ alpha = {alpha}")?;
    writeln!(out, "Maximize")?;
    write_terms(&mut out, "obj:", &objective)?;
    writeln!(out, "Subject To")?;
    let mut constraints = 0;
    for (i, e) in h.edges().iter().enumerate() {
        for t in 1..=e.len() {
            let mut terms = vec![if t == 1 { format!("y_{i}_1") } else { format!("{t} y_{i}_{t}") }];
            terms.extend(e.nodes().iter().map(|v| format!("- x_{v}")));
            terms.push("<= 0".into());
            write_terms(&mut out, &format!("c_{i}_{t}:"), &terms)?;
            constraints += 1;
        }
    }
    writeln!(out, "Binary")?;
    let mut vars: Vec<String> = (0..n).map(|v| format!("x_{v}")).collect();
    for (i, e) in h.edges().iter().enumerate() {
        vars.extend((1..=e.len()).map(|t| format!("y_{i}_{t}")));
    }
    for chunk in vars.chunks(TERMS_PER_LINE) {
        writeln!(out, " {}", chunk.join(" "))?;
    }
    writeln!(out, "End")?;
    Ok(IlpSummary { variables: vars.len(), constraints, objective_terms })
}
