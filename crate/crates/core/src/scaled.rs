//! Weighted reward tables scaled to a common integer denominator.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rational::{self, Rational};
use crate::rewards::RewardTable;

/// `tables[e][c] = L · w(e) · r_e(c)` as integers, for the least common
/// multiple `L` of all denominators.
#[derive(Debug, Clone)]
pub struct ScaledRewards {
    pub tables: Vec<Arc<[i128]>>,
    pub scale: BigInt,
}

impl ScaledRewards {
    pub fn new(h: &Hypergraph) -> Result<Self> {
        h.require_rewards()?;
        let mut folded: HashMap<(*const RewardTable, u64), Arc<Vec<Rational>>> = HashMap::new();
        let per_edge: Vec<Arc<Vec<Rational>>> = h
            .edges()
            .iter()
            .map(|e| {
                let t = e.reward().expect("checked");
                folded
                    .entry((Arc::as_ptr(t), e.weight().to_bits()))
                    .or_insert_with(|| {
                        let w = rational::from_f64(e.weight());
                        Arc::new(t.exact().iter().map(|v| &w * v).collect())
                    })
                    .clone()
            })
            .collect();
        let scale = rational::lcm_of_denominators(folded.values().flat_map(|t| t.iter()));
        let l = Rational::from_integer(scale.clone());
        let mut ints: HashMap<*const Vec<Rational>, Arc<[i128]>> = HashMap::new();
        let mut tables = Vec::with_capacity(per_edge.len());
        for t in &per_edge {
            let entry = match ints.get(&Arc::as_ptr(t)) {
                Some(v) => v.clone(),
                None => {
                    let v: Arc<[i128]> = t
                        .iter()
                        .map(|x| rational::integral_i128(&(x * &l), "scaled reward"))
                        .collect::<Result<Vec<_>>>()?
                        .into();
                    ints.insert(Arc::as_ptr(t), v.clone());
                    v
                }
            };
            tables.push(entry);
        }
        Ok(ScaledRewards { tables, scale })
    }

    /// Scaled `f(S)` for a membership mask.
    pub fn value(&self, h: &Hypergraph, mask: &[bool]) -> Result<i128> {
        let mut total: i128 = 0;
        for (e, t) in h.edges().iter().zip(&self.tables) {
            let c = e.nodes().iter().filter(|&&v| mask[v as usize]).count();
            total = total.checked_add(t[c]).ok_or_else(overflow)?;
        }
        Ok(total)
    }

    /// The true density `F / (size · L)`.
    pub fn density(&self, scaled_value: i128, size: usize) -> Rational {
        if size == 0 {
            return Rational::from_integer(BigInt::from(0));
        }
        Rational::new(BigInt::from(scaled_value), BigInt::from(size) * &self.scale)
    }
}

pub(crate) fn overflow() -> Error {
    Error::CapacityOverflow(
        "scaled rewards exceed 128 bits; reduce the denominator precision of the rewards".into(),
    )
}
