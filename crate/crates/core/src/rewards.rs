//! Per-edge reward tables `r(0..=m)` and the built-in reward families.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Denominator used to snap irrational built-in rewards to exact rationals.
pub const SNAP_DENOMINATOR: u64 = 1_000_000;

/// A monotone reward table indexed by the number of edge members inside a set.
///
/// The table keeps two views of the same function: `values` (binary64, used by
/// the peeling and evaluation code) and `exact` (rationals, used by the hull,
/// flow and exact solvers). For rational rewards the two agree; irrational
/// rewards carry a snapped exact view.
#[derive(Debug, Clone)]
pub struct RewardTable {
    values: Vec<f64>,
    exact: Vec<Rational>,
    faithful: bool,
}

impl PartialEq for RewardTable {
    fn eq(&self, other: &Self) -> bool {
        self.exact == other.exact && self.values == other.values
    }
}

/// Why a sequence of values is not a valid reward table.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Empty,
    NotFinite { index: usize },
    NonzeroAtZero { value: f64 },
    Negative { index: usize },
    Decreasing { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "table is empty"),
            Violation::NotFinite { index } => write!(f, "r({index}) is not finite"),
            Violation::NonzeroAtZero { value } => write!(f, "r(0) = {value}, expected 0"),
            Violation::Negative { index } => write!(f, "r({index}) is negative"),
            Violation::Decreasing { index } => {
                write!(f, "monotonicity violated at i={index}: r({index}) < r({})", index - 1)
            }
        }
    }
}

/// Checks `r(0) = 0`, nonnegativity and monotonicity.
pub fn validate(values: &[f64]) -> std::result::Result<(), Violation> {
    if values.is_empty() {
        return Err(Violation::Empty);
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Violation::NotFinite { index });
    }
    if values[0] != 0.0 {
        return Err(Violation::NonzeroAtZero { value: values[0] });
    }
    if let Some(index) = values.iter().position(|&v| v < 0.0) {
        return Err(Violation::Negative { index });
    }
    for i in 1..values.len() {
        if values[i] < values[i - 1] {
            return Err(Violation::Decreasing { index: i });
        }
    }
    Ok(())
}

fn validate_exact(values: &[Rational]) -> std::result::Result<(), Violation> {
    if values.is_empty() {
        return Err(Violation::Empty);
    }
    if !values[0].is_zero() {
        return Err(Violation::NonzeroAtZero { value: rational::to_f64(&values[0]) });
    }
    if let Some(index) = values.iter().position(|v| v.is_negative()) {
        return Err(Violation::Negative { index });
    }
    for i in 1..values.len() {
        if values[i] < values[i - 1] {
            return Err(Violation::Decreasing { index: i });
        }
    }
    Ok(())
}

/// Convexity of a float sequence with an absolute slack `tol` on each
/// second difference.
pub fn is_convex_values(values: &[f64], tol: f64) -> bool {
    values
        .windows(3)
        .all(|w| (w[2] - w[1]) - (w[1] - w[0]) >= -tol)
}

impl RewardTable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate(&values).map_err(|v| Error::InvalidReward(v.to_string()))?;
        let exact = values.iter().map(|&v| rational::from_f64(v)).collect();
        Ok(RewardTable { values, exact, faithful: true })
    }

    pub fn from_rationals(exact: Vec<Rational>) -> Result<Self> {
        validate_exact(&exact).map_err(|v| Error::InvalidReward(v.to_string()))?;
        let values = exact.iter().map(rational::to_f64).collect();
        Ok(RewardTable { values, exact, faithful: true })
    }

    /// A table whose float values are not exactly representable; `exact` is
    /// a snapped stand-in.
    fn approximated(values: Vec<f64>, exact: Vec<Rational>) -> Self {
        let faithful = values
            .iter()
            .zip(&exact)
            .all(|(&v, e)| rational::to_f64(e) == v);
        RewardTable { values, exact, faithful }
    }

    pub fn zeros(m: usize) -> Self {
        RewardTable {
            values: vec![0.0; m + 1],
            exact: vec![Rational::zero(); m + 1],
            faithful: true,
        }
    }

    /// The edge size `m` this table is defined for.
    pub fn edge_size(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exact(&self) -> &[Rational] {
        &self.exact
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// True when the exact view equals the float view entry by entry.
    pub fn is_faithful(&self) -> bool {
        self.faithful
    }

    /// `δ(i) = r(i) − r(i−1)` for `i = 1..=m`.
    pub fn deltas(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn exact_deltas(&self) -> Vec<Rational> {
        self.exact.windows(2).map(|w| &w[1] - &w[0]).collect()
    }

    /// Exact convexity of the rational view.
    pub fn is_convex(&self) -> bool {
        self.exact
            .windows(3)
            .all(|w| &w[2] - &w[1] >= &w[1] - &w[0])
    }

    pub fn is_zero(&self) -> bool {
        self.exact.iter().all(Zero::is_zero)
    }
}

/// Pointwise `w · r`.
pub fn fold_weight(w: f64, t: &RewardTable) -> RewardTable {
    assert!(w >= 0.0 && w.is_finite(), "weight must be finite and nonnegative");
    let wq = rational::from_f64(w);
    let values = t.values.iter().map(|&v| w * v).collect();
    let exact = t.exact.iter().map(|v| &wq * v).collect();
    RewardTable::approximated(values, exact).with_faithfulness(t.faithful)
}

/// The reward seen by an edge after `j` of its members have been absorbed:
/// `r'(i) = r(i + j) − r(j)`.
pub fn contract_reward(t: &RewardTable, j: usize) -> Result<RewardTable> {
    let m = t.edge_size();
    if j > m {
        return Err(Error::OutOfRange(format!(
            "cannot absorb {j} members of an edge of size {m}"
        )));
    }
    if j == 0 {
        return Ok(t.clone());
    }
    let base = t.values[j];
    let values = t.values[j..].iter().map(|&v| v - base).collect();
    let base_q = &t.exact[j];
    let exact = t.exact[j..].iter().map(|v| v - base_q).collect();
    Ok(RewardTable::approximated(values, exact).with_faithfulness(t.faithful))
}

impl RewardTable {
    fn with_faithfulness(mut self, parent: bool) -> Self {
        self.faithful &= parent;
        self
    }
}

/// True when every table satisfies `r(1) ≥ r(i)/i` for all `i ≥ 1`. In that
/// regime a best single node is optimal.
pub fn is_trivial_corner<'a>(tables: impl IntoIterator<Item = &'a RewardTable>) -> bool {
    tables.into_iter().all(|t| {
        let r1 = t.exact.get(1).cloned().unwrap_or_else(Rational::zero);
        t.exact
            .iter()
            .enumerate()
            .skip(1)
            .all(|(i, ri)| &r1 * Rational::from_integer((i as i64).into()) >= *ri)
    })
}

/// The six built-in reward families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reward {
    AtleastTwo,
    AtleastHalf,
    AllButOne,
    Standard,
    Quadratic,
    SquareRoot,
}

impl Reward {
    pub const ALL: [Reward; 6] = [
        Reward::AtleastTwo,
        Reward::AtleastHalf,
        Reward::AllButOne,
        Reward::Standard,
        Reward::Quadratic,
        Reward::SquareRoot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Reward::AtleastTwo => "atleast-two",
            Reward::AtleastHalf => "atleast-half",
            Reward::AllButOne => "all-but-one",
            Reward::Standard => "standard",
            Reward::Quadratic => "quadratic",
            Reward::SquareRoot => "square-root",
        }
    }

    /// Whether the family is convex for every edge size.
    pub fn always_convex(self) -> bool {
        matches!(self, Reward::Standard | Reward::Quadratic)
    }

    /// The table for an edge of size `m`. Threshold families and the square
    /// root have `r(1)` forced to 0.
    pub fn table(self, m: usize) -> RewardTable {
        assert!(m >= 1, "edge size must be at least 1");
        let int = |f: &dyn Fn(usize) -> bool| {
            let exact = (0..=m)
                .map(|i| rational::from_int(i64::from(i >= 2 && f(i))))
                .collect();
            RewardTable::from_rationals(exact).expect("indicator tables are valid")
        };
        match self {
            Reward::AtleastTwo => int(&|_| true),
            Reward::AtleastHalf => int(&|i| i >= m.div_ceil(2)),
            Reward::AllButOne => int(&|i| i + 1 >= m),
            Reward::Standard => {
                let exact = (0..=m)
                    .map(|i| rational::from_int(i64::from(i == m)))
                    .collect();
                RewardTable::from_rationals(exact).expect("valid")
            }
            Reward::Quadratic => {
                let exact = (0..=m)
                    .map(|i| Rational::new(((i * i) as i64).into(), (m as i64).into()))
                    .collect();
                RewardTable::from_rationals(exact).expect("valid")
            }
            Reward::SquareRoot => {
                let values: Vec<f64> = (0..=m)
                    .map(|i| if i >= 2 { (i as f64).sqrt() } else { 0.0 })
                    .collect();
                let exact = values
                    .iter()
                    .map(|&v| rational::snap(v, SNAP_DENOMINATOR))
                    .collect();
                RewardTable::approximated(values, exact)
            }
        }
    }
}

impl fmt::Display for Reward {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Reward {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Reward::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::UnknownReward(s.to_string()))
    }
}

/// How reward tables are assigned to edges: one built-in family, or a custom
/// table per edge size.
#[derive(Debug, Clone)]
pub enum RewardSpec {
    Builtin(Reward),
    Custom(BTreeMap<usize, Arc<RewardTable>>),
}

impl RewardSpec {
    pub fn label(&self) -> String {
        match self {
            RewardSpec::Builtin(r) => r.name().to_string(),
            RewardSpec::Custom(_) => "custom".to_string(),
        }
    }
}

/// Hands out shared tables per edge size so equal edges share one allocation.
#[derive(Debug)]
pub(crate) struct TableCache<'a> {
    spec: &'a RewardSpec,
    built: BTreeMap<usize, Arc<RewardTable>>,
}

impl<'a> TableCache<'a> {
    pub(crate) fn new(spec: &'a RewardSpec) -> Self {
        TableCache { spec, built: BTreeMap::new() }
    }

    pub(crate) fn get(&mut self, m: usize) -> Result<Arc<RewardTable>> {
        match self.spec {
            RewardSpec::Builtin(r) => Ok(self
                .built
                .entry(m)
                .or_insert_with(|| Arc::new(r.table(m)))
                .clone()),
            RewardSpec::Custom(map) => map.get(&m).cloned().ok_or_else(|| {
                Error::InvalidReward(format!("no custom table for edge size {m}"))
            }),
        }
    }
}

/// Parses custom tables, one line per edge size: `m: v0,v1,...,vm`.
/// Values may be decimals or fractions (`1/3`) and are kept exactly.
pub fn parse_reward_tables(text: &str) -> Result<RewardSpec> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let (size, rest) = line
            .split_once(':')
            .ok_or_else(|| err("expected `m: v0,...,vm`".into()))?;
        let m: usize = size
            .trim()
            .parse()
            .map_err(|_| err(format!("bad edge size `{}`", size.trim())))?;
        let exact = rest
            .split(',')
            .map(|tok| rational::parse(tok).ok_or_else(|| err(format!("bad value `{}`", tok.trim()))))
            .collect::<Result<Vec<_>>>()?;
        if exact.len() != m + 1 {
            return Err(err(format!("edge size {m} needs {} values, got {}", m + 1, exact.len())));
        }
        let table = RewardTable::from_rationals(exact).map_err(|e| err(e.to_string()))?;
        if map.insert(m, Arc::new(table)).is_some() {
            return Err(err(format!("duplicate table for edge size {m}")));
        }
    }
    if map.is_empty() {
        return Err(Error::InvalidReward("reward file defines no tables".into()));
    }
    Ok(RewardSpec::Custom(map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn builtin_examples() {
        assert_eq!(Reward::Standard.table(3).values(), &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(
            Reward::Quadratic.table(3).exact(),
            &[q(0, 1), q(1, 3), q(4, 3), q(3, 1)]
        );
        assert_eq!(Reward::AtleastHalf.table(2).values(), &[0.0, 0.0, 1.0]);
        assert_eq!(Reward::AtleastTwo.table(3).values(), &[0.0, 0.0, 1.0, 1.0]);
        assert_eq!(Reward::AtleastHalf.table(5).values(), &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(Reward::AllButOne.table(4).values(), &[0.0, 0.0, 0.0, 1.0, 1.0]);
        assert_eq!(Reward::AllButOne.table(2).values(), &[0.0, 0.0, 1.0]);
        let sq = Reward::SquareRoot.table(4);
        assert_eq!(sq.get(1), 0.0);
        assert_eq!(sq.get(4), 2.0);
        assert!(!sq.is_faithful());
        assert_eq!(sq.exact()[2], q(1_414_214, 1_000_000));
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(matches!("cubic".parse::<Reward>(), Err(Error::UnknownReward(_))));
        assert_eq!("all-but-one".parse::<Reward>().unwrap(), Reward::AllButOne);
    }

    #[test]
    fn builtins_are_valid_for_all_sizes() {
        for r in Reward::ALL {
            for m in 1..=100 {
                let t = r.table(m);
                assert!(validate(t.values()).is_ok(), "{r} m={m}");
                assert_eq!(t.edge_size(), m);
                if r.always_convex() {
                    assert!(t.is_convex(), "{r} m={m}");
                }
                if r == Reward::AtleastTwo && m >= 3 {
                    assert!(!t.is_convex());
                }
            }
        }
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&[0.0, 0.0, 1.0, 1.0]).is_ok());
        assert_eq!(validate(&[0.0, 1.0, 0.5]), Err(Violation::Decreasing { index: 2 }));
        assert_eq!(validate(&[0.1, 0.2]), Err(Violation::NonzeroAtZero { value: 0.1 }));
        assert!(RewardTable::new(vec![0.0, -1.0]).is_err());
    }

    #[test]
    fn convexity_examples() {
        assert!(Reward::Standard.table(3).is_convex());
        assert!(!Reward::AtleastTwo.table(3).is_convex());
        // deltas 0, 1.414, 0.318, 0.268
        assert!(!Reward::SquareRoot.table(4).is_convex());
        assert!(!is_convex_values(Reward::SquareRoot.table(4).values(), 1e-12));
        assert!(is_convex_values(&[0.0, 1.0 / 3.0, 4.0 / 3.0, 3.0], 1e-12));
    }

    #[test]
    fn deltas_examples() {
        let t = RewardTable::new(vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(t.deltas(), vec![0.0, 1.0, 0.0]);
        assert_eq!(
            Reward::Quadratic.table(3).exact_deltas(),
            vec![q(1, 3), q(1, 1), q(5, 3)]
        );
        assert_eq!(Reward::Standard.table(3).deltas(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn fold_weight_examples() {
        let t = RewardTable::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(fold_weight(2.0, &t).values(), &[0.0, 0.0, 2.0]);
        assert!(fold_weight(0.0, &t).is_zero());
        let t = RewardTable::new(vec![0.0, 1.0, 4.0]).unwrap();
        assert_eq!(fold_weight(2.5, &t).values(), &[0.0, 2.5, 10.0]);
        assert!(fold_weight(2.5, &Reward::Quadratic.table(4)).is_convex());
    }

    #[test]
    fn contract_examples() {
        let t = RewardTable::new(vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(contract_reward(&t, 1).unwrap().values(), &[0.0, 1.0, 1.0]);
        assert_eq!(contract_reward(&t, 0).unwrap(), t);
        let s = Reward::Standard.table(3);
        assert_eq!(contract_reward(&s, 2).unwrap().values(), &[0.0, 1.0]);
        assert_eq!(contract_reward(&s, 3).unwrap().values(), &[0.0]);
        assert!(contract_reward(&s, 4).is_err());
    }

    #[test]
    fn corner_examples() {
        let concave = RewardTable::new(vec![0.0, 1.0, 1.5, 1.8]).unwrap();
        assert!(is_trivial_corner([&concave]));
        assert!(!is_trivial_corner([&Reward::AtleastTwo.table(3)]));
        let linear = RewardTable::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!(is_trivial_corner([&linear]));
        assert!(!is_trivial_corner([&linear, &Reward::Standard.table(2)]));
    }

    #[test]
    fn custom_tables_parse() {
        let spec = parse_reward_tables("# sizes\n2: 0, 1/2, 1\n3: 0,0,0.5,1\n").unwrap();
        let RewardSpec::Custom(map) = &spec else { panic!() };
        assert_eq!(map[&2].exact()[1], q(1, 2));
        assert_eq!(map[&3].values(), &[0.0, 0.0, 0.5, 1.0]);
        assert!(parse_reward_tables("2: 0,1").is_err());
        assert!(parse_reward_tables("2: 0,1,0.5").is_err());
        assert!(parse_reward_tables("").is_err());
        let mut cache = TableCache::new(&spec);
        assert!(cache.get(4).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn table() -> impl Strategy<Value = RewardTable> {
            proptest::collection::vec(0u32..6, 1..12).prop_map(|steps| {
                let mut acc = 0i64;
                let mut exact = vec![q(0, 1)];
                for s in steps {
                    acc += i64::from(s);
                    exact.push(q(acc, 4));
                }
                RewardTable::from_rationals(exact).unwrap()
            })
        }

        proptest! {
            #[test]
            fn contraction_telescopes((t, a, b) in table().prop_flat_map(|t| {
                let m = t.edge_size();
                (Just(t), 0..=m).prop_flat_map(move |(t, a)| (Just(t), Just(a), 0..=m - a))
            })) {
                let twice = contract_reward(&contract_reward(&t, a).unwrap(), b).unwrap();
                let once = contract_reward(&t, a + b).unwrap();
                prop_assert_eq!(twice.exact(), once.exact());
                prop_assert!(validate(once.values()).is_ok());
                if t.is_convex() {
                    prop_assert!(once.is_convex());
                }
            }

            #[test]
            fn folded_deltas_scale(t in table(), w in 0u32..20) {
                let w = f64::from(w) / 4.0;
                let folded = fold_weight(w, &t);
                let expected: Vec<f64> = t.deltas().iter().map(|d| w * d).collect();
                prop_assert_eq!(folded.deltas(), expected);
            }
        }
    }
}
