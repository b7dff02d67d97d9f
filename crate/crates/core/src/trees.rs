//! Labeled ordered binary trees whose leaves are labeled 1 and whose
//! internal labels are the sum of their two ordered children, and the
//! weighted Catalan numbers they produce.
//!
//! With node weights `b_1 = -1` and `b_v = 1 / (4 (4^(v-1) - 1))`, summing
//! `∏ b_label` over all trees with root label `k` gives the diagonal
//! invariant `a_{k,k}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guard::Limits;
use crate::invariants::b_weight;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrderedTree {
    Leaf,
    Node { label: u64, left: Arc<OrderedTree>, right: Arc<OrderedTree> },
}

impl OrderedTree {
    /// Joins two trees under a new root labeled with the sum of their labels.
    pub fn join(left: Arc<OrderedTree>, right: Arc<OrderedTree>) -> OrderedTree {
        let label = left.label() + right.label();
        OrderedTree::Node { label, left, right }
    }

    /// Removes the root, returning the ordered pair of subtrees.
    pub fn split(&self) -> Option<(Arc<OrderedTree>, Arc<OrderedTree>)> {
        match self {
            OrderedTree::Leaf => None,
            OrderedTree::Node { left, right, .. } => Some((left.clone(), right.clone())),
        }
    }

    pub fn label(&self) -> u64 {
        match self {
            OrderedTree::Leaf => 1,
            OrderedTree::Node { label, .. } => *label,
        }
    }

    pub fn leaf_count(&self) -> u64 {
        match self {
            OrderedTree::Leaf => 1,
            OrderedTree::Node { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    /// Every internal label equals the sum of its children's labels.
    pub fn is_well_labeled(&self) -> bool {
        match self {
            OrderedTree::Leaf => true,
            OrderedTree::Node { label, left, right } => {
                *label == left.label() + right.label() && left.is_well_labeled() && right.is_well_labeled()
            }
        }
    }

    /// Label multiplicities `δ_v`.
    pub fn monomial(&self) -> WeightMonomial {
        let mut m = WeightMonomial::default();
        self.collect_labels(&mut m);
        m
    }

    fn collect_labels(&self, m: &mut WeightMonomial) {
        *m.exponents.entry(self.label()).or_insert(0) += 1;
        if let OrderedTree::Node { left, right, .. } = self {
            left.collect_labels(m);
            right.collect_labels(m);
        }
    }

    /// Parses the canonical rendering, e.g. `"3(2(1,1),1)"`.
    pub fn parse(s: &str) -> Result<OrderedTree> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let t = parse_tree(bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(Error::Parse(format!("trailing input in tree {s:?}")));
        }
        if !t.is_well_labeled() {
            return Err(Error::Parse(format!("labels do not add up in {s:?}")));
        }
        Ok(t)
    }

    pub fn to_json(&self) -> TreeJson {
        match self {
            OrderedTree::Leaf => TreeJson { label: 1, children: Vec::new() },
            OrderedTree::Node { label, left, right } => {
                TreeJson { label: *label, children: vec![left.to_json(), right.to_json()] }
            }
        }
    }
}

fn parse_tree(b: &[u8], pos: &mut usize) -> Result<OrderedTree> {
    let start = *pos;
    while *pos < b.len() && b[*pos].is_ascii_digit() {
        *pos += 1;
    }
    let label: u64 = std::str::from_utf8(&b[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("expected a label at offset {start}")))?;
    if *pos < b.len() && b[*pos] == b'(' {
        *pos += 1;
        let left = parse_tree(b, pos)?;
        expect(b, pos, b',')?;
        let right = parse_tree(b, pos)?;
        expect(b, pos, b')')?;
        Ok(OrderedTree::Node { label, left: Arc::new(left), right: Arc::new(right) })
    } else if label == 1 {
        Ok(OrderedTree::Leaf)
    } else {
        Err(Error::Parse(format!("leaf labeled {label} at offset {start}")))
    }
}

fn expect(b: &[u8], pos: &mut usize, c: u8) -> Result<()> {
    if b.get(*pos) == Some(&c) {
        *pos += 1;
        Ok(())
    } else {
        Err(Error::Parse(format!("expected {:?} at offset {pos}", c as char)))
    }
}

impl fmt::Display for OrderedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderedTree::Leaf => f.write_str("1"),
            OrderedTree::Node { label, left, right } => write!(f, "{label}({left},{right})"),
        }
    }
}

/// Nested JSON form `{"label": v, "children": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub label: u64,
    pub children: Vec<TreeJson>,
}

impl TreeJson {
    pub fn to_tree(&self) -> Result<OrderedTree> {
        match self.children.as_slice() {
            [] if self.label == 1 => Ok(OrderedTree::Leaf),
            [l, r] => {
                let t = OrderedTree::Node {
                    label: self.label,
                    left: Arc::new(l.to_tree()?),
                    right: Arc::new(r.to_tree()?),
                };
                if t.is_well_labeled() {
                    Ok(t)
                } else {
                    Err(Error::Parse(format!("labels do not add up under {}", self.label)))
                }
            }
            _ => Err(Error::Parse(format!("node {} must have 0 (leaf 1) or 2 children", self.label))),
        }
    }
}

/// `∏ b_v^(δ_v)` kept symbolic as the map `v -> δ_v`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightMonomial {
    pub exponents: BTreeMap<u64, u32>,
}

impl WeightMonomial {
    pub fn from_pairs(pairs: &[(u64, u32)]) -> Self {
        WeightMonomial { exponents: pairs.iter().copied().collect() }
    }

    pub fn evaluate(&self) -> BigRational {
        self.exponents.iter().fold(BigRational::one(), |acc, (&v, &e)| acc * node_weight(v).pow(e as i32))
    }
}

impl fmt::Display for WeightMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, e) in &self.exponents {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "b{v}")?;
            } else {
                write!(f, "b{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// `b_1 = -1`, `b_v = 1 / (4 (4^(v-1) - 1))` for `v ≥ 2`.
pub fn node_weight(v: u64) -> BigRational {
    match v {
        0 => panic!("tree labels start at 1"),
        1 => -BigRational::one(),
        _ => b_weight(v).expect("v >= 2"),
    }
}

pub fn weight(t: &OrderedTree) -> BigRational {
    match t {
        OrderedTree::Leaf => node_weight(1),
        OrderedTree::Node { label, left, right } => node_weight(*label) * weight(left) * weight(right),
    }
}

/// `|T_k|` by the convolution `c(k) = Σ_{s=1}^{k-1} c(s) c(k-s)`, `c(1) = 1`.
pub fn count(k: u64) -> Result<BigInt> {
    Ok(counts(k)?.pop().expect("k >= 1"))
}

/// `|T_1|, ..., |T_k|`.
pub fn counts(k: u64) -> Result<Vec<BigInt>> {
    if k == 0 {
        return Err(Error::domain("tree label k must be >= 1"));
    }
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    for m in 2..=k as usize {
        let v = (1..m).map(|s| &c[s - 1] * &c[m - s - 1]).sum();
        c.push(v);
    }
    Ok(c)
}

/// Memoized bottom-up enumeration: `lists[k - 1]` holds all trees with root
/// label `k`, sharing subtrees with the lower lists.
#[derive(Debug, Clone)]
pub struct TreeMemo {
    lists: Vec<Vec<Arc<OrderedTree>>>,
}

impl TreeMemo {
    pub fn build(k: u64, limits: &Limits) -> Result<Self> {
        let total = count(k)?;
        limits.check_trees(&total)?;
        let mut lists: Vec<Vec<Arc<OrderedTree>>> = vec![vec![Arc::new(OrderedTree::Leaf)]];
        for m in 2..=k as usize {
            let mut here = Vec::new();
            // left-heavy first: larger left subtree label first
            for s in (1..m).rev() {
                for left in &lists[s - 1] {
                    for right in &lists[m - s - 1] {
                        here.push(Arc::new(OrderedTree::Node {
                            label: m as u64,
                            left: left.clone(),
                            right: right.clone(),
                        }));
                    }
                }
            }
            lists.push(here);
        }
        Ok(TreeMemo { lists })
    }

    pub fn trees(&self, k: u64) -> &[Arc<OrderedTree>] {
        &self.lists[k as usize - 1]
    }

    pub fn max_label(&self) -> u64 {
        self.lists.len() as u64
    }
}

/// All trees with root label `k`, in canonical order.
pub fn enumerate(k: u64, limits: &Limits) -> Result<Vec<Arc<OrderedTree>>> {
    let memo = TreeMemo::build(k, limits)?;
    Ok(memo.trees(k).to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalanMethod {
    /// Sum of `weight(T)` over the explicit list (enumeration guard applies).
    Enumerate,
    /// `W(1) = -1`, `W(k) = b_k Σ_{s=1}^{k-1} W(s) W(k-s)`.
    Convolution,
}

pub fn weighted_catalan(k: u64, method: CatalanMethod, limits: &Limits) -> Result<BigRational> {
    match method {
        CatalanMethod::Enumerate => {
            // Every tree is visited; equal monomials are evaluated once.
            let groups = grouped_weights(k, limits)?;
            Ok(groups.iter().map(|(m, c)| m.evaluate() * BigRational::from_integer(c.clone())).sum())
        }
        CatalanMethod::Convolution => Ok(weighted_catalan_dp(k)?.pop().expect("k >= 1")),
    }
}

/// `W(1), ..., W(k)` by the weight-respecting convolution.
pub fn weighted_catalan_dp(k: u64) -> Result<Vec<BigRational>> {
    if k == 0 {
        return Err(Error::domain("tree label k must be >= 1"));
    }
    let mut w: Vec<BigRational> = vec![node_weight(1)];
    for m in 2..=k as usize {
        let mut s = BigRational::zero();
        for l in 1..m {
            s += &w[l - 1] * &w[m - l - 1];
        }
        w.push(node_weight(m as u64) * s);
    }
    Ok(w)
}

/// Trees grouped by weight monomial; multiplicities sum to `|T_k|`.
pub fn grouped_weights(k: u64, limits: &Limits) -> Result<BTreeMap<WeightMonomial, BigInt>> {
    let memo = TreeMemo::build(k, limits)?;
    let mut groups: BTreeMap<WeightMonomial, BigInt> = BTreeMap::new();
    for t in memo.trees(k) {
        *groups.entry(t.monomial()).or_insert_with(BigInt::zero) += 1;
    }
    Ok(groups)
}

/// Splits every tree at the root and rejoins; true iff the multiset is unchanged.
pub fn split_join_roundtrip(trees: &[Arc<OrderedTree>]) -> bool {
    let mut before: Vec<&OrderedTree> = trees.iter().map(|t| t.as_ref()).collect();
    let rejoined: Vec<OrderedTree> = trees
        .iter()
        .map(|t| match t.split() {
            Some((l, r)) => OrderedTree::join(l, r),
            None => OrderedTree::Leaf,
        })
        .collect();
    let mut after: Vec<&OrderedTree> = rejoined.iter().collect();
    before.sort();
    after.sort();
    before == after
}
