//! Logical structures: concrete graphs (2-valued) and shape graphs (3-valued).
//!
//! A structure is a finite ordered universe plus an interpretation of every
//! predicate of a shared [`PredicateSignature`]. Values are stored densely;
//! universes in this domain are small.

mod abstraction;
mod antichain;
mod embed;
mod graph;
mod signature;
mod text;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::kleene::TruthValue;

pub use abstraction::{canonical_abstraction, canonical_abstraction_with_map};
pub use antichain::{AntichainSet, Insertion};
pub use embed::{check_embedding, find_embedding, EmbeddingError, NodeMap};
pub use graph::{decode_graph, encode_graph, Edge, EncodeError, Graph};
pub use signature::{PredRef, PredicateSignature, SignatureError, UnaryKind, UnaryPredicate, SUMMARY};
pub use text::{parse_structure, StructureParseError};

/// Opaque, cheaply clonable node name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(Arc<str>);

impl NodeId {
    pub fn new(name: &str) -> Self {
        NodeId(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Name without any `.k` materialisation suffix.
    pub fn base(&self) -> &str {
        self.0.split('.').next().unwrap_or(&self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(Arc::from(s))
    }
}

impl std::borrow::Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Returns `base.k` for the smallest `k ≥ 1` not rejected by `taken`.
pub fn fresh_id(base: &str, taken: impl Fn(&str) -> bool) -> NodeId {
    (1..)
        .map(|k| format!("{base}.{k}"))
        .find(|n| !taken(n))
        .map(NodeId::from)
        .expect("unbounded suffix search")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("node `{0}` already exists")]
    DuplicateNode(String),
    #[error("`sm` can only be 0 or 1/2 (node `{0}`)")]
    DefiniteSummary(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct LogicalStructure {
    sig: Arc<PredicateSignature>,
    nodes: Vec<NodeId>,
    /// `unary[p][u]`
    unary: Vec<Vec<TruthValue>>,
    /// `binary[p][u * n + v]`
    binary: Vec<Vec<TruthValue>>,
}

impl LogicalStructure {
    pub fn new(sig: Arc<PredicateSignature>) -> Self {
        let unary = vec![Vec::new(); sig.unary_count()];
        let binary = vec![Vec::new(); sig.binary_count()];
        LogicalStructure {
            sig,
            nodes: Vec::new(),
            unary,
            binary,
        }
    }

    /// Structure over `nodes` with every value 0.
    pub fn with_nodes(sig: Arc<PredicateSignature>, nodes: Vec<NodeId>) -> Self {
        let n = nodes.len();
        let unary = vec![vec![TruthValue::False; n]; sig.unary_count()];
        let binary = vec![vec![TruthValue::False; n * n]; sig.binary_count()];
        LogicalStructure {
            sig,
            nodes,
            unary,
            binary,
        }
    }

    /// Builds a structure whose values are pulled from `unary(p, u)` and
    /// `binary(p, u, v)` for every predicate and tuple of `nodes`.
    pub fn from_fn(
        sig: Arc<PredicateSignature>,
        nodes: Vec<NodeId>,
        mut unary: impl FnMut(usize, usize) -> TruthValue,
        mut binary: impl FnMut(usize, usize, usize) -> TruthValue,
    ) -> Self {
        let n = nodes.len();
        let u = (0..sig.unary_count())
            .map(|p| (0..n).map(|x| unary(p, x)).collect())
            .collect();
        let b = (0..sig.binary_count())
            .map(|p| {
                let mut row = Vec::with_capacity(n * n);
                for x in 0..n {
                    for y in 0..n {
                        row.push(binary(p, x, y));
                    }
                }
                row
            })
            .collect();
        LogicalStructure {
            sig,
            nodes,
            unary: u,
            binary: b,
        }
    }

    pub fn signature(&self) -> &PredicateSignature {
        &self.sig
    }

    pub fn signature_arc(&self) -> &Arc<PredicateSignature> {
        &self.sig
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node(&self, u: usize) -> &NodeId {
        &self.nodes[u]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.as_str() == name)
    }

    pub fn contains_node(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn add_node(&mut self, id: impl Into<NodeId>, sm: TruthValue) -> Result<usize, StructureError> {
        let id = id.into();
        if self.contains_node(id.as_str()) {
            return Err(StructureError::DuplicateNode(id.to_string()));
        }
        if sm == TruthValue::True {
            return Err(StructureError::DefiniteSummary(id.to_string()));
        }
        let old = self.nodes.len();
        let n = old + 1;
        for row in &mut self.unary {
            row.push(TruthValue::False);
        }
        for row in &mut self.binary {
            let mut grown = vec![TruthValue::False; n * n];
            for x in 0..old {
                grown[x * n..x * n + old].copy_from_slice(&row[x * old..(x + 1) * old]);
            }
            *row = grown;
        }
        self.nodes.push(id);
        self.unary[0][old] = sm;
        Ok(old)
    }

    #[inline]
    pub fn unary(&self, p: usize, u: usize) -> TruthValue {
        self.unary[p][u]
    }

    #[inline]
    pub fn binary(&self, p: usize, u: usize, v: usize) -> TruthValue {
        self.binary[p][u * self.nodes.len() + v]
    }

    pub fn set_unary(&mut self, p: usize, u: usize, value: TruthValue) {
        debug_assert!(p != 0 || value != TruthValue::True, "sm is never 1");
        self.unary[p][u] = value;
    }

    pub fn set_binary(&mut self, p: usize, u: usize, v: usize, value: TruthValue) {
        let n = self.nodes.len();
        self.binary[p][u * n + v] = value;
    }

    /// Value of a predicate by name; `None` for unknown names or wrong arity.
    pub fn value(&self, pred: &str, args: &[usize]) -> Option<TruthValue> {
        match (self.sig.lookup(pred)?, args) {
            (PredRef::Unary(p), [u]) => Some(self.unary(p, *u)),
            (PredRef::Binary(p), [u, v]) => Some(self.binary(p, *u, *v)),
            _ => None,
        }
    }

    pub fn sm(&self, u: usize) -> TruthValue {
        self.unary[0][u]
    }

    pub fn is_summary(&self, u: usize) -> bool {
        self.unary[0][u] == TruthValue::Maybe
    }

    pub fn summary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&u| self.is_summary(u))
    }

    /// No ½ anywhere (which also forces `sm ≡ 0`).
    pub fn is_two_valued(&self) -> bool {
        self.unary
            .iter()
            .chain(self.binary.iter())
            .all(|row| row.iter().all(|v| v.is_definite()))
    }

    pub fn count_maybe(&self) -> usize {
        self.unary
            .iter()
            .chain(self.binary.iter())
            .map(|row| row.iter().filter(|v| **v == TruthValue::Maybe).count())
            .sum()
    }

    /// Values of all unary predicates (including `sm`) at `u`.
    pub fn unary_vector(&self, u: usize) -> Vec<TruthValue> {
        self.unary.iter().map(|row| row[u]).collect()
    }

    /// Substructure on `keep` (original positions, in the given order).
    pub fn induced(&self, keep: &[usize]) -> LogicalStructure {
        let nodes = keep.iter().map(|&u| self.nodes[u].clone()).collect();
        LogicalStructure::from_fn(
            self.sig.clone(),
            nodes,
            |p, x| self.unary(p, keep[x]),
            |p, x, y| self.binary(p, keep[x], keep[y]),
        )
    }

    /// Same nodes in a different order.
    pub fn permuted(&self, order: &[usize]) -> LogicalStructure {
        debug_assert_eq!(order.len(), self.len());
        self.induced(order)
    }

    /// Positions sorted into canonical order: by unary vector, then by the
    /// multiset of incident binary values, then by name.
    pub fn canonical_order(&self) -> Vec<usize> {
        let n = self.len();
        let profile = |u: usize| -> Vec<(u8, u8, u8)> {
            let mut prof = Vec::new();
            for p in 0..self.sig.binary_count() {
                for v in 0..n {
                    prof.push((p as u8, self.binary(p, u, v) as u8, self.binary(p, v, u) as u8));
                }
            }
            prof.sort_unstable();
            prof
        };
        #[allow(clippy::type_complexity)]
        let mut keyed: Vec<(Vec<TruthValue>, Vec<(u8, u8, u8)>, &NodeId, usize)> = (0..n)
            .map(|u| (self.unary_vector(u), profile(u), &self.nodes[u], u))
            .collect();
        keyed.sort();
        keyed.into_iter().map(|k| k.3).collect()
    }

    /// Byte encoding of the structure up to renaming in canonical node order.
    /// Equal keys imply isomorphic structures; for structures whose unary
    /// vectors are pairwise distinct the converse holds too.
    pub fn canonical_key(&self) -> Vec<u8> {
        let order = self.canonical_order();
        let n = self.len();
        let mut key = Vec::with_capacity(4 + n * self.sig.unary_count() + n * n * self.sig.binary_count());
        key.extend_from_slice(&(n as u32).to_le_bytes());
        for &u in &order {
            key.extend(self.unary.iter().map(|row| row[u] as u8));
        }
        for p in 0..self.sig.binary_count() {
            for &u in &order {
                for &v in &order {
                    key.push(self.binary(p, u, v) as u8);
                }
            }
        }
        key
    }

    /// Equality up to node order: same node names with the same values.
    pub fn same_by_names(&self, other: &LogicalStructure) -> bool {
        if self.len() != other.len() || self.sig != other.sig {
            return false;
        }
        let map: Option<Vec<usize>> = self.nodes.iter().map(|n| other.index_of(n.as_str())).collect();
        let Some(map) = map else { return false };
        (0..self.sig.unary_count()).all(|p| (0..self.len()).all(|u| self.unary(p, u) == other.unary(p, map[u])))
            && (0..self.sig.binary_count()).all(|p| {
                (0..self.len())
                    .all(|u| (0..self.len()).all(|v| self.binary(p, u, v) == other.binary(p, map[u], map[v])))
            })
    }
}

impl fmt::Debug for LogicalStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text("_"))
    }
}
