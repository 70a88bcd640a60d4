use std::collections::BTreeSet;
use std::sync::Arc;

use super::{LogicalStructure, NodeId, PredRef, PredicateSignature};
use crate::formula::Assignment;
use crate::kleene::TruthValue;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: NodeId,
    pub label: String,
    pub target: NodeId,
}

impl Edge {
    pub fn new(source: impl Into<NodeId>, label: impl Into<String>, target: impl Into<NodeId>) -> Self {
        Edge {
            source: source.into(),
            label: label.into(),
            target: target.into(),
        }
    }

    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

/// A graph with labelled edges; at most one edge per (source, label, target).
/// Node types are loops.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Graph {
    nodes: BTreeSet<NodeId>,
    edges: BTreeSet<Edge>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: impl Into<NodeId>) -> bool {
        self.nodes.insert(id.into())
    }

    /// Inserts the edge, adding missing endpoints.
    pub fn add_edge(&mut self, source: impl Into<NodeId>, label: impl Into<String>, target: impl Into<NodeId>) -> bool {
        let e = Edge::new(source, label, target);
        self.nodes.insert(e.source.clone());
        self.nodes.insert(e.target.clone());
        self.edges.insert(e)
    }

    pub fn add_loop(&mut self, node: impl Into<NodeId>, label: impl Into<String>) -> bool {
        let n = node.into();
        self.add_edge(n.clone(), label, n)
    }

    pub fn remove_edge(&mut self, e: &Edge) -> bool {
        self.edges.remove(e)
    }

    /// Removes a node together with its incident edges.
    pub fn remove_node(&mut self, id: &NodeId) -> bool {
        self.edges.retain(|e| e.source != *id && e.target != *id);
        self.nodes.remove(id)
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.nodes.contains(id)
    }

    pub fn contains_edge(&self, source: &str, label: &str, target: &str) -> bool {
        self.edges
            .contains(&Edge::new(NodeId::new(source), label, NodeId::new(target)))
    }

    /// Labels of loops at `node`.
    pub fn loops<'a>(&'a self, node: &'a NodeId) -> impl Iterator<Item = &'a str> + 'a {
        self.edges
            .iter()
            .filter(move |e| e.source == *node && e.target == *node)
            .map(|e| e.label.as_str())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("label `{0}` is not a declared predicate")]
    UnknownLabel(String),
    #[error("unary label `{label}` on a non-loop edge {from} -> {to}")]
    UnaryOnEdge { label: String, from: String, to: String },
    #[error("label `{0}` is derived and cannot appear in a concrete graph")]
    DerivedLabel(String),
}

/// The 2-valued encoding of a graph: universe = nodes, binary labels become
/// binary predicates, loops with unary labels become unary predicates, `sm ≡ 0`,
/// and instrumentation predicates take the value of their meaning formulas.
pub fn encode_graph(g: &Graph, sig: &Arc<PredicateSignature>) -> Result<LogicalStructure, EncodeError> {
    let nodes: Vec<NodeId> = g.nodes.iter().cloned().collect();
    let mut s = LogicalStructure::with_nodes(sig.clone(), nodes);
    let pos = |id: &NodeId| s.index_of(id.as_str()).expect("edge endpoint is a node");
    let mut sets = Vec::with_capacity(g.edges.len());
    for e in &g.edges {
        match sig.lookup(&e.label) {
            None => return Err(EncodeError::UnknownLabel(e.label.clone())),
            Some(PredRef::Binary(p)) => sets.push((PredRef::Binary(p), pos(&e.source), pos(&e.target))),
            Some(PredRef::Unary(p)) => {
                if !sig.is_core_label(&e.label) {
                    return Err(EncodeError::DerivedLabel(e.label.clone()));
                }
                if !e.is_loop() {
                    return Err(EncodeError::UnaryOnEdge {
                        label: e.label.clone(),
                        from: e.source.to_string(),
                        to: e.target.to_string(),
                    });
                }
                sets.push((PredRef::Unary(p), pos(&e.source), 0));
            }
        }
    }
    for (r, u, v) in sets {
        match r {
            PredRef::Unary(p) => s.set_unary(p, u, TruthValue::True),
            PredRef::Binary(p) => s.set_binary(p, u, v, TruthValue::True),
        }
    }
    fill_instrumentation(&mut s);
    Ok(s)
}

/// Sets every instrumentation predicate to the value of its meaning formula,
/// in declaration order.
pub(crate) fn fill_instrumentation(s: &mut LogicalStructure) {
    let sig = s.signature_arc().clone();
    for (p, _, var, meaning) in sig.instrumentation() {
        for u in 0..s.len() {
            let m: Assignment = [(var, u)].into_iter().collect();
            let v = meaning.evaluate(s, &m).expect("meaning formulas are checked at declaration");
            s.set_unary(p, u, v);
        }
    }
}

/// Inverse of [`encode_graph`] on 2-valued structures; instrumentation is dropped.
pub fn decode_graph(s: &LogicalStructure) -> Option<Graph> {
    if !s.is_two_valued() {
        return None;
    }
    let sig = s.signature();
    let mut g = Graph::new();
    for id in s.nodes() {
        g.add_node(id.clone());
    }
    for p in sig.core_unary() {
        for u in 0..s.len() {
            if s.unary(p, u) == TruthValue::True {
                g.add_loop(s.node(u).clone(), sig.unary_name(p));
            }
        }
    }
    for p in 0..sig.binary_count() {
        for u in 0..s.len() {
            for v in 0..s.len() {
                if s.binary(p, u, v) == TruthValue::True {
                    g.add_edge(s.node(u).clone(), sig.binary_name(p), s.node(v).clone());
                }
            }
        }
    }
    Some(g)
}
