//! Graph production rules, shape production rules and forbidden patterns.
//!
//! Rule graphs use node names instead of morphisms: a name occurring in both
//! `L` and `R` denotes a preserved node. Node types are unary loops.
//!
//! A left-hand side may also carry loops labelled with instrumentation
//! predicates. These act as application conditions (the predicate must hold
//! at the matched node) and never appear in the edge deltas.

mod apply;
mod matching;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::formula::{Formula, FormulaError};
use crate::kleene::TruthValue;
use crate::structure::{Edge, Graph, NodeId, PredRef, PredicateSignature, SUMMARY};

pub use apply::{apply_concrete, apply_shape, ConcreteMatch};
pub use matching::{find_concrete_matchings, find_matchings};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("rule `{rule}`: label `{label}` is not a declared predicate")]
    UnknownLabel { rule: String, label: String },
    #[error("rule `{rule}`: unary label `{label}` used on an edge between different nodes")]
    UnaryOnEdge { rule: String, label: String },
    #[error("rule `{rule}`: `{label}` cannot be used in a rule graph")]
    ReservedLabel { rule: String, label: String },
    #[error("rule `{rule}`: instrumentation label `{label}` in the right-hand side; use an update formula")]
    InstrumentationInRhs { rule: String, label: String },
    #[error("rule `{rule}`: node name `{node}` is not an identifier")]
    InvalidNodeName { rule: String, node: String },
    #[error("rule `{rule}`: `{pred}` is not an instrumentation predicate")]
    NotInstrumentation { rule: String, pred: String },
    #[error("rule `{rule}`: update target `{node}` is not a right-hand side node")]
    UnknownUpdateNode { rule: String, node: String },
    #[error("rule `{rule}`: duplicate update for {pred}({node})")]
    DuplicateUpdate { rule: String, pred: String, node: String },
    #[error("rule `{rule}`: update {pred}({node}) uses `{var}`, which is not a left-hand side node")]
    UpdateVariable {
        rule: String,
        pred: String,
        node: String,
        var: String,
    },
    #[error("rule `{rule}`: update {pred}({node}): {source}")]
    UpdateFormula {
        rule: String,
        pred: String,
        node: String,
        source: FormulaError,
    },
    #[error("matching does not assign left-hand side node `{0}`")]
    Unassigned(String),
    #[error("matching is not injective: `{0}` and `{1}` share an image")]
    NotInjective(String, String),
    #[error("matched edge {0} is not present")]
    MissingEdge(String),
    #[error("matched image `{0}` is not in the host")]
    MissingImage(String),
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A graph production rule `⟨L, R⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphRule {
    name: String,
    lhs: Graph,
    rhs: Graph,
    sig: Arc<PredicateSignature>,
}

fn validate_graph(
    rule: &str,
    g: &Graph,
    sig: &PredicateSignature,
    allow_instrumentation: bool,
) -> Result<(), RuleError> {
    for n in g.nodes() {
        if !is_identifier(n.as_str()) {
            return Err(RuleError::InvalidNodeName {
                rule: rule.into(),
                node: n.to_string(),
            });
        }
    }
    for e in g.edges() {
        let err_label = || (rule.to_string(), e.label.clone());
        match sig.lookup(&e.label) {
            None => {
                let (rule, label) = err_label();
                return Err(RuleError::UnknownLabel { rule, label });
            }
            Some(PredRef::Unary(_)) if e.label == SUMMARY => {
                let (rule, label) = err_label();
                return Err(RuleError::ReservedLabel { rule, label });
            }
            Some(PredRef::Unary(_)) if !e.is_loop() => {
                let (rule, label) = err_label();
                return Err(RuleError::UnaryOnEdge { rule, label });
            }
            Some(PredRef::Unary(_)) if sig.is_instrumentation_name(&e.label) && !allow_instrumentation => {
                let (rule, label) = err_label();
                return Err(RuleError::InstrumentationInRhs { rule, label });
            }
            Some(_) => {}
        }
    }
    Ok(())
}

impl GraphRule {
    pub fn new(
        name: impl Into<String>,
        lhs: Graph,
        rhs: Graph,
        sig: Arc<PredicateSignature>,
    ) -> Result<Self, RuleError> {
        let name = name.into();
        validate_graph(&name, &lhs, &sig, true)?;
        validate_graph(&name, &rhs, &sig, false)?;
        Ok(GraphRule { name, lhs, rhs, sig })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lhs(&self) -> &Graph {
        &self.lhs
    }

    pub fn rhs(&self) -> &Graph {
        &self.rhs
    }

    pub fn signature(&self) -> &Arc<PredicateSignature> {
        &self.sig
    }

    /// Left-hand side node names in sorted order.
    pub fn lhs_nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.lhs.nodes().iter()
    }

    fn is_guard(&self, e: &Edge) -> bool {
        self.sig.is_instrumentation_name(&e.label)
    }

    /// Loops of `L` labelled with instrumentation predicates.
    pub fn guards(&self) -> impl Iterator<Item = &Edge> {
        self.lhs.edges().iter().filter(|e| self.is_guard(e))
    }

    /// N⁻ = N_L ∖ N_R
    pub fn deleted_nodes(&self) -> BTreeSet<NodeId> {
        self.lhs.nodes().difference(self.rhs.nodes()).cloned().collect()
    }

    /// N⁺ = N_R ∖ N_L
    pub fn created_nodes(&self) -> BTreeSet<NodeId> {
        self.rhs.nodes().difference(self.lhs.nodes()).cloned().collect()
    }

    /// E⁻ = E_L ∖ E_R, without guards.
    pub fn deleted_edges(&self) -> BTreeSet<Edge> {
        self.lhs
            .edges()
            .difference(self.rhs.edges())
            .filter(|e| !self.is_guard(e))
            .cloned()
            .collect()
    }

    /// E⁺ = E_R ∖ E_L
    pub fn created_edges(&self) -> BTreeSet<Edge> {
        self.rhs.edges().difference(self.lhs.edges()).cloned().collect()
    }

    /// The rule whose left and right sides are both `F`.
    pub fn identity(name: impl Into<String>, f: Graph, sig: Arc<PredicateSignature>) -> Result<Self, RuleError> {
        let name = name.into();
        validate_graph(&name, &f, &sig, true)?;
        Ok(GraphRule {
            name,
            lhs: f.clone(),
            rhs: f,
            sig,
        })
    }
}

/// φ_P: edges, loops, pairwise distinctness and non-summarisation of `L`.
pub fn production_formula(rule: &GraphRule) -> Formula {
    let lhs = rule.lhs();
    let mut parts = Vec::new();
    for e in lhs.edges() {
        if let Some(PredRef::Binary(_)) = rule.sig.lookup(&e.label) {
            parts.push(Formula::pred2(&e.label, e.source.as_str(), e.target.as_str()));
        }
    }
    for e in lhs.edges() {
        if let Some(PredRef::Unary(_)) = rule.sig.lookup(&e.label) {
            parts.push(Formula::pred1(&e.label, e.source.as_str()));
        }
    }
    let nodes: Vec<&NodeId> = lhs.nodes().iter().collect();
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            parts.push(Formula::not(Formula::eq(a.as_str(), b.as_str())));
        }
    }
    for n in &nodes {
        parts.push(Formula::not(Formula::pred1(SUMMARY, n.as_str())));
    }
    Formula::conjunction(parts)
}

/// A graph rule with instrumentation update formulas γ.
#[derive(Debug, Clone)]
pub struct ShapeRule {
    rule: GraphRule,
    updates: BTreeMap<(String, NodeId), Formula>,
    defaulted: BTreeSet<(String, NodeId)>,
}

impl PartialEq for ShapeRule {
    fn eq(&self, other: &Self) -> bool {
        self.rule == other.rule && self.updates == other.updates
    }
}

impl ShapeRule {
    /// Checks the given updates and fills every missing `(p, v)` with the
    /// constant ½. The second component lists the filled pairs as warnings.
    pub fn new(
        rule: GraphRule,
        updates: impl IntoIterator<Item = (String, NodeId, Formula)>,
    ) -> Result<(Self, Vec<String>), RuleError> {
        let sig = rule.sig.clone();
        let name = rule.name.clone();
        let lhs_names: BTreeSet<&str> = rule.lhs.nodes().iter().map(NodeId::as_str).collect();
        let mut map = BTreeMap::new();
        for (pred, node, f) in updates {
            if !sig.is_instrumentation_name(&pred) {
                return Err(RuleError::NotInstrumentation { rule: name, pred });
            }
            if !rule.rhs.nodes().contains(&node) {
                return Err(RuleError::UnknownUpdateNode {
                    rule: name,
                    node: node.to_string(),
                });
            }
            f.check(&sig).map_err(|source| RuleError::UpdateFormula {
                rule: name.clone(),
                pred: pred.clone(),
                node: node.to_string(),
                source,
            })?;
            if let Some(var) = f.free_vars().into_iter().find(|v| !lhs_names.contains(v.as_str())) {
                return Err(RuleError::UpdateVariable {
                    rule: name,
                    pred,
                    node: node.to_string(),
                    var,
                });
            }
            let key = (pred, node);
            if map.contains_key(&key) {
                return Err(RuleError::DuplicateUpdate {
                    rule: name,
                    pred: key.0,
                    node: key.1.to_string(),
                });
            }
            map.insert(key, f);
        }
        let mut defaulted = BTreeSet::new();
        let mut warnings = Vec::new();
        for (_, pred, _, _) in sig.instrumentation() {
            for v in rule.rhs.nodes() {
                let key = (pred.to_string(), v.clone());
                if !map.contains_key(&key) {
                    warnings.push(format!("rule `{name}`: no update for {pred}({v}); using 1/2"));
                    map.insert(key.clone(), Formula::Const(TruthValue::Maybe));
                    defaulted.insert(key);
                }
            }
        }
        Ok((
            ShapeRule {
                rule,
                updates: map,
                defaulted,
            },
            warnings,
        ))
    }

    /// A shape rule without explicit updates; `γ(p, v) = p(v)` for preserved
    /// nodes and ½ for created ones.
    pub fn with_identity_updates(rule: GraphRule) -> Self {
        let sig = rule.sig.clone();
        let lhs = rule.lhs.nodes();
        let updates: Vec<(String, NodeId, Formula)> = sig
            .instrumentation()
            .flat_map(|(_, p, _, _)| {
                rule.rhs.nodes().iter().map(move |v| {
                    let f = if lhs.contains(v) {
                        Formula::pred1(p, v.as_str())
                    } else {
                        Formula::Const(TruthValue::Maybe)
                    };
                    (p.to_string(), v.clone(), f)
                })
            })
            .collect();
        ShapeRule::new(rule, updates).expect("identity updates are well formed").0
    }

    pub fn rule(&self) -> &GraphRule {
        &self.rule
    }

    pub fn name(&self) -> &str {
        self.rule.name()
    }

    /// γ(p, v)
    pub fn update(&self, pred: &str, node: &NodeId) -> Option<&Formula> {
        self.updates.get(&(pred.to_string(), node.clone()))
    }

    pub fn updates(&self) -> impl Iterator<Item = (&str, &NodeId, &Formula)> {
        self.updates.iter().map(|((p, v), f)| (p.as_str(), v, f))
    }

    pub fn is_defaulted(&self, pred: &str, node: &NodeId) -> bool {
        self.defaulted.contains(&(pred.to_string(), node.clone()))
    }
}

/// A graph that must never occur, checked as the rule `⟨F, F⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenPattern {
    rule: GraphRule,
}

impl ForbiddenPattern {
    pub fn new(name: impl Into<String>, graph: Graph, sig: Arc<PredicateSignature>) -> Result<Self, RuleError> {
        Ok(ForbiddenPattern {
            rule: GraphRule::identity(name, graph, sig)?,
        })
    }

    pub fn name(&self) -> &str {
        self.rule.name()
    }

    pub fn graph(&self) -> &Graph {
        self.rule.lhs()
    }

    pub fn as_rule(&self) -> &GraphRule {
        &self.rule
    }
}
