//! Bringing a rule's left-hand side into focus.
//!
//! For a ½-matching `m` and `I ⊆ Γ(m)` (the matched summary nodes kept
//! alongside their materialised copies), every left-hand side node becomes a
//! concrete node whose values are inherited from its image; the left-hand
//! side edges and loops are set to 1. A matched concrete node keeps its name,
//! a matched summary `u` yields a fresh `u.k`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::formula::Assignment;
use crate::kleene::TruthValue;
use crate::rules::{find_matchings, GraphRule};
use crate::structure::{check_embedding, fresh_id, LogicalStructure, NodeId, NodeMap, PredRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// The structure itself, for matchings that already evaluate to 1.
    Regular,
    Materialised,
}

/// One member of `mat_P(S)`.
#[derive(Debug, Clone)]
pub struct Materialisation {
    pub structure: LogicalStructure,
    pub branch: Branch,
    /// Matchings to apply in `structure`, all of value 1 before coercion.
    pub matchings: Vec<Assignment>,
    /// The ½-matching in the source structure this came from (empty for the
    /// regular branch), as left-hand side node → source node name.
    pub source_matching: BTreeMap<String, String>,
    /// Names of the summary nodes kept (the set I).
    pub kept: Vec<String>,
    /// Embedding of `structure` into the source.
    pub embedding: NodeMap,
}

/// Γ(m): matched summary nodes.
pub fn gamma(s: &LogicalStructure, m: &Assignment) -> BTreeSet<usize> {
    m.iter().map(|(_, u)| u).filter(|&u| s.is_summary(u)).collect()
}

/// `mat_m^I(S)` together with the left-hand side assignment in the result
/// and the map back into `s`.
pub fn materialise(
    s: &LogicalStructure,
    rule: &GraphRule,
    m: &Assignment,
    keep: &BTreeSet<usize>,
) -> Result<(LogicalStructure, Assignment, NodeMap), EngineError> {
    let lhs: Vec<&NodeId> = rule.lhs().nodes().iter().collect();
    for n in &lhs {
        if m.get(n.as_str()).is_none_or(|u| u >= s.len()) {
            return Err(EngineError::Precondition(format!("matching does not place `{n}`")));
        }
    }
    if crate::rules::production_formula(rule).evaluate(s, m) != Ok(TruthValue::Maybe) {
        return Err(EngineError::Precondition("production formula is not 1/2 under the matching".into()));
    }
    let g = gamma(s, m);
    if let Some(u) = keep.iter().find(|u| !g.contains(u)) {
        return Err(EngineError::Precondition(format!(
            "kept node `{}` is not a matched summary node",
            s.node(*u)
        )));
    }
    let sig = s.signature_arc().clone();

    // (origin in s, left-hand side node) for every node of the result
    let mut origin: Vec<usize> = Vec::new();
    let mut lnode: Vec<Option<&NodeId>> = Vec::new();
    let mut names: Vec<NodeId> = Vec::new();
    let concrete_image: BTreeMap<usize, &NodeId> = lhs
        .iter()
        .map(|n| (m.get(n.as_str()).unwrap(), *n))
        .filter(|(u, _)| !s.is_summary(*u))
        .collect();
    for u in 0..s.len() {
        let matched_summary = s.is_summary(u) && g.contains(&u);
        if matched_summary && !keep.contains(&u) {
            continue;
        }
        origin.push(u);
        lnode.push(if matched_summary { None } else { concrete_image.get(&u).copied() });
        names.push(s.node(u).clone());
    }
    for n in &lhs {
        let u = m.get(n.as_str()).unwrap();
        if s.is_summary(u) {
            let id = fresh_id(s.node(u).base(), |x| s.contains_node(x) || names.iter().any(|y| y.as_str() == x));
            origin.push(u);
            lnode.push(Some(n));
            names.push(id);
        }
    }

    let lhs_pos: BTreeMap<&NodeId, usize> = lnode
        .iter()
        .enumerate()
        .filter_map(|(i, n)| n.map(|n| (n, i)))
        .collect();
    let mut out = LogicalStructure::from_fn(
        sig.clone(),
        names,
        |p, x| {
            if p == 0 {
                if lnode[x].is_some() {
                    TruthValue::False
                } else {
                    s.sm(origin[x])
                }
            } else {
                s.unary(p, origin[x])
            }
        },
        |p, x, y| s.binary(p, origin[x], origin[y]),
    );
    for e in rule.lhs().edges() {
        let (a, b) = (lhs_pos[&e.source], lhs_pos[&e.target]);
        match sig.lookup(&e.label) {
            Some(PredRef::Unary(p)) => out.set_unary(p, a, TruthValue::True),
            Some(PredRef::Binary(p)) => out.set_binary(p, a, b, TruthValue::True),
            None => unreachable!("rule labels are validated"),
        }
    }
    let assignment = lhs_pos.iter().map(|(n, &i)| (n.to_string(), i)).collect();
    Ok((out, assignment, NodeMap(origin)))
}

/// All subsets of `items`, smallest first.
fn subsets(items: &[usize]) -> Vec<BTreeSet<usize>> {
    (0u32..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &u)| u)
                .collect()
        })
        .collect()
}

/// `mat_P(S)`: the regular branch (if some matching has value 1) followed by
/// `mat_m^I(S)` for every ½-matching `m` and every `I ⊆ Γ(m)`.
pub fn materialisations(s: &LogicalStructure, rule: &GraphRule) -> Vec<Materialisation> {
    let matchings = find_matchings(s, rule);
    let mut out = Vec::new();
    let definite: Vec<Assignment> = matchings
        .iter()
        .filter(|(_, v)| *v == TruthValue::True)
        .map(|(m, _)| m.clone())
        .collect();
    if !definite.is_empty() {
        out.push(Materialisation {
            structure: s.clone(),
            branch: Branch::Regular,
            matchings: definite,
            source_matching: BTreeMap::new(),
            kept: Vec::new(),
            embedding: NodeMap::identity(s.len()),
        });
    }
    for (m, v) in &matchings {
        if *v != TruthValue::Maybe {
            continue;
        }
        let g: Vec<usize> = gamma(s, m).into_iter().collect();
        for keep in subsets(&g) {
            let (structure, assignment, embedding) =
                materialise(s, rule, m, &keep).expect("matchings from find_matchings are total");
            out.push(Materialisation {
                structure,
                branch: Branch::Materialised,
                matchings: vec![assignment],
                source_matching: m.named(s),
                kept: keep.iter().map(|&u| s.node(u).to_string()).collect(),
                embedding,
            });
        }
    }
    out
}

/// Whether a materialisation lies in `focus_P(S)`: it embeds into `s` and
/// every designated matching has value 1.
pub fn in_focus(s: &LogicalStructure, rule: &GraphRule, mat: &Materialisation) -> bool {
    let f = crate::rules::production_formula(rule);
    check_embedding(&mat.structure, s, &mat.embedding).unwrap_or(false)
        && mat
            .matchings
            .iter()
            .all(|m| f.evaluate(&mat.structure, m) == Ok(TruthValue::True))
}
