use std::collections::{BTreeMap, BTreeSet};

use super::{RuleError, ShapeRule, GraphRule};
use crate::formula::Assignment;
use crate::kleene::TruthValue;
use crate::structure::{fresh_id, Graph, LogicalStructure, NodeId, PredRef};

/// A matching of left-hand side node names into a concrete graph.
pub type ConcreteMatch = BTreeMap<NodeId, NodeId>;

/// Name for a created node: `base.k` with the smallest free `k`.
fn created_name(base: &NodeId, taken: impl Fn(&str) -> bool) -> NodeId {
    fresh_id(base.as_str(), taken)
}

/// Applies `rule` to `g` at `m`. Edges incident to deleted nodes are
/// dropped. Guards are application conditions and are not rechecked here.
pub fn apply_concrete(g: &Graph, rule: &GraphRule, m: &ConcreteMatch) -> Result<Graph, RuleError> {
    let mut images = BTreeMap::new();
    for n in rule.lhs().nodes() {
        let img = m.get(n).ok_or_else(|| RuleError::Unassigned(n.to_string()))?;
        if !g.nodes().contains(img) {
            return Err(RuleError::MissingImage(img.to_string()));
        }
        if let Some(other) = images.insert(img.clone(), n.clone()) {
            return Err(RuleError::NotInjective(other.to_string(), n.to_string()));
        }
    }
    let sig = rule.signature();
    for e in rule.lhs().edges() {
        if sig.is_instrumentation_name(&e.label) {
            continue;
        }
        let (a, b) = (&m[&e.source], &m[&e.target]);
        if !g.contains_edge(a.as_str(), &e.label, b.as_str()) {
            return Err(RuleError::MissingEdge(format!("{}({a},{b})", e.label)));
        }
    }

    let mut h = g.clone();
    for n in rule.deleted_nodes() {
        h.remove_node(&m[&n]);
    }
    for e in rule.deleted_edges() {
        let edge = crate::structure::Edge::new(m[&e.source].clone(), e.label.clone(), m[&e.target].clone());
        h.remove_edge(&edge);
    }
    let mut hat = m.clone();
    for n in rule.created_nodes() {
        let id = created_name(&n, |x| h.contains_node(x));
        h.add_node(id.clone());
        hat.insert(n, id);
    }
    for e in rule.created_edges() {
        h.add_edge(hat[&e.source].clone(), e.label.clone(), hat[&e.target].clone());
    }
    Ok(h)
}

fn check_shape_match(s: &LogicalStructure, rule: &GraphRule, m: &Assignment) -> Result<(), RuleError> {
    let mut seen: BTreeMap<usize, &NodeId> = BTreeMap::new();
    for n in rule.lhs().nodes() {
        let u = m.get(n.as_str()).ok_or_else(|| RuleError::Unassigned(n.to_string()))?;
        if u >= s.len() {
            return Err(RuleError::MissingImage(format!("#{u}")));
        }
        if let Some(other) = seen.insert(u, n) {
            return Err(RuleError::NotInjective(other.to_string(), n.to_string()));
        }
    }
    let at = |n: &NodeId| m.get(n.as_str()).expect("checked above");
    for e in rule.lhs().edges() {
        let (a, b) = (at(&e.source), at(&e.target));
        let v = match rule.signature().lookup(&e.label) {
            Some(PredRef::Unary(p)) => s.unary(p, a),
            Some(PredRef::Binary(p)) => s.binary(p, a, b),
            None => unreachable!("rule labels are validated"),
        };
        if v != TruthValue::True {
            return Err(RuleError::MissingEdge(format!(
                "{}({},{}) = {v}",
                e.label,
                s.node(a),
                s.node(b)
            )));
        }
    }
    Ok(())
}

/// Applies a shape rule at an injective matching whose left-hand side edges
/// all have value 1. Instrumentation values of matched and created nodes
/// come from γ, evaluated in `s` under `m`.
pub fn apply_shape(s: &LogicalStructure, rule: &ShapeRule, m: &Assignment) -> Result<LogicalStructure, RuleError> {
    let g = rule.rule();
    check_shape_match(s, g, m)?;
    let sig = s.signature_arc().clone();
    let at = |n: &NodeId| m.get(n.as_str()).expect("checked");

    // γ values, all computed in the pre-state
    let mut instr: Vec<(usize, NodeId, TruthValue)> = Vec::new();
    for (q, name, _, _) in sig.instrumentation() {
        for v in g.rhs().nodes() {
            let f = rule.update(name, v).expect("γ is total on instrumentation × N_R");
            let val = f.evaluate(s, m).map_err(|source| RuleError::UpdateFormula {
                rule: g.name().to_string(),
                pred: name.to_string(),
                node: v.to_string(),
                source,
            })?;
            instr.push((q, v.clone(), val));
        }
    }

    let deleted: BTreeSet<usize> = g.deleted_nodes().iter().map(at).collect();
    let keep: Vec<usize> = (0..s.len()).filter(|u| !deleted.contains(u)).collect();
    let mut out = s.induced(&keep);
    let mut pos: BTreeMap<NodeId, usize> = BTreeMap::new();
    for n in g.lhs().nodes() {
        if let Ok(i) = keep.binary_search(&at(n)) {
            pos.insert(n.clone(), i);
        }
    }
    for n in g.created_nodes() {
        let id = created_name(&n, |x| out.contains_node(x));
        let i = out.add_node(id, TruthValue::False).expect("fresh name");
        pos.insert(n, i);
    }
    let set = |out: &mut LogicalStructure, e: &crate::structure::Edge, v: TruthValue| {
        let (a, b) = (pos[&e.source], pos[&e.target]);
        match sig.lookup(&e.label) {
            Some(PredRef::Unary(p)) => out.set_unary(p, a, v),
            Some(PredRef::Binary(p)) => out.set_binary(p, a, b, v),
            None => unreachable!("rule labels are validated"),
        }
    };
    for e in g.deleted_edges() {
        if pos.contains_key(&e.source) && pos.contains_key(&e.target) {
            set(&mut out, &e, TruthValue::False);
        }
    }
    for e in g.created_edges() {
        set(&mut out, &e, TruthValue::True);
    }
    for (q, v, val) in instr {
        out.set_unary(q, pos[&v], val);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Formula};
    use crate::kleene::TruthValue::*;
    use crate::rules::find_matchings;
    use crate::rules::tests::{enter_station, rail_sig};
    use crate::structure::{encode_graph, Edge, PredicateSignature};
    use std::sync::Arc;

    fn rail() -> Graph {
        let mut g = Graph::new();
        for (n, t) in [("r1", "RC"), ("r2", "RC"), ("s1", "S"), ("s2", "S"), ("t1", "T"), ("t2", "T")] {
            g.add_loop(n, t);
        }
        g.add_edge("r1", "on", "t1");
        g.add_edge("r2", "on", "s2");
        g.add_edge("s1", "next", "t1");
        g.add_edge("t1", "next", "s2");
        g.add_edge("s2", "next", "t2");
        g.add_edge("t2", "next", "s1");
        g
    }

    fn cm(pairs: &[(&str, &str)]) -> ConcreteMatch {
        pairs.iter().map(|(a, b)| (NodeId::new(a), NodeId::new(b))).collect()
    }

    #[test]
    fn enter_station_concrete() {
        let sig = rail_sig();
        let h = apply_concrete(&rail(), &enter_station(&sig), &cm(&[("r", "r1"), ("t", "t1"), ("s", "s2")])).unwrap();
        assert!(!h.contains_edge("r1", "on", "t1"));
        assert!(h.contains_edge("r1", "on", "s2"));
        assert_eq!(h.edge_count(), rail().edge_count());
    }

    #[test]
    fn identity_rule_is_noop() {
        let sig = rail_sig();
        let l = enter_station(&sig).lhs().clone();
        let id = GraphRule::identity("id", l, sig).unwrap();
        let m = cm(&[("r", "r1"), ("t", "t1"), ("s", "s2")]);
        assert_eq!(apply_concrete(&rail(), &id, &m).unwrap(), rail());
    }

    #[test]
    fn deleting_node_clips_edges() {
        let sig = rail_sig();
        let mut l = Graph::new();
        l.add_loop("x", "T");
        let rule = GraphRule::new("drop", l, Graph::new(), sig).unwrap();
        let h = apply_concrete(&rail(), &rule, &cm(&[("x", "t1")])).unwrap();
        assert!(!h.contains_node("t1"));
        assert!(h.edges().iter().all(|e| e.source.as_str() != "t1" && e.target.as_str() != "t1"));
    }

    #[test]
    fn bad_matches() {
        let sig = rail_sig();
        let rule = enter_station(&sig);
        assert!(matches!(
            apply_concrete(&rail(), &rule, &cm(&[("r", "r1"), ("t", "t1"), ("s", "t1")])),
            Err(RuleError::NotInjective(..))
        ));
        assert!(matches!(
            apply_concrete(&rail(), &rule, &cm(&[("r", "r2"), ("t", "t1"), ("s", "s2")])),
            Err(RuleError::MissingEdge(_))
        ));
        assert!(matches!(
            apply_concrete(&rail(), &rule, &cm(&[("r", "r1"), ("t", "t1")])),
            Err(RuleError::Unassigned(_))
        ));
    }

    fn railcab_updates(rule: GraphRule) -> ShapeRule {
        let t = parse(
            "is_colliding(t) & exists r2, r3: r2 != r & r3 != r & r3 != r2 & on(r2,t) & on(r3,t)",
        )
        .unwrap();
        let zero = Formula::Const(False);
        ShapeRule::new(
            rule,
            [
                ("is_colliding".to_string(), NodeId::new("r"), zero.clone()),
                ("is_colliding".to_string(), NodeId::new("s"), zero),
                ("is_colliding".to_string(), NodeId::new("t"), t),
            ],
        )
        .unwrap()
        .0
    }

    #[test]
    fn enter_station_updates_on_collision() {
        let sig = rail_sig();
        let rule = railcab_updates(enter_station(&sig));
        let mut g = rail();
        g.add_edge("r2", "on", "t1");
        g.remove_edge(&Edge::new("r2", "on", "s2"));
        let s = encode_graph(&g, &sig).unwrap();
        let t1 = s.index_of("t1").unwrap();
        assert_eq!(s.value("is_colliding", &[t1]), Some(True));
        let (m, v) = find_matchings(&s, rule.rule())
            .into_iter()
            .find(|(m, _)| m.named(&s)["r"] == "r1")
            .unwrap();
        assert_eq!(v, True);
        let out = apply_shape(&s, &rule, &m).unwrap();
        // one railcab left; r2 alone is no collision
        assert_eq!(out.value("is_colliding", &[t1]), Some(False));
        let expected = encode_graph(&apply_concrete(&g, rule.rule(), &cm(&[("r", "r1"), ("t", "t1"), ("s", "s2")])).unwrap(), &sig).unwrap();
        assert!(out.same_by_names(&expected));
    }

    #[test]
    fn identity_updates_keep_structure() {
        let sig = rail_sig();
        let l = enter_station(&sig).lhs().clone();
        let rule = ShapeRule::with_identity_updates(GraphRule::identity("id", l, sig.clone()).unwrap());
        let s = encode_graph(&rail(), &sig).unwrap();
        let (m, _) = find_matchings(&s, rule.rule()).remove(0);
        assert_eq!(apply_shape(&s, &rule, &m).unwrap(), s);
    }

    #[test]
    fn created_node_defaults() {
        let sig = rail_sig();
        let mut r = Graph::new();
        r.add_loop("n", "RC");
        let (rule, warnings) = ShapeRule::new(GraphRule::new("spawn", Graph::new(), r, sig.clone()).unwrap(), []).unwrap();
        assert_eq!(warnings.len(), 1);
        let s = encode_graph(&rail(), &sig).unwrap();
        let out = apply_shape(&s, &rule, &Assignment::new()).unwrap();
        let n = out.index_of("n.1").unwrap();
        assert_eq!(out.sm(n), False);
        assert_eq!(out.value("RC", &[n]), Some(True));
        assert_eq!(out.value("is_colliding", &[n]), Some(Maybe));
    }

    #[test]
    fn precondition_checked() {
        let sig = Arc::new(PredicateSignature::new(["A"], ["e"]).unwrap());
        let mut l = Graph::new();
        l.add_edge("x", "e", "y");
        let rule = ShapeRule::with_identity_updates(GraphRule::identity("p", l, sig.clone()).unwrap());
        let mut s = LogicalStructure::new(sig);
        s.add_node("a", False).unwrap();
        s.add_node("b", False).unwrap();
        s.set_binary(0, 0, 1, Maybe);
        let m: Assignment = [("x", 0), ("y", 1)].into_iter().collect();
        assert!(matches!(apply_shape(&s, &rule, &m), Err(RuleError::MissingEdge(_))));
    }
}
