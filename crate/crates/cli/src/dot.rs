//! Graphviz rendering of structures.
//!
//! One box per node, dashed for summary nodes. Unary predicates go into the
//! label (`p` for 1, `p?` for 1/2). Binary values of 1 are solid edges, 1/2
//! dashed, 0 omitted.

use std::fmt::Write as _;

use gtshape_core::structure::LogicalStructure;
use gtshape_core::TruthValue;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

pub fn to_dot(s: &LogicalStructure, name: &str) -> String {
    let sig = s.signature();
    let mut out = format!("digraph {} {{\n", quote(name));
    if !s.is_empty() {
        out.push_str("  node [shape=box];\n");
    }
    for u in 0..s.len() {
        let mut label = s.node(u).to_string();
        for p in 1..sig.unary_count() {
            match s.unary(p, u) {
                TruthValue::True => {
                    let _ = write!(label, "\\n{}", sig.unary_name(p));
                }
                TruthValue::Maybe => {
                    let _ = write!(label, "\\n{}?", sig.unary_name(p));
                }
                TruthValue::False => {}
            }
        }
        let style = if s.is_summary(u) { ", style=dashed" } else { "" };
        let _ = writeln!(out, "  {} [label={}{style}];", quote(s.node(u).as_str()), quote(&label));
    }
    for p in 0..sig.binary_count() {
        for u in 0..s.len() {
            for v in 0..s.len() {
                let style = match s.binary(p, u, v) {
                    TruthValue::False => continue,
                    TruthValue::Maybe => ", style=dashed",
                    TruthValue::True => "",
                };
                let _ = writeln!(
                    out,
                    "  {} -> {} [label={}{style}];",
                    quote(s.node(u).as_str()),
                    quote(s.node(v).as_str()),
                    quote(sig.binary_name(p))
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use gtshape_core::structure::{encode_graph, Graph, PredicateSignature};
    use gtshape_core::TruthValue::*;
    use std::sync::Arc;

    fn sig() -> Arc<PredicateSignature> {
        Arc::new(PredicateSignature::new(["RC", "T", "S"], ["on", "next"]).unwrap())
    }

    #[test]
    fn empty() {
        let s = LogicalStructure::new(sig());
        assert_eq!(to_dot(&s, "e"), "digraph \"e\" {\n}\n");
    }

    #[test]
    fn rail_graph() {
        let mut g = Graph::new();
        for (n, t) in [("r1", "RC"), ("r2", "RC"), ("s1", "S"), ("s2", "S"), ("t1", "T"), ("t2", "T")] {
            g.add_loop(n, t);
        }
        for (a, p, b) in [
            ("r1", "on", "s1"),
            ("r2", "on", "t2"),
            ("s1", "next", "t1"),
            ("t1", "next", "t2"),
            ("t2", "next", "s2"),
            ("s2", "next", "s1"),
        ] {
            g.add_edge(a, p, b);
        }
        let dot = to_dot(&encode_graph(&g, &sig()).unwrap(), "g");
        assert_eq!(dot.matches(" [label=").count(), 12);
        assert_eq!(dot.matches("->").count(), 6);
        assert!(!dot.contains("dashed"));
        assert!(dot.contains("\"r1\" [label=\"r1\\nRC\"];"));
    }

    #[test]
    fn maybe_values() {
        let sig = sig();
        let mut s = LogicalStructure::new(sig.clone());
        let r = s.add_node("r", Maybe).unwrap();
        let t = s.add_node("t", False).unwrap();
        s.set_unary(1, r, True);
        s.set_unary(2, t, Maybe);
        s.set_binary(0, r, t, Maybe);
        let dot = to_dot(&s, "x");
        assert!(dot.contains("\"r\" [label=\"r\\nRC\", style=dashed];"));
        assert!(dot.contains("\"t\" [label=\"t\\nT?\"];"));
        assert!(dot.contains("\"r\" -> \"t\" [label=\"on\", style=dashed];"));
        assert_eq!(dot, to_dot(&s, "x"));
    }
}
