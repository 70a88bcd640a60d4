//! Seeded generators for structures, formulas and rules, and a sampler for
//! 2-valued concretizations of a shape.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gtshape_core::formula::Formula;
use gtshape_core::rules::{ForbiddenPattern, GraphRule};
use gtshape_core::structure::{check_embedding, Graph, LogicalStructure, NodeId, NodeMap, PredicateSignature};
use gtshape_core::TruthValue::{self, *};

pub const VALUES: [TruthValue; 3] = [False, Maybe, True];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two node types `A`, `B`, binary `e`, `f`, no instrumentation.
pub fn plain_signature() -> Arc<PredicateSignature> {
    Arc::new(PredicateSignature::new(["A", "B"], ["e", "f"]).unwrap())
}

/// [`plain_signature`] plus `has_in(v) := exists u: e(u,v)`.
pub fn instrumented_signature() -> Arc<PredicateSignature> {
    Arc::new(
        PredicateSignature::new(["A", "B"], ["e", "f"])
            .unwrap()
            .with_instrumentation("has_in", "v", gtshape_core::formula::parse("exists u: e(u,v)").unwrap())
            .unwrap(),
    )
}

pub fn value(rng: &mut impl Rng, maybe: f64) -> TruthValue {
    if rng.gen_bool(maybe) {
        Maybe
    } else {
        TruthValue::from_bool(rng.gen())
    }
}

/// A structure with `1..=max_nodes` nodes. Each node is a summary with
/// probability `summary`; every other value is ½ with probability `maybe`.
pub fn random_structure(
    rng: &mut impl Rng,
    sig: &Arc<PredicateSignature>,
    max_nodes: usize,
    summary: f64,
    maybe: f64,
) -> LogicalStructure {
    let n = rng.gen_range(1..=max_nodes);
    let names = (0..n).map(|i| NodeId::new(&format!("n{i}"))).collect();
    let mut s = LogicalStructure::with_nodes(sig.clone(), names);
    for u in 0..n {
        s.set_unary(0, u, if rng.gen_bool(summary) { Maybe } else { False });
        for p in 1..sig.unary_count() {
            s.set_unary(p, u, value(rng, maybe));
        }
        for p in 0..sig.binary_count() {
            for v in 0..n {
                s.set_binary(p, u, v, value(rng, maybe));
            }
        }
    }
    s
}

/// A 2-valued structure: no summaries, no ½.
pub fn random_concrete(rng: &mut impl Rng, sig: &Arc<PredicateSignature>, max_nodes: usize) -> LogicalStructure {
    random_structure(rng, sig, max_nodes, 0.0, 0.0)
}

/// A formula over the predicates of `sig` whose free variables are among
/// `vars`. Quantifiers bind fresh `q0`, `q1`, ...
pub fn random_formula(rng: &mut impl Rng, sig: &PredicateSignature, vars: &[String], depth: usize) -> Formula {
    fn go(rng: &mut impl Rng, sig: &PredicateSignature, vars: &mut Vec<String>, depth: usize) -> Formula {
        let pick = |rng: &mut dyn rand::RngCore, vars: &[String]| vars.choose(rng).unwrap().clone();
        let leaf = depth == 0 || rng.gen_bool(0.25);
        if leaf || vars.is_empty() {
            if vars.is_empty() {
                return Formula::Const(*VALUES.choose(rng).unwrap());
            }
            return match rng.gen_range(0..6) {
                0 => Formula::Const(*VALUES.choose(rng).unwrap()),
                1 => Formula::eq(pick(rng, vars), pick(rng, vars)),
                2 | 3 => {
                    let p = rng.gen_range(1..sig.unary_count());
                    Formula::pred1(sig.unary_name(p), pick(rng, vars))
                }
                _ => {
                    let p = rng.gen_range(0..sig.binary_count());
                    Formula::pred2(sig.binary_name(p), pick(rng, vars), pick(rng, vars))
                }
            };
        }
        match rng.gen_range(0..6) {
            0 => Formula::not(go(rng, sig, vars, depth - 1)),
            1 => Formula::and(go(rng, sig, vars, depth - 1), go(rng, sig, vars, depth - 1)),
            2 => Formula::or(go(rng, sig, vars, depth - 1), go(rng, sig, vars, depth - 1)),
            3 => Formula::implies(go(rng, sig, vars, depth - 1), go(rng, sig, vars, depth - 1)),
            k => {
                let v = format!("q{}", vars.len());
                vars.push(v.clone());
                let body = go(rng, sig, vars, depth - 1);
                vars.pop();
                if k == 4 {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                }
            }
        }
    }
    go(rng, sig, &mut vars.to_vec(), depth)
}

/// A graph over the core labels of `sig`, nodes named `{prefix}{i}`.
pub fn random_graph(
    rng: &mut impl Rng,
    sig: &PredicateSignature,
    prefix: &str,
    nodes: usize,
    edge_prob: f64,
) -> Graph {
    let mut g = Graph::new();
    let names: Vec<String> = (0..nodes).map(|i| format!("{prefix}{i}")).collect();
    let types: Vec<&str> = sig.core_unary().map(|p| sig.unary_name(p)).collect();
    for n in &names {
        g.add_node(n.as_str());
        if rng.gen_bool(0.7) {
            g.add_loop(n.as_str(), *types.choose(rng).unwrap());
        }
    }
    for a in &names {
        for b in &names {
            for p in sig.binary() {
                if rng.gen_bool(edge_prob) {
                    g.add_edge(a.as_str(), p.as_str(), b.as_str());
                }
            }
        }
    }
    g
}

/// A rule with a left-hand side of 1 to 3 nodes. The right-hand side keeps
/// each node with probability 0.85, drops and adds core edges at random and
/// creates up to one node.
pub fn random_rule(rng: &mut impl Rng, sig: &Arc<PredicateSignature>, name: &str) -> GraphRule {
    let n = rng.gen_range(1..=3);
    let lhs = random_graph(rng, sig, "l", n, 0.2);
    let mut rhs = Graph::new();
    let kept: Vec<NodeId> = lhs.nodes().iter().filter(|_| rng.gen_bool(0.85)).cloned().collect();
    for v in &kept {
        rhs.add_node(v.clone());
        for t in lhs.loops(v) {
            rhs.add_loop(v.clone(), t);
        }
    }
    let mut nodes = kept.clone();
    if rng.gen_bool(0.3) {
        let c = NodeId::new("c0");
        rhs.add_node(c.clone());
        let types: Vec<&str> = sig.core_unary().map(|p| sig.unary_name(p)).collect();
        rhs.add_loop(c.clone(), *types.choose(rng).unwrap());
        nodes.push(c);
    }
    for e in lhs.edges() {
        let binary = sig.binary_index(&e.label).is_some();
        if binary && kept.contains(&e.source) && kept.contains(&e.target) && rng.gen_bool(0.6) {
            rhs.add_edge(e.source.clone(), e.label.as_str(), e.target.clone());
        }
    }
    for a in &nodes {
        for b in &nodes {
            for p in sig.binary() {
                if rng.gen_bool(0.15) {
                    rhs.add_edge(a.clone(), p.as_str(), b.clone());
                }
            }
        }
    }
    GraphRule::new(name, lhs, rhs, sig.clone()).expect("generated rules use declared labels")
}

/// A pattern graph of 1 to 3 nodes.
pub fn random_pattern(rng: &mut impl Rng, sig: &Arc<PredicateSignature>, name: &str) -> ForbiddenPattern {
    let n = rng.gen_range(1..=3);
    let g = random_graph(rng, sig, "p", n, 0.25);
    ForbiddenPattern::new(name, g, sig.clone()).expect("generated patterns use declared labels")
}

/// Fills the instrumentation predicates of a 2-valued structure from their
/// meaning formulas.
pub fn instrument(s: &mut LogicalStructure) {
    let sig = s.signature_arc().clone();
    for (p, _, var, meaning) in sig.instrumentation() {
        for u in 0..s.len() {
            let m = [(var, u)].into_iter().collect();
            let v = meaning.evaluate(s, &m).expect("meaning formulas are well formed");
            s.set_unary(p, u, v);
        }
    }
}

/// A structure that embeds into `s`, with the embedding. Each summary node
/// may get a second copy (never more than `max_nodes` nodes in total); each
/// ½ value stays ½ with probability `keep_maybe` and is
/// resolved at random otherwise (`sm` only to 0). Instrumentation is refined like any other
/// predicate, so the result need not satisfy the meaning formulas.
pub fn refine(
    rng: &mut impl Rng,
    s: &LogicalStructure,
    max_nodes: usize,
    keep_maybe: f64,
) -> (LogicalStructure, NodeMap) {
    let mut origin: Vec<usize> = (0..s.len()).collect();
    for u in 0..s.len() {
        if s.sm(u) != False && origin.len() < max_nodes && rng.gen_bool(0.5) {
            origin.push(u);
        }
    }
    origin.sort();
    let mut names = Vec::new();
    for (i, &u) in origin.iter().enumerate() {
        let k = origin[..i].iter().filter(|&&x| x == u).count();
        names.push(NodeId::new(&if k == 0 {
            s.node(u).to_string()
        } else {
            format!("{}.c{k}", s.node(u))
        }));
    }
    let mut resolve = |v: TruthValue| match v {
        Maybe if !rng.gen_bool(keep_maybe) => TruthValue::from_bool(rng.gen()),
        v => v,
    };
    let sig = s.signature_arc().clone();
    let mut c = LogicalStructure::with_nodes(sig.clone(), names);
    for x in 0..origin.len() {
        let sm = match resolve(s.sm(origin[x])) {
            True => False,
            v => v,
        };
        c.set_unary(0, x, sm);
        for p in 1..sig.unary_count() {
            c.set_unary(p, x, resolve(s.unary(p, origin[x])));
        }
        for p in 0..sig.binary_count() {
            for y in 0..origin.len() {
                c.set_binary(p, x, y, resolve(s.binary(p, origin[x], origin[y])));
            }
        }
    }
    (c, NodeMap(origin))
}

/// A 2-valued structure that embeds into `s`, with the embedding:
/// [`refine`] without ½ values, instrumentation recomputed. `None` when the
/// recomputed instrumentation does not fit `s`.
pub fn concretize(rng: &mut impl Rng, s: &LogicalStructure, max_nodes: usize) -> Option<(LogicalStructure, NodeMap)> {
    let (mut c, f) = refine(rng, s, max_nodes, 0.0);
    for x in 0..c.len() {
        c.set_unary(0, x, False);
    }
    instrument(&mut c);
    check_embedding(&c, s, &f).ok()?.then_some((c, f))
}

pub fn embeds_into_any(s: &LogicalStructure, shapes: &[LogicalStructure]) -> bool {
    shapes
        .iter()
        .any(|t| gtshape_core::structure::find_embedding(s, t).is_some())
}
