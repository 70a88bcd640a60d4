use std::collections::BTreeMap;

use super::{ConcreteMatch, GraphRule};
use crate::formula::Assignment;
use crate::kleene::TruthValue;
use crate::structure::{encode_graph, Graph, LogicalStructure, NodeId, PredRef};

struct Pattern {
    names: Vec<NodeId>,
    /// unary predicate indices required at each node
    loops: Vec<Vec<usize>>,
    /// (p, source, target) over positions in `names`
    edges: Vec<(usize, usize, usize)>,
}

impl Pattern {
    fn new(rule: &GraphRule) -> Self {
        let sig = rule.signature();
        let names: Vec<NodeId> = rule.lhs().nodes().iter().cloned().collect();
        let pos = |n: &NodeId| names.binary_search(n).expect("edge endpoint is a node");
        let mut loops = vec![Vec::new(); names.len()];
        let mut edges = Vec::new();
        for e in rule.lhs().edges() {
            match sig.lookup(&e.label) {
                Some(PredRef::Unary(p)) => loops[pos(&e.source)].push(p),
                Some(PredRef::Binary(p)) => edges.push((p, pos(&e.source), pos(&e.target))),
                None => unreachable!("rule labels are validated"),
            }
        }
        Pattern { names, loops, edges }
    }

    /// Nodes by descending degree, ties in name order.
    fn search_order(&self) -> Vec<usize> {
        let mut degree = vec![0usize; self.names.len()];
        for (i, l) in self.loops.iter().enumerate() {
            degree[i] += l.len();
        }
        for &(_, a, b) in &self.edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut order: Vec<usize> = (0..self.names.len()).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(degree[i]), i));
        order
    }
}

const FREE: usize = usize::MAX;

struct ShapeSearch<'a> {
    s: &'a LogicalStructure,
    pat: &'a Pattern,
    order: Vec<usize>,
    image: Vec<usize>,
    found: Vec<(Vec<usize>, TruthValue)>,
}

impl ShapeSearch<'_> {
    /// Value contributed by placing L-node `i` on `u`; `False` prunes.
    fn place(&self, i: usize, u: usize) -> TruthValue {
        let s = self.s;
        let mut val = !s.sm(u);
        for &p in &self.pat.loops[i] {
            val = val & s.unary(p, u);
        }
        for &(p, a, b) in &self.pat.edges {
            let (ia, ib) = (
                if a == i { u } else { self.image[a] },
                if b == i { u } else { self.image[b] },
            );
            if (a == i || b == i) && ia != FREE && ib != FREE {
                val = val & s.binary(p, ia, ib);
            }
        }
        for (k, &img) in self.image.iter().enumerate() {
            if k != i && img == u {
                // ¬(n_i = n_k) on a shared image is sm(u)
                val = val & s.sm(u);
            }
        }
        val
    }

    fn run(&mut self, depth: usize, acc: TruthValue) {
        if depth == self.order.len() {
            self.found.push((self.image.clone(), acc));
            return;
        }
        let i = self.order[depth];
        for u in 0..self.s.len() {
            let v = self.place(i, u);
            if v == TruthValue::False {
                continue;
            }
            self.image[i] = u;
            self.run(depth + 1, acc & v);
            self.image[i] = FREE;
        }
    }
}

/// All assignments of left-hand side nodes under which the production
/// formula is not 0, with its value, ordered lexicographically by the images
/// of the (sorted) left-hand side nodes.
pub fn find_matchings(s: &LogicalStructure, rule: &GraphRule) -> Vec<(Assignment, TruthValue)> {
    let pat = Pattern::new(rule);
    let mut search = ShapeSearch {
        s,
        order: pat.search_order(),
        image: vec![FREE; pat.names.len()],
        pat: &pat,
        found: Vec::new(),
    };
    search.run(0, TruthValue::True);
    let mut found = search.found;
    found.sort();
    found
        .into_iter()
        .map(|(img, v)| {
            let m = pat
                .names
                .iter()
                .zip(img)
                .map(|(n, u)| (n.to_string(), u))
                .collect();
            (m, v)
        })
        .collect()
}

/// Injective matchings of the rule's left-hand side in a concrete graph:
/// every core edge and type loop is present, and every guard's meaning
/// formula holds at the matched node.
pub fn find_concrete_matchings(g: &Graph, rule: &GraphRule) -> Vec<ConcreteMatch> {
    let sig = rule.signature();
    let lhs_nodes: Vec<&NodeId> = rule.lhs().nodes().iter().collect();
    let host: Vec<&NodeId> = g.nodes().iter().collect();
    let core_edges: Vec<_> = rule.lhs().edges().iter().filter(|e| !sig.is_instrumentation_name(&e.label)).collect();
    let mut results = Vec::new();
    let mut current: BTreeMap<NodeId, NodeId> = BTreeMap::new();

    fn extend(
        k: usize,
        lhs_nodes: &[&NodeId],
        host: &[&NodeId],
        core_edges: &[&crate::structure::Edge],
        g: &Graph,
        current: &mut BTreeMap<NodeId, NodeId>,
        results: &mut Vec<ConcreteMatch>,
    ) {
        if k == lhs_nodes.len() {
            results.push(current.clone());
            return;
        }
        let n = lhs_nodes[k];
        for &h in host {
            if current.values().any(|x| x == h) {
                continue;
            }
            current.insert(n.clone(), h.clone());
            let ok = core_edges.iter().all(|e| match (current.get(&e.source), current.get(&e.target)) {
                (Some(a), Some(b)) if e.source == *n || e.target == *n => {
                    g.contains_edge(a.as_str(), &e.label, b.as_str())
                }
                _ => true,
            });
            if ok {
                extend(k + 1, lhs_nodes, host, core_edges, g, current, results);
            }
            current.remove(n);
        }
    }

    extend(0, &lhs_nodes, &host, &core_edges, g, &mut current, &mut results);

    let guards: Vec<_> = rule.guards().collect();
    if guards.is_empty() || results.is_empty() {
        return results;
    }
    let Ok(enc) = encode_graph(g, sig) else {
        return Vec::new();
    };
    results.retain(|m| {
        guards.iter().all(|e| {
            let u = enc.index_of(m[&e.source].as_str()).expect("image is a node");
            enc.value(&e.label, &[u]) == Some(TruthValue::True)
        })
    });
    results
}
