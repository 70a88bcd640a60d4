//! Bounded breadth-first exploration of concrete graphs, used as an oracle.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::rules::{apply_concrete, find_concrete_matchings, ConcreteMatch, ForbiddenPattern, GraphRule};
use crate::structure::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConcreteVerdict {
    Safe,
    Unsafe,
    BoundExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteViolation {
    pub pattern: String,
    pub graph: Graph,
    /// rule applications from the start graph
    pub steps: Vec<(String, ConcreteMatch)>,
}

#[derive(Debug, Clone)]
pub struct ConcreteResult {
    pub verdict: ConcreteVerdict,
    /// distinct graphs found, up to isomorphism, in discovery order
    pub graphs: Vec<Graph>,
    pub transitions: usize,
    pub violation: Option<ConcreteViolation>,
}

/// Per-node label profile: loops, outgoing and incoming labels.
type NodeProfile = (Vec<String>, Vec<String>, Vec<String>);

fn profiles(g: &Graph) -> BTreeMap<&NodeId, NodeProfile> {
    let mut out: BTreeMap<&NodeId, NodeProfile> = g.nodes().iter().map(|n| (n, Default::default())).collect();
    for e in g.edges() {
        if e.is_loop() {
            out.get_mut(&e.source).unwrap().0.push(e.label.clone());
        } else {
            out.get_mut(&e.source).unwrap().1.push(e.label.clone());
            out.get_mut(&e.target).unwrap().2.push(e.label.clone());
        }
    }
    for p in out.values_mut() {
        p.0.sort();
        p.1.sort();
        p.2.sort();
    }
    out
}

fn invariant(g: &Graph) -> Vec<NodeProfile> {
    let mut v: Vec<NodeProfile> = profiles(g).into_values().collect();
    v.sort();
    v
}

/// Node indices, in node order, and the incident edges of every node as
/// `(label, other end, outgoing)`; loops appear once with `other == self`.
/// Per node: (label, neighbour, outgoing).
type Adjacency<'a> = Vec<Vec<(&'a str, usize, bool)>>;

fn adjacency(g: &Graph) -> (Vec<&NodeId>, Adjacency<'_>) {
    let nodes: Vec<&NodeId> = g.nodes().iter().collect();
    let index: HashMap<&NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut adj = vec![Vec::new(); nodes.len()];
    for e in g.edges() {
        let (a, b) = (index[&e.source], index[&e.target]);
        adj[a].push((e.label.as_str(), b, true));
        if a != b {
            adj[b].push((e.label.as_str(), a, false));
        }
    }
    (nodes, adj)
}

/// Colour refinement run on both graphs at once, so colours are comparable.
fn refine(adj: [&Adjacency<'_>; 2]) -> [Vec<usize>; 2] {
    let mut colours = [vec![0; adj[0].len()], vec![0; adj[1].len()]];
    let mut classes = 0;
    loop {
        #[allow(clippy::type_complexity)]
        let mut names: BTreeMap<(usize, Vec<(&str, bool, bool, usize)>), usize> = BTreeMap::new();
        let sigs: Vec<Vec<_>> = (0..2)
            .map(|k| {
                adj[k]
                    .iter()
                    .enumerate()
                    .map(|(u, es)| {
                        let mut n: Vec<_> = es.iter().map(|&(l, v, out)| (l, out, v == u, colours[k][v])).collect();
                        n.sort();
                        (colours[k][u], n)
                    })
                    .collect()
            })
            .collect();
        for sig in sigs.iter().flatten() {
            let next = names.len();
            names.entry(sig.clone()).or_insert(next);
        }
        for k in 0..2 {
            colours[k] = sigs[k].iter().map(|sig| names[sig]).collect();
        }
        if names.len() == classes {
            return colours;
        }
        classes = names.len();
    }
}

/// Whether two graphs are equal up to renaming nodes.
pub fn graphs_isomorphic(g: &Graph, h: &Graph) -> bool {
    if g.node_count() != h.node_count() || g.edge_count() != h.edge_count() {
        return false;
    }
    let (_, ga) = adjacency(g);
    let (hn, ha) = adjacency(h);
    let [gc, hc] = refine([&ga, &ha]);
    let histogram = |c: &[usize]| {
        let mut c = c.to_vec();
        c.sort_unstable();
        c
    };
    if histogram(&gc) != histogram(&hc) {
        return false;
    }

    // place nodes so that each one is adjacent to an earlier one if possible
    let n = ga.len();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    for root in 0..n {
        if placed[root] {
            continue;
        }
        placed[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &(_, v, _) in &ga[u] {
                if !placed[v] {
                    placed[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }

    struct Search<'a> {
        ga: &'a [Vec<(&'a str, usize, bool)>],
        h: &'a Graph,
        hn: &'a [&'a NodeId],
        gc: &'a [usize],
        hc: &'a [usize],
        order: &'a [usize],
        image: Vec<Option<usize>>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        fn run(&mut self, i: usize) -> bool {
            let Some(&u) = self.order.get(i) else {
                return true;
            };
            for x in 0..self.hn.len() {
                if self.used[x] || self.gc[u] != self.hc[x] {
                    continue;
                }
                self.image[u] = Some(x);
                let ok = self.ga[u].iter().all(|&(l, v, out)| match self.image[v] {
                    Some(y) => {
                        let (a, b) = if out { (x, y) } else { (y, x) };
                        self.h.contains_edge(self.hn[a].as_str(), l, self.hn[b].as_str())
                    }
                    None => true,
                });
                if ok {
                    self.used[x] = true;
                    if self.run(i + 1) {
                        return true;
                    }
                    self.used[x] = false;
                }
                self.image[u] = None;
            }
            false
        }
    }

    // equal edge counts plus an injective edge-preserving bijection suffice
    Search {
        ga: &ga,
        h,
        hn: &hn,
        gc: &gc,
        hc: &hc,
        order: &order,
        image: vec![None; n],
        used: vec![false; n],
    }
    .run(0)
}

/// Explores all graphs reachable from `g0`, up to `bound` distinct graphs.
pub fn concrete_explore(
    g0: &Graph,
    rules: &[GraphRule],
    patterns: &[ForbiddenPattern],
    bound: usize,
) -> Result<ConcreteResult, EngineError> {
    if bound == 0 {
        return Err(EngineError::ZeroBound);
    }
    let mut graphs: Vec<Graph> = Vec::new();
    let mut steps_to: Vec<Vec<(String, ConcreteMatch)>> = Vec::new();
    let mut buckets: HashMap<Vec<NodeProfile>, Vec<usize>> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut transitions = 0;

    let mut add = |g: Graph,
                   steps: Vec<(String, ConcreteMatch)>,
                   graphs: &mut Vec<Graph>,
                   steps_to: &mut Vec<Vec<(String, ConcreteMatch)>>|
     -> Option<usize> {
        let bucket = buckets.entry(invariant(&g)).or_default();
        if bucket.iter().any(|&i| graphs_isomorphic(&graphs[i], &g)) {
            return None;
        }
        bucket.push(graphs.len());
        graphs.push(g);
        steps_to.push(steps);
        Some(graphs.len() - 1)
    };

    let check = |g: &Graph| {
        patterns
            .iter()
            .find(|f| !find_concrete_matchings(g, f.as_rule()).is_empty())
            .map(|f| f.name().to_string())
    };

    let root = add(g0.clone(), Vec::new(), &mut graphs, &mut steps_to).expect("first graph is new");
    queue.push_back(root);
    let result = |verdict, graphs, transitions, violation| {
        Ok(ConcreteResult {
            verdict,
            graphs,
            transitions,
            violation,
        })
    };
    if let Some(pattern) = check(g0) {
        let violation = ConcreteViolation {
            pattern,
            graph: g0.clone(),
            steps: Vec::new(),
        };
        return result(ConcreteVerdict::Unsafe, graphs, transitions, Some(violation));
    }
    while let Some(i) = queue.pop_front() {
        let g = graphs[i].clone();
        for rule in rules {
            for m in find_concrete_matchings(&g, rule) {
                let h = apply_concrete(&g, rule, &m)?;
                transitions += 1;
                let mut steps = steps_to[i].clone();
                steps.push((rule.name().to_string(), m));
                let Some(j) = add(h, steps, &mut graphs, &mut steps_to) else {
                    continue;
                };
                if let Some(pattern) = check(&graphs[j]) {
                    let violation = ConcreteViolation {
                        pattern,
                        graph: graphs[j].clone(),
                        steps: steps_to[j].clone(),
                    };
                    return result(ConcreteVerdict::Unsafe, graphs, transitions, Some(violation));
                }
                if graphs.len() > bound {
                    graphs.truncate(bound);
                    return result(ConcreteVerdict::BoundExceeded, graphs, transitions, None);
                }
                queue.push_back(j);
            }
        }
    }
    result(ConcreteVerdict::Safe, graphs, transitions, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{Edge, PredicateSignature};
    use std::sync::Arc;

    fn sig() -> Arc<PredicateSignature> {
        Arc::new(PredicateSignature::new(["RC", "T"], ["on", "next"]).unwrap())
    }

    fn ring(n: usize, cabs: &[usize]) -> Graph {
        let mut g = Graph::new();
        for i in 0..n {
            g.add_loop(format!("t{i}").as_str(), "T");
            g.add_edge(format!("t{i}").as_str(), "next", format!("t{}", (i + 1) % n).as_str());
        }
        for (k, &i) in cabs.iter().enumerate() {
            g.add_loop(format!("r{k}").as_str(), "RC");
            g.add_edge(format!("r{k}").as_str(), "on", format!("t{i}").as_str());
        }
        g
    }

    fn move_rule(sig: &Arc<PredicateSignature>) -> GraphRule {
        let mut l = Graph::new();
        l.add_loop("r", "RC");
        l.add_loop("a", "T");
        l.add_loop("b", "T");
        l.add_edge("r", "on", "a");
        l.add_edge("a", "next", "b");
        let mut r = l.clone();
        r.remove_edge(&Edge::new("r", "on", "a"));
        r.add_edge("r", "on", "b");
        GraphRule::new("Move", l, r, sig.clone()).unwrap()
    }

    #[test]
    fn isomorphism() {
        assert!(graphs_isomorphic(&ring(3, &[0]), &ring(3, &[2])));
        assert!(!graphs_isomorphic(&ring(3, &[0]), &ring(4, &[0])));
        assert!(graphs_isomorphic(&ring(4, &[0, 1]), &ring(4, &[2, 3])));
        assert!(!graphs_isomorphic(&ring(4, &[0, 1]), &ring(4, &[0, 2])));
    }

    #[test]
    fn no_rules() {
        let g = ring(3, &[0]);
        let res = concrete_explore(&g, &[], &[], 10).unwrap();
        assert_eq!(res.verdict, ConcreteVerdict::Safe);
        assert_eq!(res.graphs, vec![g]);
    }

    #[test]
    fn ring_moves() {
        let sig = sig();
        // one cab on a symmetric ring: every position is isomorphic
        let res = concrete_explore(&ring(4, &[0]), &[move_rule(&sig)], &[], 100).unwrap();
        assert_eq!(res.verdict, ConcreteVerdict::Safe);
        assert_eq!(res.graphs.len(), 1);
        // two cabs: gaps {0}, {1, 3}, {2}
        let res = concrete_explore(&ring(4, &[0, 1]), &[move_rule(&sig)], &[], 100).unwrap();
        assert_eq!(res.graphs.len(), 3);
    }

    #[test]
    fn collision_and_bound() {
        let sig = sig();
        let mut f = Graph::new();
        f.add_loop("t", "T");
        f.add_loop("a", "RC");
        f.add_loop("b", "RC");
        f.add_edge("a", "on", "t");
        f.add_edge("b", "on", "t");
        let pattern = ForbiddenPattern::new("collision", f, sig.clone()).unwrap();
        let res = concrete_explore(&ring(4, &[0, 1]), &[move_rule(&sig)], &[pattern], 100).unwrap();
        assert_eq!(res.verdict, ConcreteVerdict::Unsafe);
        let v = res.violation.unwrap();
        assert_eq!(v.steps.len(), 1);
        let res = concrete_explore(&ring(4, &[0, 1]), &[move_rule(&sig)], &[], 2).unwrap();
        assert_eq!(res.verdict, ConcreteVerdict::BoundExceeded);
        assert!(concrete_explore(&ring(4, &[0]), &[], &[], 0).is_err());
    }

    #[test]
    fn isomorphism_beyond_refinement() {
        // one 6-cycle against two triangles: same colours everywhere
        let cycle = |len: usize, groups: usize| {
            let mut g = Graph::new();
            for k in 0..groups {
                for i in 0..len {
                    g.add_loop(format!("t{k}_{i}").as_str(), "T");
                    g.add_edge(format!("t{k}_{i}").as_str(), "next", format!("t{k}_{}", (i + 1) % len).as_str());
                }
            }
            g
        };
        assert!(!graphs_isomorphic(&cycle(6, 1), &cycle(3, 2)));
        assert!(graphs_isomorphic(&cycle(3, 2), &cycle(3, 2)));

        // many interchangeable cabs on one track
        let crowd: Vec<usize> = vec![0; 9];
        let mut renamed = Graph::new();
        for e in ring(3, &crowd).edges() {
            let r = |n: &NodeId| format!("x{}", n.as_str());
            renamed.add_edge(r(&e.source).as_str(), e.label.as_str(), r(&e.target).as_str());
        }
        assert!(graphs_isomorphic(&ring(3, &crowd), &renamed));
        assert!(!graphs_isomorphic(&ring(3, &crowd), &ring(3, &[0, 0, 0, 0, 0, 0, 0, 0, 1])));
    }
}
