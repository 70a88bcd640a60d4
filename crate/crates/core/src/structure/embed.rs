//! Embedding between structures.
//!
//! A surjective `f: U → U'` embeds `S` in `S'` when every predicate value of
//! `S` is ⊑ the value at the image tuple, and every node of `S'` with more than
//! one preimage is a summary node. Deciding whether some embedding exists is
//! NP-complete; [`find_embedding`] is a backtracking search pruned by
//! unary-vector compatibility.

use serde::{Deserialize, Serialize};

use super::LogicalStructure;
use crate::kleene::TruthValue;

/// A total map from the positions of one universe into another.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeMap(pub Vec<usize>);

impl NodeMap {
    pub fn identity(n: usize) -> Self {
        NodeMap((0..n).collect())
    }

    pub fn apply(&self, u: usize) -> usize {
        self.0[u]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `other ∘ self`
    pub fn then(&self, other: &NodeMap) -> NodeMap {
        NodeMap(self.0.iter().map(|&u| other.0[u]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("map covers {found} nodes, domain has {expected}")]
    NotTotal { expected: usize, found: usize },
    #[error("image {image} of node {node} is outside the codomain (size {size})")]
    OutOfRange { node: usize, image: usize, size: usize },
    #[error("structures have different signatures")]
    SignatureMismatch,
}

/// Whether `f` embeds `s` in `t`.
pub fn check_embedding(s: &LogicalStructure, t: &LogicalStructure, f: &NodeMap) -> Result<bool, EmbeddingError> {
    if s.signature() != t.signature() {
        return Err(EmbeddingError::SignatureMismatch);
    }
    if f.len() != s.len() {
        return Err(EmbeddingError::NotTotal {
            expected: s.len(),
            found: f.len(),
        });
    }
    if let Some((node, &image)) = f.0.iter().enumerate().find(|(_, &i)| i >= t.len()) {
        return Err(EmbeddingError::OutOfRange {
            node,
            image,
            size: t.len(),
        });
    }
    let mut preimages = vec![0usize; t.len()];
    for &i in &f.0 {
        preimages[i] += 1;
    }
    if preimages.contains(&0) {
        return Ok(false);
    }
    // (|f⁻¹(u')| > 1) ⊑ sm(u')
    if preimages
        .iter()
        .enumerate()
        .any(|(u, &c)| !TruthValue::from_bool(c > 1).info_le(t.sm(u)))
    {
        return Ok(false);
    }
    let sig = s.signature();
    for p in 0..sig.unary_count() {
        for u in 0..s.len() {
            if !s.unary(p, u).info_le(t.unary(p, f.apply(u))) {
                return Ok(false);
            }
        }
    }
    for p in 0..sig.binary_count() {
        for u in 0..s.len() {
            for v in 0..s.len() {
                if !s.binary(p, u, v).info_le(t.binary(p, f.apply(u), f.apply(v))) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

struct Search<'a> {
    s: &'a LogicalStructure,
    t: &'a LogicalStructure,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    image: Vec<usize>,
    preimages: Vec<usize>,
    uncovered: usize,
}

const UNASSIGNED: usize = usize::MAX;

impl Search<'_> {
    fn compatible(&self, u: usize, target: usize) -> bool {
        if self.preimages[target] > 0 && !self.t.is_summary(target) {
            return false;
        }
        let sig = self.s.signature();
        for p in 0..sig.binary_count() {
            if !self.s.binary(p, u, u).info_le(self.t.binary(p, target, target)) {
                return false;
            }
            for &w in &self.order {
                let iw = self.image[w];
                if iw == UNASSIGNED {
                    continue;
                }
                if !self.s.binary(p, u, w).info_le(self.t.binary(p, target, iw))
                    || !self.s.binary(p, w, u).info_le(self.t.binary(p, iw, target))
                {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return self.uncovered == 0;
        }
        if self.uncovered > self.order.len() - depth {
            return false;
        }
        let u = self.order[depth];
        for ci in 0..self.candidates[u].len() {
            let target = self.candidates[u][ci];
            if !self.compatible(u, target) {
                continue;
            }
            self.image[u] = target;
            self.preimages[target] += 1;
            if self.preimages[target] == 1 {
                self.uncovered -= 1;
            }
            if self.run(depth + 1) {
                return true;
            }
            if self.preimages[target] == 1 {
                self.uncovered += 1;
            }
            self.preimages[target] -= 1;
            self.image[u] = UNASSIGNED;
        }
        false
    }
}

/// Some embedding of `s` in `t`, or `None`. Deterministic for fixed universes.
pub fn find_embedding(s: &LogicalStructure, t: &LogicalStructure) -> Option<NodeMap> {
    if s.signature() != t.signature() || s.len() < t.len() {
        return None;
    }
    let sig = s.signature();
    let candidates: Vec<Vec<usize>> = (0..s.len())
        .map(|u| {
            (0..t.len())
                .filter(|&x| (0..sig.unary_count()).all(|p| s.unary(p, u).info_le(t.unary(p, x))))
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }
    // each target needs some node able to reach it
    let mut reachable = vec![false; t.len()];
    for c in &candidates {
        for &x in c {
            reachable[x] = true;
        }
    }
    if reachable.iter().any(|r| !r) {
        return None;
    }
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by_key(|&u| (candidates[u].len(), u));
    let mut search = Search {
        s,
        t,
        order,
        candidates,
        image: vec![UNASSIGNED; s.len()],
        preimages: vec![0; t.len()],
        uncovered: t.len(),
    };
    if search.run(0) {
        Some(NodeMap(search.image))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kleene::TruthValue::*;
    use crate::structure::PredicateSignature;
    use std::sync::Arc;

    fn sig() -> Arc<PredicateSignature> {
        Arc::new(PredicateSignature::new(["RC", "T", "S"], ["on"]).unwrap())
    }

    fn pair(sm_u: TruthValue) -> (LogicalStructure, LogicalStructure) {
        let sig = sig();
        let rc = sig.unary_index("RC").unwrap();
        let mut s = LogicalStructure::new(sig.clone());
        let a = s.add_node("a", False).unwrap();
        let b = s.add_node("b", False).unwrap();
        s.set_unary(rc, a, True);
        s.set_unary(rc, b, True);
        let mut t = LogicalStructure::new(sig);
        let u = t.add_node("u", sm_u).unwrap();
        t.set_unary(rc, u, True);
        (s, t)
    }

    #[test]
    fn identity_embeds() {
        let (s, t) = pair(Maybe);
        assert_eq!(check_embedding(&s, &s, &NodeMap::identity(2)), Ok(true));
        assert_eq!(check_embedding(&t, &t, &NodeMap::identity(1)), Ok(true));
    }

    #[test]
    fn collapse_needs_summary() {
        let (s, t) = pair(Maybe);
        assert_eq!(check_embedding(&s, &t, &NodeMap(vec![0, 0])), Ok(true));
        assert_eq!(find_embedding(&s, &t), Some(NodeMap(vec![0, 0])));
        let (s, t) = pair(False);
        assert_eq!(check_embedding(&s, &t, &NodeMap(vec![0, 0])), Ok(false));
        assert_eq!(find_embedding(&s, &t), None);
    }

    #[test]
    fn incompatible_types() {
        let sig = sig();
        let mut s = LogicalStructure::new(sig.clone());
        for (n, p) in [("a", "RC"), ("b", "T"), ("c", "S")] {
            let u = s.add_node(n, False).unwrap();
            s.set_unary(sig.unary_index(p).unwrap(), u, True);
        }
        let mut t = LogicalStructure::new(sig.clone());
        for n in ["x", "y"] {
            t.add_node(n, Maybe).unwrap();
        }
        assert_eq!(find_embedding(&s, &t), None);
    }

    #[test]
    fn errors() {
        let (s, t) = pair(Maybe);
        assert!(matches!(
            check_embedding(&s, &t, &NodeMap(vec![0])),
            Err(EmbeddingError::NotTotal { .. })
        ));
        assert!(matches!(
            check_embedding(&s, &t, &NodeMap(vec![0, 3])),
            Err(EmbeddingError::OutOfRange { .. })
        ));
    }

    #[test]
    fn surjectivity_required() {
        let (s, _) = pair(Maybe);
        let mut bigger = s.clone();
        bigger.add_node("c", False).unwrap();
        assert_eq!(check_embedding(&s, &bigger, &NodeMap(vec![0, 1])), Ok(false));
        assert_eq!(find_embedding(&s, &bigger), None);
    }
}
