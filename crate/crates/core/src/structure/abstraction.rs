//! Canonical abstraction ("blur"): nodes that agree on every unary predicate
//! are merged into one.
//!
//! The partition key is the full unary vector including `sm`. A merged block
//! with several members becomes a summary, which may make it agree with an
//! existing summary block; the merge is therefore repeated until no two nodes
//! share a vector.

use std::collections::HashMap;

use super::{LogicalStructure, NodeMap};
use crate::kleene::TruthValue;

fn merge_once(s: &LogicalStructure) -> Option<(LogicalStructure, NodeMap)> {
    let mut block_of: HashMap<Vec<TruthValue>, usize> = HashMap::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut map = Vec::with_capacity(s.len());
    for u in 0..s.len() {
        let b = *block_of.entry(s.unary_vector(u)).or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[b].push(u);
        map.push(b);
    }
    if blocks.len() == s.len() {
        return None;
    }
    let nodes = blocks.iter().map(|b| s.node(b[0]).clone()).collect();
    let join_over = |vals: &mut dyn Iterator<Item = TruthValue>| -> TruthValue {
        let first = vals.next().unwrap_or(TruthValue::False);
        vals.fold(first, TruthValue::info_join)
    };
    let merged = LogicalStructure::from_fn(
        s.signature_arc().clone(),
        nodes,
        |p, x| {
            let members = &blocks[x];
            if p == 0 {
                if members.len() > 1 || members.iter().any(|&u| s.is_summary(u)) {
                    TruthValue::Maybe
                } else {
                    s.sm(members[0])
                }
            } else {
                join_over(&mut members.iter().map(|&u| s.unary(p, u)))
            }
        },
        |p, x, y| {
            join_over(
                &mut blocks[x]
                    .iter()
                    .flat_map(|&u| blocks[y].iter().map(move |&v| (u, v)))
                    .map(|(u, v)| s.binary(p, u, v)),
            )
        },
    );
    Some((merged, NodeMap(map)))
}

/// Canonical abstraction of `s` with the block map that embeds `s` into it.
pub fn canonical_abstraction_with_map(s: &LogicalStructure) -> (LogicalStructure, NodeMap) {
    let mut current = s.clone();
    let mut map = NodeMap::identity(s.len());
    while let Some((next, step)) = merge_once(&current) {
        map = map.then(&step);
        current = next;
    }
    (current, map)
}

pub fn canonical_abstraction(s: &LogicalStructure) -> LogicalStructure {
    canonical_abstraction_with_map(s).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kleene::TruthValue::*;
    use crate::structure::{check_embedding, PredicateSignature};
    use std::sync::Arc;

    fn sig() -> Arc<PredicateSignature> {
        Arc::new(PredicateSignature::new(["T", "S"], ["next"]).unwrap())
    }

    #[test]
    fn merges_equal_vectors() {
        let sig = sig();
        let t = sig.unary_index("T").unwrap();
        let mut s = LogicalStructure::new(sig.clone());
        let t1 = s.add_node("t1", False).unwrap();
        let t2 = s.add_node("t2", False).unwrap();
        s.set_unary(t, t1, True);
        s.set_unary(t, t2, True);
        s.set_binary(0, t1, t2, True);
        s.set_binary(0, t2, t1, True);
        let (a, map) = canonical_abstraction_with_map(&s);
        assert_eq!(a.len(), 1);
        assert_eq!(a.node(0).as_str(), "t1");
        assert_eq!(a.sm(0), Maybe);
        assert_eq!(a.unary(t, 0), True);
        assert_eq!(a.binary(0, 0, 0), Maybe);
        assert_eq!(check_embedding(&s, &a, &map), Ok(true));
    }

    #[test]
    fn canonical_input_unchanged() {
        let sig = sig();
        let mut s = LogicalStructure::new(sig.clone());
        let a = s.add_node("a", False).unwrap();
        s.add_node("b", False).unwrap();
        s.set_unary(1, a, True);
        assert_eq!(canonical_abstraction(&s), s);
        let empty = LogicalStructure::new(sig);
        assert_eq!(canonical_abstraction(&empty), empty);
    }

    #[test]
    fn repeated_merge_reaches_fixpoint() {
        // two concrete T nodes and one summary T node collapse into one summary
        let sig = sig();
        let t = sig.unary_index("T").unwrap();
        let mut s = LogicalStructure::new(sig.clone());
        for (n, sm) in [("x", Maybe), ("y", False), ("z", False)] {
            let u = s.add_node(n, sm).unwrap();
            s.set_unary(t, u, True);
        }
        let (a, map) = canonical_abstraction_with_map(&s);
        assert_eq!(a.len(), 1);
        assert_eq!(map, NodeMap(vec![0, 0, 0]));
        assert_eq!(canonical_abstraction(&a), a);
    }

    #[test]
    fn concrete_and_summary_with_same_types_stay_apart() {
        let sig = sig();
        let t = sig.unary_index("T").unwrap();
        let mut s = LogicalStructure::new(sig.clone());
        for (n, sm) in [("x", Maybe), ("y", False)] {
            let u = s.add_node(n, sm).unwrap();
            s.set_unary(t, u, True);
        }
        assert_eq!(canonical_abstraction(&s), s);
    }
}
