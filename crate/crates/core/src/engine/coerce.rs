//! Constraint-driven sharpening.
//!
//! A constraint `body => head` fires under an assignment when the body
//! evaluates to 1. A ½ head is then set to its polarity; a head with the
//! opposite definite value makes the structure inconsistent.

use std::fmt;

use crate::formula::{Compiled, Formula, FormulaError};
use crate::kleene::TruthValue;
use crate::structure::{LogicalStructure, PredRef, PredicateSignature, SUMMARY};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstraintError {
    #[error("constraint head must be a possibly negated predicate atom")]
    HeadNotAtom,
    #[error("`sm` cannot be a constraint head")]
    SummaryHead,
    #[error("head variable `{0}` is not free in the body")]
    HeadVariable(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityConstraint {
    body: Formula,
    head: Formula,
    compiled: Compiled,
    pred: PredRef,
    /// head arguments as positions in `vars`
    args: Vec<usize>,
    positive: bool,
    /// free variables of the body, in sorted order
    vars: Vec<String>,
}

impl CompatibilityConstraint {
    pub fn new(body: Formula, head: Formula, sig: &PredicateSignature) -> Result<Self, ConstraintError> {
        body.check(sig)?;
        head.check(sig)?;
        let (atom, positive) = match &head {
            Formula::Not(inner) => (inner.as_ref(), false),
            f => (f, true),
        };
        let (pred, args) = match atom {
            Formula::Pred1(p, v) => (p.clone(), vec![v.clone()]),
            Formula::Pred2(p, a, b) => (p.clone(), vec![a.clone(), b.clone()]),
            _ => return Err(ConstraintError::HeadNotAtom),
        };
        if pred == SUMMARY {
            return Err(ConstraintError::SummaryHead);
        }
        let vars: Vec<String> = body.free_vars().into_iter().collect();
        let args = args
            .iter()
            .map(|a| vars.iter().position(|v| v == a).ok_or_else(|| ConstraintError::HeadVariable(a.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CompatibilityConstraint {
            compiled: Compiled::new(&body, &vars, sig)?,
            pred: sig.lookup(&pred).expect("checked above"),
            vars,
            body,
            head,
            args,
            positive,
        })
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    pub fn head(&self) -> &Formula {
        &self.head
    }
}

impl fmt::Display for CompatibilityConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}", self.body, self.head)
    }
}

/// `α_p(v) ⇒ p(v)` and `¬α_p(v) ⇒ ¬p(v)` for every instrumentation predicate.
pub fn derive_constraints(sig: &PredicateSignature) -> Vec<CompatibilityConstraint> {
    let mut out = Vec::new();
    for (_, name, var, meaning) in sig.instrumentation() {
        let atom = Formula::pred1(name, var);
        for (body, head) in [
            (meaning.clone(), atom.clone()),
            (Formula::not(meaning.clone()), Formula::not(atom)),
        ] {
            out.push(CompatibilityConstraint::new(body, head, sig).expect("meaning formulas have exactly one free variable"));
        }
    }
    out
}

enum Fire {
    Unchanged,
    Sharpened,
    Inconsistent,
}

fn fire(s: &mut LogicalStructure, c: &CompatibilityConstraint, env: &mut [usize]) -> Fire {
    let want = TruthValue::from_bool(c.positive);
    let current = match (c.pred, c.args.as_slice()) {
        (PredRef::Unary(p), &[u]) => s.unary(p, env[u]),
        (PredRef::Binary(p), &[u, v]) => s.binary(p, env[u], env[v]),
        _ => unreachable!("checked at construction"),
    };
    if current == want || c.compiled.eval(s, env) != TruthValue::True {
        return Fire::Unchanged;
    }
    if current != TruthValue::Maybe {
        return Fire::Inconsistent;
    }
    match (c.pred, c.args.as_slice()) {
        (PredRef::Unary(p), &[u]) => s.set_unary(p, env[u], want),
        (PredRef::Binary(p), &[u, v]) => s.set_binary(p, env[u], env[v], want),
        _ => unreachable!(),
    }
    Fire::Sharpened
}

/// Sharpens `s` to a fixpoint of `constraints`, or `None` if some
/// constraint is definitely violated.
pub fn coerce(s: &LogicalStructure, constraints: &[CompatibilityConstraint]) -> Option<LogicalStructure> {
    let mut s = s.clone();
    let n = s.len();
    let mut env = Vec::new();
    loop {
        let mut changed = false;
        for c in constraints {
            let k = c.vars.len();
            if n == 0 && k > 0 {
                continue;
            }
            env.clear();
            env.resize(c.compiled.slots(), 0);
            loop {
                match fire(&mut s, c, &mut env) {
                    Fire::Unchanged => {}
                    Fire::Sharpened => changed = true,
                    Fire::Inconsistent => return None,
                }
                // next assignment of the free variables
                let mut i = 0;
                while i < k {
                    env[i] += 1;
                    if env[i] < n {
                        break;
                    }
                    env[i] = 0;
                    i += 1;
                }
                if i == k {
                    break;
                }
            }
        }
        if !changed {
            return Some(s);
        }
    }
}
