//! First-order formulas over unary and binary predicates with equality.
//!
//! Formulas are evaluated in Kleene logic over a [`LogicalStructure`]. There is
//! no transitive closure and no function symbols; predicates have arity one or
//! two.

mod compiled;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::kleene::TruthValue;
use crate::structure::{LogicalStructure, PredRef, PredicateSignature};

pub(crate) use compiled::Compiled;
pub use parser::{parse, parse_checked, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(TruthValue),
    Pred1(String, String),
    Pred2(String, String, String),
    Eq(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{name}` has arity {expected}, used with {found} argument(s)")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}

/// Maps formula variables to universe positions of one particular structure.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment(BTreeMap<String, usize>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, var: impl Into<String>, node: usize) -> Option<usize> {
        self.0.insert(var.into(), node)
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.0.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Resolves node positions to node names in `s`.
    pub fn named(&self, s: &LogicalStructure) -> BTreeMap<String, String> {
        self.0
            .iter()
            .map(|(k, &v)| (k.clone(), s.node(v).to_string()))
            .collect()
    }
}

impl<S: Into<String>> FromIterator<(S, usize)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (S, usize)>>(iter: I) -> Self {
        Assignment(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

impl Formula {
    pub fn constant(v: TruthValue) -> Self {
        Formula::Const(v)
    }

    pub fn pred1(p: impl Into<String>, v: impl Into<String>) -> Self {
        Formula::Pred1(p.into(), v.into())
    }

    pub fn pred2(p: impl Into<String>, a: impl Into<String>, b: impl Into<String>) -> Self {
        Formula::Pred2(p.into(), a.into(), b.into())
    }

    pub fn eq(a: impl Into<String>, b: impl Into<String>) -> Self {
        Formula::Eq(a.into(), b.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, f: Formula) -> Self {
        Formula::Exists(v.into(), Box::new(f))
    }

    pub fn forall(v: impl Into<String>, f: Formula) -> Self {
        Formula::Forall(v.into(), Box::new(f))
    }

    /// Left-nested conjunction; the empty conjunction is `1`.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Const(TruthValue::True))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        let mut note = |v: &'a str, bound: &Vec<&'a str>| {
            if !bound.contains(&v) {
                out.insert(v.to_string());
            }
        };
        match self {
            Formula::Const(_) => {}
            Formula::Pred1(_, v) => note(v, bound),
            Formula::Pred2(_, a, b) | Formula::Eq(a, b) => {
                note(a, bound);
                note(b, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v);
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every predicate exists in `sig` with the arity it is used at.
    pub fn check(&self, sig: &PredicateSignature) -> Result<(), FormulaError> {
        let arity = |name: &str, found: usize| -> Result<(), FormulaError> {
            match sig.lookup(name) {
                None => Err(FormulaError::UnknownPredicate(name.to_string())),
                Some(r) if r.arity() != found => Err(FormulaError::ArityMismatch {
                    name: name.to_string(),
                    expected: r.arity(),
                    found,
                }),
                Some(_) => Ok(()),
            }
        };
        match self {
            Formula::Const(_) | Formula::Eq(..) => Ok(()),
            Formula::Pred1(p, _) => arity(p, 1),
            Formula::Pred2(p, _, _) => arity(p, 2),
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.check(sig),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
        }
    }

    pub fn predicates(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit_predicates(&mut |p| {
            out.insert(p);
        });
        out
    }

    fn visit_predicates<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Formula::Const(_) | Formula::Eq(..) => {}
            Formula::Pred1(p, _) | Formula::Pred2(p, _, _) => f(p),
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => {
                g.visit_predicates(f)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_predicates(f);
                b.visit_predicates(f);
            }
        }
    }

    /// Renames free occurrences of variables according to `map`.
    pub fn rename_free(&self, map: &BTreeMap<String, String>) -> Formula {
        let r = |v: &String| map.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            Formula::Const(c) => Formula::Const(*c),
            Formula::Pred1(p, v) => Formula::Pred1(p.clone(), r(v)),
            Formula::Pred2(p, a, b) => Formula::Pred2(p.clone(), r(a), r(b)),
            Formula::Eq(a, b) => Formula::Eq(r(a), r(b)),
            Formula::Not(f) => Formula::not(f.rename_free(map)),
            Formula::And(a, b) => Formula::and(a.rename_free(map), b.rename_free(map)),
            Formula::Or(a, b) => Formula::or(a.rename_free(map), b.rename_free(map)),
            Formula::Implies(a, b) => Formula::implies(a.rename_free(map), b.rename_free(map)),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let mut inner = map.clone();
                inner.remove(v);
                let body = f.rename_free(&inner);
                if matches!(self, Formula::Exists(..)) {
                    Formula::exists(v.clone(), body)
                } else {
                    Formula::forall(v.clone(), body)
                }
            }
        }
    }

    /// Kleene value of the formula in `s` under `m`.
    pub fn evaluate(&self, s: &LogicalStructure, m: &Assignment) -> Result<TruthValue, FormulaError> {
        let mut env: Vec<(&str, usize)> = m.iter().collect();
        self.eval(s, &mut env)
    }

    /// Evaluation with an explicit variable stack; later entries shadow earlier ones.
    pub(crate) fn eval<'a>(
        &'a self,
        s: &LogicalStructure,
        env: &mut Vec<(&'a str, usize)>,
    ) -> Result<TruthValue, FormulaError> {
        use TruthValue::*;
        fn lookup(env: &[(&str, usize)], v: &str) -> Result<usize, FormulaError> {
            env.iter()
                .rev()
                .find(|(n, _)| *n == v)
                .map(|(_, u)| *u)
                .ok_or_else(|| FormulaError::UnboundVariable(v.to_string()))
        }
        Ok(match self {
            Formula::Const(c) => *c,
            Formula::Pred1(p, v) => {
                let u = lookup(env, v)?;
                match s.signature().lookup(p) {
                    Some(PredRef::Unary(i)) => s.unary(i, u),
                    Some(_) => {
                        return Err(FormulaError::ArityMismatch {
                            name: p.clone(),
                            expected: 2,
                            found: 1,
                        })
                    }
                    None => return Err(FormulaError::UnknownPredicate(p.clone())),
                }
            }
            Formula::Pred2(p, a, b) => {
                let ua = lookup(env, a)?;
                let ub = lookup(env, b)?;
                match s.signature().lookup(p) {
                    Some(PredRef::Binary(i)) => s.binary(i, ua, ub),
                    Some(_) => {
                        return Err(FormulaError::ArityMismatch {
                            name: p.clone(),
                            expected: 1,
                            found: 2,
                        })
                    }
                    None => return Err(FormulaError::UnknownPredicate(p.clone())),
                }
            }
            Formula::Eq(a, b) => {
                let ua = lookup(env, a)?;
                let ub = lookup(env, b)?;
                if ua != ub {
                    False
                } else if s.is_summary(ua) {
                    Maybe
                } else {
                    True
                }
            }
            Formula::Not(f) => f.eval(s, env)?.not(),
            Formula::And(a, b) => a.eval(s, env)?.and(b.eval(s, env)?),
            Formula::Or(a, b) => a.eval(s, env)?.or(b.eval(s, env)?),
            Formula::Implies(a, b) => a.eval(s, env)?.implies(b.eval(s, env)?),
            Formula::Exists(v, f) => {
                let mut acc = False;
                for u in 0..s.len() {
                    env.push((v, u));
                    let r = f.eval(s, env);
                    env.pop();
                    acc = acc.or(r?);
                    if acc == True {
                        break;
                    }
                }
                if s.is_empty() {
                    f.check(s.signature())?;
                }
                acc
            }
            Formula::Forall(v, f) => {
                let mut acc = True;
                for u in 0..s.len() {
                    env.push((v, u));
                    let r = f.eval(s, env);
                    env.pop();
                    acc = acc.and(r?);
                    if acc == False {
                        break;
                    }
                }
                if s.is_empty() {
                    f.check(s.signature())?;
                }
                acc
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => 0,
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Formula::Const(c) => write!(f, "{c}")?,
            Formula::Pred1(p, v) => write!(f, "{p}({v})")?,
            Formula::Pred2(p, a, b) => write!(f, "{p}({a},{b})")?,
            Formula::Eq(a, b) => write!(f, "{a} == {b}")?,
            Formula::Not(g) => {
                f.write_str("!")?;
                // keep `!(a == b)` readable
                let inner = if matches!(**g, Formula::Eq(..)) { 6 } else { 4 };
                g.write_at(f, inner)?;
            }
            Formula::And(a, b) => {
                a.write_at(f, 3)?;
                f.write_str(" & ")?;
                b.write_at(f, 4)?;
            }
            Formula::Or(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(" | ")?;
                b.write_at(f, 3)?;
            }
            Formula::Implies(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(" -> ")?;
                b.write_at(f, 1)?;
            }
            Formula::Exists(v, g) => {
                write!(f, "exists {v}: ")?;
                g.write_at(f, 0)?;
            }
            Formula::Forall(v, g) => {
                write!(f, "forall {v}: ")?;
                g.write_at(f, 0)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}
