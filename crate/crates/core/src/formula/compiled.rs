//! Formulas with predicates resolved to indices and variables to slots.
//!
//! Only built from formulas that passed [`Formula::check`], so evaluation
//! cannot fail and `&`/`|` may short-circuit.

use crate::kleene::TruthValue::{self, *};
use crate::structure::{LogicalStructure, PredRef, PredicateSignature};

use super::{Formula, FormulaError};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Node {
    Const(TruthValue),
    Unary(usize, usize),
    Binary(usize, usize, usize),
    Eq(usize, usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Exists(usize, Box<Node>),
    Forall(usize, Box<Node>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Compiled {
    root: Node,
    slots: usize,
}

struct Scope<'a> {
    sig: &'a PredicateSignature,
    names: Vec<&'a str>,
    slots: usize,
}

impl<'a> Scope<'a> {
    fn slot(&self, v: &str) -> Result<usize, FormulaError> {
        self.names
            .iter()
            .rposition(|n| *n == v)
            .ok_or_else(|| FormulaError::UnboundVariable(v.to_string()))
    }

    fn quantified(&mut self, v: &'a str, f: &'a Formula) -> Result<(usize, Node), FormulaError> {
        // slots follow the scope depth, so siblings reuse them
        let slot = self.names.len();
        self.names.push(v);
        self.slots = self.slots.max(self.names.len());
        let body = self.node(f);
        self.names.pop();
        Ok((slot, body?))
    }

    fn node(&mut self, f: &'a Formula) -> Result<Node, FormulaError> {
        let sig = self.sig;
        let pred = |p: &str| sig.lookup(p).ok_or_else(|| FormulaError::UnknownPredicate(p.to_string()));
        let bin = |a: Node, b: Node| (Box::new(a), Box::new(b));
        Ok(match f {
            Formula::Const(c) => Node::Const(*c),
            Formula::Pred1(p, v) => match pred(p)? {
                PredRef::Unary(i) => Node::Unary(i, self.slot(v)?),
                PredRef::Binary(_) => {
                    return Err(FormulaError::ArityMismatch { name: p.clone(), expected: 2, found: 1 })
                }
            },
            Formula::Pred2(p, a, b) => match pred(p)? {
                PredRef::Binary(i) => Node::Binary(i, self.slot(a)?, self.slot(b)?),
                PredRef::Unary(_) => {
                    return Err(FormulaError::ArityMismatch { name: p.clone(), expected: 1, found: 2 })
                }
            },
            Formula::Eq(a, b) => Node::Eq(self.slot(a)?, self.slot(b)?),
            Formula::Not(g) => Node::Not(Box::new(self.node(g)?)),
            Formula::And(a, b) => {
                let (a, b) = bin(self.node(a)?, self.node(b)?);
                Node::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(self.node(a)?, self.node(b)?);
                Node::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(self.node(a)?, self.node(b)?);
                Node::Implies(a, b)
            }
            Formula::Exists(v, g) => {
                let (slot, g) = self.quantified(v, g)?;
                Node::Exists(slot, Box::new(g))
            }
            Formula::Forall(v, g) => {
                let (slot, g) = self.quantified(v, g)?;
                Node::Forall(slot, Box::new(g))
            }
        })
    }
}

impl Compiled {
    /// Free variable `free[i]` is read from slot `i`.
    pub(crate) fn new(f: &Formula, free: &[String], sig: &PredicateSignature) -> Result<Self, FormulaError> {
        let mut scope = Scope { sig, names: free.iter().map(String::as_str).collect(), slots: free.len() };
        let root = scope.node(f)?;
        Ok(Compiled { root, slots: scope.slots })
    }

    pub(crate) fn slots(&self) -> usize {
        self.slots
    }

    /// `env` must have at least [`Compiled::slots`] entries.
    pub(crate) fn eval(&self, s: &LogicalStructure, env: &mut [usize]) -> TruthValue {
        eval(&self.root, s, env)
    }
}

fn eval(n: &Node, s: &LogicalStructure, env: &mut [usize]) -> TruthValue {
    match n {
        Node::Const(c) => *c,
        Node::Unary(p, v) => s.unary(*p, env[*v]),
        Node::Binary(p, a, b) => s.binary(*p, env[*a], env[*b]),
        Node::Eq(a, b) => {
            if env[*a] != env[*b] {
                False
            } else if s.is_summary(env[*a]) {
                Maybe
            } else {
                True
            }
        }
        Node::Not(g) => eval(g, s, env).not(),
        Node::And(a, b) => match eval(a, s, env) {
            False => False,
            x => x.and(eval(b, s, env)),
        },
        Node::Or(a, b) => match eval(a, s, env) {
            True => True,
            x => x.or(eval(b, s, env)),
        },
        Node::Implies(a, b) => match eval(a, s, env) {
            False => True,
            x => x.implies(eval(b, s, env)),
        },
        Node::Exists(v, g) => {
            let mut acc = False;
            for u in 0..s.len() {
                env[*v] = u;
                acc = acc.or(eval(g, s, env));
                if acc == True {
                    break;
                }
            }
            acc
        }
        Node::Forall(v, g) => {
            let mut acc = True;
            for u in 0..s.len() {
                env[*v] = u;
                acc = acc.and(eval(g, s, env));
                if acc == False {
                    break;
                }
            }
            acc
        }
    }
}
