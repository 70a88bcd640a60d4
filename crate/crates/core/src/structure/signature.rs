use std::collections::HashMap;

use crate::formula::{Formula, FormulaError};

/// Name of the reserved summary predicate.
pub const SUMMARY: &str = "sm";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PredRef {
    Unary(usize),
    Binary(usize),
}

impl PredRef {
    pub fn arity(self) -> usize {
        match self {
            PredRef::Unary(_) => 1,
            PredRef::Binary(_) => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnaryKind {
    Summary,
    Core,
    /// Derived predicate; `meaning` has exactly `var` free.
    Instrumentation { var: String, meaning: Formula },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryPredicate {
    pub name: String,
    pub kind: UnaryKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("predicate `{0}` declared twice")]
    Duplicate(String),
    #[error("`sm` is reserved")]
    ReservedSummary,
    #[error("invalid predicate name `{0}`")]
    InvalidName(String),
    #[error("meaning formula of `{name}`: {source}")]
    Meaning {
        name: String,
        #[source]
        source: FormulaError,
    },
    #[error("meaning formula of `{name}` must have exactly `{var}` free, found {{{found}}}")]
    MeaningVariables {
        name: String,
        var: String,
        found: String,
    },
}

/// Core predicates (unary and binary, with `sm` always present at unary index 0)
/// plus unary instrumentation predicates with their meaning formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateSignature {
    unary: Vec<UnaryPredicate>,
    binary: Vec<String>,
    index: HashMap<String, PredRef>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "exists"
        && name != "forall"
}

impl PredicateSignature {
    pub fn new<U, B>(unary: U, binary: B) -> Result<Self, SignatureError>
    where
        U: IntoIterator,
        U::Item: Into<String>,
        B: IntoIterator,
        B::Item: Into<String>,
    {
        let mut sig = PredicateSignature {
            unary: vec![UnaryPredicate {
                name: SUMMARY.to_string(),
                kind: UnaryKind::Summary,
            }],
            binary: Vec::new(),
            index: HashMap::from([(SUMMARY.to_string(), PredRef::Unary(0))]),
        };
        for name in unary {
            sig.push_unary(name.into(), UnaryKind::Core)?;
        }
        for name in binary {
            let name = name.into();
            sig.check_fresh(&name)?;
            sig.index.insert(name.clone(), PredRef::Binary(sig.binary.len()));
            sig.binary.push(name);
        }
        Ok(sig)
    }

    fn check_fresh(&self, name: &str) -> Result<(), SignatureError> {
        if name == SUMMARY {
            return Err(SignatureError::ReservedSummary);
        }
        if !valid_name(name) {
            return Err(SignatureError::InvalidName(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(SignatureError::Duplicate(name.to_string()));
        }
        Ok(())
    }

    fn push_unary(&mut self, name: String, kind: UnaryKind) -> Result<(), SignatureError> {
        self.check_fresh(&name)?;
        self.index.insert(name.clone(), PredRef::Unary(self.unary.len()));
        self.unary.push(UnaryPredicate { name, kind });
        Ok(())
    }

    /// Adds an instrumentation predicate. The meaning formula may only mention
    /// predicates declared so far.
    pub fn add_instrumentation(
        &mut self,
        name: impl Into<String>,
        var: impl Into<String>,
        meaning: Formula,
    ) -> Result<(), SignatureError> {
        let name = name.into();
        let var = var.into();
        self.check_fresh(&name)?;
        meaning.check(self).map_err(|source| SignatureError::Meaning {
            name: name.clone(),
            source,
        })?;
        let free = meaning.free_vars();
        if free.len() > 1 || free.iter().any(|v| *v != var) {
            return Err(SignatureError::MeaningVariables {
                name,
                var,
                found: free.into_iter().collect::<Vec<_>>().join(", "),
            });
        }
        self.push_unary(name, UnaryKind::Instrumentation { var, meaning })
    }

    pub fn with_instrumentation(
        mut self,
        name: impl Into<String>,
        var: impl Into<String>,
        meaning: Formula,
    ) -> Result<Self, SignatureError> {
        self.add_instrumentation(name, var, meaning)?;
        Ok(self)
    }

    pub fn lookup(&self, name: &str) -> Option<PredRef> {
        self.index.get(name).copied()
    }

    pub fn unary_index(&self, name: &str) -> Option<usize> {
        match self.lookup(name)? {
            PredRef::Unary(i) => Some(i),
            PredRef::Binary(_) => None,
        }
    }

    pub fn binary_index(&self, name: &str) -> Option<usize> {
        match self.lookup(name)? {
            PredRef::Binary(i) => Some(i),
            PredRef::Unary(_) => None,
        }
    }

    /// All unary predicates; index 0 is `sm`.
    pub fn unary(&self) -> &[UnaryPredicate] {
        &self.unary
    }

    pub fn binary(&self) -> &[String] {
        &self.binary
    }

    pub fn unary_count(&self) -> usize {
        self.unary.len()
    }

    pub fn binary_count(&self) -> usize {
        self.binary.len()
    }

    pub fn unary_name(&self, i: usize) -> &str {
        &self.unary[i].name
    }

    pub fn binary_name(&self, i: usize) -> &str {
        &self.binary[i]
    }

    pub fn is_instrumentation(&self, i: usize) -> bool {
        matches!(self.unary[i].kind, UnaryKind::Instrumentation { .. })
    }

    pub fn is_instrumentation_name(&self, name: &str) -> bool {
        self.unary_index(name).is_some_and(|i| self.is_instrumentation(i))
    }

    /// Core unary predicates other than `sm`, by index.
    pub fn core_unary(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.unary.len()).filter(|&i| self.unary[i].kind == UnaryKind::Core)
    }

    /// `(index, name, variable, meaning)` for every instrumentation predicate.
    pub fn instrumentation(&self) -> impl Iterator<Item = (usize, &str, &str, &Formula)> {
        self.unary.iter().enumerate().filter_map(|(i, p)| match &p.kind {
            UnaryKind::Instrumentation { var, meaning } => Some((i, p.name.as_str(), var.as_str(), meaning)),
            _ => None,
        })
    }

    pub fn is_core_label(&self, name: &str) -> bool {
        match self.lookup(name) {
            Some(PredRef::Binary(_)) => true,
            Some(PredRef::Unary(i)) => self.unary[i].kind == UnaryKind::Core,
            None => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn summary_is_reserved() {
        let sig = PredicateSignature::new(["RC", "T", "S"], ["on", "next"]).unwrap();
        assert_eq!(sig.lookup("sm"), Some(PredRef::Unary(0)));
        assert_eq!(sig.unary_count(), 4);
        assert_eq!(sig.binary_count(), 2);
        assert_eq!(
            PredicateSignature::new(["sm"], Vec::<String>::new()),
            Err(SignatureError::ReservedSummary)
        );
        assert!(matches!(
            PredicateSignature::new(["on"], ["on"]),
            Err(SignatureError::Duplicate(_))
        ));
    }

    #[test]
    fn instrumentation_is_checked() {
        let sig = PredicateSignature::new(["RC", "T"], ["on"]).unwrap();
        let meaning = parse("T(v) & exists r1, r2: r1 != r2 & on(r1,v) & on(r2,v)").unwrap();
        let sig2 = sig.clone().with_instrumentation("is_colliding", "v", meaning).unwrap();
        assert!(sig2.is_instrumentation_name("is_colliding"));
        assert_eq!(sig2.instrumentation().count(), 1);
        assert_eq!(sig2.core_unary().count(), 2);

        let bad = parse("on(v,w)").unwrap();
        assert!(matches!(
            sig.clone().with_instrumentation("p", "v", bad),
            Err(SignatureError::MeaningVariables { .. })
        ));
        let unknown = parse("Q(v)").unwrap();
        assert!(matches!(
            sig.with_instrumentation("p", "v", unknown),
            Err(SignatureError::Meaning { .. })
        ));
    }
}
