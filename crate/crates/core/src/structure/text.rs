//! Text format for structures:
//!
//! ```text
//! structure <name>
//!   node <id> [sm=1/2]
//!   set <pred>(<id>) = 0|1/2|1
//!   set <pred>(<id>,<id>) = 0|1/2|1
//! end
//! ```
//!
//! Unlisted values are 0.

use std::fmt::Write as _;
use std::sync::Arc;

use super::{LogicalStructure, PredRef, PredicateSignature};
use crate::kleene::TruthValue;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct StructureParseError {
    pub line: usize,
    pub message: String,
}

pub(crate) fn is_node_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

/// Splits `name(a)` / `name(a,b)` into its parts.
pub(crate) fn split_application(text: &str) -> Option<(&str, Vec<&str>)> {
    let text = text.trim();
    let open = text.find('(')?;
    let inner = text.strip_suffix(')')?.get(open + 1..)?;
    let name = text[..open].trim();
    let args: Vec<&str> = inner.split(',').map(str::trim).collect();
    Some((name, args))
}

impl LogicalStructure {
    pub fn to_text(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "structure {name}");
        for (u, id) in self.nodes().iter().enumerate() {
            if self.is_summary(u) {
                let _ = writeln!(out, "  node {id} sm=1/2");
            } else {
                let _ = writeln!(out, "  node {id}");
            }
        }
        let sig = self.signature();
        for p in 1..sig.unary_count() {
            for u in 0..self.len() {
                let v = self.unary(p, u);
                if v != TruthValue::False {
                    let _ = writeln!(out, "  set {}({}) = {v}", sig.unary_name(p), self.node(u));
                }
            }
        }
        for p in 0..sig.binary_count() {
            for u in 0..self.len() {
                for w in 0..self.len() {
                    let v = self.binary(p, u, w);
                    if v != TruthValue::False {
                        let _ = writeln!(
                            out,
                            "  set {}({},{}) = {v}",
                            sig.binary_name(p),
                            self.node(u),
                            self.node(w)
                        );
                    }
                }
            }
        }
        out.push_str("end\n");
        out
    }
}

/// Parses the body lines of a structure block (between the header and `end`).
/// Each entry is `(line number, text)` with comments already removed.
pub(crate) fn parse_structure_body(
    sig: &Arc<PredicateSignature>,
    lines: &[(usize, &str)],
) -> Result<LogicalStructure, StructureParseError> {
    let mut s = LogicalStructure::new(sig.clone());
    let err = |line: usize, message: String| StructureParseError { line, message };
    for &(line, text) in lines {
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix("node ") {
            let mut parts = rest.split_whitespace();
            let id = parts.next().unwrap_or("");
            if !is_node_name(id) {
                return Err(err(line, format!("invalid node name `{id}`")));
            }
            let sm = match parts.next() {
                None => TruthValue::False,
                Some(attr) => match attr.strip_prefix("sm=") {
                    Some(v) => v.parse().map_err(|e| err(line, format!("{e}")))?,
                    None => return Err(err(line, format!("unexpected `{attr}`"))),
                },
            };
            if let Some(extra) = parts.next() {
                return Err(err(line, format!("unexpected `{extra}`")));
            }
            s.add_node(id, sm).map_err(|e| err(line, e.to_string()))?;
        } else if let Some(rest) = text.strip_prefix("set ") {
            let (lhs, rhs) = rest
                .split_once('=')
                .ok_or_else(|| err(line, "expected `set p(..) = value`".into()))?;
            let value: TruthValue = rhs.parse().map_err(|e| err(line, format!("{e}")))?;
            let (pred, args) =
                split_application(lhs).ok_or_else(|| err(line, format!("malformed atom `{}`", lhs.trim())))?;
            let idx: Vec<usize> = args
                .iter()
                .map(|a| s.index_of(a).ok_or_else(|| err(line, format!("unknown node `{a}`"))))
                .collect::<Result<_, _>>()?;
            match (sig.lookup(pred), idx.as_slice()) {
                (None, _) => return Err(err(line, format!("unknown predicate `{pred}`"))),
                (Some(PredRef::Unary(0)), [u]) => {
                    if value == TruthValue::True {
                        return Err(err(line, "`sm` can only be 0 or 1/2".into()));
                    }
                    s.set_unary(0, *u, value);
                }
                (Some(PredRef::Unary(p)), [u]) => s.set_unary(p, *u, value),
                (Some(PredRef::Binary(p)), [u, v]) => s.set_binary(p, *u, *v, value),
                (Some(r), _) => {
                    return Err(err(
                        line,
                        format!("predicate `{pred}` has arity {}, used with {}", r.arity(), idx.len()),
                    ))
                }
            }
        } else {
            return Err(err(line, format!("unexpected `{text}` in structure")));
        }
    }
    Ok(s)
}

/// Parses one complete `structure <name> ... end` block.
pub fn parse_structure(
    text: &str,
    sig: &Arc<PredicateSignature>,
) -> Result<(String, LogicalStructure), StructureParseError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let Some(&(first, header)) = lines.first() else {
        return Err(StructureParseError {
            line: 1,
            message: "empty input".into(),
        });
    };
    let name = header
        .strip_prefix("structure ")
        .map(str::trim)
        .filter(|n| !n.is_empty())
        .ok_or_else(|| StructureParseError {
            line: first,
            message: "expected `structure <name>`".into(),
        })?;
    match lines.last() {
        Some(&(_, "end")) if lines.len() >= 2 => {}
        _ => {
            return Err(StructureParseError {
                line: lines.last().map_or(first, |l| l.0),
                message: "missing `end`".into(),
            })
        }
    }
    let s = parse_structure_body(sig, &lines[1..lines.len() - 1])?;
    Ok((name.to_string(), s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kleene::TruthValue::*;

    fn sig() -> Arc<PredicateSignature> {
        Arc::new(PredicateSignature::new(["RC", "T"], ["on"]).unwrap())
    }

    #[test]
    fn text_round_trip() {
        let sig = sig();
        let mut s = LogicalStructure::new(sig.clone());
        let r = s.add_node("r", Maybe).unwrap();
        let t = s.add_node("t.1", False).unwrap();
        s.set_unary(1, r, True);
        s.set_unary(2, t, True);
        s.set_binary(0, r, t, Maybe);
        let text = s.to_text("start");
        assert!(text.contains("node r sm=1/2"));
        assert!(text.contains("set on(r,t.1) = 1/2"));
        let (name, back) = parse_structure(&text, &sig).unwrap();
        assert_eq!(name, "start");
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_bad_input() {
        let sig = sig();
        let bad = |body: &str| parse_structure(&format!("structure x\n{body}\nend\n"), &sig).unwrap_err();
        assert_eq!(bad("  node a\n  set RC(b) = 1").line, 3);
        assert!(bad("  node a\n  set on(a) = 1").message.contains("arity"));
        assert!(bad("  node a\n  set sm(a) = 1").message.contains("sm"));
        assert!(bad("  node a sm=1").message.contains("sm"));
        assert!(bad("  node a\n  set Foo(a) = 1").message.contains("unknown predicate"));
        assert!(bad("  node a\n  set RC(a) = 2").message.contains("invalid truth value"));
        assert!(parse_structure("structure x\n node a\n", &sig).is_err());
    }
}
