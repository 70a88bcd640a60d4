//! Model files.
//!
//! ```text
//! predicates
//!   unary RC, T, S
//!   binary on, next
//! end
//! instr empty(v) := T(v) & !(exists r: on(r,v))
//! constraint exists r: on(r,t) => !empty(t)
//!
//! structure s0
//!   node t sm=1/2
//!   set T(t) = 1
//! end
//! graph g0
//!   node r : RC
//!   node t : T
//!   edge on(r,t)
//! end
//! start s0
//!
//! rule Move
//!   lhs
//!     node r : RC
//!     ...
//!   rhs
//!     ...
//!   update empty(t) := ...
//! end
//!
//! pattern collision
//!   node t : T
//!   ...
//! end
//! ```
//!
//! `#` starts a comment. Declarations may appear in any order; instrumentation
//! meanings may only use predicates declared before them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use gtshape_core::engine::{coerce, derive_constraints, CompatibilityConstraint};
use gtshape_core::formula::{parse, parse_checked, Formula};
use gtshape_core::rules::{ForbiddenPattern, GraphRule, ShapeRule};
use gtshape_core::structure::{encode_graph, parse_structure, Graph, LogicalStructure, NodeId, PredRef, PredicateSignature};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("{file}:{line}: {message}")]
    Syntax { file: String, line: usize, message: String },
    #[error("no start structure")]
    NoStart,
    #[error("the start structure is inconsistent with the constraints")]
    InconsistentStart,
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy)]
struct Line<'a> {
    file: &'a str,
    no: usize,
    text: &'a str,
}

impl Line<'_> {
    fn err(&self, message: impl Into<String>) -> ModelError {
        ModelError::Syntax {
            file: self.file.to_string(),
            line: self.no,
            message: message.into(),
        }
    }
}

enum Item<'a> {
    Directive(Line<'a>),
    Block {
        kind: &'a str,
        name: &'a str,
        header: Line<'a>,
        body: Vec<Line<'a>>,
    },
}

const BLOCKS: [&str; 5] = ["predicates", "structure", "graph", "rule", "pattern"];

fn items<'a>(file: &'a str, text: &'a str) -> Result<Vec<Item<'a>>, ModelError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| Line {
            file,
            no: i + 1,
            text: l.split('#').next().unwrap_or("").trim(),
        })
        .filter(|l| !l.text.is_empty());
    let mut out = Vec::new();
    while let Some(line) = lines.next() {
        let (kw, rest) = line.text.split_once(char::is_whitespace).unwrap_or((line.text, ""));
        if !BLOCKS.contains(&kw) {
            out.push(Item::Directive(line));
            continue;
        }
        let name = rest.trim();
        if kw == "predicates" {
            if !name.is_empty() {
                return Err(line.err(format!("unexpected `{name}` after `predicates`")));
            }
        } else if !is_identifier(name) {
            return Err(line.err(format!("`{kw}` needs a name, got `{name}`")));
        }
        let mut body = Vec::new();
        loop {
            match lines.next() {
                Some(l) if l.text == "end" => break,
                Some(l) => body.push(l),
                None => return Err(line.err(format!("`{kw}` block is missing `end`"))),
            }
        }
        out.push(Item::Block {
            kind: kw,
            name,
            header: line,
            body,
        });
    }
    Ok(out)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `name(a)` or `name(a,b)`
fn application(text: &str) -> Option<(&str, Vec<&str>)> {
    let text = text.trim();
    let open = text.find('(')?;
    let inner = text.strip_suffix(')')?.get(open + 1..)?;
    Some((text[..open].trim(), inner.split(',').map(str::trim).collect()))
}

/// A validated model.
#[derive(Debug, Clone)]
pub struct Model {
    pub signature: Arc<PredicateSignature>,
    /// hand-written constraints, in file order
    pub constraints: Vec<CompatibilityConstraint>,
    pub structures: Vec<(String, LogicalStructure)>,
    pub graphs: Vec<(String, Graph)>,
    pub start: String,
    pub rules: Vec<ShapeRule>,
    pub patterns: Vec<ForbiddenPattern>,
    /// defaults filled in while loading
    pub warnings: Vec<String>,
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature
            && self.constraints == other.constraints
            && self.structures == other.structures
            && self.graphs == other.graphs
            && self.start == other.start
            && self.rules == other.rules
            && self.patterns == other.patterns
    }
}

impl Model {
    /// Derived constraints followed by the hand-written ones.
    pub fn all_constraints(&self) -> Vec<CompatibilityConstraint> {
        let mut cs = derive_constraints(&self.signature);
        cs.extend(self.constraints.iter().cloned());
        cs
    }

    /// A named structure, or the encoding of a named graph.
    pub fn structure(&self, name: &str) -> Option<LogicalStructure> {
        if let Some((_, s)) = self.structures.iter().find(|(n, _)| n == name) {
            return Some(s.clone());
        }
        let (_, g) = self.graphs.iter().find(|(n, _)| n == name)?;
        Some(encode_graph(g, &self.signature).expect("graphs are checked on load"))
    }

    pub fn graph(&self, name: &str) -> Option<&Graph> {
        self.graphs.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }

    pub fn start_structure(&self) -> LogicalStructure {
        self.structure(&self.start).expect("start is checked on load")
    }

    pub fn graph_rules(&self) -> Vec<GraphRule> {
        self.rules.iter().map(|r| r.rule().clone()).collect()
    }

    pub fn to_text(&self) -> String {
        let sig = &self.signature;
        let mut out = String::from("predicates\n");
        let core: Vec<&str> = sig.core_unary().map(|p| sig.unary_name(p)).collect();
        if !core.is_empty() {
            let _ = writeln!(out, "  unary {}", core.join(", "));
        }
        if sig.binary_count() > 0 {
            let _ = writeln!(out, "  binary {}", sig.binary().join(", "));
        }
        out.push_str("end\n");
        for (_, name, var, meaning) in sig.instrumentation() {
            let _ = writeln!(out, "instr {name}({var}) := {meaning}");
        }
        for c in &self.constraints {
            let _ = writeln!(out, "constraint {c}");
        }
        for (name, s) in &self.structures {
            out.push('\n');
            out.push_str(&s.to_text(name));
        }
        for (name, g) in &self.graphs {
            out.push('\n');
            let _ = writeln!(out, "graph {name}");
            write_graph(&mut out, g, "  ");
            out.push_str("end\n");
        }
        let _ = writeln!(out, "\nstart {}", self.start);
        for r in &self.rules {
            out.push('\n');
            out.push_str(&rule_text(r));
        }
        for p in &self.patterns {
            out.push('\n');
            out.push_str(&pattern_text(p));
        }
        out
    }

    /// Writes the multi-file layout read by [`load_split`].
    pub fn write_split(&self, dir: &Path) -> Result<(), ModelError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| ModelError::Io { path, source }
        };
        let mut head = Model {
            rules: Vec::new(),
            patterns: Vec::new(),
            ..self.clone()
        }
        .to_text();
        head.push('\n');
        for sub in ["rules", "patterns"] {
            fs::create_dir_all(dir.join(sub)).map_err(io(&dir.join(sub)))?;
        }
        let path = dir.join("model.gts");
        fs::write(&path, head).map_err(io(&path))?;
        for (i, r) in self.rules.iter().enumerate() {
            let path = dir.join("rules").join(format!("{i:03}-{}.gts", r.name()));
            fs::write(&path, rule_text(r)).map_err(io(&path))?;
        }
        for (i, p) in self.patterns.iter().enumerate() {
            let path = dir.join("patterns").join(format!("{i:03}-{}.gts", p.name()));
            fs::write(&path, pattern_text(p)).map_err(io(&path))?;
        }
        Ok(())
    }
}

pub(crate) fn write_graph(out: &mut String, g: &Graph, indent: &str) {
    for n in g.nodes() {
        let types: Vec<&str> = g.loops(n).collect();
        if types.is_empty() {
            let _ = writeln!(out, "{indent}node {n}");
        } else {
            let _ = writeln!(out, "{indent}node {n} : {}", types.join(", "));
        }
    }
    for e in g.edges().iter().filter(|e| !e.is_loop()) {
        let _ = writeln!(out, "{indent}edge {}({},{})", e.label, e.source, e.target);
    }
}

fn rule_text(r: &ShapeRule) -> String {
    let mut out = format!("rule {}\n  lhs\n", r.name());
    write_graph(&mut out, r.rule().lhs(), "    ");
    out.push_str("  rhs\n");
    write_graph(&mut out, r.rule().rhs(), "    ");
    for (p, v, f) in r.updates() {
        let _ = writeln!(out, "  update {p}({v}) := {f}");
    }
    out.push_str("end\n");
    out
}

fn pattern_text(p: &ForbiddenPattern) -> String {
    let mut out = format!("pattern {}\n", p.name());
    write_graph(&mut out, p.graph(), "  ");
    out.push_str("end\n");
    out
}

fn parse_list(text: &str) -> Vec<&str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn build_signature(items: &[Item<'_>]) -> Result<PredicateSignature, ModelError> {
    let mut unary = Vec::new();
    let mut binary = Vec::new();
    let mut first = None;
    for item in items {
        let Item::Block {
            kind: "predicates",
            header,
            body,
            ..
        } = item
        else {
            continue;
        };
        first.get_or_insert(*header);
        for l in body {
            match l.text.split_once(char::is_whitespace) {
                Some(("unary", rest)) => unary.extend(parse_list(rest)),
                Some(("binary", rest)) => binary.extend(parse_list(rest)),
                _ => return Err(l.err(format!("expected `unary ...` or `binary ...`, got `{}`", l.text))),
            }
        }
    }
    let mut sig = PredicateSignature::new(unary, binary).map_err(|e| match first {
        Some(h) => h.err(e.to_string()),
        None => ModelError::Syntax {
            file: String::new(),
            line: 0,
            message: e.to_string(),
        },
    })?;
    for item in items {
        let Item::Directive(l) = item else { continue };
        let Some(rest) = l.text.strip_prefix("instr ") else { continue };
        let (head, body) = rest
            .split_once(":=")
            .ok_or_else(|| l.err("expected `instr p(v) := formula`"))?;
        let (name, args) = application(head).ok_or_else(|| l.err(format!("malformed `{}`", head.trim())))?;
        let [var] = args.as_slice() else {
            return Err(l.err("instrumentation predicates are unary"));
        };
        let meaning = parse(body).map_err(|e| l.err(e.to_string()))?;
        sig.add_instrumentation(name, *var, meaning).map_err(|e| l.err(e.to_string()))?;
    }
    Ok(sig)
}

fn parse_graph(lines: &[Line<'_>], sig: &PredicateSignature, allow_instr: bool) -> Result<Graph, ModelError> {
    let mut g = Graph::new();
    for l in lines {
        if let Some(rest) = l.text.strip_prefix("node ") {
            let (id, types) = rest.split_once(':').unwrap_or((rest, ""));
            let id = id.trim();
            if !is_identifier(id) {
                return Err(l.err(format!("invalid node name `{id}`")));
            }
            if !g.add_node(id) {
                return Err(l.err(format!("node `{id}` declared twice")));
            }
            for t in parse_list(types) {
                match sig.lookup(t) {
                    Some(PredRef::Unary(0)) => return Err(l.err("`sm` is not a node type")),
                    Some(PredRef::Unary(p)) if sig.is_instrumentation(p) && !allow_instr => {
                        return Err(l.err(format!("instrumentation predicate `{t}` cannot be set here")))
                    }
                    Some(PredRef::Unary(_)) => {
                        g.add_loop(id, t);
                    }
                    Some(PredRef::Binary(_)) => return Err(l.err(format!("`{t}` is binary"))),
                    None => return Err(l.err(format!("unknown predicate `{t}`"))),
                }
            }
        } else if let Some(rest) = l.text.strip_prefix("edge ") {
            let (p, args) = application(rest).ok_or_else(|| l.err(format!("malformed edge `{rest}`")))?;
            let [a, b] = args.as_slice() else {
                return Err(l.err("edges take two nodes; unary predicates go on `node` lines"));
            };
            match sig.lookup(p) {
                Some(PredRef::Binary(_)) => {}
                Some(PredRef::Unary(_)) => return Err(l.err(format!("`{p}` is unary"))),
                None => return Err(l.err(format!("unknown predicate `{p}`"))),
            }
            for n in [a, b] {
                if !g.contains_node(n) {
                    return Err(l.err(format!("unknown node `{n}`")));
                }
            }
            g.add_edge(*a, p, *b);
        } else {
            return Err(l.err(format!("expected `node` or `edge`, got `{}`", l.text)));
        }
    }
    Ok(g)
}

fn parse_rule(
    name: &str,
    header: Line<'_>,
    body: &[Line<'_>],
    sig: &Arc<PredicateSignature>,
) -> Result<(ShapeRule, Vec<String>), ModelError> {
    #[derive(PartialEq)]
    enum Section {
        Start,
        Lhs,
        Rhs,
    }
    let mut section = Section::Start;
    let (mut lhs, mut rhs, mut updates) = (Vec::new(), Vec::new(), Vec::new());
    let mut seen_rhs = false;
    for l in body {
        match l.text {
            "lhs" if section == Section::Start => section = Section::Lhs,
            "rhs" if section == Section::Lhs => {
                section = Section::Rhs;
                seen_rhs = true;
            }
            "lhs" | "rhs" => return Err(l.err(format!("unexpected `{}`", l.text))),
            t if t.starts_with("update ") => updates.push(*l),
            _ => match section {
                Section::Lhs if updates.is_empty() => lhs.push(*l),
                Section::Rhs if updates.is_empty() => rhs.push(*l),
                _ => return Err(l.err(format!("unexpected `{}`", l.text))),
            },
        }
    }
    if !seen_rhs {
        return Err(header.err(format!("rule `{name}` needs `lhs` and `rhs` sections")));
    }
    let l = parse_graph(&lhs, sig, true)?;
    let r = parse_graph(&rhs, sig, false)?;
    let rule = GraphRule::new(name, l, r, sig.clone()).map_err(|e| header.err(e.to_string()))?;
    let mut parsed = Vec::new();
    for u in &updates {
        let rest = &u.text["update ".len()..];
        let (head, f) = rest
            .split_once(":=")
            .ok_or_else(|| u.err("expected `update p(v) := formula`"))?;
        let (p, args) = application(head).ok_or_else(|| u.err(format!("malformed `{}`", head.trim())))?;
        let [v] = args.as_slice() else {
            return Err(u.err("updates name one node"));
        };
        let f = parse_checked(f, sig).map_err(|e| u.err(e.to_string()))?;
        parsed.push((p.to_string(), NodeId::new(v), f));
    }
    ShapeRule::new(rule, parsed).map_err(|e| header.err(e.to_string()))
}

fn parse_constraint(l: &Line<'_>, text: &str, sig: &PredicateSignature) -> Result<CompatibilityConstraint, ModelError> {
    let (body, head) = split_arrow(text).ok_or_else(|| l.err("expected `constraint body => head`"))?;
    let body = parse_checked(body, sig).map_err(|e| l.err(e.to_string()))?;
    let head: Formula = parse_checked(head, sig).map_err(|e| l.err(e.to_string()))?;
    CompatibilityConstraint::new(body, head, sig).map_err(|e| l.err(e.to_string()))
}

/// Splits at the first `=>` that is not part of `==`.
fn split_arrow(text: &str) -> Option<(&str, &str)> {
    let bytes = text.as_bytes();
    (0..bytes.len().saturating_sub(1))
        .find(|&i| bytes[i] == b'=' && bytes[i + 1] == b'>' && (i == 0 || bytes[i - 1] != b'='))
        .map(|i| (&text[..i], &text[i + 2..]))
}

/// Parses and validates a model from `(file name, contents)` sources.
pub fn parse_model(sources: &[(String, String)]) -> Result<Model, ModelError> {
    let mut all = Vec::new();
    for (file, text) in sources {
        all.extend(items(file, text)?);
    }
    let sig = Arc::new(build_signature(&all)?);
    let mut model = Model {
        signature: sig.clone(),
        constraints: Vec::new(),
        structures: Vec::new(),
        graphs: Vec::new(),
        start: String::new(),
        rules: Vec::new(),
        patterns: Vec::new(),
        warnings: Vec::new(),
    };
    let mut names = BTreeSet::new();
    let mut rule_names = BTreeSet::new();
    let mut pattern_names = BTreeSet::new();
    let mut start: Option<Line<'_>> = None;
    for item in &all {
        match item {
            Item::Directive(l) => {
                let (kw, rest) = l.text.split_once(char::is_whitespace).unwrap_or((l.text, ""));
                match kw {
                    "instr" => {}
                    "constraint" => model.constraints.push(parse_constraint(l, rest, &sig)?),
                    "start" => {
                        if start.is_some() {
                            return Err(l.err("more than one `start`"));
                        }
                        model.start = rest.trim().to_string();
                        start = Some(*l);
                    }
                    _ => return Err(l.err(format!("unexpected `{}`", l.text))),
                }
            }
            Item::Block { kind: "predicates", .. } => {}
            Item::Block {
                kind,
                name,
                header,
                body,
            } => {
                let fresh = match *kind {
                    "structure" | "graph" => names.insert(*name),
                    "rule" => rule_names.insert(*name),
                    _ => pattern_names.insert(*name),
                };
                if !fresh {
                    return Err(header.err(format!("duplicate {kind} name `{name}`")));
                }
                match *kind {
                    "structure" => {
                        let mut text = format!("structure {name}\n");
                        for l in body {
                            text.push_str(l.text);
                            text.push('\n');
                        }
                        text.push_str("end\n");
                        let (_, s) = parse_structure(&text, &sig).map_err(|e| {
                            let at = e.line.checked_sub(2).and_then(|i| body.get(i)).unwrap_or(header);
                            at.err(e.message)
                        })?;
                        model.structures.push((name.to_string(), s));
                    }
                    "graph" => {
                        let g = parse_graph(body, &sig, false)?;
                        model.graphs.push((name.to_string(), g));
                    }
                    "rule" => {
                        let (r, warnings) = parse_rule(name, *header, body, &sig)?;
                        model.warnings.extend(warnings);
                        model.rules.push(r);
                    }
                    _ => {
                        let g = parse_graph(body, &sig, true)?;
                        let p = ForbiddenPattern::new(*name, g, sig.clone()).map_err(|e| header.err(e.to_string()))?;
                        model.patterns.push(p);
                    }
                }
            }
        }
    }
    let Some(at) = start else {
        return Err(ModelError::NoStart);
    };
    if !names.contains(model.start.as_str()) {
        return Err(at.err(format!("unknown structure `{}`", model.start)));
    }
    if coerce(&model.start_structure(), &model.all_constraints()).is_none() {
        return Err(ModelError::InconsistentStart);
    }
    Ok(model)
}

pub fn parse_model_str(text: &str) -> Result<Model, ModelError> {
    parse_model(&[("<input>".to_string(), text.to_string())])
}

fn read(path: &Path) -> Result<String, ModelError> {
    fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<Model, ModelError> {
    if path.is_dir() {
        return load_split(path);
    }
    parse_model(&[(path.display().to_string(), read(path)?)])
}

/// Loads every `.gts` file under `dir`, in path order.
pub fn load_split(dir: &Path) -> Result<Model, ModelError> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let entries = fs::read_dir(&d).map_err(|source| ModelError::Io { path: d.clone(), source })?;
        for entry in entries {
            let path = entry.map_err(|source| ModelError::Io { path: d.clone(), source })?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "gts") {
                let text = read(&path)?;
                files.insert(path, text);
            }
        }
    }
    let sources: Vec<(String, String)> = files.into_iter().map(|(p, t)| (p.display().to_string(), t)).collect();
    parse_model(&sources)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gtshape_core::TruthValue;

    const SMALL: &str = "\
# two cabs
predicates
  unary RC, T
  binary on, next
end
instr empty(v) := T(v) & !(exists r: on(r,v))
constraint exists r: on(r,t) => !empty(t)

structure s0
  node r sm=1/2
  node t sm=1/2
  set RC(r) = 1
  set T(t) = 1
  set on(r,t) = 1/2
  set next(t,t) = 1/2
  set empty(t) = 1/2
end
graph g0
  node r : RC
  node a : T
  node b : T
  edge on(r,a)
  edge next(a,b)
  edge next(b,a)
end
start s0

rule Move
  lhs
    node r : RC
    node a : T
    node b : T, empty
    edge on(r,a)
    edge next(a,b)
  rhs
    node r : RC
    node a : T
    node b : T
    edge on(r,b)
    edge next(a,b)
  update empty(a) := !(exists q: q != r & on(q,a))
  update empty(b) := 0
end

pattern collision
  node t : T
  node x : RC
  node y : RC
  edge on(x,t)
  edge on(y,t)
end
";

    #[test]
    fn loads_and_round_trips() {
        let m = parse_model_str(SMALL).unwrap();
        assert_eq!(m.signature.unary_count(), 4);
        assert_eq!(m.constraints.len(), 1);
        assert_eq!(m.all_constraints().len(), 3);
        assert_eq!(m.rules.len(), 1);
        assert_eq!(m.rules[0].rule().guards().count(), 1);
        // empty(r) was left out
        assert_eq!(m.warnings.len(), 1);
        assert!(m.warnings[0].contains("empty(r)"));
        let s = m.start_structure();
        assert_eq!(s.value("on", &[0, 1]), Some(TruthValue::Maybe));
        let g0 = m.structure("g0").unwrap();
        assert_eq!(g0.value("empty", &[g0.index_of("a").unwrap()]), Some(TruthValue::False));
        assert_eq!(g0.value("empty", &[g0.index_of("b").unwrap()]), Some(TruthValue::True));
        let text = m.to_text();
        let back = parse_model_str(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);
        assert!(back.warnings.is_empty());
    }

    #[test]
    fn split_round_trip() {
        let m = parse_model_str(SMALL).unwrap();
        let dir = std::env::temp_dir().join(format!("gtshape-split-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        m.write_split(&dir).unwrap();
        let back = load_model(&dir).unwrap();
        fs::remove_dir_all(&dir).unwrap();
        assert_eq!(back, m);
    }

    fn fails(text: &str) -> String {
        parse_model_str(text).unwrap_err().to_string()
    }

    #[test]
    fn errors() {
        assert_eq!(fails(""), "no start structure");
        assert_eq!(fails("# nothing\n"), "no start structure");
        let head = "predicates\n  unary A\n  binary e\nend\ngraph g\n  node a : A\nend\nstart g\n";
        assert!(parse_model_str(head).is_ok());
        let e = fails(&format!("{head}rule r\n  lhs\n    node a : B\n  rhs\nend\n"));
        assert!(e.starts_with("<input>:11:") && e.contains("unknown predicate `B`"), "{e}");
        let e = fails(&format!("{head}rule r\n  lhs\n    node a : A\n    node b : A\n    edge e(a)\n  rhs\nend\n"));
        assert!(e.contains("edges take two nodes"), "{e}");
        assert!(fails(&format!("{head}constraint A(x) => e(x)\n")).contains("arity"));
        assert!(fails(&format!("{head}start g\n")).contains("more than one"));
        assert!(fails("start nowhere\n").contains("unknown structure"));
        assert!(fails("structure s\n  node a sm=1\nend\nstart s\n").contains("sm"));
        assert!(fails("rule r\n  lhs\n").contains("missing `end`"));
        assert!(fails("frobnicate\n").contains("unexpected `frobnicate`"));
        let e = fails(&format!("{head}structure g\nend\n"));
        assert!(e.contains("duplicate"), "{e}");
    }

    #[test]
    fn inconsistent_start() {
        let text = "predicates\n  unary A\nend\ninstr b(v) := A(v)\nstructure s\n  node x\n  set A(x) = 1\nend\nstart s\n";
        assert!(matches!(parse_model_str(text), Err(ModelError::InconsistentStart)));
    }

    #[test]
    fn arrow_split() {
        assert_eq!(split_arrow("a == b => p(a)"), Some(("a == b ", " p(a)")));
        assert_eq!(split_arrow("a==b"), None);
    }
}
