//! Acceptance checks. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::Mutex;
use std::time::Instant;

use rand::Rng;

use gtshape::model::{load_model, parse_model_str, Model};
use gtshape_core::engine::{
    check_pattern, coerce, concrete_explore, derive_constraints, explore, materialisations, start_shape,
    ConcreteVerdict, ExploreOptions, Verdict,
};
use gtshape_core::formula::Assignment;
use gtshape_core::rules::{apply_concrete, apply_shape, find_concrete_matchings, ShapeRule};
use gtshape_core::structure::{check_embedding, decode_graph, encode_graph, LogicalStructure, NodeMap};
use gtshape_core::TruthValue::*;
use gtshape_testkit as tk;

const C1_MAX_SECONDS: f64 = 10.0;
const C1_MIN_SHAPES: usize = 5;
const C1_MAX_SHAPES: usize = 50;
// reference figures for the railcab model, printed but not asserted
const REFERENCE_INTERMEDIATE: usize = 108;
const REFERENCE_MAXIMAL: usize = 17;
const REFERENCE_MS: f64 = 250.0;

const C2_MODELS: [(&str, &str); 3] = [("railcab", "loop"), ("mutex", "three"), ("chain", "four")];
const C2_MAX_NODES: usize = 8;
const C2_MAX_GRAPHS: usize = 200;
const C2_MAX_SECONDS: f64 = 60.0;

const C3_MIN_TRIPLES: usize = 500;
const C3_MAX_NODES: usize = 5;
const C4_MIN_PAIRS: usize = 500;
const C4_SAMPLES: usize = 50;
const C4_MAX_NODES: usize = 5;
const C5_MIN_INSTANCES: usize = 1000;
const C6_MIN_APPLICATIONS: usize = 200;
const C7_MAX_STRUCTURES: usize = 500_000;
const C7_MAX_SECONDS: f64 = 300.0;
const C8_RUNS: usize = 3;

/// Caps on generation attempts, so a generator bias cannot loop forever.
const MAX_ATTEMPTS: usize = 200_000;

/// (run, materialisations, violations) from criteria 1 and 2
static MAT_FOCUS: Mutex<Vec<(String, usize, usize)>> = Mutex::new(Vec::new());

fn models_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn model(name: &str) -> Model {
    load_model(&models_dir().join(format!("{name}.gts"))).unwrap_or_else(|e| panic!("{name}: {e}"))
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Check {
    let m = model("railcab");
    let t = Instant::now();
    let res = explore(&m.start_structure(), &m.rules, &m.patterns, &m.all_constraints(), &ExploreOptions::default())
        .map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let st = &res.statistics;
    MAT_FOCUS
        .lock()
        .unwrap()
        .push(("railcab".into(), st.materialisations, st.mat_focus_violations));
    let summary = format!(
        "{:?}, {} maximal, {} intermediate, {:.2} s (reference: {} intermediate, {} maximal, {} ms)",
        res.verdict, st.maximal_structures, st.intermediate_structures, secs, REFERENCE_INTERMEDIATE, REFERENCE_MAXIMAL,
        REFERENCE_MS
    );
    ensure(res.verdict == Verdict::Safe, || format!("verdict {summary}"))?;
    ensure(secs < C1_MAX_SECONDS, || format!("too slow: {summary}"))?;
    ensure((C1_MIN_SHAPES..=C1_MAX_SHAPES).contains(&res.shapes.len()), || {
        format!("maximal set outside [{C1_MIN_SHAPES}, {C1_MAX_SHAPES}]: {summary}")
    })?;
    Ok(summary)
}

fn criterion_2() -> Check {
    let t = Instant::now();
    let mut parts = Vec::new();
    for (name, graph) in C2_MODELS {
        let m = model(name);
        let g0 = m.graph(graph).ok_or(format!("{name}: no graph `{graph}`"))?;
        ensure(g0.node_count() <= C2_MAX_NODES, || format!("{name}: {} nodes", g0.node_count()))?;
        let conc = concrete_explore(g0, &m.graph_rules(), &m.patterns, C2_MAX_GRAPHS).map_err(|e| e.to_string())?;
        ensure(conc.verdict == ConcreteVerdict::Safe, || {
            format!("{name}: concrete exploration ended {:?} after {} graphs", conc.verdict, conc.graphs.len())
        })?;
        let res = explore(&m.start_structure(), &m.rules, &m.patterns, &m.all_constraints(), &ExploreOptions::default())
            .map_err(|e| e.to_string())?;
        MAT_FOCUS.lock().unwrap().push((
            name.to_string(),
            res.statistics.materialisations,
            res.statistics.mat_focus_violations,
        ));
        for g in &conc.graphs {
            let s = encode_graph(g, &m.signature).map_err(|e| e.to_string())?;
            ensure(tk::embeds_into_any(&s, &res.shapes), || {
                format!("{name}: reachable graph embeds into no shape:\n{}", s.to_text("g"))
            })?;
        }
        parts.push(format!("{name}: {} graphs in {} shapes", conc.graphs.len(), res.shapes.len()));
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < C2_MAX_SECONDS, || format!("took {secs:.1} s"))?;
    Ok(format!("{}; {secs:.2} s", parts.join(", ")))
}

/// The map that sends matched nodes of `c` to the designated matching of the
/// materialisation and every other node to the remaining node with the same
/// origin.
fn canonical_map(
    c: &LogicalStructure,
    f: &NodeMap,
    mc: &Assignment,
    mat: &gtshape_core::engine::Materialisation,
    mm: &Assignment,
) -> Option<NodeMap> {
    for (n, x) in mc.iter() {
        if mat.embedding.apply(mm.get(n)?) != f.apply(x) {
            return None;
        }
    }
    let taken: BTreeSet<usize> = mm.iter().map(|(_, y)| y).collect();
    let mut g = Vec::new();
    for x in 0..c.len() {
        let y = match mc.iter().find(|&(_, u)| u == x) {
            Some((n, _)) => mm.get(n)?,
            None => (0..mat.structure.len()).find(|y| !taken.contains(y) && mat.embedding.apply(*y) == f.apply(x))?,
        };
        g.push(y);
    }
    Some(NodeMap(g))
}

fn criterion_3() -> Check {
    let runs = MAT_FOCUS.lock().unwrap().clone();
    let (mats, violations) = runs.iter().fold((0, 0), |(a, b), (_, m, v)| (a + m, b + v));
    // (b) runs even when (a) has already failed
    let part_a = ensure(runs.len() == 1 + C2_MODELS.len(), || {
        format!("(a) criteria 1 and 2 recorded {} runs", runs.len())
    })
    .and_then(|_| ensure(violations == 0, || format!("(a) {violations} materialisations outside focus: {runs:?}")));

    let mut rng = tk::rng(3);
    let sig = tk::instrumented_signature();
    let (mut triples, mut attempts) = (0, 0);
    while triples < C3_MIN_TRIPLES {
        attempts += 1;
        ensure(attempts < MAX_ATTEMPTS, || format!("(b) only {triples} triples"))?;
        let s = tk::random_structure(&mut rng, &sig, 3, 0.5, 0.4);
        let rule = tk::random_rule(&mut rng, &sig, "r");
        let Some((c, f)) = tk::concretize(&mut rng, &s, C3_MAX_NODES) else {
            continue;
        };
        let matches: Vec<Assignment> = gtshape_core::rules::find_matchings(&c, &rule)
            .into_iter()
            .filter(|(_, v)| *v == True)
            .map(|(m, _)| m)
            .collect();
        if matches.is_empty() {
            continue;
        }
        triples += 1;
        let mats = materialisations(&s, &rule);
        for mc in &matches {
            let covered = mats.iter().any(|mat| {
                mat.matchings.iter().any(|mm| {
                    canonical_map(&c, &f, mc, mat, mm)
                        .is_some_and(|g| check_embedding(&c, &mat.structure, &g).unwrap_or(false))
                })
            });
            ensure(covered, || {
                format!(
                    "(b) rule `{:?}` at {mc:?}: concretization\n{}escapes every materialisation of\n{}",
                    rule.lhs(),
                    c.to_text("c"),
                    s.to_text("s")
                )
            })?;
        }
    }
    part_a?;
    Ok(format!(
        "(a) 0 of {mats} materialisations outside focus; (b) {triples} triples, every concretization covered"
    ))
}

/// Injective matchings of the pattern in a 2-valued structure, by brute force.
fn brute_force_matches(c: &LogicalStructure, f: &gtshape_core::rules::ForbiddenPattern) -> bool {
    let sig = c.signature();
    let nodes: Vec<&str> = f.graph().nodes().iter().map(|n| n.as_str()).collect();
    let k = nodes.len();
    let n = c.len();
    if k > n {
        return false;
    }
    let pos = |name: &str| nodes.iter().position(|x| *x == name).unwrap();
    'maps: for code in 0..n.pow(k as u32) {
        let img: Vec<usize> = (0..k).map(|i| code / n.pow(i as u32) % n).collect();
        let distinct: BTreeSet<usize> = img.iter().copied().collect();
        if distinct.len() < k {
            continue;
        }
        for e in f.graph().edges() {
            let (a, b) = (img[pos(e.source.as_str())], img[pos(e.target.as_str())]);
            let v = match (sig.unary_index(&e.label), sig.binary_index(&e.label)) {
                (Some(p), _) => c.unary(p, a),
                (_, Some(p)) => c.binary(p, a, b),
                _ => unreachable!(),
            };
            if v != True {
                continue 'maps;
            }
        }
        return true;
    }
    false
}

fn criterion_4() -> Check {
    let mut rng = tk::rng(4);
    let sig = tk::instrumented_signature();
    let cs = derive_constraints(&sig);
    let (mut pairs, mut samples, mut attempts) = (0, 0, 0);
    while pairs < C4_MIN_PAIRS {
        attempts += 1;
        ensure(attempts < MAX_ATTEMPTS, || format!("only {pairs} pairs"))?;
        let s = tk::random_structure(&mut rng, &sig, 4, 0.4, 0.25);
        let f = tk::random_pattern(&mut rng, &sig, "f");
        if check_pattern(&s, &f, &cs) {
            continue;
        }
        pairs += 1;
        for _ in 0..C4_SAMPLES {
            let Some((c, _)) = tk::concretize(&mut rng, &s, C4_MAX_NODES) else {
                continue;
            };
            samples += 1;
            ensure(!brute_force_matches(&c, &f), || {
                format!("pattern {:?} found in a concretization of\n{}", f.graph(), s.to_text("s"))
            })?;
        }
    }
    Ok(format!("{pairs} pairs, {samples} concretizations, {attempts} shapes drawn"))
}

fn criterion_5() -> Check {
    let mut checks = 0usize;
    let mut check = |ok: bool, what: &str| -> Result<(), String> {
        checks += 1;
        ensure(ok, || what.to_string())
    };
    let v = tk::VALUES;
    for a in v {
        check(a.logical_le(a) && a.info_le(a), "reflexive")?;
        check(a.not().not() == a, "double negation")?;
        check(a.info_le(Maybe), "1/2 is the top of the information order")?;
        check(a.implies(False) == a.not(), "implication into 0")?;
        for b in v {
            check(a.and(b) == b.and(a) && a.or(b) == b.or(a), "commutative")?;
            check(a.not().and(b.not()) == a.or(b).not(), "De Morgan (or)")?;
            check(a.not().or(b.not()) == a.and(b).not(), "De Morgan (and)")?;
            check(a.implies(b) == a.not().or(b), "implication")?;
            check(a.logical_le(b) || b.logical_le(a), "logical order is total")?;
            let min = if a.logical_le(b) { a } else { b };
            let max = if a.logical_le(b) { b } else { a };
            check(a.and(b) == min && a.or(b) == max, "and/or are min/max")?;
            check(!(a.logical_le(b) && b.logical_le(a)) || a == b, "logical order antisymmetric")?;
            check(!(a.info_le(b) && b.info_le(a)) || a == b, "information order antisymmetric")?;
            let j = a.info_join(b);
            check(a.info_le(j) && b.info_le(j), "join is an upper bound")?;
            for u in v {
                if a.info_le(u) && b.info_le(u) {
                    check(j.info_le(u), "join is least")?;
                }
                check(a.and(b).and(u) == a.and(b.and(u)), "and associative")?;
                check(a.or(b).or(u) == a.or(b.or(u)), "or associative")?;
                check(!(a.logical_le(b) && b.logical_le(u)) || a.logical_le(u), "logical order transitive")?;
                check(!(a.info_le(b) && b.info_le(u)) || a.info_le(u), "information order transitive")?;
            }
            for a2 in v {
                for b2 in v {
                    if a.info_le(a2) && b.info_le(b2) {
                        check(a.and(b).info_le(a2.and(b2)), "and is monotone")?;
                        check(a.or(b).info_le(a2.or(b2)), "or is monotone")?;
                        check(a.implies(b).info_le(a2.implies(b2)), "implies is monotone")?;
                    }
                }
            }
            if a.info_le(b) {
                check(a.not().info_le(b.not()), "not is monotone")?;
            }
        }
    }
    check(!False.info_le(True) && !True.info_le(False), "definite values incomparable")?;

    let mut rng = tk::rng(5);
    let sig = tk::instrumented_signature();
    let vars = vec!["x".to_string(), "y".to_string()];
    for i in 0..C5_MIN_INSTANCES {
        let big = tk::random_structure(&mut rng, &sig, 4, 0.5, 0.4);
        let (small, f) = tk::refine(&mut rng, &big, 6, if i % 2 == 0 { 0.0 } else { 0.4 });
        let phi = tk::random_formula(&mut rng, &sig, &vars, 4);
        let z: Vec<usize> = (0..2).map(|_| rng.gen_range(0..small.len())).collect();
        let za: Assignment = vars.iter().zip(&z).map(|(v, &u)| (v.as_str(), u)).collect();
        let fz: Assignment = vars.iter().zip(&z).map(|(v, &u)| (v.as_str(), f.apply(u))).collect();
        let lo = phi.evaluate(&small, &za).map_err(|e| e.to_string())?;
        let hi = phi.evaluate(&big, &fz).map_err(|e| e.to_string())?;
        ensure(lo.info_le(hi), || {
            format!("{phi}: {lo} under the embedding, {hi} above it\n{}{}", small.to_text("s"), big.to_text("t"))
        })?;
    }
    Ok(format!(
        "{checks} exhaustive truth-table checks, {C5_MIN_INSTANCES} embedding-monotonicity instances"
    ))
}

fn criterion_6() -> Check {
    let mut rng = tk::rng(6);
    let sig = tk::plain_signature();
    let (mut applications, mut attempts) = (0, 0);
    while applications < C6_MIN_APPLICATIONS {
        attempts += 1;
        ensure(attempts < MAX_ATTEMPTS, || format!("only {applications} applications"))?;
        let s = tk::random_concrete(&mut rng, &sig, 4);
        let g = decode_graph(&s).ok_or("random concrete structure does not decode")?;
        let rule = ShapeRule::with_identity_updates(tk::random_rule(&mut rng, &sig, "r"));
        let expected: BTreeSet<BTreeMap<String, String>> = find_concrete_matchings(&g, rule.rule())
            .into_iter()
            .map(|m| m.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect())
            .collect();
        let focused = coerce(&s, &[]).ok_or("2-valued structure is inconsistent")?;
        let mats = materialisations(&focused, rule.rule());
        ensure(mats.iter().all(|m| m.branch == gtshape_core::engine::Branch::Regular), || {
            "a 2-valued structure was materialised".into()
        })?;
        let found: BTreeSet<BTreeMap<String, String>> =
            mats.iter().flat_map(|m| m.matchings.iter().map(|a| a.named(&s))).collect();
        ensure(found == expected, || format!("matchings differ: {found:?} vs {expected:?}"))?;
        for m in &expected {
            let cm = m.iter().map(|(a, b)| (a.as_str().into(), b.as_str().into())).collect();
            let want = encode_graph(&apply_concrete(&g, rule.rule(), &cm).map_err(|e| e.to_string())?, &sig)
                .map_err(|e| e.to_string())?;
            let a: Assignment = m.iter().map(|(n, v)| (n.as_str(), s.index_of(v).unwrap())).collect();
            let applied = apply_shape(&focused, &rule, &a).map_err(|e| e.to_string())?;
            let got = coerce(&applied, &[]).ok_or("result is inconsistent")?;
            ensure(got.same_by_names(&want), || {
                format!("rule {:?} at {m:?}:\n{}vs\n{}", rule.rule(), got.to_text("shape"), want.to_text("graph"))
            })?;
            applications += 1;
        }
    }
    Ok(format!("{applications} rule applications agree"))
}

fn criterion_7() -> Check {
    let m = model("passengers");
    let creating: Vec<&str> = m
        .rules
        .iter()
        .filter(|r| !r.rule().created_nodes().is_empty())
        .map(|r| r.name())
        .collect();
    ensure(!creating.is_empty(), || "no rule creates nodes".into())?;
    let options = ExploreOptions {
        max_structures: Some(C7_MAX_STRUCTURES),
        max_seconds: Some(C7_MAX_SECONDS),
        ..ExploreOptions::default()
    };
    let res = explore(&m.start_structure(), &m.rules, &m.patterns, &m.all_constraints(), &options)
        .map_err(|e| e.to_string())?;
    ensure(res.exceeded.is_none() && res.verdict != Verdict::BoundExceeded, || {
        format!("hit {:?}", res.exceeded)
    })?;
    Ok(format!(
        "{:?} with creating rule(s) {}: {} maximal, {} intermediate, {} generations",
        res.verdict,
        creating.join(", "),
        res.statistics.maximal_structures,
        res.statistics.intermediate_structures,
        res.statistics.generations
    ))
}

fn run_cli(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gtshape"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn criterion_8() -> Check {
    let dir = models_dir();
    let mut names = Vec::new();
    for entry in std::fs::read_dir(&dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_some_and(|e| e == "gts") {
            names.push(path);
        }
    }
    names.sort();
    for path in &names {
        let m = load_model(path).map_err(|e| e.to_string())?;
        let text = m.to_text();
        let again = parse_model_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        ensure(again == m && again.to_text() == text, || format!("{} does not round-trip", path.display()))?;
    }

    let railcab = dir.join("railcab.gts");
    let railcab = railcab.to_str().unwrap();
    let runs: Vec<(i32, Vec<u8>)> = (0..C8_RUNS)
        .map(|_| run_cli(&["analyze", "--deterministic", railcab]))
        .collect::<Result<_, _>>()?;
    ensure(runs.iter().all(|r| r.0 == 0 && r.1 == runs[0].1), || "deterministic runs differ".into())?;

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let report = tmp.path().join("report.json");
    let collision = dir.join("collision.gts");
    let collision = collision.to_str().unwrap();
    let (code, _) = run_cli(&["analyze", "--deterministic", collision, "--json", report.to_str().unwrap()])?;
    ensure(code == 1, || format!("collision model: exit {code}, expected UNSAFE"))?;
    let (code, _) = run_cli(&["replay", collision, report.to_str().unwrap()])?;
    ensure(code == 0, || format!("replay exit {code}"))?;

    // the same through the library, stage by stage
    let m = model("collision");
    let cs = m.all_constraints();
    let res = explore(&m.start_structure(), &m.rules, &m.patterns, &cs, &ExploreOptions::default())
        .map_err(|e| e.to_string())?;
    let trace = res.trace.ok_or("UNSAFE without a trace")?;
    start_shape(&m.start_structure(), &cs, true).map_err(|e| e.to_string())?;
    let replayed = gtshape_core::engine::replay(&m.start_structure(), &m.rules, &cs, true, &trace.steps, trace.stage)
        .map_err(|e| e.to_string())?;
    ensure(replayed.same_by_names(&trace.structure), || "library replay differs".into())?;

    Ok(format!(
        "{} models round-trip, {C8_RUNS} identical reports ({} bytes), trace of {} step(s) replayed",
        names.len(),
        runs[0].1.len(),
        trace.steps.len()
    ))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 8] = [
        ("railcab regression", criterion_1),
        ("soundness against concrete exploration", criterion_2),
        ("materialisation within focus", criterion_3),
        ("pattern soundness", criterion_4),
        ("three-valued logic", criterion_5),
        ("concrete/shape agreement", criterion_6),
        ("termination with node creation", criterion_7),
        ("command-line round trips", criterion_8),
    ];
    // `cargo test -- --list` and friends
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.2} s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.2} s] {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
