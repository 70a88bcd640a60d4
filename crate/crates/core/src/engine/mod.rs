//! The abstraction pipeline and the reachability fixpoint.
//!
//! One abstract step for a rule: materialise, coerce, apply, coerce, blur.
//! [`explore`] runs steps from the start shape until no new maximal shape
//! appears, checking forbidden patterns on every shape it keeps.

mod coerce;
mod concrete;
mod materialise;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::formula::Assignment;
use crate::rules::{apply_shape, ForbiddenPattern, GraphRule, RuleError, ShapeRule};
use crate::structure::{canonical_abstraction, AntichainSet, Insertion, LogicalStructure};

pub use coerce::{coerce, derive_constraints, CompatibilityConstraint, ConstraintError};
pub use concrete::{concrete_explore, graphs_isomorphic, ConcreteResult, ConcreteVerdict, ConcreteViolation};
pub use materialise::{gamma, in_focus, materialisations, materialise, Branch, Materialisation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("the start structure is inconsistent with the constraints")]
    InconsistentStart,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("replay failed at step {step}: {message}")]
    Replay { step: usize, message: String },
    #[error("concrete bound must be positive")]
    ZeroBound,
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Where in the pipeline a structure was observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Start,
    /// materialised and coerced
    Focused,
    /// rule applied and coerced
    Applied,
    /// after blur, as kept in the maximal set
    Final,
}

/// One abstract rule application, named by node names of its source shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: String,
    pub branch: Branch,
    /// Left-hand side node → source node. For the materialised branch this
    /// is the ½-matching that was materialised.
    pub matching: BTreeMap<String, String>,
    /// Summary nodes kept during materialisation.
    pub kept: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    /// Stage at which the last structure was taken.
    pub stage: Stage,
    pub pattern: String,
    pub structure: LogicalStructure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExploreOptions {
    pub blur: bool,
    pub eager_check: bool,
    /// Worker threads; 0 picks the rayon default.
    pub jobs: usize,
    /// Check every materialisation against `focus_P(S)`.
    pub check_mat_focus: bool,
    /// Cap on the number of intermediate structures.
    pub max_structures: Option<usize>,
    pub max_seconds: Option<f64>,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            blur: true,
            eager_check: false,
            jobs: 0,
            check_mat_focus: true,
            max_structures: None,
            max_seconds: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Safe,
    Unsafe,
    BoundExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    MaxStructures,
    MaxSeconds,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Statistics {
    /// materialisations plus rule-application results
    pub intermediate_structures: usize,
    pub maximal_structures: usize,
    pub materialisations: usize,
    pub rule_applications: usize,
    /// structures discarded by coercion
    pub inconsistent: usize,
    pub embedding_checks: usize,
    pub mat_focus_violations: usize,
    pub generations: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone)]
pub struct AnalysisResult {
    pub verdict: Verdict,
    pub statistics: Statistics,
    /// The maximal set (partial unless SAFE).
    pub shapes: Vec<LogicalStructure>,
    pub trace: Option<Trace>,
    pub exceeded: Option<Bound>,
}

/// Whether `s` may contain `f`: some materialisation of `⟨F, F⟩` survives
/// coercion.
pub fn check_pattern(s: &LogicalStructure, f: &ForbiddenPattern, constraints: &[CompatibilityConstraint]) -> bool {
    materialisations(s, f.as_rule())
        .iter()
        .any(|m| coerce(&m.structure, constraints).is_some())
}

fn first_hit<'a>(
    s: &LogicalStructure,
    patterns: &'a [ForbiddenPattern],
    constraints: &[CompatibilityConstraint],
) -> Option<&'a ForbiddenPattern> {
    patterns.iter().find(|f| check_pattern(s, f, constraints))
}

/// The coerced (and blurred) start shape.
pub fn start_shape(
    s0: &LogicalStructure,
    constraints: &[CompatibilityConstraint],
    blur: bool,
) -> Result<LogicalStructure, EngineError> {
    let s = coerce(s0, constraints).ok_or(EngineError::InconsistentStart)?;
    Ok(if blur { canonical_abstraction(&s) } else { s })
}

struct Successor {
    structure: LogicalStructure,
    step: TraceStep,
}

#[derive(Default)]
struct StepOutput {
    successors: Vec<Successor>,
    stats: Statistics,
    /// first eager pattern hit
    hit: Option<(TraceStep, Stage, String, LogicalStructure)>,
}

struct Pipeline<'a> {
    patterns: &'a [ForbiddenPattern],
    constraints: &'a [CompatibilityConstraint],
    options: &'a ExploreOptions,
}

impl Pipeline<'_> {
    fn eager(&self, out: &mut StepOutput, step: &TraceStep, stage: Stage, s: &LogicalStructure) {
        if self.options.eager_check && out.hit.is_none() {
            if let Some(f) = first_hit(s, self.patterns, self.constraints) {
                out.hit = Some((step.clone(), stage, f.name().to_string(), s.clone()));
            }
        }
    }

    fn step(&self, s: &LogicalStructure, rule: &ShapeRule) -> StepOutput {
        let mut out = StepOutput::default();
        for mat in materialisations(s, rule.rule()) {
            out.stats.materialisations += 1;
            out.stats.intermediate_structures += 1;
            if self.options.check_mat_focus && !in_focus(s, rule.rule(), &mat) {
                out.stats.mat_focus_violations += 1;
                log::error!("materialisation of `{}` outside focus", rule.name());
            }
            let Some(focused) = coerce(&mat.structure, self.constraints) else {
                out.stats.inconsistent += 1;
                continue;
            };
            for m in &mat.matchings {
                let step = TraceStep {
                    rule: rule.name().to_string(),
                    branch: mat.branch,
                    matching: match mat.branch {
                        Branch::Regular => m.named(s),
                        Branch::Materialised => mat.source_matching.clone(),
                    },
                    kept: mat.kept.clone(),
                };
                self.eager(&mut out, &step, Stage::Focused, &focused);
                let applied = match apply_shape(&focused, rule, m) {
                    Ok(a) => a,
                    Err(e) => {
                        // coercion never touches definite values, so this is a bug
                        log::error!("rule `{}` not applicable after focus: {e}", rule.name());
                        continue;
                    }
                };
                out.stats.rule_applications += 1;
                out.stats.intermediate_structures += 1;
                let Some(coerced) = coerce(&applied, self.constraints) else {
                    out.stats.inconsistent += 1;
                    continue;
                };
                self.eager(&mut out, &step, Stage::Applied, &coerced);
                let structure = if self.options.blur {
                    canonical_abstraction(&coerced)
                } else {
                    coerced
                };
                out.successors.push(Successor { structure, step });
            }
        }
        out
    }
}

/// All results of one abstract step, without duplicates.
pub fn step(
    s: &LogicalStructure,
    rule: &ShapeRule,
    constraints: &[CompatibilityConstraint],
    blur: bool,
) -> Vec<LogicalStructure> {
    let options = ExploreOptions {
        blur,
        check_mat_focus: false,
        ..ExploreOptions::default()
    };
    let pipeline = Pipeline {
        patterns: &[],
        constraints,
        options: &options,
    };
    let mut seen = HashSet::new();
    pipeline
        .step(s, rule)
        .successors
        .into_iter()
        .filter(|succ| seen.insert(succ.structure.canonical_key()))
        .map(|succ| succ.structure)
        .collect()
}

fn add_stats(total: &mut Statistics, part: &Statistics) {
    total.intermediate_structures += part.intermediate_structures;
    total.materialisations += part.materialisations;
    total.rule_applications += part.rule_applications;
    total.inconsistent += part.inconsistent;
    total.mat_focus_violations += part.mat_focus_violations;
}

/// Frontier items processed between bound checks. Fixed so that results do
/// not depend on the number of threads.
const CHUNK: usize = 32;

/// Computes the maximal set of shapes reachable from `s0`.
pub fn explore(
    s0: &LogicalStructure,
    rules: &[ShapeRule],
    patterns: &[ForbiddenPattern],
    constraints: &[CompatibilityConstraint],
    options: &ExploreOptions,
) -> Result<AnalysisResult, EngineError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs)
        .build()
        .map_err(|e| EngineError::ThreadPool(e.to_string()))?;
    pool.install(|| explore_in_pool(s0, rules, patterns, constraints, options))
}

fn explore_in_pool(
    s0: &LogicalStructure,
    rules: &[ShapeRule],
    patterns: &[ForbiddenPattern],
    constraints: &[CompatibilityConstraint],
    options: &ExploreOptions,
) -> Result<AnalysisResult, EngineError> {
    let started = Instant::now();
    let deadline = options.max_seconds.map(|s| started + Duration::from_secs_f64(s.max(0.0)));
    let pipeline = Pipeline {
        patterns,
        constraints,
        options,
    };
    let mut stats = Statistics::default();
    let mut set = AntichainSet::new();
    let mut parent: HashMap<usize, (usize, TraceStep)> = HashMap::new();

    let path_to = |parent: &HashMap<usize, (usize, TraceStep)>, mut id: usize| {
        let mut steps = Vec::new();
        while let Some((p, step)) = parent.get(&id) {
            steps.push(step.clone());
            id = *p;
        }
        steps.reverse();
        steps
    };
    let finish = |verdict, mut stats: Statistics, set: &AntichainSet, trace, exceeded| {
        stats.maximal_structures = set.len();
        stats.embedding_checks = set.embedding_checks();
        stats.elapsed_ms = started.elapsed().as_secs_f64() * 1000.0;
        Ok(AnalysisResult {
            verdict,
            statistics: stats,
            shapes: set.members().cloned().collect(),
            trace,
            exceeded,
        })
    };

    let start = start_shape(s0, constraints, options.blur)?;
    if let Some(f) = first_hit(&start, patterns, constraints) {
        let trace = Trace {
            steps: Vec::new(),
            stage: Stage::Start,
            pattern: f.name().to_string(),
            structure: start.clone(),
        };
        set.max_insert(start);
        return finish(Verdict::Unsafe, stats, &set, Some(trace), None);
    }
    let Insertion::Inserted { id: root, .. } = set.max_insert(start) else {
        unreachable!("first insertion into an empty set");
    };
    let mut frontier = vec![root];

    while !frontier.is_empty() {
        stats.generations += 1;
        let mut next = Vec::new();
        for chunk in frontier.chunks(CHUNK) {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return finish(Verdict::BoundExceeded, stats, &set, None, Some(Bound::MaxSeconds));
            }
            let live: Vec<usize> = chunk.iter().copied().filter(|&id| set.is_alive(id)).collect();
            let outputs: Vec<(usize, Vec<StepOutput>)> = live
                .par_iter()
                .map(|&id| {
                    let s = set.get(id).expect("live id");
                    (id, rules.iter().map(|r| pipeline.step(s, r)).collect())
                })
                .collect();
            for (from, per_rule) in outputs {
                for out in per_rule {
                    add_stats(&mut stats, &out.stats);
                    if let Some((step, stage, pattern, structure)) = out.hit {
                        let mut steps = path_to(&parent, from);
                        steps.push(step);
                        let trace = Trace {
                            steps,
                            stage,
                            pattern,
                            structure,
                        };
                        return finish(Verdict::Unsafe, stats, &set, Some(trace), None);
                    }
                    if options.max_structures.is_some_and(|m| stats.intermediate_structures > m) {
                        return finish(Verdict::BoundExceeded, stats, &set, None, Some(Bound::MaxStructures));
                    }
                    for succ in out.successors {
                        let Insertion::Inserted { id, .. } = set.max_insert(succ.structure) else {
                            continue;
                        };
                        parent.insert(id, (from, succ.step));
                        let inserted = set.get(id).expect("just inserted");
                        if let Some(f) = first_hit(inserted, patterns, constraints) {
                            let trace = Trace {
                                steps: path_to(&parent, id),
                                stage: Stage::Final,
                                pattern: f.name().to_string(),
                                structure: inserted.clone(),
                            };
                            return finish(Verdict::Unsafe, stats, &set, Some(trace), None);
                        }
                        next.push(id);
                    }
                }
            }
        }
        frontier = next;
    }
    finish(Verdict::Safe, stats, &set, None, None)
}

fn named_assignment(s: &LogicalStructure, names: &BTreeMap<String, String>) -> Result<Assignment, String> {
    names
        .iter()
        .map(|(v, n)| s.index_of(n).map(|u| (v.as_str(), u)).ok_or_else(|| format!("no node `{n}`")))
        .collect()
}

/// Re-executes one trace step from `s`, stopping at `stage`.
pub fn replay_step(
    s: &LogicalStructure,
    rule: &ShapeRule,
    step: &TraceStep,
    constraints: &[CompatibilityConstraint],
    blur: bool,
    stage: Stage,
) -> Result<LogicalStructure, String> {
    let m = named_assignment(s, &step.matching)?;
    let (mat, applied_at) = match step.branch {
        Branch::Regular => (s.clone(), m),
        Branch::Materialised => {
            let keep: BTreeSet<usize> = step
                .kept
                .iter()
                .map(|n| s.index_of(n).ok_or_else(|| format!("no node `{n}`")))
                .collect::<Result<_, _>>()?;
            let (mat, a, _) = materialise(s, rule.rule(), &m, &keep).map_err(|e| e.to_string())?;
            (mat, a)
        }
    };
    let focused = coerce(&mat, constraints).ok_or("materialisation is inconsistent")?;
    if stage == Stage::Focused {
        return Ok(focused);
    }
    let applied = apply_shape(&focused, rule, &applied_at).map_err(|e| e.to_string())?;
    let coerced = coerce(&applied, constraints).ok_or("result is inconsistent")?;
    Ok(match stage {
        Stage::Applied => coerced,
        _ if blur => canonical_abstraction(&coerced),
        _ => coerced,
    })
}

/// Re-executes a trace from the start structure and returns the structure it
/// ends in.
pub fn replay(
    s0: &LogicalStructure,
    rules: &[ShapeRule],
    constraints: &[CompatibilityConstraint],
    blur: bool,
    steps: &[TraceStep],
    stage: Stage,
) -> Result<LogicalStructure, EngineError> {
    let mut cur = start_shape(s0, constraints, blur)?;
    for (i, step) in steps.iter().enumerate() {
        let rule = rules
            .iter()
            .find(|r| r.name() == step.rule)
            .ok_or_else(|| EngineError::UnknownRule(step.rule.clone()))?;
        let at = if i + 1 == steps.len() { stage } else { Stage::Final };
        cur = replay_step(&cur, rule, step, constraints, blur, at)
            .map_err(|message| EngineError::Replay { step: i, message })?;
    }
    Ok(cur)
}

/// Graph rules of a list of shape rules.
pub fn graph_rules(rules: &[ShapeRule]) -> Vec<GraphRule> {
    rules.iter().map(|r| r.rule().clone()).collect()
}
