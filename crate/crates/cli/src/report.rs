//! JSON reports.
//!
//! Every report carries `schema_version`; fields are only ever added.
//! Structures and graphs are embedded in the model-file text format.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use gtshape_core::engine::{
    AnalysisResult, Bound, ConcreteResult, ConcreteVerdict, ExploreOptions, Stage, Statistics, TraceStep, Verdict,
};
use gtshape_core::structure::Graph;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    pub blur: bool,
    pub eager_check: bool,
    pub jobs: usize,
    pub max_structures: Option<usize>,
    pub max_seconds: Option<f64>,
}

impl From<&ExploreOptions> for AnalyzeOptions {
    fn from(o: &ExploreOptions) -> Self {
        AnalyzeOptions {
            blur: o.blur,
            eager_check: o.eager_check,
            jobs: o.jobs,
            max_structures: o.max_structures,
            max_seconds: o.max_seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub pattern: String,
    /// stage of the last step at which the pattern was found
    pub stage: Stage,
    pub steps: Vec<TraceStep>,
    pub structure: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub schema_version: u32,
    pub model: String,
    pub options: AnalyzeOptions,
    pub verdict: Verdict,
    pub exceeded: Option<Bound>,
    pub statistics: Statistics,
    pub warnings: Vec<String>,
    /// the maximal set, partial unless the verdict is SAFE
    pub shapes: Vec<String>,
    pub trace: Option<TraceReport>,
}

impl AnalyzeReport {
    pub fn new(model: &str, options: &ExploreOptions, warnings: &[String], result: &AnalysisResult) -> Self {
        AnalyzeReport {
            schema_version: SCHEMA_VERSION,
            model: model.to_string(),
            options: options.into(),
            verdict: result.verdict,
            exceeded: result.exceeded,
            statistics: result.statistics.clone(),
            warnings: warnings.to_vec(),
            shapes: result
                .shapes
                .iter()
                .enumerate()
                .map(|(i, s)| s.to_text(&format!("shape{i}")))
                .collect(),
            trace: result.trace.as_ref().map(|t| TraceReport {
                pattern: t.pattern.clone(),
                stage: t.stage,
                steps: t.steps.clone(),
                structure: t.structure.to_text("trace"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcreteStep {
    pub rule: String,
    pub matching: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcreteViolationReport {
    pub pattern: String,
    pub steps: Vec<ConcreteStep>,
    pub graph: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcreteReport {
    pub schema_version: u32,
    pub model: String,
    pub start: String,
    pub bound: usize,
    pub verdict: ConcreteVerdict,
    pub graphs: usize,
    pub transitions: usize,
    pub violation: Option<ConcreteViolationReport>,
}

pub fn graph_text(name: &str, g: &Graph) -> String {
    let mut out = format!("graph {name}\n");
    crate::model::write_graph(&mut out, g, "  ");
    out.push_str("end\n");
    out
}

impl ConcreteReport {
    pub fn new(model: &str, start: &str, bound: usize, result: &ConcreteResult) -> Self {
        ConcreteReport {
            schema_version: SCHEMA_VERSION,
            model: model.to_string(),
            start: start.to_string(),
            bound,
            verdict: result.verdict,
            graphs: result.graphs.len(),
            transitions: result.transitions,
            violation: result.violation.as_ref().map(|v| ConcreteViolationReport {
                pattern: v.pattern.clone(),
                steps: v
                    .steps
                    .iter()
                    .map(|(rule, m)| ConcreteStep {
                        rule: rule.clone(),
                        matching: m.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
                    })
                    .collect(),
                graph: graph_text("violation", &v.graph),
            }),
        }
    }
}
