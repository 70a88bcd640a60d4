use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use gtshape::dot::to_dot;
use gtshape::model::{load_model, load_split, Model};
use gtshape::report::{graph_text, AnalyzeReport, ConcreteReport};
use gtshape_core::engine::{
    concrete_explore, explore, replay_step, start_shape, ConcreteVerdict, ExploreOptions, Stage, Verdict,
};
use gtshape_core::structure::{decode_graph, Graph, LogicalStructure};

const USAGE: u8 = 3;
const MODEL: u8 = 4;
const IO: u8 = 5;

/// Shape analysis for graph transformation systems.
#[derive(Parser)]
#[command(name = "gtshape", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the reachable shapes and check the forbidden patterns
    Analyze(AnalyzeArgs),
    /// Explore concrete graphs from a 2-valued start, up to a bound
    Concrete(ConcreteArgs),
    /// Render a named structure or graph
    Dot(DotArgs),
    /// Re-run the trace of an UNSAFE report
    Replay(ReplayArgs),
    /// Print the model in normal form
    Print(ModelArg),
}

#[derive(Args)]
struct ModelArg {
    model: PathBuf,
    /// The model is a directory of `.gts` files
    #[arg(long)]
    split: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    model: ModelArg,
    #[arg(long)]
    max_structures: Option<usize>,
    #[arg(long)]
    max_seconds: Option<f64>,
    /// Do not apply canonical abstraction after each step
    #[arg(long)]
    no_blur: bool,
    /// Also check patterns on intermediate structures
    #[arg(long)]
    eager_check: bool,
    /// Single thread and zero timings, for byte-identical reports
    #[arg(long)]
    deterministic: bool,
    /// Worker threads (0 = one per core)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Write DOT files for the start shape, the result and the trace
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ConcreteArgs {
    #[command(flatten)]
    model: ModelArg,
    #[arg(long)]
    bound: usize,
    /// Start graph (defaults to the model's start)
    #[arg(long)]
    graph: Option<String>,
    /// Write one DOT file per reached graph
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct DotArgs {
    #[command(flatten)]
    model: ModelArg,
    #[arg(long)]
    structure: String,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ReplayArgs {
    #[command(flatten)]
    model: ModelArg,
    /// JSON report written by `analyze`
    report: PathBuf,
}

struct Failure(u8, String);

impl Failure {
    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure(IO, format!("{}: {e}", path.display()))
    }
}

fn load(arg: &ModelArg) -> Result<Model, Failure> {
    let model = if arg.split {
        if !arg.model.is_dir() {
            return Err(Failure(USAGE, format!("{} is not a directory", arg.model.display())));
        }
        load_split(&arg.model)
    } else {
        load_model(&arg.model)
    }
    .map_err(|e| Failure(MODEL, e.to_string()))?;
    for w in &model.warnings {
        warn!("{w}");
    }
    Ok(model)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

fn write_dot(dir: &Path, name: &str, s: &LogicalStructure) -> Result<(), Failure> {
    write(&dir.join(format!("{name}.dot")), &to_dot(s, name))
}

fn emit_json(path: Option<&Path>, json: String) -> Result<(), Failure> {
    match path {
        Some(p) => write(p, &(json + "\n")),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn analyze(args: &AnalyzeArgs) -> Result<u8, Failure> {
    let model = load(&args.model)?;
    let options = ExploreOptions {
        blur: !args.no_blur,
        eager_check: args.eager_check,
        jobs: if args.deterministic { 1 } else { args.jobs },
        max_structures: args.max_structures,
        max_seconds: args.max_seconds,
        ..ExploreOptions::default()
    };
    let constraints = model.all_constraints();
    let s0 = model.start_structure();
    let result = explore(&s0, &model.rules, &model.patterns, &constraints, &options)
        .map_err(|e| Failure(MODEL, e.to_string()))?;
    let st = &result.statistics;
    info!(
        "{:?}: {} intermediate, {} maximal, {:.1} ms",
        result.verdict, st.intermediate_structures, st.maximal_structures, st.elapsed_ms
    );
    if st.mat_focus_violations > 0 {
        warn!("{} materialisations outside focus", st.mat_focus_violations);
    }
    let mut report = AnalyzeReport::new(&args.model.model.display().to_string(), &options, &model.warnings, &result);
    if args.deterministic {
        report.statistics.elapsed_ms = 0.0;
    }

    if let Some(dir) = &args.dot {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        let start = start_shape(&s0, &constraints, options.blur).map_err(|e| Failure(MODEL, e.to_string()))?;
        write_dot(dir, "start", &start)?;
        for (i, s) in result.shapes.iter().enumerate() {
            write_dot(dir, &format!("shape{i:03}"), s)?;
        }
        if let Some(trace) = &result.trace {
            let mut cur = start;
            for (i, step) in trace.steps.iter().enumerate() {
                let rule = model.rules.iter().find(|r| r.name() == step.rule).expect("trace rules exist");
                let last = i + 1 == trace.steps.len();
                for (stage, tag) in [(Stage::Focused, "focused"), (Stage::Applied, "applied"), (Stage::Final, "final")] {
                    let s = replay_step(&cur, rule, step, &constraints, options.blur, stage)
                        .map_err(|e| Failure(MODEL, format!("trace step {i}: {e}")))?;
                    write_dot(dir, &format!("trace{i:03}-{tag}"), &s)?;
                    if stage == Stage::Final {
                        cur = s;
                    }
                    if last && stage == trace.stage {
                        break;
                    }
                }
            }
        }
    }

    let json = serde_json::to_string_pretty(&report).expect("reports serialise");
    emit_json(args.json.as_deref(), json)?;
    eprintln!("{}", verdict_line(&report));
    Ok(match result.verdict {
        Verdict::Safe => 0,
        Verdict::Unsafe => 1,
        Verdict::BoundExceeded => 2,
    })
}

fn steps(n: usize) -> String {
    if n == 1 {
        "1 step".into()
    } else {
        format!("{n} steps")
    }
}

fn verdict_line(r: &AnalyzeReport) -> String {
    match (&r.verdict, &r.trace, &r.exceeded) {
        (Verdict::Unsafe, Some(t), _) => format!("UNSAFE: `{}` after {}", t.pattern, steps(t.steps.len())),
        (Verdict::BoundExceeded, _, Some(b)) => format!("BOUND_EXCEEDED: {b:?}"),
        _ => format!(
            "SAFE: {} maximal shapes, {} intermediate structures",
            r.statistics.maximal_structures, r.statistics.intermediate_structures
        ),
    }
}

fn concrete_start(model: &Model, name: Option<&str>) -> Result<(String, Graph), Failure> {
    let name = name.unwrap_or(&model.start);
    if let Some(g) = model.graph(name) {
        return Ok((name.to_string(), g.clone()));
    }
    let s = model
        .structure(name)
        .ok_or_else(|| Failure(MODEL, format!("no structure or graph `{name}`")))?;
    let g = decode_graph(&s).ok_or_else(|| Failure(MODEL, format!("`{name}` is not a concrete graph")))?;
    Ok((name.to_string(), g))
}

fn concrete(args: &ConcreteArgs) -> Result<u8, Failure> {
    if args.bound == 0 {
        return Err(Failure(USAGE, "--bound must be positive".into()));
    }
    let model = load(&args.model)?;
    let (name, g0) = concrete_start(&model, args.graph.as_deref())?;
    let result = concrete_explore(&g0, &model.graph_rules(), &model.patterns, args.bound)
        .map_err(|e| Failure(MODEL, e.to_string()))?;
    if let Some(dir) = &args.dot {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        for (i, g) in result.graphs.iter().enumerate() {
            let s = gtshape_core::structure::encode_graph(g, &model.signature).expect("reached graphs are well typed");
            write_dot(dir, &format!("graph{i:03}"), &s)?;
        }
    }
    let report = ConcreteReport::new(&args.model.model.display().to_string(), &name, args.bound, &result);
    emit_json(args.json.as_deref(), serde_json::to_string_pretty(&report).expect("reports serialise"))?;
    match &report.violation {
        Some(v) => eprintln!("UNSAFE: `{}` after {}", v.pattern, steps(v.steps.len())),
        None => eprintln!("{:?}: {} graphs", report.verdict, report.graphs),
    }
    if let Some(v) = &result.violation {
        info!("{}", graph_text("violation", &v.graph));
    }
    Ok(match result.verdict {
        ConcreteVerdict::Safe => 0,
        ConcreteVerdict::Unsafe => 1,
        ConcreteVerdict::BoundExceeded => 2,
    })
}

fn dot(args: &DotArgs) -> Result<u8, Failure> {
    let model = load(&args.model)?;
    let s = model
        .structure(&args.structure)
        .ok_or_else(|| Failure(USAGE, format!("no structure or graph `{}`", args.structure)))?;
    write(&args.output, &to_dot(&s, &args.structure))?;
    Ok(0)
}

/// Exit 0 if the trace reproduces the reported structure, 1 if not.
fn replay(args: &ReplayArgs) -> Result<u8, Failure> {
    let model = load(&args.model)?;
    let text = fs::read_to_string(&args.report).map_err(|e| Failure::io(&args.report, e))?;
    let report: AnalyzeReport =
        serde_json::from_str(&text).map_err(|e| Failure(USAGE, format!("{}: {e}", args.report.display())))?;
    let trace = report
        .trace
        .ok_or_else(|| Failure(USAGE, "the report has no trace".into()))?;
    let s = gtshape_core::engine::replay(
        &model.start_structure(),
        &model.rules,
        &model.all_constraints(),
        report.options.blur,
        &trace.steps,
        trace.stage,
    )
    .map_err(|e| Failure(MODEL, e.to_string()))?;
    if s.to_text("trace") == trace.structure {
        eprintln!("reproduced `{}` after {}", trace.pattern, steps(trace.steps.len()));
        Ok(0)
    } else {
        eprintln!("replay ended in a different structure:\n{}", s.to_text("trace"));
        Ok(1)
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Concrete(a) => concrete(a),
        Command::Dot(a) => dot(a),
        Command::Replay(a) => replay(a),
        Command::Print(a) => {
            print!("{}", load(a)?.to_text());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GTSHAPE_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
