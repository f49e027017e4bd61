use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use assessnet::assessors::{evidence_assess, planner_assess, TrajectoryClassification, WindowParams, WindowedFuser};
use assessnet::engine::{evaluate_stream, AssessmentRecord, EngineError, InferenceConfig};
use assessnet::io::{
    load_graph, read_jsonl, read_records, write_plot_csv, write_records, write_traces, EvidenceRecord, GraphDocument,
    IoError, LoadError, PlannerRecord, WindowRecord,
};
use assessnet::opinion::{DEFAULT_BASE_RATE, DEFAULT_PRIOR_WEIGHT};
use assessnet::scenario;
use clap::{Args, Parser, Subcommand};

const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_STREAM: u8 = 4;

#[derive(Parser)]
#[command(
    name = "assessnet",
    version,
    about = "Assessment-graph inference over opinion streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph document and list every violation.
    Validate { graph: PathBuf },
    /// Evaluate an assessment stream and write one trace line per timestamp.
    Infer(InferArgs),
    /// Write the bundled example graphs and stream into a directory.
    GenExample { dir: PathBuf },
    /// Turn assessor input records into assessment-stream records.
    #[command(subcommand)]
    Assess(AssessCommand),
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    stream: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write `plot.csv` (t, node, b, d, u, P) into this directory.
    #[arg(long, value_name = "DIR")]
    plot_export: Option<PathBuf>,
    /// Include per-node provenance in trace lines.
    #[arg(long)]
    provenance: bool,
    /// Staleness timeout, in stream time units.
    #[arg(long, value_name = "N", default_value_t = assessnet::engine::DEFAULT_STALENESS_TIMEOUT)]
    stale: f64,
    #[arg(long, value_name = "W", default_value_t = DEFAULT_PRIOR_WEIGHT)]
    prior_weight: f64,
}

#[derive(Args)]
struct AssessIo {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Assessment module emitting the records.
    #[arg(long)]
    source: String,
    /// Node being assessed.
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = DEFAULT_BASE_RATE)]
    base_rate: f64,
}

#[derive(Subcommand)]
enum AssessCommand {
    /// Weighted trajectory classifications: {t, n, nonfunctional_indices, u}.
    Planner(AssessIo),
    /// Track-record counts: {t, r, s}.
    Evidence {
        #[command(flatten)]
        io: AssessIo,
        #[arg(long, default_value_t = DEFAULT_PRIOR_WEIGHT)]
        prior_weight: f64,
    },
    /// Sliding-window comparison against a reference: {t, step, reference}.
    Window {
        #[command(flatten)]
        io: AssessIo,
        #[arg(long, default_value_t = 10)]
        window_len: usize,
        #[arg(long, default_value_t = 0.95)]
        decay: f64,
        #[arg(long, default_value_t = DEFAULT_PRIOR_WEIGHT)]
        prior_weight: f64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        Self::new(EXIT_IO, format!("{}: {err}", path.display()))
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_IO)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Validate { graph } => validate(&graph),
        Command::Infer(args) => infer(&args),
        Command::GenExample { dir } => gen_example(&dir),
        Command::Assess(cmd) => assess(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_graph(path: &Path) -> Result<assessnet::AssessmentGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    load_graph(&text).map_err(|e| match e {
        LoadError::Parse(e) => Failure::io(path, e),
        LoadError::Invalid(violations) => Failure::new(EXIT_VALIDATION, report(&violations)),
    })
}

fn report(violations: &[assessnet::Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

fn validate(path: &Path) -> Outcome {
    read_graph(path)?;
    println!("OK");
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::io(path, e))
}

fn infer(args: &InferArgs) -> Outcome {
    let graph = read_graph(&args.graph)?;
    let config = InferenceConfig {
        staleness_timeout: args.stale,
        prior_weight: args.prior_weight,
        ..Default::default()
    };
    config.validate().map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;

    let file = File::open(&args.stream).map_err(|e| Failure::io(&args.stream, e))?;
    let numbered = read_records(BufReader::new(file), args.prior_weight).map_err(|e| match e {
        IoError::Io(e) => Failure::io(&args.stream, e),
        other => Failure::new(EXIT_IO, format!("{}: {other}", args.stream.display())),
    })?;
    let (lines, records): (Vec<usize>, Vec<AssessmentRecord>) = numbered.into_iter().unzip();
    let traces = evaluate_stream(&graph, &records, &config).map_err(|e| stream_failure(&args.stream, &lines, e))?;

    let mut out = create(&args.out)?;
    write_traces(&mut out, &traces, args.provenance)
        .and_then(|()| out.flush())
        .map_err(|e| Failure::io(&args.out, e))?;
    if let Some(dir) = &args.plot_export {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        let path = dir.join("plot.csv");
        let mut w = create(&path)?;
        write_plot_csv(&mut w, &traces).map_err(|e| Failure::io(&path, e))?;
    }
    Ok(())
}

fn stream_failure(path: &Path, lines: &[usize], err: EngineError) -> Failure {
    let index = match &err {
        EngineError::Record { index, .. }
        | EngineError::Unsorted { index, .. }
        | EngineError::NonFiniteTime { index } => Some(*index),
        _ => None,
    };
    let message = match (index, err) {
        (Some(i), EngineError::Record { source, .. }) => format!("{}: line {}: {source}", path.display(), lines[i]),
        (Some(i), EngineError::Unsorted { t, previous, .. }) => {
            format!(
                "{}: line {}: time {t} precedes previous time {previous}",
                path.display(),
                lines[i]
            )
        }
        (Some(i), _) => format!("{}: line {}: time is not finite", path.display(), lines[i]),
        (None, e) => format!("{}: {e}", path.display()),
    };
    Failure::new(EXIT_STREAM, message)
}

fn gen_example(dir: &Path) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    let graphs = [
        ("graph.json", scenario::example_graph()),
        ("extended-graph.json", scenario::extended_graph()),
    ];
    for (name, graph) in graphs {
        let path = dir.join(name);
        fs::write(&path, GraphDocument::from_graph(&graph).to_json_pretty()).map_err(|e| Failure::io(&path, e))?;
    }
    let path = dir.join("stream.jsonl");
    let mut w = create(&path)?;
    write_records(&mut w, &scenario::example_stream())
        .and_then(|()| w.flush())
        .map_err(|e| Failure::io(&path, e))
}

fn read_inputs<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<Vec<(usize, T)>, Failure> {
    let file = File::open(path).map_err(|e| Failure::io(path, e))?;
    read_jsonl(BufReader::new(file)).map_err(|e| Failure::io(path, e))
}

fn assess(cmd: AssessCommand) -> Outcome {
    let (io, records) = match cmd {
        AssessCommand::Planner(io) => {
            let mut out = Vec::new();
            for (line, r) in read_inputs::<PlannerRecord>(&io.input)? {
                let tc = TrajectoryClassification::new(r.n, &r.nonfunctional_indices, r.u)
                    .map_err(|e| Failure::new(EXIT_STREAM, format!("{}: line {line}: {e}", io.input.display())))?;
                out.push(AssessmentRecord::new(
                    r.t,
                    &io.source,
                    &io.target,
                    planner_assess(&tc, io.base_rate),
                ));
            }
            (io, out)
        }
        AssessCommand::Evidence { io, prior_weight } => {
            let mut out = Vec::new();
            for (line, r) in read_inputs::<EvidenceRecord>(&io.input)? {
                let o = evidence_assess(r.r, r.s, prior_weight, io.base_rate)
                    .map_err(|e| Failure::new(EXIT_STREAM, format!("{}: line {line}: {e}", io.input.display())))?;
                out.push(AssessmentRecord::new(r.t, &io.source, &io.target, o));
            }
            (io, out)
        }
        AssessCommand::Window {
            io,
            window_len,
            decay,
            prior_weight,
        } => {
            let params = WindowParams {
                window_len,
                decay,
                prior_weight,
                base_rate: io.base_rate,
            };
            let mut fuser = WindowedFuser::new(params).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
            let mut out = Vec::new();
            for (line, r) in read_inputs::<WindowRecord>(&io.input)? {
                let step = fuser
                    .step(&r.step, &r.reference)
                    .map_err(|e| Failure::new(EXIT_STREAM, format!("{}: line {line}: {e}", io.input.display())))?;
                out.push(AssessmentRecord::new(r.t, &io.source, &io.target, step.assessment));
            }
            (io, out)
        }
    };
    let mut w = create(&io.out)?;
    write_records(&mut w, &records)
        .and_then(|()| w.flush())
        .map_err(|e| Failure::io(&io.out, e))
}
