use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use padl_core::elaboration::{insert_async_queues, Closure, Elaboration, DEFAULT_CAPACITY};
use padl_core::equivalence::{check as bisimilar, Mode, Verdict as Equivalence};
use padl_core::frontend;
use padl_core::kernel::{parse_aut, write_aut, write_dot, DeadlockNotion, DEFAULT_STATE_LIMIT};
use padl_core::topology::{
    build_flow_graph, decompose, to_dot, verify_deadlock_by_reduction, verify_deadlock_direct, Report,
    SCHEMA_VERSION,
};

/// Deadlock verification of PADL architectural descriptions.
#[derive(Parser)]
#[command(name = "padl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify deadlock freedom of an architecture.
    Check(CheckArgs),
    /// Export the semantics of one instance.
    Lts(LtsArgs),
    /// Export the flow graph with its decomposition.
    Graph(GraphArgs),
    /// Compare two transition systems in Aldebaran format.
    Equiv(EquivArgs),
}

#[derive(Args)]
struct Limits {
    /// Capacity of the queues inserted for asynchronous interactions.
    #[arg(long, default_value_t = DEFAULT_CAPACITY, value_parser = clap::value_parser!(u32).range(1..))]
    queue_capacity: u32,
    /// Maximum number of states of any generated system.
    #[arg(long, default_value_t = DEFAULT_STATE_LIMIT as u64, value_parser = clap::value_parser!(u64).range(1..))]
    state_limit: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Notion {
    Weak,
    Strict,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckMode {
    Reduce,
    Direct,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[command(flatten)]
    limits: Limits,
    #[arg(long, value_enum, default_value_t = Notion::Weak)]
    deadlock: Notion,
    #[arg(long, value_enum, default_value_t = CheckMode::Reduce)]
    mode: CheckMode,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave timings out of the report.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args)]
struct LtsArgs {
    file: PathBuf,
    /// Instance whose semantics is exported.
    #[arg(long)]
    aei: String,
    /// `open`, `pc` or `tc`, then `-wob` (no buffers), `-all` or a
    /// `+`-separated list of instances whose buffers are kept.
    #[arg(long, default_value = "pc-wob")]
    variant: String,
    /// Comma-separated instances forming the context; all by default.
    #[arg(long, value_delimiter = ',')]
    context: Vec<String>,
    #[command(flatten)]
    limits: Limits,
    /// Aldebaran output path; standard output by default.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a Graphviz rendering here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArgs {
    file: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EquivArgs {
    left: PathBuf,
    right: PathBuf,
    /// Strong instead of weak bisimilarity.
    #[arg(long)]
    strong: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

/// A failure reported with exit code 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Usage> {
    fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Usage> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<frontend::ValidatedArchitecture, Usage> {
    let src = read(path)?;
    frontend::load(&src).map_err(|diags| {
        let file = path.display().to_string();
        Usage(diags.iter().map(|d| d.render(&file)).collect::<Vec<_>>().join("\n"))
    })
}

fn elaborate(path: &Path, limits: &Limits) -> Result<Elaboration, Usage> {
    let mut elab = insert_async_queues(&load(path)?, limits.queue_capacity)?;
    elab.set_state_limit(limits.state_limit as usize);
    Ok(elab)
}

fn check(args: CheckArgs) -> Result<u8, Usage> {
    let elab = elaborate(&args.file, &args.limits)?;
    let notion = match args.deadlock {
        Notion::Weak => DeadlockNotion::Weak,
        Notion::Strict => DeadlockNotion::Strict,
    };
    let reduction = match args.mode {
        CheckMode::Reduce | CheckMode::Both => Some(verify_deadlock_by_reduction(&elab, notion)?),
        CheckMode::Direct => None,
    };
    let direct = match args.mode {
        CheckMode::Direct | CheckMode::Both => Some(verify_deadlock_direct(&elab, notion)?),
        CheckMode::Reduce => None,
    };
    let mut report = Report::new(
        elab.architecture().name().to_string(),
        elab.capacity(),
        elab.state_limit(),
        notion,
        reduction,
        direct,
    );
    if args.no_timings {
        report.strip_timings();
    }
    let text = match args.format {
        Format::Text => report.render_text(),
        Format::Json => report.to_json() + "\n",
    };
    emit(args.out.as_deref(), &text)?;
    Ok(report.verdict.exit_code() as u8)
}

fn parse_variant(v: &str, elab: &Elaboration) -> Result<(Closure, BTreeSet<usize>), Usage> {
    let (closure, buffers) = v.split_once('-').unwrap_or((v, "wob"));
    let closure = match closure {
        "open" => Closure::Open,
        "pc" => Closure::Partial,
        "tc" => Closure::Total,
        other => return Err(Usage(format!("unknown closure `{other}` in variant `{v}`"))),
    };
    let buffers = match buffers {
        "wob" => BTreeSet::new(),
        "all" => elab.all_aeis(),
        list => {
            let names: Vec<String> = list.split('+').map(str::to_string).collect();
            if names.iter().any(String::is_empty) {
                return Err(Usage(format!("malformed buffer list in variant `{v}`")));
            }
            elab.aei_set(&names)?
        }
    };
    Ok((closure, buffers))
}

fn lts(args: LtsArgs) -> Result<u8, Usage> {
    let elab = elaborate(&args.file, &args.limits)?;
    let (closure, buffers) = parse_variant(&args.variant, &elab)?;
    let aei = elab.aei(&args.aei)?;
    let context = if args.context.is_empty() { elab.all_aeis() } else { elab.aei_set(&args.context)? };
    if !context.contains(&aei) {
        return Err(Usage(format!("the context must contain `{}`", args.aei)));
    }
    let sem = elab.aei_semantics(aei, &context, closure, &buffers)?;
    emit(args.out.as_deref(), &write_aut(&sem.lts))?;
    if let Some(p) = &args.dot {
        emit(Some(p), &write_dot(&sem.lts))?;
    }
    Ok(0)
}

fn graph(args: GraphArgs) -> Result<u8, Usage> {
    let g = build_flow_graph(&load(&args.file)?);
    emit(args.out.as_deref(), &to_dot(&g, &decompose(&g)))?;
    Ok(0)
}

fn equiv(args: EquivArgs) -> Result<u8, Usage> {
    let left = parse_aut(&read(&args.left)?).map_err(|e| Usage(format!("{}: {e}", args.left.display())))?;
    let right = parse_aut(&read(&args.right)?).map_err(|e| Usage(format!("{}: {e}", args.right.display())))?;
    let mode = if args.strong { Mode::Strong } else { Mode::Weak };
    let verdict = bisimilar(&left, &right, mode);
    let text = match args.format {
        Format::Text => match &verdict {
            Equivalence::Equivalent { relation } => format!("equivalent ({} related pairs)\n", relation.len()),
            Equivalence::Distinct { formula } => format!("distinct\nformula true on the left only: {formula}\n"),
        },
        Format::Json => {
            let doc = serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "mode": mode,
                "equivalent": verdict.is_equivalent(),
                "formula": verdict.formula().map(ToString::to_string),
            });
            format!("{doc:#}\n")
        }
    };
    print!("{text}");
    Ok(if verdict.is_equivalent() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Check(a) => check(a),
        Command::Lts(a) => lts(a),
        Command::Graph(a) => graph(a),
        Command::Equiv(a) => equiv(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Usage(msg)) => {
            eprintln!("padl: {msg}");
            ExitCode::from(2)
        }
    }
}
