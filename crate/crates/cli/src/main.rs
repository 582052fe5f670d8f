use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use treewise::asp::{clark_completion, decompose_program, solve_normal_asp, AspError};
use treewise::dg::{reduce_asp_to_sat, DgReductionOutput};
use treewise::dp::solve_with_heuristic;
use treewise::hybrid::{hybrid_count_with_stats, hybrid_decide_with_stats, HybridError, SolverConfig, SubSolver};
use treewise::td::decompose_vertices;
use treewise::{decompose, make_nice, validate, CnfFormula, Heuristic, PrimalGraph, Program, TreeDecomposition};

const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_SUB_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "treewise", version, propagate_version = true, about = "Treewidth-based SAT, #SAT and ASP solving")]
struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Heuristic tree decomposition of a graph, formula or program, in .td format.
    Decompose {
        input: String,
        #[command(flatten)]
        input_opts: InputOpts,
        #[command(flatten)]
        td_opts: TdOpts,
        /// Write the decomposition here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a decomposition against a graph; exit 0 iff valid.
    Validate {
        #[arg(long)]
        td: String,
        /// Graph as .gr, or a .cnf/.lp whose primal graph is used.
        #[arg(long)]
        graph: String,
        #[command(flatten)]
        input_opts: InputOpts,
    },
    /// Satisfiability of a CNF formula (exit 10 SAT, 20 UNSAT).
    Solve(SolveArgs),
    /// Exact model count of a CNF formula.
    Count(SolveArgs),
    /// Answer-set existence for a normal program (exit 10 SAT, 20 UNSAT).
    Asp {
        input: String,
        #[arg(long, value_enum, default_value_t = AspMode::Auto)]
        mode: AspMode,
        #[command(flatten)]
        input_opts: InputOpts,
        #[command(flatten)]
        td_opts: TdOpts,
        #[arg(long)]
        stats_out: Option<PathBuf>,
    },
    /// Decomposition-guided reductions.
    Reduce {
        #[command(subcommand)]
        kind: ReduceKind,
    },
    /// Size, heuristic widths and (for programs) tightness of an instance.
    Stats {
        input: String,
        #[command(flatten)]
        input_opts: InputOpts,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ReduceKind {
    /// Normal program to CNF with a guided decomposition and width report.
    Asp2sat {
        input: String,
        /// Decomposition of the program's primal graph (default: heuristic, made nice).
        #[arg(long)]
        td: Option<String>,
        #[command(flatten)]
        input_opts: InputOpts,
        #[command(flatten)]
        td_opts: TdOpts,
        /// Write PREFIX.cnf, PREFIX.td and PREFIX.width.jsonl instead of
        /// printing the formula (with the report as comments) to stdout.
        #[arg(short, long, value_name = "PREFIX")]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    input: String,
    #[command(flatten)]
    input_opts: InputOpts,
    #[command(flatten)]
    td_opts: TdOpts,
    /// Width up to which plain dynamic programming is used.
    #[arg(short = 'W', long = "width", default_value_t = 10)]
    width: usize,
    /// Nesting depth for residual sub-instances.
    #[arg(short = 'D', long = "depth", default_value_t = 1)]
    depth: usize,
    /// External sub-solver command, e.g. "counter {file}"; internal enumeration by default.
    #[arg(long)]
    sub_solver: Option<String>,
    /// Boundary assignments cached per component while 2^|boundary| stays below this.
    #[arg(long, default_value_t = 1 << 20)]
    boundary_budget: u64,
    /// Write run statistics as JSON.
    #[arg(long)]
    stats_out: Option<PathBuf>,
}

#[derive(Args)]
struct InputOpts {
    /// Input format; inferred from the file extension when absent.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct TdOpts {
    #[arg(long, default_value = "min-fill", value_parser = parse_heuristic)]
    heuristic: Heuristic,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Cnf,
    Gr,
    Lp,
    Td,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AspMode {
    Auto,
    Tight,
    Normal,
}

fn parse_heuristic(s: &str) -> Result<Heuristic, String> {
    s.parse()
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<HybridError> for Failure {
    fn from(e: HybridError) -> Self {
        let code = match e {
            HybridError::SubSolverFailure(_) | HybridError::DepthExhaustedWithoutSubSolver { .. } => EXIT_SUB_SOLVER,
            HybridError::InvalidConfig(_) => EXIT_USAGE,
            HybridError::Dp(_) => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<AspError> for Failure {
    fn from(e: AspError) -> Self {
        Failure::input(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                eprintln!("e missing subcommand; see --help");
                return ExitCode::from(EXIT_USAGE);
            }
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("e {first}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("e {}", f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Decompose {
            input,
            input_opts,
            td_opts,
            output,
        } => {
            let graph = load_graph(&input, input_opts.format)?;
            let td = decompose(&graph, td_opts.heuristic, td_opts.seed);
            log::info!("width {}", td.width());
            emit(output.as_deref(), &td.to_pace())?;
            Ok(0)
        }
        Command::Validate { td, graph, input_opts } => {
            let graph = load_graph(&graph, input_opts.format)?;
            let td = TreeDecomposition::parse_pace(&read_input(&td)?).map_err(|e| Failure::input(format!("{td}: {e}")))?;
            let report = validate(&td, &graph);
            if report.is_valid() {
                return Ok(0);
            }
            for violation in &report.violations {
                say(&format!("{violation}\n"));
            }
            Ok(EXIT_UNSAT)
        }
        Command::Solve(args) => solve(args, false),
        Command::Count(args) => solve(args, true),
        Command::Asp {
            input,
            mode,
            input_opts,
            td_opts,
            stats_out,
        } => asp(&input, mode, input_opts.format, &td_opts, stats_out.as_deref()),
        Command::Reduce {
            kind:
                ReduceKind::Asp2sat {
                    input,
                    td,
                    input_opts,
                    td_opts,
                    output,
                },
        } => reduce(&input, td.as_deref(), input_opts.format, &td_opts, output.as_deref()),
        Command::Stats { input, input_opts, seed } => stats(&input, input_opts.format, seed),
    }
}

fn solve(args: SolveArgs, count: bool) -> Outcome {
    let cnf = load_cnf(&args.input, args.input_opts.format)?;
    let config = SolverConfig {
        width_threshold: args.width,
        max_depth: args.depth,
        sub_solver: args.sub_solver.map_or(SubSolver::Internal, SubSolver::External),
        heuristic: args.td_opts.heuristic,
        seed: args.td_opts.seed,
        boundary_budget: args.boundary_budget,
    };
    let (sat, stats) = if count {
        let (n, stats) = hybrid_count_with_stats(&cnf, &config)?;
        say(&format!("c s exact arb int {n}\n"));
        (n > 0u32.into(), stats)
    } else {
        let (sat, stats) = hybrid_decide_with_stats(&cnf, &config)?;
        say(&format!("s {}\n", if sat { "SATISFIABLE" } else { "UNSATISFIABLE" }));
        (sat, stats)
    };
    log::info!("widths seen {:?}", stats.widths_seen);
    if let Some(path) = args.stats_out {
        let json = serde_json::to_string_pretty(&stats).expect("stats serialize");
        write_file(&path, &(json + "\n"))?;
    }
    Ok(if sat { EXIT_SAT } else { EXIT_UNSAT })
}

fn asp(input: &str, mode: AspMode, format: Option<Format>, td: &TdOpts, stats_out: Option<&Path>) -> Outcome {
    let program = load_program(input, format)?;
    let tight = program.is_tight();
    let use_completion = match mode {
        AspMode::Tight if !tight => return Err(Failure::input(AspError::NotTight.to_string())),
        AspMode::Tight => true,
        AspMode::Normal => false,
        AspMode::Auto => tight,
    };
    let (answer, path, width) = if use_completion {
        let completion = clark_completion(&program)?;
        let cnf = &completion.cnf;
        let ntd = treewise::dp::decompose_formula(cnf, td.heuristic, td.seed);
        let answer = solve_with_heuristic(cnf, td.heuristic, td.seed).map_err(AspError::from)?;
        (answer, "completion", ntd.width())
    } else {
        let ntd = decompose_program(&program, td.heuristic, td.seed);
        (solve_normal_asp(&program, &ntd)?, "normal", ntd.width())
    };
    log::info!("{path} path, width {width}");
    if let Some(p) = stats_out {
        let json = serde_json::json!({ "tight": tight, "path": path, "width": width });
        write_file(p, &(serde_json::to_string_pretty(&json).expect("stats serialize") + "\n"))?;
    }
    say(if answer { "SAT\n" } else { "UNSAT\n" });
    Ok(if answer { EXIT_SAT } else { EXIT_UNSAT })
}

fn reduce(input: &str, td: Option<&str>, format: Option<Format>, td_opts: &TdOpts, output: Option<&Path>) -> Outcome {
    let program = load_program(input, format)?;
    let td = match td {
        Some(path) => {
            TreeDecomposition::parse_pace(&read_input(path)?).map_err(|e| Failure::input(format!("{path}: {e}")))?
        }
        None => {
            let graph = PrimalGraph::of_program(&program);
            let td = decompose(&graph, td_opts.heuristic, td_opts.seed);
            make_nice(&td).expect("heuristic decompositions are valid").to_tree_decomposition()
        }
    };
    let out = reduce_asp_to_sat(&program, &td).map_err(|e| Failure::input(e.to_string()))?;
    let report = width_report(&out);
    match output {
        Some(prefix) => {
            let with = |ext: &str| {
                let mut p = prefix.as_os_str().to_owned();
                p.push(ext);
                PathBuf::from(p)
            };
            write_file(&with(".cnf"), &out.formula.to_dimacs())?;
            write_file(&with(".td"), &out.output_td.to_pace())?;
            write_file(&with(".width.jsonl"), &report)?;
        }
        None => {
            let mut text = String::new();
            for line in report.lines() {
                writeln!(text, "c {line}").expect("string write");
            }
            text.push_str(&out.formula.to_dimacs());
            say(&text);
        }
    }
    Ok(0)
}

/// One JSON object per node, then the certificate.
fn width_report(out: &DgReductionOutput) -> String {
    let mut text = String::new();
    for row in &out.rows {
        writeln!(text, "{}", serde_json::to_string(row).expect("row serialize")).expect("string write");
    }
    let mut cert = serde_json::to_value(&out.certificate).expect("certificate serialize");
    cert["bound"] = out.certificate.bound_text().into();
    writeln!(text, "{cert}").expect("string write");
    text
}

fn stats(input: &str, format: Option<Format>, seed: u64) -> Outcome {
    let format = resolve_format(input, format)?;
    let text = read_input(input)?;
    let parse_err = |e: treewise::ParseError| Failure::input(format!("{input}: {e}"));
    let mut lines = Vec::new();
    let (graph, members) = match format {
        Format::Cnf => {
            let cnf = CnfFormula::parse_dimacs(&text).map_err(parse_err)?;
            lines.push(format!("vars {}", cnf.num_vars()));
            lines.push(format!("clauses {}", cnf.num_clauses()));
            if cnf.tautologies_dropped() > 0 {
                lines.push(format!("tautologies-dropped {}", cnf.tautologies_dropped()));
            }
            (PrimalGraph::of_cnf(&cnf), cnf.occurring_vars())
        }
        Format::Lp => {
            let program = Program::parse(&text).map_err(parse_err)?;
            lines.push(format!("atoms {}", program.num_atoms()));
            lines.push(format!("rules {}", program.rules().len()));
            lines.push(format!("tight {}", if program.is_tight() { "yes" } else { "no" }));
            let g = PrimalGraph::of_program(&program);
            let all = vec![true; g.vertex_count()];
            (g, all)
        }
        Format::Gr => {
            let g = PrimalGraph::parse_pace(&text).map_err(parse_err)?;
            let all = vec![true; g.vertex_count()];
            (g, all)
        }
        Format::Td => {
            let td = TreeDecomposition::parse_pace(&text).map_err(parse_err)?;
            lines.push(format!("vertices {}", td.num_vertices()));
            lines.push(format!("bags {}", td.node_count()));
            lines.push(format!("width {}", td.width()));
            say(&(lines.join("\n") + "\n"));
            return Ok(0);
        }
    };
    lines.push(format!("vertices {}", graph.vertex_count()));
    lines.push(format!("edges {}", graph.edge_count()));
    for h in Heuristic::ALL {
        let td = decompose_vertices(&graph, &members, h, seed);
        lines.push(format!("width {} {}", h.name(), td.width()));
    }
    say(&(lines.join("\n") + "\n"));
    Ok(0)
}

fn resolve_format(input: &str, format: Option<Format>) -> Result<Format, Failure> {
    if let Some(f) = format {
        return Ok(f);
    }
    match Path::new(input).extension().and_then(|e| e.to_str()) {
        Some("cnf") => Ok(Format::Cnf),
        Some("gr") => Ok(Format::Gr),
        Some("lp") => Ok(Format::Lp),
        Some("td") => Ok(Format::Td),
        _ => Err(Failure {
            code: EXIT_USAGE,
            message: format!("cannot infer the format of `{input}`; pass --format"),
        }),
    }
}

/// Reads a file, or stdin for `-`.
fn read_input(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    let result = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    result.map_err(|e| Failure::input(format!("cannot read {path}: {e}")))?;
    Ok(text)
}

fn load_graph(path: &str, format: Option<Format>) -> Result<PrimalGraph, Failure> {
    let text = read_input(path)?;
    let err = |e: treewise::ParseError| Failure::input(format!("{path}: {e}"));
    match resolve_format(path, format)? {
        Format::Gr => PrimalGraph::parse_pace(&text).map_err(err),
        Format::Cnf => Ok(PrimalGraph::of_cnf(&CnfFormula::parse_dimacs(&text).map_err(err)?)),
        Format::Lp => Ok(PrimalGraph::of_program(&Program::parse(&text).map_err(err)?)),
        Format::Td => Err(Failure::input(format!("{path}: expected a graph, formula or program"))),
    }
}

fn load_cnf(path: &str, format: Option<Format>) -> Result<CnfFormula, Failure> {
    match resolve_format(path, format)? {
        Format::Cnf => CnfFormula::parse_dimacs(&read_input(path)?).map_err(|e| Failure::input(format!("{path}: {e}"))),
        _ => Err(Failure::input(format!("{path}: expected a DIMACS CNF formula"))),
    }
}

fn load_program(path: &str, format: Option<Format>) -> Result<Program, Failure> {
    match resolve_format(path, format)? {
        Format::Lp => Program::parse(&read_input(path)?).map_err(|e| Failure::input(format!("{path}: {e}"))),
        _ => Err(Failure::input(format!("{path}: expected a logic program"))),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            say(&text);
            Ok(())
        }
    }
}

/// Writes to stdout; a closed pipe is not an error worth reporting.
fn say(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}
