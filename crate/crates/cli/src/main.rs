use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use splitpde::flows::{DEFAULT_CN_SUBSTEPS, DEFAULT_REACTION_SUBSTEPS};
use splitpde::harness::study::LOCAL_REFERENCE_SUBSTEPS;
use splitpde::harness::{
    builtin_problem, emit, parse_steps, run_convergence, run_local_error, ExperimentSpec, Format, ProblemConfig,
    ProblemId, ReferencePolicy, ResultTable,
};
use splitpde::{CnSolver, LinearFlowConfig, LinearMethod, Norm, Problem, Scheme};

/// Convergence tables for classical and boundary-corrected Lie/Strang
/// splitting of u_t = u_xx + u^2 with Dirichlet data.
#[derive(Parser)]
#[command(name = "splitpde", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Show the built-in problems, schemes, norms and reference policies.
    List,
    /// Global errors at the final time under step halving.
    Run(StudyArgs),
    /// Errors after a single step from the initial value.
    LocalError(StudyArgs),
}

#[derive(Args)]
struct StudyArgs {
    /// Built-in problem (P1..P5).
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    problem: Option<ProblemId>,
    /// Problem file with `key = value` lines.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Comma-separated: lie, lie-mod, strang, strang-mod.
    #[arg(long, default_value = "lie,lie-mod,strang,strang-mod")]
    schemes: String,
    /// Comma-separated: inf, one, two.
    #[arg(long, value_delimiter = ',', default_value = "inf")]
    norms: Vec<Norm>,
    /// START:halve:COUNT or a comma-separated list [default: depends on the study]
    #[arg(long)]
    steps: Option<String>,
    /// csv or markdown.
    #[arg(long, default_value = "markdown")]
    format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Interior nodes per axis.
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Linear sub-flow: exp, midpoint or cn.
    #[arg(long, default_value = "midpoint")]
    linear: LinearMethod,
    #[arg(long, value_name = "M", default_value_t = DEFAULT_CN_SUBSTEPS)]
    cn_substeps: usize,
    /// Solve the Crank-Nicolson systems by conjugate gradients.
    #[arg(long)]
    cg: bool,
    /// RK4 substeps per reaction sub-flow.
    #[arg(long, value_name = "K", default_value_t = DEFAULT_REACTION_SUBSTEPS)]
    reaction_substeps: usize,
    /// Closed-form reaction flow instead of RK4.
    #[arg(long)]
    exact_reaction: bool,
    /// auto, modstrang[:TAU], same:TAU or substep:K.
    #[arg(long, default_value = "auto")]
    reference: String,
    /// Reaction-first Strang and diffusion-first Lie.
    #[arg(long)]
    reversed: bool,
}

fn list() -> String {
    let mut out = String::from("problems:\n");
    for id in ProblemId::ALL {
        let _ = writeln!(out, "  {:<4}{} (n = {})", id.name(), id.description(), id.default_n());
    }
    out.push_str("schemes:\n");
    for s in Scheme::ALL {
        let _ = writeln!(out, "  {:<12}{}", s.tag(), s.label());
    }
    out.push_str("norms:\n");
    for n in Norm::ALL {
        let _ = writeln!(out, "  {:<12}{}", n.tag(), n.label());
    }
    out.push_str("linear sub-flows:\n  exp         exponential Euler (time-independent data only)\n  midpoint    exponential midpoint (default)\n  cn          Crank-Nicolson with --cn-substeps\n");
    out.push_str("references:\n  auto        per problem; substep:100 for local-error\n  modstrang[:TAU]\n  same:TAU\n  substep:K\n");
    out
}

fn load_problem(args: &StudyArgs) -> Result<(Problem, Option<ReferencePolicy>)> {
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg = ProblemConfig::parse(&text).with_context(|| format!("in {}", path.display()))?;
        let reference = cfg.reference.or(Some(ReferencePolicy::ModifiedStrang { tau: None }));
        return Ok((cfg.build(args.grid)?, reference));
    }
    let id = args.problem.expect("clap requires --problem or --config");
    Ok((builtin_problem(id, args.grid)?, Some(id.default_reference())))
}

fn parse_schemes(s: &str) -> Result<Vec<Scheme>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Scheme>().map_err(Into::into))
        .collect()
}

fn header(tables: &[ResultTable]) -> String {
    let Some(first) = tables.first() else {
        return String::new();
    };
    let mut out = String::new();
    for key in ["study", "problem", "grid", "t_final", "reaction", "linear flow", "reference", "boundary rate"] {
        if let Some(v) = first.meta(key) {
            let _ = writeln!(out, "- {key}: {v}");
        }
    }
    let walls: Vec<String> = tables
        .iter()
        .map(|t| format!("{} {}", t.scheme, t.meta("wall time").unwrap_or("?")))
        .collect();
    let _ = writeln!(out, "- wall time: {}\n", walls.join(", "));
    out
}

fn study(args: &StudyArgs, local: bool) -> Result<ExitCode> {
    let (problem, default_reference) = load_problem(args)?;
    let steps = match &args.steps {
        Some(s) => s.clone(),
        None if problem.grid.dim() == 2 => "0.1:halve:4".into(),
        None if local => "6.25e-3:halve:4".into(),
        None => "2e-2:halve:7".into(),
    };
    let reference = match ReferencePolicy::parse(&args.reference)? {
        Some(r) => r,
        None if local => ReferencePolicy::Substep { k: LOCAL_REFERENCE_SUBSTEPS },
        None => default_reference.expect("every problem has a default"),
    };
    let mut spec = ExperimentSpec::new(problem, parse_steps(&steps)?, reference);
    spec.schemes = parse_schemes(&args.schemes)?;
    spec.norms = args.norms.clone();
    spec.linear = LinearFlowConfig {
        method: args.linear,
        cn_substeps: args.cn_substeps,
        cn_solver: if args.cg { CnSolver::ConjugateGradient } else { CnSolver::Direct },
    };
    spec.reaction_substeps = args.reaction_substeps;
    spec.exact_reaction = args.exact_reaction;
    spec.reversed = args.reversed;

    let tables = if local { run_local_error(&spec) } else { run_convergence(&spec) }?;
    let mut text = String::new();
    if args.format == Format::Markdown {
        text.push_str(&header(&tables));
    }
    text.push_str(&emit(&tables, &spec.norms, args.format));
    match &args.out {
        Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }

    let mut failed = false;
    for t in &tables {
        for row in &t.rows {
            if let Some(msg) = &row.failure {
                eprintln!("{} at step size {:e}: {msg}", t.scheme, row.step_size);
                failed = true;
            }
        }
    }
    Ok(if failed { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // 2 is reserved for failed cells
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::List => {
            print!("{}", list());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(args) => study(args, false),
        Command::LocalError(args) => study(args, true),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
