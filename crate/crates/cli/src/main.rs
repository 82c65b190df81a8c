use std::path::PathBuf;
use std::process::ExitCode;

use ainf_cli::{run, Command, Config, Job, OUT_DIR_ENV};
use clap::{ArgGroup, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ainf", version, about = "Curved A-infinity deformations: checks, minimal models, twisted complexes")]
struct Cli {
    /// Longest input tuple used by relation and functor checks.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u16).range(1..))]
    a_max: u16,
    /// Highest arity computed for minimal-model products.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u16).range(1..))]
    k_max: u16,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for reports and emitted files.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Relation, unitality and twisted-complex checks.
    Verify { input: PathBuf },
    /// Classical minimal model on cohomology.
    MinimalModel { input: PathBuf },
    /// Deformed minimal model `HC_q` with its functor.
    DeformedMinimalModel {
        input: PathBuf,
        /// Also emit the curvature optimization trace.
        #[arg(long)]
        trace: bool,
    },
    /// Iterated uncurving towards optimal curvature.
    OptimizeCurvature { input: PathBuf },
    /// Hochschild cochain of the deformation and its Maurer-Cartan defect.
    HochschildMc { input: PathBuf },
    /// Uncurving by the document's `uncurving` elements, with the gauge functor.
    Gauge { input: PathBuf },
    /// Curvature of each twisted complex.
    TwCurvature { input: PathBuf },
    /// Order-by-order search for an uncurving element.
    UncurveObject {
        input: PathBuf,
        #[arg(long)]
        object: Option<String>,
    },
    /// Checks around the differential `D` on `B ⊗ H`.
    CheckDZero { input: PathBuf },
    /// Compares the cohomology of `μ_q¹` with that of `D`.
    CohomologyCompare { input: PathBuf },
    /// Planar trees with every internal node of valence at least 2.
    #[command(group(ArgGroup::new("mode").required(true).args(["count", "list"])))]
    Trees {
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        list: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(ainf_cli::EXIT_INPUT_ERROR as u8);
        }
    }
    let cfg = Config { a_max: cli.a_max as usize, k_max: cli.k_max as usize };
    let input = |command: Command, path: PathBuf| Job::Input { command, path };
    let job = match cli.command {
        Cmd::Verify { input: p } => input(Command::Verify, p),
        Cmd::MinimalModel { input: p } => input(Command::MinimalModel, p),
        Cmd::DeformedMinimalModel { input: p, trace } => input(Command::DeformedMinimalModel { trace }, p),
        Cmd::OptimizeCurvature { input: p } => input(Command::OptimizeCurvature, p),
        Cmd::HochschildMc { input: p } => input(Command::HochschildMc, p),
        Cmd::Gauge { input: p } => input(Command::Gauge, p),
        Cmd::TwCurvature { input: p } => input(Command::TwCurvature, p),
        Cmd::UncurveObject { input: p, object } => input(Command::UncurveObject { object }, p),
        Cmd::CheckDZero { input: p } => input(Command::CheckDZero, p),
        Cmd::CohomologyCompare { input: p } => input(Command::CohomologyCompare, p),
        Cmd::Trees { count, list } => Job::Trees { count, list },
    };
    let done = run(&job, &cfg, cli.out.as_deref());
    print!("{}", done.stdout);
    eprint!("{}", done.stderr);
    ExitCode::from(done.code as u8)
}
