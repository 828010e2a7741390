use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lcomplete::Reflector;
use lcomplete_cli::{load_input, render_text, run, write_atomic, CliError, CliResult, Command, JobSpec, Options};

#[derive(Parser)]
#[command(name = "lcomplete", version, about = "Exact module computations, L0 reflections and completion certificates")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of random samples in property suites.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Window (levels / grades) for tower computations.
    #[arg(long, global = true)]
    window: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Reflector: mod:p:N, tfq:p or complete:p.
    #[arg(long, global = true)]
    functor: Option<Reflector>,
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Largest group order in exhaustive enumerations.
    #[arg(long, global = true)]
    exhaustive_order: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invariant factors and a minimal presentation of a module.
    Normalize { module: PathBuf },
    Kernel { morphism: PathBuf },
    Cokernel { morphism: PathBuf },
    /// Tensor product; with --functor, the transported tensor product.
    Tensor { left: PathBuf, right: PathBuf },
    /// Hom module; with --functor, the internal hom of the subcategory.
    Hom { source: PathBuf, target: PathBuf },
    /// p-adic completion of a finitely generated module, or the completion
    /// tower of a graded module.
    Complete { input: PathBuf },
    /// L0F of a module, with its unit.
    L0 { module: PathBuf },
    CheckCriterion,
    CheckMonoidal,
    CheckAdjunction,
    /// Certificates that naive p-adic completion is not the abelian
    /// approximation.
    CertifyNoncomplete,
    /// Stage-wise idempotence of completion on a graded module.
    Idempotence { graded: PathBuf },
    /// Re-verifies a report's certificates and re-runs its job.
    VerifyReport { report: PathBuf },
}

impl Cmd {
    fn split(&self) -> (Command, Vec<&Path>) {
        match self {
            Cmd::Normalize { module } => (Command::Normalize, vec![module]),
            Cmd::Kernel { morphism } => (Command::Kernel, vec![morphism]),
            Cmd::Cokernel { morphism } => (Command::Cokernel, vec![morphism]),
            Cmd::Tensor { left, right } => (Command::Tensor, vec![left, right]),
            Cmd::Hom { source, target } => (Command::Hom, vec![source, target]),
            Cmd::Complete { input } => (Command::Complete, vec![input]),
            Cmd::L0 { module } => (Command::L0, vec![module]),
            Cmd::CheckCriterion => (Command::CheckCriterion, vec![]),
            Cmd::CheckMonoidal => (Command::CheckMonoidal, vec![]),
            Cmd::CheckAdjunction => (Command::CheckAdjunction, vec![]),
            Cmd::CertifyNoncomplete => (Command::CertifyNoncomplete, vec![]),
            Cmd::Idempotence { graded } => (Command::Idempotence, vec![graded]),
            Cmd::VerifyReport { report } => (Command::VerifyReport, vec![report]),
        }
    }
}

fn job(cli: &Cli) -> CliResult<JobSpec> {
    let (command, paths) = cli.command.split();
    let inputs =
        paths.iter().zip(command.expected_inputs()).map(|(p, k)| load_input(p, *k)).collect::<CliResult<Vec<_>>>()?;
    let f = &cli.flags;
    Ok(JobSpec {
        command,
        inputs,
        options: Options {
            seed: f.seed,
            samples: f.samples,
            window: f.window,
            functor: f.functor,
            p: f.p,
            exhaustive_order: f.exhaustive_order,
            out: f.out.as_ref().map(|p| p.display().to_string()),
        },
    })
}

/// A closed pipe (`lcomplete ... | head`) is not an error.
fn print_stdout(body: &str) -> CliResult<()> {
    let mut out = io::stdout().lock();
    match out.write_all(body.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            Err(CliError::Io { path: "<stdout>".into(), message: e.to_string() })
        }
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = job(&cli).and_then(|j| run(&j)).and_then(|report| {
        let body = match cli.flags.format {
            Format::Json => report.to_json(),
            Format::Text => render_text(&report),
        };
        match &cli.flags.out {
            Some(path) => write_atomic(path, &body)?,
            None => print_stdout(&body)?,
        }
        Ok(report.exit_code())
    });
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("lcomplete: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
