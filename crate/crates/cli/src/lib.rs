//! Batch front end: a [`JobSpec`] names a command, its parsed inputs and
//! options; [`run`] executes it and returns a self-describing [`Report`].
//!
//! Reports are deterministic functions of the job: no timestamps, no
//! hash-map iteration, and sampled suites draw from a seeded ChaCha stream.

mod commands;
mod io;
pub mod suites;
mod text;

use std::fmt;

use lcomplete::towers::{Certificate, GradedModule};
use lcomplete::{FpModule, FpMorphism, Reflector};
use serde::{Deserialize, Serialize};

pub use io::{load_input, parse_json, write_atomic};
pub use text::render_text;

pub const TOOL: &str = "lcomplete";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Bumped whenever a field of [`Report`] changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Normalize,
    Kernel,
    Cokernel,
    Tensor,
    Hom,
    Complete,
    L0,
    CheckCriterion,
    CheckMonoidal,
    CheckAdjunction,
    CertifyNoncomplete,
    Idempotence,
    VerifyReport,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Normalize => "normalize",
            Command::Kernel => "kernel",
            Command::Cokernel => "cokernel",
            Command::Tensor => "tensor",
            Command::Hom => "hom",
            Command::Complete => "complete",
            Command::L0 => "l0",
            Command::CheckCriterion => "check-criterion",
            Command::CheckMonoidal => "check-monoidal",
            Command::CheckAdjunction => "check-adjunction",
            Command::CertifyNoncomplete => "certify-noncomplete",
            Command::Idempotence => "idempotence",
            Command::VerifyReport => "verify-report",
        }
    }

    /// Input kinds, in order. `complete` accepts either a module or a graded
    /// module, resolved when the file is read.
    pub fn expected_inputs(&self) -> &'static [InputKind] {
        use InputKind::*;
        match self {
            Command::Normalize | Command::L0 => &[Module],
            Command::Kernel | Command::Cokernel => &[Morphism],
            Command::Tensor | Command::Hom => &[Module, Module],
            Command::Complete => &[ModuleOrGraded],
            Command::Idempotence => &[Graded],
            Command::VerifyReport => &[Report],
            Command::CheckCriterion | Command::CheckMonoidal | Command::CheckAdjunction | Command::CertifyNoncomplete => {
                &[]
            }
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    Module,
    Morphism,
    Graded,
    ModuleOrGraded,
    Report,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case", deny_unknown_fields)]
pub enum Input {
    Module(FpModule),
    Morphism(FpMorphism),
    GradedModule(GradedModule),
    Report(Box<Report>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functor: Option<Reflector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustive_order: Option<u64>,
    /// Where the report goes; not part of the report itself.
    #[serde(skip)]
    pub out: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    #[serde(default)]
    pub inputs: Vec<Input>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// A plain computation; nothing was being tested.
    Computed,
    Holds,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub command: Command,
    pub seed: u64,
    pub job: JobSpec,
    pub verdict: Verdict,
    pub result: serde_json::Value,
    pub certificates: Vec<Certificate>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Fails => 1,
            Verdict::Computed | Verdict::Holds => 0,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{source_name}:{line}:{column}: {message}")]
    Parse { source_name: String, line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] lcomplete::Error),
}

impl CliError {
    /// 2 for anything wrong with the input, 3 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(lcomplete::Error::Invariant(_)) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Validates the job against its command and executes it.
pub fn run(job: &JobSpec) -> CliResult<Report> {
    validate(job)?;
    let (verdict, result, certificates) = commands::execute(job)?;
    Ok(Report {
        tool: TOOL.into(),
        version: VERSION.into(),
        schema_version: SCHEMA_VERSION,
        command: job.command,
        seed: job.options.seed,
        job: job.clone(),
        verdict,
        result,
        certificates,
    })
}

fn validate(job: &JobSpec) -> CliResult<()> {
    let expected = job.command.expected_inputs();
    if job.inputs.len() != expected.len() {
        return Err(CliError::Usage(format!(
            "{} takes {} input file(s), got {}",
            job.command,
            expected.len(),
            job.inputs.len()
        )));
    }
    for (i, (input, kind)) in job.inputs.iter().zip(expected).enumerate() {
        let ok = matches!(
            (input, kind),
            (Input::Module(_), InputKind::Module | InputKind::ModuleOrGraded)
                | (Input::Morphism(_), InputKind::Morphism)
                | (Input::GradedModule(_), InputKind::Graded | InputKind::ModuleOrGraded)
                | (Input::Report(_), InputKind::Report)
        );
        if !ok {
            return Err(CliError::Usage(format!("input {} of {} has the wrong type", i + 1, job.command)));
        }
    }
    if let Some(w) = job.options.window {
        if w == 0 {
            return Err(CliError::Usage("--window must be positive".into()));
        }
    }
    Ok(())
}
