//! `dsvd`: gradient verification, gradient export and POD sensitivity fields.

mod pod_sens;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dsvd::governing::{Formulation, PhaseConvention, TripletSpec};
use dsvd::objective::ObjectiveDescriptor;
use dsvd::{cases, Error, ObjectiveSpec, Result, SplitMatrix};

#[derive(Parser, Debug)]
#[command(name = "dsvd", version, about = "Derivatives of complex SVD triplets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare analytic gradients against finite differences.
    Verify(verify::VerifyArgs),
    /// Print gradient bundles without a finite-difference check.
    Grad(GradArgs),
    /// POD singular-value sensitivity fields of a snapshot file.
    PodSens(pod_sens::PodArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CaseName {
    Square,
    Rect,
    File,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Lgmm,
    Rgmm,
    Semm,
    Rad,
    All,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AnchorArg {
    Left,
    Right,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Method {
    Adjoint(Formulation),
    Rad,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Adjoint(f) => f.name(),
            Method::Rad => "rad",
        }
    }
}

/// Matrix, objective and triplet selection shared by `verify` and `grad`.
#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    #[arg(long, value_enum, default_value = "square")]
    case: CaseName,
    #[arg(long, value_enum, default_value = "all")]
    method: MethodArg,
    /// Complex matrix JSON (`{"m","n","re","im"}`), required with `--case file`.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Objective JSON (`{"type":"sigma"}` or `{"type":"linear",...}`); defaults to σ for files.
    #[arg(long)]
    objective: Option<PathBuf>,
    /// 1-based singular triplet index.
    #[arg(long, default_value_t = 1)]
    index: usize,
    /// Phase anchor for `--case file`.
    #[arg(long, value_enum, default_value = "left")]
    anchor: AnchorArg,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GradArgs {
    #[command(flatten)]
    problem: ProblemArgs,
}

pub struct Problem {
    pub name: String,
    pub a: SplitMatrix<f64>,
    pub objective: ObjectiveSpec<f64>,
    pub is_sigma: bool,
    pub spec: TripletSpec,
    pub methods: Vec<Method>,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_objective(path: &Path) -> Result<ObjectiveDescriptor> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

impl ProblemArgs {
    pub fn load(&self) -> Result<Problem> {
        let explicit = self.objective.as_deref().map(read_objective).transpose()?;
        let (name, a, descriptor, mut spec) = match self.case {
            CaseName::Square | CaseName::Rect => {
                let case = if self.case == CaseName::Square {
                    cases::square()
                } else {
                    cases::rect()
                };
                let descriptor = match explicit {
                    Some(d) => d,
                    None if self.method == MethodArg::Rad => ObjectiveDescriptor::Sigma,
                    None => ObjectiveDescriptor::Linear(case.params.clone()),
                };
                (case.name.to_string(), case.a, descriptor, case.spec)
            }
            CaseName::File => {
                let path = self
                    .matrix
                    .as_deref()
                    .ok_or_else(|| Error::Config("--case file needs --matrix".into()))?;
                let a = dsvd::linalg::MatrixJson::parse(&read_text(path)?)?;
                let convention = match self.anchor {
                    AnchorArg::Left => PhaseConvention::left_argmax(),
                    AnchorArg::Right => PhaseConvention::right_argmax(),
                };
                let descriptor = explicit.unwrap_or(ObjectiveDescriptor::Sigma);
                (
                    path.display().to_string(),
                    a,
                    descriptor,
                    TripletSpec::with_convention(convention),
                )
            }
        };
        spec.index = self.index;
        let (m, n) = a.shape();
        let objective = descriptor.build(m, n)?;
        let is_sigma = descriptor.is_sigma();
        let methods = match self.method {
            MethodArg::Lgmm => vec![Method::Adjoint(Formulation::Lgmm)],
            MethodArg::Rgmm => vec![Method::Adjoint(Formulation::Rgmm)],
            MethodArg::Semm => vec![Method::Adjoint(Formulation::Semm)],
            MethodArg::Rad if is_sigma => vec![Method::Rad],
            MethodArg::Rad => {
                return Err(Error::Config(
                    "--method rad requires the objective f = sigma".into(),
                ));
            }
            MethodArg::All => {
                let mut v: Vec<Method> = Formulation::ALL
                    .iter()
                    .map(|&f| Method::Adjoint(f))
                    .collect();
                if is_sigma {
                    v.push(Method::Rad);
                }
                v
            }
        };
        Ok(Problem {
            name,
            a,
            objective,
            is_sigma,
            spec,
            methods,
        })
    }
}

pub fn emit(value: &serde_json::Value, json_out: Option<&Path>) -> Result<()> {
    let text = dsvd::report::to_json_string(value, true)?;
    if let Some(path) = json_out {
        std::fs::write(path, format!("{text}\n")).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    }
    println!("{text}");
    Ok(())
}

/// Outcome of a subcommand that ran to completion.
pub enum Status {
    Pass,
    BelowThreshold,
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Verify(args) => verify::run(&args),
        Command::Grad(args) => verify::run_grad(&args.problem),
        Command::PodSens(args) => pod_sens::run(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::BelowThreshold) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_degeneracy() { 2 } else { 3 })
        }
    }
}
