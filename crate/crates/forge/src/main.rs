use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use povm_forge::document::{
    CertificateDocument, CountingDocument, FidelityDocument, PovmDocument, ScanDocument, SimulationDocument,
    SolveDocument, VerificationDocument,
};
use povm_forge::{exit, json, parallel, read_input, ForgeError};
use povm_forge_core::bounds;
use povm_forge_core::povm::catalog_get;
use povm_forge_core::simulate::SimulationConfig;
use povm_forge_core::solver::{SolverConfig, SolverStatus};
use povm_forge_core::verification::{
    mean_fidelity, optimal_fidelity, shannon_gain, FidelityMethod, DEFAULT_TOLERANCE,
};
use povm_forge_core::Povm;

/// Minimal optimal POVMs for N identical qubits.
#[derive(Debug, Parser)]
#[command(name = "povm-forge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the known minimal POVM for N copies (N = 2..7).
    Catalog {
        #[arg(long)]
        copies: usize,
    },
    /// Check every form of the optimality conditions.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Counting estimate of the minimal number of outcomes.
    Nmin {
        #[arg(long)]
        copies: usize,
    },
    /// Sum-of-squares lower-bound certificate.
    Certify {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = AnsatzArg::Auto)]
        ansatz: AnsatzArg,
        /// Polynomial degree for `--ansatz generic`.
        #[arg(long, default_value_t = 1)]
        degree: usize,
        /// Include the `(1 + t)` factor for `--ansatz generic`.
        #[arg(long)]
        linear_factor: bool,
    },
    /// Search for a POVM with a given number of outcomes.
    Solve {
        #[arg(long)]
        outcomes: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve for each outcome count in a range.
    Scan {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Mean fidelity of a POVM.
    Fidelity {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = MethodArg::Quadrature)]
        method: MethodArg,
    },
    /// Monte Carlo estimate of the mean fidelity.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct Input {
    /// POVM document; `-` reads standard input.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long)]
    copies: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Restrict to antipodal pairs of equal weight.
    #[arg(long)]
    antipodal: bool,
}

impl SolverArgs {
    fn config(&self, outcomes: usize) -> SolverConfig {
        SolverConfig {
            copies: self.copies,
            outcomes,
            seed: self.seed,
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            tolerance: self.tol,
            antipodal: self.antipodal,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AnsatzArg {
    Auto,
    Quadratic,
    QuadraticLinear,
    Quartic,
    QuarticLinear,
    Generic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Quadrature,
    Closed,
}

fn emit<T: Serialize>(doc: &T) -> Result<(), ForgeError> {
    let text = json::to_string(doc)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(ForgeError::Io {
            path: "<stdout>".into(),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn load(input: &Input) -> Result<Povm, ForgeError> {
    let doc: PovmDocument = serde_json::from_str(&read_input(&input.input)?)?;
    Ok(doc.to_povm())
}

fn solver_exit(status: SolverStatus) -> i32 {
    match status {
        SolverStatus::Converged => exit::OK,
        SolverStatus::ResidualFloor => exit::RESIDUAL_FLOOR,
        SolverStatus::IterationLimit => exit::ITERATION_LIMIT,
    }
}

/// Runs a command; the error carries the exit code to use.
fn run(command: Command) -> Result<i32, (i32, ForgeError)> {
    let malformed = |e: ForgeError| (exit::MALFORMED_INPUT, e);
    let threads = parallel::thread_count();
    match command {
        Command::Catalog { copies } => {
            let entry = catalog_get(copies).map_err(|e| malformed(e.into()))?;
            emit(&PovmDocument::from_catalog(&entry)).map_err(malformed)?;
            Ok(exit::OK)
        }
        Command::Verify { input, tol } => {
            let povm = load(&input).map_err(malformed)?;
            let report = parallel::verify(&povm, tol, threads);
            emit(&VerificationDocument::new(&report, &povm)).map_err(malformed)?;
            Ok(if report.pass { exit::OK } else { exit::VERIFY_FAILED })
        }
        Command::Nmin { copies } => {
            emit(&CountingDocument::new(&bounds::n_min(copies))).map_err(malformed)?;
            Ok(exit::OK)
        }
        Command::Certify {
            input,
            ansatz,
            degree,
            linear_factor,
        } => {
            let povm = load(&input).map_err(malformed)?;
            let cert = match ansatz {
                AnsatzArg::Auto => bounds::certificate_auto(&povm),
                AnsatzArg::Quadratic => bounds::certificate_quadratic(&povm),
                AnsatzArg::QuadraticLinear => bounds::certificate_quadratic_linear(&povm),
                AnsatzArg::Quartic => bounds::certificate_quartic(&povm),
                AnsatzArg::QuarticLinear => bounds::certificate_quartic_linear(&povm),
                AnsatzArg::Generic => bounds::certificate_generic(&povm, degree, linear_factor),
            }
            .map_err(|e| (exit::CERTIFY_PRECONDITION, e.into()))?;
            emit(&CertificateDocument::new(&cert)).map_err(malformed)?;
            Ok(exit::OK)
        }
        Command::Solve { outcomes, solver } => {
            let config = solver.config(outcomes);
            let result = parallel::solve(&config, threads).map_err(|e| malformed(e.into()))?;
            emit(&SolveDocument::new(&config, &result)).map_err(malformed)?;
            Ok(solver_exit(result.status))
        }
        Command::Scan { from, to, solver } => {
            let template = solver.config(0);
            let rows = parallel::feasibility_scan(solver.copies, from, to, &template, threads)
                .map_err(|e| malformed(e.into()))?;
            emit(&ScanDocument::new(from, to, &template, &rows)).map_err(malformed)?;
            Ok(exit::OK)
        }
        Command::Fidelity { input, method } => {
            let povm = load(&input).map_err(malformed)?;
            let (name, m) = match method {
                MethodArg::Quadrature => ("quadrature", FidelityMethod::Quadrature),
                MethodArg::Closed => ("closed", FidelityMethod::ClosedForm),
            };
            let mean = mean_fidelity(&povm, m).map_err(|e| malformed(e.into()))?;
            let optimal = optimal_fidelity(povm.copies);
            emit(&FidelityDocument {
                copies: povm.copies,
                outcomes: povm.len(),
                method: name,
                mean_fidelity: mean,
                optimal_fidelity: optimal,
                deviation: mean - optimal,
                shannon_gain_bits: shannon_gain(povm.copies),
            })
            .map_err(malformed)?;
            Ok(exit::OK)
        }
        Command::Simulate { input, trials, seed } => {
            let povm = load(&input).map_err(malformed)?;
            let config = SimulationConfig { povm, trials, seed };
            let result = parallel::simulate(&config, threads).map_err(|e| match e {
                povm_forge_core::Error::NotNormalized { .. } => (exit::VERIFY_FAILED, e.into()),
                _ => malformed(e.into()),
            })?;
            emit(&SimulationDocument::new(&config.povm, &result)).map_err(malformed)?;
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::MALFORMED_INPUT } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err((code, err)) => {
            eprintln!("povm-forge: {}", err.to_string().replace('\n', " "));
            ExitCode::from(code as u8)
        }
    }
}
