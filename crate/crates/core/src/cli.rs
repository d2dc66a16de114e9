//! Command line front end.
//!
//! `ncgb compute FILE` prints the basis one polynomial per line and exits
//! with 0 for a complete basis, 2 for a truncated one and 1 on error.
//! `ncgb verify FILE --basis B --certificates C` checks a certificate file.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arena::Arena;
use crate::error::{Error, Result};
use crate::f4::{compute_gb, GbConfig, Status};
use crate::field::{Field, PrimeField, Rationals};
use crate::io::{content_lines, format_certificate, format_polynomial, parse_basis, parse_certificate, parse_problem, ProblemFile};
use crate::proof::{verify, ProofMode};

pub const EXIT_COMPLETE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_TRUNCATED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ncgb", version, about = "Noncommutative Groebner bases via F4")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a (possibly truncated) Groebner basis.
    Compute(ComputeArgs),
    /// Check a certificate file against a problem and its basis.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProofArg {
    None,
    Incremental,
    Full,
}

#[derive(Debug, Args)]
struct ComputeArgs {
    file: PathBuf,
    /// Discard ambiguities of larger degree.
    #[arg(long, value_name = "N")]
    degbound: Option<usize>,
    /// Stop after N iterations.
    #[arg(long, value_name = "N")]
    maxiter: Option<usize>,
    #[arg(long, value_name = "T", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,
    #[arg(long, value_enum, default_value = "on")]
    tracer: Switch,
    #[arg(long, value_enum, default_value = "off")]
    gm: Switch,
    #[arg(long, value_enum, default_value = "none")]
    proof: ProofArg,
    /// Write the basis here instead of standard output.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    proof_output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    problem: PathBuf,
    #[arg(long, value_name = "FILE")]
    basis: PathBuf,
    #[arg(long, value_name = "FILE")]
    certificates: PathBuf,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_COMPLETE
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_ERROR
                }
            };
        }
    };
    let result = match cli.command {
        Command::Compute(args) => compute(&args, stdout, stderr),
        Command::Verify(args) => verify_files(&args, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<ProblemFile> {
    parse_problem(&read(path)?).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

fn compute(args: &ComputeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let proof = match args.proof {
        ProofArg::None => ProofMode::None,
        ProofArg::Incremental => ProofMode::Incremental,
        ProofArg::Full => ProofMode::Full,
    };
    if proof != ProofMode::None && args.proof_output.is_none() {
        return Err(Error::Config("--proof requires --proof-output".into()));
    }
    let config = GbConfig {
        degree_bound: args.degbound,
        max_iterations: args.maxiter,
        gm_filter: args.gm == Switch::On,
        proof,
        threads: args.threads as usize,
        tracer: args.tracer == Switch::On,
    };
    let problem = load(&args.file)?;
    let status = match problem.characteristic {
        0 => compute_with(&Rationals, &problem, &config, args, stdout, stderr)?,
        p => compute_with(&PrimeField::new(p as u64)?, &problem, &config, args, stdout, stderr)?,
    };
    Ok(match status {
        Status::Complete => EXIT_COMPLETE,
        Status::Truncated => EXIT_TRUNCATED,
    })
}

fn compute_with<F: Field>(
    field: &F,
    problem: &ProblemFile,
    config: &GbConfig,
    args: &ComputeArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<Status> {
    let mut arena = Arena::new(problem.order.clone());
    let inputs = problem.intern(field, &mut arena)?;
    let out = compute_gb(field, &mut arena, &inputs, config)?;
    let mut text = String::new();
    for &g in &out.basis {
        text.push_str(&format_polynomial(field, &arena, g, &problem.vars));
        text.push('\n');
    }
    match &args.output {
        Some(path) => write_file(path, &text)?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::Input(e.to_string()))?,
    }
    if let (Some(certs), Some(path)) = (&out.certificates, &args.proof_output) {
        let mut text = String::new();
        for cert in certs {
            text.push_str(&format_certificate(field, &arena, cert, &problem.vars));
            text.push('\n');
        }
        write_file(path, &text)?;
    }
    let _ = writeln!(
        stderr,
        "{} elements, {} iterations, {}",
        out.basis.len(),
        out.iterations.len(),
        match out.status {
            Status::Complete => "complete".to_string(),
            Status::Truncated if out.discarded_ambiguities > 0 => format!(
                "truncated ({} ambiguities above the degree bound)",
                out.discarded_ambiguities
            ),
            Status::Truncated => "truncated (iteration limit)".to_string(),
        }
    );
    Ok(out.status)
}

fn verify_files(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32> {
    let problem = load(&args.problem)?;
    let basis = read(&args.basis)?;
    let certs = read(&args.certificates)?;
    let all_ok = match problem.characteristic {
        0 => verify_with(&Rationals, &problem, &basis, &certs, stdout)?,
        p => verify_with(&PrimeField::new(p as u64)?, &problem, &basis, &certs, stdout)?,
    };
    Ok(if all_ok { EXIT_COMPLETE } else { EXIT_ERROR })
}

fn verify_with<F: Field>(
    field: &F,
    problem: &ProblemFile,
    basis_text: &str,
    cert_text: &str,
    stdout: &mut dyn Write,
) -> Result<bool> {
    let mut arena = Arena::new(problem.order.clone());
    let inputs = problem.intern(field, &mut arena)?;
    let basis = parse_basis(field, &mut arena, basis_text, &problem.vars)?;
    let mut all_ok = true;
    for (line, text) in content_lines(cert_text) {
        let cert = parse_certificate(field, &mut arena, text, &problem.vars, line)?;
        let ok = verify(field, &mut arena, &cert, &inputs, &basis)?;
        all_ok &= ok;
        writeln!(stdout, "g{} {}", cert.target + 1, if ok { "OK" } else { "FAIL" })
            .map_err(|e| Error::Input(e.to_string()))?;
    }
    Ok(all_ok)
}
