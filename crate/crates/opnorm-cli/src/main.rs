//! `opnorm`: q↦p operator norms from the command line.
//!
//! Exit codes: 0 success/converged, 1 verification mismatch, 2 invalid
//! input, 3 iteration budget exhausted before convergence.

mod bench;
mod gen;
mod report;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use opnorm_core::io::read_matrix_path;
use opnorm_core::{
    brute_norm, interpolation_estimate, longest_vector, parse_exponent, DenseMatrix, Error,
    NormParams,
};
use report::{BoundsField, ExponentField, ParamsEcho, RunReport};

const DEFAULT_MAX_DIM: usize = 4096;

/// All invalid-input failures funnel into exit code 2 through this type.
#[derive(Debug)]
pub struct CliError(String);

impl CliError {
    fn invalid(msg: impl Into<String>) -> Self {
        CliError(msg.into())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "opnorm",
    version,
    about = "q->p matrix operator norms: certified iteration, oracles, and instance generators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified norm of a nonnegative matrix (fixed-point iteration, 1 < p <= q)
    Compute {
        /// Matrix file (Matrix Market or TSV)
        input: PathBuf,
        /// Output-side exponent
        #[arg(long)]
        p: String,
        /// Input-side exponent
        #[arg(long)]
        q: String,
        /// Stop when the potential ratio is within 1 + tol
        #[arg(long, default_value_t = opnorm_core::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = opnorm_core::DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// Positivity-shift budget
        #[arg(long, default_value_t = opnorm_core::DEFAULT_SHIFT_DELTA)]
        delta: f64,
        /// Include the maximizer in the report
        #[arg(long)]
        emit_vector: bool,
    },
    /// Search, enumeration, and baseline estimates (any sign pattern)
    Oracle {
        input: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: Option<String>,
        /// Exact infinity->p norm by sign enumeration over the columns
        #[arg(long)]
        inf_to_p: bool,
        /// Interpolation bounds for the p->p norm
        #[arg(long)]
        baseline: bool,
        #[arg(long, default_value_t = opnorm_core::DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        emit_vector: bool,
    },
    /// Generate reduction instances with known witnesses
    Gen {
        #[command(subcommand)]
        kind: gen::GenCommand,
    },
    /// Re-check a generated instance against its manifest
    Verify { manifest: PathBuf },
    /// Time the iteration on seeded random instances
    Bench {
        /// Comma-separated dimensions
        #[arg(long, default_value = "8,16,32")]
        sizes: String,
        #[arg(long, default_value_t = 2.5)]
        p: f64,
        #[arg(long, default_value_t = 3.0)]
        q: f64,
        #[arg(long, default_value_t = opnorm_core::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn max_dim() -> usize {
    std::env::var("OPNORM_MAX_DIM")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

fn load_matrix(path: &Path) -> Result<DenseMatrix, CliError> {
    let m = read_matrix_path(path)?;
    let cap = max_dim();
    if m.rows() > cap || m.cols() > cap {
        return Err(CliError::invalid(format!(
            "matrix is {}x{}, exceeding the dimension cap {cap} (set OPNORM_MAX_DIM to raise it)",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("opnorm: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: &Command) -> Result<i32, CliError> {
    match command {
        Command::Compute {
            input,
            p,
            q,
            tol,
            max_iter,
            delta,
            emit_vector,
        } => cmd_compute(input, p, q, *tol, *max_iter, *delta, *emit_vector),
        Command::Oracle {
            input,
            p,
            q,
            inf_to_p,
            baseline,
            restarts,
            seed,
            emit_vector,
        } => cmd_oracle(
            input,
            p,
            q.as_deref(),
            *inf_to_p,
            *baseline,
            *restarts,
            *seed,
            *emit_vector,
        ),
        Command::Gen { kind } => {
            gen::run(kind, max_dim())?;
            Ok(0)
        }
        Command::Verify { manifest } => verify::run(manifest),
        Command::Bench {
            sizes,
            p,
            q,
            tol,
            seed,
        } => bench::run(sizes, *p, *q, *tol, *seed),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_compute(
    input: &Path,
    p: &str,
    q: &str,
    tol: f64,
    max_iter: usize,
    delta: f64,
    emit_vector: bool,
) -> Result<i32, CliError> {
    let p = parse_exponent(p)?;
    let q = parse_exponent(q)?;
    if !p.is_finite() || !q.is_finite() {
        return Err(CliError::invalid(
            "`compute` requires finite exponents; `oracle --inf-to-p` handles q = inf",
        ));
    }
    let params = NormParams::new(p, q).map_err(|e| {
        CliError::invalid(format!(
            "{e}; the iteration only covers 1 < p <= q, try `opnorm oracle` for this range"
        ))
    })?;
    let a = load_matrix(input)?;

    let start = Instant::now();
    let rep = opnorm_core::compute_norm_with(
        &a,
        &params,
        &opnorm_core::IterationOptions {
            tol,
            max_iter,
            shift_delta: delta,
            ..Default::default()
        },
    )?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    RunReport {
        command: "compute".into(),
        input: input.display().to_string(),
        params: ParamsEcho {
            p: ExponentField(p),
            q: Some(ExponentField(q)),
            tol: Some(tol),
            max_iter: Some(max_iter),
            restarts: None,
            seed: 0,
        },
        bounds: BoundsField {
            lower: rep.bounds.lower,
            upper: Some(rep.bounds.upper),
            method: "sandwich".into(),
        },
        estimate: rep.estimate,
        iterations: Some(rep.iterations),
        converged: Some(rep.converged),
        exhaustive: None,
        wall_time_ms,
        maximizer: emit_vector.then(|| rep.maximizer.coords().to_vec()),
        manifest: None,
    }
    .print();

    if rep.converged {
        Ok(0)
    } else {
        eprintln!(
            "opnorm: iteration budget of {max_iter} exhausted at potential ratio {}",
            rep.potential_ratio
        );
        Ok(3)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    input: &Path,
    p: &str,
    q: Option<&str>,
    inf_to_p: bool,
    baseline: bool,
    restarts: usize,
    seed: u64,
    emit_vector: bool,
) -> Result<i32, CliError> {
    let p = parse_exponent(p)?;
    let q_parsed = q.map(parse_exponent).transpose()?;
    let a = load_matrix(input)?;
    let start = Instant::now();

    let (bounds, estimate, exhaustive, witness, q_echo) = if inf_to_p {
        if baseline {
            return Err(CliError::invalid("--inf-to-p and --baseline are exclusive"));
        }
        if let Some(qv) = q_parsed {
            if qv.is_finite() {
                return Err(CliError::invalid("--inf-to-p fixes q = inf"));
            }
        }
        let r = longest_vector(&a.columns(), p)?;
        (
            BoundsField {
                lower: r.value,
                upper: Some(r.value),
                method: "oracle".into(),
            },
            r.value,
            Some(true),
            Some(r.witness),
            Some(f64::INFINITY),
        )
    } else if baseline {
        if let Some(qv) = q_parsed {
            if qv != p {
                return Err(CliError::invalid("--baseline bounds the p->p norm; omit q"));
            }
        }
        let b = interpolation_estimate(&a, p)?;
        (
            BoundsField {
                lower: b.lower,
                upper: Some(b.upper),
                method: "interpolation".into(),
            },
            b.lower,
            Some(false),
            None,
            Some(p),
        )
    } else {
        let qv = q_parsed.ok_or_else(|| {
            CliError::invalid("the search oracle needs --q (or use --inf-to-p / --baseline)")
        })?;
        if qv.is_infinite() || p.is_infinite() {
            return Err(CliError::invalid(
                "the search oracle needs finite exponents; use --inf-to-p for q = inf",
            ));
        }
        let params = NormParams::general(p, qv)?;
        let r = brute_norm(&a, &params, restarts, seed)?;
        (
            BoundsField {
                lower: r.value,
                upper: None,
                method: "oracle".into(),
            },
            r.value,
            Some(false),
            Some(r.witness),
            Some(qv),
        )
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    RunReport {
        command: "oracle".into(),
        input: input.display().to_string(),
        params: ParamsEcho {
            p: ExponentField(p),
            q: q_echo.map(ExponentField),
            tol: None,
            max_iter: None,
            restarts: Some(restarts),
            seed,
        },
        bounds,
        estimate,
        iterations: None,
        converged: None,
        exhaustive,
        wall_time_ms,
        maximizer: if emit_vector { witness } else { None },
        manifest: None,
    }
    .print();
    Ok(0)
}
