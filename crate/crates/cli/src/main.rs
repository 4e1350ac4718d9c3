use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use theta_core::grobner::{buchberger_check, is_reduced, to_text};
use theta_core::ideal::{certified_basis, decompose_minor, generators, standard_monomials, Format, IdealSpec};
use theta_core::linalg::{nuclear_norm, Matrix};
use theta_core::norms::{nuclear_norm_sdp_with, theta_norm_with, DEFAULT_EPS};
use theta_core::recovery::{parse_m_values, phase_table, ExperimentConfig};
use theta_core::sdp::SolverSettings;
use theta_core::tensor::Dims;
use theta_core::{Poly, Rational, Tensor};

/// Theta-body norms of tensors.
#[derive(Parser)]
#[command(name = "theta", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Generators,
    Basis,
    Certify,
}

#[derive(Subcommand)]
enum Command {
    /// Print generators, the theta basis or a certification report.
    Ideal {
        #[arg(long)]
        dims: Dims,
        #[arg(long, default_value = "full")]
        format: Format,
        #[arg(long, value_enum, default_value = "generators")]
        emit: Emit,
        /// Theta level for `--emit basis`.
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Certify the Groebner basis at a shape and check TT/HOSVD equality.
    Certify {
        #[arg(long)]
        dims: Dims,
    },
    /// Theta norm of a tensor stored as `{"dims": [..], "values": [..]}`.
    Norm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "full")]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Levels above 2 grow quickly; pass this to allow them.
        #[arg(long)]
        allow_large_k: bool,
    },
    /// Nuclear norm of a matrix stored as a JSON array of rows, by SDP and SVD.
    Nuclear {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// Gaussian-measurement recovery sweep; writes phase.csv and summary.json.
    Recover {
        #[arg(long)]
        dims: Dims,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        /// `11..30`, `4,12` or a single count.
        #[arg(long)]
        m: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "full")]
        format: Format,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        /// Worker threads; defaults to THETA_THREADS, then all cores.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

fn print(v: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

/// Full-basis certification; for TT and HOSVD also the two containments.
fn certify_report(spec: &IdealSpec) -> Result<(bool, serde_json::Value)> {
    let start = Instant::now();
    let full = generators::<Rational>(&IdealSpec::full(spec.dims.clone()))?.all();
    let report = buchberger_check(&full)?;
    let reduced = is_reduced(&full);
    let mut ok = report.passes && reduced;
    let mut doc = json!({
        "dims": spec.dims.to_string(),
        "format": spec.format.to_string(),
        "full_generators": full.len(),
        "buchberger": report,
        "reduced": reduced,
    });
    if spec.format != Format::Full && report.passes {
        let gb = certified_basis(&spec.dims)?;
        let gens = generators::<Rational>(spec)?;
        let in_full = gens.minors.iter().all(|f| gb.contains(f));
        let mut ideal_equal = in_full;
        if matches!(spec.format, Format::Tt | Format::Hosvd) {
            for f in full.iter().take(full.len() - 1) {
                let parts = decompose_minor(f, &spec.dims, &spec.format)?;
                let sum = parts.iter().fold(Poly::zero(), |acc, p| &acc + p);
                ideal_equal &= &sum == f;
            }
        }
        ok &= ideal_equal;
        doc["format_generators"] = json!(gens.minors.len());
        doc["format_in_full"] = json!(in_full);
        doc["ideals_equal"] = json!(ideal_equal);
    }
    doc["passes"] = json!(ok);
    doc["seconds"] = json!(start.elapsed().as_secs_f64());
    Ok((ok, doc))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Ideal { dims, format, emit, k } => {
            let spec = IdealSpec::new(dims.clone(), format)?;
            match emit {
                Emit::Generators => {
                    let mut out = std::io::stdout().lock();
                    for g in generators::<Rational>(&spec)?.all() {
                        writeln!(out, "{}", to_text(&g, &dims))?;
                    }
                }
                Emit::Basis => {
                    let basis = standard_monomials(&spec, k)?;
                    let mut out = std::io::stdout().lock();
                    for m in basis.monomials() {
                        writeln!(out, "{}", to_text(&Poly::term(m.clone(), Rational::from_integer(1.into())), &dims))?;
                    }
                }
                Emit::Certify => {
                    let (ok, doc) = certify_report(&spec)?;
                    print(&doc)?;
                    return Ok(ok);
                }
            }
            Ok(true)
        }
        Command::Certify { dims } => {
            let mut all_ok = true;
            let mut docs = Vec::new();
            for format in [Format::Full, Format::Tt, Format::Hosvd] {
                if dims.order() < 3 && format != Format::Full {
                    continue;
                }
                let (ok, doc) = certify_report(&IdealSpec::new(dims.clone(), format)?)?;
                all_ok &= ok;
                docs.push(doc);
            }
            print(&json!({ "passes": all_ok, "reports": docs }))?;
            Ok(all_ok)
        }
        Command::Norm { input, k, format, eps, allow_large_k } => {
            if k > 2 && !allow_large_k {
                bail!("k = {k} is above the default cap of 2; pass --allow-large-k to proceed");
            }
            let x = Tensor::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let spec = IdealSpec::new(x.dims().clone(), format)?;
            let report = theta_norm_with(&x, &spec, k, &SolverSettings::with_eps(eps))?;
            print(&json!({
                "norm": report.value,
                "k": k,
                "dims": spec.dims.to_string(),
                "status": report.solution.status,
                "iterations": report.solution.iterations,
                "seconds": report.solution.seconds,
                "residuals": report.solution.residuals,
            }))?;
            Ok(true)
        }
        Command::Nuclear { input, eps } => {
            let text = std::fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let rows: Vec<Vec<f64>> = serde_json::from_str(&text).context("expected a JSON array of rows")?;
            let x = Matrix::from_rows(&rows)?;
            let report = nuclear_norm_sdp_with(&x, &SolverSettings::with_eps(eps))?;
            let svd = nuclear_norm(&x)?;
            print(&json!({
                "sdp": report.value,
                "svd": svd,
                "difference": (report.value - svd).abs(),
                "status": report.solution.status,
                "iterations": report.solution.iterations,
            }))?;
            Ok(true)
        }
        Command::Recover { dims, rank, m, trials, seed, threshold, k, format, eps, threads, out } => {
            let mut cfg = ExperimentConfig::new(dims, rank, parse_m_values(&m)?);
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.threshold = threshold;
            cfg.k = k;
            cfg.format = format;
            cfg.solver.eps_abs = eps;
            cfg.solver.eps_rel = eps;
            cfg.threads = threads;
            let art = phase_table(&cfg, &out)?;
            eprintln!("wrote {} and {}", art.csv.display(), art.json.display());
            print(&json!({ "m0": art.stats.m0, "m1": art.stats.m1, "records": art.stats.records }))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
