//! Seeded low-rank recovery experiments with Gaussian measurement maps.
//!
//! Each `(m, trial)` pair draws its own ground truth and measurement map
//! from a ChaCha stream derived from `(seed, m, trial)`, so results do not
//! depend on scheduling or thread count.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::ideal::{solver_structure, Format, IdealSpec};
use crate::linalg::{singular_values, Matrix};
use crate::norms::theta_minimize_with;
use crate::sdp::SolverSettings;
use crate::tensor::{random_low_rank_with, seeded_rng, Dims};
use crate::Tensor;

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "THETA_THREADS";

const RESAMPLE_LIMIT: usize = 16;

/// `Phi(X)_k = <X, Phi_k>`; row `k` of `rows` is `vec(Phi_k)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementMap {
    pub m: usize,
    pub dims: Dims,
    pub rows: Matrix<f64>,
}

impl MeasurementMap {
    pub fn apply(&self, x: &Tensor) -> Result<Vec<f64>> {
        if x.dims() != &self.dims {
            return input(format!("tensor shape {} does not match map shape {}", x.dims(), self.dims));
        }
        self.rows.mul_vec(x.values())
    }
}

/// Gaussian map with i.i.d. `N(0, 1/m)` entries drawn from `rng`. A square
/// or tall map that comes out numerically singular is redrawn.
pub fn gaussian_map_with<R: Rng + ?Sized>(rng: &mut R, dims: &Dims, m: usize) -> Result<MeasurementMap> {
    if m == 0 {
        return input("number of measurements must be at least 1");
    }
    let n = dims.num_entries();
    let sd = (1.0 / m as f64).sqrt();
    for _ in 0..RESAMPLE_LIMIT {
        let rows = Matrix::from_fn(m, n, |_, _| sd * rng.sample::<f64, _>(StandardNormal));
        if m < n {
            return Ok(MeasurementMap { m, dims: dims.clone(), rows });
        }
        let sv = singular_values(&rows)?;
        let (hi, lo) = (sv.iter().cloned().fold(0.0, f64::max), sv.iter().cloned().fold(f64::INFINITY, f64::min));
        if lo > 1e-10 * hi {
            return Ok(MeasurementMap { m, dims: dims.clone(), rows });
        }
    }
    Err(Error::Numerical { what: "drawing a nonsingular Gaussian map".into(), iterations: RESAMPLE_LIMIT })
}

/// Deterministic Gaussian map for `seed`.
pub fn gaussian_map(dims: &Dims, m: usize, seed: u64) -> Result<MeasurementMap> {
    gaussian_map_with(&mut seeded_rng(seed), dims, m)
}

/// The random stream of one trial.
pub fn trial_rng(seed: u64, m: usize, trial: usize) -> ChaCha20Rng {
    let mut rng = seeded_rng(seed);
    rng.set_stream(((m as u64) << 32) | trial as u64);
    rng
}

/// Parses `11..30` (inclusive), `4,12,20` or a single count.
pub fn parse_m_values(text: &str) -> Result<Vec<usize>> {
    let bad = |e: std::num::ParseIntError| Error::Parse(format!("measurement list `{text}`: {e}"));
    let out: Vec<usize> = if let Some((a, b)) = text.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
        (a..=b).collect()
    } else {
        text.split(',').map(|s| s.trim().parse().map_err(bad)).collect::<Result<_>>()?
    };
    if out.is_empty() || out.contains(&0) {
        return Err(Error::Parse(format!("measurement list `{text}` must name positive counts")));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dims: Dims,
    pub rank: usize,
    pub m_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Largest elementwise error counted as recovery.
    pub threshold: f64,
    pub k: usize,
    pub format: Format,
    pub solver: SolverSettings,
    /// Worker count; `None` reads `THETA_THREADS`, then uses all cores.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(dims: Dims, rank: usize, m_values: Vec<usize>) -> Self {
        ExperimentConfig {
            dims,
            rank,
            m_values,
            trials: 200,
            seed: 0,
            threshold: 1e-6,
            k: 1,
            format: Format::Full,
            solver: SolverSettings { max_iter: 50_000, ..SolverSettings::with_eps(1e-9) },
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return input("trials must be at least 1");
        }
        if !(self.threshold > 0.0) {
            return input("success threshold must be positive");
        }
        if self.rank == 0 {
            return input("rank must be at least 1");
        }
        if self.m_values.is_empty() || self.m_values.contains(&0) {
            return input("measurement counts must be positive");
        }
        IdealSpec::new(self.dims.clone(), self.format.clone())?;
        self.solver.validate()
    }
}

/// One solve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub m: usize,
    pub trial: usize,
    /// Largest elementwise error; `None` when the solve failed.
    pub error: Option<f64>,
    pub success: bool,
    pub seconds: f64,
    /// Why the solve failed, if it did.
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MRecord {
    pub m: usize,
    pub successes: usize,
    pub trials: usize,
    pub success_rate: f64,
    /// Median error, failed solves counting as infinite; `None` if more than
    /// half failed.
    pub median_err: Option<f64>,
    pub mean_seconds: f64,
    pub solver_failures: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecoveryStats {
    pub dims: Dims,
    pub rank: usize,
    pub records: Vec<MRecord>,
    /// Largest `m` with no success.
    pub m0: Option<usize>,
    /// Smallest `m` where every trial succeeded.
    pub m1: Option<usize>,
}

impl RecoveryStats {
    pub fn record(&self, m: usize) -> Option<&MRecord> {
        self.records.iter().find(|r| r.m == m)
    }

    /// Consecutive pairs `(m_i, m_j)` where the success rate drops by more
    /// than two standard errors of the binomial estimates.
    pub fn monotonicity_violations(&self) -> Vec<(usize, usize)> {
        let mut recs: Vec<&MRecord> = self.records.iter().collect();
        recs.sort_by_key(|r| r.m);
        let se = |r: &MRecord| r.success_rate * (1.0 - r.success_rate) / r.trials as f64;
        recs.windows(2)
            .filter(|w| w[0].success_rate - w[1].success_rate > 2.0 * (se(w[0]) + se(w[1])).sqrt())
            .map(|w| (w[0].m, w[1].m))
            .collect()
    }
}

/// Worker count from the config, then `THETA_THREADS`, then rayon's default.
pub fn thread_count(requested: Option<usize>) -> usize {
    requested
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&t| t > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

fn run_trial(cfg: &ExperimentConfig, spec: &IdealSpec, m: usize, trial: usize) -> TrialOutcome {
    let start = Instant::now();
    let attempt = || -> Result<f64> {
        let mut rng = trial_rng(cfg.seed, m, trial);
        let truth: Tensor = random_low_rank_with(&mut rng, &cfg.dims, cfg.rank)?;
        let map = gaussian_map_with(&mut rng, &cfg.dims, m)?;
        let b = map.apply(&truth)?;
        let sol = theta_minimize_with(&map.rows, &b, spec, cfg.k, &cfg.solver)?;
        sol.tensor.max_abs_diff(&truth)
    };
    let result = attempt();
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(err) => TrialOutcome { m, trial, error: Some(err), success: err <= cfg.threshold, seconds, failure: None },
        Err(e) => TrialOutcome { m, trial, error: None, success: false, seconds, failure: Some(e.to_string()) },
    }
}

fn aggregate(m: usize, outcomes: &[TrialOutcome]) -> MRecord {
    let trials = outcomes.len();
    let successes = outcomes.iter().filter(|o| o.success).count();
    let mut errs: Vec<f64> = outcomes.iter().map(|o| o.error.unwrap_or(f64::INFINITY)).collect();
    errs.sort_by(f64::total_cmp);
    let median = if trials % 2 == 1 { errs[trials / 2] } else { 0.5 * (errs[trials / 2 - 1] + errs[trials / 2]) };
    MRecord {
        m,
        successes,
        trials,
        success_rate: successes as f64 / trials as f64,
        median_err: median.is_finite().then_some(median),
        mean_seconds: outcomes.iter().map(|o| o.seconds).sum::<f64>() / trials as f64,
        solver_failures: outcomes.iter().filter(|o| o.failure.is_some()).count(),
    }
}

/// Every trial outcome, in `(m, trial)` order.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    let spec = IdealSpec::new(cfg.dims.clone(), cfg.format.clone())?;
    // build the shared structure before fanning out
    solver_structure(&spec, cfg.k)?;
    let jobs: Vec<(usize, usize)> = cfg.m_values.iter().flat_map(|&m| (0..cfg.trials).map(move |t| (m, t))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(cfg.threads))
        .build()
        .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
    Ok(pool.install(|| jobs.par_iter().map(|&(m, t)| run_trial(cfg, &spec, m, t)).collect()))
}

/// Runs the sweep and aggregates per `m`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RecoveryStats> {
    let outcomes = run_trials(cfg)?;
    let records: Vec<MRecord> = outcomes.chunks(cfg.trials).map(|c| aggregate(c[0].m, c)).collect();
    let m0 = records.iter().filter(|r| r.successes == 0).map(|r| r.m).max();
    let m1 = records.iter().filter(|r| r.successes == r.trials).map(|r| r.m).min();
    Ok(RecoveryStats { dims: cfg.dims.clone(), rank: cfg.rank, records, m0, m1 })
}

/// One CSV row of a phase table.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PhaseRow {
    pub m: usize,
    pub m_rel: f64,
    pub m_over_3nr: f64,
    pub m_over_3nr_logn: f64,
    pub success_rate: f64,
    pub median_err: Option<f64>,
    pub mean_seconds: f64,
}

/// Rows with the normalised measurement axes; `n` is the mean mode size.
pub fn phase_rows(stats: &RecoveryStats) -> Vec<PhaseRow> {
    let sizes = stats.dims.sizes();
    let n = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
    let total = stats.dims.num_entries() as f64;
    let r = stats.rank as f64;
    stats
        .records
        .iter()
        .map(|rec| {
            let m = rec.m as f64;
            PhaseRow {
                m: rec.m,
                m_rel: 100.0 * m / total,
                m_over_3nr: m / (3.0 * n * r),
                m_over_3nr_logn: m / (3.0 * n * r * n.ln()),
                success_rate: rec.success_rate,
                median_err: rec.median_err,
                mean_seconds: rec.mean_seconds,
            }
        })
        .collect()
}

/// Files written by [`phase_table`].
#[derive(Clone, Debug)]
pub struct PhaseArtifacts {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub stats: RecoveryStats,
}

/// Runs the sweep and writes `phase.csv` and `summary.json` into `out_dir`.
pub fn phase_table(cfg: &ExperimentConfig, out_dir: impl AsRef<Path>) -> Result<PhaseArtifacts> {
    let stats = run_experiment(cfg)?;
    write_phase_table(cfg, &stats, out_dir.as_ref())
}

pub fn write_phase_table(cfg: &ExperimentConfig, stats: &RecoveryStats, out_dir: &Path) -> Result<PhaseArtifacts> {
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("phase.csv");
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| Error::Io(e.into()))?;
    for row in phase_rows(stats) {
        w.serialize(row).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    let json_path = out_dir.join("summary.json");
    let summary = serde_json::json!({ "config": cfg, "m0": stats.m0, "m1": stats.m1, "records": stats.records });
    std::fs::write(&json_path, serde_json::to_string_pretty(&summary)?)?;
    Ok(PhaseArtifacts { csv: csv_path, json: json_path, stats: stats.clone() })
}
