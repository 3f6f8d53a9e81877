//! Experiment harness: run both solvers over scenario ensembles, sweep the
//! per-drone user cap and the reliability threshold, verify every feasible
//! result by constraint replay, and emit CSV/JSON outputs shaped for the
//! standard EE-vs-U_max and reliability-vs-threshold plots.

use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelParams, UserField};
use crate::ducem::{self, DucemConfig, DucemError, SolutionRecord};
use crate::geo::Rect;
use crate::kmeans::{self, KmeansConfig, KmeansError};
use crate::metrics::{self, ConstraintReport};
use crate::mobility::{generate_trace, MobilityConfig, MobilityError};
use crate::scenario::{db_to_linear, Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error on {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("malformed rows file {path}: {reason}")]
    MalformedRows { path: String, reason: String },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Mobility(#[from] MobilityError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ducem,
    Kmeans,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ducem => "ducem",
            Algorithm::Kmeans => "kmeans",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ducem" => Ok(Algorithm::Ducem),
            "kmeans" | "k-means" => Ok(Algorithm::Kmeans),
            other => Err(format!("unknown algorithm '{other}'")),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the ensemble's user snapshots come from. Each ensemble member i is
/// generated with seed base_seed + i, so paired algorithms always see the
/// same users.
#[derive(Debug, Clone)]
pub enum ScenarioSource {
    /// i.i.d. uniform users over an area.
    Uniform { n_users: usize, area: Rect },
    /// One snapshot of a freshly generated group-mobility trace.
    Rpgm {
        mobility: MobilityConfig,
        snapshot_index: usize,
    },
    /// A stored scenario file; every ensemble member reuses its users.
    File(PathBuf),
}

impl ScenarioSource {
    /// Materialize the user snapshot for one ensemble member.
    pub fn generate(&self, seed: u64) -> Result<UserField, HarnessError> {
        match self {
            ScenarioSource::Uniform { n_users, area } => {
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let positions = (0..*n_users).map(|_| area.sample(&mut rng)).collect();
                Ok(UserField::new(positions)
                    .map_err(|e| HarnessError::InvalidSpec(e.to_string()))?)
            }
            ScenarioSource::Rpgm {
                mobility,
                snapshot_index,
            } => {
                let cfg = MobilityConfig {
                    rng_seed: seed,
                    ..*mobility
                };
                let trace = generate_trace(&cfg)?;
                let snapshot = trace.get(*snapshot_index).ok_or_else(|| {
                    HarnessError::InvalidSpec(format!(
                        "snapshot index {snapshot_index} out of range ({} snapshots)",
                        trace.len()
                    ))
                })?;
                Ok(snapshot
                    .to_user_field()
                    .map_err(|e| HarnessError::InvalidSpec(e.to_string()))?)
            }
            ScenarioSource::File(path) => {
                let scenario = Scenario::load(path)?;
                Ok(scenario.users)
            }
        }
    }
}

/// Everything one experiment needs: scenario generation, the algorithms to
/// compare, both sweeps, solver templates, and the per-run time budget.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub name: String,
    pub source: ScenarioSource,
    pub ensemble: usize,
    pub base_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub u_max_sweep: Vec<usize>,
    pub gamma_th_sweep_db: Vec<f64>,
    pub channel: ChannelParams,
    /// Template; u_max and rng_seed are overridden per cell.
    pub ducem: DucemConfig,
    /// Template; u_max and rng_seed are overridden per cell.
    pub kmeans: KmeansConfig,
    /// Runs exceeding this budget are recorded as infeasible rows.
    pub time_limit: Duration,
    /// Keep full solution records for replay/persistence.
    pub capture_solutions: bool,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.ensemble < 1 {
            return Err(HarnessError::InvalidSpec("ensemble must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::InvalidSpec("no algorithms selected".into()));
        }
        if self.u_max_sweep.is_empty() {
            return Err(HarnessError::InvalidSpec("u_max sweep is empty".into()));
        }
        if self.gamma_th_sweep_db.is_empty() {
            return Err(HarnessError::InvalidSpec("gamma_th sweep is empty".into()));
        }
        self.channel
            .validate()
            .map_err(|e| HarnessError::InvalidSpec(e.to_string()))?;
        Ok(())
    }
}

/// Link reliability at one threshold, keyed by the configured dB value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrelEntry {
    pub gamma_th_db: f64,
    pub value: f64,
}

/// One experiment cell result. `runtime_s` is wall-clock and therefore lives
/// outside the deterministic CSV outputs; see [`emit_outputs`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub u_max: usize,
    pub m_final: usize,
    pub ee: f64,
    pub l_rel: Vec<LrelEntry>,
    pub runtime_s: f64,
    pub feasible: bool,
}

/// A feasible solution captured for persistence and replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionEnvelope {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub u_max: usize,
    pub p_max: f64,
    pub record: SolutionRecord,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub solutions: Vec<SolutionEnvelope>,
}

enum CellOutcome {
    Solved(SolutionRecord),
    Infeasible { m_final: usize },
    Error(String),
}

fn run_algorithm(
    algorithm: Algorithm,
    users: &UserField,
    seed: u64,
    u_max: usize,
    spec: &ExperimentSpec,
) -> CellOutcome {
    match algorithm {
        Algorithm::Ducem => {
            let config = DucemConfig {
                u_max,
                rng_seed: seed,
                ..spec.ducem
            };
            match ducem::run_ducem(users, &config, &spec.channel) {
                Ok(record) => CellOutcome::Solved(record),
                Err(DucemError::NoFeasibleSolution { drones, .. }) => {
                    CellOutcome::Infeasible { m_final: drones }
                }
                Err(e) => CellOutcome::Error(e.to_string()),
            }
        }
        Algorithm::Kmeans => {
            let config = KmeansConfig {
                u_max,
                rng_seed: seed,
                ..spec.kmeans
            };
            match kmeans::run_kmeans_baseline(users, &config, &spec.channel) {
                Ok(record) => CellOutcome::Solved(record),
                Err(KmeansError::NoFeasibleSolution { .. }) => {
                    CellOutcome::Infeasible { m_final: 0 }
                }
                Err(e) => CellOutcome::Error(e.to_string()),
            }
        }
    }
}

/// Run one cell under the time budget. The worker thread is detached on
/// timeout; the solver's own iteration bounds keep it finite.
fn run_cell_with_timeout(
    algorithm: Algorithm,
    users: &UserField,
    seed: u64,
    u_max: usize,
    spec: &ExperimentSpec,
) -> (CellOutcome, f64) {
    let started = Instant::now();
    let (tx, rx) = mpsc::channel();
    let users = users.clone();
    let spec_clone = spec.clone();
    std::thread::spawn(move || {
        let outcome = run_algorithm(algorithm, &users, seed, u_max, &spec_clone);
        let _ = tx.send(outcome);
    });
    match rx.recv_timeout(spec.time_limit) {
        Ok(outcome) => (outcome, started.elapsed().as_secs_f64()),
        Err(_) => (
            CellOutcome::Error(format!(
                "time limit of {:.0} s exceeded",
                spec.time_limit.as_secs_f64()
            )),
            spec.time_limit.as_secs_f64(),
        ),
    }
}

/// Execute the full (scenario × u_max × algorithm) grid.
///
/// Cells run in parallel but results are merged in deterministic
/// (seed, u_max, algorithm) order; per-cell failures become infeasible rows.
pub fn run_experiment_detailed(spec: &ExperimentSpec) -> Result<ExperimentResult, HarnessError> {
    spec.validate()?;
    let mut scenarios = Vec::with_capacity(spec.ensemble);
    for i in 0..spec.ensemble {
        let seed = spec.base_seed.wrapping_add(i as u64);
        scenarios.push((seed, spec.source.generate(seed)?));
    }

    let mut cells = Vec::new();
    for (seed, users) in &scenarios {
        for &u_max in &spec.u_max_sweep {
            for &algorithm in &spec.algorithms {
                cells.push((*seed, users, u_max, algorithm));
            }
        }
    }

    let thresholds: Vec<f64> = spec
        .gamma_th_sweep_db
        .iter()
        .map(|&db| db_to_linear(db))
        .collect();

    let outcomes: Vec<(ResultRow, Option<SolutionEnvelope>)> = cells
        .par_iter()
        .map(|&(seed, users, u_max, algorithm)| {
            let (outcome, runtime_s) = run_cell_with_timeout(algorithm, users, seed, u_max, spec);
            let zero_lrel = || {
                spec.gamma_th_sweep_db
                    .iter()
                    .map(|&gamma_th_db| LrelEntry {
                        gamma_th_db,
                        value: 0.0,
                    })
                    .collect::<Vec<_>>()
            };
            match outcome {
                CellOutcome::Solved(record) => {
                    // Re-verify the claimed solution before emitting it.
                    let replay = metrics::check_constraints(
                        &record.fleet,
                        &record.assignment,
                        users,
                        &spec.channel,
                        u_max,
                        p_max_of(spec, algorithm),
                    );
                    if !replay.all_ok() {
                        debug_assert!(false, "solver returned a non-compliant solution: {replay:?}");
                        let row = ResultRow {
                            algorithm,
                            seed,
                            u_max,
                            m_final: record.num_drones(),
                            ee: 0.0,
                            l_rel: zero_lrel(),
                            runtime_s,
                            feasible: false,
                        };
                        return (row, None);
                    }
                    let report = metrics::score(
                        &record.fleet,
                        &record.assignment,
                        users,
                        &spec.channel,
                        &thresholds,
                    )
                    .expect("verified solution must be scorable");
                    let l_rel = spec
                        .gamma_th_sweep_db
                        .iter()
                        .zip(&report.link_reliability)
                        .map(|(&gamma_th_db, tr)| LrelEntry {
                            gamma_th_db,
                            value: tr.l_rel,
                        })
                        .collect();
                    let row = ResultRow {
                        algorithm,
                        seed,
                        u_max,
                        m_final: record.num_drones(),
                        ee: record.ee_score,
                        l_rel,
                        runtime_s,
                        feasible: true,
                    };
                    let envelope = spec.capture_solutions.then(|| SolutionEnvelope {
                        algorithm,
                        seed,
                        u_max,
                        p_max: p_max_of(spec, algorithm),
                        record,
                    });
                    (row, envelope)
                }
                CellOutcome::Infeasible { m_final } => {
                    let row = ResultRow {
                        algorithm,
                        seed,
                        u_max,
                        m_final,
                        ee: 0.0,
                        l_rel: zero_lrel(),
                        runtime_s,
                        feasible: false,
                    };
                    (row, None)
                }
                CellOutcome::Error(reason) => {
                    eprintln!(
                        "warning: {algorithm} seed={seed} u_max={u_max} failed: {reason}"
                    );
                    let row = ResultRow {
                        algorithm,
                        seed,
                        u_max,
                        m_final: 0,
                        ee: 0.0,
                        l_rel: zero_lrel(),
                        runtime_s,
                        feasible: false,
                    };
                    (row, None)
                }
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(outcomes.len());
    let mut solutions = Vec::new();
    for (row, envelope) in outcomes {
        rows.push(row);
        if let Some(env) = envelope {
            solutions.push(env);
        }
    }
    Ok(ExperimentResult { rows, solutions })
}

fn p_max_of(spec: &ExperimentSpec, algorithm: Algorithm) -> f64 {
    match algorithm {
        Algorithm::Ducem => spec.ducem.p_max,
        Algorithm::Kmeans => spec.kmeans.p_max,
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>, HarnessError> {
    run_experiment_detailed(spec).map(|r| r.rows)
}

/// Re-verify a stored solution against its scenario: constraint replay plus
/// an energy-efficiency recomputation compared at 1e-9 relative.
pub fn replay_solution(
    envelope: &SolutionEnvelope,
    users: &UserField,
    params: &ChannelParams,
) -> (ConstraintReport, bool) {
    let constraints = metrics::check_constraints(
        &envelope.record.fleet,
        &envelope.record.assignment,
        users,
        params,
        envelope.u_max,
        envelope.p_max,
    );
    let ee = crate::channel::energy_efficiency(
        &envelope.record.assignment,
        &envelope.record.fleet,
        users,
        params,
    )
    .unwrap_or(f64::NAN);
    let ee_consistent =
        (ee - envelope.record.ee_score).abs() <= 1e-9 * envelope.record.ee_score.abs().max(1e-300);
    (constraints, ee_consistent)
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EeCell {
    pub algorithm: Algorithm,
    pub u_max: usize,
    pub n_feasible: usize,
    pub mean_ee: Option<f64>,
    pub std_ee: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrelCell {
    pub algorithm: Algorithm,
    pub gamma_th_db: f64,
    pub n_feasible: usize,
    pub mean_l_rel: Option<f64>,
}

/// Paired percentage improvement of the first algorithm over the second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub n_pairs: usize,
    pub mean_pct: f64,
    pub std_pct: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub min_pct: f64,
    pub max_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EeImprovement {
    pub u_max: usize,
    #[serde(flatten)]
    pub stats: Improvement,
}

/// Paired reliability comparison at one threshold. `points` measures
/// 100 · (ducem − kmeans) over all pairs, additive because the baseline
/// reliability can be exactly zero; `relative_pct` measures
/// 100 · (ducem − kmeans) / kmeans over the pairs with a nonzero baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrelImprovement {
    pub gamma_th_db: f64,
    pub points: Improvement,
    pub relative_pct: Option<Improvement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmStats {
    pub algorithm: Algorithm,
    pub rows: usize,
    pub feasible: usize,
    pub infeasible: usize,
    pub mean_runtime_s: f64,
    pub max_runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub ee_cells: Vec<EeCell>,
    pub lrel_cells: Vec<LrelCell>,
    /// Paired EE improvement of ducem over kmeans, per u_max.
    pub ee_improvement: Vec<EeImprovement>,
    /// Paired EE improvement pooled over all u_max cells.
    pub overall_ee_improvement: Option<Improvement>,
    /// Paired reliability improvement of ducem over kmeans, per threshold.
    pub lrel_improvement: Vec<LrelImprovement>,
    pub algorithm_stats: Vec<AlgorithmStats>,
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

fn improvement_stats(pairs: &[f64]) -> Option<Improvement> {
    if pairs.is_empty() {
        return None;
    }
    let (mean_pct, std_pct) = mean_and_std(pairs);
    let half = 1.96 * std_pct / (pairs.len() as f64).sqrt();
    let min_pct = pairs.iter().copied().fold(f64::INFINITY, f64::min);
    let max_pct = pairs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some(Improvement {
        n_pairs: pairs.len(),
        mean_pct,
        std_pct,
        ci95_lo: mean_pct - half,
        ci95_hi: mean_pct + half,
        min_pct,
        max_pct,
    })
}

fn sorted_unique<T: Clone + Ord>(values: impl Iterator<Item = T>) -> Vec<T> {
    let mut v: Vec<T> = values.collect();
    v.sort();
    v.dedup();
    v
}

/// Aggregate rows into per-cell means and paired ducem-vs-kmeans
/// improvements over rows sharing (seed, u_max), counting pairs where both
/// sides are feasible. Energy efficiency improves relatively,
/// 100 · (ducem − kmeans) / kmeans; reliability improves in percentage
/// points, since the baseline can sit at exactly zero.
pub fn summarize(rows: &[ResultRow]) -> Summary {
    let algorithms = sorted_unique(rows.iter().map(|r| r.algorithm));
    let u_maxes = sorted_unique(rows.iter().map(|r| r.u_max));
    let mut gamma_dbs: Vec<f64> = rows
        .iter()
        .flat_map(|r| r.l_rel.iter().map(|e| e.gamma_th_db))
        .collect();
    gamma_dbs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    gamma_dbs.dedup();

    let mut ee_cells = Vec::new();
    for &algorithm in &algorithms {
        for &u_max in &u_maxes {
            let ees: Vec<f64> = rows
                .iter()
                .filter(|r| r.algorithm == algorithm && r.u_max == u_max && r.feasible)
                .map(|r| r.ee)
                .collect();
            let (mean_ee, std_ee) = if ees.is_empty() {
                (None, None)
            } else {
                let (m, s) = mean_and_std(&ees);
                (Some(m), Some(s))
            };
            ee_cells.push(EeCell {
                algorithm,
                u_max,
                n_feasible: ees.len(),
                mean_ee,
                std_ee,
            });
        }
    }

    let mut lrel_cells = Vec::new();
    for &algorithm in &algorithms {
        for &gamma_th_db in &gamma_dbs {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.algorithm == algorithm && r.feasible)
                .filter_map(|r| {
                    r.l_rel
                        .iter()
                        .find(|e| e.gamma_th_db == gamma_th_db)
                        .map(|e| e.value)
                })
                .collect();
            lrel_cells.push(LrelCell {
                algorithm,
                gamma_th_db,
                n_feasible: values.len(),
                mean_l_rel: if values.is_empty() {
                    None
                } else {
                    Some(values.iter().sum::<f64>() / values.len() as f64)
                },
            });
        }
    }

    // Paired comparisons need both algorithms present.
    let paired = |u_max: usize, seed: u64| -> Option<(&ResultRow, &ResultRow)> {
        let find = |alg: Algorithm| {
            rows.iter()
                .find(|r| r.algorithm == alg && r.u_max == u_max && r.seed == seed && r.feasible)
        };
        Some((find(Algorithm::Ducem)?, find(Algorithm::Kmeans)?))
    };
    let seeds = sorted_unique(rows.iter().map(|r| r.seed));

    let mut ee_improvement = Vec::new();
    let mut all_pairs = Vec::new();
    for &u_max in &u_maxes {
        let mut pairs = Vec::new();
        for &seed in &seeds {
            if let Some((d, k)) = paired(u_max, seed) {
                if k.ee > 0.0 {
                    pairs.push(100.0 * (d.ee - k.ee) / k.ee);
                }
            }
        }
        all_pairs.extend_from_slice(&pairs);
        if let Some(stats) = improvement_stats(&pairs) {
            ee_improvement.push(EeImprovement { u_max, stats });
        }
    }
    let overall_ee_improvement = improvement_stats(&all_pairs);

    let mut lrel_improvement = Vec::new();
    for &gamma_th_db in &gamma_dbs {
        let mut point_pairs = Vec::new();
        let mut relative_pairs = Vec::new();
        for &u_max in &u_maxes {
            for &seed in &seeds {
                if let Some((d, k)) = paired(u_max, seed) {
                    let value = |r: &ResultRow| {
                        r.l_rel
                            .iter()
                            .find(|e| e.gamma_th_db == gamma_th_db)
                            .map(|e| e.value)
                    };
                    if let (Some(dv), Some(kv)) = (value(d), value(k)) {
                        point_pairs.push(100.0 * (dv - kv));
                        if kv > 0.0 {
                            relative_pairs.push(100.0 * (dv - kv) / kv);
                        }
                    }
                }
            }
        }
        if let Some(points) = improvement_stats(&point_pairs) {
            lrel_improvement.push(LrelImprovement {
                gamma_th_db,
                points,
                relative_pct: improvement_stats(&relative_pairs),
            });
        }
    }

    let algorithm_stats = algorithms
        .iter()
        .map(|&algorithm| {
            let mine: Vec<&ResultRow> =
                rows.iter().filter(|r| r.algorithm == algorithm).collect();
            let feasible = mine.iter().filter(|r| r.feasible).count();
            let runtimes: Vec<f64> = mine.iter().map(|r| r.runtime_s).collect();
            AlgorithmStats {
                algorithm,
                rows: mine.len(),
                feasible,
                infeasible: mine.len() - feasible,
                mean_runtime_s: if runtimes.is_empty() {
                    0.0
                } else {
                    runtimes.iter().sum::<f64>() / runtimes.len() as f64
                },
                max_runtime_s: runtimes.iter().copied().fold(0.0, f64::max),
            }
        })
        .collect();

    Summary {
        ee_cells,
        lrel_cells,
        ee_improvement,
        overall_ee_improvement,
        lrel_improvement,
        algorithm_stats,
    }
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

pub const ROWS_CSV: &str = "rows.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const EE_PLOT_CSV: &str = "ee_vs_umax.csv";
pub const LREL_PLOT_CSV: &str = "lrel_vs_gamma.csv";

fn fmt_db(db: f64) -> String {
    // Compact column labels: 3 -> "3", 7.5 -> "7.5".
    if db == db.trunc() {
        format!("{}", db as i64)
    } else {
        format!("{db}")
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write the raw rows, the summary JSON, and the two plot-ready CSVs.
///
/// The CSVs contain only seed-deterministic fields, so a rerun with the same
/// base seed reproduces them byte for byte; wall-clock runtimes go to the
/// summary JSON instead.
pub fn emit_outputs(
    rows: &[ResultRow],
    summary: &Summary,
    out_dir: &Path,
) -> Result<(), HarnessError> {
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    // Raw rows.
    let rows_path = out_dir.join(ROWS_CSV);
    let gamma_dbs: Vec<f64> = rows
        .first()
        .map(|r| r.l_rel.iter().map(|e| e.gamma_th_db).collect())
        .unwrap_or_default();
    {
        let mut w = csv::Writer::from_path(&rows_path).map_err(|source| HarnessError::Csv {
            path: rows_path.display().to_string(),
            source,
        })?;
        let mut header = vec![
            "algorithm".to_string(),
            "seed".to_string(),
            "u_max".to_string(),
            "m_final".to_string(),
            "ee_bits_per_joule".to_string(),
            "feasible".to_string(),
        ];
        header.extend(gamma_dbs.iter().map(|&db| format!("l_rel_{}db", fmt_db(db))));
        w.write_record(&header).map_err(|source| HarnessError::Csv {
            path: rows_path.display().to_string(),
            source,
        })?;
        for row in rows {
            let mut record = vec![
                row.algorithm.name().to_string(),
                row.seed.to_string(),
                row.u_max.to_string(),
                row.m_final.to_string(),
                row.ee.to_string(),
                row.feasible.to_string(),
            ];
            record.extend(row.l_rel.iter().map(|e| e.value.to_string()));
            w.write_record(&record).map_err(|source| HarnessError::Csv {
                path: rows_path.display().to_string(),
                source,
            })?;
        }
        w.flush().map_err(io_err(&rows_path))?;
    }

    // Summary JSON (includes runtimes; not byte-stable across reruns).
    let summary_path = out_dir.join(SUMMARY_JSON);
    let mut json = serde_json::to_string_pretty(summary)?;
    json.push('\n');
    std::fs::write(&summary_path, json).map_err(io_err(&summary_path))?;

    // EE-vs-u_max plot data.
    let ee_path = out_dir.join(EE_PLOT_CSV);
    {
        let mut w = csv::Writer::from_path(&ee_path).map_err(|source| HarnessError::Csv {
            path: ee_path.display().to_string(),
            source,
        })?;
        w.write_record(["u_max", "algorithm", "mean_ee_bits_per_joule", "std_ee"])
            .map_err(|source| HarnessError::Csv {
                path: ee_path.display().to_string(),
                source,
            })?;
        let mut cells = summary.ee_cells.clone();
        cells.sort_by_key(|c| (c.u_max, c.algorithm));
        for cell in &cells {
            w.write_record([
                cell.u_max.to_string(),
                cell.algorithm.name().to_string(),
                cell.mean_ee.map_or("NaN".into(), |v| v.to_string()),
                cell.std_ee.map_or("NaN".into(), |v| v.to_string()),
            ])
            .map_err(|source| HarnessError::Csv {
                path: ee_path.display().to_string(),
                source,
            })?;
        }
        w.flush().map_err(io_err(&ee_path))?;
    }

    // Reliability-vs-threshold plot data.
    let lrel_path = out_dir.join(LREL_PLOT_CSV);
    {
        let mut w = csv::Writer::from_path(&lrel_path).map_err(|source| HarnessError::Csv {
            path: lrel_path.display().to_string(),
            source,
        })?;
        w.write_record(["gamma_th_db", "algorithm", "mean_l_rel"])
            .map_err(|source| HarnessError::Csv {
                path: lrel_path.display().to_string(),
                source,
            })?;
        let mut cells = summary.lrel_cells.clone();
        cells.sort_by(|a, b| {
            a.gamma_th_db
                .partial_cmp(&b.gamma_th_db)
                .unwrap()
                .then(a.algorithm.cmp(&b.algorithm))
        });
        for cell in &cells {
            w.write_record([
                fmt_db(cell.gamma_th_db),
                cell.algorithm.name().to_string(),
                cell.mean_l_rel.map_or("NaN".into(), |v| v.to_string()),
            ])
            .map_err(|source| HarnessError::Csv {
                path: lrel_path.display().to_string(),
                source,
            })?;
        }
        w.flush().map_err(io_err(&lrel_path))?;
    }

    Ok(())
}

/// Parse a rows CSV written by [`emit_outputs`] back into result rows.
/// Runtime is not stored in the CSV and comes back as zero.
pub fn parse_rows_csv(path: &Path) -> Result<Vec<ResultRow>, HarnessError> {
    let csv_err = |source| HarnessError::Csv {
        path: path.display().to_string(),
        source,
    };
    let malformed = |reason: String| HarnessError::MalformedRows {
        path: path.display().to_string(),
        reason,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    let mut gamma_dbs = Vec::new();
    for h in headers.iter().skip(6) {
        let db = h
            .strip_prefix("l_rel_")
            .and_then(|s| s.strip_suffix("db"))
            .ok_or_else(|| malformed(format!("unexpected column '{h}'")))?;
        gamma_dbs.push(
            db.parse::<f64>()
                .map_err(|e| malformed(format!("bad threshold column '{h}': {e}")))?,
        );
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let field = |i: usize| -> Result<&str, HarnessError> {
            record
                .get(i)
                .ok_or_else(|| malformed(format!("missing field {i}")))
        };
        let l_rel = gamma_dbs
            .iter()
            .enumerate()
            .map(|(k, &gamma_th_db)| {
                Ok(LrelEntry {
                    gamma_th_db,
                    value: field(6 + k)?
                        .parse::<f64>()
                        .map_err(|e| malformed(format!("bad l_rel: {e}")))?,
                })
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        rows.push(ResultRow {
            algorithm: field(0)?
                .parse()
                .map_err(|e: String| malformed(e))?,
            seed: field(1)?
                .parse()
                .map_err(|e| malformed(format!("bad seed: {e}")))?,
            u_max: field(2)?
                .parse()
                .map_err(|e| malformed(format!("bad u_max: {e}")))?,
            m_final: field(3)?
                .parse()
                .map_err(|e| malformed(format!("bad m_final: {e}")))?,
            ee: field(4)?
                .parse()
                .map_err(|e| malformed(format!("bad ee: {e}")))?,
            l_rel,
            runtime_s: 0.0,
            feasible: field(5)?
                .parse()
                .map_err(|e| malformed(format!("bad feasible flag: {e}")))?,
        });
    }
    Ok(rows)
}
