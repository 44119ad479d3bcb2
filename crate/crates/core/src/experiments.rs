//! Reproducible sweep experiments and machine-readable result emission.
//!
//! Every sweep is driven by a [`SweepConfig`]: a master seed plus per-sample
//! RNG streams (sample i uses stream i of the master seed) make results
//! byte-identical for a given config regardless of thread count; aggregation
//! is always in sample-index order. CSV output is one header row and one
//! row per record with floats at 17 significant digits; JSON mirrors the
//! columns as an array of objects plus a config echo block. Wall times are
//! printed to the human summary only, never into CSV/JSON, so files stay
//! reproducible.
//!
//! Two kinds of flags appear in records. Hard assertions (bound and
//! identity checks that are proved statements) decide the process exit
//! code. Trend flags (like the median decay of entanglement with m) are
//! reported but never fail a run: they describe asymptotic behavior that
//! is still an open question, not a testable claim.

use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::entanglement::{
    eof_entropy_cap, eof_two_qubit, pinsker_upper, schmidt_weight_floor, sep_distance,
};
use crate::error::{Error, Result};
use crate::linalg::{trace_norm, LogBase, PureState};
use crate::states::{
    haar_state, phi_reduced_closed_form, phi_state, random_symmetric_state, reduce_phi_two_sites,
    reduce_two_sites, rho_bar, schmidt_sample, tensor_power_state, HaarSampler, SymmetricState,
    RNG_ALGORITHM,
};
use crate::symspace::{dim_sym, dim_sym_u128};
use crate::symtest::{didactic_circuit_test, symmetry_test, two_stage_test};

/// Identity-check tolerance for exact linear-algebra assertions.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Slack added to proved-inequality checks to absorb solver residuals.
pub const CHAIN_SLACK: f64 = 1e-6;

/// The experiments the command-line front end can run.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    EofDecay,
    SchmidtConcentration,
    Theorem2,
    SymtestDemo,
    Dims,
}

impl Experiment {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "eof-decay" => Some(Experiment::EofDecay),
            "schmidt-concentration" => Some(Experiment::SchmidtConcentration),
            "theorem2" => Some(Experiment::Theorem2),
            "symtest-demo" => Some(Experiment::SymtestDemo),
            "dims" => Some(Experiment::Dims),
            _ => None,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Experiment::EofDecay => "eof-decay",
            Experiment::SchmidtConcentration => "schmidt-concentration",
            Experiment::Theorem2 => "theorem2",
            Experiment::SymtestDemo => "symtest-demo",
            Experiment::Dims => "dims",
        };
        f.write_str(s)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

/// Configuration of one sweep run.
#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    pub experiment: Experiment,
    pub n: u32,
    pub m_values: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Stationarity tolerance handed to the separability-distance solver.
    pub sep_tol: f64,
    /// Monte Carlo pass/fail margin in standard errors.
    pub mc_sigmas: f64,
    pub format: OutputFormat,
    /// 0 = rayon default.
    pub threads: usize,
    /// State preset for the symtest demo.
    pub preset: Option<String>,
    /// Execution mode for the symtest demo.
    pub mode: Option<String>,
    /// RNG identification, echoed for reproducibility.
    pub rng_algorithm: String,
}

impl SweepConfig {
    pub fn new(experiment: Experiment) -> Self {
        SweepConfig {
            experiment,
            n: 1,
            m_values: default_m_values(experiment),
            samples: default_samples(experiment),
            seed: 1,
            sep_tol: crate::entanglement::SEP_SOLVER_DEFAULT_TOL,
            mc_sigmas: 3.0,
            format: OutputFormat::Csv,
            threads: 0,
            preset: None,
            mode: None,
            rng_algorithm: RNG_ALGORITHM.to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::arg("samples must be >= 1"));
        }
        if self.m_values.is_empty() {
            return Err(Error::arg("at least one m value is required"));
        }
        if self.experiment == Experiment::Theorem2 && self.m_values.iter().any(|m| m % 2 != 0) {
            return Err(Error::arg("theorem2 requires even m values"));
        }
        if self.experiment == Experiment::EofDecay && self.n != 1 {
            return Err(Error::arg(
                "eof-decay needs exact two-qubit entanglement of formation; only n=1 is supported",
            ));
        }
        Ok(())
    }
}

pub fn default_m_values(experiment: Experiment) -> Vec<usize> {
    match experiment {
        Experiment::EofDecay => vec![2, 4, 8, 16, 32],
        Experiment::SchmidtConcentration => vec![4, 6, 8],
        Experiment::Theorem2 => vec![2, 4, 6, 8],
        Experiment::SymtestDemo => vec![4],
        Experiment::Dims => (1..=8).collect(),
    }
}

pub fn default_samples(experiment: Experiment) -> usize {
    match experiment {
        Experiment::EofDecay => 200,
        Experiment::SchmidtConcentration => 100_000,
        _ => 1,
    }
}

/// Format to 17 significant digits (lossless f64 round-trip).
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn fmt17_opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct EofDecayRecord {
    pub experiment: String,
    pub n: u32,
    pub m: usize,
    pub samples: usize,
    pub seed: u64,
    pub eof_bits_mean: f64,
    pub eof_bits_se: f64,
    pub eof_bits_min: f64,
    pub eof_bits_max: f64,
    pub eof_bits_median: f64,
    pub sep_dist_mean: f64,
    pub sep_dist_se: f64,
    pub sep_dist_min: f64,
    pub sep_dist_max: f64,
    /// Min over samples of sqrt(2 eof_nats) + 1e-6 - sep_distance; the
    /// chain flag is exactly this being nonnegative.
    pub chain_margin_min: f64,
    /// Hard assertion: every sample satisfied
    /// sep_distance <= sqrt(2 eof_nats) + 1e-6.
    pub chain_ok: bool,
    /// Trend flag (reported, not asserted): this row's median does not
    /// exceed the previous row's.
    pub median_nonincreasing: bool,
}

impl EofDecayRecord {
    pub const HEADER: &'static [&'static str] = &[
        "experiment",
        "n",
        "m",
        "samples",
        "seed",
        "eof_bits_mean",
        "eof_bits_se",
        "eof_bits_min",
        "eof_bits_max",
        "eof_bits_median",
        "sep_dist_mean",
        "sep_dist_se",
        "sep_dist_min",
        "sep_dist_max",
        "chain_margin_min",
        "chain_ok",
        "median_nonincreasing",
    ];

    fn csv_row(&self) -> String {
        [
            self.experiment.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.samples.to_string(),
            self.seed.to_string(),
            fmt17(self.eof_bits_mean),
            fmt17(self.eof_bits_se),
            fmt17(self.eof_bits_min),
            fmt17(self.eof_bits_max),
            fmt17(self.eof_bits_median),
            fmt17(self.sep_dist_mean),
            fmt17(self.sep_dist_se),
            fmt17(self.sep_dist_min),
            fmt17(self.sep_dist_max),
            fmt17(self.chain_margin_min),
            self.chain_ok.to_string(),
            self.median_nonincreasing.to_string(),
        ]
        .join(",")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SchmidtConcentrationRecord {
    pub experiment: String,
    pub n: u32,
    pub m: usize,
    pub samples: usize,
    pub seed: u64,
    /// Normalized weighted mean of the top Schmidt weight:
    /// dim_sym(2^n, m-2) * mean(p_u * a1).
    pub a1_mean: f64,
    pub a1_se: f64,
    /// Exact floor dim_sym(2^n, m-2)/dim_sym(2^n, m).
    pub floor: f64,
    /// Hard assertion: a1_mean >= floor - mc_sigmas * a1_se - 1e-12.
    pub concentration_ok: bool,
    /// Normalization check: dim_sym(2^n, m-2) * mean(p_u), should be 1.
    pub norm_mean: f64,
    pub norm_se: f64,
    /// Hard assertion: |norm_mean - 1| <= mc_sigmas * norm_se + 1e-12
    /// (the absolute term absorbs float rounding in zero-variance cases
    /// such as m=2, where every draw has weight exactly 1).
    pub norm_ok: bool,
    /// Entropy cap implied by a1_mean (nats).
    pub eof_cap_nats: f64,
    /// Normalized weighted mean conditioned-state entanglement entropy.
    pub mean_ent_nats: f64,
    pub mean_ent_se: f64,
    /// Exact two-qubit EoF of the reduction (n=1 only).
    pub eof_exact_nats: Option<f64>,
    /// Reported: eof_cap_nats >= mean_ent_nats - mc_sigmas * mean_ent_se.
    pub cap_ok: bool,
}

impl SchmidtConcentrationRecord {
    pub const HEADER: &'static [&'static str] = &[
        "experiment",
        "n",
        "m",
        "samples",
        "seed",
        "a1_mean",
        "a1_se",
        "floor",
        "concentration_ok",
        "norm_mean",
        "norm_se",
        "norm_ok",
        "eof_cap_nats",
        "mean_ent_nats",
        "mean_ent_se",
        "eof_exact_nats",
        "cap_ok",
    ];

    fn csv_row(&self) -> String {
        [
            self.experiment.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.samples.to_string(),
            self.seed.to_string(),
            fmt17(self.a1_mean),
            fmt17(self.a1_se),
            fmt17(self.floor),
            self.concentration_ok.to_string(),
            fmt17(self.norm_mean),
            fmt17(self.norm_se),
            self.norm_ok.to_string(),
            fmt17(self.eof_cap_nats),
            fmt17(self.mean_ent_nats),
            fmt17(self.mean_ent_se),
            fmt17_opt(self.eof_exact_nats),
            self.cap_ok.to_string(),
        ]
        .join(",")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem2Record {
    pub experiment: String,
    pub n: u32,
    pub m: usize,
    pub k: usize,
    pub dim_sym_k: String,
    /// Max-abs residual of the fast-path reduction against
    /// rho_bar + (2/m)(|Phi+><Phi+| - rho_bar).
    pub residual_max_abs: f64,
    /// Hard assertion: residual <= 1e-9.
    pub identity_ok: bool,
    pub trace_dist_rhobar: f64,
    /// Exact value (4/m)(1 - 2^-n).
    pub trace_dist_exact: f64,
    pub bound_4_over_m: f64,
    /// Hard assertion: |dist - exact| <= 1e-9 and dist <= 4/m.
    pub trace_dist_ok: bool,
    pub sep_dist: f64,
    pub sep_gap: f64,
    /// Hard assertion: sep_dist <= 4/m + 1e-6, and <= dist to rho_bar.
    pub sep_ok: bool,
}

impl Theorem2Record {
    pub const HEADER: &'static [&'static str] = &[
        "experiment",
        "n",
        "m",
        "k",
        "dim_sym_k",
        "residual_max_abs",
        "identity_ok",
        "trace_dist_rhobar",
        "trace_dist_exact",
        "bound_4_over_m",
        "trace_dist_ok",
        "sep_dist",
        "sep_gap",
        "sep_ok",
    ];

    fn csv_row(&self) -> String {
        [
            self.experiment.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.k.to_string(),
            self.dim_sym_k.clone(),
            fmt17(self.residual_max_abs),
            self.identity_ok.to_string(),
            fmt17(self.trace_dist_rhobar),
            fmt17(self.trace_dist_exact),
            fmt17(self.bound_4_over_m),
            self.trace_dist_ok.to_string(),
            fmt17(self.sep_dist),
            fmt17(self.sep_gap),
            self.sep_ok.to_string(),
        ]
        .join(",")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SymtestDemoRecord {
    pub experiment: String,
    pub preset: String,
    pub mode: String,
    pub n: u32,
    pub m: usize,
    pub seed: u64,
    pub accept_probability: f64,
    pub stage1_label: String,
    pub stage1_prob: f64,
    pub stage2_label: String,
    pub stage2_prob: Option<f64>,
    pub post_state_present: bool,
    /// Residual of the mode's consistency identity (projector: post-state
    /// fixed-point defect; didactic: worst difference against projector
    /// semantics; two-stage: |stage product - acceptance probability|).
    pub consistency_residual: f64,
    /// Hard assertion: consistency_residual <= 1e-9.
    pub consistency_ok: bool,
}

impl SymtestDemoRecord {
    pub const HEADER: &'static [&'static str] = &[
        "experiment",
        "preset",
        "mode",
        "n",
        "m",
        "seed",
        "accept_probability",
        "stage1_label",
        "stage1_prob",
        "stage2_label",
        "stage2_prob",
        "post_state_present",
        "consistency_residual",
        "consistency_ok",
    ];

    fn csv_row(&self) -> String {
        [
            self.experiment.clone(),
            self.preset.clone(),
            self.mode.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.seed.to_string(),
            fmt17(self.accept_probability),
            self.stage1_label.clone(),
            fmt17(self.stage1_prob),
            self.stage2_label.clone(),
            fmt17_opt(self.stage2_prob),
            self.post_state_present.to_string(),
            fmt17(self.consistency_residual),
            self.consistency_ok.to_string(),
        ]
        .join(",")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DimsRecord {
    pub experiment: String,
    pub n: u32,
    pub m: usize,
    /// 2^n as a decimal string, or empty on overflow.
    pub local_dim: String,
    /// dim_sym(2^n, m) as a decimal string, or empty on overflow.
    pub dim: String,
    pub overflow: bool,
}

impl DimsRecord {
    pub const HEADER: &'static [&'static str] =
        &["experiment", "n", "m", "local_dim", "dim", "overflow"];

    fn csv_row(&self) -> String {
        [
            self.experiment.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.local_dim.clone(),
            self.dim.clone(),
            self.overflow.to_string(),
        ]
        .join(",")
    }
}

/// Records of one run, tagged by experiment.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Records {
    EofDecay(Vec<EofDecayRecord>),
    SchmidtConcentration(Vec<SchmidtConcentrationRecord>),
    Theorem2(Vec<Theorem2Record>),
    SymtestDemo(Vec<SymtestDemoRecord>),
    Dims(Vec<DimsRecord>),
}

impl Records {
    pub fn csv(&self) -> String {
        fn table<R>(header: &[&str], rows: &[R], f: impl Fn(&R) -> String) -> String {
            let mut out = header.join(",");
            out.push('\n');
            for r in rows {
                out.push_str(&f(r));
                out.push('\n');
            }
            out
        }
        match self {
            Records::EofDecay(r) => table(EofDecayRecord::HEADER, r, EofDecayRecord::csv_row),
            Records::SchmidtConcentration(r) => table(
                SchmidtConcentrationRecord::HEADER,
                r,
                SchmidtConcentrationRecord::csv_row,
            ),
            Records::Theorem2(r) => table(Theorem2Record::HEADER, r, Theorem2Record::csv_row),
            Records::SymtestDemo(r) => {
                table(SymtestDemoRecord::HEADER, r, SymtestDemoRecord::csv_row)
            }
            Records::Dims(r) => table(DimsRecord::HEADER, r, DimsRecord::csv_row),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Records::EofDecay(r) => r.len(),
            Records::SchmidtConcentration(r) => r.len(),
            Records::Theorem2(r) => r.len(),
            Records::SymtestDemo(r) => r.len(),
            Records::Dims(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Conjunction of every hard-assertion flag in the records.
    pub fn all_assertions_pass(&self) -> bool {
        match self {
            Records::EofDecay(r) => r.iter().all(|x| x.chain_ok),
            Records::SchmidtConcentration(r) => {
                r.iter().all(|x| x.concentration_ok && x.norm_ok)
            }
            Records::Theorem2(r) => {
                r.iter().all(|x| x.identity_ok && x.trace_dist_ok && x.sep_ok)
            }
            Records::SymtestDemo(r) => r.iter().all(|x| x.consistency_ok),
            Records::Dims(_) => true,
        }
    }
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub records: Records,
    /// Human-readable per-record lines (the only place wall time appears).
    pub summary_lines: Vec<String>,
    /// Records that could not be computed, with their errors.
    pub record_errors: Vec<(String, String)>,
    pub all_assertions_pass: bool,
    pub hit_size_or_overflow: bool,
}

impl ExperimentOutput {
    pub fn csv(&self) -> String {
        self.records.csv()
    }

    pub fn json(&self, config: &SweepConfig) -> String {
        let doc = serde_json::json!({
            "config": config,
            "records": self.records,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("records serialize");
        s.push('\n');
        s
    }
}

/// Dispatch one configured experiment.
pub fn run_experiment(config: &SweepConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::arg(format!("thread pool: {e}")))?;
    pool.install(|| match config.experiment {
        Experiment::EofDecay => run_eof_decay(config),
        Experiment::SchmidtConcentration => run_schmidt_concentration(config),
        Experiment::Theorem2 => run_theorem2(config),
        Experiment::SymtestDemo => run_symtest_demo(config),
        Experiment::Dims => run_dims(config),
    })
}

fn size_like(e: &Error) -> bool {
    matches!(e, Error::Size { .. } | Error::Overflow(_))
}

fn run_eof_decay(config: &SweepConfig) -> Result<ExperimentOutput> {
    let mut records = Vec::new();
    let mut summary_lines = Vec::new();
    let mut record_errors = Vec::new();
    let mut hit_size = false;
    let mut prev_median: Option<f64> = None;

    for &m in &config.m_values {
        let start = Instant::now();
        let per_sample: Result<Vec<(f64, f64, f64)>> = (0..config.samples)
            .into_par_iter()
            .map(|i| {
                let mut sampler = HaarSampler::substream(config.seed, i as u64);
                let state = random_symmetric_state(&mut sampler, config.n, m)?;
                let red = reduce_two_sites(&state)?;
                let eof_bits = eof_two_qubit(&red.rho, LogBase::Two)?;
                let eof_nats = eof_two_qubit(&red.rho, LogBase::Nat)?;
                let sol = sep_distance(&red.rho, 1, config.sep_tol)?;
                let margin = pinsker_upper(eof_nats)? + CHAIN_SLACK - sol.value;
                Ok((eof_bits, sol.value, margin))
            })
            .collect();
        match per_sample {
            Ok(samples) => {
                let eof_bits: Vec<f64> = samples.iter().map(|s| s.0).collect();
                let sep: Vec<f64> = samples.iter().map(|s| s.1).collect();
                let (eof_mean, eof_se) = mean_se(&eof_bits);
                let (sep_mean, sep_se) = mean_se(&sep);
                let chain_margin_min = samples
                    .iter()
                    .map(|s| s.2)
                    .fold(f64::INFINITY, f64::min);
                let med = median(&eof_bits);
                let nonincreasing = prev_median.map(|p| med <= p + 1e-12).unwrap_or(true);
                prev_median = Some(med);
                let record = EofDecayRecord {
                    experiment: config.experiment.to_string(),
                    n: config.n,
                    m,
                    samples: config.samples,
                    seed: config.seed,
                    eof_bits_mean: eof_mean,
                    eof_bits_se: eof_se,
                    eof_bits_min: eof_bits.iter().cloned().fold(f64::INFINITY, f64::min),
                    eof_bits_max: eof_bits.iter().cloned().fold(0.0, f64::max),
                    eof_bits_median: med,
                    sep_dist_mean: sep_mean,
                    sep_dist_se: sep_se,
                    sep_dist_min: sep.iter().cloned().fold(f64::INFINITY, f64::min),
                    sep_dist_max: sep.iter().cloned().fold(0.0, f64::max),
                    chain_margin_min,
                    chain_ok: chain_margin_min >= 0.0,
                    median_nonincreasing: nonincreasing,
                };
                summary_lines.push(format!(
                    "m={m:>4}  median EoF {:.6} bits  mean sep {:.6}  chain {}  nonincreasing {}  [{:.2}s]",
                    record.eof_bits_median,
                    record.sep_dist_mean,
                    if record.chain_ok { "ok" } else { "VIOLATED" },
                    record.median_nonincreasing,
                    start.elapsed().as_secs_f64()
                ));
                records.push(record);
            }
            Err(e) => {
                hit_size |= size_like(&e);
                summary_lines.push(format!("m={m:>4}  error: {e}"));
                record_errors.push((format!("m={m}"), e.to_string()));
            }
        }
    }
    let records = Records::EofDecay(records);
    Ok(ExperimentOutput {
        all_assertions_pass: records.all_assertions_pass() && record_errors.is_empty(),
        hit_size_or_overflow: hit_size,
        records,
        summary_lines,
        record_errors,
    })
}

fn run_schmidt_concentration(config: &SweepConfig) -> Result<ExperimentOutput> {
    let mut records = Vec::new();
    let mut summary_lines = Vec::new();
    let mut record_errors = Vec::new();
    let mut hit_size = false;

    for &m in &config.m_values {
        let start = Instant::now();
        let run_one = || -> Result<SchmidtConcentrationRecord> {
            // the probed state gets a dedicated stream away from samples
            let mut state_sampler = HaarSampler::substream(config.seed, u64::MAX);
            let state = random_symmetric_state(&mut state_sampler, config.n, m)?;
            let c = dim_sym(1usize << config.n, m - 2)? as f64;

            let draws: Result<Vec<(f64, f64, f64)>> = (0..config.samples)
                .into_par_iter()
                .map(|i| {
                    let mut sampler = HaarSampler::substream(config.seed, i as u64);
                    let s = schmidt_sample(&state, &mut sampler)?;
                    Ok((c * s.p_u * s.a1, c * s.p_u, c * s.p_u * s.ent_nats))
                })
                .collect();
            let draws = draws?;
            let weighted_a1: Vec<f64> = draws.iter().map(|d| d.0).collect();
            let weights: Vec<f64> = draws.iter().map(|d| d.1).collect();
            let weighted_ent: Vec<f64> = draws.iter().map(|d| d.2).collect();
            let (a1_mean, a1_se) = mean_se(&weighted_a1);
            let (norm_mean, norm_se) = mean_se(&weights);
            let (ent_mean, ent_se) = mean_se(&weighted_ent);
            let floor = schmidt_weight_floor(config.n, m)?;
            let eof_cap = eof_entropy_cap(a1_mean.clamp(0.0, 1.0), config.n)?;
            let eof_exact = if config.n == 1 {
                let red = reduce_two_sites(&state)?;
                Some(eof_two_qubit(&red.rho, LogBase::Nat)?)
            } else {
                None
            };
            Ok(SchmidtConcentrationRecord {
                experiment: config.experiment.to_string(),
                n: config.n,
                m,
                samples: config.samples,
                seed: config.seed,
                a1_mean,
                a1_se,
                floor,
                concentration_ok: a1_mean >= floor - config.mc_sigmas * a1_se - 1e-12,
                norm_mean,
                norm_se,
                norm_ok: (norm_mean - 1.0).abs() <= config.mc_sigmas * norm_se + 1e-12,
                eof_cap_nats: eof_cap,
                mean_ent_nats: ent_mean,
                mean_ent_se: ent_se,
                eof_exact_nats: eof_exact,
                cap_ok: eof_cap >= ent_mean - config.mc_sigmas * ent_se - 1e-12,
            })
        };
        match run_one() {
            Ok(record) => {
                summary_lines.push(format!(
                    "m={m:>3}  a1 {:.6} (floor {:.6}, {})  norm {:.6} ({})  cap {:.6} nats  [{:.2}s]",
                    record.a1_mean,
                    record.floor,
                    if record.concentration_ok { "ok" } else { "VIOLATED" },
                    record.norm_mean,
                    if record.norm_ok { "ok" } else { "VIOLATED" },
                    record.eof_cap_nats,
                    start.elapsed().as_secs_f64()
                ));
                records.push(record);
            }
            Err(e) => {
                hit_size |= size_like(&e);
                summary_lines.push(format!("m={m:>3}  error: {e}"));
                record_errors.push((format!("m={m}"), e.to_string()));
            }
        }
    }
    let records = Records::SchmidtConcentration(records);
    Ok(ExperimentOutput {
        all_assertions_pass: records.all_assertions_pass() && record_errors.is_empty(),
        hit_size_or_overflow: hit_size,
        records,
        summary_lines,
        record_errors,
    })
}

fn run_theorem2(config: &SweepConfig) -> Result<ExperimentOutput> {
    let mut records = Vec::new();
    let mut summary_lines = Vec::new();
    let mut record_errors = Vec::new();
    let mut hit_size = false;

    for &m in &config.m_values {
        let start = Instant::now();
        let run_one = || -> Result<Theorem2Record> {
            let k = m / 2;
            let d = 1usize << config.n;
            let phi = phi_state(config.n, k)?;
            let red = reduce_phi_two_sites(&phi)?;
            let closed = phi_reduced_closed_form(config.n, k)?;
            let residual = red.rho.matrix().max_abs_diff(closed.matrix());

            let bar = rho_bar(d)?;
            let dist = trace_norm(&red.rho.matrix().sub(bar.matrix()))?;
            let exact = (4.0 / m as f64) * (1.0 - 1.0 / d as f64);
            let bound = 4.0 / m as f64;

            let sol = sep_distance(&red.rho, 1, config.sep_tol)?;
            Ok(Theorem2Record {
                experiment: config.experiment.to_string(),
                n: config.n,
                m,
                k,
                dim_sym_k: dim_sym(d, k)?.to_string(),
                residual_max_abs: residual,
                identity_ok: residual <= IDENTITY_TOL,
                trace_dist_rhobar: dist,
                trace_dist_exact: exact,
                bound_4_over_m: bound,
                trace_dist_ok: (dist - exact).abs() <= IDENTITY_TOL && dist <= bound + 1e-12,
                sep_dist: sol.value,
                sep_gap: sol.gap,
                sep_ok: sol.value <= bound + CHAIN_SLACK && sol.value <= dist + CHAIN_SLACK,
            })
        };
        match run_one() {
            Ok(record) => {
                summary_lines.push(format!(
                    "m={m:>3}  residual {:.3e} ({})  dist {:.6} = {:.6} <= {:.4} ({})  sep {:.6} ({})  [{:.2}s]",
                    record.residual_max_abs,
                    if record.identity_ok { "ok" } else { "VIOLATED" },
                    record.trace_dist_rhobar,
                    record.trace_dist_exact,
                    record.bound_4_over_m,
                    if record.trace_dist_ok { "ok" } else { "VIOLATED" },
                    record.sep_dist,
                    if record.sep_ok { "ok" } else { "VIOLATED" },
                    start.elapsed().as_secs_f64()
                ));
                records.push(record);
            }
            Err(e) => {
                hit_size |= size_like(&e);
                summary_lines.push(format!("m={m:>3}  error: {e}"));
                record_errors.push((format!("m={m}"), e.to_string()));
            }
        }
    }
    let records = Records::Theorem2(records);
    Ok(ExperimentOutput {
        all_assertions_pass: records.all_assertions_pass() && record_errors.is_empty(),
        hit_size_or_overflow: hit_size,
        records,
        summary_lines,
        record_errors,
    })
}

/// Build the demo state for a preset spec.
///
/// Presets: `product` (a fixed single-site state to the m-th power),
/// `singlet`, `dicke(k)` (k excitations over m qubit sites), `phi(n,k)`
/// (overrides n and m = 2k), `random(seed)`.
pub fn build_preset(preset: &str, n: u32, m: usize) -> Result<(PureState, u32, usize)> {
    let d = 1usize << n;
    if preset == "product" {
        // deterministic non-basis single-site state
        let mut sampler = HaarSampler::substream(0xBA5E, d as u64);
        let single = PureState::new(haar_state(&mut sampler, d), vec![d])?;
        return Ok((tensor_power_state(&single, m)?, n, m));
    }
    if preset == "singlet" {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let amps = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(r, 0.0),
            Complex64::new(-r, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        return Ok((PureState::new(amps, vec![2, 2])?, 1, 2));
    }
    if let Some(arg) = preset.strip_prefix("dicke(").and_then(|s| s.strip_suffix(')')) {
        let k: u32 = arg
            .trim()
            .parse()
            .map_err(|_| Error::arg(format!("bad dicke excitation count {arg:?}")))?;
        if n != 1 {
            return Err(Error::arg("dicke(k) preset is defined for qubit sites (n=1)"));
        }
        if k as usize > m {
            return Err(Error::arg(format!("dicke({k}) needs k <= m = {m}")));
        }
        let state = SymmetricState::dicke(1, m, &[m as u32 - k, k])?;
        return Ok((state.embed()?, 1, m));
    }
    if let Some(arg) = preset.strip_prefix("phi(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(Error::arg("phi preset needs phi(n,k)"));
        }
        let pn: u32 = parts[0]
            .parse()
            .map_err(|_| Error::arg(format!("bad phi n {:?}", parts[0])))?;
        let pk: usize = parts[1]
            .parse()
            .map_err(|_| Error::arg(format!("bad phi k {:?}", parts[1])))?;
        let phi = phi_state(pn, pk)?;
        return Ok((phi.embed()?, pn, 2 * pk));
    }
    if let Some(arg) = preset.strip_prefix("random(").and_then(|s| s.strip_suffix(')')) {
        let seed: u64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::arg(format!("bad random seed {arg:?}")))?;
        let mut sampler = HaarSampler::new(seed);
        let total = d
            .checked_pow(m as u32)
            .ok_or_else(|| Error::Overflow("preset state size".into()))?;
        let amps = haar_state(&mut sampler, total);
        return Ok((PureState::new(amps, vec![d; m])?, n, m));
    }
    Err(Error::arg(format!("unknown preset {preset:?}")))
}

fn run_symtest_demo(config: &SweepConfig) -> Result<ExperimentOutput> {
    let preset = config.preset.clone().unwrap_or_else(|| "product".to_string());
    let mode = config.mode.clone().unwrap_or_else(|| "projector".to_string());
    let m = config.m_values[0];

    let (psi, n, m) = build_preset(&preset, config.n, m)?;

    let start = Instant::now();
    let (outcome, consistency_residual) = match mode.as_str() {
        "projector" => {
            let out = symmetry_test(&psi)?;
            let residual = match &out.post_state {
                Some(post) => {
                    let rerun = symmetry_test(post)?;
                    (rerun.accept_probability - 1.0).abs()
                }
                None => out.accept_probability,
            };
            (out, residual)
        }
        "didactic" => {
            let projector = symmetry_test(&psi)?;
            let out = didactic_circuit_test(&psi)?;
            let mut residual = (out.accept_probability - projector.accept_probability).abs();
            residual = match (&out.post_state, &projector.post_state) {
                (Some(a), Some(b)) => residual.max(a.max_abs_diff(b)),
                (None, None) => residual,
                _ => f64::INFINITY,
            };
            (out, residual)
        }
        "two-stage" => {
            let out = two_stage_test(&psi)?;
            let product: f64 = out.stage_log.iter().map(|(_, p)| p).product();
            let residual = (product - out.accept_probability).abs();
            (out, residual)
        }
        other => return Err(Error::arg(format!("unknown mode {other:?}"))),
    };
    let consistency_ok = consistency_residual <= IDENTITY_TOL;

    let record = SymtestDemoRecord {
        experiment: config.experiment.to_string(),
        preset: preset.clone(),
        mode: mode.clone(),
        n,
        m,
        seed: config.seed,
        accept_probability: outcome.accept_probability,
        stage1_label: outcome.stage_log.first().map(|s| s.0.clone()).unwrap_or_default(),
        stage1_prob: outcome.stage_log.first().map(|s| s.1).unwrap_or(0.0),
        stage2_label: outcome
            .stage_log
            .get(1)
            .map(|s| s.0.clone())
            .unwrap_or_default(),
        stage2_prob: outcome.stage_log.get(1).map(|s| s.1),
        post_state_present: outcome.post_state.is_some(),
        consistency_residual,
        consistency_ok,
    };
    let summary_lines = vec![format!(
        "preset {preset} mode {mode}: accept {:.6}  stages {:?}  consistency {}  [{:.2}s]",
        record.accept_probability,
        outcome
            .stage_log
            .iter()
            .map(|(l, p)| format!("{l}={p:.6}"))
            .collect::<Vec<_>>(),
        if record.consistency_ok { "ok" } else { "VIOLATED" },
        start.elapsed().as_secs_f64()
    )];
    let records = Records::SymtestDemo(vec![record]);
    Ok(ExperimentOutput {
        all_assertions_pass: records.all_assertions_pass(),
        hit_size_or_overflow: false,
        records,
        summary_lines,
        record_errors: Vec::new(),
    })
}

fn run_dims(config: &SweepConfig) -> Result<ExperimentOutput> {
    let mut records = Vec::new();
    let mut summary_lines = Vec::new();
    for &m in &config.m_values {
        let local = 2u128.checked_pow(config.n);
        let value = local.map(|d| dim_sym_u128(d, m));
        let (local_dim, dim, overflow) = match (local, value) {
            (Some(d), Some(Ok(v))) => (d.to_string(), v.to_string(), false),
            (Some(d), _) => (d.to_string(), String::new(), true),
            _ => (String::new(), String::new(), true),
        };
        summary_lines.push(format!(
            "n={} m={m:>5}  dim {}",
            config.n,
            if overflow { "overflow" } else { dim.as_str() }
        ));
        records.push(DimsRecord {
            experiment: config.experiment.to_string(),
            n: config.n,
            m,
            local_dim,
            dim,
            overflow,
        });
    }
    let records = Records::Dims(records);
    Ok(ExperimentOutput {
        all_assertions_pass: true,
        hit_size_or_overflow: false, // per-cell overflow is reported, not fatal
        records,
        summary_lines,
        record_errors: Vec::new(),
    })
}

/// Corpus entry for bound-chain verification: a two-qubit reduction plus
/// where it came from. Used by the acceptance suite and available to
/// downstream tools.
pub fn chain_corpus(seed: u64, count_random: usize) -> Result<Vec<crate::linalg::DensityMatrix>> {
    let mut corpus = Vec::new();
    // random symmetric states across a spread of m
    let ms = [2usize, 3, 4, 5, 6, 8, 12, 16, 24, 32];
    let mut i = 0usize;
    while corpus.len() < count_random {
        let m = ms[i % ms.len()];
        let mut sampler = HaarSampler::substream(seed, i as u64);
        let state = random_symmetric_state(&mut sampler, 1, m)?;
        corpus.push(reduce_two_sites(&state)?.rho);
        i += 1;
    }
    // all qubit Dicke reductions up to m = 12
    for m in 2..=12usize {
        for k in 0..=m {
            let state = SymmetricState::dicke(1, m, &[(m - k) as u32, k as u32])?;
            corpus.push(reduce_two_sites(&state)?.rho);
        }
    }
    // first-pair reductions of |Phi> for k = 1..8
    for k in 1..=8usize {
        corpus.push(reduce_phi_two_sites(&phi_state(1, k)?)?.rho);
    }
    Ok(corpus)
}

/// Aggregate bound-chain check over a corpus of two-qubit states:
/// sep_distance <= sqrt(2 eof_nats) + 1e-6 for every element. Returns
/// (worst margin, number of violations).
pub fn verify_chain(
    corpus: &[crate::linalg::DensityMatrix],
    sep_tol: f64,
) -> Result<(f64, usize)> {
    let results: Result<Vec<(f64, bool)>> = corpus
        .par_iter()
        .map(|rho| {
            let eof = eof_two_qubit(rho, LogBase::Nat)?;
            let upper = pinsker_upper(eof)?;
            let sol = sep_distance(rho, 1, sep_tol)?;
            let margin = upper + CHAIN_SLACK - sol.value;
            Ok((margin, sol.value <= upper + CHAIN_SLACK))
        })
        .collect();
    let results = results?;
    let worst = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let violations = results.iter().filter(|r| !r.1).count();
    Ok((worst, violations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut config = SweepConfig::new(Experiment::Theorem2);
        config.m_values = vec![2, 3];
        assert!(config.validate().is_err());
        config.m_values = vec![2, 4];
        assert!(config.validate().is_ok());
        config.samples = 0;
        assert!(config.validate().is_err());

        let mut config = SweepConfig::new(Experiment::EofDecay);
        config.n = 2;
        assert!(config.validate().is_err());
    }

    #[test]
    fn experiment_names_round_trip() {
        for name in [
            "eof-decay",
            "schmidt-concentration",
            "theorem2",
            "symtest-demo",
            "dims",
        ] {
            let e = Experiment::parse(name).unwrap();
            assert_eq!(e.to_string(), name);
        }
        assert!(Experiment::parse("nonsense").is_none());
    }

    #[test]
    fn fmt17_has_seventeen_significant_digits() {
        let s = fmt17(1.0 / 3.0);
        assert!(s.starts_with("3.333333333333333"));
        let back: f64 = s.parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }

    #[test]
    fn dims_experiment_reports_overflow_cells_and_continues() {
        let mut config = SweepConfig::new(Experiment::Dims);
        config.n = 120;
        config.m_values = vec![1, 2];
        let out = run_experiment(&config).unwrap();
        let Records::Dims(rows) = &out.records else {
            panic!()
        };
        assert_eq!(rows.len(), 2);
        assert!(!rows[0].overflow, "2^120 * 1 multiset still fits u128");
        assert!(rows[1].overflow, "m=2 at n=120 overflows u128");
        assert!(!out.hit_size_or_overflow, "per-cell overflow is not fatal");
    }

    #[test]
    fn dims_small_table_values() {
        let mut config = SweepConfig::new(Experiment::Dims);
        config.n = 1;
        config.m_values = vec![1, 2, 3, 4];
        let out = run_experiment(&config).unwrap();
        let Records::Dims(rows) = &out.records else {
            panic!()
        };
        let dims: Vec<&str> = rows.iter().map(|r| r.dim.as_str()).collect();
        assert_eq!(dims, vec!["2", "3", "4", "5"]);

        let mut config = SweepConfig::new(Experiment::Dims);
        config.n = 2;
        config.m_values = vec![2];
        let out = run_experiment(&config).unwrap();
        let Records::Dims(rows) = &out.records else {
            panic!()
        };
        assert_eq!(rows[0].dim, "10");

        // n=10, m=3: exact big binomial C(1026, 3)
        let mut config = SweepConfig::new(Experiment::Dims);
        config.n = 10;
        config.m_values = vec![3];
        let out = run_experiment(&config).unwrap();
        let Records::Dims(rows) = &out.records else {
            panic!()
        };
        let expect = (1026u128 * 1025 * 1024) / 6;
        assert_eq!(rows[0].dim, expect.to_string());
    }

    #[test]
    fn eof_decay_single_sample_is_deterministic() {
        let mut config = SweepConfig::new(Experiment::EofDecay);
        config.m_values = vec![2];
        config.samples = 1;
        config.seed = 7;
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a.csv(), b.csv());
        assert_eq!(a.json(&config), b.json(&config));
        // thread count must not change bytes
        config.threads = 3;
        let c = run_experiment(&config).unwrap();
        assert_eq!(a.csv(), c.csv());
    }

    #[test]
    fn eof_decay_small_sweep_chain_holds() {
        let mut config = SweepConfig::new(Experiment::EofDecay);
        config.m_values = vec![2, 4, 8];
        config.samples = 10;
        config.seed = 11;
        let out = run_experiment(&config).unwrap();
        assert!(out.all_assertions_pass);
        let Records::EofDecay(rows) = &out.records else {
            panic!()
        };
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.chain_ok));
    }

    #[test]
    fn schmidt_concentration_small_run() {
        let mut config = SweepConfig::new(Experiment::SchmidtConcentration);
        config.m_values = vec![4];
        config.samples = 2000;
        config.seed = 13;
        let out = run_experiment(&config).unwrap();
        let Records::SchmidtConcentration(rows) = &out.records else {
            panic!()
        };
        let r = &rows[0];
        assert!((r.floor - 0.6).abs() < 1e-12);
        assert!(r.concentration_ok, "a1 {} vs floor {}", r.a1_mean, r.floor);
        assert!(r.norm_ok, "norm {} (se {})", r.norm_mean, r.norm_se);
        assert!(r.cap_ok);
        assert!(r.eof_exact_nats.is_some());
    }

    #[test]
    fn schmidt_concentration_degenerate_m2() {
        // m=2: no sites are conditioned away, every draw has weight 1
        // (up to float rounding, so norm_se collapses to ~0) and the floor
        // is dim(2,0)/dim(2,2) = 1/3. The seed/sample pair here once
        // produced a mean two ulps off 1.0 with zero variance.
        let mut config = SweepConfig::new(Experiment::SchmidtConcentration);
        config.m_values = vec![2];
        config.samples = 5000;
        config.seed = 1;
        let out = run_experiment(&config).unwrap();
        let Records::SchmidtConcentration(rows) = &out.records else {
            panic!()
        };
        let r = &rows[0];
        assert!((r.floor - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.norm_mean - 1.0).abs() < 1e-12, "weights are exactly 1");
        assert!(r.concentration_ok && r.norm_ok, "{r:?}");
        assert!(out.all_assertions_pass);
    }

    #[test]
    fn csv_field_counts_match_headers() {
        let configs = [
            {
                let mut c = SweepConfig::new(Experiment::Dims);
                c.m_values = vec![1, 2];
                c
            },
            {
                let mut c = SweepConfig::new(Experiment::Theorem2);
                c.m_values = vec![2];
                c
            },
            {
                let mut c = SweepConfig::new(Experiment::EofDecay);
                c.m_values = vec![2];
                c.samples = 3;
                c
            },
            {
                let mut c = SweepConfig::new(Experiment::SchmidtConcentration);
                c.m_values = vec![4];
                c.samples = 50;
                c
            },
            SweepConfig::new(Experiment::SymtestDemo),
        ];
        for config in configs {
            let out = run_experiment(&config).unwrap();
            let csv = out.csv();
            let mut lines = csv.lines();
            let header_fields = lines.next().unwrap().split(',').count();
            for line in lines {
                assert_eq!(
                    line.split(',').count(),
                    header_fields,
                    "{}: ragged row {line}",
                    config.experiment
                );
            }
        }
    }

    #[test]
    fn theorem2_sweep_identities_hold() {
        let mut config = SweepConfig::new(Experiment::Theorem2);
        config.m_values = vec![2, 4, 8];
        let out = run_experiment(&config).unwrap();
        assert!(out.all_assertions_pass, "{:?}", out.summary_lines);
        let Records::Theorem2(rows) = &out.records else {
            panic!()
        };
        // m=2 collapses onto the maximally entangled state
        assert!(rows[0].residual_max_abs < 1e-12);
        // m=4: (4/m)(1 - 1/2) = 0.5
        assert!((rows[1].trace_dist_rhobar - 0.5).abs() < 1e-10);
    }

    #[test]
    fn symtest_demo_presets() {
        for (preset, expect_prob) in [("product", 1.0), ("singlet", 0.0)] {
            let mut config = SweepConfig::new(Experiment::SymtestDemo);
            config.preset = Some(preset.to_string());
            let out = run_experiment(&config).unwrap();
            let Records::SymtestDemo(rows) = &out.records else {
                panic!()
            };
            assert!(
                (rows[0].accept_probability - expect_prob).abs() < 1e-9,
                "{preset}: {}",
                rows[0].accept_probability
            );
            assert!(rows[0].consistency_ok);
        }
    }

    #[test]
    fn symtest_demo_didactic_agrees_with_projector() {
        let mut config = SweepConfig::new(Experiment::SymtestDemo);
        config.preset = Some("random(7)".to_string());
        config.m_values = vec![3];
        config.mode = Some("didactic".to_string());
        let out = run_experiment(&config).unwrap();
        assert!(out.all_assertions_pass);
    }

    #[test]
    fn symtest_demo_unknown_preset_is_usage_error() {
        let mut config = SweepConfig::new(Experiment::SymtestDemo);
        config.preset = Some("w-state".to_string());
        assert!(matches!(
            run_experiment(&config),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut config = SweepConfig::new(Experiment::Dims);
        config.m_values = vec![1, 2];
        let out = run_experiment(&config).unwrap();
        let csv = out.csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], DimsRecord::HEADER.join(","));
    }

    #[test]
    fn json_mirrors_columns_and_echoes_config() {
        let mut config = SweepConfig::new(Experiment::Dims);
        config.m_values = vec![2];
        let out = run_experiment(&config).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&out.json(&config)).unwrap();
        assert_eq!(doc["config"]["experiment"], "dims");
        assert_eq!(doc["config"]["rng_algorithm"], RNG_ALGORITHM);
        assert_eq!(doc["records"][0]["dim"], "3");
        for column in DimsRecord::HEADER {
            assert!(
                !doc["records"][0][column].is_null(),
                "missing column {column}"
            );
        }
    }

    #[test]
    fn chain_corpus_has_variety() {
        let corpus = chain_corpus(3, 20).unwrap();
        // 20 random + 77 Dicke (m=2..12) + 8 phi reductions
        assert!(corpus.len() >= 100);
        let (worst, violations) = verify_chain(&corpus[..30], 1e-6).unwrap();
        assert_eq!(violations, 0, "worst margin {worst}");
    }
}
