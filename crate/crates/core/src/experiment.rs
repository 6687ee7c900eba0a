//! Monte Carlo sweeps, exhaustive `Y*` enumeration and bound verification.
//!
//! Trial `i` at sweep point `j` uses seed `master.derive(j).derive(i)`. Trials
//! run on a rayon pool but results are gathered in trial order before any
//! statistic is computed, so output does not depend on the thread count.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{self, BoundsError};
use crate::graph::OrientedDigraph;
use crate::random::{decode_pair, pair_count, ModelError, ModelKind, ModelSpec, Seed};
use crate::solvers::{self, SolverBudget, SolverError};

/// Largest configuration count the enumerators will walk.
pub const ENUMERATION_GUARD: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{0} configurations exceeds the enumeration guard of {ENUMERATION_GUARD}")]
    TooManyConfigurations(u128),
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("failed to build thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepVariable {
    /// `start, start+step, ...` up to and including `end`.
    N { start: usize, end: usize, step: usize },
    P { start: f64, end: f64, step: f64 },
}

impl SweepVariable {
    fn n_values(start: usize, end: usize, step: usize) -> Vec<usize> {
        (start..=end).step_by(step.max(1)).collect()
    }

    fn p_values(start: f64, end: f64, step: f64) -> Vec<f64> {
        let count = ((end - start) / step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect()
    }
}

/// Model family with the parameters that stay fixed across a sweep.
///
/// For `Gnm`, the arc count at each point is `m` when given, otherwise
/// `round(p · C(n,2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelTemplate {
    pub kind: ModelKind,
    pub n: usize,
    pub m: Option<usize>,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub model: ModelTemplate,
    pub sweep: SweepVariable,
    pub trials: usize,
    pub seed: Seed,
    pub budget: SolverBudget,
    /// Worker threads; 0 uses rayon's default.
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub spec: ModelSpec,
    /// Density reported in the `p` column, if the point has one.
    pub p: Option<f64>,
}

impl SweepConfig {
    pub fn points(&self) -> Result<Vec<SweepPoint>, ExperimentError> {
        if self.trials == 0 {
            return Err(ExperimentError::InvalidConfig("trials must be at least 1".into()));
        }
        let t = &self.model;
        let at = |n: usize, p: Option<f64>| -> Result<SweepPoint, ExperimentError> {
            let spec = match t.kind {
                ModelKind::Tournament => ModelSpec::Tournament { n },
                ModelKind::ErNp => {
                    let p = p.ok_or_else(|| ExperimentError::InvalidConfig("gnp needs p".into()))?;
                    ModelSpec::ErNp { n, p }
                }
                ModelKind::Gnm => {
                    let m = match (t.m, p) {
                        (Some(m), None) => m,
                        (_, Some(p)) => (p * pair_count(n) as f64).round() as usize,
                        (None, None) => {
                            return Err(ExperimentError::InvalidConfig("gnm needs m or p".into()))
                        }
                    };
                    ModelSpec::Gnm { n, m }
                }
            };
            spec.validate()?;
            let p = if t.kind == ModelKind::Tournament { None } else { p };
            Ok(SweepPoint { spec, p })
        };
        let points: Vec<SweepPoint> = match self.sweep {
            SweepVariable::N { start, end, step } => {
                if step == 0 {
                    return Err(ExperimentError::InvalidConfig("n step must be positive".into()));
                }
                SweepVariable::n_values(start, end, step)
                    .into_iter()
                    .map(|n| at(n, t.p))
                    .collect::<Result<_, _>>()?
            }
            SweepVariable::P { start, end, step } => {
                if !(step > 0.0) {
                    return Err(ExperimentError::InvalidConfig("p step must be positive".into()));
                }
                SweepVariable::p_values(start, end, step)
                    .into_iter()
                    .map(|p| at(t.n, Some(p)))
                    .collect::<Result<_, _>>()?
            }
        };
        if points.is_empty() {
            return Err(ExperimentError::InvalidConfig("sweep range is empty".into()));
        }
        Ok(points)
    }
}

/// One row of sweep output; field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub model: String,
    pub n: usize,
    pub p: Option<f64>,
    pub m_expected: f64,
    pub m_realized_mean: f64,
    pub trials: usize,
    pub ystar_mean: f64,
    pub ystar_std: f64,
    pub ystar_min: f64,
    pub ystar_max: f64,
    pub exact_fraction: f64,
    pub bound_thm31: Option<f64>,
    pub heuristic_est: Option<f64>,
    pub half_m: f64,
    /// Point seed; trial `i` replays with `Seed(seed).derive(i)`.
    pub seed: u64,
}

pub const CSV_HEADER: &str = "model,n,p,m_expected,m_realized_mean,trials,ystar_mean,ystar_std,ystar_min,ystar_max,exact_fraction,bound_thm31,heuristic_est,half_m,seed";

#[derive(Debug, Clone, PartialEq)]
pub struct PointDiagnostic {
    pub index: usize,
    pub spec: ModelSpec,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOutcome {
    pub records: Vec<ExperimentRecord>,
    pub diagnostics: Vec<PointDiagnostic>,
}

#[derive(Debug, Clone, Copy)]
struct Trial {
    m: usize,
    ystar: usize,
    exact: bool,
}

fn run_trials(
    spec: &ModelSpec,
    seed: Seed,
    trials: usize,
    budget: &SolverBudget,
) -> Result<Vec<Trial>, ExperimentError> {
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let g = spec.sample_trial(seed, i)?;
            let r = solvers::solve_auto(&g, budget)?;
            Ok(Trial { m: g.m(), ystar: r.feedback_count, exact: r.exact })
        })
        .collect()
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, ExperimentError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ExperimentError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

fn aggregate(point: &SweepPoint, seed: Seed, trials: &[Trial]) -> ExperimentRecord {
    let k = trials.len() as f64;
    let ys: Vec<f64> = trials.iter().map(|t| t.ystar as f64).collect();
    let mean = ys.iter().sum::<f64>() / k;
    let std = if trials.len() > 1 {
        (ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    let n = point.spec.n();
    let m_ref = point.spec.reference_m();
    let bound = bounds::theorem31_lower_bound(n as u64, m_ref).ok().map(|b| b.bound);
    let heur = bounds::heuristic_fas_estimate(n as u64, m_ref).ok();
    ExperimentRecord {
        model: point.spec.kind().name().to_string(),
        n,
        p: point.p,
        m_expected: m_ref,
        m_realized_mean: trials.iter().map(|t| t.m as f64).sum::<f64>() / k,
        trials: trials.len(),
        ystar_mean: mean,
        ystar_std: std,
        ystar_min: ys.iter().copied().fold(f64::INFINITY, f64::min),
        ystar_max: ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        exact_fraction: trials.iter().filter(|t| t.exact).count() as f64 / k,
        bound_thm31: bound,
        heuristic_est: heur,
        half_m: m_ref / 2.0,
        seed: seed.0,
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome, ExperimentError> {
    let points = cfg.points()?;
    with_pool(cfg.jobs, || {
        let mut out = SweepOutcome::default();
        for (index, point) in points.iter().enumerate() {
            let seed = cfg.seed.derive(index as u64);
            match run_trials(&point.spec, seed, cfg.trials, &cfg.budget) {
                Ok(trials) => out.records.push(aggregate(point, seed, &trials)),
                Err(e) => out.diagnostics.push(PointDiagnostic {
                    index,
                    spec: point.spec,
                    message: e.to_string(),
                }),
            }
        }
        out
    })
}

pub fn write_csv<W: Write>(records: &[ExperimentRecord], w: W) -> Result<(), ExperimentError> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(CSV_HEADER.split(','))?;
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<ExperimentRecord>, ExperimentError> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(ExperimentError::InvalidConfig(format!("unexpected CSV header `{}`", header.join(","))));
    }
    rdr.deserialize().map(|r| r.map_err(ExperimentError::from)).collect()
}

pub fn emit_csv(records: &[ExperimentRecord], path: &Path) -> Result<(), ExperimentError> {
    write_csv(records, File::create(path)?)
}

/// Exact distribution of `Y*` over all equiprobable configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct YstarDistribution {
    pub n: usize,
    pub m: usize,
    /// Number of configurations with each value of `Y*`.
    pub counts: BTreeMap<usize, u64>,
    pub total: u64,
}

impl YstarDistribution {
    pub fn pmf(&self, k: usize) -> f64 {
        self.counts.get(&k).copied().unwrap_or(0) as f64 / self.total as f64
    }

    /// `Pr(Y* <= k)`, with the count kept exact until the final division.
    pub fn cdf(&self, k: usize) -> f64 {
        self.cdf_count(k) as f64 / self.total as f64
    }

    pub fn cdf_count(&self, k: usize) -> u64 {
        self.counts.range(..=k).map(|(_, c)| c).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        self.counts.keys().copied().collect()
    }
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `C(C(n,2), m) · 2^m`.
pub fn configuration_count(n: usize, m: usize) -> u128 {
    if m >= 128 {
        return u128::MAX;
    }
    binomial_u128(pair_count(n), m as u64).saturating_mul(1u128 << m)
}

/// Advances `idx` to the next `k`-combination of `0..total` in lexicographic order.
fn next_combination(idx: &mut [u64], total: u64) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < total - (k - i) as u64 {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn empirical_ystar_distribution(n: usize, m: usize) -> Result<YstarDistribution, ExperimentError> {
    let configs = configuration_count(n, m);
    if configs > ENUMERATION_GUARD as u128 || m as u64 > pair_count(n) {
        return Err(ExperimentError::TooManyConfigurations(configs));
    }
    let total_pairs = pair_count(n);
    let budget = SolverBudget::default();
    let mut counts = BTreeMap::new();
    let mut combo: Vec<u64> = (0..m as u64).collect();
    let mut total = 0u64;
    loop {
        let pairs: Vec<(usize, usize)> = combo.iter().map(|&i| decode_pair(i)).collect();
        for flips in 0..(1u64 << m) {
            let arcs = pairs
                .iter()
                .enumerate()
                .map(|(b, &(i, j))| if flips >> b & 1 == 0 { (i, j) } else { (j, i) })
                .collect();
            let g = OrientedDigraph::from_arcs_unchecked(n, arcs);
            let y = solvers::min_feedback_exact(&g, &budget)?;
            *counts.entry(y).or_insert(0) += 1;
            total += 1;
        }
        if m == 0 || !next_combination(&mut combo, total_pairs) {
            break;
        }
    }
    Ok(YstarDistribution { n, m, counts, total })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma21Row {
    pub k: usize,
    pub exact_cdf: f64,
    /// `n! · Pr(Y <= k)`, uncapped.
    pub union_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma21Report {
    pub n: usize,
    pub m: usize,
    pub configurations: u64,
    pub rows: Vec<Lemma21Row>,
    pub passed: bool,
}

/// Relative slack allowed when comparing the enumerated CDF to the union bound.
pub const LEMMA21_REL_TOL: f64 = 1e-12;

pub fn verify_lemma21(n: usize, m: usize) -> Result<Lemma21Report, ExperimentError> {
    let dist = empirical_ystar_distribution(n, m)?;
    let rows: Vec<Lemma21Row> = (0..=m)
        .map(|k| {
            let exact_cdf = dist.cdf(k);
            let union_bound = bounds::permutation_union_bound(n as u64, m as u64, k as u64)
                .expect("k <= m and n >= 1 by construction");
            let cap = union_bound.min(1.0);
            Lemma21Row { k, exact_cdf, union_bound, holds: exact_cdf <= cap * (1.0 + LEMMA21_REL_TOL) }
        })
        .collect();
    let passed = rows.iter().all(|r| r.holds);
    Ok(Lemma21Report { n, m, configurations: dist.total, rows, passed })
}

impl Lemma21Report {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "lemma21 n={} m={} configurations={}\n{:>4} {:>14} {:>14} {:>14}  ok\n",
            self.n, self.m, self.configurations, "k", "Pr(Y*<=k)", "n!Pr(Y<=k)", "min(1,bound)"
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:>4} {:>14.10} {:>14.6e} {:>14.10}  {}\n",
                r.k,
                r.exact_cdf,
                r.union_bound,
                r.union_bound.min(1.0),
                if r.holds { "yes" } else { "NO" }
            ));
        }
        s.push_str(if self.passed { "PASS\n" } else { "FAIL\n" });
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Thm31Report {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub bound: f64,
    pub failure_cap: f64,
    pub violations: usize,
    pub ystar_min: usize,
    pub ystar_mean: f64,
    pub passed: bool,
}

impl Thm31Report {
    pub fn violation_rate(&self) -> f64 {
        self.violations as f64 / self.trials as f64
    }

    pub fn to_text(&self) -> String {
        format!(
            "thm31 n={} m={} trials={}\nbound           {:.6}\nfailure_cap     {:.6e}\nystar_min       {}\nystar_mean      {:.4}\nviolations      {}\nviolation_rate  {:.6e}\n{}\n",
            self.n,
            self.m,
            self.trials,
            self.bound,
            self.failure_cap,
            self.ystar_min,
            self.ystar_mean,
            self.violations,
            self.violation_rate(),
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Samples `trials` G(n,M) graphs, solves each exactly, and counts `Y* < bound`.
pub fn verify_thm31_montecarlo(
    n: usize,
    m: usize,
    trials: usize,
    seed: Seed,
    budget: &SolverBudget,
) -> Result<Thm31Report, ExperimentError> {
    if n > budget.exact_vertex_limit {
        return Err(SolverError::TooLarge { n, limit: budget.exact_vertex_limit }.into());
    }
    if trials == 0 {
        return Err(ExperimentError::InvalidConfig("trials must be at least 1".into()));
    }
    let lb = bounds::theorem31_lower_bound(n as u64, m as f64)?;
    let spec = ModelSpec::Gnm { n, m };
    spec.validate()?;
    let ys: Vec<usize> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let g = spec.sample_trial(seed, i)?;
            Ok(solvers::solve_exact_dp(&g, budget)?.feedback_count)
        })
        .collect::<Result<_, ExperimentError>>()?;
    let violations = ys.iter().filter(|&&y| (y as f64) < lb.bound).count();
    Ok(Thm31Report {
        n,
        m,
        trials,
        bound: lb.bound,
        failure_cap: lb.failure_prob,
        violations,
        ystar_min: ys.iter().copied().min().unwrap_or(0),
        ystar_mean: ys.iter().sum::<usize>() as f64 / trials as f64,
        passed: violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configuration_counts() {
        assert_eq!(configuration_count(4, 4), 240);
        assert_eq!(configuration_count(4, 5), 192);
        assert_eq!(configuration_count(3, 3), 8);
        assert_eq!(configuration_count(5, 0), 1);
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut c = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut c, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
    }

    #[test]
    fn triangle_distribution() {
        let d = empirical_ystar_distribution(3, 3).unwrap();
        assert_eq!(d.total, 8);
        assert_eq!(d.counts.get(&0), Some(&6));
        assert_eq!(d.counts.get(&1), Some(&2));
        let one = empirical_ystar_distribution(3, 1).unwrap();
        assert_eq!(one.pmf(0), 1.0);
        let empty = empirical_ystar_distribution(4, 0).unwrap();
        assert_eq!(empty.total, 1);
    }

    #[test]
    fn guard_rejects_large_enumerations() {
        assert!(matches!(
            empirical_ystar_distribution(8, 10),
            Err(ExperimentError::TooManyConfigurations(_))
        ));
        assert!(empirical_ystar_distribution(3, 4).is_err());
    }

    #[test]
    fn p_grid_is_clean() {
        let ps = SweepVariable::p_values(0.1, 1.0, 0.1);
        assert_eq!(ps.len(), 10);
        assert_eq!(ps[2], 0.3);
        assert_eq!(ps[9], 1.0);
    }

    #[test]
    fn bad_sweeps_are_rejected() {
        let cfg = SweepConfig {
            model: ModelTemplate { kind: ModelKind::ErNp, n: 10, m: None, p: None },
            sweep: SweepVariable::N { start: 5, end: 10, step: 1 },
            trials: 3,
            seed: Seed(0),
            budget: SolverBudget::default(),
            jobs: 1,
        };
        assert!(cfg.points().is_err());
        let cfg = SweepConfig { trials: 0, ..cfg };
        assert!(cfg.points().is_err());
    }

    #[test]
    fn thm31_rejects_large_n() {
        let r = verify_thm31_montecarlo(30, 100, 1, Seed(0), &SolverBudget::default());
        assert!(matches!(r, Err(ExperimentError::Solver(SolverError::TooLarge { .. }))));
    }
}
