//! End-to-end sampled evaluation and the α / β parameter sweeps.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index::{tally_trusted, EvalReport, PairTally, Rational};
use crate::label_map::{GroundTruthSet, LabelMap};
use crate::sampler::{window_geometry, AwpsParams, AwpsSampler, WindowGeometry};
use crate::stats::{granularity, Granularity};

/// Environment variable capping the number of evaluation threads.
pub const THREADS_ENV: &str = "SEGEVAL_THREADS";

/// Thread budget for pair evaluation. `Workers::default()` uses rayon's global pool.
#[derive(Debug, Default)]
pub struct Workers {
    pool: Option<rayon::ThreadPool>,
}

impl Workers {
    pub fn with_threads(threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(Error::Parameter("thread count must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Parameter(format!("cannot start {threads} threads: {e}")))?;
        Ok(Self { pool: Some(pool) })
    }

    /// Reads [`THREADS_ENV`]; unset or empty means no cap.
    pub fn from_env() -> Result<Self> {
        match std::env::var(THREADS_ENV) {
            Ok(v) if !v.trim().is_empty() => {
                let n = v.trim().parse::<usize>().map_err(|_| {
                    Error::Parameter(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))
                })?;
                Self::with_threads(n)
            }
            _ => Ok(Self::default()),
        }
    }

    fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }
}

/// Evaluates the full AWPS stream, one anchor row per task.
pub fn evaluate_sampled(
    test: &LabelMap,
    gts: &GroundTruthSet,
    sampler: &AwpsSampler,
    workers: &Workers,
) -> Result<EvalReport> {
    gts.check_matches(test)?;
    if sampler.width() != test.width() || sampler.height() != test.height() {
        return Err(Error::Dimension(format!(
            "sampler covers {}x{}, maps are {}x{}",
            sampler.width(),
            sampler.height(),
            test.width(),
            test.height()
        )));
    }
    let segments: Vec<_> = sampler.segments().collect();
    let tally = workers.install(|| {
        segments
            .par_iter()
            .map(|&s| tally_trusted(test, gts, sampler.segment_pairs(s)))
            .reduce(PairTally::default, |a, b| a + b)
    });
    tally.into_report(gts.len())
}

/// One pass through the whole pipeline at fixed parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AwpsRun {
    pub params: AwpsParams,
    pub granularity: Granularity,
    pub geometry: WindowGeometry,
    pub report: EvalReport,
}

/// Granularity (measured unless pinned) → window geometry → sampling → evaluation.
pub fn run_awps(
    test: &LabelMap,
    gts: &GroundTruthSet,
    params: AwpsParams,
    pinned: Option<Granularity>,
    workers: &Workers,
) -> Result<AwpsRun> {
    gts.check_matches(test)?;
    let g = match pinned {
        Some(g) => g,
        None => granularity(gts)?,
    };
    run_with_granularity(test, gts, params, g, workers)
}

fn run_with_granularity(
    test: &LabelMap,
    gts: &GroundTruthSet,
    params: AwpsParams,
    g: Granularity,
    workers: &Workers,
) -> Result<AwpsRun> {
    let geometry = window_geometry(params, &g);
    let sampler = AwpsSampler::new(geometry, test.width(), test.height())?;
    let report = evaluate_sampled(test, gts, &sampler, workers)?;
    Ok(AwpsRun {
        params,
        granularity: g,
        geometry,
        report,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSweep {
    pub runs: Vec<AwpsRun>,
    /// α with the smallest EPR; ties go to the smaller α.
    pub alpha_m: f64,
    /// α with the largest |RPM|; ties go to the smaller α.
    pub alpha_max_abs_rpm: f64,
}

fn argbest(runs: &[AwpsRun], key: impl Fn(&EvalReport) -> Rational) -> f64 {
    runs.iter()
        .min_by(|a, b| {
            key(&a.report)
                .cmp(&key(&b.report))
                .then(a.params.alpha().total_cmp(&b.params.alpha()))
        })
        .map(|r| r.params.alpha())
        .expect("sweeps always hold at least one run")
}

/// Runs the pipeline for each α with `β = beta_ratio·α`.
pub fn sweep_alpha(
    test: &LabelMap,
    gts: &GroundTruthSet,
    alphas: &[f64],
    beta_ratio: f64,
    pinned: Option<Granularity>,
    workers: &Workers,
) -> Result<AlphaSweep> {
    if alphas.is_empty() {
        return Err(Error::Parameter("alpha list is empty".into()));
    }
    if !(beta_ratio > 0.0 && beta_ratio < 1.0) {
        return Err(Error::Parameter(format!(
            "beta ratio must lie in (0, 1), got {beta_ratio}"
        )));
    }
    gts.check_matches(test)?;
    let g = match pinned {
        Some(g) => g,
        None => granularity(gts)?,
    };
    let runs = alphas
        .iter()
        .map(|&alpha| {
            let params = AwpsParams::new(alpha, beta_ratio * alpha)?;
            run_with_granularity(test, gts, params, g, workers)
        })
        .collect::<Result<Vec<_>>>()?;
    let alpha_m = argbest(&runs, EvalReport::epr);
    // RPM is never positive, so the largest |RPM| is the smallest RPM.
    let alpha_max_abs_rpm = argbest(&runs, EvalReport::rpm);
    Ok(AlphaSweep {
        runs,
        alpha_m,
        alpha_max_abs_rpm,
    })
}

/// Runs the pipeline for each β at fixed α. The pair count of each row is `report.t`.
pub fn sweep_beta(
    test: &LabelMap,
    gts: &GroundTruthSet,
    alpha: f64,
    betas: &[f64],
    pinned: Option<Granularity>,
    workers: &Workers,
) -> Result<Vec<AwpsRun>> {
    if betas.is_empty() {
        return Err(Error::Parameter("beta list is empty".into()));
    }
    let params = betas
        .iter()
        .map(|&beta| AwpsParams::new(alpha, beta))
        .collect::<Result<Vec<_>>>()?;
    gts.check_matches(test)?;
    let g = match pinned {
        Some(g) => g,
        None => granularity(gts)?,
    };
    params
        .into_iter()
        .map(|p| run_with_granularity(test, gts, p, g, workers))
        .collect()
}
