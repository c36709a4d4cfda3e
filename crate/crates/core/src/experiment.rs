//! Seeded Monte Carlo experiments: score simulation, ROC tables, detector
//! comparisons and histograms.
//!
//! Trial `t` under hypothesis `h` always draws from the stream keyed by
//! `(derive_seed(seed, h), t)`, and scores are gathered in trial order, so the
//! output is bit-identical for any worker count.

use rayon::prelude::*;

use crate::detectors::{self, DetectorKind};
use crate::disttheory;
use crate::plan::{Hypothesis, SimulationPlan};
use crate::rng::{derive_seed, TrialStreams};
use crate::rocgen::{self, Histogram, PfaGrid, RocCurve, RocSource, ScorePair};
use crate::sigmodel::{self, StatsSampler};
use crate::{Error, Result};

const COMPARE_TAG: u64 = 0x1000;

/// What the approximate detector does on a trial with `P_tot <= 2`, where it
/// is undefined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InvalidApprox {
    /// Score the trial with the exact detector.
    #[default]
    Fallback,
    /// Abort the run with a validity error.
    Reject,
    /// Score the trial 0, the detector's minimum, so it never crosses a
    /// threshold.
    Miss,
}

impl InvalidApprox {
    pub fn name(self) -> &'static str {
        match self {
            InvalidApprox::Fallback => "fallback",
            InvalidApprox::Reject => "error",
            InvalidApprox::Miss => "miss",
        }
    }
}

impl std::str::FromStr for InvalidApprox {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fallback" => Ok(InvalidApprox::Fallback),
            "error" | "reject" => Ok(InvalidApprox::Reject),
            "miss" => Ok(InvalidApprox::Miss),
            other => Err(Error::parse(
                "invalid-approx policy",
                format!("unknown policy `{other}`"),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub invalid_approx: InvalidApprox,
}

impl RunOptions {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers: Some(workers),
            ..Self::default()
        }
    }

    fn install<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(job()),
            Some(0) => Err(Error::param("workers must be at least 1")),
            Some(w) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build()
                    .map_err(|e| Error::param(e.to_string()))?;
                Ok(pool.install(job))
            }
        }
    }
}

/// Scores from one batch of trials.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreRun {
    pub scores: Vec<f64>,
    /// Trials where the approximate detector was undefined (`P_tot <= 2`).
    pub fallbacks: u64,
}

/// Simulates `plan.trials` detector outputs under `hypothesis`.
pub fn simulate(plan: &SimulationPlan, hypothesis: Hypothesis, opts: &RunOptions) -> Result<ScoreRun> {
    plan.validate()?;
    let sampler = StatsSampler::new(&plan.params(hypothesis), plan.n)?;
    let streams = TrialStreams::new(derive_seed(plan.seed, hypothesis.stream_tag()));
    let detector = plan.detector;
    let policy = opts.invalid_approx;

    let trial = |t: u64| -> Result<(f64, bool)> {
        let stats = sampler.sample(&mut streams.trial(t));
        match detectors::score(detector, &stats) {
            Ok(s) => Ok((s.value, false)),
            Err(Error::Validity(_)) if detector == DetectorKind::LrApprox => match policy {
                InvalidApprox::Fallback => Ok((detectors::lr_detector(&stats)?.value, true)),
                InvalidApprox::Miss => Ok((0.0, true)),
                InvalidApprox::Reject => Err(Error::Validity(format!(
                    "trial {t}: approximate LR detector needs p_tot_bar > 2, got {}",
                    stats.p_tot_bar
                ))),
            },
            Err(e) => Err(e),
        }
    };
    let results: Vec<(f64, bool)> =
        opts.install(|| (0..plan.trials).into_par_iter().map(trial).collect::<Result<_>>())??;
    let fallbacks = results.iter().filter(|r| r.1).count() as u64;
    Ok(ScoreRun {
        scores: results.into_iter().map(|r| r.0).collect(),
        fallbacks,
    })
}

/// Null and alternative scores for one plan.
pub fn simulate_pair(plan: &SimulationPlan, opts: &RunOptions) -> Result<(ScorePair, u64)> {
    let h0 = simulate(plan, Hypothesis::Null, opts)?;
    let h1 = simulate(plan, Hypothesis::Alternative, opts)?;
    Ok((ScorePair::new(h0.scores, h1.scores)?, h0.fallbacks + h1.fallbacks))
}

/// Named `p_d` columns over one shared `p_fa` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RocTable {
    pub grid: PfaGrid,
    pub columns: Vec<(String, RocCurve)>,
    pub fallbacks: u64,
}

impl RocTable {
    pub fn column(&self, name: &str) -> Option<&RocCurve> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    /// Largest absolute difference between two named columns.
    pub fn deviation(&self, a: &str, b: &str) -> Result<f64> {
        let missing = |n: &str| Error::param(format!("no column `{n}`"));
        rocgen::roc_deviation(
            self.column(a).ok_or_else(|| missing(a))?,
            self.column(b).ok_or_else(|| missing(b))?,
        )
    }
}

/// Empirical ROC of one plan, optionally next to its theoretical curve.
///
/// Columns are `pd_empirical` and, with `theory`, `pd_theory` (the asymptotic
/// LR curve for the LR detectors, the Gaussian approximation for D1).
pub fn roc_experiment(plan: &SimulationPlan, grid: &PfaGrid, theory: bool, opts: &RunOptions) -> Result<RocTable> {
    let (pair, fallbacks) = simulate_pair(plan, opts)?;
    let mut columns = vec![(
        "pd_empirical".to_string(),
        rocgen::empirical_roc(&pair, grid)?.with_plan(plan.clone()),
    )];
    if theory {
        let source = RocSource::theory_for(plan.detector);
        columns.push((
            "pd_theory".to_string(),
            rocgen::theory_roc(source, plan.rho, plan.n, grid)?.with_plan(plan.clone()),
        ));
    }
    Ok(RocTable {
        grid: grid.clone(),
        columns,
        fallbacks,
    })
}

/// Empirical ROC curves of several plans on one grid, one `pd_<detector>`
/// column per plan (suffixed with the plan index when names repeat).
///
/// Plan `i` runs with seed `derive_seed(plan.seed, COMPARE_TAG + i)`. Plans
/// must share `n` and `rho` unless `allow_mixed` is set.
pub fn compare_experiment(
    plans: &[SimulationPlan],
    grid: &PfaGrid,
    allow_mixed: bool,
    theory: bool,
    opts: &RunOptions,
) -> Result<RocTable> {
    if plans.len() < 2 {
        return Err(Error::param("compare needs at least two plans"));
    }
    if !allow_mixed {
        let first = &plans[0];
        if let Some(other) = plans.iter().find(|p| p.n != first.n || p.rho != first.rho) {
            return Err(Error::param(format!(
                "plans differ in n/rho ({}/{} vs {}/{}); pass allow-mixed to compare anyway",
                first.n, first.rho, other.n, other.rho
            )));
        }
    }
    let mut columns = Vec::new();
    let mut fallbacks = 0;
    for (i, plan) in plans.iter().enumerate() {
        let mut seeded = plan.clone();
        seeded.seed = derive_seed(plan.seed, COMPARE_TAG + i as u64);
        let (pair, fb) = simulate_pair(&seeded, opts)?;
        fallbacks += fb;
        let repeated = plans.iter().filter(|p| p.detector == plan.detector).count() > 1;
        let name = if repeated {
            format!("pd_{}_{}", plan.detector, i + 1)
        } else {
            format!("pd_{}", plan.detector)
        };
        columns.push((
            name.clone(),
            rocgen::empirical_roc(&pair, grid)?.with_plan(plan.clone()),
        ));
        if theory {
            let source = RocSource::theory_for(plan.detector);
            columns.push((
                format!("{name}_theory"),
                rocgen::theory_roc(source, plan.rho, plan.n, grid)?.with_plan(plan.clone()),
            ));
        }
    }
    Ok(RocTable {
        grid: grid.clone(),
        columns,
        fallbacks,
    })
}

/// A histogram of simulated scores with the bin-averaged theoretical density.
#[derive(Clone, Debug, PartialEq)]
pub struct HistTable {
    pub histogram: Histogram,
    pub pdf_theory: Vec<f64>,
    pub theory_label: String,
    pub fallbacks: u64,
}

/// Histogram of scores at the plan's `rho`. The overlay is noncentral
/// `chi2_1(2 n rho^2)` for the LR detectors and the Gaussian approximation
/// for D1.
pub fn hist_experiment(
    plan: &SimulationPlan,
    bins: usize,
    range: Option<(f64, f64)>,
    opts: &RunOptions,
) -> Result<HistTable> {
    let run = simulate(plan, Hypothesis::Alternative, opts)?;
    let histogram = rocgen::histogram(&run.scores, bins, range)?;
    let (cdf, label): (Box<dyn Fn(f64) -> f64>, String) = match plan.detector {
        DetectorKind::LrExact | DetectorKind::LrApprox => {
            let lambda = disttheory::lr_noncentrality(plan.rho, plan.n);
            (
                Box::new(move |x| disttheory::ncx2_1_cdf(x, lambda)),
                format!("noncentral chi2_1({lambda})"),
            )
        }
        DetectorKind::D1 => {
            let cov = sigmodel::build_covariance(&plan.params(Hypothesis::Alternative))?;
            let (mean, var) = sigmodel::d1_moments(&cov, plan.kind);
            let sd = (var / plan.n as f64).sqrt();
            (
                Box::new(move |x| disttheory::normal_cdf(x, mean, sd)),
                format!("gaussian approximation N({mean}, {sd}^2)"),
            )
        }
    };
    let pdf_theory = histogram
        .bin_edges
        .windows(2)
        .map(|e| (cdf(e[1]) - cdf(e[0])) / (e[1] - e[0]))
        .collect();
    Ok(HistTable {
        histogram,
        pdf_theory,
        theory_label: label,
        fallbacks: run.fallbacks,
    })
}
