//! Empirical ROC curves, histograms and curve comparisons.

use std::fmt;
use std::str::FromStr;

use crate::detectors::DetectorKind;
use crate::disttheory::{self, RocPoint};
use crate::plan::SimulationPlan;
use crate::{Error, Result};

/// Strictly increasing false-alarm probabilities in `(0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PfaGrid(Vec<f64>);

impl PfaGrid {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("p_fa grid"));
        }
        values.sort_by(f64::total_cmp);
        values.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        if let Some(bad) = values.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(Error::param(format!("p_fa grid values must lie in (0, 1), got {bad}")));
        }
        Ok(Self(values))
    }

    /// Grid values exactly as given; they must already be strictly increasing.
    pub fn from_strict(values: Vec<f64>) -> Result<Self> {
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::param("p_fa grid must be strictly increasing"));
        }
        Self::new(values)
    }

    /// `count` log-spaced points on `[lo, hi)`.
    pub fn log(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && count > 0) {
            return Err(Error::param("log grid needs 0 < lo < hi and count > 0"));
        }
        let ratio = (hi / lo).ln();
        Self::new(
            (0..count)
                .map(|i| lo * (ratio * i as f64 / count as f64).exp())
                .collect(),
        )
    }

    /// `count` evenly spaced points on `[lo, hi]`.
    pub fn linear(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(hi >= lo && count > 0) {
            return Err(Error::param("linear grid needs lo <= hi and count > 0"));
        }
        if count == 1 {
            return Self::new(vec![lo]);
        }
        let step = (hi - lo) / (count - 1) as f64;
        Self::new((0..count).map(|i| lo + step * i as f64).collect())
    }

    /// 50 log-spaced points on `[1e-3, 1)` merged with `0.1, 0.2, ..., 0.9`.
    pub fn default_grid() -> Self {
        let mut values = Self::log(1e-3, 1.0, 50).expect("valid").0;
        values.extend((1..=9).map(|i| i as f64 / 10.0));
        Self::new(values).expect("valid")
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Restricts the grid to `[lo, hi]`.
    pub fn within(&self, lo: f64, hi: f64) -> Result<Self> {
        Self::new(self.0.iter().copied().filter(|p| (lo..=hi).contains(p)).collect())
    }
}

impl Default for PfaGrid {
    fn default() -> Self {
        Self::default_grid()
    }
}

/// Parses `log:LO:HI:COUNT`, `lin:LO:HI:COUNT`, `list:P1,P2,...` or `default`.
/// Several specs may be joined with `+` and are merged.
impl FromStr for PfaGrid {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let mut values = Vec::new();
        for part in spec.split('+') {
            let part = part.trim();
            let bad = |msg: &str| Error::parse(format!("grid `{part}`"), msg.to_string());
            let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(&e.to_string()));
            let grid = match part.split_once(':') {
                None if part == "default" => PfaGrid::default_grid(),
                Some(("list", rest)) => PfaGrid::new(rest.split(',').map(num).collect::<Result<_>>()?)?,
                Some((kind @ ("log" | "lin"), rest)) => {
                    let fields: Vec<&str> = rest.split(':').collect();
                    let [lo, hi, count] = fields[..] else {
                        return Err(bad("expected LO:HI:COUNT"));
                    };
                    let count = count.trim().parse::<usize>().map_err(|e| bad(&e.to_string()))?;
                    if kind == "log" {
                        PfaGrid::log(num(lo)?, num(hi)?, count)?
                    } else {
                        PfaGrid::linear(num(lo)?, num(hi)?, count)?
                    }
                }
                _ => return Err(bad("expected log:, lin:, list: or default")),
            };
            values.extend(grid.0);
        }
        Self::new(values)
    }
}

/// Detector scores under the null (target absent) and alternative (present).
#[derive(Clone, Debug, PartialEq)]
pub struct ScorePair {
    h0: Vec<f64>,
    h1: Vec<f64>,
}

impl ScorePair {
    pub fn new(h0: Vec<f64>, h1: Vec<f64>) -> Result<Self> {
        if h0.is_empty() {
            return Err(Error::EmptyInput("null scores"));
        }
        if h1.is_empty() {
            return Err(Error::EmptyInput("alternative scores"));
        }
        if h0.iter().chain(&h1).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("scores must be finite".into()));
        }
        Ok(Self { h0, h1 })
    }

    pub fn h0(&self) -> &[f64] {
        &self.h0
    }

    pub fn h1(&self) -> &[f64] {
        &self.h1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RocSource {
    Empirical,
    /// Asymptotic likelihood-ratio curve (Marcum Q).
    TheoryLr,
    /// Gaussian large-`n` approximation for D1.
    TheoryD1,
}

impl RocSource {
    /// The theoretical curve matching a detector.
    pub fn theory_for(kind: DetectorKind) -> Self {
        match kind {
            DetectorKind::LrExact | DetectorKind::LrApprox => RocSource::TheoryLr,
            DetectorKind::D1 => RocSource::TheoryD1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RocSource::Empirical => "empirical",
            RocSource::TheoryLr => "theory (asymptotic LR)",
            RocSource::TheoryD1 => "theory (Gaussian approximation)",
        }
    }
}

impl fmt::Display for RocSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    /// Points with strictly increasing `p_fa`.
    pub points: Vec<RocPoint>,
    pub source: RocSource,
    pub plan: Option<SimulationPlan>,
}

impl RocCurve {
    pub fn p_fa(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.p_fa).collect()
    }

    pub fn p_d(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.p_d).collect()
    }

    /// `p_d` at the grid point equal to `p_fa`, if present.
    pub fn p_d_at(&self, p_fa: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| (p.p_fa - p_fa).abs() <= 1e-12 * p_fa)
            .map(|p| p.p_d)
    }

    pub fn with_plan(mut self, plan: SimulationPlan) -> Self {
        self.plan = Some(plan);
        self
    }
}

/// Index `k` such that `sorted[k - 1]` is the empirical `(1 - p_fa)` quantile.
fn quantile_rank(len: usize, p_fa: f64) -> usize {
    let m = len as f64;
    // The small offset keeps exact products like 1e6 * 0.9 from rounding up.
    let k = ((1.0 - p_fa) * m - 1e-9).ceil() as usize;
    k.clamp(1, len)
}

/// Empirical ROC by exact sorting.
///
/// For each `p_fa` the threshold is the empirical `(1 - p_fa)` quantile of the
/// null scores and `p_d` is the fraction of alternative scores strictly above
/// it, so ties count as non-detections.
pub fn empirical_roc(scores: &ScorePair, grid: &PfaGrid) -> Result<RocCurve> {
    let mut h0 = scores.h0.clone();
    let mut h1 = scores.h1.clone();
    h0.sort_by(f64::total_cmp);
    h1.sort_by(f64::total_cmp);
    let points = grid
        .values()
        .iter()
        .map(|&p_fa| {
            let threshold = h0[quantile_rank(h0.len(), p_fa) - 1];
            let below = h1.partition_point(|v| *v <= threshold);
            RocPoint {
                p_fa,
                p_d: (h1.len() - below) as f64 / h1.len() as f64,
            }
        })
        .collect();
    Ok(RocCurve {
        points,
        source: RocSource::Empirical,
        plan: None,
    })
}

/// Theoretical ROC on a grid.
pub fn theory_roc(source: RocSource, rho: f64, n: u64, grid: &PfaGrid) -> Result<RocCurve> {
    let point = match source {
        RocSource::TheoryLr => disttheory::roc_theory_lr,
        RocSource::TheoryD1 => disttheory::roc_theory_d1,
        RocSource::Empirical => return Err(Error::param("empirical curves need scores")),
    };
    let points = grid.values().iter().map(|&p| point(rho, n, p)).collect::<Result<_>>()?;
    Ok(RocCurve {
        points,
        source,
        plan: None,
    })
}

/// Largest absolute `p_d` difference between two curves on the same grid.
pub fn roc_deviation(a: &RocCurve, b: &RocCurve) -> Result<f64> {
    if a.points.len() != b.points.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} points",
            a.points.len(),
            b.points.len()
        )));
    }
    a.points.iter().zip(&b.points).try_fold(0.0f64, |acc, (x, y)| {
        if (x.p_fa - y.p_fa).abs() > 1e-9 * x.p_fa.abs().max(y.p_fa.abs()) {
            return Err(Error::GridMismatch(format!("p_fa {} vs {}", x.p_fa, y.p_fa)));
        }
        Ok(acc.max((x.p_d - y.p_d).abs()))
    })
}

/// Uniform-width histogram normalized as a probability density.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    /// Scores outside an explicitly requested range; zero for data-derived ranges.
    pub outside: u64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }
}

/// Bins `scores` into `bins` equal-width bins over `range`, or over the data's
/// own `[min, max]` when no range is given (widened by 0.5 on each side if all
/// scores are equal). With an explicit range, scores outside it are counted in
/// [`Histogram::outside`] and the density is normalized over the rest.
pub fn histogram(scores: &[f64], bins: usize, range: Option<(f64, f64)>) -> Result<Histogram> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("scores"));
    }
    if bins == 0 {
        return Err(Error::param("histogram needs at least one bin"));
    }
    if scores.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("scores must be finite"));
    }
    let (lo, hi) = match range {
        Some((lo, hi)) => {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::param(format!("histogram range [{lo}, {hi}] has no width")));
            }
            (lo, hi)
        }
        None => {
            let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        }
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut outside = 0;
    for &v in scores {
        if v < lo || v > hi {
            outside += 1;
            continue;
        }
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let inside: u64 = counts.iter().sum();
    let bin_edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + width * i as f64 })
        .collect();
    let density = counts
        .iter()
        .zip(bin_edges.windows(2))
        .map(|(&c, e)| {
            if inside == 0 {
                0.0
            } else {
                c as f64 / (inside as f64 * (e[1] - e[0]))
            }
        })
        .collect();
    Ok(Histogram {
        bin_edges,
        counts,
        density,
        outside,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(values: &[f64]) -> PfaGrid {
        PfaGrid::new(values.to_vec()).unwrap()
    }

    #[test]
    fn identical_hypotheses_give_diagonal() {
        let scores: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64 * 0.37).collect();
        let pair = ScorePair::new(scores.clone(), scores.clone()).unwrap();
        let g = PfaGrid::default_grid();
        let roc = empirical_roc(&pair, &g).unwrap();
        for pt in &roc.points {
            assert!((pt.p_d - pt.p_fa).abs() <= 1.0 / 1000.0 + 1e-12, "{pt:?}");
        }
    }

    #[test]
    fn separated_hypotheses_give_perfect_detection() {
        let pair = ScorePair::new(vec![0.0, 1.0, 2.0], vec![2.5, 3.0]).unwrap();
        let roc = empirical_roc(&pair, &grid(&[0.01, 0.5, 0.99])).unwrap();
        assert!(roc.points.iter().all(|p| p.p_d == 1.0));
    }

    #[test]
    fn ties_count_as_non_detection() {
        let pair = ScorePair::new(vec![1.0; 10], vec![1.0; 10]).unwrap();
        let roc = empirical_roc(&pair, &grid(&[0.1, 0.9])).unwrap();
        assert!(roc.points.iter().all(|p| p.p_d == 0.0));
    }

    #[test]
    fn empty_and_bad_inputs() {
        assert!(ScorePair::new(vec![], vec![1.0]).is_err());
        assert!(ScorePair::new(vec![1.0], vec![]).is_err());
        assert!(ScorePair::new(vec![f64::NAN], vec![1.0]).is_err());
        assert!(PfaGrid::new(vec![0.0, 0.5]).is_err());
        assert!(PfaGrid::new(vec![0.5, 1.0]).is_err());
        assert!(PfaGrid::from_strict(vec![0.5, 0.1]).is_err());
        assert!(PfaGrid::new(vec![]).is_err());
    }

    #[test]
    fn grid_specs() {
        let g: PfaGrid = "log:1e-3:1:50".parse().unwrap();
        assert_eq!(g.len(), 50);
        assert!((g.values()[0] - 1e-3).abs() < 1e-18);
        assert!(*g.values().last().unwrap() < 1.0);
        let g: PfaGrid = "lin:0.1:0.9:9".parse().unwrap();
        assert_eq!(g.len(), 9);
        let g: PfaGrid = "list:0.5,0.1 + list:0.1,0.2".parse().unwrap();
        assert_eq!(g.values(), &[0.1, 0.2, 0.5]);
        let d: PfaGrid = "default".parse().unwrap();
        assert_eq!(d, PfaGrid::default_grid());
        assert_eq!(d.len(), 59);
        assert!("log:1e-3:1".parse::<PfaGrid>().is_err());
        assert!("cubic:1:2:3".parse::<PfaGrid>().is_err());
        assert!("list:0.1,abc".parse::<PfaGrid>().is_err());
    }

    #[test]
    fn deviation_examples() {
        let g = grid(&[0.1, 0.5]);
        let diag = theory_roc(RocSource::TheoryLr, 0.0, 10, &g).unwrap();
        assert_eq!(roc_deviation(&diag, &diag).unwrap(), 0.0);
        let perfect = RocCurve {
            points: g.values().iter().map(|&p_fa| RocPoint { p_fa, p_d: 1.0 }).collect(),
            source: RocSource::Empirical,
            plan: None,
        };
        assert!((roc_deviation(&diag, &perfect).unwrap() - 0.9).abs() < 1e-12);
        let other = theory_roc(RocSource::TheoryLr, 0.0, 10, &grid(&[0.1, 0.6])).unwrap();
        assert!(matches!(roc_deviation(&diag, &other), Err(Error::GridMismatch(_))));
        let short = theory_roc(RocSource::TheoryLr, 0.0, 10, &grid(&[0.1])).unwrap();
        assert!(matches!(roc_deviation(&diag, &short), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn histogram_single_score() {
        let h = histogram(&[1.0], 1, None).unwrap();
        assert_eq!(h.counts, vec![1]);
        assert!((h.density[0] - 1.0 / h.bin_width()).abs() < 1e-15);
        let h = histogram(&[1.0], 1, Some((0.0, 4.0))).unwrap();
        assert_eq!(h.density, vec![0.25]);
    }

    #[test]
    fn histogram_errors_and_outside() {
        assert!(histogram(&[], 3, None).is_err());
        assert!(histogram(&[1.0], 0, None).is_err());
        assert!(histogram(&[1.0], 3, Some((2.0, 2.0))).is_err());
        let h = histogram(&[-1.0, 0.5, 1.0, 3.0], 2, Some((0.0, 1.0))).unwrap();
        assert_eq!(h.counts, vec![0, 2]);
        assert_eq!(h.outside, 2);
    }

    proptest! {
        #[test]
        fn histogram_normalization(xs in prop::collection::vec(-1e3f64..1e3, 1..500), bins in 1usize..64) {
            let h = histogram(&xs, bins, None).unwrap();
            prop_assert_eq!(h.total(), xs.len() as u64);
            let integral: f64 = h.density.iter().zip(h.bin_edges.windows(2)).map(|(d, e)| d * (e[1] - e[0])).sum();
            prop_assert!((integral - 1.0).abs() < 1e-12);
            prop_assert!(h.bin_edges.windows(2).all(|e| e[0] < e[1]));
        }

        #[test]
        fn roc_is_rank_invariant(
            h0 in prop::collection::vec(-5.0f64..5.0, 1..200),
            h1 in prop::collection::vec(-5.0f64..5.0, 1..200),
            shift in 0.0f64..3.0,
        ) {
            let g = PfaGrid::default_grid();
            let base = empirical_roc(&ScorePair::new(h0.clone(), h1.clone()).unwrap(), &g).unwrap();
            let f = |x: &f64| (0.7 * x).exp() + 3.0;
            let mapped = ScorePair::new(h0.iter().map(f).collect(), h1.iter().map(f).collect()).unwrap();
            prop_assert_eq!(&base.points, &empirical_roc(&mapped, &g).unwrap().points);

            let shifted = ScorePair::new(h0.clone(), h1.iter().map(|v| v + shift).collect()).unwrap();
            let up = empirical_roc(&shifted, &g).unwrap();
            for (a, b) in base.points.iter().zip(&up.points) {
                prop_assert!(b.p_d >= a.p_d);
            }
            prop_assert!(base.points.windows(2).all(|w| w[0].p_fa < w[1].p_fa && w[0].p_d <= w[1].p_d));
        }
    }
}
