//! Likelihood-ratio, approximate likelihood-ratio and D1 detectors.
//!
//! All three work on the standardized model (`sigma1 = sigma2 = 1`, `phi = 0`)
//! whose log-likelihood for `n` samples is
//!
//! ```text
//! l(rho) = -(n/2) [ (P - 2 D rho) / (1 - rho^2) + 2 ln(1 - rho^2) + 4 ln(2 pi) ]
//! ```
//!
//! with `P` and `D` the sample means of `P_tot` and `D1`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::cubic;
use crate::sigmodel::SufficientStats;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DetectorKind {
    /// Exact likelihood ratio at the maximum-likelihood `rho`.
    #[default]
    LrExact,
    /// Small-`rho` truncation `n D^2 / (P - 2)`.
    LrApprox,
    /// The mean cross-correlation `D` itself.
    D1,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 3] = [DetectorKind::LrExact, DetectorKind::LrApprox, DetectorKind::D1];

    /// Name used on the command line and in CSV headers.
    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::LrExact => "lr",
            DetectorKind::LrApprox => "lr-approx",
            DetectorKind::D1 => "d1",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lr" | "lr-exact" => Ok(DetectorKind::LrExact),
            "lr-approx" => Ok(DetectorKind::LrApprox),
            "d1" => Ok(DetectorKind::D1),
            other => Err(Error::param(format!("unknown detector `{other}`"))),
        }
    }
}

/// Test statistic from one trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorScore {
    pub value: f64,
    pub kind: DetectorKind,
    /// Estimated correlation, for the likelihood-ratio detectors.
    pub rho_hat: Option<f64>,
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("rho must lie in (-1, 1), got {rho}")))
    }
}

/// `(P - 2 D rho) / (1 - rho^2) + 2 ln(1 - rho^2)`; `l = -(n/2) (this + 4 ln 2pi)`.
fn neg_scaled_ll(p: f64, d: f64, rho: f64) -> f64 {
    let one_minus = 1.0 - rho * rho;
    (p - 2.0 * d * rho) / one_minus + 2.0 * (-rho * rho).ln_1p()
}

/// Log-likelihood of the standardized model at correlation `rho`.
pub fn log_likelihood(stats: &SufficientStats, rho: f64) -> Result<f64> {
    stats.validate()?;
    check_rho(rho)?;
    let n = stats.n as f64;
    Ok(-0.5 * n * (neg_scaled_ll(stats.p_tot_bar, stats.d1_bar, rho) + 4.0 * (2.0 * PI).ln()))
}

/// Closed-form `dl/drho = n (D - (P - 2) rho + D rho^2 - 2 rho^3) / (1 - rho^2)^2`.
pub fn log_likelihood_derivative(stats: &SufficientStats, rho: f64) -> Result<f64> {
    stats.validate()?;
    check_rho(rho)?;
    let (p, d) = (stats.p_tot_bar, stats.d1_bar);
    let n = stats.n as f64;
    Ok(n * stationarity(p, d, rho) / (1.0 - rho * rho).powi(2))
}

fn stationarity(p: f64, d: f64, rho: f64) -> f64 {
    d - (p - 2.0) * rho + d * rho * rho - 2.0 * rho.powi(3)
}

const FALLBACK_BOUND: f64 = 0.999_999;

/// Maximum-likelihood estimate of `rho` over the open interval `(-1, 1)`.
///
/// Every real root of the stationarity cubic
/// `D - (P - 2) rho + D rho^2 - 2 rho^3 = 0` inside the interval is a
/// candidate; the one with the largest likelihood wins. The estimate is not
/// constrained to be nonnegative, so its sign follows the sign of `D`.
pub fn ml_rho(stats: &SufficientStats) -> Result<f64> {
    stats.validate()?;
    let (p, d) = (stats.p_tot_bar, stats.d1_bar);
    if p <= 0.0 {
        return Err(Error::InvalidStats("p_tot_bar must be positive".into()));
    }
    let best = cubic::real_roots(-2.0, d, 2.0 - p, d)
        .into_iter()
        .filter(|r| r.is_finite() && r.abs() < 1.0)
        .map(|r| (r, neg_scaled_ll(p, d, r)))
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1));
    Ok(match best {
        Some((rho, _)) => rho,
        None => golden_section_min(|r| neg_scaled_ll(p, d, r), -FALLBACK_BOUND, FALLBACK_BOUND),
    })
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-15 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Exact likelihood-ratio detector `-2 [l(0) - l(rho_hat)]`.
pub fn lr_detector(stats: &SufficientStats) -> Result<DetectorScore> {
    let rho = ml_rho(stats)?;
    Ok(DetectorScore {
        value: lr_value(stats, rho),
        kind: DetectorKind::LrExact,
        rho_hat: Some(rho),
    })
}

fn lr_value(stats: &SufficientStats, rho: f64) -> f64 {
    let (p, d) = (stats.p_tot_bar, stats.d1_bar);
    let r2 = rho * rho;
    let v = stats.n as f64 * ((2.0 * d * rho - p * r2) / (1.0 - r2) - 2.0 * (-r2).ln_1p());
    // Nonnegative at the maximizer; only rounding can push it below zero.
    v.max(0.0)
}

/// Linearized estimate `D / (P - 2)`, unclamped.
pub fn ml_rho_approx(stats: &SufficientStats) -> Result<f64> {
    stats.validate()?;
    let denom = stats.p_tot_bar - 2.0;
    if denom == 0.0 {
        return Err(Error::Validity(
            "p_tot_bar = 2 makes the approximate estimate degenerate".into(),
        ));
    }
    Ok(stats.d1_bar / denom)
}

/// Approximate likelihood-ratio detector `n D^2 / (P - 2)`, valid only for
/// `P > 2`.
pub fn lr_detector_approx(stats: &SufficientStats) -> Result<DetectorScore> {
    stats.validate()?;
    let denom = stats.p_tot_bar - 2.0;
    if !(denom > 0.0) {
        return Err(Error::Validity(format!(
            "approximate LR detector requires p_tot_bar > 2, got {}",
            stats.p_tot_bar
        )));
    }
    let d = stats.d1_bar;
    Ok(DetectorScore {
        value: stats.n as f64 * d * d / denom,
        kind: DetectorKind::LrApprox,
        rho_hat: Some(d / denom),
    })
}

pub fn d1_detector(stats: &SufficientStats) -> DetectorScore {
    DetectorScore {
        value: stats.d1_bar,
        kind: DetectorKind::D1,
        rho_hat: None,
    }
}

/// Evaluates the detector of the given kind.
pub fn score(kind: DetectorKind, stats: &SufficientStats) -> Result<DetectorScore> {
    match kind {
        DetectorKind::LrExact => lr_detector(stats),
        DetectorKind::LrApprox => lr_detector_approx(stats),
        DetectorKind::D1 => {
            stats.validate()?;
            Ok(d1_detector(stats))
        }
    }
}
