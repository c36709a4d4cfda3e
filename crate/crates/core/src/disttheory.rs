//! Large-`n` distributions of the detectors and the theoretical ROC curves.
//!
//! Under the null the likelihood-ratio statistic is asymptotically `chi2_1`;
//! under the alternative it is approximately noncentral `chi2_1(2 n rho^2)`.
//! Both survival functions reduce to complementary error functions.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use libm::erfc;
use statrs::function::erf::erfc_inv;

use crate::{Error, Result};

/// Smallest false-alarm probability accepted by the theoretical curves.
pub const MIN_PFA: f64 = 1e-12;

/// One point of a ROC curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocPoint {
    pub p_fa: f64,
    pub p_d: f64,
}

fn probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// Survival function of `chi2_1`: `erfc(sqrt(t / 2))`.
pub fn chi2_1_survival(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::param(format!("chi2_1 threshold must be >= 0, got {t}")));
    }
    Ok(probability(erfc((0.5 * t).sqrt())))
}

/// Inverse of [`chi2_1_survival`] on `(0, 1]`.
pub fn chi2_1_survival_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!("probability must lie in (0, 1], got {p}")));
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    let x = erfc_inverse(p);
    Ok(2.0 * x.max(0.0).powi(2))
}

/// Solves `erfc(x) = p` for `p` in `(0, 2)`, polishing the library inverse
/// with Newton steps.
fn erfc_inverse(p: f64) -> f64 {
    let mut x = erfc_inv(p);
    for _ in 0..3 {
        let slope = -2.0 / PI.sqrt() * (-x * x).exp();
        if slope == 0.0 || !x.is_finite() {
            break;
        }
        let step = (erfc(x) - p) / slope;
        x -= step;
        if step.abs() <= 1e-17 * x.abs() {
            break;
        }
    }
    x
}

/// Marcum Q function of order 1/2: the survival function of the noncentral
/// `chi2_1` distribution with noncentrality `a^2`, evaluated at `b^2`.
pub fn marcum_q_half(a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::param(format!("Marcum Q arguments must be >= 0, got ({a}, {b})")));
    }
    Ok(probability(
        0.5 * (erfc((b - a) * FRAC_1_SQRT_2) + erfc((b + a) * FRAC_1_SQRT_2)),
    ))
}

/// Fisher information of the standardized model per sample.
pub fn fisher_information(rho: f64) -> Result<f64> {
    if !(rho.abs() < 1.0) {
        return Err(Error::param(format!("rho must lie in (-1, 1), got {rho}")));
    }
    Ok((1.0 - rho).powi(-2) + (1.0 + rho).powi(-2))
}

/// Noncentrality `2 n rho^2` of the asymptotic alternative distribution.
pub fn lr_noncentrality(rho: f64, n: u64) -> f64 {
    2.0 * n as f64 * rho * rho
}

fn check_roc_inputs(rho: f64, n: u64, p_fa: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::param(format!("rho must lie in [0, 1), got {rho}")));
    }
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    if !(p_fa > 0.0 && p_fa < 1.0) {
        return Err(Error::param(format!("p_fa must lie in (0, 1), got {p_fa}")));
    }
    if p_fa < MIN_PFA {
        return Err(Error::param(format!(
            "p_fa below {MIN_PFA:e} is not supported, got {p_fa:e}"
        )));
    }
    Ok(())
}

/// Asymptotic ROC point of the likelihood-ratio detector:
/// `p_d = Q_{1/2}(rho sqrt(2n), sqrt(S^{-1}(p_fa)))`.
pub fn roc_theory_lr(rho: f64, n: u64, p_fa: f64) -> Result<RocPoint> {
    check_roc_inputs(rho, n, p_fa)?;
    let threshold = chi2_1_survival_inv(p_fa)?;
    let p_d = marcum_q_half(rho * (2.0 * n as f64).sqrt(), threshold.sqrt())?;
    Ok(RocPoint { p_fa, p_d })
}

/// Standard normal survival function.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

/// Inverse of [`normal_sf`].
pub fn normal_sf_inv(p: f64) -> f64 {
    SQRT_2 * erfc_inverse(2.0 * p)
}

/// Large-`n` Gaussian approximation of the D1 detector ROC.
///
/// `D1` is treated as normal with mean 0 and variance `2/n` under the null and
/// mean `2 rho`, variance `2 (1 + rho^2) / n` under the alternative. This is a
/// central-limit stand-in, not an exact finite-`n` result.
pub fn roc_theory_d1(rho: f64, n: u64, p_fa: f64) -> Result<RocPoint> {
    check_roc_inputs(rho, n, p_fa)?;
    let n = n as f64;
    let sd0 = (2.0 / n).sqrt();
    let sd1 = (2.0 * (1.0 + rho * rho) / n).sqrt();
    let threshold = sd0 * normal_sf_inv(p_fa);
    Ok(RocPoint {
        p_fa,
        p_d: probability(normal_sf((threshold - 2.0 * rho) / sd1)),
    })
}

/// Density of `chi2_1`.
pub fn chi2_1_pdf(x: f64) -> f64 {
    if x <= 0.0 {
        return if x == 0.0 { f64::INFINITY } else { 0.0 };
    }
    (-0.5 * x).exp() / (2.0 * PI * x).sqrt()
}

/// Density of noncentral `chi2_1` with noncentrality `lambda`.
pub fn ncx2_1_pdf(x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return chi2_1_pdf(x);
    }
    if x <= 0.0 {
        return if x == 0.0 { f64::INFINITY } else { 0.0 };
    }
    let (r, m) = (x.sqrt(), lambda.sqrt());
    // e^{-(x+lambda)/2} cosh(sqrt(lambda x)) without overflow.
    0.5 * ((-0.5 * (r - m).powi(2)).exp() + (-0.5 * (r + m).powi(2)).exp()) / (2.0 * PI * x).sqrt()
}

/// Distribution function of noncentral `chi2_1` with noncentrality `lambda`.
pub fn ncx2_1_cdf(x: f64, lambda: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let (r, m) = (x.sqrt(), lambda.sqrt());
    // P(|Z + m| <= r)
    probability(0.5 * (erfc(-(r - m) * FRAC_1_SQRT_2) - erfc((r + m) * FRAC_1_SQRT_2)))
}

pub fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
}

pub fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    normal_sf(-(x - mean) / sd)
}
