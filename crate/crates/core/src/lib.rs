//! Detectors and ROC machinery for QTMS and noise radar.
//!
//! The received and reference I/Q voltages `[I1, Q1, I2, Q2]` are modelled as a
//! zero-mean Gaussian 4-vector whose covariance is parameterised by the
//! correlation coefficient `rho`. Every detector here consumes only the pair of
//! sufficient statistics `(P_tot, D1)` averaged over `n` samples:
//!
//! - [`detectors::lr_detector`]: the exact likelihood-ratio statistic, using the
//!   maximum-likelihood `rho` found from the stationarity cubic.
//! - [`detectors::lr_detector_approx`]: its small-`rho` truncation `n D1^2 / (P_tot - 2)`.
//! - [`detectors::d1_detector`]: the cross-correlation statistic itself.
//!
//! [`disttheory`] holds the large-`n` distributions and ROC formulas,
//! [`sigmodel`] draws statistics from the Wishart distribution, [`rocgen`]
//! turns score arrays into empirical ROC curves and histograms, and
//! [`experiment`] runs seeded, schedule-independent Monte Carlo experiments.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod csvio;
pub mod cubic;
pub mod detectors;
pub mod disttheory;
mod error;
pub mod experiment;
pub mod plan;
pub mod rng;
pub mod rocgen;
pub mod sigmodel;
pub mod svg;

pub use detectors::{DetectorKind, DetectorScore};
pub use disttheory::RocPoint;
pub use error::{Error, Result};
pub use plan::SimulationPlan;
pub use rocgen::{Histogram, PfaGrid, RocCurve, RocSource, ScorePair};
pub use sigmodel::{CovarianceParams, RadarKind, SufficientStats};
