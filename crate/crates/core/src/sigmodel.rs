//! Covariance model of the four voltage processes and sampling of the
//! sufficient statistics `(P_tot, D1)`.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::{Error, Result};

/// Component order of a sample vector.
pub const I1: usize = 0;
pub const Q1: usize = 1;
pub const I2: usize = 2;
pub const Q2: usize = 3;

/// Selects the sign convention of the cross-correlation block.
///
/// `Noise` uses a rotation block and `D1 = I1 I2 + Q1 Q2`; `Qtms` uses a
/// reflection block and `D1 = I1 I2 - Q1 Q2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RadarKind {
    Noise,
    #[default]
    Qtms,
}

impl RadarKind {
    /// Sign applied to the `Q1 Q2` product.
    pub fn quadrature_sign(self) -> f64 {
        match self {
            RadarKind::Noise => 1.0,
            RadarKind::Qtms => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RadarKind::Noise => "noise",
            RadarKind::Qtms => "qtms",
        }
    }
}

impl std::str::FromStr for RadarKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "noise" => Ok(RadarKind::Noise),
            "qtms" => Ok(RadarKind::Qtms),
            other => Err(Error::param(format!("unknown radar kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for RadarKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Amplitudes, phase and correlation of the received/reference pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceParams {
    /// Received-signal amplitude (volts).
    pub sigma1: f64,
    /// Reference-signal amplitude (volts).
    pub sigma2: f64,
    /// Phase shift between the signals (radians).
    pub phi: f64,
    /// Correlation coefficient, `0 <= rho < 1`.
    pub rho: f64,
    pub kind: RadarKind,
}

impl CovarianceParams {
    pub fn new(sigma1: f64, sigma2: f64, phi: f64, rho: f64, kind: RadarKind) -> Result<Self> {
        let params = Self {
            sigma1,
            sigma2,
            phi,
            rho,
            kind,
        };
        params.validate()?;
        Ok(params)
    }

    /// Unit powers, zero phase.
    pub fn standard(rho: f64, kind: RadarKind) -> Result<Self> {
        Self::new(1.0, 1.0, 0.0, rho, kind)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma1.is_finite() && self.sigma1 > 0.0) {
            return Err(Error::param(format!("sigma1 must be positive, got {}", self.sigma1)));
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::param(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        if !self.phi.is_finite() {
            return Err(Error::param("phi must be finite"));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::param(format!("rho must lie in [0, 1), got {}", self.rho)));
        }
        Ok(())
    }

    pub fn with_rho(self, rho: f64) -> Self {
        Self { rho, ..self }
    }
}

/// A 4x4 covariance matrix in `[I1, Q1, I2, Q2]` order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Covariance(pub [[f64; 4]; 4]);

impl Covariance {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// Lower-triangular Cholesky factor, or `None` if the matrix is not
    /// positive definite.
    pub fn cholesky(&self) -> Option<[[f64; 4]; 4]> {
        let a = &self.0;
        let mut l = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..=i {
                let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
                if i == j {
                    let d = a[i][i] - s;
                    if !(d > 0.0) {
                        return None;
                    }
                    l[i][i] = d.sqrt();
                } else {
                    l[i][j] = (a[i][j] - s) / l[j][j];
                }
            }
        }
        Some(l)
    }
}

/// Builds the covariance matrix of `[I1, Q1, I2, Q2]`.
///
/// Diagonal blocks are `sigma1^2 I` and `sigma2^2 I`; the upper off-diagonal
/// block is `rho sigma1 sigma2 R(phi)` (rotation, noise radar) or
/// `rho sigma1 sigma2 R'(phi)` (reflection, QTMS radar), and the lower block is
/// its transpose.
pub fn build_covariance(params: &CovarianceParams) -> Result<Covariance> {
    params.validate()?;
    let CovarianceParams {
        sigma1,
        sigma2,
        phi,
        rho,
        kind,
    } = *params;
    let (s, c) = phi.sin_cos();
    let block = match kind {
        RadarKind::Noise => [[c, s], [-s, c]],
        RadarKind::Qtms => [[c, s], [s, -c]],
    };
    let scale = rho * sigma1 * sigma2;
    let mut m = [[0.0; 4]; 4];
    m[I1][I1] = sigma1 * sigma1;
    m[Q1][Q1] = sigma1 * sigma1;
    m[I2][I2] = sigma2 * sigma2;
    m[Q2][Q2] = sigma2 * sigma2;
    for r in 0..2 {
        for col in 0..2 {
            let v = scale * block[r][col];
            m[r][2 + col] = v;
            m[2 + col][r] = v;
        }
    }
    Ok(Covariance(m))
}

/// Mean and variance of the per-sample `D1` under `cov`, from the Gaussian
/// fourth-moment (Isserlis) identity.
pub fn d1_moments(cov: &Covariance, kind: RadarKind) -> (f64, f64) {
    let sign = kind.quadrature_sign();
    let s = |a, b| cov.get(a, b);
    let e4 = |a, b, c, d| s(a, b) * s(c, d) + s(a, c) * s(b, d) + s(a, d) * s(b, c);
    let mean = s(I1, I2) + sign * s(Q1, Q2);
    let second = e4(I1, I2, I1, I2) + 2.0 * sign * e4(I1, I2, Q1, Q2) + e4(Q1, Q2, Q1, Q2);
    (mean, second - mean * mean)
}

/// Sample means of `P_tot` and `D1` over `n` samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SufficientStats {
    /// Mean total power `I1^2 + Q1^2 + I2^2 + Q2^2`.
    pub p_tot_bar: f64,
    /// Mean cross-correlation `I1 I2 -/+ Q1 Q2`.
    pub d1_bar: f64,
    /// Number of samples averaged.
    pub n: u64,
}

impl SufficientStats {
    pub fn new(p_tot_bar: f64, d1_bar: f64, n: u64) -> Result<Self> {
        let stats = Self { p_tot_bar, d1_bar, n };
        stats.validate()?;
        Ok(stats)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.p_tot_bar.is_finite() || !self.d1_bar.is_finite() {
            return Err(Error::InvalidStats("statistics must be finite".into()));
        }
        if self.p_tot_bar < 0.0 {
            return Err(Error::InvalidStats(format!(
                "p_tot_bar must be nonnegative, got {}",
                self.p_tot_bar
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidStats("n must be at least 1".into()));
        }
        Ok(())
    }
}

/// Draws `(P_tot, D1)` means from `W_4(Sigma, n) / n` using the Bartlett
/// decomposition, so one draw costs the same for every `n`.
///
/// For `n < 4` the lower-trapezoidal form of the decomposition is used; the
/// Wishart matrix is then singular but the statistics are still exact.
#[derive(Clone, Debug)]
pub struct StatsSampler {
    chol: [[f64; 4]; 4],
    chi: [Option<ChiSquared<f64>>; 4],
    n: u64,
    kind: RadarKind,
}

impl StatsSampler {
    pub fn new(params: &CovarianceParams, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n must be at least 1"));
        }
        let cov = build_covariance(params)?;
        let chol = cov
            .cholesky()
            .ok_or_else(|| Error::param("covariance is not positive definite"))?;
        let mut chi = [None; 4];
        for (i, slot) in chi.iter_mut().enumerate() {
            if (i as u64) < n {
                let dof = (n - i as u64) as f64;
                *slot = Some(ChiSquared::new(dof).map_err(|e| Error::param(e.to_string()))?);
            }
        }
        Ok(Self {
            chol,
            chi,
            n,
            kind: params.kind,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SufficientStats {
        // Bartlett factor A: sqrt(chi2) on the diagonal, N(0,1) below it.
        let mut a = [[0.0f64; 4]; 4];
        for i in 0..4 {
            let cols = i.min(self.n as usize);
            for cell in a[i].iter_mut().take(cols) {
                *cell = rng.sample(StandardNormal);
            }
            if let Some(chi) = &self.chi[i] {
                a[i][i] = chi.sample(rng).sqrt();
            }
        }
        // B = L A is lower triangular and W = B B^T.
        let l = &self.chol;
        let mut b = [[0.0f64; 4]; 4];
        for i in 0..4 {
            for j in 0..=i {
                b[i][j] = (j..=i).map(|k| l[i][k] * a[k][j]).sum();
            }
        }
        let trace: f64 = b.iter().flatten().map(|v| v * v).sum();
        let w_i1_i2: f64 = (0..4).map(|k| b[I1][k] * b[I2][k]).sum();
        let w_q1_q2: f64 = (0..4).map(|k| b[Q1][k] * b[Q2][k]).sum();
        let n = self.n as f64;
        SufficientStats {
            p_tot_bar: trace / n,
            d1_bar: (w_i1_i2 + self.kind.quadrature_sign() * w_q1_q2) / n,
            n: self.n,
        }
    }
}

/// One draw of the sufficient statistics for `n` samples.
pub fn sample_sufficient_stats<R: Rng + ?Sized>(
    params: &CovarianceParams,
    n: u64,
    rng: &mut R,
) -> Result<SufficientStats> {
    Ok(StatsSampler::new(params, n)?.sample(rng))
}

/// `n` explicit sample vectors `[I1, Q1, I2, Q2]` drawn from the model.
pub fn sample_vectors<R: Rng + ?Sized>(params: &CovarianceParams, n: usize, rng: &mut R) -> Result<Vec<[f64; 4]>> {
    let cov = build_covariance(params)?;
    let l = cov
        .cholesky()
        .ok_or_else(|| Error::param("covariance is not positive definite"))?;
    Ok((0..n)
        .map(|_| {
            let z: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            std::array::from_fn(|i| (0..=i).map(|k| l[i][k] * z[k]).sum())
        })
        .collect())
}

/// Per-sample means of `P_tot` and `D1` over explicit sample vectors.
pub fn stats_from_samples(samples: &[[f64; 4]], kind: RadarKind) -> Result<SufficientStats> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("no samples"));
    }
    let sign = kind.quadrature_sign();
    let (p, d) = samples.iter().fold((0.0, 0.0), |(p, d), x| {
        (
            p + x.iter().map(|v| v * v).sum::<f64>(),
            d + x[I1] * x[I2] + sign * x[Q1] * x[Q2],
        )
    });
    let n = samples.len() as f64;
    SufficientStats::new(p / n, d / n, samples.len() as u64)
}
