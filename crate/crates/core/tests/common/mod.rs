//! Numerical oracles shared by the integration tests.
#![allow(dead_code)]

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Density of `U = sqrt(X)` for `X ~ noncentral chi2_1(lambda)`, summed as a
/// Poisson mixture of central chi-square densities with `1 + 2k` dof.
pub fn ncx2_1_sqrt_density(u: f64, lambda: f64) -> f64 {
    let half = 0.5 * lambda;
    let kmax = (half + 20.0 * (half + 1.0).sqrt() + 30.0) as u32;
    let ln2 = std::f64::consts::LN_2;
    let mut total = 0.0;
    for k in 0..=kmax {
        let k = k as f64;
        let ln_weight = if half > 0.0 {
            -half + k * half.ln() - libm::lgamma(k + 1.0)
        } else if k == 0.0 {
            0.0
        } else {
            break;
        };
        let ln_pow = if k == 0.0 { 0.0 } else { 2.0 * k * u.ln() };
        let ln_term = ln_weight + ln2 + ln_pow - 0.5 * u * u - (k + 0.5) * ln2 - libm::lgamma(k + 0.5);
        total += ln_term.exp();
    }
    total
}

/// `P(X > b^2)` for `X ~ noncentral chi2_1(a^2)` by quadrature of the density
/// of `sqrt(X)`.
pub fn ncx2_1_survival_oracle(a: f64, b: f64) -> f64 {
    let lambda = a * a;
    let upper = a.max(b) + 40.0;
    let f = |u: f64| ncx2_1_sqrt_density(u, lambda);
    let mut total = 0.0;
    let mut lo = b;
    while lo < upper {
        let hi = (lo + 1.0).min(upper);
        total += adaptive_simpson(&f, lo, hi, 1e-14);
        lo = hi;
    }
    total
}

/// One-sample Kolmogorov-Smirnov statistic against `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / m - f).max(f - i as f64 / m)
    })
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Critical value of the two-sample KS statistic at level `alpha`.
pub fn ks_two_sample_critical(alpha: f64, na: usize, nb: usize) -> f64 {
    let c = (-(0.5 * alpha).ln() / 2.0).sqrt();
    c * ((na + nb) as f64 / (na as f64 * nb as f64)).sqrt()
}

/// `chi2_1` cumulative distribution function.
pub fn chi2_1_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        1.0 - libm::erfc((0.5 * x).sqrt())
    }
}
