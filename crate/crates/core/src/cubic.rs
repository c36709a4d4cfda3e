//! Real roots of cubic polynomials.

use std::f64::consts::PI;

/// All real roots of `a x^3 + b x^2 + c x + d`, sorted ascending.
///
/// Roots come from the trigonometric form (three real roots) or a
/// cancellation-free Cardano form (one real root), then each is polished with
/// Newton steps on the original polynomial. Repeated roots may appear once or
/// several times depending on rounding.
pub fn real_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    if a == 0.0 {
        return quadratic_roots(b, c, d);
    }
    let (b, c, d) = (b / a, c / a, d / a);
    // x = t - b/3 gives t^3 + p t + q = 0.
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let mut roots: Vec<f64> = if disc > 0.0 {
        let s = disc.sqrt();
        let u = (-q / 2.0 - s.copysign(q)).cbrt();
        let t = if u == 0.0 {
            0.0
        } else {
            let v = -p / (3.0 * u);
            if p > 0.0 {
                // u and v have opposite signs; use u^3 + v^3 = -q instead of u + v.
                -q / (u * u - u * v + v * v)
            } else {
                u + v
            }
        };
        vec![t - shift]
    } else if p == 0.0 {
        vec![-shift]
    } else {
        let r = (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| 2.0 * r * (theta - 2.0 * PI * k as f64 / 3.0).cos() - shift)
            .collect()
    };
    for x in roots.iter_mut() {
        *x = polish(*x, |x| ((x + b) * x + c) * x + d, |x| (3.0 * x + 2.0 * b) * x + c);
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Real roots of `a x^2 + b x + c` (linear if `a == 0`).
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + disc.sqrt().copysign(b));
    if q == 0.0 {
        return vec![0.0, 0.0];
    }
    let mut roots = vec![q / a, c / q];
    roots.sort_by(f64::total_cmp);
    roots
}

/// Newton iterations that stop as soon as the residual stops shrinking.
fn polish(mut x: f64, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> f64 {
    let mut fx = f(x);
    for _ in 0..4 {
        let slope = df(x);
        if fx == 0.0 || slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = x - fx / slope;
        let f_next = f(next);
        if !(f_next.abs() < fx.abs()) {
            break;
        }
        x = next;
        fx = f_next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_roots(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn three_distinct_roots() {
        // (x - 1)(x + 2)(x - 3)
        assert_roots(&real_roots(1.0, -2.0, -5.0, 6.0), &[-2.0, 1.0, 3.0], 1e-14);
    }

    #[test]
    fn single_real_root() {
        // (x - 2)(x^2 + 1)
        assert_roots(&real_roots(1.0, -2.0, 1.0, -2.0), &[2.0], 1e-15);
        // x^3 + x + tiny, root near -tiny
        let r = real_roots(1.0, 0.0, 1.0, 1e-12);
        assert_roots(&r, &[-1e-12], 1e-26);
    }

    #[test]
    fn repeated_and_degenerate() {
        let r = real_roots(1.0, -3.0, 3.0, -1.0);
        assert!(r.iter().all(|x| (x - 1.0).abs() < 1e-5), "{r:?}");
        assert_roots(&real_roots(0.0, 1.0, -3.0, 2.0), &[1.0, 2.0], 1e-15);
        assert_roots(&real_roots(0.0, 0.0, 2.0, -1.0), &[0.5], 0.0);
        assert!(real_roots(0.0, 1.0, 0.0, 1.0).is_empty());
    }

    #[test]
    fn likelihood_cubic_example() {
        // -2 r^3 + 0.5 r^2 - 2 r + 0.5 = (0.5 - 2 r)(1 + r^2)
        assert_roots(&real_roots(-2.0, 0.5, -2.0, 0.5), &[0.25], 1e-16);
    }

    proptest! {
        #[test]
        fn recovers_planted_roots(
            r1 in -5.0f64..5.0, r2 in -5.0f64..5.0, r3 in -5.0f64..5.0, a in 0.1f64..10.0,
        ) {
            let mut want = vec![r1, r2, r3];
            want.sort_by(f64::total_cmp);
            prop_assume!((want[1] - want[0]).abs() > 1e-2 && (want[2] - want[1]).abs() > 1e-2);
            let b = -a * (r1 + r2 + r3);
            let c = a * (r1 * r2 + r1 * r3 + r2 * r3);
            let d = -a * r1 * r2 * r3;
            let got = real_roots(a, b, c, d);
            prop_assert_eq!(got.len(), 3);
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((g - w).abs() < 1e-8, "{:?} vs {:?}", got, want);
            }
        }
    }
}
