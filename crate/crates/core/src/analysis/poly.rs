//! Closed-form roots of low-degree real polynomials.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Roots of the monic cubic `x^3 + a2 x^2 + a1 x + a0`, sorted by real part
/// (descending), then imaginary part.
///
/// Uses the trigonometric form when all roots are real and Cardano's form
/// otherwise, then polishes every root with a few Newton steps.
pub fn monic_cubic_roots(a2: f64, a1: f64, a0: f64) -> [Complex64; 3] {
    let shift = a2 / 3.0;
    // depressed cubic t^3 + p t + q with x = t - a2/3
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let mut roots = if disc <= 0.0 && p < 0.0 {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        [0, 1, 2].map(|k| Complex64::new(r * (phi - 2.0 * PI * f64::from(k) / 3.0).cos() - shift, 0.0))
    } else {
        let t1 = if p == 0.0 && q == 0.0 {
            0.0
        } else {
            let w = -q / 2.0 - q.signum() * disc.max(0.0).sqrt();
            let u = w.cbrt();
            if u == 0.0 {
                (-q).cbrt()
            } else {
                u - p / (3.0 * u)
            }
        };
        let r1 = polish_real(t1 - shift, a2, a1, a0);
        // synthetic division by (x - r1)
        let b1 = a2 + r1;
        let b0 = a1 + r1 * b1;
        let [r2, r3] = quadratic_roots(1.0, b1, b0);
        [Complex64::new(r1, 0.0), r2, r3]
    };

    for r in roots.iter_mut() {
        *r = polish_complex(*r, a2, a1, a0);
    }
    roots.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    roots
}

/// Real roots of `a x^3 + b x^2 + c x + d`, ascending. Degenerate leading
/// coefficients fall back to the quadratic or linear case.
pub fn real_cubic_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let scale = [a, b, c, d].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let mut out: Vec<f64> = if a.abs() > 1e-14 * scale {
        monic_cubic_roots(b / a, c / a, d / a)
            .iter()
            .filter(|r| r.im.abs() <= 1e-9 * (1.0 + r.re.abs()))
            .map(|r| r.re)
            .collect()
    } else if b.abs() > 1e-14 * scale {
        quadratic_roots(b, c, d)
            .iter()
            .filter(|r| r.im == 0.0)
            .map(|r| r.re)
            .collect()
    } else if c != 0.0 {
        vec![-d / c]
    } else {
        Vec::new()
    };
    out.sort_by(f64::total_cmp);
    out
}

/// Roots of `a x^2 + b x + c` with `a != 0`, using the cancellation-free
/// form for real roots.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (b + b.signum() * sq);
        if q == 0.0 {
            // b == 0 and c == 0
            return [Complex64::new(0.0, 0.0); 2];
        }
        let (x1, x2) = (q / a, c / q);
        [Complex64::new(x1.max(x2), 0.0), Complex64::new(x1.min(x2), 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a).abs();
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn polish_real(mut x: f64, a2: f64, a1: f64, a0: f64) -> f64 {
    for _ in 0..4 {
        let f = ((x + a2) * x + a1) * x + a0;
        let df = (3.0 * x + 2.0 * a2) * x + a1;
        if df == 0.0 || !f.is_finite() {
            break;
        }
        let next = x - f / df;
        if !next.is_finite() {
            break;
        }
        x = next;
    }
    x
}

fn polish_complex(mut x: Complex64, a2: f64, a1: f64, a0: f64) -> Complex64 {
    let residual = |x: Complex64| ((x + a2) * x + a1) * x + a0;
    for _ in 0..3 {
        let f = residual(x);
        let df = (x * 3.0 + 2.0 * a2) * x + a1;
        if df.norm() < 1e-12 * (1.0 + x.norm_sqr()) {
            break;
        }
        let next = x - f / df;
        if !(next.re.is_finite() && next.im.is_finite()) || residual(next).norm() >= f.norm() {
            break;
        }
        x = next;
    }
    x
}
