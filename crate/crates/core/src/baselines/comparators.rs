//! Closed-form comparators for the benchmark experiments, on `f64` moment tables.

use crate::error::{Error, Result};
use crate::moments::MomentTable;

/// {α_1 X̄_1 + (1 - α_1) X̄_2}^2 - {α_1^2 + (1 - α_1)^2}/n for unit-variance
/// bivariate data with known covariance I.
pub fn alpha_mu_sq_target(t: &MomentTable<f64>, alpha1: f64) -> f64 {
    let m = t.mean();
    let nhat = alpha1 * m[0] + (1.0 - alpha1) * m[1];
    let w = alpha1 * alpha1 + (1.0 - alpha1) * (1.0 - alpha1);
    nhat * nhat - w / t.n() as f64
}

/// ((n - 1)/n) X̄_1/X̄_2, unbiased for μ_1/μ_2 when X_2 is exponential and independent of X_1.
pub fn ratio_target(t: &MomentTable<f64>) -> Result<f64> {
    let m = t.mean();
    if m[1] == 0.0 {
        return Err(Error::Singular("zero denominator mean"));
    }
    let n = t.n() as f64;
    Ok((n - 1.0) / n * m[0] / m[1])
}

/// X̄, unbiased for the standard deviation of an exponential distribution.
pub fn sigma_exp_target(t: &MomentTable<f64>) -> f64 {
    t.mean()[0]
}

/// √2 Γ((n-1)/2) Ȳ / (√(n-1) Γ(n/2 - 1) S_Y), unbiased for μ/σ under
/// normality, with S_Y the (n - 1)-divisor standard deviation.
pub fn mu_over_sigma_normal_target(t: &MomentTable<f64>) -> Result<f64> {
    let n = t.n();
    if n < 3 {
        return Err(Error::InsufficientSample { n, min: 3 });
    }
    let nf = n as f64;
    let m2 = t.check_variance()?;
    let s = libm::sqrt(m2 * nf / (nf - 1.0));
    let log_ratio = libm::lgamma((nf - 1.0) / 2.0) - libm::lgamma(nf / 2.0 - 1.0);
    Ok(libm::sqrt(2.0) * libm::exp(log_ratio) * t.mean()[0] / (libm::sqrt(nf - 1.0) * s))
}

/// Maximises a unimodal `f` on [lo, hi]; returns the arg max.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    let mut iter = 0;
    while (hi - lo) > tol * (1.0 + a.abs() + b.abs()) && iter < 400 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        }
        iter += 1;
    }
    (lo + hi) / 2.0
}

/// Maximum-likelihood ω given an estimate x ~ N(ω, ω²/n):
/// the positive root of ω² + n x ω - n x² = 0, i.e. 2x/(1 + √(1 + 4/n)).
pub fn sen_scale(x: f64, n: usize) -> f64 {
    2.0 * x / (1.0 + libm::sqrt(1.0 + 4.0 / n as f64))
}

/// [`sen_scale`] by direct numerical maximisation, as a cross-check.
pub fn sen_scale_numeric(x: f64, n: usize) -> f64 {
    let nf = n as f64;
    let ll = |w: f64| -libm::log(w) - nf * (x - w) * (x - w) / (2.0 * w * w);
    let (lo, hi) = if x > 0.0 { (x * 1e-3, x * 2.0) } else { (-x * 2.0, -x * 1e-3) };
    let w = golden_section_max(|w| ll(w.abs()), lo.min(hi), lo.max(hi), 1e-14);
    if x > 0.0 {
        w
    } else {
        -w
    }
}

/// Maximum-likelihood ω given N̂² ~ N(ω, 3w²/n + 4ωw/n), w = α_1² + (1 - α_1)².
pub fn sen_alpha_mu_sq(x: f64, alpha1: f64, n: usize) -> f64 {
    let nf = n as f64;
    let w = alpha1 * alpha1 + (1.0 - alpha1) * (1.0 - alpha1);
    let var = |om: f64| 3.0 * w * w / nf + 4.0 * om * w / nf;
    let ll = |om: f64| {
        let v = var(om);
        -0.5 * libm::log(v) - (x - om) * (x - om) / (2.0 * v)
    };
    // the variance must stay positive: ω > -3w/4
    let lo = -0.75 * w * (1.0 - 1e-9);
    let hi = x.max(0.0) + 20.0 * libm::sqrt(var(x.max(0.0))) + 1.0;
    golden_section_max(ll, lo, hi, 1e-13)
}
