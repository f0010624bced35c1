//! Ready-made functionals and their closed-form second-order estimates.
//!
//! Each functional here feeds the generic estimators; the `*_second_order`
//! functions are the familiar one-line corrections, written with an explicit
//! denominator `m` (m = n - 1 reproduces the S estimate at p = 2, m = n the
//! T estimate).

use alloc::vec;
use alloc::vec::Vec;

use super::{CentralMoment, FunctionOfMeans, FunctionOfMoments, JetFn, LinearCombPower, RatioOracle};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::moments::MomentTable;
use crate::scalar::Scalar;

/// Names accepted by [`by_name`]-style front ends.
pub const NAMES: [&str; 8] = [
    "power-of-mean",
    "linear-comb-power",
    "ratio-of-means",
    "central-moment",
    "stddev",
    "mean-over-std",
    "skewness",
    "harmonic-product",
];

/// μ^q for univariate data.
pub fn power_of_mean<S: Scalar>(q: f64) -> FunctionOfMeans<S, LinearCombPower<S>> {
    FunctionOfMeans::new("power-of-mean", vec![1], LinearCombPower::new(vec![S::one()], q)).expect("valid dims")
}

/// (α'μ)^q for one sample of dimension α.len().
pub fn linear_comb_power<S: Scalar>(alpha: Vec<S>, q: f64) -> Result<FunctionOfMeans<S, LinearCombPower<S>>> {
    let d = alpha.len();
    FunctionOfMeans::new("linear-comb-power", vec![d], LinearCombPower::new(alpha, q))
}

/// (Σ α_i μ_i)^q with μ_i the mean of univariate sample i.
pub fn linear_comb_power_k<S: Scalar>(alpha: Vec<S>, q: f64) -> Result<FunctionOfMeans<S, LinearCombPower<S>>> {
    let k = alpha.len();
    FunctionOfMeans::new("linear-comb-power", vec![1; k], LinearCombPower::new(alpha, q))
}

/// μ_1/μ_2 for one bivariate sample.
pub fn ratio_of_means<S: Scalar>() -> FunctionOfMeans<S, RatioOracle> {
    FunctionOfMeans::new("ratio-of-means", vec![2], RatioOracle).expect("valid dims")
}

/// μ_1 μ_2/(μ_1 + μ_2) for two univariate samples.
pub fn harmonic_product<S: Scalar>() -> FunctionOfMeans<S, JetFn<S>> {
    let g = JetFn::new(2, |m: &[Jet<S>]| {
        let d = m[0].clone() + m[1].clone();
        if d.value().is_zero() {
            return Err(Error::Singular("means sum to zero"));
        }
        Ok(m[0].clone() * m[1].clone() / d)
    });
    FunctionOfMeans::new("harmonic-product", vec![1, 1], g).expect("valid dims")
}

/// μ_r with closed-form derivative contractions.
pub fn central_moment(r: usize) -> CentralMoment {
    CentralMoment::new(r)
}

/// μ_r through the generic function-of-moments path (used as a cross-check).
pub fn central_moment_generic<S: Scalar>(r: usize) -> FunctionOfMoments<S> {
    FunctionOfMoments::new("central-moment", r, move |_, m: &[Jet<S>]| {
        // Σ_j C(r, j) m_j (-m_1)^{r-j}, m_0 = 1
        let mut total = Jet::zero();
        let neg_m1 = -m[0].clone();
        for j in 0..=r {
            let mj = if j == 0 { Jet::one() } else { m[j - 1].clone() };
            let c: i64 = (0..j as i64).fold(1, |a, l| a * (r as i64 - l) / (l + 1));
            total = total + Jet::from_i64(c) * mj * neg_m1.powi((r - j) as i32);
        }
        Ok(total)
    })
}

fn variance_jet<S: Scalar>(centre: &S, m: &[Jet<S>]) -> Result<Jet<S>> {
    let var = m[1].clone() - m[0].clone() * m[0].clone();
    let v = var.value().clone();
    let scale = centre.clone() * centre.clone() + v.clone();
    if v.negligible(&scale) || v.to_f64() <= 0.0 {
        return Err(Error::Degenerate("zero variance"));
    }
    Ok(var)
}

fn sqrt_jet<S: Scalar>(j: &Jet<S>) -> Result<Jet<S>> {
    j.sqrt().ok_or(Error::Inexact("the square root of the variance"))
}

/// σ = √μ_2.
pub fn stddev<S: Scalar>() -> FunctionOfMoments<S> {
    FunctionOfMoments::new("stddev", 2, |c: &S, m: &[Jet<S>]| sqrt_jet(&variance_jet(c, m)?))
}

/// μ/σ.
pub fn mean_over_std<S: Scalar>() -> FunctionOfMoments<S> {
    FunctionOfMoments::new("mean-over-std", 2, |c: &S, m: &[Jet<S>]| {
        let sd = sqrt_jet(&variance_jet(c, m)?)?;
        Ok((Jet::constant(c.clone()) + m[0].clone()) / sd)
    })
}

/// β_3 = μ_3/μ_2^{3/2}.
pub fn skewness<S: Scalar>() -> FunctionOfMoments<S> {
    FunctionOfMoments::new("skewness", 3, |c: &S, m: &[Jet<S>]| {
        let var = variance_jet(c, m)?;
        let (m1, m2, m3) = (m[0].clone(), m[1].clone(), m[2].clone());
        let mu3 = m3 - Jet::from_i64(3) * m1.clone() * m2 + Jet::from_i64(2) * m1.clone() * m1.clone() * m1;
        let den = var.powf(1.5).ok_or(Error::Inexact("a fractional power of the variance"))?;
        Ok(mu3 / den)
    })
}

fn beta<S: Scalar>(t: &MomentTable<S>, r: usize) -> Result<S> {
    t.standardized(r)
}

/// σ̂{1 + (β̂_4 + 3)/(8m)}.
pub fn stddev_second_order<S: Scalar>(t: &MomentTable<S>, m: S) -> Result<S> {
    let sd = t.check_variance()?.sqrt().ok_or(Error::Inexact("the square root of the variance"))?;
    let b4 = beta(t, 4)?;
    Ok(sd.clone() + sd * (b4 + S::from_i64(3)) / (S::from_i64(8) * m))
}

/// μ̂/σ̂ + (1/m){β̂_3/2 - (μ̂/σ̂)(3β̂_4 + 1)/8}.
///
/// The sign of the β̂_3 term is the one the bias expansion gives; see
/// [`mean_over_std_second_order_as_printed`] for the commonly quoted variant.
pub fn mean_over_std_second_order<S: Scalar>(t: &MomentTable<S>, m: S) -> Result<S> {
    let (ratio, b3, b4) = mean_over_std_parts(t)?;
    let corr = b3 / S::from_i64(2) - ratio.clone() * (S::from_i64(3) * b4 + S::one()) / S::from_i64(8);
    Ok(ratio + corr / m)
}

/// μ̂/σ̂ - (1/m){β̂_3/2 + (μ̂/σ̂)(3β̂_4 + 1)/8}, with the β̂_3 sign reversed.
/// Kept for comparison only; it does not remove the skewness part of the bias.
pub fn mean_over_std_second_order_as_printed<S: Scalar>(t: &MomentTable<S>, m: S) -> Result<S> {
    let (ratio, b3, b4) = mean_over_std_parts(t)?;
    let corr = b3 / S::from_i64(2) + ratio.clone() * (S::from_i64(3) * b4 + S::one()) / S::from_i64(8);
    Ok(ratio - corr / m)
}

fn mean_over_std_parts<S: Scalar>(t: &MomentTable<S>) -> Result<(S, S, S)> {
    let sd = t.check_variance()?.sqrt().ok_or(Error::Inexact("the square root of the variance"))?;
    Ok((t.mean()[0].clone() / sd, beta(t, 3)?, beta(t, 4)?))
}

/// (X̄_1/X̄_2){1 + m^{-1}[μ̂_{12}/(X̄_1 X̄_2) - μ̂_{22}/X̄_2^2]}.
pub fn ratio_second_order<S: Scalar>(t: &MomentTable<S>, m: S) -> Result<S> {
    let (x1, x2) = (t.mean()[0].clone(), t.mean()[1].clone());
    if x2.is_zero() {
        return Err(Error::Singular("zero denominator mean"));
    }
    let ratio = x1.clone() / x2.clone();
    // written as ratio + m^{-1}[μ̂_12/X̄_2^2 - X̄_1 μ̂_22/X̄_2^3] so X̄_1 = 0 is allowed
    let c12 = t.central(&[0, 1])?;
    let c22 = t.central(&[1, 1])?;
    let corr = c12 / (x2.clone() * x2.clone()) - x1 * c22 / (x2.clone() * x2.clone() * x2);
    Ok(ratio + corr / m)
}

/// (α'μ̂)^q{1 - C(q,2)(α'μ̂)^{-2} α'V̂α/m} for one multivariate sample.
pub fn linear_comb_power_second_order<S: Scalar>(alpha: &[S], q: f64, t: &MomentTable<S>, m: S) -> Result<S> {
    if alpha.len() != t.dim() {
        return Err(Error::Dimension("alpha length must match the sample dimension".into()));
    }
    let n = alpha.iter().zip(t.mean()).fold(S::zero(), |a, (x, m)| a + x.clone() * m.clone());
    let mut quad = S::zero();
    for i in 0..alpha.len() {
        for j in 0..alpha.len() {
            quad = quad + alpha[i].clone() * alpha[j].clone() * t.central(&[i, j])?;
        }
    }
    lcp_assemble(n, q, quad / m)
}

/// (α'μ̂)^q{1 - C(q,2)(α'μ̂)^{-2} Σ α_i^2 v̂_i/(n_i - 1)} for k univariate samples.
pub fn linear_comb_power_k_second_order<S: Scalar>(alpha: &[S], q: f64, tables: &[MomentTable<S>]) -> Result<S> {
    if alpha.len() != tables.len() {
        return Err(Error::Arity { expected: alpha.len(), got: tables.len() });
    }
    let mut n = S::zero();
    let mut spread = S::zero();
    for (a, t) in alpha.iter().zip(tables) {
        n = n + a.clone() * t.mean()[0].clone();
        spread = spread + a.clone() * a.clone() * t.mu(2)? / S::from_usize(t.n() - 1);
    }
    lcp_assemble(n, q, spread)
}

fn lcp_assemble<S: Scalar>(n: S, q: f64, spread: S) -> Result<S> {
    // N^q - C(q,2) N^{q-2} spread, which stays finite at N = 0 for q ≥ 2
    let c2 = S::from_f64(q * (q - 1.0) / 2.0).ok_or(Error::Invalid("non-finite exponent".into()))?;
    let top = n.powf(q).ok_or(Error::Singular("zero linear combination of means"))?;
    if c2.is_zero() {
        return Ok(top);
    }
    let low = n.powf(q - 2.0).ok_or(Error::Singular("zero linear combination of means"))?;
    Ok(top - c2 * low * spread)
}

/// T̂ + T̂^2 D̂^{-1} Σ_i μ̂_i^{-2} v̂_i/(n_i - 1) for μ_1 μ_2/(μ_1 + μ_2).
pub fn harmonic_product_second_order<S: Scalar>(tables: &[MomentTable<S>]) -> Result<S> {
    let [a, b] = tables else {
        return Err(Error::Arity { expected: 2, got: tables.len() });
    };
    let (m1, m2) = (a.mean()[0].clone(), b.mean()[0].clone());
    let d = m1.clone() + m2.clone();
    if d.is_zero() || m1.is_zero() || m2.is_zero() {
        return Err(Error::Singular("zero mean in harmonic product"));
    }
    let t = m1.clone() * m2.clone() / d.clone();
    let mut sum = S::zero();
    for (m, tab) in [(m1, a), (m2, b)] {
        sum = sum + tab.mu(2)? / (m.clone() * m * S::from_usize(tab.n() - 1));
    }
    Ok(t.clone() + t.clone() * t / d * sum)
}

/// Closed-form T[2] for the skewness: -3β_5 + 15(β_4 - 1)β_3/4 + 9β_3.
pub fn skewness_t2<S: Scalar>(t: &MomentTable<S>) -> Result<S> {
    let (b3, b4, b5) = (beta(t, 3)?, beta(t, 4)?, beta(t, 5)?);
    Ok(S::from_i64(-3) * b5 + S::from_i64(15) * (b4 - S::one()) * b3.clone() / S::from_i64(4) + S::from_i64(9) * b3)
}

/// Formulas as commonly printed whose values the derivation does not
/// confirm. They are kept so the disagreement can be reproduced; nothing in
/// the estimators uses them.
pub mod reference {
    use super::*;

    /// Printed S_2/σ for the standard deviation: (16β_6 + 22β_4 + 164 - 15β_4^2)/128.
    pub fn stddev_s2_over_sigma_printed<S: Scalar>(b4: S, b6: S) -> S {
        (S::from_i64(16) * b6 + S::from_i64(22) * b4.clone() + S::from_i64(164) - S::from_i64(15) * b4.clone() * b4)
            / S::from_i64(128)
    }

    /// Derived S_2/σ: (16β_6 + 22β_4 - 15β_4^2 - 48β_3^2 - 71)/128.
    pub fn stddev_s2_over_sigma<S: Scalar>(b3: S, b4: S, b6: S) -> S {
        (S::from_i64(16) * b6 + S::from_i64(22) * b4.clone()
            - S::from_i64(15) * b4.clone() * b4
            - S::from_i64(48) * b3.clone() * b3
            - S::from_i64(71))
            / S::from_i64(128)
    }

    /// Printed skewness T[3].
    pub fn skewness_t3_printed<S: Scalar>(b3: S, b4: S, b5: S, b6: S) -> S {
        let i = S::from_i64;
        -(i(105) * (b6 - i(3) * b4.clone() + i(2)) * b3.clone()) / i(8) + i(36) * b5
            - i(45) * b4 * b3.clone() / i(2)
            - i(111) * b3 / i(2)
    }

    /// Printed skewness T[2^2].
    pub fn skewness_t22_printed<S: Scalar>(b3: S, b4: S, b5: S) -> S {
        let i = S::from_i64;
        let delta = i(78)
            - i(105) * (b4.clone() + b3.clone() * b3.clone())
            - i(15) * (i(2) * b5.clone() + i(13) * b4.clone() * b3.clone() - i(29) * b3.clone());
        -(i(105) * (b5 - i(4) * b3.clone()) * (b4.clone() - i(1))) / i(2)
            + i(945) * (b4.clone() - i(1)) * (b4 - i(1)) * b3.clone() / i(16)
            + b3 * delta
    }

    /// Printed S_2^n for the harmonic product of two means.
    pub fn harmonic_s2n<S: Scalar>(tables: &[MomentTable<S>]) -> Result<S> {
        let [a, b] = tables else {
            return Err(Error::Arity { expected: 2, got: tables.len() });
        };
        let i = S::from_i64;
        let (m1, m2) = (a.mean()[0].clone(), b.mean()[0].clone());
        let d = m1.clone() + m2.clone();
        let t = m1.clone() * m2.clone() / d.clone();
        let mut total = S::zero();
        for (m, tab) in [(m1.clone(), a), (m2.clone(), b)] {
            let n = tab.n() as i64;
            let v2 = tab.mu(2)?;
            let inner = i(2) * tab.mu(3)? / (d.clone() * d.clone()) - i(3) * v2.clone() * v2 / d.powi(3);
            total = total + t.clone() * t.clone() * inner / (m.clone() * m) / i((n - 1) * (n - 2));
        }
        let cross = (m1.clone() * m1.clone() + m2.clone() * m2.clone() - i(4) * m1 * m2) * a.mu(2)? * b.mu(2)?
            / d.powi(5)
            / i((a.n() as i64 - 1) * (b.n() as i64 - 1));
        Ok(total + cross)
    }

    /// Printed S_2/T for the ratio of means in terms of α[π] = μ[π]/Π μ.
    pub fn ratio_s2_over_t<S: Scalar>(t: &MomentTable<S>) -> Result<S> {
        let (m1, m2) = (t.mean()[0].clone(), t.mean()[1].clone());
        let a12 = t.central(&[0, 1])? / (m1.clone() * m2.clone());
        let a22 = t.central(&[1, 1])? / (m2.clone() * m2.clone());
        let a222 = t.central(&[1, 1, 1])? / m2.powi(3);
        let a122 = t.central(&[0, 1, 1])? / (m1 * m2.clone() * m2);
        let i = S::from_i64;
        Ok(i(-2) * a222 + i(2) * a122 + i(3) * a22.clone() * a22.clone() - i(3) * a12 * a22)
    }
}
