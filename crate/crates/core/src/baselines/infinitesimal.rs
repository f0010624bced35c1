//! Jaeckel's infinitesimal jackknife: T̂ - (1/2) c Σ_i ∂²T/∂w_i², with the
//! second weight derivatives taken by central differences.
//!
//! Two parametrisations of "more mass on observation i":
//! * [`IjForm::Simplex`] moves along (1 - ε)F̂ + εδ_i and uses c = 1/n², which
//!   reproduces the T estimate at p = 2;
//! * [`IjForm::Normalized`] adds raw weight t to observation i and renormalises,
//!   (F̂ + tδ_i)/(1 + t), and uses c = 1/(n(n - 1)), which reproduces the S
//!   estimate at p = 2.
//!
//! Both second-derivative sums equal n T̂[2] exactly; they differ per
//! observation by twice the influence value, which sums to zero.

use alloc::vec;

use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::moments::{MomentSpec, Sample};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IjForm {
    Simplex,
    Normalized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IjResult {
    pub value: f64,
    pub plug_in: f64,
    /// Σ_i ∂²T/∂w_i² after Richardson extrapolation.
    pub second_derivative_sum: f64,
    /// (D(h) - D(h/2)) / (D(h/2) - D(h/4)) on the summed second differences;
    /// None when both differences sit below the roundoff floor.
    pub richardson_ratio: Option<f64>,
}

/// Infinitesimal jackknife for one sample; `step` is the largest finite
/// difference step in units of observation mass.
pub fn infinitesimal_jackknife<F: Functional<f64> + ?Sized>(
    f: &F,
    sample: &Sample<f64>,
    form: IjForm,
    step: f64,
) -> Result<IjResult> {
    if f.arity() != 1 || f.dims()[0] != sample.dim() {
        return Err(Error::Arity { expected: 1, got: f.arity() });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Invalid("finite-difference step must be positive".into()));
    }
    let n = sample.n();
    if n < 2 {
        return Err(Error::InsufficientSample { n, min: 2 });
    }
    let spec = MomentSpec::new(sample.dim(), f.moment_order(0));
    let base = 1.0 / n as f64;
    let mut w = vec![base; n];
    let plug_in = f.plug_in(&[spec.table_weighted(sample, &w)?])?;

    let eval = |w: &[f64]| -> Result<f64> { f.plug_in(&[spec.table_weighted(sample, w)?]) };
    let steps = [step, step / 2.0, step / 4.0];
    let mut sums = [0.0f64; 3];
    let mut scale = 0.0f64;
    for i in 0..n {
        for (s, &h) in sums.iter_mut().zip(&steps) {
            let mut side = [0.0f64; 2];
            for (v, sign) in side.iter_mut().zip([1.0, -1.0]) {
                let e = sign * h;
                match form {
                    IjForm::Simplex => {
                        for wj in w.iter_mut() {
                            *wj = (1.0 - e) * base;
                        }
                        w[i] += e;
                    }
                    IjForm::Normalized => {
                        // table_weighted renormalises, so adding raw mass is enough
                        w.fill(base);
                        w[i] += e;
                    }
                }
                *v = eval(&w)?;
            }
            *s += (side[0] - 2.0 * plug_in + side[1]) / (h * h);
            scale += (side[0].abs() + 2.0 * plug_in.abs() + side[1].abs()) / (h * h);
        }
        w.fill(base);
    }
    let (d1, d2, d4) = (sums[0], sums[1], sums[2]);
    let (a, b) = (d1 - d2, d2 - d4);
    // each second difference carries roughly ε·|values|/h² of rounding noise
    let floor = 64.0 * f64::EPSILON * scale;
    let richardson_ratio = if a.abs() <= floor && b.abs() <= floor {
        None
    } else {
        let ratio = a / b;
        if !(3.2..=4.8).contains(&ratio) {
            return Err(Error::Unstable(alloc::format!(
                "second differences do not converge at second order (ratio {ratio:.3}); adjust the step"
            )));
        }
        Some(ratio)
    };
    let extrapolated = (4.0 * d4 - d2) / 3.0;
    let c = match form {
        IjForm::Simplex => 1.0 / (n as f64 * n as f64),
        IjForm::Normalized => 1.0 / (n as f64 * (n - 1) as f64),
    };
    Ok(IjResult {
        value: plug_in - 0.5 * c * extrapolated,
        plug_in,
        second_derivative_sum: extrapolated,
        richardson_ratio,
    })
}
