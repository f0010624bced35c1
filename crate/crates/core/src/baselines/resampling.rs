use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::moments::{MomentSpec, MomentTable, Sample};
use crate::scalar::Scalar;

fn specs<S: Scalar, F: Functional<S> + ?Sized>(f: &F, samples: &[Sample<S>]) -> Result<Vec<MomentSpec>> {
    if samples.len() != f.arity() {
        return Err(Error::Arity { expected: f.arity(), got: samples.len() });
    }
    let order = f.moment_order(0);
    samples
        .iter()
        .zip(f.dims())
        .map(|(s, &d)| {
            if s.dim() != d {
                return Err(Error::Dimension(alloc::format!("{} expects dimension {d}, got {}", f.name(), s.dim())));
            }
            Ok(MomentSpec::new(d, order))
        })
        .collect()
}

/// Delete-one jackknife: T̂ + Σ_j (n_j - 1)(T̂ - mean_i T̂_{(-i in j)}).
/// For one sample this is n T̂ - (n - 1) mean_i T̂_{(-i)}.
pub fn jackknife<S: Scalar, F: Functional<S> + ?Sized>(f: &F, samples: &[Sample<S>]) -> Result<S> {
    let specs = specs(f, samples)?;
    let mut tables: Vec<MomentTable<S>> =
        specs.iter().zip(samples).map(|(sp, s)| sp.table(s)).collect::<Result<_>>()?;
    let full = f.plug_in(&tables)?;
    let mut value = full.clone();
    for j in 0..samples.len() {
        let n = samples[j].n();
        if n < 2 {
            return Err(Error::InsufficientSample { n, min: 2 });
        }
        let keep = tables[j].clone();
        let mut idx: Vec<usize> = (1..n).collect();
        let mut sum = S::zero();
        for i in 0..n {
            // idx holds 0..n without i
            if i > 0 {
                idx[i - 1] = i - 1;
            }
            tables[j] = specs[j].table_indexed(&samples[j], &idx)?;
            sum = sum + f.plug_in(&tables)?;
        }
        tables[j] = keep;
        let mean = sum / S::from_usize(n);
        value = value + S::from_usize(n - 1) * (full.clone() - mean);
    }
    Ok(value)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapResult<S> {
    /// 2 T̂ - mean T̂*.
    pub value: S,
    pub used: usize,
    /// Resamples dropped because the functional was undefined on them.
    pub skipped: usize,
}

/// Once-iterated bootstrap bias correction 2 T̂ - mean_b T̂*_b, resampling each
/// sample independently. Resamples on which the functional is degenerate or
/// singular are skipped and counted.
pub fn bootstrap<S: Scalar, F: Functional<S> + ?Sized, R: RngCore + ?Sized>(
    f: &F,
    samples: &[Sample<S>],
    replicates: usize,
    rng: &mut R,
) -> Result<BootstrapResult<S>> {
    if replicates == 0 {
        return Err(Error::Invalid("bootstrap needs at least one replicate".into()));
    }
    let specs = specs(f, samples)?;
    let tables: Vec<MomentTable<S>> = specs.iter().zip(samples).map(|(sp, s)| sp.table(s)).collect::<Result<_>>()?;
    let full = f.plug_in(&tables)?;
    let mut idx: Vec<Vec<usize>> = samples.iter().map(|s| alloc::vec![0; s.n()]).collect();
    let mut boot = Vec::with_capacity(samples.len());
    let (mut sum, mut used, mut skipped) = (S::zero(), 0usize, 0usize);
    for _ in 0..replicates {
        boot.clear();
        let mut ok = true;
        for ((s, sp), ix) in samples.iter().zip(&specs).zip(idx.iter_mut()) {
            for v in ix.iter_mut() {
                *v = rng.gen_range(0..s.n());
            }
            match sp.table_indexed(s, ix) {
                Ok(t) => boot.push(t),
                Err(Error::Degenerate(_) | Error::Singular(_)) => ok = false,
                Err(e) => return Err(e),
            }
        }
        if !ok {
            skipped += 1;
            continue;
        }
        match f.plug_in(&boot) {
            Ok(v) => {
                sum = sum + v;
                used += 1;
            }
            Err(Error::Degenerate(_) | Error::Singular(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if used == 0 {
        return Err(Error::Degenerate("every bootstrap resample was degenerate"));
    }
    let mean = sum / S::from_usize(used);
    Ok(BootstrapResult { value: S::from_i64(2) * full - mean, used, skipped })
}

/// Plug-in evaluations needed by a bootstrap iterated to reach bias order
/// n^{-p} with B resamples per level: B + B^2 + ... + B^{p-1} resamples,
/// each costing a pass over the data. With B proportional to n this is the
/// O(n^p) growth that the analytic estimators avoid.
pub fn iterated_bootstrap_cost(p: usize, replicates: u128) -> u128 {
    (1..p as u32).map(|l| replicates.pow(l)).sum::<u128>() + 1
}
