//! Comparator estimators: jackknife, bootstrap, the infinitesimal jackknife
//! and closed-form comparators used by the benchmark experiments.

mod comparators;
mod infinitesimal;
mod resampling;

pub use comparators::{
    alpha_mu_sq_target, golden_section_max, mu_over_sigma_normal_target, ratio_target, sen_alpha_mu_sq, sen_scale,
    sen_scale_numeric, sigma_exp_target,
};
pub use infinitesimal::{infinitesimal_jackknife, IjForm, IjResult};
pub use resampling::{bootstrap, iterated_bootstrap_cost, jackknife, BootstrapResult};

/// Knobs shared by the resampling comparators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResamplingConfig {
    /// Bootstrap replicates B.
    pub replicates: usize,
    pub seed: u64,
    /// Finite-difference step for weight derivatives, in units of observation mass.
    pub step: f64,
}

impl Default for ResamplingConfig {
    fn default() -> Self {
        Self { replicates: 1000, seed: 0x5eed, step: 1e-3 }
    }
}
