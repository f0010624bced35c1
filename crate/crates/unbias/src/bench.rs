//! Seeded Monte Carlo comparisons of the analytic estimators against plug-in,
//! resampling and closed-form competitors.
//!
//! Every (grid point, replication) pair draws its data from its own ChaCha8
//! stream, so results do not depend on thread count or roster order, and all
//! estimators see the same datasets.
//!
//! Bias is reported after a regression control-variate adjustment: sample
//! means of monomial features, and their centred products up to third order,
//! have known expectations under the generating distribution. Regressing each
//! estimator on them removes most of the replication noise while leaving the
//! expectation untouched, so O(n^-2) biases become visible at desk-scale R.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use unbias_core::baselines::{
    alpha_mu_sq_target, bootstrap, infinitesimal_jackknife, jackknife, mu_over_sigma_normal_target, ratio_target,
    sen_alpha_mu_sq, sen_scale, sigma_exp_target, IjForm,
};
use unbias_core::functional::{catalog, tables_for, Functional};
use unbias_core::{Estimator, EstimatorKind, MomentTable, Sample};

use crate::error::CliError;

type BoxedFunctional = Box<dyn Functional<f64> + Send + Sync>;

const BOOTSTRAP_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    AlphaMuSq,
    RatioExp,
    SigmaExp,
    MuOverSigmaNormal,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 4] =
        [ExperimentId::AlphaMuSq, ExperimentId::RatioExp, ExperimentId::SigmaExp, ExperimentId::MuOverSigmaNormal];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::AlphaMuSq => "alpha-mu-sq",
            ExperimentId::RatioExp => "ratio-exp",
            ExperimentId::SigmaExp => "sigma-exp",
            ExperimentId::MuOverSigmaNormal => "mu-over-sigma-normal",
        }
    }

    /// α_1 on [0, 1] for alpha-mu-sq; a log grid 10^{-1..1} otherwise.
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            ExperimentId::AlphaMuSq => (0..=10).map(|i| i as f64 / 10.0).collect(),
            _ => (-2..=2).map(|i| 10f64.powf(i as f64 / 2.0)).collect(),
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown experiment '{s}'")))
    }
}

/// One competitor in an experiment roster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Contender {
    PlugIn,
    Analytic(EstimatorKind),
    Jackknife,
    Bootstrap,
    InfinitesimalJackknife,
    Target,
    Sen,
}

impl Contender {
    pub const ALL: [Contender; 9] = [
        Contender::PlugIn,
        Contender::Analytic(EstimatorKind::S),
        Contender::Analytic(EstimatorKind::T),
        Contender::Analytic(EstimatorKind::V),
        Contender::Jackknife,
        Contender::Bootstrap,
        Contender::InfinitesimalJackknife,
        Contender::Target,
        Contender::Sen,
    ];

    /// Row label; analytic estimators carry their order.
    pub fn label(self, order: usize) -> String {
        match self {
            Contender::PlugIn => "plug-in".into(),
            Contender::Analytic(k) => format!("{k}(p={order})"),
            Contender::Jackknife => "jackknife".into(),
            Contender::Bootstrap => "bootstrap".into(),
            Contender::InfinitesimalJackknife => "infinitesimal-jackknife".into(),
            Contender::Target => "target".into(),
            Contender::Sen => "sen".into(),
        }
    }

    /// Whether the comparator exists for the experiment. Sen's approach needs
    /// asymptotic normality of the plug-in, which fails for the ratio and is
    /// not worked out for μ/σ.
    pub fn applicable(self, id: ExperimentId) -> bool {
        !matches!((self, id), (Contender::Sen, ExperimentId::RatioExp | ExperimentId::MuOverSigmaNormal))
    }
}

impl FromStr for Contender {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let low = s.to_ascii_lowercase();
        let head = low.split('(').next().unwrap_or_default();
        Ok(match head {
            "plug-in" | "plugin" => Contender::PlugIn,
            "s" | "t" | "v" => Contender::Analytic(head.parse().map_err(|e| CliError::Usage(format!("{e}")))?),
            "jackknife" => Contender::Jackknife,
            "bootstrap" => Contender::Bootstrap,
            "infinitesimal-jackknife" | "ij" => Contender::InfinitesimalJackknife,
            "target" => Contender::Target,
            "sen" => Contender::Sen,
            _ => return Err(CliError::Usage(format!("unknown estimator '{s}'"))),
        })
    }
}

/// Coordinate distributions; the coordinates of one observation are independent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dist {
    Normal { mean: f64, sd: f64 },
    Exponential { mean: f64 },
}

impl Dist {
    fn validate(self) -> Result<(), CliError> {
        let ok = match self {
            Dist::Normal { mean, sd } => mean.is_finite() && sd > 0.0 && sd.is_finite(),
            Dist::Exponential { mean } => mean > 0.0 && mean.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(CliError::Usage(format!("invalid distribution parameters {self:?}")))
        }
    }

    fn sample<R: Rng>(self, rng: &mut R) -> f64 {
        match self {
            Dist::Normal { mean, sd } => {
                // Box-Muller, cosine branch; u1 in (0, 1]
                let u1 = 1.0 - rng.gen::<f64>();
                let u2: f64 = rng.gen();
                mean + sd * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            }
            Dist::Exponential { mean } => -mean * (1.0 - rng.gen::<f64>()).ln(),
        }
    }

    /// E X^r.
    pub fn raw_moment(self, r: u32) -> f64 {
        match self {
            Dist::Exponential { mean } => (1..=r).map(f64::from).product::<f64>() * mean.powi(r as i32),
            Dist::Normal { mean, sd } => {
                // Σ_k C(r, k) μ^{r-k} σ^k E Z^k, E Z^k = (k - 1)!! for even k
                let mut total = 0.0;
                let mut binom = 1.0;
                for k in 0..=r {
                    if k % 2 == 0 {
                        let dfact: f64 = (1..k).step_by(2).map(f64::from).product();
                        total += binom * mean.powi((r - k) as i32) * sd.powi(k as i32) * dfact;
                    }
                    binom = binom * f64::from(r - k) / f64::from(k + 1);
                }
                total
            }
        }
    }
}

/// n i.i.d. observations, one coordinate per entry of `dists`.
pub fn draw<R: Rng>(dists: &[Dist], n: usize, rng: &mut R) -> Result<Sample<f64>, CliError> {
    if dists.is_empty() || n == 0 {
        return Err(CliError::Usage("a draw needs at least one coordinate and one observation".into()));
    }
    for d in dists {
        d.validate()?;
    }
    let mut data = Vec::with_capacity(n * dists.len());
    for _ in 0..n {
        data.extend(dists.iter().map(|d| d.sample(rng)));
    }
    Ok(Sample::new(dists.len(), data)?)
}

/// Mean-zero covariates built from monomial features of the observations.
struct Controls {
    features: Vec<Vec<u32>>,
    mean: Vec<f64>,
    /// (a, b, Cov(g_a, g_b)) over the leading `core` features
    pairs: Vec<(usize, usize, f64)>,
    /// (a, b, c, E Π(g - μ))
    triples: Vec<(usize, usize, usize, f64)>,
}

impl Controls {
    fn new(dists: &[Dist], features: Vec<Vec<u32>>, core: usize) -> Self {
        let moment = |e: &[u32]| -> f64 { dists.iter().zip(e).map(|(d, &k)| d.raw_moment(k)).product() };
        let add = |a: &[u32], b: &[u32]| -> Vec<u32> { a.iter().zip(b).map(|(x, y)| x + y).collect() };
        let mean: Vec<f64> = features.iter().map(|e| moment(e)).collect();
        let mut pairs = Vec::new();
        let mut triples = Vec::new();
        for a in 0..core {
            for b in a..core {
                let eab = moment(&add(&features[a], &features[b]));
                pairs.push((a, b, eab - mean[a] * mean[b]));
                for c in b..core {
                    let e2 = |x: usize, y: usize| moment(&add(&features[x], &features[y]));
                    let eabc = moment(&add(&add(&features[a], &features[b]), &features[c]));
                    let k = eabc - mean[a] * e2(b, c) - mean[b] * e2(a, c) - mean[c] * e2(a, b)
                        + 2.0 * mean[a] * mean[b] * mean[c];
                    triples.push((a, b, c, k));
                }
            }
        }
        Self { features, mean, pairs, triples }
    }

    fn len(&self) -> usize {
        self.features.len() + self.pairs.len() + self.triples.len()
    }

    fn covariates(&self, s: &Sample<f64>) -> Vec<f64> {
        let n = s.n() as f64;
        let mut d = vec![0.0; self.features.len()];
        for row in s.rows() {
            for (acc, e) in d.iter_mut().zip(&self.features) {
                *acc += row.iter().zip(e).map(|(x, &k)| x.powi(k as i32)).product::<f64>();
            }
        }
        for (v, m) in d.iter_mut().zip(&self.mean) {
            *v = *v / n - m;
        }
        let mut out = d.clone();
        out.extend(self.pairs.iter().map(|&(a, b, c)| d[a] * d[b] - c / n));
        out.extend(self.triples.iter().map(|&(a, b, c, k)| d[a] * d[b] * d[c] - k / (n * n)));
        out
    }
}

/// A fully specified benchmark run.
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub id: ExperimentId,
    pub grid: Vec<f64>,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub roster: Vec<Contender>,
    /// Order p of the analytic estimators.
    pub order: usize,
    pub bootstrap_replicates: usize,
    /// Infinitesimal jackknife finite-difference step, in units of observation mass.
    pub ij_step: f64,
}

impl Experiment {
    /// Default grid, full roster, p = 2, B = 1000.
    pub fn new(id: ExperimentId, n: usize, reps: usize, seed: u64) -> Self {
        Self {
            id,
            grid: id.default_grid(),
            n,
            reps,
            seed,
            roster: Contender::ALL.to_vec(),
            order: 2,
            bootstrap_replicates: 1000,
            ij_step: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.reps == 0 {
            return Err(CliError::Usage("reps must be at least 1".into()));
        }
        if self.grid.is_empty() {
            return Err(CliError::Usage("parameter grid is empty".into()));
        }
        if self.roster.is_empty() {
            return Err(CliError::Usage("estimator roster is empty".into()));
        }
        if self.order == 0 {
            return Err(CliError::Usage("order p must be at least 1".into()));
        }
        if self.grid.iter().any(|g| !g.is_finite()) {
            return Err(CliError::Usage("grid values must be finite".into()));
        }
        if self.id == ExperimentId::AlphaMuSq && self.grid.iter().any(|g| !(0.0..=1.0).contains(g)) {
            return Err(CliError::Usage("alpha-mu-sq grid values must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// Coordinate distributions, estimand and functional at one grid value.
    fn design(&self, g: f64) -> Result<(Vec<Dist>, f64, BoxedFunctional, Controls), CliError> {
        let normal = |mean| Dist::Normal { mean, sd: 1.0 };
        let exp = |mean| Dist::Exponential { mean };
        let x = |e: &[u32]| e.to_vec();
        Ok(match self.id {
            ExperimentId::AlphaMuSq => {
                let dists = vec![normal(1.0), normal(1.0)];
                let f = catalog::linear_comb_power(vec![g, 1.0 - g], 2.0)?;
                let features = vec![x(&[1, 0]), x(&[0, 1]), x(&[2, 0]), x(&[0, 2]), x(&[1, 1])];
                let c = Controls::new(&dists, features, 2);
                (dists, 1.0, Box::new(f), c)
            }
            ExperimentId::RatioExp => {
                let dists = vec![exp(g), exp(1.0)];
                let features = vec![x(&[1, 0]), x(&[0, 1]), x(&[2, 0]), x(&[0, 2]), x(&[1, 1])];
                let c = Controls::new(&dists, features, 2);
                (dists, g, Box::new(catalog::ratio_of_means()), c)
            }
            ExperimentId::SigmaExp => {
                let dists = vec![exp(g)];
                let c = Controls::new(&dists, vec![x(&[1]), x(&[2])], 2);
                (dists, g, Box::new(catalog::stddev()), c)
            }
            ExperimentId::MuOverSigmaNormal => {
                let dists = vec![normal(g)];
                let c = Controls::new(&dists, vec![x(&[1]), x(&[2])], 2);
                (dists, g, Box::new(catalog::mean_over_std()), c)
            }
        })
    }

    fn target(&self, g: f64, t: &MomentTable<f64>) -> Result<f64, CliError> {
        Ok(match self.id {
            ExperimentId::AlphaMuSq => alpha_mu_sq_target(t, g),
            ExperimentId::RatioExp => ratio_target(t)?,
            ExperimentId::SigmaExp => sigma_exp_target(t),
            ExperimentId::MuOverSigmaNormal => mu_over_sigma_normal_target(t)?,
        })
    }

    fn sen(&self, g: f64, plug_in: f64) -> f64 {
        match self.id {
            ExperimentId::AlphaMuSq => sen_alpha_mu_sq(plug_in, g, self.n),
            _ => sen_scale(plug_in, self.n),
        }
    }
}

/// One CSV row: an estimator at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub experiment: String,
    pub grid_param: f64,
    pub estimator: String,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub mean_estimate: Option<f64>,
    pub avg_abs_bias: Option<f64>,
    pub mse: Option<f64>,
    pub not_applicable: bool,
}

fn stream_rng(seed: u64, grid_idx: usize, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((grid_idx as u64) << 40) | rep as u64);
    rng
}

/// Control-variate estimate of E y: ȳ - β'c̄ with β from least squares on the
/// centred covariates. Columns are scaled first so the normal equations stay
/// well conditioned.
struct Adjuster {
    c_mean: DVector<f64>,
    /// (C_c'C_c)^+ C_c' with centred, scaled columns, one row per covariate
    proj: DMatrix<f64>,
    scale: DVector<f64>,
}

impl Adjuster {
    fn new(cov: &[Vec<f64>]) -> Option<Self> {
        let (r, p) = (cov.len(), cov.first().map_or(0, Vec::len));
        if p == 0 || r <= p + 1 {
            return None;
        }
        let mut m = DMatrix::from_fn(r, p, |i, j| cov[i][j]);
        let c_mean = DVector::from_iterator(p, m.column_iter().map(|c| c.mean()));
        let mut scale = DVector::zeros(p);
        for (j, mut col) in m.column_iter_mut().enumerate() {
            col.add_scalar_mut(-c_mean[j]);
            let s = col.norm();
            scale[j] = if s > 0.0 { s } else { 1.0 };
            col /= scale[j];
        }
        let gram = m.transpose() * &m;
        let inv = gram.pseudo_inverse(1e-12).ok()?;
        Some(Self { c_mean, proj: inv * m.transpose(), scale })
    }

    fn adjusted_mean(&self, y: &[f64]) -> f64 {
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let yc = DVector::from_iterator(y.len(), y.iter().map(|v| v - mean));
        let beta = &self.proj * yc;
        let shift: f64 = (0..beta.len()).map(|j| beta[j] / self.scale[j] * self.c_mean[j]).sum();
        mean - shift
    }
}

struct RepOut {
    values: Vec<Option<f64>>,
    cov: Vec<f64>,
}

struct GridPoint<'a> {
    exp: &'a Experiment,
    idx: usize,
    g: f64,
    dists: Vec<Dist>,
    f: BoxedFunctional,
    controls: Controls,
    plans: Vec<Option<Estimator<f64>>>,
    derivative_order: usize,
}

impl GridPoint<'_> {
    fn replicate(&self, rep: usize) -> Result<RepOut, CliError> {
        let exp = self.exp;
        let mut rng = stream_rng(exp.seed, self.idx, rep);
        let sample = draw(&self.dists, exp.n, &mut rng)?;
        let samples = std::slice::from_ref(&sample);
        let tables = tables_for(&self.f, samples, self.derivative_order)?;
        let plug_in = self.f.plug_in(&tables)?;
        let mut values = Vec::with_capacity(exp.roster.len());
        for (c, plan) in exp.roster.iter().zip(&self.plans) {
            if !c.applicable(exp.id) {
                values.push(None);
                continue;
            }
            let v = match c {
                Contender::PlugIn => plug_in,
                Contender::Analytic(_) => plan.as_ref().expect("plan built").estimate(&self.f, &tables)?.value,
                Contender::Jackknife => jackknife(&self.f, samples)?,
                Contender::Bootstrap => {
                    let mut brng = stream_rng(exp.seed ^ BOOTSTRAP_SALT, self.idx, rep);
                    bootstrap(&self.f, samples, exp.bootstrap_replicates, &mut brng)?.value
                }
                Contender::InfinitesimalJackknife => {
                    infinitesimal_jackknife(&self.f, &sample, IjForm::Normalized, exp.ij_step)?.value
                }
                Contender::Target => exp.target(self.g, &tables[0])?,
                Contender::Sen => exp.sen(self.g, plug_in),
            };
            values.push(Some(v));
        }
        Ok(RepOut { values, cov: self.controls.covariates(&sample) })
    }
}

/// Runs every grid point and returns one row per (grid point, estimator),
/// grid-major in roster order.
pub fn run_experiment(exp: &Experiment) -> Result<Vec<BenchRow>, CliError> {
    exp.validate()?;
    let mut rows = Vec::new();
    for (idx, &g) in exp.grid.iter().enumerate() {
        let (dists, theta, f, controls) = exp.design(g)?;
        let plans = exp
            .roster
            .iter()
            .map(|c| match c {
                Contender::Analytic(k) => Estimator::new(*k, exp.order, 1).map(Some),
                _ => Ok(None),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let derivative_order = plans.iter().flatten().map(Estimator::derivative_order).max().unwrap_or(0);
        let point = GridPoint { exp, idx, g, dists, f, controls, plans, derivative_order };
        // collect keeps replication order, so the sums below are thread-count independent
        let outs: Vec<RepOut> = (0..exp.reps).into_par_iter().map(|r| point.replicate(r)).collect::<Result<_, _>>()?;
        debug_assert!(outs.iter().all(|o| o.cov.len() == point.controls.len()));
        let cov: Vec<Vec<f64>> = outs.iter().map(|o| o.cov.clone()).collect();
        let adjuster = Adjuster::new(&cov);
        for (j, c) in exp.roster.iter().enumerate() {
            let mut row = BenchRow {
                experiment: exp.id.to_string(),
                grid_param: g,
                estimator: c.label(exp.order),
                n: exp.n,
                reps: exp.reps,
                seed: exp.seed,
                mean_estimate: None,
                avg_abs_bias: None,
                mse: None,
                not_applicable: !c.applicable(exp.id),
            };
            if !row.not_applicable {
                let y: Vec<f64> = outs.iter().map(|o| o.values[j].expect("applicable")).collect();
                let r = y.len() as f64;
                let mean = y.iter().sum::<f64>() / r;
                let mse = y.iter().map(|v| (v - theta) * (v - theta)).sum::<f64>() / r;
                let centre = adjuster.as_ref().map_or(mean, |a| a.adjusted_mean(&y));
                row.mean_estimate = Some(mean);
                row.avg_abs_bias = Some((centre - theta).abs());
                row.mse = Some(mse);
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Lowest-|bias| estimator per grid point, one line each.
pub fn summary(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < rows.len() {
        let j = rows[i..]
            .iter()
            .position(|r| r.grid_param != rows[i].grid_param || r.experiment != rows[i].experiment)
            .map_or(rows.len(), |k| i + k);
        let best = rows[i..j]
            .iter()
            .filter_map(|r| r.avg_abs_bias.map(|b| (b, r)))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((b, r)) = best {
            out.push_str(&format!("{} {} = {}: lowest |bias| {} ({b:.3e})\n", r.experiment, grid_name(rows[i].experiment.as_str()), r.grid_param, r.estimator));
        }
        i = j;
    }
    out
}

fn grid_name(experiment: &str) -> &'static str {
    match experiment {
        "alpha-mu-sq" => "alpha1",
        "ratio-exp" => "mu1/mu2",
        "sigma-exp" => "sigma",
        _ => "mu/sigma",
    }
}

/// Least-squares slope of log y on log x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Median wall-clock of computing moments plus the S estimate at p = 2 for
/// the standard deviation on `n` exponential observations.
pub fn time_s_estimate(n: usize, runs: usize, seed: u64) -> Result<Duration, CliError> {
    let f = catalog::stddev::<f64>();
    let est = Estimator::<f64>::new(EstimatorKind::S, 2, 1)?;
    let sample = draw(&[Dist::Exponential { mean: 1.0 }], n, &mut stream_rng(seed, 0, 0))?;
    let samples = [sample];
    let mut times = Vec::with_capacity(runs.max(1));
    for _ in 0..runs.max(1) {
        let t0 = Instant::now();
        let r = est.estimate_samples(&f, &samples)?;
        std::hint::black_box(r.value);
        times.push(t0.elapsed());
    }
    times.sort();
    Ok(times[times.len() / 2])
}
