use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use unbias_core::coefficients::d_alpha_i;
use unbias_core::estimator::s_coeff_terms;
use unbias_core::functional::{catalog, Functional};
use unbias_core::partition::{partitions_excluding_ones, sym_coeff_table};
use unbias_core::{discrepancy, BigRational, Estimator, EstimatorKind, Scalar};

use crate::bench::{self, Contender, Experiment, ExperimentId};
use crate::error::CliError;
use crate::io::{parse_decimal, read_sample};
use crate::report::{self, CoeffRow, Format, Render};

/// Analytic bias reduction for smooth statistical functionals.
#[derive(Debug, Parser)]
#[command(name = "unbias", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print coefficient tables: d_{iπ} (S), c(π) (V) or D_{αi} (T).
    Coeffs(CoeffsArgs),
    /// Estimate a functional from CSV samples.
    Estimate(EstimateArgs),
    /// Run a seeded Monte Carlo comparison and write CSV.
    Bench(BenchArgs),
    /// List printed formulas that disagree with the derivation.
    Discrepancies(FormatArgs),
}

#[derive(Debug, Args)]
pub struct FormatArgs {
    #[arg(long, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value = "s")]
    pub kind: EstimatorKind,
    #[command(flatten)]
    pub output: FormatArgs,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// CSV file per sample, in order.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub functional: String,
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long, default_value = "s")]
    pub kind: EstimatorKind,
    /// Parse decimals exactly and compute in rational arithmetic.
    #[arg(long)]
    pub exact: bool,
    /// Exponent for power-of-mean and linear-comb-power.
    #[arg(long)]
    pub q: Option<f64>,
    /// Comma-separated weights for linear-comb-power.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<String>,
    /// r for central-moment.
    #[arg(long)]
    pub moment_order: Option<usize>,
    #[command(flatten)]
    pub output: FormatArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub experiment: ExperimentId,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Order of the analytic estimators.
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    /// Comma-separated parameter grid (defaults depend on the experiment).
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
    /// Comma-separated roster, e.g. plug-in,s,jackknife.
    #[arg(long, value_delimiter = ',')]
    pub estimators: Vec<Contender>,
    #[arg(long, default_value_t = 1000)]
    pub bootstrap_replicates: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p)?);
            f.write_all(text.as_bytes())?;
            f.flush()?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Coeffs(a) => coeffs(&a),
        Command::Estimate(a) => {
            if a.exact {
                estimate::<BigRational>(&a)
            } else {
                estimate::<f64>(&a)
            }
        }
        Command::Bench(a) => bench(&a),
        Command::Discrepancies(a) => emit(&report::discrepancies(&discrepancy::discrepancies(), a.format)?, a.out.as_ref()),
    }
}

/// Orders whose tables were checked against printed references.
const CHECKED_S_ORDER: usize = 4;

pub fn coefficient_rows(kind: EstimatorKind, p: usize) -> Result<(Vec<CoeffRow>, Vec<String>), CliError> {
    if p == 0 {
        return Err(CliError::Usage("p must be at least 1".into()));
    }
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let ratio = |r: &BigRational| r.to_string();
    match kind {
        EstimatorKind::S | EstimatorKind::PlugIn => {
            for i in 1..p {
                for (pi, d) in s_coeff_terms(i) {
                    rows.push(CoeffRow { table: "d", order: i, sub: None, partition: pi.to_string(), coefficient: ratio(&d) });
                }
            }
            if p > CHECKED_S_ORDER + 1 {
                notes.push(format!(
                    "warning: d tables for i > {CHECKED_S_ORDER} are derived only; printed versions disagree (see `discrepancies`)"
                ));
            }
        }
        EstimatorKind::V => {
            for r in 2..=2 * p - 2 {
                let table = sym_coeff_table(r);
                for pi in partitions_excluding_ones(r) {
                    let c = table.get(&pi).cloned().unwrap_or_default();
                    rows.push(CoeffRow { table: "c", order: r, sub: None, partition: pi.to_string(), coefficient: c.to_string() });
                }
            }
        }
        EstimatorKind::T => {
            for alpha in 0..p {
                for i in 0..=alpha {
                    let d = d_alpha_i(alpha, i)?;
                    rows.push(CoeffRow { table: "D", order: alpha, sub: Some(i), partition: String::new(), coefficient: ratio(&d) });
                }
            }
        }
    }
    Ok((rows, notes))
}

fn coeffs(a: &CoeffsArgs) -> Result<(), CliError> {
    let (rows, mut notes) = coefficient_rows(a.kind, a.p)?;
    if a.kind != EstimatorKind::PlugIn {
        match unbias_core::estimator::term_count(a.kind, a.p, a.k) {
            Ok(n) => notes.push(format!("{} estimate at p = {}, k = {}: {n} terms", a.kind, a.p, a.k)),
            Err(_) => {
                let n = unbias_core::estimator::derived_term_count(a.kind, a.p, a.k)?;
                notes.push(format!("{} estimate at p = {}, k = {}: {n} terms (derived)", a.kind, a.p, a.k));
            }
        }
    }
    for n in notes.iter().filter(|n| n.starts_with("warning")) {
        eprintln!("{n}");
    }
    emit(&report::coefficients(&rows, &notes, a.output.format)?, a.output.out.as_ref())
}

type DynFunctional<S> = Box<dyn Functional<S> + Send + Sync>;

/// Builds a catalog functional by name for `inputs` samples.
pub fn functional_by_name<S: Scalar + Send + Sync + 'static>(
    name: &str,
    inputs: usize,
    dims: &[usize],
    q: Option<f64>,
    alpha: &[String],
    moment_order: Option<usize>,
) -> Result<DynFunctional<S>, CliError> {
    let need_q = || q.ok_or_else(|| CliError::Usage(format!("{name} needs --q")));
    let one_sample = |expected: usize| {
        if inputs != 1 {
            Err(CliError::Core(unbias_core::Error::Arity { expected, got: inputs }))
        } else {
            Ok(())
        }
    };
    Ok(match name {
        "power-of-mean" => {
            one_sample(1)?;
            Box::new(catalog::power_of_mean::<S>(need_q()?))
        }
        "linear-comb-power" => {
            let q = need_q()?;
            let w = alpha
                .iter()
                .map(|s| parse_decimal(s).map(|r| S::from_ratio(&r)))
                .collect::<Option<Vec<S>>>()
                .ok_or_else(|| CliError::Usage("--alpha must be comma-separated decimals".into()))?;
            if w.is_empty() {
                return Err(CliError::Usage("linear-comb-power needs --alpha".into()));
            }
            if inputs == 1 && dims.first() != Some(&1) {
                Box::new(catalog::linear_comb_power(w, q)?)
            } else {
                Box::new(catalog::linear_comb_power_k(w, q)?)
            }
        }
        "ratio-of-means" => {
            one_sample(1)?;
            Box::new(catalog::ratio_of_means::<S>())
        }
        "central-moment" => {
            one_sample(1)?;
            let r = moment_order.ok_or_else(|| CliError::Usage("central-moment needs --moment-order".into()))?;
            if r == 0 {
                return Err(CliError::Usage("--moment-order must be at least 1".into()));
            }
            Box::new(catalog::central_moment(r))
        }
        "stddev" => {
            one_sample(1)?;
            Box::new(catalog::stddev::<S>())
        }
        "mean-over-std" => {
            one_sample(1)?;
            Box::new(catalog::mean_over_std::<S>())
        }
        "skewness" => {
            one_sample(1)?;
            Box::new(catalog::skewness::<S>())
        }
        "harmonic-product" => Box::new(catalog::harmonic_product::<S>()),
        _ => {
            return Err(CliError::Usage(format!("unknown functional '{name}' (one of {})", catalog::NAMES.join(", "))))
        }
    })
}

fn estimate<S: Render + Send + Sync + 'static>(a: &EstimateArgs) -> Result<(), CliError> {
    let samples = a.inputs.iter().map(|p| read_sample::<S>(p)).collect::<Result<Vec<_>, _>>()?;
    let dims: Vec<usize> = samples.iter().map(|s| s.dim()).collect();
    let f = functional_by_name::<S>(&a.functional, samples.len(), &dims, a.q, &a.alpha, a.moment_order)?;
    if f.arity() != samples.len() {
        return Err(unbias_core::Error::Arity { expected: f.arity(), got: samples.len() }.into());
    }
    let est = Estimator::<S>::new(a.kind, a.p, samples.len())?;
    let r = est.estimate_samples(&f, &samples)?;
    emit(&report::estimate(&a.functional, &r, a.output.format)?, a.output.out.as_ref())
}

pub fn experiment_from(a: &BenchArgs) -> Experiment {
    let mut exp = Experiment::new(a.experiment, a.n, a.reps, a.seed);
    exp.order = a.p;
    exp.bootstrap_replicates = a.bootstrap_replicates;
    if !a.grid.is_empty() {
        exp.grid = a.grid.clone();
    }
    if !a.estimators.is_empty() {
        exp.roster = a.estimators.clone();
    }
    exp
}

fn bench(a: &BenchArgs) -> Result<(), CliError> {
    let exp = experiment_from(a);
    let rows = bench::run_experiment(&exp)?;
    match &a.out {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display())))?;
            bench::write_csv(&rows, BufWriter::new(f))?;
            print!("{}", bench::summary(&rows));
        }
        None => {
            bench::write_csv(&rows, std::io::stdout().lock())?;
            eprint!("{}", bench::summary(&rows));
        }
    }
    Ok(())
}
