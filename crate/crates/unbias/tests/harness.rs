use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unbias::bench::{draw, run_experiment, write_csv, Contender, Dist, Experiment, ExperimentId};
use unbias_core::{central_moments, EstimatorKind};

fn small(id: ExperimentId) -> Experiment {
    let mut e = Experiment::new(id, 30, 40, 11);
    e.bootstrap_replicates = 40;
    e
}

#[test]
fn rows_cover_grid_and_roster() {
    for id in ExperimentId::ALL {
        let e = small(id);
        let rows = run_experiment(&e).unwrap();
        assert_eq!(rows.len(), e.grid.len() * e.roster.len());
        for r in &rows {
            assert_eq!(r.seed, 11);
            assert_eq!(r.reps, 40);
            if let (Some(b), Some(m)) = (r.avg_abs_bias, r.mse) {
                assert!(m >= 0.0 && b >= 0.0);
            } else {
                assert!(r.not_applicable);
            }
        }
    }
}

#[test]
fn mse_bounds_squared_bias_of_the_mean() {
    let rows = run_experiment(&small(ExperimentId::SigmaExp)).unwrap();
    let e = small(ExperimentId::SigmaExp);
    for (r, g) in rows.iter().zip(e.grid.iter().flat_map(|g| std::iter::repeat_n(*g, e.roster.len()))) {
        let mean_bias = r.mean_estimate.unwrap() - g;
        assert!(r.mse.unwrap() >= mean_bias * mean_bias - 1e-12);
    }
}

#[test]
fn roster_order_does_not_change_numbers() {
    let mut a = small(ExperimentId::RatioExp);
    a.roster = vec![Contender::PlugIn, Contender::Bootstrap, Contender::Analytic(EstimatorKind::S), Contender::Jackknife];
    let mut b = a.clone();
    b.roster.reverse();
    let ra = run_experiment(&a).unwrap();
    let mut rb = run_experiment(&b).unwrap();
    for chunk in rb.chunks_mut(4) {
        chunk.reverse();
    }
    assert_eq!(ra, rb);
}

#[test]
fn single_replication_is_reproducible() {
    let mut e = Experiment::new(ExperimentId::MuOverSigmaNormal, 25, 1, 3);
    e.bootstrap_replicates = 20;
    let mut bytes = Vec::new();
    for _ in 0..2 {
        let mut out = Vec::new();
        write_csv(&run_experiment(&e).unwrap(), &mut out).unwrap();
        bytes.push(out);
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn seeds_change_the_draws() {
    let e = small(ExperimentId::SigmaExp);
    let mut f = e.clone();
    f.seed = 12;
    assert_ne!(run_experiment(&e).unwrap()[0].mean_estimate, run_experiment(&f).unwrap()[0].mean_estimate);
}

#[test]
fn exponential_mean_settles() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let s = draw(&[Dist::Exponential { mean: 2.0 }], 200_000, &mut rng).unwrap();
    let mean = s.values().iter().sum::<f64>() / s.n() as f64;
    assert!((mean - 2.0).abs() < 0.02);
}

#[test]
fn fixed_stream_fixed_sample() {
    let d = [Dist::Normal { mean: 0.0, sd: 1.0 }];
    let a = draw(&d, 50, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    let b = draw(&d, 50, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn normal_kurtosis_is_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let s = draw(&[Dist::Normal { mean: 0.0, sd: 1.0 }], 1_000_000, &mut rng).unwrap();
    let b4 = central_moments(&s, 4).unwrap().standardized(4).unwrap();
    assert!((b4 - 3.0).abs() < 0.05, "{b4}");
}

#[test]
fn invalid_experiments_are_rejected() {
    let mut e = small(ExperimentId::AlphaMuSq);
    e.grid = vec![1.5];
    assert!(run_experiment(&e).is_err());
    e.grid = vec![];
    assert!(run_experiment(&e).is_err());
    let mut e = small(ExperimentId::SigmaExp);
    e.roster.clear();
    assert!(run_experiment(&e).is_err());
    let mut e = small(ExperimentId::SigmaExp);
    e.grid = vec![-1.0];
    assert!(run_experiment(&e).is_err());
}
