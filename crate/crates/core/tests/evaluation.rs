use lfsm_core::evaluation::{cartesian_grid, run_backtest, run_simulation_study, BacktestConfig, StudyConfig};
use lfsm_core::model::{simulate_lfsm, LfsmParams, SimConfig};
use lfsm_core::RngState;

#[test]
fn hit_ratio_minimum_sits_at_levy_exponent() {
    let mut hursts: Vec<f64> = (7..=19).map(|k| k as f64 / 20.0).collect();
    hursts.push(2.0 / 3.0);
    let cfg = StudyConfig {
        series_length: 20_001,
        d_set: vec![2],
        param_grid: cartesian_grid(&[1.5], &hursts),
        master_seed: 11,
        ..StudyConfig::default()
    };
    let table = run_simulation_study(&cfg).unwrap();
    let best = table
        .rows
        .iter()
        .min_by(|a, b| a.hit_ratio.unwrap().total_cmp(&b.hit_ratio.unwrap()))
        .unwrap();
    assert!((best.hurst - 2.0 / 3.0).abs() <= 0.05 + 1e-12, "minimum at H={}", best.hurst);
}

#[test]
fn larger_d_does_not_hurt_antipersistent_cells() {
    let cfg = StudyConfig {
        d_set: vec![2, 5, 20],
        param_grid: vec![(1.5, 0.3), (1.8, 0.2), (1.2, 0.4)],
        master_seed: 12,
        ..StudyConfig::default()
    };
    let table = run_simulation_study(&cfg).unwrap();
    for &(alpha, hurst) in &cfg.param_grid {
        let base = table.get(alpha, hurst, 2).unwrap();
        let noise = 3.0 * (0.25 / base.n_forecasts as f64).sqrt();
        for d in [5, 20] {
            let row = table.get(alpha, hurst, d).unwrap();
            assert!(row.exists);
            assert!(
                row.hit_ratio.unwrap() >= base.hit_ratio.unwrap() - noise,
                "({alpha},{hurst}) d={d}: {:?} vs {:?}",
                row.hit_ratio,
                base.hit_ratio
            );
        }
    }
}

#[test]
fn persistent_and_antipersistent_cells_beat_coin_flip() {
    let cfg = StudyConfig {
        d_set: vec![2],
        param_grid: vec![(1.8, 0.9), (1.8, 0.2)],
        master_seed: 13,
        ..StudyConfig::default()
    };
    let table = run_simulation_study(&cfg).unwrap();
    for row in &table.rows {
        assert!(row.hit_ratio.unwrap() > 0.55, "{row:?}");
    }
}

#[test]
fn backtest_reports_every_dimension() {
    let p = LfsmParams::standard(1.7, 0.8).unwrap();
    let sim = SimConfig { dt: 0.01, horizon: 1199.0, truncation: 50.0 };
    let series = simulate_lfsm(&p, &sim, &mut RngState::new(3)).unwrap().subsample(100).unwrap();
    let cfg = BacktestConfig::new(500, (2..=12).collect());
    let report = run_backtest(&series, &cfg).unwrap();
    assert_eq!(report.windows.len(), 1200 - 500);
    assert_eq!(report.summaries.len(), 11);
    for s in &report.summaries {
        assert_eq!(s.n_forecasts + s.n_failed, report.windows.len());
        let ratio = s.hit_ratio.unwrap();
        assert!((0.0..=1.0).contains(&ratio));
    }
    assert!(!report.total_failure());
    let again = run_backtest(&series, &cfg).unwrap();
    assert_eq!(report, again);
}
