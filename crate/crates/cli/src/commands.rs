//! One function per subcommand, each producing a [`Report`].

use std::path::{Path, PathBuf};

use lfsm_core::decomposition::{scan_existence_frontier, DEFAULT_TOL};
use lfsm_core::estimation::{estimate, estimate_sigma};
use lfsm_core::evaluation::{
    cartesian_grid, run_backtest, run_simulation_study, BacktestConfig, StudyConfig, StudyTable,
    WindowStatus,
};
use lfsm_core::forecast::predict_next;
use lfsm_core::model::simulate_lfsm;
use lfsm_core::{
    EstimationConfig, LfsmError, LfsmParams, RngState, SimConfig, SolverRegistry, TimeSeries,
};

use crate::cli::{
    BacktestArgs, DecomposeArgs, EstimateArgs, EstimationArgs, ForecastArgs, FrontierArgs,
    InputArgs, SimulateArgs, StudyArgs,
};
use crate::error::{CliError, CliResult};
use crate::io::{emit_report, ingest_csv, Cell, Format, Report, Table};
use crate::settings::{parse_grid, pick, pick_dims, pick_grid, FileConfig, ReproduceConfig};

pub const DEFAULT_REPRODUCE: &str = include_str!("../configs/reproduce.toml");

const DEFAULT_THETAS: [f64; 20] = [
    1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0,
    18.0, 19.0, 20.0,
];

/// A report to write, plus an error to raise once it is written.
pub struct Outcome {
    pub report: Report,
    pub after: Option<CliError>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self { report, after: None }
    }
}

fn required(flag: Option<f64>, file: Option<f64>, name: &str) -> CliResult<f64> {
    flag.or(file)
        .ok_or_else(|| CliError::input(format!("--{name} is required (flag or config)")))
}

fn load_series(args: &InputArgs, cfg: &FileConfig) -> CliResult<TimeSeries> {
    let path = args
        .input
        .clone()
        .or_else(|| cfg.input.as_ref().map(PathBuf::from))
        .ok_or_else(|| CliError::input("--input is required"))?;
    ingest_csv(&path, args.dt.or(cfg.dt))
}

fn estimation_config(args: &EstimationArgs, cfg: &FileConfig, dt: f64) -> CliResult<EstimationConfig> {
    let tau0 = pick(args.tau0, cfg.tau0, dt);
    let theta_grid = pick_grid(args.theta_grid.as_deref(), cfg.theta_grid.as_ref(), &DEFAULT_THETAS)?;
    let tau_grid = match (args.tau_grid.as_deref(), cfg.tau_grid.as_ref()) {
        (Some(s), _) => Some(parse_grid(s)?),
        (None, Some(g)) => Some(g.resolve()?),
        (None, None) => None,
    };
    let est = EstimationConfig { tau0, theta_grid, tau_grid };
    est.validate(dt)?;
    Ok(est)
}

pub fn simulate(args: &SimulateArgs, cfg: &FileConfig) -> CliResult<Outcome> {
    let params = LfsmParams::new(
        required(args.model.alpha, cfg.alpha, "alpha")?,
        required(args.model.hurst, cfg.hurst, "hurst")?,
        pick(args.model.sigma, cfg.sigma, 1.0),
    )?;
    let defaults = SimConfig::default();
    let sim = SimConfig {
        dt: pick(args.dt, cfg.dt, defaults.dt),
        horizon: pick(args.horizon, cfg.horizon, defaults.horizon),
        truncation: pick(args.truncation, cfg.truncation, defaults.truncation),
    };
    let every = pick(args.every, cfg.every, 1);
    let mut rng = RngState::new(pick(args.seed, cfg.seed, 0));
    let path = simulate_lfsm(&params, &sim, &mut rng)?.subsample(every)?;
    let mut table = Table::new(&["t", "value"]);
    for (i, &v) in path.values().iter().enumerate() {
        table.push(vec![path.time(i).into(), v.into()]);
    }
    Ok(Report::single("path", table).into())
}

pub fn estimate_cmd(args: &EstimateArgs, cfg: &FileConfig) -> CliResult<Outcome> {
    let series = load_series(&args.input, cfg)?;
    let est_cfg = estimation_config(&args.estimation, cfg, series.dt())?;
    let est = estimate(&series, &est_cfg)?;
    let table = Table::record(vec![
        ("alpha_hat", est.alpha_hat.into()),
        ("h_hat", est.h_hat.into()),
        ("sigma_hat", est.sigma_hat.into()),
        ("tau0", est_cfg.tau0.into()),
        ("n", series.len().into()),
        ("alpha_points", est.alpha_fit.points_used.into()),
        ("h_points", est.h_fit.points_used.into()),
    ]);
    Ok(Report::single("estimate", table).into())
}

fn single_dim(flag: Option<&str>, cfg: &FileConfig, default: usize) -> CliResult<usize> {
    let dims = pick_dims(flag, cfg.d.as_ref(), &[default])?;
    match dims[..] {
        [d] => Ok(d),
        _ => Err(CliError::input("--d takes a single dimension here")),
    }
}

pub fn decompose(args: &DecomposeArgs, cfg: &FileConfig) -> CliResult<Outcome> {
    let alpha = required(args.model.alpha, cfg.alpha, "alpha")?;
    let hurst = required(args.model.hurst, cfg.hurst, "hurst")?;
    let t = pick(args.t, cfg.t, 1);
    let d = single_dim(args.d.as_deref(), cfg, 5)?;
    let tol = pick(args.tol, cfg.tol, DEFAULT_TOL);
    let name = pick(args.solver.clone(), cfg.solver.clone(), SolverRegistry::AUTO.to_string());
    let registry = SolverRegistry::default();
    let solver = registry.select(&name, alpha, hurst).map_err(LfsmError::from)?;
    let (coeffs, report) = solver.solve(alpha, hurst, t, d, tol).map_err(LfsmError::from)?;

    let mut table = Table::new(&["i", "j", "a"]);
    for i in 0..d {
        for j in 0..=i {
            table.push(vec![i.into(), j.into(), coeffs.get(i, j).into()]);
        }
    }
    let summary = Table::record(vec![
        ("solver", report.solver.into()),
        ("alpha", alpha.into()),
        ("hurst", hurst.into()),
        ("t", t.into()),
        ("d", d.into()),
        ("converged", report.converged.into()),
        ("max_residual", report.max_residual.into()),
        ("iterations", report.total_iterations().into()),
    ]);
    Ok(Report { name: "coefficients", main: table, sections: vec![("report", summary)] }.into())
}

pub fn frontier(args: &FrontierArgs, cfg: &FileConfig) -> CliResult<Outcome> {
    let alphas = pick_grid(args.alpha_grid.as_deref(), cfg.alpha_grid.as_ref(), &parse_grid("0.2:2:0.1")?)?;
    let hursts = pick_grid(args.hurst_grid.as_deref(), cfg.hurst_grid.as_ref(), &parse_grid("0.05:0.95:0.05")?)?;
    let t = pick(args.t, cfg.t, 1);
    let d = single_dim(args.d.as_deref(), cfg, 7)?;
    Ok(Report::single("frontier", frontier_table(&alphas, &hursts, t, d)?).into())
}

fn frontier_table(alphas: &[f64], hursts: &[f64], t: usize, d: usize) -> CliResult<Table> {
    if t == 0 || d == 0 {
        return Err(CliError::input("frontier needs t >= 1 and d >= 1"));
    }
    let mut table = Table::new(&["alpha", "hurst", "exists", "failing_row", "failing_col"]);
    for row in scan_existence_frontier(alphas, hursts, t, d) {
        let (r, c) = row.failing_equation.unzip();
        table.push(vec![row.alpha.into(), row.hurst.into(), row.exists.into(), r.into(), c.into()]);
    }
    Ok(table)
}

pub fn forecast(args: &ForecastArgs, cfg: &FileConfig) -> CliResult<Outcome> {
    let series = load_series(&args.input, cfg)?;
    let dims = pick_dims(args.d.as_deref(), cfg.d.as_ref(), &[5])?;
    let (alpha, hurst, sigma) = (
        args.model.alpha.or(cfg.alpha),
        args.model.hurst.or(cfg.hurst),
        args.model.sigma.or(cfg.sigma),
    );
    let est_cfg = estimation_config(&args.estimation, cfg, series.dt())?;
    let (alpha, hurst) = match (alpha, hurst) {
        (Some(a), Some(h)) => (a, h),
        _ => {
            let est = estimate(&series, &est_cfg)?;
            (alpha.unwrap_or(est.alpha_hat), hurst.unwrap_or(est.h_hat))
        }
    };
    let sigma = match sigma {
        Some(s) => s,
        None if alpha > 1.0 => estimate_sigma(&series, est_cfg.tau0, alpha)?,
        None => 1.0,
    };
    let params = LfsmParams::new(alpha, hurst, sigma)?;

    let columns = [
        "predicted", "predicted_increment", "residual_scale", "method", "no_signal", "d", "alpha",
        "hurst", "sigma",
    ];
    let mut table = Table::new(&columns);
    for &d in &dims {
        let n = series.len();
        if d < 2 || d > n {
            return Err(CliError::input(format!("dimension {d} needs 2 <= d <= {n}")));
        }
        let f = predict_next(&series.values()[n - d..], &params)?;
        table.push(vec![
            f.predicted.into(),
            f.predicted_increment.into(),
            f.residual_scale.into(),
            f.method.as_str().into(),
            f.no_signal.into(),
            d.into(),
            alpha.into(),
            hurst.into(),
            sigma.into(),
        ]);
    }
    table.record = dims.len() == 1;
    Ok(Report::single("forecast", table).into())
}

pub fn study(args: &StudyArgs, cfg: &FileConfig) -> CliResult<Outcome> {
    let alphas = pick_grid(args.alpha_grid.as_deref(), cfg.alpha_grid.as_ref(), &[1.5])?;
    let hursts = pick_grid(args.hurst_grid.as_deref(), cfg.hurst_grid.as_ref(), &parse_grid("0.1:0.9:0.1")?)?;
    let defaults = StudyConfig::default();
    let study = StudyConfig {
        series_length: pick(args.length, cfg.length, defaults.series_length),
        d_set: pick_dims(args.d.as_deref(), cfg.d.as_ref(), &defaults.d_set)?,
        param_grid: cartesian_grid(&alphas, &hursts),
        master_seed: pick(args.seed, cfg.seed, defaults.master_seed),
        sim: SimConfig {
            dt: pick(args.dt, cfg.dt, defaults.sim.dt),
            truncation: pick(args.truncation, cfg.truncation, defaults.sim.truncation),
            ..defaults.sim
        },
        spacing: pick(args.spacing, cfg.spacing, defaults.spacing),
    };
    let table = run_simulation_study(&study)?;
    Ok(Report::single("study", study_table(&table)).into())
}

fn study_table(t: &StudyTable) -> Table {
    let mut table = Table::new(&["alpha", "hurst", "d", "hit_ratio", "n_forecasts", "exists"]);
    for r in &t.rows {
        table.push(vec![
            r.alpha.into(),
            r.hurst.into(),
            r.d.into(),
            r.hit_ratio.into(),
            r.n_forecasts.into(),
            r.exists.into(),
        ]);
    }
    table
}

pub fn backtest(args: &BacktestArgs, cfg: &FileConfig) -> CliResult<Outcome> {
    let series = load_series(&args.input, cfg)?;
    let d_set = pick_dims(args.d.as_deref(), cfg.d.as_ref(), &(2..=12).collect::<Vec<_>>())?;
    let mut bt = BacktestConfig::new(pick(args.window, cfg.window, 720), d_set.clone());
    bt.step = pick(args.step, cfg.step, 1);
    bt.stride = pick(args.stride, cfg.stride, 1);
    bt.estimation = Some(estimation_config(&args.estimation, cfg, series.dt())?);
    let out = run_backtest(&series, &bt)?;

    let mut columns: Vec<String> = [
        "end", "time", "status", "alpha_hat", "h_hat", "sigma_hat", "realized_increment",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    columns.extend(d_set.iter().map(|d| format!("sign_d{d}")));
    let mut windows = Table { columns, rows: Vec::new(), record: false };
    for w in &out.windows {
        let status = match w.status {
            WindowStatus::Ok => "ok",
            WindowStatus::EstimationFailed => "estimation_failed",
        };
        let mut row: Vec<Cell> = vec![
            w.end.into(),
            w.time.into(),
            status.into(),
            w.alpha_hat.into(),
            w.h_hat.into(),
            w.sigma_hat.into(),
            w.realized_increment.into(),
        ];
        row.extend(w.forecasts.iter().map(|f| Cell::from(f.sign)));
        windows.push(row);
    }

    let mut summary = Table::new(&[
        "d", "hit_ratio", "matches", "n_forecasts", "n_no_signal", "n_zero_realized", "n_failed",
    ]);
    for s in &out.summaries {
        summary.push(vec![
            s.d.into(),
            s.hit_ratio.into(),
            s.matches.into(),
            s.n_forecasts.into(),
            s.n_no_signal.into(),
            s.n_zero_realized.into(),
            s.n_failed.into(),
        ]);
    }
    let after = out.total_failure().then(|| {
        CliError::Numerical(format!(
            "no usable forecast: estimation failed in {} of {} windows",
            out.n_estimation_failures,
            out.windows.len()
        ))
    });
    Ok(Outcome {
        report: Report { name: "windows", main: windows, sections: vec![("summary", summary)] },
        after,
    })
}

fn reproduce_config(cfg: &FileConfig) -> CliResult<ReproduceConfig> {
    if let Some(r) = &cfg.reproduce {
        return Ok(r.clone());
    }
    FileConfig::parse(DEFAULT_REPRODUCE)
        .ok()
        .and_then(|c| c.reproduce)
        .ok_or_else(|| CliError::input("built-in reproduce config is unreadable"))
}

/// Writes the frontier and both hit-ratio scans into `dir`.
pub fn reproduce(cfg: &FileConfig, dir: &Path, format: Format) -> CliResult<Outcome> {
    let r = reproduce_config(cfg)?;
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;

    let mut outputs: Vec<(&str, Table)> = Vec::new();
    let f = &r.frontier;
    outputs.push(("frontier", frontier_table(&f.alpha_grid.resolve()?, &f.hurst_grid.resolve()?, f.t, f.d)?));

    let h = &r.hit_ratio_by_hurst;
    let by_hurst = StudyConfig {
        series_length: h.length,
        d_set: h.d.clone(),
        param_grid: cartesian_grid(&[h.alpha], &h.hurst_grid.resolve()?),
        master_seed: r.seed,
        ..StudyConfig::default()
    };
    outputs.push(("study_hurst", study_table(&run_simulation_study(&by_hurst)?)));

    let a = &r.hit_ratio_by_alpha;
    let by_alpha = StudyConfig {
        series_length: a.length,
        d_set: a.d.clone(),
        param_grid: cartesian_grid(&a.alpha_grid.resolve()?, &[a.hurst]),
        master_seed: r.seed,
        ..StudyConfig::default()
    };
    outputs.push(("study_alpha", study_table(&run_simulation_study(&by_alpha)?)));

    let mut index = Table::new(&["file", "rows"]);
    for (name, table) in outputs {
        let path = dir.join(format!("{name}.{}", format.extension()));
        emit_report(&Report::single(name, table.clone()), format, Some(&path))?;
        index.push(vec![path.display().to_string().as_str().into(), table.rows.len().into()]);
    }
    Ok(Report::single("files", index).into())
}
