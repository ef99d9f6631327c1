//! One function per subcommand; each produces a result table and a short
//! human summary (printed to stderr by the caller).

use std::collections::BTreeMap;

use anyhow::{anyhow, Result};
use rayon::prelude::*;

use mislearn::beliefs::ObsMode;
use mislearn::benchmarks::{fosd_report, simulate_benchmark_path, BenchmarkPath};
use mislearn::decision::value_of_education;
use mislearn::dynamics::{break_time_experiment, simulate_paths};
use mislearn::rng::{substream, uniform_draw};
use mislearn::statics::{early_values_table, run_sweep, SweepSpec, SweepTarget};
use mislearn::welfare::{discounted_welfare_mc, myopic_subsidy, target_break_subsidy, SubsidyRule};

use crate::config::{RunConfig, RunKind};
use crate::output::{fmt_sig12, Cell, Table, SCHEMA_VERSION};

/// Result of one command: the table to serialize and a summary for stderr.
pub struct CommandOutput {
    pub table: Table,
    pub summary: Vec<String>,
}

fn base_metadata(config: &RunConfig) -> BTreeMap<String, String> {
    let mut metadata = config.metadata().clone();
    // the output location is self-referential and irrelevant to reproducing
    // the data, so identical runs stay bit-identical wherever they land
    metadata.remove("out.path");
    metadata.insert(
        "artifact.version".to_string(),
        env!("CARGO_PKG_VERSION").to_string(),
    );
    metadata.insert("schema.version".to_string(), SCHEMA_VERSION.to_string());
    metadata.insert("experiment".to_string(), config.kind.name().to_string());
    metadata
}

pub fn run(config: &RunConfig) -> Result<CommandOutput> {
    match config.kind {
        RunKind::Simulate => simulate(config),
        RunKind::Value => value(config),
        RunKind::Benchmarks => benchmarks(config),
        RunKind::BreakTime => breaktime(config),
        RunKind::Welfare => welfare(config),
        RunKind::Subsidy => subsidy(config),
        RunKind::Sweep => sweep(config),
        RunKind::EarlyTable => earlytable(config),
    }
}

fn simulate(config: &RunConfig) -> Result<CommandOutput> {
    let sim = config.sim_config()?;
    let paths = simulate_paths(&sim)?;
    let mut table = base_metadata(config).into_table(vec![
        "rep", "theta", "t", "a", "e", "y", "cost", "delta_v", "L_U", "L_E", "w",
    ]);
    let mut onsets = 0usize;
    let mut breaks = 0usize;
    let mut welfare_sum = 0.0;
    let mut educations = 0usize;
    let mut periods = 0usize;
    for (rep, path) in paths.iter().enumerate() {
        if path.events.incorrect_onset.is_some() {
            onsets += 1;
        }
        if path.events.break_period.is_some() {
            breaks += 1;
        }
        for p in &path.periods {
            periods += 1;
            welfare_sum += p.welfare;
            educations += p.educated as usize;
            let point = path.beliefs.point(p.t);
            table.push(vec![
                Cell::Int(rep as i64),
                Cell::from_bool(path.theta),
                Cell::Int(p.t as i64),
                Cell::from_bool(p.action),
                Cell::from_bool(p.educated),
                p.tag.map(Cell::from_bool).unwrap_or(Cell::Empty),
                Cell::Float(p.cost),
                Cell::Float(p.delta_v),
                Cell::Float(point.l_u),
                Cell::Float(point.l_e),
                Cell::Float(p.welfare),
            ]);
        }
    }
    let summary = vec![
        format!(
            "simulated {} paths x {} periods (seed {})",
            paths.len(),
            sim.horizon,
            sim.seed
        ),
        format!(
            "mean per-period welfare {:.6}, education rate {:.6}",
            welfare_sum / periods as f64,
            educations as f64 / periods as f64
        ),
        format!("incorrect-cascade onsets: {onsets}, breaks: {breaks}"),
    ];
    Ok(CommandOutput { table, summary })
}

fn value(config: &RunConfig) -> Result<CommandOutput> {
    let params = config.params()?;
    let l_u: f64 = config.parse("value.lu")?;
    let l_e: f64 = config.parse("value.le")?;
    let v = value_of_education(l_u, l_e, &params);
    let mut table = base_metadata(config).into_table(vec![
        "L_U",
        "L_E",
        "delta_v",
        "case",
        "acc_educated",
        "acc_uneducated",
    ]);
    table.push(vec![
        Cell::Float(l_u),
        Cell::Float(l_e),
        Cell::Float(v.delta_v),
        Cell::Text(v.case_label.to_string()),
        Cell::Float(v.acc_educated),
        Cell::Float(v.acc_uneducated),
    ]);
    let summary = vec![format!(
        "delta_v = {} case = {} (acc_educated = {}, acc_uneducated = {})",
        fmt_sig12(v.delta_v),
        v.case_label,
        fmt_sig12(v.acc_educated),
        fmt_sig12(v.acc_uneducated)
    )];
    Ok(CommandOutput { table, summary })
}

fn benchmarks(config: &RunConfig) -> Result<CommandOutput> {
    let q: f64 = config.parse("bench.q")?;
    let qhat: f64 = config.parse("bench.qhat")?;
    let mu0: f64 = config.parse("model.mu0")?;
    let eps: f64 = config.parse("model.epsilon")?;
    let horizon: usize = config.parse("sim.horizon")?;
    let reps: usize = config.parse("sim.reps")?;
    let seed: u64 = config.parse("sim.seed")?;
    let tolerance: f64 = config.parse("bench.fosd_tol")?;
    let theta_pin = config.theta()?;
    let paths: Vec<BenchmarkPath<f64>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = substream(seed, rep as u64);
            let theta = theta_pin.unwrap_or_else(|| uniform_draw::<f64, _>(&mut rng) < mu0);
            simulate_benchmark_path(theta, q, qhat, mu0, horizon, eps, &mut rng)
        })
        .collect::<mislearn::Result<Vec<_>>>()?;

    let taus_n: Vec<Option<usize>> = paths.iter().map(|p| p.tau_naive).collect();
    let taus_r: Vec<Option<usize>> = paths.iter().map(|p| p.tau_rational).collect();
    let report = fosd_report(&taus_n, &taus_r, tolerance)?;

    let mut metadata = base_metadata(config);
    metadata.insert("result.fosd_pairs".to_string(), report.n_pairs.to_string());
    metadata.insert(
        "result.fosd_dropped".to_string(),
        report.n_dropped.to_string(),
    );
    metadata.insert(
        "result.fosd_max_violation".to_string(),
        fmt_sig12(report.max_violation),
    );
    metadata.insert(
        "result.fosd_exceeds_tolerance".to_string(),
        report.exceeds_tolerance.to_string(),
    );
    let mut table = metadata.into_table(vec![
        "rep",
        "theta",
        "tau_R",
        "tau_N",
        "L_R_final",
        "L_N_final",
    ]);
    for (rep, path) in paths.iter().enumerate() {
        table.push(vec![
            Cell::Int(rep as i64),
            Cell::from_bool(path.theta),
            path.tau_rational
                .map(|t| Cell::Int(t as i64))
                .unwrap_or(Cell::Empty),
            path.tau_naive
                .map(|t| Cell::Int(t as i64))
                .unwrap_or(Cell::Empty),
            Cell::Float(*path.llr_rational.last().expect("nonempty")),
            Cell::Float(*path.llr_naive.last().expect("nonempty")),
        ]);
    }
    let summary = vec![
        format!("benchmarks: {reps} paired paths, q={q} qhat={qhat} mu0={mu0}"),
        format!(
            "FOSD: {} pairs compared ({} dropped), max violation {} at t={:?}{}",
            report.n_pairs,
            report.n_dropped,
            fmt_sig12(report.max_violation),
            report.max_violation_at,
            if report.exceeds_tolerance {
                " [EXCEEDS TOLERANCE]"
            } else {
                ""
            }
        ),
    ];
    Ok(CommandOutput { table, summary })
}

fn breaktime(config: &RunConfig) -> Result<CommandOutput> {
    let sim = config.sim_config()?;
    let delta: f64 = config.parse("breaktime.delta")?;
    let p_star: f64 = config.parse("breaktime.pstar")?;
    let report = break_time_experiment(&sim, delta, p_star)?;
    let mut metadata = base_metadata(config);
    let scalars: &[(&str, String)] = &[
        ("result.n_paths", report.n_paths.to_string()),
        ("result.n_broken", report.n_broken.to_string()),
        ("result.n_censored", report.n_censored.to_string()),
        ("result.n_benign_exits", report.n_benign_exits.to_string()),
        ("result.mean_break_time", fmt_sig12(report.mean_break_time)),
        (
            "result.mean_break_time_censored",
            fmt_sig12(report.mean_break_time_censored),
        ),
        (
            "result.mean_break_time_se",
            fmt_sig12(report.mean_break_time_se),
        ),
        (
            "result.per_period_break_rate",
            fmt_sig12(report.per_period_break_rate),
        ),
        (
            "result.per_period_break_rate_se",
            fmt_sig12(report.per_period_break_rate_se),
        ),
        ("result.rate_floor", fmt_sig12(report.rate_floor)),
        (
            "result.expected_break_time_bound",
            fmt_sig12(report.expected_break_time_bound),
        ),
    ];
    for (key, value) in scalars {
        metadata.insert(key.to_string(), value.clone());
    }
    let mut table = metadata.into_table(vec!["lag", "survival"]);
    for (lag, s) in report.survival.iter().enumerate() {
        table.push(vec![Cell::Int(lag as i64), Cell::Float(*s)]);
    }
    let summary = vec![
        format!(
            "break-time experiment: {} paths, rate floor {} (bound {})",
            report.n_paths,
            fmt_sig12(report.rate_floor),
            fmt_sig12(report.expected_break_time_bound)
        ),
        format!(
            "empirical: rate {} (se {}), mean break time {} (censored-inclusive {}), benign exits {}",
            fmt_sig12(report.per_period_break_rate),
            fmt_sig12(report.per_period_break_rate_se),
            fmt_sig12(report.mean_break_time),
            fmt_sig12(report.mean_break_time_censored),
            report.n_benign_exits
        ),
    ];
    Ok(CommandOutput { table, summary })
}

fn welfare(config: &RunConfig) -> Result<CommandOutput> {
    let sim = config.sim_config()?;
    let configured = sim.subsidy;
    let with_rule = discounted_welfare_mc(&sim, configured)?;
    let baseline = discounted_welfare_mc(&sim, SubsidyRule::None)?;
    let mut table = base_metadata(config).into_table(vec![
        "rule",
        "mean",
        "std_error",
        "pointwise_bound_mean",
        "pointwise_bound_se",
        "n_reps",
    ]);
    for (label, est) in [
        (configured.to_string(), with_rule),
        (SubsidyRule::<f64>::None.to_string(), baseline),
    ] {
        table.push(vec![
            Cell::Text(label),
            Cell::Float(est.mean),
            Cell::Float(est.std_error),
            Cell::Float(est.pointwise_bound_mean),
            Cell::Float(est.pointwise_bound_se),
            Cell::Int(est.n_reps as i64),
        ]);
    }
    let summary = vec![format!(
        "discounted welfare: {} -> {} (se {}), baseline none -> {} (se {})",
        configured,
        fmt_sig12(with_rule.mean),
        fmt_sig12(with_rule.std_error),
        fmt_sig12(baseline.mean),
        fmt_sig12(baseline.std_error)
    )];
    Ok(CommandOutput { table, summary })
}

fn subsidy(config: &RunConfig) -> Result<CommandOutput> {
    let params = config.params()?;
    let cost_model = config.cost_model()?;
    let delta_acc: f64 = config.parse("subsidy.dacc")?;
    let delta_v: f64 = config.parse("subsidy.dv")?;
    let eta: f64 = config.parse_or("subsidy.eta", params.eta)?;
    let myopic = myopic_subsidy(delta_acc, delta_v, eta, cost_model.effective_upper())?;
    let target = match (config.get("subsidy.pi_bar"), config.get("subsidy.p_star")) {
        (Some(_), Some(_)) => Some(target_break_subsidy(
            config.parse("subsidy.pi_bar")?,
            config.parse("subsidy.p_star")?,
            delta_v,
            &cost_model,
        )?),
        _ => None,
    };
    let mut table = base_metadata(config).into_table(vec![
        "delta_acc",
        "delta_v",
        "eta",
        "myopic_subsidy",
        "target_subsidy",
    ]);
    table.push(vec![
        Cell::Float(delta_acc),
        Cell::Float(delta_v),
        Cell::Float(eta),
        Cell::Float(myopic),
        target.map(Cell::Float).unwrap_or(Cell::Empty),
    ]);
    let mut summary = vec![format!("myopic subsidy = {}", fmt_sig12(myopic))];
    if let Some(t) = target {
        summary.push(format!("target-break subsidy = {}", fmt_sig12(t)));
    }
    Ok(CommandOutput { table, summary })
}

fn sweep(config: &RunConfig) -> Result<CommandOutput> {
    let target = match config.parse::<String>("sweep.target")?.as_str() {
        "kappa0" => SweepTarget::Kappa0,
        "q1" => SweepTarget::Q1,
        "q0" => SweepTarget::Q0,
        "rho" => SweepTarget::Rho,
        "runlength" => SweepTarget::RunLength,
        other => return Err(anyhow!("invalid value `{other}` for config key `sweep.target`")),
    };
    let from: f64 = config.parse("sweep.from")?;
    let to: f64 = config.parse("sweep.to")?;
    let steps: usize = config.parse("sweep.steps")?;
    // the negated form also rejects NaN endpoints
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if steps < 2 || !(to > from) {
        return Err(anyhow!(
            "invalid sweep grid: need sweep.steps >= 2 and sweep.to > sweep.from"
        ));
    }
    let grid: Vec<f64> = (0..steps)
        .map(|k| from + (to - from) * k as f64 / (steps - 1) as f64)
        .collect();
    let history = config
        .history()?
        .unwrap_or_else(|| mislearn::beliefs::History::empty(config.mode().unwrap_or(ObsMode::Perfect)));
    let spec = SweepSpec {
        target,
        grid,
        base: config.params()?,
        history,
        cost_model: config.cost_model()?,
    };
    let points = run_sweep(&spec)?;
    let n_jumps = points.iter().filter(|p| p.jump).count();
    let mut table = base_metadata(config).into_table(vec![
        "grid_value",
        "delta_v",
        "case_label",
        "jump_flag",
    ]);
    for p in &points {
        table.push(vec![
            Cell::Float(p.grid_value),
            Cell::Float(p.delta_v),
            Cell::Text(p.case_label.to_string()),
            Cell::from_bool(p.jump),
        ]);
    }
    let summary = vec![format!(
        "sweep over {:?}: {} points, {} jump(s)",
        spec.target,
        points.len(),
        n_jumps
    )];
    Ok(CommandOutput { table, summary })
}

fn earlytable(config: &RunConfig) -> Result<CommandOutput> {
    let params = config.params()?;
    let cost_model = config.cost_model()?;
    let rows = early_values_table(&params, &cost_model)?;
    let mut table = base_metadata(config).into_table(vec![
        "prefix",
        "t",
        "delta_v_closed",
        "delta_v_pipeline",
        "education_probability",
    ]);
    let mut max_gap = 0.0f64;
    for row in &rows {
        if let Some(closed) = row.delta_v_closed {
            max_gap = max_gap.max((closed - row.delta_v_pipeline).abs());
        }
        table.push(vec![
            Cell::Text(row.prefix.clone()),
            Cell::Int(row.t as i64),
            row.delta_v_closed.map(Cell::Float).unwrap_or(Cell::Empty),
            Cell::Float(row.delta_v_pipeline),
            Cell::Float(row.education_probability),
        ]);
    }
    let summary = vec![format!(
        "early-period table: {} rows, max |closed - pipeline| = {}",
        rows.len(),
        fmt_sig12(max_gap)
    )];
    Ok(CommandOutput { table, summary })
}

trait IntoTable {
    fn into_table(self, header: Vec<&'static str>) -> Table;
}

impl IntoTable for BTreeMap<String, String> {
    fn into_table(self, header: Vec<&'static str>) -> Table {
        Table::new(self, header)
    }
}
