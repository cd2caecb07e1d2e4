use std::path::PathBuf;

use infonce_k::effectiveness::{
    curve_from_auc_log, parse_auc_log, simulated_training_curve, TrainingCurve, DEFAULT_CURVE_STEPS,
};
use infonce_k::optimizer::{k_sweep, optimal_k, KGrid, SweepRow, DEFAULT_GRID_MAX};

use super::{lambdas, read_text, required, row, OutputFlags};
use crate::error::{CliError, CliResult};
use crate::svg::{LineChart, Series};

pub const PROFILE_HEADER: &str = "k,v";
pub const MULTI_PROFILE_HEADER: &str = "lambda,k,v";
pub const SWEEP_HEADER: &str = "mu_q,lambda,k_star,v_star";

pub struct OptimalKFlags {
    pub mu_q: Option<f64>,
    pub lambda: Vec<f64>,
    pub auc_log: Option<PathBuf>,
    pub steps: Option<usize>,
    pub grid_max: Option<u32>,
}

fn grid(max: Option<u32>) -> CliResult<KGrid> {
    match max {
        None => Ok(KGrid::default()),
        Some(DEFAULT_GRID_MAX) => Ok(KGrid::default()),
        Some(m) => Ok(KGrid::range(m)?),
    }
}

pub fn run_optimal_k(flags: OptimalKFlags, out: OutputFlags) -> CliResult<()> {
    let (mut settings, output) = out.open()?;
    let mu_q = required(settings.pick(flags.mu_q, "mu_q")?, "mu-q")?;
    let lambda = lambdas(settings.pick_list(flags.lambda, "lambda")?);
    let auc_log: Option<PathBuf> = settings.pick(flags.auc_log, "auc_log")?;
    let steps: Option<usize> = settings.pick(flags.steps, "steps")?;
    let grid = grid(settings.pick(flags.grid_max, "grid_max")?)?;
    settings.finish()?;
    if auc_log.is_some() && steps.is_some() {
        return Err(CliError::usage(
            "--auc-log and --steps are mutually exclusive",
        ));
    }

    let curve: TrainingCurve = match &auc_log {
        Some(path) => curve_from_auc_log(&parse_auc_log(&read_text(path)?)?)?,
        None => simulated_training_curve(mu_q, steps.unwrap_or(DEFAULT_CURVE_STEPS))?,
    };

    let results = lambda
        .iter()
        .map(|&l| optimal_k(mu_q, &curve, l, &grid))
        .collect::<Result<Vec<_>, _>>()?;

    let multi = results.len() > 1;
    let mut rows = Vec::new();
    for r in &results {
        let p = &r.profile;
        for (k, v) in p.k_values.iter().zip(&p.v_values) {
            rows.push(if multi {
                row(&[&p.lambda, k, v])
            } else {
                row(&[k, v])
            });
        }
    }
    let header = if multi {
        MULTI_PROFILE_HEADER
    } else {
        PROFILE_HEADER
    };
    output.csv("profile.csv", header, &rows)?;
    output.chart("profile.svg", || LineChart {
        title: format!("Overall effectiveness, mu_q = {mu_q}"),
        x_label: "K".into(),
        y_label: "v".into(),
        log_x: true,
        log_y: false,
        series: results
            .iter()
            .map(|r| Series {
                label: format!("lambda = {}", r.profile.lambda),
                points: r
                    .profile
                    .k_values
                    .iter()
                    .zip(&r.profile.v_values)
                    .map(|(&k, &v)| (f64::from(k), v))
                    .collect(),
            })
            .collect(),
    })?;

    for r in &results {
        println!(
            "lambda={} k_star={} v_star={}",
            r.profile.lambda, r.k_star, r.v_star
        );
    }
    Ok(())
}

pub struct SweepFlags {
    pub mu_min: Option<f64>,
    pub mu_max: Option<f64>,
    pub mu_step: Option<f64>,
    pub lambda: Vec<f64>,
    pub steps: Option<usize>,
    pub grid_max: Option<u32>,
}

/// `min, min + step, ..., max` with values rounded to 1e-9 so that decimal
/// steps print cleanly.
pub fn mu_range(min: f64, max: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && step.is_finite()) {
        return Err(CliError::usage("mu range bounds must be finite"));
    }
    if step <= 0.0 || max < min {
        return Err(CliError::usage(
            "mu range needs --mu-step > 0 and --mu-max >= --mu-min",
        ));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| ((min + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

pub fn run_sweep(flags: SweepFlags, out: OutputFlags) -> CliResult<()> {
    let (mut settings, output) = out.open()?;
    let min = settings.pick(flags.mu_min, "mu_min")?.unwrap_or(0.05);
    let max = settings.pick(flags.mu_max, "mu_max")?.unwrap_or(5.0);
    let step = settings.pick(flags.mu_step, "mu_step")?.unwrap_or(0.05);
    let lambda = lambdas(settings.pick_list(flags.lambda, "lambda")?);
    let steps = settings
        .pick(flags.steps, "steps")?
        .unwrap_or(DEFAULT_CURVE_STEPS);
    let grid = grid(settings.pick(flags.grid_max, "grid_max")?)?;
    settings.finish()?;
    let mus = mu_range(min, max, step)?;

    let mut table: Vec<Vec<SweepRow>> = Vec::new();
    for &l in &lambda {
        table.push(k_sweep(
            &mus,
            |mu| simulated_training_curve(mu, steps),
            l,
            &grid,
        )?);
    }

    let rows: Vec<String> = table
        .iter()
        .flatten()
        .map(|r| row(&[&r.mu_q, &r.lambda, &r.k_star, &r.v_star]))
        .collect();
    output.csv("sweep.csv", SWEEP_HEADER, &rows)?;
    output.chart("sweep.svg", || LineChart {
        title: "Optimal K by positive score mean".into(),
        x_label: "mu_q".into(),
        y_label: "K*".into(),
        log_x: false,
        log_y: true,
        series: table
            .iter()
            .map(|rows| Series {
                label: format!("lambda = {}", rows[0].lambda),
                points: rows.iter().map(|r| (r.mu_q, f64::from(r.k_star))).collect(),
            })
            .collect(),
    })?;
    println!("{} rows", rows.len());
    Ok(())
}
