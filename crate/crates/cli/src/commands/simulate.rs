use infonce_k::effectiveness::DEFAULT_LAMBDA;
use infonce_k::optimizer::{default_simulated_curve, optimal_k, KGrid};
use infonce_k::schedule::{AnsSchedule, DEFAULT_TURNING_FRACTION};
use infonce_k::sim::{strategy_sweep, train, NegativeStrategy, RunRecord, SimConfig};

use super::schedule::parse_shape;
use super::{row, OutputFlags, SimArgs};
use crate::error::{CliError, CliResult};
use crate::svg::{LineChart, Series};

pub const RESULTS_HEADER: &str = "strategy,seed,final_val_auc,final_train_auc,alignment";
pub const TRACE_HEADER: &str = "step,k_real,loss,mi_bound";
pub const TURNING_HEADER: &str = "turning_fraction,mean_val_auc,stderr";
const DEFAULT_SWEEP_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

/// Parses `fixed:K` or `ans:K_PEAK[:TURNING[:SHAPE]]` for a run of
/// `total_steps` updates.
pub fn parse_strategy(text: &str, total_steps: usize) -> CliResult<NegativeStrategy> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let num = |s: &str, what: &str| {
        s.parse::<f64>()
            .map_err(|_| CliError::usage(format!("strategy {text:?}: bad {what} {s:?}")))
    };
    match parts.as_slice() {
        ["fixed", k] => Ok(NegativeStrategy::fixed(num(k, "K")?)?),
        ["ans", peak, rest @ ..] if rest.len() <= 2 => {
            let turning = match rest.first() {
                Some(t) => num(t, "turning fraction")?,
                None => DEFAULT_TURNING_FRACTION,
            };
            let shape = parse_shape(rest.get(1).map(|s| s.to_string()))?;
            Ok(NegativeStrategy::Ans(AnsSchedule::new(
                1.0,
                num(peak, "peak K")?,
                total_steps,
                turning,
                shape,
            )?))
        }
        _ => Err(CliError::usage(format!(
            "unknown strategy {text:?} (expected fixed:K or ans:K_PEAK[:TURNING[:SHAPE]])"
        ))),
    }
}

fn record_row(r: &RunRecord) -> String {
    row(&[
        &r.strategy,
        &r.seed,
        &r.final_val_auc,
        &r.final_train_auc,
        &r.alignment,
    ])
}

pub fn run_simulate(
    strategy: Option<String>,
    seeds: Vec<u64>,
    seed: Option<u64>,
    sim: SimArgs,
    out: OutputFlags,
) -> CliResult<()> {
    let (mut settings, output) = out.open()?;
    let base = sim.resolve(&mut settings)?;
    let strategy: Option<String> = settings.pick(strategy, "strategy")?;
    let seeds = settings.pick_list(seeds, "seeds")?;
    let seed = settings.pick(seed, "seed")?.unwrap_or(base.seed);
    settings.finish()?;
    let seeds = if seeds.is_empty() { vec![seed] } else { seeds };

    let strategy = match strategy {
        Some(s) => parse_strategy(&s, base.total_steps())?,
        None => base.negative_strategy,
    };
    let configs: Vec<SimConfig> = seeds
        .iter()
        .map(|&seed| SimConfig {
            negative_strategy: strategy,
            seed,
            ..base
        })
        .collect();
    for c in &configs {
        c.validate()?;
    }

    let mut records = Vec::new();
    for config in &configs {
        let r = train(config)?;
        let trace: Vec<String> = r
            .trace
            .iter()
            .map(|t| row(&[&t.step, &t.k_real, &t.loss, &t.mi_bound]))
            .collect();
        output.csv(
            &format!("trace_seed{}.csv", config.seed),
            TRACE_HEADER,
            &trace,
        )?;
        output.chart(&format!("trace_seed{}.svg", config.seed), || LineChart {
            title: format!("Training loss ({strategy}, seed {})", config.seed),
            x_label: "step".into(),
            y_label: "loss".into(),
            log_x: false,
            log_y: false,
            series: vec![
                Series {
                    label: "loss".into(),
                    points: r.trace.iter().map(|t| (t.step as f64, t.loss)).collect(),
                },
                Series {
                    label: "MI bound".into(),
                    points: r
                        .trace
                        .iter()
                        .map(|t| (t.step as f64, t.mi_bound))
                        .collect(),
                },
            ],
        })?;
        let rec = RunRecord {
            strategy: strategy.to_string(),
            seed: config.seed,
            final_val_auc: r.final_val_auc,
            final_train_auc: r.final_train_auc,
            alignment: r.recovered_alignment,
        };
        println!(
            "strategy={} seed={} final_val_auc={} alignment={}",
            rec.strategy, rec.seed, rec.final_val_auc, rec.alignment
        );
        records.push(rec);
    }
    let rows: Vec<String> = records.iter().map(record_row).collect();
    output.csv("results.csv", RESULTS_HEADER, &rows)?;
    Ok(())
}

pub fn run_turning_sweep(
    turning: Vec<f64>,
    k_peak: Option<f64>,
    shape: Option<String>,
    seeds: Vec<u64>,
    sim: SimArgs,
    out: OutputFlags,
) -> CliResult<()> {
    let (mut settings, output) = out.open()?;
    let base = sim.resolve(&mut settings)?;
    let mut turning = settings.pick_list(turning, "turning")?;
    let k_peak: Option<f64> = settings.pick(k_peak, "k_peak")?;
    let shape = parse_shape(settings.pick(shape, "shape")?)?;
    let seeds = settings.pick_list(seeds, "seeds")?;
    settings.finish()?;
    if turning.is_empty() {
        turning = vec![0.02, 0.1, 0.5];
    }
    let seeds = if seeds.is_empty() {
        DEFAULT_SWEEP_SEEDS.to_vec()
    } else {
        seeds
    };
    base.validate()?;

    let k_peak = match k_peak {
        Some(k) => k,
        None => {
            let curve = default_simulated_curve(base.mu_q)?;
            let best = optimal_k(base.mu_q, &curve, DEFAULT_LAMBDA, &KGrid::default())?;
            f64::from(best.k_star)
        }
    };
    let strategies = turning
        .iter()
        .map(|&f| {
            AnsSchedule::new(1.0, k_peak, base.total_steps(), f, shape).map(NegativeStrategy::Ans)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let report = strategy_sweep(&base, &strategies, &seeds)?;
    let runs: Vec<String> = report.runs.iter().map(record_row).collect();
    output.csv("turning_runs.csv", RESULTS_HEADER, &runs)?;
    let table: Vec<String> = turning
        .iter()
        .zip(&report.summaries)
        .map(|(f, s)| row(&[f, &s.mean_val_auc, &s.stderr]))
        .collect();
    output.csv("turning.csv", TURNING_HEADER, &table)?;
    output.chart("turning.svg", || LineChart {
        title: format!("Validation AUC by turning point (peak K = {k_peak})"),
        x_label: "turning fraction".into(),
        y_label: "mean val AUC".into(),
        log_x: true,
        log_y: false,
        series: vec![Series {
            label: format!("{} seeds", seeds.len()),
            points: turning
                .iter()
                .zip(&report.summaries)
                .map(|(&f, s)| (f, s.mean_val_auc))
                .collect(),
        }],
    })?;
    println!("k_peak={k_peak}");
    for line in &table {
        println!("{line}");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_strings_roundtrip() {
        let s = parse_strategy("fixed:4", 100).unwrap();
        assert_eq!(s.to_string(), "fixed:4");
        let a = parse_strategy("ans:12.5:0.2:cosine", 100).unwrap();
        assert_eq!(a.to_string(), "ans:12.5:0.2:cosine");
        assert_eq!(
            parse_strategy("ans:8", 100).unwrap().to_string(),
            "ans:8:0.1:linear"
        );
    }

    #[test]
    fn malformed_strategies() {
        assert!(matches!(
            parse_strategy("fixed", 10),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse_strategy("ans:x", 10),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse_strategy("ans:4:0.1:linear:9", 10),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse_strategy("fixed:0.5", 10),
            Err(CliError::Domain(_))
        ));
    }
}
