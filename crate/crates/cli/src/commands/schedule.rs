use infonce_k::schedule::{AnsSchedule, ScheduleShape, DEFAULT_TURNING_FRACTION};

use super::{required, row, OutputFlags};
use crate::error::{CliError, CliResult};
use crate::svg::{LineChart, Series};

pub const SCHEDULE_HEADER: &str = "step,k_real";

pub struct ScheduleFlags {
    pub k_peak: Option<f64>,
    pub k_start: Option<f64>,
    pub total_steps: Option<usize>,
    pub turning: Option<f64>,
    pub shape: Option<String>,
}

pub fn parse_shape(s: Option<String>) -> CliResult<ScheduleShape> {
    match s {
        None => Ok(ScheduleShape::default()),
        Some(s) => s.parse().map_err(|_| {
            CliError::usage(format!("unknown shape {s:?} (expected linear or cosine)"))
        }),
    }
}

pub fn run(flags: ScheduleFlags, out: OutputFlags) -> CliResult<()> {
    let (mut settings, output) = out.open()?;
    let k_peak = required(settings.pick(flags.k_peak, "k_peak")?, "k-peak")?;
    let k_start = settings.pick(flags.k_start, "k_start")?.unwrap_or(1.0);
    let total = settings
        .pick(flags.total_steps, "total_steps")?
        .unwrap_or(1000);
    let turning = settings
        .pick(flags.turning, "turning")?
        .unwrap_or(DEFAULT_TURNING_FRACTION);
    let shape = parse_shape(settings.pick(flags.shape, "shape")?)?;
    settings.finish()?;

    let schedule = AnsSchedule::new(k_start, k_peak, total, turning, shape)?;
    let points = schedule.emit();
    let rows: Vec<String> = points.iter().map(|(s, k)| row(&[s, k])).collect();
    output.csv("schedule.csv", SCHEDULE_HEADER, &rows)?;
    output.chart("schedule.svg", || LineChart {
        title: format!("Negative sampling ratio ({shape})"),
        x_label: "step".into(),
        y_label: "K".into(),
        log_x: false,
        log_y: false,
        series: vec![Series {
            label: format!("peak {k_peak}"),
            points: points.iter().map(|&(s, k)| (s as f64, k)).collect(),
        }],
    })?;
    println!("turning_step={}", schedule.turning_step());
    Ok(())
}
