//! Batch front end: `trawlsim <subcommand> [--config PATH] [--out DIR] [--seed N] [--mode paper|exact]`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::collection::{expected_yield_with_band, observed_vs_expected};
use crate::depletion::{
    bom_total, calibrate_influx, campaign_cost, simulate_depletion, LakeScenario,
};
use crate::energy::{recharge_time, simulate_soc};
use crate::guidance::run_mission;
use crate::output::{fmt_g, write_text, Table};
use crate::reproduce::run_all;
use crate::scenario::{ConfigError, ScenarioConfig};
use crate::stability::{
    ballast_for_angle, ballast_for_center_of_mass, buoyancy_margin, equilibrium_angle,
    trawl_torque, water_force, StabilityError,
};
use crate::trawl::{fill_time, particle_capacity, trawl_volume, ParticleSpec};
use crate::{Error, Rounding};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MODEL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "trawlsim",
    version,
    about = "Microplastic trawl models and simulations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario JSON; defaults apply to everything it leaves out.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Sensor seed for `navigate`, base seed for `all`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Net volume, particle capacity and fill time.
    Capacity,
    /// Force curve, ballast sizing, centre of mass and buoyancy.
    Ballast,
    /// Expected river yield and comparison with the observed count.
    Yield,
    /// Lake depletion campaign and its cost.
    Deplete,
    /// Battery state of charge over the diel cycle.
    Energy,
    /// Closed-loop guidance mission.
    Navigate,
    /// Reproduction suite with a pass/fail table.
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Capacity => "capacity",
            Command::Ballast => "ballast",
            Command::Yield => "yield",
            Command::Deplete => "deplete",
            Command::Energy => "energy",
            Command::Navigate => "navigate",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Paper,
    Exact,
}

impl From<ModeArg> for Rounding {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Paper => Rounding::Paper,
            ModeArg::Exact => Rounding::Exact,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("writing output: {0}")]
    Io(#[from] io::Error),
    #[error("{failed} of {total} checks failed")]
    Checks { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Model(_) | CliError::Io(_) | CliError::Checks { .. } => EXIT_MODEL,
        }
    }
}

fn model<E: Into<Error>>(e: E) -> CliError {
    CliError::Model(e.into())
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            print!("{summary}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("trawlsim {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

pub fn resolve_config(cli: &Cli) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(mode) = cli.mode {
        cfg.mode = mode.into();
    }
    if let Some(seed) = cli.seed {
        cfg.mission.sensor.seed = seed;
    }
    Ok(cfg)
}

/// Runs the subcommand, writes its artifacts into `--out` and returns the
/// summary text.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let cfg = resolve_config(cli)?;
    let name = cli.command.name();
    let out = &cli.out;
    fs::create_dir_all(out)?;
    write_text(
        &out.join(format!("{name}.config.json")),
        &(cfg.to_json() + "\n"),
    )?;
    let (table, summary, failure) = match cli.command {
        Command::Capacity => with_ok(capacity(&cfg)?),
        Command::Ballast => with_ok(ballast(&cfg)?),
        Command::Yield => with_ok(river_yield(&cfg)?),
        Command::Deplete => with_ok(deplete(&cfg)?),
        Command::Energy => with_ok(energy(&cfg)?),
        Command::Navigate => with_ok(navigate(&cfg)?),
        Command::All => all(cli.seed.unwrap_or(0)),
    };
    write_artifacts(out, name, &table, &summary)?;
    match failure {
        Some(e) => {
            print!("{summary}");
            Err(e)
        }
        None => Ok(summary),
    }
}

fn with_ok((table, summary): (Table, String)) -> (Table, String, Option<CliError>) {
    (table, summary, None)
}

fn write_artifacts(out: &Path, name: &str, table: &Table, summary: &str) -> io::Result<()> {
    table.write_csv(&out.join(format!("{name}.csv")))?;
    write_text(&out.join(format!("{name}.summary.txt")), summary)
}

fn mode_name(r: Rounding) -> &'static str {
    match r {
        Rounding::Paper => "paper",
        Rounding::Exact => "exact",
    }
}

fn capacity(cfg: &ScenarioConfig) -> Result<(Table, String), CliError> {
    let t = &cfg.trawl;
    let volume = trawl_volume(&t.spec).map_err(model)?;
    let particle = ParticleSpec::new(t.particle_diameter_mm).map_err(model)?;
    let cap = particle_capacity(volume, &particle, cfg.mode).map_err(model)?;
    let days = fill_time(cap, t.collection_rate_per_hour, t.duty_hours_per_day).map_err(model)?;

    let mut table = Table::new(&[
        "diameter_mm",
        "particle_volume_mm3",
        "capacity",
        "fill_days",
    ]);
    for k in 1..=10 {
        let d = 0.5 * f64::from(k);
        let p = ParticleSpec::new(d).map_err(model)?;
        let c = particle_capacity(volume, &p, cfg.mode).map_err(model)?;
        let f = fill_time(c, t.collection_rate_per_hour, t.duty_hours_per_day).map_err(model)?;
        table.push(vec![
            fmt_g(d),
            fmt_g(p.volume_mm3(cfg.mode)),
            c.to_string(),
            fmt_g(f),
        ]);
    }

    let mut s = String::new();
    writeln!(s, "mode: {}", mode_name(cfg.mode)).unwrap();
    writeln!(s, "net volume: {} m3", fmt_g(volume)).unwrap();
    writeln!(s, "particle diameter: {} mm", fmt_g(t.particle_diameter_mm)).unwrap();
    writeln!(
        s,
        "particle volume: {} mm3",
        fmt_g(particle.volume_mm3(cfg.mode))
    )
    .unwrap();
    writeln!(s, "capacity: {cap} particles").unwrap();
    writeln!(
        s,
        "fill time: {} days at {} particles/h, {} h/day",
        fmt_g(days),
        fmt_g(t.collection_rate_per_hour),
        fmt_g(t.duty_hours_per_day)
    )
    .unwrap();
    Ok((table, s))
}

fn ballast(cfg: &ScenarioConfig) -> Result<(Table, String), CliError> {
    let st = &cfg.stability;
    let curve = &st.curve;
    let needed = ballast_for_angle(curve, st.target_angle_deg, &st.problem).map_err(model)?;
    let mass = st.ballast_mass.unwrap_or(needed);
    let eq = equilibrium_angle(curve, mass, &st.problem).map_err(model)?;
    let (lo, hi) = curve.valid_domain;
    let torque_hi = trawl_torque(curve, hi, st.problem.lever_arm).map_err(model)?;
    let com = st.center_of_mass;
    let com_mass =
        ballast_for_center_of_mass(com.target_cm, com.body_mass, com.body_cm, com.ballast_depth)
            .map_err(model)?;
    let margin = buoyancy_margin(&st.mass_budget).map_err(model)?;
    let (b_lo, b_hi) = curve.increasing_branch();

    if !(st.sweep_step_deg > 0.0) {
        return Err(model(StabilityError::SweepStep(st.sweep_step_deg)));
    }
    let mut table = Table::new(&["angle_deg", "force_n", "torque_nm", "ballast_kg"]);
    let steps = ((hi - lo) / st.sweep_step_deg).floor() as usize;
    for k in 0..=steps {
        let a = (lo + k as f64 * st.sweep_step_deg).min(hi);
        table.push(vec![
            fmt_g(a),
            fmt_g(water_force(curve, a).map_err(model)?),
            fmt_g(trawl_torque(curve, a, st.problem.lever_arm).map_err(model)?),
            fmt_g(ballast_for_angle(curve, a, &st.problem).map_err(model)?),
        ]);
    }

    let mut s = String::new();
    writeln!(s, "target angle: {} deg", fmt_g(st.target_angle_deg)).unwrap();
    writeln!(s, "ballast for target: {} kg", fmt_g(needed)).unwrap();
    writeln!(
        s,
        "equilibrium angle for {} kg: {} deg",
        fmt_g(mass),
        fmt_g(eq)
    )
    .unwrap();
    writeln!(
        s,
        "increasing branch: [{}, {}] deg",
        fmt_g(b_lo),
        fmt_g(b_hi)
    )
    .unwrap();
    writeln!(
        s,
        "water force at {} deg: {} N",
        fmt_g(hi),
        fmt_g(water_force(curve, hi).map_err(model)?)
    )
    .unwrap();
    writeln!(s, "torque at {} deg: {} N*m", fmt_g(hi), fmt_g(torque_hi)).unwrap();
    writeln!(s, "center-of-mass ballast: {} kg", fmt_g(com_mass)).unwrap();
    writeln!(s, "buoyancy margin: {} kg", fmt_g(margin)).unwrap();
    Ok((table, s))
}

fn river_yield(cfg: &ScenarioConfig) -> Result<(Table, String), CliError> {
    let r = &cfg.river;
    let y = expected_yield_with_band(
        &r.site,
        r.mouth_area,
        r.duration_h,
        cfg.mode,
        r.band_fraction,
    )
    .map_err(model)?;
    let obs = r
        .observed
        .map(|n| observed_vs_expected(n, y.expected_count, r.visual_error))
        .transpose()
        .map_err(model)?;

    let mut table = Table::new(&[
        "throughput_m3s",
        "volume_m3",
        "expected",
        "band_low",
        "band_high",
        "observed",
        "ratio",
        "observed_low",
        "observed_high",
    ]);
    let opt = |v: Option<String>| v.unwrap_or_default();
    table.push(vec![
        fmt_g(y.throughput_m3s),
        fmt_g(y.volume_m3),
        fmt_g(y.expected_count),
        y.band.0.to_string(),
        y.band.1.to_string(),
        opt(r.observed.map(|n| n.to_string())),
        opt(obs.as_ref().map(|o| fmt_g(o.ratio))),
        opt(obs.as_ref().map(|o| o.observed_range.0.to_string())),
        opt(obs.as_ref().map(|o| o.observed_range.1.to_string())),
    ]);

    let mut s = String::new();
    writeln!(s, "mode: {}", mode_name(cfg.mode)).unwrap();
    writeln!(s, "trawl throughput: {} m3/s", fmt_g(y.throughput_m3s)).unwrap();
    writeln!(
        s,
        "volume filtered in {} h: {} m3",
        fmt_g(r.duration_h),
        fmt_g(y.volume_m3)
    )
    .unwrap();
    writeln!(
        s,
        "expected particles: {} (band [{}, {}] at ±{}%)",
        fmt_g(y.expected_count),
        y.band.0,
        y.band.1,
        fmt_g(100.0 * r.band_fraction)
    )
    .unwrap();
    if let (Some(n), Some(o)) = (r.observed, &obs) {
        writeln!(
            s,
            "observed {n}: ratio {}, range [{}, {}] at ±{}% visual error",
            fmt_g(o.ratio),
            o.observed_range.0,
            o.observed_range.1,
            fmt_g(100.0 * r.visual_error)
        )
        .unwrap();
    }
    Ok((table, s))
}

fn deplete(cfg: &ScenarioConfig) -> Result<(Table, String), CliError> {
    let lake = &cfg.lake;
    let calibration = lake
        .calibrate_to
        .map(|target| calibrate_influx(&lake.scenario, target))
        .transpose()
        .map_err(model)?;
    let scenario = LakeScenario {
        daily_influx: calibration
            .as_ref()
            .map_or(lake.scenario.daily_influx, |c| c.daily_influx),
        ..lake.scenario.clone()
    };
    let trace = simulate_depletion(&scenario).map_err(model)?;
    let trawls = trace.trawls_deployed();
    let cost = campaign_cost(trawls, &lake.cost);

    let mut table = Table::new(&[
        "day",
        "particle_count",
        "concentration",
        "trawl_count",
        "removed",
        "influx",
    ]);
    for r in &trace.records {
        table.push(vec![
            r.day.to_string(),
            fmt_g(r.particle_count),
            fmt_g(r.concentration),
            r.trawl_count.to_string(),
            fmt_g(r.removed_today),
            fmt_g(r.influx_today),
        ]);
    }

    let mut s = String::new();
    let schedule = match scenario.deployment_interval_days {
        Some(1) => "one trawl per day".to_owned(),
        Some(n) => format!("one trawl every {n} days"),
        None => format!("fixed fleet of {}", scenario.initial_fleet),
    };
    writeln!(s, "schedule: {schedule}").unwrap();
    if let Some(c) = &calibration {
        writeln!(
            s,
            "calibrated influx: {} particles/day ({} trawls target, {} iterations)",
            fmt_g(c.daily_influx),
            c.trawls_at_stop,
            c.iterations
        )
        .unwrap();
    } else {
        writeln!(s, "influx: {} particles/day", fmt_g(scenario.daily_influx)).unwrap();
    }
    let last = trace.final_record();
    match trace.stop_day() {
        Some(day) => writeln!(
            s,
            "stop day: {day} ({} years)",
            fmt_g(f64::from(day) / 365.0)
        )
        .unwrap(),
        None => writeln!(s, "stop day: none within {} days (not converged)", last.day).unwrap(),
    }
    writeln!(s, "trawls deployed: {trawls}").unwrap();
    writeln!(
        s,
        "final concentration: {} particles/m3",
        fmt_g(last.concentration)
    )
    .unwrap();
    writeln!(s, "unit cost: ${}", fmt_g(lake.cost.unit_cost())).unwrap();
    writeln!(s, "campaign cost: ${}", fmt_g(cost)).unwrap();
    if let Some(note) = bom_total(&lake.cost).note {
        writeln!(s, "note: {note}").unwrap();
    }
    Ok((table, s))
}

fn energy(cfg: &ScenarioConfig) -> Result<(Table, String), CliError> {
    let p = &cfg.power;
    let series = simulate_soc(&p.plant, &p.irradiance, p.days, p.step_minutes).map_err(model)?;
    let recharge = recharge_time(&p.plant).map_err(model)?;
    let cap = p.plant.battery_capacity_wh;

    let mut table = Table::new(&["minute", "hour", "soc_wh", "soc_fraction", "mode"]);
    table.push(vec![
        "0".into(),
        "0".into(),
        fmt_g(series.initial_soc_wh),
        fmt_g(series.initial_soc_wh / cap),
        String::new(),
    ]);
    for sample in &series.samples {
        table.push(vec![
            sample.minute.to_string(),
            fmt_g(f64::from(sample.minute) / 60.0),
            fmt_g(sample.soc_wh),
            fmt_g(sample.soc_wh / cap),
            sample.mode.as_str().to_owned(),
        ]);
    }

    let mut s = String::new();
    writeln!(s, "battery: {} Wh", fmt_g(cap)).unwrap();
    writeln!(s, "recharge time: {} peak sun hours", fmt_g(recharge)).unwrap();
    writeln!(
        s,
        "daily generation: {} Wh, daily demand: {} Wh",
        fmt_g(p.plant.daily_generation_wh(&p.irradiance)),
        fmt_g(p.plant.daily_consumption_wh())
    )
    .unwrap();
    writeln!(s, "days simulated: {}", p.days).unwrap();
    writeln!(
        s,
        "final state of charge: {} Wh",
        fmt_g(series.final_soc_wh())
    )
    .unwrap();
    writeln!(
        s,
        "curtailed: {} Wh, unserved: {} Wh",
        fmt_g(series.curtailed_wh),
        fmt_g(series.unserved_wh)
    )
    .unwrap();
    Ok((table, s))
}

fn navigate(cfg: &ScenarioConfig) -> Result<(Table, String), CliError> {
    let m = &cfg.mission;
    let r = run_mission(m).map_err(model)?;
    let mut table = Table::new(&[
        "t",
        "x",
        "y",
        "heading",
        "speed",
        "mode",
        "filtered_range",
        "left_us",
        "right_us",
        "collected_cum",
    ]);
    for row in &r.trajectory {
        table.push(vec![
            fmt_g(row.t),
            fmt_g(row.x),
            fmt_g(row.y),
            fmt_g(row.heading),
            fmt_g(row.speed),
            row.mode.as_str().to_owned(),
            fmt_g(row.filtered_range),
            row.left_us.to_string(),
            row.right_us.to_string(),
            fmt_g(row.collected_cum),
        ]);
    }
    let mut s = String::new();
    writeln!(s, "seed: {}", m.sensor.seed).unwrap();
    writeln!(
        s,
        "duration: {} s at dt {} s ({} steps)",
        fmt_g(m.duration_s),
        fmt_g(m.dt_s),
        m.steps()
    )
    .unwrap();
    writeln!(s, "distance through water: {} m", fmt_g(r.distance)).unwrap();
    writeln!(s, "collected: {} particles", fmt_g(r.collected)).unwrap();
    writeln!(s, "collisions: {}", r.collisions).unwrap();
    writeln!(s, "sensor dropouts: {}", r.dropouts).unwrap();
    writeln!(
        s,
        "avoidance threshold {} m (lag-safe minimum {} m)",
        fmt_g(m.policy.threshold),
        fmt_g(m.safe_threshold())
    )
    .unwrap();
    Ok((table, s))
}

fn all(seed: u64) -> (Table, String, Option<CliError>) {
    let checks = run_all(seed);
    let mut table = Table::new(&["criterion", "name", "result", "detail"]);
    let mut s = String::new();
    for c in &checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        table.push(vec![
            c.id.to_string(),
            c.name.into(),
            verdict.into(),
            c.detail.clone(),
        ]);
        writeln!(s, "{:>2}  {:<15} {verdict}  {}", c.id, c.name, c.detail).unwrap();
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(s, "{} of {} passed", checks.len() - failed, checks.len()).unwrap();
    let failure = (failed > 0).then_some(CliError::Checks {
        failed,
        total: checks.len(),
    });
    (table, s, failure)
}
