//! The reproduction suite behind `trawlsim all`: every published figure the
//! models can regenerate, plus the property checks for the guidance loop.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::collection::{expected_yield, observed_vs_expected, RiverSite};
use crate::depletion::{
    bom_total, calibrate_influx, campaign_cost, simulate_depletion, CostModel, LakeScenario,
    ERIE_DAILY_TRAWLS, ERIE_WEEKLY_TRAWLS,
};
use crate::energy::{
    recharge_time, runtime_to_cutoff, simulate_soc, IrradianceProfile, PowerPlant, FIRST_BATTERY_WH,
};
use crate::guidance::{run_mission, LakeWorld, MissionConfig, RangeFilter, SensorModel, Vec2};
use crate::stability::{
    ballast_for_angle, ballast_for_center_of_mass, buoyancy_margin, equilibrium_angle,
    trawl_torque, water_force, BallastProblem, DisplacementMode, ForceCurve, MassBudget,
    FACE_LEVER_ARM,
};
use crate::trawl::{fill_time, particle_capacity, trawl_volume, ParticleSpec, TrawlSpec};
use crate::units::Quantity;
use crate::{Result, Rounding};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<(bool, String)>;
type Entry = (u8, &'static str, Box<dyn Fn() -> Outcome>);

pub fn run_all(seed: u64) -> Vec<Check> {
    let suite: [Entry; 11] = [
        (1, "capacity", Box::new(capacity)),
        (2, "fill time", Box::new(fill)),
        (3, "ballast", Box::new(ballast)),
        (4, "torque", Box::new(torque)),
        (5, "center of mass", Box::new(center_of_mass)),
        (6, "buoyancy", Box::new(buoyancy)),
        (7, "yield", Box::new(river_yield)),
        (8, "depletion", Box::new(depletion)),
        (9, "cost", Box::new(cost)),
        (10, "energy", Box::new(energy)),
        (11, "guidance", Box::new(move || guidance(seed))),
    ];
    suite
        .into_iter()
        .map(|(id, name, f)| {
            let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
            Check {
                id,
                name,
                passed,
                detail,
            }
        })
        .collect()
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

fn rel_close(x: f64, target: f64, tol: f64) -> bool {
    ((x - target) / target).abs() <= tol
}

fn capacity() -> Outcome {
    let v = trawl_volume(&TrawlSpec::default())?;
    let p = ParticleSpec::largest();
    let paper = particle_capacity(v, &p, Rounding::Paper)?;
    let exact = particle_capacity(v, &p, Rounding::Exact)?;
    Ok((
        paper == 3_816_793 && (3_819_700..=3_819_740).contains(&exact),
        format!("paper {paper}, exact {exact}"),
    ))
}

fn fill() -> Outcome {
    let days = fill_time(3_816_793, 220.0, 24.0)?;
    Ok((rel_close(days, 722.9, 1e-3), format!("{days:.2} days")))
}

fn ballast() -> Outcome {
    let (curve, problem) = (ForceCurve::default(), BallastProblem::default());
    let m = ballast_for_angle(&curve, 80.0, &problem)?;
    let back = equilibrium_angle(&curve, m, &problem)?;
    let err = (back - 80.0).abs();
    Ok((
        within(m, 6.9, 7.4) && err < 0.01,
        format!("{m:.3} kg at 80°, round-trip error {err:.2e}°"),
    ))
}

fn torque() -> Outcome {
    let curve = ForceCurve::default();
    let t = trawl_torque(&curve, 90.0, FACE_LEVER_ARM)?;
    let f = water_force(&curve, 90.0)?;
    Ok((
        within(t, 210.0, 220.0) && within(f, 855.0, 870.0),
        format!("torque {t:.2} N·m, force {f:.2} N at 90°"),
    ))
}

fn center_of_mass() -> Outcome {
    let w = ballast_for_center_of_mass(-0.25, 10.0, 0.1, -0.5)?;
    Ok(((w - 14.0).abs() < 1e-12, format!("{w} kg")))
}

fn buoyancy() -> Outcome {
    let paper = buoyancy_margin(&MassBudget::default())?;
    let geo = buoyancy_margin(&MassBudget {
        displacement_mode: DisplacementMode::FromCircumference,
        ..MassBudget::default()
    })?;
    Ok((
        (paper - 52.92).abs() < 1e-9 && within(geo, 52.4, 52.7),
        format!("constant {paper:.4} kg, from circumference {geo:.4} kg"),
    ))
}

fn river_yield() -> Outcome {
    let y = expected_yield(
        &RiverSite::default(),
        Quantity::new(0.5, crate::units::Unit::SquareMeter),
        1.0,
        Rounding::Paper,
    )?;
    let obs = observed_vs_expected(4438, y.expected_count, 0.20)?;
    let band_ok = y.band.0.abs_diff(3122) <= 1 && y.band.1.abs_diff(3816) <= 1;
    Ok((
        y.expected_count == 3469.0
            && band_ok
            && within(obs.ratio, 1.27, 1.28)
            && obs.observed_range == (3550, 5326),
        format!(
            "expected {} band [{}, {}], ratio {:.4}, observed range [{}, {}]",
            y.expected_count,
            y.band.0,
            y.band.1,
            obs.ratio,
            obs.observed_range.0,
            obs.observed_range.1
        ),
    ))
}

fn depletion() -> Outcome {
    let weekly = LakeScenario::erie_weekly();
    let cal = calibrate_influx(&weekly, ERIE_WEEKLY_TRAWLS)?;
    let years = f64::from(cal.stop_day) / 365.0;
    let daily = simulate_depletion(&LakeScenario {
        daily_influx: cal.daily_influx,
        ..LakeScenario::erie_daily()
    })?;
    let daily_trawls = daily.trawls_deployed();

    let fixed = LakeScenario {
        deployment_interval_days: None,
        initial_fleet: 40,
        horizon_days: 2000,
        ..LakeScenario::erie_weekly()
    };
    let ratio = 1.0 - 40.0 * fixed.daily_filtered_m3() / fixed.effective_volume_m3();
    let p0 = fixed.initial_particles();
    let geometric = simulate_depletion(&fixed)?.records.iter().all(|r| {
        let expect = p0 * ratio.powi(r.day as i32);
        (r.particle_count - expect).abs() <= 1e-9 * expect
    });
    let balance = daily.records.windows(2).all(|w| {
        let delta = w[1].particle_count - w[0].particle_count;
        let expect = w[0].influx_today - w[0].removed_today;
        (delta - expect).abs() <= 1e-6 * w[0].particle_count.max(1.0)
    });
    let daily_ok = rel_close(f64::from(daily_trawls), f64::from(ERIE_DAILY_TRAWLS), 0.25);
    Ok((
        cal.trawls_at_stop == ERIE_WEEKLY_TRAWLS
            && daily.converged
            && daily_ok
            && rel_close(years, 15.0, 0.25)
            && geometric
            && balance,
        format!(
            "influx {:.1}/day: weekly {} trawls over {years:.2} y, daily {daily_trawls} trawls; \
             geometric oracle {}, mass balance {}",
            cal.daily_influx,
            cal.trawls_at_stop,
            if geometric { "ok" } else { "FAIL" },
            if balance { "ok" } else { "FAIL" },
        ),
    ))
}

fn cost() -> Outcome {
    let flat = CostModel::default();
    let weekly = campaign_cost(ERIE_WEEKLY_TRAWLS, &flat);
    let daily = campaign_cost(ERIE_DAILY_TRAWLS, &flat);
    let bom = bom_total(&CostModel::reference_bom());
    Ok((
        (weekly - 810_000.0).abs() <= 100.0
            && rel_close(daily, 2.4e6, 0.01)
            && bom.total == 1167.0
            && bom.note.is_some(),
        format!(
            "weekly ${weekly:.0}, daily ${daily:.0}, BOM ${:.0} ({})",
            bom.total,
            bom.note.as_deref().unwrap_or("no note")
        ),
    ))
}

fn energy() -> Outcome {
    let plant = PowerPlant::default();
    let irr = IrradianceProfile::default();
    let recharge = recharge_time(&plant)?;
    let runtime = runtime_to_cutoff(FIRST_BATTERY_WH, plant.load_draw_w)?;
    let step = 10;
    let days = 10;
    let series = simulate_soc(&plant, &irr, days, step)?;
    let per_day = (1440 / step) as usize;
    let n = series.samples.len();
    let (prev, last) = (
        &series.samples[n - 2 * per_day..n - per_day],
        &series.samples[n - per_day..],
    );
    let drift = prev
        .iter()
        .zip(last)
        .map(|(a, b)| (a.soc_wh - b.soc_wh).abs())
        .fold(0.0, f64::max);
    let periodic = drift <= 1e-9 * plant.battery_capacity_wh;
    Ok((
        recharge <= 4.0 && rel_close(runtime, 1.25, 0.01) && periodic,
        format!(
            "recharge {recharge:.3} h, first runtime {runtime:.4} h, diel drift {drift:.2e} Wh"
        ),
    ))
}

fn filter_oracle(sequences: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sequences {
        let window = rng.gen_range(1..=8);
        let len = rng.gen_range(1..=40);
        let seq: Vec<Option<f64>> = (0..len)
            .map(|_| (rng.gen::<f64>() >= 0.2).then(|| rng.gen_range(0.0..20.0)))
            .collect();
        let mut f = RangeFilter::new(window).expect("window ≥ 1");
        for (i, r) in seq.iter().enumerate() {
            let out = f.update(*r);
            let valid: Vec<f64> = seq[..=i].iter().flatten().copied().collect();
            let tail = &valid[valid.len().saturating_sub(window)..];
            let oracle = (!tail.is_empty()).then(|| tail.iter().sum::<f64>() / tail.len() as f64);
            let ok = match (out, oracle) {
                (None, None) => true,
                (Some(a), Some(b)) => (a - b).abs() <= 1e-12 * b.abs().max(1.0),
                _ => false,
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Missions in a convex lake whose threshold satisfies the lag condition.
pub fn convex_missions(count: u64, steps: usize, seed: u64) -> Result<(u32, f64)> {
    let world = LakeWorld::rectangle(60.0, 40.0, Vec2::new(0.08, -0.05), 0.104);
    let mut collisions = 0;
    let mut margin = f64::INFINITY;
    for k in 0..count {
        let cfg = MissionConfig {
            world: world.clone(),
            start: Vec2::new(30.0, 20.0),
            start_heading_deg: (k * 29 % 360) as f64,
            sensor: SensorModel {
                seed: seed.wrapping_add(k),
                ..SensorModel::default()
            },
            ..MissionConfig::default()
        };
        let cfg = MissionConfig {
            duration_s: steps as f64 * cfg.dt_s,
            ..cfg
        };
        margin = margin.min(cfg.policy.threshold - cfg.safe_threshold());
        collisions += run_mission(&cfg)?.collisions;
    }
    Ok((collisions, margin))
}

pub fn sweep_error() -> Result<f64> {
    let c = 0.104;
    let cfg = MissionConfig {
        world: LakeWorld::rectangle(5000.0, 100.0, Vec2::ZERO, c),
        start: Vec2::new(50.0, 50.0),
        duration_s: 3600.0,
        ..MissionConfig::default()
    };
    let r = run_mission(&cfg)?;
    let oracle = c * 0.5 * 1.0289 * 3600.0;
    Ok((r.collected - oracle).abs() / oracle)
}

fn replays(seed: u64) -> Result<bool> {
    let cfg = MissionConfig {
        sensor: SensorModel {
            seed,
            ..SensorModel::default()
        },
        duration_s: 600.0,
        ..MissionConfig::default()
    };
    let (a, b) = (run_mission(&cfg)?, run_mission(&cfg)?);
    Ok(a.trajectory.len() == b.trajectory.len()
        && a.trajectory.iter().zip(&b.trajectory).all(|(x, y)| {
            [
                x.x,
                x.y,
                x.heading,
                x.speed,
                x.filtered_range,
                x.collected_cum,
            ]
            .iter()
            .zip([
                y.x,
                y.y,
                y.heading,
                y.speed,
                y.filtered_range,
                y.collected_cum,
            ])
            .all(|(p, q)| p.to_bits() == q.to_bits())
                && (x.mode, x.left_us, x.right_us) == (y.mode, y.left_us, y.right_us)
        }))
}

fn guidance(seed: u64) -> Outcome {
    let filter_ok = filter_oracle(10_000, seed);
    let (collisions, margin) = convex_missions(100, 10_000, seed)?;
    let sweep = sweep_error()?;
    let replay = replays(seed)?;
    Ok((
        filter_ok && collisions == 0 && margin >= 0.0 && sweep < 0.01 && replay,
        format!(
            "filter oracle {}, {collisions} collisions in 100 missions, sweep error {:.3}%, replay {}",
            if filter_ok { "ok" } else { "FAIL" },
            sweep * 100.0,
            if replay { "identical" } else { "DIVERGED" },
        ),
    ))
}
