//! Lake-scale depletion of surface microplastics under a trawl deployment
//! schedule, and the material cost of the campaign.
//!
//! The lake is one well-mixed box: the surface layer down to an effective
//! depth, holding `P(t)` particles at uniform concentration. Each day every
//! deployed trawl filters `throughput · duty` m³ at the current concentration,
//! removal is capped at what is there, and a constant influx is added:
//!
//! ```text
//! C(t)   = P(t) / (area · depth)
//! R(t)   = min(P(t), N(t) · throughput · duty · C(t))
//! P(t+1) = P(t) − R(t) + influx
//! ```
//!
//! One trawl joins the fleet every `deployment_interval` days, starting on
//! day 0. The run stops on the first day `P ≤ stop_fraction · P(0)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::operating_speed_mps;

/// Hand-calculated sum of the itemised bill of materials, as printed.
pub const PRINTED_BOM_TOTAL: f64 = 1115.0;
/// Campaign material cost for the weekly Erie schedule, as printed.
pub const PRINTED_WEEKLY_CAMPAIGN_COST: f64 = 810_000.0;
pub const ERIE_WEEKLY_TRAWLS: u32 = 802;
pub const ERIE_DAILY_TRAWLS: u32 = 2381;
pub const ERIE_AREA_KM2: f64 = 25_700.0;
pub const ERIE_MEAN_CONCENTRATION: f64 = 0.104;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DepletionError {
    #[error("{field} must be strictly positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("stop_fraction must be in (0, 1), got {0}")]
    StopFraction(f64),
    #[error("daily_influx must be non-negative, got {0}")]
    Influx(f64),
    #[error("horizon must be at least one day")]
    Horizon,
    #[error("scenario has no trawls: initial_fleet is 0 and nothing is ever deployed")]
    NoTrawls,
    #[error(
        "cannot bracket target of {target} trawls: zero influx already stops with {at_zero} \
         (the target is unreachable)"
    )]
    BelowBracket { target: u32, at_zero: u32 },
    #[error("cannot bracket target of {target} trawls: influx up to {max_influx:e}/day never reaches it")]
    AboveBracket { target: u32, max_influx: f64 },
    #[error("trawl count at stop is not monotone in influx ({lo_count} at {lo:e} > {hi_count} at {hi:e})")]
    NotMonotone {
        lo: f64,
        lo_count: u32,
        hi: f64,
        hi_count: u32,
    },
}

fn positive(field: &'static str, value: f64) -> Result<(), DepletionError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(DepletionError::NonPositive { field, value })
    }
}

/// Throughput of one trawl: 0.5 m² mouth at 2 knots, in m³/h (≈1852).
pub fn default_trawl_throughput_m3h() -> f64 {
    0.5 * operating_speed_mps() * 3600.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LakeScenario {
    pub surface_area_km2: f64,
    /// Depth of the well-mixed surface layer, m.
    pub effective_depth_m: f64,
    /// particles/m³
    pub initial_concentration: f64,
    /// particles/day
    pub daily_influx: f64,
    /// Days between deployments; `None` keeps the initial fleet fixed.
    pub deployment_interval_days: Option<u32>,
    /// Trawls already on the water at day 0 in addition to the day-0 deployment.
    pub initial_fleet: u32,
    pub trawl_duty_hours: f64,
    pub trawl_throughput_m3h: f64,
    pub horizon_days: u32,
    pub stop_fraction: f64,
}

impl Default for LakeScenario {
    fn default() -> Self {
        Self::erie_weekly()
    }
}

impl LakeScenario {
    /// Lake Erie, one trawl per week, zero influx until calibrated.
    pub fn erie_weekly() -> Self {
        Self {
            surface_area_km2: ERIE_AREA_KM2,
            effective_depth_m: 0.5,
            initial_concentration: ERIE_MEAN_CONCENTRATION,
            daily_influx: 0.0,
            deployment_interval_days: Some(7),
            initial_fleet: 0,
            trawl_duty_hours: 12.0,
            trawl_throughput_m3h: default_trawl_throughput_m3h(),
            horizon_days: 50 * 365,
            stop_fraction: 0.05,
        }
    }

    pub fn erie_daily() -> Self {
        Self {
            deployment_interval_days: Some(1),
            ..Self::erie_weekly()
        }
    }

    // TODO: replace the Erie concentration with a published surface
    // concentration for Lake Michigan once one is sourced.
    pub fn michigan_weekly() -> Self {
        Self {
            surface_area_km2: 57_800.0,
            ..Self::erie_weekly()
        }
    }

    // TODO: same for Lake Ontario.
    pub fn ontario_weekly() -> Self {
        Self {
            surface_area_km2: 18_960.0,
            ..Self::erie_weekly()
        }
    }

    pub fn validate(&self) -> Result<(), DepletionError> {
        positive("surface_area_km2", self.surface_area_km2)?;
        positive("effective_depth_m", self.effective_depth_m)?;
        positive("initial_concentration", self.initial_concentration)?;
        positive("trawl_duty_hours", self.trawl_duty_hours)?;
        positive("trawl_throughput_m3h", self.trawl_throughput_m3h)?;
        if let Some(interval) = self.deployment_interval_days {
            positive("deployment_interval_days", f64::from(interval))?;
        }
        if !(self.trawl_duty_hours <= 24.0) {
            return Err(DepletionError::NonPositive {
                field: "trawl_duty_hours (≤ 24)",
                value: self.trawl_duty_hours,
            });
        }
        if !(self.daily_influx >= 0.0 && self.daily_influx.is_finite()) {
            return Err(DepletionError::Influx(self.daily_influx));
        }
        if !(self.stop_fraction > 0.0 && self.stop_fraction < 1.0) {
            return Err(DepletionError::StopFraction(self.stop_fraction));
        }
        if self.horizon_days == 0 {
            return Err(DepletionError::Horizon);
        }
        if self.initial_fleet == 0 && self.deployment_interval_days.is_none() {
            return Err(DepletionError::NoTrawls);
        }
        Ok(())
    }

    /// Volume of the mixed layer, m³.
    pub fn effective_volume_m3(&self) -> f64 {
        self.surface_area_km2 * 1e6 * self.effective_depth_m
    }

    pub fn initial_particles(&self) -> f64 {
        self.initial_concentration * self.effective_volume_m3()
    }

    /// Water one trawl filters per day, m³.
    pub fn daily_filtered_m3(&self) -> f64 {
        self.trawl_throughput_m3h * self.trawl_duty_hours
    }

    /// Trawls working on `day`.
    pub fn trawls_on(&self, day: u32) -> u32 {
        let deployed = self
            .deployment_interval_days
            .map_or(0, |interval| day / interval + 1);
        self.initial_fleet + deployed
    }
}

/// State at the start of `day`, and what happened during it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DayRecord {
    pub day: u32,
    pub particle_count: f64,
    pub concentration: f64,
    pub trawl_count: u32,
    pub removed_today: f64,
    pub influx_today: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepletionTrace {
    /// One record per simulated day. When the run stopped, the last record is
    /// the stopping state and carries no removal or influx.
    pub records: Vec<DayRecord>,
    pub converged: bool,
}

impl DepletionTrace {
    pub fn stop_day(&self) -> Option<u32> {
        self.converged.then(|| self.final_record().day)
    }

    pub fn final_record(&self) -> &DayRecord {
        self.records
            .last()
            .expect("trace always has the initial record")
    }

    /// Trawls deployed by the end of the run.
    pub fn trawls_deployed(&self) -> u32 {
        self.final_record().trawl_count
    }
}

/// Steps the box model one day at a time until the stop condition or horizon.
pub fn simulate_depletion(s: &LakeScenario) -> Result<DepletionTrace, DepletionError> {
    s.validate()?;
    let volume = s.effective_volume_m3();
    let per_trawl = s.daily_filtered_m3();
    let p0 = s.initial_particles();
    let stop_at = s.stop_fraction * p0;

    let mut records = Vec::with_capacity(4096);
    let mut particles = p0;
    let mut last_trawls = s.trawls_on(0);
    for day in 0..s.horizon_days {
        let concentration = particles / volume;
        if day > 0 && particles <= stop_at {
            records.push(DayRecord {
                day,
                particle_count: particles,
                concentration,
                trawl_count: last_trawls,
                removed_today: 0.0,
                influx_today: 0.0,
            });
            return Ok(DepletionTrace {
                records,
                converged: true,
            });
        }
        let trawls = s.trawls_on(day);
        let removed = (f64::from(trawls) * per_trawl * concentration).min(particles);
        records.push(DayRecord {
            day,
            particle_count: particles,
            concentration,
            trawl_count: trawls,
            removed_today: removed,
            influx_today: s.daily_influx,
        });
        particles = particles - removed + s.daily_influx;
        last_trawls = trawls;
    }
    let day = s.horizon_days;
    let converged = particles <= stop_at;
    records.push(DayRecord {
        day,
        particle_count: particles,
        concentration: particles / volume,
        trawl_count: last_trawls,
        removed_today: 0.0,
        influx_today: 0.0,
    });
    Ok(DepletionTrace { records, converged })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub daily_influx: f64,
    pub trawls_at_stop: u32,
    pub stop_day: u32,
    pub iterations: u32,
}

/// Trawl count at stop, or `None` when the horizon is hit first.
fn trawls_at_stop(s: &LakeScenario, influx: f64) -> Result<Option<(u32, u32)>, DepletionError> {
    let trace = simulate_depletion(&LakeScenario {
        daily_influx: influx,
        ..s.clone()
    })?;
    Ok(trace.stop_day().map(|day| (trace.trawls_deployed(), day)))
}

/// Finds the daily influx (particles/day) for which the campaign stops with
/// `target` trawls deployed, by bracketing and bisection. The scenario's own
/// `daily_influx` is ignored.
pub fn calibrate_influx(s: &LakeScenario, target: u32) -> Result<Calibration, DepletionError> {
    s.validate()?;
    let count = |r: Option<(u32, u32)>| r.map_or(u32::MAX, |(n, _)| n);

    let at_zero = trawls_at_stop(s, 0.0)?;
    let zero_count = count(at_zero);
    if zero_count > target {
        return Err(DepletionError::BelowBracket {
            target,
            at_zero: zero_count,
        });
    }
    if let Some((n, day)) = at_zero.filter(|&(n, _)| n == target) {
        return Ok(Calibration {
            daily_influx: 0.0,
            trawls_at_stop: n,
            stop_day: day,
            iterations: 0,
        });
    }

    // Grow from a fraction of the daily removal of a single trawl.
    let mut lo = (0.0, zero_count);
    let mut hi_influx = 1e-6 * s.initial_particles().max(1.0);
    let max_influx = 1e3 * s.initial_particles().max(1.0);
    let hi = loop {
        let c = count(trawls_at_stop(s, hi_influx)?);
        if c < lo.1 {
            return Err(DepletionError::NotMonotone {
                lo: lo.0,
                lo_count: lo.1,
                hi: hi_influx,
                hi_count: c,
            });
        }
        if c >= target {
            break (hi_influx, c);
        }
        lo = (hi_influx, c);
        hi_influx *= 2.0;
        if hi_influx > max_influx {
            return Err(DepletionError::AboveBracket { target, max_influx });
        }
    };

    let (mut lo, mut hi) = (lo, hi);
    let mut iterations = 0;
    while hi.1 != target && hi.0 - lo.0 > 1e-9 * hi.0 {
        iterations += 1;
        let mid = 0.5 * (lo.0 + hi.0);
        let c = count(trawls_at_stop(s, mid)?);
        if c < lo.1 || c > hi.1 {
            return Err(DepletionError::NotMonotone {
                lo: lo.0,
                lo_count: lo.1,
                hi: hi.0,
                hi_count: hi.1,
            });
        }
        if c >= target {
            hi = (mid, c);
        } else {
            lo = (mid, c);
        }
    }
    let daily_influx = hi.0;
    let (trawls_at_stop, stop_day) =
        trawls_at_stop(s, daily_influx)?.ok_or(DepletionError::AboveBracket {
            target,
            max_influx: daily_influx,
        })?;
    Ok(Calibration {
        daily_influx,
        trawls_at_stop,
        stop_day,
        iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BomItem {
    pub name: String,
    pub unit_cost: f64,
    #[serde(default = "one")]
    pub quantity: u32,
}

fn one() -> u32 {
    1
}

impl BomItem {
    pub fn new(name: &str, unit_cost: f64, quantity: u32) -> Self {
        Self {
            name: name.to_owned(),
            unit_cost,
            quantity,
        }
    }

    pub fn cost(&self) -> f64 {
        self.unit_cost * f64::from(self.quantity)
    }
}

/// Per-unit material cost, either itemised or as a flat figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostModel {
    pub items: Vec<BomItem>,
    /// Flat per-unit cost; overrides the item sum when set.
    pub unit_total: Option<f64>,
    /// Scales the campaign total (bulk discount below 1, overheads above).
    pub campaign_multiplier: f64,
}

impl Default for CostModel {
    /// Flat unit cost backed out of the weekly campaign figure (810,000 / 802).
    fn default() -> Self {
        Self::flat(PRINTED_WEEKLY_CAMPAIGN_COST / f64::from(ERIE_WEEKLY_TRAWLS))
    }
}

impl CostModel {
    pub fn flat(unit_total: f64) -> Self {
        Self {
            items: Vec::new(),
            unit_total: Some(unit_total),
            campaign_multiplier: 1.0,
        }
    }

    pub fn itemized(items: Vec<BomItem>) -> Self {
        Self {
            items,
            unit_total: None,
            campaign_multiplier: 1.0,
        }
    }

    /// The itemised bill of materials, USD.
    pub fn reference_bom() -> Self {
        Self::itemized(vec![
            BomItem::new("metal tubing", 458.0, 1),
            BomItem::new("mesh", 285.0, 1),
            BomItem::new("Arduino Mega", 27.0, 1),
            BomItem::new("motor", 64.0, 2),
            BomItem::new("solar panel", 22.0, 1),
            BomItem::new("3D printing material", 25.0, 1),
            BomItem::new("battery", 140.0, 1),
            BomItem::new("buoys", 36.0, 1),
            BomItem::new("sonar", 14.0, 1),
            BomItem::new("PVC pipe", 7.0, 1),
            BomItem::new("wiring, cod-end and misc", 25.0, 1),
        ])
    }

    pub fn unit_cost(&self) -> f64 {
        self.unit_total.unwrap_or_else(|| bom_total(self).total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BomSummary {
    pub total: f64,
    pub note: Option<String>,
}

/// Sum of the itemised costs, with a note when it disagrees with the printed total.
pub fn bom_total(cost: &CostModel) -> BomSummary {
    let total: f64 = cost.items.iter().map(BomItem::cost).sum();
    let note = (!cost.items.is_empty() && (total - PRINTED_BOM_TOTAL).abs() > 0.5).then(|| {
        format!(
            "itemised total ${total:.0} differs from the printed ${PRINTED_BOM_TOTAL:.0} \
             by ${:.0}",
            total - PRINTED_BOM_TOTAL
        )
    });
    BomSummary { total, note }
}

/// Material cost of `n_trawls` units.
pub fn campaign_cost(n_trawls: u32, cost: &CostModel) -> f64 {
    f64::from(n_trawls) * cost.unit_cost() * cost.campaign_multiplier
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tiny_lake() -> LakeScenario {
        // 1e-6 km² × 0.5 m = 0.5 m³; one trawl filters far more than that.
        LakeScenario {
            surface_area_km2: 1e-6,
            effective_depth_m: 0.5,
            initial_concentration: 2000.0,
            daily_influx: 0.0,
            deployment_interval_days: None,
            initial_fleet: 1,
            trawl_duty_hours: 1.0,
            trawl_throughput_m3h: 1.0,
            horizon_days: 10,
            stop_fraction: 0.05,
        }
    }

    #[test]
    fn removal_is_capped() {
        let s = tiny_lake();
        assert!((s.initial_particles() - 1000.0).abs() < 1e-9);
        let trace = simulate_depletion(&s).unwrap();
        assert_eq!(
            trace.records[0].removed_today,
            trace.records[0].particle_count
        );
        assert_eq!(trace.records[1].particle_count, 0.0);
        assert!(trace.converged);
        assert_eq!(trace.stop_day(), Some(1));
    }

    #[test]
    fn geometric_decay_matches_closed_form() {
        let s = LakeScenario {
            deployment_interval_days: None,
            initial_fleet: 40,
            horizon_days: 2000,
            ..LakeScenario::erie_weekly()
        };
        let ratio = 1.0 - 40.0 * s.daily_filtered_m3() / s.effective_volume_m3();
        let trace = simulate_depletion(&s).unwrap();
        let p0 = s.initial_particles();
        for r in &trace.records {
            let expect = p0 * ratio.powi(r.day as i32);
            assert!(
                (r.particle_count - expect).abs() <= 1e-9 * expect,
                "day {}",
                r.day
            );
        }
    }

    #[test]
    fn schedule() {
        let w = LakeScenario::erie_weekly();
        assert_eq!(w.trawls_on(0), 1);
        assert_eq!(w.trawls_on(6), 1);
        assert_eq!(w.trawls_on(7), 2);
        let d = LakeScenario::erie_daily();
        assert_eq!(d.trawls_on(9), 10);
        assert!((default_trawl_throughput_m3h() - 1851.9984).abs() < 1e-9);
    }

    #[test]
    fn validation() {
        let bad = LakeScenario {
            stop_fraction: 1.0,
            ..LakeScenario::default()
        };
        assert!(matches!(
            simulate_depletion(&bad),
            Err(DepletionError::StopFraction(_))
        ));
        let bad = LakeScenario {
            deployment_interval_days: None,
            initial_fleet: 0,
            ..LakeScenario::default()
        };
        assert!(matches!(
            simulate_depletion(&bad),
            Err(DepletionError::NoTrawls)
        ));
        let bad = LakeScenario {
            deployment_interval_days: Some(0),
            ..LakeScenario::default()
        };
        assert!(simulate_depletion(&bad).is_err());
    }

    #[test]
    fn horizon_without_stop_is_flagged() {
        let s = LakeScenario {
            horizon_days: 30,
            ..LakeScenario::erie_weekly()
        };
        let trace = simulate_depletion(&s).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.stop_day(), None);
        assert_eq!(trace.records.len(), 31);
    }

    #[test]
    fn calibration_hits_target() {
        let cal = calibrate_influx(&LakeScenario::erie_weekly(), ERIE_WEEKLY_TRAWLS).unwrap();
        assert!(cal.daily_influx > 0.0);
        assert!(cal.trawls_at_stop.abs_diff(ERIE_WEEKLY_TRAWLS) <= 1);
    }

    #[test]
    fn calibration_degenerate_and_unreachable() {
        let s = LakeScenario::erie_weekly();
        let zero = simulate_depletion(&s).unwrap();
        let cal = calibrate_influx(&s, zero.trawls_deployed()).unwrap();
        assert_eq!(cal.daily_influx, 0.0);
        assert!(matches!(
            calibrate_influx(&s, 1),
            Err(DepletionError::BelowBracket { .. })
        ));
    }

    #[test]
    fn costs() {
        let flat = CostModel::default();
        assert!((campaign_cost(802, &flat) - 810_000.0).abs() < 1e-6);
        assert_eq!(campaign_cost(0, &flat), 0.0);
        let ten = CostModel::flat(1010.0);
        assert_eq!(campaign_cost(802, &ten), 810_020.0);
        assert_eq!(campaign_cost(2381, &ten), 2_404_810.0);

        let bom = bom_total(&CostModel::reference_bom());
        // 458+285+27+64·2+22+25+140+36+14+7+25
        assert_eq!(bom.total, 1167.0);
        assert!(bom.note.as_deref().unwrap().contains("1115"));
        let empty = bom_total(&CostModel::itemized(vec![]));
        assert_eq!(empty.total, 0.0);
        assert!(empty.note.is_none());
        let single = bom_total(&CostModel::itemized(vec![BomItem::new("unit", 1115.0, 1)]));
        assert_eq!(single.total, 1115.0);
        assert!(single.note.is_none());
        assert_eq!(CostModel::reference_bom().unit_cost(), 1167.0);
    }

    fn scenario() -> impl Strategy<Value = LakeScenario> {
        (
            0.5f64..50.0,
            0.1f64..2.0,
            0.01f64..5.0,
            0.0f64..1.0,
            1u32..10,
            0.5f64..24.0,
            100.0f64..5000.0,
        )
            .prop_map(|(area, depth, conc, influx_frac, interval, duty, q)| {
                let mut s = LakeScenario {
                    surface_area_km2: area,
                    effective_depth_m: depth,
                    initial_concentration: conc,
                    daily_influx: 0.0,
                    deployment_interval_days: Some(interval),
                    initial_fleet: 0,
                    trawl_duty_hours: duty,
                    trawl_throughput_m3h: q,
                    horizon_days: 3000,
                    stop_fraction: 0.05,
                };
                // influx as a fraction of one trawl's first-day removal
                s.daily_influx = influx_frac * s.daily_filtered_m3() * conc;
                s
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn mass_balance_and_bounds(s in scenario()) {
            let trace = simulate_depletion(&s).unwrap();
            for pair in trace.records.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let delta = b.particle_count - a.particle_count;
                let expect = a.influx_today - a.removed_today;
                let scale = a.particle_count.max(1.0);
                prop_assert!((delta - expect).abs() <= 1e-6 * scale);
                prop_assert!(b.trawl_count >= a.trawl_count);
                prop_assert!(b.particle_count >= 0.0 && b.concentration >= 0.0);
            }
        }

        #[test]
        fn direction_of_change(s in scenario()) {
            let drain = LakeScenario { daily_influx: 0.0, ..s.clone() };
            let trace = simulate_depletion(&drain).unwrap();
            for pair in trace.records.windows(2) {
                prop_assert!(pair[1].particle_count <= pair[0].particle_count);
            }
            let idle = LakeScenario { trawl_throughput_m3h: 1e-300, horizon_days: 200, ..s };
            let trace = simulate_depletion(&idle).unwrap();
            for pair in trace.records.windows(2) {
                prop_assert!(pair[1].particle_count >= pair[0].particle_count);
            }
        }

        #[test]
        fn geometric_oracle(fleet in 1u32..50, s in scenario()) {
            let s = LakeScenario {
                daily_influx: 0.0,
                deployment_interval_days: None,
                initial_fleet: fleet,
                ..s
            };
            let ratio = 1.0 - f64::from(fleet) * s.daily_filtered_m3() / s.effective_volume_m3();
            prop_assume!(ratio > 0.0);
            let trace = simulate_depletion(&s).unwrap();
            let p0 = s.initial_particles();
            for r in &trace.records {
                let expect = p0 * ratio.powi(r.day as i32);
                prop_assert!((r.particle_count - expect).abs() <= 1e-9 * expect);
            }
        }

        #[test]
        fn weekly_needs_fewer_trawls_but_more_days(s in scenario()) {
            let daily = simulate_depletion(&LakeScenario { deployment_interval_days: Some(1), ..s.clone() }).unwrap();
            let weekly = simulate_depletion(&LakeScenario { deployment_interval_days: Some(7), ..s }).unwrap();
            prop_assume!(daily.converged && weekly.converged);
            prop_assert!(weekly.trawls_deployed() <= daily.trawls_deployed());
            prop_assert!(weekly.stop_day().unwrap() >= daily.stop_day().unwrap());
        }
    }
}
