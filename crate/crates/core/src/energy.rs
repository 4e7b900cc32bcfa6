//! Battery and solar budget over the day.
//!
//! The panel charges during a daytime window and the trawl runs during a
//! separate night-time window. The load is a constant-power draw with no
//! voltage-sag model. Solar input is spread over the charge window by an
//! [`IrradianceShape`], and each step integrates the shape analytically, so
//! the energy delivered per day is `panel_rating · peak_sun_hours` for any
//! shape or step size.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const MINUTES_PER_DAY: u32 = 24 * 60;

/// 15 Ah at 11.1 V.
pub const UPGRADED_BATTERY_WH: f64 = 15.0 * 11.1;
/// 1.3 Ah at 11.1 V.
pub const FIRST_BATTERY_WH: f64 = 1.3 * 11.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError {
    #[error("{field} must be strictly positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("{field} must be non-negative, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("charge efficiency must be in (0, 1], got {0}")]
    Efficiency(f64),
    #[error("initial state of charge must be in [0, 1], got {0}")]
    InitialSoc(f64),
    #[error("{field} must be in [0, 24] hours, got {value}")]
    Hours { field: &'static str, value: f64 },
    #[error("charge window {charge_start}h+{charge_len}h overlaps operating window {operate_start}h+{operate_len}h")]
    Overlap {
        charge_start: f64,
        charge_len: f64,
        operate_start: f64,
        operate_len: f64,
    },
    #[error("step of {0} minutes does not divide a day")]
    Step(u32),
    #[error(
        "{peak_sun_hours} peak sun hours over a {window}h window would exceed the panel rating"
    )]
    Irradiance { peak_sun_hours: f64, window: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerPlant {
    pub battery_capacity_wh: f64,
    pub panel_rating_w: f64,
    pub charge_efficiency: f64,
    pub load_draw_w: f64,
    pub operate_hours: f64,
    /// Hour of day the operating window opens.
    pub operate_start_hour: f64,
    pub charge_window_hours: f64,
    /// Hour of day the charge window opens.
    pub charge_start_hour: f64,
    pub initial_soc_fraction: f64,
}

impl Default for PowerPlant {
    fn default() -> Self {
        Self {
            battery_capacity_wh: UPGRADED_BATTERY_WH,
            panel_rating_w: 50.0,
            charge_efficiency: 0.85,
            // back-solved from the first battery's 1 h 15 min runtime
            load_draw_w: 11.5,
            operate_hours: 12.0,
            operate_start_hour: 18.0,
            charge_window_hours: 10.0,
            charge_start_hour: 7.0,
            initial_soc_fraction: 1.0,
        }
    }
}

impl PowerPlant {
    pub fn validate(&self) -> Result<(), EnergyError> {
        if !(self.battery_capacity_wh >= 0.0) {
            return Err(EnergyError::Negative {
                field: "battery_capacity_wh",
                value: self.battery_capacity_wh,
            });
        }
        if !(self.panel_rating_w >= 0.0) {
            return Err(EnergyError::Negative {
                field: "panel_rating_w",
                value: self.panel_rating_w,
            });
        }
        if !(self.load_draw_w >= 0.0) {
            return Err(EnergyError::Negative {
                field: "load_draw_w",
                value: self.load_draw_w,
            });
        }
        if !(self.charge_efficiency > 0.0 && self.charge_efficiency <= 1.0) {
            return Err(EnergyError::Efficiency(self.charge_efficiency));
        }
        if !(0.0..=1.0).contains(&self.initial_soc_fraction) {
            return Err(EnergyError::InitialSoc(self.initial_soc_fraction));
        }
        for (field, value) in [
            ("operate_hours", self.operate_hours),
            ("operate_start_hour", self.operate_start_hour),
            ("charge_window_hours", self.charge_window_hours),
            ("charge_start_hour", self.charge_start_hour),
        ] {
            if !(0.0..=24.0).contains(&value) {
                return Err(EnergyError::Hours { field, value });
            }
        }
        let overlap = circular_overlap(
            self.charge_start_hour,
            self.charge_window_hours,
            self.operate_start_hour,
            self.operate_hours,
            24.0,
        );
        if overlap > 1e-9 {
            return Err(EnergyError::Overlap {
                charge_start: self.charge_start_hour,
                charge_len: self.charge_window_hours,
                operate_start: self.operate_start_hour,
                operate_len: self.operate_hours,
            });
        }
        Ok(())
    }

    pub fn daily_generation_wh(&self, irr: &IrradianceProfile) -> f64 {
        self.panel_rating_w * irr.peak_sun_hours * self.charge_efficiency
    }

    pub fn daily_consumption_wh(&self) -> f64 {
        self.load_draw_w * self.operate_hours
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IrradianceShape {
    /// Constant power across the charge window.
    #[default]
    FlatWindow,
    /// Half a sine period spanning the charge window.
    HalfSine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IrradianceProfile {
    pub peak_sun_hours: f64,
    pub shape: IrradianceShape,
}

impl Default for IrradianceProfile {
    /// Chicago and Milwaukee annual average.
    fn default() -> Self {
        Self {
            peak_sun_hours: 4.0,
            shape: IrradianceShape::FlatWindow,
        }
    }
}

impl IrradianceProfile {
    /// Fraction of the day's panel energy delivered in the first `u` of a
    /// window `w` long (same time unit).
    fn cumulative_fraction(&self, u: f64, w: f64) -> f64 {
        let x = (u / w).clamp(0.0, 1.0);
        match self.shape {
            IrradianceShape::FlatWindow => x,
            IrradianceShape::HalfSine => 0.5 * (1.0 - (PI * x).cos()),
        }
    }

    /// Peak panel output as a fraction of rating.
    fn peak_fraction(&self, window_hours: f64) -> f64 {
        match self.shape {
            IrradianceShape::FlatWindow => self.peak_sun_hours / window_hours,
            IrradianceShape::HalfSine => self.peak_sun_hours * PI / (2.0 * window_hours),
        }
    }
}

/// Hours of peak sun to fill an empty battery.
pub fn recharge_time(p: &PowerPlant) -> Result<f64, EnergyError> {
    if !(p.panel_rating_w > 0.0) {
        return Err(EnergyError::NonPositive {
            field: "panel_rating_w",
            value: p.panel_rating_w,
        });
    }
    if !(p.charge_efficiency > 0.0 && p.charge_efficiency <= 1.0) {
        return Err(EnergyError::Efficiency(p.charge_efficiency));
    }
    Ok(p.battery_capacity_wh / (p.panel_rating_w * p.charge_efficiency))
}

/// Hours a full battery sustains a constant load.
pub fn runtime_to_cutoff(capacity_wh: f64, load_w: f64) -> Result<f64, EnergyError> {
    if !(load_w > 0.0) {
        return Err(EnergyError::NonPositive {
            field: "load_w",
            value: load_w,
        });
    }
    if !(capacity_wh >= 0.0) {
        return Err(EnergyError::Negative {
            field: "capacity_wh",
            value: capacity_wh,
        });
    }
    Ok(capacity_wh / load_w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMode {
    Charge,
    Operate,
    /// Operating window, but the battery ran flat.
    Cutoff,
    Idle,
}

impl PowerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PowerMode::Charge => "charge",
            PowerMode::Operate => "operate",
            PowerMode::Cutoff => "cutoff",
            PowerMode::Idle => "idle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SocSample {
    /// End of the step, minutes from the start of the run.
    pub minute: u32,
    pub soc_wh: f64,
    pub mode: PowerMode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SocSeries {
    pub initial_soc_wh: f64,
    pub samples: Vec<SocSample>,
    /// Energy into the battery after charge losses, before clamping.
    pub generated_wh: f64,
    /// Load demanded during operating windows.
    pub demanded_wh: f64,
    /// Generation discarded because the battery was full.
    pub curtailed_wh: f64,
    /// Load not served because the battery was empty.
    pub unserved_wh: f64,
}

impl SocSeries {
    pub fn final_soc_wh(&self) -> f64 {
        self.samples
            .last()
            .map_or(self.initial_soc_wh, |s| s.soc_wh)
    }

    /// SoC at `minute`, which must fall on a step boundary.
    pub fn soc_at(&self, minute: u32) -> Option<f64> {
        if minute == 0 {
            return Some(self.initial_soc_wh);
        }
        self.samples
            .binary_search_by_key(&minute, |s| s.minute)
            .ok()
            .map(|i| self.samples[i].soc_wh)
    }
}

/// Length of the intersection of `[a, a+la)` and `[b, b+lb)` on a circle of
/// circumference `period`. Both lengths must be ≤ `period`.
fn circular_overlap(a: f64, la: f64, b: f64, lb: f64, period: f64) -> f64 {
    (-1..=1)
        .map(|k| {
            let b0 = b + f64::from(k) * period;
            ((a + la).min(b0 + lb) - a.max(b0)).max(0.0)
        })
        .sum()
}

/// Minutes of `[t0, t1)` that fall inside a daily window.
fn window_overlap_minutes(t0: f64, t1: f64, start_hour: f64, len_hours: f64) -> f64 {
    let day = (t0 / f64::from(MINUTES_PER_DAY)).floor();
    let (start, len) = (start_hour * 60.0, len_hours * 60.0);
    (-1..=1)
        .map(|k| {
            let w0 = (day + f64::from(k)) * f64::from(MINUTES_PER_DAY) + start;
            (t1.min(w0 + len) - t0.max(w0)).max(0.0)
        })
        .sum()
}

/// Panel energy (before charge efficiency) delivered in `[t0, t1)` minutes.
fn panel_energy_wh(p: &PowerPlant, irr: &IrradianceProfile, t0: f64, t1: f64) -> f64 {
    let window = p.charge_window_hours * 60.0;
    if window <= 0.0 {
        return 0.0;
    }
    let daily = p.panel_rating_w * irr.peak_sun_hours;
    let day = (t0 / f64::from(MINUTES_PER_DAY)).floor();
    (-1..=1)
        .map(|k| {
            let w0 = (day + f64::from(k)) * f64::from(MINUTES_PER_DAY) + p.charge_start_hour * 60.0;
            daily
                * (irr.cumulative_fraction(t1 - w0, window)
                    - irr.cumulative_fraction(t0 - w0, window))
        })
        .sum()
}

/// Steps the battery through `days` days at `step_minutes` resolution,
/// clamping SoC to `[0, capacity]`.
pub fn simulate_soc(
    p: &PowerPlant,
    irr: &IrradianceProfile,
    days: u32,
    step_minutes: u32,
) -> Result<SocSeries, EnergyError> {
    p.validate()?;
    if step_minutes == 0 || !MINUTES_PER_DAY.is_multiple_of(step_minutes) {
        return Err(EnergyError::Step(step_minutes));
    }
    if !(irr.peak_sun_hours >= 0.0) {
        return Err(EnergyError::Negative {
            field: "peak_sun_hours",
            value: irr.peak_sun_hours,
        });
    }
    if irr.peak_sun_hours > 0.0 && irr.peak_fraction(p.charge_window_hours) > 1.0 + 1e-12 {
        return Err(EnergyError::Irradiance {
            peak_sun_hours: irr.peak_sun_hours,
            window: p.charge_window_hours,
        });
    }

    let capacity = p.battery_capacity_wh;
    let initial = capacity * p.initial_soc_fraction;
    let steps = days * MINUTES_PER_DAY / step_minutes;
    let mut series = SocSeries {
        initial_soc_wh: initial,
        samples: Vec::with_capacity(steps as usize),
        generated_wh: 0.0,
        demanded_wh: 0.0,
        curtailed_wh: 0.0,
        unserved_wh: 0.0,
    };
    let mut soc = initial;
    for i in 0..steps {
        let (t0, t1) = (
            f64::from(i * step_minutes),
            f64::from((i + 1) * step_minutes),
        );
        let input = panel_energy_wh(p, irr, t0, t1) * p.charge_efficiency;
        let operating = window_overlap_minutes(t0, t1, p.operate_start_hour, p.operate_hours);
        let charging = window_overlap_minutes(t0, t1, p.charge_start_hour, p.charge_window_hours);
        let demand = p.load_draw_w * operating / 60.0;

        let raw = soc + input - demand;
        let (next, curtailed, unserved) = if raw > capacity {
            (capacity, raw - capacity, 0.0)
        } else if raw < 0.0 {
            (0.0, 0.0, -raw)
        } else {
            (raw, 0.0, 0.0)
        };
        series.generated_wh += input;
        series.demanded_wh += demand;
        series.curtailed_wh += curtailed;
        series.unserved_wh += unserved;

        let mode = if operating > 0.0 {
            if unserved > 0.0 {
                PowerMode::Cutoff
            } else {
                PowerMode::Operate
            }
        } else if charging > 0.0 {
            PowerMode::Charge
        } else {
            PowerMode::Idle
        };
        soc = next;
        series.samples.push(SocSample {
            minute: (i + 1) * step_minutes,
            soc_wh: soc,
            mode,
        });
    }
    Ok(series)
}
