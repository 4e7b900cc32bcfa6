//! Closed-loop mission: sense, filter, decide, move, collect.

use serde::{Deserialize, Serialize};

use super::agent::{step_agent, AgentParams, AgentState};
use super::control::{avoidance_policy, Mode, PolicyParams};
use super::sensor::{RangeFilter, RangeSensor, SensorModel};
use super::world::{LakeWorld, Vec2};
use super::GuidanceError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MissionConfig {
    pub world: LakeWorld,
    pub start: Vec2,
    pub start_heading_deg: f64,
    pub agent: AgentParams,
    pub sensor: SensorModel,
    pub policy: PolicyParams,
    pub filter_window: usize,
    pub duration_s: f64,
    pub dt_s: f64,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            world: LakeWorld::default(),
            start: Vec2::new(100.0, 60.0),
            start_heading_deg: 0.0,
            agent: AgentParams::default(),
            sensor: SensorModel::default(),
            policy: PolicyParams::default(),
            filter_window: 5,
            duration_s: 1000.0,
            dt_s: 0.1,
        }
    }
}

impl MissionConfig {
    pub fn steps(&self) -> usize {
        (self.duration_s / self.dt_s).round() as usize
    }

    /// Smallest threshold for which the filter lag cannot carry the trawl
    /// into the bank: `2·(v_max + |current|_max)·dt·window`.
    pub fn safe_threshold(&self) -> f64 {
        2.0 * (self.agent.max_speed_mps + self.world.max_current())
            * self.dt_s
            * self.filter_window as f64
    }

    pub fn validate(&self) -> Result<(), GuidanceError> {
        self.world.validate()?;
        self.agent.validate()?;
        self.sensor.validate()?;
        self.policy.validate()?;
        RangeFilter::new(self.filter_window)?;
        if !(self.dt_s > 0.0 && self.dt_s.is_finite()) {
            return Err(GuidanceError::Step(format!(
                "dt_s must be positive, got {}",
                self.dt_s
            )));
        }
        if !(self.duration_s >= 0.0 && self.duration_s.is_finite()) {
            return Err(GuidanceError::Step(format!(
                "duration_s must be non-negative, got {}",
                self.duration_s
            )));
        }
        if self.sensor.max_range <= self.policy.threshold + self.policy.hysteresis {
            return Err(GuidanceError::Sensor(format!(
                "max_range {} cannot clear threshold + hysteresis {}",
                self.sensor.max_range,
                self.policy.threshold + self.policy.hysteresis
            )));
        }
        if !self.world.contains(self.start) {
            return Err(GuidanceError::Start {
                x: self.start.x,
                y: self.start.y,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    pub mode: Mode,
    /// NaN until the first valid reading.
    pub filtered_range: f64,
    pub left_us: u16,
    pub right_us: u16,
    pub collected_cum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionResult {
    pub trajectory: Vec<TrajectoryRow>,
    /// particles
    pub collected: f64,
    pub collisions: u32,
    pub dropouts: u32,
    /// m through the water
    pub distance: f64,
}

pub fn run_mission(cfg: &MissionConfig) -> Result<MissionResult, GuidanceError> {
    cfg.validate()?;
    let world = &cfg.world;
    let dt = cfg.dt_s;
    let mut sensor = RangeSensor::new(cfg.sensor.clone())?;
    let mut state = AgentState::at_rest(
        cfg.start,
        cfg.start_heading_deg.to_radians(),
        RangeFilter::new(cfg.filter_window)?,
    );
    let steps = cfg.steps();
    let mut trajectory = Vec::with_capacity(steps + 1);
    let mut collected = 0.0;
    let mut collisions = 0;
    let mut dropouts = 0;
    let mut distance = 0.0;

    trajectory.push(TrajectoryRow {
        t: 0.0,
        x: state.position.x,
        y: state.position.y,
        heading: state.heading,
        speed: state.speed,
        mode: state.mode,
        filtered_range: f64::NAN,
        left_us: 1500,
        right_us: 1500,
        collected_cum: 0.0,
    });

    for i in 0..steps {
        let reading = sensor.read(world, state.position, state.heading);
        if reading.is_none() {
            dropouts += 1;
        }
        let filtered = state.filter.update(reading);
        let (mode, cmd) = avoidance_policy(
            filtered.unwrap_or(cfg.sensor.max_range),
            state.mode,
            &cfg.policy,
        )?;
        state.mode = mode;
        let concentration = world.concentration.at(state.position);
        let out = step_agent(world, &state, cmd, &cfg.agent, dt)?;
        collected += concentration * cfg.agent.mouth_area_m2 * out.mean_speed * dt;
        distance += out.mean_speed * dt;
        if out.collided {
            collisions += 1;
        }
        state = out.state;
        trajectory.push(TrajectoryRow {
            t: (i + 1) as f64 * dt,
            x: state.position.x,
            y: state.position.y,
            heading: state.heading,
            speed: state.speed,
            mode: state.mode,
            filtered_range: filtered.unwrap_or(f64::NAN),
            left_us: cmd.left_us,
            right_us: cmd.right_us,
            collected_cum: collected,
        });
    }

    Ok(MissionResult {
        trajectory,
        collected,
        collisions,
        dropouts,
        distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guidance::world::PiecewiseField;

    #[test]
    fn zero_concentration_collects_nothing() {
        let mut cfg = MissionConfig {
            duration_s: 60.0,
            ..MissionConfig::default()
        };
        cfg.world.concentration = PiecewiseField::uniform(0.0);
        assert_eq!(run_mission(&cfg).unwrap().collected, 0.0);
    }

    #[test]
    fn uniform_sweep_matches_analytic() {
        let c = 0.104;
        let cfg = MissionConfig {
            world: LakeWorld::rectangle(5000.0, 100.0, Vec2::ZERO, c),
            start: Vec2::new(50.0, 50.0),
            duration_s: 3600.0,
            ..MissionConfig::default()
        };
        let r = run_mission(&cfg).unwrap();
        assert_eq!(r.collisions, 0);
        assert!(r.trajectory.iter().all(|row| row.mode == Mode::Cruise));
        let oracle = c * 0.5 * 1.0289 * 3600.0;
        assert!(
            (r.collected - oracle).abs() / oracle < 0.01,
            "{} vs {oracle}",
            r.collected
        );
    }

    #[test]
    fn replay_is_bit_identical() {
        let cfg = MissionConfig {
            duration_s: 300.0,
            ..MissionConfig::default()
        };
        let a = run_mission(&cfg).unwrap();
        let b = run_mission(&cfg).unwrap();
        assert_eq!(a.trajectory.len(), b.trajectory.len());
        for (ra, rb) in a.trajectory.iter().zip(&b.trajectory) {
            assert_eq!(ra.x.to_bits(), rb.x.to_bits());
            assert_eq!(ra.y.to_bits(), rb.y.to_bits());
            assert_eq!(ra.heading.to_bits(), rb.heading.to_bits());
            assert_eq!(ra.filtered_range.to_bits(), rb.filtered_range.to_bits());
        }
        assert_eq!(a.collected.to_bits(), b.collected.to_bits());
    }

    #[test]
    fn no_collisions_in_convex_lakes() {
        let worlds = [
            LakeWorld::default(),
            LakeWorld::rectangle(40.0, 25.0, Vec2::new(-0.1, 0.05), 1.0),
            LakeWorld::regular_polygon(6, 30.0, Vec2::new(0.08, -0.06), 1.0),
        ];
        for world in worlds {
            let start = world.boundary.iter().fold(Vec2::ZERO, |acc, v| acc + *v)
                * (1.0 / world.boundary.len() as f64);
            for seed in 0..20u64 {
                let cfg = MissionConfig {
                    start,
                    start_heading_deg: seed as f64 * 37.0,
                    sensor: SensorModel {
                        seed,
                        ..SensorModel::default()
                    },
                    duration_s: 1000.0,
                    world: world.clone(),
                    ..MissionConfig::default()
                };
                assert!(cfg.policy.threshold >= cfg.safe_threshold());
                let r = run_mission(&cfg).unwrap();
                assert_eq!(r.collisions, 0, "seed {seed}");
            }
        }
    }

    #[test]
    fn speed_stays_under_cap_plus_current() {
        let cfg = MissionConfig {
            world: LakeWorld::rectangle(40.0, 25.0, Vec2::new(0.1, 0.0), 1.0),
            start: Vec2::new(20.0, 12.0),
            duration_s: 600.0,
            ..MissionConfig::default()
        };
        let r = run_mission(&cfg).unwrap();
        let cap = cfg.agent.max_speed_mps;
        for w in r.trajectory.windows(2) {
            assert!(w[1].speed <= cap + 1e-12);
            let ground = Vec2::new(w[1].x - w[0].x, w[1].y - w[0].y).norm() / cfg.dt_s;
            assert!(ground <= cap + 0.1 + 1e-9, "{ground}");
        }
    }

    #[test]
    fn rejects_bad_setups() {
        let outside = MissionConfig {
            start: Vec2::new(-1.0, 0.0),
            ..MissionConfig::default()
        };
        assert!(matches!(
            run_mission(&outside),
            Err(GuidanceError::Start { .. })
        ));
        let blind = MissionConfig {
            sensor: SensorModel {
                max_range: 3.5,
                ..SensorModel::default()
            },
            ..MissionConfig::default()
        };
        assert!(matches!(run_mission(&blind), Err(GuidanceError::Sensor(_))));
    }
}
