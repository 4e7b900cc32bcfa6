//! Kinematics of the twin-thruster trawl.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::control::{Mode, ThrusterCommand};
use super::sensor::RangeFilter;
use super::world::{LakeWorld, Vec2};
use super::GuidanceError;
use crate::units::{operating_speed_mps, METERS_PER_SECOND_PER_KNOT, TRAWL_SPEED_CAP_KNOTS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentParams {
    /// Steady speed under full symmetric thrust, m/s.
    pub max_speed_mps: f64,
    /// First-order drag time constant, s.
    pub speed_time_constant_s: f64,
    /// Yaw rate under a full differential command, rad/s.
    pub max_yaw_rate_rad_s: f64,
    pub mouth_area_m2: f64,
}

impl Default for AgentParams {
    fn default() -> Self {
        Self {
            max_speed_mps: operating_speed_mps(),
            speed_time_constant_s: 2.0,
            max_yaw_rate_rad_s: 1.5,
            mouth_area_m2: 0.5,
        }
    }
}

impl AgentParams {
    pub fn validate(&self) -> Result<(), GuidanceError> {
        let cap = TRAWL_SPEED_CAP_KNOTS * METERS_PER_SECOND_PER_KNOT;
        if !(self.max_speed_mps > 0.0 && self.max_speed_mps < cap) {
            return Err(GuidanceError::Agent(format!(
                "max_speed_mps {} must be in (0, {cap:.4})",
                self.max_speed_mps
            )));
        }
        for (name, v) in [
            ("speed_time_constant_s", self.speed_time_constant_s),
            ("max_yaw_rate_rad_s", self.max_yaw_rate_rad_s),
            ("mouth_area_m2", self.mouth_area_m2),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(GuidanceError::Agent(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub position: Vec2,
    /// rad, wrapped to (−π, π]
    pub heading: f64,
    /// Speed through the water, m/s.
    pub speed: f64,
    pub mode: Mode,
    pub filter: RangeFilter,
}

impl AgentState {
    pub fn at_rest(position: Vec2, heading: f64, filter: RangeFilter) -> Self {
        Self {
            position,
            heading: wrap_angle(heading),
            speed: 0.0,
            mode: Mode::Cruise,
            filter,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: AgentState,
    pub collided: bool,
    /// Mean speed through the water over the step, m/s.
    pub mean_speed: f64,
}

pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

fn reflect(v: Vec2, n: Vec2) -> Vec2 {
    v - n * (2.0 * v.dot(n))
}

/// Advances one tick. Forward thrust is the mean of the two fractions and
/// sets the target speed; half their difference scales the yaw rate. Speed
/// follows `dv/dt = (v_target − v)/τ`, integrated exactly. A step that
/// leaves the lake is mirrored back across the crossed edge.
pub fn step_agent(
    world: &LakeWorld,
    agent: &AgentState,
    cmd: ThrusterCommand,
    params: &AgentParams,
    dt: f64,
) -> Result<StepOutcome, GuidanceError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(GuidanceError::Step(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let (fl, fr) = cmd.thrust()?;
    let forward = 0.5 * (fl + fr);
    let turn = 0.5 * (fr - fl);
    let target = params.max_speed_mps * forward.max(0.0);
    let tau = params.speed_time_constant_s;
    let decay = (-dt / tau).exp();
    let v0 = agent.speed;
    let v1 = target + (v0 - target) * decay;
    let mean_speed = target + (v0 - target) * tau / dt * (1.0 - decay);

    let yaw = params.max_yaw_rate_rad_s * turn;
    let mid_heading = agent.heading + 0.5 * yaw * dt;
    let mut heading = agent.heading + yaw * dt;

    let p0 = agent.position;
    let drift = world.current.at(p0);
    let p1 = p0 + Vec2::from_heading(mid_heading) * (mean_speed * dt) + drift * dt;

    let (position, collided) = match world.first_crossing(p0, p1) {
        Some(c) => {
            let n = world.edge_normal(c.edge);
            let (a, _) = world.edge(c.edge);
            let mirrored = p1 - n * (2.0 * (p1 - a).dot(n));
            heading = reflect(Vec2::from_heading(heading), n).heading();
            if world.contains(mirrored) && world.first_crossing(p0, mirrored).is_none() {
                (mirrored, true)
            } else {
                (p0, true)
            }
        }
        None if !world.contains(p1) => (p0, true),
        None => (p1, false),
    };

    Ok(StepOutcome {
        state: AgentState {
            position,
            heading: wrap_angle(heading),
            speed: v1,
            mode: agent.mode,
            filter: agent.filter.clone(),
        },
        collided,
        mean_speed,
    })
}
