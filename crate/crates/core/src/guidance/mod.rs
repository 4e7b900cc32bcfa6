//! Desk-scale simulation of the autonomous trawl: a noisy range sensor,
//! a moving-average filter, PWM thrust commands, an avoidance state
//! machine and first-order kinematics inside a polygonal lake.

use thiserror::Error;

pub mod agent;
pub mod control;
pub mod mission;
pub mod sensor;
pub mod world;

pub use agent::{step_agent, AgentParams, AgentState, StepOutcome};
pub use control::{
    avoidance_policy, pulse_from_thrust, thrust_from_pulse, Mode, PolicyParams, ThrusterCommand,
};
pub use mission::{run_mission, MissionConfig, MissionResult, TrajectoryRow};
pub use sensor::{filter_update, RangeFilter, RangeSensor, SensorModel};
pub use world::{LakeWorld, PiecewiseField, Region, Vec2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GuidanceError {
    #[error("thrust fraction {0} outside [-1, 1]")]
    Thrust(f64),
    #[error("pulse width {0} µs outside [1000, 2000]")]
    Pulse(u16),
    #[error("policy needs threshold > hysteresis > 0, got threshold {threshold} m, hysteresis {hysteresis} m")]
    Policy { threshold: f64, hysteresis: f64 },
    #[error("lake boundary: {0}")]
    Boundary(String),
    #[error("lake field: {0}")]
    Field(String),
    #[error("sensor: {0}")]
    Sensor(String),
    #[error("filter window must be at least 1")]
    Filter,
    #[error("agent: {0}")]
    Agent(String),
    #[error("start position ({x}, {y}) is outside the lake")]
    Start { x: f64, y: f64 },
    #[error("{0}")]
    Step(String),
}
