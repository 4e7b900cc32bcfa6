//! PWM thrust encoding and the obstacle-avoidance state machine.

use serde::{Deserialize, Serialize};

use super::GuidanceError;

pub const PULSE_MIN_US: u16 = 1000;
pub const PULSE_NEUTRAL_US: u16 = 1500;
pub const PULSE_MAX_US: u16 = 2000;
const PULSE_SPAN_US: f64 = 500.0;

/// Maps a thrust fraction in `[-1, 1]` to an ESC pulse width.
pub fn pulse_from_thrust(fraction: f64) -> Result<u16, GuidanceError> {
    if !(-1.0..=1.0).contains(&fraction) {
        return Err(GuidanceError::Thrust(fraction));
    }
    Ok((f64::from(PULSE_NEUTRAL_US) + PULSE_SPAN_US * fraction).round() as u16)
}

pub fn thrust_from_pulse(pulse_us: u16) -> Result<f64, GuidanceError> {
    if !(PULSE_MIN_US..=PULSE_MAX_US).contains(&pulse_us) {
        return Err(GuidanceError::Pulse(pulse_us));
    }
    Ok((f64::from(pulse_us) - f64::from(PULSE_NEUTRAL_US)) / PULSE_SPAN_US)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThrusterCommand {
    pub left_us: u16,
    pub right_us: u16,
}

impl ThrusterCommand {
    pub const NEUTRAL: ThrusterCommand = ThrusterCommand {
        left_us: PULSE_NEUTRAL_US,
        right_us: PULSE_NEUTRAL_US,
    };

    /// Full differential turn to port.
    pub const TURN: ThrusterCommand = ThrusterCommand {
        left_us: PULSE_MIN_US,
        right_us: PULSE_MAX_US,
    };

    pub fn new(left_us: u16, right_us: u16) -> Result<Self, GuidanceError> {
        thrust_from_pulse(left_us)?;
        thrust_from_pulse(right_us)?;
        Ok(Self { left_us, right_us })
    }

    pub fn from_thrust(left: f64, right: f64) -> Result<Self, GuidanceError> {
        Ok(Self {
            left_us: pulse_from_thrust(left)?,
            right_us: pulse_from_thrust(right)?,
        })
    }

    /// `(left, right)` thrust fractions.
    pub fn thrust(&self) -> Result<(f64, f64), GuidanceError> {
        Ok((
            thrust_from_pulse(self.left_us)?,
            thrust_from_pulse(self.right_us)?,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Mode {
    #[default]
    Cruise,
    Avoid,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Cruise => "CRUISE",
            Mode::Avoid => "AVOID",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyParams {
    /// m
    pub threshold: f64,
    /// m
    pub hysteresis: f64,
    /// Symmetric thrust fraction used while cruising.
    pub cruise_thrust: f64,
}

impl Default for PolicyParams {
    fn default() -> Self {
        Self {
            threshold: 3.0,
            hysteresis: 1.0,
            cruise_thrust: 1.0,
        }
    }
}

impl PolicyParams {
    pub fn validate(&self) -> Result<(), GuidanceError> {
        if !(self.threshold > self.hysteresis && self.hysteresis > 0.0) {
            return Err(GuidanceError::Policy {
                threshold: self.threshold,
                hysteresis: self.hysteresis,
            });
        }
        pulse_from_thrust(self.cruise_thrust)?;
        Ok(())
    }

    pub fn cruise_command(&self) -> Result<ThrusterCommand, GuidanceError> {
        ThrusterCommand::from_thrust(self.cruise_thrust, self.cruise_thrust)
    }
}

/// Next mode and command for a filtered range reading.
pub fn avoidance_policy(
    filtered: f64,
    mode: Mode,
    params: &PolicyParams,
) -> Result<(Mode, ThrusterCommand), GuidanceError> {
    params.validate()?;
    let next = match mode {
        Mode::Cruise if filtered < params.threshold => Mode::Avoid,
        Mode::Avoid if filtered > params.threshold + params.hysteresis => Mode::Cruise,
        held => held,
    };
    let cmd = match next {
        Mode::Cruise => params.cruise_command()?,
        Mode::Avoid => ThrusterCommand::TURN,
    };
    Ok((next, cmd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pulse_examples() {
        assert_eq!(pulse_from_thrust(0.0).unwrap(), 1500);
        assert_eq!(pulse_from_thrust(1.0).unwrap(), 2000);
        assert_eq!(pulse_from_thrust(-1.0).unwrap(), 1000);
        assert_eq!(pulse_from_thrust(0.5).unwrap(), 1750);
        assert!(matches!(
            pulse_from_thrust(1.01),
            Err(GuidanceError::Thrust(_))
        ));
        assert!(pulse_from_thrust(f64::NAN).is_err());
        assert!(ThrusterCommand::new(999, 1500).is_err());
        assert!(thrust_from_pulse(2001).is_err());
    }

    #[test]
    fn policy_table() {
        let p = PolicyParams::default();
        let cruise = p.cruise_command().unwrap();
        assert_eq!(
            cruise,
            ThrusterCommand {
                left_us: 2000,
                right_us: 2000
            }
        );
        assert_eq!(
            avoidance_policy(2.0, Mode::Cruise, &p).unwrap(),
            (
                Mode::Avoid,
                ThrusterCommand {
                    left_us: 1000,
                    right_us: 2000
                }
            )
        );
        assert_eq!(
            avoidance_policy(4.5, Mode::Avoid, &p).unwrap(),
            (Mode::Cruise, cruise)
        );
        assert_eq!(
            avoidance_policy(3.5, Mode::Avoid, &p).unwrap(),
            (Mode::Avoid, ThrusterCommand::TURN)
        );
        assert_eq!(
            avoidance_policy(3.5, Mode::Cruise, &p).unwrap(),
            (Mode::Cruise, cruise)
        );
    }

    #[test]
    fn policy_params_checked() {
        for (threshold, hysteresis) in [(1.0, 1.0), (3.0, 0.0), (1.0, 2.0)] {
            let p = PolicyParams {
                threshold,
                hysteresis,
                ..PolicyParams::default()
            };
            assert!(matches!(
                avoidance_policy(5.0, Mode::Cruise, &p),
                Err(GuidanceError::Policy { .. })
            ));
        }
    }

    proptest! {
        #[test]
        fn pulse_inverse_consistent(x in -1.0f64..=1.0) {
            let back = thrust_from_pulse(pulse_from_thrust(x).unwrap()).unwrap();
            prop_assert!((back - x).abs() <= 0.5 / PULSE_SPAN_US + 1e-12);
        }

        #[test]
        fn pulse_monotone(a in -1.0f64..=1.0, b in -1.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(pulse_from_thrust(lo).unwrap() <= pulse_from_thrust(hi).unwrap());
        }
    }
}
