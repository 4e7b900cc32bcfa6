//! Scalar quantities and the fixed unit conversions the models need.
//!
//! Everything inside the crate is computed in SI. Imperial units and knots
//! only appear at the edges (scenario files and the river-yield chain, which
//! was worked in feet). Each unit carries one fixed factor to its SI base;
//! factors are never derived from one another, so `ft³` uses its own
//! tabulated constant rather than `0.3048³`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Metres per foot.
pub const METERS_PER_FOOT: f64 = 0.3048;
/// Square metres per square foot.
pub const SQ_METERS_PER_SQ_FOOT: f64 = 0.092_903_04;
/// Cubic metres per cubic foot.
pub const CUBIC_METERS_PER_CUBIC_FOOT: f64 = 0.028_316_8;
/// Metres per second per knot.
pub const METERS_PER_SECOND_PER_KNOT: f64 = 0.514_444;
/// Cubic metres per cubic millimetre.
pub const CUBIC_METERS_PER_CUBIC_MM: f64 = 1e-9;

/// Protocol ceiling for towing speed, in knots (exclusive).
pub const TRAWL_SPEED_CAP_KNOTS: f64 = 3.0;
/// Design operating speed, in knots.
pub const OPERATING_SPEED_KNOTS: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("cannot convert {from} ({from_dim:?}) to {to} ({to_dim:?})")]
    Incompatible {
        from: Unit,
        to: Unit,
        from_dim: Dimension,
        to_dim: Dimension,
    },
    #[error("speed must be non-negative, got {0}")]
    NegativeSpeed(f64),
    #[error("expected a {expected:?} quantity, got {unit}")]
    WrongDimension { expected: Dimension, unit: Unit },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Length,
    Area,
    Volume,
    Flow,
    Speed,
    Mass,
    Force,
    Torque,
    Power,
    Energy,
    Concentration,
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "m")]
    Meter,
    #[serde(rename = "ft")]
    Foot,
    #[serde(rename = "m2")]
    SquareMeter,
    #[serde(rename = "ft2")]
    SquareFoot,
    #[serde(rename = "m3")]
    CubicMeter,
    #[serde(rename = "ft3")]
    CubicFoot,
    #[serde(rename = "mm3")]
    CubicMillimeter,
    #[serde(rename = "m3/s")]
    CubicMeterPerSecond,
    #[serde(rename = "ft3/s")]
    CubicFootPerSecond,
    #[serde(rename = "m3/h")]
    CubicMeterPerHour,
    #[serde(rename = "m/s")]
    MeterPerSecond,
    #[serde(rename = "knots")]
    Knot,
    #[serde(rename = "kg")]
    Kilogram,
    #[serde(rename = "N")]
    Newton,
    #[serde(rename = "N*m")]
    NewtonMeter,
    #[serde(rename = "W")]
    Watt,
    #[serde(rename = "Wh")]
    WattHour,
    #[serde(rename = "particles/m3")]
    ParticlesPerCubicMeter,
    #[serde(rename = "particles")]
    Particles,
}

impl Unit {
    pub const ALL: [Unit; 19] = [
        Unit::Meter,
        Unit::Foot,
        Unit::SquareMeter,
        Unit::SquareFoot,
        Unit::CubicMeter,
        Unit::CubicFoot,
        Unit::CubicMillimeter,
        Unit::CubicMeterPerSecond,
        Unit::CubicFootPerSecond,
        Unit::CubicMeterPerHour,
        Unit::MeterPerSecond,
        Unit::Knot,
        Unit::Kilogram,
        Unit::Newton,
        Unit::NewtonMeter,
        Unit::Watt,
        Unit::WattHour,
        Unit::ParticlesPerCubicMeter,
        Unit::Particles,
    ];

    pub fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            Meter | Foot => Dimension::Length,
            SquareMeter | SquareFoot => Dimension::Area,
            CubicMeter | CubicFoot | CubicMillimeter => Dimension::Volume,
            CubicMeterPerSecond | CubicFootPerSecond | CubicMeterPerHour => Dimension::Flow,
            MeterPerSecond | Knot => Dimension::Speed,
            Kilogram => Dimension::Mass,
            Newton => Dimension::Force,
            NewtonMeter => Dimension::Torque,
            Watt => Dimension::Power,
            WattHour => Dimension::Energy,
            ParticlesPerCubicMeter => Dimension::Concentration,
            Particles => Dimension::Count,
        }
    }

    /// Multiplier taking a value in this unit to the SI base of its dimension.
    ///
    /// Energy is based on Wh.
    pub fn si_factor(self) -> f64 {
        use Unit::*;
        match self {
            Foot => METERS_PER_FOOT,
            SquareFoot => SQ_METERS_PER_SQ_FOOT,
            CubicFoot | CubicFootPerSecond => CUBIC_METERS_PER_CUBIC_FOOT,
            CubicMillimeter => CUBIC_METERS_PER_CUBIC_MM,
            CubicMeterPerHour => 1.0 / 3600.0,
            Knot => METERS_PER_SECOND_PER_KNOT,
            Meter
            | SquareMeter
            | CubicMeter
            | CubicMeterPerSecond
            | MeterPerSecond
            | Kilogram
            | Newton
            | NewtonMeter
            | Watt
            | WattHour
            | ParticlesPerCubicMeter
            | Particles => 1.0,
        }
    }

    /// The SI unit of this unit's dimension.
    pub fn si(self) -> Unit {
        match self.dimension() {
            Dimension::Length => Unit::Meter,
            Dimension::Area => Unit::SquareMeter,
            Dimension::Volume => Unit::CubicMeter,
            Dimension::Flow => Unit::CubicMeterPerSecond,
            Dimension::Speed => Unit::MeterPerSecond,
            Dimension::Mass => Unit::Kilogram,
            Dimension::Force => Unit::Newton,
            Dimension::Torque => Unit::NewtonMeter,
            Dimension::Power => Unit::Watt,
            Dimension::Energy => Unit::WattHour,
            Dimension::Concentration => Unit::ParticlesPerCubicMeter,
            Dimension::Count => Unit::Particles,
        }
    }

    /// Area unit whose side is this length unit.
    pub fn squared(self) -> Option<Unit> {
        match self {
            Unit::Meter => Some(Unit::SquareMeter),
            Unit::Foot => Some(Unit::SquareFoot),
            _ => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        use Unit::*;
        match self {
            Meter => "m",
            Foot => "ft",
            SquareMeter => "m²",
            SquareFoot => "ft²",
            CubicMeter => "m³",
            CubicFoot => "ft³",
            CubicMillimeter => "mm³",
            CubicMeterPerSecond => "m³/s",
            CubicFootPerSecond => "ft³/s",
            CubicMeterPerHour => "m³/h",
            MeterPerSecond => "m/s",
            Knot => "knots",
            Kilogram => "kg",
            Newton => "N",
            NewtonMeter => "N·m",
            Watt => "W",
            WattHour => "Wh",
            ParticlesPerCubicMeter => "particles/m³",
            Particles => "particles",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A magnitude tagged with its unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub const fn new(value: f64, unit: Unit) -> Self {
        Self { value, unit }
    }

    pub fn meters(value: f64) -> Self {
        Self::new(value, Unit::Meter)
    }

    pub fn feet(value: f64) -> Self {
        Self::new(value, Unit::Foot)
    }

    pub fn knots(value: f64) -> Self {
        Self::new(value, Unit::Knot)
    }

    pub fn meters_per_second(value: f64) -> Self {
        Self::new(value, Unit::MeterPerSecond)
    }

    pub fn dimension(&self) -> Dimension {
        self.unit.dimension()
    }

    pub fn convert(self, target: Unit) -> Result<Quantity, UnitError> {
        convert(self, target)
    }

    /// Value in the SI unit of this quantity's dimension.
    pub fn si_value(&self) -> f64 {
        self.value * self.unit.si_factor()
    }

    /// SI value, after checking the quantity has the expected dimension.
    pub fn si_value_of(&self, expected: Dimension) -> Result<f64, UnitError> {
        if self.dimension() != expected {
            return Err(UnitError::WrongDimension {
                expected,
                unit: self.unit,
            });
        }
        Ok(self.si_value())
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit)
    }
}

/// Converts `q` to `target`, scaling by the fixed constants above.
pub fn convert(q: Quantity, target: Unit) -> Result<Quantity, UnitError> {
    let (from_dim, to_dim) = (q.unit.dimension(), target.dimension());
    if from_dim != to_dim {
        return Err(UnitError::Incompatible {
            from: q.unit,
            to: target,
            from_dim,
            to_dim,
        });
    }
    if q.unit == target {
        return Ok(q);
    }
    let value = q.value * q.unit.si_factor() / target.si_factor();
    Ok(Quantity::new(value, target))
}

/// True when `v` is strictly below the 3-knot towing ceiling.
pub fn speed_cap_check(v: Quantity) -> Result<bool, UnitError> {
    v.si_value_of(Dimension::Speed)?;
    let knots = convert(v, Unit::Knot)?.value;
    if knots < 0.0 {
        return Err(UnitError::NegativeSpeed(v.value));
    }
    Ok(knots < TRAWL_SPEED_CAP_KNOTS)
}

/// Design operating speed (2 knots) in m/s.
pub fn operating_speed_mps() -> f64 {
    OPERATING_SPEED_KNOTS * METERS_PER_SECOND_PER_KNOT
}
