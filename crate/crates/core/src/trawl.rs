//! Trawl geometry, particle capacity and fill time.
//!
//! The net is modelled as a rectangular pyramid behind a rigid mouth, and the
//! cod-end capacity as naive volume division by the largest microplastic
//! (a 5 mm sphere). Packing is ignored, so capacity is an over-estimate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{round_sig, Rounding};

/// Largest particle still counted as a microplastic, in millimetres.
pub const MAX_MICROPLASTIC_DIAMETER_MM: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrawlError {
    #[error("{field} must be strictly positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("pore diameter {pore_m} m is not smaller than the mouth ({min_mouth_m} m)")]
    PoreTooLarge { pore_m: f64, min_mouth_m: f64 },
    #[error("particle diameter must be in (0, {MAX_MICROPLASTIC_DIAMETER_MM}] mm, got {0}")]
    ParticleDiameter(f64),
    #[error("collection rate must be positive, got {0} particles/hour")]
    Rate(f64),
    #[error("duty must be in (0, 24] hours/day, got {0}")]
    Duty(f64),
}

fn positive(field: &'static str, value: f64) -> Result<f64, TrawlError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(TrawlError::NonPositive { field, value })
    }
}

/// Physical description of the trawl. Lengths in metres, masses in kg.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrawlSpec {
    pub mouth_width: f64,
    pub mouth_height: f64,
    pub net_length: f64,
    pub pore_diameter_um: f64,
    pub frame_mass: f64,
    pub printed_mass: f64,
    pub panel_mass: f64,
    /// Ballast sized for an 80° equilibrium tilt.
    pub ballast_mass: f64,
    pub buoy_circumference: f64,
    pub buoy_count: u32,
}

impl Default for TrawlSpec {
    fn default() -> Self {
        Self {
            mouth_width: 1.0,
            mouth_height: 0.5,
            net_length: 1.5,
            pore_diameter_um: 300.0,
            frame_mass: 3.2,
            printed_mass: 4.0,
            panel_mass: 3.5,
            ballast_mass: 7.0,
            buoy_circumference: 1.0,
            buoy_count: 4,
        }
    }
}

impl TrawlSpec {
    pub fn validate(&self) -> Result<(), TrawlError> {
        positive("mouth_width", self.mouth_width)?;
        positive("mouth_height", self.mouth_height)?;
        positive("net_length", self.net_length)?;
        positive("pore_diameter_um", self.pore_diameter_um)?;
        positive("buoy_circumference", self.buoy_circumference)?;
        positive("buoy_count", f64::from(self.buoy_count))?;
        for (field, mass) in [
            ("frame_mass", self.frame_mass),
            ("printed_mass", self.printed_mass),
            ("panel_mass", self.panel_mass),
            ("ballast_mass", self.ballast_mass),
        ] {
            positive(field, mass)?;
        }
        let pore_m = self.pore_diameter_um * 1e-6;
        let min_mouth_m = self.mouth_width.min(self.mouth_height);
        if pore_m >= min_mouth_m {
            return Err(TrawlError::PoreTooLarge {
                pore_m,
                min_mouth_m,
            });
        }
        Ok(())
    }

    /// Mouth opening in m².
    pub fn mouth_area(&self) -> f64 {
        self.mouth_width * self.mouth_height
    }
}

/// Spherical particle, worst case for capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpec {
    pub diameter_mm: f64,
}

impl ParticleSpec {
    pub fn new(diameter_mm: f64) -> Result<Self, TrawlError> {
        if diameter_mm > 0.0 && diameter_mm <= MAX_MICROPLASTIC_DIAMETER_MM {
            Ok(Self { diameter_mm })
        } else {
            Err(TrawlError::ParticleDiameter(diameter_mm))
        }
    }

    /// The largest microplastic, a 5 mm sphere.
    pub fn largest() -> Self {
        Self {
            diameter_mm: MAX_MICROPLASTIC_DIAMETER_MM,
        }
    }

    /// Sphere volume in mm³.
    ///
    /// Paper rounding goes to four significant figures, then three (65.44985 → 65.45 → 65.5 for the 5 mm sphere).
    pub fn volume_mm3(&self, rounding: Rounding) -> f64 {
        let r = self.diameter_mm / 2.0;
        let exact = 4.0 / 3.0 * PI * r.powi(3);
        match rounding {
            Rounding::Exact => exact,
            Rounding::Paper => round_sig(round_sig(exact, 4), 3),
        }
    }
}

/// Net volume L·W·H/3 in m³.
pub fn trawl_volume(spec: &TrawlSpec) -> Result<f64, TrawlError> {
    spec.validate()?;
    Ok(spec.net_length * spec.mouth_width * spec.mouth_height / 3.0)
}

/// Number of whole particles that fit in `volume_m3`.
pub fn particle_capacity(
    volume_m3: f64,
    particle: &ParticleSpec,
    rounding: Rounding,
) -> Result<u64, TrawlError> {
    positive("volume", volume_m3)?;
    let volume_mm3 = volume_m3 * 1e9;
    let ratio = volume_mm3 / particle.volume_mm3(rounding);
    Ok(floor_tolerant(ratio) as u64)
}

/// Floor that does not drop a whole unit to representation error in the
/// m³ → mm³ scaling (65.5e-9 m³ · 1e9 lands just under 65.5).
fn floor_tolerant(x: f64) -> f64 {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-12 * nearest.abs().max(1.0) {
        nearest
    } else {
        x.floor()
    }
}

/// Days to collect `capacity` particles at `rate` per hour, `duty` hours per day.
pub fn fill_time(capacity: u64, rate_per_hour: f64, duty_hours: f64) -> Result<f64, TrawlError> {
    if !(rate_per_hour > 0.0 && rate_per_hour.is_finite()) {
        return Err(TrawlError::Rate(rate_per_hour));
    }
    if !(duty_hours > 0.0 && duty_hours <= 24.0) {
        return Err(TrawlError::Duty(duty_hours));
    }
    Ok(capacity as f64 / (rate_per_hour * duty_hours))
}
