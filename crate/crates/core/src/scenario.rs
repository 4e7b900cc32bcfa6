//! JSON scenario documents. Every section and field is optional; missing
//! values resolve to the defaults of the corresponding module.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collection::{RiverSite, DEFAULT_BAND_FRACTION};
use crate::depletion::{CostModel, LakeScenario, ERIE_WEEKLY_TRAWLS};
use crate::energy::{IrradianceProfile, PowerPlant};
use crate::guidance::MissionConfig;
use crate::stability::{BallastProblem, ForceCurve, MassBudget};
use crate::trawl::{TrawlSpec, MAX_MICROPLASTIC_DIAMETER_MM};
use crate::units::{Quantity, Unit};
use crate::Rounding;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid scenario {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrawlSection {
    pub spec: TrawlSpec,
    pub particle_diameter_mm: f64,
    /// Particles collected per hour of trawling.
    pub collection_rate_per_hour: f64,
    pub duty_hours_per_day: f64,
}

impl Default for TrawlSection {
    fn default() -> Self {
        Self {
            spec: TrawlSpec::default(),
            particle_diameter_mm: MAX_MICROPLASTIC_DIAMETER_MM,
            collection_rate_per_hour: 220.0,
            duty_hours_per_day: 24.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CenterOfMassSection {
    pub target_cm: f64,
    pub body_mass: f64,
    pub body_cm: f64,
    pub ballast_depth: f64,
}

impl Default for CenterOfMassSection {
    fn default() -> Self {
        Self {
            target_cm: -0.25,
            body_mass: 10.0,
            body_cm: 0.1,
            ballast_depth: -0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilitySection {
    pub curve: ForceCurve,
    pub problem: BallastProblem,
    /// Design tilt angle, degrees.
    pub target_angle_deg: f64,
    /// Ballast to solve the equilibrium for; the design-angle ballast when unset.
    pub ballast_mass: Option<f64>,
    /// Spacing of the tabulated force curve, degrees.
    pub sweep_step_deg: f64,
    pub center_of_mass: CenterOfMassSection,
    pub mass_budget: MassBudget,
}

impl Default for StabilitySection {
    fn default() -> Self {
        Self {
            curve: ForceCurve::default(),
            problem: BallastProblem::default(),
            target_angle_deg: 80.0,
            ballast_mass: None,
            sweep_step_deg: 1.0,
            center_of_mass: CenterOfMassSection::default(),
            mass_budget: MassBudget::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RiverSection {
    pub site: RiverSite,
    pub mouth_area: Quantity,
    pub duration_h: f64,
    pub band_fraction: f64,
    pub observed: Option<u64>,
    pub visual_error: f64,
}

impl Default for RiverSection {
    fn default() -> Self {
        Self {
            site: RiverSite::default(),
            mouth_area: Quantity::new(0.5, Unit::SquareMeter),
            duration_h: 1.0,
            band_fraction: DEFAULT_BAND_FRACTION,
            observed: Some(4438),
            visual_error: 0.20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LakeSection {
    pub scenario: LakeScenario,
    /// Fit the daily influx so the run stops with this many trawls.
    pub calibrate_to: Option<u32>,
    pub cost: CostModel,
}

impl Default for LakeSection {
    fn default() -> Self {
        Self {
            scenario: LakeScenario::erie_weekly(),
            calibrate_to: Some(ERIE_WEEKLY_TRAWLS),
            cost: CostModel::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerSection {
    pub plant: PowerPlant,
    pub irradiance: IrradianceProfile,
    pub days: u32,
    pub step_minutes: u32,
}

impl Default for PowerSection {
    fn default() -> Self {
        Self {
            plant: PowerPlant::default(),
            irradiance: IrradianceProfile::default(),
            days: 7,
            step_minutes: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: Rounding,
    pub trawl: TrawlSection,
    pub stability: StabilitySection,
    pub river: RiverSection,
    pub lake: LakeSection,
    pub power: PowerSection,
    pub mission: MissionConfig,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    /// The fully resolved document, defaults included.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}
