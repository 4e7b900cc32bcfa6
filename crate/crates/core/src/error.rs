use thiserror::Error;

use crate::collection::CollectionError;
use crate::depletion::DepletionError;
use crate::energy::EnergyError;
use crate::guidance::GuidanceError;
use crate::stability::StabilityError;
use crate::trawl::TrawlError;
use crate::units::UnitError;

/// Crate-wide error. Every variant carries the name of the module it came
/// from so the CLI can print a module-qualified message.
#[derive(Debug, Error)]
pub enum Error {
    #[error("units: {0}")]
    Units(#[from] UnitError),
    #[error("trawl: {0}")]
    Trawl(#[from] TrawlError),
    #[error("stability: {0}")]
    Stability(#[from] StabilityError),
    #[error("collection: {0}")]
    Collection(#[from] CollectionError),
    #[error("depletion: {0}")]
    Depletion(#[from] DepletionError),
    #[error("energy: {0}")]
    Energy(#[from] EnergyError),
    #[error("guidance: {0}")]
    Guidance(#[from] GuidanceError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
