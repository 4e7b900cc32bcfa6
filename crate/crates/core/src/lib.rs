//! Models and a deterministic simulator for a solar-powered, autonomous
//! surface trawl that collects floating microplastics.
//!
//! The crate is split by concern:
//!
//! - [`units`]: the handful of physical units the models exchange, with fixed
//!   conversion constants.
//! - [`trawl`]: net geometry, particle capacity and fill time.
//! - [`stability`]: quintic water-force curve, tipping torque, ballast sizing
//!   and buoyancy margin.
//! - [`collection`]: flow-through yield estimate for a river deployment and the
//!   observed-vs-expected comparison.
//! - [`depletion`]: well-mixed lake box model under a deployment schedule,
//!   influx calibration and campaign cost.
//! - [`energy`]: battery/solar state of charge over the day.
//! - [`guidance`]: 2D simulation of the autonomous guidance loop.
//! - [`scenario`], [`output`], [`reproduce`] and [`cli`]: the batch front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod collection;
pub mod depletion;
pub mod energy;
pub mod error;
pub mod guidance;
pub mod output;
pub mod reproduce;
pub mod scenario;
pub mod stability;
pub mod trawl;
pub mod units;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// How intermediate values are rounded.
///
/// `Paper` replays the hand-calculation chain, rounding intermediates the way
/// the worked figures were. `Exact` carries full `f64` precision throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    #[default]
    Paper,
    Exact,
}

/// Rounds `x` to `places` decimal places, half away from zero.
pub(crate) fn round_to(x: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (x * scale).round() / scale
}

/// Rounds `x` to `digits` significant figures.
pub(crate) fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    round_to(x, digits - 1 - magnitude)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_helpers() {
        assert_eq!(round_to(3.990566, 2), 3.99);
        assert_eq!(round_to(21.4662, 2), 21.47);
        assert_eq!(round_sig(65.449847, 4), 65.45);
        assert_eq!(round_sig(65.45, 3), 65.5);
        assert_eq!(round_sig(0.0, 3), 0.0);
    }
}
