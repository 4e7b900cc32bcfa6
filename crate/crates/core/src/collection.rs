//! Flow-through yield estimate for a river deployment, and the comparison of
//! an observed count against it.
//!
//! The river case was worked in imperial units: discharge divided by a
//! per-foot area gives a flow per square foot, times the mouth area gives
//! the water passing through the net. In [`Rounding::Paper`] mode every
//! intermediate is rounded to two decimals. The divisor is either the channel
//! width read as ft² or the depth × width cross-section.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{convert, Dimension, Quantity, Unit, UnitError};
use crate::{round_to, Rounding};

pub const DEFAULT_BAND_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CollectionError {
    #[error(transparent)]
    Units(#[from] UnitError),
    #[error("{field} must be strictly positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("fraction {field} must be in [0, 1), got {value}")]
    Fraction { field: &'static str, value: f64 },
    #[error("expected count must be positive, got {0}")]
    Expected(f64),
}

fn positive(field: &'static str, value: f64) -> Result<f64, CollectionError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CollectionError::NonPositive { field, value })
    }
}

/// Which area the discharge is divided by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Divisor {
    /// Channel width read as an area, as in the printed chain.
    #[default]
    Width,
    /// Depth × width.
    CrossSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RiverSite {
    pub discharge: Quantity,
    pub mean_depth: Quantity,
    pub width: Quantity,
    /// particles/m³
    pub concentration: f64,
    pub divisor: Divisor,
}

impl Default for RiverSite {
    /// Milwaukee River test site.
    fn default() -> Self {
        Self {
            discharge: Quantity::new(423.0, Unit::CubicFootPerSecond),
            mean_depth: Quantity::feet(1.2),
            width: Quantity::feet(106.0),
            concentration: 1.58,
            divisor: Divisor::Width,
        }
    }
}

impl RiverSite {
    pub fn validate(&self) -> Result<(), CollectionError> {
        positive("discharge", self.discharge.si_value_of(Dimension::Flow)?)?;
        positive(
            "mean_depth",
            self.mean_depth.si_value_of(Dimension::Length)?,
        )?;
        positive("width", self.width.si_value_of(Dimension::Length)?)?;
        positive("concentration", self.concentration)?;
        Ok(())
    }

    /// The area the discharge is divided by, in the width's unit squared.
    pub fn divisor_area(&self) -> Result<Quantity, CollectionError> {
        match self.divisor {
            Divisor::CrossSection => cross_section(self.mean_depth, self.width),
            Divisor::Width => {
                let unit = self.width.unit.squared().ok_or(UnitError::WrongDimension {
                    expected: Dimension::Length,
                    unit: self.width.unit,
                })?;
                Ok(Quantity::new(self.width.value, unit))
            }
        }
    }
}

/// depth × width. Same-unit inputs keep that unit squared; mixed units give m².
pub fn cross_section(depth: Quantity, width: Quantity) -> Result<Quantity, CollectionError> {
    let d_si = positive("depth", depth.si_value_of(Dimension::Length)?)?;
    let w_si = positive("width", width.si_value_of(Dimension::Length)?)?;
    if depth.unit == width.unit {
        if let Some(unit) = depth.unit.squared() {
            return Ok(Quantity::new(depth.value * width.value, unit));
        }
    }
    Ok(Quantity::new(d_si * w_si, Unit::SquareMeter))
}

/// Water through the mouth: `(discharge / divisor_area) · mouth_area`, in m³/s.
pub fn throughput(
    discharge: Quantity,
    divisor_area: Quantity,
    mouth_area: Quantity,
) -> Result<Quantity, CollectionError> {
    let q = positive("discharge", discharge.si_value_of(Dimension::Flow)?)?;
    let a = positive("divisor_area", divisor_area.si_value_of(Dimension::Area)?)?;
    let m = positive("mouth_area", mouth_area.si_value_of(Dimension::Area)?)?;
    Ok(Quantity::new(q / a * m, Unit::CubicMeterPerSecond))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YieldEstimate {
    pub throughput_m3s: f64,
    pub volume_m3: f64,
    pub expected_count: f64,
    pub band: (u64, u64),
    pub band_fraction: f64,
}

/// Expected particle count for `duration_h` hours of collection, with a
/// ±[`DEFAULT_BAND_FRACTION`] band rounded outward.
pub fn expected_yield(
    site: &RiverSite,
    mouth_area: Quantity,
    duration_h: f64,
    rounding: Rounding,
) -> Result<YieldEstimate, CollectionError> {
    expected_yield_with_band(
        site,
        mouth_area,
        duration_h,
        rounding,
        DEFAULT_BAND_FRACTION,
    )
}

pub fn expected_yield_with_band(
    site: &RiverSite,
    mouth_area: Quantity,
    duration_h: f64,
    rounding: Rounding,
    band_fraction: f64,
) -> Result<YieldEstimate, CollectionError> {
    site.validate()?;
    positive("duration", duration_h)?;
    if !(0.0..1.0).contains(&band_fraction) {
        return Err(CollectionError::Fraction {
            field: "band_fraction",
            value: band_fraction,
        });
    }
    let divisor = site.divisor_area()?;
    let (throughput_m3s, volume_m3, expected_count) = match rounding {
        Rounding::Exact => {
            let q = throughput(site.discharge, divisor, mouth_area)?.value;
            let volume = q * 3600.0 * duration_h;
            (q, volume, volume * site.concentration)
        }
        Rounding::Paper => {
            let q_ft3s = convert(site.discharge, Unit::CubicFootPerSecond)?.value;
            let a_ft2 = convert(divisor, Unit::SquareFoot)?.value;
            let mouth_ft2 = round_to(convert(mouth_area, Unit::SquareFoot)?.value, 2);
            positive("mouth_area", mouth_ft2)?;
            let per_ft2 = round_to(q_ft3s / a_ft2, 2);
            let through_ft3s = round_to(per_ft2 * mouth_ft2, 2);
            let q = round_to(
                convert(
                    Quantity::new(through_ft3s, Unit::CubicFootPerSecond),
                    Unit::CubicMeterPerSecond,
                )?
                .value,
                2,
            );
            let hourly = (q * 3600.0).round();
            let volume = hourly * duration_h;
            (q, volume, (volume * site.concentration).floor())
        }
    };
    let band = (
        (expected_count * (1.0 - band_fraction)).floor() as u64,
        (expected_count * (1.0 + band_fraction)).ceil() as u64,
    );
    Ok(YieldEstimate {
        throughput_m3s,
        volume_m3,
        expected_count,
        band,
        band_fraction,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservedAnalysis {
    pub ratio: f64,
    pub observed_range: (u64, u64),
}

/// Ratio of an observed count to the expectation, and the range the observed
/// count spans under a visual counting error of `visual_error`.
pub fn observed_vs_expected(
    observed: u64,
    expected: f64,
    visual_error: f64,
) -> Result<ObservedAnalysis, CollectionError> {
    if !(expected > 0.0) {
        return Err(CollectionError::Expected(expected));
    }
    if !(0.0..1.0).contains(&visual_error) {
        return Err(CollectionError::Fraction {
            field: "visual_error",
            value: visual_error,
        });
    }
    let o = observed as f64;
    Ok(ObservedAnalysis {
        ratio: o / expected,
        observed_range: (
            (o * (1.0 - visual_error)).round() as u64,
            (o * (1.0 + visual_error)).round() as u64,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mouth() -> Quantity {
        Quantity::new(0.5, Unit::SquareMeter)
    }

    #[test]
    fn cross_sections() {
        let a = cross_section(Quantity::feet(1.2), Quantity::feet(106.0)).unwrap();
        assert!((a.value - 127.2).abs() < 1e-9);
        assert_eq!(a.unit, Unit::SquareFoot);
        let one = cross_section(Quantity::meters(1.0), Quantity::meters(1.0)).unwrap();
        assert_eq!(one, Quantity::new(1.0, Unit::SquareMeter));
        let m = cross_section(Quantity::meters(0.6), Quantity::meters(32.3)).unwrap();
        assert!((m.value - 19.38).abs() < 1e-9);
        let mixed = cross_section(Quantity::feet(1.0), Quantity::meters(1.0)).unwrap();
        assert!((mixed.value - 0.3048).abs() < 1e-12);
        assert!(cross_section(Quantity::feet(0.0), Quantity::feet(1.0)).is_err());
    }

    #[test]
    fn throughput_examples() {
        let q = Quantity::new(423.0, Unit::CubicFootPerSecond);
        let through = throughput(
            q,
            Quantity::new(106.0, Unit::SquareFoot),
            Quantity::new(5.38, Unit::SquareFoot),
        )
        .unwrap();
        let ft3s = convert(through, Unit::CubicFootPerSecond).unwrap().value;
        // 423 / 106 · 5.38
        assert!((ft3s - 21.469_245_283).abs() < 1e-6);
        assert!((through.value - 0.607_940_3).abs() < 1e-6);

        let same = throughput(
            q,
            Quantity::new(7.0, Unit::SquareFoot),
            Quantity::new(7.0, Unit::SquareFoot),
        )
        .unwrap();
        assert!((same.value - q.si_value()).abs() < 1e-12);

        let consistent = throughput(
            q,
            Quantity::new(127.2, Unit::SquareFoot),
            Quantity::new(5.38, Unit::SquareFoot),
        )
        .unwrap();
        let ft3s = convert(consistent, Unit::CubicFootPerSecond).unwrap().value;
        assert!((ft3s - 17.89).abs() < 0.005);

        assert!(throughput(q, Quantity::new(0.0, Unit::SquareFoot), mouth()).is_err());
    }

    #[test]
    fn hand_rounded_chain() {
        let y = expected_yield(&RiverSite::default(), mouth(), 1.0, Rounding::Paper).unwrap();
        assert_eq!(y.throughput_m3s, 0.61);
        assert_eq!(y.volume_m3, 2196.0);
        assert_eq!(y.expected_count, 3469.0);
        assert_eq!(y.band, (3122, 3816));
    }

    #[test]
    fn exact_chain() {
        // With the mouth as printed (5.38 ft²): 2188.5 m³ · 1.58 ≈ 3458.
        let printed_mouth = Quantity::new(5.38, Unit::SquareFoot);
        let y = expected_yield(&RiverSite::default(), printed_mouth, 1.0, Rounding::Exact).unwrap();
        assert!(
            (y.expected_count - 3458.0).abs() <= 1.0,
            "{}",
            y.expected_count
        );
        assert!((y.volume_m3 - 2188.5).abs() < 1.0);

        // With the true 0.5 m² mouth, SI all the way.
        let y = expected_yield(&RiverSite::default(), mouth(), 1.0, Rounding::Exact).unwrap();
        let oracle = 423.0 * 0.028_316_8 / (106.0 * 0.092_903_04) * 0.5 * 3600.0 * 1.58;
        assert!((y.expected_count - oracle).abs() < 1e-9);
        assert!((y.expected_count - 3459.2).abs() < 0.1);
        let paper = expected_yield(&RiverSite::default(), mouth(), 1.0, Rounding::Paper).unwrap();
        assert!((paper.expected_count - y.expected_count).abs() / paper.expected_count < 0.005);
    }

    #[test]
    fn cross_section_divisor() {
        let site = RiverSite {
            divisor: Divisor::CrossSection,
            ..RiverSite::default()
        };
        let y = expected_yield(&site, mouth(), 1.0, Rounding::Exact).unwrap();
        let width = expected_yield(&RiverSite::default(), mouth(), 1.0, Rounding::Exact).unwrap();
        assert!((y.expected_count / width.expected_count - 106.0 / 127.2).abs() < 1e-12);
    }

    #[test]
    fn vanishing_duration() {
        let y = expected_yield(&RiverSite::default(), mouth(), 1e-9, Rounding::Exact).unwrap();
        assert!(y.expected_count < 1e-5);
        assert!(expected_yield(&RiverSite::default(), mouth(), 0.0, Rounding::Exact).is_err());
    }

    #[test]
    fn observed_examples() {
        let a = observed_vs_expected(4438, 3469.0, 0.20).unwrap();
        assert!((a.ratio - 1.279_331).abs() < 1e-6);
        assert_eq!(a.observed_range, (3550, 5326));
        let b = observed_vs_expected(500, 500.0, 0.0).unwrap();
        assert_eq!(b.ratio, 1.0);
        assert_eq!(b.observed_range, (500, 500));
        let c = observed_vs_expected(4438, 3458.0, 0.20).unwrap();
        assert!((c.ratio - 1.283).abs() < 5e-4);
        assert!(observed_vs_expected(1, 0.0, 0.1).is_err());
        assert!(observed_vs_expected(1, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn exact_yield_is_linear(
            hours in 0.01f64..48.0,
            conc in 0.01f64..30.0,
            mouth_m2 in 0.05f64..5.0,
            k in 1.5f64..10.0,
        ) {
            let site = RiverSite { concentration: conc, ..RiverSite::default() };
            let m = Quantity::new(mouth_m2, Unit::SquareMeter);
            let base = expected_yield(&site, m, hours, Rounding::Exact).unwrap().expected_count;
            let rel = |x: f64| (x / (k * base) - 1.0).abs() < 1e-12;
            prop_assert!(rel(expected_yield(&site, m, hours * k, Rounding::Exact).unwrap().expected_count));
            let dense = RiverSite { concentration: conc * k, ..site.clone() };
            prop_assert!(rel(expected_yield(&dense, m, hours, Rounding::Exact).unwrap().expected_count));
            let big = Quantity::new(mouth_m2 * k, Unit::SquareMeter);
            prop_assert!(rel(expected_yield(&site, big, hours, Rounding::Exact).unwrap().expected_count));
        }

        #[test]
        fn ranges_contain_centre(observed in 0u64..1_000_000, e in 0.0f64..0.99, hours in 0.01f64..100.0) {
            let a = observed_vs_expected(observed, 1.0, e).unwrap();
            prop_assert!(a.observed_range.0 <= observed && observed <= a.observed_range.1);
            for rounding in [Rounding::Paper, Rounding::Exact] {
                let y = expected_yield(&RiverSite::default(), mouth(), hours, rounding).unwrap();
                prop_assert!(y.band.0 as f64 <= y.expected_count);
                prop_assert!(y.expected_count <= y.band.1 as f64);
            }
        }
    }
}
