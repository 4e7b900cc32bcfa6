//! Ultrasonic range sensor and its moving-average filter.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::world::{LakeWorld, Vec2};
use super::GuidanceError;

/// Shortest reading the sensor reports, m.
pub const MIN_READING_M: f64 = 0.02;

/// Forward-looking range sensor. The beam is a fan of rays around the
/// heading; the reading is the nearest boundary hit plus Gaussian noise,
/// clamped to `(0, max_range]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorModel {
    pub max_range: f64,
    pub noise_sigma: f64,
    pub dropout_probability: f64,
    pub beam_half_angle_deg: f64,
    pub beam_rays: u32,
    pub seed: u64,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            max_range: 10.0,
            noise_sigma: 0.03,
            dropout_probability: 0.02,
            beam_half_angle_deg: 15.0,
            beam_rays: 7,
            seed: 0,
        }
    }
}

impl SensorModel {
    pub fn validate(&self) -> Result<(), GuidanceError> {
        if !(self.max_range > MIN_READING_M) {
            return Err(GuidanceError::Sensor(format!(
                "max_range {} too small",
                self.max_range
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(GuidanceError::Sensor(format!(
                "noise_sigma {}",
                self.noise_sigma
            )));
        }
        if !(0.0..1.0).contains(&self.dropout_probability) {
            return Err(GuidanceError::Sensor(format!(
                "dropout_probability {} not in [0, 1)",
                self.dropout_probability
            )));
        }
        if !(0.0..90.0).contains(&self.beam_half_angle_deg) {
            return Err(GuidanceError::Sensor(format!(
                "beam_half_angle_deg {} not in [0, 90)",
                self.beam_half_angle_deg
            )));
        }
        if self.beam_rays == 0 {
            return Err(GuidanceError::Sensor("beam_rays must be at least 1".into()));
        }
        Ok(())
    }

    /// Noise-free beam range from `position` looking along `heading`.
    pub fn true_range(&self, world: &LakeWorld, position: Vec2, heading: f64) -> f64 {
        let half = self.beam_half_angle_deg.to_radians();
        let n = self.beam_rays;
        (0..n)
            .map(|k| {
                let offset = if n == 1 {
                    0.0
                } else {
                    -half + 2.0 * half * f64::from(k) / f64::from(n - 1)
                };
                world
                    .ray_distance(position, Vec2::from_heading(heading + offset))
                    .unwrap_or(f64::INFINITY)
            })
            .fold(f64::INFINITY, f64::min)
            .min(self.max_range)
    }
}

/// A [`SensorModel`] with its own seeded noise stream.
#[derive(Debug, Clone)]
pub struct RangeSensor {
    model: SensorModel,
    rng: ChaCha8Rng,
    noise: Normal<f64>,
}

impl RangeSensor {
    pub fn new(model: SensorModel) -> Result<Self, GuidanceError> {
        model.validate()?;
        let noise = Normal::new(0.0, model.noise_sigma)
            .map_err(|e| GuidanceError::Sensor(e.to_string()))?;
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(model.seed),
            model,
            noise,
        })
    }

    pub fn model(&self) -> &SensorModel {
        &self.model
    }

    /// One reading, or `None` for a dropout. Every call consumes the same
    /// number of random draws so the stream stays aligned across configs.
    pub fn read(&mut self, world: &LakeWorld, position: Vec2, heading: f64) -> Option<f64> {
        let dropped = self.rng.gen::<f64>() < self.model.dropout_probability;
        let noise = self.noise.sample(&mut self.rng);
        if dropped {
            return None;
        }
        let range = self.model.true_range(world, position, heading);
        Some((range + noise).clamp(MIN_READING_M, self.model.max_range))
    }
}

/// Arithmetic mean of the last `window` valid readings.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeFilter {
    window: usize,
    buffer: VecDeque<f64>,
    last: Option<f64>,
}

impl Default for RangeFilter {
    fn default() -> Self {
        Self::new(5).expect("non-zero window")
    }
}

impl RangeFilter {
    pub fn new(window: usize) -> Result<Self, GuidanceError> {
        if window == 0 {
            return Err(GuidanceError::Filter);
        }
        Ok(Self {
            window,
            buffer: VecDeque::with_capacity(window),
            last: None,
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Latest filtered value, `None` before the first valid reading.
    pub fn output(&self) -> Option<f64> {
        self.last
    }

    /// Pushes a reading; a dropout leaves the buffer untouched and repeats
    /// the previous output.
    pub fn update(&mut self, reading: Option<f64>) -> Option<f64> {
        if let Some(r) = reading {
            if self.buffer.len() == self.window {
                self.buffer.pop_front();
            }
            self.buffer.push_back(r);
            self.last = Some(self.buffer.iter().sum::<f64>() / self.buffer.len() as f64);
        }
        self.last
    }
}

pub fn filter_update(filter: &mut RangeFilter, reading: Option<f64>) -> Option<f64> {
    filter.update(reading)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_input() {
        let mut f = RangeFilter::new(5).unwrap();
        let mut out = None;
        for _ in 0..5 {
            out = f.update(Some(100.0));
        }
        assert_eq!(out, Some(100.0));
    }

    #[test]
    fn ramp_then_dropout() {
        let mut f = RangeFilter::new(5).unwrap();
        for r in [10.0, 20.0, 30.0, 40.0, 50.0] {
            f.update(Some(r));
        }
        assert_eq!(f.output(), Some(30.0));
        assert_eq!(filter_update(&mut f, None), Some(30.0));
        assert_eq!(f.update(Some(60.0)), Some(40.0));
    }

    #[test]
    fn partial_window_and_empty() {
        let mut f = RangeFilter::new(5).unwrap();
        assert_eq!(f.update(None), None);
        assert_eq!(f.update(Some(4.0)), Some(4.0));
        assert_eq!(f.update(Some(8.0)), Some(6.0));
        assert!(RangeFilter::new(0).is_err());
    }

    #[test]
    fn sensor_is_seeded_and_bounded() {
        let world = LakeWorld::rectangle(20.0, 10.0, Vec2::ZERO, 0.0);
        let model = SensorModel {
            noise_sigma: 0.5,
            dropout_probability: 0.2,
            ..SensorModel::default()
        };
        let mut a = RangeSensor::new(model.clone()).unwrap();
        let mut b = RangeSensor::new(model).unwrap();
        let p = Vec2::new(15.0, 5.0);
        let mut dropouts = 0;
        for _ in 0..2000 {
            let (ra, rb) = (a.read(&world, p, 0.0), b.read(&world, p, 0.0));
            assert_eq!(ra, rb);
            match ra {
                Some(r) => assert!(r > 0.0 && r <= 10.0),
                None => dropouts += 1,
            }
        }
        assert!((300..500).contains(&dropouts), "{dropouts}");
    }

    #[test]
    fn beam_sees_walls_off_axis() {
        let world = LakeWorld::rectangle(100.0, 10.0, Vec2::ZERO, 0.0);
        // Running parallel to the bottom wall, 1 m off it.
        let narrow = SensorModel {
            beam_half_angle_deg: 0.0,
            beam_rays: 1,
            max_range: 50.0,
            ..SensorModel::default()
        };
        let p = Vec2::new(10.0, 1.0);
        assert!((narrow.true_range(&world, p, 0.0) - 50.0).abs() < 1e-12);
        let wide = SensorModel {
            max_range: 50.0,
            ..SensorModel::default()
        };
        let expect = 1.0 / 15f64.to_radians().sin();
        assert!((wide.true_range(&world, p, 0.0) - expect).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn filter_matches_brute_force_mean(
            window in 1usize..9,
            seq in prop::collection::vec(prop::option::weighted(0.8, 0.0f64..50.0), 0..60),
        ) {
            let mut f = RangeFilter::new(window).unwrap();
            for (i, r) in seq.iter().enumerate() {
                let out = f.update(*r);
                let valid: Vec<f64> = seq[..=i].iter().flatten().copied().collect();
                let tail = &valid[valid.len().saturating_sub(window)..];
                let oracle = (!tail.is_empty()).then(|| tail.iter().sum::<f64>() / tail.len() as f64);
                match (out, oracle) {
                    (None, None) => {}
                    (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0)),
                    other => prop_assert!(false, "{other:?}"),
                }
            }
        }
    }
}
