//! Water force on the trawl face, tipping torque, ballast sizing and buoyancy.
//!
//! The force curve is a quintic in tilt angle (degrees, 90° = face vertical)
//! regressed from CFD runs. The ballast balance equates the ballast's weight
//! component `g·m·sinθ` with the tipping moment `lever·F(θ)·sinθ`. The `sinθ`
//! factors cancel, so the ballast for a target angle is `lever·F(θ)/g` and the
//! inverse problem is a root of `F(θ) = g·m/lever`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Gravity as used in the ballast balance, m/s².
pub const GRAVITY: f64 = 9.8;
/// Depth of the trawl face's centre below the surface, m.
pub const FACE_LEVER_ARM: f64 = 0.25;
/// Per-buoy displacement quoted for the 1 m-circumference buoys, kg.
pub const QUOTED_BUOY_DISPLACEMENT_KG: f64 = 16.98;
pub const WATER_DENSITY: f64 = 1000.0;
/// Heaviest bird in the region (American white pelican), kg.
pub const PELICAN_MASS_KG: f64 = 14.0;

const BISECTION_TOL_DEG: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("angle {angle}° is outside the force curve's valid domain [{min}°, {max}°]")]
    OutOfDomain { angle: f64, min: f64, max: f64 },
    #[error("invalid domain [{0}, {1}]")]
    BadDomain(f64, f64),
    #[error(
        "no equilibrium: required force {required:.3} N is outside [{min:.3}, {max:.3}] N \
         on the increasing branch [{branch_lo:.3}°, {branch_hi:.3}°]"
    )]
    NoEquilibrium {
        required: f64,
        min: f64,
        max: f64,
        branch_lo: f64,
        branch_hi: f64,
    },
    #[error("lever arm must be positive, got {0}")]
    Lever(f64),
    #[error("gravity must be positive, got {0}")]
    Gravity(f64),
    #[error(
        "cannot reach centre of mass {target} m: need ballast depth ({ballast_depth} m) \
         below the target and the target at or below the body centre ({body_cm} m)"
    )]
    Unsolvable {
        target: f64,
        body_cm: f64,
        ballast_depth: f64,
    },
    #[error("body mass must be positive, got {0}")]
    BodyMass(f64),
    #[error("at least one buoy is required")]
    NoBuoys,
    #[error("sweep step must be positive, got {0}°")]
    SweepStep(f64),
}

/// Normal force on the trawl face vs tilt angle: `Σ cᵢ θⁱ` newtons, θ in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForceCurve {
    pub coefficients: [f64; 6],
    pub valid_domain: (f64, f64),
}

impl Default for ForceCurve {
    fn default() -> Self {
        Self {
            coefficients: [
                -967.5956,
                144.257,
                -7.648865,
                0.1886765,
                -0.002154494,
                0.000009248496,
            ],
            valid_domain: (15.0, 90.0),
        }
    }
}

impl ForceCurve {
    pub fn new(coefficients: [f64; 6], valid_domain: (f64, f64)) -> Result<Self, StabilityError> {
        let (lo, hi) = valid_domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(StabilityError::BadDomain(lo, hi));
        }
        Ok(Self {
            coefficients,
            valid_domain,
        })
    }

    pub fn check_domain(&self, angle: f64) -> Result<(), StabilityError> {
        let (min, max) = self.valid_domain;
        if angle >= min && angle <= max {
            Ok(())
        } else {
            Err(StabilityError::OutOfDomain { angle, min, max })
        }
    }

    /// Horner evaluation with no domain check.
    pub fn eval(&self, angle: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * angle + c)
    }

    /// dF/dθ, N per degree.
    pub fn slope(&self, angle: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (i, c)| acc * angle + i as f64 * c)
    }

    /// The longest sub-interval `[lo, max]` of the domain, ending at the upper
    /// bound, on which the curve is increasing.
    ///
    /// The default coefficients dip between ≈22.9° and ≈31.1°, so this is
    /// ≈[31.11°, 90°] for them.
    pub fn increasing_branch(&self) -> (f64, f64) {
        let (min, max) = self.valid_domain;
        const SCAN: usize = 4096;
        let h = (max - min) / SCAN as f64;
        let mut hi = max;
        for i in (0..SCAN).rev() {
            let a = min + i as f64 * h;
            if self.slope(a) > 0.0 {
                hi = a;
                continue;
            }
            // Slope changes sign inside [a, hi]; bisect for the turning point.
            let (mut neg, mut pos) = (a, hi);
            while pos - neg > 1e-12 {
                let mid = 0.5 * (neg + pos);
                if self.slope(mid) > 0.0 {
                    pos = mid;
                } else {
                    neg = mid;
                }
            }
            return (pos, max);
        }
        (min, max)
    }

    pub fn water_force(&self, angle: f64) -> Result<f64, StabilityError> {
        water_force(self, angle)
    }
}

/// Lever arm and gravity for the ballast balance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BallastProblem {
    pub lever_arm: f64,
    pub gravity: f64,
}

impl Default for BallastProblem {
    fn default() -> Self {
        Self {
            lever_arm: FACE_LEVER_ARM,
            gravity: GRAVITY,
        }
    }
}

impl BallastProblem {
    fn validate(&self) -> Result<(), StabilityError> {
        if !(self.lever_arm > 0.0) {
            return Err(StabilityError::Lever(self.lever_arm));
        }
        if !(self.gravity > 0.0) {
            return Err(StabilityError::Gravity(self.gravity));
        }
        Ok(())
    }
}

pub fn water_force(curve: &ForceCurve, angle: f64) -> Result<f64, StabilityError> {
    curve.check_domain(angle)?;
    Ok(curve.eval(angle))
}

/// Tipping moment `lever·F(θ)·sinθ`, N·m.
pub fn trawl_torque(curve: &ForceCurve, angle: f64, lever: f64) -> Result<f64, StabilityError> {
    let force = water_force(curve, angle)?;
    if lever < 0.0 {
        return Err(StabilityError::Lever(lever));
    }
    Ok(lever * force * angle.to_radians().sin())
}

/// Ballast mass giving equilibrium at `angle`.
pub fn ballast_for_angle(
    curve: &ForceCurve,
    angle: f64,
    problem: &BallastProblem,
) -> Result<f64, StabilityError> {
    problem.validate()?;
    let force = water_force(curve, angle)?;
    // g·m·sinθ = lever·F(θ)·sinθ, sinθ > 0 on the domain
    Ok(problem.lever_arm * force / problem.gravity)
}

/// Tilt angle at which `mass` of ballast balances the water's moment.
///
/// Solved by bisection on the increasing branch of the curve, to 1e-6°.
pub fn equilibrium_angle(
    curve: &ForceCurve,
    mass: f64,
    problem: &BallastProblem,
) -> Result<f64, StabilityError> {
    problem.validate()?;
    let required = problem.gravity * mass / problem.lever_arm;
    let (branch_lo, branch_hi) = curve.increasing_branch();
    let (f_lo, f_hi) = (curve.eval(branch_lo), curve.eval(branch_hi));
    let slack = 1e-12 * f_hi.abs().max(f_lo.abs()).max(1.0);
    if required > f_hi && required <= f_hi + slack {
        return Ok(branch_hi);
    }
    if required < f_lo && required >= f_lo - slack {
        return Ok(branch_lo);
    }
    if !(required >= f_lo && required <= f_hi) {
        return Err(StabilityError::NoEquilibrium {
            required,
            min: f_lo,
            max: f_hi,
            branch_lo,
            branch_hi,
        });
    }
    let (mut lo, mut hi) = (branch_lo, branch_hi);
    while hi - lo > BISECTION_TOL_DEG {
        let mid = 0.5 * (lo + hi);
        if curve.eval(mid) < required {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Ballast mass `w` at depth `ballast_depth` that moves the combined centre of
/// mass of a body (`body_mass` at `body_cm`) to `target_cm`:
///
/// `target = (m·y_body + w·y_ballast) / (m + w)`.
///
/// Heights are metres relative to the waterline (negative = below).
pub fn ballast_for_center_of_mass(
    target_cm: f64,
    body_mass: f64,
    body_cm: f64,
    ballast_depth: f64,
) -> Result<f64, StabilityError> {
    if !(body_mass > 0.0) {
        return Err(StabilityError::BodyMass(body_mass));
    }
    if !(ballast_depth < target_cm && target_cm <= body_cm) {
        return Err(StabilityError::Unsolvable {
            target: target_cm,
            body_cm,
            ballast_depth,
        });
    }
    Ok(body_mass * (body_cm - target_cm) / (target_cm - ballast_depth))
}

/// Where the per-buoy displacement comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DisplacementMode {
    /// The quoted 16.98 kg per buoy.
    #[default]
    Constant,
    /// Full sphere of the given circumference in fresh water.
    FromCircumference,
}

/// Masses carried by the buoys, and the buoys themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MassBudget {
    pub frame: f64,
    pub printed: f64,
    pub panel: f64,
    pub ballast: f64,
    pub misc: f64,
    pub buoy_count: u32,
    pub buoy_circumference: f64,
    pub per_buoy_displacement: f64,
    pub displacement_mode: DisplacementMode,
}

impl Default for MassBudget {
    /// Frame, printed parts and panel as itemised; ballast and everything else
    /// lumped into `misc` so the total is the quoted 15 kg.
    fn default() -> Self {
        Self {
            frame: 3.2,
            printed: 4.0,
            panel: 3.5,
            ballast: 0.0,
            misc: 4.3,
            buoy_count: 4,
            buoy_circumference: 1.0,
            per_buoy_displacement: QUOTED_BUOY_DISPLACEMENT_KG,
            displacement_mode: DisplacementMode::Constant,
        }
    }
}

impl MassBudget {
    /// A budget with a single lumped mass, for what-if checks.
    pub fn with_total(total: f64) -> Self {
        Self {
            frame: 0.0,
            printed: 0.0,
            panel: 0.0,
            ballast: 0.0,
            misc: total,
            ..Self::default()
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.frame + self.printed + self.panel + self.ballast + self.misc
    }

    pub fn displacement_per_buoy(&self) -> f64 {
        match self.displacement_mode {
            DisplacementMode::Constant => self.per_buoy_displacement,
            DisplacementMode::FromCircumference => sphere_displacement(self.buoy_circumference),
        }
    }
}

/// Mass of fresh water displaced by a fully submerged sphere of circumference `c` metres.
pub fn sphere_displacement(circumference: f64) -> f64 {
    let r = circumference / (2.0 * PI);
    WATER_DENSITY * 4.0 / 3.0 * PI * r.powi(3)
}

/// Spare lift in kg. Negative means the trawl sinks.
pub fn buoyancy_margin(budget: &MassBudget) -> Result<f64, StabilityError> {
    if budget.buoy_count == 0 {
        return Err(StabilityError::NoBuoys);
    }
    Ok(f64::from(budget.buoy_count) * budget.displacement_per_buoy() - budget.total_mass())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Power-sum evaluation, independent of Horner.
    fn naive(curve: &ForceCurve, x: f64) -> f64 {
        curve
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| c * x.powi(i as i32))
            .sum()
    }

    #[test]
    fn force_matches_power_sum() {
        let c = ForceCurve::default();
        for x in [15.0, 30.0, 45.0, 62.5, 80.0, 90.0] {
            assert!((c.eval(x) - naive(&c, x)).abs() < 1e-8, "{x}");
        }
        // naive power sums, frozen
        assert!((water_force(&c, 90.0).unwrap() - 859.989_090_4).abs() < 1e-6);
        assert!((water_force(&c, 80.0).unwrap() - 279.993_852_8).abs() < 1e-6);
        assert!((water_force(&c, 45.0).unwrap() - 99.999_504_7).abs() < 1e-6);
    }

    #[test]
    fn out_of_domain_message_has_bounds() {
        let err = water_force(&ForceCurve::default(), 5.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("[15°, 90°]"), "{msg}");
        assert!(water_force(&ForceCurve::default(), 90.1).is_err());
        assert!(ForceCurve::new([0.0; 6], (10.0, 10.0)).is_err());
    }

    #[test]
    fn torque_examples() {
        let c = ForceCurve::default();
        let t90 = trawl_torque(&c, 90.0, 0.25).unwrap();
        assert!((t90 - 214.997_272_6).abs() < 1e-6);
        let t45 = trawl_torque(&c, 45.0, 0.25).unwrap();
        assert!((t45 - 17.677_581_97).abs() < 1e-6);
        assert_eq!(trawl_torque(&c, 60.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn ballast_examples() {
        let c = ForceCurve::default();
        let p = BallastProblem::default();
        assert!((ballast_for_angle(&c, 80.0, &p).unwrap() - 7.142_700_33).abs() < 1e-6);
        assert!((ballast_for_angle(&c, 90.0, &p).unwrap() - 21.938_497_2).abs() < 1e-6);
        assert!((ballast_for_angle(&c, 45.0, &p).unwrap() - 2.551_007_77).abs() < 1e-6);
        assert!(matches!(
            ballast_for_angle(&c, 5.0, &p),
            Err(StabilityError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn equilibrium_examples() {
        let c = ForceCurve::default();
        let p = BallastProblem::default();
        let m80 = ballast_for_angle(&c, 80.0, &p).unwrap();
        assert!((equilibrium_angle(&c, m80, &p).unwrap() - 80.0).abs() < 0.01);
        assert!((equilibrium_angle(&c, 7.14, &p).unwrap() - 80.0).abs() < 0.01);

        // Dense tabulation oracle at 1e-4° for m = 7.0.
        let target = 9.8 * 7.0 / 0.25;
        let mut x = 75.0;
        while naive(&c, x) < target {
            x += 1e-4;
        }
        let theta = equilibrium_angle(&c, 7.0, &p).unwrap();
        assert!((theta - x).abs() < 2e-4, "{theta} vs {x}");
        assert!((theta - 79.8).abs() < 0.05);

        assert!(matches!(
            equilibrium_angle(&c, 1000.0, &p),
            Err(StabilityError::NoEquilibrium { .. })
        ));
    }

    #[test]
    fn increasing_branch_of_default_curve() {
        let c = ForceCurve::default();
        let (lo, hi) = c.increasing_branch();
        assert_eq!(hi, 90.0);
        assert!((lo - 31.108_777).abs() < 1e-5, "{lo}");
        // The full domain is not monotone: the curve dips on ≈[22.9°, 31.1°].
        assert!(c.eval(23.0) > c.eval(31.0));
    }

    #[test]
    fn monotone_and_positive_on_branch() {
        let c = ForceCurve::default();
        let (lo, hi) = c.increasing_branch();
        let mut prev = c.eval(lo);
        let mut x = lo + 0.1;
        while x <= hi {
            let f = c.eval(x);
            assert!(f > prev, "not increasing at {x}");
            prev = f;
            x += 0.1;
        }
        let mut x = 15.0;
        while x <= 90.0 {
            assert!(c.eval(x) > 0.0, "not positive at {x}");
            x += 0.1;
        }
    }

    #[test]
    fn center_of_mass_examples() {
        assert_eq!(
            ballast_for_center_of_mass(-0.25, 10.0, 0.1, -0.5).unwrap(),
            14.0
        );
        assert_eq!(
            ballast_for_center_of_mass(0.1, 10.0, 0.1, -0.5).unwrap(),
            0.0
        );
        // -0.4(10 + w) = 1 - 0.5w → w = 50
        let w = ballast_for_center_of_mass(-0.4, 10.0, 0.1, -0.5).unwrap();
        assert!((w - 50.0).abs() < 1e-9);
        assert!(matches!(
            ballast_for_center_of_mass(-0.6, 10.0, 0.1, -0.5),
            Err(StabilityError::Unsolvable { .. })
        ));
        assert!(ballast_for_center_of_mass(0.2, 10.0, 0.1, -0.5).is_err());
    }

    #[test]
    fn buoyancy_examples() {
        let paper = MassBudget::default();
        assert!((paper.total_mass() - 15.0).abs() < 1e-12);
        assert!((buoyancy_margin(&paper).unwrap() - 52.92).abs() < 1e-9);
        let sphere = MassBudget {
            displacement_mode: DisplacementMode::FromCircumference,
            ..MassBudget::default()
        };
        // 4 · 1000 · (4/3)π(1/2π)³ − 15
        assert!((buoyancy_margin(&sphere).unwrap() - 52.547_455_76).abs() < 1e-6);
        let empty = MassBudget {
            buoy_count: 1,
            ..MassBudget::with_total(0.0)
        };
        assert!((buoyancy_margin(&empty).unwrap() - 16.98).abs() < 1e-12);
        let none = MassBudget {
            buoy_count: 0,
            ..MassBudget::default()
        };
        assert!(buoyancy_margin(&none).is_err());
        let heavy = MassBudget::with_total(100.0);
        assert!(buoyancy_margin(&heavy).unwrap() < 0.0);
    }

    #[test]
    fn pelican_landing_keeps_margin() {
        let margin = buoyancy_margin(&MassBudget::default()).unwrap();
        assert!(margin - PELICAN_MASS_KG > 0.0);
    }

    #[test]
    fn equilibrium_at_branch_ends() {
        let c = ForceCurve::default();
        let p = BallastProblem::default();
        let (lo, hi) = c.increasing_branch();
        for angle in [lo, hi] {
            let m = ballast_for_angle(&c, angle, &p).unwrap();
            assert!((equilibrium_angle(&c, m, &p).unwrap() - angle).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn ballast_and_equilibrium_are_inverse(angle in 31.2f64..90.0) {
            let c = ForceCurve::default();
            let p = BallastProblem::default();
            let m = ballast_for_angle(&c, angle, &p).unwrap();
            let back = equilibrium_angle(&c, m, &p).unwrap();
            prop_assert!((back - angle).abs() / angle < 1e-4);
            let m2 = ballast_for_angle(&c, back, &p).unwrap();
            prop_assert!((m2 - m).abs() / m < 1e-4);
        }

        #[test]
        fn torque_non_negative(angle in 15.0f64..=90.0, lever in 0.0f64..2.0) {
            let t = trawl_torque(&ForceCurve::default(), angle, lever).unwrap();
            prop_assert!(t >= 0.0);
            if lever > 0.0 {
                prop_assert!(t > 0.0);
            }
        }

        #[test]
        fn com_ballast_substitutes_back(
            body_mass in 0.5f64..50.0,
            body_cm in -0.2f64..1.0,
            drop in 0.01f64..1.0,
            gap in 0.01f64..1.0,
        ) {
            let target = body_cm - drop;
            let depth = target - gap;
            let w = ballast_for_center_of_mass(target, body_mass, body_cm, depth).unwrap();
            let cm = (body_mass * body_cm + w * depth) / (body_mass + w);
            prop_assert!((cm - target).abs() < 1e-9);
        }
    }
}
