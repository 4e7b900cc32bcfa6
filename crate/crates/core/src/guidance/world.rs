//! Lake geometry and the piecewise-constant current and concentration fields.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::GuidanceError;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_heading(heading: f64) -> Self {
        Self::new(heading.cos(), heading.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    pub fn heading(self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Axis-aligned box carrying a field value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region<T> {
    pub min: Vec2,
    pub max: Vec2,
    pub value: T,
}

impl<T> Region<T> {
    fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x < self.max.x && p.y >= self.min.y && p.y < self.max.y
    }
}

/// A value per rectangular region, first match wins, `default` elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseField<T> {
    pub default: T,
    #[serde(default)]
    pub regions: Vec<Region<T>>,
}

impl<T: Copy> PiecewiseField<T> {
    pub fn uniform(value: T) -> Self {
        Self {
            default: value,
            regions: Vec::new(),
        }
    }

    pub fn at(&self, p: Vec2) -> T {
        self.regions
            .iter()
            .find(|r| r.contains(p))
            .map_or(self.default, |r| r.value)
    }

    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        std::iter::once(self.default).chain(self.regions.iter().map(|r| r.value))
    }
}

/// Where a segment leaves the lake.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Fraction along the segment.
    pub t: f64,
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LakeWorld {
    /// Simple polygon, metres, either winding.
    pub boundary: Vec<Vec2>,
    /// Surface current, m/s.
    pub current: PiecewiseField<Vec2>,
    /// Particles per m³.
    pub concentration: PiecewiseField<f64>,
}

impl Default for LakeWorld {
    fn default() -> Self {
        Self::rectangle(200.0, 120.0, Vec2::new(0.05, 0.02), 0.104)
    }
}

fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

impl LakeWorld {
    pub fn new(
        boundary: Vec<Vec2>,
        current: PiecewiseField<Vec2>,
        concentration: PiecewiseField<f64>,
    ) -> Result<Self, GuidanceError> {
        let world = Self {
            boundary,
            current,
            concentration,
        };
        world.validate()?;
        Ok(world)
    }

    /// Axis-aligned `width × height` lake with its corner at the origin.
    pub fn rectangle(width: f64, height: f64, current: Vec2, concentration: f64) -> Self {
        Self {
            boundary: vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(width, 0.0),
                Vec2::new(width, height),
                Vec2::new(0.0, height),
            ],
            current: PiecewiseField::uniform(current),
            concentration: PiecewiseField::uniform(concentration),
        }
    }

    /// Regular `sides`-gon of circumradius `radius` centred on the origin.
    pub fn regular_polygon(sides: usize, radius: f64, current: Vec2, concentration: f64) -> Self {
        let boundary = (0..sides)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / sides as f64;
                Vec2::new(radius * a.cos(), radius * a.sin())
            })
            .collect();
        Self {
            boundary,
            current: PiecewiseField::uniform(current),
            concentration: PiecewiseField::uniform(concentration),
        }
    }

    pub fn validate(&self) -> Result<(), GuidanceError> {
        let n = self.boundary.len();
        if n < 3 {
            return Err(GuidanceError::Boundary(format!(
                "need at least 3 vertices, got {n}"
            )));
        }
        if self.signed_area().abs() <= f64::EPSILON {
            return Err(GuidanceError::Boundary("boundary encloses no area".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                // adjacent edges share a vertex
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = self.edge(i);
                let (c, d) = self.edge(j);
                if segments_intersect(a, b, c, d) {
                    return Err(GuidanceError::Boundary(format!(
                        "edges {i} and {j} intersect"
                    )));
                }
            }
        }
        for c in self.concentration.values() {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(GuidanceError::Field(format!(
                    "concentration {c} is not a non-negative number"
                )));
            }
        }
        for v in self.current.values() {
            if !(v.x.is_finite() && v.y.is_finite()) {
                return Err(GuidanceError::Field("current is not finite".into()));
            }
        }
        Ok(())
    }

    pub fn edge(&self, i: usize) -> (Vec2, Vec2) {
        let n = self.boundary.len();
        (self.boundary[i], self.boundary[(i + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        (0..self.boundary.len()).map(|i| self.edge(i))
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.cross(b)).sum::<f64>()
    }

    pub fn is_convex(&self) -> bool {
        let n = self.boundary.len();
        let mut sign = 0.0;
        for i in 0..n {
            let (a, b) = self.edge(i);
            let (_, c) = self.edge((i + 1) % n);
            let turn = (b - a).cross(c - b);
            if turn.abs() < 1e-12 {
                continue;
            }
            if sign == 0.0 {
                sign = turn.signum();
            } else if turn.signum() != sign {
                return false;
            }
        }
        true
    }

    /// Even-odd point-in-polygon test.
    pub fn contains(&self, p: Vec2) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance along a unit `dir` from `origin` to the nearest boundary hit.
    pub fn ray_distance(&self, origin: Vec2, dir: Vec2) -> Option<f64> {
        self.edges()
            .filter_map(|(a, b)| {
                let e = b - a;
                let denom = dir.cross(e);
                if denom.abs() < 1e-15 {
                    return None;
                }
                let w = a - origin;
                let t = w.cross(e) / denom;
                let u = w.cross(dir) / denom;
                (t > 0.0 && (0.0..=1.0).contains(&u)).then_some(t)
            })
            .min_by(f64::total_cmp)
    }

    /// Nearest point where the segment `from → to` meets the boundary.
    pub fn first_crossing(&self, from: Vec2, to: Vec2) -> Option<Crossing> {
        let d = to - from;
        (0..self.boundary.len())
            .filter_map(|edge| {
                let (a, b) = self.edge(edge);
                let e = b - a;
                let denom = d.cross(e);
                if denom.abs() < 1e-15 {
                    return None;
                }
                let w = a - from;
                let t = w.cross(e) / denom;
                let u = w.cross(d) / denom;
                ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u))
                    .then_some(Crossing { t, edge })
            })
            .min_by(|a, b| a.t.total_cmp(&b.t))
    }

    /// Unit normal of edge `i`.
    pub fn edge_normal(&self, i: usize) -> Vec2 {
        let (a, b) = self.edge(i);
        let e = (b - a).normalized();
        Vec2::new(-e.y, e.x)
    }

    /// Largest current magnitude anywhere in the field.
    pub fn max_current(&self) -> f64 {
        self.current.values().map(Vec2::norm).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_geometry() {
        let w = LakeWorld::rectangle(10.0, 5.0, Vec2::ZERO, 1.0);
        w.validate().unwrap();
        assert!(w.is_convex());
        assert_eq!(w.signed_area(), 50.0);
        assert!(w.contains(Vec2::new(1.0, 1.0)));
        assert!(!w.contains(Vec2::new(11.0, 1.0)));
        assert!(!w.contains(Vec2::new(5.0, -0.1)));
        let d = w
            .ray_distance(Vec2::new(2.0, 2.5), Vec2::new(1.0, 0.0))
            .unwrap();
        assert!((d - 8.0).abs() < 1e-12);
        let diag = w
            .ray_distance(Vec2::new(5.0, 2.5), Vec2::new(1.0, 1.0).normalized())
            .unwrap();
        assert!((diag - 2.5 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn crossing_and_normal() {
        let w = LakeWorld::rectangle(10.0, 5.0, Vec2::ZERO, 1.0);
        let c = w
            .first_crossing(Vec2::new(9.0, 1.0), Vec2::new(11.0, 1.0))
            .unwrap();
        assert_eq!(c.edge, 1);
        assert!((c.t - 0.5).abs() < 1e-12);
        let n = w.edge_normal(1);
        assert!((n.x.abs() - 1.0).abs() < 1e-12 && n.y.abs() < 1e-12);
        assert!(w
            .first_crossing(Vec2::new(1.0, 1.0), Vec2::new(2.0, 2.0))
            .is_none());
    }

    #[test]
    fn rejects_bad_boundaries() {
        let bowtie = LakeWorld {
            boundary: vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(0.0, 1.0),
            ],
            ..LakeWorld::default()
        };
        assert!(matches!(bowtie.validate(), Err(GuidanceError::Boundary(_))));
        let line = LakeWorld {
            boundary: vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)],
            ..LakeWorld::default()
        };
        assert!(line.validate().is_err());
    }

    #[test]
    fn concave_detected() {
        let l = LakeWorld {
            boundary: vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(2.0, 0.0),
                Vec2::new(2.0, 1.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(1.0, 2.0),
                Vec2::new(0.0, 2.0),
            ],
            ..LakeWorld::default()
        };
        l.validate().unwrap();
        assert!(!l.is_convex());
        assert!(LakeWorld::regular_polygon(7, 30.0, Vec2::ZERO, 0.0).is_convex());
    }

    #[test]
    fn piecewise_fields() {
        let f = PiecewiseField {
            default: 1.0,
            regions: vec![Region {
                min: Vec2::new(0.0, 0.0),
                max: Vec2::new(1.0, 1.0),
                value: 5.0,
            }],
        };
        assert_eq!(f.at(Vec2::new(0.5, 0.5)), 5.0);
        assert_eq!(f.at(Vec2::new(1.5, 0.5)), 1.0);
        let json = r#"{"default": [0.1, 0.0], "regions": [{"min": [0, 0], "max": [1, 1], "value": [0, 0.2]}]}"#;
        let c: PiecewiseField<Vec2> = serde_json::from_str(json).unwrap();
        assert_eq!(c.at(Vec2::new(0.5, 0.5)), Vec2::new(0.0, 0.2));
        assert!((c.values().map(Vec2::norm).fold(0.0, f64::max) - 0.2).abs() < 1e-12);
    }
}
