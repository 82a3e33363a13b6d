//! Maps from sorted anisotropy eigenvalues to the barycentric triangle, the
//! Lumley invariant map and the (ξ, η) map.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{EpfError, Result};

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// Tolerance on ordering and containment checks for map inputs.
pub const MAP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BaryPoint {
    pub x: f64,
    pub y: f64,
}

impl BaryPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, o: &BaryPoint) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }

    pub fn lerp(&self, o: &BaryPoint, t: f64) -> BaryPoint {
        BaryPoint::new(self.x + t * (o.x - self.x), self.y + t * (o.y - self.y))
    }
}

/// Limiting states of turbulence at the triangle corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corner {
    #[serde(rename = "1C")]
    OneC,
    #[serde(rename = "2C")]
    TwoC,
    #[serde(rename = "3C")]
    ThreeC,
}

impl Corner {
    pub const ALL: [Corner; 3] = [Corner::OneC, Corner::TwoC, Corner::ThreeC];

    /// Anisotropy eigenvalues of the limiting state.
    pub fn eigenvalues(self) -> [f64; 3] {
        match self {
            Corner::OneC => [4.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0],
            Corner::TwoC => [1.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0],
            Corner::ThreeC => [0.0, 0.0, 0.0],
        }
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Corner::OneC => "1C",
            Corner::TwoC => "2C",
            Corner::ThreeC => "3C",
        })
    }
}

impl FromStr for Corner {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "1C" => Ok(Corner::OneC),
            "2C" => Ok(Corner::TwoC),
            "3C" => Ok(Corner::ThreeC),
            other => Err(format!("unknown corner `{other}` (expected 1C, 2C or 3C)")),
        }
    }
}

/// Corner placement of the barycentric triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerSet {
    pub one_c: BaryPoint,
    pub two_c: BaryPoint,
    pub three_c: BaryPoint,
}

/// Equilateral triangle with 2C at the origin, 1C at (1, 0) and 3C on top.
pub const STANDARD_CORNERS: CornerSet = CornerSet {
    one_c: BaryPoint::new(1.0, 0.0),
    two_c: BaryPoint::new(0.0, 0.0),
    three_c: BaryPoint::new(0.5, SQRT3_2),
};

impl Default for CornerSet {
    fn default() -> Self {
        STANDARD_CORNERS
    }
}

impl CornerSet {
    pub fn corner(&self, c: Corner) -> BaryPoint {
        match c {
            Corner::OneC => self.one_c,
            Corner::TwoC => self.two_c,
            Corner::ThreeC => self.three_c,
        }
    }

    /// Linear part `Q` of the affine map `x = Q λ + x_3C`.
    pub fn q_matrix(&self) -> [[f64; 3]; 2] {
        let (c1, c2, c3) = (self.one_c, self.two_c, self.three_c);
        let row = |p1: f64, p2: f64, p3: f64| [0.5 * p1, p2 - 0.5 * p1, 1.5 * p3 - p2];
        [row(c1.x, c2.x, c3.x), row(c1.y, c2.y, c3.y)]
    }

    /// Barycentric weights of `p` with respect to (1C, 2C, 3C).
    ///
    /// Returns `None` when the corners are collinear.
    pub fn weights(&self, p: &BaryPoint) -> Option<[f64; 3]> {
        let (a, b, c) = (self.one_c, self.two_c, self.three_c);
        let det = (b.y - c.y) * (a.x - c.x) + (c.x - b.x) * (a.y - c.y);
        if det.abs() < 1e-14 {
            return None;
        }
        let w1 = ((b.y - c.y) * (p.x - c.x) + (c.x - b.x) * (p.y - c.y)) / det;
        let w2 = ((c.y - a.y) * (p.x - c.x) + (a.x - c.x) * (p.y - c.y)) / det;
        Some([w1, w2, 1.0 - w1 - w2])
    }

    pub fn contains(&self, p: &BaryPoint, tol: f64) -> bool {
        self.weights(p).is_some_and(|w| w.iter().all(|&wi| wi >= -tol))
    }

    pub fn to_barycentric(&self, lambda: &[f64; 3]) -> Result<BaryPoint> {
        check_sorted_traceless(lambda)?;
        let w = eigenvalue_weights(lambda);
        let (c1, c2, c3) = (self.one_c, self.two_c, self.three_c);
        Ok(BaryPoint::new(
            w[0] * c1.x + w[1] * c2.x + w[2] * c3.x,
            w[0] * c1.y + w[1] * c2.y + w[2] * c3.y,
        ))
    }

    pub fn from_barycentric(&self, p: &BaryPoint) -> Result<[f64; 3]> {
        let outside = || EpfError::NonRealizableTarget { x: p.x, y: p.y };
        let w = self.weights(p).ok_or_else(outside)?;
        if w.iter().any(|&wi| wi < -MAP_TOL || !wi.is_finite()) {
            return Err(outside());
        }
        let mut w = w.map(|wi| wi.max(0.0));
        let sum: f64 = w.iter().sum();
        w.iter_mut().for_each(|wi| *wi /= sum);
        Ok(eigenvalues_from_weights(&w))
    }
}

/// `(½(λ1−λ2), λ2−λ3, 3/2 λ3 + 1)`.
pub fn eigenvalue_weights(l: &[f64; 3]) -> [f64; 3] {
    [0.5 * (l[0] - l[1]), l[1] - l[2], 1.5 * l[2] + 1.0]
}

/// Inverse of [`eigenvalue_weights`] for weights summing to one.
pub fn eigenvalues_from_weights(w: &[f64; 3]) -> [f64; 3] {
    let l3 = (w[2] - 1.0) / 1.5;
    let l2 = w[1] + l3;
    let l1 = 2.0 * w[0] + l2;
    [l1, l2, l3]
}

fn check_sorted_traceless(l: &[f64; 3]) -> Result<()> {
    let scale = l.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    if l[0] < l[1] - 1e-12 * scale || l[1] < l[2] - 1e-12 * scale {
        return Err(EpfError::UnsortedEigenvalues(*l));
    }
    let sum = l[0] + l[1] + l[2];
    if sum.abs() > MAP_TOL {
        return Err(EpfError::NonTracelessTriple(sum));
    }
    Ok(())
}

pub fn to_barycentric(lambda: &[f64; 3]) -> Result<BaryPoint> {
    STANDARD_CORNERS.to_barycentric(lambda)
}

pub fn from_barycentric(p: &BaryPoint) -> Result<[f64; 3]> {
    STANDARD_CORNERS.from_barycentric(p)
}

/// Coordinates in the Lumley invariant map; `second` is `II_a ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AimPoint {
    pub third: f64,
    pub second: f64,
}

pub fn aim_coords(l: &[f64; 3]) -> AimPoint {
    AimPoint {
        third: l[0] * l[1] * l[2],
        second: l[0] * l[1] + l[0] * l[2] + l[1] * l[2],
    }
}

/// `-II_a` on the axisymmetric boundary for a given `III_a`.
pub fn aim_axisymmetric_boundary(third: f64) -> f64 {
    3.0 * (0.5 * third.abs()).powf(2.0 / 3.0)
}

/// `-II_a` on the two-component boundary for a given `III_a`.
pub fn aim_two_component_boundary(third: f64) -> f64 {
    4.0 / 9.0 + 1.5 * third
}

pub fn aim_contains(p: &AimPoint, slack: f64) -> bool {
    let neg_second = -p.second;
    neg_second >= aim_axisymmetric_boundary(p.third) - slack && neg_second <= aim_two_component_boundary(p.third) + slack
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ChoiPoint {
    pub xi: f64,
    pub eta: f64,
}

/// `6η² = b_ij b_ji`, `6ξ³ = b_ij b_jk b_ki` with `b = a/2`.
pub fn choi_coords(l: &[f64; 3]) -> ChoiPoint {
    let b = l.map(|v| 0.5 * v);
    let tr2: f64 = b.iter().map(|v| v * v).sum();
    let tr3: f64 = b.iter().map(|v| v * v * v).sum();
    ChoiPoint { xi: (tr3 / 6.0).cbrt(), eta: (tr2 / 6.0).sqrt() }
}

/// Residual of the two-component curve `η² = 1/27 + 2ξ³`.
pub fn choi_two_component_residual(p: &ChoiPoint) -> f64 {
    p.eta * p.eta - (1.0 / 27.0 + 2.0 * p.xi.powi(3))
}

pub fn choi_contains(p: &ChoiPoint, slack: f64) -> bool {
    p.eta >= p.xi.abs() - slack && choi_two_component_residual(p) <= slack
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Componentiality {
    OneComponent,
    TwoComponentAxisymmetric,
    TwoComponent,
    ThreeComponentIsotropic,
    Axisymmetric,
    ThreeComponent,
}

/// Classifies a sorted traceless spectrum by counting non-zero stress
/// eigenvalues `ρ_i / k = λ_i + 2/3`.
pub fn componentiality(l: &[f64; 3], tol: f64) -> Componentiality {
    let nonzero = l.iter().filter(|&&v| v + 2.0 / 3.0 > tol).count();
    let eq12 = (l[0] - l[1]).abs() <= tol;
    let eq23 = (l[1] - l[2]).abs() <= tol;
    match nonzero {
        0 | 1 => Componentiality::OneComponent,
        2 if eq12 => Componentiality::TwoComponentAxisymmetric,
        2 => Componentiality::TwoComponent,
        _ if eq12 && eq23 => Componentiality::ThreeComponentIsotropic,
        _ if eq12 || eq23 => Componentiality::Axisymmetric,
        _ => Componentiality::ThreeComponent,
    }
}

/// Perpendicular distance from `p` to the infinite line through `a` and `b`.
pub fn line_distance(p: &BaryPoint, a: &BaryPoint, b: &BaryPoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len = dx.hypot(dy);
    if len == 0.0 {
        return p.distance(a);
    }
    (dx * (p.y - a.y) - dy * (p.x - a.x)).abs() / len
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn segment_distance(p: &BaryPoint, a: &BaryPoint, b: &BaryPoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(&a.lerp(b, t))
}
