//! Planes, Householder reflections, half-shape splitting and mirroring,
//! and full-shape reconstruction.
//!
//! A reflection about a plane with unit normal `n` through point `m` is the
//! affine map `R(p) = A p + t` with `A = I - 2 n nᵀ` and `t = 2 n nᵀ m`.
//! For axis-aligned planes through the origin the map degenerates to an
//! exact sign flip of one coordinate, which this module detects and applies
//! bitwise so that double reflection returns the original cloud exactly.

use crate::error::{Error, Result};
use crate::vec3::{self, Point3};

/// Tolerance for the unit-normal invariant of [`Plane`].
pub const UNIT_NORMAL_TOL: f64 = 1e-12;

/// An ordered list of 3D points; the universal shape representation.
///
/// Construction validates that every coordinate is finite and that the
/// cloud is non-empty. Operations that can legitimately produce an empty
/// side (half splitting) build their results internally and flag the
/// empty side in their output instead of failing.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point3>,
}

impl PointCloud {
    /// Validates and wraps a list of points.
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("point cloud must not be empty".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if !vec3::is_finite(p) {
                return Err(Error::InvalidInput(format!(
                    "point {i} has a non-finite coordinate: {p:?}"
                )));
            }
        }
        Ok(Self { points })
    }

    /// Wraps points already known to be finite (outputs of internal ops).
    pub(crate) fn from_validated(points: Vec<Point3>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Point3> {
        self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point3> {
        self.points.iter()
    }
}

/// Reflection plane given by a unit normal and a point on the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    normal: Point3,
    point: Point3,
}

impl Plane {
    /// Builds a plane from an already-unit normal; rejects normals whose
    /// length deviates from 1 by more than [`UNIT_NORMAL_TOL`].
    pub fn new(normal: Point3, point: Point3) -> Result<Self> {
        if !vec3::is_finite(&normal) || !vec3::is_finite(&point) {
            return Err(Error::InvalidPlane("non-finite plane parameters".into()));
        }
        let len = vec3::norm(&normal);
        if (len - 1.0).abs() > UNIT_NORMAL_TOL {
            return Err(Error::InvalidPlane(format!(
                "normal has length {len}, expected 1 within {UNIT_NORMAL_TOL:e}"
            )));
        }
        Ok(Self { normal, point })
    }

    /// Builds a plane from an arbitrary direction, normalizing it.
    pub fn from_direction(direction: Point3, point: Point3) -> Result<Self> {
        if !vec3::is_finite(&direction) || !vec3::is_finite(&point) {
            return Err(Error::InvalidPlane("non-finite plane parameters".into()));
        }
        let len = vec3::norm(&direction);
        if len == 0.0 {
            return Err(Error::InvalidPlane("zero-length plane direction".into()));
        }
        // Keep exact axis-aligned normals exact: [s, 0, 0]/|s| etc. divides
        // to exactly ±1 on the axis component.
        Ok(Self {
            normal: vec3::scale(&direction, 1.0 / len),
            point,
        })
    }

    /// The yz-plane, i.e. the plane x = 0 with normal +x.
    pub fn yz() -> Self {
        Self {
            normal: [1.0, 0.0, 0.0],
            point: [0.0, 0.0, 0.0],
        }
    }

    pub fn normal(&self) -> &Point3 {
        &self.normal
    }

    pub fn point(&self) -> &Point3 {
        &self.point
    }

    /// Plane offset d = -n·m, so the plane is {p | n·p + d = 0}.
    pub fn offset(&self) -> f64 {
        -vec3::dot(&self.normal, &self.point)
    }

    /// Signed distance of `p` from the plane; exactly `p[axis]` for an
    /// axis-aligned plane through the origin.
    pub fn signed_distance(&self, p: &Point3) -> f64 {
        vec3::dot(&self.normal, &vec3::sub(p, &self.point))
    }
}

/// Affine reflection as the matrix-vector pair (A, t).
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionMap {
    matrix: [[f64; 3]; 3],
    translation: Point3,
    /// When the map is an exact single-axis sign flip through the origin,
    /// the flipped axis; lets `apply` negate bitwise.
    flip_axis: Option<usize>,
}

impl ReflectionMap {
    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.matrix
    }

    pub fn translation(&self) -> &Point3 {
        &self.translation
    }

    /// Reflects a single point.
    pub fn apply(&self, p: &Point3) -> Point3 {
        if let Some(axis) = self.flip_axis {
            let mut out = *p;
            out[axis] = -out[axis];
            return out;
        }
        let m = &self.matrix;
        [
            m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2] + self.translation[0],
            m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2] + self.translation[1],
            m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2] + self.translation[2],
        ]
    }
}

/// Builds the Householder reflection pair A = I - 2nnᵀ, t = 2nnᵀm for a
/// plane with unit normal n through point m.
pub fn make_reflection(plane: &Plane) -> ReflectionMap {
    let n = plane.normal();
    let m = plane.point();
    let mut matrix = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            let id = if r == c { 1.0 } else { 0.0 };
            matrix[r][c] = id - 2.0 * n[r] * n[c];
        }
    }
    // t = 2nnᵀm = 2(n·m)n
    let translation = vec3::scale(n, 2.0 * vec3::dot(n, m));

    let flip_axis = detect_axis_flip(n, m);
    ReflectionMap {
        matrix,
        translation,
        flip_axis,
    }
}

/// Detects a plane that is exactly an axis-aligned plane through the
/// origin (normal bitwise ±e_k and the on-plane point has zero k-th
/// coordinate), for which reflection is an exact sign negation.
fn detect_axis_flip(n: &Point3, m: &Point3) -> Option<usize> {
    for axis in 0..3 {
        let others_zero = (0..3).all(|i| i == axis || n[i] == 0.0);
        if others_zero && n[axis].abs() == 1.0 && m[axis] == 0.0 {
            return Some(axis);
        }
    }
    None
}

/// Reflects every point of `cloud`, preserving count and order.
pub fn reflect_cloud(cloud: &PointCloud, map: &ReflectionMap) -> PointCloud {
    PointCloud::from_validated(cloud.iter().map(|p| map.apply(p)).collect())
}

/// How points lying exactly on the split plane are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryPolicy {
    /// On-plane points appear in both halves (the literal overlapping
    /// set definitions; the default).
    #[default]
    Duplicate,
    /// On-plane points go to the right half only, keeping the total
    /// count exactly N.
    AssignRight,
}

/// Which half of a split came out empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Output of [`split_halves`]; `empty_side` is a non-fatal warning set
/// when one half received no points.
#[derive(Debug, Clone)]
pub struct SplitHalves {
    pub left: PointCloud,
    pub right: PointCloud,
    pub empty_side: Option<Side>,
}

/// Splits a cloud into its two closed half-spaces relative to `plane`:
/// left holds signed distance <= 0, right holds >= 0. For the default
/// x = 0 plane the signed distance is exactly the x coordinate.
pub fn split_halves(cloud: &PointCloud, plane: &Plane, policy: BoundaryPolicy) -> SplitHalves {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for p in cloud.iter() {
        let s = plane.signed_distance(p);
        match policy {
            BoundaryPolicy::Duplicate => {
                if s <= 0.0 {
                    left.push(*p);
                }
                if s >= 0.0 {
                    right.push(*p);
                }
            }
            BoundaryPolicy::AssignRight => {
                if s < 0.0 {
                    left.push(*p);
                } else {
                    right.push(*p);
                }
            }
        }
    }
    let empty_side = match (left.is_empty(), right.is_empty()) {
        (true, false) => Some(Side::Left),
        (false, true) => Some(Side::Right),
        _ => None,
    };
    SplitHalves {
        left: PointCloud::from_validated(left),
        right: PointCloud::from_validated(right),
        empty_side,
    }
}

/// Mirrors the left half onto the right and unions it with the original
/// right half: every output point has non-negative signed distance.
pub fn make_half_object(cloud: &PointCloud, plane: &Plane, policy: BoundaryPolicy) -> PointCloud {
    let split = split_halves(cloud, plane, policy);
    let map = make_reflection(plane);
    let mut points = Vec::with_capacity(split.left.len() + split.right.len());
    points.extend(split.left.iter().map(|p| map.apply(p)));
    points.extend_from_slice(split.right.points());
    PointCloud::from_validated(points)
}

/// Concatenates a half shape with its mirror image, doubling the count.
/// The output is exactly reflection-symmetric about `plane`.
pub fn reconstruct_full(half: &PointCloud, plane: &Plane) -> PointCloud {
    let map = make_reflection(plane);
    let mut points = Vec::with_capacity(half.len() * 2);
    points.extend_from_slice(half.points());
    points.extend(half.iter().map(|p| map.apply(p)));
    PointCloud::from_validated(points)
}
