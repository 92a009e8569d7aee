// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! Obstacle boxes and the distance queries used by the simulator, the safety
//! monitor and the proximity mock oracle.
//!
//! An obstacle is a box rotated about the vertical axis only. All distance
//! queries transform the query point into the box frame, where the box is
//! axis aligned and centered at the origin.

use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

/// World-frame 3-vector in meters.
pub type Vec3 = Vector3<f64>;

/// A yaw-rotated box obstacle.
///
/// `center` is the geometric center of the box, so a box standing on the
/// ground has `center.z == size.z / 2`. `size` holds length (local x),
/// width (local y) and height (local z).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "ObstacleWire", into = "ObstacleWire")]
pub struct Obstacle {
    pub center: Vec3,
    pub size: Vec3,
    /// Rotation about +z in degrees, expected in `[0, 360)`.
    pub yaw_deg: f64,
}

/// Flat wire form: `{"x","y","z","l","w","h","rot"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct ObstacleWire {
    x: f64,
    y: f64,
    z: f64,
    l: f64,
    w: f64,
    h: f64,
    rot: f64,
}

impl From<ObstacleWire> for Obstacle {
    fn from(w: ObstacleWire) -> Self {
        Self {
            center: Vec3::new(w.x, w.y, w.z),
            size: Vec3::new(w.l, w.w, w.h),
            yaw_deg: w.rot,
        }
    }
}

impl From<Obstacle> for ObstacleWire {
    fn from(o: Obstacle) -> Self {
        Self {
            x: o.center.x,
            y: o.center.y,
            z: o.center.z,
            l: o.size.x,
            w: o.size.y,
            h: o.size.z,
            rot: o.yaw_deg,
        }
    }
}

impl Obstacle {
    pub fn new(center: Vec3, size: Vec3, yaw_deg: f64) -> Self {
        Self { center, size, yaw_deg }
    }

    /// Box of the given footprint standing on the ground plane.
    pub fn grounded(x: f64, y: f64, l: f64, w: f64, h: f64, yaw_deg: f64) -> Self {
        Self::new(Vec3::new(x, y, h / 2.0), Vec3::new(l, w, h), yaw_deg)
    }

    pub fn half_extents(&self) -> Vec3 {
        self.size / 2.0
    }

    fn rotation(&self) -> Rotation3<f64> {
        Rotation3::from_axis_angle(&Vector3::z_axis(), self.yaw_deg.to_radians())
    }

    /// Transforms a world point into the box frame.
    pub fn to_local(&self, p: &Vec3) -> Vec3 {
        self.rotation().inverse() * (p - self.center)
    }

    /// Transforms a box-frame point back into the world frame.
    pub fn to_world(&self, q: &Vec3) -> Vec3 {
        self.rotation() * q + self.center
    }

    /// Signed Euclidean distance from `p` to the box surface; negative inside.
    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        let q = self.to_local(p);
        let d = q.abs() - self.half_extents();
        let outside = d.map(|c| c.max(0.0)).norm();
        let inside = d.max().min(0.0);
        outside + inside
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        self.signed_distance(p) <= 0.0
    }

    /// Point on the box surface closest to `p`.
    ///
    /// For an interior point this is the projection onto the nearest face.
    pub fn closest_surface_point(&self, p: &Vec3) -> Vec3 {
        let q = self.to_local(p);
        let half = self.half_extents();
        let clamped = Vec3::new(
            q.x.clamp(-half.x, half.x),
            q.y.clamp(-half.y, half.y),
            q.z.clamp(-half.z, half.z),
        );
        if clamped != q {
            return self.to_world(&clamped);
        }
        let gap = half - q.abs();
        let axis = gap.imin();
        let mut surface = q;
        surface[axis] = half[axis].copysign(if q[axis] == 0.0 { 1.0 } else { q[axis] });
        self.to_world(&surface)
    }
}

/// Minimum signed distance between segment `a..b` and the obstacle.
///
/// The signed distance to a convex body is convex along a line, so a golden
/// section search converges to the global minimum.
pub fn segment_signed_distance(a: &Vec3, b: &Vec3, obstacle: &Obstacle) -> f64 {
    let f = |t: f64| obstacle.signed_distance(&(a + (b - a) * t));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..90 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2).min(f(0.0)).min(f(1.0))
}

/// Minimum signed distance between a polyline and a set of obstacles.
/// `+inf` when there are no obstacles or fewer than two vertices.
pub fn polyline_signed_distance(vertices: &[Vec3], obstacles: &[Obstacle]) -> f64 {
    vertices
        .windows(2)
        .flat_map(|seg| {
            obstacles
                .iter()
                .map(move |o| segment_signed_distance(&seg[0], &seg[1], o))
        })
        .fold(f64::INFINITY, f64::min)
}
