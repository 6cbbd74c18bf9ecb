//! Planar circle geometry (lens areas, IoU) and rigid body/world frame
//! transforms. These are the primitives under both localizers.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::types::Pose2D;

/// 2-vector of meters.
pub type Vec2 = [f64; 2];
/// Row-major 2x2 matrix.
pub type Mat2 = [[f64; 2]; 2];

/// A disk in the world plane. The radius is strictly positive by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Circle {
    pub fn new(cx: f64, cy: f64, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("circle radius must be > 0, got {r}")));
        }
        Ok(Self { cx, cy, r })
    }
}

// Tolerance for snapping the center distance to a regime boundary (tangency or
// containment), so acos never sees an argument outside [-1, 1].
const BOUNDARY_SNAP: f64 = 1e-12;

/// Exact intersection (lens) area of two disks, in square meters.
///
/// Returns 0 for disjoint disks and pi*min(r)^2 when one disk contains the
/// other; otherwise the two-circular-segment closed form. The result is
/// bit-identical under argument swap.
pub fn circle_intersection_area(a: &Circle, b: &Circle) -> f64 {
    // Canonical argument order makes the f64 evaluation exactly symmetric.
    let (a, b) = if (a.r, a.cx, a.cy) <= (b.r, b.cx, b.cy) { (a, b) } else { (b, a) };
    let d = (a.cx - b.cx).hypot(a.cy - b.cy);
    let (ra, rb) = (a.r, b.r);
    if d + BOUNDARY_SNAP >= ra + rb {
        return 0.0;
    }
    if d <= (ra - rb).abs() + BOUNDARY_SNAP {
        let rmin = ra.min(rb);
        return PI * rmin * rmin;
    }
    let cos_a = ((d * d + ra * ra - rb * rb) / (2.0 * d * ra)).clamp(-1.0, 1.0);
    let cos_b = ((d * d + rb * rb - ra * ra) / (2.0 * d * rb)).clamp(-1.0, 1.0);
    let seg = (-d + ra + rb) * (d + ra - rb) * (d - ra + rb) * (d + ra + rb);
    ra * ra * cos_a.acos() + rb * rb * cos_b.acos() - 0.5 * seg.max(0.0).sqrt()
}

/// Intersection over union of two disks, in [0, 1]. Symmetric in its arguments.
pub fn circle_iou(a: &Circle, b: &Circle) -> f64 {
    let inter = circle_intersection_area(a, b);
    let union = PI * a.r * a.r + PI * b.r * b.r - inter;
    if union <= 0.0 {
        // Only reachable for two identical degenerate disks; treat as full overlap.
        return 1.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// Map a body-frame point (x forward, y left) into the world frame: rotate by
/// the pose heading, then translate by the pose position.
pub fn body_to_world(pose: &Pose2D, p: Vec2) -> Vec2 {
    let (s, c) = pose.heading.sin_cos();
    [pose.x + c * p[0] - s * p[1], pose.y + s * p[0] + c * p[1]]
}

/// Inverse of [`body_to_world`].
pub fn world_to_body(pose: &Pose2D, p: Vec2) -> Vec2 {
    let (s, c) = pose.heading.sin_cos();
    let dx = p[0] - pose.x;
    let dy = p[1] - pose.y;
    [c * dx + s * dy, -s * dx + c * dy]
}
