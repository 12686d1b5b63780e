//! Small planar geometry helpers shared by the analytic and numeric solvers.

use std::f64::consts::PI;

pub type Vec2 = [f64; 2];

#[inline]
pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn heading(a: Vec2) -> f64 {
    a[1].atan2(a[0])
}

/// Rotates a local vector by `angle` (radians, counterclockwise).
#[inline]
pub fn rotate(v: Vec2, angle: f64) -> Vec2 {
    let (s, c) = angle.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// Derivative of [`rotate`] with respect to the angle.
#[inline]
pub fn rotate_deriv(v: Vec2, angle: f64) -> Vec2 {
    let (s, c) = angle.sin_cos();
    [-s * v[0] - c * v[1], c * v[0] - s * v[1]]
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_pi(angle: f64) -> f64 {
    let mut a = angle % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Wraps an angle into [0, 2pi).
pub fn wrap_2pi(angle: f64) -> f64 {
    let a = angle.rem_euclid(2.0 * PI);
    if a >= 2.0 * PI {
        0.0
    } else {
        a
    }
}

/// Result of intersecting two circles with a side selection.
#[derive(Debug, Clone, Copy)]
pub struct DyadSolution {
    pub point: Vec2,
    /// Sine of the angle between the two arms at the intersection point.
    pub sin_transmission: f64,
    /// Assemblability margin in mm; negative when the circles intersect.
    pub margin: f64,
}

/// Intersects the circle of radius `r1` about `c1` with the circle of radius `r2`
/// about `c2`. `side = +1` picks the point to the left of the directed line
/// c1 -> c2, `side = -1` the point to the right.
///
/// Returns the margin as the error value when the circles do not meet.
pub fn circle_intersection(c1: Vec2, r1: f64, c2: Vec2, r2: f64, side: f64) -> Result<DyadSolution, f64> {
    let v = sub(c2, c1);
    let d = norm(v);
    let margin = (d - (r1 + r2)).max((r1 - r2).abs() - d);
    if d == 0.0 || margin > 0.0 {
        return Err(if d == 0.0 { margin.max(r1.min(r2)) } else { margin });
    }
    let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let e = [v[0] / d, v[1] / d];
    let n = [-e[1], e[0]];
    let point = [c1[0] + a * e[0] + side * h * n[0], c1[1] + a * e[1] + side * h * n[1]];
    let sin_transmission = d * h / (r1 * r2);
    Ok(DyadSolution { point, sin_transmission, margin })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_keeps_principal_range() {
        assert_eq!(wrap_pi(PI), PI);
        assert!((wrap_pi(-PI) - PI).abs() < 1e-15);
        assert!((wrap_pi(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_2pi(-0.0), 0.0);
        assert!((wrap_2pi(-PI / 2.0) - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn intersection_sides_are_mirror_images() {
        let up = circle_intersection([0.0, 0.0], 5.0, [8.0, 0.0], 5.0, 1.0).unwrap();
        let down = circle_intersection([0.0, 0.0], 5.0, [8.0, 0.0], 5.0, -1.0).unwrap();
        assert!((up.point[0] - 4.0).abs() < 1e-12 && (up.point[1] - 3.0).abs() < 1e-12);
        assert!((down.point[1] + 3.0).abs() < 1e-12);
        assert!(up.margin < 0.0);
    }

    #[test]
    fn disjoint_circles_report_positive_margin() {
        let err = circle_intersection([0.0, 0.0], 1.0, [10.0, 0.0], 2.0, 1.0).unwrap_err();
        assert!((err - 7.0).abs() < 1e-12);
        let err = circle_intersection([0.0, 0.0], 10.0, [1.0, 0.0], 2.0, 1.0).unwrap_err();
        assert!((err - 7.0).abs() < 1e-12);
    }
}
