//! Line intersection and the distance-to-origin kernel.
//!
//! For lines with feet (ℓ₁, θ₁) and (ℓ₂, θ₂), the intersection point sits at
//! distance
//!
//! ```text
//! r² = (ℓ₁² + ℓ₂² − 2 ℓ₁ ℓ₂ cos Δθ) / sin² Δθ,     Δθ = θ₂ − θ₁,
//! ```
//!
//! which only involves the angle difference: the whole construction is
//! rotation invariant.

use crate::measures::PolarLine;
use thiserror::Error;

/// Two lines count as parallel when |sin Δθ| drops below this.
pub const PARALLEL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum GeometryError {
    #[error("lines are parallel (|sin Δθ| below tolerance)")]
    Parallel,
    #[error("lines coincide within tolerance")]
    Coincident,
}

/// A point in the plane, in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarPoint {
    /// Distance to the origin; nonnegative.
    pub r: f64,
    /// Angle in [0, 2π).
    pub theta: f64,
}

impl PlanarPoint {
    pub fn new(r: f64, theta: f64) -> Self {
        assert!(r >= 0.0, "radius must be nonnegative, got {r}");
        Self {
            r,
            theta: crate::measures::normalize_angle(theta),
        }
    }

    pub fn to_cartesian(&self) -> (f64, f64) {
        (self.r * self.theta.cos(), self.r * self.theta.sin())
    }
}

#[inline]
fn classify_parallel(l1: &PolarLine, l2: &PolarLine) -> GeometryError {
    if (l1.dist - l2.dist).abs() <= PARALLEL_TOL {
        GeometryError::Coincident
    } else {
        GeometryError::Parallel
    }
}

#[inline]
fn distance_from_parts(d1: f64, d2: f64, cos_d: f64, abs_sin_d: f64) -> f64 {
    ((d1 * d1 + d2 * d2 - 2.0 * d1 * d2 * cos_d).max(0.0)).sqrt() / abs_sin_d
}

/// Intersection point of two non-parallel lines.
pub fn intersect(l1: &PolarLine, l2: &PolarLine) -> Result<PlanarPoint, GeometryError> {
    let delta = l2.foot_angle - l1.foot_angle;
    let (sin_d, cos_d) = delta.sin_cos();
    if sin_d.abs() < PARALLEL_TOL {
        return Err(classify_parallel(l1, l2));
    }
    let r = distance_from_parts(l1.dist, l2.dist, cos_d, sin_d.abs());
    // Cramer solve of x cosθᵢ + y sinθᵢ = ℓᵢ for the direction only.
    let (s1, c1) = l1.foot_angle.sin_cos();
    let (s2, c2) = l2.foot_angle.sin_cos();
    let det = c1 * s2 - s1 * c2;
    let x = (l1.dist * s2 - l2.dist * s1) / det;
    let y = (l2.dist * c1 - l1.dist * c2) / det;
    Ok(PlanarPoint::new(r, y.atan2(x)))
}

/// Distance from the intersection of two lines to the origin.
///
/// Hot path for Monte Carlo and n-gon loops: two trig calls and a square
/// root, no polar angle.
pub fn distance_only(l1: &PolarLine, l2: &PolarLine) -> Result<f64, GeometryError> {
    let delta = l2.foot_angle - l1.foot_angle;
    let (sin_d, cos_d) = delta.sin_cos();
    if sin_d.abs() < PARALLEL_TOL {
        return Err(classify_parallel(l1, l2));
    }
    Ok(distance_from_parts(l1.dist, l2.dist, cos_d, sin_d.abs()))
}
