//! Geometric probability of intersecting random chords and lines of a circle.
//!
//! Two random lines in the plane, each drawn from a rotationally invariant
//! law, almost surely meet in a single point. This crate computes the
//! distribution of the distance from that point to the circle's center, for
//! the classical Bertrand-paradox chord models (uniform radius, uniform
//! midpoint, uniform endpoints) and for lines whose foot follows a Rayleigh
//! law, together with:
//!
//! * closed forms in terms of the dilogarithm and modified Bessel functions
//!   ([`distribution`]),
//! * an integral transform that maps any atomless radial measure to the
//!   intersection-distance law ([`distribution::transform_cdf`]),
//! * a deterministic, parallel Monte Carlo harness with
//!   Kolmogorov–Smirnov goodness-of-fit checks ([`montecarlo`]),
//! * the discrete counterpart: enumeration of diagonal (and diagonal-line)
//!   intersections of the regular n-gon, the Poonen–Rubinstein distinct-point
//!   formula, and Karamata's limiting ratio ([`ngon`]).
//!
//! All operations are pure and thread-safe; sampling takes explicit seeds and
//! is reproducible bit-for-bit on a fixed platform and build.

// Validation deliberately writes `!(a > b)` instead of `a <= b`: the negated
// form also rejects NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distribution;
pub mod geometry;
pub mod measures;
pub mod montecarlo;
pub mod ngon;
pub mod quad;
pub mod specfun;

pub mod serialize;

pub use distribution::Model;
pub use geometry::PlanarPoint;
pub use measures::{PolarLine, RadialMeasure};
pub use quad::QuadratureSpec;
