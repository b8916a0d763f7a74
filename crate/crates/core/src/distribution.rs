//! Closed-form and quadrature CDFs of the intersection distance.
//!
//! `ℓ` denotes the distance from the intersection of two independent random
//! lines to the origin. For the four built-in line models the law of ℓ is:
//!
//! * uniform radius: P(ℓ ≤ r) = r²/2 on [0, 1], arccos/arcsin closed form
//!   beyond,
//! * uniform midpoint: 3r⁴/8 on [0, 1], closed form beyond,
//! * uniform endpoints: (2/π²)·Li₂(r²) on [0, 1], a one-dimensional smooth
//!   integral beyond,
//! * Gaussian feet (Rayleigh radial law):
//!   1 − 2e^{−r²/4}I₀(r²/4) + e^{−r²/2}I₀(r²/2) everywhere.
//!
//! The general route is [`transform_cdf`]: for any atomless radial measure
//! with CDF F,
//!
//! ```text
//! P(ℓ ≤ r) = (4/π) ∫₀^r F(t) F′(t) arccos(t/r) dt.
//! ```
//!
//! Quadrature paths substitute t = r·sin v (or t = sin u for the endpoints
//! law), which removes both the arccos square-root kink at t = r and the
//! 1/√(1−t²) endpoint singularity; the transformed integrands are smooth.

use crate::measures::{RadialMeasure, TabulatedCdf};
use crate::quad;
use crate::serialize::fmt_g17;
use crate::specfun::{self, SeriesConfig};
use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use thiserror::Error;

pub use crate::quad::{QuadError, QuadRule, QuadratureSpec};

#[derive(Debug, Error)]
pub enum DistributionError {
    #[error("argument {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },
    #[error("density diverges at r = 1")]
    SingularDensity,
    #[error("custom measure has an atom-like jump; the transform requires an atomless law")]
    AtomicMeasure,
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Series(#[from] specfun::SpecFunError),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
}

/// The four intersection-distance models with closed or semi-closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    UniformRadius,
    UniformMidpoint,
    UniformEndpoints,
    Gaussian,
}

impl Model {
    pub const ALL: [Model; 4] = [
        Model::UniformRadius,
        Model::UniformMidpoint,
        Model::UniformEndpoints,
        Model::Gaussian,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Model::UniformRadius => "radius",
            Model::UniformMidpoint => "midpoint",
            Model::UniformEndpoints => "endpoints",
            Model::Gaussian => "gaussian",
        }
    }

    /// The radial measure of the underlying line law.
    pub fn measure(&self) -> RadialMeasure {
        match self {
            Model::UniformRadius => RadialMeasure::UniformRadius,
            Model::UniformMidpoint => RadialMeasure::UniformMidpoint,
            Model::UniformEndpoints => RadialMeasure::UniformEndpoints,
            Model::Gaussian => RadialMeasure::Rayleigh,
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Model {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "radius" => Ok(Model::UniformRadius),
            "midpoint" => Ok(Model::UniformMidpoint),
            "endpoints" => Ok(Model::UniformEndpoints),
            "gaussian" => Ok(Model::Gaussian),
            other => Err(format!(
                "unknown model '{other}' (expected radius|midpoint|endpoints|gaussian)"
            )),
        }
    }
}

fn check_radius(r: f64) -> Result<(), DistributionError> {
    if r < 0.0 || r.is_nan() {
        return Err(DistributionError::Domain {
            value: r,
            domain: "[0, ∞)",
        });
    }
    Ok(())
}

/// P(ℓ ≤ r) for the uniform-endpoints model.
///
/// On [0, 1] this is (2/π²)·Li₂(r²); past 1 it is the integral
/// (16/π³)·∫₀^{π/2} u·arccos(sin u / r) du, evaluated by quadrature.
pub fn cdf_endpoints(r: f64, q: &QuadratureSpec) -> Result<f64, DistributionError> {
    check_radius(r)?;
    if r.is_infinite() {
        return Ok(1.0);
    }
    if r <= 1.0 {
        let v = 2.0 / (PI * PI) * specfun::li2(r * r, SeriesConfig::default())?;
        return Ok(v.clamp(0.0, 1.0));
    }
    let integral = quad::integrate(|u| u * (u.sin() / r).acos(), 0.0, FRAC_PI_2, q)?;
    Ok((16.0 / PI.powi(3) * integral).clamp(0.0, 1.0))
}

/// Density of the uniform-endpoints model, which blows up at r = 1.
pub fn density_endpoints(r: f64, q: &QuadratureSpec) -> Result<f64, DistributionError> {
    check_radius(r)?;
    if r == 1.0 {
        return Err(DistributionError::SingularDensity);
    }
    if r == 0.0 {
        // −log(1−r²)/r ~ r near zero.
        return Ok(0.0);
    }
    if r < 1.0 {
        return Ok(-4.0 * (-r * r).ln_1p() / (PI * PI * r));
    }
    // (16/(r²π³)) ∫₀¹ t·arcsin t / (√(1−t²)·√(1−t²/r²)) dt with t = sin u.
    let integral = quad::integrate(
        |u| {
            let s = u.sin();
            s * u / (1.0 - s * s / (r * r)).sqrt()
        },
        0.0,
        FRAC_PI_2,
        q,
    )?;
    Ok(16.0 / (r * r * PI.powi(3)) * integral)
}

/// P(ℓ ≤ r) for the uniform-radius model, closed form on both branches.
///
/// Past r = 100 the two closed-form terms agree to their leading 4+ digits
/// and their difference drowns in rounding, so the tail switches to the
/// series r²·arcsin(1/r) − √(r²−1) = 2/(3r) + 1/(5r³) + 3/(28r⁵) + O(r⁻⁷).
pub fn cdf_uniform_radius(r: f64) -> Result<f64, DistributionError> {
    check_radius(r)?;
    if r.is_infinite() {
        return Ok(1.0);
    }
    if r <= 1.0 {
        return Ok(r * r / 2.0);
    }
    let inv = 1.0 / r;
    let v = if r < 100.0 {
        (2.0 * inv.acos() + r * r * inv.asin() - (r * r - 1.0).sqrt()) / PI
    } else {
        1.0 + (-2.0 * inv.asin()
            + 2.0 / (3.0 * r)
            + 1.0 / (5.0 * r.powi(3))
            + 3.0 / (28.0 * r.powi(5)))
            / PI
    };
    Ok(v.clamp(0.0, 1.0))
}

/// P(ℓ ≤ r) for the uniform-midpoint model, closed form on both branches.
///
/// Same cancellation story as [`cdf_uniform_radius`]: past r = 100, the
/// difference 3r⁴arcsin(1/r) − (3r²+2)√(r²−1) is evaluated by its series
/// 8/(5r) + 4/(7r³) + 1/(3r⁵) + O(r⁻⁷).
pub fn cdf_uniform_midpoint(r: f64) -> Result<f64, DistributionError> {
    check_radius(r)?;
    if r.is_infinite() {
        return Ok(1.0);
    }
    if r <= 1.0 {
        return Ok(3.0 * r.powi(4) / 8.0);
    }
    let inv = 1.0 / r;
    let v = if r < 100.0 {
        (2.0 * inv.acos()) / PI + 3.0 * r.powi(4) * inv.asin() / (4.0 * PI)
            - (3.0 * r * r + 2.0) * (r * r - 1.0).sqrt() / (4.0 * PI)
    } else {
        1.0 - 2.0 * inv.asin() / PI
            + (8.0 / (5.0 * r) + 4.0 / (7.0 * r.powi(3)) + 1.0 / (3.0 * r.powi(5))) / (4.0 * PI)
    };
    Ok(v.clamp(0.0, 1.0))
}

/// P(ℓ ≤ r) for Gaussian feet, in terms of scaled Bessel functions.
pub fn cdf_gaussian(r: f64) -> Result<f64, DistributionError> {
    check_radius(r)?;
    if r.is_infinite() {
        return Ok(1.0);
    }
    let cfg = SeriesConfig::default();
    let x = r * r;
    let v = 1.0 - 2.0 * specfun::bessel_i0_scaled(x / 4.0, cfg)?
        + specfun::bessel_i0_scaled(x / 2.0, cfg)?;
    Ok(v.clamp(0.0, 1.0))
}

/// CDF dispatch over the four models.
pub fn cdf(model: Model, r: f64, q: &QuadratureSpec) -> Result<f64, DistributionError> {
    match model {
        Model::UniformRadius => cdf_uniform_radius(r),
        Model::UniformMidpoint => cdf_uniform_midpoint(r),
        Model::UniformEndpoints => cdf_endpoints(r, q),
        Model::Gaussian => cdf_gaussian(r),
    }
}

/// P(ℓ ≤ r) induced by an arbitrary atomless radial measure:
/// (4/π)·∫₀^r F(t)F′(t)·arccos(t/r) dt, by quadrature.
///
/// Built-in measures integrate after the regularizing substitution; custom
/// tabulated measures integrate exactly, cell by cell, against the linear
/// interpolant.
pub fn transform_cdf(
    m: &RadialMeasure,
    r: f64,
    q: &QuadratureSpec,
) -> Result<f64, DistributionError> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let v = match m {
        RadialMeasure::UniformRadius => {
            // F F′ = t on [0, 1].
            let upper = (1.0 / r).min(1.0).asin();
            let integral = quad::integrate(
                |v| {
                    let (s, c) = v.sin_cos();
                    (r * s) * (FRAC_PI_2 - v) * r * c
                },
                0.0,
                upper,
                q,
            )?;
            4.0 / PI * integral
        }
        RadialMeasure::UniformMidpoint => {
            // F F′ = 2t³ on [0, 1].
            let upper = (1.0 / r).min(1.0).asin();
            let integral = quad::integrate(
                |v| {
                    let (s, c) = v.sin_cos();
                    let t = r * s;
                    2.0 * t * t * t * (FRAC_PI_2 - v) * r * c
                },
                0.0,
                upper,
                q,
            )?;
            4.0 / PI * integral
        }
        RadialMeasure::UniformEndpoints => {
            // F F′ dt = (4/π²)·u du under t = sin u.
            let upper = r.min(1.0).asin();
            let integral = quad::integrate(|u| u * (u.sin() / r).acos(), 0.0, upper, q)?;
            16.0 / PI.powi(3) * integral
        }
        RadialMeasure::Rayleigh => {
            let integral = quad::integrate(
                |v| {
                    let (s, c) = v.sin_cos();
                    let t = r * s;
                    let e = (-t * t / 2.0).exp();
                    (1.0 - e) * t * e * (FRAC_PI_2 - v) * r * c
                },
                0.0,
                FRAC_PI_2,
                q,
            )?;
            4.0 / PI * integral
        }
        RadialMeasure::Custom(tab) => {
            if tab.has_jump(1e-12, 1e-9) {
                return Err(DistributionError::AtomicMeasure);
            }
            4.0 / PI * transform_tabulated(tab, r)
        }
    };
    Ok(v.clamp(0.0, 1.0))
}

/// ∫₀^r F F′ arccos(t/r) dt for a piecewise-linear F, cell by cell in closed
/// form via ∫ arccos(t/r) dt and ∫ t·arccos(t/r) dt.
fn transform_tabulated(tab: &TabulatedCdf, r: f64) -> f64 {
    let anti0 = |t: f64| t * (t / r).acos() - (r * r - t * t).max(0.0).sqrt();
    let anti1 = |t: f64| {
        t * t * (t / r).acos() / 2.0 + r * r * (t / r).asin() / 4.0
            - t * (r * r - t * t).max(0.0).sqrt() / 4.0
    };
    let mut total = 0.0;
    let grid: Vec<(f64, f64)> = tab.grid().collect();
    for w in grid.windows(2) {
        let (t0, f0) = w[0];
        let (t1, f1) = w[1];
        if t0 >= r {
            break;
        }
        let slope = (f1 - f0) / (t1 - t0);
        if slope == 0.0 {
            continue;
        }
        let hi = t1.min(r);
        // F(t) = f0 + slope·(t − t0) on the cell.
        total +=
            slope * ((f0 - slope * t0) * (anti0(hi) - anti0(t0)) + slope * (anti1(hi) - anti1(t0)));
    }
    total
}

/// Probability that the intersection point falls in the annulus sector
/// [r_lo, r_hi] × [theta_lo, theta_hi]. The angle factor splits off because
/// the polar angle of the intersection point is uniform and independent of
/// its distance.
pub fn region_probability(
    model: Model,
    r_lo: f64,
    r_hi: f64,
    theta_lo: f64,
    theta_hi: f64,
    q: &QuadratureSpec,
) -> Result<f64, DistributionError> {
    if !(r_lo >= 0.0 && r_hi >= r_lo) {
        return Err(DistributionError::Domain {
            value: r_lo,
            domain: "0 ≤ r_lo ≤ r_hi",
        });
    }
    let span = theta_hi - theta_lo;
    if !(0.0..=TAU + 1e-12).contains(&span) {
        return Err(DistributionError::Domain {
            value: span,
            domain: "0 ≤ theta_hi − theta_lo ≤ 2π",
        });
    }
    let p = (cdf(model, r_hi, q)? - cdf(model, r_lo, q)?).max(0.0);
    Ok(span.min(TAU) / TAU * p)
}

/// Cross-validation of the dilogarithm identity behind the endpoints CDF.
#[derive(Debug, Clone, Copy)]
pub struct IdentityCheck {
    /// (16/π³)·∫₀^{arcsin r} u·arccos(sin u / r) du, by quadrature.
    pub integral: f64,
    /// (16/π³)·½·∫₀^{π/2} (arcsin(r sin u))² du with the arcsin² series.
    pub series_integral: f64,
    /// (2/π²)·Li₂(r²).
    pub dilog: f64,
    /// Largest deviation of the two integral routes from the dilogarithm.
    pub abs_err: f64,
}

/// Evaluates P(ℓ ≤ r) for the endpoints model along three independent routes
/// and reports their agreement; they coincide for r in [0, 1].
pub fn verify_identity_section5(
    r: f64,
    q: &QuadratureSpec,
) -> Result<IdentityCheck, DistributionError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(DistributionError::Domain {
            value: r,
            domain: "[0, 1]",
        });
    }
    let coeff = 16.0 / PI.powi(3);
    let integral = coeff * quad::integrate(|u| u * (u.sin() / r).acos(), 0.0, r.asin(), q)?;

    // The arcsin² series needs extra headroom when r·sin u approaches 1.
    let cfg = SeriesConfig {
        tolerance: 1e-14,
        max_terms: 50_000_000,
    };
    let series_err: Cell<Option<specfun::SpecFunError>> = Cell::new(None);
    let series_integral = coeff
        * 0.5
        * quad::integrate(
            |u| match specfun::asin_sq(r * u.sin(), cfg) {
                Ok(v) => v,
                Err(e) => {
                    series_err.set(Some(e));
                    0.0
                }
            },
            0.0,
            FRAC_PI_2,
            q,
        )?;
    if let Some(e) = series_err.take() {
        return Err(e.into());
    }

    let dilog = 2.0 / (PI * PI) * specfun::li2(r * r, SeriesConfig::default())?;
    let abs_err = (integral - dilog)
        .abs()
        .max((series_integral - dilog).abs());
    Ok(IdentityCheck {
        integral,
        series_integral,
        dilog,
        abs_err,
    })
}

/// How the values of a [`CdfCurve`] were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    Empirical,
}

impl Provenance {
    pub fn name(&self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Quadrature => "quadrature",
            Provenance::Empirical => "empirical",
        }
    }
}

/// A sampled monotone curve r ↦ P(ℓ ≤ r).
#[derive(Debug, Clone)]
pub struct CdfCurve {
    pub model_label: String,
    pub points: Vec<(f64, f64)>,
    pub provenance: Provenance,
}

impl CdfCurve {
    /// Validates monotonicity and range before wrapping.
    pub fn new(
        model_label: impl Into<String>,
        points: Vec<(f64, f64)>,
        provenance: Provenance,
    ) -> Result<Self, DistributionError> {
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(DistributionError::InvalidCurve(
                    "r must be strictly increasing".into(),
                ));
            }
            if w[1].1 < w[0].1 - 1e-10 {
                return Err(DistributionError::InvalidCurve(
                    "values must be nondecreasing".into(),
                ));
            }
        }
        if points
            .iter()
            .any(|&(r, v)| r < 0.0 || !(-1e-12..=1.0 + 1e-12).contains(&v))
        {
            return Err(DistributionError::InvalidCurve(
                "r must be nonnegative and values in [0, 1]".into(),
            ));
        }
        Ok(Self {
            model_label: model_label.into(),
            points,
            provenance,
        })
    }

    /// `r,value` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for &(r, v) in &self.points {
            out.push_str(&fmt_g17(r));
            out.push(',');
            out.push_str(&fmt_g17(v));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let points: Vec<serde_json::Value> = self
            .points
            .iter()
            .map(|&(r, v)| serde_json::json!([r, v]))
            .collect();
        serde_json::json!({
            "model": self.model_label,
            "provenance": self.provenance.name(),
            "points": points,
        })
        .to_string()
    }
}

/// Samples the model CDF on a grid of radii.
pub fn cdf_curve(
    model: Model,
    rs: &[f64],
    q: &QuadratureSpec,
) -> Result<CdfCurve, DistributionError> {
    let mut points = Vec::with_capacity(rs.len());
    for &r in rs {
        points.push((r, cdf(model, r, q)?));
    }
    let provenance = match model {
        Model::UniformEndpoints if rs.iter().any(|&r| r > 1.0) => Provenance::Quadrature,
        _ => Provenance::ClosedForm,
    };
    CdfCurve::new(model.name(), points, provenance)
}

/// Samples [`transform_cdf`] on a grid of radii.
pub fn transform_curve(
    m: &RadialMeasure,
    rs: &[f64],
    q: &QuadratureSpec,
) -> Result<CdfCurve, DistributionError> {
    let mut points = Vec::with_capacity(rs.len());
    for &r in rs {
        points.push((r, transform_cdf(m, r, q)?));
    }
    CdfCurve::new(m.name(), points, Provenance::Quadrature)
}

/// A total, infallible CDF evaluator, cheap enough for per-sample use.
///
/// The endpoints model needs quadrature past r = 1, so this precomputes an
/// interpolation table up to `r_max` and continues with the exact c/r tail
/// decay beyond it; everything else evaluates its closed form. Knots are
/// log-spaced in r − 1 because the CDF has an −(r−1)·log(r−1) cusp at 1
/// that a plain log-r grid cannot resolve.
pub struct ModelCdf {
    model: Model,
    table: Option<EndpointsTable>,
    q: QuadratureSpec,
}

struct EndpointsTable {
    /// Knot i sits at r = 1 + EXCESS_MIN·exp(i·d_log).
    d_log: f64,
    values: Vec<f64>,
    r_max: f64,
    tail_coeff: f64,
}

const ENDPOINTS_TABLE_KNOTS: usize = 2048;
/// Smallest tabulated r − 1; the CDF moves by well under 1e-7 across it.
const ENDPOINTS_EXCESS_MIN: f64 = 1e-9;

impl ModelCdf {
    pub fn new(model: Model, r_max: f64, q: &QuadratureSpec) -> Result<Self, DistributionError> {
        let table = if model == Model::UniformEndpoints && r_max > 1.0 + ENDPOINTS_EXCESS_MIN {
            let k = ENDPOINTS_TABLE_KNOTS;
            let d_log = ((r_max - 1.0) / ENDPOINTS_EXCESS_MIN).ln() / k as f64;
            let mut values = Vec::with_capacity(k + 1);
            for i in 0..=k {
                let r = 1.0 + ENDPOINTS_EXCESS_MIN * (i as f64 * d_log).exp();
                values.push(cdf_endpoints(r, q)?);
            }
            let last = *values.last().expect("nonempty");
            Some(EndpointsTable {
                d_log,
                values,
                r_max,
                tail_coeff: (1.0 - last) * r_max,
            })
        } else {
            None
        };
        Ok(Self {
            model,
            table,
            q: *q,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match self.model {
            Model::UniformRadius => cdf_uniform_radius(r).expect("r validated"),
            Model::UniformMidpoint => cdf_uniform_midpoint(r).expect("r validated"),
            Model::Gaussian => cdf_gaussian(r).expect("series converges on [0, ∞)"),
            Model::UniformEndpoints => {
                if r <= 1.0 {
                    return cdf_endpoints(r, &self.q).expect("dilogarithm branch");
                }
                match &self.table {
                    Some(tab) => tab.eval(r),
                    None => {
                        cdf_endpoints(r, &self.q).expect("table covers requested range when built")
                    }
                }
            }
        }
    }
}

impl EndpointsTable {
    fn eval(&self, r: f64) -> f64 {
        if r >= self.r_max {
            return (1.0 - self.tail_coeff / r).clamp(0.0, 1.0);
        }
        let excess = r - 1.0;
        if excess <= ENDPOINTS_EXCESS_MIN {
            return self.values[0];
        }
        let pos = (excess / ENDPOINTS_EXCESS_MIN).ln() / self.d_log;
        let i = (pos as usize).min(self.values.len() - 2);
        let w = pos - i as f64;
        self.values[i] + w * (self.values[i + 1] - self.values[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry;
    use crate::measures::PolarLine;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn endpoints_cdf_special_values() {
        assert_eq!(cdf_endpoints(0.0, &q()).unwrap(), 0.0);
        assert_abs_diff_eq!(
            cdf_endpoints(1.0, &q()).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-13
        );
        let expect = 1.0 / 6.0 - (2f64.ln() / PI).powi(2);
        assert_abs_diff_eq!(
            cdf_endpoints(FRAC_1_SQRT_2, &q()).unwrap(),
            expect,
            epsilon = 1e-13
        );
        assert!(matches!(
            cdf_endpoints(-0.5, &q()),
            Err(DistributionError::Domain { .. })
        ));
    }

    /// Independent oracle for the r > 1 branch: fine-grid trapezoid rule on
    /// the substituted integrand.
    fn endpoints_cdf_trapezoid(r: f64, panels: usize) -> f64 {
        let h = FRAC_PI_2 / panels as f64;
        let f = |u: f64| u * (u.sin() / r).acos();
        let mut s = 0.5 * (f(0.0) + f(FRAC_PI_2));
        for i in 1..panels {
            s += f(i as f64 * h);
        }
        16.0 / PI.powi(3) * s * h
    }

    #[test]
    fn endpoints_cdf_beyond_one_matches_trapezoid_oracle() {
        let oracle = endpoints_cdf_trapezoid(10.0, 2_000_000);
        assert_abs_diff_eq!(cdf_endpoints(10.0, &q()).unwrap(), oracle, epsilon = 1e-9);
    }

    #[test]
    fn endpoints_branches_meet_at_one() {
        let below = cdf_endpoints(1.0, &q()).unwrap();
        let above = cdf_endpoints(1.0 + 1e-12, &q()).unwrap();
        assert_abs_diff_eq!(below, above, epsilon = 1e-9);
    }

    #[test]
    fn density_endpoints_branches_and_singularity() {
        assert_eq!(density_endpoints(0.0, &q()).unwrap(), 0.0);
        let expect = -4.0 * 0.75f64.ln() / (PI * PI * 0.5);
        assert_abs_diff_eq!(
            density_endpoints(0.5, &q()).unwrap(),
            expect,
            epsilon = 1e-14
        );
        assert!(matches!(
            density_endpoints(1.0, &q()),
            Err(DistributionError::SingularDensity)
        ));
    }

    #[test]
    fn density_is_cdf_derivative() {
        // Central finite differences of the CDF as the independent route.
        for r in [0.3, 0.8, 1.5, 3.0] {
            let h = 1e-5;
            let num = (cdf_endpoints(r + h, &q()).unwrap() - cdf_endpoints(r - h, &q()).unwrap())
                / (2.0 * h);
            let den = density_endpoints(r, &q()).unwrap();
            assert_abs_diff_eq!(num, den, epsilon = 1e-6);
        }
    }

    #[test]
    fn radius_and_midpoint_closed_forms() {
        assert_abs_diff_eq!(cdf_uniform_radius(1.0).unwrap(), 0.5, epsilon = 0.0);
        assert_abs_diff_eq!(cdf_uniform_midpoint(1.0).unwrap(), 0.375, epsilon = 0.0);
        // Upper branch evaluated exactly at 1 agrees with the lower branch.
        let inv: f64 = 1.0;
        let upper_i = (2.0 * inv.acos() + inv.asin() - 0.0) / PI;
        assert_abs_diff_eq!(upper_i, 0.5, epsilon = 1e-12);
        let upper_ii = (2.0 * inv.acos()) / PI + 3.0 * inv.asin() / (4.0 * PI);
        assert_abs_diff_eq!(upper_ii, 0.375, epsilon = 1e-12);

        assert_abs_diff_eq!(cdf_uniform_radius(1e6).unwrap(), 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(cdf_uniform_midpoint(1e3).unwrap(), 1.0, epsilon = 1e-2);
        let eps = 1e-8;
        for f in [cdf_uniform_radius as fn(f64) -> _, cdf_uniform_midpoint] {
            let a = f(1.0 - eps).unwrap();
            let b = f(1.0 + eps).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
        // Asymptotic tail branch joins the exact form seamlessly: the CDF
        // moves by ~4e-13 across this bracket, so any visible gap would be
        // a branch mismatch.
        assert_abs_diff_eq!(
            cdf_uniform_radius(100.0 - 1e-8).unwrap(),
            cdf_uniform_radius(100.0).unwrap(),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            cdf_uniform_midpoint(100.0 - 1e-8).unwrap(),
            cdf_uniform_midpoint(100.0).unwrap(),
            epsilon = 1e-10
        );
        // Monotone even through the huge-argument range.
        let mut prev = 0.0;
        for e in 0..=60 {
            let v = cdf_uniform_midpoint(10f64.powf(e as f64 * 0.15)).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn gaussian_cdf_matches_raw_quadrature() {
        assert_eq!(cdf_gaussian(0.0).unwrap(), 0.0);
        for r in [0.5, 1.0, 2.0, 5.0] {
            let raw = quad::integrate(
                |t| {
                    let e = (-t * t / 2.0).exp();
                    (1.0 - e) * t * e * (t / r).acos()
                },
                0.0,
                r,
                &q(),
            )
            .unwrap();
            assert_abs_diff_eq!(cdf_gaussian(r).unwrap(), 4.0 / PI * raw, epsilon = 1e-8);
        }
        let mut prev = 0.0;
        for i in 0..=200 {
            let v = cdf_gaussian(i as f64 * 0.1).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn transform_reproduces_closed_forms() {
        for r in [0.1, 0.3, 0.7, 1.0] {
            let v = transform_cdf(&RadialMeasure::UniformRadius, r, &q()).unwrap();
            assert_abs_diff_eq!(v, r * r / 2.0, epsilon = 1e-10);
            let v = transform_cdf(&RadialMeasure::UniformMidpoint, r, &q()).unwrap();
            assert_abs_diff_eq!(v, 3.0 * r.powi(4) / 8.0, epsilon = 1e-10);
        }
        for r in [0.2, 0.9, 1.5, 4.0] {
            let v = transform_cdf(&RadialMeasure::UniformEndpoints, r, &q()).unwrap();
            assert_abs_diff_eq!(v, cdf_endpoints(r, &q()).unwrap(), epsilon = 1e-9);
        }
        for r in [0.5, 2.0, 5.0] {
            let v = transform_cdf(&RadialMeasure::Rayleigh, r, &q()).unwrap();
            assert_abs_diff_eq!(v, cdf_gaussian(r).unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn transform_tends_to_one() {
        let cases = [
            (RadialMeasure::UniformRadius, 100.0),
            (RadialMeasure::UniformMidpoint, 100.0),
            (RadialMeasure::UniformEndpoints, 150.0),
            (RadialMeasure::Rayleigh, 200.0),
        ];
        for (m, r) in cases {
            let v = transform_cdf(&m, r, &q()).unwrap();
            assert!(v >= 0.99, "{}: {v}", m.name());
        }
    }

    #[test]
    fn transform_on_tabulated_linear_cdf_is_exact() {
        // The uniform-radius CDF is itself piecewise linear, so tabulating it
        // introduces no approximation at all.
        let tab = TabulatedCdf::from_points(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap();
        let m = RadialMeasure::Custom(tab);
        for r in [0.25, 0.6, 1.0, 2.5] {
            let v = transform_cdf(&m, r, &q()).unwrap();
            let expect = cdf_uniform_radius(r).unwrap();
            assert_abs_diff_eq!(v, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn transform_on_tabulated_grid_converges_to_midpoint_law() {
        let n = 4000;
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                (t, t * t)
            })
            .collect();
        let m = RadialMeasure::Custom(TabulatedCdf::from_points(pts).unwrap());
        for r in [0.5, 1.0, 2.0] {
            let v = transform_cdf(&m, r, &q()).unwrap();
            let expect = cdf_uniform_midpoint(r).unwrap();
            assert_abs_diff_eq!(v, expect, epsilon = 1e-6);
        }
    }

    #[test]
    fn transform_rejects_atomic_tables() {
        let tab =
            TabulatedCdf::from_points(vec![(0.0, 0.0), (0.5, 0.1), (0.5 + 1e-13, 0.9), (1.0, 1.0)])
                .unwrap();
        assert!(matches!(
            transform_cdf(&RadialMeasure::Custom(tab), 0.8, &q()),
            Err(DistributionError::AtomicMeasure)
        ));
    }

    #[test]
    fn region_probability_examples() {
        let p = region_probability(Model::UniformEndpoints, 0.0, f64::INFINITY, 0.0, TAU, &q())
            .unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-10);

        let p =
            region_probability(Model::UniformEndpoints, 0.0, 1.0, 0.0, FRAC_PI_2, &q()).unwrap();
        assert_abs_diff_eq!(p, 1.0 / 12.0, epsilon = 1e-12);

        let p = region_probability(Model::Gaussian, 0.0, 5.0, 1.0, 1.0, &q()).unwrap();
        assert_eq!(p, 0.0);

        assert!(region_probability(Model::Gaussian, 2.0, 1.0, 0.0, 1.0, &q()).is_err());
        assert!(region_probability(Model::Gaussian, 0.0, 1.0, 1.0, 0.5, &q()).is_err());
    }

    #[test]
    fn identity_routes_agree() {
        for r in [0.0, 0.6, 1.0] {
            let chk = verify_identity_section5(r, &q()).unwrap();
            assert!(chk.abs_err <= 1e-10, "r={r}: {chk:?}");
        }
        let chk = verify_identity_section5(1.0, &q()).unwrap();
        assert_abs_diff_eq!(chk.dilog, 1.0 / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn ordering_of_models_below_one() {
        for i in 1..=20 {
            let r = i as f64 / 20.0;
            let a = cdf_uniform_radius(r).unwrap();
            let b = cdf_uniform_midpoint(r).unwrap();
            let c = cdf_endpoints(r, &q()).unwrap();
            assert!(a >= b && a >= c, "ordering fails at {r}");
        }
    }

    #[test]
    fn heavy_tail_scaling() {
        // ∫₀¹ t·arcsin t/√(1−t²) dt = 1, checked with the tanh-sinh rule on
        // the raw singular integrand.
        let ts = QuadratureSpec {
            abs_tol: 1e-9,
            max_depth: 12,
            rule: QuadRule::TanhSinh,
        };
        let i = quad::integrate(|t| t * t.asin() / (1.0 - t * t).sqrt(), 0.0, 1.0, &ts).unwrap();
        assert_abs_diff_eq!(i, 1.0, epsilon = 1e-7);

        let r = 1e3;
        let tail = r * (1.0 - cdf_endpoints(r, &q()).unwrap());
        let c = 16.0 / PI.powi(3);
        assert!((tail - c).abs() / c <= 0.05, "tail {tail} vs {c}");
    }

    #[test]
    fn conditional_probability_given_feet() {
        // With feet fixed at 0.2 and 0.5 and uniform angles, the chance that
        // the intersection lies within 0.8 is 2·arccos(0.5/0.8)/π.
        let (t1, t2, r) = (0.2f64, 0.5f64, 0.8f64);
        let expect = 2.0 * (t2 / r).acos() / PI;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 1_000_000;
        let mut hits = 0u64;
        for _ in 0..n {
            let l1 = PolarLine::new(t1, rng.random::<f64>() * TAU);
            let l2 = PolarLine::new(t2, rng.random::<f64>() * TAU);
            if let Ok(d) = geometry::distance_only(&l1, &l2) {
                if d <= r {
                    hits += 1;
                }
            }
        }
        let p = hits as f64 / n as f64;
        assert!((p - expect).abs() <= 0.01, "{p} vs {expect}");
    }

    #[test]
    fn model_cdf_evaluator_tracks_exact_cdf() {
        for model in Model::ALL {
            let fast = ModelCdf::new(model, 1e6, &q()).unwrap();
            for &r in &[0.0, 0.3, 0.99, 1.0, 1.01, 2.0, 37.0, 999.0, 1e6, 2e6] {
                let exact = cdf(model, r, &q()).unwrap();
                assert_abs_diff_eq!(fast.eval(r), exact, epsilon = 2e-6);
            }
        }
    }

    #[test]
    fn curve_serialization_and_validation() {
        let curve = CdfCurve::new(
            "midpoint",
            vec![(0.0, 0.0), (1.0, 0.375)],
            Provenance::ClosedForm,
        )
        .unwrap();
        assert_eq!(
            curve.to_csv(),
            "r,value\n0.0000000000000000e0,0.0000000000000000e0\n1.0000000000000000e0,3.7500000000000000e-1\n"
        );
        let parsed: serde_json::Value = serde_json::from_str(&curve.to_json()).unwrap();
        assert_eq!(parsed["model"], "midpoint");
        assert_eq!(parsed["provenance"], "closed-form");
        assert_eq!(parsed["points"][1][1], 0.375);

        assert!(CdfCurve::new("x", vec![(0.0, 0.5), (1.0, 0.2)], Provenance::Empirical).is_err());
        assert!(CdfCurve::new("x", vec![(1.0, 0.0), (1.0, 0.5)], Provenance::Empirical).is_err());
        assert!(CdfCurve::new("x", vec![(0.0, 1.5)], Provenance::Empirical).is_err());
    }

    #[test]
    fn model_parsing_round_trips() {
        for m in Model::ALL {
            assert_eq!(m.name().parse::<Model>().unwrap(), m);
        }
        assert!("disk".parse::<Model>().is_err());
    }
}
