//! Special functions used by the closed-form distributions.
//!
//! Everything here is evaluated from its defining series with an explicit
//! truncation-error bound:
//!
//! * `li2`: the dilogarithm Li2(x) = Σ x^k/k², for x in [0, 1],
//! * `bessel_i0`: the modified Bessel function I0(x) = Σ (x²/4)^k/(k!)²,
//! * `asin_sq`: (arcsin x)² = ½ Σ (2x)^{2n} / (n² C(2n,n)),
//! * `wallis_even`: ∫₀¹ x^{2n}/√(1−x²) dx = (π/2)·C(2n,n)/4ⁿ.
//!
//! A reported value is within [`SeriesConfig::tolerance`] of the full series
//! sum; when the bound cannot be certified within
//! [`SeriesConfig::max_terms`] terms the functions return
//! [`SpecFunError::NoConvergence`] instead of a silently degraded value.

use std::f64::consts::PI;
use thiserror::Error;

/// Truncation policy for the series in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    /// Absolute truncation tolerance; must be positive.
    pub tolerance: f64,
    /// Hard cap on the number of summed terms; must be at least 1.
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-14,
            max_terms: 1_000_000,
        }
    }
}

impl SeriesConfig {
    fn validate(&self) -> Result<(), SpecFunError> {
        if !(self.tolerance > 0.0) {
            return Err(SpecFunError::BadConfig("tolerance must be positive"));
        }
        if self.max_terms == 0 {
            return Err(SpecFunError::BadConfig("max_terms must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("argument {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },
    #[error("series did not converge within {max_terms} terms (tail bound {tail_bound:e})")]
    NoConvergence { max_terms: usize, tail_bound: f64 },
    #[error("invalid series configuration: {0}")]
    BadConfig(&'static str),
}

/// Dilogarithm Li2(x) = Σ_{k≥1} x^k/k² on [0, 1].
///
/// For x > 1/2 the series converges too slowly for an absolute cutoff, so the
/// reflection Li2(x) + Li2(1−x) = π²/6 − log(x)·log(1−x) moves the evaluation
/// to [0, 1/2], where the geometric tail bound certifies the tolerance.
pub fn li2(x: f64, cfg: SeriesConfig) -> Result<f64, SpecFunError> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&x) {
        return Err(SpecFunError::Domain {
            value: x,
            domain: "[0, 1]",
        });
    }
    if x == 1.0 {
        // Boundary value; the reflection degenerates to log(1)·log(0) there.
        return Ok(PI * PI / 6.0);
    }
    if x > 0.5 {
        let y = 1.0 - x;
        return Ok(PI * PI / 6.0 - x.ln() * y.ln() - li2_series(y, cfg)?);
    }
    li2_series(x, cfg)
}

/// Series sum of Li2 on [0, 1/2]; the tail after the k-th term is bounded by
/// x^{k+1}/(k+1)²/(1−x).
fn li2_series(x: f64, cfg: SeriesConfig) -> Result<f64, SpecFunError> {
    debug_assert!((0.0..=0.5).contains(&x));
    let mut sum = 0.0;
    let mut pow = x; // x^k
    let mut tail = f64::INFINITY;
    for k in 1..=cfg.max_terms {
        sum += pow / ((k * k) as f64);
        pow *= x;
        let next = k + 1;
        tail = pow / ((next * next) as f64) / (1.0 - x);
        if tail <= cfg.tolerance {
            return Ok(sum);
        }
    }
    Err(SpecFunError::NoConvergence {
        max_terms: cfg.max_terms,
        tail_bound: tail,
    })
}

/// Modified Bessel function of the first kind, I0(x) = Σ (x²/4)^k/(k!)².
pub fn bessel_i0(x: f64, cfg: SeriesConfig) -> Result<f64, SpecFunError> {
    cfg.validate()?;
    if x < 0.0 {
        return Err(SpecFunError::Domain {
            value: x,
            domain: "[0, ∞)",
        });
    }
    let q = x * x / 4.0;
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut tail = f64::INFINITY;
    for k in 1..=cfg.max_terms {
        term *= q / ((k * k) as f64);
        sum += term;
        // Terms decay faster than geometrically once q/(k+1)² < 1.
        let ratio = q / (((k + 1) * (k + 1)) as f64);
        if ratio < 1.0 {
            tail = term * ratio / (1.0 - ratio);
            if tail <= cfg.tolerance {
                return Ok(sum);
            }
        }
    }
    Err(SpecFunError::NoConvergence {
        max_terms: cfg.max_terms,
        tail_bound: tail,
    })
}

/// Exponentially scaled Bessel function, e^{−x}·I0(x).
///
/// The plain product overflows near x ≈ 709; past x = 50 the standard
/// large-argument expansion of e^{−x}I0(x) is already accurate to machine
/// precision, so that form takes over.
pub fn bessel_i0_scaled(x: f64, cfg: SeriesConfig) -> Result<f64, SpecFunError> {
    cfg.validate()?;
    if x < 0.0 {
        return Err(SpecFunError::Domain {
            value: x,
            domain: "[0, ∞)",
        });
    }
    if x <= 50.0 {
        return Ok((-x).exp() * bessel_i0(x, cfg)?);
    }
    // e^{−x}I0(x) ~ (2πx)^{−1/2} Σ_k a_k with a_0 = 1, a_k = a_{k−1}·(2k−1)²/(8kx).
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 1..=cfg.max_terms {
        let kf = k as f64;
        let factor = (2.0 * kf - 1.0) * (2.0 * kf - 1.0) / (8.0 * kf * x);
        if factor >= 1.0 {
            // Asymptotic series started diverging before reaching tolerance.
            break;
        }
        term *= factor;
        sum += term;
        if term <= cfg.tolerance {
            return Ok(sum / (2.0 * PI * x).sqrt());
        }
    }
    Err(SpecFunError::NoConvergence {
        max_terms: cfg.max_terms,
        tail_bound: term,
    })
}

/// (arcsin x)² via its Taylor series ½ Σ_{n≥1} (2x)^{2n}/(n² C(2n,n)).
///
/// At |x| = 1 the terms decay like n^{−3/2} and no absolute cutoff can be
/// certified; the Abel boundary value (π/2)² is returned directly.
pub fn asin_sq(x: f64, cfg: SeriesConfig) -> Result<f64, SpecFunError> {
    cfg.validate()?;
    if !(-1.0..=1.0).contains(&x) {
        return Err(SpecFunError::Domain {
            value: x,
            domain: "[-1, 1]",
        });
    }
    if x.abs() == 1.0 {
        return Ok(PI * PI / 4.0);
    }
    let z = 4.0 * x * x; // (2x)^{2n} = z^n
    let q = x * x; // limit of the term ratio, and an upper bound for it
    let mut sum = 0.0;
    let mut term = 0.5 * z / 2.0; // n = 1: ½·z/(1²·C(2,1))
    let mut tail = f64::INFINITY;
    for n in 1..=cfg.max_terms {
        sum += term;
        // term_{n+1}/term_n = z·n²/(2(n+1)(2n+1)) ≤ z/4 = x².
        let nf = n as f64;
        term *= z * nf * nf / (2.0 * (nf + 1.0) * (2.0 * nf + 1.0));
        tail = term / (1.0 - q);
        if tail <= cfg.tolerance {
            return Ok(sum);
        }
    }
    Err(SpecFunError::NoConvergence {
        max_terms: cfg.max_terms,
        tail_bound: tail,
    })
}

/// Even Wallis integral ∫₀¹ x^{2n}/√(1−x²) dx = (π/2)·C(2n,n)/4ⁿ.
///
/// The central-binomial ratio is accumulated multiplicatively as
/// ∏ (2j−1)/(2j), so no factorial ever overflows.
pub fn wallis_even(n: u32) -> f64 {
    let mut ratio = 1.0;
    for j in 1..=n {
        let jf = j as f64;
        ratio *= (2.0 * jf - 1.0) / (2.0 * jf);
    }
    PI / 2.0 * ratio
}
