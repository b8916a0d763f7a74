//! Radial measures and the rotationally invariant line laws they induce.
//!
//! A line that misses the origin is parametrized by its foot: the closest
//! point to the origin, written in polar form (ℓ, θ) with ℓ ≥ 0 and
//! θ ∈ [0, 2π). Drawing ℓ from a probability measure on [0, ∞) and θ
//! independently and uniformly yields a rotationally invariant random line;
//! every rotationally invariant line law arises this way.
//!
//! Four radial measures are built in, plus tabulated custom CDFs loaded from
//! CSV (`t,F` header, strictly increasing `t`, nondecreasing `F` ending at 1).

use rand::Rng;
use std::f64::consts::{PI, TAU};
use std::io::BufRead;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("invalid tabulated cdf: {0}")]
    InvalidTable(String),
    #[error("tabulated cdf row {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error reading measure file: {0}")]
    Io(#[from] std::io::Error),
    #[error("chord endpoints coincide (phi1 = phi2 mod 2π)")]
    DegenerateChord,
}

/// Wraps an angle into [0, 2π).
pub fn normalize_angle(a: f64) -> f64 {
    let m = a.rem_euclid(TAU);
    if m >= TAU {
        0.0
    } else {
        m
    }
}

/// A line encoded by the polar coordinates of its foot.
///
/// The line with foot (ℓ cos θ, ℓ sin θ) is {(x, y) : x cos θ + y sin θ = ℓ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarLine {
    /// Distance from the line to the origin; nonnegative.
    pub dist: f64,
    /// Direction of the foot, in [0, 2π).
    pub foot_angle: f64,
}

impl PolarLine {
    /// Builds a line, normalizing the angle. Panics on a negative or
    /// non-finite distance, which is always a caller bug.
    pub fn new(dist: f64, foot_angle: f64) -> Self {
        assert!(
            dist >= 0.0 && dist.is_finite(),
            "line distance must be finite and nonnegative, got {dist}"
        );
        Self {
            dist,
            foot_angle: normalize_angle(foot_angle),
        }
    }

    /// Cartesian coordinates of the foot.
    pub fn foot(&self) -> (f64, f64) {
        (
            self.dist * self.foot_angle.cos(),
            self.dist * self.foot_angle.sin(),
        )
    }

    /// |x cos θ + y sin θ − ℓ|: zero iff (x, y) lies on the line.
    pub fn residual(&self, x: f64, y: f64) -> f64 {
        (x * self.foot_angle.cos() + y * self.foot_angle.sin() - self.dist).abs()
    }
}

/// Identifiers for the four built-in radial measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinMeasure {
    /// F(r) = r on [0, 1]: chord distance uniform.
    UniformRadius,
    /// F(r) = r² on [0, 1]: chord midpoint uniform on the disk.
    UniformMidpoint,
    /// F(r) = (2/π) arcsin r on [0, 1]: chord endpoints uniform on the circle.
    UniformEndpoints,
    /// F(r) = 1 − e^{−r²/2} on [0, ∞): foot of a standard planar Gaussian.
    Rayleigh,
}

/// A probability measure on [0, ∞) describing the distance-to-origin law.
#[derive(Debug, Clone)]
pub enum RadialMeasure {
    UniformRadius,
    UniformMidpoint,
    UniformEndpoints,
    Rayleigh,
    Custom(TabulatedCdf),
}

/// Returns the built-in measure with the given name.
pub fn builtin(name: BuiltinMeasure) -> RadialMeasure {
    match name {
        BuiltinMeasure::UniformRadius => RadialMeasure::UniformRadius,
        BuiltinMeasure::UniformMidpoint => RadialMeasure::UniformMidpoint,
        BuiltinMeasure::UniformEndpoints => RadialMeasure::UniformEndpoints,
        BuiltinMeasure::Rayleigh => RadialMeasure::Rayleigh,
    }
}

impl RadialMeasure {
    pub fn name(&self) -> &'static str {
        match self {
            RadialMeasure::UniformRadius => "uniform-radius",
            RadialMeasure::UniformMidpoint => "uniform-midpoint",
            RadialMeasure::UniformEndpoints => "uniform-endpoints",
            RadialMeasure::Rayleigh => "rayleigh",
            RadialMeasure::Custom(_) => "custom",
        }
    }

    /// F(t) = μ([0, t]); clamped to [0, 1] outside the support. A tabulated
    /// measure may carry mass at t = 0, so zero is not short-circuited.
    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self {
            RadialMeasure::UniformRadius => t.min(1.0),
            RadialMeasure::UniformMidpoint => {
                let c = t.min(1.0);
                c * c
            }
            RadialMeasure::UniformEndpoints => 2.0 / PI * t.min(1.0).asin(),
            RadialMeasure::Rayleigh => -(-t * t / 2.0).exp_m1(),
            RadialMeasure::Custom(tab) => tab.cdf(t),
        }
    }

    /// F′(t) where the density exists; 0 outside the support. The endpoint
    /// density of `UniformEndpoints` diverges at t = 1 and evaluates to +∞.
    pub fn pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self {
            RadialMeasure::UniformRadius => {
                if t <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            RadialMeasure::UniformMidpoint => {
                if t <= 1.0 {
                    2.0 * t
                } else {
                    0.0
                }
            }
            RadialMeasure::UniformEndpoints => {
                if t < 1.0 {
                    2.0 / (PI * (1.0 - t * t).sqrt())
                } else if t == 1.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            RadialMeasure::Rayleigh => t * (-t * t / 2.0).exp(),
            RadialMeasure::Custom(tab) => tab.pdf(t),
        }
    }

    /// Quantile function on u ∈ [0, 1).
    pub fn inv_cdf(&self, u: f64) -> f64 {
        debug_assert!((0.0..1.0).contains(&u), "u must lie in [0,1), got {u}");
        match self {
            RadialMeasure::UniformRadius => u,
            RadialMeasure::UniformMidpoint => u.sqrt(),
            RadialMeasure::UniformEndpoints => (PI / 2.0 * u).sin(),
            RadialMeasure::Rayleigh => (-2.0 * (-u).ln_1p()).sqrt(),
            RadialMeasure::Custom(tab) => tab.inv_cdf(u),
        }
    }

    /// Upper end of the support (+∞ for the Rayleigh law).
    pub fn support_upper(&self) -> f64 {
        match self {
            RadialMeasure::Rayleigh => f64::INFINITY,
            RadialMeasure::Custom(tab) => *tab.ts.last().expect("table is nonempty"),
            _ => 1.0,
        }
    }
}

/// A CDF given as a table of (t, F) pairs, linearly interpolated.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    ts: Vec<f64>,
    fs: Vec<f64>,
}

impl TabulatedCdf {
    /// Validates and wraps a grid of (t, F(t)) points.
    pub fn from_points(points: Vec<(f64, f64)>) -> Result<Self, MeasureError> {
        if points.len() < 2 {
            return Err(MeasureError::InvalidTable("need at least two rows".into()));
        }
        let (ts, fs): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        if ts[0] < 0.0 {
            return Err(MeasureError::InvalidTable("t must be nonnegative".into()));
        }
        if ts[0] > 0.0 && fs[0] != 0.0 {
            return Err(MeasureError::InvalidTable(
                "table must start at F = 0 or at t = 0".into(),
            ));
        }
        for w in ts.windows(2) {
            if !(w[1] > w[0]) {
                return Err(MeasureError::InvalidTable(
                    "t must be strictly increasing".into(),
                ));
            }
        }
        for w in fs.windows(2) {
            if w[1] < w[0] {
                return Err(MeasureError::InvalidTable("F must be nondecreasing".into()));
            }
        }
        if fs.iter().any(|&f| !(0.0..=1.0).contains(&f)) {
            return Err(MeasureError::InvalidTable("F must lie in [0, 1]".into()));
        }
        let last = *fs.last().expect("nonempty");
        if (last - 1.0).abs() > 1e-12 {
            return Err(MeasureError::InvalidTable(format!(
                "last row must reach F = 1, got {last}"
            )));
        }
        Ok(Self { ts, fs })
    }

    /// Parses the `t,F` CSV interchange format.
    pub fn from_csv<R: BufRead>(reader: R) -> Result<Self, MeasureError> {
        let mut points = Vec::new();
        let mut lines = reader.lines().enumerate();
        match lines.next() {
            Some((_, Ok(header))) if header.trim() == "t,F" => {}
            Some((_, Ok(header))) => {
                return Err(MeasureError::Parse {
                    line: 1,
                    msg: format!("expected header 't,F', got '{header}'"),
                })
            }
            Some((_, Err(e))) => return Err(e.into()),
            None => {
                return Err(MeasureError::Parse {
                    line: 1,
                    msg: "empty file".into(),
                })
            }
        }
        for (idx, line) in lines {
            let line = line?;
            let row = line.trim();
            if row.is_empty() {
                continue;
            }
            let mut cols = row.split(',');
            let parse = |s: Option<&str>| -> Result<f64, MeasureError> {
                s.ok_or_else(|| MeasureError::Parse {
                    line: idx + 1,
                    msg: "expected two columns".into(),
                })?
                .trim()
                .parse()
                .map_err(|e| MeasureError::Parse {
                    line: idx + 1,
                    msg: format!("{e}"),
                })
            };
            let t = parse(cols.next())?;
            let f = parse(cols.next())?;
            if cols.next().is_some() {
                return Err(MeasureError::Parse {
                    line: idx + 1,
                    msg: "expected exactly two columns".into(),
                });
            }
            points.push((t, f));
        }
        Self::from_points(points)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self, MeasureError> {
        let file = std::fs::File::open(path)?;
        Self::from_csv(std::io::BufReader::new(file))
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= self.ts[0] {
            return if t == self.ts[0] { self.fs[0] } else { 0.0 };
        }
        if t >= *self.ts.last().expect("nonempty") {
            return 1.0;
        }
        let i = self.ts.partition_point(|&x| x <= t) - 1;
        let w = (t - self.ts[i]) / (self.ts[i + 1] - self.ts[i]);
        self.fs[i] + w * (self.fs[i + 1] - self.fs[i])
    }

    /// Slope of the interpolant in the cell containing `t`; 0 outside.
    pub fn pdf(&self, t: f64) -> f64 {
        if t < self.ts[0] || t > *self.ts.last().expect("nonempty") {
            return 0.0;
        }
        let i = self
            .ts
            .partition_point(|&x| x <= t)
            .clamp(1, self.ts.len() - 1)
            - 1;
        (self.fs[i + 1] - self.fs[i]) / (self.ts[i + 1] - self.ts[i])
    }

    pub fn inv_cdf(&self, u: f64) -> f64 {
        if u <= self.fs[0] {
            return self.ts[0];
        }
        if u >= 1.0 {
            return *self.ts.last().expect("nonempty");
        }
        // Leftmost cell whose upper value reaches u.
        let i = self.fs.partition_point(|&f| f < u).max(1) - 1;
        let df = self.fs[i + 1] - self.fs[i];
        if df == 0.0 {
            return self.ts[i + 1];
        }
        self.ts[i] + (u - self.fs[i]) / df * (self.ts[i + 1] - self.ts[i])
    }

    /// True when some cell rises by more than `jump_tol` over a span of at
    /// most `span_tol`: the tabulated law is effectively atomic there.
    pub fn has_jump(&self, span_tol: f64, jump_tol: f64) -> bool {
        self.ts
            .windows(2)
            .zip(self.fs.windows(2))
            .any(|(t, f)| t[1] - t[0] <= span_tol && f[1] - f[0] > jump_tol)
    }

    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ts.iter().copied().zip(self.fs.iter().copied())
    }
}

/// Draws one random line: dist by inverse-CDF from `m`, foot angle uniform.
///
/// The first uniform drives the distance, the second the angle. When the
/// measure has an atom at zero the drawn line passes through the origin and
/// the uniform angle picks its direction.
pub fn sample_line<R: Rng + ?Sized>(m: &RadialMeasure, rng: &mut R) -> PolarLine {
    let u_dist: f64 = rng.random();
    let u_angle: f64 = rng.random();
    line_from_uniforms(m, u_dist, u_angle)
}

/// Deterministic core of [`sample_line`], exposed for exactness tests.
pub fn line_from_uniforms(m: &RadialMeasure, u_dist: f64, u_angle: f64) -> PolarLine {
    PolarLine::new(m.inv_cdf(u_dist), TAU * u_angle)
}

/// The chord of the unit circle with endpoints at angles `phi1` and `phi2`.
///
/// Its foot is the chord midpoint: distance |cos((φ1−φ2)/2)| in the bisector
/// direction (φ1+φ2)/2, flipped by π when the half-angle cosine is negative.
pub fn chord_from_endpoints(phi1: f64, phi2: f64) -> Result<PolarLine, MeasureError> {
    if (phi1 - phi2).rem_euclid(TAU) == 0.0 {
        return Err(MeasureError::DegenerateChord);
    }
    let c = (0.5 * (phi1 - phi2)).cos();
    let bisector = 0.5 * (phi1 + phi2);
    if c >= 0.0 {
        Ok(PolarLine::new(c, bisector))
    } else {
        Ok(PolarLine::new(-c, bisector + PI))
    }
}
