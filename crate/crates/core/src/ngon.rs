//! Diagonal intersections of the regular n-gon.
//!
//! Vertex k sits at angle 2πk/n on the unit circumcircle. Every 4-subset
//! a < b < c < d of vertices spans three chord pairings; exactly one of them,
//! (a,c)×(b,d), crosses inside the polygon, which makes intersection counting
//! with multiplicity a direct enumeration of 4-subsets.
//!
//! The chord through vertices i and j has signed foot distance cos(π(j−i)/n)
//! along direction π(i+j)/n, so per-quadruple distances reduce to a handful
//! of table lookups; the binning loop allocates nothing. Two chords are
//! parallel exactly when i+j ≡ k+l (mod n) — an integer predicate, because
//! regular polygons have genuinely parallel chord families that floating
//! tests would near-miss.

use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NgonError {
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error(
        "dedup inconclusive: clusters {dist:e} apart with snap tolerance {snap_tol:e} (within 10x)"
    )]
    AmbiguousDedup { dist: f64, snap_tol: f64 },
}

/// Counts of n-gon diagonal intersections per query radius.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NgonReport {
    pub n: u32,
    pub radii: Vec<f64>,
    /// I_n(r): crossing pairs whose intersection lies within each radius.
    pub with_multiplicity: Vec<u64>,
    /// I_n(1) = C(n, 4): every crossing pair meets inside the polygon.
    pub total_pairs: u64,
    /// Extended-lines variant: non-parallel pairings within each radius.
    pub lines: Vec<u64>,
    pub nonparallel_pairs: u64,
    pub parallel_pairs: u64,
    pub distinct_interior: Option<u64>,
    pub pr_formula_value: Option<i128>,
}

impl NgonReport {
    pub fn to_json(&self) -> String {
        let pr = match self.pr_formula_value {
            Some(v) => match i64::try_from(v) {
                Ok(small) => serde_json::json!(small),
                Err(_) => serde_json::json!(v.to_string()),
            },
            None => serde_json::Value::Null,
        };
        serde_json::json!({
            "n": self.n,
            "radii": self.radii,
            "with_multiplicity": self.with_multiplicity,
            "lines": self.lines,
            "parallel_pairs": self.parallel_pairs,
            "distinct_interior": self.distinct_interior,
            "pr_formula_value": pr,
        })
        .to_string()
    }
}

/// C(n, 4).
fn binom4(n: u64) -> u64 {
    n * (n - 1) * (n - 2) * (n - 3) / 24
}

/// cos(πk/n) and r²·sin²(πk/n) lookup tables for k in [0, 2n).
struct ChordTables {
    cos: Vec<f64>,
    sin2: Vec<f64>,
}

impl ChordTables {
    fn new(n: usize) -> Self {
        let mut cos = Vec::with_capacity(2 * n);
        let mut sin2 = Vec::with_capacity(2 * n);
        for k in 0..2 * n {
            let (s, c) = (PI * k as f64 / n as f64).sin_cos();
            cos.push(c);
            sin2.push(s * s);
        }
        Self { cos, sin2 }
    }

    /// Flat [k][i] thresholds: distance ≤ radii[i] iff the squared chord
    /// numerator is at most radii[i]²·sin²(πk/n).
    fn thresholds(&self, radii: &[f64]) -> Vec<f64> {
        let m = radii.len();
        let mut t = Vec::with_capacity(self.sin2.len() * m);
        for &s2 in &self.sin2 {
            for &r in radii {
                t.push(r * r * s2);
            }
        }
        t
    }
}

fn validate_radii(radii: &[f64], max: f64) -> Result<(), NgonError> {
    for w in radii.windows(2) {
        if !(w[1] > w[0]) {
            return Err(NgonError::Domain("radii must be strictly ascending".into()));
        }
    }
    if radii.iter().any(|&r| !(0.0..=max).contains(&r)) {
        return Err(NgonError::Domain(format!("radii must lie in [0, {max}]")));
    }
    Ok(())
}

/// Counts crossing-pair intersections within each radius (I_n with
/// multiplicity), enumerating all C(n,4) quadruples in parallel.
pub fn count_with_multiplicity(n: u32, radii: &[f64]) -> Result<NgonReport, NgonError> {
    if n < 4 {
        return Err(NgonError::Domain(format!("need n >= 4, got {n}")));
    }
    validate_radii(radii, 1.0)?;
    let nn = n as usize;
    let m = radii.len();
    let tables = ChordTables::new(nn);
    let thresh = tables.thresholds(radii);
    let cos = &tables.cos;

    let counts = (0..nn.saturating_sub(3))
        .into_par_iter()
        .fold(
            || vec![0u64; m],
            |mut acc, a| {
                for b in a + 1..nn - 2 {
                    let k_start = b - a + 1; // (b+d) − (a+c) at d = c+1
                    for c in b + 1..nn - 1 {
                        let l1 = cos[c - a];
                        let l1sq = l1 * l1;
                        let two_l1 = 2.0 * l1;
                        let len = nn - (c + 1);
                        let l2s = &cos[c + 1 - b..c + 1 - b + len];
                        let cos_ks = &cos[k_start..k_start + len];
                        let rows = &thresh[k_start * m..(k_start + len) * m];
                        for (j, (&l2, &ck)) in l2s.iter().zip(cos_ks).enumerate() {
                            let out = l1sq + l2 * l2 - two_l1 * l2 * ck;
                            let row = &rows[j * m..j * m + m];
                            for (i, &t) in row.iter().enumerate() {
                                acc[i] += (out <= t) as u64;
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; m],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            },
        );

    Ok(NgonReport {
        n,
        radii: radii.to_vec(),
        with_multiplicity: counts,
        total_pairs: binom4(n as u64),
        ..NgonReport::default()
    })
}

/// Extended-lines variant: all three pairings of every quadruple, with the
/// exact mod-n predicate excluding (and counting) parallel pairings.
pub fn lines_histogram(n: u32, radii: &[f64]) -> Result<NgonReport, NgonError> {
    if n < 4 {
        return Err(NgonError::Domain(format!("need n >= 4, got {n}")));
    }
    validate_radii(radii, f64::INFINITY)?;
    let nn = n as usize;
    let m = radii.len();
    let tables = ChordTables::new(nn);
    let thresh = tables.thresholds(radii);
    let cos = &tables.cos;

    // acc layout: m per-radius counters then the parallel counter.
    let acc = (0..nn.saturating_sub(3))
        .into_par_iter()
        .fold(
            || vec![0u64; m + 1],
            |mut acc, a| {
                let bin = |acc: &mut [u64], l1: f64, l2: f64, k: usize| {
                    let out = l1 * l1 + l2 * l2 - 2.0 * l1 * l2 * cos[k];
                    let row = &thresh[k * m..k * m + m];
                    for (i, &t) in row.iter().enumerate() {
                        acc[i] += (out <= t) as u64;
                    }
                };
                for b in a + 1..nn - 2 {
                    for c in b + 1..nn - 1 {
                        for d in c + 1..nn {
                            // Crossing pairing (a,c)×(b,d): never parallel.
                            bin(&mut acc, cos[c - a], cos[d - b], b + d - a - c);

                            // (a,b)×(c,d): parallel iff the index difference
                            // reaches exactly n.
                            let k1 = c + d - a - b;
                            if k1 == nn {
                                acc[m] += 1;
                            } else {
                                bin(&mut acc, cos[b - a], cos[d - c], k1);
                            }

                            // (a,d)×(b,c): difference can be negative.
                            let delta = (b + c) as isize - (a + d) as isize;
                            if delta == 0 {
                                acc[m] += 1;
                            } else {
                                let k3 = delta.rem_euclid(2 * nn as isize) as usize;
                                bin(&mut acc, cos[d - a], cos[c - b], k3);
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; m + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            },
        );

    let parallel_pairs = acc[m];
    let total = 3 * binom4(n as u64);
    Ok(NgonReport {
        n,
        radii: radii.to_vec(),
        lines: acc[..m].to_vec(),
        total_pairs: binom4(n as u64),
        nonparallel_pairs: total - parallel_pairs,
        parallel_pairs,
        ..NgonReport::default()
    })
}

#[inline]
fn exact_div(x: i128, d: i128) -> i128 {
    debug_assert_eq!(x % d, 0, "{x} not divisible by {d}");
    x / d
}

/// Distinct intersection points of the diagonals of the regular n-gon, by
/// the Poonen–Rubinstein divisibility formula, in exact integer arithmetic.
pub fn poonen_rubinstein(n: u32) -> Result<i128, NgonError> {
    if n < 3 {
        return Err(NgonError::Domain(format!("need n >= 3, got {n}")));
    }
    let n = n as i128;
    let mut total = exact_div(n * (n - 1) * (n - 2) * (n - 3), 24);
    if n % 2 == 0 {
        total -= exact_div(5 * n * n * n - 45 * n * n + 70 * n - 24, 24);
    }
    if n % 4 == 0 {
        total -= exact_div(3 * n, 2);
    }
    if n % 6 == 0 {
        total -= exact_div(45 * n * n - 262 * n, 6);
    }
    if n % 12 == 0 {
        total += 42 * n;
    }
    if n % 18 == 0 {
        total += 60 * n;
    }
    if n % 24 == 0 {
        total += 35 * n;
    }
    if n % 30 == 0 {
        total -= 38 * n;
    }
    if n % 42 == 0 {
        total -= 82 * n;
    }
    if n % 60 == 0 {
        total -= 330 * n;
    }
    if n % 84 == 0 {
        total -= 144 * n;
    }
    if n % 90 == 0 {
        total -= 96 * n;
    }
    if n % 120 == 0 {
        total -= 144 * n;
    }
    if n % 210 == 0 {
        total -= 96 * n;
    }
    Ok(total)
}

/// Intersection of the chords p1–p2 and p3–p4 (caller guarantees crossing).
#[inline]
fn chord_intersection(
    p1: (f64, f64),
    p2: (f64, f64),
    p3: (f64, f64),
    p4: (f64, f64),
) -> (f64, f64) {
    let (dx1, dy1) = (p2.0 - p1.0, p2.1 - p1.1);
    let (dx2, dy2) = (p4.0 - p3.0, p4.1 - p3.1);
    let den = dx1 * dy2 - dy1 * dx2;
    let t = ((p3.0 - p1.0) * dy2 - (p3.1 - p1.1) * dx2) / den;
    (p1.0 + t * dx1, p1.1 + t * dy1)
}

/// Distinct interior intersection points, by coordinate snapping.
///
/// Points are merged when closer than `snap_tol`; if two surviving clusters
/// then sit within 10·snap_tol of each other, the tolerance cannot separate
/// noise from structure and the call fails rather than guessing.
pub fn distinct_count(n: u32, snap_tol: f64) -> Result<u64, NgonError> {
    if !(4..=120).contains(&n) {
        return Err(NgonError::Domain(format!(
            "need 4 <= n <= 120 for dedup, got {n}"
        )));
    }
    if !(snap_tol > 0.0 && snap_tol.is_finite()) {
        return Err(NgonError::Domain("snap_tol must be positive".into()));
    }
    let nn = n as usize;
    let verts: Vec<(f64, f64)> = (0..nn)
        .map(|k| {
            let (s, c) = (TAU * k as f64 / nn as f64).sin_cos();
            (c, s)
        })
        .collect();

    // Representative point per occupied snap cell; merging scans the 3x3
    // neighborhood because a cluster may straddle a cell boundary.
    let mut cells: HashMap<(i64, i64), (f64, f64)> = HashMap::new();
    let tol2 = snap_tol * snap_tol;
    for a in 0..nn - 3 {
        for b in a + 1..nn - 2 {
            for c in b + 1..nn - 1 {
                for d in c + 1..nn {
                    let p = chord_intersection(verts[a], verts[c], verts[b], verts[d]);
                    let kx = (p.0 / snap_tol).round() as i64;
                    let ky = (p.1 / snap_tol).round() as i64;
                    let mut merged = false;
                    'scan: for dx in -1..=1 {
                        for dy in -1..=1 {
                            if let Some(&(qx, qy)) = cells.get(&(kx + dx, ky + dy)) {
                                let d2 = (qx - p.0) * (qx - p.0) + (qy - p.1) * (qy - p.1);
                                if d2 < tol2 {
                                    merged = true;
                                    break 'scan;
                                }
                            }
                        }
                    }
                    if !merged {
                        cells.insert((kx, ky), p);
                    }
                }
            }
        }
    }

    // Representatives are pairwise >= snap_tol apart by construction; any
    // pair closer than 10·snap_tol is therefore in the ambiguous band.
    let coarse_pitch = 10.0 * snap_tol;
    let mut coarse: HashMap<(i64, i64), Vec<(f64, f64)>> = HashMap::new();
    for &(x, y) in cells.values() {
        let kx = (x / coarse_pitch).round() as i64;
        let ky = (y / coarse_pitch).round() as i64;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = coarse.get(&(kx + dx, ky + dy)) {
                    for &(qx, qy) in list {
                        let dist = ((qx - x) * (qx - x) + (qy - y) * (qy - y)).sqrt();
                        if dist < coarse_pitch {
                            return Err(NgonError::AmbiguousDedup { dist, snap_tol });
                        }
                    }
                }
            }
        }
        coarse.entry((kx, ky)).or_default().push((x, y));
    }

    Ok(cells.len() as u64)
}

/// I_n(r)/I_n(1): the in-disk proportion of crossing-pair intersections.
pub fn karamata_ratio(n: u32, r: f64) -> Result<f64, NgonError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(NgonError::Domain(format!("need r in [0, 1], got {r}")));
    }
    let report = count_with_multiplicity(n, &[r])?;
    Ok(report.with_multiplicity[0] as f64 / report.total_pairs as f64)
}
