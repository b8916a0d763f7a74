//! Deterministic, parallel Monte Carlo over random line pairs.
//!
//! Work is split into fixed-size streams of [`TRIALS_PER_STREAM`] trials.
//! Stream `s` draws from `ChaCha8` with the run's seed and stream index
//! `offset + s`, so the sample is a pure function of `(model, n, seed,
//! offset)` — identical for any thread count, and bitwise reproducible on a
//! fixed platform and build. Numerically parallel pairs are skipped, never
//! resampled, and counted in `parallel_skips`.

use crate::distribution::Model;
use crate::geometry;
use crate::measures::{self, RadialMeasure};
use crate::serialize::fmt_g17;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Trials handled by one RNG stream; the public batching contract.
pub const TRIALS_PER_STREAM: usize = 1 << 16;

/// Sorted intersection distances from one run.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    pub model: Model,
    pub seed: u64,
    /// Retained trials; equals `distances.len()`.
    pub count: usize,
    /// Ascending.
    pub distances: Vec<f64>,
    /// Trials discarded as numerically parallel.
    pub parallel_skips: u64,
}

impl EmpiricalSample {
    /// Single-column CSV of the sorted distances.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r\n");
        for &d in &self.distances {
            out.push_str(&fmt_g17(d));
            out.push('\n');
        }
        out
    }

    /// Fraction of retained distances strictly greater than `r`.
    pub fn tail_prob(&self, r: f64) -> f64 {
        let below = self.distances.partition_point(|&d| d <= r);
        (self.count - below) as f64 / self.count as f64
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One trial: `None` when the drawn pair was numerically parallel.
fn trial(model: Model, measure: &RadialMeasure, rng: &mut ChaCha8Rng) -> Option<f64> {
    let (l1, l2) = match model {
        Model::UniformEndpoints => {
            // Four independent uniform points on the circle, one chord each.
            let p1 = rng.random::<f64>() * TAU;
            let p2 = rng.random::<f64>() * TAU;
            let p3 = rng.random::<f64>() * TAU;
            let p4 = rng.random::<f64>() * TAU;
            let l1 = measures::chord_from_endpoints(p1, p2).ok()?;
            let l2 = measures::chord_from_endpoints(p3, p4).ok()?;
            (l1, l2)
        }
        _ => (
            measures::sample_line(measure, rng),
            measures::sample_line(measure, rng),
        ),
    };
    geometry::distance_only(&l1, &l2).ok()
}

/// Runs `n` trials with stream indices starting at `stream_offset`.
pub fn run_mc_offset(model: Model, n: usize, seed: u64, stream_offset: u64) -> EmpiricalSample {
    assert!(n >= 1, "need at least one trial");
    let measure = model.measure();
    let streams = n.div_ceil(TRIALS_PER_STREAM);
    let chunks: Vec<(Vec<f64>, u64)> = (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, stream_offset + s as u64);
            let count = TRIALS_PER_STREAM.min(n - s * TRIALS_PER_STREAM);
            let mut dists = Vec::with_capacity(count);
            let mut skips = 0u64;
            for _ in 0..count {
                match trial(model, &measure, &mut rng) {
                    Some(d) => dists.push(d),
                    None => skips += 1,
                }
            }
            (dists, skips)
        })
        .collect();

    let mut distances = Vec::with_capacity(n);
    let mut parallel_skips = 0;
    for (d, s) in chunks {
        distances.extend_from_slice(&d);
        parallel_skips += s;
    }
    distances.sort_unstable_by(f64::total_cmp);
    EmpiricalSample {
        model,
        seed,
        count: distances.len(),
        distances,
        parallel_skips,
    }
}

/// Runs `n` trials at stream offset 0.
pub fn run_mc(model: Model, n: usize, seed: u64) -> EmpiricalSample {
    run_mc_offset(model, n, seed, 0)
}

/// Two-sided Kolmogorov–Smirnov statistic of the sample against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &EmpiricalSample, cdf: F) -> f64 {
    assert!(sample.count > 0, "sample must be nonempty");
    let n = sample.count as f64;
    sample
        .distances
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// One row of a tail scan: P(ℓ > r) and its r-scaled value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPoint {
    pub r: f64,
    pub tail_prob: f64,
    pub scaled: f64,
}

/// Empirical tail probabilities at the requested radii.
pub fn tail_probe(sample: &EmpiricalSample, r_values: &[f64]) -> Vec<TailPoint> {
    r_values
        .iter()
        .map(|&r| {
            let p = sample.tail_prob(r);
            TailPoint {
                r,
                tail_prob: p,
                scaled: r * p,
            }
        })
        .collect()
}

/// Streaming alternative for runs too large to keep in memory: distances are
/// folded into a fixed log-spaced histogram as they are produced.
#[derive(Debug, Clone, PartialEq)]
pub struct McHistogram {
    pub model: Model,
    pub seed: u64,
    pub count: u64,
    pub parallel_skips: u64,
    /// Distances below `HIST_R_MIN`.
    pub underflow: u64,
    /// Distances at or above `HIST_R_MAX`.
    pub overflow: u64,
    /// Counts per log-spaced bin.
    pub counts: Vec<u64>,
}

pub const HIST_BINS: usize = 10_000;
pub const HIST_R_MIN: f64 = 1e-6;
pub const HIST_R_MAX: f64 = 1e6;

impl McHistogram {
    /// Lower edge of bin `i`.
    pub fn bin_lo(i: usize) -> f64 {
        let step = (HIST_R_MAX / HIST_R_MIN).ln() / HIST_BINS as f64;
        HIST_R_MIN * (step * i as f64).exp()
    }

    fn bin_of(d: f64) -> Option<usize> {
        if !(HIST_R_MIN..HIST_R_MAX).contains(&d) {
            return None;
        }
        let step = (HIST_R_MAX / HIST_R_MIN).ln() / HIST_BINS as f64;
        Some((((d / HIST_R_MIN).ln() / step) as usize).min(HIST_BINS - 1))
    }

    pub fn to_json(&self) -> String {
        let bins: Vec<serde_json::Value> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| serde_json::json!([Self::bin_lo(i), Self::bin_lo(i + 1), c]))
            .collect();
        serde_json::json!({
            "model": self.model.name(),
            "seed": self.seed,
            "count": self.count,
            "parallel_skips": self.parallel_skips,
            "underflow": self.underflow,
            "overflow": self.overflow,
            "bins": bins,
        })
        .to_string()
    }
}

/// Histogram-mode run; same stream contract as [`run_mc_offset`].
pub fn run_mc_histogram(model: Model, n: usize, seed: u64) -> McHistogram {
    assert!(n >= 1, "need at least one trial");
    let measure = model.measure();
    let streams = n.div_ceil(TRIALS_PER_STREAM);
    let merged = (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, s as u64);
            let count = TRIALS_PER_STREAM.min(n - s * TRIALS_PER_STREAM);
            let mut h = McHistogram {
                model,
                seed,
                count: 0,
                parallel_skips: 0,
                underflow: 0,
                overflow: 0,
                counts: vec![0; HIST_BINS],
            };
            for _ in 0..count {
                match trial(model, &measure, &mut rng) {
                    Some(d) => {
                        h.count += 1;
                        match McHistogram::bin_of(d) {
                            Some(b) => h.counts[b] += 1,
                            None if d < HIST_R_MIN => h.underflow += 1,
                            None => h.overflow += 1,
                        }
                    }
                    None => h.parallel_skips += 1,
                }
            }
            h
        })
        .reduce_with(|mut a, b| {
            a.count += b.count;
            a.parallel_skips += b.parallel_skips;
            a.underflow += b.underflow;
            a.overflow += b.overflow;
            for (x, y) in a.counts.iter_mut().zip(&b.counts) {
                *x += y;
            }
            a
        })
        .expect("at least one stream");
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{self, ModelCdf, QuadratureSpec};
    use crate::measures::sample_line;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_trial_is_deterministic() {
        let a = run_mc(Model::UniformEndpoints, 1, 42);
        let b = run_mc(Model::UniformEndpoints, 1, 42);
        assert_eq!(a, b);
        assert_eq!(a.count + a.parallel_skips as usize, 1);
    }

    #[test]
    fn same_seed_same_sample_and_skips_are_rare() {
        let a = run_mc(Model::Gaussian, 200_000, 7);
        let b = run_mc(Model::Gaussian, 200_000, 7);
        assert_eq!(a, b);
        assert_eq!(a.parallel_skips, 0);
        assert_eq!(a.count, 200_000);
        assert!(a.distances.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn ks_of_perfect_quantile_sample() {
        // Points at the (i−0.5)/n quantiles of the uniform law on [0, 1].
        let n = 1000;
        let distances: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let sample = EmpiricalSample {
            model: Model::UniformRadius,
            seed: 0,
            count: n,
            distances,
            parallel_skips: 0,
        };
        let d = ks_statistic(&sample, |x| x);
        assert_abs_diff_eq!(d, 0.5 / n as f64, epsilon = 1e-12);
    }

    #[test]
    fn ks_against_own_empirical_cdf() {
        let sample = run_mc(Model::UniformRadius, 10_000, 3);
        let dists = sample.distances.clone();
        let ecdf = move |x: f64| dists.partition_point(|&d| d <= x) as f64 / 10_000.0;
        assert!(ks_statistic(&sample, ecdf) <= 1.0 / sample.count as f64 + 1e-12);
    }

    #[test]
    fn ks_against_closed_forms_at_one_million() {
        let q = QuadratureSpec::default();
        for model in [Model::UniformRadius, Model::UniformMidpoint] {
            let sample = run_mc(model, 1_000_000, 11);
            let cdf = ModelCdf::new(model, 1.0, &q).unwrap();
            let d = ks_statistic(&sample, |r| cdf.eval(r));
            assert!(d <= 0.005, "{model}: D = {d}");
        }
    }

    #[test]
    fn endpoints_sample_matches_dilog_cdf() {
        let q = QuadratureSpec::default();
        let sample = run_mc(Model::UniformEndpoints, 1_000_000, 5);
        let r_max = *sample.distances.last().unwrap();
        let cdf = ModelCdf::new(Model::UniformEndpoints, r_max, &q).unwrap();
        let d = ks_statistic(&sample, |r| cdf.eval(r));
        assert!(d <= 0.005, "D = {d}");
    }

    #[test]
    fn thread_partitioning_does_not_change_results() {
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_mc(Model::UniformMidpoint, 300_000, 99));
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_mc(Model::UniformMidpoint, 300_000, 99));
        assert_eq!(single, multi);
    }

    #[test]
    fn disjoint_streams_are_ks_compatible() {
        let n = 100_000;
        let a = run_mc_offset(Model::UniformEndpoints, n, 21, 0);
        let b = run_mc_offset(Model::UniformEndpoints, n, 21, 1 << 20);
        assert_ne!(a.distances, b.distances);
        // Two-sample KS between the runs.
        let bd = b.distances.clone();
        let ecdf_b = move |x: f64| bd.partition_point(|&d| d <= x) as f64 / n as f64;
        let d = ks_statistic(&a, ecdf_b);
        assert!(d <= 3.0 / (n as f64).sqrt(), "two-sample D = {d}");
    }

    #[test]
    fn distance_dominates_both_feet() {
        let measure = Model::Gaussian.measure();
        let mut rng = stream_rng(17, 0);
        for _ in 0..1000 {
            let l1 = sample_line(&measure, &mut rng);
            let l2 = sample_line(&measure, &mut rng);
            if let Ok(d) = geometry::distance_only(&l1, &l2) {
                assert!(d >= l1.dist.max(l2.dist) - 1e-12);
            }
        }
    }

    #[test]
    fn endpoints_sample_mean_reflects_divergent_expectation() {
        let sample = run_mc(Model::UniformEndpoints, 1_000_000, 13);
        let mean = sample.distances.iter().sum::<f64>() / sample.count as f64;
        assert!(mean > 2.0, "mean = {mean}");
    }

    #[test]
    fn tail_probe_edges_and_scaling() {
        let sample = run_mc(Model::UniformEndpoints, 1_000_000, 29);
        let probes = tail_probe(&sample, &[0.0, 20.0, 1e12]);
        assert_eq!(probes[0].tail_prob, 1.0);
        assert_eq!(probes[2].tail_prob, 0.0);
        let c = 16.0 / std::f64::consts::PI.powi(3);
        assert!(
            (probes[1].scaled - c).abs() / c <= 0.15,
            "scaled tail {} vs {c}",
            probes[1].scaled
        );
    }

    #[test]
    fn histogram_mode_agrees_with_exact_counts() {
        let n = 200_000;
        let sample = run_mc(Model::Gaussian, n, 55);
        let hist = run_mc_histogram(Model::Gaussian, n, 55);
        assert_eq!(hist.count as usize, sample.count);
        let total: u64 = hist.counts.iter().sum::<u64>() + hist.underflow + hist.overflow;
        assert_eq!(total, hist.count);
        // Counts below a bin edge match the exact sample.
        for r in [0.5, 1.0, 4.0] {
            let bin = (r / HIST_R_MIN).ln() / ((HIST_R_MAX / HIST_R_MIN).ln() / HIST_BINS as f64);
            let edge = McHistogram::bin_lo(bin.ceil() as usize);
            let from_hist: u64 =
                hist.underflow + hist.counts[..bin.ceil() as usize].iter().sum::<u64>();
            let from_sample = sample.distances.partition_point(|&d| d < edge) as u64;
            assert_eq!(from_hist, from_sample);
        }
        let parsed: serde_json::Value = serde_json::from_str(&hist.to_json()).unwrap();
        assert_eq!(parsed["model"], "gaussian");
        assert_eq!(parsed["count"], n as u64);
    }

    #[test]
    fn empirical_cdf_close_to_gaussian_closed_form() {
        let sample = run_mc(Model::Gaussian, 1_000_000, 61);
        let d = ks_statistic(&sample, |r| {
            distribution::cdf_gaussian(r).expect("valid radius")
        });
        assert!(d <= 0.005, "D = {d}");
    }

    #[test]
    fn sample_csv_format() {
        let sample = EmpiricalSample {
            model: Model::UniformRadius,
            seed: 1,
            count: 2,
            distances: vec![0.5, 1.5],
            parallel_skips: 0,
        };
        assert_eq!(
            sample.to_csv(),
            "r\n5.0000000000000000e-1\n1.5000000000000000e0\n"
        );
    }
}
