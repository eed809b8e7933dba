//! Single-particle detection events drawn from a screen density, and the
//! cumulative build-up of the pattern.
//!
//! Event `i` of a run with seed `s` depends only on `(s, i)`: its uniform
//! variate is word `2i` of the ChaCha8 stream seeded with `s`. Chunks of the
//! event sequence can therefore be generated in parallel and still come out
//! bit-identical, and every run is a prefix of any longer run.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::IntensityProfile;
use crate::scalar::Real;

const CHUNK: usize = 4096;
const BLUR_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionEvent<T> {
    pub x: T,
    pub sequence_index: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildUp<T> {
    pub seed: u64,
    pub checkpoints: Vec<usize>,
    /// Cumulative counts per bin at each checkpoint.
    pub histograms: Vec<Vec<u64>>,
    pub bin_edges: Vec<T>,
}

/// Inverse CDF of the piecewise-linear interpolant of a profile. Kept in
/// `f64` regardless of the profile scalar so long grids do not lose mass.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    x0: f64,
    x1: f64,
    dx: f64,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl InverseCdf {
    pub fn new<T: Real>(profile: &IntensityProfile<T>) -> Result<Self> {
        let tolerance = 1e-9f64.max(1e3 * T::epsilon().to_f64_lossy());
        let total = profile.integral().to_f64_lossy();
        if !profile.normalized || (total - 1.0).abs() > tolerance {
            return Err(Error::pre(format!("profile must be normalized (integral is {total})")));
        }
        let values: Vec<f64> = profile.values.iter().map(|v| v.to_f64_lossy()).collect();
        let dx = profile.spacing().to_f64_lossy();
        let mut cumulative = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in values.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * dx;
            cumulative.push(acc);
        }
        Ok(Self { x0: profile.grid.first().to_f64_lossy(), x1: profile.grid.last().to_f64_lossy(), dx, values, cumulative })
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().expect("non-empty")
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.values.len();
        let t = (x - self.x0) / self.dx;
        if t <= 0.0 {
            return 0.0;
        }
        if t >= (n - 1) as f64 {
            return 1.0;
        }
        let i = (t.floor() as usize).min(n - 2);
        let s = t - i as f64;
        let (a, b) = (self.values[i], self.values[i + 1]);
        (self.cumulative[i] + self.dx * (a * s + 0.5 * (b - a) * s * s)) / self.total()
    }

    /// Exact inverse of [`Self::cdf`] for `u ∈ [0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let target = u.clamp(0.0, 1.0) * self.total();
        let n = self.values.len();
        // first bin whose upper cumulative value reaches the target
        let j = self.cumulative.partition_point(|c| *c < target).clamp(1, n - 1) - 1;
        let r = target - self.cumulative[j];
        let (a, b) = (self.values[j], self.values[j + 1]);
        // mass over fraction t of the bin: dx·(a t + (b − a) t²/2) = r
        let qa = 0.5 * (b - a) * self.dx;
        let qb = a * self.dx;
        let disc = (qb * qb + 4.0 * qa * r).max(0.0);
        let denom = qb + disc.sqrt();
        let t = if denom > 0.0 { (2.0 * r / denom).clamp(0.0, 1.0) } else { 0.0 };
        (self.x0 + (j as f64 + t) * self.dx).min(self.x1)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.x0, self.x1)
    }
}

fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn rng_at(seed: u64, stream: u64, word: u128) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(word);
    rng
}

/// Uniform variates `u_i` for `i ∈ [start, start + len)`.
fn uniforms(seed: u64, start: usize, len: usize) -> Vec<f64> {
    let mut rng = rng_at(seed, 0, 2 * start as u128);
    (0..len).map(|_| unit_interval(rng.next_u64())).collect()
}

/// Standard normal variates for the optional detector blur (Box–Muller on
/// a separate stream, two words per event).
fn normals(seed: u64, start: usize, len: usize) -> Vec<f64> {
    let mut rng = rng_at(seed, BLUR_STREAM, 4 * start as u128);
    (0..len)
        .map(|_| {
            let u1 = 1.0 - unit_interval(rng.next_u64());
            let u2 = unit_interval(rng.next_u64());
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
        .collect()
}

pub fn sample_hits<T: Real>(profile: &IntensityProfile<T>, n: usize, seed: u64) -> Result<Vec<DetectionEvent<T>>> {
    sample_hits_blurred(profile, n, seed, T::zero())
}

/// As [`sample_hits`], with each impact smeared by a Gaussian of standard
/// deviation `blur` and clamped to the profile support.
pub fn sample_hits_blurred<T: Real>(
    profile: &IntensityProfile<T>,
    n: usize,
    seed: u64,
    blur: T,
) -> Result<Vec<DetectionEvent<T>>> {
    if !(blur >= T::zero()) {
        return Err(Error::domain(format!("blur width must be >= 0, got {blur}")));
    }
    let inverse = InverseCdf::new(profile)?;
    let (lo, hi) = inverse.support();
    let blur = blur.to_f64_lossy();
    let chunks: Vec<(usize, usize)> = (0..n).step_by(CHUNK).map(|s| (s, CHUNK.min(n - s))).collect();
    let events = chunks
        .into_par_iter()
        .flat_map_iter(|(start, len)| {
            let u = uniforms(seed, start, len);
            let z = if blur > 0.0 { normals(seed, start, len) } else { Vec::new() };
            let inverse = &inverse;
            (0..len).map(move |j| {
                let mut x = inverse.quantile(u[j]);
                if blur > 0.0 {
                    x = (x + blur * z[j]).clamp(lo, hi);
                }
                DetectionEvent { x: T::lit(x), sequence_index: (start + j) as u64 }
            })
        })
        .collect();
    Ok(events)
}

fn bin_of<T: Real>(x: T, edges: &[T]) -> usize {
    let bins = edges.len() - 1;
    edges[1..bins].partition_point(|e| *e <= x)
}

/// Cumulative histograms at each checkpoint from one event stream. Bins
/// span the central 99.8 % of the profile mass; events outside land in the
/// edge bins.
pub fn build_up<T: Real>(profile: &IntensityProfile<T>, checkpoints: &[usize], bins: usize, seed: u64) -> Result<BuildUp<T>> {
    let inverse = InverseCdf::new(profile)?;
    let range = (T::lit(inverse.quantile(0.001)), T::lit(inverse.quantile(0.999)));
    build_up_in_range(profile, checkpoints, bins, seed, range)
}

pub fn build_up_in_range<T: Real>(
    profile: &IntensityProfile<T>,
    checkpoints: &[usize],
    bins: usize,
    seed: u64,
    range: (T, T),
) -> Result<BuildUp<T>> {
    if bins < 8 {
        return Err(Error::pre(format!("build-up needs at least 8 bins, got {bins}")));
    }
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::pre("checkpoints must be non-empty and strictly increasing"));
    }
    if !(range.1 > range.0) {
        return Err(Error::pre("histogram range is empty"));
    }
    let total = *checkpoints.last().expect("non-empty");
    let events = sample_hits(profile, total, seed)?;
    let width = (range.1 - range.0) / T::from_usize_lossy(bins);
    let bin_edges: Vec<T> = (0..=bins).map(|k| range.0 + width * T::from_usize_lossy(k)).collect();

    let mut counts = vec![0u64; bins];
    let mut histograms = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    if checkpoints[0] == 0 {
        histograms.push(counts.clone());
        next = 1;
    }
    for (i, e) in events.iter().enumerate() {
        counts[bin_of(e.x, &bin_edges)] += 1;
        while next < checkpoints.len() && checkpoints[next] == i + 1 {
            histograms.push(counts.clone());
            next += 1;
        }
    }
    Ok(BuildUp { seed, checkpoints: checkpoints.to_vec(), histograms, bin_edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefield::Grid1D;

    fn triangle() -> IntensityProfile<f64> {
        let g = Grid1D::<f64>::centered(256, 0.01).unwrap();
        let v = (0..256).map(|i| (1.0 - g.x(i).abs()).max(0.0)).collect();
        IntensityProfile::normalized(g, v).unwrap()
    }

    #[test]
    fn zero_samples() {
        assert!(sample_hits(&triangle(), 0, 7).unwrap().is_empty());
    }

    #[test]
    fn unnormalized_rejected() {
        let g = Grid1D::centered(64, 1.0).unwrap();
        let p = IntensityProfile::new(g, vec![1.0; 64]).unwrap();
        assert!(matches!(sample_hits(&p, 10, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn quantile_inverts_cdf() {
        let inv = InverseCdf::new(&triangle()).unwrap();
        for k in 1..100 {
            let u = k as f64 / 100.0;
            assert!((inv.cdf(inv.quantile(u)) - u).abs() < 1e-12);
        }
        assert_eq!(inv.quantile(0.0), inv.quantile(0.0));
    }

    #[test]
    fn events_inside_support() {
        let p = triangle();
        let ev = sample_hits(&p, 20_000, 3).unwrap();
        assert!(ev.iter().all(|e| e.x >= p.grid.first() && e.x <= p.grid.last()));
        assert!(ev.iter().enumerate().all(|(i, e)| e.sequence_index == i as u64));
    }

    #[test]
    fn prefix_property_across_chunks() {
        let p = triangle();
        let long = sample_hits(&p, 3 * CHUNK + 17, 11).unwrap();
        let short = sample_hits(&p, CHUNK + 5, 11).unwrap();
        assert_eq!(&long[..short.len()], &short[..]);
    }

    #[test]
    fn blurred_events_stay_in_support() {
        let p = triangle();
        let ev = sample_hits_blurred(&p, 5000, 2, 0.5).unwrap();
        assert!(ev.iter().all(|e| e.x >= p.grid.first() && e.x <= p.grid.last()));
        let plain = sample_hits(&p, 5000, 2).unwrap();
        assert_ne!(ev, plain);
    }

    #[test]
    fn build_up_counts() {
        let b = build_up(&triangle(), &[10, 100, 3000], 16, 5).unwrap();
        let sums: Vec<u64> = b.histograms.iter().map(|h| h.iter().sum()).collect();
        assert_eq!(sums, vec![10, 100, 3000]);
        for w in b.histograms.windows(2) {
            assert!(w[0].iter().zip(&w[1]).all(|(a, c)| a <= c));
        }
        assert_eq!(b, build_up(&triangle(), &[10, 100, 3000], 16, 5).unwrap());
        assert!(build_up(&triangle(), &[10, 10], 16, 5).is_err());
        assert!(build_up(&triangle(), &[10], 4, 5).is_err());
    }
}
