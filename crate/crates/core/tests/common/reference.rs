// CDF of the linear interpolant of a profile, built by exact integration of
// each linear piece, plus the two goodness-of-fit statistics used on it.

use slitlab_core::pattern::IntensityProfile;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub struct Reference {
    x0: f64,
    dx: f64,
    v: Vec<f64>,
    cum: Vec<f64>,
}

impl Reference {
    pub fn new(p: &IntensityProfile<f64>) -> Self {
        let dx = p.spacing();
        let mut cum = vec![0.0];
        for w in p.values.windows(2) {
            cum.push(cum.last().unwrap() + dx * (w[0] + w[1]) / 2.0);
        }
        let total = *cum.last().unwrap();
        cum.iter_mut().for_each(|c| *c /= total);
        let v = p.values.iter().map(|x| x / total).collect();
        Self { x0: p.grid.first(), dx, v, cum }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let t = (x - self.x0) / self.dx;
        if t <= 0.0 {
            return 0.0;
        }
        let i = t.floor() as usize;
        if i >= self.v.len() - 1 {
            return 1.0;
        }
        let s = t - i as f64;
        self.cum[i] + self.dx * (self.v[i] * s + 0.5 * (self.v[i + 1] - self.v[i]) * s * s)
    }

    /// Kolmogorov–Smirnov distance of the sample.
    pub fn ks_distance(&self, xs: &[f64]) -> f64 {
        let mut xs = xs.to_vec();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let mut d: f64 = 0.0;
        for (i, x) in xs.iter().enumerate() {
            let f = self.cdf(*x);
            d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
        }
        d
    }

    /// χ² statistic and p-value over `bins` equal bins on [lo, hi], the
    /// outer bins extended to ±∞.
    pub fn chi_square(&self, xs: &[f64], lo: f64, hi: f64, bins: usize) -> (f64, f64) {
        let n = xs.len() as f64;
        let width = (hi - lo) / bins as f64;
        let mut observed = vec![0.0; bins];
        for x in xs {
            let k = (((x - lo) / width).floor().max(0.0) as usize).min(bins - 1);
            observed[k] += 1.0;
        }
        let mut stat = 0.0;
        for (k, obs) in observed.iter().enumerate() {
            let a = if k == 0 { f64::NEG_INFINITY } else { lo + k as f64 * width };
            let b = if k == bins - 1 { f64::INFINITY } else { lo + (k + 1) as f64 * width };
            let expected = n * (self.cdf(b) - self.cdf(a));
            stat += (obs - expected).powi(2) / expected;
        }
        (stat, ChiSquared::new((bins - 1) as f64).unwrap().sf(stat))
    }
}
