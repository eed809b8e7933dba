//! Screen-intensity analysis: fringe minima and maxima, the first-order
//! width W, the fringeless envelope, the fringe mask and visibility.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::wavefield::Grid1D;

/// Intensity samples on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityProfile<T> {
    pub grid: Grid1D<T>,
    pub values: Vec<T>,
    pub normalized: bool,
}

impl<T: Real> IntensityProfile<T> {
    pub fn new(grid: Grid1D<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_samples() {
            return Err(Error::pre(format!("{} values for a {}-sample grid", values.len(), grid.n_samples())));
        }
        if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::domain("intensity values must be finite and nonnegative"));
        }
        Ok(Self { grid, values, normalized: false })
    }

    /// Builds a profile scaled to unit trapezoid integral.
    pub fn normalized(grid: Grid1D<T>, values: Vec<T>) -> Result<Self> {
        let mut p = Self::new(grid, values)?;
        p.normalize()?;
        Ok(p)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let total = self.integral();
        if !(total > T::zero()) || !total.is_finite() {
            return Err(Error::EmptyField(format!("profile integral is {total}")));
        }
        let inv = total.recip();
        self.values.iter_mut().for_each(|v| *v = *v * inv);
        self.normalized = true;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> T {
        self.grid.x(i)
    }

    pub fn spacing(&self) -> T {
        self.grid.spacing()
    }

    /// Trapezoid integral over the grid.
    pub fn integral(&self) -> T {
        let n = self.values.len();
        let sum: T = self.values.iter().copied().sum();
        (sum - (self.values[0] + self.values[n - 1]) / T::lit(2.0)) * self.spacing()
    }

    pub fn peak(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::max)
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        best
    }

    /// Linear interpolation; zero outside the sampled range.
    pub fn interpolate(&self, x: T) -> T {
        let t = (x - self.grid.first()) / self.spacing();
        if t < T::zero() || t > T::from_usize_lossy(self.len() - 1) {
            return T::zero();
        }
        let i = t.floor().to_usize().unwrap_or(0).min(self.len() - 1);
        if i + 1 >= self.len() {
            return self.values[i];
        }
        let w = t - T::from_usize_lossy(i);
        self.values[i] * (T::one() - w) + self.values[i + 1] * w
    }

    /// Profile mirrored through the grid centre.
    pub fn reflect(&self) -> Self {
        let values = (0..self.len()).map(|i| self.values[self.grid.mirror_index(i)]).collect();
        Self { grid: self.grid, values, normalized: self.normalized }
    }

    /// Mean position ∫x·I dx / ∫I dx.
    pub fn mean(&self) -> T {
        let mut num = T::zero();
        let mut den = T::zero();
        for (i, v) in self.values.iter().enumerate() {
            num = num + self.x(i) * *v;
            den = den + *v;
        }
        num / den
    }

    /// Relative L2 distance ‖self − other‖ / ‖other‖ on a shared grid.
    pub fn relative_l2(&self, other: &Self) -> Result<T> {
        if self.len() != other.len() {
            return Err(Error::pre("profiles have different lengths"));
        }
        let mut diff = T::zero();
        let mut reference = T::zero();
        for (a, b) in self.values.iter().zip(&other.values) {
            diff = diff + (*a - *b) * (*a - *b);
            reference = reference + *b * *b;
        }
        if reference == T::zero() {
            return Err(Error::EmptyField("reference profile is zero".into()));
        }
        Ok((diff / reference).sqrt())
    }
}

/// A located extremum. `k` is the fringe order: minima are numbered
/// …−2, −1, 1, 2… and maxima …−1, 0, 1… outward from the central maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum<T> {
    pub k: i32,
    #[serde(rename = "x_m")]
    pub x: T,
    pub value: T,
    #[serde(skip)]
    pub sample: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionVisibility<T> {
    pub from_m: T,
    pub to_m: T,
    pub visibility: T,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PatternFeatures<T> {
    /// Minima z_k, sorted by position.
    #[serde(rename = "z")]
    pub minima: Vec<Extremum<T>>,
    /// Maxima f_k, sorted by position.
    #[serde(rename = "f")]
    pub maxima: Vec<Extremum<T>>,
    /// W = z_1 − z_{−1}, absent for fringeless profiles.
    #[serde(rename = "W_m")]
    pub width: Option<T>,
    #[serde(rename = "fringe_period_m")]
    pub fringe_period: Option<T>,
    /// Visibility of each adjacent max/min pair, walking outward from f_0.
    pub visibility: Vec<RegionVisibility<T>>,
}

/// Number of max/min pairs per side recorded in the visibility map.
const VISIBILITY_PAIRS_PER_SIDE: usize = 8;

impl<T: Real> PatternFeatures<T> {
    pub fn minimum(&self, k: i32) -> Option<&Extremum<T>> {
        self.minima.iter().find(|e| e.k == k)
    }

    pub fn maximum(&self, k: i32) -> Option<&Extremum<T>> {
        self.maxima.iter().find(|e| e.k == k)
    }

    /// Replaces the measured fringe period by λL/Δx.
    pub fn with_geometry(mut self, slit_width: T, wavelength: T, distance: T) -> Self {
        self.fringe_period = Some(wavelength * distance / slit_width);
        self
    }

    /// Closed-form features of the Fraunhofer pattern: zeros at k·λL/Δx,
    /// secondary maxima at the roots of tan u = u, for every order that fits
    /// inside `grid`.
    pub fn fraunhofer(grid: &Grid1D<T>, slit_width: T, wavelength: T, distance: T) -> Self {
        let period = wavelength * distance / slit_width;
        let reach = grid.first().abs().min(grid.last().abs());
        let orders = (reach / period).floor().to_i32().unwrap_or(0).clamp(0, 100_000);
        let at = |x: T| crate::wavefield::fraunhofer_intensity(slit_width, wavelength, distance, x);
        let nearest = |x: T| ((x - grid.first()) / grid.spacing()).round().to_usize().unwrap_or(0);
        let mut minima = Vec::new();
        let mut maxima = vec![Extremum { k: 0, x: T::zero(), value: T::one(), sample: nearest(T::zero()) }];
        for k in 1..=orders {
            let z = period * T::lit(k as f64);
            minima.push(Extremum { k, x: z, value: at(z), sample: nearest(z) });
            minima.push(Extremum { k: -k, x: -z, value: at(-z), sample: nearest(-z) });
            if k < orders {
                let f = period * T::lit(sidelobe_root(k) / std::f64::consts::PI);
                maxima.push(Extremum { k, x: f, value: at(f), sample: nearest(f) });
                maxima.push(Extremum { k: -k, x: -f, value: at(-f), sample: nearest(-f) });
            }
        }
        minima.sort_by(|a, b| a.x.partial_cmp(&b.x).expect("finite"));
        maxima.sort_by(|a, b| a.x.partial_cmp(&b.x).expect("finite"));
        let mut features = Self {
            width: (orders >= 1).then(|| T::lit(2.0) * period),
            fringe_period: Some(period),
            minima,
            maxima,
            visibility: Vec::new(),
        };
        features.visibility = visibility_map(&features);
        features
    }
}

/// k-th positive root of tan u = u (u ≈ (k + ½)π), by Newton iteration.
pub fn sidelobe_root(k: i32) -> f64 {
    use std::f64::consts::PI;
    let mut u = (k as f64 + 0.5) * PI - 1.0 / ((k as f64 + 0.5) * PI);
    for _ in 0..50 {
        // g(u) = u cos u - sin u, g'(u) = -u sin u
        let g = u * u.cos() - u.sin();
        let dg = -u * u.sin();
        let step = g / dg;
        u -= step;
        if step.abs() < 1e-15 * u {
            break;
        }
    }
    u
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Min,
    Max,
}

/// Raw interior extrema: runs of equal samples strictly below (above) both
/// neighbours. Plateaus report their leftmost sample.
fn raw_extrema<T: Real>(values: &[T]) -> Vec<(usize, usize, Kind)> {
    let n = values.len();
    let mut out = Vec::new();
    let mut s = 0;
    while s < n {
        let mut e = s;
        while e + 1 < n && values[e + 1] == values[s] {
            e += 1;
        }
        if s > 0 && e + 1 < n {
            let (l, v, r) = (values[s - 1], values[s], values[e + 1]);
            if v > l && v > r {
                out.push((s, e, Kind::Max));
            } else if v < l && v < r {
                out.push((s, e, Kind::Min));
            }
        }
        s = e + 1;
    }
    out
}

/// Three-point parabolic refinement; returns (offset in samples, value).
fn parabolic<T: Real>(left: T, mid: T, right: T) -> (T, T) {
    let denom = left - T::lit(2.0) * mid + right;
    if denom == T::zero() {
        return (T::zero(), mid);
    }
    let limit = T::lit(0.49);
    let delta = (T::lit(0.5) * (left - right) / denom).max(-limit).min(limit);
    (delta, mid - T::lit(0.25) * (left - right) * delta)
}

/// Local maxima above `fraction` of the global peak.
pub fn count_modes<T: Real>(profile: &IntensityProfile<T>, fraction: T) -> usize {
    let threshold = profile.peak() * fraction;
    raw_extrema(&profile.values)
        .into_iter()
        .filter(|&(s, _, kind)| kind == Kind::Max && profile.values[s] > threshold)
        .count()
}

/// Full width at half maximum of the global peak, with linear interpolation
/// of the two half-maximum crossings.
pub fn fwhm<T: Real>(profile: &IntensityProfile<T>) -> Result<T> {
    let v = &profile.values;
    let top = profile.argmax();
    let half = v[top] / T::lit(2.0);
    if !(half > T::zero()) {
        return Err(Error::NotApplicable("profile has no peak".into()));
    }
    let crossing = |i: usize, j: usize| {
        // v[i] >= half > v[j], neighbours
        let t = (v[i] - half) / (v[i] - v[j]);
        profile.x(i) + (profile.x(j) - profile.x(i)) * t
    };
    let right = (top..v.len() - 1).find(|&i| v[i + 1] < half).map(|i| crossing(i, i + 1));
    let left = (1..=top).rev().find(|&i| v[i - 1] < half).map(|i| crossing(i, i - 1));
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(Error::NotApplicable("peak does not fall to half maximum inside the grid".into())),
    }
}

pub fn find_extrema<T: Real>(profile: &IntensityProfile<T>) -> Result<PatternFeatures<T>> {
    if profile.len() < 64 {
        return Err(Error::pre(format!("extremum search needs >= 64 samples, got {}", profile.len())));
    }
    let v = &profile.values;
    if v.iter().all(|x| *x == v[0]) {
        return Err(Error::pre("profile is constant"));
    }
    let dx = profile.spacing();
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    for (s, e, kind) in raw_extrema(v) {
        let (x, value) = if s == e {
            let (delta, value) = parabolic(v[s - 1], v[s], v[s + 1]);
            (profile.x(s) + delta * dx, value)
        } else {
            (profile.x(s), v[s])
        };
        let ext = Extremum { k: 0, x, value, sample: s };
        match kind {
            Kind::Min => minima.push(ext),
            Kind::Max => maxima.push(ext),
        }
    }

    let Some(center_pos) = maxima
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.x.abs().partial_cmp(&b.1.x.abs()).expect("finite"))
        .map(|(i, _)| i)
    else {
        return Ok(PatternFeatures::default());
    };
    let center = maxima[center_pos].x;
    number_outward(&mut maxima, center, true);
    number_outward(&mut minima, center, false);

    let width = match (
        minima.iter().find(|e| e.k == -1),
        minima.iter().find(|e| e.k == 1),
    ) {
        (Some(a), Some(b)) => Some(b.x - a.x),
        _ => None,
    };
    let mut features = PatternFeatures {
        width,
        fringe_period: width.map(|w| w / T::lit(2.0)),
        minima,
        maxima,
        visibility: Vec::new(),
    };
    features.visibility = visibility_map(&features);
    Ok(features)
}

/// Assigns orders by side of `center` and distance from it. For maxima the
/// one at `center` is order 0.
fn number_outward<T: Real>(items: &mut [Extremum<T>], center: T, has_zero: bool) {
    let left: Vec<usize> = (0..items.len()).filter(|&i| items[i].x < center).collect();
    let right: Vec<usize> = (0..items.len()).filter(|&i| items[i].x > center).collect();
    for (order, &i) in left.iter().rev().enumerate() {
        items[i].k = -(order as i32 + 1);
    }
    for (order, &i) in right.iter().enumerate() {
        items[i].k = order as i32 + 1;
    }
    if has_zero {
        for item in items.iter_mut().filter(|e| e.x == center) {
            item.k = 0;
        }
    } else {
        // A minimum exactly at the centre counts as the first one on the right.
        let at_center: Vec<usize> = (0..items.len()).filter(|&i| items[i].x == center).collect();
        if !at_center.is_empty() {
            for item in items.iter_mut().filter(|e| e.x > center) {
                item.k += 1;
            }
            for i in at_center {
                items[i].k = 1;
            }
        }
    }
}

fn pair_visibility<T: Real>(max: T, min: T) -> T {
    let sum = max + min;
    if sum == T::zero() {
        T::zero()
    } else {
        (max - min) / sum
    }
}

fn visibility_map<T: Real>(f: &PatternFeatures<T>) -> Vec<RegionVisibility<T>> {
    let mut out = Vec::new();
    for sign in [1, -1] {
        for j in 0..VISIBILITY_PAIRS_PER_SIDE as i32 {
            let (Some(max), Some(min)) = (f.maximum(sign * j), f.minimum(sign * (j + 1))) else {
                break;
            };
            out.push(RegionVisibility {
                from_m: max.x.min(min.x),
                to_m: max.x.max(min.x),
                visibility: pair_visibility(max.value, min.value),
            });
        }
    }
    out.sort_by(|a, b| a.from_m.partial_cmp(&b.from_m).expect("finite"));
    out
}

/// Relative deviation of the measured W from 2λL/Δx.
pub fn check_eq2<T: Real>(features: &PatternFeatures<T>, slit_width: T, wavelength: T, distance: T) -> Result<T> {
    let measured = features
        .width
        .ok_or_else(|| Error::NotApplicable("pattern has no first-order minima, W is undefined".into()))?;
    let predicted = T::lit(2.0) * wavelength * distance / slit_width;
    Ok((measured - predicted).abs() / predicted)
}

/// Cumulative integral of the piecewise-linear interpolant, zero-extended.
struct Antiderivative<'a, T> {
    profile: &'a IntensityProfile<T>,
    cumulative: Vec<T>,
}

impl<'a, T: Real> Antiderivative<'a, T> {
    fn new(profile: &'a IntensityProfile<T>) -> Self {
        let dx = profile.spacing();
        let half = T::lit(0.5);
        let mut cumulative = Vec::with_capacity(profile.len());
        let mut acc = T::zero();
        cumulative.push(acc);
        for w in profile.values.windows(2) {
            acc = acc + (w[0] + w[1]) * half * dx;
            cumulative.push(acc);
        }
        Self { profile, cumulative }
    }

    fn at(&self, x: T) -> T {
        let n = self.profile.len();
        let dx = self.profile.spacing();
        let t = (x - self.profile.grid.first()) / dx;
        if t <= T::zero() {
            return T::zero();
        }
        let last = T::from_usize_lossy(n - 1);
        if t >= last {
            return self.cumulative[n - 1];
        }
        let i = t.floor().to_usize().unwrap_or(0).min(n - 2);
        let s = t - T::from_usize_lossy(i);
        let (a, b) = (self.profile.values[i], self.profile.values[i + 1]);
        self.cumulative[i] + dx * (a * s + (b - a) * s * s * T::lit(0.5))
    }
}

/// One-period moving average of the profile (the fringeless envelope),
/// renormalized to unit integral.
pub fn envelope<T: Real>(profile: &IntensityProfile<T>, fringe_period: T) -> Result<IntensityProfile<T>> {
    let window = fringe_period / profile.spacing();
    if !(window >= T::lit(3.0)) {
        return Err(Error::Resolution(format!(
            "fringe period {fringe_period:e} m spans {window} samples; at least 3 are needed"
        )));
    }
    let anti = Antiderivative::new(profile);
    let half = fringe_period / T::lit(2.0);
    let values = (0..profile.len())
        .map(|i| {
            let x = profile.x(i);
            ((anti.at(x + half) - anti.at(x - half)) / fringe_period).max(T::zero())
        })
        .collect();
    IntensityProfile::normalized(profile.grid, values)
}

/// Mask relating a fringed profile to its envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeMask<T> {
    pub values: Vec<T>,
    /// Central-lobe mean of the clipped ratio, divided out of `values`.
    pub scale: T,
    pub central_lobe: (T, T),
}

impl<T: Real> FringeMask<T> {
    /// mask·envelope with the central-lobe rescaling undone.
    pub fn reconstruct(&self, env: &IntensityProfile<T>) -> Vec<T> {
        self.values.iter().zip(&env.values).map(|(m, e)| *m * *e * self.scale).collect()
    }
}

pub const MASK_CEILING: f64 = 10.0;
const MASK_THRESHOLD: f64 = 1e-9;

/// Region between the minima adjacent to the global maximum; a side without
/// a minimum falls back to the half-maximum crossing.
pub fn central_lobe<T: Real>(profile: &IntensityProfile<T>) -> (T, T) {
    let peak_i = profile.argmax();
    let peak_x = profile.x(peak_i);
    let half = profile.values[peak_i] / T::lit(2.0);
    let half_left = (0..peak_i).rev().find(|&i| profile.values[i] < half).map_or(0, |i| i + 1);
    let half_right = (peak_i..profile.len()).find(|&i| profile.values[i] < half).map_or(profile.len() - 1, |i| i - 1);
    let (mut lo, mut hi) = (profile.x(half_left), profile.x(half_right));
    if let Ok(features) = find_extrema(profile) {
        if let Some(m) = features.minima.iter().filter(|e| e.x < peak_x).last() {
            lo = m.x;
        }
        if let Some(m) = features.minima.iter().find(|e| e.x > peak_x) {
            hi = m.x;
        }
    }
    (lo, hi)
}

pub fn fringe_mask<T: Real>(profile: &IntensityProfile<T>, env: &IntensityProfile<T>) -> Result<FringeMask<T>> {
    if profile.len() != env.len() {
        return Err(Error::pre("profile and envelope lengths differ"));
    }
    let threshold = profile.peak() * T::lit(MASK_THRESHOLD);
    if let Some(i) = (0..profile.len()).find(|&i| profile.values[i] > threshold && !(env.values[i] > T::zero())) {
        return Err(Error::pre(format!("envelope vanishes at x = {:e} m where the profile does not", profile.x(i))));
    }
    let ceiling = T::lit(MASK_CEILING);
    let mut values: Vec<T> = profile
        .values
        .iter()
        .zip(&env.values)
        .map(|(p, e)| if *e > threshold { (*p / *e).min(ceiling).max(T::zero()) } else { T::zero() })
        .collect();
    let (lo, hi) = central_lobe(profile);
    let (mut sum, mut count) = (T::zero(), 0usize);
    for (i, m) in values.iter().enumerate() {
        let x = profile.x(i);
        if x >= lo && x <= hi {
            sum = sum + *m;
            count += 1;
        }
    }
    if count == 0 || !(sum > T::zero()) {
        return Err(Error::pre("central lobe of the profile is empty"));
    }
    let scale = sum / T::from_usize_lossy(count);
    values.iter_mut().for_each(|m| *m = *m / scale);
    Ok(FringeMask { values, scale, central_lobe: (lo, hi) })
}

/// (I_max − I_min)/(I_max + I_min) over the extrema whose samples lie in
/// `region`. A constant region has visibility 0.
pub fn visibility<T: Real>(profile: &IntensityProfile<T>, region: (T, T)) -> Result<T> {
    let (a, b) = (region.0.min(region.1), region.0.max(region.1));
    let inside: Vec<usize> = (0..profile.len()).filter(|&i| profile.x(i) >= a && profile.x(i) <= b).collect();
    if let Some(&first) = inside.first() {
        if inside.iter().all(|&i| profile.values[i] == profile.values[first]) {
            return Ok(T::zero());
        }
    }
    let tolerance = profile.spacing() / T::lit(2.0);
    let features = find_extrema(profile)?;
    let in_region = |e: &&Extremum<T>| {
        let x = profile.x(e.sample);
        x >= a - tolerance && x <= b + tolerance
    };
    let i_max = features.maxima.iter().filter(in_region).map(|e| e.value).fold(None, |m: Option<T>, v| Some(m.map_or(v, |m| m.max(v))));
    let i_min = features.minima.iter().filter(in_region).map(|e| e.value).fold(None, |m: Option<T>, v| Some(m.map_or(v, |m| m.min(v))));
    match (i_max, i_min) {
        (Some(max), Some(min)) => Ok(pair_visibility(max, min.max(T::zero()))),
        _ => Err(Error::NotApplicable(format!("no max/min pair inside [{a:e}, {b:e}] m"))),
    }
}

/// Visibility of the first fringe, from f_0 to z_1 (or z_{−1} when the
/// right-hand minimum is missing).
pub fn first_fringe_visibility<T: Real>(features: &PatternFeatures<T>) -> Result<T> {
    let max = features
        .maximum(0)
        .ok_or_else(|| Error::NotApplicable("profile has no central maximum".into()))?;
    let min = features
        .minimum(1)
        .or_else(|| features.minimum(-1))
        .ok_or_else(|| Error::NotApplicable("profile has no first-order minimum".into()))?;
    Ok(pair_visibility(max.value, min.value.max(T::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefield::{fraunhofer_profile, Grid1D};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sinc_profile() -> IntensityProfile<f64> {
        let g = Grid1D::auto(1 << 14, 1e-9, 20e-6, 1.0, 20e-6).unwrap();
        fraunhofer_profile(&g, 20e-6, 1e-9, 1.0).unwrap()
    }

    fn gaussian(n: usize, dx: f64, center: f64, sigma: f64) -> IntensityProfile<f64> {
        let g = Grid1D::centered(n, dx).unwrap();
        let v = (0..n).map(|i| (-(g.x(i) - center).powi(2) / (2.0 * sigma * sigma)).exp()).collect();
        IntensityProfile::normalized(g, v).unwrap()
    }

    #[test]
    fn sinc_extrema_and_width() {
        let p = sinc_profile();
        let f = find_extrema(&p).unwrap();
        assert!((f.minimum(1).unwrap().x - 50e-6).abs() < 0.5e-6);
        assert!((f.minimum(-1).unwrap().x + 50e-6).abs() < 0.5e-6);
        assert!((f.width.unwrap() - 100e-6).abs() < 1e-6);
        assert_eq!(f.maximum(0).unwrap().x, 0.0);
        assert!(check_eq2(&f, 20e-6, 1e-9, 1.0).unwrap() < 1e-2);
    }

    #[test]
    fn extrema_interleave() {
        let f = find_extrema(&sinc_profile()).unwrap();
        let mut all: Vec<(f64, bool)> =
            f.minima.iter().map(|e| (e.x, false)).chain(f.maxima.iter().map(|e| (e.x, true))).collect();
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in all.windows(2) {
            assert!(w[0].0 < w[1].0);
            assert_ne!(w[0].1, w[1].1);
        }
    }

    #[test]
    fn mirrored_profile_mirrors_features() {
        let g = Grid1D::centered(4096, 0.1e-6).unwrap();
        let v: Vec<f64> = (0..4096)
            .map(|i| {
                let x = g.x(i) - 7e-6;
                let u = std::f64::consts::PI * x / 20e-6;
                (if u == 0.0 { 1.0 } else { (u.sin() / u).powi(2) }) * (1.0 + 0.1 * x / 1e-4)
            })
            .collect();
        let p = IntensityProfile::normalized(g, v).unwrap();
        let a = find_extrema(&p).unwrap();
        let b = find_extrema(&p.reflect()).unwrap();
        let tol = 1e-3 * 20e-6;
        for z in &a.minima {
            assert!(b.minima.iter().any(|w| (w.x + z.x).abs() < tol), "no mirror for {}", z.x);
        }
    }

    #[test]
    fn gaussian_has_no_minima() {
        let f = find_extrema(&gaussian(1024, 1e-7, 0.0, 5e-6)).unwrap();
        assert!(f.minima.is_empty());
        assert!(f.width.is_none());
        assert!(check_eq2(&f, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn constant_and_short_profiles() {
        let g = Grid1D::centered(64, 1.0).unwrap();
        let c = IntensityProfile::normalized(g, vec![1.0; 64]).unwrap();
        assert!(find_extrema(&c).is_err());
        assert_eq!(visibility(&c, (-10.0, 10.0)).unwrap(), 0.0);
        let g = Grid1D::centered(32, 1.0).unwrap();
        let short = IntensityProfile::normalized(g, (0..32).map(|i| (i % 3) as f64).collect()).unwrap();
        assert!(find_extrema(&short).is_err());
    }

    #[test]
    fn fwhm_of_triangle() {
        let g = Grid1D::<f64>::centered(1024, 0.01).unwrap();
        let v = (0..1024).map(|i| (1.0 - g.x(i).abs()).max(0.0)).collect();
        let p = IntensityProfile::new(g, v).unwrap();
        assert!((fwhm(&p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plateau_takes_leftmost_sample() {
        let g = Grid1D::centered(64, 1.0).unwrap();
        let mut v = vec![0.0; 64];
        for (i, val) in v.iter_mut().enumerate() {
            *val = (10.0 - (i as f64 - 32.0).abs()).max(0.0);
        }
        v[33] = v[32];
        let p = IntensityProfile::new(g, v).unwrap();
        let f = find_extrema(&p).unwrap();
        assert_eq!(f.maxima.len(), 1);
        assert_eq!(f.maxima[0].sample, 32);
    }

    #[test]
    fn envelope_of_gaussian_is_itself() {
        let p = gaussian(4096, 1e-7, 0.0, 20e-6);
        let e = envelope(&p, 5e-6).unwrap();
        assert!(e.relative_l2(&p).unwrap() < 0.02);
        assert!(envelope(&p, 2e-7).is_err());
    }

    #[test]
    fn envelope_fills_sinc_zeros() {
        let p = sinc_profile();
        let e = envelope(&p, 50e-6).unwrap();
        assert!(e.interpolate(50e-6) > 0.0);
        assert!(e.values.iter().all(|v| *v >= 0.0));
        assert_relative_eq!(e.integral(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn envelope_matches_direct_window_average() {
        let p = sinc_profile();
        let period = 50e-6;
        let e = envelope(&p, period).unwrap();
        // brute-force window average of the linear interpolant, 64 sub-steps per sample
        let raw = |x: f64| {
            let steps = 64 * (period / p.spacing()).round() as usize;
            let h = period / steps as f64;
            let mut acc = 0.0;
            for j in 0..=steps {
                let w = if j == 0 || j == steps { 0.5 } else { 1.0 };
                acc += w * p.interpolate(x - period / 2.0 + j as f64 * h);
            }
            acc * h / period
        };
        let c = p.len() / 2;
        let scale = e.values[c] / raw(p.x(c));
        for i in (0..p.len()).step_by(997) {
            let expect = raw(p.x(i)) * scale;
            assert!((e.values[i] - expect).abs() <= 1e-4 * e.peak(), "at {}", p.x(i));
        }
    }

    #[test]
    fn mask_of_fringeless_profile_is_flat() {
        let p = gaussian(4096, 1e-7, 0.0, 20e-6);
        let e = envelope(&p, 5e-6).unwrap();
        let m = fringe_mask(&p, &e).unwrap();
        let (lo, hi) = m.central_lobe;
        for i in 0..p.len() {
            if p.x(i) >= lo && p.x(i) <= hi {
                assert!((m.values[i] - 1.0).abs() < 0.05);
            }
        }
    }

    #[test]
    fn mask_of_sinc_vanishes_at_zeros() {
        let p = sinc_profile();
        let e = envelope(&p, 50e-6).unwrap();
        let m = fringe_mask(&p, &e).unwrap();
        let mp = IntensityProfile { grid: p.grid, values: m.values.clone(), normalized: false };
        assert!(mp.interpolate(50e-6) < 1e-3);
        assert!(mp.interpolate(-50e-6) < 1e-3);
        let (lo, hi) = m.central_lobe;
        let inside: Vec<f64> = (0..p.len()).filter(|&i| p.x(i) >= lo && p.x(i) <= hi).map(|i| m.values[i]).collect();
        let mean = inside.iter().sum::<f64>() / inside.len() as f64;
        assert_relative_eq!(mean, 1.0, epsilon = 1e-6);
        assert!(m.values.iter().all(|v| *v >= 0.0 && *v <= MASK_CEILING / m.scale + 1e-12));
    }

    #[test]
    fn mask_times_envelope_reconstructs() {
        let p = sinc_profile();
        let e = envelope(&p, 50e-6).unwrap();
        let m = fringe_mask(&p, &e).unwrap();
        let rec = m.reconstruct(&e);
        let floor = 1e-6 * e.peak();
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..p.len() {
            if e.values[i] > floor {
                num += (rec[i] - p.values[i]).powi(2);
                den += p.values[i].powi(2);
            }
        }
        assert!((num / den).sqrt() < 0.02);
    }

    #[test]
    fn visibility_cases() {
        let p = sinc_profile();
        assert!(visibility(&p, (0.0, 50e-6)).unwrap() > 0.99);
        let g = Grid1D::centered(1024, 1.0).unwrap();
        let v = (0..1024).map(|i| 1.0 + 0.5 * (g.x(i) * std::f64::consts::TAU / 64.0).cos()).collect();
        let s = IntensityProfile::new(g, v).unwrap();
        assert_relative_eq!(visibility(&s, (-100.0, 100.0)).unwrap(), 0.5, epsilon = 1e-6);
        let gauss = gaussian(1024, 1e-7, 0.0, 5e-6);
        assert!(matches!(visibility(&gauss, (-1e-5, 1e-5)), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn analytic_features() {
        let g = Grid1D::auto(1 << 12, 1e-9, 20e-6, 1.0, 20e-6).unwrap();
        let f = PatternFeatures::fraunhofer(&g, 20e-6, 1e-9, 1.0);
        assert_eq!(f.width, Some(100e-6));
        assert_relative_eq!(f.maximum(-1).unwrap().x, -1.4302966531242 * 50e-6, max_relative = 1e-10);
        assert_relative_eq!(sidelobe_root(1), 4.493409457909064, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn envelope_is_idempotent(width in 5e-6f64..40e-6, period in 1e-6f64..4e-6) {
            let p = gaussian(2048, 1e-7, 0.0, width);
            let once = envelope(&p, period).unwrap();
            let twice = envelope(&once, period).unwrap();
            prop_assert!(twice.relative_l2(&once).unwrap() < 0.02);
        }
    }
}
