//! Sampled 1-D complex wave amplitudes, slit transmission and free-space
//! propagation.
//!
//! Sample `i` of a [`Grid1D`] sits at `center + (i - n/2)·spacing`, so with
//! `center = 0` the grid is mirror-symmetric under `i ↦ (n - i) mod n`. The
//! propagators are spectral (angular spectrum) and treat the grid as one
//! period of a periodic field.

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::IntensityProfile;
use crate::scalar::Real;

/// Ratio used to decide that a beam is "significantly smaller" than the
/// slit or the wavelength.
pub const DEFAULT_FINENESS_FACTOR: f64 = 10.0;
/// Minimum number of samples across the narrowest transmitted feature.
pub const SAMPLES_PER_FEATURE: f64 = 16.0;
/// Minimum ratio of grid span to slit width.
pub const SPAN_PER_SLIT: f64 = 8.0;
/// Half-angle above which the paraxial kernel is flagged.
pub const PARAXIAL_HALF_ANGLE_LIMIT: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D<T> {
    n_samples: usize,
    spacing: T,
    center: T,
}

impl<T: Real> Grid1D<T> {
    pub fn new(n_samples: usize, spacing: T, center: T) -> Result<Self> {
        if n_samples < 16 || !n_samples.is_power_of_two() {
            return Err(Error::domain(format!(
                "grid needs a power-of-two sample count >= 16, got {n_samples}"
            )));
        }
        if !(spacing > T::zero()) || !spacing.is_finite() || !center.is_finite() {
            return Err(Error::domain(format!("grid spacing must be positive and finite, got {spacing}")));
        }
        let span = spacing * T::from_usize_lossy(n_samples);
        if !span.is_finite() {
            return Err(Error::domain("grid span overflows"));
        }
        Ok(Self { n_samples, spacing, center })
    }

    pub fn centered(n_samples: usize, spacing: T) -> Result<Self> {
        Self::new(n_samples, spacing, T::zero())
    }

    /// Chooses a spacing for `n_samples` that resolves the narrowest feature
    /// `min_feature`, keeps the periodic images of a far-field pattern away
    /// from the centre, and puts the Fraunhofer zeros `k·λL/Δx` on samples
    /// whenever that does not break the sizing rule.
    pub fn auto(n_samples: usize, wavelength: T, slit_width: T, distance: T, min_feature: T) -> Result<Self> {
        for (name, v) in [("wavelength", wavelength), ("slit width", slit_width), ("feature width", min_feature)] {
            if !(v > T::zero()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(distance > T::zero()) {
            return Err(Error::domain(format!("distance must be positive for grid sizing, got {distance}")));
        }
        let n = T::from_usize_lossy(n_samples);
        let max_dx = min_feature / T::lit(SAMPLES_PER_FEATURE);
        let required = required_span(wavelength, slit_width, distance, min_feature);
        let mut dx = (wavelength * distance / n).sqrt().min(max_dx);
        if n * dx < required {
            dx = required / n;
        }
        if dx > max_dx * T::lit(1.0 + 1e-12) {
            return Err(Error::GridTooSmall(format!(
                "{n_samples} samples cannot cover span {required:e} m at spacing <= {max_dx:e} m"
            )));
        }
        let period = wavelength * distance / slit_width;
        let ratio = period / dx;
        let snapped = if ratio >= T::one() {
            let fine = period / ratio.ceil();
            let coarse = period / ratio.floor();
            if n * fine >= required {
                fine
            } else if coarse <= max_dx {
                coarse
            } else {
                dx
            }
        } else {
            dx
        };
        Self::centered(n_samples, snapped)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn center(&self) -> T {
        self.center
    }

    pub fn span(&self) -> T {
        self.spacing * T::from_usize_lossy(self.n_samples)
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        let offset = T::from_f64(i as f64 - (self.n_samples / 2) as f64).expect("index fits");
        self.center + offset * self.spacing
    }

    pub fn coordinates(&self) -> Vec<T> {
        (0..self.n_samples).map(|i| self.x(i)).collect()
    }

    pub fn first(&self) -> T {
        self.x(0)
    }

    pub fn last(&self) -> T {
        self.x(self.n_samples - 1)
    }

    /// Index of the sample mirrored through the grid centre (periodic sense).
    #[inline]
    pub fn mirror_index(&self, i: usize) -> usize {
        (self.n_samples - i) % self.n_samples
    }

    /// Spatial frequency (1/m) of DFT bin `k`.
    #[inline]
    pub fn frequency(&self, k: usize) -> T {
        let n = self.n_samples;
        let signed = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        T::lit(signed) / self.span()
    }
}

/// Span required by the sizing rule: `max(8·Δx, 4·2λL/w_min)`.
pub fn required_span<T: Real>(wavelength: T, slit_width: T, distance: T, min_feature: T) -> T {
    let pattern = T::lit(2.0) * wavelength * distance / min_feature;
    (T::lit(SPAN_PER_SLIT) * slit_width).max(T::lit(4.0) * pattern)
}

/// Checks the grid sizing rule; violations are errors, never silent aliasing.
pub fn check_grid<T: Real>(grid: &Grid1D<T>, wavelength: T, slit_width: T, distance: T, min_feature: T) -> Result<()> {
    let required = required_span(wavelength, slit_width, distance, min_feature);
    if grid.span() < required {
        return Err(Error::GridTooSmall(format!(
            "span {:e} m is below the required {required:e} m",
            grid.span()
        )));
    }
    let max_dx = min_feature / T::lit(SAMPLES_PER_FEATURE);
    if grid.spacing() > max_dx * T::lit(1.0 + 1e-9) {
        return Err(Error::Resolution(format!(
            "spacing {:e} m exceeds {max_dx:e} m (1/16 of the narrowest feature)",
            grid.spacing()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SourceSpec<T> {
    WidePlaneWave,
    /// Gaussian beam with intensity FWHM `fwhm` centred at `offset`.
    FineGaussian { fwhm: T, offset: T },
}

impl<T: Real> SourceSpec<T> {
    pub fn is_fine(&self) -> bool {
        matches!(self, SourceSpec::FineGaussian { .. })
    }

    pub fn with_offset(self, offset: T) -> Self {
        match self {
            SourceSpec::FineGaussian { fwhm, .. } => SourceSpec::FineGaussian { fwhm, offset },
            wide => wide,
        }
    }

    /// Narrowest transmitted feature for a slit of width `slit_width`.
    pub fn min_feature(&self, slit_width: T) -> T {
        match *self {
            SourceSpec::WidePlaneWave => slit_width,
            SourceSpec::FineGaussian { fwhm, .. } => fwhm.min(slit_width),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField<T> {
    pub grid: Grid1D<T>,
    pub amplitudes: Vec<Complex<T>>,
    pub wavelength: T,
    /// Narrowest transmitted feature, when known; drives the paraxial check.
    pub feature_width: Option<T>,
}

impl<T: Real> ComplexField<T> {
    pub fn new(grid: Grid1D<T>, amplitudes: Vec<Complex<T>>, wavelength: T) -> Result<Self> {
        if amplitudes.len() != grid.n_samples() {
            return Err(Error::pre(format!(
                "{} amplitudes for a {}-sample grid",
                amplitudes.len(),
                grid.n_samples()
            )));
        }
        if !(wavelength > T::zero()) || !wavelength.is_finite() {
            return Err(Error::domain(format!("wavelength must be positive, got {wavelength}")));
        }
        Ok(Self { grid, amplitudes, wavelength, feature_width: None })
    }

    /// Σ|a_i|²·spacing
    pub fn norm_sq(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<T>() * self.grid.spacing()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm_sq = self.norm_sq();
        if !(norm_sq > T::zero()) || !norm_sq.is_finite() {
            return Err(Error::EmptyField(format!("cannot normalize a field with norm² {norm_sq}")));
        }
        let scale = norm_sq.sqrt().recip();
        self.amplitudes.iter_mut().for_each(|a| *a = a.scale(scale));
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }
}

/// Slit-transmitted field together with the energy bookkeeping needed to
/// state what fraction of the incident beam got through.
#[derive(Debug, Clone)]
pub struct SlitField<T> {
    pub field: ComplexField<T>,
    /// Σ|t·g|²·spacing before normalization.
    pub transmitted_energy: T,
    /// Σ|g|²·spacing of the incident beam over the grid.
    pub incident_energy: T,
    pub warnings: Vec<String>,
}

impl<T: Real> SlitField<T> {
    pub fn transmitted_fraction(&self) -> T {
        self.transmitted_energy / self.incident_energy
    }
}

/// Amplitude transmission of the cell around `x` for a slit `[-w/2, w/2]`.
/// Edge cells carry the covered fraction, i.e. the cell average of the
/// top-hat, which keeps the low spatial frequencies of the aperture exact.
fn slit_transmission<T: Real>(x: T, half_width: T, dx: T) -> T {
    let half = dx / T::lit(2.0);
    let lo = (x - half).max(-half_width);
    let hi = (x + half).min(half_width);
    if hi <= lo {
        T::zero()
    } else {
        ((hi - lo) / dx).min(T::one())
    }
}

pub fn make_slit_field<T: Real>(
    source: &SourceSpec<T>,
    slit_width: T,
    grid: &Grid1D<T>,
    wavelength: T,
) -> Result<SlitField<T>> {
    make_slit_field_with_factor(source, slit_width, grid, wavelength, T::lit(DEFAULT_FINENESS_FACTOR))
}

pub fn make_slit_field_with_factor<T: Real>(
    source: &SourceSpec<T>,
    slit_width: T,
    grid: &Grid1D<T>,
    wavelength: T,
    fineness_factor: T,
) -> Result<SlitField<T>> {
    if !(slit_width > T::zero()) {
        return Err(Error::domain(format!("slit width must be positive, got {slit_width}")));
    }
    if !(wavelength > T::zero()) {
        return Err(Error::domain(format!("wavelength must be positive, got {wavelength}")));
    }
    if grid.span() < T::lit(SPAN_PER_SLIT) * slit_width {
        return Err(Error::GridTooSmall(format!(
            "slit width {slit_width:e} m exceeds span/8 = {:e} m",
            grid.span() / T::lit(SPAN_PER_SLIT)
        )));
    }
    let half_width = slit_width / T::lit(2.0);
    let dx = grid.spacing();
    let mut warnings = Vec::new();

    let incident: Box<dyn Fn(T) -> T> = match *source {
        SourceSpec::WidePlaneWave => Box::new(|_| T::one()),
        SourceSpec::FineGaussian { fwhm, offset } => {
            if !(fwhm > T::zero()) {
                return Err(Error::domain(format!("beam FWHM must be positive, got {fwhm}")));
            }
            if offset.abs() >= grid.span() / T::lit(2.0) {
                return Err(Error::domain(format!("beam offset {offset:e} m lies outside the grid")));
            }
            if offset.abs() > half_width + T::lit(3.0) * fwhm {
                return Err(Error::EmptyField(format!(
                    "beam at {offset:e} m with FWHM {fwhm:e} m does not overlap the slit"
                )));
            }
            if fwhm * fineness_factor > slit_width || fwhm * fineness_factor > wavelength {
                warnings.push(format!(
                    "beam FWHM {fwhm:e} m is not {fineness_factor}x smaller than both the slit ({slit_width:e} m) and the wavelength ({wavelength:e} m)"
                ));
            }
            // Intensity FWHM b: |g|² = exp(-4 ln2 (x - x_b)²/b²).
            let k = T::lit(2.0 * std::f64::consts::LN_2) / (fwhm * fwhm);
            Box::new(move |x: T| (-(k * (x - offset) * (x - offset))).exp())
        }
    };

    let mut incident_energy = T::zero();
    let amplitudes: Vec<Complex<T>> = (0..grid.n_samples())
        .map(|i| {
            let x = grid.x(i);
            let g = incident(x);
            incident_energy = incident_energy + g * g;
            Complex::new(g * slit_transmission(x, half_width, dx), T::zero())
        })
        .collect();
    incident_energy = incident_energy * dx;

    let mut field = ComplexField::new(*grid, amplitudes, wavelength)?;
    let transmitted_energy = field.norm_sq();
    if !(transmitted_energy > T::zero()) {
        return Err(Error::EmptyField("no amplitude is transmitted through the slit".into()));
    }
    field.normalize()?;
    field.feature_width = Some(source.min_feature(slit_width));
    Ok(SlitField { field, transmitted_energy, incident_energy, warnings })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    /// Fresnel transfer function `exp(-iπλL f²)`.
    Paraxial,
    /// Full angular-spectrum transfer function; evanescent waves decay.
    Exact,
}

#[derive(Debug, Clone)]
pub struct Propagated<T> {
    pub field: ComplexField<T>,
    pub warnings: Vec<String>,
}

/// Propagates `field` over `distance` with the chosen transfer function.
/// The common phase `exp(ikL)` is dropped.
pub fn propagate<T: Real>(field: &ComplexField<T>, distance: T, kernel: Kernel) -> Result<Propagated<T>> {
    if !(distance >= T::zero()) || !distance.is_finite() {
        return Err(Error::domain(format!("propagation distance must be >= 0, got {distance}")));
    }
    let mut warnings = Vec::new();
    if kernel == Kernel::Paraxial {
        if let Some(w) = field.feature_width {
            let half_angle = field.wavelength / (T::lit(2.0) * w);
            if half_angle >= T::lit(PARAXIAL_HALF_ANGLE_LIMIT) {
                warnings.push(format!(
                    "paraxial kernel used at diffraction half-angle {half_angle:.3} rad (limit {PARAXIAL_HALF_ANGLE_LIMIT})"
                ));
            }
        }
    }
    let mut out = field.clone();
    if distance == T::zero() {
        return Ok(Propagated { field: out, warnings });
    }

    let grid = field.grid;
    let n = grid.n_samples();
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_forward(n).process(&mut out.amplitudes);

    let lambda = field.wavelength;
    let two_pi = T::TAU();
    let inv_lambda = lambda.recip();
    for (k, a) in out.amplitudes.iter_mut().enumerate() {
        let f = grid.frequency(k);
        let f2 = f * f;
        let h = match kernel {
            Kernel::Paraxial => Complex::from_polar(T::one(), -T::PI() * lambda * distance * f2),
            Kernel::Exact => {
                let kz2 = inv_lambda * inv_lambda - f2;
                if kz2 >= T::zero() {
                    // sqrt(1/λ² - f²) - 1/λ, written without cancellation
                    let dk = -f2 / (inv_lambda + kz2.sqrt());
                    Complex::from_polar(T::one(), two_pi * distance * dk)
                } else {
                    Complex::new((-two_pi * distance * (-kz2).sqrt()).exp(), T::zero())
                }
            }
        };
        *a = *a * h;
    }

    planner.plan_fft_inverse(n).process(&mut out.amplitudes);
    let scale = T::from_usize_lossy(n).recip();
    out.amplitudes.iter_mut().for_each(|a| *a = a.scale(scale));
    Ok(Propagated { field: out, warnings })
}

/// Per-sample |a_i|², normalized to unit trapezoid integral.
pub fn intensity_of<T: Real>(field: &ComplexField<T>) -> Result<IntensityProfile<T>> {
    if field.amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::domain("field contains non-finite amplitudes"));
    }
    let values = field.amplitudes.iter().map(|a| a.norm_sqr()).collect();
    IntensityProfile::normalized(field.grid, values)
        .map_err(|_| Error::EmptyField("field is identically zero".into()))
}

/// Peak-normalized Fraunhofer pattern sinc²(π·Δx·x/(λL)).
pub fn fraunhofer_intensity<T: Real>(slit_width: T, wavelength: T, distance: T, x: T) -> T {
    let u = T::PI() * slit_width * x / (wavelength * distance);
    if u == T::zero() {
        T::one()
    } else {
        let s = u.sin() / u;
        s * s
    }
}

/// Fraunhofer pattern sampled on `grid`, normalized to unit integral.
pub fn fraunhofer_profile<T: Real>(
    grid: &Grid1D<T>,
    slit_width: T,
    wavelength: T,
    distance: T,
) -> Result<IntensityProfile<T>> {
    for (name, v) in [("slit width", slit_width), ("wavelength", wavelength), ("distance", distance)] {
        if !(v > T::zero()) {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    let values = (0..grid.n_samples())
        .map(|i| fraunhofer_intensity(slit_width, wavelength, distance, grid.x(i)))
        .collect();
    IntensityProfile::normalized(*grid, values)
}
