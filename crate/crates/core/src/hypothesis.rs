//! Screen-density predictions under the two competing models.
//!
//! H0 is ordinary scalar wave propagation from the slit to the screen. H1 is
//! the deterministic-deflection family: a fine beam entering at offset `x_b`
//! lands as a narrow line centred at `x_p(x_b)` with width `d(b)`, and (when
//! masked) cannot land on the zeros of the ordinary diffraction pattern, so
//! a line centred near a zero splits onto the neighbouring allowed lobes.
//!
//! The default deflection map is linear and odd, scaled so that an entry at
//! the slit edge `±Δx/2` lands on the first secondary maximum `∓1.43·λL/Δx`
//! of the Fraunhofer pattern. The width is the image of the beam under the
//! same map. Both are parameters of the family (`gain`, `width_factor`,
//! `sign`), not measured properties.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::{
    count_modes, envelope, find_extrema, first_fringe_visibility, fringe_mask, IntensityProfile, PatternFeatures,
};
use crate::quantities::{Species, PLANCK_H};
use crate::scalar::Real;
use crate::wavefield::{
    check_grid, fraunhofer_profile, intensity_of, make_slit_field, propagate, Grid1D, Kernel, SourceSpec,
};

/// Position of the first secondary maximum of sinc², in units of λL/Δx.
pub const FIRST_SIDELOBE: f64 = 1.430_296_653_124_203;
/// A local maximum counts as a mode above this fraction of the peak.
pub const MODE_FRACTION: f64 = 0.1;
/// Default visibility below which an onset-sweep row is flagged.
pub const DEFAULT_ONSET_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    /// Exact for fine sources, paraxial for wide ones.
    #[default]
    Auto,
    Paraxial,
    Exact,
}

impl KernelChoice {
    pub fn resolve<T: Real>(self, source: &SourceSpec<T>) -> Kernel {
        match self {
            KernelChoice::Paraxial => Kernel::Paraxial,
            KernelChoice::Exact => Kernel::Exact,
            KernelChoice::Auto if source.is_fine() => Kernel::Exact,
            KernelChoice::Auto => Kernel::Paraxial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario<T> {
    pub species: Species,
    pub wavelength: T,
    pub slit_width: T,
    pub distance: T,
    pub source: SourceSpec<T>,
    pub grid: Grid1D<T>,
    pub kernel: KernelChoice,
    /// Δx²/(4λL)
    pub fresnel_number: T,
}

impl<T: Real> Scenario<T> {
    pub fn new(
        species: Species,
        wavelength: T,
        slit_width: T,
        distance: T,
        source: SourceSpec<T>,
        grid: Grid1D<T>,
        kernel: KernelChoice,
    ) -> Result<Self> {
        for (name, v) in [("wavelength", wavelength), ("slit width", slit_width), ("distance", distance)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            fresnel_number: slit_width * slit_width / (T::lit(4.0) * wavelength * distance),
            species,
            wavelength,
            slit_width,
            distance,
            source,
            grid,
            kernel,
        })
    }

    /// Scenario on an automatically sized grid of `n_samples` points.
    pub fn with_auto_grid(
        species: Species,
        wavelength: T,
        slit_width: T,
        distance: T,
        source: SourceSpec<T>,
        n_samples: usize,
        kernel: KernelChoice,
    ) -> Result<Self> {
        let grid = Grid1D::auto(n_samples, wavelength, slit_width, distance, source.min_feature(slit_width))?;
        Self::new(species, wavelength, slit_width, distance, source, grid, kernel)
    }

    /// de Broglie momentum h/λ (N·s).
    pub fn momentum(&self) -> f64 {
        PLANCK_H / self.wavelength.to_f64_lossy()
    }

    /// Fringe period λL/Δx.
    pub fn fringe_period(&self) -> T {
        self.wavelength * self.distance / self.slit_width
    }

    /// Same geometry with a different slit-to-screen distance, re-gridded.
    pub fn at_distance(&self, distance: T) -> Result<Self> {
        Self::with_auto_grid(
            self.species.clone(),
            self.wavelength,
            self.slit_width,
            distance,
            self.source,
            self.grid.n_samples(),
            self.kernel,
        )
    }

    pub fn with_source(&self, source: SourceSpec<T>) -> Self {
        Self { source, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeflectionModel<T> {
    pub gain: T,
    pub width_factor: T,
    /// ±1
    pub sign: i8,
    pub mask_enabled: bool,
}

impl<T: Real> Default for DeflectionModel<T> {
    fn default() -> Self {
        Self { gain: T::one(), width_factor: T::one(), sign: -1, mask_enabled: true }
    }
}

impl<T: Real> DeflectionModel<T> {
    pub fn validate(&self) -> Result<()> {
        if self.sign != 1 && self.sign != -1 {
            return Err(Error::domain(format!("deflection sign must be ±1, got {}", self.sign)));
        }
        if !(self.gain != T::zero()) || !self.gain.is_finite() {
            return Err(Error::domain("deflection gain must be finite and non-zero"));
        }
        if !(self.width_factor >= T::zero()) || !self.width_factor.is_finite() {
            return Err(Error::domain("width factor must be finite and >= 0"));
        }
        Ok(())
    }

    /// dx_p/dx_b for a scenario.
    pub fn slope(&self, scenario: &Scenario<T>) -> T {
        let sign = if self.sign < 0 { -T::one() } else { T::one() };
        sign * self.gain * T::lit(2.0 * FIRST_SIDELOBE) * scenario.fringe_period() / scenario.slit_width
    }

    /// Landing position x_p for entry offset x_b.
    pub fn landing(&self, scenario: &Scenario<T>, offset: T) -> T {
        self.slope(scenario) * offset
    }

    /// Line width d (FWHM) for a beam of FWHM `fwhm`.
    pub fn line_width(&self, scenario: &Scenario<T>, fwhm: T) -> T {
        self.width_factor * self.slope(scenario).abs() * fwhm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelId {
    H0,
    H1,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction<T> {
    pub profile: IntensityProfile<T>,
    /// Extracted features for H0. For H1 these are the features of the
    /// ordinary pattern the mask was built from (the z_k / f_k the line is
    /// attracted to or excluded from).
    pub features: PatternFeatures<T>,
    pub model_id: ModelId,
    pub x_p: Option<T>,
    pub d: Option<T>,
    pub mode_count: usize,
    pub warnings: Vec<String>,
}

pub fn predict_h0<T: Real>(scenario: &Scenario<T>) -> Result<Prediction<T>> {
    check_grid(
        &scenario.grid,
        scenario.wavelength,
        scenario.slit_width,
        scenario.distance,
        scenario.source.min_feature(scenario.slit_width),
    )?;
    let slit = make_slit_field(&scenario.source, scenario.slit_width, &scenario.grid, scenario.wavelength)?;
    let kernel = scenario.kernel.resolve(&scenario.source);
    let propagated = propagate(&slit.field, scenario.distance, kernel)?;
    let profile = intensity_of(&propagated.field)?;
    let mut features = find_extrema(&profile).unwrap_or_default();
    if !scenario.source.is_fine() {
        features = features.with_geometry(scenario.slit_width, scenario.wavelength, scenario.distance);
    }
    let mut warnings = slit.warnings;
    warnings.extend(propagated.warnings);
    Ok(Prediction {
        mode_count: count_modes(&profile, T::lit(MODE_FRACTION)),
        profile,
        features,
        model_id: ModelId::H0,
        x_p: None,
        d: None,
        warnings,
    })
}

/// Closed-form Fraunhofer prediction for the wide beam, with exact features.
pub fn predict_fraunhofer<T: Real>(scenario: &Scenario<T>) -> Result<Prediction<T>> {
    let profile = fraunhofer_profile(&scenario.grid, scenario.slit_width, scenario.wavelength, scenario.distance)?;
    let features = PatternFeatures::fraunhofer(&scenario.grid, scenario.slit_width, scenario.wavelength, scenario.distance);
    Ok(Prediction {
        mode_count: count_modes(&profile, T::lit(MODE_FRACTION)),
        profile,
        features,
        model_id: ModelId::H0,
        x_p: None,
        d: None,
        warnings: Vec::new(),
    })
}

/// Mask and features of the ordinary pattern used by H1.
struct Curve<T> {
    mask: Vec<T>,
    features: PatternFeatures<T>,
}

fn fringe_curve<T: Real>(scenario: &Scenario<T>) -> Result<Curve<T>> {
    let profile = fraunhofer_profile(&scenario.grid, scenario.slit_width, scenario.wavelength, scenario.distance)?;
    let env = envelope(&profile, scenario.fringe_period())?;
    let mask = fringe_mask(&profile, &env)?;
    let features = PatternFeatures::fraunhofer(&scenario.grid, scenario.slit_width, scenario.wavelength, scenario.distance);
    Ok(Curve { mask: mask.values, features })
}

pub fn predict_h1<T: Real>(scenario: &Scenario<T>, model: &DeflectionModel<T>) -> Result<Prediction<T>> {
    let curve = if model.mask_enabled { Some(fringe_curve(scenario)?) } else { None };
    predict_h1_with(scenario, model, curve.as_ref())
}

fn predict_h1_with<T: Real>(
    scenario: &Scenario<T>,
    model: &DeflectionModel<T>,
    curve: Option<&Curve<T>>,
) -> Result<Prediction<T>> {
    model.validate()?;
    let SourceSpec::FineGaussian { fwhm, offset } = scenario.source else {
        return Err(Error::NotApplicable("the deflection model needs a fine-beam source".into()));
    };
    if !(fwhm > T::zero()) {
        return Err(Error::domain(format!("beam FWHM must be positive, got {fwhm}")));
    }
    let period = scenario.fringe_period();
    let x_p = model.landing(scenario, offset);
    let d = model.line_width(scenario, fwhm);
    if d >= period {
        return Err(Error::ModelBound(format!(
            "line width {d:e} m is not narrower than the fringe period {period:e} m"
        )));
    }
    let mut warnings = Vec::new();
    let floor = T::lit(2.0) * scenario.grid.spacing();
    let effective = if d < floor {
        warnings.push(format!("line width {d:e} m clamped to two grid spacings ({floor:e} m)"));
        floor
    } else {
        d
    };

    let k = T::lit(4.0 * std::f64::consts::LN_2) / (effective * effective);
    let grid = scenario.grid;
    let values: Vec<T> = (0..grid.n_samples())
        .map(|i| {
            let u = grid.x(i) - x_p;
            let g = (-(k * u * u)).exp();
            match curve {
                Some(c) => g * c.mask[i],
                None => g,
            }
        })
        .collect();
    let profile = IntensityProfile::normalized(grid, values)
        .map_err(|_| Error::EmptyField(format!("the line at {x_p:e} m has no mass on the grid")))?;
    let features = match curve {
        Some(c) => c.features.clone(),
        None => PatternFeatures::fraunhofer(&grid, scenario.slit_width, scenario.wavelength, scenario.distance),
    };
    Ok(Prediction {
        mode_count: count_modes(&profile, T::lit(MODE_FRACTION)),
        profile,
        features,
        model_id: ModelId::H1,
        x_p: Some(x_p),
        d: Some(d),
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct SweepStep<T> {
    pub x_b: T,
    pub prediction: Prediction<T>,
}

/// H1 predictions for `steps` offsets spread uniformly over [0, Δx/2].
pub fn sweep_xb<T: Real>(scenario: &Scenario<T>, model: &DeflectionModel<T>, steps: usize) -> Result<Vec<SweepStep<T>>> {
    if steps < 3 {
        return Err(Error::pre(format!("an offset sweep needs at least 3 steps, got {steps}")));
    }
    let half = scenario.slit_width / T::lit(2.0);
    let offsets: Vec<T> = (0..steps)
        .map(|k| half * T::from_usize_lossy(k) / T::from_usize_lossy(steps - 1))
        .collect();
    run_offsets(scenario, model, &offsets)
}

fn run_offsets<T: Real>(scenario: &Scenario<T>, model: &DeflectionModel<T>, offsets: &[T]) -> Result<Vec<SweepStep<T>>> {
    if !scenario.source.is_fine() {
        return Err(Error::NotApplicable("the deflection model needs a fine-beam source".into()));
    }
    let curve = if model.mask_enabled { Some(fringe_curve(scenario)?) } else { None };
    offsets
        .par_iter()
        .map(|&x_b| {
            let shifted = scenario.with_source(scenario.source.with_offset(x_b));
            predict_h1_with(&shifted, model, curve.as_ref()).map(|prediction| SweepStep { x_b, prediction })
        })
        .collect()
}

/// (Δx·Δp)/h with Δp = (h/λ)·(half-width)/L; the half-width is W/2 for H0
/// and d/2 for H1.
pub fn uncertainty_product<T: Real>(prediction: &Prediction<T>, scenario: &Scenario<T>) -> Result<T> {
    let half_width = match prediction.model_id {
        ModelId::H0 => prediction
            .features
            .width
            .ok_or_else(|| Error::NotApplicable("prediction has no measurable width".into()))?
            .to_f64_lossy()
            / 2.0,
        ModelId::H1 => {
            prediction.d.ok_or_else(|| Error::NotApplicable("H1 prediction without a line width".into()))?.to_f64_lossy()
                / 2.0
        }
    };
    let momentum = PLANCK_H / scenario.wavelength.to_f64_lossy();
    let spread = momentum * half_width / scenario.distance.to_f64_lossy();
    Ok(T::lit(scenario.slit_width.to_f64_lossy() * spread / PLANCK_H))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OnsetRow<T> {
    pub distance: T,
    pub fresnel_number: T,
    pub visibility: Option<T>,
    /// Visibility below the onset threshold.
    pub flagged: bool,
    pub error: Option<String>,
}

/// L values log-spaced so that N_F runs from `nf_min` to `nf_max`, largest
/// distance first.
pub fn onset_distances<T: Real>(scenario: &Scenario<T>, nf_min: T, nf_max: T, points: usize) -> Vec<T> {
    let l_at = |nf: T| scenario.slit_width * scenario.slit_width / (T::lit(4.0) * scenario.wavelength * nf);
    let (l_max, l_min) = (l_at(nf_min), l_at(nf_max));
    let points = points.max(2);
    (0..points)
        .map(|i| {
            let t = T::from_usize_lossy(i) / T::from_usize_lossy(points - 1);
            (l_max.ln() + (l_min.ln() - l_max.ln()) * t).exp()
        })
        .collect()
}

/// Wide-beam H0 at each distance, measuring the first-fringe visibility.
pub fn fringe_onset_sweep<T: Real>(scenario: &Scenario<T>, distances: &[T], threshold: T) -> Result<Vec<OnsetRow<T>>> {
    if distances.len() < 2 || distances.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::pre("onset distances must be strictly decreasing"));
    }
    let fresnel = |l: T| scenario.slit_width * scenario.slit_width / (T::lit(4.0) * scenario.wavelength * l);
    let (first, last) = (fresnel(distances[0]), fresnel(*distances.last().expect("len >= 2")));
    if first > T::lit(0.01) * T::lit(1.0 + 1e-9) || last < T::lit(10.0) * T::lit(1.0 - 1e-9) {
        return Err(Error::pre(format!(
            "onset sweep must span Fresnel numbers from <= 0.01 to >= 10 (got {first:e} .. {last:e})"
        )));
    }
    let wide = scenario.with_source(SourceSpec::WidePlaneWave);
    let rows = distances
        .par_iter()
        .map(|&distance| {
            let fresnel_number = fresnel(distance);
            let measured = wide
                .at_distance(distance)
                .and_then(|s| predict_h0(&s))
                .and_then(|p| first_fringe_visibility(&p.features))
                .and_then(|v| {
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::domain("non-finite visibility"))
                    }
                });
            match measured {
                Ok(v) => OnsetRow { distance, fresnel_number, visibility: Some(v), flagged: v < threshold, error: None },
                Err(e) => OnsetRow { distance, fresnel_number, visibility: None, flagged: true, error: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(rows)
}

/// Relative L2 distance between the offset-averaged H1 density (offsets
/// uniform over the slit) and the H0 wide-beam profile.
pub fn ensemble_consistency<T: Real>(scenario: &Scenario<T>, model: &DeflectionModel<T>, steps: usize) -> Result<T> {
    if steps < 16 {
        return Err(Error::pre(format!("ensemble average needs at least 16 offsets, got {steps}")));
    }
    let half = scenario.slit_width / T::lit(2.0);
    let offsets: Vec<T> = (0..steps)
        .map(|k| -half + scenario.slit_width * T::from_usize_lossy(k) / T::from_usize_lossy(steps - 1))
        .collect();
    let predictions = run_offsets(scenario, model, &offsets)?;
    let n = scenario.grid.n_samples();
    let mut mean = vec![T::zero(); n];
    for step in &predictions {
        for (m, v) in mean.iter_mut().zip(&step.prediction.profile.values) {
            *m = *m + *v;
        }
    }
    let mixture = IntensityProfile::normalized(scenario.grid, mean)?;
    let reference = predict_h0(&scenario.with_source(SourceSpec::WidePlaneWave))?;
    mixture.relative_l2(&reference.profile)
}
