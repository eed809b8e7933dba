//! Design calculators for the drop experiment: a cold ion or atom released
//! from a trap falls onto the slit, and its residual transverse momentum has
//! to stay well below h/Δx.
//!
//! All inputs and outputs are SI except energies, which are reported in eV
//! alongside joules where both are useful.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantities::{
    rest_energy_of, Species, BOLTZMANN_KB, ELECTRONVOLT, HBAR, LIGHT_C, PLANCK_H, STANDARD_GRAVITY,
};

/// Required ratio between the de Broglie wavelength and the beam width.
pub const DEFAULT_WAVELENGTH_FACTOR: f64 = 4.0;
/// Momentum margin below h/Δx ("two orders of magnitude").
pub const DEFAULT_MARGIN_FACTOR: f64 = 100.0;
pub const DEFAULT_BEAM_WIDTH: f64 = 5e-9;
pub const DEFAULT_DRIFT_BUDGET: f64 = 2e-9;
/// E_k/E_o above which the approximate wavelength formula is flagged.
pub const NONRELATIVISTIC_LIMIT: f64 = 1e-3;

fn require_mass(species: &Species) -> Result<f64> {
    if species.is_massless() {
        Err(Error::domain(format!("`{}` is massless", species.name)))
    } else {
        Ok(species.mass)
    }
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeFall {
    pub time_s: f64,
    pub velocity_m_s: f64,
    pub kinetic_energy_ev: f64,
}

pub fn free_fall(drop_height: f64, species: &Species) -> Result<FreeFall> {
    free_fall_with_gravity(drop_height, species, STANDARD_GRAVITY)
}

pub fn free_fall_with_gravity(drop_height: f64, species: &Species, grav_g: f64) -> Result<FreeFall> {
    if !(drop_height >= 0.0) || !drop_height.is_finite() {
        return Err(Error::domain(format!("drop height must be >= 0, got {drop_height}")));
    }
    require_positive("gravity", grav_g)?;
    let mass = require_mass(species)?;
    let time_s = (2.0 * drop_height / grav_g).sqrt();
    Ok(FreeFall {
        time_s,
        velocity_m_s: grav_g * time_s,
        kinetic_energy_ev: mass * grav_g * drop_height / ELECTRONVOLT,
    })
}

/// Drop height giving kinetic energy `energy_ev` at the slit.
pub fn drop_height_for_energy(energy_ev: f64, species: &Species) -> Result<f64> {
    require_positive("kinetic energy", energy_ev)?;
    Ok(energy_ev * ELECTRONVOLT / (require_mass(species)? * STANDARD_GRAVITY))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeBroglie {
    /// hc/√(2·E_k·E_o)
    pub wavelength_m: f64,
    /// h/√(2·m·E_k)
    pub nonrelativistic_m: f64,
    pub warning: Option<String>,
}

pub fn de_broglie(kinetic_energy_ev: f64, species: &Species) -> Result<DeBroglie> {
    require_positive("kinetic energy", kinetic_energy_ev)?;
    let rest_ev = rest_energy_of(species)?;
    let e_k = kinetic_energy_ev * ELECTRONVOLT;
    let e_o = rest_ev * ELECTRONVOLT;
    let ratio = kinetic_energy_ev / rest_ev;
    Ok(DeBroglie {
        wavelength_m: PLANCK_H * LIGHT_C / (2.0 * e_k * e_o).sqrt(),
        nonrelativistic_m: PLANCK_H / (2.0 * species.mass * e_k).sqrt(),
        warning: (ratio >= NONRELATIVISTIC_LIMIT)
            .then(|| format!("E_k/E_o = {ratio:.3e} is not small; the approximate wavelength formula degrades")),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroPoint {
    pub energy_ev: f64,
    pub wavelength_m: f64,
    pub momentum_ns: f64,
}

/// Ground state of a harmonic trap: E = hν/2, p = √(2mE), λ = h/p.
pub fn zero_point(freq_hz: f64, species: &Species) -> Result<ZeroPoint> {
    require_positive("trap frequency", freq_hz)?;
    let mass = require_mass(species)?;
    let energy = PLANCK_H * freq_hz / 2.0;
    let momentum = (2.0 * mass * energy).sqrt();
    Ok(ZeroPoint { energy_ev: energy / ELECTRONVOLT, wavelength_m: PLANCK_H / momentum, momentum_ns: momentum })
}

/// FWHM of the ground-state amplitude exp(−αx²/2), α = m·2πν/ħ.
pub fn ground_state_fwhm(freq_hz: f64, species: &Species) -> Result<f64> {
    require_positive("trap frequency", freq_hz)?;
    let alpha = require_mass(species)? * std::f64::consts::TAU * freq_hz / HBAR;
    Ok(2.0 * (2.0 * std::f64::consts::LN_2 / alpha).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumBudget {
    /// h/Δx
    pub limit_ns: f64,
    pub threshold_ns: f64,
}

pub fn momentum_budget(slit_width: f64, margin_factor: f64) -> Result<MomentumBudget> {
    require_positive("slit width", slit_width)?;
    if !(margin_factor >= 1.0) || !margin_factor.is_finite() {
        return Err(Error::domain(format!("margin factor must be >= 1, got {margin_factor}")));
    }
    let limit_ns = PLANCK_H / slit_width;
    Ok(MomentumBudget { limit_ns, threshold_ns: limit_ns / margin_factor })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEquivalents {
    pub energy_j: f64,
    /// T with E = k_B·T/2
    pub temperature_k: f64,
    /// ν with E = h·ν/2
    pub frequency_hz: f64,
}

pub fn energy_equivalents(momentum_ns: f64, species: &Species) -> Result<EnergyEquivalents> {
    if !(momentum_ns >= 0.0) || !momentum_ns.is_finite() {
        return Err(Error::domain(format!("momentum must be >= 0, got {momentum_ns}")));
    }
    let energy_j = momentum_ns * momentum_ns / (2.0 * require_mass(species)?);
    Ok(EnergyEquivalents {
        energy_j,
        temperature_k: 2.0 * energy_j / BOLTZMANN_KB,
        frequency_hz: 2.0 * energy_j / PLANCK_H,
    })
}

/// Inverse of [`energy_equivalents`] on the energy leg.
pub fn momentum_for_energy(energy_j: f64, species: &Species) -> Result<f64> {
    if !(energy_j >= 0.0) {
        return Err(Error::domain(format!("energy must be >= 0, got {energy_j}")));
    }
    Ok((2.0 * require_mass(species)? * energy_j).sqrt())
}

pub fn energy_from_temperature(temperature_k: f64) -> f64 {
    BOLTZMANN_KB * temperature_k / 2.0
}

pub fn energy_from_frequency(freq_hz: f64) -> f64 {
    PLANCK_H * freq_hz / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensShift {
    pub velocity_m_s: f64,
    pub momentum_ns: f64,
}

/// Transverse velocity and momentum needed to move an atom by `offset`
/// during the fall.
pub fn lens_shift_budget(offset: f64, fall_time: f64, species: &Species) -> Result<LensShift> {
    require_positive("fall time", fall_time)?;
    if !(offset >= 0.0) {
        return Err(Error::domain(format!("lens offset must be >= 0, got {offset}")));
    }
    let velocity_m_s = offset / fall_time;
    Ok(LensShift { velocity_m_s, momentum_ns: require_mass(species)? * velocity_m_s })
}

/// How long the knockout laser must act so that survivors inside `window`
/// are known to move slower than `v_max`.
pub fn knockout_selection(window: f64, v_max: f64) -> Result<f64> {
    require_positive("selection window", window)?;
    require_positive("maximum velocity", v_max)?;
    Ok(window / v_max)
}

pub fn drift(velocity: f64, time: f64) -> f64 {
    velocity * time
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropScenario {
    pub species: Species,
    pub drop_height: f64,
    pub slit_width: f64,
    pub radial_freq: f64,
    pub axial_freq: f64,
    /// Width of the knockout selection window.
    pub beam_window: f64,
    pub lens_offset_max: f64,
    pub margin_factor: f64,
    /// Width of the beam delivered into the slit.
    pub beam_width: f64,
    /// Largest tolerated lateral drift during the fall.
    pub drift_budget: f64,
    pub wavelength_factor: f64,
    /// Velocity cut of the knockout selection; `None` derives it from the
    /// drift budget and the fall time.
    pub knockout_v_max: Option<f64>,
    pub grav_g: f64,
}

impl DropScenario {
    /// Ca⁺ in a linear Paul trap dropped 1 cm onto a 200 nm slit.
    pub fn calcium_paul_trap() -> Self {
        Self {
            species: crate::quantities::species_lookup("Ca+").expect("built-in"),
            drop_height: 0.01,
            slit_width: 200e-9,
            radial_freq: 1.39e6,
            axial_freq: 134e3,
            beam_window: 2e-6,
            lens_offset_max: 50e-6,
            margin_factor: DEFAULT_MARGIN_FACTOR,
            beam_width: DEFAULT_BEAM_WIDTH,
            drift_budget: DEFAULT_DRIFT_BUDGET,
            wavelength_factor: DEFAULT_WAVELENGTH_FACTOR,
            knockout_v_max: None,
            grav_g: STANDARD_GRAVITY,
        }
    }

    /// Na condensate in a 1 Hz trap, dropped 1 cm, with knockout selection.
    pub fn sodium_condensate() -> Self {
        Self {
            species: crate::quantities::species_lookup("Na").expect("built-in"),
            radial_freq: 1.0,
            axial_freq: 1.0,
            lens_offset_max: 1e-6,
            knockout_v_max: Some(44e-9),
            ..Self::calcium_paul_trap()
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_mass(&self.species)?;
        for (name, v) in [
            ("slit width", self.slit_width),
            ("radial frequency", self.radial_freq),
            ("axial frequency", self.axial_freq),
            ("beam window", self.beam_window),
            ("beam width", self.beam_width),
            ("drift budget", self.drift_budget),
            ("wavelength factor", self.wavelength_factor),
            ("gravity", self.grav_g),
            ("drop height", self.drop_height),
        ] {
            require_positive(name, v)?;
        }
        if !(self.lens_offset_max >= 0.0) {
            return Err(Error::domain("lens offset must be >= 0"));
        }
        if !(self.margin_factor >= 1.0) {
            return Err(Error::domain(format!("margin factor must be >= 1, got {}", self.margin_factor)));
        }
        if let Some(v) = self.knockout_v_max {
            require_positive("knockout velocity cut", v)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub quantity: String,
    pub value: f64,
    pub threshold: f64,
    pub unit: String,
    /// `value <= threshold` or `value >= threshold`.
    pub relation: String,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, quantity: &str, value: f64, threshold: f64, unit: &str) -> Self {
        Self {
            name: name.into(),
            quantity: quantity.into(),
            value,
            threshold,
            unit: unit.into(),
            relation: "<=".into(),
            passed: value <= threshold,
        }
    }

    fn at_least(name: &str, quantity: &str, value: f64, threshold: f64, unit: &str) -> Self {
        Self { relation: ">=".into(), passed: value >= threshold, ..Self::at_most(name, quantity, value, threshold, unit) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnockoutSummary {
    pub v_max_m_s: f64,
    pub duration_s: f64,
    pub drift_m: f64,
    pub momentum_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub species: String,
    pub t_fall_s: f64,
    pub v_impact_m_s: f64,
    pub kinetic_energy_ev: f64,
    pub lambda_db_m: f64,
    pub lambda_db_nonrelativistic_m: f64,
    pub zero_point_radial: ZeroPoint,
    pub zero_point_axial: ZeroPoint,
    /// Ground-state FWHM at the radial frequency.
    pub fwhm_ground_m: f64,
    pub p_limit_ns: f64,
    pub p_threshold_ns: f64,
    /// Energy equivalents of the momentum threshold.
    pub critical: EnergyEquivalents,
    pub knockout: KnockoutSummary,
    pub lens: LensShift,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl FeasibilityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn evaluate_scenario(s: &DropScenario) -> Result<FeasibilityReport> {
    s.validate()?;
    let species = &s.species;
    let fall = free_fall_with_gravity(s.drop_height, species, s.grav_g)?;
    let wave = de_broglie(fall.kinetic_energy_ev, species)?;
    let radial = zero_point(s.radial_freq, species)?;
    let axial = zero_point(s.axial_freq, species)?;
    let fwhm_ground_m = ground_state_fwhm(s.radial_freq, species)?;
    let budget = momentum_budget(s.slit_width, s.margin_factor)?;
    let critical = energy_equivalents(budget.threshold_ns, species)?;
    let lens = lens_shift_budget(s.lens_offset_max, fall.time_s, species)?;

    let v_max = s.knockout_v_max.unwrap_or(s.drift_budget / fall.time_s);
    let knockout = KnockoutSummary {
        v_max_m_s: v_max,
        duration_s: knockout_selection(s.beam_window, v_max)?,
        drift_m: drift(v_max, fall.time_s),
        momentum_ns: species.mass * v_max,
    };

    let checks = vec![
        Check::at_most(
            "zero-point momentum",
            "radial zero-point momentum vs h/Δx / margin",
            radial.momentum_ns,
            budget.threshold_ns,
            "N·s",
        ),
        Check::at_least(
            "sub-wavelength beam",
            "de Broglie wavelength vs factor × beam width",
            wave.wavelength_m,
            s.wavelength_factor * s.beam_width,
            "m",
        ),
        Check::at_most("knockout drift", "drift at the velocity cut over the fall", knockout.drift_m, s.drift_budget, "m"),
        Check::at_most(
            "knockout momentum",
            "momentum at the velocity cut vs h/Δx / margin",
            knockout.momentum_ns,
            budget.threshold_ns,
            "N·s",
        ),
        Check::at_most("lens shift", "momentum of the lens shift vs h/Δx", lens.momentum_ns, budget.limit_ns, "N·s"),
    ];

    Ok(FeasibilityReport {
        species: species.name.clone(),
        t_fall_s: fall.time_s,
        v_impact_m_s: fall.velocity_m_s,
        kinetic_energy_ev: fall.kinetic_energy_ev,
        lambda_db_m: wave.wavelength_m,
        lambda_db_nonrelativistic_m: wave.nonrelativistic_m,
        zero_point_radial: radial,
        zero_point_axial: axial,
        fwhm_ground_m,
        p_limit_ns: budget.limit_ns,
        p_threshold_ns: budget.threshold_ns,
        critical,
        knockout,
        lens,
        checks,
        warnings: wave.warning.into_iter().collect(),
    })
}
