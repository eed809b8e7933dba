//! Physical constants and particle species.
//!
//! Everything here is SI. Electron-volts only appear on [`Species::rest_energy`]
//! and the helpers that convert to and from it.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PLANCK_H: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK_H / (2.0 * PI);
pub const LIGHT_C: f64 = 299_792_458.0;
pub const STANDARD_GRAVITY: f64 = 9.81;
pub const BOLTZMANN_KB: f64 = 1.380_649e-23;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const AMU: f64 = 1.660_539_066_60e-27;
pub const ELECTRONVOLT: f64 = 1.602_176_634e-19;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub planck_h: f64,
    pub hbar: f64,
    pub light_c: f64,
    pub grav_g: f64,
    pub boltzmann_kb: f64,
    pub electron_mass: f64,
    pub amu: f64,
    pub electronvolt: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            planck_h: PLANCK_H,
            hbar: HBAR,
            light_c: LIGHT_C,
            grav_g: STANDARD_GRAVITY,
            boltzmann_kb: BOLTZMANN_KB,
            electron_mass: ELECTRON_MASS,
            amu: AMU,
            electronvolt: ELECTRONVOLT,
        }
    }
}

impl PhysicalConstants {
    /// Same constants with a different gravitational acceleration, for
    /// sensitivity studies of the drop experiment.
    pub fn with_gravity(grav_g: f64) -> Result<Self> {
        if !(grav_g > 0.0 && grav_g.is_finite()) {
            return Err(Error::domain(format!("gravity must be positive, got {grav_g}")));
        }
        Ok(Self { grav_g, ..Self::default() })
    }

    pub fn joules_to_ev(&self, joules: f64) -> f64 {
        joules / self.electronvolt
    }

    pub fn ev_to_joules(&self, ev: f64) -> f64 {
        ev * self.electronvolt
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub name: String,
    /// kg; zero only for the massless sentinel.
    pub mass: f64,
    /// eV
    pub rest_energy: f64,
    pub charge_label: String,
}

impl Species {
    pub fn new(name: impl Into<String>, mass: f64, charge_label: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::domain(format!("species `{name}` needs a positive mass, got {mass}")));
        }
        Ok(Self {
            rest_energy: mass * LIGHT_C * LIGHT_C / ELECTRONVOLT,
            name,
            mass,
            charge_label: charge_label.into(),
        })
    }

    pub fn from_amu(name: impl Into<String>, atomic_weight: f64, charge_label: impl Into<String>) -> Result<Self> {
        Self::new(name, atomic_weight * AMU, charge_label)
    }

    fn massless(name: &str) -> Self {
        Self { name: name.to_owned(), mass: 0.0, rest_energy: 0.0, charge_label: "neutral".to_owned() }
    }

    pub fn is_massless(&self) -> bool {
        self.mass == 0.0
    }
}

/// Atomic weights in amu. Ion masses ignore the missing electron.
const BUILTIN_AMU: &[(&str, f64, &str)] = &[
    ("Ca+", 40.08, "+1"),
    ("Ca", 40.08, "neutral"),
    ("Be+", 9.012, "+1"),
    ("Na", 22.99, "neutral"),
    ("neutron", 1.008_664_915_95, "neutral"),
];

/// Built-in species plus any registered at run time.
#[derive(Debug, Clone, Default)]
pub struct SpeciesTable {
    extra: BTreeMap<String, Species>,
}

impl SpeciesTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers (or replaces) a user species. Built-in names cannot be shadowed.
    pub fn register(&mut self, species: Species) -> Result<()> {
        if builtin(&species.name).is_some() {
            return Err(Error::domain(format!("`{}` is a built-in species", species.name)));
        }
        if species.is_massless() {
            return Err(Error::domain(format!("registered species `{}` must have mass", species.name)));
        }
        self.extra.insert(species.name.clone(), species);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Result<Species> {
        builtin(name)
            .or_else(|| self.extra.get(name).cloned())
            .ok_or_else(|| Error::UnknownSpecies(name.to_owned()))
    }

    pub fn names(&self) -> Vec<String> {
        BUILTIN_AMU
            .iter()
            .map(|(n, ..)| n.to_string())
            .chain(["electron".to_owned(), "photon".to_owned()])
            .chain(self.extra.keys().cloned())
            .collect()
    }
}

fn builtin(name: &str) -> Option<Species> {
    match name {
        "electron" => Some(Species::new("electron", ELECTRON_MASS, "-1").expect("positive mass")),
        "photon" => Some(Species::massless("photon")),
        _ => BUILTIN_AMU
            .iter()
            .find(|(n, ..)| *n == name)
            .map(|&(n, amu, q)| Species::from_amu(n, amu, q).expect("positive mass")),
    }
}

/// Looks up a built-in species by label.
pub fn species_lookup(name: &str) -> Result<Species> {
    builtin(name).ok_or_else(|| Error::UnknownSpecies(name.to_owned()))
}

/// Rest energy m·c² in eV.
pub fn rest_energy_of(species: &Species) -> Result<f64> {
    if species.is_massless() {
        return Err(Error::domain(format!(
            "`{}` is massless; photon kinematics are not supported",
            species.name
        )));
    }
    Ok(species.mass * LIGHT_C * LIGHT_C / ELECTRONVOLT)
}

/// de Broglie momentum p = h/λ.
pub fn momentum_for_wavelength(wavelength: f64) -> f64 {
    PLANCK_H / wavelength
}
