// Drop-experiment numbers quoted alongside their relative tolerances.

use slitlab_core::feasibility::*;
use slitlab_core::quantities::{rest_energy_of, species_lookup, ELECTRONVOLT, STANDARD_GRAVITY};

pub struct Row {
    pub name: &'static str,
    pub computed: f64,
    pub quoted: f64,
    pub tolerance: f64,
}

pub fn table() -> Vec<Row> {
    let ca_ion = species_lookup("Ca+").unwrap();
    let ca = species_lookup("Ca").unwrap();
    let be = species_lookup("Be+").unwrap();
    let na = species_lookup("Na").unwrap();
    let electron = species_lookup("electron").unwrap();

    let fall = free_fall(0.01, &ca_ion).unwrap();
    let be_energy = be.mass * STANDARD_GRAVITY * 0.01 / ELECTRONVOLT;
    let radial = zero_point(1.39e6, &ca_ion).unwrap();
    let axial = zero_point(134e3, &ca_ion).unwrap();
    let critical = energy_equivalents(1e-29, &ca).unwrap();
    let na_fall = free_fall(0.01, &na).unwrap();
    let row = |name, computed, quoted, tolerance| Row { name, computed, quoted, tolerance };
    vec![
        row("Ca+ E_k (neV)", fall.kinetic_energy_ev * 1e9, 41.0, 0.02),
        row("Ca+ t_fall (ms)", fall.time_s * 1e3, 45.0, 0.02),
        row("Ca+ lambda (nm)", de_broglie(fall.kinetic_energy_ev, &ca_ion).unwrap().wavelength_m * 1e9, 21.0, 0.10),
        row("Be+ lambda (nm)", de_broglie(be_energy, &be).unwrap().wavelength_m * 1e9, 105.0, 0.10),
        row("electron 1.5 eV lambda (nm)", de_broglie(1.5, &electron).unwrap().wavelength_m * 1e9, 1.0, 0.02),
        row("E_r (neV)", radial.energy_ev * 1e9, 2.9, 0.05),
        row("lambda_r (nm)", radial.wavelength_m * 1e9, 83.0, 0.05),
        row("E_z (neV)", axial.energy_ev * 1e9, 0.3, 0.10),
        row("lambda_z (nm)", axial.wavelength_m * 1e9, 245.0, 0.15),
        row("Ca ground-state FWHM at 1 Hz (um)", ground_state_fwhm(1.0, &ca).unwrap() * 1e6, 40.0, 0.10),
        row("p_limit 200 nm (N s)", momentum_budget(200e-9, 100.0).unwrap().limit_ns, 3.3e-27, 0.02),
        row("E_x (J)", critical.energy_j, 7.7e-34, 0.05),
        row("T (pK)", critical.temperature_k * 1e12, 100.0, 0.15),
        row("nu (Hz)", critical.frequency_hz, 3.0, 0.30),
        row("Na zero-point p (N s)", zero_point(1.0, &na).unwrap().momentum_ns, 5e-30, 0.10),
        row("Na 1 cm E_k (neV)", na_fall.kinetic_energy_ev * 1e9, 23.0, 0.05),
        row("Na 1 cm lambda (nm)", de_broglie(na_fall.kinetic_energy_ev, &na).unwrap().wavelength_m * 1e9, 37.0, 0.10),
        row("lens budget 50 um (N s)", lens_shift_budget(50e-6, 0.045, &ca).unwrap().momentum_ns, 0.7e-28, 0.10),
        row("lens budget 1 um (N s)", lens_shift_budget(1e-6, 0.045, &ca).unwrap().momentum_ns, 1.4e-30, 0.10),
        row("knockout duration (s)", knockout_selection(2e-6, 44e-9).unwrap(), 45.0, 0.05),
        row("drift (um)", drift(130e-6, 0.09) * 1e6, 12.0, 0.10),
        row("Ca+ rest energy (GeV)", rest_energy_of(&ca_ion).unwrap() * 1e-9, 38.0, 0.02),
    ]
}

impl Row {
    pub fn relative_error(&self) -> f64 {
        (self.computed - self.quoted).abs() / self.quoted
    }

    pub fn passes(&self) -> bool {
        self.relative_error() <= self.tolerance
    }
}
