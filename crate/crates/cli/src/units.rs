//! Unit-suffixed quantities such as `"20um"` or `"41 neV"`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    /// Stored in eV.
    Energy,
    Frequency,
    Time,
    Mass,
    Velocity,
}

impl Dimension {
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dimension::Length => &[
                ("pm", 1e-12),
                ("nm", 1e-9),
                ("um", 1e-6),
                ("μm", 1e-6),
                ("µm", 1e-6),
                ("mm", 1e-3),
                ("cm", 1e-2),
                ("m", 1.0),
            ],
            Dimension::Energy => &[
                ("neV", 1e-9),
                ("ueV", 1e-6),
                ("μeV", 1e-6),
                ("meV", 1e-3),
                ("eV", 1.0),
                ("keV", 1e3),
                ("MeV", 1e6),
                ("GeV", 1e9),
            ],
            Dimension::Frequency => &[("Hz", 1.0), ("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9)],
            Dimension::Time => &[("ns", 1e-9), ("us", 1e-6), ("μs", 1e-6), ("ms", 1e-3), ("s", 1.0)],
            Dimension::Mass => &[("kg", 1.0), ("amu", slitlab_core::quantities::AMU), ("u", slitlab_core::quantities::AMU)],
            Dimension::Velocity => &[("nm/s", 1e-9), ("um/s", 1e-6), ("μm/s", 1e-6), ("mm/s", 1e-3), ("m/s", 1.0)],
        }
    }

    /// Unit used when writing a value back out.
    pub fn canonical_unit(self) -> &'static str {
        match self {
            Dimension::Length => "m",
            Dimension::Energy => "eV",
            Dimension::Frequency => "Hz",
            Dimension::Time => "s",
            Dimension::Mass => "kg",
            Dimension::Velocity => "m/s",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Length => "length",
            Dimension::Energy => "energy",
            Dimension::Frequency => "frequency",
            Dimension::Time => "time",
            Dimension::Mass => "mass",
            Dimension::Velocity => "velocity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitError(pub String);

impl fmt::Display for UnitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Parses `<number><unit>` (whitespace allowed between) into the SI value
/// of `dim` (eV for energies).
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, UnitError> {
    let text = text.trim();
    let mut units: Vec<&(&str, f64)> = dim.units().iter().collect();
    units.sort_by_key(|(u, _)| std::cmp::Reverse(u.len()));
    for (unit, scale) in units {
        if let Some(number) = text.strip_suffix(unit) {
            let number = number.trim_end();
            if number.is_empty() {
                break;
            }
            let value: f64 = number
                .parse()
                .map_err(|_| UnitError(format!("`{number}` is not a number")))?;
            if !value.is_finite() {
                return Err(UnitError(format!("`{text}` is not finite")));
            }
            return Ok(scaled(number, value, *scale));
        }
    }
    let known: Vec<&str> = dim.units().iter().map(|(u, _)| *u).collect();
    Err(UnitError(format!("`{text}` needs a {} unit ({})", dim.name(), known.join(", "))))
}

/// `number × scale`, rounded once when the scale is a power of ten.
fn scaled(number: &str, value: f64, scale: f64) -> f64 {
    if scale == 1.0 {
        return value;
    }
    let exponent = scale.log10().round();
    if 10f64.powi(exponent as i32) == scale && !number.contains(['e', 'E']) {
        if let Ok(v) = format!("{number}e{exponent}").parse() {
            return v;
        }
    }
    value * scale
}

/// Shortest text that parses back to exactly `value`.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    format!("{value:e}{}", dim.canonical_unit())
}

/// SI-prefixed rendering for tables and plot axes.
pub fn si_prefixed(value: f64, unit: &str) -> String {
    const PREFIXES: [(f64, &str); 9] =
        [(1e9, "G"), (1e6, "M"), (1e3, "k"), (1.0, ""), (1e-3, "m"), (1e-6, "μ"), (1e-9, "n"), (1e-12, "p"), (1e-15, "f")];
    if value == 0.0 || !value.is_finite() {
        return format!("{value} {unit}");
    }
    let magnitude = value.abs();
    let (scale, prefix) = PREFIXES.iter().find(|(s, _)| magnitude >= *s * 0.999_999_5).copied().unwrap_or((1e-15, "f"));
    format!("{:.4} {prefix}{unit}", value / scale)
}
