//! Run configuration: a TOML document with strict keys and unit-suffixed
//! physical quantities.

use std::collections::BTreeSet;
use std::fmt;

use slitlab_core::hypothesis::KernelChoice;
use toml::{Table, Value};

use crate::units::{format_quantity, parse_quantity, Dimension};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("unit error in `{key}`: {message}")]
    Unit { key: String, message: String },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("`{key}` must be {expected}")]
    Type { key: String, expected: &'static str },
    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CommandName {
    Simulate,
    Buildup,
    SweepXb,
    Onset,
    Feasibility,
    Compare,
}

impl CommandName {
    pub const ALL: [CommandName; 6] = [
        CommandName::Simulate,
        CommandName::Buildup,
        CommandName::SweepXb,
        CommandName::Onset,
        CommandName::Feasibility,
        CommandName::Compare,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Simulate => "simulate",
            CommandName::Buildup => "buildup",
            CommandName::SweepXb => "sweep-xb",
            CommandName::Onset => "onset",
            CommandName::Feasibility => "feasibility",
            CommandName::Compare => "compare",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }

    pub fn needs_scenario(self) -> bool {
        self != CommandName::Feasibility
    }
}

impl fmt::Display for CommandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    H0,
    H1,
    Fraunhofer,
}

impl Hypothesis {
    fn as_str(self) -> &'static str {
        match self {
            Hypothesis::H0 => "h0",
            Hypothesis::H1 => "h1",
            Hypothesis::Fraunhofer => "fraunhofer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Wide,
    Fine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesEntry {
    pub name: String,
    /// kg
    pub mass: f64,
    pub charge: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub species: String,
    pub wavelength: Option<f64>,
    /// eV; used when no wavelength is given.
    pub kinetic_energy: Option<f64>,
    pub slit_width: f64,
    pub distance: f64,
    pub source: SourceKind,
    pub beam_fwhm: Option<f64>,
    pub beam_offset: f64,
    pub grid_samples: usize,
    pub kernel: KernelChoice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub hypothesis: Hypothesis,
    pub gain: f64,
    pub width_factor: f64,
    pub sign: i8,
    pub mask: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingConfig {
    pub events: usize,
    pub seed: u64,
    pub checkpoints: Vec<usize>,
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnsetConfig {
    pub nf_min: f64,
    pub nf_max: f64,
    pub points: usize,
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    CaPaulTrap,
    NaCondensate,
}

impl Preset {
    fn as_str(self) -> &'static str {
        match self {
            Preset::CaPaulTrap => "ca-paul-trap",
            Preset::NaCondensate => "na-condensate",
        }
    }

    pub fn scenario(self) -> slitlab_core::feasibility::DropScenario {
        match self {
            Preset::CaPaulTrap => slitlab_core::feasibility::DropScenario::calcium_paul_trap(),
            Preset::NaCondensate => slitlab_core::feasibility::DropScenario::sodium_condensate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityConfig {
    pub preset: Preset,
    pub species: String,
    pub drop_height: f64,
    pub slit_width: f64,
    pub radial_freq: f64,
    pub axial_freq: f64,
    pub beam_window: f64,
    pub lens_offset_max: f64,
    pub margin_factor: f64,
    pub beam_width: f64,
    pub drift_budget: f64,
    pub wavelength_factor: f64,
    pub knockout_v_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "svg" => Some(Format::Svg),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: String,
    pub formats: BTreeSet<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Option<CommandName>,
    pub species: Vec<SpeciesEntry>,
    pub scenario: Option<ScenarioConfig>,
    pub model: ModelConfig,
    pub sampling: SamplingConfig,
    pub sweep: SweepConfig,
    pub onset: OnsetConfig,
    pub feasibility: FeasibilityConfig,
    pub output: OutputConfig,
}

pub const DEFAULT_GRID_SAMPLES: usize = 1 << 16;
pub const DEFAULT_EVENTS: usize = 100_000;
pub const DEFAULT_BINS: usize = 128;
pub const DEFAULT_SWEEP_STEPS: usize = 9;

fn default_checkpoints(events: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(10usize), |c| c.checked_mul(10)).take_while(|&c| c < events).collect();
    out.push(events);
    out
}

/// Strict view of one table: every key must be consumed.
struct Block {
    path: String,
    table: Table,
}

/// Keys each table accepts. Checked before any value is read so a typo is
/// reported as itself rather than as a missing key.
fn known_keys(table: &str) -> &'static [&'static str] {
    match table {
        "" => &["run", "species", "scenario", "model", "sampling", "sweep", "onset", "feasibility", "output"],
        "run" => &["command"],
        "species" => &["name", "mass", "charge"],
        "scenario" => &[
            "species",
            "wavelength",
            "kinetic_energy",
            "slit_width",
            "distance",
            "source",
            "beam_fwhm",
            "beam_offset",
            "grid_samples",
            "kernel",
        ],
        "model" => &["hypothesis", "gain", "width_factor", "sign", "mask"],
        "sampling" => &["events", "seed", "checkpoints", "bins"],
        "sweep" => &["steps"],
        "onset" => &["nf_min", "nf_max", "points", "threshold"],
        "feasibility" => &[
            "preset",
            "species",
            "drop_height",
            "slit_width",
            "radial_freq",
            "axial_freq",
            "beam_window",
            "lens_offset_max",
            "margin_factor",
            "beam_width",
            "drift_budget",
            "wavelength_factor",
            "knockout_v_max",
        ],
        "output" => &["directory", "formats"],
        _ => &[],
    }
}

impl Block {
    /// `kind` names the table for key checking; `path` is used in messages.
    fn new(kind: &str, path: &str, table: Table) -> Result<Self, ConfigError> {
        let block = Self { path: path.to_owned(), table };
        let known = known_keys(kind);
        match block.table.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(ConfigError::UnknownKey(block.key(k))),
            None => Ok(block),
        }
    }

    fn empty(path: &str) -> Self {
        Self { path: path.to_owned(), table: Table::new() }
    }

    fn key(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_owned()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.table.remove(key)
    }

    fn string(&mut self, key: &str) -> Result<Option<String>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(ConfigError::Type { key: self.key(key), expected: "a string" }),
        }
    }

    fn quantity(&mut self, key: &str, dim: Dimension) -> Result<Option<f64>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => parse_quantity(&s, dim)
                .map(Some)
                .map_err(|e| ConfigError::Unit { key: self.key(key), message: e.0 }),
            Some(Value::Integer(_) | Value::Float(_)) => Err(ConfigError::Unit {
                key: self.key(key),
                message: format!("bare number; write it as a string with a {} unit, e.g. \"20um\"", dim.name()),
            }),
            Some(_) => Err(ConfigError::Type { key: self.key(key), expected: "a quoted quantity with unit" }),
        }
    }

    fn required_quantity(&mut self, key: &str, dim: Dimension) -> Result<f64, ConfigError> {
        self.quantity(key, dim)?.ok_or_else(|| ConfigError::Missing(self.key(key)))
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(f)),
            Some(Value::Integer(i)) => Ok(Some(i as f64)),
            Some(_) => Err(ConfigError::Type { key: self.key(key), expected: "a number" }),
        }
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if i >= 0 => Ok(Some(i as usize)),
            Some(_) => Err(ConfigError::Type { key: self.key(key), expected: "a non-negative integer" }),
        }
    }

    fn boolean(&mut self, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(b)),
            Some(_) => Err(ConfigError::Type { key: self.key(key), expected: "true or false" }),
        }
    }

    fn counts(&mut self, key: &str) -> Result<Option<Vec<usize>>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .into_iter()
                .map(|v| match v {
                    Value::Integer(i) if i >= 0 => Ok(i as usize),
                    _ => Err(ConfigError::Type { key: self.key(key), expected: "an array of non-negative integers" }),
                })
                .collect::<Result<_, _>>()
                .map(Some),
            Some(_) => Err(ConfigError::Type { key: self.key(key), expected: "an array of non-negative integers" }),
        }
    }

    fn strings(&mut self, key: &str) -> Result<Option<Vec<String>>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .into_iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s),
                    _ => Err(ConfigError::Type { key: self.key(key), expected: "an array of strings" }),
                })
                .collect::<Result<_, _>>()
                .map(Some),
            Some(_) => Err(ConfigError::Type { key: self.key(key), expected: "an array of strings" }),
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.table.keys().next() {
            Some(k) => Err(ConfigError::UnknownKey(self.key(k))),
            None => Ok(()),
        }
    }
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_owned(), message: message.into() }
}

fn sub_table(root: &mut Block, name: &str) -> Result<Option<Block>, ConfigError> {
    match root.take(name) {
        None => Ok(None),
        Some(Value::Table(t)) => Block::new(name, name, t).map(Some),
        Some(_) => Err(ConfigError::Type { key: name.to_owned(), expected: "a table" }),
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |p| before[p + 1..].chars().count()) + 1;
    (line, column)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Parse { line, column, message: e.message().trim().to_owned() }
    })?;
    let mut root = Block::new("", "", table)?;

    let mut command = None;
    if let Some(mut run) = sub_table(&mut root, "run")? {
        if let Some(c) = run.string("command")? {
            command = Some(CommandName::parse(&c).ok_or_else(|| invalid("run.command", format!("unknown command `{c}`")))?);
        }
        run.finish()?;
    }

    let species = match root.take("species") {
        None => Vec::new(),
        Some(Value::Array(items)) => {
            let mut out = Vec::new();
            for (i, item) in items.into_iter().enumerate() {
                let Value::Table(t) = item else {
                    return Err(ConfigError::Type { key: "species".into(), expected: "an array of tables" });
                };
                let mut b = Block::new("species", &format!("species[{i}]"), t)?;
                let name = b.string("name")?.ok_or_else(|| ConfigError::Missing(b.key("name")))?;
                let mass = b.required_quantity("mass", Dimension::Mass)?;
                let charge = b.string("charge")?.unwrap_or_else(|| "neutral".into());
                b.finish()?;
                out.push(SpeciesEntry { name, mass, charge });
            }
            out
        }
        Some(_) => return Err(ConfigError::Type { key: "species".into(), expected: "an array of tables ([[species]])" }),
    };

    let scenario = match sub_table(&mut root, "scenario")? {
        None => None,
        Some(mut b) => {
            let species = b.string("species")?.ok_or_else(|| ConfigError::Missing("scenario.species".into()))?;
            let wavelength = b.quantity("wavelength", Dimension::Length)?;
            let kinetic_energy = b.quantity("kinetic_energy", Dimension::Energy)?;
            if wavelength.is_some() == kinetic_energy.is_some() {
                return Err(invalid("scenario.wavelength", "give exactly one of `wavelength` and `kinetic_energy`"));
            }
            let slit_width = b.required_quantity("slit_width", Dimension::Length)?;
            let distance = b.required_quantity("distance", Dimension::Length)?;
            let source = match b.string("source")?.as_deref() {
                None | Some("wide") => SourceKind::Wide,
                Some("fine") => SourceKind::Fine,
                Some(other) => return Err(invalid("scenario.source", format!("`{other}` is not `wide` or `fine`"))),
            };
            let beam_fwhm = b.quantity("beam_fwhm", Dimension::Length)?;
            let beam_offset = b.quantity("beam_offset", Dimension::Length)?.unwrap_or(0.0);
            match (source, beam_fwhm) {
                (SourceKind::Fine, None) => return Err(ConfigError::Missing("scenario.beam_fwhm".into())),
                (SourceKind::Wide, Some(_)) => return Err(invalid("scenario.beam_fwhm", "only meaningful with source = \"fine\"")),
                _ => {}
            }
            let grid_samples = b.count("grid_samples")?.unwrap_or(DEFAULT_GRID_SAMPLES);
            let kernel = match b.string("kernel")?.as_deref() {
                None | Some("auto") => KernelChoice::Auto,
                Some("paraxial") => KernelChoice::Paraxial,
                Some("exact") => KernelChoice::Exact,
                Some(other) => return Err(invalid("scenario.kernel", format!("`{other}` is not auto, paraxial or exact"))),
            };
            b.finish()?;
            for (key, v) in [("scenario.slit_width", slit_width), ("scenario.distance", distance)] {
                if v <= 0.0 {
                    return Err(invalid(key, "must be positive"));
                }
            }
            Some(ScenarioConfig {
                species,
                wavelength,
                kinetic_energy,
                slit_width,
                distance,
                source,
                beam_fwhm,
                beam_offset,
                grid_samples,
                kernel,
            })
        }
    };

    let model = {
        let mut b = sub_table(&mut root, "model")?.unwrap_or_else(|| Block::empty("model"));
        let hypothesis = match b.string("hypothesis")?.as_deref() {
            None | Some("h0") => Hypothesis::H0,
            Some("h1") => Hypothesis::H1,
            Some("fraunhofer") => Hypothesis::Fraunhofer,
            Some(other) => return Err(invalid("model.hypothesis", format!("`{other}` is not h0, h1 or fraunhofer"))),
        };
        let gain = b.number("gain")?.unwrap_or(1.0);
        let width_factor = b.number("width_factor")?.unwrap_or(1.0);
        let sign = match b.number("sign")? {
            None => -1,
            Some(s) if s == 1.0 => 1,
            Some(s) if s == -1.0 => -1,
            Some(_) => return Err(invalid("model.sign", "must be 1 or -1")),
        };
        let mask = b.boolean("mask")?.unwrap_or(true);
        b.finish()?;
        ModelConfig { hypothesis, gain, width_factor, sign, mask }
    };

    let sampling = {
        let mut b = sub_table(&mut root, "sampling")?.unwrap_or_else(|| Block::empty("sampling"));
        let events = b.count("events")?.unwrap_or(DEFAULT_EVENTS);
        let seed = b.count("seed")?.unwrap_or(1) as u64;
        let checkpoints = b.counts("checkpoints")?.unwrap_or_else(|| default_checkpoints(events));
        let bins = b.count("bins")?.unwrap_or(DEFAULT_BINS);
        b.finish()?;
        if checkpoints.last() != Some(&events) {
            return Err(invalid("sampling.checkpoints", format!("last checkpoint must equal events ({events})")));
        }
        if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("sampling.checkpoints", "must be strictly increasing"));
        }
        if bins < 8 {
            return Err(invalid("sampling.bins", "needs at least 8 bins"));
        }
        SamplingConfig { events, seed, checkpoints, bins }
    };

    let sweep = {
        let mut b = sub_table(&mut root, "sweep")?.unwrap_or_else(|| Block::empty("sweep"));
        let steps = b.count("steps")?.unwrap_or(DEFAULT_SWEEP_STEPS);
        b.finish()?;
        if steps < 3 {
            return Err(invalid("sweep.steps", "needs at least 3 steps"));
        }
        SweepConfig { steps }
    };

    let onset = {
        let mut b = sub_table(&mut root, "onset")?.unwrap_or_else(|| Block::empty("onset"));
        let nf_min = b.number("nf_min")?.unwrap_or(0.01);
        let nf_max = b.number("nf_max")?.unwrap_or(10.0);
        let points = b.count("points")?.unwrap_or(13);
        let threshold = b.number("threshold")?.unwrap_or(slitlab_core::hypothesis::DEFAULT_ONSET_THRESHOLD);
        b.finish()?;
        if !(nf_min > 0.0 && nf_min < nf_max) {
            return Err(invalid("onset.nf_min", "need 0 < nf_min < nf_max"));
        }
        if points < 2 {
            return Err(invalid("onset.points", "needs at least 2 points"));
        }
        OnsetConfig { nf_min, nf_max, points, threshold }
    };

    let feasibility = {
        let mut b = sub_table(&mut root, "feasibility")?.unwrap_or_else(|| Block::empty("feasibility"));
        let preset = match b.string("preset")?.as_deref() {
            None | Some("ca-paul-trap") => Preset::CaPaulTrap,
            Some("na-condensate") => Preset::NaCondensate,
            Some(other) => return Err(invalid("feasibility.preset", format!("unknown preset `{other}`"))),
        };
        let base = preset.scenario();
        let length = |b: &mut Block, k: &str, d: f64| b.quantity(k, Dimension::Length).map(|v| v.unwrap_or(d));
        let freq = |b: &mut Block, k: &str, d: f64| b.quantity(k, Dimension::Frequency).map(|v| v.unwrap_or(d));
        let cfg = FeasibilityConfig {
            preset,
            species: b.string("species")?.unwrap_or(base.species.name.clone()),
            drop_height: length(&mut b, "drop_height", base.drop_height)?,
            slit_width: length(&mut b, "slit_width", base.slit_width)?,
            radial_freq: freq(&mut b, "radial_freq", base.radial_freq)?,
            axial_freq: freq(&mut b, "axial_freq", base.axial_freq)?,
            beam_window: length(&mut b, "beam_window", base.beam_window)?,
            lens_offset_max: length(&mut b, "lens_offset_max", base.lens_offset_max)?,
            margin_factor: b.number("margin_factor")?.unwrap_or(base.margin_factor),
            beam_width: length(&mut b, "beam_width", base.beam_width)?,
            drift_budget: length(&mut b, "drift_budget", base.drift_budget)?,
            wavelength_factor: b.number("wavelength_factor")?.unwrap_or(base.wavelength_factor),
            knockout_v_max: match b.quantity("knockout_v_max", Dimension::Velocity)? {
                Some(v) => Some(v),
                None => base.knockout_v_max,
            },
        };
        b.finish()?;
        cfg
    };

    let output = {
        let mut b = sub_table(&mut root, "output")?.unwrap_or_else(|| Block::empty("output"));
        let directory = b.string("directory")?.unwrap_or_else(|| "out".into());
        let formats = match b.strings("formats")? {
            None => [Format::Csv, Format::Json, Format::Svg].into_iter().collect(),
            Some(list) => list
                .iter()
                .map(|f| Format::parse(f).ok_or_else(|| invalid("output.formats", format!("unknown format `{f}`"))))
                .collect::<Result<_, _>>()?,
        };
        b.finish()?;
        OutputConfig { directory, formats }
    };

    root.finish()?;
    Ok(RunConfig { command, species, scenario, model, sampling, sweep, onset, feasibility, output })
}

fn q(v: f64, dim: Dimension) -> Value {
    Value::String(format_quantity(v, dim))
}

fn s(v: &str) -> Value {
    Value::String(v.to_owned())
}

fn n(v: usize) -> Value {
    Value::Integer(v as i64)
}

impl RunConfig {
    /// Canonical document with every default written out. Parsing it gives
    /// back an identical configuration.
    pub fn to_toml(&self) -> String {
        let mut root = Table::new();
        if let Some(c) = self.command {
            let mut run = Table::new();
            run.insert("command".into(), s(c.as_str()));
            root.insert("run".into(), Value::Table(run));
        }
        if !self.species.is_empty() {
            let items = self
                .species
                .iter()
                .map(|e| {
                    let mut t = Table::new();
                    t.insert("name".into(), s(&e.name));
                    t.insert("mass".into(), q(e.mass, Dimension::Mass));
                    t.insert("charge".into(), s(&e.charge));
                    Value::Table(t)
                })
                .collect();
            root.insert("species".into(), Value::Array(items));
        }
        if let Some(sc) = &self.scenario {
            let mut t = Table::new();
            t.insert("species".into(), s(&sc.species));
            if let Some(w) = sc.wavelength {
                t.insert("wavelength".into(), q(w, Dimension::Length));
            }
            if let Some(e) = sc.kinetic_energy {
                t.insert("kinetic_energy".into(), q(e, Dimension::Energy));
            }
            t.insert("slit_width".into(), q(sc.slit_width, Dimension::Length));
            t.insert("distance".into(), q(sc.distance, Dimension::Length));
            t.insert("source".into(), s(if sc.source == SourceKind::Fine { "fine" } else { "wide" }));
            if let Some(b) = sc.beam_fwhm {
                t.insert("beam_fwhm".into(), q(b, Dimension::Length));
            }
            t.insert("beam_offset".into(), q(sc.beam_offset, Dimension::Length));
            t.insert("grid_samples".into(), n(sc.grid_samples));
            let kernel = match sc.kernel {
                KernelChoice::Auto => "auto",
                KernelChoice::Paraxial => "paraxial",
                KernelChoice::Exact => "exact",
            };
            t.insert("kernel".into(), s(kernel));
            root.insert("scenario".into(), Value::Table(t));
        }

        let mut m = Table::new();
        m.insert("hypothesis".into(), s(self.model.hypothesis.as_str()));
        m.insert("gain".into(), Value::Float(self.model.gain));
        m.insert("width_factor".into(), Value::Float(self.model.width_factor));
        m.insert("sign".into(), Value::Integer(self.model.sign as i64));
        m.insert("mask".into(), Value::Boolean(self.model.mask));
        root.insert("model".into(), Value::Table(m));

        let mut sm = Table::new();
        sm.insert("events".into(), n(self.sampling.events));
        sm.insert("seed".into(), Value::Integer(self.sampling.seed as i64));
        sm.insert("checkpoints".into(), Value::Array(self.sampling.checkpoints.iter().map(|&c| n(c)).collect()));
        sm.insert("bins".into(), n(self.sampling.bins));
        root.insert("sampling".into(), Value::Table(sm));

        let mut sw = Table::new();
        sw.insert("steps".into(), n(self.sweep.steps));
        root.insert("sweep".into(), Value::Table(sw));

        let mut on = Table::new();
        on.insert("nf_min".into(), Value::Float(self.onset.nf_min));
        on.insert("nf_max".into(), Value::Float(self.onset.nf_max));
        on.insert("points".into(), n(self.onset.points));
        on.insert("threshold".into(), Value::Float(self.onset.threshold));
        root.insert("onset".into(), Value::Table(on));

        let f = &self.feasibility;
        let mut ft = Table::new();
        ft.insert("preset".into(), s(f.preset.as_str()));
        ft.insert("species".into(), s(&f.species));
        for (k, v) in [
            ("drop_height", f.drop_height),
            ("slit_width", f.slit_width),
            ("beam_window", f.beam_window),
            ("lens_offset_max", f.lens_offset_max),
            ("beam_width", f.beam_width),
            ("drift_budget", f.drift_budget),
        ] {
            ft.insert(k.into(), q(v, Dimension::Length));
        }
        ft.insert("radial_freq".into(), q(f.radial_freq, Dimension::Frequency));
        ft.insert("axial_freq".into(), q(f.axial_freq, Dimension::Frequency));
        ft.insert("margin_factor".into(), Value::Float(f.margin_factor));
        ft.insert("wavelength_factor".into(), Value::Float(f.wavelength_factor));
        if let Some(v) = f.knockout_v_max {
            ft.insert("knockout_v_max".into(), q(v, Dimension::Velocity));
        }
        root.insert("feasibility".into(), Value::Table(ft));

        let mut o = Table::new();
        o.insert("directory".into(), s(&self.output.directory));
        o.insert("formats".into(), Value::Array(self.output.formats.iter().map(|f| s(f.as_str())).collect()));
        root.insert("output".into(), Value::Table(o));

        toml::to_string(&root).expect("tables of plain values always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ELECTRON: &str = r#"
[scenario]
species = "electron"
wavelength = "1nm"
slit_width = "20um"
distance = "1m"
"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let c = parse_config(ELECTRON).unwrap();
        let sc = c.scenario.as_ref().unwrap();
        assert_eq!(sc.wavelength, Some(1e-9));
        assert_eq!(sc.slit_width, 20e-6);
        assert_eq!(sc.grid_samples, DEFAULT_GRID_SAMPLES);
        assert_eq!(sc.kernel, KernelChoice::Auto);
        assert_eq!(sc.source, SourceKind::Wide);
        assert_eq!(c.sampling.checkpoints, vec![10, 100, 1000, 10_000, 100_000]);
        assert_eq!(c.model.sign, -1);
    }

    #[test]
    fn canonical_round_trip() {
        let docs = [
            ELECTRON.to_owned(),
            format!(
                "[run]\ncommand = \"sweep-xb\"\n[[species]]\nname = \"Rb\"\nmass = \"85.47amu\"\n{}source = \"fine\"\nbeam_fwhm = \"4um\"\nbeam_offset = \"1.5um\"\n[feasibility]\npreset = \"na-condensate\"\ndrop_height = \"2cm\"\n[output]\nformats = [\"json\"]\n",
                ELECTRON
            ),
        ];
        for doc in docs {
            let c = parse_config(&doc).unwrap();
            let text = c.to_toml();
            let again = parse_config(&text).unwrap();
            assert_eq!(c, again, "{text}");
            assert_eq!(text, again.to_toml());
        }
    }

    #[test]
    fn bare_number_is_unit_error() {
        let doc = ELECTRON.replace("\"20um\"", "\"20\"");
        match parse_config(&doc) {
            Err(ConfigError::Unit { key, .. }) => assert_eq!(key, "scenario.slit_width"),
            other => panic!("{other:?}"),
        }
        let doc = ELECTRON.replace("\"20um\"", "20");
        assert!(matches!(parse_config(&doc), Err(ConfigError::Unit { key, .. }) if key == "scenario.slit_width"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let doc = format!("{ELECTRON}slit_widht = \"2um\"\n");
        assert_eq!(parse_config(&doc), Err(ConfigError::UnknownKey("scenario.slit_widht".into())));
        let doc = format!("{ELECTRON}[extra]\n");
        assert_eq!(parse_config(&doc), Err(ConfigError::UnknownKey("extra".into())));
    }

    #[test]
    fn parse_errors_have_position() {
        let doc = "[scenario]\nspecies = \"electron\"\nwavelength = = \"1nm\"\n";
        match parse_config(doc) {
            Err(ConfigError::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wavelength_or_energy() {
        let both = ELECTRON.replace("wavelength = \"1nm\"", "wavelength = \"1nm\"\nkinetic_energy = \"1.5eV\"");
        assert!(matches!(parse_config(&both), Err(ConfigError::Invalid { .. })));
        let energy = ELECTRON.replace("wavelength = \"1nm\"", "kinetic_energy = \"1.5eV\"");
        assert_eq!(parse_config(&energy).unwrap().scenario.unwrap().kinetic_energy, Some(1.5));
    }

    #[test]
    fn fine_source_needs_width() {
        let doc = format!("{ELECTRON}source = \"fine\"\n");
        assert_eq!(parse_config(&doc), Err(ConfigError::Missing("scenario.beam_fwhm".into())));
    }

    #[test]
    fn checkpoints_validated() {
        let doc = format!("{ELECTRON}[sampling]\nevents = 100\ncheckpoints = [10, 5, 100]\n");
        assert!(matches!(parse_config(&doc), Err(ConfigError::Invalid { .. })));
        let doc = format!("{ELECTRON}[sampling]\nevents = 100\ncheckpoints = [10, 50]\n");
        assert!(matches!(parse_config(&doc), Err(ConfigError::Invalid { .. })));
    }
}
