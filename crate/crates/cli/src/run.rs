//! Command dispatch: builds the scenario, runs one pipeline and writes its
//! outputs, then the manifest.

use std::fmt::{Display, Write as _};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use slitlab_core::detector::{build_up_in_range, sample_hits};
use slitlab_core::feasibility::{de_broglie, evaluate_scenario, DropScenario, FeasibilityReport};
use slitlab_core::hypothesis::{
    fringe_onset_sweep, onset_distances, predict_fraunhofer, predict_h0, predict_h1, sweep_xb, uncertainty_product,
    OnsetRow,
};
use slitlab_core::pattern::{fwhm, PatternFeatures};
use slitlab_core::quantities::{Species, SpeciesTable, STANDARD_GRAVITY};
use slitlab_core::wavefield::{Kernel, SourceSpec};
use slitlab_core::{Model, Prediction, Profile, Scenario};

use crate::config::{CommandName, ConfigError, Format, Hypothesis, RunConfig, ScenarioConfig, SourceKind};
use crate::output::{json_bytes, profile_csv, sha256_hex, Csv, OutputDir, RunManifest, HASH_ALGORITHM};
use crate::svg::{self, Marker, MarkerKind, Panel, Series};
use crate::units::si_prefixed;

pub const TOOL: &str = "slitlab";
pub const RESOLVED_CONFIG: &str = "config.resolved.toml";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("pipeline failed in stage `{stage}`: {message}")]
    Pipeline { stage: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Validation(_) => 1,
            CliError::Pipeline { .. } => 2,
        }
    }
}

fn invalid(e: impl Display) -> CliError {
    CliError::Validation(e.to_string())
}

#[derive(Debug)]
struct StageError {
    stage: &'static str,
    message: String,
}

trait Stage<T> {
    fn stage(self, name: &'static str) -> Result<T, StageError>;
}

impl<T, E: Display> Stage<T> for Result<T, E> {
    fn stage(self, name: &'static str) -> Result<T, StageError> {
        self.map_err(|e| StageError { stage: name, message: e.to_string() })
    }
}

/// Everything that can be checked before any output is written.
struct Prepared {
    scenario: Option<Scenario>,
    model: Model,
    drop: Option<DropScenario>,
    warnings: Vec<String>,
}

fn species_table(cfg: &RunConfig) -> Result<SpeciesTable, CliError> {
    let mut table = SpeciesTable::new();
    for e in &cfg.species {
        table.register(Species::new(e.name.clone(), e.mass, e.charge.clone()).map_err(invalid)?).map_err(invalid)?;
    }
    Ok(table)
}

fn build_scenario(sc: &ScenarioConfig, table: &SpeciesTable, warnings: &mut Vec<String>) -> Result<Scenario, CliError> {
    let species = table.lookup(&sc.species).map_err(invalid)?;
    let wavelength = match (sc.wavelength, sc.kinetic_energy) {
        (Some(w), _) => w,
        (None, Some(e)) => {
            let db = de_broglie(e, &species).map_err(invalid)?;
            warnings.extend(db.warning);
            db.wavelength_m
        }
        (None, None) => return Err(CliError::Validation("scenario needs a wavelength or kinetic energy".into())),
    };
    let source = match sc.source {
        SourceKind::Wide => SourceSpec::WidePlaneWave,
        SourceKind::Fine => SourceSpec::FineGaussian {
            fwhm: sc.beam_fwhm.ok_or_else(|| CliError::Validation("fine source needs beam_fwhm".into()))?,
            offset: sc.beam_offset,
        },
    };
    Scenario::with_auto_grid(species, wavelength, sc.slit_width, sc.distance, source, sc.grid_samples, sc.kernel)
        .map_err(invalid)
}

fn prepare(cfg: &RunConfig, command: CommandName) -> Result<Prepared, CliError> {
    if let Some(declared) = cfg.command {
        if declared != command {
            return Err(CliError::Validation(format!("config declares command `{declared}` but `{command}` was requested")));
        }
    }
    let table = species_table(cfg)?;
    let mut warnings = Vec::new();
    let model = Model {
        gain: cfg.model.gain,
        width_factor: cfg.model.width_factor,
        sign: cfg.model.sign,
        mask_enabled: cfg.model.mask,
    };
    model.validate().map_err(invalid)?;

    let scenario = if command.needs_scenario() {
        let sc = cfg.scenario.as_ref().ok_or_else(|| CliError::Validation(format!("`{command}` needs a [scenario] table")))?;
        let s = build_scenario(sc, &table, &mut warnings)?;
        let needs_fine = matches!(command, CommandName::SweepXb | CommandName::Compare)
            || (cfg.model.hypothesis == Hypothesis::H1 && matches!(command, CommandName::Simulate | CommandName::Buildup));
        if needs_fine && !s.source.is_fine() {
            return Err(CliError::Validation(format!("`{command}` with the deflection model needs source = \"fine\"")));
        }
        Some(s)
    } else {
        None
    };

    let drop = if command == CommandName::Feasibility {
        let f = &cfg.feasibility;
        let d = DropScenario {
            species: table.lookup(&f.species).map_err(invalid)?,
            drop_height: f.drop_height,
            slit_width: f.slit_width,
            radial_freq: f.radial_freq,
            axial_freq: f.axial_freq,
            beam_window: f.beam_window,
            lens_offset_max: f.lens_offset_max,
            margin_factor: f.margin_factor,
            beam_width: f.beam_width,
            drift_budget: f.drift_budget,
            wavelength_factor: f.wavelength_factor,
            knockout_v_max: f.knockout_v_max,
            grav_g: STANDARD_GRAVITY,
        };
        d.validate().map_err(invalid)?;
        Some(d)
    } else {
        None
    };
    Ok(Prepared { scenario, model, drop, warnings })
}

/// Runs `command` and writes into `out_root`. The manifest is written last,
/// also when a pipeline stage fails.
pub fn run(cfg: &RunConfig, command: CommandName, out_root: &Path) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let prepared = prepare(cfg, command)?;
    let canonical = cfg.to_toml();
    let mut warnings = prepared.warnings.clone();

    let mut out = OutputDir::create(out_root, cfg.output.formats.clone())
        .map_err(|e| CliError::Pipeline { stage: "output".into(), message: e.to_string() })?;
    let mut result = out.write(RESOLVED_CONFIG, None, canonical.as_bytes()).stage("output");
    if result.is_ok() {
        let mut job = Job { cfg, prepared: &prepared, out: &mut out, warnings: &mut warnings };
        result = match command {
            CommandName::Simulate => job.simulate(),
            CommandName::Buildup => job.buildup(),
            CommandName::SweepXb => job.sweep(),
            CommandName::Onset => job.onset(),
            CommandName::Feasibility => job.feasibility(),
            CommandName::Compare => job.compare(),
        };
    }

    let manifest = RunManifest {
        tool: TOOL.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.as_str().into(),
        config_digest: sha256_hex(canonical.as_bytes()),
        seed: cfg.sampling.seed,
        hash_algorithm: HASH_ALGORITHM.into(),
        outputs: out.entries().to_vec(),
        status: if result.is_ok() { "ok" } else { "failed" }.into(),
        failed_stage: result.as_ref().err().map(|e| e.stage.to_owned()),
        error: result.as_ref().err().map(|e| e.message.clone()),
        warnings,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    out.write_manifest(&manifest)
        .map_err(|e| CliError::Pipeline { stage: "manifest".into(), message: e.to_string() })?;
    match result {
        Ok(()) => Ok(manifest),
        Err(e) => Err(CliError::Pipeline { stage: e.stage.into(), message: e.message }),
    }
}

struct Job<'a> {
    cfg: &'a RunConfig,
    prepared: &'a Prepared,
    out: &'a mut OutputDir,
    warnings: &'a mut Vec<String>,
}

#[derive(Serialize)]
struct GridInfo {
    samples: usize,
    spacing_m: f64,
}

#[derive(Serialize)]
struct FeaturesDoc<'a> {
    model: &'static str,
    species: &'a str,
    wavelength_m: f64,
    slit_width_m: f64,
    distance_m: f64,
    fresnel_number: f64,
    kernel: Kernel,
    grid: GridInfo,
    #[serde(flatten)]
    features: &'a PatternFeatures<f64>,
    fwhm_m: Option<f64>,
    x_p_m: Option<f64>,
    d_m: Option<f64>,
    mode_count: usize,
    uncertainty_product: Option<f64>,
    warnings: &'a [String],
}

fn hypothesis_name(h: Hypothesis) -> &'static str {
    match h {
        Hypothesis::H0 => "h0",
        Hypothesis::H1 => "h1",
        Hypothesis::Fraunhofer => "fraunhofer",
    }
}

fn features_doc<'a>(model: &'static str, s: &'a Scenario, p: &'a Prediction) -> FeaturesDoc<'a> {
    FeaturesDoc {
        model,
        species: &s.species.name,
        wavelength_m: s.wavelength,
        slit_width_m: s.slit_width,
        distance_m: s.distance,
        fresnel_number: s.fresnel_number,
        kernel: s.kernel.resolve(&s.source),
        grid: GridInfo { samples: s.grid.n_samples(), spacing_m: s.grid.spacing() },
        features: &p.features,
        fwhm_m: fwhm(&p.profile).ok(),
        x_p_m: p.x_p,
        d_m: p.d,
        mode_count: p.mode_count,
        uncertainty_product: uncertainty_product(p, s).ok(),
        warnings: &p.warnings,
    }
}

/// Index range worth plotting: where the profile is above 1e-3 of its peak,
/// capped to a few fringe periods (or twice the FWHM for broad profiles).
fn plot_range(p: &Profile, fringe_period: f64) -> (usize, usize) {
    let peak = p.peak();
    let centre = p.x(p.argmax());
    let reach = (8.0 * fringe_period).max(2.0 * fwhm(p).unwrap_or(0.0));
    let inside = |i: usize| p.values[i] >= 1e-3 * peak && (p.x(i) - centre).abs() <= reach;
    let lo = (0..p.len()).find(|&i| inside(i)).unwrap_or(0);
    let hi = (0..p.len()).rev().find(|&i| inside(i)).unwrap_or(p.len() - 1);
    let pad = ((hi - lo) / 10).max(1);
    (lo.saturating_sub(pad), (hi + pad).min(p.len() - 1))
}

fn markers(features: &PatternFeatures<f64>) -> Vec<Marker> {
    let mins = features.minima.iter().filter(|e| e.k.abs() == 1).map(|e| Marker { kind: MarkerKind::Minimum, k: e.k, x: e.x });
    let maxs = features.maxima.iter().filter(|e| e.k.abs() <= 1).map(|e| Marker { kind: MarkerKind::Maximum, k: e.k, x: e.x });
    mins.chain(maxs).collect()
}

fn bracket(features: &PatternFeatures<f64>) -> Option<(f64, f64)> {
    features.width?;
    Some((features.minimum(-1)?.x, features.minimum(1)?.x))
}

/// Quotes a CSV text cell when it needs it.
fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\"").replace('\n', " "))
    } else {
        s.to_owned()
    }
}

impl Job<'_> {
    fn scenario(&self) -> &Scenario {
        self.prepared.scenario.as_ref().expect("prepared for a scenario command")
    }

    fn write(&mut self, name: &str, format: Option<Format>, bytes: &[u8]) -> Result<(), StageError> {
        self.out.write(name, format, bytes).stage("output")
    }

    /// Plots never fail the run; a failed write becomes a warning.
    fn write_plot(&mut self, name: &str, text: String) {
        if let Err(e) = self.out.write(name, Some(Format::Svg), text.as_bytes()) {
            self.warnings.push(format!("plot `{name}` not written: {e}"));
        }
    }

    fn predict(&mut self) -> Result<(Prediction, &'static str), StageError> {
        let s = self.scenario();
        let h = self.cfg.model.hypothesis;
        let p = match h {
            Hypothesis::H0 => predict_h0(s),
            Hypothesis::H1 => predict_h1(s, &self.prepared.model),
            Hypothesis::Fraunhofer => predict_fraunhofer(s),
        }
        .stage("predict")?;
        self.warnings.extend(p.warnings.iter().cloned());
        Ok((p, hypothesis_name(h)))
    }

    fn profile_panel<'p>(&self, title: String, p: &'p Prediction, xs: &'p [f64]) -> Panel<'p> {
        let (lo, hi) = plot_range(&p.profile, self.scenario().fringe_period());
        let mut panel = Panel::new(title, "m", "intensity (1/m)");
        panel.series.push(Series { label: "density".into(), xs: &xs[lo..=hi], ys: &p.profile.values[lo..=hi] });
        panel.markers = markers(&p.features);
        if p.model_id == slitlab_core::hypothesis::ModelId::H0 {
            panel.bracket = bracket(&p.features);
        }
        panel
    }

    fn simulate(&mut self) -> Result<(), StageError> {
        let (p, name) = self.predict()?;
        let s = self.scenario();
        let xs = p.profile.grid.coordinates();
        let csv = profile_csv(&xs, &p.profile.values);
        let doc = json_bytes(&features_doc(name, s, &p));
        let title = format!("{} · {} · λ = {} · Δx = {} · L = {}", name, s.species.name, si_prefixed(s.wavelength, "m"), si_prefixed(s.slit_width, "m"), si_prefixed(s.distance, "m"));
        let plot = svg::render(&title, &[self.profile_panel(title.clone(), &p, &xs)], 1);
        self.write("profile.csv", Some(Format::Csv), &csv)?;
        self.write("features.json", Some(Format::Json), &doc)?;
        self.write_plot("plot.svg", plot);
        Ok(())
    }

    fn buildup(&mut self) -> Result<(), StageError> {
        let (p, name) = self.predict()?;
        let sampling = &self.cfg.sampling;
        let events = sample_hits(&p.profile, sampling.events, sampling.seed).stage("sampling")?;
        // bin over the plotted window; events beyond it land in the end bins
        let (lo, hi) = plot_range(&p.profile, self.scenario().fringe_period());
        let range = (p.profile.x(lo), p.profile.x(hi));
        let hist = build_up_in_range(&p.profile, &sampling.checkpoints, sampling.bins, sampling.seed, range)
            .stage("sampling")?;

        let mut csv = Csv::new(&["index", "x_m"]);
        for e in &events {
            csv.row(&[e.sequence_index.to_string(), crate::output::csv_number(e.x)]);
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            model: &'static str,
            events: usize,
            #[serde(flatten)]
            build_up: &'a slitlab_core::BuildUp,
        }
        let doc = json_bytes(&Doc { model: name, events: sampling.events, build_up: &hist });

        // the end bins also hold the tails, so they are left out of the plot
        let centres: Vec<f64> = hist.bin_edges.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
        let inner = 1..centres.len() - 1;
        let counts: Vec<Vec<f64>> =
            hist.histograms.iter().map(|h| h[inner.clone()].iter().map(|&c| c as f64).collect()).collect();
        let panels: Vec<Panel> = hist
            .checkpoints
            .iter()
            .zip(&counts)
            .map(|(n, c)| {
                let mut panel = Panel::new(format!("{n} events"), "m", "counts");
                panel.series.push(Series { label: format!("{n}"), xs: &centres[inner.clone()], ys: c });
                panel
            })
            .collect();
        let plot = svg::render(&format!("build-up · {name}"), &panels, 3);

        self.write("events.csv", Some(Format::Csv), &csv.into_bytes())?;
        self.write("buildup.json", Some(Format::Json), &doc)?;
        self.write_plot("buildup.svg", plot);
        Ok(())
    }

    fn sweep(&mut self) -> Result<(), StageError> {
        let s = self.scenario();
        let steps = sweep_xb(s, &self.prepared.model, self.cfg.sweep.steps).stage("sweep")?;
        let xs = s.grid.coordinates();
        let mut index = Csv::new(&["step", "x_b_m", "x_p_m", "d_m", "mode_count", "file"]);
        let mut files = Vec::with_capacity(steps.len());
        for (i, st) in steps.iter().enumerate() {
            let file = format!("step_{i:03}.csv");
            let p = &st.prediction;
            index.row(&[
                i.to_string(),
                crate::output::csv_number(st.x_b),
                p.x_p.map_or_else(String::new, crate::output::csv_number),
                p.d.map_or_else(String::new, crate::output::csv_number),
                p.mode_count.to_string(),
                file.clone(),
            ]);
            files.push((file, profile_csv(&xs, &p.profile.values)));
        }
        // all panels share the window of the widest excursion
        let f1 = slitlab_core::pattern::sidelobe_root(1) / std::f64::consts::PI * s.fringe_period();
        let reach = 1.5 * (f1 + s.fringe_period());
        let lo = xs.partition_point(|&x| x < -reach);
        let hi = xs.partition_point(|&x| x <= reach).max(lo + 1);
        let panels: Vec<Panel> = steps
            .iter()
            .map(|st| {
                let p = &st.prediction;
                let mut panel = Panel::new(
                    format!("x_b = {} · modes {}", si_prefixed(st.x_b, "m"), p.mode_count),
                    "m",
                    "intensity (1/m)",
                );
                panel.series.push(Series { label: "h1".into(), xs: &xs[lo..hi], ys: &p.profile.values[lo..hi] });
                panel.markers = markers(&p.features);
                panel
            })
            .collect();
        let plot = svg::render("offset sweep", &panels, 3);

        for (file, bytes) in &files {
            self.write(file, Some(Format::Csv), bytes)?;
        }
        self.write("index.csv", Some(Format::Csv), &index.into_bytes())?;
        self.write_plot("sweep.svg", plot);
        Ok(())
    }

    fn onset(&mut self) -> Result<(), StageError> {
        let s = self.scenario();
        let o = &self.cfg.onset;
        let distances = onset_distances(s, o.nf_min, o.nf_max, o.points);
        let rows: Vec<OnsetRow<f64>> = fringe_onset_sweep(s, &distances, o.threshold).stage("onset")?;
        let mut csv = Csv::new(&["distance_m", "fresnel_number", "visibility", "flagged", "error"]);
        for r in &rows {
            csv.row(&[
                crate::output::csv_number(r.distance),
                crate::output::csv_number(r.fresnel_number),
                r.visibility.map_or_else(String::new, crate::output::csv_number),
                r.flagged.to_string(),
                csv_text(r.error.as_deref().unwrap_or("")),
            ]);
        }
        let nf: Vec<f64> = rows.iter().map(|r| r.fresnel_number).collect();
        let vis: Vec<f64> = rows.iter().map(|r| r.visibility.unwrap_or(f64::NAN)).collect();
        let mut panel = Panel::new("first-fringe visibility", "Fresnel number", "visibility");
        panel.log_x = true;
        panel.series.push(Series { label: "visibility".into(), xs: &nf, ys: &vis });
        let plot = svg::render("fringe onset", &[panel], 1);
        for r in rows.iter().filter(|r| r.error.is_some()) {
            self.warnings.push(format!("L = {:e} m: {}", r.distance, r.error.as_deref().unwrap_or_default()));
        }
        self.write("onset.csv", Some(Format::Csv), &csv.into_bytes())?;
        self.write_plot("onset.svg", plot);
        Ok(())
    }

    fn feasibility(&mut self) -> Result<(), StageError> {
        let drop = self.prepared.drop.as_ref().expect("prepared for feasibility");
        let report = evaluate_scenario(drop).stage("feasibility")?;
        #[derive(Serialize)]
        struct Doc<'a> {
            inputs: &'a DropScenario,
            all_passed: bool,
            #[serde(flatten)]
            report: &'a FeasibilityReport,
        }
        let doc = json_bytes(&Doc { inputs: drop, all_passed: report.all_passed(), report: &report });
        self.warnings.extend(report.warnings.iter().cloned());
        self.write("report.json", Some(Format::Json), &doc)?;
        self.write("report.txt", None, report_text(drop, &report).as_bytes())?;
        Ok(())
    }

    fn compare(&mut self) -> Result<(), StageError> {
        let s = self.scenario();
        let h0 = predict_h0(s).stage("predict-h0")?;
        let h1 = predict_h1(s, &self.prepared.model).stage("predict-h1")?;
        let xs = s.grid.coordinates();
        let diff: Vec<f64> = h1.profile.values.iter().zip(&h0.profile.values).map(|(a, b)| a - b).collect();
        let mut csv = Csv::new(&["x_m", "h0", "h1", "difference"]);
        for i in 0..xs.len() {
            csv.numbers(&[xs[i], h0.profile.values[i], h1.profile.values[i], diff[i]]);
        }
        #[derive(Serialize)]
        struct Metrics {
            relative_l2: f64,
            max_abs_difference: f64,
            fwhm_h0_m: Option<f64>,
            fwhm_h1_m: Option<f64>,
            mode_count_h0: usize,
            mode_count_h1: usize,
            x_p_m: Option<f64>,
            d_m: Option<f64>,
            uncertainty_product_h0: Option<f64>,
            uncertainty_product_h1: Option<f64>,
            warnings: Vec<String>,
        }
        let metrics = Metrics {
            relative_l2: h1.profile.relative_l2(&h0.profile).stage("compare")?,
            max_abs_difference: diff.iter().fold(0.0, |m, d| m.max(d.abs())),
            fwhm_h0_m: fwhm(&h0.profile).ok(),
            fwhm_h1_m: fwhm(&h1.profile).ok(),
            mode_count_h0: h0.mode_count,
            mode_count_h1: h1.mode_count,
            x_p_m: h1.x_p,
            d_m: h1.d,
            uncertainty_product_h0: uncertainty_product(&h0, s).ok(),
            uncertainty_product_h1: uncertainty_product(&h1, s).ok(),
            warnings: h0.warnings.iter().chain(&h1.warnings).cloned().collect(),
        };
        let (lo0, hi0) = plot_range(&h0.profile, s.fringe_period());
        let (lo1, hi1) = plot_range(&h1.profile, s.fringe_period());
        let (lo, hi) = (lo0.min(lo1), hi0.max(hi1));
        let mut panel = Panel::new("h0 vs h1", "m", "intensity (1/m)");
        panel.series.push(Series { label: "h0".into(), xs: &xs[lo..=hi], ys: &h0.profile.values[lo..=hi] });
        panel.series.push(Series { label: "h1".into(), xs: &xs[lo..=hi], ys: &h1.profile.values[lo..=hi] });
        panel.markers = markers(&h1.features);
        let plot = svg::render("compare", &[panel], 1);

        self.warnings.extend(metrics.warnings.iter().cloned());
        self.write("compare.csv", Some(Format::Csv), &csv.into_bytes())?;
        self.write("metrics.json", Some(Format::Json), &json_bytes(&metrics))?;
        self.write_plot("compare.svg", plot);
        Ok(())
    }
}

fn report_text(d: &DropScenario, r: &FeasibilityReport) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "species            {}", r.species);
    let _ = writeln!(t, "drop height        {}", si_prefixed(d.drop_height, "m"));
    let _ = writeln!(t, "slit width         {}", si_prefixed(d.slit_width, "m"));
    let _ = writeln!(t, "fall time          {}", si_prefixed(r.t_fall_s, "s"));
    let _ = writeln!(t, "impact velocity    {}", si_prefixed(r.v_impact_m_s, "m/s"));
    let _ = writeln!(t, "kinetic energy     {}", si_prefixed(r.kinetic_energy_ev, "eV"));
    let _ = writeln!(t, "de Broglie λ       {}", si_prefixed(r.lambda_db_m, "m"));
    let _ = writeln!(t, "zero-point radial  {}  λ = {}", si_prefixed(r.zero_point_radial.energy_ev, "eV"), si_prefixed(r.zero_point_radial.wavelength_m, "m"));
    let _ = writeln!(t, "zero-point axial   {}  λ = {}", si_prefixed(r.zero_point_axial.energy_ev, "eV"), si_prefixed(r.zero_point_axial.wavelength_m, "m"));
    let _ = writeln!(t, "p limit            {:.3e} N·s", r.p_limit_ns);
    let _ = writeln!(t, "p threshold        {:.3e} N·s", r.p_threshold_ns);
    let _ = writeln!(t);
    for c in &r.checks {
        let _ = writeln!(
            t,
            "[{}] {:<20} {} = {:.3e} {} {} {:.3e} {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.quantity,
            c.value,
            c.unit,
            c.relation,
            c.threshold,
            c.unit
        );
    }
    for w in &r.warnings {
        let _ = writeln!(t, "warning: {w}");
    }
    t
}
