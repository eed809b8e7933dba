//! One PASS/FAIL line per acceptance criterion. Runs without the test
//! harness so the lines always reach the console.

#[path = "../../core/tests/common/golden.rs"]
mod golden;
#[path = "../../core/tests/common/oracle.rs"]
mod oracle;
#[path = "../../core/tests/common/reference.rs"]
mod reference;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::Value;
use slitlab_core::detector::sample_hits;
use slitlab_core::hypothesis::*;
use slitlab_core::pattern::fwhm;
use slitlab_core::quantities::species_lookup;
use slitlab_core::wavefield::*;

type Outcome = Result<String, String>;

const DX: f64 = 20e-6;
const LAMBDA: f64 = 1e-9;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn slitlab(command: &str, config: &Path, out: &Path) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_slitlab"))
        .args([command, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env_remove("SLITLAB_OUT")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), format!("{command} failed: {}", String::from_utf8_lossy(&o.stderr)))
}

fn scenario(slit: f64, distance: f64, source: SourceSpec<f64>, n: usize) -> slitlab_core::Scenario {
    Scenario::with_auto_grid(species_lookup("electron").unwrap(), LAMBDA, slit, distance, source, n, KernelChoice::Auto)
        .unwrap()
}

fn fine() -> slitlab_core::Scenario {
    scenario(DX, 1.0, SourceSpec::FineGaussian { fwhm: DX / 5.0, offset: 0.0 }, 1 << 14)
}

fn width_of_slit_pattern(tmp: &Path) -> Outcome {
    let out = tmp.join("c1");
    let start = Instant::now();
    slitlab("simulate", &configs().join("electron-wide.toml"), &out)?;
    let elapsed = start.elapsed();
    let f: Value = serde_json::from_str(&fs::read_to_string(out.join("features.json")).unwrap()).unwrap();
    let w = f["W_m"].as_f64().ok_or("no W in features.json")?;
    let n = f["grid"]["samples"].as_u64().unwrap();
    ensure(n == 1 << 16, format!("grid has {n} samples"))?;
    ensure((w - 100e-6).abs() / 100e-6 < 0.05, format!("W = {w:e} m"))?;
    ensure(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("W = {:.3} um at n = 2^16, end-to-end {:.2} s", w * 1e6, elapsed.as_secs_f64()))
}

fn width_times_slit(_: &Path) -> Outcome {
    let products: Vec<f64> = [10e-6, 20e-6, 40e-6]
        .iter()
        .map(|&slit| {
            let p = predict_h0(&scenario(slit, 1.0, SourceSpec::WidePlaneWave, 1 << 16)).unwrap();
            p.features.width.unwrap() * slit
        })
        .collect();
    let mean = products.iter().sum::<f64>() / 3.0;
    let spread = products.iter().map(|v| (v / mean - 1.0).abs()).fold(0.0, f64::max);
    ensure(spread < 0.02, format!("W·Δx = {products:?}"))?;
    Ok(format!("W·Δx = {:.4e} m² ± {:.3}% over Δx = 10, 20, 40 um", mean, spread * 100.0))
}

fn propagator_oracle(_: &Path) -> Outcome {
    let n = 1 << 16;
    let distance = 1.0;
    let g = Grid1D::auto(n, LAMBDA, DX, distance, DX).unwrap();
    let nf = DX * DX / (4.0 * LAMBDA * distance);
    let slit = make_slit_field(&SourceSpec::WidePlaneWave, DX, &g, LAMBDA).unwrap().field;
    let out = propagate(&slit, distance, Kernel::Paraxial).unwrap();
    let idx: Vec<usize> = (0..n).filter(|&i| g.x(i).abs() <= 0.5e-3).collect();
    let sim: Vec<f64> = idx.iter().map(|&i| out.field.amplitudes[i].norm_sqr()).collect();
    let reference: Vec<f64> = idx.iter().map(|&i| oracle::fresnel_intensity(g.x(i), DX, LAMBDA, distance, 400)).collect();
    let (ss, rs): (f64, f64) = (sim.iter().sum(), reference.iter().sum());
    let (mut num, mut den) = (0.0, 0.0);
    for (s, r) in sim.iter().zip(&reference) {
        num += (s / ss - r / rs).powi(2);
        den += (r / rs).powi(2);
    }
    let l2 = (num / den).sqrt();
    ensure(nf <= 0.1 + 1e-12 && l2 < 1e-3, format!("relative L2 {l2:e} at N_F = {nf}"))?;

    let mut drift: f64 = 0.0;
    for l in [0.01, 1.0, 30.0] {
        drift = drift.max((propagate(&slit, l, Kernel::Paraxial).unwrap().field.norm_sq() - slit.norm_sq()).abs());
    }
    ensure(drift < 1e-10, format!("norm drift {drift:e}"))?;

    let gf = Grid1D::auto(1 << 14, LAMBDA, DX, 1.0, DX / 5.0).unwrap();
    let f = make_slit_field(&SourceSpec::FineGaussian { fwhm: DX / 5.0, offset: 3e-6 }, DX, &gf, LAMBDA).unwrap().field;
    let mut identity: f64 = 0.0;
    for kernel in [Kernel::Paraxial, Kernel::Exact] {
        let o = propagate(&f, 0.0, kernel).unwrap();
        identity = identity.max(f.amplitudes.iter().zip(&o.field.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
    }
    ensure(identity <= 1e-12, format!("zero-distance error {identity:e}"))?;
    Ok(format!("L2 vs quadrature {l2:.2e} at N_F = {nf}, norm drift {drift:.1e}, L = 0 error {identity:.1e}"))
}

fn golden_table(_: &Path) -> Outcome {
    let start = Instant::now();
    let rows = golden::table();
    let elapsed = start.elapsed();
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.passes())
        .map(|r| format!("{} = {:.4e} (quoted {:.3e}, off {:.1}%)", r.name, r.computed, r.quoted, r.relative_error() * 100.0))
        .collect();
    ensure(failed.is_empty(), failed.join("; "))?;
    ensure(elapsed < Duration::from_secs(1), format!("table took {elapsed:?}"))?;
    let worst = rows.iter().max_by(|a, b| (a.relative_error() / a.tolerance).total_cmp(&(b.relative_error() / b.tolerance))).unwrap();
    Ok(format!(
        "{} rows within tolerance in {:.1} ms; tightest {} at {:.1}% of {:.0}%",
        rows.len(),
        elapsed.as_secs_f64() * 1e3,
        worst.name,
        worst.relative_error() * 100.0,
        worst.tolerance * 100.0
    ))
}

fn monte_carlo(_: &Path) -> Outcome {
    let n = 100_000;
    let p = predict_fraunhofer(&scenario(DX, 1.0, SourceSpec::WidePlaneWave, 1 << 14)).unwrap().profile;
    let r = reference::Reference::new(&p);
    let xs: Vec<f64> = sample_hits(&p, n, 20240601).unwrap().into_iter().map(|e| e.x).collect();
    let d = r.ks_distance(&xs);
    let limit = 1.95 / (n as f64).sqrt();
    ensure(d < limit, format!("KS D = {d:e} >= {limit:e}"))?;
    let (chi2, p_value) = r.chi_square(&xs, -150e-6, 150e-6, 64);
    ensure(p_value > 0.001, format!("chi2 = {chi2}, p = {p_value}"))?;
    let again: Vec<f64> = sample_hits(&p, n, 20240601).unwrap().into_iter().map(|e| e.x).collect();
    ensure(xs.iter().zip(&again).all(|(a, b)| a.to_bits() == b.to_bits()), "same seed differs")?;
    for m in [1, 4095, 4097, 33_333] {
        let short: Vec<f64> = sample_hits(&p, m, 20240601).unwrap().into_iter().map(|e| e.x).collect();
        ensure(short[..] == xs[..m], format!("prefix of length {m} differs"))?;
    }
    Ok(format!("KS D = {d:.2e} < {limit:.2e}, chi2(63) = {chi2:.1} p = {p_value:.3}, bit-identical, prefix ok"))
}

fn deflection_family(tmp: &Path) -> Outcome {
    let s = fine();
    let model = DeflectionModel::default();
    let centred = predict_h1(&s, &model).unwrap();
    ensure(centred.x_p == Some(0.0), format!("x_p(0) = {:?}", centred.x_p))?;

    let d_small = model.line_width(&s, s.grid.span() / 1e6);
    ensure(model.line_width(&s, 0.0) == 0.0 && d_small < 1e-3 * s.fringe_period(), format!("d(b -> 0) = {d_small:e}"))?;

    let steps = sweep_xb(&s, &model, 9).unwrap();
    let mut worst: f64 = 0.0;
    for st in &steps {
        let p = &st.prediction;
        for z in &p.features.minima {
            worst = worst.max(p.profile.values[z.sample] / p.profile.peak());
        }
    }
    ensure(worst < 1e-6, format!("masked density {worst:e} of peak at a zero"))?;

    let out = tmp.join("c6");
    slitlab("sweep-xb", &configs().join("electron-fine.toml"), &out)?;
    let index = fs::read_to_string(out.join("index.csv")).unwrap();
    let modes: Vec<usize> = index.lines().skip(1).map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    let mut runs = modes.clone();
    runs.dedup();
    ensure(runs == [1, 2, 1], format!("mode counts {modes:?}"))?;

    let wide = scenario(DX, 1.0, SourceSpec::WidePlaneWave, 1 << 14);
    let analytic = uncertainty_product(&predict_fraunhofer(&wide).unwrap(), &wide).unwrap();
    ensure((analytic - 1.0).abs() < 1e-9, format!("analytic product {analytic}"))?;
    let h1 = uncertainty_product(&centred, &s).unwrap();
    let ratio = centred.d.unwrap() / (2.0 * s.fringe_period());
    ensure((h1 - ratio).abs() < 1e-6 && ratio < 1.0, format!("H1 product {h1} vs d/W {ratio}"))?;
    Ok(format!(
        "x_p(0) = 0, d(b->0) = {d_small:.1e} m, masked zeros <= {worst:.1e} of peak, modes {modes:?}, product 1{:+.0e} and d/W = {h1:.4}",
        analytic - 1.0
    ))
}

fn fine_beam_h0(_: &Path) -> Outcome {
    let widths: Vec<f64> = [1e-6, 0.5e-6]
        .iter()
        .map(|&b| {
            let s = scenario(DX, 0.1, SourceSpec::FineGaussian { fwhm: b, offset: 0.0 }, 1 << 16);
            assert_eq!(s.kernel.resolve(&s.source), Kernel::Exact);
            fwhm(&predict_h0(&s).unwrap().profile).unwrap()
        })
        .collect();
    let ratio = widths[1] / widths[0];
    ensure((ratio - 2.0).abs() / 2.0 < 0.1, format!("FWHM ratio {ratio}"))?;
    Ok(format!("FWHM {:.1} um -> {:.1} um when b halves, ratio {ratio:.4} (exact kernel)", widths[0] * 1e6, widths[1] * 1e6))
}

fn fringe_onset(tmp: &Path) -> Outcome {
    let out = tmp.join("c8");
    slitlab("onset", &configs().join("onset.toml"), &out)?;
    let csv = fs::read_to_string(out.join("onset.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    ensure(rows.len() >= 2, "no rows")?;
    let num = |s: &str| s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
    for r in &rows {
        ensure(r[4].is_empty(), format!("row failed: {}", r[4]))?;
        ensure(num(r[2])?.is_finite() && num(r[1])?.is_finite(), "non-finite row")?;
    }
    let (first_nf, first_v) = (num(rows[0][1])?, num(rows[0][2])?);
    let last_nf = num(rows[rows.len() - 1][1])?;
    ensure(first_nf <= 0.01 * (1.0 + 1e-9) && last_nf >= 10.0 * (1.0 - 1e-9), format!("N_F range {first_nf}..{last_nf}"))?;
    ensure(first_v > 0.99, format!("visibility {first_v} at N_F = {first_nf}"))?;
    Ok(format!("{} rows over N_F {first_nf:.2}..{last_nf:.1}, all finite, V = {first_v:.5} at N_F = 0.01", rows.len()))
}

fn reproducible(tmp: &Path) -> Outcome {
    let runs = [
        ("simulate", "electron-wide.toml"),
        ("buildup", "buildup.toml"),
        ("sweep-xb", "electron-fine.toml"),
        ("onset", "onset.toml"),
        ("feasibility", "ca-drop.toml"),
        ("compare", "electron-fine.toml"),
    ];
    let mut compared = 0;
    for (command, file) in runs {
        let digests: Vec<Vec<(String, String)>> = (0..2)
            .map(|i| {
                let out = tmp.join(format!("c9-{command}-{i}"));
                slitlab(command, &configs().join(file), &out)?;
                let m: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
                Ok(m["outputs"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|e| (e["file"].as_str().unwrap().to_owned(), e["sha256"].as_str().unwrap().to_owned()))
                    .collect())
            })
            .collect::<Result<_, String>>()?;
        ensure(digests[0] == digests[1], format!("{command} digests differ"))?;
        let data = digests[0].iter().filter(|(f, _)| f.ends_with(".csv") || f.ends_with(".json")).count();
        ensure(data > 0, format!("{command} wrote no CSV/JSON"))?;
        compared += data;
    }
    Ok(format!("6 commands run twice, {compared} CSV/JSON digests identical"))
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().unwrap();
    let criteria: [(u32, &str, fn(&Path) -> Outcome); 9] = [
        (1, "wide-beam width W = 100 um", width_of_slit_pattern),
        (2, "W·Δx constant", width_times_slit),
        (3, "propagator matches quadrature oracle", propagator_oracle),
        (4, "drop-experiment golden table", golden_table),
        (5, "Monte Carlo statistics", monte_carlo),
        (6, "deflection-model constraints", deflection_family),
        (7, "fine-beam H0 width scales as 1/b", fine_beam_h0),
        (8, "fringe-onset sweep", fringe_onset),
        (9, "reproducible digests", reproducible),
    ];
    let mut failures = 0;
    for (n, name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| check(tmp.path())))
            .unwrap_or_else(|e| Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail} [{secs:.1} s]"),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {n} ({name}): {why} [{secs:.1} s]");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
