//! Minimal self-contained SVG line plots.

use std::fmt::Write as _;

const PANEL_W: f64 = 560.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 44.0;
/// Points kept per series after decimation.
const MAX_POINTS: usize = 2000;
const COLORS: [&str; 4] = ["#1f4e9c", "#c0392b", "#2e8b57", "#7d3c98"];

pub struct Series<'a> {
    pub label: String,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkerKind {
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marker {
    pub kind: MarkerKind,
    pub k: i32,
    pub x: f64,
}

pub struct Panel<'a> {
    pub title: String,
    pub x_unit: &'a str,
    pub y_label: &'a str,
    pub log_x: bool,
    pub series: Vec<Series<'a>>,
    pub markers: Vec<Marker>,
    /// Endpoints of the W bracket.
    pub bracket: Option<(f64, f64)>,
}

impl<'a> Panel<'a> {
    pub fn new(title: impl Into<String>, x_unit: &'a str, y_label: &'a str) -> Self {
        Self { title: title.into(), x_unit, y_label, log_x: false, series: Vec::new(), markers: Vec::new(), bracket: None }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Keeps the largest value in each bucket so fringes survive decimation.
fn decimate(xs: &[f64], ys: &[f64], keep: usize) -> Vec<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(x, y)| x.is_finite() && y.is_finite()).map(|(x, y)| (*x, *y)).collect();
    if pts.len() <= keep {
        return pts;
    }
    pts.chunks(pts.len().div_ceil(keep))
        .map(|c| *c.iter().max_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty chunk"))
        .collect()
}

fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn prefix_for(magnitude: f64) -> (f64, &'static str) {
    const PREFIXES: [(f64, &str); 7] = [(1e6, "M"), (1e3, "k"), (1.0, ""), (1e-3, "m"), (1e-6, "μ"), (1e-9, "n"), (1e-12, "p")];
    PREFIXES.iter().copied().find(|(s, _)| magnitude >= *s).unwrap_or((1e-12, "p"))
}

fn trim_number(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool, from_zero: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = if log { (1.0, 10.0) } else { (0.0, 1.0) };
        }
        if from_zero {
            lo = lo.min(0.0);
        }
        if hi <= lo {
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
            hi = lo + pad;
        }
        Self { lo, hi, log }
    }

    fn unit(&self, v: f64) -> f64 {
        if self.log {
            (v.ln() - self.lo.ln()) / (self.hi.ln() - self.lo.ln())
        } else {
            (v - self.lo) / (self.hi - self.lo)
        }
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.log10().ceil() as i32, self.hi.log10().floor() as i32);
            return (a..=b).map(|e| 10f64.powi(e)).collect();
        }
        let step = nice_step(self.hi - self.lo, 5);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last).map(|i| i as f64 * step).collect()
    }
}

fn render_panel(out: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let decimated: Vec<Vec<(f64, f64)>> = panel.series.iter().map(|s| decimate(s.xs, s.ys, MAX_POINTS)).collect();
    let xa = Axis::fit(decimated.iter().flatten().map(|p| p.0), panel.log_x, false);
    let ya = Axis::fit(decimated.iter().flatten().map(|p| p.1), false, true);
    let px = |x: f64| ox + MARGIN_L + xa.unit(x) * plot_w;
    let py = |y: f64| oy + MARGIN_T + (1.0 - ya.unit(y)) * plot_h;

    let _ = writeln!(out, r#"<g class="panel">"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#,
        ox + MARGIN_L + plot_w / 2.0,
        oy + 18.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{:.2}" y="{:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#444"/>"##,
        ox + MARGIN_L,
        oy + MARGIN_T
    );

    // x ticks share one SI prefix chosen from the axis extent
    let (scale, prefix) = if xa.log { (1.0, "") } else { prefix_for(xa.lo.abs().max(xa.hi.abs())) };
    for t in xa.ticks() {
        let x = px(t);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#444"/><text x="{x:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"##,
            oy + MARGIN_T + plot_h,
            oy + MARGIN_T + plot_h + 4.0,
            oy + MARGIN_T + plot_h + 15.0,
            if xa.log { format!("{t:e}") } else { trim_number(t / scale) }
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
        ox + MARGIN_L + plot_w / 2.0,
        oy + PANEL_H - 8.0,
        escape(&format!("{prefix}{}", panel.x_unit)).trim_end()
    );
    for t in ya.ticks() {
        let y = py(t);
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#444"/><text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"##,
            ox + MARGIN_L - 4.0,
            ox + MARGIN_L,
            ox + MARGIN_L - 6.0,
            y + 3.0,
            trim_number_sci(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        ox + 14.0,
        oy + MARGIN_T + plot_h / 2.0,
        ox + 14.0,
        oy + MARGIN_T + plot_h / 2.0,
        escape(panel.y_label)
    );

    for (i, (series, pts)) in panel.series.iter().zip(&decimated).enumerate() {
        if pts.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (j, (x, y)) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if j == 0 { "M" } else { " L" }, px(*x), py(*y));
        }
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(
            out,
            r#"<path class="series" data-label="{}" d="{d}" fill="none" stroke="{color}" stroke-width="1.2"/>"#,
            escape(&series.label)
        );
        if panel.series.len() > 1 {
            let ly = oy + MARGIN_T + 14.0 + 14.0 * i as f64;
            let lx = ox + MARGIN_L + plot_w - 110.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="10">{}</text>"#,
                lx + 16.0,
                lx + 20.0,
                ly + 3.0,
                escape(&series.label)
            );
        }
    }

    for m in &panel.markers {
        if !(m.x >= xa.lo && m.x <= xa.hi) {
            continue;
        }
        // z labels and f labels sit on two rows so neighbours do not collide
        let (class, name, dash, row) = match m.kind {
            MarkerKind::Minimum => ("z-marker", "z", "4 3", 11.0),
            MarkerKind::Maximum => ("f-marker", "f", "1 3", 22.0),
        };
        let x = px(m.x);
        let _ = writeln!(
            out,
            r##"<g class="{class}" data-k="{}" data-x="{:e}"><line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#777" stroke-dasharray="{dash}"/><text x="{x:.2}" y="{:.2}" font-size="9" text-anchor="middle" fill="#333">{name}<tspan font-size="7" dy="2">{}</tspan></text></g>"##,
            m.k,
            m.x,
            oy + MARGIN_T,
            oy + MARGIN_T + plot_h,
            oy + MARGIN_T + row,
            m.k
        );
    }

    if let Some((a, b)) = panel.bracket {
        if a >= xa.lo && b <= xa.hi {
            let (xa_px, xb_px) = (px(a), px(b));
            let y = oy + MARGIN_T + plot_h * 0.9;
            let (s, p) = prefix_for((b - a).abs());
            let _ = writeln!(
                out,
                r##"<g class="w-bracket" data-width="{:e}"><path d="M{xa_px:.2},{:.2} V{y:.2} H{xb_px:.2} V{:.2}" fill="none" stroke="#000"/><text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">W = {} {p}{}</text></g>"##,
                b - a,
                y - 6.0,
                y - 6.0,
                (xa_px + xb_px) / 2.0,
                y - 4.0,
                trim_number((b - a) / s),
                panel.x_unit
            );
        }
    }
    let _ = writeln!(out, "</g>");
}

fn trim_number_sci(v: f64) -> String {
    if v == 0.0 || (1e-2..1e4).contains(&v.abs()) {
        trim_number(v)
    } else {
        format!("{v:.2e}")
    }
}

/// Lays panels out in a grid of `columns` columns.
pub fn render(title: &str, panels: &[Panel], columns: usize) -> String {
    let columns = columns.clamp(1, panels.len().max(1));
    let rows = panels.len().div_ceil(columns).max(1);
    let width = PANEL_W * columns as f64;
    let height = PANEL_H * rows as f64 + 24.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, panel) in panels.iter().enumerate() {
        let (c, r) = (i % columns, i / columns);
        render_panel(&mut out, panel, c as f64 * PANEL_W, 24.0 + r as f64 * PANEL_H);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sinc(n: usize) -> (Vec<f64>, Vec<f64>) {
        let xs: Vec<f64> = (0..n).map(|i| -200e-6 + 400e-6 * i as f64 / (n - 1) as f64).collect();
        let ys = xs
            .iter()
            .map(|&x| {
                let u = std::f64::consts::PI * x / 50e-6;
                if u == 0.0 {
                    1.0
                } else {
                    (u.sin() / u).powi(2)
                }
            })
            .collect();
        (xs, ys)
    }

    #[test]
    fn markers_and_bracket_render() {
        let (xs, ys) = sinc(4001);
        let mut p = Panel::new("sinc", "m", "intensity");
        p.series.push(Series { label: "h0".into(), xs: &xs, ys: &ys });
        p.markers = vec![
            Marker { kind: MarkerKind::Minimum, k: -1, x: -50e-6 },
            Marker { kind: MarkerKind::Minimum, k: 1, x: 50e-6 },
            Marker { kind: MarkerKind::Maximum, k: 0, x: 0.0 },
        ];
        p.bracket = Some((-50e-6, 50e-6));
        let svg = render("t", &[p], 1);
        assert_eq!(svg.matches(r#"class="z-marker""#).count(), 2);
        assert!(svg.contains(r#"data-k="-1" data-x="-5e-5""#));
        assert!(svg.contains("W = 100 μm"));
        assert!(svg.contains(">μm<"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn plain_curve_without_annotations() {
        let (xs, ys) = sinc(10);
        let mut p = Panel::new("plain", "m", "intensity");
        p.series.push(Series { label: "a".into(), xs: &xs, ys: &ys });
        let svg = render("t", &[p], 1);
        assert!(!svg.contains("z-marker"));
        assert_eq!(svg.matches(r#"class="series""#).count(), 1);
    }

    #[test]
    fn small_multiples_grid() {
        let (xs, ys) = sinc(100);
        let panels: Vec<Panel> = (0..9)
            .map(|i| {
                let mut p = Panel::new(format!("step {i}"), "m", "I");
                p.series.push(Series { label: "a".into(), xs: &xs, ys: &ys });
                p
            })
            .collect();
        let svg = render("sweep", &panels, 3);
        assert_eq!(svg.matches(r#"<g class="panel">"#).count(), 9);
        assert!(svg.contains(r#"width="1680" height="984""#));
    }

    #[test]
    fn decimation_keeps_peaks() {
        let (xs, ys) = sinc(100_001);
        let d = decimate(&xs, &ys, 500);
        assert!(d.len() <= 500);
        assert!(d.iter().any(|p| p.1 == 1.0));
    }

    #[test]
    fn degenerate_data_still_renders() {
        let xs = [1.0];
        let ys = [f64::NAN];
        let mut p = Panel::new("empty", "m", "I");
        p.series.push(Series { label: "a".into(), xs: &xs, ys: &ys });
        assert!(render("t", &[p], 1).contains("</svg>"));
        assert!(render("none", &[], 2).contains("</svg>"));
    }
}
