//! Self-contained SVG rendering for stacked waveforms and BER waterfalls.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use keysim_core::sweep::SweepPoint;
use keysim_core::Scheme;

const WIDTH: f64 = 900.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const PANEL_HEIGHT: f64 = 130.0;
const PANEL_GAP: f64 = 28.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e", "#17becf"];

/// Which kind of figure to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    WaveformStack,
    BerWaterfall,
}

/// What a figure shows: its kind, title, series labels and y-axis scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub title: String,
    pub labels: Vec<String>,
    pub log_y: bool,
}

/// How a waveform panel is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trace {
    Line,
    /// Sample-and-hold, for bit patterns.
    Step,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub trace: Trace,
    /// Sample ranges drawn highlighted (e.g. flipped bits).
    pub highlights: Vec<(f64, f64)>,
}

/// A measured BER curve plus an optional closed-form overlay.
#[derive(Debug, Clone, PartialEq)]
pub struct BerSeries {
    pub points: Vec<SweepPoint>,
    pub theory: Option<Vec<(f64, f64)>>,
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn header(svg: &mut String, height: f64, title: &str) {
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>
<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn polyline(svg: &mut String, points: &[(f64, f64)], color: &str, dashed: bool) {
    if points.is_empty() {
        return;
    }
    let mut coords = String::new();
    for (x, y) in points {
        let _ = write!(coords, "{x:.2},{y:.2} ");
    }
    let dash = if dashed { r#" stroke-dasharray="6,4""# } else { "" };
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
        coords.trim_end()
    );
}

/// Stacked panels sharing a time axis, one per label.
pub fn waveform_stack(spec: &PlotSpec, panels: &[Panel]) -> Result<String> {
    if spec.kind != PlotKind::WaveformStack {
        bail!("waveform_stack needs a waveform-stack plot spec");
    }
    if panels.is_empty() {
        bail!("waveform stack needs at least one panel");
    }
    if spec.labels.len() != panels.len() {
        bail!("{} labels for {} panels", spec.labels.len(), panels.len());
    }
    let t_max = panels
        .iter()
        .filter_map(|p| {
            let dt = if p.times.len() > 1 { p.times[1] - p.times[0] } else { 0.0 };
            p.times.last().map(|t| t + if p.trace == Trace::Step { dt } else { 0.0 })
        })
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let height = MARGIN_TOP + panels.len() as f64 * (PANEL_HEIGHT + PANEL_GAP) + MARGIN_BOTTOM;

    let mut svg = String::new();
    header(&mut svg, height, &spec.title);
    for (n, (panel, label)) in panels.iter().zip(&spec.labels).enumerate() {
        let top = MARGIN_TOP + n as f64 * (PANEL_HEIGHT + PANEL_GAP);
        let (lo, hi) = panel
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let (lo, hi) = if lo.is_finite() { (lo.min(0.0), hi.max(0.0)) } else { (-1.0, 1.0) };
        let pad = ((hi - lo) * 0.1).max(0.05);
        let (lo, hi) = (lo - pad, hi + pad);
        let sx = |t: f64| MARGIN_LEFT + t / t_max * plot_w;
        let sy = |v: f64| top + (hi - v) / (hi - lo) * PANEL_HEIGHT;

        let _ = writeln!(
            svg,
            r##"<rect x="{MARGIN_LEFT}" y="{top:.2}" width="{plot_w:.2}" height="{PANEL_HEIGHT}" fill="none" stroke="#444"/>"##
        );
        for &(a, b) in &panel.highlights {
            let _ = writeln!(
                svg,
                r##"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{PANEL_HEIGHT}" fill="#ffcc00" fill-opacity="0.35"/>"##,
                sx(a),
                (sx(b) - sx(a)).max(1.0)
            );
        }
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#bbb"/>"##,
            MARGIN_LEFT + plot_w,
            y = sy(0.0)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{MARGIN_LEFT}" y="{:.2}">{}</text>"#,
            top - 6.0,
            escape(label)
        );
        for v in [lo + pad, hi - pad] {
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 6.0,
                sy(v) + 4.0,
                format_tick(v)
            );
        }

        let mut pts = Vec::with_capacity(panel.values.len() * 2);
        match panel.trace {
            Trace::Line => {
                for (&t, &v) in panel.times.iter().zip(&panel.values) {
                    pts.push((sx(t), sy(v)));
                }
            }
            Trace::Step => {
                let dt = if panel.times.len() > 1 { panel.times[1] - panel.times[0] } else { t_max };
                for (&t, &v) in panel.times.iter().zip(&panel.values) {
                    pts.push((sx(t), sy(v)));
                    pts.push((sx(t + dt), sy(v)));
                }
            }
        }
        polyline(&mut svg, &pts, PALETTE[n % PALETTE.len()], false);
    }

    let axis_y = height - MARGIN_BOTTOM + 4.0;
    let ticks = if t_max.fract() == 0.0 && (1.0..=20.0).contains(&t_max) { t_max as usize } else { 10 };
    for i in 0..=ticks {
        let t = t_max * i as f64 / ticks as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + t / t_max * plot_w,
            axis_y,
            format_tick(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">time (s)</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        axis_y + 22.0
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn format_tick(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

/// Scheme colour, falling back to the palette for repeated schemes.
fn series_color(points: &[SweepPoint], index: usize) -> &'static str {
    match points.first().map(|p| p.scheme) {
        Some(Scheme::Ask) if index < 3 => PALETTE[0],
        Some(Scheme::Fsk) if index < 3 => PALETTE[1],
        Some(Scheme::Bpsk) if index < 3 => PALETTE[2],
        _ => PALETTE[index % PALETTE.len()],
    }
}

/// BER against Eb/N0 on a log10 axis. Points with zero errors sit on a
/// separate bottom row labelled `<1/N`.
pub fn ber_waterfall(spec: &PlotSpec, series: &[BerSeries]) -> Result<String> {
    if spec.kind != PlotKind::BerWaterfall {
        bail!("ber_waterfall needs a ber-waterfall plot spec");
    }
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        bail!("BER waterfall needs at least one sweep series");
    }
    if spec.labels.len() != series.len() {
        bail!("{} labels for {} series", spec.labels.len(), series.len());
    }
    let all = series.iter().flat_map(|s| &s.points);
    let (x_lo, x_hi) = all
        .clone()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.ebn0_db), b.max(p.ebn0_db)));
    let (x_lo, x_hi) = if x_hi > x_lo { (x_lo, x_hi) } else { (x_lo - 1.0, x_hi + 1.0) };
    let max_bits = all.clone().map(|p| p.bits_sent).max().unwrap_or(1).max(1);
    let floor = 1.0 / max_bits as f64;
    let min_positive = all
        .clone()
        .filter(|p| p.ber > 0.0)
        .map(|p| p.ci_low.max(p.ber * 0.5).min(p.ber))
        .chain(
            series
                .iter()
                .flat_map(|s| s.theory.iter().flatten())
                .map(|&(_, y)| y)
                .filter(|&y| y >= floor),
        )
        .fold(1.0f64, f64::min);
    let any_zero = series.iter().flat_map(|s| &s.points).any(|p| p.ber == 0.0);
    let lowest = if any_zero { min_positive.min(floor) } else { min_positive };
    let decade_lo = lowest.log10().floor().min(-1.0);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT - 150.0;
    let plot_h = 420.0;
    let zero_row = 28.0;
    let height = MARGIN_TOP + plot_h + zero_row + MARGIN_BOTTOM + 10.0;
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |ber: f64| {
        let v = if spec.log_y { ber.log10() } else { ber };
        let (lo, hi) = if spec.log_y { (decade_lo, 0.0) } else { (0.0, 1.0) };
        MARGIN_TOP + (hi - v.max(lo)) / (hi - lo) * plot_h
    };
    let zero_y = MARGIN_TOP + plot_h + zero_row * 0.6;

    let mut svg = String::new();
    header(&mut svg, height, &spec.title);
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w:.2}" height="{plot_h}" fill="none" stroke="#444"/>"##
    );
    if spec.log_y {
        let mut d = decade_lo as i32;
        while d <= 0 {
            let y = sy(10f64.powi(d));
            let _ = writeln!(
                svg,
                r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>
<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"##,
                MARGIN_LEFT + plot_w,
                MARGIN_LEFT - 6.0,
                y + 4.0
            );
            d += 1;
        }
    }
    let _ = writeln!(
        svg,
        r##"<line x1="{MARGIN_LEFT}" y1="{zero_y:.2}" x2="{:.2}" y2="{zero_y:.2}" stroke="#ddd" stroke-dasharray="2,3"/>
<text x="{:.2}" y="{:.2}" text-anchor="end">&lt;1/{max_bits}</text>"##,
        MARGIN_LEFT + plot_w,
        MARGIN_LEFT - 6.0,
        zero_y + 4.0
    );
    let ticks = ((x_hi - x_lo).round() as usize).clamp(1, 20);
    for i in 0..=ticks {
        let x = x_lo + (x_hi - x_lo) * i as f64 / ticks as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(x),
            MARGIN_TOP + plot_h + zero_row + 18.0,
            format_tick(x)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Eb/N0 (dB)</text>
<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">BER</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        height - 12.0,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    for (n, (s, label)) in series.iter().zip(&spec.labels).enumerate() {
        let color = series_color(&s.points, n);
        if let Some(theory) = &s.theory {
            let pts: Vec<_> = theory
                .iter()
                .filter(|&&(_, y)| y >= 10f64.powf(decade_lo))
                .map(|&(x, y)| (sx(x), sy(y)))
                .collect();
            polyline(&mut svg, &pts, color, true);
        }
        let measured: Vec<_> = s
            .points
            .iter()
            .filter(|p| p.ber > 0.0)
            .map(|p| (sx(p.ebn0_db), sy(p.ber)))
            .collect();
        polyline(&mut svg, &measured, color, false);
        for p in &s.points {
            let x = sx(p.ebn0_db);
            if p.ber > 0.0 {
                let (y_hi, y_lo) = (sy(p.ci_high), sy(p.ci_low.max(10f64.powf(decade_lo))));
                let _ = writeln!(
                    svg,
                    r#"<line x1="{x:.2}" y1="{y_hi:.2}" x2="{x:.2}" y2="{y_lo:.2}" stroke="{color}"/>
<circle cx="{x:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                    sy(p.ber)
                );
            } else {
                let _ = writeln!(
                    svg,
                    r#"<path d="M {:.2} {:.2} L {:.2} {:.2} L {x:.2} {:.2} Z" fill="none" stroke="{color}"/>"#,
                    x - 4.0,
                    zero_y - 4.0,
                    x + 4.0,
                    zero_y - 4.0,
                    zero_y + 3.0
                );
            }
        }
        let ly = MARGIN_TOP + 14.0 + n as f64 * 18.0;
        let lx = MARGIN_LEFT + plot_w + 14.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>
<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Splits sweep rows into series by (scheme, error rate), keeping file order.
pub fn group_series(points: &[SweepPoint]) -> Vec<(String, Vec<SweepPoint>)> {
    let mut groups: Vec<(String, Vec<SweepPoint>)> = Vec::new();
    for p in points {
        let label = format!("{} p={}", p.scheme.as_str().to_uppercase(), p.error_rate);
        match groups.iter_mut().find(|(l, _)| *l == label) {
            Some((_, v)) => v.push(p.clone()),
            None => groups.push((label, vec![p.clone()])),
        }
    }
    groups
}
