//! CSV, JSON and SVG writers for grids, cuts, projections and curvature traces.
//!
//! Floats are written as the shortest decimal that parses back to the same
//! value, so every file is byte-deterministic and re-parses exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase_map::{PhaseGrid, RadialCurve, TransitionCut};
use crate::topology::{CurvatureTrace, MethodContext};

pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        // `+ 0.0` folds negative zero into zero.
        format!("{}", v + 0.0)
    }
}

/// Inverse of [`format_f64`].
pub fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

fn csv_string<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>())?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is built from UTF-8 fields"))
}

/// `<x_label>,<y_label>,chern,method,min_gap,flag`, row-major with y outer.
pub fn grid_csv(grid: &PhaseGrid) -> Result<String> {
    let header = [grid.x_label.as_str(), grid.y_label.as_str(), "chern", "method", "min_gap", "flag"];
    csv_string(
        &header,
        grid.cells.iter().map(|c| {
            [
                format_f64(c.x),
                format_f64(c.y),
                format_f64(c.chern),
                grid.method.clone(),
                opt(c.min_gap),
                c.flag.clone(),
            ]
        }),
    )
}

/// `x,chern` along the varying coordinate.
pub fn cut_csv(cut: &TransitionCut) -> Result<String> {
    csv_string(&["x", "chern"], cut.points.iter().map(|p| [format_f64(p.x), format_f64(p.chern)]))
}

/// `g_tilde_prime,h0_tilde_prime,chern`, curves concatenated in input order.
pub fn projection_csv(curves: &[RadialCurve]) -> Result<String> {
    csv_string(
        &["g_tilde_prime", "h0_tilde_prime", "chern"],
        curves.iter().flat_map(|c| {
            c.samples
                .iter()
                .map(|s| [format_f64(s.g_tilde_prime), format_f64(s.h0_tilde_prime), format_f64(s.chern)])
        }),
    )
}

/// `theta_rad,sigma_y_sum,f_phi` followed by one `sy_<label>` column per channel.
pub fn curvature_csv(trace: &CurvatureTrace) -> Result<String> {
    let extra: Vec<String> = trace.channel_sy.iter().map(|(l, _)| format!("sy_{l}")).collect();
    let mut header = vec!["theta_rad", "sigma_y_sum", "f_phi"];
    header.extend(extra.iter().map(String::as_str));
    csv_string(
        &header,
        (0..trace.theta.len()).map(|k| {
            let mut row = vec![
                format_f64(trace.theta[k]),
                format_f64(trace.sigma_y_sum[k]),
                format_f64(trace.f_phi[k]),
            ];
            row.extend(trace.channel_sy.iter().map(|(_, v)| format_f64(v[k])));
            row
        }),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExportMetadata {
    pub method: String,
    pub alpha: f64,
    pub dt: f64,
    pub n_theta: usize,
    pub version: String,
}

impl ExportMetadata {
    pub fn new(method: &str, ctx: &MethodContext) -> Self {
        Self {
            method: method.into(),
            alpha: ctx.alpha,
            dt: ctx.settings.dt,
            n_theta: ctx.settings.n_theta,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    metadata: &'a ExportMetadata,
    data: &'a T,
}

/// Pretty JSON of `data` under a metadata header. `NaN` becomes `null`.
pub fn to_json<T: Serialize>(data: &T, metadata: &ExportMetadata) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Document { metadata, data })?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SvgSize {
    pub width: u32,
    pub height: u32,
}

impl Default for SvgSize {
    fn default() -> Self {
        Self { width: 640, height: 480 }
    }
}

const RAMP: [&str; 4] = ["#f7fbff", "#9ecae1", "#3182bd", "#08306b"];
const MISSING: &str = "#bdbdbd";

fn ramp_color(v: f64) -> &'static str {
    if !v.is_finite() {
        return MISSING;
    }
    RAMP[v.round().clamp(0.0, 3.0) as usize]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Heatmap with one rect per cell, y increasing upward, a four-step color ramp
/// over C in [0, 3] and gray for failed cells.
pub fn grid_svg(grid: &PhaseGrid, size: SvgSize) -> String {
    let (left, right, top, bottom) = (70.0, 90.0, 20.0, 55.0);
    let w = size.width as f64;
    let h = size.height as f64;
    let pw = (w - left - right).max(1.0);
    let ph = (h - top - bottom).max(1.0);
    let nx = grid.x_axis.count();
    let ny = grid.y_axis.count();
    let cw = pw / nx as f64;
    let ch = ph / ny as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="11">"#,
        size.width, size.height, size.width, size.height
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for iy in 0..ny {
        for ix in 0..nx {
            let c = grid.cell(ix, iy);
            let _ = writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"><title>{}</title></rect>"#,
                left + ix as f64 * cw,
                top + (ny - 1 - iy) as f64 * ch,
                cw,
                ch,
                ramp_color(c.chern),
                format_f64(c.chern)
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw:.3}" height="{ph:.3}" fill="none" stroke="black"/>"#
    );

    let ticks = |axis: &crate::phase_map::AxisSpec| {
        [0, (axis.count() - 1) / 2, axis.count() - 1].map(|k| (k, axis.point(k)))
    };
    for (k, v) in ticks(&grid.x_axis) {
        let x = left + (k as f64 + 0.5) * cw;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}" stroke="black"/><text x="{x:.3}" y="{:.3}" text-anchor="middle">{v:.2}</text>"#,
            top + ph,
            top + ph + 4.0,
            top + ph + 16.0
        );
    }
    for (k, v) in ticks(&grid.y_axis) {
        let y = top + (ny as f64 - k as f64 - 0.5) * ch;
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{y:.3}" x2="{left}" y2="{y:.3}" stroke="black"/><text x="{:.3}" y="{:.3}" text-anchor="end">{v:.2}</text>"#,
            left - 4.0,
            left - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 12.0,
        escape(&grid.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.3}" text-anchor="middle" transform="rotate(-90 16 {:.3})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape(&grid.y_label)
    );
    for (k, color) in RAMP.iter().enumerate() {
        let y = top + k as f64 * 20.0;
        let _ = writeln!(
            s,
            r#"<rect x="{:.3}" y="{y:.3}" width="14" height="14" fill="{color}" stroke="black"/><text x="{:.3}" y="{:.3}">C = {k}</text>"#,
            w - right + 12.0,
            w - right + 32.0,
            y + 11.0
        );
    }
    let y = top + 4.0 * 20.0;
    let _ = writeln!(
        s,
        r#"<rect x="{:.3}" y="{y:.3}" width="14" height="14" fill="{MISSING}" stroke="black"/><text x="{:.3}" y="{:.3}">n/a</text>"#,
        w - right + 12.0,
        w - right + 32.0,
        y + 11.0
    );
    s.push_str("</svg>\n");
    s
}

/// Writes `contents` to `path`, attaching the path to any I/O failure.
pub fn write_file(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
