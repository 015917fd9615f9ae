//! Run artefacts: trajectory CSV, metrics JSON and an SVG plot.
//!
//! All three are plain functions of their inputs, so identical runs give
//! byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::Result;
use crate::scenario::{RunMetrics, TrajectoryLog};

/// Column names in file order for an `n`-link log.
pub fn csv_columns(n: usize) -> Vec<String> {
    let mut cols = vec!["time_s".to_string(), "platform_tilt_deg".to_string()];
    let per = |prefix: &str, cols: &mut Vec<String>| {
        cols.extend((1..=n).map(|k| format!("{prefix}_{k}")));
    };
    per("space_deg", &mut cols);
    per("joint_deg", &mut cols);
    per("torque_nm", &mut cols);
    per("support_tilt_deg", &mut cols);
    per("gravity_nm", &mut cols);
    per("inertial_nm", &mut cols);
    per("external_nm", &mut cols);
    cols.push("com_x_m".to_string());
    cols
}

/// Indices of every `decimate`-th record, always including the first and
/// the last.
pub fn decimated_indices(len: usize, decimate: usize) -> Vec<usize> {
    let step = decimate.max(1);
    let mut out: Vec<usize> = (0..len).step_by(step).collect();
    if len > 0 && out.last() != Some(&(len - 1)) {
        out.push(len - 1);
    }
    out
}

pub fn write_csv<W: Write>(log: &TrajectoryLog, decimate: usize, out: W) -> Result<()> {
    let n = log.links;
    let mut w = BufWriter::new(out);
    writeln!(w, "{}", csv_columns(n).join(","))?;
    let mut line = String::new();
    for i in decimated_indices(log.records.len(), decimate) {
        let r = &log.records[i];
        line.clear();
        let _ = write!(line, "{:.3},{:.6}", r.time, r.platform.tilt.to_degrees());
        for a in &r.space_angles {
            let _ = write!(line, ",{:.6}", a.to_degrees());
        }
        for q in &r.joint_angles {
            let _ = write!(line, ",{:.6}", q.to_degrees());
        }
        for (a, p) in r.active_torques.iter().zip(&r.passive_torques) {
            let _ = write!(line, ",{:.6}", a + p);
        }
        let module = |k: usize| r.modules.get(k).copied().unwrap_or_default();
        for k in 0..n {
            let _ = write!(line, ",{:.6}", module(k).support_estimate.to_degrees());
        }
        for k in 0..n {
            let _ = write!(line, ",{:.6}", module(k).gravity_torque);
        }
        for k in 0..n {
            let _ = write!(line, ",{:.6}", module(k).inertial_torque);
        }
        for k in 0..n {
            let _ = write!(line, ",{:.6}", module(k).external_torque);
        }
        let _ = write!(line, ",{:.6}", r.com_x);
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(log: &TrajectoryLog, decimate: usize, path: &Path) -> Result<()> {
    write_csv(log, decimate, fs::File::create(path)?)
}

/// Flat JSON object: the scenario name, then every metric. Undefined
/// values (no settling, no divergence) are `null`.
pub fn metrics_json(name: &str, metrics: &RunMetrics) -> Result<String> {
    let mut map = Map::new();
    map.insert("scenario".into(), Value::String(name.to_string()));
    for (k, v) in metrics.key_values() {
        let value = serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number);
        map.insert(k, value);
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(map))?;
    text.push('\n');
    Ok(text)
}

pub fn emit_metrics(name: &str, metrics: &RunMetrics, path: &Path) -> Result<()> {
    fs::write(path, metrics_json(name, metrics)?)?;
    Ok(())
}

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const COLOURS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];
/// Points per series; longer logs are thinned evenly.
const MAX_POINTS: usize = 2000;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Roughly five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-9);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Space angle of every link and the platform tilt against time, in
/// degrees.
pub fn render_svg(log: &TrajectoryLog, title: &str) -> String {
    let n = log.links;
    let idx = decimated_indices(log.records.len(), log.records.len().div_ceil(MAX_POINTS).max(1));
    let times: Vec<f64> = idx.iter().map(|&i| log.records[i].time).collect();
    let mut series: Vec<(String, Vec<f64>)> = (0..n)
        .map(|k| {
            (
                format!("link {}", k + 1),
                idx.iter()
                    .map(|&i| log.records[i].space_angles[k].to_degrees())
                    .collect(),
            )
        })
        .collect();
    series.push((
        "platform".into(),
        idx.iter().map(|&i| log.records[i].platform.tilt.to_degrees()).collect(),
    ));

    let t_max = times.last().copied().unwrap_or(0.0).max(log.dt);
    let (mut lo, mut hi) = series
        .iter()
        .flat_map(|(_, v)| v.iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
    if !lo.is_finite() {
        (lo, hi) = (-1.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(0.5);
    let (lo, hi) = (lo - pad, hi + pad);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = |t: f64| LEFT + t / t_max * plot_w;
    let y = |v: f64| TOP + (hi - v) / (hi - lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );

    s.push_str("<g stroke=\"#dddddd\" stroke-width=\"1\">\n");
    for v in ticks(lo, hi) {
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}"/>"#,
            y(v),
            LEFT + plot_w
        );
    }
    s.push_str("</g>\n");
    for v in ticks(lo, hi) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y(v) + 4.0,
            label(v)
        );
    }
    for t in ticks(0.0, t_max) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x(t),
            TOP + plot_h + 18.0,
            label(t)
        );
    }
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333333"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">time (s)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0:.2}" text-anchor="middle" transform="rotate(-90 18 {0:.2})">angle (deg)</text>"#,
        TOP + plot_h / 2.0
    );

    for (k, (name, values)) in series.iter().enumerate() {
        let colour = if k == n { "#555555" } else { COLOURS[k % COLOURS.len()] };
        let dash = if k == n { r#" stroke-dasharray="6 4""# } else { "" };
        let mut points = String::new();
        for (t, v) in times.iter().zip(values) {
            let _ = write!(points, "{:.2},{:.2} ", x(*t), y(*v));
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{}"/>"#,
            points.trim_end()
        );
        let ly = TOP + 12.0 + 20.0 * k as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"{dash}/>"#,
            lx + 25.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 32.0, ly + 4.0, escape(name));
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_plot(log: &TrajectoryLog, title: &str, path: &Path) -> Result<()> {
    fs::write(path, render_svg(log, title))?;
    Ok(())
}
