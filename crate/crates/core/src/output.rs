//! Profile CSV export, self-contained SVG plots and study reports.
//!
//! CSV: first column is the physical depth in cm at the collocation nodes
//! (ascending from 0 to Z), then one column per snapshot labeled
//! `t=<seconds>`. Values are written with Rust's shortest-roundtrip float
//! formatting (locale-independent, full double precision), lines end in LF.
//!
//! SVG: a fixed 800×600 viewport, linear axes auto-scaled to the data, one
//! polyline per snapshot and a legend of snapshot times. No plotting
//! dependency; the markup is emitted directly.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::analysis::{ConvergenceStudy, GapTable};
use crate::stepper::RunRecord;

const SVG_WIDTH: f64 = 800.0;
const SVG_HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Column label for a snapshot: the requested time, shortest form.
fn time_label(t: f64) -> String {
    format!("{t}")
}

/// Render the profile table as CSV text.
pub fn profiles_csv(record: &RunRecord) -> String {
    let mut out = String::new();
    out.push_str("z_cm");
    for snap in &record.snapshots {
        let _ = write!(out, ",t={}", time_label(snap.requested_time));
    }
    out.push('\n');
    for (h, &z) in record.depths.iter().enumerate() {
        let _ = write!(out, "{z}");
        for snap in &record.snapshots {
            let _ = write!(out, ",{}", snap.theta[h]);
        }
        out.push('\n');
    }
    out
}

/// Write the profile CSV to a file.
pub fn write_profiles_csv(record: &RunRecord, path: &Path) -> io::Result<()> {
    fs::write(path, profiles_csv(record))
}

/// Render the snapshot profiles as a standalone SVG document.
pub fn profiles_svg(record: &RunRecord) -> String {
    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

    let z_min = 0.0f64;
    let z_max = record.z_len;
    let mut th_min = f64::INFINITY;
    let mut th_max = f64::NEG_INFINITY;
    for snap in &record.snapshots {
        for &v in &snap.theta {
            th_min = th_min.min(v);
            th_max = th_max.max(v);
        }
    }
    if !th_min.is_finite() || th_min == th_max {
        th_min = 0.0;
        th_max = 1.0;
    }
    let pad = 0.05 * (th_max - th_min);
    th_min -= pad;
    th_max += pad;

    let x_of = |z: f64| MARGIN_LEFT + (z - z_min) / (z_max - z_min) * plot_w;
    let y_of = |th: f64| MARGIN_TOP + (th_max - th) / (th_max - th_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" viewBox=\"0 0 {SVG_WIDTH} {SVG_HEIGHT}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" fill=\"white\"/>"
    );

    // Axes.
    let x0 = MARGIN_LEFT;
    let x1 = MARGIN_LEFT + plot_w;
    let y0 = MARGIN_TOP + plot_h;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        svg,
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"black\"/>"
    );

    // Ticks.
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let z = z_min + f * (z_max - z_min);
        let x = x_of(z);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{y0:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{z:.1}</text>",
            y0 + 20.0
        );

        let th = th_min + f * (th_max - th_min);
        let y = y_of(th);
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{x0:.2}\" y2=\"{y:.2}\" stroke=\"black\"/>",
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{th:.4}</text>",
            x0 - 8.0,
            y + 4.0
        );
    }

    // Axis labels.
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">z (cm)</text>",
        MARGIN_LEFT + plot_w / 2.0,
        SVG_HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"18\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">θ</text>",
        MARGIN_TOP + plot_h / 2.0
    );

    // Profiles and legend.
    for (i, snap) in record.snapshots.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for (h, &z) in record.depths.iter().enumerate() {
            let _ = write!(points, "{:.2},{:.2} ", x_of(z), y_of(snap.theta[h]));
        }
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            points.trim_end()
        );

        let ly = MARGIN_TOP + 10.0 + 18.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            lx + 22.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">t={} s</text>",
            lx + 28.0,
            ly + 4.0,
            time_label(snap.requested_time)
        );
    }

    svg.push_str("</svg>\n");
    svg
}

/// Write the SVG plot to a file.
pub fn write_profiles_svg(record: &RunRecord, path: &Path) -> io::Result<()> {
    fs::write(path, profiles_svg(record))
}

/// Study table as CSV: one row per measured level; the order columns hold
/// the estimate of the pair starting at that level.
pub fn study_csv(study: &ConvergenceStudy) -> String {
    let mut out = String::from("level,err_max,err_l2w,order_max,order_l2w\n");
    for (i, level) in study.measured_levels.iter().enumerate() {
        let om = study
            .orders_max
            .get(i)
            .map(|o| format!("{o:.4}"))
            .unwrap_or_default();
        let ol = study
            .orders_l2w
            .get(i)
            .map(|o| format!("{o:.4}"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{level},{:e},{:e},{om},{ol}",
            study.errors_max[i], study.errors_l2w[i]
        );
    }
    out
}

/// One-page plain-text report of a convergence study.
pub fn study_report(study: &ConvergenceStudy, title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Convergence study: {title}");
    let _ = writeln!(out, "axis: {}", study.axis);
    let _ = writeln!(
        out,
        "levels: {}",
        study
            .levels
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    let _ = writeln!(out, "reference: {}", study.reference);
    let _ = writeln!(out);
    let _ = writeln!(out, "{:>12}  {:>13}  {:>13}", "level", "err_max", "err_l2w");
    for (i, level) in study.measured_levels.iter().enumerate() {
        let _ = writeln!(
            out,
            "{level:>12}  {:>13.6e}  {:>13.6e}",
            study.errors_max[i], study.errors_l2w[i]
        );
    }
    let _ = writeln!(out);
    let fmt_orders = |orders: &[f64]| {
        orders
            .iter()
            .map(|o| format!("{o:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let _ = writeln!(
        out,
        "observed orders (max-norm): {}",
        fmt_orders(&study.orders_max)
    );
    let _ = writeln!(
        out,
        "observed orders (L2_w):     {}",
        fmt_orders(&study.orders_l2w)
    );
    if !study.orders_max.is_empty() {
        let mean = study.orders_max.iter().sum::<f64>() / study.orders_max.len() as f64;
        let _ = writeln!(out, "mean observed order (max-norm): {mean:.4}");
    }
    out
}

/// Gap table as CSV.
pub fn gap_csv(table: &GapTable) -> String {
    let mut out = String::from("pair,N,gap\n");
    for row in &table.rows {
        let _ = writeln!(out, "\"{}\",{},{:e}", row.pair, row.degree, row.gap);
    }
    out
}

/// Plain-text summary of a gap study.
pub fn gap_report(table: &GapTable) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Spectral vs quadrature operator gap (delta = {})",
        table.delta
    );
    let _ = writeln!(out, "{:>8}  {:>13}  pair", "N", "gap");
    for row in &table.rows {
        let _ = writeln!(out, "{:>8}  {:>13.6e}  {}", row.degree, row.gap, row.pair);
    }
    for (pair, ok) in &table.monotone {
        let verdict = if *ok {
            "non-increasing"
        } else {
            "NOT monotone"
        };
        let _ = writeln!(out, "monotone check [{pair}]: {verdict}");
    }
    out
}
