//! CSV + SVG reports of convergence traces.
//!
//! The SVG writer is deliberately small: axes, five ticks per axis, one
//! polyline per trace and a legend.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::trace::{write_csv_file, ConvergenceTrace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    /// Best value against evaluations.
    Convergence,
    /// Cumulative time against iteration.
    Timing,
}

impl ReportKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReportKind::Convergence => "convergence",
            ReportKind::Timing => "timing",
        }
    }

    pub fn axis_labels(&self) -> (&'static str, &'static str) {
        match self {
            ReportKind::Convergence => ("evals", "best_value"),
            ReportKind::Timing => ("iteration", "cum_time_ms"),
        }
    }

    fn series(&self, t: &ConvergenceTrace) -> Vec<(f64, f64)> {
        t.rows
            .iter()
            .map(|r| match self {
                ReportKind::Convergence => (r.evals as f64, r.best_value),
                ReportKind::Timing => (r.iteration as f64, r.cum_time_ms),
            })
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect()
    }
}

/// Paths written by [`emit_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportFiles {
    pub csv: PathBuf,
    pub svg: PathBuf,
}

/// Writes `<stem>_<kind>.csv` and `<stem>_<kind>.svg` into `dir`.
pub fn emit_report(
    traces: &[ConvergenceTrace],
    kind: ReportKind,
    dir: impl AsRef<Path>,
    stem: &str,
) -> Result<ReportFiles> {
    if traces.is_empty() {
        return Err(Error::config("traces", "nothing to report"));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv = dir.join(format!("{stem}_{}.csv", kind.as_str()));
    let svg = dir.join(format!("{stem}_{}.svg", kind.as_str()));
    write_csv_file(traces, &csv)?;
    std::fs::write(&svg, render_svg(traces, kind)).map_err(|e| Error::io(&svg, e))?;
    Ok(ReportFiles { csv, svg })
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub fn render_svg(traces: &[ConvergenceTrace], kind: ReportKind) -> String {
    let (x_label, y_label) = kind.axis_labels();
    let series: Vec<Vec<(f64, f64)>> = traces.iter().map(|t| kind.series(t)).collect();
    let points = series.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) =
        (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y1) = (0.0, 1.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" data-kind="{}" data-x-label="{x_label}" data-y-label="{y_label}">"#,
        kind.as_str()
    );
    let _ = writeln!(s, "<title>{} report</title>", kind.as_str());
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{LEFT}" y1="{}" x2="{}" y2="{}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}"/></g>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h,
        TOP + plot_h
    );
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="11">"#);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(xv),
            TOP + plot_h + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text class="x-label" x="{:.1}" y="{:.1}" text-anchor="middle">{x_label}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text class="y-label" x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{y_label}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let _ = writeln!(s, "</g>");

    for (i, (t, pts)) in traces.iter().zip(&series).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let ly = TOP + 10.0 + 16.0 * i as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            s,
            r#"<g class="legend"><line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text></g>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(&t.label())
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v == 0.0 || (1e-2..1e5).contains(&v.abs()) {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::trace::TraceRow;

    fn trace(method: &str) -> ConvergenceTrace {
        let mut t = ConvergenceTrace::new(method, 1);
        for i in 0..5 {
            t.rows.push(TraceRow {
                iteration: i,
                evals: 10 + i,
                best_value: 5.0 - i as f64,
                iter_time_ms: 1.0,
                cum_time_ms: i as f64,
                gp_fit_ms: 0.0,
                gp_fits: 0,
                suggested: vec![],
            });
        }
        t
    }

    #[test]
    fn timing_plot_labels_cumulative_time() {
        let svg = render_svg(&[trace("score")], ReportKind::Timing);
        assert!(svg.contains(r#"data-y-label="cum_time_ms""#));
        assert!(svg.contains(">cum_time_ms</text>"));
    }

    #[test]
    fn one_polyline_and_legend_entry_per_trace() {
        let svg = render_svg(&[trace("score"), trace("bo")], ReportKind::Convergence);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches(r#"class="legend""#).count(), 2);
        assert!(svg.contains("bo (seed 1)"));
        assert!(svg.contains(r#"data-y-label="best_value""#));
    }

    #[test]
    fn degenerate_series_still_render() {
        let mut t = trace("score");
        t.rows.truncate(1);
        t.rows[0].best_value = f64::INFINITY;
        let svg = render_svg(&[t], ReportKind::Convergence);
        assert!(svg.ends_with("</svg>\n"));
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn tick_formatting() {
        assert_eq!(tick(0.0), "0");
        assert_eq!(tick(2.5), "2.5");
        assert_eq!(tick(300.0), "300");
        assert_eq!(tick(1e-4), "1.0e-4");
    }
}
