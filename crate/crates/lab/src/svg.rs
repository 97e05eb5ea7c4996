//! Minimal SVG line plots for report tables.

use std::fmt::Write;

use crate::report::{ExperimentReport, Table};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const COLOURS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line plot of `series` in data coordinates; non-finite points are dropped.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let finite = |p: &&(f64, f64)| p.0.is_finite() && p.1.is_finite();
    let pts: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().filter(finite).copied()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 <= 0.0 {
        (x0, x1) = (x0 - 0.5, x1 + 0.5);
    }
    if y1 - y0 <= 0.0 {
        (y0, y1) = (y0 - 0.5, y1 + 0.5);
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(out, r#"<path d="M{left} {top} V{bottom} H{right}" fill="none" stroke="black"/>"#);
    for (v, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="{anchor}">{}</text>"#, sx(v), bottom + 16.0, short(v));
    }
    for v in [y0, y1] {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, left - 4.0, sy(v) + 4.0, short(v));
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 12.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="14" y="{0}" text-anchor="middle" transform="rotate(-90 14 {0})">{1}</text>"#,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let path: Vec<String> = s.points.iter().filter(finite).map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        if !path.is_empty() {
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#, path.join(" "));
        }
        let ly = top + 14.0 * i as f64;
        let _ = writeln!(out, r#"<text x="{:.1}" y="{ly:.1}" fill="{colour}">{}</text>"#, right - 120.0, escape(&s.label));
    }
    out.push_str("</svg>\n");
    out
}

fn short(v: f64) -> String {
    format!("{v:.3}")
}

/// Series of `y` against `log2 x` from `table`, one per distinct value of the key columns.
pub fn table_series(table: &Table, x: &str, y: &str, keys: &[&str]) -> Option<Vec<Series>> {
    let xc = table.column(x)?;
    let yc = table.column(y)?;
    let kc: Vec<usize> = keys.iter().filter_map(|k| table.column(k)).collect();
    let mut out: Vec<Series> = Vec::new();
    for row in &table.rows {
        let label = kc.iter().map(|&c| format!("{}={}", table.columns[c], row[c])).collect::<Vec<_>>().join(" ");
        let px = row[xc].parse::<f64>().ok()?.log2();
        let py = row[yc].parse::<f64>().ok()?;
        match out.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push((px, py)),
            None => out.push(Series { label, points: vec![(px, py)] }),
        }
    }
    Some(out)
}

/// Plot of the main table of a report, or `None` when it has no size axis.
pub fn report_svg(report: &ExperimentReport) -> Option<String> {
    const CANDIDATES: [(&str, &str, &[&str]); 4] = [
        ("sweep", "max_ratio", &["a", "r"]),
        ("norm_ratio", "max_ratio", &["weight", "r"]),
        ("lepingle", "max_ratio", &["weight", "r", "p"]),
        ("tree_estimates", "core", &["weight"]),
    ];
    CANDIDATES.iter().find_map(|&(name, y, keys)| {
        let table = report.table(name)?;
        let series = table_series(table, "n", y, keys)?;
        Some(line_plot(&format!("{} ({})", report.provenance.command, name), "log2 N", y, &series))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_is_well_formed() {
        let s = vec![
            Series { label: "a<b".into(), points: vec![(0.0, 1.0), (1.0, 2.0), (2.0, f64::NAN)] },
            Series { label: "flat".into(), points: vec![(0.0, 1.0)] },
        ];
        let svg = line_plot("t", "x", "y", &s);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a&lt;b") && !svg.contains("NaN"));
        assert!(line_plot("empty", "x", "y", &[]).contains("</svg>"));
    }

    #[test]
    fn series_grouped_by_keys() {
        let mut t = Table::new("sweep", &["a", "r", "n", "max_ratio"]);
        for (a, n, v) in [("0", "32", "1.0"), ("0", "64", "1.2"), ("0.5", "32", "1.1")] {
            t.push(vec![a.into(), "2".into(), n.into(), v.into()]);
        }
        let s = table_series(&t, "n", "max_ratio", &["a"]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].points, vec![(5.0, 1.0), (6.0, 1.2)]);
    }
}
