use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use crate::args::{Metric, PlotArgs};
use crate::{CliError, CliResult};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Mean of the metric per `(algorithm, n)`, algorithms in order of first
/// appearance.
#[derive(Debug, Default, PartialEq)]
pub struct Series {
    pub names: Vec<String>,
    pub points: Vec<Vec<(f64, f64)>>,
}

pub fn read_series(path: &Path, column: &str) -> CliResult<Series> {
    let bad = |msg: String| CliError::usage(format!("{}: {msg}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column {name:?}")))
    };
    let (alg_col, n_col, val_col) = (col("algorithm")?, col("n")?, col(column)?);
    let mut names: Vec<String> = Vec::new();
    let mut sums: Vec<BTreeMap<usize, (f64, usize)>> = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        rows += 1;
        let field = |i: usize| record.get(i).unwrap_or("");
        let n: usize = field(n_col)
            .parse()
            .map_err(|_| bad(format!("row {rows}: invalid n {:?}", field(n_col))))?;
        let Ok(v) = field(val_col).parse::<f64>() else {
            continue;
        };
        if !v.is_finite() {
            continue;
        }
        let alg = field(alg_col).to_string();
        let k = match names.iter().position(|a| *a == alg) {
            Some(k) => k,
            None => {
                names.push(alg);
                sums.push(BTreeMap::new());
                names.len() - 1
            }
        };
        let e = sums[k].entry(n).or_insert((0.0, 0));
        e.0 += v;
        e.1 += 1;
    }
    if rows == 0 {
        return Err(bad("no data rows".into()));
    }
    let points = sums
        .into_iter()
        .map(|m| m.into_iter().map(|(n, (s, c))| (n as f64, s / c as f64)).collect())
        .collect();
    Ok(Series { names, points })
}

/// Powers of ten from the decade at or below `min` to the decade at or
/// above `max`.
pub fn log_ticks(min: f64, max: f64) -> Vec<f64> {
    assert!(min > 0.0 && max >= min, "log ticks need 0 < min ≤ max");
    let lo = min.log10().floor() as i32;
    let mut hi = max.log10().ceil() as i32;
    if hi == lo {
        hi += 1;
    }
    (lo..=hi).map(|e| 10f64.powi(e)).collect()
}

/// Evenly spaced ticks on a 1–2–5 step covering `[min, max]`.
pub fn linear_ticks(min: f64, max: f64) -> Vec<f64> {
    let (min, max) = if max > min { (min, max) } else { (min - 1.0, max + 1.0) };
    let raw = (max - min) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|f| f * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let start = (min / step).floor() as i64;
    let end = (max / step).ceil() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn fmt_tick(v: f64, log: bool) -> String {
    if log {
        format!("1e{}", v.log10().round() as i32)
    } else if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Renders the series as a standalone SVG 1.1 document with one polyline
/// per algorithm.
pub fn render(series: &Series, metric: Metric, log_y: bool) -> CliResult<String> {
    let mut lines: Vec<(&str, Vec<(f64, f64)>)> = series
        .names
        .iter()
        .zip(&series.points)
        .map(|(name, pts)| {
            let kept: Vec<(f64, f64)> = pts.iter().copied().filter(|&(_, y)| !log_y || y > 0.0).collect();
            (name.as_str(), kept)
        })
        .collect();
    lines.retain(|(_, pts)| !pts.is_empty());
    if lines.is_empty() {
        return Err(CliError::usage("no plottable values"));
    }
    let all = lines.iter().flat_map(|(_, p)| p.iter());
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let xticks = linear_ticks(xmin, xmax);
    let yticks = if log_y { log_ticks(ymin, ymax) } else { linear_ticks(ymin, ymax) };
    let (x0, x1) = (xticks[0], *xticks.last().unwrap_or(&xmax));
    let (y0, y1) = (yticks[0], *yticks.last().unwrap_or(&ymax));
    let ty = |v: f64| if log_y { v.log10() } else { v };
    let (plot_w, plot_h) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| TOP + plot_h - (ty(y) - ty(y0)) / (ty(y1) - ty(y0)) * plot_h;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (bx, by) = (TOP + plot_h, LEFT + plot_w);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{bx}" x2="{by}" y2="{bx}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{bx}" stroke="black"/>"#);
    for &t in &xticks {
        let x = px(t);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{bx}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, bx + 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bx + 20.0,
            fmt_tick(t, false)
        );
    }
    for &t in &yticks {
        let y = py(t);
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{by}" y2="{y:.2}" stroke="#dddddd"/>"##);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            fmt_tick(t, log_y)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">n</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let ylabel = if log_y { format!("{} (log scale)", metric.column()) } else { metric.column().to_string() };
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&ylabel)
    );
    for (k, (name, pts)) in lines.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        for &(x, y) in pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(x), py(y));
        }
        let ly = TOP + 20.0 + 20.0 * k as f64;
        let lx = by + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 25.0
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 32.0, ly + 4.0, escape(name));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn run(args: PlotArgs) -> CliResult {
    let series = read_series(&args.input, args.metric.column())?;
    let log_y = args.log_y || args.metric == Metric::Res;
    let svg = render(&series, args.metric, log_y)?;
    let out = args.out.clone().unwrap_or_else(|| args.input.with_extension("svg"));
    std::fs::write(&out, svg).map_err(|e| CliError::failure(format!("{}: {e}", out.display())))?;
    outln!("wrote {}", out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_ticks_span_the_data() {
        assert_eq!(log_ticks(3e-16, 2.5), (-16..=1).map(|e| 10f64.powi(e)).collect::<Vec<_>>());
        assert_eq!(log_ticks(1e-3, 1e-3), vec![1e-3, 1e-2]);
        let t = log_ticks(0.07, 40.0);
        assert!(t[0] <= 0.07 && *t.last().unwrap() >= 40.0);
        assert_eq!(t, vec![1e-2, 1e-1, 1.0, 10.0, 100.0]);
    }

    #[test]
    fn linear_ticks_cover_range_with_round_steps() {
        let t = linear_ticks(1000.0, 8000.0);
        assert!(t[0] <= 1000.0 && *t.last().unwrap() >= 8000.0);
        let step = t[1] - t[0];
        assert!([1000.0, 2000.0].contains(&step), "{step}");
        assert!(linear_ticks(5.0, 5.0).len() >= 2);
    }

    #[test]
    fn render_draws_one_polyline_per_series() {
        let series = Series {
            names: vec!["A".into(), "B&C".into()],
            points: vec![vec![(1000.0, 1e-15), (2000.0, 2e-15)], vec![(1000.0, 0.1), (2000.0, 0.0)]],
        };
        let svg = render(&series, Metric::Res, true).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("B&amp;C"));
        assert!(svg.contains(">1e-15<") && svg.contains(">1e-1<"));
    }
}
