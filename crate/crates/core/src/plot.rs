//! Static SVG charts of sweep and CDF CSVs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;

use crate::error::{Error, Result};
use crate::experiment::{Method, SweepRow};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 170.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];

/// A curve: name and (x, y) points in drawing order.
pub type Series = (String, Vec<(f64, f64)>);

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let (mut x0, mut x1) = bounds(xs);
        let (mut y0, mut y1) = bounds(ys);
        if x1 <= x0 {
            x0 -= 1.0;
            x1 += 1.0;
        }
        if y1 <= y0 {
            y0 -= 1.0;
            y1 += 1.0;
        }
        let pad = 0.05 * (y1 - y0);
        Self {
            x0,
            x1,
            y0: y0 - pad,
            y1: y1 + pad,
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
}

fn open(svg: &mut String, title: &str, x_label: &str, y_label: &str, f: &Frame) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        escape(title)
    );
    let (left, right) = (MARGIN_L, WIDTH - MARGIN_R);
    let (top, bottom) = (MARGIN_T, HEIGHT - MARGIN_B);
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    for j in 0..=5 {
        let t = j as f64 / 5.0;
        let xv = f.x0 + t * (f.x1 - f.x0);
        let yv = f.y0 + t * (f.y1 - f.y0);
        let (x, y) = (f.px(xv), f.py(yv));
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{bottom}" x2="{x:.1}" y2="{}" stroke="black"/><text x="{x:.1}" y="{}" text-anchor="middle">{}</text>"#,
            bottom + 5.0,
            bottom + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{y:.1}" x2="{right}" y2="{y:.1}" stroke="#dddddd"/><text x="{}" y="{:.1}" text-anchor="end">{}</text>"##,
            left - 6.0,
            y + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        HEIGHT - 18.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(20,{}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (top + bottom) / 2.0,
        escape(y_label)
    );
}

fn legend(svg: &mut String, names: &[String]) {
    for (j, name) in names.iter().enumerate() {
        let y = MARGIN_T + 10.0 + 20.0 * j as f64;
        let x = WIDTH - MARGIN_R + 15.0;
        let c = COLORS[j % COLORS.len()];
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{c}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            x + 20.0,
            x + 26.0,
            y + 4.0,
            escape(name)
        );
    }
}

fn polyline(svg: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str) {
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
        coords.join(" ")
    );
}

fn tick(v: f64) -> String {
    if v.abs() >= 100.0 || v.fract().abs() < 1e-9 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Mean sum-rate (Mbit/s) against the sweep axis, one line per method with
/// 95% confidence bars.
pub fn sum_rate_svg(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Schema("nothing to plot".into()));
    }
    let axis = rows[0].axis.clone();
    if rows.iter().any(|r| r.axis != axis) {
        return Err(Error::Schema("rows mix several sweep axes".into()));
    }
    let mut by_method: BTreeMap<Method, Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        by_method.entry(r.method).or_default().push(r);
    }
    let mbps = |v: f64| v / 1e6;
    let frame = Frame::new(
        rows.iter().map(|r| r.value),
        rows.iter()
            .flat_map(|r| [mbps(r.mean_bps - r.ci95_bps), mbps(r.mean_bps + r.ci95_bps)]),
    );
    let mut svg = String::new();
    open(
        &mut svg,
        "Sum-rate",
        &axis,
        "mean sum-rate (Mbit/s)",
        &frame,
    );
    let mut names = Vec::new();
    for (j, (method, mut pts)) in by_method.into_iter().enumerate() {
        pts.sort_by(|a, b| a.value.total_cmp(&b.value));
        let color = COLORS[j % COLORS.len()];
        let line: Vec<(f64, f64)> = pts.iter().map(|r| (r.value, mbps(r.mean_bps))).collect();
        polyline(&mut svg, &frame, &line, color);
        for r in &pts {
            let x = frame.px(r.value);
            let lo = frame.py(mbps(r.mean_bps - r.ci95_bps));
            let hi = frame.py(mbps(r.mean_bps + r.ci95_bps));
            let _ = writeln!(
                svg,
                r#"<line class="ci" x1="{x:.2}" y1="{lo:.2}" x2="{x:.2}" y2="{hi:.2}" stroke="{color}"/><circle cx="{x:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                frame.py(mbps(r.mean_bps))
            );
        }
        names.push(method.name().to_string());
    }
    legend(&mut svg, &names);
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Empirical CDF curves as steps; x in dB, y in [0, 1].
pub fn cdf_svg(series: &[Series]) -> Result<String> {
    if series.iter().all(|(_, p)| p.is_empty()) {
        return Err(Error::Schema("nothing to plot".into()));
    }
    let frame = Frame::new(
        series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0)),
        [0.0, 1.0].into_iter(),
    );
    let mut svg = String::new();
    open(
        &mut svg,
        "SINR CDF",
        "SINR (dB)",
        "cumulative fraction",
        &frame,
    );
    for (j, (_, pts)) in series.iter().enumerate() {
        let mut sorted = pts.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut steps = Vec::with_capacity(2 * sorted.len());
        let mut prev = 0.0;
        for &(x, y) in &sorted {
            steps.push((x, prev));
            steps.push((x, y));
            prev = y;
        }
        polyline(&mut svg, &frame, &steps, COLORS[j % COLORS.len()]);
    }
    let names: Vec<String> = series.iter().map(|s| s.0.clone()).collect();
    legend(&mut svg, &names);
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Reads a `method,sinr_db,cdf` file into one series per method, in order
/// of first appearance.
pub fn read_cdf_csv<R: Read>(input: R) -> Result<Vec<Series>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != "method,sinr_db,cdf" {
        return Err(Error::Schema(format!(
            "expected CDF header `method,sinr_db,cdf`, found `{header}`"
        )));
    }
    let mut out: Vec<Series> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |k: usize| {
            rec[k]
                .parse::<f64>()
                .map_err(|_| Error::Schema(format!("bad number `{}` in CDF CSV", &rec[k])))
        };
        let (x, y) = (num(1)?, num(2)?);
        match out.iter_mut().find(|s| s.0 == rec[0]) {
            Some(s) => s.1.push((x, y)),
            None => out.push((rec[0].to_string(), vec![(x, y)])),
        }
    }
    if out.is_empty() {
        return Err(Error::Schema("CDF CSV has no rows".into()));
    }
    Ok(out)
}
