//! Static SVG chart per region: daily bars, the forecast curve, one line
//! per intervention, the death-threshold line and the drift marker.

use std::fmt::Write;

use driftlag_core::data::DailySeries;
use driftlag_core::pipeline::SeriesRun;
use driftlag_core::Day;

use crate::detect::RegionReport;

const W: f64 = 960.0;
const H: f64 = 480.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 56.0;
const BOTTOM: f64 = 64.0;
// Days shown before the first intervention.
const LEAD_DAYS: i32 = 35;

const BAR: &str = "#9dbbe0";
const FORECAST: &str = "#1f4e9c";
const NPI: &str = "#2e8b57";
const THRESHOLD: &str = "#d62728";
const DRIFT: &str = "#ff7f0e";

pub fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn nice_step(max: f64) -> f64 {
    let raw = max / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let f = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    (f * mag).max(1.0)
}

struct Frame {
    lo: Day,
    days: f64,
    ymax: f64,
}

impl Frame {
    fn x(&self, d: Day) -> f64 {
        LEFT + (d - self.lo) as f64 / self.days * (W - LEFT - RIGHT)
    }

    fn x_mid(&self, d: Day) -> f64 {
        self.x(d) + self.bar_w() / 2.0
    }

    fn bar_w(&self) -> f64 {
        (W - LEFT - RIGHT) / self.days
    }

    fn y(&self, v: f64) -> f64 {
        H - BOTTOM - v / self.ymax * (H - TOP - BOTTOM)
    }
}

/// Renders the chart. Output depends only on the arguments, so identical
/// inputs give byte-identical documents.
pub fn render_chart(
    report: &RegionReport,
    daily: &DailySeries,
    run: Option<&SeriesRun>,
    seed: u64,
    config_json: &str,
) -> String {
    let mut marks: Vec<Day> = report.events.iter().map(|e| e.date).collect();
    marks.extend(report.threshold_date);
    marks.extend(report.drift_date);
    let lo = report.first_npi.map_or(daily.start, |d| (d - LEAD_DAYS).max(daily.start));
    let hi = marks.iter().copied().chain([daily.end()]).max().unwrap_or(daily.end());
    let days = (hi - lo + 1).max(1) as f64;

    let in_range = |d: Day| d >= lo && d <= hi;
    let actual_max = (0..daily.len())
        .filter(|&i| in_range(daily.date_of(i)))
        .map(|i| daily.values[i] as f64)
        .fold(0.0, f64::max);
    let mut curve: Vec<(Day, f64)> = Vec::new();
    if let Some(sr) = run {
        for (i, v) in sr.in_sample.values.iter().enumerate() {
            curve.push((sr.in_sample.date_of(i), *v));
        }
        for (i, v) in sr.forecast.values.iter().enumerate() {
            curve.push((sr.forecast.date_of(i), *v));
        }
        curve.retain(|(d, _)| in_range(*d));
    }
    // Runaway forecasts are clipped rather than flattening the bars.
    let cap = if actual_max > 0.0 { actual_max * 2.0 } else { f64::INFINITY };
    let curve_max = curve.iter().map(|(_, v)| v.min(cap)).fold(0.0, f64::max);
    let step = nice_step(actual_max.max(curve_max).max(1.0));
    let ymax = (actual_max.max(curve_max) / step).ceil().max(1.0) * step;
    let f = Frame { lo, days, ymax };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, "<metadata>seed={seed} config={}</metadata>", esc(config_json));
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="24" font-size="16" font-weight="bold">{}</text>"#,
        esc(&report.region.to_string())
    );
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}"/></clipPath></defs>"#,
        W - LEFT - RIGHT,
        H - TOP - BOTTOM
    );

    // Axes and ticks.
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        H - BOTTOM,
        W - RIGHT,
        H - BOTTOM
    );
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}" stroke="black"/>"#, H - BOTTOM);
    let mut v = 0.0;
    while v <= ymax + 1e-9 {
        let y = f.y(v);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e6e6e6"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            W - RIGHT,
            LEFT - 6.0,
            y + 4.0,
            v as u64
        );
        v += step;
    }
    let mut d = lo;
    while d <= hi {
        if matches!(d.day_of_month(), 1 | 15) {
            let x = f.x_mid(d);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{d}</text>"#,
                H - BOTTOM,
                H - BOTTOM + 4.0,
                H - BOTTOM + 18.0
            );
        }
        d = d + 1;
    }
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" transform="rotate(-90 16 {:.2})" text-anchor="middle">daily cases</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        (TOP + H - BOTTOM) / 2.0
    );

    // Bars.
    let _ = writeln!(s, r#"<g fill="{BAR}">"#);
    for i in 0..daily.len() {
        let d = daily.date_of(i);
        let val = daily.values[i] as f64;
        if !in_range(d) || val <= 0.0 {
            continue;
        }
        let y = f.y(val);
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{y:.2}" width="{:.2}" height="{:.2}"/>"#,
            f.x(d) + 0.5,
            (f.bar_w() - 1.0).max(0.5),
            H - BOTTOM - y
        );
    }
    let _ = writeln!(s, "</g>");

    if curve.is_empty() {
        let reason = report.exclusion.as_deref().unwrap_or("no forecast available");
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14" fill="{THRESHOLD}">warning: no forecast ({})</text>"#,
            W / 2.0,
            TOP + 24.0,
            esc(reason)
        );
    } else {
        let pts: Vec<String> =
            curve.iter().map(|(d, v)| format!("{:.2},{:.2}", f.x_mid(*d), f.y(v.min(cap * 1.5)))).collect();
        let _ = writeln!(
            s,
            r#"<polyline clip-path="url(#plot)" fill="none" stroke="{FORECAST}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        if let Some(end) = report.window_end {
            let x = f.x(end + 1);
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#888888" stroke-dasharray="2,3"/>"##,
                H - BOTTOM
            );
        }
    }

    // Vertical markers; labels on the same day are stacked.
    let mut used: Vec<(Day, usize)> = Vec::new();
    let mut vline = |s: &mut String, d: Day, color: &str, dash: &str, label: &str| {
        let slot = used.iter().filter(|(u, _)| *u == d).count();
        used.push((d, slot));
        let x = f.x_mid(d);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            H - BOTTOM
        );
        let tx = x - 3.0 - 11.0 * slot as f64;
        let _ = writeln!(
            s,
            r#"<text x="{tx:.2}" y="{:.2}" transform="rotate(-90 {tx:.2} {:.2})" text-anchor="end" fill="{color}">{}</text>"#,
            TOP + 6.0,
            TOP + 6.0,
            esc(label)
        );
    };
    for e in &report.events {
        vline(&mut s, e.date, NPI, "", e.kind.label());
    }
    if let Some(t) = report.threshold_date {
        vline(&mut s, t, THRESHOLD, "", "1 death per 1M");
    }
    if let Some(dd) = report.drift_date {
        vline(&mut s, dd, DRIFT, r#" stroke-dasharray="6,3""#, &format!("drift {dd}"));
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="5" fill="{DRIFT}"/>"#,
            f.x_mid(dd),
            H - BOTTOM
        );
    }

    // Legend.
    let ly = H - 18.0;
    let items = [(BAR, "daily cases"), (FORECAST, "forecast"), (NPI, "intervention"), (THRESHOLD, "death threshold"), (DRIFT, "drift")];
    for (i, (color, label)) in items.iter().enumerate() {
        let x = LEFT + 150.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.2}" y="{:.2}" width="14" height="8" fill="{color}"/><text x="{:.2}" y="{ly:.2}">{label}</text>"#,
            ly - 8.0,
            x + 18.0
        );
    }
    s.push_str("</svg>\n");
    s
}
