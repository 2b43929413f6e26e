//! Static SVG line charts of aggregate tables.
//!
//! Output is a pure function of the rows: coordinates are printed with two
//! decimals and series appear in order of first occurrence.

use std::fmt::Write;

use crate::harness::AggregateRow;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 590.0;
const TOP: f64 = 60.0;
const BOTTOM: f64 = 520.0;

/// Timings are drawn on a log axis; zero (e.g. with timing disabled) is lifted to this floor.
pub const TIME_FLOOR: f64 = 1e-6;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// `(K, value)` sorted by K.
    pub points: Vec<(f64, f64)>,
}

fn snr_label(snr: f64) -> String {
    if snr == f64::INFINITY {
        "noiseless".into()
    } else {
        format!("{snr} dB")
    }
}

/// Groups rows into one series per method, split further by `n` and SNR when
/// the table holds several of them.
pub fn series(rows: &[AggregateRow], value: impl Fn(&AggregateRow) -> f64) -> Vec<Series> {
    let distinct = |f: &dyn Fn(&AggregateRow) -> String| {
        let mut seen: Vec<String> = rows.iter().map(f).collect();
        seen.sort();
        seen.dedup();
        seen.len() > 1
    };
    let split_n = distinct(&|r| r.n.to_string());
    let split_snr = distinct(&|r| format!("{}", r.snr_db));

    let mut out: Vec<Series> = Vec::new();
    for r in rows {
        let mut label = r.method.clone();
        if split_n {
            label.push_str(&format!(" n={}", r.n));
        }
        if split_snr {
            label.push_str(&format!(" {}", snr_label(r.snr_db)));
        }
        let point = (r.k as f64, value(r));
        match out.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push(point),
            None => out.push(Series {
                label,
                points: vec![point],
            }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn map(&self, v: f64, from: f64, to: f64) -> f64 {
        let v = if self.log { v.max(TIME_FLOOR).log10() } else { v };
        from + (v - self.lo) / (self.hi - self.lo) * (to - from)
    }
}

fn chart(title: &str, y_label: &str, series: &[Series], y: Axis, y_ticks: &[(f64, String)]) -> String {
    let ks = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let (mut k_lo, mut k_hi) = ks.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), k| (lo.min(k), hi.max(k)));
    if !k_lo.is_finite() {
        (k_lo, k_hi) = (0.0, 1.0);
    }
    if k_lo == k_hi {
        k_lo -= 1.0;
        k_hi += 1.0;
    }
    let x = Axis {
        lo: k_lo,
        hi: k_hi,
        log: false,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="14">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="30" text-anchor="middle" font-size="18">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        escape(title)
    );

    for (value, label) in y_ticks {
        let py = y.map(*value, BOTTOM, TOP);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.2}" y1="{py:.2}" x2="{RIGHT:.2}" y2="{py:.2}" stroke="#dddddd"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            LEFT - 8.0,
            py + 5.0
        );
    }
    let first_k = k_lo.ceil() as i64;
    let last_k = k_hi.floor() as i64;
    let stride = ((last_k - first_k) / 10).max(1);
    for k in (first_k..=last_k).step_by(stride as usize) {
        let px = x.map(k as f64, LEFT, RIGHT);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{BOTTOM:.2}" x2="{px:.2}" y2="{:.2}" stroke="#000000"/>"##,
            BOTTOM + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{k}</text>"#,
            BOTTOM + 22.0
        );
    }
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#000000"/>"##,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">sparsity K</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 50.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="25" y="{0:.2}" text-anchor="middle" transform="rotate(-90 25 {0:.2})">{1}</text>"#,
        (TOP + BOTTOM) / 2.0,
        escape(y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<(f64, f64)> = s
            .points
            .iter()
            .map(|&(k, v)| (x.map(k, LEFT, RIGHT), y.map(v, BOTTOM, TOP)))
            .collect();
        let path: Vec<String> = coords.iter().map(|(px, py)| format!("{px:.2},{py:.2}")).collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            path.join(" ")
        );
        for (px, py) in &coords {
            let _ = writeln!(svg, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3.5" fill="{color}"/>"#);
        }
        let ly = TOP + 10.0 + 24.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            RIGHT + 20.0,
            RIGHT + 50.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            RIGHT + 58.0,
            ly + 5.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Recovery probability against K on a `[0, 1]` ordinate.
pub fn recovery_chart(rows: &[AggregateRow]) -> String {
    let ticks: Vec<(f64, String)> = (0..=5)
        .map(|i| (i as f64 / 5.0, format!("{:.1}", i as f64 / 5.0)))
        .collect();
    let axis = Axis {
        lo: 0.0,
        hi: 1.0,
        log: false,
    };
    chart(
        "Recovery probability",
        "recovery probability",
        &series(rows, |r| r.recovery_probability),
        axis,
        &ticks,
    )
}

/// Median CPU seconds per trial against K on a decade-aligned log ordinate.
pub fn timing_chart(rows: &[AggregateRow]) -> String {
    let all = series(rows, |r| r.median_cpu_seconds);
    let logs = all
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1.max(TIME_FLOOR).log10()));
    let (lo, hi) = logs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (mut lo, mut hi) = if lo.is_finite() {
        (lo.floor(), hi.ceil())
    } else {
        (-6.0, 0.0)
    };
    if lo == hi {
        lo -= 1.0;
        hi += 1.0;
    }
    let ticks: Vec<(f64, String)> = (lo as i32..=hi as i32)
        .map(|e| (10f64.powi(e), format!("1e{e}")))
        .collect();
    let axis = Axis { lo, hi, log: true };
    chart("Median CPU time per trial", "seconds (log scale)", &all, axis, &ticks)
}
