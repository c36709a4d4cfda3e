//! Minimal SVG rendering: ROC tables on a log-scaled `p_fa` axis and
//! histograms with their theoretical density.

use std::fmt::Write as _;

use crate::experiment::{HistTable, RocTable};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// Renders every column of `table` as a polyline. Theory columns are dashed.
pub fn render_roc(table: &RocTable, title: &str) -> String {
    let p_fa = table.grid.values();
    let lo = p_fa.first().copied().unwrap_or(1e-3).log10().floor();
    let hi = 0.0;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x = |p: f64| MARGIN + (p.log10() - lo) / (hi - lo) * plot_w;
    let y = |p: f64| HEIGHT - MARGIN - p * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let mut decade = lo;
    while decade <= hi {
        let px = x(10f64.powf(decade));
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{MARGIN}" x2="{px:.2}" y2="{:.2}" stroke="#ddd"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">1e{decade}</text>"##,
            HEIGHT - MARGIN,
            HEIGHT - MARGIN + 18.0
        );
        decade += 1.0;
    }
    for i in 0..=5 {
        let v = i as f64 / 5.0;
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.1}</text>"##,
            y(v),
            WIDTH - MARGIN,
            y(v),
            MARGIN - 6.0,
            y(v) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">p_FA</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">p_D</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    for (i, (name, curve)) in table.columns.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let dash = if curve.source == crate::RocSource::Empirical {
            ""
        } else {
            r#" stroke-dasharray="6 4""#
        };
        let points: Vec<String> = curve
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", x(p.p_fa), y(p.p_d)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            points.join(" ")
        );
        let ly = MARGIN + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.5"{dash}/><text x="{:.2}" y="{:.2}">{} [{}]</text>"#,
            MARGIN + 10.0,
            MARGIN + 34.0,
            MARGIN + 40.0,
            ly + 4.0,
            escape(name),
            curve.source
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Renders the histogram as bars and the theoretical density as a line.
pub fn render_histogram(table: &HistTable, title: &str) -> String {
    let hist = &table.histogram;
    let (lo, hi) = (hist.bin_edges[0], hist.bin_edges[hist.bins()]);
    let top = hist
        .density
        .iter()
        .chain(&table.pdf_theory)
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE)
        * 1.05;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x = |v: f64| MARGIN + (v - lo) / (hi - lo) * plot_w;
    let y = |v: f64| HEIGHT - MARGIN - (v / top).min(1.0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x(v),
            HEIGHT - MARGIN + 18.0,
            crate::csvio::fmt_sig(v)
        );
    }
    for (i, d) in hist.density.iter().enumerate() {
        let (x0, x1) = (x(hist.bin_edges[i]), x(hist.bin_edges[i + 1]));
        let _ = writeln!(
            s,
            r##"<rect x="{x0:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#3182bd" stroke-width="0.5"/>"##,
            y(*d),
            x1 - x0,
            HEIGHT - MARGIN - y(*d)
        );
    }
    let points: Vec<String> = table
        .pdf_theory
        .iter()
        .enumerate()
        .map(|(i, d)| {
            format!(
                "{:.2},{:.2}",
                x(0.5 * (hist.bin_edges[i] + hist.bin_edges[i + 1])),
                y(*d)
            )
        })
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#d62728" stroke-width="1.5"/>"##,
        points.join(" ")
    );
    let _ = writeln!(
        s,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="end" fill="#d62728">{}</text>"##,
        WIDTH - MARGIN - 8.0,
        MARGIN + 18.0,
        escape(&table.theory_label)
    );
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
