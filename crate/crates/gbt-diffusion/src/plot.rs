//! Self-contained SVG rendering for experiment results: probability
//! heatmaps and error-bar line charts. No external tooling — the output is
//! a plain SVG string assembled here, deterministic for identical inputs
//! (all numbers are formatted with fixed precision).

use std::fmt::Write as _;

use crate::experiment::ExperimentResult;

const FONT: &str = "font-family=\"Helvetica, Arial, sans-serif\"";

/// Series palette shared by all charts.
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn esc(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Three-stop color ramp (dark violet → teal → yellow) for values in
/// `[0, 1]`.
fn ramp(value: f64) -> String {
    let stops = [(68.0, 1.0, 84.0), (33.0, 145.0, 140.0), (253.0, 231.0, 37.0)];
    let v = value.clamp(0.0, 1.0);
    let (lo, hi, t) = if v < 0.5 { (stops[0], stops[1], v * 2.0) } else { (stops[1], stops[2], (v - 0.5) * 2.0) };
    let channel = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("rgb({},{},{})", channel(lo.0, hi.0), channel(lo.1, hi.1), channel(lo.2, hi.2))
}

fn sorted_unique(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = values.collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    out.dedup();
    out
}

fn series_names(rows: &[ExperimentResult]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for row in rows {
        if !names.contains(&row.series) {
            names.push(row.series.clone());
        }
    }
    names
}

/// Renders one heatmap panel per series: x-coordinate on the horizontal
/// axis, y-coordinate vertical, cells colored by `estimate ∈ [0, 1]` with
/// the value printed inside, plus a shared color bar.
///
/// # Panics
/// If `rows` is empty or a row lacks the named coordinates.
pub fn render_heatmap(
    rows: &[ExperimentResult],
    x_coord: &str,
    y_coord: &str,
    title: &str,
) -> String {
    assert!(!rows.is_empty(), "heatmap needs at least one row");
    let xs = sorted_unique(rows.iter().map(|r| {
        r.coord(x_coord).unwrap_or_else(|| panic!("row missing coordinate {x_coord}"))
    }));
    let ys = sorted_unique(rows.iter().map(|r| {
        r.coord(y_coord).unwrap_or_else(|| panic!("row missing coordinate {y_coord}"))
    }));
    let panels = series_names(rows);

    let cell = 42.0;
    let margin_left = 70.0;
    let margin_top = 70.0;
    let panel_w = xs.len() as f64 * cell;
    let panel_h = ys.len() as f64 * cell;
    let panel_gap = 60.0;
    let bar_w = 18.0;
    let width =
        margin_left + panels.len() as f64 * (panel_w + panel_gap) + bar_w + 60.0;
    let height = margin_top + panel_h + 70.0;

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = write!(
        svg,
        "<rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\
         <text x=\"{:.1}\" y=\"30\" {FONT} font-size=\"18\" text-anchor=\"middle\">{}</text>",
        width / 2.0,
        esc(title)
    );

    for (p, series) in panels.iter().enumerate() {
        let ox = margin_left + p as f64 * (panel_w + panel_gap);
        let oy = margin_top;
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" {FONT} font-size=\"14\" text-anchor=\"middle\">{}</text>",
            ox + panel_w / 2.0,
            oy - 12.0,
            esc(series)
        );
        for row in rows.iter().filter(|r| &r.series == series) {
            let xv = row.coord(x_coord).expect("validated above");
            let yv = row.coord(y_coord).expect("validated above");
            let xi = xs.iter().position(|&v| v == xv).expect("from sorted set") as f64;
            // Largest y at the top, like the printed grids.
            let yi = (ys.len() - 1
                - ys.iter().position(|&v| v == yv).expect("from sorted set"))
                as f64;
            let color = ramp(row.estimate);
            let x0 = ox + xi * cell;
            let y0 = oy + yi * cell;
            let _ = write!(
                svg,
                "<rect x=\"{x0:.1}\" y=\"{y0:.1}\" width=\"{cell:.1}\" height=\"{cell:.1}\" \
                 fill=\"{color}\" stroke=\"white\" stroke-width=\"1\"/>"
            );
            let text_fill = if row.estimate > 0.6 { "#1a1a1a" } else { "#f0f0f0" };
            let _ = write!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" {FONT} font-size=\"11\" fill=\"{text_fill}\" \
                 text-anchor=\"middle\">{:.2}</text>",
                x0 + cell / 2.0,
                y0 + cell / 2.0 + 4.0,
                row.estimate
            );
        }
        // Axis tick labels.
        for (xi, xv) in xs.iter().enumerate() {
            let _ = write!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" {FONT} font-size=\"11\" text-anchor=\"middle\">{xv}</text>",
                ox + xi as f64 * cell + cell / 2.0,
                oy + panel_h + 16.0
            );
        }
        for (pos, yv) in ys.iter().enumerate() {
            let yi = (ys.len() - 1 - pos) as f64;
            let _ = write!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" {FONT} font-size=\"11\" text-anchor=\"end\">{yv}</text>",
                ox - 8.0,
                oy + yi * cell + cell / 2.0 + 4.0
            );
        }
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" {FONT} font-size=\"12\" text-anchor=\"middle\">{}</text>",
            ox + panel_w / 2.0,
            oy + panel_h + 38.0,
            esc(x_coord)
        );
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" {FONT} font-size=\"12\" text-anchor=\"middle\" \
             transform=\"rotate(-90 {:.1} {:.1})\">{}</text>",
            ox - 44.0,
            oy + panel_h / 2.0,
            ox - 44.0,
            oy + panel_h / 2.0,
            esc(y_coord)
        );
    }

    // Color bar.
    let bar_x = margin_left + panels.len() as f64 * (panel_w + panel_gap);
    let steps = 40;
    let step_h = panel_h / steps as f64;
    for i in 0..steps {
        let v = 1.0 - (i as f64 + 0.5) / steps as f64;
        let _ = write!(
            svg,
            "<rect x=\"{bar_x:.1}\" y=\"{:.1}\" width=\"{bar_w:.1}\" height=\"{:.2}\" fill=\"{}\"/>",
            margin_top + i as f64 * step_h,
            step_h + 0.5,
            ramp(v)
        );
    }
    for (v, label) in [(1.0, "1.0"), (0.5, "0.5"), (0.0, "0.0")] {
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" {FONT} font-size=\"11\">{label}</text>",
            bar_x + bar_w + 6.0,
            margin_top + (1.0 - v) * panel_h + 4.0
        );
    }

    svg.push_str("</svg>");
    svg
}

/// Renders an error-bar line chart: one polyline per series over the named
/// x-coordinate, whiskers at ±stderr, a legend, and a y-axis starting at 0.
///
/// # Panics
/// If `rows` is empty or a row lacks the named coordinate.
pub fn render_line_chart(
    rows: &[ExperimentResult],
    x_coord: &str,
    y_label: &str,
    title: &str,
) -> String {
    assert!(!rows.is_empty(), "line chart needs at least one row");
    let names = series_names(rows);
    let xs = sorted_unique(rows.iter().map(|r| {
        r.coord(x_coord).unwrap_or_else(|| panic!("row missing coordinate {x_coord}"))
    }));
    let x_min = *xs.first().expect("non-empty");
    let x_max = *xs.last().expect("non-empty");
    let y_max = rows
        .iter()
        .map(|r| r.estimate + r.stderr)
        .fold(0.0_f64, f64::max)
        .max(1e-12);

    let width = 640.0;
    let height = 440.0;
    let ml = 70.0;
    let mr = 30.0;
    let mt = 60.0;
    let mb = 60.0;
    let pw = width - ml - mr;
    let ph = height - mt - mb;
    let x_span = (x_max - x_min).max(1e-12);
    let px = |x: f64| ml + (x - x_min) / x_span * pw;
    let py = |y: f64| mt + (1.0 - y / (y_max * 1.05)) * ph;

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = write!(
        svg,
        "<rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\
         <text x=\"{:.1}\" y=\"28\" {FONT} font-size=\"17\" text-anchor=\"middle\">{}</text>",
        width / 2.0,
        esc(title)
    );

    // Horizontal gridlines and y ticks.
    for k in 0..=5 {
        let y_val = y_max * 1.05 * k as f64 / 5.0;
        let y = py(y_val);
        let _ = write!(
            svg,
            "<line x1=\"{ml:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>\
             <text x=\"{:.1}\" y=\"{:.1}\" {FONT} font-size=\"11\" text-anchor=\"end\">{:.2}</text>",
            ml + pw,
            ml - 8.0,
            y + 4.0,
            y_val
        );
    }
    // X ticks at data points (thinned if dense).
    let stride = xs.len().div_ceil(10).max(1);
    for (i, &x) in xs.iter().enumerate() {
        if i % stride != 0 && i != xs.len() - 1 {
            continue;
        }
        let _ = write!(
            svg,
            "<line x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{0:.1}\" y2=\"{2:.1}\" stroke=\"#888888\"/>\
             <text x=\"{0:.1}\" y=\"{3:.1}\" {FONT} font-size=\"11\" text-anchor=\"middle\">{x}</text>",
            px(x),
            mt + ph,
            mt + ph + 5.0,
            mt + ph + 20.0
        );
    }
    // Axes.
    let _ = write!(
        svg,
        "<line x1=\"{ml:.1}\" y1=\"{mt:.1}\" x2=\"{ml:.1}\" y2=\"{0:.1}\" stroke=\"#333333\"/>\
         <line x1=\"{ml:.1}\" y1=\"{0:.1}\" x2=\"{1:.1}\" y2=\"{0:.1}\" stroke=\"#333333\"/>",
        mt + ph,
        ml + pw
    );
    let _ = write!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" {FONT} font-size=\"13\" text-anchor=\"middle\">{}</text>",
        ml + pw / 2.0,
        height - 16.0,
        esc(x_coord)
    );
    let _ = write!(
        svg,
        "<text x=\"20\" y=\"{:.1}\" {FONT} font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 20 {:.1})\">{}</text>",
        mt + ph / 2.0,
        mt + ph / 2.0,
        esc(y_label)
    );

    for (s, series) in names.iter().enumerate() {
        let color = PALETTE[s % PALETTE.len()];
        let mut points: Vec<(f64, f64, f64)> = rows
            .iter()
            .filter(|r| &r.series == series)
            .map(|r| (r.coord(x_coord).expect("validated above"), r.estimate, r.stderr))
            .collect();
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite x"));
        let path: Vec<String> =
            points.iter().map(|(x, y, _)| format!("{:.2},{:.2}", px(*x), py(*y))).collect();
        let _ = write!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>",
            path.join(" ")
        );
        for (x, y, e) in &points {
            let cx = px(*x);
            let top = py(y + e);
            let bottom = py((y - e).max(0.0));
            let left = cx - 4.0;
            let right = cx + 4.0;
            let _ = write!(
                svg,
                "<line x1=\"{cx:.2}\" y1=\"{top:.2}\" x2=\"{cx:.2}\" y2=\"{bottom:.2}\" stroke=\"{color}\" stroke-width=\"1.5\"/>\
                 <line x1=\"{left:.2}\" y1=\"{top:.2}\" x2=\"{right:.2}\" y2=\"{top:.2}\" stroke=\"{color}\" stroke-width=\"1.5\"/>\
                 <line x1=\"{left:.2}\" y1=\"{bottom:.2}\" x2=\"{right:.2}\" y2=\"{bottom:.2}\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            );
            let _ = write!(
                svg,
                "<circle cx=\"{cx:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>",
                py(*y)
            );
        }
        // Legend entry.
        let ly = mt + 10.0 + s as f64 * 18.0;
        let _ = write!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\
             <text x=\"{:.1}\" y=\"{:.1}\" {FONT} font-size=\"12\">{}</text>",
            ml + pw - 150.0,
            ml + pw - 126.0,
            ml + pw - 120.0,
            ly + 4.0,
            esc(series)
        );
    }

    svg.push_str("</svg>");
    svg
}
