//! Self-contained SVG histogram rendering: fixed 800x500 canvas, axis
//! labels, bin rectangles. CSV stays the canonical data artifact; the
//! SVG is a convenience view.

use symcloud::metrics::Histogram;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 25.0;
const MARGIN_TOP: f64 = 45.0;
const MARGIN_BOTTOM: f64 = 70.0;

pub fn histogram_svg(hist: &Histogram, title: &str, x_label: &str) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let max_count = hist.counts.iter().copied().max().unwrap_or(0).max(1);
    let bins = hist.counts.len();
    let x_min = hist.edges[0];
    let x_max = hist.edges[bins];

    let mut s = String::with_capacity(4096);
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"28\" font-family=\"sans-serif\" font-size=\"18\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    ));

    // bars
    let bar_w = plot_w / bins as f64;
    for (i, &count) in hist.counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let h = plot_h * count as f64 / max_count as f64;
        let x = MARGIN_LEFT + bar_w * i as f64;
        let y = MARGIN_TOP + plot_h - h;
        s.push_str(&format!(
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{h:.2}\" fill=\"#4878a8\" stroke=\"white\" stroke-width=\"0.5\"/>\n",
            bar_w
        ));
    }

    // axes
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    s.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{:.1}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        MARGIN_LEFT + plot_w
    ));
    s.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{MARGIN_TOP}\" x2=\"{x0}\" y2=\"{y0}\" stroke=\"black\"/>\n"
    ));

    // tick labels: x range ends, y zero and max
    s.push_str(&format!(
        "<text x=\"{x0:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        y0 + 22.0,
        fmt_tick(x_min)
    ));
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w,
        y0 + 22.0,
        fmt_tick(x_max)
    ));
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\">0</text>\n",
        x0 - 8.0,
        y0 + 4.0
    ));
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\">{max_count}</text>\n",
        x0 - 8.0,
        MARGIN_TOP + 4.0
    ));

    // axis titles
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 18.0,
        escape(x_label)
    ));
    s.push_str(&format!(
        "<text x=\"22\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\" transform=\"rotate(-90 22 {:.1})\">count</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    ));

    s.push_str("</svg>\n");
    s
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 0.001 && v.abs() < 10_000.0 {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
