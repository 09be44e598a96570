//! Minimal static SVG line charts for bundle series. No styling knobs, no
//! interactivity; the output is deterministic for identical inputs.

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 340.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 45.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub struct Chart {
    title: String,
    x_label: String,
    y_label: String,
    series: Vec<(String, Vec<f64>)>,
}

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

/// Round tick labels to a few significant places so axis text stays short.
fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (2 - magnitude).clamp(0, 6) as usize;
    format!("{v:.decimals$}")
}

impl Chart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Chart {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            series: Vec::new(),
        }
    }

    pub fn series(mut self, name: &str, values: &[f64]) -> Self {
        self.series.push((name.to_string(), values.to_vec()));
        self
    }

    pub fn svg(&self) -> String {
        let steps = self.series.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        let x_max = (steps.saturating_sub(1)).max(1) as f64;
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for (_, values) in &self.series {
            for v in values {
                y_min = y_min.min(*v);
                y_max = y_max.max(*v);
            }
        }
        if !y_min.is_finite() {
            y_min = 0.0;
            y_max = 1.0;
        }
        y_min = y_min.min(0.0);
        if y_max <= y_min {
            y_max = y_min + 1.0;
        }
        let pad = 0.05 * (y_max - y_min);
        let y_top = y_max + pad;
        let y_bot = y_min;

        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let x_of = |t: f64| MARGIN_LEFT + plot_w * t / x_max;
        let y_of = |v: f64| MARGIN_TOP + plot_h * (1.0 - (v - y_bot) / (y_top - y_bot));

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"20\" font-size=\"15\" font-weight=\"bold\">{}</text>\n",
            MARGIN_LEFT, self.title
        ));

        // axes and ticks
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
            fmt2(MARGIN_LEFT),
            fmt2(MARGIN_TOP),
            fmt2(plot_w),
            fmt2(plot_h)
        ));
        for i in 0..=4 {
            let frac = i as f64 / 4.0;
            let v = y_bot + (y_top - y_bot) * frac;
            let y = y_of(v);
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ddd\"/>\n",
                fmt2(MARGIN_LEFT),
                fmt2(y),
                fmt2(MARGIN_LEFT + plot_w),
                fmt2(y)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
                fmt2(MARGIN_LEFT - 6.0),
                fmt2(y + 4.0),
                tick_label(v)
            ));
            let t = x_max * frac;
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                fmt2(x_of(t)),
                fmt2(MARGIN_TOP + plot_h + 16.0),
                tick_label(t)
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            fmt2(MARGIN_LEFT + plot_w / 2.0),
            fmt2(HEIGHT - 8.0),
            self.x_label
        ));
        out.push_str(&format!(
            "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
            fmt2(MARGIN_TOP + plot_h / 2.0),
            fmt2(MARGIN_TOP + plot_h / 2.0),
            self.y_label
        ));

        for (i, (name, values)) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let points: Vec<String> = values
                .iter()
                .enumerate()
                .map(|(t, v)| format!("{},{}", fmt2(x_of(t as f64)), fmt2(y_of(*v))))
                .collect();
            out.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                points.join(" "),
                color
            ));
            let ly = MARGIN_TOP + 14.0 * i as f64 + 8.0;
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                fmt2(MARGIN_LEFT + plot_w + 10.0),
                fmt2(ly),
                fmt2(MARGIN_LEFT + plot_w + 30.0),
                fmt2(ly),
                color
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\">{}</text>\n",
                fmt2(MARGIN_LEFT + plot_w + 34.0),
                fmt2(ly + 4.0),
                name
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}
