//! Minimal static SVG renderer for the experiment sweeps: scatter and line
//! series on optionally log-scaled axes. The CSV output is the contract;
//! this is a convenience view of the same data.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Line,
    Scatter,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub kind: SeriesKind,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

const W: f64 = 820.0;
const H: f64 = 560.0;
const ML: f64 = 80.0;
const MR: f64 = 30.0;
const MT: f64 = 50.0;
const MB: f64 = 60.0;

impl Plot {
    pub fn render(&self) -> String {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for s in &self.series {
            for (x, y) in &s.points {
                if self.usable(*x, self.log_x) && self.usable(*y, self.log_y) {
                    xs.push(self.tx(*x));
                    ys.push(self.ty(*y));
                }
            }
        }
        if xs.is_empty() {
            return format!(
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\"><text x=\"20\" y=\"40\">no data</text></svg>"
            );
        }
        let (x0, x1) = padded_range(&xs);
        let (y0, y1) = padded_range(&ys);
        let px = |v: f64| ML + (v - x0) / (x1 - x0) * (W - ML - MR);
        let py = |v: f64| H - MB - (v - y0) / (y1 - y0) * (H - MT - MB);

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        ));
        out.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
            W / 2.0,
            xml_escape(&self.title)
        ));
        // frame
        out.push_str(&format!(
            "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
            W - ML - MR,
            H - MT - MB
        ));
        // ticks
        for i in 0..=5 {
            let fx = x0 + (x1 - x0) * i as f64 / 5.0;
            let fy = y0 + (y1 - y0) * i as f64 / 5.0;
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                px(fx),
                H - MB + 18.0,
                tick_label(fx, self.log_x)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
                ML - 6.0,
                py(fy) + 4.0,
                tick_label(fy, self.log_y)
            ));
            out.push_str(&format!(
                "<line x1=\"{ML}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"#ddd\"/>\n",
                py(fy),
                W - MR
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            W / 2.0,
            H - 16.0,
            xml_escape(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
            H / 2.0,
            H / 2.0,
            xml_escape(&self.y_label)
        ));

        for (si, s) in self.series.iter().enumerate() {
            let mapped: Vec<(f64, f64)> = s
                .points
                .iter()
                .filter(|(x, y)| self.usable(*x, self.log_x) && self.usable(*y, self.log_y))
                .map(|(x, y)| (px(self.tx(*x)), py(self.ty(*y))))
                .collect();
            match s.kind {
                SeriesKind::Line => {
                    let path: Vec<String> = mapped
                        .iter()
                        .map(|(x, y)| format!("{x:.2},{y:.2}"))
                        .collect();
                    out.push_str(&format!(
                        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\" points=\"{}\"/>\n",
                        s.color,
                        path.join(" ")
                    ));
                }
                SeriesKind::Scatter => {
                    for (x, y) in &mapped {
                        out.push_str(&format!(
                            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2.2\" fill=\"{}\" fill-opacity=\"0.7\"/>\n",
                            s.color
                        ));
                    }
                }
            }
            out.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
                ML + 10.0,
                MT + 8.0 + 16.0 * si as f64,
                s.color
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\">{}</text>\n",
                ML + 24.0,
                MT + 17.0 + 16.0 * si as f64,
                xml_escape(&s.label)
            ));
        }
        out.push_str("</svg>\n");
        out
    }

    fn usable(&self, v: f64, log: bool) -> bool {
        v.is_finite() && (!log || v > 0.0)
    }

    fn tx(&self, v: f64) -> f64 {
        if self.log_x {
            v.log10()
        } else {
            v
        }
    }

    fn ty(&self, v: f64) -> f64 {
        if self.log_y {
            v.log10()
        } else {
            v
        }
    }
}

fn padded_range(vals: &[f64]) -> (f64, f64) {
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        (lo - 1.0, hi + 1.0)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{v:.1}")
    } else if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-3) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
