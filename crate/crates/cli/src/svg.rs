//! Minimal self-contained SVG line plots for pattern cuts. Inline styling
//! only, deterministic output.

pub struct Series {
    pub label: String,
    pub color: String,
    pub dashed: bool,
    /// (x, y) samples; y values below the plot floor are clamped.
    pub points: Vec<(f64, f64)>,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub series: Vec<Series>,
}

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 52.0;

pub const SERIES_COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

impl Plot {
    fn x_pix(&self, x: f64) -> f64 {
        let (x0, x1) = self.x_range;
        MARGIN_L + (x - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y_pix(&self, y: f64) -> f64 {
        let (y0, y1) = self.y_range;
        let clamped = y.clamp(y0.min(y1), y0.max(y1));
        MARGIN_T + (y1 - clamped) / (y1 - y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        s.push_str(&format!(
            "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
        ));
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
             text-anchor=\"middle\">{}</text>\n",
            WIDTH / 2.0,
            xml_escape(&self.title)
        ));

        // Frame.
        let (px0, px1) = (MARGIN_L, WIDTH - MARGIN_R);
        let (py0, py1) = (MARGIN_T, HEIGHT - MARGIN_B);
        s.push_str(&format!(
            "<rect x=\"{px0:.1}\" y=\"{py0:.1}\" width=\"{:.1}\" height=\"{:.1}\" \
             fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n",
            px1 - px0,
            py1 - py0
        ));

        // Gridlines and ticks: 7 x divisions, y every 10 units.
        for i in 0..=6 {
            let x = self.x_range.0 + (self.x_range.1 - self.x_range.0) * i as f64 / 6.0;
            let xp = self.x_pix(x);
            s.push_str(&format!(
                "<line x1=\"{xp:.1}\" y1=\"{py0:.1}\" x2=\"{xp:.1}\" y2=\"{py1:.1}\" \
                 stroke=\"#ddd\" stroke-width=\"1\"/>\n"
            ));
            s.push_str(&format!(
                "<text x=\"{xp:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
                 text-anchor=\"middle\">{x:.2}</text>\n",
                py1 + 18.0
            ));
        }
        let (ylo, yhi) = (
            self.y_range.0.min(self.y_range.1),
            self.y_range.0.max(self.y_range.1),
        );
        let mut y = (ylo / 10.0).ceil() * 10.0;
        while y <= yhi + 1e-9 {
            let yp = self.y_pix(y);
            s.push_str(&format!(
                "<line x1=\"{px0:.1}\" y1=\"{yp:.1}\" x2=\"{px1:.1}\" y2=\"{yp:.1}\" \
                 stroke=\"#ddd\" stroke-width=\"1\"/>\n"
            ));
            s.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
                 text-anchor=\"end\">{y:.0}</text>\n",
                px0 - 6.0,
                yp + 4.0
            ));
            y += 10.0;
        }

        // Axis labels.
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
             text-anchor=\"middle\">{}</text>\n",
            (px0 + px1) / 2.0,
            HEIGHT - 12.0,
            xml_escape(&self.x_label)
        ));
        s.push_str(&format!(
            "<text x=\"16\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
             text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
            (py0 + py1) / 2.0,
            (py0 + py1) / 2.0,
            xml_escape(&self.y_label)
        ));

        // Series.
        for series in &self.series {
            let mut d = String::new();
            for (i, (x, y)) in series.points.iter().enumerate() {
                let cmd = if i == 0 { 'M' } else { 'L' };
                d.push_str(&format!("{cmd}{:.2},{:.2} ", self.x_pix(*x), self.y_pix(*y)));
            }
            let dash = if series.dashed {
                " stroke-dasharray=\"6,4\""
            } else {
                ""
            };
            s.push_str(&format!(
                "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{dash}/>\n",
                d.trim_end(),
                series.color
            ));
        }

        // Legend.
        let mut ly = py0 + 16.0;
        for series in &self.series {
            let dash = if series.dashed {
                " stroke-dasharray=\"6,4\""
            } else {
                ""
            };
            s.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{}\" \
                 stroke-width=\"2\"{dash}/>\n",
                px1 - 160.0,
                ly,
                px1 - 130.0,
                ly,
                series.color
            ));
            s.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                px1 - 124.0,
                ly + 4.0,
                xml_escape(&series.label)
            ));
            ly += 18.0;
        }

        s.push_str("</svg>\n");
        s
    }
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_svg() {
        let plot = Plot {
            title: "test".into(),
            x_label: "theta (deg)".into(),
            y_label: "dB".into(),
            x_range: (-3.0, 3.0),
            y_range: (-60.0, 0.0),
            series: vec![Series {
                label: "co".into(),
                color: SERIES_COLORS[0].into(),
                dashed: false,
                points: vec![(-3.0, -40.0), (0.0, 0.0), (3.0, -40.0)],
            }],
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("<path"));
        // Deterministic.
        assert_eq!(svg, plot.render());
    }
}
