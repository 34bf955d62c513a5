//! Static SVG scatter plots of labelled clouds with hull overlays.
//!
//! Output depends only on the input values; coordinates are printed with a
//! fixed number of decimals so identical inputs give identical bytes.

use std::fmt::Write;

use crate::geometry::ForPolygon;
use crate::powerflow::Label;
use crate::sampling::LabelledCloud;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const MARGIN: f64 = 64.0;

const HULL_COLORS: [&str; 6] = ["#000000", "#e6550d", "#3182bd", "#756bb1", "#31a354", "#636363"];

fn label_color(label: Label) -> &'static str {
    match label {
        Label::Feasible => "#2ca02c",
        Label::Voltage => "#ff7f0e",
        Label::Current => "#1f77b4",
        Label::Both => "#d62728",
        Label::NonConverged => "#7f7f7f",
    }
}

struct Frame {
    lo: [f64; 2],
    hi: [f64; 2],
}

impl Frame {
    fn around<'a>(points: impl Iterator<Item = &'a [f64; 2]>) -> Frame {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if !lo[0].is_finite() {
            return Frame { lo: [-1.0; 2], hi: [1.0; 2] };
        }
        for k in 0..2 {
            let pad = ((hi[k] - lo[k]) * 0.05).max(1.0);
            lo[k] -= pad;
            hi[k] += pad;
        }
        Frame { lo, hi }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let x = MARGIN + (p[0] - self.lo[0]) / (self.hi[0] - self.lo[0]) * (WIDTH - 2.0 * MARGIN);
        let y = HEIGHT - MARGIN - (p[1] - self.lo[1]) / (self.hi[1] - self.lo[1]) * (HEIGHT - 2.0 * MARGIN);
        (x, y)
    }
}

/// Renders `cloud` coloured by label plus one labelled outline per hull.
pub fn render_svg(cloud: &LabelledCloud, hulls: &[(String, ForPolygon)]) -> String {
    let pts: Vec<[f64; 2]> = cloud.points.iter().map(|p| [p.p_kw, p.q_kvar]).collect();
    let frame = Frame::around(pts.iter().chain(hulls.iter().flat_map(|(_, h)| h.vertices.iter())));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"##
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="white"/>"##);
    let (x0, y0) = frame.map(frame.lo);
    let (x1, y1) = frame.map(frame.hi);
    let _ = writeln!(
        s,
        r##"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
        x1 - x0,
        y0 - y1
    );
    let _ = writeln!(
        s,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">P (kW)</text>"##,
        WIDTH / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        s,
        r##"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">Q (kvar)</text>"##,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let _ = writeln!(s, r##"<text x="{x0:.2}" y="{:.2}" text-anchor="middle">{:.1}</text>"##, y0 + 16.0, frame.lo[0]);
    let _ = writeln!(s, r##"<text x="{x1:.2}" y="{:.2}" text-anchor="middle">{:.1}</text>"##, y0 + 16.0, frame.hi[0]);
    let _ = writeln!(s, r##"<text x="{:.2}" y="{y0:.2}" text-anchor="end">{:.1}</text>"##, x0 - 4.0, frame.lo[1]);
    let _ = writeln!(s, r##"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.1}</text>"##, x0 - 4.0, y1 + 4.0, frame.hi[1]);

    for label in Label::ALL {
        let mine: Vec<_> = cloud.points.iter().filter(|p| p.label == label).collect();
        if mine.is_empty() {
            continue;
        }
        let _ = writeln!(s, r##"<g fill="{}" fill-opacity="0.6">"##, label_color(label));
        for p in mine {
            let (x, y) = frame.map([p.p_kw, p.q_kvar]);
            let _ = writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="1.2"/>"##);
        }
        let _ = writeln!(s, "</g>");
    }

    for (i, (name, hull)) in hulls.iter().enumerate() {
        if hull.vertices.is_empty() {
            continue;
        }
        let color = HULL_COLORS[i % HULL_COLORS.len()];
        let path: Vec<String> = hull
            .vertices
            .iter()
            .map(|&v| {
                let (x, y) = frame.map(v);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"##,
            path.join(" ")
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"##,
            WIDTH - MARGIN + 4.0,
            MARGIN + 16.0 * i as f64,
            escape(name)
        );
    }

    let present: Vec<Label> = Label::ALL.into_iter().filter(|&l| cloud.count(l) > 0).collect();
    for (i, label) in present.iter().enumerate() {
        let y = 20.0 + 14.0 * i as f64;
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text>"##,
            MARGIN + 4.0,
            y - 4.0,
            label_color(*label),
            MARGIN + 12.0,
            y,
            label.as_str()
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::SamplePoint;

    fn cloud() -> LabelledCloud {
        LabelledCloud::from_points(vec![
            SamplePoint { p_kw: 0.0, q_kvar: 0.0, label: Label::Feasible },
            SamplePoint { p_kw: 10.0, q_kvar: 5.0, label: Label::Voltage },
            SamplePoint { p_kw: -4.0, q_kvar: 8.0, label: Label::Feasible },
        ])
    }

    fn tri(s: f64) -> ForPolygon {
        ForPolygon { vertices: vec![[0.0, 0.0], [s, 0.0], [0.0, s]] }
    }

    #[test]
    fn scatter_only() {
        let svg = render_svg(&cloud(), &[]);
        assert_eq!(svg.matches("<circle cx").count(), 3 + 2);
        assert!(!svg.contains("<polygon"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn two_hulls_two_outlines() {
        let svg = render_svg(&cloud(), &[("a<1>".into(), tri(3.0)), ("b".into(), tri(6.0))]);
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert!(svg.contains("a&lt;1&gt;"));
        assert!(svg.contains(">b</text>"));
    }

    #[test]
    fn byte_identical() {
        let h = [("x".to_string(), tri(2.0))];
        assert_eq!(render_svg(&cloud(), &h), render_svg(&cloud(), &h));
        let empty = render_svg(&LabelledCloud::default(), &[]);
        assert!(empty.starts_with("<svg"));
    }
}
