use std::fmt::Write;

use super::{weak_disorder_rate, LaplaceCurve};
use crate::disorder::critical_beta;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Line chart of `F` against `r`, one polyline per curve, with an optional
/// dashed `ln cosh r` overlay. Output depends only on the inputs.
pub fn render_svg(curves: &[LaplaceCurve], overlay_weak: bool, comments: &[String]) -> String {
    let points: Vec<(f64, f64)> = curves
        .iter()
        .flat_map(|c| c.r.iter().copied().zip(c.f.iter().copied()))
        .filter(|(_, f)| f.is_finite())
        .collect();
    let (mut x_min, mut x_max) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(x, _)| (lo.min(x), hi.max(x)));
    let mut y_max = points.iter().fold(0.0f64, |hi, &(_, y)| hi.max(y));
    if overlay_weak {
        y_max = y_max.max(weak_disorder_rate(x_min.abs().max(x_max.abs())));
    }
    if !(x_min < x_max) {
        x_min = -1.0;
        x_max = 1.0;
    }
    if !(y_max > 0.0) {
        y_max = 1.0;
    }
    let y_min = 0.0;
    let sx = |x: f64| MARGIN + (x - x_min) / (x_max - x_min) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_min) / (y_max - y_min) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    for line in comments {
        writeln!(svg, "<!-- {} -->", line.replace("--", "- -")).unwrap();
    }
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();

    // Axes and ticks.
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    writeln!(svg, r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#).unwrap();
    for i in 0..=4 {
        let x = x_min + (x_max - x_min) * i as f64 / 4.0;
        let px = sx(x);
        writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{x:.2}</text>"#,
            y0 + 5.0,
            y0 + 20.0
        )
        .unwrap();
        let y = y_min + (y_max - y_min) * i as f64 / 4.0;
        let py = sy(y);
        writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{y:.3}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">r</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">F(r)</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    )
    .unwrap();

    let polyline = |svg: &mut String, pts: &[(f64, f64)], color: &str, dashed: bool| {
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y))).collect();
        let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
        writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            coords.join(" ")
        )
        .unwrap();
    };

    let bc = critical_beta();
    let mut legend_y = MARGIN + 10.0;
    for (i, curve) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = curve
            .r
            .iter()
            .copied()
            .zip(curve.f.iter().copied())
            .filter(|(_, f)| f.is_finite())
            .collect();
        polyline(&mut svg, &pts, color, false);
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{legend_y:.2}" fill="{color}">beta = {:.4} ({:.3} beta_c)</text>"#,
            MARGIN + 10.0,
            curve.beta,
            curve.beta / bc
        )
        .unwrap();
        legend_y += 16.0;
    }
    if overlay_weak {
        let steps = 201;
        let pts: Vec<(f64, f64)> = (0..steps)
            .map(|i| {
                let x = x_min + (x_max - x_min) * i as f64 / (steps - 1) as f64;
                (x, weak_disorder_rate(x))
            })
            .collect();
        polyline(&mut svg, &pts, "#555555", true);
        writeln!(
            svg,
            r##"<text x="{:.2}" y="{legend_y:.2}" fill="#555555">ln cosh r (weak disorder)</text>"##,
            MARGIN + 10.0
        )
        .unwrap();
    }
    writeln!(svg, "</svg>").unwrap();
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplace::laplace_curve;

    #[test]
    fn svg_is_deterministic_and_complete() {
        let bc = critical_beta();
        let curves: Vec<_> = [1.0, 2.0]
            .iter()
            .map(|k| laplace_curve(k * bc, -2.0, 2.0, 21).unwrap())
            .collect();
        let a = render_svg(&curves, true, &["test".into()]);
        let b = render_svg(&curves, true, &["test".into()]);
        assert_eq!(a, b);
        assert_eq!(a.matches("<polyline").count(), 3);
        assert!(a.contains("<!-- test -->"));
        assert!(a.trim_end().ends_with("</svg>"));
    }
}
