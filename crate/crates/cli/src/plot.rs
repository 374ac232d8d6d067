//! Standalone SVG rendering of precision/recall curves.

use std::fmt::Write as _;

use entgraph_core::eval::PrCurve;

pub const MAX_CURVES: usize = 3;

const WIDTH: f64 = 560.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; MAX_CURVES] = ["#1f77b4", "#d62728", "#2ca02c"];
const DASHES: [&str; MAX_CURVES] = ["", "6,3", "2,3"];

fn x_of(recall: f64) -> f64 {
    LEFT + recall.clamp(0.0, 1.0) * (WIDTH - LEFT - RIGHT)
}

fn y_of(precision: f64, y_min: f64) -> f64 {
    let t = ((precision - y_min) / (1.0 - y_min)).clamp(0.0, 1.0);
    HEIGHT - BOTTOM - t * (HEIGHT - TOP - BOTTOM)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders up to three labelled curves with recall on the x axis and
/// precision from `y_min` to 1 on the y axis. The output depends only on
/// the inputs.
pub fn render_svg(curves: &[(String, PrCurve)], title: &str, y_min: f64) -> Result<String, String> {
    if curves.is_empty() || curves.len() > MAX_CURVES {
        return Err(format!(
            "expected 1 to {MAX_CURVES} curves, got {}",
            curves.len()
        ));
    }
    if !(0.0..1.0).contains(&y_min) {
        return Err(format!("y axis minimum {y_min} is outside [0, 1)"));
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    for i in 0..=5 {
        let r = i as f64 / 5.0;
        let p = y_min + (1.0 - y_min) * i as f64 / 5.0;
        let (x, y) = (x_of(r), y_of(p, y_min));
        let _ = writeln!(
            s,
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/>"##,
            TOP,
            HEIGHT - BOTTOM
        );
        let _ = writeln!(
            s,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##,
            LEFT,
            WIDTH - RIGHT
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{r:.1}</text>"#,
            HEIGHT - BOTTOM + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{p:.2}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">recall</text>"#,
        x_of(0.5),
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">precision</text>"#,
        y_of((1.0 + y_min) / 2.0, y_min),
        y_of((1.0 + y_min) / 2.0, y_min)
    );

    for (i, (label, curve)) in curves.iter().enumerate() {
        let mut pts = Vec::with_capacity(curve.points.len() + 1);
        if let Some(first) = curve.points.first() {
            pts.push(format!(
                "{:.2},{:.2}",
                x_of(0.0),
                y_of(first.precision, y_min)
            ));
        }
        for p in &curve.points {
            pts.push(format!(
                "{:.2},{:.2}",
                x_of(p.recall),
                y_of(p.precision, y_min)
            ));
        }
        let dash = if DASHES[i].is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{}""#, DASHES[i])
        };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="2"{dash} points="{}"/>"#,
            COLORS[i],
            pts.join(" ")
        );
        let ly = TOP + 16.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT - 150.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2"{dash}/>"#,
            lx + 24.0,
            COLORS[i]
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use entgraph_core::eval::pr_sweep;

    fn curve() -> PrCurve {
        pr_sweep(&[0.9, 0.8, 0.7, 0.6], &[true, true, false, true]).unwrap()
    }

    #[test]
    fn renders_each_curve_once() {
        let curves = vec![
            ("baseline-large".to_string(), curve()),
            ("baseline-small".to_string(), curve()),
            ("asserted".to_string(), curve()),
        ];
        let svg = render_svg(&curves, "PR <all>", 0.0).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.contains("PR &lt;all&gt;"));
        assert_eq!(svg, render_svg(&curves, "PR <all>", 0.0).unwrap());
    }

    #[test]
    fn rejects_too_many() {
        let curves: Vec<_> = (0..4).map(|i| (i.to_string(), curve())).collect();
        assert!(render_svg(&curves, "", 0.0).is_err());
        assert!(render_svg(&[], "", 0.0).is_err());
        assert!(render_svg(&curves[..1], "", 1.0).is_err());
    }
}
