//! Hand-written SVG figures: heatmaps and a scatter plot with a fitted line.

use std::fmt::Write;

const CELL: f64 = 56.0;
const MARGIN: f64 = 90.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Blue below zero, white at zero, red above; `scale` maps to full colour.
pub fn diverging(v: f64, scale: f64) -> String {
    let t = if scale > 0.0 { (v / scale).clamp(-1.0, 1.0) } else { 0.0 };
    let fade = |full: f64| (255.0 - (255.0 - full) * t.abs()).round() as u8;
    let (r, g, b) =
        if t < 0.0 { (fade(33.0), fade(102.0), fade(172.0)) } else { (fade(178.0), fade(24.0), fade(43.0)) };
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Heatmap of `values[row][col]` on a diverging scale centred at 0.
/// `scale` is the magnitude drawn at full saturation (`None`: max |v|).
pub fn heatmap(title: &str, rows: &[String], cols: &[String], values: &[Vec<f64>], scale: Option<f64>) -> String {
    let scale = scale.unwrap_or_else(|| values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())));
    let width = MARGIN + CELL * cols.len() as f64 + 20.0;
    let height = MARGIN + CELL * rows.len() as f64 + 40.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ =
        writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, width / 2.0, escape(title));
    for (j, c) in cols.iter().enumerate() {
        let x = MARGIN + CELL * (j as f64 + 0.5);
        let _ = writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#, MARGIN - 8.0, escape(c));
    }
    for (i, r) in rows.iter().enumerate() {
        let y = MARGIN + CELL * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            MARGIN - 8.0,
            y + CELL / 2.0 + 4.0,
            escape(r)
        );
        for (j, v) in values[i].iter().enumerate() {
            let x = MARGIN + CELL * j as f64;
            let _ = writeln!(
                s,
                r##"<rect class="cell" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="#888"/>"##,
                diverging(*v, scale)
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle">{v:.2}</text>"#,
                x + CELL / 2.0,
                y + CELL / 2.0 + 4.0
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">scale ±{scale:.3} (blue negative, red positive)</text>"#,
        width / 2.0,
        height - 12.0
    );
    s.push_str("</svg>\n");
    s
}

/// Scatter of `points` with the line `intercept + slope·x` over their x range.
pub fn scatter(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)], line: Option<(f64, f64)>) -> String {
    let (w, h, pad) = (640.0, 420.0, 60.0);
    let fold = |f: fn(&(f64, f64)) -> f64| {
        points.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (mut x0, mut x1) = fold(|p| p.0);
    let (mut y0, mut y1) = fold(|p| p.1);
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        (x0, x1) = (x0 - 0.5, x1 + 0.5);
    }
    if y1 - y0 < 1e-12 {
        (y0, y1) = (y0 - 0.01, y1 + 0.01);
    }
    let (dx, dy) = ((x1 - x0) * 0.05, (y1 - y0) * 0.1);
    let (x0, x1, y0, y1) = (x0 - dx, x1 + dx, y0 - dy, y1 + dy);
    let px = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let py = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(s, r#"<line x1="{pad}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, h - pad, w - pad, h - pad);
    let _ = writeln!(s, r#"<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{}" stroke="black"/>"#, h - pad);
    for k in 0..=4 {
        let (xv, yv) = (x0 + (x1 - x0) * k as f64 / 4.0, y0 + (y1 - y0) * k as f64 / 4.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xv:.2}</text>"#, px(xv), h - pad + 18.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{yv:.3}</text>"#, pad - 6.0, py(yv) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w / 2.0, h - 16.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(y_label)
    );
    for &(x, y) in points {
        let _ = writeln!(
            s,
            r##"<circle class="point" cx="{:.2}" cy="{:.2}" r="3" fill="#2166ac" fill-opacity="0.6"/>"##,
            px(x),
            py(y)
        );
    }
    if let Some((slope, intercept)) = line {
        let (a, b) = (x0 + dx, x1 - dx);
        let _ = writeln!(
            s,
            r##"<line class="fit" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#b2182b" stroke-width="2"/>"##,
            px(a),
            py(intercept + slope * a),
            px(b),
            py(intercept + slope * b)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diverging_endpoints() {
        assert_eq!(diverging(0.0, 1.0), "#ffffff");
        assert_eq!(diverging(-1.0, 1.0), "#2166ac");
        assert_eq!(diverging(5.0, 1.0), "#b2182b");
        assert_eq!(diverging(0.3, 0.0), "#ffffff");
    }

    #[test]
    fn heatmap_has_one_cell_per_value() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let svg = heatmap("t<1>", &labels, &labels, &[vec![0.0, 1.0], vec![-1.0, 0.5]], None);
        assert_eq!(svg.matches(r#"class="cell""#).count(), 4);
        assert!(svg.contains("t&lt;1&gt;"));
    }

    #[test]
    fn scatter_draws_points_and_fit() {
        let pts = [(1.0, 0.9), (2.0, 0.85), (3.0, 0.8)];
        let svg = scatter("s", "x", "y", &pts, Some((-0.05, 0.95)));
        assert_eq!(svg.matches(r#"class="point""#).count(), 3);
        assert_eq!(svg.matches(r#"class="fit""#).count(), 1);
        assert!(scatter("e", "x", "y", &[], None).ends_with("</svg>\n"));
    }
}
