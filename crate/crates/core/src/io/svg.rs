//! Deterministic SVG line plots for trajectory families.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::IoError;
use crate::analysis::SensitivityResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesStyle {
    Nominal,
    Target,
    /// A perturbed member of a family; green above 1, red below.
    Scaled(f64),
}

impl SeriesStyle {
    fn stroke(self) -> (String, &'static str) {
        match self {
            SeriesStyle::Nominal => ("#000000".into(), ""),
            SeriesStyle::Target => ("#1f4fd8".into(), " stroke-dasharray=\"6 4\""),
            SeriesStyle::Scaled(s) => {
                // Fade toward white as the scale approaches 1.
                let t = ((s - 1.0).abs() / 0.5).clamp(0.2, 1.0);
                let fade = |full: f64| (255.0 - t * (255.0 - full)).round() as u8;
                let rgb = if s >= 1.0 { (fade(0.0), fade(140.0), fade(0.0)) } else { (fade(200.0), fade(0.0), fade(0.0)) };
                (format!("#{:02x}{:02x}{:02x}", rgb.0, rgb.1, rgb.2), "")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<[f64; 2]>,
    pub style: SeriesStyle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub width: f64,
    pub height: f64,
}

impl PlotSpec {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        PlotSpec {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
            width: 640.0,
            height: 480.0,
        }
    }

    pub fn with_series(mut self, label: impl Into<String>, points: Vec<[f64; 2]>, style: SeriesStyle) -> Self {
        self.series.push(Series { label: label.into(), points, style });
        self
    }
}

const MARGIN: f64 = 56.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn bounds(plot: &PlotSpec) -> ([f64; 2], [f64; 2]) {
    let mut x = [f64::INFINITY, f64::NEG_INFINITY];
    let mut y = x;
    for p in plot.series.iter().flat_map(|s| &s.points).filter(|p| p[0].is_finite() && p[1].is_finite()) {
        x = [x[0].min(p[0]), x[1].max(p[0])];
        y = [y[0].min(p[1]), y[1].max(p[1])];
    }
    let widen = |r: [f64; 2]| {
        if !r[0].is_finite() {
            [0.0, 1.0]
        } else if r[1] - r[0] < 1e-12 {
            [r[0] - 0.5, r[1] + 0.5]
        } else {
            r
        }
    };
    (widen(x), widen(y))
}

/// Renders the plot. All series must have at least one point and share a
/// sample count; non-finite points split a polyline.
pub fn render_svg(plot: &PlotSpec) -> Result<String, IoError> {
    let Some(first) = plot.series.first() else {
        return Err(IoError::EmptyPlot("no series".into()));
    };
    for s in &plot.series {
        if s.points.is_empty() {
            return Err(IoError::EmptyPlot(format!("series `{}` has no points", s.label)));
        }
        if s.points.len() != first.points.len() {
            return Err(IoError::GridMismatch {
                series: s.label.clone(),
                expected: first.points.len(),
                found: s.points.len(),
            });
        }
    }
    let (xr, yr) = bounds(plot);
    let (w, h) = (plot.width, plot.height);
    let sx = |x: f64| MARGIN + (x - xr[0]) / (xr[1] - xr[0]) * (w - 2.0 * MARGIN);
    let sy = |y: f64| h - MARGIN - (y - yr[0]) / (yr[1] - yr[0]) * (h - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(out, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##);
    let _ = writeln!(out, r#"<text x="{:.3}" y="24" text-anchor="middle" font-size="16">{}</text>"#, w / 2.0, escape(&plot.title));
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{:.3}" height="{:.3}" fill="none" stroke="#888888"/>"##,
        w - 2.0 * MARGIN,
        h - 2.0 * MARGIN
    );
    for (k, v) in [xr[0], xr[1]].iter().enumerate() {
        let anchor = if k == 0 { "start" } else { "end" };
        let _ = writeln!(out, r#"<text x="{:.3}" y="{:.3}" text-anchor="{anchor}" font-size="11">{v:.3}</text>"#, sx(*v), h - MARGIN + 16.0);
    }
    for v in [yr[0], yr[1]] {
        let _ = writeln!(out, r#"<text x="{:.3}" y="{:.3}" text-anchor="end" font-size="11">{v:.3}</text>"#, MARGIN - 4.0, sy(v) + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{:.3}" y="{:.3}" text-anchor="middle" font-size="12">{}</text>"#, w / 2.0, h - 12.0, escape(&plot.x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.3}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {:.3})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(&plot.y_label)
    );
    for s in &plot.series {
        let (color, dash) = s.style.stroke();
        let mut runs: Vec<Vec<String>> = vec![Vec::new()];
        for p in &s.points {
            if p[0].is_finite() && p[1].is_finite() {
                runs.last_mut().expect("nonempty").push(format!("{:.3},{:.3}", sx(p[0]), sy(p[1])));
            } else if !runs.last().expect("nonempty").is_empty() {
                runs.push(Vec::new());
            }
        }
        for run in runs.iter().filter(|r| !r.is_empty()) {
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"><title>{}</title></polyline>"#,
                run.join(" "),
                escape(&s.label)
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Wingtip-path family of a sensitivity sweep: the nominal path in black,
/// larger scales in green and smaller ones in red. Failed scales are left out.
pub fn sensitivity_plot(result: &SensitivityResult) -> PlotSpec {
    let mut plot = PlotSpec::new(
        format!("{} path family: {}", result.tracked_point, result.parameter),
        "x (mm)",
        "y (mm)",
    );
    for o in &result.outcomes {
        let Ok(traj) = &o.trajectory else { continue };
        let points = traj.point_series(&result.tracked_point).expect("tracked point exists");
        let style = if o.scale == 1.0 { SeriesStyle::Nominal } else { SeriesStyle::Scaled(o.scale) };
        plot.series.push(Series { label: format!("x{:.3}", o.scale), points, style });
    }
    plot
}

pub fn write_svg(plot: &PlotSpec, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, render_svg(plot)?).map_err(|e| IoError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_make_one_polyline() {
        let plot = PlotSpec::new("t", "x", "y").with_series("a", vec![[0.0, 0.0], [1.0, 2.0]], SeriesStyle::Nominal);
        let svg = render_svg(&plot).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts.split(' ').count(), 2);
    }

    #[test]
    fn empty_and_mismatched_series_are_rejected() {
        let plot = PlotSpec::new("t", "x", "y");
        assert!(matches!(render_svg(&plot), Err(IoError::EmptyPlot(_))));
        let plot = PlotSpec::new("t", "x", "y")
            .with_series("a", vec![[0.0, 0.0], [1.0, 1.0]], SeriesStyle::Nominal)
            .with_series("b", vec![[0.0, 0.0]], SeriesStyle::Target);
        assert!(matches!(render_svg(&plot), Err(IoError::GridMismatch { .. })));
    }

    #[test]
    fn scale_colors() {
        assert!(SeriesStyle::Scaled(1.5).stroke().0.starts_with("#00"));
        assert!(SeriesStyle::Scaled(0.5).stroke().0.starts_with("#c8"));
        assert!(SeriesStyle::Target.stroke().1.contains("dasharray"));
    }

    #[test]
    fn labels_are_escaped() {
        let plot = PlotSpec::new("a<b", "x", "y").with_series("s&t", vec![[0.0, 1.0]], SeriesStyle::Nominal);
        let svg = render_svg(&plot).unwrap();
        assert!(svg.contains("a&lt;b") && svg.contains("s&amp;t"));
    }
}
