//! Minimal SVG renderers for the emitted data: scatter, step, and bar
//! charts with plain axes. Output is deterministic for identical input.

use std::io::{self, Write};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;

pub enum SeriesKind {
    Scatter,
    Step,
    Line,
}

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub kind: SeriesKind,
    pub points: Vec<(f64, f64)>,
}

fn bounds(series: &[Series<'_>]) -> (f64, f64, f64, f64) {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !x_min.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |lo: &mut f64, hi: &mut f64| {
        let span = (*hi - *lo).abs();
        let pad = if span == 0.0 { 0.5 } else { span * 0.05 };
        *lo -= pad;
        *hi += pad;
    };
    pad(&mut x_min, &mut x_max);
    pad(&mut y_min, &mut y_max);
    (x_min, x_max, y_min, y_max)
}

/// Render one or more series into an SVG document.
pub fn chart<W: Write>(
    mut writer: W,
    title: &str,
    series: &[Series<'_>],
) -> io::Result<()> {
    let (x_min, x_max, y_min, y_max) = bounds(series);
    let sx = |x: f64| MARGIN + (x - x_min) / (x_max - x_min) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_min) / (y_max - y_min) * (HEIGHT - 2.0 * MARGIN);

    writeln!(
        writer,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )?;
    writeln!(writer, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#)?;
    writeln!(
        writer,
        r#"<text x="{:.1}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0
    )?;
    // axes
    writeln!(
        writer,
        r#"<line x1="{m}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{m}" y1="{t}" x2="{m}" y2="{b}" stroke="black"/>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN
    )?;
    for (value, x, y, anchor) in [
        (x_min, MARGIN, HEIGHT - MARGIN + 16.0, "middle"),
        (x_max, WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, "middle"),
        (y_min, MARGIN - 6.0, HEIGHT - MARGIN, "end"),
        (y_max, MARGIN - 6.0, MARGIN + 4.0, "end"),
    ] {
        writeln!(
            writer,
            r#"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{value:.4}</text>"#
        )?;
    }
    // legend
    for (i, s) in series.iter().enumerate() {
        let y = MARGIN + 14.0 * i as f64;
        writeln!(
            writer,
            r#"<text x="{:.1}" y="{y:.1}" font-family="sans-serif" font-size="10" fill="{}">{}</text>"#,
            WIDTH - MARGIN - 120.0,
            s.color,
            s.label
        )?;
    }
    for s in series {
        match s.kind {
            SeriesKind::Scatter => {
                for &(x, y) in &s.points {
                    writeln!(
                        writer,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}" fill-opacity="0.7"/>"#,
                        sx(x),
                        sy(y),
                        s.color
                    )?;
                }
            }
            SeriesKind::Line | SeriesKind::Step => {
                if s.points.is_empty() {
                    continue;
                }
                let mut d = String::new();
                let mut last_y = 0.0;
                for (i, &(x, y)) in s.points.iter().enumerate() {
                    if i == 0 {
                        d.push_str(&format!("M {:.2} {:.2}", sx(x), sy(y)));
                    } else {
                        if matches!(s.kind, SeriesKind::Step) {
                            d.push_str(&format!(" L {:.2} {:.2}", sx(x), last_y));
                        }
                        d.push_str(&format!(" L {:.2} {:.2}", sx(x), sy(y)));
                    }
                    last_y = sy(y);
                }
                writeln!(
                    writer,
                    r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                    s.color
                )?;
            }
        }
    }
    writeln!(writer, "</svg>")
}

/// Render a histogram as bars over `[0,1]`.
pub fn bars<W: Write>(mut writer: W, title: &str, mass: &[f64]) -> io::Result<()> {
    let max = mass.iter().cloned().fold(0.0f64, f64::max).max(1e-12);
    writeln!(
        writer,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )?;
    writeln!(writer, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#)?;
    writeln!(
        writer,
        r#"<text x="{:.1}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0
    )?;
    let plot_width = WIDTH - 2.0 * MARGIN;
    let plot_height = HEIGHT - 2.0 * MARGIN;
    let bar_width = plot_width / mass.len() as f64;
    for (i, &m) in mass.iter().enumerate() {
        let height = m / max * plot_height;
        writeln!(
            writer,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="steelblue" stroke="white"/>"#,
            MARGIN + i as f64 * bar_width,
            HEIGHT - MARGIN - height,
            bar_width,
            height
        )?;
    }
    writeln!(
        writer,
        r#"<line x1="{m}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    )?;
    writeln!(writer, "</svg>")
}
