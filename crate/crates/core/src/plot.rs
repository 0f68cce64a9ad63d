//! Minimal static SVG emission for the signal and spectrum figures.
//! Reproduction aids only: a framed axes box, polylines for the series,
//! and error bars where the data carries them.

use crate::sim::ExperimentResult;
use crate::spectral::{PeakReport, Spectrum};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 50.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn from_ranges(xs: impl Iterator<Item = f64>, ys: impl Iterator<Item = f64>) -> Frame {
        let mut f = Frame {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for x in xs {
            f.x_min = f.x_min.min(x);
            f.x_max = f.x_max.max(x);
        }
        for y in ys {
            f.y_min = f.y_min.min(y);
            f.y_max = f.y_max.max(y);
        }
        if !f.x_min.is_finite() {
            f = Frame {
                x_min: 0.0,
                x_max: 1.0,
                y_min: 0.0,
                y_max: 1.0,
            };
        }
        if f.x_max == f.x_min {
            f.x_max = f.x_min + 1.0;
        }
        if f.y_max == f.y_min {
            f.y_max = f.y_min + 1.0;
        }
        // headroom
        let pad = 0.05 * (f.y_max - f.y_min);
        f.y_min -= pad;
        f.y_max += pad;
        f
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn document(body: &str, x_label: &str, y_label: &str, title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<rect x=\"{m}\" y=\"{m}\" width=\"{iw}\" height=\"{ih}\" fill=\"none\" ",
            "stroke=\"black\"/>\n",
            "<text x=\"{cx}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{title}</text>\n",
            "<text x=\"{cx}\" y=\"{xl}\" text-anchor=\"middle\" font-size=\"12\">{x_label}</text>\n",
            "<text x=\"14\" y=\"{cy}\" text-anchor=\"middle\" font-size=\"12\" ",
            "transform=\"rotate(-90 14 {cy})\">{y_label}</text>\n",
            "{body}</svg>\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        m = MARGIN,
        iw = WIDTH - 2.0 * MARGIN,
        ih = HEIGHT - 2.0 * MARGIN,
        cx = WIDTH / 2.0,
        cy = HEIGHT / 2.0,
        xl = HEIGHT - 12.0,
        title = title,
        x_label = x_label,
        y_label = y_label,
        body = body
    )
}

fn polyline(frame: &Frame, points: &[(f64, f64)], color: &str) -> String {
    if points.is_empty() {
        return String::new();
    }
    let mut path = String::new();
    for (x, y) in points {
        path.push_str(&format!("{:.2},{:.2} ", frame.sx(*x), frame.sy(*y)));
    }
    format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
        path.trim_end(),
        color
    )
}

fn error_bars(frame: &Frame, points: &[(f64, f64, f64)], color: &str) -> String {
    let mut out = String::new();
    for (x, y, std) in points {
        if *std <= 0.0 {
            continue;
        }
        out.push_str(&format!(
            "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" stroke=\"{3}\" stroke-width=\"0.8\"/>\n",
            frame.sx(*x),
            frame.sy(y - std),
            frame.sy(y + std),
            color
        ));
    }
    out
}

/// Real and imaginary parts of the measured signal over time.
pub fn signal_svg(result: &ExperimentResult, title: &str) -> String {
    let frame = Frame::from_ranges(
        result.points.iter().map(|p| p.t),
        result
            .points
            .iter()
            .flat_map(|p| [p.value.re - p.std_re, p.value.re + p.std_re, p.value.im]),
    );
    let re: Vec<(f64, f64)> = result.points.iter().map(|p| (p.t, p.value.re)).collect();
    let im: Vec<(f64, f64)> = result.points.iter().map(|p| (p.t, p.value.im)).collect();
    let bars: Vec<(f64, f64, f64)> = result
        .points
        .iter()
        .map(|p| (p.t, p.value.re, p.std_re))
        .collect();
    let mut body = polyline(&frame, &re, "#1a55a0");
    body.push_str(&polyline(&frame, &im, "#c03a2b"));
    body.push_str(&error_bars(&frame, &bars, "#1a55a0"));
    document(&body, "t (s)", "signal", title)
}

/// Real part of the spectrum with error bars and peak markers.
pub fn spectrum_svg(spectrum: &Spectrum, peaks: Option<&PeakReport>, title: &str) -> String {
    let frame = Frame::from_ranges(
        spectrum.bins.iter().map(|b| b.eta),
        spectrum
            .bins
            .iter()
            .flat_map(|b| [b.value.re - b.std, b.value.re + b.std]),
    );
    let re: Vec<(f64, f64)> = spectrum.bins.iter().map(|b| (b.eta, b.value.re)).collect();
    let bars: Vec<(f64, f64, f64)> = spectrum
        .bins
        .iter()
        .map(|b| (b.eta, b.value.re, b.std))
        .collect();
    let mut body = polyline(&frame, &re, "#1a55a0");
    body.push_str(&error_bars(&frame, &bars, "#777777"));
    if let Some(report) = peaks {
        for p in &report.peaks {
            body.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"#c03a2b\"/>\n",
                frame.sx(p.frequency),
                frame.sy(p.weight)
            ));
        }
    }
    document(&body, "eta (rad/s)", "Re S~", title)
}
