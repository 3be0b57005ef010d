//! Band diagrams: a ranking drawn as one horizontal strip, with a red line at
//! each attack's position. Rank 1 sits at the left edge.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::eval::EvalReport;

pub const BAND_WIDTH: f64 = 800.0;
pub const BAND_HEIGHT: f64 = 40.0;
/// The strip itself; the bottom of the view box holds the rank labels.
const STRIP_HEIGHT: f64 = 30.0;

/// Horizontal position of a 1-based rank in a ranking of length `n`.
pub fn rank_x(rank: usize, n: usize) -> f64 {
    let span = n.saturating_sub(1).max(1) as f64;
    BAND_WIDTH * (rank.saturating_sub(1)) as f64 / span
}

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

pub fn band_svg(report: &EvalReport) -> String {
    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = num(BAND_WIDTH),
        h = num(BAND_HEIGHT)
    );
    let _ = writeln!(
        svg,
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#d3d3d3\"/>",
        num(BAND_WIDTH),
        num(STRIP_HEIGHT)
    );
    for &rank in &report.attack_positions {
        let x = num(rank_x(rank, report.n));
        let _ = writeln!(
            svg,
            "  <line x1=\"{x}\" y1=\"0\" x2=\"{x}\" y2=\"{}\" stroke=\"#ff0000\" stroke-width=\"1\"/>",
            num(STRIP_HEIGHT)
        );
    }
    let _ = writeln!(
        svg,
        "  <text x=\"0\" y=\"{}\" font-family=\"sans-serif\" font-size=\"8\" text-anchor=\"start\">1</text>",
        num(BAND_HEIGHT - 1.0)
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"8\" text-anchor=\"end\">{}</text>",
        num(BAND_WIDTH),
        num(BAND_HEIGHT - 1.0),
        report.n
    );
    svg.push_str("</svg>\n");
    svg
}

pub fn write_band_diagram(report: &EvalReport, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, band_svg(report))?;
    Ok(())
}
