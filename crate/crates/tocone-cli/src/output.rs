//! Deterministic file output: 17-significant-digit CSV floats, LF line
//! endings, and a dependency-free SVG heatmap of cone sweeps.

use std::io::Write;
use std::path::Path;

use tocone::ento::ConeRecord;

/// 17 significant digits round-trip every binary double exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Buffered text writer with LF line endings regardless of platform.
pub struct OutputWriter {
    inner: std::io::BufWriter<std::fs::File>,
}

impl OutputWriter {
    pub fn create(path: &Path) -> std::io::Result<Self> {
        Ok(Self { inner: std::io::BufWriter::new(std::fs::File::create(path)?) })
    }

    pub fn line(&mut self, s: &str) -> std::io::Result<()> {
        self.inner.write_all(s.as_bytes())?;
        self.inner.write_all(b"\n")
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Three-stop linear color scale from dark violet through teal to yellow.
fn color(t: f64) -> String {
    const STOPS: [(f64, [f64; 3]); 3] = [
        (0.0, [68.0, 1.0, 84.0]),
        (0.5, [33.0, 145.0, 140.0]),
        (1.0, [253.0, 231.0, 37.0]),
    ];
    let t = t.clamp(0.0, 1.0);
    let (lo, hi) = if t <= 0.5 { (STOPS[0], STOPS[1]) } else { (STOPS[1], STOPS[2]) };
    let u = (t - lo.0) / (hi.0 - lo.0);
    let c: Vec<u8> = (0..3).map(|i| (lo.1[i] + (hi.1[i] - lo.1[i]) * u).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Writes a cell heatmap of the feasible region with the boundary traced
/// as a polyline and a min/max-annotated color legend. p0 runs along the
/// horizontal axis, p1 upward.
pub fn write_cone_svg(records: &[ConeRecord], grid: usize, path: &Path) -> std::io::Result<()> {
    assert_eq!(records.len(), grid * grid);
    let cell = (600.0 / grid as f64).max(1.0);
    let margin = 60.0;
    let plot = cell * grid as f64;
    let width = margin * 2.0 + plot + 90.0;
    let height = margin * 2.0 + plot;

    let feasible_vals: Vec<f64> =
        records.iter().filter(|r| r.feasible()).map(|r| r.rho10_max).collect();
    let vmin = feasible_vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let vmax = feasible_vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if (vmax - vmin).abs() < f64::MIN_POSITIVE { 1.0 } else { vmax - vmin };

    let mut w = OutputWriter::create(path)?;
    w.line(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    ))?;
    w.line(r#"<rect width="100%" height="100%" fill="white"/>"#)?;

    let x_of = |i: usize| margin + i as f64 * cell;
    let y_of = |j: usize| margin + plot - (j + 1) as f64 * cell;
    let at = |i: usize, j: usize| records[i * grid + j].feasible();

    for (idx, r) in records.iter().enumerate() {
        if !r.feasible() {
            continue;
        }
        let (i, j) = (idx / grid, idx % grid);
        let t = (r.rho10_max - vmin) / span;
        w.line(&format!(
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            x_of(i),
            y_of(j),
            cell + 0.1,
            cell + 0.1,
            color(t)
        ))?;
    }

    // boundary: edges between feasible cells and infeasible/outside space
    let mut segs = String::new();
    for idx in 0..records.len() {
        let (i, j) = (idx / grid, idx % grid);
        if !at(i, j) {
            continue;
        }
        let (x0, y0) = (x_of(i), y_of(j));
        let (x1, y1) = (x0 + cell, y0 + cell);
        if i == 0 || !at(i - 1, j) {
            segs.push_str(&format!("M{x0:.2} {y0:.2}L{x0:.2} {y1:.2}"));
        }
        if i + 1 == grid || !at(i + 1, j) {
            segs.push_str(&format!("M{x1:.2} {y0:.2}L{x1:.2} {y1:.2}"));
        }
        if j + 1 == grid || !at(i, j + 1) {
            segs.push_str(&format!("M{x0:.2} {y0:.2}L{x1:.2} {y0:.2}"));
        }
        if j == 0 || !at(i, j - 1) {
            segs.push_str(&format!("M{x0:.2} {y1:.2}L{x1:.2} {y1:.2}"));
        }
    }
    w.line(&format!(
        r#"<path d="{segs}" stroke="black" stroke-width="1" fill="none"/>"#
    ))?;

    // axes
    let q = records[0].q;
    w.line(&format!(
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="16">p0</text>"#,
        margin + plot / 2.0,
        margin + plot + 36.0
    ))?;
    w.line(&format!(
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="16" transform="rotate(-90 {:.1} {:.1})">p1</text>"#,
        margin - 36.0,
        margin + plot / 2.0,
        margin - 36.0,
        margin + plot / 2.0
    ))?;
    w.line(&format!(
        r#"<text x="{margin:.1}" y="{:.1}" font-family="sans-serif" font-size="14">max coherence at q = {q}</text>"#,
        margin - 20.0
    ))?;
    for (frac, label) in [(0.0, "0"), (0.5, "0.5"), (1.0, "1")] {
        let x = margin + plot * frac;
        let y = margin + plot * (1.0 - frac);
        w.line(&format!(
            r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{label}</text>"#,
            margin + plot + 16.0
        ))?;
        w.line(&format!(
            r#"<text x="{:.1}" y="{y:.1}" font-family="sans-serif" font-size="12" text-anchor="end">{label}</text>"#,
            margin - 8.0
        ))?;
    }

    // legend: vertical gradient in discrete steps, annotated min/max
    let lx = margin + plot + 24.0;
    let lh = plot * 0.6;
    let ly = margin + (plot - lh) / 2.0;
    let steps = 64;
    for s in 0..steps {
        let t = s as f64 / (steps - 1) as f64;
        w.line(&format!(
            r#"<rect x="{lx:.1}" y="{:.2}" width="18" height="{:.2}" fill="{}"/>"#,
            ly + lh * (1.0 - (s + 1) as f64 / steps as f64),
            lh / steps as f64 + 0.5,
            color(t)
        ))?;
    }
    w.line(&format!(
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{:.6}</text>"#,
        lx + 24.0,
        ly + lh,
        vmin
    ))?;
    w.line(&format!(
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{:.6}</text>"#,
        lx + 24.0,
        ly + 10.0,
        vmax
    ))?;

    w.line("</svg>")?;
    w.finish()
}
