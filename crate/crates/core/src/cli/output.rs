use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::bergman::Profile;
use crate::error::Result;
use crate::extension::ExtensionResult;
use crate::verify::CheckReport;

/// CSV schema version of profile exports.
pub const PROFILE_CSV_SCHEMA: &str = "t,value,mode,p";

/// Renders a profile as CSV (`t,value,mode,p`; p is empty in restricted
/// mode). Floats use the shortest round-trip representation, so the
/// bytes are a pure function of the samples.
pub fn profile_csv(profile: &Profile) -> String {
    let mut out = String::new();
    out.push_str(PROFILE_CSV_SCHEMA);
    out.push('\n');
    let p = profile
        .mode
        .p()
        .map(|p| format!("{p}"))
        .unwrap_or_default();
    for (t, v) in profile.t.iter().zip(&profile.values) {
        let _ = writeln!(out, "{t},{v},{},{p}", profile.mode.label());
    }
    out
}

/// Minimal static SVG line plot of a profile: axes, frame, polyline and
/// corner labels. No external plotting machinery, byte-deterministic.
pub fn profile_svg(profile: &Profile, title: &str) -> String {
    let (w, h) = (640.0, 400.0);
    let (ml, mr, mt, mb) = (60.0, 20.0, 30.0, 40.0);
    let (pw, ph) = (w - ml - mr, h - mt - mb);
    let xmin = profile.t.first().copied().unwrap_or(0.0);
    let xmax = profile.t.last().copied().unwrap_or(1.0);
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for &v in &profile.values {
        ymin = ymin.min(v);
        ymax = ymax.max(v);
    }
    if !(ymax > ymin) {
        ymax = ymin + 1.0;
    }
    let sx = |t: f64| ml + (t - xmin) / (xmax - xmin) * pw;
    let sy = |v: f64| mt + (ymax - v) / (ymax - ymin) * ph;
    let mut pts = String::new();
    for (t, v) in profile.t.iter().zip(&profile.values) {
        let _ = write!(pts, "{:.2},{:.2} ", sx(*t), sy(*v));
    }
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(svg, "  <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "  <rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"18\" font-family=\"monospace\" font-size=\"13\">{}</text>",
        ml, title
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\">{:.4}</text>",
        8.0,
        sy(ymax) + 4.0,
        ymax
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\">{:.4}</text>",
        8.0,
        sy(ymin) + 4.0,
        ymin
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\">t={:.2}</text>",
        ml,
        h - 12.0,
        xmin
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\">t={:.2}</text>",
        ml + pw - 60.0,
        h - 12.0,
        xmax
    );
    let _ = writeln!(
        svg,
        "  <polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\" points=\"{}\"/>",
        pts.trim_end()
    );
    svg.push_str("</svg>\n");
    svg
}

/// Serializable form of an extension certificate (complex coefficients
/// flattened to `[re, im]`).
#[derive(Serialize)]
pub struct ExtensionReport {
    pub mode: String,
    pub instance: String,
    pub coefficients: Vec<[f64; 2]>,
    pub norm_sq: f64,
    pub bound: f64,
    pub ratio: f64,
    pub constraint_residual: f64,
    pub orthogonality_residual: f64,
    pub rank: usize,
    pub dropped: usize,
}

impl ExtensionReport {
    pub fn new(mode: &str, instance: &str, r: &ExtensionResult) -> ExtensionReport {
        ExtensionReport {
            mode: mode.to_string(),
            instance: instance.to_string(),
            coefficients: r.coefficients.iter().map(|c| [c.re, c.im]).collect(),
            norm_sq: r.norm_sq,
            bound: r.bound,
            ratio: r.ratio,
            constraint_residual: r.constraint_residual,
            orthogonality_residual: r.orthogonality_residual,
            rank: r.rank,
            dropped: r.dropped,
        }
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes a file, creating parent directories first.
pub fn write_artifact(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Plain text table of a report bundle for terminal output.
pub fn report_table(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<48} {:<6} instance", "statement", "pass");
    for r in reports {
        let _ = writeln!(
            out,
            "{:<48} {:<6} {}",
            r.statement,
            if r.pass { "ok" } else { "FAIL" },
            r.instance
        );
    }
    out
}
