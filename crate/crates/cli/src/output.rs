//! Artifact writers. Every file carries the tool name, version and the hash
//! of the effective configuration; nothing depends on time or thread count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use widthlab_core::width::WidthReport;

use crate::config::RunConfig;

pub const TOOL: &str = "widthlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub config: RunConfig,
}

impl Meta {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            command: command.to_string(),
            config_hash: config.hash(),
            config: config.clone(),
        }
    }

    fn comment(&self) -> String {
        format!(
            "{} {} {} config_hash={}",
            self.tool, self.version, self.command, self.config_hash
        )
    }
}

#[derive(Serialize)]
struct Document<'a, T> {
    meta: &'a Meta,
    report: &'a T,
}

/// A JSON artifact as read back by `report`.
#[derive(Debug, Deserialize)]
pub struct Loaded<T> {
    pub meta: Meta,
    pub report: T,
}

/// Output formats for width reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn json_text<T: Serialize>(meta: &Meta, report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Document { meta, report })?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, meta: &Meta, report: &T) -> Result<PathBuf> {
    write(dir, name, &json_text(meta, report)?)
}

/// One line per `n`; per-class columns follow the shared ones.
pub fn width_csv(meta: &Meta, rep: &WidthReport) -> String {
    let mut s = format!("# {}\n", meta.comment());
    let classes: Vec<String> = rep
        .rows
        .first()
        .map(|r| r.widths.iter().map(|w| w.label.clone()).collect())
        .unwrap_or_default();
    s.push_str("n,r,branch,resolution,grid_points,N_r,members,theoretical_lower_bound");
    for c in &classes {
        let _ = write!(s, ",{c}_lower,{c}_value,{c}_l2,{c}_path,{c}_dominates");
    }
    s.push_str(",dominance_ok,entropy_contradiction,entropy_flagged\n");
    for row in &rep.rows {
        let branch = serde_json::to_value(row.branch).expect("branch serializes");
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{}",
            row.n,
            row.r,
            branch.as_str().unwrap_or_default(),
            row.resolution,
            row.grid_points,
            row.n_r,
            row.members,
            row.theoretical_lower_bound
        );
        for w in &row.widths {
            let path = serde_json::to_value(w.path).expect("path serializes");
            let _ = write!(
                s,
                ",{},{},{},{},{}",
                w.lower,
                w.value,
                w.l2,
                path.as_str().unwrap_or_default(),
                w.dominates
            );
        }
        let (c, f) = match &row.entropy {
            Some(e) => (e.contradiction.to_string(), e.flagged.to_string()),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(s, ",{},{c},{f}", row.dominance_ok);
    }
    s
}

/// Log-log plot of the theoretical bound and each class's certified width.
pub fn width_svg(meta: &Meta, rep: &WidthReport) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const PAD: f64 = 60.0;
    let mut series: Vec<(String, Vec<(f64, f64)>)> = vec![(
        "theoretical bound".to_string(),
        rep.rows
            .iter()
            .map(|r| (r.n as f64, r.theoretical_lower_bound))
            .collect(),
    )];
    if let Some(first) = rep.rows.first() {
        for (j, w) in first.widths.iter().enumerate() {
            let pts = rep
                .rows
                .iter()
                .filter_map(|r| r.widths.get(j).map(|w| (r.n as f64, w.lower)))
                .collect();
            series.push((w.label.clone(), pts));
        }
    }
    let logs: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, p)| p.iter())
        .filter(|(_, y)| *y > 0.0)
        .map(|&(x, y)| (x.log10(), y.log10()))
        .collect();
    let fold = |f: fn(&(f64, f64)) -> f64, init: f64, pick: fn(f64, f64) -> f64| {
        logs.iter().map(f).fold(init, pick)
    };
    let (mut x0, mut x1) = (fold(|p| p.0, f64::INFINITY, f64::min), fold(|p| p.0, f64::NEG_INFINITY, f64::max));
    let (mut y0, mut y1) = (fold(|p| p.1, f64::INFINITY, f64::min), fold(|p| p.1, f64::NEG_INFINITY, f64::max));
    if logs.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-9 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| PAD + (x.log10() - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y.log10() - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let colours = ["#222222", "#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(s, "<!-- {} -->", meta.comment());
    let _ = writeln!(s, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<path d=\"M{PAD} {PAD} V{} H{}\" stroke=\"black\" fill=\"none\"/>",
        H - PAD,
        W - PAD
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">n (log scale), {} d={} p={} q={} k={}</text>",
        W / 2.0,
        H - 15.0,
        rep.manifold.kind,
        rep.manifold.d,
        rep.p,
        rep.q,
        rep.k
    );
    for r in &rep.rows {
        let x = sx(r.n as f64);
        let _ = writeln!(
            s,
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            H - PAD + 16.0,
            r.n
        );
    }
    for (j, (label, pts)) in series.iter().enumerate() {
        let colour = colours[j % colours.len()];
        let pts: Vec<&(f64, f64)> = pts.iter().filter(|(_, y)| *y > 0.0).collect();
        if !pts.is_empty() {
            let d: Vec<String> = pts
                .iter()
                .enumerate()
                .map(|(i, &&(x, y))| format!("{}{:.2} {:.2}", if i == 0 { "M" } else { "L" }, sx(x), sy(y)))
                .collect();
            let dash = if j == 0 { " stroke-dasharray=\"6 4\"" } else { "" };
            let _ = writeln!(
                s,
                "<path d=\"{}\" stroke=\"{colour}\" fill=\"none\" stroke-width=\"2\"{dash}/>",
                d.join(" ")
            );
            for &&(x, y) in &pts {
                let _ = writeln!(
                    s,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{colour}\"/>",
                    sx(x),
                    sy(y)
                );
            }
        }
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"{colour}\">{label}</text>",
            PAD + 10.0,
            PAD + 16.0 * j as f64
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes the requested width artifacts and returns their paths.
pub fn write_width(dir: &Path, meta: &Meta, rep: &WidthReport, formats: &[Format]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for f in formats {
        out.push(match f {
            Format::Csv => write(dir, "width.csv", &width_csv(meta, rep))?,
            Format::Json => write_json(dir, "width.json", meta, rep)?,
            Format::Svg => write(dir, "width.svg", &width_svg(meta, rep))?,
        });
    }
    Ok(out)
}
