//! CSV, JSON and SVG renderings of sweep records.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::experiments::{GridKind, SweepMetadata, SweepRecord};

pub const CSV_HEADER: &str =
    "theta_m,epsilon,dR_X,dR_Xp,S_rho,S_mon,S_probe,S_probe_mon,case,path,se_dR_X,se_dR_Xp";

fn nonempty(records: &[SweepRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn to_csv(records: &[SweepRecord]) -> Result<String> {
    nonempty(records)?;
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let e = &r.entropies;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.theta_m,
            r.epsilon,
            r.delta_r_x,
            r.delta_r_xprime,
            e.rho,
            e.monitored,
            e.probe,
            e.probe_monitored,
            r.case,
            r.path.as_str(),
            opt(r.se_delta_r_x),
            opt(r.se_delta_r_xprime),
        )
        .expect("writing to a String");
    }
    Ok(out)
}

pub fn to_json(metadata: &SweepMetadata, records: &[SweepRecord]) -> Result<Value> {
    nonempty(records)?;
    Ok(json!({ "metadata": metadata, "records": records }))
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 28.0;
const BOTTOM: f64 = 56.0;

struct Frame {
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        LEFT + (x - lo) / (hi - lo) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        HEIGHT - BOTTOM - (y - lo) / (hi - lo) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Line chart of both deltas against `θ_m` or `ε`, with ±1 standard error
/// bars when the records carry them.
pub fn to_svg(records: &[SweepRecord], x_axis: GridKind) -> Result<String> {
    nonempty(records)?;
    let xs: Vec<f64> = records
        .iter()
        .map(|r| match x_axis {
            GridKind::ThetaM => r.theta_m,
            GridKind::Epsilon => r.epsilon,
        })
        .collect();
    let series = [
        (
            "dR_X",
            "ΔR_X",
            "#1f77b4",
            records
                .iter()
                .map(|r| (r.delta_r_x, r.se_delta_r_x))
                .collect::<Vec<_>>(),
        ),
        (
            "dR_Xp",
            "ΔR_X′",
            "#d62728",
            records
                .iter()
                .map(|r| (r.delta_r_xprime, r.se_delta_r_xprime))
                .collect(),
        ),
    ];
    let (mut y_lo, mut y_hi) = (0.0f64, 0.0f64);
    for (_, _, _, pts) in &series {
        for &(y, se) in pts {
            let se = se.unwrap_or(0.0);
            y_lo = y_lo.min(y - se);
            y_hi = y_hi.max(y + se);
        }
    }
    let x_lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let x_hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let frame = Frame {
        x_range: padded(x_lo, x_hi),
        y_range: padded(y_lo, y_hi * 1.05),
    };

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )
    .unwrap();
    let (x0, x1) = (frame.px(frame.x_range.0), frame.px(frame.x_range.1));
    let (y0, y1) = (frame.py(frame.y_range.0), frame.py(frame.y_range.1));
    writeln!(
        s,
        r#"<g stroke="black" fill="none"><line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/><line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/></g>"#
    )
    .unwrap();
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = frame.x_range.0 + t * (frame.x_range.1 - frame.x_range.0);
        let yv = frame.y_range.0 + t * (frame.y_range.1 - frame.y_range.0);
        let (px, py) = (frame.px(xv), frame.py(yv));
        writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{xv:.3}</text>"#,
            y0 + 5.0,
            y0 + 20.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.3}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0
        )
        .unwrap();
    }
    let x_label = match x_axis {
        GridKind::ThetaM => "θ_m (rad)",
        GridKind::Epsilon => "ε",
    };
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">bits</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    )
    .unwrap();

    for (k, (id, label, color, pts)) in series.iter().enumerate() {
        let points: Vec<String> = xs
            .iter()
            .zip(pts)
            .map(|(&x, &(y, _))| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        writeln!(s, r#"<g id="{id}" stroke="{color}" fill="{color}">"#).unwrap();
        writeln!(
            s,
            r#"<polyline fill="none" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        )
        .unwrap();
        for (&x, &(y, se)) in xs.iter().zip(pts) {
            let (px, py) = (frame.px(x), frame.py(y));
            if let Some(se) = se {
                writeln!(
                    s,
                    r#"<line class="error-bar" x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}"/>"#,
                    frame.py(y - se),
                    frame.py(y + se)
                )
                .unwrap();
            }
            writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="2.5"/>"#).unwrap();
        }
        writeln!(s, "</g>").unwrap();
        let ly = TOP + 4.0 + 18.0 * k as f64;
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{label}</text>"#,
            x1 - 120.0,
            x1 - 96.0,
            x1 - 90.0,
            ly + 4.0
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
