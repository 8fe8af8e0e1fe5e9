//! Deterministic SVG charts drawn from the result CSVs of a previous run.
//! Rendering is a pure projection of the CSV contents: identical files
//! produce identical SVG bytes, and nothing is recomputed from the model.

use std::fs;
use std::fmt::Write as _;
use std::path::Path;

use crate::config::{load_file, Command, RunConfig, MANIFEST_FILE};
use crate::error::{runtime, Result};
use crate::output::{detailed_csv_name, EPISODE_TRACE_CSV, ETA_SWEEP_CSV, FRAT5_GRID_CSV};

const PANEL_W: f64 = 720.0;
const PANEL_H: f64 = 380.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 695.0;
const TOP: f64 = 34.0;
const BOTTOM: f64 = 330.0;

fn method_color(method: &str) -> &'static str {
    match method {
        "greedy" => "#c24d3d",
        "unified" => "#2f6fb2",
        "random" => "#3f9b5a",
        _ => "#777777",
    }
}

/// Draws the charts for the run recorded in the manifest of `config.out`.
pub fn render(config: &RunConfig) -> Result<()> {
    let dir = &config.out;
    let manifest_path = dir.join(MANIFEST_FILE);
    if !manifest_path.exists() {
        return Err(runtime(format!(
            "missing {}: render needs the manifest of a finished run",
            manifest_path.display()
        )));
    }
    let manifest = load_file(&manifest_path).map_err(|e| runtime(e.to_string()))?;
    let command_name = manifest
        .manifest_command
        .clone()
        .ok_or_else(|| runtime(format!("{}: no manifest_command key", manifest_path.display())))?;
    let command = Command::parse(&command_name).map_err(|e| runtime(e.to_string()))?;
    let recorded =
        RunConfig::from_parts(command, manifest).map_err(|e| runtime(e.to_string()))?;
    match command {
        Command::Episode => render_episode(dir),
        Command::SweepEta => render_eta(dir),
        Command::SweepFrat5 => render_grid(dir),
        Command::Detailed => {
            let spec = recorded.sweep_spec().map_err(|e| runtime(e.to_string()))?;
            for point in spec.frat5_points {
                render_detailed(dir, point)?;
            }
            Ok(())
        }
        Command::Render => Err(runtime(format!(
            "{}: manifest records a render run, nothing to draw",
            manifest_path.display()
        ))),
    }
}

/// Reads a CSV produced by this tool: a header row then data rows. Missing
/// or malformed files fail with the file name in the message.
fn read_rows(path: &Path) -> Result<Vec<Vec<String>>> {
    if !path.exists() {
        return Err(runtime(format!("missing {}", path.display())));
    }
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| runtime(format!("{}: {e}", path.display())))?;
        rows.push(record.iter().map(str::to_string).collect());
    }
    if rows.is_empty() {
        return Err(runtime(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

fn field_f64(path: &Path, row: &[String], idx: usize) -> Result<f64> {
    row.get(idx)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| runtime(format!("{}: bad numeric field {idx} in {row:?}", path.display())))
}

fn write_svg(dir: &Path, name: &str, panels: Vec<String>) -> Result<()> {
    let height = PANEL_H * panels.len() as f64;
    let mut body = String::new();
    for (i, panel) in panels.iter().enumerate() {
        let _ = writeln!(
            body,
            "<g transform=\"translate(0,{:.2})\">\n{panel}</g>",
            i as f64 * PANEL_H
        );
    }
    let svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PANEL_W}\" height=\"{height}\" \
         viewBox=\"0 0 {PANEL_W} {height}\" font-family=\"monospace\" font-size=\"12\">\n\
         <rect width=\"{PANEL_W}\" height=\"{height}\" fill=\"white\"/>\n{body}</svg>\n"
    );
    let path = dir.join(name);
    fs::write(&path, svg)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// One line series with an optional confidence band.
struct Series {
    label: String,
    color: &'static str,
    points: Vec<(f64, f64)>,
    band: Vec<(f64, f64, f64)>,
}

fn fmt_tick(v: f64) -> String {
    let a = v.abs();
    if a >= 1000.0 {
        format!("{v:.0}")
    } else if a >= 10.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn range_of(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 1.0, hi + 1.0)
    } else {
        let pad = 0.06 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn axes(out: &mut String, title: &str, x_ticks: &[(f64, String)], y_ticks: &[(f64, String)], x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">{title}</text>",
        (LEFT + RIGHT) / 2.0
    );
    let _ = writeln!(
        out,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#444444\"/>",
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    for (px, label) in x_ticks {
        let _ = writeln!(
            out,
            "<line x1=\"{px:.2}\" y1=\"{BOTTOM}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#444444\"/>\
             <text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{label}</text>",
            BOTTOM + 5.0,
            BOTTOM + 20.0
        );
    }
    for (py, label) in y_ticks {
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{LEFT}\" y2=\"{py:.2}\" stroke=\"#444444\"/>\
             <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{label}</text>",
            LEFT - 5.0,
            LEFT - 9.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{x_label}</text>",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 40.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{y_label}</text>",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );
}

fn legend(out: &mut String, labels: &[(String, &'static str)]) {
    for (i, (label, color)) in labels.iter().enumerate() {
        let y = TOP + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\
             <text x=\"{:.2}\" y=\"{:.2}\">{label}</text>",
            RIGHT - 150.0,
            y - 10.0,
            RIGHT - 133.0,
            y
        );
    }
}

/// Line panel with optional CI bands, linear axes.
fn line_panel(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (x_lo, x_hi) = range_of(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y_lo, y_hi) = range_of(series.iter().flat_map(|s| {
        s.points
            .iter()
            .map(|p| p.1)
            .chain(s.band.iter().flat_map(|&(_, lo, hi)| [lo, hi]))
    }));
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * (RIGHT - LEFT);
    let sy = |y: f64| BOTTOM - (y - y_lo) / (y_hi - y_lo) * (BOTTOM - TOP);

    let mut out = String::new();
    let x_ticks: Vec<(f64, String)> = (0..5)
        .map(|k| {
            let v = x_lo + (x_hi - x_lo) * k as f64 / 4.0;
            (sx(v), fmt_tick(v))
        })
        .collect();
    let y_ticks: Vec<(f64, String)> = (0..5)
        .map(|k| {
            let v = y_lo + (y_hi - y_lo) * k as f64 / 4.0;
            (sy(v), fmt_tick(v))
        })
        .collect();
    axes(&mut out, title, &x_ticks, &y_ticks, x_label, y_label);

    for s in series {
        if !s.band.is_empty() {
            let mut pts = String::new();
            for &(x, _, hi) in &s.band {
                let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(hi));
            }
            for &(x, lo, _) in s.band.iter().rev() {
                let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(lo));
            }
            let _ = writeln!(
                out,
                "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.18\" stroke=\"none\"/>",
                pts.trim_end(),
                s.color
            );
        }
    }
    for s in series {
        let mut pts = String::new();
        for &(x, y) in &s.points {
            let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"/>",
            pts.trim_end(),
            s.color
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.2\" fill=\"{}\"/>",
                sx(x),
                sy(y),
                s.color
            );
        }
    }
    if series.len() > 1 {
        let labels: Vec<(String, &'static str)> =
            series.iter().map(|s| (s.label.clone(), s.color)).collect();
        legend(&mut out, &labels);
    }
    out
}

/// Grouped bar panel: one slot per category, one bar per group.
fn bar_panel(
    title: &str,
    x_label: &str,
    y_label: &str,
    categories: &[String],
    groups: &[(String, Vec<f64>)],
) -> String {
    let y_hi = groups
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .fold(0.0_f64, f64::max)
        .max(1e-9)
        * 1.1;
    let sy = |y: f64| BOTTOM - y / y_hi * (BOTTOM - TOP);
    let m = categories.len().max(1) as f64;
    let slot = (RIGHT - LEFT) / m;
    let bar_w = slot * 0.8 / groups.len().max(1) as f64;

    let mut out = String::new();
    let label_every = (categories.len() + 11) / 12;
    let x_ticks: Vec<(f64, String)> = categories
        .iter()
        .enumerate()
        .filter(|(i, _)| i % label_every.max(1) == 0)
        .map(|(i, c)| (LEFT + slot * (i as f64 + 0.5), c.clone()))
        .collect();
    let y_ticks: Vec<(f64, String)> = (0..5)
        .map(|k| {
            let v = y_hi * k as f64 / 4.0;
            (sy(v), fmt_tick(v))
        })
        .collect();
    axes(&mut out, title, &x_ticks, &y_ticks, x_label, y_label);

    for (g, (label, values)) in groups.iter().enumerate() {
        let color = method_color(label);
        for (i, &v) in values.iter().enumerate() {
            let x = LEFT + slot * (i as f64 + 0.5) - bar_w * groups.len() as f64 / 2.0
                + bar_w * g as f64;
            let y = sy(v);
            let _ = writeln!(
                out,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{bar_w:.2}\" height=\"{:.2}\" fill=\"{color}\"/>",
                BOTTOM - y
            );
        }
    }
    let labels: Vec<(String, &'static str)> = groups
        .iter()
        .map(|(label, _)| (label.clone(), method_color(label)))
        .collect();
    legend(&mut out, &labels);
    out
}

fn render_eta(dir: &Path) -> Result<()> {
    let path = dir.join(ETA_SWEEP_CSV);
    let rows = read_rows(&path)?;
    let mut rev = Series {
        label: "unified".into(),
        color: method_color("unified"),
        points: Vec::new(),
        band: Vec::new(),
    };
    let mut mse = Series {
        label: "unified".into(),
        color: method_color("unified"),
        points: Vec::new(),
        band: Vec::new(),
    };
    for row in &rows {
        let eta = field_f64(&path, row, 0)?;
        let r = field_f64(&path, row, 1)?;
        let rc = field_f64(&path, row, 2)?;
        let m = field_f64(&path, row, 3)?;
        let mc = field_f64(&path, row, 4)?;
        rev.points.push((eta, r));
        rev.band.push((eta, r - rc, r + rc));
        mse.points.push((eta, m));
        mse.band.push((eta, m - mc, m + mc));
    }
    write_svg(
        dir,
        "eta_sweep.svg",
        vec![
            line_panel(
                "Normalized revenue vs exploration weight",
                "eta",
                "normalized revenue",
                &[rev],
            ),
            line_panel(
                "Estimation MSE vs exploration weight",
                "eta",
                "MSE of phi estimate",
                &[mse],
            ),
        ],
    )
}

fn render_grid(dir: &Path) -> Result<()> {
    let path = dir.join(FRAT5_GRID_CSV);
    let rows = read_rows(&path)?;
    let mut methods: Vec<String> = Vec::new();
    for row in &rows {
        let m = row.get(1).cloned().unwrap_or_default();
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    let mut rev_series = Vec::new();
    let mut mse_series = Vec::new();
    for method in &methods {
        let mut rev = Series {
            label: method.clone(),
            color: method_color(method),
            points: Vec::new(),
            band: Vec::new(),
        };
        let mut mse = Series {
            label: method.clone(),
            color: method_color(method),
            points: Vec::new(),
            band: Vec::new(),
        };
        for row in rows.iter().filter(|r| r.get(1) == Some(method)) {
            let frat5 = field_f64(&path, row, 0)?;
            let r = field_f64(&path, row, 2)?;
            let rc = field_f64(&path, row, 3)?;
            let m = field_f64(&path, row, 4)?;
            let mc = field_f64(&path, row, 5)?;
            rev.points.push((frat5, r));
            rev.band.push((frat5, r - rc, r + rc));
            mse.points.push((frat5, m));
            mse.band.push((frat5, m - mc, m + mc));
        }
        rev_series.push(rev);
        mse_series.push(mse);
    }
    write_svg(
        dir,
        "frat5_grid.svg",
        vec![
            line_panel(
                "Normalized revenue vs true frat5",
                "true frat5",
                "normalized revenue",
                &rev_series,
            ),
            line_panel(
                "Estimation MSE vs true frat5",
                "true frat5",
                "MSE of phi estimate",
                &mse_series,
            ),
        ],
    )
}

fn render_detailed(dir: &Path, frat5: f64) -> Result<()> {
    let path = dir.join(detailed_csv_name(frat5));
    let rows = read_rows(&path)?;
    let mut methods: Vec<String> = Vec::new();
    let mut fare_keys: Vec<String> = Vec::new();
    let mut bin_keys: Vec<String> = Vec::new();
    for row in &rows {
        let method = row.first().cloned().unwrap_or_default();
        let key = row.get(1).cloned().unwrap_or_default();
        if !methods.contains(&method) {
            methods.push(method);
        }
        if let Some(fare) = key.strip_prefix("fare_") {
            let label = format!("${fare}");
            if !fare_keys.contains(&label) {
                fare_keys.push(label);
            }
        } else if let Some(bin) = key.strip_prefix("frat5_") {
            let label = bin.to_string();
            if !bin_keys.contains(&label) {
                bin_keys.push(label);
            }
        }
    }
    let share_of = |method: &str, key: &str| -> f64 {
        rows.iter()
            .find(|r| r.first().map(String::as_str) == Some(method) && r.get(1).map(String::as_str) == Some(key))
            .and_then(|r| r.get(2))
            .and_then(|s| s.parse().ok())
            .unwrap_or(0.0)
    };
    let fare_groups: Vec<(String, Vec<f64>)> = methods
        .iter()
        .map(|m| {
            let values = fare_keys
                .iter()
                .map(|label| share_of(m, &format!("fare_{}", &label[1..])))
                .collect();
            (m.clone(), values)
        })
        .collect();
    let bin_groups: Vec<(String, Vec<f64>)> = methods
        .iter()
        .map(|m| {
            let values = bin_keys
                .iter()
                .map(|label| share_of(m, &format!("frat5_{label}")))
                .collect();
            (m.clone(), values)
        })
        .collect();
    let name = format!("detailed_{frat5:.2}.svg");
    write_svg(
        dir,
        &name,
        vec![
            bar_panel(
                &format!("Offered-fare shares, true frat5 {frat5:.2}"),
                "fare",
                "share of offers",
                &fare_keys,
                &fare_groups,
            ),
            bar_panel(
                &format!("Estimated-frat5 shares, true frat5 {frat5:.2}"),
                "frat5 estimate bin",
                "share of steps",
                &bin_keys,
                &bin_groups,
            ),
        ],
    )
}

fn render_episode(dir: &Path) -> Result<()> {
    let path = dir.join(EPISODE_TRACE_CSV);
    let rows = read_rows(&path)?;
    let mut revenue = Series {
        label: "revenue".into(),
        color: "#2f6fb2",
        points: Vec::new(),
        band: Vec::new(),
    };
    let mut phi = Series {
        label: "phi".into(),
        color: "#c24d3d",
        points: Vec::new(),
        band: Vec::new(),
    };
    let mut last_step = None;
    for row in &rows {
        let step = field_f64(&path, row, 0)?;
        if last_step == Some(step as u64) {
            continue;
        }
        last_step = Some(step as u64);
        revenue.points.push((step, field_f64(&path, row, 4)?));
        phi.points.push((step, field_f64(&path, row, 5)?));
    }
    write_svg(
        dir,
        "episode_trace.svg",
        vec![
            line_panel(
                "Revenue per sell date",
                "sell date",
                "revenue ($)",
                &[revenue],
            ),
            line_panel(
                "Price-sensitivity estimate",
                "sell date",
                "phi estimate",
                &[phi],
            ),
        ],
    )
}
