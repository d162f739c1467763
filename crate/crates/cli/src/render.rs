//! SVG figures rendered from CSV text alone, so an image can always be
//! regenerated from the data file next to it.

use std::fmt::Write;

/// 16-step viridis-like ramp, dark (0) to bright (1).
pub const RAMP: [&str; 16] = [
    "#440154", "#481a6c", "#472f7d", "#414487", "#39568c", "#31688e", "#2a788e", "#23888e", "#1f988b", "#22a884",
    "#35b779", "#54c568", "#7ad151", "#a5db36", "#d2e21b", "#fde725",
];

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const LINE_COLORS: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];

/// Parsed CSV: header names and numeric rows. Empty cells become NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Table, String> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or("CSV has no header")?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|cell| {
                    let cell = cell.trim();
                    if cell.is_empty() {
                        Ok(f64::NAN)
                    } else {
                        cell.parse::<f64>().map_err(|_| format!("row {}: bad number '{cell}'", k + 1))
                    }
                })
                .collect::<Result<Vec<f64>, String>>()?;
            if row.len() != header.len() {
                return Err(format!("row {} has {} cells, header has {}", k + 1, row.len(), header.len()));
            }
            rows.push(row);
        }
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, String> {
        let j = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| format!("CSV has no column '{name}'"))?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }
}

fn short(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor();
    if (-2.0..4.0).contains(&mag) {
        let decimals = (2.0 - mag).max(0.0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn finite_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        None
    } else if lo == hi {
        Some((lo - 0.5, hi + 0.5))
    } else {
        Some((lo, hi))
    }
}

fn open_svg(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        escape(title)
    );
}

fn axis_labels(out: &mut String, x_label: &str, y_label: &str) {
    let px = LEFT + (WIDTH - LEFT - RIGHT) / 2.0;
    let _ = writeln!(
        out,
        r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let py = TOP + (HEIGHT - TOP - BOTTOM) / 2.0;
    let _ = writeln!(
        out,
        r#"<text x="20" y="{py:.2}" text-anchor="middle" transform="rotate(-90 20 {py:.2})">{}</text>"#,
        escape(y_label)
    );
}

/// Line plot of `y_cols` against `x_col`. Columns that are entirely
/// empty are skipped.
pub fn line_plot(csv: &str, x_col: &str, y_cols: &[&str], title: &str, y_label: &str) -> Result<String, String> {
    let table = Table::parse(csv)?;
    let x = table.column(x_col)?;
    let mut series = Vec::new();
    for name in y_cols {
        let y = table.column(name)?;
        if y.iter().any(|v| v.is_finite()) {
            series.push((*name, y));
        }
    }
    let (x0, x1) = finite_range(x.iter().copied()).ok_or("no finite x values")?;
    let (y0, y1) = finite_range(series.iter().flat_map(|(_, y)| y.iter().copied())).unwrap_or((0.0, 1.0));
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |v: f64| LEFT + (v - x0) / (x1 - x0) * pw;
    let sy = |v: f64| TOP + (1.0 - (v - y0) / (y1 - y0)) * ph;

    let mut out = String::new();
    open_svg(&mut out, title);
    let _ = writeln!(
        out,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#000000"/>"##
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(xv),
            TOP + ph + 18.0,
            short(xv)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(yv) + 4.0,
            short(yv)
        );
    }
    axis_labels(&mut out, x_col, y_label);
    for (i, (name, y)) in series.iter().enumerate() {
        let color = LINE_COLORS[i % LINE_COLORS.len()];
        let mut path = String::new();
        let mut pen_down = false;
        for (xv, yv) in x.iter().zip(y) {
            if xv.is_finite() && yv.is_finite() {
                let _ = write!(path, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, sx(*xv), sy(*yv));
                pen_down = true;
            } else {
                pen_down = false;
            }
        }
        let dash = if i % 2 == 1 { r#" stroke-dasharray="6 3""# } else { "" };
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            path.trim_end()
        );
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 10.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/>"#,
            lx + 20.0
        );
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 24.0, ly + 4.0, escape(name));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn distinct(values: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Colour index of a value in `[0, 1]`.
pub fn ramp_index(z: f64) -> usize {
    if !z.is_finite() || z <= 0.0 {
        0
    } else {
        ((z * 16.0) as usize).min(15)
    }
}

/// Heatmap of a long-format table: one cell per `(x, y)` pair coloured by
/// `z` on [`RAMP`] over `[0, 1]`. Rows follow the order in which `y`
/// values first appear, bottom to top.
pub fn heatmap(csv: &str, x_col: &str, y_col: &str, z_col: &str, title: &str) -> Result<String, String> {
    let table = Table::parse(csv)?;
    let (x, y, z) = (table.column(x_col)?, table.column(y_col)?, table.column(z_col)?);
    let xs = distinct(&x);
    let ys = distinct(&y);
    if xs.is_empty() || ys.is_empty() {
        return Err("heatmap needs at least one row".into());
    }
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let (cw, ch) = (pw / xs.len() as f64, ph / ys.len() as f64);

    let mut out = String::new();
    open_svg(&mut out, title);
    for k in 0..x.len() {
        let i = xs.iter().position(|v| *v == x[k]).expect("collected above");
        let j = ys.iter().position(|v| *v == y[k]).expect("collected above");
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            LEFT + i as f64 * cw,
            TOP + ph - (j + 1) as f64 * ch,
            cw + 0.05,
            ch + 0.05,
            RAMP[ramp_index(z[k])]
        );
    }
    let _ = writeln!(
        out,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#000000"/>"##
    );
    let picks = |n: usize| -> Vec<usize> {
        let mut v = vec![0, n / 2, n - 1];
        v.dedup();
        v
    };
    for i in picks(xs.len()) {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + (i as f64 + 0.5) * cw,
            TOP + ph + 18.0,
            short(xs[i])
        );
    }
    for j in picks(ys.len()) {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            TOP + ph - (j as f64 + 0.5) * ch + 4.0,
            short(ys[j])
        );
    }
    axis_labels(&mut out, x_col, y_col);
    let lx = WIDTH - RIGHT + 20.0;
    let step = ph / RAMP.len() as f64;
    for (k, color) in RAMP.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<rect x="{lx:.2}" y="{:.2}" width="20" height="{:.2}" fill="{color}"/>"#,
            TOP + ph - (k + 1) as f64 * step,
            step + 0.05
        );
    }
    for (v, yy) in [(0.0, TOP + ph), (0.5, TOP + ph / 2.0), (1.0, TOP)] {
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{v}</text>"#, lx + 26.0, yy + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{lx:.2}" y="{:.2}">{}</text>"#, TOP - 8.0, escape(z_col));
    out.push_str("</svg>\n");
    Ok(out)
}
