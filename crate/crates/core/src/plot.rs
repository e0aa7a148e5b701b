//! Static SVG line charts from aggregate CSV files.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sim::AGGREGATE_HEADER;

/// Columns that identify a configuration rather than a measurement.
pub const KEY_COLUMNS: [&str; 6] = ["objective", "scheme", "case", "water", "n_nodes", "n_sinks"];

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl AggregateTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::domain("empty aggregate file"))?;
        if header.trim() != AGGREGATE_HEADER {
            return Err(Error::domain(format!("unexpected aggregate header `{header}`")));
        }
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
            if row.len() != columns.len() {
                return Err(Error::domain(format!(
                    "row {} has {} fields, expected {}",
                    i + 2,
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::domain(format!("no column `{name}`")))
    }

    fn distinct(&self, col: usize) -> usize {
        let mut seen: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !seen.contains(&r[col].as_str()) {
                seen.push(&r[col]);
            }
        }
        seen.len()
    }

    /// Default x axis: hop count for equal-hop studies, else the first key
    /// column that varies.
    pub fn default_x(&self) -> String {
        let obj = self.column("objective").unwrap_or(0);
        if self.rows.iter().any(|r| r[obj] == "equal_hop") {
            return "mean_hops".to_string();
        }
        for name in ["n_nodes", "n_sinks", "water", "case", "scheme", "objective"] {
            if let Ok(c) = self.column(name) {
                if self.distinct(c) > 1 {
                    return name.to_string();
                }
            }
        }
        "objective".to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Tick labels when the x column is categorical.
    pub categories: Option<Vec<String>>,
    pub series: Vec<Series>,
}

/// Group rows into series by the key columns other than `x`, plotting `y`
/// against `x`. Rows with an empty `y` are skipped.
pub fn build_chart(table: &AggregateTable, x: &str, y: &str) -> Result<Chart> {
    let xc = table.column(x)?;
    let yc = table.column(y)?;
    let numeric = table.rows.iter().all(|r| r[xc].parse::<f64>().is_ok());
    let mut categories: Vec<String> = Vec::new();
    if !numeric {
        for r in &table.rows {
            if !categories.contains(&r[xc]) {
                categories.push(r[xc].clone());
            }
        }
    }
    let key_cols: Vec<usize> = KEY_COLUMNS
        .iter()
        .filter(|&&k| k != x && !(x == "mean_hops" && k == "n_nodes"))
        .filter_map(|k| table.column(k).ok())
        .filter(|&c| table.distinct(c) > 1)
        .collect();
    let mut series: Vec<Series> = Vec::new();
    for r in &table.rows {
        let Ok(yv) = r[yc].parse::<f64>() else { continue };
        let xv = if numeric {
            r[xc].parse::<f64>().expect("checked numeric")
        } else {
            categories.iter().position(|c| c == &r[xc]).expect("collected") as f64
        };
        let label = if key_cols.is_empty() {
            y.to_string()
        } else {
            key_cols
                .iter()
                .map(|&c| format!("{}={}", table.columns[c], r[c]))
                .collect::<Vec<_>>()
                .join(" ")
        };
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push((xv, yv)),
            None => series.push(Series {
                label,
                points: vec![(xv, yv)],
            }),
        }
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    Ok(Chart {
        title: format!("{y} vs {x}"),
        x_label: x.to_string(),
        y_label: y.to_string(),
        categories: (!numeric).then_some(categories),
        series,
    })
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_svg(chart: &Chart) -> String {
    let (w, h) = (720.0, 440.0);
    let (left, right, top, bottom) = (80.0, 200.0, 40.0, 60.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let pts = chart.series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if let Some(c) = &chart.categories {
        x0 = -0.5;
        x1 = c.len() as f64 - 0.5;
    }
    y0 = y0.min(0.0);
    if x1 - x0 <= 0.0 {
        x0 -= 1.0;
        x1 += 1.0;
    }
    if y1 - y0 <= 0.0 {
        y1 = y0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    y1 += pad;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        left + pw / 2.0,
        escape(&chart.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let v = y0 + (y1 - y0) * i as f64 / 5.0;
        let y = sy(v);
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd"/>"##,
            left + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            left - 6.0,
            y + 4.0,
            tick_label(v)
        );
    }
    match &chart.categories {
        Some(cats) => {
            for (i, c) in cats.iter().enumerate() {
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                    sx(i as f64),
                    top + ph + 18.0,
                    escape(c)
                );
            }
        }
        None => {
            for i in 0..=5 {
                let v = x0 + (x1 - x0) * i as f64 / 5.0;
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                    sx(v),
                    top + ph + 18.0,
                    tick_label(v)
                );
            }
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 15.0,
        escape(&chart.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape(&chart.y_label)
    );
    for (k, series) in chart.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let path: Vec<String> = series
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for &(x, y) in &series.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = top + 14.0 + 18.0 * k as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    s
}
