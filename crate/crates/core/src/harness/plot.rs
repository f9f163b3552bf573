//! Self-contained SVG charts from result tables.
//!
//! | kind      | reads                                     | default columns          |
//! |-----------|-------------------------------------------|--------------------------|
//! | heatmap   | results table                             | x=`h`, y=`w`, value=`bias` |
//! | histogram | per-replication estimates                 | value=`value`            |
//! | boxplot   | per-replication estimates                 | value=`value`            |
//! | line      | results table                             | x=`p_diff`, y=`mean`     |
//!
//! An `estimator` column, when present, selects rows (heatmap, histogram)
//! or splits series (boxplot, line). A `truth` column adds a dashed
//! reference. Output bytes depend only on the input table and options.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{read_file, write_file, HarnessError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Heatmap,
    Histogram,
    Boxplot,
    Line,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::Heatmap => "heatmap",
            PlotKind::Histogram => "histogram",
            PlotKind::Boxplot => "boxplot",
            PlotKind::Line => "line",
        }
    }
}

impl std::str::FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "heatmap" => Ok(PlotKind::Heatmap),
            "histogram" => Ok(PlotKind::Histogram),
            "boxplot" => Ok(PlotKind::Boxplot),
            "line" => Ok(PlotKind::Line),
            other => Err(format!("unknown plot kind `{other}` (heatmap, histogram, boxplot, line)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub kind: PlotKind,
    pub x: Option<String>,
    pub y: Option<String>,
    pub value: Option<String>,
    pub estimator: Option<String>,
    pub bins: usize,
    pub title: Option<String>,
}

impl PlotOptions {
    pub fn new(kind: PlotKind) -> Self {
        PlotOptions { kind, x: None, y: None, value: None, estimator: None, bins: 20, title: None }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 45.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| HarnessError::Data(format!("plot input: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for r in reader.records() {
            let r = r.map_err(|e| HarnessError::Data(format!("plot input: {e}")))?;
            rows.push(r.iter().map(str::to_string).collect());
        }
        Ok(Table { headers, rows })
    }

    fn find(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    fn require(&self, kind: PlotKind, needed: &[&str]) -> Result<Vec<usize>, HarnessError> {
        needed
            .iter()
            .map(|n| {
                self.find(n).ok_or_else(|| {
                    HarnessError::Data(format!(
                        "{} plot needs columns [{}]; input has [{}]",
                        kind.name(),
                        needed.join(", "),
                        self.headers.join(", ")
                    ))
                })
            })
            .collect()
    }

    fn number(&self, row: usize, col: usize) -> Result<Option<f64>, HarnessError> {
        let s = self.rows[row][col].as_str();
        if s.is_empty() {
            return Ok(None);
        }
        s.parse().map(Some).map_err(|_| {
            HarnessError::Data(format!("row {}: `{s}` in column `{}` is not a number", row + 2, self.headers[col]))
        })
    }

    /// Rows passing the estimator filter. Without an explicit choice the
    /// first estimator in the table is used.
    fn selected_rows(&self, estimator: Option<&str>) -> (Vec<usize>, Option<String>) {
        match self.find("estimator") {
            None => ((0..self.rows.len()).collect(), None),
            Some(c) => {
                let pick = estimator.map(str::to_string).or_else(|| self.rows.first().map(|r| r[c].clone()));
                let rows = (0..self.rows.len()).filter(|&i| Some(&self.rows[i][c]) == pick.as_ref()).collect();
                (rows, pick)
            }
        }
    }
}

/// Renders a table (CSV text) as an SVG document.
pub fn emit_plots(table_csv: &str, opts: &PlotOptions) -> Result<String, HarnessError> {
    let table = Table::parse(table_csv)?;
    match opts.kind {
        PlotKind::Heatmap => heatmap(&table, opts),
        PlotKind::Histogram => histogram(&table, opts),
        PlotKind::Boxplot => boxplot(&table, opts),
        PlotKind::Line => line(&table, opts),
    }
}

pub fn write_plot(input: &Path, opts: &PlotOptions, out: &Path) -> Result<(), HarnessError> {
    let svg = emit_plots(&read_file(input)?, opts)?;
    write_file(out, &svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Svg(String);

impl Svg {
    fn new(title: &str) -> Self {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        Svg(s)
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, extra: &str) {
        let _ =
            writeln!(self.0, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}"{extra}/>"#);
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, stroke: &str) {
        let _ = writeln!(
            self.0,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}" stroke="{stroke}"/>"#
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, body: &str) {
        let _ = writeln!(self.0, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{}</text>"#, escape(body));
    }

    fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(self.0, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.1}" fill="{fill}"/>"#);
    }

    fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, extra: &str) {
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            self.0,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="2"{extra}/>"#,
            coords.join(" ")
        );
    }

    fn finish(mut self) -> String {
        self.0.push_str("</svg>\n");
        self.0
    }
}

/// Linear map from data to pixels.
#[derive(Clone, Copy)]
struct Scale {
    lo: f64,
    hi: f64,
    p0: f64,
    p1: f64,
}

impl Scale {
    fn new(lo: f64, hi: f64, p0: f64, p1: f64) -> Self {
        let (lo, hi) = if hi > lo {
            (lo, hi)
        } else {
            let pad = if lo == 0.0 { 0.05 } else { lo.abs() * 0.1 };
            (lo - pad, hi + pad)
        };
        Scale { lo, hi, p0, p1 }
    }

    fn at(&self, v: f64) -> f64 {
        self.p0 + (v - self.lo) / (self.hi - self.lo) * (self.p1 - self.p0)
    }
}

fn nice_step(range: f64, target: usize) -> f64 {
    let raw = range / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(s: &Scale) -> (Vec<f64>, usize) {
    let step = nice_step(s.hi - s.lo, 5);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (s.lo / step).ceil() as i64;
    let last = (s.hi / step + 1e-9).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), decimals)
}

fn axes(svg: &mut Svg, xs: Option<&Scale>, ys: &Scale, x_label: &str, y_label: &str) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    svg.line(x0, y0, x1, y0, "black", "");
    svg.line(x0, y0, x0, y1, "black", "");
    let (yt, yd) = ticks(ys);
    for v in yt {
        let y = ys.at(v);
        svg.line(x0 - 4.0, y, x0, y, "black", "");
        svg.text(x0 - 7.0, y + 4.0, "end", &format!("{v:.yd$}"));
    }
    if let Some(xs) = xs {
        let (xt, xd) = ticks(xs);
        for v in xt {
            let x = xs.at(v);
            svg.line(x, y0, x, y0 + 4.0, "black", "");
            svg.text(x, y0 + 18.0, "middle", &format!("{v:.xd$}"));
        }
    }
    svg.text((x0 + x1) / 2.0, HEIGHT - 12.0, "middle", x_label);
    let _ = writeln!(
        svg.0,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn bounds(values: impl IntoIterator<Item = f64>) -> Option<(f64, f64)> {
    values.into_iter().fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

fn column_values(table: &Table, rows: &[usize], col: usize) -> Result<Vec<f64>, HarnessError> {
    let mut out = Vec::new();
    for &r in rows {
        if let Some(v) = table.number(r, col)? {
            out.push(v);
        }
    }
    Ok(out)
}

fn heat_color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let mix = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(255.0, 178.0), mix(255.0, 24.0), mix(255.0, 43.0))
}

fn distinct_sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn heatmap(table: &Table, opts: &PlotOptions) -> Result<String, HarnessError> {
    let xn = opts.x.as_deref().unwrap_or("h");
    let yn = opts.y.as_deref().unwrap_or("w");
    let vn = opts.value.as_deref().unwrap_or("bias");
    let cols = table.require(PlotKind::Heatmap, &[xn, yn, vn])?;
    let (rows, est) = table.selected_rows(opts.estimator.as_deref());
    let mut cells: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    let mut coords = Vec::new();
    for &r in &rows {
        let (Some(x), Some(y)) = (table.number(r, cols[0])?, table.number(r, cols[1])?) else {
            continue;
        };
        coords.push((x, y, table.number(r, cols[2])?));
    }
    let xs = distinct_sorted(&coords.iter().map(|c| c.0).collect::<Vec<_>>());
    let ys = distinct_sorted(&coords.iter().map(|c| c.1).collect::<Vec<_>>());
    for &(x, y, v) in &coords {
        let key = (xs.iter().position(|&a| a == x).unwrap(), ys.iter().position(|&b| b == y).unwrap());
        let e = cells.entry(key).or_insert((0.0, 0));
        if let Some(v) = v {
            e.0 += v;
            e.1 += 1;
        }
    }
    let max = cells.values().filter(|c| c.1 > 0).map(|c| c.0 / c.1 as f64).fold(0.0, f64::max);

    let title = opts.title.clone().unwrap_or_else(|| match &est {
        Some(e) => format!("{vn} of {e}"),
        None => vn.to_string(),
    });
    let mut svg = Svg::new(&title);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let cw = (x1 - x0) / xs.len().max(1) as f64;
    let ch = (y0 - y1) / ys.len().max(1) as f64;
    for (&(i, j), &(sum, n)) in &cells {
        let x = x0 + i as f64 * cw;
        let y = y0 - (j + 1) as f64 * ch;
        if n == 0 {
            svg.rect(x, y, cw, ch, "#dddddd", "white");
            svg.text(x + cw / 2.0, y + ch / 2.0 + 4.0, "middle", "n/a");
        } else {
            let v = sum / n as f64;
            let t = if max > 0.0 { v / max } else { 0.0 };
            svg.rect(x, y, cw, ch, &heat_color(t), "white");
            svg.text(x + cw / 2.0, y + ch / 2.0 + 4.0, "middle", &format!("{v:.3}"));
        }
    }
    svg.line(x0, y0, x1, y0, "black", "");
    svg.line(x0, y0, x0, y1, "black", "");
    for (i, x) in xs.iter().enumerate() {
        svg.text(x0 + (i as f64 + 0.5) * cw, y0 + 18.0, "middle", &super::format::fmt_g(*x));
    }
    for (j, y) in ys.iter().enumerate() {
        svg.text(x0 - 7.0, y0 - (j as f64 + 0.5) * ch + 4.0, "end", &super::format::fmt_g(*y));
    }
    svg.text((x0 + x1) / 2.0, HEIGHT - 12.0, "middle", xn);
    let _ = writeln!(
        svg.0,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(yn)
    );
    Ok(svg.finish())
}

fn truth_value(table: &Table, rows: &[usize]) -> Result<Option<f64>, HarnessError> {
    match table.find("truth") {
        Some(c) => Ok(column_values(table, rows, c)?.first().copied()),
        None => Ok(None),
    }
}

fn histogram(table: &Table, opts: &PlotOptions) -> Result<String, HarnessError> {
    let vn = opts.value.as_deref().unwrap_or("value");
    let col = table.require(PlotKind::Histogram, &[vn])?[0];
    let (rows, est) = table.selected_rows(opts.estimator.as_deref());
    let values = column_values(table, &rows, col)?;
    let truth = truth_value(table, &rows)?;
    let Some((mut lo, mut hi)) = bounds(values.iter().copied()) else {
        return Err(HarnessError::Data("histogram: no numeric values".into()));
    };
    if let Some(t) = truth {
        lo = lo.min(t);
        hi = hi.max(t);
    }
    let xs = Scale::new(lo, hi, LEFT, WIDTH - RIGHT);
    let bins = opts.bins.max(1);
    let width = (xs.hi - xs.lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in &values {
        let b = (((v - xs.lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let top = *counts.iter().max().unwrap_or(&1) as f64;
    let ys = Scale::new(0.0, top, HEIGHT - BOTTOM, TOP);

    let title = opts.title.clone().unwrap_or_else(|| format!("{} estimates", est.as_deref().unwrap_or(vn)));
    let mut svg = Svg::new(&title);
    for (b, &c) in counts.iter().enumerate() {
        let xa = xs.at(xs.lo + b as f64 * width);
        let xb = xs.at(xs.lo + (b + 1) as f64 * width);
        let y = ys.at(c as f64);
        svg.rect(xa, y, xb - xa, ys.at(0.0) - y, "#9ecae1", "#3182bd");
    }
    if let Some(t) = truth {
        svg.line(xs.at(t), HEIGHT - BOTTOM, xs.at(t), TOP, "#d62728", r#" stroke-width="2" stroke-dasharray="6 4""#);
    }
    axes(&mut svg, Some(&xs), &ys, vn, "count");
    Ok(svg.finish())
}

/// Quantile with linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

struct BoxStats {
    median: f64,
    q1: f64,
    q3: f64,
    low: f64,
    high: f64,
    outliers: Vec<f64>,
}

fn box_stats(values: &[f64]) -> BoxStats {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let (q1, median, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
    let fence = 1.5 * (q3 - q1);
    let inside: Vec<f64> = v.iter().copied().filter(|&x| x >= q1 - fence && x <= q3 + fence).collect();
    BoxStats {
        median,
        q1,
        q3,
        low: inside.first().copied().unwrap_or(q1),
        high: inside.last().copied().unwrap_or(q3),
        outliers: v.into_iter().filter(|&x| x < q1 - fence || x > q3 + fence).collect(),
    }
}

fn boxplot(table: &Table, opts: &PlotOptions) -> Result<String, HarnessError> {
    let vn = opts.value.as_deref().unwrap_or("value");
    let col = table.require(PlotKind::Boxplot, &[vn])?[0];
    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    match table.find("estimator") {
        Some(ec) => {
            for (i, row) in table.rows.iter().enumerate() {
                let name = &row[ec];
                if opts.estimator.as_ref().is_some_and(|e| e != name) {
                    continue;
                }
                match groups.iter_mut().find(|(g, _)| g == name) {
                    Some((_, rows)) => rows.push(i),
                    None => groups.push((name.clone(), vec![i])),
                }
            }
        }
        None => groups.push((vn.to_string(), (0..table.rows.len()).collect())),
    }
    let mut stats = Vec::new();
    for (name, rows) in &groups {
        let values = column_values(table, rows, col)?;
        if !values.is_empty() {
            stats.push((name.clone(), box_stats(&values)));
        }
    }
    if stats.is_empty() {
        return Err(HarnessError::Data("boxplot: no numeric values".into()));
    }
    let all_rows: Vec<usize> = groups.iter().flat_map(|(_, r)| r.iter().copied()).collect();
    let truth = truth_value(table, &all_rows)?;
    let extremes =
        stats.iter().flat_map(|(_, s)| [s.low, s.high].into_iter().chain(s.outliers.iter().copied())).chain(truth);
    let (lo, hi) = bounds(extremes).expect("non-empty");
    let ys = Scale::new(lo, hi, HEIGHT - BOTTOM, TOP);

    let mut svg = Svg::new(opts.title.as_deref().unwrap_or("estimate distributions"));
    let slot = (WIDTH - RIGHT - LEFT) / stats.len() as f64;
    for (k, (name, s)) in stats.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let cx = LEFT + (k as f64 + 0.5) * slot;
        let half = (slot * 0.3).min(40.0);
        svg.line(cx, ys.at(s.low), cx, ys.at(s.q1), "black", "");
        svg.line(cx, ys.at(s.q3), cx, ys.at(s.high), "black", "");
        svg.line(cx - half / 2.0, ys.at(s.low), cx + half / 2.0, ys.at(s.low), "black", "");
        svg.line(cx - half / 2.0, ys.at(s.high), cx + half / 2.0, ys.at(s.high), "black", "");
        svg.rect(cx - half, ys.at(s.q3), 2.0 * half, ys.at(s.q1) - ys.at(s.q3), color, "black");
        svg.line(cx - half, ys.at(s.median), cx + half, ys.at(s.median), "black", r#" stroke-width="2""#);
        for &o in &s.outliers {
            svg.circle(cx, ys.at(o), 2.5, "black");
        }
        svg.text(cx, HEIGHT - BOTTOM + 18.0, "middle", name);
    }
    if let Some(t) = truth {
        svg.line(LEFT, ys.at(t), WIDTH - RIGHT, ys.at(t), "#d62728", r#" stroke-dasharray="6 4""#);
    }
    axes(&mut svg, None, &ys, "estimator", vn);
    Ok(svg.finish())
}

/// Sort key that orders floats numerically.
fn order_key(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

/// Per-x running sums `(x, Σy, count)` keyed by the x ordering key.
type Sums = BTreeMap<u64, (f64, f64, usize)>;

fn line(table: &Table, opts: &PlotOptions) -> Result<String, HarnessError> {
    let xn = opts.x.as_deref().unwrap_or("p_diff");
    let yn = opts.y.as_deref().unwrap_or("mean");
    let cols = table.require(PlotKind::Line, &[xn, yn])?;
    let est_col = table.find("estimator");
    let truth_col = table.find("truth");
    let mut series: Vec<(String, Sums)> = Vec::new();
    let mut truth_pts: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    for r in 0..table.rows.len() {
        let name = est_col.map_or_else(|| yn.to_string(), |c| table.rows[r][c].clone());
        if opts.estimator.as_ref().is_some_and(|e| *e != name) {
            continue;
        }
        let (Some(x), Some(y)) = (table.number(r, cols[0])?, table.number(r, cols[1])?) else {
            continue;
        };
        let key = order_key(x);
        let idx = match series.iter().position(|(n, _)| *n == name) {
            Some(i) => i,
            None => {
                series.push((name, BTreeMap::new()));
                series.len() - 1
            }
        };
        let e = series[idx].1.entry(key).or_insert((x, 0.0, 0));
        e.1 += y;
        e.2 += 1;
        if idx == 0 {
            if let Some(t) = truth_col.map(|c| table.number(r, c)).transpose()?.flatten() {
                truth_pts.entry(key).or_insert((x, t));
            }
        }
    }
    let points: Vec<(String, Vec<(f64, f64)>)> =
        series.into_iter().map(|(n, m)| (n, m.into_values().map(|(x, s, c)| (x, s / c as f64)).collect())).collect();
    let (xlo, xhi) = bounds(points.iter().flat_map(|(_, p)| p.iter().map(|q| q.0)))
        .ok_or_else(|| HarnessError::Data("line: no numeric points".into()))?;
    let (ylo, yhi) =
        bounds(points.iter().flat_map(|(_, p)| p.iter().map(|q| q.1)).chain(truth_pts.values().map(|p| p.1)))
            .expect("non-empty");
    let xs = Scale::new(xlo, xhi, LEFT, WIDTH - RIGHT);
    let ys = Scale::new(ylo, yhi, HEIGHT - BOTTOM, TOP);

    let mut svg = Svg::new(opts.title.as_deref().unwrap_or(&format!("{yn} vs {xn}")));
    if !truth_pts.is_empty() {
        let pts: Vec<(f64, f64)> = truth_pts.values().map(|&(x, t)| (xs.at(x), ys.at(t))).collect();
        svg.polyline(&pts, "#7f7f7f", r#" stroke-dasharray="6 4""#);
    }
    for (k, (name, pts)) in points.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let px: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (xs.at(x), ys.at(y))).collect();
        svg.polyline(&px, color, "");
        for &(x, y) in &px {
            svg.circle(x, y, 3.0, color);
        }
        let ly = TOP + 14.0 * k as f64;
        svg.line(WIDTH - RIGHT - 110.0, ly, WIDTH - RIGHT - 90.0, ly, color, r#" stroke-width="2""#);
        svg.text(WIDTH - RIGHT - 85.0, ly + 4.0, "start", name);
    }
    axes(&mut svg, Some(&xs), &ys, xn, yn);
    Ok(svg.finish())
}
