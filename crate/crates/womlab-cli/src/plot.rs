//! Renders a sweep CSV as a minimal SVG line chart. The output is built by
//! direct string assembly so identical input always yields identical bytes.
//!
//! Layout: 640x400 viewBox, plot area inset by 60/20/20/40 (left, right,
//! top, bottom). One polyline per output column; `NA` cells break a line
//! into segments, and stranded single points become small circles.

use std::fmt::Write as _;

use womlab::textio::parse_real;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 40.0;
const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
const TICKS: usize = 5;

/// Finite min/max of `values`, padded out when the range is degenerate so a
/// flat series still gets a usable axis.
fn padded_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        return None;
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    Some((lo, hi))
}

struct Table {
    x_name: String,
    series_names: Vec<String>,
    xs: Vec<f64>,
    /// One value column per series, aligned with `xs`; `NaN` marks a gap.
    series: Vec<Vec<f64>>,
}

fn parse_table(csv: &str) -> Result<Table, String> {
    let mut lines = csv.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = match lines.next() {
        Some(h) => h.split(',').map(str::trim).collect(),
        None => return Err("CSV is empty".into()),
    };
    if header.len() < 2 {
        return Err("CSV needs a variable column and at least one output column".into());
    }
    let y_cols: Vec<usize> = (1..header.len())
        .filter(|&i| header[i] != "status")
        .collect();
    if y_cols.is_empty() {
        return Err("CSV has no output columns to plot".into());
    }
    let mut xs = Vec::new();
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); y_cols.len()];
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(format!(
                "row {row} has {} cells, expected {}",
                cells.len(),
                header.len()
            ));
        }
        let x = parse_real(cells[0])
            .ok_or_else(|| format!("row {row}: cannot parse {:?} as a number", cells[0]))?;
        if x.is_nan() {
            return Err(format!("row {row}: the {} column cannot be NA", header[0]));
        }
        xs.push(x);
        for (j, &col) in y_cols.iter().enumerate() {
            let v = parse_real(cells[col])
                .ok_or_else(|| format!("row {row}: cannot parse {:?} as a number", cells[col]))?;
            series[j].push(v);
        }
    }
    if xs.is_empty() {
        return Err("CSV has a header but no data rows".into());
    }
    Ok(Table {
        x_name: header[0].to_string(),
        series_names: y_cols.iter().map(|&i| header[i].to_string()).collect(),
        xs,
        series,
    })
}

/// Renders a chart for a CSV produced by `womlab sweep` (or anything with the
/// same shape: one x column, numeric output columns, optional `status`).
pub fn render_svg(csv: &str) -> Result<String, String> {
    let table = parse_table(csv)?;
    let (x_lo, x_hi) = padded_range(table.xs.iter().copied())
        .ok_or_else(|| format!("the {} column has no finite values", table.x_name))?;
    let (y_lo, y_hi) = padded_range(table.series.iter().flatten().copied())
        .ok_or_else(|| "no output column has a finite value to plot".to_string())?;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| HEIGHT - BOTTOM - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\" \
         font-family=\"sans-serif\" font-size=\"11\">"
    );
    let _ = writeln!(
        svg,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{LEFT:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
        HEIGHT - BOTTOM,
        WIDTH - RIGHT,
        HEIGHT - BOTTOM
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{LEFT:.2}\" y1=\"{TOP:.2}\" x2=\"{LEFT:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
        HEIGHT - BOTTOM
    );

    for i in 0..TICKS {
        let f = i as f64 / (TICKS - 1) as f64;
        let xv = x_lo + f * (x_hi - x_lo);
        let yv = y_lo + f * (y_hi - y_lo);
        let _ = writeln!(
            svg,
            "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" stroke=\"black\"/>",
            sx(xv),
            HEIGHT - BOTTOM,
            HEIGHT - BOTTOM + 4.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{:.6}</text>",
            sx(xv),
            HEIGHT - BOTTOM + 16.0,
            xv
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{0:.2}\" y1=\"{2:.2}\" x2=\"{1:.2}\" y2=\"{2:.2}\" stroke=\"black\"/>",
            LEFT - 4.0,
            LEFT,
            sy(yv)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{:.6}</text>",
            LEFT - 8.0,
            sy(yv) + 4.0,
            yv
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        LEFT + plot_w / 2.0,
        HEIGHT - 8.0,
        table.x_name
    );

    for (j, values) in table.series.iter().enumerate() {
        let color = PALETTE[j % PALETTE.len()];
        // Split the series into runs of finite points; NA gaps end a run.
        let mut run: Vec<(f64, f64)> = Vec::new();
        let flush = |run: &mut Vec<(f64, f64)>, svg: &mut String| {
            if run.len() >= 2 {
                let pts: Vec<String> = run
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                    .collect();
                let _ = writeln!(
                    svg,
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                    pts.join(" ")
                );
            } else if run.len() == 1 {
                let _ = writeln!(
                    svg,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{color}\"/>",
                    sx(run[0].0),
                    sy(run[0].1)
                );
            }
            run.clear();
        };
        for (&x, &y) in table.xs.iter().zip(values) {
            if y.is_finite() {
                run.push((x, y));
            } else {
                flush(&mut run, &mut svg);
            }
        }
        flush(&mut run, &mut svg);

        let ly = TOP + 10.0 + 16.0 * j as f64;
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" \
             stroke=\"{color}\" stroke-width=\"1.5\"/>",
            WIDTH - RIGHT - 140.0,
            WIDTH - RIGHT - 116.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            WIDTH - RIGHT - 110.0,
            ly + 4.0,
            table.series_names[j]
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
