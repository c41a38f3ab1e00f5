//! Deterministic SVG heatmaps from grid CSV files.

use std::collections::BTreeSet;

use crate::error::{MesoError, Result};

/// Color mapping for cell values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Palette {
    /// Symmetric about zero: red for negative, blue for positive.
    Diverging,
    /// White-to-blue over the value range.
    Sequential,
}

const CELL: f64 = 18.0;
const MARGIN_LEFT: f64 = 54.0;
const MARGIN_BOTTOM: f64 = 40.0;
const MARGIN_TOP: f64 = 14.0;
const MARGIN_RIGHT: f64 = 14.0;

const NEG: (f64, f64, f64) = (178.0, 24.0, 43.0);
const MID: (f64, f64, f64) = (247.0, 247.0, 247.0);
const POS: (f64, f64, f64) = (33.0, 102.0, 172.0);

fn lerp(a: (f64, f64, f64), b: (f64, f64, f64), t: f64) -> String {
    let ch = |x: f64, y: f64| (x + (y - x) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", ch(a.0, b.0), ch(a.1, b.1), ch(a.2, b.2))
}

fn color(palette: Palette, value: f64, min: f64, max: f64) -> String {
    match palette {
        Palette::Diverging => {
            let scale = min.abs().max(max.abs());
            if scale == 0.0 {
                return lerp(MID, MID, 0.0);
            }
            let t = (value / scale).clamp(-1.0, 1.0);
            if t < 0.0 {
                lerp(MID, NEG, -t)
            } else {
                lerp(MID, POS, t)
            }
        }
        Palette::Sequential => {
            let span = max - min;
            let t = if span == 0.0 { 0.0 } else { (value - min) / span };
            lerp(MID, POS, t.clamp(0.0, 1.0))
        }
    }
}

struct ParsedGrid {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<f64>, // indexed yi * nx + xi
    x_name: String,
    y_name: String,
    value_name: String,
}

/// Bit pattern key so float coordinates can be grouped exactly.
fn key(v: f64) -> u64 {
    v.to_bits()
}

fn parse_grid(csv_text: &str, value_column: &str) -> Result<ParsedGrid> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(csv_text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| MesoError::InvalidInput(format!("bad CSV header: {e}")))?
        .clone();
    if headers.len() < 3 {
        return Err(MesoError::InvalidInput(
            "grid CSV needs x, y and at least one value column".into(),
        ));
    }
    let value_idx = headers
        .iter()
        .position(|h| h == value_column)
        .ok_or_else(|| {
            MesoError::InvalidInput(format!("no column named `{value_column}` in the grid CSV"))
        })?;
    if value_idx < 2 {
        return Err(MesoError::InvalidInput(
            "the value column cannot be one of the two axis columns".into(),
        ));
    }
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| MesoError::InvalidInput(format!("bad CSV row: {e}")))?;
        let parse = |idx: usize| -> Result<f64> {
            record
                .get(idx)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| MesoError::InvalidInput(format!("non-numeric field `{record:?}`")))
        };
        rows.push((parse(0)?, parse(1)?, parse(value_idx)?));
    }
    if rows.is_empty() {
        return Err(MesoError::InvalidInput("empty grid CSV".into()));
    }
    let xs_set: BTreeSet<u64> = rows.iter().map(|r| key(r.0)).collect();
    let ys_set: BTreeSet<u64> = rows.iter().map(|r| key(r.1)).collect();
    let mut xs: Vec<f64> = xs_set.iter().map(|&b| f64::from_bits(b)).collect();
    let mut ys: Vec<f64> = ys_set.iter().map(|&b| f64::from_bits(b)).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite axis values"));
    ys.sort_by(|a, b| a.partial_cmp(b).expect("finite axis values"));
    if rows.len() != xs.len() * ys.len() {
        return Err(MesoError::InvalidInput(format!(
            "ragged grid: {} rows for a {} x {} axis product",
            rows.len(),
            xs.len(),
            ys.len()
        )));
    }
    let xi_of = |x: f64| xs.iter().position(|&v| v == x).expect("axis member");
    let yi_of = |y: f64| ys.iter().position(|&v| v == y).expect("axis member");
    let mut values = vec![f64::NAN; xs.len() * ys.len()];
    let mut filled = vec![false; values.len()];
    for (x, y, v) in rows {
        let idx = yi_of(y) * xs.len() + xi_of(x);
        if filled[idx] {
            return Err(MesoError::InvalidInput(format!(
                "ragged grid: duplicate cell at ({x}, {y})"
            )));
        }
        filled[idx] = true;
        values[idx] = v;
    }
    if !filled.iter().all(|&f| f) {
        return Err(MesoError::InvalidInput("ragged grid: missing cells".into()));
    }
    Ok(ParsedGrid {
        xs,
        ys,
        values,
        x_name: headers.get(0).unwrap_or("x").to_string(),
        y_name: headers.get(1).unwrap_or("y").to_string(),
        value_name: headers.get(value_idx).unwrap_or("value").to_string(),
    })
}

fn parse_points(csv_text: &str) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(csv_text.as_bytes());
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| MesoError::InvalidInput(format!("bad CSV row: {e}")))?;
        let parse = |idx: usize| -> Result<f64> {
            record
                .get(idx)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| MesoError::InvalidInput(format!("non-numeric field `{record:?}`")))
        };
        points.push((parse(0)?, parse(1)?));
    }
    Ok(points)
}

/// Renders a grid CSV (as produced by the scan drivers) to an SVG heatmap.
///
/// The first two CSV columns are the x and y coordinates; `value_column`
/// names the column to color. `boundary_csv`, when given, is a two-column
/// CSV of points drawn as a dashed polyline over the cells. Output bytes
/// are deterministic for fixed input.
pub fn emit_heatmap(
    grid_csv: &str,
    value_column: &str,
    palette: Palette,
    boundary_csv: Option<&str>,
) -> Result<String> {
    let grid = parse_grid(grid_csv, value_column)?;
    let nx = grid.xs.len();
    let ny = grid.ys.len();
    let plot_w = nx as f64 * CELL;
    let plot_h = ny as f64 * CELL;
    let width = MARGIN_LEFT + plot_w + MARGIN_RIGHT;
    let height = MARGIN_TOP + plot_h + MARGIN_BOTTOM;
    let min = grid.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = grid
        .values
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    ));
    svg.push_str(&format!(
        "<title>{} over ({}, {})</title>\n",
        grid.value_name, grid.x_name, grid.y_name
    ));
    // Cells: y axis grows upward, so row yi sits at the bottom for yi = 0.
    for yi in 0..ny {
        for xi in 0..nx {
            let v = grid.values[yi * nx + xi];
            let fill = color(palette, v, min, max);
            let x = MARGIN_LEFT + xi as f64 * CELL;
            let y = MARGIN_TOP + (ny - 1 - yi) as f64 * CELL;
            svg.push_str(&format!(
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{CELL:.2}\" height=\"{CELL:.2}\" \
                 fill=\"{fill}\"/>\n"
            ));
        }
    }
    // Data-to-pixel mapping treats each cell as centered on its coordinate.
    let dx = if nx > 1 {
        grid.xs[1] - grid.xs[0]
    } else {
        1.0
    };
    let dy = if ny > 1 {
        grid.ys[1] - grid.ys[0]
    } else {
        1.0
    };
    let x0 = grid.xs[0] - dx / 2.0;
    let x1 = grid.xs[nx - 1] + dx / 2.0;
    let y0 = grid.ys[0] - dy / 2.0;
    let y1 = grid.ys[ny - 1] + dy / 2.0;
    if let Some(boundary) = boundary_csv {
        let points = parse_points(boundary)?;
        let mapped: Vec<String> = points
            .iter()
            .filter(|&&(x, y)| x >= x0 && x <= x1 && y >= y0 && y <= y1)
            .map(|&(x, y)| {
                let px = MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
                let py = MARGIN_TOP + (1.0 - (y - y0) / (y1 - y0)) * plot_h;
                format!("{px:.2},{py:.2}")
            })
            .collect();
        if !mapped.is_empty() {
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" \
                 stroke-width=\"1.5\" stroke-dasharray=\"5,3\"/>\n",
                mapped.join(" ")
            ));
        }
    }
    // Minimal axis annotation: names and range ticks.
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        MARGIN_TOP + plot_h + 30.0,
        grid.x_name
    ));
    svg.push_str(&format!(
        "<text x=\"12\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\" \
         transform=\"rotate(-90 12 {:.2})\">{}</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        grid.y_name
    ));
    for (value, px) in [(grid.xs[0], MARGIN_LEFT + CELL / 2.0), (
        grid.xs[nx - 1],
        MARGIN_LEFT + plot_w - CELL / 2.0,
    )] {
        svg.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"9\" text-anchor=\"middle\">{value}</text>\n",
            MARGIN_TOP + plot_h + 12.0
        ));
    }
    for (value, py) in [(grid.ys[0], MARGIN_TOP + plot_h - CELL / 2.0), (
        grid.ys[ny - 1],
        MARGIN_TOP + CELL / 2.0,
    )] {
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{py:.2}\" font-size=\"9\" text-anchor=\"end\">{value}</text>\n",
            MARGIN_LEFT - 4.0
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: &str = "# seed=1\nx,y,value\n0,0,-1\n1,0,1\n0,1,1\n1,1,-1\n";

    #[test]
    fn minimal_grid_renders_extremes() {
        let svg = emit_heatmap(GRID, "value", Palette::Diverging, None).unwrap();
        assert_eq!(svg.matches("<rect").count(), 4);
        assert!(svg.contains("#b2182b"), "negative extreme color");
        assert!(svg.contains("#2166ac"), "positive extreme color");
    }

    #[test]
    fn boundary_becomes_a_polyline() {
        let boundary = "x,y\n0,0\n1,1\n";
        let svg = emit_heatmap(GRID, "value", Palette::Diverging, Some(boundary)).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
    }

    #[test]
    fn empty_and_ragged_inputs_fail() {
        assert!(emit_heatmap("x,y,value\n", "value", Palette::Diverging, None).is_err());
        let ragged = "x,y,value\n0,0,1\n1,0,2\n0,1,3\n";
        assert!(emit_heatmap(ragged, "value", Palette::Diverging, None).is_err());
        let missing = "x,y,value\n0,0,1\n";
        assert!(emit_heatmap(missing, "other", Palette::Diverging, None).is_err());
    }

    #[test]
    fn deterministic_bytes() {
        let a = emit_heatmap(GRID, "value", Palette::Sequential, None).unwrap();
        let b = emit_heatmap(GRID, "value", Palette::Sequential, None).unwrap();
        assert_eq!(a, b);
    }
}
