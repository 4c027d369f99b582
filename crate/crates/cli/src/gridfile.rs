//! The on-disk grid format: `#`-prefixed key=value headers describing the
//! domain, then row-major comma-separated values, one grid row per line.
//!
//! ```text
//! # dim=2
//! # cells=50,50
//! # extent=1.0000000000000000e0,1.0000000000000000e0
//! # command=mc
//! 1.0184000000000000e0,9.8760000000000001e-1,...
//! ...
//! ```
//!
//! Values are written with 17 significant digits, so emit -> parse -> emit
//! is byte-stable and parse recovers every f64 exactly.

use std::fs;
use std::path::Path;

use thermowalk_core::{DomainSpec, Error, FieldGrid, Result};

/// Format one value with 17 significant digits (exact f64 round trip).
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serialize a grid with extra metadata headers appended after the three
/// domain headers. Metadata values must not contain newlines.
pub fn to_string(grid: &FieldGrid, meta: &[(String, String)]) -> Result<String> {
    if !grid.all_finite() {
        return Err(Error::Numerical(String::from("refusing to write a non-finite grid")));
    }
    let dom = grid.domain();
    let [nx, ny] = dom.cells();
    let [ex, ey] = dom.extent();
    let mut out = String::new();
    out.push_str(&format!("# dim={}\n", dom.dim()));
    if dom.dim() == 1 {
        out.push_str(&format!("# cells={nx}\n"));
        out.push_str(&format!("# extent={}\n", format_value(ex)));
    } else {
        out.push_str(&format!("# cells={nx},{ny}\n"));
        out.push_str(&format!("# extent={},{}\n", format_value(ex), format_value(ey)));
    }
    for (k, v) in meta {
        if k.contains('\n') || v.contains('\n') || k.contains('=') {
            return Err(Error::Config(format!("bad metadata key/value: {k}")));
        }
        out.push_str(&format!("# {k}={v}\n"));
    }
    for iy in 0..ny {
        let row: Vec<String> =
            (0..nx).map(|ix| format_value(grid.get(ix, iy))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Parse a grid file; returns the grid and the non-domain metadata pairs
/// in file order.
pub fn from_str(text: &str) -> Result<(FieldGrid, Vec<(String, String)>)> {
    let mut dim: Option<usize> = None;
    let mut cells: Option<Vec<usize>> = None;
    let mut extent: Option<Vec<f64>> = None;
    let mut meta = Vec::new();
    let mut values = Vec::new();
    let mut rows = 0usize;
    let mut row_len: Option<usize> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            let (key, value) = rest
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: header without '='", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "dim" => {
                    let d: usize = value
                        .parse()
                        .map_err(|_| Error::Config(format!("bad dim value: {value}")))?;
                    if d != 1 && d != 2 {
                        return Err(Error::Config(format!("dim must be 1 or 2, got {d}")));
                    }
                    dim = Some(d);
                }
                "cells" => {
                    let parsed: std::result::Result<Vec<usize>, _> =
                        value.split(',').map(|s| s.trim().parse()).collect();
                    cells = Some(parsed.map_err(|_| {
                        Error::Config(format!("bad cells value: {value}"))
                    })?);
                }
                "extent" => {
                    let parsed: std::result::Result<Vec<f64>, _> =
                        value.split(',').map(|s| s.trim().parse()).collect();
                    extent = Some(parsed.map_err(|_| {
                        Error::Config(format!("bad extent value: {value}"))
                    })?);
                }
                _ => meta.push((key.to_string(), value.to_string())),
            }
            continue;
        }
        let mut count = 0usize;
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::Config(format!("line {}: bad value '{}'", lineno + 1, field.trim()))
            })?;
            if !v.is_finite() {
                return Err(Error::Config(format!("line {}: non-finite value", lineno + 1)));
            }
            values.push(v);
            count += 1;
        }
        match row_len {
            None => row_len = Some(count),
            Some(w) if w != count => {
                return Err(Error::Config(format!(
                    "line {}: row has {count} values, expected {w}",
                    lineno + 1
                )));
            }
            _ => {}
        }
        rows += 1;
    }

    let dim = dim.ok_or_else(|| Error::Config(String::from("missing dim header")))?;
    let cells = cells.ok_or_else(|| Error::Config(String::from("missing cells header")))?;
    let extent = extent.ok_or_else(|| Error::Config(String::from("missing extent header")))?;
    if cells.len() != dim || extent.len() != dim {
        return Err(Error::Config(String::from(
            "cells/extent headers do not match the declared dim",
        )));
    }
    let domain = if dim == 1 {
        DomainSpec::line(extent[0], cells[0])?
    } else {
        DomainSpec::rect(extent[0], extent[1], cells[0], cells[1])?
    };
    let expect_rows = if dim == 1 { 1 } else { cells[1] };
    if rows != expect_rows || row_len != Some(cells[0]) {
        return Err(Error::Config(format!(
            "body is {rows} rows of {} values, header declares {expect_rows} rows of {}",
            row_len.unwrap_or(0),
            cells[0]
        )));
    }
    let grid = FieldGrid::from_values(domain, values)?;
    Ok((grid, meta))
}

pub fn write(path: &Path, grid: &FieldGrid, meta: &[(String, String)]) -> Result<()> {
    let text = to_string(grid, meta)?;
    fs::write(path, text)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

pub fn read(path: &Path) -> Result<(FieldGrid, Vec<(String, String)>)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    from_str(&text)
}

/// Write the long-format plotting companion: one `x,y,value` row per cell.
pub fn write_plot_data(path: &Path, grid: &FieldGrid) -> Result<()> {
    let dom = grid.domain();
    let [nx, ny] = dom.cells();
    let mut out = String::from("x,y,value\n");
    for iy in 0..ny {
        for ix in 0..nx {
            let c = dom.cell_center(ix, iy);
            out.push_str(&format!(
                "{},{},{}\n",
                format_value(c[0]),
                format_value(c[1]),
                format_value(grid.get(ix, iy))
            ));
        }
    }
    fs::write(path, out)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}
