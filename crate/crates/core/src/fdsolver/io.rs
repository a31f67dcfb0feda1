use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::solve::SolveReport;
use crate::error::{LabError, Result};
use crate::grid::{Grid, GridFunction};
use crate::pucci::{Ellipticity, OpMode};

/// JSON header written next to a solution CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionHeader {
    pub h: f64,
    /// `[x_min, x_max, y_min, y_max]` of the stored grid.
    pub bbox: [f64; 4],
    pub mode: OpMode,
    pub ellipticity: Ellipticity,
    pub residual: f64,
    pub iterations: usize,
}

impl SolutionHeader {
    pub fn new(u: &GridFunction, mode: OpMode, e: Ellipticity, report: &SolveReport) -> Self {
        Self {
            h: u.grid.h,
            bbox: u.grid.bbox(),
            mode,
            ellipticity: e,
            residual: report.residual,
            iterations: report.iterations,
        }
    }
}

/// Writes `x,y,value` rows for every node carrying a value.
pub fn write_csv<W: Write>(u: &GridFunction, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["x", "y", "value"])?;
    for (k, v) in u.values.iter().enumerate() {
        if v.is_finite() {
            let p = u.grid.point(k);
            wr.write_record([p[0].to_string(), p[1].to_string(), v.to_string()])?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Reads `x,y,value` rows back onto an origin-anchored grid. The spacing is
/// taken from `h` or inferred as the smallest positive coordinate gap.
pub fn read_csv<R: Read>(r: R, h: Option<f64>) -> Result<GridFunction> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let mut rows: Vec<[f64; 3]> = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() < 3 {
            return Err(LabError::Parse("solution rows need x,y,value".into()));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| LabError::Parse(format!("bad number '{s}': {e}")));
        rows.push([parse(&rec[0])?, parse(&rec[1])?, parse(&rec[2])?]);
    }
    if rows.is_empty() {
        return Err(LabError::Parse("empty solution file".into()));
    }
    let h = match h {
        Some(h) => h,
        None => {
            let mut xs: Vec<f64> = rows.iter().flat_map(|r| [r[0], r[1]]).collect();
            xs.sort_by(f64::total_cmp);
            xs.windows(2)
                .map(|w| w[1] - w[0])
                .filter(|d| *d > 1e-12)
                .fold(f64::INFINITY, f64::min)
        }
    };
    if !h.is_finite() {
        return Err(LabError::Parse("cannot infer grid spacing from a single point".into()));
    }
    let bound = |i: usize, f: fn(f64, f64) -> f64, init: f64| rows.iter().map(|r| r[i]).fold(init, f);
    let grid = Grid::covering(
        h,
        bound(0, f64::min, f64::INFINITY),
        bound(0, f64::max, f64::NEG_INFINITY),
        bound(1, f64::min, f64::INFINITY),
        bound(1, f64::max, f64::NEG_INFINITY),
        0,
    )?;
    let mut u = GridFunction::nan(grid);
    for r in rows {
        let k = grid
            .node_at([r[0], r[1]])
            .ok_or_else(|| LabError::Parse(format!("point ({}, {}) is not on a grid of spacing {h}", r[0], r[1])))?;
        u.values[k] = r[2];
    }
    Ok(u)
}
