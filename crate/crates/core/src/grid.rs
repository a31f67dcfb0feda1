//! Uniform 2D grids anchored so that the origin is a node, and sampled
//! functions on them.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Node `(i, j)` sits at `((i + i0) h, (j + j0) h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub h: f64,
    pub i0: i64,
    pub j0: i64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    /// Smallest origin-anchored grid covering `[x_min, x_max] × [y_min, y_max]`
    /// with `pad` extra layers on every side.
    pub fn covering(h: f64, x_min: f64, x_max: f64, y_min: f64, y_max: f64, pad: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(LabError::Precondition(format!("grid spacing must be positive, got {h}")));
        }
        let pad = pad as i64;
        let i_lo = (x_min / h).floor() as i64 - pad;
        let i_hi = (x_max / h).ceil() as i64 + pad;
        let j_lo = (y_min / h).floor() as i64 - pad;
        let j_hi = (y_max / h).ceil() as i64 + pad;
        Ok(Self {
            h,
            i0: i_lo,
            j0: j_lo,
            nx: (i_hi - i_lo + 1) as usize,
            ny: (j_hi - j_lo + 1) as usize,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.ij(idx);
        [(i as i64 + self.i0) as f64 * self.h, (j as i64 + self.j0) as f64 * self.h]
    }

    /// Index of the node `(i, j) + (di, dj)` if it is on the grid.
    pub fn offset(&self, idx: usize, di: i64, dj: i64) -> Option<usize> {
        let (i, j) = self.ij(idx);
        let (a, b) = (i as i64 + di, j as i64 + dj);
        if a < 0 || b < 0 || a >= self.nx as i64 || b >= self.ny as i64 {
            None
        } else {
            Some(self.idx(a as usize, b as usize))
        }
    }

    /// Node located at `p`, if `p` is (within 1e-9 h) a grid node.
    pub fn node_at(&self, p: [f64; 2]) -> Option<usize> {
        let fi = p[0] / self.h - self.i0 as f64;
        let fj = p[1] / self.h - self.j0 as f64;
        let (ri, rj) = (fi.round(), fj.round());
        if (fi - ri).abs() > 1e-9 || (fj - rj).abs() > 1e-9 || ri < 0.0 || rj < 0.0 {
            return None;
        }
        let (i, j) = (ri as usize, rj as usize);
        (i < self.nx && j < self.ny).then(|| self.idx(i, j))
    }

    pub fn origin(&self) -> Option<usize> {
        self.node_at([0.0, 0.0])
    }

    pub fn bbox(&self) -> [f64; 4] {
        let h = self.h;
        [
            self.i0 as f64 * h,
            (self.i0 + self.nx as i64 - 1) as f64 * h,
            self.j0 as f64 * h,
            (self.j0 + self.ny as i64 - 1) as f64 * h,
        ]
    }
}

/// Values on every grid node; `NaN` marks nodes carrying no value.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn nan(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![f64::NAN; grid.len()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn<F: Fn([f64; 2]) -> f64>(grid: Grid, f: F) -> Self {
        Self {
            grid,
            values: (0..grid.len()).map(|k| f(grid.point(k))).collect(),
        }
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn at(&self, p: [f64; 2]) -> Option<f64> {
        self.grid.node_at(p).map(|k| self.values[k]).filter(|v| v.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Bilinear interpolation at `p`; `None` if `p` is off the grid or any
    /// corner of its cell carries no value.
    pub fn bilinear(&self, p: [f64; 2]) -> Option<f64> {
        let g = &self.grid;
        let fi = p[0] / g.h - g.i0 as f64;
        let fj = p[1] / g.h - g.j0 as f64;
        if !(fi >= 0.0 && fj >= 0.0) || fi > (g.nx - 1) as f64 || fj > (g.ny - 1) as f64 {
            return None;
        }
        let i = (fi.floor() as usize).min(g.nx.saturating_sub(2));
        let j = (fj.floor() as usize).min(g.ny.saturating_sub(2));
        let (s, t) = (fi - i as f64, fj - j as f64);
        let corner = |a: usize, b: usize, w: f64| -> Option<f64> {
            if w == 0.0 {
                return Some(0.0);
            }
            let v = self.values[g.idx(a, b)];
            v.is_finite().then_some(w * v)
        };
        Some(
            corner(i, j, (1.0 - s) * (1.0 - t))?
                + corner(i + 1, j, s * (1.0 - t))?
                + corner(i, j + 1, (1.0 - s) * t)?
                + corner(i + 1, j + 1, s * t)?,
        )
    }
}
