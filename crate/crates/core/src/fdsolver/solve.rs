use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::domain::{Arm, Discretization, GridDomain, Part, Target};
use crate::error::{LabError, Result};
use crate::grid::GridFunction;
use crate::pucci::{combine_pairs, Ellipticity, OpMode, StencilSet};

type BoundaryFn = dyn Fn([f64; 2], Part) -> f64 + Send + Sync;

/// Dirichlet data `g` on the boundary.
#[derive(Clone)]
pub enum BoundaryData {
    /// `g(x) = c + a·x`.
    Linear { c: f64, a: [f64; 2] },
    /// Constant on each boundary part.
    Parts { flat: f64, curved: f64, top: f64, side: f64 },
    Function(Arc<BoundaryFn>),
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryData::Linear { c, a } => write!(f, "Linear {{ c: {c}, a: {a:?} }}"),
            BoundaryData::Parts { flat, curved, top, side } => {
                write!(f, "Parts {{ flat: {flat}, curved: {curved}, top: {top}, side: {side} }}")
            }
            BoundaryData::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl BoundaryData {
    pub fn constant(c: f64) -> Self {
        BoundaryData::Linear { c, a: [0.0, 0.0] }
    }

    /// `g = y`.
    pub fn linear_y() -> Self {
        BoundaryData::Linear { c: 0.0, a: [0.0, 1.0] }
    }

    /// `0` on the flat part (or graph) and the half-cube sides, `1` on the
    /// curved part and the half-cube top.
    pub fn zero_one() -> Self {
        BoundaryData::Parts {
            flat: 0.0,
            curved: 1.0,
            top: 1.0,
            side: 0.0,
        }
    }

    pub fn function<F: Fn([f64; 2], Part) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        BoundaryData::Function(Arc::new(f))
    }

    /// Parses `linear-y`, `zero-one`, `constant:<c>` or `linear:<c>,<a1>,<a2>`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let s = spec.trim().to_ascii_lowercase().replace('_', "-");
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.to_string(), Some(a.to_string())),
            None => (s.clone(), None),
        };
        let nums = |a: &Option<String>| -> Result<Vec<f64>> {
            a.as_deref()
                .unwrap_or("")
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| LabError::Parse(format!("bad boundary spec '{spec}': {e}"))))
                .collect()
        };
        match head.as_str() {
            "linear-y" | "y" => Ok(Self::linear_y()),
            "zero-one" | "barrier" => Ok(Self::zero_one()),
            "zero" => Ok(Self::constant(0.0)),
            "constant" => {
                let v = nums(&arg)?;
                match v.as_slice() {
                    [c] => Ok(Self::constant(*c)),
                    _ => Err(LabError::Parse(format!("constant needs one value: '{spec}'"))),
                }
            }
            "linear" => {
                let v = nums(&arg)?;
                match v.as_slice() {
                    [c, a1, a2] => Ok(BoundaryData::Linear { c: *c, a: [*a1, *a2] }),
                    _ => Err(LabError::Parse(format!("linear needs c,a1,a2: '{spec}'"))),
                }
            }
            other => Err(LabError::Parse(format!("unknown boundary data '{other}'"))),
        }
    }

    pub fn eval(&self, p: [f64; 2], part: Part) -> f64 {
        match self {
            BoundaryData::Linear { c, a } => c + a[0] * p[0] + a[1] * p[1],
            BoundaryData::Parts { flat, curved, top, side } => match part {
                Part::Flat => *flat,
                Part::Curved => *curved,
                Part::Top => *top,
                Part::Side => *side,
            },
            BoundaryData::Function(f) => f(p, part),
        }
    }

    /// Multiplies the data by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            BoundaryData::Linear { c: c0, a } => BoundaryData::Linear {
                c: c * c0,
                a: [c * a[0], c * a[1]],
            },
            BoundaryData::Parts { flat, curved, top, side } => BoundaryData::Parts {
                flat: c * flat,
                curved: c * curved,
                top: c * top,
                side: c * side,
            },
            BoundaryData::Function(f) => {
                let f = f.clone();
                BoundaryData::Function(Arc::new(move |p, part| c * f(p, part)))
            }
        }
    }
}

/// Default cap on the number of sweeps.
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Default tolerance relative to the data scale.
pub const DEFAULT_REL_TOL: f64 = 1e-8;
/// Sweeps without a new best residual before over-relaxation is damped.
const STALL_SWEEPS: usize = 200;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Absolute tolerance; `None` means `1e-8 × data scale`.
    pub tol: Option<f64>,
    pub max_iter: usize,
    /// Over-relaxation factor in `[1, 2)`; `None` picks one from `h`.
    pub omega: Option<f64>,
    /// Ignored in Laplace mode, which always uses the axis pair.
    pub stencil: StencilSet,
    pub initial: Option<GridFunction>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: None,
            max_iter: DEFAULT_MAX_ITER,
            omega: None,
            stencil: StencilSet::default(),
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// Largest one-point correction in the final sweep.
    pub residual: f64,
    pub tol: f64,
    pub omega: f64,
    pub history: Vec<f64>,
    pub nodes: usize,
}

/// A discretized Dirichlet problem: operator, right-hand side and boundary
/// values on one [`GridDomain`].
pub struct Problem<'a> {
    dom: &'a GridDomain,
    mode: OpMode,
    e: Ellipticity,
    disc: Discretization,
    /// Boundary value at each crossing.
    cross_vals: Vec<f64>,
    /// Right-hand side per inside node.
    rhs: Vec<f64>,
}

#[inline]
fn root_pair(sv: f64, cv: f64, sw: f64, cw: f64, f: f64, pos: f64, neg: f64) -> f64 {
    let (bv, bw) = (sv / cv, sw / cw);
    let (s_lo, c_lo, b_lo, s_hi, c_hi, b_hi) = if bv <= bw {
        (sv, cv, bv, sw, cw, bw)
    } else {
        (sw, cw, bw, sv, cv, bv)
    };
    let g = |x: f64| if x >= 0.0 { pos * x } else { neg * x };
    // F(u) = G(s_lo − c_lo u) + G(s_hi − c_hi u) is decreasing with kinks at b_lo ≤ b_hi.
    let f_lo = g(s_hi - c_hi * b_lo);
    if f >= f_lo {
        return (pos * (s_lo + s_hi) - f) / (pos * (c_lo + c_hi));
    }
    let f_hi = g(s_lo - c_lo * b_hi);
    if f >= f_hi {
        (neg * s_lo + pos * s_hi - f) / (neg * c_lo + pos * c_hi)
    } else {
        (neg * (s_lo + s_hi) - f) / (neg * (c_lo + c_hi))
    }
}

impl<'a> Problem<'a> {
    pub fn new(
        dom: &'a GridDomain,
        mode: OpMode,
        e: Ellipticity,
        f: Option<&GridFunction>,
        g: &BoundaryData,
        stencil: &StencilSet,
    ) -> Result<Self> {
        let stencil = match mode {
            OpMode::Laplace => StencilSet::axis(),
            _ => stencil.clone(),
        };
        let disc = Discretization::new(dom, &stencil)?;
        let cross_vals: Vec<f64> = disc.crossings.iter().map(|c| g.eval(c.point, c.part)).collect();
        if let Some(bad) = cross_vals.iter().position(|v| !v.is_finite()) {
            return Err(LabError::Domain(format!(
                "boundary data not finite at {:?}",
                disc.crossings[bad].point
            )));
        }
        let rhs: Vec<f64> = match f {
            None => vec![0.0; dom.nodes.len()],
            Some(f) => {
                if f.grid != dom.grid {
                    return Err(LabError::Precondition("right-hand side lives on a different grid".into()));
                }
                let v: Vec<f64> = dom.nodes.iter().map(|&k| f.values[k]).collect();
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(LabError::Domain("right-hand side not finite at an inside node".into()));
                }
                v
            }
        };
        Ok(Self {
            dom,
            mode,
            e,
            disc,
            cross_vals,
            rhs,
        })
    }

    #[inline]
    fn value(&self, u: &[f64], arm: &Arm) -> f64 {
        match arm.target {
            Target::Node(n) => u[n],
            Target::Crossing(c) => self.cross_vals[c],
        }
    }

    /// `(S, C)` per direction so that the second difference is `S − C u₀`.
    #[inline]
    fn sc(&self, u: &[f64], i: usize, d: usize) -> (f64, f64) {
        let a = &self.disc.arms[i * self.disc.dirs.len() + d];
        (
            a.plus.coef * self.value(u, &a.plus) + a.minus.coef * self.value(u, &a.minus),
            a.plus.coef + a.minus.coef,
        )
    }

    /// Value of `u(node i)` that solves the nodal equation exactly.
    #[inline]
    fn local_solve(&self, u: &[f64], i: usize) -> f64 {
        let f = self.rhs[i];
        let npairs = self.disc.dirs.len() / 2;
        match self.mode {
            OpMode::Laplace => {
                let (sx, cx) = self.sc(u, i, 0);
                let (sy, cy) = self.sc(u, i, 1);
                (sx + sy - f / self.e.lambda) / (cx + cy)
            }
            OpMode::Sup | OpMode::Inf => {
                let (pos, neg) = match self.mode {
                    OpMode::Sup => (self.e.big_lambda, self.e.lambda),
                    _ => (self.e.lambda, self.e.big_lambda),
                };
                let mut best = if self.mode == OpMode::Sup { f64::NEG_INFINITY } else { f64::INFINITY };
                for p in 0..npairs {
                    let (sv, cv) = self.sc(u, i, 2 * p);
                    let (sw, cw) = self.sc(u, i, 2 * p + 1);
                    let r = root_pair(sv, cv, sw, cw, f, pos, neg);
                    best = if self.mode == OpMode::Sup { best.max(r) } else { best.min(r) };
                }
                best
            }
        }
    }

    /// Applies the discrete operator to `u` at every inside node; other nodes
    /// get `NaN`.
    pub fn apply(&self, u: &GridFunction) -> GridFunction {
        let mut out = GridFunction::nan(self.dom.grid);
        let npairs = self.disc.dirs.len() / 2;
        for (i, &k) in self.dom.nodes.iter().enumerate() {
            let u0 = u.values[k];
            let pairs = (0..npairs).map(|p| {
                let (sv, cv) = self.sc(&u.values, i, 2 * p);
                let (sw, cw) = self.sc(&u.values, i, 2 * p + 1);
                (sv - cv * u0, sw - cw * u0)
            });
            out.values[k] = combine_pairs(pairs, self.e, self.mode);
        }
        out
    }

    /// `max(|g|, |f| L² / λ)`, the size of the data the tolerance is relative to.
    pub fn data_scale(&self) -> f64 {
        let g = self.cross_vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let [x0, x1, y0, y1] = self.dom.shape.bbox();
        let l2 = (x1 - x0).max(y1 - y0).powi(2);
        let f = self.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs())) * l2 / self.e.lambda;
        let s = g.max(f);
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    fn auto_omega(&self) -> f64 {
        let [x0, x1, y0, y1] = self.dom.shape.bbox();
        let l = (x1 - x0).max(y1 - y0);
        let h = self.dom.grid.h;
        let aniso = match self.mode {
            OpMode::Laplace => 1.0,
            _ => (self.e.big_lambda / self.e.lambda).sqrt(),
        };
        (2.0 / (1.0 + std::f64::consts::PI * h * aniso / l)).clamp(1.0, 1.99)
    }

    pub fn solve(&self, opts: &SolveOptions) -> Result<(GridFunction, SolveReport)> {
        let tol = opts.tol.unwrap_or(DEFAULT_REL_TOL * self.data_scale());
        if !(tol > 0.0) {
            return Err(LabError::Precondition(format!("tolerance must be positive, got {tol}")));
        }
        let mut omega = opts.omega.unwrap_or_else(|| self.auto_omega());
        if !(1.0..2.0).contains(&omega) {
            return Err(LabError::Precondition(format!("relaxation factor must lie in [1, 2), got {omega}")));
        }
        let grid = self.dom.grid;
        let mut u = vec![0.0; grid.len()];
        if let Some(init) = &opts.initial {
            if init.grid != grid {
                return Err(LabError::Precondition("initial guess lives on a different grid".into()));
            }
            for &k in &self.dom.nodes {
                if init.values[k].is_finite() {
                    u[k] = init.values[k];
                }
            }
        }

        let n = self.dom.nodes.len();
        let mut history = Vec::new();
        let mut best = f64::INFINITY;
        let mut since_best = 0usize;
        for sweep in 0..opts.max_iter {
            let mut corr_max = 0.0f64;
            let mut visit = |i: usize, u: &mut Vec<f64>| {
                let k = self.dom.nodes[i];
                let corr = self.local_solve(u, i) - u[k];
                corr_max = corr_max.max(corr.abs());
                u[k] += omega * corr;
            };
            if sweep % 2 == 0 {
                (0..n).for_each(|i| visit(i, &mut u));
            } else {
                (0..n).rev().for_each(|i| visit(i, &mut u));
            }
            if !corr_max.is_finite() {
                return Err(LabError::Nonconvergence {
                    iterations: sweep + 1,
                    residual: corr_max,
                    history,
                });
            }
            history.push(corr_max);
            if corr_max <= tol {
                return Ok((
                    self.assemble(u),
                    SolveReport {
                        iterations: sweep + 1,
                        residual: corr_max,
                        tol,
                        omega,
                        history,
                        nodes: n,
                    },
                ));
            }
            if corr_max < best {
                best = corr_max;
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= STALL_SWEEPS && omega > 1.0 {
                    omega = 1.0 + 0.5 * (omega - 1.0);
                    if omega < 1.0 + 1e-3 {
                        omega = 1.0;
                    }
                    since_best = 0;
                    best = corr_max;
                }
            }
        }
        Err(LabError::Nonconvergence {
            iterations: opts.max_iter,
            residual: history.last().copied().unwrap_or(f64::NAN),
            history,
        })
    }

    fn assemble(&self, u: Vec<f64>) -> GridFunction {
        let mut out = GridFunction::nan(self.dom.grid);
        for &k in &self.dom.nodes {
            out.values[k] = u[k];
        }
        for &(node, c) in &self.disc.band {
            out.values[node] = self.cross_vals[c];
        }
        out
    }
}

/// Solves `F[u] = f` in `dom` with `u = g` on the boundary, where `F` is the
/// discrete operator selected by `mode`.
pub fn solve(
    dom: &GridDomain,
    mode: OpMode,
    e: Ellipticity,
    f: Option<&GridFunction>,
    g: &BoundaryData,
    opts: &SolveOptions,
) -> Result<(GridFunction, SolveReport)> {
    Problem::new(dom, mode, e, f, g, &opts.stencil)?.solve(opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdsolver::Shape;

    #[test]
    fn pair_root_solves_the_pair_equation() {
        let e = (2.0, 0.5);
        for &(sv, cv, sw, cw, f) in &[
            (1.0, 2.0, -3.0, 1.0, 0.0),
            (1.0, 2.0, -3.0, 1.0, 10.0),
            (1.0, 2.0, -3.0, 1.0, -10.0),
            (4.0, 4.0, 4.0, 4.0, 0.3),
        ] {
            let u = root_pair(sv, cv, sw, cw, f, e.0, e.1);
            let g = |x: f64| if x >= 0.0 { e.0 * x } else { e.1 * x };
            let val = g(sv - cv * u) + g(sw - cw * u);
            assert!((val - f).abs() < 1e-12, "{val} vs {f}");
        }
    }

    #[test]
    fn laplace_reproduces_linear_data() {
        let dom = GridDomain::build(Shape::half_disc(1.0), 1.0 / 16.0).unwrap();
        let opts = SolveOptions {
            tol: Some(1e-12),
            ..SolveOptions::default()
        };
        let (u, rep) = solve(&dom, OpMode::Laplace, Ellipticity::laplace(), None, &BoundaryData::linear_y(), &opts).unwrap();
        for &k in &dom.nodes {
            assert!((u.values[k] - dom.grid.point(k)[1]).abs() < 1e-9);
        }
        assert!(rep.residual <= 1e-12);
    }

    #[test]
    fn solution_satisfies_the_discrete_equation() {
        let dom = GridDomain::build(Shape::half_disc(1.0), 1.0 / 16.0).unwrap();
        let e = Ellipticity::new(1.0, 2.0).unwrap();
        let g = BoundaryData::zero_one();
        for mode in [OpMode::Sup, OpMode::Inf] {
            let p = Problem::new(&dom, mode, e, None, &g, &StencilSet::default()).unwrap();
            let (u, _) = p
                .solve(&SolveOptions {
                    tol: Some(1e-11),
                    ..SolveOptions::default()
                })
                .unwrap();
            let r = p.apply(&u);
            let worst = dom.nodes.iter().map(|&k| r.values[k].abs()).fold(0.0, f64::max);
            // Residual of the equation scales like correction / h².
            assert!(worst < 1e-11 * 16.0 * 16.0 * 100.0, "{mode:?}: {worst}");
        }
    }

    #[test]
    fn iteration_cap_reports_history() {
        let dom = GridDomain::build(Shape::half_disc(1.0), 1.0 / 16.0).unwrap();
        let opts = SolveOptions {
            tol: Some(1e-14),
            max_iter: 3,
            ..SolveOptions::default()
        };
        match solve(&dom, OpMode::Laplace, Ellipticity::laplace(), None, &BoundaryData::zero_one(), &opts) {
            Err(LabError::Nonconvergence { iterations, history, .. }) => {
                assert_eq!(iterations, 3);
                assert_eq!(history.len(), 3);
            }
            other => panic!("expected nonconvergence, got {other:?}"),
        }
    }

    #[test]
    fn boundary_specs_parse() {
        assert!(matches!(BoundaryData::from_spec("linear-y").unwrap(), BoundaryData::Linear { .. }));
        assert!(matches!(BoundaryData::from_spec("zero_one").unwrap(), BoundaryData::Parts { .. }));
        assert_eq!(BoundaryData::from_spec("constant:2.5").unwrap().eval([0.0, 0.0], Part::Flat), 2.5);
        assert_eq!(BoundaryData::from_spec("linear:1,2,3").unwrap().eval([1.0, 1.0], Part::Flat), 6.0);
        assert!(BoundaryData::from_spec("wavy").is_err());
    }
}
