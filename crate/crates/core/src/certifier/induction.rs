use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::constants::ProofConstants;
use super::sequence::ScaleSequence;
use crate::error::{LabError, Result};
use crate::fdsolver::{solve, BoundaryData, GridDomain, Part, Shape, SolveOptions};
use crate::geometry::{norm, ReifenbergCertificate};
use crate::grid::GridFunction;
use crate::probes::MIN_SCALE_IN_H;
use crate::pucci::{Ellipticity, OpMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InductionMode {
    /// `sup_{Ω_{η^k}} (u − a_k n_k·x) ≤ Ĉ M η^k A_k`.
    Lipschitz,
    /// `inf_{Ω⁺_{η^{k+1}}} (u − ã n_k·x + a_k n_k·x) ≥ −Ĉ η^k A_k`.
    Hopf,
}

impl FromStr for InductionMode {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lipschitz" => Ok(Self::Lipschitz),
            "hopf" => Ok(Self::Hopf),
            other => Err(LabError::Parse(format!("unknown induction mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct InductionOptions {
    /// `‖f‖` contribution to `M`.
    pub f_norm: f64,
    /// `[g]` contribution to `M`.
    pub g_seminorm: f64,
    /// Physical length of the unit of the induction; defaults to the top
    /// frame scale of the certificate.
    pub r_unit: Option<f64>,
    pub k_min: usize,
    /// Also solve the auxiliary barrier problem at each scale (Lipschitz mode).
    pub aux_solves: bool,
    pub ellipticity: Ellipticity,
    /// Fit `a_k` greedily; when false the sequence's own `a_k` are used.
    pub fit_a: bool,
}

impl Default for InductionOptions {
    fn default() -> Self {
        Self {
            f_norm: 0.0,
            g_seminorm: 0.0,
            r_unit: None,
            k_min: 0,
            aux_solves: false,
            ellipticity: Ellipticity::laplace(),
            fit_a: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InductionRow {
    pub k: usize,
    /// Physical radius `r_unit·η^k`.
    pub radius: f64,
    pub a_k: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs` (Lipschitz) or `lhs − rhs` (Hopf).
    pub slack: f64,
    pub holds: bool,
    /// Slope of the auxiliary solve, with its bound `C₂ĈMA_k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abar: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InductionReport {
    pub mode: InductionMode,
    pub m_norm: f64,
    pub r_unit: f64,
    pub rows: Vec<InductionRow>,
    pub skipped: Vec<(usize, String)>,
    pub all_hold: bool,
}

/// Evaluates the induction inequality scale by scale on a solved field. The
/// coordinates are divided by `r_unit` so that the top scale is 1, and `a_k`
/// is chosen greedily within the admissible increment.
pub fn verify_induction(
    u: &GridFunction,
    dom: &GridDomain,
    cert: &ReifenbergCertificate,
    pc: &ProofConstants,
    seq: &ScaleSequence,
    mode: InductionMode,
    opts: &InductionOptions,
) -> Result<InductionReport> {
    if u.grid != dom.grid {
        return Err(LabError::Precondition("field and domain use different grids".into()));
    }
    if (cert.eta_geo - seq.eta).abs() > 1e-12 * seq.eta {
        return Err(LabError::Precondition(format!(
            "certificate scale ratio {} differs from the sequence's η = {}",
            cert.eta_geo, seq.eta
        )));
    }
    let a_tilde = match mode {
        InductionMode::Hopf => pc
            .a_tilde
            .ok_or_else(|| LabError::Precondition("Hopf mode needs constants carrying ã".into()))?,
        InductionMode::Lipschitz => 0.0,
    };
    let normals: Vec<[f64; 2]> = cert.frames().map(|f| f.normal).collect();
    let r_unit = match opts.r_unit {
        Some(r) => r,
        None => cert
            .frames()
            .next()
            .map(|f| f.scale)
            .ok_or_else(|| LabError::Precondition("certificate has no frames".into()))?,
    };
    if !(r_unit > 0.0 && r_unit.is_finite()) {
        return Err(LabError::Precondition(format!("r_unit must be positive, got {r_unit}")));
    }
    let u0 = dom
        .grid
        .origin()
        .map(|o| u.values[o])
        .filter(|v| v.is_finite())
        .ok_or_else(|| LabError::Precondition("no value at the origin".into()))?;

    let u_sup = dom
        .nodes
        .iter()
        .map(|&i| u.values[i])
        .filter(|v| v.is_finite())
        .fold(u0.abs(), |m, v| m.max(v.abs()));
    let m_norm = u_sup + opts.f_norm + opts.g_seminorm;
    let h = dom.grid.h;
    let eta = seq.eta;

    // Nodes as (normalized position, u − u(0)).
    let pts: Vec<([f64; 2], f64)> = dom
        .nodes
        .iter()
        .map(|&i| {
            let p = dom.grid.point(i);
            ([p[0] / r_unit, p[1] / r_unit], u.values[i] - u0)
        })
        .filter(|(_, v)| v.is_finite())
        .collect();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut a_prev = 0.0;
    let mut allowance = 0.0;
    for k in 0..=seq.k_max() {
        let rk = eta.powi(k as i32);
        let step = pc.c_bar * pc.c_hat * m_norm * seq.big_a[k];
        allowance += if k == 0 { 0.0 } else { step };
        if k < opts.k_min {
            continue;
        }
        let frame_k = if mode == InductionMode::Hopf { k + 1 } else { k };
        if frame_k >= normals.len() {
            skipped.push((k, "no certificate frame at this scale".to_string()));
            continue;
        }
        let radius = r_unit * rk;
        let region_r = match mode {
            InductionMode::Lipschitz => radius,
            InductionMode::Hopf => radius * eta,
        };
        if region_r < MIN_SCALE_IN_H * h * (1.0 - 1e-12) {
            skipped.push((k, format!("scale {region_r:e} is below {MIN_SCALE_IN_H}h")));
            continue;
        }
        let n = normals[k];
        let region: Vec<(f64, f64)> = match mode {
            InductionMode::Lipschitz => pts
                .iter()
                .filter(|(p, _)| norm(*p) <= rk * (1.0 + 1e-12))
                .map(|(p, v)| (p[0] * n[0] + p[1] * n[1], *v))
                .collect(),
            InductionMode::Hopf => {
                let n_up = normals[k + 1];
                pts.iter()
                    .filter(|(p, _)| norm(*p) <= rk * eta * (1.0 + 1e-12) && p[0] * n_up[0] + p[1] * n_up[1] > 0.0)
                    .map(|(p, v)| (p[0] * n[0] + p[1] * n[1], *v))
                    .collect()
            }
        };
        if region.is_empty() {
            skipped.push((k, "no grid nodes in the region".to_string()));
            continue;
        }

        let (mut lo, mut hi) = if k == 0 { (0.0, 0.0) } else { (a_prev - allowance, a_prev + allowance) };
        if mode == InductionMode::Hopf && k > 0 {
            lo = lo.max(0.0);
            hi = hi.min(0.5 * a_tilde).max(lo);
        }
        let (a_k, lhs) = match mode {
            _ if !opts.fit_a => {
                let a = seq.small_a[k];
                let lhs = match mode {
                    InductionMode::Lipschitz => region.iter().map(|(s, v)| v - a * s).fold(f64::NEG_INFINITY, f64::max),
                    InductionMode::Hopf => region.iter().map(|(s, v)| v - (a_tilde - a) * s).fold(f64::INFINITY, f64::min),
                };
                (a, lhs)
            }
            InductionMode::Lipschitz => {
                let f = |a: f64| region.iter().map(|(s, v)| v - a * s).fold(f64::NEG_INFINITY, f64::max);
                ternary(f, lo, hi, false)
            }
            InductionMode::Hopf => {
                let f = |a: f64| region.iter().map(|(s, v)| v - (a_tilde - a) * s).fold(f64::INFINITY, f64::min);
                ternary(f, lo, hi, true)
            }
        };
        let (rhs, slack) = match mode {
            InductionMode::Lipschitz => {
                let rhs = pc.c_hat * m_norm * rk * seq.big_a[k];
                (rhs, rhs - lhs)
            }
            InductionMode::Hopf => {
                let rhs = -pc.c_hat * rk * seq.big_a[k];
                (rhs, lhs - rhs)
            }
        };
        let abar = if opts.aux_solves && mode == InductionMode::Lipschitz {
            aux_slope(dom, pc, seq, opts, k, radius, r_unit, n, m_norm)?
        } else {
            None
        };
        rows.push(InductionRow {
            k,
            radius,
            a_k,
            lhs,
            rhs,
            slack,
            holds: slack >= 0.0,
            abar,
        });
        a_prev = a_k;
        allowance = 0.0;
    }
    let all_hold = !rows.is_empty() && rows.iter().all(|r| r.holds);
    Ok(InductionReport {
        mode,
        m_norm,
        r_unit,
        rows,
        skipped,
        all_hold,
    })
}

/// Minimizes (or maximizes) a convex (concave) function on `[lo, hi]`.
fn ternary<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, maximize: bool) -> (f64, f64) {
    let sign = if maximize { -1.0 } else { 1.0 };
    let g = |a: f64| sign * f(a);
    for _ in 0..100 {
        if hi - lo <= 1e-14 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if g(m1) <= g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let a = 0.5 * (lo + hi);
    (a, f(a))
}

/// Solves `M⁺v = 0` on the half-ball shifted by `Kη^kω(η^k)` against `n_k`,
/// with `v = ĈMη^kA_k` on the curved part and `0` on the flat part, and
/// returns the least-squares slope of `v` against the shifted height.
#[allow(clippy::too_many_arguments)]
fn aux_slope(
    dom: &GridDomain,
    pc: &ProofConstants,
    seq: &ScaleSequence,
    opts: &InductionOptions,
    k: usize,
    radius: f64,
    r_unit: f64,
    n: [f64; 2],
    m_norm: f64,
) -> Result<Option<(f64, f64)>> {
    let rk = radius / r_unit;
    let offset_unit = pc.k_eta * rk * seq.omega[k];
    let shape = Shape::shifted_half_ball(radius, n, offset_unit * r_unit);
    let aux = match GridDomain::build(shape, dom.grid.h) {
        Ok(d) if d.node_count() >= 20 => d,
        _ => return Ok(None),
    };
    let top = pc.c_hat * m_norm * rk * seq.big_a[k];
    let g = BoundaryData::function(move |_, part| if part == Part::Flat { 0.0 } else { top });
    let (v, _) = solve(&aux, OpMode::Sup, opts.ellipticity, None, &g, &SolveOptions::default())?;
    let (mut num, mut den) = (0.0, 0.0);
    for &i in &aux.nodes {
        let p = aux.grid.point(i);
        if norm(p) > 0.5 * radius {
            continue;
        }
        let s = (p[0] * n[0] + p[1] * n[1]) / r_unit + offset_unit;
        num += v.values[i] * s;
        den += s * s;
    }
    if den == 0.0 {
        return Ok(None);
    }
    Ok(Some((num / den, pc.c2 * pc.c_hat * m_norm * seq.big_a[k])))
}
