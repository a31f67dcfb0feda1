//! Empirical regularity measurements on solved grid fields.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fdsolver::{GridDomain, Shape};
use crate::geometry::norm;
use crate::grid::GridFunction;
use crate::modulus::Modulus;

/// Probes never look at balls smaller than this many grid spacings.
pub const MIN_SCALE_IN_H: f64 = 3.0;

fn split_scales(scales: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let mut usable: Vec<f64> = Vec::new();
    let mut skipped: Vec<f64> = Vec::new();
    for &r in scales {
        if r >= MIN_SCALE_IN_H * h * (1.0 - 1e-12) {
            usable.push(r);
        } else {
            skipped.push(r);
        }
    }
    usable.sort_by(f64::total_cmp);
    usable.dedup();
    (usable, skipped)
}

/// Closed discrete ball, so that nodes on the sphere `|x| = r` count.
fn in_ball(p: [f64; 2], r: f64) -> bool {
    norm(p) <= r * (1.0 + 1e-12)
}

fn origin_value(u: &GridFunction, dom: &GridDomain) -> Result<f64> {
    let o = dom
        .grid
        .origin()
        .ok_or_else(|| LabError::Precondition("the origin is not a grid node".into()))?;
    if dom.is_inside(o) {
        return Err(LabError::Precondition("the origin must be a boundary node, not an inside node".into()));
    }
    let v = u.values[o];
    if !v.is_finite() {
        return Err(LabError::Precondition("no value at the origin".into()));
    }
    Ok(v)
}

fn check_grid(u: &GridFunction, dom: &GridDomain) -> Result<()> {
    if u.grid != dom.grid {
        return Err(LabError::Precondition("field and domain use different grids".into()));
    }
    Ok(())
}

/// `q(r) = sup_{Ω∩B_r} |u − u(0)| / r` at each usable scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzTable {
    pub rows: Vec<(f64, f64)>,
    /// Requested scales below the resolution limit.
    pub skipped: Vec<f64>,
    pub lipschitz_constant: f64,
}

pub fn lipschitz_probe(u: &GridFunction, dom: &GridDomain, scales: &[f64]) -> Result<LipschitzTable> {
    check_grid(u, dom)?;
    let u0 = origin_value(u, dom)?;
    let (usable, skipped) = split_scales(scales, dom.grid.h);
    if usable.is_empty() {
        return Err(LabError::Resolution(format!(
            "every requested scale is below {MIN_SCALE_IN_H}h = {}",
            MIN_SCALE_IN_H * dom.grid.h
        )));
    }
    let rows: Vec<(f64, f64)> = usable
        .iter()
        .map(|&r| {
            let sup = dom
                .nodes
                .iter()
                .filter(|&&k| in_ball(dom.grid.point(k), r))
                .map(|&k| (u.values[k] - u0).abs())
                .fold(0.0, f64::max);
            (r, sup / r)
        })
        .collect();
    let lipschitz_constant = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(LipschitzTable {
        rows,
        skipped,
        lipschitz_constant,
    })
}

/// Fit of `u(x) − u(0) ≈ a x_n + O(|x|^{1+α})` at a flat boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C1AlphaFit {
    pub a: f64,
    /// Infinite when the residuals are at rounding level.
    pub alpha_hat: f64,
    pub c_hat: f64,
    /// Exponent `β` of the auxiliary term `b x_n^{1+β}` in the joint fit.
    pub beta: f64,
    pub b: f64,
    /// `(r, sup_{Ω∩B_r} |u − u(0) − a x_n|)`.
    pub residuals: Vec<(f64, f64)>,
    pub skipped: Vec<f64>,
}

const BETA_MIN: f64 = 0.02;
const BETA_MAX: f64 = 1.5;

/// Least-squares `(a, b, sse)` for `z ≈ a y + b y^{1+β}`.
fn joint_ls(ys: &[f64], zs: &[f64], beta: f64) -> (f64, f64, f64) {
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&y, &z) in ys.iter().zip(zs) {
        let p = y.powf(1.0 + beta);
        s11 += y * y;
        s12 += y * p;
        s22 += p * p;
        t1 += y * z;
        t2 += p * z;
    }
    let det = s11 * s22 - s12 * s12;
    let (a, b) = if det.abs() > 1e-300 && det.abs() > 1e-14 * s11 * s22 {
        ((t1 * s22 - t2 * s12) / det, (s11 * t2 - s12 * t1) / det)
    } else {
        (t1 / s11, 0.0)
    };
    let sse = ys
        .iter()
        .zip(zs)
        .map(|(&y, &z)| (z - a * y - b * y.powf(1.0 + beta)).powi(2))
        .sum();
    (a, b, sse)
}

/// Joint least-squares fit of `u − u(0) ≈ a x_n + b x_n^{1+β}` on the nodes
/// inside the smallest usable scale, followed by a log-log fit of the
/// residual of the linear part across scales.
pub fn c1alpha_fit(u: &GridFunction, dom: &GridDomain, scales: &[f64]) -> Result<C1AlphaFit> {
    check_grid(u, dom)?;
    if !matches!(dom.shape, Shape::HalfDisc { .. } | Shape::HalfCube { .. }) {
        return Err(LabError::Precondition("c1alpha_fit needs a flat-boundary domain".into()));
    }
    let u0 = origin_value(u, dom)?;
    let (usable, skipped) = split_scales(scales, dom.grid.h);
    if usable.len() < 3 {
        return Err(LabError::Resolution(format!(
            "need at least 3 scales of size ≥ {MIN_SCALE_IN_H}h, got {}",
            usable.len()
        )));
    }
    let r_min = usable[0];
    let (ys, zs): (Vec<f64>, Vec<f64>) = dom
        .nodes
        .iter()
        .filter_map(|&k| {
            let p = dom.grid.point(k);
            in_ball(p, r_min).then(|| (p[1], u.values[k] - u0))
        })
        .unzip();
    if ys.len() < 3 {
        return Err(LabError::Resolution("too few nodes inside the smallest scale".into()));
    }

    let sse = |beta: f64| joint_ls(&ys, &zs, beta).2;
    let steps = 74;
    let grid_beta: Vec<f64> = (0..=steps)
        .map(|i| BETA_MIN + (BETA_MAX - BETA_MIN) * i as f64 / steps as f64)
        .collect();
    let best = (0..grid_beta.len())
        .min_by(|&i, &j| sse(grid_beta[i]).total_cmp(&sse(grid_beta[j])))
        .expect("nonempty grid");
    let lo = grid_beta[best.saturating_sub(1)];
    let hi = grid_beta[(best + 1).min(steps)];
    let beta = golden(sse, lo, hi, 1e-10);
    let (a, b, _) = joint_ls(&ys, &zs, beta);

    let scale = dom
        .nodes
        .iter()
        .map(|&k| u.values[k].abs())
        .fold(u0.abs(), f64::max)
        .max(f64::MIN_POSITIVE);
    let residuals: Vec<(f64, f64)> = usable
        .iter()
        .map(|&r| {
            let sup = dom
                .nodes
                .iter()
                .filter(|&&k| in_ball(dom.grid.point(k), r))
                .map(|&k| (u.values[k] - u0 - a * dom.grid.point(k)[1]).abs())
                .fold(0.0, f64::max);
            (r, sup)
        })
        .collect();

    let machine = residuals.iter().all(|&(_, s)| s <= 1e-11 * scale);
    let (alpha_hat, c_hat) = if machine {
        (f64::INFINITY, 0.0)
    } else {
        let pts: Vec<(f64, f64)> = residuals
            .iter()
            .filter(|r| r.1 > 0.0)
            .map(|&(r, s)| (r.ln(), s.ln()))
            .collect();
        if pts.len() < 2 {
            return Err(LabError::Resolution("residuals vanish at too many scales".into()));
        }
        let (slope, intercept) = line_fit(&pts);
        (slope - 1.0, intercept.exp())
    };
    Ok(C1AlphaFit {
        a,
        alpha_hat,
        c_hat,
        beta,
        b,
        residuals,
        skipped,
    })
}

fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Ordinary least-squares line `y = slope x + intercept`.
pub(crate) fn line_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `u(t l) / t` along a ray, normalized by the interior anchor value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfTable {
    pub direction: [f64; 2],
    pub rows: Vec<(f64, f64)>,
    pub anchor: [f64; 2],
    pub anchor_value: f64,
    pub c_min: f64,
}

/// Radius `R` of the ball a shape is cut from; the anchor sits at `(R/2) e₂`.
pub fn shape_radius(shape: &Shape) -> f64 {
    match shape {
        Shape::HalfDisc { radius } | Shape::HalfBall { radius, .. } | Shape::Graph { radius, .. } => *radius,
        Shape::HalfCube { side } => 0.5 * side,
    }
}

pub fn hopf_probe(u: &GridFunction, dom: &GridDomain, l: [f64; 2], ts: &[f64]) -> Result<HopfTable> {
    check_grid(u, dom)?;
    let len = norm(l);
    if !((len - 1.0).abs() < 1e-9) {
        return Err(LabError::Precondition(format!("direction must be a unit vector, |l| = {len}")));
    }
    if ts.is_empty() || ts.iter().any(|&t| !(t > 0.0)) {
        return Err(LabError::Precondition("ray parameters must be positive".into()));
    }
    let interp = |p: [f64; 2]| -> Result<f64> {
        if !dom.shape.inside(p) {
            return Err(LabError::Geometry(format!("probe point {p:?} lies outside the domain")));
        }
        u.bilinear(p)
            .ok_or_else(|| LabError::Geometry(format!("no interpolation stencil at {p:?}")))
    };
    let t_max = ts.iter().copied().fold(0.0, f64::max);
    let samples = 256;
    for i in 1..=samples {
        let t = t_max * i as f64 / samples as f64;
        if !dom.shape.inside([t * l[0], t * l[1]]) {
            return Err(LabError::Geometry(format!("ray leaves the domain at t = {t}")));
        }
    }
    let anchor = [0.0, 0.5 * shape_radius(&dom.shape)];
    let anchor_value = interp(anchor)?;
    if !(anchor_value > 0.0) {
        return Err(LabError::Precondition(format!("anchor value must be positive, got {anchor_value}")));
    }
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let v = interp([t * l[0], t * l[1]])?;
        if v < 0.0 {
            return Err(LabError::Precondition(format!("field is negative on the ray at t = {t}")));
        }
        rows.push((t, v / t));
    }
    let c_min = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min) / anchor_value;
    Ok(HopfTable {
        direction: l,
        rows,
        anchor,
        anchor_value,
        c_min,
    })
}

/// `ω_f(r) = ‖f‖_{L²(Ω∩B_r)} / ‖f‖_{L²(Ω)}` tabulated at the usable scales.
pub fn f_modulus(f: &GridFunction, dom: &GridDomain, scales: &[f64]) -> Result<Modulus> {
    check_grid(f, dom)?;
    let (usable, _) = split_scales(scales, dom.grid.h);
    if usable.is_empty() {
        return Err(LabError::Resolution("no scale above the resolution limit".into()));
    }
    let vals: Vec<(f64, f64)> = dom
        .nodes
        .iter()
        .map(|&k| (norm(dom.grid.point(k)), f.values[k]))
        .collect();
    if vals.iter().any(|v| !v.1.is_finite()) {
        return Err(LabError::Domain("right-hand side not finite at an inside node".into()));
    }
    let total: f64 = vals.iter().map(|v| v.1 * v.1).sum();
    let r_max = *usable.last().expect("nonempty");
    if total == 0.0 {
        return Ok(Modulus::zero(r_max));
    }
    let points: Vec<(f64, f64)> = usable
        .iter()
        .map(|&r| {
            let ball: f64 = vals.iter().filter(|v| v.0 <= r * (1.0 + 1e-12)).map(|v| v.1 * v.1).sum();
            (r, (ball / total).sqrt())
        })
        .collect();
    Modulus::table(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GraphDomain2D;

    fn half_disc(h: f64) -> GridDomain {
        GridDomain::build(Shape::half_disc(1.0), h).unwrap()
    }

    fn field(dom: &GridDomain, f: impl Fn([f64; 2]) -> f64) -> GridFunction {
        GridFunction::from_fn(dom.grid, f)
    }

    #[test]
    fn lipschitz_of_linear_and_quadratic() {
        let dom = half_disc(1.0 / 64.0);
        let scales = [0.5, 0.25, 0.125];
        let t = lipschitz_probe(&field(&dom, |p| p[1]), &dom, &scales).unwrap();
        for &(r, q) in &t.rows {
            assert!((q - 1.0).abs() < 1e-12, "q({r}) = {q}");
        }
        let t = lipschitz_probe(&field(&dom, |p| p[1] * p[1]), &dom, &scales).unwrap();
        for &(r, q) in &t.rows {
            assert!((q - r).abs() < 1e-12, "q({r}) = {q}");
        }
    }

    #[test]
    fn lipschitz_skips_and_rejects_fine_scales() {
        let dom = half_disc(1.0 / 16.0);
        let u = field(&dom, |p| p[1]);
        let t = lipschitz_probe(&u, &dom, &[0.5, 0.1]).unwrap();
        assert_eq!(t.skipped, vec![0.1]);
        assert!(matches!(lipschitz_probe(&u, &dom, &[0.1]), Err(LabError::Resolution(_))));
    }

    #[test]
    fn c1alpha_recovers_synthetic_expansions() {
        let dom = half_disc(1.0 / 128.0);
        let scales = [0.25, 0.125, 0.0625, 0.03125];
        let lin = c1alpha_fit(&field(&dom, |p| p[1]), &dom, &scales).unwrap();
        assert!((lin.a - 1.0).abs() < 1e-12 && lin.alpha_hat.is_infinite());
        let fit = c1alpha_fit(&field(&dom, |p| p[1] + p[1].powf(1.5)), &dom, &scales).unwrap();
        assert!((fit.a - 1.0).abs() < 1e-6, "a = {}", fit.a);
        assert!((fit.alpha_hat - 0.5).abs() < 0.1, "alpha = {}", fit.alpha_hat);
    }

    #[test]
    fn c1alpha_needs_flat_boundary_and_scales() {
        let g = GridDomain::build(Shape::graph(GraphDomain2D::log_example(), 0.5), 1.0 / 32.0).unwrap();
        let u = field(&g, |p| p[1]);
        assert!(matches!(c1alpha_fit(&u, &g, &[0.25, 0.125, 0.1]), Err(LabError::Precondition(_))));
        let dom = half_disc(1.0 / 16.0);
        assert!(matches!(
            c1alpha_fit(&field(&dom, |p| p[1]), &dom, &[0.5, 0.25, 0.1]),
            Err(LabError::Resolution(_))
        ));
    }

    #[test]
    fn hopf_on_linear_field() {
        let dom = half_disc(1.0 / 64.0);
        let u = field(&dom, |p| p[1]);
        let ts = [0.05, 0.1, 0.2];
        let t = hopf_probe(&u, &dom, [0.0, 1.0], &ts).unwrap();
        assert!((t.c_min - 2.0).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let d = hopf_probe(&u, &dom, [s, s], &ts).unwrap();
        for &(_, q) in &d.rows {
            assert!((q - s).abs() < 1e-12);
        }
        assert!(matches!(hopf_probe(&u, &dom, [1.0, 0.0], &ts), Err(LabError::Geometry(_))));
    }

    #[test]
    fn f_modulus_examples() {
        let h = 1.0 / 128.0;
        let dom = half_disc(h);
        let scales = [0.0625, 0.125, 0.25, 0.5, 1.0];
        let m = f_modulus(&field(&dom, |_| 1.0), &dom, &scales).unwrap();
        for &r in &scales[..4] {
            assert!((m.eval(r).unwrap() - r).abs() < 0.05 * r + 2.0 * h, "ω({r})");
        }
        let m = f_modulus(&field(&dom, |p| if norm(p) > 0.5 { 1.0 } else { 0.0 }), &dom, &scales).unwrap();
        assert_eq!(m.eval(0.25).unwrap(), 0.0);
        let z = f_modulus(&field(&dom, |_| 0.0), &dom, &scales).unwrap();
        assert_eq!(z.eval(0.3).unwrap(), 0.0);
    }
}
