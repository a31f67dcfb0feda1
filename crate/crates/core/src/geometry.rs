//! Two-dimensional graph domains and per-scale supporting hyperplanes.
//!
//! A [`GraphDomain2D`] is `B_R ∩ {y > f(x)}` with `f(0) = 0`, optionally
//! rotated and dilated about the origin. At each scale `r` a supporting line
//! is fitted by searching the normal angle; the resulting frames are checked
//! against a modulus to produce a [`ReifenbergCertificate`].

use std::f64::consts::{PI, TAU};
use std::io::Read;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::modulus::Modulus;

pub type Point = [f64; 2];

/// Boundary profile `f` with `f(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Flat,
    Tilted { slope: f64 },
    /// `f(x) = x / ln|x|`, the standard Reifenberg-but-not-C^{1,Dini} example.
    LogExample,
    /// `f(x) = |x|^α`.
    PowerCusp { exponent: f64 },
    /// Piecewise-linear through `(x, f(x))` knots.
    Table { points: Vec<(f64, f64)> },
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Flat => 0.0,
            Profile::Tilted { slope } => slope * x,
            Profile::LogExample => {
                if x == 0.0 {
                    0.0
                } else {
                    x / x.abs().ln()
                }
            }
            Profile::PowerCusp { exponent } => x.abs().powf(*exponent),
            Profile::Table { points } => {
                let idx = points.partition_point(|p| p.0 < x);
                if idx == 0 {
                    points[0].1
                } else if idx >= points.len() {
                    points[points.len() - 1].1
                } else {
                    let (xa, ya) = points[idx - 1];
                    let (xb, yb) = points[idx];
                    ya + (yb - ya) * (x - xa) / (xb - xa)
                }
            }
        }
    }

    /// Built-in names: `flat`, `tilted:<slope>`, `log_example`, `power_cusp:<α>`.
    pub fn from_name(name: &str) -> Result<Self> {
        let norm = name.trim().to_ascii_lowercase().replace('-', "_");
        let (head, arg) = match norm.find([':', '(', '=']) {
            Some(i) => (&norm[..i], Some(norm[i + 1..].trim_end_matches(')').to_string())),
            None => (norm.as_str(), None),
        };
        let num = |what: &str, default: Option<f64>| -> Result<f64> {
            match (&arg, default) {
                (Some(a), _) => a.parse().map_err(|e| LabError::Parse(format!("bad {what} argument: {e}"))),
                (None, Some(d)) => Ok(d),
                (None, None) => Err(LabError::Parse(format!("{what} needs an argument"))),
            }
        };
        match head {
            "flat" => Ok(Profile::Flat),
            "tilted" => Ok(Profile::Tilted { slope: num("tilted", Some(1.0))? }),
            "log_example" | "log" | "log_domain" => Ok(Profile::LogExample),
            "power_cusp" => Ok(Profile::PowerCusp { exponent: num("power_cusp", None)? }),
            other => Err(LabError::Parse(format!("unknown profile '{other}'"))),
        }
    }

    /// Two-column CSV `(x, f(x))`, strictly increasing `x`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut points: Vec<(f64, f64)> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(LabError::Parse(format!("row {i}: expected two columns")));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(x), Ok(y)) => points.push((x, y)),
                _ if i == 0 => continue,
                _ => return Err(LabError::Parse(format!("row {i}: non-numeric entry"))),
            }
        }
        if points.len() < 2 || points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(LabError::Parse("profile table needs ≥ 2 rows with increasing x".into()));
        }
        Ok(Profile::Table { points })
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }
}

/// `Ω = B_R ∩ {y > f(x)}`, then rotated by `rotation` and dilated by `dilation`
/// about the origin. The boundary point of interest is the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDomain2D {
    pub profile: Profile,
    /// Radius before dilation; the profile is evaluated on `[-radius, radius]`.
    pub radius: f64,
    #[serde(default)]
    pub rotation: f64,
    #[serde(default = "one")]
    pub dilation: f64,
}

fn one() -> f64 {
    1.0
}

const CONTINUITY_SAMPLES: usize = 1 << 14;

impl GraphDomain2D {
    pub fn new(profile: Profile, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(LabError::Domain(format!("radius must be positive, got {radius}")));
        }
        let f0 = profile.eval(0.0);
        if f0.abs() > 1e-12 {
            return Err(LabError::Domain(format!("profile must vanish at 0, got f(0) = {f0}")));
        }
        let jump = 0.25 * radius;
        let mut prev = profile.eval(-radius);
        for i in 1..=CONTINUITY_SAMPLES {
            let x = -radius + 2.0 * radius * i as f64 / CONTINUITY_SAMPLES as f64;
            let v = profile.eval(x);
            if !v.is_finite() {
                return Err(LabError::Domain(format!("profile not finite at x = {x}")));
            }
            if (v - prev).abs() > jump {
                return Err(LabError::Domain(format!("profile jumps by {} near x = {x}", (v - prev).abs())));
            }
            prev = v;
        }
        Ok(Self {
            profile,
            radius,
            rotation: 0.0,
            dilation: 1.0,
        })
    }

    pub fn flat(radius: f64) -> Self {
        Self::new(Profile::Flat, radius).expect("flat profile is valid")
    }

    pub fn tilted(slope: f64, radius: f64) -> Result<Self> {
        Self::new(Profile::Tilted { slope }, radius)
    }

    /// `B_{1/2} ∩ {y > x / ln|x|}`.
    pub fn log_example() -> Self {
        Self::new(Profile::LogExample, 0.5).expect("log example is valid")
    }

    pub fn rotated(mut self, angle: f64) -> Self {
        self.rotation += angle;
        self
    }

    pub fn dilated(mut self, factor: f64) -> Self {
        self.dilation *= factor;
        self
    }

    /// Radius of the ball `B_R` in world coordinates.
    pub fn effective_radius(&self) -> f64 {
        self.radius * self.dilation
    }

    fn to_local(&self, p: Point) -> Point {
        let (s, c) = (-self.rotation).sin_cos();
        [(c * p[0] - s * p[1]) / self.dilation, (s * p[0] + c * p[1]) / self.dilation]
    }

    fn from_local(&self, q: Point) -> Point {
        let (s, c) = self.rotation.sin_cos();
        let d = self.dilation;
        [d * (c * q[0] - s * q[1]), d * (s * q[0] + c * q[1])]
    }

    /// Signed graph constraint `y' - f(x')` in local coordinates, scaled back
    /// to world lengths. Positive above the graph.
    pub fn graph_level(&self, p: Point) -> f64 {
        let q = self.to_local(p);
        if q[0].abs() > self.radius {
            // Outside the profile's interval the graph constraint is vacuous
            // inside the ball; report "above".
            return f64::INFINITY;
        }
        (q[1] - self.profile.eval(q[0])) * self.dilation
    }

    pub fn inside(&self, p: Point) -> bool {
        norm(p) < self.effective_radius() && self.graph_level(p) > 0.0
    }

    /// World point on the graph above local abscissa `x`.
    pub fn boundary_point(&self, x_local: f64) -> Point {
        self.from_local([x_local, self.profile.eval(x_local)])
    }
}

pub(crate) fn norm(p: Point) -> f64 {
    p[0].hypot(p[1])
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn unit(angle: f64) -> Point {
    let (s, c) = angle.sin_cos();
    [c, s]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `B_r ∩ Ω ⊂ {x·n > -r ω(r)}`.
    #[serde(alias = "ext")]
    Exterior,
    /// `B_r ∩ Ωᶜ ⊂ {x·n < r ω(r)}`.
    #[serde(alias = "int")]
    Interior,
}

impl std::str::FromStr for Side {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ext" | "exterior" => Ok(Side::Exterior),
            "int" | "interior" => Ok(Side::Interior),
            other => Err(LabError::Parse(format!("unknown side '{other}'"))),
        }
    }
}

/// Supporting line at one scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneFrame {
    pub scale: f64,
    pub normal: Point,
    /// Worst violation of the half-plane inclusion, in units of `scale`.
    pub slack: f64,
}

/// Number of points sampled along the boundary curve and along the sphere.
pub const CURVE_SAMPLES: usize = 4096;
/// Side of the uniform fill grid over `[-r, r]²`.
pub const FILL_SAMPLES: usize = 128;
/// Default number of angles in the coarse sweep.
pub const DEFAULT_ANGLE_SAMPLES: usize = 360;

fn sample_region(dom: &GraphDomain2D, r: f64, side: Side) -> Vec<Point> {
    let keep = |p: Point| match side {
        Side::Exterior => dom.inside(p),
        Side::Interior => !dom.inside(p),
    };
    let mut pts = Vec::with_capacity(CURVE_SAMPLES * 2 + FILL_SAMPLES * FILL_SAMPLES / 2);

    // The graph itself lies in the closure of both Ω and Ωᶜ.
    let x_max = (r / dom.dilation).min(dom.radius);
    for i in 0..=CURVE_SAMPLES {
        let x = -x_max + 2.0 * x_max * i as f64 / CURVE_SAMPLES as f64;
        let p = dom.boundary_point(x);
        if norm(p) <= r {
            pts.push(p);
        }
    }
    let rr = r * (1.0 - 1e-12);
    for i in 0..CURVE_SAMPLES {
        let p = unit(TAU * i as f64 / CURVE_SAMPLES as f64);
        let p = [rr * p[0], rr * p[1]];
        if keep(p) {
            pts.push(p);
        }
    }
    for i in 0..FILL_SAMPLES {
        for j in 0..FILL_SAMPLES {
            let p = [
                -r + 2.0 * r * (i as f64 + 0.5) / FILL_SAMPLES as f64,
                -r + 2.0 * r * (j as f64 + 0.5) / FILL_SAMPLES as f64,
            ];
            if norm(p) < r && keep(p) {
                pts.push(p);
            }
        }
    }
    pts
}

fn defect(pts: &[Point], side: Side, angle: f64) -> f64 {
    let n = unit(angle);
    match side {
        Side::Exterior => -pts.iter().map(|&p| dot(p, n)).fold(f64::INFINITY, f64::min),
        Side::Interior => pts.iter().map(|&p| dot(p, n)).fold(f64::NEG_INFINITY, f64::max),
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
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
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Fits the defect-minimizing supporting line of `Ω ∩ B_r` (exterior) or
/// `Ωᶜ ∩ B_r` (interior): a coarse sweep over `samples` normal angles, then
/// golden-section refinement around the best one.
pub fn fit_supporting_plane(dom: &GraphDomain2D, r: f64, side: Side, samples: usize) -> Result<HyperplaneFrame> {
    if !(r > 0.0) || r > dom.effective_radius() * (1.0 + 1e-12) {
        return Err(LabError::Domain(format!(
            "scale {r} outside (0, {}]",
            dom.effective_radius()
        )));
    }
    if samples < 64 {
        return Err(LabError::Precondition(format!("need at least 64 angle samples, got {samples}")));
    }
    let pts = sample_region(dom, r, side);
    if pts.is_empty() {
        return Err(LabError::DegenerateDomain(format!("no samples in the region at scale {r}")));
    }

    let step = TAU / samples as f64;
    let (best_i, best_val) = (0..samples)
        .map(|i| (i, defect(&pts, side, i as f64 * step)))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let center = best_i as f64 * step;
    let (mut angle, mut val) = golden_min(|a| defect(&pts, side, a), center - step, center + step, 1e-13);
    if best_val < val {
        angle = center;
        val = best_val;
    }
    let angle = angle.rem_euclid(TAU);
    Ok(HyperplaneFrame {
        scale: r,
        normal: unit(angle),
        slack: val.max(0.0) / r,
    })
}

/// Per-scale outcome inside a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleCheck {
    pub k: usize,
    pub frame: HyperplaneFrame,
    pub omega: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReifenbergCertificate {
    pub side: Side,
    pub eta_geo: f64,
    pub scales: Vec<ScaleCheck>,
    /// `|n_k - n_{k+1}|` for consecutive scales.
    pub drifts: Vec<f64>,
    /// `max_k drift_k / ω(r_k)`; infinite when a drift occurs where `ω = 0`.
    pub fitted_k: f64,
    pub passed: bool,
    pub modulus: Modulus,
    /// `(θ, K(θ))` pairs when a θ-sweep was requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta_sweep: Option<Vec<(f64, f64)>>,
}

impl ReifenbergCertificate {
    pub fn frames(&self) -> impl Iterator<Item = &HyperplaneFrame> {
        self.scales.iter().map(|s| &s.frame)
    }

    /// Frame whose scale is closest to `r` in log distance, if within a
    /// factor `1 + 1e-6`.
    pub fn frame_at(&self, r: f64) -> Option<&HyperplaneFrame> {
        self.frames().find(|f| (f.scale / r - 1.0).abs() < 1e-6)
    }
}

/// Tolerance for slacks where `ω(r) = 0` (slack is already in units of `r`).
pub const FLATNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Top scale `r_0`; defaults to the domain radius.
    pub r_top: Option<f64>,
    pub samples: usize,
    /// Ratios θ for which `K(θ)` is also estimated.
    pub thetas: Option<Vec<f64>>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            r_top: None,
            samples: DEFAULT_ANGLE_SAMPLES,
            thetas: None,
        }
    }
}

fn drift(a: &HyperplaneFrame, b: &HyperplaneFrame) -> f64 {
    norm([a.normal[0] - b.normal[0], a.normal[1] - b.normal[1]])
}

fn ratio(drift: f64, omega: f64) -> f64 {
    if omega > 0.0 {
        drift / omega
    } else if drift <= FLATNESS_TOL {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Checks the Reifenberg condition on the scales `r_top·η^k`, `k = 0..=k_max`.
pub fn check_reifenberg(
    dom: &GraphDomain2D,
    m: &Modulus,
    side: Side,
    eta_geo: f64,
    k_max: usize,
) -> Result<ReifenbergCertificate> {
    check_reifenberg_with(dom, m, side, eta_geo, k_max, &CheckOptions::default())
}

pub fn check_reifenberg_with(
    dom: &GraphDomain2D,
    m: &Modulus,
    side: Side,
    eta_geo: f64,
    k_max: usize,
    opts: &CheckOptions,
) -> Result<ReifenbergCertificate> {
    if !(eta_geo > 0.0 && eta_geo < 1.0) {
        return Err(LabError::Precondition(format!("eta must lie in (0, 1), got {eta_geo}")));
    }
    if k_max < 4 {
        return Err(LabError::Precondition(format!("k_max must be at least 4, got {k_max}")));
    }
    let r_top = opts.r_top.unwrap_or_else(|| dom.effective_radius());
    if r_top > m.domain_radius * (1.0 + 1e-12) {
        return Err(LabError::Domain(format!(
            "top scale {r_top} exceeds the modulus domain radius {}",
            m.domain_radius
        )));
    }
    let radii: Vec<f64> = (0..=k_max).map(|k| r_top * eta_geo.powi(k as i32)).collect();
    let frames = radii
        .par_iter()
        .map(|&r| fit_supporting_plane(dom, r, side, opts.samples))
        .collect::<Result<Vec<_>>>()?;

    let mut scales = Vec::with_capacity(frames.len());
    for (k, frame) in frames.iter().enumerate() {
        let omega = m.eval(frame.scale)?;
        let passed = if omega > 0.0 {
            frame.slack <= omega + 1e-12
        } else {
            frame.slack <= FLATNESS_TOL
        };
        scales.push(ScaleCheck {
            k,
            frame: *frame,
            omega,
            passed,
        });
    }
    let drifts: Vec<f64> = frames.windows(2).map(|w| drift(&w[0], &w[1])).collect();
    let fitted_k = drifts
        .iter()
        .zip(&scales)
        .map(|(&d, s)| ratio(d, s.omega))
        .fold(0.0, f64::max);
    let passed = scales.iter().all(|s| s.passed) && fitted_k.is_finite();

    let theta_sweep = match &opts.thetas {
        Some(thetas) => Some(k_theta_sweep(dom, m, side, thetas, &radii, opts.samples)?),
        None => None,
    };

    Ok(ReifenbergCertificate {
        side,
        eta_geo,
        scales,
        drifts,
        fitted_k,
        passed,
        modulus: m.clone(),
        theta_sweep,
    })
}

/// `K(θ) ≈ max_r |n_r - n_{θr}| / ω(r)` over the given radii.
pub fn k_theta_sweep(
    dom: &GraphDomain2D,
    m: &Modulus,
    side: Side,
    thetas: &[f64],
    radii: &[f64],
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    thetas
        .iter()
        .map(|&theta| {
            if !(theta > 0.0 && theta < 1.0) {
                return Err(LabError::Precondition(format!("θ must lie in (0, 1), got {theta}")));
            }
            let k = radii
                .par_iter()
                .map(|&r| {
                    let a = fit_supporting_plane(dom, r, side, samples)?;
                    let b = fit_supporting_plane(dom, theta * r, side, samples)?;
                    Ok(ratio(drift(&a, &b), m.eval(r)?))
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok((theta, k))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyEntry {
    pub k: usize,
    /// `sup_l |n_k - n_{k+l}|` over the tested scales.
    pub sup_diff: f64,
    /// `fitted_K · Σ_{i ≥ k} ω(r_i)`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitNormal {
    pub normal: Point,
    pub cauchy_tail: Vec<CauchyEntry>,
}

/// Estimates the limit of the normals as `r → 0` by the deepest fitted frame
/// and reports the Cauchy tail against the summed modulus.
pub fn limit_normal(cert: &ReifenbergCertificate) -> Result<LimitNormal> {
    if !cert.passed {
        return Err(LabError::Precondition("certificate did not pass".into()));
    }
    let normals: Vec<Point> = cert.frames().map(|f| f.normal).collect();
    let omegas: Vec<f64> = cert.scales.iter().map(|s| s.omega).collect();
    let n = normals.len();
    let cauchy_tail = (0..n)
        .map(|k| {
            let sup_diff = (k + 1..n)
                .map(|j| norm([normals[k][0] - normals[j][0], normals[k][1] - normals[j][1]]))
                .fold(0.0, f64::max);
            let bound = cert.fitted_k * omegas[k..].iter().sum::<f64>();
            CauchyEntry {
                k,
                sup_diff,
                bound,
                holds: sup_diff <= bound * (1.0 + 1e-9) + 1e-12,
            }
        })
        .collect();
    Ok(LimitNormal {
        normal: normals[n - 1],
        cauchy_tail,
    })
}

/// The unit normal `(-1/ln r, 1)/‖·‖` of the log example's chord line at `r`.
pub fn log_example_normal(r: f64) -> Point {
    let a = -1.0 / r.ln();
    let len = a.hypot(1.0);
    [a / len, 1.0 / len]
}

/// Angle of a unit vector in `(-π, π]`.
pub fn angle_of(n: Point) -> f64 {
    n[1].atan2(n[0])
}

/// Smallest angular distance between two unit vectors.
pub fn angle_between(a: Point, b: Point) -> f64 {
    let d = (angle_of(a) - angle_of(b)).rem_euclid(TAU);
    d.min(TAU - d)
}

#[allow(dead_code)]
const _HALF_TURN: f64 = PI;

#[cfg(test)]
mod tests {
    use super::*;

    const S: usize = DEFAULT_ANGLE_SAMPLES;

    #[test]
    fn flat_half_plane_frame() {
        let dom = GraphDomain2D::flat(1.0);
        for side in [Side::Exterior, Side::Interior] {
            let f = fit_supporting_plane(&dom, 0.5, side, S).unwrap();
            assert!((f.normal[0]).abs() < 1e-9 && (f.normal[1] - 1.0).abs() < 1e-12, "{f:?}");
            assert!(f.slack < 1e-12);
            assert!((norm(f.normal) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tilted_half_plane_frame() {
        let dom = GraphDomain2D::tilted(1.0, 1.0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for side in [Side::Exterior, Side::Interior] {
            let f = fit_supporting_plane(&dom, 0.5, side, S).unwrap();
            assert!((f.normal[0] + s).abs() < 1e-9 && (f.normal[1] - s).abs() < 1e-9, "{f:?}");
            assert!(f.slack < 1e-12);
        }
    }

    #[test]
    fn log_example_slack_within_closed_form_bound() {
        let dom = GraphDomain2D::log_example();
        let r: f64 = 0.25;
        let f = fit_supporting_plane(&dom, r, Side::Exterior, S).unwrap();
        let bound = 1.0 / (r.ln() * r.ln());
        let norm_factor = (1.0 + bound).sqrt();
        assert!(f.slack <= bound / norm_factor, "slack {} vs {}", f.slack, bound / norm_factor);
    }

    #[test]
    fn bad_arguments() {
        let dom = GraphDomain2D::flat(1.0);
        assert!(matches!(fit_supporting_plane(&dom, 0.5, Side::Exterior, 10), Err(LabError::Precondition(_))));
        assert!(matches!(fit_supporting_plane(&dom, 2.0, Side::Exterior, S), Err(LabError::Domain(_))));
        assert!(GraphDomain2D::new(Profile::Tilted { slope: 1.0 }, -1.0).is_err());
        assert!(GraphDomain2D::new(Profile::Table { points: vec![(-1.0, 1.0), (1.0, 1.0)] }, 1.0).is_err());
    }

    #[test]
    fn flat_certificate_has_zero_k() {
        let dom = GraphDomain2D::flat(1.0);
        let m = Modulus::power(1.0).unwrap();
        let cert = check_reifenberg(&dom, &m, Side::Exterior, 0.5, 10).unwrap();
        assert!(cert.passed);
        assert_eq!(cert.fitted_k, 0.0);
        let lim = limit_normal(&cert).unwrap();
        assert!((lim.normal[1] - 1.0).abs() < 1e-12);
        assert!(lim.cauchy_tail.iter().all(|c| c.sup_diff < 1e-9 && c.holds));
    }

    #[test]
    fn zero_modulus_requires_exact_flatness() {
        let m = Modulus::zero(1.0);
        let flat = check_reifenberg(&GraphDomain2D::flat(1.0), &m, Side::Exterior, 0.5, 5).unwrap();
        assert!(flat.passed);
        let cusp = GraphDomain2D::new(Profile::PowerCusp { exponent: 1.5 }, 1.0).unwrap();
        let c = check_reifenberg(&cusp, &m, Side::Interior, 0.5, 5).unwrap();
        assert!(!c.passed);
    }

    #[test]
    fn limit_normal_requires_pass() {
        let dom = GraphDomain2D::log_example();
        let cert = check_reifenberg(&dom, &Modulus::power(1.0).unwrap(), Side::Exterior, 0.5, 6).unwrap();
        assert!(!cert.passed);
        assert!(matches!(limit_normal(&cert), Err(LabError::Precondition(_))));
    }

    #[test]
    fn modulus_radius_mismatch() {
        let dom = GraphDomain2D::flat(1.0);
        let m = Modulus::inv_log_sq();
        assert!(matches!(check_reifenberg(&dom, &m, Side::Exterior, 0.5, 5), Err(LabError::Domain(_))));
    }

    #[test]
    fn power_cusp_is_exterior_flat_but_not_interior() {
        let dom = GraphDomain2D::new(Profile::PowerCusp { exponent: 0.5 }, 1.0).unwrap();
        let m = Modulus::power(0.5).unwrap();
        let ext = check_reifenberg(&dom, &m, Side::Exterior, 0.5, 8).unwrap();
        assert!(ext.passed);
        let int = check_reifenberg(&dom, &m, Side::Interior, 0.5, 8).unwrap();
        assert!(!int.passed);
    }

    #[test]
    fn theta_sweep_reports_requested_ratios() {
        let dom = GraphDomain2D::log_example();
        let opts = CheckOptions {
            thetas: Some(vec![0.5, 0.25]),
            ..CheckOptions::default()
        };
        let cert = check_reifenberg_with(&dom, &Modulus::inv_log_sq(), Side::Exterior, 0.5, 5, &opts).unwrap();
        let sweep = cert.theta_sweep.unwrap();
        assert_eq!(sweep.len(), 2);
        assert!(sweep.iter().all(|&(_, k)| k.is_finite() && k >= 0.0));
    }
}
