//! Dini moduli of continuity.
//!
//! A [`Modulus`] is a nondecreasing, nonnegative function on `(0, R]`. All
//! integrals of the form `∫ ω(r)/r dr` are evaluated after the substitution
//! `r = e^{-t}`, which turns them into `∫ ω(e^{-t}) dt` and removes the `1/r`
//! singularity. Every family therefore also exposes its log-coordinate
//! evaluation `t ↦ ω(e^{-t})`, which stays finite long after `e^{-t}`
//! underflows.

mod quadrature;

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use quadrature::{integrate, integrate_geometric};

/// Growth of the integral across two decades of the log-cutoff that marks a
/// modulus as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1.0;

/// Divergence is only tested for cutoffs below this radius.
pub const DIVERGENCE_CUTOFF: f64 = 1e-6;

const MAX_LOG_CUTOFF: f64 = 1e15;
/// Largest `-ln r₁` the rescaling search will try.
const RESCALE_LOG_LIMIT: f64 = 1e300;

/// Analytic or tabulated family of a modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `r ↦ r^α`, `α > 0`.
    Power { exponent: f64 },
    /// `r ↦ 1/ln²r` on `(0, 1)`.
    InvLogSq,
    /// `r ↦ 1/|ln r|` on `(0, 1)`. Not Dini.
    InvLog,
    /// Piecewise-linear through `(radius, value)` knots, extended linearly to
    /// zero below the first knot and held constant past the last one.
    Table { points: Vec<(f64, f64)> },
    /// Pointwise maximum.
    MaxOf { parts: Vec<Modulus> },
    /// `r ↦ c·ω(r)`, `c > 0`.
    Scaled { base: Box<Modulus>, factor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Modulus {
    pub family: Family,
    pub domain_radius: f64,
}

impl Modulus {
    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(LabError::Domain(format!("power exponent must be positive, got {exponent}")));
        }
        Ok(Self {
            family: Family::Power { exponent },
            domain_radius: 1.0,
        })
    }

    pub fn inv_log_sq() -> Self {
        Self {
            family: Family::InvLogSq,
            domain_radius: 0.5,
        }
    }

    pub fn inv_log() -> Self {
        Self {
            family: Family::InvLog,
            domain_radius: 0.5,
        }
    }

    /// The identically zero modulus on `(0, radius]`.
    pub fn zero(radius: f64) -> Self {
        Self {
            family: Family::Table {
                points: vec![(radius, 0.0)],
            },
            domain_radius: radius,
        }
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(LabError::Domain("table modulus needs at least one knot".into()));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(LabError::Domain(format!(
                    "table radii must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
            if w[1].1 < w[0].1 {
                return Err(LabError::Domain(format!(
                    "table values must be nondecreasing ({} then {})",
                    w[0].1, w[1].1
                )));
            }
        }
        if !(points[0].0 > 0.0) || points.iter().any(|p| !(p.1 >= 0.0) || !p.0.is_finite() || !p.1.is_finite()) {
            return Err(LabError::Domain("table knots must have positive radii and nonnegative finite values".into()));
        }
        let radius = points.last().map(|p| p.0).unwrap_or(1.0);
        Ok(Self {
            family: Family::Table { points },
            domain_radius: radius,
        })
    }

    pub fn max_of(parts: Vec<Modulus>) -> Result<Self> {
        if parts.is_empty() {
            return Err(LabError::Domain("max_of needs at least one modulus".into()));
        }
        let radius = parts.iter().map(|m| m.domain_radius).fold(f64::INFINITY, f64::min);
        Ok(Self {
            family: Family::MaxOf { parts },
            domain_radius: radius,
        })
    }

    pub fn scaled(base: Modulus, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(LabError::Domain(format!("scale factor must be positive, got {factor}")));
        }
        let radius = base.domain_radius;
        Ok(Self {
            family: Family::Scaled {
                base: Box::new(base),
                factor,
            },
            domain_radius: radius,
        })
    }

    /// Restricts or extends the domain radius, checking it against the family.
    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(LabError::Domain(format!("domain radius must be positive, got {radius}")));
        }
        if let Some(limit) = self.family_radius_limit() {
            if radius > limit {
                return Err(LabError::Domain(format!(
                    "domain radius {radius} exceeds the family's limit {limit}"
                )));
            }
        }
        self.domain_radius = radius;
        Ok(self)
    }

    fn family_radius_limit(&self) -> Option<f64> {
        match &self.family {
            // Both log families blow up at r = 1.
            Family::InvLogSq | Family::InvLog => Some(1.0 - 1e-12),
            Family::Power { .. } | Family::Table { .. } => None,
            Family::MaxOf { parts } => parts.iter().map(|p| p.domain_radius).reduce(f64::min),
            Family::Scaled { base, .. } => Some(base.domain_radius),
        }
    }

    /// Parses a built-in family name such as `inv-log-sq`, `inv_log`,
    /// `power:0.5`, `power(1)` or `zero`.
    pub fn from_name(name: &str) -> Result<Self> {
        let norm = name.trim().to_ascii_lowercase().replace('-', "_");
        let (head, arg) = match norm.find([':', '(', '=']) {
            Some(i) => (&norm[..i], Some(norm[i + 1..].trim_end_matches(')'))),
            None => (norm.as_str(), None),
        };
        let parse_arg = |what: &str| -> Result<f64> {
            arg.ok_or_else(|| LabError::Parse(format!("{what} needs a numeric argument")))?
                .parse::<f64>()
                .map_err(|e| LabError::Parse(format!("bad {what} argument: {e}")))
        };
        match head {
            "power" => Self::power(parse_arg("power")?),
            "inv_log_sq" | "invlogsq" => Ok(Self::inv_log_sq()),
            "inv_log" | "invlog" => Ok(Self::inv_log()),
            "zero" => Ok(Self::zero(arg.map(|_| parse_arg("zero")).transpose()?.unwrap_or(1.0))),
            other => Err(LabError::Parse(format!("unknown modulus family '{other}'"))),
        }
    }

    /// Loads a table modulus from two-column CSV `(radius, value)`.
    /// A non-numeric first row is treated as a header.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(LabError::Parse(format!("row {i}: expected two columns")));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(r), Ok(v)) => points.push((r, v)),
                _ if i == 0 => continue,
                _ => return Err(LabError::Parse(format!("row {i}: non-numeric entry"))),
            }
        }
        Self::table(points)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    /// `ω(r)` for `0 < r ≤ R`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || r > self.domain_radius * (1.0 + 1e-12) {
            return Err(LabError::Domain(format!(
                "r = {r} outside (0, {}]",
                self.domain_radius
            )));
        }
        Ok(self.eval_log(-r.ln()))
    }

    /// `ω(e^{-t})`, without a domain check.
    pub fn eval_log(&self, t: f64) -> f64 {
        match &self.family {
            Family::Power { exponent } => (-exponent * t).exp(),
            Family::InvLogSq => 1.0 / (t * t),
            Family::InvLog => 1.0 / t,
            Family::Table { points } => table_eval(points, (-t).exp()),
            Family::MaxOf { parts } => parts.iter().map(|p| p.eval_log(t)).fold(0.0, f64::max),
            Family::Scaled { base, factor } => factor * base.eval_log(t),
        }
    }

    /// Samples `ω` at `n` log-spaced radii in `[r_min, R]`.
    pub fn sample(&self, r_min: f64, n: usize) -> Vec<(f64, f64)> {
        let t_hi = -r_min.ln();
        let t_lo = -self.domain_radius.ln();
        (0..n)
            .map(|i| {
                let t = t_hi + (t_lo - t_hi) * i as f64 / (n.max(2) - 1) as f64;
                ((-t).exp(), self.eval_log(t))
            })
            .collect()
    }
}

fn table_eval(points: &[(f64, f64)], r: f64) -> f64 {
    let (r0, v0) = points[0];
    if r <= r0 {
        return v0 * r / r0;
    }
    let idx = points.partition_point(|p| p.0 < r);
    if idx >= points.len() {
        return points[points.len() - 1].1;
    }
    let (ra, va) = points[idx - 1];
    let (rb, vb) = points[idx];
    va + (vb - va) * (r - ra) / (rb - ra)
}

/// Two log-cutoffs `t₁ < t₂` (radii `e^{-t₁} > e^{-t₂}`) across which the
/// integral grows by more than [`DIVERGENCE_THRESHOLD`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceWitness {
    pub log_cutoff_outer: f64,
    pub log_cutoff_inner: f64,
    pub growth: f64,
    /// Growth over the following two decades; also above the threshold.
    pub next_growth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiniVerdict {
    pub is_dini: bool,
    /// Finite value of `∫_0^{r0} ω(r)/r dr` in the convergent case; the
    /// integral accumulated up to the witness cutoff otherwise.
    pub integral_estimate: f64,
    /// Smallest cutoff radius used (may underflow to 0, see `log_cutoff`).
    pub cutoff_used: f64,
    pub log_cutoff: f64,
    /// False when the cutoff limit was reached before the tolerance.
    pub converged: bool,
    pub witness: Option<DivergenceWitness>,
}

fn check_dini_args(m: &Modulus, r0: f64, tol: f64) -> Result<()> {
    if !(r0 > 0.0) || r0 > m.domain_radius * (1.0 + 1e-12) {
        return Err(LabError::Domain(format!("r0 = {r0} outside (0, {}]", m.domain_radius)));
    }
    if !(tol > 0.0) {
        return Err(LabError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let probe = m.eval_log(-r0.ln());
    if !probe.is_finite() || probe < 0.0 {
        return Err(LabError::Domain(format!("modulus not evaluable at r0 = {r0}")));
    }
    Ok(())
}

/// `∫_0^{r0} ω(r)/r dr` with a convergent/divergent verdict.
///
/// Cutoffs `ε = e^{-t}` are refined by doubling `t`. The integral is declared
/// convergent once a refinement adds less than `tol` (the geometric tail of
/// the last increments is added to the estimate), and divergent when, below
/// [`DIVERGENCE_CUTOFF`], it grows by more than [`DIVERGENCE_THRESHOLD`] across
/// two decades of `t` and again across the next two.
pub fn dini_integral(m: &Modulus, r0: f64, tol: f64) -> Result<DiniVerdict> {
    check_dini_args(m, r0, tol)?;
    let g = |t: f64| m.eval_log(t);
    let quad_tol = (tol * 1e-3).max(1e-16);
    let t0 = -r0.ln();
    let t_div = -DIVERGENCE_CUTOFF.ln();

    let mut cut = t0 + 1.0;
    let mut value = integrate(&g, t0, cut, quad_tol).value;
    let mut prev_inc: Option<f64> = None;
    while cut < MAX_LOG_CUTOFF {
        let next = 2.0 * cut;
        let inc = integrate(&g, cut, next, quad_tol).value;
        value += inc;
        cut = next;

        if cut >= t_div {
            let growth = integrate_geometric(&g, cut, 100.0 * cut, quad_tol);
            if growth > DIVERGENCE_THRESHOLD {
                let next_growth = integrate_geometric(&g, 100.0 * cut, 1e4 * cut, quad_tol);
                if next_growth > DIVERGENCE_THRESHOLD {
                    return Ok(DiniVerdict {
                        is_dini: false,
                        integral_estimate: value + growth + next_growth,
                        cutoff_used: (-1e4 * cut).exp(),
                        log_cutoff: 1e4 * cut,
                        converged: true,
                        witness: Some(DivergenceWitness {
                            log_cutoff_outer: cut,
                            log_cutoff_inner: 100.0 * cut,
                            growth,
                            next_growth,
                        }),
                    });
                }
            }
        }

        if inc < tol {
            let tail = match prev_inc {
                Some(p) if p > 0.0 && inc < p => {
                    let rho = inc / p;
                    inc * rho / (1.0 - rho)
                }
                _ => 0.0,
            };
            return Ok(DiniVerdict {
                is_dini: true,
                integral_estimate: value + tail,
                cutoff_used: (-cut).exp(),
                log_cutoff: cut,
                converged: true,
                witness: None,
            });
        }
        prev_inc = Some(inc);
    }
    Ok(DiniVerdict {
        is_dini: true,
        integral_estimate: value,
        cutoff_used: (-cut).exp(),
        log_cutoff: cut,
        converged: false,
        witness: None,
    })
}

/// `∫_a^b ω(r)/r dr` for `0 < a < b ≤ R`.
pub fn dini_integral_between(m: &Modulus, a: f64, b: f64, tol: f64) -> Result<f64> {
    check_dini_args(m, b, tol)?;
    if !(a > 0.0 && a < b) {
        return Err(LabError::Domain(format!("need 0 < a < b, got a = {a}, b = {b}")));
    }
    let g = |t: f64| m.eval_log(t);
    Ok(integrate_geometric(&g, -b.ln(), -a.ln(), (tol * 1e-3).max(1e-16)))
}

/// Tail `∫_0^{e^{-t}} ω(r)/r dr`: closed form for the analytic families,
/// otherwise refined until increments drop below `tol`.
pub(crate) fn tail_integral(m: &Modulus, t: f64, tol: f64) -> f64 {
    if let Some(v) = closed_tail(&m.family, t) {
        return v;
    }
    let g = |s: f64| m.eval_log(s);
    let mut cut = t.max(0.0) + 1.0;
    let mut value = integrate(&g, t, cut, tol * 1e-2).value;
    let mut prev: Option<f64> = None;
    while cut < MAX_LOG_CUTOFF {
        let inc = integrate(&g, cut, 2.0 * cut, tol * 1e-2).value;
        value += inc;
        cut *= 2.0;
        if inc < tol {
            if let Some(p) = prev {
                if p > 0.0 && inc < p {
                    let rho = inc / p;
                    value += inc * rho / (1.0 - rho);
                }
            }
            return value;
        }
        prev = Some(inc);
    }
    value
}

fn closed_tail(f: &Family, t: f64) -> Option<f64> {
    match f {
        Family::Power { exponent } => Some((-exponent * t).exp() / exponent),
        Family::InvLogSq if t > 0.0 => Some(1.0 / t),
        Family::Scaled { base, factor } => closed_tail(&base.family, t).map(|v| factor * v),
        _ => None,
    }
}

/// Largest `r₁ ≤ R` with `ω(r₁) ≤ c0` and `∫_0^{r₁} ω(s)/s ds ≤ c0`, located by
/// bisection in `t = -ln r` to relative tolerance `1e-10` in `t`.
pub fn rescale_radius(m: &Modulus, c0: f64) -> Result<f64> {
    rescale_log_radius(m, c0).map(|t| (-t).exp())
}

/// `-ln r₁` for the radius of [`rescale_radius`]; stays finite when `r₁`
/// itself underflows.
pub fn rescale_log_radius(m: &Modulus, c0: f64) -> Result<f64> {
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(LabError::Domain(format!("c0 must be positive, got {c0}")));
    }
    let verdict = dini_integral(m, m.domain_radius, 1e-9)?;
    if !verdict.is_dini {
        return Err(LabError::Precondition("modulus is not a Dini function".into()));
    }
    let tail_tol = c0 * 1e-9;
    let feasible = |t: f64| m.eval_log(t) <= c0 && tail_integral(m, t, tail_tol) <= c0;

    let t_top = -m.domain_radius.ln();
    if feasible(t_top) {
        return Ok(t_top);
    }
    let mut lo = t_top;
    let mut step = 1.0;
    let mut hi = t_top + step;
    while !feasible(hi) {
        lo = hi;
        step *= 2.0;
        hi = t_top + step;
        if hi > RESCALE_LOG_LIMIT {
            return Err(LabError::Precondition(format!(
                "no radius satisfies the smallness conditions for c0 = {c0}"
            )));
        }
    }
    while hi - lo > 1e-10 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn evaluations() {
        assert_relative_eq!(Modulus::power(1.0).unwrap().eval(0.25).unwrap(), 0.25, epsilon = 1e-15);
        let ln4 = 4.0f64.ln();
        let ils = Modulus::inv_log_sq().eval(0.25).unwrap();
        assert_relative_eq!(ils, 1.0 / (ln4 * ln4), epsilon = 1e-14);
        assert!((ils - 0.520342).abs() < 1e-6);
        let mx = Modulus::max_of(vec![Modulus::power(1.0).unwrap(), Modulus::inv_log_sq()]).unwrap();
        assert_relative_eq!(mx.eval(0.25).unwrap(), ils, epsilon = 1e-15);
    }

    #[test]
    fn eval_outside_domain_is_an_error() {
        let m = Modulus::inv_log_sq();
        assert!(matches!(m.eval(0.75), Err(LabError::Domain(_))));
        assert!(matches!(m.eval(0.0), Err(LabError::Domain(_))));
        assert!(matches!(m.eval(-1.0), Err(LabError::Domain(_))));
    }

    #[test]
    fn table_interpolation_and_linear_extension() {
        let m = Modulus::table(vec![(0.1, 0.2), (0.5, 0.4), (1.0, 0.4)]).unwrap();
        assert_relative_eq!(m.eval(0.05).unwrap(), 0.1, epsilon = 1e-14);
        assert_relative_eq!(m.eval(0.3).unwrap(), 0.3, epsilon = 1e-14);
        assert_relative_eq!(m.eval(1.0).unwrap(), 0.4, epsilon = 1e-14);
        assert!(Modulus::table(vec![(0.2, 0.1), (0.1, 0.2)]).is_err());
        assert!(Modulus::table(vec![(0.1, 0.3), (0.2, 0.2)]).is_err());
    }

    #[test]
    fn names_parse() {
        assert_eq!(Modulus::from_name("inv-log").unwrap().family, Family::InvLog);
        assert_eq!(Modulus::from_name("inv_log_sq").unwrap().family, Family::InvLogSq);
        assert_eq!(
            Modulus::from_name("power:0.5").unwrap().family,
            Family::Power { exponent: 0.5 }
        );
        assert_eq!(
            Modulus::from_name("power(2)").unwrap().family,
            Family::Power { exponent: 2.0 }
        );
        assert!(Modulus::from_name("bogus").is_err());
    }

    #[test]
    fn csv_with_header() {
        let data = "radius,value\n0.1,0.01\n0.5,0.2\n";
        let m = Modulus::from_csv_reader(data.as_bytes()).unwrap();
        assert_relative_eq!(m.eval(0.5).unwrap(), 0.2);
        assert!(Modulus::from_csv_reader("0.5,0.1\n0.4,0.2\n".as_bytes()).is_err());
    }

    #[test]
    fn inv_log_sq_integral_matches_antiderivative() {
        let v = dini_integral(&Modulus::inv_log_sq(), 0.5, 1e-6).unwrap();
        assert!(v.is_dini);
        assert!((v.integral_estimate - 1.0 / 2.0f64.ln()).abs() < 1e-6, "{}", v.integral_estimate);
    }

    #[test]
    fn power_integral_closed_form() {
        for &a in &[0.25, 0.5, 1.0, 2.0] {
            let m = Modulus::power(a).unwrap();
            for &r0 in &[1.0, 0.3, 1e-3] {
                let v = dini_integral(&m, r0, 1e-11).unwrap();
                let exact = r0.powf(a) / a;
                assert!(v.is_dini);
                assert!((v.integral_estimate - exact).abs() < 1e-9, "a={a} r0={r0}: {}", v.integral_estimate);
            }
        }
    }

    #[test]
    fn inv_log_is_flagged() {
        for &r0 in &[0.5, 0.1, 1e-3, 1e-8, 1e-30] {
            let v = dini_integral(&Modulus::inv_log(), r0, 1e-6).unwrap();
            assert!(!v.is_dini, "r0 = {r0}");
            let w = v.witness.unwrap();
            assert!(w.log_cutoff_inner > w.log_cutoff_outer);
            assert!(w.growth > DIVERGENCE_THRESHOLD);
        }
    }

    #[test]
    fn small_power_is_not_misflagged() {
        // ∫ e^{-αt} over two decades below 1e-6 exceeds 1 for α = 0.01,
        // but the following two decades do not.
        let v = dini_integral(&Modulus::power(0.01).unwrap(), 1.0, 1e-8).unwrap();
        assert!(v.is_dini);
        assert!((v.integral_estimate - 100.0).abs() < 1e-5, "{}", v.integral_estimate);
    }

    #[test]
    fn rescale_examples() {
        let r = rescale_radius(&Modulus::inv_log_sq(), 0.01).unwrap();
        let expect = (-100.0f64).exp();
        assert!((r / expect - 1.0).abs() < 1e-8, "{r:e} vs {expect:e}");
        let r = rescale_radius(&Modulus::power(1.0).unwrap(), 0.01).unwrap();
        assert!((r / 0.01 - 1.0).abs() < 1e-8);
        let m = Modulus::scaled(Modulus::power(1.0).unwrap(), 2.0).unwrap();
        let r = rescale_radius(&m, 0.01).unwrap();
        assert!((r / 0.005 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rescale_rejects_non_dini() {
        assert!(matches!(
            rescale_radius(&Modulus::inv_log(), 0.01),
            Err(LabError::Precondition(_))
        ));
    }

    #[test]
    fn rescale_of_zero_is_full_radius() {
        assert_eq!(rescale_radius(&Modulus::zero(1.0), 0.01).unwrap(), 1.0);
    }
}
