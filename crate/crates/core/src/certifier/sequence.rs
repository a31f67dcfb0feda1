use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::ReifenbergCertificate;
use crate::modulus::{rescale_log_radius, Modulus};

/// The scale recursion `A₀ = c₀`, `A_k = max(ω(η^k), η^{α₀} A_{k-1})` for a
/// modulus rescaled so that its smallness radius becomes 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSequence {
    pub eta: f64,
    pub alpha0: f64,
    pub c0: f64,
    /// `-ln r₁` of the rescaling radius.
    pub log_r1: f64,
    /// `ω(r₁ η^k)` for `k = 0..=k_max`.
    pub omega: Vec<f64>,
    pub big_a: Vec<f64>,
    /// `a_k`, with `a_0 = 0`; all zero until a sequence is supplied.
    pub small_a: Vec<f64>,
    /// `∑_{i ≤ k} A_i`.
    pub partial_sums: Vec<f64>,
    /// `(c₀ + ∑_{1 ≤ i ≤ k} ω(η^i)) / (1 − η^{α₀})`, the unrolled recursion
    /// bound; `partial_sums[k]` never exceeds it.
    pub unrolled_bounds: Vec<f64>,
    pub bound: f64,
    /// `(1 − η^{α₀})(1 − η)`.
    pub wedge: f64,
    /// Whether `(1 − η^{α₀})(1 − η) ≥ 1/2`, the proviso of the `3c₀` bound.
    pub bound_applicable: bool,
    /// `partial_sum ≤ 3c₀` at every `k`; `None` when the bound is not applicable.
    pub passed: Option<bool>,
    /// `ω(η^k) ≤ A_k ≤ A_{k+1}/η^{α₀}` at every `k < k_max`.
    pub recursion_bounds_hold: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normals: Option<Vec<[f64; 2]>>,
}

pub fn scale_sequence(m: &Modulus, eta: f64, alpha0: f64, c0: f64, k_max: usize) -> Result<ScaleSequence> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(LabError::Precondition(format!("η must lie in (0, 1), got {eta}")));
    }
    if !(alpha0 > 0.0 && alpha0 < 1.0) {
        return Err(LabError::Precondition(format!("α₀ must lie in (0, 1), got {alpha0}")));
    }
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(LabError::Precondition(format!("c₀ must be positive, got {c0}")));
    }
    let t1 = rescale_log_radius(m, c0)?;
    let step = -eta.ln();
    let ea = eta.powf(alpha0);

    let omega: Vec<f64> = (0..=k_max).map(|k| m.eval_log(t1 + k as f64 * step)).collect();
    let mut big_a = Vec::with_capacity(k_max + 1);
    big_a.push(c0);
    for k in 1..=k_max {
        big_a.push(omega[k].max(ea * big_a[k - 1]));
    }
    let mut partial_sums = Vec::with_capacity(k_max + 1);
    let mut unrolled_bounds = Vec::with_capacity(k_max + 1);
    let (mut s, mut w) = (0.0, 0.0);
    for k in 0..=k_max {
        s += big_a[k];
        if k > 0 {
            w += omega[k];
        }
        partial_sums.push(s);
        unrolled_bounds.push((c0 + w) / (1.0 - ea));
    }

    let bound = 3.0 * c0;
    let wedge = (1.0 - ea) * (1.0 - eta);
    let bound_applicable = wedge >= 0.5;
    let passed = bound_applicable.then(|| partial_sums.iter().all(|p| *p <= bound));
    let recursion_bounds_hold = (0..=k_max).all(|k| {
        let lower = omega[k] <= big_a[k];
        let upper = k == k_max || big_a[k] <= big_a[k + 1] / ea * (1.0 + 1e-12);
        lower && upper
    });

    Ok(ScaleSequence {
        eta,
        alpha0,
        c0,
        log_r1: t1,
        omega,
        big_a,
        small_a: vec![0.0; k_max + 1],
        partial_sums,
        unrolled_bounds,
        bound,
        wedge,
        bound_applicable,
        passed,
        recursion_bounds_hold,
        normals: None,
    })
}

impl ScaleSequence {
    pub fn k_max(&self) -> usize {
        self.big_a.len() - 1
    }

    pub fn total(&self) -> f64 {
        *self.partial_sums.last().expect("k_max ≥ 0")
    }

    /// Copies frame normals at matching scales; needs `cert.eta_geo == η`.
    pub fn with_frames(mut self, cert: &ReifenbergCertificate) -> Result<Self> {
        if (cert.eta_geo - self.eta).abs() > 1e-12 * self.eta {
            return Err(LabError::Precondition(format!(
                "certificate scale ratio {} differs from η = {}",
                cert.eta_geo, self.eta
            )));
        }
        self.normals = Some(cert.frames().take(self.big_a.len()).map(|f| f.normal).collect());
        Ok(self)
    }

    /// Installs `a` after checking `a_0 = 0` and `|a_k − a_{k−1}| ≤ bound·A_k`,
    /// where `bound` is `C̄ĈM`.
    pub fn with_a(mut self, a: Vec<f64>, bound: f64) -> Result<Self> {
        if a.len() != self.big_a.len() {
            return Err(LabError::Precondition(format!(
                "a-sequence has {} entries, expected {}",
                a.len(),
                self.big_a.len()
            )));
        }
        if a[0] != 0.0 {
            return Err(LabError::Precondition("a_0 must be 0".into()));
        }
        for k in 1..a.len() {
            let lim = bound * self.big_a[k] * (1.0 + 1e-12);
            if (a[k] - a[k - 1]).abs() > lim {
                return Err(LabError::Precondition(format!(
                    "|a_{k} − a_{}| = {} exceeds {lim}",
                    k - 1,
                    (a[k] - a[k - 1]).abs()
                )));
            }
        }
        self.small_a = a;
        Ok(self)
    }

    /// The largest admissible `a`: every increment is exactly `bound·A_k`.
    pub fn extremal_a(&self, bound: f64) -> Vec<f64> {
        let mut a = vec![0.0; self.big_a.len()];
        for k in 1..a.len() {
            a[k] = a[k - 1] + bound * self.big_a[k];
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_modulus_with_wide_ratio_is_not_applicable() {
        let s = scale_sequence(&Modulus::zero(1.0), 0.5, 0.25, 0.01, 40).unwrap();
        for (k, a) in s.big_a.iter().enumerate() {
            assert!((a - 0.01 * 2f64.powf(-(k as f64) / 4.0)).abs() < 1e-15);
        }
        assert!(!s.bound_applicable);
        assert_eq!(s.passed, None);
        assert!(s.recursion_bounds_hold);
    }

    #[test]
    fn zero_modulus_with_small_ratio_sums_geometrically() {
        let s = scale_sequence(&Modulus::zero(1.0), 1e-4, 0.25, 0.01, 60).unwrap();
        assert!(s.bound_applicable);
        assert_eq!(s.passed, Some(true));
        let geometric = 0.01 / (1.0 - 0.1);
        assert!((s.total() - geometric).abs() < 1e-12);
    }

    #[test]
    fn power_modulus_partial_sums_stay_below_bound() {
        let m = Modulus::power(1.0).unwrap();
        for &(eta, a0, c0) in &[(1e-4, 0.25, 0.01), (0.01, 0.45, 0.2), (1e-6, 0.1, 0.05)] {
            let s = scale_sequence(&m, eta, a0, c0, 50).unwrap();
            assert!(s.bound_applicable);
            assert_eq!(s.passed, Some(true));
            assert!(s.recursion_bounds_hold);
            for (p, b) in s.partial_sums.iter().zip(&s.unrolled_bounds) {
                assert!(*p <= b * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn increments_are_enforced() {
        let s = scale_sequence(&Modulus::inv_log_sq(), 1e-4, 0.25, 0.01, 5).unwrap();
        let a = s.extremal_a(2.0);
        let ok = s.clone().with_a(a.clone(), 2.0).unwrap();
        assert_eq!(ok.small_a, a);
        let mut bad = a;
        bad[3] += 1.0;
        assert!(s.with_a(bad, 2.0).is_err());
    }
}
