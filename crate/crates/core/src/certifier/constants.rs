use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::modulus::Modulus;
use crate::pucci::Ellipticity;

/// How `K(η)` depends on the chosen `η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KEta {
    Constant { k: f64 },
    /// `K(η) = k · max(1, |ln η|)`, the growth seen on logarithmic domains.
    LogScaled { k: f64 },
}

impl KEta {
    pub fn constant(k: f64) -> Self {
        KEta::Constant { k }
    }

    /// `K(η)`, clamped below by 1.
    pub fn at(&self, eta: f64) -> f64 {
        let raw = match self {
            KEta::Constant { k } => *k,
            KEta::LogScaled { k } => k * eta.ln().abs().max(1.0),
        };
        raw.max(1.0)
    }
}

/// Inputs shared by both constant selections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofInputs {
    pub ellipticity: Ellipticity,
    /// Hölder exponent `α` of the flat-boundary expansion.
    #[serde(alias = "krylov_alpha")]
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub k_eta: KEta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Modulus>,
}

impl Default for ProofInputs {
    fn default() -> Self {
        Self {
            ellipticity: Ellipticity {
                lambda: 1.0,
                big_lambda: 2.0,
            },
            alpha: 0.5,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            k_eta: KEta::constant(1.0),
            modulus: None,
        }
    }
}

impl ProofInputs {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(LabError::Precondition(format!("α must lie in (0, 1), got {}", self.alpha)));
        }
        for (name, v) in [("C1", self.c1), ("C2", self.c2), ("C3", self.c3)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::Precondition(format!("{name} must be positive, got {v}")));
            }
        }
        let k = match self.k_eta {
            KEta::Constant { k } | KEta::LogScaled { k } => k,
        };
        if !(k > 0.0 && k.is_finite()) {
            return Err(LabError::Precondition(format!("K must be positive, got {k}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofKind {
    Lipschitz,
    Hopf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
}

/// One evaluated inequality. `slack` is positive when the inequality holds
/// with room to spare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Relative tolerance for the defining equalities, e.g. `C̄ = C₂/η^{α₀}`.
pub const SLACK_FLOOR: f64 = 1e-12;

impl ConstraintCheck {
    fn new(name: &str, lhs: f64, relation: Relation, rhs: f64) -> Self {
        let (slack, holds) = match relation {
            Relation::Le => (rhs - lhs, lhs <= rhs),
            Relation::Lt => (rhs - lhs, lhs < rhs),
            Relation::Ge => (lhs - rhs, lhs >= rhs),
            Relation::Eq => {
                let d = (lhs - rhs).abs();
                let tol = SLACK_FLOOR * lhs.abs().max(rhs.abs());
                (tol - d, d <= tol)
            }
        };
        Self {
            name: name.to_string(),
            lhs,
            relation,
            rhs,
            slack,
            holds: holds && lhs.is_finite() && rhs.is_finite(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofConstants {
    pub kind: ProofKind,
    pub alpha: f64,
    pub alpha0: f64,
    pub eta: f64,
    pub c0: f64,
    pub c_bar: f64,
    pub c_hat: f64,
    /// `K(η)` at the chosen `η`, after clamping to `≥ 1`.
    pub k_eta: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Hopf only: `ã = c₂` of the barrier lemma.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_tilde: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier_c2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta1: Option<f64>,
    /// Hopf only: Harnack ratio `c̃`, when measured.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_tilde: Option<f64>,
    pub checks: Vec<ConstraintCheck>,
}

impl ProofConstants {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

fn wedge(eta: f64, alpha0: f64) -> f64 {
    (1.0 - eta.powf(alpha0)) * (1.0 - eta)
}

/// Largest `η ∈ (0, 1)` with `(1 − η^{α₀})(1 − η) ≥ 1/2`; the left side is
/// decreasing in `η`.
fn wedge_limit(alpha0: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if wedge(mid, alpha0) >= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn finite_positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(LabError::Infeasible {
            constraint: format!("{name} = {v}"),
        })
    }
}

/// Picks the binding (smallest) of named upper bounds.
fn binding(bounds: &[(&str, f64)]) -> (String, f64) {
    let (name, v) = bounds
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one bound");
    (name.to_string(), *v)
}

/// Constants for the boundary Lipschitz induction: `η` first, then `c₀`,
/// then `Ĉ`; each free choice is the largest admissible value, halved.
pub fn select_constants_lipschitz(inputs: &ProofInputs) -> Result<ProofConstants> {
    inputs.validate()?;
    let alpha0 = 0.5 * inputs.alpha;
    let (c1, c2, c3) = (inputs.c1, inputs.c2, inputs.c3);

    let (eta_name, eta_max) = binding(&[
        ("C1 η^α0 <= 1/6", (1.0 / (6.0 * c1)).powf(1.0 / alpha0)),
        ("(1-η^α0)(1-η) >= 1/2", wedge_limit(alpha0)),
    ]);
    let eta = finite_positive(&eta_name, 0.5 * eta_max.min(1.0))?;
    let k = inputs.k_eta.at(eta);
    let ea = eta.powf(alpha0);
    let c_bar = c2 / ea;

    let (c0_name, c0_max) = binding(&[
        ("c0 K(η) < 1/4", 1.0 / (4.0 * k)),
        ("C2 K(η) c0 / η^(1+α0) <= 1/6", eta * ea / (6.0 * c2 * k)),
        ("3 c0 C̄ / η^(1+α0) <= 1/6", eta * ea / (18.0 * c_bar)),
        ("3 c0 K(η) C̄ / η^α0 <= 1/3", ea / (9.0 * k * c_bar)),
        ("c0 <= 1/4", 0.25),
    ]);
    let c0 = finite_positive(&c0_name, 0.5 * c0_max)?;
    let c_hat = finite_positive(
        "Ĉ c0 >= 1 and (C3+1)/(Ĉ η^(1+α0)) <= 1/6",
        (1.0 / c0).max(6.0 * (c3 + 1.0) / (eta * ea)) * (1.0 + 1e-12),
    )?;

    let mut pc = ProofConstants {
        kind: ProofKind::Lipschitz,
        alpha: inputs.alpha,
        alpha0,
        eta,
        c0,
        c_bar,
        c_hat,
        k_eta: k,
        c1,
        c2,
        c3,
        a_tilde: None,
        barrier_c2: None,
        delta1: None,
        c_tilde: None,
        checks: Vec::new(),
    };
    pc.checks = verify_constants(&pc);
    Ok(pc)
}

/// Constants for the Hopf induction: `η` first, then `Ĉ`, then `c₀`.
pub fn select_constants_hopf(inputs: &ProofInputs, delta1: f64, c2_barrier: f64) -> Result<ProofConstants> {
    inputs.validate()?;
    if !(delta1 > 0.0 && delta1.is_finite()) {
        return Err(LabError::Precondition(format!("δ₁ must be positive, got {delta1}")));
    }
    if !(c2_barrier > 0.0 && c2_barrier.is_finite()) {
        return Err(LabError::Precondition(format!("c₂ must be positive, got {c2_barrier}")));
    }
    let alpha0 = 0.5 * inputs.alpha;
    let (c1, c2, c3) = (inputs.c1, inputs.c2, inputs.c3);

    let (eta_name, eta_max) = binding(&[
        ("η <= δ1", delta1),
        ("C1 η^α0 <= 1/6", (1.0 / (6.0 * c1)).powf(1.0 / alpha0)),
        ("(1-η^α0)(1-η) >= 1/2", wedge_limit(alpha0)),
    ]);
    let eta = finite_positive(&eta_name, 0.5 * eta_max.min(1.0))?;
    let k = inputs.k_eta.at(eta);
    let ea = eta.powf(alpha0);
    let c_bar = c2 / (eta * ea);
    let c_hat = finite_positive("(K(η)+1)/(Ĉ η^α0) <= 1/3", 3.0 * (k + 1.0) / ea * (1.0 + 1e-12))?;
    let a_tilde = c2_barrier;

    let (c0_name, c0_max) = binding(&[
        ("3 c0 C̄ Ĉ <= ã/2", a_tilde / (6.0 * c_bar * c_hat)),
        ("C2 c0 K(η) / η <= 1/6", eta / (6.0 * c2 * k)),
        ("c0 <= 1/4", 0.25),
    ]);
    let c0 = finite_positive(&c0_name, 0.5 * c0_max)?;

    let mut pc = ProofConstants {
        kind: ProofKind::Hopf,
        alpha: inputs.alpha,
        alpha0,
        eta,
        c0,
        c_bar,
        c_hat,
        k_eta: k,
        c1,
        c2,
        c3,
        a_tilde: Some(a_tilde),
        barrier_c2: Some(c2_barrier),
        delta1: Some(delta1),
        c_tilde: None,
        checks: Vec::new(),
    };
    pc.checks = verify_constants(&pc);
    Ok(pc)
}

/// Re-evaluates every displayed inequality of the relevant proof from the
/// stored constants alone.
pub fn verify_constants(pc: &ProofConstants) -> Vec<ConstraintCheck> {
    let (eta, a0, c0, cb, ch, k) = (pc.eta, pc.alpha0, pc.c0, pc.c_bar, pc.c_hat, pc.k_eta);
    let ea = eta.powf(a0);
    let mut v = vec![
        ConstraintCheck::new("α0 = α/2", a0, Relation::Eq, 0.5 * pc.alpha),
        ConstraintCheck::new("C1 η^α0 <= 1/6", pc.c1 * ea, Relation::Le, 1.0 / 6.0),
        ConstraintCheck::new("(1-η^α0)(1-η) >= 1/2", wedge(eta, a0), Relation::Ge, 0.5),
        ConstraintCheck::new("K(η) >= 1", k, Relation::Ge, 1.0),
        ConstraintCheck::new("c0 <= 1/4", c0, Relation::Le, 0.25),
    ];
    match pc.kind {
        ProofKind::Lipschitz => v.extend([
            ConstraintCheck::new("C̄ = C2/η^α0", cb, Relation::Eq, pc.c2 / ea),
            ConstraintCheck::new("Ĉ c0 >= 1", ch * c0, Relation::Ge, 1.0),
            ConstraintCheck::new("c0 K(η) < 1/4", c0 * k, Relation::Lt, 0.25),
            ConstraintCheck::new("C2 K(η) c0 / η^(1+α0) <= 1/6", pc.c2 * k * c0 / (eta * ea), Relation::Le, 1.0 / 6.0),
            ConstraintCheck::new("3 c0 C̄ / η^(1+α0) <= 1/6", 3.0 * c0 * cb / (eta * ea), Relation::Le, 1.0 / 6.0),
            ConstraintCheck::new("3 c0 K(η) C̄ / η^α0 <= 1/3", 3.0 * c0 * k * cb / ea, Relation::Le, 1.0 / 3.0),
            ConstraintCheck::new("(C3+1)/(Ĉ η^(1+α0)) <= 1/6", (pc.c3 + 1.0) / (ch * eta * ea), Relation::Le, 1.0 / 6.0),
        ]),
        ProofKind::Hopf => {
            let at = pc.a_tilde.unwrap_or(f64::NAN);
            v.extend([
                ConstraintCheck::new("η <= δ1", eta, Relation::Le, pc.delta1.unwrap_or(f64::NAN)),
                ConstraintCheck::new("ã = c2", at, Relation::Eq, pc.barrier_c2.unwrap_or(f64::NAN)),
                ConstraintCheck::new("C̄ = C2/η^(1+α0)", cb, Relation::Eq, pc.c2 / (eta * ea)),
                ConstraintCheck::new("(K(η)+1)/(Ĉ η^α0) <= 1/3", (k + 1.0) / (ch * ea), Relation::Le, 1.0 / 3.0),
                ConstraintCheck::new("3 c0 C̄ Ĉ <= ã/2", 3.0 * c0 * cb * ch, Relation::Le, 0.5 * at),
                ConstraintCheck::new("C2 c0 K(η) / η <= 1/6", pc.c2 * c0 * k / eta, Relation::Le, 1.0 / 6.0),
            ]);
        }
    }
    v
}
