//! Scenario parameters. Every scenario is one struct that doubles as the
//! clap argument set and as the TOML section body, so defaults live in one
//! place (the `default_value` attributes).

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use serde::{Deserialize, Serialize};

use lab_core::pucci::OpMode;
use lab_core::Side;

macro_rules! defaults_from_clap {
    ($($t:ty),* $(,)?) => {
        $(impl Default for $t {
            fn default() -> Self {
                <$t as Parser>::parse_from(["lab"])
            }
        })*
    };
}

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[serde(default)]
pub struct DiniConfig {
    /// Modulus: power:<a>, inv-log-sq, inv-log, zero, or a CSV table path.
    #[arg(long, default_value = "inv-log-sq")]
    pub family: String,
    #[arg(long, default_value_t = 0.5)]
    pub r0: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[serde(default)]
pub struct ReifenbergConfig {
    /// Profile: flat, tilted:<slope>, log_example, power_cusp:<a>, or a CSV path.
    #[arg(long, default_value = "log_example")]
    pub domain: String,
    /// Half-width of the profile interval; the profile's own default if unset.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value = "ext")]
    pub side: Side,
    #[arg(long, default_value = "inv-log-sq")]
    pub modulus: String,
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    #[arg(long, default_value_t = 10)]
    pub kmax: usize,
    /// Largest scale; defaults to the domain radius.
    #[arg(long)]
    pub r_top: Option<f64>,
    /// Also report K(θ) for these scale ratios.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_sweep: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    /// half_disc, half_cube, log_domain, or graph:<profile>.
    #[arg(long, default_value = "half_disc")]
    pub shape: String,
    /// Radius (side length for the half-cube); the shape's default if unset.
    #[arg(long)]
    pub size: Option<f64>,
    #[arg(long, default_value = "sup")]
    pub mode: OpMode,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long = "Lambda", default_value_t = 2.0)]
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    /// Boundary data: linear-y, zero-one, zero, constant:<c>, linear:<c>,<a1>,<a2>.
    #[arg(long, default_value = "zero-one")]
    pub bc: String,
    /// Right-hand side: zero or constant:<c>.
    #[arg(long, default_value = "zero")]
    pub rhs: String,
    #[arg(long, default_value_t = 1.0 / 64.0)]
    pub h: f64,
    /// Absolute residual tolerance; 1e-8 times the data scale if unset.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = lab_core::fdsolver::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long)]
    pub omega: Option<f64>,
    /// Stencil width; 1, 2 or 3.
    #[arg(long, default_value_t = 3)]
    pub stencil: usize,
}

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldSource {
    #[command(flatten)]
    #[serde(flatten)]
    pub solve: SolveConfig,
    /// Load the field from a solution CSV instead of solving.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<PathBuf>,
    /// Write the solved field as solution.csv.
    #[arg(long)]
    pub write_solution: bool,
}

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[serde(default)]
pub struct LipschitzProbeConfig {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldSource,
    #[arg(long, value_delimiter = ',', default_value = "0.0078125,0.015625,0.03125,0.0625,0.125,0.25")]
    pub scales: Vec<f64>,
    /// Pass when max q(r) ≤ this multiple of the median.
    #[arg(long, default_value_t = 1.5)]
    pub max_ratio: f64,
}

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[serde(default)]
pub struct HopfProbeConfig {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldSource,
    /// Ray directions as angles in degrees from the x-axis.
    #[arg(long, value_delimiter = ',', default_value = "90,45")]
    pub angles: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.00390625,0.0078125,0.015625,0.03125,0.0625,0.125")]
    pub ts: Vec<f64>,
}

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[serde(default)]
pub struct C1AlphaProbeConfig {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldSource,
    #[arg(long, value_delimiter = ',', default_value = "0.03125,0.0625,0.125,0.25")]
    pub scales: Vec<f64>,
    /// Pass when a > 0 and alpha_hat exceeds this.
    #[arg(long, default_value_t = 0.05)]
    pub min_alpha: f64,
}

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[serde(default)]
pub struct FmodConfig {
    #[arg(long, default_value = "half_disc")]
    pub shape: String,
    #[arg(long)]
    pub size: Option<f64>,
    #[arg(long, default_value_t = 1.0 / 64.0)]
    pub h: f64,
    /// Right-hand side: zero, constant:<c>, or power:<p> for |x|^p.
    #[arg(long, default_value = "power:-0.5")]
    pub rhs: String,
    #[arg(long, value_delimiter = ',', default_value = "0.0625,0.125,0.25,0.5")]
    pub scales: Vec<f64>,
}

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstantsConfig {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long = "C1", default_value_t = 1.0)]
    #[serde(rename = "C1")]
    pub c1: f64,
    #[arg(long = "C2", default_value_t = 1.0)]
    #[serde(rename = "C2")]
    pub c2: f64,
    #[arg(long = "C3", default_value_t = 1.0)]
    #[serde(rename = "C3")]
    pub c3: f64,
    #[arg(long = "K", default_value_t = 1.0)]
    #[serde(rename = "K")]
    pub k: f64,
    /// Treat K as k·max(1, |ln η|) instead of a constant.
    #[arg(long)]
    pub k_log: bool,
    #[arg(long, default_value = "inv-log-sq")]
    pub modulus: String,
    /// Length of the reported scale sequence.
    #[arg(long, default_value_t = 40)]
    pub kmax: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long = "Lambda", default_value_t = 2.0)]
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
}

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[serde(default)]
pub struct HopfConstantsConfig {
    #[command(flatten)]
    #[serde(flatten)]
    pub constants: ConstantsConfig,
    #[arg(long, default_value_t = 0.25)]
    pub delta1: f64,
    /// Barrier slope c₂ (becomes ã).
    #[arg(long = "c2-barrier", default_value_t = 0.1)]
    pub c2_barrier: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum InductionKind {
    Lipschitz,
    Hopf,
}

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[serde(default)]
pub struct InductionConfig {
    #[command(flatten)]
    #[serde(flatten)]
    pub constants: HopfConstantsConfig,
    /// Solution CSV (x,y,value).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<PathBuf>,
    /// ReifenbergCertificate JSON whose frames supply the normals.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cert: Option<PathBuf>,
    /// Shape the solution lives on.
    #[arg(long, default_value = "log_domain")]
    pub shape: String,
    #[arg(long)]
    pub size: Option<f64>,
    #[arg(long, value_enum, default_value = "lipschitz")]
    pub mode: InductionKind,
    #[arg(long, default_value_t = 0)]
    pub k_min: usize,
    #[arg(long, default_value_t = 0.0)]
    pub f_norm: f64,
    #[arg(long, default_value_t = 0.0)]
    pub g_seminorm: f64,
    /// Solve the per-scale auxiliary barrier problems too (one solve per scale).
    #[arg(long)]
    pub with_aux_solves: bool,
}

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[serde(default)]
pub struct DemoConfig {
    #[arg(long, default_value_t = 1.0 / 512.0)]
    pub h: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long = "Lambda", default_value_t = 2.0)]
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    #[arg(long, default_value_t = 3)]
    pub stencil: usize,
    /// Geometry scales are 2⁻²·η^k for k = 0..=kmax.
    #[arg(long, default_value_t = 10)]
    pub kmax: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.0078125,0.015625,0.03125,0.0625,0.125,0.25")]
    pub scales: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.00390625,0.0078125,0.015625,0.03125,0.0625,0.125")]
    pub ts: Vec<f64>,
    #[arg(long, default_value_t = 1.5)]
    pub max_ratio: f64,
    /// Skip the Pucci solve (harmonic field only).
    #[arg(long)]
    pub skip_pucci: bool,
}

defaults_from_clap!(
    DiniConfig,
    ReifenbergConfig,
    SolveConfig,
    FieldSource,
    LipschitzProbeConfig,
    HopfProbeConfig,
    C1AlphaProbeConfig,
    FmodConfig,
    ConstantsConfig,
    HopfConstantsConfig,
    InductionConfig,
    DemoConfig,
);

/// One runnable pipeline with its parameters.
#[derive(Debug, Clone)]
pub enum Scenario {
    DiniCheck(DiniConfig),
    ReifenbergVerify(ReifenbergConfig),
    Solve(SolveConfig),
    ProbeLipschitz(LipschitzProbeConfig),
    ProbeHopf(HopfProbeConfig),
    ProbeC1alpha(C1AlphaProbeConfig),
    ProbeFmod(FmodConfig),
    CertifyLipschitz(ConstantsConfig),
    CertifyHopf(HopfConstantsConfig),
    CertifyInduction(InductionConfig),
    DemoLogDomain(DemoConfig),
}

pub const SCENARIOS: &[&str] = &[
    "dini-check",
    "reifenberg-verify",
    "solve",
    "probe-lipschitz",
    "probe-hopf",
    "probe-c1alpha",
    "probe-fmod",
    "certify-lipschitz",
    "certify-hopf",
    "certify-induction",
    "demo-log-domain",
];

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::DiniCheck(_) => "dini-check",
            Scenario::ReifenbergVerify(_) => "reifenberg-verify",
            Scenario::Solve(_) => "solve",
            Scenario::ProbeLipschitz(_) => "probe-lipschitz",
            Scenario::ProbeHopf(_) => "probe-hopf",
            Scenario::ProbeC1alpha(_) => "probe-c1alpha",
            Scenario::ProbeFmod(_) => "probe-fmod",
            Scenario::CertifyLipschitz(_) => "certify-lipschitz",
            Scenario::CertifyHopf(_) => "certify-hopf",
            Scenario::CertifyInduction(_) => "certify-induction",
            Scenario::DemoLogDomain(_) => "demo-log-domain",
        }
    }

    /// Parameters as JSON, embedded in every report.
    pub fn params_json(&self) -> serde_json::Value {
        let v = match self {
            Scenario::DiniCheck(c) => serde_json::to_value(c),
            Scenario::ReifenbergVerify(c) => serde_json::to_value(c),
            Scenario::Solve(c) => serde_json::to_value(c),
            Scenario::ProbeLipschitz(c) => serde_json::to_value(c),
            Scenario::ProbeHopf(c) => serde_json::to_value(c),
            Scenario::ProbeC1alpha(c) => serde_json::to_value(c),
            Scenario::ProbeFmod(c) => serde_json::to_value(c),
            Scenario::CertifyLipschitz(c) => serde_json::to_value(c),
            Scenario::CertifyHopf(c) => serde_json::to_value(c),
            Scenario::CertifyInduction(c) => serde_json::to_value(c),
            Scenario::DemoLogDomain(c) => serde_json::to_value(c),
        };
        v.expect("configs serialize")
    }

    /// Builds a scenario from TOML text of the form
    /// `scenario = "<name>"` followed by its parameters, either at top level
    /// or in a `[params]` table. `overrides` are `key=value` pairs applied on
    /// top, with values parsed as TOML (bare words are taken as strings).
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().context("config is not valid TOML")?;
        let name = match table.remove("scenario") {
            Some(toml::Value::String(s)) => s,
            Some(_) => bail!("'scenario' must be a string"),
            None => bail!("config must name a scenario (one of {})", SCENARIOS.join(", ")),
        };
        let mut params = match table.remove("params") {
            Some(toml::Value::Table(t)) => t,
            Some(_) => bail!("'params' must be a table"),
            None => toml::Table::new(),
        };
        params.extend(table);
        for o in overrides {
            let (k, v) = o.split_once('=').ok_or_else(|| anyhow!("override '{o}' is not key=value"))?;
            let key = k.trim().replace('-', "_");
            let value = parse_toml_value(v.trim());
            params.insert(key, value);
        }
        Self::from_params(&name, params)
    }

    fn from_params(name: &str, params: toml::Table) -> Result<Self> {
        fn load<T: serde::de::DeserializeOwned + Serialize>(params: toml::Table) -> Result<T> {
            let cfg: T = toml::Value::Table(params.clone())
                .try_into()
                .context("invalid scenario parameters")?;
            let known = serde_json::to_value(&cfg)?;
            let known = known.as_object().expect("configs are structs");
            let unknown: Vec<&String> = params.keys().filter(|k| !known.contains_key(k.as_str())).collect();
            if !unknown.is_empty() {
                bail!("unknown parameter(s): {}", unknown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "));
            }
            Ok(cfg)
        }
        Ok(match name.replace('_', "-").as_str() {
            "dini-check" => Scenario::DiniCheck(load(params)?),
            "reifenberg-verify" => Scenario::ReifenbergVerify(load(params)?),
            "solve" => Scenario::Solve(load(params)?),
            "probe-lipschitz" => Scenario::ProbeLipschitz(load(params)?),
            "probe-hopf" => Scenario::ProbeHopf(load(params)?),
            "probe-c1alpha" => Scenario::ProbeC1alpha(load(params)?),
            "probe-fmod" => Scenario::ProbeFmod(load(params)?),
            "certify-lipschitz" => Scenario::CertifyLipschitz(load(params)?),
            "certify-hopf" => Scenario::CertifyHopf(load(params)?),
            "certify-induction" => Scenario::CertifyInduction(load(params)?),
            "demo-log-domain" => Scenario::DemoLogDomain(load(params)?),
            other => bail!("unknown scenario '{other}' (expected one of {})", SCENARIOS.join(", ")),
        })
    }
}

fn parse_toml_value(s: &str) -> toml::Value {
    format!("v = {s}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(s.to_string()))
}
