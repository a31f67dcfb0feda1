//! `lab`: command-line front end for the boundary regularity laboratory.
//!
//! Exit codes: 0 when the scenario's checks pass, 2 when a scientific check
//! fails, 1 on operational errors (reported as JSON on stderr).

mod config;
mod report;
mod scenarios;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::SystemTime;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use config::*;
use lab_core::LabError;

#[derive(Parser)]
#[command(name = "lab", version, about = "Boundary regularity laboratory for Pucci-type equations")]
struct Cli {
    /// Report directory (overrides LAB_OUTPUT_DIR).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the full summary JSON instead of the one-line verdict.
    #[arg(long, global = true)]
    print_json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dini integrals of moduli of continuity.
    Dini {
        #[command(subcommand)]
        cmd: DiniCmd,
    },
    /// Reifenberg flatness certificates for graph domains.
    Reifenberg {
        #[command(subcommand)]
        cmd: ReifenbergCmd,
    },
    /// Solve a Dirichlet problem on a gridded domain.
    Solve(SolveConfig),
    /// Empirical boundary regularity probes.
    Probe {
        #[command(subcommand)]
        cmd: ProbeCmd,
    },
    /// Proof constant selection and induction checks.
    Certify {
        #[command(subcommand)]
        cmd: CertifyCmd,
    },
    /// Geometry, solves, probes and certifier on the logarithmic domain.
    DemoLogDomain(DemoConfig),
    /// Run a scenario described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Parameter override, `key=value`; repeatable.
        #[arg(long = "set")]
        set: Vec<String>,
    },
}

#[derive(Subcommand)]
enum DiniCmd {
    Check(DiniConfig),
}

#[derive(Subcommand)]
enum ReifenbergCmd {
    Verify(ReifenbergConfig),
}

#[derive(Subcommand)]
enum ProbeCmd {
    Lipschitz(LipschitzProbeConfig),
    Hopf(HopfProbeConfig),
    C1alpha(C1AlphaProbeConfig),
    Fmod(FmodConfig),
}

#[derive(Subcommand)]
enum CertifyCmd {
    Lipschitz(ConstantsConfig),
    Hopf(HopfConstantsConfig),
    Induction(InductionConfig),
}

fn scenario_of(cmd: Cmd) -> Result<Scenario> {
    Ok(match cmd {
        Cmd::Dini { cmd: DiniCmd::Check(c) } => Scenario::DiniCheck(c),
        Cmd::Reifenberg {
            cmd: ReifenbergCmd::Verify(c),
        } => Scenario::ReifenbergVerify(c),
        Cmd::Solve(c) => Scenario::Solve(c),
        Cmd::Probe { cmd } => match cmd {
            ProbeCmd::Lipschitz(c) => Scenario::ProbeLipschitz(c),
            ProbeCmd::Hopf(c) => Scenario::ProbeHopf(c),
            ProbeCmd::C1alpha(c) => Scenario::ProbeC1alpha(c),
            ProbeCmd::Fmod(c) => Scenario::ProbeFmod(c),
        },
        Cmd::Certify { cmd } => match cmd {
            CertifyCmd::Lipschitz(c) => Scenario::CertifyLipschitz(c),
            CertifyCmd::Hopf(c) => Scenario::CertifyHopf(c),
            CertifyCmd::Induction(c) => Scenario::CertifyInduction(c),
        },
        Cmd::DemoLogDomain(c) => Scenario::DemoLogDomain(c),
        Cmd::Run { config, set } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("cannot read {}", config.display()))?;
            Scenario::from_toml(&text, &set)?
        }
    })
}

fn execute(cli: Cli) -> Result<bool> {
    let out = cli.out.clone();
    let print_json = cli.print_json;
    let scenario = scenario_of(cli.cmd)?;
    let started = SystemTime::now();
    let outcome = scenarios::run(&scenario)?;
    let finished = SystemTime::now();

    let summary = json!({
        "scenario": scenario.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": scenario.params_json(),
        "passed": outcome.passed,
        "verdict": outcome.verdict,
        "results": outcome.results,
    });
    let dir = report::output_dir(out.as_deref(), scenario.name());
    report::write_all(&dir, &summary, &outcome.tables, started, finished)?;
    if print_json {
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {}: {}", scenario.name(), outcome.verdict);
        println!("report: {}", Path::new(&dir).join("summary.json").display());
    }
    Ok(outcome.passed)
}

fn error_json(e: &anyhow::Error) -> serde_json::Value {
    let mut body = json!({ "kind": "operational", "message": format!("{e:#}") });
    if let Some(le) = e.downcast_ref::<LabError>() {
        body["kind"] = json!(le.kind());
        if let LabError::Nonconvergence { iterations, residual, .. } = le {
            body["iterations"] = json!(iterations);
            body["residual"] = json!(residual);
        }
    }
    json!({ "error": body })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = json!({ "error": { "kind": "usage", "message": e.render().to_string() } });
            eprintln!("{}", serde_json::to_string_pretty(&err).unwrap_or_default());
            return ExitCode::from(1);
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("{}", serde_json::to_string_pretty(&error_json(&e)).unwrap_or_default());
            ExitCode::from(1)
        }
    }
}
