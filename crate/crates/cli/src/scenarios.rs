use std::f64::consts::PI;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use lab_core::certifier::{
    scale_sequence, select_constants_hopf, select_constants_lipschitz, verify_constants, verify_induction, InductionMode,
    InductionOptions, KEta, ProofConstants, ProofInputs,
};
use lab_core::fdsolver::{read_csv, solve, write_csv, BoundaryData, GridDomain, Shape, SolutionHeader, SolveOptions, SolveReport};
use lab_core::geometry::{check_reifenberg_with, limit_normal, CheckOptions, GraphDomain2D, Profile, ReifenbergCertificate, Side};
use lab_core::grid::GridFunction;
use lab_core::probes::{c1alpha_fit, f_modulus, hopf_probe, lipschitz_probe, LipschitzTable};
use lab_core::pucci::{Ellipticity, OpMode, StencilSet};
use lab_core::{dini_integral, Modulus};

use crate::config::*;
use crate::report::Table;

/// What a scenario produced.
pub struct Outcome {
    pub passed: bool,
    pub verdict: String,
    pub results: Value,
    pub tables: Vec<Table>,
}

pub fn run(s: &Scenario) -> Result<Outcome> {
    match s {
        Scenario::DiniCheck(c) => dini_check(c),
        Scenario::ReifenbergVerify(c) => reifenberg_verify(c),
        Scenario::Solve(c) => solve_scenario(c),
        Scenario::ProbeLipschitz(c) => probe_lipschitz(c),
        Scenario::ProbeHopf(c) => probe_hopf(c),
        Scenario::ProbeC1alpha(c) => probe_c1alpha(c),
        Scenario::ProbeFmod(c) => probe_fmod(c),
        Scenario::CertifyLipschitz(c) => certify_lipschitz(c),
        Scenario::CertifyHopf(c) => certify_hopf(c),
        Scenario::CertifyInduction(c) => certify_induction(c),
        Scenario::DemoLogDomain(c) => demo_log_domain(c),
    }
}

fn is_csv(s: &str) -> bool {
    s.to_ascii_lowercase().ends_with(".csv")
}

pub fn parse_modulus(s: &str) -> Result<Modulus> {
    if is_csv(s) {
        Ok(Modulus::from_csv_path(Path::new(s))?)
    } else {
        Ok(Modulus::from_name(s)?)
    }
}

fn parse_profile(s: &str) -> Result<Profile> {
    if is_csv(s) {
        Ok(Profile::from_csv_path(Path::new(s))?)
    } else {
        Ok(Profile::from_name(s)?)
    }
}

fn graph_domain(profile: &str, radius: Option<f64>) -> Result<GraphDomain2D> {
    let p = parse_profile(profile)?;
    let default = if matches!(p, Profile::LogExample) { 0.5 } else { 1.0 };
    Ok(GraphDomain2D::new(p, radius.unwrap_or(default))?)
}

pub fn build_shape(name: &str, size: Option<f64>) -> Result<Shape> {
    let n = name.trim().to_ascii_lowercase().replace('-', "_");
    Ok(match n.as_str() {
        "half_disc" | "disc" => Shape::half_disc(size.unwrap_or(1.0)),
        "half_cube" | "cube" => Shape::half_cube(size.unwrap_or(1.0)),
        "log_domain" | "log" => {
            let d = GraphDomain2D::log_example();
            let r = size.unwrap_or(d.radius);
            Shape::graph(d, r)
        }
        _ => match n.strip_prefix("graph:") {
            Some(profile) => {
                let d = graph_domain(profile, None)?;
                let r = size.unwrap_or(d.radius);
                Shape::graph(d, r)
            }
            None => bail!("unknown shape '{name}' (half_disc, half_cube, log_domain, graph:<profile>)"),
        },
    })
}

fn rhs_field(spec: &str, dom: &GridDomain) -> Result<Option<GridFunction>> {
    let s = spec.trim().to_ascii_lowercase();
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h, Some(a.trim().parse::<f64>().map_err(|e| anyhow!("bad rhs '{spec}': {e}"))?)),
        None => (s.as_str(), None),
    };
    Ok(match (head, arg) {
        ("zero", None) => None,
        ("constant", Some(c)) => Some(GridFunction::constant(dom.grid, c)),
        ("power", Some(p)) => Some(GridFunction::from_fn(dom.grid, |x| {
            let r = x[0].hypot(x[1]);
            if r > 0.0 {
                r.powf(p)
            } else {
                0.0
            }
        })),
        _ => bail!("unknown rhs '{spec}' (zero, constant:<c>, power:<p>)"),
    })
}

fn ellipticity(lambda: f64, big_lambda: f64) -> Result<Ellipticity> {
    Ok(Ellipticity::new(lambda, big_lambda)?)
}

fn solve_with(c: &SolveConfig, dom: &GridDomain) -> Result<(GridFunction, SolveReport)> {
    let e = ellipticity(c.lambda, c.big_lambda)?;
    let g = BoundaryData::from_spec(&c.bc)?;
    let f = rhs_field(&c.rhs, dom)?;
    let opts = SolveOptions {
        tol: c.tol,
        max_iter: c.max_iter,
        omega: c.omega,
        stencil: StencilSet::new(c.stencil)?,
        initial: None,
    };
    Ok(solve(dom, c.mode, e, f.as_ref(), &g, &opts)?)
}

fn report_json(r: &SolveReport) -> Value {
    json!({
        "iterations": r.iterations,
        "residual": r.residual,
        "tol": r.tol,
        "omega": r.omega,
        "nodes": r.nodes,
    })
}

fn solution_table(u: &GridFunction) -> Result<Table> {
    let mut buf = Vec::new();
    write_csv(u, &mut buf)?;
    Ok(Table::raw("solution.csv", String::from_utf8(buf)?))
}

/// Copies values of `u` onto the grid of `dom` at coinciding points.
fn transfer(u: &GridFunction, dom: &GridDomain) -> Result<GridFunction> {
    let mut out = GridFunction::nan(dom.grid);
    for (k, v) in out.values.iter_mut().enumerate() {
        if let Some(src) = u.grid.node_at(dom.grid.point(k)) {
            *v = u.values[src];
        }
    }
    if let Some(&missing) = dom.nodes.iter().find(|&&i| !out.values[i].is_finite()) {
        bail!("solution has no value at inside node {:?}", dom.grid.point(missing));
    }
    Ok(out)
}

struct Field {
    dom: GridDomain,
    u: GridFunction,
    report: Option<SolveReport>,
}

fn load_field(src: &FieldSource) -> Result<Field> {
    let shape = build_shape(&src.solve.shape, src.solve.size)?;
    match &src.solution {
        Some(path) => {
            let file = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            let raw = read_csv(file, None)?;
            let dom = GridDomain::build(shape, raw.grid.h)?;
            let u = transfer(&raw, &dom)?;
            Ok(Field { dom, u, report: None })
        }
        None => {
            let dom = GridDomain::build(shape, src.solve.h)?;
            let (u, report) = solve_with(&src.solve, &dom)?;
            Ok(Field {
                dom,
                u,
                report: Some(report),
            })
        }
    }
}

fn field_tables(src: &FieldSource, f: &Field) -> Result<Vec<Table>> {
    if src.write_solution && f.report.is_some() {
        Ok(vec![solution_table(&f.u)?])
    } else {
        Ok(Vec::new())
    }
}

fn dini_check(c: &DiniConfig) -> Result<Outcome> {
    let m = parse_modulus(&c.family)?;
    let v = dini_integral(&m, c.r0, c.tol)?;
    let verdict = if v.is_dini {
        format!("Dini: ∫₀^{} ω(r)/r dr ≈ {:.10}", c.r0, v.integral_estimate)
    } else {
        format!("NOT Dini: partial integral {:.4} still growing at -ln ε = {:.3e}", v.integral_estimate, v.log_cutoff)
    };
    Ok(Outcome {
        passed: true,
        verdict,
        results: json!({ "modulus": m, "verdict": v }),
        tables: Vec::new(),
    })
}

fn cert_table(name: &str, cert: &ReifenbergCertificate) -> Table {
    let mut t = Table::new(name, &["k", "r", "normal_x", "normal_y", "slack", "omega", "drift", "passed"]);
    for (i, s) in cert.scales.iter().enumerate() {
        let drift = if i == 0 { f64::NAN } else { cert.drifts[i - 1] };
        t.push(vec![
            s.k.to_string(),
            s.frame.scale.to_string(),
            s.frame.normal[0].to_string(),
            s.frame.normal[1].to_string(),
            s.frame.slack.to_string(),
            s.omega.to_string(),
            drift.to_string(),
            s.passed.to_string(),
        ]);
    }
    t
}

fn reifenberg_verify(c: &ReifenbergConfig) -> Result<Outcome> {
    let dom = graph_domain(&c.domain, c.radius)?;
    let m = parse_modulus(&c.modulus)?;
    let opts = CheckOptions {
        r_top: c.r_top,
        thetas: c.theta_sweep.clone(),
        ..CheckOptions::default()
    };
    let cert = check_reifenberg_with(&dom, &m, c.side, c.eta, c.kmax, &opts)?;
    let limit = if cert.passed { Some(limit_normal(&cert)?) } else { None };
    let failing: Vec<f64> = cert.scales.iter().filter(|s| !s.passed).map(|s| s.frame.scale).collect();
    let verdict = if cert.passed {
        format!("certificate passes on {} scales, fitted K = {:.4}", cert.scales.len(), cert.fitted_k)
    } else if let Some(r) = failing.first() {
        format!("certificate fails at {} scale(s), first at r = {r:e}", failing.len())
    } else {
        format!("certificate fails: fitted K = {}", cert.fitted_k)
    };
    Ok(Outcome {
        passed: cert.passed,
        verdict,
        tables: vec![cert_table("scales.csv", &cert)],
        results: json!({ "certificate": cert, "limit_normal": limit }),
    })
}

fn solve_scenario(c: &SolveConfig) -> Result<Outcome> {
    let dom = GridDomain::build(build_shape(&c.shape, c.size)?, c.h)?;
    let (u, report) = solve_with(c, &dom)?;
    let e = ellipticity(c.lambda, c.big_lambda)?;
    let header = SolutionHeader::new(&u, c.mode, e, &report);
    // Affine boundary data is reproduced exactly by every mode.
    let exact_error = match BoundaryData::from_spec(&c.bc)? {
        g @ BoundaryData::Linear { .. } if c.rhs.trim() == "zero" => Some(
            dom.nodes
                .iter()
                .map(|&i| (u.values[i] - g.eval(dom.grid.point(i), lab_core::fdsolver::Part::Flat)).abs())
                .fold(0.0, f64::max),
        ),
        _ => None,
    };
    let mut verdict = format!(
        "converged in {} sweeps on {} nodes, residual {:.3e}",
        report.iterations, report.nodes, report.residual
    );
    if let Some(err) = exact_error {
        verdict.push_str(&format!(", max error vs affine data {err:.3e}"));
    }
    Ok(Outcome {
        passed: true,
        verdict,
        results: json!({
            "header": header,
            "report": report_json(&report),
            "max_error_vs_affine_data": exact_error,
        }),
        tables: vec![solution_table(&u)?],
    })
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// `max q / median q` of a Lipschitz table.
fn spread(t: &LipschitzTable) -> f64 {
    let qs: Vec<f64> = t.rows.iter().map(|r| r.1).collect();
    t.lipschitz_constant / median(&qs)
}

fn lipschitz_rows(table: &mut Table, field: &str, t: &LipschitzTable) {
    for &(r, q) in &t.rows {
        table.push(vec![field.to_string(), r.to_string(), q.to_string()]);
    }
}

fn probe_lipschitz(c: &LipschitzProbeConfig) -> Result<Outcome> {
    let f = load_field(&c.field)?;
    let t = lipschitz_probe(&f.u, &f.dom, &c.scales)?;
    let ratio = spread(&t);
    let passed = t.lipschitz_constant.is_finite() && ratio <= c.max_ratio;
    let mut table = Table::new("lipschitz.csv", &["field", "r", "q"]);
    lipschitz_rows(&mut table, "u", &t);
    let mut tables = vec![table];
    tables.extend(field_tables(&c.field, &f)?);
    Ok(Outcome {
        passed,
        verdict: format!(
            "max q = {:.4} over {} scales, max/median = {ratio:.3} (bound {})",
            t.lipschitz_constant,
            t.rows.len(),
            c.max_ratio
        ),
        results: json!({
            "table": t,
            "max_over_median": ratio,
            "solve": f.report.as_ref().map(report_json),
        }),
        tables,
    })
}

fn direction(angle_deg: f64) -> [f64; 2] {
    let a = angle_deg * PI / 180.0;
    [a.cos(), a.sin()]
}

fn probe_hopf(c: &HopfProbeConfig) -> Result<Outcome> {
    let f = load_field(&c.field)?;
    let mut table = Table::new("hopf.csv", &["field", "angle_deg", "t", "u_over_t"]);
    let mut probes = Vec::new();
    for &a in &c.angles {
        let h = hopf_probe(&f.u, &f.dom, direction(a), &c.ts)?;
        for &(t, v) in &h.rows {
            table.push(vec!["u".into(), a.to_string(), t.to_string(), v.to_string()]);
        }
        probes.push(h);
    }
    let c_min = probes.iter().map(|p| p.c_min).fold(f64::INFINITY, f64::min);
    let mut tables = vec![table];
    tables.extend(field_tables(&c.field, &f)?);
    Ok(Outcome {
        passed: c_min > 0.0,
        verdict: format!("c_min = {c_min:.5} over {} direction(s)", probes.len()),
        results: json!({ "probes": probes, "c_min": c_min, "solve": f.report.as_ref().map(report_json) }),
        tables,
    })
}

fn probe_c1alpha(c: &C1AlphaProbeConfig) -> Result<Outcome> {
    let f = load_field(&c.field)?;
    let fit = c1alpha_fit(&f.u, &f.dom, &c.scales)?;
    let mut table = Table::new("c1alpha.csv", &["r", "residual"]);
    for &(r, v) in &fit.residuals {
        table.push(vec![r.to_string(), v.to_string()]);
    }
    let mut tables = vec![table];
    tables.extend(field_tables(&c.field, &f)?);
    Ok(Outcome {
        passed: fit.a > 0.0 && fit.alpha_hat > c.min_alpha,
        verdict: format!("a = {:.6}, alpha_hat = {:.4}, C = {:.4}", fit.a, fit.alpha_hat, fit.c_hat),
        results: json!({ "fit": fit, "solve": f.report.as_ref().map(report_json) }),
        tables,
    })
}

fn probe_fmod(c: &FmodConfig) -> Result<Outcome> {
    let dom = GridDomain::build(build_shape(&c.shape, c.size)?, c.h)?;
    let f = rhs_field(&c.rhs, &dom)?.unwrap_or_else(|| GridFunction::constant(dom.grid, 0.0));
    let m = f_modulus(&f, &dom, &c.scales)?;
    let mut table = Table::new("fmod.csv", &["r", "omega_f"]);
    let r_top = m.domain_radius;
    for &r in &c.scales {
        if r <= r_top {
            table.push(vec![r.to_string(), m.eval(r)?.to_string()]);
        }
    }
    Ok(Outcome {
        passed: true,
        verdict: format!("tabulated ω_f on {} scale(s)", table.rows.len()),
        results: json!({ "modulus": m }),
        tables: vec![table],
    })
}

fn proof_inputs(c: &ConstantsConfig) -> Result<ProofInputs> {
    Ok(ProofInputs {
        ellipticity: ellipticity(c.lambda, c.big_lambda)?,
        alpha: c.alpha,
        c1: c.c1,
        c2: c.c2,
        c3: c.c3,
        k_eta: if c.k_log { KEta::LogScaled { k: c.k } } else { KEta::Constant { k: c.k } },
        modulus: Some(parse_modulus(&c.modulus)?),
    })
}

fn constants_outcome(pc: ProofConstants, c: &ConstantsConfig) -> Result<Outcome> {
    let m = parse_modulus(&c.modulus)?;
    let recheck = verify_constants(&pc);
    let seq = scale_sequence(&m, pc.eta, pc.alpha0, pc.c0, c.kmax)?;
    let checks_hold = recheck.iter().all(|k| k.holds);
    let seq_ok = seq.passed != Some(false) && seq.recursion_bounds_hold;
    let mut checks = Table::new("constraints.csv", &["name", "lhs", "relation", "rhs", "slack", "holds"]);
    for k in &recheck {
        checks.push(vec![
            k.name.clone(),
            k.lhs.to_string(),
            serde_json::to_value(k.relation)?.as_str().unwrap_or("?").to_string(),
            k.rhs.to_string(),
            k.slack.to_string(),
            k.holds.to_string(),
        ]);
    }
    let mut st = Table::new("sequence.csv", &["k", "omega", "A_k", "partial_sum", "unrolled_bound"]);
    for k in 0..seq.big_a.len() {
        st.push(vec![
            k.to_string(),
            seq.omega[k].to_string(),
            seq.big_a[k].to_string(),
            seq.partial_sums[k].to_string(),
            seq.unrolled_bounds[k].to_string(),
        ]);
    }
    let min_slack = recheck.iter().map(|k| k.slack).fold(f64::INFINITY, f64::min);
    let bound = match seq.passed {
        Some(true) => format!("∑A ≤ 3c0 holds ({:.3e} ≤ {:.3e})", seq.total(), seq.bound),
        Some(false) => format!("∑A ≤ 3c0 FAILS ({:.3e} > {:.3e})", seq.total(), seq.bound),
        None => "∑A ≤ 3c0 not applicable".into(),
    };
    Ok(Outcome {
        passed: checks_hold && seq_ok,
        verdict: format!(
            "η = {:.4e}, c0 = {:.4e}, Ĉ = {:.4e}; {}/{} constraints hold (min slack {min_slack:.3e}); {bound}",
            pc.eta,
            pc.c0,
            pc.c_hat,
            recheck.iter().filter(|k| k.holds).count(),
            recheck.len()
        ),
        results: json!({ "constants": pc, "recheck": recheck, "sequence": seq }),
        tables: vec![checks, st],
    })
}

fn certify_lipschitz(c: &ConstantsConfig) -> Result<Outcome> {
    let pc = select_constants_lipschitz(&proof_inputs(c)?)?;
    constants_outcome(pc, c)
}

fn certify_hopf(c: &HopfConstantsConfig) -> Result<Outcome> {
    let pc = select_constants_hopf(&proof_inputs(&c.constants)?, c.delta1, c.c2_barrier)?;
    constants_outcome(pc, &c.constants)
}

fn induction_table(rep: &lab_core::certifier::InductionReport) -> Table {
    let mut t = Table::new(
        "induction.csv",
        &["k", "radius", "a_k", "lhs", "rhs", "slack", "holds", "abar", "abar_bound"],
    );
    for r in &rep.rows {
        let (ab, bound) = r.abar.map_or((f64::NAN, f64::NAN), |x| x);
        t.push(vec![
            r.k.to_string(),
            r.radius.to_string(),
            r.a_k.to_string(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.slack.to_string(),
            r.holds.to_string(),
            ab.to_string(),
            bound.to_string(),
        ]);
    }
    t
}

fn certify_induction(c: &InductionConfig) -> Result<Outcome> {
    let sol = c.solution.as_ref().ok_or_else(|| anyhow!("--solution is required"))?;
    let cert_path = c.cert.as_ref().ok_or_else(|| anyhow!("--cert is required"))?;
    let cert_text = std::fs::read_to_string(cert_path).with_context(|| format!("cannot read {}", cert_path.display()))?;
    let cert_json: Value = serde_json::from_str(&cert_text)?;
    // Accept either a bare certificate or a reifenberg-verify summary.
    let cert: ReifenbergCertificate = match cert_json.pointer("/results/certificate") {
        Some(v) => serde_json::from_value(v.clone())?,
        None => serde_json::from_value(cert_json)?,
    };
    let src = FieldSource {
        solve: SolveConfig {
            shape: c.shape.clone(),
            size: c.size,
            ..SolveConfig::default()
        },
        solution: Some(sol.clone()),
        write_solution: false,
    };
    let f = load_field(&src)?;
    let cc = &c.constants.constants;
    let inputs = ProofInputs {
        k_eta: KEta::Constant {
            k: cc.k.max(cert.fitted_k),
        },
        ..proof_inputs(cc)?
    };
    let (pc, mode) = match c.mode {
        InductionKind::Lipschitz => (select_constants_lipschitz(&inputs)?, InductionMode::Lipschitz),
        InductionKind::Hopf => (
            select_constants_hopf(&inputs, c.constants.delta1, c.constants.c2_barrier)?,
            InductionMode::Hopf,
        ),
    };
    let m = parse_modulus(&cc.modulus)?;
    let k_max = cert.scales.len().saturating_sub(1);
    let seq = scale_sequence(&m, cert.eta_geo, pc.alpha0, pc.c0, k_max)?.with_frames(&cert)?;
    let opts = InductionOptions {
        f_norm: c.f_norm,
        g_seminorm: c.g_seminorm,
        k_min: c.k_min,
        aux_solves: c.with_aux_solves,
        ellipticity: ellipticity(cc.lambda, cc.big_lambda)?,
        ..InductionOptions::default()
    };
    let rep = verify_induction(&f.u, &f.dom, &cert, &pc, &seq, mode, &opts)?;
    Ok(Outcome {
        passed: rep.all_hold,
        verdict: format!(
            "{}/{} scales satisfy the induction inequality ({} skipped)",
            rep.rows.iter().filter(|r| r.holds).count(),
            rep.rows.len(),
            rep.skipped.len()
        ),
        tables: vec![induction_table(&rep)],
        results: json!({ "constants": pc, "report": rep }),
    })
}

fn demo_log_domain(c: &DemoConfig) -> Result<Outcome> {
    let e = ellipticity(c.lambda, c.big_lambda)?;
    let geo = GraphDomain2D::log_example();
    let m = Modulus::inv_log_sq();
    let opts = CheckOptions {
        r_top: Some(0.25),
        ..CheckOptions::default()
    };
    let cert = check_reifenberg_with(&geo, &m, Side::Exterior, 0.5, c.kmax, &opts)?;

    let dom = GridDomain::build(Shape::graph(geo.clone(), geo.radius), c.h)?;
    let g = BoundaryData::zero_one();
    let laplace_opts = SolveOptions::default();
    let (harmonic, harmonic_report) = solve(&dom, OpMode::Laplace, Ellipticity::laplace(), None, &g, &laplace_opts)?;
    let mut fields = vec![("harmonic", harmonic, harmonic_report)];
    if !c.skip_pucci {
        let opts = SolveOptions {
            stencil: StencilSet::new(c.stencil)?,
            ..SolveOptions::default()
        };
        let (u, r) = solve(&dom, OpMode::Sup, e, None, &g, &opts)?;
        fields.push(("pucci_sup", u, r));
    }

    let mut lip_table = Table::new("lipschitz.csv", &["field", "r", "q"]);
    let mut hopf_table = Table::new("hopf.csv", &["field", "angle_deg", "t", "u_over_t"]);
    let mut field_results = serde_json::Map::new();
    let mut passed = cert.passed;
    for (name, u, report) in &fields {
        let lip = lipschitz_probe(u, &dom, &c.scales)?;
        let ratio = spread(&lip);
        lipschitz_rows(&mut lip_table, name, &lip);
        let mut hopf = Vec::new();
        for angle in [90.0, 45.0] {
            let h = hopf_probe(u, &dom, direction(angle), &c.ts)?;
            for &(t, v) in &h.rows {
                hopf_table.push(vec![name.to_string(), angle.to_string(), t.to_string(), v.to_string()]);
            }
            hopf.push(h);
        }
        let c_min = hopf.iter().map(|h| h.c_min).fold(f64::INFINITY, f64::min);
        passed &= c_min > 0.0 && lip.lipschitz_constant.is_finite() && ratio <= c.max_ratio;
        field_results.insert(
            name.to_string(),
            json!({
                "solve": report_json(report),
                "lipschitz": lip,
                "max_over_median": ratio,
                "hopf": hopf,
                "c_min": c_min,
            }),
        );
    }

    // The induction cross-check is informational: it depends on the
    // resolution and on the supplied proof constants.
    let inputs = ProofInputs {
        ellipticity: e,
        k_eta: KEta::Constant {
            k: cert.fitted_k.max(1.0),
        },
        modulus: Some(m.clone()),
        ..ProofInputs::default()
    };
    let pc = select_constants_lipschitz(&inputs)?;
    let seq = scale_sequence(&m, cert.eta_geo, pc.alpha0, pc.c0, cert.scales.len() - 1)?.with_frames(&cert)?;
    let induction = verify_induction(
        &fields[0].1,
        &dom,
        &cert,
        &pc,
        &seq,
        InductionMode::Lipschitz,
        &InductionOptions {
            k_min: 2,
            ..InductionOptions::default()
        },
    )?;

    let summary = |name: &str| field_results.get(name).cloned().unwrap_or(Value::Null);
    let harmonic = summary("harmonic");
    let verdict = format!(
        "geometry {}, K = {:.3}; harmonic c_min = {:.4}, max/median q = {:.3}; induction {}/{} scales hold",
        if cert.passed { "passes" } else { "FAILS" },
        cert.fitted_k,
        harmonic["c_min"].as_f64().unwrap_or(f64::NAN),
        harmonic["max_over_median"].as_f64().unwrap_or(f64::NAN),
        induction.rows.iter().filter(|r| r.holds).count(),
        induction.rows.len(),
    );
    Ok(Outcome {
        passed,
        verdict,
        results: json!({
            "geometry": cert,
            "fields": field_results,
            "constants": pc,
            "induction": induction,
            "nodes": dom.node_count(),
        }),
        tables: vec![cert_table("geometry.csv", &cert), lip_table, hopf_table, induction_table(&induction)],
    })
}
