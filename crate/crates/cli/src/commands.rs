//! One function per subcommand. Each returns the artifact list for the
//! cache layer to persist: `(file name, file contents)` pairs, every CSV
//! opening with the config-hash comment line.

use std::fmt::Write as _;

use num::rational::Ratio;
use osclab_core::bump::BumpSpec;
use osclab_core::error::Error;
use osclab_core::phase::Phase;
use osclab_core::quad::{self, QuadConfig};
use osclab_core::resolution::{self, ShearMap, Wedge};
use osclab_core::spectral::{self, GridSpec};
use osclab_core::sublevel::{self, Method, Region, SublevelEstimate};
use osclab_core::{newton, stats};

use crate::cache::{self, RunRecord};
use crate::config::{
    IntegrateParams, PdeParams, ReportParams, ResolutionParams, RunConfig, ScanParams,
    SublevelParams, ARTIFACT_VERSION,
};
use crate::CliError;

type Artifacts = Vec<(String, String)>;

fn rational_str(r: Ratio<i64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn quad_config(budget: Option<u64>) -> QuadConfig {
    let mut cfg = QuadConfig::default();
    if let Some(b) = budget {
        cfg.panel_budget = b;
    }
    cfg
}

fn law_json(law: &osclab_core::DecayLaw) -> serde_json::Value {
    serde_json::json!({
        "epsilon": rational_str(law.epsilon),
        "epsilon_f64": law.epsilon_f64(),
        "m": law.m,
    })
}

pub fn predict(cfg: &RunConfig, hash: &str) -> Result<(Artifacts, String), CliError> {
    let (phase, literal) = cfg.phase()?;
    let polygon = newton::build_polygon(&phase)?;
    let law = newton::predict_decay(&polygon, true)?;
    let sub = newton::sublevel_decay(&law);
    let doc = serde_json::json!({
        "config_hash": hash,
        "version": ARTIFACT_VERSION,
        "phase": serde_json::from_str::<serde_json::Value>(&literal).expect("literal is JSON"),
        "newton_distance": rational_str(newton::newton_distance(&polygon)),
        "oscillatory": law_json(&law),
        "sublevel": {
            "law": law_json(&sub.law),
            "ambiguous": sub.ambiguous,
            "candidates": sub.candidates.iter().map(law_json).collect::<Vec<_>>(),
        },
    });
    let summary = format!(
        "predict: epsilon = {} (= {:.6}), m = {}",
        rational_str(law.epsilon),
        law.epsilon_f64(),
        law.m
    );
    Ok((vec![("predict.json".into(), pretty(doc))], summary))
}

pub fn integrate(cfg: &RunConfig, hash: &str) -> Result<(Artifacts, String), CliError> {
    let (phase, _) = cfg.phase()?;
    let p: IntegrateParams = cfg.params()?;
    let bump = p.bump.build()?;
    let qcfg = quad_config(p.budget);
    let out = match p.kind.as_str() {
        "t" => quad::integrate_t_with(&phase, p.lambda, p.mu1, p.mu2, &bump, p.tol, &qcfg)?,
        "u" => quad::integrate_u_with(&phase, p.lambda, &bump, p.tol, &qcfg)?,
        "r" => quad::integrate_r_with(&phase, p.lambda, p.mu1, p.mu2, &bump, p.tol, &qcfg)?,
        other => {
            return Err(CliError::Validation(format!(
                "integrate kind must be \"t\", \"u\" or \"r\", got {other:?}"
            )))
        }
    };
    if !out.converged {
        return Err(CliError::Numerical(format!(
            "quadrature did not converge within budget (abs_error {:.3e} > tol {:.1e})",
            out.abs_error, p.tol
        )));
    }
    let mut csv = cache::csv_header(hash);
    csv.push_str("kind,lambda,mu1,mu2,value_re,value_im,abs_error,panels,converged\n");
    let _ = writeln!(
        csv,
        "{},{},{},{},{},{},{},{},{}",
        p.kind, p.lambda, p.mu1, p.mu2, out.value.re, out.value.im, out.abs_error, out.panels,
        out.converged
    );
    let summary = format!(
        "integrate {}: value = {:+.9e} {:+.9e}i (abs_error {:.2e}, {} panels)",
        p.kind, out.value.re, out.value.im, out.abs_error, out.panels
    );
    Ok((vec![("integrate.csv".into(), csv)], summary))
}

fn scan_rows(
    phase: &Phase,
    bump: &BumpSpec,
    lambdas: &[f64],
    tol: f64,
    qcfg: &QuadConfig,
    hash: &str,
) -> Result<(String, Vec<f64>), CliError> {
    let mut csv = cache::csv_header(hash);
    csv.push_str("lambda,value_re,value_im,value_abs,abs_error,panels,converged\n");
    let mut magnitudes = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let out = quad::integrate_u_with(phase, lam, bump, tol, qcfg)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            lam,
            out.value.re,
            out.value.im,
            out.value.norm(),
            out.abs_error,
            out.panels,
            out.converged
        );
        magnitudes.push(out.value.norm());
    }
    Ok((csv, magnitudes))
}

pub fn scan(cfg: &RunConfig, hash: &str) -> Result<(Artifacts, String), CliError> {
    let (phase, _) = cfg.phase()?;
    let p: ScanParams = cfg.params()?;
    let bump = p.bump.build()?;
    let lambdas = p.lambda.build()?;
    let (csv, _) = scan_rows(&phase, &bump, &lambdas, p.tol, &quad_config(p.budget), hash)?;
    let summary = format!("scan: {} lambda points in [{}, {}]", lambdas.len(), p.lambda.min, p.lambda.max);
    Ok((vec![("scan.csv".into(), csv)], summary))
}

pub fn fit(cfg: &RunConfig, hash: &str) -> Result<(Artifacts, String), CliError> {
    let (phase, literal) = cfg.phase()?;
    let p: ScanParams = cfg.params()?;
    let bump = p.bump.build()?;
    let lambdas = p.lambda.build()?;
    let (csv, magnitudes) =
        scan_rows(&phase, &bump, &lambdas, p.tol, &quad_config(p.budget), hash)?;
    let fitted = stats::fit_decay_model(&lambdas, &magnitudes)?;
    let law = newton::predict_decay(&newton::build_polygon(&phase)?, true)?;
    let doc = serde_json::json!({
        "config_hash": hash,
        "version": ARTIFACT_VERSION,
        "phase": serde_json::from_str::<serde_json::Value>(&literal).expect("literal is JSON"),
        "fitted": {
            "epsilon": fitted.epsilon,
            "m": fitted.m,
            "c": fitted.c,
            "rms": fitted.rms,
            "points": fitted.n,
        },
        "predicted": law_json(&law),
        "epsilon_error": fitted.epsilon - law.epsilon_f64(),
    });
    let summary = format!(
        "fit: epsilon_hat = {:.4} (predicted {:.4}), m_hat = {} (predicted {})",
        fitted.epsilon,
        law.epsilon_f64(),
        fitted.m,
        law.m
    );
    Ok((vec![("fit.csv".into(), csv), ("fit.json".into(), pretty(doc))], summary))
}

pub fn sublevel(cfg: &RunConfig, hash: &str) -> Result<(Artifacts, String), CliError> {
    let p: SublevelParams = cfg.params()?;
    let seed = cfg.seed.unwrap_or(0);
    let method = match p.method.as_str() {
        "det" => Method::AdaptiveDet,
        "mc" => Method::MonteCarlo,
        other => {
            return Err(CliError::Validation(format!(
                "sublevel method must be \"det\" or \"mc\", got {other:?}"
            )))
        }
    };
    let (a, b) = (p.a, p.b);
    let f = move |x: f64, y: f64| x.powi(a as i32) * y.powi(b as i32);
    let region = Region::unit_square();
    let mut csv = cache::csv_header(hash);
    csv.push_str("r,measure,uncertainty,exact,deviation\n");
    let mut estimates: Vec<SublevelEstimate> = Vec::new();
    for &r in &p.thresholds {
        let est = sublevel::measure_or_bracket(&f, &region, r, method, p.budget, seed)?;
        let exact = sublevel::monomial_sublevel_exact(a, b, r)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r,
            est.measure,
            est.uncertainty,
            exact,
            (est.measure - exact).abs()
        );
        estimates.push(est);
    }
    let fit = sublevel::fit_sublevel_law(&estimates).ok();
    let doc = serde_json::json!({
        "config_hash": hash,
        "version": ARTIFACT_VERSION,
        "monomial": {"a": a, "b": b},
        "method": p.method,
        "fit": fit.map(|f| serde_json::json!({
            "epsilon": f.epsilon_hat,
            "m": f.m_hat,
            "c": f.c_hat,
            "rms": f.rms_residual,
            "points": f.n_points,
        })),
    });
    let summary = match fit {
        Some(f) => format!("sublevel: epsilon_hat = {:.4}, m_hat = {}", f.epsilon_hat, f.m_hat),
        None => format!("sublevel: {} thresholds measured (too few for a law fit)", p.thresholds.len()),
    };
    Ok((vec![("sublevel.csv".into(), csv), ("sublevel.json".into(), pretty(doc))], summary))
}

pub fn resolution_check(cfg: &RunConfig, hash: &str) -> Result<(Artifacts, String), CliError> {
    let (phase, literal) = cfg.phase()?;
    let p: ResolutionParams = cfg.params()?;
    let shear = match &p.shear {
        Some(s) => ShearMap::new(
            s.sign,
            s.psi.iter().map(|&(n, d, c)| (Ratio::new(n, d), c)).collect(),
        )?,
        None => ShearMap::identity(),
    };
    let f_eta = resolution::apply_shear(&phase, &shear);
    let wedge = Wedge::above_axis(p.wedge.x_max, p.wedge.h_upper, Ratio::new(p.wedge.m_num, p.wedge.m_den))?;
    let alpha = Ratio::new(p.alpha_num, p.alpha_den);
    let delta_tol = p.delta_tol.unwrap_or(resolution::DEFAULT_COMPARABILITY_TOL);
    let rep = resolution::check_comparability_with(
        &f_eta, &wedge, alpha, p.beta, p.l_max, p.m_max, p.grid, delta_tol,
    )?;
    // Principal-part split along the wedge's upper-edge scaling, best effort:
    // a root of r(y) inside the wedge is a finding, not a failure.
    let split = match resolution::principal_part(f_eta.base(), wedge.upper_exponent()) {
        Ok(pp) => {
            match resolution::check_lemma22(&f_eta, &wedge, &pp.r, pp.alpha_min, p.l_max) {
                Ok(l22) => serde_json::json!({
                    "alpha_min": rational_str(pp.alpha_min),
                    "principal": pp.r.terms().iter().map(|&(e, c)| serde_json::json!([e, c])).collect::<Vec<_>>(),
                    "pass": l22.pass,
                    "zero_residual": l22.zero_residual,
                    "orders": l22.orders.iter().map(|&(l, d)| serde_json::json!([l, d])).collect::<Vec<_>>(),
                }),
                Err(e) => serde_json::json!({"error": e.to_string()}),
            }
        }
        Err(e) => serde_json::json!({"error": e.to_string()}),
    };
    let doc = serde_json::json!({
        "config_hash": hash,
        "version": ARTIFACT_VERSION,
        "phase": serde_json::from_str::<serde_json::Value>(&literal).expect("literal is JSON"),
        "alpha": rational_str(rep.alpha_i),
        "beta": rep.beta_i,
        "d": rep.d_i,
        "delta_tol": delta_tol,
        "orders": rep.orders.iter().map(|o| serde_json::json!({
            "l": o.l, "m": o.m, "ratio_min": o.ratio_min, "ratio_max": o.ratio_max, "pass": o.pass,
        })).collect::<Vec<_>>(),
        "pass": rep.pass,
        "principal_split": split,
    });
    let summary = format!(
        "resolution-check: comparable to {:.4}*x^{} y^{} -> {}",
        rep.d_i,
        rational_str(rep.alpha_i),
        rep.beta_i,
        if rep.pass { "pass" } else { "fail" }
    );
    Ok((vec![("resolution.json".into(), pretty(doc))], summary))
}

pub fn pde(cfg: &RunConfig, hash: &str) -> Result<(Artifacts, String), CliError> {
    let (phase, _) = cfg.phase()?;
    let p: PdeParams = cfg.params()?;
    let spec = GridSpec::new(p.n, p.l)?;
    let datum = spectral::make_datum(&p.datum.build()?, spec)?;
    let mut csv = cache::csv_header(hash);
    let summary;
    match p.equation.as_str() {
        "dispersive" | "heat" => {
            if p.times.is_empty() {
                return Err(CliError::Validation(format!(
                    "equation {:?} needs a non-empty \"times\" list",
                    p.equation
                )));
            }
            csv.push_str("t,l1,l2,linf,boundary_mass\n");
            for &t in &p.times {
                let f = if p.equation == "dispersive" {
                    spectral::evolve_dispersive(&datum, &phase, t)?
                } else {
                    spectral::evolve_dissipative(&datum, &phase, t)?
                };
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    t,
                    spectral::lp_norm(&f, 1.0)?,
                    spectral::lp_norm(&f, 2.0)?,
                    spectral::lp_norm(&f, f64::INFINITY)?,
                    spectral::boundary_mass_fraction(&f)?
                );
            }
            summary = format!("pde {}: {} snapshots on a {}x{} grid", p.equation, p.times.len(), p.n, p.n);
        }
        "fractional" => {
            let delta = p.delta.ok_or_else(|| {
                CliError::Validation("equation \"fractional\" needs a \"delta\"".into())
            })?;
            let eta = p.eta.unwrap_or(0.0);
            let f = spectral::fractional_solve(&datum, &phase, delta, eta)?;
            csv.push_str("delta,eta,l1,l2,linf,boundary_mass\n");
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                delta,
                eta,
                spectral::lp_norm(&f, 1.0)?,
                spectral::lp_norm(&f, 2.0)?,
                spectral::lp_norm(&f, f64::INFINITY)?,
                spectral::boundary_mass_fraction(&f)?
            );
            summary = format!("pde fractional: delta = {delta}, eta = {eta}");
        }
        other => {
            return Err(CliError::Validation(format!(
                "equation must be \"dispersive\", \"heat\" or \"fractional\", got {other:?}"
            )))
        }
    }
    Ok((vec![("pde.csv".into(), csv)], summary))
}

pub fn report(cfg: &RunConfig, hash: &str, root: &std::path::Path) -> Result<(Artifacts, String), CliError> {
    let p: ReportParams = cfg.params()?;
    if p.records.is_empty() {
        return Err(CliError::Validation("report needs at least one record hash".into()));
    }
    let mut records: Vec<(String, RunRecord)> = Vec::new();
    for h in &p.records {
        let dir = cache::run_dir(root, h);
        let rec = cache::lookup(&dir).ok_or_else(|| {
            CliError::Validation(format!("record {h} not found under {}", root.display()))
        })?;
        records.push((h.clone(), rec));
    }
    let phases: Vec<&str> =
        records.iter().filter_map(|(_, r)| r.phase.as_deref()).collect();
    if let Some(first) = phases.first() {
        if phases.iter().any(|p| p != first) {
            return Err(CliError::Validation(
                "records mix phases; a report joins runs of a single phase".into(),
            ));
        }
    }

    let mut csv = cache::csv_header(hash);
    csv.push_str("record,file,row\n");
    let mut text = format!("# run report ({} records)\n", records.len());
    if let Some(first) = phases.first() {
        let _ = writeln!(text, "phase: {first}");
    }
    let mut predicted: Option<(f64, u8)> = None;
    let mut fitted: Option<(f64, u8)> = None;
    for (h, rec) in &records {
        let _ = writeln!(text, "- {} {} ({} files)", h, rec.subcommand, rec.files.len());
        for fname in &rec.files {
            let path = cache::run_dir(root, h).join(fname);
            let body = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            if fname.ends_with(".csv") {
                for line in body.lines().filter(|l| !l.starts_with('#')) {
                    let _ = writeln!(csv, "{h},{fname},\"{line}\"");
                }
            } else if fname == "predict.json" {
                let v: serde_json::Value = serde_json::from_str(&body)
                    .map_err(|e| CliError::Validation(format!("bad {fname}: {e}")))?;
                predicted = law_from_json(&v["oscillatory"]);
            } else if fname == "fit.json" {
                let v: serde_json::Value = serde_json::from_str(&body)
                    .map_err(|e| CliError::Validation(format!("bad {fname}: {e}")))?;
                fitted = v["fitted"]["epsilon"].as_f64().zip(
                    v["fitted"]["m"].as_u64().map(|m| m as u8),
                );
                if predicted.is_none() {
                    predicted = law_from_json(&v["predicted"]);
                }
            }
        }
    }
    match (predicted, fitted) {
        (Some((pe, pm)), Some((fe, fm))) => {
            let _ = writeln!(
                text,
                "decay law: predicted epsilon = {pe:.6}, m = {pm}; fitted epsilon = {fe:.6}, m = {fm}; epsilon error = {:+.6}",
                fe - pe
            );
        }
        (Some((pe, pm)), None) => {
            let _ = writeln!(text, "decay law: predicted epsilon = {pe:.6}, m = {pm}; no fit record");
        }
        _ => {
            let _ = writeln!(text, "decay law: no prediction record included");
        }
    }
    let summary = format!("report: merged {} records", records.len());
    Ok((vec![("report.csv".into(), csv), ("report.txt".into(), text)], summary))
}

fn law_from_json(v: &serde_json::Value) -> Option<(f64, u8)> {
    v["epsilon_f64"].as_f64().zip(v["m"].as_u64().map(|m| m as u8))
}

fn pretty(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}
