//! Executes a resolved configuration and renders the report.

use std::fmt::Write;

use intertwine::numerics::suites::{equivariance_suite, mc_suite, norms_suite, EquivarianceParams};
use intertwine::numerics::{bound_experiment, BoundParams, McParams};
use intertwine::operators::{
    build_e, build_m, lambda_set, verify_e_identity, verify_shifted_m, verify_laplacian_power, verify_m_on_kernel, BidiffOp,
    IdentityReport, RecursionRule,
};
use intertwine::spectrum::discrete_components;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, NumericConfig, RunConfig, Suite, Task, M_MAX_CEILING};

pub const SCHEMA: &str = "v1";
pub const MC_RADII: [f64; 3] = [0.5, 1.0, 2.0];
pub const KNAPP_STEIN_TOLERANCE: f64 = 1e-10;

#[derive(Debug)]
pub struct UsageError(pub String);

impl From<intertwine::Error> for UsageError {
    fn from(e: intertwine::Error) -> Self {
        UsageError(e.to_string())
    }
}

pub struct Report {
    pub passed: bool,
    pub result: Value,
    pub text: String,
    pub csv: String,
    pub latex: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

pub fn execute(config: &RunConfig) -> Result<Report, UsageError> {
    match &config.task {
        Task::Construct { j, dim } => construct(*j, *dim),
        Task::VerifySymbolic { m_max, recursion_sign } => verify_symbolic(*m_max, (*recursion_sign).into()),
        Task::VerifyNumeric(p) => verify_numeric(p),
        Task::Spectrum { field, n, alpha, beta } => {
            let list = discrete_components((*field).into(), *n, *alpha, *beta)?;
            let mut text = format!(
                "field {} n={} rho={} alpha={} beta={} (lower bound on the discrete spectrum)\n",
                list.field, list.n, list.rho, list.alpha, list.beta
            );
            let mut csv = String::from("param,j,source\n");
            if list.components.is_empty() {
                text.push_str("no components\n");
            }
            for c in &list.components {
                let source = to_value(&c.source);
                let source = source.as_str().unwrap_or_default();
                let _ = writeln!(text, "  {:<10} j={} {source}", c.param, c.j);
                let _ = writeln!(csv, "{},{},{source}", c.param, c.j);
            }
            Ok(Report {
                passed: true,
                result: to_value(&list),
                text,
                csv,
                latex: None,
            })
        }
        Task::Poles { j } => {
            let p = lambda_set(*j);
            let text = format!(
                "j={}\n  computed alpha: {:?}\n  computed beta:  {:?}\n  stated alpha:   {:?}\n  stated beta:    {:?}\n  outside family: {:?}\n  computed, not stated: {:?}\n  stated, not computed: {:?}\n",
                p.j,
                p.computed_alpha,
                p.computed_beta,
                p.stated_alpha,
                p.stated_beta,
                p.outside_family,
                p.computed_not_stated,
                p.stated_not_computed
            );
            let mut csv = String::from("symbol,factor,stated\n");
            for (sym, computed, stated) in [("alpha", &p.computed_alpha, &p.stated_alpha), ("beta", &p.computed_beta, &p.stated_beta)] {
                for f in computed {
                    let _ = writeln!(csv, "{sym},{f},{}", stated.contains(f));
                }
            }
            Ok(Report {
                passed: p.contained_in_family,
                result: to_value(&p),
                text,
                csv,
                latex: None,
            })
        }
    }
}

fn construct(j: u32, dim: Option<i64>) -> Result<Report, UsageError> {
    let (mut e, mut m) = (build_e(j), build_m(j));
    if let Some(d) = dim {
        e = e.specialize_dim(d)?;
        m = m.specialize_dim(d)?;
    }
    let mut csv = String::from("operator,powA,powB,powC,num,den\n");
    for (name, op) in [("E", &e), ("M", &m)] {
        for t in op.to_json() {
            let _ = writeln!(csv, "{name},{},{},{},\"{}\",\"{}\"", t.pow_a, t.pow_b, t.pow_c, t.coeff.num, t.coeff.den.join(";"));
        }
    }
    let latex = format!(
        "E_{{\\alpha,\\beta,{j}}} = {}\n\nM_{{\\alpha,\\beta,{j}}} = {}\n",
        e.to_latex(),
        m.to_latex()
    );
    Ok(Report {
        passed: true,
        result: json!({
            "j": j,
            "dim": dim,
            "degree": 2 * j,
            "E": op_json(&e),
            "M": op_json(&m),
        }),
        text: format!("E_{j} = {e}\nM_{j} = {m}\n"),
        csv,
        latex: Some(latex),
    })
}

fn op_json(op: &BidiffOp) -> Value {
    to_value(&op.to_json())
}

fn verify_symbolic(m_max: u32, rule: RecursionRule) -> Result<Report, UsageError> {
    if m_max > M_MAX_CEILING {
        return Err(UsageError(format!("--m-max {m_max} exceeds the ceiling {M_MAX_CEILING}")));
    }
    let reports = [
        verify_laplacian_power(m_max),
        verify_m_on_kernel(m_max, rule),
        verify_shifted_m(m_max),
        verify_e_identity(m_max),
    ];
    let passed = reports.iter().all(IdentityReport::all_passed);
    let mut text = String::new();
    let mut csv = String::from("identity,case,passed\n");
    for r in &reports {
        let ok = r.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(text, "{}: {ok}/{} exact", r.identity, r.checks.len());
        for c in &r.checks {
            let _ = writeln!(csv, "{},\"{}\",{}", r.identity, c.label, c.passed);
            if let Some(diff) = &c.difference {
                let _ = writeln!(text, "  {} fails, lhs - rhs = {diff}", c.label);
            }
        }
    }
    Ok(Report {
        passed,
        result: json!({ "identities": to_value(&reports) }),
        text,
        csv,
        latex: None,
    })
}

fn verify_numeric(p: &NumericConfig) -> Result<Report, UsageError> {
    match p.suite {
        Suite::Norms => {
            let r = norms_suite(p.n, p.box_len, p.tolerance, KNAPP_STEIN_TOLERANCE)?;
            let mut text = String::new();
            let mut csv = String::from("check,param,value,reference,rel_error,passed\n");
            for g in &r.gaussian {
                let _ = writeln!(text, "gaussian mu={}: {} vs {} (rel {:.3e})", g.mu, g.value, g.oracle, g.rel_error);
                let _ = writeln!(csv, "gaussian,{},{},{},{},{}", g.mu, g.value, g.oracle, g.rel_error, g.passed);
            }
            for k in &r.knapp_stein {
                let disc = k.rel_discrepancy.map_or("pole".to_string(), |d| format!("{d:.3e}"));
                let _ = writeln!(text, "knapp-stein n={} mu={}: {disc}", k.n, k.mu);
                let _ = writeln!(
                    csv,
                    "knapp-stein n={},{},{},{},{},{}",
                    k.n,
                    k.mu,
                    opt(k.value),
                    opt(k.duplicated),
                    opt(k.rel_discrepancy),
                    k.passed
                );
            }
            Ok(numeric_report(r.passed, to_value(&r), text, csv))
        }
        Suite::Bound => {
            let params = BoundParams {
                d: p.d,
                alpha: p.alpha,
                beta: p.beta,
                m: p.m,
                trials: p.trials,
                seed: p.seed,
                n: p.n,
                box_len: p.box_len,
            };
            let r = bound_experiment(&params)?;
            let passed = r.all_finite && r.refinement_drift < p.tolerance;
            let text = format!(
                "max ratio {} at N={}, {} at N={}; drift {:.3e} (limit {})\n",
                r.max_ratio, r.grid.n, r.refined_max_ratio, r.refined_grid.n, r.refinement_drift, p.tolerance
            );
            let mut csv = String::from("trial,ratio,refined_ratio\n");
            for (i, (a, b)) in r.ratios.iter().zip(&r.refined_ratios).enumerate() {
                let _ = writeln!(csv, "{i},{a},{b}");
            }
            Ok(numeric_report(passed, to_value(&r), text, csv))
        }
        Suite::Mc => {
            let params = McParams {
                d: p.d,
                alpha: p.alpha,
                beta: p.beta,
                m: p.m,
                samples: p.samples,
                seed: p.seed,
            };
            let r = mc_suite(&params, &MC_RADII, p.sigmas)?;
            let mut text = format!("homogeneity exponent {}, max z {:.3}\n", r.homogeneity.exponent, r.homogeneity.max_z);
            let mut csv = String::from("radius,seed,mean,std_error,normalized\n");
            for row in &r.homogeneity.rows {
                let _ = writeln!(text, "  |zeta|={}: {} +- {}", row.radius, row.estimate.mean, row.estimate.std_error);
                let _ = writeln!(csv, "{},{},{},{},{}", row.radius, row.seed, row.estimate.mean, row.estimate.std_error, row.normalized);
            }
            if let Some(q) = &r.quadrature {
                let _ = writeln!(text, "quadrature {} vs {} +- {} (z {:.3})", q.quadrature, q.estimate.mean, q.estimate.std_error, q.z);
            }
            if r.divergence_warning {
                text.push_str("warning: estimates may not have converged\n");
            }
            Ok(numeric_report(r.passed, to_value(&r), text, csv))
        }
        Suite::Equivariance => {
            let params = EquivarianceParams {
                d: p.d,
                alpha: p.alpha,
                beta: p.beta,
                m: p.m,
                trials: p.trials,
                seed: p.seed,
                n: p.n,
                box_len: p.box_len,
                tolerance: p.tolerance,
            };
            let r = equivariance_suite(&params)?;
            let text = format!("max rel error {:.3e} over {} cases (tol {})\n", r.max_rel_error, r.cases.len(), p.tolerance);
            let mut csv = String::from("trial,element,rel_error,passed\n");
            for c in &r.cases {
                let _ = writeln!(csv, "{},\"{}\",{},{}", c.trial, c.element, c.rel_error, c.passed);
            }
            Ok(numeric_report(r.passed, to_value(&r), text, csv))
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn numeric_report(passed: bool, result: Value, text: String, csv: String) -> Report {
    Report {
        passed,
        result,
        text,
        csv,
        latex: None,
    }
}

pub fn render(config: &RunConfig, report: &Report) -> Result<String, UsageError> {
    Ok(match config.format {
        Format::Json => {
            let doc = json!({
                "schema": SCHEMA,
                "config": to_value(config),
                "passed": report.passed,
                "result": report.result,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("json");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = report.text.clone();
            s.push_str(if report.passed { "PASS\n" } else { "FAIL\n" });
            s
        }
        Format::Csv => report.csv.clone(),
        Format::Latex => report
            .latex
            .clone()
            .ok_or_else(|| UsageError("latex output is only available for `construct`".into()))?,
    })
}
