use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use dsvd::governing::solve_triplet;
use dsvd::linalg::Matrix;
use dsvd::verify::{compare, fd_gradient, FdScheme, MAX_DIGITS};
use dsvd::{rad, total_gradient, GradientBundle, Result, SingularTriplet};

use crate::{emit, Method, Problem, ProblemArgs, Status};

/// Cross-method agreement required on top of `--threshold`.
const CROSS_DIGITS: u32 = 9;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Forward,
    Central,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = dsvd::verify::DEFAULT_EPS)]
    eps: f64,
    #[arg(long, value_enum, default_value = "forward")]
    scheme: SchemeArg,
    /// Minimum matched significant digits against finite differences.
    #[arg(long, default_value_t = 5)]
    threshold: u32,
}

fn bundle_for(
    p: &Problem,
    t: &SingularTriplet<f64>,
    method: Method,
) -> Result<GradientBundle<f64>> {
    match method {
        Method::Adjoint(f) => total_gradient(f, &p.a, t, &p.objective),
        Method::Rad => Ok(rad::sigma_bundle(t)),
    }
}

fn matrix_json(m: &Matrix<f64>) -> Value {
    json!(m.to_rows())
}

fn bundle_json(b: &GradientBundle<f64>) -> Value {
    let mut obj = serde_json::Map::new();
    for (name, block) in b.blocks() {
        obj.insert(name.to_string(), matrix_json(block));
    }
    Value::Object(obj)
}

fn triplet_json(t: &SingularTriplet<f64>) -> Value {
    json!({
        "sigma": t.sigma,
        "u": { "re": t.u.re, "im": t.u.im },
        "v": { "re": t.v.re, "im": t.v.im },
    })
}

/// Normwise agreement `⌊−log₁₀(max|a − b| / max(|a|, |b|))⌋`, capped like the per-entry count.
fn normwise_digits(a: &GradientBundle<f64>, b: &GradientBundle<f64>) -> u32 {
    let diff = a.sub(b).max_abs();
    let scale = a.max_abs().max(b.max_abs());
    if diff == 0.0 {
        return MAX_DIGITS;
    }
    let d = (-(diff / scale.max(1e-300)).log10()).floor();
    if d.is_finite() && d > 0.0 {
        (d as u32).min(MAX_DIGITS)
    } else {
        0
    }
}

fn cross_method(bundles: &[(Method, GradientBundle<f64>)]) -> Option<u32> {
    let mut worst = None;
    for (i, (_, a)) in bundles.iter().enumerate() {
        for (_, b) in &bundles[i + 1..] {
            let d = normwise_digits(a, b);
            worst = Some(worst.map_or(d, |w: u32| w.min(d)));
        }
    }
    worst
}

fn header(p: &Problem, t: &SingularTriplet<f64>) -> serde_json::Map<String, Value> {
    let (m, n) = p.a.shape();
    let mut h = serde_json::Map::new();
    h.insert("case".into(), json!(p.name));
    h.insert("m".into(), json!(m));
    h.insert("n".into(), json!(n));
    h.insert("index".into(), json!(p.spec.index));
    h.insert(
        "objective".into(),
        json!(if p.is_sigma { "sigma" } else { "linear" }),
    );
    h.insert("triplet".into(), triplet_json(t));
    h
}

pub fn run_grad(args: &ProblemArgs) -> Result<Status> {
    let p = args.load()?;
    let t = solve_triplet(&p.a, &p.spec)?;
    let mut methods = Vec::new();
    for &method in &p.methods {
        let b = bundle_for(&p, &t, method)?;
        methods.push(json!({ "method": method.name(), "bundle": bundle_json(&b) }));
    }
    let mut out = header(&p, &t);
    out.insert("methods".into(), Value::Array(methods));
    emit(&Value::Object(out), args.json_out.as_deref())?;
    Ok(Status::Pass)
}

pub fn run(args: &VerifyArgs) -> Result<Status> {
    let p = args.problem.load()?;
    let t = solve_triplet(&p.a, &p.spec)?;
    let scheme = match args.scheme {
        SchemeArg::Forward => FdScheme::Forward,
        SchemeArg::Central => FdScheme::Central,
    };
    let fd = fd_gradient(&p.objective, &p.a, &p.spec, args.eps, scheme)?;

    let mut bundles = Vec::new();
    for &method in &p.methods {
        bundles.push((method, bundle_for(&p, &t, method)?));
    }
    let mut min_digits = MAX_DIGITS;
    let mut methods = Vec::new();
    for (method, b) in &bundles {
        let report = compare(b, &fd)?;
        min_digits = min_digits.min(report.min_digits);
        eprintln!("{:>5}: min_digits {}", method.name(), report.min_digits);
        methods.push(json!({
            "method": method.name(),
            "min_digits": report.min_digits,
            "bundle": bundle_json(b),
            "entries": serde_json::to_value(&report.entries)?,
        }));
    }
    let cross = cross_method(&bundles);
    if let Some(c) = cross {
        eprintln!("cross-method digits {c}");
    }
    let pass = min_digits >= args.threshold && cross.is_none_or(|c| c >= CROSS_DIGITS);

    let mut out = header(&p, &t);
    out.insert("eps".into(), json!(args.eps));
    out.insert(
        "scheme".into(),
        json!(match args.scheme {
            SchemeArg::Forward => "forward",
            SchemeArg::Central => "central",
        }),
    );
    out.insert("threshold".into(), json!(args.threshold));
    out.insert("fd".into(), bundle_json(&fd));
    out.insert("methods".into(), Value::Array(methods));
    out.insert("cross_method_digits".into(), json!(cross));
    out.insert("min_digits".into(), json!(min_digits));
    out.insert("pass".into(), json!(pass));
    emit(&Value::Object(out), args.problem.json_out.as_deref())?;
    Ok(if pass {
        Status::Pass
    } else {
        Status::BelowThreshold
    })
}
