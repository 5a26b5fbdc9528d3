//! Command-line front end: JSON in, JSON reports out.
//!
//! Exit status is 0 when every check of the verb passes, 1 on a check
//! failure, 2 on malformed input and 3 on a numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use kleinian::addition::{add, negate};
use kleinian::curve::CurveJson;
use kleinian::divisor::DivisorJson;
use kleinian::identities::{
    eliminated_34, hyperelliptic_remainder, jacobian_model_34, residuals_27, residuals_34, IdentityResidual,
};
use kleinian::numeric::matching::multiset_distance;
use kleinian::random;
use kleinian::suites::{run_suite, suite_id, SuiteOptions, Tolerances, SUITES};
use kleinian::transcendental::{abel, branch_points, period_matrices, riemann_char, ThetaSide};
use kleinian::uniformization::{extended_34, BasisJson};
use kleinian::{basis_to_divisor, divisor_to_basis, BasisRecord, CurveModel, Divisor, Error, C64};

#[derive(Parser, Debug)]
#[command(name = "kleinian", version, about = "Kleinian ℘-functions on (n,s)-curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Curve JSON file
    #[arg(long, global = true)]
    curve: Option<PathBuf>,
    /// Input JSON file (divisor, basis record or an earlier report); repeat for `add`
    #[arg(long, global = true)]
    input: Vec<PathBuf>,
    /// Tolerance override `name=value`; repeatable
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Include wall-clock timings (reports are then no longer reproducible)
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Genus, gap sequence and the weight of σ
    Describe,
    /// Divisor -> basis ℘-values
    Uniformize,
    /// Basis ℘-values -> divisor, with a roundtrip check when the input carries the divisor
    InvertBasis,
    /// Sum of two divisors in the Jacobian
    Add,
    /// Inverse of a divisor in the Jacobian
    Negate,
    /// Normalized residuals of the Jacobian and Kummer relations
    VerifyIdentities,
    /// Period matrices, τ, κ and the Legendre residual
    Periods,
    /// ℘ from theta functions against ℘ from the divisor
    ThetaBridge,
    /// Run the randomized acceptance suites
    Selftest {
        /// Suite name or number; repeatable, default all
        #[arg(long)]
        suite: Vec<String>,
    },
}

enum Failure {
    Input(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

type Outcome = std::result::Result<(Value, bool), Failure>;

fn input_err(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn read_json(path: &Path) -> std::result::Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

/// A curve file, or any report carrying a `curve` object.
fn curve_from(v: Value) -> std::result::Result<CurveModel, Failure> {
    if let Some(inner) = v.get("curve") {
        return curve_from(inner.clone());
    }
    let j: CurveJson = serde_json::from_value(v).map_err(|e| input_err(format!("curve: {e}")))?;
    Ok(CurveModel::try_from(j)?)
}

fn divisor_from(curve: &CurveModel, v: &Value) -> std::result::Result<Divisor, Failure> {
    if v.get("points").is_none() {
        if let Some(inner) = v.get("divisor") {
            return divisor_from(curve, inner);
        }
    }
    let j: DivisorJson = serde_json::from_value(v.clone()).map_err(|e| input_err(format!("divisor: {e}")))?;
    Ok(Divisor::from_json(curve, &j)?)
}

fn record_from(v: &Value) -> std::result::Result<BasisRecord, Failure> {
    if v.get("p").is_none() {
        if let Some(inner) = v.get("record") {
            return record_from(inner);
        }
    }
    let j: BasisJson = serde_json::from_value(v.clone()).map_err(|e| input_err(format!("record: {e}")))?;
    Ok(BasisRecord::from_json(&j)?)
}

fn cpx(z: C64) -> Value {
    json!([z.re, z.im])
}

fn cvec(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|z| cpx(*z)).collect())
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

struct Ctx {
    curve: Option<PathBuf>,
    inputs: Vec<PathBuf>,
    tol: Tolerances,
    seed: u64,
    timings: bool,
}

impl Ctx {
    fn curve(&self) -> std::result::Result<CurveModel, Failure> {
        let path = self.curve.as_ref().ok_or_else(|| input_err("--curve is required"))?;
        curve_from(read_json(path)?)
    }

    fn inputs(&self, count: usize) -> std::result::Result<Vec<Value>, Failure> {
        if self.inputs.len() != count {
            return Err(input_err(format!("expected {count} --input file(s), got {}", self.inputs.len())));
        }
        self.inputs.iter().map(|p| read_json(p)).collect()
    }
}

fn describe(ctx: &Ctx) -> Outcome {
    let cv = ctx.curve()?;
    Ok((json!({ "genus": cv.genus, "gaps": cv.gaps, "wgt_sigma": cv.wgt_sigma() }), true))
}

fn uniformize(ctx: &Ctx) -> Outcome {
    let cv = ctx.curve()?;
    let d = divisor_from(&cv, &ctx.inputs(1)?[0])?;
    let rec = divisor_to_basis(&cv, &d)?;
    Ok((
        json!({ "curve": to_value(&cv), "divisor": to_value(&d.to_json()), "record": to_value(&rec.to_json()) }),
        true,
    ))
}

fn invert_basis(ctx: &Ctx) -> Outcome {
    let cv = ctx.curve()?;
    let input = ctx.inputs(1)?.remove(0);
    let rec = record_from(&input)?;
    let back = basis_to_divisor(&cv, &rec)?;
    let mut out = json!({ "curve": to_value(&cv), "record": to_value(&rec.to_json()), "divisor": to_value(&back.to_json()) });
    let mut passed = true;
    if input.get("divisor").is_some() {
        let orig = divisor_from(&cv, &input)?;
        let err = multiset_distance(&orig.coords(), &back.coords());
        let tol = ctx.tol.get("roundtrip");
        passed = err < tol;
        out["roundtrip"] = json!({ "max_point_mismatch": err, "tolerance": tol, "passed": passed });
    }
    Ok((out, passed))
}

fn add_verb(ctx: &Ctx) -> Outcome {
    let cv = ctx.curve()?;
    let ins = ctx.inputs(2)?;
    let d1 = divisor_from(&cv, &ins[0])?;
    let d2 = divisor_from(&cv, &ins[1])?;
    let sum = add(&cv, &d1, &d2)?;
    Ok((
        json!({
            "curve": to_value(&cv),
            "inputs": [to_value(&d1.to_json()), to_value(&d2.to_json())],
            "divisor": to_value(&sum.to_json()),
        }),
        true,
    ))
}

fn negate_verb(ctx: &Ctx) -> Outcome {
    let cv = ctx.curve()?;
    let d = divisor_from(&cv, &ctx.inputs(1)?[0])?;
    let neg = negate(&cv, &d)?;
    Ok((
        json!({ "curve": to_value(&cv), "input": to_value(&d.to_json()), "divisor": to_value(&neg.to_json()) }),
        true,
    ))
}

fn residual_map(rs: &[IdentityResidual]) -> Map<String, Value> {
    rs.iter().map(|r| (r.name.clone(), json!(r.normalized()))).collect()
}

fn verify_identities(ctx: &Ctx) -> Outcome {
    let cv = ctx.curve()?;
    let input = ctx.inputs(1)?.remove(0);
    let rec = if input.get("p").is_some() || input.get("record").is_some() {
        record_from(&input)?
    } else {
        divisor_to_basis(&cv, &divisor_from(&cv, &input)?)?
    };
    let (checked, displayed) = if cv.is_hyperelliptic() {
        let shown = if (cv.n, cv.s) == (2, 7) { residuals_27(&cv, &rec)? } else { Vec::new() };
        (hyperelliptic_remainder(&cv, &rec)?, shown)
    } else if (cv.n, cv.s) == (3, 4) {
        let shown = jacobian_model_34(&cv, &rec)?;
        let mut all = eliminated_34(&cv, &rec)?;
        let ext = extended_34(&cv, &rec)?;
        all.extend(
            residuals_34(&cv, &ext)?
                .into_iter()
                .filter(|r| !shown.iter().any(|s| s.name == r.name)),
        );
        (all, shown)
    } else {
        return Err(input_err(format!("no relations implemented for the ({},{}) curve", cv.n, cv.s)));
    };
    let tol = ctx.tol.get("jacobian");
    let worst = checked.iter().map(|r| r.normalized()).fold(0.0, f64::max);
    let passed = worst < tol;
    Ok((
        json!({
            "curve": to_value(&cv),
            "record": to_value(&rec.to_json()),
            "residuals": residual_map(&checked),
            "displayed": residual_map(&displayed),
            "tolerance": tol,
            "passed": passed,
        }),
        passed,
    ))
}

fn periods(ctx: &Ctx) -> Outcome {
    let cv = ctx.curve()?;
    let pd = period_matrices(&cv)?;
    let mut out = to_value(&pd.to_json());
    let t = &ctx.tol;
    let checks = [
        ("legendre_residual", pd.legendre_residual, t.get("legendre")),
        ("tau_asymmetry", pd.tau_asymmetry(), t.get("tau_symmetry")),
        ("kappa_asymmetry", pd.kappa_asymmetry(), t.get("kappa_symmetry")),
    ];
    let min_eig = pd.im_tau_min_eigenvalue();
    let mut passed = min_eig > 0.0;
    let mut table = Map::new();
    for (name, value, tol) in checks {
        let ok = value < tol;
        passed &= ok;
        table.insert(name.into(), json!({ "value": value, "tolerance": tol, "passed": ok }));
    }
    out["checks"] = Value::Object(table);
    out["im_tau_min_eigenvalue"] = json!(min_eig);
    out["branch_points"] = cvec(&branch_points(&cv)?);
    out["riemann_characteristic"] = match riemann_char(&pd, &cv) {
        Ok(k) => to_value(&k),
        Err(e) => json!({ "error": e.to_string() }),
    };
    out["curve"] = to_value(&cv);
    out["passed"] = json!(passed);
    Ok((out, passed))
}

fn theta_bridge(ctx: &Ctx) -> Outcome {
    let cv = ctx.curve()?;
    let d = match ctx.inputs.len() {
        0 => random::divisor(&mut random::rng(ctx.seed, 0), &cv, cv.genus)?,
        _ => divisor_from(&cv, &ctx.inputs(1)?[0])?,
    };
    let side = ThetaSide::new(&cv)?;
    let rec = divisor_to_basis(&cv, &d)?;
    let u = abel(&cv, &d)?;
    let scale_p = rec.p.values().map(|v| v.norm()).fold(1.0, f64::max);
    let scale_q = rec.q.values().map(|v| v.norm()).fold(1.0, f64::max);
    let tol = ctx.tol.get("bridge");
    let mut rows = Vec::new();
    let mut passed = true;
    for &w in &cv.gaps {
        let (tp, ap) = (side.wp(&u, &[1, w])?, rec.p(w)?);
        let (tq, aq) = (side.wp(&u, &[1, 1, w])?, rec.q(w)?);
        let e2 = (tp - ap).norm() / scale_p;
        let e3 = (tq.norm() - aq.norm()).abs() / scale_q;
        let sign = if (tq - aq).norm() <= (tq + aq).norm() { 1 } else { -1 };
        passed &= e2 < tol && e3 < tol;
        rows.push(json!({
            "gap": w,
            "p": { "theta": cpx(tp), "algebra": cpx(ap), "error": e2 },
            "q": { "theta": cpx(tq), "algebra": cpx(aq), "modulus_error": e3, "sign": sign },
        }));
    }
    Ok((
        json!({
            "curve": to_value(&cv),
            "divisor": to_value(&d.to_json()),
            "u": cvec(&u),
            "characteristic": to_value(&side.characteristic),
            "comparisons": rows,
            "tolerance": tol,
            "passed": passed,
        }),
        passed,
    ))
}

fn selftest(ctx: &Ctx, names: &[String]) -> Outcome {
    let ids: Vec<u32> = if names.is_empty() {
        SUITES.iter().map(|(id, _)| *id).collect()
    } else {
        names
            .iter()
            .map(|n| {
                n.parse::<u32>()
                    .ok()
                    .filter(|id| SUITES.iter().any(|(i, _)| i == id))
                    .or_else(|| suite_id(n))
                    .ok_or_else(|| input_err(format!("unknown suite {n:?}")))
            })
            .collect::<std::result::Result<_, _>>()?
    };
    let opts = SuiteOptions { seed: ctx.seed, timings: ctx.timings, tol: ctx.tol.clone() };
    let mut reports = Vec::new();
    let mut passed = true;
    for id in ids {
        let r = run_suite(id, &opts)?;
        eprintln!("{}", r.summary_line());
        passed &= r.passed;
        reports.push(to_value(&r));
    }
    Ok((json!({ "seed": ctx.seed, "passed": passed, "suites": reports }), passed))
}

fn run(cli: &Cli) -> Outcome {
    let mut tol = Tolerances::default();
    for item in &cli.tol {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| input_err(format!("--tol expects name=value, got {item:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| input_err(format!("--tol {name}: {value:?} is not a number")))?;
        tol.set(name.trim(), value)?;
    }
    let ctx = Ctx { curve: cli.curve.clone(), inputs: cli.input.clone(), tol, seed: cli.seed, timings: cli.timings };
    let start = Instant::now();
    let (mut report, passed) = match &cli.command {
        Command::Describe => describe(&ctx)?,
        Command::Uniformize => uniformize(&ctx)?,
        Command::InvertBasis => invert_basis(&ctx)?,
        Command::Add => add_verb(&ctx)?,
        Command::Negate => negate_verb(&ctx)?,
        Command::VerifyIdentities => verify_identities(&ctx)?,
        Command::Periods => periods(&ctx)?,
        Command::ThetaBridge => theta_bridge(&ctx)?,
        Command::Selftest { suite } => selftest(&ctx, suite)?,
    };
    if cli.timings {
        report["seconds"] = json!(start.elapsed().as_secs_f64());
    }
    Ok((report, passed))
}

fn emit(cli: &Cli, report: &Value) -> std::result::Result<(), String> {
    let text = serde_json::to_string_pretty(report).expect("JSON values serialize") + "\n";
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, passed)) => {
            if let Err(e) = emit(&cli, &report) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
