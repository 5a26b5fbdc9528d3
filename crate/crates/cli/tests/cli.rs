use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kleinian"))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn golden(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

const C25: &str = r#"{"n":2,"s":5,"lambda":{"4":[0.2,0.1],"8":[-0.3,0.2],"10":[0.5,0]}}"#;
const C27: &str = r#"{"n":2,"s":7,"lambda":{"4":[0.2,0.1],"10":[-0.3,0.2],"14":[0.5,0]}}"#;
const C34: &str = r#"{"n":3,"s":4,"lambda":{"2":[0.1,0.2],"5":[-0.2,0.1],"12":[0.4,0]}}"#;

#[test]
fn describe_matches_golden() {
    let c = scratch("pham34.json", r#"{"n":3,"s":4}"#);
    let out = run(&["describe", "--curve", c.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), golden("describe_34.json"));
    assert_eq!(json(&out), serde_json::json!({"genus":3,"gaps":[1,2,5],"wgt_sigma":-5}));
}

#[test]
fn selftest_is_deterministic() {
    let a = run(&["selftest", "--seed", "42"]);
    let b = run(&["selftest", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["selftest", "--seed", "43", "--suite", "roundtrip"]);
    let same = run(&["selftest", "--seed", "42", "--suite", "roundtrip"]);
    assert_ne!(other.stdout, same.stdout);
}

#[test]
fn selftest_schema_is_stable() {
    let out = json(&run(&["selftest"]));
    let schema: Vec<Value> = out["suites"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            let names: Vec<Value> = s["checks"].as_array().unwrap().iter().map(|c| c["name"].clone()).collect();
            serde_json::json!({"id": s["id"], "suite": s["suite"], "checks": names})
        })
        .collect();
    assert_eq!(Value::Array(schema), golden("selftest_schema.json"));
    let structural = json(&run(&["selftest", "--suite", "structural"]));
    assert_eq!(structural, golden("selftest_structural.json"));
}

#[test]
fn selftest_timings_add_runtime_fields() {
    let out = json(&run(&["selftest", "--suite", "1", "--timings"]));
    assert!(out["seconds"].is_f64());
    assert!(out["suites"][0]["seconds"].is_f64());
}

#[test]
fn uniformize_then_invert_roundtrips() {
    for (name, curve) in [("c25.json", C25), ("c27.json", C27), ("c34.json", C34)] {
        let c = scratch(name, curve);
        let c = c.to_str().unwrap();
        let bridge_or_random = run(&["theta-bridge", "--curve", c, "--seed", "5"]);
        let divisor = if bridge_or_random.status.code() == Some(0) {
            json(&bridge_or_random)["divisor"].clone()
        } else {
            // trigonal curves have no theta side; use a fixed divisor
            let pts: Vec<[f64; 4]> = {
                let cv: kleinian::CurveModel = serde_json::from_str(curve).unwrap();
                [(0.3, 0.2), (-0.4, 0.5), (0.1, -0.6)]
                    .iter()
                    .map(|&(re, im)| {
                        let x = kleinian::C64::new(re, im);
                        let y = cv.y_roots(x).unwrap()[0];
                        [x.re, x.im, y.re, y.im]
                    })
                    .collect()
            };
            serde_json::json!({ "points": pts })
        };
        let d = scratch(&format!("d-{name}"), &divisor.to_string());
        let un = run(&["uniformize", "--curve", c, "--input", d.to_str().unwrap()]);
        assert_eq!(un.status.code(), Some(0), "{}", String::from_utf8_lossy(&un.stderr));
        let u = scratch(&format!("u-{name}"), &String::from_utf8(un.stdout).unwrap());
        let inv = run(&["invert-basis", "--curve", c, "--input", u.to_str().unwrap()]);
        assert_eq!(inv.status.code(), Some(0));
        let r = json(&inv);
        assert!(r["roundtrip"]["max_point_mismatch"].as_f64().unwrap() < 1e-8);
        assert_eq!(r["roundtrip"]["passed"], Value::Bool(true));
    }
}

#[test]
fn add_and_negate_chain() {
    let c = scratch("c25-add.json", C25);
    let c = c.to_str().unwrap();
    let d1 = scratch("d1.json", &json(&run(&["theta-bridge", "--curve", c, "--seed", "1"]))["divisor"].to_string());
    let d2 = scratch("d2.json", &json(&run(&["theta-bridge", "--curve", c, "--seed", "2"]))["divisor"].to_string());
    let sum = run(&["add", "--curve", c, "--input", d1.to_str().unwrap(), "--input", d2.to_str().unwrap()]);
    assert_eq!(sum.status.code(), Some(0), "{}", String::from_utf8_lossy(&sum.stderr));
    let s = scratch("sum.json", &String::from_utf8(sum.stdout).unwrap());
    let neg = json(&run(&["negate", "--curve", c, "--input", s.to_str().unwrap()]));
    let a = json(&run(&["negate", "--curve", c, "--input", d1.to_str().unwrap()]))["divisor"].clone();
    let na = scratch("neg1.json", &a.to_string());
    let back = run(&["add", "--curve", c, "--input", na.to_str().unwrap(), "--input", s.to_str().unwrap()]);
    assert_eq!(back.status.code(), Some(0));
    let got = json(&back)["divisor"]["points"].as_array().unwrap().clone();
    let want = json(&run(&["uniformize", "--curve", c, "--input", d2.to_str().unwrap()]))["divisor"]["points"]
        .as_array()
        .unwrap()
        .clone();
    assert_eq!(got.len(), want.len());
    for p in &want {
        let best = got
            .iter()
            .map(|q| (0..4).map(|k| (p[k].as_f64().unwrap() - q[k].as_f64().unwrap()).abs()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-7, "point mismatch {best:e}");
    }
    assert_eq!(neg["divisor"]["points"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_identities_reports_all_relations() {
    let c = scratch("c27-id.json", C27);
    let c = c.to_str().unwrap();
    let d = scratch("d27.json", &json(&run(&["theta-bridge", "--curve", c, "--seed", "4"]))["divisor"].to_string());
    let out = run(&["verify-identities", "--curve", c, "--input", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    for name in ["J10", "J12", "J14"] {
        assert!(r["residuals"][name].as_f64().unwrap() < 1e-7);
    }
    assert!(r["displayed"]["J10"].as_f64().unwrap() > 1e-5);
    assert!(r["displayed"]["J12"].as_f64().unwrap() < 1e-7);
}

#[test]
fn periods_report() {
    let c = scratch("c25-per.json", C25);
    let out = run(&["periods", "--curve", c.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["tau"].as_array().unwrap().len(), 2);
    assert_eq!(r["branch_points"].as_array().unwrap().len(), 5);
    assert_eq!(r["riemann_characteristic"]["epsP"].as_array().unwrap().len(), 2);
    let strict = run(&["periods", "--curve", c.to_str().unwrap(), "--tol", "legendre=1e-300"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn output_flag_writes_the_report() {
    let c = scratch("pham34-out.json", r#"{"n":3,"s":4}"#);
    let target = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests/describe-out.json");
    let out = run(&["describe", "--curve", c.to_str().unwrap(), "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(written, golden("describe_34.json"));
}

#[test]
fn exit_codes() {
    let good = scratch("c25-exit.json", C25);
    let good = good.to_str().unwrap();
    assert_eq!(run(&["describe", "--curve", "/nonexistent/curve.json"]).status.code(), Some(2));
    assert_eq!(run(&["describe"]).status.code(), Some(2));
    let extra = scratch("extra.json", r#"{"n":2,"s":5,"mu":1}"#);
    assert_eq!(run(&["describe", "--curve", extra.to_str().unwrap()]).status.code(), Some(2));
    let even = scratch("even.json", r#"{"n":2,"s":4}"#);
    assert_eq!(run(&["describe", "--curve", even.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["periods", "--curve", good, "--tol", "nope=1"]).status.code(), Some(2));
    assert_eq!(run(&["periods", "--curve", good, "--tol", "legendre"]).status.code(), Some(2));
    assert_eq!(run(&["selftest", "--suite", "nosuch"]).status.code(), Some(2));
    let off = scratch("off.json", r#"{"points":[[0.1,0,5,0],[0.2,0,7,0]]}"#);
    assert_eq!(run(&["uniformize", "--curve", good, "--input", off.to_str().unwrap()]).status.code(), Some(2));
    let singular = scratch("singular.json", r#"{"n":2,"s":3}"#);
    assert_eq!(run(&["periods", "--curve", singular.to_str().unwrap()]).status.code(), Some(3));
}
