use std::fs;
use std::process::{Command, Output};

use qconnect::verify::IdentityReport;

fn qconnect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qconnect"))
        .args(args)
        .env_remove("Q_CONNECT_TRUNC_EPS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// First token of `eval` output parsed back into a complex number.
fn value(o: &Output) -> (f64, f64) {
    let s = stdout(o);
    let token = s.split_whitespace().next().expect("value printed");
    let z = qconnect::cli::parse_complex(token).expect("printed value parses");
    (z.re, z.im)
}

#[test]
fn eval_ramanujan_at_zero_is_one() {
    let o = qconnect(&["eval", "Aq", "--q", "0.5", "--x", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).starts_with("1.00000000000000e0+0.00000000000000e0i terms="),
        "{}",
        stdout(&o)
    );
}

#[test]
fn eval_theta_at_its_zero_warns() {
    let o = qconnect(&["eval", "theta", "--q", "0.5", "--x", "-0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let (re, im) = value(&o);
    assert!(re.hypot(im) < 1e-15);
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn resummed_and_closed_2f0_agree() {
    let a = qconnect(&["eval", "2f0", "--q", "0.5", "--lambda", "0.7", "--x", "2.4"]);
    let b = qconnect(&[
        "eval",
        "2f0-closed",
        "--q",
        "0.5",
        "--lambda",
        "0.7",
        "--x",
        "2.4",
    ]);
    assert_eq!((a.status.code(), b.status.code()), (Some(0), Some(0)));
    let ((ar, ai), (br, bi)) = (value(&a), value(&b));
    assert!((ar - br).hypot(ai - bi) <= 1e-12 * br.hypot(bi));
}

#[test]
fn eval_rphis_with_parameters() {
    // 1phi0(a; -; q, x) = (ax; q)_inf / (x; q)_inf; with a = 0 this is e_q(x)
    let a = qconnect(&[
        "eval", "rphis", "--q", "0.5", "--x", "0.3+0.1i", "--upper", "0",
    ]);
    let b = qconnect(&["eval", "eq", "--q", "0.5", "--x", "0.3+0.1i"]);
    let ((ar, ai), (br, bi)) = (value(&a), value(&b));
    assert!((ar - br).hypot(ai - bi) <= 1e-14 * br.hypot(bi));
}

#[test]
fn usage_errors_exit_2() {
    let bad_literal = qconnect(&["eval", "Aq", "--q", "0.5", "--x", "1+2j"]);
    assert_eq!(bad_literal.status.code(), Some(2));
    assert!(
        stderr(&bad_literal).contains("a+bi"),
        "{}",
        stderr(&bad_literal)
    );
    assert_eq!(
        qconnect(&["eval", "nope", "--q", "0.5", "--x", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qconnect(&["eval", "Aq", "--q", "1.5", "--x", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qconnect(&["check", "watson", "--q", "0.5", "--abc", "1,2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qconnect(&["check", "no-such-id", "--q", "0.5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn domain_exclusion_exits_3() {
    let o = qconnect(&["check", "thm-2f0", "--q", "0.5", "--lambda", "1.0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("spiral"), "{}", stderr(&o));
    let o = qconnect(&[
        "eval", "2f0", "--q", "0.5", "--lambda", "0.7", "--x", "-0.35",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn check_passes_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = qconnect(&[
        "check",
        "thm-ramanujan-qairy",
        "--q",
        "0.5",
        "--grid-default",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS max_rel_err="));
    let text = fs::read_to_string(&path).unwrap();
    let report = IdentityReport::from_json(&text).unwrap();
    assert_eq!(report.identity, "thm-ramanujan-qairy");
    assert_eq!(report.points.len(), 24);
    assert_eq!(report.to_json().unwrap(), text);
}

#[test]
fn json_field_names_follow_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    qconnect(&[
        "check",
        "thm-2f0",
        "--q",
        "0.5",
        "--lambda",
        "0.7",
        "--grid-default",
        "--out",
        path.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let keys = |v: &serde_json::Value| {
        let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        k.sort();
        k
    };
    assert_eq!(
        keys(&v),
        [
            "identity",
            "lambda",
            "max_rel_err",
            "pass",
            "points",
            "q",
            "trunc"
        ]
    );
    assert_eq!(
        keys(&v["points"][0]),
        [
            "abs_err",
            "condition",
            "lhs",
            "reason",
            "rel_err",
            "rhs",
            "skipped",
            "x"
        ]
    );
    assert_eq!(keys(&v["trunc"]), ["eps", "n_max"]);
    assert_eq!(v["lambda"]["re"], 0.7);
}

#[test]
fn check_failure_exits_1() {
    let o = qconnect(&[
        "check",
        "thm-2f0",
        "--q",
        "0.5",
        "--lambda",
        "0.7",
        "--mutation",
        "drop-one-minus-q",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL thm-2f0"));
}

#[test]
fn csv_report_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let o = qconnect(&[
        "check",
        "thm-eq-Eq",
        "--q",
        "0.5",
        "--grid",
        "0.4,0.25,-0.3+0.2i",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("x_re,x_im,lhs_re"));
    // 0.25 = q^2 lies on the excluded spiral
    assert!(lines[2].contains("true"), "{}", lines[2]);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "check",
        "ismail-zhang",
        "--q",
        "0.3+0.2i",
        "--grid-default",
        "--out",
        "-",
    ];
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let mut v: Vec<&str> = args.to_vec();
        *v.last_mut().unwrap() = p.to_str().unwrap();
        assert_eq!(qconnect(&v).status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn trunc_eps_from_environment() {
    let run = |eps: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_qconnect"));
        c.args(["eval", "Aq", "--q", "0.5", "--x", "1"]);
        match eps {
            Some(e) => c.env("Q_CONNECT_TRUNC_EPS", e),
            None => c.env_remove("Q_CONNECT_TRUNC_EPS"),
        };
        stdout(&c.output().unwrap())
    };
    let terms = |s: String| -> usize { s.trim().rsplit('=').next().unwrap().parse().unwrap() };
    assert!(terms(run(Some("1e-4"))) < terms(run(None)));
    let bad = Command::new(env!("CARGO_BIN_EXE_qconnect"))
        .args(["eval", "Aq", "--q", "0.5", "--x", "1"])
        .env("Q_CONNECT_TRUNC_EPS", "-1")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn suite_writes_one_report_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = qconnect(&[
        "suite",
        "--q",
        "0.5",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 15);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 15);
}
