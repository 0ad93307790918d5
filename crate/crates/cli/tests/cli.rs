use std::process::{Command, Output};

fn capillary(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capillary")).args(args).output().unwrap()
}

fn json_lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

const HALF_PI: &str = "1.5707963267948966";

#[test]
fn generated_mesh_round_trips_through_check_hk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cap.off");
    let p = path.to_str().unwrap();
    let out = capillary(&["gen-cap", "--theta0", "1.2", "--res", "4", "-o", p]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = capillary(&["check-hk", "--mesh", p, "--theta0", "1.2"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = &json_lines(&out)[0];
    assert!(rep["relative_deficit"].as_f64().unwrap().abs() < 1e-2);
}

#[test]
fn first_touch_emits_one_event() {
    let out = capillary(&["first-touch", "--theta0", HALF_PI, "--analytic", "--seed", "0,0,0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let ev = &json_lines(&out)[0];
    assert!((ev["r0"].as_f64().unwrap() - 0.7).abs() < 1e-9);
    assert_eq!(ev["class"], "Interior");
}

#[test]
fn sweepout_streams_events() {
    let out = capillary(&["sweepout", "--theta0", HALF_PI, "--res", "3", "--samples", "5", "--events"]);
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[5]["coverage"].as_f64(), Some(1.0));
}

#[test]
fn exit_codes() {
    // check failure
    let out = capillary(&["check-structural", "--theta0", "1.0", "--res", "3", "--tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(1));
    // inadmissible angles are an input error quoting the angle chain
    let out = capillary(&["check-hk", "--theta1", "0.3", "--theta2", "0.3", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta1 + theta2"));
    let out = capillary(&["first-touch", "--theta0", "1.0", "--seed", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.toml");
    std::fs::write(&cfg, format!("scenario = \"halfspace\"\ntheta0 = {HALF_PI}\nlevels = [3, 4]\nsamples = 20\n")).unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out = capillary(&["report", "--config", cfg.to_str().unwrap(), "-o", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    std::fs::write(&cfg, "scenario = \"halfspace\"\ntheta0 = 1.0\nlevels = [4, 3]\n").unwrap();
    let out = capillary(&["report", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("levels[1]"));
}

#[test]
fn alexandrov_and_elliptic_point() {
    let out = capillary(&["alexandrov", "--theta1", "1.0", "--theta2", "1.2", "--alpha", HALF_PI, "--res", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_lines(&out)[0]["is_capillary_cap"], true);
    let out = capillary(&["elliptic-point", "--theta0", "2.0", "--amplitude", "0.05", "--res", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_lines(&out)[0]["passes"], true);
}
