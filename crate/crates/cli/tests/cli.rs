use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_twrgraph");

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["hypothesis", "--q", "4"]).0, 0);
    assert_eq!(run(&["hypothesis", "--q", "6"]).0, 2);
    assert_eq!(run(&["hypothesis"]).0, 2);
    assert_eq!(run(&["verify-graph", "--q", "13"]).0, 2);
    assert_eq!(run(&["no-such-command"]).0, 2);
}

#[test]
fn hypothesis_q9_reports_field() {
    let (code, out, _) = run(&["hypothesis", "--q", "9", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["p"], 3);
    assert_eq!(v["m"], 2);
    assert_eq!(v["metadata"]["modulus"], "x^2+1");
}

#[test]
fn injected_fault_fails_at_normality() {
    let (code, out, _) = run(&["verify-graph", "--q", "4", "--inject-fault", "--json"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["first_failure"], "R normalised by Q");
    let (code, out, _) = run(&["construct-r", "--q", "4", "--inject-fault"]);
    assert_eq!(code, 1);
    assert!(out.contains("failed at \"R normalised by Q\""));
}

#[test]
fn construct_r_writes_rdata() {
    let dir = std::env::temp_dir().join(format!("twrgraph-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let (code, _, _) = run(&["construct-r", "--q", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["r"]["u"].as_array().unwrap().len(), 24);
    assert_eq!(v["r"]["r_basis"]["rows"], 2);
    assert_eq!(v["metadata"]["construction_seed"], 0x5EED);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn ball_exports() {
    let (code, out, _) = run(&["ball", "--q", "4", "--side", "right", "--radius", "1"]);
    assert_eq!(code, 0);
    let lines: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 17);
    assert_eq!(lines[0]["side"], "right");
    assert_eq!(lines[0]["neighbors"].as_array().unwrap().len(), 16);
    assert!(lines[1..].iter().all(|l| l["side"] == "left" && l["neighbors"].is_null()));
    let (code, dot, _) = run(&["ball", "--q", "4", "--radius", "1", "--dot"]);
    assert_eq!(code, 0);
    assert!(dot.starts_with("graph ball {"));
    assert_eq!(run(&["ball", "--q", "4", "--radius", "2", "--dot"]).0, 2);
    assert_eq!(run(&["ball", "--q", "4", "--radius", "4"]).0, 2);
}

#[test]
fn catalog_describes_q8() {
    let (code, out, _) = run(&["catalog", "--q", "8"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["modulus"], "x^3+x+1");
    assert_eq!(v["t_order"], "504");
    assert_eq!(v["degree"], 64);
}
