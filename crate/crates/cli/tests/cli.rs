use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sporadic"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sporadic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn bad_range_is_a_config_error() {
    let out = bin().args(["--p-range", "9..3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["--tau", "sigma10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["--tables", "prop:none"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_a_resource_error() {
    let out = bin()
        .args(["--only", "p=5,tau=sigma4", "--dirichlet", "off", "--json", "/proc/forbidden/out.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn table_mode_prints_rows() {
    let out = bin().args(["--tables", "prop:sig4c"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains("sigma4bar")).count(), 8);
    assert!(text.contains("0.4257"));
    assert!(!text.contains("mismatch"));
}

#[test]
fn report_is_deterministic_and_versioned() {
    let run = |name: &str| {
        let path = scratch(name);
        let out = bin()
            .args(["--p-range", "3..8", "--tau", "sigma4bar,sigma1bar", "--dirichlet", "off", "--json"])
            .arg(&path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(path).unwrap()
    };
    let a = run("a.json");
    let b = run("b.json");
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["schema"], 1);
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs.len(), 12);
    let r = recs.iter().find(|r| r["tau"] == "sigma4bar" && r["p"] == 7).unwrap();
    assert_eq!(r["signature"], "(2,0,1)");
    assert_eq!(r["nondiscreteness"]["verdict"], "non-discrete (Jorgensen)");
    assert_eq!(r["nondiscreteness"]["witness"]["value"].as_str().unwrap().len() > 10, true);
    assert_eq!(r["dirichlet"]["skipped"], "disabled");
    assert_eq!(r["tau_exact"]["conductor"], 7);
    let r = recs.iter().find(|r| r["tau"] == "sigma1bar" && r["p"] == 8).unwrap();
    assert_eq!(r["arithmeticity"]["skipped"], "not hyperbolic");
}

#[test]
fn sigma4bar_three_faces() {
    let dir = scratch("faces");
    let json = scratch("s4b.json");
    let out = bin()
        .args(["--only", "p=3,tau=sigma4bar", "--faces-svg", "--grid", "120", "--faces-dir"])
        .arg(&dir)
        .arg("--json")
        .arg(&json)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svgs = std::fs::read_dir(&dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "svg"))
        .count();
    assert_eq!(svgs, 7);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    let r = &v["records"][0];
    assert_eq!(r["behaviour"], "A");
    assert_eq!(r["side_pairing"]["all_matched"], true);
    assert_eq!(r["arithmeticity"]["satisfied"], true);
    assert_eq!(r["relations"]["failures"].as_array().unwrap().len(), 0);
    assert!(r["cycles"].as_array().unwrap().iter().all(|c| c["integral"] == true));
}
