use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn posctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posctl")).args(args).output().expect("binary runs")
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

const PREY_PREDATOR: &str = "\
system = predator-prey
laws = nominal, optimal-volterra
contractor = volterra
# prey-dominant (Y0/X0 = 0.35), predator-dominant, equilibrium
initial_conditions = 2, 0.7; 0.7, 2.5; 1, 1
";

#[test]
fn lists() {
    let out = posctl(&["list-systems"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for s in ["predator-prey", "predator-prey-scaled", "scalar-x2"] {
        assert!(text.lines().any(|l| l.starts_with(s)), "{s}");
    }
    let out = posctl(&["list-laws"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 9);
}

#[test]
fn prey_predator_scenario() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "pp.cfg", PREY_PREDATOR);
    let out_dir = tmp.path().join("out");
    let out = posctl(&["run", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&out_dir);
    assert_eq!(m["passed"], true);
    let cmp = m["comparisons"].as_array().unwrap();
    assert_eq!(cmp.len(), 3);
    let sigma = cmp[0]["sigma_rho0"].as_f64().unwrap();
    assert!((0.155..=0.165).contains(&sigma), "{sigma}");
    for c in &cmp[..2] {
        assert!(c["nominal_cost"].as_f64().unwrap() > c["optimal_cost"].as_f64().unwrap());
        assert!(c["relative_saving"].as_f64().unwrap() > 0.0);
    }
    // equilibrium start: everything zero
    assert_eq!(cmp[2]["nominal_cost"].as_f64(), Some(0.0));
    assert_eq!(cmp[2]["optimal_cost"].as_f64(), Some(0.0));
    for r in m["runs"].as_array().unwrap() {
        assert_eq!(r["states_and_controls_positive"], true);
    }

    let csv = std::fs::read_to_string(out_dir.join("ic0_optimal-volterra.csv")).unwrap();
    assert!(csv.starts_with("t,x1,x2,u,V,q,rPsi,J\n"));
    assert!(!csv.contains('\r'));
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 8);
    // 17 significant digits: d.dddddddddddddddde±x
    let mantissa = row[1].split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "pp.cfg", PREY_PREDATOR);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(posctl(&["run", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(posctl(&["run", &cfg, "--out", b.to_str().unwrap()]).status.success());
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 7);
    for n in names {
        assert_eq!(std::fs::read(a.join(&n)).unwrap(), std::fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
    // no temporary files left behind
    assert!(std::fs::read_dir(&a).unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().starts_with('.')));
}

#[test]
fn scalar_scenario_with_strong_clf_laws() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "x2.cfg",
        "system = scalar-x2\nlaws = universal-invopt, direct, continuous-direct\ncontractor = sqrt\n\
         initial_conditions = 1.5\nintegrator.horizon = 20\nintegrator.record_stride = 10\n",
    );
    let out_dir = tmp.path().join("o");
    let out = posctl(&["run", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&out_dir);
    assert_eq!(m["clf_checks"][0]["violations"], 0);
    let runs = m["runs"].as_array().unwrap();
    let v0 = runs[0]["initial_clf"].as_f64().unwrap();
    let cost = |i: usize| runs[i]["summary"]["cost"].as_f64().unwrap() + runs[i]["summary"]["truncation_tail"].as_f64().unwrap();
    // inverse-optimal universal law has value 2V, the direct laws V
    assert!((cost(0) - 2.0 * v0).abs() < 1e-3 * v0, "{}", cost(0));
    assert!((cost(1) - v0).abs() < 1e-3 * v0, "{}", cost(1));
    assert!((cost(2) - cost(1)).abs() < 1e-12);
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("system = predator-prey\nlaw = nominal\ninitial_conditions = 1,1\ncolour = red\n", "colour"),
        ("system = nowhere\nlaw = nominal\ninitial_conditions = 1,1\n", "nowhere"),
        ("system = predator-prey\nlaw = teleport\ninitial_conditions = 1,1\n", "teleport"),
        ("system = predator-prey\nlaw = direct\ninitial_conditions = 2,2\n", "a >= 0 implies b < 0"),
        ("system = scalar-x2\nlaw = direct\ncontractor = rational\ninitial_conditions = 1\n", "slope range"),
        ("system = predator-prey\nlaw = nominal\ninitial_conditions = 0, 1\n", "initial_conditions"),
    ];
    for (i, (body, needle)) in cases.iter().enumerate() {
        let cfg = write_cfg(tmp.path(), &format!("bad{i}.cfg"), body);
        let out = posctl(&["run", &cfg, "--out", tmp.path().join(format!("o{i}")).to_str().unwrap()]);
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(2), "case {i}: {err}");
        assert!(err.contains(needle), "case {i}: {err}");
    }
    let out = posctl(&["run", tmp.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn suites_report_and_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = posctl(&["suite", "symmetry", "--out", tmp.path().to_str().unwrap(), "--grid", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("suite_symmetry.json")).unwrap()).unwrap();
    assert_eq!(v["reports"][0]["passed"], true);
    assert_eq!(v["options"]["grid"], 16);

    let out = posctl(&["suite", "asymptotics"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));

    let out = posctl(&["suite", "lemma1", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));

    assert_eq!(posctl(&["suite", "bogus"]).status.code(), Some(2));
}

#[test]
fn shipped_scenarios_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let tmp = tempfile::tempdir().unwrap();
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        let out_dir = tmp.path().join(p.file_stem().unwrap());
        let out = posctl(&["run", p.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{p:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(manifest(&out_dir)["passed"], true);
        n += 1;
    }
    assert!(n >= 2);
}
