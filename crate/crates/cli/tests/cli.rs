use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qrdm_cli::pipeline::{PointOutcome, Status};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").canonicalize().unwrap()
}

fn qrdm(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qrdm"));
    c.args(args).env_remove("QRDM_WORKERS");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, format!("output_dir = \"out\"\n{body}")).unwrap();
    p
}

fn h2_point(label: &str, file: &str) -> String {
    format!("[[points]]\nlabel = {label}\nfcidump = \"{}\"\n", data_dir().join("h2").join(file).display())
}

const H2_SPACES: &str = "[spaces]\nn_core = 0\nn_active = 2\n[gamma4]\nmode = \"none\"\n";

#[test]
fn run_writes_point_json_csv_and_gnuplot_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{}{}{H2_SPACES}", h2_point("0.74", "h2_0.74.fcidump"), h2_point("1.5", "h2_1.50.fcidump")));
    let out = qrdm(&["run", cfg.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let o = tmp.path().join("out");
    for f in ["curve.csv", "curve.dat", "points/point_0.74.json", "points/point_1.5.json"] {
        assert!(o.join(f).is_file(), "{f} missing");
    }
    let csv = std::fs::read_to_string(o.join("curve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("label,status,reference_energy,e2,total_energy,"));
    let p: PointOutcome = serde_json::from_str(&std::fs::read_to_string(o.join("points/point_0.74.json")).unwrap()).unwrap();
    let pt = p.point.unwrap();
    assert_eq!(pt.total_energy, pt.reference_energy + pt.e2);
    assert!(std::fs::read_dir(o.join("points")).unwrap().all(|e| !e.unwrap().path().to_string_lossy().ends_with(".tmp")));
}

#[test]
fn failing_point_is_isolated_and_sets_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.fcidump");
    std::fs::write(&bad, "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n  1.0 9 9 9 9\n").unwrap();
    let body = format!(
        "{}[[points]]\nlabel = 9.0\nfcidump = \"{}\"\n{H2_SPACES}",
        h2_point("0.74", "h2_0.74.fcidump"),
        bad.display()
    );
    let cfg = write_config(tmp.path(), &body);
    let out = qrdm(&["run", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    let o = tmp.path().join("out");
    let good: PointOutcome = serde_json::from_str(&std::fs::read_to_string(o.join("points/point_0.74.json")).unwrap()).unwrap();
    assert_eq!(good.status, Status::Ok);
    let failed: PointOutcome = serde_json::from_str(&std::fs::read_to_string(o.join("points/point_9.json")).unwrap()).unwrap();
    assert_eq!(failed.status, Status::Failed);
    assert!(failed.error.unwrap().contains("point 9"));
    let csv = std::fs::read_to_string(o.join("curve.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("9,failed,")));
}

#[test]
fn validate_rejects_missing_files_and_gamma4_none_above_three_electrons() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("[[points]]\nlabel = 1.0\nfcidump = \"nope.fcidump\"\n{H2_SPACES}"));
    let out = qrdm(&["validate", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not exist"));

    let h4 = data_dir().join("h4/h4_0.90.fcidump");
    let cfg = write_config(
        tmp.path(),
        &format!("[[points]]\nlabel = 0.9\nfcidump = \"{}\"\n[spaces]\nn_core = 0\nn_active = 4\n[gamma4]\nmode = \"none\"\n", h4.display()),
    );
    let out = qrdm(&["validate", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at most 3"));
}

#[test]
fn report_renders_every_format_and_rejects_unknown_ones() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{}{H2_SPACES}", h2_point("0.74", "h2_0.74.fcidump")));
    assert!(qrdm(&["run", cfg.to_str().unwrap()], &[]).status.success());
    let dir = tmp.path().join("out");
    let csv = qrdm(&["report", dir.to_str().unwrap(), "--format", "csv"], &[]);
    assert_eq!(csv.stdout, std::fs::read(dir.join("curve.csv")).unwrap());
    let json = qrdm(&["report", dir.to_str().unwrap(), "--format", "json"], &[]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert!(v[0]["point"]["diagnostics"]["vqe_energy"].is_null());
    let table = qrdm(&["report", dir.to_str().unwrap(), "--format", "table"], &[]);
    assert!(String::from_utf8_lossy(&table.stdout).contains("0.74"));
    let bad = qrdm(&["report", dir.to_str().unwrap(), "--format", "xml"], &[]);
    assert!(!bad.status.success());
}

#[test]
fn worker_variable_overrides_config_and_keeps_output_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let body = format!(
        "{}{}{}{H2_SPACES}[measurement]\nmode = \"shots\"\nshots = 500\nseed = 4\n",
        h2_point("0.5", "h2_0.50.fcidump"),
        h2_point("0.74", "h2_0.74.fcidump"),
        h2_point("2.0", "h2_2.00.fcidump")
    );
    let cfg = write_config(tmp.path(), &body);
    let c = cfg.to_str().unwrap();
    assert!(qrdm(&["run", c, "--output-dir", "one"], &[("QRDM_WORKERS", "1")]).status.success());
    assert!(qrdm(&["run", c, "--output-dir", "three"], &[("QRDM_WORKERS", "3")]).status.success());
    let a = std::fs::read(tmp.path().join("one/curve.csv")).unwrap();
    let b = std::fs::read(tmp.path().join("three/curve.csv")).unwrap();
    assert_eq!(a, b);
    let bad = qrdm(&["run", c], &[("QRDM_WORKERS", "zero")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn flag_overrides_change_the_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{}{H2_SPACES}", h2_point("0.74", "h2_0.74.fcidump")));
    let out = qrdm(&["run", cfg.to_str().unwrap(), "--state-prep", "vqe-exact", "--measurement", "exact-plan"], &[]);
    assert!(out.status.success());
    let p: PointOutcome =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("out/points/point_0.74.json")).unwrap()).unwrap();
    let d = p.point.unwrap().diagnostics;
    assert_eq!(d.provenance, "vqe-exact/exact-plan/none");
    assert!(d.vqe_iterations.is_some() && d.measurement_sets.is_some());
    assert!(tmp.path().join("out/points/point_0.74.vqe.csv").is_file());
    let bad = qrdm(&["run", cfg.to_str().unwrap(), "--gamma4", "cu5"], &[]);
    assert!(!bad.status.success());
}

#[test]
fn shipped_configs_validate() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for e in std::fs::read_dir(&dir).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "toml") {
            let c = qrdm_cli::RunConfig::load(&p).unwrap();
            c.validate().unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            n += 1;
        }
    }
    assert!(n >= 4);
}
