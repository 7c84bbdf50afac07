// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qar")).args(args).output().expect("qar runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_cfg(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p
}

const WARM: &str = "medium = \"tls\"\nomega_c = 0.1\ng = 0.02\nkappa = 0.005\n\
bath.work.T = 3\nbath.hot.T = 2\nbath.cold.T = 1\n";

fn first_line(s: &str) -> &str {
    s.lines().next().unwrap_or("")
}

#[test]
fn steady_csv_header_is_stable() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_cfg(t.path(), WARM);
    let o = qar(&["steady", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(first_line(&stdout(&o)), qar::thermo::REPORT_CSV_HEADER);
}

#[test]
fn maxpower_csv_header_is_stable() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_cfg(t.path(), WARM);
    let o = qar(&["maxpower", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(
        first_line(&stdout(&o)),
        "omega_c_star,omega_c_dressed,J_c_star,eps_star,cop_ratio,carnot,bound,surpassed,evaluations"
    );
}

#[test]
fn leak_and_swapped_headers_are_stable() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_cfg(t.path(), &format!("{WARM}leak_curves.g = [0.02]\nleak_curves.points = 20\n"));
    let o = qar(&["leak", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(first_line(&stdout(&o)), "g,omega_c,J_c,J_c_over_J_0,cop_ratio");

    let cfg = write_cfg(
        t.path(),
        "medium = \"tls\"\ntopology = \"swapped\"\nomega_c = 0.1\nomega_w = 0.1\ng = 0.05\n\
kappa = 0.005\nbath.work.T = 10\nbath.hot.T = 6\nbath.cold.T = 5\nswapped.g = [0.05]\n",
    );
    let o = qar(&["swapped", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        first_line(&stdout(&o)),
        "g,omega_w_dressed,omega_c_star,omega_c_dressed,J_c_star,eps_star,cop_ratio,carnot,bound,surpassed,evaluations,holds"
    );
}

#[test]
fn bad_temperature_order_exits_with_config_code() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_cfg(t.path(), &WARM.replace("bath.hot.T = 2", "bath.hot.T = 5"));
    let o = qar(&["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn maxpower_without_cooling_exits_with_solver_code() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_cfg(t.path(), &WARM.replace("g = 0.02", "g = 0.2"));
    let o = qar(&["maxpower", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn unknown_key_is_a_config_error() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_cfg(t.path(), &format!("{WARM}bath.cold.temperature = 1\n"));
    let o = qar(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn output_directory_is_single_writer() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_cfg(t.path(), WARM);
    let out = t.path().join("out");
    let args = ["steady", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    assert!(qar(&args).status.success());
    let second = qar(&args);
    assert_eq!(second.status.code(), Some(1));
    let mut forced = args.to_vec();
    forced.push("--force");
    assert!(qar(&forced).status.success());
    let manifests = fs::read_dir(&out)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("manifest"))
        .count();
    assert_eq!(manifests, 1);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "steady");
}

#[test]
fn sample_runs_are_byte_identical() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_cfg(t.path(), "medium = \"tls\"\nsample.n = 40\nsample.bins = 5\n");
    let run = |name: &str| {
        let out = t.path().join(name);
        let o = qar(&["sample", "--config", cfg.to_str().unwrap(), "--seed", "7", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["rows.csv", "summary.json", "hist.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    assert_eq!(first_line(&fs::read_to_string(a.join("hist.csv")).unwrap()), "lo,hi,count");
    assert_eq!(
        first_line(&fs::read_to_string(a.join("rows.csv")).unwrap()),
        "index,T_w,T_h,T_c,kappa_w,kappa_h,kappa_c,g,omega_c_star,J_c_star,eps_star,carnot,ratio,surpassed,error"
    );
}

#[test]
fn validate_is_idempotent() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_cfg(t.path(), WARM);
    let first = stdout(&qar(&["validate", "--config", cfg.to_str().unwrap()]));
    assert!(first.starts_with("ok "));
    let canonical: String = first.lines().skip(1).map(|l| format!("{l}\n")).collect();
    let cfg2 = t.path().join("canonical.cfg");
    fs::write(&cfg2, &canonical).unwrap();
    let second = stdout(&qar(&["validate", "--config", cfg2.to_str().unwrap()]));
    assert_eq!(first, second);
}
