use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SMALL: &str = "\
nx = 32
ny = 17
t_final = 0.05
dt = 0.001
snapshot_every = 10
nu = 0.01
init_kmax = 6
shift_magnitudes = 6
";

fn scratch(name: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("nslab_cli_{}_{name}", std::process::id()));
    let _ = fs::remove_dir_all(&p);
    fs::create_dir_all(&p).unwrap();
    p
}

fn nslab(dir: &Path, config: &str, args: &[&str], env: &[(&str, &str)]) -> Output {
    let cfg = dir.join("in.cfg");
    fs::write(&cfg, config).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nslab"));
    cmd.arg("--config").arg(&cfg).arg("--out").arg(dir.join("out")).args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("NSLAB_")) {
        cmd.env_remove(k);
    }
    cmd.envs(env.iter().copied());
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn configuration_errors_exit_with_code_2() {
    let dir = scratch("config");
    let cases: [(String, &str); 4] = [
        (format!("{SMALL}colour = blue\n"), "colour"),
        (format!("{SMALL}nx = 64\n"), "nx"),
        (format!("{SMALL}bc = navier_friction\nbeta = 1.5\n"), "beta"),
        (format!("{SMALL}dt = fast\n"), "dt"),
    ];
    for (text, needle) in &cases {
        let o = nslab(&dir, text, &["simulate"], &[]);
        assert_eq!(o.status.code(), Some(2), "{needle}: {}", stderr(&o));
        let e = stderr(&o);
        assert!(e.starts_with("error[E_CONFIG]: "), "{e}");
        assert!(e.contains(needle), "{e}");
        assert_eq!(e.trim_end().lines().count(), 1, "{e}");
    }
    let o = nslab(&dir, SMALL, &["simulate"], &[("NSLAB_NX", "7")]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("NSLAB_NX"));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn missing_snapshot_directory_is_an_io_error() {
    let dir = scratch("io");
    let o = nslab(
        &dir,
        SMALL,
        &["diagnose", "--snapshots", "/nonexistent/nslab", "--subdomain", "0,6.28,0.8,2.3"],
        &[],
    );
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error[E_IO]: "));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn simulate_then_diagnose() {
    let dir = scratch("run");
    let out = dir.join("out");
    let o = nslab(&dir, SMALL, &["simulate", "--seed", "9"], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["energy.csv", "config.cfg", "run_report.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let echo = fs::read_to_string(out.join("config.cfg")).unwrap();
    assert!(echo.contains("seed = 9"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("run_report.json")).unwrap()).unwrap();
    let snaps = report["report"]["snapshots"].as_array().unwrap();
    assert_eq!(snaps.len(), 6);
    assert_eq!(report["inputs"].as_object().unwrap().len(), snaps.len());
    assert!(report["report"]["max_relative_violation"].as_f64().unwrap() <= 1e-8);
    let first = fs::read(out.join("run_report.json")).unwrap();

    // the echoed configuration reproduces the run byte for byte
    let again = scratch("rerun");
    let o = nslab(&again, &echo, &["simulate"], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(again.join("out/run_report.json")).unwrap(), first);

    let diag = scratch("diag");
    let snapdir = out.to_str().unwrap().to_string();
    let o = nslab(
        &diag,
        SMALL,
        &["diagnose", "--snapshots", &snapdir, "--subdomain", "0,6.283185307179586,0.8,2.3"],
        &[],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let s2 = fs::read_to_string(diag.join("out/s2.csv")).unwrap();
    assert!(s2.starts_with("direction,dir_x,dir_y,magnitude,r_x,r_y,r_norm,s2\n"));
    let norms: serde_json::Value = serde_json::from_str(&fs::read_to_string(diag.join("out/norms.json")).unwrap()).unwrap();
    assert_eq!(norms["report"]["norms"].as_array().unwrap().len(), 4);
    assert_eq!(norms["inputs"].as_object().unwrap().len(), 6);
    let constants: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(diag.join("out/constants.json")).unwrap()).unwrap();
    assert_eq!(constants["gradient_bound_factor"].as_f64(), Some(1.1));
    for d in [dir, again, diag] {
        let _ = fs::remove_dir_all(d);
    }
}

#[test]
fn solver_suite_passes() {
    let dir = scratch("verify");
    let o = nslab(&dir, "", &["verify", "--suite", "solver"], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().count() >= 9, "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
    let _ = fs::remove_dir_all(&dir);
}
