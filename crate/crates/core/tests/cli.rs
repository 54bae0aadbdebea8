use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn cospm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cospm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn defaults_then_check_passes() {
    let dir = TempDir::new().unwrap();
    let o = cospm(&["defaults", "--out", "ref.toml"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let o = cospm(&["check", "ref.toml"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("all checks passed: yes"));
}

#[test]
fn offset_inner_platform_fails_check() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "b1.toml", "[design]\nbeta1 = 0.3\n");
    let o = cospm(&["check", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("coaxiality")).unwrap();
    assert!(line.ends_with("FAIL"), "{line}");
}

#[test]
fn missing_or_malformed_config_exits_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        cospm(&["check", "absent.toml"], dir.path()).status.code(),
        Some(2)
    );
    let bad = write(dir.path(), "bad.toml", "[design]\ngamma = 1.0\n");
    for verb in ["check", "scan", "margins", "simulate"] {
        assert_eq!(
            cospm(&[verb, &bad], dir.path()).status.code(),
            Some(2),
            "{verb}"
        );
    }
    assert_eq!(
        cospm(&["scan", "--grid", "2by2"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(cospm(&[], dir.path()).status.code(), Some(2));
}

#[test]
fn scan_smoke_run_writes_four_rows() {
    let dir = TempDir::new().unwrap();
    let o = cospm(&["scan", "--grid", "2x2", "--out", "scan.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("W* singularity-free: yes"));
    let csv = std::fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "chi1,chi2,delta1,delta2,delta3,kantorovich_pass");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..]
        .iter()
        .all(|l| l.split(',').count() == 6 && l.ends_with("true")));
}

#[test]
fn scan_beyond_elevation_limits_lists_failures() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "wide.toml",
        "[workspace]\nelevation = [-90.0, 90.0]\nstep = 5.0\n",
    );
    let o = cospm(&["scan", &cfg, "--grid", "5x5"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("W* singularity-free: no"));
    assert!(text.contains("failed at bank"));
    assert!(text.contains("elevation 90.0000 deg") || text.contains("elevation -90.0000 deg"));
}

#[test]
fn margins_report_and_csv_size() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "f.toml", "[frequency]\npoints = 37\n");
    let o = cospm(&["margins", &cfg, "--out", "bode.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("GM=14.2 dB"), "{text}");
    assert!(text.contains("|D(0.63 rad/s)| = -92.3 dB"), "{text}");
    let csv = std::fs::read_to_string(dir.path().join("bode.csv")).unwrap();
    assert_eq!(csv.lines().count(), 38);
    assert_eq!(csv.lines().next(), Some("omega,magnitude_db,phase_deg"));
}

#[test]
fn simulate_row_count_and_requirement() {
    let dir = TempDir::new().unwrap();
    let o = cospm(
        &["simulate", "--deterministic", "--out", "trace.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("samples: 30001"));
    assert!(text.contains("(requirement): PASS"));
    assert!(!text.contains("elapsed"));
    let csv = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 30002);
    assert!(csv.starts_with("t,om1,om2,om3,eps1"));
}

#[test]
fn zero_disturbance_run_reports_zero_metrics() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "quiet.toml",
        "[actuator]\nmode = \"none\"\n[disturbance]\namplitude = [0.0, 0.0, 0.0]\n[simulation]\nduration = 3.0\nsteady_state_from = 1.0\n",
    );
    let o = cospm(&["simulate", &cfg, "--deterministic"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("max |eps|     = 0.000000e0 rad"), "{text}");
    assert!(text.contains("max |eps_w|   = 0.000000e0 rad/s"), "{text}");
}

#[test]
fn identical_config_gives_identical_output() {
    let dir = TempDir::new().unwrap();
    cospm(&["defaults", "--out", "ref.toml"], dir.path());
    let cfg = write(
        dir.path(),
        "short.toml",
        "[simulation]\nduration = 4.0\nsteady_state_from = 2.0\n",
    );
    let a = cospm(
        &["simulate", &cfg, "--deterministic", "--out", "a.csv"],
        dir.path(),
    );
    let b = cospm(
        &["simulate", &cfg, "--deterministic", "--out", "b.csv"],
        dir.path(),
    );
    assert_eq!(a.stdout, b.stdout);
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    // The defaults file is equivalent to no file at all.
    let x = cospm(
        &["margins", "ref.toml", "--deterministic", "--out", "x.csv"],
        dir.path(),
    );
    let y = cospm(
        &["margins", "--deterministic", "--out", "y.csv"],
        dir.path(),
    );
    assert_eq!(x.stdout, y.stdout);
    assert_eq!(read("x.csv"), read("y.csv"));
    let x = cospm(&["check", "ref.toml", "--deterministic"], dir.path());
    let y = cospm(&["check", "--deterministic"], dir.path());
    assert_eq!(x.stdout, y.stdout);
}
