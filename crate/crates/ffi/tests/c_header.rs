//! Compiles a C program against `include/cospm.h` and links it with the
//! static library built for this test run.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "cospm.h"

int main(void) {
    CospmDesign *d = cospm_design_new_reference();
    double home[3] = {M_PI / 2, M_PI / 2, M_PI / 2};
    double zero[3] = {0, 0, 0};
    double chi[3] = {0.1, -0.3, 0.0};
    double th[3], back[3], f[3];
    if (cospm_closure(d, home, zero, f) != COSPM_STATUS_OK) return 10;
    if (fabs(f[0]) + fabs(f[1]) + fabs(f[2]) > 1e-12) return 11;
    if (cospm_igm(d, chi, NULL, th) != COSPM_STATUS_OK) return 12;
    if (cospm_fgm(d, th, zero, back) != COSPM_STATUS_OK) return 13;
    for (int k = 0; k < 3; k++)
        if (fabs(back[k] - chi[k]) > 1e-9) return 14;

    CospmMargins m;
    if (cospm_margins(1.6e-3, 1e-3, &m) != COSPM_STATUS_OK) return 20;

    CospmSimulationOptions o;
    cospm_simulation_options_default(&o);
    o.duration = 1.0;
    o.mode = COSPM_MODE_NONE;
    CospmTrace *t = NULL;
    if (cospm_simulate(d, &o, &t) != COSPM_STATUS_OK) return 30;
    if (cospm_trace_len(t) != 1001) return 31;
    cospm_trace_free(t);

    if (cospm_closure(NULL, home, zero, f) != COSPM_STATUS_NULL_POINTER) return 40;
    if (cospm_last_error_message() == NULL) return 41;

    printf("GM=%.4f PM=%.4f version=%s\n", m.gain_margin_db, m.phase_margin_deg, cospm_version());
    cospm_design_free(d);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // .../target/<profile>/deps/c_header-<hash>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cospm.h"))
            .unwrap();
    for name in [
        "cospm_last_error_message",
        "cospm_design_new_reference",
        "cospm_design_free",
        "cospm_closure",
        "cospm_igm",
        "cospm_fgm",
        "cospm_jacobian",
        "cospm_certify_workspace",
        "cospm_margins",
        "cospm_simulate",
        "cospm_trace_sample",
        "cospm_trace_free",
        "typedef struct CospmDesign CospmDesign;",
        "COSPM_STATUS_NULL_POINTER = 1",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = target_dir().join("libcospm_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .args(["-std=c11", "-D_DEFAULT_SOURCE", "-Wall", "-Werror"])
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.starts_with("GM=14.2234"), "{text}");
}
