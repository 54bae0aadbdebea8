//! The `cospm` command-line tool.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or a
//! computation cannot complete, 2 on usage, configuration or output errors.

pub mod checks;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::control::{disturbance_of, hz, margins_of, sweep, write_frequency_csv, LoopModel};
use crate::error::Error;
use crate::simulation::{run as run_simulation, steady_state_metrics};
use crate::singularity::{
    annotate_certification, certify_workspace, scan_type1_against, CertifyOptions,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Residual allowed by the stabilization requirement, rad.
pub const RESIDUAL_REQUIREMENT: f64 = 1e-4;
/// Residual reported for the reference experiment, rad.
pub const RESIDUAL_REFERENCE: f64 = 6e-6;
/// Failing cells listed by `scan` before truncating.
pub const MAX_LISTED_FAILURES: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "cospm",
    version,
    about = "Coaxial spherical parallel manipulator toolkit"
)]
pub struct Cli {
    /// Suppress timing lines so output depends only on the inputs.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML run configuration; reference values when omitted.
    pub config: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the reference configuration file.
    Defaults {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closure, coaxiality, roundtrip and Jacobian checks.
    Check { config: Option<PathBuf> },
    /// Type-1 discriminant scan and Kantorovich certification of the workspace.
    Scan {
        #[command(flatten)]
        common: Common,
        /// Scan resolution, e.g. 200x200.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
    },
    /// Stability margins, disturbance rejection and a Bode sweep.
    Margins {
        #[command(flatten)]
        common: Common,
    },
    /// Closed-loop stabilization run.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected N1xN2, got '{s}'"))?;
    let n = |t: &str| {
        t.trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 2)
            .ok_or_else(|| format!("grid sizes must be integers ≥ 2, got '{s}'"))
    };
    Ok((n(a)?, n(b)?))
}

/// A failure and the exit code it maps to.
struct Failure(i32, String);

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_USAGE, format!("io: {e}"))
    }
}

fn config_failure(e: Error) -> Failure {
    Failure(EXIT_USAGE, e.to_string())
}

fn compute_failure(e: Error) -> Failure {
    Failure(EXIT_FAIL, e.to_string())
}

fn write_file(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), Failure> {
    let file =
        File::create(path).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return if code == 0 { EXIT_PASS } else { EXIT_USAGE };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let timer = Timer {
        start: Instant::now(),
        enabled: !cli.deterministic,
    };
    match &cli.command {
        Command::Defaults { out: path } => {
            let text = RunConfig::default().to_toml();
            match path {
                Some(p) => write_file(p, |w| w.write_all(text.as_bytes()))?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EXIT_PASS)
        }
        Command::Check { config } => {
            let cfg = RunConfig::load_or_default(config.as_deref()).map_err(config_failure)?;
            cmd_check(&cfg, out, &timer)
        }
        Command::Scan { common, grid } => {
            let cfg =
                RunConfig::load_or_default(common.config.as_deref()).map_err(config_failure)?;
            cmd_scan(&cfg, common.out.as_deref(), *grid, out, &timer)
        }
        Command::Margins { common } => {
            let cfg =
                RunConfig::load_or_default(common.config.as_deref()).map_err(config_failure)?;
            cmd_margins(&cfg, common.out.as_deref(), out, &timer)
        }
        Command::Simulate { common } => {
            let cfg =
                RunConfig::load_or_default(common.config.as_deref()).map_err(config_failure)?;
            cmd_simulate(&cfg, common.out.as_deref(), out, &timer)
        }
    }
}

struct Timer {
    start: Instant,
    enabled: bool,
}

impl Timer {
    fn report(&self, out: &mut dyn Write) -> std::io::Result<()> {
        if self.enabled {
            writeln!(out, "elapsed: {:.3} s", self.start.elapsed().as_secs_f64())?;
        }
        Ok(())
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_check(cfg: &RunConfig, out: &mut dyn Write, timer: &Timer) -> Result<i32, Failure> {
    let p = cfg.design();
    let w = cfg.workspace().map_err(config_failure)?;
    let results = checks::run_all(&p, &w);
    writeln!(
        out,
        "{:<32} {:>12} {:>12}  result",
        "check", "worst", "tolerance"
    )?;
    for r in &results {
        writeln!(
            out,
            "{:<32} {:>12.3e} {:>12.1e}  {}",
            r.name,
            r.worst,
            r.tolerance,
            verdict(r.pass())
        )?;
        if let Some(n) = &r.note {
            writeln!(out, "    {n}")?;
        }
    }
    let all = results.iter().all(|r| r.pass());
    writeln!(out, "all checks passed: {}", if all { "yes" } else { "no" })?;
    timer.report(out)?;
    Ok(if all { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_scan(
    cfg: &RunConfig,
    csv: Option<&Path>,
    grid: Option<(usize, usize)>,
    out: &mut dyn Write,
    timer: &Timer,
) -> Result<i32, Failure> {
    let p = cfg.design();
    let w = cfg.workspace().map_err(config_failure)?;
    let (n1, n2) = grid.unwrap_or((cfg.workspace.grid[0], cfg.workspace.grid[1]));
    let mut scan = scan_type1_against(&p, &w, &w, n1, n2);
    if let Some(path) = csv {
        annotate_certification(
            &mut scan,
            &p,
            cfg.certification_step(),
            &CertifyOptions::default(),
        )
        .map_err(compute_failure)?;
        write_file(path, |f| scan.write_csv(f))?;
    }
    let report = certify_workspace(&p, &w, cfg.certification_step()).map_err(compute_failure)?;

    let ws = &cfg.workspace;
    writeln!(
        out,
        "workspace: bank [{}, {}] deg, elevation [{}, {}] deg, bearing {} deg",
        ws.bank[0], ws.bank[1], ws.elevation[0], ws.elevation[1], ws.bearing
    )?;
    writeln!(out, "type-1 scan: {n1}x{n2} nodes")?;
    match scan.min_abs_delta_prescribed {
        Some(d) => writeln!(out, "min |delta_i| over W*: {d:.6e}")?,
        None => writeln!(out, "min |delta_i| over W*: n/a")?,
    }
    writeln!(
        out,
        "discriminant sign changes in W*: {}",
        scan.loci_cells_prescribed
    )?;
    writeln!(
        out,
        "kantorovich: {} cells at {} deg, {} leaves, max h {:.4}, all_pass {}",
        report.tested, ws.step, report.leaves, report.max_h, report.all_pass
    )?;
    for f in report.failures.iter().take(MAX_LISTED_FAILURES) {
        writeln!(
            out,
            "  failed at bank {:.4} deg, elevation {:.4} deg: {}",
            f.chi.bank().to_degrees(),
            f.chi.elevation().to_degrees(),
            f.reason
        )?;
    }
    if report.failures.len() > MAX_LISTED_FAILURES {
        writeln!(
            out,
            "  ... and {} more",
            report.failures.len() - MAX_LISTED_FAILURES
        )?;
    }
    let free = scan.loci_cells_prescribed == 0 && report.all_pass;
    writeln!(
        out,
        "W* singularity-free: {}",
        if free { "yes" } else { "no" }
    )?;
    timer.report(out)?;
    Ok(if free { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_margins(
    cfg: &RunConfig,
    csv: Option<&Path>,
    out: &mut dyn Write,
    timer: &Timer,
) -> Result<i32, Failure> {
    let te = cfg.simulation.sample_period;
    let l = LoopModel::open_loop(&cfg.controller, &cfg.actuator, te).map_err(compute_failure)?;
    let m = margins_of(&l).map_err(compute_failure)?;
    writeln!(
        out,
        "GM={:.1} dB, PM={:.1} deg",
        m.gain_margin_db, m.phase_margin_deg
    )?;
    writeln!(
        out,
        "gain margin: {:.4} dB at {:.2} rad/s",
        m.gain_margin_db, m.phase_crossover
    )?;
    writeln!(
        out,
        "phase margin: {:.4} deg at {:.2} rad/s",
        m.phase_margin_deg, m.gain_crossover
    )?;
    let w1 = hz(cfg.disturbance.frequency[0]);
    let d = disturbance_of(&l, w1);
    writeln!(
        out,
        "|D({w1:.2} rad/s)| = {:.1} dB",
        20.0 * d.norm().log10()
    )?;
    if let Some(path) = csv {
        let f = &cfg.frequency;
        let points = sweep(|w| l.response(w), f.omega_min, f.omega_max, f.points);
        write_file(path, |w| write_frequency_csv(&points, w))?;
    }
    timer.report(out)?;
    Ok(EXIT_PASS)
}

fn cmd_simulate(
    cfg: &RunConfig,
    csv: Option<&Path>,
    out: &mut dyn Write,
    timer: &Timer,
) -> Result<i32, Failure> {
    let sim = cfg.simulation();
    sim.validate().map_err(config_failure)?;
    let trace = run_simulation(&sim).map_err(compute_failure)?;
    let t0 = cfg.simulation.steady_state_from;
    let m = steady_state_metrics(&trace, t0);
    if let Some(path) = csv {
        write_file(path, |w| trace.write_csv(w))?;
    }
    writeln!(out, "samples: {}", trace.len())?;
    writeln!(out, "steady state from {t0} s:")?;
    writeln!(out, "  max |eps|     = {:.6e} rad", m.max_abs_residual)?;
    writeln!(out, "  max |eps_w|   = {:.6e} rad/s", m.max_abs_speed_error)?;
    writeln!(out, "  max |dtheta|  = {:.6e} rad/s", m.max_abs_joint_rate)?;
    let required = m.max_abs_residual < RESIDUAL_REQUIREMENT;
    writeln!(
        out,
        "residual < {RESIDUAL_REQUIREMENT:e} rad (requirement): {}",
        verdict(required)
    )?;
    writeln!(
        out,
        "residual < {RESIDUAL_REFERENCE:e} rad (reference run): {}",
        verdict(m.max_abs_residual < RESIDUAL_REFERENCE)
    )?;
    timer.report(out)?;
    Ok(if required { EXIT_PASS } else { EXIT_FAIL })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_flag_parses() {
        assert_eq!(parse_grid("200x150"), Ok((200, 150)));
        assert_eq!(parse_grid("2X2"), Ok((2, 2)));
        assert!(parse_grid("1x5").is_err());
        assert!(parse_grid("20").is_err());
        assert!(parse_grid("ax3").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["cospm", "frobnicate"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(
            run(["cospm", "scan", "--grid", "3"], &mut o, &mut e),
            EXIT_USAGE
        );
        assert_eq!(
            run(["cospm", "check", "/nonexistent/cfg.toml"], &mut o, &mut e),
            EXIT_USAGE
        );
        assert!(String::from_utf8(e).unwrap().contains("nonexistent"));
    }

    #[test]
    fn help_exits_zero() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["cospm", "--help"], &mut o, &mut e), EXIT_PASS);
        assert!(String::from_utf8(o).unwrap().contains("simulate"));
    }

    #[test]
    fn defaults_print_parseable_toml() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["cospm", "defaults"], &mut o, &mut e), EXIT_PASS);
        let cfg = RunConfig::parse(&String::from_utf8(o).unwrap()).unwrap();
        assert_eq!(cfg, RunConfig::default());
    }
}
