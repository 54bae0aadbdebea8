use std::io::Write;

use nalgebra::Vector3;
use rayon::prelude::*;

use super::kantorovich::{certify_point, CertifyOptions};
use super::workspace::WorkspaceBox;
use crate::error::Result;
use crate::kinematics::{quadratic_coefficients, DesignParameters, Orientation};

/// Per-leg discriminants `Δ_i = b_i² − 4 a_i c_i` of the inverse geometric
/// quadratics. `Δ_i = 0` exactly where leg `i` is folded or unfolded.
pub fn type1_discriminants(p: &DesignParameters, chi: &Orientation) -> Vector3<f64> {
    let q = quadratic_coefficients(p, chi);
    Vector3::from_fn(|i, _| q[i].discriminant())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanCell {
    pub chi1: f64,
    pub chi2: f64,
    pub delta: [f64; 3],
    /// Set once the cell has been run through the Kantorovich test.
    pub kantorovich_pass: Option<bool>,
    /// A discriminant changes sign between this node and its bank or
    /// elevation successor, or vanishes here.
    pub locus: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub n1: usize,
    pub n2: usize,
    pub scanned: WorkspaceBox,
    /// Elevation-major: `cells[j * n1 + i]` sits at bank node `i`,
    /// elevation node `j`.
    pub cells: Vec<ScanCell>,
    /// Minimum `|Δ_i|` over nodes inside the prescribed workspace.
    pub min_abs_delta_prescribed: Option<f64>,
    pub loci_cells: usize,
    /// Loci cells whose sign change happens between two nodes of the
    /// prescribed workspace.
    pub loci_cells_prescribed: usize,
    /// Loci cells plus cells that failed the Kantorovich test.
    pub failed_cells: usize,
}

impl ScanResult {
    pub fn cell(&self, i: usize, j: usize) -> &ScanCell {
        &self.cells[j * self.n1 + i]
    }

    fn summarize(&mut self) {
        self.failed_cells = self
            .cells
            .iter()
            .filter(|c| c.locus || c.kantorovich_pass == Some(false))
            .count();
        self.loci_cells = self.cells.iter().filter(|c| c.locus).count();
    }

    /// `chi1,chi2,delta1,delta2,delta3,kantorovich_pass`, angles in radians.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "chi1,chi2,delta1,delta2,delta3,kantorovich_pass")?;
        for c in &self.cells {
            let k = match c.kantorovich_pass {
                Some(true) => "true",
                Some(false) => "false",
                None => "",
            };
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                c.chi1, c.chi2, c.delta[0], c.delta[1], c.delta[2], k
            )?;
        }
        Ok(())
    }
}

fn sign_change(a: f64, b: f64) -> bool {
    (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)
}

/// Evaluates the discriminants on an `n1 × n2` grid over `scan_box` and
/// flags zero crossings. Summary statistics are restricted to `prescribed`.
pub fn scan_type1_against(
    p: &DesignParameters,
    scan_box: &WorkspaceBox,
    prescribed: &WorkspaceBox,
    n1: usize,
    n2: usize,
) -> ScanResult {
    let nodes = scan_box.grid(n1, n2);
    let deltas: Vec<[f64; 3]> = nodes
        .par_iter()
        .map(|&(a, b)| type1_discriminants(p, &scan_box.orientation(a, b)).into())
        .collect();

    let (n1, n2) = if nodes.is_empty() { (0, 0) } else { (n1, n2) };
    let at = |i: usize, j: usize| &deltas[j * n1 + i];
    let mut loci_prescribed = 0;
    let mut min_abs: Option<f64> = None;
    let mut cells = Vec::with_capacity(nodes.len());
    for j in 0..n2 {
        for i in 0..n1 {
            let (chi1, chi2) = nodes[j * n1 + i];
            let d = at(i, j);
            let inside = prescribed.contains(chi1, chi2);
            let mut locus = d.contains(&0.0);
            let mut locus_inside = locus && inside;
            for (ni, nj) in [(i + 1, j), (i, j + 1)] {
                if ni >= n1 || nj >= n2 {
                    continue;
                }
                let nd = at(ni, nj);
                if (0..3).any(|k| sign_change(d[k], nd[k])) {
                    locus = true;
                    let (c1, c2) = nodes[nj * n1 + ni];
                    locus_inside |= inside && prescribed.contains(c1, c2);
                }
            }
            if locus_inside {
                loci_prescribed += 1;
            }
            if inside {
                let m = d.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
                min_abs = Some(min_abs.map_or(m, |x: f64| x.min(m)));
            }
            cells.push(ScanCell {
                chi1,
                chi2,
                delta: *d,
                kantorovich_pass: None,
                locus,
            });
        }
    }
    let mut result = ScanResult {
        n1,
        n2,
        scanned: *scan_box,
        cells,
        min_abs_delta_prescribed: min_abs,
        loci_cells: 0,
        loci_cells_prescribed: loci_prescribed,
        failed_cells: 0,
    };
    result.summarize();
    result
}

/// [`scan_type1_against`] with the prescribed workspace at the box's bearing.
pub fn scan_type1(
    p: &DesignParameters,
    scan_box: &WorkspaceBox,
    n1: usize,
    n2: usize,
) -> ScanResult {
    let prescribed = WorkspaceBox::prescribed().with_chi3(scan_box.chi3);
    scan_type1_against(p, scan_box, &prescribed, n1, n2)
}

/// Runs the cell-level Kantorovich certification on every node of a scan.
/// Each node's cell is as wide as the grid spacing, capped at `max_cell`.
/// Nodes outside the reachable set fail.
pub fn annotate_certification(
    scan: &mut ScanResult,
    p: &DesignParameters,
    max_cell: f64,
    options: &CertifyOptions,
) -> Result<()> {
    if !(max_cell > 0.0) {
        return Err(crate::error::Error::InvalidInput(format!(
            "cell width must be positive, got {max_cell}"
        )));
    }
    let spacing = |r: [f64; 2], n: usize| {
        if n > 1 {
            (r[1] - r[0]) / (n - 1) as f64
        } else {
            0.0
        }
    };
    let step = spacing(scan.scanned.chi1, scan.n1)
        .max(spacing(scan.scanned.chi2, scan.n2))
        .clamp(1e-6, max_cell);
    let chi3 = scan.scanned.chi3;
    let flags: Vec<bool> = scan
        .cells
        .par_iter()
        .map(|c| {
            certify_point(p, &Orientation::new(c.chi1, c.chi2, chi3), step, options)
                .is_ok_and(|k| k.valid)
        })
        .collect();
    for (c, ok) in scan.cells.iter_mut().zip(flags) {
        c.kantorovich_pass = Some(ok);
    }
    scan.summarize();
    Ok(())
}
