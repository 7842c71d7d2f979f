//! Spectra across `γ`, phase labels and exceptional-point location.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::eigen::{classify_reality, eigenvalues, Spectrum, DEFAULT_REALITY_TOL};
use crate::error::{Error, Result};
use crate::format::sig_digits;
use crate::lattice::{build_chain, build_ring, HamiltonianFamily};

/// Bisection stops once the bracket is this narrow.
pub const EP_BRACKET_WIDTH: f64 = 1e-10;
/// An accepted exceptional point must have eigenvalues this close.
pub const EP_MAX_GAP: f64 = 1e-4;
/// Points closer than this are merged.
pub const EP_DEDUP: f64 = 1e-9;
pub const DEFAULT_EP_GRID: usize = 64;
pub const FIGURE_POINTS: usize = 201;
pub const FIGURE_RANGE: (f64, f64) = (0.0, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Phase {
    Unbroken,
    Broken,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub gammas: Vec<f64>,
    pub spectra: Vec<Spectrum>,
    pub phases: Vec<Phase>,
    pub real_counts: Vec<usize>,
}

/// `steps` points from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|k| {
            if k + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * (k as f64) / last
            }
        })
        .collect()
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::validation(format!("invalid range {lo}:{hi}")));
    }
    Ok(())
}

fn spectrum_at(f: &HamiltonianFamily, gamma: f64) -> Result<Spectrum> {
    eigenvalues(&f.hamiltonian_at(gamma)).map_err(|e| Error::SolverAt {
        gamma,
        source: Box::new(e),
    })
}

fn real_count(f: &HamiltonianFamily, gamma: f64, tol: f64) -> Result<usize> {
    Ok(classify_reality(&spectrum_at(f, gamma)?, tol).real_count)
}

/// Solves `H(γ)` on a uniform grid. Grid points are independent and run in
/// parallel; results come back in grid order.
pub fn sweep(f: &HamiltonianFamily, lo: f64, hi: f64, steps: usize) -> Result<SweepResult> {
    sweep_with_tol(f, lo, hi, steps, DEFAULT_REALITY_TOL)
}

pub fn sweep_with_tol(
    f: &HamiltonianFamily,
    lo: f64,
    hi: f64,
    steps: usize,
    tol: f64,
) -> Result<SweepResult> {
    check_range(lo, hi)?;
    if steps < 2 {
        return Err(Error::validation(format!(
            "sweep needs at least 2 steps, got {steps}"
        )));
    }
    let gammas = uniform_grid(lo, hi, steps);
    let spectra = gammas
        .par_iter()
        .map(|&g| spectrum_at(f, g))
        .collect::<Result<Vec<_>>>()?;
    let n = f.n();
    let real_counts: Vec<usize> = spectra
        .iter()
        .map(|s| classify_reality(s, tol).real_count)
        .collect();
    let phases = real_counts
        .iter()
        .map(|&c| {
            if c == n {
                Phase::Unbroken
            } else {
                Phase::Broken
            }
        })
        .collect();
    Ok(SweepResult {
        gammas,
        spectra,
        phases,
        real_counts,
    })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExceptionalPoint {
    pub gamma: f64,
    pub bracket_width: f64,
    /// Smallest pairwise eigenvalue distance at `gamma`.
    pub min_gap: f64,
}

/// A real-count transition that did not resolve into an exceptional point.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EpDiagnostic {
    pub lo: f64,
    pub hi: f64,
    pub counts: (usize, usize),
    pub min_gap: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EpSearch {
    /// Ascending, deduplicated.
    pub points: Vec<ExceptionalPoint>,
    pub diagnostics: Vec<EpDiagnostic>,
}

/// Scans the real-eigenvalue count on a grid and bisects every cell where it
/// changes down to a bracket of width `1e−10`.
pub fn find_exceptional_points(
    f: &HamiltonianFamily,
    lo: f64,
    hi: f64,
    grid: usize,
) -> Result<EpSearch> {
    find_exceptional_points_with_tol(f, lo, hi, grid, DEFAULT_REALITY_TOL)
}

pub fn find_exceptional_points_with_tol(
    f: &HamiltonianFamily,
    lo: f64,
    hi: f64,
    grid: usize,
    tol: f64,
) -> Result<EpSearch> {
    check_range(lo, hi)?;
    if grid < 16 {
        return Err(Error::validation(format!(
            "EP grid must have at least 16 points, got {grid}"
        )));
    }
    let scan = sweep_with_tol(f, lo, hi, grid, tol)?;
    let cells: Vec<usize> = (0..grid - 1)
        .filter(|&k| scan.real_counts[k] != scan.real_counts[k + 1])
        .collect();

    let outcomes = cells
        .par_iter()
        .map(|&k| {
            bisect(
                f,
                (scan.gammas[k], scan.real_counts[k]),
                (scan.gammas[k + 1], scan.real_counts[k + 1]),
                tol,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut search = EpSearch::default();
    for outcome in outcomes {
        match outcome {
            Ok(ep) => search.points.push(ep),
            Err(diag) => search.diagnostics.push(diag),
        }
    }
    search.points.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
    search
        .points
        .dedup_by(|b, a| (b.gamma - a.gamma).abs() <= EP_DEDUP);
    Ok(search)
}

type BisectOutcome = std::result::Result<ExceptionalPoint, EpDiagnostic>;

fn bisect(
    f: &HamiltonianFamily,
    left: (f64, usize),
    right: (f64, usize),
    tol: f64,
) -> Result<BisectOutcome> {
    let (mut a, count_a) = left;
    let (mut b, count_b) = right;
    while b - a > EP_BRACKET_WIDTH {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if real_count(f, mid, tol)? == count_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    let gamma = 0.5 * (a + b);
    let min_gap = spectrum_at(f, gamma)?.min_gap();
    let width = b - a;
    if width <= EP_BRACKET_WIDTH && min_gap <= EP_MAX_GAP {
        Ok(Ok(ExceptionalPoint {
            gamma,
            bracket_width: width,
            min_gap,
        }))
    } else {
        Ok(Err(EpDiagnostic {
            lo: a,
            hi: b,
            counts: (count_a, count_b),
            min_gap,
            message: format!(
                "real-eigenvalue count changes {count_a} -> {count_b} near {gamma} but the minimum gap there is {min_gap:e}"
            ),
        }))
    }
}

/// Which built-in eigenvalue plot to regenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Periodic four-site ring.
    Fig2,
    /// Open four-site chain.
    Fig4,
}

impl std::str::FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Figure::Fig2),
            "fig4" => Ok(Figure::Fig4),
            other => Err(Error::UnknownFigure(other.to_string())),
        }
    }
}

impl Figure {
    pub fn model(self) -> HamiltonianFamily {
        match self {
            Figure::Fig2 => build_ring(4).expect("ring4"),
            Figure::Fig4 => build_chain(4).expect("chain4"),
        }
    }
}

/// Plot data: one row `(γ, Re λ₁…Re λₙ, Im λ₁…Im λₙ)` per grid point over `[0, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl FigureTable {
    pub fn header(&self) -> String {
        let mut cols = vec!["gamma".to_string()];
        cols.extend((1..=self.n).map(|k| format!("re_{k}")));
        cols.extend((1..=self.n).map(|k| format!("im_{k}")));
        cols.join(",")
    }

    /// Comma-separated text, 9 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| sig_digits(x, 9)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

pub fn figure_data(fig: Figure) -> Result<FigureTable> {
    let family = fig.model();
    let (lo, hi) = FIGURE_RANGE;
    let result = sweep(&family, lo, hi, FIGURE_POINTS)?;
    let rows = result
        .gammas
        .iter()
        .zip(&result.spectra)
        .map(|(&g, s)| {
            let mut row = vec![g];
            row.extend(s.values().iter().map(|z| z.re));
            row.extend(s.values().iter().map(|z| z.im));
            row
        })
        .collect();
    Ok(FigureTable {
        n: family.n(),
        rows,
    })
}
