//! Machine-readable analysis reports.
//!
//! Every float is rounded to 12 significant digits when the report is built,
//! so serializing, parsing and serializing again yields identical bytes.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{classify_reality, eigenvalues, DEFAULT_REALITY_TOL};
use crate::error::{Error, Result};
use crate::format::{round_sig, sig_digits};
use crate::lattice::HamiltonianFamily;
use crate::perturbation::first_order_corrections;
use crate::sweep::{
    find_exceptional_points_with_tol, EpDiagnostic, ExceptionalPoint, Phase, DEFAULT_EP_GRID,
};
use crate::symmetry::{classify_symmetries, find_relabeling, GroupInfo, SitePermutation};

pub const SCHEMA_VERSION: u32 = 1;
const DIGITS: usize = 12;

fn r(x: f64) -> f64 {
    round_sig(x, DIGITS)
}

fn rc(z: Complex64) -> [f64; 2] {
    [r(z.re), r(z.im)]
}

fn perms(list: &[SitePermutation]) -> Vec<Vec<usize>> {
    list.iter().map(|p| p.as_slice().to_vec()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub name: String,
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub signature: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub name: String,
    pub order: usize,
    pub abelian: bool,
    pub class_count: usize,
    pub class_sizes: Vec<usize>,
    pub element_orders: Vec<usize>,
    pub irrep_dims: Vec<usize>,
}

impl From<&GroupInfo> for GroupSummary {
    fn from(g: &GroupInfo) -> Self {
        Self {
            name: g.name.clone(),
            order: g.order(),
            abelian: g.is_abelian(),
            class_count: g.class_count(),
            class_sizes: g.classes.iter().map(Vec::len).collect(),
            element_orders: g.order_multiset(),
            irrep_dims: g.irrep_dims.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetrySummary {
    pub commuting_count: usize,
    pub conjugating_count: usize,
    pub parity_count: usize,
    pub commuting: Vec<Vec<usize>>,
    pub conjugating: Vec<Vec<usize>>,
    pub parities: Vec<Vec<usize>>,
    pub group: GroupSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub energy: f64,
    pub multiplicity: usize,
    /// First-order coefficients as `[re, im]`.
    pub corrections: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSummary {
    pub levels: Vec<LevelSummary>,
    pub extremely_broken: bool,
    /// Always "predicted": the first-order test is a heuristic.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpSummary {
    pub range: [f64; 2],
    pub grid: usize,
    pub points: Vec<ExceptionalPoint>,
    pub diagnostics: Vec<EpDiagnostic>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub gamma: f64,
    pub values: Vec<[f64; 2]>,
    pub real_count: usize,
    pub pair_count: usize,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelabelingSummary {
    pub compare: String,
    pub permutation: Option<Vec<usize>>,
    pub isospectral: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool_version: String,
    pub generated_unix: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub model: ModelSummary,
    pub symmetry: SymmetrySummary,
    pub perturbation: PerturbationSummary,
    pub exceptional_points: Option<EpSummary>,
    pub spectra: Vec<SpectrumSummary>,
    pub relabeling: Option<RelabelingSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub meta: Option<Meta>,
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub ep_range: Option<(f64, f64)>,
    pub ep_grid: usize,
    pub gammas: Vec<f64>,
    pub tol: f64,
    pub compare: Option<(String, HamiltonianFamily)>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            ep_range: Some((0.0, 2.0)),
            ep_grid: DEFAULT_EP_GRID,
            gammas: Vec::new(),
            tol: DEFAULT_REALITY_TOL,
            compare: None,
        }
    }
}

/// Spectrum summary at one `γ`.
pub fn spectrum_summary(f: &HamiltonianFamily, gamma: f64, tol: f64) -> Result<SpectrumSummary> {
    let spectrum = eigenvalues(&f.hamiltonian_at(gamma)).map_err(|e| Error::SolverAt {
        gamma,
        source: Box::new(e),
    })?;
    let reality = classify_reality(&spectrum, tol);
    Ok(SpectrumSummary {
        gamma: r(gamma),
        values: spectrum.values().iter().map(|&z| rc(z)).collect(),
        real_count: reality.real_count,
        pair_count: reality.pair_count,
        phase: if reality.real_count == f.n() {
            Phase::Unbroken
        } else {
            Phase::Broken
        },
    })
}

/// True when the two families have the same spectrum (as multisets, to 1e−10) at every `γ` given.
pub fn isospectral(a: &HamiltonianFamily, b: &HamiltonianFamily, gammas: &[f64]) -> Result<bool> {
    if a.n() != b.n() {
        return Ok(false);
    }
    for &g in gammas {
        let sa = eigenvalues(&a.hamiltonian_at(g))?;
        let sb = eigenvalues(&b.hamiltonian_at(g))?;
        let mut used = vec![false; sb.len()];
        for x in sa.values() {
            let hit = sb
                .values()
                .iter()
                .enumerate()
                .filter(|(k, y)| !used[*k] && (x - *y).norm() <= 1e-10)
                .map(|(k, _)| k)
                .next();
            match hit {
                Some(k) => used[k] = true,
                None => return Ok(false),
            }
        }
    }
    Ok(true)
}

impl AnalysisReport {
    pub fn build(name: &str, f: &HamiltonianFamily, opts: &AnalysisOptions) -> Result<Self> {
        let g = f.graph();
        let model = ModelSummary {
            name: name.to_string(),
            n: g.n(),
            edges: g.edges().iter().map(|e| (e.i, e.j, r(e.w))).collect(),
            signature: g.signature().iter().map(|&s| r(s)).collect(),
        };

        let sym = classify_symmetries(f)?;
        let symmetry = SymmetrySummary {
            commuting_count: sym.commuting.len(),
            conjugating_count: sym.conjugating.len(),
            parity_count: sym.parities.len(),
            commuting: perms(&sym.commuting),
            conjugating: perms(&sym.conjugating),
            parities: perms(&sym.parities),
            group: GroupSummary::from(&sym.group0),
        };

        let pt = first_order_corrections(f)?;
        let perturbation = PerturbationSummary {
            levels: pt
                .clusters
                .iter()
                .zip(&pt.corrections)
                .map(|(c, corr)| LevelSummary {
                    energy: r(c.energy),
                    multiplicity: c.multiplicity,
                    corrections: corr.iter().map(|&z| rc(z)).collect(),
                })
                .collect(),
            extremely_broken: pt.extremely_broken,
            status: "predicted".to_string(),
        };

        let exceptional_points = match opts.ep_range {
            Some((lo, hi)) => {
                let found = find_exceptional_points_with_tol(f, lo, hi, opts.ep_grid, opts.tol)?;
                Some(EpSummary {
                    range: [r(lo), r(hi)],
                    grid: opts.ep_grid,
                    points: found
                        .points
                        .into_iter()
                        .map(|p| ExceptionalPoint {
                            gamma: r(p.gamma),
                            bracket_width: r(p.bracket_width),
                            min_gap: r(p.min_gap),
                        })
                        .collect(),
                    diagnostics: found
                        .diagnostics
                        .into_iter()
                        .map(|d| EpDiagnostic {
                            lo: r(d.lo),
                            hi: r(d.hi),
                            min_gap: r(d.min_gap),
                            ..d
                        })
                        .collect(),
                })
            }
            None => None,
        };

        let spectra = opts
            .gammas
            .iter()
            .map(|&gamma| spectrum_summary(f, gamma, opts.tol))
            .collect::<Result<Vec<_>>>()?;

        let relabeling = match &opts.compare {
            Some((other_name, other)) => {
                let permutation = if other.n() == f.n() {
                    find_relabeling(f, other)?.map(|p| p.as_slice().to_vec())
                } else {
                    None
                };
                Some(RelabelingSummary {
                    compare: other_name.clone(),
                    permutation,
                    isospectral: isospectral(f, other, &[0.3, 1.7])?,
                })
            }
            None => None,
        };

        Ok(Self {
            schema_version: SCHEMA_VERSION,
            model,
            symmetry,
            perturbation,
            exceptional_points,
            spectra,
            relabeling,
            meta: None,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let fmt_perm = |p: &Vec<usize>| {
            let parts: Vec<String> = p.iter().map(usize::to_string).collect();
            format!("({})", parts.join(" "))
        };
        let fmt_c = |z: &[f64; 2]| {
            if z[1] == 0.0 {
                sig_digits(z[0], 10)
            } else if z[0] == 0.0 {
                format!("{}i", sig_digits(z[1], 10))
            } else {
                format!("{}{:+}i", sig_digits(z[0], 10), z[1])
            }
        };
        let mut out = String::new();
        let m = &self.model;
        let _ = writeln!(
            out,
            "model        {} (n = {}, {} edges)",
            m.name,
            m.n,
            m.edges.len()
        );
        let sig: Vec<String> = m.signature.iter().map(|&s| sig_digits(s, 6)).collect();
        let _ = writeln!(out, "signature    [{}]", sig.join(", "));
        let s = &self.symmetry;
        let _ = writeln!(out, "\nsymmetries");
        let list = |v: &Vec<Vec<usize>>| v.iter().map(fmt_perm).collect::<Vec<_>>().join(" ");
        let _ = writeln!(
            out,
            "  commuting    {:>2}  {}",
            s.commuting_count,
            list(&s.commuting)
        );
        let _ = writeln!(
            out,
            "  conjugating  {:>2}  {}",
            s.conjugating_count,
            list(&s.conjugating)
        );
        let _ = writeln!(
            out,
            "  parities     {:>2}  {}",
            s.parity_count,
            list(&s.parities)
        );
        let g = &s.group;
        let _ = writeln!(
            out,
            "  point group  {} (order {}, {}, {} classes, irrep dims {:?})",
            g.name,
            g.order,
            if g.abelian { "abelian" } else { "non-abelian" },
            g.class_count,
            g.irrep_dims
        );
        let _ = writeln!(out, "\nfirst-order perturbation");
        for level in &self.perturbation.levels {
            let corr: Vec<String> = level.corrections.iter().map(fmt_c).collect();
            let _ = writeln!(
                out,
                "  E0 = {:>14}  x{}  dE/dgamma: {}",
                sig_digits(level.energy, 10),
                level.multiplicity,
                corr.join(", ")
            );
        }
        let _ = writeln!(
            out,
            "  extremely broken: {} ({})",
            self.perturbation.extremely_broken, self.perturbation.status
        );
        if let Some(ep) = &self.exceptional_points {
            let _ = writeln!(
                out,
                "\nexceptional points on [{}, {}] (grid {})",
                sig_digits(ep.range[0], 10),
                sig_digits(ep.range[1], 10),
                ep.grid
            );
            if ep.points.is_empty() {
                let _ = writeln!(out, "  none");
            }
            for p in &ep.points {
                let _ = writeln!(
                    out,
                    "  gamma = {}  (min gap {:e})",
                    sig_digits(p.gamma, 10),
                    p.min_gap
                );
            }
            for d in &ep.diagnostics {
                let _ = writeln!(out, "  diagnostic: {}", d.message);
            }
        }
        for sp in &self.spectra {
            let vals: Vec<String> = sp.values.iter().map(fmt_c).collect();
            let _ = writeln!(
                out,
                "\nspectrum at gamma = {}: {:?}, {} real, {} pairs\n  {}",
                sig_digits(sp.gamma, 10),
                sp.phase,
                sp.real_count,
                sp.pair_count,
                vals.join("  ")
            );
        }
        if let Some(rl) = &self.relabeling {
            let _ = writeln!(out, "\ncompare with {}", rl.compare);
            match &rl.permutation {
                Some(p) => {
                    let _ = writeln!(
                        out,
                        "  relabeling {} maps this model onto {}",
                        fmt_perm(p),
                        rl.compare
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        "  no site relabeling maps this model onto {}",
                        rl.compare
                    );
                }
            }
            let _ = writeln!(out, "  isospectral: {}", rl.isospectral);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_chain, build_ho2, build_ring};

    #[test]
    fn ring4_report_contents() {
        let rep = AnalysisReport::build(
            "ring4",
            &build_ring(4).unwrap(),
            &AnalysisOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.schema_version, SCHEMA_VERSION);
        assert_eq!(rep.symmetry.conjugating_count, 4);
        assert_eq!(rep.symmetry.commuting_count, 4);
        assert_eq!(rep.symmetry.group.name, "D4 (≅ C4v)");
        assert!(rep.perturbation.extremely_broken);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let opts = AnalysisOptions {
            gammas: vec![0.3, 1.0],
            compare: Some(("ho2".into(), build_ho2())),
            ..AnalysisOptions::default()
        };
        let rep = AnalysisReport::build("chain4", &build_chain(4).unwrap(), &opts).unwrap();
        let text = rep.to_json();
        let back = AnalysisReport::from_json(&text).unwrap();
        assert_eq!(back, rep);
        assert_eq!(back.to_json(), text);
        let rl = rep.relabeling.unwrap();
        assert_eq!(rl.permutation, Some(vec![0, 2, 1, 3]));
        assert!(rl.isospectral);
    }

    #[test]
    fn text_mentions_group() {
        let rep = AnalysisReport::build(
            "chain4",
            &build_chain(4).unwrap(),
            &AnalysisOptions::default(),
        )
        .unwrap();
        let text = rep.to_text();
        assert!(text.contains("C2"));
        assert!(text.contains("extremely broken: false"));
    }
}
