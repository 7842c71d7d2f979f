//! First-order degenerate perturbation theory in `γ`.
//!
//! With `H(γ) = H(0) + γ·W` and `W = i·diag(s)`, each eigenvalue cluster
//! `E⁽⁰⁾` of `H(0)` splits to first order as `E⁽⁰⁾ + γ·λ⁽¹⁾`, where the
//! `λ⁽¹⁾` are the eigenvalues of `W` projected onto the cluster's eigenspace.
//! Since `W` is `i` times a real diagonal matrix, every `λ⁽¹⁾` is purely
//! imaginary. A nonzero one means the level leaves the real axis immediately,
//! which is the first-order signature of extremely broken antiunitary symmetry.

use num_complex::Complex64;

use crate::eigen::{symmetric_eigensystem, MAX_DIM};
use crate::error::{Error, Result};
use crate::lattice::HamiltonianFamily;

/// Default relative gap below which `H(0)` eigenvalues are treated as degenerate.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// `|Im λ⁽¹⁾|` above this flags a predicted extreme breaking.
pub const BREAKING_THRESHOLD: f64 = 1e-8;

/// Values below this are rounding noise from the symmetric solver.
const CHOP: f64 = 1e-13;

/// A run of (numerically) equal eigenvalues of `H(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Mean of the member eigenvalues.
    pub energy: f64,
    pub multiplicity: usize,
    /// Index of the first member in the ascending eigenvalue list.
    pub start: usize,
}

/// Groups ascending eigenvalues into maximal runs whose consecutive gaps are
/// at most `tol·max(1, max |e|)`.
pub fn degenerate_clusters(eigs: &[f64], tol: f64) -> Vec<Cluster> {
    let scale = eigs.iter().fold(1.0_f64, |acc, e| acc.max(e.abs()));
    let mut clusters = Vec::new();
    let mut start = 0;
    for k in 1..=eigs.len() {
        if k == eigs.len() || eigs[k] - eigs[k - 1] > tol * scale {
            let members = &eigs[start..k];
            clusters.push(Cluster {
                energy: members.iter().sum::<f64>() / members.len() as f64,
                multiplicity: members.len(),
                start,
            });
            start = k;
        }
    }
    clusters
}

/// First-order coefficients for every level of `H(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    pub clusters: Vec<Cluster>,
    /// `corrections[c]` holds the `multiplicity` coefficients of cluster `c`,
    /// ascending by imaginary part.
    pub corrections: Vec<Vec<Complex64>>,
    /// Predicted, not proved: some coefficient has `|Im| > 1e−8`.
    pub extremely_broken: bool,
}

impl PerturbationReport {
    /// All coefficients in cluster order.
    pub fn flat_corrections(&self) -> Vec<Complex64> {
        self.corrections.iter().flatten().copied().collect()
    }

    /// `(E⁽⁰⁾, λ⁽¹⁾)` for every level.
    pub fn levels(&self) -> Vec<(f64, Complex64)> {
        self.clusters
            .iter()
            .zip(&self.corrections)
            .flat_map(|(c, corr)| corr.iter().map(move |&l| (c.energy, l)))
            .collect()
    }
}

/// Runs the first-order analysis with the default cluster tolerance.
pub fn first_order_corrections(f: &HamiltonianFamily) -> Result<PerturbationReport> {
    first_order_corrections_with_tol(f, DEFAULT_CLUSTER_TOL)
}

pub fn first_order_corrections_with_tol(
    f: &HamiltonianFamily,
    tol: f64,
) -> Result<PerturbationReport> {
    let n = f.n();
    if n > MAX_DIM {
        return Err(Error::SizeLimit {
            n,
            limit: MAX_DIM,
            what: "perturbation",
        });
    }
    let eig = symmetric_eigensystem(&f.hermitian_limit())?;
    let mut clusters = degenerate_clusters(&eig.values, tol);
    let scale = eig.values.iter().fold(1.0_f64, |acc, e| acc.max(e.abs()));
    for c in &mut clusters {
        if c.energy.abs() <= CHOP * scale {
            c.energy = 0.0;
        }
    }
    let s = f.graph().signature();
    let s_scale = s.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));

    let mut corrections = Vec::with_capacity(clusters.len());
    for c in &clusters {
        let basis = &eig.vectors[c.start..c.start + c.multiplicity];
        // W projected on the cluster is i·R with R = Vᵀ·diag(s)·V real symmetric.
        let projected: Vec<Vec<f64>> = basis
            .iter()
            .map(|u| {
                basis
                    .iter()
                    .map(|v| u.iter().zip(v).zip(s).map(|((a, b), w)| a * w * b).sum())
                    .collect()
            })
            .collect();
        let mut coeffs: Vec<Complex64> = symmetric_eigensystem(&symmetrize(projected))?
            .values
            .into_iter()
            .map(|mu| Complex64::new(0.0, if mu.abs() <= CHOP * s_scale { 0.0 } else { mu }))
            .collect();
        coeffs.sort_by(|a, b| a.im.total_cmp(&b.im));
        corrections.push(coeffs);
    }
    let extremely_broken = corrections
        .iter()
        .flatten()
        .any(|z| z.im.abs() > BREAKING_THRESHOLD);
    Ok(PerturbationReport {
        clusters,
        corrections,
        extremely_broken,
    })
}

fn symmetrize(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = m.len();
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = avg;
            m[j][i] = avg;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_chain, build_ring};

    #[test]
    fn clusters_examples() {
        let c = degenerate_clusters(&[-2.0, 0.0, 0.0, 2.0], 1e-8);
        let got: Vec<(f64, usize)> = c.iter().map(|c| (c.energy, c.multiplicity)).collect();
        assert_eq!(got, vec![(-2.0, 1), (0.0, 2), (2.0, 1)]);

        let c = degenerate_clusters(&[-1.618, -0.618, 0.618, 1.618], 1e-8);
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|c| c.multiplicity == 1));

        let c = degenerate_clusters(&[1.0, 1.0, 1.0], 1e-8);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].multiplicity, 3);

        assert!(degenerate_clusters(&[], 1e-8).is_empty());
    }

    #[test]
    fn ring4_degenerate_pair_splits_imaginary() {
        // Projected W on the E = 0 doublet is [[0, i], [i, 0]] in the
        // (alternating-phase) basis; its eigenvalues are ±i.
        let r = first_order_corrections(&build_ring(4).unwrap()).unwrap();
        assert!(r.extremely_broken);
        assert_eq!(r.clusters.len(), 3);
        assert_eq!(r.clusters[1].multiplicity, 2);
        let mid = &r.corrections[1];
        assert!((mid[0] - Complex64::new(0.0, -1.0)).norm() < 1e-10);
        assert!((mid[1] - Complex64::new(0.0, 1.0)).norm() < 1e-10);
        assert!(r.corrections[0][0].norm() < 1e-10);
        assert!(r.corrections[2][0].norm() < 1e-10);
    }

    #[test]
    fn chain4_has_no_first_order_shift() {
        let r = first_order_corrections(&build_chain(4).unwrap()).unwrap();
        assert!(!r.extremely_broken);
        assert_eq!(r.clusters.len(), 4);
        assert!(r.flat_corrections().iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn zero_signature_is_not_broken() {
        let g = build_ring(4)
            .unwrap()
            .graph()
            .with_signature(vec![0.0; 4])
            .unwrap();
        let r = first_order_corrections(&HamiltonianFamily::new(g)).unwrap();
        assert!(!r.extremely_broken);
        assert!(r
            .flat_corrections()
            .iter()
            .all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn corrections_sum_to_trace_of_w() {
        for f in [build_ring(6).unwrap(), build_chain(5).unwrap()] {
            let r = first_order_corrections(&f).unwrap();
            let total: Complex64 = r.flat_corrections().iter().sum();
            let trace: f64 = f.graph().signature().iter().sum();
            assert!((total - Complex64::new(0.0, trace)).norm() < 1e-10);
            assert_eq!(
                r.clusters.iter().map(|c| c.multiplicity).sum::<usize>(),
                f.n()
            );
            assert!(r.flat_corrections().iter().all(|z| z.re == 0.0));
        }
    }
}
