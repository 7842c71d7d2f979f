//! Antiunitary-symmetry analysis of non-Hermitian lattice Hamiltonians
//! `H(γ) = A + iγ·diag(s)`.
//!
//! The crate enumerates the site permutations that commute with `H(γ)` or map
//! it to its complex conjugate, builds the point group of the Hermitian limit,
//! computes certified spectra across `γ`, locates exceptional points and
//! predicts extremely broken symmetry from first-order degenerate
//! perturbation theory.

#![allow(clippy::needless_range_loop)]

pub mod eigen;
pub mod error;
pub mod format;
pub mod lattice;
pub mod matrix;
pub mod models;
pub mod perturbation;
pub mod report;
pub mod sweep;
pub mod symmetry;

pub use eigen::{
    classify_reality, eigenvalues, symmetric_eigensystem, RealityReport, Spectrum, SymmetricEigen,
};
pub use error::{Error, Result};
pub use lattice::{build_chain, build_ho2, build_ring, load_graph, HamiltonianFamily, SiteGraph};
pub use matrix::ComplexMatrix;
pub use models::{resolve_model, BUILTIN_MODELS};
pub use perturbation::{degenerate_clusters, first_order_corrections, PerturbationReport};
pub use sweep::{
    figure_data, find_exceptional_points, sweep, ExceptionalPoint, Figure, SweepResult,
};
pub use symmetry::{
    build_group, classify_symmetries, enumerate_automorphisms, find_relabeling, identify_group,
    irrep_dimensions, GroupInfo, SitePermutation, SymmetryReport,
};
