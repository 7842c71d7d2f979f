//! Signed lattice graphs and the non-Hermitian family `H(γ) = A + iγ·diag(s)`.
//!
//! A [`SiteGraph`] carries real symmetric couplings between sites plus one
//! gain/loss weight per site. [`HamiltonianFamily`] turns it into dense
//! complex matrices for any real `γ`.

use std::fmt;

use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Coupling between two distinct sites, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Lattice sites, real couplings and the per-site gain/loss signature.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteGraph {
    n: usize,
    edges: Vec<Edge>,
    signature: Vec<f64>,
}

impl SiteGraph {
    /// Validates and canonicalizes a graph. Edges given as `(j, i)` with
    /// `j > i` are flipped, then all edges are sorted lexicographically.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>, signature: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("site count must be positive"));
        }
        if signature.len() != n {
            return Err(Error::validation(format!(
                "signature has length {} but n = {}",
                signature.len(),
                n
            )));
        }
        if let Some(k) = signature.iter().position(|s| !s.is_finite()) {
            return Err(Error::validation(format!("signature[{k}] is not finite")));
        }
        let mut canon = Vec::with_capacity(edges.len());
        for (k, &(a, b, w)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::validation(format!(
                    "edges[{k}]: site index out of range ({a}, {b}) for n = {n}"
                )));
            }
            if a == b {
                return Err(Error::validation(format!(
                    "edges[{k}]: self-loop on site {a}"
                )));
            }
            if !w.is_finite() || w == 0.0 {
                return Err(Error::validation(format!(
                    "edges[{k}]: coupling must be finite and nonzero, got {w}"
                )));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            canon.push(Edge { i, j, w });
        }
        canon.sort_by_key(|e| (e.i, e.j));
        if let Some(pair) = canon
            .windows(2)
            .find(|p| (p[0].i, p[0].j) == (p[1].i, p[1].j))
        {
            return Err(Error::validation(format!(
                "duplicate edge ({}, {})",
                pair[0].i, pair[0].j
            )));
        }
        Ok(Self {
            n,
            edges: canon,
            signature,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn signature(&self) -> &[f64] {
        &self.signature
    }

    /// Dense real coupling matrix; zero where there is no edge.
    pub fn weight_matrix(&self) -> Vec<Vec<f64>> {
        let mut w = vec![vec![0.0; self.n]; self.n];
        for e in &self.edges {
            w[e.i][e.j] = e.w;
            w[e.j][e.i] = e.w;
        }
        w
    }

    /// Same couplings with a different signature.
    pub fn with_signature(&self, signature: Vec<f64>) -> Result<Self> {
        let edges = self.edges.iter().map(|e| (e.i, e.j, e.w)).collect();
        Self::new(self.n, edges, signature)
    }

    /// Parses the textual lattice format:
    /// `{"n": 4, "edges": [[0, 1, 1.0], ...], "signature": [1, -1, 1, -1]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        let obj = root
            .as_object()
            .ok_or_else(|| Error::parse("$", "top level must be an object"))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "n" | "edges" | "signature") {
                return Err(Error::parse(format!("$.{key}"), "unknown field"));
            }
        }
        let n = obj
            .get("n")
            .ok_or_else(|| Error::parse("$.n", "missing field"))?
            .as_u64()
            .ok_or_else(|| Error::parse("$.n", "expected a non-negative integer"))?
            as usize;

        let raw_edges = obj
            .get("edges")
            .ok_or_else(|| Error::parse("$.edges", "missing field"))?
            .as_array()
            .ok_or_else(|| Error::parse("$.edges", "expected an array"))?;
        let mut edges = Vec::with_capacity(raw_edges.len());
        for (k, item) in raw_edges.iter().enumerate() {
            let loc = format!("$.edges[{k}]");
            let triple = item
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| Error::parse(&loc, "expected [i, j, w]"))?;
            let index = |v: &Value, which: &str| {
                v.as_u64()
                    .map(|x| x as usize)
                    .ok_or_else(|| Error::parse(format!("{loc}.{which}"), "expected a site index"))
            };
            let i = index(&triple[0], "i")?;
            let j = index(&triple[1], "j")?;
            let w = match &triple[2] {
                Value::Number(x) => x.as_f64().unwrap_or(f64::NAN),
                Value::Array(_) | Value::Object(_) => {
                    return Err(Error::parse(
                        format!("{loc}.w"),
                        "complex couplings are not supported; w must be real",
                    ))
                }
                _ => return Err(Error::parse(format!("{loc}.w"), "expected a real number")),
            };
            if i >= n || j >= n {
                return Err(Error::parse(
                    &loc,
                    format!("site index out of range ({i}, {j}) for n = {n}"),
                ));
            }
            if i == j {
                return Err(Error::parse(&loc, format!("self-loop on site {i}")));
            }
            edges.push((i, j, w));
        }

        let raw_sig = obj
            .get("signature")
            .ok_or_else(|| Error::parse("$.signature", "missing field"))?
            .as_array()
            .ok_or_else(|| Error::parse("$.signature", "expected an array"))?;
        let signature = raw_sig
            .iter()
            .enumerate()
            .map(|(k, v)| {
                v.as_f64().ok_or_else(|| {
                    Error::parse(format!("$.signature[{k}]"), "expected a real number")
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if signature.len() != n {
            return Err(Error::parse(
                "$.signature",
                format!("length {} does not match n = {n}", signature.len()),
            ));
        }

        Self::new(n, edges, signature).map_err(|e| match e {
            Error::Validation(msg) => Error::parse("$", msg),
            other => other,
        })
    }

    /// Canonical serialization, one edge per line. Parsing the output and
    /// writing it again reproduces the same bytes.
    pub fn to_json(&self) -> String {
        let num = |x: f64| serde_json::to_string(&x).expect("finite float");
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"n\": {},\n", self.n));
        out.push_str("  \"edges\": [");
        for (k, e) in self.edges.iter().enumerate() {
            out.push_str(if k == 0 { "\n" } else { ",\n" });
            out.push_str(&format!("    [{}, {}, {}]", e.i, e.j, num(e.w)));
        }
        out.push_str(if self.edges.is_empty() {
            "],\n"
        } else {
            "\n  ],\n"
        });
        let sig: Vec<String> = self.signature.iter().map(|&s| num(s)).collect();
        out.push_str(&format!("  \"signature\": [{}]\n", sig.join(", ")));
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for SiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} edges=[", self.n)?;
        for (k, e) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}-{}:{}", e.i, e.j, e.w)?;
        }
        write!(f, "] signature={:?}", self.signature)
    }
}

/// Free-function form of [`SiteGraph::from_json`].
pub fn load_graph(text: &str) -> Result<SiteGraph> {
    SiteGraph::from_json(text)
}

/// The one-parameter family `H(γ) = A + iγ·diag(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianFamily {
    graph: SiteGraph,
}

impl HamiltonianFamily {
    pub fn new(graph: SiteGraph) -> Self {
        Self { graph }
    }

    pub fn graph(&self) -> &SiteGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n
    }

    /// Dense `H(γ)`. Diagonal is `iγ·s_j`, off-diagonal entries are the
    /// couplings; the result is complex symmetric.
    pub fn hamiltonian_at(&self, gamma: f64) -> ComplexMatrix {
        let n = self.graph.n;
        let mut h = ComplexMatrix::zeros(n);
        for (j, &s) in self.graph.signature.iter().enumerate() {
            h[(j, j)] = Complex64::new(0.0, gamma * s);
        }
        for e in &self.graph.edges {
            h[(e.i, e.j)] = Complex64::new(e.w, 0.0);
            h[(e.j, e.i)] = Complex64::new(e.w, 0.0);
        }
        h
    }

    /// `H(0)` as a real symmetric matrix.
    pub fn hermitian_limit(&self) -> Vec<Vec<f64>> {
        self.graph.weight_matrix()
    }

    /// True when every signature entry is zero, i.e. `H(γ)` is Hermitian for all `γ`.
    pub fn is_hermitian_family(&self) -> bool {
        self.graph.signature.iter().all(|&s| s == 0.0)
    }
}

/// Alternating signature `+1, -1, +1, ...` of length `n`.
fn alternating(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// Periodic ring of `n` sites with unit couplings and alternating gain/loss.
pub fn build_ring(n: usize) -> Result<HamiltonianFamily> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::validation(format!(
            "ring size must be even and at least 4, got {n}"
        )));
    }
    let edges = (0..n).map(|k| (k, (k + 1) % n, 1.0)).collect();
    Ok(HamiltonianFamily::new(SiteGraph::new(
        n,
        edges,
        alternating(n),
    )?))
}

/// Open chain of `n` sites with unit couplings and alternating gain/loss.
pub fn build_chain(n: usize) -> Result<HamiltonianFamily> {
    if n < 2 {
        return Err(Error::validation(format!(
            "chain needs at least 2 sites, got {n}"
        )));
    }
    let edges = (0..n - 1).map(|k| (k, k + 1, 1.0)).collect();
    Ok(HamiltonianFamily::new(SiteGraph::new(
        n,
        edges,
        alternating(n),
    )?))
}

/// The relabeled four-site open chain: edges 0–2, 1–2, 1–3 with signature
/// `(+1, +1, -1, -1)`.
pub fn build_ho2() -> HamiltonianFamily {
    let graph = SiteGraph::new(
        4,
        vec![(0, 2, 1.0), (1, 2, 1.0), (1, 3, 1.0)],
        vec![1.0, 1.0, -1.0, -1.0],
    )
    .expect("static graph is valid");
    HamiltonianFamily::new(graph)
}
