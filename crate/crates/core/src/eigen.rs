//! Dense eigenvalue routines for small matrices.
//!
//! General complex matrices go through balancing, Householder reduction to
//! upper Hessenberg form and single-shift complex QR. Every eigenvalue is
//! then certified by inverse iteration on the original matrix: a unit vector
//! `v` with `‖Mv − λv‖₂ ≤ 1e−10·‖M‖_F` must be found, or the call fails.
//!
//! Real symmetric matrices use cyclic Jacobi rotations, which also yield an
//! orthonormal eigenbasis.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Largest dimension accepted by the solvers.
pub const MAX_DIM: usize = 64;

/// Relative residual every returned eigenvalue must satisfy.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Default relative tolerance for deciding that an eigenvalue is real.
pub const DEFAULT_REALITY_TOL: f64 = 1e-9;

/// Components below this (relative to `max(1, ‖M‖_F)`) are rounding noise
/// and are set to exactly zero.
const CHOP: f64 = 1e-13;

/// Real parts closer than this (relative) sort as ties, broken by imaginary part.
const ORDER_TIE: f64 = 1e-9;

const EPS: f64 = f64::EPSILON;

/// Computed eigenvalues closer than this (relative to `max(1, ‖M‖_F)`) are
/// candidates for merging; a few multiples of `√ε`.
const CLUSTER_RADIUS: f64 = 1e-7;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Eigenvalues in canonical order: ascending real part, ties by imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<Complex64>,
    /// Worst certified residual `‖Mv − λv‖₂ / ‖M‖_F` over all eigenvalues.
    pub residual_bound: f64,
}

impl Spectrum {
    /// Wraps arbitrary values, sorting them canonically.
    pub fn new(mut values: Vec<Complex64>, residual_bound: f64) -> Self {
        canonical_sort(&mut values);
        Self {
            values,
            residual_bound,
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max(1, max |λ|)`, the scale used by the reality test.
    pub fn scale(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(1.0, f64::max)
    }

    /// Smallest distance between two eigenvalues; infinite for n < 2.
    pub fn min_gap(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.values.iter().enumerate() {
            for b in &self.values[i + 1..] {
                best = best.min((a - b).norm());
            }
        }
        best
    }
}

fn canonical_sort(values: &mut [Complex64]) {
    if values.is_empty() {
        return;
    }
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    // Chain real parts into tie groups, then order each group by imaginary part.
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k].re - values[k - 1].re > ORDER_TIE * scale {
            values[start..k].sort_by(|a, b| a.im.total_cmp(&b.im));
            start = k;
        }
    }
}

/// Outcome of the reality test on a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct RealityReport {
    pub real_count: usize,
    pub pair_count: usize,
    pub unpaired: Vec<Complex64>,
    pub tol: f64,
}

impl RealityReport {
    /// All eigenvalues real: the antiunitary symmetry is unbroken.
    pub fn is_unbroken(&self) -> bool {
        self.pair_count == 0 && self.unpaired.is_empty()
    }
}

/// Counts real eigenvalues and matches the rest into conjugate pairs,
/// closest pairs first.
pub fn classify_reality(spectrum: &Spectrum, tol: f64) -> RealityReport {
    let scale = spectrum.scale();
    let cutoff = tol * scale;
    let (real, rest): (Vec<Complex64>, Vec<Complex64>) =
        spectrum.values().iter().partition(|z| z.im.abs() <= cutoff);

    let mut candidates = Vec::new();
    for i in 0..rest.len() {
        for j in i + 1..rest.len() {
            let d = (rest[i] - rest[j].conj()).norm();
            if d <= cutoff {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut used = vec![false; rest.len()];
    let mut pair_count = 0;
    for (_, i, j) in candidates {
        if !used[i] && !used[j] {
            used[i] = true;
            used[j] = true;
            pair_count += 1;
        }
    }
    let unpaired = rest
        .iter()
        .zip(&used)
        .filter(|(_, &u)| !u)
        .map(|(z, _)| *z)
        .collect();
    RealityReport {
        real_count: real.len(),
        pair_count,
        unpaired,
        tol,
    }
}

/// All eigenvalues of a general complex matrix, each certified by a residual check.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Spectrum> {
    let n = m.n();
    if n > MAX_DIM {
        return Err(Error::SizeLimit {
            n,
            limit: MAX_DIM,
            what: "eigenvalues",
        });
    }
    if !m.is_finite() {
        return Err(Error::validation("matrix entries must be finite"));
    }
    if n == 0 {
        return Ok(Spectrum::new(Vec::new(), 0.0));
    }
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        return Ok(Spectrum::new(vec![czero(); n], 0.0));
    }
    let chop = CHOP * norm.max(1.0);
    let bound = RESIDUAL_TOL * norm;

    let mut h = m.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let mut values = hessenberg_qr(&mut h)?;
    merge_clusters(m, &mut values, bound);
    for z in &mut values {
        if z.re.abs() <= chop {
            z.re = 0.0;
        }
        if z.im.abs() <= chop {
            z.im = 0.0;
        }
    }

    let mut worst = 0.0_f64;
    for &lambda in &values {
        worst = worst.max(certify(m, lambda));
    }
    if worst > bound {
        return Err(Error::SolverConvergence {
            residual: worst,
            bound,
        });
    }
    let rel = if norm > 0.0 { worst / norm } else { 0.0 };
    Ok(Spectrum::new(values, rel))
}

/// Replaces each tight cluster of computed eigenvalues by its mean when the
/// mean is itself certified.
///
/// Near a defective eigenvalue (an exceptional point) the individual values
/// carry errors of order `√ε·‖M‖` while their mean stays accurate to `O(ε)`.
/// Splittings below the cluster radius cannot be resolved in double
/// precision, so nothing observable is lost.
fn merge_clusters(m: &ComplexMatrix, values: &mut [Complex64], bound: f64) {
    let n = values.len();
    let radius = CLUSTER_RADIUS * m.frobenius_norm().max(1.0);
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= radius {
                let (a, b) = (label[i], label[j]);
                if a != b {
                    label.iter_mut().filter(|l| **l == b).for_each(|l| *l = a);
                }
            }
        }
    }
    for root in 0..n {
        let members: Vec<usize> = (0..n).filter(|&k| label[k] == root).collect();
        if members.len() < 2 {
            continue;
        }
        let mean = members.iter().map(|&k| values[k]).sum::<Complex64>() / members.len() as f64;
        if certify(m, mean) <= bound {
            for k in members {
                values[k] = mean;
            }
        }
    }
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable.
fn balance(h: &mut ComplexMatrix) {
    let n = h.n();
    let radix = 2.0_f64;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += h[(j, i)].l1_norm();
                    r += h[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            while cc < r / radix {
                f *= radix;
                cc *= radix * radix;
            }
            while cc > r * radix {
                f /= radix;
                cc /= radix * radix;
            }
            if (cc + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    h[(i, j)] /= f;
                    h[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(h: &mut ComplexMatrix) {
    let n = h.n();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let alpha_norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H ← (I − 2vv*/v*v) H (I − 2vv*/v*v)
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt.conj() * h[(k + 1 + t, j)])
                .sum();
            let f = dot * (2.0 / vnorm2);
            for (t, vt) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vt * f;
            }
        }
        for i in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| h[(i, k + 1 + t)] * vt)
                .sum();
            let f = dot * (2.0 / vnorm2);
            for (t, vt) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= f * vt.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = czero();
        }
    }
}

/// Givens rotation `[c, s; −s̄, c]` with real `c` that zeroes `b` in `(a, b)ᵀ`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, czero());
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Eigenvalues of an upper Hessenberg matrix by shifted QR with deflation.
fn hessenberg_qr(h: &mut ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.n();
    let mut values = vec![czero(); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let max_iter = 60 * n.max(1);
    let mut total = 0usize;

    loop {
        if hi == 0 {
            values[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let mut diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if diag == 0.0 {
                diag = h.frobenius_norm();
            }
            if sub <= EPS * diag {
                h[(l, l - 1)] = czero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            values[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::SolverConvergence {
                residual: f64::INFINITY,
                bound: 0.0,
            });
        }

        let shift = if iter % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for k in l..=hi {
            h[(k, k)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            h[(k + 1, k)] = czero();
            rotations.push((c, s));
        }
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = l + offset;
            let top = (k + 2).min(hi);
            for i in l..=top {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
        }
        for k in l..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(values)
}

/// Eigenvalue of the trailing 2×2 block closest to its last diagonal entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Smallest residual `‖Mv − λv‖₂` found by inverse iteration with unit `v`.
fn certify(m: &ComplexMatrix, lambda: Complex64) -> f64 {
    let n = m.n();
    let norm = m.frobenius_norm();
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[(i, i)] -= lambda;
    }
    let lu = Lu::factor(shifted, EPS * norm.max(f64::MIN_POSITIVE));

    // Deterministic start vector with no special alignment.
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = i as f64 + 1.0;
            Complex64::new((0.7 * t).sin() + 1.3, (1.1 * t).cos())
        })
        .collect();
    normalize(&mut v);

    let mut best = f64::INFINITY;
    for _ in 0..4 {
        v = lu.solve(&v);
        if !normalize(&mut v) {
            break;
        }
        let mv = m.mul_vec(&v);
        let r: f64 = mv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        best = best.min(r);
        if best <= EPS * norm {
            break;
        }
    }
    best
}

fn normalize(v: &mut [Complex64]) -> bool {
    let s: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !s.is_finite() || s == 0.0 {
        return false;
    }
    for z in v.iter_mut() {
        *z /= s;
    }
    true
}

/// LU factorization with partial pivoting; tiny pivots are replaced by a floor
/// so that singular shifts still give a usable inverse-iteration operator.
struct Lu {
    a: ComplexMatrix,
    piv: Vec<usize>,
}

impl Lu {
    fn factor(mut a: ComplexMatrix, floor: f64) -> Self {
        let n = a.n();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[(x, k)].norm().total_cmp(&a[(y, k)].norm()))
                .unwrap_or(k);
            if p != k {
                piv.swap(p, k);
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
            }
            if a[(k, k)].norm() < floor {
                a[(k, k)] = Complex64::new(floor, 0.0);
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                if f != czero() {
                    for j in k + 1..n {
                        let t = a[(k, j)];
                        a[(i, j)] -= f * t;
                    }
                }
            }
        }
        Self { a, piv }
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.a.n();
        let mut x: Vec<Complex64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.a[(i, j)] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.a[(i, j)] * x[j];
                x[i] -= t;
            }
            x[i] /= self.a[(i, i)];
        }
        x
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

impl SymmetricEigen {
    /// Column `k` of `V` restricted to the given rows; mostly for tests.
    pub fn column(&self, k: usize) -> &[f64] {
        &self.vectors[k]
    }
}

/// Cyclic Jacobi eigensolver for real symmetric input.
pub fn symmetric_eigensystem(m: &[Vec<f64>]) -> Result<SymmetricEigen> {
    let n = m.len();
    if n > MAX_DIM {
        return Err(Error::SizeLimit {
            n,
            limit: MAX_DIM,
            what: "symmetric_eigensystem",
        });
    }
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::validation("matrix must be square"));
    }
    let max_abs = m.iter().flatten().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if !max_abs.is_finite() {
        return Err(Error::validation("matrix entries must be finite"));
    }
    for i in 0..n {
        for j in i + 1..n {
            if (m[i][j] - m[j][i]).abs() > 1e-12 * max_abs.max(1.0) {
                return Err(Error::validation(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }

    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let frob: f64 = m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= EPS * frob * 1e-2 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x][x].partial_cmp(&a[y][y]).unwrap_or(Ordering::Equal));
    let values: Vec<f64> = order.iter().map(|&k| a[k][k]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| {
            let mut col: Vec<f64> = (0..n).map(|i| v[i][k]).collect();
            // sign convention: largest component positive
            let lead = col
                .iter()
                .copied()
                .fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            if lead < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
            col
        })
        .collect();

    let mut resid = 0.0;
    for (lambda, col) in values.iter().zip(&vectors) {
        for i in 0..n {
            let mv: f64 = (0..n).map(|j| m[i][j] * col[j]).sum();
            resid += (mv - lambda * col[i]).powi(2);
        }
    }
    let resid = resid.sqrt();
    if resid > RESIDUAL_TOL * frob.max(f64::MIN_POSITIVE) && resid > 0.0 {
        return Err(Error::SolverConvergence {
            residual: resid,
            bound: RESIDUAL_TOL * frob,
        });
    }
    Ok(SymmetricEigen { values, vectors })
}
