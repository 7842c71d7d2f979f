//! Independent oracles and generators shared by the integration suites.
//! Nothing here calls into the solver paths it is used to check.

#![allow(dead_code, clippy::needless_range_loop)]

use antisym::{eigenvalues, ComplexMatrix, HamiltonianFamily, SiteGraph, Spectrum};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    match n {
        0 => c(1.0, 0.0),
        1 => m[0][0],
        _ => {
            let mut acc = c(0.0, 0.0);
            for col in 0..n {
                if m[0][col] == c(0.0, 0.0) {
                    continue;
                }
                let minor: Vec<Vec<Complex64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != col)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                acc += m[0][col] * cofactor_det(&minor) * sign;
            }
            acc
        }
    }
}

pub fn rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.n()).map(|i| m.row(i).to_vec()).collect()
}

/// Eigenvalues with the trace and determinant identities asserted on the way.
pub fn checked_eigenvalues(m: &ComplexMatrix) -> Spectrum {
    let s = eigenvalues(m).expect("eigensolver");
    assert_eq!(s.len(), m.n());
    let norm = m.frobenius_norm();
    let sum: Complex64 = s.values().iter().sum();
    assert!(
        (sum - m.trace()).norm() <= 1e-9 * norm.max(1.0),
        "trace identity: {sum} vs {}",
        m.trace()
    );
    if m.n() <= 8 {
        let det = cofactor_det(&rows(m));
        let prod: Complex64 = s.values().iter().product();
        let scale: f64 = s
            .values()
            .iter()
            .map(|z| z.norm().max(1.0))
            .product::<f64>()
            .max(det.norm());
        assert!(
            (prod - det).norm() <= 1e-8 * scale,
            "determinant identity: {prod} vs {det}"
        );
    }
    s
}

/// Characteristic polynomial coefficients `c[0..=n]` of `det(λI − M)` (monic,
/// highest degree first) by Faddeev–LeVerrier.
pub fn char_poly(m: &[Vec<Complex64>]) -> Vec<Complex64> {
    let n = m.len();
    let mut coeffs = vec![c(1.0, 0.0)];
    let mut mk = vec![vec![c(0.0, 0.0); n]; n];
    for k in 1..=n {
        // M_k = M·M_{k−1} + c_{k−1}·I
        let prev = mk.clone();
        for i in 0..n {
            for j in 0..n {
                let mut acc = c(0.0, 0.0);
                for t in 0..n {
                    acc += m[i][t] * prev[t][j];
                }
                mk[i][j] = acc;
            }
            mk[i][i] += coeffs[k - 1];
        }
        let mut tr = c(0.0, 0.0);
        for i in 0..n {
            for t in 0..n {
                tr += m[i][t] * mk[t][i];
            }
        }
        coeffs.push(-tr / k as f64);
    }
    coeffs
}

/// All roots of a monic polynomial by Durand–Kerner iteration.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| coeffs.iter().fold(c(0.0, 0.0), |acc, a| acc * z + a);
    let seed = c(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let snapshot = roots.clone();
        for i in 0..n {
            let mut denom = c(1.0, 0.0);
            for (j, r) in snapshot.iter().enumerate() {
                if j != i {
                    denom *= roots[i] - r;
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
        }
    }
    roots
}

/// Greedy multiset comparison: every `a` has a distinct `b` within `tol`.
pub fn multiset_close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for x in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .min_by(|(_, p), (_, q)| (x - *p).norm().total_cmp(&(x - *q).norm()));
        match best {
            Some((k, y)) if (x - y).norm() <= tol => used[k] = true,
            _ => return false,
        }
    }
    true
}

/// Max deviation under the best one-to-one matching (brute force, n ≤ 7).
pub fn optimal_matching_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut idx: Vec<usize> = (0..b.len()).collect();
    let mut best = f64::INFINITY;
    heap_permutations(&mut idx, &mut |p| {
        let err = a
            .iter()
            .zip(p)
            .map(|(x, &k)| (x - b[k]).norm())
            .fold(0.0, f64::max);
        best = best.min(err);
    });
    best
}

/// Heap's algorithm; visits every ordering of `items`.
pub fn heap_permutations(items: &mut [usize], visit: &mut dyn FnMut(&[usize])) {
    fn go(k: usize, items: &mut [usize], visit: &mut dyn FnMut(&[usize])) {
        if k <= 1 {
            visit(items);
            return;
        }
        go(k - 1, items, visit);
        for i in 0..k - 1 {
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
            go(k - 1, items, visit);
        }
    }
    let k = items.len();
    go(k, items, visit);
}

/// Automorphisms by checking every permutation against the dense weights;
/// sorted lexicographically.
pub fn brute_force_automorphisms(g: &SiteGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut w = vec![vec![0.0; n]; n];
    for e in g.edges() {
        w[e.i][e.j] = e.w;
        w[e.j][e.i] = e.w;
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    heap_permutations(&mut idx, &mut |p| {
        if (0..n).all(|i| (0..n).all(|j| w[p[i]][p[j]] == w[i][j])) {
            out.push(p.to_vec());
        }
    });
    out.sort();
    out
}

/// Random graph on `n` sites with weights from a small set so that
/// symmetries actually occur.
pub fn random_graph(r: &mut StdRng, n: usize) -> SiteGraph {
    let weights = [1.0, 1.0, 2.0, -0.5];
    let density: f64 = r.gen_range(0.2..0.9);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.gen_bool(density) {
                edges.push((i, j, *weights.choose(r).unwrap()));
            }
        }
    }
    let signature = (0..n)
        .map(|_| *[-1.0, 0.0, 1.0].choose(r).unwrap())
        .collect();
    SiteGraph::new(n, edges, signature).unwrap()
}

/// Random lattice built to have the conjugating permutation `p`: couplings are
/// constant on orbits of site pairs under `p`, and the signature alternates
/// along every even cycle of `p` (zero on odd cycles).
pub fn random_conjugating_lattice(r: &mut StdRng, n: usize) -> (HamiltonianFamily, Vec<usize>) {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(r);
    let mut signature = vec![0.0; n];
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut k = p[start];
        while k != start {
            cycle.push(k);
            seen[k] = true;
            k = p[k];
        }
        if cycle.len() % 2 == 0 {
            let amp: f64 = *[1.0, 0.5, 2.0].choose(r).unwrap();
            for (t, &site) in cycle.iter().enumerate() {
                signature[site] = if t % 2 == 0 { amp } else { -amp };
            }
        }
    }
    let mut w = vec![vec![0.0; n]; n];
    let mut done = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if done[i][j] {
                continue;
            }
            let value = if r.gen_bool(0.55) {
                r.gen_range(0.3..2.0)
            } else {
                0.0
            };
            let (mut a, mut b) = (i, j);
            loop {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                if done[lo][hi] {
                    break;
                }
                done[lo][hi] = true;
                w[lo][hi] = value;
                a = p[a];
                b = p[b];
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if w[i][j] != 0.0 {
                edges.push((i, j, w[i][j]));
            }
        }
    }
    (
        HamiltonianFamily::new(SiteGraph::new(n, edges, signature).unwrap()),
        p,
    )
}

/// Worst `|slope − λ⁽¹⁾|` from central differences at `±h`. Each side is
/// matched to the first-order prediction `E⁽⁰⁾ ± λ⁽¹⁾h`, which labels the
/// branches so the `h²` terms cancel.
pub fn central_slope_error(f: &HamiltonianFamily, levels: &[(f64, Complex64)], h: f64) -> f64 {
    let plus = checked_eigenvalues(&f.hamiltonian_at(h));
    let minus = checked_eigenvalues(&f.hamiltonian_at(-h));
    let ahead: Vec<Complex64> = levels.iter().map(|&(e, l)| c(e, 0.0) + l * h).collect();
    let behind: Vec<Complex64> = levels.iter().map(|&(e, l)| c(e, 0.0) - l * h).collect();
    let sp = best_assignment(&ahead, plus.values());
    let sm = best_assignment(&behind, minus.values());
    levels
        .iter()
        .enumerate()
        .map(|(k, &(_, l))| ((plus.values()[sp[k]] - minus.values()[sm[k]]) / (2.0 * h) - l).norm())
        .fold(0.0, f64::max)
}

/// `a[k]` is matched to `b[assignment[k]]`, minimising the worst deviation
/// (brute force, n ≤ 7).
pub fn best_assignment(a: &[Complex64], b: &[Complex64]) -> Vec<usize> {
    assert_eq!(a.len(), b.len());
    let mut idx: Vec<usize> = (0..b.len()).collect();
    let mut best = (f64::INFINITY, f64::INFINITY, idx.clone());
    heap_permutations(&mut idx, &mut |p| {
        let devs = a.iter().zip(p).map(|(x, &k)| (x - b[k]).norm());
        let worst = devs.clone().fold(0.0, f64::max);
        let total: f64 = devs.sum();
        if (worst, total) < (best.0, best.1) {
            best = (worst, total, p.to_vec());
        }
    });
    best.2
}
