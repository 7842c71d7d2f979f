mod common;

use antisym::eigen::symmetric_eigensystem;
use antisym::perturbation::first_order_corrections;
use antisym::sweep::find_exceptional_points;
use antisym::symmetry::{enumerate_automorphisms_exhaustive, verify_report};
use antisym::{
    build_chain, build_ho2, build_ring, classify_reality, classify_symmetries,
    enumerate_automorphisms, load_graph, HamiltonianFamily, SiteGraph,
};
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use std::collections::BTreeSet;

#[test]
fn chain4_at_one_matches_polynomial_roots() {
    let h = build_chain(4).unwrap().hamiltonian_at(1.0);
    let oracle = poly_roots(&char_poly(&rows(&h)));
    let s = checked_eigenvalues(&h);
    assert!(
        multiset_close(s.values(), &oracle, 1e-10),
        "{:?} vs {oracle:?}",
        s.values()
    );
    let expected = [
        c(-1.272_019_649_514_069, 0.0),
        c(0.0, -0.786_151_377_757_423_3),
        c(0.0, 0.786_151_377_757_423_3),
        c(1.272_019_649_514_069, 0.0),
    ];
    for (got, want) in s.values().iter().zip(expected) {
        assert!((got - want).norm() < 1e-9);
    }
}

#[test]
fn random_lattice_spectra_match_polynomial_roots() {
    let mut r = rng(11);
    for _ in 0..30 {
        let n = r.gen_range(2..=6);
        let f = HamiltonianFamily::new(random_graph(&mut r, n));
        let gamma = r.gen_range(-2.0..2.0);
        let h = f.hamiltonian_at(gamma);
        let s = checked_eigenvalues(&h);
        let oracle = poly_roots(&char_poly(&rows(&h)));
        let gap = s.min_gap();
        // Roots of the polynomial are only accurate away from coalescence.
        if gap > 1e-3 {
            assert!(
                multiset_close(s.values(), &oracle, 1e-8),
                "{:?} vs {oracle:?}",
                s.values()
            );
        }
    }
}

#[test]
fn permutation_similarity_preserves_spectrum() {
    let mut r = rng(5);
    for _ in 0..40 {
        let n = r.gen_range(2..=8);
        let f = HamiltonianFamily::new(random_graph(&mut r, n));
        let h = f.hamiltonian_at(r.gen_range(-1.5..1.5));
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            p.swap(i, r.gen_range(0..=i));
        }
        let a = checked_eigenvalues(&h);
        let b = checked_eigenvalues(&h.permute(&p));
        if a.min_gap() > 1e-4 {
            assert!(multiset_close(a.values(), b.values(), 1e-10));
        }
    }
}

#[test]
fn residual_bound_is_within_contract() {
    let mut r = rng(9);
    for _ in 0..20 {
        let n = r.gen_range(2..=12);
        let f = HamiltonianFamily::new(random_graph(&mut r, n));
        let s = antisym::eigenvalues(&f.hamiltonian_at(r.gen_range(-3.0..3.0))).unwrap();
        assert!(s.residual_bound <= 1e-10);
        let re: Vec<f64> = s.values().iter().map(|z| z.re).collect();
        assert!(re.windows(2).all(|w| w[0] <= w[1] + 1e-9 * s.scale()));
    }
}

#[test]
fn symmetric_eigensystem_contract() {
    let mut r = rng(21);
    for _ in 0..20 {
        let n = r.gen_range(1..=10);
        let m = HamiltonianFamily::new(random_graph(&mut r, n)).hermitian_limit();
        let e = symmetric_eigensystem(&m).unwrap();
        let frob: f64 = m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        let mut resid = 0.0;
        for (k, v) in e.vectors.iter().enumerate() {
            for i in 0..n {
                let mv: f64 = (0..n).map(|j| m[i][j] * v[j]).sum();
                resid += (mv - e.values[k] * v[i]).powi(2);
            }
            for (l, u) in e.vectors.iter().enumerate() {
                let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!((dot - if k == l { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
        assert!(resid.sqrt() <= 1e-10 * frob.max(1e-300) || resid == 0.0);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn automorphisms_match_brute_force() {
    let mut r = rng(1);
    for _ in 0..100 {
        let n = r.gen_range(1..=6);
        let g = random_graph(&mut r, n);
        let fast: Vec<Vec<usize>> = enumerate_automorphisms(&g)
            .unwrap()
            .iter()
            .map(|p| p.as_slice().to_vec())
            .collect();
        assert_eq!(fast, brute_force_automorphisms(&g), "graph {g}");
        let exhaustive: Vec<Vec<usize>> = enumerate_automorphisms_exhaustive(&g)
            .unwrap()
            .iter()
            .map(|p| p.as_slice().to_vec())
            .collect();
        assert_eq!(exhaustive, fast);
    }
}

#[test]
fn classified_permutations_satisfy_matrix_identities() {
    let mut r = rng(2);
    for _ in 0..40 {
        let n = r.gen_range(2..=6);
        let (f, p) = random_conjugating_lattice(&mut r, n);
        let report = classify_symmetries(&f).unwrap();
        assert!(report
            .conjugating
            .iter()
            .any(|q| q.as_slice() == p.as_slice()));
        assert!(verify_report(&report, &f, 0.7));
        assert!(verify_report(&report, &f, 0.0));
        if f.graph().signature().iter().any(|&s| s != 0.0) {
            assert!(report
                .commuting
                .iter()
                .all(|q| !report.conjugating.contains(q)));
        }
        // conjugating ∘ conjugating ∈ commuting, conjugating ∘ commuting ∈ conjugating
        let commuting: BTreeSet<_> = report.commuting.iter().cloned().collect();
        let conjugating: BTreeSet<_> = report.conjugating.iter().cloned().collect();
        for a in &report.conjugating {
            for b in &report.conjugating {
                assert!(commuting.contains(&a.compose(b)));
            }
            for b in &report.commuting {
                assert!(conjugating.contains(&a.compose(b)));
                assert!(conjugating.contains(&b.compose(a)));
            }
        }
        let g = &report.group0;
        assert_eq!(g.order(), commuting.union(&conjugating).count());
        if g.order() <= 16 {
            assert_eq!(g.irrep_dims.iter().map(|d| d * d).sum::<usize>(), g.order());
            assert_eq!(g.irrep_dims.len(), g.class_count());
        }
    }
}

#[test]
fn conjugating_symmetry_closes_spectrum_under_conjugation() {
    let mut r = rng(3);
    let mut lattices = 0;
    while lattices < 50 {
        let n = r.gen_range(2..=8);
        let (f, _) = random_conjugating_lattice(&mut r, n);
        if classify_symmetries(&f).unwrap().conjugating.is_empty() {
            continue;
        }
        lattices += 1;
        for _ in 0..20 {
            let s = checked_eigenvalues(&f.hamiltonian_at(r.gen_range(-3.0..3.0)));
            let conj: Vec<Complex64> = s.values().iter().map(|z| z.conj()).collect();
            assert!(
                multiset_close(s.values(), &conj, 1e-9 * s.scale()),
                "{:?}",
                s.values()
            );
        }
    }
}

fn finite_difference_check(f: &HamiltonianFamily) {
    let h = 1e-6;
    let report = first_order_corrections(f).unwrap();
    let e0 = checked_eigenvalues(&f.hamiltonian_at(0.0));
    let err = central_slope_error(f, &report.levels(), h);
    assert!(
        err <= 1e-4,
        "finite-difference mismatch {err} for {}",
        f.graph()
    );
    assert!(multiset_close(
        e0.values(),
        &report
            .levels()
            .iter()
            .map(|&(e, _)| c(e, 0.0))
            .collect::<Vec<_>>(),
        1e-9
    ));
    let total: Complex64 = report.flat_corrections().iter().sum();
    let trace_rate = (f.hamiltonian_at(h).trace() - f.hamiltonian_at(0.0).trace()) / h;
    assert!((total - trace_rate).norm() <= 1e-9);
}

#[test]
fn forward_differences_on_builtins() {
    let h = 1e-6;
    for f in [build_ring(4).unwrap(), build_chain(4).unwrap(), build_ho2()] {
        let report = first_order_corrections(&f).unwrap();
        let levels = report.levels();
        let e0: Vec<Complex64> = levels.iter().map(|&(e, _)| c(e, 0.0)).collect();
        let slopes: Vec<Complex64> = levels.iter().map(|&(_, l)| l).collect();
        let eh = checked_eigenvalues(&f.hamiltonian_at(h));
        // pair each perturbed value with its origin, then difference
        let origin = best_assignment(
            &e0.iter()
                .zip(&slopes)
                .map(|(e, l)| e + l * h)
                .collect::<Vec<_>>(),
            eh.values(),
        );
        let quotients: Vec<Complex64> = (0..levels.len())
            .map(|k| (eh.values()[origin[k]] - e0[k]) / h)
            .collect();
        let err = optimal_matching_error(&quotients, &slopes);
        assert!(
            err <= 1e-4,
            "forward difference error {err} for {}",
            f.graph()
        );
    }
}

#[test]
fn first_order_matches_finite_differences() {
    for f in [
        build_ring(4).unwrap(),
        build_chain(4).unwrap(),
        build_ho2(),
        build_ring(6).unwrap(),
    ] {
        finite_difference_check(&f);
    }
    let mut r = rng(4);
    for _ in 0..20 {
        let n = r.gen_range(2..=6);
        let (f, _) = random_conjugating_lattice(&mut r, n);
        finite_difference_check(&f);
    }
}

#[test]
fn predicted_breaking_shows_in_spectrum() {
    let mut r = rng(6);
    let mut checked = 0;
    for _ in 0..60 {
        let n = r.gen_range(2..=7);
        let (f, _) = random_conjugating_lattice(&mut r, n);
        let report = first_order_corrections(&f).unwrap();
        // nondegenerate levels of a conjugation-symmetric family stay real
        for (cluster, corr) in report.clusters.iter().zip(&report.corrections) {
            if cluster.multiplicity == 1 {
                assert!(corr[0].norm() < 1e-10);
            }
            assert!(corr.iter().all(|z| z.re == 0.0));
        }
        if report.extremely_broken {
            checked += 1;
            let s = checked_eigenvalues(&f.hamiltonian_at(1e-3));
            assert!(classify_reality(&s, 1e-9).pair_count >= 1);
        }
    }
    assert!(checked > 0);
}

#[test]
fn exceptional_point_gap_scales_as_square_root() {
    let f = build_chain(4).unwrap();
    let ep = (5f64.sqrt() - 1.0) / 2.0;
    let gap = |d: f64| checked_eigenvalues(&f.hamiltonian_at(ep - d)).min_gap();
    let c1 = gap(1e-4) / 1e-4f64.sqrt();
    let c2 = gap(1e-6) / 1e-6f64.sqrt();
    let ratio = c1 / c2;
    assert!(
        (1.0 / 1.5..=1.5).contains(&ratio),
        "c(1e-4) = {c1}, c(1e-6) = {c2}"
    );
}

#[test]
fn exceptional_points_are_symmetric_in_gamma() {
    let f = build_chain(4).unwrap();
    let pos = find_exceptional_points(&f, 0.0, 2.0, 64).unwrap();
    let neg = find_exceptional_points(&f, -2.0, 0.0, 64).unwrap();
    assert_eq!(pos.points.len(), 2);
    assert_eq!(neg.points.len(), 2);
    for (a, b) in pos.points.iter().zip(neg.points.iter().rev()) {
        assert!((a.gamma + b.gamma).abs() <= 1e-8);
    }
}

#[test]
fn ho2_is_isospectral_to_chain4() {
    let a = build_chain(4).unwrap();
    let b = build_ho2();
    for g in [0.3, 1.0, 1.7] {
        let sa = checked_eigenvalues(&a.hamiltonian_at(g));
        let sb = checked_eigenvalues(&b.hamiltonian_at(g));
        assert!(multiset_close(sa.values(), sb.values(), 1e-10));
    }
}

fn arb_graph() -> impl Strategy<Value = SiteGraph> {
    (1usize..=7).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let m = pairs.len();
        (
            Just(n),
            Just(pairs),
            proptest::collection::vec(prop_oneof![Just(0.0), -3.0..3.0f64], m),
            proptest::collection::vec(-2.0..2.0f64, n),
        )
            .prop_map(|(n, pairs, ws, sig)| {
                let edges = pairs
                    .into_iter()
                    .zip(ws)
                    .filter(|(_, w)| *w != 0.0)
                    .map(|((i, j), w)| {
                        if (i + j) % 2 == 0 {
                            (j, i, w)
                        } else {
                            (i, j, w)
                        }
                    })
                    .collect();
                SiteGraph::new(n, edges, sig).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_text_round_trips(g in arb_graph()) {
        let text = g.to_json();
        let back = load_graph(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.to_json(), text);
        prop_assert!(back.edges().windows(2).all(|w| (w[0].i, w[0].j) < (w[1].i, w[1].j)));
        prop_assert!(back.edges().iter().all(|e| e.i < e.j));
    }

    #[test]
    fn hamiltonian_is_affine_in_gamma(g in arb_graph(), gamma in -5.0..5.0f64) {
        let f = HamiltonianFamily::new(g);
        let h = f.hamiltonian_at(gamma);
        let h0 = f.hamiltonian_at(0.0);
        let hm = f.hamiltonian_at(-gamma);
        let n = f.n();
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { c(0.0, gamma * f.graph().signature()[i]) } else { c(0.0, 0.0) };
                prop_assert_eq!(h[(i, j)] - h0[(i, j)], expected);
                prop_assert_eq!(h[(i, j)], h[(j, i)]);
                prop_assert_eq!(h[(i, j)].conj(), hm[(i, j)]);
                prop_assert_eq!(h0[(i, j)].im, 0.0);
            }
        }
        let trace: f64 = f.graph().signature().iter().sum();
        prop_assert!((h.trace() - c(0.0, gamma * trace)).norm() <= 1e-12 * (1.0 + gamma.abs() * n as f64));
    }
}
