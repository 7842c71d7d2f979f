//! Permutation symmetries of a lattice family.
//!
//! A site permutation `P` (matrix `U[perm[i]][i] = 1`) is a *commuting*
//! symmetry when `U⁻¹·H(γ)·U = H(γ)` and a *conjugating* one when
//! `U⁻¹·H(γ)·U = H(γ)*`. Conjugating permutations combine with complex
//! conjugation into antiunitary symmetries; the involutive ones are the
//! generalized-parity candidates. Both kinds are symmetries of `H(0)` and
//! together generate its point group.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{HamiltonianFamily, SiteGraph};

/// Largest `n` accepted by the exhaustive `n!` enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 10;
/// Largest `n` accepted by backtracking enumeration.
pub const BACKTRACK_LIMIT: usize = 24;
/// Largest group handled by [`irrep_dimensions`].
pub const IRREP_ORDER_LIMIT: usize = 16;

const MATRIX_CHECK_TOL: f64 = 1e-12;

/// A bijection on sites: `perm[i]` is the image of site `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SitePermutation(Vec<usize>);

impl SitePermutation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::validation(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(Self(perm))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `(self ∘ other)[i] = self[other[i]]`, matching the matrix product `U_self·U_other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Self(inv)
    }

    pub fn order(&self) -> usize {
        let id = Self::identity(self.len());
        let mut acc = self.clone();
        let mut k = 1;
        while acc != id {
            acc = self.compose(&acc);
            k += 1;
        }
        k
    }

    /// Dense permutation matrix with `U[perm[i]][i] = 1`.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut u = vec![vec![0.0; n]; n];
        for (i, &p) in self.0.iter().enumerate() {
            u[p][i] = 1.0;
        }
        u
    }
}

impl fmt::Display for SitePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Calls `visit` on each permutation of `0..n` in lexicographic order.
pub(crate) fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        visit(&p);
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..n)
            .rev()
            .find(|&j| p[j] > p[i - 1])
            .expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Automorphisms by filtering all `n!` permutations. Limited to `n ≤ 10`.
pub fn enumerate_automorphisms_exhaustive(g: &SiteGraph) -> Result<Vec<SitePermutation>> {
    let n = g.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::SizeLimit {
            n,
            limit: EXHAUSTIVE_LIMIT,
            what: "exhaustive automorphisms",
        });
    }
    let w = g.weight_matrix();
    let mut out = Vec::new();
    for_each_permutation(n, |p| {
        if (0..n).all(|i| (0..n).all(|j| w[p[i]][p[j]] == w[i][j])) {
            out.push(SitePermutation(p.to_vec()));
        }
    });
    Ok(out)
}

/// Automorphisms of the weighted coupling graph by backtracking, in
/// lexicographic order of the permutation arrays. Limited to `n ≤ 24`.
pub fn enumerate_automorphisms(g: &SiteGraph) -> Result<Vec<SitePermutation>> {
    let n = g.n();
    if n > BACKTRACK_LIMIT {
        return Err(Error::SizeLimit {
            n,
            limit: BACKTRACK_LIMIT,
            what: "automorphisms",
        });
    }
    let w = g.weight_matrix();
    let search = Matcher::new(&w, &w, None);
    Ok(search.all())
}

/// Backtracking search for bijections `p` with `b[p[i]][p[j]] == a[i][j]`
/// and, optionally, `sb[p[i]] == sa[i]`.
struct Matcher<'a> {
    a: &'a [Vec<f64>],
    b: &'a [Vec<f64>],
    sig: Option<(&'a [f64], &'a [f64])>,
    profile_a: Vec<Vec<u64>>,
    profile_b: Vec<Vec<u64>>,
}

fn weight_profile(w: &[Vec<f64>]) -> Vec<Vec<u64>> {
    w.iter()
        .map(|row| {
            let mut p: Vec<u64> = row
                .iter()
                .filter(|x| **x != 0.0)
                .map(|x| x.to_bits())
                .collect();
            p.sort_unstable();
            p
        })
        .collect()
}

impl<'a> Matcher<'a> {
    fn new(a: &'a [Vec<f64>], b: &'a [Vec<f64>], sig: Option<(&'a [f64], &'a [f64])>) -> Self {
        Self {
            a,
            b,
            sig,
            profile_a: weight_profile(a),
            profile_b: weight_profile(b),
        }
    }

    fn compatible(&self, i: usize, t: usize) -> bool {
        if self.a[i][i] != self.b[t][t] || self.profile_a[i] != self.profile_b[t] {
            return false;
        }
        match self.sig {
            Some((sa, sb)) => sa[i] == sb[t],
            None => true,
        }
    }

    fn all(&self) -> Vec<SitePermutation> {
        let mut out = Vec::new();
        let n = self.a.len();
        let mut perm = vec![0; n];
        let mut used = vec![false; n];
        self.extend(0, &mut perm, &mut used, &mut |p| {
            out.push(SitePermutation(p.to_vec()));
            true
        });
        out
    }

    fn first(&self) -> Option<SitePermutation> {
        let mut found = None;
        let n = self.a.len();
        let mut perm = vec![0; n];
        let mut used = vec![false; n];
        self.extend(0, &mut perm, &mut used, &mut |p| {
            found = Some(SitePermutation(p.to_vec()));
            false
        });
        found
    }

    /// Returns false once `emit` asks to stop.
    fn extend(
        &self,
        i: usize,
        perm: &mut [usize],
        used: &mut [bool],
        emit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let n = self.a.len();
        if i == n {
            return emit(perm);
        }
        for t in 0..n {
            if used[t] || !self.compatible(i, t) {
                continue;
            }
            if (0..i).any(|k| self.b[t][perm[k]] != self.a[i][k]) {
                continue;
            }
            perm[i] = t;
            used[t] = true;
            let go_on = self.extend(i + 1, perm, used, emit);
            used[t] = false;
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// How a permutation acts on the gain/loss signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignatureAction {
    Preserves,
    Negates,
    Mixes,
}

fn signature_action(perm: &SitePermutation, s: &[f64]) -> (bool, bool) {
    let p = perm.as_slice();
    let preserves = (0..s.len()).all(|j| s[p[j]] == s[j]);
    let negates = (0..s.len()).all(|j| s[p[j]] == -s[j]);
    (preserves, negates)
}

/// Classification of a family's permutation symmetries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    /// `U⁻¹HU = H`; always contains the identity.
    pub commuting: Vec<SitePermutation>,
    /// `U⁻¹HU = H*`; each yields the antiunitary symmetry `A = UK`.
    pub conjugating: Vec<SitePermutation>,
    /// Conjugating involutions: generalized-parity candidates.
    pub parities: Vec<SitePermutation>,
    /// Point group of `H(0)`.
    pub group0: GroupInfo,
}

impl SymmetryReport {
    pub fn has_antiunitary_symmetry(&self) -> bool {
        !self.conjugating.is_empty()
    }
}

/// Splits the graph automorphisms by their action on the signature.
pub fn classify_symmetries(f: &HamiltonianFamily) -> Result<SymmetryReport> {
    let autos = enumerate_automorphisms(f.graph())?;
    let s = f.graph().signature();
    let mut commuting = Vec::new();
    let mut conjugating = Vec::new();
    for p in &autos {
        let (pres, neg) = signature_action(p, s);
        if pres {
            commuting.push(p.clone());
        }
        if neg {
            conjugating.push(p.clone());
        }
    }
    let parities = conjugating
        .iter()
        .filter(|p| p.compose(p).is_identity())
        .cloned()
        .collect();
    let mut generators = commuting.clone();
    generators.extend(conjugating.iter().cloned());
    let group0 = build_group(&generators)?;
    Ok(SymmetryReport {
        commuting,
        conjugating,
        parities,
        group0,
    })
}

/// Classifies a single permutation against a family.
pub fn signature_action_of(perm: &SitePermutation, f: &HamiltonianFamily) -> SignatureAction {
    match signature_action(perm, f.graph().signature()) {
        (true, _) => SignatureAction::Preserves,
        (false, true) => SignatureAction::Negates,
        _ => SignatureAction::Mixes,
    }
}

/// `‖U⁻¹·H(γ)·U − H(γ)‖_F` and `‖U⁻¹·H(γ)·U − H(γ)*‖_F`, computed on dense matrices.
pub fn symmetry_residuals(perm: &SitePermutation, f: &HamiltonianFamily, gamma: f64) -> (f64, f64) {
    let h = f.hamiltonian_at(gamma);
    // U⁻¹HU = (U⁻¹)·H·(U⁻¹)⁻¹, i.e. H relabeled by the inverse permutation.
    let t = h.permute(perm.inverse().as_slice());
    (
        t.sub(&h).frobenius_norm(),
        t.sub(&h.conj()).frobenius_norm(),
    )
}

/// Verifies every classified permutation against its matrix identity at `gamma`.
pub fn verify_report(report: &SymmetryReport, f: &HamiltonianFamily, gamma: f64) -> bool {
    report
        .commuting
        .iter()
        .all(|p| symmetry_residuals(p, f, gamma).0 <= MATRIX_CHECK_TOL)
        && report
            .conjugating
            .iter()
            .all(|p| symmetry_residuals(p, f, gamma).1 <= MATRIX_CHECK_TOL)
}

/// A finite permutation group with its multiplication table.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupInfo {
    /// Sorted lexicographically; the identity comes first.
    pub elements: Vec<SitePermutation>,
    /// `table[a][b]` is the index of `elements[a] ∘ elements[b]`.
    pub table: Vec<Vec<usize>>,
    /// Conjugacy classes as sorted index lists, ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Order of each element, aligned with `elements`.
    pub element_orders: Vec<usize>,
    pub irrep_dims: Vec<usize>,
    pub name: String,
    /// True when the input had to be closed under composition.
    pub closure_completed: bool,
}

impl GroupInfo {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_abelian(&self) -> bool {
        let g = self.order();
        (0..g).all(|a| (0..g).all(|b| self.table[a][b] == self.table[b][a]))
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Element orders as a sorted multiset.
    pub fn order_multiset(&self) -> Vec<usize> {
        let mut v = self.element_orders.clone();
        v.sort_unstable();
        v
    }

    /// Index of the inverse of each element.
    pub fn inverses(&self) -> Vec<usize> {
        let g = self.order();
        (0..g)
            .map(|a| {
                (0..g)
                    .find(|&b| self.table[a][b] == 0)
                    .expect("group has inverses")
            })
            .collect()
    }

    /// Order of the commutator subgroup `[G, G]`.
    fn derived_order(&self) -> usize {
        let g = self.order();
        let inv = self.inverses();
        let mut members = vec![false; g];
        members[0] = true;
        for a in 0..g {
            for b in 0..g {
                let c = self.table[self.table[inv[a]][inv[b]]][self.table[a][b]];
                members[c] = true;
            }
        }
        // close under products
        loop {
            let current: Vec<usize> = (0..g).filter(|&x| members[x]).collect();
            let mut grew = false;
            for &x in &current {
                for &y in &current {
                    let z = self.table[x][y];
                    if !members[z] {
                        members[z] = true;
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        members.iter().filter(|&&m| m).count()
    }
}

/// Builds the group generated by `perms`, completing the closure if the input
/// is not already a group. The closure may grow to at most `2·|input|`
/// elements (distinct, identity included).
pub fn build_group(perms: &[SitePermutation]) -> Result<GroupInfo> {
    let Some(first) = perms.first() else {
        return Err(Error::validation("cannot build a group from an empty set"));
    };
    let n = first.len();
    if perms.iter().any(|p| p.len() != n) {
        return Err(Error::validation(
            "permutations act on different site counts",
        ));
    }
    let mut elements: Vec<SitePermutation> = perms.to_vec();
    elements.sort();
    elements.dedup();
    let input_len = elements.len();
    let limit = 2 * input_len;

    let mut closure_completed = false;
    if elements
        .binary_search(&SitePermutation::identity(n))
        .is_err()
    {
        elements.push(SitePermutation::identity(n));
        closure_completed = true;
    }
    let mut index: HashMap<SitePermutation, usize> = elements
        .iter()
        .cloned()
        .enumerate()
        .map(|(k, p)| (p, k))
        .collect();
    let mut k = 0;
    while k < elements.len() {
        for j in 0..=k {
            for (x, y) in [(k, j), (j, k)] {
                let prod = elements[x].compose(&elements[y]);
                if !index.contains_key(&prod) {
                    closure_completed = true;
                    index.insert(prod.clone(), elements.len());
                    elements.push(prod);
                    if elements.len() > limit.max(1) {
                        return Err(Error::RunawayClosure { limit });
                    }
                }
            }
        }
        k += 1;
    }

    elements.sort();
    let index: HashMap<&SitePermutation, usize> =
        elements.iter().enumerate().map(|(k, p)| (p, k)).collect();
    let g = elements.len();
    let table: Vec<Vec<usize>> = (0..g)
        .map(|a| {
            (0..g)
                .map(|b| index[&elements[a].compose(&elements[b])])
                .collect()
        })
        .collect();
    let inv: Vec<usize> = elements.iter().map(|p| index[&p.inverse()]).collect();

    let mut class_of = vec![usize::MAX; g];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for x in 0..g {
        if class_of[x] != usize::MAX {
            continue;
        }
        let mut members: Vec<usize> = (0..g).map(|y| table[table[y][x]][inv[y]]).collect();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            class_of[m] = classes.len();
        }
        classes.push(members);
    }
    let element_orders = elements.iter().map(SitePermutation::order).collect();

    let mut info = GroupInfo {
        elements,
        table,
        classes,
        element_orders,
        irrep_dims: Vec::new(),
        name: String::new(),
        closure_completed,
    };
    if info.order() <= IRREP_ORDER_LIMIT {
        info.irrep_dims = irrep_dimensions(&info)?;
    }
    info.name = identify_group(&info);
    Ok(info)
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|&d| n.is_multiple_of(d)).collect()
}

/// All non-increasing multisets of `count` values from `allowed` whose
/// squares sum to `target`.
fn square_partitions(target: usize, count: usize, allowed: &[usize]) -> Vec<Vec<usize>> {
    fn go(
        target: usize,
        count: usize,
        max_idx: usize,
        allowed: &[usize],
        acc: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if count == 0 {
            if target == 0 {
                let mut v = acc.clone();
                v.reverse();
                out.push(v);
            }
            return;
        }
        for idx in (0..=max_idx).rev() {
            let d = allowed[idx];
            let sq = d * d;
            // remaining count−1 entries contribute at least 1 each
            if sq + (count - 1) > target {
                continue;
            }
            if sq * count < target {
                break;
            }
            acc.push(d);
            go(target - sq, count - 1, idx, allowed, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if allowed.is_empty() {
        return out;
    }
    go(
        target,
        count,
        allowed.len() - 1,
        allowed,
        &mut Vec::new(),
        &mut out,
    );
    out.sort();
    out
}

/// Irreducible-representation dimensions from `|G|` and the class count.
///
/// Searches every multiset of `|classes|` divisors of `|G|` with `Σd² = |G|`
/// that contains the trivial representation. If several remain, the number of
/// one-dimensional irreps is pinned to `|G/[G,G]|`. Still ambiguous → error.
pub fn irrep_dimensions(g: &GroupInfo) -> Result<Vec<usize>> {
    let order = g.order();
    if order > IRREP_ORDER_LIMIT {
        return Err(Error::SizeLimit {
            n: order,
            limit: IRREP_ORDER_LIMIT,
            what: "irrep dimensions",
        });
    }
    let classes = g.class_count();
    let candidates: Vec<Vec<usize>> = square_partitions(order, classes, &divisors(order))
        .into_iter()
        .filter(|c| c.contains(&1))
        .collect();
    if candidates.len() == 1 {
        return Ok(candidates[0].clone());
    }
    let linear = order / g.derived_order();
    let narrowed: Vec<Vec<usize>> = candidates
        .iter()
        .filter(|c| c.iter().filter(|&&d| d == 1).count() == linear)
        .cloned()
        .collect();
    if narrowed.len() == 1 {
        return Ok(narrowed[0].clone());
    }
    Err(Error::AmbiguousIrreps {
        order,
        classes,
        candidates,
    })
}

/// Label for groups of order ≤ 8, matched on (order, abelian, element-order
/// multiset); "unidentified" otherwise.
pub fn identify_group(g: &GroupInfo) -> String {
    let order = g.order();
    let abelian = g.is_abelian();
    let orders = g.order_multiset();
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for o in &orders {
        *histogram.entry(*o).or_default() += 1;
    }
    let count = |k: usize| histogram.get(&k).copied().unwrap_or(0);
    let cyclic = count(order) > 0;

    let name = match (order, abelian) {
        (1, _) => "C1",
        (2, _) | (3, _) | (5, _) | (7, _) => match order {
            2 => "C2",
            3 => "C3",
            5 => "C5",
            _ => "C7",
        },
        (4, true) if cyclic => "C4",
        (4, true) if count(2) == 3 => "C2 × C2",
        (6, true) if cyclic => "C6",
        (6, false) if count(2) == 3 && count(3) == 2 => "D3 (≅ C3v)",
        (8, true) if cyclic => "C8",
        (8, true) if count(2) == 3 && count(4) == 4 => "C4 × C2",
        (8, true) if count(2) == 7 => "C2 × C2 × C2",
        (8, false) if count(2) == 5 && count(4) == 2 => "D4 (≅ C4v)",
        (8, false) if count(2) == 1 && count(4) == 6 => "Q8",
        _ => "unidentified",
    };
    name.to_string()
}

/// First permutation `P` (lexicographically) with `P·H_a(γ)·P⁻¹ = H_b(γ)` for all `γ`.
pub fn find_relabeling(
    a: &HamiltonianFamily,
    b: &HamiltonianFamily,
) -> Result<Option<SitePermutation>> {
    let n = a.n();
    if b.n() != n {
        return Err(Error::validation(format!(
            "families have different sizes ({n} vs {})",
            b.n()
        )));
    }
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::SizeLimit {
            n,
            limit: EXHAUSTIVE_LIMIT,
            what: "relabeling search",
        });
    }
    if a.graph().edges().len() != b.graph().edges().len() {
        return Ok(None);
    }
    let wa = a.graph().weight_matrix();
    let wb = b.graph().weight_matrix();
    let matcher = Matcher::new(
        &wa,
        &wb,
        Some((a.graph().signature(), b.graph().signature())),
    );
    let Some(p) = matcher.first() else {
        return Ok(None);
    };
    // H is affine in γ, so agreement at two points is agreement everywhere.
    for gamma in [0.0, 1.0] {
        let lhs = a.hamiltonian_at(gamma).permute(p.as_slice());
        if lhs.sub(&b.hamiltonian_at(gamma)).frobenius_norm() > MATRIX_CHECK_TOL {
            return Err(Error::validation("relabeling failed matrix verification"));
        }
    }
    Ok(Some(p))
}
