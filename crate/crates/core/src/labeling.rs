//! Oriented beta-labelings and the classical labelings they imply.
//!
//! A relabelling `σ` of a functional tree `g` is an oriented beta-labeling when
//! the signed differences `(-1)^{d_h(v)} (h(v) - v)` of `h = σ g σ^{-1}`
//! enumerate `Z_n` exactly once. Even-depth vertices form the A side, odd-depth
//! vertices the B side, and every non-loop edge then climbs from a smaller A
//! label to a larger B label.

use std::fmt;
use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::tree::FunctionalTree;

pub const DEFAULT_SEARCH_CAP: usize = 16;
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    pub sigma: Permutation,
    /// The relabelled map `σ ∘ g ∘ σ^{-1}`.
    pub h: FunctionalTree,
    /// `signed_labels[v] = (-1)^{d_h(v)} (h(v) - v)`, indexed by vertices of `h`.
    pub signed_labels: Vec<usize>,
    /// `γ(v) = signed_labels[v]`, so that `h(v) = v + (-1)^{d_h(v)} γ(v)`.
    pub gamma: Permutation,
}

impl Labeling {
    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    /// Vertex labels on the even-depth side (the side of the root).
    pub fn a_labels(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.h.depth(v).is_multiple_of(2)).collect()
    }

    pub fn b_labels(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.h.depth(v) % 2 == 1).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaFailure {
    /// Signed labels hit by more than one vertex of `h`, with those vertices.
    pub duplicated: Vec<(i64, Vec<usize>)>,
    /// Vertices of `h` whose signed label falls outside `Z_n`.
    pub out_of_range: Vec<(usize, i64)>,
}

impl fmt::Display for BetaFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dups: Vec<String> = self
            .duplicated
            .iter()
            .map(|(l, vs)| format!("label {l} at vertices {vs:?}"))
            .collect();
        let out: Vec<String> = self
            .out_of_range
            .iter()
            .map(|(v, l)| format!("vertex {v} has label {l}"))
            .collect();
        write!(
            f,
            "duplicated: [{}]; out of range: [{}]",
            dups.join(", "),
            out.join(", ")
        )
    }
}

/// Signed edge labels of `h = σ g σ^{-1}`, indexed by vertices of `h`.
fn signed_labels(t: &FunctionalTree, sigma: &Permutation) -> Vec<i64> {
    let mut labels = vec![0i64; t.n()];
    for v in 0..t.n() {
        labels[sigma[v]] = t.sign(v) * (sigma[t.parent(v)] as i64 - sigma[v] as i64);
    }
    labels
}

fn check_degree(t: &FunctionalTree, sigma: &Permutation) -> Result<()> {
    if sigma.len() != t.n() {
        return Err(Error::InvalidPermutation(format!(
            "permutation of degree {} for a tree on {} vertices",
            sigma.len(),
            t.n()
        )));
    }
    Ok(())
}

/// Fast membership test for `Φ(g)`.
pub fn is_beta(t: &FunctionalTree, sigma: &Permutation) -> bool {
    let n = t.n();
    let mut seen = vec![false; n];
    (0..n).all(|v| {
        let label = t.sign(v) * (sigma[t.parent(v)] as i64 - sigma[v] as i64);
        (0..n as i64).contains(&label) && !std::mem::replace(&mut seen[label as usize], true)
    })
}

/// Checks `σ` against the oriented beta condition.
///
/// Returns [`Error::NotBetaLabeling`] with the offending vertices when the
/// signed labels miss `Z_n`.
pub fn verify_beta(t: &FunctionalTree, sigma: &Permutation) -> Result<Labeling> {
    check_degree(t, sigma)?;
    let n = t.n();
    let labels = signed_labels(t, sigma);
    let mut failure = BetaFailure::default();
    let mut hits: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, &l) in labels.iter().enumerate() {
        if (0..n as i64).contains(&l) {
            hits[l as usize].push(v);
        } else {
            failure.out_of_range.push((v, l));
        }
    }
    for (l, vs) in hits.into_iter().enumerate() {
        if vs.len() > 1 {
            failure.duplicated.push((l as i64, vs));
        }
    }
    if !failure.duplicated.is_empty() || !failure.out_of_range.is_empty() {
        return Err(Error::NotBetaLabeling(failure));
    }
    let signed_labels: Vec<usize> = labels.into_iter().map(|l| l as usize).collect();
    Ok(Labeling {
        sigma: sigma.clone(),
        h: t.conjugate(sigma)?,
        gamma: Permutation::new(signed_labels.clone())?,
        signed_labels,
    })
}

/// `{ |h(v) - v| }` equals `Z_n`.
pub fn verify_graceful(t: &FunctionalTree, sigma: &Permutation) -> Result<bool> {
    check_degree(t, sigma)?;
    let n = t.n();
    let mut seen = vec![false; n];
    Ok((0..n).all(|v| {
        let d = sigma[t.parent(v)].abs_diff(sigma[v]);
        d < n && !std::mem::replace(&mut seen[d], true)
    }))
}

/// Rosa's ρ condition for a graph with `edges.len()` edges: `labels` is an
/// injection into `{0, .., 2m}` whose wrapped edge differences are distinct.
pub fn verify_rho(edges: &[(usize, usize)], labels: &[usize]) -> Result<bool> {
    let m = edges.len();
    let modulus = 2 * m + 1;
    let mut used = vec![false; modulus];
    for (v, &l) in labels.iter().enumerate() {
        if l >= modulus {
            return Err(Error::MalformedInput(format!(
                "label {l} of vertex {v} exceeds 2m = {}",
                modulus - 1
            )));
        }
        if std::mem::replace(&mut used[l], true) {
            return Err(Error::MalformedInput(format!("label {l} is used twice")));
        }
    }
    let mut seen = vec![false; m + 1];
    for &(a, b) in edges {
        let (Some(&la), Some(&lb)) = (labels.get(a), labels.get(b)) else {
            return Err(Error::MalformedInput(format!("edge ({a}, {b}) has an unlabelled end")));
        };
        let d = la.abs_diff(lb);
        let wrapped = d.min(modulus - d);
        if wrapped == 0 || std::mem::replace(&mut seen[wrapped], true) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every `σ ∈ S_n` passing [`verify_beta`], in lexicographic order, by
/// exhaustive filtering of `S_n`.
pub fn phi_set(t: &FunctionalTree) -> Result<Vec<Permutation>> {
    phi_set_capped(t, DEFAULT_EXHAUSTIVE_CAP)
}

pub fn phi_set_capped(t: &FunctionalTree, cap: usize) -> Result<Vec<Permutation>> {
    if t.n() > cap {
        return Err(Error::limit("exhaustive Φ(g) enumeration", t.n(), cap));
    }
    Ok(Permutation::all(t.n()).filter(|s| is_beta(t, s)).collect())
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub cap: usize,
    /// Enables randomized restarts with a growing node budget; the final
    /// attempt is always the exhaustive deterministic search.
    pub seed: Option<u64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            cap: DEFAULT_SEARCH_CAP,
            seed: None,
        }
    }
}

/// Finds one oriented beta-labeling by backtracking.
pub fn find_beta(t: &FunctionalTree) -> Result<Labeling> {
    find_beta_with(t, &SearchOptions::default())
}

pub fn find_beta_with(t: &FunctionalTree, opts: &SearchOptions) -> Result<Labeling> {
    if t.n() > opts.cap {
        return Err(Error::limit("labeling search", t.n(), opts.cap));
    }
    let mut found = None;
    if let Some(seed) = opts.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut budget = 1_000 * t.n() as u64;
        for _ in 0..16 {
            found = first_labeling(Search::new(t, Some(&mut rng), Some(budget)));
            if found.is_some() {
                break;
            }
            budget *= 2;
        }
    }
    if found.is_none() {
        found = first_labeling(Search::new(t, None, None));
    }
    let sigma = found.ok_or(Error::NotFound)?;
    verify_beta(t, &Permutation::new(sigma)?)
}

fn first_labeling(mut search: Search<'_>) -> Option<Vec<usize>> {
    let mut found = None;
    let _ = search.run(&mut |sigma: &[usize]| {
        found = Some(sigma.to_vec());
        ControlFlow::Break(())
    });
    found
}

/// Every oriented beta-labeling reachable by the backtracking search, sorted
/// by `σ`. Agrees with [`phi_set`] where both apply.
pub fn find_all_beta(t: &FunctionalTree) -> Result<Vec<Labeling>> {
    find_all_beta_capped(t, DEFAULT_SEARCH_CAP)
}

pub fn find_all_beta_capped(t: &FunctionalTree, cap: usize) -> Result<Vec<Labeling>> {
    if t.n() > cap {
        return Err(Error::limit("labeling search", t.n(), cap));
    }
    let mut all = Vec::new();
    let _ = Search::new(t, None, None).run(&mut |sigma: &[usize]| {
        all.push(sigma.to_vec());
        ControlFlow::Continue(())
    });
    if all.is_empty() {
        return Err(Error::NotFound);
    }
    all.sort_unstable();
    all.into_iter().map(|s| verify_beta(t, &Permutation::new(s)?)).collect()
}

const UNSET: usize = usize::MAX;

/// Backtracking over vertex labels in BFS order from the root. Each non-root
/// vertex receives its label through the edge label of its parent edge, tried
/// from the largest (rarest) down.
struct Search<'r> {
    n: usize,
    order: Vec<usize>,
    parent: Vec<usize>,
    on_b_side: Vec<bool>,
    label: Vec<usize>,
    label_used: Vec<bool>,
    edge_used: Vec<bool>,
    rng: Option<&'r mut ChaCha8Rng>,
    budget: Option<u64>,
    nodes: u64,
}

impl<'r> Search<'r> {
    fn new(t: &FunctionalTree, rng: Option<&'r mut ChaCha8Rng>, budget: Option<u64>) -> Self {
        let n = t.n();
        let mut order = vec![t.root()];
        let mut i = 0;
        while i < order.len() {
            order.extend(t.children(order[i]));
            i += 1;
        }
        Search {
            n,
            order,
            parent: t.parent_map().to_vec(),
            on_b_side: (0..n).map(|v| t.depth(v) % 2 == 1).collect(),
            label: vec![UNSET; n],
            label_used: vec![false; n],
            edge_used: vec![false; n],
            rng,
            budget,
            nodes: 0,
        }
    }

    fn run(&mut self, sink: &mut impl FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        self.descend(0, sink)
    }

    /// 0 belongs on the A side and `n - 1` on the B side: the edge labelled
    /// `n - 1` must join them.
    fn admissible(&self, v: usize, l: usize) -> bool {
        if self.label_used[l] {
            return false;
        }
        if self.n >= 2 {
            if l == 0 && self.on_b_side[v] {
                return false;
            }
            if l == self.n - 1 && !self.on_b_side[v] {
                return false;
            }
        }
        true
    }

    fn descend(&mut self, k: usize, sink: &mut impl FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        if k == self.n {
            return sink(&self.label);
        }
        self.nodes += 1;
        if let Some(b) = self.budget {
            if self.nodes > b {
                return ControlFlow::Break(());
            }
        }
        let v = self.order[k];
        if k == 0 {
            let mut roots: Vec<usize> = (0..self.n).collect();
            if let Some(rng) = self.rng.as_deref_mut() {
                roots.shuffle(rng);
            }
            for l in roots {
                if !self.admissible(v, l) {
                    continue;
                }
                self.assign(v, l, 0);
                let flow = self.descend(1, sink);
                self.unassign(v, l, 0);
                flow?;
            }
            return ControlFlow::Continue(());
        }
        let base = self.label[self.parent[v]];
        let mut edge_labels: Vec<usize> = (1..self.n).rev().filter(|&d| !self.edge_used[d]).collect();
        if let Some(rng) = self.rng.as_deref_mut() {
            edge_labels.shuffle(rng);
        }
        for d in edge_labels {
            let l = if self.on_b_side[v] {
                base + d
            } else if base >= d {
                base - d
            } else {
                continue;
            };
            if l >= self.n || !self.admissible(v, l) {
                continue;
            }
            self.assign(v, l, d);
            let flow = self.descend(k + 1, sink);
            self.unassign(v, l, d);
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn assign(&mut self, v: usize, l: usize, d: usize) {
        self.label[v] = l;
        self.label_used[l] = true;
        self.edge_used[d] = true;
    }

    fn unassign(&mut self, v: usize, l: usize, d: usize) {
        self.label[v] = UNSET;
        self.label_used[l] = false;
        self.edge_used[d] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;

    fn tree(g: &[usize]) -> FunctionalTree {
        FunctionalTree::from_parent_map(g.len(), g.to_vec()).unwrap()
    }

    fn perm(p: &[usize]) -> Permutation {
        Permutation::new(p.to_vec()).unwrap()
    }

    #[test]
    fn worked_labeling_signed_labels() {
        let lab = verify_beta(&tree(&[0, 0, 1, 1]), &perm(&[0, 3, 2, 1])).unwrap();
        assert_eq!(lab.h.parent_map(), &[0, 3, 3, 0]);
        assert_eq!(lab.signed_labels, vec![0, 2, 1, 3]);
        assert_eq!(lab.signed_labels[lab.h.root()], 0);
    }

    #[test]
    fn star_with_identity_is_beta() {
        let lab = verify_beta(&tree(&[0; 6]), &Permutation::identity(6)).unwrap();
        assert_eq!(lab.signed_labels, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn path_with_identity_fails() {
        let err = verify_beta(&tree(&[0, 0, 1]), &Permutation::identity(3)).unwrap_err();
        let Error::NotBetaLabeling(report) = err else {
            panic!("unexpected {err}")
        };
        assert_eq!(report.out_of_range, vec![(2, -1)]);
    }

    #[test]
    fn wrong_degree_is_rejected() {
        assert!(matches!(
            verify_beta(&tree(&[0, 0, 1]), &Permutation::identity(2)),
            Err(Error::InvalidPermutation(_))
        ));
    }

    #[test]
    fn expansion_form_holds() {
        let lab = verify_beta(&tree(&[0, 0, 1, 1]), &perm(&[0, 3, 2, 1])).unwrap();
        for v in 0..4 {
            let sign = lab.h.sign(v);
            assert_eq!(lab.h.parent(v) as i64, v as i64 + sign * lab.gamma[v] as i64);
        }
    }

    #[test]
    fn find_examples() {
        let path = tree(&[0, 0, 1]);
        assert!(is_beta(&path, &perm(&[0, 2, 1])));
        let found = find_beta(&path).unwrap();
        assert!(is_beta(&path, &found.sigma));
        assert!(find_beta(&tree(&[0])).unwrap().sigma.is_identity());
        assert!(find_beta(&tree(&[0, 0])).unwrap().sigma.is_identity());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_set(&tree(&[0, 0])).unwrap(), vec![Permutation::identity(2)]);
        assert_eq!(phi_set(&tree(&[0])).unwrap(), vec![Permutation::identity(1)]);
        assert!(phi_set(&tree(&[0, 0, 1, 1])).unwrap().contains(&perm(&[0, 3, 2, 1])));
        assert!(matches!(phi_set(&tree(&[0; 10])), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn graceful_examples() {
        assert!(verify_graceful(&tree(&[0; 5]), &Permutation::identity(5)).unwrap());
        assert!(!verify_graceful(&tree(&[0, 0, 1]), &Permutation::identity(3)).unwrap());
    }

    #[test]
    fn rho_examples() {
        assert!(verify_rho(&[(0, 1)], &[0, 1]).unwrap());
        assert!(!verify_rho(&[(0, 1), (1, 2)], &[0, 1, 2]).unwrap());
        assert!(verify_rho(&[(0, 1)], &[0, 0]).is_err());
        assert!(verify_rho(&[(0, 1)], &[0, 3]).is_err());
    }

    #[test]
    fn rho_accepts_wraparound() {
        // K_5 vertex labels {0, 1, 4}: differences 1 and 4 ≡ -1 collide
        assert!(!verify_rho(&[(0, 1), (0, 2)], &[0, 1, 4]).unwrap());
        assert!(verify_rho(&[(0, 1), (0, 2)], &[0, 1, 3]).unwrap());
    }

    #[test]
    fn backtracking_agrees_with_exhaustive_filtering() {
        for n in 1..=7 {
            for entry in catalog(n).unwrap() {
                let t = &entry.tree;
                let by_search: Vec<Permutation> = find_all_beta(t).unwrap().into_iter().map(|l| l.sigma).collect();
                assert_eq!(by_search, phi_set(t).unwrap(), "tree {t:?}");
            }
        }
    }

    #[test]
    fn beta_implies_graceful_and_near_alpha() {
        for n in 1..=8 {
            for entry in catalog(n).unwrap() {
                let t = &entry.tree;
                for lab in find_all_beta(t).unwrap() {
                    assert!(verify_graceful(t, &lab.sigma).unwrap());
                    assert_eq!(lab.h.depth(0) % 2, 0, "label 0 sits on the A side");
                    for (v, p) in lab.h.edges() {
                        let (a, b) = if lab.h.depth(v) % 2 == 0 { (v, p) } else { (p, v) };
                        assert!(a < b, "A label {a} not below B label {b} in {t:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn seeded_search_is_deterministic_and_valid() {
        for entry in catalog(9).unwrap().iter().take(12) {
            let opts = SearchOptions {
                seed: Some(7),
                ..SearchOptions::default()
            };
            let a = find_beta_with(&entry.tree, &opts).unwrap();
            let b = find_beta_with(&entry.tree, &opts).unwrap();
            assert_eq!(a, b);
            assert!(is_beta(&entry.tree, &a.sigma));
        }
    }

    #[test]
    fn labelings_follow_the_underlying_tree_under_conjugation() {
        for entry in catalog(6).unwrap() {
            let tau = Permutation::new(vec![5, 3, 4, 0, 1, 2]).unwrap();
            let relabelled = entry.tree.conjugate(&tau).unwrap();
            let lab = find_beta(&relabelled).unwrap();
            assert_eq!(lab.h.canonical_code(), entry.canonical_code);
        }
    }

    #[test]
    fn search_cap() {
        let opts = SearchOptions { cap: 4, seed: None };
        assert!(matches!(
            find_beta_with(&tree(&[0; 5]), &opts),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
