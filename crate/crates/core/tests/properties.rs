use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use functree::apportion::{build_block_unitary, spectrum_gap};
use functree::certificate::{nonvanishing_by_sweep, nonvanishing_full_lattice, nonzero_off_permutations};
use functree::decomposition::{decompose_directed_knn, orient};
use functree::group::sigma_from_labeled_tree;
use functree::labeling::{find_beta, find_beta_with, is_beta, verify_graceful, SearchOptions};
use functree::poly::DensePolynomial;
use functree::{catalog, FunctionalTree, Permutation};

/// A random tree with parents below each vertex, relabelled by a random
/// permutation so that the root and labels are arbitrary.
fn arb_tree(max_n: usize) -> impl Strategy<Value = FunctionalTree> {
    (1..=max_n)
        .prop_flat_map(|n| {
            let parents: Vec<BoxedStrategy<usize>> = (1..n).map(|v| (0..v).boxed()).collect();
            (parents, Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        })
        .prop_map(|(parents, relabel)| {
            let n = relabel.len();
            let mut g = vec![0; n];
            for (v, p) in parents.into_iter().enumerate() {
                g[v + 1] = p;
            }
            let base = FunctionalTree::from_parent_map(n, g).unwrap();
            base.conjugate(&Permutation::new(relabel).unwrap()).unwrap()
        })
}

fn arb_tree_and_perm(max_n: usize) -> impl Strategy<Value = (FunctionalTree, Permutation)> {
    arb_tree(max_n).prop_flat_map(|t| {
        let n = t.n();
        (Just(t), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
            .prop_map(|(t, p)| (t, Permutation::new(p).unwrap()))
    })
}

fn undirected_edges(t: &FunctionalTree) -> Vec<(usize, usize)> {
    let mut e: Vec<_> = t.edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
    e.sort_unstable();
    e
}

proptest! {
    #[test]
    fn conjugation_preserves_canonical_code((t, sigma) in arb_tree_and_perm(6)) {
        let h = t.conjugate(&sigma).unwrap();
        prop_assert_eq!(h.canonical_code(), t.canonical_code());
        prop_assert_eq!(h.root(), sigma[t.root()]);
        prop_assert_eq!(h.conjugate(&sigma.inverse()).unwrap(), t);
    }

    #[test]
    fn reroot_keeps_the_free_tree(t in arb_tree(7), r in 0usize..7) {
        let r = r % t.n();
        let s = t.reroot(r).unwrap();
        prop_assert_eq!(s.root(), r);
        prop_assert_eq!(undirected_edges(&s), undirected_edges(&t));
        prop_assert_eq!(s.canonical_code(), t.canonical_code());
        prop_assert_eq!(s.reroot(t.root()).unwrap(), t);
    }

    #[test]
    fn found_labelings_are_beta_and_graceful(t in arb_tree(9), seed in any::<u64>()) {
        let lab = find_beta_with(&t, &SearchOptions { seed: Some(seed), ..SearchOptions::default() }).unwrap();
        prop_assert!(is_beta(&t, &lab.sigma));
        prop_assert!(verify_graceful(&t, &lab.sigma).unwrap());
        let o = orient(&lab.h);
        prop_assert_eq!(o.to_functional_tree().unwrap(), lab.h.clone());
    }

    #[test]
    fn polynomial_evaluation_is_a_ring_map(
        a in proptest::collection::vec((0u32..3, 0u32..3, -5i64..5), 0..6),
        b in proptest::collection::vec((0u32..3, 0u32..3, -5i64..5), 0..6),
        point in proptest::collection::vec(-3i64..4, 2),
    ) {
        let build = |terms: &[(u32, u32, i64)]| {
            DensePolynomial::from_terms(
                2,
                terms.iter().map(|&(i, j, c)| (vec![i, j], BigRational::from_integer(BigInt::from(c)))),
            )
            .unwrap()
        };
        let (p, q) = (build(&a), build(&b));
        let z: Vec<BigRational> = point.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect();
        let lattice: Vec<usize> = point.iter().map(|&v| v.rem_euclid(2) as usize).collect();
        prop_assert_eq!(p.add(&q).unwrap().eval(&z), p.eval(&z) + q.eval(&z));
        // products are reduced modulo x(x-1), which is exact on {0, 1}
        prop_assert_eq!(p.mul(&q).unwrap().eval_lattice(&lattice), p.eval_lattice(&lattice) * q.eval_lattice(&lattice));
    }
}

#[test]
fn certificate_vanishes_off_permutations() {
    for n in 1..=5 {
        for e in catalog(n).unwrap() {
            assert_eq!(nonzero_off_permutations(&e.tree).unwrap(), None, "{:?}", e.tree);
        }
    }
}

#[test]
fn lattice_and_permutation_sweeps_agree() {
    for n in 1..=5 {
        for e in catalog(n).unwrap() {
            let t = &e.tree;
            assert_eq!(
                nonvanishing_full_lattice(t).unwrap(),
                nonvanishing_by_sweep(t).unwrap(),
                "{t:?}"
            );
            assert!(nonvanishing_by_sweep(t).unwrap());
        }
    }
}

#[test]
fn entry_permutation_columns_are_copies() {
    for n in 1..=6 {
        for e in catalog(n).unwrap() {
            let lab = find_beta(&e.tree).unwrap();
            let sigma = sigma_from_labeled_tree(&e.tree, &lab).unwrap();
            let d = decompose_directed_knn(&e.tree, &lab).unwrap();
            let r = lab.h.root();
            for j in 0..n {
                assert_eq!(sigma.column_edges(j), d.copies[(j + n - r) % n]);
            }
        }
    }
}

#[test]
fn block_unitary_up_to_twelve() {
    for n in 1..=12 {
        let residual = build_block_unitary(n).unitarity_residual().unwrap();
        assert!(residual <= 1e-9, "n = {n}: {residual:e}");
    }
}

#[test]
fn apportionment_preserves_the_spectrum() {
    for n in 1..=6 {
        for e in catalog(n).unwrap() {
            let lab = find_beta(&e.tree).unwrap();
            let gap = spectrum_gap(&e.tree, &lab.sigma).unwrap();
            assert!(gap <= 1e-7, "{:?}: {gap:e}", e.tree);
        }
    }
}
