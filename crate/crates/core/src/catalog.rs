//! One representative per isomorphism class of free trees.
//!
//! Generation walks canonical level sequences in the constant-amortized-time
//! order of Wright, Richmond, Odlyzko and McKay; each emitted tree is then
//! relabelled into its canonical centroid rooting.

use crate::error::{Error, Result};
use crate::tree::{from_level_sequence, CanonicalCode, FunctionalTree};

pub const DEFAULT_CATALOG_CAP: usize = 18;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeCatalogEntry {
    pub tree: FunctionalTree,
    pub canonical_code: CanonicalCode,
    pub index: usize,
}

/// Streams every free tree on `n` vertices, rooted at its canonical centroid.
pub fn enumerate_free_trees(n: usize) -> Result<FreeTrees> {
    enumerate_free_trees_capped(n, DEFAULT_CATALOG_CAP)
}

pub fn enumerate_free_trees_capped(n: usize, cap: usize) -> Result<FreeTrees> {
    if n == 0 {
        return Err(Error::MalformedInput("trees need at least one vertex".into()));
    }
    if n > cap {
        return Err(Error::limit("free tree enumeration", n, cap));
    }
    let layout = if n <= 2 {
        (0..n).collect()
    } else {
        // path rooted at its center
        (0..=n / 2).chain(1..n.div_ceil(2)).collect()
    };
    Ok(FreeTrees {
        layout: Some(layout),
        index: 0,
    })
}

/// Collects the catalog for `n` in generation order.
pub fn catalog(n: usize) -> Result<Vec<TreeCatalogEntry>> {
    Ok(enumerate_free_trees(n)?.collect())
}

pub struct FreeTrees {
    layout: Option<Vec<usize>>,
    index: usize,
}

impl Iterator for FreeTrees {
    type Item = TreeCatalogEntry;

    fn next(&mut self) -> Option<TreeCatalogEntry> {
        let candidate = self.layout.take()?;
        let layout = if candidate.len() <= 2 {
            candidate
        } else {
            next_tree(candidate)?
        };
        if layout.len() > 2 {
            self.layout = next_rooted_tree(&layout, None);
        }
        let tree = from_level_sequence(&layout)
            .expect("generator emits valid level sequences")
            .canonical_form();
        let entry = TreeCatalogEntry {
            canonical_code: tree.canonical_code(),
            tree,
            index: self.index,
        };
        self.index += 1;
        Some(entry)
    }
}

/// Successor of a rooted level sequence, optionally restarting at position `p`.
fn next_rooted_tree(pred: &[usize], p: Option<usize>) -> Option<Vec<usize>> {
    let p = match p {
        Some(p) => p,
        None => {
            let mut p = pred.len() - 1;
            while pred[p] == 1 {
                p -= 1;
            }
            p
        }
    };
    if p == 0 {
        return None;
    }
    let mut q = p - 1;
    while pred[q] != pred[p] - 1 {
        q -= 1;
    }
    let mut next = pred.to_vec();
    for i in p..next.len() {
        next[i] = next[i - p + q];
    }
    Some(next)
}

/// Splits a layout into the first subtree of the root (levels shifted up by
/// one) and the rest of the tree.
fn split_tree(layout: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let m = layout
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d == 1)
        .nth(1)
        .map_or(layout.len(), |(i, _)| i);
    let left = layout[1..m].iter().map(|d| d - 1).collect();
    let rest = std::iter::once(0).chain(layout[m..].iter().copied()).collect();
    (left, rest)
}

fn next_tree(candidate: Vec<usize>) -> Option<Vec<usize>> {
    let (left, rest) = split_tree(&candidate);
    let left_height = left.iter().copied().max().unwrap_or(0);
    let rest_height = rest.iter().copied().max().unwrap_or(0);
    let mut valid = rest_height >= left_height;
    if valid && rest_height == left_height && (left.len() > rest.len() || (left.len() == rest.len() && left > rest)) {
        valid = false;
    }
    if valid {
        return Some(candidate);
    }
    let p = left.len();
    let mut next = next_rooted_tree(&candidate, Some(p))?;
    if candidate[p] > 2 {
        let (new_left, _) = split_tree(&next);
        let height = new_left.iter().copied().max().unwrap_or(0);
        let len = next.len();
        for (slot, level) in next[len - (height + 1)..].iter_mut().zip(1..) {
            *slot = level;
        }
    }
    Some(next)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    /// Decodes a Prüfer sequence into the edge list of a labelled tree.
    fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
        let mut degree = vec![1; n];
        for &s in seq {
            degree[s] += 1;
        }
        let mut edges = Vec::new();
        for &s in seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf, s));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        edges
    }

    /// Isomorphism classes of labelled trees, by brute force over all
    /// `n^(n-2)` Prüfer sequences.
    fn prufer_classes(n: usize) -> BTreeSet<CanonicalCode> {
        if n <= 2 {
            let g = if n == 1 { vec![0] } else { vec![0, 0] };
            return [FunctionalTree::from_parent_map(n, g).unwrap().canonical_code()].into();
        }
        let mut classes = BTreeSet::new();
        let mut seq = vec![0; n - 2];
        loop {
            let edges = prufer_edges(&seq, n);
            classes.insert(crate::tree::edge_list_code(&edges).unwrap());
            let mut i = 0;
            while i < seq.len() {
                seq[i] += 1;
                if seq[i] < n {
                    break;
                }
                seq[i] = 0;
                i += 1;
            }
            if i == seq.len() {
                break;
            }
        }
        classes
    }

    #[test]
    fn small_counts() {
        let counts: Vec<usize> = (1..=10).map(|n| enumerate_free_trees(n).unwrap().count()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47, 106]);
    }

    #[test]
    fn matches_prufer_brute_force() {
        for n in 1..=8 {
            let generated: Vec<CanonicalCode> = catalog(n).unwrap().into_iter().map(|e| e.canonical_code).collect();
            let distinct: BTreeSet<_> = generated.iter().cloned().collect();
            assert_eq!(distinct.len(), generated.len(), "duplicate class at n = {n}");
            assert_eq!(distinct, prufer_classes(n), "class mismatch at n = {n}");
        }
    }

    #[test]
    fn larger_counts() {
        let counts: Vec<usize> = (11..=14).map(|n| enumerate_free_trees(n).unwrap().count()).collect();
        assert_eq!(counts, vec![235, 551, 1301, 3159]);
    }

    #[test]
    fn entries_are_centroid_rooted_and_indexed() {
        for entry in catalog(8).unwrap() {
            assert_eq!(entry.tree.root(), 0);
            assert!(entry.tree.centroids().contains(&0));
            assert_eq!(entry.canonical_code, entry.tree.canonical_code());
        }
        let idx: Vec<usize> = catalog(7).unwrap().iter().map(|e| e.index).collect();
        assert_eq!(idx, (0..11).collect::<Vec<_>>());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_free_trees(19),
            Err(Error::ResourceLimit { cap: 18, .. })
        ));
        assert!(enumerate_free_trees_capped(5, 4).is_err());
        assert!(enumerate_free_trees(0).is_err());
    }

    #[test]
    fn deterministic_order() {
        assert_eq!(catalog(9).unwrap(), catalog(9).unwrap());
    }
}
