//! Cyclic column decompositions as permutations of the `n²` entries of an
//! `n × n` matrix.
//!
//! Entry `n·i + j` of `𝒜` sits at row `i`, column `j` and stands for the
//! directed edge `(i, n + j)` of `K⃗_{n,n}`. An [`EntryPermutation`] `σ` fixes
//! entry 0 and builds every column from column 0: the entry in row `i` of
//! column 0, shifted by `j` in both coordinates, lands in row `i + j` of
//! column `j` (indices mod `n`).

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::decomposition::orient;
use crate::error::{Error, Result};
use crate::labeling::{is_beta, Labeling};
use crate::perm::Permutation;
use crate::tree::FunctionalTree;

pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;
/// Groups up to this order are listed element by element.
pub const ELEMENT_LIST_THRESHOLD: usize = 720;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EntryPermutation {
    pub n: usize,
    pub sigma: Permutation,
}

fn shift_entry(n: usize, entry: usize, j: usize) -> usize {
    n * ((entry / n + j) % n) + (entry % n + j) % n
}

impl EntryPermutation {
    pub fn identity(n: usize) -> Self {
        EntryPermutation {
            n,
            sigma: Permutation::identity(n * n),
        }
    }

    /// `σ(𝒜)` as entry indices: position `(i, j)` holds `α_{σ(n·i + j)}`.
    pub fn matrix(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.sigma[n * i + j]).collect())
            .collect()
    }

    pub fn first_column(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.sigma[self.n * i]).collect()
    }

    /// Edges `(p, n + q)` named by the entries of column `j`, sorted.
    pub fn column_edges(&self, j: usize) -> Vec<(usize, usize)> {
        let n = self.n;
        let mut edges: Vec<(usize, usize)> = (0..n)
            .map(|i| {
                let e = self.sigma[n * i + j];
                (e / n, n + e % n)
            })
            .collect();
        edges.sort_unstable();
        edges
    }

    /// `self ∘ other`: the map `k ↦ self(other(k))`.
    pub fn compose(&self, other: &EntryPermutation) -> Result<EntryPermutation> {
        if self.n != other.n {
            return Err(Error::MalformedInput(format!(
                "entry permutations for n = {} and n = {}",
                self.n, other.n
            )));
        }
        Ok(EntryPermutation {
            n: self.n,
            sigma: self.sigma.compose(&other.sigma),
        })
    }

    pub fn inverse(&self) -> EntryPermutation {
        EntryPermutation {
            n: self.n,
            sigma: self.sigma.inverse(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.sigma.is_identity()
    }
}

/// Completes a first column into the entry permutation generated by the
/// cyclic shifts.
///
/// Fails with [`Error::NotBijective`] when two shifted entries collide,
/// i.e. when the first column does not cyclically decompose `K⃗_{n,n}`.
pub fn sigma_from_first_column(n: usize, first_column: &[usize]) -> Result<EntryPermutation> {
    if n == 0 || first_column.len() != n {
        return Err(Error::MalformedInput(format!(
            "a first column for n = {n} needs {n} entries, got {}",
            first_column.len()
        )));
    }
    if let Some(&bad) = first_column.iter().find(|&&e| e >= n * n) {
        return Err(Error::MalformedInput(format!("entry {bad} outside Z_{}", n * n)));
    }
    if first_column[0] != 0 {
        return Err(Error::PreconditionViolated(
            "the first column must start with entry 0".into(),
        ));
    }
    let mut images = vec![usize::MAX; n * n];
    let mut hit = vec![false; n * n];
    for j in 0..n {
        for (i, &entry) in first_column.iter().enumerate() {
            let image = shift_entry(n, entry, j);
            if std::mem::replace(&mut hit[image], true) {
                return Err(Error::NotBijective(image));
            }
            images[n * ((i + j) % n) + j] = image;
        }
    }
    Ok(EntryPermutation {
        n,
        sigma: Permutation::new(images)?,
    })
}

/// First column of a labelled tree: its oriented edges moved so that the
/// root edge becomes entry 0. Every edge `(i, n + 0)` goes to row `i`, and the
/// remaining edges fill the remaining rows in increasing entry order.
pub fn first_column_from_labeled_tree(t: &FunctionalTree, lab: &Labeling) -> Result<Vec<usize>> {
    if lab.sigma.len() != t.n() || !is_beta(t, &lab.sigma) {
        return Err(Error::PreconditionViolated(
            "the labeling is not an oriented beta-labeling of this tree".into(),
        ));
    }
    let n = t.n();
    let r = lab.h.root();
    let mut entries: Vec<usize> = orient(&lab.h)
        .edges
        .iter()
        .map(|&(a, b)| n * ((a + n - r) % n) + (b - n + n - r) % n)
        .collect();
    entries.sort_unstable();
    let mut column = vec![usize::MAX; n];
    let mut rest = Vec::new();
    for e in entries {
        if e % n == 0 && column[e / n] == usize::MAX {
            column[e / n] = e;
        } else {
            rest.push(e);
        }
    }
    let mut rest = rest.into_iter();
    for slot in column.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = rest.next().expect("n edges fill n rows");
    }
    Ok(column)
}

/// Entry permutation of a labelled tree. Column `j` carries copy `j - r` of
/// the `K⃗_{n,n}` decomposition, `r` being the label of the root.
pub fn sigma_from_labeled_tree(t: &FunctionalTree, lab: &Labeling) -> Result<EntryPermutation> {
    sigma_from_first_column(t.n(), &first_column_from_labeled_tree(t, lab)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n: usize,
    pub order: usize,
    /// Sorted image arrays, present when the order is at most
    /// [`ELEMENT_LIST_THRESHOLD`].
    pub elements: Option<Vec<Vec<usize>>>,
    /// Closure under composition and inverses, checked when elements are listed.
    pub verified_closed: Option<bool>,
    pub fixes_zero: bool,
}

/// The subgroup of `S_{n²}` generated by `generators`, by breadth-first
/// multiplication.
pub fn closure(generators: &[EntryPermutation]) -> Result<GroupSummary> {
    closure_capped(generators, DEFAULT_CLOSURE_CAP)
}

pub fn closure_capped(generators: &[EntryPermutation], cap: usize) -> Result<GroupSummary> {
    let first = generators
        .first()
        .ok_or_else(|| Error::MalformedInput("closure needs at least one generator".into()))?;
    let n = first.n;
    if generators.iter().any(|g| g.n != n) {
        return Err(Error::MalformedInput("generators act on different matrix sizes".into()));
    }
    let identity = Permutation::identity(n * n);
    let mut seen: HashSet<Permutation> = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(p) = queue.pop_front() {
        for g in generators {
            let q = g.sigma.compose(&p);
            if !seen.contains(&q) {
                if seen.len() >= cap {
                    return Err(Error::limit("group closure", seen.len() + 1, cap));
                }
                seen.insert(q.clone());
                queue.push_back(q);
            }
        }
    }
    let order = seen.len();
    let fixes_zero = seen.iter().all(|p| p[0] == 0);
    let (elements, verified_closed) = if order <= ELEMENT_LIST_THRESHOLD {
        let closed = seen
            .iter()
            .all(|a| seen.contains(&a.inverse()) && seen.iter().all(|b| seen.contains(&a.compose(b))));
        let mut listed: Vec<Vec<usize>> = seen.into_iter().map(Permutation::into_vec).collect();
        listed.sort_unstable();
        (Some(listed), Some(closed))
    } else {
        (None, None)
    };
    Ok(GroupSummary {
        n,
        order,
        elements,
        verified_closed,
        fixes_zero,
    })
}

/// The `n = 3` orbit generated by the first column `(α_0, α_3, α_1)`.
pub fn worked_example() -> Result<(EntryPermutation, EntryPermutation, GroupSummary)> {
    let sigma1 = sigma_from_first_column(3, &[0, 3, 1])?;
    let sigma2 = sigma1.compose(&sigma1)?;
    let group = closure(std::slice::from_ref(&sigma1))?;
    Ok((sigma1, sigma2, group))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::decompose_directed_knn;
    use crate::labeling::{find_beta, verify_beta};

    #[test]
    fn worked_example_matrices() {
        let (s1, s2, group) = worked_example().unwrap();
        assert_eq!(s1.matrix(), vec![vec![0, 5, 2], vec![3, 4, 6], vec![1, 7, 8]]);
        assert_eq!(s2.matrix(), vec![vec![0, 6, 2], vec![3, 4, 1], vec![5, 7, 8]]);
        assert_eq!(sigma_from_first_column(3, &s2.first_column()).unwrap(), s2);
        assert_eq!(group.order, 3);
        assert_eq!(group.verified_closed, Some(true));
    }

    #[test]
    fn identity_column() {
        assert!(sigma_from_first_column(3, &[0, 3, 6]).unwrap().is_identity());
        assert!(sigma_from_first_column(1, &[0]).unwrap().is_identity());
        assert_eq!(closure(&[EntryPermutation::identity(3)]).unwrap().order, 1);
    }

    #[test]
    fn colliding_column_is_rejected() {
        // both entries have difference 0
        assert!(matches!(
            sigma_from_first_column(2, &[0, 3]),
            Err(Error::NotBijective(_))
        ));
        assert!(sigma_from_first_column(2, &[1, 3]).is_err());
    }

    #[test]
    fn labeled_tree_columns_are_the_copies() {
        let t = FunctionalTree::from_parent_map(4, vec![0, 0, 1, 1]).unwrap();
        let lab = verify_beta(&t, &Permutation::new(vec![0, 3, 2, 1]).unwrap()).unwrap();
        let sigma = sigma_from_labeled_tree(&t, &lab).unwrap();
        let d = decompose_directed_knn(&t, &lab).unwrap();
        for j in 0..4 {
            assert_eq!(sigma.column_edges(j), d.copies[j]);
        }
    }

    #[test]
    fn nonzero_root_label_rotates_columns() {
        let t = FunctionalTree::from_parent_map(3, vec![0, 0, 1]).unwrap();
        for lab in crate::labeling::find_all_beta(&t).unwrap() {
            let r = lab.h.root();
            let sigma = sigma_from_labeled_tree(&t, &lab).unwrap();
            let d = decompose_directed_knn(&t, &lab).unwrap();
            for j in 0..3 {
                assert_eq!(sigma.column_edges(j), d.copies[(j + 3 - r) % 3]);
            }
        }
    }

    #[test]
    fn single_vertex_tree() {
        let t = FunctionalTree::from_parent_map(1, vec![0]).unwrap();
        let sigma = sigma_from_labeled_tree(&t, &find_beta(&t).unwrap()).unwrap();
        assert!(sigma.is_identity());
    }

    #[test]
    fn closure_cap() {
        let (s1, _, _) = worked_example().unwrap();
        assert!(matches!(closure_capped(&[s1], 2), Err(Error::ResourceLimit { .. })));
    }
}
