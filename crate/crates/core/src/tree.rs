//! Functional trees: self-maps `g` of `Z_n` whose iterates contract every
//! vertex onto a single fixed point.
//!
//! A rooted tree on `n` vertices is encoded by its parent map with a loop at the
//! root. Every operation here is pure; trees are immutable once validated.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Canonical level sequence of an unrooted tree. Two trees share a code iff
/// they are isomorphic.
pub type CanonicalCode = Vec<u8>;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TreeJson", into = "TreeJson")]
pub struct FunctionalTree {
    g: Vec<usize>,
    root: usize,
    depth: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    n: usize,
    g: Vec<usize>,
}

impl TryFrom<TreeJson> for FunctionalTree {
    type Error = Error;

    fn try_from(j: TreeJson) -> Result<Self> {
        FunctionalTree::from_parent_map(j.n, j.g)
    }
}

impl From<FunctionalTree> for TreeJson {
    fn from(t: FunctionalTree) -> Self {
        TreeJson { n: t.n(), g: t.g }
    }
}

impl std::fmt::Debug for FunctionalTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FunctionalTree{:?}", self.g)
    }
}

impl FunctionalTree {
    /// Validates `g` as a functional tree on `n` vertices and computes its depths.
    ///
    /// Fails unless `g^(n-1)` has a single-point image, i.e. unless there is
    /// exactly one fixed point and every orbit runs into it.
    pub fn from_parent_map(n: usize, g: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::NotAFunctionalTree("empty vertex set".into()));
        }
        if g.len() != n {
            return Err(Error::MalformedInput(format!(
                "parent map has length {} but n = {n}",
                g.len()
            )));
        }
        if let Some(v) = g.iter().position(|&p| p >= n) {
            return Err(Error::MalformedInput(format!("g({v}) = {} is outside Z_{n}", g[v])));
        }
        let fixed: Vec<usize> = (0..n).filter(|&v| g[v] == v).collect();
        if fixed.len() != 1 {
            return Err(Error::NotAFunctionalTree(format!(
                "expected one fixed point, found {}",
                fixed.len()
            )));
        }
        let root = fixed[0];

        const UNSET: usize = usize::MAX;
        let mut depth = vec![UNSET; n];
        depth[root] = 0;
        let mut path = Vec::new();
        for start in 0..n {
            let mut v = start;
            while depth[v] == UNSET {
                // a walk longer than n without reaching the root is a cycle
                if path.len() > n {
                    return Err(Error::NotAFunctionalTree(format!(
                        "vertex {start} lies on or above a cycle avoiding the root"
                    )));
                }
                path.push(v);
                v = g[v];
            }
            let mut d = depth[v];
            while let Some(u) = path.pop() {
                d += 1;
                depth[u] = d;
            }
        }
        Ok(FunctionalTree { g, root, depth })
    }

    pub fn n(&self) -> usize {
        self.g.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> usize {
        self.g[v]
    }

    pub fn parent_map(&self) -> &[usize] {
        &self.g
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn depths(&self) -> &[usize] {
        &self.depth
    }

    /// `(-1)^{d_g(v)}`.
    pub fn sign(&self, v: usize) -> i64 {
        if self.depth[v].is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Star rooted at its center, i.e. `g` constant.
    pub fn is_constant(&self) -> bool {
        self.g.iter().all(|&p| p == self.root)
    }

    /// Vertices with no preimage under `g`.
    pub fn is_leaf(&self, v: usize) -> bool {
        !self.g.iter().enumerate().any(|(u, &p)| p == v && u != v) && v != self.root
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.n()).filter(|&u| u != self.root && self.g[u] == v).collect()
    }

    /// The `n - 1` non-loop edges as `(v, g(v))`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .filter(|&v| v != self.root)
            .map(|v| (v, self.g[v]))
            .collect()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n()];
        for (v, p) in self.edges() {
            adj[v].push(p);
            adj[p].push(v);
        }
        adj
    }

    /// Sorted multiset of undirected degrees.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adjacency().iter().map(Vec::len).collect();
        d.sort_unstable();
        d
    }

    /// `g^(k)` as a functional tree (squaring chains stay functional).
    pub fn iterate(&self, k: usize) -> FunctionalTree {
        let g = (0..self.n()).map(|v| (0..k).fold(v, |u, _| self.g[u])).collect();
        FunctionalTree::from_parent_map(self.n(), g).expect("iterates of a functional tree are functional")
    }

    /// Pairs `(a, b)`, `a < b`, of leaves sharing a parent.
    pub fn sibling_leaf_pairs(&self) -> Vec<(usize, usize)> {
        let leaves: Vec<usize> = (0..self.n()).filter(|&v| self.is_leaf(v)).collect();
        let mut pairs = Vec::new();
        for (i, &a) in leaves.iter().enumerate() {
            for &b in &leaves[i + 1..] {
                if self.g[a] == self.g[b] {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }

    /// Same undirected tree, rooted at `r`; edges on the path from `r` to the
    /// old root are reversed.
    pub fn reroot(&self, r: usize) -> Result<FunctionalTree> {
        let n = self.n();
        if r >= n {
            return Err(Error::MalformedInput(format!("root {r} outside Z_{n}")));
        }
        let g = bfs_parents(&self.adjacency(), r);
        FunctionalTree::from_parent_map(n, g)
    }

    /// The tree of `σ ∘ g ∘ σ^{-1}`: vertex `v` is relabelled `σ(v)`.
    pub fn conjugate(&self, sigma: &Permutation) -> Result<FunctionalTree> {
        let n = self.n();
        if sigma.len() != n {
            return Err(Error::InvalidPermutation(format!(
                "permutation of degree {} applied to a tree on {n} vertices",
                sigma.len()
            )));
        }
        let mut h = vec![0; n];
        for v in 0..n {
            h[sigma[v]] = sigma[self.g[v]];
        }
        FunctionalTree::from_parent_map(n, h)
    }

    /// Moves every vertex of `g^{-1}(g(n-1))` to its grandparent.
    ///
    /// Requires vertex `n - 1` to be a leaf at even depth.
    pub fn collapse_leaf_siblings(&self) -> Result<FunctionalTree> {
        let n = self.n();
        let last = n - 1;
        if !self.is_leaf(last) {
            return Err(Error::PreconditionViolated(format!("vertex {last} is not a leaf")));
        }
        if !self.depth[last].is_multiple_of(2) {
            return Err(Error::PreconditionViolated(format!(
                "vertex {last} has odd depth {}",
                self.depth[last]
            )));
        }
        let p = self.g[last];
        let g = (0..n)
            .map(|v| if self.g[v] == p { self.g[p] } else { self.g[v] })
            .collect();
        FunctionalTree::from_parent_map(n, g)
    }

    fn ready_for_collapse(&self) -> bool {
        let last = self.n() - 1;
        self.is_leaf(last) && self.depth[last].is_multiple_of(2)
    }

    /// Reroots and relabels so that vertex `n - 1` is a leaf at even depth.
    ///
    /// Trees already in that form are returned unchanged. Otherwise the smallest
    /// undirected leaf `l` is chosen, the tree is rerooted at the smallest vertex
    /// at even distance `>= 2` from `l`, and `l` is swapped with `n - 1`. Unless
    /// the tree is a star, the new root is required to be an inner vertex: each
    /// collapse from an inner root strictly lowers the sum of pairwise distances,
    /// so repeated normalize-and-collapse rounds reach the star.
    pub fn normalize_for_collapse(&self) -> Result<FunctionalTree> {
        let n = self.n();
        if n < 3 {
            return Err(Error::PreconditionViolated(format!(
                "normalization needs n >= 3, got {n}"
            )));
        }
        if self.ready_for_collapse() {
            return Ok(self.clone());
        }
        let adj = self.adjacency();
        let leaf = (0..n)
            .find(|&v| adj[v].len() == 1)
            .expect("a tree on n >= 2 vertices has a leaf");
        let dist = bfs_distances(&adj, leaf);
        let candidates = || (0..n).filter(|&v| dist[v] >= 2 && dist[v].is_multiple_of(2));
        let root = candidates()
            .find(|&v| adj[v].len() > 1)
            .or_else(|| candidates().next())
            .expect("n >= 3 puts a vertex at distance 2 from any leaf");
        let rerooted = self.reroot(root)?;
        let swapped = rerooted.conjugate(&Permutation::transposition(n, leaf, n - 1))?;
        debug_assert!(swapped.ready_for_collapse());
        Ok(swapped)
    }

    /// Centroid vertices (one or two).
    pub fn centroids(&self) -> Vec<usize> {
        centroids(&self.adjacency())
    }

    /// Canonical level sequence of the underlying free tree.
    pub fn canonical_code(&self) -> CanonicalCode {
        free_tree_code(&self.adjacency())
    }

    /// Relabels the underlying free tree so that the canonical centroid is
    /// vertex 0 and vertices appear in canonical preorder.
    pub fn canonical_form(&self) -> FunctionalTree {
        let adj = self.adjacency();
        let (_, root) = best_centroid_rooting(&adj);
        let order = canonical_preorder(&adj, root);
        let mut relabel = vec![0; self.n()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new;
        }
        let sigma = Permutation::new(relabel).expect("preorder visits every vertex once");
        self.reroot(root)
            .and_then(|t| t.conjugate(&sigma))
            .expect("relabelling preserves validity")
    }
}

pub(crate) fn bfs_parents(adj: &[Vec<usize>], root: usize) -> Vec<usize> {
    let mut parent = vec![usize::MAX; adj.len()];
    parent[root] = root;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if parent[u] == usize::MAX {
                parent[u] = v;
                queue.push_back(u);
            }
        }
    }
    parent
}

pub(crate) fn bfs_distances(adj: &[Vec<usize>], source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

fn centroids(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n == 1 {
        return vec![0];
    }
    let parent = bfs_parents(adj, 0);
    // BFS order reversed gives children before parents
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([0]);
    let mut seen = vec![false; n];
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    let mut size = vec![1usize; n];
    for &v in order.iter().rev() {
        if v != 0 {
            size[parent[v]] += size[v];
        }
    }
    let heaviest = |v: usize| {
        adj[v]
            .iter()
            .map(|&u| if parent[u] == v && u != v { size[u] } else { n - size[v] })
            .max()
            .unwrap_or(0)
    };
    let best = (0..n).map(heaviest).min().unwrap();
    (0..n).filter(|&v| heaviest(v) == best).collect()
}

fn rooted_code(adj: &[Vec<usize>], v: usize, parent: usize, depth: u8) -> Vec<u8> {
    let mut kids: Vec<Vec<u8>> = adj[v]
        .iter()
        .filter(|&&u| u != parent)
        .map(|&u| rooted_code(adj, u, v, depth + 1))
        .collect();
    kids.sort_unstable_by(|a, b| b.cmp(a));
    let mut code = vec![depth];
    for k in kids {
        code.extend(k);
    }
    code
}

fn best_centroid_rooting(adj: &[Vec<usize>]) -> (CanonicalCode, usize) {
    centroids(adj)
        .into_iter()
        .map(|c| (rooted_code(adj, c, usize::MAX, 0), c))
        .min()
        .unwrap()
}

fn canonical_preorder(adj: &[Vec<usize>], root: usize) -> Vec<usize> {
    fn visit(adj: &[Vec<usize>], v: usize, parent: usize, depth: u8, out: &mut Vec<usize>) {
        out.push(v);
        let mut kids: Vec<(Vec<u8>, usize)> = adj[v]
            .iter()
            .filter(|&&u| u != parent)
            .map(|&u| (rooted_code(adj, u, v, depth + 1), u))
            .collect();
        kids.sort_unstable_by(|a, b| b.cmp(a));
        for (_, u) in kids {
            visit(adj, u, v, depth + 1, out);
        }
    }
    let mut out = Vec::with_capacity(adj.len());
    visit(adj, root, usize::MAX, 0, &mut out);
    out
}

pub(crate) fn free_tree_code(adj: &[Vec<usize>]) -> CanonicalCode {
    best_centroid_rooting(adj).0
}

/// Canonical code of the graph spanned by an edge list, or `None` when the
/// edges do not form a tree on their endpoints.
pub fn edge_list_code(edges: &[(usize, usize)]) -> Option<CanonicalCode> {
    let mut ids: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.is_empty() || ids.len() != edges.len() + 1 {
        return None;
    }
    let index = |v: usize| ids.binary_search(&v).unwrap();
    let mut adj = vec![Vec::new(); ids.len()];
    for &(a, b) in edges {
        if a == b {
            return None;
        }
        adj[index(a)].push(index(b));
        adj[index(b)].push(index(a));
    }
    if bfs_distances(&adj, 0).contains(&usize::MAX) {
        return None;
    }
    Some(free_tree_code(&adj))
}

/// Builds the functional tree encoded by a level sequence (preorder depths):
/// each vertex hangs from the last earlier vertex one level up.
pub fn from_level_sequence(levels: &[usize]) -> Result<FunctionalTree> {
    if levels.first() != Some(&0) || levels[1..].contains(&0) {
        return Err(Error::MalformedInput("a level sequence starts with the only 0".into()));
    }
    let mut g = vec![0; levels.len()];
    let mut last_at = vec![0usize; levels.len() + 1];
    for (v, &d) in levels.iter().enumerate().skip(1) {
        if d > levels[v - 1] + 1 {
            return Err(Error::MalformedInput(format!("level jumps at position {v}")));
        }
        g[v] = last_at[d - 1];
        last_at[d] = v;
    }
    FunctionalTree::from_parent_map(levels.len(), g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(g: &[usize]) -> FunctionalTree {
        FunctionalTree::from_parent_map(g.len(), g.to_vec()).unwrap()
    }

    #[test]
    fn loop_rooted_example_tree() {
        let t = tree(&[0, 0, 1, 1]);
        assert_eq!(t.root(), 0);
        assert_eq!(t.depths(), &[0, 1, 2, 2]);
    }

    #[test]
    fn single_vertex() {
        let t = tree(&[0]);
        assert_eq!(t.depths(), &[0]);
        assert!(t.is_constant());
    }

    #[test]
    fn rejects_cycles_and_forests() {
        for g in [vec![1, 0], vec![0, 1], vec![0, 2, 1], vec![1, 2, 0]] {
            let n = g.len();
            assert!(matches!(
                FunctionalTree::from_parent_map(n, g),
                Err(Error::NotAFunctionalTree(_))
            ));
        }
        assert!(FunctionalTree::from_parent_map(3, vec![0, 0]).is_err());
        assert!(FunctionalTree::from_parent_map(2, vec![0, 5]).is_err());
    }

    #[test]
    fn reroot_examples() {
        let t = tree(&[0, 0, 1, 1]);
        assert_eq!(t.reroot(1).unwrap().parent_map(), &[1, 1, 1, 1]);
        assert_eq!(t.reroot(0).unwrap(), t);
        assert_eq!(tree(&[0, 0]).reroot(1).unwrap().parent_map(), &[1, 1]);
    }

    #[test]
    fn conjugate_examples() {
        let t = tree(&[0, 0, 1, 1]);
        let sigma = Permutation::new(vec![0, 3, 2, 1]).unwrap();
        assert_eq!(t.conjugate(&sigma).unwrap().parent_map(), &[0, 3, 3, 0]);
        assert_eq!(t.conjugate(&Permutation::identity(4)).unwrap(), t);
        let swap = Permutation::new(vec![1, 0]).unwrap();
        assert_eq!(tree(&[0, 0]).conjugate(&swap).unwrap().parent_map(), &[1, 1]);
        assert!(t.conjugate(&Permutation::identity(3)).is_err());
    }

    #[test]
    fn collapse_examples() {
        let star = tree(&[0, 0, 1, 1]).collapse_leaf_siblings().unwrap();
        assert_eq!(star.parent_map(), &[0, 0, 0, 0]);
        assert!(matches!(
            tree(&[0, 0, 0, 0]).collapse_leaf_siblings(),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(
            tree(&[0]).collapse_leaf_siblings(),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn normalize_examples() {
        let path = tree(&[0, 0, 1]);
        assert_eq!(path.normalize_for_collapse().unwrap(), path);
        let t = tree(&[0, 0, 1, 1]);
        assert_eq!(t.normalize_for_collapse().unwrap(), t);

        let star = tree(&[0, 0, 0]);
        let normal = star.normalize_for_collapse().unwrap();
        assert!(normal.is_leaf(2));
        assert_eq!(normal.depth(2) % 2, 0);
        assert_eq!(normal.canonical_code(), star.canonical_code());
        assert_eq!(normal.parent_map(), &[1, 1, 0]);

        assert!(tree(&[0, 0]).normalize_for_collapse().is_err());
    }

    #[test]
    fn canonical_code_separates_path_and_star() {
        let path = tree(&[0, 0, 1, 2]);
        let star = tree(&[0, 0, 0, 0]);
        assert_ne!(path.canonical_code(), star.canonical_code());
        assert_eq!(path.canonical_code(), path.reroot(3).unwrap().canonical_code());
    }

    #[test]
    fn canonical_form_is_preorder_labelled() {
        let t = tree(&[1, 1, 1, 2, 3]);
        let c = t.canonical_form();
        assert_eq!(c.root(), 0);
        assert!((1..c.n()).all(|v| c.parent(v) < v));
        assert_eq!(c.canonical_code(), t.canonical_code());
    }

    #[test]
    fn level_sequences_and_edge_codes() {
        let t = from_level_sequence(&[0, 1, 2, 1]).unwrap();
        assert_eq!(t.parent_map(), &[0, 0, 1, 0]);
        assert!(from_level_sequence(&[0, 2]).is_err());
        let code = edge_list_code(&[(10, 11), (11, 12), (11, 13)]).unwrap();
        assert_eq!(code, tree(&[0, 0, 0, 0]).canonical_code());
        assert!(edge_list_code(&[(0, 1), (1, 0)]).is_none());
    }

    #[test]
    fn iterate_contracts_to_a_constant_map() {
        let path = tree(&[0, 0, 1, 2]);
        assert_eq!(path.iterate(2).parent_map(), &[0, 0, 0, 1]);
        assert!(path.iterate(3).is_constant());
    }

    #[test]
    fn sibling_pairs() {
        assert_eq!(tree(&[0, 0, 1, 1]).sibling_leaf_pairs(), vec![(2, 3)]);
        assert!(tree(&[0, 0, 1]).sibling_leaf_pairs().is_empty());
    }
}
