//! Cyclic decompositions of `K⃗_{n,n}`, `K_{nx,nx}` and `K_{2nx+1}` by copies
//! of a beta-labelled tree, and an independent edge-partition verifier.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeling::{is_beta, Labeling};
use crate::tree::{edge_list_code, CanonicalCode, FunctionalTree};

/// The left-to-right orientation of a functional tree: left part `Z_n`, right
/// part `n + Z_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedBipartiteTree {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub root_edge: (usize, usize),
}

/// `(v, n + g(v))` for even-depth `v`, `(g(v), n + v)` for odd-depth `v`, and
/// `(r, n + r)` for the root, listed by vertex.
pub fn orient(t: &FunctionalTree) -> OrientedBipartiteTree {
    let n = t.n();
    let edges = (0..n)
        .map(|v| {
            if t.depth(v).is_multiple_of(2) {
                (v, n + t.parent(v))
            } else {
                (t.parent(v), n + v)
            }
        })
        .collect();
    OrientedBipartiteTree {
        n,
        edges,
        root_edge: (t.root(), n + t.root()),
    }
}

impl OrientedBipartiteTree {
    /// Recovers the functional tree: the root edge names the root, and every
    /// other edge points towards it.
    pub fn to_functional_tree(&self) -> Result<FunctionalTree> {
        let n = self.n;
        let bad = |msg: String| Error::MalformedInput(format!("oriented tree: {msg}"));
        if self.edges.len() != n {
            return Err(bad(format!("{} edges for n = {n}", self.edges.len())));
        }
        let (r, rr) = self.root_edge;
        if r >= n || rr != n + r || !self.edges.contains(&self.root_edge) {
            return Err(bad(format!("root edge ({r}, {rr}) is invalid")));
        }
        let mut adj = vec![Vec::new(); n];
        let mut root_seen = false;
        for &(x, y) in &self.edges {
            if x >= n || y < n || y >= 2 * n {
                return Err(bad(format!("edge ({x}, {y}) is not left-to-right")));
            }
            if (x, y) == self.root_edge && !root_seen {
                root_seen = true;
                continue;
            }
            adj[x].push(y - n);
            adj[y - n].push(x);
        }
        let parent = crate::tree::bfs_parents(&adj, r);
        if parent.contains(&usize::MAX) {
            return Err(bad("edges do not span a tree".into()));
        }
        let t = FunctionalTree::from_parent_map(n, parent)?;
        if orient(&t).edges.iter().any(|e| !self.edges.contains(e)) {
            return Err(bad("edges are not oriented from the even-depth side".into()));
        }
        Ok(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HostKind {
    /// Directed `K⃗_{n,n}`, left `Z_n`, right `n + Z_n`.
    #[serde(rename = "knn")]
    DirectedKnn,
    /// Complete graph `K_{2nx+1}` on `Z_{2nx+1}`.
    #[serde(rename = "k2n1")]
    K2n1,
    /// Complete bipartite `K_{nx,nx}`, left `Z_{nx}`, right `nx + Z_{nx}`.
    #[serde(rename = "knxnx")]
    Knxnx,
}

impl HostKind {
    pub fn parse(s: &str) -> Result<HostKind> {
        match s {
            "knn" => Ok(HostKind::DirectedKnn),
            "k2n1" => Ok(HostKind::K2n1),
            "knxnx" => Ok(HostKind::Knxnx),
            other => Err(Error::MalformedInput(format!("unknown host {other:?}"))),
        }
    }
}

/// `n` counts tree vertices for `knn` and tree edges for the undirected hosts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Host {
    pub kind: HostKind,
    pub n: usize,
    pub x: usize,
}

impl Host {
    pub fn vertex_count(&self) -> usize {
        match self.kind {
            HostKind::DirectedKnn => 2 * self.n,
            HostKind::K2n1 => 2 * self.n * self.x + 1,
            HostKind::Knxnx => 2 * self.n * self.x,
        }
    }

    pub fn edge_count(&self) -> usize {
        match self.kind {
            HostKind::DirectedKnn => self.n * self.n,
            HostKind::K2n1 => {
                let m = self.vertex_count();
                m * (m - 1) / 2
            }
            HostKind::Knxnx => (self.n * self.x).pow(2),
        }
    }

    /// Dense index of a host edge, or `None` when the pair is not an edge.
    /// Undirected edges are accepted in either orientation.
    pub fn edge_index(&self, (a, b): (usize, usize)) -> Option<usize> {
        match self.kind {
            HostKind::DirectedKnn => {
                let n = self.n;
                (a < n && (n..2 * n).contains(&b)).then(|| a * n + (b - n))
            }
            HostKind::Knxnx => {
                let m = self.n * self.x;
                (a < m && (m..2 * m).contains(&b)).then(|| a * m + (b - m))
            }
            HostKind::K2n1 => {
                let m = self.vertex_count();
                let (a, b) = (a.min(b), a.max(b));
                (a != b && b < m).then(|| a * m + b)
            }
        }
    }

    fn index_space(&self) -> usize {
        match self.kind {
            HostKind::K2n1 => self.vertex_count().pow(2),
            _ => self.edge_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// Parent map of the source tree.
    pub tree: Vec<usize>,
    pub sigma: Vec<usize>,
    /// `(k, i)` per copy: stretch index and cyclic shift.
    pub shifts: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub host: Host,
    pub copies: Vec<Vec<(usize, usize)>>,
    pub provenance: Provenance,
}

fn check_labeling(t: &FunctionalTree, lab: &Labeling) -> Result<()> {
    if lab.sigma.len() != t.n() || !is_beta(t, &lab.sigma) {
        return Err(Error::PreconditionViolated(
            "the labeling is not an oriented beta-labeling of this tree".into(),
        ));
    }
    if lab.h != t.conjugate(&lab.sigma)? {
        return Err(Error::PreconditionViolated(
            "the labeling's relabelled map does not match its permutation".into(),
        ));
    }
    Ok(())
}

fn finish(d: Decomposition) -> Result<Decomposition> {
    let report = verify_partition(&d);
    if !report.pass {
        return Err(Error::VerificationFailed(report.describe()));
    }
    Ok(d)
}

fn sorted(mut edges: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    edges.sort_unstable();
    edges
}

/// `n` copies of the oriented labelled tree; copy `i` moves both endpoints of
/// every edge forward by `i` inside their part.
pub fn decompose_directed_knn(t: &FunctionalTree, lab: &Labeling) -> Result<Decomposition> {
    check_labeling(t, lab)?;
    let n = t.n();
    let oriented = orient(&lab.h);
    let copies = (0..n)
        .map(|i| {
            sorted(
                oriented
                    .edges
                    .iter()
                    .map(|&(a, b)| ((a + i) % n, n + (b - n + i) % n))
                    .collect(),
            )
        })
        .collect();
    finish(Decomposition {
        host: Host {
            kind: HostKind::DirectedKnn,
            n,
            x: 1,
        },
        copies,
        provenance: Provenance {
            tree: t.parent_map().to_vec(),
            sigma: lab.sigma.as_slice().to_vec(),
            shifts: (0..n).map(|i| (0, i)).collect(),
        },
    })
}

/// The non-loop edges of the labelled tree as `(A label, B label)`.
fn labelled_edges(lab: &Labeling) -> Vec<(usize, usize)> {
    lab.h
        .edges()
        .into_iter()
        .map(|(v, p)| {
            if lab.h.depth(v).is_multiple_of(2) {
                (v, p)
            } else {
                (p, v)
            }
        })
        .collect()
}

fn undirected_precondition(t: &FunctionalTree, x: usize) -> Result<usize> {
    if t.n() < 2 {
        return Err(Error::PreconditionViolated("the tree needs at least one edge".into()));
    }
    if x == 0 {
        return Err(Error::PreconditionViolated("x must be positive".into()));
    }
    Ok(t.n() - 1)
}

/// `x (2nx + 1)` copies on `K_{2nx+1}`; copy `(k, i)` places A-vertex `a` at
/// `a + i` and B-vertex `b` at `b + kn + i`.
pub fn decompose_k2n1(t: &FunctionalTree, lab: &Labeling, x: usize) -> Result<Decomposition> {
    check_labeling(t, lab)?;
    let n = undirected_precondition(t, x)?;
    let host = Host {
        kind: HostKind::K2n1,
        n,
        x,
    };
    let m = host.vertex_count();
    let edges = labelled_edges(lab);
    let mut copies = Vec::with_capacity(x * m);
    let mut shifts = Vec::with_capacity(x * m);
    for k in 0..x {
        for i in 0..m {
            let copy = edges
                .iter()
                .map(|&(a, b)| {
                    let (u, v) = ((a + i) % m, (b + k * n + i) % m);
                    (u.min(v), u.max(v))
                })
                .collect();
            copies.push(sorted(copy));
            shifts.push((k, i));
        }
    }
    finish(Decomposition {
        host,
        copies,
        provenance: Provenance {
            tree: t.parent_map().to_vec(),
            sigma: lab.sigma.as_slice().to_vec(),
            shifts,
        },
    })
}

/// `x · nx` copies on `K_{nx,nx}`; copy `(k, s)` places A-vertex `a` at left
/// `a + s` and B-vertex `b` at right `b + kn + s`, both mod `nx`.
pub fn decompose_knxnx(t: &FunctionalTree, lab: &Labeling, x: usize) -> Result<Decomposition> {
    check_labeling(t, lab)?;
    let n = undirected_precondition(t, x)?;
    let host = Host {
        kind: HostKind::Knxnx,
        n,
        x,
    };
    let m = n * x;
    let edges = labelled_edges(lab);
    let mut copies = Vec::with_capacity(x * m);
    let mut shifts = Vec::with_capacity(x * m);
    for k in 0..x {
        for s in 0..m {
            let copy = edges
                .iter()
                .map(|&(a, b)| ((a + s) % m, m + (b + k * n + s) % m))
                .collect();
            copies.push(sorted(copy));
            shifts.push((k, s));
        }
    }
    finish(Decomposition {
        host,
        copies,
        provenance: Provenance {
            tree: t.parent_map().to_vec(),
            sigma: lab.sigma.as_slice().to_vec(),
            shifts,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeConflict {
    pub edge: (usize, usize),
    pub first_copy: usize,
    pub second_copy: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub host_edges: usize,
    pub covered_edges: usize,
    pub copies: usize,
    pub expected_copies: usize,
    /// First edge used by two copies.
    pub duplicate: Option<EdgeConflict>,
    /// First `(copy, edge)` that is not an edge of the host.
    pub foreign_edge: Option<(usize, (usize, usize))>,
    /// First host edge left uncovered.
    pub missing_edge: Option<(usize, usize)>,
    /// First copy that is not vertex-injective or has the wrong shape.
    pub misshapen_copy: Option<usize>,
    pub pass: bool,
}

impl PartitionReport {
    pub fn describe(&self) -> String {
        if let Some(c) = &self.duplicate {
            return format!(
                "edge {:?} appears in copies {} and {}",
                c.edge, c.first_copy, c.second_copy
            );
        }
        if let Some((copy, e)) = self.foreign_edge {
            return format!("copy {copy} uses {e:?}, which is not a host edge");
        }
        if let Some(e) = self.missing_edge {
            return format!("host edge {e:?} is not covered");
        }
        if let Some(copy) = self.misshapen_copy {
            return format!("copy {copy} is not a copy of the source tree");
        }
        if self.copies != self.expected_copies {
            return format!("{} copies, expected {}", self.copies, self.expected_copies);
        }
        "exact partition".into()
    }
}

/// Shape every copy must have: the tree itself for the undirected hosts, the
/// tree plus a pendant vertex at the root for `K⃗_{n,n}`.
fn expected_shape(d: &Decomposition) -> Option<(CanonicalCode, Vec<usize>)> {
    let t = FunctionalTree::from_parent_map(d.provenance.tree.len(), d.provenance.tree.clone()).ok()?;
    let mut edges = t.edges();
    if d.host.kind == HostKind::DirectedKnn {
        edges.push((t.root(), t.n()));
    }
    let code = edge_list_code(&edges)?;
    Some((code, degree_multiset(&edges)))
}

fn degree_multiset(edges: &[(usize, usize)]) -> Vec<usize> {
    let mut ids: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    ids.sort_unstable();
    let mut degrees: Vec<usize> = ids.chunk_by(|a, b| a == b).map(|c| c.len()).collect();
    degrees.sort_unstable();
    degrees
}

fn host_edge(host: &Host, index: usize) -> (usize, usize) {
    match host.kind {
        HostKind::DirectedKnn => (index / host.n, host.n + index % host.n),
        HostKind::Knxnx => {
            let m = host.n * host.x;
            (index / m, m + index % m)
        }
        HostKind::K2n1 => {
            let m = host.vertex_count();
            (index / m, index % m)
        }
    }
}

/// Checks that the copies are edge-disjoint, cover the host exactly, and are
/// each a vertex-injective copy of the source tree.
pub fn verify_partition(d: &Decomposition) -> PartitionReport {
    let host = &d.host;
    let mut owner: Vec<Option<usize>> = vec![None; host.index_space()];
    let mut duplicate = None;
    let mut foreign_edge = None;
    let mut covered = 0;
    'copies: for (c, copy) in d.copies.iter().enumerate() {
        for &e in copy {
            let Some(idx) = host.edge_index(e) else {
                foreign_edge = Some((c, e));
                break 'copies;
            };
            match owner[idx] {
                Some(first) => {
                    duplicate = Some(EdgeConflict {
                        edge: e,
                        first_copy: first,
                        second_copy: c,
                    });
                    break 'copies;
                }
                None => {
                    owner[idx] = Some(c);
                    covered += 1;
                }
            }
        }
    }
    let missing_edge = if duplicate.is_none() && foreign_edge.is_none() {
        (0..host.index_space())
            .map(|i| host_edge(host, i))
            .filter(|&e| host.edge_index(e).is_some())
            .find(|&e| owner[host.edge_index(e).unwrap()].is_none())
    } else {
        None
    };
    let misshapen_copy = match expected_shape(d) {
        None => Some(0),
        Some((code, degrees)) => d
            .copies
            .par_iter()
            .position_first(|copy| edge_list_code(copy).as_ref() != Some(&code) || degree_multiset(copy) != degrees),
    };
    let expected_copies = if host.n == 0 {
        0
    } else {
        host.edge_count() / d.copies.first().map_or(1, |c| c.len().max(1))
    };
    let pass = duplicate.is_none()
        && foreign_edge.is_none()
        && missing_edge.is_none()
        && misshapen_copy.is_none()
        && covered == host.edge_count()
        && d.copies.len() == expected_copies;
    PartitionReport {
        host_edges: host.edge_count(),
        covered_edges: covered,
        copies: d.copies.len(),
        expected_copies,
        duplicate,
        foreign_edge,
        missing_edge,
        misshapen_copy,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::{find_beta, verify_beta};
    use crate::perm::Permutation;

    fn tree(g: &[usize]) -> FunctionalTree {
        FunctionalTree::from_parent_map(g.len(), g.to_vec()).unwrap()
    }

    #[test]
    fn orientation_examples() {
        let o = orient(&tree(&[0, 3, 3, 0]));
        let mut e = o.edges.clone();
        e.sort();
        assert_eq!(e, vec![(0, 4), (0, 7), (1, 7), (2, 7)]);
        assert_eq!(o.root_edge, (0, 4));
        assert_eq!(orient(&tree(&[0])).edges, vec![(0, 1)]);
        assert_eq!(orient(&tree(&[0, 0, 0])).edges, vec![(0, 3), (0, 4), (0, 5)]);
    }

    #[test]
    fn orientation_round_trips() {
        for entry in crate::catalog::catalog(7).unwrap() {
            for r in 0..7 {
                let t = entry.tree.reroot(r).unwrap();
                assert_eq!(orient(&t).to_functional_tree().unwrap(), t);
            }
        }
    }

    #[test]
    fn four_copy_directed_decomposition() {
        let t = tree(&[0, 0, 1, 1]);
        let lab = verify_beta(&t, &Permutation::new(vec![0, 3, 2, 1]).unwrap()).unwrap();
        let d = decompose_directed_knn(&t, &lab).unwrap();
        assert_eq!(d.copies.len(), 4);
        assert_eq!(d.copies[0], vec![(0, 4), (0, 7), (1, 7), (2, 7)]);
        assert_eq!(d.copies[1], vec![(1, 4), (1, 5), (2, 4), (3, 4)]);
        assert!(verify_partition(&d).pass);
    }

    #[test]
    fn right_shift_only_does_not_partition() {
        let t = tree(&[0, 0, 1, 1]);
        let lab = verify_beta(&t, &Permutation::new(vec![0, 3, 2, 1]).unwrap()).unwrap();
        let mut d = decompose_directed_knn(&t, &lab).unwrap();
        let base = orient(&lab.h).edges;
        d.copies = (0..4)
            .map(|i| base.iter().map(|&(a, b)| (a, 4 + (b - 4 + i) % 4)).collect())
            .collect();
        let r = verify_partition(&d);
        assert!(!r.pass && r.duplicate.is_some());
    }

    #[test]
    fn small_hosts() {
        let edge = tree(&[0, 0]);
        let lab = find_beta(&edge).unwrap();
        assert_eq!(decompose_k2n1(&edge, &lab, 1).unwrap().copies.len(), 3);
        assert_eq!(decompose_knxnx(&edge, &lab, 2).unwrap().copies.len(), 4);
        let star = tree(&[0, 0, 0, 0]);
        let lab = find_beta(&star).unwrap();
        let d = decompose_k2n1(&star, &lab, 2).unwrap();
        assert_eq!((d.copies.len(), d.host.edge_count()), (26, 78));
        let single = tree(&[0]);
        let d = decompose_directed_knn(&single, &find_beta(&single).unwrap()).unwrap();
        assert_eq!(d.copies, vec![vec![(0, 1)]]);
    }

    #[test]
    fn duplicated_edge_is_reported() {
        let t = tree(&[0, 0, 0]);
        let lab = find_beta(&t).unwrap();
        let mut d = decompose_directed_knn(&t, &lab).unwrap();
        d.copies[1][0] = d.copies[0][0];
        let r = verify_partition(&d);
        assert!(!r.pass);
        assert_eq!(r.duplicate.as_ref().unwrap().second_copy, 1);
    }

    #[test]
    fn rejects_labelings_of_other_trees() {
        let t = tree(&[0, 0, 1]);
        let lab = find_beta(&tree(&[0, 0, 0])).unwrap();
        assert!(matches!(
            decompose_directed_knn(&t, &lab),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
