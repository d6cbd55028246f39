//! Unitary apportionment of `I_n ⊗ A` for the bi-adjacency matrix `A` of a
//! left-to-right oriented tree, checked numerically.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decomposition::orient;
use crate::error::{Error, Result};
use crate::labeling::{is_beta, Labeling};
use crate::perm::Permutation;
use crate::tree::FunctionalTree;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        ComplexMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::MalformedInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::MalformedInput("adding matrices of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖M M* − I‖_max`.
    pub fn unitarity_residual(&self) -> Result<f64> {
        Ok(self
            .mul(&self.adjoint())?
            .max_abs_diff(&ComplexMatrix::identity(self.rows)))
    }

    pub fn pow(&self, k: u32) -> Result<ComplexMatrix> {
        (0..k).try_fold(ComplexMatrix::identity(self.rows), |acc, _| acc.mul(self))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `A(i, j) = 1` exactly when `(i, n + j)` is an edge of the orientation.
pub fn biadjacency(t: &FunctionalTree) -> ComplexMatrix {
    let n = t.n();
    let mut a = ComplexMatrix::zeros(n, n);
    for (i, y) in orient(t).edges {
        a[(i, y - n)] = one();
    }
    a
}

/// `P̂` with `P̂[σ(i), i] = 1`, so that `P̂ A P̂*` relabels vertex `i` as `σ(i)`.
pub fn permutation_matrix(sigma: &Permutation) -> ComplexMatrix {
    let n = sigma.len();
    let mut p = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        p[(sigma[i], i)] = one();
    }
    p
}

/// `C_n`, the adjacency matrix of the directed cycle `i → i + 1`.
pub fn circulant(n: usize) -> ComplexMatrix {
    let mut c = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        c[(i, (i + 1) % n)] = one();
    }
    c
}

/// The `n² × n²` unitary whose `(i, j)` block is `C_n^j diag(w)^i / √n`,
/// `w = (1, ω, .., ω^{n-1})`, `ω = e^{2πi/n}`.
pub fn build_block_unitary(n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    let omega = |k: usize| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k % n) as f64 / n as f64);
    ComplexMatrix::from_fn(n * n, n * n, |row, col| {
        let (i, a) = (row / n, row % n);
        let (j, b) = (col / n, col % n);
        // (C^j)[a, b] = 1 iff b = a + j; diag(w)^i contributes ω^{i b}
        if b == (a + j) % n {
            omega(i * b) * scale
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `sum_j C^j M C^{-j}`.
pub fn circulant_sum(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.rows();
    let c = circulant(n);
    let c_inv = c.adjoint();
    let mut acc = ComplexMatrix::zeros(n, n);
    let (mut cj, mut cj_inv) = (ComplexMatrix::identity(n), ComplexMatrix::identity(n));
    for _ in 0..n {
        acc = acc.add(&cj.mul(m)?.mul(&cj_inv)?)?;
        cj = cj.mul(&c)?;
        cj_inv = cj_inv.mul(&c_inv)?;
    }
    Ok(acc)
}

fn check_labeling(t: &FunctionalTree, lab: &Labeling) -> Result<()> {
    if lab.sigma.len() != t.n() || !is_beta(t, &lab.sigma) {
        return Err(Error::PreconditionViolated(
            "the labeling is not an oriented beta-labeling of this tree".into(),
        ));
    }
    Ok(())
}

/// `𝒜 = P̂ A P̂*`.
pub fn relabelled_biadjacency(t: &FunctionalTree, sigma: &Permutation) -> Result<ComplexMatrix> {
    let p = permutation_matrix(sigma);
    p.mul(&biadjacency(t))?.mul(&p.adjoint())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AllOnesReport {
    pub n: usize,
    pub max_deviation: f64,
    pub worst_entry: (usize, usize),
    pub pass: bool,
}

pub fn allones_report(m: &ComplexMatrix, tol: f64) -> Result<AllOnesReport> {
    let sum = circulant_sum(m)?;
    let n = m.rows();
    let mut worst = (0.0, (0, 0));
    for i in 0..n {
        for j in 0..n {
            let d = (sum[(i, j)] - one()).norm();
            if d > worst.0 {
                worst = (d, (i, j));
            }
        }
    }
    Ok(AllOnesReport {
        n,
        max_deviation: worst.0,
        worst_entry: worst.1,
        pass: worst.0 <= tol,
    })
}

/// Checks `1_{n×n} = sum_j C^j 𝒜 C^{-j}`.
pub fn check_allones_identity(t: &FunctionalTree, lab: &Labeling) -> Result<AllOnesReport> {
    check_labeling(t, lab)?;
    let report = allones_report(&relabelled_biadjacency(t, &lab.sigma)?, DEFAULT_TOLERANCE)?;
    if !report.pass {
        return Err(Error::VerificationFailed(format!(
            "circulant sum deviates from the all-ones matrix by {:e} at {:?}",
            report.max_deviation, report.worst_entry
        )));
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApportionmentReport {
    pub n: usize,
    pub kappa: f64,
    /// `max | |M_{ab}| − 1/n |` over all entries of `M = Q (I ⊗ A) Q*`.
    pub kappa_max_error: f64,
    pub worst_entry: (usize, usize),
    pub worst_modulus: f64,
    pub unitary_residual: f64,
    pub q_unitary_residual: f64,
    /// `‖Q (I ⊗ A) Q* − U (I ⊗ 𝒜) U*‖_max`.
    pub block_identity_residual: f64,
    /// Uniformity error of the conjugated variant `U (I ⊗ P̂) U*`;
    /// informational, not part of `pass`.
    pub conjugated_q_kappa_error: f64,
    /// `‖I ⊗ A‖_F²`, which must equal `n²`.
    pub input_frobenius_sq: f64,
    /// `| ‖M‖_F / n² − 1/n |`.
    pub frobenius_consistency_error: f64,
    pub allones: AllOnesReport,
    pub pass: bool,
}

/// The apportioning matrix `Q = U (I ⊗ P̂)`. It is the unitary for which
/// `Q (I ⊗ A) Q* = U (I ⊗ 𝒜) U*`.
pub fn apportioning_matrix(sigma: &Permutation) -> Result<ComplexMatrix> {
    let n = sigma.len();
    build_block_unitary(n).mul(&ComplexMatrix::identity(n).kron(&permutation_matrix(sigma)))
}

/// `U (I ⊗ P̂) U*`, the conjugated variant, whose action on `I ⊗ A` is in
/// general not uniform. It is kept for comparison.
pub fn conjugated_permutation_unitary(sigma: &Permutation) -> Result<ComplexMatrix> {
    let n = sigma.len();
    let u = build_block_unitary(n);
    u.mul(&ComplexMatrix::identity(n).kron(&permutation_matrix(sigma)))?
        .mul(&u.adjoint())
}

/// `q (I ⊗ A) q*`.
pub fn conjugate_block_diagonal(q: &ComplexMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let id = ComplexMatrix::identity(a.rows());
    q.mul(&id.kron(a))?.mul(&q.adjoint())
}

/// `(Q, M)` with `Q` from [`apportioning_matrix`] and `M = Q (I ⊗ A) Q*`.
pub fn apportioned_matrix(t: &FunctionalTree, sigma: &Permutation) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let q = apportioning_matrix(sigma)?;
    let m = conjugate_block_diagonal(&q, &biadjacency(t))?;
    Ok((q, m))
}

/// Largest deviation `max | |M_{ab}| − κ |` and where it occurs.
pub fn uniformity_error(m: &ComplexMatrix, kappa: f64) -> (f64, (usize, usize), f64) {
    let mut worst = (0.0, (0, 0), kappa);
    for a in 0..m.rows() {
        for b in 0..m.cols() {
            let modulus = m[(a, b)].norm();
            let err = (modulus - kappa).abs();
            if err > worst.0 {
                worst = (err, (a, b), modulus);
            }
        }
    }
    worst
}

pub fn apportionment_report(t: &FunctionalTree, lab: &Labeling, tol: f64) -> Result<ApportionmentReport> {
    check_labeling(t, lab)?;
    let n = t.n();
    let kappa = 1.0 / n as f64;
    let u = build_block_unitary(n);
    let unitary_residual = u.unitarity_residual()?;
    let (q, m) = apportioned_matrix(t, &lab.sigma)?;
    let worst = uniformity_error(&m, kappa);
    let relabelled = relabelled_biadjacency(t, &lab.sigma)?;
    let block_identity_residual = m.max_abs_diff(&conjugate_block_diagonal(&u, &relabelled)?);
    let conjugated = conjugate_block_diagonal(&conjugated_permutation_unitary(&lab.sigma)?, &biadjacency(t))?;
    let conjugated_q_kappa_error = uniformity_error(&conjugated, kappa).0;
    let input = ComplexMatrix::identity(n).kron(&biadjacency(t));
    let allones = allones_report(&relabelled, tol)?;
    let q_unitary_residual = q.unitarity_residual()?;
    let frobenius_consistency_error = (m.frobenius_norm() / (n * n) as f64 - kappa).abs();
    let input_frobenius_sq = input.frobenius_norm().powi(2);
    let pass = worst.0 <= tol
        && unitary_residual <= tol
        && q_unitary_residual <= tol
        && block_identity_residual <= tol
        && frobenius_consistency_error <= tol
        && (input_frobenius_sq - (n * n) as f64).abs() <= tol
        && allones.pass;
    Ok(ApportionmentReport {
        n,
        kappa,
        kappa_max_error: worst.0,
        worst_entry: worst.1,
        worst_modulus: worst.2,
        unitary_residual,
        q_unitary_residual,
        block_identity_residual,
        conjugated_q_kappa_error,
        input_frobenius_sq,
        frobenius_consistency_error,
        allones,
        pass,
    })
}

/// Every entry of `Q (I ⊗ A) Q*` has modulus `1/n` within 1e-9.
pub fn check_apportionment(t: &FunctionalTree, lab: &Labeling) -> Result<ApportionmentReport> {
    let report = apportionment_report(t, lab, DEFAULT_TOLERANCE)?;
    if !report.pass {
        return Err(Error::VerificationFailed(format!(
            "entry {:?} has modulus {} (κ = {}; unitary residual {:e})",
            report.worst_entry, report.worst_modulus, report.kappa, report.unitary_residual
        )));
    }
    Ok(report)
}

/// Largest relative gap between `tr(M^k)` and `tr((I ⊗ A)^k)` for
/// `k = 1..=n²`; the power sums fix the eigenvalue multiset.
pub fn spectrum_gap(t: &FunctionalTree, sigma: &Permutation) -> Result<f64> {
    let n = t.n();
    let (_, m) = apportioned_matrix(t, sigma)?;
    let a = biadjacency(t);
    let mut mk = ComplexMatrix::identity(n * n);
    let mut ak = ComplexMatrix::identity(n);
    let mut gap: f64 = 0.0;
    for _ in 0..n * n {
        mk = mk.mul(&m)?;
        ak = ak.mul(&a)?;
        let expected = ak.trace() * n as f64;
        let scale = ak.frobenius_norm().max(1.0) * n as f64;
        gap = gap.max((mk.trace() - expected).norm() / scale);
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::{find_beta, verify_beta};

    fn tree(g: &[usize]) -> FunctionalTree {
        FunctionalTree::from_parent_map(g.len(), g.to_vec()).unwrap()
    }

    #[test]
    fn biadjacency_examples() {
        let a = biadjacency(&tree(&[0, 3, 3, 0]));
        let ones: Vec<(usize, usize)> = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|&(i, j)| a[(i, j)] == one())
            .collect();
        assert_eq!(ones, vec![(0, 0), (0, 3), (1, 3), (2, 3)]);
        assert_eq!(biadjacency(&tree(&[0])), ComplexMatrix::identity(1));
        let star = biadjacency(&tree(&[0, 0, 0]));
        assert!((0..3).all(|j| star[(0, j)] == one() && star[(1, j)].norm() == 0.0));
    }

    #[test]
    fn block_unitary() {
        for n in 1..=6 {
            assert!(build_block_unitary(n).unitarity_residual().unwrap() < 1e-12);
        }
        let u = build_block_unitary(2);
        // block (1, 0) is diag(1, -1)/√2
        assert!((u[(3, 1)] + Complex64::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn worked_tree_passes() {
        let t = tree(&[0, 0, 1, 1]);
        let lab = verify_beta(&t, &Permutation::new(vec![0, 3, 2, 1]).unwrap()).unwrap();
        assert!(check_allones_identity(&t, &lab).unwrap().pass);
        let r = check_apportionment(&t, &lab).unwrap();
        assert!(r.kappa_max_error < 1e-12);
        assert!((r.input_frobenius_sq - 16.0).abs() < 1e-12);
    }

    #[test]
    fn single_vertex() {
        let t = tree(&[0]);
        let r = check_apportionment(&t, &find_beta(&t).unwrap()).unwrap();
        assert_eq!(r.kappa, 1.0);
        assert!(r.kappa_max_error < 1e-15);
    }

    #[test]
    fn raw_biadjacency_is_a_negative_control() {
        let path = tree(&[0, 0, 1, 2]);
        assert!(!allones_report(&biadjacency(&path), DEFAULT_TOLERANCE).unwrap().pass);
    }

    #[test]
    fn wrong_permutation_convention_fails() {
        // P̂[i, σ(i)] = 1 relabels by σ^{-1} instead
        let t = tree(&[0, 0, 1, 2]);
        let lab = find_beta(&t).unwrap();
        assert!(
            !lab.sigma.inverse().eq(&lab.sigma),
            "pick a labeling that is not an involution"
        );
        let p = permutation_matrix(&lab.sigma).adjoint();
        let wrong = p.mul(&biadjacency(&t)).unwrap().mul(&p.adjoint()).unwrap();
        assert!(!allones_report(&wrong, DEFAULT_TOLERANCE).unwrap().pass);
    }

    #[test]
    fn conjugated_permutation_unitary_is_not_apportioning() {
        let t = tree(&[0, 0, 1, 1]);
        let lab = verify_beta(&t, &Permutation::new(vec![0, 3, 2, 1]).unwrap()).unwrap();
        let r = apportionment_report(&t, &lab, DEFAULT_TOLERANCE).unwrap();
        assert!(r.pass);
        assert!(r.conjugated_q_kappa_error > 0.1);
    }

    #[test]
    fn spectrum_is_preserved() {
        let t = tree(&[0, 0, 1, 1, 0]);
        let lab = find_beta(&t).unwrap();
        assert!(spectrum_gap(&t, &lab.sigma).unwrap() < 1e-7);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(ComplexMatrix::zeros(2, 3).mul(&ComplexMatrix::zeros(2, 3)).is_err());
    }
}
