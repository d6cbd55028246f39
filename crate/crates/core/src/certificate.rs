//! The polynomial certificate `P_g = V · E_g · N_g` and its canonical
//! representative modulo the falling factorials.
//!
//! With `e_v = (-1)^{d_g(v)} (x_{g(v)} - x_v)`:
//!
//! * `V = prod_{u<v} (x_v - x_u)` vanishes unless vertex labels are distinct,
//! * `E_g = prod_{u<v} (e_v - e_u)` vanishes unless edge labels are distinct,
//! * `N_g = prod_{v, 0<i<n} (e_v + i)` vanishes if an edge label is negative.
//!
//! All arithmetic here is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeling::{phi_set_capped, DEFAULT_EXHAUSTIVE_CAP};
use crate::perm::Permutation;
use crate::poly::{univariate_lagrange, DensePolynomial};
use crate::tree::FunctionalTree;

pub const DEFAULT_MAGNITUDE_CAP: usize = 7;
pub const DEFAULT_SYMBOLIC_CAP: usize = 4;
pub const DEFAULT_LATTICE_CAP: usize = 6;
pub const DEFAULT_COMPOSITION_CAP: usize = 6;

/// A point `f ∈ Z_n^{Z_n}`; entries need not be distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePoint(Vec<usize>);

impl LatticePoint {
    pub fn new(n: usize, f: Vec<usize>) -> Result<Self> {
        if f.len() != n {
            return Err(Error::MalformedInput(format!(
                "lattice point of length {} for n = {n}",
                f.len()
            )));
        }
        if let Some(&bad) = f.iter().find(|&&v| v >= n) {
            return Err(Error::MalformedInput(format!("lattice entry {bad} outside Z_{n}")));
        }
        Ok(LatticePoint(f))
    }

    /// The `index`-th point of `Z_n^{Z_n}`, with `f(0)` as the fastest digit.
    pub fn from_index(n: usize, mut index: u64) -> Self {
        let f = (0..n)
            .map(|_| {
                let d = index % n as u64;
                index /= n as u64;
                d as usize
            })
            .collect();
        LatticePoint(f)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

pub fn lattice_size(n: usize) -> u64 {
    (n as u64).pow(n as u32)
}

/// The three factors of `P_g(f)` and their product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateFactors {
    pub vertex: BigInt,
    pub edge: BigInt,
    pub range: BigInt,
}

impl CertificateFactors {
    pub fn value(&self) -> BigInt {
        &self.vertex * &self.edge * &self.range
    }
}

fn check_point(t: &FunctionalTree, f: &[usize]) -> Result<()> {
    LatticePoint::new(t.n(), f.to_vec()).map(|_| ())
}

fn edge_values(t: &FunctionalTree, f: &[usize]) -> Vec<i64> {
    (0..t.n())
        .map(|v| t.sign(v) * (f[t.parent(v)] as i64 - f[v] as i64))
        .collect()
}

pub fn certificate_factors(t: &FunctionalTree, f: &[usize]) -> Result<CertificateFactors> {
    check_point(t, f)?;
    let n = t.n();
    let e = edge_values(t, f);
    let mut vertex = BigInt::one();
    let mut edge = BigInt::one();
    for v in 0..n {
        for u in 0..v {
            vertex *= f[v] as i64 - f[u] as i64;
            edge *= e[v] - e[u];
        }
    }
    let mut range = BigInt::one();
    for &ev in &e {
        for i in 1..n as i64 {
            range *= ev + i;
        }
    }
    Ok(CertificateFactors { vertex, edge, range })
}

/// `P_g(f)` exactly.
pub fn eval_certificate(t: &FunctionalTree, f: &[usize]) -> Result<BigInt> {
    check_point(t, f)?;
    Ok(eval_unchecked(t, f))
}

/// Evaluation with a cheap zero test before any big-integer work.
fn eval_unchecked(t: &FunctionalTree, f: &[usize]) -> BigInt {
    let mut seen = 0u64;
    for &v in f {
        if seen & (1 << v) != 0 {
            return BigInt::zero();
        }
        seen |= 1 << v;
    }
    let e = edge_values(t, f);
    let mut seen_e = 0u64;
    for &ev in &e {
        if ev < 0 || seen_e & (1 << ev) != 0 {
            return BigInt::zero();
        }
        seen_e |= 1 << ev;
    }
    certificate_factors(t, f)
        .expect("point validated by the caller")
        .value()
}

/// `prod_{k<n} k! (n-1+k)!`.
pub fn expected_magnitude(n: usize) -> BigInt {
    let fact = |m: usize| (1..=m).fold(BigInt::one(), |acc, k| acc * k);
    (0..n).fold(BigInt::one(), |acc, k| acc * fact(k) * fact(n - 1 + k))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MagnitudeReport {
    pub n: usize,
    pub expected: String,
    pub phi_size: usize,
    /// Members of `Φ(g)` whose certificate magnitude differs, with the value found.
    pub mismatches: Vec<(Vec<usize>, String)>,
    pub pass: bool,
}

/// Checks `|P_g(f)| = prod k!(n-1+k)!` for every `f ∈ Φ(g)`.
pub fn certificate_magnitude_check(t: &FunctionalTree) -> Result<MagnitudeReport> {
    certificate_magnitude_check_capped(t, DEFAULT_MAGNITUDE_CAP)
}

pub fn certificate_magnitude_check_capped(t: &FunctionalTree, cap: usize) -> Result<MagnitudeReport> {
    if t.n() > cap {
        return Err(Error::limit("certificate magnitude check", t.n(), cap));
    }
    let expected = expected_magnitude(t.n());
    let phi = phi_set_capped(t, cap)?;
    let mismatches: Vec<(Vec<usize>, String)> = phi
        .iter()
        .filter_map(|s| {
            let value = eval_unchecked(t, s.as_slice());
            (value.abs() != expected).then(|| (s.as_slice().to_vec(), value.to_string()))
        })
        .collect();
    Ok(MagnitudeReport {
        n: t.n(),
        expected: expected.to_string(),
        phi_size: phi.len(),
        pass: mismatches.is_empty(),
        mismatches,
    })
}

/// Whether `P_g` is nonzero somewhere on the lattice, sweeping only `S_n`
/// (the factor `V` kills every other point).
pub fn nonvanishing_by_sweep(t: &FunctionalTree) -> Result<bool> {
    nonvanishing_by_sweep_capped(t, DEFAULT_EXHAUSTIVE_CAP)
}

pub fn nonvanishing_by_sweep_capped(t: &FunctionalTree, cap: usize) -> Result<bool> {
    if t.n() > cap {
        return Err(Error::limit("permutation sweep", t.n(), cap));
    }
    Ok(Permutation::all(t.n()).any(|s| !eval_unchecked(t, s.as_slice()).is_zero()))
}

/// The same question answered over all `n^n` lattice points.
pub fn nonvanishing_full_lattice(t: &FunctionalTree) -> Result<bool> {
    Ok(first_nonzero_lattice_point(t)?.is_some())
}

/// Lowest-index lattice point where `P_g` is nonzero.
pub fn first_nonzero_lattice_point(t: &FunctionalTree) -> Result<Option<LatticePoint>> {
    lattice_find_first(t.n(), |f| !eval_unchecked(t, f).is_zero())
}

/// Lowest-index non-injective lattice point where `P_g` is nonzero; `None`
/// confirms that the certificate vanishes off `S_n`.
pub fn nonzero_off_permutations(t: &FunctionalTree) -> Result<Option<LatticePoint>> {
    lattice_find_first(t.n(), |f| {
        let mut seen = 0u64;
        let injective = f.iter().all(|&v| {
            let fresh = seen & (1 << v) == 0;
            seen |= 1 << v;
            fresh
        });
        !injective && !eval_unchecked(t, f).is_zero()
    })
}

fn lattice_find_first(n: usize, pred: impl Fn(&[usize]) -> bool + Sync) -> Result<Option<LatticePoint>> {
    if n > DEFAULT_LATTICE_CAP {
        return Err(Error::limit("full lattice sweep", n, DEFAULT_LATTICE_CAP));
    }
    Ok((0..lattice_size(n))
        .into_par_iter()
        .map(|i| LatticePoint::from_index(n, i))
        .find_first(|p| pred(p.as_slice())))
}

/// `L_f`, equal to 1 at `f` and 0 at every other lattice point.
pub fn lagrange_basis(f: &[usize], n: usize) -> Result<DensePolynomial> {
    lagrange_basis_capped(f, n, DEFAULT_SYMBOLIC_CAP)
}

pub fn lagrange_basis_capped(f: &[usize], n: usize, cap: usize) -> Result<DensePolynomial> {
    if n > cap {
        return Err(Error::limit("Lagrange basis expansion", n, cap));
    }
    let point = LatticePoint::new(n, f.to_vec())?;
    let mut p = DensePolynomial::zero(n);
    p.add_tensor_product(&BigRational::one(), &lagrange_tables(n, point.as_slice()));
    Ok(p)
}

fn lagrange_tables(n: usize, f: &[usize]) -> Vec<Vec<BigRational>> {
    let univariate: Vec<Vec<BigRational>> = (0..n).map(|a| univariate_lagrange(n, a)).collect();
    f.iter().map(|&a| univariate[a].clone()).collect()
}

/// `sum_{f ∈ Φ(g)} P_g(f) L_f`, the canonical representative of `P_g`.
pub fn canonical_representative(t: &FunctionalTree) -> Result<DensePolynomial> {
    canonical_representative_capped(t, DEFAULT_SYMBOLIC_CAP)
}

pub fn canonical_representative_capped(t: &FunctionalTree, cap: usize) -> Result<DensePolynomial> {
    let n = t.n();
    if n > cap {
        return Err(Error::limit("canonical representative", n, cap));
    }
    let mut p = DensePolynomial::zero(n);
    for sigma in phi_set_capped(t, cap.max(n))? {
        let value = BigRational::from_integer(eval_unchecked(t, sigma.as_slice()));
        p.add_tensor_product(&value, &lagrange_tables(n, sigma.as_slice()));
    }
    Ok(p)
}

/// Lagrange interpolation of `P_g` over every lattice point, without using
/// the fact that only `Φ(g)` contributes.
pub fn interpolate_over_lattice(t: &FunctionalTree) -> Result<DensePolynomial> {
    let n = t.n();
    if n > DEFAULT_SYMBOLIC_CAP {
        return Err(Error::limit("lattice interpolation", n, DEFAULT_SYMBOLIC_CAP));
    }
    let mut p = DensePolynomial::zero(n);
    for i in 0..lattice_size(n) {
        let f = LatticePoint::from_index(n, i);
        let value = eval_unchecked(t, f.as_slice());
        if !value.is_zero() {
            p.add_tensor_product(&BigRational::from_integer(value), &lagrange_tables(n, f.as_slice()));
        }
    }
    Ok(p)
}

/// Expands `V · E_g · N_g` symbolically, reducing modulo the falling
/// factorials after each linear factor.
pub fn reduced_certificate(t: &FunctionalTree) -> Result<DensePolynomial> {
    let n = t.n();
    if n > DEFAULT_SYMBOLIC_CAP {
        return Err(Error::limit("symbolic certificate expansion", n, DEFAULT_SYMBOLIC_CAP));
    }
    // linear forms as (coefficient per variable, constant)
    let x = |i: usize| {
        let mut c = vec![0i64; n];
        c[i] = 1;
        (c, 0i64)
    };
    let sub = |a: &(Vec<i64>, i64), b: &(Vec<i64>, i64)| {
        (a.0.iter().zip(&b.0).map(|(p, q)| p - q).collect::<Vec<_>>(), a.1 - b.1)
    };
    let edge: Vec<(Vec<i64>, i64)> = (0..n)
        .map(|v| {
            let (c, k) = sub(&x(t.parent(v)), &x(v));
            (c.into_iter().map(|a| a * t.sign(v)).collect(), k)
        })
        .collect();
    let mut factors = Vec::new();
    for v in 0..n {
        for u in 0..v {
            factors.push(sub(&x(v), &x(u)));
            factors.push(sub(&edge[v], &edge[u]));
        }
    }
    for e in &edge {
        for i in 1..n as i64 {
            factors.push((e.0.clone(), e.1 + i));
        }
    }
    let mut acc = DensePolynomial::one(n);
    for (coeffs, constant) in factors {
        let mut terms = vec![(vec![0u32; n], BigRational::from_integer(constant.into()))];
        for (i, &c) in coeffs.iter().enumerate() {
            let mut e = vec![0u32; n];
            e[i] = 1;
            terms.push((e, BigRational::from_integer(c.into())));
        }
        acc = acc.mul(&DensePolynomial::from_terms(n, terms)?)?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub n: usize,
    pub phi_size: usize,
    pub table_terms: usize,
    pub table_nonzero: bool,
    pub lattice_points: u64,
    /// Lattice points where the table disagrees with direct evaluation.
    pub mismatches: Vec<Vec<usize>>,
    pub pass: bool,
}

/// Compares the canonical coefficient table with direct evaluation at every
/// lattice point, and its nonvanishing with `Φ(g) ≠ ∅`.
pub fn check_certificate_equivalence(t: &FunctionalTree) -> Result<EquivalenceReport> {
    let n = t.n();
    let table = canonical_representative(t)?;
    let phi_size = phi_set_capped(t, n)?.len();
    let mismatches: Vec<Vec<usize>> = (0..lattice_size(n))
        .into_par_iter()
        .map(|i| LatticePoint::from_index(n, i))
        .filter(|f| table.eval_lattice(f.as_slice()) != BigRational::from_integer(eval_unchecked(t, f.as_slice())))
        .map(|f| f.0)
        .collect();
    let table_nonzero = !table.is_zero();
    Ok(EquivalenceReport {
        n,
        phi_size,
        table_terms: table.len(),
        table_nonzero,
        lattice_points: lattice_size(n),
        pass: mismatches.is_empty() && table_nonzero == (phi_size > 0),
        mismatches,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TranspositionCheck {
    pub pair: (usize, usize),
    pub lattice_points: u64,
    /// A lattice point with `P_g(f ∘ τ) ≠ P_g(f)`, if any.
    pub witness: Option<Vec<usize>>,
    /// Whether the coefficient tables of `P̄_g(x)` and `P̄_g(x_τ)` agree;
    /// `None` above the symbolic cap.
    pub coefficients_invariant: Option<bool>,
}

impl TranspositionCheck {
    pub fn pass(&self) -> bool {
        self.witness.is_none() && self.coefficients_invariant != Some(false)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TranspositionReport {
    pub n: usize,
    pub checks: Vec<TranspositionCheck>,
    pub pass: bool,
}

/// Invariance of `P_g` and `P̄_g` under every transposition of sibling leaves.
pub fn check_transposition_invariance(t: &FunctionalTree) -> Result<TranspositionReport> {
    let pairs = t.sibling_leaf_pairs();
    if pairs.is_empty() {
        return Err(Error::PreconditionViolated("tree has no pair of sibling leaves".into()));
    }
    let checks = pairs
        .into_iter()
        .map(|(a, b)| transposition_check(t, a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(TranspositionReport {
        n: t.n(),
        pass: checks.iter().all(TranspositionCheck::pass),
        checks,
    })
}

/// The same check for an arbitrary transposition `(a b)`, sibling or not.
pub fn transposition_check(t: &FunctionalTree, a: usize, b: usize) -> Result<TranspositionCheck> {
    let n = t.n();
    if a >= n || b >= n || a == b {
        return Err(Error::MalformedInput(format!(
            "({a} {b}) is not a transposition of Z_{n}"
        )));
    }
    let witness = transposition_witness(t, a, b)?;
    let coefficients_invariant = if n <= DEFAULT_SYMBOLIC_CAP {
        let table = canonical_representative(t)?;
        let tau = Permutation::transposition(n, a, b);
        Some(table.substitute_variables(tau.as_slice()) == table)
    } else {
        None
    };
    Ok(TranspositionCheck {
        pair: (a, b),
        lattice_points: lattice_size(n),
        witness: witness.map(|p| p.0),
        coefficients_invariant,
    })
}

/// First lattice point `f` with `P_g(f ∘ (a b)) ≠ P_g(f)`.
pub fn transposition_witness(t: &FunctionalTree, a: usize, b: usize) -> Result<Option<LatticePoint>> {
    lattice_find_first(t.n(), |f| {
        let mut swapped = f.to_vec();
        swapped.swap(a, b);
        eval_unchecked(t, f) != eval_unchecked(t, &swapped)
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainStep {
    pub g: Vec<usize>,
    pub phi_nonempty: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompositionChain {
    pub tree: Vec<usize>,
    /// Normalized trees met along the collapse chain, ending at the star.
    pub collapse_steps: Vec<ChainStep>,
    pub collapse_rounds: usize,
    /// `g, g^(2), g^(4), .., g^(2^⌈log2(n-1)⌉)`.
    pub squaring_steps: Vec<ChainStep>,
    pub squaring_length: usize,
    pub implication_holds: bool,
    pub ends_constant: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompositionReport {
    pub n: usize,
    pub chains: Vec<CompositionChain>,
    pub pass: bool,
}

/// Normalizes and collapses leaf siblings until `g` is constant. Returns the
/// trees entering each round followed by the final star.
pub fn collapse_chain(t: &FunctionalTree) -> Result<Vec<FunctionalTree>> {
    let n = t.n();
    let mut steps = Vec::new();
    let mut current = t.clone();
    while !current.is_constant() {
        if steps.len() >= n * n {
            return Err(Error::VerificationFailed(format!(
                "collapse chain from {t:?} did not reach a star in {} rounds",
                n * n
            )));
        }
        current = current.normalize_for_collapse()?;
        steps.push(current.clone());
        current = current.collapse_leaf_siblings()?;
    }
    steps.push(current);
    Ok(steps)
}

/// `g, g^(2), g^(4), ..` with `⌈log2(n-1)⌉` squarings.
pub fn squaring_chain(t: &FunctionalTree) -> Vec<FunctionalTree> {
    let n = t.n();
    let squarings = if n <= 2 {
        0
    } else {
        (usize::BITS - (n - 2).leading_zeros()) as usize
    };
    let mut chain = vec![t.clone()];
    for _ in 0..squarings {
        let next = chain.last().expect("chain starts nonempty").iterate(2);
        chain.push(next);
    }
    chain
}

/// Walks both chains for one tree, checking `Φ(next) ≠ ∅ ⇒ Φ(prev) ≠ ∅`
/// through the certificate at every step.
pub fn composition_chain(t: &FunctionalTree) -> Result<CompositionChain> {
    let step = |g: &FunctionalTree| -> Result<ChainStep> {
        Ok(ChainStep {
            g: g.parent_map().to_vec(),
            phi_nonempty: nonvanishing_by_sweep(g)?,
        })
    };
    let collapse = collapse_chain(t)?;
    let squares = squaring_chain(t);
    let collapse_steps = collapse.iter().map(step).collect::<Result<Vec<_>>>()?;
    let squaring_steps = squares.iter().map(step).collect::<Result<Vec<_>>>()?;
    let implies = |steps: &[ChainStep]| steps.windows(2).all(|w| !w[1].phi_nonempty || w[0].phi_nonempty);
    let ends_constant = collapse.last().is_some_and(FunctionalTree::is_constant)
        && squares.last().is_some_and(FunctionalTree::is_constant)
        && t.iterate(t.n().saturating_sub(1)).is_constant();
    Ok(CompositionChain {
        tree: t.parent_map().to_vec(),
        collapse_rounds: collapse.len() - 1,
        squaring_length: squares.len() - 1,
        implication_holds: implies(&collapse_steps) && implies(&squaring_steps),
        ends_constant,
        collapse_steps,
        squaring_steps,
    })
}

/// Runs [`composition_chain`] over the whole catalog for `n`.
pub fn check_composition_implication(n: usize) -> Result<CompositionReport> {
    if n > DEFAULT_COMPOSITION_CAP {
        return Err(Error::limit(
            "composition implication sweep",
            n,
            DEFAULT_COMPOSITION_CAP,
        ));
    }
    let chains = crate::catalog::catalog(n)?
        .iter()
        .map(|e| composition_chain(&e.tree))
        .collect::<Result<Vec<_>>>()?;
    Ok(CompositionReport {
        n,
        pass: chains.iter().all(|c| c.implication_holds && c.ends_constant),
        chains,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonomialSupportReport {
    pub n: usize,
    pub bases_checked: usize,
    /// `(σ, exponent vector)` pairs with two or more zero exponents.
    pub violations: Vec<(Vec<usize>, Vec<u32>)>,
    pub pass: bool,
}

/// Every monomial of every `L_σ`, `σ ∈ S_n`, involves at least `n - 1` variables.
pub fn check_monomial_support(n: usize) -> Result<MonomialSupportReport> {
    if n > DEFAULT_SYMBOLIC_CAP {
        return Err(Error::limit("monomial support check", n, DEFAULT_SYMBOLIC_CAP));
    }
    let mut violations = Vec::new();
    let mut bases_checked = 0;
    for sigma in Permutation::all(n) {
        let basis = lagrange_basis(sigma.as_slice(), n)?;
        bases_checked += 1;
        for (e, _) in basis.terms() {
            if e.iter().filter(|&&d| d == 0).count() > 1 {
                violations.push((sigma.as_slice().to_vec(), e));
            }
        }
    }
    Ok(MonomialSupportReport {
        n,
        bases_checked,
        pass: violations.is_empty(),
        violations,
    })
}

#[derive(Clone, Debug)]
pub struct VariableDependencyReport {
    pub reduced: DensePolynomial,
    pub touched: Vec<usize>,
    pub pass: bool,
}

/// Reduces `p^t` modulo the falling factorials and confirms that only
/// variables of `support` survive.
pub fn check_variable_dependency(
    p: &DensePolynomial,
    support: &[usize],
    t_power: u32,
    n: usize,
) -> Result<VariableDependencyReport> {
    if p.n_vars() != n {
        return Err(Error::MalformedInput(format!(
            "polynomial in {} variables for n = {n}",
            p.n_vars()
        )));
    }
    if t_power == 0 {
        return Err(Error::MalformedInput("the power must be positive".into()));
    }
    if support.iter().any(|&i| i >= n) || support.len() >= n {
        return Err(Error::PreconditionViolated(
            "support must be a proper subset of Z_n".into(),
        ));
    }
    let outside = |vars: &[usize]| vars.iter().any(|v| !support.contains(v));
    if outside(&p.touched_variables()) {
        return Err(Error::PreconditionViolated(
            "the polynomial already involves variables outside the support".into(),
        ));
    }
    let reduced = p.pow(t_power)?;
    let touched = reduced.touched_variables();
    Ok(VariableDependencyReport {
        pass: !outside(&touched),
        touched,
        reduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;

    fn tree(g: &[usize]) -> FunctionalTree {
        FunctionalTree::from_parent_map(g.len(), g.to_vec()).unwrap()
    }

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn two_vertex_values() {
        let t = tree(&[0, 0]);
        let f = certificate_factors(&t, &[0, 1]).unwrap();
        assert_eq!((f.vertex, f.edge, f.range), (1.into(), 1.into(), 2.into()));
        assert_eq!(eval_certificate(&t, &[0, 1]).unwrap(), BigInt::from(2));
        assert_eq!(eval_certificate(&t, &[1, 0]).unwrap(), BigInt::zero());
        assert_eq!(eval_certificate(&t, &[1, 1]).unwrap(), BigInt::zero());
        assert!(eval_certificate(&t, &[0, 2]).is_err());
    }

    #[test]
    fn fast_path_agrees_with_factors() {
        for entry in catalog(4).unwrap() {
            for i in 0..lattice_size(4) {
                let f = LatticePoint::from_index(4, i);
                let slow = certificate_factors(&entry.tree, f.as_slice()).unwrap().value();
                assert_eq!(eval_unchecked(&entry.tree, f.as_slice()), slow);
            }
        }
    }

    #[test]
    fn magnitude_small_cases() {
        assert_eq!(expected_magnitude(1), BigInt::one());
        assert_eq!(expected_magnitude(2), BigInt::from(2));
        let r = certificate_magnitude_check(&tree(&[0, 0])).unwrap();
        assert!(r.pass);
        assert_eq!(r.phi_size, 1);
        assert!(certificate_magnitude_check(&tree(&[0])).unwrap().pass);
        assert!(certificate_magnitude_check(&tree(&[0; 8])).is_err());
    }

    #[test]
    fn two_variable_lagrange_basis() {
        let l = lagrange_basis(&[0, 1], 2).unwrap();
        // (1 - x0) x1 = x1 - x0 x1
        assert_eq!(l.coefficient(&[0, 1]), q(1));
        assert_eq!(l.coefficient(&[1, 1]), q(-1));
        assert_eq!(l.len(), 2);
        assert!(lagrange_basis(&[0], 1).unwrap() == DensePolynomial::one(1));
        assert!(lagrange_basis(&[0; 5], 5).is_err());
    }

    #[test]
    fn canonical_representative_of_the_edge() {
        let c = canonical_representative(&tree(&[0, 0])).unwrap();
        assert_eq!(c, lagrange_basis(&[0, 1], 2).unwrap().scale(&q(2)));
        assert_eq!(canonical_representative(&tree(&[0])).unwrap(), DensePolynomial::one(1));
    }

    #[test]
    fn three_routes_to_the_canonical_representative_agree() {
        for n in 1..=4 {
            for entry in catalog(n).unwrap() {
                let t = &entry.tree;
                let by_phi = canonical_representative(t).unwrap();
                assert_eq!(by_phi, interpolate_over_lattice(t).unwrap(), "{t:?}");
                assert_eq!(by_phi, reduced_certificate(t).unwrap(), "{t:?}");
            }
        }
    }

    #[test]
    fn equivalence_report() {
        let r = check_certificate_equivalence(&tree(&[0, 0, 1])).unwrap();
        assert!(r.pass && r.table_nonzero);
        assert_eq!(r.lattice_points, 27);
    }

    #[test]
    fn transposition_examples() {
        let r = check_transposition_invariance(&tree(&[0, 0, 1, 1])).unwrap();
        assert!(r.pass);
        assert_eq!(r.checks[0].pair, (2, 3));
        assert!(check_transposition_invariance(&tree(&[0, 0, 0])).unwrap().pass);
        let control = transposition_check(&tree(&[0, 0, 1, 1]), 1, 2).unwrap();
        assert!(!control.pass());
        assert!(control.witness.is_some());
        assert!(matches!(
            check_transposition_invariance(&tree(&[0, 0, 1])),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn composition_examples() {
        let end_rooted_path = composition_chain(&tree(&[0, 0, 1, 2])).unwrap();
        assert_eq!(end_rooted_path.squaring_length, 2);
        assert!(end_rooted_path.implication_holds && end_rooted_path.ends_constant);
        let star = composition_chain(&tree(&[0, 0, 0, 0])).unwrap();
        assert_eq!(star.collapse_rounds, 0);
        assert!(check_composition_implication(4).unwrap().pass);
        assert!(check_composition_implication(7).is_err());
    }

    #[test]
    fn monomial_support_small() {
        for n in 1..=3 {
            let r = check_monomial_support(n).unwrap();
            assert!(r.pass);
            assert_eq!(r.bases_checked, (1..=n).product::<usize>());
        }
    }

    #[test]
    fn variable_dependency_examples() {
        let x0 = DensePolynomial::variable(2, 0).unwrap();
        let r = check_variable_dependency(&x0, &[0], 2, 2).unwrap();
        assert!(r.pass);
        assert_eq!(r.reduced, x0);
        let c = DensePolynomial::constant(3, q(5));
        let r = check_variable_dependency(&c, &[], 4, 3).unwrap();
        assert!(r.pass && r.touched.is_empty());
        let x0x1 = DensePolynomial::variable(3, 0)
            .unwrap()
            .mul(&DensePolynomial::variable(3, 1).unwrap())
            .unwrap();
        let r = check_variable_dependency(&x0x1, &[0, 1], 2, 3).unwrap();
        assert!(r.pass);
        assert!(check_variable_dependency(&x0x1, &[0], 2, 3).is_err());
    }
}
