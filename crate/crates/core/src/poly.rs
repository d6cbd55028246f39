//! Exact multivariate polynomials over `Q` reduced modulo the falling
//! factorials `x_i (x_i - 1) ... (x_i - n + 1)`.
//!
//! A [`DensePolynomial`] in `n` variables keeps every exponent below `n`, so it
//! is the unique representative of its class that agrees with the class on the
//! lattice `(Z_n)^n`. Exponent vectors are packed base `n`, variable 0 in the
//! least significant digit.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Substitution rounds allowed per reduction before it is declared divergent.
pub const REDUCTION_ROUND_CAP: usize = 10_000;

#[derive(Clone, PartialEq, Eq)]
pub struct DensePolynomial {
    n_vars: usize,
    coeffs: BTreeMap<u64, BigRational>,
}

impl DensePolynomial {
    pub fn zero(n_vars: usize) -> Self {
        DensePolynomial {
            n_vars,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: BigRational) -> Self {
        let mut p = DensePolynomial::zero(n_vars);
        p.add_term(0, c);
        p
    }

    pub fn one(n_vars: usize) -> Self {
        DensePolynomial::constant(n_vars, BigRational::one())
    }

    /// Builds a polynomial from `(exponents, coefficient)` terms, reducing any
    /// exponent that reaches `n_vars`.
    pub fn from_terms<I>(n_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigRational)>,
    {
        let mut sparse = SparsePoly::default();
        for (e, c) in terms {
            if e.len() != n_vars {
                return Err(Error::MalformedInput(format!(
                    "exponent vector of length {} for {n_vars} variables",
                    e.len()
                )));
            }
            sparse.add(e, c);
        }
        reduce(sparse, n_vars)
    }

    /// `x_i` (for `n_vars = 1`, `x_0` reduces to the constant 0).
    pub fn variable(n_vars: usize, i: usize) -> Result<Self> {
        if i >= n_vars {
            return Err(Error::MalformedInput(format!("variable x_{i} with {n_vars} variables")));
        }
        let mut e = vec![0; n_vars];
        e[i] = 1;
        DensePolynomial::from_terms(n_vars, [(e, BigRational::one())])
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn pack(&self, e: &[u32]) -> u64 {
        e.iter().rev().fold(0u64, |acc, &d| acc * self.n_vars as u64 + d as u64)
    }

    pub fn unpack(&self, mut key: u64) -> Vec<u32> {
        let base = self.n_vars as u64;
        (0..self.n_vars)
            .map(|_| {
                let d = key % base;
                key /= base;
                d as u32
            })
            .collect()
    }

    pub fn coefficient(&self, e: &[u32]) -> BigRational {
        if e.len() != self.n_vars || e.iter().any(|&d| d as usize >= self.n_vars) {
            return BigRational::zero();
        }
        self.coeffs
            .get(&self.pack(e))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Nonzero terms in packed-key order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<u32>, &BigRational)> + '_ {
        self.coeffs.iter().map(|(&k, c)| (self.unpack(k), c))
    }

    fn add_term(&mut self, key: u64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(key).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    /// Adds `c * prod_i table_i[e_i]` over every exponent vector, where each
    /// table is a univariate coefficient list of length `n_vars`.
    pub(crate) fn add_tensor_product(&mut self, c: &BigRational, tables: &[Vec<BigRational>]) {
        let n = self.n_vars;
        let total = (n as u64).pow(n as u32);
        let mut e = vec![0u32; n];
        for key in 0..total {
            let mut k = key;
            for d in e.iter_mut() {
                *d = (k % n as u64) as u32;
                k /= n as u64;
            }
            let mut term = c.clone();
            for (i, &d) in e.iter().enumerate() {
                let t = &tables[i][d as usize];
                if t.is_zero() {
                    term = BigRational::zero();
                    break;
                }
                term *= t;
            }
            self.add_term(key, term);
        }
    }

    pub fn add(&self, other: &DensePolynomial) -> Result<DensePolynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (&k, c) in &other.coeffs {
            out.add_term(k, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> DensePolynomial {
        let mut out = DensePolynomial::zero(self.n_vars);
        for (&k, v) in &self.coeffs {
            out.add_term(k, v * c);
        }
        out
    }

    /// Product reduced back into canonical form.
    pub fn mul(&self, other: &DensePolynomial) -> Result<DensePolynomial> {
        self.check_compatible(other)?;
        let mut sparse = SparsePoly::default();
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let e = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                sparse.add(e, ca * cb);
            }
        }
        reduce(sparse, self.n_vars)
    }

    /// `self^t`, reduced after every multiplication.
    pub fn pow(&self, t: u32) -> Result<DensePolynomial> {
        let mut acc = DensePolynomial::one(self.n_vars);
        for _ in 0..t {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Value at a rational point.
    pub fn eval(&self, z: &[BigRational]) -> BigRational {
        assert_eq!(z.len(), self.n_vars, "evaluation point has the wrong dimension");
        let mut total = BigRational::zero();
        for (e, c) in self.terms() {
            let mut term = c.clone();
            for (zi, &d) in z.iter().zip(&e) {
                for _ in 0..d {
                    term *= zi;
                }
            }
            total += term;
        }
        total
    }

    /// Value at a lattice point `f ∈ Z_n^{Z_n}`.
    pub fn eval_lattice(&self, f: &[usize]) -> BigRational {
        let z: Vec<BigRational> = f.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect();
        self.eval(&z)
    }

    /// Variables carrying a positive exponent in some nonzero term.
    pub fn touched_variables(&self) -> Vec<usize> {
        let mut touched = vec![false; self.n_vars];
        for (e, _) in self.terms() {
            for (i, &d) in e.iter().enumerate() {
                touched[i] |= d > 0;
            }
        }
        (0..self.n_vars).filter(|&i| touched[i]).collect()
    }

    /// The polynomial `p(x_{τ(0)}, .., x_{τ(n-1)})`.
    pub fn substitute_variables(&self, tau: &[usize]) -> DensePolynomial {
        assert_eq!(tau.len(), self.n_vars, "variable map has the wrong length");
        let mut out = DensePolynomial::zero(self.n_vars);
        for (e, c) in self.terms() {
            let mut moved = vec![0u32; self.n_vars];
            for (i, &d) in e.iter().enumerate() {
                moved[tau[i]] += d;
            }
            let key = out.pack(&moved);
            out.add_term(key, c.clone());
        }
        out
    }

    fn check_compatible(&self, other: &DensePolynomial) -> Result<()> {
        if self.n_vars != other.n_vars {
            return Err(Error::MalformedInput(format!(
                "polynomials in {} and {} variables",
                self.n_vars, other.n_vars
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for DensePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &d) in e.iter().enumerate() {
                match d {
                    0 => {}
                    1 => write!(f, "·x{i}")?,
                    _ => write!(f, "·x{i}^{d}")?,
                }
            }
        }
        Ok(())
    }
}

/// Unreduced terms with unbounded exponents.
#[derive(Default)]
struct SparsePoly {
    terms: HashMap<Vec<u32>, BigRational>,
}

impl SparsePoly {
    fn add(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
    }
}

/// Coefficients of `x^n - x(x-1)...(x-n+1)`, a polynomial of degree `< n`.
fn falling_factorial_remainder(n: usize) -> Vec<BigInt> {
    // x^(n falling) built up one factor at a time, ascending powers
    let mut ff = vec![BigInt::one()];
    for j in 0..n {
        let mut next = vec![BigInt::zero(); ff.len() + 1];
        for (k, c) in ff.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * BigInt::from(j);
        }
        ff = next;
    }
    ff.truncate(n);
    ff.into_iter().map(|c| -c).collect()
}

/// Repeatedly replaces `(x_i)^n` by `x_i^n - x_i^(n falling)` until every
/// exponent is below `n`.
fn reduce(mut p: SparsePoly, n: usize) -> Result<DensePolynomial> {
    let mut out = DensePolynomial::zero(n);
    if n == 0 {
        return Ok(out);
    }
    let rem = falling_factorial_remainder(n);
    let n32 = n as u32;
    let mut rounds = 0;
    loop {
        let mut pending = SparsePoly::default();
        for (e, c) in p.terms.drain() {
            if c.is_zero() {
                continue;
            }
            match e.iter().position(|&d| d >= n32) {
                None => {
                    let key = out.pack(&e);
                    out.add_term(key, c);
                }
                Some(i) => {
                    for (k, r) in rem.iter().enumerate() {
                        if r.is_zero() {
                            continue;
                        }
                        let mut e2 = e.clone();
                        e2[i] = e[i] - n32 + k as u32;
                        pending.add(e2, &c * BigRational::from_integer(r.clone()));
                    }
                }
            }
        }
        if pending.terms.values().all(|c| c.is_zero()) {
            return Ok(out);
        }
        rounds += 1;
        if rounds > REDUCTION_ROUND_CAP {
            return Err(Error::ReductionDiverged(rounds));
        }
        p = pending;
    }
}

/// Coefficients (ascending powers) of the univariate Lagrange basis
/// `prod_{j != a} (x - j) / (a - j)` on the nodes `0, .., n-1`.
pub(crate) fn univariate_lagrange(n: usize, a: usize) -> Vec<BigRational> {
    let mut poly = vec![BigRational::one()];
    for j in (0..n).filter(|&j| j != a) {
        let denom = BigRational::from_integer(BigInt::from(a as i64 - j as i64));
        let mut next = vec![BigRational::zero(); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            let c = c / &denom;
            next[k + 1] += &c;
            next[k] -= c * BigRational::from_integer(BigInt::from(j));
        }
        poly = next;
    }
    poly.resize(n, BigRational::zero());
    poly
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn falling_factorial_remainders() {
        // x^2 - x(x-1) = x
        assert_eq!(falling_factorial_remainder(2), vec![BigInt::zero(), BigInt::one()]);
        // x^3 - x(x-1)(x-2) = 3x^2 - 2x
        assert_eq!(
            falling_factorial_remainder(3),
            vec![BigInt::zero(), BigInt::from(-2), BigInt::from(3)]
        );
    }

    #[test]
    fn x_squared_reduces_to_x_for_two_variables() {
        let x0 = DensePolynomial::variable(2, 0).unwrap();
        assert_eq!(x0.pow(2).unwrap(), x0);
    }

    #[test]
    fn reduction_preserves_lattice_values() {
        let p = DensePolynomial::from_terms(3, [(vec![5, 0, 4], q(2)), (vec![0, 3, 1], q(-7))]).unwrap();
        for a in 0..3i64 {
            for b in 0..3i64 {
                for c in 0..3i64 {
                    let direct = 2 * a.pow(5) * c.pow(4) - 7 * b.pow(3) * c;
                    assert_eq!(p.eval_lattice(&[a as usize, b as usize, c as usize]), q(direct));
                }
            }
        }
        assert!(p.terms().all(|(e, _)| e.iter().all(|&d| d < 3)));
    }

    #[test]
    fn lagrange_univariate_is_a_delta() {
        for n in 1..=5 {
            for a in 0..n {
                let l = univariate_lagrange(n, a);
                for x in 0..n {
                    let v: BigRational = l.iter().enumerate().map(|(k, c)| c * q((x as i64).pow(k as u32))).sum();
                    assert_eq!(v, if x == a { q(1) } else { q(0) });
                }
            }
        }
    }

    #[test]
    fn packing_round_trips() {
        let p = DensePolynomial::zero(4);
        let e = vec![3, 0, 2, 1];
        assert_eq!(p.unpack(p.pack(&e)), e);
    }

    #[test]
    fn substitution_moves_exponents() {
        let p = DensePolynomial::from_terms(3, [(vec![2, 1, 0], q(1))]).unwrap();
        let swapped = p.substitute_variables(&[1, 0, 2]);
        assert_eq!(swapped.coefficient(&[1, 2, 0]), q(1));
        assert_eq!(swapped.len(), 1);
    }

    #[test]
    fn single_variable_degenerates() {
        // on Z_1 the only lattice point is 0, so x_0 is the zero class
        assert!(DensePolynomial::variable(1, 0).unwrap().is_zero());
    }
}
