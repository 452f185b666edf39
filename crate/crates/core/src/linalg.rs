//! Exact linear algebra over the coefficient field.
//!
//! Two coefficient fields are supported: the rationals and prime fields
//! `F_p` with `2 < p < 2^32`. Ranks of the large, very sparse differentials
//! coming out of the Čech engine are computed by incremental sparse
//! elimination; over `Q` that elimination is fraction-free on primitive
//! integer vectors. Kernels are only needed for small per-degree blocks and
//! use dense reduced row echelon form.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("invalid field specification `{0}` (expected `q` or `p:<prime>`)")]
    BadFieldSpec(String),
    #[error("modulus {0} is not an odd prime below 2^32")]
    NotPrime(u64),
    #[error("coefficient {0} has a denominator divisible by the characteristic {1}")]
    NotInvertible(String, u64),
}

/// Coefficient field selector, written `q` or `p:<prime>` in text form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

pub const DEFAULT_PRIME: u64 = 65521;

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::PrimeField(DEFAULT_PRIME)
    }
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self, LinalgError> {
        if is_odd_prime(p) {
            Ok(FieldSpec::PrimeField(p))
        } else {
            Err(LinalgError::NotPrime(p))
        }
    }

    /// Reduce a rational coefficient into the canonical representative used
    /// by this field (itself over `Q`, an integer in `[0, p)` over `F_p`).
    pub fn normalize(&self, q: &BigRational) -> Result<BigRational, LinalgError> {
        match *self {
            FieldSpec::Rationals => Ok(q.clone()),
            FieldSpec::PrimeField(p) => {
                let v = PrimeField { p }.embed(q)?;
                Ok(BigRational::from_integer(BigInt::from(v)))
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "q"),
            FieldSpec::PrimeField(p) => write!(f, "p:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = LinalgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Rationals);
        }
        let p = s
            .strip_prefix("p:")
            .and_then(|rest| rest.parse::<u64>().ok())
            .ok_or_else(|| LinalgError::BadFieldSpec(s.to_string()))?;
        FieldSpec::prime(p)
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) || p >= 1 << 32 {
        return false;
    }
    let mut q = 3;
    while q * q <= p {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 2;
    }
    true
}

/// Arithmetic of a coefficient field.
pub trait Field: Clone + Send + Sync + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `a` must be nonzero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn embed(&self, q: &BigRational) -> Result<Self::Elem, LinalgError>;
    fn to_rational(&self, a: &Self::Elem) -> BigRational;

    fn embed_i64(&self, v: i64) -> Self::Elem {
        self.embed(&BigRational::from_integer(BigInt::from(v))).expect("integers are always representable")
    }

    /// Rank of the span of a family of sparse vectors.
    fn rank(&self, vectors: &[SparseVec<Self::Elem>]) -> usize {
        sparse_rank(self, vectors)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, LinalgError> {
        if is_odd_prime(p) {
            Ok(PrimeField { p })
        } else {
            Err(LinalgError::NotPrime(p))
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn reduce_int(&self, v: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let r = v.mod_floor(&p);
        r.try_into().expect("residue fits u64")
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        debug_assert!(*a != 0);
        self.pow(*a, self.p - 2)
    }
    fn embed(&self, q: &BigRational) -> Result<u64, LinalgError> {
        let num = self.reduce_int(q.numer());
        let den = self.reduce_int(q.denom());
        if den == 0 {
            return Err(LinalgError::NotInvertible(q.to_string(), self.p));
        }
        Ok(self.mul(&num, &self.inv(&den)))
    }
    fn to_rational(&self, a: &u64) -> BigRational {
        BigRational::from_integer(BigInt::from(*a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn embed(&self, q: &BigRational) -> Result<BigRational, LinalgError> {
        Ok(q.clone())
    }
    fn to_rational(&self, a: &BigRational) -> BigRational {
        a.clone()
    }

    fn rank(&self, vectors: &[SparseVec<BigRational>]) -> usize {
        fraction_free_rank(vectors)
    }
}

/// Sparse vector: `(index, value)` pairs sorted by index, no explicit zeros.
pub type SparseVec<E> = Vec<(usize, E)>;

/// Collect unsorted `(index, value)` contributions into a canonical sparse vector.
pub fn sparse_from_entries<F: Field>(field: &F, mut entries: Vec<(usize, F::Elem)>) -> SparseVec<F::Elem> {
    entries.sort_by_key(|(i, _)| *i);
    let mut out: SparseVec<F::Elem> = Vec::with_capacity(entries.len());
    for (i, v) in entries {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc = field.add(acc, &v),
            _ => out.push((i, v)),
        }
    }
    out.retain(|(_, v)| !field.is_zero(v));
    out
}

/// `a - c * b` for sparse vectors.
fn axpy<F: Field>(field: &F, a: &SparseVec<F::Elem>, c: &F::Elem, b: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, field.neg(&field.mul(c, &b[j].1))));
            j += 1;
        } else {
            let v = field.sub(&a[i].1, &field.mul(c, &b[j].1));
            if !field.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental sparse elimination: each vector is reduced against the pivot
/// rows found so far (pivot = leading index), in input order.
pub fn sparse_rank<F: Field>(field: &F, vectors: &[SparseVec<F::Elem>]) -> usize {
    let mut pivots: HashMap<usize, SparseVec<F::Elem>> = HashMap::new();
    for v in vectors {
        let mut row = v.clone();
        while let Some((lead, c)) = row.first().cloned() {
            match pivots.get(&lead) {
                Some(piv) => row = axpy(field, &row, &c, piv),
                None => {
                    let inv = field.inv(&c);
                    let normalized = row.iter().map(|(i, x)| (*i, field.mul(x, &inv))).collect();
                    pivots.insert(lead, normalized);
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn primitive(mut v: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
    let g = v.iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for (_, x) in v.iter_mut() {
            *x /= &g;
        }
    }
    if v.first().is_some_and(|(_, x)| x.is_negative()) {
        for (_, x) in v.iter_mut() {
            *x = -&*x;
        }
    }
    v
}

/// Rank over `Q` by fraction-free integer elimination. Each vector is scaled
/// to a primitive integer vector; a reduction step is `v <- p*v - v_lead*piv`
/// followed by division by the content, so no rationals appear.
pub fn fraction_free_rank(vectors: &[SparseVec<BigRational>]) -> usize {
    let mut pivots: HashMap<usize, Vec<(usize, BigInt)>> = HashMap::new();
    for v in vectors {
        let lcm = v.iter().fold(BigInt::one(), |l, (_, x)| l.lcm(x.denom()));
        let mut row: Vec<(usize, BigInt)> = v
            .iter()
            .map(|(i, x)| (*i, (x * BigRational::from_integer(lcm.clone())).to_integer()))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        row = primitive(row);
        while let Some((lead, c)) = row.first().cloned() {
            match pivots.get(&lead) {
                Some(piv) => {
                    let p = &piv[0].1;
                    let mut out = Vec::with_capacity(row.len() + piv.len());
                    let (mut i, mut j) = (0, 0);
                    while i < row.len() || j < piv.len() {
                        let take_a = j >= piv.len() || (i < row.len() && row[i].0 < piv[j].0);
                        let take_b = i >= row.len() || (j < piv.len() && piv[j].0 < row[i].0);
                        if take_a {
                            out.push((row[i].0, p * &row[i].1));
                            i += 1;
                        } else if take_b {
                            out.push((piv[j].0, -(&c * &piv[j].1)));
                            j += 1;
                        } else {
                            let x = p * &row[i].1 - &c * &piv[j].1;
                            if !x.is_zero() {
                                out.push((row[i].0, x));
                            }
                            i += 1;
                            j += 1;
                        }
                    }
                    row = primitive(out);
                }
                None => {
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> DenseMatrix<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        DenseMatrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<E> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }
}

impl<E: Clone> DenseMatrix<E> {
    pub fn zeros<F: Field<Elem = E>>(field: &F, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, field.zero())
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, field: &F) -> bool {
        self.data.iter().all(|x| field.is_zero(x))
    }

    pub fn mul<F: Field<Elem = E>>(&self, field: &F, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(field, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if field.is_zero(a) {
                    continue;
                }
                for c in 0..rhs.cols {
                    let acc = field.add(out.get(r, c), &field.mul(a, rhs.get(k, c)));
                    out.set(r, c, acc);
                }
            }
        }
        out
    }

    pub fn to_sparse_columns<F: Field<Elem = E>>(&self, field: &F) -> Vec<SparseVec<E>> {
        (0..self.cols)
            .map(|c| (0..self.rows).filter(|&r| !field.is_zero(self.get(r, c))).map(|r| (r, self.get(r, c).clone())).collect())
            .collect()
    }

    pub fn rank<F: Field<Elem = E>>(&self, field: &F) -> usize {
        field.rank(&self.to_sparse_columns(field))
    }

    /// Basis of `{x : self * x = 0}`, one vector per free column of the
    /// reduced row echelon form, in increasing free-column order.
    pub fn kernel<F: Field<Elem = E>>(&self, field: &F) -> Vec<Vec<E>> {
        let mut m = self.clone();
        let mut pivot_cols = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !field.is_zero(m.get(r, col))) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    let (a, b) = (m.get(p, c).clone(), m.get(row, c).clone());
                    m.set(p, c, b);
                    m.set(row, c, a);
                }
            }
            let inv = field.inv(m.get(row, col));
            for c in 0..m.cols {
                let v = field.mul(m.get(row, c), &inv);
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || field.is_zero(m.get(r, col)) {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for c in 0..m.cols {
                    let v = field.sub(m.get(r, c), &field.mul(&factor, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivot_cols.push(col);
            row += 1;
        }
        let free: Vec<usize> = (0..m.cols).filter(|c| !pivot_cols.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![field.zero(); m.cols];
                x[f] = field.one();
                for (r, &pc) in pivot_cols.iter().enumerate() {
                    x[pc] = field.neg(m.get(r, f));
                }
                x
            })
            .collect()
    }
}
