//! The `Z^t`-graded coordinate ring `K[x_{j,0}, ..., x_{j,n_j} : j = 1..t]`,
//! multihomogeneous polynomial matrices, and bounded complexes of direct
//! sums of line bundles. A sheaf `F` is represented by such a complex whose
//! cohomology sheaf sits in degree 0; exactness in the other degrees is the
//! caller's responsibility and is not checked.
//!
//! Convention: the summand `O(b)` twisted by `a` has the monomials of
//! multidegree `a + b` as basis of its sections, and a differential entry
//! from `O(b)` to `O(c)` is a form of degree `c - b`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LatticeError, MultiDegree, ProductSpace, Window};
use crate::linalg::{DenseMatrix, Field, FieldSpec, LinalgError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("exponent vector {exps:?} does not fit the space (expected factor lengths {expected:?})")]
    BadExponents { exps: Vec<Vec<u32>>, expected: Vec<usize> },
    #[error("term of multidegree {found} in a polynomial declared of degree {declared}")]
    InhomogeneousTerm { declared: MultiDegree, found: MultiDegree },
    #[error("nonzero polynomial with negative degree {0}")]
    NegativeDegree(MultiDegree),
    #[error("entry of degree {found} where {expected} is required")]
    DegreeMismatch { expected: MultiDegree, found: MultiDegree },
    #[error("differential at p = {p} has shape {found:?}, terms require {expected:?}")]
    Shape { p: i64, expected: (usize, usize), found: (usize, usize) },
}

/// Exponents of a monomial, one list of length `n_j + 1` per factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<Vec<u32>>);

impl ExponentVector {
    pub fn one(space: &ProductSpace) -> Self {
        ExponentVector(space.factor_dims().iter().map(|&n| vec![0; n + 1]).collect())
    }

    pub fn degree(&self) -> MultiDegree {
        MultiDegree(self.0.iter().map(|f| f.iter().map(|&e| e as i64).sum()).collect())
    }

    pub fn fits(&self, space: &ProductSpace) -> bool {
        self.0.len() == space.t() && self.0.iter().zip(space.factor_dims()).all(|(f, &n)| f.len() == n + 1)
    }

    pub fn mul(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect())
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &ExponentVector) -> Option<ExponentVector> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            let mut f = Vec::with_capacity(a.len());
            for (x, y) in a.iter().zip(b) {
                f.push(x.checked_sub(*y)?);
            }
            out.push(f);
        }
        Some(ExponentVector(out))
    }
}

/// All exponent lists of length `vars` with entries `>= lower[i]` summing to `total`,
/// in increasing lexicographic order. Negative lower bounds give Laurent monomials.
pub(crate) fn compositions(total: i64, lower: &[i64]) -> Vec<Vec<i64>> {
    let shifted = total - lower.iter().sum::<i64>();
    let mut out = Vec::new();
    if shifted < 0 || lower.is_empty() {
        return out;
    }
    let vars = lower.len();
    let mut cur = vec![0i64; vars];
    fn rec(i: usize, left: i64, cur: &mut Vec<i64>, lower: &[i64], out: &mut Vec<Vec<i64>>) {
        let vars = cur.len();
        if i == vars - 1 {
            cur[i] = left;
            out.push(cur.iter().zip(lower).map(|(c, l)| c + l).collect());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, lower, out);
        }
    }
    rec(0, shifted, &mut cur, lower, &mut out);
    out
}

/// Monomials of multidegree `c` (empty unless `c >= 0`), lexicographically ordered.
pub fn monomials_of_degree(space: &ProductSpace, c: &MultiDegree) -> Vec<ExponentVector> {
    let per_factor: Vec<Vec<Vec<u32>>> = (0..space.t())
        .map(|j| {
            compositions(c[j], &vec![0; space.n(j) + 1]).into_iter().map(|v| v.into_iter().map(|x| x as u32).collect()).collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for factor in per_factor {
        let mut next = Vec::with_capacity(out.len() * factor.len());
        for prefix in &out {
            for f in &factor {
                let mut p: Vec<Vec<u32>> = prefix.clone();
                p.push(f.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(ExponentVector).collect()
}

/// A multihomogeneous polynomial with a declared degree. The zero
/// polynomial may carry any declared degree, including negative ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiHomogPoly {
    degree: MultiDegree,
    terms: BTreeMap<ExponentVector, BigRational>,
}

impl MultiHomogPoly {
    pub fn zero(degree: MultiDegree) -> Self {
        MultiHomogPoly { degree, terms: BTreeMap::new() }
    }

    pub fn constant(space: &ProductSpace, c: i64) -> Self {
        let mut p = MultiHomogPoly::zero(MultiDegree::zero(space.t()));
        if c != 0 {
            p.terms.insert(ExponentVector::one(space), BigRational::from_integer(BigInt::from(c)));
        }
        p
    }

    /// The variable `x_{j,i}`.
    pub fn var(space: &ProductSpace, j: usize, i: usize) -> Self {
        let mut e = ExponentVector::one(space);
        e.0[j][i] = 1;
        let degree = MultiDegree::unit(space.t(), j);
        let mut terms = BTreeMap::new();
        terms.insert(e, BigRational::one());
        MultiHomogPoly { degree, terms }
    }

    /// Build from `(coefficient, exponents)` pairs, checking homogeneity and
    /// reducing coefficients into `field`. Repeated exponents are summed.
    pub fn from_terms(
        space: &ProductSpace,
        field: FieldSpec,
        degree: MultiDegree,
        terms: Vec<(BigRational, ExponentVector)>,
    ) -> Result<Self, RingError> {
        space.check(&degree)?;
        let mut map: BTreeMap<ExponentVector, BigRational> = BTreeMap::new();
        for (c, e) in terms {
            if !e.fits(space) {
                return Err(RingError::BadExponents { exps: e.0, expected: space.factor_dims().iter().map(|n| n + 1).collect() });
            }
            let found = e.degree();
            if found != degree {
                return Err(RingError::InhomogeneousTerm { declared: degree, found });
            }
            *map.entry(e).or_insert_with(BigRational::zero) += c;
        }
        let mut p = MultiHomogPoly { degree, terms: map };
        p.normalize(field)?;
        if !p.is_zero() && !p.degree.is_nonnegative() {
            return Err(RingError::NegativeDegree(p.degree));
        }
        Ok(p)
    }

    fn normalize(&mut self, field: FieldSpec) -> Result<(), RingError> {
        let mut out = BTreeMap::new();
        for (e, c) in std::mem::take(&mut self.terms) {
            let c = field.normalize(&c)?;
            if !c.is_zero() {
                out.insert(e, c);
            }
        }
        self.terms = out;
        Ok(())
    }

    pub fn degree(&self) -> &MultiDegree {
        &self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &ExponentVector) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational, field: FieldSpec) -> Result<Self, RingError> {
        let mut p = self.clone();
        for v in p.terms.values_mut() {
            *v = &*v * c;
        }
        p.normalize(field)?;
        Ok(p)
    }

    /// Sum of two forms of the same degree.
    pub fn add(&self, other: &Self, field: FieldSpec) -> Result<Self, RingError> {
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(RingError::DegreeMismatch { expected: self.degree.clone(), found: other.degree.clone() });
        }
        let degree = if self.is_zero() { other.degree.clone() } else { self.degree.clone() };
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            *terms.entry(e.clone()).or_insert_with(BigRational::zero) += c;
        }
        let mut p = MultiHomogPoly { degree, terms };
        p.normalize(field)?;
        Ok(p)
    }

    pub fn neg(&self) -> Self {
        MultiHomogPoly { degree: self.degree.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl fmt::Display for MultiHomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (j, factor) in e.0.iter().enumerate() {
                for (i, &x) in factor.iter().enumerate() {
                    match x {
                        0 => {}
                        1 => write!(f, "*x{j}_{i}")?,
                        _ => write!(f, "*x{j}_{i}^{x}")?,
                    }
                }
            }
        }
        Ok(())
    }
}

/// Product of two forms; degrees add and zero coefficients are dropped.
pub fn poly_mult(f: &MultiHomogPoly, g: &MultiHomogPoly, field: FieldSpec) -> Result<MultiHomogPoly, RingError> {
    let degree = &f.degree + &g.degree;
    let mut terms: BTreeMap<ExponentVector, BigRational> = BTreeMap::new();
    for (e1, c1) in &f.terms {
        for (e2, c2) in &g.terms {
            *terms.entry(e1.mul(e2)).or_insert_with(BigRational::zero) += c1 * c2;
        }
    }
    let mut p = MultiHomogPoly { degree, terms };
    p.normalize(field)?;
    Ok(p)
}

/// `O(b_1) + ... + O(b_r)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FreeSum {
    pub twists: Vec<MultiDegree>,
}

impl FreeSum {
    pub fn new(twists: Vec<MultiDegree>) -> Self {
        FreeSum { twists }
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.twists.is_empty()
    }
}

/// Row-major matrix of forms; entry `(r, s)` maps source summand `s` to target summand `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<MultiHomogPoly>,
}

impl PolyMatrix {
    /// Zero map `source -> target` with correctly declared entry degrees.
    pub fn zero(source: &FreeSum, target: &FreeSum) -> Self {
        let mut entries = Vec::with_capacity(source.rank() * target.rank());
        for c in &target.twists {
            for b in &source.twists {
                entries.push(MultiHomogPoly::zero(c - b));
            }
        }
        PolyMatrix { rows: target.rank(), cols: source.rank(), entries }
    }

    pub fn from_rows(rows: Vec<Vec<MultiHomogPoly>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix");
        PolyMatrix { rows: nrows, cols: ncols, entries: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, s: usize) -> &MultiHomogPoly {
        &self.entries[r * self.cols + s]
    }

    pub fn set(&mut self, r: usize, s: usize, p: MultiHomogPoly) {
        self.entries[r * self.cols + s] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    /// `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &PolyMatrix, field: FieldSpec) -> Result<PolyMatrix, RingError> {
        assert_eq!(self.cols, rhs.rows);
        let mut rows = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut row = Vec::with_capacity(rhs.cols);
            for s in 0..rhs.cols {
                let mut acc: Option<MultiHomogPoly> = None;
                for k in 0..self.cols {
                    let prod = poly_mult(self.get(r, k), rhs.get(k, s), field)?;
                    acc = Some(match acc {
                        None => prod,
                        Some(a) if prod.is_zero() => a,
                        Some(a) if a.is_zero() => prod,
                        Some(a) => a.add(&prod, field)?,
                    });
                }
                row.push(acc.unwrap_or_else(|| MultiHomogPoly::zero(MultiDegree(Vec::new()))));
            }
            rows.push(row);
        }
        Ok(PolyMatrix::from_rows(rows))
    }
}

/// Bounded complex `... -> C^p -> C^{p+1} -> ...` of free sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineBundleComplex {
    space: ProductSpace,
    field: FieldSpec,
    terms: BTreeMap<i64, FreeSum>,
    diffs: BTreeMap<i64, PolyMatrix>,
}

impl LineBundleComplex {
    /// Missing differentials are zero maps; empty terms are dropped and
    /// coefficients are reduced into `field`.
    pub fn new(
        space: ProductSpace,
        field: FieldSpec,
        terms: BTreeMap<i64, FreeSum>,
        diffs: BTreeMap<i64, PolyMatrix>,
    ) -> Result<Self, RingError> {
        for sum in terms.values() {
            for b in &sum.twists {
                space.check(b)?;
            }
        }
        let terms: BTreeMap<i64, FreeSum> = terms.into_iter().filter(|(_, s)| !s.is_empty()).collect();
        let empty = FreeSum::default();
        let mut full = BTreeMap::new();
        for (&p, m) in &diffs {
            let src = terms.get(&p).unwrap_or(&empty);
            let tgt = terms.get(&(p + 1)).unwrap_or(&empty);
            let expected = (tgt.rank(), src.rank());
            if (m.rows, m.cols) != expected {
                return Err(RingError::Shape { p, expected, found: (m.rows, m.cols) });
            }
            if expected.0 > 0 && expected.1 > 0 {
                let mut m = m.clone();
                for e in m.entries.iter_mut() {
                    e.normalize(field)?;
                }
                full.insert(p, m);
            }
        }
        Ok(LineBundleComplex { space, field, terms, diffs: full })
    }

    /// A single free sum in degree 0.
    pub fn free(space: ProductSpace, field: FieldSpec, twists: Vec<MultiDegree>) -> Result<Self, RingError> {
        let mut terms = BTreeMap::new();
        terms.insert(0, FreeSum::new(twists));
        LineBundleComplex::new(space, field, terms, BTreeMap::new())
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn with_field(&self, field: FieldSpec) -> Result<Self, RingError> {
        let mut diffs = BTreeMap::new();
        for (&p, m) in &self.diffs {
            let mut m = m.clone();
            for e in m.entries.iter_mut() {
                e.normalize(field)?;
            }
            diffs.insert(p, m);
        }
        Ok(LineBundleComplex { space: self.space.clone(), field, terms: self.terms.clone(), diffs })
    }

    pub fn terms(&self) -> &BTreeMap<i64, FreeSum> {
        &self.terms
    }

    pub fn term(&self, p: i64) -> Option<&FreeSum> {
        self.terms.get(&p)
    }

    /// Differential out of `C^p`, if nonzero-shaped.
    pub fn diff(&self, p: i64) -> Option<&PolyMatrix> {
        self.diffs.get(&p)
    }

    pub fn diffs(&self) -> &BTreeMap<i64, PolyMatrix> {
        &self.diffs
    }

    /// True when every differential vanishes, so the complex is a direct sum of shifted line bundles.
    pub fn has_zero_differentials(&self) -> bool {
        self.diffs.values().all(|m| m.is_zero())
    }

    /// Every summand twist of every term.
    pub fn all_twists(&self) -> impl Iterator<Item = (i64, &MultiDegree)> {
        self.terms.iter().flat_map(|(&p, s)| s.twists.iter().map(move |b| (p, b)))
    }
}

/// A failed check in [`validate_complex`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// Entry `(row, col)` of the differential out of `C^p` has the wrong degree.
    Degree { p: i64, row: usize, col: usize, expected: MultiDegree, found: MultiDegree },
    /// Entry `(row, col)` of `d^{p+1} d^p` is nonzero.
    Composition { p: i64, row: usize, col: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Degree { p, row, col, expected, found } => {
                write!(f, "d^{p}[{row},{col}] has degree {found}, expected {expected}")
            }
            Violation::Composition { p, row, col } => write!(f, "(d^{} d^{p})[{row},{col}] != 0", p + 1),
        }
    }
}

/// Checks homogeneity of every entry and `d o d = 0` symbolically.
/// Exactness away from degree 0 is not checked.
pub fn validate_complex(c: &LineBundleComplex) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    for (&p, m) in &c.diffs {
        let src = &c.terms[&p];
        let tgt = &c.terms[&(p + 1)];
        for r in 0..m.rows {
            for s in 0..m.cols {
                let e = m.get(r, s);
                let expected = &tgt.twists[r] - &src.twists[s];
                if !e.is_zero() && e.degree != expected {
                    violations.push(Violation::Degree { p, row: r, col: s, expected, found: e.degree.clone() });
                }
            }
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    for (&p, m) in &c.diffs {
        let Some(next) = c.diffs.get(&(p + 1)) else { continue };
        let comp = next.compose(m, c.field).expect("entries were normalized into the field");
        for r in 0..comp.rows {
            for s in 0..comp.cols {
                if !comp.get(r, s).is_zero() {
                    violations.push(Violation::Composition { p, row: r, col: s });
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// One basis vector of a free sum in a fixed twist: a monomial in a summand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisToken {
    pub summand: usize,
    pub exps: ExponentVector,
}

/// Monomial basis of `H^0` of the free sum twisted by `a`: summand-major,
/// lexicographic exponents within each summand.
pub fn graded_basis(space: &ProductSpace, sum: &FreeSum, a: &MultiDegree) -> Vec<BasisToken> {
    sum.twists
        .iter()
        .enumerate()
        .flat_map(|(summand, b)| monomials_of_degree(space, &(a + b)).into_iter().map(move |exps| BasisToken { summand, exps }))
        .collect()
}

/// Matrix of multiplication by `entry` from `O(source)` to `O(target)` in twist `a`.
pub fn mult_matrix<F: Field>(
    field: &F,
    space: &ProductSpace,
    entry: &MultiHomogPoly,
    source_twist: &MultiDegree,
    target_twist: &MultiDegree,
    a: &MultiDegree,
) -> Result<DenseMatrix<F::Elem>, RingError> {
    let expected = target_twist - source_twist;
    if !entry.is_zero() && entry.degree != expected {
        return Err(RingError::DegreeMismatch { expected, found: entry.degree.clone() });
    }
    let src = monomials_of_degree(space, &(a + source_twist));
    let tgt = monomials_of_degree(space, &(a + target_twist));
    let index: HashMap<&ExponentVector, usize> = tgt.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut m = DenseMatrix::zeros(field, tgt.len(), src.len());
    for (col, u) in src.iter().enumerate() {
        for (f, c) in entry.terms() {
            let row = index[&u.mul(f)];
            let v = field.add(m.get(row, col), &field.embed(c)?);
            m.set(row, col, v);
        }
    }
    Ok(m)
}

/// The block matrix of `m: source -> target` in twist `a`, rows and columns
/// indexed by [`graded_basis`].
pub fn assemble_block<F: Field>(
    field: &F,
    space: &ProductSpace,
    m: &PolyMatrix,
    source: &FreeSum,
    target: &FreeSum,
    a: &MultiDegree,
) -> Result<DenseMatrix<F::Elem>, RingError> {
    let rows = graded_basis(space, target, a);
    let cols = graded_basis(space, source, a);
    let index: HashMap<&BasisToken, usize> = rows.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut out = DenseMatrix::zeros(field, rows.len(), cols.len());
    for (ci, tok) in cols.iter().enumerate() {
        for r in 0..m.rows {
            for (f, c) in m.get(r, tok.summand).terms() {
                let key = BasisToken { summand: r, exps: tok.exps.mul(f) };
                let ri = index[&key];
                let v = field.add(out.get(ri, ci), &field.embed(c)?);
                out.set(ri, ci, v);
            }
        }
    }
    Ok(out)
}

/// Kernel of a presentation matrix in one twist, as polynomial columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSyzygies {
    pub twist: MultiDegree,
    /// Each element is a column: one form per source summand.
    pub columns: Vec<Vec<MultiHomogPoly>>,
}

/// For each twist in the window, a basis of the kernel of `m` in that twist.
/// Twists with trivial kernel are omitted. Only the window is searched, so
/// the result says nothing about syzygies of other degrees.
pub fn syzygies_in_window(
    space: &ProductSpace,
    field: FieldSpec,
    m: &PolyMatrix,
    source: &FreeSum,
    target: &FreeSum,
    window: &Window,
) -> Result<Vec<DegreeSyzygies>, RingError> {
    match field {
        FieldSpec::Rationals => syzygies_over(&crate::linalg::Rationals, space, field, m, source, target, window),
        FieldSpec::PrimeField(p) => syzygies_over(&crate::linalg::PrimeField::new(p)?, space, field, m, source, target, window),
    }
}

fn syzygies_over<F: Field>(
    f: &F,
    space: &ProductSpace,
    spec: FieldSpec,
    m: &PolyMatrix,
    source: &FreeSum,
    target: &FreeSum,
    window: &Window,
) -> Result<Vec<DegreeSyzygies>, RingError> {
    let mut out = Vec::new();
    for a in window.points() {
        let block = assemble_block(f, space, m, source, target, &a)?;
        let kernel = block.kernel(f);
        if kernel.is_empty() {
            continue;
        }
        let cols = graded_basis(space, source, &a);
        let columns = kernel
            .into_iter()
            .map(|vec| {
                let mut per_summand: Vec<Vec<(BigRational, ExponentVector)>> = vec![Vec::new(); source.rank()];
                for (tok, x) in cols.iter().zip(&vec) {
                    if !f.is_zero(x) {
                        per_summand[tok.summand].push((f.to_rational(x), tok.exps.clone()));
                    }
                }
                per_summand
                    .into_iter()
                    .enumerate()
                    .map(|(s, terms)| MultiHomogPoly::from_terms(space, spec, &a + &source.twists[s], terms))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(DegreeSyzygies { twist: a, columns });
    }
    Ok(out)
}
