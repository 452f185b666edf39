//! Exact sheaf cohomology through Čech complexes.
//!
//! For a line-bundle complex `C` and a twist `a`, the engine builds the total
//! complex of `Čech(U) ⊗ C(a)` where `U` is the product of the standard
//! affine covers of the factors, so a cover index is one nonempty subset
//! `S_j ⊆ {0..n_j}` per factor and has Čech degree `sum_j (|S_j| - 1)`. The
//! sections of `O(c)` on `U_S` in a fixed multidegree are spanned by Laurent
//! monomials whose negative exponents sit on the inverted variables.
//!
//! Those spaces are infinite dimensional, so negative exponents on factor
//! `j` are truncated at `-depth_j`. Per Laurent monomial the Čech complex of
//! a factor is acyclic unless the monomial is nonnegative or negative in
//! every variable of that factor, and a fully negative monomial of degree
//! `c_j` has all exponents `>= c_j + n_j`. Hence
//! `depth_j = max(0, max_b -(a_j + b_j) - n_j)` keeps every class and the
//! truncated complex, which is a subcomplex, is quasi-isomorphic to the full
//! one. Each result is still recomputed one step deeper and compared.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use thiserror::Error;

use crate::bott::CohomologyVector;
use crate::coxring::{compositions, validate_complex, LineBundleComplex, RingError, Violation};
use crate::lattice::{MultiDegree, ProductSpace, Window};
use crate::linalg::{Field, FieldSpec, LinalgError, PrimeField, Rationals, SparseVec};
use crate::table::CohomologyTable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CechError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid complex: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidComplex(Vec<Violation>),
    #[error("truncation unstable at twist {twist}: depth {depth:?} gave {shallow:?}, one deeper gave {deep:?}")]
    Unstable { twist: MultiDegree, depth: Vec<i64>, shallow: Vec<u64>, deep: Vec<u64> },
    #[error("ranks differ between p:{first} and p:{second} at twist {twist}: {a:?} vs {b:?}")]
    PrimeMismatch { twist: MultiDegree, first: u64, second: u64, a: Vec<u64>, b: Vec<u64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CechOptions {
    /// Recompute every result with depth + 1 and fail on any difference.
    pub verify_stability: bool,
    /// Recompute at this second prime and fail on any difference (prime fields only).
    pub cross_check_prime: Option<u64>,
    /// Always build the full tensor total complex, even when all differentials vanish.
    pub force_total_complex: bool,
}

impl Default for CechOptions {
    fn default() -> Self {
        CechOptions { verify_stability: true, cross_check_prime: None, force_total_complex: false }
    }
}

/// One nonempty subset per factor, as bit masks over `{0..n_j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverIndex(pub Vec<u32>);

impl CoverIndex {
    pub fn from_sets(sets: &[Vec<usize>]) -> Self {
        CoverIndex(sets.iter().map(|s| s.iter().fold(0u32, |m, &i| m | (1 << i))).collect())
    }

    pub fn cech_degree(&self) -> usize {
        self.0.iter().map(|m| m.count_ones() as usize - 1).sum()
    }

    pub fn contains(&self, j: usize, i: usize) -> bool {
        self.0[j] & (1 << i) != 0
    }
}

/// Laurent monomials (one exponent list per factor) spanning the sections of
/// `O(b)(a)` on `U_S`, negatives bounded by the per-factor depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentBasis {
    pub monomials: Vec<Vec<Vec<i64>>>,
}

impl LaurentBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

fn factor_laurent(n: usize, mask: u32, c: i64, depth: i64) -> Vec<Vec<i64>> {
    let lower: Vec<i64> = (0..=n).map(|i| if mask & (1 << i) != 0 { -depth } else { 0 }).collect();
    compositions(c, &lower)
}

/// Deterministically ordered (lexicographic per factor, factor-major) basis for `O(b)(a)` on `U_S`.
pub fn cech_basis(space: &ProductSpace, b: &MultiDegree, idx: &CoverIndex, a: &MultiDegree, depth: &[i64]) -> LaurentBasis {
    let mut out: Vec<Vec<Vec<i64>>> = vec![Vec::new()];
    for j in 0..space.t() {
        let factor = factor_laurent(space.n(j), idx.0[j], a[j] + b[j], depth[j]);
        let mut next = Vec::with_capacity(out.len() * factor.len());
        for prefix in &out {
            for f in &factor {
                let mut p = prefix.clone();
                p.push(f.clone());
                next.push(p);
            }
        }
        out = next;
    }
    LaurentBasis { monomials: out }
}

/// Smallest per-factor truncation depth that keeps every Čech class of every summand of `c` at `a`.
pub fn exact_depth(space: &ProductSpace, c: &LineBundleComplex, a: &MultiDegree) -> Vec<i64> {
    (0..space.t()).map(|j| c.all_twists().map(|(_, b)| (-(a[j] + b[j]) - space.n(j) as i64).max(0)).max().unwrap_or(0)).collect()
}

fn all_covers(space: &ProductSpace) -> Vec<Vec<CoverIndex>> {
    let mut by_degree: Vec<Vec<CoverIndex>> = vec![Vec::new(); space.m() + 1];
    let mut cur: Vec<Vec<u32>> = vec![Vec::new()];
    for j in 0..space.t() {
        let full = 1u32 << (space.n(j) + 1);
        let mut next = Vec::new();
        for prefix in &cur {
            for mask in 1..full {
                let mut p = prefix.clone();
                p.push(mask);
                next.push(p);
            }
        }
        cur = next;
    }
    for masks in cur {
        let idx = CoverIndex(masks);
        by_degree[idx.cech_degree()].push(idx);
    }
    for v in by_degree.iter_mut() {
        v.sort();
    }
    by_degree
}

/// A basis element of the total complex: term `p`, summand, cover, flattened exponents.
type Key = (i64, usize, Vec<u32>, Vec<i64>);

struct TotalComplex<'c> {
    space: &'c ProductSpace,
    complex: &'c LineBundleComplex,
    a: &'c MultiDegree,
    depth: Vec<i64>,
    covers: Vec<Vec<CoverIndex>>,
    offsets: Vec<usize>,
}

impl<'c> TotalComplex<'c> {
    fn new(complex: &'c LineBundleComplex, a: &'c MultiDegree, depth: Vec<i64>) -> Self {
        let space = complex.space();
        let mut offsets = vec![0];
        for j in 0..space.t() {
            offsets.push(offsets[j] + space.n(j) + 1);
        }
        TotalComplex { space, complex, a, depth, covers: all_covers(space), offsets }
    }

    fn basis(&self, q: i64) -> Vec<Key> {
        let mut out = Vec::new();
        for (&p, sum) in self.complex.terms() {
            let s = q - p;
            if s < 0 || s as usize > self.space.m() {
                continue;
            }
            for idx in &self.covers[s as usize] {
                for (summand, b) in sum.twists.iter().enumerate() {
                    for mono in cech_basis(self.space, b, idx, self.a, &self.depth).monomials {
                        out.push((p, summand, idx.0.clone(), mono.into_iter().flatten().collect()));
                    }
                }
            }
        }
        out
    }

    fn image<F: Field>(&self, field: &F, key: &Key, target: &HashMap<Key, usize>) -> Result<SparseVec<F::Elem>, CechError> {
        let (p, summand, masks, exps) = key;
        let mut entries = Vec::new();
        let mut prefix = 0usize;
        for j in 0..self.space.t() {
            let mask = masks[j];
            for i in 0..=self.space.n(j) {
                if mask & (1 << i) != 0 {
                    continue;
                }
                let below = (mask & ((1u32 << i) - 1)).count_ones() as usize;
                let sign = if (prefix + below).is_multiple_of(2) { 1 } else { -1 };
                let mut m2 = masks.clone();
                m2[j] |= 1 << i;
                let k = (*p, *summand, m2, exps.clone());
                entries.push((target[&k], field.embed_i64(sign)));
            }
            prefix += mask.count_ones() as usize - 1;
        }
        if let Some(m) = self.complex.diff(*p) {
            let negate = prefix % 2 == 1;
            for r in 0..m.rows() {
                for (f, c) in m.get(r, *summand).terms() {
                    let mut e2 = exps.clone();
                    for (j, factor) in f.0.iter().enumerate() {
                        for (i, &x) in factor.iter().enumerate() {
                            e2[self.offsets[j] + i] += x as i64;
                        }
                    }
                    let k = (*p + 1, r, masks.clone(), e2);
                    let v = field.embed(c)?;
                    entries.push((target[&k], if negate { field.neg(&v) } else { v }));
                }
            }
        }
        Ok(crate::linalg::sparse_from_entries(field, entries))
    }

    /// `h^0..h^m` of the total complex.
    fn cohomology<F: Field>(&self, field: &F) -> Result<Vec<u64>, CechError> {
        let m = self.space.m() as i64;
        let bases: Vec<Vec<Key>> = (-1..=m + 1).map(|q| self.basis(q)).collect();
        let base_of = |q: i64| &bases[(q + 1) as usize];
        let mut ranks = HashMap::new();
        for q in -1..=m {
            let target: HashMap<Key, usize> = base_of(q + 1).iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
            let images = base_of(q).iter().map(|k| self.image(field, k, &target)).collect::<Result<Vec<_>, _>>()?;
            ranks.insert(q, field.rank(&images));
        }
        Ok((0..=m).map(|q| (base_of(q).len() - ranks[&q] - ranks[&(q - 1)]) as u64).collect())
    }
}

/// Computes cohomology of line-bundle complexes in a fixed coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CechEngine {
    pub field: FieldSpec,
    pub options: CechOptions,
}

/// Keyed by `(n, c, field, verify_stability)`.
type FactorCache = Mutex<HashMap<(usize, i64, FieldSpec, bool), CohomologyVector>>;

fn factor_cache() -> &'static FactorCache {
    static CACHE: OnceLock<FactorCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl CechEngine {
    pub fn new(field: FieldSpec) -> Self {
        CechEngine { field, options: CechOptions::default() }
    }

    pub fn with_options(field: FieldSpec, options: CechOptions) -> Self {
        CechEngine { field, options }
    }

    fn total_at(&self, field: FieldSpec, c: &LineBundleComplex, a: &MultiDegree, depth: Vec<i64>) -> Result<Vec<u64>, CechError> {
        let tot = TotalComplex::new(c, a, depth);
        match field {
            FieldSpec::Rationals => tot.cohomology(&Rationals),
            FieldSpec::PrimeField(p) => tot.cohomology(&PrimeField::new(p)?),
        }
    }

    fn total_checked(&self, field: FieldSpec, c: &LineBundleComplex, a: &MultiDegree) -> Result<Vec<u64>, CechError> {
        let depth = exact_depth(c.space(), c, a);
        let shallow = self.total_at(field, c, a, depth.clone())?;
        if self.options.verify_stability {
            let deeper: Vec<i64> = depth.iter().map(|d| d + 1).collect();
            let deep = self.total_at(field, c, a, deeper)?;
            if deep != shallow {
                return Err(CechError::Unstable { twist: a.clone(), depth, shallow, deep });
            }
        }
        Ok(shallow)
    }

    fn cross_checked(
        &self,
        a: &MultiDegree,
        compute: impl Fn(FieldSpec) -> Result<Vec<u64>, CechError>,
    ) -> Result<Vec<u64>, CechError> {
        let first = compute(self.field)?;
        if let (FieldSpec::PrimeField(p1), Some(p2)) = (self.field, self.options.cross_check_prime) {
            let second = compute(FieldSpec::prime(p2)?)?;
            if first != second {
                return Err(CechError::PrimeMismatch { twist: a.clone(), first: p1, second: p2, a: first, b: second });
            }
        }
        Ok(first)
    }

    /// `H^*(P^n, O(c))` from the Čech complex of the standard cover (cached).
    pub fn factor_h(&self, n: usize, c: i64) -> Result<CohomologyVector, CechError> {
        let key = (n, c, self.field, self.options.verify_stability);
        if let Some(v) = factor_cache().lock().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let space = ProductSpace::new(vec![n]).expect("n >= 1");
        let single = LineBundleComplex::free(space, self.field, vec![MultiDegree(vec![0])])?;
        let a = MultiDegree(vec![c]);
        let v = CohomologyVector(self.cross_checked(&a, |f| self.total_checked(f, &single, &a))?);
        factor_cache().lock().expect("cache lock").insert(key, v.clone());
        Ok(v)
    }

    /// `h^i(O(b)(a))`: Čech cohomology of each factor, combined by Künneth.
    pub fn line_bundle_h(&self, space: &ProductSpace, b: &MultiDegree, a: &MultiDegree) -> Result<CohomologyVector, CechError> {
        space.check(a).map_err(RingError::from)?;
        space.check(b).map_err(RingError::from)?;
        let mut acc: Option<CohomologyVector> = None;
        for j in 0..space.t() {
            let v = self.factor_h(space.n(j), a[j] + b[j])?;
            acc = Some(match acc {
                None => v,
                Some(u) => u.convolve(&v),
            });
        }
        Ok(acc.expect("t >= 1"))
    }

    /// `h^i(O(b)(a))` from the full tensor-product Čech complex (no Künneth shortcut).
    pub fn line_bundle_h_total(
        &self,
        space: &ProductSpace,
        b: &MultiDegree,
        a: &MultiDegree,
    ) -> Result<CohomologyVector, CechError> {
        let single = LineBundleComplex::free(space.clone(), self.field, vec![b.clone()])?;
        Ok(CohomologyVector(self.cross_checked(a, |f| self.total_checked(f, &single, a))?))
    }

    /// `h^i(F(a))` for the degree-0 cohomology sheaf `F` of `c`, `0 <= i <= m`.
    ///
    /// When every differential vanishes the total complex splits into shifted
    /// line bundles and each summand is evaluated with [`Self::line_bundle_h`].
    pub fn hypercohomology(&self, c: &LineBundleComplex, a: &MultiDegree) -> Result<CohomologyVector, CechError> {
        let space = c.space();
        space.check(a).map_err(RingError::from)?;
        if c.has_zero_differentials() && !self.options.force_total_complex {
            let m = space.m() as i64;
            let mut out = CohomologyVector::zero(space.m());
            for (p, b) in c.all_twists() {
                let v = self.line_bundle_h(space, b, a)?;
                for (s, &h) in v.0.iter().enumerate() {
                    let q = p + s as i64;
                    if (0..=m).contains(&q) {
                        out.0[q as usize] += h;
                    }
                }
            }
            return Ok(out);
        }
        let c = if c.field() == self.field { c.clone() } else { c.with_field(self.field)? };
        Ok(CohomologyVector(self.cross_checked(a, |f| {
            let cf = if f == c.field() { c.clone() } else { c.with_field(f)? };
            self.total_checked(f, &cf, a)
        })?))
    }

    /// Every cell of the window, computed in parallel.
    pub fn cohomology_table(&self, c: &LineBundleComplex, window: &Window) -> Result<CohomologyTable, CechError> {
        validate_complex(c).map_err(CechError::InvalidComplex)?;
        let points = window.points();
        let vectors = points.par_iter().map(|a| self.hypercohomology(c, a)).collect::<Result<Vec<_>, _>>()?;
        Ok(CohomologyTable::from_vectors(c.space().clone(), window.clone(), vectors))
    }
}

/// [`CechEngine::line_bundle_h`] over the default prime field.
pub fn cech_line_bundle_h(space: &ProductSpace, b: &MultiDegree, a: &MultiDegree) -> Result<CohomologyVector, CechError> {
    CechEngine::default().line_bundle_h(space, b, a)
}

/// [`CechEngine::hypercohomology`] in the complex's own field.
pub fn hypercohomology(c: &LineBundleComplex, a: &MultiDegree) -> Result<CohomologyVector, CechError> {
    CechEngine::new(c.field()).hypercohomology(c, a)
}

/// [`CechEngine::cohomology_table`] in the complex's own field.
pub fn cohomology_table(c: &LineBundleComplex, window: &Window) -> Result<CohomologyTable, CechError> {
    CechEngine::new(c.field()).cohomology_table(c, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bott::{factor_h, line_bundle_h};
    use crate::sheaves;

    fn md(v: &[i64]) -> MultiDegree {
        MultiDegree(v.to_vec())
    }

    fn sp(v: &[usize]) -> ProductSpace {
        ProductSpace::new(v.to_vec()).unwrap()
    }

    #[test]
    fn cover_degrees() {
        let idx = CoverIndex::from_sets(&[vec![0, 1], vec![2]]);
        assert_eq!(idx.cech_degree(), 1);
        assert!(idx.contains(0, 1));
        assert!(!idx.contains(1, 0));
        let covers = all_covers(&sp(&[1, 1]));
        assert_eq!(covers.iter().map(Vec::len).collect::<Vec<_>>(), vec![4, 4, 1]);
    }

    #[test]
    fn laurent_bases() {
        let s = sp(&[1]);
        let only_x0 = CoverIndex::from_sets(&[vec![0]]);
        // Degree -2 with depth 2: x0^-2 x1^0 only.
        let b = cech_basis(&s, &md(&[0]), &only_x0, &md(&[-2]), &[2]);
        assert_eq!(b.monomials, vec![vec![vec![-2, 0]]]);
        let both = CoverIndex::from_sets(&[vec![0, 1]]);
        let b = cech_basis(&s, &md(&[0]), &both, &md(&[-2]), &[2]);
        assert_eq!(b.monomials, vec![vec![vec![-2, 0]], vec![vec![-1, -1]], vec![vec![0, -2]]]);
        let s2 = sp(&[1, 1]);
        let idx = CoverIndex::from_sets(&[vec![0], vec![0]]);
        assert_eq!(cech_basis(&s2, &md(&[0, 0]), &idx, &md(&[0, 0]), &[0, 0]).monomials, vec![vec![vec![0, 0], vec![0, 0]]]);
    }

    #[test]
    fn factor_values_from_cech() {
        let e = CechEngine::default();
        for n in 1..=3 {
            for c in -7..=4 {
                assert_eq!(e.factor_h(n, c).unwrap(), factor_h(n, c), "n={n} c={c}");
            }
        }
    }

    #[test]
    fn line_bundles_examples() {
        let s = sp(&[1, 1]);
        assert_eq!(cech_line_bundle_h(&s, &md(&[0, 0]), &md(&[-2, 0])).unwrap().0, vec![0, 1, 0]);
        let s23 = sp(&[2, 3]);
        assert_eq!(cech_line_bundle_h(&s23, &md(&[0, 0]), &md(&[-3, -4])).unwrap().0, vec![0, 0, 0, 0, 0, 1]);
        for b in [md(&[3, -1]), md(&[-2, 5])] {
            let a = &MultiDegree::zero(2) - &b;
            assert_eq!(cech_line_bundle_h(&s, &b, &a).unwrap().0, vec![1, 0, 0]);
        }
    }

    #[test]
    fn total_complex_matches_kunneth_route() {
        let e = CechEngine::default();
        for s in [sp(&[1, 1]), sp(&[1, 2])] {
            for a in Window::cube(2, -4, 2).unwrap().points() {
                let b = MultiDegree::zero(2);
                assert_eq!(e.line_bundle_h_total(&s, &b, &a).unwrap(), line_bundle_h(&s, &a), "{a}");
            }
        }
    }

    #[test]
    fn rational_and_prime_routes_agree() {
        let q = CechEngine::new(FieldSpec::Rationals);
        let p = CechEngine::default();
        let s = sp(&[1, 1]);
        for a in Window::cube(2, -3, 1).unwrap().points() {
            let b = md(&[0, 0]);
            assert_eq!(q.line_bundle_h_total(&s, &b, &a).unwrap(), p.line_bundle_h_total(&s, &b, &a).unwrap());
        }
    }

    #[test]
    fn point_sheaf_is_constant() {
        for field in [FieldSpec::default(), FieldSpec::Rationals] {
            let c = sheaves::koszul_point_p1p1(field);
            let t = CechEngine::new(field).cohomology_table(&c, &Window::cube(2, -2, 2).unwrap()).unwrap();
            for (a, row) in t.rows() {
                let dims: Vec<u64> = row.iter().map(|c| c.dim).collect();
                assert_eq!(dims, vec![1, 0, 0], "{a}");
            }
        }
    }

    #[test]
    fn ideal_sheaf_sections() {
        let c = sheaves::ideal_point_p1p1(FieldSpec::default());
        let h = hypercohomology(&c, &md(&[1, 1])).unwrap();
        assert_eq!(h.0, vec![3, 0, 0]);
        // Sections of O(-1,-1) vanish, and the point imposes a failed condition.
        let h = hypercohomology(&c, &md(&[-1, -1])).unwrap();
        assert_eq!(h.0, vec![0, 1, 0]);
    }

    #[test]
    fn free_sum_table_matches_bott_sum() {
        let s = sp(&[1, 1]);
        let c = sheaves::direct_sum(&s, FieldSpec::default(), vec![md(&[1, 1]), md(&[-1, -1])]);
        let t = cohomology_table(&c, &Window::cube(2, -3, 3).unwrap()).unwrap();
        assert_eq!(t.known(&md(&[-2, -2]), 2), Some(4));
        for (a, row) in t.rows() {
            let mut expected = line_bundle_h(&s, &(a + &md(&[1, 1])));
            expected.add_assign(&line_bundle_h(&s, &(a + &md(&[-1, -1]))));
            assert_eq!(row.iter().map(|c| c.dim).collect::<Vec<_>>(), expected.0);
        }
    }

    #[test]
    fn forced_total_complex_agrees_on_free_sums() {
        let s = sp(&[1, 1]);
        let c = sheaves::direct_sum(&s, FieldSpec::default(), vec![md(&[1, 0]), md(&[-2, -1])]);
        let fast = CechEngine::default();
        let slow =
            CechEngine::with_options(FieldSpec::default(), CechOptions { force_total_complex: true, ..CechOptions::default() });
        for a in Window::cube(2, -3, 2).unwrap().points() {
            assert_eq!(fast.hypercohomology(&c, &a).unwrap(), slow.hypercohomology(&c, &a).unwrap());
        }
    }

    #[test]
    fn second_prime_cross_check() {
        let e = CechEngine::with_options(
            FieldSpec::default(),
            CechOptions { cross_check_prime: Some(32003), ..CechOptions::default() },
        );
        let c = sheaves::ideal_point_p1p1(FieldSpec::default());
        assert_eq!(e.hypercohomology(&c, &md(&[1, 1])).unwrap().0, vec![3, 0, 0]);
    }

    #[test]
    fn invalid_complex_is_rejected_by_table() {
        let c = sheaves::koszul_point_p1p1(FieldSpec::Rationals);
        let mut diffs = c.diffs().clone();
        let d = diffs.get_mut(&-2).unwrap();
        let flipped = d.get(1, 0).neg();
        d.set(1, 0, flipped);
        let broken = LineBundleComplex::new(c.space().clone(), c.field(), c.terms().clone(), diffs).unwrap();
        assert!(matches!(cohomology_table(&broken, &Window::point(md(&[0, 0]))), Err(CechError::InvalidComplex(_))));
    }
}
