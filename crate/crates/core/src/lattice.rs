//! The degree lattice `Z^t` of a product of projective spaces, the
//! polarization `H = (d_1, ..., d_t)`, finite windows, and the safe region
//! over which the splitting hypothesis is quantified.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Index, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bott;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("degree length {found} does not match the number of factors {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("a product space needs at least one factor and every factor dimension must be >= 1")]
    BadSpace,
    #[error("polarization entries must all be >= 1, got {0}")]
    NotAmple(MultiDegree),
    #[error("window is empty: lo {lo} is not <= hi {hi}")]
    EmptyWindow { lo: MultiDegree, hi: MultiDegree },
    #[error("rendering needs t >= 2 and a slice for every coordinate past the second (t = {t}, slice has {given})")]
    SliceRequired { t: usize, given: usize },
    #[error("cannot parse `{0}`")]
    Parse(String),
}

/// `P^{n_1} x ... x P^{n_t}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ProductSpaceRepr", into = "ProductSpaceRepr")]
pub struct ProductSpace {
    factor_dims: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ProductSpaceRepr {
    factor_dims: Vec<usize>,
}

impl TryFrom<ProductSpaceRepr> for ProductSpace {
    type Error = LatticeError;
    fn try_from(r: ProductSpaceRepr) -> Result<Self, Self::Error> {
        ProductSpace::new(r.factor_dims)
    }
}

impl From<ProductSpace> for ProductSpaceRepr {
    fn from(s: ProductSpace) -> Self {
        ProductSpaceRepr { factor_dims: s.factor_dims }
    }
}

impl ProductSpace {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self, LatticeError> {
        if factor_dims.is_empty() || factor_dims.contains(&0) {
            return Err(LatticeError::BadSpace);
        }
        Ok(ProductSpace { factor_dims })
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn n(&self, j: usize) -> usize {
        self.factor_dims[j]
    }

    /// Number of factors.
    pub fn t(&self) -> usize {
        self.factor_dims.len()
    }

    /// Total dimension.
    pub fn m(&self) -> usize {
        self.factor_dims.iter().sum()
    }

    pub fn check(&self, a: &MultiDegree) -> Result<(), LatticeError> {
        if a.len() == self.t() {
            Ok(())
        } else {
            Err(LatticeError::LengthMismatch { expected: self.t(), found: a.len() })
        }
    }

    /// `(n_1 + 1, ..., n_t + 1)`.
    pub fn n_plus_one(&self) -> MultiDegree {
        MultiDegree(self.factor_dims.iter().map(|&n| n as i64 + 1).collect())
    }
}

impl fmt::Display for ProductSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factor_dims.iter().map(|n| format!("P^{n}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl FromStr for ProductSpace {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let dims = s
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| LatticeError::Parse(s.to_string()))?;
        ProductSpace::new(dims)
    }
}

/// A point of `Z^t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiDegree(pub Vec<i64>);

impl MultiDegree {
    pub fn zero(t: usize) -> Self {
        MultiDegree(vec![0; t])
    }

    pub fn unit(t: usize, j: usize) -> Self {
        let mut v = vec![0; t];
        v[j] = 1;
        MultiDegree(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// `|a| = a_1 + ... + a_t`.
    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn scale(&self, k: i64) -> Self {
        MultiDegree(self.0.iter().map(|x| k * x).collect())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn shifted(&self, j: usize, by: i64) -> Self {
        let mut v = self.0.clone();
        v[j] += by;
        MultiDegree(v)
    }
}

impl Index<usize> for MultiDegree {
    type Output = i64;
    fn index(&self, j: usize) -> &i64 {
        &self.0[j]
    }
}

impl Add for &MultiDegree {
    type Output = MultiDegree;
    fn add(self, rhs: &MultiDegree) -> MultiDegree {
        assert_eq!(self.len(), rhs.len());
        MultiDegree(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiDegree {
    type Output = MultiDegree;
    fn sub(self, rhs: &MultiDegree) -> MultiDegree {
        assert_eq!(self.len(), rhs.len());
        MultiDegree(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &MultiDegree {
    type Output = MultiDegree;
    fn neg(self) -> MultiDegree {
        MultiDegree(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for MultiDegree {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        body.split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map(MultiDegree)
            .map_err(|_| LatticeError::Parse(s.to_string()))
    }
}

impl From<Vec<i64>> for MultiDegree {
    fn from(v: Vec<i64>) -> Self {
        MultiDegree(v)
    }
}

/// Componentwise `a <= b`.
pub fn leq(a: &MultiDegree, b: &MultiDegree) -> Result<bool, LatticeError> {
    if a.len() != b.len() {
        return Err(LatticeError::LengthMismatch { expected: a.len(), found: b.len() });
    }
    Ok(a.0.iter().zip(&b.0).all(|(x, y)| x <= y))
}

/// `a <= b` and `a != b`.
pub fn lt(a: &MultiDegree, b: &MultiDegree) -> Result<bool, LatticeError> {
    Ok(leq(a, b)? && a != b)
}

/// Very ample `O(d_1, ..., d_t)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MultiDegree", into = "MultiDegree")]
pub struct Polarization(MultiDegree);

impl Polarization {
    pub fn new(d: MultiDegree) -> Result<Self, LatticeError> {
        if d.is_empty() || d.0.iter().any(|&x| x < 1) {
            return Err(LatticeError::NotAmple(d));
        }
        Ok(Polarization(d))
    }

    pub fn degree(&self) -> &MultiDegree {
        &self.0
    }

    pub fn d(&self, j: usize) -> i64 {
        self.0[j]
    }

    /// `kH = (k d_1, ..., k d_t)`.
    pub fn multiple(&self, k: i64) -> MultiDegree {
        self.0.scale(k)
    }
}

impl TryFrom<MultiDegree> for Polarization {
    type Error = LatticeError;
    fn try_from(d: MultiDegree) -> Result<Self, Self::Error> {
        Polarization::new(d)
    }
}

impl From<Polarization> for MultiDegree {
    fn from(p: Polarization) -> Self {
        p.0
    }
}

impl FromStr for Polarization {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Polarization::new(s.parse()?)
    }
}

/// Closed box `lo <= a <= hi` in `Z^t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WindowRepr", into = "WindowRepr")]
pub struct Window {
    lo: MultiDegree,
    hi: MultiDegree,
}

#[derive(Serialize, Deserialize)]
struct WindowRepr {
    lo: MultiDegree,
    hi: MultiDegree,
}

impl TryFrom<WindowRepr> for Window {
    type Error = LatticeError;
    fn try_from(r: WindowRepr) -> Result<Self, Self::Error> {
        Window::new(r.lo, r.hi)
    }
}

impl From<Window> for WindowRepr {
    fn from(w: Window) -> Self {
        WindowRepr { lo: w.lo, hi: w.hi }
    }
}

impl Window {
    pub fn new(lo: MultiDegree, hi: MultiDegree) -> Result<Self, LatticeError> {
        if lo.len() != hi.len() {
            return Err(LatticeError::LengthMismatch { expected: lo.len(), found: hi.len() });
        }
        if lo.is_empty() || !leq(&lo, &hi)? {
            return Err(LatticeError::EmptyWindow { lo, hi });
        }
        Ok(Window { lo, hi })
    }

    /// The cube `[lo, hi]^t`.
    pub fn cube(t: usize, lo: i64, hi: i64) -> Result<Self, LatticeError> {
        Window::new(MultiDegree(vec![lo; t]), MultiDegree(vec![hi; t]))
    }

    /// The single cell `{a}`.
    pub fn point(a: MultiDegree) -> Self {
        Window { lo: a.clone(), hi: a }
    }

    pub fn lo(&self) -> &MultiDegree {
        &self.lo
    }

    pub fn hi(&self) -> &MultiDegree {
        &self.hi
    }

    pub fn t(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, a: &MultiDegree) -> bool {
        a.len() == self.t() && leq(&self.lo, a).unwrap_or(false) && leq(a, &self.hi).unwrap_or(false)
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    pub fn size(&self) -> usize {
        self.lo.0.iter().zip(&self.hi.0).map(|(l, h)| (h - l + 1) as usize).product()
    }

    /// Smallest box containing both.
    pub fn hull(&self, other: &Window) -> Window {
        let lo = self.lo.0.iter().zip(&other.lo.0).map(|(a, b)| *a.min(b)).collect();
        let hi = self.hi.0.iter().zip(&other.hi.0).map(|(a, b)| *a.max(b)).collect();
        Window { lo: MultiDegree(lo), hi: MultiDegree(hi) }
    }

    /// Lower every `lo_j` by `margin`.
    pub fn extended_down(&self, margin: i64) -> Window {
        let lo = self.lo.0.iter().map(|x| x - margin).collect();
        Window { lo: MultiDegree(lo), hi: self.hi.clone() }
    }

    /// All points in lexicographic order (first coordinate most significant).
    pub fn points(&self) -> Vec<MultiDegree> {
        let mut out = Vec::with_capacity(self.size());
        let mut cur = self.lo.clone();
        loop {
            out.push(cur.clone());
            let mut j = self.t();
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                if cur.0[j] < self.hi.0[j] {
                    cur.0[j] += 1;
                    break;
                }
                cur.0[j] = self.lo.0[j];
            }
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.lo.0.iter().zip(&self.hi.0).map(|(l, h)| format!("{l}:{h}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `lo:hi` per factor, comma separated, e.g. `-5:1,-5:2`.
impl FromStr for Window {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LatticeError::Parse(s.to_string());
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for part in s.split(',') {
            let (l, h) = part.trim().split_once(':').ok_or_else(bad)?;
            lo.push(l.trim().parse::<i64>().map_err(|_| bad())?);
            hi.push(h.trim().parse::<i64>().map_err(|_| bad())?);
        }
        Window::new(MultiDegree(lo), MultiDegree(hi))
    }
}

/// `omega = O(-n_1 - 1, ..., -n_t - 1)`.
pub fn canonical_twist(space: &ProductSpace) -> MultiDegree {
    -&space.n_plus_one()
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}

/// The integers `k` for which `O(kH)(a)` has nonzero intermediate cohomology.
///
/// Such a `k` needs one factor with `k d_j + a_j >= 0` and another with
/// `k d_i + a_i <= -n_i - 1`, which confines it to
/// `[min_j ceil(-a_j/d_j), max_i floor((-a_i-n_i-1)/d_i)]`; every `k` in that
/// interval is then tested with [`bott::signature`].
pub fn intermediate_k_range(space: &ProductSpace, d: &Polarization, a: &MultiDegree) -> Vec<i64> {
    let t = space.t();
    let lower = (0..t).map(|j| div_ceil(-a[j], d.d(j))).min().expect("t >= 1");
    let upper = (0..t).map(|i| div_floor(-a[i] - space.n(i) as i64 - 1, d.d(i))).max().expect("t >= 1");
    (lower..=upper).filter(|&k| bott::signature(space, &(&d.multiple(k) + a)).is_intermediate(space)).collect()
}

pub fn is_safe(space: &ProductSpace, d: &Polarization, a: &MultiDegree) -> bool {
    intermediate_k_range(space, d, a).is_empty()
}

/// Twists of the window at which no `O(kH)(a)` has intermediate cohomology.
pub fn safe_region(space: &ProductSpace, d: &Polarization, window: &Window) -> BTreeSet<MultiDegree> {
    window.points().into_iter().filter(|a| is_safe(space, d, a)).collect()
}

/// Twists of the window where `O(a)` itself has some nonzero cohomology.
pub fn nonvanishing_region(space: &ProductSpace, window: &Window) -> BTreeSet<MultiDegree> {
    window.points().into_iter().filter(|a| bott::signature(space, a) != bott::Signature::Zero).collect()
}

/// Twists of the window where `O(a)` has nonzero `H^i` for some `0 < i < m`.
pub fn intermediate_region(space: &ProductSpace, window: &Window) -> BTreeSet<MultiDegree> {
    window.points().into_iter().filter(|a| bott::signature(space, a).is_intermediate(space)).collect()
}

fn render_grid(cells: &BTreeSet<MultiDegree>, window: &Window, slice: &[i64], labels: bool) -> Result<String, LatticeError> {
    let t = window.t();
    if t < 2 || slice.len() != t - 2 {
        return Err(LatticeError::SliceRequired { t, given: slice.len() });
    }
    let (lo, hi) = (window.lo(), window.hi());
    let mut out = String::new();
    if labels {
        out.push_str(&format!("# a1 = {}..{} (left to right), a2 = {}..{} (top to bottom)", lo[0], hi[0], hi[1], lo[1]));
        if !slice.is_empty() {
            out.push_str(&format!(", fixed a3.. = {slice:?}"));
        }
        out.push('\n');
    }
    for a2 in (lo[1]..=hi[1]).rev() {
        if labels {
            out.push_str(&format!("{a2:>4} "));
        }
        for a1 in lo[0]..=hi[0] {
            let mut p = vec![a1, a2];
            p.extend_from_slice(slice);
            out.push(if cells.contains(&MultiDegree(p)) { '#' } else { '.' });
        }
        out.push('\n');
    }
    Ok(out)
}

/// Grid with `a_1` ascending left to right and `a_2` descending top to
/// bottom; members are `#`, everything else `.`. For `t > 2` the remaining
/// coordinates are fixed by `slice`.
pub fn render_region(cells: &BTreeSet<MultiDegree>, window: &Window, slice: &[i64]) -> Result<String, LatticeError> {
    render_grid(cells, window, slice, false)
}

/// [`render_region`] with a header line and row labels.
pub fn render_region_labeled(cells: &BTreeSet<MultiDegree>, window: &Window, slice: &[i64]) -> Result<String, LatticeError> {
    render_grid(cells, window, slice, true)
}
