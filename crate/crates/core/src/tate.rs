//! Dimension bookkeeping for the Tate resolution of a sheaf, read off a
//! cohomology table.
//!
//! The term `T^d` in internal degree `b` collects `H^{d-|a|}(F(a))` tensored
//! with `Λ^{b-a} V`, whose dimension is `prod_j C(n_j + 1, b_j - a_j)`. Exact
//! complexes have vanishing alternating sums, which gives the checksums
//! below. `strand_propagate` applies the vanishing lemma along one factor.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bott::binomial;
use crate::lattice::{LatticeError, MultiDegree, ProductSpace, Window};
use crate::table::{Cell, CellStatus, CohomologyTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TateError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("table does not cover the support: missing {}", fmt_twists(.missing))]
    WindowInsufficient { missing: Vec<MultiDegree> },
    #[error("factor sets must be disjoint subsets of 0..{t}")]
    BadFactorSets { t: usize },
}

fn fmt_twists(v: &[MultiDegree]) -> String {
    v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
}

/// Dimensions of the Tate terms `T^d` in one internal degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TateTermProfile {
    pub b: MultiDegree,
    pub dims: BTreeMap<i64, u64>,
}

impl TateTermProfile {
    /// `sum_d (-1)^d dims[d]`.
    pub fn alternating_sum(&self) -> i128 {
        self.dims.iter().map(|(&d, &x)| if d.rem_euclid(2) == 0 { x as i128 } else { -(x as i128) }).sum()
    }
}

impl fmt::Display for TateTermProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|(d, x)| format!("{d}: {x}")).collect();
        write!(f, "b={} {{{}}}", self.b, parts.join(", "))
    }
}

/// `dim Λ^{b-a} V`, zero outside `0 <= b_j - a_j <= n_j + 1`.
pub fn exterior_weight(space: &ProductSpace, a: &MultiDegree, b: &MultiDegree) -> u64 {
    (0..space.t())
        .map(|j| {
            let s = b[j] - a[j];
            if s < 0 {
                0
            } else {
                binomial(space.n(j) as u64 + 1, s as u64)
            }
        })
        .product()
}

/// Twists `a` with `b - n - 1 <= a <= b`.
pub fn support_box(space: &ProductSpace, b: &MultiDegree) -> Window {
    let lo = b - &space.n_plus_one();
    Window::new(lo, b.clone()).expect("box is nonempty")
}

/// Rows of the support box selected by `keep`, failing if any is not fully known.
fn gather(
    table: &CohomologyTable,
    b: &MultiDegree,
    keep: impl Fn(&MultiDegree) -> bool,
) -> Result<Vec<(MultiDegree, Vec<u64>)>, TateError> {
    table.space().check(b)?;
    let mut missing = Vec::new();
    let mut rows = Vec::new();
    for a in support_box(table.space(), b).points() {
        if !keep(&a) {
            continue;
        }
        match table.vector(&a) {
            Some(row) if row.iter().all(|c| c.known().is_some()) => {
                rows.push((a, row.iter().map(|c| c.dim).collect()));
            }
            _ => missing.push(a),
        }
    }
    if missing.is_empty() {
        Ok(rows)
    } else {
        Err(TateError::WindowInsufficient { missing })
    }
}

fn signed_sum(space: &ProductSpace, rows: &[(MultiDegree, Vec<u64>)], b: &MultiDegree) -> i128 {
    let mut acc = 0i128;
    for (a, row) in rows {
        let w = exterior_weight(space, a, b) as i128;
        for (i, &h) in row.iter().enumerate() {
            let d = a.total() + i as i64;
            let term = w * h as i128;
            acc += if d.rem_euclid(2) == 0 { term } else { -term };
        }
    }
    acc
}

pub fn tate_term_dims(table: &CohomologyTable, b: &MultiDegree) -> Result<TateTermProfile, TateError> {
    let rows = gather(table, b, |_| true)?;
    let mut dims = BTreeMap::new();
    for (a, row) in rows {
        let w = exterior_weight(table.space(), &a, b);
        for (i, &h) in row.iter().enumerate() {
            if h > 0 {
                *dims.entry(a.total() + i as i64).or_insert(0) += w * h;
            }
        }
    }
    Ok(TateTermProfile { b: b.clone(), dims })
}

/// Alternating sum of the Tate terms in internal degree `b`; zero for a genuine table.
pub fn tate_checksum(table: &CohomologyTable, b: &MultiDegree) -> Result<i128, TateError> {
    let rows = gather(table, b, |_| true)?;
    Ok(signed_sum(table.space(), &rows, b))
}

/// Which factors are constrained by `<`, `=` and `>=` relative to `c`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrandSpec {
    pub less: BTreeSet<usize>,
    pub equal: BTreeSet<usize>,
    pub at_least: BTreeSet<usize>,
}

impl StrandSpec {
    pub fn new(less: &[usize], equal: &[usize], at_least: &[usize]) -> Self {
        StrandSpec {
            less: less.iter().copied().collect(),
            equal: equal.iter().copied().collect(),
            at_least: at_least.iter().copied().collect(),
        }
    }

    fn check(&self, t: usize) -> Result<(), TateError> {
        let total = self.less.len() + self.equal.len() + self.at_least.len();
        let union: BTreeSet<usize> = self.less.iter().chain(&self.equal).chain(&self.at_least).copied().collect();
        if union.len() != total || union.iter().any(|&j| j >= t) {
            return Err(TateError::BadFactorSets { t });
        }
        Ok(())
    }

    /// True when some factor is unconstrained, which is when the strand is exact.
    pub fn is_proper(&self, t: usize) -> bool {
        self.less.len() + self.equal.len() + self.at_least.len() < t
    }

    pub fn admits(&self, c: &MultiDegree, a: &MultiDegree) -> bool {
        self.less.iter().all(|&j| a[j] < c[j])
            && self.equal.iter().all(|&j| a[j] == c[j])
            && self.at_least.iter().all(|&j| a[j] >= c[j])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrandChecksum {
    pub value: i128,
    /// Whether exactness predicts `value == 0`.
    pub exactness_predicted: bool,
}

/// Alternating sum over the strand of twists admitted by `spec` relative to `c`.
pub fn strand_checksum(
    table: &CohomologyTable,
    c: &MultiDegree,
    spec: &StrandSpec,
    b: &MultiDegree,
) -> Result<StrandChecksum, TateError> {
    let space = table.space();
    space.check(c)?;
    spec.check(space.t())?;
    let rows = gather(table, b, |a| spec.admits(c, a))?;
    Ok(StrandChecksum { value: signed_sum(space, &rows, b), exactness_predicted: spec.is_proper(space.t()) })
}

/// Alternating sum over the cone of the corner map: the quadrant `a >= c`
/// plus the quadrant `a < c` shifted by `t` in homological degree.
pub fn corner_checksum(table: &CohomologyTable, c: &MultiDegree, b: &MultiDegree) -> Result<i128, TateError> {
    let space = table.space();
    space.check(c)?;
    let t = space.t();
    let all: Vec<usize> = (0..t).collect();
    let upper = StrandSpec::new(&[], &[], &all);
    let lower = StrandSpec::new(&all, &[], &[]);
    let rows_u = gather(table, b, |a| upper.admits(c, a));
    let rows_l = gather(table, b, |a| lower.admits(c, a));
    let (rows_u, rows_l) = match (rows_u, rows_l) {
        (Ok(u), Ok(l)) => (u, l),
        (u, l) => {
            let mut missing = Vec::new();
            for r in [u, l] {
                if let Err(TateError::WindowInsufficient { missing: m }) = r {
                    missing.extend(m);
                }
            }
            missing.sort();
            return Err(TateError::WindowInsufficient { missing });
        }
    };
    let u = signed_sum(space, &rows_u, b);
    let l = signed_sum(space, &rows_l, b);
    Ok(if t.is_multiple_of(2) { u - l } else { u + l })
}

/// A vanishing inferred along a strand that contradicts a computed cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrandInconsistency {
    pub twist: MultiDegree,
    pub index: usize,
    pub computed: u64,
    pub factor: usize,
    /// The vanishing cells `(a + s e_j, index - s)` that triggered the inference.
    pub antecedent: Vec<(MultiDegree, i64)>,
}

impl fmt::Display for StrandInconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ante: Vec<String> = self.antecedent.iter().map(|(a, i)| format!("h^{i}{a}")).collect();
        write!(
            f,
            "strand along factor {} forces h^{}{} = 0 from {} but the table has {}",
            self.factor + 1,
            self.index,
            self.twist,
            ante.join(", "),
            self.computed
        )
    }
}

impl std::error::Error for StrandInconsistency {}

/// Marks cells forced to vanish by the strand lemma, after extending the
/// window down by `margin` in every factor. Only unknown cells change; the
/// loop runs to a fixed point.
pub fn strand_propagate(table: &CohomologyTable, margin: i64) -> Result<CohomologyTable, StrandInconsistency> {
    let mut out = table.clone();
    if margin > 0 {
        let w = out.window().extended_down(margin);
        out.extend_to(&w);
    }
    let space = out.space().clone();
    let m = space.m() as i64;
    let points = out.window().points();
    loop {
        let mut changed = false;
        for j in 0..space.t() {
            let nj = space.n(j) as i64;
            for a in &points {
                for n in 0..=m {
                    let target = a.shifted(j, -1);
                    let Some(cell) = out.cell(&target, n as usize).copied() else { continue };
                    if cell.status == CellStatus::InferredZero || (cell.status == CellStatus::Computed && cell.dim == 0) {
                        continue;
                    }
                    let antecedent: Vec<(MultiDegree, i64)> = (0..=nj).map(|s| (a.shifted(j, s), n - s)).collect();
                    let vanishes = antecedent.iter().all(|(b, i)| out.known(b, *i) == Some(0));
                    if !vanishes {
                        continue;
                    }
                    if cell.status == CellStatus::Computed {
                        return Err(StrandInconsistency {
                            twist: target,
                            index: n as usize,
                            computed: cell.dim,
                            factor: j,
                            antecedent,
                        });
                    }
                    out.set(&target, n as usize, Cell::INFERRED_ZERO);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(out);
        }
    }
}
