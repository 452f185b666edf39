//! Decides whether a sheaf is a direct sum `O(k_1 H) + ... + O(k_r H)` for
//! the polarization `H = O(d)`, from its cohomology over a finite window.
//!
//! A sheaf on a product with `t >= 2` factors splits this way exactly when
//! `h^i(F(a)) = 0` for `0 < i < m` at every twist `a` where no line bundle
//! `O(a + kH)` has intermediate cohomology. The window only sees finitely
//! many twists, so a split verdict additionally requires that the summands
//! recovered from `h^0` reproduce the whole table.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bott::{line_bundle_h, split_sum_h};
use crate::cech::{CechEngine, CechError};
use crate::coxring::LineBundleComplex;
use crate::lattice::{is_safe, safe_region, MultiDegree, Polarization, ProductSpace, Window};
use crate::table::CohomologyTable;
use crate::tate::strand_propagate;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SplitVerdict {
    Split { multiset: Vec<(i64, u64)> },
    NonSplit { witness: MultiDegree, index: usize },
    Inconclusive { reason: String },
}

impl SplitVerdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            SplitVerdict::Split { .. } => 0,
            SplitVerdict::NonSplit { .. } => 10,
            SplitVerdict::Inconclusive { .. } => 11,
        }
    }

    fn inconclusive(reason: impl Into<String>) -> Self {
        SplitVerdict::Inconclusive { reason: reason.into() }
    }
}

impl fmt::Display for SplitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitVerdict::Split { multiset } if multiset.is_empty() => write!(f, "split: zero sheaf"),
            SplitVerdict::Split { multiset } => {
                let parts: Vec<String> =
                    multiset.iter().map(|(k, m)| if *m == 1 { format!("O({k}H)") } else { format!("O({k}H)^{m}") }).collect();
                write!(f, "split: {}", parts.join(" + "))
            }
            SplitVerdict::NonSplit { witness, index } => {
                write!(f, "not split: h^{index}(F{witness}) != 0 at a twist with no intermediate line-bundle cohomology")
            }
            SplitVerdict::Inconclusive { reason } => write!(f, "inconclusive: {reason}"),
        }
    }
}

/// Safe twists in the window with known nonzero intermediate cohomology,
/// lexicographic in the twist, then by index.
pub fn hypothesis_violations(table: &CohomologyTable, d: &Polarization) -> Vec<(MultiDegree, usize)> {
    let space = table.space();
    let m = space.m();
    let mut out = Vec::new();
    for (a, row) in table.rows() {
        if !is_safe(space, d, a) {
            continue;
        }
        for (i, cell) in row.iter().enumerate().take(m).skip(1) {
            if cell.known().is_some_and(|x| x > 0) {
                out.push((a.clone(), i));
            }
        }
    }
    out
}

/// `h^m(F(a)) != 0` at `a` while `h^m(F(c)) = 0` at some `c <= a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityViolation {
    pub nonzero_at: MultiDegree,
    pub zero_at: MultiDegree,
}

impl fmt::Display for MonotonicityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h^m is nonzero at {} but zero at {} below it", self.nonzero_at, self.zero_at)
    }
}

/// Top cohomology can only grow as the twist decreases; checks every comparable pair of known cells.
pub fn hm_monotonicity_check(table: &CohomologyTable) -> Result<(), MonotonicityViolation> {
    let m = table.m() as i64;
    let mut nonzero = Vec::new();
    let mut zero = Vec::new();
    for (a, _) in table.rows() {
        match table.known(a, m) {
            Some(0) => zero.push(a.clone()),
            Some(_) => nonzero.push(a.clone()),
            None => {}
        }
    }
    for a in &nonzero {
        if let Some(c) = zero.iter().find(|c| c.0.iter().zip(&a.0).all(|(x, y)| x <= y)) {
            return Err(MonotonicityViolation { nonzero_at: a.clone(), zero_at: c.clone() });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalReport {
    /// Maximal twists with known nonzero `h^m`.
    pub positions: Vec<MultiDegree>,
    /// `k` when the only position is `k d - n - 1`.
    pub of_theorem_form: Option<i64>,
    /// False when a position sits on the upper window boundary or below an unknown cell.
    pub certifiable: bool,
}

/// `k` with `a = k d - n - 1`, if any.
pub fn theorem_form(space: &ProductSpace, d: &Polarization, a: &MultiDegree) -> Option<i64> {
    let shifted = a + &space.n_plus_one();
    let k = shifted[0].div_euclid(d.d(0));
    (d.multiple(k) == shifted).then_some(k)
}

pub fn extremal_hm(table: &CohomologyTable, d: &Polarization) -> ExtremalReport {
    let space = table.space();
    let m = table.m() as i64;
    let leq = |x: &MultiDegree, y: &MultiDegree| x.0.iter().zip(&y.0).all(|(p, q)| p <= q);
    let nonzero: Vec<&MultiDegree> = table.rows().map(|(a, _)| a).filter(|a| table.known(a, m).is_some_and(|x| x > 0)).collect();
    let unknown: Vec<&MultiDegree> = table.rows().map(|(a, _)| a).filter(|a| table.known(a, m).is_none()).collect();
    let positions: Vec<MultiDegree> =
        nonzero.iter().filter(|a| !nonzero.iter().any(|c| c != *a && leq(a, c))).map(|a| (*a).clone()).collect();
    let hi = table.window().hi();
    let certifiable = !positions.is_empty()
        && positions.iter().all(|a| (0..space.t()).all(|j| a[j] < hi[j]) && !unknown.iter().any(|c| *c != a && leq(a, c)));
    let of_theorem_form = match positions.as_slice() {
        [a] => theorem_form(space, d, a),
        _ => None,
    };
    ExtremalReport { positions, of_theorem_form, certifiable }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultiplicityError {
    /// `-kH` for some needed `k` is outside the window or unknown.
    Missing {
        k: i64,
    },
    /// `h^0(F(-kH))` is nonzero for the largest `k` with `-kH` in the window.
    Unbounded {
        k: i64,
    },
    NegativeResidual {
        k: i64,
        residual: i128,
    },
    Empty,
}

impl fmt::Display for MultiplicityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiplicityError::Missing { k } => write!(f, "h^0 at -({k})H is not known in the window"),
            MultiplicityError::Unbounded { k } => write!(f, "h^0(F(-({k})H)) != 0 at the edge of the window"),
            MultiplicityError::NegativeResidual { k, residual } => {
                write!(f, "negative residual {residual} at k = {k}: not a sum of O(kH)")
            }
            MultiplicityError::Empty => write!(f, "no sections at any -kH in the window"),
        }
    }
}

/// Multiset `{(k, mult)}` with `F = sum O(kH)^mult`, by `h^0` descent from the
/// largest `k` with `h^0(F(-kH)) != 0` down to `k_min` inclusive.
pub fn multiplicities(table: &CohomologyTable, d: &Polarization, k_min: i64) -> Result<Vec<(i64, u64)>, MultiplicityError> {
    let space = table.space();
    let h0 = |k: i64| table.known(&d.multiple(-k), 0);
    let w = table.window();
    let in_window: Vec<i64> = ((k_min - 1)..)
        .take_while(|&k| {
            let neg = d.multiple(-k);
            (0..space.t()).any(|j| neg[j] >= w.lo()[j])
        })
        .filter(|&k| w.contains(&d.multiple(-k)))
        .collect();
    let mut k_max = None;
    for &k in in_window.iter().rev() {
        match h0(k) {
            None => return Err(MultiplicityError::Missing { k }),
            Some(0) => {}
            Some(_) => {
                if !in_window.contains(&(k + 1)) {
                    return Err(MultiplicityError::Unbounded { k });
                }
                k_max = Some(k);
                break;
            }
        }
    }
    let Some(k_max) = k_max else { return Err(MultiplicityError::Empty) };
    let mut found: BTreeMap<i64, u64> = BTreeMap::new();
    let mut k = k_max;
    while k >= k_min {
        let total = h0(k).ok_or(MultiplicityError::Missing { k })? as i128;
        let explained: i128 =
            found.iter().map(|(&kp, &mult)| mult as i128 * line_bundle_h(space, &d.multiple(kp - k))[0] as i128).sum();
        let residual = total - explained;
        if residual < 0 {
            return Err(MultiplicityError::NegativeResidual { k, residual });
        }
        if residual > 0 {
            found.insert(k, residual as u64);
        }
        k -= 1;
    }
    Ok(found.into_iter().rev().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitMismatch {
    pub twist: MultiDegree,
    pub index: usize,
    pub expected: u64,
    pub found: u64,
}

impl fmt::Display for SplitMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h^{}{}: the split candidate gives {}, the table has {}", self.index, self.twist, self.expected, self.found)
    }
}

/// Compares every known cell with the closed-form table of `sum O(kH)^mult`.
pub fn verify_split(table: &CohomologyTable, multiset: &[(i64, u64)], d: &Polarization) -> Result<(), SplitMismatch> {
    for (a, row) in table.rows() {
        let expected = split_sum_h(table.space(), d, multiset, a);
        for (i, cell) in row.iter().enumerate() {
            if let Some(found) = cell.known() {
                if found != expected[i] {
                    return Err(SplitMismatch { twist: a.clone(), index: i, expected: expected[i], found });
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertions {
    /// The caller vouches that the sheaf is torsion free; this is not checked.
    pub torsion_free: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    #[serde(flatten)]
    pub verdict: SplitVerdict,
    pub window: Window,
    pub assertions: Assertions,
    pub safe_region_size: usize,
    pub extremal_positions: Vec<MultiDegree>,
    /// `h^0(F(kH)) >= h^m(F(kH - n - 1))` at the extremal `k`, when both cells are known.
    pub sections_dominate_top: Option<bool>,
    pub inferred_zero_cells: usize,
    /// `"theorem"` for `t >= 2`, `"classical-horrocks"` for one factor.
    pub mode: String,
    /// Split verdict on a torsion-free-asserted input with `t >= 2`.
    pub theorem_backed: bool,
}

impl VerdictReport {
    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }
}

/// Runs the decision pipeline on a computed table.
pub fn split_check_table(table: &CohomologyTable, d: &Polarization, assertions: Assertions) -> VerdictReport {
    let space = table.space().clone();
    let window = table.window().clone();
    let mut report = VerdictReport {
        verdict: SplitVerdict::inconclusive("not evaluated"),
        window: window.clone(),
        assertions,
        safe_region_size: 0,
        extremal_positions: Vec::new(),
        sections_dominate_top: None,
        inferred_zero_cells: 0,
        mode: if space.t() >= 2 { "theorem".into() } else { "classical-horrocks".into() },
        theorem_backed: false,
    };
    if d.degree().len() != space.t() {
        report.verdict = SplitVerdict::inconclusive("polarization length does not match the space");
        return report;
    }
    report.safe_region_size = safe_region(&space, d, &window).len();
    report.verdict = decide(table, d, &mut report);
    report.theorem_backed = matches!(report.verdict, SplitVerdict::Split { .. }) && assertions.torsion_free && space.t() >= 2;
    report
}

fn decide(table: &CohomologyTable, d: &Polarization, report: &mut VerdictReport) -> SplitVerdict {
    let space = table.space();
    let m = space.m() as i64;
    let margin = space.factor_dims().iter().max().copied().unwrap_or(0) as i64 + 1;
    let table = match strand_propagate(table, margin) {
        Ok(t) => t,
        Err(e) => return SplitVerdict::inconclusive(format!("table inconsistent: {e}")),
    };
    report.inferred_zero_cells = table.count_status(crate::table::CellStatus::InferredZero);
    if let Err(v) = hm_monotonicity_check(&table) {
        return SplitVerdict::inconclusive(format!("table inconsistent: {v}"));
    }
    let all_zero = table.rows().all(|(_, row)| row.iter().all(|c| c.known().unwrap_or(0) == 0));
    if all_zero && table.rows().any(|(_, row)| row.iter().any(|c| c.known().is_some())) {
        return SplitVerdict::Split { multiset: Vec::new() };
    }
    if let Some((witness, index)) = hypothesis_violations(&table, d).into_iter().next() {
        return SplitVerdict::NonSplit { witness, index };
    }
    let ext = extremal_hm(&table, d);
    report.extremal_positions = ext.positions.clone();
    if ext.positions.is_empty() {
        return SplitVerdict::inconclusive("h^m vanishes on the whole window");
    }
    if !ext.certifiable {
        return SplitVerdict::inconclusive("extremality uncertifiable: the h^m locus reaches the window boundary");
    }
    let Some(k) = ext.of_theorem_form else {
        return SplitVerdict::inconclusive("extremal h^m position is not of the form k d - n - 1 within the window");
    };
    let top = table.known(&ext.positions[0], m);
    let sections = table.known(&d.multiple(k), 0);
    if let (Some(top), Some(sections)) = (top, sections) {
        report.sections_dominate_top = Some(sections >= top);
        if sections < top {
            return SplitVerdict::inconclusive(format!("h^0(F({k}H)) = {sections} < h^m = {top} at the extremal position"));
        }
    }
    let multiset = match multiplicities(&table, d, -k) {
        Ok(ms) => ms,
        Err(e) => return SplitVerdict::inconclusive(format!("multiplicities: {e}")),
    };
    match verify_split(&table, &multiset, d) {
        Ok(()) => SplitVerdict::Split { multiset },
        Err(e) => SplitVerdict::inconclusive(format!("candidate does not reproduce the table: {e}")),
    }
}

/// Computes the table of `c` on `window` and runs [`split_check_table`].
/// Failures in the cohomology computation become an inconclusive verdict.
pub fn split_check(c: &LineBundleComplex, d: &Polarization, window: &Window, assertions: Assertions) -> VerdictReport {
    match CechEngine::new(c.field()).cohomology_table(c, window) {
        Ok(t) => split_check_table(&t, d, assertions),
        Err(e) => failed_report(c.space(), d, window, assertions, &e),
    }
}

fn failed_report(
    space: &ProductSpace,
    d: &Polarization,
    window: &Window,
    assertions: Assertions,
    e: &CechError,
) -> VerdictReport {
    VerdictReport {
        verdict: SplitVerdict::inconclusive(format!("cohomology failed: {e}")),
        window: window.clone(),
        assertions,
        safe_region_size: safe_region(space, d, window).len(),
        extremal_positions: Vec::new(),
        sections_dominate_top: None,
        inferred_zero_cells: 0,
        mode: if space.t() >= 2 { "theorem".into() } else { "classical-horrocks".into() },
        theorem_backed: false,
    }
}
