//! Ready-made line-bundle complexes: direct sums, Koszul complexes, and the
//! point and ideal-sheaf examples on `P^1 x P^1`.

use std::collections::BTreeMap;

use crate::coxring::{FreeSum, LineBundleComplex, MultiHomogPoly, PolyMatrix};
use crate::lattice::{MultiDegree, Polarization, ProductSpace};
use crate::linalg::FieldSpec;

/// `O(b_1) + ... + O(b_r)` in degree 0.
pub fn direct_sum(space: &ProductSpace, field: FieldSpec, twists: Vec<MultiDegree>) -> LineBundleComplex {
    LineBundleComplex::free(space.clone(), field, twists).expect("twists match the space")
}

/// `sum_k O(kH)^{mult}` in degree 0.
pub fn split_sum(space: &ProductSpace, field: FieldSpec, d: &Polarization, multiset: &[(i64, u64)]) -> LineBundleComplex {
    let twists = multiset.iter().flat_map(|&(k, mult)| std::iter::repeat_n(d.multiple(k), mult as usize)).collect();
    direct_sum(space, field, twists)
}

/// Koszul complex of the forms `f_1, ..., f_r`, ending in `O` in degree 0.
///
/// Term `-k` is `sum_{|I| = k} O(-deg f_I)` with subsets in lexicographic
/// order, and `e_I` maps to `sum_pos (-1)^pos f_{i_pos} e_{I - i_pos}`.
pub fn koszul_complex(space: &ProductSpace, field: FieldSpec, forms: &[MultiHomogPoly]) -> LineBundleComplex {
    let r = forms.len();
    let subsets_of = |k: usize| -> Vec<Vec<usize>> {
        (0u32..(1 << r))
            .filter(|mask| mask.count_ones() as usize == k)
            .map(|mask| (0..r).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    let mut layers: Vec<Vec<Vec<usize>>> = (0..=r).map(subsets_of).collect();
    for layer in layers.iter_mut() {
        layer.sort();
    }
    let twist_of = |subset: &[usize]| -> MultiDegree {
        subset.iter().fold(MultiDegree::zero(space.t()), |acc, &i| &acc - forms[i].degree())
    };
    let mut terms = BTreeMap::new();
    for (k, layer) in layers.iter().enumerate() {
        terms.insert(-(k as i64), FreeSum::new(layer.iter().map(|s| twist_of(s)).collect()));
    }
    let mut diffs = BTreeMap::new();
    for k in 1..=r {
        let source = &terms[&-(k as i64)];
        let target = &terms[&(1 - k as i64)];
        let mut m = PolyMatrix::zero(source, target);
        for (col, subset) in layers[k].iter().enumerate() {
            for (pos, &i) in subset.iter().enumerate() {
                let rest: Vec<usize> = subset.iter().copied().filter(|&x| x != i).collect();
                let row = layers[k - 1].iter().position(|s| *s == rest).expect("face present");
                let entry = if pos % 2 == 0 { forms[i].clone() } else { forms[i].neg() };
                m.set(row, col, entry);
            }
        }
        diffs.insert(-(k as i64), m);
    }
    LineBundleComplex::new(space.clone(), field, terms, diffs).expect("Koszul complex is well formed")
}

/// `O(-1,-1) -> O(-1,0) + O(0,-1) -> O` resolving the point `V(x_{0,1}, x_{1,1})` on `P^1 x P^1`.
pub fn koszul_point_p1p1(field: FieldSpec) -> LineBundleComplex {
    let space = ProductSpace::new(vec![1, 1]).expect("valid space");
    let forms = [MultiHomogPoly::var(&space, 0, 1), MultiHomogPoly::var(&space, 1, 1)];
    koszul_complex(&space, field, &forms)
}

/// `O(-1,-1) -> O(-1,0) + O(0,-1)` in degrees -1, 0: the ideal sheaf of the same point.
pub fn ideal_point_p1p1(field: FieldSpec) -> LineBundleComplex {
    let k = koszul_point_p1p1(field);
    let mut terms = BTreeMap::new();
    terms.insert(-1, k.term(-2).expect("term").clone());
    terms.insert(0, k.term(-1).expect("term").clone());
    let mut diffs = BTreeMap::new();
    diffs.insert(-1, k.diff(-2).expect("diff").clone());
    LineBundleComplex::new(k.space().clone(), field, terms, diffs).expect("well formed")
}
