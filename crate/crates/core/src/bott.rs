//! Closed-form cohomology of line bundles `O(a_1, ..., a_t)`: the Bott
//! formula on each factor combined with the Künneth formula.

use std::ops::Index;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::lattice::{MultiDegree, Polarization, ProductSpace};

/// `h^0, ..., h^m` of one sheaf at one twist.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CohomologyVector(pub Vec<u64>);

impl CohomologyVector {
    pub fn zero(m: usize) -> Self {
        CohomologyVector(vec![0; m + 1])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add_assign(&mut self, other: &CohomologyVector) {
        assert_eq!(self.len(), other.len());
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            *x += y;
        }
    }

    pub fn scaled(&self, c: u64) -> CohomologyVector {
        CohomologyVector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn euler_characteristic(&self) -> i128 {
        self.0.iter().enumerate().map(|(i, &h)| if i % 2 == 0 { h as i128 } else { -(h as i128) }).sum()
    }

    /// Cohomology of a tensor product over a field: `(u * v)[i] = sum u[p] v[i-p]`.
    pub fn convolve(&self, other: &CohomologyVector) -> CohomologyVector {
        let mut out = vec![0u64; self.len() + other.len() - 1];
        for (p, &x) in self.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (q, &y) in other.0.iter().enumerate() {
                out[p + q] += x * y;
            }
        }
        CohomologyVector(out)
    }
}

impl Index<usize> for CohomologyVector {
    type Output = u64;
    fn index(&self, i: usize) -> &u64 {
        &self.0[i]
    }
}

/// `C(n, k)` for `0 <= k`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflows u64")
}

/// `C(x, k) = x (x-1) ... (x-k+1) / k!` for arbitrary integer `x`.
pub fn binomial_poly(x: i64, k: u64) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..k {
        acc *= BigRational::new(BigInt::from(x - i as i64), BigInt::from(i + 1));
    }
    acc
}

/// Cohomology of `O(a)` on `P^n`.
pub fn factor_h(n: usize, a: i64) -> CohomologyVector {
    let mut v = vec![0u64; n + 1];
    let n64 = n as i64;
    if a >= 0 {
        v[0] = binomial((a + n64) as u64, n as u64);
    } else if a < -n64 {
        v[n] = binomial((-a - 1) as u64, n as u64);
    }
    CohomologyVector(v)
}

/// Cohomology of `O(a)` on the product, by Künneth.
pub fn line_bundle_h(space: &ProductSpace, a: &MultiDegree) -> CohomologyVector {
    space.check(a).expect("twist length matches space");
    (0..space.t()).map(|j| factor_h(space.n(j), a[j])).reduce(|acc, v| acc.convolve(&v)).expect("t >= 1")
}

/// Nonvanishing pattern of a line bundle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Signature {
    Zero,
    /// Cohomology lives only in degree `index = sum_{j in very_negative} n_j`.
    Nonzero {
        index: usize,
        very_negative: Vec<usize>,
    },
}

impl Signature {
    /// `0 < i < m`.
    pub fn is_intermediate(&self, space: &ProductSpace) -> bool {
        match self {
            Signature::Zero => false,
            Signature::Nonzero { index, .. } => *index > 0 && *index < space.m(),
        }
    }
}

/// Which cohomology group of `O(a)` is nonzero, if any.
pub fn signature(space: &ProductSpace, a: &MultiDegree) -> Signature {
    let mut index = 0;
    let mut very_negative = Vec::new();
    for j in 0..space.t() {
        let n = space.n(j) as i64;
        if a[j] < -n {
            index += space.n(j);
            very_negative.push(j);
        } else if a[j] < 0 {
            return Signature::Zero;
        }
    }
    Signature::Nonzero { index, very_negative }
}

/// `chi(O(a)) = prod_j C(a_j + n_j, n_j)` with the polynomial binomial.
pub fn euler_characteristic_poly(space: &ProductSpace, a: &MultiDegree) -> BigRational {
    (0..space.t()).map(|j| binomial_poly(a[j] + space.n(j) as i64, space.n(j) as u64)).fold(BigRational::one(), |acc, x| acc * x)
}

/// `h^0(O(d))`, the number of global sections of the polarization.
pub fn sections_of_polarization(space: &ProductSpace, d: &Polarization) -> u64 {
    line_bundle_h(space, d.degree())[0]
}

/// `N` for the Segre-Veronese embedding into `P^N` by `|O(d)|`.
pub fn embedding_dimension(space: &ProductSpace, d: &Polarization) -> u64 {
    sections_of_polarization(space, d) - 1
}

/// Bott table of a direct sum `sum_k O(kH)^{mult}` evaluated at `a`.
pub fn split_sum_h(space: &ProductSpace, d: &Polarization, multiset: &[(i64, u64)], a: &MultiDegree) -> CohomologyVector {
    let mut acc = CohomologyVector::zero(space.m());
    for &(k, mult) in multiset {
        acc.add_assign(&line_bundle_h(space, &(&d.multiple(k) + a)).scaled(mult));
    }
    acc
}
