//! JSON form of a line-bundle complex.
//!
//! ```json
//! {
//!   "space": {"factor_dims": [1, 1]},
//!   "field": "p:65521",
//!   "complex": {
//!     "terms": [{"p": -1, "twists": [[-1, -1]]}, {"p": 0, "twists": [[-1, 0], [0, -1]]}],
//!     "diffs": [{"p": -1, "entries": [
//!       [{"degree": [0, 1], "terms": [{"c": 1, "e": [[0, 0], [0, 1]]}]}],
//!       [{"degree": [1, 0], "terms": [{"c": "-1", "e": [[0, 1], [0, 0]]}]}]
//!     ]}]
//!   }
//! }
//! ```
//!
//! `entries` has one row per summand of term `p + 1` and one column per
//! summand of term `p`; a bare `0` is the zero entry. Coefficients are
//! integers or strings `"num/den"`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxring::{
    validate_complex, ExponentVector, FreeSum, LineBundleComplex, MultiHomogPoly, PolyMatrix, RingError, Violation,
};
use crate::lattice::{MultiDegree, ProductSpace};
use crate::linalg::FieldSpec;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("not a complex: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    NotAComplex(Vec<Violation>),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub space: ProductSpace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    pub complex: ComplexBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexBody {
    pub terms: Vec<TermJson>,
    #[serde(default)]
    pub diffs: Vec<DiffJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub p: i64,
    pub twists: Vec<MultiDegree>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffJson {
    pub p: i64,
    pub entries: Vec<Vec<EntryJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Zero(u8),
    Poly(PolyJson),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub degree: MultiDegree,
    pub terms: Vec<MonomialJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialJson {
    pub c: CoefJson,
    pub e: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefJson {
    Int(i64),
    Text(String),
}

impl CoefJson {
    fn parse(&self) -> Result<BigRational, IoError> {
        match self {
            CoefJson::Int(x) => Ok(BigRational::from_integer(BigInt::from(*x))),
            CoefJson::Text(s) => {
                let bad = || IoError::Schema(format!("bad coefficient `{s}`"));
                let (num, den) = match s.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (s.trim(), "1"),
                };
                let num: BigInt = num.parse().map_err(|_| bad())?;
                let den: BigInt = den.parse().map_err(|_| bad())?;
                if den == BigInt::from(0) {
                    return Err(bad());
                }
                Ok(BigRational::new(num, den))
            }
        }
    }

    fn from_rational(q: &BigRational) -> Self {
        if q.is_integer() {
            if let Ok(x) = i64::try_from(q.numer().clone()) {
                return CoefJson::Int(x);
            }
        }
        CoefJson::Text(q.to_string())
    }
}

impl ComplexFile {
    /// Builds and validates the complex. `field` overrides the file's field.
    pub fn into_complex(self, field: Option<FieldSpec>) -> Result<LineBundleComplex, IoError> {
        let field = field.or(self.field).unwrap_or_default();
        let space = self.space;
        let mut terms = BTreeMap::new();
        for t in self.complex.terms {
            if terms.insert(t.p, FreeSum::new(t.twists)).is_some() {
                return Err(IoError::Schema(format!("term p = {} listed twice", t.p)));
            }
        }
        let empty = FreeSum::default();
        let mut diffs = BTreeMap::new();
        for dj in self.complex.diffs {
            let src = terms.get(&dj.p).unwrap_or(&empty).clone();
            let tgt = terms.get(&(dj.p + 1)).unwrap_or(&empty).clone();
            if dj.entries.len() != tgt.rank() || dj.entries.iter().any(|r| r.len() != src.rank()) {
                let found = (dj.entries.len(), dj.entries.first().map_or(0, Vec::len));
                return Err(RingError::Shape { p: dj.p, expected: (tgt.rank(), src.rank()), found }.into());
            }
            let mut m = PolyMatrix::zero(&src, &tgt);
            for (r, row) in dj.entries.iter().enumerate() {
                for (c, entry) in row.iter().enumerate() {
                    let expected = &tgt.twists[r] - &src.twists[c];
                    let poly = match entry {
                        EntryJson::Zero(0) => MultiHomogPoly::zero(expected),
                        EntryJson::Zero(x) => {
                            return Err(IoError::Schema(format!("entry ({r}, {c}) of diff p = {} is the number {x}", dj.p)))
                        }
                        EntryJson::Poly(pj) => {
                            let mut monos = Vec::with_capacity(pj.terms.len());
                            for t in &pj.terms {
                                monos.push((t.c.parse()?, ExponentVector(t.e.clone())));
                            }
                            MultiHomogPoly::from_terms(&space, field, pj.degree.clone(), monos)?
                        }
                    };
                    m.set(r, c, poly);
                }
            }
            if diffs.insert(dj.p, m).is_some() {
                return Err(IoError::Schema(format!("diff p = {} listed twice", dj.p)));
            }
        }
        let c = LineBundleComplex::new(space, field, terms, diffs)?;
        validate_complex(&c).map_err(IoError::NotAComplex)?;
        Ok(c)
    }

    pub fn from_complex(c: &LineBundleComplex) -> Self {
        let terms = c.terms().iter().map(|(&p, s)| TermJson { p, twists: s.twists.clone() }).collect();
        let diffs = c
            .diffs()
            .iter()
            .map(|(&p, m)| DiffJson {
                p,
                entries: (0..m.rows())
                    .map(|r| {
                        (0..m.cols())
                            .map(|col| {
                                let f = m.get(r, col);
                                if f.is_zero() {
                                    EntryJson::Zero(0)
                                } else {
                                    EntryJson::Poly(PolyJson {
                                        degree: f.degree().clone(),
                                        terms: f
                                            .terms()
                                            .map(|(e, q)| MonomialJson { c: CoefJson::from_rational(q), e: e.0.clone() })
                                            .collect(),
                                    })
                                }
                            })
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        ComplexFile { space: c.space().clone(), field: Some(c.field()), complex: ComplexBody { terms, diffs } }
    }
}

pub fn parse_complex(text: &str, field: Option<FieldSpec>) -> Result<LineBundleComplex, IoError> {
    let file: ComplexFile = serde_json::from_str(text)?;
    file.into_complex(field)
}

pub fn complex_to_json(c: &LineBundleComplex) -> String {
    serde_json::to_string_pretty(&ComplexFile::from_complex(c)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sheaves;

    #[test]
    fn round_trip() {
        for f in [FieldSpec::Rationals, FieldSpec::default()] {
            for c in [sheaves::koszul_point_p1p1(f), sheaves::ideal_point_p1p1(f)] {
                let text = complex_to_json(&c);
                assert_eq!(parse_complex(&text, None).unwrap(), c);
            }
        }
    }

    #[test]
    fn documented_example_parses() {
        let text = r#"{
          "space": {"factor_dims": [1, 1]},
          "field": "q",
          "complex": {
            "terms": [{"p": -1, "twists": [[-1, -1]]}, {"p": 0, "twists": [[-1, 0], [0, -1]]}],
            "diffs": [{"p": -1, "entries": [
              [{"degree": [0, 1], "terms": [{"c": 1, "e": [[0, 0], [0, 1]]}]}],
              [{"degree": [1, 0], "terms": [{"c": "-1", "e": [[0, 1], [0, 0]]}]}]
            ]}]
          }
        }"#;
        let c = parse_complex(text, None).unwrap();
        assert_eq!(c.field(), FieldSpec::Rationals);
        assert_eq!(c.term(0).unwrap().rank(), 2);
        assert_eq!(parse_complex(text, Some(FieldSpec::default())).unwrap().field(), FieldSpec::default());
    }

    #[test]
    fn errors() {
        match parse_complex("{\"space\": ", None) {
            Err(IoError::Json { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        let wrong_shape = r#"{"space": {"factor_dims": [1]}, "complex": {"terms": [{"p": 0, "twists": [[0]]}, {"p": 1, "twists": [[1]]}], "diffs": [{"p": 0, "entries": []}]}}"#;
        assert!(matches!(parse_complex(wrong_shape, None), Err(IoError::Ring(RingError::Shape { .. }))));
        let wrong_degree = r#"{"space": {"factor_dims": [1]}, "complex": {"terms": [{"p": 0, "twists": [[0]]}, {"p": 1, "twists": [[2]]}],
            "diffs": [{"p": 0, "entries": [[{"degree": [1], "terms": [{"c": 1, "e": [[1, 0]]}]}]]}]}}"#;
        assert!(matches!(parse_complex(wrong_degree, None), Err(IoError::NotAComplex(_))));
        let bad_coef = r#"{"space": {"factor_dims": [1]}, "complex": {"terms": [{"p": 0, "twists": [[0]]}, {"p": 1, "twists": [[1]]}],
            "diffs": [{"p": 0, "entries": [[{"degree": [1], "terms": [{"c": "1/0", "e": [[1, 0]]}]}]]}]}}"#;
        assert!(matches!(parse_complex(bad_coef, None), Err(IoError::Schema(_))));
    }
}
