//! JSON file formats.
//!
//! Matrices are `{"rows": [...], "cols": [...], "entries": [[...]]}` with
//! scalars written as `"t:p/q"`, `"g:p/q"` or `"inf"`. Symmetrized matrices
//! add `"I"` and `"J"`; series matrices add `"field"` and use
//! `[coefficient, exponent]` pair lists as entries; `Phi` adds `"d"`, `"k"`
//! and a `"coeffs"` table keyed `"i,j,alpha"`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::construction::{CoeffKey, GoodTuple, PhiMatrix, ZeroOneMatrix};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::puiseux::{PuiseuxPoly, SeriesMatrix};
use crate::rational::{format_rat, parse_rat};
use crate::semiring::Scalar;
use crate::symmetrize::SymmetrizedMatrix;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    rows: Vec<String>,
    cols: Vec<String>,
    entries: Vec<Vec<Scalar>>,
}

impl MatrixJson {
    fn from_matrix(m: &Matrix) -> Self {
        MatrixJson {
            rows: m.row_labels().to_vec(),
            cols: m.col_labels().to_vec(),
            entries: m.rows_iter().map(<[Scalar]>::to_vec).collect(),
        }
    }

    fn into_matrix(self) -> Result<Matrix> {
        Matrix::new(self.rows, self.cols, self.entries)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymmetrizedJson {
    rows: Vec<String>,
    cols: Vec<String>,
    entries: Vec<Vec<Scalar>>,
    #[serde(rename = "I")]
    index: Vec<String>,
    #[serde(rename = "J")]
    extra: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesJson {
    field: String,
    rows: Vec<String>,
    cols: Vec<String>,
    entries: Vec<Vec<Vec<(String, String)>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhiJson {
    d: usize,
    k: usize,
    rows: Vec<String>,
    cols: Vec<String>,
    entries: Vec<Vec<Scalar>>,
    coeffs: BTreeMap<String, String>,
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("in-memory serialization")
}

pub fn matrix_from_json(text: &str) -> Result<Matrix> {
    parse::<MatrixJson>(text)?.into_matrix()
}

pub fn matrix_to_json(m: &Matrix) -> String {
    pretty(&MatrixJson::from_matrix(m))
}

pub fn symmetrized_from_json(text: &str) -> Result<SymmetrizedMatrix> {
    let j: SymmetrizedJson = parse(text)?;
    SymmetrizedMatrix::new(Matrix::new(j.rows, j.cols, j.entries)?, j.index, j.extra)
}

pub fn symmetrized_to_json(t: &SymmetrizedMatrix) -> String {
    let m = MatrixJson::from_matrix(t.matrix());
    pretty(&SymmetrizedJson {
        rows: m.rows,
        cols: m.cols,
        entries: m.entries,
        index: t.index_labels().to_vec(),
        extra: t.extra_labels().to_vec(),
    })
}

pub fn series_from_json(text: &str) -> Result<SeriesMatrix> {
    let j: SeriesJson = parse(text)?;
    let field: Field = j.field.parse()?;
    let grid = j
        .entries
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|terms| {
                    let terms = terms
                        .into_iter()
                        .map(|(c, e)| Ok((field.parse_elem(&c)?, parse_rat(&e)?)))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(PuiseuxPoly::from_terms(terms))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SeriesMatrix::new(field, j.rows, j.cols, grid)
}

pub fn series_to_json(s: &SeriesMatrix) -> String {
    let entries = (0..s.nrows())
        .map(|i| {
            (0..s.ncols())
                .map(|j| {
                    s.get(i, j)
                        .terms()
                        .iter()
                        .map(|(c, e)| (c.to_string(), format_rat(e)))
                        .collect()
                })
                .collect()
        })
        .collect();
    pretty(&SeriesJson {
        field: s.field().to_string(),
        rows: s.row_labels().to_vec(),
        cols: s.col_labels().to_vec(),
        entries,
    })
}

pub fn zero_one_from_json(text: &str) -> Result<ZeroOneMatrix> {
    parse(text)
}

pub fn zero_one_to_json(m: &ZeroOneMatrix) -> String {
    pretty(m)
}

/// Loads a tuple and re-verifies both conditions.
pub fn tuple_from_json(text: &str) -> Result<GoodTuple> {
    let t: GoodTuple = parse(text)?;
    t.validate()?;
    Ok(t)
}

pub fn tuple_to_json(t: &GoodTuple) -> String {
    pretty(t)
}

fn coeff_key_text(key: &CoeffKey) -> String {
    format!("i{},j{},{}", key.i + 1, key.j + 1, key.alpha)
}

fn parse_coeff_key(text: &str) -> Result<CoeffKey> {
    let bad = || Error::Parse(format!("coefficient key {text:?} is not \"i<n>,j<n>,<alpha>\""));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [i, j, alpha] = parts[..] else {
        return Err(bad());
    };
    let index = |s: &str, prefix: &str| -> Result<usize> {
        s.strip_prefix(prefix)
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| n > 0)
            .map(|n| n - 1)
            .ok_or_else(bad)
    };
    Ok(CoeffKey {
        i: index(i, "i")?,
        j: index(j, "j")?,
        alpha: alpha.parse().map_err(|_| bad())?,
    })
}

/// Loads `Phi`. Its entries are checked against a 0-1 matrix only when it is
/// verified together with a tuple.
pub fn phi_from_json(text: &str) -> Result<PhiMatrix> {
    let j: PhiJson = parse(text)?;
    let matrix = Matrix::new(j.rows, j.cols, j.entries)?;
    let coeffs = j
        .coeffs
        .iter()
        .map(|(k, v)| Ok((parse_coeff_key(k)?, parse_rat(v)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    PhiMatrix::from_raw(j.d, j.k, matrix, coeffs)
}

pub fn phi_to_json(phi: &PhiMatrix) -> String {
    let m = MatrixJson::from_matrix(phi.matrix());
    pretty(&PhiJson {
        d: phi.d(),
        k: phi.k(),
        rows: m.rows,
        cols: m.cols,
        entries: m.entries,
        coeffs: phi
            .coeffs()
            .iter()
            .map(|(k, v)| (coeff_key_text(k), format_rat(v)))
            .collect(),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    pretty(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldElem;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn scalar() -> impl Strategy<Value = Scalar> {
        prop_oneof![
            (-20i64..20, 1i64..5).prop_map(|(p, q)| Scalar::Tangible(rat(p, q))),
            (-20i64..20, 1i64..5).prop_map(|(p, q)| Scalar::Ghost(rat(p, q))),
            Just(Scalar::Infinity),
        ]
    }

    proptest! {
        #[test]
        fn matrix_round_trip(r in 1usize..5, c in 1usize..5, cells in proptest::collection::vec(scalar(), 16)) {
            let m = Matrix::from_fn(
                (0..r).map(|i| format!("r{i}")).collect(),
                (0..c).map(|j| format!("c{j}")).collect(),
                |i, j| cells[i * 4 + j].clone(),
            ).unwrap();
            prop_assert_eq!(matrix_from_json(&matrix_to_json(&m)).unwrap(), m);
        }

        #[test]
        fn series_round_trip(
            cells in proptest::collection::vec(proptest::collection::vec((-3i64..4, -6i64..6, 1i64..3), 0..3), 4),
            prime in prop_oneof![Just(None), Just(Some(3u64)), Just(Some(5u64))],
        ) {
            let field = match prime {
                None => Field::Rational,
                Some(p) => Field::prime(p).unwrap(),
            };
            let s = SeriesMatrix::from_fn(
                field,
                vec!["a".into(), "b".into()],
                vec!["x".into(), "y".into()],
                |i, j| PuiseuxPoly::from_terms(
                    cells[i * 2 + j].iter().map(|&(c, p, q)| (field.from_i64(c), rat(p, q))).collect(),
                ),
            ).unwrap();
            prop_assert_eq!(series_from_json(&series_to_json(&s)).unwrap(), s);
        }
    }

    #[test]
    fn matrix_format() {
        let m = Matrix::from_rows(vec![vec![Scalar::t(0), Scalar::g(1)], vec![Scalar::Infinity, Scalar::Tangible(rat(-1, 2))]]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&matrix_to_json(&m)).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"rows": ["1", "2"], "cols": ["1", "2"], "entries": [["t:0", "g:1"], ["inf", "t:-1/2"]]})
        );
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(matrix_from_json("{").is_err());
        assert!(matrix_from_json(r#"{"rows":["1"],"cols":["1"],"entries":[["x:1"]]}"#).is_err());
        assert!(matrix_from_json(r#"{"rows":["1","1"],"cols":["1"],"entries":[["t:1"],["t:1"]]}"#).is_err());
        assert!(matrix_from_json(r#"{"rows":["1"],"cols":["1","2"],"entries":[["t:1"]]}"#).is_err());
        assert!(series_from_json(r#"{"field":"Fp:4","rows":[],"cols":[],"entries":[]}"#).is_err());
        assert!(series_from_json(r#"{"field":"Fp:3","rows":["1"],"cols":["1"],"entries":[[[["1 mod 5","0"]]]]}"#).is_err());
    }

    #[test]
    fn series_format() {
        let text = r#"{"field":"Fp:3","rows":["1"],"cols":["1"],"entries":[[[["2 mod 3","1/2"],["1","0"]]]]}"#;
        let s = series_from_json(text).unwrap();
        let f3 = Field::prime(3).unwrap();
        assert_eq!(s.get(0, 0).coeff(&rat(1, 2)), Some(&FieldElem::Fp { value: 2, modulus: 3 }));
        assert_eq!(s.get(0, 0).coeff(&rat(0, 1)), Some(&f3.one()));
    }

    #[test]
    fn symmetrized_round_trip() {
        let t = crate::symmetrize::tests::example_a();
        let text = symmetrized_to_json(&t);
        assert!(text.contains("\"I\""));
        assert_eq!(symmetrized_from_json(&text).unwrap(), t);
    }

    #[test]
    fn phi_and_tuple_round_trip() {
        let m = ZeroOneMatrix::from_fn(2, 2, |i, j| i != j || i == 0);
        let phi = PhiMatrix::build(&m, 2).unwrap();
        let back = phi_from_json(&phi_to_json(&phi)).unwrap();
        assert_eq!(back, phi);
        back.validate_against(&m).unwrap();
        assert!(phi_to_json(&phi).contains("\"i1,j1,2\""));
        let t = GoodTuple::new(m, 2, rat(3, 1), rat(1, 1)).unwrap();
        assert_eq!(tuple_from_json(&tuple_to_json(&t)).unwrap(), t);
        let mut bad = t.clone();
        bad.u = rat(9, 1);
        assert!(tuple_from_json(&tuple_to_json(&bad)).is_err());
        assert!(parse_coeff_key("i0,j1,1").is_err());
        assert!(parse_coeff_key("i1,j1").is_err());
    }
}
