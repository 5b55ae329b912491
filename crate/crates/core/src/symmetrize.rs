//! Tropical matrices with paired rows and their supertropical collapse.
//!
//! A symmetrized matrix has rows `i#1`, `i#2` for every `i` in `I` and columns
//! `I ∪ J`. Both rows of a pair read tangible zero in their own `I` column and
//! `Infinity` in the other `I` columns. Collapsing each pair with `⊕` and
//! dropping the `I` columns gives a supertropical `I × J` matrix; the tropical
//! rank drops by exactly `|I|`.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::semiring::Scalar;

/// Label of the `copy`-th row (1 or 2) of the pair for `i`.
pub fn pair_label(i: &str, copy: u8) -> String {
    format!("{i}#{copy}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetrizedMatrix {
    matrix: Matrix,
    index: Vec<String>,
    extra: Vec<String>,
    // (row of i#1, row of i#2, column of i) for each i, in `index` order.
    pairs: Vec<(usize, usize, usize)>,
    extra_cols: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdditivityReport {
    #[serde(rename = "trop_T")]
    pub trop_t: usize,
    pub trop_sigma: usize,
    #[serde(rename = "I")]
    pub index_size: usize,
    pub holds: bool,
}

impl SymmetrizedMatrix {
    /// Validates the paired-row structure and wraps `matrix`.
    pub fn new(matrix: Matrix, index: Vec<String>, extra: Vec<String>) -> Result<Self> {
        let bad = |msg: String| Err(Error::MalformedSymmetrized(msg));
        let index_set: HashSet<&str> = index.iter().map(String::as_str).collect();
        if index_set.len() != index.len() {
            return bad("duplicate label in I".into());
        }
        let extra_set: HashSet<&str> = extra.iter().map(String::as_str).collect();
        if extra_set.len() != extra.len() {
            return bad("duplicate label in J".into());
        }
        if let Some(l) = index.iter().find(|l| extra_set.contains(l.as_str())) {
            return bad(format!("label {l:?} is in both I and J"));
        }
        if matrix.nrows() != 2 * index.len() {
            return bad(format!(
                "expected {} rows for |I| = {}, found {}",
                2 * index.len(),
                index.len(),
                matrix.nrows()
            ));
        }
        if matrix.ncols() != index.len() + extra.len() {
            return bad(format!(
                "expected {} columns for |I| + |J|, found {}",
                index.len() + extra.len(),
                matrix.ncols()
            ));
        }
        let col_of: HashMap<&str, usize> = matrix
            .col_labels()
            .iter()
            .enumerate()
            .map(|(j, l)| (l.as_str(), j))
            .collect();
        let find_col = |l: &str| {
            col_of
                .get(l)
                .copied()
                .ok_or_else(|| Error::MalformedSymmetrized(format!("missing column {l:?}")))
        };
        let find_row = |l: &str| {
            matrix
                .row_index(l)
                .ok_or_else(|| Error::MalformedSymmetrized(format!("missing row {l:?}")))
        };
        let mut pairs = Vec::with_capacity(index.len());
        for i in &index {
            pairs.push((
                find_row(&pair_label(i, 1))?,
                find_row(&pair_label(i, 2))?,
                find_col(i)?,
            ));
        }
        let extra_cols = extra
            .iter()
            .map(|l| find_col(l))
            .collect::<Result<Vec<_>>>()?;

        for r in 0..matrix.nrows() {
            for c in 0..matrix.ncols() {
                if matrix.get(r, c).is_ghost() {
                    return bad(format!(
                        "ghost entry {} at ({}|{})",
                        matrix.get(r, c),
                        matrix.row_labels()[r],
                        matrix.col_labels()[c]
                    ));
                }
            }
        }
        for (a, &(r1, r2, own)) in pairs.iter().enumerate() {
            for (b, &(_, _, col)) in pairs.iter().enumerate() {
                let expected = if a == b { Scalar::t(0) } else { Scalar::Infinity };
                for r in [r1, r2] {
                    if *matrix.get(r, col) != expected {
                        return bad(format!(
                            "entry ({}|{}) is {}, expected {}",
                            matrix.row_labels()[r],
                            matrix.col_labels()[col],
                            matrix.get(r, col),
                            expected
                        ));
                    }
                }
            }
            debug_assert_eq!(matrix.col_labels()[own], index[a]);
        }
        Ok(SymmetrizedMatrix {
            matrix,
            index,
            extra,
            pairs,
            extra_cols,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn index_labels(&self) -> &[String] {
        &self.index
    }

    pub fn extra_labels(&self) -> &[String] {
        &self.extra
    }

    /// Row positions of `i#1` and `i#2` and the column of `i`, for the `k`-th label of `I`.
    pub fn pair(&self, k: usize) -> (usize, usize, usize) {
        self.pairs[k]
    }

    /// Column positions of `J` in order.
    pub fn extra_columns(&self) -> &[usize] {
        &self.extra_cols
    }

    /// The supertropical `I × J` matrix: `(i|j) = T(i#1|j) ⊕ T(i#2|j)`.
    pub fn sigma(&self) -> Matrix {
        Matrix::from_fn(self.index.clone(), self.extra.clone(), |a, b| {
            let (r1, r2, _) = self.pairs[a];
            let c = self.extra_cols[b];
            self.matrix.get(r1, c).plus(self.matrix.get(r2, c))
        })
        .expect("labels validated on construction")
    }

    /// Canonical preimage under [`sigma`](Self::sigma) of `s`, which is
    /// relabelled with rows `index` and columns `extra`.
    ///
    /// Tangible `a` becomes the pair `(a, inf)`, ghost `a` becomes `(a, a)`,
    /// `Infinity` becomes `(inf, inf)`. Rows are all first copies, then all
    /// second copies; columns are `I` then `J`.
    pub fn symmetrize(s: &Matrix, index: &[String], extra: &[String]) -> Result<Self> {
        if s.nrows() != index.len() || s.ncols() != extra.len() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but |I| = {}, |J| = {}",
                s.nrows(),
                s.ncols(),
                index.len(),
                extra.len()
            )));
        }
        let mut seen = HashSet::new();
        for l in index.iter().chain(extra) {
            if !seen.insert(l.as_str()) {
                return Err(Error::LabelClash(format!("label {l:?} repeated across I and J")));
            }
        }
        let n = index.len();
        let rows: Vec<String> = (1..=2u8)
            .flat_map(|copy| index.iter().map(move |i| pair_label(i, copy)))
            .collect();
        let cols: Vec<String> = index.iter().chain(extra).cloned().collect();
        let m = Matrix::from_fn(rows, cols, |r, c| {
            let (i, second) = (r % n, r >= n);
            if c < n {
                return if c == i { Scalar::t(0) } else { Scalar::Infinity };
            }
            match (s.get(i, c - n), second) {
                (Scalar::Tangible(v), false) => Scalar::Tangible(v.clone()),
                (Scalar::Tangible(_), true) => Scalar::Infinity,
                (Scalar::Ghost(v), _) => Scalar::Tangible(v.clone()),
                (Scalar::Infinity, _) => Scalar::Infinity,
            }
        })?;
        Self::new(m, index.to_vec(), extra.to_vec())
    }

    /// Symmetrizes `s` keeping its own row and column labels as `I` and `J`.
    pub fn symmetrize_labelled(s: &Matrix) -> Result<Self> {
        Self::symmetrize(s, s.row_labels(), s.col_labels())
    }

    /// Exact tropical ranks of `T` and `Σ(T)` and whether they differ by `|I|`.
    pub fn verify_rank_additivity(&self) -> Result<AdditivityReport> {
        let trop_t = self.matrix.tropical_rank()?.rank;
        let trop_sigma = self.sigma().tropical_rank()?.rank;
        Ok(AdditivityReport {
            trop_t,
            trop_sigma,
            index_size: self.index.len(),
            holds: trop_t == trop_sigma + self.index.len(),
        })
    }
}
