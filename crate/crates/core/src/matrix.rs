//! Labelled supertropical matrices, permanents and tropical rank.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::assignment::{Assignment, CostMatrix};
use crate::error::{Error, Result};
use crate::rational::{common_denominator, Rat};
use crate::semiring::{Ext, Scalar};

/// Largest size for which the permanent is expanded over all permutations.
pub const DEFAULT_PERMANENT_LIMIT: usize = 10;

/// Default number of submatrix tests allowed for an exact rank.
pub const DEFAULT_RANK_BUDGET: u64 = 1_000_000_000;

/// Most submatrix tests `tropical_rank_within` spends on the descending
/// search before switching to the enumerative one.
const DESCENDING_LIMIT: u128 = 1 << 17;

/// Rectangular matrix of supertropical scalars with labelled rows and columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: Vec<String>,
    cols: Vec<String>,
    entries: Vec<Scalar>,
}

/// A largest non-singular square submatrix, by label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankWitness {
    pub rank: usize,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
}

/// Outcome of the sampled rank search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampledRank {
    /// Size of the largest non-singular submatrix found; certified by `witness`.
    pub certified_lower: usize,
    /// Largest size at which a sample was tried without a hit, plus nothing above
    /// it was found either. Not a proof.
    pub uncertified_upper: usize,
    pub witness: Option<RankWitness>,
    /// Sizes whose submatrices were all examined (no sampling needed).
    pub exhausted_sizes: Vec<usize>,
}

/// Dual scaling that puts an optimal assignment on a zero diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalization {
    /// Added to every finite value in row `i`.
    pub row_potentials: Vec<Rat>,
    /// Added to every finite value in column `j`.
    pub col_potentials: Vec<Rat>,
    /// `permutation[i]` is the column matched to row `i`.
    pub permutation: Vec<usize>,
}

fn check_unique(labels: &[String], axis: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::LabelClash(format!("duplicate {axis} label {l:?}")));
        }
    }
    Ok(())
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

impl Matrix {
    pub fn new(rows: Vec<String>, cols: Vec<String>, grid: Vec<Vec<Scalar>>) -> Result<Self> {
        if grid.len() != rows.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} row labels but {} rows",
                rows.len(),
                grid.len()
            )));
        }
        if let Some((i, r)) = grid.iter().enumerate().find(|(_, r)| r.len() != cols.len()) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {}",
                r.len(),
                cols.len()
            )));
        }
        check_unique(&rows, "row")?;
        check_unique(&cols, "column")?;
        Ok(Matrix {
            rows,
            cols,
            entries: grid.into_iter().flatten().collect(),
        })
    }

    /// Matrix with rows and columns labelled `1..`.
    pub fn from_rows(grid: Vec<Vec<Scalar>>) -> Result<Self> {
        let cols = grid.first().map_or(0, |r| r.len());
        Self::new(default_labels(grid.len()), default_labels(cols), grid)
    }

    pub fn from_fn(
        rows: Vec<String>,
        cols: Vec<String>,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Result<Self> {
        let grid = (0..rows.len())
            .map(|i| (0..cols.len()).map(|j| f(i, j)).collect())
            .collect();
        Self::new(rows, cols, grid)
    }

    /// Tropical unit matrix: tangible zeros on the diagonal, `Infinity` elsewhere.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(default_labels(n), default_labels(n), |i, j| {
            if i == j {
                Scalar::t(0)
            } else {
                Scalar::Infinity
            }
        })
        .expect("labels are distinct")
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[String] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols.len() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        let n = self.cols.len();
        self.entries[i * n + j] = value;
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.rows.iter().position(|l| l == label)
    }

    pub fn col_index(&self, label: &str) -> Option<usize> {
        self.cols.iter().position(|l| l == label)
    }

    pub fn entry(&self, row: &str, col: &str) -> Option<&Scalar> {
        Some(self.get(self.row_index(row)?, self.col_index(col)?))
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[Scalar]> {
        self.entries.chunks(self.cols.len().max(1)).take(self.rows.len())
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols.len()
    }

    /// No ghost entries.
    pub fn is_tropical(&self) -> bool {
        !self.entries.iter().any(Scalar::is_ghost)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix {
            rows: rows.iter().map(|&i| self.rows[i].clone()).collect(),
            cols: cols.iter().map(|&j| self.cols[j].clone()).collect(),
            entries: rows
                .iter()
                .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j).clone()))
                .collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            entries: (0..self.ncols())
                .flat_map(|j| (0..self.nrows()).map(move |i| self.get(i, j).clone()))
                .collect(),
        }
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.nrows())
        } else {
            Err(Error::NotSquare {
                rows: self.nrows(),
                cols: self.ncols(),
            })
        }
    }

    /// Permanent by expansion over all permutations, up to the default size limit.
    pub fn permanent(&self) -> Result<Scalar> {
        self.permanent_with_limit(DEFAULT_PERMANENT_LIMIT)
    }

    pub fn permanent_with_limit(&self, limit: usize) -> Result<Scalar> {
        let n = self.require_square()?;
        if n > limit {
            return Err(Error::SizeLimitExceeded { size: n, limit });
        }
        let mut used = vec![false; n];
        let mut acc = Scalar::Infinity;
        self.expand(0, &Scalar::t(0), &mut used, &mut acc);
        Ok(acc)
    }

    fn expand(&self, row: usize, prefix: &Scalar, used: &mut [bool], acc: &mut Scalar) {
        if row == self.nrows() {
            *acc = acc.plus(prefix);
            return;
        }
        for col in 0..self.ncols() {
            if used[col] {
                continue;
            }
            let product = prefix.times(self.get(row, col));
            if product.is_infinity() {
                continue;
            }
            used[col] = true;
            self.expand(row + 1, &product, used, acc);
            used[col] = false;
        }
    }

    /// Permanent from one assignment problem: the optimal value, tangible
    /// exactly when the matrix is non-singular. Works at any size.
    pub fn permanent_fast(&self) -> Result<Scalar> {
        let n = self.require_square()?;
        let scaled = ScaledMatrix::new(self)?;
        let all: Vec<usize> = (0..n).collect();
        let costs = scaled.sub_costs(&all, &all);
        let Some(a) = costs.solve() else {
            return Ok(Scalar::Infinity);
        };
        let value = Rat::new(BigInt::from(a.total), scaled.scale.clone());
        let tangible = a.perm.iter().enumerate().all(|(i, &j)| scaled.tangible[i * n + j])
            && costs.is_unique_optimum(&a);
        Ok(if tangible {
            Scalar::Tangible(value)
        } else {
            Scalar::Ghost(value)
        })
    }

    /// Non-singular: tangible permanent. Brute force.
    pub fn is_nonsingular(&self) -> Result<bool> {
        Ok(self.permanent()?.is_tangible())
    }

    /// Non-singular via the assignment problem on the values: the optimum is
    /// finite, attained by exactly one permutation, and all its entries are tangible.
    pub fn is_nonsingular_fast(&self) -> Result<bool> {
        let n = self.require_square()?;
        let scaled = ScaledMatrix::new(self)?;
        let all: Vec<usize> = (0..n).collect();
        Ok(scaled.nonsingular(&all, &all))
    }

    /// Tropical rank with a witness. Searches sizes from the largest down;
    /// ties between witnesses go to the lexicographically first (rows, cols).
    pub fn tropical_rank(&self) -> Result<RankWitness> {
        let scaled = ScaledMatrix::new(self)?;
        for size in (1..=self.nrows().min(self.ncols())).rev() {
            let row_sets = combinations(self.nrows(), size);
            let col_sets = combinations(self.ncols(), size);
            if let Some(w) = scaled.first_nonsingular(&row_sets, &col_sets) {
                return Ok(self.witness(size, &w.0, &w.1));
            }
        }
        Ok(RankWitness {
            rank: 0,
            rows: Vec::new(),
            cols: Vec::new(),
        })
    }

    /// Exact rank within a budget of `max_checks` submatrix tests, or `None`.
    ///
    /// Runs the descending search while the sizes tried so far cost at most
    /// `DESCENDING_LIMIT` tests, then switches to `tropical_rank_enumerative`,
    /// whose witness is not necessarily the lexicographically first.
    pub fn tropical_rank_within(&self, max_checks: u64) -> Result<Option<RankWitness>> {
        let scaled = ScaledMatrix::new(self)?;
        let top = self.nrows().min(self.ncols());
        let mut remaining = max_checks;
        let mut spent = 0u128;
        for size in (1..=top).rev() {
            let count = binomial(self.nrows(), size).saturating_mul(binomial(self.ncols(), size));
            if count > remaining as u128 || spent + count > DESCENDING_LIMIT {
                return self.tropical_rank_enumerative(remaining);
            }
            spent += count;
            let row_sets = combinations(self.nrows(), size);
            let col_sets = combinations(self.ncols(), size);
            if let Some(w) = scaled.first_nonsingular(&row_sets, &col_sets) {
                return Ok(Some(self.witness(size, &w.0, &w.1)));
            }
            remaining -= count as u64;
        }
        Ok(Some(RankWitness {
            rank: 0,
            rows: Vec::new(),
            cols: Vec::new(),
        }))
    }

    /// Exact rank by enumerating non-singular submatrices instead of all of them.
    ///
    /// Deleting a row of a non-singular submatrix together with its assigned
    /// column leaves a non-singular submatrix. So every non-singular submatrix
    /// is reached exactly once by growing its parent, obtained by deleting the
    /// last row and that row's column.
    ///
    /// Row suffixes are solved from the bottom up, so the exact rank of rows
    /// `r..` bounds how far a branch that next adds row `r` can grow, and a
    /// suffix stops as soon as it beats the previous one by one.
    ///
    /// The witness is the first maximal submatrix in this order. Returns `None`
    /// if more than `max_checks` assignment problems would be needed.
    pub fn tropical_rank_enumerative(&self, max_checks: u64) -> Result<Option<RankWitness>> {
        let scaled = ScaledMatrix::new(self)?;
        let n = self.nrows();
        let mut search = GrowSearch {
            m: &scaled,
            suffix_rank: vec![0; n + 1],
            best: (Vec::new(), Vec::new()),
            target: 0,
            checks: 0,
            budget: max_checks,
        };
        for first in (0..n).rev() {
            search.target = (search.suffix_rank[first + 1] + 1).min(self.ncols());
            for c in 0..self.ncols() {
                if search.best.0.len() >= search.target {
                    break;
                }
                if !scaled.tangible[first * self.ncols() + c] {
                    continue;
                }
                if search.best.0.is_empty() {
                    search.best = (vec![first], vec![c]);
                }
                let w = scaled.cost[first * self.ncols() + c].expect("tangible entries are finite");
                if !search.grow(&mut vec![first], &mut vec![c], &[w], &[0]) {
                    return Ok(None);
                }
            }
            search.suffix_rank[first] = search.best.0.len();
        }
        let (rows, cols) = search.best;
        Ok(Some(self.witness(rows.len(), &rows, &cols)))
    }

    /// Whether every `size x size` submatrix is singular; also returns how many were tested.
    pub fn all_submatrices_singular(&self, size: usize) -> Result<(bool, u64)> {
        let scaled = ScaledMatrix::new(self)?;
        if size == 0 || size > self.nrows().min(self.ncols()) {
            return Ok((true, 0));
        }
        let row_sets = combinations(self.nrows(), size);
        let col_sets = combinations(self.ncols(), size);
        let count = row_sets.len() as u64 * col_sets.len() as u64;
        Ok((scaled.first_nonsingular(&row_sets, &col_sets).is_none(), count))
    }

    /// Rank search that samples up to `samples` submatrices per size instead of
    /// enumerating; sizes with at most `samples` submatrices are enumerated.
    pub fn tropical_rank_sampled(&self, samples: usize, seed: u64) -> Result<SampledRank> {
        let scaled = ScaledMatrix::new(self)?;
        let (m, n) = (self.nrows(), self.ncols());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut exhausted_sizes = Vec::new();
        let mut uncertified_upper = 0;
        for size in (1..=m.min(n)).rev() {
            let total = binomial(m, size).saturating_mul(binomial(n, size));
            if total <= samples as u128 {
                exhausted_sizes.push(size);
                let row_sets = combinations(m, size);
                let col_sets = combinations(n, size);
                if let Some((r, c)) = scaled.first_nonsingular(&row_sets, &col_sets) {
                    return Ok(SampledRank {
                        certified_lower: size,
                        uncertified_upper: uncertified_upper.max(size),
                        witness: Some(self.witness(size, &r, &c)),
                        exhausted_sizes,
                    });
                }
                continue;
            }
            uncertified_upper = uncertified_upper.max(size - 1);
            for _ in 0..samples {
                let mut r = sample(&mut rng, m, size).into_vec();
                let mut c = sample(&mut rng, n, size).into_vec();
                r.sort_unstable();
                c.sort_unstable();
                if scaled.nonsingular(&r, &c) {
                    return Ok(SampledRank {
                        certified_lower: size,
                        uncertified_upper: size,
                        witness: Some(self.witness(size, &r, &c)),
                        exhausted_sizes,
                    });
                }
            }
        }
        Ok(SampledRank {
            certified_lower: 0,
            uncertified_upper,
            witness: None,
            exhausted_sizes,
        })
    }

    fn witness(&self, size: usize, rows: &[usize], cols: &[usize]) -> RankWitness {
        RankWitness {
            rank: size,
            rows: rows.iter().map(|&i| self.rows[i].clone()).collect(),
            cols: cols.iter().map(|&j| self.cols[j].clone()).collect(),
        }
    }

    /// Drops the first column and merges the first two rows by `⊕`, assuming the
    /// first column reads `0, 0, inf, ..., inf` with tangible zeros. The permanent
    /// is unchanged.
    pub fn expand_first_column(&self) -> Result<Matrix> {
        let n = self.require_square()?;
        if n < 2 {
            return Err(Error::PreconditionViolated(
                "need at least a 2x2 matrix".into(),
            ));
        }
        let zero = Scalar::t(0);
        if *self.get(0, 0) != zero || *self.get(1, 0) != zero {
            return Err(Error::PreconditionViolated(
                "first column must start with two tangible zeros".into(),
            ));
        }
        if let Some(i) = (2..n).find(|&i| !self.get(i, 0).is_infinity()) {
            return Err(Error::PreconditionViolated(format!(
                "first column must be infinite below row 2, found {} in row {}",
                self.get(i, 0),
                self.rows[i]
            )));
        }
        let mut grid = Vec::with_capacity(n - 1);
        grid.push(
            (1..n)
                .map(|j| self.get(0, j).plus(self.get(1, j)))
                .collect::<Vec<_>>(),
        );
        for i in 2..n {
            grid.push((1..n).map(|j| self.get(i, j).clone()).collect());
        }
        let mut rows = vec![self.rows[0].clone()];
        rows.extend(self.rows[2..].iter().cloned());
        Matrix::new(rows, self.cols[1..].to_vec(), grid)
    }

    /// Scaling and permutation that make an optimal assignment a zero diagonal
    /// with every finite entry non-negative. Potentials are chosen row-first.
    pub fn hungarian_normalize(&self) -> Result<Normalization> {
        self.require_square()?;
        let scaled = ScaledMatrix::new(self)?;
        let all: Vec<usize> = (0..self.nrows()).collect();
        let a = scaled
            .solve(&all, &all)
            .ok_or(Error::NoFiniteAssignment)?;
        let unscale = |x: i128| -> Rat { Rat::new(BigInt::from(-x), scaled.scale.clone()) };
        Ok(Normalization {
            row_potentials: a.row_dual.iter().map(|&x| unscale(x)).collect(),
            col_potentials: a.col_dual.iter().map(|&x| unscale(x)).collect(),
            permutation: a.perm,
        })
    }

    /// Applies potentials to finite entries (tangibility unchanged) and permutes
    /// columns so that `permutation` becomes the diagonal.
    pub fn apply_normalization(&self, norm: &Normalization) -> Matrix {
        let n = self.nrows();
        let mut out = self.clone();
        for i in 0..n {
            for k in 0..n {
                let j = norm.permutation[k];
                let shift = &norm.row_potentials[i] + &norm.col_potentials[j];
                let value = match self.get(i, j) {
                    Scalar::Tangible(v) => Scalar::Tangible(v + shift),
                    Scalar::Ghost(v) => Scalar::Ghost(v + shift),
                    Scalar::Infinity => Scalar::Infinity,
                };
                out.set(i, k, value);
            }
        }
        out.cols = norm.permutation.iter().map(|&j| self.cols[j].clone()).collect();
        out
    }

    /// Index of a column that can be replaced by `(a, b, inf, ..., inf)^T`
    /// keeping the matrix non-singular.
    ///
    /// The first candidate is the one picked after normalizing: the column
    /// matched to row 1 if the scaled `a` is below the scaled `b`, otherwise the
    /// column matched to row 2. If that fails, the remaining columns are tried,
    /// those with a tangible entry in the first two rows first.
    pub fn replace_column_keep_nonsingular(&self, a: &Rat, b: &Rat) -> Result<usize> {
        let n = self.require_square()?;
        if n < 2 {
            return Err(Error::PreconditionViolated("need n >= 2".into()));
        }
        if !self.is_nonsingular_fast()? {
            return Err(Error::PreconditionViolated("matrix is singular".into()));
        }
        let norm = self.hungarian_normalize()?;
        let a_scaled = a + &norm.row_potentials[0];
        let b_scaled = b + &norm.row_potentials[1];
        let preferred = if a_scaled < b_scaled {
            norm.permutation[0]
        } else {
            norm.permutation[1]
        };
        let tangible_top =
            |j: usize| self.get(0, j).is_tangible() || self.get(1, j).is_tangible();
        let mut order = vec![preferred];
        order.extend((0..n).filter(|&j| j != preferred && tangible_top(j)));
        order.extend((0..n).filter(|&j| j != preferred && !tangible_top(j)));
        for j in order {
            if self.with_column_replaced(j, a, b).is_nonsingular_fast()? {
                return Ok(j);
            }
        }
        Err(Error::LemmaViolation)
    }

    pub fn with_column_replaced(&self, col: usize, a: &Rat, b: &Rat) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.nrows() {
            let v = match i {
                0 => Scalar::Tangible(a.clone()),
                1 => Scalar::Tangible(b.clone()),
                _ => Scalar::Infinity,
            };
            out.set(i, col, v);
        }
        out
    }

    /// Supertropical product `self ⊙ other`.
    pub fn tropical_product(&self, other: &Matrix) -> Result<Matrix> {
        if self.ncols() != other.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        Matrix::from_fn(self.rows.clone(), other.cols.clone(), |i, j| {
            (0..self.ncols()).fold(Scalar::Infinity, |acc, k| {
                acc.plus(&self.get(i, k).times(other.get(k, j)))
            })
        })
    }

    /// Ordinary tropical (min-plus) product of two ghost-free matrices.
    ///
    /// Ties are not recorded, so the result is ghost-free as well.
    pub fn minplus_product(&self, other: &Matrix) -> Result<Matrix> {
        if !self.is_tropical() || !other.is_tropical() {
            return Err(Error::PreconditionViolated(
                "min-plus product needs ghost-free matrices".into(),
            ));
        }
        let p = self.tropical_product(other)?;
        Matrix::from_fn(p.rows.clone(), p.cols.clone(), |i, j| {
            Scalar::from_ext(p.get(i, j).nu())
        })
    }

    /// Row `src` appended as a copy with label `label`.
    pub fn with_row_copy(&self, src: usize, label: String) -> Result<Matrix> {
        let mut rows = self.rows.clone();
        rows.push(label);
        check_unique(&rows, "row")?;
        let mut entries = self.entries.clone();
        entries.extend((0..self.ncols()).map(|j| self.get(src, j).clone()));
        Ok(Matrix {
            rows,
            cols: self.cols.clone(),
            entries,
        })
    }

    pub fn with_col_copy(&self, src: usize, label: String) -> Result<Matrix> {
        Ok(self.transpose().with_row_copy(src, label)?.transpose())
    }
}

/// Entries rescaled to integers by the common denominator of all finite values,
/// for exact assignment solving on submatrices.
struct ScaledMatrix {
    ncols: usize,
    cost: Vec<Option<i128>>,
    tangible: Vec<bool>,
    scale: BigInt,
}

impl ScaledMatrix {
    fn new(m: &Matrix) -> Result<Self> {
        let scale = common_denominator(m.entries.iter().filter_map(Scalar::value));
        let mut cost = Vec::with_capacity(m.entries.len());
        // Keeps `big` in the assignment solver well inside i128.
        let bound = BigInt::from(1i128 << 96);
        for s in &m.entries {
            cost.push(match s.nu() {
                Ext::Infinity => None,
                Ext::Finite(v) => {
                    let scaled = (v * Rat::from_integer(scale.clone())).to_integer();
                    if scaled.clone() * scaled.clone() >= bound.clone() * bound.clone() {
                        return Err(Error::Overflow);
                    }
                    Some(scaled.to_i128().ok_or(Error::Overflow)?)
                }
            });
        }
        debug_assert!(!scale.is_zero());
        Ok(ScaledMatrix {
            ncols: m.ncols(),
            cost,
            tangible: m.entries.iter().map(Scalar::is_tangible).collect(),
            scale,
        })
    }

    fn sub_costs(&self, rows: &[usize], cols: &[usize]) -> CostMatrix {
        let cost = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| self.cost[i * self.ncols + j]))
            .collect();
        CostMatrix::new(rows.len(), cost)
    }

    fn solve(&self, rows: &[usize], cols: &[usize]) -> Option<Assignment> {
        self.sub_costs(rows, cols).solve()
    }

    fn nonsingular(&self, rows: &[usize], cols: &[usize]) -> bool {
        self.unique_assignment(rows, cols).is_some()
    }

    // The optimal assignment of a non-singular submatrix, `None` if singular.
    fn unique_assignment(&self, rows: &[usize], cols: &[usize]) -> Option<Vec<usize>> {
        let costs = self.sub_costs(rows, cols);
        let a = costs.solve()?;
        let all_tangible = a
            .perm
            .iter()
            .enumerate()
            .all(|(i, &j)| self.tangible[rows[i] * self.ncols + cols[j]]);
        (all_tangible && costs.is_unique_optimum(&a)).then_some(a.perm)
    }

    fn first_nonsingular(
        &self,
        row_sets: &[Vec<usize>],
        col_sets: &[Vec<usize>],
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        row_sets.par_iter().find_map_first(|r| {
            col_sets
                .iter()
                .find(|c| self.nonsingular(r, c))
                .map(|c| (r.clone(), c.clone()))
        })
    }
}

struct GrowSearch<'a> {
    m: &'a ScaledMatrix,
    // suffix_rank[r] is the exact rank of rows r.. once those rows are done.
    suffix_rank: Vec<usize>,
    best: (Vec<usize>, Vec<usize>),
    // Size at which the current suffix cannot improve further.
    target: usize,
    checks: u64,
    budget: u64,
}

impl GrowSearch<'_> {
    fn cost(&self, i: usize, j: usize) -> Option<i128> {
        self.m.cost[i * self.m.ncols + j]
    }

    // Grows the non-singular submatrix on `rows` x `cols`, whose unique optimal
    // assignment pairs `rows[k]` with `cols[k]`, with duals `u`, `v`.
    //
    // Adding row `r` and column `c` gives a canonical child exactly when every
    // assignment of the larger matrix that avoids the edge `(r, c)` costs more
    // than `cost(r, c)` plus the current optimum. Those assignments correspond
    // to alternating paths from `r`, so one shortest-path pass per `r` prices
    // every candidate column.
    //
    // Returns false once the budget runs out.
    fn grow(
        &mut self,
        rows: &mut Vec<usize>,
        cols: &mut Vec<usize>,
        u: &[i128],
        v: &[i128],
    ) -> bool {
        let s = rows.len();
        let ncols = self.m.ncols;
        let start = rows.last().map_or(0, |&r| r + 1);
        // dist[k]: shortest reduced-cost path from the new row to cols[k].
        let mut dist = vec![None::<i128>; s];
        let mut done = vec![false; s];
        for r in start..self.suffix_rank.len() - 1 {
            if self.cut(s, r) {
                return true;
            }
            for k in 0..s {
                dist[k] = self.cost(r, cols[k]).map(|w| w - v[k]);
            }
            done.fill(false);
            while let Some(k) = (0..s)
                .filter(|&k| !done[k] && dist[k].is_some())
                .min_by_key(|&k| dist[k])
            {
                done[k] = true;
                let base = dist[k].expect("filtered");
                for k2 in 0..s {
                    if done[k2] {
                        continue;
                    }
                    if let Some(w) = self.cost(rows[k], cols[k2]) {
                        let cand = base + w - u[k] - v[k2];
                        if dist[k2].is_none_or(|d| cand < d) {
                            dist[k2] = Some(cand);
                        }
                    }
                }
            }

            for c in 0..ncols {
                if self.cut(s, r) {
                    return true;
                }
                if cols.contains(&c) || !self.m.tangible[r * ncols + c] {
                    continue;
                }
                if self.checks >= self.budget {
                    return false;
                }
                self.checks += 1;
                // Cheapest assignment avoiding (r, c): r moves into the matched
                // columns and some rows[k] takes c instead.
                let direct = self.cost(r, c).expect("tangible entries are finite");
                let beaten = (0..s).any(|k| match (dist[k], self.cost(rows[k], c)) {
                    (Some(d), Some(w)) => d - u[k] + w <= direct,
                    _ => false,
                });
                if beaten {
                    continue;
                }
                rows.push(r);
                cols.push(c);
                if s + 1 > self.best.0.len() {
                    let mut sorted = cols.clone();
                    sorted.sort_unstable();
                    self.best = (rows.clone(), sorted);
                }
                let within_budget = self.cut(s + 1, r + 1) || {
                    let (u2, v2) = self.child_duals(rows, cols, u, v, &dist);
                    self.grow(rows, cols, &u2, &v2)
                };
                rows.pop();
                cols.pop();
                if !within_budget {
                    return false;
                }
            }
        }
        true
    }

    // Whether a branch at depth `s` that adds rows from `r` on cannot beat the best.
    fn cut(&self, s: usize, r: usize) -> bool {
        let best = self.best.0.len();
        best >= self.target || s + self.suffix_rank[r] <= best
    }

    // Duals for the child whose last row and column were just pushed, from
    // the parent duals and the shortest-path distances. With
    // f(x) = max(0, t - x), matched pairs shift by +-f(dist), the new row gets
    // t and the new column cost(r, c) - t; f is 1-Lipschitz, which keeps
    // every reduced cost non-negative once t covers all finite distances.
    fn child_duals(
        &self,
        rows: &[usize],
        cols: &[usize],
        u: &[i128],
        v: &[i128],
        dist: &[Option<i128>],
    ) -> (Vec<i128>, Vec<i128>) {
        let s = u.len();
        let (r, c) = (rows[s], cols[s]);
        let direct = self.cost(r, c).expect("tangible entries are finite");
        let mut t = i128::MIN;
        for k in 0..s {
            match dist[k] {
                Some(d) => t = t.max(d),
                None => {
                    if let Some(w) = self.cost(rows[k], c) {
                        t = t.max(u[k] + direct - w);
                    }
                }
            }
        }
        let t = t.max(0);
        let shift = |k: usize| dist[k].map_or(0, |d| (t - d).max(0));
        let mut u2: Vec<i128> = (0..s).map(|k| u[k] + shift(k)).collect();
        let mut v2: Vec<i128> = (0..s).map(|k| v[k] - shift(k)).collect();
        u2.push(t);
        v2.push(direct - t);
        debug_assert!(self.duals_certify(rows, cols, &u2, &v2));
        (u2, v2)
    }

    // Feasible everywhere and tight on the diagonal pairing.
    fn duals_certify(&self, rows: &[usize], cols: &[usize], u: &[i128], v: &[i128]) -> bool {
        (0..rows.len()).all(|i| {
            (0..cols.len()).all(|j| match self.cost(rows[i], cols[j]) {
                Some(w) if i == j => u[i] + v[j] == w,
                Some(w) => u[i] + v[j] <= w,
                None => i != j,
            })
        })
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for t in i + 1..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn m(rows: &[&[&str]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| s.parse().unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    fn example_sigma() -> Matrix {
        m(&[
            &["g:0", "t:2", "t:1"],
            &["t:2", "g:0", "t:2"],
            &["t:2", "t:1", "g:0"],
        ])
    }

    fn scalar() -> impl Strategy<Value = Scalar> {
        prop_oneof![
            4 => (0i64..4).prop_map(Scalar::t),
            2 => (0i64..4).prop_map(Scalar::g),
            1 => Just(Scalar::Infinity),
        ]
    }

    fn square(max: usize) -> impl Strategy<Value = Matrix> {
        (1..=max).prop_flat_map(|n| {
            proptest::collection::vec(proptest::collection::vec(scalar(), n), n)
                .prop_map(|g| Matrix::from_rows(g).unwrap())
        })
    }

    // Non-singular matrices of size at least 2, with values spread out so that
    // the filter rarely rejects.
    fn nonsingular(max: usize) -> impl Strategy<Value = Matrix> {
        let entry = prop_oneof![
            6 => (-20i64..20).prop_map(Scalar::t),
            2 => (-20i64..20).prop_map(Scalar::g),
            1 => Just(Scalar::Infinity),
        ];
        (2..=max)
            .prop_flat_map(move |n| {
                proptest::collection::vec(proptest::collection::vec(entry.clone(), n), n)
                    .prop_map(|g| Matrix::from_rows(g).unwrap())
            })
            .prop_filter("singular", |a| a.is_nonsingular().unwrap())
    }

    fn rectangular_wide(max: usize) -> impl Strategy<Value = Matrix> {
        let entry = prop_oneof![
            6 => (-9i64..9).prop_map(Scalar::t),
            1 => (-9i64..9).prop_map(Scalar::g),
            1 => Just(Scalar::Infinity),
        ];
        (1..=max, 1..=max).prop_flat_map(move |(r, c)| {
            proptest::collection::vec(proptest::collection::vec(entry.clone(), c), r)
                .prop_map(|g| Matrix::from_rows(g).unwrap())
        })
    }

    fn rectangular(max: usize) -> impl Strategy<Value = Matrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(scalar(), c), r)
                .prop_map(|g| Matrix::from_rows(g).unwrap())
        })
    }

    // Rank by testing every square submatrix with the brute-force permanent.
    fn rank_by_permanents(a: &Matrix) -> usize {
        let top = a.nrows().min(a.ncols());
        (1..=top)
            .rev()
            .find(|&s| {
                combinations(a.nrows(), s).iter().any(|r| {
                    combinations(a.ncols(), s)
                        .iter()
                        .any(|c| a.submatrix(r, c).is_nonsingular().unwrap())
                })
            })
            .unwrap_or(0)
    }

    #[test]
    fn enumerative_rank_budget() {
        let m = Matrix::from_rows(vec![vec![Scalar::t(0), Scalar::t(1)], vec![Scalar::t(1), Scalar::t(0)]]).unwrap();
        assert_eq!(m.tropical_rank_enumerative(0).unwrap(), None);
        assert_eq!(m.tropical_rank_enumerative(100).unwrap().unwrap().rank, 2);
        assert_eq!(m.tropical_rank_within(0).unwrap(), None);
        let z = Matrix::from_rows(vec![vec![Scalar::Infinity, Scalar::g(1)]]).unwrap();
        assert_eq!(z.tropical_rank_enumerative(10).unwrap().unwrap().rank, 0);
    }

    #[test]
    fn permanent_examples() {
        assert_eq!(example_sigma().permanent().unwrap(), Scalar::g(0));
        assert_eq!(m(&[&["t:5"]]).permanent().unwrap(), Scalar::t(5));
        assert_eq!(
            m(&[&["t:0", "t:1"], &["t:1", "t:0"]]).permanent().unwrap(),
            Scalar::t(0)
        );
    }

    #[test]
    fn permanent_errors() {
        let rect = m(&[&["t:0", "t:1"]]);
        assert!(matches!(rect.permanent(), Err(Error::NotSquare { .. })));
        assert!(matches!(
            Matrix::identity(11).permanent(),
            Err(Error::SizeLimitExceeded { size: 11, limit: 10 })
        ));
        assert!(Matrix::identity(11).is_nonsingular_fast().unwrap());
    }

    #[test]
    fn nonsingularity_examples() {
        assert!(!example_sigma().is_nonsingular().unwrap());
        assert!(!example_sigma().is_nonsingular_fast().unwrap());
        assert!(m(&[&["t:5"]]).is_nonsingular().unwrap());
        assert!(!m(&[&["g:0"]]).is_nonsingular().unwrap());
        for n in 1..8 {
            assert!(Matrix::identity(n).is_nonsingular_fast().unwrap());
        }
        assert!(!m(&[&["t:0", "t:0"], &["t:0", "t:0"]])
            .is_nonsingular_fast()
            .unwrap());
    }

    #[test]
    fn rank_examples() {
        let w = example_sigma().tropical_rank().unwrap();
        assert_eq!(w.rank, 1);
        assert_eq!(w.rows, vec!["1"]);
        assert_eq!(w.cols, vec!["2"]);
        let inf = m(&[&["inf", "inf"], &["inf", "inf"]]);
        assert_eq!(inf.tropical_rank().unwrap().rank, 0);
        let empty = Matrix::from_rows(vec![]).unwrap();
        assert_eq!(empty.tropical_rank().unwrap().rank, 0);
    }

    #[test]
    fn rank_budget() {
        let a = example_sigma();
        assert!(a.tropical_rank_within(5).unwrap().is_none());
        assert_eq!(a.tropical_rank_within(1 + 81).unwrap().unwrap().rank, 1);
    }

    #[test]
    fn sampled_rank_on_small_matrix_is_exhaustive() {
        let s = example_sigma().tropical_rank_sampled(1000, 1).unwrap();
        assert_eq!(s.certified_lower, 1);
        assert_eq!(s.exhausted_sizes, vec![3, 2, 1]);
    }

    #[test]
    fn expand_two_by_two() {
        let a = m(&[&["t:0", "t:3"], &["t:0", "t:5"]]);
        let b = a.expand_first_column().unwrap();
        assert_eq!(b.nrows(), 1);
        assert_eq!(*b.get(0, 0), Scalar::t(3).plus(&Scalar::t(5)));
        assert_eq!(a.permanent().unwrap(), b.permanent().unwrap());
        let bad = m(&[&["t:0", "t:3"], &["t:1", "t:5"]]);
        assert!(matches!(
            bad.expand_first_column(),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn replace_column_examples() {
        let id2 = Matrix::identity(2);
        assert_eq!(
            id2.replace_column_keep_nonsingular(&int(0), &int(1)).unwrap(),
            0
        );
        let id3 = Matrix::identity(3);
        assert_eq!(
            id3.replace_column_keep_nonsingular(&int(5), &int(7)).unwrap(),
            0
        );
        assert_eq!(
            id3.replace_column_keep_nonsingular(&int(7), &int(5)).unwrap(),
            1
        );
        for (j, a, b) in [(0, 5, 7), (1, 7, 5)] {
            let replaced = id3.with_column_replaced(j, &int(a), &int(b));
            assert!(replaced.is_nonsingular().unwrap());
        }
    }

    #[test]
    fn normalization_examples() {
        let n = Matrix::identity(3).hungarian_normalize().unwrap();
        assert!(n.row_potentials.iter().all(Zero::is_zero));
        assert!(n.col_potentials.iter().all(Zero::is_zero));
        assert_eq!(n.permutation, vec![0, 1, 2]);

        let n = m(&[&["t:3"]]).hungarian_normalize().unwrap();
        assert_eq!(n.row_potentials, vec![int(-3)]);
        assert_eq!(n.col_potentials, vec![int(0)]);

        let inf = m(&[&["inf", "t:1"], &["inf", "t:2"]]);
        assert!(matches!(
            inf.hungarian_normalize(),
            Err(Error::NoFiniteAssignment)
        ));
    }

    #[test]
    fn product_examples() {
        let a = m(&[&["t:2"]]);
        let b = m(&[&["t:3"]]);
        assert_eq!(*a.tropical_product(&b).unwrap().get(0, 0), Scalar::t(5));
        let x = example_sigma();
        let ux = Matrix::identity(3).tropical_product(&x).unwrap();
        assert_eq!(ux.entries, x.entries);
        assert!(matches!(
            a.tropical_product(&x),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(12, 11).len(), 12);
        assert_eq!(binomial(16, 8), 12870);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn fast_test_matches_permanent(a in square(5)) {
            prop_assert_eq!(a.is_nonsingular_fast().unwrap(), a.is_nonsingular().unwrap());
        }

        #[test]
        fn fast_permanent_matches_expansion(a in square(5)) {
            prop_assert_eq!(a.permanent_fast().unwrap(), a.permanent().unwrap());
        }

        #[test]
        fn rank_matches_permanent_oracle(a in rectangular(4)) {
            prop_assert_eq!(a.tropical_rank().unwrap().rank, rank_by_permanents(&a));
        }

        #[test]
        fn permanent_invariant_under_permutation(a in square(5), shift in 0usize..5) {
            let n = a.nrows();
            let rows: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
            let cols: Vec<usize> = (0..n).rev().collect();
            prop_assert_eq!(a.submatrix(&rows, &cols).permanent().unwrap(), a.permanent().unwrap());
        }

        #[test]
        fn row_scaling_scales_permanent(a in square(4), c in -3i64..4, r in 0usize..4) {
            let r = r % a.nrows();
            let mut b = a.clone();
            for j in 0..a.ncols() {
                b.set(r, j, a.get(r, j).times(&Scalar::t(c)));
            }
            prop_assert_eq!(b.permanent().unwrap(), a.permanent().unwrap().times(&Scalar::t(c)));
        }

        #[test]
        fn duplicate_tangible_rows_are_singular(a in square(4), r in 0usize..4) {
            let n = a.nrows();
            prop_assume!(n >= 2);
            let r = r % n;
            let mut b = a.clone();
            for j in 0..n {
                let v = match a.get(r, j) {
                    Scalar::Ghost(v) => Scalar::Tangible(v.clone()),
                    s => s.clone(),
                };
                b.set(r, j, v.clone());
                b.set((r + 1) % n, j, v);
            }
            prop_assert!(!b.is_nonsingular().unwrap());
        }

        #[test]
        fn enumerative_rank_matches_descending(a in rectangular(6), wide in rectangular_wide(6)) {
            for m in [a, wide] {
                let desc = m.tropical_rank().unwrap();
                let w = m.tropical_rank_enumerative(u64::MAX).unwrap().unwrap();
                prop_assert_eq!(w.rank, desc.rank);
                let rows: Vec<usize> = w.rows.iter().map(|l| m.row_index(l).unwrap()).collect();
                let cols: Vec<usize> = w.cols.iter().map(|l| m.col_index(l).unwrap()).collect();
                prop_assert!(m.submatrix(&rows, &cols).is_nonsingular().unwrap());
                prop_assert_eq!(m.tropical_rank_within(3).unwrap().map(|w| w.rank).unwrap_or(desc.rank), desc.rank);
            }
        }

        #[test]
        fn rank_ignores_duplicated_lines(a in rectangular(4), r in 0usize..4, c in 0usize..4) {
            let base = a.tropical_rank().unwrap().rank;
            let with_row = a.with_row_copy(r % a.nrows(), "dup".into()).unwrap();
            prop_assert_eq!(with_row.tropical_rank().unwrap().rank, base);
            let with_col = with_row.with_col_copy(c % a.ncols(), "dup".into()).unwrap();
            prop_assert_eq!(with_col.tropical_rank().unwrap().rank, base);
        }

        #[test]
        fn permanent_is_linear_across_a_row_split(a in square(4), u in proptest::collection::vec(scalar(), 4), w in proptest::collection::vec(scalar(), 4), r in 0usize..4) {
            let n = a.nrows();
            let r = r % n;
            let (mut au, mut aw, mut sum) = (a.clone(), a.clone(), a.clone());
            for j in 0..n {
                au.set(r, j, u[j].clone());
                aw.set(r, j, w[j].clone());
                sum.set(r, j, u[j].plus(&w[j]));
            }
            prop_assert_eq!(
                sum.permanent().unwrap(),
                au.permanent().unwrap().plus(&aw.permanent().unwrap())
            );
        }

        #[test]
        fn expansion_preserves_permanent(n in 2usize..6, cells in proptest::collection::vec(scalar(), 25)) {
            let a = Matrix::from_fn(default_labels(n), default_labels(n), |i, j| {
                match (i, j) {
                    (0 | 1, 0) => Scalar::t(0),
                    (_, 0) => Scalar::Infinity,
                    _ => cells[i * 5 + j].clone(),
                }
            }).unwrap();
            let b = a.expand_first_column().unwrap();
            prop_assert_eq!(a.permanent().unwrap(), b.permanent().unwrap());
        }

        #[test]
        fn normalization_puts_zero_diagonal(a in square(5)) {
            match a.hungarian_normalize() {
                Err(Error::NoFiniteAssignment) => {
                    prop_assert!(a.permanent().unwrap().is_infinity());
                }
                Err(e) => prop_assert!(false, "{e}"),
                Ok(norm) => {
                    let b = a.apply_normalization(&norm);
                    for i in 0..b.nrows() {
                        prop_assert_eq!(b.get(i, i).nu(), Ext::Finite(int(0)));
                        prop_assert_eq!(b.get(i, i).is_tangible(), a.get(i, norm.permutation[i]).is_tangible());
                        for j in 0..b.ncols() {
                            if let Ext::Finite(v) = b.get(i, j).nu() {
                                prop_assert!(v >= int(0));
                            }
                        }
                    }
                }
            }
        }

        #[test]
        fn replacement_keeps_nonsingular(a in nonsingular(5), p in -5i64..6, q in 1i64..4, s in -5i64..6) {
            let (x, y) = (rat(p, q), rat(s, q));
            let j = a.replace_column_keep_nonsingular(&x, &y).unwrap();
            prop_assert!(a.get(0, j).is_tangible() || a.get(1, j).is_tangible());
            prop_assert!(a.with_column_replaced(j, &x, &y).is_nonsingular().unwrap());
        }
    }
}
