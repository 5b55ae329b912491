//! Finite generalized Puiseux series and matrices over them.
//!
//! A series here is a finite sum of `c * t^e` with rational exponents, which
//! is all the liftings built by this crate need. Rank is taken over the
//! fraction field of the series ring.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};
use crate::matrix::{combinations, Matrix};
use crate::rational::{common_denominator, format_rat, Rat};
use crate::semiring::{Ext, Scalar};
use crate::symmetrize::SymmetrizedMatrix;

/// Normalized finite series: non-zero coefficients, strictly increasing exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PuiseuxPoly {
    terms: Vec<(FieldElem, Rat)>,
}

impl PuiseuxPoly {
    pub fn zero() -> Self {
        PuiseuxPoly { terms: Vec::new() }
    }

    pub fn monomial(coeff: FieldElem, exp: Rat) -> Self {
        Self::from_terms(vec![(coeff, exp)])
    }

    pub fn constant(coeff: FieldElem) -> Self {
        Self::monomial(coeff, Rat::zero())
    }

    /// `t^e` with unit coefficient; `Infinity` gives the zero series.
    pub fn power(field: Field, exp: &Ext) -> Self {
        match exp {
            Ext::Finite(e) => Self::monomial(field.one(), e.clone()),
            Ext::Infinity => Self::zero(),
        }
    }

    /// Sorts, merges equal exponents and drops zero coefficients.
    pub fn from_terms(mut terms: Vec<(FieldElem, Rat)>) -> Self {
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut out: Vec<(FieldElem, Rat)> = Vec::with_capacity(terms.len());
        for (c, e) in terms {
            match out.last_mut() {
                Some(last) if last.1 == e => last.0 = last.0.add(&c),
                _ => out.push((c, e)),
            }
        }
        out.retain(|(c, _)| !c.is_zero());
        PuiseuxPoly { terms: out }
    }

    pub fn terms(&self) -> &[(FieldElem, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest exponent in the support; `Infinity` for the zero series.
    pub fn deg(&self) -> Ext {
        match self.terms.first() {
            Some((_, e)) => Ext::Finite(e.clone()),
            None => Ext::Infinity,
        }
    }

    pub fn leading_coeff(&self) -> Option<&FieldElem> {
        self.terms.first().map(|(c, _)| c)
    }

    /// Coefficient of `t^e`, if non-zero.
    pub fn coeff(&self, e: &Rat) -> Option<&FieldElem> {
        self.terms
            .binary_search_by(|(_, x)| x.cmp(e))
            .ok()
            .map(|k| &self.terms[k].0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut a, mut b) = (self.terms.iter().peekable(), other.terms.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, Some(_)) => out.push(b.next().unwrap().clone()),
                (Some(x), Some(y)) => match x.1.cmp(&y.1) {
                    Ordering::Less => out.push(a.next().unwrap().clone()),
                    Ordering::Greater => out.push(b.next().unwrap().clone()),
                    Ordering::Equal => {
                        let c = x.0.add(&y.0);
                        if !c.is_zero() {
                            out.push((c, x.1.clone()));
                        }
                        a.next();
                        b.next();
                    }
                },
            }
        }
        PuiseuxPoly { terms: out }
    }

    pub fn neg(&self) -> Self {
        PuiseuxPoly {
            terms: self.terms.iter().map(|(c, e)| (c.neg(), e.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let terms = self
            .terms
            .iter()
            .flat_map(|(c, e)| {
                other
                    .terms
                    .iter()
                    .map(move |(d, f)| (c.mul(d), e + f))
            })
            .collect();
        Self::from_terms(terms)
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        Self::from_terms(self.terms.iter().map(|(d, e)| (d.mul(c), e.clone())).collect())
    }
}

impl fmt::Display for PuiseuxPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (c, e)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})t^{}", format_rat(e))?;
        }
        Ok(())
    }
}

/// Labelled rectangular matrix of series over one coefficient field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    field: Field,
    rows: Vec<String>,
    cols: Vec<String>,
    entries: Vec<PuiseuxPoly>,
}

impl SeriesMatrix {
    pub fn new(
        field: Field,
        rows: Vec<String>,
        cols: Vec<String>,
        grid: Vec<Vec<PuiseuxPoly>>,
    ) -> Result<Self> {
        if grid.len() != rows.len() || grid.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::DimensionMismatch(format!(
                "series grid does not match {} x {} labels",
                rows.len(),
                cols.len()
            )));
        }
        let entries: Vec<PuiseuxPoly> = grid.into_iter().flatten().collect();
        if let Some((c, _)) = entries
            .iter()
            .flat_map(|p| p.terms.iter())
            .find(|(c, _)| c.field() != field)
        {
            return Err(Error::Parse(format!(
                "coefficient {c} is not in field {field}"
            )));
        }
        Ok(SeriesMatrix {
            field,
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(
        field: Field,
        rows: Vec<String>,
        cols: Vec<String>,
        mut f: impl FnMut(usize, usize) -> PuiseuxPoly,
    ) -> Result<Self> {
        let grid = (0..rows.len())
            .map(|i| (0..cols.len()).map(|j| f(i, j)).collect())
            .collect();
        Self::new(field, rows, cols, grid)
    }

    pub fn field(&self) -> Field {
        self.field
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

    pub fn get(&self, i: usize, j: usize) -> &PuiseuxPoly {
        &self.entries[i * self.cols.len() + j]
    }

    /// Entrywise degrees as a tangible matrix.
    pub fn degree_matrix(&self) -> Matrix {
        Matrix::from_fn(self.rows.clone(), self.cols.clone(), |i, j| {
            Scalar::from_ext(self.get(i, j).deg())
        })
        .expect("labels already validated")
    }

    /// Rank over the fraction field of the series ring.
    ///
    /// Exponents are brought to a common denominator `D` and shifted to be
    /// non-negative, so that `t = s^D` turns every entry into a polynomial in
    /// `s`; the rank is then found by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let exps: Vec<&Rat> = self
            .entries
            .iter()
            .flat_map(|p| p.terms.iter().map(|(_, e)| e))
            .collect();
        let Some(min) = exps.iter().copied().min().cloned() else {
            return 0;
        };
        let denom = Rat::from_integer(common_denominator(exps.iter().copied()));
        let to_poly = |p: &PuiseuxPoly| -> Poly {
            let mut coeffs: Vec<FieldElem> = Vec::new();
            for (c, e) in &p.terms {
                let k = ((e - &min) * &denom).to_integer();
                let k = k.to_usize().expect("exponent lattice fits in memory");
                if coeffs.len() <= k {
                    coeffs.resize(k + 1, self.field.zero());
                }
                coeffs[k] = c.clone();
            }
            Poly::new(coeffs)
        };
        let grid: Vec<Vec<Poly>> = (0..self.nrows())
            .map(|i| (0..self.ncols()).map(|j| to_poly(self.get(i, j))).collect())
            .collect();
        bareiss_rank(grid, self.field)
    }

    /// Rank as the largest size of a non-vanishing minor, each minor expanded
    /// over all permutations in series arithmetic. Exponential; a reference for
    /// small matrices.
    pub fn rank_by_minors(&self) -> usize {
        let top = self.nrows().min(self.ncols());
        (1..=top)
            .rev()
            .find(|&k| {
                combinations(self.nrows(), k).iter().any(|r| {
                    combinations(self.ncols(), k)
                        .iter()
                        .any(|c| !self.minor(r, c).is_zero())
                })
            })
            .unwrap_or(0)
    }

    /// Determinant of the submatrix on `rows` x `cols` by permutation expansion.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> PuiseuxPoly {
        #[allow(clippy::too_many_arguments)]
        fn go(
            m: &SeriesMatrix,
            rows: &[usize],
            cols: &[usize],
            k: usize,
            used: &mut Vec<bool>,
            sign: bool,
            prefix: PuiseuxPoly,
            acc: &mut PuiseuxPoly,
        ) {
            if k == rows.len() {
                *acc = if sign { acc.add(&prefix) } else { acc.sub(&prefix) };
                return;
            }
            // Sign tracked by counting inversions against already-used columns.
            for c in 0..cols.len() {
                if used[c] {
                    continue;
                }
                let entry = m.get(rows[k], cols[c]);
                if entry.is_zero() {
                    continue;
                }
                let inversions = used[c + 1..].iter().filter(|&&u| u).count();
                used[c] = true;
                go(
                    m,
                    rows,
                    cols,
                    k + 1,
                    used,
                    sign ^ (inversions % 2 == 1),
                    prefix.mul(entry),
                    acc,
                );
                used[c] = false;
            }
        }
        let mut acc = PuiseuxPoly::zero();
        let one = PuiseuxPoly::constant(self.field.one());
        go(self, rows, cols, 0, &mut vec![false; cols.len()], true, one, &mut acc);
        acc
    }
}

/// Whether `series` lifts `a`: every entry of `a` ghost-surpasses the
/// tangible degree of the matching series entry.
pub fn lifting_check(a: &Matrix, series: &SeriesMatrix) -> Result<bool> {
    if a.nrows() != series.nrows() || a.ncols() != series.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} matrix against {}x{} series matrix",
            a.nrows(),
            a.ncols(),
            series.nrows(),
            series.ncols()
        )));
    }
    if a.row_labels() != series.row_labels() || a.col_labels() != series.col_labels() {
        return Err(Error::ShapeMismatch("row or column labels differ".into()));
    }
    Ok((0..a.nrows()).all(|i| {
        (0..a.ncols()).all(|j| {
            a.get(i, j)
                .ghost_surpasses(&Scalar::from_ext(series.get(i, j).deg()))
        })
    }))
}

/// First entry of `a` that `series` fails to lift, for diagnostics.
fn first_violation(a: &Matrix, series: &SeriesMatrix) -> String {
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let d = Scalar::from_ext(series.get(i, j).deg());
            if !a.get(i, j).ghost_surpasses(&d) {
                return format!(
                    "entry ({}|{}) is {} but the series has degree {}",
                    a.row_labels()[i],
                    a.col_labels()[j],
                    a.get(i, j),
                    d.nu()
                );
            }
        }
    }
    "shape".into()
}

/// Builds a lifting of the symmetrized matrix `t` from a lifting `lift` of
/// `Σ(t)`, of rank exactly `rank(lift) + |I|`.
///
/// For `i ∈ I` and `j ∈ J`, with `a = t(i#1|j)` and `b = t(i#2|j)`:
/// * `a = b = s`: `(ζ t^s, L + ζ t^s)` with `ζ` the first non-zero field element
///   not cancelling the `t^s` coefficient of `L`;
/// * `a = s > b`: `(t^s, L + t^s)`;
/// * `a < b = s`: `(t^s - L, t^s)`.
///
/// `I` columns get `1` on the own column and `0` elsewhere.
pub fn lift_transform(t: &SymmetrizedMatrix, lift: &SeriesMatrix) -> Result<SeriesMatrix> {
    let field = lift.field();
    if field.order() == Some(2) {
        return Err(Error::FieldTooSmall);
    }
    let sigma = t.sigma();
    if !lifting_check(&sigma, lift)? {
        return Err(Error::NotALifting(first_violation(&sigma, lift)));
    }
    let m = t.matrix();
    let mut grid = vec![vec![PuiseuxPoly::zero(); m.ncols()]; m.nrows()];
    for k in 0..t.index_labels().len() {
        let (r1, r2, own) = t.pair(k);
        grid[r1][own] = PuiseuxPoly::constant(field.one());
        grid[r2][own] = PuiseuxPoly::constant(field.one());
        for (b, &c) in t.extra_columns().iter().enumerate() {
            let l = lift.get(k, b);
            let (upper, lower) = (m.get(r1, c).nu(), m.get(r2, c).nu());
            let (first, second) = match upper.cmp(&lower) {
                Ordering::Equal => match &upper {
                    Ext::Infinity => (PuiseuxPoly::zero(), l.clone()),
                    Ext::Finite(s) => {
                        let zeta = field
                            .nonzero_elements()
                            .find(|z| match l.coeff(s) {
                                Some(c) => !c.add(z).is_zero(),
                                None => true,
                            })
                            .ok_or(Error::FieldTooSmall)?;
                        let term = PuiseuxPoly::monomial(zeta, s.clone());
                        (term.clone(), l.add(&term))
                    }
                },
                Ordering::Greater => {
                    let term = PuiseuxPoly::power(field, &upper);
                    (term.clone(), l.add(&term))
                }
                Ordering::Less => {
                    let term = PuiseuxPoly::power(field, &lower);
                    (term.sub(l), term)
                }
            };
            grid[r1][c] = first;
            grid[r2][c] = second;
        }
    }
    let out = SeriesMatrix::new(
        field,
        m.row_labels().to_vec(),
        m.col_labels().to_vec(),
        grid,
    )?;
    debug_assert!(lifting_check(m, &out).unwrap_or(false));
    Ok(out)
}

/// Recovers a lifting of `Σ(t)` from a lifting of `t`, of rank exactly
/// `rank(lifting) - |I|`.
///
/// Row `i#2` is replaced by `x · row(i#2) - y · row(i#1)` where `x`, `y` are
/// the entries of rows `i#1`, `i#2` in column `i`; this clears column `i`
/// without dividing series. The result is the `I × J` block of those rows.
pub fn row_reduce_symmetrized(
    t: &SymmetrizedMatrix,
    lifting: &SeriesMatrix,
) -> Result<SeriesMatrix> {
    if !lifting_check(t.matrix(), lifting)? {
        return Err(Error::NotALifting(first_violation(t.matrix(), lifting)));
    }
    let cols = t.extra_columns();
    SeriesMatrix::from_fn(
        lifting.field(),
        t.index_labels().to_vec(),
        t.extra_labels().to_vec(),
        |k, b| {
            let (r1, r2, own) = t.pair(k);
            let (x, y) = (lifting.get(r1, own), lifting.get(r2, own));
            x.mul(lifting.get(r2, cols[b]))
                .sub(&y.mul(lifting.get(r1, cols[b])))
        },
    )
}

/// Dense univariate polynomial, coefficients from low to high degree, no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Poly(Vec<FieldElem>);

impl Poly {
    fn new(mut c: Vec<FieldElem>) -> Self {
        while c.last().is_some_and(FieldElem::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Poly, field: Field) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = vec![field.zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }

    fn sub(&self, other: &Poly, field: Field) -> Poly {
        let n = self.0.len().max(other.0.len());
        let zero = field.zero();
        Poly::new(
            (0..n)
                .map(|k| {
                    self.0
                        .get(k)
                        .unwrap_or(&zero)
                        .sub(other.0.get(k).unwrap_or(&zero))
                })
                .collect(),
        )
    }

    /// Exact quotient; panics if `divisor` does not divide `self`.
    fn div_exact(&self, divisor: &Poly, field: Field) -> Poly {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let mut rem = self.0.clone();
        let dl = divisor.0.len();
        if rem.len() < dl {
            assert!(Poly::new(rem).is_zero(), "inexact division");
            return Poly(Vec::new());
        }
        let lead_inv = divisor.0[dl - 1].inv();
        let mut quot = vec![field.zero(); rem.len() - dl + 1];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dl - 1].mul(&lead_inv);
            if c.is_zero() {
                continue;
            }
            for (t, d) in divisor.0.iter().enumerate() {
                rem[k + t] = rem[k + t].sub(&c.mul(d));
            }
            quot[k] = c;
        }
        assert!(rem.iter().all(FieldElem::is_zero), "inexact division");
        Poly::new(quot)
    }
}

/// Rank of a polynomial matrix by Bareiss elimination with full pivoting.
fn bareiss_rank(mut a: Vec<Vec<Poly>>, field: Field) -> usize {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut prev = Poly::new(vec![field.one()]);
    let mut rank = 0;
    while rank < m.min(n) {
        let pivot = (rank..m)
            .flat_map(|i| (rank..n).map(move |j| (i, j)))
            .find(|&(i, j)| !a[i][j].is_zero());
        let Some((pi, pj)) = pivot else {
            break;
        };
        a.swap(rank, pi);
        for row in a.iter_mut() {
            row.swap(rank, pj);
        }
        let r = rank;
        for i in r + 1..m {
            for j in r + 1..n {
                let num = a[r][r]
                    .mul(&a[i][j], field)
                    .sub(&a[i][r].mul(&a[r][j], field), field);
                a[i][j] = num.div_exact(&prev, field);
            }
            a[i][r] = Poly(Vec::new());
        }
        prev = a[r][r].clone();
        rank += 1;
    }
    rank
}
