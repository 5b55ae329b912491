//! The `Phi(M)` matrix built from a 0-1 matrix, and its rank bounds.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{binomial, Matrix, DEFAULT_RANK_BUDGET};
use crate::rational::{ceil, floor, format_rat, int, serde_rat, Rat};
use crate::semiring::Scalar;

/// A `d x width` matrix of zeros and ones. Rows are labelled `i1..`, columns `j1..`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ZeroOneJson", into = "ZeroOneJson")]
pub struct ZeroOneMatrix {
    d: usize,
    width: usize,
    bits: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct ZeroOneJson {
    d: usize,
    width: usize,
    bits: Vec<Vec<u8>>,
}

impl TryFrom<ZeroOneJson> for ZeroOneMatrix {
    type Error = Error;

    fn try_from(j: ZeroOneJson) -> Result<Self> {
        if let Some(b) = j.bits.iter().flatten().find(|&&b| b > 1) {
            return Err(Error::Parse(format!("bit value {b} is not 0 or 1")));
        }
        ZeroOneMatrix::new(
            j.d,
            j.width,
            j.bits
                .into_iter()
                .map(|r| r.into_iter().map(|b| b == 1).collect())
                .collect(),
        )
    }
}

impl From<ZeroOneMatrix> for ZeroOneJson {
    fn from(m: ZeroOneMatrix) -> Self {
        ZeroOneJson {
            d: m.d,
            width: m.width,
            bits: m
                .bits
                .into_iter()
                .map(|r| r.into_iter().map(u8::from).collect())
                .collect(),
        }
    }
}

impl ZeroOneMatrix {
    pub fn new(d: usize, width: usize, bits: Vec<Vec<bool>>) -> Result<Self> {
        if d == 0 || width == 0 {
            return Err(Error::DimensionMismatch("0-1 matrix must be non-empty".into()));
        }
        if bits.len() != d || bits.iter().any(|r| r.len() != width) {
            return Err(Error::DimensionMismatch(format!(
                "bits do not form a {d} x {width} grid"
            )));
        }
        Ok(ZeroOneMatrix { d, width, bits })
    }

    pub fn from_fn(d: usize, width: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let bits = (0..d).map(|i| (0..width).map(|j| f(i, j)).collect()).collect();
        ZeroOneMatrix { d, width, bits }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i][j]
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().flatten().filter(|&&b| b).count()
    }

    pub fn row_labels(&self) -> Vec<String> {
        (1..=self.d).map(|i| format!("i{i}")).collect()
    }

    pub fn col_labels(&self) -> Vec<String> {
        (1..=self.width).map(|j| format!("j{j}")).collect()
    }

    /// Whether some `size x size` submatrix is all ones.
    ///
    /// Depth-first over increasing row sets, carrying the intersection of
    /// their column supports and pruning once it has fewer than `size` columns.
    pub fn has_all_ones_block(&self, size: usize) -> bool {
        if size == 0 {
            return true;
        }
        if size > self.d || size > self.width {
            return false;
        }
        let words = self.width.div_ceil(64);
        let rows: Vec<Vec<u64>> = self
            .bits
            .iter()
            .map(|r| {
                let mut w = vec![0u64; words];
                for (j, &b) in r.iter().enumerate() {
                    if b {
                        w[j / 64] |= 1 << (j % 64);
                    }
                }
                w
            })
            .collect();
        fn count(w: &[u64]) -> usize {
            w.iter().map(|x| x.count_ones() as usize).sum()
        }
        fn search(rows: &[Vec<u64>], start: usize, need: usize, size: usize, acc: &[u64]) -> bool {
            if need == 0 {
                return true;
            }
            for i in start..=rows.len() - need {
                let next: Vec<u64> = acc.iter().zip(&rows[i]).map(|(a, b)| a & b).collect();
                if count(&next) >= size && search(rows, i + 1, need - 1, size, &next) {
                    return true;
                }
            }
            false
        }
        search(&rows, 0, size, size, &vec![u64::MAX; words])
    }
}

/// A 0-1 matrix together with parameters `(d, k, r, u)` for which it was
/// checked to have at least `u` ones and no `ceil(r) x ceil(r)` all-ones block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodTuple {
    pub d: usize,
    pub k: usize,
    #[serde(with = "serde_rat")]
    pub r: Rat,
    #[serde(with = "serde_rat")]
    pub u: Rat,
    pub matrix: ZeroOneMatrix,
}

/// Result of checking the two conditions on a 0-1 matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoodCheck {
    pub ones_count: usize,
    pub cond1: bool,
    pub cond2: bool,
    /// Size of the all-ones block that was searched for.
    pub block_size: usize,
    /// The block size exceeds a dimension, so condition 2 holds trivially.
    pub cond2_vacuous: bool,
}

impl GoodCheck {
    pub fn good(&self) -> bool {
        self.cond1 && self.cond2
    }
}

/// Checks both conditions: at least `u` ones, and no `ceil(r) x ceil(r)`
/// all-ones submatrix.
pub fn verify_good(m: &ZeroOneMatrix, k: usize, r: &Rat, u: &Rat) -> Result<GoodCheck> {
    if k < 1 || m.width() != k * m.d() - m.d() {
        return Err(Error::DimensionMismatch(format!(
            "width {} is not k*d - d = {}",
            m.width(),
            (k * m.d()).saturating_sub(m.d())
        )));
    }
    let ones = m.ones();
    let block = ceil(r).max(BigInt::from(0));
    let block = block.to_usize().unwrap_or(usize::MAX);
    let vacuous = block > m.d() || block > m.width();
    Ok(GoodCheck {
        ones_count: ones,
        cond1: Rat::from_integer(ones.into()) >= *u,
        cond2: !m.has_all_ones_block(block),
        block_size: block,
        cond2_vacuous: vacuous,
    })
}

impl GoodTuple {
    /// Verifies both conditions before accepting the tuple.
    pub fn new(matrix: ZeroOneMatrix, k: usize, r: Rat, u: Rat) -> Result<Self> {
        let check = verify_good(&matrix, k, &r, &u)?;
        if !check.good() {
            return Err(Error::PreconditionViolated(format!(
                "not a good tuple: {} ones against u = {}, all-ones {}x{} block {}",
                check.ones_count,
                format_rat(&u),
                check.block_size,
                check.block_size,
                if check.cond2 { "absent" } else { "present" }
            )));
        }
        Ok(GoodTuple {
            d: matrix.d(),
            k,
            r,
            u,
            matrix,
        })
    }

    /// Re-runs the checks, e.g. after deserializing.
    pub fn validate(&self) -> Result<()> {
        if self.d != self.matrix.d() {
            return Err(Error::DimensionMismatch("d disagrees with the matrix".into()));
        }
        GoodTuple::new(self.matrix.clone(), self.k, self.r.clone(), self.u.clone()).map(|_| ())
    }
}

/// Key of a coefficient: row `i`, column `j` of the 0-1 matrix and copy `alpha`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoeffKey {
    pub i: usize,
    pub j: usize,
    pub alpha: usize,
}

/// `Phi(M)`: rows `(alpha, i)` for `alpha in 1..=k`, columns `I ∪ J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiMatrix {
    d: usize,
    k: usize,
    matrix: Matrix,
    coeffs: BTreeMap<CoeffKey, Rat>,
}

pub fn phi_row_label(alpha: usize, i_label: &str) -> String {
    format!("{alpha},{i_label}")
}

impl PhiMatrix {
    /// Builds `Phi(M)`:
    /// * `(alpha, i | i) = 0`, `(alpha, i | i') = inf` for `i' != i` in `I`;
    /// * `(alpha, i | j) = 0` when `M(i|j) = 0`;
    /// * `(alpha, i | j) = a_{i j alpha}` when `M(i|j) = 1`.
    ///
    /// The coefficients are `1 + m / ((N + 1) k d)` for `m = 1..=N`, enumerating
    /// the triples `(i, j, alpha)` with `M(i|j) = 1` lexicographically, so they
    /// are distinct and lie in `[1, 1 + 1/(kd)]`.
    pub fn build(m: &ZeroOneMatrix, k: usize) -> Result<Self> {
        let d = m.d();
        if k < 2 {
            return Err(Error::PreconditionViolated("k must be at least 2".into()));
        }
        if m.width() != k * d - d {
            return Err(Error::DimensionMismatch(format!(
                "width {} is not k*d - d = {}",
                m.width(),
                k * d - d
            )));
        }
        let n = k * d;
        let total = m.ones() * k;
        let step = Rat::new(
            BigInt::one(),
            BigInt::from(total + 1) * BigInt::from(n),
        );
        let mut coeffs = BTreeMap::new();
        let mut next = 1usize;
        for i in 0..d {
            for j in 0..m.width() {
                if !m.get(i, j) {
                    continue;
                }
                for alpha in 1..=k {
                    coeffs.insert(CoeffKey { i, j, alpha }, int(1) + &step * int(next as i64));
                    next += 1;
                }
            }
        }
        let i_labels = m.row_labels();
        let rows: Vec<String> = (1..=k)
            .flat_map(|alpha| i_labels.iter().map(move |l| phi_row_label(alpha, l)))
            .collect();
        let cols: Vec<String> = i_labels.iter().cloned().chain(m.col_labels()).collect();
        let matrix = Matrix::from_fn(rows, cols, |r, c| {
            let (alpha, i) = (r / d + 1, r % d);
            if c < d {
                return if c == i { Scalar::t(0) } else { Scalar::Infinity };
            }
            let j = c - d;
            match coeffs.get(&CoeffKey { i, j, alpha }) {
                Some(a) => Scalar::Tangible(a.clone()),
                None => Scalar::t(0),
            }
        })?;
        Ok(PhiMatrix {
            d,
            k,
            matrix,
            coeffs,
        })
    }

    /// Reassembles `Phi` from stored parts, checking only the dimensions.
    /// The entries are checked later by `validate_against`.
    pub fn from_raw(
        d: usize,
        k: usize,
        matrix: Matrix,
        coeffs: BTreeMap<CoeffKey, Rat>,
    ) -> Result<Self> {
        if d == 0 || k < 2 || matrix.nrows() != k * d || matrix.ncols() != k * d {
            return Err(Error::DimensionMismatch(format!(
                "Phi with d = {d}, k = {k} must be {0} x {0}",
                k * d
            )));
        }
        Ok(PhiMatrix {
            d,
            k,
            matrix,
            coeffs,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> usize {
        self.k * self.d
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn coeffs(&self) -> &BTreeMap<CoeffKey, Rat> {
        &self.coeffs
    }

    /// Checks the three entry rules against `m` and the coefficient range and
    /// distinctness, naming the first offending entry.
    pub fn validate_against(&self, m: &ZeroOneMatrix) -> Result<()> {
        let (d, k) = (self.d, self.k);
        let n = k * d;
        let bad = |msg: String| Err(Error::PreconditionViolated(msg));
        if m.d() != d || m.width() != n - d {
            return bad("0-1 matrix does not match the Phi dimensions".into());
        }
        if self.matrix.nrows() != n || self.matrix.ncols() != n {
            return bad(format!("Phi must be {n} x {n}"));
        }
        let top = int(1) + Rat::new(BigInt::one(), BigInt::from(n));
        let mut seen = std::collections::HashSet::new();
        for (key, a) in &self.coeffs {
            if *a < int(1) || *a > top {
                return bad(format!("coefficient {} out of [1, 1 + 1/n]", format_rat(a)));
            }
            if !seen.insert(a.clone()) {
                return bad(format!("coefficient {} repeated", format_rat(a)));
            }
            if key.i >= d || key.j >= m.width() || key.alpha == 0 || key.alpha > k {
                return bad("coefficient key out of range".into());
            }
        }
        for r in 0..n {
            let (alpha, i) = (r / d + 1, r % d);
            for c in 0..n {
                let expected = if c < d {
                    if c == i {
                        Scalar::t(0)
                    } else {
                        Scalar::Infinity
                    }
                } else if m.get(i, c - d) {
                    match self.coeffs.get(&CoeffKey { i, j: c - d, alpha }) {
                        Some(a) => Scalar::Tangible(a.clone()),
                        None => return bad(format!("missing coefficient for ({alpha},{i},{})", c - d)),
                    }
                } else {
                    Scalar::t(0)
                };
                if *self.matrix.get(r, c) != expected {
                    return bad(format!(
                        "entry ({}|{}) is {}, expected {}",
                        self.matrix.row_labels()[r],
                        self.matrix.col_labels()[c],
                        self.matrix.get(r, c),
                        expected
                    ));
                }
            }
        }
        Ok(())
    }

    /// `Phi` with every `Infinity` replaced by tangible 2.
    pub fn finite_entries(&self) -> Matrix {
        finite_entries(&self.matrix)
    }
}

pub fn finite_entries(m: &Matrix) -> Matrix {
    Matrix::from_fn(m.row_labels().to_vec(), m.col_labels().to_vec(), |i, j| {
        match m.get(i, j) {
            Scalar::Infinity => Scalar::t(2),
            s => s.clone(),
        }
    })
    .expect("labels unchanged")
}

/// `n x n` matrix with tangible 0 on the diagonal and tangible 2 elsewhere.
pub fn two_off_diagonal(labels: &[String]) -> Matrix {
    Matrix::from_fn(labels.to_vec(), labels.to_vec(), |i, j| {
        if i == j {
            Scalar::t(0)
        } else {
            Scalar::t(2)
        }
    })
    .expect("labels are distinct")
}

/// Integer consequence of `rank >= n - sqrt(n^2 - k u)`: returns `n - s` with
/// `s` the least integer such that `s^2 >= n^2 - ceil(k u)`.
pub fn kapranov_lower_bound(n: u64, k: u64, u: &Rat) -> Result<u64> {
    let ku = u * int(k as i64);
    let n2 = BigInt::from(n) * BigInt::from(n);
    if ku.is_negative() || ku > Rat::from_integer(n2.clone()) {
        return Err(Error::NegativeRadicand(format_rat(
            &(Rat::from_integer(n2) - ku),
        )));
    }
    let radicand: BigInt = n2 - ceil(&ku);
    let mut s = radicand.sqrt();
    if &s * &s < radicand {
        s += 1;
    }
    Ok(n - s.to_u64().expect("s <= n"))
}

/// `d + k r`.
pub fn tropical_upper_bound(d: u64, k: u64, r: &Rat) -> Rat {
    int(d as i64) + int(k as i64) * r
}

/// Smallest submatrix size covered by the tropical bound: `floor(d + k r) + 1`.
pub fn singular_threshold(d: u64, k: u64, r: &Rat) -> usize {
    (floor(&tropical_upper_bound(d, k, r)) + BigInt::one())
        .to_usize()
        .unwrap_or(usize::MAX)
}

/// How oversized submatrices of `Phi` were tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Exhaustive,
    Randomized,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeSweep {
    pub size: usize,
    pub tested: u64,
    pub nonsingular_found: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiBoundsReport {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    #[serde(with = "serde_rat")]
    pub r: Rat,
    #[serde(with = "serde_rat")]
    pub u: Rat,
    #[serde(with = "serde_rat")]
    pub tropical_upper_bound: Rat,
    /// Every submatrix of at least this size must be singular.
    pub singular_threshold: usize,
    pub mode: SweepMode,
    pub sweeps: Vec<SizeSweep>,
    pub total_tested: u64,
    /// Exhaustive mode: a proof. Randomized mode: evidence only.
    pub all_singular: bool,
    pub vacuous: bool,
    pub exact_tropical_rank: Option<usize>,
    pub kapranov_lower_bound: KapranovBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KapranovBound {
    pub value: Option<u64>,
    pub status: String,
}

pub const KAPRANOV_CAVEAT: &str =
    "theoretical (hypothesis not realizable in exact rational mode)";

#[derive(Clone, Copy, Debug)]
pub struct PhiBoundsOptions {
    /// Maximum number of submatrix tests in exhaustive mode.
    pub exhaustive_limit: u64,
    /// Use random sampling with this many samples per size instead.
    pub randomized: Option<usize>,
    pub seed: u64,
    /// Submatrix-check budget for the exact rank (0 disables it).
    pub rank_budget: u64,
}

impl Default for PhiBoundsOptions {
    fn default() -> Self {
        PhiBoundsOptions {
            exhaustive_limit: 5_000_000,
            randomized: None,
            seed: 0,
            rank_budget: DEFAULT_RANK_BUDGET,
        }
    }
}

/// Checks that every square submatrix of `Phi` of size above `d + k r` is
/// singular, and reports the exact rank when the descending search fits the budget.
pub fn verify_phi_bounds(
    phi: &PhiMatrix,
    good: &GoodTuple,
    opts: &PhiBoundsOptions,
) -> Result<PhiBoundsReport> {
    if good.d != phi.d() || good.k != phi.k() {
        return Err(Error::DimensionMismatch(format!(
            "tuple has (d, k) = ({}, {}), Phi has ({}, {})",
            good.d,
            good.k,
            phi.d(),
            phi.k()
        )));
    }
    good.validate()?;
    phi.validate_against(&good.matrix)?;
    let n = phi.size();
    let (d, k) = (phi.d() as u64, phi.k() as u64);
    let threshold = singular_threshold(d, k, &good.r);
    let sizes: Vec<usize> = (threshold..=n).collect();
    let m = phi.matrix();
    let mut sweeps = Vec::new();
    let mode;
    match opts.randomized {
        None => {
            mode = SweepMode::Exhaustive;
            let total: u128 = sizes.iter().map(|&s| binomial(n, s) * binomial(n, s)).sum();
            if total > opts.exhaustive_limit as u128 {
                return Err(Error::SizeLimitExceeded {
                    size: n,
                    limit: opts.exhaustive_limit as usize,
                });
            }
            for &s in &sizes {
                let (singular, tested) = m.all_submatrices_singular(s)?;
                sweeps.push(SizeSweep {
                    size: s,
                    tested,
                    nonsingular_found: !singular,
                });
            }
        }
        Some(samples) => {
            use rand::seq::index::sample;
            use rand::SeedableRng;
            mode = SweepMode::Randomized;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
            for &s in &sizes {
                let mut found = false;
                for _ in 0..samples {
                    let mut r = sample(&mut rng, n, s).into_vec();
                    let mut c = sample(&mut rng, n, s).into_vec();
                    r.sort_unstable();
                    c.sort_unstable();
                    if m.submatrix(&r, &c).is_nonsingular_fast()? {
                        found = true;
                        break;
                    }
                }
                sweeps.push(SizeSweep {
                    size: s,
                    tested: samples as u64,
                    nonsingular_found: found,
                });
            }
        }
    }
    let exact = if opts.rank_budget > 0 {
        m.tropical_rank_within(opts.rank_budget)?.map(|w| w.rank)
    } else {
        None
    };
    let n_u64 = n as u64;
    let kap = kapranov_lower_bound(n_u64, k, &good.u);
    Ok(PhiBoundsReport {
        n,
        d: phi.d(),
        k: phi.k(),
        r: good.r.clone(),
        u: good.u.clone(),
        tropical_upper_bound: tropical_upper_bound(d, k, &good.r),
        singular_threshold: threshold,
        mode,
        total_tested: sweeps.iter().map(|s| s.tested).sum(),
        all_singular: sweeps.iter().all(|s| !s.nonsingular_found),
        vacuous: sizes.is_empty(),
        sweeps,
        exact_tropical_rank: exact,
        kapranov_lower_bound: match kap {
            Ok(v) => KapranovBound {
                value: Some(v),
                status: KAPRANOV_CAVEAT.into(),
            },
            Err(e) => KapranovBound {
                value: None,
                status: e.to_string(),
            },
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn no_two_by_two_ones() -> ZeroOneMatrix {
        // Rows are the lines of a cyclic pattern with pairwise intersections of size <= 1.
        ZeroOneMatrix::from_fn(6, 6, |i, j| j == i || j == (i + 1) % 6)
    }

    #[test]
    fn phi_of_single_zero() {
        let m = ZeroOneMatrix::from_fn(1, 1, |_, _| false);
        let phi = PhiMatrix::build(&m, 2).unwrap();
        let expected = Matrix::from_rows(vec![vec![Scalar::t(0); 2]; 2]).unwrap();
        assert_eq!(
            phi.matrix().rows_iter().map(<[Scalar]>::to_vec).collect::<Vec<_>>(),
            expected.rows_iter().map(<[Scalar]>::to_vec).collect::<Vec<_>>()
        );
        assert_eq!(phi.finite_entries(), *phi.matrix());
    }

    #[test]
    fn phi_of_single_one() {
        let m = ZeroOneMatrix::from_fn(1, 1, |_, _| true);
        let phi = PhiMatrix::build(&m, 2).unwrap();
        let (a1, a2) = (phi.matrix().get(0, 1), phi.matrix().get(1, 1));
        assert_eq!(*phi.matrix().get(0, 0), Scalar::t(0));
        assert_ne!(a1, a2);
        for a in [a1, a2] {
            let v = a.value().unwrap();
            assert!(a.is_tangible() && *v >= int(1) && *v <= rat(3, 2));
        }
        // N = 2 so the coefficients are 1 + 1/6 and 1 + 2/6.
        assert_eq!(*a1, Scalar::Tangible(rat(7, 6)));
        assert_eq!(*a2, Scalar::Tangible(rat(4, 3)));
    }

    #[test]
    fn phi_structure_for_desk_instance() {
        let m = no_two_by_two_ones();
        assert!(!m.has_all_ones_block(2));
        let phi = PhiMatrix::build(&m, 2).unwrap();
        assert_eq!(phi.size(), 12);
        phi.validate_against(&m).unwrap();
        let mut broken = phi.clone();
        broken.matrix.set(0, 1, Scalar::t(0));
        assert!(broken.validate_against(&m).is_err());
    }

    #[test]
    fn build_rejects_bad_width() {
        let m = ZeroOneMatrix::from_fn(2, 3, |_, _| true);
        assert!(matches!(PhiMatrix::build(&m, 2), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn kapranov_bound_examples() {
        assert_eq!(kapranov_lower_bound(12, 2, &int(0)).unwrap(), 0);
        assert_eq!(kapranov_lower_bound(12, 2, &int(72)).unwrap(), 12);
        assert_eq!(kapranov_lower_bound(12, 2, &int(36)).unwrap(), 3);
        assert!(matches!(
            kapranov_lower_bound(3, 2, &int(5)),
            Err(Error::NegativeRadicand(_))
        ));
    }

    #[test]
    fn kapranov_bound_never_rounds_up() {
        // n - s <= ceil(n - sqrt(n^2 - ku)) for a grid of fractional u.
        for n in 1u64..15 {
            for k in 1u64..4 {
                for twice_u in 0..=(2 * n * n / k) {
                    let u = rat(twice_u as i64, 2);
                    let b = kapranov_lower_bound(n, k, &u).unwrap() as f64;
                    let real = n as f64 - ((n * n) as f64 - k as f64 * twice_u as f64 / 2.0).sqrt();
                    assert!(b <= real.ceil() + 1e-9, "n={n} k={k} u={u}: {b} vs {real}");
                }
            }
        }
    }

    #[test]
    fn tropical_bound_examples() {
        assert_eq!(tropical_upper_bound(6, 2, &int(2)), int(10));
        assert_eq!(tropical_upper_bound(6, 2, &int(0)), int(6));
        assert_eq!(singular_threshold(6, 2, &int(2)), 11);
        assert_eq!(singular_threshold(6, 2, &rat(5, 4)), 9);
    }

    #[test]
    fn finite_entries_is_product_with_two_off_diagonal() {
        let phi = PhiMatrix::build(&no_two_by_two_ones(), 2).unwrap();
        let f = phi.finite_entries();
        assert!(f.rows_iter().flatten().all(|s| !s.is_infinity()));
        let dm = two_off_diagonal(phi.matrix().row_labels());
        assert_eq!(dm.minplus_product(phi.matrix()).unwrap(), f);
        // Supertropically, the replaced entries come out as ghosts.
        let sup = dm.tropical_product(phi.matrix()).unwrap();
        assert_eq!(*sup.get(0, 1), Scalar::g(2));
    }

    #[test]
    fn good_checks() {
        let zeros = ZeroOneMatrix::from_fn(3, 6, |_, _| false);
        let c = verify_good(&zeros, 3, &int(2), &int(0)).unwrap();
        assert!(c.cond1 && c.cond2);
        let ones = ZeroOneMatrix::from_fn(3, 6, |_, _| true);
        assert!(!verify_good(&ones, 3, &int(2), &int(0)).unwrap().cond2);
        let ident = ZeroOneMatrix::from_fn(6, 6, |i, j| i == j);
        let c = verify_good(&ident, 2, &int(2), &int(6)).unwrap();
        assert_eq!(c.ones_count, 6);
        assert!(c.cond1 && c.cond2);
        let c = verify_good(&ident, 2, &int(7), &int(7)).unwrap();
        assert!(!c.cond1 && c.cond2 && c.cond2_vacuous);
        assert!(GoodTuple::new(ones, 3, int(2), int(0)).is_err());
    }

    #[test]
    fn json_shape() {
        let m = ZeroOneMatrix::from_fn(2, 2, |i, j| i == j);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"d":2,"width":2,"bits":[[1,0],[0,1]]}"#);
        let back: ZeroOneMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ZeroOneMatrix>(r#"{"d":2,"width":2,"bits":[[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<ZeroOneMatrix>(r#"{"d":1,"width":1,"bits":[[2]]}"#).is_err());
    }
}
