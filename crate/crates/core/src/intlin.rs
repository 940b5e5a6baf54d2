//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! Everything here is built on [`smith_normal_form`]: kernels, cokernels,
//! image lattices and solving in a lattice basis all read off the
//! transforms `U·M·V = D`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// Entry cap used by [`random_unimodular`].
pub const DEFAULT_ENTRY_CAP: i64 = 6;

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    /// Builds a matrix from row-major entries.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows × cols");
        IntMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Diagonal matrix with the given entries.
    pub fn diag<T: Into<BigInt> + Clone>(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone().into();
        }
        m
    }

    /// Builds a matrix from nested rows. Returns `None` for ragged input.
    pub fn try_from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        let data = rows.iter().flat_map(|row| row.iter().cloned().map(Into::into)).collect();
        Some(IntMatrix { rows: r, cols: c, data })
    }

    /// Builds a matrix from nested rows; panics on ragged input.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        Self::try_from_rows(rows).expect("ragged rows")
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * k).collect() }
    }

    /// Columns `range` as a new matrix.
    pub fn column_range(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.cols);
        let mut m = Self::zeros(self.rows, end - start);
        for i in 0..self.rows {
            for j in start..end {
                m[(i, j - start)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Rows `range` as a new matrix.
    pub fn row_range(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.rows);
        IntMatrix {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    /// Square sub-block `[start.., start..]`.
    pub fn trailing_block(&self, start: usize) -> Self {
        self.row_range(start, self.rows).column_range(start, self.cols)
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Block-diagonal sum of square or rectangular blocks.
    pub fn block_diag(blocks: &[IntMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(BigInt::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn trace(&self) -> BigInt {
        assert!(self.is_square());
        (0..self.rows).fold(BigInt::zero(), |acc, i| acc + &self[(i, i)])
    }

    /// Largest absolute entry (zero for the empty matrix).
    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(BigInt::abs).max().unwrap_or_default()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows).map(|i| self.row(i).iter().map(ToPrimitive::to_i64).collect()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k·row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += k·col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = -v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = -v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = a * &rhs[(k, j)];
                    out[(i, j)] += v;
                }
            }
        }
        out
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;
    fn neg(self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Serialized as a list of rows; entries that fit in `i64` are JSON
/// numbers, larger ones decimal strings.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Entry>> = self
            .to_rows()
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| match x.to_i64() {
                        Some(v) => Entry::Small(v),
                        None => Entry::Big(x.to_string()),
                    })
                    .collect()
            })
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<Entry>> = Vec::deserialize(deserializer)?;
        let rows: Vec<Vec<BigInt>> = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|e| match e {
                        Entry::Small(v) => Ok(BigInt::from(v)),
                        Entry::Big(s) => s.parse::<BigInt>().map_err(de::Error::custom),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        IntMatrix::try_from_rows(&rows).ok_or_else(|| de::Error::custom("matrix rows have different lengths"))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Small(i64),
    Big(String),
}

/// `U·M·V = D` with `U`, `V` unimodular and `D` diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `u`, tracked alongside it.
    pub u_inv: IntMatrix,
    /// Inverse of `v`, tracked alongside it.
    pub v_inv: IntMatrix,
    /// Diagonal of `d`: nonnegative, each dividing the next, zeros last.
    pub divisors: Vec<BigInt>,
}

impl SmithDecomposition {
    /// Number of nonzero divisors.
    pub fn rank(&self) -> usize {
        self.divisors.iter().take_while(|d| !d.is_zero()).count()
    }
}

/// Smith normal form with transforms. Pivots are chosen by minimal absolute
/// value, first in row-major order, so the result is deterministic.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    // Row op on `a` (left multiplication by E) updates u ← E·u, u_inv ← u_inv·E⁻¹.
    macro_rules! row_add {
        ($dst:expr, $src:expr, $k:expr) => {{
            let k: &BigInt = $k;
            a.add_row_multiple($dst, $src, k);
            u.add_row_multiple($dst, $src, k);
            u_inv.add_col_multiple($src, $dst, &(-k));
        }};
    }
    macro_rules! col_add {
        ($dst:expr, $src:expr, $k:expr) => {{
            let k: &BigInt = $k;
            a.add_col_multiple($dst, $src, k);
            v.add_col_multiple($dst, $src, k);
            v_inv.add_row_multiple($src, $dst, &(-k));
        }};
    }
    macro_rules! row_swap {
        ($x:expr, $y:expr) => {{
            a.swap_rows($x, $y);
            u.swap_rows($x, $y);
            u_inv.swap_cols($x, $y);
        }};
    }
    macro_rules! col_swap {
        ($x:expr, $y:expr) => {{
            a.swap_cols($x, $y);
            v.swap_cols($x, $y);
            v_inv.swap_rows($x, $y);
        }};
    }

    let steps = rows.min(cols);
    for t in 0..steps {
        // Minimal nonzero pivot in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = &a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < a[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        row_swap!(t, pi);
        col_swap!(t, pj);

        loop {
            // Clear column t below the pivot.
            let mut dirty = false;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&a[(t, t)]);
                row_add!(i, t, &(-q));
                if !a[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            // Clear row t right of the pivot.
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&a[(t, t)]);
                col_add!(j, t, &(-q));
                if !a[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // A smaller remainder appeared in row or column t; move it to the pivot.
                let mut best = (t, t);
                for i in t..rows {
                    let x = &a[(i, t)];
                    if !x.is_zero() && x.abs() < a[best].abs() {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    let x = &a[(t, j)];
                    if !x.is_zero() && x.abs() < a[best].abs() {
                        best = (t, j);
                    }
                }
                row_swap!(t, best.0);
                col_swap!(t, best.1);
                continue;
            }
            // Row and column are clear; enforce divisibility of the trailing block.
            let p = a[(t, t)].clone();
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a[(i, j)].is_multiple_of(&p));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    row_add!(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }

    let divisors = (0..steps).map(|i| a[(i, i)].clone()).collect();
    SmithDecomposition { u, d: a, v, u_inv, v_inv, divisors }
}

/// Saturated basis of the integer kernel `{x : M·x = 0}`, as columns.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    snf.v.column_range(snf.rank(), m.cols)
}

/// Basis (as columns) of the lattice spanned by the columns of `m`.
pub fn image_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    let mut basis = snf.u_inv.column_range(0, r);
    for j in 0..r {
        for i in 0..basis.rows {
            basis[(i, j)] *= &snf.divisors[j];
        }
    }
    basis
}

/// Rank over the rationals.
pub fn rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).rank()
}

/// Free rank and invariant factors (> 1) of `Z^rows / M·Z^cols`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CokernelShape {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl CokernelShape {
    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

pub fn cokernel(m: &IntMatrix) -> CokernelShape {
    cokernel_from_snf(&smith_normal_form(m), m.rows)
}

pub(crate) fn cokernel_from_snf(snf: &SmithDecomposition, rows: usize) -> CokernelShape {
    let r = snf.rank();
    CokernelShape {
        free_rank: rows - r,
        torsion: snf.divisors[..r].iter().filter(|d| !d.is_one()).cloned().collect(),
    }
}

/// Solves `basis·X = targets` over the integers, for `basis` of full column
/// rank. `None` if some target column is not in the lattice spanned by `basis`.
pub fn solve_in_basis(basis: &IntMatrix, targets: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(basis.rows, targets.rows);
    let snf = smith_normal_form(basis);
    let r = snf.rank();
    assert_eq!(r, basis.cols, "basis must have full column rank");
    let ub = &snf.u * targets;
    let mut y = IntMatrix::zeros(r, targets.cols);
    for i in 0..ub.rows {
        for j in 0..ub.cols {
            let x = &ub[(i, j)];
            if i < r {
                let (q, rem) = x.div_rem(&snf.divisors[i]);
                if !rem.is_zero() {
                    return None;
                }
                y[(i, j)] = q;
            } else if !x.is_zero() {
                return None;
            }
        }
    }
    Some(&snf.v * &y)
}

/// Inverse of a unimodular matrix; `None` if `m` is not unimodular.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    if !m.is_square() {
        return None;
    }
    let snf = smith_normal_form(m);
    if snf.divisors.iter().any(|d| !d.is_one()) {
        return None;
    }
    // U·M·V = I  ⇒  M⁻¹ = V·U.
    Some(&snf.v * &snf.u)
}

/// Coefficients of `det(I + t·A)`; coefficient `k` is `tr Λᵏ(A)`.
///
/// Computed through the Faddeev–LeVerrier recurrence for the characteristic
/// polynomial, whose divisions are exact over the integers.
pub fn exterior_trace_poly(a: &IntMatrix) -> Vec<BigInt> {
    assert!(a.is_square(), "exterior traces need a square matrix");
    let n = a.rows;
    // char poly det(xI − A) = Σ c_i x^i, c_n = 1.
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut m = IntMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        m = &(a * &m) + &IntMatrix::identity(n).scale(&c[n - k + 1]);
        let tr = (a * &m).trace();
        let (q, rem) = tr.div_rem(&BigInt::from(k));
        debug_assert!(rem.is_zero());
        c[n - k] = -q;
    }
    // e_k = (−1)^k c_{n−k}
    (0..=n).map(|k| if k % 2 == 0 { c[n - k].clone() } else { -&c[n - k] }).collect()
}

/// Deterministic random unimodular matrix with entries capped at
/// [`DEFAULT_ENTRY_CAP`].
pub fn random_unimodular(n: usize, seed: u64, steps: usize) -> IntMatrix {
    random_unimodular_pair(n, seed, steps, DEFAULT_ENTRY_CAP).0
}

/// Random unimodular `P` together with `P⁻¹`, built from `steps` elementary
/// operations. An addition that would push an entry of `P` past `cap` is
/// skipped (the step still counts).
pub fn random_unimodular_pair(n: usize, seed: u64, steps: usize, cap: i64) -> (IntMatrix, IntMatrix) {
    assert!(n >= 1, "dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = IntMatrix::identity(n);
    let mut p_inv = IntMatrix::identity(n);
    let cap = BigInt::from(cap);
    for _ in 0..steps {
        let kind = if n == 1 { 2 } else { rng.gen_range(0..8) };
        match kind {
            // P ← S·P with S a transposition; S⁻¹ = S.
            0 => {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                p.swap_rows(i, j);
                p_inv.swap_cols(i, j);
            }
            // P ← D·P with D a sign flip.
            1 | 2 => {
                let i = rng.gen_range(0..n);
                p.negate_row(i);
                p_inv.negate_col(i);
            }
            // P ← E·P with E = I + k·e_ij.
            _ => {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                let k = BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 });
                let exceeds = (0..n).any(|c| (&p[(i, c)] + &k * &p[(j, c)]).abs() > cap);
                if exceeds {
                    continue;
                }
                p.add_row_multiple(i, j, &k);
                p_inv.add_col_multiple(j, i, &(-&k));
            }
        }
    }
    (p, p_inv)
}
