//! Z/2-lattices: an integer matrix `A` with `A² = I` acting on `Zⁿ`.
//!
//! Every such lattice is a sum of trivial (`Z`), sign (`Z₋`) and regular
//! (`Z[Z/2]`) summands. The multiplicities `(a, b, c)` are read off Tate
//! cohomology, and [`decompose`] builds an explicit basis realizing the
//! block form `diag(I_a, −I_b, swap, …, swap)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlin::{self, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("matrix is {rows}x{cols}; a nonempty square matrix is required")]
    NotSquare { rows: usize, cols: usize },
    #[error("A·A is not the identity: entry ({row}, {col}) of A·A is {value}")]
    NotInvolution { row: usize, col: usize, value: BigInt },
}

/// `Zⁿ` with a validated involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutiveLattice {
    matrix: IntMatrix,
}

impl InvolutiveLattice {
    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }
}

/// Multiplicities of the trivial, sign and regular summands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StructureInvariants {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl StructureInvariants {
    pub fn rank(&self) -> usize {
        self.a + self.b + 2 * self.c
    }

    /// Rank of the fixed sublattice, `a + c`.
    pub fn fixed_rank(&self) -> usize {
        self.a + self.c
    }

    /// Rank of the anti-fixed sublattice, `b + c`.
    pub fn anti_fixed_rank(&self) -> usize {
        self.b + self.c
    }
}

impl fmt::Display for StructureInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionClass {
    Trivial,
    FreeOutsideOrigin,
    MixedSplit,
    MixedNonSplit,
}

impl fmt::Display for ActionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ActionClass::Trivial => "Trivial",
            ActionClass::FreeOutsideOrigin => "FreeOutsideOrigin",
            ActionClass::MixedSplit => "MixedSplit",
            ActionClass::MixedNonSplit => "MixedNonSplit",
        };
        f.write_str(s)
    }
}

/// Indecomposable summand types, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Block {
    Triv,
    Sign,
    Reg,
}

impl Block {
    pub fn size(self) -> usize {
        match self {
            Block::Reg => 2,
            _ => 1,
        }
    }

    fn matrix(self) -> IntMatrix {
        match self {
            Block::Triv => IntMatrix::diag(&[1]),
            Block::Sign => IntMatrix::diag(&[-1]),
            Block::Reg => swap(),
        }
    }
}

/// Basis `U` (columns) with `U⁻¹·A·U` block diagonal in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub basis: IntMatrix,
    pub blocks: Vec<Block>,
}

impl Decomposition {
    /// The block-diagonal matrix the blocks describe.
    pub fn canonical_matrix(&self) -> IntMatrix {
        IntMatrix::block_diag(&self.blocks.iter().map(|b| b.matrix()).collect::<Vec<_>>())
    }

    /// Checks `basis` is unimodular and `U⁻¹·A·U` is exactly the canonical matrix.
    pub fn verify(&self, lattice: &InvolutiveLattice) -> bool {
        let Some(inv) = intlin::unimodular_inverse(&self.basis) else {
            return false;
        };
        &(&inv * lattice.matrix()) * &self.basis == self.canonical_matrix()
    }

    pub fn invariants(&self) -> StructureInvariants {
        let count = |k| self.blocks.iter().filter(|&&b| b == k).count();
        StructureInvariants { a: count(Block::Triv), b: count(Block::Sign), c: count(Block::Reg) }
    }
}

/// The 2×2 coordinate swap, the regular representation.
pub fn swap() -> IntMatrix {
    IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]])
}

/// `diag(I_a, −I_b, swap^c)`.
pub fn canonical_matrix(inv: StructureInvariants) -> IntMatrix {
    let mut blocks = vec![Block::Triv; inv.a];
    blocks.extend(std::iter::repeat_n(Block::Sign, inv.b));
    blocks.extend(std::iter::repeat_n(Block::Reg, inv.c));
    Decomposition { basis: IntMatrix::identity(inv.rank()), blocks }.canonical_matrix()
}

pub fn validate_involution(a: &IntMatrix) -> Result<InvolutiveLattice, LatticeError> {
    if !a.is_square() || a.rows() == 0 {
        return Err(LatticeError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let sq = a * a;
    let n = a.rows();
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { BigInt::one() } else { BigInt::zero() };
            if sq[(i, j)] != expected {
                return Err(LatticeError::NotInvolution { row: i, col: j, value: sq[(i, j)].clone() });
            }
        }
    }
    Ok(InvolutiveLattice { matrix: a.clone() })
}

/// `dim_F₂ ker(M)/image(N)` for `M·N = 0` on `Zⁿ`, where the quotient is
/// killed by 2. Panics if the quotient has other torsion or free rank.
fn tate_dimension(kernel_of: &IntMatrix, image_of: &IntMatrix) -> usize {
    let k = intlin::kernel_basis(kernel_of);
    if k.cols() == 0 {
        return 0;
    }
    let coords = intlin::solve_in_basis(&k, image_of).expect("image lies in the kernel");
    let shape = intlin::cokernel(&coords);
    assert_eq!(shape.free_rank, 0, "Tate group must be finite");
    let two = BigInt::from(2);
    assert!(shape.torsion.iter().all(|d| *d == two), "Tate group must be killed by 2");
    shape.torsion.len()
}

/// `(a, b, c)` for any involution matrix (including the empty one).
pub(crate) fn invariants_of_matrix(a: &IntMatrix) -> StructureInvariants {
    let n = a.rows();
    if n == 0 {
        return StructureInvariants { a: 0, b: 0, c: 0 };
    }
    let id = IntMatrix::identity(n);
    let minus = a - &id;
    let plus = a + &id;
    let triv = tate_dimension(&minus, &plus);
    let sign = tate_dimension(&plus, &minus);
    let rest = n - triv - sign;
    assert_eq!(rest % 2, 0);
    StructureInvariants { a: triv, b: sign, c: rest / 2 }
}

pub fn invariants(lattice: &InvolutiveLattice) -> StructureInvariants {
    invariants_of_matrix(lattice.matrix())
}

pub fn classify(lattice: &InvolutiveLattice) -> ActionClass {
    class_of(lattice.matrix(), invariants(lattice))
}

pub(crate) fn class_of(a: &IntMatrix, inv: StructureInvariants) -> ActionClass {
    let n = inv.rank();
    if inv.c >= 1 {
        ActionClass::MixedNonSplit
    } else if inv.a == n {
        ActionClass::Trivial
    } else if inv.b == n {
        assert_eq!(*a, -&IntMatrix::identity(n), "pure sign lattice must be −I");
        ActionClass::FreeOutsideOrigin
    } else {
        ActionClass::MixedSplit
    }
}

/// Vector `v` and functional `φ` with `φ(v) = 1`, both in the `sign`
/// eigenspace (`A·v = sign·v`, `φ·A = sign·φ`), if one exists.
fn split_rank_one(a: &IntMatrix, sign: i64) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
    let n = a.rows();
    let shifted = &IntMatrix::identity(n).scale(&BigInt::from(sign));
    let vectors = intlin::kernel_basis(&(a - shifted));
    let functionals = intlin::kernel_basis(&(&a.transpose() - shifted));
    if vectors.cols() == 0 {
        return None;
    }
    let pairing = &functionals.transpose() * &vectors;
    let snf = intlin::smith_normal_form(&pairing);
    if snf.divisors.first().is_none_or(|d| !d.is_one()) {
        return None;
    }
    let x: Vec<BigInt> = snf.u.row(0).to_vec();
    let y = snf.v.column(0);
    Some((vectors.mul_vec(&y), functionals.mul_vec(&x)))
}

/// Solves `B·μ ≡ p (mod 2)` for a matrix `B` of full column rank mod 2.
fn solve_mod2(b: &IntMatrix, p: &[BigInt]) -> Option<Vec<u8>> {
    let (n, k) = (b.rows(), b.cols());
    let two = BigInt::from(2);
    let bit = |x: &BigInt| -> u8 { (x % &two).abs().to_u8().unwrap() };
    let mut rows: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            let mut r: Vec<u8> = (0..k).map(|j| bit(&b[(i, j)])).collect();
            r.push(bit(&p[i]));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(pr) = (row..n).find(|&i| rows[i][col] == 1) else { continue };
        rows.swap(row, pr);
        for i in 0..n {
            if i != row && rows[i][col] == 1 {
                for j in 0..=k {
                    rows[i][j] ^= rows[row][j];
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if rows[row..].iter().any(|r| r[k] == 1) {
        return None;
    }
    let mut mu = vec![0u8; k];
    for (r, &c) in pivots.iter().enumerate() {
        mu[c] = rows[r][k];
    }
    Some(mu)
}

/// For a lattice with no trivial or sign summands, a vector `v` and a
/// functional `φ` with `φ(v) = 1`, `φ(A·v) = 0`.
fn split_regular(a: &IntMatrix) -> (Vec<BigInt>, Vec<BigInt>) {
    let n = a.rows();
    let id = IntMatrix::identity(n);
    let fixed = intlin::kernel_basis(&(a - &id));
    let anti = intlin::kernel_basis(&(a + &id));
    // p primitive in the fixed lattice; equals (1 + A)·v for some v since
    // the fixed lattice is the image of the norm map here.
    let p = fixed.column(0);
    let mu = solve_mod2(&anti, &p).expect("norm image covers the fixed lattice");
    let mu: Vec<BigInt> = mu.into_iter().map(BigInt::from).collect();
    let m = anti.mul_vec(&mu);
    let two = BigInt::from(2);
    let v: Vec<BigInt> = p.iter().zip(&m).map(|(x, y)| (x + y) / &two).collect();
    let av = a.mul_vec(&v);
    let pair = IntMatrix::from_columns(n, &[v.clone(), av]);
    let snf = intlin::smith_normal_form(&pair);
    assert!(snf.divisors.iter().all(One::is_one), "v, Av must span a saturated plane");
    // U₂·M·V = I₂ ⇒ (V·U₂)·M = I₂.
    let left = &snf.v * &snf.u.row_range(0, 2);
    (v, left.row(0).to_vec())
}

pub fn decompose(lattice: &InvolutiveLattice) -> Decomposition {
    let n = lattice.rank();
    let mut done: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    let mut blocks = Vec::new();
    // Current complement: columns of `frame` (in ambient coordinates) and the
    // action on it in those coordinates.
    let mut frame = IntMatrix::identity(n);
    let mut action = lattice.matrix().clone();

    while action.rows() > 0 {
        let m = action.rows();
        let (block, lead, functional_rows) = if let Some((v, phi)) = split_rank_one(&action, 1) {
            (Block::Triv, vec![v], IntMatrix::from_rows(&[phi]))
        } else if let Some((v, phi)) = split_rank_one(&action, -1) {
            (Block::Sign, vec![v], IntMatrix::from_rows(&[phi]))
        } else {
            let (v, phi) = split_regular(&action);
            let av = action.mul_vec(&v);
            let phi_a = IntMatrix::from_rows(std::slice::from_ref(&phi));
            let phi_a = (&phi_a * &action).row(0).to_vec();
            (Block::Reg, vec![v, av], IntMatrix::from_rows(&[phi, phi_a]))
        };
        let k = lead.len();
        let complement = intlin::kernel_basis(&functional_rows);
        let w = IntMatrix::from_columns(m, &lead).hstack(&complement);
        let w_inv = intlin::unimodular_inverse(&w).expect("split basis is unimodular");
        let conj = &(&w_inv * &action) * &w;
        debug_assert!((0..k).all(|i| (k..m).all(|j| conj[(i, j)].is_zero() && conj[(j, i)].is_zero())));

        let ambient = &frame * &w;
        for j in 0..k {
            done.push(ambient.column(j));
        }
        blocks.push(block);
        frame = ambient.column_range(k, m);
        action = conj.trailing_block(k);
    }
    let dec = Decomposition { basis: IntMatrix::from_columns(n, &done), blocks };
    debug_assert!(dec.blocks.windows(2).all(|w| w[0] <= w[1]));
    dec
}
