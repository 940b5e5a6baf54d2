//! Brute-force verifiers. Each recomputes a quantity from the other modules
//! by a different method: explicit exterior-power matrices and rational
//! elimination, enumeration of fixed grid points on the torus, and homology
//! of explicit free resolutions over `R`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlin::{self, CokernelShape, IntMatrix, DEFAULT_ENTRY_CAP};
use crate::lattice::{self, ActionClass, StructureInvariants};
use crate::repring::{
    LocalEntry, ModuleClass, ProductEntry, RModuleSum, SiteKind, TablePayload, TABLE_FORMAT, TABLE_VERSION,
};
use crate::toruskt::{self, CohomologyAction, KRankReport, ScopeFlag};

/// Largest torus dimension for the exterior-algebra oracle.
pub const EXTERIOR_MAX_N: usize = 8;
/// Largest number of grid points `dⁿ` for the grid oracle.
pub const GRID_MAX_POINTS: u64 = 1_000_000;
/// Default grid denominator.
pub const DEFAULT_GRID_DENOMINATOR: u64 = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("exterior oracle supports n <= {max}, got n = {n}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("grid of {denominator}^{n} points exceeds the limit of {limit}")]
    GridTooLarge { n: usize, denominator: u64, limit: u64 },
    #[error("grid denominator must be even and at least 2, got {0}")]
    BadDenominator(u64),
    #[error("matrix must be square")]
    NotSquare,
}

// ---------------------------------------------------------------------------
// Exterior algebra action

/// Rank by fraction-free (Bareiss) elimination; every division is exact.
fn bareiss_rank(m: &IntMatrix) -> usize {
    let mut a = m.to_rows();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(p, rank);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                a[i][j] = (&a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j]) / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == k)
        .map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect())
        .collect()
}

/// Matrix of the pullback action on `Λᵏ` of the dual lattice, in the basis
/// `e_S` of increasing index sets. Entries are `k×k` minors of `Aᵀ`.
pub fn exterior_power_matrix(a: &IntMatrix, k: usize) -> IntMatrix {
    let n = a.rows();
    let at = a.transpose();
    let basis = subsets_of_size(n, k);
    let mut m = IntMatrix::zeros(basis.len(), basis.len());
    for (i, s) in basis.iter().enumerate() {
        for (j, t) in basis.iter().enumerate() {
            let minor: Vec<Vec<BigInt>> = s.iter().map(|&r| t.iter().map(|&c| at[(r, c)].clone()).collect()).collect();
            m[(i, j)] = if k == 0 { BigInt::one() } else { IntMatrix::from_rows(&minor).det() };
        }
    }
    m
}

/// Invariant and anti-invariant dimensions of the action of `A` on
/// `H*(Tⁿ; Q) = Λ*(Qⁿ)`, from the ranks of `M ∓ I` degree by degree.
pub fn exterior_action_invariants(a: &IntMatrix) -> Result<CohomologyAction, OracleError> {
    if !a.is_square() {
        return Err(OracleError::NotSquare);
    }
    let n = a.rows();
    if n > EXTERIOR_MAX_N {
        return Err(OracleError::DimensionTooLarge { n, max: EXTERIOR_MAX_N });
    }
    let mut inv = [0u64; 2];
    let mut anti = [0u64; 2];
    for k in 0..=n {
        let m = exterior_power_matrix(a, k);
        let dim = m.rows();
        let id = IntMatrix::identity(dim);
        let fixed = dim - bareiss_rank(&(&m - &id));
        let negated = dim - bareiss_rank(&(&m + &id));
        assert_eq!(fixed + negated, dim, "an involution splits into ±1 eigenspaces");
        inv[k % 2] += fixed as u64;
        anti[k % 2] += negated as u64;
    }
    Ok(CohomologyAction { even_inv: inv[0], odd_inv: inv[1], even_anti: anti[0], odd_anti: anti[1] })
}

// ---------------------------------------------------------------------------
// Fixed points on a grid

/// Fixed grid points of σ and their clustering into components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridFixedSet {
    pub denominator: u64,
    /// Fixed points in `(1/d)Zⁿ/Zⁿ`.
    pub points: u64,
    /// Fixed points in `(1/2d)Zⁿ/Zⁿ`.
    pub refined_points: u64,
    pub components: u64,
    /// Dimension from the growth `refined_points / points = 2^dim`.
    pub dimension: usize,
}

fn enumerate_fixed(a_mod: &[Vec<i64>], m: i64) -> Vec<Vec<i64>> {
    let n = a_mod.len();
    let total = (m as u64).pow(n as u32);
    let mut out = Vec::new();
    let mut k = vec![0i64; n];
    for idx in 0..total {
        let mut rest = idx;
        for x in k.iter_mut() {
            *x = (rest % m as u64) as i64;
            rest /= m as u64;
        }
        // (A − I)k ≡ 0 (mod m)
        let fixed = (0..n).all(|i| {
            let s: i64 = (0..n).map(|j| a_mod[i][j] * k[j]).sum::<i64>() - k[i];
            s.rem_euclid(m) == 0
        });
        if fixed {
            out.push(k.clone());
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Counts connected components of the fixed set of σ on `Rⁿ/Zⁿ` from its
/// points on the grid `(1/d)Zⁿ`.
///
/// A fixed point `x` lies on the identity component exactly when it is twice
/// a fixed point of the finer grid `(1/2d)Zⁿ`: the identity component is a
/// divisible torus, while the other components are translates by classes of
/// order two. Grid points are linked by these identity-component translations
/// and the links are clustered with union-find.
pub fn fixed_grid_components(a: &IntMatrix, d: u64) -> Result<GridFixedSet, OracleError> {
    if !a.is_square() {
        return Err(OracleError::NotSquare);
    }
    if d < 2 || !d.is_multiple_of(2) {
        return Err(OracleError::BadDenominator(d));
    }
    let n = a.rows();
    let too_large = OracleError::GridTooLarge { n, denominator: d, limit: GRID_MAX_POINTS };
    let points = d.checked_pow(n as u32).filter(|&p| p <= GRID_MAX_POINTS).ok_or(too_large.clone())?;
    (2 * d).checked_pow(n as u32).filter(|&p| p <= 64 * GRID_MAX_POINTS).ok_or(too_large)?;

    let fine = 2 * d as i64;
    let reduce = |m: i64| -> Vec<Vec<i64>> {
        (0..n)
            .map(|i| (0..n).map(|j| (&a[(i, j)] % BigInt::from(m)).to_i64().unwrap().rem_euclid(m)).collect())
            .collect()
    };
    let coarse_pts = enumerate_fixed(&reduce(d as i64), d as i64);
    let fine_pts = enumerate_fixed(&reduce(fine), fine);

    let encode = |k: &[i64]| -> usize { k.iter().rev().fold(0usize, |acc, &x| acc * d as usize + x as usize) };
    let mut index = vec![usize::MAX; points as usize];
    for (i, k) in coarse_pts.iter().enumerate() {
        index[encode(k)] = i;
    }
    // y = k/2d on the fine grid gives 2y = k/d, so the coarse coordinates are k mod d.
    let mut identity_component: Vec<Vec<i64>> =
        fine_pts.iter().map(|y| y.iter().map(|&x| x % d as i64).collect()).collect();
    identity_component.sort();
    identity_component.dedup();

    let mut uf = UnionFind::new(coarse_pts.len());
    for (i, x) in coarse_pts.iter().enumerate() {
        for g in &identity_component {
            let y: Vec<i64> = x.iter().zip(g).map(|(a, b)| (a + b).rem_euclid(d as i64)).collect();
            let j = index[encode(&y)];
            assert_ne!(j, usize::MAX, "fixed points form a group");
            uf.union(i, j);
        }
    }
    let components = (0..coarse_pts.len()).filter(|&i| uf.find(i) == i).count() as u64;

    let ratio = fine_pts.len() / coarse_pts.len();
    assert!(ratio.is_power_of_two() && fine_pts.len().is_multiple_of(coarse_pts.len()), "fixed points grow by powers of two");
    Ok(GridFixedSet {
        denominator: d,
        points: coarse_pts.len() as u64,
        refined_points: fine_pts.len() as u64,
        components,
        dimension: ratio.trailing_zeros() as usize,
    })
}

// ---------------------------------------------------------------------------
// Free resolutions over R = Z[t]/(t² − 1)

/// Element `a + b·t` of `R`.
type RElt = (i64, i64);

/// Matrix over `R` acting on column vectors.
#[derive(Clone, Debug)]
struct RMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<RElt>,
}

impl RMatrix {
    fn new(rows: usize, cols: usize, entries: Vec<RElt>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        RMatrix { rows, cols, entries }
    }
}

const T_MINUS_ONE: RElt = (-1, 1);
const T_PLUS_ONE: RElt = (1, 1);

/// Differential `d_k` of the periodic resolution of `Z₊` (`sign = 1`) or
/// `Z₋` (`sign = −1`): `… → R → R → R → Z_± → 0`.
fn periodic_differential(sign: i64, k: usize) -> RElt {
    let first = if sign == 1 { T_MINUS_ONE } else { T_PLUS_ONE };
    let second = if sign == 1 { T_PLUS_ONE } else { T_MINUS_ONE };
    if k % 2 == 1 { first } else { second }
}

/// Differentials `d_1 … d_len` of an explicit free resolution of a basis class.
fn resolution(class: ModuleClass, len: usize) -> Vec<RMatrix> {
    (1..=len)
        .map(|k| match class {
            ModuleClass::FreeR => {
                let rows = usize::from(k == 1);
                RMatrix::new(rows, 0, vec![])
            }
            ModuleClass::TrivZ => RMatrix::new(1, 1, vec![periodic_differential(1, k)]),
            ModuleClass::SignZ => RMatrix::new(1, 1, vec![periodic_differential(-1, k)]),
            // Mapping cone of multiplication by 2 on the resolution P of Z₊:
            // F_k = P_k ⊕ P_{k−1}, d(q, p) = (d q + 2p, −d p).
            ModuleClass::TorF2 => {
                let d = |j| periodic_differential(1, j);
                let neg = |(a, b): RElt| (-a, -b);
                if k == 1 {
                    RMatrix::new(1, 2, vec![d(1), (2, 0)])
                } else {
                    RMatrix::new(2, 2, vec![d(k), (2, 0), (0, 0), neg(d(k - 1))])
                }
            }
        })
        .collect()
}

/// An R-module as an abelian group `Z^gens / relations` with the action of `t`.
struct Presentation {
    t: IntMatrix,
    relations: IntMatrix,
}

impl Presentation {
    fn of(class: ModuleClass) -> Self {
        match class {
            ModuleClass::FreeR => Presentation { t: lattice::swap(), relations: IntMatrix::zeros(2, 0) },
            ModuleClass::TrivZ => Presentation { t: IntMatrix::diag(&[1]), relations: IntMatrix::zeros(1, 0) },
            ModuleClass::SignZ => Presentation { t: IntMatrix::diag(&[-1]), relations: IntMatrix::zeros(1, 0) },
            ModuleClass::TorF2 => Presentation { t: IntMatrix::diag(&[1]), relations: IntMatrix::diag(&[2]) },
        }
    }

    fn gens(&self) -> usize {
        self.t.rows()
    }

    /// Integer matrix of an R-matrix acting on copies of this module.
    fn tensor(&self, m: &RMatrix) -> IntMatrix {
        let g = self.gens();
        let mut out = IntMatrix::zeros(g * m.rows, g * m.cols);
        let id = IntMatrix::identity(g);
        for i in 0..m.rows {
            for j in 0..m.cols {
                let (a, b) = m.entries[i * m.cols + j];
                let block = &id.scale(&BigInt::from(a)) + &self.t.scale(&BigInt::from(b));
                for x in 0..g {
                    for y in 0..g {
                        out[(i * g + x, j * g + y)] = block[(x, y)].clone();
                    }
                }
            }
        }
        out
    }

    fn relations_for(&self, copies: usize) -> IntMatrix {
        IntMatrix::block_diag(&vec![self.relations.clone(); copies])
    }

    fn action_for(&self, copies: usize) -> IntMatrix {
        IntMatrix::block_diag(&vec![self.t.clone(); copies])
    }
}

/// Homology of a complex over R, as an abelian group and as a module of
/// the closed class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionTor {
    pub degree: usize,
    pub group: CokernelShape,
    pub module: RModuleSum,
}

/// Decomposes `Z^k / B` (with `B` spanned by the columns of `coords`) with
/// the action `t` on `Z^k` into the closed module class.
fn quotient_module(coords: &IntMatrix, t: &IntMatrix) -> (CokernelShape, RModuleSum) {
    let k = t.rows();
    let snf = intlin::smith_normal_form(coords);
    let r = snf.rank();
    let group = CokernelShape {
        free_rank: k - r,
        torsion: snf.divisors[..r].iter().filter(|d| !d.is_one()).cloned().collect(),
    };
    let two = BigInt::from(2);
    assert!(group.torsion.iter().all(|d| *d == two), "only F2 torsion occurs in the module class");
    // In the basis given by the columns of U⁻¹ the saturation of B is spanned
    // by the first r vectors; the action on the free quotient is the trailing block.
    let t_new = &(&snf.u * t) * &snf.u_inv;
    let free_action = t_new.trailing_block(r);
    let inv: StructureInvariants = lattice::invariants_of_matrix(&free_action);
    let module = RModuleSum { free_r: inv.c as u64, triv: inv.a as u64, sign: inv.b as u64, tor_f2: group.torsion.len() as u64 };
    (group, module)
}

/// `Tor_degree^R(left, right)` from the explicit resolution of `left`
/// tensored with `right`, homology by Smith normal form. `degree ≤ 2`.
pub fn resolution_tor(left: ModuleClass, right: ModuleClass, degree: usize) -> ResolutionTor {
    assert!(degree <= 2, "resolutions are built up to degree 3");
    let diffs = resolution(left, 3);
    let n = Presentation::of(right);
    let g = n.gens();
    // rank of F_k over R
    let mut ranks = vec![diffs[0].rows];
    ranks.extend(diffs.iter().map(|d| d.cols));

    let m_k = ranks[degree];
    let c_k = g * m_k;
    // Cycles: x with d_k x ∈ relations of C_{k−1}.
    let cycles = if degree == 0 || ranks[degree - 1] == 0 {
        IntMatrix::identity(c_k)
    } else {
        let d_k = n.tensor(&diffs[degree - 1]);
        let rel = n.relations_for(ranks[degree - 1]);
        let kernel = intlin::kernel_basis(&d_k.hstack(&rel));
        intlin::image_basis(&kernel.row_range(0, c_k))
    };
    if cycles.cols() == 0 {
        return ResolutionTor {
            degree,
            group: CokernelShape { free_rank: 0, torsion: vec![] },
            module: RModuleSum::ZERO,
        };
    }
    // Boundaries plus relations of C_k.
    let boundaries = n.tensor(&diffs[degree]).hstack(&n.relations_for(m_k));
    let coords = intlin::solve_in_basis(&cycles, &boundaries).expect("boundaries are cycles");
    let t_cycles = intlin::solve_in_basis(&cycles, &(&n.action_for(m_k) * &cycles)).expect("cycles are t-stable");
    let (group, module) = quotient_module(&coords, &t_cycles);
    ResolutionTor { degree, group, module }
}

/// Localization data of a basis class from its presentation.
fn local_entry(class: ModuleClass, site: SiteKind) -> LocalEntry {
    let p = Presentation::of(class);
    let group = intlin::cokernel(&p.relations);
    let snf = intlin::smith_normal_form(&p.relations);
    let r = snf.rank();
    let free_action = (&(&snf.u * &p.t) * &snf.u_inv).trailing_block(r);
    let k = free_action.rows();
    let eigen_rank = |sign: i64| -> u64 {
        if k == 0 {
            return 0;
        }
        let shifted = &free_action - &IntMatrix::identity(k).scale(&BigInt::from(sign));
        intlin::kernel_basis(&shifted).cols() as u64
    };
    let (plus, minus) = (eigen_rank(1), eigen_rank(-1));
    let even_torsion = group.torsion.iter().filter(|d| (*d % 2u32).is_zero()).count() as u64;
    let odd_torsion = |q: u32| group.torsion.iter().any(|d| (d % q).is_zero());
    let odd_flag = odd_torsion(3);
    assert!([5, 7, 11].iter().all(|&q| odd_torsion(q) == odd_flag), "odd sites agree for every odd prime");
    let (free_rank, torsion_flag, torsion_dim, note) = match site {
        SiteKind::MinPlus => (plus, false, 0, None),
        SiteKind::MinMinus => (minus, false, 0, None),
        SiteKind::OddPlus => (plus, odd_flag, 0, None),
        SiteKind::OddMinus => (minus, odd_flag, 0, None),
        SiteKind::Dyadic => {
            let note = if even_torsion > 0 {
                Some("residue field F2 survives".to_string())
            } else if plus > 0 && minus > 0 {
                Some("free over the local ring, which is not a domain".to_string())
            } else if plus + minus > 0 {
                Some("cyclic, killed by a minimal prime; not free".to_string())
            } else {
                None
            };
            (plus.max(minus), even_torsion > 0, even_torsion, note)
        }
    };
    LocalEntry { class, site, free_rank, torsion_flag, torsion_dim, note }
}

/// Recomputes the module table from resolutions and presentations.
pub fn regenerate_tables() -> TablePayload {
    let products = |degree: usize| -> Vec<ProductEntry> {
        ModuleClass::ALL
            .iter()
            .flat_map(|&left| {
                ModuleClass::ALL.iter().map(move |&right| ProductEntry {
                    left,
                    right,
                    result: resolution_tor(left, right, degree).module,
                })
            })
            .collect()
    };
    let localize = ModuleClass::ALL
        .iter()
        .flat_map(|&c| SiteKind::ALL.iter().map(move |&s| local_entry(c, s)))
        .collect();
    TablePayload {
        format: TABLE_FORMAT.to_string(),
        version: TABLE_VERSION,
        tensor: products(0),
        tor1: products(1),
        localize,
    }
}

/// Kernel and image of `1 − t` on a torsion-free basis class, computed on
/// its lattice. Returns `(kernel, image, index of image in its saturation)`.
pub fn one_minus_t_lattice(class: ModuleClass) -> (RModuleSum, RModuleSum, BigInt) {
    let p = Presentation::of(class);
    assert_eq!(p.relations.cols(), 0, "lattice classes only");
    let g = p.gens();
    let map = &IntMatrix::identity(g) - &p.t;
    let restricted = |basis: &IntMatrix| -> RModuleSum {
        if basis.cols() == 0 {
            return RModuleSum::ZERO;
        }
        let t = intlin::solve_in_basis(basis, &(&p.t * basis)).expect("t-stable");
        let inv = lattice::invariants_of_matrix(&t);
        RModuleSum { free_r: inv.c as u64, triv: inv.a as u64, sign: inv.b as u64, tor_f2: 0 }
    };
    let kernel = intlin::kernel_basis(&map);
    let image = intlin::image_basis(&map);
    let index = if image.cols() == 0 { BigInt::one() } else { intlin::cokernel(&image).torsion_order() };
    (restricted(&kernel), restricted(&image), index)
}

// ---------------------------------------------------------------------------
// Corpora

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusMember {
    pub invariants: StructureInvariants,
    pub matrix: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub n: usize,
    pub seed: u64,
    pub members: Vec<CorpusMember>,
}

/// All `(a, b, c)` with `a + b + 2c = n`, ordered by `c` then descending `a`.
pub fn all_invariants(n: usize) -> Vec<StructureInvariants> {
    let mut out = Vec::new();
    for c in 0..=n / 2 {
        let rest = n - 2 * c;
        for b in 0..=rest {
            out.push(StructureInvariants { a: rest - b, b, c });
        }
    }
    out
}

/// For every `(a, b, c)` of rank `n`, `count` conjugates `P·A·P⁻¹` of the
/// canonical matrix by seeded random unimodular `P`.
pub fn involution_corpus(n: usize, seed: u64, count: usize) -> Corpus {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members = Vec::new();
    for inv in all_invariants(n) {
        let canon = lattice::canonical_matrix(inv);
        for _ in 0..count {
            let (p, q) = intlin::random_unimodular_pair(n, rng.next_u64(), 4 * n + 4, DEFAULT_ENTRY_CAP);
            let matrix = &(&p * &canon) * &q;
            debug_assert!(lattice::validate_involution(&matrix).is_ok());
            members.push(CorpusMember { invariants: inv, matrix });
        }
    }
    Corpus { n, seed, members }
}

impl Corpus {
    /// Largest entry across members, for sizing sanity checks.
    pub fn max_entry(&self) -> BigInt {
        self.members.iter().map(|m| m.matrix.max_abs()).max().unwrap_or_default().abs()
    }
}

// ---------------------------------------------------------------------------
// Sweeps

/// Largest `n` for which [`verify_corpus`] runs the grid oracle.
pub const GRID_SWEEP_MAX_N: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn compare<T: PartialEq + std::fmt::Debug>(check: &str, expected: T, got: T) -> Self {
        let ok = expected == got;
        CheckResult {
            check: check.to_string(),
            outcome: if ok { Outcome::Pass } else { Outcome::Fail },
            detail: (!ok).then(|| format!("expected {expected:?}, oracle gave {got:?}")),
        }
    }

    fn skipped(check: &str, why: &str) -> Self {
        CheckResult { check: check.to_string(), outcome: Outcome::Skipped, detail: Some(why.to_string()) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberVerification {
    pub index: usize,
    pub invariants: StructureInvariants,
    pub class: ActionClass,
    pub scope_flag: ScopeFlag,
    pub ranks: (u64, u64),
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub n: usize,
    pub seed: u64,
    pub members: Vec<MemberVerification>,
    /// Per check name, in first-seen order.
    pub tallies: Vec<(String, Tally)>,
}

impl VerifySummary {
    pub fn all_pass(&self) -> bool {
        self.tallies.iter().all(|(_, t)| t.fail == 0)
    }

    pub fn rational_only_members(&self) -> usize {
        self.members.iter().filter(|m| m.scope_flag == ScopeFlag::RationalOnly).count()
    }
}

fn verify_member(index: usize, member: &CorpusMember, grid_d: u64) -> (MemberVerification, KRankReport) {
    let l = lattice::validate_involution(&member.matrix).expect("corpus members are involutions");
    let n = l.rank();
    let inv = lattice::invariants(&l);
    let mut checks = vec![CheckResult::compare("invariants", member.invariants, inv)];
    let dec = lattice::decompose(&l);
    checks.push(CheckResult::compare("decomposition", true, dec.verify(&l)));

    let trace_route = toruskt::cohomology_invariants(&l);
    checks.push(match exterior_action_invariants(&member.matrix) {
        Ok(c) => CheckResult::compare("exterior", trace_route, c),
        Err(e) => CheckResult::skipped("exterior", &e.to_string()),
    });

    let fixed = toruskt::fixed_set(&l);
    checks.push(if n > GRID_SWEEP_MAX_N {
        CheckResult::skipped("grid", &format!("grid sweep runs for n <= {GRID_SWEEP_MAX_N}"))
    } else {
        match fixed_grid_components(&member.matrix, grid_d) {
            Ok(g) => CheckResult::compare("grid", (fixed.components, fixed.dim), (g.components, g.dimension)),
            Err(e) => CheckResult::skipped("grid", &e.to_string()),
        }
    });

    let delocalized = toruskt::k_ranks_delocalized(&l);
    let integral = toruskt::integral_k_theory(&l);
    checks.push(CheckResult::compare("integral-vs-delocalized", (delocalized.k0, delocalized.k1), (integral.k0, integral.k1)));
    checks.push(match toruskt::kunneth_assembly(&l) {
        Ok(k) => CheckResult::compare("kunneth", (delocalized.k0, delocalized.k1), (k.k0, k.k1)),
        Err(e) => CheckResult::skipped("kunneth", &e.to_string()),
    });
    checks.push(match &integral.torsion_free_certificate {
        Some(c) if integral.scope_flag == ScopeFlag::Validated => {
            CheckResult::compare("torsion-free-certificate", true, c.certifies_torsion_free())
        }
        _ => CheckResult::skipped("torsion-free-certificate", "rational ranks only"),
    });
    checks.push(CheckResult::compare("hexagon", 0i128, toruskt::hexagon_defect(&l)));

    let m = MemberVerification {
        index,
        invariants: inv,
        class: lattice::classify(&l),
        scope_flag: integral.scope_flag,
        ranks: (integral.k0, integral.k1),
        checks,
    };
    (m, integral)
}

/// Runs every oracle on every corpus member in parallel, then checks that
/// members with the same invariants produce identical reports.
pub fn verify_corpus(corpus: &Corpus, grid_d: u64) -> VerifySummary {
    let results: Vec<(MemberVerification, KRankReport)> = corpus
        .members
        .par_iter()
        .enumerate()
        .map(|(i, m)| verify_member(i, m, grid_d))
        .collect();

    let mut first: HashMap<StructureInvariants, usize> = HashMap::new();
    let mut members = Vec::with_capacity(results.len());
    for (i, (mut m, report)) in results.iter().cloned().enumerate() {
        let j = *first.entry(m.invariants).or_insert(i);
        m.checks.push(if j == i {
            CheckResult::skipped("conjugation-invariance", "first member of its class")
        } else {
            let same = results[j].1 == report;
            CheckResult {
                check: "conjugation-invariance".to_string(),
                outcome: if same { Outcome::Pass } else { Outcome::Fail },
                detail: (!same).then(|| format!("report differs from member {j}")),
            }
        });
        members.push(m);
    }

    let mut tallies: Vec<(String, Tally)> = Vec::new();
    for c in members.iter().flat_map(|m| &m.checks) {
        let pos = match tallies.iter().position(|(name, _)| *name == c.check) {
            Some(p) => p,
            None => {
                tallies.push((c.check.clone(), Tally::default()));
                tallies.len() - 1
            }
        };
        let t = &mut tallies[pos].1;
        match c.outcome {
            Outcome::Pass => t.pass += 1,
            Outcome::Fail => t.fail += 1,
            Outcome::Skipped => t.skipped += 1,
        }
    }
    VerifySummary { n: corpus.n, seed: corpus.seed, members, tallies }
}
