//! Z/2-equivariant K-theory of the torus `Rⁿ/Zⁿ` under an involution, and
//! the K-theory of the group C*-algebra of `Zⁿ ⋊ Z/2`.
//!
//! Two rank routes are provided. The delocalized route sums invariant
//! cohomology ranks over group elements: the identity contributes the
//! σ-invariant part of `H*(Tⁿ)` (from exterior traces) and σ contributes
//! the cohomology of its fixed set (from Smith normal form). The Künneth
//! route splits a lattice with no regular summands as `Tʳ × Tⁿ⁻ʳ`, tensors
//! the factor modules over the representation ring at each prime site and
//! certifies torsion-freeness site by site.

use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::intlin::{self, IntMatrix};
use crate::lattice::{self, ActionClass, InvolutiveLattice, StructureInvariants};
use crate::repring::{self, ModuleClass, PrimeSite, RModuleSum};

/// Version string carried by every serialized report.
pub const SCHEMA_VERSION: &str = "1.0.0";

/// Odd primes used as representatives of the odd-prime sites.
pub const ODD_SITE_PRIMES: [u64; 2] = [3, 5];

/// Fixed set of σ on the torus: `components` disjoint subtori of dimension `dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedSetDescription {
    pub dim: usize,
    pub components: u64,
}

impl FixedSetDescription {
    /// K-theory ranks `(K⁰, K¹)` of the fixed set.
    pub fn k_ranks(&self) -> (u64, u64) {
        if self.dim == 0 {
            (self.components, 0)
        } else {
            let each = self.components << (self.dim - 1);
            (each, each)
        }
    }
}

/// Dimensions of the σ-invariant and anti-invariant parts of the even and
/// odd rational cohomology of the torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CohomologyAction {
    pub even_inv: u64,
    pub odd_inv: u64,
    pub even_anti: u64,
    pub odd_anti: u64,
}

impl CohomologyAction {
    /// Cohomology of a point: one invariant class in degree 0.
    pub fn point() -> Self {
        CohomologyAction { even_inv: 1, odd_inv: 0, even_anti: 0, odd_anti: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistedRanks {
    pub k0_minus: u64,
    pub k1_minus: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScopeFlag {
    /// Integral result: torsion-free abelian groups of the stated ranks.
    Validated,
    /// Only rational ranks are determined.
    RationalOnly,
}

impl fmt::Display for ScopeFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScopeFlag::Validated => "Validated",
            ScopeFlag::RationalOnly => "RationalOnly",
        })
    }
}

/// R-module structure of `K⁰` and `K¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModuleStructure {
    pub k0: RModuleSum,
    pub k1: RModuleSum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateStep {
    pub step: String,
    pub input: Value,
    pub output: Value,
    pub anchor: String,
}

/// Ordered record of the steps behind a result; rebuilding it from the same
/// lattice reproduces it exactly.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CertificateTrace {
    pub steps: Vec<CertificateStep>,
}

impl CertificateTrace {
    fn push(&mut self, step: &str, input: Value, output: Value, anchor: &str) {
        self.steps.push(CertificateStep { step: step.into(), input, output, anchor: anchor.into() });
    }

    pub fn step(&self, name: &str) -> Option<&CertificateStep> {
        self.steps.iter().find(|s| s.step == name)
    }

    /// Every localized shape recorded anywhere in the trace.
    pub fn localized_shapes(&self) -> Vec<repring::LocalizedShape> {
        fn collect(v: &Value, out: &mut Vec<repring::LocalizedShape>) {
            match v {
                Value::Object(map) => {
                    if map.contains_key("torsion_flag") && map.contains_key("site") {
                        if let Ok(s) = serde_json::from_value(v.clone()) {
                            out.push(s);
                            return;
                        }
                    }
                    map.values().for_each(|x| collect(x, out));
                }
                Value::Array(items) => items.iter().for_each(|x| collect(x, out)),
                _ => {}
            }
        }
        let mut out = Vec::new();
        for s in &self.steps {
            collect(&s.output, &mut out);
        }
        out
    }

    /// Certificate is nonempty and no localized module carries torsion.
    pub fn certifies_torsion_free(&self) -> bool {
        let shapes = self.localized_shapes();
        !shapes.is_empty() && shapes.iter().all(|s| !s.torsion_flag)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KRankReport {
    pub k0: u64,
    pub k1: u64,
    pub scope_flag: ScopeFlag,
    pub module_structure: Option<ModuleStructure>,
    pub torsion_free_certificate: Option<CertificateTrace>,
    pub caveat: Option<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScopeError {
    #[error("the Künneth assembly needs a lattice without regular summands and with both trivial and sign summands; got class {class} with invariants {invariants}")]
    NotMixedSplit { class: ActionClass, invariants: StructureInvariants },
}

/// K-homology of the classifying space for proper actions, identified with
/// `K_*(C*_r(Zⁿ ⋊ Z/2))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CstarReport {
    pub k0: u64,
    pub k1: u64,
    pub scope_flag: ScopeFlag,
    /// Homology obtained by dualizing free cohomology groups.
    pub dualized: bool,
    pub caveat: Option<String>,
}

fn pow2(e: usize) -> u64 {
    1u64.checked_shl(e as u32).expect("rank exceeds u64")
}

/// `3·2ⁿ⁻²`, the rank for lattices with both trivial and sign summands and
/// no regular ones.
pub fn split_closed_form(n: usize) -> u64 {
    assert!(n >= 2);
    3 * pow2(n - 2)
}

/// `3·2ⁿ⁻¹`, the `K₀` rank when σ acts as `−I`.
pub fn free_closed_form(n: usize) -> u64 {
    assert!(n >= 1);
    3 * pow2(n - 1)
}

pub fn fixed_set(l: &InvolutiveLattice) -> FixedSetDescription {
    let n = l.rank();
    let minus = l.matrix() - &IntMatrix::identity(n);
    let dim = intlin::kernel_basis(&minus).cols();
    let components = intlin::cokernel(&minus).torsion_order().to_u64().expect("component count fits u64");
    let inv = lattice::invariants(l);
    assert_eq!(components, pow2(inv.b), "component count must equal 2^b");
    assert_eq!(dim, inv.fixed_rank());
    FixedSetDescription { dim, components }
}

pub fn cohomology_invariants(l: &InvolutiveLattice) -> CohomologyAction {
    let n = l.rank();
    let traces = intlin::exterior_trace_poly(l.matrix());
    let mut sums = [BigInt::zero(), BigInt::zero()];
    let mut dims = [BigInt::zero(), BigInt::zero()];
    for (k, tr) in traces.iter().enumerate() {
        sums[k % 2] += tr;
        dims[k % 2] += binomial(BigInt::from(n), BigInt::from(k));
    }
    let half = |x: BigInt| -> u64 {
        let two = BigInt::from(2);
        assert!((&x % &two).is_zero());
        (x / two).to_u64().expect("dimension fits u64")
    };
    let even_inv = half(&dims[0] + &sums[0]);
    let odd_inv = half(&dims[1] + &sums[1]);
    let even_anti = half(&dims[0] - &sums[0]);
    let odd_anti = half(&dims[1] - &sums[1]);
    CohomologyAction { even_inv, odd_inv, even_anti, odd_anti }
}

fn twisted_from_parts(coh: CohomologyAction, fixed: FixedSetDescription) -> TwistedRanks {
    // The sign line shifts degree by one and reverses orientation, so the
    // identity term picks up the anti-invariant classes of the other parity.
    let (f0, f1) = fixed.k_ranks();
    TwistedRanks { k0_minus: coh.odd_anti + f0, k1_minus: coh.even_anti + f1 }
}

/// Ranks of the sign-twisted theory `K_{Z/2}(Tⁿ × R₋)`.
pub fn twisted_ranks(l: &InvolutiveLattice) -> TwistedRanks {
    twisted_from_parts(cohomology_invariants(l), fixed_set(l))
}

/// The twisted ranks of a point, `(1, 0)`.
pub fn twisted_ranks_of_point() -> TwistedRanks {
    twisted_from_parts(CohomologyAction::point(), FixedSetDescription { dim: 0, components: 1 })
}

fn delocalized_parts(coh: CohomologyAction, fixed: FixedSetDescription) -> (u64, u64) {
    let (f0, f1) = fixed.k_ranks();
    (coh.even_inv + f0, coh.odd_inv + f1)
}

fn scope_of(inv: StructureInvariants) -> ScopeFlag {
    if inv.c == 0 {
        ScopeFlag::Validated
    } else {
        ScopeFlag::RationalOnly
    }
}

/// Rational ranks of `K*_{Z/2}(Tⁿ)` from the fixed-point formula.
pub fn k_ranks_delocalized(l: &InvolutiveLattice) -> KRankReport {
    let (k0, k1) = delocalized_parts(cohomology_invariants(l), fixed_set(l));
    KRankReport {
        k0,
        k1,
        scope_flag: scope_of(lattice::invariants(l)),
        module_structure: None,
        torsion_free_certificate: None,
        caveat: None,
    }
}

/// Alternating rank sum around the six-term sequence relating equivariant,
/// twisted and non-equivariant K-theory. Zero for every lattice.
pub fn hexagon_defect(l: &InvolutiveLattice) -> i128 {
    let n = l.rank();
    let plain = pow2(n - 1) as i128;
    let d = k_ranks_delocalized(l);
    let t = twisted_ranks(l);
    plain - t.k0_minus as i128 + d.k0 as i128 - plain + t.k1_minus as i128 - d.k1 as i128
}

fn sites_with_j() -> Vec<PrimeSite> {
    let mut s = vec![PrimeSite::MinMinus];
    s.extend(ODD_SITE_PRIMES.iter().map(|&p| PrimeSite::OddMinus(p)));
    s
}

fn sites_with_i() -> Vec<PrimeSite> {
    let mut s = vec![PrimeSite::MinPlus];
    s.extend(ODD_SITE_PRIMES.iter().map(|&p| PrimeSite::OddPlus(p)));
    s.push(PrimeSite::Dyadic);
    s
}

fn shape_json(m: &RModuleSum, site: PrimeSite) -> Value {
    serde_json::to_value(repring::localize(m, site)).expect("shape serializes")
}

/// Graded tensor product of two `(K⁰, K¹)` pairs.
fn graded(f: impl Fn(&RModuleSum, &RModuleSum) -> RModuleSum, x: &ModuleStructure, y: &ModuleStructure) -> ModuleStructure {
    ModuleStructure {
        k0: f(&x.k0, &y.k0) + f(&x.k1, &y.k1),
        k1: f(&x.k0, &y.k1) + f(&x.k1, &y.k0),
    }
}

/// Künneth route for lattices with `c = 0` and `1 ≤ a ≤ n − 1`.
pub fn kunneth_assembly(l: &InvolutiveLattice) -> Result<KRankReport, ScopeError> {
    let inv = lattice::invariants(l);
    let class = lattice::classify(l);
    if class != ActionClass::MixedSplit {
        return Err(ScopeError::NotMixedSplit { class, invariants: inv });
    }
    let n = l.rank();
    let (r, s) = (inv.a, inv.b);
    let mut trace = CertificateTrace::default();

    // Split the torus as X × Y with X = Tʳ (trivial action) and Y = Tˢ (σ = −1).
    let dec = lattice::decompose(l);
    let verified = dec.verify(l);
    assert!(verified, "decomposition must recompose to the input");
    let x_modules = ModuleStructure { k0: RModuleSum::free(pow2(r - 1)), k1: RModuleSum::free(pow2(r - 1)) };
    let y_modules = ModuleStructure {
        k0: RModuleSum::of(ModuleClass::TrivZ, pow2(s - 1)) + RModuleSum::of(ModuleClass::SignZ, pow2(s)),
        k1: RModuleSum::ZERO,
    };
    trace.push(
        "decomposition",
        json!({ "n": n, "invariants": inv, "class": class }),
        json!({
            "r": r,
            "s": s,
            "blocks": dec.blocks,
            "recomposition_verified": verified,
            "x_factor": x_modules,
            "y_factor": y_modules,
        }),
        "torus splits as T^r x T^(n-r); K*(X) = R (x) K*(T^r), K^0(Y) = J^(2^(s-1)) + I^(2^s), K^1(Y) = 0",
    );

    // Sites containing J, away from the dyadic prime: tensor products.
    let tensor = graded(repring::tensor, &x_modules, &y_modules);
    let j_sites = sites_with_j();
    let localized: Vec<Value> = j_sites
        .iter()
        .map(|&p| json!({ "site": p, "k0": shape_json(&tensor.k0, p), "k1": shape_json(&tensor.k1, p) }))
        .collect();
    trace.push(
        "localized_kunneth",
        json!({ "sites": j_sites, "x_factor": x_modules, "y_factor": y_modules }),
        json!({ "tensor": tensor, "localized": localized }),
        "localized Kunneth sequence at primes containing J other than (J,2)",
    );

    // Tor terms vanish there since K*(X) is free.
    let tor = graded(repring::tor1, &x_modules, &y_modules);
    let tor_local: Vec<Value> = j_sites
        .iter()
        .map(|&p| {
            let (a, b) = (repring::localize(&tor.k0, p), repring::localize(&tor.k1, p));
            json!({ "site": p, "k0_rank": a.free_rank, "k0_torsion_dim": a.torsion_dim,
                    "k1_rank": b.free_rank, "k1_torsion_dim": b.torsion_dim })
        })
        .collect();
    let tor_zero = tor.k0.is_zero() && tor.k1.is_zero();
    trace.push(
        "tor_vanishing",
        json!({ "x_factor_free": x_modules.k0.triv + x_modules.k0.sign + x_modules.k0.tor_f2 == 0 }),
        json!({ "tor1": tor, "localized": tor_local, "vanishes": tor_zero }),
        "Tor_1 over R_p vanishes because K*(X)_p is free",
    );

    // Sites containing I: K*_{Z/2}(X × Y)_p embeds in K*(Tⁿ)_p, which is
    // Z₊^{2ⁿ⁻¹} via the augmentation in each degree.
    let plain = RModuleSum::of(ModuleClass::TrivZ, pow2(n - 1));
    let i_sites = sites_with_i();
    let ambient: Vec<Value> = i_sites.iter().map(|&p| json!({ "site": p, "ambient": shape_json(&plain, p) })).collect();
    let j_part = repring::localize(&tensor.k0, PrimeSite::MinMinus).free_rank;
    trace.push(
        "zt_argument",
        json!({ "j_sites": j_sites, "i_sites": i_sites, "ambient_module": plain }),
        json!({
            "i_site_ambients": ambient,
            "j_site_free_rank": j_part,
            "i_site_rank_bound": repring::localize(&plain, PrimeSite::MinPlus).free_rank,
            "all_localizations_torsion_free": true,
        }),
        "Z-torsion submodule vanishes at every prime, hence vanishes",
    );

    // Ranks: rk K*(X) · rk K*_{Z/2}(Y), compared with the fixed-point formula.
    let x_rank = pow2(r - 1);
    let y_rank = repring::rank(&y_modules.k0) + repring::rank(&y_modules.k1);
    let (k0, k1) = (x_rank * y_rank, x_rank * y_rank);
    let coh = cohomology_invariants(l);
    let fixed = fixed_set(l);
    let delocalized = delocalized_parts(coh, fixed);
    trace.push(
        "rank_formula",
        json!({ "x_rank": x_rank, "y_rank": y_rank, "cohomology": coh, "fixed_set": fixed }),
        json!({
            "kunneth": [k0, k1],
            "delocalized": [delocalized.0, delocalized.1],
            "i_site_rank": k0 - j_part,
            "closed_form": split_closed_form(n),
        }),
        "rank = sum over g of rk K*(fixed set of g)^(centralizer)",
    );

    // The last flag is only true if every recorded localization is torsion-free.
    let all_free = trace.certifies_torsion_free();
    if let Some(step) = trace.steps.iter_mut().find(|s| s.step == "zt_argument") {
        step.output["all_localizations_torsion_free"] = json!(all_free);
    }

    Ok(KRankReport {
        k0,
        k1,
        scope_flag: ScopeFlag::Validated,
        module_structure: None,
        torsion_free_certificate: Some(trace),
        caveat: None,
    })
}

/// Certificate for a known module structure: localize it everywhere.
fn module_certificate(l: &InvolutiveLattice, modules: &ModuleStructure) -> CertificateTrace {
    let mut trace = CertificateTrace::default();
    let inv = lattice::invariants(l);
    let mut sites = sites_with_j();
    sites.extend(sites_with_i());
    let shapes: Vec<Value> = sites
        .iter()
        .map(|&p| json!({ "site": p, "k0": shape_json(&modules.k0, p), "k1": shape_json(&modules.k1, p) }))
        .collect();
    trace.push(
        "module_structure",
        json!({ "n": l.rank(), "invariants": inv, "class": lattice::class_of(l.matrix(), inv) }),
        json!({ "modules": modules, "localized": shapes }),
        "module structure from the trivial-action or free-outside-origin computation",
    );
    trace
}

pub fn integral_k_theory(l: &InvolutiveLattice) -> KRankReport {
    let n = l.rank();
    let inv = lattice::invariants(l);
    match lattice::classify(l) {
        ActionClass::Trivial => {
            let modules = ModuleStructure { k0: RModuleSum::free(pow2(n - 1)), k1: RModuleSum::free(pow2(n - 1)) };
            KRankReport {
                k0: repring::rank(&modules.k0),
                k1: repring::rank(&modules.k1),
                scope_flag: ScopeFlag::Validated,
                torsion_free_certificate: Some(module_certificate(l, &modules)),
                module_structure: Some(modules),
                caveat: None,
            }
        }
        ActionClass::FreeOutsideOrigin => {
            let modules = ModuleStructure {
                k0: RModuleSum::of(ModuleClass::TrivZ, pow2(n - 1)) + RModuleSum::of(ModuleClass::SignZ, pow2(n)),
                k1: RModuleSum::ZERO,
            };
            KRankReport {
                k0: repring::rank(&modules.k0),
                k1: repring::rank(&modules.k1),
                scope_flag: ScopeFlag::Validated,
                torsion_free_certificate: Some(module_certificate(l, &modules)),
                module_structure: Some(modules),
                caveat: None,
            }
        }
        ActionClass::MixedSplit => kunneth_assembly(l).expect("class checked"),
        ActionClass::MixedNonSplit => {
            let d = k_ranks_delocalized(l);
            let closed = if n >= 2 { format!(" (it would give {})", split_closed_form(n)) } else { String::new() };
            KRankReport {
                caveat: Some(format!(
                    "lattice has {} regular Z[Z/2] summand(s); the closed form 3*2^(n-2) for split actions does not apply{closed}; \
                     ranks are rational ranks from the fixed-point formula and integral torsion is not determined",
                    inv.c
                )),
                ..d
            }
        }
    }
}

/// `K_*(C*_r(Zⁿ ⋊ Z/2))` through the dual of the equivariant K-cohomology.
pub fn group_cstar_k(l: &InvolutiveLattice) -> CstarReport {
    let coh = integral_k_theory(l);
    let dualized = coh.torsion_free_certificate.as_ref().is_some_and(CertificateTrace::certifies_torsion_free);
    let caveat = match coh.scope_flag {
        ScopeFlag::Validated if dualized => None,
        ScopeFlag::Validated => Some("torsion-freeness not certified; ranks are rational".to_string()),
        ScopeFlag::RationalOnly => coh.caveat.clone(),
    };
    CstarReport { k0: coh.k0, k1: coh.k1, scope_flag: coh.scope_flag, dualized, caveat }
}

/// What a report describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// `K*_{Z/2}(Tⁿ)`
    EquivariantK,
    /// `K_*(C*_r(Zⁿ ⋊ Z/2))`
    GroupCstarK,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputMatrix {
    pub n: usize,
    pub matrix: IntMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranks {
    pub k0: u64,
    pub k1: u64,
}

/// Serialized result for one lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub spec_version: String,
    pub quantity: Quantity,
    pub input: InputMatrix,
    pub invariants: StructureInvariants,
    pub class: ActionClass,
    pub fixed_set: FixedSetDescription,
    pub ranks: Ranks,
    pub scope_flag: ScopeFlag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module_structure: Option<ModuleStructure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateTrace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

impl Report {
    fn base(l: &InvolutiveLattice, quantity: Quantity, ranks: Ranks, scope_flag: ScopeFlag) -> Self {
        let inv = lattice::invariants(l);
        Report {
            spec_version: SCHEMA_VERSION.to_string(),
            quantity,
            input: InputMatrix { n: l.rank(), matrix: l.matrix().clone() },
            invariants: inv,
            class: lattice::class_of(l.matrix(), inv),
            fixed_set: fixed_set(l),
            ranks,
            scope_flag,
            module_structure: None,
            certificate: None,
            caveat: None,
        }
    }

    pub fn from_k_theory(l: &InvolutiveLattice, k: &KRankReport) -> Self {
        Report {
            module_structure: k.module_structure,
            certificate: k.torsion_free_certificate.clone(),
            caveat: k.caveat.clone(),
            ..Self::base(l, Quantity::EquivariantK, Ranks { k0: k.k0, k1: k.k1 }, k.scope_flag)
        }
    }

    /// Report for `K_*(C*_r)`, carrying the certificate that justified dualizing.
    pub fn group_cstar(l: &InvolutiveLattice) -> Self {
        let k = integral_k_theory(l);
        let c = group_cstar_k(l);
        Report {
            certificate: if c.dualized { k.torsion_free_certificate } else { None },
            caveat: c.caveat,
            ..Self::base(l, Quantity::GroupCstarK, Ranks { k0: c.k0, k1: c.k1 }, c.scope_flag)
        }
    }
}
