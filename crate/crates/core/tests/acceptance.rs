//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//!     cargo test -p crystalk-core --test acceptance

use std::time::{Duration, Instant};

use crystalk_core::lattice::{self, validate_involution};
use crystalk_core::oracle::{self, Corpus};
use crystalk_core::repring::{ModuleClass, BUILTIN_TABLE};
use crystalk_core::toruskt;
use crystalk_core::{ActionClass, CokernelShape, IntMatrix, InvolutiveLattice, ScopeFlag, StructureInvariants};
use rayon::prelude::*;

const SEED: u64 = 20_240_917;
const CONJUGATES: usize = 25;

type Check = Result<String, String>;
/// Invariants, delocalized ranks, Künneth ranks when applicable.
type RouteRow = (StructureInvariants, (u64, u64), Option<(u64, u64)>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn lat(m: IntMatrix) -> InvolutiveLattice {
    validate_involution(&m).expect("involution")
}

fn minus_identity(n: usize) -> InvolutiveLattice {
    lat(IntMatrix::diag(&vec![-1i64; n]))
}

fn split_diag(r: usize, n: usize) -> InvolutiveLattice {
    let mut d = vec![1i64; r];
    d.resize(n, -1);
    lat(IntMatrix::diag(&d))
}

fn corpora(ns: std::ops::RangeInclusive<usize>) -> Vec<Corpus> {
    ns.map(|n| oracle::involution_corpus(n, SEED + n as u64, CONJUGATES)).collect()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    for n in 1..=10 {
        let c = toruskt::group_cstar_k(&minus_identity(n));
        let want = 3u64 << (n - 1);
        ensure((c.k0, c.k1) == (want, 0), || format!("n = {n}: got ({}, {}), want ({want}, 0)", c.k0, c.k1))?;
        ensure(c.scope_flag == ScopeFlag::Validated && c.dualized, || format!("n = {n}: not validated"))?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("-I_n, n = 1..10, K0 = 3*2^(n-1), K1 = 0 in {:.2?}", start.elapsed()))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let mut cases = 0;
    for n in 2..=10 {
        for r in 1..n {
            let l = split_diag(r, n);
            let want = 3u64 << (n - 2);
            let d = toruskt::k_ranks_delocalized(&l);
            let k = toruskt::kunneth_assembly(&l).map_err(|e| e.to_string())?;
            ensure((d.k0, d.k1) == (want, want), || format!("n = {n}, r = {r}: delocalized ({}, {})", d.k0, d.k1))?;
            ensure((k.k0, k.k1) == (want, want), || format!("n = {n}, r = {r}: kunneth ({}, {})", k.k0, k.k1))?;
            let cert = k.torsion_free_certificate.ok_or("missing certificate")?;
            ensure(cert.certifies_torsion_free(), || format!("n = {n}, r = {r}: certificate"))?;
            cases += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("{cases} split lattices, both routes 3*2^(n-2) with certificates in {:.2?}", start.elapsed()))
}

fn criterion_3() -> Check {
    let l = lat(IntMatrix::diag(&[-1]));
    let c = toruskt::group_cstar_k(&l);
    ensure((c.k0, c.k1) == (3, 0), || format!("got ({}, {})", c.k0, c.k1))?;
    ensure(c.scope_flag == ScopeFlag::Validated && c.dualized, || "not validated".into())?;
    let k = toruskt::integral_k_theory(&l);
    let m = k.module_structure.ok_or("missing module structure")?;
    ensure(m.k0.to_string() == "Z+ + Z-^2" && m.k1.is_zero(), || format!("module structure {} / {}", m.k0, m.k1))?;
    Ok("n = 1, A = (-1): K0 = Z^3, K1 = 0".into())
}

fn criterion_4(corpora: &[Corpus]) -> Check {
    let start = Instant::now();
    let mut split = 0usize;
    let mut members = 0usize;
    for corpus in corpora {
        let results: Vec<RouteRow> = corpus
            .members
            .par_iter()
            .map(|m| {
                let l = lat(m.matrix.clone());
                let d = toruskt::k_ranks_delocalized(&l);
                let k = toruskt::kunneth_assembly(&l).ok().map(|k| (k.k0, k.k1));
                (m.invariants, (d.k0, d.k1), k)
            })
            .collect();
        for (inv, d, k) in &results {
            let reference = results.iter().find(|r| r.0 == *inv).unwrap().1;
            ensure(*d == reference, || format!("n = {}, {inv}: {d:?} vs {reference:?}", corpus.n))?;
            let mixed_split = inv.c == 0 && inv.a > 0 && inv.b > 0;
            ensure(k.is_some() == mixed_split, || format!("{inv}: kunneth applicability"))?;
            if let Some(k) = k {
                ensure(k == d, || format!("{inv}: kunneth {k:?} vs delocalized {d:?}"))?;
                split += 1;
            }
            members += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{members} members n <= 6 ({split} split): routes agree, conjugation invariant, in {:.2?}", start.elapsed()))
}

fn criterion_5(small: &[Corpus]) -> Check {
    let start = Instant::now();
    let large = corpora(7..=8);
    let mut exterior = 0usize;
    let mut grid = 0usize;
    for corpus in small.iter().chain(&large) {
        let failures: Vec<String> = corpus
            .members
            .par_iter()
            .filter_map(|m| {
                let l = lat(m.matrix.clone());
                let e = match oracle::exterior_action_invariants(&m.matrix) {
                    Ok(e) => e,
                    Err(err) => return Some(err.to_string()),
                };
                if e != toruskt::cohomology_invariants(&l) {
                    return Some(format!("exterior mismatch at {}", m.invariants));
                }
                if corpus.n <= 6 {
                    let g = match oracle::fixed_grid_components(&m.matrix, 4) {
                        Ok(g) => g,
                        Err(err) => return Some(err.to_string()),
                    };
                    let f = toruskt::fixed_set(&l);
                    if (g.components, g.dimension) != (f.components, f.dim) {
                        return Some(format!("grid mismatch at {}", m.invariants));
                    }
                }
                None
            })
            .collect();
        ensure(failures.is_empty(), || failures.join("; "))?;
        exterior += corpus.members.len();
        if corpus.n <= 6 {
            grid += corpus.members.len();
        }
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("exterior oracle on {exterior} members n <= 8, grid oracle on {grid} members n <= 6, in {:.2?}", start.elapsed()))
}

fn criterion_6() -> Check {
    let regenerated = oracle::regenerate_tables().to_file_string();
    ensure(regenerated == BUILTIN_TABLE, || "regenerated table differs from the frozen file".into())?;
    let z2 = CokernelShape { free_rank: 0, torsion: vec![2.into()] };
    let t = oracle::resolution_tor(ModuleClass::TrivZ, ModuleClass::TrivZ, 1).group;
    ensure(t == z2, || format!("Tor1(R/I, R/I) = {t:?}"))?;
    let t = oracle::resolution_tor(ModuleClass::TrivZ, ModuleClass::SignZ, 1).group;
    ensure(t.free_rank == 0 && t.torsion.is_empty(), || format!("Tor1(R/I, R/J) = {t:?}"))?;
    Ok(format!("tables regenerate byte-identically ({} bytes); Tor1(R/I,R/I) = Z/2, Tor1(R/I,R/J) = 0", BUILTIN_TABLE.len()))
}

fn criterion_7(corpora: &[Corpus]) -> Check {
    let mut runs = 0usize;
    let mut shapes = 0usize;
    let split_members = corpora
        .iter()
        .flat_map(|c| &c.members)
        .map(|m| lat(m.matrix.clone()))
        .chain((2..=10).flat_map(|n| (1..n).map(move |r| split_diag(r, n))));
    for l in split_members {
        if lattice::classify(&l) != ActionClass::MixedSplit {
            continue;
        }
        let k = toruskt::integral_k_theory(&l);
        let cert = k.torsion_free_certificate.ok_or("MixedSplit run without certificate")?;
        let local = cert.localized_shapes();
        ensure(!local.is_empty() && local.iter().all(|s| !s.torsion_flag), || {
            format!("torsion at {:?}", local.iter().filter(|s| s.torsion_flag).map(|s| s.site).collect::<Vec<_>>())
        })?;
        let zt = cert.step("zt_argument").ok_or("missing zt_argument step")?;
        ensure(zt.output["all_localizations_torsion_free"] == true, || "zt_argument flag false".into())?;
        runs += 1;
        shapes += local.len();
    }
    Ok(format!("{runs} MixedSplit runs, {shapes} localized modules, none with torsion"))
}

fn criterion_8(corpora: &[Corpus]) -> Check {
    let mut count = 0usize;
    for m in corpora.iter().flat_map(|c| &c.members) {
        let d = toruskt::hexagon_defect(&lat(m.matrix.clone()));
        ensure(d == 0, || format!("defect {d} at {}", m.invariants))?;
        count += 1;
    }
    Ok(format!("alternating rank sum vanishes on {count} members n <= 6"))
}

fn criterion_9(corpora: &[Corpus]) -> Check {
    let swap = lat(lattice::swap());
    let d = toruskt::k_ranks_delocalized(&swap);
    let e = oracle::exterior_action_invariants(swap.matrix()).map_err(|e| e.to_string())?;
    let (f0, f1) = toruskt::fixed_set(&swap).k_ranks();
    let ext = (e.even_inv + f0, e.odd_inv + f1);
    ensure((d.k0, d.k1) == (2, 2) && ext == (2, 2), || format!("delocalized ({}, {}), exterior {ext:?}", d.k0, d.k1))?;
    let c = toruskt::group_cstar_k(&swap);
    ensure((c.k0, c.k1) == (2, 2), || format!("cstar ({}, {})", c.k0, c.k1))?;
    ensure(c.scope_flag == ScopeFlag::RationalOnly && !c.dualized, || "swap not flagged RationalOnly".into())?;
    let caveat = c.caveat.ok_or("missing caveat")?;
    ensure(caveat.contains("3*2^(n-2)") && caveat.contains("does not apply"), || format!("caveat: {caveat}"))?;
    ensure(toruskt::kunneth_assembly(&swap).is_err(), || "kunneth accepted the swap".into())?;

    // Same agreement on every lattice with a regular summand in the corpora.
    let mut agreed = 0usize;
    for m in corpora.iter().flat_map(|c| &c.members).filter(|m| m.invariants.c > 0) {
        let l = lat(m.matrix.clone());
        let d = toruskt::k_ranks_delocalized(&l);
        let e = oracle::exterior_action_invariants(l.matrix()).map_err(|e| e.to_string())?;
        let (f0, f1) = toruskt::fixed_set(&l).k_ranks();
        ensure((d.k0, d.k1) == (e.even_inv + f0, e.odd_inv + f1), || format!("disagreement at {}", m.invariants))?;
        ensure(toruskt::group_cstar_k(&l).scope_flag == ScopeFlag::RationalOnly, || "scope flag".into())?;
        agreed += 1;
    }
    Ok(format!("swap gives (2, 2) from both rational routes, RationalOnly with caveat; {agreed} more c >= 1 members agree"))
}

fn main() {
    let total = Instant::now();
    let small = corpora(1..=6);
    #[allow(clippy::type_complexity)]
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("free case", Box::new(criterion_1)),
        ("split mixed case", Box::new(criterion_2)),
        ("infinite dihedral", Box::new(criterion_3)),
        ("route agreement", Box::new(|| criterion_4(&small))),
        ("oracle equivalence", Box::new(|| criterion_5(&small))),
        ("module tables", Box::new(criterion_6)),
        ("torsion-free certificates", Box::new(|| criterion_7(&small))),
        ("hexagon ranks", Box::new(|| criterion_8(&small))),
        ("out-of-scope honesty", Box::new(|| criterion_9(&small))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(msg) => println!("criterion {}: PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass in {:.2?}", criteria.len() - failed, criteria.len(), total.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
