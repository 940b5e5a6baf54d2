use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use crystalk_core::intlin::{self, random_unimodular_pair, DEFAULT_ENTRY_CAP};
use crystalk_core::lattice::{self, canonical_matrix, validate_involution};
use crystalk_core::{oracle, toruskt, InvolutiveLattice, StructureInvariants};

fn conjugated(inv: StructureInvariants, seed: u64) -> InvolutiveLattice {
    let n = inv.rank();
    let (p, q) = random_unimodular_pair(n, seed, 4 * n + 4, DEFAULT_ENTRY_CAP);
    validate_involution(&(&(&p * &canonical_matrix(inv)) * &q)).unwrap()
}

fn mixed(n: usize) -> InvolutiveLattice {
    conjugated(StructureInvariants { a: n / 2, b: n - n / 2, c: 0 }, 7)
}

fn snf(c: &mut Criterion) {
    let mut g = c.benchmark_group("smith_normal_form");
    for n in [4usize, 8, 16] {
        let (p, _) = random_unimodular_pair(n, 3, 4 * n, DEFAULT_ENTRY_CAP);
        let (q, _) = random_unimodular_pair(n, 5, 4 * n, DEFAULT_ENTRY_CAP);
        let m = &(&p * &crystalk_core::IntMatrix::diag(&(1..=n as i64).collect::<Vec<_>>())) * &q;
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| intlin::smith_normal_form(black_box(m))));
    }
    g.finish();
}

fn decompose(c: &mut Criterion) {
    let mut g = c.benchmark_group("decompose");
    for n in [4usize, 8, 12] {
        let l = conjugated(StructureInvariants { a: n / 4, b: n / 4, c: n / 4 + (n % 4) / 2 }, 11);
        g.bench_with_input(BenchmarkId::from_parameter(n), &l, |b, l| b.iter(|| lattice::decompose(black_box(l))));
    }
    g.finish();
}

fn kunneth(c: &mut Criterion) {
    let mut g = c.benchmark_group("kunneth_assembly");
    for n in [2usize, 6, 10] {
        let l = mixed(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &l, |b, l| b.iter(|| toruskt::kunneth_assembly(black_box(l))));
    }
    g.finish();
}

fn oracles(c: &mut Criterion) {
    let mut g = c.benchmark_group("exterior_oracle");
    g.sample_size(10);
    for n in [4usize, 6, 8] {
        let l = mixed(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &l, |b, l| {
            b.iter(|| oracle::exterior_action_invariants(black_box(l.matrix())))
        });
    }
    g.finish();
    let mut g = c.benchmark_group("grid_oracle");
    g.sample_size(10);
    for n in [2usize, 4, 6] {
        let l = mixed(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &l, |b, l| {
            b.iter(|| oracle::fixed_grid_components(black_box(l.matrix()), 4))
        });
    }
    g.finish();
}

criterion_group!(benches, snf, decompose, kunneth, oracles);
criterion_main!(benches);
