use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use mmrus_bench::{nested_implication, synthetic_database, MINI};
use mmrus_core::grammar::{extract_grammar, GrammarOptions, VarTypes};
use mmrus_core::mm::{check_database, parse_mm_source, CheckOptions};
use mmrus_core::symbol::{symbols, Symbol};
use mmrus_core::translate::{round_trip, TranslateOptions};

fn verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    for n in [100, 1000] {
        let src = synthetic_database(n);
        let db = parse_mm_source(&src).unwrap();
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("parse", n), &src, |b, src| b.iter(|| parse_mm_source(black_box(src))));
        group.bench_with_input(BenchmarkId::new("sequential", n), &db, |b, db| {
            b.iter(|| check_database(black_box(db), CheckOptions::default()))
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &db, |b, db| {
            b.iter(|| check_database(black_box(db), CheckOptions { fail_fast: false, parallel: true }))
        });
    }
    group.finish();
}

fn expression_parsing(c: &mut Criterion) {
    let db = parse_mm_source(MINI).unwrap();
    let grammar = extract_grammar(&db, &GrammarOptions::default()).unwrap();
    let vars: VarTypes = [(Symbol::new("ph"), Symbol::new("wff"))].into_iter().collect();
    let wff = Symbol::new("wff");
    let mut group = c.benchmark_group("earley");
    for depth in [8, 32, 128] {
        let body = symbols(&nested_implication(depth));
        group.throughput(Throughput::Elements(body.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(depth), &body, |b, body| {
            b.iter(|| grammar.parse(&wff, black_box(body), &vars).unwrap())
        });
    }
    group.finish();
}

fn translation(c: &mut Criterion) {
    let mut group = c.benchmark_group("round trip");
    group.sample_size(20);
    for n in [0, 100] {
        let db = parse_mm_source(&synthetic_database(n)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &db, |b, db| {
            b.iter(|| round_trip(black_box(db), &TranslateOptions::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, verify, expression_parsing, translation);
criterion_main!(benches);
