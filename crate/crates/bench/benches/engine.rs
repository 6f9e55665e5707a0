use std::hint::black_box;

use cardqe::harness::{check_axioms, defcheck, EnumerationSpec, SchemaInstanceSpec};
use cardqe::model::{eval_bounded, random_assignment, EpBounds, SampleMode, SearchBounds};
use cardqe::qe::{decide, eliminate_all, eliminate_all_dnf, Theory};
use cardqe::syntax::parse;
use cardqe::{Level, Var};
use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MAIN_AXIOM: &str = "A x (~Fin(x) -> E y (y < x & ~Fin(y) & ~Fin(x - y)))";
const SPLIT: &str = "A x A y (x . y = 0 & Res[4,1](x | y) -> \
    Res[4,0](x) & Res[4,1](y) | Res[4,1](x) & Res[4,0](y) | \
    Res[4,2](x) & Res[4,3](y) | Res[4,3](x) & Res[4,2](y))";

fn engine(c: &mut Criterion) {
    let main = parse(MAIN_AXIOM).unwrap();
    let split = parse(SPLIT).unwrap();
    c.bench_function("decide/main-axiom", |b| b.iter(|| decide(black_box(&main), Theory::T2)));
    c.bench_function("decide/res-split-4", |b| b.iter(|| decide(black_box(&split), Theory::T3)));

    let f = parse("E x (C[1](x . y) & C[1]((1 + x) . y) & Res[3,1](x . z))").unwrap();
    c.bench_function("qe/diagram", |b| b.iter(|| eliminate_all(black_box(&f), Theory::T3)));
    c.bench_function("qe/dnf", |b| b.iter(|| eliminate_all_dnf(black_box(&f), Theory::T3)));
}

fn model(c: &mut Criterion) {
    let f = parse("E u (u . x = u & Res[2,1](u) & C[2](x - u))").unwrap();
    let vars = [Var::new("x")];
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let sigmas: Vec<_> = (0..16)
        .map(|_| random_assignment(&mut rng, &vars, EpBounds::default(), SampleMode::All))
        .collect();
    let bounds = SearchBounds::default();
    c.bench_function("model/bounded-eval", |b| {
        b.iter(|| {
            for s in &sigmas {
                black_box(eval_bounded(&f, s, &bounds).unwrap());
            }
        })
    });
}

fn harness(c: &mut Criterion) {
    let mut g = c.benchmark_group("harness");
    g.sample_size(10);
    g.bench_function("axioms/T3/3", |b| {
        b.iter(|| check_axioms(&SchemaInstanceSpec::new(Theory::T3, 3), 1))
    });
    let target = parse("Fin(x)").unwrap();
    let spec = EnumerationSpec::new(Level::L1, 5, vec![Var::new("x")]);
    g.bench_function("defcheck/fin/5", |b| b.iter(|| defcheck(&target, &spec).unwrap()));
    g.finish();
}

criterion_group!(benches, engine, model, harness);
criterion_main!(benches);
