use criterion::{black_box, criterion_group, criterion_main, Criterion};
use sporadic::classify::classify;
use sporadic::dirichlet::{giraud_sample, initial_words, Limits, PartialDomain};
use sporadic::discretetest::test_group;
use sporadic::hermlinalg::signature_exact;
use sporadic::spgroups::hermitian_form;
use sporadic::{SporadicId, TriangleGroup};

fn id(s: &str) -> SporadicId {
    s.parse().expect("known value")
}

fn field_ops(c: &mut Criterion) {
    let g = TriangleGroup::sporadic(5, id("sigma1")).expect("hyperbolic");
    let a = g.eval_str("123").expect("word");
    let b = g.eval_str("1J2").expect("word");
    c.bench_function("mat3 product over Q(zeta_N)", |bn| bn.iter(|| black_box(&a).mul(black_box(&b))));
    c.bench_function("word matrix (R1R2)^5", |bn| bn.iter(|| g.eval_str(black_box("(12)^5")).expect("word")));
}

fn signatures(c: &mut Criterion) {
    let tau = sporadic::spgroups::sporadic(id("sigma4bar")).value;
    c.bench_function("exact signature p=12", |bn| bn.iter(|| signature_exact(&hermitian_form(black_box(12), &tau))));
    let g = TriangleGroup::sporadic(3, id("sigma4bar")).expect("hyperbolic");
    let m = g.eval_str("12").expect("word");
    c.bench_function("classify R1R2", |bn| bn.iter(|| classify(black_box(&m), &g.form).expect("isometry")));
}

fn tests(c: &mut Criterion) {
    let g = TriangleGroup::sporadic(7, id("sigma4bar")).expect("hyperbolic");
    c.bench_function("non-discreteness tests (7, sigma4bar)", |bn| {
        bn.iter(|| test_group(black_box(&g), id("sigma4bar"), false))
    });
}

fn sampling(c: &mut Criterion) {
    let g = TriangleGroup::sporadic(3, id("sigma4bar")).expect("hyperbolic");
    let mut d = PartialDomain::new(&g, None).expect("default center");
    for w in initial_words() {
        let m = g.word_matrix(&w);
        d.insert_closed(w, m, 1000);
    }
    let limits = Limits { grid: 100, ..Limits::default() };
    let mut group = c.benchmark_group("giraud");
    group.sample_size(20);
    group.bench_function("face (1, 2) at grid 100", |bn| {
        bn.iter(|| giraud_sample(&d, black_box(0), black_box(1), &limits).expect("sample"))
    });
    group.finish();
}

criterion_group!(benches, field_ops, signatures, tests, sampling);
criterion_main!(benches);
