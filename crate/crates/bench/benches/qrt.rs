use criterion::{black_box, criterion_group, criterion_main, Criterion};
use qrt_bench::{four_periodic_link, generic_curve, order8_curve, t_values};
use qrt_core::linkage::{periodicity, poristic_check};
use qrt_core::walks::step_set;
use qrt_core::{analyze_order, qrt_order};

fn order(c: &mut Criterion) {
    let q8 = order8_curve();
    let qg = generic_curve();
    c.bench_function("qrt_order/order8_tower", |b| {
        b.iter(|| qrt_order(black_box(&q8), 12, false))
    });
    c.bench_function("qrt_order/generic_n24", |b| {
        b.iter(|| qrt_order(black_box(&qg), 24, false))
    });
    c.bench_function("qrt_order/generic_n24_oracle", |b| {
        b.iter(|| qrt_order(black_box(&qg), 24, true))
    });
}

fn walks(c: &mut Criterion) {
    let s22 = step_set("S22").expect("bundled");
    let ts = t_values();
    c.bench_function("walks/s22_three_t", |b| {
        b.iter(|| {
            for t in &ts {
                let q = s22.k_t(t).unwrap();
                black_box(analyze_order(&q, 12, false).unwrap());
            }
        })
    });
}

fn linkage(c: &mut Criterion) {
    let l = four_periodic_link();
    c.bench_function("linkage/periodicity", |b| {
        b.iter(|| periodicity(black_box(&l), 12, false))
    });
    let sides = l.sides_f64();
    c.bench_function("linkage/poristic_20_starts", |b| {
        b.iter(|| poristic_check(black_box(sides), Some(4), 4, 20))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = order, walks, linkage
}
criterion_main!(benches);
