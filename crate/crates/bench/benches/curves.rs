use std::hint::black_box;

use conflen::harmonic::{omega_pipeline, trace_level_curve, HMProblem, TraceOptions};
use conflen::{preimage_components, two_slit_map, Circline};
use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64 as C;

fn level_curves(c: &mut Criterion) {
    let mut g = c.benchmark_group("trace_level_curve");
    g.sample_size(20);
    for p in [HMProblem::half_plane(), HMProblem::slit(2.0, 1.0).unwrap()] {
        g.bench_function(p.label().to_string(), |b| {
            b.iter(|| trace_level_curve(black_box(&p), 0.5, TraceOptions::default()).unwrap().length_estimate)
        });
    }
    g.finish();

    let p = HMProblem::slit(2.0, 1.0).unwrap();
    c.bench_function("omega_pipeline slit", |b| b.iter(|| omega_pipeline(&p, black_box(C::new(0.3, 0.7))).unwrap()));
}

fn preimages(c: &mut Criterion) {
    let g = two_slit_map(-1.0, 1.0).unwrap();
    let l = Circline::real_axis();
    let mut grp = c.benchmark_group("preimage_components");
    grp.sample_size(10);
    grp.bench_function("two-slit/real-axis", |b| b.iter(|| preimage_components(black_box(&g), &l).unwrap().spherical_total));
    grp.finish();
}

criterion_group!(benches, level_curves, preimages);
criterion_main!(benches);
