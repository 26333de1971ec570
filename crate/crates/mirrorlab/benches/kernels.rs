use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mirrorlab::branes::koszul_char;
use mirrorlab::exact::int;
use mirrorlab::ifunc::i_cy_with;
use mirrorlab::mb::{contour_integrate, log_q_from, model_integrand, residue_sum_auto, Model, Precision, Side};
use mirrorlab::ExecPolicy;

const POLICIES: [(&str, ExecPolicy); 2] = [("sequential", ExecPolicy::Sequential), ("parallel", ExecPolicy::Parallel)];

fn coefficients(c: &mut Criterion) {
    let mut g = c.benchmark_group("i_cy_order_40");
    for (name, p) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| i_cy_with(3, &int(40), p).unwrap()));
    }
    g.finish();
}

fn contour(c: &mut Criterion) {
    let bits = 128;
    let q = log_q_from("1e-4", 0.0, bits).unwrap();
    let ig = model_integrand(Model::Extended, &koszul_char(&[1, 1, 1, 1, 1], 2), &q).unwrap();
    let mut g = c.benchmark_group("contour_1e-4_128bit");
    g.sample_size(10);
    for (name, p) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| contour_integrate(&ig, Precision::new(bits), p).unwrap()));
    }
    g.finish();
}

fn residues(c: &mut Criterion) {
    let bits = 192;
    let q = log_q_from("1e4", 0.0, bits).unwrap();
    let ig = model_integrand(Model::Extended, &koszul_char(&[1, 1, 1, 1, 1], 2), &q).unwrap();
    let mut g = c.benchmark_group("residues_right_1e4_192bit");
    for (name, p) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| residue_sum_auto(&ig, Side::Right, Precision::new(bits), p).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, coefficients, contour, residues);
criterion_main!(benches);
