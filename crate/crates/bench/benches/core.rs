use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use quadwaring_bench::{base_case_lps, small_lps, GAUSS_MODULI};
use quadwaring_core::charsums::{reduced_gauss_closed_form, reduced_gauss_spectrum};
use quadwaring_core::comblemma::verify_base_case;
use quadwaring_core::exactlp::{simplex_solve, verify_certificate, vertex_enumerate};

fn lp(c: &mut Criterion) {
    let mut g = c.benchmark_group("lp");
    let small = small_lps(64);
    g.bench_function("simplex/small64", |b| {
        b.iter(|| {
            for p in &small {
                black_box(simplex_solve(black_box(p)));
            }
        })
    });
    g.bench_function("vertex/small64", |b| {
        b.iter(|| {
            for p in &small {
                black_box(vertex_enumerate(black_box(p)).ok());
            }
        })
    });
    for (s, n) in [(6, 3), (7, 3)] {
        let lps = base_case_lps(s, n);
        g.bench_with_input(BenchmarkId::new("simplex+certificate", format!("s{s}n{n}")), &lps, |b, lps| {
            b.iter(|| {
                lps.iter()
                    .all(|p| verify_certificate(p, &simplex_solve(p)).unwrap_or(false))
            })
        });
    }
    g.sample_size(10);
    g.bench_function("verify_base_case/s7n3", |b| b.iter(|| verify_base_case(7, 3).unwrap()));
    g.finish();
}

fn gauss(c: &mut Criterion) {
    let mut g = c.benchmark_group("gauss");
    for (p, n) in GAUSS_MODULI {
        g.bench_with_input(BenchmarkId::new("spectrum", format!("{p}^{n}")), &(p, n), |b, &(p, n)| {
            b.iter(|| reduced_gauss_spectrum(p, n).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("closed_form", format!("{p}^{n}")), &(p, n), |b, &(p, n)| {
            b.iter(|| reduced_gauss_closed_form(p, n, black_box(2)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, lp, gauss);
criterion_main!(benches);
