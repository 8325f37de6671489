//! `par::map` against a plain iterator run inside a one-thread pool, so the kernels'
//! own inner `par::map` calls are sequential too. Without the `parallel` feature both
//! sides are sequential, which checks the fallback costs nothing.

use adjzeta::archzeta::{self, PrincipalSeriesParams, QuadratureSpec};
use adjzeta::checks::{qb_overlap_points, random_qb_params};
use adjzeta::par;
use adjzeta::quasibeta::{qb_continue, QBExpression, QbOptions};
use adjzeta::unramzeta::{zeta_series, Bounds, SatakeTriple};
use adjzeta::{rat, Rational};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn both<I: Sync, O: Send>(c: &mut Criterion, name: &str, jobs: &[I], f: impl Fn(&I) -> O + Sync + Send + Copy) {
    let mut g = c.benchmark_group(name);
    g.sample_size(10);
    let label = if par::is_parallel() { "rayon" } else { "rayon-off" };
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    g.bench_function(BenchmarkId::new("par_map", label), |b| {
        b.iter(|| black_box(par::map(jobs, f)))
    });
    g.bench_function("sequential", |b| {
        b.iter(|| single.install(|| black_box(jobs.iter().map(f).collect::<Vec<_>>())))
    });
    g.finish();
}

fn quasibeta(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let jobs: Vec<_> = (0..8)
        .flat_map(|_| {
            let p = random_qb_params(&mut rng);
            qb_overlap_points(&p).into_iter().map(move |s| (QBExpression::square(&p), s))
        })
        .collect();
    both(c, "quasibeta_continue", &jobs, |(e, s)| qb_continue(e, *s, &QbOptions::default()).unwrap());
}

fn whittaker(c: &mut Criterion) {
    let u = PrincipalSeriesParams::real(0.4, 0.0, -0.4).unwrap();
    let spec = QuadratureSpec::level(0);
    let jobs: Vec<[f64; 3]> = [0.3, 0.6, 1.0, 1.5]
        .iter()
        .flat_map(|&y1| [0.4, 0.8, 1.2].map(|y2| [y1 * y2, y2, 1.0]))
        .collect();
    let u = &u;
    let spec = &spec;
    both(c, "jacquet_whittaker", &jobs, move |a| archzeta::jacquet_whittaker(*a, u, spec).unwrap());
}

fn f_kernel(c: &mut Criterion) {
    let spec = QuadratureSpec::level(0);
    let jobs: Vec<(f64, Complex64)> = [0.3, 0.5, 0.8, 1.1]
        .iter()
        .flat_map(|&r| [0.6, 1.0, 2.0].map(|s| (r, Complex64::new(s, 0.2))))
        .collect();
    let spec = &spec;
    both(c, "f_kernel", &jobs, move |(r, s)| archzeta::f_kernel(*r, 0.0, *s, spec).unwrap());
}

fn unramified(c: &mut Criterion) {
    let triple = |a: Rational, b: Rational| {
        let c = (&a * &b).recip();
        SatakeTriple::new(a, b, c).unwrap()
    };
    let jobs: Vec<(u64, SatakeTriple)> = [2u64, 3]
        .iter()
        .flat_map(|&p| [triple(rat(1, 1), rat(1, 1)), triple(rat(2, 1), rat(3, 1))].map(|t| (p, t)))
        .collect();
    both(c, "unramified_degree_6", &jobs, |(p, t)| zeta_series(t, *p, 6, Bounds::default()).unwrap());
}

criterion_group!(benches, quasibeta, whittaker, f_kernel, unramified);
criterion_main!(benches);
