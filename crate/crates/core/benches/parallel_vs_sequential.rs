// SPDX-License-Identifier: MIT OR Apache-2.0
//! Orbit sums and stratum scans with the worker pool on and off.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use thetastrat::linalg::{q, qvec, Mat};
use thetastrat::par;
use thetastrat::quadforms::WeightedRep;
use thetastrat::rootdata::RootDatum;
use thetastrat::series::Trunc;
use thetastrat::strata::{enumerate_chi_active, StrataContext};
use thetastrat::twindex::{full_index_formula, LevelData, Orientation};

fn index_sum(c: &mut Criterion) {
    let mut group = c.benchmark_group("index_sum");
    group.sample_size(10);
    let x = WeightedRep::from_i64(&[(vec![1, 0], 1), (vec![0, 1], 1)]);
    let level = LevelData::new(&RootDatum::torus(2), Mat::from_i64(&[vec![4, 1], vec![1, 3]]), Orientation::CALIBRATED)
        .expect("level is admissible");
    for (name, sequential) in [("parallel", false), ("sequential", true)] {
        group.bench_with_input(BenchmarkId::new(name, "T2 X=C^2 K_t=6"), &sequential, |b, &seq| {
            par::force_sequential(seq);
            b.iter(|| full_index_formula(&level, 1, &WeightedRep::empty(), None, &x, Trunc::new(6, 0, 0)).expect("index"));
            par::force_sequential(false);
        });
    }
    group.finish();
}

fn strata_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("strata_scan");
    group.sample_size(10);
    let d = RootDatum::preset("A2").expect("A2");
    let v = WeightedRep::adjoint(&d);
    let b = v.ch2_form(2);
    let ctx = StrataContext::new(d, WeightedRep::empty(), v, b, qvec(&[0, 0])).expect("context");
    for (name, sequential) in [("parallel", false), ("sequential", true)] {
        group.bench_with_input(BenchmarkId::new(name, "A2 gamma^2=400"), &sequential, |bch, &seq| {
            par::force_sequential(seq);
            bch.iter(|| enumerate_chi_active(&ctx, &qvec(&[0, 0]), &q(400), None).expect("scan"));
            par::force_sequential(false);
        });
    }
    group.finish();
}

criterion_group!(benches, index_sum, strata_scan);
criterion_main!(benches);
