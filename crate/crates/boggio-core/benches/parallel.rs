//! Parallel vs sequential throughput on representative workloads:
//! a dense kernel grid evaluation and a batch of ball quadratures.

use boggio_core::exec::{map_indexed, map_indexed_seq};
use boggio_core::kernel::{BallPoint, GreenKernel};
use boggio_core::quadrature::{integrate_1d, QuadratureSpec};
use boggio_core::specfun::FracOrder;
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

fn grid_points(side: usize) -> Vec<(BallPoint, BallPoint)> {
    let mut pts = Vec::with_capacity(side * side);
    for i in 0..side {
        for j in 0..side {
            let x = BallPoint::new(vec![-0.7 + 1.4 * i as f64 / (side - 1) as f64, 0.11]);
            let y = BallPoint::new(vec![0.07, -0.7 + 1.4 * j as f64 / (side - 1) as f64]);
            pts.push((x, y));
        }
    }
    pts
}

fn kernel_grid(c: &mut Criterion) {
    let order = FracOrder::new(1.5).unwrap();
    let kernel = GreenKernel::new(2, order, &QuadratureSpec::default()).unwrap();
    let pts = grid_points(48);
    let mut group = c.benchmark_group("kernel_grid_48x48");
    group.bench_function("parallel", |b| {
        b.iter_batched(
            || pts.clone(),
            |pts| {
                map_indexed(pts.len(), |i| {
                    kernel.eval(&pts[i].0, &pts[i].1).unwrap()
                })
            },
            BatchSize::SmallInput,
        )
    });
    group.bench_function("sequential", |b| {
        b.iter_batched(
            || pts.clone(),
            |pts| {
                map_indexed_seq(pts.len(), |i| {
                    kernel.eval(&pts[i].0, &pts[i].1).unwrap()
                })
            },
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn quadrature_batch(c: &mut Criterion) {
    let spec = QuadratureSpec::with_tols(1e-10, 1e-12);
    let task = |i: usize| {
        let a = 1.0 + i as f64 * 0.01;
        integrate_1d(|t| (a * t).sin() / (1.0 + t * t), 0.0, 10.0, &spec).value
    };
    let mut group = c.benchmark_group("quadrature_batch_256");
    group.bench_function("parallel", |b| b.iter(|| map_indexed(256, task)));
    group.bench_function("sequential", |b| b.iter(|| map_indexed_seq(256, task)));
    group.finish();
}

criterion_group!(benches, kernel_grid, quadrature_batch);
criterion_main!(benches);
