use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use freebound::exact::critical_catenoid;
use freebound::mesh::{area_gradient, discrete_a2, init_graph_disk, minimize, SolverConfig};
use freebound::verify::{run_check, CheckKind, VerifyConfig};
use freebound::Exec;
use std::hint::black_box;

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn checks(c: &mut Criterion) {
    let cat = critical_catenoid();
    let mut g = c.benchmark_group("catenoid-checks");
    g.sample_size(10);
    for kind in [
        CheckKind::GraphLaplacian,
        CheckKind::Simons,
        CheckKind::Isoperimetric,
    ] {
        for (mode, exec) in MODES {
            let cfg = VerifyConfig::default().with_exec(exec);
            g.bench_function(BenchmarkId::new(kind.name(), mode), |b| {
                b.iter(|| run_check(kind, black_box(&cat), None, &cfg).unwrap())
            });
        }
    }
    g.finish();
}

fn mesh(c: &mut Criterion) {
    let disk = init_graph_disk(32, |x, y| 0.1 * x + 0.15 * (1.0 - x * x - y * y)).unwrap();
    let mut g = c.benchmark_group("mesh-res32");
    g.sample_size(10);
    for (mode, exec) in MODES {
        g.bench_function(BenchmarkId::new("area-gradient", mode), |b| {
            b.iter(|| area_gradient(black_box(&disk), exec))
        });
        g.bench_function(BenchmarkId::new("discrete-a2", mode), |b| {
            b.iter(|| discrete_a2(black_box(&disk), exec))
        });
        let cfg = SolverConfig {
            exec,
            max_iterations: 20,
            ..SolverConfig::default()
        };
        g.bench_function(BenchmarkId::new("minimize-20", mode), |b| {
            b.iter(|| minimize(black_box(&disk), &cfg))
        });
    }
    g.finish();
}

criterion_group!(benches, checks, mesh);
criterion_main!(benches);
