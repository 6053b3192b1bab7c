use criterion::{criterion_group, criterion_main, Criterion};

use wdn_bench::{grid_network, two_loop_network};
use wdn_core::hydraulics::{solve_wfp, SolverOptions};
use wdn_core::network::cycle_basis;

fn bench_solver(c: &mut Criterion) {
    let opts = SolverOptions::default();

    let small = two_loop_network();
    let small_loops = cycle_basis(&small);
    c.bench_function("wfp_two_loop", |b| {
        b.iter(|| solve_wfp(&small, &small_loops, &opts).unwrap())
    });

    for n in [4usize, 8] {
        let grid = grid_network(n);
        let loops = cycle_basis(&grid);
        c.bench_function(&format!("wfp_grid_{n}x{n}"), |b| {
            b.iter(|| solve_wfp(&grid, &loops, &opts).unwrap())
        });
    }

    let grid = grid_network(6);
    c.bench_function("cycle_basis_grid_6x6", |b| b.iter(|| cycle_basis(&grid)));
}

criterion_group!(benches, bench_solver);
criterion_main!(benches);
