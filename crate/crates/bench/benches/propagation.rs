use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use treecast_bench::bench_config;
use treecast_core::{
    build_binary_tree, build_clustered_tree, build_contact_graph, run, Mode, Prng,
};

fn topology_builders(c: &mut Criterion) {
    let mut group = c.benchmark_group("topology");
    group.bench_function("binary_tree_65535", |b| {
        b.iter(|| build_binary_tree(black_box(65_535)).unwrap())
    });
    group.bench_function("clustered_tree_30000_g3", |b| {
        b.iter(|| build_clustered_tree(black_box(30_000), 3).unwrap())
    });
    group.bench_function("contact_graph_10000_c100", |b| {
        b.iter(|| {
            let mut prng = Prng::stream(black_box(1), 0, 0);
            build_contact_graph(10_000, 100, &mut prng).unwrap()
        })
    });
    group.finish();
}

fn full_runs(c: &mut Criterion) {
    let mut group = c.benchmark_group("run");
    group.sample_size(20);
    group.bench_function("tree_65535", |b| {
        let config = bench_config(Mode::Tree, 65_535);
        b.iter(|| run(black_box(&config)).unwrap())
    });
    group.bench_function("cluster_30000_g3", |b| {
        let config = bench_config(Mode::TreeCluster, 30_000);
        b.iter(|| run(black_box(&config)).unwrap())
    });
    group.bench_function("gossip_push_10000_c100", |b| {
        let config = bench_config(Mode::Gossip, 10_000);
        b.iter(|| run(black_box(&config)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, topology_builders, full_runs);
criterion_main!(benches);
