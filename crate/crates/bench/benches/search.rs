use std::hint::black_box;

use cakes_core::search::rho_nn;
use cakes_core::synthetic::{manifold, random_sequences, uniform_hypercube};
use cakes_core::{
    Algorithm, Dataset, Euclidean, Levenshtein, PartitionCriteria, PointStore, Sequences, Strategy, Tree, Vectors,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const QUERIES: usize = 50;

fn vectors(name: &str, store: Vectors) -> (Dataset<Vectors>, Vec<Vec<f32>>) {
    let n = store.len();
    let queries = (n - QUERIES..n).map(|i| store.get(i).to_vec()).collect();
    let keep: Vec<usize> = (0..n - QUERIES).collect();
    (Dataset::new(name, store.select(&keep)).unwrap(), queries)
}

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    group.sample_size(10);
    for n in [2_000, 8_000] {
        let data = Dataset::new("manifold", manifold(n, 32, 3, 1).unwrap()).unwrap();
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("manifold-d32", n), &data, |b, data| {
            b.iter(|| {
                Tree::build_permuted(data.clone(), Euclidean, PartitionCriteria::default(), Strategy::Unbalanced, 0)
            })
        });
    }
    group.finish();
}

fn knn(c: &mut Criterion) {
    let workloads = [
        ("manifold-d32", manifold(20_000 + QUERIES, 32, 3, 2).unwrap()),
        ("uniform-d8", uniform_hypercube(20_000 + QUERIES, 8, 3).unwrap()),
    ];
    for (name, store) in workloads {
        let (data, queries) = vectors(name, store);
        let tree = Tree::build_permuted(data, Euclidean, PartitionCriteria::default(), Strategy::Unbalanced, 0);
        let mut group = c.benchmark_group(format!("knn/{name}"));
        group.sample_size(10);
        group.throughput(Throughput::Elements(QUERIES as u64));
        for algo in Algorithm::ALL {
            for k in [1, 10, 100] {
                group.bench_function(BenchmarkId::new(algo.name(), k), |b| {
                    b.iter(|| {
                        for q in &queries {
                            black_box(algo.knn(&tree, q, k).unwrap());
                        }
                    })
                });
            }
        }
        group.finish();
    }
}

fn rnn_strings(c: &mut Criterion) {
    let store = random_sequences(5_000 + QUERIES, 32, b"ACGT", 4).unwrap();
    let seqs: Vec<Vec<u8>> = store.iter().map(<[u8]>::to_vec).collect();
    let (base, queries) = seqs.split_at(5_000);
    let data = Dataset::new("strings", Sequences::from_seqs(base)).unwrap();
    let tree = Tree::build_permuted(data, Levenshtein, PartitionCriteria::default(), Strategy::Unbalanced, 0);
    let mut group = c.benchmark_group("rnn/strings-levenshtein");
    group.sample_size(10);
    group.throughput(Throughput::Elements(QUERIES as u64));
    for rho in [8.0, 12.0] {
        group.bench_function(BenchmarkId::from_parameter(rho), |b| {
            b.iter(|| {
                for q in queries {
                    black_box(rho_nn(&tree, q, rho).unwrap());
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, build, knn, rnn_strings);
criterion_main!(benches);
