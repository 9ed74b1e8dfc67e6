use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vcgnn::bounds::{sweep_theorem3, SweepVariable};
use vcgnn::gnn::{loss_and_grads, ModelParams, Sample};
use vcgnn::graph::{attribute_matrix, AttributeMode};
use vcgnn::wl::refine_dataset;
use vcgnn::{Activation, Dataset, Execution, Graph};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn dataset(graphs: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(graphs);
    for _ in 0..graphs {
        let n = rng.gen_range(10..40);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.1) {
                    edges.push((u, v));
                }
            }
        }
        let labels = (0..n).map(|_| rng.gen_range(0..4)).collect();
        out.push(Graph::from_edges(n, edges).unwrap().with_node_labels(labels).unwrap());
    }
    let labels = (0..graphs).map(|i| (i % 2) as u8).collect();
    Dataset::new("bench", out, labels).unwrap()
}

fn wl_refinement(c: &mut Criterion) {
    let data = dataset(500, 1);
    let attrs = attribute_matrix(&data, AttributeMode::LabelsOnly).unwrap();
    let mut group = c.benchmark_group("refine_dataset");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(refine_dataset(&data, &attrs, exec).unwrap()))
        });
    }
    group.finish();
}

fn gradients(c: &mut Criterion) {
    let data = dataset(128, 2);
    let attrs = attribute_matrix(&data, AttributeMode::LabelsOnly).unwrap();
    let batch: Vec<Sample> = (0..data.len())
        .map(|i| Sample {
            graph: &data.graphs()[i],
            attrs: &attrs.graphs[i],
            label: data.labels()[i],
        })
        .collect();
    let params = ModelParams::init(Activation::Tanh, 3, 32, attrs.dim, &mut ChaCha8Rng::seed_from_u64(3));
    let mut group = c.benchmark_group("loss_and_grads");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(loss_and_grads(&params, &batch, exec).unwrap()))
        });
    }
    group.finish();
}

fn bound_sweep(c: &mut Criterion) {
    let values: Vec<u64> = (1..=4096).collect();
    let mut group = c.benchmark_group("sweep_theorem3");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                black_box(sweep_theorem3(exec, Activation::Logsig, 3, 100, 32, 8, SweepVariable::Nodes, &values).unwrap())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, wl_refinement, gradients, bound_sweep);
criterion_main!(benches);
