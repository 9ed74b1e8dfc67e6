//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.
//!
//! Criteria 1, 2, 8, 9 and 10 read PROTEINS, NCI1 and PTC_MR from
//! `$VCGNN_DATA_DIR` (TUDataset layout, one folder per dataset).

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vcgnn::bounds::{
    asymptotic_exponent, bound_theorem3, bound_theorem4, fit_loglog_slope, log2_components_bound, param_count_simple,
};
use vcgnn::gnn::{forward, loss_and_grads, ModelParams, Sample};
use vcgnn::graph::{attribute_matrix, summarize};
use vcgnn::harness::{final_aggregates, load_dataset, non_decreasing_within_std, Aggregate, DATA_DIR_ENV, E1_KEY, E2_KEY};
use vcgnn::pfaffian::{activation_format, system_format_simple};
use vcgnn::tud_io::CsvTable;
use vcgnn::wl::{order_and_split, refine};
use vcgnn::{Activation, AttributeMode, Execution, Graph};

type Outcome = Result<String, String>;

fn data_dir() -> Result<PathBuf, String> {
    match std::env::var_os(DATA_DIR_ENV) {
        Some(v) if !v.is_empty() => Ok(PathBuf::from(v)),
        _ => Err(format!("{DATA_DIR_ENV} is not set; the TUDataset files are required")),
    }
}

fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

fn criterion_1() -> Outcome {
    let root = data_dir()?;
    let expected = [
        ("PROTEINS", 1113, 39.06, 72.82),
        ("NCI1", 4110, 29.87, 32.30),
        ("PTC_MR", 344, 14.29, 14.69),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, graphs, nodes, edges) in expected {
        let d = load_dataset(&root, name).map_err(|e| format!("{name}: {e}"))?;
        let s = summarize(&d).map_err(|e| e.to_string())?;
        ok &= s.graph_count == graphs && close(s.avg_nodes, nodes, 0.01) && close(s.avg_edges, edges, 0.01);
        notes.push(format!("{name} {} {:.2} {:.2}", s.graph_count, s.avg_nodes, s.avg_edges));
    }
    let msg = notes.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_2() -> Outcome {
    let root = data_dir()?;
    let d = load_dataset(&root, "NCI1").map_err(|e| e.to_string())?;
    let attrs = attribute_matrix(&d, AttributeMode::default()).map_err(|e| e.to_string())?;
    let splits = order_and_split(&d, &attrs, 4).map_err(|e| e.to_string())?;
    let nodes = [27667.0, 30591.0, 31763.0, 32673.0];
    let bounds = [1.105, 1.208, 1.437];
    let mut ok = splits[0].min_ratio == 1.0;
    for (s, want) in splits.iter().zip(nodes) {
        ok &= (s.total_nodes as f64 - want).abs() <= 0.01 * want;
    }
    for (i, b) in bounds.iter().enumerate() {
        ok &= close(splits[i].max_ratio, *b, 0.01) && close(splits[i + 1].min_ratio, *b, 0.01);
    }
    let msg = format!(
        "nodes {:?}, ratio ranges {:?}",
        splits.iter().map(|s| s.total_nodes).collect::<Vec<_>>(),
        splits.iter().map(|s| (s.min_ratio, s.max_ratio)).collect::<Vec<_>>()
    );
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_3() -> Outcome {
    let formats: Vec<(u64, u64, u64)> = ["atan", "logsig", "tanh"]
        .iter()
        .map(|n| activation_format(n).map(|f| (f.alpha, f.beta, f.ell)).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    if formats != [(3, 1, 2), (2, 1, 1), (2, 1, 1)] {
        return Err(format!("activation formats {formats:?}"));
    }
    let sys = system_format_simple(Activation::Logsig.format(), 2, 10, 4).map_err(|e| e.to_string())?;
    if sys.format.alpha != 8 {
        return Err(format!("logsig system alpha = {}", sys.format.alpha));
    }
    let (a, b) = (BigUint::from(sys.format.alpha), BigUint::from(sys.format.beta));
    for p in 1..=100u64 {
        let base = BigUint::from(2 * p - 1) * (&a + &b) + 2u32 - BigUint::from(2 * p);
        if base != BigUint::from(16 * p - 7) {
            return Err(format!("p = {p}: base {base}, expected {}", 16 * p - 7));
        }
    }
    Ok(format!("formats {formats:?}, system alpha 8, base 16p-7 for p in 1..=100"))
}

fn big_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.iter_u64_digits().next().unwrap_or(0) as f64).log2();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    (top.iter_u64_digits().next().expect("nonzero") as f64).log2() + shift as f64
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in 1..=8u64 {
        for a in 1..=8u64 {
            for b in 1..=8u64 {
                for l in 1..=8u64 {
                    let exact = BigUint::from(2u32).pow((l * (l - 1) / 2 + 1) as u32)
                        * BigUint::from(a + 2 * b - 1).pow((p - 1) as u32)
                        * BigUint::from((2 * p - 1) * (a + b) + 2 - 2 * p).pow(l as u32);
                    let want = big_log2(&exact);
                    let got = log2_components_bound(p, a, b, l).map_err(|e| e.to_string())?.log2_value;
                    worst = worst.max((got - want).abs() / want.abs().max(1.0));
                }
            }
        }
    }
    let msg = format!("worst relative log2 error {worst:.3e} over 4096 inputs");
    if worst <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_5() -> Outcome {
    let geo = |n: u32, start: u64| -> Vec<u64> { (0..n).map(|i| start << i).collect() };
    let b3 = |l, n, d, q| bound_theorem3(Activation::Logsig, l, n, d, q).map(|b| b.value()).map_err(|e| e.to_string());
    let b4 = |c0, c1| bound_theorem4(Activation::Logsig, 2, 4, 2, c0, c1).map(|b| b.value).map_err(|e| e.to_string());
    let slope = |pts: Vec<(f64, f64)>| asymptotic_exponent(&pts).map_err(|e| e.to_string());

    let mut checks: Vec<(&str, f64, f64)> = Vec::new();
    let pts = |xs: Vec<u64>, f: &dyn Fn(u64) -> Result<f64, String>| -> Result<Vec<(f64, f64)>, String> {
        xs.into_iter().map(|x| f(x).map(|y| (x as f64, y))).collect()
    };
    let induced: Vec<(f64, f64)> = geo(8, 2)
        .into_iter()
        .map(|l| Ok((param_count_simple(16, l, 1).map_err(|e| e.to_string())? as f64, b3(l, 10, 16, 1)?)))
        .collect::<Result<_, String>>()?;
    checks.push((
        "p (induced by L)",
        fit_loglog_slope(&induced[induced.len() / 2..]).map_err(|e| e.to_string())?,
        4.1,
    ));
    checks.push(("N", slope(pts(geo(10, 2), &|n| b3(2, n, 4, 2))?)?, 2.1));
    checks.push(("L", slope(pts(geo(8, 2), &|l| b3(l, 10, 4, 2))?)?, 4.1));
    checks.push(("d", slope(pts(geo(8, 2), &|d| b3(2, 10, d, 2))?)?, 6.1));
    checks.push(("q", slope(pts(geo(10, 2), &|q| b3(2, 10, 4, q))?)?, 2.1));
    checks.push(("C1", slope(pts(geo(10, 2), &|c1| b4(1, c1))?)?, 2.1));
    checks.push(("C0", slope(pts(geo(10, 2), &|c0| b4(c0, 1 << 12))?)?, 0.2));

    let msg = checks
        .iter()
        .map(|(n, s, max)| format!("{n} {s:.3} (<= {max})"))
        .collect::<Vec<_>>()
        .join(", ");
    if checks.iter().all(|(_, s, max)| s <= max) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    Graph::from_edges(n, edges).expect("valid edges")
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    for sigma in Activation::ALL {
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let graphs: Vec<Graph> = (0..3)
                .map(|_| {
                    let n = rng.gen_range(4..=8);
                    random_graph(&mut rng, n, 0.4)
                })
                .collect();
            let attrs: Vec<Vec<f64>> = graphs
                .iter()
                .map(|g| (0..g.node_count() * 2).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let batch: Vec<Sample> = graphs
                .iter()
                .zip(&attrs)
                .enumerate()
                .map(|(i, (graph, attrs))| Sample {
                    graph,
                    attrs,
                    label: (i % 2) as u8,
                })
                .collect();
            let params = ModelParams::init(sigma, 2, 2, 2, &mut rng);
            let loss = |p: &ModelParams| loss_and_grads(p, &batch, Execution::Sequential).map(|r| r.loss);
            let analytic = loss_and_grads(&params, &batch, Execution::Sequential)
                .map_err(|e| e.to_string())?
                .grads;
            let mut p = params.clone();
            for (i, &g) in analytic.iter().enumerate() {
                let x = params.values[i];
                p.values[i] = x + 1e-6;
                let up = loss(&p).map_err(|e| e.to_string())?;
                p.values[i] = x - 1e-6;
                let down = loss(&p).map_err(|e| e.to_string())?;
                p.values[i] = x;
                let fd = (up - down) / 2e-6;
                // gradients near zero are compared absolutely
                worst = worst.max((g - fd).abs() / g.abs().max(fd.abs()).max(1e-4));
            }
        }
    }
    let msg = format!("max relative error {worst:.3e} over 3 activations x 10 seeds");
    if worst <= 1e-5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pairs = 0usize;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(4..=16);
        let g = random_graph(&mut rng, n, 0.25);
        let init: Vec<u32> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let attrs: Vec<f64> = init.iter().flat_map(|&c| [f64::from(c), 1.0 - f64::from(c)]).collect();
        let sigma = Activation::ALL[rng.gen_range(0..3)];
        let params = ModelParams::init(sigma, 3, 4, 2, &mut rng);
        let fp = forward(&params, &g, &attrs).map_err(|e| e.to_string())?;
        let wl = refine(&g, &init).map_err(|e| e.to_string())?;
        for t in 0..=3 {
            let colors = &wl.partitions[t.min(wl.stabilization_step)];
            for u in 0..n {
                for v in u + 1..n {
                    if colors[u] == colors[v] {
                        pairs += 1;
                        for (a, b) in fp.node(t, u).iter().zip(fp.node(t, v)) {
                            worst = worst.max((a - b).abs());
                        }
                    }
                }
            }
        }
    }
    let msg = format!("{pairs} same-color pairs, max feature difference {worst:.3e}");
    if worst <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn run_cli(args: &[&str], out_dir: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_vcgnn"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("vcgnn {} exited with {status}", args.join(" ")))
    }
}

const E1_ARGS: [&str; 11] = [
    "e1", "--dataset", "PTC_MR", "--activation", "tanh", "--epochs", "100", "--runs", "5", "--seed", "0",
];
const E2_ARGS: [&str; 9] = ["e2", "--dataset", "NCI1", "--epochs", "300", "--runs", "5", "--seed", "0"];

fn read_finals(path: &Path, key: &[&str]) -> Result<Vec<Aggregate>, String> {
    let rows = CsvTable::read(path).map_err(|e| e.to_string())?;
    final_aggregates(&rows, key).map_err(|e| e.to_string())
}

fn criterion_8(work: &Path) -> Outcome {
    data_dir()?;
    run_cli(&E1_ARGS, &work.join("e1_a"))?;
    let finals = read_finals(&work.join("e1_a/e1_rows.csv"), &E1_KEY)?;
    let cell = |hidden: usize, layers: usize| {
        finals
            .iter()
            .find(|a| a.key[2] == hidden.to_string() && a.key[3] == layers.to_string())
            .map(|a| (a.mean_diff, a.std_diff))
            .ok_or_else(|| format!("no cell hidden={hidden} layers={layers}"))
    };
    let widths: Vec<(f64, f64)> = [8, 16, 32, 64, 128]
        .iter()
        .map(|&h| cell(h, 3))
        .collect::<Result<_, _>>()?;
    let depth = [cell(32, 2)?, cell(32, 6)?];
    let msg = format!("final diff by width {widths:.4?}, depth 2 vs 6 {depth:.4?}");
    if non_decreasing_within_std(&widths) && non_decreasing_within_std(&depth) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_9(work: &Path) -> Outcome {
    data_dir()?;
    run_cli(&E2_ARGS, &work.join("e2_a"))?;
    let finals = read_finals(&work.join("e2_a/e2_rows.csv"), &E2_KEY)?;
    let split = |i: usize| {
        finals
            .iter()
            .find(|a| a.key[0] == i.to_string())
            .map(|a| (a.mean_diff, a.std_diff))
            .ok_or_else(|| format!("no split {i}"))
    };
    let pair = [split(1)?, split(4)?];
    let msg = format!("final diff split 1 vs 4 {pair:.4?}");
    if non_decreasing_within_std(&pair) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_10(work: &Path) -> Outcome {
    data_dir()?;
    let first = [
        "e1_a/e1_rows.csv",
        "e1_a/e1_summary.csv",
        "e2_a/e2_splits.csv",
        "e2_a/e2_rows.csv",
        "e2_a/e2_summary.csv",
    ];
    if let Some(missing) = first.iter().find(|f| !work.join(f).is_file()) {
        return Err(format!("{missing} was not produced by criteria 8-9"));
    }
    run_cli(&E1_ARGS, &work.join("e1_b"))?;
    run_cli(&E2_ARGS, &work.join("e2_b"))?;
    for f in first {
        let again = f.replace("_a/", "_b/");
        let a = std::fs::read(work.join(f)).map_err(|e| e.to_string())?;
        let b = std::fs::read(work.join(&again)).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{f} and {again} differ"));
        }
    }
    Ok(format!("{} CSV files byte-identical on repeat", first.len()))
}

fn main() {
    let work = tempfile::tempdir().expect("temporary directory");
    let w = work.path();
    let criteria: Vec<Box<dyn Fn() -> Outcome + '_>> = vec![
        Box::new(criterion_1),
        Box::new(criterion_2),
        Box::new(criterion_3),
        Box::new(criterion_4),
        Box::new(criterion_5),
        Box::new(criterion_6),
        Box::new(criterion_7),
        Box::new(|| criterion_8(w)),
        Box::new(|| criterion_9(w)),
        Box::new(|| criterion_10(w)),
    ];
    let mut failed = Vec::new();
    for (i, c) in criteria.iter().enumerate() {
        let n = i + 1;
        let outcome = catch_unwind(AssertUnwindSafe(c)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(msg) => println!("PASS criterion {n}: {msg}"),
            Err(msg) => {
                println!("FAIL criterion {n}: {msg}");
                failed.push(n);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
    } else {
        println!("acceptance: {} of 10 criteria failed: {failed:?}", failed.len());
        std::process::exit(1);
    }
}
