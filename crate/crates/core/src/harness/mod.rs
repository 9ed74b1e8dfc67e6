//! Experiment orchestration: the hidden-size / depth sweeps (E1) and the
//! color-ratio splits (E2), their CSV tables and aggregate statistics.

mod config;
mod plot;

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::gnn::{train_with_attributes, GnnError, TrainConfig, TrainHistory};
use crate::graph::{attribute_matrix, AttributeMatrix, Dataset, GraphError};
use crate::par::{self, Execution};
use crate::pfaffian::Activation;
use crate::tud_io::{fmt_f64, parse_tudataset, CsvTable, SvgError, TableError, TudDirectory, TudError};
use crate::wl::{dataset_color_stats, split_by_ratio, Split, WlError};

pub use config::ConfigFile;
pub use plot::{plot, snapshot_epochs, PlotKind, PlotOptions};

/// Environment variable naming the directory that holds TUDataset folders.
pub const DATA_DIR_ENV: &str = "VCGNN_DATA_DIR";

pub const E1_COLUMNS: [&str; 9] = [
    "dataset",
    "activation",
    "hidden",
    "layers",
    "seed",
    "epoch",
    "train_acc",
    "test_acc",
    "diff",
];
pub const E1_KEY: [&str; 4] = ["dataset", "activation", "hidden", "layers"];

pub const E2_COLUMNS: [&str; 8] = [
    "split_index",
    "min_ratio",
    "max_ratio",
    "seed",
    "epoch",
    "train_acc",
    "test_acc",
    "diff",
];
pub const E2_KEY: [&str; 3] = ["split_index", "min_ratio", "max_ratio"];

pub const SPLIT_COLUMNS: [&str; 7] = [
    "split_index",
    "graphs",
    "nodes",
    "colors",
    "distinct_colors",
    "min_ratio",
    "max_ratio",
];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Data(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Tud(#[from] TudError),
    #[error(transparent)]
    Gnn(#[from] GnnError),
    #[error(transparent)]
    Wl(#[from] WlError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Svg(#[from] SvgError),
}

/// The explicit directory if given, else `$VCGNN_DATA_DIR`.
pub fn resolve_data_dir(explicit: Option<&Path>) -> Result<PathBuf, HarnessError> {
    if let Some(p) = explicit {
        return Ok(p.to_path_buf());
    }
    match std::env::var_os(DATA_DIR_ENV) {
        Some(v) if !v.is_empty() => Ok(PathBuf::from(v)),
        _ => Err(HarnessError::Data(format!(
            "no dataset directory given and {DATA_DIR_ENV} is not set"
        ))),
    }
}

/// Loads `name` from `root`, accepting `-` and `_` interchangeably in the
/// folder name (`PTC-MR` and `PTC_MR`).
pub fn load_dataset(root: &Path, name: &str) -> Result<Dataset, HarnessError> {
    let mut candidates = vec![name.to_string(), name.replace('-', "_"), name.replace('_', "-")];
    candidates.dedup();
    let mut first_err = None;
    for c in &candidates {
        match TudDirectory::locate(root, c) {
            Ok(dir) => return Ok(parse_tudataset(&dir)?),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.map(HarnessError::from).unwrap_or_else(|| HarnessError::Data(name.to_string())))
}

/// Mean and sample standard deviation (`n − 1`; zero for one value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Seed statistics of one (cell, epoch) group.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub key: Vec<String>,
    pub epoch: usize,
    pub runs: usize,
    pub mean_diff: f64,
    pub std_diff: f64,
    pub mean_train: f64,
    pub mean_test: f64,
}

/// Groups raw rows by `key_columns` and epoch. Groups come out in order of
/// first appearance of the key, then by epoch; values are taken in row order.
pub fn aggregate(rows: &CsvTable, key_columns: &[&str]) -> Result<Vec<Aggregate>, HarnessError> {
    let keys: Vec<usize> = key_columns.iter().map(|c| rows.column_index(c)).collect::<Result<_, _>>()?;
    let epochs: Vec<usize> = rows.parse_column("epoch")?;
    let diffs: Vec<f64> = rows.parse_column("diff")?;
    let train: Vec<f64> = rows.parse_column("train_acc")?;
    let test: Vec<f64> = rows.parse_column("test_acc")?;

    let mut key_order: Vec<Vec<String>> = Vec::new();
    let mut groups: HashMap<Vec<String>, Vec<Vec<usize>>> = HashMap::new();
    for (r, row) in rows.rows.iter().enumerate() {
        let key: Vec<String> = keys.iter().map(|&k| row[k].clone()).collect();
        let by_epoch = groups.entry(key.clone()).or_insert_with(|| {
            key_order.push(key.clone());
            Vec::new()
        });
        let e = epochs[r];
        if by_epoch.len() <= e {
            by_epoch.resize(e + 1, Vec::new());
        }
        by_epoch[e].push(r);
    }

    let mut out = Vec::new();
    for key in key_order {
        for (epoch, members) in groups[&key].iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            let pick = |v: &[f64]| members.iter().map(|&r| v[r]).collect::<Vec<f64>>();
            let (mean_diff, std_diff) = mean_std(&pick(&diffs));
            out.push(Aggregate {
                key: key.clone(),
                epoch,
                runs: members.len(),
                mean_diff,
                std_diff,
                mean_train: mean_std(&pick(&train)).0,
                mean_test: mean_std(&pick(&test)).0,
            });
        }
    }
    Ok(out)
}

/// The aggregate at the last epoch of every key.
pub fn final_aggregates(rows: &CsvTable, key_columns: &[&str]) -> Result<Vec<Aggregate>, HarnessError> {
    let all = aggregate(rows, key_columns)?;
    let mut out: Vec<Aggregate> = Vec::new();
    for a in all {
        match out.last_mut() {
            Some(last) if last.key == a.key => {
                if a.epoch > last.epoch {
                    *last = a;
                }
            }
            _ => out.push(a),
        }
    }
    Ok(out)
}

fn summary_table(rows: &CsvTable, key_columns: &[&str]) -> Result<CsvTable, HarnessError> {
    let mut columns: Vec<&str> = key_columns.to_vec();
    columns.extend(["epoch", "runs", "mean_diff", "std_diff", "mean_train_acc", "mean_test_acc"]);
    let mut table = CsvTable::new(&columns);
    for a in aggregate(rows, key_columns)? {
        let mut row = a.key.clone();
        row.extend([
            a.epoch.to_string(),
            a.runs.to_string(),
            fmt_f64(a.mean_diff),
            fmt_f64(a.std_diff),
            fmt_f64(a.mean_train),
            fmt_f64(a.mean_test),
        ]);
        table.push(row)?;
    }
    Ok(table)
}

/// True when each consecutive `(mean, std)` pair satisfies
/// `mean[i+1] ≥ mean[i] − max(std[i], std[i+1])`.
pub fn non_decreasing_within_std(stats: &[(f64, f64)]) -> bool {
    stats.windows(2).all(|w| w[1].0 >= w[0].0 - w[0].1.max(w[1].1))
}

/// Raw per-epoch rows plus per-(cell, epoch) seed statistics.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: CsvTable,
    pub summary: CsvTable,
}

fn history_rows(prefix: &[String], seed: u64, h: &TrainHistory, table: &mut CsvTable) -> Result<(), HarnessError> {
    for r in &h.epochs {
        let mut row = prefix.to_vec();
        row.extend([
            seed.to_string(),
            r.epoch.to_string(),
            fmt_f64(r.train_accuracy),
            fmt_f64(r.test_accuracy),
            fmt_f64(r.diff),
        ]);
        table.push(row)?;
    }
    Ok(())
}

/// Inner loops run sequentially when the outer job loop already fans out.
fn inner_execution(outer: Execution) -> Execution {
    if outer.is_parallel() {
        Execution::Sequential
    } else {
        outer
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct E1Config {
    pub activation: Activation,
    pub hidden_sweep: Vec<usize>,
    /// Depth used throughout the hidden-size sweep.
    pub hidden_sweep_layers: usize,
    pub layer_sweep: Vec<usize>,
    /// Width used throughout the depth sweep.
    pub layer_sweep_hidden: usize,
    pub epochs: usize,
    pub runs: usize,
    pub base_seed: u64,
    /// Optimizer, split and attribute settings shared by every run.
    pub base: TrainConfig,
    pub execution: Execution,
}

impl E1Config {
    /// 100 epochs, 5 runs.
    pub fn desk(activation: Activation) -> Self {
        E1Config {
            activation,
            hidden_sweep: vec![8, 16, 32, 64, 128],
            hidden_sweep_layers: 3,
            layer_sweep: vec![2, 3, 4, 5, 6],
            layer_sweep_hidden: 32,
            epochs: 100,
            runs: 5,
            base_seed: 0,
            base: TrainConfig::default(),
            execution: Execution::default(),
        }
    }

    /// 500 epochs, 10 runs.
    pub fn paper(activation: Activation) -> Self {
        E1Config {
            epochs: 500,
            runs: 10,
            ..Self::desk(activation)
        }
    }

    /// Unique `(hidden, layers)` cells: the hidden sweep, then the depth
    /// sweep minus cells already present.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let mut cells: Vec<(usize, usize)> = Vec::new();
        let a = self.hidden_sweep.iter().map(|&h| (h, self.hidden_sweep_layers));
        let b = self.layer_sweep.iter().map(|&l| (self.layer_sweep_hidden, l));
        for c in a.chain(b) {
            if !cells.contains(&c) {
                cells.push(c);
            }
        }
        cells
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.runs as u64).map(|r| self.base_seed + r).collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.hidden_sweep.is_empty() && self.layer_sweep.is_empty() {
            return Err(HarnessError::Config("both sweeps are empty".into()));
        }
        if self.runs == 0 || self.epochs == 0 {
            return Err(HarnessError::Config("runs and epochs must be at least 1".into()));
        }
        Ok(())
    }
}

/// One training run per (cell, seed); rows are ordered by cell, seed, epoch
/// whatever the scheduling.
pub fn run_e1(dataset: &Dataset, cfg: &E1Config) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    let attrs = attribute_matrix(dataset, cfg.base.attribute_mode)?;
    let cells = cfg.cells();
    let seeds = cfg.seeds();
    let jobs: Vec<((usize, usize), u64)> = cells.iter().flat_map(|&c| seeds.iter().map(move |&s| (c, s))).collect();
    let inner = inner_execution(cfg.execution);
    log::info!("E1 on {}: {} cells x {} seeds", dataset.name(), cells.len(), seeds.len());

    let histories = par::map_slice(cfg.execution, &jobs, |&((hidden, layers), seed)| {
        let tc = TrainConfig {
            activation: cfg.activation,
            hidden,
            layers,
            seed,
            epochs: cfg.epochs,
            execution: inner,
            ..cfg.base.clone()
        };
        train_with_attributes(dataset, &attrs, &tc)
    });

    let mut rows = CsvTable::new(&E1_COLUMNS);
    for (((hidden, layers), seed), h) in jobs.iter().zip(histories) {
        let prefix = vec![
            dataset.name().to_string(),
            cfg.activation.name().to_string(),
            hidden.to_string(),
            layers.to_string(),
        ];
        history_rows(&prefix, *seed, &h?, &mut rows)?;
    }
    let summary = summary_table(&rows, &E1_KEY)?;
    Ok(RunOutput { rows, summary })
}

#[derive(Debug, Clone, PartialEq)]
pub struct E2Config {
    pub splits: usize,
    pub activation: Activation,
    pub hidden: usize,
    pub layers: usize,
    pub epochs: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub base: TrainConfig,
    pub execution: Execution,
}

impl E2Config {
    /// 300 epochs, 5 runs, `hd = 16`, `l = 4`, tanh, four splits.
    pub fn desk() -> Self {
        E2Config {
            splits: 4,
            activation: Activation::Tanh,
            hidden: 16,
            layers: 4,
            epochs: 300,
            runs: 5,
            base_seed: 0,
            base: TrainConfig::default(),
            execution: Execution::default(),
        }
    }

    /// 2000 epochs, 10 runs.
    pub fn paper() -> Self {
        E2Config {
            epochs: 2000,
            runs: 10,
            ..Self::desk()
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.runs as u64).map(|r| self.base_seed + r).collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.splits < 2 {
            return Err(HarnessError::Config("at least 2 splits are needed".into()));
        }
        if self.runs == 0 || self.epochs == 0 {
            return Err(HarnessError::Config("runs and epochs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct E2Output {
    pub splits: Vec<Split>,
    /// Per-split totals: graphs, nodes, `Σ C^T`, distinct colors, ratio range.
    pub split_table: CsvTable,
    pub rows: CsvTable,
    pub summary: CsvTable,
}

/// Orders the dataset by `|V|/C^T`, cuts it into `cfg.splits` groups and
/// trains independently on each group.
pub fn run_e2(dataset: &Dataset, cfg: &E2Config) -> Result<E2Output, HarnessError> {
    cfg.validate()?;
    let attrs = attribute_matrix(dataset, cfg.base.attribute_mode)?;
    let splits = color_splits(dataset, &attrs, cfg.splits, cfg.execution)?;
    let split_table = split_summary(&splits)?;
    let split_attrs: Vec<AttributeMatrix> = splits
        .iter()
        .map(|s| AttributeMatrix {
            dim: attrs.dim,
            graphs: s.graph_indices.iter().map(|&i| attrs.graphs[i].clone()).collect(),
        })
        .collect();

    let seeds = cfg.seeds();
    let jobs: Vec<(usize, u64)> = (0..splits.len()).flat_map(|s| seeds.iter().map(move |&x| (s, x))).collect();
    let inner = inner_execution(cfg.execution);
    log::info!("E2 on {}: {} splits x {} seeds", dataset.name(), splits.len(), seeds.len());
    let histories = par::map_slice(cfg.execution, &jobs, |&(s, seed)| {
        let tc = TrainConfig {
            activation: cfg.activation,
            hidden: cfg.hidden,
            layers: cfg.layers,
            seed,
            epochs: cfg.epochs,
            execution: inner,
            ..cfg.base.clone()
        };
        train_with_attributes(&splits[s].dataset, &split_attrs[s], &tc)
    });

    let mut rows = CsvTable::new(&E2_COLUMNS);
    for ((s, seed), h) in jobs.iter().zip(histories) {
        let split = &splits[*s];
        let prefix = vec![
            (split.index + 1).to_string(),
            fmt_f64(split.min_ratio),
            fmt_f64(split.max_ratio),
        ];
        history_rows(&prefix, *seed, &h?, &mut rows)?;
    }
    let summary = summary_table(&rows, &E2_KEY)?;
    Ok(E2Output {
        splits,
        split_table,
        rows,
        summary,
    })
}

/// `k` ratio-ordered splits of `dataset`.
pub fn color_splits(
    dataset: &Dataset,
    attrs: &AttributeMatrix,
    k: usize,
    exec: Execution,
) -> Result<Vec<Split>, HarnessError> {
    let stats = dataset_color_stats(dataset, attrs, exec)?;
    Ok(split_by_ratio(dataset, &stats, k)?)
}

pub fn split_summary(splits: &[Split]) -> Result<CsvTable, HarnessError> {
    let mut t = CsvTable::new(&SPLIT_COLUMNS);
    for s in splits {
        t.push(vec![
            (s.index + 1).to_string(),
            s.dataset.len().to_string(),
            s.total_nodes.to_string(),
            s.total_colors.to_string(),
            s.distinct_colors.to_string(),
            fmt_f64(s.min_ratio),
            fmt_f64(s.max_ratio),
        ])?;
    }
    Ok(t)
}
