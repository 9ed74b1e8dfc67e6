use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use vcgnn::bounds::{
    bound_theorem1, bound_theorem3, bound_theorem4, fit_loglog_slope, generalization_gap_bound, ChainReport,
    GeneralModel,
};
use vcgnn::gnn::{train, EpochRecord, TrainConfig};
use vcgnn::graph::{attribute_matrix, summarize};
use vcgnn::harness::{
    color_splits, load_dataset, plot, resolve_data_dir, run_e1, run_e2, split_summary, ConfigFile, E1Config,
    E2Config, PlotKind, PlotOptions,
};
use vcgnn::pfaffian::{compose, polynomial_format, system_format_simple};
use vcgnn::tud_io::{fmt_f64, CsvTable};
use vcgnn::wl::dataset_color_stats;
use vcgnn::{par, Activation, AttributeMode, Dataset, Execution, PfaffianFormat};

#[derive(Parser)]
#[command(name = "vcgnn", version, about = "VC-dimension bounds, 1-WL statistics and GNN experiments")]
struct Cli {
    /// Run every data-parallel loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a VC-dimension upper bound, optionally over a sweep.
    Bound(BoundArgs),
    /// Dataset statistics: graph count, average nodes and edges.
    Stats(DataArgs),
    /// Per-graph 1-WL color statistics and the ratio-ordered splits.
    Wl(WlArgs),
    /// Train one GNN and write its per-epoch history.
    Train(TrainArgs),
    /// Hidden-size and depth sweeps of the train/test accuracy gap.
    E1(ExperimentArgs),
    /// Train on ratio-ordered splits of a dataset.
    E2(ExperimentArgs),
    /// Render an E1 or E2 CSV as an SVG chart.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    /// Generic COMBINE/AGGREGATE/READOUT formats.
    General,
    /// Sum-aggregation GNN, node-count bound.
    Simple,
    /// Sum-aggregation logsig GNN, color-count bound.
    Colors,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_enum, default_value = "simple")]
    model: Model,
    /// Hidden activation: atan, logsig or tanh.
    #[arg(long, default_value = "logsig")]
    sigma: Activation,
    /// Message-passing layers.
    #[arg(long = "L", default_value_t = 3)]
    layers: u64,
    /// Total number of nodes in the training domain.
    #[arg(long = "N", default_value_t = 100)]
    nodes: u64,
    /// Hidden feature size.
    #[arg(long = "d", default_value_t = 32)]
    dim: u64,
    /// Input attribute size.
    #[arg(long = "q", default_value_t = 1)]
    attr_dim: u64,
    /// Initial color count C0 (colors model).
    #[arg(long = "c0", default_value_t = 1)]
    c0: u64,
    /// Cumulative color count C1 (colors model).
    #[arg(long = "c1", default_value_t = 1)]
    c1: u64,
    /// Format of COMBINE as `alpha,beta,ell` (general model).
    #[arg(long)]
    comb: Option<PfaffianFormat>,
    /// Format of AGGREGATE (general model).
    #[arg(long)]
    agg: Option<PfaffianFormat>,
    /// Format of READOUT (general model).
    #[arg(long)]
    read: Option<PfaffianFormat>,
    /// Sweep one variable: `L=1,2,4`, `N=...`, `d=...`, `q=...`, `c0=...`, `c1=...`.
    #[arg(long)]
    sweep: Option<String>,
    /// Also print the generalization-gap bound for this many samples.
    #[arg(long)]
    samples: Option<u64>,
    /// Confidence parameter of the gap bound.
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    /// Print how the system format is derived.
    #[arg(long)]
    explain: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Directory holding the dataset (or its parent); defaults to $VCGNN_DATA_DIR.
    #[arg(long)]
    dataset_dir: Option<PathBuf>,
    /// Dataset name, e.g. PROTEINS, NCI1, PTC_MR.
    #[arg(long)]
    dataset: Option<String>,
}

#[derive(Args)]
struct WlArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of ratio-ordered splits.
    #[arg(long, default_value_t = 4)]
    splits: usize,
    /// Ignore continuous node attributes when coloring.
    #[arg(long)]
    labels_only: bool,
    /// Per-graph CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Split summary CSV (stderr when omitted).
    #[arg(long)]
    split_out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "tanh")]
    activation: Activation,
    #[arg(long, default_value_t = 32)]
    hidden: usize,
    #[arg(long, default_value_t = 3)]
    layers: usize,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    #[arg(long, default_value_t = 32)]
    batch: usize,
    #[arg(long, default_value_t = 0.8)]
    train_frac: f64,
    #[arg(long)]
    labels_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    data: DataArgs,
    /// key = value settings; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Full-scale settings: 500 (E1) or 2000 (E2) epochs, 10 runs.
    #[arg(long)]
    paper_scale: bool,
    #[arg(long)]
    activation: Option<Activation>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    labels_only: bool,
    /// Output directory for the CSV files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// Raw rows written by `e1` or `e2`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    kind: PlotKind,
    #[arg(long)]
    out: PathBuf,
    /// Epochs drawn by sweep plots, comma separated.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<usize>>,
    #[arg(long)]
    fixed_layers: Option<usize>,
    #[arg(long)]
    fixed_hidden: Option<usize>,
    #[arg(long)]
    title: Option<String>,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match cli.command {
        Command::Bound(a) => bound(a, exec),
        Command::Stats(a) => stats(a),
        Command::Wl(a) => wl(a, exec),
        Command::Train(a) => train_cmd(a, exec),
        Command::E1(a) => e1(a, exec),
        Command::E2(a) => e2(a, exec),
        Command::Plot(a) => plot_cmd(a),
    }
}

fn emit(table: &CsvTable, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => table.write(p).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(table.to_csv_string().as_bytes())?;
            Ok(())
        }
    }
}

const BOUND_COLUMNS: [&str; 18] = [
    "model",
    "sigma",
    "L",
    "N",
    "d",
    "q",
    "c0",
    "c1",
    "p_bar",
    "alpha_bar",
    "beta_bar",
    "ell_bar",
    "s_bar",
    "H",
    "log2_B",
    "vc_bound",
    "closed_form",
    "exact_note",
];

#[derive(Clone, Copy)]
struct BoundPoint {
    layers: u64,
    nodes: u64,
    dim: u64,
    attr_dim: u64,
    c0: u64,
    c1: u64,
}

impl BoundPoint {
    fn with(mut self, var: &str, v: u64) -> Result<Self> {
        match var {
            "L" => self.layers = v,
            "N" => self.nodes = v,
            "d" => self.dim = v,
            "q" => self.attr_dim = v,
            "c0" | "C0" => self.c0 = v,
            "c1" | "C1" => self.c1 = v,
            _ => bail!("unknown sweep variable {var:?} (L, N, d, q, c0, c1)"),
        }
        Ok(self)
    }
}

struct BoundRow {
    chain: ChainReport,
    value: f64,
    closed_form: Option<f64>,
}

fn general_model(a: &BoundArgs, p: BoundPoint) -> GeneralModel {
    let mut m = GeneralModel::sum_aggregation(a.sigma, p.layers, p.nodes, p.dim, p.attr_dim);
    if let Some(f) = a.comb {
        m.comb = f;
    }
    if let Some(f) = a.agg {
        m.agg = f;
    }
    if let Some(f) = a.read {
        m.read = f;
    }
    m
}

fn evaluate(a: &BoundArgs, p: BoundPoint) -> Result<BoundRow> {
    Ok(match a.model {
        Model::General => {
            let b = bound_theorem1(&general_model(a, p))?;
            BoundRow {
                chain: b.chain,
                value: b.chain.vc,
                closed_form: Some(b.expanded),
            }
        }
        Model::Simple => {
            let b = bound_theorem3(a.sigma, p.layers, p.nodes, p.dim, p.attr_dim)?;
            BoundRow {
                chain: b.chain,
                value: b.chain.vc,
                closed_form: b.closed_form,
            }
        }
        Model::Colors => {
            let b = bound_theorem4(a.sigma, p.layers, p.dim, p.attr_dim, p.c0, p.c1)?;
            BoundRow {
                chain: b.chain,
                value: b.value,
                closed_form: Some(b.value),
            }
        }
    })
}

fn explain(a: &BoundArgs, p: BoundPoint) -> Result<()> {
    let s = a.sigma.format();
    eprintln!("format({}) = {s}", a.sigma);
    match a.model {
        Model::General => {
            let m = general_model(a, p);
            eprintln!("COMBINE   {}", m.comb);
            eprintln!("AGGREGATE {}", m.agg);
            eprintln!("READOUT   {}", m.read);
            let update = compose(m.comb, m.agg);
            eprintln!(
                "COMBINE o AGGREGATE = ({} + {} - 1 + {}*{}, {}, {} + {}) = {update}",
                m.agg.alpha, m.agg.beta, m.comb.alpha, m.agg.beta, m.comb.beta, m.comb.ell, m.agg.ell
            );
            eprintln!("alpha_bar = max({}, {}) = {}", update.alpha, m.read.alpha, update.alpha.max(m.read.alpha));
            eprintln!("beta_bar  = max({}, {}) = {}", m.comb.beta, m.read.beta, m.comb.beta.max(m.read.beta));
            eprintln!(
                "H = L*N*d*(ell_comb + ell_agg) + ell_read = {}*{}*{}*{} + {}",
                p.layers,
                p.nodes,
                p.dim,
                m.comb.ell + m.agg.ell,
                m.read.ell
            );
            eprintln!("p_bar = {} free parameters, ell_bar = p_bar * H", m.param_count()?);
        }
        Model::Simple | Model::Colors => {
            let poly3 = polynomial_format(3);
            let upd = compose(s, poly3);
            eprintln!(
                "update  sigma o poly3 = (0 + 3 - 1 + {}*3, {}, {}) = {upd}",
                s.alpha, s.beta, s.ell
            );
            eprintln!("readout sigma o poly2 = {}", compose(s, polynomial_format(2)));
            eprintln!("system alpha_bar = 2 + 3*alpha_sigma = {}", 2 + 3 * s.alpha);
            if matches!(a.model, Model::Simple) {
                let sys = system_format_simple(s, p.layers, p.nodes, p.dim)?;
                eprintln!("H = L*N*d + 1 = {}, ell_bar = p_bar * H * ell_sigma", sys.h);
            } else {
                eprintln!("H_c = C1*d + 1 = {}, s_c = C1*d + C0*q + 1", p.c1 * p.dim + 1);
            }
            if s == Activation::Logsig.format() {
                eprintln!(
                    "last Gabrielov factor (2p-1)(alpha+beta) - 2p + 2 = 16p - 7 for a (2,1,1) activation; \
                     the closed form keeps 16p - 7 (it is sometimes abbreviated to 16p)"
                );
            }
        }
    }
    Ok(())
}

fn bound(a: BoundArgs, exec: Execution) -> Result<()> {
    let base = BoundPoint {
        layers: a.layers,
        nodes: a.nodes,
        dim: a.dim,
        attr_dim: a.attr_dim,
        c0: a.c0,
        c1: a.c1,
    };
    let points: Vec<(Option<u64>, BoundPoint)> = match &a.sweep {
        None => vec![(None, base)],
        Some(spec) => {
            let (var, list) = spec.split_once('=').context("--sweep expects var=v1,v2,...")?;
            list.split(',')
                .map(|t| {
                    let v: u64 = t.trim().parse().with_context(|| format!("bad sweep value {t:?}"))?;
                    Ok((Some(v), base.with(var.trim(), v)?))
                })
                .collect::<Result<_>>()?
        }
    };
    if a.explain {
        explain(&a, base)?;
    }
    let results = par::map_slice(exec, &points, |(_, p)| evaluate(&a, *p));

    let model = match a.model {
        Model::General => "general",
        Model::Simple => "simple",
        Model::Colors => "colors",
    };
    let mut table = CsvTable::new(&BOUND_COLUMNS);
    let mut slope_points = Vec::new();
    for ((x, p), r) in points.iter().zip(results) {
        let r = r?;
        let i = r.chain.inputs;
        table.push(vec![
            model.into(),
            a.sigma.name().into(),
            p.layers.to_string(),
            p.nodes.to_string(),
            p.dim.to_string(),
            p.attr_dim.to_string(),
            p.c0.to_string(),
            p.c1.to_string(),
            i.p_bar.to_string(),
            i.alpha_bar.to_string(),
            i.beta_bar.to_string(),
            i.ell_bar.to_string(),
            i.s_bar.to_string(),
            i.h.to_string(),
            fmt_f64(r.chain.log2_b.log2_value),
            fmt_f64(r.value),
            r.closed_form.map(fmt_f64).unwrap_or_default(),
            r.chain.log2_b.exact_note.to_string(),
        ])?;
        if let Some(x) = x {
            slope_points.push((*x as f64, r.value));
        }
        if let Some(n) = a.samples {
            let g = generalization_gap_bound(n, r.value, a.eta)?;
            if g.clamped {
                eprintln!("gap bound (n = {n}, eta = {}): vacuous, the VC bound exceeds the sample size", a.eta);
            } else {
                eprintln!("gap bound (n = {n}, eta = {}): {}", a.eta, g.value);
            }
        }
    }
    if slope_points.len() >= 2 {
        match fit_loglog_slope(&slope_points) {
            Ok(s) => eprintln!("log-log slope over the sweep: {s:.4}"),
            Err(e) => eprintln!("no slope: {e}"),
        }
    }
    emit(&table, a.out.as_deref())
}

fn dataset_from(args: &DataArgs, default_name: &str) -> Result<Dataset> {
    let root = resolve_data_dir(args.dataset_dir.as_deref())?;
    let name = match &args.dataset {
        Some(n) => n.clone(),
        None if args.dataset_dir.is_some() => root
            .file_name()
            .and_then(|s| s.to_str())
            .map(str::to_string)
            .filter(|n| root.join(format!("{n}_A.txt")).is_file())
            .unwrap_or_else(|| default_name.to_string()),
        None => default_name.to_string(),
    };
    load_dataset(&root, &name).with_context(|| format!("loading {name} from {}", root.display()))
}

fn stats(a: DataArgs) -> Result<()> {
    let d = dataset_from(&a, "PTC_MR")?;
    let s = summarize(&d)?;
    let mut t = CsvTable::new(&["dataset", "graphs", "classes", "avg_nodes", "avg_edges", "max_nodes"]);
    t.push(vec![
        d.name().to_string(),
        s.graph_count.to_string(),
        s.class_count.to_string(),
        format!("{:.2}", s.avg_nodes),
        format!("{:.2}", s.avg_edges),
        s.max_nodes.to_string(),
    ])?;
    emit(&t, None)
}

fn attribute_mode(labels_only: bool) -> AttributeMode {
    if labels_only {
        AttributeMode::LabelsOnly
    } else {
        AttributeMode::LabelsAndAttributes
    }
}

fn wl(a: WlArgs, exec: Execution) -> Result<()> {
    let d = dataset_from(&a.data, "NCI1")?;
    let attrs = attribute_matrix(&d, attribute_mode(a.labels_only))?;
    let stats = dataset_color_stats(&d, &attrs, exec)?;
    let mut t = CsvTable::new(&["graph_id", "nodes", "c0", "cT", "c1", "T", "ratio"]);
    for (i, (s, g)) in stats.stats.iter().zip(d.graphs()).enumerate() {
        t.push(vec![
            i.to_string(),
            g.node_count().to_string(),
            s.c0.to_string(),
            s.c_stable.to_string(),
            s.c1.to_string(),
            s.stabilization_step.to_string(),
            fmt_f64(s.ratio),
        ])?;
    }
    emit(&t, a.out.as_deref())?;
    let splits = color_splits(&d, &attrs, a.splits, exec)?;
    let summary = split_summary(&splits)?;
    match &a.split_out {
        Some(p) => summary.write(p)?,
        None => eprint!("{}", summary.to_csv_string()),
    }
    Ok(())
}

fn train_cmd(a: TrainArgs, exec: Execution) -> Result<()> {
    let d = dataset_from(&a.data, "PTC_MR")?;
    let cfg = TrainConfig {
        learning_rate: a.lr,
        batch_size: a.batch,
        epochs: a.epochs,
        seed: a.seed,
        activation: a.activation,
        hidden: a.hidden,
        layers: a.layers,
        train_fraction: a.train_frac,
        attribute_mode: attribute_mode(a.labels_only),
        execution: exec,
        ..TrainConfig::default()
    };
    let h = train(&d, &cfg)?;
    let mut t = CsvTable::new(&["epoch", "train_acc", "test_acc", "diff", "mean_loss"]);
    let row = |r: &EpochRecord| {
        vec![
            r.epoch.to_string(),
            fmt_f64(r.train_accuracy),
            fmt_f64(r.test_accuracy),
            fmt_f64(r.diff),
            fmt_f64(r.mean_loss),
        ]
    };
    t.push(row(&h.initial))?;
    for r in &h.epochs {
        t.push(row(r))?;
    }
    emit(&t, a.out.as_deref())
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    Ok(match path {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    })
}

fn experiment_data(a: &ExperimentArgs, file: &ConfigFile, default_name: &str) -> Result<Dataset> {
    let mut data = a.data.clone();
    if data.dataset.is_none() {
        data.dataset = file.string("dataset")?;
    }
    if data.dataset_dir.is_none() {
        data.dataset_dir = file.string("dataset_dir")?.map(PathBuf::from);
    }
    dataset_from(&data, default_name)
}

fn write_to(dir: &Path, name: &str, table: &CsvTable) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let p = dir.join(name);
    table.write(&p).with_context(|| format!("writing {}", p.display()))?;
    log::info!("wrote {}", p.display());
    Ok(())
}

fn e1(a: ExperimentArgs, exec: Execution) -> Result<()> {
    let file = load_config(a.config.as_deref())?;
    let paper = a.paper_scale || file.bool("paper_scale")?.unwrap_or(false);
    let activation = a.activation.unwrap_or(Activation::Tanh);
    let mut cfg = if paper {
        E1Config::paper(activation)
    } else {
        E1Config::desk(activation)
    };
    file.apply_e1(&mut cfg)?;
    if let Some(x) = a.activation {
        cfg.activation = x;
    }
    if let Some(x) = a.epochs {
        cfg.epochs = x;
    }
    if let Some(x) = a.runs {
        cfg.runs = x;
    }
    if let Some(x) = a.seed {
        cfg.base_seed = x;
    }
    if a.labels_only {
        cfg.base.attribute_mode = AttributeMode::LabelsOnly;
    }
    cfg.execution = exec;
    let d = experiment_data(&a, &file, "PTC_MR")?;
    let out = run_e1(&d, &cfg)?;
    write_to(&a.out_dir, "e1_rows.csv", &out.rows)?;
    write_to(&a.out_dir, "e1_summary.csv", &out.summary)
}

fn e2(a: ExperimentArgs, exec: Execution) -> Result<()> {
    let file = load_config(a.config.as_deref())?;
    let paper = a.paper_scale || file.bool("paper_scale")?.unwrap_or(false);
    let mut cfg = if paper { E2Config::paper() } else { E2Config::desk() };
    file.apply_e2(&mut cfg)?;
    if let Some(x) = a.activation {
        cfg.activation = x;
    }
    if let Some(x) = a.epochs {
        cfg.epochs = x;
    }
    if let Some(x) = a.runs {
        cfg.runs = x;
    }
    if let Some(x) = a.seed {
        cfg.base_seed = x;
    }
    if a.labels_only {
        cfg.base.attribute_mode = AttributeMode::LabelsOnly;
    }
    cfg.execution = exec;
    let d = experiment_data(&a, &file, "NCI1")?;
    let out = run_e2(&d, &cfg)?;
    write_to(&a.out_dir, "e2_splits.csv", &out.split_table)?;
    write_to(&a.out_dir, "e2_rows.csv", &out.rows)?;
    write_to(&a.out_dir, "e2_summary.csv", &out.summary)
}

fn plot_cmd(a: PlotArgs) -> Result<()> {
    let rows = CsvTable::read(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let opts = PlotOptions {
        snapshots: a.snapshots,
        fixed_layers: a.fixed_layers,
        fixed_hidden: a.fixed_hidden,
        title: a.title,
    };
    let svg = plot(&rows, a.kind, &opts)?;
    std::fs::write(&a.out, svg).with_context(|| format!("writing {}", a.out.display()))?;
    Ok(())
}
