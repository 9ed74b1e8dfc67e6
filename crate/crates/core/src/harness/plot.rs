use std::collections::BTreeMap;
use std::str::FromStr;

use super::{aggregate, HarnessError};
use crate::tud_io::{render_svg_lines, CsvTable, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    DiffVsEpoch,
    DiffVsHidden,
    DiffVsLayers,
    DiffVsRatio,
}

impl FromStr for PlotKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "diff_vs_epoch" => Ok(PlotKind::DiffVsEpoch),
            "diff_vs_hidden" => Ok(PlotKind::DiffVsHidden),
            "diff_vs_layers" => Ok(PlotKind::DiffVsLayers),
            "diff_vs_ratio" => Ok(PlotKind::DiffVsRatio),
            _ => Err(HarnessError::Config(format!(
                "unknown plot kind {s:?} (diff_vs_epoch, diff_vs_hidden, diff_vs_layers, diff_vs_ratio)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlotOptions {
    /// Epochs drawn by the sweep plots; default `{E/2, 3E/4, E}`.
    pub snapshots: Option<Vec<usize>>,
    /// Depth selecting the hidden-size sweep rows (default 3).
    pub fixed_layers: Option<usize>,
    /// Width selecting the depth sweep rows (default 32).
    pub fixed_hidden: Option<usize>,
    pub title: Option<String>,
}

/// `{E/2, 3E/4, E}` without duplicates or zero.
pub fn snapshot_epochs(last: usize) -> Vec<usize> {
    let mut s = vec![last / 2, 3 * last / 4, last];
    s.retain(|&e| e > 0);
    s.dedup();
    s
}

fn key_columns(rows: &CsvTable) -> Vec<&'static str> {
    if rows.column_index("split_index").is_ok() {
        vec!["split_index"]
    } else {
        ["dataset", "activation", "hidden", "layers"]
            .into_iter()
            .filter(|c| rows.column_index(c).is_ok())
            .collect()
    }
}

/// Renders raw run rows as an SVG line chart with ±1 std bands.
pub fn plot(rows: &CsvTable, kind: PlotKind, opts: &PlotOptions) -> Result<String, HarnessError> {
    for c in ["epoch", "diff", "train_acc", "test_acc"] {
        rows.column_index(c)?;
    }
    match kind {
        PlotKind::DiffVsEpoch => diff_vs_epoch(rows, opts),
        PlotKind::DiffVsHidden => {
            rows.column_index("hidden")?;
            let layers = opts.fixed_layers.unwrap_or(3).to_string();
            sweep_plot(rows, opts, "hidden", "hidden size", Some(("layers", layers)))
        }
        PlotKind::DiffVsLayers => {
            rows.column_index("layers")?;
            let hidden = opts.fixed_hidden.unwrap_or(32).to_string();
            sweep_plot(rows, opts, "layers", "layers", Some(("hidden", hidden)))
        }
        PlotKind::DiffVsRatio => {
            for c in ["split_index", "min_ratio", "max_ratio"] {
                rows.column_index(c)?;
            }
            sweep_plot(rows, opts, "ratio", "|V|/C^T (split midpoint)", None)
        }
    }
}

fn diff_vs_epoch(rows: &CsvTable, opts: &PlotOptions) -> Result<String, HarnessError> {
    let keys = key_columns(rows);
    let aggs = aggregate(rows, &keys)?;
    // label only with the key columns that actually vary
    let varying: Vec<usize> = (0..keys.len())
        .filter(|&i| aggs.iter().any(|a| a.key[i] != aggs[0].key[i]))
        .collect();
    let label_idx = if varying.is_empty() { vec![keys.len() - 1] } else { varying };

    let mut series: Vec<Series> = Vec::new();
    let mut current: Option<Vec<String>> = None;
    for a in &aggs {
        if current.as_ref() != Some(&a.key) {
            let label = label_idx.iter().map(|&i| format!("{}={}", keys[i], a.key[i])).collect::<Vec<_>>().join(", ");
            series.push(Series::new(label, Vec::new()).with_band(Vec::new()));
            current = Some(a.key.clone());
        }
        let s = series.last_mut().expect("pushed above");
        let x = a.epoch as f64;
        s.points.push((x, a.mean_diff));
        if let Some(b) = s.band.as_mut() {
            b.push((x, a.mean_diff - a.std_diff, a.mean_diff + a.std_diff));
        }
    }
    let title = opts.title.clone().unwrap_or_else(|| "diff vs epoch".into());
    Ok(render_svg_lines(&series, "epoch", "diff", &title)?)
}

fn sweep_plot(
    rows: &CsvTable,
    opts: &PlotOptions,
    x_column: &str,
    x_label: &str,
    filter: Option<(&str, String)>,
) -> Result<String, HarnessError> {
    let mut selected = rows.clone();
    if let Some((col, value)) = &filter {
        let idx = rows.column_index(col)?;
        selected.rows.retain(|r| &r[idx] == value);
        if selected.rows.is_empty() {
            return Err(HarnessError::Data(format!("no rows with {col} = {value}")));
        }
    }
    let keys: Vec<&str> = if x_column == "ratio" {
        vec!["split_index", "min_ratio", "max_ratio"]
    } else {
        key_columns(&selected)
    };
    let aggs = aggregate(&selected, &keys)?;
    let last = aggs.iter().map(|a| a.epoch).max().unwrap_or(0);
    let snapshots = opts.snapshots.clone().unwrap_or_else(|| snapshot_epochs(last));

    let value = |key: &[String], c: &str| -> Result<f64, HarnessError> {
        let i = keys.iter().position(|k| *k == c).expect("x columns are key columns");
        key[i].parse::<f64>().map_err(|e| HarnessError::Data(format!("{c} = {:?}: {e}", key[i])))
    };
    let x_of = |key: &[String]| -> Result<f64, HarnessError> {
        if x_column == "ratio" {
            Ok((value(key, "min_ratio")? + value(key, "max_ratio")?) / 2.0)
        } else {
            value(key, x_column)
        }
    };

    let mut series = Vec::new();
    for &epoch in &snapshots {
        // mean over any other varying key columns at the same x
        let mut by_x: BTreeMap<u64, (f64, Vec<(f64, f64)>)> = BTreeMap::new();
        for a in aggs.iter().filter(|a| a.epoch == epoch) {
            let x = x_of(&a.key)?;
            by_x.entry(x.to_bits()).or_insert((x, Vec::new())).1.push((a.mean_diff, a.std_diff));
        }
        if by_x.is_empty() {
            return Err(HarnessError::Data(format!("no rows at epoch {epoch}")));
        }
        let mut pts: Vec<(f64, f64, f64)> = by_x
            .values()
            .map(|(x, v)| {
                let n = v.len() as f64;
                (*x, v.iter().map(|p| p.0).sum::<f64>() / n, v.iter().map(|p| p.1).sum::<f64>() / n)
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        series.push(
            Series::new(format!("epoch {epoch}"), pts.iter().map(|p| (p.0, p.1)).collect())
                .with_band(pts.iter().map(|p| (p.0, p.1 - p.2, p.1 + p.2)).collect()),
        );
    }
    let title = opts.title.clone().unwrap_or_else(|| format!("diff vs {x_column}"));
    Ok(render_svg_lines(&series, x_label, "diff", &title)?)
}
