//! 1-WL color refinement, per-graph color statistics, distinguishability and
//! the ratio-ordered dataset split.
//!
//! Colors are canonical integers handed out by a [`ColorDictionary`]. The
//! dictionary is exact: a new color is issued for every distinct
//! `(old color, sorted neighbor colors)` signature, so two nodes share a
//! color iff their signatures are equal. Sharing one dictionary makes colors
//! comparable across graphs.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::graph::{AttributeMatrix, Dataset, Graph};
use crate::par::{self, Execution};

#[derive(Debug, Error, PartialEq)]
pub enum WlError {
    #[error("initial coloring has {got} entries for {expected} nodes")]
    InitLength { expected: usize, got: usize },
    #[error("cannot split {size} graphs into {k} groups")]
    SplitCount { size: usize, k: usize },
    #[error("attribute matrix covers {got} graphs, dataset has {expected}")]
    AttributeGraphs { expected: usize, got: usize },
}

/// Injective map from initial attributes and refinement signatures to
/// color ids.
#[derive(Debug, Default, Clone)]
pub struct ColorDictionary {
    initial: HashMap<Vec<u64>, u32>,
    refined: HashMap<(u32, Vec<u32>), u32>,
    next: u32,
}

impl ColorDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    fn issue(&mut self) -> u32 {
        let id = self.next;
        self.next += 1;
        id
    }

    /// Color of an attribute vector, compared bitwise.
    pub fn intern_attribute(&mut self, attr: &[f64]) -> u32 {
        let key: Vec<u64> = attr.iter().map(|x| x.to_bits()).collect();
        if let Some(&id) = self.initial.get(&key) {
            return id;
        }
        let id = self.issue();
        self.initial.insert(key, id);
        id
    }

    /// Color of a `(color, multiset of neighbor colors)` pair. `neighbors`
    /// must be sorted.
    pub fn intern_signature(&mut self, color: u32, neighbors: Vec<u32>) -> u32 {
        let key = (color, neighbors);
        if let Some(&id) = self.refined.get(&key) {
            return id;
        }
        let id = self.issue();
        self.refined.insert(key, id);
        id
    }

    /// Total number of colors issued so far.
    pub fn len(&self) -> usize {
        self.next as usize
    }

    pub fn is_empty(&self) -> bool {
        self.next == 0
    }
}

/// Output of color refinement on one graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorRefinementResult {
    /// `partitions[t][v]` is `c^(t)(v)` for `t = 0..=T`.
    pub partitions: Vec<Vec<u32>>,
    /// `counts[t] = C^t(G)`.
    pub counts: Vec<usize>,
    /// First step `T` whose partition the next refinement step leaves unchanged.
    pub stabilization_step: usize,
}

impl ColorRefinementResult {
    pub fn stable_colors(&self) -> &[u32] {
        &self.partitions[self.stabilization_step]
    }

    pub fn stable_count(&self) -> usize {
        self.counts[self.stabilization_step]
    }
}

fn distinct(colors: &[u32]) -> usize {
    colors.iter().collect::<BTreeSet<_>>().len()
}

fn signatures(g: &Graph, colors: &[u32]) -> Vec<(u32, Vec<u32>)> {
    (0..g.node_count())
        .map(|v| {
            let mut ms: Vec<u32> = g.neighbors(v).iter().map(|&u| colors[u]).collect();
            ms.sort_unstable();
            (colors[v], ms)
        })
        .collect()
}

/// Canonicalizes caller-supplied initial colors through `dict`.
fn canonical_init(dict: &mut ColorDictionary, init: &[u32]) -> Vec<u32> {
    init.iter().map(|&c| dict.intern_attribute(&[f64::from(c)])).collect()
}

struct RefineState {
    current: Vec<u32>,
    partitions: Vec<Vec<u32>>,
    counts: Vec<usize>,
    done: bool,
}

impl RefineState {
    fn new(init: Vec<u32>) -> Self {
        let c0 = distinct(&init);
        RefineState {
            current: init.clone(),
            partitions: vec![init],
            counts: vec![c0],
            done: false,
        }
    }

    fn advance(&mut self, next: Vec<u32>) {
        let c = distinct(&next);
        if c == *self.counts.last().expect("nonempty") {
            self.done = true;
        } else {
            self.partitions.push(next.clone());
            self.counts.push(c);
            self.current = next;
        }
    }

    fn finish(self) -> ColorRefinementResult {
        let t = self.partitions.len() - 1;
        ColorRefinementResult {
            partitions: self.partitions,
            counts: self.counts,
            stabilization_step: t,
        }
    }
}

/// Refines `g` from `init` with a fresh dictionary.
pub fn refine(g: &Graph, init: &[u32]) -> Result<ColorRefinementResult, WlError> {
    let mut dict = ColorDictionary::new();
    let init = check_init(g, init).map(|i| canonical_init(&mut dict, i))?;
    Ok(refine_canonical(&mut dict, g, init))
}

/// Refines `g` with the uniform initial coloring.
pub fn refine_uniform(g: &Graph) -> ColorRefinementResult {
    refine(g, &vec![0; g.node_count()]).expect("length matches")
}

fn check_init<'a>(g: &Graph, init: &'a [u32]) -> Result<&'a [u32], WlError> {
    if init.len() != g.node_count() {
        return Err(WlError::InitLength {
            expected: g.node_count(),
            got: init.len(),
        });
    }
    Ok(init)
}

/// Refines `g` whose initial colors already come from `dict`.
pub fn refine_canonical(dict: &mut ColorDictionary, g: &Graph, init: Vec<u32>) -> ColorRefinementResult {
    let mut state = RefineState::new(init);
    while !state.done {
        let next = signatures(g, &state.current)
            .into_iter()
            .map(|(c, ms)| dict.intern_signature(c, ms))
            .collect();
        state.advance(next);
    }
    state.finish()
}

/// Initial colors `HASH_0(α(v))` for every graph, drawn from `dict`.
pub fn initial_colors(dict: &mut ColorDictionary, attrs: &AttributeMatrix) -> Vec<Vec<u32>> {
    attrs
        .graphs
        .iter()
        .map(|block| {
            if attrs.dim == 0 {
                return Vec::new();
            }
            block.chunks(attrs.dim).map(|row| dict.intern_attribute(row)).collect()
        })
        .collect()
}

/// Joint refinement of every graph of a dataset with one shared dictionary.
#[derive(Debug, Clone)]
pub struct DatasetColoring {
    pub results: Vec<ColorRefinementResult>,
    pub dictionary: ColorDictionary,
}

/// Refines all graphs step by step. Signatures are computed in parallel;
/// ids are issued sequentially in graph order, so the result does not depend
/// on scheduling.
pub fn refine_dataset(
    dataset: &Dataset,
    attrs: &AttributeMatrix,
    exec: Execution,
) -> Result<DatasetColoring, WlError> {
    if attrs.graphs.len() != dataset.len() {
        return Err(WlError::AttributeGraphs {
            expected: dataset.len(),
            got: attrs.graphs.len(),
        });
    }
    let mut dict = ColorDictionary::new();
    let inits = initial_colors(&mut dict, attrs);
    let graphs = dataset.graphs();
    let mut states: Vec<RefineState> = inits.into_iter().map(RefineState::new).collect();

    loop {
        let active: Vec<usize> = (0..states.len()).filter(|&i| !states[i].done).collect();
        if active.is_empty() {
            break;
        }
        let sigs = {
            let states = &states;
            par::map_slice(exec, &active, |&i| signatures(&graphs[i], &states[i].current))
        };
        for (&i, sig) in active.iter().zip(sigs) {
            let next = sig.into_iter().map(|(c, ms)| dict.intern_signature(c, ms)).collect();
            states[i].advance(next);
        }
    }
    Ok(DatasetColoring {
        results: states.into_iter().map(RefineState::finish).collect(),
        dictionary: dict,
    })
}

/// `C^0(G)`, `C_1(G) = Σ_{t=1}^{T} C^t(G)` and `|V(G)| / C^T(G)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorStats {
    pub c0: usize,
    pub c1: usize,
    pub c_stable: usize,
    pub stabilization_step: usize,
    pub ratio: f64,
}

pub fn color_stats(result: &ColorRefinementResult, node_count: usize) -> ColorStats {
    let c_stable = result.stable_count();
    let ratio = if c_stable == 0 {
        1.0
    } else {
        node_count as f64 / c_stable as f64
    };
    ColorStats {
        c0: result.counts[0],
        c1: result.counts[1..].iter().sum(),
        c_stable,
        stabilization_step: result.stabilization_step,
        ratio,
    }
}

/// Runs refinement on the disjoint union of `g1` and `g2` and reports
/// whether the color multisets of the two parts ever differ.
///
/// Initial colors are arbitrary integers compared by value across both
/// graphs.
pub fn distinguishable(g1: &Graph, init1: &[u32], g2: &Graph, init2: &[u32]) -> Result<bool, WlError> {
    check_init(g1, init1)?;
    check_init(g2, init2)?;
    let n1 = g1.node_count();
    let n = n1 + g2.node_count();
    let union = Graph::from_edges(
        n,
        g1.edges()
            .iter()
            .copied()
            .chain(g2.edges().iter().map(|&(u, v)| (u + n1, v + n1))),
    )
    .expect("offset edges are in range");

    let mut dict = ColorDictionary::new();
    let init: Vec<u32> = canonical_init(&mut dict, &[init1, init2].concat());
    let differ = |colors: &[u32]| {
        let mut a = colors[..n1].to_vec();
        let mut b = colors[n1..].to_vec();
        a.sort_unstable();
        b.sort_unstable();
        a != b
    };

    let mut state = RefineState::new(init);
    if differ(&state.current) {
        return Ok(true);
    }
    while !state.done {
        let next: Vec<u32> = signatures(&union, &state.current)
            .into_iter()
            .map(|(c, ms)| dict.intern_signature(c, ms))
            .collect();
        if differ(&next) {
            return Ok(true);
        }
        state.advance(next);
    }
    Ok(false)
}

/// [`distinguishable`] with uniform initial colors on both graphs.
pub fn distinguishable_uniform(g1: &Graph, g2: &Graph) -> bool {
    distinguishable(g1, &vec![0; g1.node_count()], g2, &vec![0; g2.node_count()]).expect("lengths match")
}

/// One contiguous group of the ratio-ordered dataset.
#[derive(Debug, Clone)]
pub struct Split {
    pub index: usize,
    /// Positions in the original dataset, in sorted-ratio order.
    pub graph_indices: Vec<usize>,
    pub dataset: Dataset,
    pub total_nodes: usize,
    /// `Σ_G C^T(G)` over the split.
    pub total_colors: usize,
    /// Distinct stable color ids over the split, shared dictionary.
    pub distinct_colors: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Per-graph WL statistics of a dataset, computed once and reused.
#[derive(Debug, Clone)]
pub struct DatasetColorStats {
    pub coloring: DatasetColoring,
    pub stats: Vec<ColorStats>,
}

pub fn dataset_color_stats(
    dataset: &Dataset,
    attrs: &AttributeMatrix,
    exec: Execution,
) -> Result<DatasetColorStats, WlError> {
    let coloring = refine_dataset(dataset, attrs, exec)?;
    let stats = coloring
        .results
        .iter()
        .zip(dataset.graphs())
        .map(|(r, g)| color_stats(r, g.node_count()))
        .collect();
    Ok(DatasetColorStats { coloring, stats })
}

/// Sorts graphs by ascending `|V|/C^T` (stable on original index) and cuts
/// them into `k` contiguous groups of equal size, remainder going to the
/// earliest groups.
pub fn order_and_split(dataset: &Dataset, attrs: &AttributeMatrix, k: usize) -> Result<Vec<Split>, WlError> {
    let stats = dataset_color_stats(dataset, attrs, Execution::default())?;
    split_by_ratio(dataset, &stats, k)
}

pub fn split_by_ratio(dataset: &Dataset, stats: &DatasetColorStats, k: usize) -> Result<Vec<Split>, WlError> {
    if k == 0 || k > dataset.len() {
        return Err(WlError::SplitCount { size: dataset.len(), k });
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    order.sort_by(|&a, &b| stats.stats[a].ratio.total_cmp(&stats.stats[b].ratio).then(a.cmp(&b)));

    let base = dataset.len() / k;
    let extra = dataset.len() % k;
    let mut splits = Vec::with_capacity(k);
    let mut start = 0;
    for index in 0..k {
        let size = base + usize::from(index < extra);
        let graph_indices = order[start..start + size].to_vec();
        start += size;

        let total_nodes = graph_indices.iter().map(|&i| dataset.graphs()[i].node_count()).sum();
        let total_colors = graph_indices.iter().map(|&i| stats.stats[i].c_stable).sum();
        let distinct_colors = graph_indices
            .iter()
            .flat_map(|&i| stats.coloring.results[i].stable_colors().iter().copied())
            .collect::<BTreeSet<_>>()
            .len();
        let ratios = graph_indices.iter().map(|&i| stats.stats[i].ratio);
        let min_ratio = ratios.clone().fold(f64::INFINITY, f64::min);
        let max_ratio = ratios.fold(f64::NEG_INFINITY, f64::max);
        let name = format!("{}-split{}", dataset.name(), index + 1);
        splits.push(Split {
            index,
            dataset: dataset.subset(name, &graph_indices),
            graph_indices,
            total_nodes,
            total_colors,
            distinct_colors,
            min_ratio,
            max_ratio,
        });
    }
    Ok(splits)
}
