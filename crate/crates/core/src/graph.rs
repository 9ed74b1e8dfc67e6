//! Undirected node-attributed graphs and binary-labeled graph datasets.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("node index {index} out of range for graph with {node_count} nodes")]
    NodeIndex { index: usize, node_count: usize },
    #[error("expected {expected} per-node entries, got {got}")]
    NodeCount { expected: usize, got: usize },
    #[error("node {node} has attribute dimension {got}, expected {expected}")]
    AttributeDim {
        node: usize,
        expected: usize,
        got: usize,
    },
    #[error("dataset has {graphs} graphs but {labels} labels")]
    LabelCount { graphs: usize, labels: usize },
    #[error("graph label {0} is not in {{0,1}}")]
    NonBinaryLabel(u8),
    #[error("dataset is empty")]
    Empty,
    #[error("graph {0} has node labels but other graphs do not")]
    MixedNodeLabels(usize),
    #[error("graph {0} has node attributes but other graphs do not")]
    MixedNodeAttributes(usize),
    #[error("graph {graph}: attribute dimension {got} differs from dataset dimension {expected}")]
    DatasetAttributeDim {
        graph: usize,
        expected: usize,
        got: usize,
    },
}

/// An undirected simple graph `G = (V, E, α)`.
///
/// Edges are stored once as `(u, v)` with `u < v`; neighbor lists are kept in
/// CSR form and sorted. Self-loops passed to the constructor are dropped and
/// counted in [`Graph::self_loops_dropped`].
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    node_labels: Option<Vec<i64>>,
    node_attributes: Option<Vec<Vec<f64>>>,
    self_loops_dropped: usize,
}

impl Graph {
    /// Builds a graph, deduplicating edges given in either direction.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        let mut self_loops = 0;
        for (a, b) in edges {
            for index in [a, b] {
                if index >= node_count {
                    return Err(GraphError::NodeIndex { index, node_count });
                }
            }
            if a == b {
                self_loops += 1;
                continue;
            }
            set.insert((a.min(b), a.max(b)));
        }
        if self_loops > 0 {
            log::warn!("dropped {self_loops} self-loop(s)");
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();

        let mut degree = vec![0usize; node_count];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..node_count].to_vec();
        let mut neighbors = vec![0usize; 2 * edges.len()];
        for &(u, v) in &edges {
            neighbors[fill[u]] = v;
            fill[u] += 1;
            neighbors[fill[v]] = u;
            fill[v] += 1;
        }
        for v in 0..node_count {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }

        Ok(Graph {
            node_count,
            edges,
            offsets,
            neighbors,
            node_labels: None,
            node_attributes: None,
            self_loops_dropped: self_loops,
        })
    }

    pub fn with_node_labels(mut self, labels: Vec<i64>) -> Result<Self, GraphError> {
        if labels.len() != self.node_count {
            return Err(GraphError::NodeCount {
                expected: self.node_count,
                got: labels.len(),
            });
        }
        self.node_labels = Some(labels);
        Ok(self)
    }

    pub fn with_node_attributes(mut self, attributes: Vec<Vec<f64>>) -> Result<Self, GraphError> {
        if attributes.len() != self.node_count {
            return Err(GraphError::NodeCount {
                expected: self.node_count,
                got: attributes.len(),
            });
        }
        if let Some(first) = attributes.first() {
            let expected = first.len();
            if let Some((node, row)) = attributes
                .iter()
                .enumerate()
                .find(|(_, row)| row.len() != expected)
            {
                return Err(GraphError::AttributeDim {
                    node,
                    expected,
                    got: row.len(),
                });
            }
        }
        self.node_attributes = Some(attributes);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Undirected edge count.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_labels(&self) -> Option<&[i64]> {
        self.node_labels.as_deref()
    }

    pub fn node_attributes(&self) -> Option<&[Vec<f64>]> {
        self.node_attributes.as_deref()
    }

    /// Raw attribute dimension, `None` when the graph has no attributes.
    pub fn attribute_dim(&self) -> Option<usize> {
        self.node_attributes
            .as_ref()
            .map(|a| a.first().map_or(0, Vec::len))
    }

    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops_dropped
    }

    /// `ne(v)` without bounds checking beyond the slice index.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// `ne(v) = { u | {u,v} ∈ E }`, sorted ascending.
    pub fn neighborhood(&self, v: usize) -> Result<&[usize], GraphError> {
        if v >= self.node_count {
            return Err(GraphError::NodeIndex {
                index: v,
                node_count: self.node_count,
            });
        }
        Ok(self.neighbors(v))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Binary adjacency entry `m_{v,u}`.
    pub fn is_adjacent(&self, v: usize, u: usize) -> bool {
        v < self.node_count && u < self.node_count && self.neighbors(v).binary_search(&u).is_ok()
    }

    /// Dense symmetric adjacency matrix, row-major `n × n`.
    pub fn adjacency_matrix(&self) -> Vec<u8> {
        let n = self.node_count;
        let mut a = vec![0u8; n * n];
        for &(u, v) in &self.edges {
            a[u * n + v] = 1;
            a[v * n + u] = 1;
        }
        a
    }

    /// Relabels nodes: node `v` of `self` becomes node `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        let n = self.node_count;
        if perm.len() != n {
            return Err(GraphError::NodeCount {
                expected: n,
                got: perm.len(),
            });
        }
        let mut g = Graph::from_edges(n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))?;
        if let Some(labels) = &self.node_labels {
            let mut out = vec![0; n];
            for (v, &l) in labels.iter().enumerate() {
                out[perm[v]] = l;
            }
            g = g.with_node_labels(out)?;
        }
        if let Some(attrs) = &self.node_attributes {
            let mut out = vec![Vec::new(); n];
            for (v, a) in attrs.iter().enumerate() {
                out[perm[v]] = a.clone();
            }
            g = g.with_node_attributes(out)?;
        }
        Ok(g)
    }
}

/// An ordered collection of graphs with binary graph labels in `{0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    graphs: Vec<Graph>,
    labels: Vec<u8>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, graphs: Vec<Graph>, labels: Vec<u8>) -> Result<Self, GraphError> {
        if graphs.len() != labels.len() {
            return Err(GraphError::LabelCount {
                graphs: graphs.len(),
                labels: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
            return Err(GraphError::NonBinaryLabel(bad));
        }
        Ok(Dataset {
            name: name.into(),
            graphs,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Number of distinct graph labels present.
    pub fn class_count(&self) -> usize {
        self.labels.iter().collect::<BTreeSet<_>>().len()
    }

    /// Largest node count over the dataset (`N`).
    pub fn max_nodes(&self) -> usize {
        self.graphs.iter().map(Graph::node_count).max().unwrap_or(0)
    }

    /// Sub-dataset made of the graphs at `indices`, in that order.
    pub fn subset(&self, name: impl Into<String>, indices: &[usize]) -> Dataset {
        Dataset {
            name: name.into(),
            graphs: indices.iter().map(|&i| self.graphs[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Table-style statistics of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    pub graph_count: usize,
    pub class_count: usize,
    pub avg_nodes: f64,
    /// Undirected edges, each counted once.
    pub avg_edges: f64,
    pub max_nodes: usize,
}

pub fn summarize(dataset: &Dataset) -> Result<DatasetStats, GraphError> {
    if dataset.is_empty() {
        return Err(GraphError::Empty);
    }
    let total_nodes: usize = dataset.graphs.iter().map(Graph::node_count).sum();
    let total_edges: usize = dataset.graphs.iter().map(Graph::edge_count).sum();
    let n = dataset.len() as f64;
    Ok(DatasetStats {
        graph_count: dataset.len(),
        class_count: dataset.class_count(),
        avg_nodes: total_nodes as f64 / n,
        avg_edges: total_edges as f64 / n,
        max_nodes: dataset.max_nodes(),
    })
}

/// Which node information feeds the attribute map `α(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AttributeMode {
    /// One-hot categorical labels concatenated with raw attributes.
    #[default]
    LabelsAndAttributes,
    /// One-hot categorical labels only; raw attributes are ignored.
    LabelsOnly,
}

/// Per-node real vectors of uniform dimension `q`, one row-major `n × q`
/// block per graph.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeMatrix {
    pub dim: usize,
    pub graphs: Vec<Vec<f64>>,
}

impl AttributeMatrix {
    pub fn row(&self, graph: usize, node: usize) -> &[f64] {
        &self.graphs[graph][node * self.dim..(node + 1) * self.dim]
    }
}

/// Realizes `α : V → R^q` for every graph in the dataset.
///
/// Categorical labels are one-hot encoded over the dataset-wide sorted label
/// alphabet. Graphs with neither labels nor attributes get the constant
/// scalar `1.0` per node.
pub fn attribute_matrix(dataset: &Dataset, mode: AttributeMode) -> Result<AttributeMatrix, GraphError> {
    let graphs = dataset.graphs();
    let has_labels = graphs.first().is_some_and(|g| g.node_labels().is_some());
    let has_attrs =
        mode == AttributeMode::LabelsAndAttributes && graphs.first().is_some_and(|g| g.node_attributes().is_some());

    let mut alphabet = BTreeSet::new();
    let mut raw_dim: Option<usize> = None;
    for (i, g) in graphs.iter().enumerate() {
        match (has_labels, g.node_labels()) {
            (true, Some(labels)) => alphabet.extend(labels.iter().copied()),
            (false, None) => {}
            _ => return Err(GraphError::MixedNodeLabels(i)),
        }
        if mode == AttributeMode::LabelsAndAttributes {
            match (has_attrs, g.node_attributes()) {
                (true, Some(_)) => {
                    let dim = g.attribute_dim().unwrap_or(0);
                    if g.node_count() > 0 {
                        match raw_dim {
                            None => raw_dim = Some(dim),
                            Some(expected) if expected != dim => {
                                return Err(GraphError::DatasetAttributeDim {
                                    graph: i,
                                    expected,
                                    got: dim,
                                })
                            }
                            _ => {}
                        }
                    }
                }
                (false, None) => {}
                _ => return Err(GraphError::MixedNodeAttributes(i)),
            }
        }
    }
    let alphabet: Vec<i64> = alphabet.into_iter().collect();
    let raw_dim = raw_dim.unwrap_or(0);

    if !has_labels && !has_attrs {
        return Ok(AttributeMatrix {
            dim: 1,
            graphs: graphs.iter().map(|g| vec![1.0; g.node_count()]).collect(),
        });
    }

    let dim = alphabet.len() + raw_dim;
    let out = graphs
        .iter()
        .map(|g| {
            let mut block = vec![0.0; g.node_count() * dim];
            for v in 0..g.node_count() {
                let row = &mut block[v * dim..(v + 1) * dim];
                if let Some(labels) = g.node_labels() {
                    let slot = alphabet.binary_search(&labels[v]).expect("label in alphabet");
                    row[slot] = 1.0;
                }
                if has_attrs {
                    if let Some(attrs) = g.node_attributes() {
                        row[alphabet.len()..].copy_from_slice(&attrs[v]);
                    }
                }
            }
            block
        })
        .collect();
    Ok(AttributeMatrix { dim, graphs: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn neighborhood_examples() {
        assert_eq!(k3().neighborhood(0).unwrap(), &[1, 2]);
        let isolated = Graph::from_edges(1, []).unwrap();
        assert!(isolated.neighborhood(0).unwrap().is_empty());
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.neighborhood(1).unwrap(), &[0, 2]);
        assert_eq!(
            path.neighborhood(3),
            Err(GraphError::NodeIndex {
                index: 3,
                node_count: 3
            })
        );
    }

    #[test]
    fn duplicates_and_self_loops_are_dropped() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (2, 2), (1, 2), (2, 1)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.self_loops_dropped(), 1);
        assert!(g.is_adjacent(2, 1));
        assert!(!g.is_adjacent(0, 2));
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn adjacency_is_symmetric() {
        let a = k3().adjacency_matrix();
        assert_eq!(a, vec![0, 1, 1, 1, 0, 1, 1, 1, 0]);
    }

    #[test]
    fn summarize_single_triangle() {
        let d = Dataset::new("k3", vec![k3()], vec![1]).unwrap();
        let s = summarize(&d).unwrap();
        assert_eq!(s.graph_count, 1);
        assert_eq!(s.avg_nodes, 3.0);
        assert_eq!(s.avg_edges, 3.0);
        assert_eq!(s.max_nodes, 3);
        let empty = Dataset::new("empty", vec![], vec![]).unwrap();
        assert_eq!(summarize(&empty), Err(GraphError::Empty));
    }

    #[test]
    fn dataset_rejects_bad_labels() {
        assert!(Dataset::new("x", vec![k3()], vec![2]).is_err());
        assert!(Dataset::new("x", vec![k3()], vec![]).is_err());
    }

    #[test]
    fn one_hot_attributes() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap().with_node_labels(vec![0, 1, 2]).unwrap();
        let d = Dataset::new("x", vec![g], vec![0]).unwrap();
        let a = attribute_matrix(&d, AttributeMode::default()).unwrap();
        assert_eq!(a.dim, 3);
        assert_eq!(a.row(0, 1), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn uniform_attributes_without_labels() {
        let d = Dataset::new("x", vec![k3()], vec![0]).unwrap();
        let a = attribute_matrix(&d, AttributeMode::default()).unwrap();
        assert_eq!(a.dim, 1);
        assert_eq!(a.row(0, 2), &[1.0]);
    }

    #[test]
    fn labels_concatenated_with_raw_attributes() {
        let g = Graph::from_edges(2, [(0, 1)])
            .unwrap()
            .with_node_labels(vec![0, 1])
            .unwrap()
            .with_node_attributes(vec![vec![0.5], vec![-2.0]])
            .unwrap();
        let d = Dataset::new("x", vec![g], vec![0]).unwrap();
        let a = attribute_matrix(&d, AttributeMode::LabelsAndAttributes).unwrap();
        assert_eq!(a.row(0, 0), &[1.0, 0.0, 0.5]);
        let labels_only = attribute_matrix(&d, AttributeMode::LabelsOnly).unwrap();
        assert_eq!(labels_only.row(0, 0), &[1.0, 0.0]);
    }

    #[test]
    fn mixed_labels_rejected() {
        let a = Graph::from_edges(1, []).unwrap().with_node_labels(vec![3]).unwrap();
        let b = Graph::from_edges(1, []).unwrap();
        let d = Dataset::new("x", vec![a, b], vec![0, 1]).unwrap();
        assert_eq!(
            attribute_matrix(&d, AttributeMode::default()),
            Err(GraphError::MixedNodeLabels(1))
        );
    }
}
