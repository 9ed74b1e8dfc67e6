//! Reader and writer for the TUDataset plain-text layout.
//!
//! A dataset `DS` lives in a directory holding:
//!
//! * `DS_A.txt`: one `i, j` line per directed edge, 1-based global node ids
//! * `DS_graph_indicator.txt`: line `k` is the 1-based graph id of node `k`
//! * `DS_graph_labels.txt`: one label per graph
//! * `DS_node_labels.txt` (optional): one integer label per node
//! * `DS_node_attributes.txt` (optional): comma-separated reals per node

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::{Dataset, Graph, GraphError};

#[derive(Debug, Error)]
pub enum TudError {
    #[error("missing required file {0}")]
    MissingFile(PathBuf),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{file}:{line}: cannot parse {token:?}")]
    Parse {
        file: String,
        line: usize,
        token: String,
    },
    #[error("{file}:{line}: {message}")]
    Consistency {
        file: String,
        line: usize,
        message: String,
    },
    #[error("graph labels must take exactly 2 distinct values, found {0:?}")]
    NotBinary(Vec<i64>),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Location of one TUDataset on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TudDirectory {
    root: PathBuf,
    name: String,
}

const REQUIRED: [&str; 3] = ["A", "graph_indicator", "graph_labels"];

impl TudDirectory {
    /// Checks that the required files exist directly under `root`.
    pub fn new(root: impl Into<PathBuf>, name: impl Into<String>) -> Result<Self, TudError> {
        let dir = TudDirectory {
            root: root.into(),
            name: name.into(),
        };
        for suffix in REQUIRED {
            let path = dir.file(suffix);
            if !path.is_file() {
                return Err(TudError::MissingFile(path));
            }
        }
        Ok(dir)
    }

    /// Accepts either `root/DS_A.txt` or the unpacked-archive layout
    /// `root/DS/DS_A.txt`.
    pub fn locate(root: impl AsRef<Path>, name: &str) -> Result<Self, TudError> {
        let root = root.as_ref();
        let nested = root.join(name);
        if nested.join(format!("{name}_A.txt")).is_file() {
            return TudDirectory::new(nested, name);
        }
        TudDirectory::new(root, name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn file(&self, suffix: &str) -> PathBuf {
        self.root.join(format!("{}_{}.txt", self.name, suffix))
    }
}

struct Lines {
    file: String,
    // (1-based line number, trimmed content), blank lines dropped
    rows: Vec<(usize, String)>,
}

fn read_lines(path: &Path) -> Result<Lines, TudError> {
    let text = fs::read_to_string(path).map_err(|source| TudError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    Ok(Lines {
        file: path.file_name().map_or_else(String::new, |f| f.to_string_lossy().into_owned()),
        rows,
    })
}

fn parse_token<T: std::str::FromStr>(file: &str, line: usize, token: &str) -> Result<T, TudError> {
    token.trim().parse().map_err(|_| TudError::Parse {
        file: file.to_string(),
        line,
        token: token.trim().to_string(),
    })
}

fn parse_int(file: &str, line: usize, token: &str) -> Result<i64, TudError> {
    // Some files write integer labels as "1.0".
    match parse_token::<i64>(file, line, token) {
        Ok(v) => Ok(v),
        Err(e) => match token.trim().parse::<f64>() {
            Ok(f) if f.fract() == 0.0 && f.is_finite() => Ok(f as i64),
            _ => Err(e),
        },
    }
}

/// Parses a TUDataset directory into an in-memory [`Dataset`].
///
/// Global 1-based node ids are remapped to per-graph 0-based ids in order
/// of appearance in the indicator file; both directions of an edge collapse
/// to one undirected edge. Graph labels are mapped to `{0, 1}` by sorted
/// order of the two distinct raw values.
pub fn parse_tudataset(dir: &TudDirectory) -> Result<Dataset, TudError> {
    let indicator = read_lines(&dir.file("graph_indicator"))?;
    let graph_labels = read_lines(&dir.file("graph_labels"))?;

    let raw_labels: Vec<i64> = graph_labels
        .rows
        .iter()
        .map(|(n, l)| parse_int(&graph_labels.file, *n, l))
        .collect::<Result<_, _>>()?;
    let graph_count = raw_labels.len();

    let distinct: Vec<i64> = raw_labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if distinct.len() != 2 {
        return Err(TudError::NotBinary(distinct));
    }
    let labels: Vec<u8> = raw_labels
        .iter()
        .map(|l| if *l == distinct[0] { 0 } else { 1 })
        .collect();

    // node k (0-based global) -> (graph, local id)
    let mut node_graph = Vec::with_capacity(indicator.rows.len());
    let mut local = Vec::with_capacity(indicator.rows.len());
    let mut sizes = vec![0usize; graph_count];
    for (n, l) in &indicator.rows {
        let gid: i64 = parse_int(&indicator.file, *n, l)?;
        if gid < 1 || gid as usize > graph_count {
            return Err(TudError::Consistency {
                file: indicator.file.clone(),
                line: *n,
                message: format!("graph id {gid} outside 1..={graph_count}"),
            });
        }
        let g = gid as usize - 1;
        node_graph.push(g);
        local.push(sizes[g]);
        sizes[g] += 1;
    }
    let node_total = node_graph.len();

    let adjacency = read_lines(&dir.file("A"))?;
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph_count];
    for (n, l) in &adjacency.rows {
        let mut parts = l.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(TudError::Parse {
                file: adjacency.file.clone(),
                line: *n,
                token: l.clone(),
            });
        };
        let a: i64 = parse_int(&adjacency.file, *n, a)?;
        let b: i64 = parse_int(&adjacency.file, *n, b)?;
        for id in [a, b] {
            if id < 1 || id as usize > node_total {
                return Err(TudError::Consistency {
                    file: adjacency.file.clone(),
                    line: *n,
                    message: format!("node id {id} outside 1..={node_total}"),
                });
            }
        }
        let (a, b) = (a as usize - 1, b as usize - 1);
        if node_graph[a] != node_graph[b] {
            return Err(TudError::Consistency {
                file: adjacency.file.clone(),
                line: *n,
                message: format!(
                    "edge ({}, {}) crosses graphs {} and {}",
                    a + 1,
                    b + 1,
                    node_graph[a] + 1,
                    node_graph[b] + 1
                ),
            });
        }
        edges[node_graph[a]].push((local[a], local[b]));
    }

    let node_labels = optional_per_node(dir, "node_labels", node_total, |file, n, l| {
        parse_int(file, n, l)
    })?;
    let node_attributes = optional_per_node(dir, "node_attributes", node_total, |file, n, l| {
        l.split(',')
            .map(|t| parse_token::<f64>(file, n, t))
            .collect::<Result<Vec<f64>, _>>()
    })?;

    let mut per_graph_labels: Vec<Vec<i64>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    let mut per_graph_attrs: Vec<Vec<Vec<f64>>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    for k in 0..node_total {
        if let Some(nl) = &node_labels {
            per_graph_labels[node_graph[k]].push(nl[k]);
        }
        if let Some(na) = &node_attributes {
            per_graph_attrs[node_graph[k]].push(na[k].clone());
        }
    }

    let mut graphs = Vec::with_capacity(graph_count);
    for (g, edge_list) in edges.into_iter().enumerate() {
        let mut graph = Graph::from_edges(sizes[g], edge_list)?;
        if node_labels.is_some() {
            graph = graph.with_node_labels(std::mem::take(&mut per_graph_labels[g]))?;
        }
        if node_attributes.is_some() {
            graph = graph.with_node_attributes(std::mem::take(&mut per_graph_attrs[g]))?;
        }
        graphs.push(graph);
    }
    let dropped: usize = graphs.iter().map(Graph::self_loops_dropped).sum();
    if dropped > 0 {
        log::warn!("{}: {dropped} self-loop(s) dropped in total", dir.name());
    }
    Ok(Dataset::new(dir.name(), graphs, labels)?)
}

fn optional_per_node<T>(
    dir: &TudDirectory,
    suffix: &str,
    node_total: usize,
    parse: impl Fn(&str, usize, &str) -> Result<T, TudError>,
) -> Result<Option<Vec<T>>, TudError> {
    let path = dir.file(suffix);
    if !path.is_file() {
        return Ok(None);
    }
    let lines = read_lines(&path)?;
    if lines.rows.len() != node_total {
        return Err(TudError::Consistency {
            file: lines.file,
            line: lines.rows.last().map_or(0, |r| r.0),
            message: format!("{} rows for {node_total} nodes", lines.rows.len()),
        });
    }
    lines
        .rows
        .iter()
        .map(|(n, l)| parse(&lines.file, *n, l))
        .collect::<Result<Vec<T>, _>>()
        .map(Some)
}

/// Writes `dataset` in TUDataset layout under `root` with name `name`.
///
/// Each undirected edge is written in both directions, as the public
/// archives do. Graph labels are written as stored (`0`/`1`).
pub fn write_tudataset(dataset: &Dataset, root: &Path, name: &str) -> Result<TudDirectory, TudError> {
    use std::fmt::Write as _;

    fs::create_dir_all(root).map_err(|source| TudError::Io {
        path: root.to_path_buf(),
        source,
    })?;
    let mut a = String::new();
    let mut indicator = String::new();
    let mut graph_labels = String::new();
    let mut node_labels = String::new();
    let mut node_attrs = String::new();
    let with_labels = dataset.graphs().first().is_some_and(|g| g.node_labels().is_some());
    let with_attrs = dataset.graphs().first().is_some_and(|g| g.node_attributes().is_some());

    let mut offset = 1usize;
    for (gi, (g, label)) in dataset.graphs().iter().zip(dataset.labels()).enumerate() {
        let mut directed: BTreeMap<(usize, usize), ()> = BTreeMap::new();
        for &(u, v) in g.edges() {
            directed.insert((u, v), ());
            directed.insert((v, u), ());
        }
        for (u, v) in directed.keys() {
            let _ = writeln!(a, "{}, {}", u + offset, v + offset);
        }
        for v in 0..g.node_count() {
            let _ = writeln!(indicator, "{}", gi + 1);
            if with_labels {
                let _ = writeln!(node_labels, "{}", g.node_labels().map_or(0, |l| l[v]));
            }
            if with_attrs {
                let row = g.node_attributes().map(|a| a[v].clone()).unwrap_or_default();
                let joined: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
                let _ = writeln!(node_attrs, "{}", joined.join(", "));
            }
        }
        let _ = writeln!(graph_labels, "{label}");
        offset += g.node_count();
    }

    let write = |suffix: &str, body: &str| -> Result<(), TudError> {
        let path = root.join(format!("{name}_{suffix}.txt"));
        fs::write(&path, body).map_err(|source| TudError::Io { path, source })
    };
    write("A", &a)?;
    write("graph_indicator", &indicator)?;
    write("graph_labels", &graph_labels)?;
    if with_labels {
        write("node_labels", &node_labels)?;
    }
    if with_attrs {
        write("node_attributes", &node_attrs)?;
    }
    TudDirectory::new(root, name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_files(dir: &Path, name: &str, files: &[(&str, &str)]) {
        for (suffix, body) in files {
            fs::write(dir.join(format!("{name}_{suffix}.txt")), body).unwrap();
        }
    }

    #[test]
    fn minimal_fixture() {
        let tmp = tempfile::tempdir().unwrap();
        write_files(
            tmp.path(),
            "MINI",
            &[
                ("A", "1, 2\n2, 1\n2,3\n3 ,2\n1, 3\n3, 1\n4, 5\n5, 4\n\n"),
                ("graph_indicator", "1\n1\n1\n2\n2\n"),
                ("graph_labels", "-1\n1\n"),
            ],
        );
        let dir = TudDirectory::new(tmp.path(), "MINI").unwrap();
        let d = parse_tudataset(&dir).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.graphs()[0].node_count(), 3);
        assert_eq!(d.graphs()[1].node_count(), 2);
        assert_eq!(d.graphs()[0].edge_count(), 3);
        assert_eq!(d.graphs()[1].edges(), &[(0, 1)]);
        assert_eq!(d.labels(), &[0, 1]);
    }

    #[test]
    fn missing_file_is_named() {
        let tmp = tempfile::tempdir().unwrap();
        write_files(tmp.path(), "X", &[("A", "1, 2\n"), ("graph_indicator", "1\n1\n")]);
        let err = TudDirectory::new(tmp.path(), "X").unwrap_err();
        assert!(err.to_string().contains("X_graph_labels.txt"), "{err}");
    }

    #[test]
    fn crossing_edge_reports_line() {
        let tmp = tempfile::tempdir().unwrap();
        write_files(
            tmp.path(),
            "X",
            &[
                ("A", "1, 2\n2, 3\n"),
                ("graph_indicator", "1\n1\n2\n"),
                ("graph_labels", "0\n1\n"),
            ],
        );
        let err = parse_tudataset(&TudDirectory::new(tmp.path(), "X").unwrap()).unwrap_err();
        match err {
            TudError::Consistency { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn bad_token_reports_line() {
        let tmp = tempfile::tempdir().unwrap();
        write_files(
            tmp.path(),
            "X",
            &[
                ("A", "1, 2\n1, b\n"),
                ("graph_indicator", "1\n1\n2\n"),
                ("graph_labels", "0\n1\n"),
            ],
        );
        let err = parse_tudataset(&TudDirectory::new(tmp.path(), "X").unwrap()).unwrap_err();
        match err {
            TudError::Parse { line, token, .. } => {
                assert_eq!(line, 2);
                assert_eq!(token, "b");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn labels_two_values_required() {
        let tmp = tempfile::tempdir().unwrap();
        write_files(
            tmp.path(),
            "X",
            &[("A", ""), ("graph_indicator", "1\n2\n"), ("graph_labels", "3\n3\n")],
        );
        let err = parse_tudataset(&TudDirectory::new(tmp.path(), "X").unwrap()).unwrap_err();
        assert!(matches!(err, TudError::NotBinary(_)));
    }

    #[test]
    fn node_labels_and_attributes() {
        let tmp = tempfile::tempdir().unwrap();
        write_files(
            tmp.path(),
            "X",
            &[
                ("A", "1, 2\n2, 1\n"),
                ("graph_indicator", "1\n1\n2\n"),
                ("graph_labels", "1\n2\n"),
                ("node_labels", "0\n1\n1\n"),
                ("node_attributes", "0.5, 1.0\n-1, 2\n3,4\n"),
            ],
        );
        let d = parse_tudataset(&TudDirectory::new(tmp.path(), "X").unwrap()).unwrap();
        assert_eq!(d.graphs()[0].node_labels().unwrap(), &[0, 1]);
        assert_eq!(d.graphs()[1].node_attributes().unwrap(), &[vec![3.0, 4.0]]);
        assert_eq!(d.labels(), &[0, 1]);
    }

    #[test]
    fn nested_layout_is_located() {
        let tmp = tempfile::tempdir().unwrap();
        let nested = tmp.path().join("DS");
        fs::create_dir(&nested).unwrap();
        write_files(
            &nested,
            "DS",
            &[("A", ""), ("graph_indicator", "1\n2\n"), ("graph_labels", "0\n1\n")],
        );
        let dir = TudDirectory::locate(tmp.path(), "DS").unwrap();
        assert_eq!(dir.root(), nested.as_path());
    }
}
