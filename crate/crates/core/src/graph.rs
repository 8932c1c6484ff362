//! Immutable undirected graphs in compressed adjacency form.
//!
//! Vertices are dense indices `0..n`, each carrying the external label it was
//! loaded under. Structural self-loops and repeated edges are removed at
//! construction; the lazy self-loop of the random walk exists only in
//! [`TransitionView`].

use std::collections::{HashMap, VecDeque};
use std::io::BufRead;

use crate::error::{Error, Result};

/// Dense internal vertex index.
pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    labels: Vec<String>,
    index: HashMap<String, u32>,
    edge_count: usize,
}

/// Options for [`load_edge_list`].
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Lines whose first non-blank character is one of these are skipped.
    pub comment_prefixes: Vec<char>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            comment_prefixes: vec!['#', '%'],
        }
    }
}

/// What the loader dropped while normalizing the input to a simple graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub lines_read: usize,
    pub edges_read: usize,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

/// Parse a whitespace-separated edge list.
///
/// Labels are interned in order of first appearance, so loading the same
/// bytes twice yields identical graphs.
pub fn load_edge_list<R: BufRead>(reader: R, options: &LoadOptions) -> Result<(Graph, LoadStats)> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, u32> = HashMap::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut stats = LoadStats::default();

    let mut intern = |label: &str, labels: &mut Vec<String>| -> Result<u32> {
        if let Some(&id) = index.get(label) {
            return Ok(id);
        }
        let id = u32::try_from(labels.len())
            .map_err(|_| Error::invalid("more than u32::MAX vertices"))?;
        labels.push(label.to_owned());
        index.insert(label.to_owned(), id);
        Ok(id)
    };

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        stats.lines_read += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed
            .chars()
            .next()
            .is_some_and(|c| options.comment_prefixes.contains(&c))
        {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!(
                        "expected two vertex labels, found {} tokens",
                        trimmed.split_whitespace().count()
                    ),
                })
            }
        };
        stats.edges_read += 1;
        let u = intern(a, &mut labels)?;
        let v = intern(b, &mut labels)?;
        if u == v {
            stats.self_loops_dropped += 1;
            continue;
        }
        edges.push((u.min(v), u.max(v)));
    }

    let before = edges.len();
    edges.sort_unstable();
    edges.dedup();
    stats.duplicates_dropped = before - edges.len();

    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok((Graph::build(labels, edges), stats))
}

impl Graph {
    /// Build a graph on vertices `0..vertex_count` labelled by their decimal
    /// index. Self-loops and repeated pairs are dropped.
    pub fn from_edges(vertex_count: usize, edges: &[(VertexId, VertexId)]) -> Result<Graph> {
        if vertex_count > u32::MAX as usize {
            return Err(Error::invalid("more than u32::MAX vertices"));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        index: x,
                        vertex_count,
                    });
                }
            }
            if u != v {
                normalized.push((u.min(v) as u32, u.max(v) as u32));
            }
        }
        normalized.sort_unstable();
        normalized.dedup();
        let labels = (0..vertex_count).map(|i| i.to_string()).collect();
        Ok(Graph::build(labels, normalized))
    }

    /// `edges` must be sorted, deduplicated, and satisfy `u < v`.
    fn build(labels: Vec<String>, edges: Vec<(u32, u32)>) -> Graph {
        let n = labels.len();
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        for &(u, v) in &edges {
            targets[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for u in 0..n {
            targets[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as u32))
            .collect();
        Graph {
            offsets,
            targets,
            labels,
            index,
            edge_count: edges.len(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Undirected edges, each counted once.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sum of all degrees, `2m`.
    pub fn total_volume(&self) -> usize {
        2 * self.edge_count
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sorted neighbor list of `v`.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        self.targets[self.offsets[v]..self.offsets[v + 1]]
            .iter()
            .map(|&t| t as usize)
    }

    #[inline]
    pub(crate) fn neighbor_slice(&self, v: VertexId) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn contains_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.vertex_count()
            && v < self.vertex_count()
            && self.neighbor_slice(u).binary_search(&(v as u32)).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.vertex_count()).map(|v| self.degree(v)).collect()
    }

    /// Volume of a vertex set: the sum of its degrees.
    pub fn volume<I: IntoIterator<Item = VertexId>>(&self, set: I) -> usize {
        set.into_iter().map(|v| self.degree(v)).sum()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_by_label(&self, label: &str) -> Result<VertexId> {
        self.index
            .get(label)
            .map(|&i| i as usize)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                index: v,
                vertex_count: self.vertex_count(),
            })
        }
    }

    /// Like [`check_vertex`](Self::check_vertex), and also rejects isolated vertices.
    pub fn check_walkable(&self, v: VertexId) -> Result<()> {
        self.check_vertex(v)?;
        if self.degree(v) == 0 {
            return Err(Error::IsolatedVertex(v));
        }
        Ok(())
    }

    pub fn transitions(&self) -> TransitionView<'_> {
        TransitionView { graph: self }
    }

    /// Connected component of `v`, sorted ascending.
    pub fn component_of(&self, v: VertexId) -> Result<Vec<VertexId>> {
        self.check_vertex(v)?;
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([v]);
        seen[v] = true;
        let mut out = Vec::new();
        while let Some(u) = queue.pop_front() {
            out.push(u);
            for w in self.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// The lazy walk: stay with probability 1/2, otherwise move to a uniform neighbor.
#[derive(Debug, Clone, Copy)]
pub struct TransitionView<'g> {
    graph: &'g Graph,
}

impl<'g> TransitionView<'g> {
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// `P[x -> y]`.
    pub fn prob(&self, x: VertexId, y: VertexId) -> Result<f64> {
        self.graph.check_vertex(y)?;
        self.graph.check_walkable(x)?;
        Ok(if x == y {
            0.5
        } else if self.graph.contains_edge(x, y) {
            1.0 / (2.0 * self.graph.degree(x) as f64)
        } else {
            0.0
        })
    }
}

/// Free-function form of [`TransitionView::prob`].
pub fn transition_prob(g: &Graph, x: VertexId, y: VertexId) -> Result<f64> {
    g.transitions().prob(x, y)
}
