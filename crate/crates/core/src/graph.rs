//! Simple undirected graphs on nodes `1..=n`, their Laplacians and degree data.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::matrix::IntMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("edge {{{0}, {1}}} has an endpoint outside 1..={2}")]
    NodeOutOfRange(usize, usize, usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("edge list line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Undirected, unweighted, loop-free graph. Edges are stored as `(i, j)`
/// with `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Graph, GraphError> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if a == 0 || b == 0 || a > n || b > n {
                return Err(GraphError::NodeOutOfRange(a, b, n));
            }
            let e = (a.min(b), a.max(b));
            if !set.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
        }
        Ok(Graph { n, edges: set })
    }

    pub fn empty(n: usize) -> Graph {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn complete(n: usize) -> Graph {
        let edges = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .collect();
        Graph { n, edges }
    }

    /// A single node.
    pub fn k1() -> Graph {
        Graph::empty(1)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Neighbor lists indexed by `node - 1`.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a - 1].push(b);
            adj[b - 1].push(a);
        }
        adj
    }

    /// Degrees indexed by `node - 1`.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a - 1] += 1;
            deg[b - 1] += 1;
        }
        deg
    }

    /// Parses the edge-list format: a line holding `n`, then one `i j` pair
    /// per line. Blank lines and lines starting with `#` are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |line, message: String| GraphError::Parse { line, message };
        let (line, header) = lines
            .next()
            .ok_or_else(|| parse_err(0, "missing node count".into()))?;
        let n: usize = header
            .parse()
            .map_err(|e| parse_err(line, format!("{e}")))?;
        let mut edges = Vec::new();
        for (line, text) in lines {
            let nums: Vec<usize> = text
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| parse_err(line, format!("{e}")))?;
            let [a, b] = nums[..] else {
                return Err(parse_err(line, "expected \"i j\"".into()));
            };
            edges.push((a, b));
        }
        Graph::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    /// Graphviz DOT text for the graph.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph \"{}\" {{\n", name.replace('"', "\\\""));
        for v in 1..=self.n {
            let _ = writeln!(out, "  {v};");
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "  {a} -- {b};");
        }
        out.push_str("}\n");
        out
    }
}

/// Node degrees plus the ascending list of distinct degrees with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<usize>,
    pub distinct: Vec<(usize, usize)>,
}

impl DegreeSequence {
    pub fn from_degrees(degrees: Vec<usize>) -> DegreeSequence {
        let mut counts = BTreeMap::new();
        for &d in &degrees {
            *counts.entry(d).or_insert(0) += 1;
        }
        DegreeSequence {
            degrees,
            distinct: counts.into_iter().collect(),
        }
    }

    /// Number of distinct degrees.
    pub fn distinct_count(&self) -> usize {
        self.distinct.len()
    }

    /// Degrees in nondecreasing order.
    pub fn sorted(&self) -> Vec<usize> {
        let mut d = self.degrees.clone();
        d.sort_unstable();
        d
    }
}

/// `L(G) = D(G) - A(G)`.
pub fn laplacian(g: &Graph) -> IntMatrix {
    let mut l = IntMatrix::zeros(g.n, g.n);
    for (i, d) in g.degrees().into_iter().enumerate() {
        l.set(i, i, d);
    }
    for (a, b) in g.edges() {
        l.set(a - 1, b - 1, -1);
        l.set(b - 1, a - 1, -1);
    }
    l
}

pub fn degree_sequence(g: &Graph) -> DegreeSequence {
    DegreeSequence::from_degrees(g.degrees())
}

/// Breadth-first reachability from node 1. The empty graph counts as connected.
pub fn is_connected(g: &Graph) -> bool {
    if g.n == 0 {
        return true;
    }
    let adj = g.adjacency();
    let mut seen = vec![false; g.n];
    let mut queue = VecDeque::from([1usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v - 1] {
            if !seen[w - 1] {
                seen[w - 1] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == g.n
}

/// Disjoint union; nodes of `g2` are relabeled `v + n1`.
pub fn graph_union(g1: &Graph, g2: &Graph) -> Graph {
    let offset = g1.n;
    let edges = g1
        .edges
        .iter()
        .copied()
        .chain(g2.edges.iter().map(|&(a, b)| (a + offset, b + offset)))
        .collect();
    Graph {
        n: g1.n + g2.n,
        edges,
    }
}

/// Union plus every edge between a node of `g1` and a node of `g2`.
pub fn graph_join(g1: &Graph, g2: &Graph) -> Graph {
    let mut g = graph_union(g1, g2);
    for a in 1..=g1.n {
        for b in g1.n + 1..=g.n {
            g.edges.insert((a, b));
        }
    }
    g
}
