//! Architecture graphs, subgraphs, embeddability and distances.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::Rng;
use thiserror::Error;

/// Names accepted by [`ArchitectureGraph::builtin`].
pub const BUILTIN_NAMES: [&str; 5] = ["grid2x3", "tokyo", "rochester", "sycamore53", "sycamore54"];

/// Expansion cap for the embedding search.
pub const DEFAULT_EXPANSION_LIMIT: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown architecture `{name}` (valid: {})", BUILTIN_NAMES.join(", "))]
    UnknownArchitecture { name: String },
    #[error("architecture must have at least one vertex")]
    Empty,
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("architecture graph is not connected")]
    Disconnected,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An undirected edge stored with the smaller endpoint first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(pub usize, pub usize);

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn touches(&self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }

    pub fn shares_endpoint(&self, other: &Edge) -> bool {
        self.touches(other.0) || self.touches(other.1)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// Undirected, connected coupling graph of a device.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchitectureGraph {
    name: String,
    vertex_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
    matrix: Vec<bool>,
}

impl ArchitectureGraph {
    /// Builds and validates a graph. Duplicate edges are collapsed.
    pub fn new(
        name: impl Into<String>,
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(GraphError::VertexOutOfRange(a, b, vertex_count));
            }
            set.insert(Edge::new(a, b));
        }
        let edges: Vec<Edge> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut matrix = vec![false; vertex_count * vertex_count];
        for e in &edges {
            adjacency[e.0].push(e.1);
            adjacency[e.1].push(e.0);
            matrix[e.0 * vertex_count + e.1] = true;
            matrix[e.1 * vertex_count + e.0] = true;
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let graph = ArchitectureGraph {
            name: name.into(),
            vertex_count,
            edges,
            adjacency,
            matrix,
        };
        if !graph.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(graph)
    }

    /// One of the bundled device topologies.
    pub fn builtin(name: &str) -> Result<Self, GraphError> {
        let text = match name {
            "grid2x3" => include_str!("../data/grid2x3.txt"),
            "tokyo" => include_str!("../data/tokyo.txt"),
            "rochester" => include_str!("../data/rochester.txt"),
            "sycamore53" => include_str!("../data/sycamore53.txt"),
            "sycamore54" => include_str!("../data/sycamore54.txt"),
            _ => {
                return Err(GraphError::UnknownArchitecture {
                    name: name.to_string(),
                })
            }
        };
        Self::from_text(name, text)
    }

    /// Parses the `n <count>` / `e <p> <q>` text format. `#` starts a comment.
    pub fn from_text(name: impl Into<String>, text: &str) -> Result<Self, GraphError> {
        let mut vertex_count = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| GraphError::Parse {
                line: line_no,
                message,
            };
            let mut parts = line.split_whitespace();
            let number = |tok: Option<&str>| -> Result<usize, GraphError> {
                let tok = tok.ok_or_else(|| parse_err("missing integer".into()))?;
                tok.parse::<usize>()
                    .map_err(|_| parse_err(format!("expected integer, found `{tok}`")))
            };
            match parts.next() {
                Some("n") => {
                    if vertex_count.is_some() {
                        return Err(parse_err("duplicate `n` line".into()));
                    }
                    vertex_count = Some(number(parts.next())?);
                }
                Some("e") => {
                    let p = number(parts.next())?;
                    let q = number(parts.next())?;
                    edges.push((p, q));
                }
                Some(other) => return Err(parse_err(format!("unexpected token `{other}`"))),
                None => unreachable!(),
            }
            if let Some(extra) = parts.next() {
                return Err(parse_err(format!("trailing token `{extra}`")));
            }
        }
        let n = vertex_count.ok_or(GraphError::Parse {
            line: 0,
            message: "missing `n <vertex_count>` line".into(),
        })?;
        Self::new(name, n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\nn {}\n", self.name, self.vertex_count);
        for e in &self.edges {
            out.push_str(&format!("e {} {}\n", e.0, e.1));
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical (sorted) order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.vertex_count && b < self.vertex_count && self.matrix[a * self.vertex_count + b]
    }

    /// Position of an edge in [`Self::edges`].
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&Edge::new(a, b)).ok()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.vertex_count
    }

    /// The whole graph viewed as a subgraph of itself.
    pub fn as_subgraph(&self) -> Subgraph {
        Subgraph {
            vertices: (0..self.vertex_count).collect(),
            edges: self.edges.iter().copied().collect(),
        }
    }

    /// All-pairs hop counts by breadth-first search.
    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.vertex_count;
        let mut dist = vec![u32::MAX; n * n];
        for source in 0..n {
            let row = &mut dist[source * n..(source + 1) * n];
            row[source] = 0;
            let mut queue = VecDeque::from([source]);
            while let Some(v) = queue.pop_front() {
                let next = row[v] + 1;
                for &w in &self.adjacency[v] {
                    if row[w] == u32::MAX {
                        row[w] = next;
                        queue.push_back(w);
                    }
                }
            }
        }
        DistanceMatrix { n, dist }
    }
}

/// Hop counts between every pair of physical qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u32>,
}

impl DistanceMatrix {
    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.dist[a * self.n + b]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }
}

/// A graph over a subset of physical vertices. Vertices without incident
/// edges are allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Subgraph {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<Edge>,
}

impl Subgraph {
    /// Vertex set is exactly the edge endpoints.
    pub fn from_edges(edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Subgraph::default();
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.vertices.insert(a);
        self.vertices.insert(b);
        self.edges.insert(Edge::new(a, b));
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.vertices.is_empty()
    }

    pub fn union(&self, other: &Subgraph) -> Subgraph {
        Subgraph {
            vertices: self.vertices.union(&other.vertices).copied().collect(),
            edges: self.edges.union(&other.edges).copied().collect(),
        }
    }

    /// True when every edge is an edge of `ag` and every vertex exists in it.
    pub fn is_subgraph_of(&self, ag: &ArchitectureGraph) -> bool {
        self.vertices.iter().all(|&v| v < ag.vertex_count())
            && self.edges.iter().all(|e| ag.has_edge(e.0, e.1))
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.vertices.iter().next() else {
            return true;
        };
        let adj = self.adjacency_map();
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    fn adjacency_map(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &v in &self.vertices {
            adj.entry(v).or_default();
        }
        for e in &self.edges {
            adj.entry(e.0).or_default().push(e.1);
            adj.entry(e.1).or_default().push(e.0);
        }
        adj
    }
}

/// Injective vertex map from a source graph into a target graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub map: BTreeMap<usize, usize>,
}

impl Embedding {
    /// Checks injectivity and edge preservation.
    pub fn is_valid(&self, src: &Subgraph, tgt: &ArchitectureGraph) -> bool {
        let images: BTreeSet<usize> = self.map.values().copied().collect();
        images.len() == self.map.len()
            && src.vertices.iter().all(|v| self.map.contains_key(v))
            && images.iter().all(|&v| v < tgt.vertex_count())
            && src
                .edges
                .iter()
                .all(|e| tgt.has_edge(self.map[&e.0], self.map[&e.1]))
    }
}

/// Result of an embeddability search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbedOutcome {
    Found(Embedding),
    NotEmbeddable,
    /// The expansion cap was reached before the search finished.
    Inconclusive,
}

impl EmbedOutcome {
    pub fn embedding(self) -> Option<Embedding> {
        match self {
            EmbedOutcome::Found(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, EmbedOutcome::Found(_))
    }
}

/// Searches for an embedding of `src` into `tgt` with the default cap.
pub fn embeddable(src: &Subgraph, tgt: &ArchitectureGraph) -> EmbedOutcome {
    embeddable_with_limit(src, tgt, DEFAULT_EXPANSION_LIMIT)
}

/// Backtracking subgraph-monomorphism search.
///
/// Source vertices are matched in a fixed order: each connected component is
/// started at its highest-degree vertex, and the next vertex is always the
/// unmatched one with the most already-matched neighbours (ties broken by
/// degree, then index). Candidates are restricted to target neighbours of a
/// matched neighbour's image and must have sufficient degree.
pub fn embeddable_with_limit(src: &Subgraph, tgt: &ArchitectureGraph, limit: u64) -> EmbedOutcome {
    let k = src.vertex_count();
    if k > tgt.vertex_count() || src.edge_count() > tgt.edge_count() {
        return EmbedOutcome::NotEmbeddable;
    }
    if k == 0 {
        return EmbedOutcome::Found(Embedding {
            map: BTreeMap::new(),
        });
    }

    // Dense relabelling of the source.
    let labels: Vec<usize> = src.vertices.iter().copied().collect();
    let index: BTreeMap<usize, usize> = labels.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); k];
    for e in &src.edges {
        let (a, b) = (index[&e.0], index[&e.1]);
        adj[a].push(b);
        adj[b].push(a);
    }

    // Degree-sequence domination is necessary.
    let mut src_deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut tgt_deg: Vec<usize> = (0..tgt.vertex_count()).map(|v| tgt.degree(v)).collect();
    src_deg.sort_unstable_by(|a, b| b.cmp(a));
    tgt_deg.sort_unstable_by(|a, b| b.cmp(a));
    if src_deg.iter().zip(&tgt_deg).any(|(s, t)| s > t) {
        return EmbedOutcome::NotEmbeddable;
    }

    let order = matching_order(&adj);
    let mut position = vec![0usize; k];
    for (pos, &v) in order.iter().enumerate() {
        position[v] = pos;
    }
    // For each source vertex, its neighbours that are matched earlier.
    let earlier: Vec<Vec<usize>> = (0..k)
        .map(|v| {
            let mut list: Vec<usize> = adj[v]
                .iter()
                .copied()
                .filter(|&w| position[w] < position[v])
                .collect();
            list.sort_by_key(|&w| position[w]);
            list
        })
        .collect();

    let mut search = Search {
        adj: &adj,
        tgt,
        order: &order,
        earlier: &earlier,
        mapping: vec![usize::MAX; k],
        used: vec![false; tgt.vertex_count()],
        expansions: 0,
        limit,
    };
    match search.extend(0) {
        Some(true) => {
            let map = labels
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, search.mapping[i]))
                .collect();
            EmbedOutcome::Found(Embedding { map })
        }
        Some(false) => EmbedOutcome::NotEmbeddable,
        None => EmbedOutcome::Inconclusive,
    }
}

fn matching_order(adj: &[Vec<usize>]) -> Vec<usize> {
    let k = adj.len();
    let mut placed = vec![false; k];
    let mut matched_neighbours = vec![0usize; k];
    let mut order = Vec::with_capacity(k);
    while order.len() < k {
        let next = (0..k)
            .filter(|&v| !placed[v])
            .max_by(|&a, &b| {
                (matched_neighbours[a], adj[a].len())
                    .cmp(&(matched_neighbours[b], adj[b].len()))
                    .then(b.cmp(&a))
            })
            .expect("unplaced vertex remains");
        placed[next] = true;
        order.push(next);
        for &w in &adj[next] {
            matched_neighbours[w] += 1;
        }
    }
    order
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    tgt: &'a ArchitectureGraph,
    order: &'a [usize],
    earlier: &'a [Vec<usize>],
    mapping: Vec<usize>,
    used: Vec<bool>,
    expansions: u64,
    limit: u64,
}

impl Search<'_> {
    /// `Some(true)` on success, `Some(false)` when exhausted, `None` on cap.
    fn extend(&mut self, depth: usize) -> Option<bool> {
        if depth == self.order.len() {
            return Some(true);
        }
        let v = self.order[depth];
        let need = self.adj[v].len();
        let anchors = &self.earlier[v];
        let candidates: Vec<usize> = match anchors.first() {
            Some(&a) => self.tgt.neighbors(self.mapping[a]).to_vec(),
            None => (0..self.tgt.vertex_count()).collect(),
        };
        for c in candidates {
            if self.used[c] || self.tgt.degree(c) < need {
                continue;
            }
            if !anchors
                .iter()
                .all(|&w| self.tgt.has_edge(self.mapping[w], c))
            {
                continue;
            }
            self.expansions += 1;
            if self.expansions > self.limit {
                return None;
            }
            self.mapping[v] = c;
            self.used[c] = true;
            match self.extend(depth + 1) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => return None,
            }
            self.used[c] = false;
            self.mapping[v] = usize::MAX;
        }
        Some(false)
    }
}

/// Grows a connected subgraph of `ag` by edge accretion from a random seed
/// edge. The edge count is uniform in `[target-2, target+2]` clamped to
/// `[1, |E|]`.
pub fn random_subgraph<R: Rng + ?Sized>(
    ag: &ArchitectureGraph,
    target_edges: usize,
    rng: &mut R,
) -> Subgraph {
    let total = ag.edge_count();
    let lo = target_edges.saturating_sub(2).clamp(1, total);
    let hi = (target_edges + 2).clamp(1, total);
    let wanted = rng.gen_range(lo..=hi);

    let edges = ag.edges();
    let seed = edges[rng.gen_range(0..edges.len())];
    let mut g = Subgraph::default();
    g.add_edge(seed.0, seed.1);
    while g.edge_count() < wanted {
        let frontier: Vec<Edge> = edges
            .iter()
            .copied()
            .filter(|e| {
                !g.edges.contains(e)
                    && (g.vertices.contains(&e.0) || g.vertices.contains(&e.1))
            })
            .collect();
        // Connected AG: the frontier is empty only once every edge is taken.
        let Some(&e) = frontier.get(rng.gen_range(0..frontier.len().max(1))) else {
            break;
        };
        g.add_edge(e.0, e.1);
    }
    g
}
