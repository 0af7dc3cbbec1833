//! Benchmark construction from a chain of strong glinks.
//!
//! The chain `G1, p2, G2, .., ps, Gs` is built first; every subgraph `Gi`
//! then gets a random circuit `Ci` whose interaction graph is exactly `Gi`,
//! and section `i` of the output is `(p1 ∘ .. ∘ pi)(Ci)` for a free random
//! `p1`. Starting from the initial mapping `p1⁻¹` and inserting a SWAP
//! circuit for `p(i+1)⁻¹` after each section executes everything.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateCounts};
use crate::graph::{random_subgraph, ArchitectureGraph, GraphError, Subgraph};
use crate::perm::{make_glink_capped, Glink, PermError, PermType, Permutation};
use crate::verify::{self, ReplayError};

/// Tags used for sprinkled 1-qubit gates.
pub const SINGLE_QUBIT_TAGS: [&str; 4] = ["x", "h", "t", "s"];

/// Qubit gate ratio of Toffoli-like circuits.
pub const TFL_RATIO: f64 = 1.5;
/// Qubit gate ratio of supremacy-style random circuits.
pub const QSE_RATIO: f64 = 2.55;

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("cannot sprinkle a circuit on an empty subgraph")]
    EmptySubgraph,
    #[error("planted solution failed to replay: {0}")]
    Replay(String),
}

impl From<ReplayError> for GenerateError {
    fn from(e: ReplayError) -> Self {
        GenerateError::Replay(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Minimise inserted SWAPs (output CNOT count).
    Gate,
    /// Minimise output depth.
    Depth,
}

impl Objective {
    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::Gate => "gate",
            Objective::Depth => "depth",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gate" | "size" => Ok(Objective::Gate),
            "depth" => Ok(Objective::Depth),
            _ => Err(format!("unknown objective `{s}` (valid: gate, depth)")),
        }
    }
}

/// Average edge count of sampled subgraphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphSize {
    /// About 8 edges.
    Small,
    /// About 16 edges.
    Large,
    /// About 5 edges, used for the 20-qubit Tokyo device.
    Tokyo,
    Edges(usize),
}

impl GraphSize {
    pub fn target_edges(&self) -> usize {
        match *self {
            GraphSize::Small => 8,
            GraphSize::Large => 16,
            GraphSize::Tokyo => 5,
            GraphSize::Edges(n) => n,
        }
    }

    /// The size used when none is given for a device.
    pub fn default_for(ag_name: &str) -> Vec<GraphSize> {
        match ag_name {
            "tokyo" => vec![GraphSize::Tokyo],
            "grid2x3" => vec![GraphSize::Edges(4)],
            _ => vec![GraphSize::Small, GraphSize::Large],
        }
    }
}

impl fmt::Display for GraphSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSize::Small => f.write_str("small"),
            GraphSize::Large => f.write_str("large"),
            GraphSize::Tokyo => f.write_str("tokyo"),
            GraphSize::Edges(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for GraphSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "small" => Ok(GraphSize::Small),
            "large" => Ok(GraphSize::Large),
            "tokyo" | "tokyo-default" => Ok(GraphSize::Tokyo),
            _ => match s.parse::<usize>() {
                Ok(n) if n > 0 => Ok(GraphSize::Edges(n)),
                _ => Err(format!(
                    "unknown graph size `{s}` (valid: small, large, tokyo, or an edge count)"
                )),
            },
        }
    }
}

impl Serialize for GraphSize {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GraphSize {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parameters of one benchmark circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueknoSpec {
    pub ag_name: String,
    pub objective: Objective,
    pub target_cost: usize,
    pub perm_type: PermType,
    pub graph_size: GraphSize,
    pub qbg_ratio: f64,
    pub seed: u64,
}

impl QueknoSpec {
    pub fn validate(&self) -> Result<(), GenerateError> {
        match (self.objective, self.perm_type) {
            (Objective::Gate, PermType::Opt1 | PermType::Opt2) => {}
            (Objective::Depth, PermType::Parallel) => {}
            (obj, pt) => {
                return Err(GenerateError::InvalidSpec(format!(
                    "objective {obj} does not allow permutation type {pt}"
                )))
            }
        }
        if !(self.qbg_ratio.is_finite() && self.qbg_ratio >= 0.0) {
            return Err(GenerateError::InvalidSpec(format!(
                "qubit gate ratio must be a nonnegative number, got {}",
                self.qbg_ratio
            )));
        }
        if self.graph_size.target_edges() == 0 {
            return Err(GenerateError::InvalidSpec("graph size must be positive".into()));
        }
        Ok(())
    }
}

/// Gate index range `[start, end)` of one section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionRange {
    pub start: usize,
    pub end: usize,
}

/// SWAP circuit inserted after a section, plus its bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryRecord {
    /// Swaps in insertion order; they implement the inverse of the boundary
    /// permutation.
    pub swaps: Vec<[usize; 2]>,
    pub cost: usize,
    pub depth_layers: usize,
    pub strong: bool,
}

/// Sidecar metadata describing the planted transformation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueknoMetadata {
    pub spec: QueknoSpec,
    /// Logical-to-physical mapping to start from.
    pub initial_mapping: Permutation,
    pub sections: Vec<SectionRange>,
    pub boundaries: Vec<BoundaryRecord>,
    pub known_cost: usize,
    /// Known near-optimal ratio for the objective (CNOT or depth ratio).
    pub known_rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qasm_file: Option<String>,
    pub seed: u64,
    pub num_qubits: usize,
    pub gate_counts: GateCounts,
    pub depth: usize,
}

impl QueknoMetadata {
    pub fn all_strong(&self) -> bool {
        self.boundaries.iter().all(|b| b.strong)
    }
}

/// The glink chain behind a benchmark.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlinkChain {
    pub first: Subgraph,
    pub links: Vec<Glink>,
}

impl GlinkChain {
    /// `G1, .., Gs`.
    pub fn subgraphs(&self) -> Vec<&Subgraph> {
        std::iter::once(&self.first)
            .chain(self.links.iter().map(|l| &l.g2))
            .collect()
    }
}

/// A generated circuit with its planted solution and construction data.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub circuit: Circuit,
    pub metadata: QueknoMetadata,
    pub chain: GlinkChain,
    /// Unscrambled section circuits, one per chain subgraph.
    pub sections: Vec<Circuit>,
    /// The free scrambling permutation applied to everything.
    pub scramble: Permutation,
}

/// Generates a benchmark on a builtin device.
pub fn generate(spec: &QueknoSpec) -> Result<Benchmark, GenerateError> {
    let ag = ArchitectureGraph::builtin(&spec.ag_name)?;
    generate_on(&ag, spec)
}

/// Generates a benchmark on `ag`; `spec.ag_name` is only recorded.
pub fn generate_on(ag: &ArchitectureGraph, spec: &QueknoSpec) -> Result<Benchmark, GenerateError> {
    spec.validate()?;
    let mut rng = crate::seed::rng(spec.seed);
    let n = ag.vertex_count();
    let size = spec.graph_size.target_edges();

    let scramble = Permutation::random(n, &mut rng);
    let first = random_subgraph(ag, size, &mut rng);
    let mut links: Vec<Glink> = Vec::new();
    let mut cost = 0;
    while cost < spec.target_cost {
        let last = links.last().map_or(&first, |l| &l.g2);
        let cap = match spec.objective {
            Objective::Gate => spec.target_cost - cost,
            Objective::Depth => usize::MAX,
        };
        let link = make_glink_capped(ag, last, spec.perm_type, size, cap, &mut rng)?;
        cost += match spec.objective {
            Objective::Gate => link.perm.swap_cost,
            Objective::Depth => 1,
        };
        links.push(link);
    }
    let chain = GlinkChain { first, links };

    let mut sections = Vec::with_capacity(chain.links.len() + 1);
    for g in chain.subgraphs() {
        let mut c = sprinkle(g, n, spec.qbg_ratio, &mut rng)?;
        if spec.objective == Objective::Depth {
            c = align_last_layer(&c, g, &mut rng);
        }
        sections.push(c);
    }
    assemble(ag, spec.clone(), scramble, chain, sections)
}

/// Scrambles the sections with the cumulative chain permutations and
/// records the planted solution. Exposed so fixed chains can be replayed.
pub fn assemble(
    ag: &ArchitectureGraph,
    spec: QueknoSpec,
    scramble: Permutation,
    chain: GlinkChain,
    sections: Vec<Circuit>,
) -> Result<Benchmark, GenerateError> {
    if sections.len() != chain.links.len() + 1 {
        return Err(GenerateError::InvalidSpec(format!(
            "{} sections for a chain of {} subgraphs",
            sections.len(),
            chain.links.len() + 1
        )));
    }
    let n = ag.vertex_count();
    if scramble.len() != n {
        return Err(GenerateError::InvalidSpec(format!(
            "scrambling permutation has length {}, device has {n} qubits",
            scramble.len()
        )));
    }
    let mut cumulative = scramble.clone();
    let mut circuit = Circuit::empty(n);
    let mut ranges = Vec::with_capacity(sections.len());
    for (i, section) in sections.iter().enumerate() {
        if i > 0 {
            cumulative = Permutation::compose(&cumulative, &chain.links[i - 1].perm.perm)?;
        }
        let start = circuit.len();
        let mapped = section
            .permuted(&cumulative)
            .map_err(|e| GenerateError::InvalidSpec(e.to_string()))?;
        circuit
            .extend(&mapped)
            .map_err(|e| GenerateError::InvalidSpec(e.to_string()))?;
        ranges.push(SectionRange {
            start,
            end: circuit.len(),
        });
    }

    let boundaries: Vec<BoundaryRecord> = chain
        .links
        .iter()
        .map(|l| BoundaryRecord {
            swaps: l.perm.witness.reversed().swaps.iter().map(|&(a, b)| [a, b]).collect(),
            cost: l.perm.swap_cost,
            depth_layers: l.perm.depth_layers,
            strong: l.strong,
        })
        .collect();
    let known_cost = match spec.objective {
        Objective::Gate => boundaries.iter().map(|b| b.cost).sum(),
        Objective::Depth => boundaries.iter().map(|b| b.depth_layers).sum(),
    };
    let mut metadata = QueknoMetadata {
        seed: spec.seed,
        spec,
        initial_mapping: scramble.inverse(),
        sections: ranges,
        boundaries,
        known_cost,
        known_rho: 1.0,
        qasm_file: None,
        num_qubits: n,
        gate_counts: circuit.gate_counts(),
        depth: circuit.depth(),
    };
    let replay = verify::replay(&circuit, &metadata, ag)?;
    if let Some(v) = &replay.report.first_violation {
        return Err(GenerateError::Replay(v.to_string()));
    }
    metadata.known_rho = verify::known_rho(&replay.report, metadata.spec.objective);
    Ok(Benchmark {
        circuit,
        metadata,
        chain,
        sections,
        scramble,
    })
}

fn random_tag<R: Rng + ?Sized>(rng: &mut R) -> &'static str {
    SINGLE_QUBIT_TAGS[rng.gen_range(0..SINGLE_QUBIT_TAGS.len())]
}

/// Random circuit whose interaction graph is exactly `g`.
///
/// Every edge gets one CNOT, then `U[0, |E|]` extra CNOTs on random edges;
/// `round(qbg_ratio · M2)` 1-qubit gates land on random vertices of `g`, and
/// the gate order is shuffled.
pub fn sprinkle<R: Rng + ?Sized>(
    g: &Subgraph,
    num_qubits: usize,
    qbg_ratio: f64,
    rng: &mut R,
) -> Result<Circuit, GenerateError> {
    if g.edges.is_empty() {
        return Err(GenerateError::EmptySubgraph);
    }
    let edges: Vec<_> = g.edges.iter().copied().collect();
    let vertices: Vec<usize> = g.vertices.iter().copied().collect();
    let extra = rng.gen_range(0..=edges.len());
    let mut gates = Vec::new();
    let directed = |e: crate::graph::Edge, rng: &mut R| {
        if rng.gen_bool(0.5) {
            Gate::cnot(e.0, e.1)
        } else {
            Gate::cnot(e.1, e.0)
        }
    };
    for &e in &edges {
        gates.push(directed(e, rng));
    }
    for _ in 0..extra {
        let e = edges[rng.gen_range(0..edges.len())];
        gates.push(directed(e, rng));
    }
    let singles = (qbg_ratio * gates.len() as f64).round() as usize;
    for _ in 0..singles {
        let v = vertices[rng.gen_range(0..vertices.len())];
        gates.push(Gate::single(random_tag(rng), v));
    }
    gates.shuffle(rng);
    Circuit::new(num_qubits, gates).map_err(|e| GenerateError::InvalidSpec(e.to_string()))
}

/// Pads `c` so that every vertex of `g` is busy in the final layer.
///
/// Pairs of idle `g`-neighbours that both end one layer early may get a
/// repeated CNOT; every other idle vertex is topped up with 1-qubit gates.
/// The depth never changes and no new interaction edge appears.
pub fn align_last_layer<R: Rng + ?Sized>(c: &Circuit, g: &Subgraph, rng: &mut R) -> Circuit {
    let depth = c.depth();
    if depth == 0 {
        return c.clone();
    }
    let mut fronts = c.qubit_fronts();
    let mut out = c.clone();
    let mut idle: Vec<usize> = g
        .vertices
        .iter()
        .copied()
        .filter(|&v| fronts[v] < depth)
        .collect();
    idle.shuffle(rng);

    for &u in &idle {
        if fronts[u] != depth - 1 {
            continue;
        }
        let partner = idle.iter().copied().find(|&v| {
            v != u && fronts[v] == depth - 1 && g.edges.contains(&crate::graph::Edge::new(u, v))
        });
        if let Some(v) = partner {
            if rng.gen_bool(0.5) {
                out.push(Gate::cnot(u, v));
                fronts[u] = depth;
                fronts[v] = depth;
            }
        }
    }
    for &v in &idle {
        while fronts[v] < depth {
            out.push(Gate::single(random_tag(rng), v));
            fronts[v] += 1;
        }
    }
    out
}

/// Gate counts and depth summary used in reports.
pub fn summarize(c: &Circuit) -> (GateCounts, usize) {
    (c.gate_counts(), c.depth())
}
