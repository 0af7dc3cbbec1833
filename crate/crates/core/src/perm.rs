//! Permutations of physical vertices, SWAP circuits and glinks.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{embeddable, ArchitectureGraph, EmbedOutcome, Edge, Subgraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("not a permutation of 0..{0}")]
    NotBijective(usize),
    #[error("permutation lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("swap ({0}, {1}) is not an edge of the architecture")]
    NotAnEdge(usize, usize),
    #[error("architecture has no edges to swap on")]
    NoEdges,
    #[error("unknown permutation type `{0}` (valid: opt1, opt2, parallel)")]
    UnknownType(String),
}

/// A bijection on `0..n`, stored as the image vector `(p(0), .., p(n-1))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl TryFrom<Vec<usize>> for Permutation {
    type Error = PermError;

    fn try_from(map: Vec<usize>) -> Result<Self, PermError> {
        Permutation::new(map)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self, PermError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(PermError::NotBijective(n));
            }
        }
        Ok(Permutation(map))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// The swap of `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        Permutation(map)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Permutation(map)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, v: usize) -> usize {
        self.0[v]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `outer ∘ inner`: apply `inner` first.
    pub fn compose(outer: &Permutation, inner: &Permutation) -> Result<Permutation, PermError> {
        if outer.len() != inner.len() {
            return Err(PermError::LengthMismatch(outer.len(), inner.len()));
        }
        Ok(Permutation(inner.0.iter().map(|&v| outer.0[v]).collect()))
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Permutation(inv)
    }

    /// Left-composes the swap of `a` and `b`: images equal to `a` become `b`
    /// and vice versa.
    pub fn swap_images(&mut self, a: usize, b: usize) {
        for v in &mut self.0 {
            if *v == a {
                *v = b;
            } else if *v == b {
                *v = a;
            }
        }
    }

    /// Relabels vertices and edges of `g`.
    pub fn apply_to_graph(&self, g: &Subgraph) -> Subgraph {
        Subgraph {
            vertices: g.vertices.iter().map(|&v| self.0[v]).collect(),
            edges: g
                .edges
                .iter()
                .map(|e| Edge::new(self.0[e.0], self.0[e.1]))
                .collect(),
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// An ordered list of SWAP gates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SwapCircuit {
    pub swaps: Vec<(usize, usize)>,
}

impl SwapCircuit {
    pub fn new(swaps: Vec<(usize, usize)>) -> Self {
        SwapCircuit { swaps }
    }

    pub fn len(&self) -> usize {
        self.swaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.swaps.is_empty()
    }

    /// The permutation implemented by applying the swaps left to right,
    /// i.e. `s_c ∘ .. ∘ s_1`.
    pub fn to_permutation(&self, ag: &ArchitectureGraph) -> Result<Permutation, PermError> {
        let mut p = Permutation::identity(ag.vertex_count());
        for &(a, b) in &self.swaps {
            if !ag.has_edge(a, b) {
                return Err(PermError::NotAnEdge(a, b));
            }
            p.swap_images(a, b);
        }
        Ok(p)
    }

    /// The same swaps in reverse order; implements the inverse permutation.
    pub fn reversed(&self) -> SwapCircuit {
        SwapCircuit {
            swaps: self.swaps.iter().rev().copied().collect(),
        }
    }

    pub fn concat(&self, other: &SwapCircuit) -> SwapCircuit {
        SwapCircuit {
            swaps: self.swaps.iter().chain(&other.swaps).copied().collect(),
        }
    }

    /// True when no two swaps share a qubit.
    pub fn is_parallel(&self) -> bool {
        let mut used = std::collections::BTreeSet::new();
        self.swaps
            .iter()
            .all(|&(a, b)| used.insert(a) && used.insert(b))
    }
}

/// How boundary permutations are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PermType {
    /// A single edge swap.
    Opt1,
    /// One swap or two distinct consecutive swaps, with equal probability.
    Opt2,
    /// A set of vertex-disjoint swaps (one SWAP layer).
    Parallel,
}

impl PermType {
    pub fn as_str(&self) -> &'static str {
        match self {
            PermType::Opt1 => "opt1",
            PermType::Opt2 => "opt2",
            PermType::Parallel => "parallel",
        }
    }
}

impl fmt::Display for PermType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PermType {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, PermError> {
        match s {
            "opt1" => Ok(PermType::Opt1),
            "opt2" => Ok(PermType::Opt2),
            "parallel" => Ok(PermType::Parallel),
            _ => Err(PermError::UnknownType(s.to_string())),
        }
    }
}

/// A permutation together with a SWAP circuit that implements it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryPermutation {
    pub perm: Permutation,
    pub witness: SwapCircuit,
    pub swap_cost: usize,
    pub depth_layers: usize,
}

impl BoundaryPermutation {
    pub fn from_witness(
        ag: &ArchitectureGraph,
        witness: SwapCircuit,
        depth_layers: usize,
    ) -> Result<Self, PermError> {
        let perm = witness.to_permutation(ag)?;
        Ok(BoundaryPermutation {
            swap_cost: witness.len(),
            perm,
            witness,
            depth_layers,
        })
    }
}

/// Draws a boundary permutation of the given type.
pub fn random_boundary_perm<R: Rng + ?Sized>(
    ag: &ArchitectureGraph,
    perm_type: PermType,
    rng: &mut R,
) -> Result<BoundaryPermutation, PermError> {
    random_boundary_perm_capped(ag, perm_type, usize::MAX, rng)
}

/// Like [`random_boundary_perm`], but an `opt2` draw never exceeds
/// `max_swaps` swaps.
pub fn random_boundary_perm_capped<R: Rng + ?Sized>(
    ag: &ArchitectureGraph,
    perm_type: PermType,
    max_swaps: usize,
    rng: &mut R,
) -> Result<BoundaryPermutation, PermError> {
    let edges = ag.edges();
    if edges.is_empty() {
        return Err(PermError::NoEdges);
    }
    let pick = |rng: &mut R| edges[rng.gen_range(0..edges.len())];
    let swaps = match perm_type {
        PermType::Opt1 => vec![pick(rng)],
        PermType::Opt2 => {
            let first = pick(rng);
            if max_swaps < 2 || edges.len() < 2 || rng.gen_bool(0.5) {
                vec![first]
            } else {
                // Any edge other than `first` either shares one endpoint with
                // it or is disjoint from it.
                let mut second = pick(rng);
                while second == first {
                    second = pick(rng);
                }
                vec![first, second]
            }
        }
        PermType::Parallel => {
            let max_size = (ag.vertex_count() / 4).max(1);
            let size = rng.gen_range(1..=max_size);
            random_matching(edges, size, rng)
        }
    };
    let witness = SwapCircuit::new(swaps.iter().map(|e| (e.0, e.1)).collect());
    let mut bp = BoundaryPermutation::from_witness(ag, witness, 1)?;
    if perm_type == PermType::Opt2 && bp.swap_cost == 2 {
        // Two distinct transpositions never compose to a single one, so the
        // cost stays 2; keep the check explicit in case the draw changes.
        if single_edge_swap(ag, &bp.perm).is_some() {
            bp.swap_cost = 1;
        }
        bp.depth_layers = if swaps[0].shares_endpoint(&swaps[1]) { 2 } else { 1 };
    }
    Ok(bp)
}

/// Greedy matching over a shuffled edge order; a few reshuffles are tried
/// when the first maximal matching is smaller than `size`.
fn random_matching<R: Rng + ?Sized>(edges: &[Edge], size: usize, rng: &mut R) -> Vec<Edge> {
    let mut best: Vec<Edge> = Vec::new();
    for _ in 0..8 {
        let mut order = edges.to_vec();
        order.shuffle(rng);
        let mut used = std::collections::BTreeSet::new();
        let mut chosen = Vec::new();
        for e in order {
            if chosen.len() == size {
                break;
            }
            if !used.contains(&e.0) && !used.contains(&e.1) {
                used.insert(e.0);
                used.insert(e.1);
                chosen.push(e);
            }
        }
        if chosen.len() > best.len() {
            best = chosen;
        }
        if best.len() == size {
            break;
        }
    }
    best
}

/// The edge whose swap equals `p`, if any.
pub fn single_edge_swap(ag: &ArchitectureGraph, p: &Permutation) -> Option<Edge> {
    let moved: Vec<usize> = (0..p.len()).filter(|&i| p.apply(i) != i).collect();
    match moved.as_slice() {
        &[a, b] if ag.has_edge(a, b) => Some(Edge::new(a, b)),
        _ => None,
    }
}

/// Two AG subgraphs linked by a boundary permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Glink {
    pub g1: Subgraph,
    pub perm: BoundaryPermutation,
    pub g2: Subgraph,
    pub strong: bool,
}

impl Glink {
    /// `g1 ∪ perm(g2)`.
    pub fn union_graph(&self) -> Subgraph {
        self.g1.union(&self.perm.perm.apply_to_graph(&self.g2))
    }

    /// Builds a glink and decides strength. An inconclusive search counts as
    /// not strong.
    pub fn new(
        ag: &ArchitectureGraph,
        g1: Subgraph,
        perm: BoundaryPermutation,
        g2: Subgraph,
    ) -> Glink {
        let mut link = Glink {
            g1,
            perm,
            g2,
            strong: false,
        };
        link.strong = embeddable(&link.union_graph(), ag) == EmbedOutcome::NotEmbeddable;
        link
    }
}

/// Attempts allowed when searching for a strong glink.
pub const GLINK_RETRY_BUDGET: usize = 200;

/// Samples `(g2, perm)` pairs until the glink from `g1` is strong, or the
/// retry budget runs out (the last sample is returned, flagged weak).
pub fn make_glink<R: Rng + ?Sized>(
    ag: &ArchitectureGraph,
    g1: &Subgraph,
    perm_type: PermType,
    graph_size: usize,
    rng: &mut R,
) -> Result<Glink, PermError> {
    make_glink_capped(ag, g1, perm_type, graph_size, usize::MAX, rng)
}

pub(crate) fn make_glink_capped<R: Rng + ?Sized>(
    ag: &ArchitectureGraph,
    g1: &Subgraph,
    perm_type: PermType,
    graph_size: usize,
    max_swaps: usize,
    rng: &mut R,
) -> Result<Glink, PermError> {
    let mut last = None;
    for _ in 0..GLINK_RETRY_BUDGET {
        let g2 = crate::graph::random_subgraph(ag, graph_size, rng);
        let perm = random_boundary_perm_capped(ag, perm_type, max_swaps, rng)?;
        let link = Glink::new(ag, g1.clone(), perm, g2);
        if link.strong {
            return Ok(link);
        }
        last = Some(link);
    }
    Ok(last.expect("retry budget is nonzero"))
}
