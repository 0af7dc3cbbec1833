#![allow(dead_code)]

use quekno::generator::{assemble, Benchmark, GlinkChain, GraphSize, Objective, QueknoSpec};
use quekno::perm::{BoundaryPermutation, Glink, PermType};
use quekno::{ArchitectureGraph, Circuit, Gate, Permutation, Subgraph, SwapCircuit};

/// `"5 2,1 1"` is `[<5>, <2,1>, <1>]`; 1-qubit gates are tagged `h`.
pub fn compact(num_qubits: usize, text: &str) -> Circuit {
    let gates = text
        .split_whitespace()
        .map(|tok| match tok.split_once(',') {
            Some((a, b)) => Gate::cnot(a.parse().unwrap(), b.parse().unwrap()),
            None => Gate::single("h", tok.parse().unwrap()),
        })
        .collect();
    Circuit::new(num_qubits, gates).unwrap()
}

/// The 25-gate logical circuit of the worked example.
pub const EXAMPLE: &str =
    "5 2,1 1 4,0 4 1 4,0 3 5 5,3 1 0 1,4 1 2 5 4,2 0 2,4 2 2 3,0 3 1 5,3";
pub const C1_TILDE: &str = "2 0,1 1 3,5 3 1 3,5 4 2 2,4 1 5 1,3";
pub const C2_TILDE: &str = "0 1 2 3,1 5 1,3 1 1 4,5 4 0 2,4";
pub const PI1: [usize; 6] = [2, 1, 5, 4, 3, 0];

pub fn grid() -> ArchitectureGraph {
    ArchitectureGraph::builtin("grid2x3").unwrap()
}

pub fn g1() -> Subgraph {
    Subgraph::from_edges([(0, 1), (1, 3), (2, 4), (3, 5)])
}

pub fn g2() -> Subgraph {
    Subgraph::from_edges([(1, 3), (2, 4), (4, 5)])
}

pub fn example_spec() -> QueknoSpec {
    QueknoSpec {
        ag_name: "grid2x3".into(),
        objective: Objective::Gate,
        target_cost: 1,
        perm_type: PermType::Opt1,
        graph_size: GraphSize::Edges(4),
        qbg_ratio: 1.5,
        seed: 0,
    }
}

/// The worked example pushed through the assembly pipeline.
pub fn example_benchmark() -> Benchmark {
    let ag = grid();
    let pi2 = BoundaryPermutation::from_witness(&ag, SwapCircuit::new(vec![(0, 1)]), 1).unwrap();
    let link = Glink::new(&ag, g1(), pi2, g2());
    let chain = GlinkChain {
        first: g1(),
        links: vec![link],
    };
    let sections = vec![compact(6, C1_TILDE), compact(6, C2_TILDE)];
    let pi1 = Permutation::new(PI1.to_vec()).unwrap();
    assemble(&ag, example_spec(), pi1, chain, sections).unwrap()
}
