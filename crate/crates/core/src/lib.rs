//! Benchmark circuits for qubit mapping with a planted, known near-optimal
//! transformation cost.
//!
//! A benchmark is grown from a chain of random device subgraphs linked by
//! cheap permutations. Each link is made *strong* (the first subgraph united
//! with the permuted second one does not embed in the device), so any
//! transformation must pay for it, while the planted SWAP circuits give a
//! matching upper bound.
//!
//! Modules:
//! - [`graph`]: device coupling graphs, subgraph sampling, embeddability.
//! - [`perm`]: permutations, SWAP circuits, boundary permutations, glinks.
//! - [`circuit`]: gate lists, ASAP layering, OpenQASM 2.0 I/O.
//! - [`generator`]: chain construction, sprinkling, scrambling, metadata.
//! - [`verify`]: replay of planted solutions, transcript validation,
//!   metrics and an exact small-device oracle.
//! - [`route`]: a greedy lookahead router used as an evaluation baseline.
//! - [`suite`]: benchmark grids, sidecar/manifest files and statistics.

pub mod circuit;
pub mod generator;
pub mod graph;
pub mod perm;
pub mod route;
pub mod suite;
pub mod verify;

mod seed;

pub use seed::derive_seed;

pub use circuit::{Circuit, Gate, GateCounts};
pub use generator::{generate, Benchmark, GraphSize, Objective, QueknoMetadata, QueknoSpec};
pub use graph::{ArchitectureGraph, Edge, Subgraph};
pub use perm::{PermType, Permutation, SwapCircuit};
pub use verify::{Report, Transcript};
