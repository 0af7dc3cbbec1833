//! Gate-level circuit model: ASAP layering, interaction graphs, relabelling.

mod qasm;

use std::fmt;

use thiserror::Error;

pub use qasm::QasmError;

use crate::graph::Subgraph;
use crate::perm::Permutation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("gate {index} uses qubit {qubit}, outside the {universe}-qubit register")]
    QubitOutOfRange {
        index: usize,
        qubit: usize,
        universe: usize,
    },
    #[error("gate {index} acts twice on qubit {qubit}")]
    RepeatedQubit { index: usize, qubit: usize },
    #[error("qubit universes differ ({0} vs {1})")]
    UniverseMismatch(usize, usize),
    #[error("permutation covers {perm} vertices but the circuit has {universe} qubits")]
    PermutationTooShort { perm: usize, universe: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    /// A 1-qubit gate; only its name survives.
    Single { name: String, qubit: usize },
    Cnot { control: usize, target: usize },
    Swap { a: usize, b: usize },
}

impl Gate {
    pub fn single(name: impl Into<String>, qubit: usize) -> Gate {
        Gate::Single {
            name: name.into(),
            qubit,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::Cnot { control, target }
    }

    pub fn swap(a: usize, b: usize) -> Gate {
        Gate::Swap { a, b }
    }

    pub fn qubits(&self) -> GateQubits {
        match *self {
            Gate::Single { qubit, .. } => GateQubits::One(qubit),
            Gate::Cnot { control, target } => GateQubits::Two(control, target),
            Gate::Swap { a, b } => GateQubits::Two(a, b),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        !matches!(self, Gate::Single { .. })
    }

    /// Same gate with every qubit `q` replaced by `f(q)`.
    pub fn map_qubits(&self, f: impl Fn(usize) -> usize) -> Gate {
        match self {
            Gate::Single { name, qubit } => Gate::Single {
                name: name.clone(),
                qubit: f(*qubit),
            },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: f(*control),
                target: f(*target),
            },
            Gate::Swap { a, b } => Gate::Swap { a: f(*a), b: f(*b) },
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Single { qubit, .. } => write!(f, "<{qubit}>"),
            Gate::Cnot { control, target } => write!(f, "<{control},{target}>"),
            Gate::Swap { a, b } => write!(f, "SWAP({a},{b})"),
        }
    }
}

/// Qubits a gate acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateQubits {
    One(usize),
    Two(usize, usize),
}

impl GateQubits {
    pub fn as_vec(self) -> Vec<usize> {
        match self {
            GateQubits::One(q) => vec![q],
            GateQubits::Two(a, b) => vec![a, b],
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GateCounts {
    pub one_qubit: usize,
    pub two_qubit: usize,
}

/// An ordered gate list over qubits `0..num_qubits`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn empty(num_qubits: usize) -> Circuit {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Circuit, CircuitError> {
        for (index, g) in gates.iter().enumerate() {
            let qs = g.qubits();
            for &qubit in qs.as_vec().iter() {
                if qubit >= num_qubits {
                    return Err(CircuitError::QubitOutOfRange {
                        index,
                        qubit,
                        universe: num_qubits,
                    });
                }
            }
            if let GateQubits::Two(a, b) = qs {
                if a == b {
                    return Err(CircuitError::RepeatedQubit { index, qubit: a });
                }
            }
        }
        Ok(Circuit { num_qubits, gates })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a gate. Panics if the gate violates the circuit invariants.
    pub fn push(&mut self, gate: Gate) {
        let qs = gate.qubits().as_vec();
        assert!(
            qs.iter().all(|&q| q < self.num_qubits),
            "gate {gate} outside register of {}",
            self.num_qubits
        );
        assert!(qs.len() == 1 || qs[0] != qs[1], "gate {gate} repeats a qubit");
        self.gates.push(gate);
    }

    /// ASAP layer index of every gate.
    pub fn layer_of_gates(&self) -> Vec<usize> {
        let mut front = vec![0usize; self.num_qubits];
        self.gates
            .iter()
            .map(|g| match g.qubits() {
                GateQubits::One(q) => {
                    let layer = front[q];
                    front[q] = layer + 1;
                    layer
                }
                GateQubits::Two(a, b) => {
                    let layer = front[a].max(front[b]);
                    front[a] = layer + 1;
                    front[b] = layer + 1;
                    layer
                }
            })
            .collect()
    }

    /// Gate indices grouped by ASAP layer.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for (i, layer) in self.layer_of_gates().into_iter().enumerate() {
            if layer == layers.len() {
                layers.push(Vec::new());
            }
            layers[layer].push(i);
        }
        layers
    }

    pub fn depth(&self) -> usize {
        self.layer_of_gates()
            .into_iter()
            .max()
            .map_or(0, |last| last + 1)
    }

    /// Per qubit, the number of layers it is busy through (0 if unused).
    pub fn qubit_fronts(&self) -> Vec<usize> {
        let mut front = vec![0usize; self.num_qubits];
        for (g, layer) in self.gates.iter().zip(self.layer_of_gates()) {
            for q in g.qubits().as_vec() {
                front[q] = layer + 1;
            }
        }
        front
    }

    /// Vertices are all qubits `0..num_qubits`, edges one per distinct
    /// unordered 2-qubit pair.
    pub fn interaction_graph(&self) -> Subgraph {
        let mut g = Subgraph {
            vertices: (0..self.num_qubits).collect(),
            ..Subgraph::default()
        };
        for gate in &self.gates {
            if let GateQubits::Two(a, b) = gate.qubits() {
                g.add_edge(a, b);
            }
        }
        g
    }

    /// Interaction graph restricted to qubits touched by 2-qubit gates.
    pub fn interaction_edges(&self) -> Subgraph {
        Subgraph::from_edges(self.gates.iter().filter_map(|g| match g.qubits() {
            GateQubits::Two(a, b) => Some((a, b)),
            GateQubits::One(_) => None,
        }))
    }

    /// Relabels every qubit `q` as `p(q)`.
    pub fn permuted(&self, p: &Permutation) -> Result<Circuit, CircuitError> {
        if p.len() < self.num_qubits {
            return Err(CircuitError::PermutationTooShort {
                perm: p.len(),
                universe: self.num_qubits,
            });
        }
        let universe = self.num_qubits.max(p.len());
        Ok(Circuit {
            num_qubits: universe,
            gates: self.gates.iter().map(|g| g.map_qubits(|q| p.apply(q))).collect(),
        })
    }

    pub fn concat(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        if self.num_qubits != other.num_qubits {
            return Err(CircuitError::UniverseMismatch(self.num_qubits, other.num_qubits));
        }
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        Ok(Circuit {
            num_qubits: self.num_qubits,
            gates,
        })
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<(), CircuitError> {
        if self.num_qubits != other.num_qubits {
            return Err(CircuitError::UniverseMismatch(self.num_qubits, other.num_qubits));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Counts by kind; an unlowered SWAP counts as one 2-qubit gate.
    pub fn gate_counts(&self) -> GateCounts {
        let two_qubit = self.gates.iter().filter(|g| g.is_two_qubit()).count();
        GateCounts {
            one_qubit: self.gates.len() - two_qubit,
            two_qubit,
        }
    }

    /// Replaces each SWAP(p,q) by CX(p,q) CX(q,p) CX(p,q).
    pub fn lower_swaps(&self) -> Circuit {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            match *g {
                Gate::Swap { a, b } => {
                    gates.push(Gate::cnot(a, b));
                    gates.push(Gate::cnot(b, a));
                    gates.push(Gate::cnot(a, b));
                }
                _ => gates.push(g.clone()),
            }
        }
        Circuit {
            num_qubits: self.num_qubits,
            gates,
        }
    }

    pub fn to_qasm(&self) -> String {
        qasm::emit(self)
    }

    pub fn from_qasm(text: &str) -> Result<Circuit, QasmError> {
        qasm::parse(text)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, g) in self.gates.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "]")
    }
}

/// Compact test notation: `"5 2,1 1"` is `[<5>, <2,1>, <1>]`, 1-qubit gates
/// tagged `h`.
#[cfg(test)]
pub(crate) fn parse_compact(num_qubits: usize, text: &str) -> Circuit {
    let gates = text
        .split_whitespace()
        .map(|tok| match tok.split_once(',') {
            Some((a, b)) => Gate::cnot(a.parse().unwrap(), b.parse().unwrap()),
            None => Gate::single("h", tok.parse().unwrap()),
        })
        .collect();
    Circuit::new(num_qubits, gates).unwrap()
}
