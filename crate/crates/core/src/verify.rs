//! Transcript validation, planted-solution replay and the exact oracle.
//!
//! A transcript is an initial logical-to-physical mapping followed by
//! events: execute input gate `i`, or swap the contents of two adjacent
//! physical qubits. Validation simulates the mapping and reports the first
//! violated rule.

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateCounts};
use crate::generator::{Objective, QueknoMetadata};
use crate::graph::ArchitectureGraph;
use crate::perm::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Event {
    Exec(usize),
    Swap([usize; 2]),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub initial_mapping: Permutation,
    pub events: Vec<Event>,
}

impl Transcript {
    pub fn from_json(text: &str) -> Result<Transcript, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcripts always serialize")
    }

    pub fn swap_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Swap(_)))
            .count()
    }
}

/// The first rule a transcript breaks. `event` is the offending event index;
/// it equals the event count for problems found after the last event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub event: usize,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "event {}: {}", self.event, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub valid: bool,
    pub swap_count: usize,
    pub output_gate_counts: GateCounts,
    pub output_depth: usize,
    #[serde(serialize_with = "ratio_as_f64")]
    pub rho_gate: Option<Ratio<u64>>,
    #[serde(serialize_with = "ratio_as_f64")]
    pub rho_depth: Option<Ratio<u64>>,
    pub first_violation: Option<Violation>,
}

fn ratio_as_f64<S: Serializer>(r: &Option<Ratio<u64>>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_f64(ratio_f64(*r)),
        None => s.serialize_none(),
    }
}

pub fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl Report {
    fn invalid(v: Violation) -> Report {
        Report {
            valid: false,
            swap_count: 0,
            output_gate_counts: GateCounts::default(),
            output_depth: 0,
            rho_gate: None,
            rho_depth: None,
            first_violation: Some(v),
        }
    }

    pub fn rho(&self, objective: Objective) -> Option<Ratio<u64>> {
        match objective {
            Objective::Gate => self.rho_gate,
            Objective::Depth => self.rho_depth,
        }
    }
}

/// Output/input ratios of CNOT count and depth (swaps lowered to 3 CNOTs).
/// A ratio is `None` when its denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub rho_gate: Option<Ratio<u64>>,
    pub rho_depth: Option<Ratio<u64>>,
}

pub fn metrics(input: &Circuit, output: &Circuit) -> Metrics {
    let input = input.lower_swaps();
    let output = output.lower_swaps();
    let ratio = |num: usize, den: usize| (den > 0).then(|| Ratio::new(num as u64, den as u64));
    Metrics {
        rho_gate: ratio(output.gate_counts().two_qubit, input.gate_counts().two_qubit),
        rho_depth: ratio(output.depth(), input.depth()),
    }
}

/// Physical circuit produced by a valid transcript.
#[derive(Debug, Clone)]
pub struct Execution {
    /// Includes explicit SWAP gates.
    pub physical: Circuit,
    pub swap_count: usize,
    pub final_mapping: Vec<usize>,
}

/// Simulates `t` on `ag`; stops at the first violated rule.
pub fn execute_transcript(
    c: &Circuit,
    ag: &ArchitectureGraph,
    t: &Transcript,
) -> Result<Execution, Violation> {
    let n = ag.vertex_count();
    let at_start = |reason: String| Violation { event: 0, reason };
    if c.num_qubits() > n {
        return Err(at_start(format!(
            "circuit has {} qubits, device has {n}",
            c.num_qubits()
        )));
    }
    if t.initial_mapping.len() != n {
        return Err(at_start(format!(
            "initial mapping has length {}, device has {n} qubits",
            t.initial_mapping.len()
        )));
    }

    // Per-qubit gate queues in input order.
    let mut queues: Vec<Vec<usize>> = vec![Vec::new(); c.num_qubits()];
    for (i, g) in c.gates().iter().enumerate() {
        for q in g.qubits().as_vec() {
            queues[q].push(i);
        }
    }
    let mut heads = vec![0usize; c.num_qubits()];
    let mut executed = vec![false; c.len()];
    let mut mapping: Vec<usize> = t.initial_mapping.as_slice().to_vec();
    let mut holder = vec![0usize; n];
    for (l, &p) in mapping.iter().enumerate() {
        holder[p] = l;
    }
    let mut physical = Circuit::empty(n);
    let mut swap_count = 0;

    for (k, ev) in t.events.iter().enumerate() {
        let fail = |reason: String| Violation { event: k, reason };
        match *ev {
            Event::Exec(i) => {
                if i >= c.len() {
                    return Err(fail(format!("gate {i} does not exist ({} gates)", c.len())));
                }
                if executed[i] {
                    return Err(fail(format!("gate {i} executed twice")));
                }
                let g = &c.gates()[i];
                for q in g.qubits().as_vec() {
                    let expected = queues[q][heads[q]];
                    if expected != i {
                        return Err(fail(format!(
                            "gate {i} executed before gate {expected} on qubit {q}"
                        )));
                    }
                }
                if let crate::circuit::GateQubits::Two(a, b) = g.qubits() {
                    let (pa, pb) = (mapping[a], mapping[b]);
                    if !ag.has_edge(pa, pb) {
                        return Err(fail(format!(
                            "gate {i} on qubits ({a},{b}) lands on non-adjacent physical ({pa},{pb})"
                        )));
                    }
                }
                for q in g.qubits().as_vec() {
                    heads[q] += 1;
                }
                executed[i] = true;
                physical.push(g.map_qubits(|q| mapping[q]));
            }
            Event::Swap([p, q]) => {
                if p >= n || q >= n || !ag.has_edge(p, q) {
                    return Err(fail(format!("swap ({p},{q}) is not a device edge")));
                }
                let (lp, lq) = (holder[p], holder[q]);
                holder.swap(p, q);
                mapping[lp] = q;
                mapping[lq] = p;
                physical.push(Gate::swap(p, q));
                swap_count += 1;
            }
        }
    }
    if let Some(i) = executed.iter().position(|&e| !e) {
        return Err(Violation {
            event: t.events.len(),
            reason: format!("gate {i} never executed"),
        });
    }
    Ok(Execution {
        physical,
        swap_count,
        final_mapping: mapping,
    })
}

/// Validates `t` and computes output metrics.
pub fn validate_transcript(c: &Circuit, ag: &ArchitectureGraph, t: &Transcript) -> Report {
    match execute_transcript(c, ag, t) {
        Ok(exec) => report_for(c, &exec),
        Err(v) => Report::invalid(v),
    }
}

fn report_for(c: &Circuit, exec: &Execution) -> Report {
    let output = exec.physical.lower_swaps();
    let m = metrics(c, &output);
    Report {
        valid: true,
        swap_count: exec.swap_count,
        output_gate_counts: output.gate_counts(),
        output_depth: output.depth(),
        rho_gate: m.rho_gate,
        rho_depth: m.rho_depth,
        first_violation: None,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("sections do not tile the circuit: {0}")]
    Sections(String),
    #[error("{boundaries} boundaries for {sections} sections")]
    BoundaryCount { boundaries: usize, sections: usize },
    #[error("initial mapping has length {found}, device has {expected} qubits")]
    MappingLength { found: usize, expected: usize },
}

/// Planted solution rebuilt from metadata.
#[derive(Debug, Clone)]
pub struct Replay {
    pub transcript: Transcript,
    pub report: Report,
    /// Depth-1 layers used by the inserted SWAP circuits.
    pub swap_layers: usize,
}

impl Replay {
    /// The replayed cost under `objective`: swaps, or inserted swap layers.
    pub fn cost(&self, objective: Objective) -> usize {
        match objective {
            Objective::Gate => self.report.swap_count,
            Objective::Depth => self.swap_layers,
        }
    }
}

/// Builds the planted transcript (sections in order, boundary swaps in
/// between) and validates it.
pub fn replay(
    c: &Circuit,
    meta: &QueknoMetadata,
    ag: &ArchitectureGraph,
) -> Result<Replay, ReplayError> {
    if meta.initial_mapping.len() != ag.vertex_count() {
        return Err(ReplayError::MappingLength {
            found: meta.initial_mapping.len(),
            expected: ag.vertex_count(),
        });
    }
    if meta.sections.is_empty() {
        return Err(ReplayError::Sections("no sections".into()));
    }
    if meta.boundaries.len() + 1 != meta.sections.len() {
        return Err(ReplayError::BoundaryCount {
            boundaries: meta.boundaries.len(),
            sections: meta.sections.len(),
        });
    }
    let mut expected_start = 0;
    for s in &meta.sections {
        if s.start != expected_start || s.end < s.start {
            return Err(ReplayError::Sections(format!(
                "section [{}, {}) should start at {expected_start}",
                s.start, s.end
            )));
        }
        expected_start = s.end;
    }
    if expected_start != c.len() {
        return Err(ReplayError::Sections(format!(
            "sections end at {expected_start}, circuit has {} gates",
            c.len()
        )));
    }

    let mut events = Vec::with_capacity(c.len());
    let mut swap_layers = 0;
    for (i, s) in meta.sections.iter().enumerate() {
        events.extend((s.start..s.end).map(Event::Exec));
        if let Some(b) = meta.boundaries.get(i) {
            let mut layer_circuit = Circuit::empty(ag.vertex_count());
            for &[p, q] in &b.swaps {
                events.push(Event::Swap([p, q]));
                if p < ag.vertex_count() && q < ag.vertex_count() && p != q {
                    layer_circuit.push(Gate::swap(p, q));
                }
            }
            swap_layers += layer_circuit.depth();
        }
    }
    let transcript = Transcript {
        initial_mapping: meta.initial_mapping.clone(),
        events,
    };
    let report = validate_transcript(c, ag, &transcript);
    Ok(Replay {
        transcript,
        report,
        swap_layers,
    })
}

/// The ratio recorded as `known_rho` for a replay report.
pub fn known_rho(report: &Report, objective: Objective) -> f64 {
    report.rho(objective).map_or(1.0, ratio_f64)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("exact search supports devices with at most {max} qubits, got {got}")]
    DeviceTooLarge { max: usize, got: usize },
    #[error("circuit has {circuit} qubits, device has {device}")]
    TooManyQubits { circuit: usize, device: usize },
}

/// Largest device accepted by [`brute_force_optimal`].
pub const ORACLE_MAX_QUBITS: usize = 8;

/// Minimum number of SWAPs needed to execute `c` on `ag`, or `None` if no
/// transformation with at most `limit` swaps exists.
///
/// Iterative deepening over (mapping, per-qubit progress) states; gates that
/// become executable are applied greedily, which never hurts since 1-qubit
/// gates are free and executable 2-qubit gates commute with later swaps.
pub fn brute_force_optimal(
    c: &Circuit,
    ag: &ArchitectureGraph,
    limit: usize,
) -> Result<Option<usize>, OracleError> {
    let n = ag.vertex_count();
    if n > ORACLE_MAX_QUBITS {
        return Err(OracleError::DeviceTooLarge {
            max: ORACLE_MAX_QUBITS,
            got: n,
        });
    }
    if c.num_qubits() > n {
        return Err(OracleError::TooManyQubits {
            circuit: c.num_qubits(),
            device: n,
        });
    }
    let search = Search::new(c, ag);
    if search.gates.is_empty() {
        return Ok(Some(0));
    }
    let starts = search.canonical_placements();
    for bound in 0..=limit {
        let mut seen: HashMap<(Vec<u8>, Vec<u16>), usize> = HashMap::new();
        for start in &starts {
            let ptr = vec![0u16; search.k];
            if search.dfs(start.clone(), ptr, bound, None, &mut seen) {
                return Ok(Some(bound));
            }
        }
    }
    Ok(None)
}

struct Search {
    n: usize,
    /// Number of logical qubits that take part in 2-qubit gates.
    k: usize,
    adj: Vec<Vec<bool>>,
    dist: Vec<Vec<u32>>,
    edges: Vec<(usize, usize)>,
    /// 2-qubit gates over compacted logical indices, with each gate's
    /// position in the two qubits' chains.
    gates: Vec<(usize, usize, u16, u16)>,
    chains: Vec<Vec<usize>>,
}

impl Search {
    fn new(c: &Circuit, ag: &ArchitectureGraph) -> Search {
        let n = ag.vertex_count();
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut chains: Vec<Vec<usize>> = Vec::new();
        let mut gates = Vec::new();
        for g in c.gates() {
            if let crate::circuit::GateQubits::Two(a, b) = g.qubits() {
                let mut id = |q: usize| {
                    let next = index.len();
                    *index.entry(q).or_insert_with(|| {
                        chains.push(Vec::new());
                        next
                    })
                };
                let (a, b) = (id(a), id(b));
                let gi = gates.len();
                let pa = chains[a].len() as u16;
                let pb = chains[b].len() as u16;
                chains[a].push(gi);
                chains[b].push(gi);
                gates.push((a, b, pa, pb));
            }
        }
        let dm = ag.distance_matrix();
        Search {
            n,
            k: chains.len(),
            adj: (0..n)
                .map(|a| (0..n).map(|b| ag.has_edge(a, b)).collect())
                .collect(),
            dist: (0..n)
                .map(|a| (0..n).map(|b| dm.get(a, b)).collect())
                .collect(),
            edges: ag.edges().iter().map(|e| (e.0, e.1)).collect(),
            gates,
            chains,
        }
    }

    fn automorphisms(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..self.n).collect();
        permutations(&mut perm, 0, &mut |p| {
            if self
                .edges
                .iter()
                .all(|&(a, b)| self.adj[p[a]][p[b]])
            {
                out.push(p.to_vec());
            }
        });
        out
    }

    /// Injective placements of the `k` active logical qubits, one per orbit
    /// of the device automorphism group.
    fn canonical_placements(&self) -> Vec<Vec<u8>> {
        let autos = self.automorphisms();
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(self.k);
        let mut used = vec![false; self.n];
        self.place(&mut current, &mut used, &autos, &mut out);
        out
    }

    fn place(
        &self,
        current: &mut Vec<u8>,
        used: &mut Vec<bool>,
        autos: &[Vec<usize>],
        out: &mut Vec<Vec<u8>>,
    ) {
        if current.len() == self.k {
            let canonical = autos.iter().all(|a| {
                let image: Vec<u8> = current.iter().map(|&p| a[p as usize] as u8).collect();
                image >= *current
            });
            if canonical {
                out.push(current.clone());
            }
            return;
        }
        for p in 0..self.n {
            if !used[p] {
                used[p] = true;
                current.push(p as u8);
                self.place(current, used, autos, out);
                current.pop();
                used[p] = false;
            }
        }
    }

    fn ready(&self, g: usize, ptr: &[u16]) -> bool {
        let (a, b, pa, pb) = self.gates[g];
        ptr[a] == pa && ptr[b] == pb
    }

    /// Executes every gate that is ready and adjacent, until none is.
    /// Returns whether anything ran.
    fn close(&self, map: &[u8], ptr: &mut [u16]) -> bool {
        let mut progressed = false;
        loop {
            let mut any = false;
            for q in 0..self.k {
                let Some(&g) = self.chains[q].get(ptr[q] as usize) else {
                    continue;
                };
                let (a, b, _, _) = self.gates[g];
                if self.ready(g, ptr) && self.adj[map[a] as usize][map[b] as usize] {
                    ptr[a] += 1;
                    ptr[b] += 1;
                    any = true;
                }
            }
            if !any {
                return progressed;
            }
            progressed = true;
        }
    }

    fn lower_bound(&self, map: &[u8], ptr: &[u16]) -> usize {
        let mut lb = 0;
        for q in 0..self.k {
            if let Some(&g) = self.chains[q].get(ptr[q] as usize) {
                let (a, b, _, _) = self.gates[g];
                if self.ready(g, ptr) {
                    let d = self.dist[map[a] as usize][map[b] as usize] as usize;
                    lb = lb.max(d.saturating_sub(1));
                }
            }
        }
        lb
    }

    fn dfs(
        &self,
        mut map: Vec<u8>,
        mut ptr: Vec<u16>,
        budget: usize,
        last: Option<(usize, usize)>,
        seen: &mut HashMap<(Vec<u8>, Vec<u16>), usize>,
    ) -> bool {
        let ran = self.close(&map, &mut ptr);
        if (0..self.k).all(|q| ptr[q] as usize == self.chains[q].len()) {
            return true;
        }
        if budget == 0 || self.lower_bound(&map, &ptr) > budget {
            return false;
        }
        let key = (map.clone(), ptr.clone());
        if let Some(&b) = seen.get(&key) {
            if b >= budget {
                return false;
            }
        }
        seen.insert(key, budget);

        let mut holder = vec![u8::MAX; self.n];
        for (l, &p) in map.iter().enumerate() {
            holder[p as usize] = l as u8;
        }
        for &(p, q) in &self.edges {
            if !ran && last == Some((p, q)) {
                continue;
            }
            let (lp, lq) = (holder[p], holder[q]);
            if lp == u8::MAX && lq == u8::MAX {
                continue;
            }
            if lp != u8::MAX {
                map[lp as usize] = q as u8;
            }
            if lq != u8::MAX {
                map[lq as usize] = p as u8;
            }
            if self.dfs(map.clone(), ptr.clone(), budget - 1, Some((p, q)), seen) {
                return true;
            }
            if lp != u8::MAX {
                map[lp as usize] = p as u8;
            }
            if lq != u8::MAX {
                map[lq as usize] = q as u8;
            }
        }
        false
    }
}

fn permutations(v: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}
