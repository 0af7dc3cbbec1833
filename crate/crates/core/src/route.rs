//! Greedy lookahead router used as an evaluation baseline.
//!
//! Each restart draws a random initial mapping, executes every gate it can,
//! and otherwise inserts the swap that minimises the summed device distance
//! of the frontier gates plus a discounted sum over the next few 2-qubit
//! gates. When no swap strictly improves that potential, or the swaps since
//! the last execution would exceed the device diameter, the qubits of the
//! oldest frontier gate are walked together along a shortest path.
//! With `refine`, the mapping left by a forward pass is carried through the
//! reversed circuit and the result seeds a second forward pass.

use rayon::prelude::*;
use thiserror::Error;

use crate::circuit::{Circuit, GateQubits};
use crate::generator::Objective;
use crate::graph::{ArchitectureGraph, DistanceMatrix};
use crate::perm::Permutation;
use crate::verify::{self, Event, Report, Transcript};

#[derive(Debug, Clone, PartialEq)]
pub struct RouterConfig {
    pub objective: Objective,
    pub lookahead_window: usize,
    pub seed: u64,
    pub restarts: usize,
    /// Weight of lookahead gates relative to frontier gates.
    pub lookahead_weight: f64,
    /// Re-route from the mapping reached by a forward then a reverse pass.
    pub refine: bool,
}

impl Default for RouterConfig {
    fn default() -> Self {
        RouterConfig {
            objective: Objective::Gate,
            lookahead_window: 20,
            seed: 0,
            restarts: 8,
            lookahead_weight: 0.5,
            refine: true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RouteError {
    #[error("circuit has {circuit} qubits, device has {device}")]
    TooManyQubits { circuit: usize, device: usize },
    #[error("restarts must be at least 1")]
    NoRestarts,
    #[error("initial mapping has length {found}, device has {expected} qubits")]
    MappingLength { found: usize, expected: usize },
}

#[derive(Debug, Clone)]
pub struct Routed {
    pub transcript: Transcript,
    pub report: Report,
    pub restart: usize,
}

/// Best transcript over `cfg.restarts` random initial mappings.
pub fn greedy_route(
    c: &Circuit,
    ag: &ArchitectureGraph,
    cfg: &RouterConfig,
) -> Result<Transcript, RouteError> {
    route(c, ag, cfg).map(|r| r.transcript)
}

/// Like [`greedy_route`], also returning the validation report.
pub fn route(c: &Circuit, ag: &ArchitectureGraph, cfg: &RouterConfig) -> Result<Routed, RouteError> {
    check(c, ag)?;
    if cfg.restarts == 0 {
        return Err(RouteError::NoRestarts);
    }
    let dist = ag.distance_matrix();
    let runs: Vec<Routed> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let seed = crate::seed::derive_seed(&[cfg.seed, r as u64]);
            let mut rng = crate::seed::rng(seed);
            let initial = Permutation::random(ag.vertex_count(), &mut rng);
            let first = scored(c, ag, &dist, cfg, initial, r);
            if !cfg.refine {
                return first;
            }
            let reversed = Circuit::new(c.num_qubits(), c.gates().iter().rev().cloned().collect())
                .expect("same qubits");
            let back = run(&reversed, ag, &dist, cfg, final_mapping(ag, &first.transcript));
            let second = scored(c, ag, &dist, cfg, final_mapping(ag, &back), r);
            [first, second]
                .into_iter()
                .min_by_key(|x| key(cfg.objective, x))
                .expect("two candidates")
        })
        .collect();
    Ok(runs
        .into_iter()
        .min_by_key(|x| key(cfg.objective, x))
        .expect("at least one restart"))
}

fn key(objective: Objective, r: &Routed) -> (usize, usize, usize) {
    match objective {
        Objective::Gate => (r.report.swap_count, r.report.output_depth, r.restart),
        Objective::Depth => (r.report.output_depth, r.report.swap_count, r.restart),
    }
}

fn scored(
    c: &Circuit,
    ag: &ArchitectureGraph,
    dist: &DistanceMatrix,
    cfg: &RouterConfig,
    initial: Permutation,
    restart: usize,
) -> Routed {
    let transcript = run(c, ag, dist, cfg, initial);
    let report = verify::validate_transcript(c, ag, &transcript);
    Routed {
        transcript,
        report,
        restart,
    }
}

/// Mapping after all swaps of `t`, as a full device permutation.
fn final_mapping(ag: &ArchitectureGraph, t: &Transcript) -> Permutation {
    let mut map = t.initial_mapping.as_slice().to_vec();
    let mut holder = vec![0; ag.vertex_count()];
    for (l, &p) in map.iter().enumerate() {
        holder[p] = l;
    }
    for ev in &t.events {
        if let Event::Swap([p, q]) = *ev {
            let (lp, lq) = (holder[p], holder[q]);
            holder.swap(p, q);
            map[lp] = q;
            map[lq] = p;
        }
    }
    Permutation::new(map).expect("swaps preserve bijectivity")
}

/// Single greedy pass from a given initial mapping.
pub fn route_with_initial(
    c: &Circuit,
    ag: &ArchitectureGraph,
    cfg: &RouterConfig,
    initial: Permutation,
) -> Result<Routed, RouteError> {
    check(c, ag)?;
    if initial.len() != ag.vertex_count() {
        return Err(RouteError::MappingLength {
            found: initial.len(),
            expected: ag.vertex_count(),
        });
    }
    let transcript = run(c, ag, &ag.distance_matrix(), cfg, initial);
    let report = verify::validate_transcript(c, ag, &transcript);
    Ok(Routed {
        transcript,
        report,
        restart: 0,
    })
}

fn check(c: &Circuit, ag: &ArchitectureGraph) -> Result<(), RouteError> {
    if c.num_qubits() > ag.vertex_count() {
        return Err(RouteError::TooManyQubits {
            circuit: c.num_qubits(),
            device: ag.vertex_count(),
        });
    }
    Ok(())
}

struct State<'a> {
    dist: &'a DistanceMatrix,
    /// logical -> physical
    map: Vec<usize>,
    /// physical -> logical
    holder: Vec<usize>,
}

impl State<'_> {
    fn d(&self, a: usize, b: usize) -> u32 {
        self.dist.get(self.map[a], self.map[b])
    }

    fn swap(&mut self, p: usize, q: usize) {
        let (lp, lq) = (self.holder[p], self.holder[q]);
        self.holder.swap(p, q);
        self.map[lp] = q;
        self.map[lq] = p;
    }

    /// Distance between `a` and `b` if physical `p` and `q` were swapped.
    fn d_after(&self, a: usize, b: usize, p: usize, q: usize) -> u32 {
        let moved = |x: usize| {
            let px = self.map[x];
            if px == p {
                q
            } else if px == q {
                p
            } else {
                px
            }
        };
        self.dist.get(moved(a), moved(b))
    }
}

fn run(
    c: &Circuit,
    ag: &ArchitectureGraph,
    dist: &DistanceMatrix,
    cfg: &RouterConfig,
    initial: Permutation,
) -> Transcript {
    let gates = c.gates();
    let mut queues: Vec<Vec<usize>> = vec![Vec::new(); c.num_qubits()];
    for (i, g) in gates.iter().enumerate() {
        for q in g.qubits().as_vec() {
            queues[q].push(i);
        }
    }
    let mut heads = vec![0usize; c.num_qubits()];
    let mut executed = vec![false; gates.len()];
    let mut first_open = 0;
    let map = initial.as_slice().to_vec();
    let mut holder = vec![0; map.len()];
    for (l, &p) in map.iter().enumerate() {
        holder[p] = l;
    }
    let mut st = State {
        dist,
        map,
        holder,
    };
    let mut events = Vec::new();
    let diameter = dist.diameter() as usize;
    let mut since_exec = 0usize;
    let mut last_swap: Option<usize> = None;

    let is_ready = |i: usize, heads: &[usize], queues: &[Vec<usize>]| {
        gates[i]
            .qubits()
            .as_vec()
            .into_iter()
            .all(|q| queues[q][heads[q]] == i)
    };

    loop {
        // Execute everything executable.
        let mut progressed = true;
        while progressed {
            progressed = false;
            for q in 0..c.num_qubits() {
                while let Some(&i) = queues[q].get(heads[q]) {
                    if !is_ready(i, &heads, &queues) {
                        break;
                    }
                    if let GateQubits::Two(a, b) = gates[i].qubits() {
                        if st.d(a, b) != 1 {
                            break;
                        }
                    }
                    for x in gates[i].qubits().as_vec() {
                        heads[x] += 1;
                    }
                    executed[i] = true;
                    events.push(Event::Exec(i));
                    progressed = true;
                    since_exec = 0;
                    last_swap = None;
                }
            }
        }
        while first_open < gates.len() && executed[first_open] {
            first_open += 1;
        }
        if first_open == gates.len() {
            break;
        }

        // Blocked frontier: ready 2-qubit gates on non-adjacent qubits.
        let mut front: Vec<usize> = (0..c.num_qubits())
            .filter_map(|q| queues[q].get(heads[q]).copied())
            .filter(|&i| is_ready(i, &heads, &queues))
            .collect();
        front.sort_unstable();
        front.dedup();
        let pair = |i: usize| match gates[i].qubits() {
            GateQubits::Two(a, b) => (a, b),
            GateQubits::One(_) => unreachable!("ready 1-qubit gates always execute"),
        };
        let lookahead: Vec<(usize, usize)> = (first_open..gates.len())
            .filter(|&i| !executed[i] && gates[i].is_two_qubit() && front.binary_search(&i).is_err())
            .take(cfg.lookahead_window)
            .map(pair)
            .collect();
        let front_pairs: Vec<(usize, usize)> = front.iter().map(|&i| pair(i)).collect();

        let potential = |p: Option<(usize, usize)>| -> f64 {
            let d = |a: usize, b: usize| match p {
                Some((x, y)) => st.d_after(a, b, x, y),
                None => st.d(a, b),
            } as f64;
            let f: f64 = front_pairs.iter().map(|&(a, b)| d(a, b)).sum();
            let l: f64 = lookahead.iter().map(|&(a, b)| d(a, b)).sum();
            f + cfg.lookahead_weight * l
        };

        let (oa, ob) = front_pairs[0];
        let oldest_gap = st.d(oa, ob) as usize - 1;
        let must_force = since_exec + oldest_gap >= diameter.saturating_sub(1);

        let mut chosen: Option<(usize, f64)> = None;
        if !must_force {
            let current = potential(None);
            let touched: Vec<usize> = front_pairs
                .iter()
                .flat_map(|&(a, b)| [st.map[a], st.map[b]])
                .collect();
            for (ei, e) in ag.edges().iter().enumerate() {
                if Some(ei) == last_swap || !(touched.contains(&e.0) || touched.contains(&e.1)) {
                    continue;
                }
                let score = potential(Some((e.0, e.1)));
                if chosen.is_none_or(|(_, s)| score < s) {
                    chosen = Some((ei, score));
                }
            }
            if chosen.is_some_and(|(_, s)| s >= current) {
                chosen = None;
            }
        }
        let ei = match chosen {
            Some((ei, _)) => ei,
            None => {
                // Shortest-path step for the oldest frontier gate, from
                // either end; best potential, lowest edge index on ties.
                let (pa, pb) = (st.map[oa], st.map[ob]);
                let gap = dist.get(pa, pb);
                let mut best: Option<(usize, f64)> = None;
                for (ei, e) in ag.edges().iter().enumerate() {
                    let closer = [(pa, pb), (pb, pa)].into_iter().any(|(from, other)| {
                        let to = if e.0 == from { e.1 } else if e.1 == from { e.0 } else { return false };
                        to != other && dist.get(to, other) + 1 == gap
                    });
                    if !closer {
                        continue;
                    }
                    let score = potential(Some((e.0, e.1)));
                    if best.is_none_or(|(_, s)| score < s) {
                        best = Some((ei, score));
                    }
                }
                best.expect("a shortest-path step exists while the gap is positive").0
            }
        };
        let e = ag.edges()[ei];
        st.swap(e.0, e.1);
        events.push(Event::Swap([e.0, e.1]));
        since_exec += 1;
        last_swap = Some(ei);
    }
    Transcript {
        initial_mapping: initial,
        events,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_compact;

    #[test]
    fn embeddable_with_embedding_needs_no_swaps() {
        let ag = ArchitectureGraph::builtin("grid2x3").unwrap();
        let c = parse_compact(6, "0,1 1,3 3,5 5,4 4,2");
        let r = route_with_initial(&c, &ag, &RouterConfig::default(), Permutation::identity(6)).unwrap();
        assert!(r.report.valid);
        assert_eq!(r.report.swap_count, 0);
    }

    #[test]
    fn far_apart_gate_is_routed() {
        let ag = ArchitectureGraph::builtin("rochester").unwrap();
        let c = Circuit::new(53, vec![crate::circuit::Gate::cnot(0, 52)]).unwrap();
        let r = route_with_initial(&c, &ag, &RouterConfig::default(), Permutation::identity(53)).unwrap();
        assert!(r.report.valid);
        let d = ag.distance_matrix().get(0, 52) as usize;
        assert_eq!(r.report.swap_count, d - 1);
    }

    #[test]
    fn deterministic_and_guarded() {
        let ag = ArchitectureGraph::builtin("tokyo").unwrap();
        let c = parse_compact(20, "0,19 5,7 3,12 0,1 19,4 8,9 2,17");
        let cfg = RouterConfig {
            seed: 7,
            ..RouterConfig::default()
        };
        let a = greedy_route(&c, &ag, &cfg).unwrap();
        let b = greedy_route(&c, &ag, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(verify::validate_transcript(&c, &ag, &a).valid);
        let wide = Circuit::empty(21);
        assert!(route(&wide, &ag, &cfg).is_err());
        let zero = RouterConfig {
            restarts: 0,
            ..cfg
        };
        assert_eq!(route(&c, &ag, &zero).unwrap_err(), RouteError::NoRestarts);
    }
}
