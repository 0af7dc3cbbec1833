//! Cross-checks the exact oracle against a plain 0-1 BFS with no pruning.

use std::collections::{HashMap, VecDeque};

use proptest::prelude::*;
use quekno::verify::brute_force_optimal;
use quekno::{ArchitectureGraph, Circuit, Gate};

/// Minimum swaps over every initial mapping; state is (logical -> physical,
/// executed prefix length per qubit). Only 2-qubit gates matter.
fn naive_optimum(c: &Circuit, ag: &ArchitectureGraph) -> usize {
    let n = ag.vertex_count();
    let mut chains: Vec<Vec<usize>> = vec![Vec::new(); n];
    let pairs: Vec<(usize, usize)> = c
        .gates()
        .iter()
        .filter_map(|g| match *g {
            Gate::Cnot { control, target } => Some((control, target)),
            _ => None,
        })
        .collect();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        chains[a].push(i);
        chains[b].push(i);
    }
    let total = pairs.len();
    type State = (Vec<usize>, Vec<usize>);
    let mut best: HashMap<State, usize> = HashMap::new();
    let mut queue: VecDeque<State> = VecDeque::new();
    for start in permutations(n) {
        let s = (start, vec![0; n]);
        best.insert(s.clone(), 0);
        queue.push_back(s);
    }
    while let Some((map, heads)) = queue.pop_front() {
        let d = best[&(map.clone(), heads.clone())];
        let done: usize = heads.iter().sum::<usize>() / 2;
        if done == total {
            return d;
        }
        let mut moves: Vec<(State, usize)> = Vec::new();
        for (i, &(a, b)) in pairs.iter().enumerate() {
            let ready = chains[a].get(heads[a]) == Some(&i) && chains[b].get(heads[b]) == Some(&i);
            if ready && ag.has_edge(map[a], map[b]) {
                let mut h = heads.clone();
                h[a] += 1;
                h[b] += 1;
                moves.push(((map.clone(), h), 0));
            }
        }
        for e in ag.edges() {
            let m: Vec<usize> = map
                .iter()
                .map(|&p| if p == e.0 { e.1 } else if p == e.1 { e.0 } else { p })
                .collect();
            moves.push(((m, heads.clone()), 1));
        }
        for (s, w) in moves {
            let nd = d + w;
            if best.get(&s).is_none_or(|&old| nd < old) {
                best.insert(s.clone(), nd);
                if w == 0 {
                    queue.push_front(s);
                } else {
                    queue.push_back(s);
                }
            }
        }
    }
    unreachable!("a connected device routes every circuit")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for i in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=i).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, i);
                    q
                })
            })
            .collect();
    }
    out
}

fn circuit_strategy(n: usize) -> impl Strategy<Value = Circuit> {
    prop::collection::vec((0..n, 0..n, any::<bool>()), 1..9).prop_map(move |raw| {
        let gates = raw
            .into_iter()
            .map(|(a, b, one)| {
                if one || a == b {
                    Gate::single("h", a)
                } else {
                    Gate::cnot(a, b)
                }
            })
            .collect();
        Circuit::new(n, gates).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oracle_matches_naive_search_on_grid(c in circuit_strategy(6)) {
        let ag = ArchitectureGraph::builtin("grid2x3").unwrap();
        let expected = naive_optimum(&c, &ag);
        prop_assert_eq!(brute_force_optimal(&c, &ag, 6).unwrap(), Some(expected));
        if expected > 0 {
            prop_assert_eq!(brute_force_optimal(&c, &ag, expected - 1).unwrap(), None);
        }
    }
}

#[test]
fn oracle_matches_naive_search_on_path_and_cycle() {
    let path = ArchitectureGraph::new("path5", 5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
    let cycle = ArchitectureGraph::new("cycle5", 5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
    let star = Circuit::new(
        5,
        vec![Gate::cnot(0, 1), Gate::cnot(0, 2), Gate::cnot(0, 3), Gate::cnot(0, 4), Gate::cnot(1, 3)],
    )
    .unwrap();
    for ag in [&path, &cycle] {
        assert_eq!(brute_force_optimal(&star, ag, 8).unwrap(), Some(naive_optimum(&star, ag)));
    }
}
