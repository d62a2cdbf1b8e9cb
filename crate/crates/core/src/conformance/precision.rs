//! Escaping-edges precision over a prefix automaton of replayed behaviour.

use std::collections::{BTreeMap, BTreeSet};

use crate::eventlog::{Activity, Trace};
use crate::petrinet::{Marking, PetriNet};
use crate::Result;

#[derive(Default)]
struct State {
    weight: u64,
    children: BTreeMap<Activity, usize>,
}

/// Precision of `net` given the model-side replay of each variant and its
/// count. Every state is a prefix that precedes at least one event; it is
/// weighted by the number of events leaving it.
pub(crate) fn escaping_edges(net: &PetriNet, replayed: &[(Trace, u64)], budget: usize) -> Result<f64> {
    let mut states = vec![State::default()];
    for (trace, count) in replayed {
        let mut s = 0;
        for a in trace.iter() {
            states[s].weight += count;
            let next = states.len();
            s = *states[s].children.entry(a.clone()).or_insert(next);
            if s == next {
                states.push(State::default());
            }
        }
    }

    // markings reached by each prefix, closed under silent moves
    let mut reached: Vec<Vec<Marking>> = vec![Vec::new(); states.len()];
    reached[0] = net.silent_closure(net.initial_marking(), budget)?;

    let mut escaping = 0u128;
    let mut enabled_total = 0u128;
    let mut stack = vec![0usize];
    while let Some(s) = stack.pop() {
        let mut enabled: BTreeSet<&Activity> = BTreeSet::new();
        for m in &reached[s] {
            for t in net.enabled(m) {
                if let Some(l) = net.label(t) {
                    enabled.insert(l);
                }
            }
        }
        let w = u128::from(states[s].weight);
        if w > 0 {
            let observed = states[s].children.keys().filter(|a| enabled.contains(a)).count();
            enabled_total += w * enabled.len() as u128;
            escaping += w * (enabled.len() - observed) as u128;
        }

        for (a, &child) in &states[s].children {
            let mut next: BTreeSet<Marking> = BTreeSet::new();
            for m in &reached[s] {
                for t in net.enabled(m) {
                    if net.label(t) == Some(a) {
                        for c in net.silent_closure(&net.fire_unchecked(m, t), budget)? {
                            next.insert(c);
                        }
                    }
                }
            }
            reached[child] = next.into_iter().collect();
            stack.push(child);
        }
        reached[s] = Vec::new();
    }

    if enabled_total == 0 {
        return Ok(1.0);
    }
    Ok(1.0 - escaping as f64 / enabled_total as f64)
}
