//! Optimal alignments by A* over the synchronous product of a trace and a net.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use serde::Serialize;

use crate::eventlog::{Activity, Trace};
use crate::petrinet::{Marking, PetriNet, TransitionId};
use crate::{Error, Result};

/// One step of an alignment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "label", rename_all = "snake_case")]
pub enum Move {
    /// Trace event and model transition agree.
    Sync(Activity),
    /// Trace event the model skips (deletion).
    Log(Activity),
    /// Visible model transition with no trace event (insertion).
    Model(Activity),
    /// Silent model transition.
    Silent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlignmentResult {
    /// Number of log and visible model moves.
    pub cost: u32,
    /// `|trace| + shortest visible path of the net`; the fitness denominator.
    pub closest_model_trace_length_bound: usize,
    pub moves: Vec<Move>,
}

impl AlignmentResult {
    /// Visible labels of the model side of the alignment.
    pub fn model_projection(&self) -> Trace {
        self.moves
            .iter()
            .filter_map(|m| match m {
                Move::Sync(a) | Move::Model(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn fitness(&self) -> f64 {
        if self.cost == 0 {
            return 1.0;
        }
        1.0 - self.cost as f64 / self.closest_model_trace_length_bound as f64
    }
}

struct Node {
    pos: usize,
    marking: Marking,
    parent: Option<(usize, Step)>,
}

#[derive(Clone, Copy)]
enum Step {
    Log,
    Fire(TransitionId, bool),
}

/// Raw A* search; `shortest` is the net's shortest visible path.
pub(crate) fn align(trace: &Trace, net: &PetriNet, shortest: usize, budget: usize) -> Result<AlignmentResult> {
    let events = trace.activities();
    let n = events.len();
    let labels: HashSet<&Activity> = net.transitions().iter().filter_map(|t| t.label.as_ref()).collect();

    // remaining events whose label the net cannot produce at all must be
    // log moves; suffix counts give an admissible heuristic
    let mut h = vec![0u32; n + 1];
    for i in (0..n).rev() {
        h[i] = h[i + 1] + u32::from(!labels.contains(&events[i]));
    }

    let mut nodes: Vec<Node> = Vec::new();
    let mut best: HashMap<(usize, Marking), (u32, usize)> = HashMap::new();
    let mut closed: HashSet<usize> = HashSet::new();
    // (f, deeper first, node); node ids grow with insertion order
    let mut open: BinaryHeap<Reverse<(u32, Reverse<usize>, usize)>> = BinaryHeap::new();

    nodes.push(Node { pos: 0, marking: net.initial_marking().clone(), parent: None });
    best.insert((0, net.initial_marking().clone()), (0, 0));
    let mut g_of = vec![0u32];
    open.push(Reverse((h[0], Reverse(0), 0)));

    while let Some(Reverse((_, _, id))) = open.pop() {
        if !closed.insert(id) {
            continue;
        }
        let (pos, g) = (nodes[id].pos, g_of[id]);
        if pos == n && nodes[id].marking == *net.final_marking() {
            return Ok(AlignmentResult {
                cost: g,
                closest_model_trace_length_bound: n + shortest,
                moves: recover(&nodes, id, events, net),
            });
        }

        let mut successors: Vec<(usize, Marking, u32, Step)> = Vec::new();
        if pos < n {
            successors.push((pos + 1, nodes[id].marking.clone(), g + 1, Step::Log));
        }
        for t in net.enabled(&nodes[id].marking) {
            let next = net.fire_unchecked(&nodes[id].marking, t);
            match net.label(t) {
                None => successors.push((pos, next, g, Step::Fire(t, false))),
                Some(l) => {
                    if pos < n && *l == events[pos] {
                        successors.push((pos + 1, next.clone(), g, Step::Fire(t, true)));
                    }
                    successors.push((pos, next, g + 1, Step::Fire(t, false)));
                }
            }
        }

        for (p2, m2, g2, step) in successors {
            let key = (p2, m2);
            match best.get(&key) {
                // the heuristic is consistent, so closed states are final
                Some(&(old, node)) if g2 >= old || closed.contains(&node) => continue,
                Some(_) => {}
                None if best.len() >= budget => return Err(Error::StateBudget { budget }),
                None => {}
            }
            let new_id = nodes.len();
            nodes.push(Node { pos: p2, marking: key.1.clone(), parent: Some((id, step)) });
            g_of.push(g2);
            best.insert(key, (g2, new_id));
            open.push(Reverse((g2 + h[p2], Reverse(p2), new_id)));
        }
    }
    Err(Error::Unreachable)
}

fn recover(nodes: &[Node], mut id: usize, events: &[Activity], net: &PetriNet) -> Vec<Move> {
    let mut moves = Vec::new();
    while let Some((parent, step)) = nodes[id].parent {
        let pos = nodes[parent].pos;
        moves.push(match step {
            Step::Log => Move::Log(events[pos].clone()),
            Step::Fire(_, true) => Move::Sync(events[pos].clone()),
            Step::Fire(t, false) => match net.label(t) {
                Some(l) => Move::Model(l.clone()),
                None => Move::Silent,
            },
        });
        id = parent;
    }
    moves.reverse();
    moves
}
