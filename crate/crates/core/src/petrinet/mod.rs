//! Labeled Petri nets with explicit initial and final markings.
//!
//! Arcs have unit weight. A transition without a label is silent. The
//! language of a net is the set of visible-label sequences of firing
//! sequences leading from the initial to the final marking.

mod pnml;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::eventlog::{Activity, Trace};
use crate::{Error, Result};

pub use self::pnml::{export_pnml, import_pnml};

/// Reachability searches used outside of explicit oracle calls stop after
/// this many distinct markings.
pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaceId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Place {
    pub id: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub id: String,
    /// `None` for silent transitions.
    pub label: Option<Activity>,
}

impl Transition {
    pub fn is_silent(&self) -> bool {
        self.label.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arc {
    PlaceTransition(PlaceId, TransitionId),
    TransitionPlace(TransitionId, PlaceId),
}

/// Token counts indexed by place.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(Vec<u32>);

impl Marking {
    pub fn empty(num_places: usize) -> Self {
        Marking(vec![0; num_places])
    }

    pub fn get(&self, p: PlaceId) -> u32 {
        self.0.get(p.0).copied().unwrap_or(0)
    }

    pub fn set(&mut self, p: PlaceId, tokens: u32) {
        if p.0 >= self.0.len() {
            self.0.resize(p.0 + 1, 0);
        }
        self.0[p.0] = tokens;
    }

    pub fn tokens(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    /// Marked places with their token counts.
    pub fn support(&self) -> impl Iterator<Item = (PlaceId, u32)> + '_ {
        self.0.iter().enumerate().filter(|(_, &n)| n > 0).map(|(i, &n)| (PlaceId(i), n))
    }

    fn resize(&mut self, n: usize) {
        self.0.resize(n, 0);
    }
}

impl fmt::Debug for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.support().map(|(p, n)| (p.0, n))).finish()
    }
}

#[derive(Clone, Debug, Default)]
pub struct PetriNet {
    pub name: String,
    places: Vec<Place>,
    transitions: Vec<Transition>,
    arcs: Vec<Arc>,
    initial: Marking,
    final_marking: Marking,
    preset: Vec<Vec<PlaceId>>,
    postset: Vec<Vec<PlaceId>>,
}

impl PartialEq for PetriNet {
    fn eq(&self, other: &Self) -> bool {
        // presets and postsets are derived from the arcs
        self.name == other.name
            && self.places == other.places
            && self.transitions == other.transitions
            && self.arcs == other.arcs
            && self.initial == other.initial
            && self.final_marking == other.final_marking
    }
}

impl Eq for PetriNet {}

impl PetriNet {
    pub fn new(name: impl Into<String>) -> Self {
        PetriNet { name: name.into(), ..Default::default() }
    }

    pub fn add_place(&mut self, id: impl Into<String>) -> PlaceId {
        self.places.push(Place { id: id.into() });
        let n = self.places.len();
        self.initial.resize(n);
        self.final_marking.resize(n);
        PlaceId(n - 1)
    }

    pub fn add_transition(&mut self, id: impl Into<String>, label: Option<Activity>) -> TransitionId {
        self.transitions.push(Transition { id: id.into(), label });
        self.preset.push(Vec::new());
        self.postset.push(Vec::new());
        TransitionId(self.transitions.len() - 1)
    }

    /// Adds an arc; re-adding an existing arc is a no-op.
    pub fn add_arc(&mut self, arc: Arc) {
        if self.arcs.contains(&arc) {
            return;
        }
        match arc {
            Arc::PlaceTransition(p, t) => self.preset[t.0].push(p),
            Arc::TransitionPlace(t, p) => self.postset[t.0].push(p),
        }
        self.arcs.push(arc);
    }

    pub fn arc_in(&mut self, p: PlaceId, t: TransitionId) {
        self.add_arc(Arc::PlaceTransition(p, t));
    }

    pub fn arc_out(&mut self, t: TransitionId, p: PlaceId) {
        self.add_arc(Arc::TransitionPlace(t, p));
    }

    pub fn set_initial(&mut self, p: PlaceId, tokens: u32) {
        self.initial.set(p, tokens);
    }

    pub fn set_final(&mut self, p: PlaceId, tokens: u32) {
        self.final_marking.set(p, tokens);
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    pub fn final_marking(&self) -> &Marking {
        &self.final_marking
    }

    pub fn transition(&self, t: TransitionId) -> &Transition {
        &self.transitions[t.0]
    }

    pub fn label(&self, t: TransitionId) -> Option<&Activity> {
        self.transitions[t.0].label.as_ref()
    }

    pub fn preset(&self, t: TransitionId) -> &[PlaceId] {
        &self.preset[t.0]
    }

    pub fn postset(&self, t: TransitionId) -> &[PlaceId] {
        &self.postset[t.0]
    }

    pub fn place_by_id(&self, id: &str) -> Option<PlaceId> {
        self.places.iter().position(|p| p.id == id).map(PlaceId)
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = TransitionId> {
        (0..self.transitions.len()).map(TransitionId)
    }

    /// Sorted set of visible labels.
    pub fn labels(&self) -> Vec<Activity> {
        let set: BTreeSet<Activity> = self.transitions.iter().filter_map(|t| t.label.clone()).collect();
        set.into_iter().collect()
    }

    /// Checks the structural invariants: every transition has at least one
    /// input and one output arc.
    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.transitions.iter().enumerate() {
            if self.preset[i].is_empty() || self.postset[i].is_empty() {
                return Err(Error::InvalidNet(format!(
                    "transition {} needs at least one input and one output arc",
                    t.id
                )));
            }
        }
        Ok(())
    }

    pub fn is_enabled(&self, m: &Marking, t: TransitionId) -> bool {
        self.preset[t.0].iter().all(|&p| m.get(p) >= 1)
    }

    /// Transitions whose input places all hold a token.
    pub fn enabled(&self, m: &Marking) -> Vec<TransitionId> {
        self.transition_ids().filter(|&t| self.is_enabled(m, t)).collect()
    }

    pub fn fire(&self, m: &Marking, t: TransitionId) -> Result<Marking> {
        if !self.is_enabled(m, t) {
            return Err(Error::NotEnabled(self.transitions[t.0].id.clone()));
        }
        Ok(self.fire_unchecked(m, t))
    }

    pub(crate) fn fire_unchecked(&self, m: &Marking, t: TransitionId) -> Marking {
        let mut next = m.clone();
        for &p in &self.preset[t.0] {
            next.0[p.0] -= 1;
        }
        for &p in &self.postset[t.0] {
            next.0[p.0] += 1;
        }
        next
    }

    /// All visible words of at most `max_len` labels accepted by the net.
    ///
    /// Breadth-first over (marking, word) pairs. Fails once more than
    /// `max_states` distinct markings have been seen, which is how unbounded
    /// nets show up.
    pub fn language_upto(&self, max_len: usize, max_states: usize) -> Result<BTreeSet<Trace>> {
        let labels: Vec<Option<usize>> = {
            let all = self.labels();
            self.transitions
                .iter()
                .map(|t| t.label.as_ref().map(|l| all.binary_search(l).unwrap()))
                .collect()
        };
        let all = self.labels();

        let mut markings: HashSet<Marking> = HashSet::new();
        let mut seen: HashSet<(Marking, Vec<usize>)> = HashSet::new();
        let mut queue = VecDeque::new();
        let mut words = BTreeSet::new();

        markings.insert(self.initial.clone());
        seen.insert((self.initial.clone(), Vec::new()));
        queue.push_back((self.initial.clone(), Vec::<usize>::new()));

        while let Some((m, w)) = queue.pop_front() {
            if m == self.final_marking {
                words.insert(w.iter().map(|&i| all[i].clone()).collect::<Trace>());
            }
            for t in self.enabled(&m) {
                let mut w2 = w.clone();
                if let Some(l) = labels[t.0] {
                    if w.len() == max_len {
                        continue;
                    }
                    w2.push(l);
                }
                let m2 = self.fire_unchecked(&m, t);
                if !markings.contains(&m2) {
                    if markings.len() >= max_states {
                        return Err(Error::StateBudget { budget: max_states });
                    }
                    markings.insert(m2.clone());
                }
                if seen.insert((m2.clone(), w2.clone())) {
                    queue.push_back((m2, w2));
                }
            }
        }
        Ok(words)
    }

    /// Fewest visible labels on any firing sequence from the initial to the
    /// final marking.
    pub fn shortest_visible_path(&self) -> Result<usize> {
        self.shortest_visible_path_within(DEFAULT_STATE_BUDGET)
    }

    pub fn shortest_visible_path_within(&self, budget: usize) -> Result<usize> {
        // 0-1 BFS: silent moves cost 0, visible moves cost 1
        let mut dist: HashMap<Marking, usize> = HashMap::new();
        let mut deque = VecDeque::new();
        dist.insert(self.initial.clone(), 0);
        deque.push_back((self.initial.clone(), 0usize));
        let mut done: HashSet<Marking> = HashSet::new();
        while let Some((m, d)) = deque.pop_front() {
            if dist.get(&m).is_some_and(|&best| best < d) || !done.insert(m.clone()) {
                continue;
            }
            if m == self.final_marking {
                return Ok(d);
            }
            for t in self.enabled(&m) {
                let m2 = self.fire_unchecked(&m, t);
                let silent = self.transitions[t.0].is_silent();
                let d2 = if silent { d } else { d + 1 };
                if dist.get(&m2).is_some_and(|&best| best <= d2) {
                    continue;
                }
                if !dist.contains_key(&m2) && dist.len() >= budget {
                    return Err(Error::StateBudget { budget });
                }
                dist.insert(m2.clone(), d2);
                if silent {
                    deque.push_front((m2, d2));
                } else {
                    deque.push_back((m2, d2));
                }
            }
        }
        Err(Error::Unreachable)
    }

    /// Markings reachable from `m` through silent transitions only, `m` included.
    pub(crate) fn silent_closure(&self, m: &Marking, budget: usize) -> Result<Vec<Marking>> {
        let mut seen: HashSet<Marking> = HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![m.clone()];
        seen.insert(m.clone());
        while let Some(cur) = stack.pop() {
            for t in self.enabled(&cur) {
                if !self.transitions[t.0].is_silent() {
                    continue;
                }
                let next = self.fire_unchecked(&cur, t);
                if seen.insert(next.clone()) {
                    if seen.len() > budget {
                        return Err(Error::StateBudget { budget });
                    }
                    stack.push(next);
                }
            }
            out.push(cur);
        }
        Ok(out)
    }

    /// Places plus transitions plus arcs.
    pub fn size_metric(&self) -> usize {
        self.places.len() + self.transitions.len() + self.arcs.len()
    }

    /// Split-based control-flow complexity: every place with out-degree
    /// `d > 1` is an exclusive split contributing `d - 1`, every transition
    /// with out-degree `d > 1` a parallel split contributing `d - 1`.
    pub fn cardoso_metric(&self) -> usize {
        let mut place_out = vec![0usize; self.places.len()];
        for arc in &self.arcs {
            if let Arc::PlaceTransition(p, _) = arc {
                place_out[p.0] += 1;
            }
        }
        let xor: usize = place_out.iter().map(|&d| d.saturating_sub(1)).sum();
        let and: usize = self.postset.iter().map(|post| post.len().saturating_sub(1)).sum();
        xor + and
    }
}
