//! Translation of process trees into workflow nets.
//!
//! Every block is compiled between an entry and an exit place it does not
//! own. Blocks only consume from their entry and only produce on their
//! exit, so exclusive branches and sequence steps can share places. The
//! routing transitions this introduces are then removed wherever a
//! language-preserving fusion rule allows it.

use std::collections::BTreeSet;

use super::ProcessTree;
use crate::petrinet::PetriNet;

/// Compiles a tree into a net with one initially marked place and one
/// place holding the final token (the same place for a top-level flower).
pub fn tree_to_net(tree: &ProcessTree) -> PetriNet {
    compile(tree, true)
}

pub(crate) fn compile(tree: &ProcessTree, reduce: bool) -> PetriNet {
    let mut d = Draft::default();
    let source = d.place();
    let sink = d.place();
    d.block(tree, source, sink);
    d.places[source].initial = 1;
    d.places[sink].fin = 1;
    if reduce {
        d.reduce();
    }
    d.emit()
}

#[derive(Default)]
struct DraftPlace {
    alive: bool,
    initial: u32,
    fin: u32,
}

struct DraftTransition {
    alive: bool,
    label: Option<crate::eventlog::Activity>,
    pre: BTreeSet<usize>,
    post: BTreeSet<usize>,
}

#[derive(Default)]
struct Draft {
    places: Vec<DraftPlace>,
    transitions: Vec<DraftTransition>,
}

impl Draft {
    fn place(&mut self) -> usize {
        self.places.push(DraftPlace { alive: true, ..Default::default() });
        self.places.len() - 1
    }

    fn transition(&mut self, label: Option<crate::eventlog::Activity>, pre: &[usize], post: &[usize]) {
        self.transitions.push(DraftTransition {
            alive: true,
            label,
            pre: pre.iter().copied().collect(),
            post: post.iter().copied().collect(),
        });
    }

    fn block(&mut self, tree: &ProcessTree, entry: usize, exit: usize) {
        match tree {
            ProcessTree::Activity(a) => self.transition(Some(a.clone()), &[entry], &[exit]),
            ProcessTree::Silent => self.transition(None, &[entry], &[exit]),
            ProcessTree::Xor(children) => {
                for c in children {
                    self.block(c, entry, exit);
                }
            }
            ProcessTree::Sequence(children) => {
                let mut from = entry;
                for (i, c) in children.iter().enumerate() {
                    let to = if i + 1 == children.len() { exit } else { self.place() };
                    self.block(c, from, to);
                    from = to;
                }
            }
            ProcessTree::Parallel(children) => {
                let inner: Vec<(usize, usize)> = children.iter().map(|_| (self.place(), self.place())).collect();
                let starts: Vec<usize> = inner.iter().map(|p| p.0).collect();
                let ends: Vec<usize> = inner.iter().map(|p| p.1).collect();
                self.transition(None, &[entry], &starts);
                for (c, &(s, e)) in children.iter().zip(&inner) {
                    self.block(c, s, e);
                }
                self.transition(None, &ends, &[exit]);
            }
            ProcessTree::Loop(children) => {
                // body runs s -> e, every redo part e -> s
                let s = self.place();
                let e = self.place();
                self.transition(None, &[entry], &[s]);
                self.block(&children[0], s, e);
                for c in &children[1..] {
                    self.block(c, e, s);
                }
                self.transition(None, &[e], &[exit]);
            }
        }
    }

    fn producers(&self, p: usize) -> Vec<usize> {
        (0..self.transitions.len()).filter(|&t| self.transitions[t].alive && self.transitions[t].post.contains(&p)).collect()
    }

    fn consumers(&self, p: usize) -> Vec<usize> {
        (0..self.transitions.len()).filter(|&t| self.transitions[t].alive && self.transitions[t].pre.contains(&p)).collect()
    }

    /// Applies fusion rules around silent transitions until none fires.
    fn reduce(&mut self) {
        while (0..self.transitions.len()).any(|t| self.try_reduce(t)) {}
    }

    fn try_reduce(&mut self, t: usize) -> bool {
        if !self.transitions[t].alive || self.transitions[t].label.is_some() {
            return false;
        }
        let (pre, post) = (self.transitions[t].pre.clone(), self.transitions[t].post.clone());
        if !pre.is_disjoint(&post) {
            return false;
        }

        if pre.len() == 1 && post.len() == 1 {
            let p = *pre.first().unwrap();
            let q = *post.first().unwrap();
            // p only feeds t: tokens in p are as good as tokens in q, but
            // a final token in p must not make every token in q final
            if self.consumers(p) == [t] && self.places[p].fin == 0 && self.merge_places(t, p, q) {
                return true;
            }
            // q is only fed by t: q's consumers may read from p directly
            if self.producers(q) == [t] && self.places[q].initial == 0 && self.merge_places(t, q, p) {
                return true;
            }
        }

        if pre.len() == 1 {
            // u -> p -> t with p private to u and t: t fires together with u
            let p = *pre.first().unwrap();
            let producers = self.producers(p);
            if let [u] = producers[..] {
                let marked = self.places[p].initial > 0 || self.places[p].fin > 0;
                if u != t && !marked && self.consumers(p) == [t] && self.transitions[u].post.is_disjoint(&post) {
                    self.transitions[u].post.remove(&p);
                    self.transitions[u].post.extend(post);
                    self.kill(t, p);
                    return true;
                }
            }
        }

        if post.len() == 1 {
            // t -> p -> u with p private to t and u: t fires together with u
            let p = *post.first().unwrap();
            let consumers = self.consumers(p);
            if let [u] = consumers[..] {
                let marked = self.places[p].initial > 0 || self.places[p].fin > 0;
                if u != t && !marked && self.producers(p) == [t] && self.transitions[u].pre.is_disjoint(&pre) {
                    self.transitions[u].pre.remove(&p);
                    self.transitions[u].pre.extend(pre);
                    self.kill(t, p);
                    return true;
                }
            }
        }
        false
    }

    /// Removes `t` and folds place `from` into place `into`, unless some
    /// other transition touches both.
    fn merge_places(&mut self, t: usize, from: usize, into: usize) -> bool {
        let clash = self.transitions.iter().enumerate().any(|(i, tr)| {
            i != t
                && tr.alive
                && ((tr.pre.contains(&from) && tr.pre.contains(&into)) || (tr.post.contains(&from) && tr.post.contains(&into)))
        });
        if clash {
            return false;
        }
        for (i, tr) in self.transitions.iter_mut().enumerate() {
            if i == t || !tr.alive {
                continue;
            }
            if tr.pre.remove(&from) {
                tr.pre.insert(into);
            }
            if tr.post.remove(&from) {
                tr.post.insert(into);
            }
        }
        let (initial, fin) = (self.places[from].initial, self.places[from].fin);
        self.places[into].initial += initial;
        self.places[into].fin += fin;
        self.kill(t, from);
        true
    }

    fn kill(&mut self, t: usize, p: usize) {
        self.transitions[t].alive = false;
        self.places[p].alive = false;
    }

    fn emit(&self) -> PetriNet {
        let mut net = PetriNet::new("discovered");
        let mut ids = vec![None; self.places.len()];
        for (i, p) in self.places.iter().enumerate().filter(|(_, p)| p.alive) {
            let id = net.add_place(format!("p{}", net.places().len()));
            net.set_initial(id, p.initial);
            net.set_final(id, p.fin);
            ids[i] = Some(id);
        }
        let (mut visible, mut silent) = (0, 0);
        for tr in self.transitions.iter().filter(|t| t.alive) {
            let name = match tr.label {
                Some(_) => {
                    visible += 1;
                    format!("t{}", visible - 1)
                }
                None => {
                    silent += 1;
                    format!("tau{}", silent - 1)
                }
            };
            let t = net.add_transition(name, tr.label.clone());
            for &p in &tr.pre {
                net.arc_in(ids[p].unwrap(), t);
            }
            for &p in &tr.post {
                net.arc_out(t, ids[p].unwrap());
            }
        }
        net
    }
}
