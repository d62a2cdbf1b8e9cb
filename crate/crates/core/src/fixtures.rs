//! Reference models shipped for tests, examples and synthetic log generation.

use crate::discovery::ProcessTree;
use crate::eventlog::Activity;
use crate::petrinet::PetriNet;

/// The running example: `a`, then a choice between `b` and `c` in parallel
/// with `d`, then `e`. Its language is exactly
/// `{abde, adce, acde, adbe}`.
pub fn fig1_net() -> PetriNet {
    let mut net = PetriNet::new("fig1");
    let start = net.add_place("start");
    let p1 = net.add_place("p1");
    let p2 = net.add_place("p2");
    let p3 = net.add_place("p3");
    let p4 = net.add_place("p4");
    let end = net.add_place("end");
    let a = net.add_transition("a", Some("a".into()));
    let b = net.add_transition("b", Some("b".into()));
    let c = net.add_transition("c", Some("c".into()));
    let d = net.add_transition("d", Some("d".into()));
    let e = net.add_transition("e", Some("e".into()));
    net.arc_in(start, a);
    net.arc_out(a, p1);
    net.arc_out(a, p2);
    net.arc_in(p1, b);
    net.arc_out(b, p3);
    net.arc_in(p1, c);
    net.arc_out(c, p3);
    net.arc_in(p2, d);
    net.arc_out(d, p4);
    net.arc_in(p3, e);
    net.arc_in(p4, e);
    net.arc_out(e, end);
    net.set_initial(start, 1);
    net.set_final(end, 1);
    net
}

/// Single marked place with one self-loop per label; accepts every word
/// over the labels, including the empty one.
pub fn flower_net<S: AsRef<str>>(labels: &[S]) -> PetriNet {
    let mut net = PetriNet::new("flower");
    let p = net.add_place("p");
    for (i, l) in labels.iter().enumerate() {
        let t = net.add_transition(format!("t{i}"), Some(Activity::new(l)));
        net.arc_in(p, t);
        net.arc_out(t, p);
    }
    net.set_initial(p, 1);
    net.set_final(p, 1);
    net
}

/// Flower with distinct source and sink places joined by silent start/end transitions.
pub fn flower_net_silent<S: AsRef<str>>(labels: &[S]) -> PetriNet {
    let mut net = PetriNet::new("flower");
    let source = net.add_place("source");
    let hub = net.add_place("hub");
    let sink = net.add_place("sink");
    let start = net.add_transition("start", None);
    net.arc_in(source, start);
    net.arc_out(start, hub);
    for (i, l) in labels.iter().enumerate() {
        let t = net.add_transition(format!("t{i}"), Some(Activity::new(l)));
        net.arc_in(hub, t);
        net.arc_out(t, hub);
    }
    let end = net.add_transition("end", None);
    net.arc_in(hub, end);
    net.arc_out(end, sink);
    net.set_initial(source, 1);
    net.set_final(sink, 1);
    net
}

/// Chain accepting exactly the given sequence.
pub fn sequence_net<S: AsRef<str>>(labels: &[S]) -> PetriNet {
    let mut net = PetriNet::new("sequence");
    let mut prev = net.add_place("p0");
    net.set_initial(prev, 1);
    for (i, l) in labels.iter().enumerate() {
        let t = net.add_transition(format!("t{i}"), Some(Activity::new(l)));
        let next = net.add_place(format!("p{}", i + 1));
        net.arc_in(prev, t);
        net.arc_out(t, next);
        prev = next;
    }
    net.set_final(prev, 1);
    net
}

fn leaf(l: &str) -> ProcessTree {
    ProcessTree::Activity(Activity::new(l))
}

/// Tree form of [`fig1_net`]: `seq(a, and(xor(b, c), d), e)`.
pub fn fig1_tree() -> ProcessTree {
    ProcessTree::Sequence(vec![
        leaf("a"),
        ProcessTree::Parallel(vec![ProcessTree::Xor(vec![leaf("b"), leaf("c")]), leaf("d")]),
        leaf("e"),
    ])
}

/// Second behaviour group over a disjoint alphabet:
/// `seq(f, and(g, h), xor(i, j), k)`.
pub fn second_tree() -> ProcessTree {
    ProcessTree::Sequence(vec![
        leaf("f"),
        ProcessTree::Parallel(vec![leaf("g"), leaf("h")]),
        ProcessTree::Xor(vec![leaf("i"), leaf("j")]),
        leaf("k"),
    ])
}

/// Third behaviour group: `seq(m, xor(n, o), p)`.
pub fn third_tree() -> ProcessTree {
    ProcessTree::Sequence(vec![leaf("m"), ProcessTree::Xor(vec![leaf("n"), leaf("o")]), leaf("p")])
}

/// Exclusive choice between the fig1 behaviour and [`second_tree`].
pub fn two_group_tree() -> ProcessTree {
    ProcessTree::Xor(vec![fig1_tree(), second_tree()])
}

/// Exclusive choice between three disjoint behaviour groups.
pub fn three_group_tree() -> ProcessTree {
    ProcessTree::Xor(vec![fig1_tree(), second_tree(), third_tree()])
}

/// Named base models for synthetic generation.
pub fn base_model(name: &str) -> Option<PetriNet> {
    let net = match name {
        "fig1" => fig1_net(),
        "two-group" => crate::discovery::tree_to_net(&two_group_tree()),
        "three-group" => crate::discovery::tree_to_net(&three_group_tree()),
        "flower" => flower_net_silent(&["a", "b", "c", "d", "e"]),
        _ => return None,
    };
    Some(net)
}

pub const BASE_MODELS: &[&str] = &["fig1", "two-group", "three-group", "flower"];
