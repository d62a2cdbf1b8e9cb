//! Process discovery.
//!
//! The built-in miner is a basic inductive miner: it recursively splits the
//! log along exclusive, sequence, parallel and loop cuts of the
//! directly-follows graph and falls back to a flower model when none
//! applies. Every trace of the input log replays perfectly on the result.

mod compile;
mod dfg;
mod inductive;

use std::fmt;

use crate::eventlog::{Activity, EventLog};
use crate::petrinet::PetriNet;
use crate::{Error, Result};

pub use self::compile::tree_to_net;
pub use self::dfg::{dfg, DirectlyFollowsGraph};
pub use self::inductive::mine_tree;

/// Block-structured process model. Loops list the body first, then the
/// redo parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProcessTree {
    Activity(Activity),
    Silent,
    Sequence(Vec<ProcessTree>),
    Xor(Vec<ProcessTree>),
    Parallel(Vec<ProcessTree>),
    Loop(Vec<ProcessTree>),
}

impl ProcessTree {
    pub fn children(&self) -> &[ProcessTree] {
        match self {
            ProcessTree::Activity(_) | ProcessTree::Silent => &[],
            ProcessTree::Sequence(c) | ProcessTree::Xor(c) | ProcessTree::Parallel(c) | ProcessTree::Loop(c) => c,
        }
    }

    /// Operators have at least two children; leaves have none.
    pub fn is_valid(&self) -> bool {
        match self {
            ProcessTree::Activity(_) | ProcessTree::Silent => true,
            _ => self.children().len() >= 2 && self.children().iter().all(|c| c.is_valid()),
        }
    }

    /// Visible labels, sorted and deduplicated.
    pub fn activities(&self) -> Vec<Activity> {
        fn walk(t: &ProcessTree, out: &mut Vec<Activity>) {
            if let ProcessTree::Activity(a) = t {
                out.push(a.clone());
            }
            for c in t.children() {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for ProcessTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self {
            ProcessTree::Activity(a) => return write!(f, "{a}"),
            ProcessTree::Silent => return write!(f, "tau"),
            ProcessTree::Sequence(_) => "->",
            ProcessTree::Xor(_) => "X",
            ProcessTree::Parallel(_) => "+",
            ProcessTree::Loop(_) => "*",
        };
        write!(f, "{op}(")?;
        for (i, c) in self.children().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A discovery backend.
pub trait Miner {
    fn name(&self) -> &'static str;

    fn discover(&self, log: &EventLog) -> Result<PetriNet>;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InductiveMiner;

impl Miner for InductiveMiner {
    fn name(&self) -> &'static str {
        "inductive"
    }

    fn discover(&self, log: &EventLog) -> Result<PetriNet> {
        if log.is_empty() {
            return Err(Error::EmptyLog);
        }
        Ok(tree_to_net(&mine_tree(log)))
    }
}

/// Discovers a net with the inductive miner.
pub fn discover(log: &EventLog) -> Result<PetriNet> {
    InductiveMiner.discover(log)
}
