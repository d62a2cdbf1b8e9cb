use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::eventlog::{Activity, EventLog};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DirectlyFollowsGraph {
    pub nodes: BTreeSet<Activity>,
    pub edges: BTreeMap<(Activity, Activity), u64>,
    pub start_activities: BTreeMap<Activity, u64>,
    pub end_activities: BTreeMap<Activity, u64>,
}

impl DirectlyFollowsGraph {
    pub fn edge(&self, a: &Activity, b: &Activity) -> u64 {
        self.edges.get(&(a.clone(), b.clone())).copied().unwrap_or(0)
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
}

/// Directly-follows counts, weighted by variant frequency.
pub fn dfg(log: &EventLog) -> DirectlyFollowsGraph {
    let mut g = DirectlyFollowsGraph::default();
    for (trace, count) in log.iter() {
        g.nodes.extend(trace.iter().cloned());
        for w in trace.windows(2) {
            *g.edges.entry((w[0].clone(), w[1].clone())).or_insert(0) += count;
        }
        if let (Some(first), Some(last)) = (trace.first(), trace.last()) {
            *g.start_activities.entry(first.clone()).or_insert(0) += count;
            *g.end_activities.entry(last.clone()).or_insert(0) += count;
        }
    }
    g
}
