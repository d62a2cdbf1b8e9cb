//! Recursive cut detection on directly-follows graphs.
//!
//! Activities are interned in lexicographic order so that every choice
//! (component order, part order) is deterministic.

use std::collections::BTreeMap;

use super::ProcessTree;
use crate::eventlog::{Activity, EventLog};

type Word = Vec<u32>;
type SubLog = BTreeMap<Word, u64>;

/// Mines a process tree from a non-empty log.
pub fn mine_tree(log: &EventLog) -> ProcessTree {
    let names = log.activities();
    let index: BTreeMap<&Activity, u32> = names.iter().enumerate().map(|(i, a)| (a, i as u32)).collect();
    let sub: SubLog = log
        .iter()
        .map(|(t, c)| (t.iter().map(|a| index[a]).collect(), c))
        .collect();
    simplify(Miner { names: &names }.mine(&sub))
}

fn nullable(t: &ProcessTree) -> bool {
    match t {
        ProcessTree::Activity(_) => false,
        ProcessTree::Silent => true,
        ProcessTree::Sequence(c) | ProcessTree::Parallel(c) => c.iter().all(nullable),
        ProcessTree::Xor(c) => c.iter().any(nullable),
        ProcessTree::Loop(c) => nullable(&c[0]),
    }
}

/// Language-preserving cleanup: nested operators of the same kind are
/// flattened, silent children of sequences and parallels are dropped, and a
/// silent xor branch goes when another branch already accepts the empty
/// trace. Each dropped choice is a free silent choice the aligner would
/// otherwise interleave with every concurrent branch.
fn simplify(tree: ProcessTree) -> ProcessTree {
    fn flat(children: Vec<ProcessTree>, same: fn(&ProcessTree) -> bool) -> Vec<ProcessTree> {
        let mut out = Vec::new();
        for c in children.into_iter().map(simplify) {
            if same(&c) {
                out.extend(c.children().iter().cloned());
            } else {
                out.push(c);
            }
        }
        out
    }
    fn collapse(mut c: Vec<ProcessTree>, op: fn(Vec<ProcessTree>) -> ProcessTree) -> ProcessTree {
        match c.len() {
            0 => ProcessTree::Silent,
            1 => c.pop().unwrap(),
            _ => op(c),
        }
    }
    match tree {
        ProcessTree::Sequence(c) => {
            let mut c = flat(c, |t| matches!(t, ProcessTree::Sequence(_)));
            c.retain(|t| *t != ProcessTree::Silent);
            collapse(c, ProcessTree::Sequence)
        }
        ProcessTree::Parallel(c) => {
            let mut c = flat(c, |t| matches!(t, ProcessTree::Parallel(_)));
            c.retain(|t| *t != ProcessTree::Silent);
            collapse(c, ProcessTree::Parallel)
        }
        ProcessTree::Xor(c) => {
            let c = flat(c, |t| matches!(t, ProcessTree::Xor(_)));
            let covered = c.iter().any(|t| *t != ProcessTree::Silent && nullable(t));
            let mut out: Vec<ProcessTree> = Vec::with_capacity(c.len());
            for t in c {
                let redundant = t == ProcessTree::Silent && (covered || out.contains(&ProcessTree::Silent));
                if !redundant {
                    out.push(t);
                }
            }
            collapse(out, ProcessTree::Xor)
        }
        ProcessTree::Loop(c) => ProcessTree::Loop(c.into_iter().map(simplify).collect()),
        leaf => leaf,
    }
}

struct Miner<'a> {
    names: &'a [Activity],
}

/// Directly-follows structure of one sub-log over local indices.
struct LocalDfg {
    acts: Vec<u32>,
    edge: Vec<Vec<bool>>,
    start: Vec<bool>,
    end: Vec<bool>,
}

impl LocalDfg {
    fn new(log: &SubLog) -> Self {
        let mut acts: Vec<u32> = log.keys().flatten().copied().collect();
        acts.sort_unstable();
        acts.dedup();
        let n = acts.len();
        let mut g = LocalDfg { edge: vec![vec![false; n]; n], start: vec![false; n], end: vec![false; n], acts };
        for w in log.keys() {
            let ix: Vec<usize> = w.iter().map(|a| g.local(*a)).collect();
            if let (Some(&f), Some(&l)) = (ix.first(), ix.last()) {
                g.start[f] = true;
                g.end[l] = true;
            }
            for p in ix.windows(2) {
                g.edge[p[0]][p[1]] = true;
            }
        }
        g
    }

    fn len(&self) -> usize {
        self.acts.len()
    }

    fn local(&self, a: u32) -> usize {
        self.acts.binary_search(&a).unwrap()
    }

    /// Transitive closure of the edge relation.
    fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        let mut r = self.edge.clone();
        for k in 0..n {
            for i in 0..n {
                if r[i][k] {
                    for j in 0..n {
                        if r[k][j] {
                            r[i][j] = true;
                        }
                    }
                }
            }
        }
        r
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller root so groups are labelled by their first member
        if ra < rb {
            self.0[rb] = ra;
        } else if rb < ra {
            self.0[ra] = rb;
        }
    }

    /// Groups of local indices, ordered by smallest member.
    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let r = self.find(i);
            by_root.entry(r).or_default().push(i);
        }
        by_root.into_values().collect()
    }
}

/// A partition of the sub-log alphabet, in local indices.
type Partition = Vec<Vec<usize>>;

fn xor_cut(g: &LocalDfg) -> Option<Partition> {
    let n = g.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in 0..n {
            if g.edge[i][j] {
                uf.union(i, j);
            }
        }
    }
    let groups = uf.groups();
    (groups.len() >= 2).then_some(groups)
}

fn sequence_cut(g: &LocalDfg) -> Option<Partition> {
    let n = g.len();
    let reach = g.reachability();
    let reaches = |xs: &[usize], ys: &[usize]| xs.iter().any(|&x| ys.iter().any(|&y| reach[x][y]));

    // strongly connected components first
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if reach[i][j] && reach[j][i] {
                uf.union(i, j);
            }
        }
    }
    let mut groups = uf.groups();

    // merge groups that are mutually reachable or mutually unreachable
    'merge: loop {
        for x in 0..groups.len() {
            for y in x + 1..groups.len() {
                let xy = reaches(&groups[x], &groups[y]);
                let yx = reaches(&groups[y], &groups[x]);
                if xy == yx {
                    let moved = groups.remove(y);
                    groups[x].extend(moved);
                    groups[x].sort_unstable();
                    continue 'merge;
                }
            }
        }
        break;
    }
    if groups.len() < 2 {
        return None;
    }

    // order: groups reaching more of the others come first
    let m = groups.len();
    let out_degree: Vec<usize> =
        (0..m).map(|x| (0..m).filter(|&y| y != x && reaches(&groups[x], &groups[y])).count()).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| out_degree[b].cmp(&out_degree[a]).then(groups[a][0].cmp(&groups[b][0])));
    let ordered: Partition = order.into_iter().map(|i| groups[i].clone()).collect();

    // no later part may reach an earlier one
    for i in 0..m {
        for j in i + 1..m {
            if reaches(&ordered[j], &ordered[i]) {
                return None;
            }
        }
    }
    Some(ordered)
}

fn parallel_cut(g: &LocalDfg) -> Option<Partition> {
    let n = g.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if !(g.edge[i][j] && g.edge[j][i]) {
                uf.union(i, j);
            }
        }
    }
    let groups = uf.groups();
    if groups.len() < 2 {
        return None;
    }
    // every part needs a start and an end activity; deficient parts are
    // merged into the first complete one
    let complete = |p: &[usize]| p.iter().any(|&a| g.start[a]) && p.iter().any(|&a| g.end[a]);
    let (mut good, bad): (Partition, Partition) = groups.into_iter().partition(|p| complete(p));
    if good.is_empty() {
        return None;
    }
    for p in bad {
        good[0].extend(p);
    }
    good[0].sort_unstable();
    (good.len() >= 2).then_some(good)
}

fn loop_cut(g: &LocalDfg) -> Option<Partition> {
    let n = g.len();
    let mut in_body: Vec<bool> = (0..n).map(|i| g.start[i] || g.end[i]).collect();
    if in_body.iter().all(|&b| b) {
        return None;
    }

    loop {
        // components of the non-body activities
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            for j in 0..n {
                if !in_body[i] && !in_body[j] && (g.edge[i][j] || g.edge[j][i]) {
                    uf.union(i, j);
                }
            }
        }
        let redo: Partition = uf.groups().into_iter().filter(|c| !in_body[c[0]]).collect();
        if redo.is_empty() {
            return None;
        }

        let body: Vec<usize> = (0..n).filter(|&i| in_body[i]).collect();
        let starts: Vec<usize> = (0..n).filter(|&i| g.start[i]).collect();
        let ends: Vec<usize> = (0..n).filter(|&i| g.end[i]).collect();

        let violates = |c: &[usize]| {
            // body -> redo edges must leave from end activities
            let bad_entry = body.iter().any(|&b| !g.end[b] && c.iter().any(|&x| g.edge[b][x]));
            // redo -> body edges must enter start activities
            let bad_exit = body.iter().any(|&b| !g.start[b] && c.iter().any(|&x| g.edge[x][b]));
            // all end activities lead into the redo part, or none do
            let from_ends: Vec<bool> = ends.iter().map(|&e| c.iter().any(|&x| g.edge[e][x])).collect();
            let partial_entry = from_ends.iter().any(|&b| b) && !from_ends.iter().all(|&b| b);
            let to_starts: Vec<bool> = starts.iter().map(|&s| c.iter().any(|&x| g.edge[x][s])).collect();
            let partial_exit = to_starts.iter().any(|&b| b) && !to_starts.iter().all(|&b| b);
            bad_entry || bad_exit || partial_entry || partial_exit
        };

        let mut changed = false;
        for c in &redo {
            if violates(c) {
                for &x in c {
                    in_body[x] = true;
                }
                changed = true;
            }
        }
        if !changed {
            let mut parts = vec![body];
            parts.extend(redo);
            return Some(parts);
        }
    }
}

impl Miner<'_> {
    fn leaf(&self, a: u32) -> ProcessTree {
        ProcessTree::Activity(self.names[a as usize].clone())
    }

    fn mine(&self, log: &SubLog) -> ProcessTree {
        let has_empty = log.contains_key(&Vec::new());
        if has_empty {
            let rest: SubLog = log.iter().filter(|(w, _)| !w.is_empty()).map(|(w, &c)| (w.clone(), c)).collect();
            if rest.is_empty() {
                return ProcessTree::Silent;
            }
            return ProcessTree::Xor(vec![ProcessTree::Silent, self.mine(&rest)]);
        }

        let g = LocalDfg::new(log);
        if g.len() == 1 && log.keys().all(|w| w.len() == 1) {
            return self.leaf(g.acts[0]);
        }

        if let Some(parts) = xor_cut(&g) {
            return ProcessTree::Xor(self.recurse(&g, &parts, split_xor(&g, log, &parts)));
        }
        if let Some(parts) = sequence_cut(&g) {
            return ProcessTree::Sequence(self.recurse(&g, &parts, project(&g, log, &parts)));
        }
        if let Some(parts) = parallel_cut(&g) {
            return ProcessTree::Parallel(self.recurse(&g, &parts, project(&g, log, &parts)));
        }
        if let Some(parts) = loop_cut(&g) {
            return ProcessTree::Loop(self.recurse(&g, &parts, split_loop(&g, log, &parts)));
        }
        self.flower(&g)
    }

    fn recurse(&self, _g: &LocalDfg, _parts: &Partition, logs: Vec<SubLog>) -> Vec<ProcessTree> {
        logs.iter().map(|l| self.mine(l)).collect()
    }

    fn flower(&self, g: &LocalDfg) -> ProcessTree {
        let redo = if g.len() == 1 {
            self.leaf(g.acts[0])
        } else {
            ProcessTree::Xor(g.acts.iter().map(|&a| self.leaf(a)).collect())
        };
        ProcessTree::Loop(vec![ProcessTree::Silent, redo])
    }
}

fn part_of(g: &LocalDfg, parts: &Partition) -> Vec<usize> {
    let mut owner = vec![0; g.len()];
    for (i, p) in parts.iter().enumerate() {
        for &a in p {
            owner[a] = i;
        }
    }
    owner
}

fn split_xor(g: &LocalDfg, log: &SubLog, parts: &Partition) -> Vec<SubLog> {
    let owner = part_of(g, parts);
    let mut out = vec![SubLog::new(); parts.len()];
    for (w, &c) in log {
        let p = owner[g.local(w[0])];
        *out[p].entry(w.clone()).or_insert(0) += c;
    }
    out
}

/// Projection of every trace onto each part's alphabet.
fn project(g: &LocalDfg, log: &SubLog, parts: &Partition) -> Vec<SubLog> {
    let owner = part_of(g, parts);
    let mut out = vec![SubLog::new(); parts.len()];
    for (w, &c) in log {
        for (p, sub) in out.iter_mut().enumerate() {
            let proj: Word = w.iter().copied().filter(|&a| owner[g.local(a)] == p).collect();
            *sub.entry(proj).or_insert(0) += c;
        }
    }
    out
}

/// Maximal runs of body / redo activities go to their part's sub-log.
fn split_loop(g: &LocalDfg, log: &SubLog, parts: &Partition) -> Vec<SubLog> {
    let owner = part_of(g, parts);
    let mut out = vec![SubLog::new(); parts.len()];
    for (w, &c) in log {
        let mut run: Word = Vec::new();
        let mut cur = owner[g.local(w[0])];
        for &a in w {
            let p = owner[g.local(a)];
            if p != cur {
                *out[cur].entry(std::mem::take(&mut run)).or_insert(0) += c;
                cur = p;
            }
            run.push(a);
        }
        *out[cur].entry(run).or_insert(0) += c;
    }
    out
}
