//! Event logs stored as variant multisets.
//!
//! Only the control-flow perspective survives ingestion: each case becomes a
//! [`Trace`] of activity labels and identical traces collapse into a single
//! variant with an occurrence count.

mod csv;
mod xes;

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use self::csv::{parse_csv, CsvConfig};
pub use self::xes::{parse_xes, write_xes};

/// An activity label. Cheap to clone; compared by exact string equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Activity(Arc<str>);

impl Activity {
    pub fn new(label: impl AsRef<str>) -> Self {
        Activity(Arc::from(label.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Activity {
    fn from(s: &str) -> Self {
        Activity::new(s)
    }
}

impl Serialize for Activity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Activity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d).map(Activity::new)
    }
}

/// An ordered sequence of activities. Ordering is lexicographic.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trace(Vec<Activity>);

impl Trace {
    pub fn new(activities: Vec<Activity>) -> Self {
        Trace(activities)
    }

    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    pub fn from_labels<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Trace(labels.into_iter().map(Activity::new).collect())
    }

    pub fn activities(&self) -> &[Activity] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, a: Activity) {
        self.0.push(a);
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Activity> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Activity> {
        self.0
    }
}

impl fmt::Debug for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ">")
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromIterator<Activity> for Trace {
    fn from_iter<I: IntoIterator<Item = Activity>>(iter: I) -> Self {
        Trace(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Trace {
    type Item = &'a Activity;
    type IntoIter = std::slice::Iter<'a, Activity>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl std::ops::Deref for Trace {
    type Target = [Activity];

    fn deref(&self) -> &[Activity] {
        &self.0
    }
}

/// A multiset of traces, kept variant-compressed.
///
/// Invariants: every stored count is at least 1, and `total_traces` is the
/// sum of the counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventLog {
    variants: BTreeMap<Trace, u64>,
    total: u64,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a log from `(trace, count)` pairs; repeated traces are summed
    /// and zero counts are dropped.
    pub fn from_traces<I>(traces: I) -> Self
    where
        I: IntoIterator<Item = (Trace, u64)>,
    {
        let mut log = EventLog::new();
        for (t, c) in traces {
            log.add(t, c);
        }
        log
    }

    pub fn add(&mut self, trace: Trace, count: u64) {
        if count == 0 {
            return;
        }
        *self.variants.entry(trace).or_insert(0) += count;
        self.total += count;
    }

    pub fn push(&mut self, trace: Trace) {
        self.add(trace, 1);
    }

    pub fn total_traces(&self) -> u64 {
        self.total
    }

    pub fn num_variants(&self) -> usize {
        self.variants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn count(&self, trace: &Trace) -> u64 {
        self.variants.get(trace).copied().unwrap_or(0)
    }

    pub fn contains(&self, trace: &Trace) -> bool {
        self.variants.contains_key(trace)
    }

    /// Variants in lexicographic trace order.
    pub fn iter(&self) -> impl Iterator<Item = (&Trace, u64)> {
        self.variants.iter().map(|(t, &c)| (t, c))
    }

    /// Variants sorted by descending count, ties broken by lexicographic trace order.
    pub fn variants(&self) -> Vec<(Trace, u64)> {
        let mut out: Vec<(Trace, u64)> = self.variants.iter().map(|(t, &c)| (t.clone(), c)).collect();
        // BTreeMap order is already lexicographic, so a stable sort on count suffices
        out.sort_by_key(|v| std::cmp::Reverse(v.1));
        out
    }

    /// Sorted set of activity labels occurring in the log.
    pub fn activities(&self) -> Vec<Activity> {
        let mut set: Vec<Activity> = self.variants.keys().flat_map(|t| t.iter().cloned()).collect();
        set.sort();
        set.dedup();
        set
    }

    /// Total number of events.
    pub fn num_events(&self) -> u64 {
        self.variants.iter().map(|(t, &c)| t.len() as u64 * c).sum()
    }

    /// Content fingerprint; equal logs have equal ids within one build.
    pub fn id(&self) -> LogId {
        let mut h = DefaultHasher::new();
        self.variants.hash(&mut h);
        LogId(h.finish())
    }

    /// Restricts the log to the given traces, keeping their original counts.
    /// Traces absent from the log are an error.
    pub fn sublog<'a, I>(&self, traces: I) -> Result<Sublog>
    where
        I: IntoIterator<Item = &'a Trace>,
    {
        let mut log = EventLog::new();
        for t in traces {
            let c = self.count(t);
            if c == 0 {
                return Err(Error::PrototypeNotInLog(t.to_string()));
            }
            if !log.contains(t) {
                log.add(t.clone(), c);
            }
        }
        Ok(Sublog { parent: self.id(), log })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LogId(u64);

/// A log whose variants all occur in a parent log with at least the same count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublog {
    parent: LogId,
    log: EventLog,
}

impl Sublog {
    pub fn parent(&self) -> LogId {
        self.parent
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn into_log(self) -> EventLog {
        self.log
    }

    pub fn is_sublog_of(&self, parent: &EventLog) -> bool {
        self.parent == parent.id() && self.log.iter().all(|(t, c)| parent.count(t) >= c)
    }
}

impl std::ops::Deref for Sublog {
    type Target = EventLog;

    fn deref(&self) -> &EventLog {
        &self.log
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Trace {
        Trace::from_labels(s.chars().map(|c| c.to_string()))
    }

    #[test]
    fn variants_sorted_by_count_then_trace() {
        let log = EventLog::from_traces([(t("ac"), 1), (t("ab"), 2)]);
        assert_eq!(log.variants(), vec![(t("ab"), 2), (t("ac"), 1)]);
        assert_eq!(log.total_traces(), 3);

        let log = EventLog::from_traces([(t("b"), 1), (t("a"), 1)]);
        assert_eq!(log.variants(), vec![(t("a"), 1), (t("b"), 1)]);

        assert!(EventLog::new().variants().is_empty());
    }

    #[test]
    fn zero_counts_are_dropped_and_duplicates_merged() {
        let log = EventLog::from_traces([(t("a"), 0), (t("b"), 2), (t("b"), 3)]);
        assert_eq!(log.num_variants(), 1);
        assert_eq!(log.count(&t("b")), 5);
        assert_eq!(log.total_traces(), 5);
    }

    #[test]
    fn sublog_keeps_counts_and_rejects_foreign_traces() {
        let log = EventLog::from_traces([(t("ab"), 4), (t("c"), 1)]);
        let sub = log.sublog([&t("ab")]).unwrap();
        assert_eq!(sub.count(&t("ab")), 4);
        assert!(sub.is_sublog_of(&log));
        assert!(!sub.is_sublog_of(&EventLog::from_traces([(t("ab"), 1)])));
        assert!(matches!(log.sublog([&t("zz")]), Err(Error::PrototypeNotInLog(_))));
    }

    #[test]
    fn activities_are_sorted_universe() {
        let log = EventLog::from_traces([(t("cab"), 1), (t("ba"), 1)]);
        let acts = log.activities();
        assert_eq!(acts, [Activity::new("a"), Activity::new("b"), Activity::new("c")]);
        assert_eq!(log.num_events(), 5);
    }
}
