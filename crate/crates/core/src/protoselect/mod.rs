//! Incremental prototype selection and the selection baselines it is
//! compared against.
//!
//! The driver clusters all variants and discovers a model from the `k`
//! medoids. While some variants still deviate from the model, it clusters
//! those, adds their medoids and rediscovers; a round is kept only if it
//! strictly raises F-beta on the full log.

mod baseline;
mod synth;

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::clustering::KMedoids;
use crate::conformance::{align_log, f_beta, report_from, AlignOptions, LogAlignment, QualityReport};
use crate::discovery::{InductiveMiner, Miner};
use crate::eventlog::{EventLog, Trace};
use crate::exec::Execution;
use crate::petrinet::PetriNet;
use crate::tracedist::{distance_matrix_with, DistanceMatrix};
use crate::{Error, Result};

pub use self::baseline::{baseline_frequency, baseline_random};
pub use self::synth::{gen_synthetic, GeneratorSpec};

pub const DEFAULT_MAX_ITERATIONS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionConfig {
    /// Clusters in the first round, and at most this many in later rounds.
    pub k: usize,
    pub beta: f64,
    /// Seeds the optional K-Medoids restarts.
    pub seed: u64,
    pub restarts: usize,
    pub max_iterations: usize,
    pub align: AlignOptions,
}

impl SelectionConfig {
    pub fn new(k: usize, beta: f64) -> Self {
        SelectionConfig {
            k,
            beta,
            seed: 0,
            restarts: 0,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            align: AlignOptions::default(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn state_budget(mut self, budget: usize) -> Self {
        self.align.state_budget = budget;
        self
    }

    pub fn language_budget(mut self, budget: usize) -> Self {
        self.align.language_budget = budget;
        self
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.align.execution = execution;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    NoImprovement,
    NoDeviatingTraces,
    IterationCap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub prototypes_added: Vec<Trace>,
    pub prototype_total: usize,
    pub report: QualityReport,
    /// Whether this round's model was kept.
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct SelectionResult {
    pub model: PetriNet,
    pub prototypes: Vec<Trace>,
    pub history: Vec<IterationRecord>,
    pub stop_reason: StopReason,
    /// Report of the returned model.
    pub report: QualityReport,
}

/// Runs the selection loop with the inductive miner.
pub fn select_incremental(log: &EventLog, cfg: &SelectionConfig) -> Result<SelectionResult> {
    select_with(log, cfg, &InductiveMiner)
}

struct Round {
    model: PetriNet,
    aligned: LogAlignment,
    report: QualityReport,
}

pub fn select_with(log: &EventLog, cfg: &SelectionConfig, miner: &dyn Miner) -> Result<SelectionResult> {
    f_beta(1.0, 1.0, cfg.beta)?;
    if log.is_empty() {
        return Err(Error::EmptyLog);
    }
    let variants = log.variants();
    if cfg.k == 0 || cfg.k > variants.len() {
        return Err(Error::InvalidK { k: cfg.k, variants: variants.len() });
    }
    let traces: Vec<Trace> = variants.iter().map(|(t, _)| t.clone()).collect();
    let matrix = distance_matrix_with(&traces, cfg.align.execution)?;
    let index: HashMap<&Trace, usize> = traces.iter().enumerate().map(|(i, t)| (t, i)).collect();

    let mut prototypes = medoids(cfg, &variants, &matrix, cfg.k).map_err(|e| e.at_iteration(1))?;
    let mut best = round(log, &prototypes, cfg, miner).map_err(|e| e.at_iteration(1))?;
    let mut history = vec![IterationRecord {
        iteration: 1,
        prototypes_added: prototypes.clone(),
        prototype_total: prototypes.len(),
        report: best.report.clone(),
        accepted: true,
    }];

    let stop_reason = loop {
        let deviating = best.aligned.deviating();
        if deviating.is_empty() {
            break StopReason::NoDeviatingTraces;
        }
        let iteration = history.len() + 1;
        if iteration > cfg.max_iterations {
            break StopReason::IterationCap;
        }

        let ids: Vec<usize> = deviating.iter().map(|(t, _)| index[t]).collect();
        let k = cfg.k.min(deviating.len());
        let chosen = medoids(cfg, &deviating, &matrix.restrict(&ids), k).map_err(|e| e.at_iteration(iteration))?;
        let selected: HashSet<&Trace> = prototypes.iter().collect();
        let added: Vec<Trace> = chosen.into_iter().filter(|t| !selected.contains(t)).collect();
        if added.is_empty() {
            break StopReason::NoImprovement;
        }

        let mut candidate = prototypes.clone();
        candidate.extend(added.iter().cloned());
        let next = round(log, &candidate, cfg, miner).map_err(|e| e.at_iteration(iteration))?;
        let improved = next.report.f_beta > best.report.f_beta;
        history.push(IterationRecord {
            iteration,
            prototypes_added: added,
            prototype_total: candidate.len(),
            report: next.report.clone(),
            accepted: improved,
        });
        if !improved {
            break StopReason::NoImprovement;
        }
        prototypes = candidate;
        best = next;
    };

    Ok(SelectionResult { model: best.model, prototypes, history, stop_reason, report: best.report })
}

fn medoids(cfg: &SelectionConfig, variants: &[(Trace, u64)], matrix: &DistanceMatrix, k: usize) -> Result<Vec<Trace>> {
    let clustering = KMedoids::new(k)
        .seed(cfg.seed)
        .restarts(cfg.restarts)
        .execution(cfg.align.execution)
        .run(variants, matrix)?;
    Ok(clustering.prototypes())
}

/// Discovers from the prototypes (with their log counts) and scores the
/// model against the full log.
fn round(log: &EventLog, prototypes: &[Trace], cfg: &SelectionConfig, miner: &dyn Miner) -> Result<Round> {
    let sub = log.sublog(prototypes)?;
    let model = miner.discover(&sub)?;
    let aligned = align_log(log, &model, &cfg.align)?;
    let report = report_from(&aligned, log, &model, cfg.beta, Some(prototypes), &cfg.align)?;
    Ok(Round { model, aligned, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformance::evaluate;
    use crate::discovery::discover;

    fn t(s: &str) -> Trace {
        Trace::from_labels(s.chars().map(|c| c.to_string()))
    }

    fn log(entries: &[(&str, u64)]) -> EventLog {
        EventLog::from_traces(entries.iter().map(|(s, c)| (t(s), *c)))
    }

    #[test]
    fn single_variant_stops_immediately() {
        let l = log(&[("abc", 10)]);
        let r = select_incremental(&l, &SelectionConfig::new(1, 1.0)).unwrap();
        assert_eq!(r.stop_reason, StopReason::NoDeviatingTraces);
        assert_eq!(r.history.len(), 1);
        assert_eq!(r.report.model_trace_coverage, 1.0);
        assert_eq!(r.report.log_coverage, 1.0);
    }

    #[test]
    fn two_behaviours_two_clusters() {
        let l = log(&[("abc", 50), ("xyz", 50)]);
        let r = select_incremental(&l, &SelectionConfig::new(2, 1.0)).unwrap();
        let mut p = r.prototypes.clone();
        p.sort();
        assert_eq!(p, vec![t("abc"), t("xyz")]);
        assert_eq!(r.history[0].report.fitness, 1.0);
        assert_eq!(r.stop_reason, StopReason::NoDeviatingTraces);
    }

    #[test]
    fn three_groups_grow_prototypes() {
        let l = log(&[("abc", 30), ("abbc", 5), ("xyz", 20), ("xz", 3), ("mnop", 10), ("mnnop", 2)]);
        let r = select_incremental(&l, &SelectionConfig::new(1, 1.0)).unwrap();
        for w in r.history.windows(2) {
            assert!(w[1].prototype_total > w[0].prototype_total);
        }
        let accepted: Vec<_> = r.history.iter().filter(|h| h.accepted).collect();
        for w in accepted.windows(2) {
            assert!(w[1].report.fitness >= w[0].report.fitness);
        }
        let max = r.history.iter().map(|h| h.report.f_beta).fold(f64::MIN, f64::max);
        assert_eq!(r.report.f_beta, max);
        for p in &r.prototypes {
            assert!(l.contains(p));
        }
        // the returned model is the one discovered from the returned prototypes
        let again = discover(&l.sublog(&r.prototypes).unwrap()).unwrap();
        assert_eq!(again, r.model);
        let rep = evaluate(&l, &r.model, 1.0, Some(&r.prototypes), &AlignOptions::default()).unwrap();
        assert_eq!(rep, r.report);
    }

    #[test]
    fn iteration_cap() {
        let l = log(&[("abc", 30), ("xyz", 20), ("mnop", 10)]);
        let r = select_incremental(&l, &SelectionConfig::new(1, 1.0).max_iterations(1)).unwrap();
        assert_eq!(r.stop_reason, StopReason::IterationCap);
        assert_eq!(r.history.len(), 1);
    }

    #[test]
    fn invalid_parameters() {
        let l = log(&[("abc", 1), ("xyz", 1)]);
        assert!(matches!(select_incremental(&l, &SelectionConfig::new(3, 1.0)), Err(Error::InvalidK { k: 3, variants: 2 })));
        assert!(matches!(select_incremental(&l, &SelectionConfig::new(0, 1.0)), Err(Error::InvalidK { .. })));
        assert!(matches!(select_incremental(&l, &SelectionConfig::new(1, -1.0)), Err(Error::NegativeBeta(_))));
        assert!(matches!(select_incremental(&EventLog::new(), &SelectionConfig::new(1, 1.0)), Err(Error::EmptyLog)));
    }

    #[test]
    fn deterministic() {
        let l = log(&[("abc", 30), ("abbc", 5), ("xyz", 20), ("xz", 3), ("mnop", 10)]);
        let cfg = SelectionConfig::new(1, 1.0).seed(4).restarts(3);
        let a = select_incremental(&l, &cfg).unwrap();
        let b = select_incremental(&l, &cfg.clone().execution(Execution::Sequential)).unwrap();
        assert_eq!(a.prototypes, b.prototypes);
        assert_eq!(a.history, b.history);
    }
}
