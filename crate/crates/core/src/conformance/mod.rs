//! Conformance checking: alignment fitness, escaping-edges precision, F-beta,
//! deviating traces and coverage.
//!
//! Every variant is aligned once per (log, net) pair through [`align_log`];
//! the remaining metrics are derived from that [`LogAlignment`].

mod alignment;
mod precision;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::eventlog::{EventLog, Sublog, Trace};
use crate::exec::Execution;
use crate::petrinet::{PetriNet, DEFAULT_STATE_BUDGET};
use crate::{Error, Result};

pub use self::alignment::{AlignmentResult, Move};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlignOptions {
    /// Distinct search states allowed per alignment.
    pub state_budget: usize,
    /// Distinct markings allowed per silent-closure query while replaying
    /// the model language for precision.
    pub language_budget: usize,
    pub execution: Execution,
}

impl Default for AlignOptions {
    fn default() -> Self {
        AlignOptions {
            state_budget: DEFAULT_STATE_BUDGET,
            language_budget: DEFAULT_STATE_BUDGET,
            execution: Execution::default(),
        }
    }
}

/// Optimal alignment of one trace against a net.
pub fn alignment_cost(trace: &Trace, net: &PetriNet, budget: usize) -> Result<AlignmentResult> {
    let shortest = net.shortest_visible_path_within(budget)?;
    alignment::align(trace, net, shortest, budget)
}

/// `1 - cost / (|trace| + shortest visible path)`, and 1 for a perfect fit.
pub fn trace_fitness(trace: &Trace, net: &PetriNet) -> Result<f64> {
    Ok(alignment_cost(trace, net, DEFAULT_STATE_BUDGET)?.fitness())
}

/// Alignments of every variant of a log.
#[derive(Clone, Debug)]
pub struct LogAlignment {
    pub variants: Vec<(Trace, u64, AlignmentResult)>,
    total: u64,
}

pub fn align_log(log: &EventLog, net: &PetriNet, opts: &AlignOptions) -> Result<LogAlignment> {
    if log.is_empty() {
        return Err(Error::EmptyLog);
    }
    let shortest = net.shortest_visible_path_within(opts.state_budget)?;
    let variants = log.variants();
    let aligned = opts.execution.try_map(&variants, |(t, _)| alignment::align(t, net, shortest, opts.state_budget))?;
    Ok(LogAlignment {
        variants: variants.into_iter().zip(aligned).map(|((t, c), a)| (t, c, a)).collect(),
        total: log.total_traces(),
    })
}

impl LogAlignment {
    /// Frequency-weighted mean trace fitness.
    pub fn fitness(&self) -> f64 {
        let sum: f64 = self.variants.iter().map(|(_, c, a)| *c as f64 * a.fitness()).sum();
        sum / self.total as f64
    }

    pub fn precision(&self, net: &PetriNet, budget: usize) -> Result<f64> {
        let replayed: Vec<(Trace, u64)> = self.variants.iter().map(|(_, c, a)| (a.model_projection(), *c)).collect();
        precision::escaping_edges(net, &replayed, budget)
    }

    /// Variants with non-zero alignment cost, counts preserved.
    pub fn deviating(&self) -> Vec<(Trace, u64)> {
        self.variants.iter().filter(|(_, _, a)| a.cost > 0).map(|(t, c, _)| (t.clone(), *c)).collect()
    }

    /// Share of traces with a perfect alignment.
    pub fn model_trace_coverage(&self) -> f64 {
        let fitting: u64 = self.variants.iter().filter(|(_, _, a)| a.cost == 0).map(|(_, c, _)| c).sum();
        fitting as f64 / self.total as f64
    }
}

pub fn log_fitness(log: &EventLog, net: &PetriNet) -> Result<f64> {
    Ok(align_log(log, net, &AlignOptions::default())?.fitness())
}

pub fn etc_precision(log: &EventLog, net: &PetriNet) -> Result<f64> {
    let opts = AlignOptions::default();
    align_log(log, net, &opts)?.precision(net, opts.language_budget)
}

/// Weighted harmonic mean of precision and fitness; `beta > 1` favours fitness.
pub fn f_beta(precision: f64, fitness: f64, beta: f64) -> Result<f64> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::NegativeBeta(beta));
    }
    if precision == 0.0 || fitness == 0.0 {
        return Ok(0.0);
    }
    let b2 = beta * beta;
    if b2.is_infinite() {
        return Ok(fitness);
    }
    Ok((1.0 + b2) * precision * fitness / (b2 * precision + fitness))
}

/// Variants whose fitness is below 1.
pub fn deviating_traces(log: &EventLog, net: &PetriNet) -> Result<Sublog> {
    if log.is_empty() {
        return log.sublog(std::iter::empty::<&Trace>());
    }
    let aligned = align_log(log, net, &AlignOptions::default())?;
    let deviating = aligned.deviating();
    log.sublog(deviating.iter().map(|(t, _)| t))
}

/// Share of traces equal to a prototype, and share of traces the net
/// replays perfectly.
pub fn coverage(prototypes: &[Trace], log: &EventLog, net: &PetriNet) -> Result<(f64, f64)> {
    let aligned = align_log(log, net, &AlignOptions::default())?;
    Ok((log_coverage(prototypes, log)?, aligned.model_trace_coverage()))
}

fn log_coverage(prototypes: &[Trace], log: &EventLog) -> Result<f64> {
    let mut seen = HashSet::new();
    let mut covered = 0u64;
    for p in prototypes {
        if !log.contains(p) {
            return Err(Error::PrototypeNotInLog(format!("{p:?}")));
        }
        if seen.insert(p) {
            covered += log.count(p);
        }
    }
    Ok(covered as f64 / log.total_traces() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub fitness: f64,
    pub precision: f64,
    pub f_beta: f64,
    pub beta: f64,
    pub size: usize,
    pub cardoso: usize,
    pub log_coverage: f64,
    pub model_trace_coverage: f64,
}

impl QualityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are plain numbers")
    }

    /// Plain F1 of the same fitness and precision.
    pub fn f1(&self) -> f64 {
        f_beta(self.precision, self.fitness, 1.0).expect("beta 1 is valid")
    }
}

/// Builds the report from an existing alignment of `log` against `net`.
pub fn report_from(
    aligned: &LogAlignment,
    log: &EventLog,
    net: &PetriNet,
    beta: f64,
    prototypes: Option<&[Trace]>,
    opts: &AlignOptions,
) -> Result<QualityReport> {
    let fitness = aligned.fitness();
    let precision = aligned.precision(net, opts.language_budget)?;
    Ok(QualityReport {
        fitness,
        precision,
        f_beta: f_beta(precision, fitness, beta)?,
        beta,
        size: net.size_metric(),
        cardoso: net.cardoso_metric(),
        log_coverage: match prototypes {
            Some(p) => log_coverage(p, log)?,
            None => 0.0,
        },
        model_trace_coverage: aligned.model_trace_coverage(),
    })
}

/// Full quality report of `net` against `log`. Without prototypes the log
/// coverage is 0.
pub fn evaluate(
    log: &EventLog,
    net: &PetriNet,
    beta: f64,
    prototypes: Option<&[Trace]>,
    opts: &AlignOptions,
) -> Result<QualityReport> {
    f_beta(1.0, 1.0, beta)?;
    let aligned = align_log(log, net, opts)?;
    report_from(&aligned, log, net, beta, prototypes, opts)
}
