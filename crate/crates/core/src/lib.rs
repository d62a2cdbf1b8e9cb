//! Incremental prototype selection for process discovery.
//!
//! The pipeline clusters the trace variants of an event log under the
//! insert/delete edit distance, discovers a Petri net from the cluster
//! medoids (the *prototypes*), scores that net against the whole log with
//! alignment fitness, escaping-edges precision and F-beta, and keeps adding
//! medoids of the deviating traces while F-beta improves.
//!
//! ```
//! use protosel::{EventLog, Trace, SelectionConfig, select_incremental};
//!
//! let log = EventLog::from_traces([
//!     (Trace::from_labels(["a", "b", "c"]), 50),
//!     (Trace::from_labels(["x", "y", "z"]), 50),
//! ]);
//! let result = select_incremental(&log, &SelectionConfig::new(2, 1.0)).unwrap();
//! assert_eq!(result.prototypes.len(), 2);
//! ```

pub mod clustering;
pub mod conformance;
pub mod discovery;
mod error;
pub mod eventlog;
pub mod exec;
pub mod fixtures;
pub mod petrinet;
pub mod protoselect;
pub mod tracedist;

pub use clustering::{kmedoids, Cluster, Clustering, KMedoids};
pub use conformance::{
    alignment_cost, coverage, deviating_traces, etc_precision, evaluate, f_beta, log_fitness,
    trace_fitness, AlignOptions, AlignmentResult, QualityReport,
};
pub use discovery::{dfg, discover, tree_to_net, DirectlyFollowsGraph, ProcessTree};
pub use error::{Error, Result};
pub use eventlog::{parse_csv, parse_xes, write_xes, Activity, CsvConfig, EventLog, Sublog, Trace};
pub use exec::Execution;
pub use petrinet::{Marking, PetriNet, PlaceId, TransitionId};
pub use protoselect::{
    baseline_frequency, baseline_random, gen_synthetic, select_incremental, GeneratorSpec,
    IterationRecord, SelectionConfig, SelectionResult, StopReason,
};
pub use tracedist::{distance_matrix, edit_distance, DistanceMatrix};
