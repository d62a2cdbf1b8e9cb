use proptest::prelude::*;
use protosel::conformance::{align_log, AlignOptions};
use protosel::fixtures::{base_model, fig1_net};
use protosel::{
    deviating_traces, discover, evaluate, f_beta, gen_synthetic, select_incremental, trace_fitness, EventLog, Execution,
    GeneratorSpec, SelectionConfig, Trace,
};

fn arb_log() -> impl Strategy<Value = EventLog> {
    let label = prop::sample::select(vec!["a", "b", "c", "d", "e"]);
    let trace = prop::collection::vec(label, 0..7).prop_map(Trace::from_labels);
    prop::collection::vec((trace, 1u64..5), 1..15).prop_map(EventLog::from_traces)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn discovered_model_replays_its_log(log in arb_log()) {
        let net = discover(&log).unwrap();
        let aligned = align_log(&log, &net, &AlignOptions::default()).unwrap();
        prop_assert_eq!(aligned.model_trace_coverage(), 1.0);
        prop_assert_eq!(aligned.fitness(), 1.0);
    }

    #[test]
    fn deviating_and_fitting_partition_the_log(log in arb_log()) {
        let net = fig1_net();
        let deviating = deviating_traces(&log, &net).unwrap();
        let mut total = deviating.total_traces();
        for (t, c) in log.iter() {
            let fit = trace_fitness(t, &net).unwrap();
            prop_assert!((0.0..=1.0).contains(&fit));
            prop_assert_eq!(deviating.contains(t), fit < 1.0);
            if fit == 1.0 {
                total += c;
            }
        }
        prop_assert_eq!(total, log.total_traces());
    }

    #[test]
    fn f_beta_is_bounded(p in 0.0f64..=1.0, f in 0.0f64..=1.0, beta in 0.0f64..10.0) {
        let v = f_beta(p, f, beta).unwrap();
        if p == 0.0 || f == 0.0 {
            prop_assert_eq!(v, 0.0);
        } else {
            prop_assert!(v >= p.min(f) - 1e-12 && v <= p.max(f) + 1e-12);
        }
    }

    #[test]
    fn selection_invariants(log in arb_log(), k in 1usize..4) {
        let k = k.min(log.num_variants());
        let r = select_incremental(&log, &SelectionConfig::new(k, 1.0)).unwrap();
        for w in r.history.windows(2) {
            prop_assert!(w[1].prototype_total > w[0].prototype_total);
        }
        let best = r.history.iter().map(|h| h.report.f_beta).fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(r.report.f_beta, best);
        let mut seen = std::collections::HashSet::new();
        for p in &r.prototypes {
            prop_assert!(log.contains(p));
            prop_assert!(seen.insert(p.clone()));
        }
        prop_assert_eq!(&discover(&log.sublog(&r.prototypes).unwrap()).unwrap(), &r.model);
    }
}

#[test]
fn execution_modes_agree_end_to_end() {
    let spec = GeneratorSpec { base: base_model("three-group").unwrap(), n_traces: 400, noise_rate: 0.1, seed: 21 };
    let log = gen_synthetic(&spec).unwrap();
    let cfg = SelectionConfig::new(2, 1.5);
    let par = select_incremental(&log, &cfg.clone().execution(Execution::Parallel)).unwrap();
    let seq = select_incremental(&log, &cfg.execution(Execution::Sequential)).unwrap();
    assert_eq!(par.prototypes, seq.prototypes);
    assert_eq!(par.history, seq.history);
    assert_eq!(par.model, seq.model);
}

#[test]
fn noise_free_logs_are_rediscovered() {
    for name in ["fig1", "two-group", "three-group"] {
        let spec = GeneratorSpec { base: base_model(name).unwrap(), n_traces: 500, noise_rate: 0.0, seed: 3 };
        let log = gen_synthetic(&spec).unwrap();
        let net = discover(&log).unwrap();
        let report = evaluate(&log, &net, 1.0, None, &AlignOptions::default()).unwrap();
        assert_eq!(report.fitness, 1.0, "{name}");
        assert_eq!(report.precision, 1.0, "{name}");
    }
}
