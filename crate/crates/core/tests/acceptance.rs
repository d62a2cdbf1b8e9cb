//! End-to-end acceptance checks. Runs as a plain binary so that every check
//! prints exactly one PASS/FAIL line, even when an earlier one fails.

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use protosel::clustering::KMedoids;
use protosel::conformance::{align_log, AlignOptions};
use protosel::fixtures::{base_model, fig1_net, flower_net, sequence_net};
use protosel::{
    alignment_cost, coverage, discover, distance_matrix, edit_distance, etc_precision, evaluate, f_beta, gen_synthetic,
    kmedoids, select_incremental, tree_to_net, Activity, EventLog, Execution, GeneratorSpec, ProcessTree, SelectionConfig,
    Trace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn main() {
    let checks: [(&str, Duration, Check); 10] = [
        ("edit-distance fidelity", Duration::from_secs(5), edit_distance_fidelity),
        ("fig1 language oracle", Duration::MAX, fig1_language),
        ("alignment oracle equivalence", Duration::from_secs(60), alignment_oracle),
        ("f-beta algebra", Duration::MAX, f_beta_algebra),
        ("discovery replay guarantee", Duration::from_secs(120), discovery_replay),
        ("k-medoids invariants", Duration::MAX, kmedoids_invariants),
        ("loop termination and best-return", Duration::MAX, loop_termination),
        ("trend at desk scale", Duration::from_secs(300), trend),
        ("precision ordering", Duration::MAX, precision_ordering),
        ("coverage sanity", Duration::MAX, coverage_sanity),
    ];

    let mut failed = 0;
    for (i, (name, limit, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *limit => Err(format!("{detail}; took {elapsed:.1?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  criterion {:>2}  {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {:>2}  {name} ({elapsed:.2?}): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn t(s: &str) -> Trace {
    Trace::from_labels(s.chars().map(|c| c.to_string()))
}

fn random_trace(rng: &mut ChaCha8Rng, alphabet: &[char], max_len: usize) -> Trace {
    let len = rng.gen_range(0..=max_len);
    Trace::from_labels((0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())].to_string()))
}

/// Longest common subsequence by memoised recursion.
fn lcs_oracle(a: &[Activity], b: &[Activity]) -> usize {
    fn go(a: &[Activity], b: &[Activity], memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if a.is_empty() || b.is_empty() {
            return 0;
        }
        if let Some(&v) = memo.get(&(a.len(), b.len())) {
            return v;
        }
        let v = if a[0] == b[0] { 1 + go(&a[1..], &b[1..], memo) } else { go(&a[1..], b, memo).max(go(a, &b[1..], memo)) };
        memo.insert((a.len(), b.len()), v);
        v
    }
    go(a, b, &mut HashMap::new())
}

fn indel_oracle(a: &Trace, b: &Trace) -> usize {
    a.len() + b.len() - 2 * lcs_oracle(a.activities(), b.activities())
}

fn edit_distance_fidelity() -> Result<String, String> {
    let worked = edit_distance(&t("acfed"), &t("afcad"));
    ensure(worked == 4, || format!("worked example gave {worked}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let alphabet: Vec<char> = "abcdef".chars().collect();
    for i in 0..1000 {
        let a = random_trace(&mut rng, &alphabet, 12);
        let b = random_trace(&mut rng, &alphabet, 12);
        let got = edit_distance(&a, &b) as usize;
        let want = indel_oracle(&a, &b);
        ensure(got == want, || format!("pair {i}: {a:?} vs {b:?} gave {got}, oracle {want}"))?;
    }
    Ok("worked example 4; 1000 random pairs match the LCS identity".into())
}

fn fig1_language() -> Result<String, String> {
    let net = fig1_net();
    let lang = net.language_upto(4, 10_000).map_err(|e| e.to_string())?;
    let want: BTreeSet<Trace> = ["abde", "adce", "acde", "adbe"].iter().map(|s| t(s)).collect();
    ensure(lang == want, || format!("language {lang:?}"))?;
    let shortest = net.shortest_visible_path().map_err(|e| e.to_string())?;
    ensure(shortest == 4, || format!("shortest path {shortest}"))?;
    Ok("language is the four words, shortest path 4".into())
}

/// Random loop-free process tree over `a..e`.
fn acyclic_tree(rng: &mut ChaCha8Rng, depth: usize) -> ProcessTree {
    if depth == 0 || rng.gen_bool(0.35) {
        if rng.gen_bool(0.1) {
            return ProcessTree::Silent;
        }
        return ProcessTree::Activity(((b'a' + rng.gen_range(0..5)) as char).to_string().as_str().into());
    }
    let children = (0..rng.gen_range(2..=3)).map(|_| acyclic_tree(rng, depth - 1)).collect();
    match rng.gen_range(0..3) {
        0 => ProcessTree::Sequence(children),
        1 => ProcessTree::Xor(children),
        _ => ProcessTree::Parallel(children),
    }
}

fn tree_leaves(t: &ProcessTree) -> usize {
    match t {
        ProcessTree::Activity(_) => 1,
        _ => t.children().iter().map(tree_leaves).sum(),
    }
}

fn alignment_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let alphabet: Vec<char> = "abcdef".chars().collect();
    let mut pairs = 0;
    let mut nonzero = 0;
    for n in 0..220 {
        let net = match n {
            0 => fig1_net(),
            1 => sequence_net(&["a", "b", "c"]),
            _ => loop {
                // keep the brute-force language small enough to enumerate
                let tree = acyclic_tree(&mut rng, 3);
                if tree_leaves(&tree) <= 7 {
                    break tree_to_net(&tree);
                }
            },
        };
        let visible = net.transitions().iter().filter(|t| !t.is_silent()).count();
        let lang = net.language_upto(visible, 1_000_000).map_err(|e| e.to_string())?;
        for _ in 0..2 {
            let trace = random_trace(&mut rng, &alphabet, 7);
            let oracle = lang.iter().map(|w| indel_oracle(&trace, w)).min().ok_or("empty language")?;
            let got = alignment_cost(&trace, &net, 1_000_000).map_err(|e| e.to_string())?.cost as usize;
            ensure(got == oracle, || format!("net {n}, trace {trace:?}: cost {got}, oracle {oracle}"))?;
            pairs += 1;
            nonzero += usize::from(oracle > 0);
        }
    }
    Ok(format!("{pairs} (net, trace) pairs exact, {nonzero} with non-zero cost"))
}

fn f_beta_algebra() -> Result<String, String> {
    let grid: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let betas = [0.0, 0.5, 1.0, 2.0, 4.0];
    for &p in &grid {
        for &f in &grid {
            let f1 = f_beta(p, f, 1.0).map_err(|e| e.to_string())?;
            let eq2 = 2.0 * p * f / (p + f);
            ensure((f1 - eq2).abs() <= 1e-12, || format!("F1({p},{f}) = {f1}, harmonic mean {eq2}"))?;
            let swapped = f_beta(f, p, 1.0).map_err(|e| e.to_string())?;
            ensure((f1 - swapped).abs() <= 1e-12, || format!("F1 not symmetric at ({p},{f})"))?;
            let mut prev = f64::NEG_INFINITY;
            for &b in &betas {
                let v = f_beta(p, f, b).map_err(|e| e.to_string())?;
                ensure(v >= p.min(f) - 1e-9 && v <= p.max(f) + 1e-9, || format!("F_{b}({p},{f}) = {v} out of bounds"))?;
                if f > p {
                    ensure(v >= prev - 1e-9, || format!("F_beta({p},{f}) decreased at beta {b}"))?;
                }
                prev = v;
            }
            let far = f_beta(p, f, 1e6).map_err(|e| e.to_string())?;
            ensure((far - f).abs() <= 1e-9, || format!("F_beta({p},{f}) at beta 1e6 is {far}, not {f}"))?;
        }
    }
    ensure(f_beta(0.5, 0.5, -1.0).is_err(), || "negative beta accepted".into())?;
    Ok("10x10x5 grid: beta 1 is the plain F1, symmetry, bounds, monotone limit".into())
}

fn discovery_replay() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut variants_checked = 0;
    let mut flowers = 0;
    for _ in 0..50 {
        let alphabet: Vec<char> = "abcdefgh".chars().take(rng.gen_range(1..=8)).collect();
        let n = rng.gen_range(1..=50);
        let log = EventLog::from_traces((0..n).map(|_| (random_trace(&mut rng, &alphabet, 12), rng.gen_range(1..=5))));
        let net = discover(&log).map_err(|e| e.to_string())?;
        let labels: BTreeSet<Activity> = net.labels().into_iter().collect();
        let acts: BTreeSet<Activity> = log.activities().into_iter().collect();
        ensure(labels == acts, || "net labels differ from the log alphabet".into())?;
        let aligned = align_log(&log, &net, &AlignOptions::default()).map_err(|e| e.to_string())?;
        for (trace, _, a) in &aligned.variants {
            ensure(a.cost == 0, || format!("{trace:?} has cost {} on the discovered net", a.cost))?;
        }
        variants_checked += aligned.variants.len();
        flowers += usize::from(net.places().len() == 1);
    }
    Ok(format!("50 logs, {variants_checked} variants all replay with cost 0 ({flowers} single-place nets)"))
}

fn kmedoids_invariants() -> Result<String, String> {
    let vs: Vec<(Trace, u64)> = vec![(t("ab"), 10), (t("abc"), 2), (t("xy"), 5), (t("xyz"), 1)];
    let m = distance_matrix(&vs.iter().map(|(t, _)| t.clone()).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    let mut protos = kmedoids(&vs, 2, &m, 0).map_err(|e| e.to_string())?.prototypes();
    protos.sort();
    ensure(protos == vec![t("ab"), t("xy")], || format!("worked example medoids {protos:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let alphabet: Vec<char> = "abcde".chars().collect();
    for round in 0..40 {
        let log = EventLog::from_traces((0..rng.gen_range(1..40)).map(|_| (random_trace(&mut rng, &alphabet, 8), rng.gen_range(1..=9))));
        let vs = log.variants();
        let traces: Vec<Trace> = vs.iter().map(|(t, _)| t.clone()).collect();
        let m = distance_matrix(&traces).map_err(|e| e.to_string())?;
        let k = rng.gen_range(1..=vs.len());
        let seed = rng.gen();
        let run = |exec| KMedoids::new(k).seed(seed).restarts(2).execution(exec).run(&vs, &m);
        let a = run(Execution::Parallel).map_err(|e| e.to_string())?;
        let b = run(Execution::Sequential).map_err(|e| e.to_string())?;
        ensure(a.medoid_indices == b.medoid_indices && a.total_cost == b.total_cost, || format!("round {round}: not deterministic"))?;
        ensure(a.prototypes().iter().all(|p| log.contains(p)), || format!("round {round}: medoid outside the variants"))?;
        ensure(a.cost_history.windows(2).all(|w| w[1] <= w[0]), || format!("round {round}: cost increased {:?}", a.cost_history))?;
        let plain = KMedoids::new(k).run(&vs, &m).map_err(|e| e.to_string())?;
        ensure(plain.cost_history.windows(2).all(|w| w[1] <= w[0]), || format!("round {round}: cost increased"))?;
        ensure(a.total_cost <= plain.total_cost, || format!("round {round}: restarts made it worse"))?;
    }
    Ok("worked example {ab, xy}; 40 random instances deterministic with non-increasing cost".into())
}

fn loop_termination() -> Result<String, String> {
    let mut logs = vec![EventLog::from_traces(
        [("abc", 30), ("abbc", 5), ("xyz", 20), ("xz", 3), ("mnop", 10), ("mnnop", 2)].iter().map(|(s, c)| (t(s), *c)),
    )];
    for seed in 1..=5 {
        let spec = GeneratorSpec { base: base_model("three-group").unwrap(), n_traces: 300, noise_rate: 0.1, seed };
        logs.push(gen_synthetic(&spec).map_err(|e| e.to_string())?);
    }
    let mut rounds = Vec::new();
    for (i, log) in logs.iter().enumerate() {
        let r = select_incremental(log, &SelectionConfig::new(1, 1.0)).map_err(|e| format!("log {i}: {e}"))?;
        ensure(r.history.len() <= log.num_variants(), || format!("log {i}: {} iterations", r.history.len()))?;
        ensure(r.history.windows(2).all(|w| w[1].prototype_total > w[0].prototype_total), || {
            format!("log {i}: prototype total did not grow")
        })?;
        let best = r.history.iter().map(|h| h.report.f_beta).fold(f64::NEG_INFINITY, f64::max);
        ensure(r.report.f_beta == best, || format!("log {i}: returned {} but best was {best}", r.report.f_beta))?;
        ensure(r.prototypes.iter().all(|p| log.contains(p)), || format!("log {i}: prototype outside the log"))?;
        rounds.push(r.history.len());
    }
    Ok(format!("6 three-group logs, iterations per run {rounds:?}"))
}

fn trend() -> Result<String, String> {
    let opts = AlignOptions::default();
    let mut wins = 0;
    let mut f1_wins = 0;
    let mut size_wins = 0;
    let mut rows = Vec::new();
    for seed in 1..=10 {
        let spec = GeneratorSpec { base: base_model("two-group").unwrap(), n_traces: 1000, noise_rate: 0.08, seed };
        let log = gen_synthetic(&spec).map_err(|e| e.to_string())?;
        let full = discover(&log).map_err(|e| e.to_string())?;
        let full_report = evaluate(&log, &full, 1.0, None, &opts).map_err(|e| e.to_string())?;
        let selected = select_incremental(&log, &SelectionConfig::new(2, 1.0)).map_err(|e| e.to_string())?;
        let f1_ok = selected.report.f1() >= full_report.f1();
        let size_ok = selected.report.size <= full_report.size;
        f1_wins += usize::from(f1_ok);
        size_wins += usize::from(size_ok);
        wins += usize::from(f1_ok && size_ok);
        rows.push(format!(
            "seed {seed}: F1 {:.3} vs {:.3}, size {} vs {}",
            selected.report.f1(),
            full_report.f1(),
            selected.report.size,
            full_report.size
        ));
    }
    let summary = format!("{wins}/10 seeds satisfy both (F1 {f1_wins}/10, size {size_wins}/10) [{}]", rows.join("; "));
    ensure(wins >= 7, || summary.clone())?;
    Ok(summary)
}

fn precision_ordering() -> Result<String, String> {
    let log = EventLog::from_traces([(t("abc"), 1)]);
    let seq = etc_precision(&log, &sequence_net(&["a", "b", "c"])).map_err(|e| e.to_string())?;
    let flower = etc_precision(&log, &flower_net(&["a", "b", "c"])).map_err(|e| e.to_string())?;
    ensure(seq == 1.0, || format!("sequence precision {seq}"))?;
    ensure(flower < 1.0, || format!("flower precision {flower}"))?;
    Ok(format!("sequence {seq}, flower {flower:.4}"))
}

fn coverage_sanity() -> Result<String, String> {
    let spec = GeneratorSpec { base: fig1_net(), n_traces: 200, noise_rate: 0.2, seed: 10 };
    let log = gen_synthetic(&spec).map_err(|e| e.to_string())?;
    let all: Vec<Trace> = log.iter().map(|(t, _)| t.clone()).collect();
    let labels: Vec<String> = log.activities().iter().map(|a| a.as_str().to_string()).collect();
    let flower = flower_net(&labels);
    let (log_cov, model_cov) = coverage(&all, &log, &flower).map_err(|e| e.to_string())?;
    ensure(log_cov == 1.0, || format!("log coverage {log_cov}"))?;
    ensure(model_cov == 1.0, || format!("model trace coverage {model_cov}"))?;
    Ok(format!("{} variants: log coverage 1, flower model trace coverage 1", log.num_variants()))
}
