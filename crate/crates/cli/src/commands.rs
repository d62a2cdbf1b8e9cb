use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use protosel::conformance::{evaluate as evaluate_model, f_beta, AlignOptions, QualityReport};
use protosel::discovery::{InductiveMiner, Miner};
use protosel::fixtures::{base_model, BASE_MODELS};
use protosel::petrinet::{export_pnml, import_pnml};
use protosel::protoselect::select_with;
use protosel::tracedist::distance_matrix_with;
use protosel::{
    baseline_frequency, baseline_random, gen_synthetic, parse_csv, parse_xes, write_xes, CsvConfig, EventLog,
    Execution, GeneratorSpec, IterationRecord, PetriNet, SelectionConfig, StopReason, Trace,
};

use crate::error::CliError;
use crate::{BudgetArgs, CompareArgs, DiscoverArgs, EvaluateArgs, Format, GenArgs, LogArgs, MinerId, SelectArgs};

type Result<T> = std::result::Result<T, CliError>;

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| CliError::Read { path: path.to_owned(), source })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Write { path: path.to_owned(), source })
}

fn out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_owned(), source })
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w)?;
    w.flush().map_err(|source| CliError::Write { path: path.to_owned(), source })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_file(path, |w| {
        w.write_all(text.as_bytes()).map_err(|source| CliError::Write { path: path.to_owned(), source })?;
        w.write_all(b"\n").map_err(|source| CliError::Write { path: path.to_owned(), source })
    })
}

fn read_log(args: &LogArgs) -> Result<EventLog> {
    let format = args.format.unwrap_or_else(|| {
        match args.input.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Xes,
        }
    });
    let file = io::BufReader::new(open(&args.input)?);
    let log = match format {
        Format::Xes => parse_xes(file)?,
        Format::Csv => {
            if !args.delimiter.is_ascii() {
                return Err(CliError::Invalid(format!("delimiter {:?} is not a single-byte character", args.delimiter)));
            }
            let mut config = CsvConfig::new(&args.case_column, &args.activity_column);
            config.timestamp = args.timestamp_column.clone();
            config.delimiter = args.delimiter as u8;
            parse_csv(file, &config)?
        }
    };
    if log.is_empty() {
        return Err(protosel::Error::EmptyLog.into());
    }
    Ok(log)
}

/// A built-in model name, or else a PNML path.
fn load_model(spec: &str) -> Result<PetriNet> {
    if let Some(net) = base_model(spec) {
        return Ok(net);
    }
    let path = Path::new(spec);
    if !path.exists() && path.extension().is_none() {
        return Err(CliError::Invalid(format!(
            "unknown model {spec:?}: not a file and not one of {}",
            BASE_MODELS.join(", ")
        )));
    }
    Ok(import_pnml(io::BufReader::new(open(path)?))?)
}

fn align_options(budget: &BudgetArgs) -> AlignOptions {
    AlignOptions {
        state_budget: budget.align_budget,
        language_budget: budget.lang_budget,
        execution: if budget.sequential { Execution::Sequential } else { Execution::default() },
    }
}

fn miner(id: MinerId) -> &'static dyn Miner {
    match id {
        MinerId::Inductive => &InductiveMiner,
    }
}

fn selection_config(select: &SelectArgs, budget: &BudgetArgs) -> SelectionConfig {
    SelectionConfig {
        align: align_options(budget),
        ..SelectionConfig::new(select.k, select.beta)
            .seed(select.seed)
            .restarts(select.restarts)
            .max_iterations(select.max_iter)
    }
}

/// Rejects bad parameters before any expensive work starts.
fn validate(select: &SelectArgs, log: &EventLog) -> Result<()> {
    f_beta(1.0, 1.0, select.beta)?;
    let variants = log.num_variants();
    if select.k == 0 || select.k > variants {
        return Err(protosel::Error::InvalidK { k: select.k, variants }.into());
    }
    Ok(())
}

fn summary(report: &QualityReport) -> String {
    format!(
        "fitness {:.4}  precision {:.4}  F-beta {:.4}  size {}  cardoso {}",
        report.fitness, report.precision, report.f_beta, report.size, report.cardoso
    )
}

#[derive(Serialize)]
struct History<'a> {
    stop_reason: StopReason,
    prototypes: &'a [Trace],
    iterations: &'a [IterationRecord],
}

pub fn discover(args: &DiscoverArgs) -> Result<()> {
    f_beta(1.0, 1.0, args.select.beta)?;
    let log = read_log(&args.log)?;
    validate(&args.select, &log)?;
    let cfg = selection_config(&args.select, &args.budget);
    let result = select_with(&log, &cfg, miner(args.select.miner))?;

    out_dir(&args.out)?;
    write_file(&args.out.join("model.pnml"), |w| Ok(export_pnml(&result.model, w)?))?;
    let prototypes = EventLog::from_traces(result.prototypes.iter().map(|t| (t.clone(), 1)));
    write_file(&args.out.join("prototypes.xes"), |w| Ok(write_xes(&prototypes, w)?))?;
    write_text(&args.out.join("report.json"), &result.report.to_json())?;
    let history = History { stop_reason: result.stop_reason, prototypes: &result.prototypes, iterations: &result.history };
    write_text(&args.out.join("history.json"), &serde_json::to_string_pretty(&history)?)?;
    if args.dump_matrix {
        let variants: Vec<Trace> = log.variants().into_iter().map(|(t, _)| t).collect();
        let matrix = distance_matrix_with(&variants, cfg.align.execution)?;
        write_file(&args.out.join("distance_matrix.csv"), |w| Ok(matrix.write_csv(w)?))?;
    }

    println!(
        "{} prototypes after {} iterations ({:?})",
        result.prototypes.len(),
        result.history.len(),
        result.stop_reason
    );
    println!("{}", summary(&result.report));
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs) -> Result<()> {
    f_beta(1.0, 1.0, args.beta)?;
    let log = read_log(&args.log)?;
    let net = load_model(&args.model)?;
    let prototypes: Option<Vec<Trace>> = match &args.prototypes {
        Some(path) => {
            let p = parse_xes(io::BufReader::new(open(path)?))?;
            Some(p.variants().into_iter().map(|(t, _)| t).collect())
        }
        None => None,
    };
    let report = evaluate_model(&log, &net, args.beta, prototypes.as_deref(), &align_options(&args.budget))?;
    out_dir(&args.out)?;
    write_text(&args.out.join("report.json"), &report.to_json())?;
    println!("{}", summary(&report));
    Ok(())
}

struct Row {
    method: &'static str,
    outcome: std::result::Result<(QualityReport, usize), String>,
}

fn baseline(
    log: &EventLog,
    sample: Vec<Trace>,
    beta: f64,
    miner: &dyn Miner,
    opts: &AlignOptions,
) -> protosel::Result<(QualityReport, usize)> {
    let model = miner.discover(log.sublog(&sample)?.log())?;
    Ok((evaluate_model(log, &model, beta, Some(&sample), opts)?, sample.len()))
}

pub fn compare(args: &CompareArgs) -> Result<()> {
    f_beta(1.0, 1.0, args.select.beta)?;
    let log = read_log(&args.log)?;
    validate(&args.select, &log)?;
    let cfg = selection_config(&args.select, &args.budget);
    let miner = miner(args.select.miner);
    let beta = cfg.beta;

    let selected = select_with(&log, &cfg, miner);
    // Baselines get as many traces as selection ended up with.
    let n = selected.as_ref().map(|r| r.prototypes.len()).unwrap_or(cfg.k);
    let mut rows = vec![Row {
        method: "prototype_selection",
        outcome: selected.map(|r| (r.report, r.prototypes.len())).map_err(|e| e.to_string()),
    }];
    rows.push(Row {
        method: "frequency",
        outcome: baseline(&log, baseline_frequency(&log, n), beta, miner, &cfg.align).map_err(|e| e.to_string()),
    });
    rows.push(Row {
        method: "random",
        outcome: baseline(&log, baseline_random(&log, n, cfg.seed), beta, miner, &cfg.align).map_err(|e| e.to_string()),
    });
    let none = miner
        .discover(&log)
        .and_then(|model| evaluate_model(&log, &model, beta, None, &cfg.align))
        .map(|r| (r, log.num_variants()));
    rows.push(Row { method: "none", outcome: none.map_err(|e| e.to_string()) });

    out_dir(&args.out)?;
    let path = args.out.join("compare.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record(["method", "F1", "F_beta", "fitness", "precision", "size", "cardoso", "n_selected", "status"])?;
    for row in &rows {
        match &row.outcome {
            Ok((r, n)) => {
                let fields = [r.f1(), r.f_beta, r.fitness, r.precision].map(|x| x.to_string());
                w.write_record([
                    row.method,
                    &fields[0],
                    &fields[1],
                    &fields[2],
                    &fields[3],
                    &r.size.to_string(),
                    &r.cardoso.to_string(),
                    &n.to_string(),
                    "ok",
                ])?;
                println!("{:<20} F1 {:.4}  {}", row.method, r.f1(), summary(r));
            }
            Err(msg) => {
                w.write_record([row.method, "", "", "", "", "", "", "", msg.as_str()])?;
                eprintln!("{}: {msg}", row.method);
            }
        }
    }
    w.flush().map_err(|source| CliError::Write { path: path.clone(), source })?;

    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        return Err(CliError::Partial { failed, total: rows.len() });
    }
    Ok(())
}

pub fn gen(args: &GenArgs) -> Result<()> {
    let base = load_model(&args.model)?;
    let spec = GeneratorSpec { base, n_traces: args.n, noise_rate: args.noise, seed: args.seed };
    let log = gen_synthetic(&spec)?;
    match &args.out {
        Some(path) => write_file(path, |w| Ok(write_xes(&log, w)?)),
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write_xes(&log, &mut w)?;
            w.flush().map_err(|source| CliError::Write { path: PathBuf::from("<stdout>"), source })
        }
    }
}
