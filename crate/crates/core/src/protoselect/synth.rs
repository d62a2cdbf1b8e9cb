//! Synthetic logs: random runs of a base net plus optional edit noise.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eventlog::{Activity, EventLog, Trace};
use crate::petrinet::PetriNet;
use crate::{Error, Result};

/// Firings allowed per run before it is abandoned and restarted.
const MAX_FIRINGS: usize = 1_000;
/// Restarts allowed per trace before the net is declared unusable.
const MAX_RESTARTS: usize = 100;

#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub base: PetriNet,
    pub n_traces: usize,
    /// Probability that a trace receives one to three random edits.
    pub noise_rate: f64,
    pub seed: u64,
}

/// Simulates `n_traces` runs of the base net. Each step fires a uniformly
/// chosen enabled transition; in the final marking, stopping counts as one
/// more choice. Noisy traces get 1 to 3 insertions or deletions over the
/// net's alphabet.
pub fn gen_synthetic(spec: &GeneratorSpec) -> Result<EventLog> {
    if !(0.0..=1.0).contains(&spec.noise_rate) {
        return Err(Error::Config(format!("noise rate must be within [0, 1], got {}", spec.noise_rate)));
    }
    let alphabet = spec.base.labels();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut log = EventLog::new();
    for _ in 0..spec.n_traces {
        let mut trace = simulate(&spec.base, &mut rng)?;
        if !alphabet.is_empty() && rng.gen_bool(spec.noise_rate) {
            let edits = rng.gen_range(1..=3);
            for _ in 0..edits {
                perturb(&mut trace, &alphabet, &mut rng);
            }
        }
        log.push(Trace::new(trace));
    }
    Ok(log)
}

fn simulate(net: &PetriNet, rng: &mut ChaCha8Rng) -> Result<Vec<Activity>> {
    for _ in 0..MAX_RESTARTS {
        let mut m = net.initial_marking().clone();
        let mut trace = Vec::new();
        for _ in 0..MAX_FIRINGS {
            let enabled = net.enabled(&m);
            let at_final = m == *net.final_marking();
            let options = enabled.len() + usize::from(at_final);
            if options == 0 {
                break;
            }
            let pick = rng.gen_range(0..options);
            if pick == enabled.len() {
                return Ok(trace);
            }
            let t = enabled[pick];
            if let Some(l) = net.label(t) {
                trace.push(l.clone());
            }
            m = net.fire_unchecked(&m, t);
        }
    }
    Err(Error::InvalidNet(format!("no run of {} reached its final marking", net.name)))
}

fn perturb(trace: &mut Vec<Activity>, alphabet: &[Activity], rng: &mut ChaCha8Rng) {
    if trace.is_empty() || rng.gen_bool(0.5) {
        let pos = rng.gen_range(0..=trace.len());
        trace.insert(pos, alphabet[rng.gen_range(0..alphabet.len())].clone());
    } else {
        let pos = rng.gen_range(0..trace.len());
        trace.remove(pos);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformance::{align_log, AlignOptions};
    use crate::fixtures::{base_model, fig1_net};

    fn spec(noise_rate: f64, seed: u64) -> GeneratorSpec {
        GeneratorSpec { base: fig1_net(), n_traces: 300, noise_rate, seed }
    }

    #[test]
    fn noise_free_traces_fit() {
        let log = gen_synthetic(&spec(0.0, 1)).unwrap();
        assert_eq!(log.total_traces(), 300);
        assert_eq!(log.num_variants(), 4);
        let aligned = align_log(&log, &fig1_net(), &AlignOptions::default()).unwrap();
        assert_eq!(aligned.model_trace_coverage(), 1.0);
    }

    #[test]
    fn full_noise_mostly_deviates() {
        let log = gen_synthetic(&spec(1.0, 2)).unwrap();
        let aligned = align_log(&log, &fig1_net(), &AlignOptions::default()).unwrap();
        assert!(aligned.model_trace_coverage() <= 0.2);
    }

    #[test]
    fn deterministic_under_seed() {
        assert_eq!(gen_synthetic(&spec(0.3, 5)).unwrap(), gen_synthetic(&spec(0.3, 5)).unwrap());
        assert_ne!(gen_synthetic(&spec(0.3, 5)).unwrap(), gen_synthetic(&spec(0.3, 6)).unwrap());
    }

    #[test]
    fn loops_terminate() {
        let base = base_model("flower").unwrap();
        let log = gen_synthetic(&GeneratorSpec { base, n_traces: 50, noise_rate: 0.0, seed: 1 }).unwrap();
        assert_eq!(log.total_traces(), 50);
    }

    #[test]
    fn rejects_bad_rate() {
        assert!(matches!(gen_synthetic(&spec(1.5, 1)), Err(Error::Config(_))));
        assert!(gen_synthetic(&spec(f64::NAN, 1)).is_err());
    }
}
