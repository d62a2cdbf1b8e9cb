//! Selection baselines: most frequent variants and uniform random variants.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eventlog::{EventLog, Trace};

/// The `n` most frequent variants, lexicographically smaller first on equal
/// counts. Returns every variant when `n` exceeds their number.
pub fn baseline_frequency(log: &EventLog, n: usize) -> Vec<Trace> {
    log.variants().into_iter().take(n).map(|(t, _)| t).collect()
}

/// `n` distinct variants drawn uniformly without replacement, in draw order.
pub fn baseline_random(log: &EventLog, n: usize, seed: u64) -> Vec<Trace> {
    let variants: Vec<&Trace> = log.iter().map(|(t, _)| t).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rand::seq::index::sample(&mut rng, variants.len(), n.min(variants.len()))
        .into_iter()
        .map(|i| variants[i].clone())
        .collect()
}
