//! K-Medoids over trace variants.
//!
//! Medoids are always input variants, which makes them usable as
//! prototypes. Costs are frequency weighted: a variant occurring `c` times
//! contributes `c * d(v, medoid)`.
//!
//! Seeding is deterministic farthest-point: the most frequent variant first,
//! then repeatedly the variant farthest from its nearest chosen medoid.
//! Optional randomized restarts draw initial medoid sets from a generator
//! seeded with `seed`; the best run wins, the deterministic run on ties.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eventlog::Trace;
use crate::exec::Execution;
use crate::tracedist::DistanceMatrix;
use crate::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub medoid: Trace,
    pub members: Vec<Trace>,
    /// Frequency-weighted distance of the members to the medoid.
    pub cost: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    pub clusters: Vec<Cluster>,
    /// Cluster index of each input variant, in input order.
    pub assignment: Vec<usize>,
    /// Input index of each cluster's medoid.
    pub medoid_indices: Vec<usize>,
    pub total_cost: u64,
    /// Total cost after the initial assignment and after every Lloyd round.
    pub cost_history: Vec<u64>,
}

impl Clustering {
    /// The medoids in cluster order.
    pub fn prototypes(&self) -> Vec<Trace> {
        self.clusters.iter().map(|c| c.medoid.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct KMedoids {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub restarts: usize,
    pub execution: Execution,
}

impl KMedoids {
    pub fn new(k: usize) -> Self {
        KMedoids { k, seed: 0, max_iter: DEFAULT_MAX_ITER, restarts: 0, execution: Execution::default() }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn run(&self, variants: &[(Trace, u64)], matrix: &DistanceMatrix) -> Result<Clustering> {
        let n = variants.len();
        if self.k == 0 || self.k > n {
            return Err(Error::InvalidK { k: self.k, variants: n });
        }
        if matrix.len() != n || matrix.variants().iter().zip(variants).any(|(a, (b, _))| a != b) {
            return Err(Error::MatrixMismatch);
        }
        let counts: Vec<u64> = variants.iter().map(|(_, c)| *c).collect();
        let lloyd = Lloyd { matrix, counts: &counts, exec: self.execution };

        let mut best = lloyd.run(farthest_point_seeds(matrix, &counts, self.k), self.max_iter);
        if self.restarts > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            for _ in 0..self.restarts {
                let init = rand::seq::index::sample(&mut rng, n, self.k).into_vec();
                let run = lloyd.run(init, self.max_iter);
                if run.total_cost < best.total_cost {
                    best = run;
                }
            }
        }
        Ok(best.into_clustering(variants))
    }
}

/// K-Medoids with deterministic seeding and no restarts.
pub fn kmedoids(variants: &[(Trace, u64)], k: usize, matrix: &DistanceMatrix, seed: u64) -> Result<Clustering> {
    KMedoids::new(k).seed(seed).run(variants, matrix)
}

fn farthest_point_seeds(matrix: &DistanceMatrix, counts: &[u64], k: usize) -> Vec<usize> {
    let n = counts.len();
    // highest count, lowest index on ties
    let first = (0..n).max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a))).unwrap();
    let mut medoids = vec![first];
    let mut nearest: Vec<u32> = matrix.row(first).to_vec();
    while medoids.len() < k {
        let next = (0..n)
            .filter(|i| !medoids.contains(i))
            .max_by(|&a, &b| nearest[a].cmp(&nearest[b]).then(b.cmp(&a)))
            .unwrap();
        medoids.push(next);
        for (d, &e) in nearest.iter_mut().zip(matrix.row(next)) {
            *d = (*d).min(e);
        }
    }
    medoids
}

struct Lloyd<'a> {
    matrix: &'a DistanceMatrix,
    counts: &'a [u64],
    exec: Execution,
}

struct Run {
    medoids: Vec<usize>,
    assignment: Vec<usize>,
    total_cost: u64,
    history: Vec<u64>,
}

impl Lloyd<'_> {
    /// Nearest medoid per variant, lowest cluster index on ties.
    fn assign(&self, medoids: &[usize]) -> Vec<usize> {
        self.exec.map_range(self.counts.len(), |v| {
            let row = self.matrix.row(v);
            let mut best = 0;
            for c in 1..medoids.len() {
                if row[medoids[c]] < row[medoids[best]] {
                    best = c;
                }
            }
            best
        })
    }

    fn cost(&self, medoids: &[usize], assignment: &[usize]) -> u64 {
        assignment
            .iter()
            .enumerate()
            .map(|(v, &c)| self.counts[v] * self.matrix.get(v, medoids[c]) as u64)
            .sum()
    }

    /// Per cluster, the member minimizing the weighted distance sum. The
    /// current medoid is kept unless some member is strictly better; among
    /// strictly better members the lowest index wins.
    fn update(&self, medoids: &[usize], assignment: &[usize]) -> Vec<usize> {
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); medoids.len()];
        for (v, &c) in assignment.iter().enumerate() {
            members[c].push(v);
        }
        let weighted = |cand: usize, ms: &[usize]| -> u64 {
            let row = self.matrix.row(cand);
            ms.iter().map(|&v| self.counts[v] * row[v] as u64).sum()
        };
        self.exec.map_range(medoids.len(), |c| {
            let ms = &members[c];
            let mut best = medoids[c];
            let mut best_cost = weighted(best, ms);
            for &cand in ms {
                let cost = weighted(cand, ms);
                if cost < best_cost {
                    best = cand;
                    best_cost = cost;
                }
            }
            best
        })
    }

    fn run(&self, mut medoids: Vec<usize>, max_iter: usize) -> Run {
        let mut assignment = self.assign(&medoids);
        let mut history = vec![self.cost(&medoids, &assignment)];
        for _ in 0..max_iter {
            let next = self.update(&medoids, &assignment);
            if next == medoids {
                break;
            }
            medoids = next;
            let next_assignment = self.assign(&medoids);
            history.push(self.cost(&medoids, &next_assignment));
            if next_assignment == assignment {
                break;
            }
            assignment = next_assignment;
        }
        let total_cost = *history.last().unwrap();
        Run { medoids, assignment, total_cost, history }
    }
}

impl Run {
    fn into_clustering(self, variants: &[(Trace, u64)]) -> Clustering {
        let mut clusters: Vec<Cluster> = self
            .medoids
            .iter()
            .map(|&m| Cluster { medoid: variants[m].0.clone(), members: Vec::new(), cost: 0 })
            .collect();
        for (v, &c) in self.assignment.iter().enumerate() {
            let (trace, count) = &variants[v];
            let d = crate::tracedist::edit_distance(trace, &clusters[c].medoid) as u64;
            clusters[c].members.push(trace.clone());
            clusters[c].cost += count * d;
        }
        Clustering {
            clusters,
            assignment: self.assignment,
            medoid_indices: self.medoids,
            total_cost: self.total_cost,
            cost_history: self.history,
        }
    }
}
