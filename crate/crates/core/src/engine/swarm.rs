use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::density::ProbabilityVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::synthesis::MarkovMatrix;

/// Streams at or above this id are reserved for events; agent ids stay below.
const EVENT_STREAM_BASE: u64 = 1 << 63;

/// Counter-based random source: the draw for `(stream, counter)` depends
/// only on the master seed and those two numbers, never on call order.
#[derive(Debug, Clone)]
pub struct StreamFamily {
    seed: u64,
    base: ChaCha8Rng,
}

impl StreamFamily {
    pub fn new(seed: u64) -> Self {
        Self { seed, base: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator positioned at draw `counter` of `stream`.
    pub fn rng(&self, stream: u64, counter: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(stream);
        // one f64 consumes two 32-bit words
        rng.set_word_pos(u128::from(counter) * 2);
        rng
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&self, stream: u64, counter: u64) -> f64 {
        self.rng(stream, counter).gen::<f64>()
    }
}

/// Agent identities and current bins, plus the seed their randomness
/// derives from. Agent `id` draws `uniform(id, 0)` for its initial bin and
/// `uniform(id, k + 1)` for its move at step `k`.
#[derive(Debug, Clone)]
pub struct SwarmState {
    ids: Vec<u64>,
    bins: Vec<usize>,
    streams: StreamFamily,
}

impl SwarmState {
    /// Agents `0..n` at the given bins, seed 0.
    pub fn from_bins(bins: Vec<usize>) -> Self {
        Self::with_seed(bins, 0)
    }

    pub fn with_seed(bins: Vec<usize>, seed: u64) -> Self {
        let ids = (0..bins.len() as u64).collect();
        Self { ids, bins, streams: StreamFamily::new(seed) }
    }

    /// `n` agents placed independently according to `initial`.
    pub fn sample<T: Scalar>(initial: &ProbabilityVector<T>, n: usize, seed: u64) -> Self {
        let streams = StreamFamily::new(seed);
        let cdf = cumulative(initial.as_slice().iter().enumerate().map(|(i, &p)| (i, p)));
        let bins = (0..n as u64).map(|id| pick(&cdf, streams.uniform(id, 0))).collect();
        Self { ids: (0..n as u64).collect(), bins, streams }
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn bins(&self) -> &[usize] {
        &self.bins
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn seed(&self) -> u64 {
        self.streams.seed()
    }

    /// Agents per bin.
    pub fn counts(&self, m: usize) -> Result<Vec<usize>> {
        let mut counts = vec![0usize; m];
        for &b in &self.bins {
            if b >= m {
                return Err(Error::BinOutOfRange { bin: b + 1, bins: m });
            }
            counts[b] += 1;
        }
        Ok(counts)
    }

    /// Number of agents whose bin differs from `before` (same agent order).
    pub fn transitions_since(&self, before: &SwarmState) -> usize {
        self.bins.iter().zip(&before.bins).filter(|(a, b)| a != b).count()
    }
}

/// `(bin, cumulative probability)` over the nonzero entries, ascending bin.
fn cumulative<T: Scalar>(entries: impl Iterator<Item = (usize, T)>) -> Vec<(usize, f64)> {
    let mut acc = T::zero();
    let mut out = Vec::new();
    for (bin, p) in entries {
        if p > T::zero() {
            acc = acc + p;
            out.push((bin, acc.to_f64_lossy()));
        }
    }
    out
}

/// First bin whose cumulative probability strictly exceeds `z`; the last
/// supported bin absorbs round-off when the column sums to just under one.
fn pick(cdf: &[(usize, f64)], z: f64) -> usize {
    cdf.iter().find(|&&(_, c)| c > z).or(cdf.last()).map(|&(b, _)| b).expect("column has support")
}

/// Moves every agent by inverse-CDF sampling of its bin's column.
///
/// Agents are processed in parallel on the current rayon pool; the result
/// is identical for any thread count.
pub fn step_agents<T: Scalar>(swarm: &SwarmState, matrix: &MarkovMatrix<T>, step: usize) -> Result<SwarmState> {
    let m = matrix.bins();
    if let Some(&b) = swarm.bins.iter().find(|&&b| b >= m) {
        return Err(Error::InvalidMatrix(format!("{m}-bin matrix cannot move an agent in bin {}", b + 1)));
    }
    let cdfs: Vec<Vec<(usize, f64)>> =
        (0..m).map(|j| cumulative(matrix.column(j).iter().copied().enumerate())).collect();
    let counter = step as u64 + 1;
    let bins = swarm
        .ids
        .par_iter()
        .zip(swarm.bins.par_iter())
        .map(|(&id, &bin)| pick(&cdfs[bin], swarm.streams.uniform(id, counter)))
        .collect();
    Ok(SwarmState { ids: swarm.ids.clone(), bins, streams: swarm.streams.clone() })
}

/// Swarm-level perturbations applied between steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    /// Remove `floor(fraction · N)` agents chosen uniformly at random.
    RemoveFraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub step: usize,
    pub kind: EventKind,
}

impl Event {
    pub fn remove_fraction(step: usize, fraction: f64) -> Self {
        Self { step, kind: EventKind::RemoveFraction(fraction) }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            EventKind::RemoveFraction(f) if f > 0.0 && f < 1.0 => Ok(()),
            EventKind::RemoveFraction(f) => Err(Error::InvalidFraction(f)),
        }
    }

    /// Agents left out of `n` after the event.
    pub fn survivors(&self, n: usize) -> usize {
        match self.kind {
            EventKind::RemoveFraction(f) => n - (f * n as f64).floor() as usize,
        }
    }
}

/// Applies `event`, drawing from the event stream reserved for its step.
pub fn apply_event(swarm: &SwarmState, event: &Event) -> Result<SwarmState> {
    event.validate()?;
    match event.kind {
        EventKind::RemoveFraction(_) => {
            let n = swarm.len();
            let removed = n - event.survivors(n);
            let mut rng = swarm.streams.rng(EVENT_STREAM_BASE + event.step as u64, 0);
            let mut doomed = vec![false; n];
            for i in index::sample(&mut rng, n, removed) {
                doomed[i] = true;
            }
            let keep = |k: &usize| !doomed[*k];
            Ok(SwarmState {
                ids: (0..n).filter(keep).map(|k| swarm.ids[k]).collect(),
                bins: (0..n).filter(keep).map(|k| swarm.bins[k]).collect(),
                streams: swarm.streams.clone(),
            })
        }
    }
}
